//! Normalizations of the infinite invariant measure, ergodic sums and their
//! second-order (log-averaged) limits.

mod distribution;
mod frequency;
mod normalization;
mod second_order;
mod series;
mod sums;
mod transversal;

pub use distribution::{distribution_experiment, ks_uniform, quantile, DistributionLevel, QUANTILE_GRID};
pub use frequency::{alpha_frequency, frequency_from_second_order, log_frequency, sbp_reconstruction};
pub use normalization::{measure_normalization, transverse_weights, MeasureNormalization, Observable, TransverseWeights};
pub use second_order::{second_order_symbolic, second_order_tiling_1d, second_order_tiling_2d};
pub use series::{integer_grid, real_grid, FrequencySeries, SecondOrderSeries, Series, SeriesKind, SeriesRow, GRID_PER_OCTAVE};
pub use sums::{birkhoff_prefix_sums, ratio_check, ratio_check_sums, RatioRow};
pub use transversal::{random_orbit, random_orbits, random_supertile_2d, random_supertiles_2d, RandomOrbit, TransversalSampler, MAX_ANCESTRY};
