//! Suspension tilings of 1-D substitutions and grid tilings of q×q substitutions.

mod grid;
mod oned;
mod supertile;

pub use grid::{
    count_b_tiles_ball_2d, grid_patch, grid_patch_limited, GridLimits, GridPatch, DEFAULT_MAX_CELLS, DEFAULT_MAX_SIDE,
};
pub use oned::{
    btile_growth_scan, btile_jump_points, count_b_tiles_1d, lemma_length_ratio, right_end, suspension_lengths, suspension_lengths_of,
    tiling_length, window_from_sequence, BTileCounter, GrowthRow, LengthNormalization, LengthVector, Tiling1DWindow,
};
pub use supertile::{Ancestor, Supertile1D, Supertile2D};
