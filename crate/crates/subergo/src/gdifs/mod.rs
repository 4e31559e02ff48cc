//! Graph-directed IFS of the B-part: attractor cylinders, the natural measure and its
//! average density.

mod bracket;
mod density;
mod graph;
mod measure;

pub use bracket::{ball_measure_bracket, classify, Relation, Window, MAX_BRACKET_DEPTH};
pub use density::{
    attractor_points, average_density_birkhoff, average_density_pointwise, DensityConfig, DensityEstimate, DensityMethod,
};
pub use graph::{build_graph, build_graph_with, natural_projection, Bbox, Edge, GdifsGraph, Point, Projection};
pub use measure::{cylinder_measure, sample_point, MarkovSampler, MassVector, PathPrefix};
