//! Substitution matrices: normal form, primitivity, Perron–Frobenius data, α and admissibility.

mod admissibility;
mod matrix;
mod normal_form;
mod perron;

pub use admissibility::{
    admissibility_report, alpha_exponent, asymptotic_lengths, border_condition, interior_witness,
    length_asymptotics_check, AdmissibilityOptions, AdmissibilityReport, BlockAnalysis, LengthRow, LengthTable,
    Tec2, REPORT_SCHEMA_VERSION,
};
pub use matrix::{is_primitive, CountMatrix};
pub use normal_form::{normal_form, BlockKind, BlockStructure};
pub use perron::{
    dominant_vector, perron_vectors, spectral_radius, Normalization, PerronData, Side, POWER_MAX_ITER, POWER_TOL,
};
