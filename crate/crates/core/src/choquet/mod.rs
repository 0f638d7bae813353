//! Choquet and asymmetric integrals of step functions, indefinite
//! integrals, and the comparison and Jensen inequalities built on them.

mod blocks;
mod compare;
mod indefinite;
mod integral;
mod jensen;
mod step;

pub use blocks::{
    average_allocation, block_additivity_check, is_block_constant, mean_value, simplify_selection,
    BlockAdditivityReport,
};
pub use compare::{
    compare_equal_from_integrals, compare_pointwise_from_integrals, find_smaller_witness, strict_inequality,
    ComparisonVerdict, EqualityVerdict, StrictVerdict,
};
pub use indefinite::{
    abs_continuity_check, abs_continuity_modulus, indefinite, inheritance_report, ContinuityVerdict,
    IndefiniteIntegral, InheritanceReport, InheritanceRow,
};
pub use integral::{
    asymmetric_integral, asymmetric_integral_exact, choquet_integral, choquet_integral_exact,
    conjugate_duality_check, indicator_violation, integral, subadditivity_check, vector_integral, DualityVerdict,
    SubadditivityVerdict,
};
pub use jensen::{jensen_scalar, jensen_vector, truncate, JensenVerdict};
pub use step::{refinement, Allocation, Piece, StepFunction};
