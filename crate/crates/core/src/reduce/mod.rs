//! Conjugacies towards rotations, parabolic normal forms and the
//! cohomological equations behind them.

mod almost;
mod cohomology;
mod parabolic;

pub use almost::{
    almost_reduce, build_u, build_w, locate_theta, theta_rho_consistency, AlmostReduction, ArConfig,
    ConjugacyResult, ConsistencyConfig, ThetaFit, ThetaRhoReport, UField, STRIP_HEIGHTS,
};
pub use cohomology::{matrix_cohomology, scalar_cohomology, Cohomology, TrigMatrix};
pub use parabolic::{
    complete_to_sl2, gap_opening_certificate, parabolic_reduce, reduce_invariant_section, Completion,
    GapCertificate, ParabolicConfig, ParabolicForm, TraceRow,
};
