//! Exact arithmetic for link-theoretic obstructions.
//!
//! The crate has three legs:
//!
//! * **Fox calculus** ([`laurent`], [`foxcalc`], [`boundary`]): Laurent
//!   polynomial arithmetic, free differential calculus on group
//!   presentations, and the boundary-link obstruction for the 4-strand
//!   pretzel family, decided by one-variable ideal membership.
//! * **Seifert forms** ([`intmat`], [`seifert`]): integer Seifert matrices,
//!   the associated (b, t) forms, metabolizer search, and hyperbolic
//!   splitting verification.
//! * **Signatures** ([`cyclotomic`], [`signature`]): Levine-Tristram
//!   signatures at roots of unity, computed exactly over cyclotomic fields
//!   with certified sign determination, signature profiles over the circle,
//!   the hyperbolicity obstruction, and the doubly-slice-genus lower bound
//!   for Bing doubles.
//!
//! Everything numerical is exact (big integers, big rationals, cyclotomic
//! residues); the only floating-point code is the explicitly opt-in numeric
//! signature mode, which fails loudly (`UncertifiableSign`) instead of
//! guessing. With the default `parallel` feature, grid scans, metabolizer
//! searches, and multi-point signature evaluation use data parallelism;
//! sequential fallbacks are always available.

pub mod boundary;
pub mod cyclotomic;
pub mod foxcalc;
pub mod intmat;
pub mod laurent;
pub mod seifert;
pub mod signature;

pub use boundary::{
    closed_form_obstructed, is_pretzel_boundary_obstructed, longitude_obstruction,
    pretzel_presentation, relator_derivative_closed_form, scan_pretzel_grid, BoundaryError,
    ObstructionReport, PretzelParams, PretzelScanRow, Verdict,
};
pub use cyclotomic::{cyclotomic_polynomial, euler_phi, CyclotomicElement, CyclotomicError};
pub use foxcalc::{
    abelianize, fox_derivative, AbelianizationMap, FoxError, GroupWord, Letter, Presentation,
    Relator,
};
pub use intmat::IntMat;
pub use laurent::{LaurentError, LaurentPolynomial};
pub use seifert::{
    builtin_matrix, builtin_names, connected_sum, enumerate_primitive_sublattices,
    form_from_matrix, reverse_sum, search_metabolizer, verify_hyperbolic_splitting,
    verify_metabolizer, Epsilon, SeifertError, SeifertForm, SeifertMatrix, Sublattice,
};
pub use signature::{
    bing_double_ds_bound, char_poly_at, char_poly_display, default_test_set, hermitian_matrix,
    hermitian_matrix_numeric, hyperbolic_obstruction, jump_orders, jump_points, signature_at,
    signature_at_angle_numeric, signature_at_numeric, signature_profile, signatures_at_many,
    torsion_polynomial, CirclePoint, DsBoundReport, HermitianMatrix, HyperbolicCertificate,
    HyperbolicVerdict, RootOfUnity, SignatureArc, SignatureError, SignatureProfile,
};
