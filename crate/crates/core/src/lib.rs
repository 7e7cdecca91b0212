//! Exact eigenpairs of perturbed tridiagonal 2-Toeplitz matrices, gauge
//! capacitance matrices of resonator chains, and skin-effect diagnostics.

pub mod capacitance;
pub mod error;
pub mod oracle;
pub mod polycore;
pub mod spectral;
pub mod toeplitz2;
pub mod tridiag;
pub mod vecops;

pub use capacitance::{
    chain_eigenpairs, dimer_coefficients, gauge_capacitance, generalized_matrix, interface_chain,
    interface_layout, mode_profile, subwavelength_frequencies, Frequencies, ModeProfile,
    ResonatorChain,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oracle::{SymTridiagonal, RESIDUAL_TOL};
pub use polycore::{cheb_eval, cheb_u_roots, hat_sequences, y_map, ChebyshevKind, HatSequences, RecurrenceSpec};
pub use spectral::{
    det_curve, eig_curves, min_abs_det, pseudospectrum, sigma_min, winding, EigenCurves, GridSpec,
    PseudoGrid, SymbolCurve,
};
pub use toeplitz2::{
    build_interface, build_perturbed, char_poly, decay_report, eigen_all, eigenvector_exact,
    interface_eigenpairs, interface_eigenvector, interface_localization_check, mirrored_eigenvector,
    DecayReport, Eigenpair, InterfaceLayout, InterfaceReport, Klass, PerturbedDimerParams,
    VectorMethod,
};
pub use tridiag::TridiagonalMatrix;
