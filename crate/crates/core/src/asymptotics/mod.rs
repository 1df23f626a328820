//! Remainder sequences, their asymptotic expansions and numerical checks of
//! the decay statements.

mod expansion;
mod remainder;
mod series;
mod verify;

pub use expansion::{
    alpha_sequence, derivative_trig_coefficients, linear_parts, thm51_fit, ExpansionCoeffs, ExpansionFit,
};
pub use remainder::{
    phi_hat, phi_hat_norm, phi_of_sigma, rate_fit, rate_fit_points, rate_fit_real, remainders, thm41_alphas,
    window_increment, RemainderSeq,
};
pub use series::{
    expansion_order, f_recurrence, nu, s_expansion, s_expansion_from_table, s_quadrature, s_quadrature_all, FTable,
    OrderEstimate, MAX_QUADRATURE_ORDER,
};
pub use verify::{
    compute_spectra, derivative_ratios, ensemble_phi_norms, phi_sequence, verify_derivative, verify_main_theorem,
    verify_thm21, verify_thm41, verify_thm51, EnsembleSpec, SuiteOptions, VerificationReport, DERIVATIVE_EPSILONS,
};
