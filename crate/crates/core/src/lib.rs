//! Exact scattering of one- and two-photon pulses off a two-level atom
//! coupled to a single one-dimensional field mode.
//!
//! The atom re-emits everything into the same mode, so the one-photon
//! output differs from the input only by a causal exponential convolution,
//! while the two-photon output carries an additional saturation term: the
//! atom cannot absorb both photons at the same time. Outputs are split into
//! transmission, one-photon absorption and two-photon absorption parts, and
//! the [`observables`] module extracts delays and amplitude ratios from
//! slices at fixed photon separation.
//!
//! All quantities use natural units (`Γ = c = 1`).

// Tabulated constants keep their published digits; `!(x > 0.0)` is used on
// purpose so that NaN is rejected too.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod observables;
pub mod pulses;
pub mod quadrature;
pub mod scattering;
pub mod sweep;

pub use error::{Error, Result};
pub use observables::{
    component_ratio_profile, cross_section, field_norm, find_peak, ComponentRatio,
    ComponentRatioProfile, CrossSection, PeakReport,
};
pub use pulses::{
    effective_gamma, evaluate_pulse, make_gaussian, product_state, CavityParams, GaussianPulse,
    InputPulse, OnePhotonField, SampledPulse, SpatialGrid, TwoPhotonField,
};
pub use quadrature::{
    exp_weighted_tail_integral, integrate_on_grid, scaled_erfc, QuadratureSettings,
};
pub use scattering::{
    approx_long_pulse_components, nonlinear_delta_at, one_photon_output, psi_abs_at,
    two_photon_output, two_photon_output_oracle, OnePhotonDecomposition, TwoPhotonDecomposition,
};
