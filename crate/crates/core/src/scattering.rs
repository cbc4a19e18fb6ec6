//! Output wavefunctions of one and two photons after the atom, split into
//! interaction processes.
//!
//! The one-photon kernel is `δ(x - x') - 2·exp(-(x' - x))` for `x ≤ x'`.
//! The two-photon kernel is the product of two one-photon kernels plus the
//! saturation term `-4·exp(-(x1' + x2' - x1 - x2))` for
//! `x1, x2 ≤ min(x1', x2')`. The delta part is never discretized; it simply
//! passes the input through.
//!
//! For product inputs the saturation term factorizes into the square of a
//! one-dimensional tail integral, which gives the closed form
//! `ΔΨ(x1, x2) = -exp(-|x1 - x2|)·Ψ_abs(max(x1, x2))²`. The fast path uses
//! it; [`two_photon_output_oracle`] integrates the kernels directly.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Result;
use crate::pulses::{GaussianPulse, InputPulse, OnePhotonField, SpatialGrid, TwoPhotonField};
use crate::quadrature::{
    erfc_via_scaled, exp_weighted_tail_integral, scaled_erfc, try_exp_weighted_tail_integral,
    QuadratureSettings,
};

/// Transmission and absorption parts of a one-photon output.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePhotonDecomposition {
    /// Transmitted without absorption, `Ψ_prop = Ψ_A`.
    pub prop: OnePhotonField,
    /// Absorbed and re-emitted, `Ψ_abs`.
    pub abs: OnePhotonField,
    pub total: OnePhotonField,
}

/// The three two-photon processes and the saturation correction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonDecomposition {
    /// Both photons transmitted.
    pub psi1: TwoPhotonField,
    /// One photon transmitted, the other absorbed and re-emitted.
    pub psi2: TwoPhotonField,
    /// Both photons absorbed and re-emitted, saturation included.
    pub psi3: TwoPhotonField,
    /// Contribution of the saturation term alone.
    pub nonlinear_delta: TwoPhotonField,
    pub total: TwoPhotonField,
}

impl TwoPhotonDecomposition {
    /// `psi3 - nonlinear_delta`: the two-photon absorption amplitude an
    /// unsaturable (linear) atom would produce.
    pub fn linear_absorption(&self) -> TwoPhotonField {
        let amplitudes = self
            .psi3
            .amplitudes()
            .iter()
            .zip(self.nonlinear_delta.amplitudes())
            .map(|(p3, d)| p3 - d)
            .collect();
        TwoPhotonField::new(*self.psi3.grid(), amplitudes)
            .expect("difference of finite fields on one grid")
    }
}

/// `Ψ_abs(x) = -2∫_x^∞ exp(-(s - x))·Ψ_A(s) ds` in closed form.
///
/// With `u = x - center` and `z = u/T + T/2` the integral is
/// `-(T√π/√N)·exp(u + T²/4)·erfc(z)`. For `z ≥ 0` this is rewritten as
/// `-(T√π/√N)·exp(-u²/T²)·erfcx(z)`, which stays finite for long pulses where
/// `exp(T²/4)` alone would overflow. For `z < 0` the exponent `u + T²/4` is
/// below `-T²/4` and `erfc(z) ∈ (1, 2]`, so the direct form is safe.
pub fn psi_abs_at(pulse: &GaussianPulse, x: f64) -> f64 {
    let t = pulse.pulse_length();
    let u = x - pulse.center();
    let z = u / t + 0.5 * t;
    let prefactor = -pulse.amplitude_scale() * t * PI.sqrt() / pulse.normalization().sqrt();
    if z >= 0.0 {
        let w = u / t;
        prefactor * (-w * w).exp() * scaled_erfc(z)
    } else {
        prefactor * (u + 0.25 * t * t).exp() * erfc_via_scaled(z)
    }
}

/// `Ψ_abs(x)` for an arbitrary pulse by adaptive quadrature of the
/// absorption kernel.
pub fn psi_abs_by_quadrature(
    pulse: &impl InputPulse,
    x: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    Ok(-2.0 * exp_weighted_tail_integral(|s| pulse.amplitude(s), x, 1.0, settings)?)
}

pub fn one_photon_output(pulse: &GaussianPulse, grid: SpatialGrid) -> OnePhotonDecomposition {
    let prop = OnePhotonField::from_fn(grid, |x| pulse.evaluate(x));
    let abs = OnePhotonField::from_fn(grid, |x| psi_abs_at(pulse, x));
    let total = OnePhotonField::from_fn(grid, |x| pulse.evaluate(x) + psi_abs_at(pulse, x));
    OnePhotonDecomposition { prop, abs, total }
}

/// One-photon output of an arbitrary pulse, absorption part by quadrature.
pub fn one_photon_output_by_quadrature(
    pulse: &impl InputPulse,
    grid: SpatialGrid,
    settings: &QuadratureSettings,
) -> Result<OnePhotonDecomposition> {
    let points = grid.points();
    let prop: Vec<f64> = points.iter().map(|&x| pulse.amplitude(x)).collect();
    let abs = points
        .par_iter()
        .map(|&x| psi_abs_by_quadrature(pulse, x, settings))
        .collect::<Result<Vec<f64>>>()?;
    let total = prop.iter().zip(&abs).map(|(p, a)| p + a).collect();
    Ok(OnePhotonDecomposition {
        prop: OnePhotonField::new(grid, prop)?,
        abs: OnePhotonField::new(grid, abs)?,
        total: OnePhotonField::new(grid, total)?,
    })
}

/// Saturation correction `ΔΨ(x1, x2) = -exp(-|x1 - x2|)·Ψ_abs(max(x1, x2))²`.
/// Never positive; on the diagonal it cancels `Ψ_abs(x)²` exactly.
pub fn nonlinear_delta_at(pulse: &GaussianPulse, x1: f64, x2: f64) -> f64 {
    let a = psi_abs_at(pulse, x1.max(x2));
    -(-(x1 - x2).abs()).exp() * (a * a)
}

/// Total two-photon output at one point, without sampling a grid.
pub fn total_output_at(pulse: &GaussianPulse, x1: f64, x2: f64) -> f64 {
    let out1 = pulse.evaluate(x1) + psi_abs_at(pulse, x1);
    let out2 = pulse.evaluate(x2) + psi_abs_at(pulse, x2);
    out1 * out2 + nonlinear_delta_at(pulse, x1, x2)
}

/// Component values at one grid node, shared by the field and streaming
/// paths so both see bit-identical numbers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeComponents {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub delta: f64,
    pub total: f64,
}

/// Precomputed one-photon samples for the factorized two-photon formulas.
pub(crate) struct FactorizedSamples {
    pub x: Vec<f64>,
    pub prop: Vec<f64>,
    pub abs: Vec<f64>,
}

impl FactorizedSamples {
    pub fn new(pulse: &GaussianPulse, grid: &SpatialGrid) -> Self {
        let x = grid.points();
        let prop = x.iter().map(|&x| pulse.evaluate(x)).collect();
        let abs = x.iter().map(|&x| psi_abs_at(pulse, x)).collect();
        Self { x, prop, abs }
    }

    pub fn node(&self, i: usize, j: usize) -> NodeComponents {
        let (p1, p2) = (self.prop[i], self.prop[j]);
        let (a1, a2) = (self.abs[i], self.abs[j]);
        let am = self.abs[i.max(j)];
        let psi1 = p1 * p2;
        let psi2 = p1 * a2 + a1 * p2;
        let delta = -(-(self.x[i] - self.x[j]).abs()).exp() * (am * am);
        let psi3 = a1 * a2 + delta;
        NodeComponents {
            psi1,
            psi2,
            psi3,
            delta,
            total: psi1 + psi2 + psi3,
        }
    }
}

/// Two-photon output for the product input `Ψ_A(x1)·Ψ_A(x2)`, built from
/// one-photon samples in `O(n²)`.
pub fn two_photon_output(pulse: &GaussianPulse, grid: SpatialGrid) -> TwoPhotonDecomposition {
    let samples = FactorizedSamples::new(pulse, &grid);
    let n = grid.point_count();
    let rows: Vec<Vec<NodeComponents>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| samples.node(i, j)).collect())
        .collect();
    let component = |pick: fn(&NodeComponents) -> f64| {
        TwoPhotonField::from_symmetric_fn(grid, |i, j| pick(&rows[i][j - i]))
    };
    TwoPhotonDecomposition {
        psi1: component(|c| c.psi1),
        psi2: component(|c| c.psi2),
        psi3: component(|c| c.psi3),
        nonlinear_delta: component(|c| c.delta),
        total: component(|c| c.total),
    }
}

/// Direct evaluation of the two-photon kernels against the input amplitude
/// `Ψ_in(s1, s2) = Ψ(s1)·Ψ(s2)`, treated as a general function of two
/// variables. Every grid node is integrated independently with nested
/// adaptive quadrature; nothing is mirrored or factorized, so the result is
/// an independent check of [`two_photon_output`].
///
/// Cost grows with the number of nodes times the nested quadrature work;
/// keep grids around 41×41 to 101×101.
pub fn two_photon_output_oracle(
    pulse: &impl InputPulse,
    grid: SpatialGrid,
    settings: &QuadratureSettings,
) -> Result<TwoPhotonDecomposition> {
    settings.validate()?;
    let input = |s1: f64, s2: f64| pulse.amplitude(s1) * pulse.amplitude(s2);
    let x = grid.points();
    let n = grid.point_count();
    let nodes: Vec<NodeComponents> = (0..n * n)
        .into_par_iter()
        .map(|k| oracle_node(&input, x[k / n], x[k % n], settings))
        .collect::<Result<_>>()?;
    let field = |pick: fn(&NodeComponents) -> f64| {
        TwoPhotonField::new(grid, nodes.iter().map(pick).collect())
    };
    Ok(TwoPhotonDecomposition {
        psi1: field(|c| c.psi1)?,
        psi2: field(|c| c.psi2)?,
        psi3: field(|c| c.psi3)?,
        nonlinear_delta: field(|c| c.delta)?,
        total: field(|c| c.total)?,
    })
}

fn oracle_node<F>(
    input: &F,
    x1: f64,
    x2: f64,
    settings: &QuadratureSettings,
) -> Result<NodeComponents>
where
    F: Fn(f64, f64) -> f64,
{
    // ∫_{lo1}^∞ ds1 e^{-(s1-lo1)} ∫_{lo2}^∞ ds2 e^{-(s2-lo2)} Ψ_in(s1, s2)
    let double_tail = |lo1: f64, lo2: f64| {
        try_exp_weighted_tail_integral(
            |s1| exp_weighted_tail_integral(|s2| input(s1, s2), lo2, 1.0, settings),
            lo1,
            1.0,
            settings,
        )
    };

    let psi1 = input(x1, x2);
    let second_absorbed = exp_weighted_tail_integral(|s| input(x1, s), x2, 1.0, settings)?;
    let first_absorbed = exp_weighted_tail_integral(|s| input(s, x2), x1, 1.0, settings)?;
    let psi2 = -2.0 * second_absorbed - 2.0 * first_absorbed;

    let both_absorbed = 4.0 * double_tail(x1, x2)?;
    let m = x1.max(x2);
    // Shifting both lower limits to M pulls out exp(-(M - x1))·exp(-(M - x2)).
    let weight = (-(m - x1)).exp() * (-(m - x2)).exp();
    let delta = -(4.0 * (weight * double_tail(m, m)?));
    let psi3 = both_absorbed + delta;
    Ok(NodeComponents {
        psi1,
        psi2,
        psi3,
        delta,
        total: psi1 + psi2 + psi3,
    })
}

/// Long-pulse approximations of the process components, for comparison
/// only: `psi2 ≈ -4Ψ_A(x1 + ½)Ψ_A(x2 + ½)` and
/// `psi3 ≈ 4Ψ_A(x1 + 1)Ψ_A(x2 + 1)(1 - exp(-|x1 - x2|))`. Valid for `T ≫ 1`.
pub fn approx_long_pulse_components(
    pulse: &GaussianPulse,
    grid: SpatialGrid,
) -> TwoPhotonDecomposition {
    let x = grid.points();
    let at = |shift: f64| -> Vec<f64> { x.iter().map(|&x| pulse.evaluate(x + shift)).collect() };
    let (p0, p_half, p_one) = (at(0.0), at(0.5), at(1.0));
    let psi1 = TwoPhotonField::from_symmetric_fn(grid, |i, j| p0[i] * p0[j]);
    let psi2 = TwoPhotonField::from_symmetric_fn(grid, |i, j| -4.0 * p_half[i] * p_half[j]);
    let shifted = |i: usize, j: usize| 4.0 * p_one[i] * p_one[j];
    let decay = |i: usize, j: usize| (-(x[i] - x[j]).abs()).exp();
    let psi3 = TwoPhotonField::from_symmetric_fn(grid, |i, j| shifted(i, j) * (1.0 - decay(i, j)));
    let nonlinear_delta =
        TwoPhotonField::from_symmetric_fn(grid, |i, j| -shifted(i, j) * decay(i, j));
    let total = TwoPhotonField::from_symmetric_fn(grid, |i, j| {
        psi1.get(i, j) + psi2.get(i, j) + psi3.get(i, j)
    });
    TwoPhotonDecomposition {
        psi1,
        psi2,
        psi3,
        nonlinear_delta,
        total,
    }
}
