//! Pulse-length dependence of the saturation effect, computed without
//! storing the two-photon fields.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::{find_peak, CrossSection};
use crate::pulses::{GaussianPulse, SpatialGrid};
use crate::quadrature::integrate_square_split_diagonal_many;
use crate::scattering::{total_output_at, FactorizedSamples};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityMetrics {
    pub pulse_length: f64,
    /// `1 - ‖psi3‖ / ‖psi_abs ⊗ psi_abs‖`: the fraction of the two-photon
    /// absorption amplitude removed by saturation.
    pub suppression: f64,
    pub psi3_norm: f64,
    pub linear_absorption_norm: f64,
    /// `‖ΔΨ‖`, the size of the saturation correction itself.
    pub nonlinear_delta_norm: f64,
    pub total_norm: f64,
    /// Refined `total / psi1` peak ratio on the diagonal.
    pub diagonal_total_ratio: f64,
    pub diagonal_delay: f64,
    pub max_total: f64,
    pub min_total: f64,
    /// Smallest separation at which the total output changes sign, measured
    /// across the diagonal through the diagonal peak.
    pub sign_change_separation: Option<f64>,
}

pub fn nonlinearity_metrics(
    pulse: &GaussianPulse,
    grid: SpatialGrid,
) -> Result<NonlinearityMetrics> {
    let samples = FactorizedSamples::new(pulse, &grid);
    let n = grid.point_count();
    let h = grid.spacing();

    let [psi3_sq, linear_sq, delta_sq, total_sq] =
        integrate_square_split_diagonal_many(n, h, |i, j| {
            let c = samples.node(i, j);
            let linear = samples.abs[i] * samples.abs[j];
            [
                c.psi3 * c.psi3,
                linear * linear,
                c.delta * c.delta,
                c.total * c.total,
            ]
        })?;

    let (min_total, max_total) = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| {
                let t = samples.node(i, j).total;
                (lo.min(t), hi.max(t))
            })
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );

    let diagonal = |pick: fn(&crate::scattering::NodeComponents) -> f64| {
        CrossSection::new(
            0.0,
            samples.x.clone(),
            (0..n).map(|i| pick(&samples.node(i, i))).collect(),
        )
    };
    let psi1_diag = diagonal(|c| c.psi1)?;
    let total_diag = diagonal(|c| c.total)?;
    let reference = find_peak(&psi1_diag, None)?;
    let (diagonal_total_ratio, diagonal_delay, center) =
        match find_peak(&total_diag, Some(&psi1_diag)) {
            Ok(p) => (
                p.ratio_to_reference.expect("reference given"),
                p.delay - reference.delay,
                p.peak_position,
            ),
            Err(Error::NoPeak { .. }) => {
                let (k, v) = total_diag.extreme_sample().expect("non-empty");
                (v / reference.peak_value, f64::NAN, samples.x[k])
            }
            Err(e) => return Err(e),
        };

    let linear_absorption_norm = linear_sq.sqrt();
    Ok(NonlinearityMetrics {
        pulse_length: pulse.pulse_length(),
        suppression: 1.0 - psi3_sq.sqrt() / linear_absorption_norm,
        psi3_norm: psi3_sq.sqrt(),
        linear_absorption_norm,
        nonlinear_delta_norm: delta_sq.sqrt(),
        total_norm: total_sq.sqrt(),
        diagonal_total_ratio,
        diagonal_delay,
        max_total,
        min_total,
        sign_change_separation: sign_change_separation(pulse, &grid, center),
    })
}

/// First `tau > 0` where `total(c - tau/2, c + tau/2)` changes sign, located
/// by a grid-spaced scan and bisection. `None` if the sign holds up to the
/// edge of the grid.
pub fn sign_change_separation(
    pulse: &GaussianPulse,
    grid: &SpatialGrid,
    center: f64,
) -> Option<f64> {
    let across = |tau: f64| total_output_at(pulse, center - 0.5 * tau, center + 0.5 * tau);
    let reach = 2.0 * (center - grid.x_min()).min(grid.x_max() - center);
    let start = across(0.0);
    if start == 0.0 || !(reach > 0.0) {
        return None;
    }
    let step = grid.spacing();
    let mut lo = 0.0;
    while lo + step <= reach {
        let hi = lo + step;
        if across(hi).signum() != start.signum() {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if across(mid).signum() == start.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        lo = hi;
    }
    None
}
