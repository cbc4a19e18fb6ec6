//! Cross-sections at fixed photon separation, refined peaks, delays,
//! amplitude ratios and norms.

use crate::error::{invalid, Error, Result};
use crate::pulses::{OnePhotonField, TwoPhotonField};
use crate::quadrature::{integrate_on_grid, integrate_square_split_diagonal};
use crate::scattering::TwoPhotonDecomposition;

/// Slice of a two-photon amplitude along `x2 = x1 + tau`, parametrized by
/// the mean position `(x1 + x2)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub tau: f64,
    pub mean_positions: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl CrossSection {
    pub fn new(tau: f64, mean_positions: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(invalid(format!("tau must be non-negative, got {tau}")));
        }
        if mean_positions.len() != amplitudes.len() {
            return Err(invalid("cross-section arrays differ in length"));
        }
        if mean_positions
            .iter()
            .chain(&amplitudes)
            .any(|v| !v.is_finite())
        {
            return Err(invalid("cross-section contains non-finite values"));
        }
        Ok(Self {
            tau,
            mean_positions,
            amplitudes,
        })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Sample with the largest magnitude, as `(index, signed value)`.
    pub fn extreme_sample(&self) -> Option<(usize, f64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
                Some((_, b)) if b.abs() >= v.abs() => best,
                _ => Some((i, v)),
            })
    }
}

/// Refined extremum of a cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    pub peak_position: f64,
    /// Refined `|amplitude|` with the sign of the extremal sample.
    pub peak_value: f64,
    /// `-peak_position`: later arrival sits at more negative `x` in the
    /// co-moving frame.
    pub delay: f64,
    /// `peak_value` over the reference's refined peak value, if a reference
    /// was given.
    pub ratio_to_reference: Option<f64>,
}

/// Samples `field(x1, x1 + tau)` for every grid node `x1` whose partner lies
/// inside the domain. `x2` is interpolated linearly between neighbouring
/// nodes; along a row this is exactly bilinear interpolation.
pub fn cross_section(field: &TwoPhotonField, tau: f64) -> Result<CrossSection> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(invalid(format!("tau must be non-negative, got {tau}")));
    }
    let grid = field.grid();
    let n = grid.point_count();
    let h = grid.spacing();
    let steps = tau / h;
    let nearest = steps.round();
    // Separations that land on grid lines to rounding are read exactly.
    let steps = if (steps - nearest).abs() < 1e-9 {
        nearest
    } else {
        steps
    };
    let whole = steps.floor() as usize;
    let frac = steps - whole as f64;
    let last_partner = if frac > 0.0 { whole + 1 } else { whole };
    if last_partner >= n {
        return Err(Error::Domain { tau });
    }
    let count = n - last_partner;
    let mut mean_positions = Vec::with_capacity(count);
    let mut amplitudes = Vec::with_capacity(count);
    for i in 0..count {
        let lo = field.get(i, i + whole);
        let value = if frac > 0.0 {
            lo * (1.0 - frac) + field.get(i, i + whole + 1) * frac
        } else {
            lo
        };
        mean_positions.push(grid.x(i) + 0.5 * tau);
        amplitudes.push(value);
    }
    CrossSection::new(tau, mean_positions, amplitudes)
}

/// Locates the extremum of `|amplitude|` and refines it with a parabola
/// through the three samples around the grid maximum.
///
/// With a reference, the ratio of refined peak values is reported, and a
/// section whose largest magnitude is below 10% of the reference peak has no
/// defined peak.
pub fn find_peak(section: &CrossSection, reference: Option<&CrossSection>) -> Result<PeakReport> {
    let reference_peak = match reference {
        Some(r) => Some(find_peak(r, None)?.peak_value),
        None => None,
    };
    if section.len() < 3 {
        return Err(invalid(format!(
            "peak search needs at least 3 samples, got {}",
            section.len()
        )));
    }
    let (k, sample) = section.extreme_sample().expect("non-empty section");
    if let Some(reference_peak) = reference_peak {
        if sample.abs() < 0.1 * reference_peak.abs() {
            return Err(Error::NoPeak {
                max_amplitude: sample.abs(),
                reference_peak,
            });
        }
    }
    if k == 0 || k + 1 == section.len() {
        return Err(Error::Boundary { index: k });
    }
    let (position, magnitude) = parabolic_vertex(
        [
            section.mean_positions[k - 1],
            section.mean_positions[k],
            section.mean_positions[k + 1],
        ],
        [
            section.amplitudes[k - 1].abs(),
            section.amplitudes[k].abs(),
            section.amplitudes[k + 1].abs(),
        ],
    );
    let peak_value = magnitude.copysign(sample);
    Ok(PeakReport {
        peak_position: position,
        peak_value,
        delay: -position,
        ratio_to_reference: reference_peak.map(|r| peak_value / r),
    })
}

/// Vertex of the parabola through three points with `y[1]` the largest.
/// Falls back to the middle sample when the points are collinear.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d12 - d01) / (x[2] - x[0]);
    if curvature == 0.0 || !curvature.is_finite() {
        return (x[1], y[1]);
    }
    // y = y1 + d·(t - x1) + c·(t - x1)²  with  d = d01 + c·(x1 - x0)
    let slope = d01 + curvature * (x[1] - x[0]);
    let offset = -slope / (2.0 * curvature);
    let value = y[1] + slope * offset + curvature * offset * offset;
    (x[1] + offset, value.max(y[1]))
}

pub fn one_photon_norm(field: &OnePhotonField) -> f64 {
    let density: Vec<f64> = field.amplitudes().iter().map(|v| v * v).collect();
    integrate_on_grid(&density, field.grid().spacing()).expect("valid grid has ≥ 3 points")
}

/// `∬|Ψ|²`. Two-photon outputs have a derivative jump on `x1 = x2` from the
/// saturation term, so each row is integrated on either side of the
/// diagonal.
pub fn two_photon_norm(field: &TwoPhotonField) -> f64 {
    integrate_square_split_diagonal(field.size(), field.grid().spacing(), |i, j| {
        let v = field.get(i, j);
        v * v
    })
    .expect("valid grid has ≥ 3 points")
}

pub enum FieldRef<'a> {
    One(&'a OnePhotonField),
    Two(&'a TwoPhotonField),
}

impl<'a> From<&'a OnePhotonField> for FieldRef<'a> {
    fn from(f: &'a OnePhotonField) -> Self {
        Self::One(f)
    }
}

impl<'a> From<&'a TwoPhotonField> for FieldRef<'a> {
    fn from(f: &'a TwoPhotonField) -> Self {
        Self::Two(f)
    }
}

pub fn field_norm<'a>(field: impl Into<FieldRef<'a>>) -> f64 {
    match field.into() {
        FieldRef::One(f) => one_photon_norm(f),
        FieldRef::Two(f) => two_photon_norm(f),
    }
}

/// Peak ratio of one component against the transmission component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentRatio {
    /// Refined peak ratio, or for sections without a defined peak the
    /// largest-magnitude sample divided by the reference peak.
    pub ratio: f64,
    pub peak: Option<PeakReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRatioProfile {
    pub tau: f64,
    pub transmission: PeakReport,
    pub one_photon_absorption: ComponentRatio,
    pub two_photon_absorption: ComponentRatio,
    pub total: ComponentRatio,
}

/// Refined-peak ratios of `psi2`, `psi3` and `total` against `psi1` along the
/// `tau` slice.
pub fn component_ratio_profile(
    decomp: &TwoPhotonDecomposition,
    tau: f64,
) -> Result<ComponentRatioProfile> {
    let reference = cross_section(&decomp.psi1, tau)?;
    let transmission = find_peak(&reference, None)?;
    let ratio_of = |field: &TwoPhotonField| -> Result<ComponentRatio> {
        let section = cross_section(field, tau)?;
        match find_peak(&section, Some(&reference)) {
            Ok(peak) => Ok(ComponentRatio {
                ratio: peak.ratio_to_reference.expect("reference given"),
                peak: Some(peak),
            }),
            Err(Error::NoPeak { .. }) => {
                let (_, extreme) = section.extreme_sample().unwrap_or((0, 0.0));
                Ok(ComponentRatio {
                    ratio: extreme / transmission.peak_value,
                    peak: None,
                })
            }
            Err(e) => Err(e),
        }
    };
    Ok(ComponentRatioProfile {
        tau,
        transmission,
        one_photon_absorption: ratio_of(&decomp.psi2)?,
        two_photon_absorption: ratio_of(&decomp.psi3)?,
        total: ratio_of(&decomp.total)?,
    })
}

/// Peak of a one-photon field, treated as a section with `tau = 0`.
pub fn one_photon_peak(
    field: &OnePhotonField,
    reference: Option<&OnePhotonField>,
) -> Result<PeakReport> {
    let as_section =
        |f: &OnePhotonField| CrossSection::new(0.0, f.grid().points(), f.amplitudes().to_vec());
    let section = as_section(field)?;
    match reference {
        Some(r) => find_peak(&section, Some(&as_section(r)?)),
        None => find_peak(&section, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{make_gaussian, product_state, SpatialGrid};

    fn section(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> CrossSection {
        let h = (b - a) / (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
        let y = x.iter().map(|&x| f(x)).collect();
        CrossSection::new(0.0, x, y).unwrap()
    }

    #[test]
    fn parabola_is_refined_exactly() {
        let s = section(|x| 2.0 - 3.0 * (x - 0.123).powi(2), -1.0, 1.0, 21);
        let p = find_peak(&s, None).unwrap();
        assert!((p.peak_position - 0.123).abs() < 1e-14);
        assert!((p.peak_value - 2.0).abs() < 1e-14);
        assert!((p.delay + 0.123).abs() < 1e-14);
    }

    #[test]
    fn negative_peak_keeps_sign() {
        let s = section(|x| -(-(x + 0.4).powi(2)).exp(), -3.0, 3.0, 61);
        let p = find_peak(&s, None).unwrap();
        assert!(p.peak_value < 0.0);
        assert!((p.peak_position + 0.4).abs() < 1e-3);
        assert!((p.delay - 0.4).abs() < 1e-3);
    }

    #[test]
    fn centered_gaussian_has_zero_delay() {
        let s = section(|x| (-x * x / 4.0).exp(), -5.0, 5.0, 101);
        let p = find_peak(&s, None).unwrap();
        assert!(p.peak_position.abs() < 1e-12);
    }

    #[test]
    fn boundary_extremum_rejected() {
        let s = section(|x| x, 0.0, 1.0, 11);
        assert!(matches!(
            find_peak(&s, None),
            Err(Error::Boundary { index: 10 })
        ));
    }

    #[test]
    fn tiny_section_has_no_peak_against_reference() {
        let r = section(|x| (-x * x).exp(), -3.0, 3.0, 61);
        let s = section(|x| 0.05 * (-x * x).exp(), -3.0, 3.0, 61);
        assert!(matches!(find_peak(&s, Some(&r)), Err(Error::NoPeak { .. })));
        let s = section(|x| -0.5 * (-x * x).exp(), -3.0, 3.0, 61);
        let ratio = find_peak(&s, Some(&r)).unwrap().ratio_to_reference.unwrap();
        assert!((ratio + 0.5).abs() < 1e-12);
    }

    #[test]
    fn input_diagonal_peak() {
        let p = make_gaussian(10.0).unwrap();
        let grid = SpatialGrid::default_for(10.0).unwrap();
        let field = product_state(&p, grid);
        let s = cross_section(&field, 0.0).unwrap();
        assert_eq!(s.amplitudes, field.diagonal());
        let peak = find_peak(&s, None).unwrap();
        assert!((peak.peak_value - 0.079788456080286535588).abs() < 1e-12);
        assert!(peak.peak_position.abs() < 1e-9);
    }

    #[test]
    fn off_grid_separation_interpolates() {
        let p = make_gaussian(10.0).unwrap();
        let grid = SpatialGrid::new(-30.0, 30.0, 601).unwrap();
        let field = product_state(&p, grid);
        let s = cross_section(&field, 1.45).unwrap();
        for (m, v) in s.mean_positions.iter().zip(&s.amplitudes).step_by(37) {
            let exact = p.evaluate(m - 0.725) * p.evaluate(m + 0.725);
            assert!((v - exact).abs() < 1e-5, "{m}: {v} vs {exact}");
        }
    }

    #[test]
    fn separation_outside_domain() {
        let grid = SpatialGrid::new(-1.0, 1.0, 11).unwrap();
        let field = product_state(&make_gaussian(1.0).unwrap(), grid);
        assert!(matches!(
            cross_section(&field, 2.5),
            Err(Error::Domain { .. })
        ));
        assert!(cross_section(&field, -0.1).is_err());
        assert_eq!(cross_section(&field, 2.0).unwrap().len(), 1);
    }

    #[test]
    fn input_norms() {
        let p = make_gaussian(1.0).unwrap();
        let grid = SpatialGrid::with_max_spacing(-8.0, 8.0, 0.025).unwrap();
        let one = OnePhotonField::sample(&p, grid);
        assert!((field_norm(&one) - 1.0).abs() < 1e-8);
        let two = product_state(&p, grid);
        assert!((field_norm(&two) - 1.0).abs() < 1e-6);
    }
}
