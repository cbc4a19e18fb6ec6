//! Input pulses, spatial grids and sampled one- and two-photon fields.
//!
//! Everything is in natural units: the dipole relaxation rate and the speed
//! of light are 1, so lengths are in `c/Γ`, times in `1/Γ`, one-photon
//! amplitudes in `√(Γ/c)` and two-photon amplitudes in `Γ/c`. Coordinates
//! are co-moving with the pulse, so a delayed photon sits at more negative
//! `x`.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Result};

/// A real one-photon input amplitude that can be evaluated anywhere.
pub trait InputPulse: Sync {
    fn amplitude(&self, x: f64) -> f64;
}

/// `Ψ_A(x) = exp(-(x - center)²/T²) / √N` with `N = √(π/2)·T`.
///
/// `T` is twice the standard deviation of the photon arrival-time
/// distribution `|Ψ_A|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pulse_length: f64,
    center: f64,
    amplitude_scale: f64,
}

impl GaussianPulse {
    pub fn new(pulse_length: f64) -> Result<Self> {
        if !(pulse_length > 0.0 && pulse_length.is_finite()) {
            return Err(invalid(format!(
                "pulse length must be positive, got {pulse_length}"
            )));
        }
        Ok(Self {
            pulse_length,
            center: 0.0,
            amplitude_scale: 1.0,
        })
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    /// Multiplies the amplitude by `scale`. The result is no longer a
    /// normalized photon state unless `|scale| = 1`; useful for linearity
    /// checks.
    pub fn with_amplitude_scale(mut self, scale: f64) -> Self {
        self.amplitude_scale = scale;
        self
    }

    pub fn pulse_length(&self) -> f64 {
        self.pulse_length
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.amplitude_scale
    }

    /// `N = √((π/2)·T²)`, always recomputed from `T`.
    pub fn normalization(&self) -> f64 {
        (PI / 2.0 * self.pulse_length * self.pulse_length).sqrt()
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.amplitude_scale / self.normalization().sqrt()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.pulse_length;
        self.peak_amplitude() * (-u * u).exp()
    }
}

impl InputPulse for GaussianPulse {
    fn amplitude(&self, x: f64) -> f64 {
        self.evaluate(x)
    }
}

pub fn make_gaussian(pulse_length: f64) -> Result<GaussianPulse> {
    GaussianPulse::new(pulse_length)
}

pub fn evaluate_pulse(pulse: &GaussianPulse, x: f64) -> f64 {
    pulse.evaluate(x)
}

/// Uniform grid `x_min, x_min + h, …, x_max` with an odd number of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    point_count: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, point_count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(invalid(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if point_count < 3 || point_count.is_multiple_of(2) {
            return Err(invalid(format!(
                "grid point count must be odd and at least 3, got {point_count}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            point_count,
        })
    }

    /// Grid on `[x_min, x_max]` with spacing no larger than `max_spacing`.
    pub fn with_max_spacing(x_min: f64, x_max: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0 && max_spacing.is_finite()) {
            return Err(invalid(format!(
                "spacing must be positive, got {max_spacing}"
            )));
        }
        let intervals = ((x_max - x_min) / max_spacing - 1e-9).ceil().max(2.0) as usize;
        let intervals = intervals + intervals % 2;
        Self::new(x_min, x_max, intervals + 1)
    }

    /// `[-(3T + 20), 3T]` with spacing `min(T/40, 0.05)`. Covers the
    /// exponential re-emission tail on the delayed side down to `e^-20`.
    pub fn default_for(pulse_length: f64) -> Result<Self> {
        if !(pulse_length > 0.0 && pulse_length.is_finite()) {
            return Err(invalid(format!(
                "pulse length must be positive, got {pulse_length}"
            )));
        }
        let spacing = (pulse_length / 40.0).min(0.05);
        Self::with_max_spacing(-(3.0 * pulse_length + 20.0), 3.0 * pulse_length, spacing)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.point_count - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.point_count {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.point_count).map(|i| self.x(i)).collect()
    }
}

/// Samples of a one-photon wavefunction on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePhotonField {
    grid: SpatialGrid,
    amplitudes: Vec<f64>,
}

impl OnePhotonField {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != grid.point_count() {
            return Err(invalid(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.point_count()
            )));
        }
        if let Some(i) = amplitudes.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite amplitude at index {i}")));
        }
        Ok(Self { grid, amplitudes })
    }

    pub(crate) fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        let amplitudes = grid.points().into_iter().map(f).collect();
        Self { grid, amplitudes }
    }

    pub fn sample(pulse: &impl InputPulse, grid: SpatialGrid) -> Self {
        Self::from_fn(grid, |x| pulse.amplitude(x))
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }
}

/// Samples `Ψ(x1, x2)` on `grid × grid`, stored row-major with `x1` as the
/// row index.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonField {
    grid: SpatialGrid,
    amplitudes: Vec<f64>,
}

impl TwoPhotonField {
    /// Wraps precomputed amplitudes. Symmetry is not enforced here; see
    /// [`TwoPhotonField::symmetry_residual`].
    pub fn new(grid: SpatialGrid, amplitudes: Vec<f64>) -> Result<Self> {
        let n = grid.point_count();
        if amplitudes.len() != n * n {
            return Err(invalid(format!(
                "{} amplitudes for a {n}×{n} grid",
                amplitudes.len()
            )));
        }
        if let Some(k) = amplitudes.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite amplitude at ({}, {})",
                k / n,
                k % n
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    /// Evaluates `f(i, j)` for `i ≤ j` and mirrors, so the field is exactly
    /// symmetric.
    pub(crate) fn from_symmetric_fn<F>(grid: SpatialGrid, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let n = grid.point_count();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|j| f(i, j)).collect())
            .collect();
        let mut amplitudes = vec![0.0; n * n];
        for (i, row) in upper.iter().enumerate() {
            for (offset, &v) in row.iter().enumerate() {
                let j = i + offset;
                amplitudes[i * n + j] = v;
                amplitudes[j * n + i] = v;
            }
        }
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn size(&self) -> usize {
        self.grid.point_count()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.amplitudes[i * self.size() + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size()).map(|i| self.get(i, i)).collect()
    }

    /// `max |Ψ(i,j) - Ψ(j,i)|`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.size();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_difference(&self, other: &TwoPhotonField) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|v| k * v).collect(),
        }
    }
}

/// `Ψ_in(x1, x2) = Ψ_A(x1)·Ψ_A(x2)`.
pub fn product_state(pulse: &GaussianPulse, grid: SpatialGrid) -> TwoPhotonField {
    let samples: Vec<f64> = grid.points().iter().map(|&x| pulse.evaluate(x)).collect();
    TwoPhotonField::from_symmetric_fn(grid, |i, j| samples[i] * samples[j])
}

/// Arbitrary real pulse given by samples, linearly interpolated between grid
/// points and zero outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPulse {
    field: OnePhotonField,
}

impl SampledPulse {
    pub fn new(field: OnePhotonField) -> Self {
        Self { field }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let amplitudes = grid.points().into_iter().map(f).collect();
        Ok(Self::new(OnePhotonField::new(grid, amplitudes)?))
    }

    /// Symmetric triangle of half-width `half_width` centered at `center`,
    /// normalized on `grid`.
    pub fn triangle(grid: SpatialGrid, center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(invalid("triangle half-width must be positive"));
        }
        // Linear interpolation of |Ψ|² between the samples has norm
        // h/3·Σ(a_k² + a_k a_{k+1} + a_{k+1}²).
        let raw: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| (1.0 - (x - center).abs() / half_width).max(0.0))
            .collect();
        let h = grid.spacing();
        let norm: f64 = raw
            .windows(2)
            .map(|w| h / 3.0 * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]))
            .sum();
        if norm <= 0.0 {
            return Err(invalid("triangle does not overlap the grid"));
        }
        let scale = norm.sqrt().recip();
        Ok(Self::new(OnePhotonField::new(
            grid,
            raw.into_iter().map(|v| v * scale).collect(),
        )?))
    }

    pub fn field(&self) -> &OnePhotonField {
        &self.field
    }
}

impl InputPulse for SampledPulse {
    fn amplitude(&self, x: f64) -> f64 {
        let grid = self.field.grid();
        if !(x >= grid.x_min() && x <= grid.x_max()) {
            return 0.0;
        }
        let pos = (x - grid.x_min()) / grid.spacing();
        let k = (pos.floor() as usize).min(grid.point_count() - 2);
        let t = pos - k as f64;
        let a = self.field.amplitudes();
        a[k] * (1.0 - t) + a[k + 1] * t
    }
}

/// Laboratory parameters of an atom in a one-sided cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Cavity damping rate through the coupling mirror.
    pub kappa: f64,
    /// Atom-cavity dipole coupling.
    pub g: f64,
    /// Spontaneous emission rate into non-cavity modes.
    pub gamma_noncavity: f64,
    /// Required ratio for `κ ≫ g` and `g ≫ γ`.
    pub ratio_threshold: f64,
}

impl CavityParams {
    pub fn new(kappa: f64, g: f64, gamma_noncavity: f64) -> Self {
        Self {
            kappa,
            g,
            gamma_noncavity,
            ratio_threshold: 10.0,
        }
    }

    pub fn with_ratio_threshold(mut self, ratio_threshold: f64) -> Self {
        self.ratio_threshold = ratio_threshold;
        self
    }

    /// Bad-cavity conditions that fail at the configured threshold.
    pub fn regime_warnings(&self) -> Vec<RegimeWarning> {
        let mut warnings = Vec::new();
        if self.kappa < self.ratio_threshold * self.g {
            warnings.push(RegimeWarning::CavityTooSlow {
                kappa: self.kappa,
                g: self.g,
                threshold: self.ratio_threshold,
            });
        }
        if self.g < self.ratio_threshold * self.gamma_noncavity {
            warnings.push(RegimeWarning::NonCavityLossTooLarge {
                g: self.g,
                gamma_noncavity: self.gamma_noncavity,
                threshold: self.ratio_threshold,
            });
        }
        warnings
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    CavityTooSlow {
        kappa: f64,
        g: f64,
        threshold: f64,
    },
    NonCavityLossTooLarge {
        g: f64,
        gamma_noncavity: f64,
        threshold: f64,
    },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CavityTooSlow { kappa, g, threshold } => write!(
                f,
                "kappa = {kappa} is less than {threshold} × g = {g}; adiabatic elimination is questionable"
            ),
            Self::NonCavityLossTooLarge {
                g,
                gamma_noncavity,
                threshold,
            } => write!(
                f,
                "g = {g} is less than {threshold} × gamma = {gamma_noncavity}; non-cavity emission is not negligible"
            ),
        }
    }
}

/// Effective dipole relaxation rate together with any regime warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGamma {
    pub gamma: f64,
    pub warnings: Vec<RegimeWarning>,
}

/// `Γ = g²/κ`. Divide laboratory times by `1/Γ` to get natural units.
pub fn effective_gamma(params: &CavityParams) -> Result<EffectiveGamma> {
    if !(params.kappa > 0.0 && params.kappa.is_finite()) {
        return Err(invalid(format!(
            "kappa must be positive, got {}",
            params.kappa
        )));
    }
    if !(params.g > 0.0 && params.g.is_finite()) {
        return Err(invalid(format!("g must be positive, got {}", params.g)));
    }
    Ok(EffectiveGamma {
        gamma: params.g * params.g / params.kappa,
        warnings: params.regime_warnings(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_on_grid;

    #[test]
    fn long_pulse_peak_and_normalization() {
        let p = make_gaussian(10.0).unwrap();
        assert!((p.normalization() - 12.533141373155002512).abs() < 1e-13);
        assert!((p.peak_amplitude() - 0.2824685045811064147).abs() < 1e-15);
        assert!((evaluate_pulse(&p, 0.0) - 0.2824685045811064147).abs() < 1e-15);
        assert!((evaluate_pulse(&p, 1.0) - 0.2796578959999005206).abs() < 1e-15);
    }

    #[test]
    fn short_pulse_normalization() {
        let p = make_gaussian(1.0).unwrap();
        assert!((p.normalization() - 1.2533141373155002512).abs() < 1e-15);
    }

    #[test]
    fn pulse_is_even_and_decays() {
        let p = make_gaussian(3.7).unwrap();
        for x in [0.1, 1.0, 2.5, 9.0] {
            assert_eq!(p.evaluate(x), p.evaluate(-x));
        }
        assert_eq!(p.evaluate(1e3), 0.0);
        assert_eq!(p.evaluate(-1e3), 0.0);
    }

    #[test]
    fn non_positive_length_rejected() {
        assert!(make_gaussian(0.0).is_err());
        assert!(make_gaussian(-1.0).is_err());
        assert!(make_gaussian(f64::NAN).is_err());
    }

    #[test]
    fn unit_norm_on_eight_widths() {
        for t in [0.5, 1.0, 10.0] {
            let p = make_gaussian(t).unwrap();
            let grid = SpatialGrid::with_max_spacing(-8.0 * t, 8.0 * t, t / 40.0).unwrap();
            let density: Vec<f64> = grid
                .points()
                .iter()
                .map(|&x| p.evaluate(x).powi(2))
                .collect();
            let norm = integrate_on_grid(&density, grid.spacing()).unwrap();
            assert!((norm - 1.0).abs() < 1e-10, "T = {t}: {norm}");
        }
    }

    #[test]
    fn product_state_values() {
        let p = make_gaussian(10.0).unwrap();
        let grid = SpatialGrid::new(-2.5, 2.5, 3).unwrap();
        let field = product_state(&p, grid);
        assert!((field.get(1, 1) - 0.079788456080286535588).abs() < 1e-15);
        assert!((field.get(0, 2) - 0.070413065352859895555).abs() < 1e-15);
        assert_eq!(field.symmetry_residual(), 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::new(0.0, 1.0, 4).is_err());
        assert!(SpatialGrid::new(0.0, 1.0, 1).is_err());
        assert!(SpatialGrid::new(1.0, 1.0, 5).is_err());
        let g = SpatialGrid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.x(4), 1.0);
    }

    #[test]
    fn default_grid_layout() {
        let g = SpatialGrid::default_for(10.0).unwrap();
        assert_eq!(g.x_min(), -50.0);
        assert_eq!(g.x_max(), 30.0);
        assert_eq!(g.point_count(), 1601);
        let g = SpatialGrid::default_for(1.0).unwrap();
        assert_eq!(g.point_count(), 1041);
        assert!((g.spacing() - 0.025).abs() < 1e-15);
        let g = SpatialGrid::default_for(0.3).unwrap();
        assert!(g.spacing() <= 0.3 / 40.0 + 1e-15);
        assert_eq!(g.point_count() % 2, 1);
    }

    #[test]
    fn field_rejects_bad_samples() {
        let g = SpatialGrid::new(0.0, 1.0, 3).unwrap();
        assert!(OnePhotonField::new(g, vec![0.0, 1.0]).is_err());
        assert!(OnePhotonField::new(g, vec![0.0, f64::INFINITY, 1.0]).is_err());
        assert!(TwoPhotonField::new(g, vec![0.0; 8]).is_err());
        assert!(TwoPhotonField::new(g, vec![f64::NAN; 9]).is_err());
    }

    #[test]
    fn sampled_pulse_interpolates() {
        let g = SpatialGrid::new(-1.0, 1.0, 5).unwrap();
        let p = SampledPulse::from_fn(g, |x| 2.0 * x + 1.0).unwrap();
        assert!((p.amplitude(0.25) - 1.5).abs() < 1e-15);
        assert!((p.amplitude(1.0) - 3.0).abs() < 1e-15);
        assert_eq!(p.amplitude(1.5), 0.0);
        assert_eq!(p.amplitude(-1.01), 0.0);
    }

    #[test]
    fn triangle_is_normalized() {
        let g = SpatialGrid::new(-3.0, 3.0, 61).unwrap();
        let p = SampledPulse::triangle(g, 0.0, 1.5).unwrap();
        // Triangles are piecewise linear, so the interpolated norm is exact.
        let fine = SpatialGrid::new(-3.0, 3.0, 6001).unwrap();
        let d: Vec<f64> = fine
            .points()
            .iter()
            .map(|&x| p.amplitude(x).powi(2))
            .collect();
        assert!((integrate_on_grid(&d, fine.spacing()).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cavity_conversion() {
        let e = effective_gamma(&CavityParams::new(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(e.gamma, 1.0);
        // κ = 10 < 10·g, so the bad-cavity warning fires but Γ is still returned.
        let e = effective_gamma(&CavityParams::new(10.0, 2.0, 0.0)).unwrap();
        assert!((e.gamma - 0.4).abs() < 1e-15);
        assert_eq!(e.warnings.len(), 1);
        let e = effective_gamma(&CavityParams::new(100.0, 3.0, 0.01)).unwrap();
        assert!((e.gamma - 0.09).abs() < 1e-15);
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn cavity_regime_warnings() {
        let e = effective_gamma(&CavityParams::new(20.0, 3.0, 0.7)).unwrap();
        assert_eq!(e.warnings.len(), 2);
        let relaxed = CavityParams::new(20.0, 3.0, 0.7).with_ratio_threshold(5.0);
        assert_eq!(relaxed.regime_warnings().len(), 1);
        assert!(effective_gamma(&CavityParams::new(0.0, 1.0, 0.0)).is_err());
        assert!(effective_gamma(&CavityParams::new(1.0, -1.0, 0.0)).is_err());
    }
}
