//! Deterministic integration rules shared by every kernel evaluation.
//!
//! Uniform-grid data is integrated with composite Simpson weights. Smooth
//! semi-infinite integrals with an exponential weight are evaluated with an
//! adaptive 15-point Gauss-Kronrod rule on a truncated interval. All sums run
//! in a fixed order so repeated calls are bit-identical.

mod gauss_kronrod;
mod special;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

pub(crate) use special::erfc_via_scaled;
pub use special::scaled_erfc;

/// Tolerances and budgets for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Semi-infinite integrals are cut where the exponential weight has
    /// decayed to `exp(-tail_cutoff_exponent)`.
    pub tail_cutoff_exponent: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-12,
            tail_cutoff_exponent: 32.0,
            max_subdivisions: 1000,
        }
    }
}

impl QuadratureSettings {
    pub fn new(
        relative_tolerance: f64,
        absolute_tolerance: f64,
        tail_cutoff_exponent: f64,
        max_subdivisions: usize,
    ) -> Result<Self> {
        let settings = Self {
            relative_tolerance,
            absolute_tolerance,
            tail_cutoff_exponent,
            max_subdivisions,
        };
        settings.validate()?;
        Ok(settings)
    }

    /// Default settings with a different relative tolerance.
    pub fn with_relative_tolerance(relative_tolerance: f64) -> Result<Self> {
        let settings = Self {
            relative_tolerance,
            ..Self::default()
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return Err(invalid(format!(
                "relative_tolerance must be positive, got {}",
                self.relative_tolerance
            )));
        }
        if !(self.absolute_tolerance > 0.0 && self.absolute_tolerance.is_finite()) {
            return Err(invalid(format!(
                "absolute_tolerance must be positive, got {}",
                self.absolute_tolerance
            )));
        }
        if !(self.tail_cutoff_exponent >= 20.0 && self.tail_cutoff_exponent.is_finite()) {
            return Err(invalid(format!(
                "tail_cutoff_exponent must be at least 20, got {}",
                self.tail_cutoff_exponent
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(invalid("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    fn tolerance_for(&self, estimate: f64) -> f64 {
        self.absolute_tolerance
            .max(self.relative_tolerance * estimate.abs())
    }
}

/// Sums in a fixed binary-tree order. Bit-identical for identical input and
/// with error growth `O(log n)` instead of `O(n)`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Composite Simpson integral of uniformly spaced samples.
///
/// An odd sample count uses plain composite Simpson. An even count closes the
/// last three intervals with Simpson's 3/8 rule so the rule stays fourth
/// order and exact for cubics.
pub fn integrate_on_grid(values: &[f64], spacing: f64) -> Result<f64> {
    if values.len() < 3 {
        return Err(invalid(format!(
            "integrate_on_grid needs at least 3 samples, got {}",
            values.len()
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(invalid(format!("spacing must be positive, got {spacing}")));
    }
    Ok(weighted_segment_sum(values, spacing))
}

/// Integral of one uniformly spaced segment. Segments shorter than three
/// samples fall back to the trapezoid (two samples) or zero (one sample),
/// which only happens at the corners of a diagonal-split square.
fn weighted_segment_sum(values: &[f64], spacing: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => return 0.0,
        2 => return 0.5 * spacing * (values[0] + values[1]),
        _ => {}
    }
    let mut terms = Vec::with_capacity(n);
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    for (i, v) in values.iter().enumerate().take(simpson_end + 1) {
        let w = if i == 0 || i == simpson_end {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        terms.push(w * v * spacing / 3.0);
    }
    if n.is_multiple_of(2) {
        // 3/8 rule over the closing three intervals; its first node is
        // shared with the Simpson block.
        let k = simpson_end;
        let c = 3.0 * spacing / 8.0;
        if k > 0 {
            terms.push(c * values[k]);
        } else {
            terms[0] = c * values[0];
        }
        terms.push(3.0 * c * values[k + 1]);
        terms.push(3.0 * c * values[k + 2]);
        terms.push(c * values[k + 3]);
    }
    pairwise_sum(&terms)
}

/// Double integral over the square `[x0, x_{n-1}]²` of a function whose only
/// non-smoothness is a derivative jump along the diagonal `x1 = x2`.
///
/// Each row is integrated separately over `j ≤ i` and `j ≥ i` so neither
/// piece straddles the crease. The row integrals form a smooth function of
/// `x1` and are then combined with ordinary composite Simpson. `value(i, j)`
/// is evaluated once per grid node, rows in parallel.
pub fn integrate_square_split_diagonal<F>(n: usize, spacing: f64, value: F) -> Result<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let [total] = integrate_square_split_diagonal_many(n, spacing, |i, j| [value(i, j)])?;
    Ok(total)
}

/// [`integrate_square_split_diagonal`] for `K` integrands sharing one pass
/// over the nodes.
pub fn integrate_square_split_diagonal_many<const K: usize, F>(
    n: usize,
    spacing: f64,
    value: F,
) -> Result<[f64; K]>
where
    F: Fn(usize, usize) -> [f64; K] + Sync,
{
    if n < 3 {
        return Err(invalid(format!(
            "square grid needs at least 3 points, got {n}"
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(invalid(format!("spacing must be positive, got {spacing}")));
    }
    let rows: Vec<[f64; K]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nodes: Vec<[f64; K]> = (0..n).map(|j| value(i, j)).collect();
            let mut out = [0.0; K];
            let mut row = vec![0.0; n];
            for (k, slot) in out.iter_mut().enumerate() {
                for (r, node) in row.iter_mut().zip(&nodes) {
                    *r = node[k];
                }
                *slot = weighted_segment_sum(&row[..=i], spacing)
                    + weighted_segment_sum(&row[i..], spacing);
            }
            out
        })
        .collect();
    let mut totals = [0.0; K];
    let mut column = vec![0.0; n];
    for (k, slot) in totals.iter_mut().enumerate() {
        for (c, row) in column.iter_mut().zip(&rows) {
            *c = row[k];
        }
        *slot = integrate_on_grid(&column, spacing)?;
    }
    Ok(totals)
}

/// Adaptive Gauss-Kronrod integral of `f` over the finite interval `[a, b]`,
/// starting from `initial_pieces` equal sub-intervals.
pub fn integrate_interval<F>(
    f: F,
    a: f64,
    b: f64,
    initial_pieces: usize,
    settings: &QuadratureSettings,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f = f;
    try_integrate_interval(|x| Ok(f(x)), a, b, initial_pieces, settings)
}

/// Fallible form of [`integrate_interval`]; the first integrand error aborts
/// the integration. Used for nested integrals.
pub fn try_integrate_interval<F>(
    f: F,
    a: f64,
    b: f64,
    initial_pieces: usize,
    settings: &QuadratureSettings,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    settings.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    gauss_kronrod::adaptive(f, a, b, initial_pieces.max(1), settings)
}

/// `∫_lower^∞ exp(-rate·(s - lower))·f(s) ds` for bounded `f`.
///
/// The interval is truncated at `lower + tail_cutoff_exponent / rate`, where
/// the weight has fallen below `exp(-tail_cutoff_exponent)`; the discarded
/// tail is bounded by `sup|f|·exp(-tail_cutoff_exponent)/rate`. The kept
/// interval starts as one piece per e-fold of the weight.
pub fn exp_weighted_tail_integral<F>(
    f: F,
    lower: f64,
    rate: f64,
    settings: &QuadratureSettings,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_exp_weighted_tail_integral(|s| Ok(f(s)), lower, rate, settings)
}

/// Fallible form of [`exp_weighted_tail_integral`].
pub fn try_exp_weighted_tail_integral<F>(
    mut f: F,
    lower: f64,
    rate: f64,
    settings: &QuadratureSettings,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(invalid(format!("decay rate must be positive, got {rate}")));
    }
    if !lower.is_finite() {
        return Err(invalid(format!("lower limit must be finite, got {lower}")));
    }
    settings.validate()?;
    let length = settings.tail_cutoff_exponent / rate;
    let pieces = settings.tail_cutoff_exponent.ceil() as usize;
    try_integrate_interval(
        |s| Ok((-rate * (s - lower)).exp() * f(s)?),
        lower,
        lower + length,
        pieces,
        settings,
    )
}

pub(crate) fn convergence_error(estimate: f64, error_bound: f64, subdivisions: usize) -> Error {
    Error::Convergence {
        estimate,
        error_bound,
        subdivisions,
    }
}
