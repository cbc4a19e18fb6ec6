use std::f64::consts::PI;

/// Below this argument `exp(z²)·erfc(z)` is evaluated directly; above it the
/// continued fraction converges in a few dozen terms.
const CONTINUED_FRACTION_THRESHOLD: f64 = 4.0;
const MAX_CF_TERMS: usize = 5000;

/// Scaled complementary error function `erfcx(z) = exp(z²)·erfc(z)`.
///
/// Finite for every positive argument (it decays like `1/(z√π)`). For
/// negative arguments it grows like `2·exp(z²)` and overflows to `+inf`
/// once `z² > ~709`.
pub fn scaled_erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 * (z * z).exp() - scaled_erfc(-z);
    }
    if z < CONTINUED_FRACTION_THRESHOLD {
        return (z * z).exp() * libm::erfc(z);
    }
    if z.is_infinite() {
        return 0.0;
    }
    1.0 / (PI.sqrt() * laplace_continued_fraction(z))
}

/// `erfc(z)` expressed through `scaled_erfc`, valid for all finite `z`
/// without forming `exp(z²)` for positive arguments.
pub(crate) fn erfc_via_scaled(z: f64) -> f64 {
    if z >= 0.0 {
        (-z * z).exp() * scaled_erfc(z)
    } else {
        2.0 - (-z * z).exp() * scaled_erfc(-z)
    }
}

/// Evaluates `z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))` by the modified
/// Lentz method. The reciprocal of the result times `1/√π` is `erfcx(z)`.
fn laplace_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..=MAX_CF_TERMS {
        let a = k as f64 * 0.5;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}
