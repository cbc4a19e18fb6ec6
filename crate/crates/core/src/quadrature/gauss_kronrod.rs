use super::{convergence_error, pairwise_sum, QuadratureSettings};
use crate::error::Result;

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss
// weights (QUADPACK qk15). Index 7 is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    estimate: f64,
    error: f64,
}

fn rule<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut abs_sum = kronrod.abs();
    let mut values = [(0.0, 0.0); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
        *slot = (lo, hi);
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for (j, (lo, hi)) in values.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let estimate = kronrod * half;
    let abs_int = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_int > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_int);
    }
    Ok(Segment {
        a,
        b,
        estimate,
        error,
    })
}

/// Globally adaptive bisection: the segment with the largest error estimate
/// is split until the summed error meets the tolerance.
pub(super) fn adaptive<F>(
    mut f: F,
    a: f64,
    b: f64,
    initial_pieces: usize,
    settings: &QuadratureSettings,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a) / initial_pieces as f64;
    let mut segments = Vec::with_capacity(initial_pieces + 16);
    for k in 0..initial_pieces {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == initial_pieces {
            b
        } else {
            lo + width
        };
        segments.push(rule(&mut f, lo, hi)?);
    }

    let mut subdivisions = 0;
    loop {
        let estimates: Vec<f64> = segments.iter().map(|s| s.estimate).collect();
        let errors: Vec<f64> = segments.iter().map(|s| s.error).collect();
        let total = pairwise_sum(&estimates);
        let error = pairwise_sum(&errors);
        if error <= settings.tolerance_for(total) {
            return Ok(total);
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(convergence_error(total, error, subdivisions));
        }

        // First maximum wins ties, keeping the refinement order fixed.
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                    if s.error > be {
                        (i, s.error)
                    } else {
                        (bi, be)
                    }
                });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(convergence_error(total, error, subdivisions));
        }
        let left = rule(&mut f, seg.a, mid)?;
        let right = rule(&mut f, mid, seg.b)?;
        segments[worst] = left;
        segments.insert(worst + 1, right);
        subdivisions += 1;
    }
}
