//! Numerical quadrature and root bracketing for the collision integrals.
//!
//! Two independent adaptive integrators are provided on purpose: the
//! Gauss-Kronrod 15-point rule is the workhorse, and adaptive Simpson acts
//! as a structurally different cross-check so an error in either shows up as
//! a disagreement rather than a shared bias.

use crate::error::{Error, Result};

/// Default absolute tolerance for the collision integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Hard cap on function evaluations per integral.
pub const MAX_EVALS: usize = 1_000_000;

/// Kronrod nodes on [0, 1] (symmetric; node 7 is the midpoint).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 7-point Gauss weights embedded in the rule.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
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

/// One GK15 panel: returns (integral, error estimate).
fn gk15_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut result_gauss = WG[3] * f_center;
    let mut result_kronrod = WGK[7] * f_center;

    let mut fv = [0.0f64; 15];
    fv[7] = f_center;
    for k in 0..7 {
        let dx = half * XGK[k];
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        fv[k] = f_lo;
        fv[14 - k] = f_hi;
        result_kronrod += WGK[k] * (f_lo + f_hi);
        if k % 2 == 1 {
            // odd Kronrod indices carry the embedded Gauss nodes
            result_gauss += WG[k / 2] * (f_lo + f_hi);
        }
    }

    let integral = result_kronrod * half;
    let err = ((result_kronrod - result_gauss) * half).abs();
    (integral, err)
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b] to absolute
/// tolerance `tol`, by recursive panel bisection on the local GK15 error
/// estimate.
pub fn integrate_gk(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut evals = 0usize;
    let mut stack = vec![(a, b, tol)];
    let mut total = 0.0;
    while let Some((lo, hi, budget)) = stack.pop() {
        evals += 15;
        if evals > MAX_EVALS {
            return Err(Error::QuadratureNonConvergence { err: budget, evals });
        }
        let (integral, err) = gk15_panel(&f, lo, hi);
        if err <= budget || (hi - lo) < 1e-14 * (b - a).abs() {
            total += integral;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, budget * 0.5));
            stack.push((mid, hi, budget * 0.5));
        }
    }
    Ok(total)
}

/// Adaptive Simpson integration, the independent cross-check. Classic
/// Richardson-style recursion on the three-point rule.
pub fn integrate_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    struct Frame {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    let mut evals = 3usize;
    let mut total = 0.0;
    let mut stack = vec![Frame {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol,
    }];

    while let Some(fr) = stack.pop() {
        evals += 2;
        if evals > MAX_EVALS {
            return Err(Error::QuadratureNonConvergence { err: fr.tol, evals });
        }
        let m = 0.5 * (fr.a + fr.b);
        let lm = 0.5 * (fr.a + m);
        let rm = 0.5 * (m + fr.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fr.fa, flm, fr.fm, fr.a, m);
        let right = simpson(fr.fm, frm, fr.fb, m, fr.b);
        let delta = left + right - fr.whole;
        if delta.abs() <= 15.0 * fr.tol || (fr.b - fr.a).abs() < 1e-14 * (b - a).abs() {
            total += left + right + delta / 15.0;
        } else {
            stack.push(Frame {
                a: fr.a,
                b: m,
                fa: fr.fa,
                fm: flm,
                fb: fr.fm,
                whole: left,
                tol: fr.tol * 0.5,
            });
            stack.push(Frame {
                a: m,
                b: fr.b,
                fa: fr.fm,
                fm: frm,
                fb: fr.fb,
                whole: right,
                tol: fr.tol * 0.5,
            });
        }
    }
    Ok(total)
}

/// Bisection root finding on a bracketing interval. `f(lo)` and `f(hi)` must
/// differ in sign; converges unconditionally to `xtol`.
pub fn bisect_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    while (hi - lo).abs() > xtol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break; // hit f64 resolution
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact_on_single_panel() {
        // GK15 integrates degree <= 22 exactly; Simpson handles cubics.
        let got = integrate_gk(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        let want = |x: f64| 0.25 * x.powi(4) - x * x + x;
        assert!((got - (want(3.0) - want(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn integrators_agree_on_smooth_peak() {
        // A narrow Gaussian forces real subdivision work.
        let f = |x: f64| (-50.0 * (x - 0.3).powi(2)).exp();
        let gk = integrate_gk(f, -2.0, 2.0, 1e-12).unwrap();
        let simpson = integrate_simpson(f, -2.0, 2.0, 1e-12).unwrap();
        assert!((gk - simpson).abs() < 1e-9);
        // erf closed form: sqrt(pi/50) since the tails are negligible
        let want = (PI / 50.0).sqrt();
        assert!((gk - want).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_integral() {
        let gk = integrate_gk(|x| (10.0 * x).sin(), 0.0, PI, 1e-12).unwrap();
        let want = (1.0 - (10.0 * PI).cos()) / 10.0;
        assert!((gk - want).abs() < 1e-11);
    }

    #[test]
    fn bisection_finds_root() {
        let root = bisect_root(|x| x.cos() - x, 0.0, 1.0, 1e-13).unwrap();
        assert!((root.cos() - root).abs() < 1e-12);
        assert!(matches!(
            bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoBracket { .. })
        ));
    }
}
