//! Pearson correlation with a two-tailed Student-t p-value, and
//! before/after gap reductions.

use crate::error::{Error, Result};

/// Relative convergence tolerance of the incomplete-beta continued fraction.
pub const BETA_CF_TOLERANCE: f64 = 1e-14;
/// Iteration cap of the incomplete-beta continued fraction.
pub const BETA_CF_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    /// Two-tailed.
    pub p_value: f64,
    pub n: usize,
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewSamples { n });
    }
    if is_constant(xs) {
        return Err(Error::ZeroVariance { series: "xs" });
    }
    if is_constant(ys) {
        return Err(Error::ZeroVariance { series: "ys" });
    }

    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p_value = correlation_p_value(rho, n)?;
    Ok(CorrelationResult { rho, p_value, n })
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Two-tailed p-value of a sample correlation `r` over `n` points.
///
/// With `t = r·sqrt((n−2)/(1−r²))` and `ν = n − 2`, the two-tailed Student-t
/// tail equals `I_{ν/(ν+t²)}(ν/2, 1/2)`, and `ν/(ν+t²) = 1 − r²`.
pub fn correlation_p_value(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewSamples { n });
    }
    let r2 = r * r;
    if r2 >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    Ok(beta_reg_split(df / 2.0, 0.5, 1.0 - r2, r2)?.clamp(0.0, 1.0))
}

/// Two-tailed p-value of Student's t with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> Result<f64> {
    let t2 = t * t;
    if t2.is_infinite() {
        return Ok(0.0);
    }
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    Ok(beta_reg_split(df / 2.0, 0.5, x, y)?.clamp(0.0, 1.0))
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> Result<f64> {
    beta_reg_split(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 − x` supplied separately so callers that know
/// it exactly do not lose digits to cancellation.
fn beta_reg_split(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if y <= 0.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front.exp() * beta_cf(a, b, x)? / a)
    } else {
        Ok(1.0 - ln_front.exp() * beta_cf(b, a, y)? / b)
    }
}

/// Continued fraction for the incomplete beta, modified Lentz method.
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < BETA_CF_TOLERANCE {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        iterations: BETA_CF_MAX_ITER,
    })
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `ln Γ(x)` for `x > 0`, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub gap_before: f64,
    pub gap_after: f64,
    /// `100 · (before − after) / before`; negative when the gap grew.
    pub reduction_percent: f64,
}

pub fn gap_reduction(gap_before: f64, gap_after: f64) -> Result<GapReport> {
    for value in [gap_before, gap_after] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidGap { value });
        }
    }
    if gap_before == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(GapReport {
        gap_before,
        gap_after,
        reduction_percent: 100.0 * (gap_before - gap_after) / gap_before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_correlations() {
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.p_value, 0.0);
        assert_eq!(r.n, 4);
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.rho, -1.0);
        assert_eq!(r.p_value, 0.0);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { left: 3, right: 2 })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewSamples { n: 2 })
        ));
        assert!(matches!(
            pearson(&[0.1, 0.1, 0.1], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance { series: "xs" })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(Error::ZeroVariance { series: "ys" })
        ));
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-15);
        assert!(ln_gamma(2.0).abs() < 1e-15);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn beta_edges_and_symmetry() {
        assert_eq!(beta_reg(2.0, 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(beta_reg(2.0, 3.0, 1.0).unwrap(), 1.0);
        // I_x(1, 1) = x
        assert!((beta_reg(1.0, 1.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        // I_x(a, b) = 1 - I_{1-x}(b, a)
        let lhs = beta_reg(3.5, 0.5, 0.7).unwrap();
        let rhs = 1.0 - beta_reg(0.5, 3.5, 0.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn t_and_r_routes_agree() {
        for &(r, n) in &[(0.3, 10usize), (0.57, 62), (-0.9, 5)] {
            let df = (n - 2) as f64;
            let t = r * (df / (1.0 - r * r)).sqrt();
            let a = correlation_p_value(r, n).unwrap();
            let b = student_t_two_tailed(t, df).unwrap();
            assert!(
                (a - b).abs() <= 1e-12 * a.max(1e-300),
                "{r} {n}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap_reduction(2.0, 1.0).unwrap().reduction_percent, 50.0);
        assert_eq!(gap_reduction(1.0, 1.0).unwrap().reduction_percent, 0.0);
        assert_eq!(gap_reduction(1.0, 1.5).unwrap().reduction_percent, -50.0);
        assert!(matches!(gap_reduction(0.0, 1.0), Err(Error::ZeroBaseline)));
        assert!(matches!(
            gap_reduction(1.0, -1.0),
            Err(Error::InvalidGap { .. })
        ));
    }
}
