//! Special functions: modified Bessel `I₀`, the mean-value coefficient
//! `a(t) = 2[I₀(t)−1]/t²`, and unit-ball volumes.
//!
//! `a(t)` is the factor in the log-weighted mean-value identity for
//! panharmonic functions in the plane; it satisfies `a(0) = 1/2` and grows
//! strictly with `t`, which is exactly why the associated strict inequality
//! holds for positive panharmonic fields and fails in the harmonic limit.

use crate::error::{Error, Result};

/// `I₀` switches from the power series to the asymptotic expansion here.
/// Both branches agree to ~5e-15 relative at the switch point.
pub const I0_METHOD_SWITCH: f64 = 15.0;

/// `a(t)` switches to the cancellation-free small-argument series below
/// this threshold; the direct formula loses ~t⁻² relative accuracy near 0
/// (the cancellation in `I₀(t)−1` already costs ~6e−12 at t = 0.01, so
/// the switch sits where both branches hold ~1e−15).
pub const A_SMALL_T_THRESHOLD: f64 = 0.5;

/// Series terms are accumulated until the next term drops below this
/// fraction of the partial sum.
const SERIES_EPS: f64 = 1e-18;

/// Which evaluation branch produced a coefficient value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Power series `Σ (t/2)^{2k}/(k!)²`.
    Series,
    /// Large-argument expansion `e^t/√(2πt)·(1 + 1/(8t) + 9/(128t²) + …)`.
    Asymptotic,
    /// Even series `1/2 + t²/32 + t⁴/1152 + …` for `a(t)` near zero.
    SmallTSeries,
}

/// An evaluated coefficient together with the branch that produced it.
#[derive(Debug, Clone, Copy)]
pub struct CoeffEval {
    pub t: f64,
    pub value: f64,
    pub method: Method,
}

/// Modified Bessel function of the first kind, order zero.
///
/// Power series for `|t| ≤ 15`, asymptotic expansion above; even in `t`.
pub fn bessel_i0(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("bessel_i0: non-finite argument {t}")));
    }
    Ok(i0_unchecked(t))
}

/// `I₀` without the finiteness check, for hot paths that guarantee it.
pub(crate) fn i0_unchecked(t: f64) -> f64 {
    let at = t.abs();
    if at <= I0_METHOD_SWITCH {
        i0_series(at)
    } else {
        i0_asymptotic(at)
    }
}

fn i0_series(t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < SERIES_EPS * sum {
            return sum;
        }
        k += 1.0;
    }
}

fn i0_asymptotic(t: f64) -> f64 {
    let prefactor = t.exp() / (2.0 * std::f64::consts::PI * t).sqrt();
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let m = 2.0 * k - 1.0;
        let next = term * m * m / (8.0 * k * t);
        // The expansion is divergent; truncate at the smallest term.
        if next >= term || next < SERIES_EPS * sum {
            if next < term {
                sum += next;
            }
            return prefactor * sum;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
}

/// The mean-value coefficient `a(t) = 2[I₀(t)−1]/t²`, with `a(0) = 1/2`.
pub fn weight_coeff_a(t: f64) -> Result<f64> {
    coeff_a_eval(t).map(|e| e.value)
}

/// Evaluate `a(t)` and report which branch was used.
pub fn coeff_a_eval(t: f64) -> Result<CoeffEval> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("weight_coeff_a: non-finite argument {t}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("weight_coeff_a: negative argument {t}")));
    }
    if t < A_SMALL_T_THRESHOLD {
        return Ok(CoeffEval {
            t,
            value: a_small_t_series(t),
            method: Method::SmallTSeries,
        });
    }
    let method = if t <= I0_METHOD_SWITCH {
        Method::Series
    } else {
        Method::Asymptotic
    };
    let value = 2.0 * (i0_unchecked(t) - 1.0) / (t * t);
    Ok(CoeffEval { t, value, method })
}

/// `a(t) = Σ_{k≥1} t^{2k−2}/(2^{2k−1}(k!)²) = 1/2 + t²/32 + t⁴/1152 + …`
///
/// Subtracting 1 from `I₀` cancels catastrophically for small `t`; this
/// series starts at the constant term instead. At `t = 0` the sum is the
/// first term alone, exactly `1/2`.
fn a_small_t_series(t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 0.5;
    let mut sum = 0.5;
    let mut k = 2.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < SERIES_EPS * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// Volume `ω_d = π^{d/2}/Γ(d/2+1)` of the d-dimensional unit ball.
///
/// The Gamma value is built by the half-integer recursion
/// `Γ(1/2) = √π`, `Γ(1) = 1`, `Γ(x+1) = x·Γ(x)`.
pub fn ball_volume(d: usize) -> Result<f64> {
    if d < 1 {
        return Err(Error::Domain("ball_volume: dimension must be ≥ 1".into()));
    }
    let pi = std::f64::consts::PI;
    let pi_power = if d.is_multiple_of(2) {
        pi.powi((d / 2) as i32)
    } else {
        pi.powi((d / 2) as i32) * pi.sqrt()
    };
    // Γ(d/2 + 1) = Γ((d+2)/2) expressed in half-integer steps.
    Ok(pi_power / gamma_half(d + 2))
}

/// `Γ(n/2)` for integer `n ≥ 1` by the upward recursion.
fn gamma_half(n: usize) -> f64 {
    debug_assert!(n >= 1);
    let mut value = if n.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut m = if n.is_multiple_of(2) { 2 } else { 1 };
    while m < n {
        value *= m as f64 / 2.0;
        m += 2;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Independent oracle: plain term-by-term summation of
    /// `Σ (t/2)^{2k}/(k!)²` with a fixed 200-term budget, kept separate
    /// from the implementation's truncation logic.
    fn i0_oracle(t: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0_f64;
        for k in 1..=200 {
            sum += term;
            term *= (t / 2.0) * (t / 2.0) / ((k * k) as f64);
        }
        sum
    }

    #[test]
    fn i0_at_zero_is_one() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn i0_matches_series_oracle() {
        // Frozen from the oracle (and cross-checked against 25-digit
        // reference evaluations of I₀).
        assert!((bessel_i0(1.0).unwrap() - 1.2660658777520083).abs() < 1e-15);
        assert!((bessel_i0(2.0).unwrap() - 2.2795853023360673).abs() < 1e-14);
        for &t in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 14.9] {
            let rel = (bessel_i0(t).unwrap() - i0_oracle(t)).abs() / i0_oracle(t);
            assert!(rel < 1e-14, "I0({t}) off by {rel:.2e} relative");
        }
    }

    #[test]
    fn i0_non_finite_rejected() {
        assert!(bessel_i0(f64::NAN).is_err());
        assert!(bessel_i0(f64::INFINITY).is_err());
    }

    #[test]
    fn i0_is_even() {
        for &t in &[0.3, 1.0, 7.5, 14.0, 20.0, 40.0] {
            assert_eq!(bessel_i0(t).unwrap(), bessel_i0(-t).unwrap());
        }
    }

    #[test]
    fn i0_branches_agree_at_switch() {
        let t = I0_METHOD_SWITCH;
        let series = i0_series(t);
        let asym = i0_asymptotic(t);
        let rel = (series - asym).abs() / series;
        assert!(rel <= 1e-13, "branch mismatch at t={t}: {rel:.2e}");
    }

    #[test]
    fn i0_asymptotic_region_accuracy() {
        // The series oracle stays accurate well past the switch point.
        for &t in &[16.0, 20.0, 30.0, 50.0] {
            let rel = (bessel_i0(t).unwrap() - i0_oracle(t)).abs() / i0_oracle(t);
            assert!(rel < 1e-13, "I0({t}) off by {rel:.2e} relative");
        }
    }

    #[test]
    fn a_at_zero_is_exactly_half() {
        let eval = coeff_a_eval(0.0).unwrap();
        assert_eq!(eval.value, 0.5);
        assert_eq!(eval.method, Method::SmallTSeries);
    }

    #[test]
    fn a_matches_oracle_values() {
        // a(1) = 2(I₀(1)−1), a(2) = (I₀(2)−1)/2, from the series oracle.
        let a1 = 2.0 * (i0_oracle(1.0) - 1.0);
        let a2 = (i0_oracle(2.0) - 1.0) / 2.0;
        assert!((a1 - 0.5321317555040167).abs() < 1e-15);
        assert!((a2 - 0.6397926511680336).abs() < 1e-15);
        assert!((weight_coeff_a(1.0).unwrap() - a1).abs() < 1e-15);
        assert!((weight_coeff_a(2.0).unwrap() - a2).abs() < 1e-15);
    }

    #[test]
    fn a_rejects_bad_arguments() {
        assert!(weight_coeff_a(-0.5).is_err());
        assert!(weight_coeff_a(f64::NAN).is_err());
    }

    #[test]
    fn a_branches_agree_at_threshold() {
        let t = A_SMALL_T_THRESHOLD;
        let small = a_small_t_series(t);
        let direct = 2.0 * (i0_unchecked(t) - 1.0) / (t * t);
        let rel = (small - direct).abs() / small;
        assert!(rel <= 1e-14, "a(t) branch mismatch at t={t}: {rel:.2e}");
    }

    #[test]
    fn a_method_tags_respect_thresholds() {
        assert_eq!(coeff_a_eval(5e-3).unwrap().method, Method::SmallTSeries);
        assert_eq!(coeff_a_eval(0.25).unwrap().method, Method::SmallTSeries);
        assert_eq!(coeff_a_eval(0.5).unwrap().method, Method::Series);
        assert_eq!(coeff_a_eval(20.0).unwrap().method, Method::Asymptotic);
    }

    #[test]
    fn a_strictly_increasing_and_above_half() {
        // 2000-point grid over [0, 20].
        let n = 2000;
        let mut prev = weight_coeff_a(0.0).unwrap();
        for i in 1..n {
            let t = 20.0 * i as f64 / (n - 1) as f64;
            let v = weight_coeff_a(t).unwrap();
            assert!(v > prev, "a not strictly increasing at t={t}");
            assert!(v > 0.5, "a(t) ≤ 1/2 at t={t}");
            prev = v;
        }
    }

    #[test]
    fn a_small_t_expansion_order() {
        // |a(t) − 1/2 − t²/32| should behave like t⁴/1152, within 2x.
        let c4 = 1.0 / 1152.0;
        let mut t = 0.02;
        while t <= 0.1 {
            let lhs = (weight_coeff_a(t).unwrap() - 0.5 - t * t / 32.0).abs();
            let ratio = lhs / t.powi(4);
            assert!(
                ratio <= 2.0 * c4 && ratio >= c4 / 2.0,
                "t⁴ coefficient estimate {ratio:.3e} outside [{:.3e}, {:.3e}] at t={t}",
                c4 / 2.0,
                2.0 * c4
            );
            t += 0.005;
        }
    }

    #[test]
    fn ball_volumes_match_closed_forms() {
        assert!((ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(4).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!((ball_volume(5).unwrap() - 8.0 * PI * PI / 15.0).abs() < 1e-14);
        assert!(ball_volume(0).is_err());
    }

    #[test]
    fn ball_volume_recursion_consistency() {
        // ω_d = ω_{d−2} · 2π/d.
        for d in 3..=10 {
            let lhs = ball_volume(d).unwrap();
            let rhs = ball_volume(d - 2).unwrap() * 2.0 * PI / d as f64;
            assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs());
        }
    }

    proptest::proptest! {
        #[test]
        fn i0_even_everywhere(t in -40.0..40.0f64) {
            proptest::prop_assert_eq!(
                bessel_i0(t).unwrap().to_bits(),
                bessel_i0(-t).unwrap().to_bits()
            );
        }

        #[test]
        fn a_stays_above_half(t in 1e-6..20.0f64) {
            let a = weight_coeff_a(t).unwrap();
            proptest::prop_assert!(a > 0.5);
            proptest::prop_assert!(a.is_finite());
        }
    }
}
