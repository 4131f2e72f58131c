//! Verification engine for the mean-value identities.
//!
//! Each check compares a quadrature observation against the identity's
//! predicted value and records the outcome in a [`VerificationReport`].
//! Checks are pure; a batch runner may execute them concurrently and sort
//! the reports afterwards (see [`sort_reports`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Classification, ScalarField};
use crate::quadrature::{
    integrate_ball, integrate_ball_detailed, BallSpec, BallWeight, QuadratureRule,
};
use crate::rng::CounterRng;
use crate::specfun::{ball_volume, weight_coeff_a};

/// Default tolerance scale for harmonic checks: the recorded tolerance is
/// `scale·(1+|u(x)|)`, with measured headroom above the quadrature floor.
pub const LEMMA_TOL_SCALE: f64 = 1e-9;
/// Default tolerance scale for panharmonic checks.
pub const THEOREM1_TOL_SCALE: f64 = 1e-8;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Lemma,
    Theorem1,
    Normalization,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
        }
    }
}

/// The inputs a check ran on. Grid-style checks that have no ball leave
/// `x` empty and `d = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckInputs {
    pub label: String,
    pub x: Vec<f64>,
    pub r: f64,
    pub d: usize,
    pub mu: Option<f64>,
}

impl CheckInputs {
    fn for_ball(field: &ScalarField, ball: &BallSpec) -> Self {
        CheckInputs {
            label: field.label().to_string(),
            x: ball.center().to_vec(),
            r: ball.radius(),
            d: ball.dim(),
            mu: field.classification().mu(),
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub inputs: CheckInputs,
    pub observed: f64,
    pub expected: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub expected_provenance: Provenance,
}

impl VerificationReport {
    /// Build a report; the residual is `|observed − expected|` and the
    /// verdict is `pass` iff `residual ≤ tolerance`.
    pub fn new(
        check_id: &str,
        inputs: CheckInputs,
        observed: f64,
        expected: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        let residual = (observed - expected).abs();
        let verdict = if residual <= tolerance { Verdict::Pass } else { Verdict::Fail };
        VerificationReport {
            check_id: check_id.to_string(),
            inputs,
            observed,
            expected,
            residual,
            tolerance,
            verdict,
            expected_provenance: provenance,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Sort reports by check id, then by inputs (deterministic aggregation
/// order for concurrent runners).
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| {
        (a.check_id.as_str(), a.inputs.label.as_str(), a.inputs.d)
            .cmp(&(b.check_id.as_str(), b.inputs.label.as_str(), b.inputs.d))
            .then_with(|| a.inputs.mu.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.inputs.mu.unwrap_or(f64::NEG_INFINITY)))
            .then_with(|| a.inputs.r.total_cmp(&b.inputs.r))
            .then_with(|| {
                for (x, y) in a.inputs.x.iter().zip(&b.inputs.x) {
                    let c = x.total_cmp(y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
}

/// `(1/(ω_d r^d)) ∫_{D_r(x)} u(y) log(r/|x−y|) dy`.
pub fn weighted_log_mean(
    field: &ScalarField,
    ball: &BallSpec,
    rule: &QuadratureRule,
) -> Result<f64> {
    let integral = integrate_ball(field, ball, rule, BallWeight::LogROverDist)?;
    Ok(integral / ball_measure(ball)?)
}

/// As [`weighted_log_mean`], with the standard-error estimate of the mean
/// when the angular rule is quasi-random (`None` for tensor rules).
fn weighted_log_mean_with_error(
    field: &ScalarField,
    ball: &BallSpec,
    rule: &QuadratureRule,
) -> Result<(f64, Option<f64>)> {
    let integral = integrate_ball_detailed(field, ball, rule, BallWeight::LogROverDist)?;
    let measure = ball_measure(ball)?;
    Ok((integral.value / measure, integral.std_error.map(|se| se / measure)))
}

/// Deterministic rules keep the requested tolerance; quasi-random rules
/// widen it to 4× the reported standard error when that is larger.
fn widen_for_statistical_error(tolerance: f64, std_error: Option<f64>) -> f64 {
    match std_error {
        Some(se) => tolerance.max(4.0 * se),
        None => tolerance,
    }
}

/// `(1/(ω_d r^d)) ∫_{D_r(x)} u(y) dy`.
pub fn volume_mean(field: &ScalarField, ball: &BallSpec, rule: &QuadratureRule) -> Result<f64> {
    let integral = integrate_ball(field, ball, rule, BallWeight::Uniform)?;
    Ok(integral / ball_measure(ball)?)
}

/// The same quantity as [`weighted_log_mean`], evaluated through the
/// splitting `log(r/|x−y|) = log r − log|x−y|` (two separate integrals).
pub fn weighted_log_mean_split(
    field: &ScalarField,
    ball: &BallSpec,
    rule: &QuadratureRule,
) -> Result<f64> {
    let measure = ball_measure(ball)?;
    let plain = integrate_ball(field, ball, rule, BallWeight::Uniform)?;
    let log_dist = integrate_ball(field, ball, rule, BallWeight::LogDist)?;
    Ok(ball.radius().ln() * (plain / measure) - log_dist / measure)
}

fn ball_measure(ball: &BallSpec) -> Result<f64> {
    Ok(ball_volume(ball.dim())? * ball.radius().powi(ball.dim() as i32))
}

fn require_admissible(field: &ScalarField, ball: &BallSpec) -> Result<()> {
    if !field.admits_ball(ball) {
        return Err(Error::Misuse(format!(
            "ball at {:?} with radius {} leaves the domain of field `{}`",
            ball.center(),
            ball.radius(),
            field.label()
        )));
    }
    Ok(())
}

/// Verify the harmonic identity `u(x)/d = ⨍ u log(r/|x−y|)`.
///
/// `tol_scale` sets the recorded tolerance `tol_scale·(1+|u(x)|)`.
pub fn check_lemma(
    field: &ScalarField,
    ball: &BallSpec,
    rule: &QuadratureRule,
    tol_scale: f64,
) -> Result<VerificationReport> {
    if field.classification() != Classification::Harmonic {
        return Err(Error::Misuse(format!(
            "check_lemma requires a harmonic field, `{}` is {:?}",
            field.label(),
            field.classification()
        )));
    }
    require_admissible(field, ball)?;
    let u = field.evaluate(ball.center());
    let expected = u / ball.dim() as f64;
    let (observed, std_error) = weighted_log_mean_with_error(field, ball, rule)?;
    Ok(VerificationReport::new(
        "lemma",
        CheckInputs::for_ball(field, ball),
        observed,
        expected,
        widen_for_statistical_error(tol_scale * (1.0 + u.abs()), std_error),
        Provenance::Lemma,
    ))
}

/// Verify the planar panharmonic identity `a(μr)·u(x) = ⨍ u log(r/|x−y|)`.
pub fn check_theorem1(
    field: &ScalarField,
    ball: &BallSpec,
    rule: &QuadratureRule,
    tol_scale: f64,
) -> Result<VerificationReport> {
    let mu = match field.classification() {
        Classification::Panharmonic { mu } => mu,
        other => {
            return Err(Error::Misuse(format!(
                "check_theorem1 requires a panharmonic field, `{}` is {other:?}",
                field.label()
            )))
        }
    };
    if ball.dim() != 2 {
        return Err(Error::Misuse(format!(
            "the identity with coefficient a(μr) is stated in the plane; got d = {}",
            ball.dim()
        )));
    }
    require_admissible(field, ball)?;
    let u = field.evaluate(ball.center());
    // a(t) is even in t, so the sign of μ is immaterial.
    let expected = weight_coeff_a((mu * ball.radius()).abs())? * u;
    let (observed, std_error) = weighted_log_mean_with_error(field, ball, rule)?;
    Ok(VerificationReport::new(
        "theorem1",
        CheckInputs::for_ball(field, ball),
        observed,
        expected,
        widen_for_statistical_error(tol_scale * (1.0 + u.abs()), std_error),
        Provenance::Theorem1,
    ))
}

/// Margin `⨍ u log(r/|x−y|) − u(x)/2` of the strict planar inequality.
///
/// Positive margin means the strict inequality holds at `(x, r)`; a margin
/// within quadrature tolerance of zero is equality — the counterexample
/// field produces exactly that, refuting the strict form for subharmonic
/// nonnegative fields.
pub fn check_inequality1(
    field: &ScalarField,
    ball: &BallSpec,
    rule: &QuadratureRule,
) -> Result<f64> {
    if ball.dim() != 2 {
        return Err(Error::Misuse(format!(
            "the strict inequality is stated in the plane; got d = {}",
            ball.dim()
        )));
    }
    require_admissible(field, ball)?;
    let u = field.evaluate(ball.center());
    Ok(weighted_log_mean(field, ball, rule)? - 0.5 * u)
}

/// Verify that `a(t)` is strictly increasing over the grid with
/// `a(t) > 1/2` for `t > 0` and `a(0) = 1/2` exactly.
///
/// `observed` counts violations; the check passes iff it is zero.
pub fn check_a_monotone(t_grid: &[f64]) -> Result<VerificationReport> {
    if t_grid.is_empty() {
        return Err(Error::Config("check_a_monotone: empty grid".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("check_a_monotone: grid must be strictly ascending".into()));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::Domain("check_a_monotone: grid values must be ≥ 0".into()));
    }
    let values: Vec<f64> = t_grid.iter().map(|&t| weight_coeff_a(t)).collect::<Result<_>>()?;
    let mut violations = 0usize;
    for (t, v) in t_grid.iter().zip(&values) {
        if *t == 0.0 {
            if *v != 0.5 {
                violations += 1;
            }
        } else if *v <= 0.5 {
            violations += 1;
        }
    }
    violations += values.windows(2).filter(|w| w[1] <= w[0]).count();
    Ok(VerificationReport::new(
        "a_monotone",
        CheckInputs {
            label: "weight_coeff_a".to_string(),
            x: vec![],
            r: 0.0,
            d: 0,
            mu: None,
        },
        violations as f64,
        0.0,
        0.0,
        Provenance::Oracle,
    ))
}

/// Tolerances for the `μ → 0` degeneration check.
#[derive(Debug, Clone, Copy)]
pub struct MuLimitSchedule {
    /// Residual cap per μ: `cap_scale·(μr)²·(1+|u(x)|) + floor`. The
    /// leading deviation is `(μr)²/32·u(x)`, so the default 1/8 leaves a
    /// 4x margin.
    pub cap_scale: f64,
    /// Absolute quadrature floor added to each cap.
    pub floor: f64,
    /// Allowed relative deviation of consecutive residual ratios from the
    /// exact `(μ_i/μ_j)²` scaling.
    pub ratio_slack: f64,
}

impl Default for MuLimitSchedule {
    fn default() -> Self {
        MuLimitSchedule { cap_scale: 0.125, floor: 1e-11, ratio_slack: 0.2 }
    }
}

/// Verify that the panharmonic identity degenerates to the harmonic one
/// as `μ → 0`: for `u = e^{μx₁}`, the residual `|⨍ u log(r/|x−y|) − u(x)/2|`
/// scales as `μ²` across the list.
///
/// `observed` is the worst normalized violation (0 when the scaling is
/// exact); `μ = 0` entries are routed through [`check_lemma`] on the
/// constant field the plane wave degenerates to.
pub fn check_mu_limit(
    mu_list: &[f64],
    ball: &BallSpec,
    rule: &QuadratureRule,
    schedule: MuLimitSchedule,
) -> Result<VerificationReport> {
    if mu_list.is_empty() {
        return Err(Error::Config("check_mu_limit: empty μ list".into()));
    }
    if ball.dim() != 2 {
        return Err(Error::Misuse("check_mu_limit runs in the plane".into()));
    }
    let mut worst = 0.0_f64;

    let mut mus: Vec<f64> = Vec::new();
    for &mu in mu_list {
        if mu == 0.0 {
            // Classification boundary: the plane wave is constant, the
            // identity is the harmonic one.
            let constant = ScalarField::constant(1.0, 2);
            let report = check_lemma(&constant, ball, rule, LEMMA_TOL_SCALE)?;
            if !report.passed() {
                worst = worst.max(1.0 + report.residual / report.tolerance);
            }
            continue;
        }
        if !(0.0..=0.1).contains(&mu) {
            return Err(Error::Domain(format!("check_mu_limit: μ must lie in (0, 0.1], got {mu}")));
        }
        mus.push(mu);
    }
    mus.sort_by(|a, b| b.total_cmp(a));

    let r = ball.radius();
    let mut residuals = Vec::with_capacity(mus.len());
    for &mu in &mus {
        let field = crate::fields::make_panharmonic(mu, "exp_plane", 2)?;
        let u = field.evaluate(ball.center());
        let mean = weighted_log_mean(&field, ball, rule)?;
        let residual = (mean - 0.5 * u).abs();
        let cap = schedule.cap_scale * (mu * r).powi(2) * (1.0 + u.abs()) + schedule.floor;
        worst = worst.max((residual / cap - 1.0).max(0.0));
        residuals.push(residual);
    }
    for i in 1..mus.len() {
        let expected_ratio = (mus[i - 1] / mus[i]).powi(2);
        let ratio = residuals[i - 1] / residuals[i];
        worst = worst.max((ratio / expected_ratio - 1.0).abs());
    }

    Ok(VerificationReport::new(
        "mu_limit",
        CheckInputs {
            label: "exp_plane".to_string(),
            x: ball.center().to_vec(),
            r,
            d: 2,
            mu: None,
        },
        worst,
        0.0,
        schedule.ratio_slack,
        Provenance::Theorem1,
    ))
}

/// Draw an admissible `(x, r)`: `x` uniform in the concentric ball of
/// half the domain radius, `r` uniform in `[0.1·R, 0.45·(R − |x − x₀|)]`,
/// so the closure of `D_r(x)` always stays inside the domain.
pub fn sample_admissible(domain: &BallSpec, rng: &mut CounterRng) -> (Vec<f64>, f64) {
    let d = domain.dim();
    let big_r = domain.radius();
    let mut direction = vec![0.0; d];
    rng.fill_normals(&mut direction);
    let nrm = crate::quadrature::norm(&direction);
    let radius = 0.5 * big_r * rng.uniform().powf(1.0 / d as f64);
    let x: Vec<f64> = domain
        .center()
        .iter()
        .zip(&direction)
        .map(|(c, dir)| c + radius * dir / nrm)
        .collect();
    let slack = big_r - crate::quadrature::dist(&x, domain.center());
    let r = 0.1 * big_r + rng.uniform() * (0.45 * slack - 0.1 * big_r).max(0.0);
    (x, r)
}
