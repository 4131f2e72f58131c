//! The `verify` command: run check families, write the report batch,
//! exit 0 iff every verdict passes.

use logmean::fields::{
    counterexample_field, harmonic_catalog, make_harmonic, make_panharmonic, CounterexampleMode,
    HARMONIC_LABELS, PANHARMONIC_LABELS,
};
use logmean::mvp::{
    check_a_monotone, check_inequality1, check_lemma, check_mu_limit, check_theorem1,
    sample_admissible, sort_reports, CheckInputs, MuLimitSchedule, Provenance, VerificationReport,
    LEMMA_TOL_SCALE, THEOREM1_TOL_SCALE,
};
use logmean::quadrature::{default_orders, BallSpec, QuadratureRule};
use logmean::report::{reports_to_csv, reports_to_json};
use logmean::CounterRng;

use crate::{write_output, CliError, Format, RunConfig};

const ALL_CHECKS: [&str; 5] = ["lemma", "theorem1", "corollary", "a_monotone", "mu_limit"];
const DEFAULT_THEOREM1_MUS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const DEFAULT_LIMIT_MUS: [f64; 3] = [1e-1, 1e-2, 1e-3];

fn rule_for(ball: &BallSpec, cfg: &RunConfig) -> Result<QuadratureRule, CliError> {
    let (radial_default, angular_default) = default_orders(ball.dim());
    let radial = cfg.radial_order.as_ref().and_then(|v| v.first()).copied().unwrap_or(radial_default);
    let angular = cfg.angular_order.unwrap_or(angular_default);
    Ok(QuadratureRule::for_ball(ball, radial, angular)?)
}

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let checks: Vec<String> = if cfg.checks.is_empty() {
        ALL_CHECKS.iter().map(|s| s.to_string()).collect()
    } else {
        for c in &cfg.checks {
            if !ALL_CHECKS.contains(&c.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown check `{c}` (expected one of {})",
                    ALL_CHECKS.join(", ")
                )));
            }
        }
        cfg.checks.clone()
    };

    let dims = if cfg.dims.is_empty() { vec![2, 3, 4] } else { cfg.dims.clone() };
    let samples = cfg.samples.unwrap_or(3).max(1);
    let seed = cfg.seed.unwrap_or(42);
    let mut reports: Vec<VerificationReport> = Vec::new();

    for check in &checks {
        match check.as_str() {
            "lemma" => run_lemma(cfg, &dims, samples, seed, &mut reports)?,
            "theorem1" => run_theorem1(cfg, samples, seed, &mut reports)?,
            "corollary" => run_corollary(cfg, &mut reports)?,
            "a_monotone" => {
                let grid: Vec<f64> = (0..2000).map(|i| 20.0 * i as f64 / 1999.0).collect();
                reports.push(check_a_monotone(&grid)?);
            }
            "mu_limit" => {
                let mus: Vec<f64> = if checks.len() == 1 && !cfg.mu.is_empty() {
                    cfg.mu.clone()
                } else {
                    DEFAULT_LIMIT_MUS.to_vec()
                };
                let ball = BallSpec::unit_disc();
                let rule = rule_for(&ball, cfg)?;
                reports.push(check_mu_limit(&mus, &ball, &rule, MuLimitSchedule::default())?);
            }
            _ => unreachable!("validated above"),
        }
    }

    sort_reports(&mut reports);

    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => reports_to_json(&reports),
        Format::Csv => reports_to_csv(&reports),
    };
    write_output(&text, cfg.out.as_ref())?;

    let failed = reports.iter().filter(|r| !r.passed()).count();
    for family in &checks {
        let total = reports.iter().filter(|r| r.check_id.starts_with(family.as_str())).count();
        let pass = reports
            .iter()
            .filter(|r| r.check_id.starts_with(family.as_str()) && r.passed())
            .count();
        eprintln!("{family}: {pass}/{total} pass");
    }
    eprintln!("verdicts: {} pass, {failed} fail", reports.len() - failed);
    Ok(failed == 0)
}

/// Harmonic catalog fields restricted to the user's selection (all when
/// no selection was given).
fn selected_harmonic(cfg: &RunConfig, d: usize) -> Result<Vec<logmean::ScalarField>, CliError> {
    if cfg.fields.is_empty() {
        return Ok(harmonic_catalog(d)?);
    }
    let mut fields = Vec::new();
    for label in &cfg.fields {
        if HARMONIC_LABELS.contains(&label.as_str()) {
            fields.push(make_harmonic(label, d)?);
        } else if label == "counterexample_disc" && d == 2 {
            fields.push(counterexample_field(CounterexampleMode::UnitDisc)?);
        }
    }
    Ok(fields)
}

fn run_lemma(
    cfg: &RunConfig,
    dims: &[usize],
    samples: usize,
    seed: u64,
    reports: &mut Vec<VerificationReport>,
) -> Result<(), CliError> {
    let tol = cfg.tol.unwrap_or(LEMMA_TOL_SCALE);
    let mut any = false;
    for &d in dims {
        let fields = selected_harmonic(cfg, d)?;
        let domain = BallSpec::unit_ball(d)?;
        for (fi, field) in fields.iter().enumerate() {
            any = true;
            let mut rng = CounterRng::new(seed, (d * 1000 + fi) as u64);
            for _ in 0..samples {
                let (x, r) = sample_admissible(&domain, &mut rng);
                let ball = BallSpec::new(x, r)?;
                let rule = rule_for(&ball, cfg)?;
                reports.push(check_lemma(field, &ball, &rule, tol)?);
            }
        }
    }
    if !any {
        return Err(CliError::Config(
            "no harmonic catalog fields selected for the lemma check".into(),
        ));
    }
    Ok(())
}

fn run_theorem1(
    cfg: &RunConfig,
    samples: usize,
    seed: u64,
    reports: &mut Vec<VerificationReport>,
) -> Result<(), CliError> {
    let tol = cfg.tol.unwrap_or(THEOREM1_TOL_SCALE);
    let labels: Vec<&str> = if cfg.fields.is_empty() {
        PANHARMONIC_LABELS.to_vec()
    } else {
        cfg.fields
            .iter()
            .map(|s| s.as_str())
            .filter(|l| PANHARMONIC_LABELS.contains(l))
            .collect()
    };
    if labels.is_empty() {
        return Err(CliError::Config(
            "no panharmonic catalog fields selected for the theorem1 check".into(),
        ));
    }
    let mus: Vec<f64> =
        if cfg.mu.is_empty() { DEFAULT_THEOREM1_MUS.to_vec() } else { cfg.mu.clone() };
    let domain = BallSpec::unit_disc();
    for (fi, label) in labels.iter().enumerate() {
        for (mi, &mu) in mus.iter().enumerate() {
            let field = make_panharmonic(mu, label, 2)?;
            let mut rng = CounterRng::new(seed, (fi * 100 + mi) as u64 + 7);
            for _ in 0..samples {
                let (x, r) = sample_admissible(&domain, &mut rng);
                let ball = BallSpec::new(x, r)?;
                let rule = rule_for(&ball, cfg)?;
                reports.push(check_theorem1(&field, &ball, &rule, tol)?);
            }
        }
    }
    Ok(())
}

/// The refutation grid: margins of the strict inequality for the
/// counterexample field over a 5×5 lattice of centers and 5 radii each,
/// plus a positivity scan over the closed disc.
fn run_corollary(cfg: &RunConfig, reports: &mut Vec<VerificationReport>) -> Result<(), CliError> {
    let field = counterexample_field(CounterexampleMode::UnitDisc)?;
    let tol = cfg.tol.unwrap_or(1e-8);
    for i in 0..5 {
        for j in 0..5 {
            let x0 = -0.6 + 0.3 * i as f64;
            let x1 = -0.6 + 0.3 * j as f64;
            let slack = 1.0 - (x0 * x0 + x1 * x1).sqrt();
            for k in 0..5 {
                let r = (0.15 + 0.15 * k as f64) * slack;
                let ball = BallSpec::new(vec![x0, x1], r)?;
                let rule = rule_for(&ball, cfg)?;
                let margin = check_inequality1(&field, &ball, &rule)?;
                // Raw margin recorded: equality within tolerance refutes
                // the strict form; a genuinely positive margin would fail.
                reports.push(VerificationReport::new(
                    "corollary",
                    CheckInputs {
                        label: field.label().to_string(),
                        x: vec![x0, x1],
                        r,
                        d: 2,
                        mu: None,
                    },
                    margin,
                    0.0,
                    tol,
                    Provenance::Lemma,
                ));
            }
        }
    }

    // u ≥ 0 over a 200×200 grid of the closed unit disc.
    let mut violations = 0usize;
    for i in 0..200 {
        for j in 0..200 {
            let x = -1.0 + 2.0 * i as f64 / 199.0;
            let y = -1.0 + 2.0 * j as f64 / 199.0;
            if x * x + y * y <= 1.0 && field.evaluate(&[x, y]) < 0.0 {
                violations += 1;
            }
        }
    }
    reports.push(VerificationReport::new(
        "corollary_nonneg",
        CheckInputs {
            label: field.label().to_string(),
            x: vec![],
            r: 1.0,
            d: 2,
            mu: None,
        },
        violations as f64,
        0.0,
        0.0,
        Provenance::Lemma,
    ));
    Ok(())
}
