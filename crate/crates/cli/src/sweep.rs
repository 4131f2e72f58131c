//! The `sweep` command: residual vs radial order for the harmonic check,
//! or residual vs μ for the degeneration check. CSV output; exit 1 when
//! the expected convergence behavior is violated.

use logmean::fields::{make_harmonic, make_panharmonic, HARMONIC_LABELS};
use logmean::mvp::weighted_log_mean;
use logmean::quadrature::{default_orders, BallSpec, QuadratureRule};

use crate::{write_output, CliError, Format, RunConfig};

const DEFAULT_ORDERS: [usize; 5] = [8, 16, 32, 64, 128];
const DEFAULT_MUS: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Residuals at or below this are considered the quadrature floor.
const FLOOR: f64 = 1e-12;

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    if let Some(Format::Json) = cfg.format {
        return Err(CliError::Config("sweep output is CSV only".into()));
    }
    let kind = cfg.checks.first().map(|s| s.as_str()).unwrap_or("lemma");
    match kind {
        "lemma" => sweep_orders(cfg),
        "mu_limit" => sweep_mu(cfg),
        other => Err(CliError::Config(format!(
            "unknown sweep `{other}` (expected `lemma` or `mu_limit`)"
        ))),
    }
}

fn sweep_orders(cfg: &RunConfig) -> Result<bool, CliError> {
    let orders: Vec<usize> =
        cfg.radial_order.clone().unwrap_or_else(|| DEFAULT_ORDERS.to_vec());
    let label = cfg.fields.first().map(|s| s.as_str()).unwrap_or("exp_sin");
    if !HARMONIC_LABELS.contains(&label) {
        return Err(CliError::Config(format!("sweep needs a harmonic field, got `{label}`")));
    }
    let d = cfg.dims.first().copied().unwrap_or(2);
    let field = make_harmonic(label, d)?;
    let mut center = vec![0.0; d];
    center[0] = 0.15;
    center[1] = -0.1;
    let ball = BallSpec::new(center, 0.6)?;
    let angular = cfg.angular_order.unwrap_or(default_orders(d).1);
    let expected = field.evaluate(ball.center()) / d as f64;

    let mut csv = String::from("order,residual\n");
    let mut residuals = Vec::with_capacity(orders.len());
    for &order in &orders {
        let rule = QuadratureRule::for_ball(&ball, order, angular)?;
        let residual = (weighted_log_mean(&field, &ball, &rule)? - expected).abs();
        csv.push_str(&format!("{order},{residual}\n"));
        residuals.push(residual);
    }
    write_output(&csv, cfg.out.as_ref())?;

    // Strict decrease must hold until the floor is reached.
    let mut ok = true;
    for pair in residuals.windows(2) {
        if pair[0] > FLOOR && pair[1] >= pair[0] {
            ok = false;
        }
    }
    if residuals.iter().all(|&r| r > FLOOR) {
        ok = false;
    }
    if !ok {
        eprintln!("sweep: residuals did not decrease to the {FLOOR:.0e} floor: {residuals:?}");
    }
    Ok(ok)
}

fn sweep_mu(cfg: &RunConfig) -> Result<bool, CliError> {
    let mut mus: Vec<f64> = if cfg.mu.is_empty() { DEFAULT_MUS.to_vec() } else { cfg.mu.clone() };
    if mus.iter().any(|&mu| !(0.0 < mu && mu <= 0.1)) {
        return Err(CliError::Config("μ sweep values must lie in (0, 0.1]".into()));
    }
    mus.sort_by(|a, b| b.total_cmp(a));
    let ball = BallSpec::unit_disc();
    let d = 2;
    let (radial_default, angular_default) = default_orders(d);
    let radial = cfg.radial_order.as_ref().and_then(|v| v.first()).copied().unwrap_or(radial_default);
    let angular = cfg.angular_order.unwrap_or(angular_default);
    let rule = QuadratureRule::for_ball(&ball, radial, angular)?;

    let mut csv = String::from("mu,residual\n");
    let mut residuals = Vec::with_capacity(mus.len());
    for &mu in &mus {
        let field = make_panharmonic(mu, "exp_plane", 2)?;
        let u = field.evaluate(ball.center());
        let residual = (weighted_log_mean(&field, &ball, &rule)? - 0.5 * u).abs();
        csv.push_str(&format!("{mu},{residual}\n"));
        residuals.push(residual);
    }
    write_output(&csv, cfg.out.as_ref())?;

    let mut ok = true;
    for i in 1..mus.len() {
        let expected_ratio = (mus[i - 1] / mus[i]).powi(2);
        let ratio = residuals[i - 1] / residuals[i];
        if (ratio / expected_ratio - 1.0).abs() > 0.2 {
            ok = false;
            eprintln!(
                "sweep: residual ratio {ratio:.3} between μ={} and μ={} deviates from μ² scaling ({expected_ratio:.1})",
                mus[i - 1],
                mus[i]
            );
        }
    }
    Ok(ok)
}
