//! The `solve` command: run both Dirichlet estimators (walk-on-spheres
//! and walk-on-balls) at each query point and emit one row per
//! (estimator, point). Deterministic for a fixed seed.

use logmean::montecarlo::{wob_solve, wos_solve, Estimate};
use logmean::quadrature::BallSpec;
use logmean::WalkConfig;

use crate::{write_output, CliError, Format, RunConfig};

type BoundaryFn = Box<dyn Fn(&[f64]) -> f64 + Sync>;

/// Boundary data by label; `const:<v>` fixes the value.
fn boundary_data(label: &str, d: usize) -> Result<BoundaryFn, CliError> {
    match label {
        "exp_sin" => Ok(Box::new(|p: &[f64]| p[0].exp() * p[1].sin())),
        "exp_cos" => Ok(Box::new(|p: &[f64]| p[0].exp() * p[1].cos())),
        "linear_x1" => Ok(Box::new(|p: &[f64]| p[0])),
        "cos_2theta" => {
            if d != 2 {
                return Err(CliError::Config("cos_2theta boundary data is planar".into()));
            }
            Ok(Box::new(|p: &[f64]| (2.0 * p[1].atan2(p[0])).cos()))
        }
        "const" => Ok(Box::new(|_: &[f64]| 1.0)),
        other => {
            if let Some(v) = other.strip_prefix("const:").and_then(|s| s.parse::<f64>().ok()) {
                Ok(Box::new(move |_: &[f64]| v))
            } else {
                Err(CliError::Config(format!("unknown boundary data label `{other}`")))
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let d = cfg.dims.first().copied().unwrap_or(2);
    let radius = cfg.radius.unwrap_or(1.0);
    let domain = BallSpec::new(vec![0.0; d], radius)?;

    let label = cfg.fields.first().map(|s| s.as_str()).unwrap_or("exp_sin");
    let g = boundary_data(label, d)?;

    let points: Vec<Vec<f64>> =
        if cfg.at.is_empty() { vec![vec![0.0; d]] } else { cfg.at.clone() };
    for p in &points {
        if p.len() != d {
            return Err(CliError::Config(format!(
                "query point {p:?} has dimension {}, expected {d}",
                p.len()
            )));
        }
    }

    let mut walk_cfg = WalkConfig::new(cfg.walks.unwrap_or(100_000), cfg.seed.unwrap_or(42));
    if let Some(eps) = cfg.eps {
        walk_cfg = walk_cfg.with_eps(eps);
    }

    let mut rows: Vec<(&'static str, &Vec<f64>, Estimate)> = Vec::new();
    for point in &points {
        rows.push(("wos", point, wos_solve(&domain, &g, point, &walk_cfg)?));
        rows.push(("wob", point, wob_solve(&domain, &g, point, &walk_cfg)?));
    }

    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = String::from("estimator");
            for i in 0..d {
                csv.push_str(&format!(",x{i}"));
            }
            csv.push_str(",value,std_error,mean_steps,truncated\n");
            for (name, point, est) in &rows {
                csv.push_str(name);
                for x in point.iter() {
                    csv.push_str(&format!(",{x}"));
                }
                csv.push_str(&format!(
                    ",{},{},{},{}\n",
                    est.value, est.std_error, est.mean_steps, est.walks_truncated
                ));
            }
            csv
        }
        Format::Json => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|(name, point, est)| {
                    serde_json::json!({
                        "estimator": name,
                        "x": point,
                        "value": est.value,
                        "std_error": est.std_error,
                        "n_effective": est.n_effective,
                        "walks_truncated": est.walks_truncated,
                        "mean_steps": est.mean_steps,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&objects).expect("plain data")
        }
    };
    write_output(&text, cfg.out.as_ref())?;
    Ok(true)
}
