//! The `bessel` command: tabulate `I₀(t)` and `a(t)` with the branch
//! each value came from.

use logmean::specfun::{bessel_i0, coeff_a_eval, Method};

use crate::{write_output, CliError, Format, RunConfig};

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Series => "series",
        Method::Asymptotic => "asymptotic",
        Method::SmallTSeries => "small_t_series",
    }
}

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let grid: Vec<f64> = if cfg.t.is_empty() {
        (0..=200).map(|i| i as f64 * 0.1).collect()
    } else {
        cfg.t.clone()
    };

    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        let i0 = bessel_i0(t)?;
        let a = coeff_a_eval(t)?;
        rows.push((t, i0, a.value, method_name(a.method)));
    }

    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = String::from("t,i0,a,method\n");
            for (t, i0, a, method) in &rows {
                csv.push_str(&format!("{t},{i0},{a},{method}\n"));
            }
            csv
        }
        Format::Json => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|(t, i0, a, method)| {
                    serde_json::json!({ "t": t, "i0": i0, "a": a, "method": method })
                })
                .collect();
            serde_json::to_string_pretty(&objects).expect("plain data")
        }
    };
    write_output(&text, cfg.out.as_ref())?;
    Ok(true)
}
