//! The `explore-subharmonic` command: margins of the strict inequality
//! for the strictly subharmonic samples `|x|² + c`. Whether the strict
//! inequality holds for such fields is an open question; this command
//! only reports the measured margins and never renders a verdict.

use logmean::fields::make_quadratic;
use logmean::mvp::check_inequality1;
use logmean::quadrature::{BallSpec, QuadratureRule};

use crate::{write_output, CliError, Format, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    if let Some(Format::Json) = cfg.format {
        return Err(CliError::Config("explore-subharmonic output is CSV only".into()));
    }
    eprintln!("NO VERDICT — exploratory margins only; no claim is asserted.");

    let offsets = [0.0, 1.0, 3.0];
    let centers: [[f64; 2]; 3] = [[0.0, 0.0], [0.3, 0.1], [-0.2, 0.4]];
    let mut csv = String::from("c,x0,x1,r,margin\n");
    for &c in &offsets {
        let field = make_quadratic(c, 2);
        for center in &centers {
            let slack = 1.0 - (center[0] * center[0] + center[1] * center[1]).sqrt();
            for frac in [0.3, 0.6] {
                let r = frac * slack;
                let ball = BallSpec::new(center.to_vec(), r)?;
                let rule = QuadratureRule::default_for_ball(&ball)?;
                let margin = check_inequality1(&field, &ball, &rule)?;
                csv.push_str(&format!("{c},{},{},{r},{margin}\n", center[0], center[1]));
            }
        }
    }
    write_output(&csv, cfg.out.as_ref())?;
    Ok(true)
}
