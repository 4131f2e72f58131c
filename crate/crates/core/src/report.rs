//! Report batch serialization: a JSON array of report objects and a CSV
//! flattening. Both formats are read back by this module (round-trip).
//!
//! CSV numbers use `.` decimals and Rust's shortest round-trip float
//! formatting, so re-parsing reproduces every value bit-exactly. The
//! header is fixed for a given batch; point coordinates expand into
//! `x0..x{d−1}` columns sized by the largest dimension present.

use crate::error::{Error, Result};
use crate::mvp::{CheckInputs, Provenance, Verdict, VerificationReport};

/// Serialize a batch as a pretty-printed JSON array.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports are plain data")
}

/// Parse a JSON array of reports.
pub fn reports_from_json(text: &str) -> Result<Vec<VerificationReport>> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid report JSON: {e}")))
}

fn provenance_str(p: Provenance) -> &'static str {
    match p {
        Provenance::Lemma => "lemma",
        Provenance::Theorem1 => "theorem1",
        Provenance::Normalization => "normalization",
        Provenance::Oracle => "oracle",
    }
}

fn provenance_parse(s: &str) -> Result<Provenance> {
    match s {
        "lemma" => Ok(Provenance::Lemma),
        "theorem1" => Ok(Provenance::Theorem1),
        "normalization" => Ok(Provenance::Normalization),
        "oracle" => Ok(Provenance::Oracle),
        other => Err(Error::Config(format!("unknown provenance `{other}`"))),
    }
}

/// Flatten a batch to CSV.
pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let max_d = reports.iter().map(|r| r.inputs.x.len()).max().unwrap_or(0);
    let mut out = String::from("check_id,label,d,mu");
    for i in 0..max_d {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",r,observed,expected,residual,tolerance,verdict,provenance\n");
    for r in reports {
        out.push_str(&r.check_id);
        out.push(',');
        out.push_str(&r.inputs.label);
        out.push(',');
        out.push_str(&r.inputs.d.to_string());
        out.push(',');
        if let Some(mu) = r.inputs.mu {
            out.push_str(&format!("{mu}"));
        }
        for i in 0..max_d {
            out.push(',');
            if let Some(x) = r.inputs.x.get(i) {
                out.push_str(&format!("{x}"));
            }
        }
        out.push_str(&format!(
            ",{},{},{},{},{},{},{}\n",
            r.inputs.r,
            r.observed,
            r.expected,
            r.residual,
            r.tolerance,
            r.verdict,
            provenance_str(r.expected_provenance)
        ));
    }
    out
}

/// Parse a CSV batch produced by [`reports_to_csv`].
pub fn reports_from_csv(text: &str) -> Result<Vec<VerificationReport>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("empty report CSV".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let x_count = columns.iter().filter(|c| c.starts_with('x') && c[1..].parse::<usize>().is_ok()).count();
    let expected_cols = 11 + x_count;
    if columns.len() != expected_cols || columns[0] != "check_id" {
        return Err(Error::Config(format!("unrecognized report CSV header `{header}`")));
    }

    let parse_f64 = |s: &str, what: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| Error::Config(format!("bad {what} value `{s}` in report CSV")))
    };

    let mut reports = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_cols {
            return Err(Error::Config(format!("malformed report CSV row `{line}`")));
        }
        let d: usize = fields[2]
            .parse()
            .map_err(|_| Error::Config(format!("bad dimension `{}` in report CSV", fields[2])))?;
        let mu = if fields[3].is_empty() { None } else { Some(parse_f64(fields[3], "mu")?) };
        let mut x = Vec::new();
        for i in 0..x_count {
            let cell = fields[4 + i];
            if !cell.is_empty() {
                x.push(parse_f64(cell, "coordinate")?);
            }
        }
        let base = 4 + x_count;
        let verdict = match fields[base + 5] {
            "pass" => Verdict::Pass,
            "fail" => Verdict::Fail,
            other => return Err(Error::Config(format!("unknown verdict `{other}`"))),
        };
        let report = VerificationReport {
            check_id: fields[0].to_string(),
            inputs: CheckInputs {
                label: fields[1].to_string(),
                x,
                r: parse_f64(fields[base], "radius")?,
                d,
                mu,
            },
            observed: parse_f64(fields[base + 1], "observed")?,
            expected: parse_f64(fields[base + 2], "expected")?,
            residual: parse_f64(fields[base + 3], "residual")?,
            tolerance: parse_f64(fields[base + 4], "tolerance")?,
            verdict,
            expected_provenance: provenance_parse(fields[base + 6])?,
        };
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvp::{CheckInputs, Provenance, VerificationReport};

    fn sample_reports() -> Vec<VerificationReport> {
        vec![
            VerificationReport::new(
                "lemma",
                CheckInputs {
                    label: "exp_sin".into(),
                    x: vec![0.1, -0.2, 0.05],
                    r: 0.6,
                    d: 3,
                    mu: None,
                },
                0.463_452_111_222_333,
                0.463_452_111_222_331,
                1e-9,
                Provenance::Lemma,
            ),
            VerificationReport::new(
                "theorem1",
                CheckInputs { label: "exp_plane".into(), x: vec![0.0, 0.0], r: 1.0, d: 2, mu: Some(1.0) },
                0.532_131_755_504_016_7,
                0.532_131_755_504_017_8,
                1e-8,
                Provenance::Theorem1,
            ),
            VerificationReport::new(
                "a_monotone",
                CheckInputs { label: "weight_coeff_a".into(), x: vec![], r: 0.0, d: 0, mu: None },
                0.0,
                0.0,
                0.0,
                Provenance::Oracle,
            ),
        ]
    }

    #[test]
    fn json_round_trip() {
        let reports = sample_reports();
        let text = reports_to_json(&reports);
        let back = reports_from_json(&text).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn csv_round_trip() {
        let reports = sample_reports();
        let text = reports_to_csv(&reports);
        let back = reports_from_csv(&text).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn csv_header_shape() {
        let text = reports_to_csv(&sample_reports());
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "check_id,label,d,mu,x0,x1,x2,r,observed,expected,residual,tolerance,verdict,provenance"
        );
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(reports_from_json("{not json").is_err());
        assert!(reports_from_csv("").is_err());
        assert!(reports_from_csv("bogus,header\n1,2").is_err());
    }

    proptest::proptest! {
        /// Round-trips are value-exact for both formats, including
        /// subnormals and extreme magnitudes.
        #[test]
        fn round_trips_preserve_floats(
            observed in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
            expected in proptest::num::f64::NORMAL,
            r in 0.0..10.0f64,
            mu in proptest::option::of(-5.0..5.0f64),
        ) {
            let report = VerificationReport::new(
                "prop",
                CheckInputs { label: "field".into(), x: vec![r / 2.0, -r], r, d: 2, mu },
                observed,
                expected,
                1e-9,
                Provenance::Normalization,
            );
            let reports = vec![report];
            let json = reports_from_json(&reports_to_json(&reports)).unwrap();
            proptest::prop_assert_eq!(&json, &reports);
            let csv = reports_from_csv(&reports_to_csv(&reports)).unwrap();
            proptest::prop_assert_eq!(&csv, &reports);
        }
    }
}
