//! CSV and JSON serialization of catalogs and verification reports.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which round-trips
//! every binary64 value. In JSON they are strings so that no parser rounds
//! them on the way in.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verify::{BoundIteration, Comparison, Report};
use crate::zerofinder::{Constants, ZeroRecord};

pub const CSV_HEADER: &str =
    "c,d,a,b,x_pred1,y_pred1,x_pred2,y_pred2,x_refined,y_refined,residual,theta_scaled,newton_iters";

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn generated_by() -> String {
    format!("e2zeros {}", env!("CARGO_PKG_VERSION"))
}

pub fn catalog_csv(catalog: &[ZeroRecord]) -> Result<String> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let mut out = String::with_capacity(256 * (catalog.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in catalog {
        let g = &r.matrix;
        let reals = [
            r.predicted1.re,
            r.predicted1.im,
            r.predicted2.re,
            r.predicted2.im,
            r.refined.re,
            r.refined.im,
            r.residual,
            r.theta_scaled,
        ];
        let mut fields = vec![g.c.to_string(), g.d.to_string(), g.a.to_string(), g.b.to_string()];
        fields.extend(reals.iter().map(|&x| fmt17(x)));
        fields.push(r.newton_iters.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(catalog: &[ZeroRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, catalog_csv(catalog)?)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ConstantsDoc {
    v0: String,
    lambda0: String,
    strip_eps: String,
}

impl From<Constants> for ConstantsDoc {
    fn from(k: Constants) -> Self {
        ConstantsDoc {
            v0: fmt17(k.v0),
            lambda0: fmt17(k.lambda0),
            strip_eps: fmt17(k.strip_eps),
        }
    }
}

#[derive(Debug, Serialize)]
struct RecordDoc {
    c: i64,
    d: i64,
    a: i64,
    b: i64,
    x_pred1: String,
    y_pred1: String,
    x_pred2: String,
    y_pred2: String,
    x_refined: String,
    y_refined: String,
    x_strip: String,
    y_strip: String,
    residual: String,
    residual_bound: String,
    theta_scaled: String,
    newton_iters: usize,
}

impl From<&ZeroRecord> for RecordDoc {
    fn from(r: &ZeroRecord) -> Self {
        RecordDoc {
            c: r.matrix.c,
            d: r.matrix.d,
            a: r.matrix.a,
            b: r.matrix.b,
            x_pred1: fmt17(r.predicted1.re),
            y_pred1: fmt17(r.predicted1.im),
            x_pred2: fmt17(r.predicted2.re),
            y_pred2: fmt17(r.predicted2.im),
            x_refined: fmt17(r.refined.re),
            y_refined: fmt17(r.refined.im),
            x_strip: fmt17(r.strip_point.re),
            y_strip: fmt17(r.strip_point.im),
            residual: fmt17(r.residual),
            residual_bound: fmt17(r.residual_bound),
            theta_scaled: fmt17(r.theta_scaled),
            newton_iters: r.newton_iters,
        }
    }
}

#[derive(Debug, Serialize)]
struct CatalogDoc {
    constants: ConstantsDoc,
    records: Vec<RecordDoc>,
    generated_by: String,
}

#[derive(Debug, Serialize)]
struct CheckDoc {
    name: String,
    measured: String,
    threshold: String,
    comparison: Comparison,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct ChainDoc {
    step: usize,
    y_min: String,
    e2_minus_1_bound: String,
    y_deviation_bound: String,
    rounded_deviation: String,
    n_terms_used: usize,
}

#[derive(Debug, Serialize)]
struct ReportDoc {
    constants: ConstantsDoc,
    checks: Vec<CheckDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    strip_chain: Vec<ChainDoc>,
    passed: bool,
    method: &'static str,
    generated_by: String,
}

pub fn catalog_json(catalog: &[ZeroRecord]) -> Result<String> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let doc = CatalogDoc {
        constants: Constants::get().into(),
        records: catalog.iter().map(RecordDoc::from).collect(),
        generated_by: generated_by(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn report_json(report: &Report, chain: &[BoundIteration]) -> Result<String> {
    let doc = ReportDoc {
        constants: Constants::get().into(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckDoc {
                name: c.name.clone(),
                measured: fmt17(c.measured),
                threshold: fmt17(c.threshold),
                comparison: c.comparison,
                passed: c.passed,
            })
            .collect(),
        strip_chain: chain
            .iter()
            .map(|it| ChainDoc {
                step: it.step,
                y_min: fmt17(it.y_min),
                e2_minus_1_bound: fmt17(it.e2_minus_1_bound),
                y_deviation_bound: fmt17(it.y_deviation_bound),
                rounded_deviation: fmt17(it.rounded_deviation),
                n_terms_used: it.n_terms_used,
            })
            .collect(),
        passed: report.all_passed(),
        method: "binary64 floating-point replication; not interval arithmetic",
        generated_by: generated_by(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn write_catalog_json(catalog: &[ZeroRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, catalog_json(catalog)?)?;
    Ok(())
}

pub fn write_report_json(report: &Report, chain: &[BoundIteration], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, report_json(report, chain)?)?;
    Ok(())
}
