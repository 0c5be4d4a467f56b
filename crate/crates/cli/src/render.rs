use std::fmt::Write;

use latent_groups::posterior::SchemeProbability;
use latent_groups::SelectionReport;
use serde_json::{json, Map, Value};

/// `x` to seven significant digits, switching to exponent notation outside
/// `[1e-4, 1e7)` with a two-digit signed exponent.
pub fn sig7(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // The exponent after rounding to seven digits decides the layout.
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..7).contains(&exp) {
        let decimals = (6 - exp) as usize;
        return format!("{x:.decimals$}");
    }
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn scheme_cell(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("None")
}

fn scheme_table(out: &mut String, header: &str, rows: &[SchemeProbability]) {
    writeln!(out, "{header}\tProbability").unwrap();
    for r in rows {
        writeln!(out, "{}\t{}", scheme_cell(&r.scheme), sig7(r.probability)).unwrap();
    }
}

pub fn table(report: &SelectionReport, show: &[usize]) -> String {
    let mut out = String::new();
    writeln!(out, "Index\tModel\tScheme.beta\tScheme.Sigma\tLog-Marginal\tModPrior\tFModProb\tCumulative").unwrap();
    for m in &report.models {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.model_index,
            m.formula,
            scheme_cell(&m.scheme_beta),
            scheme_cell(&m.scheme_sigma),
            sig7(m.log_marginal),
            sig7(m.prior),
            sig7(m.posterior),
            sig7(m.cumulative)
        )
        .unwrap();
    }
    out.push('\n');
    scheme_table(&mut out, "Scheme.beta", &report.scheme_probabilities_beta);
    out.push('\n');
    scheme_table(&mut out, "Scheme.Sigma", &report.scheme_probabilities_sigma);
    for &i in show {
        let e = report.estimates_for(i).expect("index validated");
        let m = report.model(i).expect("index validated");
        writeln!(out, "\nEstimates for model {i}\t{}", m.formula).unwrap();
        writeln!(out, "Coefficient\tEstimate").unwrap();
        for (label, v) in &e.coefficients {
            writeln!(out, "{label}\t{}", v.map_or_else(|| "NA".to_string(), sig7)).unwrap();
        }
        writeln!(out, "Variance\tEstimate").unwrap();
        for (label, v) in &e.variances {
            writeln!(out, "{label}\t{}", sig7(*v)).unwrap();
        }
        if let Some(g) = e.g {
            writeln!(out, "g\t{}", sig7(g)).unwrap();
        }
    }
    writeln!(out, "\nm0\t{}\nb\t{}", report.m0, sig7(report.b)).unwrap();
    out
}

fn scheme_json(rows: &[SchemeProbability]) -> Value {
    rows.iter().map(|r| json!({ "scheme": r.scheme, "probability": r.probability })).collect()
}

/// One JSON document; numbers keep full precision.
pub fn json(report: &SelectionReport) -> String {
    let models: Vec<Value> = report
        .models
        .iter()
        .map(|m| {
            json!({
                "index": m.model_index,
                "model": m.formula,
                "heteroscedastic": m.heteroscedastic,
                "scheme_beta": m.scheme_beta,
                "scheme_sigma": m.scheme_sigma,
                "log_marginal": m.log_marginal,
                "mod_prior": m.prior,
                "fmodprob": m.posterior,
                "cumulative": m.cumulative,
            })
        })
        .collect();
    let mut coefficients = Map::new();
    let mut variances = Map::new();
    let mut gs = Map::new();
    for e in &report.estimates {
        let key = e.model_index.to_string();
        let c: Map<String, Value> = e.coefficients.iter().map(|(l, v)| (l.clone(), json!(v))).collect();
        coefficients.insert(key.clone(), Value::Object(c));
        let v: Map<String, Value> = e.variances.iter().map(|(l, v)| (l.clone(), json!(v))).collect();
        variances.insert(key.clone(), Value::Object(v));
        if let Some(g) = e.g {
            gs.insert(key, json!(g));
        }
    }
    let doc = json!({
        "models": models,
        "scheme_probabilities_beta": scheme_json(&report.scheme_probabilities_beta),
        "scheme_probabilities_Sigma": scheme_json(&report.scheme_probabilities_sigma),
        "coefficients": coefficients,
        "variances": variances,
        "gs": gs,
        "m0_final": report.m0,
        "b_final": report.b,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
