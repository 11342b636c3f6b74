//! Plain-text tables for reports. Floats use six significant digits unless
//! `verbose` is set, in which case the shortest round-trip form is printed.

use serde_json::Value;
use std::fmt::Write;

fn num(v: &Value, verbose: bool) -> String {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().unwrap_or(f64::NAN);
            if verbose {
                format!("{f:?}")
            } else if f != 0.0 && (f.abs() < 1e-3 || f.abs() >= 1e6) {
                format!("{f:.5e}")
            } else {
                trim(format!("{f:.6}"))
            }
        }
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "-".into(),
        Value::Array(a) => format!("({})", a.iter().map(|x| num(x, verbose)).collect::<Vec<_>>().join(", ")),
        Value::Object(_) => v.to_string(),
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        s
    }
}

fn table(out: &mut String, title: &str, rows: &[(String, String)]) {
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let _ = writeln!(out, "{title}");
    for (k, v) in rows {
        let pad = w - k.chars().count();
        let _ = writeln!(out, "  {k}{}  {v}", " ".repeat(pad));
    }
}

fn row(k: &str, v: &Value, verbose: bool) -> (String, String) {
    (k.to_string(), num(v, verbose))
}

fn root_list(v: &Value, verbose: bool) -> String {
    match v.as_array() {
        Some(a) if !a.is_empty() => a.iter().map(|x| num(x, verbose)).collect::<Vec<_>>().join(" "),
        _ => "(none)".into(),
    }
}

/// Renders a report or error value as a table.
pub fn render_report(report: &Value, verbose: bool) -> String {
    let mut out = String::new();
    if let Some(err) = report.get("error") {
        let mut rows = vec![("error".to_string(), num(err, verbose))];
        if let Some(m) = report.get("message") {
            rows.push(("message".into(), num(m, verbose)));
        }
        for (k, v) in report.as_object().into_iter().flatten() {
            if !matches!(k.as_str(), "error" | "message" | "schema") {
                rows.push(row(k, v, verbose));
            }
        }
        table(&mut out, "error", &rows);
        return out;
    }
    let cmd = report.get("command").and_then(Value::as_str).unwrap_or("");
    let g = |k: &str| report.get(k).unwrap_or(&Value::Null);
    match cmd {
        "cone-cert" => {
            let rows: Vec<_> = [("r", "r"), ("C", "C"), ("λ", "lambda"), ("δ0", "delta0"), ("T", "T")]
                .iter()
                .map(|(label, key)| row(label, g(key), verbose))
                .collect();
            table(&mut out, "cone constants", &rows);
            table(&mut out, "power", &[row("N", g("N"), verbose), row("kind", g("kind"), verbose)]);
            let ineq: Vec<_> = g("inequalities")
                .as_array()
                .into_iter()
                .flatten()
                .map(|i| {
                    (
                        i.get("name").and_then(Value::as_str).unwrap_or("?").to_string(),
                        format!(
                            "{} vs {} slack {}",
                            num(i.get("lhs").unwrap_or(&Value::Null), verbose),
                            num(i.get("rhs").unwrap_or(&Value::Null), verbose),
                            num(i.get("slack").unwrap_or(&Value::Null), verbose)
                        ),
                    )
                })
                .collect();
            table(&mut out, "inequalities", &ineq);
            if let Some(v) = report.get("verification") {
                table(
                    &mut out,
                    "verification",
                    &[
                        row("samples", v.get("samples").unwrap_or(&Value::Null), verbose),
                        row("violations", v.get("violations").unwrap_or(&Value::Null), verbose),
                    ],
                );
            }
        }
        "nonres" => {
            table(
                &mut out,
                "resonance",
                &[
                    ("family".into(), format!("{}{}", num(g("family"), verbose), num(g("rank"), verbose))),
                    ("resonant".into(), root_list(g("resonant"), verbose)),
                    ("nonresonant".into(), root_list(g("nonresonant"), verbose)),
                    row("classification", g("classification"), verbose),
                ],
            );
        }
        "semiconj" => {
            let mut rows = vec![
                row("residual", g("residual_sup"), verbose),
                row("K", g("series_terms_used"), verbose),
                ("grid".into(), root_list_x(g("grid_shape"))),
                row("rate", g("rate"), verbose),
                row("kappa", g("kappa"), verbose),
            ];
            if let Some(o) = report.get("oracle") {
                rows.push(row("oracle residual", o.get("residual").unwrap_or(&Value::Null), verbose));
            }
            if let Some(p) = report.get("w_path") {
                rows.push(row("w", p, verbose));
            }
            table(&mut out, "semiconjugacy", &rows);
        }
        _ => {
            let rows: Vec<_> = report
                .as_object()
                .into_iter()
                .flatten()
                .filter(|(k, _)| !matches!(k.as_str(), "schema" | "command"))
                .map(|(k, v)| row(k, v, verbose))
                .collect();
            table(&mut out, cmd, &rows);
        }
    }
    out
}

fn root_list_x(v: &Value) -> String {
    v.as_array()
        .map(|a| a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("×"))
        .unwrap_or_else(|| "-".into())
}
