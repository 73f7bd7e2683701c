//! Run reports: the JSON document and its Markdown projection.

use serde::Serialize;
use serde_json::Value;

use monadforge_core::certify::{Certificate, Status};

use crate::config::InstanceConfig;

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
    pub parallel: bool,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self {
            name: "monadforge",
            version: env!("CARGO_PKG_VERSION"),
            parallel: monadforge_core::exec::is_parallel(),
        }
    }
}

/// Everything produced by one `certify` run. The echoed `config` includes
/// command-line overrides, so it re-runs the same computation.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    pub input_sha256: String,
    pub config: InstanceConfig,
    pub status: Status,
    pub certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    s.replace('|', "\\|")
}

fn kv_cells(map: Option<&Value>) -> String {
    match map.and_then(Value::as_object) {
        Some(m) if !m.is_empty() => m
            .iter()
            .map(|(k, v)| format!("`{k}` = `{}`", cell(v)))
            .collect::<Vec<_>>()
            .join("<br>"),
        _ => String::new(),
    }
}

/// Renders a serialized [`RunReport`]. Only values present in `report` are
/// printed.
pub fn markdown(report: &Value) -> String {
    let mut out = String::new();
    let cfg = &report["config"];
    out.push_str("# monadforge certificate\n\n");
    out.push_str(&format!("- status: **{}**\n", cell(&report["status"])));
    out.push_str(&format!(
        "- tool: {} {}\n",
        cell(&report["tool"]["name"]),
        cell(&report["tool"]["version"])
    ));
    out.push_str(&format!("- input sha256: `{}`\n", cell(&report["input_sha256"])));
    out.push_str(&format!(
        "- instance: s = {}, n = {}, alpha = {}, k = {}\n",
        cell(&cfg["s"]),
        cell(&cfg["n"]),
        cell(&cfg["alpha"]),
        cell(&cfg["k"])
    ));
    out.push_str(&format!(
        "- prime {}, seed {}, trials {}, budget {}\n",
        cell(&cfg["prime"]),
        cell(&cfg["seed"]),
        cell(&cfg["trials"]),
        cell(&cfg["budget"])
    ));
    if let Some(t) = report.get("timing_ms") {
        out.push_str(&format!("- wall time: {} ms\n", cell(t)));
    }
    for cert in report["certificates"].as_array().into_iter().flatten() {
        out.push_str(&format!(
            "\n## {}: {}\n\n{}\n\n",
            cell(&cert["claim"]),
            cell(&cert["status"]),
            cell(&cert["statement"])
        ));
        if let Some(inst) = cert.get("instance") {
            for key in ["source", "middle", "target"] {
                if let Some(parts) = inst.get(key).and_then(Value::as_array) {
                    let text: Vec<String> = parts
                        .iter()
                        .map(|p| format!("O{}^{}", cell(&p["twist"]), cell(&p["multiplicity"])))
                        .collect();
                    out.push_str(&format!("- {key}: {}\n", text.join(" + ")));
                }
            }
            out.push('\n');
        }
        out.push_str("| step | required | status | rule | inputs | values |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for step in cert["steps"].as_array().into_iter().flatten() {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                cell(&step["id"]),
                cell(&step["required"]),
                cell(&step["status"]),
                cell(&step["rule"]),
                kv_cells(step.get("inputs")),
                kv_cells(step.get("values"))
            ));
        }
        if let Some(w) = cert.get("witness") {
            out.push_str(&format!("\nwitness: `{}`\n", cell(w)));
        }
    }
    out
}

/// Exit code for an aggregated status.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Verified => 0,
        Status::Falsified => 1,
        Status::Inconclusive => 2,
    }
}
