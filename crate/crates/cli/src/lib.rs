//! Job execution for the `toric` binary: every command maps a JSON input object to a versioned
//! JSON report and an exit code (0 verified/ok, 1 verified-false, 2 error).

pub mod commands;
pub mod input;
pub mod output;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use toric_core::Error;

pub const SCHEMA: u64 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MAX_TRUNCATION: usize = 64;

/// Tunable search bounds; every field is echoed into the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    pub cap_stage: usize,
    pub cap_degree: u64,
    pub truncation: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 0, cap_stage: 24, cap_degree: 64, truncation: 12 }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        if !(1..=256).contains(&self.cap_stage) {
            return Err(format!("cap-stage {} outside 1..=256", self.cap_stage));
        }
        if !(1..=1_000_000).contains(&self.cap_degree) {
            return Err(format!("cap-degree {} outside 1..=1000000", self.cap_degree));
        }
        if !(1..=MAX_TRUNCATION).contains(&self.truncation) {
            return Err(format!("truncation {} outside 1..={MAX_TRUNCATION}", self.truncation));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    False,
    Error,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub status: Status,
    pub value: Value,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::False => 1,
            Status::Error => 2,
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) => "input",
        Error::RankMismatch { .. } => "rank-mismatch",
        Error::NotPointed | Error::Precondition(_) => "precondition",
        Error::CapExceeded(_) => "cap-exceeded",
        Error::Geometry(_) => "geometry",
    }
}

fn envelope(command: &str, cfg: &Config, status: Status) -> Value {
    json!({ "schema": SCHEMA, "version": VERSION, "command": command, "config": cfg, "status": status })
}

fn error_report(command: &str, cfg: &Config, kind: &str, message: String) -> Report {
    let mut v = envelope(command, cfg, Status::Error);
    v["error"] = json!({ "kind": kind, "message": message });
    Report { status: Status::Error, value: v }
}

/// Runs one command on its input object.
pub fn run_job(command: &str, input: &Value, cfg: &Config) -> Report {
    if let Err(m) = cfg.validate() {
        return error_report(command, cfg, "config", m);
    }
    if let Some(s) = input.get("schema") {
        if s != &json!(SCHEMA) {
            return error_report(command, cfg, "input", format!("unsupported schema {s}"));
        }
    }
    let mut body = input.clone();
    if let Value::Object(map) = &mut body {
        map.remove("schema");
    }
    match commands::dispatch(command, &body, cfg) {
        Ok(o) => {
            let status = if o.verified { Status::Ok } else { Status::False };
            let mut v = envelope(command, cfg, status);
            v["result"] = o.result;
            v["clauses"] = json!(o.clauses);
            Report { status, value: v }
        }
        Err(e) => error_report(command, cfg, error_kind(&e), e.to_string()),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub command: String,
    pub input: Value,
    #[serde(default)]
    pub config: Option<Config>,
}

/// Runs a batch in parallel; reports keep the job order. Jobs without their own `config` use `base`.
pub fn run_batch(jobs: &Value, base: &Config, threads: Option<usize>) -> Result<Vec<Report>, String> {
    let list = match jobs {
        Value::Array(a) => a.clone(),
        Value::Object(o) if o.contains_key("jobs") => {
            if o.get("schema").is_some_and(|s| s != &json!(SCHEMA)) {
                return Err("unsupported batch schema".into());
            }
            o["jobs"].as_array().cloned().ok_or("`jobs` must be an array")?
        }
        _ => return Err("a batch is a JSON array of jobs".into()),
    };
    let parsed: Vec<Job> = list.iter().map(|j| Job::deserialize(j).map_err(|e| format!("malformed job: {e}"))).collect::<Result<_, _>>()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    Ok(pool.install(|| parsed.par_iter().map(|j| run_job(&j.command, &j.input, &j.config.unwrap_or(*base))).collect()))
}

/// Human-readable rendering: clause lines, then the result fields.
pub fn render_table(v: &Value) -> String {
    let mut s = String::new();
    let cmd = v["command"].as_str().unwrap_or("?");
    s.push_str(&format!("{cmd}: {}\n", v["status"].as_str().unwrap_or("?")));
    if let Some(e) = v.get("error") {
        s.push_str(&format!("  error ({}): {}\n", e["kind"].as_str().unwrap_or(""), e["message"].as_str().unwrap_or("")));
    }
    if let Some(Value::Array(cl)) = v.get("clauses") {
        for c in cl {
            let pass = if c["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            s.push_str(&format!("  {}: {pass}\n", c["name"].as_str().unwrap_or("")));
        }
    }
    if let Some(Value::Object(r)) = v.get("result") {
        for (k, x) in r {
            match x {
                Value::Array(rows) if rows.iter().all(|r| r.is_array() || r.is_object()) && !rows.is_empty() => {
                    s.push_str(&format!("  {k}:\n"));
                    for row in rows {
                        s.push_str(&format!("    {}\n", compact(row)));
                    }
                }
                _ => s.push_str(&format!("  {k}: {}\n", compact(x))),
            }
        }
    }
    s
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(o) if o.contains_key("text") => compact(&o["text"]),
        other => other.to_string(),
    }
}

pub fn render(v: &Value, table: bool) -> String {
    if table {
        render_table(v)
    } else {
        let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
        s.push('\n');
        s
    }
}
