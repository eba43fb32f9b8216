use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use toric_cli::{render, run_batch, run_job, Config};

#[derive(Parser)]
#[command(name = "toric", version, about = "Exact toric geometry, monoid and Laurent-matrix computations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON input file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Inline JSON input.
    #[arg(long, global = true, conflicts_with = "input")]
    json: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    cap_stage: Option<usize>,
    #[arg(long, global = true)]
    cap_degree: Option<u64>,
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Worker threads for batch mode.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum WittOp {
    Add,
    Star,
    Ghost,
    FromGhost,
    Expand,
    Degree,
}

#[derive(Subcommand)]
enum Cmd {
    Hilbert,
    Normalize,
    Seminormalize,
    Interior,
    Region,
    InvertExtremal,
    Stage,
    ExcisionWitness,
    CheckPyramidal,
    CheckPolarized,
    Antipode,
    ApproxB,
    BipyramidApprox,
    Birkhoff,
    Interval,
    Koszul,
    Equivalent,
    LambdaCheck,
    TildeC,
    Witt {
        /// May instead come from the JSON input as `op`.
        #[arg(value_enum)]
        op: Option<WittOp>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        /// Ghost components, comma separated.
        #[arg(long)]
        v: Option<String>,
        #[arg(long)]
        m: Option<usize>,
    },
    ClassifyP,
    EnumerateTypes {
        #[arg(long)]
        r: Option<usize>,
    },
    Corner,
    /// Runs a JSON array of `{"command", "input", "config"?}` jobs.
    Batch,
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Hilbert => "hilbert",
        Cmd::Normalize => "normalize",
        Cmd::Seminormalize => "seminormalize",
        Cmd::Interior => "interior",
        Cmd::Region => "region",
        Cmd::InvertExtremal => "invert-extremal",
        Cmd::Stage => "stage",
        Cmd::ExcisionWitness => "excision-witness",
        Cmd::CheckPyramidal => "check-pyramidal",
        Cmd::CheckPolarized => "check-polarized",
        Cmd::Antipode => "antipode",
        Cmd::ApproxB => "approx-b",
        Cmd::BipyramidApprox => "bipyramid-approx",
        Cmd::Birkhoff => "birkhoff",
        Cmd::Interval => "interval",
        Cmd::Koszul => "koszul",
        Cmd::Equivalent => "equivalent",
        Cmd::LambdaCheck => "lambda-check",
        Cmd::TildeC => "tilde-c",
        Cmd::Witt { .. } => "witt",
        Cmd::ClassifyP => "classify-p",
        Cmd::EnumerateTypes { .. } => "enumerate-types",
        Cmd::Corner => "corner",
        Cmd::Batch => "batch",
    }
}

fn load_input(cli: &Cli) -> Result<Option<Value>, String> {
    let text = match (&cli.input, &cli.json) {
        (Some(p), _) => std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
        (None, Some(s)) => s.clone(),
        (None, None) => return Ok(None),
    };
    serde_json::from_str(&text).map(Some).map_err(|e| format!("malformed JSON: {e}"))
}

fn input_error(command: &str, cfg: &Config, msg: String) -> Value {
    json!({
        "schema": toric_cli::SCHEMA,
        "version": toric_cli::VERSION,
        "command": command,
        "config": cfg,
        "status": "error",
        "error": { "kind": "input", "message": msg },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let d = Config::default();
    let cfg = Config {
        seed: cli.seed.unwrap_or(d.seed),
        cap_stage: cli.cap_stage.unwrap_or(d.cap_stage),
        cap_degree: cli.cap_degree.unwrap_or(d.cap_degree),
        truncation: cli.truncation.unwrap_or(d.truncation),
    };
    let name = command_name(&cli.cmd);
    let table = cli.format == Format::Table;
    let emit = |v: &Value, code: u8| -> ExitCode {
        print!("{}", render(v, table));
        ExitCode::from(code)
    };
    let loaded = match load_input(&cli) {
        Ok(v) => v,
        Err(m) => return emit(&input_error(name, &cfg, m), 2),
    };
    if let Cmd::Batch = cli.cmd {
        let Some(jobs) = loaded else {
            return emit(&input_error(name, &cfg, "batch needs --input or --json".into()), 2);
        };
        return match run_batch(&jobs, &cfg, cli.threads) {
            Ok(reports) => {
                let code = reports.iter().map(|r| r.exit_code()).max().unwrap_or(0);
                if table {
                    for r in &reports {
                        print!("{}", render(&r.value, true));
                    }
                } else {
                    let all = Value::Array(reports.into_iter().map(|r| r.value).collect());
                    print!("{}", render(&all, false));
                }
                ExitCode::from(code as u8)
            }
            Err(m) => emit(&input_error(name, &cfg, m), 2),
        };
    }
    let mut obj = match loaded {
        Some(Value::Object(o)) => o,
        Some(_) => return emit(&input_error(name, &cfg, "input must be a JSON object".into()), 2),
        None => Map::new(),
    };
    match &cli.cmd {
        Cmd::Witt { op, f, g, v, m } => {
            if let Some(op) = op {
                let op = op.to_possible_value().expect("no skipped variants").get_name().to_string();
                obj.insert("op".into(), json!(op));
            }
            if let Some(f) = f {
                obj.insert("f".into(), json!(f));
            }
            if let Some(g) = g {
                obj.insert("g".into(), json!(g));
            }
            if let Some(v) = v {
                obj.insert("v".into(), json!(v.split(',').map(|x| x.trim().to_string()).collect::<Vec<_>>()));
            }
            if let Some(m) = m {
                obj.insert("m".into(), json!(m));
            }
        }
        Cmd::EnumerateTypes { r: Some(r) } => {
            obj.insert("r".into(), json!(r));
        }
        _ => {}
    }
    let report = run_job(name, &Value::Object(obj), &cfg);
    emit(&report.value, report.exit_code() as u8)
}
