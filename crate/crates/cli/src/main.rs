mod columns;
mod sweep;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nsit_core::scenarios::{by_name, scenario_from_json, Evaluation, SCENARIO_NAMES};
use nsit_core::verify::{verify, VerifyOptions, VerifyReport, CHECK_NAMES};
use nsit_core::{Named64, SearchConfig};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use sweep::{run_sweep, SweepRow, SweepSpec};

#[derive(Parser)]
#[command(name = "nsit", version, about = "Coherence witnesses for open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// `name=value`; repeatable.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one named or JSON-described scenario against its expected values.
    Run {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        scenario: Option<String>,
        /// Scenario JSON document.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a scenario family over a parameter range.
    Sweep {
        /// Sweep JSON document.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long)]
        only: Option<String>,
        /// Dimension for the dimension-indexed checks; repeatable.
        #[arg(long = "dim")]
        dims: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// List scenario and check names.
    List {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Input(String),
    Io(String),
}

impl From<nsit_core::Error> for Failure {
    fn from(e: nsit_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn parse_tolerances(raw: &[String]) -> CliResult<BTreeMap<String, f64>> {
    raw.iter()
        .map(|item| {
            let (name, value) =
                item.split_once('=').ok_or_else(|| Failure::Usage(format!("tolerance {item:?} is not NAME=VALUE")))?;
            let value: f64 =
                value.parse().map_err(|_| Failure::Usage(format!("tolerance {item:?} has a non-numeric value")))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, bytes: &[u8]) -> CliResult<()> {
    let result = match output {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    result.map_err(|e| Failure::Io(e.to_string()))
}

fn json_bytes<S: Serialize>(value: &S) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, f64)>) {
    match value {
        Value::Number(n) => out.push((prefix.to_string(), n.as_f64().unwrap_or(f64::NAN))),
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&path, v, out);
            }
        }
        _ => {}
    }
}

fn load_scenario(scenario: Option<String>, config: Option<PathBuf>) -> CliResult<Named64> {
    match (scenario, config) {
        (Some(name), _) => Ok(by_name(&name)?),
        (None, Some(path)) => Ok(scenario_from_json(&read_file(&path)?)?),
        (None, None) => Err(Failure::Usage("run needs --scenario or --config".into())),
    }
}

fn cmd_run(scenario: Option<String>, config: Option<PathBuf>, common: Common) -> CliResult<bool> {
    let overrides = parse_tolerances(&common.tolerances)?;
    let mut named = load_scenario(scenario, config)?;
    for (quantity, tol) in &overrides {
        let mut hit = false;
        for e in named.expected.iter_mut().filter(|e| &e.quantity == quantity) {
            e.tolerance = *tol;
            hit = true;
        }
        if !hit {
            return Err(Failure::Usage(format!("scenario {} has no expected quantity {quantity:?}", named.name)));
        }
    }
    let eval: Evaluation<f64> = named.evaluate(&SearchConfig::default().with_seed(common.seed))?;
    let bytes = match common.format {
        Format::Json => json_bytes(&eval)?,
        Format::Csv => {
            let report = serde_json::to_value(&eval.report).map_err(|e| Failure::Io(e.to_string()))?;
            let mut fields = Vec::new();
            flatten("", &report, &mut fields);
            let report_rows = fields.into_iter().map(|(q, v)| {
                vec!["report".into(), q, v.to_string(), String::new(), String::new(), String::new(), String::new()]
            });
            let check_rows = eval.checks.iter().map(|c| {
                vec![
                    "check".into(),
                    c.quantity.clone(),
                    c.actual.map(|v| v.to_string()).unwrap_or_default(),
                    c.expected.to_string(),
                    c.tolerance.to_string(),
                    serde_json::to_value(c.provenance).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    c.passed.to_string(),
                ]
            });
            csv_bytes(&columns::header(columns::RUN), report_rows.chain(check_rows))?
        }
    };
    emit(&common.output, &bytes)?;
    for c in eval.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {} {}: expected {} got {:?}", eval.name, c.quantity, c.expected, c.actual);
    }
    Ok(eval.all_passed())
}

fn cmd_sweep(config: PathBuf, common: Common) -> CliResult<bool> {
    if !common.tolerances.is_empty() {
        return Err(Failure::Usage("sweep takes no tolerance overrides".into()));
    }
    let spec: SweepSpec = serde_json::from_str(&read_file(&config)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
    let rows: Vec<SweepRow> = run_sweep(&spec)?;
    let bytes = match common.format {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => csv_bytes(&columns::header(columns::SWEEP), rows.iter().map(SweepRow::cells))?,
    };
    emit(&common.output, &bytes)?;
    Ok(true)
}

fn verify_csv(report: &VerifyReport) -> CliResult<Vec<u8>> {
    let rows = report.checks.iter().flat_map(|c| {
        c.parts.iter().map(move |p| {
            vec![
                c.name.clone(),
                c.criterion.to_string(),
                p.label.clone(),
                p.class.clone(),
                serde_json::to_value(p.comparison).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                p.value.to_string(),
                p.target.to_string(),
                p.tolerance.to_string(),
                p.slack.to_string(),
                p.passed.to_string(),
            ]
        })
    });
    csv_bytes(&columns::header(columns::VERIFY), rows)
}

fn cmd_verify(only: Option<String>, dims: Vec<usize>, common: Common) -> CliResult<bool> {
    let opts = VerifyOptions {
        only,
        dims: (!dims.is_empty()).then_some(dims),
        tolerances: parse_tolerances(&common.tolerances)?,
        ..VerifyOptions::default()
    }
    .with_seed(common.seed);
    opts.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let report = verify(&opts)?;
    for c in &report.checks {
        eprintln!("{} {:>2} {:<18} slack={:e}", if c.passed { "PASS" } else { "FAIL" }, c.criterion, c.name, c.slack);
    }
    let bytes = match common.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => verify_csv(&report)?,
    };
    emit(&common.output, &bytes)?;
    Ok(report.passed)
}

fn cmd_list(format: Format, output: Option<PathBuf>) -> CliResult<bool> {
    let bytes = match format {
        Format::Json => json_bytes(&serde_json::json!({ "scenarios": SCENARIO_NAMES, "checks": CHECK_NAMES }))?,
        Format::Csv => {
            let rows = SCENARIO_NAMES
                .iter()
                .map(|n| vec!["scenario".to_string(), n.to_string()])
                .chain(CHECK_NAMES.iter().map(|n| vec!["check".to_string(), n.to_string()]));
            csv_bytes(&columns::header(columns::LIST), rows)?
        }
    };
    emit(&output, &bytes)?;
    Ok(true)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("nsit: usage: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Run { scenario, config, common } => cmd_run(scenario, config, common),
        Command::Sweep { config, common } => cmd_sweep(config, common),
        Command::Verify { only, dims, common } => cmd_verify(only, dims, common),
        Command::List { format, output } => cmd_list(format, output),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(failure) => {
            let (kind, msg) = match failure {
                Failure::Usage(m) => ("usage", m),
                Failure::Input(m) => ("input", m),
                Failure::Io(m) => ("io", m),
            };
            eprintln!("nsit: {kind}: {}", one_line(&msg));
            ExitCode::from(1)
        }
    }
}
