//! `stabdistill`: analyze, iterate, sweep and verify converted distillation protocols.
//!
//! Exit codes: 0 success, 1 a `verify` check failed, 2 input error, 3 capacity error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabdistill::densesim::{
    invariance_residual, lemma1_residuals, lemma2_check, run_protocol_dense, table1_overlaps, Encoder, Ensemble,
};
use stabdistill::io::{self, round_json, round_sig};
use stabdistill::protocol::{analyze, iterate, AcceptPolicy, ConvertedProtocol, Decoder};
use stabdistill::rates::{comparison_sweep, fidelity_grid};
use stabdistill::{parse, presets, BellDiagState, DecodeTable, Error, StabilizerCode};

const DIGITS: usize = 12;
const RESIDUAL_TOL: f64 = 1e-10;
const OVERLAP_BOUND: f64 = 0.75;
const ORACLE_SAMPLES: usize = 10;

#[derive(Parser)]
#[command(name = "stabdistill", version, about = "Entanglement distillation protocols from stabilizer codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One protocol round on a Bell-diagonal input; prints a JSON report.
    Analyze(RunArgs),
    /// Repeated rounds on the accepted output; prints a JSON trace.
    Iterate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
    /// Best iterate-then-hash yield over a fidelity grid of Werner inputs.
    Sweep(SweepArgs),
    /// Dense-simulation checks of a code; exit 0 iff all pass.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Built-in code: recurrence, qpa or xxxx-zzzz.
    #[arg(long, conflicts_with = "code_file")]
    preset: Option<String>,
    /// Generator file (see docs/formats.md).
    #[arg(long)]
    code_file: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Input of i.i.d. pairs with weight F on the reference Bell state.
    #[arg(long, conflicts_with = "state_file")]
    werner_converted: Option<f64>,
    /// Bell-diagonal input state as JSON.
    #[arg(long)]
    state_file: Option<PathBuf>,
    /// oneway, zero-syndrome or threshold=θ.
    #[arg(long, default_value = "zero-syndrome")]
    policy: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Presets to compare, in output order. Defaults to all three.
    #[arg(long)]
    preset: Vec<String>,
    /// Additional generator files, labelled by path.
    #[arg(long)]
    code_file: Vec<PathBuf>,
    /// start:stop:step, inclusive.
    #[arg(long, default_value = "0.70:0.90:0.01")]
    grid: String,
    /// Largest number of protocol rounds before hashing.
    #[arg(long, default_value_t = 6)]
    rounds: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Input(String),
    Capacity(String),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_capacity() {
            Failure::Capacity(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read_file(path: &PathBuf) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_code(args: &CodeArgs) -> Outcome<(String, StabilizerCode)> {
    match (&args.preset, &args.code_file) {
        (Some(name), _) => Ok((name.clone(), presets::preset(name)?)),
        (None, Some(path)) => Ok((path.display().to_string(), parse::parse_code(&read_file(path)?)?)),
        (None, None) => Err(Failure::Input("one of --preset or --code-file is required".into())),
    }
}

fn parse_policy(text: &str) -> Outcome<AcceptPolicy> {
    match text {
        "oneway" | "one-way" => Ok(AcceptPolicy::OneWay),
        "zero-syndrome" => Ok(AcceptPolicy::ZeroSyndrome),
        _ => match text.strip_prefix("threshold=").map(str::parse::<f64>) {
            Some(Ok(t)) => Ok(AcceptPolicy::Threshold(t)),
            _ => Err(Failure::Input(format!("unknown policy {text:?}"))),
        },
    }
}

/// `pairs` i.i.d. copies of the `--werner-converted` pair, or the state file.
fn load_state(run: &RunArgs, p: u32, pairs: usize) -> Outcome<BellDiagState<f64>> {
    let state = match (run.werner_converted, &run.state_file) {
        (Some(f), _) => {
            let pair = BellDiagState::isotropic(p, f)?;
            BellDiagState::tensor(&vec![pair; pairs])?
        }
        (None, Some(path)) => io::read_state(&read_file(path)?)?,
        (None, None) => return Err(Failure::Input("one of --werner-converted or --state-file is required".into())),
    };
    if state.p() != p || state.n() != pairs {
        return Err(Failure::Input(format!(
            "state covers {} pairs mod {}, expected {pairs} pairs mod {p}",
            state.n(),
            state.p()
        )));
    }
    Ok(state)
}

fn protocol(run: &RunArgs) -> Outcome<ConvertedProtocol> {
    let (_, code) = load_code(&run.code)?;
    Ok(ConvertedProtocol::new(code, Decoder::MostLikely, parse_policy(&run.policy)?)?)
}

fn json_text(mut value: serde_json::Value) -> String {
    round_json(&mut value, DIGITS);
    let mut text = serde_json::to_string_pretty(&value).expect("JSON value serializes");
    text.push('\n');
    text
}

fn num(x: f64) -> f64 {
    round_sig(x, DIGITS)
}

fn cmd_analyze(run: &RunArgs) -> Outcome<String> {
    let proto = protocol(run)?;
    let code = proto.code();
    let alpha = load_state(run, code.p(), code.n())?;
    let report = analyze(&proto, &alpha)?;
    Ok(match run.format {
        Format::Json => json_text(io::report_json(&report)),
        Format::Csv => {
            let mut out = String::from("syndrome,probability,accepted,fidelity\n");
            for r in &report.records {
                let s: Vec<String> = r.syndrome.entries().iter().map(u32::to_string).collect();
                writeln!(out, "{},{},{},{}", s.join(" "), num(r.probability), r.accepted, num(r.fidelity)).unwrap();
            }
            out
        }
    })
}

fn cmd_iterate(run: &RunArgs, rounds: usize) -> Outcome<String> {
    let proto = protocol(run)?;
    let code = proto.code();
    let initial = load_state(run, code.p(), code.k())?;
    let trace = iterate(&proto, &initial, rounds)?;
    Ok(match run.format {
        Format::Json => json_text(io::trace_json(&trace)),
        Format::Csv => {
            let mut out = String::from("round,accept_prob,fidelity,hashing_yield,net_yield\n");
            for r in &trace.records {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.round,
                    num(r.accept_prob),
                    num(r.fidelity),
                    num(r.hashing_yield),
                    num(r.net_yield)
                )
                .unwrap();
            }
            out
        }
    })
}

fn parse_grid(text: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::Input(format!("grid {text:?} is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| bad())?;
    }
    Ok(fidelity_grid(v[0], v[1], v[2])?)
}

fn cmd_sweep(args: &SweepArgs) -> Outcome<String> {
    let grid = parse_grid(&args.grid)?;
    let mut protos = Vec::new();
    let names: Vec<String> = if args.preset.is_empty() && args.code_file.is_empty() {
        presets::PRESET_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        args.preset.clone()
    };
    for name in names {
        protos.push((name.clone(), ConvertedProtocol::two_way(presets::preset(&name)?)));
    }
    for path in &args.code_file {
        let code = parse::parse_code(&read_file(path)?)?;
        protos.push((path.display().to_string(), ConvertedProtocol::two_way(code)));
    }
    let curves = comparison_sweep::<f64>(&protos, &grid, args.rounds)?;
    Ok(match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_sweep_csv(&curves, &mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Json => {
            let body: Vec<serde_json::Value> = curves
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "protocol": c.protocol,
                        "samples": c.samples.iter().map(|s| serde_json::json!({
                            "F": s.fidelity,
                            "best_rounds": s.best_rounds,
                            "net_yield": s.net_yield,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_text(serde_json::json!({
                "schema_version": io::SCHEMA_VERSION,
                "kind": "sweep",
                "max_rounds": args.rounds,
                "curves": body,
            }))
        }
    })
}

struct Table {
    rows: Vec<(String, String, bool)>,
}

impl Table {
    fn push(&mut self, check: impl Into<String>, value: impl Into<String>, pass: bool) {
        self.rows.push((check.into(), value.into(), pass));
    }

    fn render(&self, title: &str) -> String {
        let width = self.rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
        let mut out = format!("verify {title}\n");
        writeln!(out, "{:<width$}  {:<24}  status", "check", "value").unwrap();
        for (check, value, pass) in &self.rows {
            writeln!(out, "{check:<width$}  {value:<24}  {}", if *pass { "PASS" } else { "FAIL" }).unwrap();
        }
        let passed = self.rows.iter().filter(|r| r.2).count();
        writeln!(out, "{passed} of {} checks passed", self.rows.len()).unwrap();
        out
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome<String> {
    let (name, code) = load_code(&args.code)?;
    let mut table = Table { rows: Vec::new() };

    let lemma1 = max_of(lemma1_residuals::<f64>(&code)?);
    table.push("lemma1 max residual", format!("{lemma1:.3e}"), lemma1 < RESIDUAL_TOL);

    let encoder = Encoder::<f64>::canonical(&code)?;
    let invariance = invariance_residual(&encoder)?;
    table.push("encoder invariance residual", format!("{invariance:.3e}"), invariance < RESIDUAL_TOL);

    let lemma2 = lemma2_check::<f64>(&code, &DecodeTable::minimal(&code))?;
    table.push("lemma2 max_overlap", format!("{:.5}", lemma2.max_overlap), lemma2.max_overlap <= OVERLAP_BOUND + 1e-12);

    if code.same_presentation(&presets::xxxx_zzzz()) {
        let overlaps = table1_overlaps(&encoder)?;
        let worst = max_of(overlaps.iter().map(|o| (o - 1.0).abs()));
        let rows = overlaps.iter().filter(|o| (*o - 1.0).abs() < RESIDUAL_TOL).count();
        table.push(
            "table1 rows up to phase",
            format!("{rows}/{} (dev {worst:.1e})", overlaps.len()),
            rows == overlaps.len(),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for proto in [ConvertedProtocol::one_way(code.clone()), ConvertedProtocol::two_way(code.clone())] {
        for _ in 0..ORACLE_SAMPLES {
            let alpha = BellDiagState::<f64>::random(code.p(), code.n(), &mut rng)?;
            let report = analyze(&proto, &alpha)?;
            let run = run_protocol_dense(&proto, &Ensemble::from_bell_diag(&alpha)?, &encoder)?;
            for (a, b) in report.records.iter().zip(&run.records) {
                worst = worst.max((a.probability - b.probability).abs()).max((a.fidelity - b.fidelity).abs());
            }
        }
    }
    table.push("oracle equivalence max dev", format!("{worst:.3e}"), worst < 1e-9);

    let text = table.render(&name);
    if table.rows.iter().all(|r| r.2) {
        Ok(text)
    } else {
        Err(Failure::Checks(text))
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Outcome<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    match &cli.command {
        Command::Analyze(run) => emit(&cmd_analyze(run)?, &run.out),
        Command::Iterate { run, rounds } => emit(&cmd_iterate(run, *rounds)?, &run.out),
        Command::Sweep(args) => emit(&cmd_sweep(args)?, &args.out),
        Command::Verify(args) => match cmd_verify(args) {
            Err(Failure::Checks(text)) => {
                emit(&text, &args.out)?;
                Err(Failure::Checks("some checks failed".into()))
            }
            other => emit(&other?, &args.out),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capacity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
