//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use itinera_core::bench::bench_run;
use itinera_core::canonical;
use itinera_core::dataset::{dataset_gen, CaseMix, DatasetConfig};
use itinera_core::dialogue::{RevisionRequest, TravelQuery};
use itinera_core::kb::{load_kb_dir, synth_kb, write_kb_dir, KnowledgeBase};
use itinera_core::plan::{parse_plan, serialize_plan, Plan};
use itinera_core::planner::{generate_plan, revise_plan, slots_after, PlanOutcome, SearchBudget};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::api::Api;
use crate::store::SessionStore;

#[derive(Debug, Parser)]
#[command(name = "itinera", version, about = "Travel itinerary planning, validation and benchmarking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Knowledge base synthesis and checking.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Query corpora with simulated dialogues and plans.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Plan generation and revision.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// Benchmark reports over a set of plans.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Interactive session on the terminal.
    Chat(ChatArgs),
}

#[derive(Debug, Args)]
pub struct KbDir {
    /// Knowledge base directory.
    #[arg(long, env = "ITINERA_KB_DIR")]
    pub kb: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum KbCommand {
    /// Write a synthetic knowledge base.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        cities: usize,
        #[arg(long, default_value_t = 10)]
        attractions: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a knowledge base and print the rejection report. Exits 1 when
    /// any record was rejected or repaired.
    Validate {
        #[command(flatten)]
        kb: KbDir,
    },
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Write corpus.jsonl, queries.jsonl, sessions.jsonl, plans.jsonl and
    /// reports.jsonl into the output directory.
    Gen {
        #[command(flatten)]
        kb: KbDir,
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Share of implicit queries. Without ratios the reference mix is used.
        #[arg(long, requires = "revision_ratio")]
        implicit_ratio: Option<f64>,
        /// Share of cases with a scripted revision.
        #[arg(long, requires = "implicit_ratio")]
        revision_ratio: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PlanCommand {
    /// Plan a fully specified query. Exits 0 only when the plan passes every
    /// constraint, 1 when it does not.
    Gen {
        #[arg(long)]
        query: PathBuf,
        #[command(flatten)]
        kb: KbDir,
        #[arg(long)]
        out: PathBuf,
        /// Also write the validation report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply a revision request to a plan. Same exit codes as `gen`.
    Revise {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[command(flatten)]
        kb: KbDir,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the query as changed by the request, e.g. a lowered budget.
        #[arg(long)]
        query_out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Evaluate plans against queries matched by id.
    Run {
        /// Queries as JSON lines or a JSON array.
        #[arg(long)]
        queries: PathBuf,
        /// Plans as JSON lines or a JSON array.
        #[arg(long)]
        plans: PathBuf,
        #[command(flatten)]
        kb: KbDir,
        /// Full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-constraint pass rate and correlation as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub kb: KbDir,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Persist sessions to this file after every change.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChatArgs {
    #[command(flatten)]
    pub kb: KbDir,
    #[arg(long, default_value = "chat")]
    pub id: String,
}

pub type CliResult<T> = Result<T, String>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
    }
    fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn decode<T: DeserializeOwned>(bytes: &[u8], origin: &str) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| format!("{origin}: field `{}`: {}", e.path(), e.inner()))?;
    de.end().map_err(|e| format!("{origin}: {e}"))?;
    Ok(value)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    decode(&read(path)?, &path.display().to_string())
}

/// Records from a file holding either a JSON array or one JSON value per line.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let bytes = read(path)?;
    if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'[') {
        return read_json(path);
    }
    let text = String::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| decode(l.as_bytes(), &format!("{}:{}", path.display(), i + 1)))
        .collect()
}

fn read_plans(path: &Path) -> CliResult<Vec<Plan>> {
    read_records::<serde_json::Value>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            parse_plan(canonical::to_line(&v).as_bytes()).map_err(|e| format!("{} record {}: {e}", path.display(), i + 1))
        })
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> CliResult<usize> {
    let mut out = String::new();
    let mut n = 0;
    for r in records {
        out.push_str(&canonical::to_line(&r));
        out.push('\n');
        n += 1;
    }
    write(path, out.as_bytes())?;
    Ok(n)
}

pub fn load_kb(dir: &KbDir, err: &mut dyn Write) -> CliResult<KnowledgeBase> {
    let (kb, report) = load_kb_dir(&dir.kb).map_err(|e| e.to_string())?;
    if !report.is_clean() {
        let _ = writeln!(
            err,
            "warning: {} records rejected, {} repaired (see `itinera kb validate`)",
            report.rejected.len(),
            report.repaired.len()
        );
    }
    Ok(kb)
}

fn finish_plan(outcome: &PlanOutcome, out: &Path, report: Option<&Path>, stdout: &mut dyn Write) -> CliResult<ExitCode> {
    write(out, &serialize_plan(&outcome.plan))?;
    if let Some(path) = report {
        write(path, &canonical::to_pretty(&outcome.report))?;
    }
    let failed: Vec<&str> = outcome.report.results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    let _ = if failed.is_empty() {
        writeln!(stdout, "final_pass: true")
    } else {
        writeln!(stdout, "final_pass: false (failed: {})", failed.join(", "))
    };
    Ok(if outcome.report.final_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Run a parsed command. Errors are reported by the caller with exit code 2.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<ExitCode> {
    match cli.command {
        Command::Kb(KbCommand::Synth { seed, cities, attractions, out }) => {
            let kb = synth_kb(seed, cities, attractions).map_err(|e| e.to_string())?;
            write_kb_dir(&kb, &out).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            let _ = writeln!(stdout, "wrote {} cities, {} points of interest to {}", kb.cities().count(), kb.pois().count(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Kb(KbCommand::Validate { kb }) => {
            let (_, report) = load_kb_dir(&kb.kb).map_err(|e| e.to_string())?;
            let _ = write!(stdout, "{}", report.render());
            Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Dataset(DatasetCommand::Gen { kb, n, implicit_ratio, revision_ratio, seed, out }) => {
            let kb = load_kb(&kb, stderr)?;
            let mix = match (implicit_ratio, revision_ratio) {
                (Some(i), Some(r)) => CaseMix::from_ratios(i, r).map_err(|e| e.to_string())?,
                _ => CaseMix::default(),
            };
            let ds = dataset_gen(&kb, &DatasetConfig { mix, ..DatasetConfig::new(n, seed) }).map_err(|e| e.to_string())?;
            write_jsonl(&out.join("corpus.jsonl"), &ds.corpus.entries)?;
            write_jsonl(
                &out.join("queries.jsonl"),
                ds.sessions.iter().map(|s| TravelQuery { id: s.id.clone(), slots: s.slots.clone() }),
            )?;
            write_jsonl(&out.join("sessions.jsonl"), &ds.sessions)?;
            let plans = write_jsonl(&out.join("plans.jsonl"), ds.plans().map(|(_, p, _)| p))?;
            write_jsonl(
                &out.join("reports.jsonl"),
                ds.plans().map(|(id, _, r)| serde_json::json!({ "id": id, "report": r })),
            )?;
            let [a, b, c, d] = ds.corpus.case_counts();
            let _ = writeln!(
                stdout,
                "{} entries ({a} single-turn, {b} single-turn with revision, {c} multi-turn, {d} multi-turn with revision), {plans} plans",
                ds.corpus.entries.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan(PlanCommand::Gen { query, kb, out, report }) => {
            let kb = load_kb(&kb, stderr)?;
            let query: TravelQuery = read_json(&query)?;
            let outcome = generate_plan(&query, &kb, SearchBudget::default()).map_err(|e| e.to_string())?;
            finish_plan(&outcome, &out, report.as_deref(), stdout)
        }
        Command::Plan(PlanCommand::Revise { plan, request, query, kb, out, report, query_out }) => {
            let kb = load_kb(&kb, stderr)?;
            let plan = parse_plan(&read(&plan)?).map_err(|e| format!("{}: {e}", plan.display()))?;
            let request: RevisionRequest = read_json(&request)?;
            let query: TravelQuery = read_json(&query)?;
            let outcome = revise_plan(&plan, &request, &query.slots, &kb).map_err(|e| e.to_string())?;
            if let Some(path) = query_out {
                let changed = TravelQuery { id: query.id.clone(), slots: slots_after(&request, &query.slots) };
                write(&path, &canonical::to_pretty(&changed))?;
            }
            finish_plan(&outcome, &out, report.as_deref(), stdout)
        }
        Command::Bench(BenchCommand::Run { queries, plans, kb, out, csv }) => {
            let kb = load_kb(&kb, stderr)?;
            let queries: Vec<TravelQuery> = read_records(&queries)?;
            let plans = read_plans(&plans)?;
            let run = bench_run(&queries, &plans, &kb).map_err(|e| e.to_string())?;
            let _ = write!(stdout, "{}", run.table());
            if let Some(path) = out {
                write(&path, &canonical::to_pretty(&run))?;
            }
            if let Some(path) = csv {
                write(&path, run.csv().as_bytes())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve(args) => {
            let kb = load_kb(&args.kb, stderr)?;
            let store = match &args.snapshot {
                Some(path) => SessionStore::with_snapshot(path).map_err(|e| e.to_string())?,
                None => SessionStore::in_memory(),
            };
            let api = Arc::new(Api::with_store(kb, store));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime.block_on(crate::http::serve(api, args.addr)).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Chat(args) => {
            let kb = load_kb(&args.kb, stderr)?;
            crate::chat::chat(&kb, &args.id, io::stdin().lock(), stdout).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let (mut out, mut err) = (io::stdout().lock(), io::stderr());
    match run(cli, &mut out, &mut err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(2)
        }
    }
}
