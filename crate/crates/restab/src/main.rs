//! `restab`: generate markets, solve them, run Set Offering, restabilize
//! after retirements and entries, and run the theorem suite.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 precondition
//! violation, 3 theorem violation detected.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use restab::generate::{generate_trial, Skip};
use restab::json::{
    read_market, read_matching, to_json, write_file, MarketDto, MatchingDto, MatchingListDto, SolveDto, TraceDto,
};
use restab::scenario::run_scenario;
use restab::{run_theorem_suite, PreferenceFamily, RestabError, Result, ScenarioConfig, SuiteOptions, TransitionSpec};
use restab_core::{da_firm_proposing, da_worker_proposing, enumerate_fqs, enumerate_stable, set_offering, EnumLimits};

const MAX_ENUM_ENV: &str = "RESTAB_MAX_ENUM";
const THEOREM_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "restab", version, about = "Restabilize many-to-one matching markets", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a random market as JSON (or a batch of trial files with --out-dir)
    Gen(GenArgs),
    /// Emit the firm-optimal and worker-optimal stable matchings
    Solve { market: PathBuf },
    /// Enumerate every stable (or firm quasi-stable) matching by brute force
    StableSet(StableSetArgs),
    /// Run Set Offering from a firm quasi-stable matching and emit the trace
    So(SoArgs),
    /// Apply a transition to a market with a stable matching and restabilize
    Transition(TransitionArgs),
    /// Run the theorem suite over seeded random trials
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u32,
    #[arg(long, default_value_t = 3)]
    firms: u32,
    #[arg(long, default_value_t = 5)]
    workers: u32,
    #[arg(long, default_value_t = 2)]
    quota_max: u32,
    /// Probability that any given firm-worker pair is acceptable
    #[arg(long, default_value_t = 0.8)]
    density: f64,
    #[arg(long, value_enum, default_value_t = Family::Responsive)]
    family: Family,
    /// Workers retired per transition
    #[arg(long, default_value_t = 0)]
    retire: u32,
    /// Firms added per transition
    #[arg(long, default_value_t = 0)]
    add_firms: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Responsive,
    ExplicitValidated,
}

impl ScenarioArgs {
    fn config(&self) -> ScenarioConfig {
        ScenarioConfig {
            rng_seed: self.seed,
            n_firms: self.firms,
            n_workers: self.workers,
            quota_max: self.quota_max,
            acceptability_density: self.density,
            preference_family: match self.family {
                Family::Responsive => PreferenceFamily::Responsive,
                Family::ExplicitValidated => PreferenceFamily::ExplicitValidated,
            },
            n_trials: self.trials,
            transition_spec: (self.retire > 0 || self.add_firms > 0)
                .then_some(TransitionSpec { retire_count: self.retire, add_firm_count: self.add_firms }),
        }
    }
}

#[derive(Args)]
struct GuardArgs {
    /// Largest worker count the brute-force oracles accept
    /// (overrides RESTAB_MAX_ENUM; default 7)
    #[arg(long)]
    max_enum: Option<usize>,
}

impl GuardArgs {
    fn limits(&self) -> Result<EnumLimits> {
        let mut limits = EnumLimits::default();
        if let Some(n) = self.max_enum {
            limits.max_workers = n;
        } else if let Ok(raw) = std::env::var(MAX_ENUM_ENV) {
            limits.max_workers = raw
                .trim()
                .parse()
                .map_err(|_| RestabError::Config(format!("{MAX_ENUM_ENV}={raw:?} is not a worker count")))?;
        }
        Ok(limits)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    guard: GuardArgs,
    /// Trial index to print when no output directory is given
    #[arg(long, default_value_t = 0)]
    trial: u32,
    /// Write market_<t>.json (plus matching_<t>.json and transition_<t>.json
    /// when a transition is requested) for every trial
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct StableSetArgs {
    market: PathBuf,
    /// Enumerate firm quasi-stable matchings instead
    #[arg(long)]
    fqs: bool,
    #[command(flatten)]
    guard: GuardArgs,
}

#[derive(Args)]
struct SoArgs {
    market: PathBuf,
    matching: PathBuf,
    /// Write trace.json here instead of printing it
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TransitionArgs {
    market: PathBuf,
    matching: PathBuf,
    transition: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    guard: GuardArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    guard: GuardArgs,
    /// Write suite.json here instead of printing it
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Harness self-test: feed the checks a wrong firm-optimal matching
    #[arg(long, hide = true)]
    corrupt_oracle: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Solve { market } => {
            let m = read_market(&market)?;
            let dto = SolveDto {
                firm_optimal: (&da_firm_proposing(&m)).into(),
                worker_optimal: (&da_worker_proposing(&m)).into(),
            };
            print!("{}", to_json(&dto));
            Ok(0)
        }
        Command::StableSet(args) => {
            let m = read_market(&args.market)?;
            let limits = args.guard.limits()?;
            let matchings: Vec<MatchingDto> = if args.fqs {
                enumerate_fqs(&m, limits).map_err(RestabError::Precondition)?.iter().map(Into::into).collect()
            } else {
                enumerate_stable(&m, limits).map_err(RestabError::Precondition)?.iter().map(Into::into).collect()
            };
            print!("{}", to_json(&MatchingListDto { count: matchings.len(), matchings }));
            Ok(0)
        }
        Command::So(args) => {
            let m = read_market(&args.market)?;
            let mu = read_matching(&args.matching)?;
            let trace = set_offering(&m, &mu).map_err(RestabError::Precondition)?;
            emit(args.out_dir.as_deref(), "trace.json", &to_json(&TraceDto::from(&trace)))?;
            Ok(0)
        }
        Command::Transition(args) => {
            let limits = args.guard.limits()?;
            let outcome = run_scenario(&args.market, &args.matching, &args.transition, &args.out_dir, limits)?;
            println!(
                "vacancy_chain_length={} offer_rounds={} all_passed={}",
                outcome.vacancy_chain_length, outcome.offer_rounds, outcome.all_passed
            );
            Ok(if outcome.all_passed { 0 } else { THEOREM_VIOLATION })
        }
        Command::Verify(args) => {
            let opts = SuiteOptions { limits: args.guard.limits()?, corrupt_oracle: args.corrupt_oracle };
            let report = run_theorem_suite(&args.scenario.config(), opts)?;
            emit(args.out_dir.as_deref(), "suite.json", &to_json(&report))?;
            if !report.all_passed {
                eprintln!("{} theorem violation(s) detected", report.failures.len());
                return Ok(THEOREM_VIOLATION);
            }
            Ok(0)
        }
    }
}

fn emit(out_dir: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| RestabError::Write { path: dir.to_path_buf(), source })?;
            write_file(&dir.join(name), contents)
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<u8> {
    let cfg = args.scenario.config();
    cfg.validate()?;
    let limits = args.guard.limits()?;
    let Some(dir) = args.out_dir else {
        let trial = generate_trial(&cfg, args.trial, limits).map_err(skip_error)?;
        print!("{}", to_json(&MarketDto::from(&trial.market)));
        return Ok(0);
    };
    std::fs::create_dir_all(&dir).map_err(|source| RestabError::Write { path: dir.clone(), source })?;
    for t in 0..cfg.n_trials {
        let trial = match generate_trial(&cfg, t, limits) {
            Ok(trial) => trial,
            Err(Skip(reason)) => {
                eprintln!("trial {t} skipped: {reason}");
                continue;
            }
        };
        write_file(&dir.join(format!("market_{t}.json")), &to_json(&MarketDto::from(&trial.market)))?;
        if let Some(gen) = &trial.transition {
            write_file(&dir.join(format!("matching_{t}.json")), &to_json(&MatchingDto::from(&gen.mu_old)))?;
            write_file(&dir.join(format!("transition_{t}.json")), &to_json(&gen.spec))?;
        }
    }
    Ok(0)
}

fn skip_error(Skip(reason): Skip) -> RestabError {
    RestabError::Config(format!("trial could not be generated: {reason}"))
}
