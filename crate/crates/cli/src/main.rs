//! `distill`: run, compare and sweep Bell-diagonal distillation protocols.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 a
//! verification or oracle check found a mismatch.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Format, InputSpec, ProtocolSpec, RunConfig, ThresholdSpec};
use distill_core::perm::PermProtocol;
use distill_core::BellDiagonalState;

#[derive(Parser)]
#[command(name = "distill", version, about = "Bell-diagonal entanglement distillation on binary labels")]
struct Cli {
    /// Directory for results (`<dir>/<command>.<format>`); stdout if unset.
    #[arg(long, env = "DISTILL_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a symplectic permutation protocol and print every branch.
    RunPerm(RunArgs),
    /// Run a stabilizer-code protocol and print every syndrome branch.
    RunCode(RunArgs),
    /// Compare both engines on one instance, or on random instances.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Verify this many random instances instead of the configured one.
        #[arg(long)]
        random: Option<u64>,
        /// Pair counts cycled through by `--random`.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        pairs: Vec<usize>,
    },
    /// Iterate recurrence rounds over a grid of Werner input fidelities.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.55)]
        f_min: f64,
        #[arg(long, default_value_t = 0.95)]
        f_max: f64,
        #[arg(long, default_value_t = 0.05)]
        f_step: f64,
    },
    /// Compare the label-level engines with dense matrix simulation.
    OracleCheck {
        #[command(flatten)]
        run: RunArgs,
        /// Check this many random protocols instead of the configured one.
        #[arg(long)]
        random: Option<u64>,
        /// Largest accepted deviation between engine and dense simulation.
        #[arg(long, default_value_t = commands::ORACLE_TOLERANCE)]
        tolerance: f64,
    },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// JSON run configuration; inline flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of input pairs.
    #[arg(long)]
    n: Option<usize>,
    /// Number of kept pairs.
    #[arg(long)]
    m: Option<usize>,
    /// Every input pair is a Werner pair of this fidelity.
    #[arg(long, group = "input")]
    werner: Option<f64>,
    /// Every input pair has these four weights (Phi+, Psi+, Phi-, Psi-).
    #[arg(long, group = "input", value_delimiter = ',', num_args = 1..)]
    pair: Option<Vec<f64>>,
    /// Full distribution from a state file `{"n": .., "probs": [..]}`.
    #[arg(long, group = "input")]
    state: Option<PathBuf>,
    /// Stabilizer generators as comma-separated Pauli strings.
    #[arg(long, group = "protocol", value_delimiter = ',')]
    generators: Option<Vec<String>>,
    /// Symplectic matrix as comma-separated row bit strings.
    #[arg(long, group = "protocol", value_delimiter = ',')]
    matrix: Option<Vec<String>>,
    /// Affine offset bit string for `--matrix`.
    #[arg(long)]
    offset: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Acceptance threshold: a number in [0, 1] or `non-degrading`.
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; overrides `--out-dir`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn has_protocol(&self) -> bool {
        self.generators.is_some() || self.matrix.is_some()
    }

    /// File config (if any) with inline flags applied on top.
    fn to_config(&self, needs_input: bool) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig {
                n: 0,
                m: 0,
                input: None,
                protocol: None,
                rounds: 1,
                threshold: None,
                format: None,
                seed: None,
            },
        };
        let mut n_hint = None;
        if let Some(f) = self.werner {
            cfg.input = Some(InputSpec::Werner(f));
        }
        if let Some(w) = &self.pair {
            let w: [f64; 4] = w
                .as_slice()
                .try_into()
                .map_err(|_| anyhow::anyhow!("--pair needs exactly 4 weights, got {}", w.len()))?;
            cfg.input = Some(InputSpec::Pair(w));
        }
        if let Some(path) = &self.state {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading state {}", path.display()))?;
            let state = BellDiagonalState::from_json(&text)
                .with_context(|| format!("parsing state {}", path.display()))?;
            n_hint = Some(state.num_pairs());
            cfg.input = Some(InputSpec::Distribution(state.probs().to_vec()));
        }
        if let Some(g) = &self.generators {
            n_hint = n_hint.or(g.first().map(String::len));
            cfg.protocol = Some(ProtocolSpec::Stabilizer(g.clone()));
        }
        if let Some(rows) = &self.matrix {
            n_hint = n_hint.or(Some(rows.len() / 2));
            cfg.protocol = Some(ProtocolSpec::Permutation {
                a: rows.clone(),
                b: self.offset.clone(),
            });
        } else if self.offset.is_some() {
            bail!("--offset requires --matrix");
        }
        if let Some(n) = self.n.or(if self.config.is_none() { n_hint } else { None }) {
            cfg.n = n;
        }
        match (self.m, &cfg.protocol) {
            (Some(m), _) => cfg.m = m,
            (None, Some(ProtocolSpec::Stabilizer(g))) if self.config.is_none() => {
                cfg.m = cfg.n.checked_sub(g.len()).context("more generators than pairs")?;
            }
            (None, Some(ProtocolSpec::Permutation { .. })) if self.config.is_none() => {
                bail!("--m is required with --matrix")
            }
            _ => {}
        }
        if let Some(r) = self.rounds {
            cfg.rounds = r;
        }
        if let Some(t) = &self.threshold {
            cfg.threshold = Some(match t.parse::<f64>() {
                Ok(x) => ThresholdSpec::Value(x),
                Err(_) => ThresholdSpec::Named(t.clone()),
            });
        }
        if let Some(f) = self.format {
            cfg.format = Some(f);
        }
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if cfg.input.is_none() && needs_input {
            bail!("no input given: use --werner, --pair, --state or a config file");
        }
        if cfg.protocol.is_none() {
            bail!("no protocol given: use --generators, --matrix or a config file");
        }
        cfg.validate(needs_input)?;
        Ok(cfg)
    }
}

fn emit(outcome: &commands::Outcome, format: Format, args: &RunArgs, out_dir: Option<&Path>) -> Result<()> {
    let text = outcome.table.render(format)?;
    let dest = output::destination(args.output.as_deref(), out_dir, outcome.table.command, format);
    output::emit(&text, dest.as_deref())
}

fn execute(cli: Cli) -> Result<bool> {
    let out_dir = cli.out_dir.as_deref();
    let (outcome, format, args) = match cli.command {
        Command::RunPerm(args) => {
            let cfg = args.to_config(true)?;
            (commands::run_perm(&cfg)?, cfg.format.unwrap_or_default(), args)
        }
        Command::RunCode(args) => {
            let cfg = args.to_config(true)?;
            (commands::run_code(&cfg)?, cfg.format.unwrap_or_default(), args)
        }
        Command::Verify { run, random: Some(k), pairs } => {
            let seed = run.seed.unwrap_or(0);
            let format = run.format.unwrap_or_default();
            (commands::verify_random(k, seed, &pairs)?, format, run)
        }
        Command::Verify { run, random: None, .. } => {
            let cfg = run.to_config(true)?;
            (commands::verify(&cfg)?, cfg.format.unwrap_or_default(), run)
        }
        Command::Sweep { run, f_min, f_max, f_step } => {
            let (proto, cfg) = if run.has_protocol() || run.config.is_some() {
                let cfg = run.to_config(false)?;
                (cfg.permutation()?, cfg)
            } else {
                let mut with_default = run.clone();
                with_default.generators = Some(vec!["ZZ".into()]);
                let cfg = with_default.to_config(false)?;
                (PermProtocol::bilateral_cnot(), cfg)
            };
            if proto.m() != 1 {
                bail!("sweep needs a protocol with one kept pair, got m = {}", proto.m());
            }
            let points = commands::grid(f_min, f_max, f_step)?;
            (commands::sweep(&proto, &cfg, &points)?, cfg.format.unwrap_or_default(), run)
        }
        Command::OracleCheck { run, random: Some(k), tolerance } => {
            let seed = run.seed.unwrap_or(0);
            let format = run.format.unwrap_or_default();
            (commands::oracle_check_random(k, seed, tolerance)?, format, run)
        }
        Command::OracleCheck { run, random: None, tolerance } => {
            let cfg = run.to_config(true)?;
            (commands::oracle_check(&cfg, tolerance)?, cfg.format.unwrap_or_default(), run)
        }
    };
    emit(&outcome, format, &args, out_dir)?;
    Ok(outcome.mismatch)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("mismatch detected");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
