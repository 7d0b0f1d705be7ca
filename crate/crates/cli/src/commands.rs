use anyhow::{bail, Result};
use serde_json::json;

use distill_core::code::{self, StabilizerProtocol};
use distill_core::equivalence::{self, verify_equivalence, EquivalenceReport};
use distill_core::oracle::{simulate_parity_measurement, simulate_syndrome_measurement, MAX_ORACLE_PAIRS};
use distill_core::perm::{self, recurrence_sweep, PermProtocol};
use distill_core::random::{
    instance_rng, random_distribution, random_isotropic_generators, random_symplectic,
    random_vector,
};
use distill_core::{BellDiagonalState, BinaryVector, Pair};
use rand::Rng;

use crate::config::RunConfig;
use crate::output::{round15, Cell, Table};

/// Default tolerance of the dense-oracle comparison.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// A rendered table and whether the command detected a mismatch.
pub struct Outcome {
    pub table: Table,
    pub mismatch: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self {
            table,
            mismatch: false,
        }
    }
}

fn text(v: &BinaryVector) -> Cell {
    Cell::Text(v.to_string())
}

pub fn run_perm(cfg: &RunConfig) -> Result<Outcome> {
    let state = cfg.state()?;
    let proto = cfg.permutation()?;
    let threshold = cfg.threshold_for(&state)?;
    let mut table = Table::new(
        "run-perm",
        &["t", "prob", "fidelity", "paper_fidelity", "correction", "accepted", "output"],
    );
    for o in perm::run(&state, &proto, &threshold)? {
        table.push(vec![
            text(&o.t),
            Cell::Number(o.prob),
            Cell::Number(o.fidelity),
            Cell::Number(o.paper_fidelity),
            text(&o.correction),
            Cell::Bool(o.accepted),
            Cell::Numbers(o.output.probs().to_vec()),
        ]);
    }
    Ok(table
        .with_summary(json!({
            "n": cfg.n,
            "m": cfg.m,
            "state_fidelity": round15(state.fidelity()),
            "threshold": round15(threshold),
            "protocol": proto,
        }))
        .into())
}

pub fn run_code(cfg: &RunConfig) -> Result<Outcome> {
    let state = cfg.state()?;
    let proto = cfg.stabilizer()?;
    let threshold = cfg.threshold_for(&state)?;
    let mut table = Table::new(
        "run-code",
        &[
            "s",
            "prob",
            "fidelity",
            "paper_fidelity",
            "recovery",
            "correction",
            "accepted",
            "output",
        ],
    );
    for b in code::run(&state, &proto, &threshold)? {
        table.push(vec![
            text(&b.s),
            Cell::Number(b.prob),
            Cell::Number(b.fidelity),
            Cell::Number(b.paper_fidelity),
            text(&b.u),
            text(&b.logical_correction),
            Cell::Bool(b.accepted),
            Cell::Numbers(b.output.probs().to_vec()),
        ]);
    }
    Ok(table
        .with_summary(json!({
            "n": cfg.n,
            "m": cfg.m,
            "state_fidelity": round15(state.fidelity()),
            "threshold": round15(threshold),
            "protocol": proto,
        }))
        .into())
}

fn report_summary(r: &EquivalenceReport) -> serde_json::Value {
    json!({
        "n": r.n,
        "m": r.m,
        "generators": r.generators,
        "subspaces_match": r.subspaces_match,
        "branches_match": r.branches_match,
        "coset_match": r.coset_match,
        "max_discrepancy": round15(r.max_discrepancy),
        "tolerance": equivalence::EQUIVALENCE_TOLERANCE,
        "passed": r.holds(),
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let state = cfg.state()?;
    let proto = cfg.stabilizer()?;
    let threshold = cfg.threshold_for(&state)?;
    let report = verify_equivalence(&state, &proto, &threshold)?;
    let mut table = Table::new(
        "verify",
        &[
            "t",
            "s",
            "perm_prob",
            "code_prob",
            "perm_fidelity",
            "code_fidelity",
            "output_discrepancy",
            "coset_match",
            "offset_match",
        ],
    );
    for b in &report.branches {
        table.push(vec![
            text(&b.t),
            text(&b.s),
            Cell::Number(b.perm_probability),
            Cell::Number(b.code_probability),
            Cell::Number(b.perm_fidelity),
            Cell::Number(b.code_fidelity),
            Cell::Number(b.output_discrepancy),
            Cell::Bool(b.coset_match),
            Cell::Bool(b.offset_match),
        ]);
    }
    Ok(Outcome {
        mismatch: !report.holds(),
        table: table.with_summary(report_summary(&report)),
    })
}

pub fn verify_random(count: u64, seed: u64, pair_counts: &[usize]) -> Result<Outcome> {
    if let Some(&n) = pair_counts.iter().find(|&&n| n == 0 || n > distill_core::MAX_PAIRS) {
        bail!("pair count {n} outside 1..={}", distill_core::MAX_PAIRS);
    }
    let cases = equivalence::verify_random_instances(seed, count, pair_counts)?;
    let mut table = Table::new(
        "verify",
        &["index", "n", "m", "generators", "branches", "max_discrepancy", "passed"],
    );
    let mut failed = 0;
    for case in &cases {
        let r = &case.report;
        failed += usize::from(!r.holds());
        table.push(vec![
            Cell::Int(case.index),
            Cell::Int(r.n as u64),
            Cell::Int(r.m as u64),
            Cell::Text(
                r.generators
                    .iter()
                    .map(distill_core::pauli::to_pauli_string)
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            Cell::Int(r.branches.len() as u64),
            Cell::Number(r.max_discrepancy),
            Cell::Bool(r.holds()),
        ]);
    }
    Ok(Outcome {
        mismatch: failed > 0,
        table: table.with_summary(json!({
            "seed": seed,
            "instances": count,
            "pair_counts": pair_counts,
            "failed": failed,
            "tolerance": equivalence::EQUIVALENCE_TOLERANCE,
        })),
    })
}

/// Grid `start, start + step, ..` up to `stop`, rounded to 12 decimals so
/// repeated additions do not drift.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || start > stop {
        bail!("empty fidelity grid {start}..{stop} step {step}");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + step * i as f64) * 1e12).round() / 1e12)
        .collect())
}

pub fn sweep(proto: &PermProtocol, cfg: &RunConfig, points: &[f64]) -> Result<Outcome> {
    let acceptance = cfg.acceptance()?;
    let mut table = Table::new(
        "sweep",
        &["f_in", "round", "fidelity_in", "f_out", "success_probability", "yield", "improved"],
    );
    for &f in points {
        let pair = Pair::werner(f)?;
        for r in recurrence_sweep(&pair, proto, cfg.rounds, &acceptance)? {
            table.push(vec![
                Cell::Number(f),
                Cell::Int(r.round as u64),
                Cell::Number(r.fidelity_in),
                Cell::OptNumber(r.fidelity_out),
                Cell::Number(r.success_probability),
                Cell::Number(r.cumulative_yield),
                Cell::Bool(r.improved()),
            ]);
        }
    }
    Ok(table
        .with_summary(json!({
            "rounds": cfg.rounds,
            "points": points.len(),
            "protocol": proto,
        }))
        .into())
}

const ORACLE_HEADERS: &[&str] = &[
    "case",
    "kind",
    "branch",
    "engine_prob",
    "oracle_prob",
    "output_deviation",
    "off_diagonal",
    "passed",
];

/// Dense comparisons for one instance; returns the number of failing rows.
fn oracle_rows(
    table: &mut Table,
    tolerance: f64,
    case: u64,
    state: &BellDiagonalState,
    perm_proto: &PermProtocol,
    stab: &StabilizerProtocol,
) -> Result<usize> {
    let n = state.num_pairs();
    if n > MAX_ORACLE_PAIRS {
        bail!("dense oracle limited to n <= {MAX_ORACLE_PAIRS}, got n = {n}");
    }
    let mut failures = 0;
    let mut row = |table: &mut Table, kind: &str, branch: String, e: f64, o: f64, dev: f64, off: f64| {
        let ok = (e - o).abs() <= tolerance && dev <= tolerance && off <= tolerance;
        failures += usize::from(!ok);
        table.push(vec![
            Cell::Int(case),
            Cell::Text(kind.to_string()),
            Cell::Text(branch),
            Cell::Number(e),
            Cell::Number(o),
            Cell::Number(dev),
            Cell::Number(off),
            Cell::Bool(ok),
        ]);
    };

    let engine = perm::run(state, perm_proto, &0.0)?;
    let relabeled = state.permute(perm_proto.matrix(), perm_proto.offset())?;
    for branch in simulate_parity_measurement(&relabeled, perm_proto.m())? {
        let (prob, dev) = match engine.iter().find(|o| o.t == branch.t) {
            Some(o) => (
                o.prob,
                o.output
                    .probs()
                    .iter()
                    .zip(&branch.conditional)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            ),
            None => (0.0, 0.0),
        };
        row(table, "parity", branch.t.to_string(), prob, branch.prob, dev, branch.max_off_diagonal);
    }

    let joint = simulate_syndrome_measurement(state, stab.generators())?;
    let uniform = 1.0 / (1u64 << stab.generators().len()) as f64;
    let alice_dev = joint
        .alice_marginal()
        .iter()
        .map(|p| (p - uniform).abs())
        .fold(0.0, f64::max);
    let dense = joint.difference_distribution();
    for (s, p) in code::syndrome_distribution(state, stab)? {
        row(table, "syndrome", s.to_string(), p, dense[s.index()], alice_dev, joint.dependence());
    }
    Ok(failures)
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance.is_nan() || tolerance < 0.0 {
        bail!("tolerance must be non-negative, got {tolerance}");
    }
    Ok(())
}

pub fn oracle_check(cfg: &RunConfig, tolerance: f64) -> Result<Outcome> {
    check_tolerance(tolerance)?;
    if cfg.n > MAX_ORACLE_PAIRS {
        bail!("dense oracle limited to n <= {MAX_ORACLE_PAIRS}, got n = {}", cfg.n);
    }
    let state = cfg.state()?;
    let mut table = Table::new("oracle-check", ORACLE_HEADERS);
    let failures = oracle_rows(&mut table, tolerance, 0, &state, &cfg.permutation()?, &cfg.stabilizer()?)?;
    Ok(Outcome {
        mismatch: failures > 0,
        table: table.with_summary(json!({
            "n": cfg.n,
            "m": cfg.m,
            "failed": failures,
            "tolerance": tolerance,
        })),
    })
}

pub fn oracle_check_random(count: u64, seed: u64, tolerance: f64) -> Result<Outcome> {
    check_tolerance(tolerance)?;
    let mut table = Table::new("oracle-check", ORACLE_HEADERS);
    let mut failures = 0;
    for case in 0..count {
        let mut rng = instance_rng(seed, case);
        let n = 2 + (case % 2) as usize;
        let m = rng.random_range(0..n);
        let a = random_symplectic(n, &mut rng);
        let b = random_vector(2 * n, &mut rng);
        let state = random_distribution(n, &mut rng);
        let gens = random_isotropic_generators(n, n - m, &mut rng);
        let perm_proto = PermProtocol::new(n, m, a, b)?;
        let stab = StabilizerProtocol::new(n, m, gens)?;
        failures += oracle_rows(&mut table, tolerance, case, &state, &perm_proto, &stab)?;
    }
    Ok(Outcome {
        mismatch: failures > 0,
        table: table.with_summary(json!({
            "seed": seed,
            "instances": count,
            "failed": failures,
            "tolerance": tolerance,
        })),
    })
}
