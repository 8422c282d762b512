//! Self-check battery: every analytic identity the toolkit rests on,
//! runnable as a single pass/fail report.
//!
//! Each check recomputes one identity from first principles — classical
//! cut values, brute-force indicator diagonals, exact reference
//! evolution — and compares the library's answer against it. The pattern
//! check takes the gadget [`Calibration`] as an argument, so a
//! deliberately wrong calibration constant makes the battery fail; that
//! is the intended way to convince yourself the checks have teeth.

use crate::graph::{cut_value, Edge, Graph};
use crate::hamiltonian::{
    build_penalized_target, build_target, check_edge_term_indicator, decode_index, EncodingParams,
};
use crate::pattern::{assemble_pattern_with, Calibration};
use crate::pauli::projector_onto_first;
use crate::sim::{fidelity, reference_evolution, run_pattern, RunOptions};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub duration: Duration,
}

fn run_check(
    name: &'static str,
    body: impl FnOnce() -> Result<String>,
) -> CheckReport {
    let start = Instant::now();
    let (passed, details) = match body() {
        Ok(details) => (true, details),
        Err(e) => (false, e.to_string()),
    };
    CheckReport {
        name,
        passed,
        details,
        duration: start.elapsed(),
    }
}

fn fail(msg: String) -> crate::Error {
    crate::Error::InvalidArgument(msg)
}

/// The edge operator's diagonal equals the labels-differ indicator.
fn edge_indicator_check() -> Result<String> {
    let mut worst = 0.0f64;
    for m in 1..=3 {
        let dev = check_edge_term_indicator(m)?;
        worst = worst.max(dev);
    }
    if worst > 1e-12 {
        return Err(fail(format!("worst deviation {worst:.3e} above 1e-12")));
    }
    Ok(format!("m = 1..3, worst deviation {worst:.3e}"))
}

/// The label-range projector equals the brute-force indicator diagonal.
fn projector_check() -> Result<String> {
    let mut worst = 0.0f64;
    for m in 1..=4usize {
        for cutoff in 1..=(1u64 << m) {
            let p = projector_onto_first(cutoff, m)?;
            for x in 0..(1u64 << m) {
                let want = if x < cutoff { 1.0 } else { 0.0 };
                worst = worst.max((p.diagonal_entry(x) - want).abs());
            }
        }
    }
    if worst > 1e-12 {
        return Err(fail(format!("worst deviation {worst:.3e} above 1e-12")));
    }
    Ok(format!("m = 1..4, all cutoffs, worst deviation {worst:.3e}"))
}

/// Basis-state expectations of the cut operator equal classical cuts.
fn cut_diagonal_check() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut cases = 0usize;
    for n in 2..=3usize {
        for k in [2u32, 4] {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    edges.push(Edge {
                        u,
                        v,
                        weight: rng.gen_range(-1.0..2.0),
                    });
                }
            }
            let g = Graph::new(n, edges)?;
            let enc = EncodingParams::new(k, n)?;
            let h = build_target(&g, &enc)?;
            let diag = h.dense_diagonal(crate::pauli::DENSE_QUBIT_LIMIT)?;
            for (idx, &d) in diag.iter().enumerate() {
                let labels = decode_index(&enc, idx as u64);
                let cut = cut_value(&g, &labels)?;
                if (d - cut).abs() > 1e-9 {
                    return Err(fail(format!(
                        "n={n} k={k} index {idx}: operator {d} vs classical {cut}"
                    )));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} basis states agree to 1e-9"))
}

/// The penalized operator demotes invalid labels and preserves valid cuts:
/// per edge, the weight counts when the labels differ and is forfeited
/// when either endpoint's label is out of range.
fn penalty_check() -> Result<String> {
    let g = Graph::complete(3);
    let k = 3u32;
    let enc = EncodingParams::new(k, 3)?;
    let h = build_penalized_target(&g, &enc)?;
    let diag = h.dense_diagonal(crate::pauli::DENSE_QUBIT_LIMIT)?;
    for (idx, &d) in diag.iter().enumerate() {
        let labels = decode_index(&enc, idx as u64);
        let mut want = 0.0;
        for e in g.edges() {
            let (lu, lv) = (labels[e.u], labels[e.v]);
            if lu != lv {
                want += e.weight;
            }
            if lu >= k || lv >= k {
                want -= e.weight;
            }
        }
        if (d - want).abs() > 1e-9 {
            return Err(fail(format!(
                "index {idx} ({labels:?}): operator {d} vs cut-minus-penalty {want}"
            )));
        }
    }
    Ok(format!("{} basis states agree to 1e-9", diag.len()))
}

/// Pattern execution reproduces the exact layered evolution.
fn pattern_fidelity_check(cal: &Calibration) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 1.0f64;
    let mut cases = 0usize;
    for case in 0..12 {
        let k: u32 = if rng.gen_bool(0.5) { 2 } else { 4 };
        let enc_m = if k == 2 { 1 } else { 2 };
        let n = if enc_m == 1 { rng.gen_range(2..=4) } else { 2usize };
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(0.8) {
                    edges.push(Edge {
                        u,
                        v,
                        weight: rng.gen_range(0.3..1.5),
                    });
                }
            }
        }
        let g = Graph::new(n, edges)?;
        let layers = 1 + (case % 2);
        let gammas: Vec<f64> = (0..layers).map(|_| rng.gen_range(0.0..2.0)).collect();
        let betas: Vec<f64> = (0..layers).map(|_| rng.gen_range(0.0..1.5)).collect();
        let enc = EncodingParams::new(k, n)?;
        let pattern = assemble_pattern_with(&g, k, layers, cal)?;
        let reference = reference_evolution(&g, &enc, &gammas, &betas, false)?;
        let run = run_pattern(&pattern, &gammas, &betas, &RunOptions::sampled(rng.gen()))?;
        let f = fidelity(&run.state, &reference)?;
        worst = worst.min(f);
        cases += 1;
        if f < 1.0 - 1e-9 {
            return Err(fail(format!(
                "case {case} (n={n}, k={k}, layers={layers}): fidelity {f}"
            )));
        }
    }
    Ok(format!("{cases} randomized runs, worst fidelity {worst:.12}"))
}

/// Runs the whole battery with the given pattern calibration.
pub fn run_checks(cal: &Calibration) -> Vec<CheckReport> {
    vec![
        run_check("edge-indicator", edge_indicator_check),
        run_check("rank-projector", projector_check),
        run_check("cut-diagonal", cut_diagonal_check),
        run_check("penalty-semantics", penalty_check),
        run_check("pattern-fidelity", || pattern_fidelity_check(cal)),
    ]
}

/// The battery with the production calibration.
pub fn run_default_checks() -> Vec<CheckReport> {
    run_checks(&Calibration::default())
}
