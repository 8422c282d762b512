//! Variational driver: objective evaluation, parameter search, sampling.
//!
//! The objective is the expectation of the cut operator (optionally with
//! the invalid-label penalty subtracted) in the layered variational state.
//! Two interchangeable backends produce that state: `Reference` evolves
//! the diagonal-plus-mixer circuit exactly, `Mbqc` executes the compiled
//! measurement pattern with sampled outcomes. Because the corrected
//! pattern output is independent of the measurement record, both backends
//! agree to numerical precision; the pattern backend simply exercises the
//! full measurement machinery on every evaluation.
//!
//! The search is a deterministic two-stage procedure: a centered grid
//! scan over the parameter box, then Nelder-Mead refinement started from
//! the best grid point plus optional seeded random restarts. Every random
//! choice is derived from the configured seed, so a run is reproducible
//! bit for bit.

use crate::graph::{brute_force_max_kcut, cut_value, Assignment, Graph, BRUTE_FORCE_DEFAULT_BITS};
use crate::hamiltonian::{build_penalized_target, build_target, EncodingParams};
use crate::pattern::{assemble_pattern, MeasurementPattern};
use crate::pauli::DENSE_QUBIT_LIMIT;
use crate::sim::{reference_evolution, run_pattern, QuantumState, RunOptions};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const RESTART_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
const FINAL_SALT: u64 = 0x5851_F42D_4C95_7F2D;
const SAMPLE_SALT: u64 = 0x1405_7B7E_F767_814F;

/// Which engine produces the variational state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Exact diagonal-phase plus X-rotation evolution.
    Reference,
    /// Execution of the compiled measurement pattern, outcomes sampled.
    Mbqc,
}

/// Parameter search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Centered grid scan only.
    Grid,
    /// Grid scan, then Nelder-Mead from the best grid point and from
    /// seeded random restarts.
    NelderMead,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Variational layers (depth `p`).
    pub layers: usize,
    /// Grid resolution per parameter dimension.
    pub grid_points: usize,
    /// Nelder-Mead starts: 1 = best grid point only, each further start
    /// is a seeded random point.
    pub restarts: usize,
    /// Objective-evaluation budget per search phase (the grid phase and
    /// each restart get this many evaluations at most).
    pub max_evals: usize,
    pub seed: u64,
    pub backend: Backend,
    /// Subtract the invalid-label penalty from the objective and evolve
    /// under the penalized operator.
    pub use_penalty: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::NelderMead,
            layers: 1,
            grid_points: 8,
            restarts: 2,
            max_evals: 400,
            seed: 0,
            backend: Backend::Reference,
            use_penalty: false,
        }
    }
}

/// Search box: `gamma` in `[0, gamma_max)`, `beta` in `[0, beta_max)`.
///
/// The cost phase repeats with period `2 pi` for unit weights, so the
/// gamma box shrinks inversely with the largest absolute edge weight;
/// the mixer phase has period `pi` up to a global sign.
pub fn parameter_bounds(g: &Graph) -> (f64, f64) {
    let w_max = g
        .edges()
        .iter()
        .map(|e| e.weight.abs())
        .fold(0.0f64, f64::max);
    let gamma_max = 2.0 * std::f64::consts::PI / w_max.max(1.0);
    (gamma_max, std::f64::consts::PI)
}

/// Diagonal of the objective operator in the canonical register order.
pub fn objective_diagonal(g: &Graph, enc: &EncodingParams, use_penalty: bool) -> Result<Vec<f64>> {
    let h = if use_penalty {
        build_penalized_target(g, enc)?
    } else {
        build_target(g, enc)?
    };
    h.dense_diagonal(DENSE_QUBIT_LIMIT)
}

/// Expectation of a diagonal operator in a canonically ordered state.
pub fn expectation(state: &QuantumState, diag: &[f64]) -> Result<f64> {
    let amps = state.amplitudes();
    if amps.len() != diag.len() {
        return Err(Error::InvalidArgument(format!(
            "diagonal of {} entries against state of {} amplitudes",
            diag.len(),
            amps.len()
        )));
    }
    Ok(amps
        .iter()
        .zip(diag.iter())
        .map(|(a, d)| a.norm_sqr() * d)
        .sum())
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything an objective evaluation needs, precomputed once.
struct Objective<'a> {
    graph: &'a Graph,
    enc: EncodingParams,
    diag: Vec<f64>,
    pattern: Option<MeasurementPattern>,
    backend: Backend,
    use_penalty: bool,
    evaluations: usize,
    seed_base: u64,
}

impl<'a> Objective<'a> {
    fn new(g: &'a Graph, k: u32, cfg: &OptimizerConfig) -> Result<Self> {
        let enc = EncodingParams::new(k, g.vertex_count())?;
        if cfg.use_penalty && cfg.backend == Backend::Mbqc {
            return Err(Error::InvalidArgument(
                "the measurement-pattern backend implements the plain cut \
                 operator; the penalty term is only available on the \
                 reference backend"
                    .into(),
            ));
        }
        let diag = objective_diagonal(g, &enc, cfg.use_penalty)?;
        let pattern = match cfg.backend {
            Backend::Mbqc => Some(assemble_pattern(g, k, cfg.layers)?),
            Backend::Reference => None,
        };
        Ok(Objective {
            graph: g,
            enc,
            diag,
            pattern,
            backend: cfg.backend,
            use_penalty: cfg.use_penalty,
            evaluations: 0,
            seed_base: splitmix64(cfg.seed ^ 0xA076_1D64_78BD_642F),
        })
    }

    fn state_at(&mut self, gammas: &[f64], betas: &[f64]) -> Result<QuantumState> {
        match self.backend {
            Backend::Reference => {
                reference_evolution(self.graph, &self.enc, gammas, betas, self.use_penalty)
            }
            Backend::Mbqc => {
                let seed = splitmix64(
                    self.seed_base
                        .wrapping_add((self.evaluations as u64).wrapping_mul(RESTART_SALT)),
                );
                let run = run_pattern(
                    self.pattern.as_ref().unwrap(),
                    gammas,
                    betas,
                    &RunOptions::sampled(seed),
                )?;
                Ok(run.state)
            }
        }
    }

    fn eval(&mut self, params: &[f64]) -> Result<f64> {
        let p = params.len() / 2;
        let state = self.state_at(&params[..p], &params[p..])?;
        self.evaluations += 1;
        expectation(&state, &self.diag)
    }
}

/// One stop on the search trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub best_gammas: Vec<f64>,
    pub best_betas: Vec<f64>,
    /// Objective value at the best parameters (penalized if configured).
    pub best_value: f64,
    /// Best value seen during the grid phase.
    pub grid_value: f64,
    pub evaluations: usize,
}

/// Maximizes the objective over the parameter box.
pub fn optimize(g: &Graph, k: u32, cfg: &OptimizerConfig) -> Result<OptimizeReport> {
    if cfg.layers == 0 {
        return Err(Error::InvalidArgument("layer count must be positive".into()));
    }
    if cfg.grid_points == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    if cfg.restarts == 0 && cfg.method == Method::NelderMead {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    if cfg.max_evals == 0 {
        return Err(Error::InvalidArgument("evaluation budget must be positive".into()));
    }
    let mut obj = Objective::new(g, k, cfg)?;
    let (gamma_max, beta_max) = parameter_bounds(g);
    let p = cfg.layers;
    let dims = 2 * p;

    // Phase 1: centered grid scan, lexicographic order, budget-capped.
    let n = cfg.grid_points;
    let mut best_params = vec![0.0; dims];
    let mut best_value = f64::NEG_INFINITY;
    let mut index = vec![0usize; dims];
    let mut budget = cfg.max_evals;
    'grid: loop {
        let params: Vec<f64> = index
            .iter()
            .enumerate()
            .map(|(d, &i)| {
                let span = if d < p { gamma_max } else { beta_max };
                (i as f64 + 0.5) / n as f64 * span
            })
            .collect();
        let value = obj.eval(&params)?;
        if value > best_value {
            best_value = value;
            best_params = params;
        }
        budget -= 1;
        if budget == 0 {
            break;
        }
        // Odometer increment.
        for slot in index.iter_mut() {
            *slot += 1;
            if *slot < n {
                continue 'grid;
            }
            *slot = 0;
        }
        break;
    }
    let grid_value = best_value;

    if cfg.method == Method::NelderMead {
        let spans: Vec<f64> = (0..dims)
            .map(|d| if d < p { gamma_max } else { beta_max })
            .collect();
        for restart in 0..cfg.restarts {
            let start: Vec<f64> = if restart == 0 {
                best_params.clone()
            } else {
                let seed = cfg.seed ^ (restart as u64).wrapping_mul(RESTART_SALT);
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
                spans.iter().map(|&s| rng.gen::<f64>() * s).collect()
            };
            let step: Vec<f64> = spans.iter().map(|&s| s * 0.1).collect();
            let (params, value) =
                nelder_mead_max(&mut obj, &start, &step, cfg.max_evals, 1e-10)?;
            if value > best_value {
                best_value = value;
                best_params = params;
            }
        }
    }

    Ok(OptimizeReport {
        best_gammas: best_params[..p].to_vec(),
        best_betas: best_params[p..].to_vec(),
        best_value,
        grid_value,
        evaluations: obj.evaluations,
    })
}

/// Downhill-simplex maximization (reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5), stopped by value spread or evaluation budget.
fn nelder_mead_max(
    obj: &mut Objective,
    start: &[f64],
    step: &[f64],
    max_evals: usize,
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let dims = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dims + 1);
    let mut evals = 0usize;
    let eval = |obj: &mut Objective, x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        obj.eval(x)
    };
    simplex.push((start.to_vec(), eval(obj, start, &mut evals)?));
    for d in 0..dims {
        let mut x = start.to_vec();
        x[d] += step[d];
        let v = eval(obj, &x, &mut evals)?;
        simplex.push((x, v));
    }

    while evals < max_evals {
        // Descending by value: simplex[0] is best.
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        if simplex[0].1 - simplex[dims].1 < tol {
            break;
        }
        let centroid: Vec<f64> = (0..dims)
            .map(|d| simplex[..dims].iter().map(|(x, _)| x[d]).sum::<f64>() / dims as f64)
            .collect();
        let worst = simplex[dims].clone();
        let reflect: Vec<f64> = (0..dims)
            .map(|d| centroid[d] + (centroid[d] - worst.0[d]))
            .collect();
        let fr = eval(obj, &reflect, &mut evals)?;
        if fr > simplex[0].1 {
            // Try to expand.
            let expand: Vec<f64> = (0..dims)
                .map(|d| centroid[d] + 2.0 * (centroid[d] - worst.0[d]))
                .collect();
            let fe = eval(obj, &expand, &mut evals)?;
            simplex[dims] = if fe > fr { (expand, fe) } else { (reflect, fr) };
        } else if fr > simplex[dims - 1].1 {
            simplex[dims] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..dims)
                .map(|d| centroid[d] + 0.5 * (worst.0[d] - centroid[d]))
                .collect();
            let fc = eval(obj, &contract, &mut evals)?;
            if fc > worst.1 {
                simplex[dims] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (x, &b) in entry.0.iter_mut().zip(best.iter()) {
                        *x = b + 0.5 * (*x - b);
                    }
                    entry.1 = eval(obj, &entry.0.clone(), &mut evals)?;
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let (x, v) = simplex.swap_remove(0);
    Ok((x, v))
}

/// Statistics over computational-basis samples from the final state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSummary {
    pub shots: usize,
    /// Shots whose decoded labels are all below `k`.
    pub valid_shots: usize,
    /// Best cut value among valid shots.
    pub best_value: Option<f64>,
    pub best_assignment: Option<Assignment>,
    /// Mean cut value over valid shots.
    pub mean_value: Option<f64>,
}

/// Draws `shots` basis states from the state and decodes each into a
/// label assignment. Ties on the best cut resolve to the lowest basis
/// index, so the summary is deterministic in the seed.
pub fn sample_assignments(
    state: &QuantumState,
    enc: &EncodingParams,
    g: &Graph,
    k: u32,
    shots: usize,
    seed: u64,
) -> Result<SampleSummary> {
    if shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let amps = state.amplitudes();
    if amps.len() != 1usize << enc.total_qubits() {
        return Err(Error::InvalidArgument(format!(
            "state of {} amplitudes does not cover {} register qubits",
            amps.len(),
            enc.total_qubits()
        )));
    }
    let mut cumulative = Vec::with_capacity(amps.len());
    let mut acc = 0.0f64;
    for a in amps {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(amps.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    let mut valid_shots = 0usize;
    let mut best: Option<(f64, usize, Assignment)> = None;
    let mut value_sum = 0.0f64;
    for (&idx, &count) in &counts {
        let labels = crate::hamiltonian::decode_index(enc, idx as u64);
        if labels.iter().any(|&l| l >= k) {
            continue;
        }
        let value = cut_value(g, &labels)?;
        valid_shots += count;
        value_sum += value * count as f64;
        let better = match &best {
            None => true,
            Some((bv, bi, _)) => value > *bv || (value == *bv && idx < *bi),
        };
        if better {
            best = Some((value, idx, labels));
        }
    }
    let (best_value, best_assignment) = match best {
        Some((v, _, a)) => (Some(v), Some(a)),
        None => (None, None),
    };
    Ok(SampleSummary {
        shots,
        valid_shots,
        best_value,
        best_assignment,
        mean_value: if valid_shots > 0 {
            Some(value_sum / valid_shots as f64)
        } else {
            None
        },
    })
}

/// Comparison against exhaustive search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteComparison {
    pub optimum: f64,
    /// Cut expectation over the optimum, when the optimum is positive.
    pub approximation_ratio: Option<f64>,
    /// Best sampled cut over the optimum, when defined.
    pub sampled_ratio: Option<f64>,
}

/// Full pipeline output: search report, final-state quantities, samples,
/// and (when tractable) the exhaustive comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub k: u32,
    pub layers: usize,
    pub backend: Backend,
    pub method: Method,
    pub use_penalty: bool,
    pub seed: u64,
    pub report: OptimizeReport,
    /// Cut expectation (never penalized) in the final state.
    pub cut_expectation: f64,
    /// Objective value in the final state; differs from
    /// `cut_expectation` only when the penalty is active.
    pub objective_value: f64,
    pub samples: Option<SampleSummary>,
    pub brute: Option<BruteComparison>,
}

/// Optimizes, re-evaluates at the best parameters, samples, and compares
/// with exhaustive search when the instance is small enough.
pub fn solve(g: &Graph, k: u32, cfg: &OptimizerConfig, shots: usize) -> Result<SolveOutcome> {
    let report = optimize(g, k, cfg)?;
    let mut obj = Objective::new(g, k, cfg)?;
    let enc = obj.enc;
    let final_state = {
        // The final evaluation gets its own derived seed so it is
        // independent of how many evaluations the search used.
        obj.seed_base = splitmix64(cfg.seed ^ FINAL_SALT);
        obj.state_at(&report.best_gammas, &report.best_betas)?
    };
    let objective_value = expectation(&final_state, &obj.diag)?;
    let cut_expectation = if cfg.use_penalty {
        let cut_diag = objective_diagonal(g, &enc, false)?;
        expectation(&final_state, &cut_diag)?
    } else {
        objective_value
    };
    let samples = if shots > 0 {
        Some(sample_assignments(
            &final_state,
            &enc,
            g,
            k,
            shots,
            splitmix64(cfg.seed ^ SAMPLE_SALT),
        )?)
    } else {
        None
    };
    let brute = match brute_force_max_kcut(g, k, BRUTE_FORCE_DEFAULT_BITS) {
        Ok(b) => {
            let positive = b.optimum > 0.0;
            Some(BruteComparison {
                optimum: b.optimum,
                approximation_ratio: positive.then(|| cut_expectation / b.optimum),
                sampled_ratio: match (&samples, positive) {
                    (Some(s), true) => s.best_value.map(|v| v / b.optimum),
                    _ => None,
                },
            })
        }
        Err(Error::SizeGuard { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(SolveOutcome {
        k,
        layers: cfg.layers,
        backend: cfg.backend,
        method: cfg.method,
        use_penalty: cfg.use_penalty,
        seed: cfg.seed,
        report,
        cut_expectation,
        objective_value,
        samples,
        brute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use num_complex::Complex64;

    fn k4() -> Graph {
        Graph::complete(4)
    }

    #[test]
    fn uniform_state_expectation_is_mean_cut() {
        let g = k4();
        let enc = EncodingParams::new(4, 4).unwrap();
        let diag = objective_diagonal(&g, &enc, false).unwrap();
        let mean: f64 = diag.iter().sum::<f64>() / diag.len() as f64;
        let plus = QuantumState::plus_states(&(0..8).collect::<Vec<_>>()).unwrap();
        let e = expectation(&plus, &diag).unwrap();
        assert!((e - mean).abs() < 1e-12);
        // Six edges, each cut with probability 3/4 under uniform labels.
        assert!((e - 4.5).abs() < 1e-12);
    }

    #[test]
    fn backends_agree_at_fixed_parameters() {
        let g = Graph::new(
            3,
            vec![
                Edge { u: 0, v: 1, weight: 1.0 },
                Edge { u: 1, v: 2, weight: 2.0 },
            ],
        )
        .unwrap();
        for k in [2u32, 4] {
            let base = OptimizerConfig {
                layers: 1,
                ..OptimizerConfig::default()
            };
            let mut obj_ref = Objective::new(
                &g,
                k,
                &OptimizerConfig {
                    backend: Backend::Reference,
                    ..base.clone()
                },
            )
            .unwrap();
            let mut obj_mbqc = Objective::new(
                &g,
                k,
                &OptimizerConfig {
                    backend: Backend::Mbqc,
                    seed: 123,
                    ..base.clone()
                },
            )
            .unwrap();
            for params in [[0.3, 0.9], [1.1, 0.2], [2.0, 1.4]] {
                let a = obj_ref.eval(&params).unwrap();
                let b = obj_mbqc.eval(&params).unwrap();
                assert!((a - b).abs() < 1e-9, "k={k} params={params:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mbqc_objective_is_outcome_independent() {
        let g = k4();
        let cfg = |seed| OptimizerConfig {
            backend: Backend::Mbqc,
            seed,
            ..OptimizerConfig::default()
        };
        let mut a = Objective::new(&g, 4, &cfg(1)).unwrap();
        let mut b = Objective::new(&g, 4, &cfg(999)).unwrap();
        let va = a.eval(&[0.7, 0.4]).unwrap();
        let vb = b.eval(&[0.7, 0.4]).unwrap();
        assert!((va - vb).abs() < 1e-9);
    }

    #[test]
    fn grid_beats_uniform_baseline() {
        let g = k4();
        let cfg = OptimizerConfig {
            method: Method::Grid,
            grid_points: 12,
            max_evals: 400,
            ..OptimizerConfig::default()
        };
        let report = optimize(&g, 4, &cfg).unwrap();
        assert!(report.best_value > 4.5, "grid best {}", report.best_value);
        assert_eq!(report.evaluations, 144);
        assert_eq!(report.grid_value, report.best_value);
    }

    #[test]
    fn nelder_mead_refines_grid() {
        let g = k4();
        let cfg = OptimizerConfig {
            method: Method::NelderMead,
            grid_points: 6,
            restarts: 1,
            max_evals: 300,
            ..OptimizerConfig::default()
        };
        let report = optimize(&g, 2, &cfg).unwrap();
        assert!(report.best_value >= report.grid_value - 1e-12);
        assert!(report.best_value > report.grid_value + 1e-4, "refinement should move");
    }

    #[test]
    fn more_restarts_never_hurt() {
        let g = Graph::new(
            4,
            vec![
                Edge { u: 0, v: 1, weight: 1.0 },
                Edge { u: 1, v: 2, weight: 0.7 },
                Edge { u: 2, v: 3, weight: 1.3 },
            ],
        )
        .unwrap();
        let base = OptimizerConfig {
            grid_points: 4,
            max_evals: 120,
            seed: 7,
            ..OptimizerConfig::default()
        };
        let one = optimize(&g, 2, &OptimizerConfig { restarts: 1, ..base.clone() }).unwrap();
        let three = optimize(&g, 2, &OptimizerConfig { restarts: 3, ..base.clone() }).unwrap();
        assert!(three.best_value >= one.best_value - 1e-12);
    }

    #[test]
    fn penalty_objective_tops_out_at_best_valid_cut() {
        // With labels restricted to {0,1,2} the best cut of the complete
        // graph on four vertices is 5, and the penalty keeps the
        // objective below it.
        let g = k4();
        let cfg = OptimizerConfig {
            use_penalty: true,
            grid_points: 10,
            restarts: 2,
            max_evals: 300,
            seed: 3,
            ..OptimizerConfig::default()
        };
        let report = optimize(&g, 3, &cfg).unwrap();
        assert!(report.best_value <= 5.0 + 1e-9);
        assert!(report.best_value > 3.0, "search should make progress");
    }

    #[test]
    fn penalty_on_pattern_backend_is_rejected() {
        let g = k4();
        let cfg = OptimizerConfig {
            use_penalty: true,
            backend: Backend::Mbqc,
            ..OptimizerConfig::default()
        };
        assert!(matches!(
            optimize(&g, 3, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn degenerate_configs_are_rejected() {
        let g = k4();
        for cfg in [
            OptimizerConfig { layers: 0, ..OptimizerConfig::default() },
            OptimizerConfig { grid_points: 0, ..OptimizerConfig::default() },
            OptimizerConfig { restarts: 0, ..OptimizerConfig::default() },
            OptimizerConfig { max_evals: 0, ..OptimizerConfig::default() },
        ] {
            assert!(optimize(&g, 4, &cfg).is_err());
        }
    }

    #[test]
    fn sampling_decodes_basis_states_exactly() {
        // A pure basis state samples to its own assignment every time.
        let enc = EncodingParams::new(4, 4).unwrap();
        let g = k4();
        let idx = crate::hamiltonian::encode_assignment(&enc, &[0, 1, 2, 3]).unwrap();
        let dim = 1usize << enc.total_qubits();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[idx as usize] = Complex64::new(1.0, 0.0);
        let state = QuantumState::from_amplitudes((0..8).collect(), amps).unwrap();
        let summary = sample_assignments(&state, &enc, &g, 4, 50, 9).unwrap();
        assert_eq!(summary.valid_shots, 50);
        assert_eq!(summary.best_assignment.as_deref(), Some(&[0u32, 1, 2, 3][..]));
        assert_eq!(summary.best_value, Some(6.0));
        assert_eq!(summary.mean_value, Some(6.0));
    }

    #[test]
    fn sample_mean_tracks_expectation() {
        let g = k4();
        let enc = EncodingParams::new(2, 4).unwrap();
        let state = reference_evolution(&g, &enc, &[0.6], &[0.5], false).unwrap();
        let diag = objective_diagonal(&g, &enc, false).unwrap();
        let e = expectation(&state, &diag).unwrap();
        let shots = 20_000;
        let summary = sample_assignments(&state, &enc, &g, 2, shots, 4).unwrap();
        assert_eq!(summary.valid_shots, shots);
        // Cut values live in [0, 6]; a 4-sigma band with the worst-case
        // variance bound keeps this test deterministic yet honest.
        let se_bound = 3.0 / (shots as f64).sqrt();
        let mean = summary.mean_value.unwrap();
        assert!(
            (mean - e).abs() < 4.0 * se_bound,
            "mean {mean} vs expectation {e}"
        );
        assert!(summary.best_value.unwrap() <= 4.0 + 1e-12);
    }

    #[test]
    fn invalid_labels_are_excluded_from_samples() {
        // For k=3 the uniform state over two label qubits puts a quarter
        // of the mass on the invalid label 3.
        let g = Graph::new(2, vec![Edge { u: 0, v: 1, weight: 1.0 }]).unwrap();
        let enc = EncodingParams::new(3, 2).unwrap();
        let state = QuantumState::plus_states(&(0..4).collect::<Vec<_>>()).unwrap();
        let summary = sample_assignments(&state, &enc, &g, 3, 4000, 11).unwrap();
        assert!(summary.valid_shots < summary.shots);
        let expected_valid = 4000.0 * (9.0 / 16.0);
        assert!((summary.valid_shots as f64 - expected_valid).abs() < 300.0);
        if let Some(a) = &summary.best_assignment {
            assert!(a.iter().all(|&l| l < 3));
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let g = k4();
        let cfg = OptimizerConfig {
            grid_points: 6,
            restarts: 2,
            max_evals: 150,
            seed: 42,
            ..OptimizerConfig::default()
        };
        let a = solve(&g, 4, &cfg, 500).unwrap();
        let b = solve(&g, 4, &cfg, 500).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let brute = a.brute.expect("tiny instance is brute-forceable");
        assert_eq!(brute.optimum, 6.0);
        assert!(brute.approximation_ratio.unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn solve_on_pattern_backend_finds_the_optimum_samples() {
        let g = k4();
        let cfg = OptimizerConfig {
            backend: Backend::Mbqc,
            grid_points: 8,
            restarts: 1,
            max_evals: 200,
            seed: 5,
            ..OptimizerConfig::default()
        };
        let outcome = solve(&g, 4, &cfg, 400).unwrap();
        let samples = outcome.samples.expect("shots were requested");
        assert_eq!(samples.valid_shots, 400);
        assert_eq!(samples.best_value, Some(6.0));
        assert!(outcome.cut_expectation > 4.5);
    }
}
