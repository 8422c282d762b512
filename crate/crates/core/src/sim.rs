//! Dense statevector simulation with a lazy node lifecycle.
//!
//! [`QuantumState`] holds amplitudes over a dynamic register: nodes are
//! allocated in `|+>` when first touched, entangled by CZ, measured in the
//! YZ or XY plane (X basis = XY at angle 0), and removed from the register
//! by the measurement projection. Running a pattern therefore never holds
//! more than `register + 1` live qubits: each ancilla exists only between
//! its allocation and its measurement.
//!
//! [`run_pattern`] executes an assembled [`MeasurementPattern`]
//! instruction by instruction, resolving adaptive angle signs from
//! recorded outcomes and applying the end-of-pattern byproduct
//! corrections. [`reference_evolution`] is the backend patterns are
//! validated against: exact diagonal phase evolution interleaved with
//! single-qubit X rotations.

use crate::graph::Graph;
use crate::hamiltonian::{build_penalized_target, build_target, EncodingParams};
use crate::pattern::{MeasurementPattern, MeasurementPlane, NodeRole, ParamRef, Pauli};
use crate::pauli::DENSE_QUBIT_LIMIT;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Forcing an outcome whose probability is below this is an error.
pub const FORCED_PROBABILITY_FLOOR: f64 = 1e-12;

/// A pure state over a set of named nodes.
///
/// Node `nodes[i]` occupies bit `i` of the amplitude index (bit 0 least
/// significant).
#[derive(Debug, Clone)]
pub struct QuantumState {
    amps: Vec<Complex64>,
    nodes: Vec<usize>,
    peak_live: usize,
}

impl QuantumState {
    /// The empty register: zero qubits, single unit amplitude.
    pub fn new() -> Self {
        QuantumState {
            amps: vec![Complex64::new(1.0, 0.0)],
            nodes: Vec::new(),
            peak_live: 0,
        }
    }

    /// `|+>^n` over the given nodes.
    pub fn plus_states(nodes: &[usize]) -> Result<Self> {
        let mut s = QuantumState::new();
        for &n in nodes {
            s.allocate_plus(n)?;
        }
        Ok(s)
    }

    /// A state with explicit amplitudes (length `2^nodes.len()`), mostly
    /// for tests and basis-state preparation. Amplitudes are used as given;
    /// callers wanting a normalized state must normalize first.
    pub fn from_amplitudes(nodes: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        if nodes.len() > DENSE_QUBIT_LIMIT {
            return Err(Error::SizeGuard {
                what: format!("state over {} qubits", nodes.len()),
                limit: DENSE_QUBIT_LIMIT as u64,
            });
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != nodes.len() {
            return Err(Error::Register("duplicate node in register".into()));
        }
        if amps.len() != 1usize << nodes.len() {
            return Err(Error::Register(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                nodes.len()
            )));
        }
        let peak = nodes.len();
        Ok(QuantumState {
            amps,
            nodes,
            peak_live: peak,
        })
    }

    pub fn live_count(&self) -> usize {
        self.nodes.len()
    }

    /// Largest number of simultaneously live qubits this state has seen.
    pub fn peak_live(&self) -> usize {
        self.peak_live
    }

    /// Live nodes in register order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn position(&self, node: usize) -> Result<usize> {
        self.nodes
            .iter()
            .position(|&n| n == node)
            .ok_or_else(|| Error::Register(format!("node {node} is not live")))
    }

    /// Appends `node` in `|+>`.
    pub fn allocate_plus(&mut self, node: usize) -> Result<()> {
        if self.nodes.contains(&node) {
            return Err(Error::Register(format!("node {node} already live")));
        }
        if self.nodes.len() >= DENSE_QUBIT_LIMIT {
            return Err(Error::SizeGuard {
                what: format!("allocating node {node}"),
                limit: DENSE_QUBIT_LIMIT as u64,
            });
        }
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let old = std::mem::take(&mut self.amps);
        let mut next = Vec::with_capacity(old.len() * 2);
        next.extend_from_slice(&old);
        next.extend_from_slice(&old);
        for a in &mut next {
            *a *= half;
        }
        self.amps = next;
        self.nodes.push(node);
        self.peak_live = self.peak_live.max(self.nodes.len());
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        if pa == pb {
            return Err(Error::Register(format!("CZ needs two distinct nodes, got {a}")));
        }
        let mask = (1usize << pa) | (1usize << pb);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_pauli_x(&mut self, node: usize) -> Result<()> {
        let p = self.position(node)?;
        let bit = 1usize << p;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                self.amps.swap(idx, idx | bit);
            }
        }
        Ok(())
    }

    pub fn apply_pauli_z(&mut self, node: usize) -> Result<()> {
        let p = self.position(node)?;
        let bit = 1usize << p;
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & bit != 0 {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    /// Rotation `exp(-i angle X)` on one node.
    pub fn apply_rx(&mut self, node: usize, angle: f64) -> Result<()> {
        let p = self.position(node)?;
        let bit = 1usize << p;
        let (c, s) = (angle.cos(), angle.sin());
        let mis = Complex64::new(0.0, -s);
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | bit];
                self.amps[idx] = c * a0 + mis * a1;
                self.amps[idx | bit] = mis * a0 + c * a1;
            }
        }
        Ok(())
    }

    /// Multiplies the amplitude of every basis state by
    /// `exp(-i gamma * diag[index])`, where the index is read from the live
    /// register in node order. `diag` must cover the full register.
    pub fn apply_diagonal_phase(&mut self, gamma: f64, diag: &[f64]) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::Register(format!(
                "diagonal of {} entries for {} amplitudes",
                diag.len(),
                self.amps.len()
            )));
        }
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            *amp *= Complex64::from_polar(1.0, -gamma * diag[idx]);
        }
        Ok(())
    }

    /// Both projection branches of measuring `node`: amplitude vectors for
    /// outcomes 0 and 1 (unnormalized) with the node removed.
    fn project(
        &self,
        node: usize,
        plane: MeasurementPlane,
        angle: f64,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let p = self.position(node)?;
        let bit = 1usize << p;
        let low_mask = bit - 1;
        let half = self.amps.len() / 2;
        let mut branches = (
            Vec::with_capacity(half),
            Vec::with_capacity(half),
        );
        let (c0_0, c1_0) = basis_components(plane, angle, 0);
        let (c0_1, c1_1) = basis_components(plane, angle, 1);
        for i in 0..half {
            let low = i & low_mask;
            let high = (i & !low_mask) << 1;
            let a0 = self.amps[high | low];
            let a1 = self.amps[high | low | bit];
            branches.0.push(c0_0.conj() * a0 + c1_0.conj() * a1);
            branches.1.push(c0_1.conj() * a0 + c1_1.conj() * a1);
        }
        Ok(branches)
    }

    fn commit_outcome(
        &mut self,
        node: usize,
        outcome: u8,
        branch: Vec<Complex64>,
        probability: f64,
    ) -> Result<()> {
        if probability < FORCED_PROBABILITY_FLOOR {
            return Err(Error::ImpossibleOutcome {
                node,
                outcome,
                probability,
            });
        }
        let p = self.position(node)?;
        let scale = 1.0 / probability.sqrt();
        self.amps = branch;
        for a in &mut self.amps {
            *a *= scale;
        }
        self.nodes.remove(p);
        Ok(())
    }

    /// Measures `node`, forcing the outcome. Returns the probability the
    /// outcome had; forcing a (numerically) impossible branch is an error.
    pub fn measure_forced(
        &mut self,
        node: usize,
        plane: MeasurementPlane,
        angle: f64,
        outcome: u8,
    ) -> Result<f64> {
        let (b0, b1) = self.project(node, plane, angle)?;
        let total = self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let branch = if outcome == 0 { b0 } else { b1 };
        let probability = branch.iter().map(|a| a.norm_sqr()).sum::<f64>() / total;
        self.commit_outcome(node, outcome, branch, probability)?;
        Ok(probability)
    }

    /// Measures `node`, sampling the outcome by the Born rule.
    pub fn measure_sampled(
        &mut self,
        node: usize,
        plane: MeasurementPlane,
        angle: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(u8, f64)> {
        let (b0, b1) = self.project(node, plane, angle)?;
        let total = self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let p0 = b0.iter().map(|a| a.norm_sqr()).sum::<f64>() / total;
        let u: f64 = rng.gen();
        let (outcome, branch, probability) = if u < p0 {
            (0u8, b0, p0)
        } else {
            (1u8, b1, 1.0 - p0)
        };
        self.commit_outcome(node, outcome, branch, probability)?;
        Ok((outcome, probability))
    }

    /// Reorders the register so that `order[i]` sits at bit `i`.
    pub fn canonicalize(&mut self, order: &[usize]) -> Result<()> {
        if order.len() != self.nodes.len() {
            return Err(Error::Register(format!(
                "order of {} nodes for register of {}",
                order.len(),
                self.nodes.len()
            )));
        }
        let mut perm = Vec::with_capacity(order.len());
        for &node in order {
            perm.push(self.position(node)?);
        }
        let mut seen = perm.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != perm.len() {
            return Err(Error::Register("order repeats a node".into()));
        }
        let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (old_idx, &amp) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for (new_pos, &old_pos) in perm.iter().enumerate() {
                new_idx |= ((old_idx >> old_pos) & 1) << new_pos;
            }
            next[new_idx] = amp;
        }
        self.amps = next;
        self.nodes = order.to_vec();
        Ok(())
    }

    /// Renames live nodes; `map` must cover every live node injectively.
    pub fn relabel(&mut self, map: &BTreeMap<usize, usize>) -> Result<()> {
        let mut new_nodes = Vec::with_capacity(self.nodes.len());
        for &n in &self.nodes {
            let &renamed = map
                .get(&n)
                .ok_or_else(|| Error::Register(format!("relabel misses node {n}")))?;
            new_nodes.push(renamed);
        }
        let mut seen = new_nodes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != new_nodes.len() {
            return Err(Error::Register("relabel collides".into()));
        }
        self.nodes = new_nodes;
        Ok(())
    }
}

impl Default for QuantumState {
    fn default() -> Self {
        QuantumState::new()
    }
}

/// `|<a|b>|`, insensitive to global phase. The states must hold the same
/// node set; register order may differ.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    let mut sa: Vec<usize> = a.nodes.to_vec();
    let mut sb: Vec<usize> = b.nodes.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(Error::Register(
            "fidelity of states over different node sets".into(),
        ));
    }
    let n = a.nodes.len();
    // bit position in b of the node at bit position i in a
    let mut perm = Vec::with_capacity(n);
    for &node in &a.nodes {
        perm.push(b.nodes.iter().position(|&x| x == node).unwrap());
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ia in 0..a.amps.len() {
        let mut ib = 0usize;
        for (pa, &pb) in perm.iter().enumerate() {
            ib |= ((ia >> pa) & 1) << pb;
        }
        acc += a.amps[ia].conj() * b.amps[ib];
    }
    Ok(acc.norm())
}

fn basis_components(plane: MeasurementPlane, angle: f64, outcome: u8) -> (Complex64, Complex64) {
    let sigma = if outcome == 0 { 1.0 } else { -1.0 };
    let phase = Complex64::from_polar(1.0, angle);
    match plane {
        MeasurementPlane::Yz => {
            // (|+> + s e^{ia} |->)/sqrt2 in computational components.
            let c0 = (Complex64::new(1.0, 0.0) + sigma * phase) * 0.5;
            let c1 = (Complex64::new(1.0, 0.0) - sigma * phase) * 0.5;
            (c0, c1)
        }
        MeasurementPlane::Xy | MeasurementPlane::XBasis => {
            let half = std::f64::consts::FRAC_1_SQRT_2;
            (
                Complex64::new(half, 0.0),
                sigma * phase * half,
            )
        }
    }
}

/// How pattern measurement outcomes are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomeMode {
    /// Born-rule sampling from a seeded generator.
    Sampled { seed: u64 },
    /// Every outcome forced to 0 (all correction parities vanish).
    ForcedAllZero,
    /// Explicit outcome per measured node.
    Forced(BTreeMap<usize, u8>),
}

/// Execution options for [`run_pattern`].
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: OutcomeMode,
    /// Normally `true`; disabling shows the raw byproduct-laden state.
    pub apply_corrections: bool,
}

impl RunOptions {
    pub fn sampled(seed: u64) -> Self {
        RunOptions {
            mode: OutcomeMode::Sampled { seed },
            apply_corrections: true,
        }
    }

    pub fn forced_all_zero() -> Self {
        RunOptions {
            mode: OutcomeMode::ForcedAllZero,
            apply_corrections: true,
        }
    }
}

/// How the outcomes in an [`OutcomeRecord`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeSource {
    Sampled { seed: u64 },
    ForcedAllZero,
    Forced,
}

/// Outcomes and their probabilities for one pattern execution.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord {
    pub outcomes: BTreeMap<usize, u8>,
    pub probabilities: BTreeMap<usize, f64>,
    pub source: OutcomeSource,
}

/// Result of executing a pattern.
#[derive(Debug, Clone)]
pub struct PatternRun {
    /// Output state, relabeled so node ids are vertex-qubit indices
    /// `0..m*|V|` in canonical register order.
    pub state: QuantumState,
    pub record: OutcomeRecord,
    /// Largest number of simultaneously live qubits during the run.
    pub peak_live: usize,
}

/// Executes an assembled pattern.
///
/// Nodes are allocated lazily: a node comes alive when it is measured or
/// when a CZ link to a node being measured needs it. Together with the
/// instruction order produced by the assembler this keeps the live
/// register at `m|V| + 1` qubits.
pub fn run_pattern(
    pattern: &MeasurementPattern,
    gammas: &[f64],
    betas: &[f64],
    options: &RunOptions,
) -> Result<PatternRun> {
    pattern.validate()?;
    let layers = pattern.header.layers;
    if gammas.len() != layers || betas.len() != layers {
        return Err(Error::InvalidArgument(format!(
            "{} gamma and {} beta values for {layers} layers",
            gammas.len(),
            betas.len()
        )));
    }
    let register = pattern.header.qubits_per_vertex * pattern.header.vertex_count;
    if register > DENSE_QUBIT_LIMIT {
        return Err(Error::SizeGuard {
            what: format!("pattern register of {register} qubits"),
            limit: DENSE_QUBIT_LIMIT as u64,
        });
    }

    // CZ adjacency, consumed as links are applied.
    let mut links: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &pattern.cz_edges {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    }

    let mut state = QuantumState::new();
    // Inputs exist from the start.
    for qubit in 0..register {
        state.allocate_plus(qubit)?;
    }
    let mut measured: BTreeMap<usize, u8> = BTreeMap::new();
    let mut probabilities: BTreeMap<usize, f64> = BTreeMap::new();
    let mut rng = match &options.mode {
        OutcomeMode::Sampled { seed } => Some(<ChaCha8Rng as rand::SeedableRng>::seed_from_u64(*seed)),
        _ => None,
    };

    let ensure_live = |state: &mut QuantumState, node: usize| -> Result<()> {
        if !state.nodes().contains(&node) {
            state.allocate_plus(node)?;
        }
        Ok(())
    };

    for ins in &pattern.instructions {
        ensure_live(&mut state, ins.node)?;
        if let Some(partners) = links.remove(&ins.node) {
            for other in partners {
                if measured.contains_key(&other) {
                    return Err(Error::Register(format!(
                        "link ({}, {other}) applied after {other} was measured",
                        ins.node
                    )));
                }
                ensure_live(&mut state, other)?;
                state.apply_cz(ins.node, other)?;
                // Drop the reverse direction.
                if let Some(back) = links.get_mut(&other) {
                    back.retain(|&x| x != ins.node);
                }
            }
        }
        let base = match ins.angle.parameter {
            Some(ParamRef::Gamma(l)) => gammas[l - 1],
            Some(ParamRef::Beta(l)) => betas[l - 1],
            None => 1.0,
        };
        let mut parity = 0u8;
        for dep in &ins.sign_dependencies {
            parity ^= measured
                .get(dep)
                .copied()
                .ok_or_else(|| Error::Register(format!("dependency {dep} not yet measured")))?;
        }
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        let angle = ins.angle.coefficient * base * sign;
        let (outcome, probability) = match &options.mode {
            OutcomeMode::Sampled { .. } => {
                state.measure_sampled(ins.node, ins.plane, angle, rng.as_mut().unwrap())?
            }
            OutcomeMode::ForcedAllZero => {
                (0u8, state.measure_forced(ins.node, ins.plane, angle, 0)?)
            }
            OutcomeMode::Forced(map) => {
                let o = *map.get(&ins.node).ok_or_else(|| {
                    Error::InvalidArgument(format!("no forced outcome for node {}", ins.node))
                })?;
                (o, state.measure_forced(ins.node, ins.plane, angle, o)?)
            }
        };
        measured.insert(ins.node, outcome);
        probabilities.insert(ins.node, probability);
    }

    // Isolated outputs (possible in degenerate patterns) still exist.
    for &out in &pattern.output_nodes {
        ensure_live(&mut state, out)?;
    }

    if options.apply_corrections {
        for rule in &pattern.corrections {
            let mut parity = 0u8;
            for src in &rule.sources {
                parity ^= *measured.get(src).expect("validated correction source");
            }
            if parity == 1 {
                match rule.pauli {
                    Pauli::X => state.apply_pauli_x(rule.target)?,
                    Pauli::Z => state.apply_pauli_z(rule.target)?,
                }
            }
        }
    }

    // Present the output register as vertex qubits 0..m|V|.
    let mut relabel = BTreeMap::new();
    for &out in &pattern.output_nodes {
        let qubit = match pattern.nodes[out] {
            NodeRole::MixerA2 { qubit, .. } => qubit,
            NodeRole::VertexInput { qubit } => qubit,
            other => {
                return Err(Error::Register(format!(
                    "output node {out} has non-register role {other:?}"
                )))
            }
        };
        relabel.insert(out, qubit);
    }
    let peak = state.peak_live();
    state.relabel(&relabel)?;
    let order: Vec<usize> = (0..register).collect();
    state.canonicalize(&order)?;

    Ok(PatternRun {
        state,
        record: OutcomeRecord {
            outcomes: measured,
            probabilities,
            source: options.mode.source(),
        },
        peak_live: peak,
    })
}

impl OutcomeMode {
    fn source(&self) -> OutcomeSource {
        match self {
            OutcomeMode::Sampled { seed } => OutcomeSource::Sampled { seed: *seed },
            OutcomeMode::ForcedAllZero => OutcomeSource::ForcedAllZero,
            OutcomeMode::Forced(_) => OutcomeSource::Forced,
        }
    }
}

/// Exact QAOA evolution: per layer, the diagonal cost phase
/// `exp(-i gamma H)` followed by `exp(-i beta X)` on every qubit. The cost
/// operator is the cut Hamiltonian, or the penalized one when
/// `use_penalty` is set.
pub fn reference_evolution(
    g: &Graph,
    enc: &EncodingParams,
    gammas: &[f64],
    betas: &[f64],
    use_penalty: bool,
) -> Result<QuantumState> {
    if gammas.len() != betas.len() {
        return Err(Error::InvalidArgument(format!(
            "{} gamma and {} beta values",
            gammas.len(),
            betas.len()
        )));
    }
    let h = if use_penalty {
        build_penalized_target(g, enc)?
    } else {
        build_target(g, enc)?
    };
    let diag = h.dense_diagonal(DENSE_QUBIT_LIMIT)?;
    evolve_diagonal(&diag, gammas, betas)
}

/// Layered evolution of `|+>^n` under an explicit diagonal: per layer the
/// phase `exp(-i gamma diag)` then `exp(-i beta X)` per qubit. `diag` must
/// have power-of-two length.
pub fn evolve_diagonal(diag: &[f64], gammas: &[f64], betas: &[f64]) -> Result<QuantumState> {
    if !diag.len().is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "diagonal length {} is not a power of two",
            diag.len()
        )));
    }
    let n = diag.len().trailing_zeros() as usize;
    let nodes: Vec<usize> = (0..n).collect();
    let mut state = QuantumState::plus_states(&nodes)?;
    for (gamma, beta) in gammas.iter().zip(betas.iter()) {
        state.apply_diagonal_phase(*gamma, diag)?;
        for q in 0..n {
            state.apply_rx(q, *beta)?;
        }
    }
    Ok(state)
}
