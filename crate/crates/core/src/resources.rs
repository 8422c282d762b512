//! Cluster-size accounting: native patterns versus translated circuits.
//!
//! The native route compiles one variational layer directly to a
//! measurement pattern; its cluster grows as `3mV + E(K - 1)` nodes for
//! `K = 2^m` labels. The translated route first synthesizes the layer as
//! a CNOT/rotation circuit and then maps every gate to its
//! measurement-pattern gadget. Two gadget libraries are costed: the
//! `standard` one (15-node CNOT, 5-node Z rotation, 3-node X rotation)
//! and a compact `emc` one (4-node CNOT, 3-node rotations). A third
//! entry, `emc-m-opt`, applies a circuit-level optimization whose gate
//! counts grow quadratically in `m` instead of linearly in `K`, which
//! eventually beats the native cluster — but only at astronomically
//! large label counts (see [`asymptotic_crossover_k`]).
//!
//! Gate-to-cluster accounting: composing gadgets fuses each shared
//! boundary column, so a gate whose standalone gadget holds `N` nodes
//! contributes `N - 2` fresh nodes per CNOT and `N - 1` per single-qubit
//! rotation, on top of the `mV` input nodes.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cluster nodes consumed by one gate gadget, per gate species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCosts {
    pub cnot: u64,
    pub rz: u64,
    pub rx: u64,
}

/// The textbook gadget library.
pub const STANDARD_COSTS: GadgetCosts = GadgetCosts { cnot: 15, rz: 5, rx: 3 };

/// The compact gadget library.
pub const EMC_COSTS: GadgetCosts = GadgetCosts { cnot: 4, rz: 3, rx: 3 };

/// Circuit-translation flavour to cost against the native pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranslationMethod {
    /// Textbook gadgets on the unoptimized circuit.
    Standard,
    /// Compact gadgets on the unoptimized circuit.
    Emc,
    /// Compact gadgets on the label-recoded circuit whose gate counts are
    /// polynomial in `m` rather than `K`.
    EmcMOptimized,
}

impl TranslationMethod {
    pub const ALL: [TranslationMethod; 3] = [
        TranslationMethod::Standard,
        TranslationMethod::Emc,
        TranslationMethod::EmcMOptimized,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TranslationMethod::Standard => "standard",
            TranslationMethod::Emc => "emc",
            TranslationMethod::EmcMOptimized => "emc-m-opt",
        }
    }
}

/// Gate census of one unoptimized variational layer in the circuit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: u64,
    pub rz: u64,
    pub rx: u64,
}

fn qubits_per_vertex(k: u32) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "label count {k} below 2"
        )));
    }
    if !k.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "cluster accounting needs a power-of-two label count, got {k}"
        )));
    }
    Ok(k.trailing_zeros() as u64)
}

fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::SizeGuard {
        what: "cluster-size arithmetic overflowed".into(),
        limit: u64::MAX,
    })
}

fn add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b).ok_or(Error::SizeGuard {
        what: "cluster-size arithmetic overflowed".into(),
        limit: u64::MAX,
    })
}

/// Nodes in the native single-layer pattern: `m V` inputs, `K - 1`
/// cost ancillae per edge, and `2 m V` mixer nodes.
pub fn native_cluster_size(vertices: u64, edges: u64, k: u32) -> Result<u64> {
    let m = qubits_per_vertex(k)?;
    add(mul(3, mul(m, vertices)?)?, mul(edges, (k - 1) as u64)?)
}

/// Gates in one unoptimized circuit-model layer: per edge,
/// `2 (m - 1) K + 2` CNOTs and `K - 1` Z rotations; per vertex qubit,
/// one X rotation for the mixer.
pub fn circuit_gate_counts(vertices: u64, edges: u64, k: u32) -> Result<GateCounts> {
    let m = qubits_per_vertex(k)?;
    let cnot_per_edge = add(mul(2, mul(m - 1, k as u64)?)?, 2)?;
    Ok(GateCounts {
        cnot: mul(edges, cnot_per_edge)?,
        rz: mul(edges, (k - 1) as u64)?,
        rx: mul(m, vertices)?,
    })
}

/// Per-edge gate counts after the label-recoding optimization, valid for
/// `m >= 2`: CNOTs `24 m^2 - 210 m + 540` and single-qubit rotations
/// `32 m^2 - 286 m + 739`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizedGateCounts {
    pub cnot_per_edge: u64,
    pub single_per_edge: u64,
}

pub fn optimized_gate_counts(m: u64) -> Result<OptimizedGateCounts> {
    let quad = |a: i128, b: i128, c: i128| -> Result<u64> {
        let m = m as i128;
        u64::try_from(a * m * m + b * m + c).map_err(|_| Error::SizeGuard {
            what: "cluster-size arithmetic overflowed".into(),
            limit: u64::MAX,
        })
    };
    Ok(OptimizedGateCounts {
        cnot_per_edge: quad(24, -210, 540)?,
        single_per_edge: quad(32, -286, 739)?,
    })
}

/// Total cluster nodes after translating one circuit layer with the
/// given method.
pub fn translated_cluster_size(
    vertices: u64,
    edges: u64,
    k: u32,
    method: TranslationMethod,
) -> Result<u64> {
    let m = qubits_per_vertex(k)?;
    let inputs = mul(m, vertices)?;
    match method {
        TranslationMethod::Standard | TranslationMethod::Emc => {
            let costs = match method {
                TranslationMethod::Standard => STANDARD_COSTS,
                _ => EMC_COSTS,
            };
            let gates = circuit_gate_counts(vertices, edges, k)?;
            let mut total = inputs;
            total = add(total, mul(gates.cnot, costs.cnot - 2)?)?;
            total = add(total, mul(gates.rz, costs.rz - 1)?)?;
            total = add(total, mul(gates.rx, costs.rx - 1)?)?;
            Ok(total)
        }
        TranslationMethod::EmcMOptimized => {
            // Published closed form for the optimized translation:
            // 2 E (m (88 m - 207) + 1446) + 3 m V.
            let per_edge = {
                let m = m as i128;
                let val = 2 * (m * (88 * m - 207) + 1446);
                u64::try_from(val).map_err(|_| Error::SizeGuard {
                    what: "cluster-size arithmetic overflowed".into(),
                    limit: u64::MAX,
                })?
            };
            add(mul(3, inputs)?, mul(edges, per_edge)?)
        }
    }
}

/// Cluster size for the optimized translation rebuilt from its gate
/// counts instead of the published closed form: the two disagree, and
/// this variant is reported alongside for comparison. Needs `m >= 2`
/// in practice (the gate polynomials go negative below their roots).
pub fn m_optimized_cluster_size_from_gates(
    vertices: u64,
    edges: u64,
    k: u32,
) -> Result<u64> {
    let m = qubits_per_vertex(k)?;
    let inputs = mul(m, vertices)?;
    let gates = optimized_gate_counts(m)?;
    let mut total = mul(3, inputs)?;
    total = add(
        total,
        mul(edges, mul(gates.cnot_per_edge, EMC_COSTS.cnot - 2)?)?,
    )?;
    total = add(
        total,
        mul(edges, mul(gates.single_per_edge, EMC_COSTS.rx - 1)?)?,
    )?;
    Ok(total)
}

/// Translated-over-native node ratio for a concrete instance.
pub fn overhead_ratio(
    vertices: u64,
    edges: u64,
    k: u32,
    method: TranslationMethod,
) -> Result<f64> {
    let native = native_cluster_size(vertices, edges, k)?;
    let translated = translated_cluster_size(vertices, edges, k, method)?;
    Ok(translated as f64 / native as f64)
}

/// Limit of the overhead ratio as the edge count dominates the vertex
/// count (dense graphs): the per-edge node costs of both routes.
pub fn asymptotic_overhead_ratio(k: u32, method: TranslationMethod) -> Result<f64> {
    let m = qubits_per_vertex(k)? as f64;
    let kf = k as f64;
    let per_edge_native = kf - 1.0;
    let per_edge_translated = match method {
        TranslationMethod::Standard => kf * (26.0 * m - 22.0) + 22.0,
        TranslationMethod::Emc => kf * (4.0 * m - 2.0) + 2.0,
        TranslationMethod::EmcMOptimized => 176.0 * m * m - 414.0 * m + 2892.0,
    };
    Ok(per_edge_translated / per_edge_native)
}

/// Smallest power-of-two label count at which the optimized translation
/// finally undercuts the native pattern on dense graphs.
pub fn asymptotic_crossover_k() -> u32 {
    for m in 1..=31u32 {
        let k = 1u64 << m;
        if k > u32::MAX as u64 {
            break;
        }
        let ratio = asymptotic_overhead_ratio(k as u32, TranslationMethod::EmcMOptimized)
            .expect("powers of two are valid label counts");
        if ratio < 1.0 {
            return k as u32;
        }
    }
    unreachable!("the quadratic per-edge cost is beaten within u32 label counts")
}

/// One sweep entry: complete graph on `v` vertices with `k` labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub vertices: u64,
    pub edges: u64,
    pub k: u32,
    pub qubits_per_vertex: u64,
    pub native_nodes: u64,
    pub standard_ratio: f64,
    pub emc_ratio: f64,
    pub emc_m_opt_ratio: f64,
    /// The optimized ratio rebuilt from gate counts rather than the
    /// published closed form; absent below `m = 2` where the recoding
    /// does not apply.
    pub emc_m_opt_gate_ratio: Option<f64>,
}

/// Ratios across complete graphs for every `(v, k)` combination.
pub fn sweep_complete_graphs(vertex_counts: &[u64], ks: &[u32]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(vertex_counts.len() * ks.len());
    for &v in vertex_counts {
        if v < 2 {
            return Err(Error::InvalidArgument(format!(
                "complete-graph sweep needs at least two vertices, got {v}"
            )));
        }
        let e = v * (v - 1) / 2;
        for &k in ks {
            let m = qubits_per_vertex(k)?;
            let native = native_cluster_size(v, e, k)?;
            rows.push(SweepRow {
                vertices: v,
                edges: e,
                k,
                qubits_per_vertex: m,
                native_nodes: native,
                standard_ratio: overhead_ratio(v, e, k, TranslationMethod::Standard)?,
                emc_ratio: overhead_ratio(v, e, k, TranslationMethod::Emc)?,
                emc_m_opt_ratio: overhead_ratio(v, e, k, TranslationMethod::EmcMOptimized)?,
                emc_m_opt_gate_ratio: if m >= 2 {
                    Some(m_optimized_cluster_size_from_gates(v, e, k)? as f64 / native as f64)
                } else {
                    None
                },
            });
        }
    }
    Ok(rows)
}

/// Renders sweep rows as CSV (header line included, empty cell for
/// undefined entries).
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "vertices,edges,k,qubits_per_vertex,native_nodes,standard_ratio,emc_ratio,emc_m_opt_ratio,emc_m_opt_gate_ratio\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.vertices,
            r.edges,
            r.k,
            r.qubits_per_vertex,
            r.native_nodes,
            r.standard_ratio,
            r.emc_ratio,
            r.emc_m_opt_ratio,
            r.emc_m_opt_gate_ratio
                .map(|x| x.to_string())
                .unwrap_or_default(),
        ));
    }
    out
}
