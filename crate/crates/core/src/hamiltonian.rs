//! The binary-encoded MAX K-CUT cost Hamiltonian and its invalid-class
//! penalty.
//!
//! Each vertex gets `m = ceil(log2 K)` qubits; vertex `j` owns qubits
//! `j*m .. j*m + m - 1` and stores its class label in binary with the
//! least significant bit on qubit `j*m`. For an edge `(u, v)` the cost
//! term is
//!
//! ```text
//! H_e = (2^m - 1)/2^m * Id - 1/2^m * sum_{l=1}^{2^m - 1} Z^l_u (x) Z^l_v
//! ```
//!
//! where `Z^l` places a Z on each encoding qubit selected by the binary
//! digits of `l`. On computational basis states this acts as the indicator
//! that the two labels differ, so the diagonal of the weighted sum over all
//! edges is exactly the cut value. When `K < 2^m` the surplus labels
//! `K..2^m` are suppressed by subtracting, per edge, a penalty that counts
//! edges with at least one invalidly-labeled endpoint.

use crate::graph::{Assignment, Graph};
use crate::pauli::{projector_onto_first, ZPolynomial};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How class labels map onto qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingParams {
    /// Number of cut classes, `K >= 2`.
    pub k: u32,
    /// Qubits per vertex, `ceil(log2 K)`.
    pub qubits_per_vertex: usize,
    /// Vertices in the encoded register.
    pub vertex_count: usize,
}

impl EncodingParams {
    pub fn new(k: u32, vertex_count: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("K must be >= 2, got {k}")));
        }
        let m = (64 - (k as u64 - 1).leading_zeros()) as usize;
        let total = m
            .checked_mul(vertex_count)
            .filter(|&t| t <= 64)
            .ok_or_else(|| Error::SizeGuard {
                what: format!("{vertex_count} vertices at {m} qubits each"),
                limit: 64,
            })?;
        let _ = total;
        Ok(EncodingParams {
            k,
            qubits_per_vertex: m,
            vertex_count,
        })
    }

    pub fn total_qubits(&self) -> usize {
        self.qubits_per_vertex * self.vertex_count
    }

    /// Whether every representable label is a valid class (`K = 2^m`).
    pub fn is_power_of_two(&self) -> bool {
        self.k.is_power_of_two()
    }

    /// Number of representable labels, `2^m`.
    pub fn label_space(&self) -> u64 {
        1u64 << self.qubits_per_vertex
    }
}

/// Packs an assignment into a computational basis index. Labels must fit in
/// `m` bits (labels in `K..2^m` are representable on purpose: they are the
/// invalid classes the penalty addresses).
pub fn encode_assignment(enc: &EncodingParams, assignment: &[u32]) -> Result<u64> {
    if assignment.len() != enc.vertex_count {
        return Err(Error::InvalidAssignment(format!(
            "assignment length {} for {} vertices",
            assignment.len(),
            enc.vertex_count
        )));
    }
    let mut idx = 0u64;
    for (j, &label) in assignment.iter().enumerate() {
        if u64::from(label) >= enc.label_space() {
            return Err(Error::InvalidAssignment(format!(
                "label {label} does not fit in {} bits",
                enc.qubits_per_vertex
            )));
        }
        idx |= u64::from(label) << (j * enc.qubits_per_vertex);
    }
    Ok(idx)
}

/// Unpacks a basis index into per-vertex labels.
pub fn decode_index(enc: &EncodingParams, index: u64) -> Assignment {
    let mask = enc.label_space() - 1;
    (0..enc.vertex_count)
        .map(|j| ((index >> (j * enc.qubits_per_vertex)) & mask) as u32)
        .collect()
}

/// The unweighted cost term for one edge, embedded on the full register.
pub fn build_edge_term(enc: &EncodingParams, u: usize, v: usize) -> Result<ZPolynomial> {
    if u >= enc.vertex_count || v >= enc.vertex_count || u == v {
        return Err(Error::InvalidArgument(format!(
            "edge ({u}, {v}) invalid for {} vertices",
            enc.vertex_count
        )));
    }
    let m = enc.qubits_per_vertex;
    let dim = enc.label_space();
    let scale = 1.0 / dim as f64;
    let mut h = ZPolynomial::identity(enc.total_qubits(), (dim - 1) as f64 * scale)?;
    for l in 1..dim {
        let mut support = 0u64;
        for bit in 0..m {
            if (l >> bit) & 1 == 1 {
                support |= 1u64 << (u * m + bit);
                support |= 1u64 << (v * m + bit);
            }
        }
        h.add_term(support, -scale);
    }
    Ok(h)
}

/// Weighted sum of edge terms: diagonal entries are cut values.
pub fn build_target(g: &Graph, enc: &EncodingParams) -> Result<ZPolynomial> {
    if enc.vertex_count != g.vertex_count() {
        return Err(Error::InvalidArgument(format!(
            "encoding for {} vertices used with graph of {}",
            enc.vertex_count,
            g.vertex_count()
        )));
    }
    let mut h = ZPolynomial::zero(enc.total_qubits())?;
    for e in g.edges() {
        let term = build_edge_term(enc, e.u, e.v)?;
        h = h.add(&term.scale(e.weight));
    }
    Ok(h)
}

/// Indicator of invalid labels on a single vertex's `m`-qubit register:
/// `Id - P` where `P` projects onto the first `K` labels. Zero when
/// `K = 2^m`.
pub fn build_vertex_penalty(enc: &EncodingParams) -> Result<ZPolynomial> {
    let m = enc.qubits_per_vertex;
    let projector = projector_onto_first(u64::from(enc.k), m)?;
    Ok(ZPolynomial::identity(m, 1.0)?.sub(&projector))
}

/// Weighted count of edges with at least one invalidly-labeled endpoint:
/// per edge, `H_u + H_v - H_u H_v` by inclusion-exclusion, where `H_j` is
/// the vertex indicator lifted to vertex `j`'s qubits.
pub fn build_penalty(g: &Graph, enc: &EncodingParams) -> Result<ZPolynomial> {
    if enc.vertex_count != g.vertex_count() {
        return Err(Error::InvalidArgument(format!(
            "encoding for {} vertices used with graph of {}",
            enc.vertex_count,
            g.vertex_count()
        )));
    }
    let m = enc.qubits_per_vertex;
    let total = enc.total_qubits();
    let vertex = build_vertex_penalty(enc)?;
    let mut h = ZPolynomial::zero(total)?;
    if !enc.is_power_of_two() {
        for e in g.edges() {
            let hu = vertex.shifted(e.u * m, total)?;
            let hv = vertex.shifted(e.v * m, total)?;
            let both = hu.mul(&hv);
            let edge = hu.add(&hv).sub(&both);
            h = h.add(&edge.scale(e.weight));
        }
    }
    Ok(h)
}

/// Cost minus penalty: rewards cut edges only when both endpoints carry
/// valid class labels.
pub fn build_penalized_target(g: &Graph, enc: &EncodingParams) -> Result<ZPolynomial> {
    let target = build_target(g, enc)?;
    let penalty = build_penalty(g, enc)?;
    Ok(target.sub(&penalty))
}

/// One energy level of a diagonal operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLevel {
    pub energy: f64,
    /// Number of basis states at this energy.
    pub degeneracy: u64,
    /// Decoded assignments of the lowest-index states at this energy,
    /// capped at the report's `representative_cap`.
    pub representatives: Vec<Assignment>,
}

/// Grouped diagonal spectrum, energies strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub levels: Vec<SpectrumLevel>,
    /// Energies closer than this were merged into one level.
    pub tolerance: f64,
    pub representative_cap: usize,
}

/// Default energy-grouping tolerance for [`spectrum`].
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

/// Default number of representatives retained per level.
pub const REPRESENTATIVE_CAP: usize = 8;

/// Groups the dense diagonal of `h` into energy levels.
///
/// Energies are bucketed by rounding to multiples of `tolerance`; total
/// degeneracy always sums to `2^n`.
pub fn spectrum(
    h: &ZPolynomial,
    enc: &EncodingParams,
    tolerance: f64,
    representative_cap: usize,
    max_qubits: usize,
) -> Result<SpectrumReport> {
    if h.qubit_count() != enc.total_qubits() {
        return Err(Error::InvalidArgument(format!(
            "operator on {} qubits with encoding of {}",
            h.qubit_count(),
            enc.total_qubits()
        )));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spectrum tolerance must be positive, got {tolerance}"
        )));
    }
    let diag = h.dense_diagonal(max_qubits)?;
    let mut buckets: std::collections::BTreeMap<i64, (f64, u64, Vec<Assignment>)> =
        std::collections::BTreeMap::new();
    for (x, &energy) in diag.iter().enumerate() {
        let key = (energy / tolerance).round() as i64;
        let entry = buckets.entry(key).or_insert((energy, 0, Vec::new()));
        entry.1 += 1;
        if entry.2.len() < representative_cap {
            entry.2.push(decode_index(enc, x as u64));
        }
    }
    let levels = buckets
        .into_values()
        .map(|(energy, degeneracy, representatives)| SpectrumLevel {
            energy,
            degeneracy,
            representatives,
        })
        .collect();
    Ok(SpectrumReport {
        levels,
        tolerance,
        representative_cap,
    })
}

impl SpectrumReport {
    pub fn top(&self) -> Option<&SpectrumLevel> {
        self.levels.last()
    }

    pub fn bottom(&self) -> Option<&SpectrumLevel> {
        self.levels.first()
    }
}

/// Checks, by dense enumeration on a two-vertex register, that the edge
/// term acts as the indicator that the two labels differ: diagonal entry 1
/// on `|w> (x) |u>` with `w != u`, and 0 on `|w> (x) |w>`. Returns the
/// largest absolute deviation found.
pub fn check_edge_term_indicator(m: usize) -> Result<f64> {
    if m == 0 || m > 12 {
        return Err(Error::InvalidArgument(format!(
            "indicator check supports 1..=12 qubits per vertex, got {m}"
        )));
    }
    let enc = EncodingParams::new(1u32 << m, 2)?;
    let h = build_edge_term(&enc, 0, 1)?;
    let dim = enc.label_space();
    let mut worst = 0.0f64;
    for w in 0..dim {
        for u in 0..dim {
            let idx = w | (u << m);
            let expect = if w == u { 0.0 } else { 1.0 };
            let dev = (h.diagonal_entry(idx) - expect).abs();
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_max_kcut, cut_value, Edge, BRUTE_FORCE_DEFAULT_BITS};
    use proptest::prelude::*;

    #[test]
    fn encoding_params_round_up() {
        for (k, m) in [(2u32, 1usize), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)] {
            let enc = EncodingParams::new(k, 1).unwrap();
            assert_eq!(enc.qubits_per_vertex, m, "K={k}");
        }
        assert!(EncodingParams::new(1, 1).is_err());
        assert!(EncodingParams::new(2, 65).is_err());
    }

    #[test]
    fn encode_decode_examples() {
        let enc = EncodingParams::new(4, 4).unwrap();
        // Vertex 0 occupies the low bits.
        assert_eq!(encode_assignment(&enc, &[1, 0, 0, 0]).unwrap(), 0b01);
        assert_eq!(encode_assignment(&enc, &[0, 2, 0, 0]).unwrap(), 0b1000);
        let idx = encode_assignment(&enc, &[0, 1, 2, 3]).unwrap();
        assert_eq!(idx, 0b11_10_01_00);
        assert_eq!(decode_index(&enc, idx), vec![0, 1, 2, 3]);
        assert!(encode_assignment(&enc, &[4, 0, 0, 0]).is_err());
        assert!(encode_assignment(&enc, &[0, 0]).is_err());
    }

    #[test]
    fn encode_decode_round_trip_k3() {
        // K=3 uses the full 2-bit label space including the invalid label 3.
        let enc = EncodingParams::new(3, 3).unwrap();
        for idx in 0..1u64 << enc.total_qubits() {
            let a = decode_index(&enc, idx);
            assert_eq!(encode_assignment(&enc, &a).unwrap(), idx);
        }
    }

    #[test]
    fn edge_term_single_qubit_diagonal() {
        // m = 1: (Id - Z_0 Z_1) / 2 with diagonal (0, 1, 1, 0).
        let enc = EncodingParams::new(2, 2).unwrap();
        let h = build_edge_term(&enc, 0, 1).unwrap();
        assert_eq!(h.dense_diagonal(24).unwrap(), vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(h.term_count(), 2);
        assert_eq!(h.coefficient(0), 0.5);
        assert_eq!(h.coefficient(0b11), -0.5);
    }

    #[test]
    fn edge_term_has_full_summand_count() {
        // 2^m - 1 non-identity terms, each with coefficient -1/2^m.
        let enc = EncodingParams::new(4, 2).unwrap();
        let h = build_edge_term(&enc, 0, 1).unwrap();
        assert_eq!(h.term_count(), 4);
        assert_eq!(h.coefficient(0), 0.75);
        for (support, coeff) in h.terms() {
            if support != 0 {
                assert_eq!(coeff, -0.25);
                // Support pairs up identically on both vertex registers.
                assert_eq!(support & 0b11, (support >> 2) & 0b11);
            }
        }
    }

    #[test]
    fn edge_term_rejects_bad_edges() {
        let enc = EncodingParams::new(2, 2).unwrap();
        assert!(build_edge_term(&enc, 0, 0).is_err());
        assert!(build_edge_term(&enc, 0, 2).is_err());
    }

    #[test]
    fn edge_term_indicator_small_m() {
        for m in 1..=3 {
            let worst = check_edge_term_indicator(m).unwrap();
            assert!(worst <= 1e-12, "m={m} deviation {worst}");
        }
    }

    #[test]
    fn target_diagonal_is_cut_value_k4() {
        let g = Graph::complete(4);
        let enc = EncodingParams::new(4, 4).unwrap();
        let h = build_target(&g, &enc).unwrap();
        let idx = encode_assignment(&enc, &[0, 1, 2, 3]).unwrap();
        assert!((h.diagonal_entry(idx) - 6.0).abs() < 1e-12);
        let same = encode_assignment(&enc, &[2, 2, 2, 2]).unwrap();
        assert!(h.diagonal_entry(same).abs() < 1e-12);
    }

    #[test]
    fn target_diagonal_matches_cut_exhaustively() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4usize {
            for k in [2u32, 4] {
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in (u + 1)..n {
                        edges.push(Edge {
                            u,
                            v,
                            weight: rng.gen_range(-2.0..2.0),
                        });
                    }
                }
                let g = Graph::new(n, edges).unwrap();
                let enc = EncodingParams::new(k, n).unwrap();
                let h = build_target(&g, &enc).unwrap();
                let dim = 1u64 << enc.total_qubits();
                for idx in 0..dim {
                    let labels = decode_index(&enc, idx);
                    let expect = cut_value(&g, &labels).unwrap();
                    assert!(
                        (h.diagonal_entry(idx) - expect).abs() < 1e-9,
                        "n={n} K={k} idx={idx}"
                    );
                }
            }
        }
    }

    #[test]
    fn target_of_empty_graph_is_zero() {
        let g = Graph::new(3, vec![]).unwrap();
        let enc = EncodingParams::new(2, 3).unwrap();
        let h = build_target(&g, &enc).unwrap();
        assert_eq!(h.term_count(), 0);
    }

    #[test]
    fn vertex_penalty_k3_diagonal() {
        let enc = EncodingParams::new(3, 1).unwrap();
        let hv = build_vertex_penalty(&enc).unwrap();
        assert_eq!(hv.dense_diagonal(24).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        // Indicator is idempotent.
        let sq = hv.mul(&hv);
        assert!(sq.sub(&hv).max_abs_coefficient() < 1e-12);
    }

    #[test]
    fn vertex_penalty_vanishes_for_power_of_two() {
        for k in [2u32, 4, 8] {
            let enc = EncodingParams::new(k, 1).unwrap();
            let hv = build_vertex_penalty(&enc).unwrap();
            assert_eq!(hv.term_count(), 0, "K={k}");
        }
    }

    #[test]
    fn penalty_counts_affected_edges() {
        // Single edge, K=3: penalty 1 iff either endpoint has label 3.
        let g = Graph::new(
            2,
            vec![Edge {
                u: 0,
                v: 1,
                weight: 1.0,
            }],
        )
        .unwrap();
        let enc = EncodingParams::new(3, 2).unwrap();
        let hp = build_penalty(&g, &enc).unwrap();
        for cu in 0..4u64 {
            for cv in 0..4u64 {
                let idx = cu | (cv << 2);
                let expect = if cu == 3 || cv == 3 { 1.0 } else { 0.0 };
                assert!(
                    (hp.diagonal_entry(idx) - expect).abs() < 1e-12,
                    "labels ({cu}, {cv})"
                );
            }
        }
    }

    #[test]
    fn penalty_zero_for_power_of_two() {
        let g = Graph::complete(3);
        let enc = EncodingParams::new(4, 3).unwrap();
        let hp = build_penalty(&g, &enc).unwrap();
        assert_eq!(hp.term_count(), 0);
        let ht = build_target(&g, &enc).unwrap();
        let tilde = build_penalized_target(&g, &enc).unwrap();
        assert_eq!(ht, tilde);
    }

    #[test]
    fn penalty_matches_classical_count_k3() {
        let g = Graph::complete(4);
        let enc = EncodingParams::new(3, 4).unwrap();
        let hp = build_penalty(&g, &enc).unwrap();
        for idx in 0..1u64 << enc.total_qubits() {
            let labels = decode_index(&enc, idx);
            let expect: f64 = g
                .edges()
                .iter()
                .filter(|e| labels[e.u] >= 3 || labels[e.v] >= 3)
                .map(|e| e.weight)
                .sum();
            assert!((hp.diagonal_entry(idx) - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn penalized_target_demotes_invalid_labels() {
        let g = Graph::complete(4);
        let enc = EncodingParams::new(3, 4).unwrap();
        let h = build_penalized_target(&g, &enc).unwrap();
        // Valid three-class optimum.
        let best = encode_assignment(&enc, &[0, 1, 2, 2]).unwrap();
        assert!((h.diagonal_entry(best) - 5.0).abs() < 1e-12);
        // The four-class cut scores below once penalized.
        let invalid = encode_assignment(&enc, &[0, 1, 2, 3]).unwrap();
        assert!((h.diagonal_entry(invalid) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_complete_four_with_four_classes() {
        let g = Graph::complete(4);
        let enc = EncodingParams::new(4, 4).unwrap();
        let h = build_target(&g, &enc).unwrap();
        let report = spectrum(&h, &enc, SPECTRUM_TOLERANCE, 30, 24).unwrap();
        let top = report.top().unwrap();
        assert!((top.energy - 6.0).abs() < 1e-12);
        assert_eq!(top.degeneracy, 24);
        assert!(top.representatives.contains(&vec![0, 1, 2, 3]));
        let bottom = report.bottom().unwrap();
        assert!(bottom.energy.abs() < 1e-12);
        assert_eq!(bottom.degeneracy, 4);
        let total: u64 = report.levels.iter().map(|l| l.degeneracy).sum();
        assert_eq!(total, 256);
        for pair in report.levels.windows(2) {
            assert!(pair[0].energy < pair[1].energy);
        }
    }

    #[test]
    fn spectrum_penalized_k3_top_level() {
        let g = Graph::complete(4);
        let enc = EncodingParams::new(3, 4).unwrap();
        let h = build_penalized_target(&g, &enc).unwrap();
        let report = spectrum(&h, &enc, SPECTRUM_TOLERANCE, 64, 24).unwrap();
        let top = report.top().unwrap();
        assert!((top.energy - 5.0).abs() < 1e-12);
        for rep in &top.representatives {
            assert!(rep.iter().all(|&c| c < 3), "top level uses only valid labels");
        }
    }

    #[test]
    fn spectrum_rejects_bad_tolerance() {
        let g = Graph::complete(2);
        let enc = EncodingParams::new(2, 2).unwrap();
        let h = build_target(&g, &enc).unwrap();
        assert!(spectrum(&h, &enc, 0.0, 4, 24).is_err());
    }

    proptest! {
        // Brute force and the diagonal spectrum agree on the optimum for
        // K = 2^m, where every basis state is a valid assignment.
        #[test]
        fn spectrum_top_matches_brute_force(seed in 0u64..200) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2usize..5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.7) {
                        edges.push(Edge { u, v, weight: rng.gen_range(0.5..2.0) });
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let enc = EncodingParams::new(4, n).unwrap();
            let h = build_target(&g, &enc).unwrap();
            let report = spectrum(&h, &enc, SPECTRUM_TOLERANCE, 4, 24).unwrap();
            let brute = brute_force_max_kcut(&g, 4, BRUTE_FORCE_DEFAULT_BITS).unwrap();
            let top = report.top().unwrap();
            prop_assert!((top.energy - brute.optimum).abs() < 1e-9);
        }
    }
}
