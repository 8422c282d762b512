//! Polynomial algebra over tensor products of Pauli Z operators.
//!
//! Every operator handled here is a real linear combination of terms
//! `Z_{i1} Z_{i2} ... Z_{ik}`, stored as a map from support bitmask to
//! coefficient (qubit 0 = least significant bit). All such operators are
//! diagonal in the computational basis, commute with each other, and square
//! to diagonal operators again, so the algebra is closed under addition and
//! multiplication:
//!
//! * term product: supports combine by XOR (`Z^2 = Id`), coefficients
//!   multiply;
//! * diagonal entry at basis index `x`: sum of `c * (-1)^popcount(s & x)`
//!   over terms `(s, c)`.
//!
//! [`projector_onto_first`] builds the projector onto the span of the first
//! `M` computational basis states of an `m`-qubit register by recursive
//! halving: indices below `2^(m-1)` are captured by `(Id + Z_{m-1}) / 2`,
//! the remainder recurses into the upper half through `(Id - Z_{m-1}) / 2`,
//! and exact powers of two terminate the recursion.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Coefficients with magnitude below this are dropped when simplifying.
pub const COEFF_EPSILON: f64 = 1e-15;

/// Largest register a dense diagonal is materialized for by default.
pub const DENSE_QUBIT_LIMIT: usize = 24;

/// A real linear combination of Z-products on a fixed-width register.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPolynomial {
    qubit_count: usize,
    terms: BTreeMap<u64, f64>,
}

impl ZPolynomial {
    /// The zero operator on `qubit_count` qubits.
    pub fn zero(qubit_count: usize) -> Result<Self> {
        if qubit_count > 64 {
            return Err(Error::SizeGuard {
                what: format!("Z polynomial on {qubit_count} qubits"),
                limit: 64,
            });
        }
        Ok(ZPolynomial {
            qubit_count,
            terms: BTreeMap::new(),
        })
    }

    /// `c * Id` on `qubit_count` qubits.
    pub fn identity(qubit_count: usize, c: f64) -> Result<Self> {
        let mut p = ZPolynomial::zero(qubit_count)?;
        p.add_term(0, c);
        Ok(p)
    }

    /// A single Z-product term `c * prod_{i in support} Z_i`.
    pub fn term(qubit_count: usize, support: u64, c: f64) -> Result<Self> {
        let mut p = ZPolynomial::zero(qubit_count)?;
        if qubit_count < 64 && support >> qubit_count != 0 {
            return Err(Error::InvalidArgument(format!(
                "support {support:#x} exceeds {qubit_count} qubits"
            )));
        }
        p.add_term(support, c);
        Ok(p)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Terms in ascending support order. The constant term, if any, has
    /// support 0.
    pub fn terms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.terms.iter().map(|(&s, &c)| (s, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, support: u64) -> f64 {
        self.terms.get(&support).copied().unwrap_or(0.0)
    }

    /// Adds `c` to the coefficient of `support`, dropping the term if the
    /// result is below [`COEFF_EPSILON`]. Insertion order cannot matter:
    /// the map is keyed by support and addition is commutative.
    pub fn add_term(&mut self, support: u64, c: f64) {
        let entry = self.terms.entry(support).or_insert(0.0);
        *entry += c;
        if entry.abs() < COEFF_EPSILON {
            self.terms.remove(&support);
        }
    }

    pub fn add(&self, other: &ZPolynomial) -> ZPolynomial {
        let mut out = self.clone();
        out.qubit_count = self.qubit_count.max(other.qubit_count);
        for (s, c) in other.terms() {
            out.add_term(s, c);
        }
        out
    }

    pub fn sub(&self, other: &ZPolynomial) -> ZPolynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> ZPolynomial {
        let mut out = ZPolynomial {
            qubit_count: self.qubit_count,
            terms: BTreeMap::new(),
        };
        for (s, c) in self.terms() {
            out.add_term(s, c * factor);
        }
        out
    }

    /// Operator product. `Z^2 = Id` makes term supports combine by XOR.
    pub fn mul(&self, other: &ZPolynomial) -> ZPolynomial {
        let mut out = ZPolynomial {
            qubit_count: self.qubit_count.max(other.qubit_count),
            terms: BTreeMap::new(),
        };
        for (s1, c1) in self.terms() {
            for (s2, c2) in other.terms() {
                out.add_term(s1 ^ s2, c1 * c2);
            }
        }
        out
    }

    /// The same polynomial with every support shifted up by `offset` qubits
    /// on a register of `new_qubit_count` qubits.
    pub fn shifted(&self, offset: usize, new_qubit_count: usize) -> Result<ZPolynomial> {
        let mut out = ZPolynomial::zero(new_qubit_count)?;
        for (s, c) in self.terms() {
            let shifted = s.checked_shl(offset as u32).ok_or_else(|| {
                Error::InvalidArgument(format!("shift by {offset} overflows support"))
            })?;
            if new_qubit_count < 64 && shifted >> new_qubit_count != 0 {
                return Err(Error::InvalidArgument(format!(
                    "shifted support exceeds {new_qubit_count} qubits"
                )));
            }
            out.add_term(shifted, c);
        }
        Ok(out)
    }

    /// Diagonal entry at computational basis index `x`.
    pub fn diagonal_entry(&self, x: u64) -> f64 {
        let mut total = 0.0;
        for (s, c) in self.terms() {
            let parity = (s & x).count_ones() & 1;
            total += if parity == 0 { c } else { -c };
        }
        total
    }

    /// The full diagonal as a dense vector of length `2^qubit_count`.
    ///
    /// Guarded by `max_qubits` (pass [`DENSE_QUBIT_LIMIT`] by default).
    pub fn dense_diagonal(&self, max_qubits: usize) -> Result<Vec<f64>> {
        if self.qubit_count > max_qubits {
            return Err(Error::SizeGuard {
                what: format!("dense diagonal on {} qubits", self.qubit_count),
                limit: max_qubits as u64,
            });
        }
        let dim = 1usize << self.qubit_count;
        Ok((0..dim as u64).map(|x| self.diagonal_entry(x)).collect())
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let doc = ZPolynomialDoc {
            qubit_count: self.qubit_count,
            terms: self
                .terms()
                .map(|(s, c)| ZTermDoc {
                    support_bits: s,
                    coeff: c,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ZPolynomialDoc = serde_json::from_str(text)?;
        let mut p = ZPolynomial::zero(doc.qubit_count)?;
        for t in doc.terms {
            if doc.qubit_count < 64 && t.support_bits >> doc.qubit_count != 0 {
                return Err(Error::Serialization(format!(
                    "support {:#x} exceeds {} qubits",
                    t.support_bits, doc.qubit_count
                )));
            }
            p.add_term(t.support_bits, t.coeff);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct ZPolynomialDoc {
    qubit_count: usize,
    terms: Vec<ZTermDoc>,
}

#[derive(Serialize, Deserialize)]
struct ZTermDoc {
    support_bits: u64,
    coeff: f64,
}

/// Projector onto the span of the first `m_states` computational basis
/// states (indices `0..m_states`) of an `m`-qubit register, expanded in the
/// Z-product basis.
///
/// Requires `1 <= m_states <= 2^m`. The expansion has at most `2^m` terms
/// and is reached by recursing on the most significant qubit.
pub fn projector_onto_first(m_states: u64, m: usize) -> Result<ZPolynomial> {
    if m > 63 {
        return Err(Error::SizeGuard {
            what: format!("projector on {m} qubits"),
            limit: 63,
        });
    }
    let dim = 1u64 << m;
    if m_states == 0 || m_states > dim {
        return Err(Error::InvalidArgument(format!(
            "projector rank {m_states} outside 1..={dim}"
        )));
    }
    let p = projector_recursive(m_states, m)?;
    p.shifted(0, m)
}

fn projector_recursive(m_states: u64, m: usize) -> Result<ZPolynomial> {
    let dim = 1u64 << m;
    if m_states == dim {
        return ZPolynomial::identity(m, 1.0);
    }
    // m >= 1 from here: m_states < dim rules out m = 0.
    let half = dim >> 1;
    let top = 1u64 << (m - 1);
    // (Id + Z_top) / 2 projects onto indices with the top bit clear.
    let mut lower = ZPolynomial::identity(m, 0.5)?;
    lower.add_term(top, 0.5);
    if m_states <= half {
        // Everything lives in the lower half-space.
        let inner = projector_recursive(m_states, m - 1)?;
        Ok(inner.mul(&lower))
    } else {
        // Keep the whole lower half, recurse into the upper half through
        // (Id - Z_top) / 2.
        let mut upper = ZPolynomial::identity(m, 0.5)?;
        upper.add_term(top, -0.5);
        let inner = projector_recursive(m_states - half, m - 1)?;
        Ok(lower.add(&inner.mul(&upper)))
    }
}
