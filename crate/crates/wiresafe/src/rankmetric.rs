//! Rank-metric codes: Gabidulin parity checks and MRD verification.
//!
//! The rank distance between two length-n words over GF(2^m) is the
//! GF(2)-rank of their difference's n x m coefficient matrix. A code
//! that meets the rank-metric Singleton bound with equality is maximum
//! rank distance (MRD); Gabidulin codes achieve this for every n <= m.
//!
//! We use the parity-check view throughout: a k x n Moore matrix
//! `H[i][j] = g_j^(2^i)` over GF(2^m) whose generators g_1..g_n are
//! GF(2)-linearly independent. Its kernel is an (n, n-k) Gabidulin code
//! with minimum rank distance k + 1. The syndrome `S = H X` is what the
//! coset layer in [`crate::coset`] treats as the message.
//!
//! Everything claimed here is also *checkable* here, by exhaustive
//! search at desk scale: [`min_rank_distance_bruteforce`] enumerates
//! every codeword, and [`verify_distance_characterization`] / [`verify_mrd_criterion`]
//! test the matrix-product characterizations of rank distance against
//! all binary column-combination matrices `T`.

use serde::{Deserialize, Serialize};

use crate::budget::{pow_saturating, Budget};
use crate::error::{Error, Result};
use crate::gf::{
    enumerate_full_rank, rank_base, BaseMatrix, ExtMatrix, FieldDescription, FieldElement,
    FieldSpec,
};

/// A Gabidulin code in parity-check form: the k x n Moore matrix of a
/// GF(2)-independent generator vector. `k` is the syndrome dimension
/// (number of parity rows); the code itself has dimension `n - k` over
/// GF(2^m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GabidulinCode {
    spec: FieldSpec,
    n: usize,
    k: usize,
    generators: Vec<FieldElement>,
    h: ExtMatrix,
}

impl GabidulinCode {
    /// Build from explicit generators (length n, GF(2)-independent).
    pub fn new(spec: FieldSpec, k: usize, generators: Vec<FieldElement>) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::InvalidInput("need at least one generator".into()));
        }
        if n > spec.m() as usize {
            return Err(Error::LengthExceedsDegree { n, m: spec.m() });
        }
        if k > n {
            return Err(Error::DimensionMismatch(format!(
                "k = {k} parity rows but only n = {n} symbols"
            )));
        }
        for g in &generators {
            if g.spec() != spec {
                return Err(Error::FieldMismatch);
            }
        }
        if rank_base(&generators)? != n {
            return Err(Error::DependentGenerators);
        }
        let h = ExtMatrix::from_fn(spec, k, n, |i, j| generators[j].frobenius(i as u32));
        Ok(GabidulinCode { spec, n, k, generators, h })
    }

    /// Standard generators 1, a, a^2, ..., a^(n-1) (the monomial basis,
    /// GF(2)-independent for every n <= m).
    pub fn with_standard_generators(spec: FieldSpec, n: usize, k: usize) -> Result<Self> {
        let a = spec.alpha();
        let generators = (0..n).map(|j| a.pow(j as u64)).collect();
        GabidulinCode::new(spec, k, generators)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Syndrome dimension = number of parity rows.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Code dimension over GF(2^m).
    pub fn dimension(&self) -> usize {
        self.n - self.k
    }

    /// Designed minimum rank distance, k + 1 (met exactly; see tests).
    pub fn designed_distance(&self) -> usize {
        self.k + 1
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    /// The k x n Moore parity-check matrix.
    pub fn parity_check(&self) -> &ExtMatrix {
        &self.h
    }

    pub fn min_rank_distance(&self, budget: &Budget) -> Result<usize> {
        min_rank_distance_bruteforce(&self.h, budget)
    }

    pub fn verify_distance_characterization(&self, d: usize, budget: &Budget) -> Result<DistanceCheck> {
        verify_distance_characterization(&self.h, d, budget)
    }

    pub fn verify_mrd_criterion(&self, budget: &Budget) -> Result<bool> {
        verify_mrd_criterion(&self.h, budget)
    }

    // ── serialization ──────────────────────────────────────────────────────

    /// JSON-facing description; the parity check is never serialized,
    /// it is recomputed on load so no inconsistent state can exist.
    pub fn description(&self) -> CodeDescription {
        CodeDescription {
            field: FieldDescription::from_spec(self.spec),
            n: self.n,
            k: self.k,
            generators: self.generators.iter().map(|g| g.to_hex()).collect(),
        }
    }

    pub fn from_description(desc: &CodeDescription) -> Result<Self> {
        let spec = desc.field.to_spec()?;
        let generators = desc
            .generators
            .iter()
            .map(|g| spec.element_from_hex(g))
            .collect::<Result<Vec<_>>>()?;
        if generators.len() != desc.n {
            return Err(Error::DimensionMismatch(format!(
                "description says n = {} but lists {} generators",
                desc.n,
                generators.len()
            )));
        }
        GabidulinCode::new(spec, desc.k, generators)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.description()).expect("description always serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let desc: CodeDescription = serde_json::from_str(s)?;
        GabidulinCode::from_description(&desc)
    }
}

/// Serialized form of a [`GabidulinCode`]: field, sizes, generators in
/// lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescription {
    pub field: FieldDescription,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<String>,
}

/// Rank distance between equal-length words: GF(2)-rank of x - y.
pub fn rank_distance(x: &[FieldElement], y: &[FieldElement]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "rank distance between lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let diff: Vec<FieldElement> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    rank_base(&diff)
}

/// log2 of the rank-metric Singleton bound on code size:
/// |C| <= 2^(max(n,m) * (min(n,m) - d + 1)).
pub fn singleton_log_size_bound(n: usize, m: u32, d: usize) -> Result<u64> {
    let m = m as usize;
    if d < 1 || d > n.min(m) {
        return Err(Error::InvalidInput(format!(
            "distance d = {d} outside 1..=min(n, m) = {}",
            n.min(m)
        )));
    }
    Ok((n.max(m) * (n.min(m) - d + 1)) as u64)
}

/// Largest minimum rank distance a dimension-`dim` code of length n
/// over GF(2^m) can have (the Singleton bound solved for d).
pub fn singleton_distance_bound(n: usize, m: u32, dim: usize) -> Result<usize> {
    let m = m as usize;
    if dim > n {
        return Err(Error::InvalidInput(format!(
            "dimension {dim} exceeds length {n}"
        )));
    }
    Ok(if m >= n {
        n - dim + 1
    } else {
        m * (n - dim) / n + 1
    })
}

/// Minimum rank distance of the kernel code of `h`, by enumerating
/// every nonzero codeword (budget-gated).
pub fn min_rank_distance_bruteforce(h: &ExtMatrix, budget: &Budget) -> Result<usize> {
    let spec = h.spec();
    let basis = h.kernel_basis();
    let dim = basis.len();
    if dim == 0 {
        return Err(Error::DegenerateCode(
            "kernel is trivial; no nonzero codewords".into(),
        ));
    }
    let order = pow_saturating(2, spec.m());
    let count = pow_saturating(order, dim as u32);
    budget.check_enumeration(count)?;
    let mut min = usize::MAX;
    for idx in 1..count {
        let mut word = vec![spec.zero(); h.cols()];
        let mut rest = idx;
        for b in basis.iter() {
            let digit = rest % order;
            rest /= order;
            if digit != 0 {
                let c = spec.element(digit).expect("digit < 2^m");
                for (w, &bj) in word.iter_mut().zip(b) {
                    *w += c * bj;
                }
            }
        }
        min = min.min(rank_base(&word)?);
        if min == 1 {
            break; // cannot get lower
        }
    }
    Ok(min)
}

/// Outcome of the two-sided minimum-distance characterization check.
#[derive(Debug, Clone)]
pub struct DistanceCheck {
    /// True iff the kernel code of `h` has minimum rank distance
    /// exactly `d`.
    pub holds: bool,
    /// A full-column-rank binary T (n x d) with rank(H T) < d — the
    /// witness that distance d+1 is not achieved. Present iff found.
    pub rank_drop_witness: Option<BaseMatrix>,
}

/// Check that the kernel code of `h` has minimum rank distance exactly
/// `d`, via the matrix characterization: (i) for every full-column-rank
/// binary T with d-1 columns, rank(H T) = d - 1; (ii) some full-column-
/// rank binary T with d columns drops rank. Exhaustive over T.
pub fn verify_distance_characterization(h: &ExtMatrix, d: usize, budget: &Budget) -> Result<DistanceCheck> {
    if d == 0 {
        return Err(Error::InvalidInput("distance must be at least 1".into()));
    }
    let n = h.cols();

    // (i) no rank drop with d - 1 columns (distance >= d)
    let mut no_drop_below = true;
    if d - 1 <= n {
        for t_rows in enumerate_full_rank(d - 1, n, budget)? {
            let t = t_rows.transpose();
            if h.mul_base(&t)?.rank() != d - 1 {
                no_drop_below = false;
                break;
            }
        }
    }

    // (ii) some rank drop with d columns (distance <= d)
    let mut witness = None;
    if d <= n {
        for t_rows in enumerate_full_rank(d, n, budget)? {
            let t = t_rows.transpose();
            if h.mul_base(&t)?.rank() < d {
                witness = Some(t);
                break;
            }
        }
    }
    Ok(DistanceCheck { holds: no_drop_below && witness.is_some(), rank_drop_witness: witness })
}

/// MRD criterion for a full-row-rank k x n parity check with n <= m:
/// for *every* full-column-rank binary T with k columns, H T must be
/// nonsingular over GF(2^m). Exhaustive over T.
pub fn verify_mrd_criterion(h: &ExtMatrix, budget: &Budget) -> Result<bool> {
    let (k, n) = (h.rows(), h.cols());
    if n > h.spec().m() as usize {
        return Err(Error::LengthExceedsDegree { n, m: h.spec().m() });
    }
    if k > n {
        return Err(Error::DimensionMismatch(format!(
            "parity check is {k} x {n}"
        )));
    }
    for t_rows in enumerate_full_rank(k, n, budget)? {
        let t = t_rows.transpose();
        if h.mul_base(&t)?.rank() != k {
            return Ok(false);
        }
    }
    Ok(true)
}
