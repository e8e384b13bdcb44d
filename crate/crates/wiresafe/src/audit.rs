//! Exhaustive, exact secrecy audits.
//!
//! A wiretapper observes `W = B X` for some μ×n matrix `B`; the sender
//! transmits `X`, a uniformly random solution of `H X = S`. The audit
//! question is whether `W` reveals anything about the message `S` — and
//! the answer here is never sampled or approximated. At desk scale we
//! can enumerate *every* message and *every* randomness draw, tabulate
//! integer counts `N(S, W)`, and check independence as an integer
//! equation: `N(S, W) · total = N(S) · N(W)` for all pairs. Entropies
//! come out as exact rationals in bits (all the distributions involved
//! are uniform over affine sets, so conditional entropies are dyadic).
//!
//! The matrix-level criterion audited alongside: for a full-rank `B`
//! with μ = n − k, secrecy holds **iff** the stacked (k+μ)×n matrix
//! `[H; B]` is nonsingular over GF(2^m) — then `(S, W)` is a bijective
//! image of `X` and the joint distribution is uniform, hence
//! independent. Rank-metric parity checks make the criterion hold for
//! *every* full-rank binary `B` at once; that is the universality claim
//! the sweep and network audits grind through case by case.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::budget::{binomial_saturating, pow_saturating, Budget};
use crate::coset::CosetScheme;
use crate::error::{Error, Result};
use crate::gf::{BaseMatrix, ExtMatrix, FieldDescription};
use crate::netsim::{LinearNetworkCode, Network, WiretapSet};

// ─── Exact entropy values ───────────────────────────────────────────────────

/// An exact entropy value in bits, stored as a rational number.
///
/// Displays as `"3"` or `"7/2"`; serializes as that string so JSON
/// reports stay exact instead of rounding through floats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits(Ratio<u64>);

impl Bits {
    pub fn from_integer(v: u64) -> Bits {
        Bits(Ratio::from_integer(v))
    }

    /// `num/den` bits. Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Bits {
        Bits(Ratio::new(num, den))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("`{s}` is not an exact bit count")))
        };
        match s.split_once('/') {
            None => Ok(Bits(Ratio::from_integer(parse(s)?))),
            Some((num, den)) => {
                let den = parse(den)?;
                if den == 0 {
                    return Err(Error::InvalidInput("zero denominator".into()));
                }
                Ok(Bits(Ratio::new(parse(num)?, den)))
            }
        }
    }
}

impl Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Bits, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ─── The stacked matrix [H; B] ──────────────────────────────────────────────

/// The (k+μ)×n matrix `[H; B]` whose rank decides secrecy.
#[derive(Debug, Clone)]
pub struct StackedMatrix {
    matrix: ExtMatrix,
    k: usize,
    mu: usize,
}

impl StackedMatrix {
    /// Stack a parity check on a binary wiretap matrix (embedded via
    /// GF(2) ⊂ GF(2^m), bit b ↦ the constant polynomial b).
    pub fn from_base(h: &ExtMatrix, b: &BaseMatrix) -> Result<StackedMatrix> {
        StackedMatrix::from_ext(h, &b.embed(h.spec()))
    }

    /// Stack a parity check on a wiretap matrix over the same field —
    /// the scalar-network scenario that defeats base-field MDS schemes.
    pub fn from_ext(h: &ExtMatrix, b: &ExtMatrix) -> Result<StackedMatrix> {
        Ok(StackedMatrix { matrix: h.stack(b)?, k: h.rows(), mu: b.rows() })
    }

    pub fn matrix(&self) -> &ExtMatrix {
        &self.matrix
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// True iff the stack is square (k + μ = n) and invertible.
    pub fn is_nonsingular(&self) -> bool {
        self.k + self.mu == self.matrix.cols() && self.rank() == self.matrix.cols()
    }
}

/// Decide perfect secrecy against one binary tap by the matrix
/// criterion: with μ = n − k rows, `W = B X` leaks nothing about
/// `S = H X` iff `[H; B]` is nonsingular over GF(2^m). Requires the
/// complementary dimensions; see [`exhaustive_secrecy`] for arbitrary B.
pub fn check_perfect_secrecy(h: &ExtMatrix, b: &BaseMatrix) -> Result<bool> {
    check_dims(h.rows(), b.rows(), b.cols(), h.cols())?;
    Ok(StackedMatrix::from_base(h, b)?.is_nonsingular())
}

/// Same criterion with the tap over the extension field itself.
pub fn check_perfect_secrecy_ext(h: &ExtMatrix, b: &ExtMatrix) -> Result<bool> {
    check_dims(h.rows(), b.rows(), b.cols(), h.cols())?;
    Ok(StackedMatrix::from_ext(h, b)?.is_nonsingular())
}

fn check_dims(k: usize, mu: usize, b_cols: usize, n: usize) -> Result<()> {
    if b_cols != n {
        return Err(Error::DimensionMismatch(format!(
            "wiretap matrix has {b_cols} columns, code length is {n}"
        )));
    }
    if k + mu != n {
        return Err(Error::DimensionMismatch(format!(
            "stack criterion needs k + mu = n, got {k} + {mu} != {n}"
        )));
    }
    Ok(())
}

/// Drop a wiretap matrix to a basis of its row space. The returned
/// matrix has `rank(B)` rows spanning the same observations, so every
/// audit verdict is unchanged — a wiretapper gains nothing from
/// redundant taps.
pub fn reduce_rank_deficient(b: &BaseMatrix) -> (BaseMatrix, usize) {
    let (ech, pivots) = b.row_echelon();
    let rank = pivots.len();
    let rows: Vec<u64> = (0..rank).map(|i| ech.row_bits(i)).collect();
    (BaseMatrix::from_bit_rows(rows, b.cols()), rank)
}

/// Extension-field analogue of [`reduce_rank_deficient`].
fn reduce_ext(b: &ExtMatrix) -> (ExtMatrix, usize) {
    let rref = b.rref();
    let rank = rref.pivot_cols.len();
    let rows: Vec<Vec<crate::gf::FieldElement>> =
        (0..rank).map(|i| rref.reduced.row(i).to_vec()).collect();
    if rank == 0 {
        (ExtMatrix::zero(b.spec(), 0, b.cols()), 0)
    } else {
        (ExtMatrix::from_rows(rows).expect("echelon rows are well-formed"), rank)
    }
}

/// Search all μ×n matrices over GF(2^m) (row-major digit order) for a
/// full-rank one whose stack with `h` is singular. `None` means no
/// such tap exists. For base-field MDS parity checks — the scalar
/// network-coding scenario — a counterexample turns up quickly; that
/// is exactly the gap rank-metric codes close for binary taps.
pub fn find_ext_counterexample(
    h: &ExtMatrix,
    mu: usize,
    budget: &Budget,
) -> Result<Option<ExtMatrix>> {
    let n = h.cols();
    check_dims(h.rows(), mu, n, n)?;
    let spec = h.spec();
    let order = spec.order() as u64;
    let digits = (mu * n) as u32;
    let total = pow_saturating(order, digits);
    budget.check_enumeration(total)?;
    for idx in 0..total {
        // digit (i, j) sits at position i*n + j, most significant first
        let b = ExtMatrix::from_fn(spec, mu, n, |i, j| {
            let p = (i * n + j) as u32;
            let d = (idx / pow_saturating(order, digits - 1 - p)) % order;
            spec.element(d).expect("digit below field order")
        });
        if b.rank() < mu {
            continue;
        }
        if !StackedMatrix::from_ext(h, &b)?.is_nonsingular() {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

// ─── Joint-distribution enumeration ─────────────────────────────────────────

/// Raw integer counts from enumerating every (message, randomness)
/// pair of a scheme against one tap. Keys pack field elements into
/// m-bit digits, least significant first.
#[derive(Debug, Clone)]
pub struct JointCounts {
    /// Total pairs enumerated: (2^m)^n.
    pub total: u64,
    /// N(S, W) — observations counted against the rank-reduced tap.
    pub joint: HashMap<(u128, u128), u64>,
    /// N(S); uniform by construction.
    pub message: HashMap<u128, u64>,
    /// N(W).
    pub observation: HashMap<u128, u64>,
}

impl JointCounts {
    /// Independence as an integer identity — no tolerance involved:
    /// `N(S,W) · total = N(S) · N(W)` for every (S, W) pair, including
    /// pairs that never occur.
    pub fn independent(&self) -> bool {
        self.message.iter().all(|(&s, &ns)| {
            self.observation.iter().all(|(&w, &nw)| {
                let nsw = self.joint.get(&(s, w)).copied().unwrap_or(0);
                u128::from(nsw) * u128::from(self.total) == u128::from(ns) * u128::from(nw)
            })
        })
    }

    /// Exact H(S|W) in bits, or `None` if some conditional is not
    /// uniform over a power-of-two support (impossible for linear
    /// schemes; flagged rather than approximated).
    pub fn conditional_entropy(&self) -> Option<Bits> {
        let mut numer = 0u64;
        for (&w, &nw) in &self.observation {
            let mut support = 0u64;
            let mut first: Option<u64> = None;
            for (&s, _) in &self.message {
                let nsw = self.joint.get(&(s, w)).copied().unwrap_or(0);
                if nsw == 0 {
                    continue;
                }
                support += 1;
                match first {
                    None => first = Some(nsw),
                    Some(c) if c == nsw => {}
                    Some(_) => return None, // non-uniform conditional
                }
            }
            if !support.is_power_of_two() {
                return None;
            }
            numer += nw * u64::from(support.trailing_zeros());
        }
        Some(Bits(Ratio::new(numer, self.total)))
    }

    /// Exact H(S) in bits (S is uniform, so this is log2 |S-space|).
    pub fn message_entropy(&self) -> Bits {
        let size = self.message.len() as u64;
        debug_assert!(size.is_power_of_two());
        Bits::from_integer(u64::from(size.trailing_zeros()))
    }
}

/// Enumerate every (S, X_free) pair of `scheme`, record what the tap
/// `b` sees. The tap is rank-reduced internally so observation keys
/// stay compact; counts and verdicts are invariant under that.
pub fn joint_counts(scheme: &CosetScheme, b: &ExtMatrix, budget: &Budget) -> Result<JointCounts> {
    let spec = scheme.spec();
    if b.spec() != spec {
        return Err(Error::FieldMismatch);
    }
    if b.cols() != scheme.n() {
        return Err(Error::DimensionMismatch(format!(
            "tap has {} columns, code length is {}",
            b.cols(),
            scheme.n()
        )));
    }
    let (n, k, m) = (scheme.n(), scheme.k(), spec.m());
    let order = spec.order() as u64;
    let total = pow_saturating(order, n as u32);
    budget.check_joint_pairs(total)?;
    let (b_red, _) = reduce_ext(b);

    let decode = |mut idx: u64, len: usize| -> Vec<crate::gf::FieldElement> {
        (0..len)
            .map(|_| {
                let d = idx % order;
                idx /= order;
                spec.element(d).expect("digit below field order")
            })
            .collect()
    };
    let pack = |v: &[crate::gf::FieldElement]| -> u128 {
        v.iter()
            .enumerate()
            .fold(0u128, |acc, (i, e)| acc | (u128::from(e.coeffs()) << (i as u32 * m)))
    };

    let mut joint = HashMap::new();
    let mut message = HashMap::new();
    let mut observation = HashMap::new();
    for si in 0..pow_saturating(order, k as u32) {
        let s = decode(si, k);
        let skey = pack(&s);
        for fi in 0..pow_saturating(order, (n - k) as u32) {
            let x_free = decode(fi, n - k);
            let x = scheme.encode_with_free(&s, &x_free)?;
            let wkey = pack(&b_red.mul_vec(&x)?);
            *joint.entry((skey, wkey)).or_insert(0u64) += 1;
            *message.entry(skey).or_insert(0u64) += 1;
            *observation.entry(wkey).or_insert(0u64) += 1;
        }
    }
    Ok(JointCounts { total, joint, message, observation })
}

// ─── Reports ────────────────────────────────────────────────────────────────

/// Audit record for a single wiretap matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecrecyCase {
    /// Which tap: edge ids (`"e0+e4"`) or an enumeration index.
    pub label: String,
    /// The tap matrix, row-major hex entries.
    pub b: Vec<Vec<String>>,
    pub rank_b: usize,
    /// Rows after dropping redundant observations (= rank_b).
    pub mu_effective: usize,
    /// rank([H; B_reduced]) = k + μ_eff — the matrix secrecy criterion.
    pub stack_full_rank: bool,
    /// Exact H(S) in bits.
    pub h_s: Bits,
    /// Exact H(S|W) in bits (`None` would flag a non-dyadic case,
    /// which linear schemes cannot produce).
    pub h_s_given_w: Option<Bits>,
    /// Integer-exact verdict: S and W statistically independent.
    pub independent: bool,
}

/// Full audit output: per-tap cases plus the aggregate verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub field: FieldDescription,
    pub n: usize,
    pub k: usize,
    /// Wiretap strength audited (rows per tap before reduction).
    pub mu: usize,
    /// `"network"`, `"sweep"`, or `"single"`.
    pub mode: String,
    /// Present in network mode: whether every sink could decode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    pub sets_audited: u64,
    /// True iff every audited tap was independent.
    pub secure: bool,
    /// Labels of the taps that leaked.
    pub failures: Vec<String>,
    pub cases: Vec<SecrecyCase>,
}

impl SecrecyReport {
    fn assemble(
        scheme: &CosetScheme,
        mu: usize,
        mode: &str,
        feasible: Option<bool>,
        cases: Vec<SecrecyCase>,
    ) -> SecrecyReport {
        let failures: Vec<String> = cases
            .iter()
            .filter(|c| !c.independent)
            .map(|c| c.label.clone())
            .collect();
        SecrecyReport {
            field: FieldDescription::from_spec(scheme.spec()),
            n: scheme.n(),
            k: scheme.k(),
            mu,
            mode: mode.to_string(),
            feasible,
            sets_audited: cases.len() as u64,
            secure: failures.is_empty(),
            failures,
            cases,
        }
    }
}

fn audit_case(
    scheme: &CosetScheme,
    b: &ExtMatrix,
    label: String,
    budget: &Budget,
) -> Result<SecrecyCase> {
    let counts = joint_counts(scheme, b, budget)?;
    let (b_red, mu_eff) = reduce_ext(b);
    let stack_full_rank = if mu_eff == 0 {
        true
    } else {
        StackedMatrix::from_ext(scheme.parity_check(), &b_red)?.rank() == scheme.k() + mu_eff
    };
    let h_s = counts.message_entropy();
    let h_s_given_w = counts.conditional_entropy();
    debug_assert!(h_s_given_w.map_or(true, |c| c <= h_s));
    Ok(SecrecyCase {
        label,
        b: (0..b.rows())
            .map(|i| b.row(i).iter().map(|e| e.to_hex()).collect())
            .collect(),
        rank_b: mu_eff,
        mu_effective: mu_eff,
        stack_full_rank,
        h_s,
        h_s_given_w,
        independent: counts.independent(),
    })
}

/// Audit one binary tap exactly, by full enumeration.
pub fn exhaustive_secrecy(
    scheme: &CosetScheme,
    b: &BaseMatrix,
    budget: &Budget,
) -> Result<SecrecyCase> {
    let label = (0..b.rows())
        .map(|i| {
            (0..b.cols())
                .map(|j| if b.get(i, j) { '1' } else { '0' })
                .collect::<String>()
        })
        .join("|");
    audit_case(scheme, &b.embed(scheme.spec()), label, budget)
}

/// Audit one extension-field tap exactly.
pub fn exhaustive_secrecy_ext(
    scheme: &CosetScheme,
    b: &ExtMatrix,
    budget: &Budget,
) -> Result<SecrecyCase> {
    let label = (0..b.rows())
        .map(|i| b.row(i).iter().map(|e| e.to_hex()).join(","))
        .join("|");
    audit_case(scheme, b, label, budget)
}

/// Audit the scheme against **every** full-rank μ×n binary tap — the
/// universality sweep. The verdict covers any GF(2)-linear network
/// code at once, because whatever the network topology and coefficients,
/// the wiretapper's view is some such `B` (rank-deficient taps reduce
/// to smaller full-rank ones).
pub fn audit_wiretap_sweep(
    scheme: &CosetScheme,
    mu: usize,
    budget: &Budget,
) -> Result<SecrecyReport> {
    let n = scheme.n();
    budget.check_wiretap_sets(crate::gf::full_rank_count(mu, n))?;
    let mut cases = Vec::new();
    for (i, b) in crate::gf::enumerate_full_rank(mu, n, budget)?.enumerate() {
        cases.push(audit_case(
            scheme,
            &b.embed(scheme.spec()),
            format!("B#{i}"),
            budget,
        )?);
    }
    Ok(SecrecyReport::assemble(scheme, mu, "sweep", None, cases))
}

/// Audit a concrete network code: every C(ℓ, μ) edge subset of size μ
/// becomes a tap `B` of global coding vectors and gets the exhaustive
/// treatment. Requires the scheme to run at the secrecy capacity
/// k = n − μ of the stack criterion.
pub fn audit_network(
    net: &Network,
    code: &LinearNetworkCode,
    scheme: &CosetScheme,
    mu: usize,
    budget: &Budget,
) -> Result<SecrecyReport> {
    let n = scheme.n();
    if code.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "network code carries {} packets, scheme length is {n}",
            code.n()
        )));
    }
    let expected = n.checked_sub(mu).unwrap_or(0);
    if scheme.k() != expected {
        return Err(Error::RateMismatch { k: scheme.k(), expected });
    }
    let edges = net.edge_count();
    if mu > edges {
        return Err(Error::InvalidInput(format!(
            "cannot tap {mu} of {edges} edges"
        )));
    }
    budget.check_wiretap_sets(binomial_saturating(edges as u64, mu as u64))?;
    let spec = scheme.spec();
    let mut cases = Vec::new();
    for combo in (0..edges).combinations(mu) {
        let label = combo.iter().map(|&e| net.edge(e).id.as_str()).join("+");
        let set = WiretapSet { indices: combo };
        let b = code.wiretap_matrix(&set);
        cases.push(audit_case(scheme, &b.embed(spec), label, budget)?);
    }
    Ok(SecrecyReport::assemble(
        scheme,
        mu,
        "network",
        Some(code.is_feasible()),
        cases,
    ))
}
