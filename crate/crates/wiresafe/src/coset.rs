//! Syndrome coset coding: the outer security layer.
//!
//! Given a full-row-rank k x n parity check H over GF(2^m), the message
//! S (k symbols) selects the coset {X : H X = S} of the kernel code and
//! the encoder transmits a *uniformly random* element of it: the mu =
//! n - k free symbols are drawn fresh at random, the k pivot symbols
//! are solved from the parity equations. Decoding is just S = H X — no
//! shared key, no state; all the security lives in the randomness.
//!
//! Encoding runs through a cached systematic form: with pivot block A
//! (columns of H at the pivot positions) and P = A^-1 * H_free, the
//! pivot symbols are A^-1 S + P X_free. For a parity check that is
//! already systematic (pivot block = identity) that is exactly k*(n-k)
//! field multiplications per codeword — see `wiresafe bench`.
//!
//! [`build_mds_baseline`] constructs the classical *scalar* MDS
//! alternative (Vandermonde-style parity check). It is a deliberate
//! foil: secure when the intercepted combinations have GF(2)
//! coefficients of a friendly form, but breakable by coefficients from
//! the big field — the audits in [`crate::audit`] exhibit the
//! counterexample. The Gabidulin scheme has no such weakness.

use itertools::Itertools;
use rand_core::RngCore;

use crate::budget::{binomial_saturating, Budget};
use crate::error::{Error, Result};
use crate::gf::{ExtMatrix, FieldElement, FieldSpec};
use crate::rankmetric::GabidulinCode;

/// Cached systematic decomposition of a parity check.
///
/// `pivot_cols`/`free_cols` partition 0..n; `p` is the k x mu matrix
/// with pivot symbols = `row_transform * S + p * X_free` (and
/// `row_transform = pivot_block^-1`, both `None` when the pivot block
/// is already the identity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicForm {
    pub pivot_cols: Vec<usize>,
    pub free_cols: Vec<usize>,
    pub p: ExtMatrix,
    row_transform: Option<ExtMatrix>,
    pivot_block: Option<ExtMatrix>,
}

impl SystematicForm {
    /// True when encoding needs no pivot-block correction.
    pub fn is_strictly_systematic(&self) -> bool {
        self.row_transform.is_none()
    }
}

/// Compute the systematic form of a full-row-rank parity check.
pub fn systematize(h: &ExtMatrix) -> Result<SystematicForm> {
    let r = h.rref();
    if r.pivot_cols.len() != h.rows() {
        return Err(Error::RankDeficient);
    }
    let free_cols: Vec<usize> = (0..h.cols()).filter(|c| !r.pivot_cols.contains(c)).collect();
    let p = r.reduced.columns(&free_cols);
    let pivot_block = h.columns(&r.pivot_cols);
    let (row_transform, pivot_block) = if pivot_block.is_identity() {
        (None, None)
    } else {
        (Some(r.transform), Some(pivot_block))
    };
    Ok(SystematicForm {
        pivot_cols: r.pivot_cols,
        free_cols,
        p,
        row_transform,
        pivot_block,
    })
}

/// A coset-coding scheme around a fixed parity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetScheme {
    h: ExtMatrix,
    sys: SystematicForm,
}

impl CosetScheme {
    /// Wrap any full-row-rank parity check.
    pub fn new(h: ExtMatrix) -> Result<Self> {
        if h.cols() == 0 {
            return Err(Error::InvalidInput("parity check needs columns".into()));
        }
        let sys = systematize(&h)?;
        Ok(CosetScheme { h, sys })
    }

    /// Scheme for a Gabidulin code (the secure configuration).
    pub fn from_code(code: &GabidulinCode) -> CosetScheme {
        CosetScheme::new(code.parity_check().clone())
            .expect("a Moore matrix of independent generators has full row rank")
    }

    pub fn spec(&self) -> FieldSpec {
        self.h.spec()
    }

    /// Message length (parity rows).
    pub fn k(&self) -> usize {
        self.h.rows()
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Random symbols per codeword (n - k).
    pub fn mu(&self) -> usize {
        self.n() - self.k()
    }

    pub fn parity_check(&self) -> &ExtMatrix {
        &self.h
    }

    pub fn systematic_form(&self) -> &SystematicForm {
        &self.sys
    }

    /// Encode `s` with fresh uniform randomness from `rng`.
    pub fn encode(&self, s: &[FieldElement], rng: &mut impl RngCore) -> Result<Vec<FieldElement>> {
        let spec = self.spec();
        let x_free: Vec<FieldElement> =
            (0..self.mu()).map(|_| spec.random_element(rng)).collect();
        self.encode_with_free(s, &x_free)
    }

    /// Deterministic encoding core: explicit free symbols. This is the
    /// entry point the exhaustive audits drive with every possible
    /// `x_free` value.
    pub fn encode_with_free(
        &self,
        s: &[FieldElement],
        x_free: &[FieldElement],
    ) -> Result<Vec<FieldElement>> {
        let spec = self.spec();
        if s.len() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "message has {} symbols, scheme expects k = {}",
                s.len(),
                self.k()
            )));
        }
        if x_free.len() != self.mu() {
            return Err(Error::DimensionMismatch(format!(
                "free part has {} symbols, scheme expects mu = {}",
                x_free.len(),
                self.mu()
            )));
        }
        if s.iter().chain(x_free).any(|e| e.spec() != spec) {
            return Err(Error::FieldMismatch);
        }
        // pivots = R*S + P*X_free  (R = A^-1, omitted when A = I)
        let rs = match &self.sys.row_transform {
            Some(r) => r.mul_vec(s)?,
            None => s.to_vec(),
        };
        let pf = self.sys.p.mul_vec(x_free)?;
        let mut x = vec![spec.zero(); self.n()];
        for (i, &col) in self.sys.pivot_cols.iter().enumerate() {
            x[col] = rs[i] + pf[i];
        }
        for (j, &col) in self.sys.free_cols.iter().enumerate() {
            x[col] = x_free[j];
        }
        Ok(x)
    }

    /// Recover the message: S = H X, via the cached systematic form.
    pub fn decode(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "codeword has {} symbols, scheme expects n = {}",
                x.len(),
                self.n()
            )));
        }
        let x_pivot: Vec<FieldElement> =
            self.sys.pivot_cols.iter().map(|&c| x[c]).collect();
        let x_free: Vec<FieldElement> = self.sys.free_cols.iter().map(|&c| x[c]).collect();
        let pf = self.sys.p.mul_vec(&x_free)?;
        let combined: Vec<FieldElement> =
            x_pivot.iter().zip(&pf).map(|(&a, &b)| a + b).collect();
        match &self.sys.pivot_block {
            Some(a) => a.mul_vec(&combined),
            None => Ok(combined),
        }
    }

    /// Recover the message by the defining equation S = H X directly
    /// (reference path; always agrees with [`CosetScheme::decode`]).
    pub fn decode_direct(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.h.mul_vec(x)
    }

    /// Equivalent scheme whose parity check has an identity pivot
    /// block (H' = A^-1 H), so encoding is exactly k*(n-k) field
    /// multiplications. Note the syndrome map changes accordingly
    /// (S' = A^-1 S): it is the same code, relabelled messages.
    pub fn systematized(&self) -> CosetScheme {
        match &self.sys.row_transform {
            None => self.clone(),
            Some(r) => CosetScheme::new(r.mul(&self.h).expect("shapes agree"))
                .expect("row-transformed parity check keeps full rank"),
        }
    }
}

/// Classical scalar MDS baseline: parity check H[i][j] = a_j^(i+1) for
/// distinct nonzero points a_j = alpha^j. Every k x k minor is a
/// product of the points times a Vandermonde determinant, hence
/// nonsingular — verified exhaustively here (budget-gated), because
/// this module takes nothing on faith.
pub fn build_mds_baseline(
    spec: FieldSpec,
    n: usize,
    mu: usize,
    budget: &Budget,
) -> Result<CosetScheme> {
    if n == 0 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    if mu > n {
        return Err(Error::DimensionMismatch(format!(
            "mu = {mu} exceeds n = {n}"
        )));
    }
    let k = n - mu;
    let a = spec.alpha();
    let points: Vec<FieldElement> = (0..n).map(|j| a.pow(j as u64)).collect();
    for (j, pt) in points.iter().enumerate() {
        if pt.is_zero() || points[..j].contains(pt) {
            return Err(Error::FieldTooSmall(format!(
                "length {n} needs {n} distinct nonzero powers of alpha in GF(2^{})",
                spec.m()
            )));
        }
    }
    let h = ExtMatrix::from_fn(spec, k, n, |i, j| points[j].pow(i as u64 + 1));

    // Exhaustive minor check: every k-column submatrix is nonsingular.
    budget.check_enumeration(binomial_saturating(n as u64, k as u64))?;
    for cols in (0..n).combinations(k) {
        if h.columns(&cols).rank() != k {
            return Err(Error::DegenerateCode(format!(
                "MDS minor check failed on columns {cols:?}"
            )));
        }
    }
    CosetScheme::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::testutil::gf8;
    use proptest::prelude::*;
    use rand_chacha::ChaCha12Rng;
    use rand_core::SeedableRng;

    fn el(v: u64) -> FieldElement {
        gf8().element(v).unwrap()
    }

    fn scheme_31() -> CosetScheme {
        CosetScheme::from_code(&GabidulinCode::with_standard_generators(gf8(), 3, 1).unwrap())
    }

    #[test]
    fn systematize_one_row() {
        // H = [1, a, a^2]: pivot col 0, P = [a, a^2], block already I.
        let sys = systematize(scheme_31().parity_check()).unwrap();
        assert_eq!(sys.pivot_cols, vec![0]);
        assert_eq!(sys.free_cols, vec![1, 2]);
        assert_eq!(sys.p.row(0), &[el(2), el(4)]);
        assert!(sys.is_strictly_systematic());
    }

    #[test]
    fn systematize_skips_zero_pivot_columns() {
        let h = ExtMatrix::from_rows(vec![vec![el(0), el(1)]]).unwrap();
        let sys = systematize(&h).unwrap();
        assert_eq!(sys.pivot_cols, vec![1]);
        assert_eq!(sys.free_cols, vec![0]);
        assert_eq!(sys.p.row(0), &[el(0)]);

        let scheme = CosetScheme::new(h).unwrap();
        let x = scheme.encode_with_free(&[el(5)], &[el(7)]).unwrap();
        assert_eq!(x, vec![el(7), el(5)]);
        assert_eq!(scheme.decode(&x).unwrap(), vec![el(5)]);
    }

    #[test]
    fn rank_deficient_parity_check_is_rejected() {
        let h = ExtMatrix::from_rows(vec![vec![el(1), el(2)], vec![el(1), el(2)]]).unwrap();
        assert!(matches!(CosetScheme::new(h), Err(Error::RankDeficient)));
    }

    #[test]
    fn encode_places_message_plus_mix_at_pivot() {
        // X = (s + a*x2 + a^2*x3, x2, x3) for H = [1, a, a^2].
        let scheme = scheme_31();
        let (s, x2, x3) = (el(6), el(3), el(5));
        let x = scheme.encode_with_free(&[s], &[x2, x3]).unwrap();
        assert_eq!(x[1], x2);
        assert_eq!(x[2], x3);
        assert_eq!(x[0], s + el(2) * x2 + el(4) * x3);
        assert_eq!(scheme.decode_direct(&x).unwrap(), vec![s]);
    }

    #[test]
    fn decode_anchor() {
        // X = (a+1, 1, 0): S = (a+1) + a*1 + a^2*0 = 1.
        let scheme = scheme_31();
        assert_eq!(scheme.decode(&[el(3), el(1), el(0)]).unwrap(), vec![el(1)]);
    }

    #[test]
    fn round_trip_exhaustive_all_messages_and_randomness() {
        // Every (S, X_free) pair: decode(encode) = S and H X = S, and
        // distinct X across pairs (the map is a bijection).
        let scheme = scheme_31();
        let f = gf8();
        let mut seen = std::collections::HashSet::new();
        for s in f.elements() {
            for x2 in f.elements() {
                for x3 in f.elements() {
                    let x = scheme.encode_with_free(&[s], &[x2, x3]).unwrap();
                    assert_eq!(scheme.decode(&x).unwrap(), vec![s]);
                    assert_eq!(scheme.decode_direct(&x).unwrap(), vec![s]);
                    assert!(seen.insert(x.iter().map(|e| e.coeffs()).collect::<Vec<_>>()));
                }
            }
        }
        assert_eq!(seen.len(), 512);
    }

    #[test]
    fn non_identity_pivot_block_round_trips() {
        // k = 2 Moore matrix: pivot block [[1, a], [1, a^2]] != I.
        let code = GabidulinCode::with_standard_generators(gf8(), 3, 2).unwrap();
        let scheme = CosetScheme::from_code(&code);
        assert!(!scheme.systematic_form().is_strictly_systematic());
        let f = gf8();
        for s0 in f.elements() {
            for s1 in f.elements() {
                for r in f.elements() {
                    let x = scheme.encode_with_free(&[s0, s1], &[r]).unwrap();
                    assert_eq!(scheme.decode(&x).unwrap(), vec![s0, s1]);
                    assert_eq!(scheme.decode_direct(&x).unwrap(), vec![s0, s1]);
                }
            }
        }
    }

    #[test]
    fn systematized_variant_has_identity_pivot_block() {
        let code = GabidulinCode::with_standard_generators(gf8(), 3, 2).unwrap();
        let scheme = CosetScheme::from_code(&code);
        let sys = scheme.systematized();
        assert!(sys.systematic_form().is_strictly_systematic());
        // Same kernel: every codeword of one has zero syndrome in the other.
        let f = gf8();
        for r in f.elements() {
            let x = scheme.encode_with_free(&[f.zero(), f.zero()], &[r]).unwrap();
            let s2 = sys.decode(&x).unwrap();
            assert!(s2.iter().all(|e| e.is_zero()));
        }
        // And it round-trips in its own right.
        let x = sys.encode_with_free(&[el(3), el(7)], &[el(2)]).unwrap();
        assert_eq!(sys.decode(&x).unwrap(), vec![el(3), el(7)]);
    }

    #[test]
    fn seeded_encoding_is_deterministic_and_valid() {
        let scheme = scheme_31();
        let mut r1 = ChaCha12Rng::seed_from_u64(9);
        let mut r2 = ChaCha12Rng::seed_from_u64(9);
        let x1 = scheme.encode(&[el(5)], &mut r1).unwrap();
        let x2 = scheme.encode(&[el(5)], &mut r2).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(scheme.decode(&x1).unwrap(), vec![el(5)]);
    }

    #[test]
    fn degenerate_rates_work() {
        let f = gf8();
        // k = 0: no message, codeword is pure randomness.
        let all_random = CosetScheme::new(ExtMatrix::zero(f, 0, 2));
        // a 0 x n matrix has full row rank vacuously
        let scheme = all_random.unwrap();
        let x = scheme.encode_with_free(&[], &[el(3), el(4)]).unwrap();
        assert_eq!(x, vec![el(3), el(4)]);
        assert_eq!(scheme.decode(&x).unwrap(), Vec::<FieldElement>::new());

        // k = n: no randomness, bijective relabelling.
        let code = GabidulinCode::with_standard_generators(f, 3, 3).unwrap();
        let scheme = CosetScheme::from_code(&code);
        assert_eq!(scheme.mu(), 0);
        let x = scheme.encode_with_free(&[el(1), el(2), el(3)], &[]).unwrap();
        assert_eq!(scheme.decode(&x).unwrap(), vec![el(1), el(2), el(3)]);
    }

    #[test]
    fn input_validation() {
        let scheme = scheme_31();
        assert!(scheme.encode_with_free(&[el(1), el(2)], &[el(0), el(0)]).is_err());
        assert!(scheme.encode_with_free(&[el(1)], &[el(0)]).is_err());
        assert!(scheme.decode(&[el(1)]).is_err());
        let f4 = FieldSpec::with_degree(2).unwrap();
        assert!(scheme
            .encode_with_free(&[f4.one()], &[el(0), el(0)])
            .is_err());
    }

    #[test]
    fn mds_baseline_matches_known_construction() {
        let budget = Budget::default();
        // GF(8), n=3, mu=2: k=1, H = [1, a, a^2].
        let scheme = build_mds_baseline(gf8(), 3, 2, &budget).unwrap();
        assert_eq!(scheme.parity_check().row(0), &[el(1), el(2), el(4)]);

        // GF(8), n=3, mu=1: k=2, rows are points and their squares.
        let scheme2 = build_mds_baseline(gf8(), 3, 1, &budget).unwrap();
        assert_eq!(scheme2.parity_check().row(0), &[el(1), el(2), el(4)]);
        assert_eq!(
            scheme2.parity_check().row(1),
            &[el(1), el(4), el(4) * el(4)]
        );
        // Round trip.
        let x = scheme2.encode_with_free(&[el(6), el(1)], &[el(7)]).unwrap();
        assert_eq!(scheme2.decode(&x).unwrap(), vec![el(6), el(1)]);
    }

    #[test]
    fn mds_baseline_rejects_small_fields() {
        let budget = Budget::default();
        let f2 = FieldSpec::with_degree(1).unwrap();
        assert!(matches!(
            build_mds_baseline(f2, 3, 2, &budget),
            Err(Error::FieldTooSmall(_))
        ));
        // GF(4) has only 3 nonzero powers: n = 4 is too long.
        let f4 = FieldSpec::with_degree(2).unwrap();
        assert!(build_mds_baseline(f4, 4, 2, &budget).is_err());
        // but n = 3 fits
        assert!(build_mds_baseline(f4, 3, 1, &budget).is_ok());
        // GF(2) supports exactly n = 1
        assert!(build_mds_baseline(f2, 1, 0, &budget).is_ok());
    }

    proptest! {
        #[test]
        fn prop_round_trip_random_moore_schemes(
            seed in any::<u64>(),
            m in 2u32..=5,
            picks in prop::array::uniform2(any::<u64>()),
        ) {
            let f = FieldSpec::with_degree(m).unwrap();
            let n = 1 + (picks[0] % m as u64) as usize;
            let k = (picks[1] % (n as u64 + 1)) as usize;
            let code = GabidulinCode::with_standard_generators(f, n, k).unwrap();
            let scheme = CosetScheme::from_code(&code);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let s: Vec<FieldElement> = (0..k).map(|_| f.random_element(&mut rng)).collect();
            let x = scheme.encode(&s, &mut rng).unwrap();
            prop_assert_eq!(scheme.decode(&x).unwrap(), s.clone());
            prop_assert_eq!(scheme.decode_direct(&x).unwrap(), s);
        }
    }
}
