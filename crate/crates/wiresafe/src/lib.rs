//! Secure network coding with rank-metric coset codes over GF(2^m).
//!
//! A source multicasts `n` packets through a GF(2)-linear network code
//! while an eavesdropper taps up to `mu` links of their choosing. This
//! crate implements the classic separation architecture that makes the
//! tapped links worthless: an outer maximum-rank-distance (Gabidulin)
//! code over GF(2^m) used in Ozarow–Wyner coset style. The source picks
//! the transmitted word `X` uniformly from the coset of the Gabidulin
//! kernel with syndrome `S = H·X`, where `S` is the secret message. As
//! long as `n <= m` and the message rate is `k = n - mu` symbols, the
//! wiretapper's observation `W = B·X` is statistically independent of
//! `S` for *every* GF(2) matrix `B` with at most `mu` rows — no matter
//! which (feasible) linear network code the inner layer happens to use.
//!
//! Everything here is sized for exhaustive desk-scale verification:
//! fields up to GF(2^63), codes a few symbols long, and audits that
//! literally enumerate every message/randomness/observation triple and
//! compare integer counts, so secrecy claims are exact rather than
//! sampled.
//!
//! Module map:
//!
//! - [`gf`] — GF(2^m) arithmetic, matrices over the extension field and
//!   over GF(2), expand/flatten between the two views.
//! - [`rankmetric`] — Gabidulin parity checks, rank distance, Singleton
//!   bounds, brute-force MRD verification.
//! - [`coset`] — syndrome coset encoding/decoding, systematic forms,
//!   and a scalar MDS baseline that demonstrably fails.
//! - [`netsim`] — acyclic networks, random GF(2) linear network codes,
//!   transfer matrices, coding-vector headers, wiretap matrices.
//! - [`audit`] — exact secrecy audits: stacked-matrix checks and
//!   exhaustive joint-distribution enumeration with rational entropies.
//! - [`cli`] — the `wiresafe` command line (construct / encode / decode
//!   / simulate / audit / bench).

pub mod audit;
pub mod budget;
pub mod cli;
pub mod coset;
pub mod error;
pub mod gf;
pub mod netsim;
pub mod rankmetric;

pub use audit::{SecrecyCase, SecrecyReport};
pub use budget::Budget;
pub use coset::CosetScheme;
pub use error::{Error, Result};
pub use gf::{BaseMatrix, ExtMatrix, FieldElement, FieldSpec};
pub use netsim::{LinearNetworkCode, Network};
pub use rankmetric::GabidulinCode;
