//! The acceptance gate: eight binding criteria, one test each, every
//! run printing one `ACCEPTANCE <id> PASS/FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`). Tolerances are
//! pinned as constants next to their criterion; everything else is
//! exact — integer counts, rational entropies, byte comparisons.

use std::io::Write as _;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

use wiresafe::audit::{
    audit_network, audit_wiretap_sweep, check_perfect_secrecy, check_perfect_secrecy_ext,
    exhaustive_secrecy_ext, find_ext_counterexample, joint_counts, Bits,
};
use wiresafe::budget::Budget;
use wiresafe::coset::{build_mds_baseline, CosetScheme};
use wiresafe::gf::{enumerate_full_rank, expand, full_rank_count, BaseMatrix, FieldSpec};
use wiresafe::netsim::Network;
use wiresafe::rankmetric::{singleton_distance_bound, GabidulinCode};

/// Criterion 1 must finish within this wall-clock budget.
const SHOWCASE_TIME_LIMIT: Duration = Duration::from_secs(1);
/// Criterion 2 (the full m <= 4 sweep) must finish within this budget.
const SWEEP_TIME_LIMIT: Duration = Duration::from_secs(60);
/// Criterion 4 audits at least this many distinct feasible codes.
const MIN_FEASIBLE_CODES: usize = 20;
/// Criterion 7 requires the k(n-k) model to explain at least this
/// fraction of timing variance.
const R_SQUARED_MIN: f64 = 0.9;

fn criterion(id: u32, desc: &str, f: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    match f() {
        Ok(()) => println!("ACCEPTANCE {id} PASS ({:.2?}) - {desc}", start.elapsed()),
        Err(e) => {
            println!("ACCEPTANCE {id} FAIL ({:.2?}) - {desc}: {e}", start.elapsed());
            panic!("acceptance criterion {id} failed: {e}");
        }
    }
}

fn req(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

trait OrFail<T> {
    fn or_fail(self) -> Result<T, String>;
}

impl<T> OrFail<T> for wiresafe::Result<T> {
    fn or_fail(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

/// GF(2^3) with modulus x^3 + x + 1, the showcase field.
fn gf8() -> FieldSpec {
    FieldSpec::new(3, 0xb).expect("x^3+x+1 is irreducible")
}

/// The showcase scheme: n = 3, k = 1, mu = 2, H = [1, alpha, alpha^2].
fn showcase_scheme() -> CosetScheme {
    let code = GabidulinCode::with_standard_generators(gf8(), 3, 1).expect("showcase code");
    CosetScheme::from_code(&code)
}

#[test]
fn criterion_1_showcase_audit_exact() {
    criterion(
        1,
        "showcase parameters (m=n=3, mu=2, k=1, modulus b): all 512 joint counts equal 1, H(S|W) = H(S) = 3 bits exactly, within 1 s",
        || {
            let start = Instant::now();
            let scheme = showcase_scheme();
            let h = scheme.parity_check();
            let hex: Vec<String> = h.row(0).iter().map(|e| e.to_hex()).collect();
            req(hex == ["1", "2", "4"], "H must be [1, alpha, alpha^2]")?;

            let b = BaseMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]]).or_fail()?;
            let counts =
                joint_counts(&scheme, &b.embed(scheme.spec()), &Budget::default()).or_fail()?;
            req(counts.total == 512, "512 (message, randomness) pairs")?;
            req(
                counts.joint.len() == 8 * 64,
                "every (S, W) pair must occur: 8 messages x 64 observations",
            )?;
            req(
                counts.joint.values().all(|&c| c == 1),
                "every joint count must be exactly 1 (Pr(W|S) = 1/64)",
            )?;
            req(counts.independent(), "S and W must be independent")?;
            req(
                counts.message_entropy() == Bits::from_integer(3),
                "H(S) must be exactly 3 bits",
            )?;
            req(
                counts.conditional_entropy() == Some(Bits::from_integer(3)),
                "H(S|W) must be exactly 3 bits",
            )?;
            let elapsed = start.elapsed();
            req(
                elapsed < SHOWCASE_TIME_LIMIT,
                &format!("took {elapsed:.2?}, limit {SHOWCASE_TIME_LIMIT:?}"),
            )
        },
    );
}

#[test]
fn criterion_2_stack_nonsingular_for_every_binary_tap() {
    criterion(
        2,
        "[H; B] nonsingular for all 42 full-rank taps of the showcase code, and for every Gabidulin code with m <= 4, n <= m, 1 <= k < n — zero violations, within 60 s",
        || {
            let start = Instant::now();
            let budget = Budget::default();

            // the showcase code first, counting the 42 taps explicitly
            let h = showcase_scheme().parity_check().clone();
            let mut taps = 0u64;
            for b in enumerate_full_rank(2, 3, &budget).or_fail()? {
                req(
                    check_perfect_secrecy(&h, &b).or_fail()?,
                    "a full-rank 2x3 tap defeated the showcase code",
                )?;
                taps += 1;
            }
            req(taps == 42, "there must be exactly 42 full-rank 2x3 binary taps")?;

            // the exhaustive family sweep
            let mut swept = 0u64;
            let mut expected = 0u64;
            for m in 2..=4u32 {
                let spec = FieldSpec::with_degree(m).or_fail()?;
                for n in 2..=m as usize {
                    for k in 1..n {
                        expected += full_rank_count(n - k, n);
                        let code =
                            GabidulinCode::with_standard_generators(spec, n, k).or_fail()?;
                        for b in enumerate_full_rank(n - k, n, &budget).or_fail()? {
                            req(
                                check_perfect_secrecy(code.parity_check(), &b).or_fail()?,
                                &format!("violation at m={m} n={n} k={k}"),
                            )?;
                            swept += 1;
                        }
                    }
                }
            }
            req(
                swept == expected && swept >= 2852,
                &format!("sweep covered {swept} taps, expected {expected}"),
            )?;
            let elapsed = start.elapsed();
            req(
                elapsed < SWEEP_TIME_LIMIT,
                &format!("took {elapsed:.2?}, limit {SWEEP_TIME_LIMIT:?}"),
            )
        },
    );
}

#[test]
fn criterion_3_mrd_distance_by_bruteforce() {
    criterion(
        3,
        "the (3, 2) Gabidulin kernel over GF(2^3) has minimum rank distance exactly 2 across all 4096 ordered codeword pairs, matching the Singleton bound and the MRD criterion",
        || {
            let budget = Budget::default();
            let code = GabidulinCode::with_standard_generators(gf8(), 3, 1).or_fail()?;

            // independent oracle: materialize all 64 kernel words from
            // the kernel basis and take pairwise rank distances
            let spec = code.spec();
            let basis = code.parity_check().kernel_basis();
            req(basis.len() == 2, "kernel dimension must be 2")?;
            let mut words = Vec::new();
            for c0 in spec.elements() {
                for c1 in spec.elements() {
                    let word: Vec<_> = (0..3)
                        .map(|j| c0 * basis[0][j] + c1 * basis[1][j])
                        .collect();
                    words.push(word);
                }
            }
            req(words.len() == 64, "the kernel must have 8^2 = 64 words")?;

            let mut pairs = 0u64;
            let mut min_dist = usize::MAX;
            for x in &words {
                for y in &words {
                    pairs += 1;
                    if x == y {
                        continue;
                    }
                    let diff: Vec<_> = (0..3).map(|j| x[j] + y[j]).collect();
                    let dist = expand(&diff).or_fail()?.rank();
                    min_dist = min_dist.min(dist);
                }
            }
            req(pairs == 4096, "must examine all 64 x 64 ordered pairs")?;
            req(min_dist == 2, &format!("minimum rank distance {min_dist}, expected 2"))?;

            let singleton = singleton_distance_bound(3, 3, 2).or_fail()?;
            req(singleton == 2, "Singleton bound must give d <= 2 for dim 2")?;
            req(
                code.min_rank_distance(&budget).or_fail()? == 2,
                "library brute force must agree",
            )?;
            req(
                code.verify_mrd_criterion(&budget).or_fail()?,
                "the exhaustive MRD criterion must hold",
            )
        },
    );
}

#[test]
fn criterion_4_butterfly_end_to_end() {
    criterion(
        4,
        "butterfly network, n=2, m=2, mu=1, k=1: across at least 20 feasible random codes, every audit is SECURE over all 7 single-edge taps and both sinks decode every message under every randomness draw",
        || {
            let net = Network::builtin("butterfly").expect("built-in graph");
            let spec = FieldSpec::with_degree(2).or_fail()?;
            let gab = GabidulinCode::with_standard_generators(spec, 2, 1).or_fail()?;
            let scheme = CosetScheme::from_code(&gab);
            let budget = Budget::default();

            let mut feasible = 0usize;
            for seed in 0..5000u64 {
                if feasible >= MIN_FEASIBLE_CODES {
                    break;
                }
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let code = net.assign_random_code(2, &mut rng).or_fail()?;
                if !code.is_feasible() {
                    continue;
                }
                feasible += 1;

                let report = audit_network(&net, &code, &scheme, 1, &budget).or_fail()?;
                req(
                    report.sets_audited == 7,
                    "all 7 single-edge taps must be audited",
                )?;
                req(
                    report.secure,
                    &format!("seed {seed}: audit must be SECURE, failures {:?}", report.failures),
                )?;

                // every message, every randomness draw, both sinks
                for s in spec.elements() {
                    for free in spec.elements() {
                        let x = scheme.encode_with_free(&[s], &[free]).or_fail()?;
                        let t = code.transmit(&net, &x).or_fail()?;
                        for pos in 0..net.sinks().len() {
                            let got = code.sink_decode(pos, &t.sink_inputs[pos]).or_fail()?;
                            req(got == x, "sink must recover the codeword")?;
                            let s_hat = scheme.decode(&got).or_fail()?;
                            req(s_hat == vec![s], "sink must recover the message")?;
                        }
                    }
                }
            }
            req(
                feasible >= MIN_FEASIBLE_CODES,
                &format!("only {feasible} feasible codes among 5000 seeds"),
            )
        },
    );
}

#[test]
fn criterion_5_rate_converse() {
    criterion(
        5,
        "one symbol above capacity (k = n - mu + 1 = 2 on the showcase parameters): some full-rank tap observes H(S|W) < H(S)",
        || {
            let code = GabidulinCode::with_standard_generators(gf8(), 3, 2).or_fail()?;
            let scheme = CosetScheme::from_code(&code);
            let report = audit_wiretap_sweep(&scheme, 2, &Budget::default()).or_fail()?;
            req(!report.secure, "the sweep must find leakage above capacity")?;
            let witness = report
                .cases
                .iter()
                .find(|c| !c.independent && c.h_s_given_w.map_or(false, |w| w < c.h_s));
            req(
                witness.is_some(),
                "need a tap with strictly smaller conditional entropy",
            )?;
            let w = witness.expect("checked");
            req(w.h_s == Bits::from_integer(6), "H(S) must be 6 bits at k=2")
        },
    );
}

#[test]
fn criterion_6_scalar_mds_is_not_universal() {
    criterion(
        6,
        "scalar MDS baseline (GF(8), n=3, mu=2): the search finds a full-rank tap over the network-coding field with singular [H; B], and the exhaustive audit confirms H(S|W) < H(S)",
        || {
            let budget = Budget::default();
            let scheme = build_mds_baseline(gf8(), 3, 2, &budget).or_fail()?;
            let h = scheme.parity_check();
            let b = find_ext_counterexample(h, 2, &budget)
                .or_fail()?
                .ok_or("no counterexample found — baseline unexpectedly universal")?;
            req(b.rank() == 2, "counterexample must be full rank")?;
            req(
                !check_perfect_secrecy_ext(h, &b).or_fail()?,
                "the stack must be singular",
            )?;
            let case = exhaustive_secrecy_ext(&scheme, &b, &budget).or_fail()?;
            req(!case.independent, "S and W must be dependent")?;
            req(
                case.h_s_given_w.map_or(false, |w| w < case.h_s),
                "conditional entropy must drop",
            )
        },
    );
}

#[test]
fn criterion_7_encode_cost_scales_with_k_times_mu() {
    criterion(
        7,
        "bench at m=8 over n in {8, 16, 32}: measured encode times fit the k(n-k) model with R^2 >= 0.9",
        || {
            let out = Command::new(env!("CARGO_BIN_EXE_wiresafe"))
                .args(["bench", "--iters", "200", "--seed", "0"])
                .env_remove("WIRESAFE_BUDGET")
                .output()
                .map_err(|e| e.to_string())?;
            req(out.status.code() == Some(0), "bench must exit 0")?;
            let report: wiresafe::cli::BenchReport =
                serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
            let mut ns: Vec<usize> = report.grid.iter().map(|p| p.n).collect();
            ns.dedup();
            req(ns == [8, 16, 32], "grid must cover n in {8, 16, 32}")?;
            let fit = report.fit.ok_or("fit missing from timed bench")?;
            req(
                fit.r_squared >= R_SQUARED_MIN,
                &format!("R^2 = {:.4} below {R_SQUARED_MIN}", fit.r_squared),
            )?;
            req(fit.slope > 0.0, "cost must grow with k(n-k)")
        },
    );
}

#[test]
fn criterion_8_seeded_runs_are_byte_identical() {
    criterion(
        8,
        "every subcommand, run twice with identical arguments and seeds, produces byte-identical stdout, stderr, and exit codes (bench in counts-only mode)",
        || {
            let code_path = std::env::temp_dir().join(format!(
                "wiresafe-acceptance-{}-code.json",
                std::process::id()
            ));
            let code_arg = code_path.to_str().expect("utf-8 temp path").to_string();
            let build = run(&["construct", "--out", &code_arg], None)?;
            req(build.0 == 0, "construct must succeed")?;

            let cases: Vec<(Vec<String>, Option<&str>)> = vec![
                (strs(&["construct"]), None),
                (
                    strs(&["encode", "--code", &code_arg, "--seed", "3"]),
                    Some("{\"s\":[\"1\"]}\n{\"s\":[\"4\"]}\n"),
                ),
                (
                    strs(&["decode", "--code", &code_arg]),
                    Some("{\"x\":[\"1\",\"2\",\"3\"]}\n"),
                ),
                (
                    strs(&["simulate", "--seed", "23", "--mu", "1", "--wiretap", "e1,e4"]),
                    None,
                ),
                (strs(&["audit"]), None),
                (
                    strs(&[
                        "audit", "--graph", "butterfly", "--m", "2", "--n", "2", "--mu",
                        "1", "--seed", "23",
                    ]),
                    None,
                ),
                (strs(&["bench", "--iters", "0"]), None),
            ];
            for (args, stdin) in &cases {
                let args_ref: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                let first = run(&args_ref, *stdin)?;
                let second = run(&args_ref, *stdin)?;
                req(
                    first == second,
                    &format!("output drift for wiresafe {}", args.join(" ")),
                )?;
            }
            std::fs::remove_file(&code_path).ok();
            Ok(())
        },
    );
}

fn strs(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).collect()
}

/// Run the binary, returning (exit code, stdout bytes, stderr bytes).
fn run(args: &[&str], stdin: Option<&str>) -> Result<(i32, Vec<u8>, Vec<u8>), String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wiresafe"))
        .args(args)
        .env_remove("WIRESAFE_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .ok_or("stdin not piped")?
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string())?;
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    Ok((out.status.code().ok_or("killed by signal")?, out.stdout, out.stderr))
}
