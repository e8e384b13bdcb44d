//! The `wiresafe` command line.
//!
//! Six subcommands wire the library together for scripting:
//!
//! - `construct` — build a Gabidulin parity check, emit the code as JSON.
//! - `encode` / `decode` — coset coding over JSON-lines on stdin/stdout.
//! - `simulate` — push an (optionally coset-protected) generation of
//!   packets through a random network code, emit a full transcript.
//! - `audit` — exhaustive secrecy audit, either the universal sweep
//!   over all full-rank binary taps or every μ-subset of a network's
//!   edges; the JSON report doubles as a CI gate via the exit code.
//! - `bench` — microbenchmarks showing encode cost ∝ k(n−k).
//!
//! Contract: identical arguments and seeds give byte-identical output
//! (`bench --iters 0` for the timing-free variant); exit code 0 means
//! success/SECURE, 1 a usage or input error, 2 INSECURE or infeasible.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::audit::{
    audit_network, audit_wiretap_sweep, exhaustive_secrecy_ext, find_ext_counterexample,
    SecrecyReport,
};
use crate::budget::Budget;
use crate::coset::{build_mds_baseline, CosetScheme};
use crate::error::{Error, Result};
use crate::gf::{full_rank_count_q, ExtMatrix, FieldDescription, FieldElement, FieldSpec};
use crate::netsim::{HeaderPacket, Network, NetworkJson};
use crate::rankmetric::GabidulinCode;

// ─── Argument surface ───────────────────────────────────────────────────────

#[derive(Debug, Parser)]
#[command(
    name = "wiresafe",
    version,
    about = "Coset coding over GF(2^m) that survives any GF(2)-linear network code",
    subcommand_required = true,
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Cap every enumeration/audit at this many items
    /// (overrides the WIRESAFE_BUDGET environment variable).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write the primary JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a Gabidulin code and print it as JSON.
    Construct {
        /// Extension degree of GF(2^m).
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Irreducible modulus as hex (e.g. b for x^3+x+1); built-in per m if omitted.
        #[arg(long)]
        modulus: Option<String>,
        /// Code length (packets per generation), n <= m.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Wiretap strength to defend against (k = n - mu).
        #[arg(long)]
        mu: Option<usize>,
        /// Message length; mutually redundant with --mu (k + mu = n).
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated hex generators (GF(2)-independent); standard basis powers if omitted.
        #[arg(long, value_delimiter = ',')]
        generators: Option<Vec<String>>,
    },
    /// Coset-encode messages: JSON lines {"s": [hex, ...]} from stdin.
    Encode {
        /// Code JSON produced by `construct`.
        #[arg(long)]
        code: PathBuf,
        /// Seed for the uniformly random free symbols.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover messages: JSON lines {"x": [hex, ...]} from stdin.
    Decode {
        /// Code JSON produced by `construct`.
        #[arg(long)]
        code: PathBuf,
    },
    /// Transmit one generation through a random network code.
    Simulate {
        /// Built-in graph name (butterfly, diamond, line) or a JSON file path.
        #[arg(long, default_value = "butterfly")]
        graph: String,
        /// Packets per generation.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Extension degree of the payload field GF(2^m).
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Irreducible modulus as hex; built-in per m if omitted.
        #[arg(long)]
        modulus: Option<String>,
        /// Protect against mu taps with a coset layer (k = n - mu message symbols).
        #[arg(long)]
        mu: Option<usize>,
        /// Seed for the network code and the transmitted packets.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated edge ids the wiretapper reads; emits B and W.
        #[arg(long, value_delimiter = ',')]
        wiretap: Option<Vec<String>>,
    },
    /// Exhaustively audit secrecy; exit 2 if anything leaks.
    Audit {
        /// Extension degree of GF(2^m).
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Irreducible modulus as hex; built-in per m if omitted.
        #[arg(long)]
        modulus: Option<String>,
        /// Code length.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Wiretap strength: rows per tap.
        #[arg(long, default_value_t = 2)]
        mu: usize,
        /// Message length (defaults to the capacity n - mu; set higher to watch the converse fail).
        #[arg(long)]
        k: Option<usize>,
        /// Audit a concrete network (built-in name or JSON file) instead of the universal sweep.
        #[arg(long)]
        graph: Option<String>,
        /// Seed for the network code (network mode only).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which outer scheme to audit.
        #[arg(long, value_enum, default_value_t = SchemeKind::Gabidulin)]
        scheme: SchemeKind,
    },
    /// Time encode/decode across an (n, k) grid; cost grows as k(n-k).
    Bench {
        /// Extension degree of GF(2^m).
        #[arg(long, default_value_t = 8)]
        m: u32,
        /// Comma-separated list of code lengths.
        #[arg(long, value_delimiter = ',', default_values_t = vec![8usize, 16, 32])]
        n: Vec<usize>,
        /// Iterations per timing batch; 0 emits the deterministic
        /// counts-only report (no timings, byte-identical across runs).
        #[arg(long, default_value_t = 200)]
        iters: u64,
        /// Seed for parity checks and message pools.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Outer schemes the audit can put on trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeKind {
    /// Rank-metric coset scheme — secure against every binary tap.
    Gabidulin,
    /// Scalar MDS coset scheme — the non-universal baseline; its sweep
    /// also scans taps over GF(2^m) itself, the mixes a scalar network
    /// code applies.
    Mds,
    /// H = [I | 0]: the message rides in the clear as the first k packets.
    Cleartext,
}

// ─── Entry point ────────────────────────────────────────────────────────────

/// Parse `std::env::args`, run, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let is_help =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if is_help { 0 } else { 1 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let budget = resolve_budget(cli.budget, std::env::var("WIRESAFE_BUDGET").ok())?;
    match cli.command {
        Command::Construct { m, modulus, n, mu, k, generators } => {
            cmd_construct(&cli.out, m, &modulus, n, mu, k, &generators)
        }
        Command::Encode { code, seed } => cmd_encode(&cli.out, &code, seed),
        Command::Decode { code } => cmd_decode(&cli.out, &code),
        Command::Simulate { graph, n, m, modulus, mu, seed, wiretap } => {
            cmd_simulate(&cli.out, &graph, n, m, &modulus, mu, seed, &wiretap)
        }
        Command::Audit { m, modulus, n, mu, k, graph, seed, scheme } => {
            cmd_audit(&cli.out, &budget, m, &modulus, n, mu, k, &graph, seed, scheme)
        }
        Command::Bench { m, n, iters, seed } => cmd_bench(&cli.out, m, &n, iters, seed),
    }
}

/// Flag beats environment beats default.
fn resolve_budget(flag: Option<u64>, env: Option<String>) -> Result<Budget> {
    match (flag, env) {
        (Some(v), _) => Ok(Budget::with_limit(v)),
        (None, Some(s)) => {
            let v = s.trim().parse::<u64>().map_err(|_| {
                Error::InvalidInput(format!("WIRESAFE_BUDGET=`{s}` is not a number"))
            })?;
            Ok(Budget::with_limit(v))
        }
        (None, None) => Ok(Budget::default()),
    }
}

fn resolve_spec(m: u32, modulus: &Option<String>) -> Result<FieldSpec> {
    match modulus {
        Some(hex) => {
            let digits = hex.trim().trim_start_matches("0x");
            let value = u64::from_str_radix(digits, 16)
                .map_err(|_| Error::InvalidInput(format!("modulus `{hex}` is not hex")))?;
            FieldSpec::new(m, value)
        }
        None => FieldSpec::with_degree(m),
    }
}

/// Resolve the k/mu pair against n (they must be complementary).
fn resolve_rate(n: usize, mu: Option<usize>, k: Option<usize>) -> Result<usize> {
    let k = match (mu, k) {
        (Some(mu), Some(k)) if k + mu != n => {
            return Err(Error::InvalidInput(format!(
                "k + mu must equal n, got {k} + {mu} != {n}"
            )));
        }
        (_, Some(k)) => k,
        (Some(mu), None) if mu >= n => {
            return Err(Error::InvalidInput(format!(
                "mu = {mu} leaves no room for a message in n = {n} packets"
            )));
        }
        (Some(mu), None) => n - mu,
        (None, None) if n >= 3 => n - 2,
        (None, None) => {
            return Err(Error::InvalidInput(
                "n < 3: pass --mu or --k explicitly".into(),
            ));
        }
    };
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "message length k = {k} out of range for n = {n}"
        )));
    }
    Ok(k)
}

fn load_graph(name_or_path: &str) -> Result<Network> {
    if let Some(net) = Network::builtin(name_or_path) {
        return Ok(net);
    }
    let text = std::fs::read_to_string(name_or_path).map_err(|e| {
        Error::InvalidInput(format!(
            "`{name_or_path}` is neither a built-in graph nor a readable file: {e}"
        ))
    })?;
    Network::from_json_str(&text)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

// ─── construct ──────────────────────────────────────────────────────────────

fn cmd_construct(
    out: &Option<PathBuf>,
    m: u32,
    modulus: &Option<String>,
    n: usize,
    mu: Option<usize>,
    k: Option<usize>,
    generators: &Option<Vec<String>>,
) -> Result<i32> {
    let spec = resolve_spec(m, modulus)?;
    let k = resolve_rate(n, mu, k)?;
    let code = match generators {
        Some(hex) => {
            let gens = hex
                .iter()
                .map(|h| spec.element_from_hex(h))
                .collect::<Result<Vec<_>>>()?;
            GabidulinCode::new(spec, k, gens)?
        }
        None => GabidulinCode::with_standard_generators(spec, n, k)?,
    };
    // Humans get H on stderr; machines get the code JSON on stdout.
    eprintln!(
        "GF(2^{m}), modulus {:#x}; n = {n}, k = {k}, mu = {}",
        spec.modulus(),
        n - k
    );
    eprintln!("H =\n{}", code.parity_check());
    write_output(out, &(code.to_json_string() + "\n"))?;
    Ok(0)
}

// ─── encode / decode ────────────────────────────────────────────────────────

#[derive(Debug, Serialize, Deserialize)]
pub struct MessageLine {
    pub s: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CodewordLine {
    pub x: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EncodedLine {
    pub s: Vec<String>,
    pub x: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecodedLine {
    pub x: Vec<String>,
    pub s: Vec<String>,
}

fn load_scheme(path: &PathBuf) -> Result<CosetScheme> {
    let text = std::fs::read_to_string(path)?;
    Ok(CosetScheme::from_code(&GabidulinCode::from_json_str(&text)?))
}

fn parse_elements(spec: FieldSpec, hex: &[String]) -> Result<Vec<FieldElement>> {
    hex.iter().map(|h| spec.element_from_hex(h)).collect()
}

fn to_hex(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(|e| e.to_hex()).collect()
}

/// Stream JSON lines through `f`, reporting bad lines on stderr and
/// carrying on — one malformed message must not kill a pipe.
fn stream_lines(
    out: &Option<PathBuf>,
    mut f: impl FnMut(&str) -> Result<String>,
) -> Result<i32> {
    let stdin = std::io::stdin();
    let mut output = String::new();
    for (idx, line) in stdin.lock().lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match f(&line) {
            Ok(rendered) => {
                output.push_str(&rendered);
                output.push('\n');
            }
            Err(e) => eprintln!("line {}: {e}", idx + 1),
        }
    }
    write_output(out, &output)?;
    Ok(0)
}

fn cmd_encode(out: &Option<PathBuf>, code: &PathBuf, seed: u64) -> Result<i32> {
    let scheme = load_scheme(code)?;
    let spec = scheme.spec();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    stream_lines(out, |line| {
        let msg: MessageLine = serde_json::from_str(line)?;
        let s = parse_elements(spec, &msg.s)?;
        let x = scheme.encode(&s, &mut rng)?;
        Ok(serde_json::to_string(&EncodedLine { s: msg.s, x: to_hex(&x) })?)
    })
}

fn cmd_decode(out: &Option<PathBuf>, code: &PathBuf) -> Result<i32> {
    let scheme = load_scheme(code)?;
    let spec = scheme.spec();
    stream_lines(out, |line| {
        let cw: CodewordLine = serde_json::from_str(line)?;
        let x = parse_elements(spec, &cw.x)?;
        let s = scheme.decode(&x)?;
        Ok(serde_json::to_string(&DecodedLine { x: cw.x, s: to_hex(&s) })?)
    })
}

// ─── simulate ───────────────────────────────────────────────────────────────

#[derive(Debug, Serialize, Deserialize)]
pub struct CosetLayer {
    pub mu: usize,
    pub k: usize,
    /// The secret message S the syndrome encodes.
    pub message: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    /// In-band coding header: bit j says whether source packet j is mixed in.
    pub header: String,
    pub payload: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SinkRecord {
    pub sink: String,
    pub received: Vec<String>,
    /// Recovered source packets, absent if the transfer matrix is singular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoded: Option<Vec<String>>,
    pub ok: bool,
    /// Decoding from packet headers alone must agree.
    pub header_decode_ok: bool,
    /// Coset layer only: the recovered message S.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoded_message: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WiretapRecord {
    pub edges: Vec<String>,
    /// Rows of B: the tapped global coding vectors, as bit strings.
    pub b: Vec<String>,
    pub rank_b: usize,
    /// What the wiretapper actually sees: W = B X.
    pub w: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub graph: NetworkJson,
    pub field: FieldDescription,
    pub n: usize,
    pub seed: u64,
    pub mincut: usize,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset: Option<CosetLayer>,
    pub source_packets: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    pub sinks: Vec<SinkRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wiretap: Option<WiretapRecord>,
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    out: &Option<PathBuf>,
    graph: &str,
    n: usize,
    m: u32,
    modulus: &Option<String>,
    mu: Option<usize>,
    seed: u64,
    wiretap: &Option<Vec<String>>,
) -> Result<i32> {
    let net = load_graph(graph)?;
    let spec = resolve_spec(m, modulus)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // Draw order is part of the output contract: first the network
    // code, then the message, then the coset free symbols.
    let code = net.assign_random_code(n, &mut rng)?;
    let feasible = code.is_feasible();

    let (coset_scheme, coset, x) = match mu {
        Some(mu) => {
            let k = resolve_rate(n, Some(mu), None)?;
            let gab = GabidulinCode::with_standard_generators(spec, n, k)?;
            let scheme = CosetScheme::from_code(&gab);
            let s: Vec<FieldElement> =
                (0..k).map(|_| spec.random_element(&mut rng)).collect();
            let x = scheme.encode(&s, &mut rng)?;
            (Some(scheme), Some(CosetLayer { mu, k, message: to_hex(&s) }), x)
        }
        None => {
            let x: Vec<FieldElement> =
                (0..n).map(|_| spec.random_element(&mut rng)).collect();
            (None, None, x)
        }
    };

    let transmission = code.transmit(&net, &x)?;
    let packets = code.attach_headers(&net, &x)?;

    let sinks = net
        .sinks()
        .iter()
        .enumerate()
        .map(|(pos, &sink)| {
            let received = &transmission.sink_inputs[pos];
            let decoded = code.sink_decode(pos, received).ok();
            let ok = decoded.as_deref() == Some(&x[..]);
            let sink_packets: Vec<HeaderPacket> =
                net.in_edges(sink).iter().map(|&e| packets[e]).collect();
            let header_decode_ok = crate::netsim::decode_from_headers(&sink_packets, n)
                .ok()
                .as_deref()
                == Some(&x[..]);
            let decoded_message = match (&coset_scheme, &decoded) {
                (Some(scheme), Some(xhat)) => scheme.decode(xhat).ok().map(|s| to_hex(&s)),
                _ => None,
            };
            Ok(SinkRecord {
                sink: net.node_name(sink).to_string(),
                received: to_hex(received),
                decoded: decoded.as_deref().map(to_hex),
                ok,
                header_decode_ok,
                decoded_message,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let wiretap = match wiretap {
        Some(ids) if !ids.is_empty() => {
            let set = net.wiretap_set(ids)?;
            let b = code.wiretap_matrix(&set);
            let w = b.mul_ext_vector(&x)?;
            Some(WiretapRecord {
                edges: set.indices.iter().map(|&e| net.edge(e).id.clone()).collect(),
                b: b.to_bit_rows().iter().map(|r| bit_string(r)).collect(),
                rank_b: b.rank(),
                w: to_hex(&w),
            })
        }
        _ => None,
    };

    let transcript = Transcript {
        graph: net.to_json(),
        field: FieldDescription::from_spec(spec),
        n,
        seed,
        mincut: net.mincut(),
        feasible,
        coset,
        source_packets: to_hex(&x),
        edges: (0..net.edge_count())
            .map(|e| EdgeRecord {
                id: net.edge(e).id.clone(),
                header: bit_string(&packets[e].header_bits(n)),
                payload: packets[e].payload.to_hex(),
            })
            .collect(),
        sinks,
        wiretap,
    };
    write_output(out, &pretty(&transcript))?;
    Ok(if feasible { 0 } else { 2 })
}

// ─── audit ──────────────────────────────────────────────────────────────────

fn build_scheme(kind: SchemeKind, spec: FieldSpec, n: usize, k: usize, budget: &Budget) -> Result<CosetScheme> {
    match kind {
        SchemeKind::Gabidulin => Ok(CosetScheme::from_code(
            &GabidulinCode::with_standard_generators(spec, n, k)?,
        )),
        SchemeKind::Mds => {
            if k > n {
                return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
            }
            build_mds_baseline(spec, n, n - k, budget)
        }
        SchemeKind::Cleartext => {
            let h = ExtMatrix::from_fn(spec, k, n, |i, j| {
                if i == j {
                    spec.one()
                } else {
                    spec.zero()
                }
            });
            CosetScheme::new(h)
        }
    }
}

/// The scalar baseline's own deployment model is a network code over
/// GF(2^m) itself, whose taps have extension-field entries the binary
/// sweep never tries. Scan all of those by the stack-rank criterion
/// and append the first leaking tap, exhaustively audited, as a
/// witness case labeled `ext:...`.
fn extend_with_ext_scan(
    report: &mut SecrecyReport,
    scheme: &CosetScheme,
    mu: usize,
    budget: &Budget,
) -> Result<()> {
    report.mode = "sweep+ext".into();
    report.sets_audited += full_rank_count_q(scheme.spec().order(), mu, scheme.n());
    if let Some(b) = find_ext_counterexample(scheme.parity_check(), mu, budget)? {
        let mut case = exhaustive_secrecy_ext(scheme, &b, budget)?;
        case.label = format!("ext:{}", case.label);
        report.secure = false;
        report.failures.push(case.label.clone());
        report.cases.push(case);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    out: &Option<PathBuf>,
    budget: &Budget,
    m: u32,
    modulus: &Option<String>,
    n: usize,
    mu: usize,
    k: Option<usize>,
    graph: &Option<String>,
    seed: u64,
    kind: SchemeKind,
) -> Result<i32> {
    let spec = resolve_spec(m, modulus)?;
    let k = match k {
        Some(k) if k >= 1 => k,
        Some(k) => {
            return Err(Error::InvalidInput(format!("k = {k} must be at least 1")));
        }
        None => resolve_rate(n, Some(mu), None)?,
    };
    let scheme = build_scheme(kind, spec, n, k, budget)?;
    let report: SecrecyReport = match graph {
        Some(g) => {
            let net = load_graph(g)?;
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let code = net.assign_random_code(n, &mut rng)?;
            audit_network(&net, &code, &scheme, mu, budget)?
        }
        None => {
            let mut report = audit_wiretap_sweep(&scheme, mu, budget)?;
            if kind == SchemeKind::Mds && scheme.k() + mu == scheme.n() {
                extend_with_ext_scan(&mut report, &scheme, mu, budget)?;
            }
            report
        }
    };
    let verdict_ok = report.secure && report.feasible != Some(false);
    eprintln!(
        "{}: {} taps audited{}",
        if report.secure { "SECURE" } else { "INSECURE" },
        report.sets_audited,
        match report.feasible {
            Some(true) => ", network code feasible",
            Some(false) => ", network code INFEASIBLE",
            None => "",
        }
    );
    write_output(out, &pretty(&report))?;
    Ok(if verdict_ok { 0 } else { 2 })
}

// ─── bench ──────────────────────────────────────────────────────────────────

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: usize,
    pub k: usize,
    pub mu: usize,
    /// Field multiplications per encode: k(n-k).
    pub products: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encode_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decode_ns: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchFit {
    /// encode_ns ≈ slope · k(n-k) + intercept.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub field: FieldDescription,
    pub iters: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mul_ns: Option<f64>,
    pub grid: Vec<BenchPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<BenchFit>,
}

/// Message lengths probed per n: ends and quarters of (0, n).
fn bench_grid(n: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = [1, n / 4, n / 2, 3 * n / 4, n.saturating_sub(1)]
        .into_iter()
        .filter(|&k| k >= 1 && k < n)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Median nanoseconds per call of `op`, over `batches` batches of
/// `iters` calls each.
fn median_ns(iters: u64, batches: usize, mut op: impl FnMut()) -> f64 {
    let mut samples: Vec<f64> = (0..batches)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..iters {
                op();
            }
            start.elapsed().as_nanos() as f64 / iters as f64
        })
        .collect();
    samples.sort_by(|a, b| a.partial_cmp(b).expect("timings are finite"));
    samples[batches / 2]
}

/// Least-squares fit y ≈ slope·x + intercept with the coefficient of
/// determination.
fn linear_fit(points: &[(f64, f64)]) -> BenchFit {
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    BenchFit { slope, intercept, r_squared }
}

/// A coset scheme with H = [I | P], P seeded: encode touches exactly
/// k(n-k) field products, the shape under test.
fn bench_scheme(spec: FieldSpec, n: usize, k: usize, rng: &mut ChaCha12Rng) -> Result<CosetScheme> {
    let p: Vec<FieldElement> =
        (0..k * (n - k)).map(|_| spec.random_element(rng)).collect();
    let h = ExtMatrix::from_fn(spec, k, n, |i, j| {
        if j < k {
            if i == j {
                spec.one()
            } else {
                spec.zero()
            }
        } else {
            p[i * (n - k) + (j - k)]
        }
    });
    CosetScheme::new(h)
}

fn cmd_bench(out: &Option<PathBuf>, m: u32, ns: &[usize], iters: u64, seed: u64) -> Result<i32> {
    const BATCHES: usize = 9;
    const POOL: usize = 64;
    let spec = FieldSpec::with_degree(m)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let timing = iters > 0;

    let mut grid = Vec::new();
    for &n in ns {
        for k in bench_grid(n) {
            let scheme = bench_scheme(spec, n, k, &mut rng)?;
            let mut point = BenchPoint {
                n,
                k,
                mu: n - k,
                products: (k * (n - k)) as u64,
                encode_ns: None,
                decode_ns: None,
            };
            if timing {
                let messages: Vec<Vec<FieldElement>> = (0..POOL)
                    .map(|_| (0..k).map(|_| spec.random_element(&mut rng)).collect())
                    .collect();
                let frees: Vec<Vec<FieldElement>> = (0..POOL)
                    .map(|_| (0..n - k).map(|_| spec.random_element(&mut rng)).collect())
                    .collect();
                let codewords: Vec<Vec<FieldElement>> = (0..POOL)
                    .map(|i| scheme.encode_with_free(&messages[i], &frees[i]).expect("encode"))
                    .collect();
                let mut at = 0usize;
                point.encode_ns = Some(median_ns(iters, BATCHES, || {
                    at = (at + 1) % POOL;
                    std::hint::black_box(
                        scheme
                            .encode_with_free(
                                std::hint::black_box(&messages[at]),
                                std::hint::black_box(&frees[at]),
                            )
                            .expect("encode"),
                    );
                }));
                let mut at = 0usize;
                point.decode_ns = Some(median_ns(iters, BATCHES, || {
                    at = (at + 1) % POOL;
                    std::hint::black_box(
                        scheme
                            .decode(std::hint::black_box(&codewords[at]))
                            .expect("decode"),
                    );
                }));
            }
            grid.push(point);
        }
    }

    let mul_ns = if timing {
        let pairs: Vec<(FieldElement, FieldElement)> = (0..POOL)
            .map(|_| (spec.random_element(&mut rng), spec.random_element(&mut rng)))
            .collect();
        let mut at = 0usize;
        Some(median_ns(iters.max(1) * 16, BATCHES, || {
            at = (at + 1) % POOL;
            let (a, b) = pairs[at];
            std::hint::black_box(std::hint::black_box(a) * std::hint::black_box(b));
        }))
    } else {
        None
    };

    let fit = if timing && grid.len() >= 2 {
        let points: Vec<(f64, f64)> = grid
            .iter()
            .map(|p| (p.products as f64, p.encode_ns.expect("timed")))
            .collect();
        Some(linear_fit(&points))
    } else {
        None
    };

    let report = BenchReport {
        field: FieldDescription::from_spec(spec),
        iters,
        seed,
        mul_ns,
        grid,
        fit,
    };
    write_output(out, &pretty(&report))?;
    Ok(0)
}
