//! Acyclic networks and GF(2) linear network coding.
//!
//! A source node multicasts `n` packets (elements of GF(2^m)) to every
//! sink over a directed acyclic multigraph. Each edge carries one
//! packet per round: a GF(2)-linear combination — an XOR — of the
//! packets entering its tail node. The *global coding vector* of an
//! edge says which XOR of the original source packets it carries; a
//! sink stacks the global vectors of its incoming edges into a transfer
//! matrix and inverts it (the code is *feasible* for that sink iff the
//! matrix has rank n, which random codes achieve for any sink whose
//! min-cut is at least n, with probability growing in field/choice
//! space — here we simply search seeds and check).
//!
//! Nothing in this module knows about secrecy. The bridge to the coset
//! layer is [`LinearNetworkCode::wiretap_matrix`]: the rows observed on
//! a tapped edge set, which [`crate::audit`] feeds as the `B` of
//! `W = B X`. The point proved elsewhere is that the audits pass for
//! *any* feasible code this module can produce.
//!
//! Packets can also carry their own coding vectors in-band
//! ([`LinearNetworkCode::attach_headers`]): an `n`-bit header is
//! prepended at the source (unit vectors) and mixed by exactly the same
//! XORs as the payload, so a sink can decode without knowing the code
//! ([`decode_from_headers`]). Each packet then costs n + m bits.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{uniform_spec, BaseMatrix, FieldElement};

/// A directed edge, by node index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

/// An acyclic single-source multicast network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    sinks: Vec<usize>,
    in_edges: Vec<Vec<usize>>,
    edge_order: Vec<usize>,
}

/// Edge subset a wiretapper listens on (indices, ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiretapSet {
    pub indices: Vec<usize>,
}

// ─── JSON face ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkJson {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeJson>,
    pub source: String,
    pub sinks: Vec<String>,
}

impl Network {
    /// Validate and index a graph description.
    pub fn from_parts(
        nodes: Vec<String>,
        edges: Vec<(String, String, String)>,
        source: &str,
        sinks: &[String],
    ) -> Result<Network> {
        if nodes.is_empty() {
            return Err(Error::InvalidGraph("no nodes".into()));
        }
        let index_of = |name: &str| -> Result<usize> {
            nodes
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownNode(name.to_string()))
        };
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(Error::InvalidGraph(format!("duplicate node `{n}`")));
            }
        }
        let mut parsed = Vec::with_capacity(edges.len());
        for (id, from, to) in &edges {
            if parsed.iter().any(|e: &Edge| &e.id == id) {
                return Err(Error::InvalidGraph(format!("duplicate edge id `{id}`")));
            }
            parsed.push(Edge { id: id.clone(), from: index_of(from)?, to: index_of(to)? });
        }
        let source = index_of(source)?;
        if sinks.is_empty() {
            return Err(Error::InvalidGraph("need at least one sink".into()));
        }
        let sinks = sinks.iter().map(|s| index_of(s)).collect::<Result<Vec<_>>>()?;
        if sinks.contains(&source) {
            return Err(Error::InvalidGraph("source cannot be a sink".into()));
        }
        if parsed.iter().any(|e| e.to == source) {
            return Err(Error::InvalidGraph(
                "source node must not have incoming edges".into(),
            ));
        }

        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in parsed.iter().enumerate() {
            in_edges[e.to].push(i); // ascending by construction
        }

        // Kahn topological sort of nodes; rejects cycles.
        let mut indegree: Vec<usize> = nodes.iter().map(|_| 0).collect();
        for e in &parsed {
            indegree[e.to] += 1;
        }
        let mut queue: Vec<usize> = (0..nodes.len()).filter(|&v| indegree[v] == 0).collect();
        let mut topo_pos = vec![usize::MAX; nodes.len()];
        let mut seen = 0usize;
        while let Some(v) = queue.pop() {
            topo_pos[v] = seen;
            seen += 1;
            for e in &parsed {
                if e.from == v {
                    indegree[e.to] -= 1;
                    if indegree[e.to] == 0 {
                        queue.push(e.to);
                    }
                }
            }
        }
        if seen != nodes.len() {
            return Err(Error::CyclicGraph);
        }

        // Process edges by tail position (ties: edge index) so every
        // edge's inputs are already computed when we reach it.
        let mut edge_order: Vec<usize> = (0..parsed.len()).collect();
        edge_order.sort_by_key(|&i| (topo_pos[parsed[i].from], i));

        Ok(Network { nodes, edges: parsed, source, sinks, in_edges, edge_order })
    }

    pub fn from_json_str(s: &str) -> Result<Network> {
        let j: NetworkJson = serde_json::from_str(s)?;
        Network::from_parts(
            j.nodes,
            j.edges.into_iter().map(|e| (e.id, e.from, e.to)).collect(),
            &j.source,
            &j.sinks,
        )
    }

    pub fn to_json(&self) -> NetworkJson {
        NetworkJson {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.clone(),
                    from: self.nodes[e.from].clone(),
                    to: self.nodes[e.to].clone(),
                })
                .collect(),
            source: self.nodes[self.source].clone(),
            sinks: self.sinks.iter().map(|&s| self.nodes[s].clone()).collect(),
        }
    }

    /// Built-in topologies: `butterfly`, `diamond`, `line`.
    pub fn builtin(name: &str) -> Option<Network> {
        let e = |id: &str, from: &str, to: &str| (id.into(), from.into(), to.into());
        let net = match name {
            // Two sinks, min-cut 2, XOR needed at the middle node.
            "butterfly" => Network::from_parts(
                ["s", "a", "b", "m", "t1", "t2"].map(String::from).to_vec(),
                vec![
                    e("e0", "s", "a"),
                    e("e1", "s", "m"),
                    e("e2", "s", "b"),
                    e("e3", "a", "t1"),
                    e("e4", "m", "t1"),
                    e("e5", "m", "t2"),
                    e("e6", "b", "t2"),
                ],
                "s",
                &["t1".into(), "t2".into()],
            ),
            // One sink, two disjoint paths.
            "diamond" => Network::from_parts(
                ["s", "a", "b", "t"].map(String::from).to_vec(),
                vec![
                    e("e0", "s", "a"),
                    e("e1", "s", "b"),
                    e("e2", "a", "t"),
                    e("e3", "b", "t"),
                ],
                "s",
                &["t".into()],
            ),
            // Single path, min-cut 1.
            "line" => Network::from_parts(
                ["s", "a", "t"].map(String::from).to_vec(),
                vec![e("e0", "s", "a"), e("e1", "a", "t")],
                "s",
                &["t".into()],
            ),
            _ => return None,
        };
        Some(net.expect("built-in topologies are valid"))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Resolve edge ids into a wiretap set (distinct, sorted).
    pub fn wiretap_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<WiretapSet> {
        let mut indices = Vec::with_capacity(ids.len());
        for id in ids {
            let idx = self.edge_index(id.as_ref())?;
            if indices.contains(&idx) {
                return Err(Error::InvalidInput(format!(
                    "edge `{}` listed twice in wiretap set",
                    id.as_ref()
                )));
            }
            indices.push(idx);
        }
        indices.sort_unstable();
        Ok(WiretapSet { indices })
    }

    /// Max flow from the source to one sink (unit edge capacities),
    /// via Edmonds–Karp.
    pub fn max_flow_to(&self, sink: usize) -> usize {
        let mut fwd: Vec<u8> = vec![1; self.edges.len()];
        let mut rev: Vec<u8> = vec![0; self.edges.len()];
        let mut flow = 0usize;
        loop {
            // BFS over the residual graph.
            let mut parent: Vec<Option<(usize, bool)>> = vec![None; self.nodes.len()];
            let mut visited = vec![false; self.nodes.len()];
            visited[self.source] = true;
            let mut queue = std::collections::VecDeque::from([self.source]);
            'bfs: while let Some(v) = queue.pop_front() {
                for (i, e) in self.edges.iter().enumerate() {
                    if e.from == v && fwd[i] > 0 && !visited[e.to] {
                        visited[e.to] = true;
                        parent[e.to] = Some((i, true));
                        if e.to == sink {
                            break 'bfs;
                        }
                        queue.push_back(e.to);
                    }
                    if e.to == v && rev[i] > 0 && !visited[e.from] {
                        visited[e.from] = true;
                        parent[e.from] = Some((i, false));
                        if e.from == sink {
                            break 'bfs;
                        }
                        queue.push_back(e.from);
                    }
                }
            }
            if !visited[sink] {
                return flow;
            }
            // Augment one unit along the found path.
            let mut v = sink;
            while v != self.source {
                let (i, forward) = parent[v].expect("path reconstructed");
                if forward {
                    fwd[i] -= 1;
                    rev[i] += 1;
                    v = self.edges[i].from;
                } else {
                    rev[i] -= 1;
                    fwd[i] += 1;
                    v = self.edges[i].to;
                }
            }
            flow += 1;
        }
    }

    /// Multicast capacity bound: the smallest sink min-cut.
    pub fn mincut(&self) -> usize {
        self.sinks
            .iter()
            .map(|&s| self.max_flow_to(s))
            .min()
            .expect("at least one sink")
    }

    /// Number of GF(2) input slots feeding edge `e`: the n source
    /// packets for a source-tail edge, otherwise the tail's in-edges.
    fn input_width(&self, e: usize, n: usize) -> usize {
        if self.edges[e].from == self.source {
            n
        } else {
            self.in_edges[self.edges[e].from].len()
        }
    }

    /// Draw a uniformly random GF(2) local code. Coefficients are drawn
    /// edge-by-edge in *edge index order* (not topological order), so a
    /// seed pins the code independently of graph traversal details.
    pub fn assign_random_code(&self, n: usize, rng: &mut impl RngCore) -> Result<LinearNetworkCode> {
        self.check_n(n)?;
        let local: Vec<u64> = (0..self.edges.len())
            .map(|e| {
                let width = self.input_width(e, n);
                let mask = if width == 0 { 0 } else { (1u64 << width) - 1 };
                rng.next_u64() & mask
            })
            .collect();
        self.code_from_local_masks(n, local)
    }

    /// Build a code from explicit local coefficients: for each edge, a
    /// 0/1 vector over its input slots (see [`Network::assign_random_code`]
    /// for the slot convention).
    pub fn code_from_local(&self, n: usize, local: &[Vec<u8>]) -> Result<LinearNetworkCode> {
        self.check_n(n)?;
        if local.len() != self.edges.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} local coefficient vectors for {} edges",
                local.len(),
                self.edges.len()
            )));
        }
        let mut masks = Vec::with_capacity(local.len());
        for (e, coeffs) in local.iter().enumerate() {
            let width = self.input_width(e, n);
            if coeffs.len() != width {
                return Err(Error::DimensionMismatch(format!(
                    "edge `{}` has {} input slots, got {} coefficients",
                    self.edges[e].id,
                    width,
                    coeffs.len()
                )));
            }
            let mut mask = 0u64;
            for (b, &c) in coeffs.iter().enumerate() {
                match c {
                    0 => {}
                    1 => mask |= 1 << b,
                    _ => return Err(Error::InvalidInput(format!("coefficient {c} is not a bit"))),
                }
            }
            masks.push(mask);
        }
        self.code_from_local_masks(n, masks)
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidInput(format!(
                "n = {n} source packets out of range (1..=63)"
            )));
        }
        Ok(())
    }

    fn code_from_local_masks(&self, n: usize, local: Vec<u64>) -> Result<LinearNetworkCode> {
        // Propagate global coding vectors in topological edge order.
        let mut global = vec![0u64; self.edges.len()];
        for &e in &self.edge_order {
            let tail = self.edges[e].from;
            global[e] = if tail == self.source {
                local[e]
            } else {
                let mut acc = 0u64;
                for (slot, &ie) in self.in_edges[tail].iter().enumerate() {
                    if (local[e] >> slot) & 1 == 1 {
                        acc ^= global[ie];
                    }
                }
                acc
            };
        }
        let sink_transfers = self
            .sinks
            .iter()
            .map(|&s| {
                let rows: Vec<u64> = self.in_edges[s].iter().map(|&e| global[e]).collect();
                BaseMatrix::from_bit_rows(rows, n)
            })
            .collect();
        Ok(LinearNetworkCode { n, local, global, sink_transfers })
    }
}

/// A concrete GF(2) linear network code on some [`Network`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearNetworkCode {
    n: usize,
    local: Vec<u64>,
    global: Vec<u64>,
    sink_transfers: Vec<BaseMatrix>,
}

/// Result of pushing one generation of packets through the network.
#[derive(Debug, Clone)]
pub struct Transmission {
    /// Payload carried by each edge, by edge index.
    pub edge_payloads: Vec<FieldElement>,
    /// Packets arriving at each sink (same order as `Network::sinks`,
    /// rows in in-edge index order — matching the transfer matrices).
    pub sink_inputs: Vec<Vec<FieldElement>>,
}

/// A packet with its in-band coding vector: n header bits + one
/// GF(2^m) payload symbol, n + m bits on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeaderPacket {
    pub header: u64,
    pub payload: FieldElement,
}

impl HeaderPacket {
    pub fn header_bits(&self, n: usize) -> Vec<u8> {
        (0..n).map(|j| ((self.header >> j) & 1) as u8).collect()
    }
}

impl LinearNetworkCode {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Local coefficient mask of an edge (bit = input slot).
    pub fn local_mask(&self, e: usize) -> u64 {
        self.local[e]
    }

    /// Global coding vector of an edge (bit = source packet).
    pub fn global_vector(&self, e: usize) -> u64 {
        self.global[e]
    }

    /// Transfer matrix of the sink at position `sink_pos` in
    /// `Network::sinks` (rows = its in-edges, ascending).
    pub fn sink_transfer(&self, sink_pos: usize) -> &BaseMatrix {
        &self.sink_transfers[sink_pos]
    }

    /// A sink can decode iff its transfer matrix has rank n.
    pub fn sink_feasible(&self, sink_pos: usize) -> bool {
        self.sink_transfers[sink_pos].rank() == self.n
    }

    /// Feasible for the multicast: every sink can decode.
    pub fn is_feasible(&self) -> bool {
        (0..self.sink_transfers.len()).all(|s| self.sink_feasible(s))
    }

    /// Rows a wiretapper sees: the global vectors of the tapped edges.
    pub fn wiretap_matrix(&self, set: &WiretapSet) -> BaseMatrix {
        let rows: Vec<u64> = set.indices.iter().map(|&e| self.global[e]).collect();
        BaseMatrix::from_bit_rows(rows, self.n)
    }

    /// Push source packets `x` through the network.
    pub fn transmit(&self, net: &Network, x: &[FieldElement]) -> Result<Transmission> {
        self.check_compatible(net)?;
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} source packets for an n = {} code",
                x.len(),
                self.n
            )));
        }
        let spec = uniform_spec(x)?;
        let mut payloads = vec![spec.zero(); net.edge_count()];
        for &e in &net.edge_order {
            let tail = net.edges[e].from;
            let mut acc = spec.zero();
            if tail == net.source {
                for (slot, &xj) in x.iter().enumerate() {
                    if (self.local[e] >> slot) & 1 == 1 {
                        acc += xj;
                    }
                }
            } else {
                for (slot, &ie) in net.in_edges[tail].iter().enumerate() {
                    if (self.local[e] >> slot) & 1 == 1 {
                        acc += payloads[ie];
                    }
                }
            }
            payloads[e] = acc;
        }
        let sink_inputs = net
            .sinks
            .iter()
            .map(|&s| net.in_edges[s].iter().map(|&e| payloads[e]).collect())
            .collect();
        Ok(Transmission { edge_payloads: payloads, sink_inputs })
    }

    /// Solve `transfer * x = received` for one sink.
    pub fn sink_decode(
        &self,
        sink_pos: usize,
        received: &[FieldElement],
    ) -> Result<Vec<FieldElement>> {
        let transfer = &self.sink_transfers[sink_pos];
        if received.len() != transfer.rows() {
            return Err(Error::DimensionMismatch(format!(
                "sink has {} incoming edges, got {} packets",
                transfer.rows(),
                received.len()
            )));
        }
        let rows: Vec<(u64, FieldElement)> = (0..transfer.rows())
            .map(|i| (transfer.row_bits(i), received[i]))
            .collect();
        solve_gf2_system(&rows, self.n)
    }

    /// Transmit with in-band coding vectors: the source prepends unit
    /// headers and every node mixes header and payload with the same
    /// XORs. By linearity each edge's header must equal its global
    /// coding vector — asserted in tests, relied on by sinks that
    /// decode from headers alone.
    pub fn attach_headers(&self, net: &Network, x: &[FieldElement]) -> Result<Vec<HeaderPacket>> {
        self.check_compatible(net)?;
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} source packets for an n = {} code",
                x.len(),
                self.n
            )));
        }
        let spec = uniform_spec(x)?;
        let mut packets = vec![HeaderPacket { header: 0, payload: spec.zero() }; net.edge_count()];
        for &e in &net.edge_order {
            let tail = net.edges[e].from;
            let mut header = 0u64;
            let mut payload = spec.zero();
            if tail == net.source {
                for (slot, &xj) in x.iter().enumerate() {
                    if (self.local[e] >> slot) & 1 == 1 {
                        header ^= 1 << slot; // unit header of packet `slot`
                        payload += xj;
                    }
                }
            } else {
                for (slot, &ie) in net.in_edges[tail].iter().enumerate() {
                    if (self.local[e] >> slot) & 1 == 1 {
                        header ^= packets[ie].header;
                        payload += packets[ie].payload;
                    }
                }
            }
            packets[e] = HeaderPacket { header, payload };
        }
        Ok(packets)
    }

    fn check_compatible(&self, net: &Network) -> Result<()> {
        if self.local.len() != net.edge_count() {
            return Err(Error::DimensionMismatch(
                "code was built for a different network".into(),
            ));
        }
        Ok(())
    }
}

/// Recover the source packets from self-describing packets alone (no
/// knowledge of the network code needed).
pub fn decode_from_headers(packets: &[HeaderPacket], n: usize) -> Result<Vec<FieldElement>> {
    let rows: Vec<(u64, FieldElement)> = packets.iter().map(|p| (p.header, p.payload)).collect();
    solve_gf2_system(&rows, n)
}

/// Gauss–Jordan over GF(2) with GF(2^m) right-hand sides: solve
/// `A x = y` where row i is (bitmask of A's row i, y_i).
fn solve_gf2_system(rows: &[(u64, FieldElement)], n: usize) -> Result<Vec<FieldElement>> {
    let mut rows = rows.to_vec();
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut pr = 0usize;
    for c in 0..n {
        let Some(found) = (pr..rows.len()).find(|&i| (rows[i].0 >> c) & 1 == 1) else {
            continue;
        };
        rows.swap(pr, found);
        let (pm, pp) = rows[pr];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pr && (row.0 >> c) & 1 == 1 {
                row.0 ^= pm;
                row.1 += pp;
            }
        }
        pivot_row_of_col[c] = Some(pr);
        pr += 1;
    }
    pivot_row_of_col
        .iter()
        .map(|p| p.map(|i| rows[i].1).ok_or(Error::Singular))
        .collect()
}
