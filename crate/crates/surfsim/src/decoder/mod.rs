//! Space-time matching graph construction and minimum-weight
//! perfect-matching decoding.
//!
//! The graph is built by exhaustive single-fault enumeration: every
//! circuit location is given every possible fault in an otherwise
//! noiseless run, and the resulting detection-event pair (or single
//! event, completed by the boundary) becomes an edge carrying the
//! fault's residual data-qubit correction. Faults landing on the same
//! edge accumulate as `p_edge = 1 - prod(1 - p_fault)`; the edge weight
//! is `-ln(p_edge)`. The circuit is time-periodic, so enumeration runs
//! once for a representative cycle and the edges are translated to all
//! rounds.
//!
//! Decoding pairs up detection events with exact minimum-weight perfect
//! matching over the metric closure of the graph (all-pairs shortest
//! paths, computed once per graph and cached). Boundary matching is
//! folded into the pair weights: an event pair may connect either
//! directly or through the boundary, whichever is shorter, and an odd
//! event count gets one virtual boundary vertex. For large event sets
//! the matcher runs on a nearest-neighbor subgraph first and proves the
//! result optimal for the complete graph with the blossom dual
//! certificate, falling back to the complete graph when the proof
//! fails.

pub mod blossom;

use crate::arch::ArchitectureModel;
use crate::bits::BitMask;
use crate::lattice::{CodeLayout, CycleSchedule, StepKind};
use crate::sim::{run_forced, FaultKind, FaultSite, ForcedFault, NoiseContext, Pauli};
use serde::Serialize;
use std::collections::BTreeMap;

const NO_EDGE: u32 = u32::MAX;

/// Weight quantization scale for the integer blossom solver. 2^-40 in
/// weight units is far below any physical weight difference; ties at
/// that resolution are broken deterministically by edge order.
const WEIGHT_SCALE: f64 = (1u64 << 40) as f64;

/// Neighbor count for the pruned matching graph.
const PRUNE_NEIGHBORS: usize = 14;
/// Event counts up to this size always use the complete graph.
const PRUNE_THRESHOLD: usize = 28;

/// One endpoint of an edge template: a syndrome site at a cycle offset
/// of 0 or 1 from the fault cycle, or the spatial boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TemplateEnd {
    Site { synd: usize, dc: usize },
    Boundary,
}

/// Time-translation-invariant description of one matching-graph edge.
#[derive(Clone, Debug)]
pub struct EdgeTemplate {
    pub a: TemplateEnd,
    pub b: TemplateEnd,
    pub probability: f64,
    pub correction: BitMask,
}

/// An instantiated space-time edge. Node 0 is the boundary; node
/// `1 + synd * n_rounds + round` is detection site (synd, round).
#[derive(Clone, Debug)]
pub struct GraphEdge {
    pub a: u32,
    pub b: u32,
    pub probability: f64,
    pub weight: f64,
    pub correction: BitMask,
}

#[derive(Clone, Debug)]
pub struct MatchingGraph {
    pub n_syndromes: usize,
    pub n_rounds: usize,
    pub edges: Vec<GraphEdge>,
    /// Adjacency: node -> (neighbor node, edge index).
    pub adj: Vec<Vec<(u32, u32)>>,
}

impl MatchingGraph {
    pub fn n_nodes(&self) -> usize {
        1 + self.n_syndromes * self.n_rounds
    }

    pub fn node_id(&self, synd: usize, round: usize) -> u32 {
        debug_assert!(synd < self.n_syndromes && round < self.n_rounds);
        (1 + synd * self.n_rounds + round) as u32
    }

    pub fn node_site(&self, node: u32) -> Option<(usize, usize)> {
        if node == 0 {
            None
        } else {
            let k = node as usize - 1;
            Some((k / self.n_rounds, k % self.n_rounds))
        }
    }
}

/// Enumerate every single fault of one cycle and map it to an edge
/// template for the Z-type (bit-flip) and X-type (phase-flip) graphs.
pub fn enumerate_faults(
    layout: &CodeLayout,
    schedule: &CycleSchedule,
    model: &ArchitectureModel,
    t1: f64,
) -> (Vec<EdgeTemplate>, Vec<EdgeTemplate>) {
    let noise = NoiseContext::new(schedule, model, t1);
    let n_synd = layout.n_z() + layout.n_x();
    // Probe cycle 1 of a 4-cycle run: far from both time boundaries, and
    // translation to any cycle is exact because frames compose by XOR on
    // a clean background.
    const PROBE_CYCLE: usize = 1;
    const PROBE_RUN: usize = 4;

    let mut faults: Vec<(FaultSite, FaultKind, f64)> = Vec::new();
    for (step_idx, step) in schedule.steps.iter().enumerate() {
        match &step.kind {
            StepKind::Prep => {
                if noise.p_qsp > 0.0 {
                    for s in 0..n_synd {
                        faults.push((FaultSite::Prep { synd: s }, FaultKind::Flip, noise.p_qsp));
                    }
                }
            }
            StepKind::Cnot { gates, .. } => {
                if noise.p_intr > 0.0 {
                    for g in 0..gates.len() {
                        for idx in 0..15 {
                            faults.push((
                                FaultSite::Intrinsic { step: step_idx, gate: g },
                                FaultKind::Two(idx),
                                noise.p_intr / 15.0,
                            ));
                        }
                    }
                }
            }
            StepKind::LocalRotation => {}
            StepKind::Measure { .. } => {
                if noise.p_meas > 0.0 {
                    for s in 0..n_synd {
                        faults.push((FaultSite::Meas { synd: s }, FaultKind::Flip, noise.p_meas));
                    }
                }
            }
        }
        // Idle decoherence slots of this step.
        let data_ch = &noise.data_channels[step_idx];
        for (pauli, p) in [
            (Pauli::X, data_ch.px),
            (Pauli::Y, data_ch.py),
            (Pauli::Z, data_ch.pz),
        ] {
            if p > 0.0 {
                for q in 0..layout.n_data() {
                    faults.push((FaultSite::Idle { step: step_idx, qubit: q }, FaultKind::One(pauli), p));
                }
            }
        }
        let synd_ch = &noise.synd_channels[step_idx];
        for (pauli, p) in [
            (Pauli::X, synd_ch.px),
            (Pauli::Y, synd_ch.py),
            (Pauli::Z, synd_ch.pz),
        ] {
            if p > 0.0 {
                for s in 0..n_synd {
                    faults.push((
                        FaultSite::Idle { step: step_idx, qubit: layout.n_data() + s },
                        FaultKind::One(pauli),
                        p,
                    ));
                }
            }
        }
    }

    let mut z_templates: Vec<EdgeTemplate> = Vec::new();
    let mut x_templates: Vec<EdgeTemplate> = Vec::new();

    for (site, kind, prob) in faults {
        let fault = ForcedFault { cycle: PROBE_CYCLE, site, kind };
        let rec = run_forced(layout, schedule, PROBE_RUN, &[fault]);
        let needs_split =
            rec.events_z.len() > 2 || rec.events_x.len() > 2;
        if needs_split {
            // Two-qubit faults occasionally fire more than two events in
            // one graph. Split into the single-qubit constituents, whose
            // effects XOR to the joint effect; each constituent carries
            // the full fault probability (exact to first order).
            let (step, (c, t)) = match site {
                FaultSite::Intrinsic { step, gate } => match &schedule.steps[step].kind {
                    StepKind::Cnot { gates, .. } => (step, gates[gate]),
                    _ => unreachable!("intrinsic fault outside CNOT step"),
                },
                _ => unreachable!("only two-qubit faults can exceed two events per graph"),
            };
            let (pa, pb) = match kind {
                FaultKind::Two(idx) => crate::sim::two_qubit_pauli(idx),
                _ => unreachable!(),
            };
            for (qubit, pauli) in [(c, pa), (t, pb)] {
                if let Some(p) = pauli {
                    let part = ForcedFault {
                        cycle: PROBE_CYCLE,
                        site: FaultSite::Idle { step, qubit },
                        kind: FaultKind::One(p),
                    };
                    let rec = run_forced(layout, schedule, PROBE_RUN, &[part]);
                    push_templates(layout, &rec, prob, &mut z_templates, &mut x_templates);
                }
            }
        } else {
            push_templates(layout, &rec, prob, &mut z_templates, &mut x_templates);
        }
    }

    (combine(z_templates), combine(x_templates))
}

fn push_templates(
    layout: &CodeLayout,
    rec: &crate::sim::ShotRecord,
    prob: f64,
    z_out: &mut Vec<EdgeTemplate>,
    x_out: &mut Vec<EdgeTemplate>,
) {
    push_one(&rec.events_z, &rec.final_residual.x, prob, z_out);
    push_one(&rec.events_x, &rec.final_residual.z, prob, x_out);
    // A fault with no events must leave a harmless residual.
    if rec.events_z.is_empty() {
        debug_assert!(!rec.final_residual.x.odd_overlap(&layout.logical_z_support));
    }
    if rec.events_x.is_empty() {
        debug_assert!(!rec.final_residual.z.odd_overlap(&layout.logical_x_support));
    }
}

fn push_one(
    events: &[(usize, usize)],
    residual: &BitMask,
    prob: f64,
    out: &mut Vec<EdgeTemplate>,
) {
    let end = |&(synd, cycle): &(usize, usize)| {
        debug_assert!((1..=2).contains(&cycle), "event outside probe window");
        TemplateEnd::Site { synd, dc: cycle - 1 }
    };
    match events {
        [] => {}
        [e] => out.push(EdgeTemplate {
            a: end(e),
            b: TemplateEnd::Boundary,
            probability: prob,
            correction: residual.clone(),
        }),
        [e1, e2] => {
            let (mut a, mut b) = (end(e1), end(e2));
            if b < a {
                std::mem::swap(&mut a, &mut b);
            }
            out.push(EdgeTemplate {
                a,
                b,
                probability: prob,
                correction: residual.clone(),
            });
        }
        more => {
            // Should be unreachable for single-qubit faults; keep the
            // decoder well-posed by pairing events in order.
            debug_assert!(false, "single fault produced {} events", more.len());
            for pair in more.chunks(2) {
                match pair {
                    [e1, e2] => out.push(EdgeTemplate {
                        a: end(e1),
                        b: end(e2),
                        probability: prob,
                        correction: BitMask::zeros(residual.len()),
                    }),
                    [e] => out.push(EdgeTemplate {
                        a: end(e),
                        b: TemplateEnd::Boundary,
                        probability: prob,
                        correction: BitMask::zeros(residual.len()),
                    }),
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// Merge templates that land on the same node pair:
/// `p = 1 - prod(1 - p_i)`, keeping the first-seen correction (any two
/// corrections for the same pair differ by a stabilizer).
fn combine(templates: Vec<EdgeTemplate>) -> Vec<EdgeTemplate> {
    let mut map: BTreeMap<(TemplateEnd, TemplateEnd), EdgeTemplate> = BTreeMap::new();
    for t in templates {
        let key = (t.a, t.b);
        match map.get_mut(&key) {
            Some(existing) => {
                let compl = (1.0 - existing.probability) * (1.0 - t.probability);
                existing.probability = 1.0 - compl;
            }
            None => {
                map.insert(key, t);
            }
        }
    }
    map.into_values().collect()
}

/// Instantiate the per-cycle templates over `n_cycles` rounds plus the
/// final noiseless round.
pub fn instantiate(
    templates: &[EdgeTemplate],
    n_syndromes: usize,
    n_cycles: usize,
) -> MatchingGraph {
    let n_rounds = n_cycles + 1;
    let mut graph = MatchingGraph {
        n_syndromes,
        n_rounds,
        edges: Vec::with_capacity(templates.len() * n_cycles),
        adj: vec![Vec::new(); 1 + n_syndromes * n_rounds],
    };
    for c in 0..n_cycles {
        for t in templates {
            let place = |end: &TemplateEnd| -> u32 {
                match end {
                    TemplateEnd::Boundary => 0,
                    TemplateEnd::Site { synd, dc } => graph.node_id(*synd, c + dc),
                }
            };
            let (a, b) = (place(&t.a), place(&t.b));
            let weight = -t.probability.ln();
            let id = graph.edges.len() as u32;
            graph.edges.push(GraphEdge {
                a,
                b,
                probability: t.probability,
                weight,
                correction: t.correction.clone(),
            });
            graph.adj[a as usize].push((b, id));
            graph.adj[b as usize].push((a, id));
        }
    }
    graph
}

/// A matched endpoint in a decoding result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatchEndpoint {
    Event { synd: usize, round: usize },
    Boundary,
}

#[derive(Clone, Debug)]
pub struct DecoderResult {
    pub matched_pairs: Vec<(MatchEndpoint, MatchEndpoint)>,
    pub correction: BitMask,
    pub total_weight: f64,
}

/// One error type's decoder: the matching graph plus its cached metric
/// closure (all-pairs distances and shortest-path predecessor edges).
pub struct Decoder {
    pub graph: MatchingGraph,
    n_data: usize,
    n_nodes: usize,
    dist: Vec<f64>,
    pred: Vec<u32>,
}

/// Decoders for both error types at one (architecture, d, T1) point.
pub struct DecoderPair {
    pub z: Decoder,
    pub x: Decoder,
}

pub fn build_decoders(
    layout: &CodeLayout,
    schedule: &CycleSchedule,
    model: &ArchitectureModel,
    t1: f64,
    n_cycles: usize,
) -> DecoderPair {
    let (zt, xt) = enumerate_faults(layout, schedule, model, t1);
    DecoderPair {
        z: Decoder::new(
            instantiate(&zt, layout.n_z(), n_cycles),
            layout.n_data(),
        ),
        x: Decoder::new(
            instantiate(&xt, layout.n_x(), n_cycles),
            layout.n_data(),
        ),
    }
}

/// Min-heap entry for Dijkstra with plain f64 keys (weights are finite
/// and nonnegative by construction).
#[derive(PartialEq)]
struct HeapItem(f64, u32);
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed for min-heap behavior on BinaryHeap.
        other
            .0
            .partial_cmp(&self.0)
            .expect("non-finite distance")
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl Decoder {
    pub fn new(graph: MatchingGraph, n_data: usize) -> Self {
        let n_nodes = graph.n_nodes();
        let mut dist = vec![f64::INFINITY; n_nodes * n_nodes];
        let mut pred = vec![NO_EDGE; n_nodes * n_nodes];
        let mut heap = std::collections::BinaryHeap::new();
        for src in 0..n_nodes {
            let row = src * n_nodes;
            dist[row + src] = 0.0;
            heap.clear();
            heap.push(HeapItem(0.0, src as u32));
            while let Some(HeapItem(d, v)) = heap.pop() {
                if d > dist[row + v as usize] {
                    continue;
                }
                for &(w, e) in &graph.adj[v as usize] {
                    let nd = d + graph.edges[e as usize].weight;
                    if nd < dist[row + w as usize] {
                        dist[row + w as usize] = nd;
                        pred[row + w as usize] = e;
                        heap.push(HeapItem(nd, w));
                    }
                }
            }
        }
        Decoder {
            graph,
            n_data,
            n_nodes,
            dist,
            pred,
        }
    }

    #[inline]
    pub fn distance(&self, a: u32, b: u32) -> f64 {
        self.dist[a as usize * self.n_nodes + b as usize]
    }

    /// XOR the corrections along the shortest path from `src` to `dst`
    /// into `out`.
    fn apply_path(&self, src: u32, dst: u32, out: &mut BitMask) {
        let row = src as usize * self.n_nodes;
        let mut v = dst;
        while v != src {
            let e = self.pred[row + v as usize];
            assert!(e != NO_EDGE, "node {dst} unreachable from {src}");
            let edge = &self.graph.edges[e as usize];
            out.xor_assign(&edge.correction);
            v = if edge.a == v { edge.b } else { edge.a };
        }
    }

    /// Decode a set of detection events (syndrome index, round) into a
    /// data-qubit correction via exact minimum-weight perfect matching.
    pub fn decode(&self, events: &[(usize, usize)]) -> DecoderResult {
        let k = events.len();
        let mut correction = BitMask::zeros(self.n_data);
        if k == 0 {
            return DecoderResult {
                matched_pairs: Vec::new(),
                correction,
                total_weight: 0.0,
            };
        }
        let nodes: Vec<u32> = events
            .iter()
            .map(|&(s, r)| self.graph.node_id(s, r))
            .collect();
        let to_boundary: Vec<f64> = nodes.iter().map(|&n| self.distance(0, n)).collect();
        // Pair weight: direct path or boundary detour, whichever wins.
        // Strictly-less keeps the choice deterministic under ties.
        let pair_w = |i: usize, j: usize| -> (f64, bool) {
            let direct = self.distance(nodes[i], nodes[j]);
            let via = to_boundary[i] + to_boundary[j];
            if via < direct {
                (via, true)
            } else {
                (direct, false)
            }
        };
        // Odd event counts get a virtual boundary vertex.
        let nv = if k % 2 == 0 { k } else { k + 1 };

        let build_complete = || -> Vec<(usize, usize, f64)> {
            let mut edges = Vec::with_capacity(nv * (nv - 1) / 2);
            for i in 0..k {
                for j in i + 1..k {
                    edges.push((i, j, pair_w(i, j).0));
                }
                if nv > k {
                    edges.push((i, k, to_boundary[i]));
                }
            }
            edges
        };

        let mut pruned = false;
        let mut edges_f = if nv <= PRUNE_THRESHOLD {
            build_complete()
        } else {
            pruned = true;
            let mut set = std::collections::BTreeSet::new();
            let mut cand: Vec<(f64, usize)> = Vec::with_capacity(k);
            for i in 0..k {
                cand.clear();
                for j in 0..k {
                    if j != i {
                        cand.push((pair_w(i, j).0, j));
                    }
                }
                let m = PRUNE_NEIGHBORS.min(cand.len());
                cand.select_nth_unstable_by(m - 1, |a, b| a.partial_cmp(b).unwrap());
                for &(_, j) in &cand[..m] {
                    set.insert((i.min(j), i.max(j)));
                }
                if nv > k {
                    set.insert((i, k));
                }
            }
            set.into_iter()
                .map(|(i, j)| {
                    let w = if j == k { to_boundary[i] } else { pair_w(i, j).0 };
                    (i, j, w)
                })
                .collect()
        };

        loop {
            let quantized: Vec<(usize, usize, i64)> = edges_f
                .iter()
                .map(|&(i, j, w)| (i, j, (w * WEIGHT_SCALE).round() as i64))
                .collect();
            let cap = quantized.iter().map(|e| e.2).max().unwrap() + 1;
            let transformed: Vec<(usize, usize, i64)> = quantized
                .iter()
                .map(|&(i, j, q)| (i, j, cap - q))
                .collect();
            let result = blossom::max_weight_matching(nv, &transformed, true);

            let perfect = result.mate.iter().all(|&m| m != blossom::NONE);
            let mut certified = perfect;
            if perfect && pruned {
                // Dual certificate: every omitted pair must have
                // nonnegative slack under the final duals, otherwise the
                // pruned answer may be suboptimal for the complete graph.
                let present: std::collections::BTreeSet<(usize, usize)> =
                    edges_f.iter().map(|&(i, j, _)| (i, j)).collect();
                'check: for i in 0..k {
                    for j in i + 1..k {
                        if present.contains(&(i, j)) {
                            continue;
                        }
                        let q = (pair_w(i, j).0 * WEIGHT_SCALE).round() as i64;
                        if result.edge_slack(i, j, cap - q) < 0 {
                            certified = false;
                            break 'check;
                        }
                    }
                }
            }
            if !certified {
                assert!(pruned, "complete matching graph must admit a perfect matching");
                pruned = false;
                edges_f = build_complete();
                continue;
            }

            // Extract pairs and assemble the correction.
            let mut matched_pairs = Vec::with_capacity(nv / 2);
            let mut total_weight = 0.0;
            for i in 0..k {
                let m = result.mate[i];
                if m < i {
                    continue;
                }
                if m == k {
                    // Virtual boundary vertex.
                    self.apply_path(0, nodes[i], &mut correction);
                    total_weight += to_boundary[i];
                    matched_pairs.push((self.endpoint(nodes[i]), MatchEndpoint::Boundary));
                    continue;
                }
                let (w, via_boundary) = pair_w(i, m);
                total_weight += w;
                if via_boundary {
                    self.apply_path(0, nodes[i], &mut correction);
                    self.apply_path(0, nodes[m], &mut correction);
                    matched_pairs.push((self.endpoint(nodes[i]), MatchEndpoint::Boundary));
                    matched_pairs.push((self.endpoint(nodes[m]), MatchEndpoint::Boundary));
                } else {
                    self.apply_path(nodes[i], nodes[m], &mut correction);
                    matched_pairs.push((self.endpoint(nodes[i]), self.endpoint(nodes[m])));
                }
            }
            return DecoderResult {
                matched_pairs,
                correction,
                total_weight,
            };
        }
    }

    fn endpoint(&self, node: u32) -> MatchEndpoint {
        match self.graph.node_site(node) {
            Some((synd, round)) => MatchEndpoint::Event { synd, round },
            None => MatchEndpoint::Boundary,
        }
    }
}

/// Serializable graph dump for inspection and audits.
#[derive(Serialize)]
pub struct GraphDump {
    pub n_syndromes: usize,
    pub n_rounds: usize,
    pub edges: Vec<EdgeDump>,
}

#[derive(Serialize)]
pub struct EdgeDump {
    pub a: DumpEnd,
    pub b: DumpEnd,
    pub probability: f64,
    pub weight: f64,
    pub correction: Vec<usize>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum DumpEnd {
    Boundary(String),
    Site { synd: usize, round: usize },
}

pub fn graph_dump(g: &MatchingGraph) -> GraphDump {
    let end = |n: u32| match g.node_site(n) {
        None => DumpEnd::Boundary("boundary".into()),
        Some((synd, round)) => DumpEnd::Site { synd, round },
    };
    GraphDump {
        n_syndromes: g.n_syndromes,
        n_rounds: g.n_rounds,
        edges: g
            .edges
            .iter()
            .map(|e| EdgeDump {
                a: end(e.a),
                b: end(e.b),
                probability: e.probability,
                weight: e.weight,
                correction: e.correction.iter_ones().collect(),
            })
            .collect(),
    }
}
