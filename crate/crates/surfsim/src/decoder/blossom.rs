//! Maximum-weight matching in general graphs by the blossom method.
//!
//! Primal-dual implementation following Galil's exposition of Edmonds'
//! algorithm, structured after Joris van Rantwijk's widely ported
//! reference program. O(V^3) time. Weights are integers so every dual
//! update is exact; callers quantize floating-point weights before
//! building the edge list.
//!
//! Besides the matching itself, the solver exposes its final dual
//! variables and blossom forest. They form an optimality certificate:
//! an edge (i, j) of weight w not passed to the solver cannot improve
//! the matching as long as
//! `dual[i] + dual[j] + 2 * sum(z of blossoms containing both) >= 2 w`.
//! The decoder uses this to run on a pruned neighbor graph and still
//! prove its answer optimal for the complete graph.

pub const NONE: usize = usize::MAX;

type Weight = i64;

pub struct MatchingResult {
    /// `mate[v]` is the vertex matched to `v`, or `NONE`.
    pub mate: Vec<usize>,
    /// Final dual variables: `2u(v)` for vertices, `z(b)` for blossoms.
    pub dualvar: Vec<Weight>,
    /// Immediate parent blossom of each vertex/blossom, `NONE` at top
    /// level.
    pub blossomparent: Vec<usize>,
    nvertex: usize,
}

impl MatchingResult {
    /// Slack of an arbitrary (possibly omitted) edge under the final
    /// duals: nonnegative slack on every edge certifies optimality.
    pub fn edge_slack(&self, i: usize, j: usize, weight: Weight) -> Weight {
        let mut s = self.dualvar[i] + self.dualvar[j] - 2 * weight;
        let chain = |mut b: usize| {
            let mut out = vec![b];
            while self.blossomparent[b] != NONE {
                b = self.blossomparent[b];
                out.push(b);
            }
            out.reverse();
            out
        };
        let bi = chain(i);
        let bj = chain(j);
        for (a, b) in bi.iter().zip(bj.iter()) {
            if a != b {
                break;
            }
            if *a >= self.nvertex {
                s += 2 * self.dualvar[*a];
            }
        }
        s
    }
}

struct Solver {
    nvertex: usize,
    nedge: usize,
    edges: Vec<(usize, usize, Weight)>,
    maxcardinality: bool,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<Weight>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

/// Compute a maximum-weight matching on vertices `0..nvertex`.
/// With `maxcardinality`, only maximum-cardinality matchings are
/// considered. Parallel edges and self-loops are not allowed.
pub fn max_weight_matching(
    nvertex: usize,
    edges: &[(usize, usize, Weight)],
    maxcardinality: bool,
) -> MatchingResult {
    if edges.is_empty() || nvertex == 0 {
        return MatchingResult {
            mate: vec![NONE; nvertex],
            dualvar: vec![0; 2 * nvertex],
            blossomparent: vec![NONE; 2 * nvertex],
            nvertex,
        };
    }
    let mut s = Solver::new(nvertex, edges.to_vec(), maxcardinality);
    s.solve();
    debug_assert!(s.verify_optimum());
    MatchingResult {
        mate: s
            .mate
            .iter()
            .map(|&p| if p == NONE { NONE } else { s.endpoint[p] })
            .collect(),
        dualvar: s.dualvar,
        blossomparent: s.blossomparent,
        nvertex,
    }
}

impl Solver {
    fn new(nvertex: usize, edges: Vec<(usize, usize, Weight)>, maxcardinality: bool) -> Self {
        let nedge = edges.len();
        for &(i, j, _) in &edges {
            assert!(i != j && i < nvertex && j < nvertex);
        }
        let maxweight = edges.iter().map(|e| e.2).max().unwrap().max(0);
        let endpoint: Vec<usize> = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![0; nvertex]);
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(vec![NONE; nvertex]);
        Solver {
            nvertex,
            nedge,
            edges,
            maxcardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    // 2 * slack of edge k; valid only for edges between distinct
    // top-level blossoms.
    #[inline]
    fn slack(&self, k: usize) -> Weight {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    /// Label the top-level blossom containing `w` and record the edge
    /// endpoint through which it was reached.
    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != NONE);
            let mbase = self.mate[base];
            self.assign_label(self.endpoint[mbase], 1, mbase ^ 1);
        }
    }

    /// Trace back from v and w to find either a new blossom's base or an
    /// augmenting path (`NONE`).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                debug_assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Construct a new blossom with the given base through edge k, which
    /// connects two S-vertices.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom pool exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;

        let mut childs = Vec::new();
        let mut endps = Vec::new();
        // Trace from v back to the base.
        while bv != bb {
            self.blossomparent[bv] = b;
            childs.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(
                self.label[bv] == 2
                    || (self.label[bv] == 1
                        && self.labelend[bv] == self.mate[self.blossombase[bv]])
            );
            debug_assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        childs.push(bb);
        childs.reverse();
        endps.reverse();
        endps.push(2 * k);
        // Trace from w back to the base.
        while bw != bb {
            self.blossomparent[bw] = b;
            childs.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(
                self.label[bw] == 2
                    || (self.label[bw] == 1
                        && self.labelend[bw] == self.mate[self.blossombase[bw]])
            );
            debug_assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossomchilds[b] = childs;
        self.blossomendps[b] = endps;

        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        // Recompute least-slack edges to neighboring S-blossoms.
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for bv in self.blossomchilds[b].clone() {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                self.leaves(bv)
                    .iter()
                    .map(|&v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv].clear();
            self.bestedge[bv] = NONE;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for k in self.blossombestedges[b].clone() {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    /// Expand the given top-level blossom.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            // Relabel sub-blossoms along the path from the entry child to
            // the base.
            debug_assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let nchilds = self.blossomchilds[b].len() as i64;
            let at_child = |list: &Vec<usize>, j: i64| -> usize {
                let n = list.len() as i64;
                list[((j % n + n) % n) as usize]
            };
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .unwrap() as i64;
            let (jstep, endptrick): (i64, usize) = if j & 1 != 0 {
                j -= nchilds;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = at_child(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
                self.label[self.endpoint[q ^ 1]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);
                self.allowedge[q / 2] = true;
                j += jstep;
                p = at_child(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            // Relabel the base sub-blossom without stepping to its mate.
            let bv = at_child(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while at_child(&self.blossomchilds[b], j) != entrychild {
                let bv = at_child(&self.blossomchilds[b], j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut v = NONE;
                for t in self.leaves(bv) {
                    v = t;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                if v != NONE && self.label[v] != 0 {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let lblend = self.labelend[v];
                    self.assign_label(v, 2, lblend);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossombase[b] = NONE;
        self.bestedge[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombestedges[b].clear();
        self.unusedblossoms.push(b);
    }

    /// Swap matched/unmatched edges over the alternating path through
    /// blossom b between vertex v and the base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let nchilds = self.blossomchilds[b].len() as i64;
        let at = |list: &Vec<usize>, j: i64| -> usize {
            let n = list.len() as i64;
            list[((j % n + n) % n) as usize]
        };
        let mut j = i as i64;
        let (jstep, endptrick): (i64, usize) = if i & 1 != 0 {
            j -= nchilds;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t1 = at(&self.blossomchilds[b], j);
            let p = at(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
            if t1 >= self.nvertex {
                self.augment_blossom(t1, self.endpoint[p]);
            }
            j += jstep;
            let t2 = at(&self.blossomchilds[b], j);
            if t2 >= self.nvertex {
                self.augment_blossom(t2, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Swap matched/unmatched edges over an alternating path between two
    /// single vertices, running through edge k.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (s0, p0) in [(v, 2 * k + 1), (w, 2 * k)] {
            let mut s = s0;
            let mut p = p0;
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                debug_assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        for _ in 0..self.nvertex {
            // Stage: find one augmenting path.
            self.label.fill(0);
            self.bestedge.fill(NONE);
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b].clear();
            }
            self.allowedge.fill(false);
            self.queue.clear();
            for v in 0..self.nvertex {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                // Substage: BFS until an augmenting path is found or no
                // progress is possible without a dual update.
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE
                                || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // Dual update.
                let mut deltatype = -1;
                let mut delta: Weight = 0;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.maxcardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..self.nvertex].iter().min().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == 1
                        && self.bestedge[b] != NONE
                    {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // No further improvement possible: max-cardinality
                    // optimum reached. Final adjustment to make the
                    // optimum verifiable.
                    debug_assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = (*self.dualvar[..self.nvertex].iter().min().unwrap()).max(0);
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => unreachable!(),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            0 => {}
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => unreachable!(),
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!(),
                }
            }
            if !augmented {
                break;
            }
            // End of stage: expand S-blossoms with zero dual.
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }

    /// Dual-feasibility and complementary-slackness checks; run under
    /// debug assertions only.
    fn verify_optimum(&self) -> bool {
        let vdualoffset = if self.maxcardinality {
            (-self.dualvar[..self.nvertex].iter().min().unwrap()).max(0)
        } else {
            0
        };
        if self.dualvar[..self.nvertex].iter().min().unwrap() + vdualoffset < 0 {
            return false;
        }
        if *self.dualvar[self.nvertex..].iter().min().unwrap() < 0 {
            return false;
        }
        for k in 0..self.nedge {
            let (i, j, wt) = self.edges[k];
            let mut s = self.dualvar[i] + self.dualvar[j] - 2 * wt;
            let chain = |mut v: usize| {
                let mut out = vec![v];
                while self.blossomparent[v] != NONE {
                    v = self.blossomparent[v];
                    out.push(v);
                }
                out.reverse();
                out
            };
            for (bi, bj) in chain(i).into_iter().zip(chain(j)) {
                if bi != bj {
                    break;
                }
                if bi >= self.nvertex {
                    s += 2 * self.dualvar[bi];
                }
            }
            if s < 0 {
                return false;
            }
            let matched = self.mate[i] != NONE && self.mate[i] / 2 == k
                || self.mate[j] != NONE && self.mate[j] / 2 == k;
            if matched && s != 0 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mates(edges: &[(usize, usize, i64)], maxcard: bool) -> Vec<usize> {
        let n = edges
            .iter()
            .map(|&(i, j, _)| i.max(j) + 1)
            .max()
            .unwrap_or(0);
        max_weight_matching(n, edges, maxcard).mate
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(max_weight_matching(0, &[], false).mate, Vec::<usize>::new());
        assert_eq!(mates(&[(0, 1, 1)], false), vec![1, 0]);
        assert_eq!(mates(&[(1, 2, 10), (2, 3, 11)], false), vec![NONE, NONE, 3, 2]);
    }

    #[test]
    fn prefers_weight_over_cardinality() {
        assert_eq!(
            mates(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)], false),
            vec![NONE, NONE, 3, 2, NONE]
        );
        assert_eq!(
            mates(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)], true),
            vec![NONE, 2, 1, 4, 3]
        );
    }

    #[test]
    fn negative_weights() {
        let edges = [(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(mates(&edges, false), vec![NONE, 2, 1, NONE, NONE]);
        assert_eq!(mates(&edges, true), vec![NONE, 3, 4, 1, 2]);
    }

    // The classic blossom stress cases from the reference
    // implementation's test suite.
    #[test]
    fn s_blossom_and_relabeling() {
        assert_eq!(
            mates(&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)], false),
            vec![NONE, 2, 1, 4, 3]
        );
        assert_eq!(
            mates(
                &[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)],
                false
            ),
            vec![NONE, 6, 3, 2, 5, 4, 1]
        );
    }

    #[test]
    fn t_blossom_relabeling() {
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)],
                false
            ),
            vec![NONE, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (1, 6, 4)],
                false
            ),
            vec![NONE, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (3, 6, 4)],
                false
            ),
            vec![NONE, 2, 1, 6, 5, 4, 3]
        );
    }

    #[test]
    fn nested_s_blossom() {
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)],
                false
            ),
            vec![NONE, 3, 4, 1, 2, 6, 5]
        );
    }

    #[test]
    fn nested_s_blossom_expand() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 8),
                    (1, 3, 8),
                    (2, 3, 10),
                    (2, 4, 12),
                    (3, 5, 12),
                    (4, 5, 14),
                    (4, 6, 12),
                    (5, 7, 12),
                    (6, 7, 14),
                    (7, 8, 12)
                ],
                false
            ),
            vec![NONE, 2, 1, 5, 6, 3, 4, 8, 7]
        );
    }

    #[test]
    fn s_blossom_to_augmenting_path() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 23),
                    (1, 5, 22),
                    (1, 6, 15),
                    (2, 3, 25),
                    (3, 4, 22),
                    (4, 5, 25),
                    (4, 8, 14),
                    (5, 7, 13)
                ],
                false
            ),
            vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4]
        );
    }

    #[test]
    fn nasty_blossom_expand_relabel() {
        // Create blossom, relabel as T in more than one way, expand,
        // augment. From the reference test suite.
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 35),
                    (5, 7, 26),
                    (9, 10, 5)
                ],
                false
            ),
            vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 26),
                    (5, 7, 40),
                    (9, 10, 5)
                ],
                false
            ),
            vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 28),
                    (5, 7, 26),
                    (9, 10, 5)
                ],
                false
            ),
            vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
    }

    #[test]
    fn nasty_blossom_least_slack() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 7, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 95),
                    (4, 6, 94),
                    (5, 6, 94),
                    (6, 7, 50),
                    (1, 8, 30),
                    (3, 11, 35),
                    (5, 9, 36),
                    (7, 10, 26),
                    (11, 12, 5)
                ],
                false
            ),
            vec![NONE, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11]
        );
    }

    #[test]
    fn nasty_blossom_augmenting() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 40),
                    (1, 3, 40),
                    (2, 3, 60),
                    (2, 4, 55),
                    (3, 5, 55),
                    (4, 5, 50),
                    (1, 8, 15),
                    (5, 7, 30),
                    (7, 6, 10),
                    (8, 10, 10),
                    (4, 9, 30)
                ],
                false
            ),
            vec![NONE, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8]
        );
    }

    #[test]
    fn nasty_blossom_expand_during_augment() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 35),
                    (5, 7, 26),
                    (9, 10, 5)
                ],
                true
            ),
            vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
    }

    /// Exhaustive check on random small complete graphs against a
    /// brute-force maximum-cardinality max-weight search.
    #[test]
    fn random_complete_graphs_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..300 {
            let n = rng.random_range(2..9usize);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j, rng.random_range(-50..100i64)));
                }
            }
            let result = max_weight_matching(n, &edges, true);
            // Brute force over perfect/near-perfect pairings.
            fn best(unmatched: &mut Vec<usize>, edges: &[(usize, usize, i64)]) -> i64 {
                if unmatched.len() < 2 {
                    return 0;
                }
                let i = unmatched[0];
                let mut best_w = i64::MIN;
                for idx in 1..unmatched.len() {
                    let j = unmatched[idx];
                    let w = edges
                        .iter()
                        .find(|&&(a, b, _)| (a, b) == (i.min(j), i.max(j)))
                        .unwrap()
                        .2;
                    let mut rest: Vec<usize> = unmatched
                        .iter()
                        .copied()
                        .filter(|&v| v != i && v != j)
                        .collect();
                    best_w = best_w.max(w + best(&mut rest, edges));
                }
                best_w
            }
            let got: i64 = (0..n)
                .filter_map(|v| {
                    let m = result.mate[v];
                    (m != NONE && m > v).then(|| {
                        edges
                            .iter()
                            .find(|&&(a, b, _)| (a, b) == (v, m))
                            .unwrap()
                            .2
                    })
                })
                .sum();
            let mut all: Vec<usize> = (0..n).collect();
            let want = best(&mut all, &edges);
            // Max-cardinality with even n forces perfect matchings on
            // complete graphs, so the totals must agree.
            if n % 2 == 0 {
                assert_eq!(got, want, "trial {trial}, n = {n}, edges {edges:?}");
            }
        }
    }
}
