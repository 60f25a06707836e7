//! Planar diagrams as PD codes.
//!
//! A crossing `X[a,b,c,d]` lists its four edge labels counterclockwise
//! starting from the incoming under-strand. Edge labels run 1..=edge_count and
//! are numbered consecutively along each oriented component (wrapping within
//! the component). `+O k` appends k disjoint crossing-free unknot circles.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("unparseable PD token `{0}`")]
    BadToken(String),
    #[error("edge label {0} occurs {1} times, expected exactly 2")]
    EdgeOccurrences(usize, usize),
    #[error("edge labels must cover 1..={0} exactly")]
    EdgeRange(usize),
    #[error("edge numbering is not consecutive along a component (near edge {0})")]
    Numbering(usize),
    #[error("crossing {0}: first entry is not the incoming under-strand")]
    UnderIn(usize),
    #[error("crossing {0}: over-strand edges are not consecutive")]
    OverStrand(usize),
    #[error("crossing index {0} out of range")]
    CrossingIndex(usize),
    #[error("resolution label {0} is not 0 or 1")]
    BadLabel(u8),
    #[error("empty diagram (no crossings and no free loops)")]
    Empty,
}

/// An oriented link diagram.
#[derive(Clone, PartialEq, Eq)]
pub struct PlanarDiagram {
    crossings: Vec<[usize; 4]>,
    edge_count: usize,
    free_loops: usize,
    signs: Vec<i8>,
    /// edge cycles per component, in orientation order starting at the
    /// component's smallest label
    comps: Vec<Vec<usize>>,
    /// for each edge, the (crossing, slot) occurrence at its head (index 0
    /// unused)
    heads: Vec<(usize, usize)>,
}

impl fmt::Debug for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlanarDiagram({})", self.to_pd_string())
    }
}

impl PlanarDiagram {
    pub fn new(
        crossings: Vec<[usize; 4]>,
        free_loops: usize,
    ) -> Result<PlanarDiagram, DiagramError> {
        if crossings.is_empty() {
            if free_loops == 0 {
                return Err(DiagramError::Empty);
            }
            return Ok(PlanarDiagram {
                crossings,
                edge_count: 0,
                free_loops,
                signs: Vec::new(),
                comps: Vec::new(),
                heads: Vec::new(),
            });
        }

        let edge_count = 2 * crossings.len();
        // every label in 1..=edge_count appears exactly twice
        let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); edge_count + 1];
        for (ci, x) in crossings.iter().enumerate() {
            for (si, &e) in x.iter().enumerate() {
                if e == 0 || e > edge_count {
                    return Err(DiagramError::EdgeRange(edge_count));
                }
                occ[e].push((ci, si));
            }
        }
        for e in 1..=edge_count {
            if occ[e].len() != 2 {
                return Err(DiagramError::EdgeOccurrences(e, occ[e].len()));
            }
        }

        // Walk strands in occurrence space: traversing edge e from tail to
        // head, then passing through the crossing (slot s -> s+2). The head
        // occurrence of each edge is discovered by the walk; a direction is
        // valid when every slot-0 occurrence on the cycle is a head (incoming
        // under-strand), every slot-2 occurrence a tail, and the labels along
        // the cycle are consecutive with a single wrap.
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut heads: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); edge_count + 1];
        let mut seen = vec![false; edge_count + 1];
        for start in 1..=edge_count {
            if seen[start] {
                continue;
            }
            let mut committed = false;
            'dirs: for k in 0..2 {
                let mut cycle: Vec<usize> = Vec::new();
                let mut cycle_heads: Vec<(usize, (usize, usize))> = Vec::new();
                let mut cur = start;
                let mut head = occ[start][k];
                loop {
                    let tail = occ[cur][if occ[cur][0] == head { 1 } else { 0 }];
                    if head.1 == 2 || tail.1 == 0 {
                        continue 'dirs;
                    }
                    cycle.push(cur);
                    cycle_heads.push((cur, head));
                    let out = (head.0, (head.1 + 2) % 4);
                    let next = crossings[out.0][out.1];
                    // leaving through `out`, which is next's tail
                    let next_head =
                        occ[next][if occ[next][0] == out { 1 } else { 0 }];
                    if next == start && next_head == occ[start][k] {
                        break;
                    }
                    cur = next;
                    head = next_head;
                }
                // labels consecutive with a single wrap at the minimum
                let lo = *cycle.iter().min().unwrap();
                let n = cycle.len();
                let pos = cycle.iter().position(|&e| e == lo).unwrap();
                if (0..n).any(|i| cycle[(pos + i) % n] != lo + i) {
                    continue 'dirs;
                }
                for &(e, h) in &cycle_heads {
                    heads[e] = h;
                    seen[e] = true;
                }
                comps.push((0..n).map(|i| cycle[(pos + i) % n]).collect());
                committed = true;
                break;
            }
            if !committed {
                return Err(DiagramError::Numbering(start));
            }
        }
        comps.sort_by_key(|c| c[0]);
        // component label ranges must partition 1..=edge_count into intervals
        {
            let mut expect = 1;
            for c in &comps {
                if c[0] != expect {
                    return Err(DiagramError::Numbering(c[0]));
                }
                expect += c.len();
            }
        }

        // slot 0 must be a head everywhere (checked during the walk for the
        // component's own direction; cross-check globally), and the sign is
        // read off the over-strand direction: slot 3 incoming means positive
        let mut signs = Vec::with_capacity(crossings.len());
        for (ci, x) in crossings.iter().enumerate() {
            if heads[x[0]] != (ci, 0) {
                return Err(DiagramError::UnderIn(ci));
            }
            let over_in_3 = heads[x[3]] == (ci, 3);
            let over_in_1 = heads[x[1]] == (ci, 1);
            match (over_in_3, over_in_1) {
                (true, false) => signs.push(1),
                (false, true) => signs.push(-1),
                _ => return Err(DiagramError::OverStrand(ci)),
            }
        }

        Ok(PlanarDiagram { crossings, edge_count, free_loops, signs, comps, heads })
    }

    pub fn crossings(&self) -> &[[usize; 4]] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    /// Number of link components, free loops included.
    pub fn components(&self) -> usize {
        self.comps.len() + self.free_loops
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, c: usize) -> i8 {
        self.signs[c]
    }

    pub fn writhe(&self) -> i32 {
        self.signs.iter().map(|&s| s as i32).sum()
    }

    pub fn positive_crossings(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn negative_crossings(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    /// Mirror image: every crossing switches over/under. The tuple is rotated
    /// so that the new incoming under-strand (the old over-strand's incoming
    /// end) comes first; edge labels and orientations are untouched.
    pub fn mirror(&self) -> PlanarDiagram {
        let rotated: Vec<[usize; 4]> = self
            .crossings
            .iter()
            .zip(&self.signs)
            .map(|(x, &s)| {
                if s > 0 {
                    // over ran d->b; d becomes the incoming under-strand
                    [x[3], x[0], x[1], x[2]]
                } else {
                    [x[1], x[2], x[3], x[0]]
                }
            })
            .collect();
        PlanarDiagram::new(rotated, self.free_loops).expect("mirror of a valid diagram is valid")
    }

    /// The same diagram with component `k` (0-based, in smallest-edge order;
    /// free loops excluded) traversed the other way. Edges of the component
    /// are renumbered to stay consecutive along the new orientation; crossing
    /// indices are unchanged.
    pub fn reversed(&self, k: usize) -> PlanarDiagram {
        let comp = &self.comps[k];
        let m = comp.len();
        let lo = comp[0];
        let mut relabel: Vec<usize> = (0..=self.edge_count).collect();
        for (i, &e) in comp.iter().enumerate() {
            relabel[e] = lo + (m - i) % m;
        }
        let in_comp = |e: usize| e >= lo && e < lo + m;
        let tuples: Vec<[usize; 4]> = self
            .crossings
            .iter()
            .map(|x| {
                // reversing the under-strand swaps its incoming end to the
                // far diagonal; the over-strand's direction lives in the edge
                // numbering alone
                let rot = if in_comp(x[0]) { 2 } else { 0 };
                let mut t = [0usize; 4];
                for s in 0..4 {
                    t[s] = relabel[x[(s + rot) % 4]];
                }
                t
            })
            .collect();
        PlanarDiagram::new(tuples, self.free_loops)
            .expect("reversal of a valid diagram is valid")
    }

    /// The two smoothings of crossing `c`, as local arcs between tuple slots:
    /// label 0 joins slots (0,1) and (2,3); label 1 joins (0,3) and (1,2).
    pub fn smoothing_arcs(label: u8) -> [[usize; 2]; 2] {
        if label == 0 {
            [[0, 1], [2, 3]]
        } else {
            [[0, 3], [1, 2]]
        }
    }

    /// Resolve crossing `c` with the given label and renumber canonically.
    ///
    /// Components that inherit a coherent orientation keep it; a component
    /// whose old orientations disagree is oriented so that its smallest
    /// surviving old edge keeps its old direction. Components are ordered by
    /// smallest old edge, and numbering starts on the new edge containing it.
    /// Smoothed-off circles that meet no remaining crossing become free loops.
    pub fn resolve(&self, c: usize, label: u8) -> Result<PlanarDiagram, DiagramError> {
        if c >= self.crossings.len() {
            return Err(DiagramError::CrossingIndex(c));
        }
        if label > 1 {
            return Err(DiagramError::BadLabel(label));
        }

        // occurrence table: edge -> [(crossing, slot); 2]
        let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.edge_count + 1];
        for (ci, x) in self.crossings.iter().enumerate() {
            for (si, &e) in x.iter().enumerate() {
                occ[e].push((ci, si));
            }
        }

        // pass-through map: at remaining crossings slot s -> s+2; at c the
        // smoothing arcs pair slots
        let through = |ci: usize, si: usize| -> usize {
            if ci != c {
                return (si + 2) % 4;
            }
            for arc in PlanarDiagram::smoothing_arcs(label) {
                if arc[0] == si {
                    return arc[1];
                }
                if arc[1] == si {
                    return arc[0];
                }
            }
            unreachable!()
        };

        // far end of `edge` when traveling in direction `forward`
        let far_end = |edge: usize, forward: bool| -> (usize, usize) {
            let h = self.heads[edge];
            if forward {
                h
            } else {
                *occ[edge].iter().find(|&&o| o != h).unwrap()
            }
        };

        // phase 1: group old edges into new components, note free circles
        let mut comp_of = vec![usize::MAX; self.edge_count + 1];
        let mut comp_meets_crossing: Vec<bool> = Vec::new();
        let mut comp_min_edge: Vec<usize> = Vec::new();
        for start in 1..=self.edge_count {
            if comp_of[start] != usize::MAX {
                continue;
            }
            let id = comp_min_edge.len();
            comp_min_edge.push(start);
            comp_meets_crossing.push(false);
            let (mut cur, mut forward) = (start, true);
            loop {
                comp_of[cur] = id;
                let (ci, si) = far_end(cur, forward);
                if ci != c {
                    comp_meets_crossing[id] = true;
                }
                let out_slot = through(ci, si);
                let next_edge = self.crossings[ci][out_slot];
                forward = self.heads[next_edge] != (ci, out_slot);
                cur = next_edge;
                if cur == start {
                    break;
                }
            }
        }
        let free_circles = comp_meets_crossing.iter().filter(|m| !**m).count();

        // phase 2: re-walk each surviving component from its smallest old
        // edge in that edge's forward direction (the orientation rule), and
        // assign new labels to maximal runs between surviving-crossing visits
        let survivors: Vec<usize> = (0..self.crossings.len()).filter(|&k| k != c).collect();
        let new_index: BTreeMap<usize, usize> =
            survivors.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        // port -> (new edge, incoming?)
        let mut port_edge: BTreeMap<(usize, usize), (usize, bool)> = BTreeMap::new();
        let mut next_label = 1usize;
        let mut comp_ids: Vec<usize> = (0..comp_min_edge.len())
            .filter(|&id| comp_meets_crossing[id])
            .collect();
        comp_ids.sort_by_key(|&id| comp_min_edge[id]);
        for id in comp_ids {
            let start = comp_min_edge[id];
            // arrival ports of the runs, in walk order; run k ends at
            // arrivals[k] and run k+1 departs from its pass-through partner
            let mut arrivals: Vec<(usize, usize)> = Vec::new();
            // which run contains the smallest old edge; the current (not yet
            // closed) run has index arrivals.len()
            let mut start_run = None;
            let (mut cur, mut forward) = (start, true);
            loop {
                if cur == start && forward {
                    if start_run.is_some() {
                        break;
                    }
                    start_run = Some(arrivals.len());
                }
                let (ci, si) = far_end(cur, forward);
                if ci != c {
                    arrivals.push((ci, si));
                }
                let out_slot = through(ci, si);
                let next_edge = self.crossings[ci][out_slot];
                forward = self.heads[next_edge] != (ci, out_slot);
                cur = next_edge;
            }
            let nruns = arrivals.len();
            debug_assert!(nruns > 0);
            // the run containing `start` gets the first label; the walk's run
            // k (ending at arrivals[k]) is overall run (k - start_run) mod n
            let base = next_label;
            next_label += nruns;
            let s0 = start_run.unwrap() % nruns;
            for (k, &(ci, si)) in arrivals.iter().enumerate() {
                let run_id = base + ((k + nruns - s0) % nruns);
                port_edge.insert((new_index[&ci], si), (run_id, true));
                let next_id = base + ((k + 1 + nruns - s0) % nruns);
                port_edge.insert((new_index[&ci], (si + 2) % 4), (next_id, false));
            }
        }

        // rebuild PD tuples for surviving crossings
        let mut tuples: Vec<[usize; 4]> = Vec::with_capacity(survivors.len());
        for (ni, &old_i) in survivors.iter().enumerate() {
            let get = |slot: usize| -> (usize, bool) {
                *port_edge.get(&(ni, slot)).expect("all four ports visited")
            };
            // under diagonal is old slots {0,2}; the incoming one leads
            let start = if get(0).1 { 0 } else { 2 };
            debug_assert!(get((start + 2) % 4).1 == false);
            let mut t = [0usize; 4];
            for k in 0..4 {
                t[k] = get((start + k) % 4).0;
            }
            tuples.push(t);
            let _ = old_i;
        }

        if tuples.is_empty() {
            return PlanarDiagram::new(
                Vec::new(),
                self.free_loops + free_circles,
            );
        }
        PlanarDiagram::new(tuples, self.free_loops + free_circles)
    }

    /// Collapsed-grading shifts of the skein triangle at crossing `c`:
    /// q = w(Res_0) - w(D), p = w(D) - w(Res_1), r = -1 - p - q.
    pub fn grading_shifts(&self, c: usize) -> Result<(i32, i32, i32), DiagramError> {
        let r0 = self.resolve(c, 0)?;
        let r1 = self.resolve(c, 1)?;
        let q = r0.writhe() - self.writhe();
        let p = self.writhe() - r1.writhe();
        Ok((p, q, -1 - p - q))
    }

    pub fn to_pd_string(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3]))
            .collect();
        let mut s = parts.join(";");
        if self.free_loops > 0 {
            if !parts.is_empty() {
                s.push_str(" ");
            }
            s.push_str(&format!("+O {}", self.free_loops));
        }
        parts.clear();
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramSummary {
    pub crossings: usize,
    pub components: usize,
    pub writhe: i32,
    pub positive: usize,
    pub negative: usize,
    pub free_loops: usize,
}

impl PlanarDiagram {
    pub fn summary(&self) -> DiagramSummary {
        DiagramSummary {
            crossings: self.crossing_count(),
            components: self.components(),
            writhe: self.writhe(),
            positive: self.positive_crossings(),
            negative: self.negative_crossings(),
            free_loops: self.free_loops(),
        }
    }
}

/// Parse the `X[a,b,c,d];...;X[...] +O k` grammar. Whitespace is ignored.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram, DiagramError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut body = compact.as_str();
    let mut free_loops = 0usize;
    if let Some(pos) = body.find("+O") {
        let tail = &body[pos + 2..];
        free_loops = tail
            .parse::<usize>()
            .map_err(|_| DiagramError::BadToken(format!("+O{}", tail)))?;
        body = &body[..pos];
    }
    let mut crossings = Vec::new();
    for tok in body.split(';') {
        if tok.is_empty() {
            continue;
        }
        let inner = tok
            .strip_prefix("X[")
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| DiagramError::BadToken(tok.to_string()))?;
        let nums: Result<Vec<usize>, _> = inner.split(',').map(str::parse::<usize>).collect();
        let nums = nums.map_err(|_| DiagramError::BadToken(tok.to_string()))?;
        if nums.len() != 4 {
            return Err(DiagramError::BadToken(tok.to_string()));
        }
        crossings.push([nums[0], nums[1], nums[2], nums[3]]);
    }
    PlanarDiagram::new(crossings, free_loops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_left_trefoil() {
        let d = parse_pd("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.components(), 1);
        assert_eq!(d.writhe(), -3);
        assert_eq!(d.negative_crossings(), 3);
    }

    #[test]
    fn parse_whitespace_and_loops() {
        let d = parse_pd(" X[1,4,2,5] ; X[3,6,4,1] ; X[5,2,6,3] +O 2 ").unwrap();
        assert_eq!(d.free_loops(), 2);
        assert_eq!(d.components(), 3);
    }

    #[test]
    fn reject_bad_edge_count() {
        let err = parse_pd("X[1,2,3,4];X[1,2,3,4]").unwrap_err();
        assert!(matches!(err, DiagramError::Numbering(_) | DiagramError::UnderIn(_)));
    }

    #[test]
    fn reject_garbage() {
        assert!(matches!(parse_pd("Y[1,2,3,4]"), Err(DiagramError::BadToken(_))));
        assert!(matches!(parse_pd("X[1,2,3]"), Err(DiagramError::BadToken(_))));
    }

    #[test]
    fn unknot_free_loop_only() {
        let d = parse_pd("+O 1").unwrap();
        assert_eq!(d.components(), 1);
        assert_eq!(d.crossing_count(), 0);
    }

    #[test]
    fn reversal_flips_linking_signs() {
        // Hopf link: inter-component crossings flip sign
        let d = parse_pd("X[4,1,3,2];X[2,3,1,4]").unwrap();
        assert_eq!(d.writhe(), -2);
        let r = d.reversed(1);
        assert_eq!(r.writhe(), 2);
        assert_eq!(r.components(), 2);
        // reversal is an involution
        assert_eq!(r.reversed(1), d);
        assert_eq!(r.reversed(1).reversed(1), r);
    }

    #[test]
    fn knot_reversal_keeps_writhe() {
        let d = parse_pd("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        let r = d.reversed(0);
        assert_eq!(r.writhe(), -3);
        assert_eq!(r.components(), 1);
    }

    #[test]
    fn mirror_flips_writhe() {
        let d = parse_pd("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        let m = d.mirror();
        assert_eq!(m.writhe(), 3);
        assert_eq!(m.mirror().writhe(), -3);
        assert_eq!(m.components(), 1);
    }
}
