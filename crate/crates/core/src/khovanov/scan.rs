//! Scan-order Khovanov engine.
//!
//! The complex is built one crossing at a time over formal crossingless
//! tangles on the open boundary edges. After each crossing is tensored on,
//! closed circles are delooped into quantum shifts and invertible
//! differential entries are cancelled, so the retained complex stays small
//! even through long twist regions.
//!
//! Morphisms between tangle objects are kept in a dotted-disk normal form:
//! a basis element assigns a dot (the degree -2 generator) to a subset of
//! the boundary cycles of the source-target pair. Every geometric operation
//! (vertical composition, plugging a smoothing into the boundary, a saddle)
//! reduces to one bookkeeping core: glue disks along arcs and circles, read
//! the genus of each glued component off its Euler characteristic, kill
//! components with two dots or genus two and up, trade a torus for a dot
//! and a factor of two, and re-expand each component into the disk basis.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{FromPrimitive, One, Zero};

use crate::diagram::PlanarDiagram;
use crate::homalg::Q;

use super::dims::BigradedDims;
use super::KhError;

type Point = usize;
type CircleId = u64;

/// A crossingless tangle: a perfect matching of the open boundary points
/// plus closed circles carrying stable ids.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Matching {
    arcs: Vec<(Point, Point)>,
    circles: Vec<CircleId>,
}

impl Matching {
    fn empty() -> Matching {
        Matching { arcs: Vec::new(), circles: Vec::new() }
    }

    fn normalize(&mut self) {
        for arc in &mut self.arcs {
            if arc.0 > arc.1 {
                std::mem::swap(&mut arc.0, &mut arc.1);
            }
        }
        self.arcs.sort_unstable();
        self.circles.sort_unstable();
    }
}

/// A linear combination of dot assignments on the boundary cycles of a
/// fixed source-target pair; bit k set means cycle k carries a dot.
#[derive(Clone, Debug, Default)]
struct Mor {
    terms: BTreeMap<u64, Q>,
}

impl Mor {
    fn zero() -> Mor {
        Mor::default()
    }

    fn single(mask: u64, coeff: Q) -> Mor {
        let mut m = Mor::zero();
        m.add_term(mask, coeff);
        m
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mask: u64, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &coeff;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn sub(&mut self, other: &Mor) {
        for (mask, c) in &other.terms {
            self.add_term(*mask, -c.clone());
        }
    }

    fn id_coeff(&self) -> Q {
        self.terms.get(&0).cloned().unwrap_or_else(Q::zero)
    }
}

fn dsu_find(parent: &mut [usize], a: usize) -> usize {
    let mut r = a;
    while parent[r] != r {
        r = parent[r];
    }
    let mut cur = a;
    while parent[cur] != r {
        let next = parent[cur];
        parent[cur] = r;
        cur = next;
    }
    r
}

fn dsu_union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (dsu_find(parent, a), dsu_find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Canonical enumeration of the boundary cycles of a source-target pair:
/// cycles through boundary points first (ordered by smallest point), then
/// source circles, then target circles (ordered by id).
struct Cycles {
    count: usize,
    point_cycle: HashMap<Point, usize>,
    src_circle: HashMap<CircleId, usize>,
    dst_circle: HashMap<CircleId, usize>,
}

fn boundary_cycles(src: &Matching, dst: &Matching) -> Cycles {
    let mut points: Vec<Point> = src.arcs.iter().flat_map(|&(a, b)| [a, b]).collect();
    points.sort_unstable();
    debug_assert!({
        let mut q: Vec<Point> = dst.arcs.iter().flat_map(|&(a, b)| [a, b]).collect();
        q.sort_unstable();
        q == points
    });
    let index: HashMap<Point, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..points.len()).collect();
    for m in [src, dst] {
        for &(a, b) in &m.arcs {
            dsu_union(&mut parent, index[&a], index[&b]);
        }
    }
    let mut point_cycle = HashMap::new();
    let mut root_cycle: HashMap<usize, usize> = HashMap::new();
    let mut count = 0;
    for (i, &p) in points.iter().enumerate() {
        let r = dsu_find(&mut parent, i);
        let c = *root_cycle.entry(r).or_insert_with(|| {
            count += 1;
            count - 1
        });
        point_cycle.insert(p, c);
    }
    let mut src_circle = HashMap::new();
    for &k in &src.circles {
        src_circle.insert(k, count);
        count += 1;
    }
    let mut dst_circle = HashMap::new();
    for &k in &dst.circles {
        dst_circle.insert(k, count);
        count += 1;
    }
    assert!(count <= 64, "cycle count exceeds mask width");
    Cycles { count, point_cycle, src_circle, dst_circle }
}

/// Component analysis of disks glued along arcs and circles; shared by all
/// dot assignments of one gluing problem.
struct GlueEval {
    comp_nodes: Vec<Vec<usize>>,
    comp_chi: Vec<i32>,
    comp_cycles: Vec<Vec<usize>>,
}

fn glue_eval(
    nodes: usize,
    arc_glues: &[(usize, usize)],
    circle_glues: &[(usize, usize)],
    result_node: &[usize],
) -> GlueEval {
    let mut parent: Vec<usize> = (0..nodes).collect();
    for &(a, b) in arc_glues.iter().chain(circle_glues) {
        dsu_union(&mut parent, a, b);
    }
    let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
    let mut comp_nodes: Vec<Vec<usize>> = Vec::new();
    let mut comp_of_node = vec![usize::MAX; nodes];
    for n in 0..nodes {
        let r = dsu_find(&mut parent, n);
        let c = *comp_of_root.entry(r).or_insert_with(|| {
            comp_nodes.push(Vec::new());
            comp_nodes.len() - 1
        });
        comp_nodes[c].push(n);
        comp_of_node[n] = c;
    }
    let mut comp_chi: Vec<i32> = comp_nodes.iter().map(|ns| ns.len() as i32).collect();
    for &(a, _) in arc_glues {
        comp_chi[comp_of_node[a]] -= 1;
    }
    let mut comp_cycles = vec![Vec::new(); comp_nodes.len()];
    for (cycle, &node) in result_node.iter().enumerate() {
        comp_cycles[comp_of_node[node]].push(cycle);
    }
    GlueEval { comp_nodes, comp_chi, comp_cycles }
}

impl GlueEval {
    /// Evaluate one dot assignment (bit per node) into result-basis terms.
    fn eval(&self, dots: u128, coeff: &Q, out: &mut Mor) {
        let mut acc: Vec<(u64, Q)> = vec![(0, coeff.clone())];
        for (k, nodes) in self.comp_nodes.iter().enumerate() {
            let mut delta = 0u32;
            for &n in nodes {
                delta += (dots >> n & 1) as u32;
            }
            let b = self.comp_cycles[k].len() as i32;
            let two_g = 2 - b - self.comp_chi[k];
            assert!(two_g >= 0 && two_g % 2 == 0, "gluing did not produce a surface");
            let mut g = two_g / 2;
            let mut scale = 1i64;
            if g == 1 && delta == 0 {
                // a torus summand equals twice a dot
                scale = 2;
                delta = 1;
                g = 0;
            }
            if g >= 1 || delta >= 2 {
                acc.clear();
                break;
            }
            if b == 0 {
                // closed component: a sphere needs exactly one dot to be 1
                if delta == 0 {
                    acc.clear();
                    break;
                }
                if scale != 1 {
                    let f = Q::from_i64(scale).unwrap();
                    for (_, c) in &mut acc {
                        *c = &*c * &f;
                    }
                }
                continue;
            }
            let mut all = 0u64;
            for &cy in &self.comp_cycles[k] {
                all |= 1 << cy;
            }
            let options: Vec<u64> = if delta == 1 {
                vec![all]
            } else {
                // no dots: one cycle stays plain, the rest get dots
                self.comp_cycles[k].iter().map(|&plain| all & !(1 << plain)).collect()
            };
            let factor = Q::from_i64(scale).unwrap();
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for (mask, c) in &acc {
                for opt in &options {
                    next.push((mask | opt, c * &factor));
                }
            }
            acc = next;
        }
        for (mask, c) in acc {
            out.add_term(mask, c);
        }
    }
}

/// Vertical composition g after f through the middle tangle m2.
fn compose(m1: &Matching, m2: &Matching, m3: &Matching, f: &Mor, g: &Mor) -> Mor {
    let fc = boundary_cycles(m1, m2);
    let gc = boundary_cycles(m2, m3);
    let rc = boundary_cycles(m1, m3);
    let nf = fc.count;
    let arc_glues: Vec<(usize, usize)> = m2
        .arcs
        .iter()
        .map(|&(u, _)| (fc.point_cycle[&u], nf + gc.point_cycle[&u]))
        .collect();
    let circle_glues: Vec<(usize, usize)> = m2
        .circles
        .iter()
        .map(|&k| (fc.dst_circle[&k], nf + gc.src_circle[&k]))
        .collect();
    let mut result_node = vec![usize::MAX; rc.count];
    for (&p, &cy) in &rc.point_cycle {
        result_node[cy] = fc.point_cycle[&p];
    }
    for (&k, &cy) in &rc.src_circle {
        result_node[cy] = fc.src_circle[&k];
    }
    for (&k, &cy) in &rc.dst_circle {
        result_node[cy] = nf + gc.dst_circle[&k];
    }
    let ge = glue_eval(nf + gc.count, &arc_glues, &circle_glues, &result_node);
    let mut out = Mor::zero();
    for (mf, cf) in &f.terms {
        for (mg, cg) in &g.terms {
            let dots = *mf as u128 | (*mg as u128) << nf;
            ge.eval(dots, &(cf * cg), &mut out);
        }
    }
    out
}

/// Inverse of an endomorphism whose identity coefficient is nonzero: the
/// dotted part is nilpotent, so a finite geometric series suffices.
fn invert(m: &Matching, phi: &Mor) -> Mor {
    let lambda = phi.id_coeff();
    assert!(!lambda.is_zero(), "endomorphism is not invertible");
    let linv = lambda.recip();
    let mut nil = phi.clone();
    nil.sub(&Mor::single(0, lambda));
    let mut psi = Mor::zero();
    let mut pow = Mor::single(0, Q::one()); // nil^k
    let mut coeff = linv.clone(); // (-1)^k linv^(k+1)
    for _ in 0..=m.arcs.len() + m.circles.len() + 1 {
        if pow.is_zero() {
            break;
        }
        for (mask, c) in &pow.terms {
            psi.add_term(*mask, c * &coeff);
        }
        pow = compose(m, m, m, &pow, &nil);
        coeff = -(&coeff * &linv);
    }
    assert!(pow.is_zero(), "dotted part failed to nilpotate");
    psi
}

#[derive(Clone, Debug)]
struct Obj {
    h: i32,
    q: i32,
    m: Matching,
}

#[derive(Default)]
struct Complex {
    objs: BTreeMap<u32, Obj>,
    out: BTreeMap<u32, BTreeMap<u32, Mor>>,
    inc: BTreeMap<u32, BTreeSet<u32>>,
    next_id: u32,
    next_circle: CircleId,
}

impl Complex {
    fn add_obj(&mut self, h: i32, q: i32, m: Matching) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        self.objs.insert(id, Obj { h, q, m });
        id
    }

    fn entry(&self, a: u32, b: u32) -> Option<&Mor> {
        self.out.get(&a).and_then(|row| row.get(&b))
    }

    fn set_entry(&mut self, a: u32, b: u32, mor: Mor) {
        if mor.is_zero() {
            if let Some(row) = self.out.get_mut(&a) {
                row.remove(&b);
            }
            if let Some(set) = self.inc.get_mut(&b) {
                set.remove(&a);
            }
        } else {
            self.out.entry(a).or_default().insert(b, mor);
            self.inc.entry(b).or_default().insert(a);
        }
    }

    fn remove_obj(&mut self, id: u32) {
        if let Some(row) = self.out.remove(&id) {
            for b in row.keys() {
                if let Some(set) = self.inc.get_mut(b) {
                    set.remove(&id);
                }
            }
        }
        if let Some(set) = self.inc.remove(&id) {
            for a in set {
                if let Some(row) = self.out.get_mut(&a) {
                    row.remove(&id);
                }
            }
        }
        self.objs.remove(&id);
    }
}

/// Where a tangle piece of a plugged object came from: an arc of the old
/// matching or one of the two smoothing arcs of the new crossing.
#[derive(Clone, Copy, Debug)]
enum Witness {
    OldArc(usize),
    NewArc(usize),
}

struct Plugged {
    m: Matching,
    circle_witness: Vec<(CircleId, Witness)>,
}

enum GluePair {
    PointSlot(Point, usize),
    SlotSlot(usize, usize),
}

/// Gluings between the open boundary and the four slots of a crossing.
fn crossing_glue(x: &[usize; 4], open: &BTreeSet<Point>) -> Vec<GluePair> {
    let mut pairs = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (s, &label) in x.iter().enumerate() {
        if let Some(&s0) = seen.get(&label) {
            pairs.push(GluePair::SlotSlot(s0, s));
        } else {
            seen.insert(label, s);
            if open.contains(&label) {
                pairs.push(GluePair::PointSlot(label, s));
            }
        }
    }
    pairs
}

fn smoothing_pairs(label: u8) -> [(usize, usize); 2] {
    let arcs = PlanarDiagram::smoothing_arcs(label);
    [(arcs[0][0], arcs[0][1]), (arcs[1][0], arcs[1][1])]
}

/// Attach one smoothing of a crossing to a matching, chaining arcs through
/// the glued points; returns the new matching plus a witness piece for each
/// closed circle that formed.
fn plug(
    m: &Matching,
    sm: [(usize, usize); 2],
    x: &[usize; 4],
    glue: &[GluePair],
    next_circle: &mut CircleId,
) -> Plugged {
    debug_assert!(m.circles.is_empty(), "plugging into an undelooped object");
    let mut points: Vec<Point> = m.arcs.iter().flat_map(|&(a, b)| [a, b]).collect();
    points.sort_unstable();
    let pidx: HashMap<Point, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let np = points.len();
    let total = np + 4;
    let mut edges: Vec<(usize, usize, Option<Witness>)> = Vec::new();
    for (i, &(u, v)) in m.arcs.iter().enumerate() {
        edges.push((pidx[&u], pidx[&v], Some(Witness::OldArc(i))));
    }
    for (k, &(a, b)) in sm.iter().enumerate() {
        edges.push((np + a, np + b, Some(Witness::NewArc(k))));
    }
    for gp in glue {
        match *gp {
            GluePair::PointSlot(p, s) => edges.push((pidx[&p], np + s, None)),
            GluePair::SlotSlot(a, b) => edges.push((np + a, np + b, None)),
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (e, &(a, b, _)) in edges.iter().enumerate() {
        adj[a].push(e);
        adj[b].push(e);
    }
    let label_of = |n: usize| -> Point {
        if n < np {
            points[n]
        } else {
            x[n - np]
        }
    };
    let mut visited = vec![false; edges.len()];
    let walk = |start: usize, first: usize, visited: &mut Vec<bool>| -> (usize, Option<Witness>) {
        let mut witness = None;
        let (mut node, mut edge) = (start, first);
        loop {
            visited[edge] = true;
            if witness.is_none() {
                witness = edges[edge].2;
            }
            let (a, b, _) = edges[edge];
            node = if a == node { b } else { a };
            match adj[node].iter().find(|&&e| !visited[e]) {
                Some(&e) => edge = e,
                None => return (node, witness),
            }
        }
    };
    let mut arcs = Vec::new();
    for start in 0..total {
        if adj[start].len() != 1 || visited[adj[start][0]] {
            continue;
        }
        let (end, _) = walk(start, adj[start][0], &mut visited);
        arcs.push((label_of(start), label_of(end)));
    }
    let mut circles = Vec::new();
    let mut circle_witness = Vec::new();
    for start in 0..total {
        let Some(&first) = adj[start].iter().find(|&&e| !visited[e]) else {
            continue;
        };
        let (_, witness) = walk(start, first, &mut visited);
        let id = *next_circle;
        *next_circle += 1;
        circles.push(id);
        circle_witness.push((id, witness.expect("closed chain without a tangle piece")));
    }
    let mut out = Matching { arcs, circles };
    out.normalize();
    Plugged { m: out, circle_witness }
}

fn slot_of_label(x: &[usize; 4], label: usize) -> usize {
    x.iter().position(|&l| l == label).expect("label not on this crossing")
}

fn arc_of_slot(sm: &[(usize, usize); 2], s: usize) -> usize {
    if sm[0].0 == s || sm[0].1 == s {
        0
    } else {
        1
    }
}

/// The saddle morphism between the two plugged smoothings of one object:
/// strips over the old arcs plus a single square over the crossing.
fn saddle_mor(obj: &Obj, p0: &Plugged, p1: &Plugged, glue: &[GluePair], sign: Q) -> Mor {
    let arc_of: HashMap<Point, usize> = obj
        .m
        .arcs
        .iter()
        .enumerate()
        .flat_map(|(i, &(u, v))| [(u, i), (v, i)])
        .collect();
    let na = obj.m.arcs.len();
    let arc_glues: Vec<(usize, usize)> = glue
        .iter()
        .map(|gp| match *gp {
            GluePair::PointSlot(p, _) => (arc_of[&p], na),
            GluePair::SlotSlot(_, _) => (na, na),
        })
        .collect();
    let rc = boundary_cycles(&p0.m, &p1.m);
    let mut result_node = vec![usize::MAX; rc.count];
    for (&p, &cy) in &rc.point_cycle {
        result_node[cy] = arc_of.get(&p).copied().unwrap_or(na);
    }
    let witness_node = |w: Witness| match w {
        Witness::OldArc(i) => i,
        Witness::NewArc(_) => na,
    };
    for &(k, w) in &p0.circle_witness {
        result_node[rc.src_circle[&k]] = witness_node(w);
    }
    for &(k, w) in &p1.circle_witness {
        result_node[rc.dst_circle[&k]] = witness_node(w);
    }
    let ge = glue_eval(na + 1, &arc_glues, &[], &result_node);
    let mut out = Mor::zero();
    ge.eval(0, &sign, &mut out);
    out
}

/// Extend an existing entry by the identity on one smoothing and plug.
#[allow(clippy::too_many_arguments)]
fn extend_mor(
    psrc: &Obj,
    pdst: &Obj,
    psi: &Mor,
    sm: &[(usize, usize); 2],
    x: &[usize; 4],
    glue: &[GluePair],
    plug_src: &Plugged,
    plug_dst: &Plugged,
) -> Mor {
    let fc = boundary_cycles(&psrc.m, &pdst.m);
    let nf = fc.count;
    let arc_glues: Vec<(usize, usize)> = glue
        .iter()
        .map(|gp| match *gp {
            GluePair::PointSlot(p, s) => (fc.point_cycle[&p], nf + arc_of_slot(sm, s)),
            GluePair::SlotSlot(a, b) => (nf + arc_of_slot(sm, a), nf + arc_of_slot(sm, b)),
        })
        .collect();
    let rc = boundary_cycles(&plug_src.m, &plug_dst.m);
    let mut result_node = vec![usize::MAX; rc.count];
    for (&p, &cy) in &rc.point_cycle {
        result_node[cy] = match fc.point_cycle.get(&p) {
            Some(&node) => node,
            None => nf + arc_of_slot(sm, slot_of_label(x, p)),
        };
    }
    let src_witness = |w: Witness| match w {
        Witness::OldArc(i) => fc.point_cycle[&psrc.m.arcs[i].0],
        Witness::NewArc(k) => nf + k,
    };
    let dst_witness = |w: Witness| match w {
        Witness::OldArc(i) => fc.point_cycle[&pdst.m.arcs[i].0],
        Witness::NewArc(k) => nf + k,
    };
    for &(k, w) in &plug_src.circle_witness {
        result_node[rc.src_circle[&k]] = src_witness(w);
    }
    for &(k, w) in &plug_dst.circle_witness {
        result_node[rc.dst_circle[&k]] = dst_witness(w);
    }
    let ge = glue_eval(nf + 2, &arc_glues, &[], &result_node);
    let mut out = Mor::zero();
    for (mask, c) in &psi.terms {
        ge.eval(*mask as u128, c, &mut out);
    }
    out
}

/// Tensor the two-term complex of one crossing onto the scan complex.
fn tensor(old: Complex, x: &[usize; 4], open: &BTreeSet<Point>) -> Complex {
    let glue = crossing_glue(x, open);
    let sm0 = smoothing_pairs(0);
    let sm1 = smoothing_pairs(1);
    let mut new = Complex { next_circle: old.next_circle, ..Default::default() };
    let mut kids: BTreeMap<u32, ([u32; 2], [Plugged; 2])> = BTreeMap::new();
    for (&id, obj) in &old.objs {
        let p0 = plug(&obj.m, sm0, x, &glue, &mut new.next_circle);
        let p1 = plug(&obj.m, sm1, x, &glue, &mut new.next_circle);
        let id0 = new.add_obj(obj.h, obj.q, p0.m.clone());
        let id1 = new.add_obj(obj.h + 1, obj.q + 1, p1.m.clone());
        kids.insert(id, ([id0, id1], [p0, p1]));
    }
    for (&id, obj) in &old.objs {
        let ([id0, id1], [p0, p1]) = &kids[&id];
        let sign = if obj.h.rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
        let mor = saddle_mor(obj, p0, p1, &glue, sign);
        new.set_entry(*id0, *id1, mor);
    }
    for (&a, row) in &old.out {
        for (&b, psi) in row {
            for (l, sm) in [(0usize, &sm0), (1, &sm1)] {
                let mor = extend_mor(
                    &old.objs[&a],
                    &old.objs[&b],
                    psi,
                    sm,
                    x,
                    &glue,
                    &kids[&a].1[l],
                    &kids[&b].1[l],
                );
                new.set_entry(kids[&a].0[l], kids[&b].0[l], mor);
            }
        }
    }
    new
}

/// Keep only the terms of `m` with the given dot state on cycle `idx`, and
/// drop that cycle from the mask.
fn mask_filter(m: &Mor, idx: usize, keep_dotted: bool) -> Mor {
    let low = (1u64 << idx) - 1;
    let mut out = Mor::zero();
    for (&mask, c) in &m.terms {
        if (mask >> idx & 1 == 1) != keep_dotted {
            continue;
        }
        out.add_term((mask & low) | (mask >> (idx + 1)) << idx, c.clone());
    }
    out
}

/// Split every object with a closed circle into its two quantum shifts.
fn deloop_all(cx: &mut Complex) {
    loop {
        let found = cx
            .objs
            .iter()
            .find_map(|(&id, o)| o.m.circles.first().map(|&k| (id, k)));
        let Some((oid, k)) = found else { break };
        let obj = cx.objs[&oid].clone();
        let mut stripped = obj.m.clone();
        stripped.circles.retain(|&c| c != k);
        let plus = cx.add_obj(obj.h, obj.q + 1, stripped.clone());
        let minus = cx.add_obj(obj.h, obj.q - 1, stripped);
        let ins: Vec<u32> = cx.inc.get(&oid).map(|s| s.iter().copied().collect()).unwrap_or_default();
        for p in ins {
            let psi = cx.out[&p][&oid].clone();
            let idx = boundary_cycles(&cx.objs[&p].m, &obj.m).dst_circle[&k];
            // a plain cycle feeds the +1 summand, a dotted one the -1 summand
            cx.set_entry(p, plus, mask_filter(&psi, idx, false));
            cx.set_entry(p, minus, mask_filter(&psi, idx, true));
        }
        let outs: Vec<u32> = cx.out.get(&oid).map(|r| r.keys().copied().collect()).unwrap_or_default();
        for r in outs {
            let phi = cx.out[&oid][&r].clone();
            let idx = boundary_cycles(&obj.m, &cx.objs[&r].m).src_circle[&k];
            // leaving the +1 summand costs a dot, leaving the -1 summand none
            cx.set_entry(plus, r, mask_filter(&phi, idx, true));
            cx.set_entry(minus, r, mask_filter(&phi, idx, false));
        }
        cx.remove_obj(oid);
    }
}

/// Cancel invertible differential entries until none remain.
fn eliminate_all(cx: &mut Complex) {
    let mut queue: VecDeque<(u32, u32)> = cx
        .out
        .iter()
        .flat_map(|(&a, row)| row.keys().map(move |&b| (a, b)))
        .collect();
    while let Some((a, b)) = queue.pop_front() {
        let Some(phi) = cx.entry(a, b) else { continue };
        let (oa, ob) = (&cx.objs[&a], &cx.objs[&b]);
        if oa.m != ob.m || oa.q != ob.q || phi.id_coeff().is_zero() {
            continue;
        }
        let phi = phi.clone();
        let mid = oa.m.clone();
        let psi = invert(&mid, &phi);
        let ins: Vec<(u32, Mor)> = cx.inc[&b]
            .iter()
            .filter(|&&p| p != a)
            .map(|&p| (p, cx.out[&p][&b].clone()))
            .collect();
        let outs: Vec<(u32, Mor)> = cx.out[&a]
            .iter()
            .filter(|&(&r, _)| r != b)
            .map(|(&r, m)| (r, m.clone()))
            .collect();
        cx.remove_obj(a);
        cx.remove_obj(b);
        for (p, alpha) in &ins {
            let t1 = compose(&cx.objs[p].m, &mid, &mid, alpha, &psi);
            for (r, beta) in &outs {
                let t2 = compose(&cx.objs[p].m, &mid, &cx.objs[r].m, &t1, beta);
                if t2.is_zero() {
                    continue;
                }
                let mut cur = cx.entry(*p, *r).cloned().unwrap_or_else(Mor::zero);
                cur.sub(&t2);
                cx.set_entry(*p, *r, cur);
                queue.push_back((*p, *r));
            }
        }
    }
}

/// Crossing order greedily maximizing overlap with the open boundary.
fn scan_order(d: &PlanarDiagram) -> Vec<usize> {
    let n = d.crossing_count();
    let mut used = vec![false; n];
    let mut open: BTreeSet<Point> = BTreeSet::new();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(i64, usize)> = None;
        for (c, x) in d.crossings().iter().enumerate() {
            if used[c] {
                continue;
            }
            let shared = x.iter().filter(|l| open.contains(l)).count() as i64;
            let key = (-shared, c);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let (_, c) = best.unwrap();
        used[c] = true;
        order.push(c);
        let x = d.crossings()[c];
        for &label in &x {
            if x.iter().filter(|&&t| t == label).count() == 2 {
                continue;
            }
            if !open.remove(&label) {
                open.insert(label);
            }
        }
    }
    order
}

pub fn khovanov_homology_scan(d: &PlanarDiagram) -> Result<BigradedDims, KhError> {
    let order = scan_order(d);
    let mut cx = Complex::default();
    cx.add_obj(0, 0, Matching::empty());
    let mut open: BTreeSet<Point> = BTreeSet::new();
    for &ci in &order {
        let x = d.crossings()[ci];
        cx = tensor(cx, &x, &open);
        for &label in &x {
            if x.iter().filter(|&&t| t == label).count() == 2 {
                continue;
            }
            if !open.remove(&label) {
                open.insert(label);
            }
        }
        deloop_all(&mut cx);
        eliminate_all(&mut cx);
    }
    assert!(open.is_empty(), "unclosed boundary after the scan");
    let n_minus = d.negative_crossings() as i32;
    let n_plus = d.positive_crossings() as i32;
    let mut table = BigradedDims::new();
    for obj in cx.objs.values() {
        assert!(obj.m.arcs.is_empty() && obj.m.circles.is_empty());
        let i_std = obj.h - n_minus;
        let j_std = obj.q + n_plus - 2 * n_minus;
        table.add(-i_std, -j_std, 1);
    }
    assert!(
        cx.out.values().all(|row| row.is_empty()),
        "uncancelled differential at the end of the scan"
    );
    for _ in 0..d.free_loops() {
        let mut next = BigradedDims::new();
        for ((i, j), dim) in table.iter() {
            next.add(i, j + 1, dim);
            next.add(i, j - 1, dim);
        }
        table = next;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{braid_closure, parse_pd, pretzel};
    use crate::khovanov::cube::khovanov_homology_with_limit;
    use crate::khovanov::dims::collapse;
    use proptest::prelude::*;

    fn scan(d: &PlanarDiagram) -> BigradedDims {
        khovanov_homology_scan(d).unwrap()
    }

    fn cube(d: &PlanarDiagram) -> BigradedDims {
        khovanov_homology_with_limit(d, 16).unwrap()
    }

    #[test]
    fn matches_cube_on_pd_corpus() {
        let pds = [
            "+O 1",
            "X[1,2,2,1]",
            "X[2,2,1,1]",
            "X[2,4,1,3];X[4,2,3,1]",
            "X[3,2,4,1];X[1,4,2,3]",
            "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]",
            "X[4,2,5,1];X[6,4,1,3];X[2,6,3,5]",
            "X[4,2,5,1];X[8,6,1,5];X[6,3,7,4];X[2,7,3,8]",
            "X[1,6,2,7];X[5,8,6,1];X[7,4,8,5];X[2,3,3,4]",
            "X[1,3,2,4];X[2,3,1,4]",
            "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3] +O 2",
        ];
        for pd in pds {
            let d = parse_pd(pd).unwrap();
            assert_eq!(scan(&d), cube(&d), "{pd}");
        }
    }

    #[test]
    fn matches_cube_on_braids() {
        let words: [(usize, &[i32]); 8] = [
            (3, &[1, 2, 1]),
            (3, &[2, 1, 2]),
            (3, &[1, -2, 1, -2]),
            (3, &[1, 1, 2, 2]),
            (2, &[1, -1, 1, -1]),
            (3, &[-1, -1, -1, 2, 1, 1, 1, 2]),
            (4, &[1, 2, 3, 1, 2, 3]),
            (3, &[1, 1, 1, -2, -2]),
        ];
        for (strands, word) in words {
            let d = braid_closure(strands, word).unwrap();
            assert_eq!(scan(&d), cube(&d), "closure of {word:?}");
        }
    }

    #[test]
    fn matches_cube_on_pretzel() {
        let d = pretzel(-2, 3, 3).unwrap();
        assert_eq!(scan(&d), cube(&d));
    }

    #[test]
    fn two_strand_torus_closed_form() {
        // the (2,n) torus braid closures follow the classical staircase
        for n in [3i32, 7, 15] {
            let d = braid_closure(2, &vec![1; n as usize]).unwrap();
            let got = scan(&d);
            let mut want = BigradedDims::new();
            want.add(0, -(n - 2), 1);
            want.add(0, -n, 1);
            for s in 1..=(n - 1) / 2 {
                want.add(-2 * s, -(n - 2 + 4 * s), 1);
                want.add(-2 * s - 1, -(n + 2 + 4 * s), 1);
            }
            assert_eq!(got, want, "T(2,{n})");
        }
        let d = braid_closure(2, &vec![1; 15]).unwrap();
        assert_eq!(collapse(&scan(&d)).kappa(), Some(13));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_braids_match_cube(word in proptest::collection::vec(
            prop_oneof![Just(1i32), Just(-1), Just(2), Just(-2)], 1..7)) {
            let d = braid_closure(3, &word).unwrap();
            prop_assert_eq!(scan(&d), cube(&d));
        }
    }
}
