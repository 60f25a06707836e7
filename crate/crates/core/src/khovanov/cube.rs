//! The cube of resolutions over the rationals: the reference implementation.
//!
//! States are bitmasks over crossings (bit k set = 1-smoothing at crossing
//! k). The circles of a state are the classes of edge labels under the
//! smoothing arcs; free loops add untouched circles to every state.
//! Generators are circle labelings encoded as bitmasks (set bit = x label,
//! clear = 1), indexed inside each bigraded block by state order and then
//! combinadic rank. Differentials apply merge/split at each clear crossing
//! bit with the sign (-1)^(number of set bits below it).

use std::collections::BTreeMap;

use num_traits::FromPrimitive;

use crate::diagram::PlanarDiagram;
use crate::homalg::{GradedChainComplex, Grading, Q, SparseMatrix};

use super::dims::BigradedDims;
use super::KhError;

/// Refuse the naive cube above this many crossings unless raised explicitly.
pub const DEFAULT_NAIVE_LIMIT: usize = 16;

/// State masks are u32; anything bigger is out of reach for the cube anyway.
const HARD_LIMIT: usize = 30;

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut cur = a;
        while self.parent[cur] != r {
            let next = self.parent[cur];
            self.parent[cur] = r;
            cur = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Circles of one state: `idx[e]` is the circle index of edge `e` (free
/// loops get pseudo-labels `edge_count+1..`), `reps[c]` the smallest label
/// on circle `c`. Circles are ordered by smallest label.
struct StateCircles {
    reps: Vec<usize>,
    idx: Vec<usize>,
}

fn state_circles(d: &PlanarDiagram, state: u32) -> StateCircles {
    let ne = d.edge_count();
    let total = ne + 1 + d.free_loops();
    let mut dsu = Dsu::new(total);
    for (k, x) in d.crossings().iter().enumerate() {
        let label = ((state >> k) & 1) as u8;
        for arc in PlanarDiagram::smoothing_arcs(label) {
            dsu.union(x[arc[0]], x[arc[1]]);
        }
    }
    let mut reps = Vec::new();
    let mut idx = vec![usize::MAX; total];
    for e in 1..total {
        let r = dsu.find(e);
        if r == e {
            idx[e] = reps.len();
            reps.push(e);
        } else {
            idx[e] = idx[r];
        }
    }
    StateCircles { reps, idx }
}

/// Binomial table plus combinadic ranking of fixed-popcount bitmasks.
struct Binomials(Vec<Vec<u64>>);

impl Binomials {
    fn new(n: usize) -> Binomials {
        let mut t = vec![vec![0u64; n + 1]; n + 1];
        for i in 0..=n {
            t[i][0] = 1;
            for k in 1..=i {
                t[i][k] = t[i - 1][k - 1] + t[i - 1][k];
            }
        }
        Binomials(t)
    }

    fn c(&self, n: usize, k: usize) -> usize {
        if k > n {
            0
        } else {
            self.0[n][k] as usize
        }
    }

    /// Rank of `mask` among equal-popcount masks in increasing numeric order.
    fn rank(&self, mask: u64) -> usize {
        let mut rank = 0;
        let mut seen = 0;
        let mut m = mask;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            m &= m - 1;
            seen += 1;
            rank += self.c(p, seen);
        }
        rank
    }
}

/// The bigraded Khovanov chain complex of `d` over the rationals, in
/// internal gradings (homological, quantum) with differential shift (1, 0).
pub fn cube_complex(d: &PlanarDiagram) -> Result<GradedChainComplex<Q>, KhError> {
    cube_complex_with_limit(d, DEFAULT_NAIVE_LIMIT)
}

pub fn cube_complex_with_limit(
    d: &PlanarDiagram,
    limit: usize,
) -> Result<GradedChainComplex<Q>, KhError> {
    let n = d.crossing_count();
    let eff = limit.min(HARD_LIMIT);
    if n > eff {
        return Err(KhError::TooManyCrossings { crossings: n, limit: eff });
    }
    let n_minus = d.negative_crossings() as i32;
    let n_plus = d.positive_crossings() as i32;
    let states: u32 = 1 << n;

    let data: Vec<StateCircles> = (0..states).map(|s| state_circles(d, s)).collect();
    let max_circles = data.iter().map(|sc| sc.reps.len()).max().unwrap_or(0);
    let bin = Binomials::new(max_circles + 1);

    // chain group dimensions and per-(state, x-count) base offsets
    let mut dims: BTreeMap<Grading, usize> = BTreeMap::new();
    let mut base: Vec<Vec<usize>> = Vec::with_capacity(states as usize);
    for s in 0..states {
        let c = data[s as usize].reps.len();
        let w = s.count_ones() as i32;
        let i = w - n_minus;
        let mut bases = Vec::with_capacity(c + 1);
        for t in 0..=c {
            let j = (c as i32 - 2 * t as i32) + w + n_plus - 2 * n_minus;
            let entry = dims.entry(vec![i, j]).or_insert(0);
            bases.push(*entry);
            *entry += bin.c(c, t);
        }
        base.push(bases);
    }

    let mut complex = GradedChainComplex::new(vec![1, 0]);
    for (g, &dim) in &dims {
        complex.set_dim(g.clone(), dim);
    }

    // differential entries per source grading, signs only
    let mut trips: BTreeMap<Grading, Vec<(usize, usize, i8)>> = BTreeMap::new();
    for s in 0..states {
        let sd = &data[s as usize];
        let c1 = sd.reps.len();
        let w = s.count_ones() as i32;
        let i = w - n_minus;
        for k in 0..n {
            if s >> k & 1 == 1 {
                continue;
            }
            let s2 = s | (1 << k);
            let sd2 = &data[s2 as usize];
            let c2 = sd2.reps.len();
            let sign: i8 = if (s & ((1 << k) - 1)).count_ones() % 2 == 1 { -1 } else { 1 };
            let x = d.crossings()[k];
            // where each source circle's smallest edge lands in the target
            let map: Vec<usize> = sd.reps.iter().map(|&e| sd2.idx[e]).collect();
            let merging = c2 + 1 == c1;
            debug_assert!(merging || c2 == c1 + 1);
            let (a, b) = (sd.idx[x[0]], sd.idx[x[2]]);
            let (ta, tb) = (sd2.idx[x[0]], sd2.idx[x[1]]);
            for m in 0..(1u64 << c1) {
                let t = m.count_ones() as usize;
                let j = (c1 as i32 - 2 * t as i32) + w + n_plus - 2 * n_minus;
                let src = base[s as usize][t] + bin.rank(m);
                let out = trips.entry(vec![i, j]).or_default();
                if merging {
                    // m: nothing to emit on x (x) x; otherwise labels transport
                    // along `map`, which ORs the two merged circles
                    if m >> a & 1 == 1 && m >> b & 1 == 1 {
                        continue;
                    }
                    let mut m2 = 0u64;
                    let mut rest = m;
                    while rest != 0 {
                        let ci = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        m2 |= 1 << map[ci];
                    }
                    let t2 = m2.count_ones() as usize;
                    out.push((base[s2 as usize][t2] + bin.rank(m2), src, sign));
                } else {
                    // split of circle a into ta, tb
                    debug_assert_eq!(a, b);
                    debug_assert_ne!(ta, tb);
                    let mut m2 = 0u64;
                    let mut rest = m & !(1 << a);
                    while rest != 0 {
                        let ci = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        m2 |= 1 << map[ci];
                    }
                    if m >> a & 1 == 1 {
                        // x -> x (x) x
                        let m3 = m2 | (1 << ta) | (1 << tb);
                        let t3 = m3.count_ones() as usize;
                        out.push((base[s2 as usize][t3] + bin.rank(m3), src, sign));
                    } else {
                        // 1 -> 1 (x) x + x (x) 1
                        for half in [m2 | (1 << ta), m2 | (1 << tb)] {
                            let t3 = half.count_ones() as usize;
                            out.push((base[s2 as usize][t3] + bin.rank(half), src, sign));
                        }
                    }
                }
            }
        }
    }

    for (g, entries) in trips {
        let tgt = vec![g[0] + 1, g[1]];
        let rows = dims.get(&tgt).copied().unwrap_or(0);
        let cols = dims[&g];
        let mut m = SparseMatrix::zero(rows, cols);
        for (r, c, v) in entries {
            m.set(r, c, Q::from_i8(v).unwrap());
        }
        complex.set_diff(g, m);
    }
    Ok(complex)
}

/// Bigraded homology dimensions in the reported convention, which negates
/// both internal cube gradings.
pub fn khovanov_homology(d: &PlanarDiagram) -> Result<BigradedDims, KhError> {
    khovanov_homology_with_limit(d, DEFAULT_NAIVE_LIMIT)
}

pub fn khovanov_homology_with_limit(
    d: &PlanarDiagram,
    limit: usize,
) -> Result<BigradedDims, KhError> {
    let complex = cube_complex_with_limit(d, limit)?;
    let mut out = BigradedDims::new();
    for (g, dim) in complex.homology_dims() {
        out.add(-g[0], -g[1], dim);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{braid_closure, parse_pd};
    use crate::khovanov::dims::{collapse, graded_euler_char, LaurentPoly};

    fn table_of(d: &PlanarDiagram) -> BigradedDims {
        let complex = cube_complex(d).unwrap();
        complex.verify_complex().unwrap();
        let mut out = BigradedDims::new();
        for (g, dim) in complex.homology_dims() {
            out.add(-g[0], -g[1], dim);
        }
        // chain-level Euler characteristic must agree with the homology one
        let mut chain_chi = LaurentPoly::default();
        for g in complex.gradings() {
            let sgn = if g[0].rem_euclid(2) == 0 { 1 } else { -1 };
            chain_chi.add_term(-g[1], sgn * complex.dim(g) as i64);
        }
        assert_eq!(graded_euler_char(&out), chain_chi);
        out
    }

    fn table(pd: &str) -> BigradedDims {
        table_of(&parse_pd(pd).unwrap())
    }

    const LEFT_TREFOIL: &str = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]";
    const RIGHT_TREFOIL: &str = "X[4,2,5,1];X[6,4,1,3];X[2,6,3,5]";

    #[test]
    fn unknot_tables() {
        let expect = BigradedDims::from_pairs(&[(0, -1, 1), (0, 1, 1)]);
        // one free loop, no crossings
        assert_eq!(table("+O 1"), expect);
        // one-crossing kinks of either sign
        let neg_kink = parse_pd("X[1,2,2,1]").unwrap();
        let pos_kink = parse_pd("X[2,2,1,1]").unwrap();
        assert_eq!(neg_kink.writhe(), -1);
        assert_eq!(pos_kink.writhe(), 1);
        assert_eq!(table_of(&neg_kink), expect);
        assert_eq!(table_of(&pos_kink), expect);
        assert_eq!(collapse(&expect).kappa(), Some(-1));
    }

    #[test]
    fn hopf_link_tables() {
        let pos_pd = parse_pd("X[2,4,1,3];X[4,2,3,1]").unwrap();
        assert_eq!(pos_pd.writhe(), 2);
        let pos = table_of(&pos_pd);
        assert_eq!(
            pos,
            BigradedDims::from_pairs(&[(0, 0, 1), (0, -2, 1), (-2, -4, 1), (-2, -6, 1)])
        );
        assert_eq!(collapse(&pos).kappa(), Some(0));
        let neg_pd = parse_pd("X[3,2,4,1];X[1,4,2,3]").unwrap();
        assert_eq!(neg_pd.writhe(), -2);
        let neg = table_of(&neg_pd);
        assert_eq!(neg, pos.mirrored());
        assert_eq!(collapse(&neg).kappa(), Some(-4));
    }

    #[test]
    fn trefoil_tables() {
        let right_pd = parse_pd(RIGHT_TREFOIL).unwrap();
        assert_eq!(right_pd.writhe(), 3);
        let right = table_of(&right_pd);
        assert_eq!(
            right,
            BigradedDims::from_pairs(&[(0, -1, 1), (0, -3, 1), (-2, -5, 1), (-3, -9, 1)])
        );
        assert_eq!(collapse(&right).kappa(), Some(1));
        let left_pd = parse_pd(LEFT_TREFOIL).unwrap();
        assert_eq!(left_pd.writhe(), -3);
        let left = table_of(&left_pd);
        assert_eq!(left, right.mirrored());
        assert_eq!(collapse(&left).kappa(), Some(-6));
        // mirroring the diagram gives the mirrored table
        assert_eq!(table_of(&left_pd.mirror()), right);
    }

    #[test]
    fn figure_eight_table() {
        let d = parse_pd("X[4,2,5,1];X[8,6,1,5];X[6,3,7,4];X[2,7,3,8]").unwrap();
        assert_eq!(d.writhe(), 0);
        let got = table_of(&d);
        assert_eq!(
            got,
            BigradedDims::from_pairs(&[
                (2, 5, 1),
                (1, 1, 1),
                (0, 1, 1),
                (0, -1, 1),
                (-1, -1, 1),
                (-2, -5, 1),
            ])
        );
        assert_eq!(got, got.mirrored());
        assert_eq!(collapse(&got).kappa(), Some(-3));
    }

    #[test]
    fn split_union_tensors_with_unknot() {
        let with_loop = table(&format!("{} +O 1", LEFT_TREFOIL));
        let plain = table(LEFT_TREFOIL);
        let mut expect = BigradedDims::new();
        for ((i, j), dim) in plain.iter() {
            expect.add(i, j + 1, dim);
            expect.add(i, j - 1, dim);
        }
        assert_eq!(with_loop, expect);
    }

    #[test]
    fn naive_limit_is_enforced() {
        let d = parse_pd(LEFT_TREFOIL).unwrap();
        match cube_complex_with_limit(&d, 2) {
            Err(KhError::TooManyCrossings { crossings: 3, limit: 2 }) => {}
            other => panic!("expected size refusal, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn reidemeister_one_kink() {
        // left trefoil with a negative kink spliced into edge 2
        let kinked = parse_pd("X[1,6,2,7];X[5,8,6,1];X[7,4,8,5];X[2,3,3,4]").unwrap();
        assert_eq!(kinked.writhe(), -4);
        assert_eq!(table_of(&kinked), table(LEFT_TREFOIL));
    }

    #[test]
    fn reidemeister_two_poke() {
        // one circle poked under another: still the two-component unlink
        let poked = parse_pd("X[1,3,2,4];X[2,3,1,4]").unwrap();
        assert_eq!(poked.writhe(), 0);
        let unlink = table("+O 2");
        assert_eq!(
            unlink,
            BigradedDims::from_pairs(&[(0, -2, 1), (0, 0, 2), (0, 2, 1)])
        );
        assert_eq!(table_of(&poked), unlink);
    }

    #[test]
    fn reidemeister_three_braid_relation() {
        let a = braid_closure(3, &[1, 2, 1]).unwrap();
        let b = braid_closure(3, &[2, 1, 2]).unwrap();
        assert_eq!(a.writhe(), 3);
        assert_eq!(b.writhe(), 3);
        assert_eq!(table_of(&a), table_of(&b));
    }
}
