//! Integer surgery mapping cones over F2 for CFK-style input complexes:
//! flattened subquotient complexes, the vertical and horizontal maps, the
//! truncated cone, and the nontriviality predicate for the per-spin-c
//! inclusion maps.
//!
//! A `CfkComplex` is a finite model: generators carry a Maslov and an
//! Alexander grading, arrows carry a U-power. Generator `x` occupies the
//! lattice positions `(-m, A(x) - m)` for all integers `m`; an arrow
//! `x -> U^k y` connects `(0, A(x))` to `(-k, A(y) - k)` and translates.
//! Everything downstream (`A_s`, the hat column `B = C{i=0}`, the row
//! `C{j=0}`, v/h, tau, epsilon, the cone `X_n`) is finite F2 linear algebra
//! on those lattice representatives.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::homalg::{GradedChainComplex, SparseMatrix, F2};

#[derive(Debug, thiserror::Error)]
pub enum CfkError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("d² != 0: d²({0}) has a U^{1} component on `{2}`")]
    DSquare(String, i32, String),
    #[error("grading violation on `{0} -> U^{1} {2}`: {3}")]
    Grading(String, i32, String, String),
    #[error("hat homology of the {0} has dimension {1}, expected 1")]
    HatDimension(&'static str, usize),
    #[error("surgery framing must be nonzero")]
    ZeroFraming,
    #[error("window bound {0} too small: {1}")]
    Window(i32, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfkGenerator {
    pub name: String,
    pub maslov: i32,
    pub alexander: i32,
}

/// A finite CFK model, validated on construction: the U-extended
/// differential squares to zero, every arrow is filtered and drops Maslov by
/// one, and both the hat column and the `j = 0` row have one-dimensional
/// homology.
#[derive(Clone, Debug)]
pub struct CfkComplex {
    gens: Vec<CfkGenerator>,
    arrows: Vec<(usize, usize, i32)>, // (source, target, U-power)
}

/// Parse the CFK file grammar: `gen NAME M=<int> A=<int>` lines followed by
/// `d NAME -> NAME U^<k>` lines (`U^<k>` optional, meaning k = 0). Blank
/// lines and `#` comments are skipped.
pub fn parse_cfk(text: &str) -> Result<CfkComplex, CfkError> {
    let mut gens: Vec<CfkGenerator> = Vec::new();
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    let mut arrows: Vec<(usize, usize, i32)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let no = ln + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "gen" => {
                if toks.len() != 4 {
                    return Err(CfkError::Parse(no, "expected `gen NAME M=<int> A=<int>`".into()));
                }
                let name = toks[1].to_string();
                let maslov = parse_assign(toks[2], "M").ok_or_else(|| {
                    CfkError::Parse(no, format!("bad Maslov field `{}`", toks[2]))
                })?;
                let alexander = parse_assign(toks[3], "A").ok_or_else(|| {
                    CfkError::Parse(no, format!("bad Alexander field `{}`", toks[3]))
                })?;
                if names.insert(name.clone(), gens.len()).is_some() {
                    return Err(CfkError::DuplicateGenerator(name));
                }
                gens.push(CfkGenerator { name, maslov, alexander });
            }
            "d" => {
                if toks.len() < 4 || toks[2] != "->" || toks.len() > 5 {
                    return Err(CfkError::Parse(no, "expected `d NAME -> NAME U^<k>`".into()));
                }
                let src = *names
                    .get(toks[1])
                    .ok_or_else(|| CfkError::UnknownGenerator(toks[1].to_string()))?;
                let tgt = *names
                    .get(toks[3])
                    .ok_or_else(|| CfkError::UnknownGenerator(toks[3].to_string()))?;
                let k = match toks.get(4) {
                    None => 0,
                    Some(t) => t
                        .strip_prefix("U^")
                        .and_then(|s| s.parse::<i32>().ok())
                        .filter(|&k| k >= 0)
                        .ok_or_else(|| {
                            CfkError::Parse(no, format!("bad U-power `{t}`, need U^<k> with k >= 0"))
                        })?,
                };
                arrows.push((src, tgt, k));
            }
            other => {
                return Err(CfkError::Parse(no, format!("unknown directive `{other}`")));
            }
        }
    }
    CfkComplex::new(gens, arrows)
}

fn parse_assign(tok: &str, key: &str) -> Option<i32> {
    tok.strip_prefix(key)?.strip_prefix('=')?.parse().ok()
}

impl CfkComplex {
    pub fn new(
        gens: Vec<CfkGenerator>,
        arrows: Vec<(usize, usize, i32)>,
    ) -> Result<CfkComplex, CfkError> {
        let mut seen = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if seen.insert(g.name.clone(), i).is_some() {
                return Err(CfkError::DuplicateGenerator(g.name.clone()));
            }
        }
        let c = CfkComplex { gens, arrows };
        c.validate()?;
        Ok(c)
    }

    pub fn generators(&self) -> &[CfkGenerator] {
        &self.gens
    }

    pub fn arrows(&self) -> &[(usize, usize, i32)] {
        &self.arrows
    }

    pub fn max_abs_alexander(&self) -> i32 {
        self.gens.iter().map(|g| g.alexander.abs()).max().unwrap_or(0)
    }

    fn validate(&self) -> Result<(), CfkError> {
        for &(x, y, k) in &self.arrows {
            let (gx, gy) = (&self.gens[x], &self.gens[y]);
            if k < 0 {
                return Err(CfkError::Grading(
                    gx.name.clone(),
                    k,
                    gy.name.clone(),
                    "negative U-power".into(),
                ));
            }
            if gy.alexander - k > gx.alexander {
                return Err(CfkError::Grading(
                    gx.name.clone(),
                    k,
                    gy.name.clone(),
                    "raises the Alexander filtration".into(),
                ));
            }
            if gy.maslov - 2 * k != gx.maslov - 1 {
                return Err(CfkError::Grading(
                    gx.name.clone(),
                    k,
                    gy.name.clone(),
                    "does not drop Maslov by 1".into(),
                ));
            }
        }
        // d² = 0 after U-extension: match components (target, total U-power)
        for x in 0..self.gens.len() {
            let mut sq: BTreeMap<(usize, i32), bool> = BTreeMap::new();
            for &(s1, y, k1) in &self.arrows {
                if s1 != x {
                    continue;
                }
                for &(s2, z, k2) in &self.arrows {
                    if s2 != y {
                        continue;
                    }
                    let e = sq.entry((z, k1 + k2)).or_insert(false);
                    *e = !*e;
                }
            }
            if let Some(((z, k), _)) = sq.iter().find(|(_, &odd)| odd) {
                return Err(CfkError::DSquare(
                    self.gens[x].name.clone(),
                    *k,
                    self.gens[*z].name.clone(),
                ));
            }
        }
        let col_h = self.col_complex().homology_reps().len();
        if col_h != 1 {
            return Err(CfkError::HatDimension("i = 0 column", col_h));
        }
        let row_h = self.row_complex().homology_reps().len();
        if row_h != 1 {
            return Err(CfkError::HatDimension("j = 0 row", row_h));
        }
        Ok(())
    }

    /// U-power of the unique lattice representative of `x` inside A_s.
    fn level(&self, x: usize, s: i32) -> i32 {
        (self.gens[x].alexander - s).max(0)
    }

    /// A_s = C{max(i, j-s) = 0}: one representative per generator, at
    /// U-power max(0, A(x) - s); arrows survive when U-powers line up.
    fn a_complex(&self, s: i32) -> Flat {
        let mut f = Flat::new(self.gens.len());
        for &(x, y, k) in &self.arrows {
            if self.level(x, s) + k == self.level(y, s) {
                f.add(x, y);
            }
        }
        f
    }

    /// The hat column C{i = 0}: representatives at U-power 0, arrows with
    /// k = 0.
    fn col_complex(&self) -> Flat {
        let mut f = Flat::new(self.gens.len());
        for &(x, y, k) in &self.arrows {
            if k == 0 {
                f.add(x, y);
            }
        }
        f
    }

    /// The row C{j = 0}: representatives at U-power A(x); arrows with
    /// A(x) + k = A(y). Every row C{j = s} is this complex under the U^s
    /// identification.
    fn row_complex(&self) -> Flat {
        let mut f = Flat::new(self.gens.len());
        for &(x, y, k) in &self.arrows {
            if self.gens[x].alexander + k == self.gens[y].alexander {
                f.add(x, y);
            }
        }
        f
    }

    /// The hat homology generator: a cycle in the column spanning its
    /// one-dimensional homology.
    fn hat_cycle(&self) -> Bits {
        let reps = self.col_complex().homology_reps();
        debug_assert_eq!(reps.len(), 1);
        reps.into_iter().next().unwrap()
    }

    /// The chain functional F2-dual to the row homology generator: vanishes
    /// on row boundaries, evaluates to 1 on the row homology cycle. Together
    /// with the hat cycle it realizes the chain homotopy equivalence
    /// C{j=0} -> C{i=0} as (functional value) * (hat cycle).
    fn row_functional(&self) -> Bits {
        let row = self.row_complex();
        let z = {
            let reps = row.homology_reps();
            debug_assert_eq!(reps.len(), 1);
            reps.into_iter().next().unwrap()
        };
        let n = self.gens.len();
        let mut constraints: Vec<(Bits, bool)> =
            row.cols.iter().filter(|c| !bits_zero(c)).map(|c| (c.clone(), false)).collect();
        constraints.push((z, true));
        solve_functional(&constraints, n).expect("row functional exists for validated complexes")
    }
}

/// Default truncation window for a framing: past it v/h are
/// quasi-isomorphisms and the cone stabilizes.
pub fn default_window(c: &CfkComplex, n: i32) -> i32 {
    c.max_abs_alexander() + n.abs() + 2
}

// ---------------------------------------------------------------------------
// F2 vectors and elimination

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0u64; n.div_ceil(64)]
}

fn bit_get(v: &Bits, i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

fn bit_flip(v: &mut Bits, i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

fn bits_xor(dst: &mut Bits, src: &Bits) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= *b;
    }
}

fn bits_zero(v: &Bits) -> bool {
    v.iter().all(|&w| w == 0)
}

fn lowest_bit(v: &Bits) -> Option<usize> {
    for (i, &w) in v.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

/// Row span in echelon form: pivots strictly increasing, each pivot the
/// lowest set bit of its row.
#[derive(Default)]
struct Gauss {
    rows: Vec<(usize, Bits)>,
}

impl Gauss {
    fn reduce(&self, mut v: Bits) -> Bits {
        for (p, row) in &self.rows {
            if bit_get(&v, *p) {
                bits_xor(&mut v, row);
            }
        }
        v
    }

    /// Returns true when v was independent of the span (and absorbs it).
    fn insert(&mut self, v: Bits) -> bool {
        let r = self.reduce(v);
        match lowest_bit(&r) {
            None => false,
            Some(p) => {
                let at = self.rows.partition_point(|(q, _)| *q < p);
                self.rows.insert(at, (p, r));
                true
            }
        }
    }

    fn contains(&self, v: &Bits) -> bool {
        bits_zero(&self.reduce(v.clone()))
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Solve <phi, row_i> = rhs_i for a functional phi over n variables.
fn solve_functional(constraints: &[(Bits, bool)], n: usize) -> Option<Bits> {
    let mut rows: Vec<(usize, Bits, bool)> = Vec::new();
    for (v, rhs) in constraints {
        let mut v = v.clone();
        let mut rhs = *rhs;
        for (p, row, r) in &rows {
            if bit_get(&v, *p) {
                bits_xor(&mut v, row);
                rhs ^= r;
            }
        }
        match lowest_bit(&v) {
            None => {
                if rhs {
                    return None;
                }
            }
            Some(p) => {
                let at = rows.partition_point(|(q, _, _)| *q < p);
                rows.insert(at, (p, v, rhs));
            }
        }
    }
    let mut phi = bits_new(n);
    for (p, v, rhs) in rows.iter().rev() {
        let mut val = *rhs;
        for i in (p + 1)..n {
            if bit_get(v, i) && bit_get(&phi, i) {
                val = !val;
            }
        }
        if val {
            bit_flip(&mut phi, *p);
        }
    }
    Some(phi)
}

/// A chain complex flattened to a single F2 endomorphism: `cols[j]` is the
/// differential of basis vector j.
struct Flat {
    dim: usize,
    cols: Vec<Bits>,
}

impl Flat {
    fn new(dim: usize) -> Flat {
        Flat { dim, cols: vec![bits_new(dim); dim] }
    }

    fn add(&mut self, src: usize, tgt: usize) {
        bit_flip(&mut self.cols[src], tgt);
    }

    fn image(&self) -> Gauss {
        let mut g = Gauss::default();
        for c in &self.cols {
            if !bits_zero(c) {
                g.insert(c.clone());
            }
        }
        g
    }

    /// Kernel basis via column elimination with combination tracking.
    fn kernel(&self) -> Vec<Bits> {
        let mut rows: Vec<(usize, Bits, Bits)> = Vec::new();
        let mut out = Vec::new();
        for j in 0..self.dim {
            let mut img = self.cols[j].clone();
            let mut combo = bits_new(self.dim);
            bit_flip(&mut combo, j);
            for (p, irow, crow) in &rows {
                if bit_get(&img, *p) {
                    bits_xor(&mut img, irow);
                    bits_xor(&mut combo, crow);
                }
            }
            match lowest_bit(&img) {
                None => out.push(combo),
                Some(p) => {
                    let at = rows.partition_point(|(q, _, _)| *q < p);
                    rows.insert(at, (p, img, combo));
                }
            }
        }
        out
    }

    /// Cycles extending a basis of the boundaries: a homology basis.
    fn homology_reps(&self) -> Vec<Bits> {
        let mut span = self.image();
        self.kernel().into_iter().filter(|z| span.insert(z.clone())).collect()
    }
}

// ---------------------------------------------------------------------------
// Public operations

/// The subquotient A_s as a Maslov-graded complex over F2. The representative
/// of generator x sits in Maslov grading M(x) - 2·max(0, A(x) - s).
#[allow(non_snake_case)]
pub fn build_As(c: &CfkComplex, s: i32) -> GradedChainComplex<F2> {
    let mut level_index: Vec<usize> = Vec::with_capacity(c.gens.len());
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for (i, g) in c.gens.iter().enumerate() {
        let lvl = g.maslov - 2 * c.level(i, s);
        let slot = dims.entry(lvl).or_insert(0);
        level_index.push(*slot);
        *slot += 1;
    }
    let mut out: GradedChainComplex<F2> = GradedChainComplex::new(vec![-1]);
    for (&lvl, &d) in &dims {
        out.set_dim(vec![lvl], d);
    }
    let mut mats: BTreeMap<i32, SparseMatrix<F2>> = BTreeMap::new();
    for &(x, y, k) in &c.arrows {
        if c.level(x, s) + k != c.level(y, s) {
            continue;
        }
        let lvl = c.gens[x].maslov - 2 * c.level(x, s);
        let m = mats.entry(lvl).or_insert_with(|| {
            SparseMatrix::zero(dims.get(&(lvl - 1)).copied().unwrap_or(0), dims[&lvl])
        });
        m.set(level_index[y], level_index[x], F2(true));
    }
    for (lvl, m) in mats {
        out.set_diff(vec![lvl], m);
    }
    debug_assert!(out.verify_complex().is_ok());
    out
}

/// The maps induced on homology by v_s and h_s, tabulated on a homology
/// basis of A_s. Each basis class is reported as its representative cycle,
/// a list of (generator, U-power) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VhMaps {
    pub s: i32,
    pub homology_dim: usize,
    pub reps: Vec<Vec<(String, i32)>>,
    pub v_star: Vec<bool>,
    pub h_star: Vec<bool>,
}

impl VhMaps {
    pub fn v_nonzero(&self) -> bool {
        self.v_star.iter().any(|&b| b)
    }

    pub fn h_nonzero(&self) -> bool {
        self.h_star.iter().any(|&b| b)
    }
}

pub fn vh_maps(c: &CfkComplex, s: i32) -> VhMaps {
    let a = c.a_complex(s);
    let reps = a.homology_reps();
    let col_im = c.col_complex().image();
    let phi = c.row_functional();
    let mut v_star = Vec::with_capacity(reps.len());
    let mut h_star = Vec::with_capacity(reps.len());
    let mut named = Vec::with_capacity(reps.len());
    for z in &reps {
        // v_s kills representatives at positive U-power
        let mut vz = bits_new(c.gens.len());
        let mut h = false;
        let mut name = Vec::new();
        for i in 0..c.gens.len() {
            if !bit_get(z, i) {
                continue;
            }
            name.push((c.gens[i].name.clone(), c.level(i, s)));
            if c.level(i, s) == 0 {
                bit_flip(&mut vz, i);
            }
            // h_s keeps representatives lying on the row j = s
            if c.gens[i].alexander >= s && bit_get(&phi, i) {
                h = !h;
            }
        }
        v_star.push(!col_im.contains(&vz));
        h_star.push(h);
        named.push(name);
    }
    VhMaps { s, homology_dim: reps.len(), reps: named, v_star, h_star }
}

/// tau: the minimal s for which the Alexander-filtration subcomplex F_s of
/// the hat column carries a cycle generating the hat homology.
pub fn tau(c: &CfkComplex) -> i32 {
    let col = c.col_complex();
    let im = col.image();
    let amin = c.gens.iter().map(|g| g.alexander).min().expect("nonempty complex");
    let amax = c.gens.iter().map(|g| g.alexander).max().unwrap();
    for s in amin..=amax {
        let keep: Vec<usize> = (0..c.gens.len()).filter(|&i| c.gens[i].alexander <= s).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let mut sub = Flat::new(keep.len());
        for &(x, y, k) in &c.arrows {
            if k == 0 {
                if let (Some(&px), Some(&py)) = (pos.get(&x), pos.get(&y)) {
                    sub.add(px, py);
                }
            }
        }
        for z in sub.kernel() {
            let mut big = bits_new(c.gens.len());
            for (a, &b) in keep.iter().enumerate() {
                if bit_get(&z, a) {
                    bit_flip(&mut big, b);
                }
            }
            if !im.contains(&big) {
                return s;
            }
        }
    }
    unreachable!("hat homology is one-dimensional, so the sweep terminates")
}

/// epsilon from the pair of maps at s = tau: -1 when v_tau* vanishes, 0 when
/// v_tau* and h_tau* agree and are nonzero, 1 otherwise.
pub fn epsilon(c: &CfkComplex) -> i8 {
    let vh = vh_maps(c, tau(c));
    if !vh.v_nonzero() {
        -1
    } else if vh.v_star == vh.h_star {
        0
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurgeryReport {
    pub n: i32,
    pub window: i32,
    pub dim: usize,
    pub nontrivial_s: Vec<i32>,
    pub tau: i32,
    pub epsilon: i8,
    pub constraint_ok: bool,
}

impl SurgeryReport {
    pub fn to_text(&self) -> String {
        format!(
            "surgery framing n = {}\nwindow b = {}\nhat homology dimension = {}\n\
             nontrivial s = {:?}\ntau = {}\nepsilon = {}\nconstraint_ok = {}\n",
            self.n, self.window, self.dim, self.nontrivial_s, self.tau, self.epsilon,
            self.constraint_ok
        )
    }
}

impl fmt::Display for SurgeryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Homology of the truncated mapping cone X_n: summands A_s for |s| <= b and
/// B_t for -b+n <= t <= b (the B's outside that range cancel against far A's
/// along v resp. h). Returns the hat dimension of S³_n(K) together with the
/// set of s whose B_s copy includes nontrivially into the cone homology.
pub fn cone_homology(c: &CfkComplex, n: i32, b: i32) -> Result<SurgeryReport, CfkError> {
    if n == 0 {
        return Err(CfkError::ZeroFraming);
    }
    if b <= c.max_abs_alexander() + n.abs() {
        return Err(CfkError::Window(
            b,
            format!("need b > max|A| + |n| = {}", c.max_abs_alexander() + n.abs()),
        ));
    }
    let (dim, nontrivial_s) = cone_core(c, n, b);
    let recheck = cone_core(c, n, b + 1);
    if recheck != (dim, nontrivial_s.clone()) {
        return Err(CfkError::Window(b, "cone output unstable under b -> b+1".into()));
    }
    let tau = tau(c);
    let epsilon = epsilon(c);
    let slack = if epsilon == 1 { 1 } else { 0 };
    let constraint_ok = nontrivial_s.iter().all(|&s| s <= tau - slack);
    Ok(SurgeryReport { n, window: b, dim, nontrivial_s, tau, epsilon, constraint_ok })
}

fn cone_core(c: &CfkComplex, n: i32, b: i32) -> (usize, Vec<i32>) {
    let g = c.gens.len();
    let a_lo = -b;
    let b_lo = -b + n;
    let n_a = (2 * b + 1) as usize;
    let n_b = (b - b_lo + 1) as usize;
    let a_off = |s: i32| (s - a_lo) as usize * g;
    let b_off = |t: i32| n_a * g + (t - b_lo) as usize * g;
    let total = (n_a + n_b) * g;
    let col = c.col_complex();
    let z_col = c.hat_cycle();
    let phi = c.row_functional();
    let mut im = Gauss::default();
    for s in -b..=b {
        let a = c.a_complex(s);
        for x in 0..g {
            let mut v = bits_new(total);
            for y in 0..g {
                if bit_get(&a.cols[x], y) {
                    bit_flip(&mut v, a_off(s) + y);
                }
            }
            if c.level(x, s) == 0 && s >= b_lo {
                bit_flip(&mut v, b_off(s) + x);
            }
            if c.gens[x].alexander >= s && bit_get(&phi, x) && s + n <= b && s + n >= b_lo {
                for y in 0..g {
                    if bit_get(&z_col, y) {
                        bit_flip(&mut v, b_off(s + n) + y);
                    }
                }
            }
            if !bits_zero(&v) {
                im.insert(v);
            }
        }
    }
    for t in b_lo..=b {
        for x in 0..g {
            if bits_zero(&col.cols[x]) {
                continue;
            }
            let mut v = bits_new(total);
            for y in 0..g {
                if bit_get(&col.cols[x], y) {
                    bit_flip(&mut v, b_off(t) + y);
                }
            }
            im.insert(v);
        }
    }
    let dim = total - 2 * im.rank();
    let mut nontrivial = Vec::new();
    for t in b_lo..=b {
        let mut v = bits_new(total);
        for y in 0..g {
            if bit_get(&z_col, y) {
                bit_flip(&mut v, b_off(t) + y);
            }
        }
        if !im.contains(&v) {
            nontrivial.push(t);
        }
    }
    (dim, nontrivial)
}

/// Theorem-style check at the default window: every nontrivial s obeys
/// 2s <= 2·tau, sharpened to 2s <= 2·tau - 2 when epsilon = 1.
pub fn constraint_check(c: &CfkComplex, n: i32) -> Result<bool, CfkError> {
    cone_homology(c, n, default_window(c, n)).map(|r| r.constraint_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNKNOT: &str = "gen u M=0 A=0\n";

    const TREFOIL: &str = "\
gen a M=0 A=1
gen b M=-1 A=0
gen c M=-2 A=-1
d b -> a U^1
d b -> c
";

    const TREFOIL_MIRROR: &str = "\
gen a M=0 A=-1
gen b M=1 A=0
gen c M=2 A=1
d a -> b U^1
d c -> b
";

    const FIG8: &str = "\
gen f M=0 A=0
gen p M=0 A=0
gen q M=-1 A=-1
gen r M=1 A=1
gen s M=0 A=0
d p -> q
d p -> r U^1
d q -> s U^1
d r -> s
";

    fn corpus() -> Vec<CfkComplex> {
        [UNKNOT, TREFOIL, TREFOIL_MIRROR, FIG8].iter().map(|t| parse_cfk(t).unwrap()).collect()
    }

    #[test]
    fn parse_trefoil_staircase() {
        let c = parse_cfk(TREFOIL).unwrap();
        assert_eq!(c.generators().len(), 3);
        assert_eq!(c.arrows().len(), 2);
        assert_eq!(c.max_abs_alexander(), 1);
    }

    #[test]
    fn parse_unknot() {
        let c = parse_cfk(UNKNOT).unwrap();
        assert_eq!(c.generators().len(), 1);
    }

    #[test]
    fn parse_comments_and_default_power() {
        let c = parse_cfk(
            "# staircase\ngen a M=0 A=1\ngen b M=-1 A=0 # top\ngen c M=-2 A=-1\n\nd b -> a U^1\nd b -> c\n",
        )
        .unwrap();
        assert_eq!(c.arrows(), &[(1, 0, 1), (1, 2, 0)]);
    }

    #[test]
    fn parse_rejects_alexander_raise() {
        let err = parse_cfk("gen a M=0 A=0\ngen b M=-1 A=1\nd a -> b\n").unwrap_err();
        assert!(matches!(err, CfkError::Grading(..)), "{err}");
    }

    #[test]
    fn parse_rejects_maslov_step() {
        let err = parse_cfk("gen a M=0 A=1\ngen b M=-2 A=0\nd a -> b\n").unwrap_err();
        assert!(matches!(err, CfkError::Grading(..)), "{err}");
    }

    #[test]
    fn parse_rejects_d_square() {
        let text = "\
gen a M=-1 A=-1
gen b M=0 A=0
gen c M=-1 A=0
d a -> b U^1
d b -> c
";
        let err = parse_cfk(text).unwrap_err();
        assert!(matches!(err, CfkError::DSquare(..)), "{err}");
    }

    #[test]
    fn parse_rejects_hat_dimension() {
        let err = parse_cfk("gen a M=0 A=0\ngen b M=0 A=0\n").unwrap_err();
        match err {
            CfkError::HatDimension(_, d) => assert_eq!(d, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn parse_rejects_row_degeneracy() {
        // column homology is one-dimensional but the j=0 row is not a
        // valid knot row: x -> y drops both filtration levels at once
        let err = parse_cfk("gen f M=0 A=0\ngen x M=1 A=1\ngen y M=0 A=0\nd x -> y\n")
            .unwrap_err();
        assert!(matches!(err, CfkError::HatDimension("j = 0 row", 3)), "{err}");
    }

    #[test]
    fn parse_rejects_unknown_generator() {
        let err = parse_cfk("gen a M=0 A=0\nd a -> z\n").unwrap_err();
        assert!(matches!(err, CfkError::UnknownGenerator(..)));
    }

    #[test]
    fn parse_rejects_duplicate() {
        let err = parse_cfk("gen a M=0 A=0\ngen a M=0 A=0\n").unwrap_err();
        assert!(matches!(err, CfkError::DuplicateGenerator(..)));
    }

    #[test]
    fn parse_rejects_negative_power() {
        let err = parse_cfk("gen a M=0 A=1\ngen b M=-1 A=0\nd b -> a U^-1\n").unwrap_err();
        assert!(matches!(err, CfkError::Parse(..)));
    }

    #[test]
    fn build_as_unknot() {
        let c = parse_cfk(UNKNOT).unwrap();
        for s in -3..=3 {
            let a = build_As(&c, s);
            assert_eq!(a.total_dim(), 1);
            assert_eq!(a.homology_dims().values().sum::<usize>(), 1);
        }
    }

    #[test]
    fn build_as_trefoil_s1() {
        let c = parse_cfk(TREFOIL).unwrap();
        let a = build_As(&c, 1);
        // representatives a, b, c at U-power 0: Maslov 0, -1, -2
        assert_eq!(a.dim(&vec![0]), 1);
        assert_eq!(a.dim(&vec![-1]), 1);
        assert_eq!(a.dim(&vec![-2]), 1);
        // only d b = c survives
        let d = a.diff(&vec![-1]).unwrap();
        assert_eq!(d.get(0, 0), F2(true));
        assert!(a.diff(&vec![0]).is_none());
        let h = a.homology_dims();
        assert_eq!(h.get(&vec![0]), Some(&1));
        assert_eq!(h.values().sum::<usize>(), 1);
    }

    #[test]
    fn build_as_trefoil_s0() {
        let c = parse_cfk(TREFOIL).unwrap();
        let a = build_As(&c, 0);
        // a is pushed to U-power 1: Maslov -2 alongside c; d b = a + c
        assert_eq!(a.dim(&vec![-2]), 2);
        assert_eq!(a.dim(&vec![-1]), 1);
        let d = a.diff(&vec![-1]).unwrap();
        assert_eq!((d.get(0, 0), d.get(1, 0)), (F2(true), F2(true)));
        assert_eq!(a.homology_dims().values().sum::<usize>(), 1);
    }

    #[test]
    fn as_homology_symmetric_in_s() {
        for c in corpus() {
            for s in 0..=4 {
                let plus: usize = build_As(&c, s).homology_dims().values().sum();
                let minus: usize = build_As(&c, -s).homology_dims().values().sum();
                assert_eq!(plus, minus, "s={s}");
            }
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&parse_cfk(UNKNOT).unwrap()), 0);
        assert_eq!(tau(&parse_cfk(TREFOIL).unwrap()), 1);
        assert_eq!(tau(&parse_cfk(TREFOIL_MIRROR).unwrap()), -1);
        assert_eq!(tau(&parse_cfk(FIG8).unwrap()), 0);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&parse_cfk(UNKNOT).unwrap()), 0);
        assert_eq!(epsilon(&parse_cfk(TREFOIL).unwrap()), 1);
        assert_eq!(epsilon(&parse_cfk(TREFOIL_MIRROR).unwrap()), -1);
        assert_eq!(epsilon(&parse_cfk(FIG8).unwrap()), 0);
    }

    #[test]
    fn vh_trefoil_at_tau() {
        let c = parse_cfk(TREFOIL).unwrap();
        let vh = vh_maps(&c, 1);
        assert_eq!(vh.homology_dim, 1);
        assert_eq!(vh.reps, vec![vec![("a".to_string(), 0)]]);
        assert_eq!(vh.v_star, vec![true]);
        // a dies in the row C{j=1}: it bounds U^{-1} b there
        assert_eq!(vh.h_star, vec![false]);
    }

    #[test]
    fn vh_unknot_s0() {
        let vh = vh_maps(&parse_cfk(UNKNOT).unwrap(), 0);
        assert_eq!((vh.v_star.clone(), vh.h_star.clone()), (vec![true], vec![true]));
    }

    #[test]
    fn vh_asymptotics_and_symmetry() {
        for c in corpus() {
            let amax = c.max_abs_alexander();
            for s in -5..=5 {
                let vh = vh_maps(&c, s);
                if s > amax {
                    assert!(vh.v_nonzero(), "v_* at s={s}");
                }
                if s < -amax {
                    assert!(vh.h_nonzero(), "h_* at s={s}");
                }
                let dual = vh_maps(&c, -s);
                assert_eq!(vh.v_nonzero(), dual.h_nonzero(), "s={s}");
            }
        }
    }

    #[test]
    fn cone_unknot() {
        let c = parse_cfk(UNKNOT).unwrap();
        let r = cone_homology(&c, 1, 3).unwrap();
        assert_eq!(r.dim, 1);
        assert!(r.nontrivial_s.is_empty());
        assert!(r.constraint_ok);
        let r = cone_homology(&c, -1, 3).unwrap();
        assert_eq!(r.dim, 1);
        assert_eq!(r.nontrivial_s, vec![-1, 0]);
        assert!(r.constraint_ok);
    }

    #[test]
    fn cone_trefoil_poincare_surgery() {
        let c = parse_cfk(TREFOIL).unwrap();
        let r = cone_homology(&c, 1, 4).unwrap();
        assert_eq!(r.dim, 1);
        assert!(r.nontrivial_s.iter().all(|&s| s <= 0), "{:?}", r.nontrivial_s);
        assert!(r.constraint_ok);
    }

    #[test]
    fn cone_trefoil_large_framings() {
        let c = parse_cfk(TREFOIL).unwrap();
        for n in 2..=4 {
            let r = cone_homology(&c, n, default_window(&c, n)).unwrap();
            assert_eq!(r.dim, n as usize, "n={n}");
            assert!(r.constraint_ok);
        }
    }

    #[test]
    fn cone_rejects_zero_framing() {
        let c = parse_cfk(TREFOIL).unwrap();
        assert!(matches!(cone_homology(&c, 0, 5), Err(CfkError::ZeroFraming)));
    }

    #[test]
    fn cone_rejects_small_window() {
        let c = parse_cfk(TREFOIL).unwrap();
        assert!(matches!(cone_homology(&c, 2, 3), Err(CfkError::Window(..))));
    }

    #[test]
    fn truncation_stability() {
        for c in corpus() {
            for n in [-4, -3, -2, -1, 1, 2, 3, 4] {
                let b = default_window(&c, n);
                let r1 = cone_homology(&c, n, b).unwrap();
                let r2 = cone_homology(&c, n, b + 2).unwrap();
                assert_eq!((r1.dim, r1.nontrivial_s), (r2.dim, r2.nontrivial_s), "n={n}");
            }
        }
    }

    #[test]
    fn key_lemma_high_s_trivial() {
        for c in corpus() {
            let t = tau(&c);
            for n in [-4, -2, -1, 1, 2, 4] {
                let r = cone_homology(&c, n, default_window(&c, n)).unwrap();
                assert!(
                    r.nontrivial_s.iter().all(|&s| s < t + 1),
                    "n={n} nontrivial={:?} tau={t}",
                    r.nontrivial_s
                );
            }
        }
    }

    #[test]
    fn constraint_grid() {
        for c in corpus() {
            for n in [-4, -3, -2, -1, 1, 2, 3, 4] {
                assert!(constraint_check(&c, n).unwrap(), "n={n}");
            }
        }
    }

    #[test]
    fn figure_eight_attains_the_bound() {
        // epsilon = 0, so 2s = 2 tau must be attained at some framing
        let c = parse_cfk(FIG8).unwrap();
        let t = tau(&c);
        let attained = [-2, -1, 1, 2].iter().any(|&n| {
            cone_homology(&c, n, default_window(&c, n)).unwrap().nontrivial_s.contains(&t)
        });
        assert!(attained);
    }

    #[test]
    fn report_serializes() {
        let c = parse_cfk(TREFOIL).unwrap();
        let r = cone_homology(&c, 1, 4).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["dim"], 1);
        assert_eq!(v["tau"], 1);
        assert_eq!(v["epsilon"], 1);
        assert_eq!(v["constraint_ok"], true);
        assert!(r.to_text().contains("tau = 1"));
    }
}
