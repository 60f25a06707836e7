//! Build diagrams from bottom-to-top Morse sequences of cups, caps and
//! crossings on adjacent strands. Planarity is guaranteed by construction;
//! the result is emitted as a validated `PlanarDiagram`.

use std::collections::BTreeMap;

use super::pd::{DiagramError, PlanarDiagram};

/// Which strand passes over: the one entering from the left or the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cross {
    /// left strand over: a positive (right-handed) half twist on parallel
    /// upward strands
    LeftOver,
    /// right strand over
    RightOver,
}

// crossing ports, counterclockwise: 0 = top-right, 1 = top-left,
// 2 = bottom-left, 3 = bottom-right; the strand through pass is p -> p+2
const TR: usize = 0;
const TL: usize = 1;
const BL: usize = 2;
const BR: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum End {
    /// crossing port
    Port(usize, usize),
    /// one side of a 2-valent joint (cup or cap), id * 2 + side
    Joint(usize),
}

#[derive(Debug, Default)]
pub struct MorseBuilder {
    kinds: Vec<Cross>,
    links: BTreeMap<End, End>,
    active: Vec<End>,
    joints: usize,
}

impl MorseBuilder {
    pub fn new() -> MorseBuilder {
        MorseBuilder::default()
    }

    pub fn width(&self) -> usize {
        self.active.len()
    }

    pub fn crossing_count(&self) -> usize {
        self.kinds.len()
    }

    fn link(&mut self, a: End, b: End) {
        let old = self.links.insert(a, b);
        debug_assert!(old.is_none(), "endpoint wired twice");
        let old = self.links.insert(b, a);
        debug_assert!(old.is_none(), "endpoint wired twice");
    }

    fn new_joint(&mut self) -> (End, End) {
        let id = self.joints;
        self.joints += 1;
        (End::Joint(2 * id), End::Joint(2 * id + 1))
    }

    /// Local minimum: insert two new adjacent strands at position `i`.
    ///
    /// A joint's two sides are connected through the joint implicitly (like a
    /// crossing's through-pass); `links` holds only external wiring.
    pub fn cup(&mut self, i: usize) {
        assert!(i <= self.active.len(), "cup position out of range");
        let (a, b) = self.new_joint();
        self.active.insert(i, a);
        self.active.insert(i + 1, b);
    }

    /// Local maximum: join the strands at positions `i` and `i+1`.
    pub fn cap(&mut self, i: usize) {
        assert!(i + 1 < self.active.len(), "cap position out of range");
        let (a, b) = self.new_joint();
        let right = self.active.remove(i + 1);
        let left = self.active.remove(i);
        self.link(left, a);
        self.link(right, b);
    }

    /// Cross the strands at positions `i` and `i+1`.
    pub fn cross(&mut self, i: usize, kind: Cross) {
        assert!(i + 1 < self.active.len(), "crossing position out of range");
        let c = self.kinds.len();
        self.kinds.push(kind);
        let left = self.active[i];
        let right = self.active[i + 1];
        self.link(left, End::Port(c, BL));
        self.link(right, End::Port(c, BR));
        self.active[i] = End::Port(c, TL);
        self.active[i + 1] = End::Port(c, TR);
    }

    /// `k` right-handed half twists on positions `i`, `i+1` when `k > 0`,
    /// left-handed when `k < 0`.
    pub fn twist(&mut self, i: usize, k: i32) {
        let kind = if k > 0 { Cross::LeftOver } else { Cross::RightOver };
        for _ in 0..k.abs() {
            self.cross(i, kind);
        }
    }

    /// Close the construction into a diagram. Each seed `(crossing, port)`
    /// starts a component: its first edge leaves through that port. Components
    /// without a seed start at their smallest crossing port. Extra free loops
    /// may be appended via `extra_loops`.
    pub fn finish(
        self,
        seeds: &[(usize, usize)],
        extra_loops: usize,
    ) -> Result<PlanarDiagram, DiagramError> {
        assert!(self.active.is_empty(), "open strands remain: {:?}", self.active);

        // contract joints: adjacency between crossing ports, counting pure
        // joint cycles as free loops
        let mut cadj: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        let mut joint_seen = vec![false; 2 * self.joints];
        let mut free_loops = extra_loops;
        for c in 0..self.kinds.len() {
            for p in 0..4 {
                if cadj.contains_key(&(c, p)) {
                    continue;
                }
                let mut cur = *self.links.get(&End::Port(c, p)).expect("port wired");
                loop {
                    match cur {
                        End::Port(c2, p2) => {
                            cadj.insert((c, p), (c2, p2));
                            cadj.insert((c2, p2), (c, p));
                            break;
                        }
                        End::Joint(j) => {
                            joint_seen[j] = true;
                            // cross to the joint's other side, then follow its
                            // wiring onward
                            let other = j ^ 1;
                            joint_seen[other] = true;
                            cur = *self
                                .links
                                .get(&End::Joint(other))
                                .expect("joint wired");
                            // guard: the immediate back-link to where we came
                            // from cannot occur because links are a perfect
                            // matching on distinct endpoints
                        }
                    }
                }
            }
        }
        // joint cycles never touching a crossing
        for j in 0..2 * self.joints {
            if joint_seen[j] {
                continue;
            }
            // walk the cycle
            let mut cur = j;
            while !joint_seen[cur] {
                joint_seen[cur] = true;
                joint_seen[cur ^ 1] = true;
                let next = match self.links.get(&End::Joint(cur ^ 1)) {
                    Some(End::Joint(n)) => *n,
                    _ => unreachable!("pure joint cycle"),
                };
                cur = next;
            }
            free_loops += 1;
        }

        if self.kinds.is_empty() {
            return PlanarDiagram::new(Vec::new(), free_loops);
        }

        // walk components, numbering edges; port -> (edge, incoming?)
        let mut port_edge: BTreeMap<(usize, usize), (usize, bool)> = BTreeMap::new();
        let mut next_edge = 1usize;
        let mut seed_queue: Vec<(usize, usize)> = seeds.to_vec();
        seed_queue.reverse();
        loop {
            let start = if let Some(s) = seed_queue.pop() {
                if port_edge.contains_key(&s) {
                    panic!("seed {:?} lies on an already-walked component", s);
                }
                s
            } else {
                match (0..self.kinds.len())
                    .flat_map(|c| (0..4).map(move |p| (c, p)))
                    .find(|cp| !port_edge.contains_key(cp))
                {
                    Some(cp) => cp,
                    None => break,
                }
            };
            // leave through `start`
            let mut out = start;
            loop {
                let label = next_edge;
                next_edge += 1;
                let prev = port_edge.insert(out, (label, false));
                debug_assert!(prev.is_none());
                let inp = cadj[&out];
                let prev = port_edge.insert(inp, (label, true));
                debug_assert!(prev.is_none());
                out = (inp.0, (inp.1 + 2) % 4);
                if out == start {
                    break;
                }
            }
        }

        // PD tuples: counterclockwise from the incoming under-strand port
        let mut tuples = Vec::with_capacity(self.kinds.len());
        for (c, kind) in self.kinds.iter().enumerate() {
            let under = match kind {
                // left-over: the over strand runs BL -> TR, so the under
                // diagonal is TL -> BR or BR -> TL
                Cross::LeftOver => [TL, BR],
                Cross::RightOver => [TR, BL],
            };
            let a = under
                .iter()
                .copied()
                .find(|&p| port_edge[&(c, p)].1)
                .expect("one under port is incoming");
            let mut t = [0usize; 4];
            for k in 0..4 {
                t[k] = port_edge[&(c, (a + k) % 4)].0;
            }
            tuples.push(t);
        }
        PlanarDiagram::new(tuples, free_loops)
    }
}

/// Round closure of a braid word on `strands` strands; letter `j` is the
/// positive Artin generator on strands (j-1, j), `-j` its inverse. All braid
/// strands are oriented upward.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<PlanarDiagram, DiagramError> {
    assert!(strands >= 1);
    let mut b = MorseBuilder::new();
    for i in 0..strands {
        b.cup(i);
    }
    for &letter in word {
        assert!(letter != 0 && (letter.unsigned_abs() as usize) < strands);
        let i = letter.unsigned_abs() as usize - 1;
        b.cross(i, if letter > 0 { Cross::LeftOver } else { Cross::RightOver });
    }
    for i in (0..strands).rev() {
        b.cap(i);
    }
    // orient every component upward: seed each at its smallest top port
    let seeds = upward_seeds(word, strands, b.crossing_count());
    b.finish(&seeds, 0)
}

// Components of a braid closure in terms of the permutation; returns one
// (crossing, top port) seed per component that meets a crossing.
fn upward_seeds(word: &[i32], strands: usize, crossings: usize) -> Vec<(usize, usize)> {
    if crossings == 0 {
        return Vec::new();
    }
    // follow each braid strand upward, recording which crossing tops it
    // passes; strand component = cycle of the permutation
    let mut perm: Vec<usize> = (0..strands).collect(); // position -> entering strand
    // for each strand (by entering position), the crossings it tops
    let mut tops: Vec<Vec<(usize, usize)>> = vec![Vec::new(); strands];
    for (c, &letter) in word.iter().enumerate() {
        let i = letter.unsigned_abs() as usize - 1;
        let (l, r) = (perm[i], perm[i + 1]);
        // after the crossing the left entrant exits at i+1 (port TR), the
        // right at i (port TL)
        tops[l].push((c, TR));
        tops[r].push((c, TL));
        perm.swap(i, i + 1);
    }
    // cycles of strand positions: position p's strand returns at perm
    let mut seen = vec![false; strands];
    let mut seeds = Vec::new();
    for s in 0..strands {
        if seen[s] {
            continue;
        }
        let mut cyc_ports: Vec<(usize, usize)> = Vec::new();
        let mut cur = s;
        loop {
            seen[cur] = true;
            cyc_ports.extend(tops[cur].iter().copied());
            // strand entering at cur exits where the permutation sends it
            let exit = perm.iter().position(|&x| x == cur).expect("permutation");
            // closure returns exit position to entry position `exit`
            cur = exit;
            if cur == s {
                break;
            }
        }
        if let Some(&best) = cyc_ports.iter().min() {
            seeds.push(best);
        }
    }
    seeds.sort();
    seeds
}

/// Pretzel link P(a, b, c): three side-by-side vertical twist regions joined
/// top and bottom; positive parameters are right-handed half twists.
pub fn pretzel(a: i32, b: i32, c: i32) -> Result<PlanarDiagram, DiagramError> {
    let mut m = MorseBuilder::new();
    m.cup(0);
    m.cup(1);
    m.cup(3);
    m.twist(0, a);
    m.twist(2, b);
    m.twist(4, c);
    m.cap(1);
    m.cap(1);
    m.cap(0);
    m.finish(&[], 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_links() {
        let pos = braid_closure(2, &[1, 1]).unwrap();
        assert_eq!(pos.crossing_count(), 2);
        assert_eq!(pos.components(), 2);
        assert_eq!(pos.writhe(), 2);
        let neg = braid_closure(2, &[-1, -1]).unwrap();
        assert_eq!(neg.writhe(), -2);
    }

    #[test]
    fn trefoils() {
        let rh = braid_closure(2, &[1, 1, 1]).unwrap();
        assert_eq!(rh.components(), 1);
        assert_eq!(rh.writhe(), 3);
        let lh = braid_closure(2, &[-1, -1, -1]).unwrap();
        assert_eq!(lh.writhe(), -3);
    }

    #[test]
    fn braid_unknot_and_split_strand() {
        let u = braid_closure(1, &[]).unwrap();
        assert_eq!(u.components(), 1);
        assert_eq!(u.crossing_count(), 0);
        // second strand untouched by the word becomes a free loop
        let d = braid_closure(2, &[]).unwrap();
        assert_eq!(d.components(), 2);
        assert_eq!(d.crossing_count(), 0);
    }

    #[test]
    fn figure_eight_braid() {
        let d = braid_closure(3, &[1, -2, 1, -2]).unwrap();
        assert_eq!(d.components(), 1);
        assert_eq!(d.crossing_count(), 4);
        assert_eq!(d.writhe(), 0);
        assert_eq!(d.positive_crossings(), 2);
    }

    #[test]
    fn pretzel_trefoil_and_parities() {
        let t = pretzel(1, 1, 1).unwrap();
        assert_eq!(t.components(), 1);
        assert_eq!(t.crossing_count(), 3);
        // all-odd pretzels are knots; P(2,2,2) has three components... no:
        // P(2,2,2) has 3? two even entries give a 3-component link only when
        // all are even
        let l = pretzel(2, 2, 2).unwrap();
        assert_eq!(l.components(), 3);
        let k = pretzel(-3, 3, -2).unwrap();
        assert_eq!(k.components(), 1);
        assert_eq!(k.crossing_count(), 8);
    }

    #[test]
    fn nested_clasp() {
        // two nested circles clasped through their right-hand walls: a Hopf
        // link; both crossings acquire the same sign
        let mut m = MorseBuilder::new();
        m.cup(0);
        m.cup(1);
        m.twist(2, 2);
        m.cap(1);
        m.cap(0);
        let d = m.finish(&[], 0).unwrap();
        assert_eq!(d.components(), 2);
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.signs()[0], d.signs()[1]);
    }

    #[test]
    fn immediate_cap_is_free_loop() {
        let mut m = MorseBuilder::new();
        m.cup(0);
        m.cap(0);
        let d = m.finish(&[], 0).unwrap();
        assert_eq!(d.components(), 1);
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.free_loops(), 1);
    }
}
