//! Round annulus templates.
//!
//! Two concentric rail circles W1 (outer) and W2 (inner), both traversed
//! counterclockwise, are joined by a two-edged band running from a foot on W1
//! to a foot on W2, forming a single knotted curve together with the rails.
//! The band advances counterclockwise in integer stations; along the way it
//! crosses the walls and twists on itself, and the two rails may twist around
//! each other at fixed stations of their own. The plane regions are 0 =
//! outside W1, 1 = annulus, 2 = hole.
//!
//! Templates assemble into PD tuples with creation-order crossing indices
//! (wall events allocate two crossings, left band edge first; boxes and rail
//! twists allocate one per half twist), which `canonicalize` preserves.

use std::collections::BTreeMap;

use super::pd::PlanarDiagram;

/// A dart is one of the four edge-ends at a crossing: (crossing, slot).
pub type Dart = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandEvent {
    /// The band crosses `wall` (1 or 2), passing over it iff `over`, after
    /// advancing one station.
    Wall { wall: u8, over: bool },
    /// `k` half twists between the two band edges (sign = chirality).
    Box { k: i32 },
}

/// `k` half twists between the rails at the angular position `station`;
/// `k` must be even so the rails come out unswapped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RailTwist {
    pub station: i64,
    pub k: i32,
}

#[derive(Clone, Debug, Default)]
pub struct RoundTemplate {
    /// band leaves its W1 foot outward instead of into the annulus
    pub leave_out: bool,
    /// band reaches its W2 foot from the hole side
    pub arrive_hole: bool,
    /// angular resolution; wall events sit at stations 2, 4, 6, ...
    pub stations: i64,
    pub events: Vec<BandEvent>,
    pub rail_twists: Vec<RailTwist>,
}

impl RoundTemplate {
    pub fn new(events: Vec<BandEvent>) -> RoundTemplate {
        let walls = events
            .iter()
            .filter(|e| matches!(e, BandEvent::Wall { .. }))
            .count() as i64;
        RoundTemplate {
            leave_out: false,
            arrive_hole: false,
            stations: 2 * walls,
            events,
            rail_twists: Vec::new(),
        }
    }
}

/// Assemble the template into a planar diagram. `None` when the walk is
/// inconsistent (wrong region at arrival, odd rail twist, nonplanar result).
pub fn round_diagram(r: &RoundTemplate) -> Option<PlanarDiagram> {
    let s_mod = r.stations.max(1);
    let mut region: u8 = if r.leave_out { 0 } else { 1 };
    let mut tick: i64 = 0;
    let mut left_is_u = true; // which band edge currently runs on the left
    type Port = (usize, usize, usize); // crossing, prev-slot, next-slot
    let mut u_seq: Vec<Port> = Vec::new();
    let mut v_seq: Vec<Port> = Vec::new();
    let mut w1p: Vec<((i64, i64, i64), Port)> = Vec::new();
    let mut w2p: Vec<((i64, i64, i64), Port)> = Vec::new();
    let mut ncross = 0usize;
    let mut sub = 0i64;
    for ev in &r.events {
        match *ev {
            BandEvent::Wall { wall, over } => {
                tick += 2;
                let inward = match (wall, region) {
                    (1, 0) | (2, 1) => true,
                    (1, 1) | (2, 2) => false,
                    _ => return None,
                };
                region = match (wall, inward) {
                    (1, true) | (2, false) => 1,
                    (1, false) => 0,
                    (2, true) => 2,
                    _ => unreachable!(),
                };
                // ccw slot tables: (band_prev, band_next, rail_prev, rail_next)
                let (bp, bn, rp, rn) = match (inward, over) {
                    (true, false) => (0, 2, 3, 1),
                    (false, false) => (0, 2, 1, 3),
                    (true, true) => (1, 3, 0, 2),
                    (false, true) => (3, 1, 0, 2),
                };
                let c_left = ncross;
                let c_right = ncross + 1;
                ncross += 2;
                // along the rail: inward crossings meet the left band edge first
                let (first, second) = if inward { (c_left, c_right) } else { (c_right, c_left) };
                let rail = if wall == 1 { &mut w1p } else { &mut w2p };
                rail.push(((tick.rem_euclid(s_mod), tick, sub), (first, rp, rn)));
                rail.push(((tick.rem_euclid(s_mod), tick, sub + 1), (second, rp, rn)));
                sub += 2;
                let (ls, rs) = if left_is_u {
                    (&mut u_seq, &mut v_seq)
                } else {
                    (&mut v_seq, &mut u_seq)
                };
                ls.push((c_left, bp, bn));
                rs.push((c_right, bp, bn));
            }
            BandEvent::Box { k } => {
                for _ in 0..k.unsigned_abs() {
                    let c = ncross;
                    ncross += 1;
                    // positive: right edge dives under; ccw [R_in, L_out, R_out, L_in]
                    let (lport, rport) = if k > 0 {
                        ((c, 3, 1), (c, 0, 2))
                    } else {
                        ((c, 0, 2), (c, 1, 3))
                    };
                    let (ls, rs) = if left_is_u {
                        (&mut u_seq, &mut v_seq)
                    } else {
                        (&mut v_seq, &mut u_seq)
                    };
                    ls.push(lport);
                    rs.push(rport);
                    left_is_u = !left_is_u;
                }
            }
        }
    }
    if region != if r.arrive_hole { 2 } else { 1 } {
        return None;
    }
    tick += 2;
    // rail twist regions: both rails run eastbound; W1 starts as the bottom
    // strand, and the rails exchange tracks after every half twist
    for rt in &r.rail_twists {
        if rt.k % 2 != 0 {
            return None;
        }
        let mut w1_bottom = true;
        for i in 0..rt.k.unsigned_abs() as i64 {
            let c = ncross;
            ncross += 1;
            // eastbound parallel strands: bottom-under is (0,2)/(3,1),
            // top-under is (1,3)/(0,2)
            let (bottom, top) = if rt.k > 0 {
                ((c, 0, 2), (c, 3, 1))
            } else {
                ((c, 1, 3), (c, 0, 2))
            };
            let (p1, p2) = if w1_bottom { (bottom, top) } else { (top, bottom) };
            let key = (rt.station.rem_euclid(s_mod), rt.station, sub + i);
            w1p.push((key, p1));
            w2p.push((key, p2));
            w1_bottom = !w1_bottom;
        }
        sub += rt.k.unsigned_abs() as i64;
    }
    if ncross == 0 {
        return PlanarDiagram::new(Vec::new(), 1).ok();
    }
    w1p.sort_by_key(|&(k, _)| k);
    w2p.sort_by_key(|&(k, _)| k);
    // W2 is cut at the second foot; list its ports ccw from just past the cut
    let cutk = (tick.rem_euclid(s_mod), tick, sub);
    let split = w2p.iter().position(|&(k, _)| k > cutk).unwrap_or(w2p.len());
    let w2seq: Vec<Port> = w2p[split..].iter().chain(&w2p[..split]).map(|&(_, p)| p).collect();
    let w1seq: Vec<Port> = w1p.iter().map(|&(_, p)| p).collect();
    // foot wiring: which band edge continues the ccw-arriving rail end
    let f1_arr_u = !r.leave_out;
    let arr2_is_u = if r.arrive_hole { !left_is_u } else { left_is_u };
    // stitch the single closed curve: W1, first band edge, W2, second edge
    let mut steps: Vec<(usize, usize, usize)> = Vec::new();
    steps.extend(w1seq.iter().copied());
    let x1_is_u = f1_arr_u;
    let x1 = if x1_is_u { &u_seq } else { &v_seq };
    steps.extend(x1.iter().copied());
    if arr2_is_u == x1_is_u {
        steps.extend(w2seq.iter().rev().map(|&(c, p, n)| (c, n, p)));
    } else {
        steps.extend(w2seq.iter().copied());
    }
    let x2 = if x1_is_u { &v_seq } else { &u_seq };
    steps.extend(x2.iter().rev().map(|&(c, p, n)| (c, n, p)));
    // edges join the exit of each passage to the entry of the next
    let mut tuples = vec![[usize::MAX; 4]; ncross];
    let m = steps.len();
    for i in 0..m {
        let (c, _, ex) = steps[i];
        tuples[c][ex] = i + 1;
        let (c2, en, _) = steps[(i + 1) % m];
        tuples[c2][en] = i + 1;
    }
    if tuples.iter().any(|t| t.contains(&usize::MAX)) {
        return None;
    }
    if !euler_ok(&tuples) {
        return None;
    }
    canonicalize(&tuples)
}

fn occ_table(tuples: &[[usize; 4]]) -> Option<BTreeMap<usize, Vec<Dart>>> {
    let mut occ: BTreeMap<usize, Vec<Dart>> = BTreeMap::new();
    for (c, t) in tuples.iter().enumerate() {
        for (s, &e) in t.iter().enumerate() {
            occ.entry(e).or_default().push((c, s));
        }
    }
    if occ.values().any(|v| v.len() != 2) {
        return None;
    }
    Some(occ)
}

/// Faces of the rotation system (tuples list ports counterclockwise):
/// orbits of dart -> rotate(mate(dart)).
pub fn trace_faces(tuples: &[[usize; 4]]) -> Option<Vec<Vec<Dart>>> {
    let occ = occ_table(tuples)?;
    let mate = |(c, s): Dart| -> Dart {
        let e = tuples[c][s];
        let v = &occ[&e];
        if v[0] == (c, s) {
            v[1]
        } else {
            v[0]
        }
    };
    let mut seen: BTreeMap<Dart, bool> = BTreeMap::new();
    let mut faces = Vec::new();
    for c in 0..tuples.len() {
        for s in 0..4 {
            if seen.contains_key(&(c, s)) {
                continue;
            }
            let mut face = Vec::new();
            let mut d = (c, s);
            loop {
                seen.insert(d, true);
                face.push(d);
                let (mc, ms) = mate(d);
                d = (mc, (ms + 1) % 4);
                if d == (c, s) {
                    break;
                }
            }
            faces.push(face);
        }
    }
    Some(faces)
}

fn euler_ok(tuples: &[[usize; 4]]) -> bool {
    match trace_faces(tuples) {
        Some(f) => f.len() == tuples.len() + 2,
        None => false,
    }
}

/// Orient, rotate and renumber arbitrary-labelled tuples into a valid PD,
/// keeping crossing indices.
pub fn canonicalize(tuples: &[[usize; 4]]) -> Option<PlanarDiagram> {
    let occ = occ_table(tuples)?;
    // walk strands; record the head occurrence of each label
    let mut head: BTreeMap<usize, Dart> = BTreeMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new(); // labels in walk order per component
    for (&start, v) in occ.iter() {
        if head.contains_key(&start) {
            continue;
        }
        let mut comp = Vec::new();
        let (mut cur, mut h) = (start, v[1]);
        loop {
            comp.push(cur);
            head.insert(cur, h);
            let (hc, hs) = h;
            let out = (hc, (hs + 2) % 4);
            let next = tuples[hc][hs.wrapping_add(2) % 4];
            let nv = &occ[&next];
            let nh = if nv[0] == out { nv[1] } else { nv[0] };
            cur = next;
            h = nh;
            if cur == start {
                break;
            }
        }
        order.push(comp);
    }
    // fresh labels along the walk
    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 1usize;
    for comp in &order {
        for &l in comp {
            if relabel.insert(l, next).is_some() {
                return None;
            }
            next += 1;
        }
    }
    // rotate each tuple so the incoming under-strand leads
    let mut out = Vec::with_capacity(tuples.len());
    for (c, t) in tuples.iter().enumerate() {
        let rot = if head[&t[0]] == (c, 0) {
            0
        } else if head[&t[2]] == (c, 2) {
            2
        } else {
            return None;
        };
        let mut nt = [0usize; 4];
        for k in 0..4 {
            nt[k] = relabel[&t[(rot + k) % 4]];
        }
        out.push(nt);
    }
    PlanarDiagram::new(out, 0).ok()
}

/// Pinch two darts of a common face together into a new crossing whose
/// identity-resolution label is `ident` (resolving the new crossing with
/// `ident` gives back `d`). Returns the planar variants, each with the new
/// crossing's index (always last).
pub fn pinch(d: &PlanarDiagram, d1: Dart, d2: Dart, ident: u8) -> Vec<(PlanarDiagram, usize)> {
    let base = d.crossings().to_vec();
    let Some(occ) = occ_table(&base) else {
        return Vec::new();
    };
    let e1 = base[d1.0][d1.1];
    let e2 = base[d2.0][d2.1];
    if e1 == e2 {
        return Vec::new();
    }
    let mate = |(c, s): Dart| -> Dart {
        let v = &occ[&base[c][s]];
        if v[0] == (c, s) {
            v[1]
        } else {
            v[0]
        }
    };
    let m1 = mate(d1);
    let m2 = mate(d2);
    let en = d.edge_count();
    let (lw, lx, ly, lz) = (en + 1, en + 2, en + 3, en + 4);
    let mut tuples = base;
    tuples[d1.0][d1.1] = lw; // e1 walk-in half
    tuples[m1.0][m1.1] = lx; // e1 walk-out half
    tuples[d2.0][d2.1] = ly; // e2 walk-in half
    tuples[m2.0][m2.1] = lz; // e2 walk-out half
    let mut out = Vec::new();
    for flip in [false, true] {
        // counterclockwise cyclic order around the new crossing
        let cyc = if flip {
            [lw, lz, ly, lx]
        } else {
            [lw, lx, ly, lz]
        };
        // identity smoothing joins {lw,lx} and {ly,lz}; pick the tuple start
        // (an under-strand end) realizing the requested identity label
        for start in 0..4 {
            let t = [cyc[start], cyc[(start + 1) % 4], cyc[(start + 2) % 4], cyc[(start + 3) % 4]];
            let pos = |l: usize| t.iter().position(|&x| x == l).unwrap();
            let arcs = PlanarDiagram::smoothing_arcs(ident);
            let joins = |a: usize, b: usize| {
                arcs.iter().any(|arc| (arc[0] == a && arc[1] == b) || (arc[0] == b && arc[1] == a))
            };
            if !(joins(pos(lw), pos(lx)) && joins(pos(ly), pos(lz))) {
                continue;
            }
            let mut cand = tuples.clone();
            cand.push(t);
            if !euler_ok(&cand) {
                continue;
            }
            if let Some(pd) = canonicalize(&cand) {
                out.push((pd, cand.len() - 1));
                break; // the two identity-compatible starts give the same crossing
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walls(spec: &[(u8, bool)]) -> Vec<BandEvent> {
        spec.iter().map(|&(wall, over)| BandEvent::Wall { wall, over }).collect()
    }

    #[test]
    fn empty_template_is_unknot() {
        let d = round_diagram(&RoundTemplate::new(vec![])).unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.components(), 1);
    }

    #[test]
    fn twisted_band_unknots() {
        for k in [-3, -1, 1, 2, 3] {
            let d = round_diagram(&RoundTemplate::new(vec![BandEvent::Box { k }])).unwrap();
            assert_eq!(d.components(), 1, "k={k}");
            assert_eq!(d.crossing_count(), k.unsigned_abs() as usize);
        }
    }

    #[test]
    fn wrong_arrival_region_rejected() {
        let t = RoundTemplate {
            arrive_hole: true,
            ..RoundTemplate::new(walls(&[(2, false), (2, false)]))
        };
        assert!(round_diagram(&t).is_none());
    }

    #[test]
    fn odd_rail_twist_rejected() {
        let t = RoundTemplate {
            rail_twists: vec![RailTwist { station: 1, k: 3 }],
            ..RoundTemplate::new(vec![])
        };
        assert!(round_diagram(&t).is_none());
    }

    #[test]
    fn pure_rail_twist_is_torus_pattern() {
        // rails clasped through 4 half twists, flat band joining them:
        // a single curve with 4 crossings in a planar diagram
        for k in [-4, -2, 2, 4] {
            let t = RoundTemplate {
                rail_twists: vec![RailTwist { station: 1, k }],
                ..RoundTemplate::new(vec![])
            };
            let d = round_diagram(&t).unwrap();
            assert_eq!(d.crossing_count(), k.unsigned_abs() as usize);
            assert_eq!(d.components(), 1, "k={k}");
        }
    }

    #[test]
    fn faces_count_planar() {
        let t = RoundTemplate::new(walls(&[(2, true), (2, false), (1, false), (1, true)]));
        let d = round_diagram(&t).unwrap();
        let f = trace_faces(d.crossings()).unwrap();
        assert_eq!(f.len(), d.crossing_count() + 2);
    }

    #[test]
    fn band_route_matches_pretzel_tables() {
        // band out through the hole, around the inner circle and back,
        // with m-2 half twists on itself
        for m in 0..4i32 {
            let mut ev = walls(&[(2, true), (2, false), (1, true), (1, false)]);
            ev.push(BandEvent::Box { k: m - 2 });
            let d = round_diagram(&RoundTemplate::new(ev)).unwrap();
            let p = crate::diagram::pretzel(-3, 3, m - 2).unwrap();
            assert_eq!(
                crate::khovanov::khovanov_homology_scan(&d).unwrap(),
                crate::khovanov::khovanov_homology_scan(&p).unwrap(),
                "m={m}"
            );
        }
    }

    #[test]
    fn pinch_inverts_by_resolution() {
        let t = RoundTemplate::new(walls(&[(2, true), (2, false), (1, false), (1, true)]));
        let d = round_diagram(&t).unwrap();
        for ident in [0u8, 1] {
            let cands = pinch(&d, (0, 1), (1, 2), ident);
            for (pd, c) in cands {
                assert_eq!(pd.crossing_count(), d.crossing_count() + 1);
                let back = pd.resolve(c, ident).unwrap();
                assert_eq!(
                    crate::khovanov::khovanov_homology_scan(&back).unwrap(),
                    crate::khovanov::khovanov_homology_scan(&d).unwrap()
                );
            }
        }
    }
}
