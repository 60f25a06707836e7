//! Scratch harness for template reconstruction experiments.

use std::collections::BTreeMap;

use tbwb_core::diagram::{MorseBuilder, PlanarDiagram};
use tbwb_core::khovanov::{collapse, khovanov_homology_scan, BigradedDims};

fn kh(d: &PlanarDiagram) -> BigradedDims {
    khovanov_homology_scan(d).unwrap()
}

fn plat6(blocks: &[(usize, i32)]) -> Option<PlanarDiagram> {
    let mut m = MorseBuilder::new();
    m.cup(0);
    m.cup(1);
    m.cup(3);
    for &(p, k) in blocks {
        m.twist(p, k);
    }
    m.cap(1);
    m.cap(1);
    m.cap(0);
    m.finish(&[], 0).ok()
}

fn kn_table(n: i32) -> BigradedDims {
    kh(&plat6(&[(0, -3), (2, 3), (4, n - 2)]).unwrap())
}

type Dart = (usize, usize); // (crossing, slot): the edge there, traversed away

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
fn trace_faces(tuples: &[[usize; 4]]) -> Option<Vec<Vec<Dart>>> {
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

/// Orient, rotate and renumber arbitrary-labelled tuples into a valid PD.
fn canonicalize(tuples: &[[usize; 4]]) -> Option<PlanarDiagram> {
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

/// Pinch the two face darts together into a new crossing whose
/// identity-resolution label is `ident`. Returns the planar variants with the
/// new crossing's index.
fn pinch(d: &PlanarDiagram, d1: Dart, d2: Dart, ident: u8) -> Vec<(PlanarDiagram, usize)> {
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

/// Round annulus model: two concentric circles W1 (outer) and W2 (inner),
/// both traversed counterclockwise, and a two-edged band running from a foot
/// on W1 to a foot on W2. The band advances counterclockwise in integer
/// sector ticks; wall crossings and twist boxes happen along the way. The
/// plane regions are 0 = outside W1, 1 = annulus, 2 = hole.
#[derive(Clone, Copy, Debug, PartialEq)]
enum REv {
    /// Cross `wall` (1 or 2); the band passes over it iff `over`; the band
    /// advances `adv` sectors first.
    X { wall: u8, over: bool, adv: i64 },
    /// k half twists between the band edges (sign = chirality).
    T { k: i32 },
}

#[derive(Clone, Debug)]
struct Round {
    leave_out: bool,    // band leaves its W1 foot outward instead of into the annulus
    arrive_hole: bool,  // band reaches its W2 foot from the hole side
    end_adv: i64,
    sectors: i64,
    events: Vec<REv>,
}

fn round_build(r: &Round) -> Option<PlanarDiagram> {
    let s_mod = r.sectors.max(1);
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
            REv::X { wall, over, adv } => {
                tick += adv;
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
            REv::T { k } => {
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
    tick += r.end_adv;
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

/// Legal wall sequences of length c; returns (walls, arrive_hole).
fn region_words(c: usize, leave_out: bool) -> Vec<(Vec<u8>, bool)> {
    fn rec(region: u8, left: usize, cur: &mut Vec<u8>, out: &mut Vec<(Vec<u8>, bool)>) {
        if left == 0 {
            if region == 1 {
                out.push((cur.clone(), false));
            } else if region == 2 {
                out.push((cur.clone(), true));
            }
            return;
        }
        let moves: &[(u8, u8)] = match region {
            0 => &[(1, 1)],
            1 => &[(1, 0), (2, 2)],
            2 => &[(2, 1)],
            _ => unreachable!(),
        };
        for &(wall, next) in moves {
            cur.push(wall);
            rec(next, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(if leave_out { 0 } else { 1 }, c, &mut Vec::new(), &mut out);
    out
}

/// Substrate diagrams of K_j: pretzel plat variants plus R2-expanded words.
fn substrates(j: i32, want: &BigradedDims) -> Vec<PlanarDiagram> {
    let mut words: Vec<Vec<(usize, i32)>> = vec![
        vec![(0, -3), (2, 3), (4, j - 2)],
        vec![(0, 3), (2, j - 2), (4, -3)],
        vec![(0, j - 2), (2, -3), (4, 3)],
    ];
    let base = [(0, -3), (2, 3), (4, j - 2)];
    for pos in 0..5usize {
        for at in 0..=3usize {
            for sign in [1, -1] {
                let mut w: Vec<(usize, i32)> = Vec::new();
                for (k, &b) in base.iter().enumerate() {
                    if k == at {
                        w.push((pos, sign));
                        w.push((pos, -sign));
                    }
                    w.push(b);
                }
                if at == 3 {
                    w.push((pos, sign));
                    w.push((pos, -sign));
                }
                words.push(w);
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for w in words {
        let Some(d) = plat6(&w) else { continue };
        if d.components() != 1 || !seen.insert(d.to_pd_string()) {
            continue;
        }
        if kh(&d) != *want {
            continue;
        }
        out.push(d);
    }
    out
}

/// Assemble a Round from a wall word, an over-bit mask, and one twist box of
/// k half-twists inserted before the X event at index `tpos`.
fn round_shape(
    leave_out: bool,
    walls: &[u8],
    arrive_hole: bool,
    overmask: u32,
    tpos: usize,
    k: i32,
) -> Round {
    let mut events = Vec::with_capacity(walls.len() + 1);
    for (i, &w) in walls.iter().enumerate() {
        if i == tpos && k != 0 {
            events.push(REv::T { k });
        }
        events.push(REv::X { wall: w, over: overmask >> i & 1 == 1, adv: 1 });
    }
    if tpos == walls.len() && k != 0 {
        events.push(REv::T { k });
    }
    Round { leave_out, arrive_hole, end_adv: 1, sectors: 4, events }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stage = args.first().map(|s| s.as_str()).unwrap_or("sanity");
    let ktab: Vec<BigradedDims> = (0..8).map(kn_table).collect();
    for (m, t) in ktab.iter().enumerate() {
        assert_eq!(collapse(t).kappa(), Some(-2 - m as i32), "kn_table({m})");
    }

    if stage == "sanity" {
        // no events: flat band joining the circles -> unknot
        let d = round_build(&Round {
            leave_out: false,
            arrive_hole: false,
            end_adv: 1,
            sectors: 4,
            events: vec![],
        })
        .unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.components(), 1);

        // twisted band -> reducible unknot, writhe tracks the chirality
        for k in [-3i32, -1, 1, 2, 3] {
            let d = round_build(&Round {
                leave_out: false,
                arrive_hole: false,
                end_adv: 1,
                sectors: 4,
                events: vec![REv::T { k }],
            })
            .unwrap();
            assert_eq!(d.components(), 1, "k={k}");
            let t = kh(&d);
            println!("T({k}): crossings={} writhe={} kappa={:?}", d.crossing_count(), d.writhe(), collapse(&t).kappa());
            assert_eq!(t.total_dim(), 2, "k={k}");
        }

        // dip into the hole and attach from inside -> unknot
        for over in [false, true] {
            let d = round_build(&Round {
                leave_out: false,
                arrive_hole: true,
                end_adv: 1,
                sectors: 4,
                events: vec![REv::X { wall: 2, over, adv: 1 }],
            })
            .unwrap();
            assert_eq!(d.components(), 1);
            assert_eq!(kh(&d).total_dim(), 2, "over={over}");
        }

        // in-and-back across W2, all four over/under patterns: still unknots
        for m in 0..4u32 {
            let d = round_build(&Round {
                leave_out: false,
                arrive_hole: false,
                end_adv: 1,
                sectors: 4,
                events: vec![
                    REv::X { wall: 2, over: m & 1 == 1, adv: 1 },
                    REv::X { wall: 2, over: m & 2 == 2, adv: 1 },
                ],
            })
            .unwrap();
            assert_eq!(d.components(), 1);
            let t = kh(&d);
            println!("clasp m={m}: writhe={} dim={} kappa={:?}", d.writhe(), t.total_dim(), collapse(&t).kappa());
        }

        // twisted band through the hole: twist-knot family; print the ladder
        for over in [false, true] {
            for k in -4..=4i32 {
                let mut events = vec![REv::T { k }];
                events.push(REv::X { wall: 2, over, adv: 1 });
                let d = round_build(&Round {
                    leave_out: false,
                    arrive_hole: true,
                    end_adv: 1,
                    sectors: 4,
                    events,
                })
                .unwrap();
                let t = kh(&d);
                println!(
                    "hole-twist over={over} k={k}: w={} dim={} kappa={:?}",
                    d.writhe(),
                    t.total_dim(),
                    collapse(&t).kappa()
                );
            }
        }
        println!("sanity done");
        return;
    }

    if stage == "spiral" {
        let cmin: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
        let cmax: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
        let ktabm: Vec<BigradedDims> = ktab.iter().map(|t| t.mirrored()).collect();
        let mut shapes = 0usize;
        let mut build_fail = 0usize;
        let mut hits = 0usize;
        for c in cmin..=cmax {
            let t0 = std::time::Instant::now();
            for leave_out in [false, true] {
                for (walls, arrive_hole) in region_words(c, leave_out) {
                    for overmask in 0..1u32 << c {
                        for tpos in 0..=c {
                            shapes += 1;
                            // lazily computed tables for box values -3..=3
                            let mut tbl: Vec<Option<BigradedDims>> = vec![None; 7];
                            let mut get = |j: i32, fails: &mut usize| -> Option<BigradedDims> {
                                let idx = (j + 3) as usize;
                                if tbl[idx].is_none() {
                                    match round_build(&round_shape(
                                        leave_out,
                                        &walls,
                                        arrive_hole,
                                        overmask,
                                        tpos,
                                        j,
                                    )) {
                                        Some(d) => {
                                            debug_assert_eq!(d.components(), 1);
                                            tbl[idx] = Some(kh(&d));
                                        }
                                        None => {
                                            *fails += 1;
                                            return None;
                                        }
                                    }
                                }
                                tbl[idx].clone()
                            };
                            for beta in -3..=3i32 {
                                let Some(t0) = get(beta, &mut build_fail) else { continue };
                                for (fam, name) in [(&ktab, "plain"), (&ktabm, "mirror")] {
                                    if t0 != fam[0] {
                                        continue;
                                    }
                                    for sigma in [1i32, -1] {
                                        let (j1, j2) = (beta + sigma, beta + 2 * sigma);
                                        if !(-3..=3).contains(&j1) || !(-3..=3).contains(&j2) {
                                            continue;
                                        }
                                        let Some(t1) = get(j1, &mut build_fail) else { continue };
                                        if t1 != fam[1] {
                                            continue;
                                        }
                                        let Some(t2) = get(j2, &mut build_fail) else { continue };
                                        if t2 != fam[2] {
                                            continue;
                                        }
                                        hits += 1;
                                        println!(
                                            "HIT {name} c={c} leave_out={leave_out} walls={walls:?} over={overmask:#b} tpos={tpos} box=({sigma})*m+({beta}) arrive_hole={arrive_hole}"
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
            println!(
                "c={c}: cumulative shapes={shapes} build_fail={build_fail} hits={hits} ({:?})",
                t0.elapsed()
            );
        }
        return;
    }

    // the four plain-chirality c=4 winners: (overmask, beta)
    let winners: [(u32, i32); 4] = [(0b101, -2), (0b110, -3), (0b1001, -1), (0b1010, -2)];
    let route = |over: u32, tpos: usize, k: i32| -> Option<PlanarDiagram> {
        round_build(&round_shape(false, &[2, 2, 1, 1], false, over, tpos, k))
    };

    if stage == "confirm" {
        for &(over, beta) in &winners {
            for tpos in 0..=4usize {
                let mut ok = true;
                for m in 0..=5i32 {
                    let Some(d) = route(over, tpos, m + beta) else {
                        ok = false;
                        break;
                    };
                    if d.components() != 1 || kh(&d) != ktab[m as usize] {
                        ok = false;
                        break;
                    }
                }
                println!("confirm over={over:#b} beta={beta} tpos={tpos}: {}", if ok { "FULL MATCH m=0..5" } else { "mismatch" });
            }
        }
        return;
    }

    if stage == "flype" {
        // hunt the marked crossing: shifts (1,-1), Res_1 = K_{m+1} (full table),
        // Res_0 a kappa=0 link whose table is independent of m
        for &(over, beta) in &winners {
            for tpos in 0..=4usize {
                let mut per_crossing: BTreeMap<String, Vec<(i32, usize)>> = BTreeMap::new();
                for m in 1..=3i32 {
                    let Some(d) = route(over, tpos, m + beta) else { continue };
                    for c in 0..d.crossing_count() {
                        let (p, q, _) = d.grading_shifts(c).unwrap();
                        if (p, q) != (1, -1) {
                            continue;
                        }
                        let r1 = d.resolve(c, 1).unwrap();
                        if kh(&r1) != ktab[m as usize + 1] {
                            continue;
                        }
                        let r0 = d.resolve(c, 0).unwrap();
                        let t0 = kh(&r0);
                        if collapse(&t0).kappa() != Some(0) {
                            continue;
                        }
                        let key = format!("{:?}", t0.iter().collect::<Vec<_>>());
                        per_crossing.entry(key).or_default().push((m, c));
                    }
                }
                for (key, hits) in &per_crossing {
                    let ms: Vec<i32> = hits.iter().map(|&(m, _)| m).collect();
                    if ms.contains(&1) && ms.contains(&2) && ms.contains(&3) {
                        println!(
                            "FLYPE over={over:#b} beta={beta} tpos={tpos} hits={hits:?} res0_table={key}"
                        );
                    }
                }
            }
        }
        return;
    }

    if stage == "flype2" {
        // wider route space: length-5/6 wall words, all over-masks, box slid
        // to position 0; gate on full-table identity with K_m, then scan
        // crossings for the ladder battery.
        let cmin: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
        let cmax: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(6);
        for c in cmin..=cmax {
            let t0 = std::time::Instant::now();
            let mut routes = 0usize;
            for leave_out in [false, true] {
                for (walls, arrive_hole) in region_words(c, leave_out) {
                    for overmask in 0..1u32 << c {
                        let build = |k: i32| -> Option<PlanarDiagram> {
                            round_build(&round_shape(leave_out, &walls, arrive_hole, overmask, 0, k))
                        };
                        for beta in -4..=4i32 {
                            let Some(d1) = build(1 + beta) else { continue };
                            if d1.components() != 1 || kh(&d1) != ktab[1] {
                                continue;
                            }
                            let full = (0..=3i32).all(|m| {
                                build(m + beta).is_some_and(|d| d.components() == 1 && kh(&d) == ktab[m as usize])
                            });
                            if !full {
                                continue;
                            }
                            routes += 1;
                            let mut per: BTreeMap<String, Vec<(i32, usize)>> = BTreeMap::new();
                            for m in 1..=3i32 {
                                let d = build(m + beta).unwrap();
                                for cr in 0..d.crossing_count() {
                                    let (p, q, _) = d.grading_shifts(cr).unwrap();
                                    if (p, q) != (1, -1) {
                                        continue;
                                    }
                                    let r1 = d.resolve(cr, 1).unwrap();
                                    if kh(&r1) != ktab[m as usize + 1] {
                                        continue;
                                    }
                                    let t0 = kh(&d.resolve(cr, 0).unwrap());
                                    if collapse(&t0).kappa() != Some(0) {
                                        continue;
                                    }
                                    let key = format!("{:?}", t0.iter().collect::<Vec<_>>());
                                    per.entry(key).or_default().push((m, cr));
                                }
                            }
                            for (key, hits) in &per {
                                let ms: Vec<i32> = hits.iter().map(|&(m, _)| m).collect();
                                if ms.contains(&1) && ms.contains(&2) && ms.contains(&3) {
                                    println!(
                                        "FLYPE2 c={c} leave_out={leave_out} walls={walls:?} over={overmask:#b} beta={beta} arrive_hole={arrive_hole} hits={hits:?}\n    res0={key}"
                                    );
                                }
                            }
                        }
                    }
                }
            }
            println!("flype2 c={c}: {routes} confirmed K_m routes ({:?})", t0.elapsed());
        }
        return;
    }

    if stage == "fam0" {
        use tbwb_core::diagram::{build_family, Family, FamilySpec};
        for fam in [Family::HPlus, Family::HMinus, Family::T42, Family::Mirror820, Family::TwistedWhitehead] {
            let d = build_family(&FamilySpec::new(fam)).unwrap();
            let t = kh(&d);
            println!(
                "{}: crossings={} writhe={} comps={} kappa={:?} total={}",
                fam.token(), d.crossing_count(), d.writhe(), d.components(),
                collapse(&t).kappa(), t.total_dim()
            );
        }
        let m820 = kh(&build_family(&FamilySpec::new(Family::Mirror820)).unwrap());
        println!("m820 == ktab[0]: {}", m820 == ktab[0]);
        // torus clasp orientation variants
        for k in [-4i32, 4] {
            for nested in [true, false] {
                let mut m = MorseBuilder::new();
                if nested {
                    m.cup(0);
                    m.cup(1);
                    m.twist(2, k);
                    m.cap(1);
                    m.cap(0);
                } else {
                    m.cup(0);
                    m.cup(2);
                    m.twist(1, k);
                    m.cap(0);
                    m.cap(0);
                }
                let d = m.finish(&[], 0).unwrap();
                let t = kh(&d);
                println!(
                    "clasp k={k} nested={nested}: writhe={} comps={} kappa={:?} total={} table={:?}",
                    d.writhe(), d.components(), collapse(&t).kappa(), t.total_dim(),
                    t.iter().collect::<Vec<_>>()
                );
            }
            // nested cups, clasp on the left column
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(1);
            m.twist(0, k);
            m.cap(1);
            m.cap(0);
            let d = m.finish(&[], 0).unwrap();
            let t = kh(&d);
            println!(
                "clasp k={k} left-col: writhe={} comps={} kappa={:?} table={:?}",
                d.writhe(), d.components(), collapse(&t).kappa(),
                t.iter().collect::<Vec<_>>()
            );
            // antiparallel: reverse the second circle
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(1);
            m.twist(2, k);
            m.cap(1);
            m.cap(0);
            let d = m.finish(&[], 0).unwrap().reversed(1);
            let t = kh(&d);
            println!(
                "clasp k={k} reversed: writhe={} comps={} kappa={:?} table={:?}",
                d.writhe(), d.components(), collapse(&t).kappa(),
                t.iter().collect::<Vec<_>>()
            );
        }
        return;
    }

    if stage == "flype3" {
        // Face-chord insertion on the winner route: find a crossing c added to
        // the K_m route diagram such that resolving c by 1 restores the route
        // (so the pinched diagram presents K_{m-1} in flype form), with
        // grading shifts (p,q) = (1,-1) and an m-independent 2-component
        // 0-resolution of kappa 0.
        use tbwb_core::diagram::annulus::{self, BandEvent, RoundTemplate};
        let winners: [(u32, i32); 4] = [(0b101, -2), (0b110, -3), (0b1001, -1), (0b1010, -2)];
        let walls_w = [2u8, 2, 1, 1];
        let presentations = |m: i32| -> Vec<(String, PlanarDiagram)> {
            let mut out = Vec::new();
            for (wi, &(mask, beta)) in winners.iter().enumerate() {
                for tpos in 0..=4usize {
                    let k = m + beta;
                    let mut ev: Vec<BandEvent> = Vec::new();
                    for (i, &w) in walls_w.iter().enumerate() {
                        if i == tpos && k != 0 {
                            ev.push(BandEvent::Box { k });
                        }
                        ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                    }
                    if tpos == 4 && k != 0 {
                        ev.push(BandEvent::Box { k });
                    }
                    if let Some(d) = annulus::round_diagram(&RoundTemplate::new(ev)) {
                        out.push((format!("w{wi}t{tpos}"), d));
                    }
                }
            }
            if let Ok(d) = tbwb_core::diagram::pretzel(-3, 3, m - 2) {
                out.push(("pretzel".to_string(), d));
            }
            out
        };
        let mut per_m: Vec<BTreeMap<String, BigradedDims>> = Vec::new();
        for m in 1..=3i32 {
            for (tag, d0) in presentations(m) {
                assert_eq!(kh(&d0), kn_table(m), "presentation {tag} m={m}");
            }
            let mut hits: BTreeMap<String, BigradedDims> = BTreeMap::new();
            let (mut n_cand, mut n_kh) = (0usize, 0usize);
            let mut histo: BTreeMap<(i32, i32, usize, Option<i32>, usize), usize> = BTreeMap::new();
            for (tag, d0) in presentations(m) {
                let faces = annulus::trace_faces(d0.crossings()).unwrap();
                for face in &faces {
                    for i in 0..face.len() {
                        for j in i + 1..face.len() {
                            for (dd, c) in annulus::pinch(&d0, face[i], face[j], 1) {
                                n_cand += 1;
                                if dd.components() != 1 {
                                    continue;
                                }
                                if kh(&dd) != kn_table(m - 1) {
                                    continue;
                                }
                                n_kh += 1;
                                let (p, q, _) = dd.grading_shifts(c).unwrap();
                                let r0 = dd.resolve(c, 0).unwrap();
                                let t0 = kh(&r0);
                                *histo
                                    .entry((p, q, r0.components(), collapse(&t0).kappa(), t0.total_dim()))
                                    .or_default() += 1;
                                if (p, q) != (1, -1)
                                    || r0.components() != 2
                                    || collapse(&t0).kappa() != Some(0)
                                {
                                    continue;
                                }
                                println!(
                                    "m={m} {tag} chord {:?}-{:?} r0dim={}",
                                    face[i],
                                    face[j],
                                    t0.total_dim()
                                );
                                let key =
                                    format!("{tag} {:?}+{:?} d{}", face[i], face[j], t0.total_dim());
                                hits.insert(key, t0);
                            }
                        }
                    }
                }
            }
            println!("m={m}: cands={n_cand} kh-hits={n_kh} strict hits={}", hits.len());
            for (k, v) in &histo {
                println!("  (p,q,comps,kappa,dim)={k:?} x{v}");
            }
            per_m.push(hits);
        }
        // m-independence: keep chords present for every m with identical r0 table
        let mut stable: Vec<&String> = Vec::new();
        for key in per_m[0].keys() {
            if per_m.iter().all(|h| h.get(key) == per_m[0].get(key)) {
                stable.push(key);
            }
        }
        println!("stable chords across m=1..3: {stable:?}");
        if let Some(k) = stable.first() {
            println!("winner r0 table: {:?}", per_m[0][*k]);
        }
        return;
    }

    if stage == "flype4" {
        // Chord insertion over R2-stabilized routes: bases are 6-wall-event
        // round routes isotopic to K_m; the chord's 1-resolution restores the
        // base, and we demand the 0-resolution be a clasped 2-component link
        // of kappa 0 (not the unlink).
        use tbwb_core::diagram::annulus::{self, BandEvent, RoundTemplate};
        // region-consistent wall sequences: start and end in the annulus
        let mut wallseqs: Vec<Vec<u8>> = Vec::new();
        for bits in 0..(1u32 << 6) {
            let seq: Vec<u8> = (0..6).map(|i| if bits >> i & 1 == 1 { 2u8 } else { 1 }).collect();
            let mut region = 1i32;
            let mut ok = true;
            for &w in &seq {
                region = match (w, region) {
                    (1, 0) => 1,
                    (1, 1) => 0,
                    (2, 1) => 2,
                    (2, 2) => 1,
                    _ => {
                        ok = false;
                        break;
                    }
                };
            }
            if ok && region == 1 {
                wallseqs.push(seq);
            }
        }
        println!("{} wall sequences", wallseqs.len());
        let bases = |m: i32| -> Vec<(String, PlanarDiagram)> {
            let mut out = Vec::new();
            for seq in &wallseqs {
                for mask in 0..(1u32 << 6) {
                    for dk in -4..=1i32 {
                        let k = m + dk;
                        for tpos in 0..=6usize {
                            if k == 0 && tpos > 0 {
                                break;
                            }
                            let mut ev: Vec<BandEvent> = Vec::new();
                            for (i, &w) in seq.iter().enumerate() {
                                if i == tpos && k != 0 {
                                    ev.push(BandEvent::Box { k });
                                }
                                ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                            }
                            if tpos == 6 && k != 0 {
                                ev.push(BandEvent::Box { k });
                            }
                            if let Some(d) = annulus::round_diagram(&RoundTemplate::new(ev)) {
                                if d.components() == 1 && kh(&d) == kn_table(m) {
                                    out.push((format!("{seq:?}m{mask}k{dk}t{tpos}"), d));
                                }
                            }
                        }
                    }
                }
            }
            out
        };
        let m = 2i32;
        let b = bases(m);
        println!("m={m}: {} stabilized K_m bases", b.len());
        let mut found: BTreeMap<String, (String, Dart, Dart)> = BTreeMap::new();
        for (tag, d0) in &b {
            let faces = annulus::trace_faces(d0.crossings()).unwrap();
            for face in &faces {
                for i in 0..face.len() {
                    for j in i + 1..face.len() {
                        for (dd, c) in annulus::pinch(d0, face[i], face[j], 1) {
                            if dd.components() != 1 {
                                continue;
                            }
                            if kh(&dd) != kn_table(m - 1) {
                                continue;
                            }
                            let (p, q, _) = dd.grading_shifts(c).unwrap();
                            if (p, q) != (1, -1) {
                                continue;
                            }
                            let r0 = dd.resolve(c, 0).unwrap();
                            let t0 = kh(&r0);
                            if r0.components() != 2 || collapse(&t0).kappa() != Some(0) {
                                continue;
                            }
                            println!(
                                "HIT base={tag} chord {:?}-{:?} r0dim={} r0={:?}",
                                face[i],
                                face[j],
                                t0.total_dim(),
                                t0
                            );
                            found.insert(
                                format!("{tag} {:?} {:?}", face[i], face[j]),
                                (tag.clone(), face[i], face[j]),
                            );
                        }
                    }
                }
            }
        }
        println!("total hits: {}", found.len());
        return;
    }

    if stage == "flype5" {
        // Rail-clasp hypothesis: K_{m-1} presented as a round route plus a
        // rail-rail twist region; the marked crossing is a rail crossing whose
        // 1-resolution is K_m and whose 0-resolution is a clasped 2-component
        // link of kappa 0 untouched by the band box.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let mut wallseqs: Vec<Vec<u8>> = Vec::new();
        for len in [2usize, 4] {
            for bits in 0..(1u32 << len) {
                let seq: Vec<u8> =
                    (0..len).map(|i| if bits >> i & 1 == 1 { 2u8 } else { 1 }).collect();
                let mut region = 1i32;
                let mut ok = true;
                for &w in &seq {
                    region = match (w, region) {
                        (1, 0) => 1,
                        (1, 1) => 0,
                        (2, 1) => 2,
                        (2, 2) => 1,
                        _ => {
                            ok = false;
                            break;
                        }
                    };
                }
                if ok && region == 1 {
                    wallseqs.push(seq);
                }
            }
        }
        println!("{} wall sequences", wallseqs.len());
        let mut hits = 0usize;
        for m in [2i32] {
            for seq in &wallseqs {
                let nmask = 1u32 << seq.len();
                for mask in 0..nmask {
                    for dk in -3..=1i32 {
                        let k = (m - 1) + dk;
                        for tpos in 0..=seq.len() {
                            if k == 0 && tpos > 0 {
                                break;
                            }
                            for station in (1..2 * seq.len() as i64).step_by(2) {
                                for kr in [-4i32, -2, 2, 4] {
                                    let mut ev: Vec<BandEvent> = Vec::new();
                                    for (i, &w) in seq.iter().enumerate() {
                                        if i == tpos && k != 0 {
                                            ev.push(BandEvent::Box { k });
                                        }
                                        ev.push(BandEvent::Wall {
                                            wall: w,
                                            over: mask >> i & 1 == 1,
                                        });
                                    }
                                    if tpos == seq.len() && k != 0 {
                                        ev.push(BandEvent::Box { k });
                                    }
                                    let mut t = RoundTemplate::new(ev);
                                    t.rail_twists = vec![RailTwist { station, k: kr }];
                                    let Some(d) = round_diagram(&t) else { continue };
                                    if d.components() != 1 {
                                        continue;
                                    }
                                    if kh(&d) != kn_table(m - 1) {
                                        continue;
                                    }
                                    let nc = d.crossing_count();
                                    let nrail = kr.unsigned_abs() as usize;
                                    for c in nc - nrail..nc {
                                        let r1 = d.resolve(c, 1).unwrap();
                                        if r1.components() != 1 || kh(&r1) != kn_table(m) {
                                            continue;
                                        }
                                        let (p, q, _) = d.grading_shifts(c).unwrap();
                                        let r0 = d.resolve(c, 0).unwrap();
                                        let t0 = kh(&r0);
                                        println!(
                                            "CAND m={m} seq={seq:?} mask={mask} dk={dk} tpos={tpos} st={station} kr={kr} c={c} pq=({p},{q}) r0c={} r0k={:?} r0d={}",
                                            r0.components(),
                                            collapse(&t0).kappa(),
                                            t0.total_dim()
                                        );
                                        if (p, q) == (1, -1)
                                            && r0.components() == 2
                                            && collapse(&t0).kappa() == Some(0)
                                        {
                                            println!("  ^^ STRICT HIT r0={t0:?}");
                                            hits += 1;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        println!("strict hits: {hits}");
        return;
    }

    if stage == "flype6" {
        // Mirror of flype3: the chord's 0-resolution restores the base route
        // (covers the opposite smoothing-label convention); demand the
        // 1-resolution be the clasped kappa-0 link.
        use tbwb_core::diagram::annulus::{self, BandEvent, RoundTemplate};
        let winners: [(u32, i32); 4] = [(0b101, -2), (0b110, -3), (0b1001, -1), (0b1010, -2)];
        let walls_w = [2u8, 2, 1, 1];
        let presentations = |m: i32| -> Vec<(String, PlanarDiagram)> {
            let mut out = Vec::new();
            for (wi, &(mask, beta)) in winners.iter().enumerate() {
                for tpos in 0..=4usize {
                    let k = m + beta;
                    let mut ev: Vec<BandEvent> = Vec::new();
                    for (i, &w) in walls_w.iter().enumerate() {
                        if i == tpos && k != 0 {
                            ev.push(BandEvent::Box { k });
                        }
                        ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                    }
                    if tpos == 4 && k != 0 {
                        ev.push(BandEvent::Box { k });
                    }
                    if let Some(d) = annulus::round_diagram(&RoundTemplate::new(ev)) {
                        out.push((format!("w{wi}t{tpos}"), d));
                    }
                }
            }
            if let Ok(d) = tbwb_core::diagram::pretzel(-3, 3, m - 2) {
                out.push(("pretzel".to_string(), d));
            }
            out
        };
        let mut per_m: Vec<BTreeMap<String, BigradedDims>> = Vec::new();
        for m in 1..=3i32 {
            let mut hits: BTreeMap<String, BigradedDims> = BTreeMap::new();
            let mut histo: BTreeMap<(i32, i32, usize, Option<i32>, usize), usize> = BTreeMap::new();
            let mut n_kh = 0usize;
            for (tag, d0) in presentations(m) {
                let faces = annulus::trace_faces(d0.crossings()).unwrap();
                for face in &faces {
                    for i in 0..face.len() {
                        for j in i + 1..face.len() {
                            for (dd, c) in annulus::pinch(&d0, face[i], face[j], 0) {
                                if dd.components() != 1 {
                                    continue;
                                }
                                if kh(&dd) != kn_table(m - 1) {
                                    continue;
                                }
                                n_kh += 1;
                                let (p, q, _) = dd.grading_shifts(c).unwrap();
                                let r1 = dd.resolve(c, 1).unwrap();
                                let t1 = kh(&r1);
                                *histo
                                    .entry((p, q, r1.components(), collapse(&t1).kappa(), t1.total_dim()))
                                    .or_default() += 1;
                                if (p, q) != (1, -1)
                                    || r1.components() != 2
                                    || collapse(&t1).kappa() != Some(0)
                                {
                                    continue;
                                }
                                println!(
                                    "m={m} {tag} chord {:?}-{:?} r1dim={}",
                                    face[i],
                                    face[j],
                                    t1.total_dim()
                                );
                                let key =
                                    format!("{tag} {:?}+{:?} d{}", face[i], face[j], t1.total_dim());
                                hits.insert(key, t1);
                            }
                        }
                    }
                }
            }
            println!("m={m}: kh-hits={n_kh} strict={}", hits.len());
            for (k, v) in &histo {
                println!("  (p,q,comps,kappa,dim)={k:?} x{v}");
            }
            per_m.push(hits);
        }
        let mut stable: Vec<&String> = Vec::new();
        for key in per_m[0].keys() {
            if per_m.iter().all(|h| h.get(key) == per_m[0].get(key)) {
                stable.push(key);
            }
        }
        println!("stable chords across m: {stable:?}");
        if let Some(k) = stable.first() {
            println!("winner r1 table: {:?}", per_m[0][*k]);
        }
        return;
    }

    if stage == "knt1" {
        // Stage 1 of the K^0_{n,t} template hunt, pinned at t=4 where the
        // t-box is empty and the knot must match K_n. Architecture: 4-wall
        // route + band box (k = base + dir*n) + one rail twist region (the
        // -2 clasp). A config survives if it reproduces ktab[n] for n=0,1,2.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let wallseqs: Vec<Vec<u8>> = vec![
            vec![1, 1, 1, 1],
            vec![1, 1, 2, 2],
            vec![2, 2, 1, 1],
            vec![2, 2, 2, 2],
        ];
        let ktab: Vec<BigradedDims> = (0..4).map(kn_table).collect();
        let build = |seq: &[u8],
                     mask: u32,
                     tpos: usize,
                     station: i64,
                     kr: i32,
                     k: i32|
         -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = Vec::new();
            for (i, &w) in seq.iter().enumerate() {
                if i == tpos && k != 0 {
                    ev.push(BandEvent::Box { k });
                }
                ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
            }
            if tpos == 4 && k != 0 {
                ev.push(BandEvent::Box { k });
            }
            let mut t = RoundTemplate::new(ev);
            t.rail_twists = vec![RailTwist { station, k: kr }];
            round_diagram(&t)
        };
        let mut tested = 0usize;
        let mut hits = 0usize;
        for seq in &wallseqs {
            for mask in 0..16u32 {
                for tpos in 0..=4usize {
                    for station in (1..8i64).step_by(2) {
                        for kr in [-4i32, -2, 2, 4] {
                            for base in -5..=5i32 {
                                for dir in [1i32, -1] {
                                    tested += 1;
                                    let mut ok = true;
                                    for n in 0..3i32 {
                                        let k = base + dir * n;
                                        let Some(d) = build(seq, mask, tpos, station, kr, k)
                                        else {
                                            ok = false;
                                            break;
                                        };
                                        if d.components() != 1
                                            || kh(&d) != ktab[n as usize]
                                        {
                                            ok = false;
                                            break;
                                        }
                                    }
                                    if ok {
                                        hits += 1;
                                        let d3 = build(seq, mask, tpos, station, kr, base + dir * 3);
                                        let n3 = d3
                                            .map(|d| {
                                                d.components() == 1 && kh(&d) == ktab[3]
                                            })
                                            .unwrap_or(false);
                                        println!(
                                            "KNT1 seq={seq:?} mask={mask} tpos={tpos} st={station} kr={kr} base={base} dir={dir} n3ok={n3}"
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        println!("tested={tested} hits={hits}");
        return;
    }

    if stage == "knt2" {
        // Map the (band box k, rail twist kr) plane for each 4-wall config
        // against the K_n tables, to find how the family parameter threads
        // through the two twist regions.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let ktab: Vec<BigradedDims> = (0..5).map(kn_table).collect();
        let wallseqs: Vec<Vec<u8>> = vec![
            vec![1, 1, 1, 1],
            vec![1, 1, 2, 2],
            vec![2, 2, 1, 1],
            vec![2, 2, 2, 2],
        ];
        for seq in &wallseqs {
        for mask in 0..16u32 {
            for tpos in [0usize] {
                let mut grid: Vec<String> = Vec::new();
                let mut any = false;
                for k in -8..=8i32 {
                    let mut row = String::new();
                    for kr in (-8..=8i32).step_by(2) {
                        let mut ev: Vec<BandEvent> = Vec::new();
                        for (i, &w) in seq.iter().enumerate() {
                            if i == tpos && k != 0 {
                                ev.push(BandEvent::Box { k });
                            }
                            ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                        }
                        if tpos == 4 && k != 0 {
                            ev.push(BandEvent::Box { k });
                        }
                        let mut t = RoundTemplate::new(ev);
                        if kr != 0 {
                            t.rail_twists = vec![RailTwist { station: 1, k: kr }];
                        }
                        let ch = match round_diagram(&t) {
                            Some(d) if d.components() == 1 => {
                                let tb = kh(&d);
                                match ktab.iter().position(|x| *x == tb) {
                                    Some(j) => {
                                        any = true;
                                        char::from_digit(j as u32, 10).unwrap()
                                    }
                                    None => '.',
                                }
                            }
                            Some(_) => 'L',
                            None => ' ',
                        };
                        row.push(ch);
                    }
                    grid.push(format!("k={k:>3} {row}"));
                }
                if any {
                    println!("== seq={seq:?} mask={mask} tpos={tpos} (cols kr=-8..8 step2)");
                    for r in grid {
                        println!("  {r}");
                    }
                }
            }
        }
        }
        return;
    }

    if stage == "knt3" {
        // kappa grid over (route, band box k, rail twist kr). Looking for the
        // family lines kappa = -3-2n (K^0_{n,2} with boxes n+1,-4) and
        // kappa = -2n-10 (R_n, same boxes, different route).
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let wallseqs: Vec<Vec<u8>> = vec![
            vec![1, 1, 1, 1],
            vec![1, 1, 2, 2],
            vec![2, 2, 1, 1],
            vec![2, 2, 2, 2],
        ];
        for seq in &wallseqs {
            for mask in 0..16u32 {
                let mut grid: Vec<String> = Vec::new();
                for k in -8..=8i32 {
                    let mut row = String::new();
                    for kr in (-8..=8i32).step_by(2) {
                        let mut ev: Vec<BandEvent> = Vec::new();
                        for (i, &w) in seq.iter().enumerate() {
                            if i == 0 && k != 0 {
                                ev.push(BandEvent::Box { k });
                            }
                            ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                        }
                        let mut t = RoundTemplate::new(ev);
                        if kr != 0 {
                            t.rail_twists = vec![RailTwist { station: 1, k: kr }];
                        }
                        let cell = match round_diagram(&t) {
                            Some(d) if d.components() == 1 => {
                                let kp = collapse(&kh(&d)).kappa().unwrap();
                                // print kappa compactly: a=-1? use offset: char for kappa+15
                                let c = (b'a' + (kp + 15) as u8) as char;
                                c
                            }
                            Some(_) => '.',
                            None => ' ',
                        };
                        row.push(cell);
                    }
                    grid.push(format!("k={k:>3} {row}"));
                }
                println!("== seq={seq:?} mask={mask} (cols kr=-8..8 step2; char=kappa+15+'a', so 'a'=-15,'p'=0)");
                for r in grid {
                    println!("  {r}");
                }
            }
        }
        return;
    }

    if stage == "knt4" {
        // Battery probe: in the (route, k, kr, station) space, find diagrams
        // with kappa=-3 owning a crossing whose 1-resolution equals the
        // T(-4,2) table with shifts (-1,-7)  [K^0_{0,2} signature], and
        // kappa=-10 diagrams with a (-1,5) crossing whose 1-resolution is a
        // 2-component link with kappa=-8  [R_0 signature].
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        println!("t42 table {t42:?} kappa={:?}", collapse(&t42).kappa());
        let wallseqs: Vec<Vec<u8>> = vec![
            vec![1, 1, 1, 1],
            vec![1, 1, 2, 2],
            vec![2, 2, 1, 1],
            vec![2, 2, 2, 2],
        ];
        for seq in &wallseqs {
            for mask in 0..16u32 {
                for k in -8..=8i32 {
                    for station in (1..8i64).step_by(2) {
                        for kr in (-8..=8i32).step_by(2) {
                            let mut ev: Vec<BandEvent> = Vec::new();
                            for (i, &w) in seq.iter().enumerate() {
                                if i == 0 && k != 0 {
                                    ev.push(BandEvent::Box { k });
                                }
                                ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                            }
                            let mut t = RoundTemplate::new(ev);
                            if kr != 0 {
                                t.rail_twists = vec![RailTwist { station, k: kr }];
                            } else if station > 1 {
                                continue;
                            }
                            let Some(d) = round_diagram(&t) else { continue };
                            if d.components() != 1 {
                                continue;
                            }
                            let kp = collapse(&kh(&d)).kappa().unwrap();
                            if kp == -3 {
                                for c in 0..d.crossing_count() {
                                    let r1 = d.resolve(c, 1).unwrap();
                                    if r1.components() != 2 {
                                        continue;
                                    }
                                    let (p, q, _) = d.grading_shifts(c).unwrap();
                                    if kh(&r1) == t42 {
                                        let r0 = d.resolve(c, 0).unwrap();
                                        let k0 = collapse(&kh(&r0)).kappa().unwrap();
                                        println!(
                                            "KN02 seq={seq:?} mask={mask} k={k} st={station} kr={kr} c={c} pq=({p},{q}) res0kappa={k0}"
                                        );
                                    }
                                }
                            } else if kp == -10 {
                                for c in 0..d.crossing_count() {
                                    let (p, q, _) = d.grading_shifts(c).unwrap();
                                    if (p, q) != (-1, 5) {
                                        continue;
                                    }
                                    let r1 = d.resolve(c, 1).unwrap();
                                    if r1.components() != 2 {
                                        continue;
                                    }
                                    let k1 = collapse(&kh(&r1)).kappa().unwrap();
                                    let r0 = d.resolve(c, 0).unwrap();
                                    let k0 = collapse(&kh(&r0)).kappa().unwrap();
                                    println!(
                                        "R0 seq={seq:?} mask={mask} k={k} st={station} kr={kr} c={c} res1kappa={k1} res0kappa={k0}"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        println!("done");
        return;
    }

    if stage == "knt12" {
        // Climb the s-ladder from K^0_{0,0} via Hopf batteries, then test
        // whether the resulting K^4_{0,0} equals the merged-box diagram.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let hminus = kh(&build_family(&parse_family("family=H_minus").unwrap()).unwrap());
        let build = |k: i32, kr: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        let mut level: Vec<PlanarDiagram> = vec![build(4, -6).unwrap()];
        for s in 0..4i32 {
            let (pq, hopf) = if s % 2 == 0 { ((5i32, -1i32), &hplus) } else { ((-3, -1), &hminus) };
            let mut next: Vec<PlanarDiagram> = Vec::new();
            let mut tables: Vec<BigradedDims> = Vec::new();
            for d in &level {
                for c in 0..d.crossing_count() {
                    let (p, q, _) = d.grading_shifts(c).unwrap();
                    if (p, q) != pq {
                        continue;
                    }
                    let r0 = d.resolve(c, 0).unwrap();
                    if r0.components() != 2 || kh(&r0) != *hopf {
                        continue;
                    }
                    let r1 = d.resolve(c, 1).unwrap();
                    if r1.components() != 1 {
                        continue;
                    }
                    let tab = kh(&r1);
                    if !tables.contains(&tab) {
                        tables.push(tab);
                        next.push(r1);
                    }
                }
            }
            let kaps: Vec<Option<i32>> = next.iter().map(|d| collapse(&kh(d)).kappa()).collect();
            println!("s={} -> {}: {} distinct children, kappas {kaps:?}", s, s + 1, next.len());
            if next.is_empty() {
                return;
            }
            level = next;
        }
        let merged = build(8, -6).unwrap();
        let merged_tab = kh(&merged);
        for (i, d) in level.iter().enumerate() {
            println!("K4 cand {i}: kh == merged box(8,-6): {}", kh(d) == merged_tab);
        }
        return;
    }

    if stage == "knt19" {
        // Validate Q_n = P(-2-n, n-1, 2) via the (-1,1) ladder battery, then
        // pinch Q_n to recover R_n's presentation with the marked crossing.
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::pretzel;
        let q = |n: i32| pretzel(-2 - n, n - 1, 2).unwrap();
        println!("--- Q ladder battery ---");
        for n in 1..4i32 {
            let d = q(n);
            let want_prev = kh(&q(n - 1));
            let mut found = false;
            for c in 0..d.crossing_count() {
                let (p, qq, _) = d.grading_shifts(c).unwrap();
                if (p, qq) != (-1, 1) {
                    continue;
                }
                let r0 = d.resolve(c, 0).unwrap();
                if r0.components() != 2 || kh(&r0) != want_prev {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                let k1 = collapse(&kh(&r1)).kappa();
                println!(
                    "n={n}: c={c} res0==Q_(n-1) ok, res1 {}c kappa={k1:?} (want -7)",
                    r1.components()
                );
                found = true;
                break;
            }
            if !found {
                println!("n={n}: NO (-1,1)/Q_(n-1) battery");
            }
        }
        println!("--- pinch Q_n -> R_n candidates ---");
        for n in 0..3i32 {
            let qd = q(n);
            let want_r = kh(&pretzel(-3, -1, 2 + 2 * n).unwrap());
            let want_k4 = kh(&pretzel(-3, 3, 1 + 2 * n).unwrap());
            let mut hits = 0;
            let nc = qd.crossing_count();
            'darts: for c1 in 0..nc {
                for c2 in 0..nc {
                    for s1 in 0..4usize {
                        for s2 in 0..4usize {
                            let d1 = (c1, s1);
                            let d2 = (c2, s2);
                            for (cand, cnew) in pinch(&qd, d1, d2, 1) {
                                if cand.components() != 1 {
                                    continue;
                                }
                                let (p, qq, _) = match cand.grading_shifts(cnew) {
                                    Ok(v) => v,
                                    Err(_) => continue,
                                };
                                if (p, qq) != (-1, 5) {
                                    continue;
                                }
                                if kh(&cand) != want_r {
                                    continue;
                                }
                                let r0 = cand.resolve(cnew, 0).unwrap();
                                if kh(&r0) != want_k4 {
                                    continue;
                                }
                                println!(
                                    "n={n}: R_n presentation found, {} crossings, marked c={cnew}",
                                    cand.crossing_count()
                                );
                                if hits == 0 {
                                    println!("  PD: {}", cand.to_pd_string());
                                }
                                hits += 1;
                                if hits >= 3 {
                                    break 'darts;
                                }
                            }
                        }
                    }
                }
            }
            if hits == 0 {
                println!("n={n}: no pinch candidate");
            }
        }
        return;
    }

    if stage == "knt20" {
        // Orientation-aware Q_n hunt: bin 2-component pretzels and 3-strand
        // double-twist closures by kappa = -8-n (both relative orientations),
        // then demand the ladder battery at a negative self-crossing:
        // res1 3-comp kappa=-7, res0 2-comp kh in the previous bin.
        use tbwb_core::diagram::{braid_closure, pretzel};
        let mut bins: Vec<Vec<(String, PlanarDiagram, BigradedDims)>> = vec![Vec::new(); 4];
        let consider = |desc: String,
                        d: PlanarDiagram,
                        bins: &mut Vec<Vec<(String, PlanarDiagram, BigradedDims)>>| {
            for o in 0..2 {
                if o == 1 && d.components() - d.free_loops() < 2 {
                    continue;
                }
                let dd = if o == 0 { d.clone() } else { d.reversed(1) };
                let tab = kh(&dd);
                if let Some(kap) = collapse(&tab).kappa() {
                    if (-11..=-8).contains(&kap) {
                        bins[(-8 - kap) as usize].push((format!("{desc}/o{o}"), dd, tab));
                    }
                }
            }
        };
        for a in -9i32..=9 {
            for b in a..=9 {
                for c in b..=9 {
                    if a.unsigned_abs() + b.unsigned_abs() + c.unsigned_abs() > 16 {
                        continue;
                    }
                    if let Ok(d) = pretzel(a, b, c) {
                        if d.components() == 2 {
                            consider(format!("P({a},{b},{c})"), d, &mut bins);
                        }
                    }
                }
            }
        }
        for a in -8i32..=8 {
            for b in -8i32..=8 {
                if (a + b).rem_euclid(2) == 0 {
                    continue;
                }
                let mut w: Vec<i32> = Vec::new();
                for _ in 0..a.unsigned_abs() {
                    w.push(if a > 0 { 1 } else { -1 });
                }
                for _ in 0..b.unsigned_abs() {
                    w.push(if b > 0 { 2 } else { -2 });
                }
                if let Ok(d) = braid_closure(3, &w) {
                    if d.components() == 2 {
                        consider(format!("B({a},{b})"), d, &mut bins);
                    }
                }
            }
        }
        for (n, v) in bins.iter().enumerate() {
            let names: Vec<&str> = v.iter().map(|(s, _, _)| s.as_str()).collect();
            println!("bin n={n}: {} candidates {names:?}", v.len());
        }
        for n in 1..4usize {
            println!("--- batteries n={n} ---");
            for (desc, d, _) in &bins[n] {
                for c in 0..d.crossing_count() {
                    if d.sign(c) >= 0 {
                        continue;
                    }
                    let r1 = d.resolve(c, 1).unwrap();
                    if r1.components() != 3 {
                        continue;
                    }
                    if collapse(&kh(&r1)).kappa() != Some(-7) {
                        continue;
                    }
                    let r0 = d.resolve(c, 0).unwrap();
                    if r0.components() != 2 {
                        continue;
                    }
                    let t0 = kh(&r0);
                    let t0r = if r0.components() - r0.free_loops() >= 2 {
                        kh(&r0.reversed(1))
                    } else {
                        t0.clone()
                    };
                    let mut matched: Vec<&str> = Vec::new();
                    for (pdesc, _, ptab) in &bins[n - 1] {
                        if *ptab == t0 || *ptab == t0r {
                            matched.push(pdesc.as_str());
                        }
                    }
                    if !matched.is_empty() {
                        let (p, q, _) = d.grading_shifts(c).unwrap();
                        println!("n={n}: {desc} c={c} (p,q)=({p},{q}) res0 in {matched:?}");
                    }
                }
            }
        }
        return;
    }

    if stage == "knt21" {
        // Census the literal R_n child (res0 of the K^0_{n,2} battery at c=4)
        // hunting the (-1,5) marked crossing: res0 1-comp == K^4_{n-1,2},
        // res1 2-comp = Q_n. Then chain-check the Q_n candidates.
        use tbwb_core::diagram::pretzel;
        let mut qs: Vec<Vec<(usize, PlanarDiagram, BigradedDims)>> = Vec::new();
        for n in 0..3i32 {
            let root = pretzel(-3, -1, 3 + 2 * n).unwrap();
            let rn = root.resolve(4, 0).unwrap();
            let want_r = kh(&pretzel(-3, -1, 2 + 2 * n).unwrap());
            let krn = collapse(&kh(&rn)).kappa();
            println!(
                "== n={n}: child {}c comps={} kh==P(-3,-1,{}) {} kappa={krn:?}",
                rn.crossing_count(),
                rn.components(),
                2 + 2 * n,
                kh(&rn) == want_r
            );
            let want_k4 = kh(&pretzel(-3, 3, 1 + 2 * n).unwrap());
            let mut found: Vec<(usize, PlanarDiagram, BigradedDims)> = Vec::new();
            for c in 0..rn.crossing_count() {
                let (p, q, _) = rn.grading_shifts(c).unwrap();
                let r0 = rn.resolve(c, 0).unwrap();
                let r1 = rn.resolve(c, 1).unwrap();
                let mut line = format!(
                    "  c={c} s={} pq=({p},{q}) r0({}c) r1({}c)",
                    rn.sign(c),
                    r0.components(),
                    r1.components()
                );
                if r0.components() == 1 {
                    let t0 = kh(&r0);
                    line.push_str(&format!(
                        " r0==K4 {} r0kap={:?}",
                        t0 == want_k4,
                        collapse(&t0).kappa()
                    ));
                    if r1.components() == 2 {
                        let t1 = kh(&r1);
                        line.push_str(&format!(" r1kap={:?}", collapse(&t1).kappa()));
                        if (p, q) == (-1, 5) && t0 == want_k4 {
                            line.push_str(" <== MARKED");
                            found.push((c, r1.clone(), t1));
                        }
                    }
                } else if r1.components() == 2 {
                    line.push_str(&format!(" r1kap={:?}", collapse(&kh(&r1)).kappa()));
                }
                println!("{line}");
            }
            qs.push(found);
        }
        println!("--- Q chain check ---");
        for n in 1..3usize {
            for (c, qd, _) in &qs[n] {
                for cc in 0..qd.crossing_count() {
                    if qd.sign(cc) >= 0 {
                        continue;
                    }
                    let r1 = qd.resolve(cc, 1).unwrap();
                    if r1.components() != 3 {
                        continue;
                    }
                    let k1 = collapse(&kh(&r1)).kappa();
                    let r0 = qd.resolve(cc, 0).unwrap();
                    if r0.components() != 2 {
                        continue;
                    }
                    let t0 = kh(&r0);
                    let t0r = if r0.components() - r0.free_loops() >= 2 {
                        kh(&r0.reversed(1))
                    } else {
                        t0.clone()
                    };
                    for (pc, _, ptab) in &qs[n - 1] {
                        if *ptab == t0 || *ptab == t0r {
                            let (p, q, _) = qd.grading_shifts(cc).unwrap();
                            println!(
                                "n={n}: Q(c={c}) cc={cc} (p,q)=({p},{q}) res1kap={k1:?} res0==Q{}(c={pc})",
                                n - 1
                            );
                        }
                    }
                }
            }
        }
        return;
    }

    if stage == "knt22" {
        // Build R_n presentations by pinching K^4_{n-1,2} = P(-3,3,1+2n):
        // new crossing cnew with res0 giving back the base, demand 1 comp,
        // kh == R_n table, (p,q)=(-1,5); then Q_n := res1 with inherited
        // orientation. Chain-check the Q_n across n.
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::pretzel;
        let mut qs: Vec<Vec<(String, PlanarDiagram, BigradedDims)>> = Vec::new();
        for n in 0..3i32 {
            let base = pretzel(-3, 3, 1 + 2 * n).unwrap();
            let want_r = kh(&pretzel(-3, -1, 2 + 2 * n).unwrap());
            let nc = base.crossing_count();
            let mut found: Vec<(String, PlanarDiagram, BigradedDims)> = Vec::new();
            let mut seen: Vec<BigradedDims> = Vec::new();
            for c1 in 0..nc {
                for s1 in 0..4usize {
                    for c2 in 0..nc {
                        for s2 in 0..4usize {
                            for (cand, cnew) in pinch(&base, (c1, s1), (c2, s2), 0) {
                                if cand.components() != 1 {
                                    continue;
                                }
                                let (p, q, _) = match cand.grading_shifts(cnew) {
                                    Ok(v) => v,
                                    Err(_) => continue,
                                };
                                if p != -1 {
                                    continue;
                                }
                                if kh(&cand) != want_r {
                                    continue;
                                }
                                let _ = q;
                                let r1 = cand.resolve(cnew, 1).unwrap();
                                if r1.components() != 2 {
                                    continue;
                                }
                                let t1 = kh(&r1);
                                let kq = collapse(&t1).kappa();
                                let desc = format!("pinch({c1},{s1};{c2},{s2})");
                                if !seen.contains(&t1) {
                                    seen.push(t1.clone());
                                    println!(
                                        "n={n}: {desc} cnew={cnew} (p,q)=({p},{q}) Q kappa={kq:?} [new table #{}]",
                                        seen.len()
                                    );
                                    found.push((desc, r1, t1));
                                }
                            }
                        }
                    }
                }
            }
            println!("n={n}: {} distinct Q tables", found.len());
            qs.push(found);
        }
        println!("--- Q chain check ---");
        for n in 1..3usize {
            for (desc, qd, _) in &qs[n] {
                for cc in 0..qd.crossing_count() {
                    if qd.sign(cc) >= 0 {
                        continue;
                    }
                    let r1 = qd.resolve(cc, 1).unwrap();
                    if r1.components() != 3 {
                        continue;
                    }
                    let k1 = collapse(&kh(&r1)).kappa();
                    if k1 != Some(-7) {
                        continue;
                    }
                    let r0 = qd.resolve(cc, 0).unwrap();
                    if r0.components() != 2 {
                        continue;
                    }
                    let t0 = kh(&r0);
                    let t0r = if r0.components() - r0.free_loops() >= 2 {
                        kh(&r0.reversed(1))
                    } else {
                        t0.clone()
                    };
                    for (pdesc, _, ptab) in &qs[n - 1] {
                        if *ptab == t0 || *ptab == t0r {
                            let (p, q, _) = qd.grading_shifts(cc).unwrap();
                            println!(
                                "n={n}: Q[{desc}] cc={cc} (p,q)=({p},{q}) res1kap=-7 res0==Q{}[{pdesc}]",
                                n - 1
                            );
                        }
                    }
                }
            }
        }
        return;
    }

    if stage == "knt23" {
        // Are the section-2.2 knots 2-bridge? Match kh tables of K^0_{n,2},
        // R_n, K^4_{n-1,2}, K_n against double-twist closures B(a,b) =
        // closure(sigma1^a sigma2^b), a,b odd.
        use tbwb_core::diagram::{braid_closure, pretzel};
        let bw = |a: i32, b: i32| -> Option<PlanarDiagram> {
            let mut w: Vec<i32> = Vec::new();
            for _ in 0..a.unsigned_abs() {
                w.push(if a > 0 { 1 } else { -1 });
            }
            for _ in 0..b.unsigned_abs() {
                w.push(if b > 0 { 2 } else { -2 });
            }
            braid_closure(3, &w).ok()
        };
        let mut twists: Vec<((i32, i32), BigradedDims)> = Vec::new();
        for a in (-13i32..=13).step_by(2) {
            for b in (-13i32..=13).step_by(2) {
                if a.unsigned_abs() + b.unsigned_abs() > 20 {
                    continue;
                }
                if let Some(d) = bw(a, b) {
                    if d.components() == 1 {
                        twists.push(((a, b), kh(&d)));
                    }
                }
            }
        }
        let plat4 = |blocks: &[(usize, i32)]| -> Option<PlanarDiagram> {
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(2);
            for &(p, k) in blocks {
                m.twist(p, k);
            }
            m.cap(2);
            m.cap(0);
            m.finish(&[], 0).ok()
        };
        for a in -9i32..=9 {
            for b in -9i32..=9 {
                if a == 0 {
                    continue;
                }
                if b == 0 {
                    if let Some(d) = plat4(&[(1, a)]) {
                        if d.components() == 1 {
                            twists.push(((a, 10000), kh(&d)));
                        }
                    }
                    continue;
                }
                for c in -9i32..=9 {
                    if a.unsigned_abs() + b.unsigned_abs() + c.unsigned_abs() > 15 {
                        continue;
                    }
                    let blocks: Vec<(usize, i32)> = if c == 0 {
                        vec![(1, a), (0, b)]
                    } else {
                        vec![(1, a), (0, b), (1, c)]
                    };
                    if let Some(d) = plat4(&blocks) {
                        if d.components() == 1 {
                            twists.push(((a, 1000 * b + c), kh(&d)));
                        }
                    }
                }
            }
        }
        println!("{} plat knots", twists.len());
        for n in 0..3i32 {
            let jobs = [
                (format!("K0[{n},2]=P(-3,-1,{})", 3 + 2 * n), pretzel(-3, -1, 3 + 2 * n)),
                (format!("R_{n}=P(-3,-1,{})", 2 + 2 * n), pretzel(-3, -1, 2 + 2 * n)),
                (format!("K4[{},2]=P(-3,3,{})", n - 1, 1 + 2 * n), pretzel(-3, 3, 1 + 2 * n)),
                (format!("K_{n}=P(-3,3,{})", n - 2), pretzel(-3, 3, n - 2)),
            ];
            for (name, d) in jobs {
                let t = kh(&d.unwrap());
                let hits: Vec<(i32, i32)> =
                    twists.iter().filter(|(_, tt)| *tt == t).map(|(ab, _)| *ab).collect();
                println!("{name}: B hits {hits:?}");
            }
        }
        return;
    }

    if stage == "knt24" {
        // Census every <=3-block plat presentation of R_n for the marked
        // crossing: (p,q)=(-1,5), res0 1-comp == K^4_{n-1,2}, res1 2-comp Q_n.
        use tbwb_core::diagram::pretzel;
        let plat4 = |blocks: &[(usize, i32)]| -> Option<PlanarDiagram> {
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(2);
            for &(p, k) in blocks {
                m.twist(p, k);
            }
            m.cap(2);
            m.cap(0);
            m.finish(&[], 0).ok()
        };
        let mut qs: Vec<Vec<(String, PlanarDiagram, BigradedDims)>> = Vec::new();
        for n in 0..3i32 {
            let want_r = kh(&pretzel(-3, -1, 2 + 2 * n).unwrap());
            let want_k4 = kh(&pretzel(-3, 3, 1 + 2 * n).unwrap());
            let mut found: Vec<(String, PlanarDiagram, BigradedDims)> = Vec::new();
            let mut seen: Vec<BigradedDims> = Vec::new();
            for a in -9i32..=9 {
                for b in -9i32..=9 {
                    for c in -9i32..=9 {
                        if a.unsigned_abs() + b.unsigned_abs() + c.unsigned_abs() > 15 || a == 0 {
                            continue;
                        }
                        if (b == 0 && c != 0) || (c != 0 && b == 0) {
                            continue;
                        }
                        let blocks: Vec<(usize, i32)> = if b == 0 {
                            vec![(1, a)]
                        } else if c == 0 {
                            vec![(1, a), (0, b)]
                        } else {
                            vec![(1, a), (0, b), (1, c)]
                        };
                        let d = match plat4(&blocks) {
                            Some(d) if d.components() == 1 => d,
                            _ => continue,
                        };
                        if kh(&d) != want_r {
                            continue;
                        }
                        for cx in 0..d.crossing_count() {
                            let (p, q, _) = d.grading_shifts(cx).unwrap();
                            for side in 0..2u8 {
                                let rk = d.resolve(cx, side).unwrap();
                                if rk.components() != 1 || kh(&rk) != want_k4 {
                                    continue;
                                }
                                let ro = d.resolve(cx, 1 - side).unwrap();
                                if ro.components() != 2 {
                                    continue;
                                }
                                let t1 = kh(&ro);
                                let kq = collapse(&t1).kappa();
                                if !seen.contains(&t1) {
                                    seen.push(t1.clone());
                                    println!(
                                        "n={n}: C({a},{b},{c}) cx={cx} side{side}==K4 (p,q)=({p},{q}) Q kappa={kq:?} [table #{}]",
                                        seen.len()
                                    );
                                    found.push((format!("C({a},{b},{c})@{cx}"), ro, t1));
                                }
                            }
                        }
                    }
                }
            }
            println!("n={n}: {} distinct Q tables", found.len());
            qs.push(found);
        }
        println!("--- Q chain check ---");
        for n in 1..3usize {
            for (desc, qd, _) in &qs[n] {
                for cc in 0..qd.crossing_count() {
                    if qd.sign(cc) >= 0 {
                        continue;
                    }
                    let r1 = qd.resolve(cc, 1).unwrap();
                    if r1.components() != 3 {
                        continue;
                    }
                    let k1 = collapse(&kh(&r1)).kappa();
                    if k1 != Some(-7) {
                        continue;
                    }
                    let r0 = qd.resolve(cc, 0).unwrap();
                    if r0.components() != 2 {
                        continue;
                    }
                    let t0 = kh(&r0);
                    let t0r = if r0.components() - r0.free_loops() >= 2 {
                        kh(&r0.reversed(1))
                    } else {
                        t0.clone()
                    };
                    for (pdesc, _, ptab) in &qs[n - 1] {
                        if *ptab == t0 || *ptab == t0r {
                            let (p, q, _) = qd.grading_shifts(cc).unwrap();
                            println!(
                                "n={n}: Q[{desc}] cc={cc} (p,q)=({p},{q}) res0==Q{}[{pdesc}]",
                                n - 1
                            );
                        }
                    }
                }
            }
        }
        return;
    }

    if stage == "knt25" {
        // A: is Q_0 the antiparallel T(-4,2)? B: orientation-aware bins of
        // 2-comp plat links C(a,b,c) + battery chain, n=0..3.
        use tbwb_core::diagram::{braid_closure, build_family, parse_family};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        let b14 = braid_closure(3, &[1, -2, -2, -2, -2]).unwrap();
        println!(
            "B(1,-4): comps={} kappa(o0)={:?} kappa(o1)={:?} o1==T42 {}",
            b14.components(),
            collapse(&kh(&b14)).kappa(),
            collapse(&kh(&b14.reversed(1))).kappa(),
            kh(&b14.reversed(1)) == t42
        );
        let plat4 = |blocks: &[(usize, i32)]| -> Option<PlanarDiagram> {
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(2);
            for &(p, k) in blocks {
                m.twist(p, k);
            }
            m.cap(2);
            m.cap(0);
            m.finish(&[], 0).ok()
        };
        let mut bins: Vec<Vec<(String, PlanarDiagram, BigradedDims)>> = vec![Vec::new(); 4];
        for a in -9i32..=9 {
            for b in -9i32..=9 {
                for c in -9i32..=9 {
                    if a.unsigned_abs() + b.unsigned_abs() + c.unsigned_abs() > 14 || a == 0 {
                        continue;
                    }
                    if c != 0 && b == 0 {
                        continue;
                    }
                    let blocks: Vec<(usize, i32)> = if b == 0 {
                        vec![(1, a)]
                    } else if c == 0 {
                        vec![(1, a), (0, b)]
                    } else {
                        vec![(1, a), (0, b), (1, c)]
                    };
                    let d = match plat4(&blocks) {
                        Some(d) if d.components() == 2 => d,
                        _ => continue,
                    };
                    for o in 0..2 {
                        if o == 1 && d.components() - d.free_loops() < 2 {
                            continue;
                        }
                        let dd = if o == 0 { d.clone() } else { d.reversed(1) };
                        let tab = kh(&dd);
                        if let Some(kap) = collapse(&tab).kappa() {
                            if (-11..=-8).contains(&kap) {
                                bins[(-8 - kap) as usize]
                                    .push((format!("C({a},{b},{c})/o{o}"), dd, tab));
                            }
                        }
                    }
                }
            }
        }
        for (n, v) in bins.iter().enumerate() {
            println!("bin n={n}: {} candidates", v.len());
        }
        for n in 1..4usize {
            println!("--- batteries n={n} ---");
            let mut lines: Vec<String> = Vec::new();
            for (desc, d, _) in &bins[n] {
                for c in 0..d.crossing_count() {
                    if d.sign(c) >= 0 {
                        continue;
                    }
                    let r1 = d.resolve(c, 1).unwrap();
                    if r1.components() != 3 {
                        continue;
                    }
                    if collapse(&kh(&r1)).kappa() != Some(-7) {
                        continue;
                    }
                    let r0 = d.resolve(c, 0).unwrap();
                    if r0.components() != 2 {
                        continue;
                    }
                    let t0 = kh(&r0);
                    let t0r = if r0.components() - r0.free_loops() >= 2 {
                        kh(&r0.reversed(1))
                    } else {
                        t0.clone()
                    };
                    let matched: Vec<&str> = bins[n - 1]
                        .iter()
                        .filter(|(_, _, pt)| *pt == t0 || *pt == t0r)
                        .map(|(pd, _, _)| pd.as_str())
                        .collect();
                    if !matched.is_empty() {
                        let (p, q, _) = d.grading_shifts(c).unwrap();
                        lines.push(format!(
                            "n={n}: {desc} c={c} (p,q)=({p},{q}) res0 in {:?}..",
                            &matched[..matched.len().min(3)]
                        ));
                    }
                }
            }
            lines.dedup();
            for l in lines.iter().take(12) {
                println!("{l}");
            }
            println!("  ({} battery lines)", lines.len());
        }
        return;
    }

    if stage == "knt26" {
        // Climb the Q ladder upward by pinching: Q_{n+1} = Q_n-PD + one
        // crossing cnew with res0 == Q_n, res1 3-comp kappa=-7, kappa=-9-n.
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::pretzel;
        let mut level: Vec<(String, PlanarDiagram)> = vec![
            ("P(-3,-2,-2)".into(), pretzel(-3, -2, -2).unwrap()),
            ("P(-5,-4,0)".into(), pretzel(-5, -4, 0).unwrap()),
            ("P(-7,-6,2)".into(), pretzel(-7, -6, 2).unwrap()),
        ];
        for n in 2..4i32 {
            let mut seen: Vec<BigradedDims> = Vec::new();
            let mut next: Vec<(String, PlanarDiagram)> = Vec::new();
            for (desc, d) in &level {
                let nc = d.crossing_count();
                for c1 in 0..nc {
                    for s1 in 0..4usize {
                        for c2 in 0..nc {
                            for s2 in 0..4usize {
                                for (cand, cnew) in pinch(d, (c1, s1), (c2, s2), 0) {
                                    if cand.components() != 2 || cand.free_loops() > 0 {
                                        continue;
                                    }
                                    if cand.sign(cnew) >= 0 {
                                        continue;
                                    }
                                    let tab = kh(&cand);
                                    if collapse(&tab).kappa() != Some(-8 - n) {
                                        continue;
                                    }
                                    let r1 = cand.resolve(cnew, 1).unwrap();
                                    if r1.components() != 3 {
                                        continue;
                                    }
                                    if collapse(&kh(&r1)).kappa() != Some(-7) {
                                        continue;
                                    }
                                    let (p, q, _) = cand.grading_shifts(cnew).unwrap();
                                    if !seen.contains(&tab) {
                                        seen.push(tab.clone());
                                        println!(
                                            "n={n}: from {desc} pinch({c1},{s1};{c2},{s2}) (p,q)=({p},{q}) {}c table#{}",
                                            cand.crossing_count(),
                                            seen.len()
                                        );
                                        next.push((
                                            format!("{desc}+({c1},{s1};{c2},{s2})"),
                                            cand,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            println!("n={n}: {} distinct tables", next.len());
            if next.is_empty() {
                return;
            }
            level = next;
        }
        return;
    }

    if stage == "knt27" {
        // Un-resolve Q_n candidates: pinch(Q, ident=1) should give the R_n
        // knot with (p,q)=(-1,5) at the new crossing and res0 == K^4_{n-1,2}.
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::{braid_closure, pretzel};
        let q2a = {
            let base = pretzel(-3, -2, -2).unwrap();
            pinch(&base, (0, 3), (1, 3), 0)
                .into_iter()
                .find(|(d, _)| d.components() == 2 && d.free_loops() == 0)
                .unwrap()
                .0
        };
        let q2b = {
            let base = pretzel(-5, -4, 0).unwrap();
            pinch(&base, (0, 0), (4, 0), 0)
                .into_iter()
                .find(|(d, _)| d.components() == 2 && d.free_loops() == 0)
                .unwrap()
                .0
        };
        let jobs: Vec<(i32, String, PlanarDiagram)> = vec![
            (0, "B(1,-4)".into(), braid_closure(3, &[1, -2, -2, -2, -2]).unwrap()),
            (0, "P(-2,-1,2)".into(), pretzel(-2, -1, 2).unwrap()),
            (0, "P(-4,-1,0)".into(), pretzel(-4, -1, 0).unwrap()),
            (1, "P(-3,-2,-2)".into(), pretzel(-3, -2, -2).unwrap()),
            (1, "P(-5,-4,0)".into(), pretzel(-5, -4, 0).unwrap()),
            (2, "Q2a".into(), q2a),
            (2, "Q2b".into(), q2b),
        ];
        for (n, desc, d) in &jobs {
            let want_r = kh(&pretzel(-3, -1, 2 + 2 * n).unwrap());
            let want_k4 = kh(&pretzel(-3, 3, 1 + 2 * n).unwrap());
            let nc = d.crossing_count();
            let mut hits = 0;
            for c1 in 0..nc {
                for s1 in 0..4usize {
                    for c2 in 0..nc {
                        for s2 in 0..4usize {
                            for (cand, cnew) in pinch(d, (c1, s1), (c2, s2), 1) {
                                if cand.components() != 1 {
                                    continue;
                                }
                                if kh(&cand) != want_r {
                                    continue;
                                }
                                let (p, q, _) = cand.grading_shifts(cnew).unwrap();
                                let r0 = cand.resolve(cnew, 0).unwrap();
                                let k4ok = r0.components() == 1 && kh(&r0) == want_k4;
                                println!(
                                    "n={n} {desc}: pinch({c1},{s1};{c2},{s2}) kh==R ok (p,q)=({p},{q}) res0==K4 {k4ok}"
                                );
                                hits += 1;
                                if hits >= 6 {
                                    break;
                                }
                            }
                            if hits >= 6 {
                                break;
                            }
                        }
                        if hits >= 6 {
                            break;
                        }
                    }
                    if hits >= 6 {
                        break;
                    }
                }
                if hits >= 6 {
                    break;
                }
            }
            println!("n={n} {desc}: {hits} R-unresolve hits");
        }
        return;
    }

    if stage == "knt28" {
        // Pinch every known presentation of K^4_{-1,2} ~ P(-3,3,1) with
        // ident=0 hunting cand == R_0 knot and (p,q)=(-1,5) at the new
        // crossing; also report kappa sanity of the K4 pretzels.
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::pretzel;
        for m in [1i32, 3, 5, 7] {
            let d = pretzel(-3, 3, m).unwrap();
            println!("kappa(P(-3,3,{m})) = {:?}", collapse(&kh(&d)).kappa());
        }
        let plat4 = |blocks: &[(usize, i32)]| -> Option<PlanarDiagram> {
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(2);
            for &(p, k) in blocks {
                m.twist(p, k);
            }
            m.cap(2);
            m.cap(0);
            m.finish(&[], 0).ok()
        };
        let mut bases: Vec<(String, PlanarDiagram)> = Vec::new();
        for perm in [
            (-3, 3, 1),
            (-3, 1, 3),
            (3, -3, 1),
            (3, 1, -3),
            (1, -3, 3),
            (1, 3, -3),
        ] {
            bases.push((
                format!("P{perm:?}"),
                pretzel(perm.0, perm.1, perm.2).unwrap(),
            ));
        }
        for blocks in [
            [(-3, -1, 3)],
            [(-2, 3, -1)],
            [(-2, 5, 1)],
            [(-1, -3, 4)],
            [(-1, 1, 5)],
            [(-1, 3, -2)],
            [(-1, 4, 2)],
            [(1, -1, 4)],
            [(1, 3, 5)],
            [(1, 5, -2)],
            [(1, 6, 2)],
            [(2, 4, -1)],
            [(2, 6, 1)],
            [(3, -1, -3)],
            [(3, 1, 6)],
            [(4, -3, 1)],
            [(4, -1, 1)],
            [(5, 1, -1)],
            [(5, 3, 1)],
            [(6, 1, 3)],
        ] {
            let (a, b, c) = (blocks[0].0, blocks[0].1, blocks[0].2);
            if let Some(d) = plat4(&[(1, a), (0, b), (1, c)]) {
                if d.components() == 1 {
                    bases.push((format!("C({a},{b},{c})"), d));
                }
            }
        }
        let want_r = kh(&pretzel(-3, -1, 2).unwrap());
        let want_k4 = kh(&pretzel(-3, 3, 1).unwrap());
        for (desc, base) in &bases {
            if kh(base) != want_k4 {
                println!("{desc}: NOT K4, skipping");
                continue;
            }
            let nc = base.crossing_count();
            let mut best: Vec<String> = Vec::new();
            for c1 in 0..nc {
                for s1 in 0..4usize {
                    for c2 in 0..nc {
                        for s2 in 0..4usize {
                            for (cand, cnew) in pinch(base, (c1, s1), (c2, s2), 0) {
                                if cand.components() != 1 {
                                    continue;
                                }
                                if kh(&cand) != want_r {
                                    continue;
                                }
                                let (p, q, _) = cand.grading_shifts(cnew).unwrap();
                                best.push(format!(
                                    "  pinch({c1},{s1};{c2},{s2}) (p,q)=({p},{q})"
                                ));
                            }
                        }
                    }
                }
            }
            best.sort();
            best.dedup();
            println!("{desc}: {} R-pinches", best.len());
            for b in best.iter().take(8) {
                println!("{b}");
            }
        }
        return;
    }

    if stage == "knt29" {
        // Two-step pinch: mid = knot-preserving pinch of a K^4_{-1,2} base
        // (kh unchanged), then cand = pinch(mid) with cnew the marked
        // crossing: sign -1, w(cand) = w(mid)-5, kh(cand) == R_0,
        // (p,q)=(-1,5). Q_0 := res1, compared against antiparallel T(-4,2).
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::{braid_closure, pretzel};
        let want_r = kh(&pretzel(-3, -1, 2).unwrap());
        let want_k4 = kh(&pretzel(-3, 3, 1).unwrap());
        let q0 = kh(&braid_closure(3, &[1, -2, -2, -2, -2]).unwrap());
        let plat4 = |blocks: &[(usize, i32)]| -> Option<PlanarDiagram> {
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(2);
            for &(p, k) in blocks {
                m.twist(p, k);
            }
            m.cap(2);
            m.cap(0);
            m.finish(&[], 0).ok()
        };
        let mut bases: Vec<(String, PlanarDiagram)> = Vec::new();
        for perm in [(-3, 3, 1), (-3, 1, 3), (3, -3, 1), (3, 1, -3), (1, -3, 3), (1, 3, -3)] {
            bases.push((format!("P{perm:?}"), pretzel(perm.0, perm.1, perm.2).unwrap()));
        }
        for (a, b, c) in [(-3, -1, 3), (-2, 3, -1), (-1, 1, 5), (1, -1, 4), (3, -1, -3), (4, -1, 1)]
        {
            if let Some(d) = plat4(&[(1, a), (0, b), (1, c)]) {
                if d.components() == 1 && kh(&d) == want_k4 {
                    bases.push((format!("C({a},{b},{c})"), d));
                }
            }
        }
        let mut total = 0usize;
        for (desc, base) in &bases {
            let nc = base.crossing_count();
            let mut mids: Vec<(String, PlanarDiagram)> = Vec::new();
            for c1 in 0..nc {
                for s1 in 0..4usize {
                    for c2 in 0..nc {
                        for s2 in 0..4usize {
                            for ident in 0..2u8 {
                                for (mid, _) in pinch(base, (c1, s1), (c2, s2), ident) {
                                    if mid.components() != 1 {
                                        continue;
                                    }
                                    if kh(&mid) == want_k4 {
                                        mids.push((
                                            format!("{desc}+i{ident}({c1},{s1};{c2},{s2})"),
                                            mid,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            println!("{desc}: {} knot-preserving pinches", mids.len());
            for (mdesc, mid) in &mids {
                let wm = mid.writhe();
                let mc = mid.crossing_count();
                for c1 in 0..mc {
                    for s1 in 0..4usize {
                        for c2 in 0..mc {
                            for s2 in 0..4usize {
                                for (cand, cnew) in pinch(mid, (c1, s1), (c2, s2), 0) {
                                    if cand.components() != 1
                                        || cand.sign(cnew) >= 0
                                        || cand.writhe() != wm - 5
                                    {
                                        continue;
                                    }
                                    if kh(&cand) != want_r {
                                        continue;
                                    }
                                    let (p, q, _) = cand.grading_shifts(cnew).unwrap();
                                    if (p, q) != (-1, 5) {
                                        continue;
                                    }
                                    let r1 = cand.resolve(cnew, 1).unwrap();
                                    if r1.components() != 2 {
                                        continue;
                                    }
                                    let t1 = kh(&r1);
                                    let t1r = if r1.components() - r1.free_loops() >= 2 {
                                        kh(&r1.reversed(1))
                                    } else {
                                        t1.clone()
                                    };
                                    println!(
                                        "HIT {mdesc} + pinch({c1},{s1};{c2},{s2}): res1 kappa={:?} ==Q0 {} (rev {})",
                                        collapse(&t1).kappa(),
                                        t1 == q0,
                                        t1r == q0
                                    );
                                    total += 1;
                                }
                            }
                        }
                    }
                }
                if total >= 12 {
                    break;
                }
            }
            if total >= 12 {
                break;
            }
        }
        println!("total hits {total}");
        return;
    }

    if stage == "knt30" {
        // Finger-then-pinch: mid = R2 finger on a K^4_{-1,2} base (kh
        // checked), cand = pinch(mid) with the marked crossing: w(cand) =
        // w(mid)-5, kh == R_0, (p,q)=(-1,5); Q_0 := res1 vs antiparallel
        // T(-4,2).
        use tbwb_core::diagram::annulus::pinch;
        use tbwb_core::diagram::{braid_closure, pretzel};
        let want_r = kh(&pretzel(-3, -1, 2).unwrap());
        let want_k4 = kh(&pretzel(-3, 3, 1).unwrap());
        let q0 = kh(&braid_closure(3, &[1, -2, -2, -2, -2]).unwrap());
        let plat4 = |blocks: &[(usize, i32)]| -> Option<PlanarDiagram> {
            let mut m = MorseBuilder::new();
            m.cup(0);
            m.cup(2);
            for &(p, k) in blocks {
                m.twist(p, k);
            }
            m.cap(2);
            m.cap(0);
            m.finish(&[], 0).ok()
        };
        let mut bases: Vec<(String, PlanarDiagram)> = Vec::new();
        for perm in [(-3, 3, 1), (3, -3, 1), (1, -3, 3)] {
            bases.push((format!("P{perm:?}"), pretzel(perm.0, perm.1, perm.2).unwrap()));
        }
        for (a, b, c) in [(-3, -1, 3), (-2, 3, -1), (1, -1, 4), (4, -1, 1)] {
            if let Some(d) = plat4(&[(1, a), (0, b), (1, c)]) {
                if d.components() == 1 && kh(&d) == want_k4 {
                    bases.push((format!("C({a},{b},{c})"), d));
                }
            }
        }
        let mut total = 0usize;
        for (desc, base) in &bases {
            let faces = trace_faces(&base.crossings().to_vec()).unwrap();
            let mut mids: Vec<(String, PlanarDiagram)> = Vec::new();
            for f in &faces {
                for &da in f {
                    for &db in f {
                        if da == db {
                            continue;
                        }
                        for (i, mid) in add_finger(base, da, db).into_iter().enumerate() {
                            if kh(&mid) == want_k4 {
                                mids.push((format!("{desc}+f({da:?},{db:?})#{i}"), mid));
                            }
                        }
                    }
                }
            }
            println!("{desc}: {} kh-preserving fingers", mids.len());
            for (mdesc, mid) in &mids {
                let wm = mid.writhe();
                let mc = mid.crossing_count();
                for c1 in 0..mc {
                    for s1 in 0..4usize {
                        for c2 in 0..mc {
                            for s2 in 0..4usize {
                                for (cand, cnew) in pinch(mid, (c1, s1), (c2, s2), 0) {
                                    if cand.components() != 1
                                        || cand.sign(cnew) >= 0
                                        || cand.writhe() != wm - 5
                                    {
                                        continue;
                                    }
                                    if kh(&cand) != want_r {
                                        continue;
                                    }
                                    let (p, q, _) = cand.grading_shifts(cnew).unwrap();
                                    if (p, q) != (-1, 5) {
                                        continue;
                                    }
                                    let r1 = cand.resolve(cnew, 1).unwrap();
                                    if r1.components() != 2 {
                                        continue;
                                    }
                                    let t1 = kh(&r1);
                                    let t1r = if r1.components() - r1.free_loops() >= 2 {
                                        kh(&r1.reversed(1))
                                    } else {
                                        t1.clone()
                                    };
                                    println!(
                                        "HIT {mdesc} + pinch({c1},{s1};{c2},{s2}): res1 kappa={:?} ==Q0 {} (rev {})",
                                        collapse(&t1).kappa(),
                                        t1 == q0,
                                        t1r == q0
                                    );
                                    total += 1;
                                }
                            }
                        }
                    }
                }
                if total >= 8 {
                    break;
                }
            }
            if total >= 8 {
                break;
            }
        }
        println!("total hits {total}");
        return;
    }

    if stage == "knt31" {
        // Census finger variants of R_0 presentations for the marked
        // crossing: (p,q)=(-1,5), res0 1-comp kh == K^4_{-1,2}, res1 2-comp.
        use tbwb_core::diagram::{braid_closure, pretzel};
        let want_k4 = kh(&pretzel(-3, 3, 1).unwrap());
        let want_r = kh(&pretzel(-3, -1, 2).unwrap());
        let q0 = kh(&braid_closure(3, &[1, -2, -2, -2, -2]).unwrap());
        let child = pretzel(-3, -1, 3).unwrap().resolve(4, 0).unwrap();
        let bases: Vec<(String, PlanarDiagram)> = vec![
            ("B(-5)".into(), braid_closure(3, &[-1, -1, -1, -1, -1, -2]).unwrap()),
            ("P(-3,-1,2)".into(), pretzel(-3, -1, 2).unwrap()),
            ("child".into(), child),
        ];
        let mut total = 0usize;
        for depth in 1..=2usize {
            println!("--- depth {depth} ---");
            for (desc, base) in &bases {
                if kh(base) != want_r {
                    println!("{desc}: not R_0!");
                    continue;
                }
                let mut level: Vec<(String, PlanarDiagram)> =
                    vec![(desc.clone(), base.clone())];
                for _ in 0..depth {
                    let mut next: Vec<(String, PlanarDiagram)> = Vec::new();
                    for (md, mid) in &level {
                        let faces = trace_faces(&mid.crossings().to_vec()).unwrap();
                        for f in &faces {
                            for &da in f {
                                for &db in f {
                                    if da == db {
                                        continue;
                                    }
                                    for (i, nd) in
                                        add_finger(mid, da, db).into_iter().enumerate()
                                    {
                                        next.push((format!("{md}+f({da:?},{db:?})#{i}"), nd));
                                    }
                                }
                            }
                        }
                    }
                    level = next;
                }
                let mut hits = 0usize;
                for (md, mid) in &level {
                    if depth > 1 && kh(mid) != want_r {
                        continue;
                    }
                    for c in 0..mid.crossing_count() {
                        let (p, q, _) = mid.grading_shifts(c).unwrap();
                        if (p, q) != (-1, 5) {
                            continue;
                        }
                        let r0 = mid.resolve(c, 0).unwrap();
                        if r0.components() != 1 || kh(&r0) != want_k4 {
                            continue;
                        }
                        let r1 = mid.resolve(c, 1).unwrap();
                        if r1.components() != 2 {
                            continue;
                        }
                        let t1 = kh(&r1);
                        let t1r = if r1.components() - r1.free_loops() >= 2 {
                            kh(&r1.reversed(1))
                        } else {
                            t1.clone()
                        };
                        println!(
                            "HIT {md} c={c}: res1 kappa={:?} ==Q0 {} (rev {})",
                            collapse(&t1).kappa(),
                            t1 == q0,
                            t1r == q0
                        );
                        hits += 1;
                        total += 1;
                    }
                    if total >= 6 {
                        break;
                    }
                }
                println!("{desc} depth{depth}: {} variants, {hits} hits", level.len());
                if total >= 6 {
                    break;
                }
            }
            if total > 0 {
                break;
            }
        }
        return;
    }

    if stage == "knt18" {
        // Hunt Q_n among 2-component pretzels: kappa = -8-n plus the
        // (-1,1) ladder battery res0 == Q_{n-1}, res1 3-comp kappa=-7.
        use tbwb_core::diagram::pretzel;
        let mut by_n: Vec<Vec<(i32, i32, i32)>> = vec![Vec::new(); 4];
        for a in -9i32..=9 {
            for b in a..=9 {
                for c in b..=9 {
                    if a.unsigned_abs() + b.unsigned_abs() + c.unsigned_abs() > 16 {
                        continue;
                    }
                    if let Ok(d) = pretzel(a, b, c) {
                        if d.components() != 2 {
                            continue;
                        }
                        if let Some(kap) = collapse(&kh(&d)).kappa() {
                            if (-11..=-8).contains(&kap) {
                                by_n[(-8 - kap) as usize].push((a, b, c));
                            }
                        }
                    }
                }
            }
        }
        for (n, v) in by_n.iter().enumerate() {
            println!("n={n} (kappa={}): {v:?}", -8 - n as i32);
        }
        return;
    }

    if stage == "knt17" {
        // Verify the unified pretzel law K^s_{n,t} = P(t-5, s-1, 3+2n).
        use tbwb_core::diagram::{build_family, parse_family, pretzel};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        let sig = [0i32, -5, -2, -7, -4];
        println!("--- A: kappa grid over (n,t,s) ---");
        let mut bad = 0;
        for n in 0..3i32 {
            for t in [2i32, 0, -2, -4] {
                for s in 0..5i32 {
                    let d = pretzel(t - 5, s - 1, 3 + 2 * n).unwrap();
                    if d.components() != 1 {
                        println!("n={n} t={t} s={s}: NOT A KNOT");
                        bad += 1;
                        continue;
                    }
                    let got = collapse(&kh(&d)).kappa();
                    let want = -3 - 2 * n + sig[s as usize];
                    if got != Some(want) {
                        println!("n={n} t={t} s={s}: kappa {got:?} want {want}");
                        bad += 1;
                    }
                }
            }
        }
        println!("A: {bad} mismatches");
        println!("--- B: t=4 gives K_n ---");
        for n in 0..5i32 {
            let d = pretzel(-1, -1, 3 + 2 * n).unwrap();
            println!("n={n}: kh(P(-1,-1,{})) == kn_table: {}", 3 + 2 * n, kh(&d) == kn_table(n));
        }
        println!("--- C: R_n battery ---");
        for n in 0..3i32 {
            let d = pretzel(-3, -1, 2 + 2 * n).unwrap();
            let want_k4 = kh(&pretzel(-3, 3, 1 + 2 * n).unwrap());
            let mut found = false;
            for c in 0..d.crossing_count() {
                let (p, q, _) = d.grading_shifts(c).unwrap();
                if (p, q) != (-1, 5) {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                if r1.components() != 2 {
                    continue;
                }
                let kq = collapse(&kh(&r1)).kappa();
                let r0 = d.resolve(c, 0).unwrap();
                let k4ok = kh(&r0) == want_k4;
                println!("n={n}: c={c} res1(2c) kappa={kq:?} (want {}) res0==P(-3,3,{}): {k4ok}", -8 - n, 1 + 2 * n);
                found = true;
                break;
            }
            if !found {
                println!("n={n}: NO (-1,5) battery on R_n");
            }
        }
        println!("--- D: K0_n2 battery ---");
        for n in 0..3i32 {
            let d = pretzel(-3, -1, 3 + 2 * n).unwrap();
            let want_r = kh(&pretzel(-3, -1, 2 + 2 * n).unwrap());
            let mut found = false;
            for c in 0..d.crossing_count() {
                let (p, q, _) = d.grading_shifts(c).unwrap();
                if (p, q) != (-1, -7) {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                if r1.components() != 2 || kh(&r1) != t42 {
                    continue;
                }
                let r0 = d.resolve(c, 0).unwrap();
                println!("n={n}: c={c} res1==T42 ok, res0==R_n: {}", kh(&r0) == want_r);
                found = true;
                break;
            }
            if !found {
                println!("n={n}: NO (-1,-7)/T42 battery on K0_n2");
            }
        }
        println!("--- E: t-step battery on K0_nt ---");
        for n in 0..2i32 {
            for t in [2i32, 0] {
                let d = pretzel(t - 5, -1, 3 + 2 * n).unwrap();
                let want_k4 = kh(&pretzel(t - 9, 3, 3 + 2 * n).unwrap());
                let mut found = false;
                for c in 0..d.crossing_count() {
                    let (p, q, _) = d.grading_shifts(c).unwrap();
                    if (p, q) != (1, -1) {
                        continue;
                    }
                    let r1 = d.resolve(c, 1).unwrap();
                    if r1.components() != 1 || kh(&r1) != want_k4 {
                        continue;
                    }
                    let r0 = d.resolve(c, 0).unwrap();
                    if r0.components() != 1 {
                        continue;
                    }
                    let kH = collapse(&kh(&r0)).kappa();
                    println!("n={n} t={t}: c={c} res1==K4[n,t-4] ok, res0 kappa={kH:?} (want {})", -2 * n - 6);
                    found = true;
                    break;
                }
                if !found {
                    println!("n={n} t={t}: NO (1,-1) t-battery");
                }
            }
        }
        return;
    }

    if stage == "knt16" {
        // Match the pinned family tables against 3-pretzels.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family, pretzel};
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let build = |k: i32, kr: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        let mut jobs: Vec<(String, BigradedDims)> = Vec::new();
        for (name, k, kr) in [
            ("K0[0,2]", 4, -4),
            ("K0[1,2]", 6, -4),
            ("K0[0,0]", 4, -6),
            ("K0[0,-2]", 4, -8),
            ("R_0", 3, -4),
            ("R_1", 5, -4),
        ] {
            jobs.push((name.into(), kh(&build(k, kr).unwrap())));
        }
        let d = build(4, -6).unwrap();
        'k1: for c in 0..d.crossing_count() {
            let (p, q, _) = d.grading_shifts(c).unwrap();
            if (p, q) == (5, -1) {
                let r0 = d.resolve(c, 0).unwrap();
                if r0.components() == 2 && kh(&r0) == hplus {
                    jobs.push(("K1[0,0]".into(), kh(&d.resolve(c, 1).unwrap())));
                    break 'k1;
                }
            }
        }
        for (name, want) in &jobs {
            let mut hits: Vec<(i32, i32, i32)> = Vec::new();
            for a in -9i32..=9 {
                for b in a..=9 {
                    for c in b..=9 {
                        if let Ok(d) = pretzel(a, b, c) {
                            if d.components() == 1 && kh(&d) == *want {
                                hits.push((a, b, c));
                            }
                        }
                    }
                }
            }
            println!("{name}: pretzel matches {hits:?}");
        }
        return;
    }

    if stage == "knt15" {
        // Simplify the pinned diagrams, check kh-invariance, print PD forms.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let build = |k: i32, kr: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        // locate the winner K_n route
        let mut jobs: Vec<(String, PlanarDiagram)> = Vec::new();
        'm: for mask in 0..16u32 {
            for k in -12i32..=6 {
                let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
                for (i, &w) in [2u8, 2, 1, 1].iter().enumerate() {
                    ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                }
                let t = RoundTemplate::new(ev);
                if let Some(d) = round_diagram(&t) {
                    if d.components() == 1 && kh(&d) == kn_table(0) {
                        println!("K_n winner: mask={mask} k0={k}");
                        for n in 0..3i32 {
                            for dk in [-(n), n] {
                                let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k: k + dk }];
                                for (i, &w) in [2u8, 2, 1, 1].iter().enumerate() {
                                    ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                                }
                                if let Some(d) = round_diagram(&RoundTemplate::new(ev)) {
                                    if d.components() == 1 && kh(&d) == kn_table(n) {
                                        jobs.push((format!("K_{n}"), d));
                                        break;
                                    }
                                }
                            }
                        }
                        break 'm;
                    }
                }
            }
        }
        jobs.push(("K0[0,2]".into(), build(4, -4).unwrap()));
        jobs.push(("K0[1,2]".into(), build(6, -4).unwrap()));
        jobs.push(("R_0".into(), build(3, -4).unwrap()));
        jobs.push(("R_1".into(), build(5, -4).unwrap()));
        // K^1_{0,0} via the H+ battery
        let d = build(4, -6).unwrap();
        'k1: for c in 0..d.crossing_count() {
            let (p, q, _) = d.grading_shifts(c).unwrap();
            if (p, q) == (5, -1) {
                let r0 = d.resolve(c, 0).unwrap();
                if r0.components() == 2 && kh(&r0) == hplus {
                    jobs.push(("K1[0,0]".into(), d.resolve(c, 1).unwrap()));
                    break 'k1;
                }
            }
        }
        for (name, d) in &jobs {
            let s = simplify(d);
            let ok = kh(&s) == kh(d);
            println!(
                "{name}: {} -> {} crossings, kh-invariant {ok}, w {} -> {}",
                d.crossing_count(),
                s.crossing_count(),
                d.writhe(),
                s.writhe()
            );
            println!("  {}", s.to_pd_string());
        }
        return;
    }

    if stage == "knt14" {
        // Ladder climb with R1/R2 simplification between steps.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let hminus = kh(&build_family(&parse_family("family=H_minus").unwrap()).unwrap());
        let build = |k: i32, kr: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        let base = build(4, -6).unwrap();
        println!("base: {} crossings; simplified: {} crossings", base.crossing_count(), simplify(&base).crossing_count());
        let mut level: Vec<PlanarDiagram> = vec![simplify(&base)];
        for s in 0..4i32 {
            let (pq, hopf) = if s % 2 == 0 { ((5i32, -1i32), &hplus) } else { ((-3, -1), &hminus) };
            let mut next: Vec<PlanarDiagram> = Vec::new();
            let mut tables: Vec<BigradedDims> = Vec::new();
            for d in &level {
                for c in 0..d.crossing_count() {
                    let (p, q, _) = d.grading_shifts(c).unwrap();
                    if (p, q) != pq {
                        continue;
                    }
                    let r0 = d.resolve(c, 0).unwrap();
                    if r0.components() != 2 || kh(&r0) != *hopf {
                        continue;
                    }
                    let r1 = simplify(&d.resolve(c, 1).unwrap());
                    if r1.components() != 1 {
                        continue;
                    }
                    let tab = kh(&r1);
                    if !tables.contains(&tab) {
                        tables.push(tab);
                        next.push(r1);
                    }
                }
            }
            let kaps: Vec<Option<i32>> = next.iter().map(|d| collapse(&kh(d)).kappa()).collect();
            let crs: Vec<usize> = next.iter().map(|d| d.crossing_count()).collect();
            println!("s={} -> {}: {} children, kappas {kaps:?}, crossings {crs:?}", s, s + 1, next.len());
            if next.is_empty() {
                return;
            }
            level = next;
        }
        return;
    }

    if stage == "knt13" {
        // Same ladder but compare K^2 against the merged box, with a census
        // of the stalled level.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let hminus = kh(&build_family(&parse_family("family=H_minus").unwrap()).unwrap());
        let build = |k: i32, kr: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        let mut level: Vec<PlanarDiagram> = vec![build(4, -6).unwrap()];
        for s in 0..4i32 {
            let (pq, hopf) = if s % 2 == 0 { ((5i32, -1i32), &hplus) } else { ((-3, -1), &hminus) };
            let mut next: Vec<PlanarDiagram> = Vec::new();
            let mut tables: Vec<BigradedDims> = Vec::new();
            for d in &level {
                for c in 0..d.crossing_count() {
                    let (p, q, _) = d.grading_shifts(c).unwrap();
                    if (p, q) != pq {
                        continue;
                    }
                    let r0 = d.resolve(c, 0).unwrap();
                    if r0.components() != 2 || kh(&r0) != *hopf {
                        continue;
                    }
                    let r1 = d.resolve(c, 1).unwrap();
                    if r1.components() != 1 {
                        continue;
                    }
                    let tab = kh(&r1);
                    if !tables.contains(&tab) {
                        tables.push(tab);
                        next.push(r1);
                    }
                }
            }
            let kaps: Vec<Option<i32>> = next.iter().map(|d| collapse(&kh(d)).kappa()).collect();
            let crs: Vec<usize> = next.iter().map(|d| d.crossing_count()).collect();
            println!("s={} -> {}: {} children, kappas {kaps:?}, crossings {crs:?}", s, s + 1, next.len());
            if s == 1 {
                for (i, d) in next.iter().enumerate() {
                    println!("  K2 cand {i}: kh == box(6,-6): {}", kh(d) == kh(&build(6, -6).unwrap()));
                }
            }
            if next.is_empty() {
                // census of the stalled level
                for d in &level {
                    println!("  stalled level census ({} crossings):", d.crossing_count());
                    for c in 0..d.crossing_count() {
                        let (p, q, _) = d.grading_shifts(c).unwrap();
                        let r0 = d.resolve(c, 0).unwrap();
                        let r1 = d.resolve(c, 1).unwrap();
                        let k0 = collapse(&kh(&r0)).kappa();
                        let k1 = collapse(&kh(&r1)).kappa();
                        println!(
                            "    c={c}: pq=({p},{q}) res0({}c,k={k0:?},H+:{},H-:{}) res1({}c,k={k1:?})",
                            r0.components(),
                            kh(&r0) == hplus,
                            kh(&r0) == hminus,
                            r1.components()
                        );
                    }
                }
                return;
            }
            level = next;
        }
        let merged = build(8, -6).unwrap();
        let merged_tab = kh(&merged);
        for (i, d) in level.iter().enumerate() {
            println!("K4 cand {i}: kh == merged box(8,-6): {}", kh(d) == merged_tab);
        }
        return;
    }

    if stage == "knt11" {
        // Hunt the s-box: does adding a second twist region reproduce the
        // ladder signature kappa(K^s) = kappa(K^0) + (0,-5,-2,-7,-4)[s]?
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let sig = [0i32, -5, -2, -7, -4];
        // Variant A: second band box s inserted after wall event `pos`.
        for n in 0..2i32 {
            let k0 = -3 - 2 * n;
            for pos in 1..=4usize {
                let mut kappas: Vec<Option<i32>> = Vec::new();
                for s in 0..=4i32 {
                    let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k: 4 + 2 * n }];
                    for i in 0..4usize {
                        ev.push(BandEvent::Wall { wall: 1, over: false });
                        if i + 1 == pos && s != 0 {
                            ev.push(BandEvent::Box { k: s });
                        }
                    }
                    let mut t = RoundTemplate::new(ev);
                    t.rail_twists = vec![RailTwist { station: 1, k: -4 }];
                    let kap = round_diagram(&t)
                        .filter(|d| d.components() == 1)
                        .map(|d| collapse(&kh(&d)).kappa())
                        .flatten();
                    kappas.push(kap);
                }
                let want: Vec<i32> = sig.iter().map(|d| k0 + d).collect();
                let got: Vec<i32> = kappas.iter().map(|k| k.unwrap_or(99)).collect();
                println!("A n={n} pos={pos}: got {got:?} want {want:?} {}", if got == want { "***" } else { "" });
            }
        }
        // Variant B: rail twist s at another station.
        for n in 0..2i32 {
            let k0 = -3 - 2 * n;
            for stb in [3i64, 5, 7] {
                let mut kappas: Vec<Option<i32>> = Vec::new();
                for s in 0..=4i32 {
                    let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k: 4 + 2 * n }];
                    for _ in 0..4usize {
                        ev.push(BandEvent::Wall { wall: 1, over: false });
                    }
                    let mut t = RoundTemplate::new(ev);
                    t.rail_twists = vec![RailTwist { station: 1, k: -4 }];
                    if s != 0 {
                        t.rail_twists.push(RailTwist { station: stb, k: s });
                    }
                    let kap = round_diagram(&t)
                        .filter(|d| d.components() == 1)
                        .map(|d| collapse(&kh(&d)).kappa())
                        .flatten();
                    kappas.push(kap);
                }
                let want: Vec<i32> = sig.iter().map(|d| k0 + d).collect();
                let got: Vec<i32> = kappas.iter().map(|k| k.map(|v| v.to_string()).unwrap_or("x".into())).collect::<Vec<_>>().iter().map(|s| s.parse().unwrap_or(99)).collect();
                println!("B n={n} stB={stb}: got {got:?} want {want:?} {}", if got == want { "***" } else { "" });
            }
        }
        return;
    }

    if stage == "knt10" {
        // Full crossing census on the pinned family diagrams.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let build = |k: i32, kr: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        let mut jobs: Vec<(String, PlanarDiagram)> = Vec::new();
        for t in [2i32, 0, -2] {
            jobs.push((format!("K0[n=0,t={t}]"), build(4, t - 6).unwrap()));
        }
        jobs.push(("R_0".into(), build(3, -4).unwrap()));
        jobs.push(("R_1".into(), build(5, -4).unwrap()));
        for (name, d) in &jobs {
            let kd = collapse(&kh(d)).kappa();
            println!("== {name}: {} crossings, kappa={kd:?}", d.crossing_count());
            for c in 0..d.crossing_count() {
                let (p, q, r) = d.grading_shifts(c).unwrap();
                let r0 = d.resolve(c, 0).unwrap();
                let r1 = d.resolve(c, 1).unwrap();
                let k0 = collapse(&kh(&r0)).kappa();
                let k1 = collapse(&kh(&r1)).kappa();
                println!(
                    "  c={c}: pq=({p},{q},{r}) res0({}c,k={k0:?}) res1({}c,k={k1:?})",
                    r0.components(),
                    r1.components()
                );
            }
        }
        return;
    }

    if stage == "knt9" {
        // Two rail-twist regions: (a @ stA, b @ stB).  Compare against the
        // merged single-region template and hunt the missing batteries.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let build2 = |k: i32, twists: &[(i64, i32)]| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            t.rail_twists = twists
                .iter()
                .filter(|&&(_, kk)| kk != 0)
                .map(|&(st, kk)| RailTwist { station: st, k: kk })
                .collect();
            round_diagram(&t)
        };
        // Reference tables: merged single-region law kr = t-6.
        let single = |n: i32, t: i32| build2(4 + 2 * n, &[(1, t - 6)]).unwrap();
        for n in 0..2i32 {
            for t in [2i32, 0, -2, -4, 4] {
                let sref = if t == 4 { kn_table(n as i32) } else { kh(&single(n, t)) };
                let mut matches: Vec<String> = Vec::new();
                for sta in [1i64, 3, 5, 7] {
                    for stb in [1i64, 3, 5, 7] {
                        if sta == stb {
                            continue;
                        }
                        for (va, vb, tag) in [(-2i32, t - 4, "A"), (-2, t, "B")] {
                            if let Some(d) = build2(4 + 2 * n, &[(sta, va), (stb, vb)]) {
                                if d.components() == 1 && kh(&d) == sref {
                                    matches.push(format!("{tag}({sta},{stb})"));
                                }
                            }
                        }
                    }
                }
                println!("n={n} t={t}: 2-region matches vs ref: {}", matches.join(" "));
            }
        }
        return;
    }

    if stage == "knt8" {
        // Battery census across kr at k=4+2n, plus child identification.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let build = |kr: i32, k: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        for n in 0..2i32 {
            let k = 4 + 2 * n;
            for kr in [-2i32, -4, -6, -8, -10, -12] {
                let d = build(kr, k).unwrap();
                let kd = collapse(&kh(&d)).kappa();
                let mut tags: Vec<String> = Vec::new();
                for c in 0..d.crossing_count() {
                    let (p, q, _) = d.grading_shifts(c).unwrap();
                    let r0 = d.resolve(c, 0).unwrap();
                    let r1 = d.resolve(c, 1).unwrap();
                    if (p, q) == (-1, -7) && r1.components() == 2 && kh(&r1) == t42 {
                        let k0 = collapse(&kh(&r0)).kappa();
                        tags.push(format!("T42[c={c},res0k={k0:?}]"));
                    }
                    if (p, q) == (5, -1) && r0.components() == 2 && kh(&r0) == hplus {
                        let k1 = collapse(&kh(&r1)).kappa();
                        tags.push(format!("S[c={c},res1k={k1:?}]"));
                    }
                    if (p, q) == (1, -1) && r0.components() == 1 && r1.components() == 1 {
                        let k0 = collapse(&kh(&r0)).kappa();
                        let k1 = collapse(&kh(&r1)).kappa();
                        if k0 == Some(-2 * n - 6) && k1 == Some(-2 * n - 7) {
                            tags.push(format!("KNT[c={c}]"));
                        }
                    }
                }
                println!("n={n} kr={kr}: kappa={kd:?} {}", tags.join(" "));
            }
        }
        // Child identification at the T42 battery of (k=4+2n, kr=-4):
        for n in 0..2i32 {
            let d = build(-4, 4 + 2 * n).unwrap();
            for c in 0..d.crossing_count() {
                let (p, q, _) = d.grading_shifts(c).unwrap();
                if (p, q) != (-1, -7) {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                if r1.components() != 2 || kh(&r1) != t42 {
                    continue;
                }
                let r0 = d.resolve(c, 0).unwrap();
                let rt = build(-4, 3 + 2 * n).unwrap();
                println!(
                    "child n={n}: c={c} kh(res0)==kh(Rtemplate(3+2n,-4)): {}",
                    kh(&r0) == kh(&rt)
                );
                // Q battery on the literal child
                let mut qf = false;
                for c2 in 0..r0.crossing_count() {
                    let (p2, q2, _) = r0.grading_shifts(c2).unwrap();
                    if (p2, q2) != (-1, 5) {
                        continue;
                    }
                    let s1 = r0.resolve(c2, 1).unwrap();
                    if s1.components() != 2 {
                        continue;
                    }
                    let kq = collapse(&kh(&s1)).kappa();
                    if kq != Some(-8 - n) {
                        continue;
                    }
                    let s0 = r0.resolve(c2, 0).unwrap();
                    let k40 = collapse(&kh(&s0)).kappa();
                    println!("  Q on child: c2={c2} res1k={kq:?} res0k={k40:?} (want {})", -2 * n - 5);
                    qf = true;
                }
                if !qf {
                    println!("  Q on child: none");
                }
                break;
            }
        }
        // K^0_{n,4} =? K_n: does any kr reproduce ktab[n] at k=4+2n?
        for n in 0..2usize {
            let want = kn_table(n as i32);
            let mut hits: Vec<i32> = Vec::new();
            for kr in (-12i32..=12).step_by(2) {
                if kr == 0 {
                    continue;
                }
                if let Some(d) = build(kr, 4 + 2 * n as i32) {
                    if kh(&d) == want {
                        hits.push(kr);
                    }
                }
            }
            println!("ktab[{n}] via kr at k={}: {hits:?}", 4 + 2 * n);
        }
        return;
    }

    if stage == "knt7" {
        // Full verification of the candidate family at seq=[1,1,1,1] mask=0
        // st=1:  K^0_{n,t} = (k=4+2n, kr=t-4),  R_n = (k=3+2n, kr=-4).
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        let hplus = kh(&build_family(&parse_family("family=H_plus").unwrap()).unwrap());
        let build = |kr: i32, k: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = vec![BandEvent::Box { k }];
            for _ in 0..4 {
                ev.push(BandEvent::Wall { wall: 1, over: false });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: 1, k: kr }];
            }
            round_diagram(&t)
        };
        println!("--- K^0_{{n,t}} kappa grid ---");
        for n in 0..4i32 {
            let mut line = format!("n={n}:");
            for t in [2i32, 0, -2, -4] {
                let d = build(t - 4, 4 + 2 * n).unwrap();
                let kp = collapse(&kh(&d)).kappa().unwrap();
                line += &format!(" t={t}:{kp}({})", d.crossing_count());
            }
            println!("{line}  want {}", -3 - 2 * n);
        }
        println!("--- R_n ---");
        for n in 0..3i32 {
            let d = build(-4, 3 + 2 * n).unwrap();
            println!("R_{n}: kappa={:?} want {}", collapse(&kh(&d)).kappa(), -2 * n - 10);
        }
        println!("--- T42 battery on K^0_{{n,2}} ---");
        for n in 0..3i32 {
            let d = build(-2, 4 + 2 * n).unwrap();
            let mut found = false;
            for c in 0..d.crossing_count() {
                let (p, q, _) = d.grading_shifts(c).unwrap();
                if (p, q) != (-1, -7) {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                if r1.components() != 2 || kh(&r1) != t42 {
                    continue;
                }
                let r0 = d.resolve(c, 0).unwrap();
                let k0 = collapse(&kh(&r0)).kappa();
                let rtempl = build(-4, 3 + 2 * n).unwrap();
                let same = kh(&r0) == kh(&rtempl);
                println!("n={n}: c={c} res0 kappa={k0:?} (want {}) res0==Rtemplate:{same}", -2 * n - 10);
                found = true;
                break;
            }
            if !found {
                println!("n={n}: NO T42 crossing");
            }
        }
        println!("--- Q battery on R_n template ---");
        for n in 0..3i32 {
            let d = build(-4, 3 + 2 * n).unwrap();
            let mut found = false;
            for c in 0..d.crossing_count() {
                let (p, q, _) = d.grading_shifts(c).unwrap();
                if (p, q) != (-1, 5) {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                if r1.components() != 2 {
                    continue;
                }
                let k1 = collapse(&kh(&r1)).kappa();
                if k1 != Some(-8 - n) {
                    continue;
                }
                let r0 = d.resolve(c, 0).unwrap();
                let k0 = collapse(&kh(&r0)).kappa();
                println!("n={n}: c={c} Qcand kappa={k1:?} (want {}) res0 kappa={k0:?} (want {})", -8 - n, -2 * n - 5);
                found = true;
                break;
            }
            if !found {
                println!("n={n}: NO Q crossing on R template");
            }
        }
        println!("--- s-ladder (5,-1) H+ battery on K^0_{{n,t}} ---");
        for (n, t) in [(0i32, 2i32), (0, 0), (1, 2), (0, -2)] {
            let d = build(t - 4, 4 + 2 * n).unwrap();
            let mut found = false;
            for c in 0..d.crossing_count() {
                let (p, q, _) = d.grading_shifts(c).unwrap();
                if (p, q) != (5, -1) {
                    continue;
                }
                let r0 = d.resolve(c, 0).unwrap();
                if r0.components() != 2 || kh(&r0) != hplus {
                    continue;
                }
                let r1 = d.resolve(c, 1).unwrap();
                if r1.components() != 1 {
                    continue;
                }
                let k1 = collapse(&kh(&r1)).kappa();
                println!("n={n} t={t}: c={c} K1cand kappa={k1:?} (want {})", -3 - 2 * n - 5);
                found = true;
                break;
            }
            if !found {
                println!("n={n} t={t}: NO (5,-1)/H+ crossing");
            }
        }
        return;
    }

    if stage == "knt6" {
        // For each battery-passing K^0_{0,2} cell, print the kappa of its
        // neighbors in k and kr, and whether any kr neighbor is K_0.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        let ktab: Vec<BigradedDims> = (0..3).map(kn_table).collect();
        let wallseqs: Vec<Vec<u8>> =
            vec![vec![1, 1, 1, 1], vec![1, 1, 2, 2], vec![2, 2, 1, 1], vec![2, 2, 2, 2]];
        let build = |seq: &[u8], mask: u32, st: i64, kr: i32, k: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = Vec::new();
            for (i, &w) in seq.iter().enumerate() {
                if i == 0 && k != 0 {
                    ev.push(BandEvent::Box { k });
                }
                ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: st, k: kr }];
            }
            round_diagram(&t)
        };
        let kap = |d: &Option<PlanarDiagram>| -> Option<i32> {
            match d {
                Some(d) if d.components() == 1 => collapse(&kh(d)).kappa(),
                _ => None,
            }
        };
        for seq in &wallseqs {
            for mask in 0..16u32 {
                for st in (1..8i64).step_by(2) {
                    for kr in (-8..=8i32).step_by(2) {
                        if kr == 0 {
                            continue;
                        }
                        for k in -8..=8i32 {
                            let d0 = build(seq, mask, st, kr, k);
                            if kap(&d0) != Some(-3) {
                                continue;
                            }
                            let d = d0.unwrap();
                            let mut pass = false;
                            for c in 0..d.crossing_count() {
                                let (p, q, _) = d.grading_shifts(c).unwrap();
                                if (p, q) != (-1, -7) {
                                    continue;
                                }
                                let r1 = d.resolve(c, 1).unwrap();
                                if r1.components() == 2 && kh(&r1) == t42 {
                                    pass = true;
                                    break;
                                }
                            }
                            if !pass {
                                continue;
                            }
                            let km = kap(&build(seq, mask, st, kr, k - 1));
                            let kp2 = kap(&build(seq, mask, st, kr, k + 1));
                            let krm = build(seq, mask, st, kr - 2, k);
                            let krp = build(seq, mask, st, kr + 2, k);
                            let tagm = match &krm {
                                Some(dd) if dd.components() == 1 => {
                                    if ktab.contains(&kh(dd)) { "K!".to_string() } else { format!("{:?}", kap(&krm)) }
                                }
                                _ => "x".to_string(),
                            };
                            let tagp = match &krp {
                                Some(dd) if dd.components() == 1 => {
                                    if ktab.contains(&kh(dd)) { "K!".to_string() } else { format!("{:?}", kap(&krp)) }
                                }
                                _ => "x".to_string(),
                            };
                            println!(
                                "NB seq={seq:?} mask={mask} st={st} kr={kr} k={k} | k-1:{km:?} k+1:{kp2:?} kr-2:{tagm} kr+2:{tagp}"
                            );
                        }
                    }
                }
            }
        }
        println!("done");
        return;
    }

    if stage == "knt5" {
        // Uniform family test over (route, k, st, kr):
        //   n-line: kappa(box k+dir*n) = -3-2n for n=0,1,2   (K^0_{n,2})
        //   t-law:  kr_t = kr + sig*(t-2): t=4 must give ktab[n] exactly,
        //           t=0,-2 keep kappa=-3 at n=0
        //   battery: T(-4,2) child with (p,q)=(-1,-7), res0 kappa -10-2n
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        use tbwb_core::diagram::{build_family, parse_family};
        let t42 = kh(&build_family(&parse_family("family=T(-4,2)").unwrap()).unwrap());
        let ktab: Vec<BigradedDims> = (0..3).map(kn_table).collect();
        let wallseqs: Vec<Vec<u8>> = vec![
            vec![1, 1, 1, 1],
            vec![1, 1, 2, 2],
            vec![2, 2, 1, 1],
            vec![2, 2, 2, 2],
        ];
        let build = |seq: &[u8], mask: u32, st: i64, kr: i32, k: i32| -> Option<PlanarDiagram> {
            let mut ev: Vec<BandEvent> = Vec::new();
            for (i, &w) in seq.iter().enumerate() {
                if i == 0 && k != 0 {
                    ev.push(BandEvent::Box { k });
                }
                ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
            }
            let mut t = RoundTemplate::new(ev);
            if kr != 0 {
                t.rail_twists = vec![RailTwist { station: st, k: kr }];
            }
            round_diagram(&t)
        };
        let kap = |d: &Option<PlanarDiagram>| -> Option<i32> {
            match d {
                Some(d) if d.components() == 1 => collapse(&kh(d)).kappa(),
                _ => None,
            }
        };
        for seq in &wallseqs {
            for mask in 0..16u32 {
                for st in (1..8i64).step_by(2) {
                    for kr in (-8..=8i32).step_by(2) {
                        if kr == 0 {
                            continue;
                        }
                        'kloop: for k in -8..=8i32 {
                            if kap(&build(seq, mask, st, kr, k)) != Some(-3) {
                                continue;
                            }
                            for dir in [1i32, -1] {
                                if kap(&build(seq, mask, st, kr, k + dir)) != Some(-5) {
                                    continue;
                                }
                                if kap(&build(seq, mask, st, kr, k + 2 * dir)) != Some(-7) {
                                    continue;
                                }
                                for sig in [1i32, -1] {
                                    // t=4
                                    let d4 = build(seq, mask, st, kr + 2 * sig, k);
                                    let ok4 = matches!(&d4, Some(d) if d.components() == 1 && kh(d) == ktab[0]);
                                    if !ok4 {
                                        continue;
                                    }
                                    let d41 = build(seq, mask, st, kr + 2 * sig, k + dir);
                                    let ok41 = matches!(&d41, Some(d) if d.components() == 1 && kh(d) == ktab[1]);
                                    // t=0, t=-2 at n=0
                                    let k0 = kap(&build(seq, mask, st, kr - 2 * sig, k));
                                    let km2 = kap(&build(seq, mask, st, kr - 4 * sig, k));
                                    println!(
                                        "FAM seq={seq:?} mask={mask} st={st} kr={kr} k={k} dir={dir} sig={sig} t4n1={ok41} t0={k0:?} tm2={km2:?}"
                                    );
                                    continue 'kloop;
                                }
                            }
                        }
                    }
                }
            }
        }
        println!("done");
        return;
    }

    if stage == "flype7" {
        // Direct enumeration of flype-form candidates: 4-wall routes with two
        // band boxes, or one band box plus a rail clasp. Test every crossing
        // under both smoothing-label conventions.
        use tbwb_core::diagram::annulus::{BandEvent, RailTwist, RoundTemplate, round_diagram};
        let wallseqs: Vec<Vec<u8>> = {
            let mut v = Vec::new();
            for bits in 0..16u32 {
                let seq: Vec<u8> =
                    (0..4).map(|i| if bits >> i & 1 == 1 { 2u8 } else { 1 }).collect();
                let mut region = 1i32;
                let mut ok = true;
                for &w in &seq {
                    region = match (w, region) {
                        (1, 0) => 1,
                        (1, 1) => 0,
                        (2, 1) => 2,
                        (2, 2) => 1,
                        _ => {
                            ok = false;
                            break;
                        }
                    };
                }
                if ok && region == 1 {
                    v.push(seq);
                }
            }
            v
        };
        let m = 2i32;
        let mut tested = 0usize;
        let mut khhits = 0usize;
        let mut batt = |d: &PlanarDiagram, desc: &str| {
            if d.components() != 1 {
                return;
            }
            if kh(d) != kn_table(m - 1) {
                return;
            }
            khhits += 1;
            for c in 0..d.crossing_count() {
                for (a, b) in [(0u8, 1u8), (1, 0)] {
                    let rb = d.resolve(c, b).unwrap();
                    if rb.components() != 1 || kh(&rb) != kn_table(m) {
                        continue;
                    }
                    let ra = d.resolve(c, a).unwrap();
                    if ra.components() != 2 {
                        continue;
                    }
                    let ta = kh(&ra);
                    let (p, q, _) = d.grading_shifts(c).unwrap();
                    println!(
                        "CAND {desc} c={c} Kside={b} pq=({p},{q}) otherkappa={:?} otherdim={}",
                        collapse(&ta).kappa(),
                        ta.total_dim()
                    );
                    if collapse(&ta).kappa() == Some(0) {
                        println!("  ^^ KAPPA0 HIT other={ta:?}");
                    }
                }
            }
        };
        // space A: two band boxes
        for seq in &wallseqs {
            for mask in 0..16u32 {
                for k1 in -5..=5i32 {
                    if k1 == 0 {
                        continue;
                    }
                    for k2 in [-2i32, -1, 1, 2] {
                        for p1 in 0..=4usize {
                            for p2 in p1..=4usize {
                                let mut ev: Vec<BandEvent> = Vec::new();
                                for i in 0..=4usize {
                                    if i == p1 {
                                        ev.push(BandEvent::Box { k: k1 });
                                    }
                                    if i == p2 {
                                        ev.push(BandEvent::Box { k: k2 });
                                    }
                                    if i < 4 {
                                        ev.push(BandEvent::Wall {
                                            wall: seq[i],
                                            over: mask >> i & 1 == 1,
                                        });
                                    }
                                }
                                tested += 1;
                                if let Some(d) = round_diagram(&RoundTemplate::new(ev)) {
                                    batt(&d, &format!("A seq={seq:?} mask={mask} k1={k1}@{p1} k2={k2}@{p2}"));
                                }
                            }
                        }
                    }
                }
            }
        }
        // space B: one band box plus one rail clasp, all crossings
        for seq in &wallseqs {
            for mask in 0..16u32 {
                for k in -5..=5i32 {
                    for tpos in 0..=4usize {
                        if k == 0 && tpos > 0 {
                            break;
                        }
                        for station in (1..8i64).step_by(2) {
                            for kr in [-4i32, -2, 2, 4] {
                                let mut ev: Vec<BandEvent> = Vec::new();
                                for (i, &w) in seq.iter().enumerate() {
                                    if i == tpos && k != 0 {
                                        ev.push(BandEvent::Box { k });
                                    }
                                    ev.push(BandEvent::Wall { wall: w, over: mask >> i & 1 == 1 });
                                }
                                if tpos == 4 && k != 0 {
                                    ev.push(BandEvent::Box { k });
                                }
                                let mut t = RoundTemplate::new(ev);
                                t.rail_twists = vec![RailTwist { station, k: kr }];
                                tested += 1;
                                if let Some(d) = round_diagram(&t) {
                                    batt(&d, &format!("B seq={seq:?} mask={mask} k={k}@{tpos} st={station} kr={kr}"));
                                }
                            }
                        }
                    }
                }
            }
        }
        println!("tested={tested} khhits={khhits}");
        return;
    }

    eprintln!("unknown stage {stage}");
}

/// Rebuild a PlanarDiagram from loosely-labelled tuples: walk strands in both
/// directions, relabel consecutively, rotate under-in to slot 0.
/// All planar results of pushing one edge across another (an R2 finger),
/// given two darts on a common face. Knot type is preserved; callers should
/// still confirm with kh.
fn add_finger(d: &PlanarDiagram, dx: (usize, usize), dy: (usize, usize)) -> Vec<PlanarDiagram> {
    let tuples = d.crossings().to_vec();
    let x = tuples[dx.0][dx.1];
    let y = tuples[dy.0][dy.1];
    if x == y {
        return Vec::new();
    }
    let incoming = |c: usize, s: usize| -> bool {
        s == 0 || (s == 3 && d.sign(c) > 0) || (s == 1 && d.sign(c) < 0)
    };
    let occ = |e: usize| -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (c, t) in tuples.iter().enumerate() {
            for (s, &l) in t.iter().enumerate() {
                if l == e {
                    v.push((c, s));
                }
            }
        }
        v
    };
    let head = |e: usize| occ(e).into_iter().find(|&(c, s)| incoming(c, s));
    let (hx, hy) = match (head(x), head(y)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Vec::new(),
    };
    let m = 2 * tuples.len();
    let (x2, x3, y2, y3) = (m + 1, m + 2, m + 3, m + 4);
    let mk = |ui: usize, uo: usize, oi: usize, oo: usize, pos: bool| -> [usize; 4] {
        if pos {
            [ui, oo, uo, oi]
        } else {
            [ui, oi, uo, oo]
        }
    };
    let mut out = Vec::new();
    for x_over in [true, false] {
        for order_ab in [true, false] {
            for sa in [true, false] {
                for sb in [true, false] {
                    let mut t = tuples.clone();
                    t[hx.0][hx.1] = x3;
                    t[hy.0][hy.1] = y3;
                    // finger pieces: x -> A -> x2 -> B -> x3; crossed edge
                    // pieces: y -> first -> y2 -> second -> y3
                    let (a_in, a_out, b_in, b_out) =
                        if order_ab { (y, y2, y2, y3) } else { (y2, y3, y, y2) };
                    let (ca, cb) = if x_over {
                        (mk(a_in, a_out, x, x2, sa), mk(b_in, b_out, x2, x3, sb))
                    } else {
                        (mk(x, x2, a_in, a_out, sa), mk(x2, x3, b_in, b_out, sb))
                    };
                    t.push(ca);
                    t.push(cb);
                    if trace_faces(&t).map(|f| f.len()) != Some(t.len() + 2) {
                        continue;
                    }
                    if let Some(nd) = rebuild(&t, d.free_loops()) {
                        if nd.components() == d.components() {
                            out.push(nd);
                        }
                    }
                }
            }
        }
    }
    out
}

fn rebuild(tuples: &[[usize; 4]], loops: usize) -> Option<PlanarDiagram> {
    if tuples.is_empty() {
        return PlanarDiagram::new(Vec::new(), loops).ok();
    }
    let mut occ: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for (ci, t) in tuples.iter().enumerate() {
        for (si, &e) in t.iter().enumerate() {
            occ.entry(e).or_default().push((ci, si));
        }
    }
    if occ.values().any(|v| v.len() != 2) {
        return None;
    }
    let mut heads: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut seen: std::collections::BTreeSet<usize> = Default::default();
    let labels: Vec<usize> = occ.keys().copied().collect();
    for &start in &labels {
        if seen.contains(&start) {
            continue;
        }
        let mut committed = false;
        'dirs: for k in 0..2 {
            let mut cycle: Vec<usize> = Vec::new();
            let mut cycle_heads: Vec<(usize, (usize, usize))> = Vec::new();
            let mut cur = start;
            let mut head = occ[&start][k];
            loop {
                let v = &occ[&cur];
                let tail = if v[0] == head { v[1] } else { v[0] };
                if head.1 == 2 || tail.1 == 0 {
                    continue 'dirs;
                }
                cycle.push(cur);
                cycle_heads.push((cur, head));
                let out = (head.0, (head.1 + 2) % 4);
                let next = tuples[out.0][out.1];
                let nv = &occ[&next];
                let next_head = if nv[0] == out { nv[1] } else { nv[0] };
                if next == start && next_head == occ[&start][k] {
                    break;
                }
                if cycle.len() > 4 * tuples.len() + 4 {
                    continue 'dirs;
                }
                cur = next;
                head = next_head;
            }
            for &(e, h) in &cycle_heads {
                heads.insert(e, h);
                seen.insert(e);
            }
            comps.push(cycle);
            committed = true;
            break;
        }
        if !committed {
            return None;
        }
    }
    let mut relabel: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut next = 1usize;
    for comp in &comps {
        for &l in comp {
            relabel.insert(l, next);
            next += 1;
        }
    }
    let mut out = Vec::with_capacity(tuples.len());
    for (ci, t) in tuples.iter().enumerate() {
        let rot = if heads.get(&t[0]) == Some(&(ci, 0)) {
            0
        } else if heads.get(&t[2]) == Some(&(ci, 2)) {
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
    PlanarDiagram::new(out, loops).ok()
}

/// R1/R2 reduction to a fixpoint.
fn simplify(d: &PlanarDiagram) -> PlanarDiagram {
    let mut tuples: Vec<[usize; 4]> = d.crossings().to_vec();
    let mut loops = d.free_loops();
    'outer: loop {
        // R1: a label repeated at cyclically-adjacent slots
        for (i, t) in tuples.iter().enumerate() {
            for j in 0..4usize {
                if t[j] == t[(j + 1) % 4] {
                    let m = t[(j + 2) % 4];
                    let n = t[(j + 3) % 4];
                    tuples.remove(i);
                    if m == n {
                        loops += 1;
                    } else {
                        for t2 in tuples.iter_mut() {
                            for e in t2.iter_mut() {
                                if *e == n {
                                    *e = m;
                                }
                            }
                        }
                    }
                    continue 'outer;
                }
            }
        }
        // R2: two crossings joined by two edges whose strand roles agree
        let nc = tuples.len();
        for i in 0..nc {
            for j in (i + 1)..nc {
                let (ti, tj) = (tuples[i], tuples[j]);
                let shared: Vec<usize> = ti
                    .iter()
                    .copied()
                    .filter(|e| tj.contains(e))
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                if shared.len() != 2 {
                    continue;
                }
                let (x, y) = (shared[0], shared[1]);
                let pos = |t: &[usize; 4], e: usize| t.iter().position(|&v| v == e).unwrap();
                let (pxi, pxj) = (pos(&ti, x), pos(&tj, x));
                let (pyi, pyj) = (pos(&ti, y), pos(&tj, y));
                // each label must appear once per crossing
                if ti.iter().filter(|&&e| e == x).count() != 1
                    || tj.iter().filter(|&&e| e == x).count() != 1
                    || ti.iter().filter(|&&e| e == y).count() != 1
                    || tj.iter().filter(|&&e| e == y).count() != 1
                {
                    continue;
                }
                if pxi % 2 != pxj % 2 || pyi % 2 != pyj % 2 || pxi % 2 == pyi % 2 {
                    continue;
                }
                let ext_xi = ti[(pxi + 2) % 4];
                let ext_xj = tj[(pxj + 2) % 4];
                let ext_yi = ti[(pyi + 2) % 4];
                let ext_yj = tj[(pyj + 2) % 4];
                let mut rm: Vec<usize> = vec![i, j];
                rm.sort_unstable();
                tuples.remove(rm[1]);
                tuples.remove(rm[0]);
                let mut pairs = [(ext_xi, ext_xj), (ext_yi, ext_yj)];
                for pi in 0..2 {
                    let (a, b) = pairs[pi];
                    if a == b {
                        loops += 1;
                    } else {
                        for t2 in tuples.iter_mut() {
                            for e in t2.iter_mut() {
                                if *e == b {
                                    *e = a;
                                }
                            }
                        }
                        if pi == 0 {
                            for v in [&mut pairs[1].0, &mut pairs[1].1] {
                                if *v == b {
                                    *v = a;
                                }
                            }
                        }
                    }
                }
                continue 'outer;
            }
        }
        break;
    }
    match rebuild(&tuples, loops) {
        Some(nd) => nd,
        None => d.clone(),
    }
}
