//! Numerical checks for the unoriented skein triangle of Khovanov homology.
//!
//! Resolving a crossing c of a diagram D gives a triangle
//! Res_0 -> Res_1 -> D -> Res_0 whose maps shift the collapsed grading v by
//! r, p and q respectively, with q = w(Res_0) - w(D), p = w(D) - w(Res_1) and
//! p + q + r = -1. Unrolled:
//!
//!   ... -> HKh^v(Res_0) -> HKh^{v+r}(Res_1) -> HKh^{v+r+p}(D)
//!       -> HKh^{v-1}(Res_0) -> ...
//!
//! Exactness forces each dimension to be at most the sum of its neighbours',
//! and the alternating sum of dimensions over the whole sequence vanishes.
//! When one vertex vanishes in low gradings the other two become isomorphic
//! there; those windows drive the kappa computations replayed by `run_tree`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::diagram::{
    build_family, parse_family, parse_pd, DiagramError, FamilyError, FamilySpec, PlanarDiagram,
};
use crate::khovanov::{collapse, khovanov_homology_scan, CollapsedHomology, KhError};

#[derive(Debug, thiserror::Error)]
pub enum LesError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Kh(#[from] KhError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("tree line {line}: {msg}")]
    Tree { line: usize, msg: String },
}

/// Which vertex of the triangle vanishes on a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Vertex {
    Diagram,
    Res0,
    Res1,
}

/// On v <= hi the two non-vanishing vertices match dimension for dimension:
/// `equalities` lists (grading in the first term, grading in the second,
/// common dimension) for the nonzero pairs.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct IsoWindow {
    pub vanishes: Vertex,
    pub hi: i32,
    pub ok: bool,
    pub equalities: Vec<(i32, i32, usize)>,
}

#[derive(Debug, Clone)]
pub struct TriangleReport {
    /// (p, q, r)
    pub shifts: (i32, i32, i32),
    /// per-v dimensions (D, Res_0, Res_1), one row per grading in the union
    /// of the three supports
    pub rows: Vec<(i32, [usize; 3])>,
    pub exactness_ok: bool,
    pub windows: Vec<IsoWindow>,
    pub diagram: CollapsedHomology,
    pub res0: CollapsedHomology,
    pub res1: CollapsedHomology,
}

fn min_support(t: &CollapsedHomology) -> Option<i32> {
    t.support().first().copied()
}

fn max_support(t: &CollapsedHomology) -> Option<i32> {
    t.support().last().copied()
}

/// Signed Euler count E(X) = sum_v (-1)^v dim X^v.
fn signed_euler(t: &CollapsedHomology) -> i64 {
    t.iter().map(|(v, d)| if v.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum()
}

fn sign(e: i32) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The maximal window bound and dimension equalities for one vanishing
/// pattern. With shifts (s_a, s_b) the claim is A^{v} = B^{v - s} on v <= hi.
fn window(
    vanishes: Vertex,
    shifts: (i32, i32, i32),
    d: &CollapsedHomology,
    r0: &CollapsedHomology,
    r1: &CollapsedHomology,
) -> IsoWindow {
    let (p, q, r) = shifts;
    // (max hi, left table, right table, grading offset):
    // left^v == right^{v - off} for v <= hi
    let (hi, left, right, off) = match vanishes {
        Vertex::Res0 => (min_support(r0).map(|m| m - q - 2), d, r1, p),
        Vertex::Res1 => (min_support(r1).map(|m| m + p - 1), d, r0, -q),
        Vertex::Diagram => (min_support(d).map(|m| m + q - 1), r0, r1, -r),
    };
    let hi = match hi {
        Some(h) => h,
        None => {
            // vanishing vertex has no homology at all: full isomorphism
            max_support(left).unwrap_or(0).max(max_support(right).unwrap_or(0) + off)
        }
    };
    let lo = match (min_support(left), min_support(right)) {
        (Some(a), Some(b)) => a.min(b + off) - 1,
        (Some(a), None) => a - 1,
        (None, Some(b)) => b + off - 1,
        (None, None) => hi,
    };
    let mut ok = true;
    let mut equalities = Vec::new();
    for v in lo..=hi {
        let dl = left.dim(v);
        let dr = right.dim(v - off);
        if dl != dr {
            ok = false;
        } else if dl > 0 {
            equalities.push((v, v - off, dl));
        }
    }
    IsoWindow { vanishes, hi, ok, equalities }
}

/// Resolve crossing `c` both ways and check the triangle's dimension
/// constraints: per-degree exactness bounds and the signed Euler identity
/// E(Res_0) + (-1)^{r+1} E(Res_1) + (-1)^{r+p} E(D) = 0.
pub fn triangle_check(d: &PlanarDiagram, c: usize) -> Result<TriangleReport, LesError> {
    let (p, q, r) = d.grading_shifts(c)?;
    let res0 = d.resolve(c, 0)?;
    let res1 = d.resolve(c, 1)?;
    let td = collapse(&khovanov_homology_scan(d)?);
    let t0 = collapse(&khovanov_homology_scan(&res0)?);
    let t1 = collapse(&khovanov_homology_scan(&res1)?);

    let mut exactness_ok = true;
    for (u, dim) in td.iter() {
        if dim > t1.dim(u - p) + t0.dim(u + q) {
            exactness_ok = false;
        }
    }
    for (w, dim) in t1.iter() {
        if dim > t0.dim(w - r) + td.dim(w + p) {
            exactness_ok = false;
        }
    }
    for (x, dim) in t0.iter() {
        if dim > td.dim(x - q) + t1.dim(x + r) {
            exactness_ok = false;
        }
    }
    if signed_euler(&t0) + sign(r + 1) * signed_euler(&t1) + sign(r + p) * signed_euler(&td) != 0 {
        exactness_ok = false;
    }

    let mut gradings: Vec<i32> = Vec::new();
    for t in [&td, &t0, &t1] {
        gradings.extend(t.support());
    }
    gradings.sort_unstable();
    gradings.dedup();
    let rows: Vec<(i32, [usize; 3])> =
        gradings.into_iter().map(|v| (v, [td.dim(v), t0.dim(v), t1.dim(v)])).collect();

    let windows = vec![
        window(Vertex::Res0, (p, q, r), &td, &t0, &t1),
        window(Vertex::Res1, (p, q, r), &td, &t0, &t1),
        window(Vertex::Diagram, (p, q, r), &td, &t0, &t1),
    ];

    Ok(TriangleReport {
        shifts: (p, q, r),
        rows,
        exactness_ok,
        windows,
        diagram: td,
        res0: t0,
        res1: t1,
    })
}

/// True iff some vanishing pattern justifies the isomorphism on v <= hi and
/// the dimension equalities hold there.
pub fn iso_window_check(d: &PlanarDiagram, c: usize, hi: i32) -> Result<bool, LesError> {
    let rep = triangle_check(d, c)?;
    Ok(rep.windows.iter().any(|w| w.ok && w.hi >= hi))
}

#[derive(Debug, Clone)]
pub enum NodeSource {
    Family(FamilySpec),
    Raw(PlanarDiagram),
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub source: NodeSource,
    pub label: String,
    /// (crossing of the parent, resolution label) for non-root nodes
    pub edge: Option<(usize, u8)>,
    pub children: Vec<TreeNode>,
}

#[derive(Debug, Clone)]
pub struct ResolutionTree {
    pub root: TreeNode,
}

/// Parse an indented tree description:
///
/// ```text
/// family(K_nts; n=1; t=2)
///   family(R_n; n=1) @crossing=3 label=0
///     family(Q_n; n=1) @crossing=5 label=1
///   family(T(-4,2)) @crossing=3 label=1
/// ```
///
/// Nodes are `family(NAME; key=value; ...)` or `pd(X[..];.. +O k)`; each
/// non-root line carries `@crossing=K label=0|1`.
pub fn parse_tree(text: &str) -> Result<ResolutionTree, LesError> {
    let mut stack: Vec<(usize, TreeNode)> = Vec::new(); // (indent, node)
    for (ln, rawline) in text.lines().enumerate() {
        let line = ln + 1;
        if rawline.trim().is_empty() || rawline.trim_start().starts_with('#') {
            continue;
        }
        let indent = rawline.len() - rawline.trim_start().len();
        let body = rawline.trim();
        let (node_txt, annot) = match body.find('@') {
            Some(i) => (body[..i].trim(), Some(body[i + 1..].trim())),
            None => (body, None),
        };
        let source = if let Some(arg) =
            node_txt.strip_prefix("family(").and_then(|s| s.strip_suffix(')'))
        {
            let arg = arg.trim();
            let text = match arg.find(';') {
                Some(i) => format!("family={};{}", &arg[..i], &arg[i + 1..]),
                None => format!("family={arg}"),
            };
            NodeSource::Family(parse_family(&text)?)
        } else if let Some(arg) = node_txt.strip_prefix("pd(").and_then(|s| s.strip_suffix(')')) {
            NodeSource::Raw(parse_pd(arg)?)
        } else {
            return Err(LesError::Tree { line, msg: format!("unrecognized node `{node_txt}`") });
        };
        let edge = match annot {
            None => None,
            Some(a) => {
                let mut crossing: Option<usize> = None;
                let mut label: Option<u8> = None;
                for part in a.split_whitespace() {
                    if let Some(v) = part.strip_prefix("crossing=") {
                        crossing = v.parse().ok();
                    } else if let Some(v) = part.strip_prefix("label=") {
                        label = match v {
                            "0" => Some(0),
                            "1" => Some(1),
                            _ => None,
                        };
                    } else {
                        return Err(LesError::Tree {
                            line,
                            msg: format!("bad annotation `{part}`"),
                        });
                    }
                }
                match (crossing, label) {
                    (Some(c), Some(l)) => Some((c, l)),
                    _ => {
                        return Err(LesError::Tree {
                            line,
                            msg: "annotation needs crossing= and label=".into(),
                        })
                    }
                }
            }
        };
        let node = TreeNode { source, label: node_txt.to_string(), edge, children: Vec::new() };
        // pop completed siblings/subtrees
        while stack.last().is_some_and(|(ti, _)| *ti >= indent) {
            let (_, done) = stack.pop().unwrap();
            match stack.last_mut() {
                Some((_, parent)) => parent.children.push(done),
                None => return Err(LesError::Tree { line, msg: "multiple roots".into() }),
            }
        }
        if stack.is_empty() {
            if edge.is_some() {
                return Err(LesError::Tree { line, msg: "root cannot carry an edge".into() });
            }
            if indent != 0 {
                return Err(LesError::Tree { line, msg: "root must not be indented".into() });
            }
        } else if edge.is_none() {
            return Err(LesError::Tree { line, msg: "non-root line needs @crossing/label".into() });
        }
        stack.push((indent, node));
    }
    while stack.len() > 1 {
        let (_, done) = stack.pop().unwrap();
        stack.last_mut().unwrap().1.children.push(done);
    }
    match stack.pop() {
        Some((_, r)) => Ok(ResolutionTree { root: r }),
        None => Err(LesError::Tree { line: 0, msg: "empty tree".into() }),
    }
}

#[derive(Debug, Clone)]
pub struct NodeReport {
    pub depth: usize,
    pub label: String,
    pub kappa: Option<i32>,
    pub table: CollapsedHomology,
    /// for non-root nodes: the edge from the parent and its verification
    pub edge: Option<EdgeReport>,
}

#[derive(Debug, Clone)]
pub struct EdgeReport {
    pub crossing: usize,
    pub label: u8,
    pub shifts: (i32, i32, i32),
    pub exactness_ok: bool,
    /// the resolved parent diagram has the same HKh table as the node's own
    pub identified: bool,
    pub resolved_table: CollapsedHomology,
}

#[derive(Debug, Clone)]
pub struct TreeReport {
    pub nodes: Vec<NodeReport>,
    pub all_ok: bool,
}

fn node_diagram(n: &TreeNode) -> Result<PlanarDiagram, LesError> {
    match &n.source {
        NodeSource::Family(spec) => Ok(build_family(spec)?),
        NodeSource::Raw(d) => Ok(d.clone()),
    }
}

fn run_node(
    node: &TreeNode,
    parent: Option<(&PlanarDiagram, &BTreeMap<usize, TriangleReport>)>,
    depth: usize,
    out: &mut Vec<NodeReport>,
    all_ok: &mut bool,
) -> Result<(), LesError> {
    let d = node_diagram(node)?;
    let own = collapse(&khovanov_homology_scan(&d)?);
    let edge = match (node.edge, parent) {
        (Some((c, label)), Some((pd, tris))) => {
            let tri = &tris[&c];
            let resolved = pd.resolve(c, label)?;
            let resolved_table = collapse(&khovanov_homology_scan(&resolved)?);
            let identified = resolved_table == own;
            if !identified || !tri.exactness_ok {
                *all_ok = false;
            }
            Some(EdgeReport {
                crossing: c,
                label,
                shifts: tri.shifts,
                exactness_ok: tri.exactness_ok,
                identified,
                resolved_table,
            })
        }
        _ => None,
    };
    out.push(NodeReport {
        depth,
        label: node.label.clone(),
        kappa: own.kappa(),
        table: own,
        edge,
    });
    if !node.children.is_empty() {
        let mut tris: BTreeMap<usize, TriangleReport> = BTreeMap::new();
        for ch in &node.children {
            let (c, _) = ch.edge.ok_or(LesError::Tree {
                line: 0,
                msg: format!("node `{}` lacks an edge annotation", ch.label),
            })?;
            if !tris.contains_key(&c) {
                tris.insert(c, triangle_check(&d, c)?);
            }
        }
        for ch in &node.children {
            run_node(ch, Some((&d, &tris)), depth + 1, out, all_ok)?;
        }
    }
    Ok(())
}

/// Evaluate kappa at every node, run `triangle_check` on every resolution
/// edge, and verify each child's identification by table equality.
pub fn run_tree(tree: &ResolutionTree) -> Result<TreeReport, LesError> {
    let mut nodes = Vec::new();
    let mut all_ok = true;
    run_node(&tree.root, None, 0, &mut nodes, &mut all_ok)?;
    Ok(TreeReport { nodes, all_ok })
}

fn table_line(t: &CollapsedHomology) -> String {
    let cells: Vec<String> = t.iter().map(|(v, d)| format!("{v}:{d}")).collect();
    cells.join(" ")
}

impl TreeReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let pad = "  ".repeat(n.depth);
            let kappa = match n.kappa {
                Some(k) => k.to_string(),
                None => "-".into(),
            };
            match &n.edge {
                None => {
                    let _ = writeln!(s, "{pad}{} kappa={kappa}", n.label);
                }
                Some(e) => {
                    let _ = writeln!(
                        s,
                        "{pad}{} kappa={kappa} [crossing={} label={} shifts=({},{},{}) exact={} identified={}]",
                        n.label,
                        e.crossing,
                        e.label,
                        e.shifts.0,
                        e.shifts.1,
                        e.shifts.2,
                        e.exactness_ok,
                        e.identified
                    );
                    if !e.identified {
                        let _ = writeln!(s, "{pad}  resolved: {}", table_line(&e.resolved_table));
                        let _ = writeln!(s, "{pad}  declared: {}", table_line(&n.table));
                    }
                }
            }
        }
        let _ = writeln!(s, "tree_ok={}", self.all_ok);
        s
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let mut o = json!({
                    "depth": n.depth,
                    "label": n.label,
                    "kappa": n.kappa,
                    "table": n.table,
                });
                if let Some(e) = &n.edge {
                    o["edge"] = json!({
                        "crossing": e.crossing,
                        "label": e.label,
                        "shifts": [e.shifts.0, e.shifts.1, e.shifts.2],
                        "exactness_ok": e.exactness_ok,
                        "identified": e.identified,
                        "resolved_table": e.resolved_table,
                    });
                }
                o
            })
            .collect();
        json!({ "nodes": nodes, "tree_ok": self.all_ok })
    }
}

impl TriangleReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let (p, q, r) = self.shifts;
        let _ = writeln!(s, "shifts p={p} q={q} r={r}");
        let _ = writeln!(s, "{:>5} {:>6} {:>6} {:>6}", "v", "D", "Res0", "Res1");
        for (v, [a, b, c]) in &self.rows {
            let _ = writeln!(s, "{v:>5} {a:>6} {b:>6} {c:>6}");
        }
        let _ = writeln!(s, "exactness_ok={}", self.exactness_ok);
        for w in &self.windows {
            let name = match w.vanishes {
                Vertex::Diagram => "D",
                Vertex::Res0 => "Res0",
                Vertex::Res1 => "Res1",
            };
            let _ = writeln!(
                s,
                "window[{name} vanishes] v<={} ok={} matched={}",
                w.hi,
                w.ok,
                w.equalities.len()
            );
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shifts": { "p": self.shifts.0, "q": self.shifts.1, "r": self.shifts.2 },
            "rows": self.rows.iter().map(|(v, t)| json!([v, t[0], t[1], t[2]])).collect::<Vec<_>>(),
            "exactness_ok": self.exactness_ok,
            "windows": self.windows,
            "tables": { "diagram": self.diagram, "res0": self.res0, "res1": self.res1 },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::pretzel;

    fn kink_unknot() -> PlanarDiagram {
        // one positive kink
        parse_pd("X[1,1,2,2]").unwrap()
    }

    #[test]
    fn kink_unknot_triangle_exact() {
        let d = kink_unknot();
        let rep = triangle_check(&d, 0).unwrap();
        let (p, q, r) = rep.shifts;
        assert_eq!(p + q + r, -1);
        assert!(rep.exactness_ok);
        // one resolution is the unknot, the other a 2-component unlink
        let dims: Vec<usize> = vec![rep.res0.total_dim(), rep.res1.total_dim()];
        assert!(dims.contains(&2) && dims.contains(&4));
    }

    #[test]
    fn every_trefoil_crossing_exact() {
        let d = pretzel(1, 1, 1).unwrap();
        for c in 0..d.crossing_count() {
            let rep = triangle_check(&d, c).unwrap();
            assert!(rep.exactness_ok, "crossing {c}");
            assert_eq!(rep.shifts.0 + rep.shifts.1 + rep.shifts.2, -1);
        }
    }

    #[test]
    fn window_bounds_follow_vanishing() {
        let d = kink_unknot();
        let rep = triangle_check(&d, 0).unwrap();
        for w in &rep.windows {
            assert!(w.ok, "{:?}", w.vanishes);
            // directly recheck through the public entry point
            assert!(iso_window_check(&d, 0, w.hi).unwrap());
        }
        let max_hi = rep.windows.iter().map(|w| w.hi).max().unwrap();
        // far above every window no pattern can justify an isomorphism
        assert!(!iso_window_check(&d, 0, max_hi + 50).unwrap());
    }

    #[test]
    fn tree_parse_shapes() {
        let txt = "family(K_n; n=0)\n  pd(X[1,1,2,2]) @crossing=0 label=0\n  pd(X[1,1,2,2]) @crossing=0 label=1\n";
        let t = parse_tree(txt).unwrap();
        assert_eq!(t.root.children.len(), 2);
        assert_eq!(t.root.children[0].edge, Some((0, 0)));
        assert!(parse_tree("pd(X[1,1,2,2]) @crossing=0 label=1\n").is_err());
        assert!(parse_tree("family(K_n; n=0)\nfamily(K_n; n=1)\n").is_err());
        assert!(parse_tree("family(K_n; n=0)\n  family(K_n; n=1)\n").is_err());
    }

    #[test]
    fn single_node_tree_reports_kappa() {
        let t = parse_tree("pd(+O 1)\n").unwrap();
        let rep = run_tree(&t).unwrap();
        assert_eq!(rep.nodes.len(), 1);
        assert_eq!(rep.nodes[0].kappa, Some(-1));
        assert!(rep.all_ok);
        assert!(rep.render_text().contains("kappa=-1"));
    }

    #[test]
    fn raw_tree_verifies_resolutions() {
        // trefoil with both resolutions of crossing 0 declared as raw nodes
        let d = pretzel(1, 1, 1).unwrap();
        let r0 = d.resolve(0, 0).unwrap();
        let r1 = d.resolve(0, 1).unwrap();
        let txt = format!(
            "pd({})\n  pd({}) @crossing=0 label=0\n  pd({}) @crossing=0 label=1\n",
            d.to_pd_string(),
            r0.to_pd_string(),
            r1.to_pd_string()
        );
        let t = parse_tree(&txt).unwrap();
        let rep = run_tree(&t).unwrap();
        assert!(rep.all_ok);
        assert_eq!(rep.nodes.len(), 3);
        let j = rep.to_json();
        assert_eq!(j["nodes"].as_array().unwrap().len(), 3);
        assert_eq!(j["tree_ok"], Value::Bool(true));
    }

    #[test]
    fn mismatched_identification_reports_both_tables() {
        let d = pretzel(1, 1, 1).unwrap();
        // declare the wrong child on purpose
        let txt = format!("pd({})\n  pd(+O 2) @crossing=0 label=0\n", d.to_pd_string());
        let rep = run_tree(&parse_tree(&txt).unwrap()).unwrap();
        assert!(!rep.all_ok);
        let text = rep.render_text();
        assert!(text.contains("identified=false"));
        assert!(text.contains("resolved:"));
        assert!(text.contains("declared:"));
    }
}
