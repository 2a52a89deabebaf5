//! Special polygons: cut the cuboid graph to a tree, develop the tree into the
//! upper half-plane as copies of `Δ = (0, e^{iπ/3}, ∞)`, and read off the side
//! pairing and an independent set of generators from the boundary.
//!
//! Sides of `Δ`, counterclockwise: `A` from `∞` to `0` along the imaginary
//! axis, `B` from `0` to `ρ`, `C` from `ρ` to `∞`. Across `A` of `g·Δ` lies
//! `gS·Δ`, across `B` lies `gU·Δ` (meeting it along its `C`).

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cosets::CosetSystem;
use crate::cuboid::{build_graph, CuboidGraph};
use crate::error::{Error, Result};
use crate::geometry::{act_point, q, Geodesic, HPoint};
use crate::psl2::{Cusp, Psl2Elt};

/// How each edge's `S`-vertex appears in the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SLink {
    /// The two edges stay glued.
    Tree,
    /// The bivalent vertex was cut; the partner's triangle is not adjacent.
    Cut,
    /// Univalent type-(0) vertex.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    S,
    U,
}

/// The graph cut at bivalent type-(0) vertices into a tree rooted at the
/// distinguished edge.
#[derive(Clone, Debug)]
pub struct CutTree {
    sigma_s: Vec<u32>,
    sigma_u: Vec<u32>,
    root: u32,
    s_link: Vec<SLink>,
    parent: Vec<Option<(u32, Step)>>,
    order: Vec<u32>,
    cuts: Vec<(u32, u32)>,
    orbit_entry: Vec<u32>,
}

impl CutTree {
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn n_edges(&self) -> usize {
        self.sigma_s.len()
    }

    /// Cut vertices as `(x, x·S)`, `x` the half reached first.
    pub fn cuts(&self) -> &[(u32, u32)] {
        &self.cuts
    }

    pub fn s_link(&self, edge: u32) -> SLink {
        self.s_link[edge as usize]
    }

    pub fn parent(&self, edge: u32) -> Option<(u32, Step)> {
        self.parent[edge as usize]
    }

    /// Edges in the order the tree reached them.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Whether the `U`-orbit of an edge has a single element.
    fn u_fixed(&self, x: u32) -> bool {
        self.sigma_u[x as usize] == x
    }
}

/// Breadth-first over `U`-orbits from the distinguished edge; an `S`-pair
/// leading back into an orbit already reached is cut.
pub fn cut_to_tree(graph: &CuboidGraph) -> CutTree {
    let ss = graph.sigma_s().to_vec();
    let su = graph.sigma_u().to_vec();
    let n = ss.len();
    let root = graph.distinguished();
    let mut s_link = vec![SLink::Fixed; n];
    let mut parent: Vec<Option<(u32, Step)>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut cuts = Vec::new();
    let mut orbit_entry = vec![u32::MAX; n];
    let mut decided = vec![false; n];

    let visit = |entry: u32,
                 order: &mut Vec<u32>,
                 orbit_entry: &mut Vec<u32>,
                 parent: &mut Vec<Option<(u32, Step)>>| {
        let mut x = entry;
        loop {
            orbit_entry[x as usize] = entry;
            order.push(x);
            let next = su[x as usize];
            if next == entry {
                break;
            }
            parent[next as usize] = Some((x, Step::U));
            x = next;
        }
    };

    let mut queue = VecDeque::new();
    visit(root, &mut order, &mut orbit_entry, &mut parent);
    queue.push_back(root);
    while let Some(entry) = queue.pop_front() {
        let mut x = entry;
        loop {
            let z = ss[x as usize];
            if !decided[x as usize] {
                decided[x as usize] = true;
                decided[z as usize] = true;
                if z == x {
                    s_link[x as usize] = SLink::Fixed;
                } else if orbit_entry[z as usize] == u32::MAX {
                    s_link[x as usize] = SLink::Tree;
                    s_link[z as usize] = SLink::Tree;
                    parent[z as usize] = Some((x, Step::S));
                    visit(z, &mut order, &mut orbit_entry, &mut parent);
                    queue.push_back(z);
                } else {
                    s_link[x as usize] = SLink::Cut;
                    s_link[z as usize] = SLink::Cut;
                    cuts.push((x, z));
                }
            }
            x = su[x as usize];
            if x == entry {
                break;
            }
        }
    }
    CutTree {
        sigma_s: ss,
        sigma_u: su,
        root,
        s_link,
        parent,
        order,
        cuts,
        orbit_entry,
    }
}

/// The developing map: `root ↦ 1`, `x·S ↦ g_x S` across glued type-(0)
/// vertices, `x·U ↦ g_x U` around type-(1) vertices.
pub fn develop(tree: &CutTree) -> Vec<Psl2Elt> {
    let mut g = vec![Psl2Elt::identity(); tree.n_edges()];
    let s = Psl2Elt::s();
    let u = Psl2Elt::u();
    for &x in &tree.order {
        if let Some((p, step)) = tree.parent[x as usize] {
            g[x as usize] = g[p as usize].mul(match step {
                Step::S => &s,
                Step::U => &u,
            });
        }
    }
    g
}

/// The five kinds of boundary sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SideKind {
    /// `g·(∞ → 0)`, paired with another even side.
    Even,
    /// `g·(∞ → i)`, paired with the matching `HalfZero`.
    HalfInf,
    /// `g·(i → 0)`.
    HalfZero,
    /// `g·(0 → ρ)`, paired with the matching `E3Inf`.
    E3Zero,
    /// `g·(ρ → ∞)`.
    E3Inf,
}

impl SideKind {
    pub fn name(self) -> &'static str {
        match self {
            SideKind::Even => "even",
            SideKind::HalfInf => "half_inf",
            SideKind::HalfZero => "half_zero",
            SideKind::E3Zero => "e3_zero",
            SideKind::E3Inf => "e3_inf",
        }
    }

    fn partner(self) -> SideKind {
        match self {
            SideKind::Even => SideKind::Even,
            SideKind::HalfInf => SideKind::HalfZero,
            SideKind::HalfZero => SideKind::HalfInf,
            SideKind::E3Zero => SideKind::E3Inf,
            SideKind::E3Inf => SideKind::E3Zero,
        }
    }
}

/// A vertex of the polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyVertex {
    Cusp(Cusp),
    /// `g·i`, fixed by `gSg⁻¹`.
    Elliptic2 {
        carrier: Psl2Elt,
        point: HPoint,
    },
    /// `g·ρ`, fixed by `gUg⁻¹`.
    Elliptic3 {
        carrier: Psl2Elt,
        point: HPoint,
    },
}

impl PolyVertex {
    fn elliptic2(g: &Psl2Elt) -> Self {
        PolyVertex::Elliptic2 {
            carrier: g.clone(),
            point: act_point(g, &HPoint::i()),
        }
    }

    fn elliptic3(g: &Psl2Elt) -> Self {
        PolyVertex::Elliptic3 {
            carrier: g.clone(),
            point: act_point(g, &HPoint::rho()),
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, PolyVertex::Cusp(_))
    }

    pub fn point(&self) -> Option<&HPoint> {
        match self {
            PolyVertex::Cusp(_) => None,
            PolyVertex::Elliptic2 { point, .. } | PolyVertex::Elliptic3 { point, .. } => {
                Some(point)
            }
        }
    }

    /// Image under `h`.
    pub fn act(&self, h: &Psl2Elt) -> PolyVertex {
        match self {
            PolyVertex::Cusp(c) => PolyVertex::Cusp(h.act_cusp(c)),
            PolyVertex::Elliptic2 { carrier, .. } => PolyVertex::elliptic2(&h.mul(carrier)),
            PolyVertex::Elliptic3 { carrier, .. } => PolyVertex::elliptic3(&h.mul(carrier)),
        }
    }

    /// Same point of `ℍ ∪ P¹(Q)`; carriers may differ.
    pub fn same_point(&self, other: &PolyVertex) -> bool {
        match (self, other) {
            (PolyVertex::Cusp(a), PolyVertex::Cusp(b)) => a == b,
            (PolyVertex::Elliptic2 { point: a, .. }, PolyVertex::Elliptic2 { point: b, .. })
            | (PolyVertex::Elliptic3 { point: a, .. }, PolyVertex::Elliptic3 { point: b, .. }) => {
                a == b
            }
            _ => false,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            PolyVertex::Cusp(c) => json!(c.to_string()),
            PolyVertex::Elliptic2 { carrier, point } => {
                json!({"elliptic": 2, "carrier": matrix_json(carrier), "point": point.to_string()})
            }
            PolyVertex::Elliptic3 { carrier, point } => {
                json!({"elliptic": 3, "carrier": matrix_json(carrier), "point": point.to_string()})
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Side {
    pub kind: SideKind,
    /// The edge whose triangle carries this side.
    pub edge: u32,
    pub carrier: Psl2Elt,
    /// Endpoints in counterclockwise boundary order.
    pub start: PolyVertex,
    pub end: PolyVertex,
    pub pair: usize,
    pub generator: usize,
    /// Whether the generator maps this side onto its partner (rather than back).
    pub forward: bool,
    pub geodesic: Geodesic,
    /// Sign of `geodesic.side` on the polygon's side.
    pub interior: Ordering,
}

impl Side {
    /// The pairing map from this side onto its partner.
    pub fn pairing_map(&self, gens: &[Generator]) -> Psl2Elt {
        let g = &gens[self.generator].matrix;
        if self.forward {
            g.clone()
        } else {
            g.inv()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub matrix: Psl2Elt,
    /// `0` for infinite order.
    pub order: u8,
    /// `(domain side, image side)`.
    pub sides: (usize, usize),
}

/// Per-edge data consumed by Schreier rewriting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchreierS {
    Trivial,
    /// The Schreier element `g_x S g_{xS}⁻¹` is `gen^exp`.
    Gen {
        gen: usize,
        exp: i8,
    },
}

#[derive(Clone, Debug)]
pub struct SpecialPolygon {
    pub(crate) sigma_s: Vec<u32>,
    pub(crate) sigma_u: Vec<u32>,
    pub(crate) distinguished: u32,
    /// `g_x` for every edge `x`.
    pub triangles: Vec<Psl2Elt>,
    /// Counterclockwise boundary.
    pub sides: Vec<Side>,
    pub generators: Vec<Generator>,
    pub(crate) schreier_s: Vec<SchreierS>,
    /// Order-3 generator at a `U`-fixed edge.
    pub(crate) schreier_u: Vec<Option<usize>>,
    pub cuts: Vec<(u32, u32)>,
}

impl SpecialPolygon {
    pub fn pairing(&self) -> Vec<usize> {
        self.sides.iter().map(|s| s.pair).collect()
    }

    /// Boundary vertices: vertex `k` is the end of side `k`.
    pub fn vertices(&self) -> Vec<PolyVertex> {
        self.sides.iter().map(|s| s.end.clone()).collect()
    }

    /// Whether `z` lies in the closed polygon.
    pub fn contains(&self, z: &HPoint) -> bool {
        self.sides.iter().all(|s| {
            let o = s.geodesic.side(z);
            o == Ordering::Equal || o == s.interior
        })
    }

    /// Whether `z` lies in the open polygon.
    pub fn contains_strictly(&self, z: &HPoint) -> bool {
        self.sides.iter().all(|s| s.geodesic.side(z) == s.interior)
    }

    /// Vertex cycles of cusps under the side pairing.
    pub fn cusp_classes(&self) -> usize {
        let m = self.sides.len();
        if m == 0 {
            return 0;
        }
        let mut uf = UnionFind::new(m);
        let prev = |k: usize| (k + m - 1) % m;
        for (k, s) in self.sides.iter().enumerate() {
            // gen(start s) = end(pair), gen(end s) = start(pair)
            uf.union(prev(k), s.pair);
            uf.union(k, prev(s.pair));
        }
        let mut roots: Vec<usize> = (0..m)
            .filter(|&k| self.sides[k].end.is_cusp())
            .map(|k| uf.find(k))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// `{triangles, sides, generators}`.
    pub fn to_json(&self) -> Value {
        json!({
            "triangles": self.triangles.iter().map(matrix_json).collect::<Vec<_>>(),
            "sides": self.sides.iter().map(|s| json!({
                "kind": s.kind.name(),
                "carrier": matrix_json(&s.carrier),
                "endpoints": [s.start.to_json(), s.end.to_json()],
                "pair": s.pair,
                "generator": s.generator,
            })).collect::<Vec<_>>(),
            "generators": self.generators.iter().map(|g| json!({
                "matrix": matrix_json(&g.matrix),
                "order": g.order,
            })).collect::<Vec<_>>(),
        })
    }

    /// Picture of the polygon; paired sides share a color.
    pub fn to_svg(&self) -> String {
        const W: f64 = 800.0;
        const H: f64 = 400.0;
        const TOP: f64 = 2.0;
        let finite: Vec<f64> = self
            .sides
            .iter()
            .flat_map(|s| [&s.start, &s.end])
            .filter_map(|v| match v {
                PolyVertex::Cusp(c) if !c.is_infinity() => Some(cusp_f64(c)),
                PolyVertex::Cusp(_) => None,
                other => other.point().map(|p| p.to_f64().0),
            })
            .collect();
        let lo = finite.iter().cloned().fold(0.0, f64::min) - 0.25;
        let hi = finite.iter().cloned().fold(0.5, f64::max) + 0.25;
        let top = TOP.max((hi - lo) / 2.0);
        let sx = |x: f64| (x - lo) / (hi - lo) * W;
        let sy = |y: f64| H - y.min(top) / top * (H - 10.0);
        let pos = |v: &PolyVertex, line_x: f64| -> (f64, f64) {
            match v {
                PolyVertex::Cusp(c) if c.is_infinity() => (line_x, top),
                PolyVertex::Cusp(c) => (cusp_f64(c), 0.0),
                other => other.point().expect("finite").to_f64(),
            }
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
        );
        let _ = writeln!(
            out,
            "  <line x1=\"0\" y1=\"{H}\" x2=\"{W}\" y2=\"{H}\" stroke=\"#999\"/>"
        );
        for s in &self.sides {
            let hue = (s.generator * 137) % 360;
            let line_x = match &s.geodesic {
                Geodesic::Vertical { x } => q_f64(x),
                Geodesic::Circle { center, .. } => q_f64(center),
            };
            let (x1, y1) = pos(&s.start, line_x);
            let (x2, y2) = pos(&s.end, line_x);
            let path = match &s.geodesic {
                Geodesic::Vertical { .. } => {
                    format!(
                        "M {:.3} {:.3} L {:.3} {:.3}",
                        sx(x1),
                        sy(y1),
                        sx(x2),
                        sy(y2)
                    )
                }
                Geodesic::Circle { radius_sq, .. } => {
                    let r = q_f64(radius_sq).sqrt();
                    let (rx, ry) = (r / (hi - lo) * W, r / top * (H - 10.0));
                    let sweep = if x2 > x1 { 1 } else { 0 };
                    format!(
                        "M {:.3} {:.3} A {rx:.3} {ry:.3} 0 0 {sweep} {:.3} {:.3}",
                        sx(x1),
                        sy(y1),
                        sx(x2),
                        sy(y2)
                    )
                }
            };
            let _ = writeln!(
                out,
                "  <path d=\"{path}\" fill=\"none\" stroke=\"hsl({hue},70%,45%)\" stroke-width=\"2\"><title>{} side, generator {}</title></path>",
                s.kind.name(),
                s.generator
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn q_f64(v: &crate::geometry::Q) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(0.0)
}

fn cusp_f64(c: &Cusp) -> f64 {
    use num_traits::ToPrimitive;
    c.numer().to_f64().unwrap_or(0.0) / c.denom().to_f64().unwrap_or(1.0)
}

/// Matrix entries as JSON numbers, or strings when too large.
pub fn matrix_json(g: &Psl2Elt) -> Value {
    match g.to_i64() {
        Some(e) => json!(e),
        None => json!(g.entries().map(|v| v.to_string())),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Side `A`, `B`, `C` of `Δ`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum DSide {
    A,
    B,
    C,
}

impl DSide {
    fn next(self) -> DSide {
        match self {
            DSide::A => DSide::B,
            DSide::B => DSide::C,
            DSide::C => DSide::A,
        }
    }
}

struct RawSide {
    kind: SideKind,
    edge: u32,
}

/// Counterclockwise boundary by an Euler tour of the tree; a triangle entered
/// through side `e` continues with the two sides after `e`.
fn boundary(tree: &CutTree) -> Vec<RawSide> {
    let mut out = Vec::new();
    // (edge, next side to process, sides left)
    let mut stack: Vec<(u32, DSide, u8)> = vec![(tree.root, DSide::A, 3)];
    while let Some(top) = stack.last_mut() {
        let (x, side, left) = *top;
        if left == 0 {
            stack.pop();
            continue;
        }
        top.1 = side.next();
        top.2 = left - 1;
        let entry = tree.orbit_entry[x as usize];
        match side {
            DSide::A => match tree.s_link[x as usize] {
                SLink::Fixed => {
                    out.push(RawSide {
                        kind: SideKind::HalfInf,
                        edge: x,
                    });
                    out.push(RawSide {
                        kind: SideKind::HalfZero,
                        edge: x,
                    });
                }
                SLink::Cut => out.push(RawSide {
                    kind: SideKind::Even,
                    edge: x,
                }),
                SLink::Tree => {
                    let z = tree.sigma_s[x as usize];
                    // the parent link is the entry side and is never revisited
                    debug_assert_eq!(tree.parent[z as usize], Some((x, Step::S)));
                    stack.push((z, DSide::B, 2));
                }
            },
            DSide::B => {
                if tree.u_fixed(x) {
                    out.push(RawSide {
                        kind: SideKind::E3Zero,
                        edge: x,
                    });
                } else {
                    let y = tree.sigma_u[x as usize];
                    if y != entry {
                        stack.push((y, DSide::A, 2));
                    }
                }
            }
            DSide::C => {
                if tree.u_fixed(x) {
                    out.push(RawSide {
                        kind: SideKind::E3Inf,
                        edge: x,
                    });
                }
            }
        }
    }
    out
}

fn endpoints(kind: SideKind, g: &Psl2Elt) -> (PolyVertex, PolyVertex) {
    let inf = || PolyVertex::Cusp(g.act_cusp(&Cusp::infinity()));
    let zero = || PolyVertex::Cusp(g.act_cusp(&Cusp::zero()));
    match kind {
        SideKind::Even => (inf(), zero()),
        SideKind::HalfInf => (inf(), PolyVertex::elliptic2(g)),
        SideKind::HalfZero => (PolyVertex::elliptic2(g), zero()),
        SideKind::E3Zero => (zero(), PolyVertex::elliptic3(g)),
        SideKind::E3Inf => (PolyVertex::elliptic3(g), inf()),
    }
}

fn side_geodesic(kind: SideKind, g: &Psl2Elt) -> Geodesic {
    let (a, b) = match kind {
        SideKind::Even | SideKind::HalfInf | SideKind::HalfZero => (Cusp::infinity(), Cusp::zero()),
        SideKind::E3Zero => (Cusp::zero(), Cusp::from_i64(2, 1).expect("cusp")),
        SideKind::E3Inf => (Cusp::from_i64(1, 2).expect("cusp"), Cusp::infinity()),
    };
    // the carrier of the side through 0 and ρ is |z - 1| = 1, with ends 0 and 2;
    // the one through ρ and ∞ is Re z = 1/2, with ends 1/2 and ∞
    let (a, b) = (g.act_cusp(&a), g.act_cusp(&b));
    Geodesic::between_cusps(&a, &b).expect("distinct endpoints")
}

/// A point strictly inside `Δ`.
pub fn delta_interior() -> HPoint {
    HPoint::rational(q(1, 4), q(1, 1)).expect("upper half-plane")
}

/// Build the polygon of a coset system: graph, tree, development, boundary.
pub fn build(system: &CosetSystem) -> Result<SpecialPolygon> {
    let graph = build_graph(system)?;
    let tree = cut_to_tree(&graph);
    let dev = develop(&tree);
    assemble(system, &tree, dev)
}

pub fn assemble(system: &CosetSystem, tree: &CutTree, dev: Vec<Psl2Elt>) -> Result<SpecialPolygon> {
    let raw = boundary(tree);
    let m = raw.len();
    let n = tree.n_edges();
    let mut generators: Vec<Generator> = Vec::new();
    let mut schreier_s = vec![SchreierS::Trivial; n];
    let mut schreier_u = vec![None; n];
    let mut position = std::collections::HashMap::with_capacity(m);
    for (k, r) in raw.iter().enumerate() {
        position.insert((r.edge, r.kind), k);
    }
    let mut pair = vec![usize::MAX; m];
    let mut gen_of = vec![usize::MAX; m];
    let mut forward = vec![false; m];
    for (k, r) in raw.iter().enumerate() {
        if pair[k] != usize::MAX {
            continue;
        }
        let x = r.edge;
        let g = &dev[x as usize];
        let (partner_edge, matrix, order) = match r.kind {
            SideKind::Even => {
                let z = tree.sigma_s[x as usize];
                let h = &dev[z as usize];
                (z, h.mul(&Psl2Elt::s()).mul(&g.inv()), 0)
            }
            SideKind::HalfInf | SideKind::HalfZero => (x, g.conjugate(&Psl2Elt::s()), 2),
            SideKind::E3Zero | SideKind::E3Inf => (x, g.conjugate(&Psl2Elt::u2()), 3),
        };
        let other = *position
            .get(&(partner_edge, r.kind.partner()))
            .ok_or_else(|| Error::Internal(format!("side of edge {x} has no partner")))?;
        // elliptic generators go from the half at ∞ (order 2) or the side at 0 (order 3)
        let (dom, img) = match r.kind {
            SideKind::HalfZero | SideKind::E3Inf => (other, k),
            _ => (k, other),
        };
        let id = generators.len();
        system
            .check_member(&matrix)
            .map_err(|e| Error::Internal(format!("generator {matrix} is not in the group: {e}")))?;
        generators.push(Generator {
            matrix,
            order,
            sides: (dom, img),
        });
        pair[dom] = img;
        pair[img] = dom;
        gen_of[dom] = id;
        gen_of[img] = id;
        forward[dom] = true;
        match r.kind {
            SideKind::Even => {
                schreier_s[x as usize] = SchreierS::Gen { gen: id, exp: -1 };
                schreier_s[partner_edge as usize] = SchreierS::Gen { gen: id, exp: 1 };
            }
            SideKind::HalfInf | SideKind::HalfZero => {
                schreier_s[x as usize] = SchreierS::Gen { gen: id, exp: 1 };
            }
            _ => schreier_u[x as usize] = Some(id),
        }
    }
    let interior_base = delta_interior();
    let sides = raw
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let g = dev[r.edge as usize].clone();
            let (start, end) = endpoints(r.kind, &g);
            let geodesic = side_geodesic(r.kind, &g);
            let interior = geodesic.side(&act_point(&g, &interior_base));
            Side {
                kind: r.kind,
                edge: r.edge,
                carrier: g,
                start,
                end,
                pair: pair[k],
                generator: gen_of[k],
                forward: forward[k],
                geodesic,
                interior,
            }
        })
        .collect();
    Ok(SpecialPolygon {
        sigma_s: tree.sigma_s.clone(),
        sigma_u: tree.sigma_u.clone(),
        distinguished: tree.root,
        triangles: dev,
        sides,
        generators,
        schreier_s,
        schreier_u,
        cuts: tree.cuts.clone(),
    })
}

/// A failed special-polygon condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TriangleCount { expected: usize, found: usize },
    SideGeneratorCount { sides: usize, generators: usize },
    NotInvolution { side: usize },
    FixedSide { side: usize },
    KindMismatch { side: usize },
    GeneratorMismatch { side: usize },
    Disconnected { side: usize },
    PairingMapMismatch { side: usize },
    EllipticHalvesApart { side: usize },
    EllipticCornerApart { side: usize },
    WrongOrder { generator: usize },
    Interior { side: usize },
}

/// Symbolic check of the special-polygon axioms; empty means valid.
pub fn validate_special(poly: &SpecialPolygon) -> Vec<Violation> {
    let mut v = Vec::new();
    let m = poly.sides.len();
    if poly.triangles.len() != poly.sigma_s.len() {
        v.push(Violation::TriangleCount {
            expected: poly.sigma_s.len(),
            found: poly.triangles.len(),
        });
    }
    if m != 2 * poly.generators.len() {
        v.push(Violation::SideGeneratorCount {
            sides: m,
            generators: poly.generators.len(),
        });
    }
    for (k, s) in poly.sides.iter().enumerate() {
        let Some(p) = poly.sides.get(s.pair) else {
            v.push(Violation::NotInvolution { side: k });
            continue;
        };
        if s.pair == k {
            v.push(Violation::FixedSide { side: k });
            continue;
        }
        if p.pair != k {
            v.push(Violation::NotInvolution { side: k });
            continue;
        }
        if p.kind != s.kind.partner() {
            v.push(Violation::KindMismatch { side: k });
        }
        if s.generator != p.generator
            || s.forward == p.forward
            || s.generator >= poly.generators.len()
        {
            v.push(Violation::GeneratorMismatch { side: k });
            continue;
        }
        // consecutive sides share a vertex
        let next = &poly.sides[(k + 1) % m];
        if !s.end.same_point(&next.start) {
            v.push(Violation::Disconnected { side: k });
        }
        // the pairing map reverses boundary orientation
        let h = s.pairing_map(&poly.generators);
        if !s.start.act(&h).same_point(&p.end) || !s.end.act(&h).same_point(&p.start) {
            v.push(Violation::PairingMapMismatch { side: k });
        }
        // elliptic pairs meet at their fixed point with angle π or 2π/3
        let adjacent = (k + 1) % m == s.pair || (s.pair + 1) % m == k;
        match s.kind {
            SideKind::HalfInf | SideKind::HalfZero => {
                if !adjacent || s.geodesic != p.geodesic {
                    v.push(Violation::EllipticHalvesApart { side: k });
                }
            }
            SideKind::E3Zero | SideKind::E3Inf => {
                let corner = if s.kind == SideKind::E3Zero {
                    &s.end
                } else {
                    &s.start
                };
                if !adjacent || !matches!(corner, PolyVertex::Elliptic3 { .. }) {
                    v.push(Violation::EllipticCornerApart { side: k });
                }
            }
            SideKind::Even => {}
        }
        // the polygon lies on one side of every side
        if s.interior == Ordering::Equal {
            v.push(Violation::Interior { side: k });
        }
    }
    for (i, g) in poly.generators.iter().enumerate() {
        let ok = match g.order {
            2 => !g.matrix.is_identity() && g.matrix.pow(2).is_identity(),
            3 => !g.matrix.is_identity() && g.matrix.pow(3).is_identity(),
            0 => num_traits::Signed::abs(&g.matrix.trace()) >= 2.into(),
            _ => false,
        };
        if !ok {
            v.push(Violation::WrongOrder { generator: i });
        }
    }
    v
}
