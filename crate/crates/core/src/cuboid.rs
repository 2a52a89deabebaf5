//! The pointed bipartite cuboid graph of a subgroup and its invariants.
//!
//! Edges are cosets. Type-(0) vertices are `S`-orbits (valency 1 or 2),
//! type-(1) vertices are `U`-orbits (valency 1 or 3) kept in the cyclic order
//! `(x, x·U, x·U²)`. Every vertex is named by the smallest edge in its orbit.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cosets::CosetSystem;
use crate::error::Result;
use crate::par::{map_range, Execution};

/// Where a second edge between the endpoints of the distinguished edge sits in
/// the cyclic order of its trivalent vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleEdge {
    /// The parallel edge is `r·U`.
    After,
    /// The parallel edge is `r·U²`.
    Before,
}

#[derive(Clone, Debug)]
pub struct CuboidGraph {
    sigma_s: Vec<u32>,
    sigma_u: Vec<u32>,
    distinguished: u32,
    v0: Vec<Vec<u32>>,
    v1: Vec<Vec<u32>>,
    edge_v0: Vec<u32>,
    edge_v1: Vec<u32>,
    double_edge: Option<DoubleEdge>,
}

impl CuboidGraph {
    pub fn n_edges(&self) -> usize {
        self.sigma_s.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.v0.len() + self.v1.len()
    }

    pub fn sigma_s(&self) -> &[u32] {
        &self.sigma_s
    }

    pub fn sigma_u(&self) -> &[u32] {
        &self.sigma_u
    }

    pub fn distinguished(&self) -> u32 {
        self.distinguished
    }

    /// Type-(0) vertices, ordered by their smallest edge.
    pub fn v0(&self) -> &[Vec<u32>] {
        &self.v0
    }

    /// Type-(1) vertices in cyclic order, ordered by their smallest edge.
    pub fn v1(&self) -> &[Vec<u32>] {
        &self.v1
    }

    /// `(type-(0) vertex, type-(1) vertex)` of an edge.
    pub fn endpoints(&self, edge: u32) -> (u32, u32) {
        (self.edge_v0[edge as usize], self.edge_v1[edge as usize])
    }

    pub fn distinguished_double_edge(&self) -> Option<DoubleEdge> {
        self.double_edge
    }

    /// Cycles of the `T = U²S` action; each is a cusp and its length the width.
    pub fn cusp_orbits(&self) -> Vec<Vec<u32>> {
        let n = self.n_edges();
        let t = |x: u32| self.sigma_s[self.sigma_u[self.sigma_u[x as usize] as usize] as usize];
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cycle.push(x);
                x = t(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn invariants(&self) -> SurfaceInvariants {
        let n = self.n_edges();
        let e2 = self.v0.iter().filter(|v| v.len() == 1).count();
        let e3 = self.v1.iter().filter(|v| v.len() == 1).count();
        let mut cusp_widths: Vec<usize> = self.cusp_orbits().iter().map(Vec::len).collect();
        cusp_widths.sort_unstable();
        let betti = n + 1 - self.n_vertices();
        let cusp_count = cusp_widths.len();
        debug_assert!((betti + 1 - cusp_count).is_multiple_of(2));
        SurfaceInvariants {
            index: n,
            e2,
            e3,
            cusp_count,
            cusp_widths,
            betti,
            genus: (betti + 1 - cusp_count) / 2,
            n_generators: betti + e2 + e3,
        }
    }

    /// Images of the distinguished edge under graph automorphisms.
    pub fn distinguished_edge_orbit(&self) -> Vec<u32> {
        self.distinguished_edge_orbit_with(Execution::default())
    }

    pub fn distinguished_edge_orbit_with(&self, exec: Execution) -> Vec<u32> {
        let hits = map_range(exec, self.n_edges(), |e| {
            extend_isomorphism(self, self, self.distinguished, e as u32).is_some()
        });
        (0..self.n_edges() as u32)
            .filter(|&e| hits[e as usize])
            .collect()
    }

    /// Whether the automorphism group is transitive on edges.
    pub fn is_normal(&self) -> bool {
        self.distinguished_edge_orbit().len() == self.n_edges()
    }

    /// `{n, sigma_S, sigma_U, distinguished, v0, v1}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n_edges(),
            "sigma_S": self.sigma_s,
            "sigma_U": self.sigma_u,
            "distinguished": self.distinguished,
            "v0": self.v0,
            "v1": self.v1,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph cuboid {\n");
        for (i, v) in self.v0.iter().enumerate() {
            let _ = writeln!(s, "  a{i} [shape=circle, label=\"{}\"];", v[0]);
        }
        for (j, v) in self.v1.iter().enumerate() {
            let _ = writeln!(s, "  b{j} [shape=triangle, label=\"{}\"];", v[0]);
        }
        for x in 0..self.n_edges() as u32 {
            let (a, b) = self.endpoints(x);
            let style = if x == self.distinguished {
                ", style=bold, penwidth=3"
            } else {
                ""
            };
            let _ = writeln!(s, "  a{a} -- b{b} [label=\"{x}\"{style}];");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceInvariants {
    pub index: usize,
    pub e2: usize,
    pub e3: usize,
    pub cusp_count: usize,
    /// Ascending.
    pub cusp_widths: Vec<usize>,
    pub betti: usize,
    pub genus: usize,
    pub n_generators: usize,
}

pub fn build_graph(system: &CosetSystem) -> Result<CuboidGraph> {
    system.validate()?;
    let (ss, su) = (system.sigma_s(), system.sigma_u());
    let n = ss.len();
    let mut v0 = Vec::new();
    let mut v1 = Vec::new();
    let mut edge_v0 = vec![0u32; n];
    let mut edge_v1 = vec![0u32; n];
    for x in 0..n as u32 {
        let sx = ss[x as usize];
        if x <= sx {
            let id = v0.len() as u32;
            edge_v0[x as usize] = id;
            edge_v0[sx as usize] = id;
            v0.push(if sx == x { vec![x] } else { vec![x, sx] });
        }
        let ux = su[x as usize];
        let uux = su[ux as usize];
        if x <= ux && x <= uux {
            let id = v1.len() as u32;
            for y in [x, ux, uux] {
                edge_v1[y as usize] = id;
            }
            v1.push(if ux == x { vec![x] } else { vec![x, ux, uux] });
        }
    }
    let r = system.distinguished();
    let rs = ss[r as usize];
    let ru = su[r as usize];
    let double_edge = if rs == r || ru == r {
        None
    } else if rs == ru {
        Some(DoubleEdge::After)
    } else if rs == su[ru as usize] {
        Some(DoubleEdge::Before)
    } else {
        None
    };
    Ok(CuboidGraph {
        sigma_s: ss.to_vec(),
        sigma_u: su.to_vec(),
        distinguished: r,
        v0,
        v1,
        edge_v0,
        edge_v1,
        double_edge,
    })
}

/// The unique edge map `φ` with `φ(from) = to` commuting with both
/// permutations, if it exists and is a bijection.
pub fn extend_isomorphism(
    g1: &CuboidGraph,
    g2: &CuboidGraph,
    from: u32,
    to: u32,
) -> Option<Vec<u32>> {
    let n = g1.n_edges();
    if n != g2.n_edges() {
        return None;
    }
    const UNSET: u32 = u32::MAX;
    let mut phi = vec![UNSET; n];
    let mut hit = vec![false; n];
    phi[from as usize] = to;
    hit[to as usize] = true;
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        let fx = phi[x as usize] as usize;
        for (y, fy) in [
            (g1.sigma_s[x as usize], g2.sigma_s[fx]),
            (g1.sigma_u[x as usize], g2.sigma_u[fx]),
        ] {
            match phi[y as usize] {
                UNSET => {
                    if hit[fy as usize] {
                        return None;
                    }
                    hit[fy as usize] = true;
                    phi[y as usize] = fy;
                    stack.push(y);
                }
                v if v != fy => return None,
                _ => {}
            }
        }
    }
    Some(phi)
}

/// Isomorphism of pointed graphs.
pub fn pointed_isomorphic(g1: &CuboidGraph, g2: &CuboidGraph) -> bool {
    extend_isomorphism(g1, g2, g1.distinguished, g2.distinguished).is_some()
}
