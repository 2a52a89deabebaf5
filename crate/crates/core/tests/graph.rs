mod common;

use cuboid_core::cosets::{build, Family};
use cuboid_core::cuboid::{build_graph, pointed_isomorphic};
use cuboid_core::Execution;

#[test]
fn invariants_match_closed_forms() {
    for fam in Family::ALL {
        for n in 1..=30 {
            let g = build_graph(&build(fam, n).unwrap()).unwrap();
            let inv = g.invariants();
            let want = common::expected(fam, n);
            assert_eq!(
                (inv.index, inv.e2, inv.e3),
                (want.index, want.e2, want.e3),
                "{fam}({n})"
            );
            assert_eq!(inv.cusp_widths, want.cusp_widths, "{fam}({n})");
            assert_eq!(inv.genus, want.genus, "{fam}({n})");
            assert_eq!(inv.cusp_widths.iter().sum::<usize>(), inv.index);
            assert_eq!(inv.n_generators, inv.betti + inv.e2 + inv.e3);
            assert!(6 * inv.n_generators > inv.index, "{fam}({n})");
        }
    }
}

#[test]
fn principal_congruence_groups_have_no_elliptic_points() {
    for n in 3..=30 {
        let inv = build_graph(&build(Family::Gamma, n).unwrap())
            .unwrap()
            .invariants();
        assert_eq!((inv.e2, inv.e3), (0, 0));
    }
}

#[test]
fn valencies_and_incidence() {
    for fam in Family::ALL {
        for n in [1, 2, 3, 9, 14] {
            let g = build_graph(&build(fam, n).unwrap()).unwrap();
            assert!(g.v0().iter().all(|v| v.len() == 1 || v.len() == 2));
            assert!(g.v1().iter().all(|v| v.len() == 1 || v.len() == 3));
            for (j, v) in g.v1().iter().enumerate() {
                for (k, &x) in v.iter().enumerate() {
                    assert_eq!(g.endpoints(x).1, j as u32);
                    assert_eq!(g.sigma_u()[x as usize], v[(k + 1) % v.len()]);
                }
            }
            let total: usize = g.v0().iter().map(Vec::len).sum();
            assert_eq!(total, g.n_edges());
        }
    }
}

#[test]
fn orbit_of_the_distinguished_edge() {
    for fam in Family::ALL {
        for n in 1..=16 {
            let g = build_graph(&build(fam, n).unwrap()).unwrap();
            let orbit = g.distinguished_edge_orbit();
            assert_eq!(g.n_edges() % orbit.len(), 0);
            assert_eq!(orbit.len() == g.n_edges(), g.is_normal());
            assert_eq!(
                orbit,
                g.distinguished_edge_orbit_with(Execution::Sequential)
            );
        }
    }
}

#[test]
fn conjugate_families_are_distinct_pointed_graphs() {
    for n in 2..=12 {
        let a = build_graph(&build(Family::Gamma0, n).unwrap()).unwrap();
        let b = build_graph(&build(Family::GammaUpper0, n).unwrap()).unwrap();
        assert!(!pointed_isomorphic(&a, &b));
        assert_eq!(a.invariants(), b.invariants());
    }
}

#[test]
fn serializations_are_deterministic() {
    let a = build_graph(&build(Family::Gamma1, 7).unwrap()).unwrap();
    let b = build_graph(&build(Family::Gamma1, 7).unwrap()).unwrap();
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());
    assert_eq!(a.to_dot(), b.to_dot());
    let j = a.to_json();
    assert_eq!(j["sigma_S"].as_array().unwrap().len(), 24);
    assert_eq!(j["v1"].as_array().unwrap().len(), a.v1().len());
}
