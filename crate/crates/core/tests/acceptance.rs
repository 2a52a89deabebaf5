//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::time::{Duration, Instant};

use cuboid_core::cosets::{build, build_from_oracle, Family};
use cuboid_core::cuboid::{build_graph, pointed_isomorphic};
use cuboid_core::geometry::{act_point, Q};
use cuboid_core::polygon::{self, validate_special};
use cuboid_core::reduce::{express, locate_point, ExactPoint, GenWord, Method};
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{rngs::StdRng, Rng, SeedableRng};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn structural_table() -> Outcome {
    let mut groups: Vec<(Family, u64)> = [2, 3, 4, 5, 6, 7, 10, 11, 13]
        .into_iter()
        .map(|n| (Family::Gamma0, n))
        .collect();
    groups.extend([2, 3, 4, 5].map(|n| (Family::Gamma, n)));
    groups.push((Family::Gamma1, 5));
    for &(fam, n) in &groups {
        let inv = build_graph(&build(fam, n).unwrap()).unwrap().invariants();
        let want = common::expected(fam, n);
        let got = common::Expected {
            index: inv.index,
            e2: inv.e2,
            e3: inv.e3,
            cusp_widths: inv.cusp_widths.clone(),
            genus: inv.genus,
        };
        if got != want || inv.cusp_count != want.cusp_widths.len() {
            return fail(format!(
                "{fam}({n}): graph gives {got:?}, closed form {want:?}"
            ));
        }
    }
    pass(format!(
        "{} groups match the closed-form oracles",
        groups.len()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut count = 0;
    for fam in Family::ALL {
        for n in 1..=20u64 {
            let fast = build_graph(&build(fam, n).unwrap()).unwrap();
            let slow = match build_from_oracle(fam.predicate(n), 100_000) {
                Ok(s) => build_graph(&s).unwrap(),
                Err(e) => return fail(format!("{fam}({n}): oracle build failed: {e}")),
            };
            if !pointed_isomorphic(&fast, &slow) {
                return fail(format!("{fam}({n}): fast and oracle systems differ"));
            }
            count += 1;
        }
    }
    pass(format!(
        "{count} systems pointed-isomorphic to their oracle builds"
    ))
}

fn polygon_validity() -> Outcome {
    let mut count = 0;
    for fam in Family::ALL {
        for n in 1..=30u64 {
            let sys = build(fam, n).unwrap();
            let poly = match polygon::build(&sys) {
                Ok(p) => p,
                Err(e) => return fail(format!("{fam}({n}): {e}")),
            };
            let v = validate_special(&poly);
            if !v.is_empty() {
                return fail(format!("{fam}({n}): {v:?}"));
            }
            let (t, s, g) = (
                poly.triangles.len(),
                poly.sides.len(),
                poly.generators.len(),
            );
            if t != sys.n() || s != 2 * g || 6 * g <= sys.n() {
                return fail(format!(
                    "{fam}({n}): triangles {t}, sides {s}, generators {g}, index {}",
                    sys.n()
                ));
            }
            count += 1;
        }
    }
    pass(format!("{count} special polygons valid"))
}

fn generators_independent() -> Outcome {
    let mut brute = 0;
    let mut total = 0;
    for fam in Family::ALL {
        for n in 1..=30u64 {
            let sys = build(fam, n).unwrap();
            let poly = polygon::build(&sys).unwrap();
            for g in &poly.generators {
                if sys.check_member(&g.matrix).is_err() {
                    return fail(format!(
                        "{fam}({n}): generator {} not in the group",
                        g.matrix
                    ));
                }
                let exact = match g.order {
                    2 => !g.matrix.is_identity() && g.matrix.pow(2).is_identity(),
                    3 => {
                        !g.matrix.is_identity()
                            && !g.matrix.pow(2).is_identity()
                            && g.matrix.pow(3).is_identity()
                    }
                    // non-identity elements of finite order have |trace| < 2
                    _ => g.matrix.trace().abs() >= BigInt::from(2),
                };
                if !exact {
                    return fail(format!(
                        "{fam}({n}): generator {} has the wrong order",
                        g.matrix
                    ));
                }
            }
            total += 1;
            if poly.generators.len() <= 12 {
                if let Some(rel) = common::find_relation(&poly.generators, 3) {
                    return fail(format!("{fam}({n}): relation {rel:?}"));
                }
                brute += 1;
            }
        }
    }
    pass(format!(
        "generators of {total} groups in the group with exact orders; no relation of length <= 6 in {brute} groups"
    ))
}

fn round_trip() -> Outcome {
    let groups = [
        (Family::Gamma, 1),
        (Family::Gamma0, 2),
        (Family::Gamma0, 3),
        (Family::Gamma0, 6),
        (Family::Gamma0, 11),
        (Family::Gamma, 2),
        (Family::Gamma, 3),
        (Family::Gamma1, 5),
        (Family::GammaUpper0, 7),
        (Family::GammaUpper1, 4),
    ];
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut located = 0;
    for (fam, n) in groups {
        let sys = build(fam, n).unwrap();
        let poly = polygon::build(&sys).unwrap();
        let gens = &poly.generators;
        for _ in 0..200 {
            let len = rng.gen_range(0..=8);
            let letters = common::random_word(&mut rng, gens, len);
            let g = GenWord::from_letters(&letters, gens)
                .unwrap()
                .evaluate(gens);
            for m in [Method::Schreier, Method::Trace] {
                match express(&sys, &poly, &g, m) {
                    Ok(w) if w.evaluate(gens) == g => {}
                    Ok(_) => {
                        return fail(format!("{fam}({n}): {m:?} word for {g} evaluates wrongly"))
                    }
                    Err(e) => return fail(format!("{fam}({n}): {m:?} failed on {g}: {e}")),
                }
            }
        }
        for _ in 0..40 {
            let x = Q::new(
                BigInt::from(rng.gen_range(-300..=300)),
                BigInt::from(rng.gen_range(1..=60)),
            );
            let y = Q::new(
                BigInt::from(rng.gen_range(1..=40)),
                BigInt::from(rng.gen_range(1..=400)),
            );
            let z = ExactPoint::new(x, y).unwrap();
            let (w, word) = match locate_point(&poly, &z) {
                Ok(r) => r,
                Err(e) => return fail(format!("{fam}({n}): locating {z} failed: {e}")),
            };
            let wh = w.to_hpoint();
            if !poly.contains(&wh) || act_point(&word.evaluate(gens), &wh) != z.to_hpoint() {
                return fail(format!("{fam}({n}): located point {w} for {z} is wrong"));
            }
            located += 1;
        }
    }
    pass(format!(
        "{} words round-trip through both methods; {located} points located exactly",
        200 * groups.len()
    ))
}

fn normality() -> Outcome {
    for n in 1..=13u64 {
        let g = build_graph(&build(Family::Gamma, n).unwrap()).unwrap();
        if !g.is_normal() {
            return fail(format!("Γ({n}) reported not normal"));
        }
    }
    for n in 1..=30u64 {
        let g = build_graph(&build(Family::Gamma0, n).unwrap()).unwrap();
        let full = g.distinguished_edge_orbit().len() == g.n_edges();
        // Γ_0(N) contains T, whose normal closure is all of Γ
        if g.is_normal() != full || g.is_normal() != (n == 1) {
            return fail(format!("Γ_0({n}): is_normal = {}", g.is_normal()));
        }
        if !g
            .n_edges()
            .is_multiple_of(g.distinguished_edge_orbit().len())
        {
            return fail(format!("Γ_0({n}): orbit size does not divide the index"));
        }
    }
    pass("Γ(N) normal for N <= 13; Γ_0(N) normal only for N = 1 (N <= 30)")
}

fn performance() -> Outcome {
    let mut times: Vec<(u64, usize, Duration)> = Vec::new();
    for n in [1009u64, 10007, 100003] {
        let t = Instant::now();
        let sys = build(Family::Gamma0, n).unwrap();
        let poly = polygon::build(&sys).unwrap();
        let dt = t.elapsed();
        if poly.triangles.len() != (n + 1) as usize {
            return fail(format!("Γ_0({n}) has {} triangles", poly.triangles.len()));
        }
        times.push((n, sys.n(), dt));
    }
    let rows: Vec<String> = times
        .iter()
        .map(|(n, i, d)| format!("N={n} index={i} {:.3}s", d.as_secs_f64()))
        .collect();
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].2.as_secs_f64() / w[0].2.as_secs_f64().max(1e-9))
        .collect();
    let detail = format!("{}; ratios {:.1?}", rows.join(", "), ratios);
    if ratios.iter().any(|&r| r > 20.0) || times[2].2 >= Duration::from_secs(60) {
        fail(detail)
    } else {
        pass(detail)
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 structural table", structural_table),
        ("2 oracle equivalence", oracle_equivalence),
        ("3 special polygon validity", polygon_validity),
        (
            "4 generator soundness and independence",
            generators_independent,
        ),
        ("5 reduction round-trip", round_trip),
        ("6 normality", normality),
        ("7 performance scaling", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| fail("panicked"));
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!(
            "{tag} [{name}] {} ({:.1}s)",
            out.detail,
            t.elapsed().as_secs_f64()
        );
        if !out.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
