//! Closed-form invariants of the classical congruence subgroups, written
//! independently of the library, plus brute-force helpers.
#![allow(dead_code)]

use std::collections::HashMap;

use cuboid_core::polygon::Generator;
use cuboid_core::{Family, Psl2Elt};

pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn phi(n: u64) -> u64 {
    prime_factors(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Index, elliptic counts and sorted cusp widths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub index: usize,
    pub e2: usize,
    pub e3: usize,
    pub cusp_widths: Vec<usize>,
    pub genus: usize,
}

fn finish(index: u64, e2: u64, e3: u64, mut widths: Vec<usize>) -> Expected {
    widths.sort_unstable();
    // 12 g = 12 + μ - 3 ν₂ - 4 ν₃ - 6 c
    let twelve_g = 12 + index as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * widths.len() as i64;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0, "non-integral genus");
    Expected {
        index: index as usize,
        e2: e2 as usize,
        e3: e3 as usize,
        cusp_widths: widths,
        genus: (twelve_g / 12) as usize,
    }
}

pub fn gamma0(n: u64) -> Expected {
    let f = prime_factors(n);
    let index = f.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
    let nu2 = if n.is_multiple_of(4) {
        0
    } else {
        f.iter()
            .map(|&(p, _)| match p % 4 {
                2 => 1,
                1 => 2,
                _ => 0,
            })
            .product()
    };
    let nu3 = if n.is_multiple_of(9) {
        0
    } else {
        f.iter()
            .map(|&(p, _)| match p % 3 {
                0 => 1,
                1 => 2,
                _ => 0,
            })
            .product()
    };
    let mut widths = Vec::new();
    for d in divisors(n) {
        let count = phi(gcd(d, n / d));
        let w = n / gcd(d * d, n);
        widths.extend(std::iter::repeat_n(w as usize, count as usize));
    }
    finish(index, nu2, nu3, widths)
}

/// `Γ(N)` modulo `±1`.
pub fn gamma(n: u64) -> Expected {
    match n {
        1 => return gamma0(1),
        2 => return finish(6, 0, 0, vec![2, 2, 2]),
        _ => {}
    }
    let f = prime_factors(n);
    let mut num = n * n * n;
    let mut den = 2;
    for &(p, _) in &f {
        num *= p * p - 1;
        den *= p * p;
    }
    let index = num / den;
    finish(index, 0, 0, vec![n as usize; (index / n) as usize])
}

/// `±Γ_1(N)`; for `N <= 4` it coincides with `Γ_0(N)`.
pub fn gamma1(n: u64) -> Expected {
    if n <= 4 {
        return gamma0(n);
    }
    let f = prime_factors(n);
    let mut num = n * n;
    let mut den = 2;
    for &(p, _) in &f {
        num *= p * p - 1;
        den *= p * p;
    }
    let index = num / den;
    let mut widths = Vec::new();
    for d in divisors(n) {
        let count = phi(d) * phi(n / d) / 2;
        widths.extend(std::iter::repeat_n((n / d) as usize, count as usize));
    }
    finish(index, 0, 0, widths)
}

/// Conjugate families share every invariant.
pub fn expected(family: Family, n: u64) -> Expected {
    match family {
        Family::Gamma0 | Family::GammaUpper0 => gamma0(n),
        Family::Gamma1 | Family::GammaUpper1 => gamma1(n),
        Family::Gamma => gamma(n),
    }
}

/// A free-product relation among the generators: a nonempty reduced word of
/// at most `2 * half` syllables that evaluates to the identity.
pub fn find_relation(gens: &[Generator], half: usize) -> Option<Vec<(usize, i64)>> {
    let mut syllables = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let exps: Vec<i64> = match g.order {
            0 => vec![-2, -1, 1, 2],
            k => (1..k as i64).collect(),
        };
        for e in exps {
            syllables.push((i, e, g.matrix.pow(e)));
        }
    }
    // all reduced words of 1..=half syllables
    let mut words: Vec<(Vec<(usize, i64)>, Psl2Elt)> = vec![(Vec::new(), Psl2Elt::identity())];
    let mut frontier = words.clone();
    for _ in 0..half {
        let mut next = Vec::new();
        for (w, v) in &frontier {
            for (i, e, m) in &syllables {
                if w.last().is_some_and(|&(j, _)| j == *i) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push((*i, *e));
                next.push((w2, v.mul(m)));
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut by_value: HashMap<Psl2Elt, Vec<usize>> = HashMap::new();
    for (k, (_, v)) in words.iter().enumerate() {
        by_value.entry(v.clone()).or_default().push(k);
    }
    for (u, uv) in &words {
        let Some(ks) = by_value.get(&uv.inv()) else {
            continue;
        };
        for &k in ks {
            let v = &words[k].0;
            if u.is_empty() && v.is_empty() {
                continue;
            }
            if let (Some(a), Some(b)) = (u.last(), v.first()) {
                if a.0 == b.0 {
                    continue;
                }
            }
            let mut rel = u.clone();
            rel.extend(v.iter().cloned());
            return Some(rel);
        }
    }
    None
}

/// Random word of `len` syllables with exponents in `-2..=2`.
pub fn random_word(rng: &mut impl rand::Rng, gens: &[Generator], len: usize) -> Vec<(usize, i64)> {
    (0..len)
        .map(|_| {
            let g = rng.gen_range(0..gens.len());
            let mut e = 0;
            while e == 0 {
                e = rng.gen_range(-2..=2);
            }
            (g, e)
        })
        .collect()
}
