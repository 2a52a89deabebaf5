//! Exact modular arithmetic over machine integers.
//!
//! Levels up to about 10^7 are the intended range; all residues are kept
//! normalized to `[0, n)` and products go through `u128`.

use crate::error::{domain, Error, Result};

/// Extended Euclid: returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `a*x + b*y = g`.
pub fn egcd(a: i128, b: i128) -> Result<(i128, i128, i128)> {
    if a == 0 && b == 0 {
        return Err(domain("egcd(0, 0) is undefined"));
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn neg_mod(a: u64, n: u64) -> u64 {
    if a == 0 {
        0
    } else {
        n - a
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    add_mod(a, neg_mod(b % n, n), n)
}

/// Reduce a signed value into `[0, n)`.
#[inline]
pub fn reduce(a: i128, n: u64) -> u64 {
    a.rem_euclid(n as i128) as u64
}

/// Inverse of `a` modulo `n`, if `a` is a unit. Modulo 1 every residue is the unit 0.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = egcd((a % n) as i128, n as i128).ok()?;
    (g == 1).then(|| reduce(x, n))
}

/// Prime factorization `N = p_1^{m_1} ... p_k^{m_k}` with ascending primes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, m)| p.pow(m))
    }

    pub fn product(&self) -> u64 {
        self.prime_powers().product()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(domain("cannot factorize 0"));
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut m = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                m += 1;
            }
            out.push((p, m));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(Factorization(out))
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let f = factorize(n.max(1)).expect("n >= 1");
    f.factors()
        .iter()
        .fold(n.max(1), |acc, &(p, _)| acc / p * (p - 1))
}

/// A row `(a, b)` over `Z/n` with `gcd(a, b, n) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueRow {
    pub n: u64,
    pub a: u64,
    pub b: u64,
}

impl ResidueRow {
    pub fn new(n: u64, a: i128, b: i128) -> Result<Self> {
        if n == 0 {
            return Err(domain("modulus must be at least 1"));
        }
        let row = ResidueRow {
            n,
            a: reduce(a, n),
            b: reduce(b, n),
        };
        if !row.is_coprime() {
            return Err(domain(format!(
                "row ({}, {}) is not coprime modulo {}",
                row.a, row.b, n
            )));
        }
        Ok(row)
    }

    pub fn is_coprime(&self) -> bool {
        gcd(gcd(self.a, self.b), self.n) == 1
    }
}

/// Chinese remainder combination of residues modulo pairwise coprime moduli.
pub fn crt_residue(parts: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut acc = (0u64, 1u64);
    for &(r, m) in parts {
        let (x, n) = acc;
        if gcd(n, m) != 1 {
            return Err(domain(format!("moduli {n} and {m} are not coprime")));
        }
        let nm = n * m;
        // x + n * k ≡ r (mod m)
        let n_inv = inv_mod(n % m, m).expect("coprime");
        let k = mul_mod(sub_mod(r % m, x % m, m), n_inv, m);
        acc = (add_mod(x, mul_mod(n, k, nm), nm), nm);
    }
    Ok(acc)
}

/// Split a row along the prime-power factors of its modulus.
pub fn crt_split(row: &ResidueRow, f: &Factorization) -> Result<Vec<ResidueRow>> {
    if f.product() != row.n {
        return Err(domain(format!(
            "factorization product {} does not match modulus {}",
            f.product(),
            row.n
        )));
    }
    if row.n == 1 {
        return Ok(vec![*row]);
    }
    Ok(f.prime_powers()
        .map(|q| ResidueRow {
            n: q,
            a: row.a % q,
            b: row.b % q,
        })
        .collect())
}

/// Recombine prime-power rows into a row modulo the product.
///
/// Each component is lifted to the idempotent lift that is congruent to it
/// modulo its own modulus and to 1 modulo the others, and the lifts are
/// multiplied. This is the inverse of [`crt_split`].
pub fn crt_combine(rows: &[ResidueRow]) -> Result<ResidueRow> {
    let Some(first) = rows.first() else {
        return Err(domain("no rows to combine"));
    };
    if rows.len() == 1 {
        return Ok(*first);
    }
    for (i, r) in rows.iter().enumerate() {
        for s in &rows[i + 1..] {
            if gcd(r.n, s.n) != 1 {
                return Err(domain(format!(
                    "moduli {} and {} are not coprime",
                    r.n, s.n
                )));
            }
        }
    }
    let n: u64 = rows.iter().map(|r| r.n).product();
    let lift = |i: usize, v: u64| -> u64 {
        let parts: Vec<(u64, u64)> = rows
            .iter()
            .enumerate()
            .map(|(j, r)| if j == i { (v, r.n) } else { (1 % r.n, r.n) })
            .collect();
        crt_residue(&parts).expect("coprime").0
    };
    let mut a = 1 % n;
    let mut b = 1 % n;
    for (i, r) in rows.iter().enumerate() {
        a = mul_mod(a, lift(i, r.a), n);
        b = mul_mod(b, lift(i, r.b), n);
    }
    Ok(ResidueRow { n, a, b })
}

/// Complete a coprime row to a determinant-one matrix over `Z/n` with that bottom row.
///
/// Returns `[[x, y], [a, b]]` with `x*b - y*a ≡ 1 (mod n)`.
pub fn complete_row_to_sl2(row: &ResidueRow) -> Result<[[u64; 2]; 2]> {
    if !row.is_coprime() {
        return Err(domain(format!(
            "row ({}, {}) is not coprime modulo {}",
            row.a, row.b, row.n
        )));
    }
    let n = row.n;
    if n == 1 {
        return Ok([[0, 0], [0, 0]]);
    }
    let (a, b) = (row.a, row.b);
    let (x, y) = if a == 0 && b == 0 {
        unreachable!("coprime row modulo n > 1 is nonzero")
    } else {
        let (g, s, t) = egcd(a as i128, b as i128)?;
        let g_inv =
            inv_mod((g as u64) % n, n).ok_or_else(|| Error::Internal("gcd not a unit".into()))?;
        (
            mul_mod(reduce(t, n), g_inv, n),
            mul_mod(reduce(-s, n), g_inv, n),
        )
    };
    Ok([[x, y], [a, b]])
}

/// Distinct primes dividing `v` (trial division).
fn prime_divisors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= v {
        if v.is_multiple_of(p) {
            out.push(p);
            while v.is_multiple_of(p) {
                v /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// Lift a coprime residue pair to integers `(c', d')` with `gcd(c', d') = 1`.
pub fn lift_coprime_pair(c: u64, d: u64, n: u64) -> Result<(i128, i128)> {
    if gcd(gcd(c, d), n) != 1 {
        return Err(domain(format!("pair ({c}, {d}) is not coprime modulo {n}")));
    }
    if n == 1 {
        return Ok((0, 1));
    }
    let (c, d) = (c % n, d % n);
    if c == 0 {
        if d == 1 {
            return Ok((0, 1));
        }
        // gcd(n, d) = 1 because d is a unit
        return Ok((n as i128, d as i128));
    }
    if gcd(c, d) == 1 {
        return Ok((c as i128, d as i128));
    }
    // d + t n with t the product of primes dividing c but neither d nor n
    let t: u64 = prime_divisors(c)
        .into_iter()
        .filter(|p| d % p != 0 && !n.is_multiple_of(*p))
        .product();
    let d2 = d as i128 + t as i128 * n as i128;
    debug_assert_eq!(egcd(c as i128, d2).unwrap().0, 1);
    Ok((c as i128, d2))
}

/// Lift a matrix of `SL_2(Z/n)` to an integer matrix of determinant one.
pub fn lift_sl2(m: [[u64; 2]; 2], n: u64) -> Result<[[i128; 2]; 2]> {
    let [[a0, b0], [c0, d0]] = m;
    let det = sub_mod(mul_mod(a0, d0, n), mul_mod(b0, c0, n), n);
    if det != 1 % n {
        return Err(domain(format!("matrix has determinant {det} modulo {n}")));
    }
    let (c, d) = lift_coprime_pair(c0, d0, n)?;
    // x d - y c = 1
    let (_, s, t) = egcd(d, c)?;
    let (x, y) = (s, -t);
    if n == 1 {
        return Ok([[x, y], [c, d]]);
    }
    let ni = n as i128;
    let t = (-(a0 as i128 - x) * y + (b0 as i128 - y) * x).rem_euclid(ni);
    Ok([[x + t * c, y + t * d], [c, d]])
}
