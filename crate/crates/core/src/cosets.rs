//! Right coset actions of the modular group.
//!
//! A [`CosetSystem`] records how `S` and `U` permute the right cosets `G\Γ`.
//! The classical congruence families are built directly from coset
//! representatives modulo `N` at `index × polylog N` cost; any other subgroup
//! can be enumerated from a membership oracle at quadratic cost.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modint::{
    self, add_mod, egcd, factorize, gcd, inv_mod, lift_coprime_pair, lift_sl2, mul_mod, neg_mod,
    sub_mod,
};
use crate::par::{map_range, Execution};
use crate::psl2::{decompose_su, Psl2Elt, SuLetter};

/// The five classical congruence families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gamma0,
    GammaUpper0,
    Gamma1,
    GammaUpper1,
    Gamma,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Gamma0,
        Family::GammaUpper0,
        Family::Gamma1,
        Family::GammaUpper1,
        Family::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gamma0 => "gamma0",
            Family::GammaUpper0 => "gamma_upper0",
            Family::Gamma1 => "gamma1",
            Family::GammaUpper1 => "gamma_upper1",
            Family::Gamma => "gamma",
        }
    }

    /// Why `g` fails the congruence conditions of the level-`n` group, if it does.
    pub fn membership_failure(self, g: &Psl2Elt, n: u64) -> Option<String> {
        let [[a, b], [c, d]] = g.mod_n(n);
        let one = 1 % n;
        let minus_one = neg_mod(one, n);
        let diag_pm1 = (a == one && d == one) || (a == minus_one && d == minus_one);
        let fail = |what: String| Some(format!("{what} (matrix {g}, level {n})"));
        match self {
            Family::Gamma0 if c != 0 => fail(format!("c ≡ {c} ≢ 0 mod {n}")),
            Family::GammaUpper0 if b != 0 => fail(format!("b ≡ {b} ≢ 0 mod {n}")),
            Family::Gamma1 | Family::GammaUpper1 | Family::Gamma => {
                let off = match self {
                    Family::Gamma1 => vec![('c', c)],
                    Family::GammaUpper1 => vec![('b', b)],
                    _ => vec![('b', b), ('c', c)],
                };
                for (name, v) in off {
                    if v != 0 {
                        return fail(format!("{name} ≡ {v} ≢ 0 mod {n}"));
                    }
                }
                if !diag_pm1 {
                    return fail(format!("diagonal ({a}, {d}) ≢ ±(1, 1) mod {n}"));
                }
                None
            }
            _ => None,
        }
    }

    pub fn contains(self, g: &Psl2Elt, n: u64) -> bool {
        self.membership_failure(g, n).is_none()
    }

    /// The congruence test as a standalone membership oracle.
    pub fn predicate(self, n: u64) -> impl Fn(&Psl2Elt) -> bool + Send + Sync + Clone + 'static {
        move |g: &Psl2Elt| self.contains(g, n)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown group family {s:?} (expected one of gamma0, gamma_upper0, gamma1, gamma_upper1, gamma)"
                ))
            })
    }
}

/// A point of `P^1(Z/N)` in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    pub a: u64,
    pub b: u64,
}

#[derive(Clone, Debug)]
struct PrimePower {
    p: u64,
    m: u32,
    q: u64,
}

/// `P^1(Z/N)` with its canonical orbit representatives.
///
/// For `N = p^m` the representatives are `(0, 1)`, `(1, b)` for all `b`, and
/// `(p^i, b)` with `1 <= i < m`, `1 <= b < p^{m-i}`, `p ∤ b`. General `N` is
/// handled componentwise through the Chinese remainder theorem.
#[derive(Clone, Debug)]
pub struct ProjLine {
    n: u64,
    parts: Vec<PrimePower>,
}

impl ProjLine {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("level must be at least 1"));
        }
        if n >= 1 << 32 {
            return Err(domain("level too large for 64-bit residue arithmetic"));
        }
        let parts = factorize(n)?
            .factors()
            .iter()
            .map(|&(p, m)| PrimePower { p, m, q: p.pow(m) })
            .collect();
        Ok(ProjLine { n, parts })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// `N ∏_{p | N} (1 + 1/p)`.
    pub fn size(&self) -> usize {
        self.parts
            .iter()
            .map(|pp| (pp.q + pp.q / pp.p) as usize)
            .product()
    }

    /// Canonical representative of `(a : b)` and a unit `u` with `u·rep = (a, b)`.
    pub fn normalize(&self, a: u64, b: u64) -> Result<(ProjPoint, u64)> {
        let n = self.n;
        let (a, b) = (a % n, b % n);
        if gcd(gcd(a, b), n) != 1 {
            return Err(domain(format!("({a}, {b}) is not coprime modulo {n}")));
        }
        Ok(self.normalize_coprime(a, b))
    }

    fn normalize_coprime(&self, a: u64, b: u64) -> (ProjPoint, u64) {
        if self.n == 1 {
            return (ProjPoint { a: 0, b: 0 }, 0);
        }
        if self.parts.len() == 1 {
            let (ra, rb, u) = normalize_prime_power(&self.parts[0], a, b);
            return (ProjPoint { a: ra, b: rb }, u);
        }
        let mut ca = Vec::with_capacity(self.parts.len());
        let mut cb = Vec::with_capacity(self.parts.len());
        let mut cu = Vec::with_capacity(self.parts.len());
        for pp in &self.parts {
            let (ra, rb, u) = normalize_prime_power(pp, a % pp.q, b % pp.q);
            ca.push((ra, pp.q));
            cb.push((rb, pp.q));
            cu.push((u, pp.q));
        }
        let crt = |v: &[(u64, u64)]| modint::crt_residue(v).expect("coprime prime powers").0;
        (
            ProjPoint {
                a: crt(&ca),
                b: crt(&cb),
            },
            crt(&cu),
        )
    }

    /// All canonical representatives, in lexicographic order.
    pub fn list(&self) -> Vec<ProjPoint> {
        if self.n == 1 {
            return vec![ProjPoint { a: 0, b: 0 }];
        }
        let per_part: Vec<Vec<(u64, u64)>> =
            self.parts.iter().map(prime_power_representatives).collect();
        let mut out = Vec::with_capacity(self.size());
        let mut idx = vec![0usize; per_part.len()];
        loop {
            let ca: Vec<(u64, u64)> = idx
                .iter()
                .zip(&self.parts)
                .enumerate()
                .map(|(k, (&i, pp))| (per_part[k][i].0, pp.q))
                .collect();
            let cb: Vec<(u64, u64)> = idx
                .iter()
                .zip(&self.parts)
                .enumerate()
                .map(|(k, (&i, pp))| (per_part[k][i].1, pp.q))
                .collect();
            out.push(ProjPoint {
                a: modint::crt_residue(&ca).expect("coprime").0,
                b: modint::crt_residue(&cb).expect("coprime").0,
            });
            // odometer
            let mut k = 0;
            loop {
                if k == idx.len() {
                    out.sort_unstable();
                    return out;
                }
                idx[k] += 1;
                if idx[k] < per_part[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

fn normalize_prime_power(pp: &PrimePower, a: u64, b: u64) -> (u64, u64, u64) {
    let q = pp.q;
    if a == 0 {
        return (0, 1, b);
    }
    let mut i = 0;
    let mut c = a;
    while c.is_multiple_of(pp.p) {
        c /= pp.p;
        i += 1;
    }
    let c_inv = inv_mod(c, q).expect("cofactor is a unit");
    let bc = mul_mod(b, c_inv, q);
    if i == 0 {
        (1, bc, a)
    } else {
        let tail = pp.p.pow(pp.m - i);
        let b2 = bc % tail;
        let u = mul_mod(b, inv_mod(b2, q).expect("b is a unit when a is not"), q);
        (pp.p.pow(i), b2, u)
    }
}

fn prime_power_representatives(pp: &PrimePower) -> Vec<(u64, u64)> {
    let mut v = vec![(0, 1)];
    v.extend((0..pp.q).map(|b| (1, b)));
    for i in 1..pp.m {
        let tail = pp.p.pow(pp.m - i);
        v.extend(
            (1..tail)
                .filter(|b| b % pp.p != 0)
                .map(|b| (pp.p.pow(i), b)),
        );
    }
    v
}

/// Canonical representative of `(a : b)` in `P^1(Z/N)` with its scaling unit.
pub fn p1_normalize(n: u64, a: u64, b: u64) -> Result<(ProjPoint, u64)> {
    ProjLine::new(n)?.normalize(a, b)
}

/// All canonical points of `P^1(Z/N)`.
pub fn p1_list(n: u64) -> Result<Vec<ProjPoint>> {
    Ok(ProjLine::new(n)?.list())
}

/// Units of `Z/p^m` modulo the stabilizer of `p^i`: `{a : 1 <= a < p^{m-i}, p ∤ a}`.
pub fn stabilizer_reps(p: u64, m: u32, i: u32) -> Result<Vec<u64>> {
    if i < 1 || i >= m {
        return Err(domain(format!(
            "need 1 <= i <= m - 1, got i = {i}, m = {m}"
        )));
    }
    Ok((1..p.pow(m - i)).filter(|a| a % p != 0).collect())
}

/// A column of `(Z/N)^2` modulo `±1`, stored as the lexicographically smaller sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct XPoint {
    pub u: u64,
    pub v: u64,
}

impl XPoint {
    pub fn image(u: u64, v: u64, n: u64) -> Self {
        let (u, v) = (u % n, v % n);
        let neg = (neg_mod(u, n), neg_mod(v, n));
        let (u, v) = (u, v).min(neg);
        XPoint { u, v }
    }
}

/// `(x0, x1, x2)`: the two columns of a matrix mod `±1` and the image of their sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaTriple(pub [XPoint; 3]);

impl GammaTriple {
    pub fn from_matrix(m: [[u64; 2]; 2], n: u64) -> Self {
        let [[a, b], [c, d]] = m;
        GammaTriple([
            XPoint::image(a, c, n),
            XPoint::image(b, d, n),
            XPoint::image(add_mod(a, b, n), add_mod(c, d, n), n),
        ])
    }

    /// Right action of `U`: cyclic shift to the left.
    pub fn act_u(&self) -> Self {
        let [x0, x1, x2] = self.0;
        GammaTriple([x1, x2, x0])
    }

    /// Right action of `S` through coherent lifts.
    pub fn act_s(&self, n: u64) -> Self {
        let [x0, x1, x2] = self.0;
        let plus = XPoint::image(add_mod(x0.u, x1.u, n), add_mod(x0.v, x1.v, n), n);
        let third = if plus == x2 {
            XPoint::image(sub_mod(x0.u, x1.u, n), sub_mod(x0.v, x1.v, n), n)
        } else {
            plus
        };
        GammaTriple([x1, x0, third])
    }

    /// A matrix of `SL_2(Z/N)` with this triple.
    pub fn matrix(&self, n: u64) -> Result<[[u64; 2]; 2]> {
        let [x0, x1, x2] = self.0;
        let (a, c) = (x0.u, x0.v);
        for (b, d) in [(x1.u, x1.v), (neg_mod(x1.u, n), neg_mod(x1.v, n))] {
            let det = sub_mod(mul_mod(a, d, n), mul_mod(b, c, n), n);
            let m = [[a, b], [c, d]];
            if det == 1 % n && GammaTriple::from_matrix(m, n).0[2] == x2 {
                return Ok(m);
            }
        }
        Err(domain(format!(
            "{self:?} is not the triple of a matrix modulo {n}"
        )))
    }
}

/// Payload identifying a coset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// `Γ_0(N)`: bottom row; `Γ^0(N)`: top row.
    Proj(ProjPoint),
    /// `Γ_1(N)`, `Γ^1(N)`: diagonal representative `diag(a, a^{-1})` (mod ±) and a `P^1` point.
    Diag { unit: u64, point: ProjPoint },
    /// `Γ(N)`, `N >= 3`.
    Triple(GammaTriple),
    /// A coset representative found by enumeration.
    Rep(Psl2Elt),
}

/// How a system was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Congruence { family: Family, level: u64 },
    Oracle,
    Explicit,
}

type Member = Arc<dyn Fn(&Psl2Elt) -> bool + Send + Sync>;

/// The right action of `Γ` on `G\Γ` through `S` and `U`.
#[derive(Clone)]
pub struct CosetSystem {
    sigma_s: Vec<u32>,
    sigma_u: Vec<u32>,
    distinguished: u32,
    labels: Vec<Label>,
    construction: Construction,
    member: Option<Member>,
    proj: Option<ProjLine>,
    units: Vec<u64>,
}

impl fmt::Debug for CosetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CosetSystem")
            .field("n", &self.n())
            .field("construction", &self.construction)
            .field("distinguished", &self.distinguished)
            .finish_non_exhaustive()
    }
}

impl CosetSystem {
    pub fn n(&self) -> usize {
        self.sigma_s.len()
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

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// Build from explicit permutations; representatives come from a BFS transversal.
    pub fn from_permutations(
        sigma_s: Vec<u32>,
        sigma_u: Vec<u32>,
        distinguished: u32,
    ) -> Result<Self> {
        let n = sigma_s.len();
        check_permutations(&sigma_s, &sigma_u, distinguished)?;
        let mut reps: Vec<Option<Psl2Elt>> = vec![None; n];
        reps[distinguished as usize] = Some(Psl2Elt::identity());
        let mut queue = VecDeque::from([distinguished]);
        while let Some(x) = queue.pop_front() {
            let g = reps[x as usize].clone().expect("visited");
            for (y, letter) in [
                (sigma_s[x as usize], Psl2Elt::s()),
                (sigma_u[x as usize], Psl2Elt::u()),
            ] {
                if reps[y as usize].is_none() {
                    reps[y as usize] = Some(g.mul(&letter));
                    queue.push_back(y);
                }
            }
        }
        let labels = reps
            .into_iter()
            .map(|r| r.map(Label::Rep))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| domain("action is not transitive"))?;
        Ok(CosetSystem {
            sigma_s,
            sigma_u,
            distinguished,
            labels,
            construction: Construction::Explicit,
            member: None,
            proj: None,
            units: Vec::new(),
        })
    }

    /// `S^2 = 1`, `U^3 = 1`, both bijective, transitive, distinguished in range.
    pub fn validate(&self) -> Result<()> {
        check_permutations(&self.sigma_s, &self.sigma_u, self.distinguished)
    }

    /// Index of the coset `G·g`.
    pub fn label_of(&self, g: &Psl2Elt) -> Result<u32> {
        match (&self.construction, self.labels.first()) {
            (Construction::Congruence { family, level }, Some(first))
                if !matches!(first, Label::Rep(_)) =>
            {
                let n = *level;
                let m = g.mod_n(n);
                let target = match family {
                    Family::Gamma0 | Family::GammaUpper0 => {
                        let (c, d) = row_for(*family, m);
                        let (p, _) = self.proj().normalize_coprime(c, d);
                        Label::Proj(p)
                    }
                    Family::Gamma1 | Family::GammaUpper1 => {
                        let (c, d) = row_for(*family, m);
                        self.diag_label(c, d)
                    }
                    Family::Gamma => Label::Triple(GammaTriple::from_matrix(m, n)),
                };
                self.find_label(&target)
            }
            _ => {
                let mut x = self.distinguished;
                for l in decompose_su(g).letters() {
                    x = match l {
                        SuLetter::S => self.sigma_s[x as usize],
                        SuLetter::U => self.sigma_u[x as usize],
                        SuLetter::U2 => self.sigma_u[self.sigma_u[x as usize] as usize],
                    };
                }
                Ok(x)
            }
        }
    }

    /// Whether `g ∈ G`.
    pub fn contains(&self, g: &Psl2Elt) -> bool {
        self.label_of(g)
            .map(|l| l == self.distinguished)
            .unwrap_or(false)
    }

    /// `Ok` if `g ∈ G`, otherwise the failing condition.
    pub fn check_member(&self, g: &Psl2Elt) -> Result<()> {
        if self.contains(g) {
            return Ok(());
        }
        let reason = match &self.construction {
            Construction::Congruence { family, level } => family
                .membership_failure(g, *level)
                .unwrap_or_else(|| format!("{g} lies in a non-trivial coset")),
            Construction::Oracle => format!("membership oracle rejects {g}"),
            Construction::Explicit => format!("{g} does not fix the distinguished coset"),
        };
        Err(Error::NotInGroup(reason))
    }

    /// An integer matrix lying in the coset with this index.
    pub fn representative(&self, label: u32) -> Result<Psl2Elt> {
        let lbl = self
            .labels
            .get(label as usize)
            .ok_or_else(|| domain(format!("label {label} out of range")))?;
        let (family, n) = match &self.construction {
            Construction::Congruence { family, level } => (*family, *level),
            _ => match lbl {
                Label::Rep(h) => return Ok(h.clone()),
                _ => {
                    return Err(Error::Internal(
                        "non-congruence system without representatives".into(),
                    ))
                }
            },
        };
        let from_row = |upper: bool, c: u64, d: u64| -> Result<Psl2Elt> {
            let (c, d) = lift_coprime_pair(c, d, n)?;
            if upper {
                let (_, s, t) = egcd(c, d)?;
                Psl2Elt::from_i128([[c, d], [-t, s]])
            } else {
                let (_, s, t) = egcd(d, c)?;
                Psl2Elt::from_i128([[s, -t], [c, d]])
            }
        };
        match lbl {
            Label::Rep(h) => Ok(h.clone()),
            Label::Proj(p) => from_row(family == Family::GammaUpper0, p.a, p.b),
            Label::Diag { unit, point } => {
                let u = inv_mod(*unit, n).unwrap_or(0);
                from_row(
                    family == Family::GammaUpper1,
                    mul_mod(u, point.a, n),
                    mul_mod(u, point.b, n),
                )
            }
            Label::Triple(t) => Psl2Elt::from_i128(lift_sl2(t.matrix(n)?, n)?),
        }
    }

    /// The coset of `g` and a witness `w ∈ G` with `w · representative = g`.
    pub fn reduce_to_coset(&self, g: &Psl2Elt) -> Result<(u32, Psl2Elt)> {
        let label = self.label_of(g)?;
        let rep = self.representative(label)?;
        let witness = g.mul(&rep.inv());
        let ok = match (&self.construction, &self.member) {
            (Construction::Congruence { family, level }, _) => family.contains(&witness, *level),
            (_, Some(member)) => member(&witness),
            _ => true,
        };
        if !ok {
            return Err(Error::Internal(format!(
                "witness {witness} for {g} is not in the group"
            )));
        }
        Ok((label, witness))
    }

    fn proj(&self) -> &ProjLine {
        self.proj
            .as_ref()
            .expect("P^1 data present for congruence systems")
    }

    fn diag_label(&self, c: u64, d: u64) -> Label {
        let n = self.proj().modulus();
        let (point, u) = self.proj().normalize_coprime(c % n, d % n);
        Label::Diag {
            unit: canonical_unit(inv_mod(u, n).unwrap_or(0), n),
            point,
        }
    }

    fn find_label(&self, target: &Label) -> Result<u32> {
        let found = match target {
            Label::Proj(p) => self
                .labels
                .binary_search_by(|l| match l {
                    Label::Proj(q) => q.cmp(p),
                    _ => unreachable!(),
                })
                .ok(),
            Label::Diag { unit, point } => {
                let ui = self.units.binary_search(unit).ok();
                let pi = self
                    .labels
                    .iter()
                    .take(self.labels.len() / self.units.len().max(1))
                    .collect::<Vec<_>>()
                    .binary_search_by(|l| match l {
                        Label::Diag { point: q, .. } => q.cmp(point),
                        _ => unreachable!(),
                    })
                    .ok();
                ui.zip(pi)
                    .map(|(u, p)| u * (self.labels.len() / self.units.len()) + p)
            }
            Label::Triple(t) => self
                .labels
                .binary_search_by(|l| match l {
                    Label::Triple(s) => s.cmp(t),
                    _ => unreachable!(),
                })
                .ok(),
            Label::Rep(_) => None,
        };
        found
            .map(|i| i as u32)
            .ok_or_else(|| Error::Internal(format!("label {target:?} not in the coset table")))
    }
}

fn row_for(family: Family, m: [[u64; 2]; 2]) -> (u64, u64) {
    match family {
        Family::Gamma0 | Family::Gamma1 => (m[1][0], m[1][1]),
        _ => (m[0][0], m[0][1]),
    }
}

fn canonical_unit(a: u64, n: u64) -> u64 {
    a.min(neg_mod(a, n))
}

fn check_permutations(sigma_s: &[u32], sigma_u: &[u32], distinguished: u32) -> Result<()> {
    let n = sigma_s.len();
    if n == 0 {
        return Err(domain("empty coset system"));
    }
    if sigma_u.len() != n {
        return Err(domain("permutations have different sizes"));
    }
    if distinguished as usize >= n {
        return Err(domain("distinguished coset out of range"));
    }
    for x in 0..n {
        let s = sigma_s[x] as usize;
        let u = sigma_u[x] as usize;
        if s >= n || u >= n {
            return Err(domain(format!("image of {x} out of range")));
        }
        if sigma_s[s] as usize != x {
            return Err(domain(format!("sigma_S is not an involution at {x}")));
        }
        let u2 = sigma_u[u] as usize;
        if sigma_u[u2] as usize != x {
            return Err(domain(format!(
                "sigma_U does not have order dividing 3 at {x}"
            )));
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![distinguished as usize];
    seen[distinguished as usize] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for y in [sigma_s[x] as usize, sigma_u[x] as usize] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    if count != n {
        return Err(domain("action is not transitive"));
    }
    Ok(())
}

/// Build the system of a classical congruence subgroup.
pub fn build(family: Family, level: u64) -> Result<CosetSystem> {
    build_with(family, level, Execution::default())
}

pub fn build_with(family: Family, level: u64, exec: Execution) -> Result<CosetSystem> {
    if level == 0 {
        return Err(domain("level must be at least 1"));
    }
    match family {
        Family::Gamma0 | Family::GammaUpper0 => build_p1_system(family, level, exec),
        Family::Gamma1 | Family::GammaUpper1 => build_diag_system(family, level, exec),
        Family::Gamma => build_gamma_with(level, exec),
    }
}

pub fn build_gamma0(n: u64) -> Result<CosetSystem> {
    build(Family::Gamma0, n)
}

pub fn build_gamma_upper0(n: u64) -> Result<CosetSystem> {
    build(Family::GammaUpper0, n)
}

pub fn build_gamma1(n: u64) -> Result<CosetSystem> {
    build(Family::Gamma1, n)
}

pub fn build_gamma_upper1(n: u64) -> Result<CosetSystem> {
    build(Family::GammaUpper1, n)
}

pub fn build_gamma(n: u64) -> Result<CosetSystem> {
    build(Family::Gamma, n)
}

// (a : b)·S = (b : -a), (a : b)·U = (-b : a + b); the same rule moves bottom
// rows for Γ_0 and top rows for Γ^0.
fn row_s(a: u64, b: u64, n: u64) -> (u64, u64) {
    (b, neg_mod(a, n))
}

fn row_u(a: u64, b: u64, n: u64) -> (u64, u64) {
    (neg_mod(b, n), add_mod(a, b, n))
}

fn build_p1_system(family: Family, n: u64, exec: Execution) -> Result<CosetSystem> {
    let proj = ProjLine::new(n)?;
    let points = proj.list();
    let find = |p: &ProjPoint| points.binary_search(p).expect("canonical point listed") as u32;
    let images = map_range(exec, points.len(), |i| {
        let ProjPoint { a, b } = points[i];
        let (sa, sb) = row_s(a, b, n);
        let (ua, ub) = row_u(a, b, n);
        (
            find(&proj.normalize_coprime(sa, sb).0),
            find(&proj.normalize_coprime(ua, ub).0),
        )
    });
    let base = if family == Family::Gamma0 {
        (0, 1)
    } else {
        (1, 0)
    };
    let distinguished = find(&proj.normalize_coprime(base.0 % n, base.1 % n).0);
    let (sigma_s, sigma_u) = images.into_iter().unzip();
    Ok(CosetSystem {
        sigma_s,
        sigma_u,
        distinguished,
        labels: points.into_iter().map(Label::Proj).collect(),
        construction: Construction::Congruence { family, level: n },
        member: None,
        proj: Some(proj),
        units: Vec::new(),
    })
}

fn build_diag_system(family: Family, n: u64, exec: Execution) -> Result<CosetSystem> {
    let proj = ProjLine::new(n)?;
    let points = proj.list();
    let units: Vec<u64> = if n == 1 {
        vec![0]
    } else {
        (1..=n / 2).filter(|&a| gcd(a, n) == 1).collect()
    };
    let np = points.len();
    let mut labels = Vec::with_capacity(units.len() * np);
    for &unit in &units {
        labels.extend(points.iter().map(|&point| Label::Diag { unit, point }));
    }
    let mut sys = CosetSystem {
        sigma_s: Vec::new(),
        sigma_u: Vec::new(),
        distinguished: 0,
        labels,
        construction: Construction::Congruence { family, level: n },
        member: None,
        proj: Some(proj),
        units,
    };
    let row_of = |l: &Label| -> (u64, u64) {
        let Label::Diag { unit, point } = l else {
            unreachable!()
        };
        let u = inv_mod(*unit, n).unwrap_or(0);
        (mul_mod(u, point.a, n), mul_mod(u, point.b, n))
    };
    let sys_ref = &sys;
    let images = map_range(exec, sys.labels.len(), |i| {
        let (a, b) = row_of(&sys_ref.labels[i]);
        let (sa, sb) = row_s(a, b, n);
        let (ua, ub) = row_u(a, b, n);
        (
            sys_ref
                .find_label(&sys_ref.diag_label(sa, sb))
                .expect("listed"),
            sys_ref
                .find_label(&sys_ref.diag_label(ua, ub))
                .expect("listed"),
        )
    });
    let base = if family == Family::Gamma1 {
        (0, 1 % n)
    } else {
        (1 % n, 0)
    };
    let distinguished = sys.find_label(&sys.diag_label(base.0, base.1))?;
    let (sigma_s, sigma_u) = images.into_iter().unzip();
    sys.sigma_s = sigma_s;
    sys.sigma_u = sigma_u;
    sys.distinguished = distinguished;
    Ok(sys)
}

/// All triples of `SL_2(Z/N)/±1`, sorted.
pub fn gamma_triples(n: u64) -> Result<Vec<GammaTriple>> {
    if n < 3 {
        return Err(domain("the triple encoding needs N >= 3"));
    }
    let mut out = Vec::new();
    for a in 0..n {
        for c in 0..n {
            if gcd(gcd(a, c), n) != 1 || XPoint::image(a, c, n) != (XPoint { u: a, v: c }) {
                continue;
            }
            // a d - b c ≡ 1
            let (g, s, t) = egcd(a as i128, c as i128)?;
            let g_inv = inv_mod(modint::reduce(g, n), n).expect("unit gcd");
            let d0 = mul_mod(modint::reduce(s, n), g_inv, n);
            let b0 = mul_mod(modint::reduce(-t, n), g_inv, n);
            for k in 0..n {
                let b = add_mod(b0, mul_mod(k, a, n), n);
                let d = add_mod(d0, mul_mod(k, c, n), n);
                out.push(GammaTriple::from_matrix([[a, b], [c, d]], n));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn build_gamma_with(n: u64, exec: Execution) -> Result<CosetSystem> {
    if n <= 2 {
        let mut sys = build_from_oracle(Family::Gamma.predicate(n), 64)?;
        sys.construction = Construction::Congruence {
            family: Family::Gamma,
            level: n,
        };
        return Ok(sys);
    }
    let triples = gamma_triples(n)?;
    let find = |t: &GammaTriple| triples.binary_search(t).expect("every triple listed") as u32;
    let images = map_range(exec, triples.len(), |i| {
        (find(&triples[i].act_s(n)), find(&triples[i].act_u()))
    });
    let distinguished = find(&GammaTriple::from_matrix([[1, 0], [0, 1]], n));
    let (sigma_s, sigma_u) = images.into_iter().unzip();
    Ok(CosetSystem {
        sigma_s,
        sigma_u,
        distinguished,
        labels: triples.into_iter().map(Label::Triple).collect(),
        construction: Construction::Congruence {
            family: Family::Gamma,
            level: n,
        },
        member: None,
        proj: Some(ProjLine::new(n)?),
        units: Vec::new(),
    })
}

/// Enumerate `G\Γ` by breadth-first search from the identity coset, deciding
/// `Gg = Gh` by `member(g h^{-1})` against every known representative.
pub fn build_from_oracle<F>(member: F, max_index: usize) -> Result<CosetSystem>
where
    F: Fn(&Psl2Elt) -> bool + Send + Sync + 'static,
{
    if !member(&Psl2Elt::identity()) {
        return Err(domain("membership oracle rejects the identity"));
    }
    let s = Psl2Elt::s();
    let u = Psl2Elt::u();
    let mut reps = vec![Psl2Elt::identity()];
    let mut inv = vec![Psl2Elt::identity()];
    let mut sigma_s: Vec<Option<u32>> = vec![None];
    let mut sigma_u: Vec<Option<u32>> = vec![None];
    let mut u_pred: Vec<Option<u32>> = vec![None];

    let find_or_insert = |g: Psl2Elt,
                          reps: &mut Vec<Psl2Elt>,
                          inv: &mut Vec<Psl2Elt>,
                          sigma_s: &mut Vec<Option<u32>>,
                          sigma_u: &mut Vec<Option<u32>>,
                          u_pred: &mut Vec<Option<u32>>|
     -> Result<u32> {
        if let Some(j) = inv.iter().position(|h| member(&g.mul(h))) {
            return Ok(j as u32);
        }
        if reps.len() >= max_index {
            return Err(Error::IndexExceeded { max: max_index });
        }
        inv.push(g.inv());
        reps.push(g);
        sigma_s.push(None);
        sigma_u.push(None);
        u_pred.push(None);
        Ok((reps.len() - 1) as u32)
    };

    let mut x = 0usize;
    while x < reps.len() {
        if sigma_s[x].is_none() {
            let g = reps[x].mul(&s);
            let y = find_or_insert(
                g,
                &mut reps,
                &mut inv,
                &mut sigma_s,
                &mut sigma_u,
                &mut u_pred,
            )?;
            sigma_s[x] = Some(y);
            match sigma_s[y as usize] {
                None => sigma_s[y as usize] = Some(x as u32),
                Some(z) if z as usize == x => {}
                Some(z) => {
                    return Err(Error::OracleConflict(format!(
                        "coset {y} is S-adjacent to both {z} and {x}"
                    )))
                }
            }
        }
        if sigma_u[x].is_none() {
            // x = w·U and (w·U)·U = v with v·U = w, so x·U is the U-predecessor of w
            let shortcut = u_pred[x].and_then(|w| u_pred[w as usize]);
            let y = match shortcut {
                Some(v) => v,
                None => {
                    let g = reps[x].mul(&u);
                    find_or_insert(
                        g,
                        &mut reps,
                        &mut inv,
                        &mut sigma_s,
                        &mut sigma_u,
                        &mut u_pred,
                    )?
                }
            };
            sigma_u[x] = Some(y);
            match u_pred[y as usize] {
                None => u_pred[y as usize] = Some(x as u32),
                Some(z) if z as usize == x => {}
                Some(z) => {
                    return Err(Error::OracleConflict(format!(
                        "coset {y} is the U-image of both {z} and {x}"
                    )))
                }
            }
        }
        x += 1;
    }
    let sigma_s: Vec<u32> = sigma_s.into_iter().map(|v| v.expect("filled")).collect();
    let sigma_u: Vec<u32> = sigma_u.into_iter().map(|v| v.expect("filled")).collect();
    check_permutations(&sigma_s, &sigma_u, 0).map_err(|e| Error::OracleConflict(e.to_string()))?;
    Ok(CosetSystem {
        sigma_s,
        sigma_u,
        distinguished: 0,
        labels: reps.into_iter().map(Label::Rep).collect(),
        construction: Construction::Oracle,
        member: Some(Arc::new(member)),
        proj: None,
        units: Vec::new(),
    })
}
