//! Elements of PSL_2(Z) over unbounded integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// A sign-normalized unimodular integer matrix `[a, b; c, d]`.
///
/// Of the two matrices `±M` representing an element, the stored one has
/// `c > 0`, or `c = 0` and `d > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Psl2Elt {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Psl2Elt {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(domain(format!(
                "[{a},{b};{c},{d}] does not have determinant 1"
            )));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn from_i128(m: [[i128; 2]; 2]) -> Result<Self> {
        Self::new(
            m[0][0].into(),
            m[0][1].into(),
            m[1][0].into(),
            m[1][1].into(),
        )
    }

    fn normalized(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        if c.is_negative() || (c.is_zero() && d.is_negative()) {
            Psl2Elt {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Psl2Elt { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::normalized(1.into(), 0.into(), 0.into(), 1.into())
    }

    /// `S = [0, -1; 1, 0]`, order 2, fixes `i`.
    pub fn s() -> Self {
        Self::normalized(0.into(), (-1).into(), 1.into(), 0.into())
    }

    /// `U = [0, 1; -1, 1]`, order 3, fixes `e^{iπ/3}`.
    pub fn u() -> Self {
        Self::normalized(0.into(), 1.into(), (-1).into(), 1.into())
    }

    pub fn u2() -> Self {
        Self::normalized((-1).into(), 1.into(), (-1).into(), 0.into())
    }

    /// `T = [1, 1; 0, 1]`.
    pub fn t() -> Self {
        Self::normalized(1.into(), 1.into(), 0.into(), 1.into())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    pub fn mul(&self, h: &Psl2Elt) -> Psl2Elt {
        Self::normalized(
            &self.a * &h.a + &self.b * &h.c,
            &self.a * &h.b + &self.b * &h.d,
            &self.c * &h.a + &self.d * &h.c,
            &self.c * &h.b + &self.d * &h.d,
        )
    }

    pub fn inv(&self) -> Psl2Elt {
        Self::normalized(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
    }

    /// `self^k` for `k >= 0` by repeated squaring; negative `k` inverts.
    pub fn pow(&self, k: i64) -> Psl2Elt {
        let mut base = if k < 0 { self.inv() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Psl2Elt::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `g h g^{-1}`.
    pub fn conjugate(&self, h: &Psl2Elt) -> Psl2Elt {
        self.mul(h).mul(&self.inv())
    }

    /// Entries reduced into `[0, n)`; the sign ambiguity of PSL is left to the caller.
    pub fn mod_n(&self, n: u64) -> [[u64; 2]; 2] {
        let m = BigInt::from(n);
        let r = |x: &BigInt| x.mod_floor(&m).to_u64().expect("residue fits");
        [[r(&self.a), r(&self.b)], [r(&self.c), r(&self.d)]]
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    /// Möbius action on a boundary point.
    pub fn act_cusp(&self, x: &Cusp) -> Cusp {
        Cusp::from_pair(
            &self.a * &x.p + &self.b * &x.q,
            &self.c * &x.p + &self.d * &x.q,
        )
        .expect("unimodular image of a coprime pair is coprime")
    }

    /// Entries as `i64`, when they fit.
    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([
            self.a.to_i64()?,
            self.b.to_i64()?,
            self.c.to_i64()?,
            self.d.to_i64()?,
        ])
    }
}

impl Default for Psl2Elt {
    fn default() -> Self {
        Psl2Elt::identity()
    }
}

impl std::ops::Mul for &Psl2Elt {
    type Output = Psl2Elt;
    fn mul(self, rhs: &Psl2Elt) -> Psl2Elt {
        Psl2Elt::mul(self, rhs)
    }
}

impl fmt::Display for Psl2Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Psl2Elt {
    type Err = Error;

    /// Parses `"a,b,c,d"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "expected four comma-separated integers, got {s:?}"
            )));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(
                p.parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("bad integer {p:?}: {e}")))?,
            );
        }
        let d = v.pop().unwrap();
        let c = v.pop().unwrap();
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        Psl2Elt::new(a, b, c, d)
    }
}

/// A point of `P^1(Q)`, stored as a coprime pair `(p : q)`; `q = 0` is `∞`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Cusp {
    p: BigInt,
    q: BigInt,
}

impl Cusp {
    pub fn infinity() -> Self {
        Cusp {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Cusp {
            p: BigInt::zero(),
            q: BigInt::one(),
        }
    }

    pub fn from_pair(p: BigInt, q: BigInt) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(domain("(0 : 0) is not a cusp"));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Cusp { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self> {
        Self::from_pair(p.into(), q.into())
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.q.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

/// Letters of the free product `Z/2 * Z/3 = <S> * <U>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuLetter {
    S,
    U,
    U2,
}

impl SuLetter {
    pub fn matrix(self) -> Psl2Elt {
        match self {
            SuLetter::S => Psl2Elt::s(),
            SuLetter::U => Psl2Elt::u(),
            SuLetter::U2 => Psl2Elt::u2(),
        }
    }

    fn u_power(self) -> u8 {
        match self {
            SuLetter::S => 0,
            SuLetter::U => 1,
            SuLetter::U2 => 2,
        }
    }
}

/// A reduced word in `S`, `U`, `U^2`: no `SS`, and no two adjacent `U`-powers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuWord(Vec<SuLetter>);

impl SuWord {
    pub fn new() -> Self {
        SuWord(Vec::new())
    }

    pub fn letters(&self) -> &[SuLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Append a letter, cancelling against the tail.
    pub fn push(&mut self, l: SuLetter) {
        match (self.0.last().copied(), l) {
            (Some(SuLetter::S), SuLetter::S) => {
                self.0.pop();
            }
            (Some(last), l) if last != SuLetter::S && l != SuLetter::S => {
                self.0.pop();
                match (last.u_power() + l.u_power()) % 3 {
                    1 => self.0.push(SuLetter::U),
                    2 => self.0.push(SuLetter::U2),
                    _ => {}
                }
            }
            _ => self.0.push(l),
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| match (w[0], w[1]) {
            (SuLetter::S, SuLetter::S) => false,
            (a, b) => a == SuLetter::S || b == SuLetter::S,
        })
    }

    /// Left-to-right product.
    pub fn evaluate(&self) -> Psl2Elt {
        self.0
            .iter()
            .fold(Psl2Elt::identity(), |acc, l| acc.mul(&l.matrix()))
    }
}

impl FromIterator<SuLetter> for SuWord {
    fn from_iter<I: IntoIterator<Item = SuLetter>>(iter: I) -> Self {
        let mut w = SuWord::new();
        for l in iter {
            w.push(l);
        }
        w
    }
}

/// Write `g` as a reduced word in `S` and `U`.
///
/// Peels `T^q S` factors off the right of `g` by Euclidean division on the
/// bottom row (floor quotients), leaving `T^b`; then substitutes
/// `T = U^2 S`, `T^{-1} = S U` and cancels.
pub fn decompose_su(g: &Psl2Elt) -> SuWord {
    // g = T^{top} S T^{q_k} ... S T^{q_1}; collected right to left
    let mut tail: Vec<(bool, BigInt)> = Vec::new();
    let (mut a, mut b, mut c, mut d) = (g.a.clone(), g.b.clone(), g.c.clone(), g.d.clone());
    while !c.is_zero() {
        // c > 0 by normalization
        let q = d.div_floor(&c);
        // M T^{-q}
        b -= &a * &q;
        d -= &c * &q;
        tail.push((false, q));
        // M S (right multiplication by S^{-1} = S in PSL), then renormalize
        let (na, nb, nc, nd) = (b.clone(), -a.clone(), d.clone(), -c.clone());
        let m = Psl2Elt::normalized(na, nb, nc, nd);
        (a, b, c, d) = (m.a, m.b, m.c, m.d);
        tail.push((true, BigInt::zero()));
    }
    // now [1, b; 0, 1]
    let mut w = SuWord::new();
    push_t_power(&mut w, &b);
    for (is_s, q) in tail.iter().rev() {
        if *is_s {
            w.push(SuLetter::S);
        } else {
            push_t_power(&mut w, q);
        }
    }
    w
}

fn push_t_power(w: &mut SuWord, k: &BigInt) {
    let count = k.magnitude().to_u64().expect("exponent fits in u64");
    for _ in 0..count {
        if k.is_positive() {
            w.push(SuLetter::U2);
            w.push(SuLetter::S);
        } else {
            w.push(SuLetter::S);
            w.push(SuLetter::U);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Psl2Elt {
        Psl2Elt::from_i64(a, b, c, d).unwrap()
    }

    #[test]
    fn generator_relations() {
        let s = Psl2Elt::s();
        let u = Psl2Elt::u();
        assert!(s.mul(&s).is_identity());
        assert!(u.mul(&u).mul(&u).is_identity());
        assert_eq!(Psl2Elt::u2().mul(&s), Psl2Elt::t());
        assert_eq!(u.mul(&u), Psl2Elt::u2());
    }

    #[test]
    fn inverses() {
        assert!(Psl2Elt::identity().inv().is_identity());
        assert_eq!(Psl2Elt::t().inv(), m(1, -1, 0, 1));
        assert_eq!(Psl2Elt::s().inv(), Psl2Elt::s());
        let g = m(2, 3, 5, 8).mul(&m(1, 4, 0, 1));
        assert!(g.mul(&g.inv()).is_identity());
    }

    #[test]
    fn sign_normalization() {
        assert_eq!(m(-1, 0, 0, -1), Psl2Elt::identity());
        assert_eq!(m(0, 1, -1, 0), Psl2Elt::s());
        assert_eq!(m(-2, -3, -5, -8), m(2, 3, 5, 8));
        assert!(Psl2Elt::from_i64(1, 1, 1, 1).is_err());
    }

    #[test]
    fn cusp_action() {
        let inf = Cusp::infinity();
        let zero = Cusp::zero();
        assert_eq!(Psl2Elt::t().act_cusp(&inf), inf);
        assert_eq!(Psl2Elt::s().act_cusp(&zero), inf);
        assert_eq!(Psl2Elt::u2().act_cusp(&zero), inf);
        assert_eq!(Psl2Elt::u().act_cusp(&zero), Cusp::from_i64(1, 1).unwrap());
        assert_eq!(
            Cusp::from_i64(-4, -6).unwrap(),
            Cusp::from_i64(2, 3).unwrap()
        );
        assert_eq!(Cusp::from_i64(-3, 0).unwrap(), inf);
        assert!(Cusp::from_i64(0, 0).is_err());
    }

    #[test]
    fn decompose_examples() {
        assert!(decompose_su(&Psl2Elt::identity()).is_empty());
        assert_eq!(decompose_su(&Psl2Elt::s()).letters(), &[SuLetter::S]);
        assert_eq!(
            decompose_su(&Psl2Elt::t()).letters(),
            &[SuLetter::U2, SuLetter::S]
        );
        for g in [
            m(2, 3, 5, 8),
            m(13, -4, 10, -3),
            m(1, -7, 0, 1),
            Psl2Elt::u(),
        ] {
            let w = decompose_su(&g);
            assert!(w.is_reduced());
            assert_eq!(w.evaluate(), g);
        }
    }

    #[test]
    fn parse_round_trip() {
        let g: Psl2Elt = "2, 3, 5, 8".parse().unwrap();
        assert_eq!(g, m(2, 3, 5, 8));
        assert_eq!(g.to_string(), "2,3,5,8");
        assert!("1,2,3".parse::<Psl2Elt>().is_err());
        assert!("1,1,1,1".parse::<Psl2Elt>().is_err());
        assert!("a,0,0,1".parse::<Psl2Elt>().is_err());
    }

    #[test]
    fn pow_and_conjugate() {
        assert_eq!(Psl2Elt::t().pow(5), m(1, 5, 0, 1));
        assert_eq!(Psl2Elt::t().pow(-3), m(1, -3, 0, 1));
        assert!(Psl2Elt::u().pow(3).is_identity());
        let g = m(2, 1, 1, 1);
        assert_eq!(g.conjugate(&Psl2Elt::s()).pow(2), Psl2Elt::identity());
    }
}
