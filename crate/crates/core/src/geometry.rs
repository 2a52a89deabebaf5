//! Exact hyperbolic geometry on points with rational real part and rational
//! squared imaginary part.
//!
//! Every point this crate needs lies in that class: images of rational points
//! under PSL_2(Z), copies of `i` and `e^{iπ/3}`, and intersections of geodesics
//! whose endpoints are rational. Geodesics through two such points have
//! rational center and squared radius, so all predicates reduce to signs of
//! rational expressions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::psl2::{Cusp, Psl2Elt};

pub type Q = BigRational;

pub(crate) fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// A point `x + i·sqrt(y_sq)` of the upper half-plane.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HPoint {
    pub x: Q,
    pub y_sq: Q,
}

impl HPoint {
    pub fn new(x: Q, y_sq: Q) -> Result<Self> {
        if !y_sq.is_positive() {
            return Err(domain("point is not in the upper half-plane"));
        }
        Ok(HPoint { x, y_sq })
    }

    /// The point `x + i y` with rational `y`.
    pub fn rational(x: Q, y: Q) -> Result<Self> {
        if !y.is_positive() {
            return Err(domain("point is not in the upper half-plane"));
        }
        Ok(HPoint { x, y_sq: &y * &y })
    }

    pub fn i() -> Self {
        HPoint {
            x: Q::zero(),
            y_sq: Q::one(),
        }
    }

    /// `e^{iπ/3} = 1/2 + i·sqrt(3)/2`.
    pub fn rho() -> Self {
        HPoint {
            x: q(1, 2),
            y_sq: q(3, 4),
        }
    }

    pub fn abs_sq(&self) -> Q {
        &self.x * &self.x + &self.y_sq
    }

    /// `y` when it is rational.
    pub fn rational_y(&self) -> Option<Q> {
        rational_sqrt(&self.y_sq)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y_sq.to_f64().unwrap_or(f64::NAN).sqrt(),
        )
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rational_y() {
            Some(y) => write!(f, "{} + {}i", self.x, y),
            None => write!(f, "{} + sqrt({})i", self.x, self.y_sq),
        }
    }
}

fn rational_sqrt(v: &Q) -> Option<Q> {
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    (&n * &n == *v.numer() && &d * &d == *v.denom()).then(|| Q::new(n, d))
}

/// Möbius action `z ↦ (az + b)/(cz + d)`.
pub fn act_point(g: &Psl2Elt, z: &HPoint) -> HPoint {
    let [a, b, c, d] = g.entries().map(|v| Q::from_integer(v.clone()));
    let abs = z.abs_sq();
    let den = &c * &c * &abs + Q::from_integer(2.into()) * &c * &d * &z.x + &d * &d;
    let num = &a * &c * &abs + (&a * &d + &b * &c) * &z.x + &b * &d;
    HPoint {
        x: num / &den,
        y_sq: &z.y_sq / (&den * &den),
    }
}

/// A complete geodesic of the upper half-plane.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Geodesic {
    Vertical { x: Q },
    Circle { center: Q, radius_sq: Q },
}

impl Geodesic {
    /// The geodesic with the two given ideal endpoints.
    pub fn between_cusps(p: &Cusp, q: &Cusp) -> Result<Self> {
        if p == q {
            return Err(domain("geodesic endpoints coincide"));
        }
        let val = |c: &Cusp| Q::new(c.numer().clone(), c.denom().clone());
        let two = Q::from_integer(2.into());
        Ok(match (p.is_infinity(), q.is_infinity()) {
            (true, _) => Geodesic::Vertical { x: val(q) },
            (_, true) => Geodesic::Vertical { x: val(p) },
            _ => {
                let (u, v) = (val(p), val(q));
                let half = (&u - &v) / &two;
                Geodesic::Circle {
                    center: (u + v) / two,
                    radius_sq: &half * &half,
                }
            }
        })
    }

    /// Sign of the defining expression at `z`: `x - c` for a line,
    /// `|z - c|^2 - r^2` for a circle. `Equal` means `z` is on the geodesic.
    pub fn side(&self, z: &HPoint) -> Ordering {
        match self {
            Geodesic::Vertical { x } => z.x.cmp(x),
            Geodesic::Circle { center, radius_sq } => {
                let dx = &z.x - center;
                (&dx * &dx + &z.y_sq).cmp(radius_sq)
            }
        }
    }

    pub fn contains(&self, z: &HPoint) -> bool {
        self.side(z) == Ordering::Equal
    }

    /// The unique intersection point in the upper half-plane, if any.
    pub fn intersect(&self, other: &Geodesic) -> Option<HPoint> {
        use Geodesic::*;
        let on_circle = |x: Q, center: &Q, radius_sq: &Q| {
            let dx = &x - center;
            let y_sq = radius_sq - &dx * &dx;
            y_sq.is_positive().then_some(HPoint { x, y_sq })
        };
        match (self, other) {
            (Vertical { .. }, Vertical { .. }) => None,
            (Vertical { x }, Circle { center, radius_sq })
            | (Circle { center, radius_sq }, Vertical { x }) => {
                on_circle(x.clone(), center, radius_sq)
            }
            (
                Circle {
                    center: c1,
                    radius_sq: r1,
                },
                Circle {
                    center: c2,
                    radius_sq: r2,
                },
            ) => {
                if c1 == c2 {
                    return None;
                }
                let two = Q::from_integer(2.into());
                let x = (r1 - r2 + c2 * c2 - c1 * c1) / (two * (c2 - c1));
                on_circle(x, c1, r1)
            }
        }
    }

    /// Position parameter along the geodesic, monotone along it:
    /// `y^2` on a vertical line, `x` on a semicircle.
    pub fn param(&self, z: &HPoint) -> Q {
        match self {
            Geodesic::Vertical { .. } => z.y_sq.clone(),
            Geodesic::Circle { .. } => z.x.clone(),
        }
    }
}

/// The geodesic through two distinct points.
pub fn geodesic_through(p: &HPoint, q: &HPoint) -> Result<Geodesic> {
    if p == q {
        return Err(domain("geodesic through a single point is not determined"));
    }
    if p.x == q.x {
        return Ok(Geodesic::Vertical { x: p.x.clone() });
    }
    let two = Q::from_integer(2.into());
    let center = (q.abs_sq() - p.abs_sq()) / (two * (&q.x - &p.x));
    let dx = &p.x - &center;
    let radius_sq = &dx * &dx + &p.y_sq;
    Ok(Geodesic::Circle { center, radius_sq })
}
