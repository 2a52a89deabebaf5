//! Reduction to the fundamental polygon and words in the generators.
//!
//! [`locate_point`] follows the geodesic from an interior base point to `z`,
//! and each time it leaves the current copy of the polygon through a side it
//! pulls everything back by that side's pairing map. [`express_schreier`]
//! rewrites the `S`/`U` word of a matrix along the developed tree instead.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::cosets::CosetSystem;
use crate::error::{domain, Error, Result};
use crate::geometry::{act_point, geodesic_through, q, Geodesic, HPoint, Q};
use crate::polygon::{Generator, PolyVertex, SchreierS, Side, SpecialPolygon};
use crate::psl2::{decompose_su, Psl2Elt, SuLetter};

/// A point `x + iy` with rational coordinates, `y > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactPoint {
    pub x: Q,
    pub y: Q,
}

impl ExactPoint {
    pub fn new(x: Q, y: Q) -> Result<Self> {
        if !y.is_positive() {
            return Err(domain(format!("y = {y} is not positive")));
        }
        Ok(ExactPoint { x, y })
    }

    pub fn to_hpoint(&self) -> HPoint {
        HPoint {
            x: self.x.clone(),
            y_sq: &self.y * &self.y,
        }
    }

    pub fn from_hpoint(p: &HPoint) -> Option<Self> {
        Some(ExactPoint {
            x: p.x.clone(),
            y: p.rational_y()?,
        })
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.x, self.y)
    }
}

/// Parse `p`, `p/q` or a decimal into a rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let num = digits
            .parse::<num_bigint::BigInt>()
            .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))?;
        let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Q::new(num, den));
    }
    Q::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// A reduced word `∏ g_i^{e_i}` in the generators of a polygon.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GenWord(Vec<(usize, i64)>);

impl GenWord {
    pub fn new() -> Self {
        GenWord(Vec::new())
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Append `gens[gen]^exp`, merging with the last factor; elliptic
    /// exponents are kept in `1..order`.
    pub fn push(&mut self, gen: usize, exp: i64, gens: &[Generator]) {
        let order = gens[gen].order as i64;
        let norm = |e: i64| if order > 0 { e.rem_euclid(order) } else { e };
        match self.0.last_mut() {
            Some((g, e)) if *g == gen => {
                *e = norm(*e + exp);
                if *e == 0 {
                    self.0.pop();
                }
            }
            _ => {
                let e = norm(exp);
                if e != 0 {
                    self.0.push((gen, e));
                }
            }
        }
    }

    pub fn from_letters(letters: &[(usize, i64)], gens: &[Generator]) -> Result<Self> {
        let mut w = GenWord::new();
        for &(g, e) in letters {
            if g >= gens.len() {
                return Err(domain(format!("generator index {g} out of range")));
            }
            w.push(g, e, gens);
        }
        Ok(w)
    }

    /// The left-to-right product.
    pub fn evaluate(&self, gens: &[Generator]) -> Psl2Elt {
        self.0.iter().fold(Psl2Elt::identity(), |acc, &(g, e)| {
            acc.mul(&gens[g].matrix.pow(e))
        })
    }

    /// `[[gen_index, exponent], ...]`.
    pub fn to_json(&self) -> Value {
        json!(self
            .0
            .iter()
            .map(|&(g, e)| [g as i64, e])
            .collect::<Vec<_>>())
    }
}

/// Base points tried in turn; all lie strictly inside `Δ`.
pub fn base_points() -> [HPoint; 4] {
    let one = q(1, 1);
    [(1, 4), (1, 3), (2, 7), (3, 11)]
        .map(|(a, b)| HPoint::rational(q(a, b), one.clone()).expect("positive"))
}

/// Attempts allowed before giving up on a degenerate trace.
pub const ATTEMPTS: usize = 8;

/// Side crossings allowed per attempt.
pub const STEP_BUDGET: usize = 50_000;

/// One segment of a trace: while `g` is current, the geodesic runs from
/// `start` to `target = g⁻¹ z` inside the polygon.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub g: Psl2Elt,
    pub start: HPoint,
    pub target: HPoint,
    pub geodesic: Geodesic,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub base: HPoint,
    /// The point of the polygon with `evaluate(word)·w = z`.
    pub w: HPoint,
    pub word: GenWord,
    pub steps: Vec<TraceStep>,
}

/// Position along the side's carrier of one of its endpoints; `None` is `+∞`.
fn vertex_param(v: &PolyVertex, geo: &Geodesic) -> Option<Q> {
    match v {
        PolyVertex::Cusp(c) if c.is_infinity() => None,
        PolyVertex::Cusp(c) => Some(match geo {
            Geodesic::Vertical { .. } => Q::zero(),
            Geodesic::Circle { .. } => Q::new(c.numer().clone(), c.denom().clone()),
        }),
        other => other.point().map(|p| geo.param(p)),
    }
}

fn on_segment(side: &Side, p: &HPoint) -> bool {
    let t = side.geodesic.param(p);
    let a = vertex_param(&side.start, &side.geodesic);
    let b = vertex_param(&side.end, &side.geodesic);
    let (lo, hi) = match (a, b) {
        (Some(a), Some(b)) => (a.clone().min(b.clone()), Some(a.max(b))),
        (Some(a), None) | (None, Some(a)) => (a, None),
        (None, None) => return true,
    };
    t >= lo && hi.is_none_or(|h| t <= h)
}

fn finite_corner<'a>(side: &'a Side, p: &HPoint) -> Option<&'a PolyVertex> {
    [&side.start, &side.end]
        .into_iter()
        .find(|v| v.point() == Some(p))
}

fn in_half_plane(side: &Side, z: &HPoint) -> bool {
    let o = side.geodesic.side(z);
    o == Ordering::Equal || o == side.interior
}

enum Attempt {
    Done(Box<Trace>),
    Degenerate(String),
}

fn trace_from(poly: &SpecialPolygon, base: &HPoint, z: &HPoint) -> Result<Attempt> {
    if !poly.contains_strictly(base) {
        return Ok(Attempt::Degenerate(format!(
            "base point {base} is not interior"
        )));
    }
    let gens = &poly.generators;
    let mut g = Psl2Elt::identity();
    let mut p = base.clone();
    let mut t = z.clone();
    let mut word = GenWord::new();
    let mut steps = Vec::new();
    for _ in 0..STEP_BUDGET {
        if poly.contains(&t) {
            return Ok(Attempt::Done(Box::new(Trace {
                base: base.clone(),
                w: t,
                word,
                steps,
            })));
        }
        let line = geodesic_through(&p, &t)?;
        let dir = line.param(&t).cmp(&line.param(&p));
        let p_param = line.param(&p);
        // first crossing strictly beyond p in the direction of t
        let mut best: Option<(Q, HPoint, Vec<usize>)> = None;
        for (k, side) in poly.sides.iter().enumerate() {
            if side.geodesic == line {
                continue;
            }
            let Some(x) = line.intersect(&side.geodesic) else {
                continue;
            };
            let xp = line.param(&x);
            if xp.cmp(&p_param) != dir || !on_segment(side, &x) {
                continue;
            }
            match &mut best {
                Some((bp, _, ks)) if *bp == xp => ks.push(k),
                Some((bp, _, _)) if (xp.cmp(bp) == dir) => {}
                _ => best = Some((xp, x, vec![k])),
            }
        }
        let Some((_, hit, ks)) = best else {
            return Ok(Attempt::Degenerate(format!(
                "no exit found from the polygon toward {t}"
            )));
        };
        let side = &poly.sides[ks[0]];
        let h = match finite_corner(side, &hit) {
            Some(PolyVertex::Elliptic3 { .. }) => {
                // rotate about the corner so that t lands in the polygon's wedge
                let (a, b) = (side, &poly.sides[side.pair]);
                let r = &gens[side.generator].matrix;
                [r.clone(), r.inv()]
                    .into_iter()
                    .find(|h| {
                        let ht = act_point(h, &t);
                        in_half_plane(a, &ht) && in_half_plane(b, &ht)
                    })
                    .ok_or_else(|| {
                        Error::Internal("no rotation brings the trace into the corner".into())
                    })?
            }
            Some(PolyVertex::Cusp(_)) => {
                return Ok(Attempt::Degenerate("trace meets a cusp".into()));
            }
            // an interior point of a side, or the midpoint of a half pair
            _ => side.pairing_map(gens),
        };
        steps.push(TraceStep {
            g: g.clone(),
            start: p.clone(),
            target: t.clone(),
            geodesic: line,
        });
        let hinv = h.inv();
        let gen = side.generator;
        let exp = if gens[gen].matrix == h { -1 } else { 1 };
        word.push(gen, exp, gens);
        t = act_point(&h, &t);
        p = act_point(&h, &hit);
        g = g.mul(&hinv);
    }
    Ok(Attempt::Degenerate(format!(
        "no result after {STEP_BUDGET} crossings"
    )))
}

/// Trace `z` back to the polygon, recording every segment.
pub fn trace_point(poly: &SpecialPolygon, z: &ExactPoint) -> Result<Trace> {
    let target = z.to_hpoint();
    let mut reasons = Vec::new();
    for base in base_points().iter().cycle().take(ATTEMPTS) {
        match trace_from(poly, base, &target)? {
            Attempt::Done(tr) => return Ok(*tr),
            Attempt::Degenerate(r) => reasons.push(r),
        }
    }
    Err(Error::Degenerate {
        attempts: ATTEMPTS,
        reason: reasons.join("; "),
    })
}

/// A point `w` of the polygon and a word `g` in the generators with `g·w = z`.
pub fn locate_point(poly: &SpecialPolygon, z: &ExactPoint) -> Result<(ExactPoint, GenWord)> {
    let tr = trace_point(poly, z)?;
    let w = ExactPoint::from_hpoint(&tr.w)
        .ok_or_else(|| Error::Internal("image of a rational point has irrational height".into()))?;
    Ok((w, tr.word))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Rewrite the `S`/`U` word along the developed tree.
    #[default]
    Schreier,
    /// Trace the image of an interior point back to the polygon.
    Trace,
}

/// Write `g ∈ G` as a word in the generators of the polygon.
pub fn express(
    system: &CosetSystem,
    poly: &SpecialPolygon,
    g: &Psl2Elt,
    method: Method,
) -> Result<GenWord> {
    system.check_member(g)?;
    let word = match method {
        Method::Schreier => express_schreier(system, poly, g)?,
        Method::Trace => express_trace(poly, g)?,
    };
    if word.evaluate(&poly.generators) != *g {
        return Err(Error::Internal(format!(
            "word for {g} evaluates to something else"
        )));
    }
    Ok(word)
}

fn express_trace(poly: &SpecialPolygon, g: &Psl2Elt) -> Result<GenWord> {
    // g·z0 traces back to z0 itself, so the word is g
    let mut reasons = Vec::new();
    for base in base_points().iter().cycle().take(ATTEMPTS) {
        let z = act_point(g, base);
        match trace_from(poly, base, &z)? {
            Attempt::Done(tr) if tr.word.evaluate(&poly.generators) == *g => return Ok(tr.word),
            Attempt::Done(tr) => {
                reasons.push(format!("trace ended at {} instead of the base point", tr.w))
            }
            Attempt::Degenerate(r) => reasons.push(r),
        }
    }
    Err(Error::Degenerate {
        attempts: ATTEMPTS,
        reason: reasons.join("; "),
    })
}

/// Reidemeister–Schreier rewriting: walk the cosets along the `S`/`U` word of
/// `g`; every step that leaves the tree or is stabilized contributes a
/// generator.
pub fn express_schreier(
    system: &CosetSystem,
    poly: &SpecialPolygon,
    g: &Psl2Elt,
) -> Result<GenWord> {
    if system.n() != poly.sigma_s.len() || system.sigma_s() != poly.sigma_s.as_slice() {
        return Err(domain("polygon was not built from this coset system"));
    }
    let gens = &poly.generators;
    let mut word = GenWord::new();
    let mut x = poly.distinguished;
    for letter in decompose_su(g).letters() {
        match letter {
            SuLetter::S => {
                if let SchreierS::Gen { gen, exp } = poly.schreier_s[x as usize] {
                    word.push(gen, exp as i64, gens);
                }
                x = poly.sigma_s[x as usize];
            }
            SuLetter::U | SuLetter::U2 => {
                if let Some(gen) = poly.schreier_u[x as usize] {
                    // the generator is gU²g⁻¹, so U contributes its inverse
                    let exp = if *letter == SuLetter::U { -1 } else { 1 };
                    word.push(gen, exp, gens);
                }
                let ux = poly.sigma_u[x as usize];
                x = if *letter == SuLetter::U {
                    ux
                } else {
                    poly.sigma_u[ux as usize]
                };
            }
        }
    }
    if x != poly.distinguished {
        return Err(Error::NotInGroup(format!(
            "{g} moves the distinguished coset to coset {x}"
        )));
    }
    Ok(word)
}
