//! Exact rational plane geometry for realizing chord systems in a convex polygon.
//!
//! Boundary positions are mapped to strictly convex rational points on the unit
//! circle via the tangent-half-angle parameterization, so chord crossings,
//! crossing order along a chord, and germ directions at a crossing are all
//! decided by exact arithmetic. No floating point is used anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pt {
    pub x: Rat,
    pub y: Rat,
}

impl Pt {
    pub fn new(x: Rat, y: Rat) -> Self {
        Pt { x, y }
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt::new(&self.x - &o.x, &self.y - &o.y)
    }
}

/// Cross product of (b-a) and (c-a); sign gives orientation of the triple.
pub fn orient(a: &Pt, b: &Pt, c: &Pt) -> i32 {
    let v = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    sign_of(&v)
}

pub fn cross(u: &Pt, v: &Pt) -> i32 {
    let w = &u.x * &v.y - &u.y * &v.x;
    sign_of(&w)
}

fn sign_of(v: &Rat) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Point on the unit circle at rational turn parameter `u` in [0,1).
///
/// u is mapped monotonically to the angle range (-pi, pi) by t = tan(theta/2)
/// taken as the rational function t = (2u-1)/(u(1-u)) (strictly increasing),
/// then (x,y) = ((1-t^2)/(1+t^2), 2t/(1+t^2)). Distinct u give distinct,
/// strictly convex positions in counterclockwise order.
pub fn circle_point(u: &Rat) -> Pt {
    assert!(
        *u > Rat::zero() && *u < Rat::one(),
        "boundary parameter must be in (0,1), got {}",
        u
    );
    let one = Rat::one();
    let two = rat_from(2);
    let t = (&two * u - &one) / (u * &(&one - u));
    let t2 = &t * &t;
    let den = &one + &t2;
    Pt::new((&one - &t2) / &den, (&two * &t) / &den)
}

/// Intersection of segments pq and rs, if they cross in their interiors.
/// Returns parameters (ta, tb) along pq and rs in (0,1).
pub fn seg_cross_params(p: &Pt, q: &Pt, r: &Pt, s: &Pt) -> Option<(Rat, Rat)> {
    let d1 = q.sub(p);
    let d2 = s.sub(r);
    let denom = &d1.x * &d2.y - &d1.y * &d2.x;
    if denom.is_zero() {
        return None;
    }
    let w = r.sub(p);
    let ta = (&w.x * &d2.y - &w.y * &d2.x) / &denom;
    let tb = (&w.x * &d1.y - &w.y * &d1.x) / &denom;
    let zero = Rat::zero();
    let one = Rat::one();
    if ta > zero && ta < one && tb > zero && tb < one {
        Some((ta, tb))
    } else {
        None
    }
}

/// Point at parameter t along segment pq.
pub fn seg_at(p: &Pt, q: &Pt, t: &Rat) -> Pt {
    Pt::new(&p.x + t * &(&q.x - &p.x), &p.y + t * &(&q.y - &p.y))
}

/// Compare two direction vectors by counterclockwise angle starting just above
/// the positive x-axis. Used to sort germs around a vertex.
pub fn angle_cmp(u: &Pt, v: &Pt) -> std::cmp::Ordering {
    let hu = half(u);
    let hv = half(v);
    if hu != hv {
        return hu.cmp(&hv);
    }
    // same half-plane: compare by cross product
    match cross(u, v) {
        1 => std::cmp::Ordering::Less,
        -1 => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Equal,
    }
}

fn half(u: &Pt) -> u8 {
    // 0 for upper half (y>0, or y=0 and x>0), 1 for lower
    if u.y.is_positive() || (u.y.is_zero() && u.x.is_positive()) {
        0
    } else {
        1
    }
}
