//! Independent reference computations used by the test suites. Nothing here
//! goes through the combinatorial-map pipeline: intersection counts come from
//! straight-line geometry on the flat torus, so they can be compared against
//! the engine's bigon-reduction path.

use crate::curves::Token;
use crate::geom::{rat, Rat};
use num_traits::Zero;

/// Geometric intersection number of two geodesics of coprime classes on the
/// torus: |p s - q r|.
pub fn lattice_int(p: i64, q: i64, r: i64, s: i64) -> i64 {
    (p * s - q * r).abs()
}

/// Token word of the straight (p,q)-geodesic on the square torus through the
/// point (x0, y0), recorded against the spine (loop 0 along y=0, loop 1 along
/// x=0). Sign convention matches the polygon realization: crossing the
/// horizontal circle moving +y exits through the inverse occurrence (sign -1);
/// crossing the vertical circle moving +x exits through the primary one (+1).
pub fn geodesic_word(p: i64, q: i64, x0: &Rat, y0: &Rat) -> Vec<Token> {
    assert!(p != 0 || q != 0);
    let g = gcd(p.abs(), q.abs());
    assert_eq!(g, 1, "classes must be coprime");
    // crossings with y ∈ Z (loop 0) happen at times t with y0 + q t ∈ Z;
    // crossings with x ∈ Z (loop 1) at x0 + p t ∈ Z. One period is t ∈ [0,1).
    let mut events: Vec<(Rat, usize, i8, Rat)> = Vec::new();
    for k in 0..q.abs() {
        // y0 + q t = m for integers m hit in order
        let m = if q > 0 {
            y0.ceil() + rat(k, 1)
        } else {
            y0.floor() - rat(k, 1)
        };
        let t = (&m - y0) / rat(q, 1);
        let x = frac(&(x0 + rat(p, 1) * &t));
        let sign = if q > 0 { -1 } else { 1 };
        events.push((t, 0, sign, x));
    }
    for k in 0..p.abs() {
        let m = if p > 0 {
            x0.ceil() + rat(k, 1)
        } else {
            x0.floor() - rat(k, 1)
        };
        let t = (&m - x0) / rat(p, 1);
        let y = frac(&(y0 + rat(q, 1) * &t));
        let sign = if p > 0 { 1 } else { -1 };
        events.push((t, 1, sign, y));
    }
    events.sort_by(|a, b| a.0.cmp(&b.0));
    events
        .into_iter()
        .map(|(_, l, s, h)| Token::new(s, l, h))
        .collect()
}

fn frac(x: &Rat) -> Rat {
    let f = x - x.floor();
    if f.is_zero() {
        // perturbations below avoid this in practice
        rat(1, 1_000_003)
    } else {
        f
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Straight-line segments of a curve drawn on the flat unit torus.
#[derive(Clone, Debug)]
pub struct FlatCurve {
    /// vertices of the closed PL curve, consecutive points joined by segments
    /// that may wrap around the torus; coordinates are taken mod 1 lazily.
    pub pts: Vec<(Rat, Rat)>,
}

/// Count transverse crossings of a PL curve with the vertical circle x = c on
/// the flat torus. Pure coordinate geometry, no reduction: callers arrange
/// for the drawn position to be minimal.
pub fn flat_vertical_crossings(curve: &FlatCurve, c: &Rat) -> usize {
    let n = curve.pts.len();
    let mut count = 0usize;
    for i in 0..n {
        let (x1, _) = &curve.pts[i];
        let (x2, _) = &curve.pts[(i + 1) % n];
        // unwrapped coordinates: segments store absolute (lifted) positions
        let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        // crossings with all lifts c + Z inside (lo, hi)
        let mut m = (lo - c).ceil();
        loop {
            let xc = c + &m;
            if &xc >= hi {
                break;
            }
            if &xc > lo {
                count += 1;
            }
            m += rat(1, 1);
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_formula() {
        assert_eq!(lattice_int(1, 0, 0, 1), 1);
        assert_eq!(lattice_int(1, 0, 2, 3), 3);
        assert_eq!(lattice_int(2, 3, 3, 4), 1);
    }

    #[test]
    fn geodesic_word_sizes() {
        let w = geodesic_word(2, 3, &rat(1, 17), &rat(1, 23));
        assert_eq!(w.len(), 5);
        assert_eq!(w.iter().filter(|t| t.loop_id == 0).count(), 3);
        assert_eq!(w.iter().filter(|t| t.loop_id == 1).count(), 2);
    }
}
