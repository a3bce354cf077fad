//! Built-in diagrams and the parameterized constructions: the genus-1 pieces,
//! the doubly-pointed torus-knot diagram, the twisted diagram family for the
//! Gluck twist on spun torus knots, and the macro moves used by its
//! standardization (the star and double-star operations and the seesaw step).

use crate::curves::{Anchor, ArcPath, Arrangement, Basepoint, Curve, Family, Occ, Token};
use crate::geom::{rat, Rat};
use crate::moves::{self, dehn_twist, handle_slide, SlideSpec, StabKind, Targets};
use crate::reduce::{geometric_int, is_parallel, reduce_minimal};
use crate::tdd::{parse_tdd, TddFile};
use crate::trisection::TrisectionDiagram;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum CatalogError {
    #[error("parameter must be at least 2, got {0}")]
    BadParameter(i64),
    #[error("seesaw index must be at least 1, got {0}")]
    BadIndex(i64),
    #[error("macro assertion failed: {0}")]
    MacroAssert(String),
    #[error(transparent)]
    Move(#[from] moves::MoveError),
    #[error(transparent)]
    Arr(#[from] crate::curves::ArrError),
    #[error(transparent)]
    Tdd(#[from] crate::tdd::TddError),
    #[error(transparent)]
    Tri(#[from] crate::trisection::TriError),
}

type Result<T> = std::result::Result<T, CatalogError>;

fn tok(sign: i8, l: usize, n: i64, d: i64) -> Token {
    Token::new(sign, l, rat(n, d))
}

// ---------------------------------------------------------------------------
// genus-1 pieces
// ---------------------------------------------------------------------------

/// The three genus-1 diagrams of the 4-sphere: two parallel curves and one
/// transverse curve; `kind` names the family carrying the transverse one.
pub fn genus1_s4(kind: StabKind) -> TrisectionDiagram {
    let mut arr = Arrangement::new(1);
    let par1 = vec![tok(1, 1, 1, 3)];
    let par2 = vec![tok(1, 1, 2, 3)];
    let dual = vec![tok(1, 0, 1, 2)];
    let (a, b, g) = match kind {
        StabKind::Alpha => (dual, par1, par2),
        StabKind::Beta => (par1, dual, par2),
        StabKind::Gamma => (par1, par2, dual),
    };
    arr.curves.insert("alpha1".into(), Curve { family: Family::Alpha, word: a });
    arr.curves.insert("beta1".into(), Curve { family: Family::Beta, word: b });
    arr.curves.insert("gamma1".into(), Curve { family: Family::Gamma, word: g });
    let mut d = TrisectionDiagram::new(
        arr,
        vec!["alpha1".into()],
        vec!["beta1".into()],
        vec!["gamma1".into()],
    );
    d.provenance = format!("genus-1 four-sphere piece, transverse {:?}", kind);
    d
}

// ---------------------------------------------------------------------------
// doubly pointed torus-knot diagram
// ---------------------------------------------------------------------------

/// Seed for the doubly-pointed torus-knot family: a diagonal curve together
/// with the two parallel twisting curves delta1, delta2 and the basepoints
/// z, w that separate them.
pub fn torus_knot_seed() -> Arrangement {
    let mut arr = Arrangement::new(1);
    // alpha: vertical curve; delta1, delta2: horizontal curves; z, w split
    // the two annuli between delta1 and delta2
    arr.curves.insert(
        "alpha".into(),
        Curve { family: Family::Alpha, word: vec![tok(1, 0, 1, 2)] },
    );
    arr.curves.insert(
        "delta1".into(),
        Curve { family: Family::Aux, word: vec![tok(1, 1, 3, 10)] },
    );
    arr.curves.insert(
        "delta2".into(),
        Curve { family: Family::Aux, word: vec![tok(1, 1, 7, 10)] },
    );
    // the diagonal seed for the knot curve
    arr.curves.insert(
        "beta".into(),
        Curve {
            family: Family::Beta,
            word: vec![tok(1, 0, 3, 4), tok(1, 1, 1, 2)],
        },
    );
    arr.basepoints.insert(
        "z".into(),
        Basepoint { loop_id: 0, height: rat(5, 8), occ: Occ::Primary },
    );
    arr.basepoints.insert(
        "w".into(),
        Basepoint { loop_id: 1, height: rat(11, 20), occ: Occ::Primary },
    );
    arr
}

/// The base doubly-pointed diagram (p = 2): one twist pair applied to the
/// seed realizes the (3,2) torus-knot curve.
pub fn torus_knot_base() -> Result<Arrangement> {
    let seed = torus_knot_seed();
    let t = Targets::Named(["beta".to_string()].into());
    let arr = dehn_twist(&seed, "delta1", 1, &t)?;
    Ok(dehn_twist(&arr, "delta2", -1, &t)?)
}

/// Doubly-pointed diagram of the (p+1, p) torus knot: p-2 further twist
/// pairs applied to the base.
pub fn torus_knot_dpd(p: i64) -> Result<Arrangement> {
    if p < 2 {
        return Err(CatalogError::BadParameter(p));
    }
    let mut arr = torus_knot_base()?;
    let t = Targets::Named(["beta".to_string()].into());
    for _ in 0..(p - 2) {
        arr = dehn_twist(&arr, "delta1", 1, &t)?;
        arr = dehn_twist(&arr, "delta2", -1, &t)?;
    }
    Ok(arr)
}

// ---------------------------------------------------------------------------
// the seesaw normal form
// ---------------------------------------------------------------------------

/// The genus-3 normal form on which the seesaw argument runs, together with
/// the auxiliary curves m, m', and the two twist curves dA (= the first twist
/// curve) and dC (its band partner across beta2).
///
/// Handle conventions (loops 1-based in files): a1/b1 carry three parallel
/// copies of the a1 circle (alpha1, beta1, m) and the b1 curves (gamma1, dA,
/// dC); the second and third handles carry the remaining family curves.
pub fn seesaw_base() -> Result<TddFile> {
    let text = "\
tdd 1
genus 3
# families
curve alpha1 alpha : +x2@1/8
curve alpha2 alpha : +x5@1/8 +x4@1/4
curve alpha3 alpha : +x6@1/2 -x3@1/4
curve beta1 beta : +x2@1/4
curve beta2 beta : +x4@1/2
curve beta3 beta : -x5@3/8
curve gamma1 gamma : +x1@1/4
curve gamma2 gamma : -x5@5/8
curve gamma3 gamma : +x3@1/2
# auxiliary curves for the inductive reduction
curve m aux : +x2@3/8
curve dA aux : +x1@1/2
curve dC aux : +x1@3/4 +x4@3/4
";
    Ok(parse_tdd(text)?)
}

/// Connector arc between two curves near a shared loop: anchors sit just
/// after crossings of that loop at adjacent heights.
pub fn arc_near_loop(
    arr: &Arrangement,
    c1: &str,
    c2: &str,
    loop_id: usize,
) -> Result<ArcPath> {
    let w1 = &arr.curves[c1].word;
    let w2 = &arr.curves[c2].word;
    // choose the pair of crossings with minimal height distance
    let mut best: Option<(Rat, usize, usize)> = None;
    for (i, t1) in w1.iter().enumerate() {
        if t1.loop_id != loop_id {
            continue;
        }
        for (j, t2) in w2.iter().enumerate() {
            if t2.loop_id != loop_id {
                continue;
            }
            let d = if t1.height > t2.height {
                &t1.height - &t2.height
            } else {
                &t2.height - &t1.height
            };
            match &best {
                Some((bd, _, _)) if *bd <= d => {}
                _ => best = Some((d, i, j)),
            }
        }
    }
    let (_, i, j) = best.ok_or_else(|| {
        CatalogError::MacroAssert(format!(
            "no shared loop x{} between {} and {}",
            loop_id + 1,
            c1,
            c2
        ))
    })?;
    Ok(ArcPath {
        start: Anchor { curve: c1.to_string(), chord: i, pos: rat(1, 97) },
        end: Anchor { curve: c2.to_string(), chord: j, pos: rat(1, 89) },
        word: vec![],
    })
}

/// Insert a parallel copy of a curve under a new name, with fresh heights
/// just above the original's crossings.
pub fn parallel_copy(arr: &Arrangement, src: &str, name: &str, fam: Family) -> Result<Arrangement> {
    let mut next = arr.clone();
    let word = next.curves[src].word.clone();
    let mut copy = Vec::with_capacity(word.len());
    for t in &word {
        let h = next.fresh_heights(t.loop_id, &t.height, true, 1)[0].clone();
        let tok = Token::new(t.sign, t.loop_id, h);
        crate::reduce::reserve(&mut next, &tok);
        copy.push(tok);
    }
    crate::reduce::unreserve(&mut next);
    next.insert_curve(name, fam, copy)?;
    Ok(next)
}

/// Connector arc chosen by exact search: among anchor placements on the two
/// curves' chords, pick the straight connector crossing the fewest drawn
/// segments (deterministic tie-break).
pub fn arc_between(arr: &Arrangement, c1: &str, c2: &str) -> Result<ArcPath> {
    use crate::geom::{seg_at, seg_cross_params};
    let r = arr.realize()?;
    let id1 = r.curve_id(c1).ok_or_else(|| CatalogError::MacroAssert(format!("no curve {}", c1)))?;
    let id2 = r.curve_id(c2).ok_or_else(|| CatalogError::MacroAssert(format!("no curve {}", c2)))?;
    let ch1 = &r.chords[&id1];
    let ch2 = &r.chords[&id2];
    let samples = [rat(1, 7), rat(1, 2), rat(6, 7)];
    let mut best: Option<(usize, usize, usize, Rat, Rat)> = None;
    for (k1, a) in ch1.iter().enumerate() {
        for (k2, b) in ch2.iter().enumerate() {
            for p1 in &samples {
                for p2 in &samples {
                    let q1 = seg_at(&a.p, &a.q, p1);
                    let q2 = seg_at(&b.p, &b.q, p2);
                    let mut crossings = 0usize;
                    for (id, chs) in &r.chords {
                        for (kk, ch) in chs.iter().enumerate() {
                            if (*id == id1 && kk == k1) || (*id == id2 && kk == k2) {
                                continue;
                            }
                            if seg_cross_params(&q1, &q2, &ch.p, &ch.q).is_some() {
                                crossings += 1;
                            }
                        }
                    }
                    match &best {
                        Some((bc, ..)) if *bc <= crossings => {}
                        _ => best = Some((crossings, k1, k2, p1.clone(), p2.clone())),
                    }
                }
            }
        }
    }
    let (_, k1, k2, p1, p2) = best.ok_or_else(|| CatalogError::MacroAssert("no chords".into()))?;
    Ok(ArcPath {
        start: Anchor { curve: c1.to_string(), chord: k1, pos: p1 },
        end: Anchor { curve: c2.to_string(), chord: k2, pos: p2 },
        word: vec![],
    })
}

/// Slide `moving` over `over` along a freshly chosen connector.
pub fn slide_auto(arr: &Arrangement, moving: &str, over: &str, times: usize) -> Result<Arrangement> {
    let mut cur = arr.clone();
    for _ in 0..times.max(1) {
        let arc = arc_between(&cur, moving, over)?;
        cur.arcs.insert("__slide".into(), arc);
        cur = handle_slide(
            &cur,
            &SlideSpec {
                moving: moving.into(),
                over: over.into(),
                arc: "__slide".into(),
                reverse: None,
                times: 1,
            },
        )?;
        cur.arcs.remove("__slide");
    }
    Ok(cur)
}

/// Slide `moving` over `over` along a synthesized connector near `loop_id`.
pub fn slide_near(
    arr: &Arrangement,
    moving: &str,
    over: &str,
    loop_id: usize,
    times: usize,
) -> Result<Arrangement> {
    let mut cur = arr.clone();
    for _ in 0..times.max(1) {
        let arc = arc_near_loop(&cur, moving, over, loop_id)?;
        cur.arcs.insert("__slide".into(), arc);
        cur = handle_slide(
            &cur,
            &SlideSpec {
                moving: moving.into(),
                over: over.into(),
                arc: "__slide".into(),
                reverse: None,
                times: 1,
            },
        )?;
        cur.arcs.remove("__slide");
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trisection::{homological_standard_check, validate_trisection};

    #[test]
    fn genus1_pieces_valid() {
        for kind in [StabKind::Alpha, StabKind::Beta, StabKind::Gamma] {
            let d = genus1_s4(kind);
            let ty = validate_trisection(&d).unwrap();
            assert_eq!(ty.k.iter().sum::<usize>(), 1);
            assert!(homological_standard_check(&d).pass);
        }
    }

    #[test]
    fn torus_knot_base_loads() {
        let arr = torus_knot_base().unwrap();
        assert_eq!(geometric_int(&arr, "alpha", "beta").unwrap(), 1 + 2);
    }
}
