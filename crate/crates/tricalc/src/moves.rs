//! Mapping-class and diagram moves on arrangements: Dehn twists, twist words,
//! handle slides, stabilization and destabilization.
//!
//! Twists are performed by splicing parallel copies of the twisting curve into
//! every strand that crosses it, with offsets following the shear of the twist
//! so the copies never cross each other, then reducing. The boxed "-1" of the
//! diagram notation is the left-handed twist, `dehn_twist(.., -1, ..)`.

use crate::curves::{Anchor, ArcPath, Arrangement, ArrError, Curve, Family, PathId, Token};
use crate::geom::Rat;
use crate::reduce::{geometric_int, is_parallel, reduce_minimal};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum MoveError {
    #[error("unknown curve: {0}")]
    UnknownCurve(String),
    #[error("unknown arc: {0}")]
    UnknownArc(String),
    #[error("cannot twist along {0}: empty or non-simple")]
    TwistAlongNonSimple(String),
    #[error("twist exponent must be nonzero")]
    ZeroExponent,
    #[error("arc {0} crosses a curve of the moving family")]
    ArcCrossesFamily(String),
    #[error("arc {0} does not join the moving curve to the over curve")]
    ArcEndpointsWrong(String),
    #[error("face for stabilization is marked by a basepoint")]
    MarkedFace,
    #[error("triple is not destabilizable: {0}")]
    NotDestabilizable(String),
    #[error("arrangement error: {0}")]
    Arr(#[from] ArrError),
}

#[derive(Clone, Debug)]
pub enum Targets {
    All,
    Named(BTreeSet<String>),
    AllExcept(BTreeSet<String>),
}

impl Targets {
    fn includes(&self, name: &str) -> bool {
        match self {
            Targets::All => true,
            Targets::Named(s) => s.contains(name),
            Targets::AllExcept(s) => !s.contains(name),
        }
    }
}

/// A composition of powers of twists along named curves, applied right to
/// left like function composition.
pub type MappingClassWord = Vec<(String, i64)>;

/// One handle slide: replace `moving` by its band sum with `over` along `arc`.
#[derive(Clone, Debug)]
pub struct SlideSpec {
    pub moving: String,
    pub over: String,
    pub arc: String,
    /// traverse the over curve against its orientation when forming the band;
    /// None picks the side that embeds (preferring the forward traversal)
    pub reverse: Option<bool>,
    pub times: usize,
}

// ---------------------------------------------------------------------------
// Dehn twists
// ---------------------------------------------------------------------------

pub fn dehn_twist(
    arr: &Arrangement,
    c_name: &str,
    n: i64,
    targets: &Targets,
) -> Result<Arrangement, MoveError> {
    if n == 0 {
        return Err(MoveError::ZeroExponent);
    }
    arr.curve(c_name)
        .map_err(|_| MoveError::UnknownCurve(c_name.to_string()))?;
    let r = arr.realize()?;
    let c_id = r.curve_id(c_name).unwrap();
    let c_word = arr.curves[c_name].word.clone();
    let big_l = c_word.len();
    if big_l == 0 {
        return Err(MoveError::TwistAlongNonSimple(c_name.to_string()));
    }

    // collect detours per target path: (chord, param) -> spiral description
    struct Detour {
        chord: usize,
        param: Rat,
        fwd: bool,
        c_chord: usize,
        c_param: Rat,
    }
    let mut detours: BTreeMap<PathId, Vec<Detour>> = BTreeMap::new();
    for (k, x) in r.crossings.iter().enumerate() {
        let _ = k;
        let (target, t_chord, t_par, cc, cpar, sign) = if x.a == c_id {
            (x.b, x.b_chord, x.b_t.clone(), x.a_chord, x.a_t.clone(), -x.sign)
        } else if x.b == c_id {
            (x.a, x.a_chord, x.a_t.clone(), x.b_chord, x.b_t.clone(), x.sign)
        } else {
            continue;
        };
        let tname = r.path_name(target).to_string();
        if target == c_id || !targets.includes(&tname) {
            continue;
        }
        // spiral direction: forward along c iff n and the crossing sign agree
        let fwd = (n > 0) == (sign > 0);
        detours.entry(target).or_default().push(Detour {
            chord: t_chord,
            param: t_par,
            fwd,
            c_chord: cc,
            c_param: cpar,
        });
    }

    // spiral passes over each c token: (loop, height) -> [(shear offset, pass id)]
    // pass ids are (target, detour index, global step)
    let turns = n.unsigned_abs() as usize;
    let total = turns * big_l;
    #[derive(Clone)]
    struct Pass {
        target: PathId,
        detour: usize,
        step: usize,
        offset: Rat,
        token: Token,
    }
    let mut passes_by_ctoken: BTreeMap<usize, Vec<Pass>> = BTreeMap::new();
    for (&target, ds) in &detours {
        for (di, d) in ds.iter().enumerate() {
            // entry phase along c in token steps: chord d.c_chord means the
            // entry sits between c tokens c_chord and c_chord+1
            for g in 0..total {
                let (tok_idx, tok) = if d.fwd {
                    let idx = (d.c_chord + 1 + g) % big_l;
                    (idx, c_word[idx].clone())
                } else {
                    let idx = (d.c_chord + big_l - (g % big_l)) % big_l;
                    let t = &c_word[idx];
                    (idx, Token::new(-t.sign, t.loop_id, t.height.clone()))
                };
                let tot = Rat::new((total as i64).into(), 1.into());
                let offset = if d.fwd {
                    (Rat::new((g as i64).into(), 1.into()) + Rat::one() - d.c_param.clone()) / &tot
                } else {
                    Rat::one() - (Rat::new((g as i64).into(), 1.into()) + d.c_param.clone()) / &tot
                };
                passes_by_ctoken.entry(tok_idx).or_default().push(Pass {
                    target,
                    detour: di,
                    step: g,
                    offset,
                    token: tok,
                });
            }
        }
    }

    // allocate heights: for each c token, spread the passes across the gap
    // around the token's height in offset order
    let mut next_arr = arr.clone();
    let mut assigned: BTreeMap<(usize, usize, usize), Token> = BTreeMap::new(); // (path-ord, detour, step) -> token
    let path_ord = |p: PathId| -> usize {
        match p {
            PathId::Curve(i) => i,
            PathId::Arc(i) => 1_000_000 + i,
        }
    };
    for (tok_idx, passes) in passes_by_ctoken.iter() {
        let base = &c_word[*tok_idx];
        let sigma = base.sign as i64;
        let half = Rat::new(1.into(), 2.into());
        // signed radial position: positive means the pass sits above the base
        // height. The orientation follows the shear: for a positive twist the
        // annulus coordinate runs from the left of c to its right, and height
        // order flips with the token's crossing direction.
        let pos_of = |r: &Rat| -> Rat {
            let raw = if n > 0 {
                &half - r
            } else {
                r - &half
            };
            if sigma > 0 {
                raw
            } else {
                -raw
            }
        };
        let mut above: Vec<(Rat, (usize, usize, usize), Token)> = Vec::new();
        let mut below: Vec<(Rat, (usize, usize, usize), Token)> = Vec::new();
        for p in passes {
            let key = (path_ord(p.target), p.detour, p.step);
            let pos = pos_of(&p.offset);
            if pos > Rat::zero() {
                above.push((pos, key, p.token.clone()));
            } else {
                below.push((-pos, key, p.token.clone()));
            }
        }
        above.sort_by(|a, b| a.0.cmp(&b.0)); // nearest first
        below.sort_by(|a, b| a.0.cmp(&b.0));
        let ah: Vec<Rat> = next_arr.fresh_heights(base.loop_id, &base.height, true, above.len());
        let bh: Vec<Rat> = next_arr.fresh_heights(base.loop_id, &base.height, false, below.len());
        for (i, (_, key, t)) in above.iter().enumerate() {
            let tok = Token::new(t.sign, t.loop_id, ah[i].clone());
            crate::reduce::reserve(&mut next_arr, &tok);
            assigned.insert(*key, tok);
        }
        for (i, (_, key, t)) in below.iter().enumerate() {
            let tok = Token::new(t.sign, t.loop_id, bh[i].clone());
            crate::reduce::reserve(&mut next_arr, &tok);
            assigned.insert(*key, tok);
        }
    }
    crate::reduce::unreserve(&mut next_arr);

    // rebuild target words with detours spliced in, remapping arc anchors
    let mut anchor_remap: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for (&target, ds) in &detours {
        let name = r.path_name(target).to_string();
        let is_curve = matches!(target, PathId::Curve(_));
        let old_word = if is_curve {
            arr.curves[&name].word.clone()
        } else {
            arr.arcs[&name].word.clone()
        };
        let nw = old_word.len();
        // detours per chord sorted by param
        let mut per_chord: BTreeMap<usize, Vec<(Rat, usize)>> = BTreeMap::new();
        for (di, d) in ds.iter().enumerate() {
            per_chord.entry(d.chord).or_default().push((d.param.clone(), di));
        }
        for v in per_chord.values_mut() {
            v.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut new_word: Vec<Token> = Vec::new();
        // chords are indexed so that chord k follows token k for curves;
        // for arcs chord 0 precedes token 0
        if is_curve {
            for k in 0..nw {
                new_word.push(old_word[k].clone());
                if let Some(list) = per_chord.get(&k) {
                    for (_, di) in list {
                        for g in 0..total {
                            new_word.push(assigned[&(path_ord(target), *di, g)].clone());
                        }
                    }
                }
                // remap anchors sitting on chord k of this curve
                anchor_remap.insert((name.clone(), k), new_word.len().saturating_sub(1));
            }
            if nw == 0 {
                continue;
            }
            next_arr.curves.get_mut(&name).unwrap().word = new_word;
        } else {
            // arcs: chord 0 from the start anchor to token 0, chord k from
            // token k-1 to token k, chord nw from token nw-1 to the end anchor
            for k in 0..=nw {
                if let Some(list) = per_chord.get(&k) {
                    for (_, di) in list {
                        for g in 0..total {
                            new_word.push(assigned[&(path_ord(target), *di, g)].clone());
                        }
                    }
                }
                if k < nw {
                    new_word.push(old_word[k].clone());
                }
            }
            next_arr.arcs.get_mut(&name).unwrap().word = new_word;
        }
    }

    // remap anchors of arcs whose hosts were rewritten: the anchor keeps its
    // geometric spot right after the original token index
    let arc_names: Vec<String> = next_arr.arcs.keys().cloned().collect();
    for an in arc_names {
        let arc = next_arr.arcs.get(&an).unwrap().clone();
        let mut fix = arc.clone();
        for (anchor, slot) in [(&arc.start, 0usize), (&arc.end, 1)] {
            if detours
                .keys()
                .any(|p| r.path_name(*p) == anchor.curve && matches!(p, PathId::Curve(_)))
            {
                if let Some(&new_chord) = anchor_remap.get(&(anchor.curve.clone(), anchor.chord)) {
                    let na = Anchor {
                        curve: anchor.curve.clone(),
                        chord: new_chord,
                        pos: anchor.pos.clone(),
                    };
                    if slot == 0 {
                        fix.start = na;
                    } else {
                        fix.end = na;
                    }
                }
            }
        }
        next_arr.arcs.insert(an, fix);
    }

    Ok(reduce_minimal(&next_arr)?)
}

/// Apply a mapping class word right-to-left.
pub fn apply_word(
    arr: &Arrangement,
    word: &MappingClassWord,
    targets: &Targets,
) -> Result<Arrangement, MoveError> {
    let mut cur = arr.clone();
    for (c, e) in word.iter().rev() {
        if *e == 0 {
            continue;
        }
        cur = dehn_twist(&cur, c, *e, targets)?;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// handle slides
// ---------------------------------------------------------------------------

pub fn handle_slide(arr: &Arrangement, spec: &SlideSpec) -> Result<Arrangement, MoveError> {
    let mut cur = arr.clone();
    for _ in 0..spec.times.max(1) {
        cur = match spec.reverse {
            Some(rev) => slide_once(&cur, spec, rev)?,
            None => match slide_once(&cur, spec, false) {
                Ok(out) => out,
                Err(MoveError::Arr(ArrError::SelfCrossing(_))) => slide_once(&cur, spec, true)?,
                Err(e) => return Err(e),
            },
        };
    }
    Ok(cur)
}

fn slide_once(arr: &Arrangement, spec: &SlideSpec, reverse: bool) -> Result<Arrangement, MoveError> {
    let moving = spec.moving.as_str();
    let over = spec.over.as_str();
    if moving == over {
        return Err(MoveError::ArcEndpointsWrong(spec.arc.clone()));
    }
    let m_curve = arr
        .curve(moving)
        .map_err(|_| MoveError::UnknownCurve(moving.to_string()))?
        .clone();
    arr.curve(over)
        .map_err(|_| MoveError::UnknownCurve(over.to_string()))?;
    let arc = arr
        .arcs
        .get(&spec.arc)
        .ok_or_else(|| MoveError::UnknownArc(spec.arc.clone()))?
        .clone();
    // orient the arc from the moving curve to the over curve
    let (a_from, a_to, arc_word): (Anchor, Anchor, Vec<Token>) =
        if arc.start.curve == moving && arc.end.curve == over {
            (arc.start.clone(), arc.end.clone(), arc.word.clone())
        } else if arc.start.curve == over && arc.end.curve == moving {
            let mut w: Vec<Token> = arc.word.clone();
            w.reverse();
            let w = w
                .into_iter()
                .map(|t| Token::new(-t.sign, t.loop_id, t.height))
                .collect();
            (arc.end.clone(), arc.start.clone(), w)
        } else {
            return Err(MoveError::ArcEndpointsWrong(spec.arc.clone()));
        };
    // the arc interior must avoid the moving curve's family
    let fam = m_curve.family;
    if fam != Family::Aux {
        let r = arr.realize()?;
        let arc_id = r
            .arc_names
            .iter()
            .position(|n| *n == spec.arc)
            .map(PathId::Arc)
            .unwrap();
        for x in &r.crossings {
            for (p, q) in [(x.a, x.b), (x.b, x.a)] {
                if p == arc_id {
                    if let PathId::Curve(ci) = q {
                        let cn = &r.curve_names[ci];
                        if arr.curves[cn].family == fam {
                            return Err(MoveError::ArcCrossesFamily(spec.arc.clone()));
                        }
                    }
                }
            }
        }
    }

    let o_word = arr.curves[over].word.clone();
    let m_word = m_curve.word.clone();
    let mut next = arr.clone();

    // fresh parallel heights: two strands along the arc, one copy of over
    let mut arc_side1: Vec<Token> = Vec::new();
    let mut arc_side2: Vec<Token> = Vec::new();
    for t in &arc_word {
        let h1 = next.fresh_heights(t.loop_id, &t.height, true, 1)[0].clone();
        let tok1 = Token::new(t.sign, t.loop_id, h1);
        crate::reduce::reserve(&mut next, &tok1);
        let h2 = next.fresh_heights(t.loop_id, &t.height, false, 1)[0].clone();
        let tok2 = Token::new(t.sign, t.loop_id, h2);
        crate::reduce::reserve(&mut next, &tok2);
        arc_side1.push(tok1);
        arc_side2.push(tok2);
    }
    let o_start = a_to.chord; // band attaches on this chord of `over`
    let mut o_copy: Vec<Token> = Vec::new();
    let lo = o_word.len();
    for g in 0..lo {
        let t = if !reverse {
            o_word[(o_start + 1 + g) % lo].clone()
        } else {
            let idx = (o_start + lo - g) % lo;
            let t = &o_word[idx];
            Token::new(-t.sign, t.loop_id, t.height.clone())
        };
        let h = next.fresh_heights(t.loop_id, &t.height, true, 1)[0].clone();
        let tok = Token::new(t.sign, t.loop_id, h);
        crate::reduce::reserve(&mut next, &tok);
        o_copy.push(tok);
    }
    crate::reduce::unreserve(&mut next);

    // the new moving curve: m opened at the arc's chord, out along the arc,
    // once around the over copy, and back
    let lm = m_word.len();
    let m_open = a_from.chord;
    let mut new_word: Vec<Token> = Vec::new();
    for g in 0..lm {
        new_word.push(m_word[(m_open + 1 + g) % lm].clone());
    }
    new_word.extend(arc_side1.iter().cloned());
    new_word.extend(o_copy.iter().cloned());
    for t in arc_side2.iter().rev() {
        new_word.push(Token::new(-t.sign, t.loop_id, t.height.clone()));
    }
    next.curves.get_mut(moving).unwrap().word = new_word;
    Ok(reduce_minimal(&next)?)
}

// ---------------------------------------------------------------------------
// stabilization / destabilization
// ---------------------------------------------------------------------------

/// Which family receives the transverse curve of the new genus-1 piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabKind {
    Alpha,
    Beta,
    Gamma,
}

impl StabKind {
    pub fn family(&self) -> Family {
        match self {
            StabKind::Alpha => Family::Alpha,
            StabKind::Beta => Family::Beta,
            StabKind::Gamma => Family::Gamma,
        }
    }
}

/// Add a new handle carrying the standard genus-1 piece. The handle is
/// attached inside the face at the final polygon corner, which must be
/// unmarked. Returns the names of the new (alpha, beta, gamma) curves.
pub fn stabilize(
    arr: &Arrangement,
    kind: StabKind,
    names: (&str, &str, &str),
) -> Result<Arrangement, MoveError> {
    // the face at the last corner must not carry a basepoint: locate the face
    // adjacent to the end of the last loop
    if arr.genus > 0 {
        let r = arr.realize()?;
        let last_loop = arr.n_loops() - 1;
        let mut blocked = false;
        for d in 0..r.map.pairing.len() {
            if let crate::curves::DartKind::Spine { loop_id, hi, up, .. } = &r.dart_kind[d] {
                if *loop_id == last_loop && *up && *hi == Rat::one() {
                    let f = r.map.face_of[d];
                    let f2 = r.map.face_of[r.map.pairing[d]];
                    if r.map.face_marks.contains_key(&f) && r.map.face_marks.contains_key(&f2) {
                        blocked = true;
                    }
                }
            }
        }
        if blocked {
            return Err(MoveError::MarkedFace);
        }
    }
    let mut next = arr.clone();
    next.genus += 1;
    let la = 2 * (next.genus - 1);
    let lb = la + 1;
    let h = |n: i64, d: i64| Rat::new(n.into(), d.into());
    // two parallel curves cross the b loop; the transverse one crosses a
    let par1 = vec![Token::new(1, lb, h(1, 3))];
    let par2 = vec![Token::new(1, lb, h(2, 3))];
    let dual = vec![Token::new(1, la, h(1, 2))];
    let (aw, bw, gw) = match kind {
        StabKind::Alpha => (dual, par1, par2),
        StabKind::Beta => (par1, dual, par2),
        StabKind::Gamma => (par1, par2, dual),
    };
    next.insert_curve(names.0, Family::Alpha, aw)?;
    next.insert_curve(names.1, Family::Beta, bw)?;
    next.insert_curve(names.2, Family::Gamma, gw)?;
    Ok(next)
}

/// Check the geometric destabilization conditions for a triple: two of the
/// curves parallel, the third meeting each exactly once, every other curve
/// disjoint from all three.
pub fn triple_is_destab(
    arr: &Arrangement,
    a: &str,
    b: &str,
    c: &str,
) -> Result<bool, MoveError> {
    let names = [a, b, c];
    for n in names {
        arr.curve(n).map_err(|_| MoveError::UnknownCurve(n.to_string()))?;
    }
    // two parallel + dual pattern, in any of the three positions
    let pat = |x: &str, y: &str, d: &str| -> Result<bool, MoveError> {
        Ok(is_parallel(arr, x, y)?
            && geometric_int(arr, d, x)? == 1
            && geometric_int(arr, d, y)? == 1)
    };
    let shape = pat(a, c, b)? || pat(a, b, c)? || pat(b, c, a)?;
    if !shape {
        return Ok(false);
    }
    for (on, oc) in &arr.curves {
        if names.contains(&on.as_str()) || oc.family == Family::Aux {
            continue;
        }
        for n in names {
            if geometric_int(arr, on, n)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Remove the genus-1 piece spanned by the triple. The triple curves vanish,
/// auxiliary curves meeting them are dropped (returned in the report), all
/// other curves are preserved up to isotopy, and the genus drops by one.
pub struct DestabReport {
    pub arr: Arrangement,
    pub dropped_aux: Vec<String>,
}

pub fn destabilize(
    arr: &Arrangement,
    a: &str,
    b: &str,
    c: &str,
) -> Result<DestabReport, MoveError> {
    if !triple_is_destab(arr, a, b, c)? {
        return Err(MoveError::NotDestabilizable(format!("({}, {}, {})", a, b, c)));
    }
    let red = reduce_minimal(arr)?;
    // find a single-token member: the compression slot
    let member = [a, b, c]
        .into_iter()
        .find(|n| red.curves[*n].word.len() == 1)
        .ok_or_else(|| {
            MoveError::NotDestabilizable(
                "no triple member reduces to a single spine crossing".into(),
            )
        })?;
    let tok = red.curves[member].word[0].clone();
    let handle = tok.loop_id / 2;
    let (la, lb) = (2 * handle, 2 * handle + 1);
    // drop aux curves that meet the triple
    let mut dropped = Vec::new();
    let mut work = red.clone();
    let aux_names: Vec<String> = work
        .curves
        .iter()
        .filter(|(_, cv)| cv.family == Family::Aux)
        .map(|(n, _)| n.clone())
        .collect();
    for an in aux_names {
        if [a, b, c].contains(&an.as_str()) {
            continue;
        }
        let mut hits = false;
        for m in [a, b, c] {
            if geometric_int(&work, &an, m)? != 0 {
                hits = true;
            }
        }
        if hits {
            work.remove_curve(&an);
            dropped.push(an);
        }
    }
    for n in [a, b, c] {
        work.remove_curve(n);
    }
    for bp in work.basepoints.values() {
        assert!(
            bp.loop_id != la && bp.loop_id != lb,
            "basepoint on a compressed handle"
        );
    }
    // compress: delete all crossings with the two handle loops, remove the
    // handle from the scheme, renumber the remaining loops
    let mut out = Arrangement::new(work.genus - 1);
    let renumber = |l: usize| -> usize {
        if l > lb {
            l - 2
        } else {
            l
        }
    };
    let mut dropped_empty: Vec<String> = Vec::new();
    for (n, cv) in &work.curves {
        let w: Vec<Token> = cv
            .word
            .iter()
            .filter(|t| t.loop_id != la && t.loop_id != lb)
            .map(|t| Token::new(t.sign, renumber(t.loop_id), t.height.clone()))
            .collect();
        if w.is_empty() {
            if cv.family == Family::Aux {
                dropped_empty.push(n.clone());
                continue;
            }
            return Err(MoveError::NotDestabilizable(format!(
                "curve {} becomes trivial after compression",
                n
            )));
        }
        out.curves.insert(n.clone(), Curve {
            family: cv.family,
            word: w,
        });
    }
    dropped.extend(dropped_empty);
    for (n, arc) in &work.arcs {
        if out.curves.contains_key(&arc.start.curve) && out.curves.contains_key(&arc.end.curve) {
            let w: Vec<Token> = arc
                .word
                .iter()
                .filter(|t| t.loop_id != la && t.loop_id != lb)
                .map(|t| Token::new(t.sign, renumber(t.loop_id), t.height.clone()))
                .collect();
            // anchors may have shifted if the host word changed; recompute the
            // chord index conservatively by clamping
            let clamp = |anchor: &Anchor| -> Anchor {
                let host_len = out.curves[&anchor.curve].word.len();
                Anchor {
                    curve: anchor.curve.clone(),
                    chord: anchor.chord.min(host_len.saturating_sub(1)),
                    pos: anchor.pos.clone(),
                }
            };
            out.arcs.insert(
                n.clone(),
                ArcPath {
                    start: clamp(&arc.start),
                    end: clamp(&arc.end),
                    word: w,
                },
            );
        }
    }
    for (n, bp) in &work.basepoints {
        let mut b2 = bp.clone();
        b2.loop_id = renumber(b2.loop_id);
        out.basepoints.insert(n.clone(), b2);
    }
    let out = if out.genus >= 1 {
        reduce_minimal(&out)?
    } else {
        out
    };
    Ok(DestabReport {
        arr: out,
        dropped_aux: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;
    use crate::reduce::{algebraic_int, geometric_int, is_parallel};

    fn torus() -> Arrangement {
        Arrangement::new(1)
    }

    fn vertical(arr: &mut Arrangement, name: &str, h: Rat) {
        arr.insert_curve(name, Family::Aux, vec![Token::new(1, 0, h)])
            .unwrap();
    }

    fn horizontal(arr: &mut Arrangement, name: &str, h: Rat) {
        arr.insert_curve(name, Family::Aux, vec![Token::new(1, 1, h)])
            .unwrap();
    }

    #[test]
    fn twist_disjoint_is_identity() {
        let mut arr = torus();
        vertical(&mut arr, "c", rat(1, 3));
        vertical(&mut arr, "d", rat(2, 3));
        let out = dehn_twist(&arr, "c", 1, &Targets::All).unwrap();
        assert!(is_parallel(&out, "c", "d").unwrap());
        assert_eq!(out.curves["d"].word.len(), 1);
    }

    #[test]
    fn twist_dual_pair_class_and_count() {
        let mut arr = torus();
        vertical(&mut arr, "c", rat(1, 2));
        horizontal(&mut arr, "d", rat(1, 2));
        let before = arr.homology_class("d").unwrap();
        let cc = arr.homology_class("c").unwrap();
        let pairing = arr.pair_classes(&before, &cc);
        let out = dehn_twist(&arr, "c", 1, &Targets::Named(["d".into()].into())).unwrap();
        let after = out.homology_class("d").unwrap();
        // Picard-Lefschetz: [t_c(d)] = [d] + <d,c>[c]
        for i in 0..2 {
            assert_eq!(after[i], before[i] + pairing * cc[i], "component {}", i);
        }
        assert_eq!(geometric_int(&out, "c", "d").unwrap(), 1);
    }

    #[test]
    fn twist_inverse_cancels() {
        let mut arr = torus();
        vertical(&mut arr, "c", rat(1, 2));
        horizontal(&mut arr, "d", rat(1, 2));
        let once = dehn_twist(&arr, "c", 1, &Targets::All).unwrap();
        let back = dehn_twist(&once, "c", -1, &Targets::All).unwrap();
        assert!(is_parallel(&back, "d", "d").unwrap());
        assert_eq!(geometric_int(&back, "c", "d").unwrap(), 1);
        assert_eq!(back.homology_class("d").unwrap(), arr.homology_class("d").unwrap());
        // the word must come back to a single crossing
        assert_eq!(back.curves["d"].word.len(), 1);
    }

    #[test]
    fn twist_growth_on_torus() {
        let mut arr = torus();
        vertical(&mut arr, "c", rat(1, 2));
        horizontal(&mut arr, "d", rat(1, 2));
        for n in [1i64, 2, 3, -2] {
            let out = dehn_twist(&arr, "c", n, &Targets::All).unwrap();
            // i(t_c^n(d), e) for e the horizontal dual of c: the twisted curve
            // has class (1, +-n); against the vertical c it still meets once
            assert_eq!(geometric_int(&out, "c", "d").unwrap(), 1, "n={}", n);
            let cls = out.homology_class("d").unwrap();
            assert_eq!(cls[0].abs(), n.unsigned_abs() as i64, "n={}", n);
        }
    }

    #[test]
    fn slide_changes_class_and_returns() {
        let mut arr = torus();
        vertical(&mut arr, "m", rat(1, 3));
        vertical(&mut arr, "o", rat(2, 3));
        // short arc between the two parallel curves
        arr.arcs.insert(
            "A".into(),
            ArcPath {
                start: Anchor {
                    curve: "m".into(),
                    chord: 0,
                    pos: rat(1, 2),
                },
                end: Anchor {
                    curve: "o".into(),
                    chord: 0,
                    pos: rat(1, 2),
                },
                word: vec![],
            },
        );
        let before = arr.homology_class("m").unwrap();
        let oc = arr.homology_class("o").unwrap();
        let out = handle_slide(
            &arr,
            &SlideSpec {
                moving: "m".into(),
                over: "o".into(),
                arc: "A".into(),
                reverse: None,
                times: 1,
            },
        )
        .unwrap();
        // over a parallel copy the embedded band reverses orientation, so the
        // class cancels and the slid curve bounds
        let after = out.homology_class("m").unwrap();
        let minus: Vec<i64> = (0..2).map(|i| before[i] - oc[i]).collect();
        assert_eq!(after, minus);
        assert_eq!(geometric_int(&out, "m", "o").unwrap(), 0);
        assert!(crate::reduce::is_trivial(&out, "m").unwrap());
    }

    #[test]
    fn stabilize_then_destabilize_roundtrip() {
        let arr = torus();
        let mut arr = arr;
        vertical(&mut arr, "x", rat(1, 2));
        let st = stabilize(&arr, StabKind::Beta, ("a2", "b2", "g2")).unwrap();
        assert_eq!(st.genus, 2);
        assert!(triple_is_destab(&st, "a2", "b2", "g2").unwrap());
        let rep = destabilize(&st, "a2", "b2", "g2").unwrap();
        assert_eq!(rep.arr.genus, 1);
        assert!(rep.arr.curves.contains_key("x"));
        assert_eq!(rep.arr.curves["x"].word.len(), 1);
    }

    #[test]
    fn twist_then_destabilize_cleans_wrapping() {
        // a curve wrapping the stabilized handle via a twist still destabilizes
        let mut arr = torus();
        vertical(&mut arr, "x", rat(1, 2));
        let st = stabilize(&arr, StabKind::Beta, ("a2", "b2", "g2")).unwrap();
        // twist x along a curve of the new handle? x is disjoint from it, so
        // slide-free wrapping needs a connected curve; use a twist along a2
        // applied to everything: x unchanged, but the handle curves move
        let tw = dehn_twist(&st, "b2", 1, &Targets::Named(["a2".into()].into())).unwrap();
        // a2 now crosses the handle loops more; the triple is still there
        // after twisting back
        let back = dehn_twist(&tw, "b2", -1, &Targets::Named(["a2".into()].into())).unwrap();
        assert!(triple_is_destab(&back, "a2", "b2", "g2").unwrap());
        let rep = destabilize(&back, "a2", "b2", "g2").unwrap();
        assert_eq!(rep.arr.genus, 1);
    }

    #[test]
    fn algebraic_matches_pairing_after_twist() {
        let mut arr = torus();
        vertical(&mut arr, "c", rat(1, 2));
        horizontal(&mut arr, "d", rat(1, 2));
        let out = dehn_twist(&arr, "c", 2, &Targets::All).unwrap();
        let a = algebraic_int(&out, "c", "d").unwrap();
        let p = out.pair_classes(
            &out.homology_class("c").unwrap(),
            &out.homology_class("d").unwrap(),
        );
        assert_eq!(a, p);
    }
}
