//! Minimal position: empty-bigon removal against other curves and against the
//! spine, plus strand pushes across the base vertex. Every accepted move
//! strictly decreases (crossings, tokens) lexicographically, so reduction
//! terminates; moves never touch a region containing a basepoint, so all
//! isotopies are rel basepoints.

use crate::curves::{Arrangement, ArrError, DartKind, PathId, Realization, Token};
#[allow(unused_imports)]
use num_traits::Signed;
use crate::geom::Rat;
use crate::surface::OwnerKey;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Clone, Copy, PartialEq, Eq)]
struct Metric {
    crossings: usize,
    tokens: usize,
}

impl Metric {
    fn of(arr: &Arrangement, r: &Realization) -> Metric {
        Metric {
            crossings: r.total_crossings(),
            tokens: arr.total_tokens(),
        }
    }

    fn better_than(&self, other: &Metric) -> bool {
        (self.crossings, self.tokens) < (other.crossings, other.tokens)
    }
}

/// Reduce the whole arrangement to minimal position by removing empty bigons.
/// Basepoint-marked regions are never collapsed.
pub fn reduce_minimal(arr: &Arrangement) -> Result<Arrangement, ArrError> {
    let mut cur = arr.clone();
    if cur.genus == 0 {
        return Ok(cur);
    }
    let mut r = cur.realize()?;
    let mut fuel = 4 * (r.total_crossings() + cur.total_tokens()) + 64;
    loop {
        if fuel == 0 {
            break;
        }
        fuel -= 1;
        match step(&cur, &r)? {
            Some((next, nr)) => {
                cur = next;
                r = nr;
            }
            None => break,
        }
    }
    Ok(cur)
}

/// Try every candidate move in deterministic order; return the first one that
/// strictly improves the metric.
fn step(arr: &Arrangement, r: &Realization) -> Result<Option<(Arrangement, Realization)>, ArrError> {
    let m0 = Metric::of(arr, r);
    let classes_ok = |next: &Arrangement| -> bool {
        arr.curves.keys().all(|n| {
            next.homology_class(n).ok() == arr.homology_class(n).ok()
        })
    };
    // 1. curve-curve empty bigons (these reduce crossings)
    for cand in bigon_candidates(arr, r) {
        if flood_bigon(r, cand.a, cand.b, cand.x, cand.y).is_none() {
            continue;
        }
        for flip in [false, true] {
            if let Some(next) = apply_bigon(arr, r, &cand, flip) {
                if !classes_ok(&next) {
                    continue;
                }
                if let Ok(nr) = next.realize() {
                    if Metric::of(&next, &nr).better_than(&m0) {
                        if std::env::var("TRICALC_DEBUG").is_ok() {
                            eprintln!("  move: bigon {} vs {} (crossings {} -> {})",
                                r.path_name(cand.a), r.path_name(cand.b),
                                m0.crossings, nr.total_crossings());
                        }
                        return Ok(Some((next, nr)));
                    }
                }
            }
        }
    }
    // 2. curve-spine pockets
    for cand in pocket_candidates(arr, r) {
        let next = apply_pocket(arr, &cand);
        if !classes_ok(&next) {
            continue;
        }
        if let Ok(nr) = next.realize() {
            if Metric::of(&next, &nr).better_than(&m0) {
                if std::env::var("TRICALC_DEBUG").is_ok() {
                    let w = path_word(arr, r, cand.path);
                    let n = w.len();
                    let t1 = &w[cand.idx];
                    let t2 = &w[(cand.idx + 1) % n];
                    eprintln!("  move: pocket on {} pair ({},x{}@{})({},x{}@{}) (tokens {} -> {})",
                        r.path_name(cand.path),
                        t1.sign, t1.loop_id + 1, t1.height,
                        t2.sign, t2.loop_id + 1, t2.height,
                        m0.tokens, next.total_tokens());
                }
                return Ok(Some((next, nr)));
            }
        }
    }
    // 3. fan pushes across the base vertex
    for cand in fan_candidates(arr, r) {
        if let Some(next) = apply_fan(arr, &cand) {
            if !classes_ok(&next) {
                continue;
            }
            if let Ok(nr) = next.realize() {
                if Metric::of(&next, &nr).better_than(&m0) {
                    if std::env::var("TRICALC_DEBUG").is_ok() {
                        eprintln!("  move: fan on {} ({} tokens)",
                            r.path_name(cand.path), cand.len);
                    }
                    return Ok(Some((next, nr)));
                }
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// curve-spine pockets
// ---------------------------------------------------------------------------

struct Pocket {
    path: PathId,
    /// indices of the two cancelling tokens (i, i+1 cyclically)
    idx: usize,
}

fn path_word<'a>(arr: &'a Arrangement, r: &Realization, id: PathId) -> &'a [Token] {
    match id {
        PathId::Curve(i) => &arr.curves[&r.curve_names[i]].word,
        PathId::Arc(i) => &arr.arcs[&r.arc_names[i]].word,
    }
}

fn all_paths(r: &Realization) -> Vec<PathId> {
    let mut v: Vec<PathId> = (0..r.curve_names.len()).map(PathId::Curve).collect();
    v.extend((0..r.arc_names.len()).map(PathId::Arc));
    v
}

/// Is the open boundary arc (u1, u2) free of strand endpoints and basepoints?
fn arc_clear(r: &Realization, u1: &Rat, u2: &Rat) -> bool {
    let (lo, hi) = if u1 < u2 { (u1, u2) } else { (u2, u1) };
    for (u, _, _, _) in &r.boundary_order {
        if u > lo && u < hi {
            return false;
        }
    }
    for u in r.base_positions.values() {
        if u > lo && u < hi {
            return false;
        }
    }
    true
}

fn chord_has_crossings(r: &Realization, id: PathId, chord: usize) -> bool {
    r.crossings
        .iter()
        .any(|c| (c.a == id && c.a_chord == chord) || (c.b == id && c.b_chord == chord))
        || r.anchors
            .iter()
            .any(|ends| ends.iter().any(|(h, hc, _)| *h == id && *hc == chord))
}

fn pocket_candidates(arr: &Arrangement, r: &Realization) -> Vec<Pocket> {
    let mut out = Vec::new();
    for id in all_paths(r) {
        let word = path_word(arr, r, id);
        let n = word.len();
        if n < 3 && matches!(id, PathId::Curve(_)) {
            // a 2-token curve may be a deliberately trivial loop; removing its
            // last tokens would orphan it
            if n <= 2 {
                continue;
            }
        }
        let cyclic = matches!(id, PathId::Curve(_));
        let last = if cyclic { n } else { n.saturating_sub(1) };
        for i in 0..last {
            let j = (i + 1) % n;
            let (t1, t2) = (&word[i], &word[j]);
            if t1.loop_id != t2.loop_id || t1.sign == t2.sign {
                continue;
            }
            // entry(t1) and exit(t2) lie on the same side occurrence; the
            // chord after token i connects them
            let entry_primary = t1.sign < 0;
            let u1 = arr.boundary_u(t1.loop_id, &t1.height, entry_primary);
            let u2 = arr.boundary_u(t2.loop_id, &t2.height, entry_primary);
            if !arc_clear(r, &u1, &u2) {
                continue;
            }
            if chord_has_crossings(r, id, i) {
                continue;
            }
            out.push(Pocket { path: id, idx: i });
        }
    }
    out
}

fn apply_pocket(arr: &Arrangement, p: &Pocket) -> Arrangement {
    let mut next = arr.clone();
    let r = arr.realize().unwrap();
    match p.path {
        PathId::Curve(i) => {
            let name = &r.curve_names[i];
            let w = &mut next.curves.get_mut(name).unwrap().word;
            let n = w.len();
            let j = (p.idx + 1) % n;
            let mut keep: Vec<Token> = Vec::new();
            for (k, t) in w.iter().enumerate() {
                if k != p.idx && k != j {
                    keep.push(t.clone());
                }
            }
            *w = keep;
        }
        PathId::Arc(i) => {
            let name = &r.arc_names[i];
            let w = &mut next.arcs.get_mut(name).unwrap().word;
            let j = p.idx + 1;
            let mut keep: Vec<Token> = Vec::new();
            for (k, t) in w.iter().enumerate() {
                if k != p.idx && k != j {
                    keep.push(t.clone());
                }
            }
            *w = keep;
        }
    }
    next
}

// ---------------------------------------------------------------------------
// fans across the base vertex
// ---------------------------------------------------------------------------

struct Fan {
    path: PathId,
    start: usize,
    len: usize,
    ccw: bool,
}

/// side occurrence of a boundary parameter
fn side_of(arr: &Arrangement, u: &Rat) -> usize {
    let g4 = Rat::from_integer((4 * arr.genus as i64).into());
    let scaled = u * &g4;
    let fl = scaled.floor();
    let s: i64 = fl.to_integer().try_into().unwrap_or(0);
    (s as usize).min(4 * arr.genus - 1)
}

/// Is `u` extreme on its side towards the given corner (no other boundary
/// point or basepoint strictly between u and the corner)?
fn extreme_towards(arr: &Arrangement, r: &Realization, u: &Rat, towards_next_corner: bool) -> bool {
    let s = side_of(arr, u);
    let g4 = Rat::from_integer((4 * arr.genus as i64).into());
    let corner = if towards_next_corner {
        Rat::from_integer(((s + 1) as i64).into()) / &g4
    } else {
        Rat::from_integer((s as i64).into()) / &g4
    };
    let (lo, hi) = if *u < corner {
        (u.clone(), corner)
    } else {
        (corner, u.clone())
    };
    for (x, _, _, _) in &r.boundary_order {
        if *x > lo && *x < hi {
            return false;
        }
    }
    for x in r.base_positions.values() {
        if *x > lo && *x < hi {
            return false;
        }
    }
    true
}

/// Consecutive tokens hugging a corner: entry(t_i) extreme toward a corner,
/// exit(t_{i+1}) extreme on the adjacent side across the same corner, chord
/// crossing-free.
fn corner_adjacent(
    arr: &Arrangement,
    r: &Realization,
    id: PathId,
    i: usize,
    word: &[Token],
) -> Option<bool> {
    let n = word.len();
    let j = (i + 1) % n;
    let t1 = &word[i];
    let t2 = &word[j];
    let u1 = arr.boundary_u(t1.loop_id, &t1.height, t1.sign < 0); // entry of t1
    let u2 = arr.boundary_u(t2.loop_id, &t2.height, t2.sign > 0); // exit of t2
    let s1 = side_of(arr, &u1);
    let s2 = side_of(arr, &u2);
    let nside = 4 * arr.genus;
    if chord_has_crossings(r, id, i) {
        return None;
    }
    if (s1 + 1) % nside == s2 {
        if extreme_towards(arr, r, &u1, true) && extreme_towards(arr, r, &u2, false) {
            return Some(true); // ccw around the corner between s1 and s2
        }
    }
    if (s2 + 1) % nside == s1 {
        if extreme_towards(arr, r, &u1, false) && extreme_towards(arr, r, &u2, true) {
            return Some(false);
        }
    }
    None
}

fn fan_candidates(arr: &Arrangement, r: &Realization) -> Vec<Fan> {
    let mut out = Vec::new();
    for id in all_paths(r) {
        if matches!(id, PathId::Arc(_)) {
            continue; // arcs rarely need fan moves; keep them anchored
        }
        let word = path_word(arr, r, id);
        let n = word.len();
        if n < 2 {
            continue;
        }
        let adj: Vec<Option<bool>> = (0..n)
            .map(|i| corner_adjacent(arr, r, id, i, word))
            .collect();
        // every fan token must cross its loop right next to the base vertex
        // on both sides, so the swept disk contains nothing but v0
        let near_v0 = |t: &Token| -> bool {
            let ue = arr.boundary_u(t.loop_id, &t.height, t.sign < 0);
            let ux = arr.boundary_u(t.loop_id, &t.height, t.sign > 0);
            (extreme_towards(arr, r, &ue, true) || extreme_towards(arr, r, &ue, false))
                && (extreme_towards(arr, r, &ux, true) || extreme_towards(arr, r, &ux, false))
        };
        for dir in [true, false] {
            let hops: Vec<bool> = adj.iter().map(|a| *a == Some(dir)).collect();
            if hops.iter().all(|&h| h) {
                continue; // closed loop around v0; leave as is
            }
            // maximal runs of consecutive hops
            let mut i = 0;
            while i < n {
                if hops[i] && !hops[(i + n - 1) % n] {
                    let mut len = 1;
                    while hops[(i + len) % n] {
                        len += 1;
                    }
                    // run spans tokens i .. i+len (len hops, len+1 tokens);
                    // it must be a proper sub-path so the isotopy is anchored
                    // outside the swept disk
                    let all_near = (0..=len).all(|k| near_v0(&word[(i + k) % n]));
                    if len + 1 > 2 * arr.genus && len + 1 < n && all_near {
                        out.push(Fan {
                            path: id,
                            start: i,
                            len: len + 1,
                            ccw: dir,
                        });
                    }
                    i += len;
                } else {
                    i += 1;
                }
            }
        }
    }
    out
}

fn apply_fan(arr: &Arrangement, f: &Fan) -> Option<Arrangement> {
    let r = arr.realize().ok()?;
    let word = path_word(arr, &r, f.path).to_vec();
    let n = word.len();
    let nside = 4 * arr.genus;
    // the corner-walk germ cycle: side occurrence exited at each position
    let side_loop = |s: usize| -> (usize, bool) {
        let i = s / 4;
        match s % 4 {
            0 => (2 * i, true),
            1 => (2 * i + 1, true),
            2 => (2 * i, false),
            _ => (2 * i + 1, false),
        }
    };
    let partner = |s: usize| -> usize {
        let (l, p) = side_loop(s);
        let i = l / 2;
        match (l % 2, p) {
            (0, true) => 4 * i + 2,
            (0, false) => 4 * i,
            (1, true) => 4 * i + 3,
            _ => 4 * i + 1,
        }
    };
    let mut cyc = vec![0usize];
    loop {
        let c = *cyc.last().unwrap();
        let nxt = (partner(c) + 1) % nside;
        if nxt == 0 {
            break;
        }
        cyc.push(nxt);
    }
    debug_assert_eq!(cyc.len(), nside);
    // exit sides of the run tokens must be consecutive in cyc (forward for
    // ccw runs, backward for cw runs)
    let exit_side = |t: &Token| -> usize {
        let u = arr.boundary_u(t.loop_id, &t.height, t.sign > 0);
        side_of(arr, &u)
    };
    let run_sides: Vec<usize> = (0..f.len)
        .map(|k| exit_side(&word[(f.start + k) % n]))
        .collect();
    let pos0 = cyc.iter().position(|&c| c == run_sides[0])?;
    for (k, s) in run_sides.iter().enumerate() {
        let expect = if f.ccw {
            cyc[(pos0 + k) % nside]
        } else {
            cyc[(pos0 + nside - k) % nside]
        };
        if *s != expect {
            return None;
        }
    }
    // complementary germ arc, traversed the other way round v0
    let mut comp: Vec<usize> = Vec::new();
    for k in 1..(nside - f.len) + 1 {
        let idx = if f.ccw {
            (pos0 + nside - k) % nside
        } else {
            (pos0 + k) % nside
        };
        comp.push(cyc[idx]);
    }
    // build replacement tokens: crossing germ of side c in the opposite sweep
    // direction exits through partner(c), near the v0 end of the germ
    let mut next = arr.clone();
    let mut repl: Vec<Token> = Vec::new();
    for &c in &comp {
        let (l, c_primary) = side_loop(c);
        let sign = if c_primary { -1 } else { 1 };
        // germ end: start of the loop if c is primary, end if inverse
        let near_zero = c_primary;
        let h = if near_zero {
            next.fresh_heights(l, &Rat::zero(), true, 1)[0].clone()
        } else {
            next.fresh_heights(l, &Rat::one(), false, 1)[0].clone()
        };
        let tok = Token::new(sign, l, h);
        // record the height immediately so later picks stay distinct
        reserve_height(&mut next, &tok);
        repl.push(tok);
    }
    // splice: replace tokens f.start..f.start+f.len (cyclic) by repl
    let name = match f.path {
        PathId::Curve(i) => r.curve_names[i].clone(),
        PathId::Arc(_) => return None,
    };
    let mut new_word: Vec<Token> = Vec::new();
    for k in 0..n {
        let idx = (f.start + f.len + k) % n;
        if k < n - f.len {
            new_word.push(word[idx].clone());
        }
    }
    new_word.extend(repl);
    remove_reserved(&mut next);
    next.curves.get_mut(&name).unwrap().word = new_word;
    Some(next)
}

/// Temporarily park a token on a scratch path so later fresh-height queries
/// see it. Call `unreserve` once the real words are written.
pub fn reserve(arr: &mut Arrangement, tok: &Token) {
    arr.curves
        .entry("__reserved".to_string())
        .or_insert_with(|| crate::curves::Curve {
            family: crate::curves::Family::Aux,
            word: Vec::new(),
        })
        .word
        .push(tok.clone());
}

pub fn unreserve(arr: &mut Arrangement) {
    arr.curves.remove("__reserved");
}

fn reserve_height(arr: &mut Arrangement, tok: &Token) {
    reserve(arr, tok);
}

fn remove_reserved(arr: &mut Arrangement) {
    unreserve(arr);
}

// ---------------------------------------------------------------------------
// curve-curve bigons
// ---------------------------------------------------------------------------

struct BigonCand {
    a: PathId,
    b: PathId,
    /// crossing indices (into realization.crossings) at the two corners
    x: usize,
    y: usize,
    /// token range along a to replace: indices (exclusive of corners)
    a_run: Vec<usize>,
    /// tokens of b to copy (in a-traversal direction), with signs adjusted
    b_run: Vec<Token>,
}

/// position of crossing k along path `id`: (chord, t)
fn pos_along(r: &Realization, k: usize, id: PathId) -> (usize, Rat) {
    let c = &r.crossings[k];
    if c.a == id {
        (c.a_chord, c.a_t.clone())
    } else {
        debug_assert!(c.b == id);
        (c.b_chord, c.b_t.clone())
    }
}

/// all crossings involving path id, sorted along the path
fn crossings_along(r: &Realization, id: PathId) -> Vec<usize> {
    let mut v: Vec<usize> = (0..r.crossings.len())
        .filter(|&k| r.crossings[k].a == id || r.crossings[k].b == id)
        .collect();
    v.sort_by(|&p, &q| {
        let (cp, tp) = pos_along(r, p, id);
        let (cq, tq) = pos_along(r, q, id);
        (cp, tp).cmp(&(cq, tq))
    });
    v
}

fn other_path(r: &Realization, k: usize, id: PathId) -> PathId {
    let c = &r.crossings[k];
    if c.a == id {
        c.b
    } else {
        c.a
    }
}

fn bigon_candidates(arr: &Arrangement, r: &Realization) -> Vec<BigonCand> {
    let mut out = Vec::new();
    for a in all_paths(r) {
        let a_cross = crossings_along(r, a);
        let na = a_cross.len();
        if na < 2 {
            continue;
        }
        let a_word = path_word(arr, r, a);
        let cyclic = matches!(a, PathId::Curve(_));
        let pairs = if cyclic { na } else { na - 1 };
        for i in 0..pairs {
            let x = a_cross[i];
            let y = a_cross[(i + 1) % na];
            if x == y {
                continue;
            }
            let b = other_path(r, x, a);
            if other_path(r, y, a) != b || b == a {
                continue;
            }
            // x, y must also be adjacent along b
            let b_cross = crossings_along(r, b);
            let nb = b_cross.len();
            let bx = b_cross.iter().position(|&k| k == x).unwrap();
            let by = b_cross.iter().position(|&k| k == y).unwrap();
            let b_cyclic = matches!(b, PathId::Curve(_));
            let fwd_adj = (bx + 1) % nb == by && (b_cyclic || bx + 1 < nb);
            let bwd_adj = (by + 1) % nb == bx && (b_cyclic || by + 1 < nb);
            if !fwd_adj && !bwd_adj {
                continue;
            }
            // token runs, collected positionally: token k sits at the start
            // of chord k, so it lies in a run iff (k, 0) is strictly between
            // the two crossing positions in the traversal direction
            let tok_between = |k: usize, f: (usize, &Rat), t: (usize, &Rat)| -> bool {
                let p = (k, Rat::zero());
                let fk = (f.0, f.1.clone());
                let tk = (t.0, t.1.clone());
                if fk < tk {
                    p > fk && p < tk
                } else {
                    p > fk || p < tk
                }
            };
            let (cxa, txa) = pos_along(r, x, a);
            let (cya, tya) = pos_along(r, y, a);
            let nw = a_word.len();
            let mut a_run = Vec::new();
            for j in 1..=nw {
                let k = (cxa + j) % nw;
                if !cyclic && cxa + j >= nw {
                    break;
                }
                if tok_between(k, (cxa, &txa), (cya, &tya)) {
                    a_run.push(k);
                } else {
                    break;
                }
            }
            let b_word = path_word(arr, r, b);
            let nbw = b_word.len();
            let (cxb, txb) = pos_along(r, x, b);
            let (cyb, tyb) = pos_along(r, y, b);
            for b_fwd in [true, false] {
                if b_fwd && !fwd_adj {
                    continue;
                }
                if !b_fwd && !bwd_adj {
                    continue;
                }
                let mut b_run: Vec<Token> = Vec::new();
                if b_fwd {
                    for j in 1..=nbw {
                        let k = (cxb + j) % nbw;
                        if !b_cyclic && cxb + j >= nbw {
                            break;
                        }
                        if tok_between(k, (cxb, &txb), (cyb, &tyb)) {
                            b_run.push(b_word[k].clone());
                        } else {
                            break;
                        }
                    }
                } else {
                    let mut tmp = Vec::new();
                    for j in 1..=nbw {
                        let k = (cyb + j) % nbw;
                        if !b_cyclic && cyb + j >= nbw {
                            break;
                        }
                        if tok_between(k, (cyb, &tyb), (cxb, &txb)) {
                            tmp.push(b_word[k].clone());
                        } else {
                            break;
                        }
                    }
                    tmp.reverse();
                    for t in tmp {
                        b_run.push(Token::new(-t.sign, t.loop_id, t.height.clone()));
                    }
                }
                out.push(BigonCand {
                    a,
                    b,
                    x,
                    y,
                    a_run: a_run.clone(),
                    b_run,
                });
            }
        }
    }
    out
}

/// Position of a path dart along its path: (chord, midpoint param of segment).
fn dart_position(r: &Realization, d: usize) -> Option<(PathId, usize, Rat)> {
    if let DartKind::Path { id, chord, seg, .. } = &r.dart_kind[d] {
        // param bounds of the segment: events on the chord sorted
        let mut evs: Vec<Rat> = Vec::new();
        for c in &r.crossings {
            if c.a == *id && c.a_chord == *chord {
                evs.push(c.a_t.clone());
            }
            if c.b == *id && c.b_chord == *chord {
                evs.push(c.b_t.clone());
            }
        }
        for ends in &r.anchors {
            for (h, hc, pos) in ends.iter() {
                if h == id && hc == chord {
                    evs.push(pos.clone());
                }
            }
        }
        evs.sort();
        let lo = if *seg == 0 {
            Rat::zero()
        } else {
            evs[*seg - 1].clone()
        };
        let hi = if *seg < evs.len() {
            evs[*seg].clone()
        } else {
            Rat::one()
        };
        Some((*id, *chord, (lo + hi) / Rat::from_integer(2.into())))
    } else {
        None
    }
}

/// Is position (chord, t) strictly inside the run from (cx, tx) to (cy, ty)
/// going forward along a path with `n_chords` chords (cyclic if `cyclic`)?
fn in_run(
    pos: (usize, &Rat),
    from: (usize, &Rat),
    to: (usize, &Rat),
    n_chords: usize,
    cyclic: bool,
) -> bool {
    // linearize: steps from `from`
    let key = |c: usize, t: &Rat| (c, t.clone());
    let p = key(pos.0, pos.1);
    let f = key(from.0, from.1);
    let t = key(to.0, to.1);
    if !cyclic {
        if f <= t {
            return f <= p && p <= t;
        }
        return t <= p && p <= f;
    }
    let _ = n_chords;
    if f <= t {
        f <= p && p <= t
    } else {
        p >= f || p <= t
    }
}

/// Flood the faces between the corner at x towards y; succeed if the region is
/// an unmarked disk whose walls are only segments of a and b between the two
/// crossings.
fn flood_bigon(r: &Realization, a: PathId, b: PathId, x: usize, y: usize) -> Option<()> {
    let map = &r.map;
    let vx = r.crossing_vertex[x];
    let vy = r.crossing_vertex[y];
    // start faces: all sectors at vx (the right one is adjacent to both a and
    // b germs towards y; flooding from all four sectors and insisting the
    // walls stay within the two runs rejects wrong sectors quickly, so try
    // each sector separately)
    let darts_at = |v: usize| -> Vec<usize> {
        (0..map.pairing.len())
            .filter(|&d| map.vertex_of[d] == v)
            .collect()
    };
    'sector: for &d0 in darts_at(vx).iter() {
        let f0 = map.face_of[map.rotation[d0]];
        // BFS over faces crossing only spine edges
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(f0);
        queue.push_back(f0);
        let mut walls: BTreeSet<usize> = BTreeSet::new(); // wall darts
        let mut ok = true;
        while let Some(f) = queue.pop_front() {
            if map.face_marks.contains_key(&f) {
                ok = false;
                break;
            }
            if seen.len() > map.faces.len() {
                ok = false;
                break;
            }
            for &d in &map.faces[f] {
                let owner = &map.owner[d];
                let key = owner.owner_key();
                let is_spine = matches!(key, OwnerKey::Spine(_));
                if is_spine {
                    let f2 = map.face_of[map.pairing[d]];
                    if seen.insert(f2) {
                        queue.push_back(f2);
                    }
                } else {
                    walls.insert(d);
                }
            }
        }
        if !ok {
            continue 'sector;
        }
        // walls must belong to a or b only, within the runs between x and y,
        // and the region must touch vy
        let mut touches_y = false;
        let (cxa, txa) = pos_along(r, x, a);
        let (cya, tya) = pos_along(r, y, a);
        let (cxb, txb) = pos_along(r, x, b);
        let (cyb, tyb) = pos_along(r, y, b);
        for &d in &walls {
            let key = map.owner[d].owner_key();
            let owner_path = match &key {
                OwnerKey::Curve(n) => r.curve_id(n),
                OwnerKey::Arc(n) => r
                    .arc_names
                    .iter()
                    .position(|an| an == n)
                    .map(PathId::Arc),
                OwnerKey::Spine(_) => None,
            };
            let p = match owner_path {
                Some(p) if p == a || p == b => p,
                _ => {
                    continue 'sector;
                }
            };
            let Some((_, chord, mid)) = dart_position(r, d) else {
                continue 'sector;
            };
            let cyclic = matches!(p, PathId::Curve(_));
            let ok = if p == a {
                in_run((chord, &mid), (cxa, &txa), (cya, &tya), 0, cyclic)
            } else {
                in_run((chord, &mid), (cxb, &txb), (cyb, &tyb), 0, cyclic)
                    || in_run((chord, &mid), (cyb, &tyb), (cxb, &txb), 0, cyclic)
            };
            if !ok {
                continue 'sector;
            }
            if map.vertex_of[d] == vy || map.vertex_of[map.pairing[d]] == vy {
                touches_y = true;
            }
        }
        if !touches_y {
            continue 'sector;
        }
        // region must avoid the far sectors: the crossings x and y are its
        // only corners, i.e. each of a, b contributes one run; verify the
        // region is a disk by the cut Euler characteristic
        let chi = region_chi(map, &seen);
        if chi != 1 {
            continue 'sector;
        }
        // verify no other crossing vertices of a or b strictly inside: walls
        // already exclude other owners; a vertex of a third curve inside the
        // region would show up as a wall. Crossings of a with b other than
        // x,y appearing on the wall boundary mean the runs weren't innermost.
        let mut corner_vertices: BTreeSet<usize> = BTreeSet::new();
        for &d in &walls {
            for v in [map.vertex_of[d], map.vertex_of[map.pairing[d]]] {
                if r.crossing_vertex.contains(&v) {
                    corner_vertices.insert(v);
                }
            }
        }
        corner_vertices.remove(&vx);
        corner_vertices.remove(&vy);
        if !corner_vertices.is_empty() {
            continue 'sector;
        }
        if std::env::var("TRICALC_DEBUG").is_ok() {
            let mut slots: Vec<String> = Vec::new();
            for d in 0..map.pairing.len() {
                if let DartKind::Spine { loop_id, lo, hi, up } = &r.dart_kind[d] {
                    if *up {
                        if seen.contains(&map.face_of[d]) {
                            slots.push(format!("x{}@({}..{}) primary", loop_id + 1, lo, hi));
                        }
                        if seen.contains(&map.face_of[map.pairing[d]]) {
                            slots.push(format!("x{}@({}..{}) inverse", loop_id + 1, lo, hi));
                        }
                    }
                }
            }
            eprintln!(
                "  bigon {}x{} region slots: {:?}",
                r.path_name(a),
                r.path_name(b),
                slots
            );
        }
        return Some(());
    }
    None
}

/// Euler characteristic of the cut piece formed by a set of faces glued along
/// the edges interior to the set.
fn region_chi(map: &crate::surface::CombinatorialMap, faces: &BTreeSet<usize>) -> i64 {
    let n = map.pairing.len();
    let in_region = |d: usize| faces.contains(&map.face_of[d]);
    let interior = |d: usize| {
        in_region(d)
            && in_region(map.pairing[d])
            && matches!(map.owner[d].owner_key(), OwnerKey::Spine(_))
    };
    let mut inv_rot = vec![0usize; n];
    for d in 0..n {
        inv_rot[map.rotation[d]] = d;
    }
    let mut e_interior = 0usize;
    let mut boundary_darts = 0usize;
    for d in 0..n {
        if in_region(d) {
            if interior(d) {
                if d < map.pairing[d] {
                    e_interior += 1;
                }
            } else {
                boundary_darts += 1;
            }
        }
    }
    let mut sector_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for d in 0..n {
        if in_region(map.rotation[d]) {
            let next = sector_ids.len();
            sector_ids.entry(d).or_insert(next);
        }
    }
    let mut uf = crate::surface::UnionFind::new(sector_ids.len());
    for x in 0..n {
        if interior(x) {
            if let (Some(&s1), Some(&s2)) = (sector_ids.get(&x), sector_ids.get(&inv_rot[x])) {
                uf.union(s1, s2);
            }
        }
    }
    let mut roots = BTreeSet::new();
    for i in 0..sector_ids.len() {
        roots.insert(uf.find(i));
    }
    roots.len() as i64 - (e_interior + boundary_darts) as i64 + faces.len() as i64
}

fn apply_bigon(
    arr: &Arrangement,
    r: &Realization,
    cand: &BigonCand,
    far_side_below: bool,
) -> Option<Arrangement> {
    let name = match cand.a {
        PathId::Curve(i) => r.curve_names[i].clone(),
        PathId::Arc(i) => r.arc_names[i].clone(),
    };
    let mut next = arr.clone();
    // fresh heights for the copied run, nudged to one side of b's heights
    let mut repl: Vec<Token> = Vec::new();
    for t in &cand.b_run {
        let h = if far_side_below {
            next.fresh_heights(t.loop_id, &t.height, false, 1)[0].clone()
        } else {
            next.fresh_heights(t.loop_id, &t.height, true, 1)[0].clone()
        };
        let tok = Token::new(t.sign, t.loop_id, h);
        reserve_height(&mut next, &tok);
        repl.push(tok);
    }
    remove_reserved(&mut next);
    let word: Vec<Token> = match cand.a {
        PathId::Curve(_) => next.curves[&name].word.clone(),
        PathId::Arc(_) => next.arcs[&name].word.clone(),
    };
    let n = word.len();
    let keep: Vec<Token> = (0..n)
        .filter(|k| !cand.a_run.contains(k))
        .map(|k| word[k].clone())
        .collect();
    // rebuild in traversal order: tokens after the removed run keep their
    // cyclic order; splice repl where the run was
    let mut new_word: Vec<Token> = Vec::new();
    if cand.a_run.is_empty() {
        // run had no tokens: insert repl right after the chord of x — both
        // crossings were on neighbouring chords of a common token boundary;
        // with no tokens removed the replacement is empty too
        if repl.is_empty() {
            new_word = word;
        } else {
            // place repl after the chord carrying crossing x
            let (cx, _) = pos_along(r, cand.x, cand.a);
            for (k, t) in word.iter().enumerate() {
                new_word.push(t.clone());
                if k == cx {
                    new_word.extend(repl.iter().cloned());
                }
            }
        }
    } else {
        // walk from the first kept index after the run
        let first = cand.a_run.last().copied().unwrap();
        let mut k = (first + 1) % n;
        let mut order: Vec<usize> = Vec::new();
        while order.len() < keep.len() {
            if !cand.a_run.contains(&k) {
                order.push(k);
            }
            k = (k + 1) % n;
        }
        for k in order {
            new_word.push(word[k].clone());
        }
        new_word.extend(repl.iter().cloned());
    }
    if new_word.is_empty() {
        return None;
    }
    match cand.a {
        PathId::Curve(_) => next.curves.get_mut(&name).unwrap().word = new_word,
        PathId::Arc(_) => next.arcs.get_mut(&name).unwrap().word = new_word,
    }
    Some(next)
}

// ---------------------------------------------------------------------------
// pairwise queries built on restricted reductions
// ---------------------------------------------------------------------------

/// Geometric intersection number: reduce the two curves against each other
/// (other curves are transparent; basepoints still block) and count.
pub fn geometric_int(arr: &Arrangement, c: &str, d: &str) -> Result<usize, ArrError> {
    arr.curve(c)?;
    arr.curve(d)?;
    assert_ne!(c, d, "geometric_int needs two distinct curves");
    let sub = arr.restricted_to(&[c.to_string(), d.to_string()].into());
    let red = reduce_minimal(&sub)?;
    let r = red.realize()?;
    Ok(r.count_crossings(r.curve_id(c).unwrap(), r.curve_id(d).unwrap()))
}

/// Signed intersection number (isotopy invariant; no reduction needed).
pub fn algebraic_int(arr: &Arrangement, c: &str, d: &str) -> Result<i64, ArrError> {
    arr.curve(c)?;
    arr.curve(d)?;
    let r = arr.realize()?;
    Ok(r.signed_crossings(r.curve_id(c).unwrap(), r.curve_id(d).unwrap()))
}

/// True iff the two curves cobound an unmarked annulus (parallel rel
/// basepoints).
pub fn is_parallel(arr: &Arrangement, c: &str, d: &str) -> Result<bool, ArrError> {
    arr.curve(c)?;
    arr.curve(d)?;
    if c == d {
        return Ok(true);
    }
    let sub = arr.restricted_to(&[c.to_string(), d.to_string()].into());
    let red = reduce_minimal(&sub)?;
    let r = red.realize()?;
    if r.count_crossings(r.curve_id(c).unwrap(), r.curve_id(d).unwrap()) != 0 {
        return Ok(false);
    }
    let keep: BTreeSet<OwnerKey> = [
        OwnerKey::Curve(c.to_string()),
        OwnerKey::Curve(d.to_string()),
    ]
    .into();
    let comps = r.map.components_after_deleting(&keep);
    for comp in comps {
        if comp.chi == 0 && comp.boundary.len() == 2 && comp.marks.is_empty() {
            let owners: Vec<&BTreeSet<OwnerKey>> = comp.boundary.iter().collect();
            let oc = OwnerKey::Curve(c.to_string());
            let od = OwnerKey::Curve(d.to_string());
            let one_each = (owners[0] == &BTreeSet::from([oc.clone()])
                && owners[1] == &BTreeSet::from([od.clone()]))
                || (owners[0] == &BTreeSet::from([od]) && owners[1] == &BTreeSet::from([oc]));
            if one_each {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// True iff the curve bounds an unmarked disk.
pub fn is_trivial(arr: &Arrangement, c: &str) -> Result<bool, ArrError> {
    arr.curve(c)?;
    let sub = arr.restricted_to(&[c.to_string()].into());
    let red = reduce_minimal(&sub)?;
    let r = red.realize()?;
    let keep: BTreeSet<OwnerKey> = [OwnerKey::Curve(c.to_string())].into();
    let comps = r.map.components_after_deleting(&keep);
    for comp in comps {
        if comp.chi == 1 && comp.boundary.len() == 1 && comp.marks.is_empty() {
            if comp.boundary[0] == BTreeSet::from([OwnerKey::Curve(c.to_string())]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{Basepoint, Family, Occ};
    use crate::geom::rat;

    fn torus() -> Arrangement {
        Arrangement::new(1)
    }

    #[test]
    fn pocket_removed() {
        let mut arr = torus();
        // horizontal curve with a finger poking across loop 0 and back
        arr.insert_curve(
            "d",
            Family::Aux,
            vec![
                Token::new(1, 1, rat(1, 2)),
                Token::new(1, 0, rat(2, 5)),
                Token::new(-1, 0, rat(3, 5)),
            ],
        )
        .unwrap();
        let red = reduce_minimal(&arr).unwrap();
        assert_eq!(red.curves["d"].word.len(), 1);
    }

    #[test]
    fn pocket_blocked_by_basepoint() {
        let finger = || {
            vec![
                Token::new(1, 1, rat(1, 2)),
                Token::new(1, 0, rat(2, 5)),
                Token::new(-1, 0, rat(3, 5)),
            ]
        };
        // pocket sits on the inverse side of loop 0; a basepoint there blocks
        let mut arr = torus();
        arr.insert_curve("d", Family::Aux, finger()).unwrap();
        arr.basepoints.insert(
            "z".into(),
            Basepoint {
                loop_id: 0,
                height: rat(1, 2),
                occ: Occ::Inverse,
            },
        );
        assert_eq!(reduce_minimal(&arr).unwrap().curves["d"].word.len(), 3);
        // on the primary side it does not block
        let mut arr2 = torus();
        arr2.insert_curve("d", Family::Aux, finger()).unwrap();
        arr2.basepoints.insert(
            "z".into(),
            Basepoint {
                loop_id: 0,
                height: rat(1, 2),
                occ: Occ::Primary,
            },
        );
        assert_eq!(reduce_minimal(&arr2).unwrap().curves["d"].word.len(), 1);
    }

    #[test]
    fn bigon_between_curves_removed() {
        let mut arr = torus();
        arr.insert_curve("c", Family::Aux, vec![Token::new(1, 0, rat(1, 2))])
            .unwrap();
        // small circle straddling c: two removable crossings
        arr.insert_curve(
            "d",
            Family::Aux,
            vec![Token::new(1, 0, rat(9, 20)), Token::new(-1, 0, rat(11, 20))],
        )
        .unwrap();
        let r = arr.realize().unwrap();
        let (ci, di) = (r.curve_id("c").unwrap(), r.curve_id("d").unwrap());
        assert_eq!(r.count_crossings(ci, di), 2);
        assert_eq!(geometric_int(&arr, "c", "d").unwrap(), 0);
    }

    #[test]
    fn bigons_blocked_by_two_basepoints() {
        // same straddling circle, but both lenses carry a basepoint: the two
        // crossings are essential rel basepoints
        let mut arr = torus();
        arr.insert_curve("c", Family::Aux, vec![Token::new(1, 0, rat(1, 2))])
            .unwrap();
        arr.insert_curve(
            "d",
            Family::Aux,
            vec![Token::new(1, 0, rat(9, 20)), Token::new(-1, 0, rat(11, 20))],
        )
        .unwrap();
        arr.basepoints.insert(
            "z".into(),
            Basepoint {
                loop_id: 0,
                height: rat(19, 40),
                occ: Occ::Primary,
            },
        );
        arr.basepoints.insert(
            "w".into(),
            Basepoint {
                loop_id: 0,
                height: rat(21, 40),
                occ: Occ::Inverse,
            },
        );
        assert_eq!(geometric_int(&arr, "c", "d").unwrap(), 2);
    }

    #[test]
    fn parallel_and_blocking() {
        let mut arr = torus();
        arr.insert_curve("c1", Family::Aux, vec![Token::new(1, 0, rat(1, 3))])
            .unwrap();
        arr.insert_curve("c2", Family::Aux, vec![Token::new(1, 0, rat(2, 3))])
            .unwrap();
        assert!(is_parallel(&arr, "c1", "c2").unwrap());
        // one basepoint blocks one of the two annuli: still parallel
        arr.basepoints.insert(
            "z".into(),
            Basepoint {
                loop_id: 1,
                height: rat(1, 2),
                occ: Occ::Primary,
            },
        );
        assert!(is_parallel(&arr, "c1", "c2").unwrap());
        // a second basepoint in the other annulus (between the two curves,
        // just off loop 0 at height 1/2) kills it
        arr.basepoints.insert(
            "w".into(),
            Basepoint {
                loop_id: 0,
                height: rat(1, 2),
                occ: Occ::Primary,
            },
        );
        assert!(!is_parallel(&arr, "c1", "c2").unwrap());
    }

    #[test]
    fn dual_pair_not_parallel() {
        let mut arr = torus();
        arr.insert_curve("c", Family::Aux, vec![Token::new(1, 0, rat(1, 2))])
            .unwrap();
        arr.insert_curve("d", Family::Aux, vec![Token::new(1, 1, rat(1, 2))])
            .unwrap();
        assert!(!is_parallel(&arr, "c", "d").unwrap());
        assert_eq!(geometric_int(&arr, "c", "d").unwrap(), 1);
    }

    #[test]
    fn trivial_loop_detected() {
        let mut arr = torus();
        arr.insert_curve(
            "t",
            Family::Aux,
            vec![Token::new(1, 0, rat(2, 5)), Token::new(-1, 0, rat(3, 5))],
        )
        .unwrap();
        assert!(is_trivial(&arr, "t").unwrap());
        let mut arr2 = torus();
        arr2.insert_curve("x", Family::Aux, vec![Token::new(1, 0, rat(1, 2))])
            .unwrap();
        assert!(!is_trivial(&arr2, "x").unwrap());
    }

    #[test]
    fn reduce_idempotent() {
        let mut arr = torus();
        arr.insert_curve("c", Family::Aux, vec![Token::new(1, 0, rat(1, 2))])
            .unwrap();
        arr.insert_curve("d", Family::Aux, vec![Token::new(1, 1, rat(1, 2))])
            .unwrap();
        let r1 = reduce_minimal(&arr).unwrap();
        let r2 = reduce_minimal(&r1).unwrap();
        assert_eq!(r1.total_tokens(), r2.total_tokens());
    }
}
