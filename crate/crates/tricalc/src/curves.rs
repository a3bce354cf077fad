//! Curve systems on a closed oriented surface, presented on the canonical
//! 4g-gon with boundary word a1 b1 a1' b1' a2 b2 a2' b2' ... and a single
//! vertex v0.
//!
//! A curve is stored as its cyclic word of spine crossings; each crossing
//! token records the loop, a rational height along the loop, and the crossing
//! direction. The drawing is recovered by placing the boundary points of the
//! cut polygon in strictly convex rational position and joining consecutive
//! crossings by straight chords, so every intersection question is decided
//! exactly.

use crate::geom::{angle_cmp, circle_point, rat, seg_at, seg_cross_params, Pt, Rat};
use crate::surface::{CombinatorialMap, EdgeOwner, MapError};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Alpha,
    Beta,
    Gamma,
    Aux,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Alpha => "alpha",
            Family::Beta => "beta",
            Family::Gamma => "gamma",
            Family::Aux => "aux",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "alpha" => Some(Family::Alpha),
            "beta" => Some(Family::Beta),
            "gamma" => Some(Family::Gamma),
            "aux" => Some(Family::Aux),
            _ => None,
        }
    }
}

/// One transverse crossing of a curve with a spine loop. `sign = +1` means the
/// strand leaves the polygon through the primary occurrence of the loop's side
/// and re-enters through the inverse occurrence; `-1` is the reverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub sign: i8,
    pub loop_id: usize,
    pub height: Rat,
}

impl Token {
    pub fn new(sign: i8, loop_id: usize, height: Rat) -> Self {
        assert!(sign == 1 || sign == -1);
        Token {
            sign,
            loop_id,
            height,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub family: Family,
    pub word: Vec<Token>,
}

/// Endpoint of an embedded arc: a point on the chord of `curve` that follows
/// token `chord` (0-based), at fraction `pos` of the way along that chord.
#[derive(Clone, Debug)]
pub struct Anchor {
    pub curve: String,
    pub chord: usize,
    pub pos: Rat,
}

#[derive(Clone, Debug)]
pub struct ArcPath {
    pub start: Anchor,
    pub end: Anchor,
    pub word: Vec<Token>,
}

/// Which side of a spine loop a basepoint sits on: the face adjacent to the
/// primary polygon occurrence of the side, or to the inverse occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occ {
    Primary,
    Inverse,
}

#[derive(Clone, Debug)]
pub struct Basepoint {
    pub loop_id: usize,
    pub height: Rat,
    pub occ: Occ,
}

#[derive(Clone, Debug, Default)]
pub struct Arrangement {
    pub genus: usize,
    pub curves: BTreeMap<String, Curve>,
    pub arcs: BTreeMap<String, ArcPath>,
    pub basepoints: BTreeMap<String, Basepoint>,
}

#[derive(Error, Debug)]
pub enum ArrError {
    #[error("curve name already in use: {0}")]
    NameTaken(String),
    #[error("unknown curve: {0}")]
    UnknownCurve(String),
    #[error("unknown arc: {0}")]
    UnknownArc(String),
    #[error("two crossings at the same height {height} on loop {loop_id}")]
    HeightClash { loop_id: usize, height: Rat },
    #[error("curve {0} has a self-crossing")]
    SelfCrossing(String),
    #[error("empty word for curve {0}")]
    EmptyWord(String),
    #[error("token references loop {0} but genus is {1}")]
    BadLoop(usize, usize),
    #[error("arc {0} crosses one of its endpoint curves")]
    ArcCrossesEndpointCurve(String),
    #[error("degenerate drawing (concurrent chords); change a height to break the tie")]
    Degenerate,
    #[error("map assembly failed: {0}")]
    Map(#[from] MapError),
}

impl Arrangement {
    pub fn new(genus: usize) -> Self {
        Arrangement {
            genus,
            ..Default::default()
        }
    }

    pub fn n_loops(&self) -> usize {
        2 * self.genus
    }

    pub fn curve(&self, name: &str) -> Result<&Curve, ArrError> {
        self.curves
            .get(name)
            .ok_or_else(|| ArrError::UnknownCurve(name.to_string()))
    }

    pub fn insert_curve(
        &mut self,
        name: &str,
        family: Family,
        word: Vec<Token>,
    ) -> Result<(), ArrError> {
        if self.curves.contains_key(name) {
            return Err(ArrError::NameTaken(name.to_string()));
        }
        if word.is_empty() {
            return Err(ArrError::EmptyWord(name.to_string()));
        }
        for t in &word {
            if t.loop_id >= self.n_loops() {
                return Err(ArrError::BadLoop(t.loop_id, self.genus));
            }
        }
        self.curves
            .insert(name.to_string(), Curve { family, word });
        // validate the enlarged arrangement; roll back on failure
        match self.realize() {
            Ok(_) => Ok(()),
            Err(e) => {
                self.curves.remove(name);
                Err(e)
            }
        }
    }

    pub fn remove_curve(&mut self, name: &str) {
        self.curves.remove(name);
        let dead: Vec<String> = self
            .arcs
            .iter()
            .filter(|(_, a)| a.start.curve == name || a.end.curve == name)
            .map(|(n, _)| n.clone())
            .collect();
        for n in dead {
            self.arcs.remove(&n);
        }
    }

    /// Sub-arrangement containing only the named curves (plus all basepoints).
    /// Arcs are kept only when both endpoint curves are kept.
    pub fn restricted_to(&self, names: &BTreeSet<String>) -> Arrangement {
        Arrangement {
            genus: self.genus,
            curves: self
                .curves
                .iter()
                .filter(|(n, _)| names.contains(*n))
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect(),
            arcs: self
                .arcs
                .iter()
                .filter(|(_, a)| names.contains(&a.start.curve) && names.contains(&a.end.curve))
                .map(|(n, a)| (n.clone(), a.clone()))
                .collect(),
            basepoints: self.basepoints.clone(),
        }
    }

    /// Signed crossing counts of a curve with each spine loop: the homology
    /// class in the basis dual to the loops.
    pub fn homology_class(&self, name: &str) -> Result<Vec<i64>, ArrError> {
        let c = self.curve(name)?;
        let mut v = vec![0i64; self.n_loops()];
        for t in &c.word {
            v[t.loop_id] += t.sign as i64;
        }
        Ok(v)
    }

    /// Symplectic pairing of two dual-coordinate classes, normalized so that
    /// pair_classes(class c, class d) equals the signed crossing count of the
    /// realized curves.
    pub fn pair_classes(&self, u: &[i64], v: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.genus {
            s += u[2 * i] * v[2 * i + 1] - u[2 * i + 1] * v[2 * i];
        }
        s
    }

    /// Fresh heights strictly between existing crossing heights around `near`
    /// on the given loop. Returns `count` heights placed just above `near`
    /// (or just below if `above` is false), ordered going away from `near`.
    pub fn fresh_heights(&self, loop_id: usize, near: &Rat, above: bool, count: usize) -> Vec<Rat> {
        let mut existing: Vec<Rat> = Vec::new();
        for c in self.curves.values() {
            for t in &c.word {
                if t.loop_id == loop_id {
                    existing.push(t.height.clone());
                }
            }
        }
        for a in self.arcs.values() {
            for t in &a.word {
                if t.loop_id == loop_id {
                    existing.push(t.height.clone());
                }
            }
        }
        for b in self.basepoints.values() {
            if b.loop_id == loop_id {
                existing.push(b.height.clone());
            }
        }
        let bound = if above {
            existing
                .iter()
                .filter(|h| *h > near)
                .min()
                .cloned()
                .unwrap_or_else(Rat::one)
        } else {
            existing
                .iter()
                .filter(|h| *h < near)
                .max()
                .cloned()
                .unwrap_or_else(Rat::zero)
        };
        let mut out = Vec::with_capacity(count);
        let denom = rat(1, (count + 1) as i64);
        for k in 1..=count {
            let f = &denom * rat(k as i64, 1);
            let h = near + (&bound - near) * f;
            out.push(h);
        }
        out
    }

    pub fn total_tokens(&self) -> usize {
        self.curves.values().map(|c| c.word.len()).sum::<usize>()
            + self.arcs.values().map(|a| a.word.len()).sum::<usize>()
    }
}

// ---------------------------------------------------------------------------
// Realization: exact drawing of the arrangement in the cut polygon
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathId {
    Curve(usize),
    Arc(usize),
}

/// One straight piece of a drawn curve or arc: either a full chord between two
/// boundary points, or an end segment of an arc from an interior anchor point.
#[derive(Clone, Debug)]
pub struct Chord {
    pub from: End,
    pub to: End,
    pub p: Pt,
    pub q: Pt,
}

#[derive(Clone, Debug)]
pub enum End {
    /// entry/exit through the polygon boundary: (token index within the word)
    Boundary(usize),
    /// interior anchor point (arc endpoints)
    Interior,
}

#[derive(Clone, Debug)]
pub struct Crossing {
    pub a: PathId,
    pub a_chord: usize,
    pub a_t: Rat,
    pub b: PathId,
    pub b_chord: usize,
    pub b_t: Rat,
    /// +1 if (dir_a, dir_b) is a positively oriented frame
    pub sign: i32,
    pub pt: Pt,
}

pub struct Realization {
    pub curve_names: Vec<String>,
    pub arc_names: Vec<String>,
    pub chords: BTreeMap<PathId, Vec<Chord>>,
    pub crossings: Vec<Crossing>,
    /// anchors resolved: arc index -> (host path, host chord, param along chord) for both ends
    pub anchors: Vec<[(PathId, usize, Rat); 2]>,
    pub map: CombinatorialMap,
    /// for each dart: position data used by reduction
    pub dart_kind: Vec<DartKind>,
    /// face id marked by each basepoint
    pub base_faces: BTreeMap<String, usize>,
    /// vertex ids of crossings, in order of `crossings`
    pub crossing_vertex: Vec<usize>,
    /// all boundary points in cyclic order: (u, path, token index, is_exit)
    pub boundary_order: Vec<(Rat, PathId, usize, bool)>,
    /// boundary parameter of each basepoint anchor
    pub base_positions: BTreeMap<String, Rat>,
    /// vertex id of each token point, keyed by (path, token index)
    pub token_vertex: BTreeMap<(PathId, usize), usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DartKind {
    /// spine dart on loop j, covering heights (lo, hi), pointing up (towards hi) or down
    Spine {
        loop_id: usize,
        lo: Rat,
        hi: Rat,
        up: bool,
    },
    /// dart along a drawn path: chord index and sub-segment index along the
    /// chord, pointing forward (in word direction) or backward
    Path {
        id: PathId,
        chord: usize,
        seg: usize,
        fwd: bool,
    },
}

struct BPoint {
    u: Rat,
    pt: Pt,
    path: PathId,
    token: usize,
    is_exit: bool,
}

impl Arrangement {
    fn path_ids(&self) -> (Vec<String>, Vec<String>) {
        (
            self.curves.keys().cloned().collect(),
            self.arcs.keys().cloned().collect(),
        )
    }

    fn word_of(&self, names: &(Vec<String>, Vec<String>), id: PathId) -> &[Token] {
        match id {
            PathId::Curve(i) => &self.curves[&names.0[i]].word,
            PathId::Arc(i) => &self.arcs[&names.1[i]].word,
        }
    }

    /// boundary parameter in (0,1) of a crossing point: the side occurrence of
    /// loop j at height h.
    pub fn boundary_u(&self, loop_id: usize, h: &Rat, primary: bool) -> Rat {
        let g4 = rat((4 * self.genus) as i64, 1);
        // loop 2i -> sides 4i (primary) / 4i+2 (inverse); loop 2i+1 -> 4i+1 / 4i+3
        let i = loop_id / 2;
        let side = if loop_id % 2 == 0 {
            if primary {
                4 * i
            } else {
                4 * i + 2
            }
        } else if primary {
            4 * i + 1
        } else {
            4 * i + 3
        };
        let x = if primary {
            h.clone()
        } else {
            Rat::one() - h.clone()
        };
        (rat(side as i64, 1) + x) / g4
    }

    pub fn realize(&self) -> Result<Realization, ArrError> {
        assert!(self.genus >= 1, "realize needs genus >= 1");
        let names = self.path_ids();
        // height uniqueness per loop
        {
            let mut seen: BTreeMap<usize, BTreeSet<Rat>> = BTreeMap::new();
            let mut all_tokens: Vec<(usize, Rat)> = Vec::new();
            for c in self.curves.values() {
                for t in &c.word {
                    all_tokens.push((t.loop_id, t.height.clone()));
                }
            }
            for a in self.arcs.values() {
                for t in &a.word {
                    all_tokens.push((t.loop_id, t.height.clone()));
                }
            }
            for b in self.basepoints.values() {
                all_tokens.push((b.loop_id, b.height.clone()));
            }
            for (l, h) in all_tokens {
                if h <= Rat::zero() || h >= Rat::one() {
                    return Err(ArrError::HeightClash { loop_id: l, height: h });
                }
                if !seen.entry(l).or_default().insert(h.clone()) {
                    return Err(ArrError::HeightClash { loop_id: l, height: h });
                }
            }
        }

        // boundary points: for each token, an exit and an entry point
        let mut bpoints: Vec<BPoint> = Vec::new();
        let mut path_list: Vec<PathId> = Vec::new();
        for i in 0..names.0.len() {
            path_list.push(PathId::Curve(i));
        }
        for i in 0..names.1.len() {
            path_list.push(PathId::Arc(i));
        }
        for &id in &path_list {
            let word = self.word_of(&names, id);
            for (k, t) in word.iter().enumerate() {
                let (exit_primary, entry_primary) = if t.sign > 0 {
                    (true, false)
                } else {
                    (false, true)
                };
                bpoints.push(BPoint {
                    u: self.boundary_u(t.loop_id, &t.height, exit_primary),
                    pt: Pt::new(Rat::zero(), Rat::zero()),
                    path: id,
                    token: k,
                    is_exit: true,
                });
                bpoints.push(BPoint {
                    u: self.boundary_u(t.loop_id, &t.height, entry_primary),
                    pt: Pt::new(Rat::zero(), Rat::zero()),
                    path: id,
                    token: k,
                    is_exit: false,
                });
            }
        }
        for bp in bpoints.iter_mut() {
            bp.pt = circle_point(&bp.u);
        }
        let point_of = |path: PathId, token: usize, is_exit: bool| -> &Pt {
            let idx = bpoints
                .iter()
                .position(|b| b.path == path && b.token == token && b.is_exit == is_exit)
                .unwrap();
            &bpoints[idx].pt
        };

        // chords (first pass: curves need no anchors, arcs end on curve chords)
        let mut chords: BTreeMap<PathId, Vec<Chord>> = BTreeMap::new();
        for i in 0..names.0.len() {
            let id = PathId::Curve(i);
            let word = &self.curves[&names.0[i]].word;
            let n = word.len();
            let mut list = Vec::with_capacity(n);
            for k in 0..n {
                let nk = (k + 1) % n;
                let p = point_of(id, k, false).clone();
                let q = point_of(id, nk, true).clone();
                list.push(Chord {
                    from: End::Boundary(k),
                    to: End::Boundary(nk),
                    p,
                    q,
                });
            }
            chords.insert(id, list);
        }
        // resolve arc anchors against curve chords
        let mut anchors: Vec<[(PathId, usize, Rat); 2]> = Vec::new();
        for (ai, an) in names.1.iter().enumerate() {
            let arc = &self.arcs[an];
            let mut resolved: Vec<(PathId, usize, Rat, Pt)> = Vec::new();
            for anchor in [&arc.start, &arc.end] {
                let ci = names
                    .0
                    .iter()
                    .position(|n| *n == anchor.curve)
                    .ok_or_else(|| ArrError::UnknownCurve(anchor.curve.clone()))?;
                let host = PathId::Curve(ci);
                let hc = &chords[&host];
                if anchor.chord >= hc.len() {
                    return Err(ArrError::UnknownArc(format!(
                        "{}: anchor chord {} out of range",
                        an, anchor.chord
                    )));
                }
                let ch = &hc[anchor.chord];
                let pt = seg_at(&ch.p, &ch.q, &anchor.pos);
                resolved.push((host, anchor.chord, anchor.pos.clone(), pt));
            }
            let id = PathId::Arc(ai);
            let word = &arc.word;
            let mut list = Vec::new();
            if word.is_empty() {
                list.push(Chord {
                    from: End::Interior,
                    to: End::Interior,
                    p: resolved[0].3.clone(),
                    q: resolved[1].3.clone(),
                });
            } else {
                list.push(Chord {
                    from: End::Interior,
                    to: End::Boundary(0),
                    p: resolved[0].3.clone(),
                    q: point_of(id, 0, true).clone(),
                });
                for k in 0..word.len() - 1 {
                    list.push(Chord {
                        from: End::Boundary(k),
                        to: End::Boundary(k + 1),
                        p: point_of(id, k, false).clone(),
                        q: point_of(id, k + 1, true).clone(),
                    });
                }
                list.push(Chord {
                    from: End::Boundary(word.len() - 1),
                    to: End::Interior,
                    p: point_of(id, word.len() - 1, false).clone(),
                    q: resolved[1].3.clone(),
                });
            }
            chords.insert(id, list);
            anchors.push([
                (resolved[0].0, resolved[0].1, resolved[0].2.clone()),
                (resolved[1].0, resolved[1].1, resolved[1].2.clone()),
            ]);
        }

        // all pairwise crossings
        let mut crossings: Vec<Crossing> = Vec::new();
        let ids: Vec<PathId> = chords.keys().copied().collect();
        for (ia, &a) in ids.iter().enumerate() {
            for &b in &ids[ia..] {
                let ca = &chords[&a];
                let cb = &chords[&b];
                for (i, x) in ca.iter().enumerate() {
                    let jstart = if a == b { i + 1 } else { 0 };
                    for (j, y) in cb.iter().enumerate().skip(jstart) {
                        if a == b && i == j {
                            continue;
                        }
                        // skip pairs sharing an anchor point (arc end on host chord)
                        if let Some((ta, tb)) = seg_cross_params(&x.p, &x.q, &y.p, &y.q) {
                            if a == b {
                                // self-crossing of one path
                                let nm = match a {
                                    PathId::Curve(i2) => names.0[i2].clone(),
                                    PathId::Arc(i2) => names.1[i2].clone(),
                                };
                                return Err(ArrError::SelfCrossing(nm));
                            }
                            let da = Pt::new(&x.q.x - &x.p.x, &x.q.y - &x.p.y);
                            let db = Pt::new(&y.q.x - &y.p.x, &y.q.y - &y.p.y);
                            let sign = crate::geom::cross(&da, &db);
                            if sign == 0 {
                                return Err(ArrError::Degenerate);
                            }
                            let pt = seg_at(&x.p, &x.q, &ta);
                            crossings.push(Crossing {
                                a,
                                a_chord: i,
                                a_t: ta,
                                b,
                                b_chord: j,
                                b_t: tb,
                                sign,
                                pt,
                            });
                        }
                    }
                }
            }
        }
        // skip crossings that coincide with an arc anchor: an arc-end chord
        // touching its host chord at the anchor is not a transverse crossing.
        // With exact straight segments the shared endpoint is not interior, so
        // seg_cross_params already excludes it. Anchored arcs whose first
        // chord crosses the host elsewhere are genuine crossings and counted.

        // degeneracy: no two crossings on one chord at equal parameter
        {
            let mut per_chord: BTreeMap<(PathId, usize), Vec<Rat>> = BTreeMap::new();
            for c in &crossings {
                per_chord
                    .entry((c.a, c.a_chord))
                    .or_default()
                    .push(c.a_t.clone());
                per_chord
                    .entry((c.b, c.b_chord))
                    .or_default()
                    .push(c.b_t.clone());
            }
            for ((id, ch), mut ts) in per_chord {
                if let PathId::Arc(ai) = id {
                    let _ = ai;
                    let _ = ch;
                }
                ts.sort();
                for w in ts.windows(2) {
                    if w[0] == w[1] {
                        return Err(ArrError::Degenerate);
                    }
                }
            }
        }

        build_map(self, names, bpoints, chords, crossings, anchors)
    }
}

/// Assemble the combinatorial map of the realized drawing.
fn build_map(
    arr: &Arrangement,
    names: (Vec<String>, Vec<String>),
    bpoints: Vec<BPoint>,
    chords: BTreeMap<PathId, Vec<Chord>>,
    crossings: Vec<Crossing>,
    anchors: Vec<[(PathId, usize, Rat); 2]>,
) -> Result<Realization, ArrError> {
    // Vertices: 0 = v0; then one per token (glued boundary pair); then one per
    // interior crossing; then one per arc anchor.
    let mut n_vertices = 1usize;
    let mut token_vertex: BTreeMap<(PathId, usize), usize> = BTreeMap::new();
    for bp in &bpoints {
        if bp.is_exit {
            token_vertex.insert((bp.path, bp.token), 0); // placeholder
        }
    }
    let keys: Vec<(PathId, usize)> = token_vertex.keys().copied().collect();
    for k in keys {
        token_vertex.insert(k, n_vertices);
        n_vertices += 1;
    }
    let crossing_vertex_base = n_vertices;
    n_vertices += crossings.len();
    let anchor_vertex_base = n_vertices;
    let _ = anchor_vertex_base + anchors.len() * 2;

    // Events along each chord: crossings and anchors, ordered by parameter.
    #[derive(Clone)]
    enum Ev {
        Cross(usize), // index into crossings
        Anchor(usize, usize),
    }
    let mut chord_events: BTreeMap<(PathId, usize), Vec<(Rat, Ev)>> = BTreeMap::new();
    for (ci, c) in crossings.iter().enumerate() {
        chord_events
            .entry((c.a, c.a_chord))
            .or_default()
            .push((c.a_t.clone(), Ev::Cross(ci)));
        chord_events
            .entry((c.b, c.b_chord))
            .or_default()
            .push((c.b_t.clone(), Ev::Cross(ci)));
    }
    for (ai, ends) in anchors.iter().enumerate() {
        for (e, (host, hchord, pos)) in ends.iter().enumerate() {
            chord_events
                .entry((*host, *hchord))
                .or_default()
                .push((pos.clone(), Ev::Anchor(ai, e)));
        }
    }
    for evs in chord_events.values_mut() {
        evs.sort_by(|a, b| a.0.cmp(&b.0));
    }

    // Darts. We create them per edge (two at a time) and record geometry for
    // rotation sorting.
    let mut pairing: Vec<usize> = Vec::new();
    let mut vertex_of: Vec<usize> = Vec::new();
    let mut owner: Vec<EdgeOwner> = Vec::new();
    let mut dart_kind: Vec<DartKind> = Vec::new();
    // germ direction of each dart (for rotation sorting at interior vertices)
    let mut germ: Vec<Option<Pt>> = Vec::new();

    let new_edge = |o: EdgeOwner,
                        v1: usize,
                        v2: usize,
                        k1: DartKind,
                        k2: DartKind,
                        g1: Option<Pt>,
                        g2: Option<Pt>,
                        pairing: &mut Vec<usize>,
                        vertex_of: &mut Vec<usize>,
                        owner: &mut Vec<EdgeOwner>,
                        dart_kind: &mut Vec<DartKind>,
                        germ: &mut Vec<Option<Pt>>|
     -> (usize, usize) {
        let d1 = pairing.len();
        let d2 = d1 + 1;
        pairing.push(d2);
        pairing.push(d1);
        vertex_of.push(v1);
        vertex_of.push(v2);
        owner.push(o.clone());
        owner.push(o);
        dart_kind.push(k1);
        dart_kind.push(k2);
        germ.push(g1);
        germ.push(g2);
        (d1, d2)
    };

    // --- spine edges ---
    // per loop: sorted heights with the token vertex at each
    let n_loops = arr.n_loops();
    let mut loop_heights: Vec<Vec<(Rat, usize)>> = vec![Vec::new(); n_loops];
    {
        let mut token_of_point: BTreeMap<(PathId, usize), (usize, Rat)> = BTreeMap::new();
        for (&(path, tok), &v) in &token_vertex {
            let w = match path {
                PathId::Curve(i) => &arr.curves[&names.0[i]].word,
                PathId::Arc(i) => &arr.arcs[&names.1[i]].word,
            };
            let t = &w[tok];
            token_of_point.insert((path, tok), (t.loop_id, t.height.clone()));
            loop_heights[t.loop_id].push((t.height.clone(), v));
        }
        let _ = token_of_point;
    }
    for lh in loop_heights.iter_mut() {
        lh.sort_by(|a, b| a.0.cmp(&b.0));
    }
    // spine darts at v0 for the corner walk: (loop, at_start) -> dart id
    let mut v0_spine_dart: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    // spine darts at token vertices: (vertex, up?) -> dart id
    let mut token_spine_dart: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    for (j, lh) in loop_heights.iter().enumerate() {
        let mut cuts: Vec<(Rat, usize)> = Vec::new();
        cuts.push((Rat::zero(), 0));
        cuts.extend(lh.iter().cloned());
        cuts.push((Rat::one(), 0));
        for (seg, w) in cuts.windows(2).enumerate() {
            let (lo, vlo) = (&w[0].0, w[0].1);
            let (hi, vhi) = (&w[1].0, w[1].1);
            let (d_up, d_down) = new_edge(
                EdgeOwner::SpineLoop(j, seg),
                vlo,
                vhi,
                DartKind::Spine {
                    loop_id: j,
                    lo: lo.clone(),
                    hi: hi.clone(),
                    up: true,
                },
                DartKind::Spine {
                    loop_id: j,
                    lo: lo.clone(),
                    hi: hi.clone(),
                    up: false,
                },
                None,
                None,
                &mut pairing,
                &mut vertex_of,
                &mut owner,
                &mut dart_kind,
                &mut germ,
            );
            if *lo == Rat::zero() {
                v0_spine_dart.insert((j, true), d_up);
            } else {
                token_spine_dart.insert((vlo, true), d_up);
            }
            if *hi == Rat::one() {
                v0_spine_dart.insert((j, false), d_down);
            } else {
                token_spine_dart.insert((vhi, false), d_down);
            }
        }
    }

    // --- path edges (sub-segments of chords) ---
    // Each chord is split at its events. A sub-segment's endpoints are:
    // the chord start (token entry vertex / anchor vertex), events, the chord
    // end (token exit vertex of the NEXT token / anchor vertex).
    // darts at token vertices for paths: (vertex, primary_occ_side?) -> (dart, germ dir)
    let mut token_path_darts: BTreeMap<usize, Vec<(usize, bool)>> = BTreeMap::new();
    // collect path darts at crossing/anchor vertices for rotation sorting
    let mut interior_darts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    for (&id, chs) in &chords {
        let word = match id {
            PathId::Curve(i) => &arr.curves[&names.0[i]].word,
            PathId::Arc(i) => &arr.arcs[&names.1[i]].word,
        };
        let mut seg_rank = 0usize;
        for (kc, ch) in chs.iter().enumerate() {
            let evs = chord_events.get(&(id, kc)).cloned().unwrap_or_default();
            // endpoint vertices and the occ side at boundary ends
            let (v_from, from_primary) = match &ch.from {
                End::Boundary(k) => {
                    let t = &word[*k];
                    (token_vertex[&(id, *k)], t.sign < 0)
                }
                End::Interior => {
                    // which anchor end is this? chord index 0 start or last end
                    let ai = match id {
                        PathId::Arc(i) => i,
                        _ => unreachable!(),
                    };
                    (anchor_vertex_base + 2 * ai, false)
                }
            };
            let (v_to, to_primary) = match &ch.to {
                End::Boundary(k) => {
                    let t = &word[*k];
                    (token_vertex[&(id, *k)], t.sign > 0)
                }
                End::Interior => {
                    let ai = match id {
                        PathId::Arc(i) => i,
                        _ => unreachable!(),
                    };
                    (anchor_vertex_base + 2 * ai + 1, false)
                }
            };
            // build the vertex sequence along the chord
            let mut seq: Vec<(usize, Pt)> = Vec::new();
            seq.push((v_from, ch.p.clone()));
            for (t, ev) in &evs {
                let v = match ev {
                    Ev::Cross(ci) => crossing_vertex_base + ci,
                    Ev::Anchor(ai, e) => anchor_vertex_base + 2 * ai + e,
                };
                seq.push((v, seg_at(&ch.p, &ch.q, t)));
            }
            seq.push((v_to, ch.q.clone()));
            let nseg = seq.len() - 1;
            for s in 0..nseg {
                let (v1, p1) = &seq[s];
                let (v2, p2) = &seq[s + 1];
                let dir_fwd = Pt::new(&p2.x - &p1.x, &p2.y - &p1.y);
                let dir_bwd = Pt::new(&p1.x - &p2.x, &p1.y - &p2.y);
                let o = match id {
                    PathId::Curve(i) => EdgeOwner::CurveSegment(names.0[i].clone(), seg_rank),
                    PathId::Arc(i) => EdgeOwner::ArcSegment(names.1[i].clone(), seg_rank),
                };
                seg_rank += 1;
                let (d1, d2) = new_edge(
                    o,
                    *v1,
                    *v2,
                    DartKind::Path {
                        id,
                        chord: kc,
                        seg: s,
                        fwd: true,
                    },
                    DartKind::Path {
                        id,
                        chord: kc,
                        seg: s,
                        fwd: false,
                    },
                    Some(dir_fwd),
                    Some(dir_bwd),
                    &mut pairing,
                    &mut vertex_of,
                    &mut owner,
                    &mut dart_kind,
                    &mut germ,
                );
                // register darts at their vertices
                for (d, v, at_start) in [(d1, *v1, true), (d2, *v2, false)] {
                    if v == 0 {
                        unreachable!("path dart at v0");
                    } else if v < crossing_vertex_base {
                        // token vertex: which occ side does this germ live on?
                        let primary = if at_start { from_primary } else { to_primary };
                        token_path_darts.entry(v).or_default().push((d, primary));
                    } else {
                        interior_darts.entry(v).or_default().push(d);
                    }
                }
            }
        }
    }

    // --- rotations ---
    let n_darts = pairing.len();
    let mut rotation = vec![usize::MAX; n_darts];

    // v0: corner walk. dart(c) for corner c: forward germ of side c. Sides:
    // side s covers loop l(s) with primary occurrence iff s%4 in {0,1}.
    {
        let nside = 4 * arr.genus;
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
        // forward germ of side c: start dart of loop if primary else end dart
        let dart_at = |c: usize| -> usize {
            let (l, p) = side_loop(c);
            if p {
                v0_spine_dart[&(l, true)]
            } else {
                v0_spine_dart[&(l, false)]
            }
        };
        // rotation[dart(c)] = dart(partner(c-1))
        for c in 0..nside {
            let prev = (c + nside - 1) % nside;
            rotation[dart_at(c)] = dart_at(partner(prev));
        }
    }

    // token vertices: ccw order [spine-up, path germ on primary side,
    // spine-down, path germ on inverse side]
    for (&(v, up), &d) in &token_spine_dart {
        let _ = (v, up, d);
    }
    {
        let mut by_vertex: BTreeMap<usize, (Option<usize>, Option<usize>)> = BTreeMap::new();
        for (&(v, up), &d) in &token_spine_dart {
            let e = by_vertex.entry(v).or_insert((None, None));
            if up {
                e.0 = Some(d);
            } else {
                e.1 = Some(d);
            }
        }
        for (v, (dup, ddown)) in by_vertex {
            let darts = &token_path_darts[&v];
            assert_eq!(darts.len(), 2, "token vertex must meet exactly one strand");
            let dprim = darts.iter().find(|(_, p)| *p).map(|(d, _)| *d);
            let dinv = darts.iter().find(|(_, p)| !*p).map(|(d, _)| *d);
            let (du, dd, dp, di) = (
                dup.unwrap(),
                ddown.unwrap(),
                dprim.expect("strand germ on primary side"),
                dinv.expect("strand germ on inverse side"),
            );
            rotation[du] = dp;
            rotation[dp] = dd;
            rotation[dd] = di;
            rotation[di] = du;
        }
    }

    // interior vertices (crossings, anchors): sort germs by angle
    for (_v, ds) in interior_darts {
        let mut ds2: Vec<usize> = ds.clone();
        ds2.sort_by(|a, b| angle_cmp(germ[*a].as_ref().unwrap(), germ[*b].as_ref().unwrap()));
        let k = ds2.len();
        for i in 0..k {
            rotation[ds2[i]] = ds2[(i + 1) % k];
        }
    }

    debug_assert!(rotation.iter().all(|&r| r != usize::MAX));
    let map = CombinatorialMap::build(rotation, pairing, vertex_of, owner)?;

    // basepoint faces: the face adjacent to the spine segment containing the
    // anchor height, on the requested occurrence side. The primary-side face
    // of a spine edge is the face of its upward dart, the inverse-side face is
    // the face of the downward dart (calibrated by tests).
    let mut base_faces = BTreeMap::new();
    let mut map = map;
    for (bn, bp) in &arr.basepoints {
        // find the spine segment of loop bp.loop_id containing bp.height
        let mut found = None;
        for d in 0..map.pairing.len() {
            if let DartKind::Spine { loop_id, lo, hi, up } = &dart_kind[d] {
                if *loop_id == bp.loop_id && *up && *lo < bp.height && bp.height < *hi {
                    found = Some(d);
                    break;
                }
            }
        }
        let d_up = found.expect("basepoint height inside a spine segment");
        let face = match bp.occ {
            Occ::Primary => map.face_of[d_up],
            Occ::Inverse => map.face_of[map.pairing[d_up]],
        };
        map.mark_face(face, bn);
        base_faces.insert(bn.clone(), face);
    }

    let crossing_vertex: Vec<usize> = (0..crossings.len())
        .map(|i| crossing_vertex_base + i)
        .collect();

    let mut boundary_order: Vec<(Rat, PathId, usize, bool)> = bpoints
        .iter()
        .map(|b| (b.u.clone(), b.path, b.token, b.is_exit))
        .collect();
    boundary_order.sort_by(|a, b| a.0.cmp(&b.0));
    let base_positions: BTreeMap<String, Rat> = arr
        .basepoints
        .iter()
        .map(|(n, b)| {
            (
                n.clone(),
                arr.boundary_u(b.loop_id, &b.height, matches!(b.occ, Occ::Primary)),
            )
        })
        .collect();

    Ok(Realization {
        curve_names: names.0,
        arc_names: names.1,
        chords,
        crossings,
        anchors,
        map,
        dart_kind,
        base_faces,
        crossing_vertex,
        boundary_order,
        base_positions,
        token_vertex,
    })
}

impl Realization {
    pub fn path_name(&self, id: PathId) -> &str {
        match id {
            PathId::Curve(i) => &self.curve_names[i],
            PathId::Arc(i) => &self.arc_names[i],
        }
    }

    pub fn curve_id(&self, name: &str) -> Option<PathId> {
        self.curve_names
            .iter()
            .position(|n| n == name)
            .map(PathId::Curve)
    }

    /// Crossings between two named paths, with positions along each.
    pub fn crossings_between(&self, a: PathId, b: PathId) -> Vec<&Crossing> {
        self.crossings
            .iter()
            .filter(|c| (c.a == a && c.b == b) || (c.a == b && c.b == a))
            .collect()
    }

    pub fn count_crossings(&self, a: PathId, b: PathId) -> usize {
        self.crossings_between(a, b).len()
    }

    pub fn signed_crossings(&self, a: PathId, b: PathId) -> i64 {
        let mut s = 0i64;
        for c in &self.crossings {
            if c.a == a && c.b == b {
                s += c.sign as i64;
            } else if c.a == b && c.b == a {
                s -= c.sign as i64;
            }
        }
        s
    }

    pub fn total_crossings(&self) -> usize {
        self.crossings.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;

    fn torus_with(words: Vec<(&str, Vec<Token>)>) -> Arrangement {
        let mut arr = Arrangement::new(1);
        for (n, w) in words {
            arr.insert_curve(n, Family::Aux, w).unwrap();
        }
        arr
    }

    #[test]
    fn spine_only_torus() {
        let arr = Arrangement::new(1);
        let r = arr.realize().unwrap();
        assert_eq!(r.map.euler_genus(), (0, 1, 1));
    }

    #[test]
    fn spine_only_genus4() {
        let arr = Arrangement::new(4);
        let r = arr.realize().unwrap();
        let (chi, g, f) = r.map.euler_genus();
        assert_eq!((chi, g, f), (-6, 4, 1));
    }

    #[test]
    fn one_curve_on_torus() {
        // the (0,1)-type loop crossing loop a once
        let arr = torus_with(vec![("c", vec![Token::new(1, 0, rat(1, 2))])]);
        let r = arr.realize().unwrap();
        assert_eq!(r.map.euler_genus().1, 1);
        assert_eq!(r.total_crossings(), 0);
    }

    #[test]
    fn dual_pair_crosses_once() {
        let arr = torus_with(vec![
            ("c", vec![Token::new(1, 0, rat(1, 2))]),
            ("d", vec![Token::new(1, 1, rat(1, 2))]),
        ]);
        let r = arr.realize().unwrap();
        let a = r.curve_id("c").unwrap();
        let b = r.curve_id("d").unwrap();
        assert_eq!(r.count_crossings(a, b), 1);
        assert_eq!(arr.pair_classes(
            &arr.homology_class("c").unwrap(),
            &arr.homology_class("d").unwrap(),
        ).abs(), 1);
    }

    #[test]
    fn height_clash_detected() {
        let mut arr = Arrangement::new(1);
        arr.insert_curve("c", Family::Aux, vec![Token::new(1, 0, rat(1, 2))])
            .unwrap();
        let e = arr.insert_curve("d", Family::Aux, vec![Token::new(1, 0, rat(1, 2))]);
        assert!(matches!(e, Err(ArrError::HeightClash { .. })));
    }

    #[test]
    fn parallel_copies_disjoint() {
        let arr = torus_with(vec![
            ("c", vec![Token::new(1, 0, rat(1, 3))]),
            ("d", vec![Token::new(1, 0, rat(2, 3))]),
        ]);
        let r = arr.realize().unwrap();
        let a = r.curve_id("c").unwrap();
        let b = r.curve_id("d").unwrap();
        assert_eq!(r.count_crossings(a, b), 0);
    }

    #[test]
    fn lattice_counts_on_realized_geodesics() {
        use crate::oracle::{geodesic_word, lattice_int};
        let arr = torus_with(vec![
            ("c", geodesic_word(1, 2, &rat(1, 17), &rat(1, 23))),
            ("d", geodesic_word(2, 3, &rat(5, 19), &rat(3, 29))),
        ]);
        let r = arr.realize().unwrap();
        assert_eq!(r.map.euler_genus().1, 1);
        let (ci, di) = (r.curve_id("c").unwrap(), r.curve_id("d").unwrap());
        assert_eq!(r.count_crossings(ci, di) as i64, lattice_int(1, 2, 2, 3));
    }
}
