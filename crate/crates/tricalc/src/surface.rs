//! Combinatorial maps (ribbon graphs): darts, an edge-pairing involution and a
//! vertex rotation system encode a graph cellularly embedded in a closed
//! oriented surface. Faces are orbits of rotation-after-pairing; the Euler
//! characteristic determines the genus.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type Dart = usize;

/// Who an edge belongs to. Spine edges are segments of the polygon loops,
/// curve and arc edges are segments of embedded 1-complexes drawn on the
/// surface.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeOwner {
    /// Segment `rank` of spine loop `x_j` (j is 0-based).
    SpineLoop(usize, usize),
    /// Segment `rank` of the named closed curve.
    CurveSegment(String, usize),
    /// Segment `rank` of the named embedded arc.
    ArcSegment(String, usize),
}

impl EdgeOwner {
    pub fn owner_key(&self) -> OwnerKey {
        match self {
            EdgeOwner::SpineLoop(j, _) => OwnerKey::Spine(*j),
            EdgeOwner::CurveSegment(n, _) => OwnerKey::Curve(n.clone()),
            EdgeOwner::ArcSegment(n, _) => OwnerKey::Arc(n.clone()),
        }
    }
}

/// An edge owner with segment ranks stripped: a whole loop, curve or arc.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OwnerKey {
    Spine(usize),
    Curve(String),
    Arc(String),
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum MapError {
    #[error("pairing is not an involution at dart {0}")]
    NotInvolution(Dart),
    #[error("pairing has a fixed point at dart {0}")]
    FixedPointInPairing(Dart),
    #[error("map is disconnected")]
    Disconnected,
    #[error("Euler characteristic {0} is odd; not a closed oriented surface")]
    NonIntegralGenus(i64),
    #[error("rotation is not a permutation")]
    BadRotation,
    #[error("face {0} is marked and cannot be used here")]
    MarkedFace(usize),
    #[error("owner name collision: {0:?}")]
    NameCollision(OwnerKey),
}

#[derive(Clone, Debug)]
pub struct CombinatorialMap {
    /// pairing[d] = the other dart of the same edge
    pub pairing: Vec<Dart>,
    /// rotation[d] = next dart counterclockwise around the origin vertex of d
    pub rotation: Vec<Dart>,
    /// vertex id of the origin of each dart
    pub vertex_of: Vec<usize>,
    /// owner of the edge of each dart (equal for d and pairing[d])
    pub owner: Vec<EdgeOwner>,
    /// face id of each dart (faces numbered by least dart id in the orbit)
    pub face_of: Vec<usize>,
    /// face orbits, indexed by face id (dense renumbering, sorted by least dart)
    pub faces: Vec<Vec<Dart>>,
    pub n_vertices: usize,
    /// marks attached to faces (basepoints)
    pub face_marks: BTreeMap<usize, Vec<String>>,
}

impl CombinatorialMap {
    /// Validate and assemble a map from rotation + pairing + labels.
    pub fn build(
        rotation: Vec<Dart>,
        pairing: Vec<Dart>,
        vertex_of: Vec<usize>,
        owner: Vec<EdgeOwner>,
    ) -> Result<Self, MapError> {
        let n = pairing.len();
        assert!(rotation.len() == n && vertex_of.len() == n && owner.len() == n);
        let mut seen = vec![false; n];
        for d in 0..n {
            if rotation[d] >= n {
                return Err(MapError::BadRotation);
            }
            seen[rotation[d]] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(MapError::BadRotation);
        }
        for d in 0..n {
            if pairing[d] == d {
                return Err(MapError::FixedPointInPairing(d));
            }
            if pairing[d] >= n || pairing[pairing[d]] != d {
                return Err(MapError::NotInvolution(d));
            }
        }
        // connectivity under rotation + pairing
        if n > 0 {
            let mut vis = vec![false; n];
            let mut stack = vec![0];
            vis[0] = true;
            while let Some(d) = stack.pop() {
                for e in [rotation[d], pairing[d]] {
                    if !vis[e] {
                        vis[e] = true;
                        stack.push(e);
                    }
                }
            }
            if vis.iter().any(|v| !v) {
                return Err(MapError::Disconnected);
            }
        }
        let (faces, face_of) = compute_faces(&rotation, &pairing);
        let n_vertices = vertex_of.iter().copied().max().map_or(0, |m| m + 1);
        let map = CombinatorialMap {
            pairing,
            rotation,
            vertex_of,
            owner,
            face_of,
            faces,
            n_vertices,
            face_marks: BTreeMap::new(),
        };
        let chi = map.euler_characteristic();
        if chi.rem_euclid(2) != 0 {
            return Err(MapError::NonIntegralGenus(chi));
        }
        Ok(map)
    }

    pub fn n_edges(&self) -> usize {
        self.pairing.len() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.n_edges() as i64 + self.faces.len() as i64
    }

    /// (chi, genus, face count)
    pub fn euler_genus(&self) -> (i64, usize, usize) {
        let chi = self.euler_characteristic();
        let g = (2 - chi) / 2;
        debug_assert!(g >= 0);
        (chi, g as usize, self.faces.len())
    }

    pub fn mark_face(&mut self, face: usize, mark: &str) {
        self.face_marks.entry(face).or_default().push(mark.to_string());
    }

    /// Connected sum: remove one unmarked face from each map and glue the
    /// boundaries, merging one vertex of each. The splice corner is the corner
    /// after the lowest dart id of each face, so the result is deterministic.
    pub fn connect_sum(
        a: &CombinatorialMap,
        face_a: usize,
        b: &CombinatorialMap,
        face_b: usize,
    ) -> Result<CombinatorialMap, MapError> {
        for (m, f) in [(a, face_a), (b, face_b)] {
            if m.face_marks.contains_key(&f) {
                return Err(MapError::MarkedFace(f));
            }
        }
        let keys_a: BTreeSet<OwnerKey> = a.owner.iter().map(|o| o.owner_key()).collect();
        for o in &b.owner {
            let k = o.owner_key();
            if let OwnerKey::Curve(_) | OwnerKey::Arc(_) = k {
                if keys_a.contains(&k) {
                    return Err(MapError::NameCollision(k));
                }
            }
        }
        let na = a.pairing.len();
        let off = na;
        let nvb_off = a.n_vertices;
        let mut rotation: Vec<Dart> = a.rotation.clone();
        rotation.extend(b.rotation.iter().map(|d| d + off));
        let mut pairing: Vec<Dart> = a.pairing.clone();
        pairing.extend(b.pairing.iter().map(|d| d + off));
        let mut vertex_of = a.vertex_of.clone();
        vertex_of.extend(b.vertex_of.iter().map(|v| v + nvb_off));
        let mut owner = a.owner.clone();
        // spine loops of b get fresh indices after a's spine loops
        let spine_off = a
            .owner
            .iter()
            .filter_map(|o| match o {
                EdgeOwner::SpineLoop(j, _) => Some(j + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        owner.extend(b.owner.iter().map(|o| match o {
            EdgeOwner::SpineLoop(j, r) => EdgeOwner::SpineLoop(j + spine_off, *r),
            other => other.clone(),
        }));
        // splice corners: corner after the lowest dart of each face.
        // In face f of a, let da = min dart; the corner sits at the origin
        // vertex of da between rotation-predecessor and da. Splicing the two
        // vertex rotations joins the faces and merges the vertices.
        let da = *a.faces[face_a].iter().min().unwrap();
        let db_raw = *b.faces[face_b].iter().min().unwrap();
        let db = db_raw + off;
        // merge vertex of db into vertex of da
        let va = a.vertex_of[da];
        let vb = vertex_of[db];
        for v in vertex_of.iter_mut() {
            if *v == vb {
                *v = va;
            }
        }
        // renumber vertices densely
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        for v in vertex_of.iter() {
            let next = remap.len();
            remap.entry(*v).or_insert(next);
        }
        for v in vertex_of.iter_mut() {
            *v = remap[v];
        }
        // splice rotations: rotation cycles ...-> da -> ra ..., ... -> db -> rb ...
        // become ... -> da -> rb ... -> db -> ra ...
        let ra = rotation[da];
        let rb = rotation[db];
        rotation[da] = rb;
        rotation[db] = ra;
        CombinatorialMap::build(rotation, pairing, vertex_of, owner)
    }

    /// Cut the surface along the edges whose owner key is in `keep`, i.e.
    /// merge faces across every other edge, and report each resulting
    /// component of the cut surface. Returns, per component: its Euler
    /// characteristic (of the compact cut piece) and its boundary circles,
    /// each given as the set of owner keys appearing on that circle.
    pub fn components_after_deleting(&self, keep: &BTreeSet<OwnerKey>) -> Vec<CutComponent> {
        let n = self.pairing.len();
        let nf = self.faces.len();
        let mut uf = UnionFind::new(nf);
        let is_kept = |d: Dart| keep.contains(&self.owner[d].owner_key());
        for d in 0..n {
            if !is_kept(d) {
                uf.union(self.face_of[d], self.face_of[self.pairing[d]]);
            }
        }
        // group faces by component
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for f in 0..nf {
            comps.entry(uf.find(f)).or_default().push(f);
        }
        let mut out = Vec::new();
        for (_, faces) in comps {
            let fset: BTreeSet<usize> = faces.iter().copied().collect();
            // edges of the cut piece: each deleted edge interior to the region
            // counts once; each kept dart bordering the region becomes its own
            // boundary edge of the cut piece.
            let mut e_interior = 0usize;
            let mut boundary_darts: Vec<Dart> = Vec::new();
            for d in 0..n {
                if fset.contains(&self.face_of[d]) {
                    if is_kept(d) {
                        boundary_darts.push(d);
                    } else if d < self.pairing[d] {
                        e_interior += 1;
                    }
                }
            }
            // vertices of the cut piece: corner sectors merged across deleted
            // darts. The sector after dart d (between d and rotation[d] at
            // their common origin) is a corner of face_of[rotation[d]]; the
            // two sectors flanking a deleted dart at the same vertex merge.
            let mut inv_rot = vec![0usize; n];
            for d in 0..n {
                inv_rot[self.rotation[d]] = d;
            }
            let mut sector_ids: BTreeMap<Dart, usize> = BTreeMap::new();
            for d in 0..n {
                if fset.contains(&self.face_of[self.rotation[d]]) {
                    let next = sector_ids.len();
                    sector_ids.entry(d).or_insert(next);
                }
            }
            let mut suf = UnionFind::new(sector_ids.len());
            for x in 0..n {
                if !is_kept(x) && fset.contains(&self.face_of[x]) {
                    if let (Some(&s1), Some(&s2)) =
                        (sector_ids.get(&x), sector_ids.get(&inv_rot[x]))
                    {
                        suf.union(s1, s2);
                    }
                }
            }
            let v_cut = {
                let mut roots = BTreeSet::new();
                for i in 0..sector_ids.len() {
                    roots.insert(suf.find(i));
                }
                roots.len()
            };
            let e_cut = e_interior + boundary_darts.len();
            let chi = v_cut as i64 - e_cut as i64 + faces.len() as i64;
            // boundary circles: walk kept darts along the rim
            let circles = self.boundary_circles(&fset, &boundary_darts, &is_kept);
            let marks: Vec<String> = faces
                .iter()
                .filter_map(|f| self.face_marks.get(f))
                .flatten()
                .cloned()
                .collect();
            out.push(CutComponent {
                chi,
                faces,
                boundary: circles,
                marks,
            });
        }
        out
    }

    fn boundary_circles(
        &self,
        fset: &BTreeSet<usize>,
        boundary_darts: &[Dart],
        is_kept: &dyn Fn(Dart) -> bool,
    ) -> Vec<BTreeSet<OwnerKey>> {
        let mut unvisited: BTreeSet<Dart> = boundary_darts.iter().copied().collect();
        let mut circles = Vec::new();
        while let Some(&start) = unvisited.iter().next() {
            let mut owners = BTreeSet::new();
            let mut d = start;
            loop {
                unvisited.remove(&d);
                owners.insert(self.owner[d].owner_key());
                // advance along the rim: next dart along the face walk,
                // hopping across deleted edges interior to the region
                let mut e = self.next_in_face(d);
                while !is_kept(e) {
                    debug_assert!(fset.contains(&self.face_of[self.pairing[e]]));
                    e = self.next_in_face(self.pairing[e]);
                }
                d = e;
                if d == start {
                    break;
                }
            }
            circles.push(owners);
        }
        circles
    }

    /// Next dart along the face orbit containing d.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        self.rotation[self.pairing[d]]
    }
}

fn compute_faces(rotation: &[Dart], pairing: &[Dart]) -> (Vec<Vec<Dart>>, Vec<usize>) {
    let n = rotation.len();
    let mut face_of = vec![usize::MAX; n];
    let mut faces: Vec<Vec<Dart>> = Vec::new();
    for d0 in 0..n {
        if face_of[d0] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut orbit = Vec::new();
        let mut d = d0;
        loop {
            face_of[d] = id;
            orbit.push(d);
            d = rotation[pairing[d]];
            if d == d0 {
                break;
            }
        }
        faces.push(orbit);
    }
    (faces, face_of)
}

#[derive(Clone, Debug)]
pub struct CutComponent {
    pub chi: i64,
    pub faces: Vec<usize>,
    /// boundary circles; each circle is the set of owner keys appearing on it
    pub boundary: Vec<BTreeSet<OwnerKey>>,
    /// marks (basepoints) contained in the component
    pub marks: Vec<String>,
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One-vertex torus map: two loops a, b; darts a+=0, a-=1, b+=2, b-=3;
    /// rotation at the single vertex (a+, b+, a-, b-).
    fn torus_map() -> CombinatorialMap {
        let rotation = vec![2, 3, 1, 0]; // 0->2->1->3->0
        let pairing = vec![1, 0, 3, 2];
        let vertex_of = vec![0, 0, 0, 0];
        let owner = vec![
            EdgeOwner::SpineLoop(0, 0),
            EdgeOwner::SpineLoop(0, 0),
            EdgeOwner::SpineLoop(1, 0),
            EdgeOwner::SpineLoop(1, 0),
        ];
        CombinatorialMap::build(rotation, pairing, vertex_of, owner).unwrap()
    }

    #[test]
    fn torus_one_vertex_genus() {
        let m = torus_map();
        let (chi, g, f) = m.euler_genus();
        assert_eq!((chi, g, f), (0, 1, 1));
    }

    #[test]
    fn sphere_single_edge() {
        // two vertices joined by one edge on the sphere: V=2, E=1, F=1, chi=2
        let rotation = vec![0, 1];
        let pairing = vec![1, 0];
        let vertex_of = vec![0, 1];
        let owner = vec![EdgeOwner::SpineLoop(0, 0), EdgeOwner::SpineLoop(0, 0)];
        let m = CombinatorialMap::build(rotation, pairing, vertex_of, owner).unwrap();
        assert_eq!(m.euler_genus(), (2, 0, 1));
    }

    #[test]
    fn fixed_point_rejected() {
        let rotation = vec![0, 1];
        let pairing = vec![0, 1];
        let vertex_of = vec![0, 0];
        let owner = vec![EdgeOwner::SpineLoop(0, 0), EdgeOwner::SpineLoop(0, 0)];
        let err = CombinatorialMap::build(rotation, pairing, vertex_of, owner).unwrap_err();
        assert_eq!(err, MapError::FixedPointInPairing(0));
    }

    #[test]
    fn disconnected_rejected() {
        // two separate single-edge spheres
        let rotation = vec![0, 1, 2, 3];
        let pairing = vec![1, 0, 3, 2];
        let vertex_of = vec![0, 1, 2, 3];
        let owner = vec![
            EdgeOwner::SpineLoop(0, 0),
            EdgeOwner::SpineLoop(0, 0),
            EdgeOwner::SpineLoop(1, 0),
            EdgeOwner::SpineLoop(1, 0),
        ];
        let err = CombinatorialMap::build(rotation, pairing, vertex_of, owner).unwrap_err();
        assert_eq!(err, MapError::Disconnected);
    }

    #[test]
    fn connect_sum_adds_genus() {
        let a = torus_map();
        let b = torus_map();
        let s = CombinatorialMap::connect_sum(&a, 0, &b, 0).unwrap();
        assert_eq!(s.euler_genus().1, 2);
    }

    #[test]
    fn connect_sum_commutes_on_invariants() {
        let a = torus_map();
        let b = {
            // genus-2 map: connect sum of two tori
            CombinatorialMap::connect_sum(&torus_map(), 0, &torus_map(), 0).unwrap()
        };
        let ab = CombinatorialMap::connect_sum(&a, 0, &b, 0).unwrap();
        let ba = CombinatorialMap::connect_sum(&b, 0, &a, 0).unwrap();
        assert_eq!(ab.euler_genus(), ba.euler_genus());
        let mut da: Vec<usize> = ab.faces.iter().map(|f| f.len()).collect();
        let mut db: Vec<usize> = ba.faces.iter().map(|f| f.len()).collect();
        da.sort();
        db.sort();
        assert_eq!(da, db);
    }

    #[test]
    fn marked_face_blocks_sum() {
        let mut a = torus_map();
        a.mark_face(0, "z");
        let b = torus_map();
        let err = CombinatorialMap::connect_sum(&a, 0, &b, 0).unwrap_err();
        assert_eq!(err, MapError::MarkedFace(0));
    }

    #[test]
    fn keep_all_gives_disk_faces() {
        let m = torus_map();
        let keep: BTreeSet<OwnerKey> = [OwnerKey::Spine(0), OwnerKey::Spine(1)].into();
        let comps = m.components_after_deleting(&keep);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].chi, 1); // the square is a disk once cut open
    }

    #[test]
    fn cut_torus_along_one_loop_gives_annulus() {
        let m = torus_map();
        let keep: BTreeSet<OwnerKey> = [OwnerKey::Spine(0)].into();
        let comps = m.components_after_deleting(&keep);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].chi, 0);
        assert_eq!(comps[0].boundary.len(), 2);
    }
}
