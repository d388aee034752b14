//! Finite abstract simplicial complexes.
//!
//! Vertices are opaque string tokens kept in lexicographic order; every
//! orientation sign in the crate is derived from that order. Faces are
//! stored as sorted vectors of vertex indices.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// A face as a strictly increasing list of vertex indices.
pub type Face = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("facet list is empty")]
    NoFacets,
    #[error("facet {0} is empty")]
    EmptyFacet(usize),
    #[error("vertex token is empty in facet {0}")]
    EmptyToken(usize),
    #[error("vertex {vertex:?} repeated in facet {facet}")]
    DuplicateVertex { facet: usize, vertex: String },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("{0:?} is not a face")]
    NotAFace(Vec<String>),
    #[error("{0:?} is not an edge")]
    NotAnEdge(Vec<String>),
    #[error("unknown builtin complex {0:?}")]
    UnknownBuiltin(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Finite abstract simplicial complex given by its maximal faces.
///
/// A complex with no facets is the void-like complex `{∅}`; it only arises
/// as a link of a maximal face and is never produced by [`SimplicialComplex::new`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    facets: Vec<Face>,
}

/// Face counts `f_{-1} = 1, f_0, f_1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FVector {
    pub counts: Vec<usize>,
}

impl FVector {
    /// Number of faces of dimension `d` (`d = -1` is the empty face).
    pub fn f(&self, d: isize) -> usize {
        usize::try_from(d + 1)
            .ok()
            .and_then(|i| self.counts.get(i).copied())
            .unwrap_or(0)
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All faces of a complex grouped by cardinality, with index lookup.
///
/// `level(k)` lists the faces with exactly `k` vertices in lexicographic
/// order; `level(0)` is the empty face.
#[derive(Debug, Clone)]
pub struct FaceTable {
    levels: Vec<Vec<Face>>,
    index: Vec<HashMap<Face, usize>>,
}

impl FaceTable {
    pub fn level(&self, k: usize) -> &[Face] {
        self.levels.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Number of levels, i.e. `dim + 2`.
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn index_of(&self, face: &[u32]) -> Option<usize> {
        self.index.get(face.len())?.get(face).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Face> {
        self.levels.iter().flatten()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    // both sorted
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

fn maximal_only(mut faces: Vec<Face>) -> Vec<Face> {
    for f in faces.iter_mut() {
        f.sort_unstable();
        f.dedup();
    }
    faces.sort();
    faces.dedup();
    // larger faces first so containment only needs to look backwards
    let mut by_size = faces.clone();
    by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Face> = Vec::new();
    for f in by_size {
        if !kept.iter().any(|g| g.len() > f.len() && is_subset(&f, g)) {
            kept.push(f);
        }
    }
    kept.retain(|f| !f.is_empty());
    kept.sort();
    kept
}

impl SimplicialComplex {
    /// Builds a complex from a list of vertex sets; contained facets are dropped.
    pub fn new<S: AsRef<str>>(facets: &[Vec<S>]) -> Result<Self, ComplexError> {
        if facets.is_empty() {
            return Err(ComplexError::NoFacets);
        }
        let mut names = BTreeSet::new();
        for (i, facet) in facets.iter().enumerate() {
            if facet.is_empty() {
                return Err(ComplexError::EmptyFacet(i));
            }
            let mut seen = HashSet::new();
            for v in facet {
                let v = v.as_ref();
                if v.is_empty() {
                    return Err(ComplexError::EmptyToken(i));
                }
                if !seen.insert(v) {
                    return Err(ComplexError::DuplicateVertex {
                        facet: i,
                        vertex: v.to_string(),
                    });
                }
                names.insert(v.to_string());
            }
        }
        let vertices: Vec<String> = names.into_iter().collect();
        let lookup: HashMap<&str, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i as u32))
            .collect();
        let faces = facets
            .iter()
            .map(|f| f.iter().map(|v| lookup[v.as_ref()]).collect())
            .collect();
        Ok(Self {
            facets: maximal_only(faces),
            vertices,
        })
    }

    /// Builds from named vertices and index facets; vertices are re-sorted.
    pub(crate) fn from_parts(vertices: Vec<String>, facets: Vec<Face>) -> Self {
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
        let mut relabel = vec![0u32; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new as u32;
        }
        let sorted: Vec<String> = order.iter().map(|&i| vertices[i].clone()).collect();
        let facets = facets
            .into_iter()
            .map(|f| f.into_iter().map(|v| relabel[v as usize]).collect())
            .collect();
        Self {
            vertices: sorted,
            facets: maximal_only(facets),
        }
    }

    /// The complex `{∅}` with no vertices.
    pub fn void() -> Self {
        Self {
            vertices: Vec::new(),
            facets: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn vertex_index(&self, name: &str) -> Option<u32> {
        self.vertices
            .binary_search_by(|v| v.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Face, ComplexError> {
        let mut face = names
            .iter()
            .map(|n| {
                self.vertex_index(n.as_ref())
                    .ok_or_else(|| ComplexError::UnknownVertex(n.as_ref().to_string()))
            })
            .collect::<Result<Face, _>>()?;
        face.sort_unstable();
        face.dedup();
        Ok(face)
    }

    pub fn names_of(&self, face: &[u32]) -> Vec<String> {
        face.iter().map(|&v| self.vertices[v as usize].clone()).collect()
    }

    /// Dimension; `-1` for `{∅}`.
    pub fn dim(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    pub fn contains_face(&self, face: &[u32]) -> bool {
        face.is_empty() || self.facets.iter().any(|f| is_subset(face, f))
    }

    pub fn has_face<S: AsRef<str>>(&self, names: &[S]) -> bool {
        self.indices_of(names)
            .map(|f| self.contains_face(&f))
            .unwrap_or(false)
    }

    /// Enumerates every face, including the empty one, grouped by size.
    pub fn face_table(&self) -> FaceTable {
        let top = self.facets.iter().map(|f| f.len()).max().unwrap_or(0);
        let mut sets: Vec<HashSet<Face>> = vec![HashSet::new(); top + 1];
        sets[0].insert(Vec::new());
        for facet in &self.facets {
            let n = facet.len();
            for mask in 1u64..(1u64 << n) {
                let face: Face = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| facet[i])
                    .collect();
                sets[face.len()].insert(face);
            }
        }
        let levels: Vec<Vec<Face>> = sets
            .into_iter()
            .map(|s| {
                let mut v: Vec<Face> = s.into_iter().collect();
                v.sort();
                v
            })
            .collect();
        let index = levels
            .iter()
            .map(|l| l.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect())
            .collect();
        FaceTable { levels, index }
    }

    pub fn f_vector(&self) -> FVector {
        FVector {
            counts: self.face_table().counts(),
        }
    }

    /// Reduced Euler characteristic `Σ (-1)^d f_d` over `d ≥ -1`.
    pub fn reduced_euler_characteristic(&self) -> i64 {
        self.f_vector()
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { -(c as i64) } else { c as i64 })
            .sum()
    }

    /// Adjacency lists of the 1-skeleton.
    pub fn neighbors(&self) -> Vec<BTreeSet<u32>> {
        let mut adj = vec![BTreeSet::new(); self.vertices.len()];
        for f in &self.facets {
            for &a in f {
                for &b in f {
                    if a != b {
                        adj[a as usize].insert(b);
                    }
                }
            }
        }
        adj
    }

    /// True iff every set of pairwise adjacent vertices spans a face.
    pub fn is_flag(&self) -> bool {
        self.empty_triangles_or_worse().is_none()
    }

    /// A minimal clique of the 1-skeleton that is not a face, if any.
    pub fn empty_triangles_or_worse(&self) -> Option<Face> {
        // Every face extends by each common neighbour iff the complex is flag.
        let adj = self.neighbors();
        let table = self.face_table();
        for k in 2..table.num_levels() + 1 {
            for face in table.level(k) {
                let mut common: BTreeSet<u32> = adj[face[0] as usize].clone();
                for &v in &face[1..] {
                    common = common.intersection(&adj[v as usize]).copied().collect();
                }
                for w in common {
                    let mut bigger = face.clone();
                    bigger.push(w);
                    bigger.sort_unstable();
                    if table.index_of(&bigger).is_none() {
                        return Some(bigger);
                    }
                }
            }
        }
        None
    }

    /// Triples of pairwise adjacent vertices that do not span a 2-face.
    pub fn empty_triangles(&self) -> Vec<Face> {
        let adj = self.neighbors();
        let mut out = Vec::new();
        for a in 0..self.vertices.len() as u32 {
            for &b in adj[a as usize].range(a + 1..) {
                for &c in adj[b as usize].range(b + 1..) {
                    if adj[a as usize].contains(&c) && !self.contains_face(&[a, b, c]) {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// Link of a face given by vertex names.
    pub fn link<S: AsRef<str>>(&self, simplex: &[S]) -> Result<Self, ComplexError> {
        let s = self.indices_of(simplex)?;
        self.link_of(&s)
    }

    pub(crate) fn link_of(&self, s: &[u32]) -> Result<Self, ComplexError> {
        if !self.contains_face(s) {
            return Err(ComplexError::NotAFace(self.names_of(s)));
        }
        let faces: Vec<Face> = self
            .facets
            .iter()
            .filter(|f| is_subset(s, f))
            .map(|f| f.iter().copied().filter(|v| !s.contains(v)).collect())
            .collect();
        Ok(self.restrict_to_faces(faces))
    }

    /// Re-indexes a family of faces onto the vertices they use.
    fn restrict_to_faces(&self, faces: Vec<Face>) -> Self {
        let used: BTreeSet<u32> = faces.iter().flatten().copied().collect();
        self.sub_on(&used, faces)
    }

    fn sub_on(&self, keep: &BTreeSet<u32>, faces: Vec<Face>) -> Self {
        let remap: HashMap<u32, u32> = keep.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let vertices = keep.iter().map(|&v| self.vertices[v as usize].clone()).collect();
        let facets = faces
            .into_iter()
            .map(|f| f.into_iter().map(|v| remap[&v]).collect())
            .collect();
        Self {
            vertices,
            facets: maximal_only(facets),
        }
    }

    /// Closed star of a vertex.
    pub fn star(&self, v: &str) -> Result<Self, ComplexError> {
        let i = self
            .vertex_index(v)
            .ok_or_else(|| ComplexError::UnknownVertex(v.to_string()))?;
        let faces = self.facets.iter().filter(|f| f.contains(&i)).cloned().collect();
        Ok(self.restrict_to_faces(faces))
    }

    /// Full subcomplex spanned by a vertex set.
    pub fn full_subcomplex<S: AsRef<str>>(&self, vertices: &[S]) -> Result<Self, ComplexError> {
        let keep: BTreeSet<u32> = self.indices_of(vertices)?.into_iter().collect();
        let mut faces: Vec<Face> = self
            .facets
            .iter()
            .map(|f| f.iter().copied().filter(|v| keep.contains(v)).collect())
            .collect();
        faces.extend(keep.iter().map(|&v| vec![v]));
        Ok(self.sub_on(&keep, faces))
    }

    /// Deletes a vertex, i.e. the full subcomplex on the remaining vertices.
    pub fn delete_vertex(&self, v: &str) -> Result<Self, ComplexError> {
        if self.vertex_index(v).is_none() {
            return Err(ComplexError::UnknownVertex(v.to_string()));
        }
        let rest: Vec<&str> = self
            .vertices
            .iter()
            .map(|s| s.as_str())
            .filter(|s| *s != v)
            .collect();
        self.full_subcomplex(&rest)
    }

    /// Vertices `(v, ±)` named `v+`/`v-`; a set spans a face iff its base
    /// vertices are distinct and span a face.
    pub fn octahedralize(&self) -> Self {
        let vertices: Vec<String> = self
            .vertices
            .iter()
            .flat_map(|v| [format!("{v}+"), format!("{v}-")])
            .collect();
        let mut facets = Vec::new();
        for f in &self.facets {
            for signs in 0u64..(1u64 << f.len()) {
                facets.push(
                    f.iter()
                        .enumerate()
                        .map(|(i, &v)| 2 * v + (signs >> i & 1) as u32)
                        .collect(),
                );
            }
        }
        Self::from_parts(vertices, facets)
    }

    fn fresh_name(&self, stem: &str) -> String {
        (0..)
            .map(|k| format!("{stem}{k}"))
            .find(|n| self.vertex_index(n).is_none())
            .expect("unbounded search")
    }

    /// Replaces edge `{u, v}` by a new vertex `w` and splits every face
    /// through the edge in two.
    pub fn subdivide_edge(&self, u: &str, v: &str) -> Result<Self, ComplexError> {
        let e = self.indices_of(&[u, v])?;
        if e.len() != 2 || !self.contains_face(&e) {
            return Err(ComplexError::NotAnEdge(vec![u.to_string(), v.to_string()]));
        }
        let mut vertices = self.vertices.clone();
        vertices.push(self.fresh_name("w"));
        let w = (vertices.len() - 1) as u32;
        let mut facets = Vec::new();
        for f in &self.facets {
            if is_subset(&e, f) {
                for drop in &e {
                    let mut g: Face = f.iter().copied().filter(|x| x != drop).collect();
                    g.push(w);
                    facets.push(g);
                }
            } else {
                facets.push(f.clone());
            }
        }
        Ok(Self::from_parts(vertices, facets))
    }

    /// Order complex of the face poset. Vertices are named `[a,b,...]`.
    pub fn barycentric_subdivision(&self) -> Self {
        let table = self.face_table();
        let mut vertices = Vec::new();
        let mut id: HashMap<Face, u32> = HashMap::new();
        for face in table.iter().filter(|f| !f.is_empty()) {
            id.insert(face.clone(), vertices.len() as u32);
            vertices.push(format!("[{}]", self.names_of(face).join(",")));
        }
        let mut facets = Vec::new();
        for f in &self.facets {
            for perm in permutations(f) {
                let chain = (1..=perm.len())
                    .map(|k| {
                        let mut g = perm[..k].to_vec();
                        g.sort_unstable();
                        id[&g]
                    })
                    .collect();
                facets.push(chain);
            }
        }
        Self::from_parts(vertices, facets)
    }

    /// Simplicial join; colliding vertex names of `other` get a `'` suffix.
    pub fn join(&self, other: &Self) -> Self {
        let mut vertices = self.vertices.clone();
        let mut taken: HashSet<String> = self.vertices.iter().cloned().collect();
        for v in &other.vertices {
            let mut name = v.clone();
            while taken.contains(&name) || (&name != v && other.vertex_index(&name).is_some()) {
                name.push('\'');
            }
            taken.insert(name.clone());
            vertices.push(name);
        }
        let shift = self.vertices.len() as u32;
        let left: Vec<Face> = if self.facets.is_empty() { vec![vec![]] } else { self.facets.clone() };
        let right: Vec<Face> = if other.facets.is_empty() { vec![vec![]] } else { other.facets.clone() };
        let mut facets = Vec::new();
        for a in &left {
            for b in &right {
                let mut g = a.clone();
                g.extend(b.iter().map(|x| x + shift));
                facets.push(g);
            }
        }
        Self::from_parts(vertices, facets)
    }

    /// Renames vertices through `f`; the resulting names must be distinct.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Self {
        let vertices = self.vertices.iter().map(|v| f(v)).collect();
        Self::from_parts(vertices, self.facets.clone())
    }

    /// Serializes to the text format: one facet per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facets {
            out.push_str(&self.names_of(f).join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format; `#` starts a comment line, blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self, ComplexError> {
        let mut facets: Vec<Vec<&str>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let facet: Vec<&str> = line.split_whitespace().collect();
            let mut seen = HashSet::new();
            if let Some(dup) = facet.iter().find(|v| !seen.insert(**v)) {
                return Err(ComplexError::Parse {
                    line: n + 1,
                    msg: format!("vertex {dup:?} repeated"),
                });
            }
            facets.push(facet);
        }
        Self::new(&facets)
    }

    /// Exhaustive isomorphism test for small complexes.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        if self.vertices.len() != other.vertices.len()
            || self.f_vector() != other.f_vector()
            || self.facets.len() != other.facets.len()
        {
            return false;
        }
        let n = self.vertices.len();
        let sig = |c: &Self| -> Vec<(usize, Vec<usize>)> {
            let mut s: Vec<(usize, Vec<usize>)> = (0..c.vertices.len() as u32)
                .map(|v| {
                    let mut sizes: Vec<usize> =
                        c.facets.iter().filter(|f| f.contains(&v)).map(|f| f.len()).collect();
                    sizes.sort_unstable();
                    (c.neighbors()[v as usize].len(), sizes)
                })
                .collect();
            s.sort();
            s
        };
        if sig(self) != sig(other) {
            return false;
        }
        let target: HashSet<Face> = other.facets.iter().cloned().collect();
        let adj_a = self.neighbors();
        let adj_b = other.neighbors();
        let mut map = vec![u32::MAX; n];
        let mut used = vec![false; n];
        fn extend(
            k: usize,
            map: &mut Vec<u32>,
            used: &mut Vec<bool>,
            a: &SimplicialComplex,
            adj_a: &[BTreeSet<u32>],
            adj_b: &[BTreeSet<u32>],
            target: &HashSet<Face>,
        ) -> bool {
            let n = map.len();
            if k == n {
                return a.facets.iter().all(|f| {
                    let mut g: Face = f.iter().map(|&v| map[v as usize]).collect();
                    g.sort_unstable();
                    target.contains(&g)
                });
            }
            for cand in 0..n {
                if used[cand] || adj_a[k].len() != adj_b[cand].len() {
                    continue;
                }
                let consistent = (0..k).all(|j| {
                    adj_a[k].contains(&(j as u32)) == adj_b[cand].contains(&map[j])
                });
                if !consistent {
                    continue;
                }
                map[k] = cand as u32;
                used[cand] = true;
                if extend(k + 1, map, used, a, adj_a, adj_b, target) {
                    return true;
                }
                used[cand] = false;
            }
            map[k] = u32::MAX;
            false
        }
        extend(0, &mut map, &mut used, self, &adj_a, &adj_b, &target)
    }
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facets: Vec<String> = self
            .facets
            .iter()
            .map(|x| format!("{{{}}}", self.names_of(x).join(",")))
            .collect();
        write!(f, "SimplicialComplex[{}]", facets.join(" "))
    }
}
