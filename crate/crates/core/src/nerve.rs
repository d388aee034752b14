//! Mayer-Vietoris bookkeeping for the cover of the Salvetti complex by its
//! maximal tori.
//!
//! The maximal tori correspond to the maximal simplices of `L`, so their
//! nerve is a full simplex `Δ` on `m` vertices. A subset `σ` of maximal
//! simplices meets in the torus of `τ(σ) = ∩σ`; the tori meet only in the
//! base point exactly when `τ(σ) = ∅`. The faces with `τ(σ) ≠ ∅` form the
//! subcomplex `𝓛`, the nerve of the cover of `L` by its facets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{reduced_betti, reduced_betti_at, ChainComplex};
use crate::complex::{Face, SimplicialComplex};
use crate::linalg::{Field, SparseIntMatrix};
use crate::salvetti::{cover_betti, CoverError, CoverSpec, Normalized, RunOptions};

/// Largest number of maximal simplices for which all of `Δ` is enumerated
/// in the coefficient-system complex.
pub const MAX_DELTA_VERTICES: usize = 14;
/// Largest number of maximal simplices for closed-form `E^1` tables.
pub const MAX_E1_VERTICES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error("{m} maximal simplices exceed the limit of {limit}")]
    TooManyFacets { m: usize, limit: usize },
    #[error("coefficient-system homology in degree {degree} is {got}, expected {want}")]
    LemmaViolated { degree: usize, got: u64, want: u64 },
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Maximal simplices of `L` with their vertex bitsets.
#[derive(Debug, Clone)]
pub struct NerveData {
    pub maximal_simplices: Vec<Face>,
    masks: Vec<Vec<u64>>,
}

fn bitset(face: &[u32], words: usize) -> Vec<u64> {
    let mut b = vec![0u64; words];
    for &v in face {
        b[v as usize / 64] |= 1 << (v % 64);
    }
    b
}

impl NerveData {
    pub fn new(l: &SimplicialComplex) -> Self {
        let words = l.num_vertices().div_ceil(64).max(1);
        let maximal_simplices = l.facets().to_vec();
        let masks = maximal_simplices.iter().map(|f| bitset(f, words)).collect();
        Self { maximal_simplices, masks }
    }

    pub fn m(&self) -> usize {
        self.maximal_simplices.len()
    }

    /// `τ(σ)` for `σ` given as a bitmask over the maximal simplices.
    pub fn tau(&self, sigma: u64) -> Face {
        let mut acc: Option<Vec<u64>> = None;
        for (i, m) in self.masks.iter().enumerate() {
            if sigma >> i & 1 == 1 {
                acc = Some(match acc {
                    None => m.clone(),
                    Some(a) => a.iter().zip(m).map(|(x, y)| x & y).collect(),
                });
            }
        }
        let acc = acc.unwrap_or_default();
        let mut face = Vec::new();
        for (w, &bits) in acc.iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let t = b.trailing_zeros();
                face.push(w as u32 * 64 + t);
                b &= b - 1;
            }
        }
        face
    }
}

/// The nerve of the cover of `L` by its maximal simplices; vertex `m{i}`
/// stands for the `i`-th facet.
pub fn nerve_subcomplex(l: &SimplicialComplex) -> SimplicialComplex {
    let facets = l.facets();
    let name = |i: usize| format!("m{i:04}");
    // every face of the nerve lies in the star of some vertex of L
    let groups: Vec<Vec<String>> = (0..l.num_vertices() as u32)
        .map(|v| {
            facets
                .iter()
                .enumerate()
                .filter(|(_, f)| f.contains(&v))
                .map(|(i, _)| name(i))
                .collect()
        })
        .filter(|g: &Vec<String>| !g.is_empty())
        .collect();
    SimplicialComplex::new(&groups).expect("every vertex lies in some facet")
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Dimensions of `E^1_{i,j} = C_i(Δ; H_j(T_σ; F[Q]))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Table {
    pub dims: BTreeMap<(usize, usize), u64>,
}

impl E1Table {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.dims.get(&(i, j)).copied().unwrap_or(0)
    }

    /// `Σ_{j>=1} dim E^1_{i-j, j}`.
    pub fn off_row_mass(&self, i: usize) -> u64 {
        (1..=i).map(|j| self.get(i - j, j)).sum()
    }
}

/// Contribution of a single `σ` to column `|σ| - 1`: the preimage of `T_σ`
/// has `|Q| / Π_{v∈τ} n_v` components, each a torus of dimension `|τ|`.
pub fn e1_contribution(tau: &[u32], moduli: &[u64], order: u64) -> Vec<u64> {
    let image: u64 = tau.iter().map(|&v| moduli[v as usize]).product();
    let components = order / image;
    (0..=tau.len()).map(|j| components * binomial(tau.len(), j)).collect()
}

pub fn e1_dimensions(l: &SimplicialComplex, spec: &CoverSpec) -> Result<E1Table, NerveError> {
    let nerve = NerveData::new(l);
    let m = nerve.m();
    if m > MAX_E1_VERTICES {
        return Err(NerveError::TooManyFacets { m, limit: MAX_E1_VERTICES });
    }
    let moduli = spec.aligned(l)?;
    let order = spec.order().ok_or(CoverError::Budget { cells: u128::MAX, budget: 0 })?;
    let mut dims = BTreeMap::new();
    for sigma in 1u64..(1u64 << m) {
        let i = sigma.count_ones() as usize - 1;
        let tau = nerve.tau(sigma);
        for (j, d) in e1_contribution(&tau, &moduli, order).into_iter().enumerate() {
            *dims.entry((i, j)).or_insert(0) += d;
        }
    }
    Ok(E1Table { dims })
}

/// Dimensions of the kernel of the projection `E^1_{i,0} -> C_i(Δ; V_σ)`,
/// i.e. the `j = 0` mass of the faces of `𝓛`.
pub fn projection_kernel(l: &SimplicialComplex, spec: &CoverSpec) -> Result<Vec<u64>, NerveError> {
    let nerve = NerveData::new(l);
    let m = nerve.m();
    if m > MAX_E1_VERTICES {
        return Err(NerveError::TooManyFacets { m, limit: MAX_E1_VERTICES });
    }
    let moduli = spec.aligned(l)?;
    let order = spec.order().ok_or(CoverError::Budget { cells: u128::MAX, budget: 0 })?;
    let mut out = vec![0u64; m];
    for sigma in 1u64..(1u64 << m) {
        let tau = nerve.tau(sigma);
        if !tau.is_empty() {
            out[sigma.count_ones() as usize - 1] += e1_contribution(&tau, &moduli, order)[0];
        }
    }
    Ok(out)
}

/// `C_*(Δ; V_σ)` with `V_σ` a single copy of the field: degree `i` holds
/// the `(i+1)`-subsets `σ` with `τ(σ) = ∅`, with the simplicial boundary of
/// `Δ` (faces in `𝓛` carry the zero module and drop out).
///
/// The coefficient maps of `V_σ = F[Q]` are identities, so the complex with
/// coefficients in `F[Q]` is this one tensored with a `|Q|`-dimensional space.
pub fn coefficient_nerve_complex(l: &SimplicialComplex) -> Result<ChainComplex, NerveError> {
    let nerve = NerveData::new(l);
    let m = nerve.m();
    if m > MAX_DELTA_VERTICES {
        return Err(NerveError::TooManyFacets { m, limit: MAX_DELTA_VERTICES });
    }
    let mut levels: Vec<Vec<u64>> = vec![Vec::new(); m];
    for sigma in 1u64..(1u64 << m) {
        if nerve.tau(sigma).is_empty() {
            levels[sigma.count_ones() as usize - 1].push(sigma);
        }
    }
    let index: Vec<BTreeMap<u64, usize>> = levels
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, &s)| (s, i)).collect())
        .collect();
    let dims: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let mut higher = Vec::new();
    for i in 1..m {
        let columns = levels[i]
            .iter()
            .map(|&sigma| {
                let mut col = Vec::new();
                let mut pos = 0;
                for a in 0..m {
                    if sigma >> a & 1 == 1 {
                        let face = sigma & !(1 << a);
                        if let Some(&r) = index[i - 1].get(&face) {
                            col.push((r as u32, if pos % 2 == 0 { 1 } else { -1 }));
                        }
                        pos += 1;
                    }
                }
                col
            })
            .collect();
        higher.push(SparseIntMatrix::from_columns(dims[i - 1], columns).expect("indices in range"));
    }
    Ok(ChainComplex::new(dims, higher).expect("shapes chain"))
}

/// `dim H_i(Δ; V_σ)` for each degree `i`, checked against
/// `\bar b_{i-1}(L; F) · |Q|`.
pub fn coefficient_nerve_homology(
    l: &SimplicialComplex,
    spec: &CoverSpec,
    field: Field,
    seed: u64,
) -> Result<Vec<u64>, NerveError> {
    let order = spec.order().ok_or(CoverError::Budget { cells: u128::MAX, budget: 0 })?;
    spec.aligned(l)?;
    let complex = coefficient_nerve_complex(l)?;
    complex.verify_integral().map_err(CoverError::from)?;
    let dims: Vec<u64> = complex
        .betti(field, seed)
        .into_iter()
        .map(|b| b as u64 * order)
        .collect();
    let reduced = reduced_betti(l, field, seed);
    for (i, &got) in dims.iter().enumerate() {
        let want = reduced_betti_at(&reduced, i as isize - 1) as u64 * order;
        if got != want {
            return Err(NerveError::LemmaViolated { degree: i, got, want });
        }
    }
    Ok(dims)
}

/// One line of the collapse report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub complex: String,
    pub n: String,
    pub field: String,
    pub degree: usize,
    pub cover_normalized: Normalized,
    pub nerve_normalized: Normalized,
    pub e1_offrow_mass: Normalized,
    pub projection_kernel: Normalized,
}

impl CollapseRow {
    /// `b_i / |Q| - \bar b_{i-1}` as a float.
    pub fn gap(&self) -> f64 {
        self.cover_normalized.as_f64() - self.nerve_normalized.as_f64()
    }
}

/// Side-by-side normalized cover Betti numbers, coefficient-system values,
/// off-row `E^1` mass and projection kernel, one row per degree.
pub fn collapse_report(
    name: &str,
    l: &SimplicialComplex,
    spec: &CoverSpec,
    field: Field,
    opts: RunOptions,
) -> Result<Vec<CollapseRow>, NerveError> {
    let table = cover_betti(name, l, spec, field, opts)?;
    let nerve = coefficient_nerve_homology(l, spec, field, opts.seed)?;
    let e1 = e1_dimensions(l, spec)?;
    let kernel = projection_kernel(l, spec)?;
    let order = table.index;
    Ok((0..table.betti.len())
        .map(|i| CollapseRow {
            complex: name.to_string(),
            n: spec.describe(),
            field: field.to_string(),
            degree: i,
            cover_normalized: table.normalized[i],
            nerve_normalized: Normalized::new(nerve.get(i).copied().unwrap_or(0), order),
            e1_offrow_mass: Normalized::new(e1.off_row_mass(i), order),
            projection_kernel: Normalized::new(kernel.get(i).copied().unwrap_or(0), order),
        })
        .collect())
}
