//! The cube complex `Y_L ⊂ [-1,1]^V` classifying the commutator subgroup
//! of the right-angled Coxeter group `W_L`.
//!
//! Cells are pairs `(ε, σ)` with `σ` a face of `L` (the empty face included)
//! and `ε` a sign vector on `V - σ`. In degree `k` the cell id is
//! `face index * 2^(|V|-k) + code(ε)`, where `code` packs the signs of the
//! vertices outside `σ` in vertex order (bit set means `+1`).

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{reduced_betti, ChainComplex, ChainError};
use crate::complex::{FaceTable, SimplicialComplex};
use crate::linalg::{rank_over, Field, PrimeField, SparseIntMatrix};
use crate::salvetti::{BettiTable, CoverSpec, Normalized, RunOptions};

/// Vertex links are checked at every vertex up to this many, else at an
/// evenly spaced sample of this size.
pub const LINK_CHECK_ALL: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DavisError {
    #[error("cell budget exceeded: {cells} cells in one degree, budget {budget}")]
    Budget { cells: u128, budget: u64 },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex link at cell {0} is not a copy of L")]
    BadLink(usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Debug, Clone)]
pub struct DavisComplex {
    pub base: SimplicialComplex,
    pub faces: FaceTable,
    pub chain: ChainComplex,
}

fn sign_code(mask: u64, face: &[u32], n: usize) -> usize {
    let mut code = 0usize;
    let mut bit = 0;
    let mut fi = 0;
    for v in 0..n as u32 {
        if fi < face.len() && face[fi] == v {
            fi += 1;
            continue;
        }
        if mask >> v & 1 == 1 {
            code |= 1 << bit;
        }
        bit += 1;
    }
    code
}

fn sign_mask(code: usize, face: &[u32], n: usize) -> u64 {
    let mut mask = 0u64;
    let mut bit = 0;
    let mut fi = 0;
    for v in 0..n as u32 {
        if fi < face.len() && face[fi] == v {
            fi += 1;
            continue;
        }
        if code >> bit & 1 == 1 {
            mask |= 1 << v;
        }
        bit += 1;
    }
    mask
}

impl DavisComplex {
    pub fn num_vertices_of_base(&self) -> usize {
        self.base.num_vertices()
    }

    /// `(sign mask over V with σ bits clear, σ)` for a cell id.
    pub fn cell(&self, k: usize, id: usize) -> (u64, &[u32]) {
        let n = self.base.num_vertices();
        let per = 1usize << (n - k);
        let face = &self.faces.level(k)[id / per];
        (sign_mask(id % per, face, n), face)
    }

    pub fn cell_id(&self, mask: u64, face: &[u32]) -> usize {
        let n = self.base.num_vertices();
        let k = face.len();
        self.faces.index_of(face).expect("face of L") * (1usize << (n - k)) + sign_code(mask, face, n)
    }

    /// Cell selection for `Y_A`: cells whose face satisfies `keep`.
    pub fn select(&self, keep: impl Fn(&[u32]) -> bool) -> Vec<Vec<bool>> {
        let n = self.base.num_vertices();
        (0..self.chain.len())
            .map(|k| {
                let per = 1usize << (n - k);
                self.faces
                    .level(k)
                    .iter()
                    .flat_map(|f| std::iter::repeat_n(keep(f), per))
                    .collect()
            })
            .collect()
    }

    /// Checks that the link of each (sampled) vertex is a copy of `L`.
    pub fn verify_vertex_links(&self) -> Result<usize, DavisError> {
        let nverts = self.chain.dims()[0];
        let step = if nverts <= LINK_CHECK_ALL { 1 } else { nverts / LINK_CHECK_ALL };
        let closure = self.vertex_sets();
        let mut checked = 0;
        for x in (0..nverts).step_by(step) {
            if self.link_at(x, &closure) != self.base {
                return Err(DavisError::BadLink(x));
            }
            checked += 1;
        }
        Ok(checked)
    }

    /// Vertex sets of every cell, read off the boundary matrices.
    fn vertex_sets(&self) -> Vec<Vec<BTreeSet<u32>>> {
        let mut sets: Vec<Vec<BTreeSet<u32>>> =
            vec![(0..self.chain.dims()[0] as u32).map(|x| BTreeSet::from([x])).collect()];
        for k in 1..self.chain.len() {
            let b = self.chain.boundary(k);
            let level = (0..b.cols())
                .map(|c| {
                    b.column(c)
                        .flat_map(|(r, _)| sets[k - 1][r as usize].iter().copied())
                        .collect()
                })
                .collect();
            sets.push(level);
        }
        sets
    }

    /// The link at vertex cell `x`, its vertices labelled by the direction
    /// of the incident edge.
    fn link_at(&self, x: usize, sets: &[Vec<BTreeSet<u32>>]) -> SimplicialComplex {
        if self.chain.len() < 2 {
            return SimplicialComplex::void();
        }
        let edges: Vec<(usize, &BTreeSet<u32>)> = sets[1]
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(&(x as u32)))
            .collect();
        let direction = |e: usize| self.cell(1, e).1[0];
        let mut facets: Vec<Vec<u32>> = Vec::new();
        for k in 1..self.chain.len() {
            for cube in sets[k].iter().filter(|s| s.contains(&(x as u32))) {
                let simplex: Vec<u32> = edges
                    .iter()
                    .filter(|(_, ev)| ev.is_subset(cube))
                    .map(|&(e, _)| direction(e))
                    .collect();
                facets.push(simplex);
            }
        }
        let names: Vec<Vec<String>> = facets.iter().map(|f| self.base.names_of(f)).collect();
        if names.is_empty() {
            return SimplicialComplex::void();
        }
        SimplicialComplex::new(&names).expect("link faces are nonempty")
    }
}

fn budget_check(l: &SimplicialComplex, faces: &FaceTable, budget: u64) -> Result<(), DavisError> {
    let n = l.num_vertices();
    let widest = (0..faces.num_levels())
        .map(|k| (faces.level(k).len() as u128) << (n - k))
        .max()
        .unwrap_or(0);
    if n >= 63 || widest > budget as u128 {
        return Err(DavisError::Budget { cells: widest, budget });
    }
    Ok(())
}

/// Builds `Y_L` with `∂(ε,σ) = Σ_j (-1)^(j-1) [(ε ∪ {v_j ↦ +1}, σ - v_j) - (ε ∪ {v_j ↦ -1}, σ - v_j)]`.
pub fn build_davis(l: &SimplicialComplex, budget: u64) -> Result<DavisComplex, DavisError> {
    let faces = l.face_table();
    budget_check(l, &faces, budget)?;
    let n = l.num_vertices();
    let counts = faces.counts();
    let dims: Vec<usize> = counts.iter().enumerate().map(|(k, &f)| f << (n - k)).collect();
    let mut higher = Vec::new();
    for k in 1..counts.len() {
        let per = 1usize << (n - k);
        let per_lower = 1usize << (n - k + 1);
        let mut columns = Vec::with_capacity(dims[k]);
        for face in faces.level(k) {
            for code in 0..per {
                let mask = sign_mask(code, face, n);
                let mut col = Vec::with_capacity(2 * k);
                for (j, &v) in face.iter().enumerate() {
                    let mut sub = face.clone();
                    sub.remove(j);
                    let base = faces.index_of(&sub).expect("faces closed under subsets") * per_lower;
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    let plus = base + sign_code(mask | 1 << v, &sub, n);
                    let minus = base + sign_code(mask, &sub, n);
                    col.push((plus as u32, sign));
                    col.push((minus as u32, -sign));
                }
                columns.push(col);
            }
        }
        higher.push(SparseIntMatrix::from_columns(dims[k - 1], columns).map_err(ChainError::from)?);
    }
    let chain = ChainComplex::new(dims, higher)?;
    chain.verify_integral()?;
    let davis = DavisComplex {
        base: l.clone(),
        faces,
        chain,
    };
    davis.verify_vertex_links()?;
    Ok(davis)
}

/// Betti numbers of `Y_L`, normalized by `|W_L : C_L| = 2^|V|`.
pub fn davis_betti(
    name: &str,
    l: &SimplicialComplex,
    field: Field,
    opts: RunOptions,
) -> Result<BettiTable, DavisError> {
    let start = Instant::now();
    let y = build_davis(l, opts.budget)?;
    let betti = y.chain.betti_threads(field, opts.seed, opts.threads);
    let index = 1u64 << l.num_vertices();
    Ok(BettiTable {
        complex: name.to_string(),
        spec: CoverSpec::uniform(l, 2),
        index,
        field,
        normalized: betti.iter().map(|&b| Normalized::new(b as u64, index)).collect(),
        betti,
        target: Vec::new(),
        seed: opts.seed,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Homology data of one piece of the Mayer-Vietoris decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceHomology {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub betti: Vec<usize>,
}

/// Outcome of [`mv_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MvReport {
    pub vertex: String,
    pub field: Field,
    pub star: PieceHomology,
    pub deletion: PieceHomology,
    pub link: PieceHomology,
    pub whole: PieceHomology,
    /// Rank of `H_i(Y_Lk) -> H_i(Y_St) ⊕ H_i(Y_{L-v})`.
    pub alpha_rank: Vec<usize>,
    /// Rank of `H_i(Y_Lk) -> H_i(Y_St)`.
    pub link_to_star_rank: Vec<usize>,
    pub alternating_sum: i64,
    pub exact: bool,
    pub surjective: bool,
}

fn piece(chain: &ChainComplex, field: Field, seed: u64) -> PieceHomology {
    let ranks = chain.ranks(field, seed, 1);
    PieceHomology {
        dims: chain.dims().to_vec(),
        betti: chain.betti_from_ranks(&ranks),
        ranks,
    }
}

/// Mayer-Vietoris check for `L = St(v) ∪_{Lk(v)} (L - v)` inside `Y_L`.
///
/// The rank of `α = (i_1, -i_2)` in degree `i` is
/// `z_i(Lk) - r(∂^St_{i+1}) - r(∂^{L-v}_{i+1}) + r(∂^L_{i+1})`, and the rank of an
/// inclusion-induced map `H_i(X) -> H_i(Y)` is
/// `z_i(X) - r(∂^Y_{i+1}) + r(P ∂^Y_{i+1})` with `P` the projection onto the
/// cells of `Y - X`. Exactness is then checked degree by degree.
pub fn mv_check(l: &SimplicialComplex, v: &str, field: Field, opts: RunOptions) -> Result<MvReport, DavisError> {
    let vi = l.vertex_index(v).ok_or_else(|| DavisError::UnknownVertex(v.to_string()))?;
    let y = build_davis(l, opts.budget)?;
    let whole = piece(&y.chain, field, opts.seed);
    mv_at(&y, &whole, vi, field, opts)
}

/// [`mv_check`] at every vertex, sharing `Y_L` and its homology.
pub fn mv_check_all(l: &SimplicialComplex, field: Field, opts: RunOptions) -> Result<Vec<MvReport>, DavisError> {
    let y = build_davis(l, opts.budget)?;
    let whole = piece(&y.chain, field, opts.seed);
    (0..l.num_vertices() as u32)
        .map(|vi| mv_at(&y, &whole, vi, field, opts))
        .collect()
}

fn mv_at(
    y: &DavisComplex,
    whole: &PieceHomology,
    vi: u32,
    field: Field,
    opts: RunOptions,
) -> Result<MvReport, DavisError> {
    let l = &y.base;
    let v = &l.vertices()[vi as usize];
    let in_star = |f: &[u32]| {
        let mut g = f.to_vec();
        if !g.contains(&vi) {
            g.push(vi);
            g.sort_unstable();
        }
        l.contains_face(&g)
    };
    let keep_star = y.select(in_star);
    let keep_del = y.select(|f| !f.contains(&vi));
    let keep_link = y.select(|f| in_star(f) && !f.contains(&vi));
    let star_c = y.chain.subcomplex(&keep_star)?;
    let del_c = y.chain.subcomplex(&keep_del)?;
    let link_c = y.chain.subcomplex(&keep_link)?;
    let seed = opts.seed;
    let (star, deletion, link) = (
        piece(&star_c, field, seed),
        piece(&del_c, field, seed),
        piece(&link_c, field, seed),
    );
    let top = y.chain.len();
    let r = |p: &PieceHomology, k: usize| p.ranks.get(k).copied().unwrap_or(0);
    let cycles = |p: &PieceHomology, k: usize| p.dims[k] - r(p, k);
    let alpha_rank: Vec<usize> = (0..top)
        .map(|k| cycles(&link, k) + r(whole, k + 1) - r(&star, k + 1) - r(&deletion, k + 1))
        .collect();
    // inclusion Lk -> St: project star boundaries away from link cells
    let link_to_star_rank: Vec<usize> = (0..top)
        .map(|k| {
            if k + 1 >= top {
                return cycles(&link, k);
            }
            let b = star_c.boundary(k + 1);
            let link_in_star: Vec<bool> = keep_star[k]
                .iter()
                .zip(&keep_link[k])
                .filter(|(s, _)| **s)
                .map(|(_, l)| *l)
                .collect();
            let outside: Vec<usize> = (0..b.rows()).filter(|&i| !link_in_star[i]).collect();
            let all_cols: Vec<usize> = (0..b.cols()).collect();
            let projected = rank_over(&b.select(&outside, &all_cols), field, seed);
            cycles(&link, k) + projected - r(&star, k + 1)
        })
        .collect();
    let mut exact = true;
    for k in 0..top {
        let middle = star.betti[k] + deletion.betti[k];
        if alpha_rank[k] > link.betti[k] || alpha_rank[k] > middle {
            exact = false;
            continue;
        }
        let beta = middle - alpha_rank[k];
        if beta > whole.betti[k] {
            exact = false;
            continue;
        }
        let delta = whole.betti[k] - beta;
        let expected_delta = if k == 0 { 0 } else { link.betti[k - 1] - alpha_rank[k - 1] };
        exact &= delta == expected_delta;
    }
    // the connecting map out of the top degree must hit the kernel of α
    exact &= link.betti[top - 1] == alpha_rank[top - 1];
    let alternating_sum = (0..top)
        .map(|k| {
            let s = link.betti[k] as i64 - (star.betti[k] + deletion.betti[k]) as i64 + whole.betti[k] as i64;
            if k % 2 == 0 { s } else { -s }
        })
        .sum();
    let surjective = (0..top).all(|k| link_to_star_rank[k] == star.betti[k]);
    Ok(MvReport {
        vertex: v.to_string(),
        field,
        star,
        deletion,
        link,
        whole: whole.clone(),
        alpha_rank,
        link_to_star_rank,
        alternating_sum,
        exact,
        surjective,
    })
}

/// True iff `H_d(L; F_2) = 0` for `d = dim L`.
pub fn embedding_criterion(l: &SimplicialComplex) -> bool {
    let f2 = Field::Prime(PrimeField::new(2).expect("2 is prime"));
    reduced_betti(l, f2, 0).last().copied().unwrap_or(0) == 0
}
