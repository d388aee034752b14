//! Finite chain complexes of free modules given by integer boundary matrices.

use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::linalg::{rank_over, Field, MatrixError, PrimeSampler, SparseIntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("boundary {degree} has shape {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape {
        degree: usize,
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("boundary composition {0} -> {1} is nonzero")]
    NotAComplex(usize, usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Graded cell counts with boundary maps; `boundaries[k]` sends degree `k`
/// to degree `k - 1` and `boundaries[0]` is the zero map out of degree 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    boundaries: Vec<SparseIntMatrix>,
}

impl ChainComplex {
    /// Takes `boundaries[k]` for `k = 1..=top`; shapes must chain.
    pub fn new(dims: Vec<usize>, higher: Vec<SparseIntMatrix>) -> Result<Self, ChainError> {
        let mut boundaries = Vec::with_capacity(dims.len());
        if !dims.is_empty() {
            boundaries.push(SparseIntMatrix::zeros(0, dims[0]));
        }
        for (k, b) in higher.into_iter().enumerate() {
            let degree = k + 1;
            let (want_rows, want_cols) = (dims[degree - 1], dims.get(degree).copied().unwrap_or(0));
            if b.rows() != want_rows || b.cols() != want_cols {
                return Err(ChainError::Shape {
                    degree,
                    rows: b.rows(),
                    cols: b.cols(),
                    want_rows,
                    want_cols,
                });
            }
            boundaries.push(b);
        }
        if boundaries.len() != dims.len() {
            return Err(ChainError::Shape {
                degree: boundaries.len(),
                rows: 0,
                cols: 0,
                want_rows: 0,
                want_cols: 0,
            });
        }
        Ok(Self { dims, boundaries })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Top degree plus one.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Boundary out of degree `k`; zero beyond the top.
    pub fn boundary(&self, k: usize) -> std::borrow::Cow<'_, SparseIntMatrix> {
        match self.boundaries.get(k) {
            Some(b) => std::borrow::Cow::Borrowed(b),
            None => std::borrow::Cow::Owned(SparseIntMatrix::zeros(
                self.dims.get(k - 1).copied().unwrap_or(0),
                0,
            )),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Checks `∂_{k-1} ∂_k = 0` over the integers.
    pub fn verify_integral(&self) -> Result<(), ChainError> {
        for k in 2..self.boundaries.len() {
            if !self.boundaries[k - 1].mul(&self.boundaries[k])?.is_zero() {
                return Err(ChainError::NotAComplex(k, k - 2));
            }
        }
        Ok(())
    }

    /// Checks `∂∂ = 0` modulo random large primes drawn from `seed`.
    pub fn verify_modular(&self, seed: u64, primes: usize) -> Result<(), ChainError> {
        let mut sampler = PrimeSampler::new(seed);
        let ps: Vec<_> = (0..primes).map(|_| sampler.next_prime()).collect();
        for k in 2..self.boundaries.len() {
            let (a, b) = (&self.boundaries[k - 1], &self.boundaries[k]);
            for f in &ps {
                let p = f.p() as i64;
                let reduce = |m: &SparseIntMatrix| {
                    SparseIntMatrix::from_triplets(
                        m.rows(),
                        m.cols(),
                        m.triplets().map(|(r, c, v)| (r, c, v.rem_euclid(p))),
                    )
                };
                let prod = reduce(a)?.mul(&reduce(b)?)?;
                if prod.triplets().any(|(_, _, v)| v.rem_euclid(p) != 0) {
                    return Err(ChainError::NotAComplex(k, k - 2));
                }
            }
        }
        Ok(())
    }

    /// Ranks of `∂_0, ..., ∂_top`, computed on up to `threads` threads.
    pub fn ranks(&self, field: Field, seed: u64, threads: usize) -> Vec<usize> {
        let n = self.boundaries.len();
        let mut out = vec![0usize; n];
        let threads = threads.max(1);
        // largest matrices first so workers stay balanced
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(self.boundaries[k].nnz()));
        if threads == 1 {
            for k in order {
                out[k] = rank_over(&self.boundaries[k], field, seed);
            }
            return out;
        }
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results = std::sync::Mutex::new(&mut out);
        std::thread::scope(|s| {
            for _ in 0..threads.min(n) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    let Some(&k) = order.get(i) else { break };
                    let r = rank_over(&self.boundaries[k], field, seed);
                    results.lock().expect("rank worker panicked")[k] = r;
                });
            }
        });
        out
    }

    pub fn betti_from_ranks(&self, ranks: &[usize]) -> Vec<usize> {
        (0..self.dims.len())
            .map(|k| self.dims[k] - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0))
            .collect()
    }

    pub fn betti(&self, field: Field, seed: u64) -> Vec<usize> {
        self.betti_threads(field, seed, 1)
    }

    pub fn betti_threads(&self, field: Field, seed: u64, threads: usize) -> Vec<usize> {
        let ranks = self.ranks(field, seed, threads);
        self.betti_from_ranks(&ranks)
    }

    /// Subcomplex on the cells flagged in `keep[k]`; the selection must be
    /// closed under taking boundaries.
    pub fn subcomplex(&self, keep: &[Vec<bool>]) -> Result<ChainComplex, ChainError> {
        let selected: Vec<Vec<usize>> = (0..self.dims.len())
            .map(|k| (0..self.dims[k]).filter(|&i| keep[k][i]).collect())
            .collect();
        let dims = selected.iter().map(|s| s.len()).collect();
        let mut higher = Vec::new();
        for k in 1..self.dims.len() {
            let b = &self.boundaries[k];
            for &c in &selected[k] {
                if let Some((r, _)) = b.column(c).find(|&(r, _)| !keep[k - 1][r as usize]) {
                    return Err(ChainError::Matrix(MatrixError::Shape(format!(
                        "cell {c} in degree {k} has boundary cell {r} outside the selection"
                    ))));
                }
            }
            higher.push(b.select(&selected[k - 1], &selected[k]));
        }
        ChainComplex::new(dims, higher)
    }
}

/// Augmented simplicial chain complex: degree `k` holds the faces with `k`
/// vertices, so degree 0 is the empty face and homology in degree `k` is
/// the reduced homology of the complex in dimension `k - 1`.
pub fn augmented_chain_complex(c: &SimplicialComplex) -> ChainComplex {
    let table = c.face_table();
    let dims = table.counts();
    let mut higher = Vec::new();
    for k in 1..dims.len() {
        let columns = table
            .level(k)
            .iter()
            .map(|face| {
                (0..face.len())
                    .map(|i| {
                        let mut sub = face.clone();
                        sub.remove(i);
                        let row = table.index_of(&sub).expect("faces closed under subsets");
                        (row as u32, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        higher.push(SparseIntMatrix::from_columns(dims[k - 1], columns).expect("indices in range"));
    }
    ChainComplex::new(dims, higher).expect("simplicial boundary shapes chain")
}

/// Reduced Betti numbers `\bar b_0, ..., \bar b_dim`.
pub fn reduced_betti(c: &SimplicialComplex, field: Field, seed: u64) -> Vec<usize> {
    let b = augmented_chain_complex(c).betti(field, seed);
    b.into_iter().skip(1).collect()
}

/// Reduced Betti number in dimension `d >= -1` (zero outside the range).
pub fn reduced_betti_at(betti: &[usize], d: isize) -> usize {
    usize::try_from(d).ok().and_then(|i| betti.get(i).copied()).unwrap_or(0)
}
