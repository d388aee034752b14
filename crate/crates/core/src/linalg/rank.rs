//! Rank over prime fields.
//!
//! Sparse structured elimination with Markowitz pivot selection runs until
//! the cheapest available pivot would cause too much fill; the remaining
//! Schur complement is then finished densely (packed 64-bit words for
//! `p = 2`, `u32` rows with 64-bit products otherwise).

use std::collections::BTreeSet;

use log::debug;

use super::field::PrimeField;
use super::sparse::SparseIntMatrix;

/// Tuning knobs for [`gfp_rank_with`].
#[derive(Debug, Clone, Copy)]
pub struct EliminationParams {
    /// Largest Markowitz cost `(r-1)(c-1)` accepted in the sparse phase.
    pub max_markowitz: u64,
    /// Switch to dense once the active part has at least this density.
    pub dense_switch_density: f64,
}

impl Default for EliminationParams {
    fn default() -> Self {
        Self {
            max_markowitz: 4096,
            dense_switch_density: 0.05,
        }
    }
}

/// Rank of `m` reduced modulo `p`.
pub fn gfp_rank(m: &SparseIntMatrix, f: PrimeField) -> usize {
    gfp_rank_with(m, f, EliminationParams::default())
}

pub fn gfp_rank_with(m: &SparseIntMatrix, f: PrimeField, params: EliminationParams) -> usize {
    let vectors: Vec<Vec<(u32, u32)>> = (0..m.cols())
        .map(|c| {
            m.column(c)
                .filter_map(|(r, v)| {
                    let x = f.reduce(v);
                    (x != 0).then_some((r, x))
                })
                .collect()
        })
        .collect();
    let mut elim = SparseElimination::new(vectors, m.rows(), f);
    elim.run(params);
    let sparse_rank = elim.rank;
    let (rest, ncoords) = elim.into_active();
    let dense_rank = if rest.is_empty() {
        0
    } else if f.p() == 2 {
        dense_rank_gf2(&rest, ncoords)
    } else {
        dense_rank_gfp(&rest, ncoords, f)
    };
    sparse_rank + dense_rank
}

struct SparseElimination {
    field: PrimeField,
    vecs: Vec<Vec<(u32, u32)>>,
    alive: Vec<bool>,
    coord_count: Vec<u32>,
    coord_vecs: Vec<Vec<u32>>,
    by_count: BTreeSet<(u32, u32)>,
    by_weight: BTreeSet<(u32, u32)>,
    nnz: usize,
    live_vecs: usize,
    live_coords: usize,
    rank: usize,
    scratch: Vec<(u32, u32)>,
}

impl SparseElimination {
    fn new(vecs: Vec<Vec<(u32, u32)>>, ncoords: usize, field: PrimeField) -> Self {
        let mut coord_count = vec![0u32; ncoords];
        let mut coord_vecs = vec![Vec::new(); ncoords];
        let mut alive = vec![false; vecs.len()];
        let mut by_weight = BTreeSet::new();
        let mut nnz = 0;
        let mut live_vecs = 0;
        for (i, v) in vecs.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            alive[i] = true;
            live_vecs += 1;
            nnz += v.len();
            by_weight.insert((v.len() as u32, i as u32));
            for &(c, _) in v {
                coord_count[c as usize] += 1;
                coord_vecs[c as usize].push(i as u32);
            }
        }
        let by_count: BTreeSet<(u32, u32)> = coord_count
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(c, &n)| (n, c as u32))
            .collect();
        let live_coords = by_count.len();
        Self {
            field,
            vecs,
            alive,
            coord_count,
            coord_vecs,
            by_count,
            by_weight,
            nnz,
            live_vecs,
            live_coords,
            rank: 0,
            scratch: Vec::new(),
        }
    }

    fn set_count(&mut self, c: u32, new: u32) {
        let old = self.coord_count[c as usize];
        if old == new {
            return;
        }
        if old > 0 {
            self.by_count.remove(&(old, c));
        } else {
            self.live_coords += 1;
        }
        if new > 0 {
            self.by_count.insert((new, c));
        } else {
            self.live_coords -= 1;
            self.coord_vecs[c as usize].clear();
        }
        self.coord_count[c as usize] = new;
    }

    fn entry(&self, v: u32, c: u32) -> Option<u32> {
        let vec = &self.vecs[v as usize];
        vec.binary_search_by_key(&c, |&(k, _)| k).ok().map(|i| vec[i].1)
    }

    /// Live vectors currently holding coordinate `c`, in increasing order.
    fn holders(&mut self, c: u32) -> Vec<u32> {
        let mut list = std::mem::take(&mut self.coord_vecs[c as usize]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&v| self.alive[v as usize] && self.entry(v, c).is_some());
        self.coord_vecs[c as usize] = list.clone();
        list
    }

    /// Picks the cheapest pivot among the sparsest coordinate and the lightest vector.
    fn choose(&mut self) -> Option<(u64, u32, u32)> {
        let &(cnt, c) = self.by_count.iter().next()?;
        let holders = self.holders(c);
        let v = *holders
            .iter()
            .min_by_key(|&&v| (self.vecs[v as usize].len(), v))
            .expect("live coordinate has a holder");
        let w = self.vecs[v as usize].len() as u64;
        let cost_a = (w - 1) * (cnt as u64 - 1);
        let best_a = (cost_a, v, c);
        let &(w2, v2) = self.by_weight.iter().next()?;
        let c2 = self.vecs[v2 as usize]
            .iter()
            .map(|&(k, _)| k)
            .min_by_key(|&k| (self.coord_count[k as usize], k))
            .expect("live vector is nonempty");
        let cost_b = (w2 as u64 - 1) * (self.coord_count[c2 as usize] as u64 - 1);
        Some(if cost_b < cost_a { (cost_b, v2, c2) } else { best_a })
    }

    fn run(&mut self, params: EliminationParams) {
        while self.live_vecs > 0 {
            let Some((cost, v, c)) = self.choose() else { break };
            if cost > 0 {
                let area = self.live_vecs as f64 * self.live_coords as f64;
                let density = self.nnz as f64 / area;
                if cost > params.max_markowitz || density >= params.dense_switch_density {
                    debug!(
                        "dense switch: {} x {} active, nnz {}, cost {}",
                        self.live_vecs, self.live_coords, self.nnz, cost
                    );
                    break;
                }
            }
            self.pivot(v, c);
        }
    }

    fn pivot(&mut self, pv: u32, pc: u32) {
        let f = self.field;
        let pivot_val = self.entry(pv, pc).expect("pivot entry present");
        let inv = f.inv(pivot_val);
        let targets = self.holders(pc);
        let pivot_vec = std::mem::take(&mut self.vecs[pv as usize]);
        for &k in targets.iter().filter(|&&k| k != pv) {
            let factor = f.mul(self.entry(k, pc).expect("holder has entry"), inv);
            let old_len = self.vecs[k as usize].len() as u32;
            self.axpy(k, factor, &pivot_vec);
            let new_len = self.vecs[k as usize].len() as u32;
            self.by_weight.remove(&(old_len, k));
            self.nnz = self.nnz + new_len as usize - old_len as usize;
            if new_len == 0 {
                self.alive[k as usize] = false;
                self.live_vecs -= 1;
            } else {
                self.by_weight.insert((new_len, k));
            }
        }
        self.by_weight.remove(&(pivot_vec.len() as u32, pv));
        self.alive[pv as usize] = false;
        self.live_vecs -= 1;
        self.nnz -= pivot_vec.len();
        for &(c, _) in &pivot_vec {
            let n = self.coord_count[c as usize] - 1;
            self.set_count(c, n);
        }
        debug_assert_eq!(self.coord_count[pc as usize], 0);
        self.rank += 1;
    }

    /// `vecs[k] -= factor * pivot`, keeping counts and holder lists current.
    fn axpy(&mut self, k: u32, factor: u32, pivot: &[(u32, u32)]) {
        let f = self.field;
        let target = std::mem::take(&mut self.vecs[k as usize]);
        let out = &mut self.scratch;
        out.clear();
        out.reserve(target.len() + pivot.len());
        let (mut i, mut j) = (0, 0);
        let mut dropped: Vec<u32> = Vec::new();
        let mut added: Vec<u32> = Vec::new();
        while i < target.len() || j < pivot.len() {
            let ti = target.get(i).map_or(u32::MAX, |e| e.0);
            let pj = pivot.get(j).map_or(u32::MAX, |e| e.0);
            if ti < pj {
                out.push(target[i]);
                i += 1;
            } else if pj < ti {
                let val = f.sub(0, f.mul(factor, pivot[j].1));
                out.push((pj, val));
                added.push(pj);
                j += 1;
            } else {
                let val = f.sub(target[i].1, f.mul(factor, pivot[j].1));
                if val != 0 {
                    out.push((ti, val));
                } else {
                    dropped.push(ti);
                }
                i += 1;
                j += 1;
            }
        }
        self.vecs[k as usize] = out.clone();
        for c in dropped {
            let n = self.coord_count[c as usize] - 1;
            self.set_count(c, n);
        }
        for c in added {
            let n = self.coord_count[c as usize] + 1;
            self.set_count(c, n);
            self.coord_vecs[c as usize].push(k);
        }
    }

    /// Remaining live vectors with coordinates renumbered densely.
    fn into_active(self) -> (Vec<Vec<(u32, u32)>>, usize) {
        let mut remap = vec![u32::MAX; self.coord_count.len()];
        let mut next = 0u32;
        for (c, &n) in self.coord_count.iter().enumerate() {
            if n > 0 {
                remap[c] = next;
                next += 1;
            }
        }
        let rest = self
            .vecs
            .into_iter()
            .zip(self.alive)
            .filter(|(_, a)| *a)
            .map(|(v, _)| v.into_iter().map(|(c, x)| (remap[c as usize], x)).collect())
            .collect();
        (rest, next as usize)
    }
}

/// Dense rank over GF(2) with rows packed into 64-bit words.
pub(crate) fn dense_rank_gf2(rows: &[Vec<(u32, u32)>], ncols: usize) -> usize {
    let words = ncols.div_ceil(64);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut w = vec![0u64; words];
            for &(c, x) in r {
                if x & 1 == 1 {
                    w[c as usize / 64] ^= 1 << (c % 64);
                }
            }
            w
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let (wi, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..m.len()).find(|&i| m[i][wi] & bit != 0) else {
            continue;
        };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot = &head[rank][wi..];
        for row in tail.iter_mut() {
            if row[wi] & bit != 0 {
                for (a, b) in row[wi..].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Dense rank over `F_p` by forward elimination on `u32` rows.
pub(crate) fn dense_rank_gfp(rows: &[Vec<(u32, u32)>], ncols: usize, f: PrimeField) -> usize {
    let p = f.p() as u64;
    let mut m: Vec<Vec<u32>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![0u32; ncols];
            for &(c, x) in r {
                d[c as usize] = x;
            }
            d
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = f.inv(m[rank][col]);
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot = &head[rank][col..];
        for row in tail.iter_mut() {
            let x = row[col];
            if x == 0 {
                continue;
            }
            let neg = p - f.mul(x, inv) as u64;
            for (a, &b) in row[col..].iter_mut().zip(pivot) {
                *a = ((*a as u64 + neg * b as u64) % p) as u32;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
