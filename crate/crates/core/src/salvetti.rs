//! Salvetti complexes of right-angled Artin groups and their finite abelian
//! covers.
//!
//! For a cover spec `n: V -> Z>=1` the quotient is `Q = Π_v Z/n_v` and the
//! cover of the Salvetti complex has one cell `(q, σ)` for every `q ∈ Q` and
//! every face `σ` of `L` (the empty face included), of dimension `|σ|`. With
//! `σ = {v_1 < ... < v_k}` the boundary is
//!
//! ```text
//! ∂(q, σ) = Σ_j (-1)^(j-1) [ (q + e_{v_j}, σ - v_j) - (q, σ - v_j) ]
//! ```
//!
//! Elements of `Q` are encoded in mixed radix over the vertex order and the
//! cell id in degree `k` is `q * f_{k-1} + face index`.

use std::collections::BTreeMap;
use std::time::Instant;

use log::{info, warn};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{reduced_betti, reduced_betti_at, ChainComplex, ChainError};
use crate::complex::{FaceTable, SimplicialComplex};
use crate::linalg::{Field, PrimeField, SparseIntMatrix};

/// Default limit on the number of cells in any single degree.
pub const DEFAULT_CELL_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("cell budget exceeded: {cells} cells in one degree, budget {budget}")]
    Budget { cells: u128, budget: u64 },
    #[error("unknown vertex {0:?} in cover spec")]
    UnknownVertex(String),
    #[error("cover spec misses vertex {0:?}")]
    MissingVertex(String),
    #[error("exponent for {0:?} must be at least 1")]
    BadExponent(String),
    #[error("character value {value} for vertex {vertex:?} is not a root of unity of order dividing {order} in F_{p}")]
    BadCharacter {
        vertex: String,
        value: u32,
        order: u64,
        p: u32,
    },
    #[error("field/exponent incompatibility: {0}")]
    Incompatible(String),
    #[error("negative torsion rank in degree {degree}: inconsistent Betti numbers")]
    NegativeTorsion { degree: usize },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Exponents `n_v >= 1` defining `Q = Π_v Z/n_v`, indexed by vertex name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverSpec {
    pub exponents: BTreeMap<String, u64>,
}

impl CoverSpec {
    pub fn uniform(l: &SimplicialComplex, n: u64) -> Self {
        Self {
            exponents: l.vertices().iter().map(|v| (v.clone(), n)).collect(),
        }
    }

    /// Exponents aligned with the vertex order of `l`.
    pub fn aligned(&self, l: &SimplicialComplex) -> Result<Vec<u64>, CoverError> {
        if let Some(v) = self.exponents.keys().find(|v| l.vertex_index(v).is_none()) {
            return Err(CoverError::UnknownVertex(v.clone()));
        }
        l.vertices()
            .iter()
            .map(|v| match self.exponents.get(v) {
                None => Err(CoverError::MissingVertex(v.clone())),
                Some(0) => Err(CoverError::BadExponent(v.clone())),
                Some(&n) => Ok(n),
            })
            .collect()
    }

    /// `|Q|`, or `None` when it overflows 64 bits.
    pub fn order(&self) -> Option<u64> {
        self.exponents.values().try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }

    /// The common exponent if all are equal.
    pub fn uniform_value(&self) -> Option<u64> {
        let mut it = self.exponents.values();
        let first = *it.next()?;
        it.all(|&n| n == first).then_some(first)
    }

    /// Short description: the common exponent, or `v=n` pairs.
    pub fn describe(&self) -> String {
        match self.uniform_value() {
            Some(n) => n.to_string(),
            None => self
                .exponents
                .iter()
                .map(|(v, n)| format!("{v}={n}"))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

/// Mixed-radix arithmetic on `Q = Π Z/n_v`.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    moduli: Vec<u64>,
    strides: Vec<u64>,
    order: u64,
}

impl QuotientGroup {
    pub fn new(moduli: Vec<u64>) -> Option<Self> {
        let mut strides = Vec::with_capacity(moduli.len());
        let mut order = 1u64;
        for &n in &moduli {
            strides.push(order);
            order = order.checked_mul(n)?;
        }
        Some(Self { moduli, strides, order })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn digit(&self, q: u64, v: usize) -> u64 {
        (q / self.strides[v]) % self.moduli[v]
    }

    /// `q + e_v`.
    pub fn shift(&self, q: u64, v: usize) -> u64 {
        let d = self.digit(q, v);
        if d + 1 == self.moduli[v] {
            q - d * self.strides[v]
        } else {
            q + self.strides[v]
        }
    }
}

/// The cover chain complex together with its cell indexing.
#[derive(Debug, Clone)]
pub struct CoverComplex {
    pub chain: ChainComplex,
    pub faces: FaceTable,
    pub group: QuotientGroup,
}

impl CoverComplex {
    /// Decodes a cell id in degree `k` into `(q, σ)`.
    pub fn cell(&self, k: usize, id: usize) -> (u64, &[u32]) {
        let f = self.faces.level(k).len();
        ((id / f) as u64, &self.faces.level(k)[id % f])
    }

    pub fn cell_id(&self, q: u64, face: &[u32]) -> usize {
        let k = face.len();
        q as usize * self.faces.level(k).len() + self.faces.index_of(face).expect("face of L")
    }
}

fn check_budget(group_order: u64, faces: &FaceTable, budget: u64) -> Result<(), CoverError> {
    let widest = faces.counts().into_iter().max().unwrap_or(0) as u128;
    let cells = group_order as u128 * widest;
    if cells > budget as u128 {
        return Err(CoverError::Budget { cells, budget });
    }
    Ok(())
}

/// Builds the chain complex of the cover of the Salvetti complex of `A_L`.
pub fn build_cover_complex(
    l: &SimplicialComplex,
    spec: &CoverSpec,
    budget: u64,
) -> Result<CoverComplex, CoverError> {
    if !l.is_flag() {
        warn!("building a Salvetti cover over a non-flag complex");
    }
    let moduli = spec.aligned(l)?;
    let group = QuotientGroup::new(moduli).ok_or(CoverError::Budget {
        cells: u128::MAX,
        budget,
    })?;
    let faces = l.face_table();
    check_budget(group.order(), &faces, budget)?;
    let order = group.order() as usize;
    let counts = faces.counts();
    let dims: Vec<usize> = counts.iter().map(|&f| f * order).collect();
    let mut higher = Vec::new();
    for k in 1..counts.len() {
        let (fk, fk1) = (counts[k], counts[k - 1]);
        let mut columns = Vec::with_capacity(order * fk);
        for q in 0..group.order() {
            for face in faces.level(k) {
                let mut col = Vec::with_capacity(2 * k);
                for (j, &v) in face.iter().enumerate() {
                    let mut sub = face.clone();
                    sub.remove(j);
                    let idx = faces.index_of(&sub).expect("faces closed under subsets");
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    let shifted = group.shift(q, v as usize);
                    if shifted != q {
                        col.push(((shifted as usize * fk1 + idx) as u32, sign));
                        col.push(((q as usize * fk1 + idx) as u32, -sign));
                    }
                }
                columns.push(col);
            }
        }
        higher.push(SparseIntMatrix::from_columns(dims[k - 1], columns).map_err(ChainError::from)?);
    }
    let chain = ChainComplex::new(dims, higher)?;
    Ok(CoverComplex { chain, faces, group })
}

/// Checks `∂∂ = 0`: over the integers when the complex is small enough,
/// always modulo two random primes.
pub fn verify_boundaries(chain: &ChainComplex, seed: u64) -> Result<(), ChainError> {
    const INTEGRAL_LIMIT: usize = 2_000_000;
    if chain.dims().iter().sum::<usize>() <= INTEGRAL_LIMIT {
        chain.verify_integral()?;
    }
    chain.verify_modular(seed, 2)
}

/// Exact fraction `num/den` with a fixed 6-place decimal rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Normalized(pub Ratio<u64>);

impl Normalized {
    pub fn new(num: u64, den: u64) -> Self {
        Normalized(Ratio::new(num, den))
    }

    pub fn fraction(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    pub fn decimal(&self) -> String {
        format!("{:.6}", *self.0.numer() as f64 / *self.0.denom() as f64)
    }

    pub fn as_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl Serialize for Normalized {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.fraction())
    }
}

impl<'de> Deserialize<'de> for Normalized {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
        let num = a.parse().map_err(serde::de::Error::custom)?;
        let den: u64 = b.parse().map_err(serde::de::Error::custom)?;
        if den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Normalized::new(num, den))
    }
}

/// One experiment record: Betti numbers of one cover over one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiTable {
    pub complex: String,
    pub spec: CoverSpec,
    pub index: u64,
    pub field: Field,
    pub betti: Vec<usize>,
    pub normalized: Vec<Normalized>,
    /// `\bar b_{i-1}(L; F)` for each degree `i`, the limiting value.
    pub target: Vec<usize>,
    pub seed: u64,
    /// Wall time; not serialized so that output stays reproducible.
    #[serde(default, skip_serializing)]
    pub elapsed_ms: u64,
}

impl BettiTable {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

/// Options shared by the Betti computations.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub threads: usize,
    pub budget: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: 1,
            budget: DEFAULT_CELL_BUDGET,
        }
    }
}

/// Betti numbers of the cover `B Γ` for `Γ = ker(A_L -> Q)`.
pub fn cover_betti(
    name: &str,
    l: &SimplicialComplex,
    spec: &CoverSpec,
    field: Field,
    opts: RunOptions,
) -> Result<BettiTable, CoverError> {
    let start = Instant::now();
    let cover = build_cover_complex(l, spec, opts.budget)?;
    verify_boundaries(&cover.chain, opts.seed)?;
    let betti = cover.chain.betti_threads(field, opts.seed, opts.threads);
    let index = cover.group.order();
    assert_eq!(
        betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum::<i64>(),
        cover.chain.euler_characteristic(),
        "Euler characteristic identity"
    );
    let reduced = reduced_betti(l, field, opts.seed);
    let target = (0..betti.len())
        .map(|i| reduced_betti_at(&reduced, i as isize - 1))
        .collect();
    let elapsed_ms = start.elapsed().as_millis() as u64;
    info!("{name} n={} over {field}: betti {betti:?} in {elapsed_ms} ms", spec.describe());
    Ok(BettiTable {
        complex: name.to_string(),
        spec: spec.clone(),
        index,
        field,
        normalized: betti.iter().map(|&b| Normalized::new(b as u64, index)).collect(),
        betti,
        target,
        seed: opts.seed,
        elapsed_ms,
    })
}

/// One table per uniform exponent in `n_list`.
pub fn normalized_betti_scan(
    name: &str,
    l: &SimplicialComplex,
    field: Field,
    n_list: &[u64],
    opts: RunOptions,
) -> Result<Vec<BettiTable>, CoverError> {
    n_list
        .iter()
        .map(|&n| cover_betti(name, l, &CoverSpec::uniform(l, n), field, opts))
        .collect()
}

/// A character `Q -> F_p^×`, given by its value on each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub values: BTreeMap<String, u32>,
}

/// One copy of the base cells with boundary
/// `∂σ = Σ_j (-1)^(j-1) (χ(v_j) - 1) (σ - v_j)`, an isotypic summand of the
/// cover complex over `F_p`. Entries are stored reduced into `[0, p)`.
pub fn twisted_complex(
    l: &SimplicialComplex,
    chi: &Character,
    orders: Option<&CoverSpec>,
    field: PrimeField,
) -> Result<ChainComplex, CoverError> {
    let mut values = Vec::with_capacity(l.num_vertices());
    for v in l.vertices() {
        let x = *chi.values.get(v).ok_or_else(|| CoverError::MissingVertex(v.clone()))? % field.p();
        let order = match orders {
            Some(spec) => *spec.exponents.get(v).ok_or_else(|| CoverError::MissingVertex(v.clone()))?,
            None => 0,
        };
        let ok = x != 0 && (order == 0 || field.pow(x, order) == 1);
        if !ok {
            return Err(CoverError::BadCharacter {
                vertex: v.clone(),
                value: x,
                order,
                p: field.p(),
            });
        }
        values.push(x);
    }
    if let Some(v) = chi.values.keys().find(|v| l.vertex_index(v).is_none()) {
        return Err(CoverError::UnknownVertex(v.clone()));
    }
    let faces = l.face_table();
    let counts = faces.counts();
    let mut higher = Vec::new();
    for k in 1..counts.len() {
        let columns = faces
            .level(k)
            .iter()
            .map(|face| {
                face.iter()
                    .enumerate()
                    .filter_map(|(j, &v)| {
                        let mut sub = face.clone();
                        sub.remove(j);
                        let coeff = field.sub(values[v as usize], 1);
                        let coeff = if j % 2 == 0 { coeff } else { field.sub(0, coeff) };
                        (coeff != 0).then(|| (faces.index_of(&sub).unwrap() as u32, coeff as i64))
                    })
                    .collect()
            })
            .collect();
        higher.push(SparseIntMatrix::from_columns(counts[k - 1], columns).map_err(ChainError::from)?);
    }
    Ok(ChainComplex::new(counts, higher)?)
}

/// Enumerates all characters of `Q` with values in `F_p`, assuming `F_p`
/// contains the `n_v`-th roots of unity.
pub fn all_characters(
    l: &SimplicialComplex,
    spec: &CoverSpec,
    field: PrimeField,
) -> Result<Vec<Character>, CoverError> {
    let moduli = spec.aligned(l)?;
    let mut roots = Vec::new();
    for (v, &n) in l.vertices().iter().zip(&moduli) {
        if (n as u32).is_multiple_of(field.p()) && n > 1 {
            return Err(CoverError::Incompatible(format!("p = {} divides n_{v} = {n}", field.p())));
        }
        let r = field.root_of_unity(n).ok_or_else(|| {
            CoverError::Incompatible(format!("F_{} has no primitive {n}-th root of unity", field.p()))
        })?;
        roots.push(r);
    }
    let group = QuotientGroup::new(moduli).ok_or(CoverError::Incompatible("|Q| overflows".into()))?;
    Ok((0..group.order())
        .map(|q| Character {
            values: l
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), field.pow(roots[i], group.digit(q, i))))
                .collect(),
        })
        .collect())
}

/// Compares the cover's Betti numbers with the sum over all characters of
/// the twisted complexes, degree by degree.
pub fn character_decomposition_check(
    l: &SimplicialComplex,
    spec: &CoverSpec,
    field: PrimeField,
    opts: RunOptions,
) -> Result<bool, CoverError> {
    let characters = all_characters(l, spec, field)?;
    let cover = build_cover_complex(l, spec, opts.budget)?;
    let direct = cover.chain.betti(Field::Prime(field), opts.seed);
    let mut summed = vec![0usize; direct.len()];
    for chi in &characters {
        let twisted = twisted_complex(l, chi, Some(spec), field)?;
        for (s, b) in summed.iter_mut().zip(twisted.betti(Field::Prime(field), opts.seed)) {
            *s += b;
        }
    }
    Ok(summed == direct)
}

/// Counts of `Z/p^k` summands of `H_i(B Γ; Z)` for each degree, from
/// `b_i(F_p) = b_i(Q) + t_p(H_i) + t_p(H_{i-1})` and torsion-free top homology.
pub fn torsion_from_betti(rational: &[usize], modular: &[usize]) -> Result<Vec<usize>, CoverError> {
    let top = rational.len();
    let mut t = vec![0i64; top];
    for i in (1..top).rev() {
        let v = modular[i] as i64 - rational[i] as i64 - t[i];
        if v < 0 {
            return Err(CoverError::NegativeTorsion { degree: i - 1 });
        }
        t[i - 1] = v;
    }
    if top > 0 && modular[0] as i64 - rational[0] as i64 - t[0] != 0 {
        return Err(CoverError::NegativeTorsion { degree: 0 });
    }
    Ok(t.into_iter().map(|x| x as usize).collect())
}

/// Torsion profile with both Betti tables that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionProfile {
    pub rational: BettiTable,
    pub modular: BettiTable,
    pub p: u32,
    pub torsion: Vec<usize>,
}

pub fn torsion_rank_profile(
    name: &str,
    l: &SimplicialComplex,
    spec: &CoverSpec,
    p: PrimeField,
    opts: RunOptions,
) -> Result<TorsionProfile, CoverError> {
    let rational = cover_betti(name, l, spec, Field::Rational, opts)?;
    let modular = cover_betti(name, l, spec, Field::Prime(p), opts)?;
    let torsion = torsion_from_betti(&rational.betti, &modular.betti)?;
    Ok(TorsionProfile {
        rational,
        modular,
        p: p.p(),
        torsion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{builtin, cycle};

    fn opts() -> RunOptions {
        RunOptions::default()
    }

    #[test]
    fn quotient_group_shift_wraps() {
        let g = QuotientGroup::new(vec![2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.shift(0, 0), 1);
        assert_eq!(g.shift(1, 0), 0);
        assert_eq!(g.shift(4, 1), 0);
        assert_eq!(g.digit(5, 1), 2);
    }

    #[test]
    fn point_cover_is_a_cycle_graph() {
        let l = builtin("point").unwrap();
        let t = cover_betti("point", &l, &CoverSpec::uniform(&l, 3), Field::gf(5).unwrap(), opts()).unwrap();
        assert_eq!(t.betti, vec![1, 1]);
        assert_eq!(t.index, 3);
        assert_eq!(t.target, vec![0, 0]);
    }

    #[test]
    fn trivial_cover_has_zero_boundaries() {
        let l = builtin("octahedron").unwrap();
        let cover = build_cover_complex(&l, &CoverSpec::uniform(&l, 1), DEFAULT_CELL_BUDGET).unwrap();
        for k in 0..cover.chain.len() {
            assert!(cover.chain.boundary(k).is_zero());
        }
        let t = cover_betti("oct", &l, &CoverSpec::uniform(&l, 1), Field::Rational, opts()).unwrap();
        assert_eq!(t.betti, vec![1, 6, 12, 8]);
    }

    #[test]
    fn figure_eight_double_cover() {
        let l = builtin("s0").unwrap();
        let cover = build_cover_complex(&l, &CoverSpec::uniform(&l, 2), DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(cover.chain.dims(), &[4, 8]);
        let t = cover_betti("s0", &l, &CoverSpec::uniform(&l, 2), Field::Rational, opts()).unwrap();
        assert_eq!(t.betti, vec![1, 5]);
    }

    #[test]
    fn square_cover_product_formula() {
        let l = cycle(4);
        for (n, b2) in [(1u64, 4usize), (2, 25), (3, 100)] {
            let t = cover_betti("c4", &l, &CoverSpec::uniform(&l, n), Field::Rational, opts()).unwrap();
            assert_eq!(t.betti[2], b2, "n = {n}");
        }
    }

    #[test]
    fn spec_errors() {
        let l = cycle(4);
        let mut spec = CoverSpec::uniform(&l, 2);
        spec.exponents.insert("zz".into(), 2);
        assert!(matches!(build_cover_complex(&l, &spec, 100), Err(CoverError::UnknownVertex(_))));
        let spec = CoverSpec::uniform(&l, 0);
        assert!(matches!(build_cover_complex(&l, &spec, 100), Err(CoverError::BadExponent(_))));
        let spec = CoverSpec::uniform(&l, 10);
        assert!(matches!(build_cover_complex(&l, &spec, 1000), Err(CoverError::Budget { .. })));
    }

    #[test]
    fn twisted_point() {
        let l = builtin("point").unwrap();
        let f3 = PrimeField::new(3).unwrap();
        let v = l.vertices()[0].clone();
        let chi = Character { values: [(v.clone(), 2)].into() };
        let spec = CoverSpec::uniform(&l, 2);
        let t = twisted_complex(&l, &chi, Some(&spec), f3).unwrap();
        assert_eq!(t.betti(Field::Prime(f3), 0), vec![0, 0]);
        let triv = Character { values: [(v.clone(), 1)].into() };
        assert_eq!(twisted_complex(&l, &triv, Some(&spec), f3).unwrap().betti(Field::Prime(f3), 0), vec![1, 1]);
        let f7 = PrimeField::new(7).unwrap();
        let bad = Character { values: [(v, 3)].into() };
        assert!(matches!(
            twisted_complex(&l, &bad, Some(&spec), f7),
            Err(CoverError::BadCharacter { .. })
        ));
    }

    #[test]
    fn torsion_solver() {
        assert_eq!(torsion_from_betti(&[1, 5, 4], &[1, 5, 4]).unwrap(), vec![0, 0, 0]);
        // H_1 = Z/2 in a 2-complex: F_2 sees it in degrees 1 and 2
        assert_eq!(torsion_from_betti(&[1, 0, 0], &[1, 1, 1]).unwrap(), vec![0, 1, 0]);
        assert!(matches!(
            torsion_from_betti(&[1, 2, 1], &[1, 1, 1]),
            Err(CoverError::NegativeTorsion { .. })
        ));
    }
}
