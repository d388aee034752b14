//! Flat output records and the flag RP^2 reproduction run.

use serde::{Deserialize, Serialize};

use crate::chain::reduced_betti;
use crate::library::rp2_flag;
use crate::linalg::{Field, PrimeField};
use crate::salvetti::{
    torsion_rank_profile, BettiTable, CoverError, CoverSpec, RunOptions, TorsionProfile,
};

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 8] = ["complex", "index", "n", "field", "degree", "betti", "normalized", "target"];

/// One CSV line: a single degree of a [`BettiTable`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiRow {
    pub complex: String,
    pub index: u64,
    pub n: String,
    pub field: String,
    pub degree: usize,
    pub betti: usize,
    /// Exact fraction followed by a 6-place decimal, e.g. `25/16 (1.562500)`.
    pub normalized: String,
    /// `\bar b_{degree-1}(L; F)`; empty when not applicable.
    pub target: String,
}

pub fn betti_rows(table: &BettiTable) -> Vec<BettiRow> {
    table
        .betti
        .iter()
        .enumerate()
        .map(|(i, &b)| BettiRow {
            complex: table.complex.clone(),
            index: table.index,
            n: table.spec.describe(),
            field: table.field.to_string(),
            degree: i,
            betti: b,
            normalized: format!("{} ({})", table.normalized[i].fraction(), table.normalized[i].decimal()),
            target: table.target.get(i).map(|t| t.to_string()).unwrap_or_default(),
        })
        .collect()
}

/// Machine-readable outcome of the flag RP^2 run at uniform `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rp2Verdict {
    pub complex: String,
    pub vertices: usize,
    pub f_vector: Vec<usize>,
    pub is_flag: bool,
    pub reduced_betti_l_q: Vec<usize>,
    pub reduced_betti_l_f2: Vec<usize>,
    pub n: u64,
    pub index: u64,
    pub seed: u64,
    pub betti_q: Vec<usize>,
    pub betti_f2: Vec<usize>,
    pub normalized_q: Vec<String>,
    pub normalized_f2: Vec<String>,
    /// Number of `Z/2^k` summands of `H_i(B Γ; Z)` per degree.
    pub torsion_2: Vec<usize>,
    pub b3_excess: i64,
    pub b3_f2_exceeds_q: bool,
    pub t2_h3_zero: bool,
    pub t2_h2_positive: bool,
    pub pass: bool,
}

pub fn repro_rp2(n: u64, opts: RunOptions) -> Result<Rp2Verdict, CoverError> {
    let l = rp2_flag();
    let f2 = PrimeField::new(2).expect("2 is prime");
    let profile = torsion_rank_profile("rp2_flag", &l, &CoverSpec::uniform(&l, n), f2, opts)?;
    Ok(rp2_verdict(&profile, n, opts.seed))
}

/// Builds the verdict from an already computed `F_2` torsion profile of
/// the uniform `n` cover over `rp2_flag`.
pub fn rp2_verdict(profile: &TorsionProfile, n: u64, seed: u64) -> Rp2Verdict {
    let l = rp2_flag();
    let f2 = PrimeField::new(2).expect("2 is prime");
    let (bq, bf) = (&profile.rational.betti, &profile.modular.betti);
    let t = &profile.torsion;
    let b3_excess = bf[3] as i64 - bq[3] as i64;
    let b3_f2_exceeds_q = b3_excess > 0;
    let t2_h3_zero = t[3] == 0;
    let t2_h2_positive = t[2] > 0 && t[2] as i64 == b3_excess;
    let is_flag = l.is_flag();
    Rp2Verdict {
        complex: "rp2_flag".into(),
        vertices: l.num_vertices(),
        f_vector: l.f_vector().counts,
        is_flag,
        reduced_betti_l_q: reduced_betti(&l, Field::Rational, seed),
        reduced_betti_l_f2: reduced_betti(&l, Field::Prime(f2), seed),
        n,
        index: profile.rational.index,
        seed,
        betti_q: bq.clone(),
        betti_f2: bf.clone(),
        normalized_q: profile.rational.normalized.iter().map(|x| x.fraction()).collect(),
        normalized_f2: profile.modular.normalized.iter().map(|x| x.fraction()).collect(),
        torsion_2: t.clone(),
        b3_excess,
        b3_f2_exceeds_q,
        t2_h3_zero,
        t2_h2_positive,
        pass: is_flag && b3_f2_exceeds_q && t2_h3_zero && t2_h2_positive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::cycle;
    use crate::salvetti::cover_betti;

    #[test]
    fn rows_follow_the_table() {
        let l = cycle(4);
        let t = cover_betti("cycle_4", &l, &CoverSpec::uniform(&l, 2), Field::Rational, RunOptions::default())
            .unwrap();
        let rows = betti_rows(&t);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].normalized, "25/16 (1.562500)");
        assert_eq!(rows[2].target, "1");
        assert_eq!(rows[0].n, "2");
        assert_eq!(rows[0].field, "q");
    }
}
