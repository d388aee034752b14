//! Nerve-side computations against brute-force subcomplex homology, and
//! the Davis complex checks.

use raag_growth::chain::reduced_betti;
use raag_growth::davis::{build_davis, davis_betti, embedding_criterion, mv_check};
use raag_growth::library::{builtin, cycle};
use raag_growth::linalg::Field;
use raag_growth::nerve::{
    coefficient_nerve_homology, collapse_report, e1_contribution, e1_dimensions, nerve_subcomplex, NerveData,
    NerveError,
};
use raag_growth::salvetti::{build_cover_complex, cover_betti, CoverSpec, RunOptions};

fn opts() -> RunOptions {
    RunOptions::default()
}

fn fields() -> [Field; 3] {
    [Field::Rational, Field::gf(2).unwrap(), Field::gf(3).unwrap()]
}

/// Homology of the preimage of the torus on `τ(σ)`, computed directly on
/// the cover, compared with the closed form for every `σ`.
#[test]
fn e1_entries_match_preimage_homology() {
    for (name, n) in [("cycle_4", 2), ("cycle_5", 2), ("path_4", 3), ("octahedron", 2), ("simplex_2", 2)] {
        let l = builtin(name).unwrap();
        let spec = CoverSpec::uniform(&l, n);
        let moduli = spec.aligned(&l).unwrap();
        let cover = build_cover_complex(&l, &spec, 1 << 20).unwrap();
        let nerve = NerveData::new(&l);
        for sigma in 1u64..1 << nerve.m() {
            let tau = nerve.tau(sigma);
            let keep: Vec<Vec<bool>> = (0..cover.chain.len())
                .map(|k| {
                    (0..cover.chain.dims()[k])
                        .map(|id| cover.cell(k, id).1.iter().all(|v| tau.contains(v)))
                        .collect()
                })
                .collect();
            let sub = cover.chain.subcomplex(&keep).unwrap();
            let mut direct = sub.betti(Field::Rational, 1);
            while direct.last() == Some(&0) && direct.len() > tau.len() + 1 {
                direct.pop();
            }
            let want: Vec<usize> = e1_contribution(&tau, &moduli, cover.group.order())
                .into_iter()
                .map(|x| x as usize)
                .collect();
            assert_eq!(direct, want, "{name} σ={sigma:b} τ={tau:?}");
        }
    }
}

#[test]
fn adjacent_edges_of_the_square() {
    let l = cycle(4);
    let nerve = NerveData::new(&l);
    // maximal simplices are sorted edges; the first two share vertex v00
    let sigma = (0..nerve.m())
        .flat_map(|a| (a + 1..nerve.m()).map(move |b| (a, b)))
        .map(|(a, b)| 1u64 << a | 1u64 << b)
        .find(|&s| nerve.tau(s).len() == 1)
        .unwrap();
    let tau = nerve.tau(sigma);
    assert_eq!(e1_contribution(&tau, &[2; 4], 16), vec![8, 8]);
}

#[test]
fn spectral_sequence_bounds() {
    for name in ["cycle_4", "cycle_5", "cycle_6", "path_4", "octahedron"] {
        let l = builtin(name).unwrap();
        for n in [2, 3] {
            let spec = CoverSpec::uniform(&l, n);
            let e1 = e1_dimensions(&l, &spec).unwrap();
            let t = cover_betti(name, &l, &spec, Field::Rational, opts()).unwrap();
            let mut euler = 0i64;
            for (&(i, j), &d) in &e1.dims {
                euler += if (i + j) % 2 == 0 { d as i64 } else { -(d as i64) };
            }
            assert_eq!(euler, t.euler_characteristic(), "{name} n={n}");
            for (k, &b) in t.betti.iter().enumerate() {
                let total: u64 = (0..=k).map(|i| e1.get(i, k - i)).sum();
                assert!(b as u64 <= total, "{name} n={n} degree {k}: {b} > {total}");
            }
        }
    }
}

#[test]
fn nerve_lemma_on_small_library() {
    for name in ["point", "s0", "path_3", "cycle_4", "cycle_5", "cycle_7", "octahedron", "simplex_3", "sphere_boundary_3"] {
        let l = builtin(name).unwrap();
        for n in [2, 3] {
            let spec = CoverSpec::uniform(&l, n);
            for f in fields() {
                let dims = coefficient_nerve_homology(&l, &spec, f, 1).unwrap();
                let reduced = reduced_betti(&l, f, 1);
                for (i, &d) in dims.iter().enumerate() {
                    let want = if i == 0 { 0 } else { reduced.get(i - 1).copied().unwrap_or(0) };
                    assert_eq!(d, want as u64 * spec.order().unwrap(), "{name} n={n} {f} degree {i}");
                }
            }
        }
    }
}

#[test]
fn nerve_limits() {
    let l = builtin("icosahedron").unwrap();
    assert!(matches!(
        coefficient_nerve_homology(&l, &CoverSpec::uniform(&l, 2), Field::Rational, 1),
        Err(NerveError::TooManyFacets { m: 20, .. })
    ));
    assert!(nerve_subcomplex(&cycle(6)).is_isomorphic(&cycle(6)));
}

#[test]
fn collapse_report_rows() {
    let l = cycle(5);
    let rows = collapse_report("cycle_5", &l, &CoverSpec::uniform(&l, 2), Field::Rational, opts()).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2].nerve_normalized.fraction(), "1/1");
    assert_eq!(rows[2].cover_normalized.fraction(), "61/32");
    // at this stage the cover sits above the limit in every degree
    for r in &rows {
        assert!(r.gap() >= 0.0);
    }
    let f2 = collapse_report("cycle_5", &l, &CoverSpec::uniform(&l, 2), Field::gf(2).unwrap(), opts()).unwrap();
    assert!(f2.iter().all(|r| r.gap() >= 0.0));

    let sq = cycle(4);
    let rows = collapse_report("cycle_4", &sq, &CoverSpec::uniform(&sq, 3), Field::Rational, opts()).unwrap();
    assert_eq!(rows[2].cover_normalized.fraction(), "100/81");
    assert_eq!(rows[2].nerve_normalized.fraction(), "1/1");
    assert_eq!(rows[2].e1_offrow_mass.fraction(), "16/9");
    assert!(rows[2].gap() <= rows[2].e1_offrow_mass.as_f64());
}

#[test]
fn davis_small_cases() {
    let q = Field::Rational;
    assert_eq!(davis_betti("s0", &builtin("s0").unwrap(), q, opts()).unwrap().betti, vec![1, 1]);
    assert_eq!(davis_betti("c4", &cycle(4), q, opts()).unwrap().betti, vec![1, 2, 1]);
    // Y of a simplex is a cube
    assert_eq!(davis_betti("s2", &builtin("simplex_2").unwrap(), q, opts()).unwrap().betti, vec![1, 0, 0, 0]);
    // Y of the pentagon is a closed surface of Euler characteristic 32 (1 - 5/2 + 5/4) = -8
    let t = davis_betti("c5", &cycle(5), q, opts()).unwrap();
    assert_eq!(t.betti, vec![1, 10, 1]);
}

#[test]
fn davis_flag_spheres_are_closed_3_manifolds() {
    for name in ["octahedron", "icosahedron"] {
        let l = builtin(name).unwrap();
        let y = build_davis(&l, 1 << 22).unwrap();
        assert_eq!(y.chain.euler_characteristic(), 0, "{name}");
        let b = y.chain.betti(Field::gf(2).unwrap(), 1);
        assert_eq!(b.len(), 4);
        assert_eq!(b[0], b[3], "{name}");
        assert_eq!(b[1], b[2], "{name}");
        assert_eq!(b[0], 1);
        assert!(y.verify_vertex_links().unwrap() > 0);
    }
}

#[test]
fn mayer_vietoris_at_every_vertex() {
    for name in ["path_3", "cycle_4", "cycle_5", "octahedron", "simplex_2", "s0"] {
        let l = builtin(name).unwrap();
        for f in [Field::Rational, Field::gf(2).unwrap()] {
            for v in l.vertices() {
                let r = mv_check(&l, v, f, opts()).unwrap();
                assert!(r.exact && r.surjective, "{name} at {v} over {f}");
                assert_eq!(r.alternating_sum, 0);
            }
        }
    }
}

#[test]
fn embedding_examples() {
    assert!(embedding_criterion(&builtin("path_3").unwrap()));
    assert!(!embedding_criterion(&cycle(5)));
    assert!(!embedding_criterion(&builtin("rp2_flag").unwrap()));
    assert!(embedding_criterion(&builtin("simplex_2").unwrap()));
}
