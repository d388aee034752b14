//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact (integer Betti numbers and reduced fractions);
//! no numeric tolerance is used anywhere.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use raag_growth::chain::{augmented_chain_complex, reduced_betti};
use raag_growth::complex::SimplicialComplex;
use raag_growth::davis::{build_davis, davis_betti, mv_check_all};
use raag_growth::library::builtin;
use raag_growth::linalg::{Field, PrimeField};
use raag_growth::nerve::{coefficient_nerve_homology, NerveData, MAX_DELTA_VERTICES};
use raag_growth::report::repro_rp2;
use raag_growth::salvetti::{
    build_cover_complex, character_decomposition_check, cover_betti, CoverSpec, Normalized, RunOptions,
};

/// Regression fixtures from the first flagship run (seed 1).
const RP2_BETTI_Q: [usize; 4] = [1, 3380, 48003, 44624];
const RP2_BETTI_F2: [usize; 4] = [1, 3380, 48004, 44625];
const RP2_TORSION_2: [usize; 4] = [0, 0, 1, 0];

/// Largest single degree of `Y_L` for which Mayer-Vietoris is checked at
/// every vertex.
const MV_CELL_BUDGET: usize = 40_000;
/// Largest total cell count of a cover in the property sweep.
const PROPERTY_CELL_BUDGET: usize = 60_000;

type Outcome = Result<String, String>;

fn opts() -> RunOptions {
    RunOptions::default()
}

fn fields() -> [Field; 3] {
    [Field::Rational, Field::gf(2).unwrap(), Field::gf(3).unwrap()]
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every catalog family instantiated over a range of parameters.
fn library() -> Vec<(String, SimplicialComplex)> {
    let mut names: Vec<String> = ["point", "s0", "octahedron", "icosahedron", "rp2_6", "rp2_flag"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend((2..=8).map(|k| format!("path_{k}")));
    names.extend((3..=14).map(|k| format!("cycle_{k}")));
    names.extend((0..=4).map(|d| format!("simplex_{d}")));
    names.extend((1..=6).map(|d| format!("sphere_boundary_{d}")));
    names.extend((2..=3).map(|p| format!("moore_{p}")));
    names.into_iter().map(|n| (n.clone(), builtin(&n).unwrap())).collect()
}

fn criterion_1() -> Outcome {
    let mut runs = 0;
    let mut complexes = 0;
    for (name, l) in library() {
        if NerveData::new(&l).m() > MAX_DELTA_VERTICES {
            continue;
        }
        complexes += 1;
        for n in [2, 3] {
            let spec = CoverSpec::uniform(&l, n);
            let order = spec.order().unwrap();
            for f in fields() {
                let got = coefficient_nerve_homology(&l, &spec, f, 1).map_err(|e| format!("{name} n={n} {f}: {e}"))?;
                let reduced = reduced_betti(&l, f, 1);
                for (i, &d) in got.iter().enumerate() {
                    let want = if i == 0 { 0 } else { reduced.get(i - 1).copied().unwrap_or(0) as u64 * order };
                    ensure(d == want, || format!("{name} n={n} {f} degree {i}: {d} != {want}"))?;
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{complexes} complexes, {runs} (complex, n, field) runs, all exact"))
}

fn criterion_2() -> Outcome {
    let c4 = builtin("cycle_4").unwrap();
    let mut seen = Vec::new();
    for (n, pinned) in [(1u64, "4/1"), (2, "25/16"), (3, "100/81"), (4, "289/256")] {
        let t = cover_betti("cycle_4", &c4, &CoverSpec::uniform(&c4, n), Field::Rational, opts())
            .map_err(|e| e.to_string())?;
        // product of two graph covers, each with n^2 vertices and 2n^2 edges
        let graph_b1 = 2 * n * n - n * n + 1;
        let oracle = Normalized::new(graph_b1 * graph_b1, n.pow(4));
        ensure(t.normalized[2] == oracle && oracle.fraction() == pinned, || {
            format!("cycle_4 n={n}: {} vs oracle {}", t.normalized[2].fraction(), oracle.fraction())
        })?;
        seen.push(pinned);
    }
    let point = builtin("point").unwrap();
    let s0 = builtin("s0").unwrap();
    for n in 1..=5u64 {
        let t = cover_betti("point", &point, &CoverSpec::uniform(&point, n), Field::Rational, opts())
            .map_err(|e| e.to_string())?;
        ensure(t.normalized[1] == Normalized::new(1, n), || format!("point n={n}: {}", t.normalized[1].fraction()))?;
        let t = cover_betti("s0", &s0, &CoverSpec::uniform(&s0, n), Field::Rational, opts()).map_err(|e| e.to_string())?;
        ensure(t.normalized[1] == Normalized::new(n * n + 1, n * n), || {
            format!("s0 n={n}: {}", t.normalized[1].fraction())
        })?;
    }
    Ok(format!("cycle_4 b2/|Q| = {}; point 1/n and S0 (n^2+1)/n^2 for n = 1..5", seen.join(", ")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let v = repro_rp2(2, opts()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs();
    ensure(v.is_flag, || "rp2_flag is not flag".into())?;
    ensure(v.reduced_betti_l_f2 == [0, 1, 1] && v.reduced_betti_l_q == [0, 0, 0], || {
        format!("L is not an RP^2: {:?} {:?}", v.reduced_betti_l_q, v.reduced_betti_l_f2)
    })?;
    ensure(v.betti_f2[3] > v.betti_q[3], || format!("b3: F2 {} vs Q {}", v.betti_f2[3], v.betti_q[3]))?;
    ensure(v.torsion_2[3] == 0, || format!("t_2(H_3) = {}", v.torsion_2[3]))?;
    ensure(v.torsion_2[2] as i64 == v.b3_excess && v.b3_excess > 0, || {
        format!("t_2(H_2) = {} vs excess {}", v.torsion_2[2], v.b3_excess)
    })?;
    ensure(v.betti_q == RP2_BETTI_Q && v.betti_f2 == RP2_BETTI_F2 && v.torsion_2 == RP2_TORSION_2, || {
        format!("fixtures changed: Q {:?} F2 {:?} t {:?}", v.betti_q, v.betti_f2, v.torsion_2)
    })?;
    ensure(v.pass, || "verdict not passing".into())?;
    Ok(format!(
        "b3 over F2 {} > over Q {}, t_2 = {:?}, normalized b3 {} vs {} ({secs} s)",
        v.betti_f2[3], v.betti_q[3], v.torsion_2, v.normalized_f2[3], v.normalized_q[3]
    ))
}

fn reversed(l: &SimplicialComplex) -> SimplicialComplex {
    let n = l.num_vertices();
    let order: Vec<String> = l.vertices().to_vec();
    l.relabel(|v| {
        let i = order.iter().position(|w| w == v).unwrap();
        format!("r{:02}", n - 1 - i)
    })
}

fn criterion_4() -> Outcome {
    let mut base: Vec<(String, SimplicialComplex)> = library()
        .into_iter()
        .filter(|(_, l)| l.is_flag() && l.num_vertices() <= 13)
        .collect();
    for name in ["path_3", "cycle_4", "cycle_5"] {
        base.push((format!("oct({name})"), builtin(name).unwrap().octahedralize()));
    }
    base.push(("sd(simplex_2)".into(), builtin("simplex_2").unwrap().barycentric_subdivision()));
    let (mut covers, mut characters, mut davis) = (0, 0, 0);
    for (name, l) in &base {
        augmented_chain_complex(l).verify_integral().map_err(|e| format!("{name}: {e}"))?;
        if l.num_vertices() <= 10 {
            let y = build_davis(l, 1 << 20).map_err(|e| format!("{name}: {e}"))?;
            y.chain.verify_integral().map_err(|e| format!("Y {name}: {e}"))?;
            davis += 1;
        }
        let widest = l.face_table().counts().into_iter().sum::<usize>();
        for n in [1u64, 2, 3] {
            let order = n.pow(l.num_vertices() as u32) as usize;
            if order.saturating_mul(widest) > PROPERTY_CELL_BUDGET {
                continue;
            }
            let spec = CoverSpec::uniform(l, n);
            let cover = build_cover_complex(l, &spec, 1 << 24).map_err(|e| e.to_string())?;
            cover.chain.verify_integral().map_err(|e| format!("{name} n={n}: {e}"))?;
            let q = cover_betti(name, l, &spec, Field::Rational, opts()).map_err(|e| e.to_string())?;
            let chi = -(q.index as i64) * l.reduced_euler_characteristic();
            ensure(q.euler_characteristic() == chi, || format!("{name} n={n}: χ {} vs {chi}", q.euler_characteristic()))?;
            let r = reversed(l);
            for f in [Field::Rational, Field::gf(2).unwrap(), Field::gf(3).unwrap(), Field::gf(5).unwrap()] {
                let t = cover_betti(name, l, &spec, f, opts()).map_err(|e| e.to_string())?;
                ensure(t.betti.iter().zip(&q.betti).all(|(a, b)| a >= b), || {
                    format!("{name} n={n} {f}: {:?} below {:?}", t.betti, q.betti)
                })?;
                let tr = cover_betti(name, &r, &CoverSpec::uniform(&r, n), f, opts()).map_err(|e| e.to_string())?;
                ensure(tr.betti == t.betti, || format!("{name} n={n} {f}: vertex order changes Betti"))?;
            }
            for p in [3u64, 5, 7] {
                if n > 1 && (p - 1) % n != 0 {
                    continue;
                }
                if order * l.face_table().counts().len() > 20_000 {
                    continue;
                }
                let ok = character_decomposition_check(l, &spec, PrimeField::new(p).unwrap(), opts())
                    .map_err(|e| format!("{name} n={n} p={p}: {e}"))?;
                ensure(ok, || format!("{name} n={n} p={p}: character sum differs"))?;
                characters += 1;
            }
            covers += 1;
        }
    }
    Ok(format!(
        "{} complexes, {covers} covers x 4 fields, {characters} character decompositions, {davis} Davis complexes",
        base.len()
    ))
}

fn criterion_5() -> Outcome {
    let q = Field::Rational;
    let f2 = Field::gf(2).unwrap();
    let s0 = davis_betti("s0", &builtin("s0").unwrap(), q, opts()).map_err(|e| e.to_string())?;
    ensure(s0.betti == [1, 1], || format!("Y_S0 {:?}", s0.betti))?;
    let c4 = davis_betti("cycle_4", &builtin("cycle_4").unwrap(), q, opts()).map_err(|e| e.to_string())?;
    ensure(c4.betti == [1, 2, 1], || format!("Y_C4 {:?}", c4.betti))?;
    let mut spheres = Vec::new();
    for name in ["octahedron", "icosahedron"] {
        let l = builtin(name).unwrap();
        let y = build_davis(&l, 1 << 22).map_err(|e| e.to_string())?;
        let links = y.verify_vertex_links().map_err(|e| e.to_string())?;
        let b = y.chain.betti(f2, 1);
        ensure(y.chain.euler_characteristic() == 0, || format!("χ(Y_{name}) != 0"))?;
        ensure(b.len() == 4 && (0..4).all(|i| b[i] == b[3 - i]), || format!("Y_{name} F2 Betti {b:?}"))?;
        spheres.push(format!("{name} {b:?} ({links} links)"));
    }
    let mut vertices = 0;
    let mut complexes = 0;
    for (name, l) in library() {
        let counts = l.face_table().counts();
        let n = l.num_vertices();
        let widest = counts.iter().enumerate().map(|(k, &f)| f << (n - k)).max().unwrap_or(0);
        if n > 20 || widest > MV_CELL_BUDGET {
            continue;
        }
        for f in [q, f2] {
            let reports = mv_check_all(&l, f, opts()).map_err(|e| format!("{name}: {e}"))?;
            for r in &reports {
                ensure(r.exact && r.surjective, || {
                    format!("{name} at {} over {f}: exact {} surjective {}", r.vertex, r.exact, r.surjective)
                })?;
            }
            vertices += reports.len();
        }
        complexes += 1;
    }
    Ok(format!(
        "Y_S0 (1,1), Y_C4 (1,2,1), {}; Mayer-Vietoris at {vertices} (vertex, field) pairs over {complexes} complexes",
        spheres.join(", ")
    ))
}

fn criterion_6() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_raag-growth");
    let cache = std::env::temp_dir().join(format!("raag-growth-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&cache);
    let cache_arg = cache.to_str().unwrap().to_string();
    let run = |extra: &[&str]| -> Result<Vec<u8>, String> {
        let o = Command::new(exe)
            .args(["repro", "rp2", "--seed", "1"])
            .args(extra)
            .env_remove("RAAG_GROWTH_CACHE_DIR")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), || format!("exit {:?}", o.status.code()))?;
        Ok(o.stdout)
    };
    let first = run(&["--threads", "4", "--cache-dir", &cache_arg])?;
    let second = run(&["--threads", "1"])?;
    let cached = run(&["--cache-dir", &cache_arg])?;
    let _ = std::fs::remove_dir_all(&cache);
    ensure(first == second, || "fresh runs differ".into())?;
    ensure(first == cached, || "cached run differs".into())?;
    serde_json::from_slice::<serde_json::Value>(&first).map_err(|e| e.to_string())?;
    Ok(format!("{} bytes identical across 4 threads, 1 thread and a cache hit", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("exact nerve lemma", criterion_1),
        ("Theorem 1 trend on cycle_4, point, S0", criterion_2),
        ("flagship RP^2 discrepancy at n = 2", criterion_3),
        ("property suite", criterion_4),
        ("Davis-side checks", criterion_5),
        ("determinism of repro rp2", criterion_6),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({title}): PASS [{secs:.1} s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({title}): FAIL [{secs:.1} s] {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
