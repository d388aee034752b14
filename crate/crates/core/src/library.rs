//! Catalog of named complexes.

use std::collections::BTreeMap;

use crate::complex::{ComplexError, Face, SimplicialComplex};

/// Names accepted by [`builtin`]; `<k>`, `<d>` and `<p>` are integer parameters.
pub const CATALOG: &[(&str, &str)] = &[
    ("point", "a single vertex"),
    ("s0", "two disjoint vertices"),
    ("path_<k>", "path with k vertices, k >= 2"),
    ("cycle_<k>", "k-gon, k >= 3 (flag for k >= 4)"),
    ("simplex_<d>", "full d-simplex"),
    ("sphere_boundary_<d>", "boundary of the d-simplex, a (d-1)-sphere, d >= 1"),
    ("octahedron", "boundary of the 3-dimensional cross-polytope (flag S^2)"),
    ("icosahedron", "boundary of the icosahedron (flag S^2)"),
    ("rp2_6", "6-vertex RP^2 (not flag)"),
    ("rp2_flag", "flag RP^2 from greedy edge subdivision of rp2_6"),
    ("moore_<p>", "mod-p Moore space S^1 with a disk attached by degree p (also moore(<p>))"),
];

fn named(facets: &[Vec<String>]) -> SimplicialComplex {
    SimplicialComplex::new(facets).expect("catalog facets are valid")
}

fn num(n: usize) -> String {
    format!("v{n:02}")
}

fn param(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

/// Looks up a complex from [`CATALOG`].
pub fn builtin(name: &str) -> Result<SimplicialComplex, ComplexError> {
    let unknown = || ComplexError::UnknownBuiltin(name.to_string());
    let name = name.trim();
    let moore_p = param(name, "moore_").or_else(|| {
        name.strip_prefix("moore(")?.strip_suffix(')')?.parse().ok()
    });
    if let Some(p) = moore_p {
        return if p >= 2 { Ok(moore(p)) } else { Err(unknown()) };
    }
    Ok(match name {
        "point" => named(&[vec![num(0)]]),
        "s0" => named(&[vec![num(0)], vec![num(1)]]),
        "octahedron" => octahedron(),
        "icosahedron" => icosahedron(),
        "rp2_6" => rp2_6(),
        "rp2_flag" => rp2_flag(),
        _ => {
            if let Some(k) = param(name, "cycle_").filter(|&k| k >= 3) {
                cycle(k)
            } else if let Some(k) = param(name, "path_").filter(|&k| k >= 2) {
                named(&(0..k - 1).map(|i| vec![num(i), num(i + 1)]).collect::<Vec<_>>())
            } else if let Some(d) = param(name, "simplex_") {
                named(&[(0..=d).map(num).collect()])
            } else if let Some(d) = param(name, "sphere_boundary_").filter(|&d| d >= 1) {
                named(
                    &(0..=d)
                        .map(|skip| (0..=d).filter(|&i| i != skip).map(num).collect())
                        .collect::<Vec<_>>(),
                )
            } else {
                return Err(unknown());
            }
        }
    })
}

pub fn cycle(k: usize) -> SimplicialComplex {
    named(&(0..k).map(|i| vec![num(i), num((i + 1) % k)]).collect::<Vec<_>>())
}

pub fn octahedron() -> SimplicialComplex {
    let mut facets = Vec::new();
    for a in ["x+", "x-"] {
        for b in ["y+", "y-"] {
            for c in ["z+", "z-"] {
                facets.push(vec![a.to_string(), b.to_string(), c.to_string()]);
            }
        }
    }
    named(&facets)
}

pub fn icosahedron() -> SimplicialComplex {
    // north pole 0, upper ring 1..5, lower ring 6..10, south pole 11
    let mut facets = Vec::new();
    for i in 0..5 {
        let (u, u1) = (1 + i, 1 + (i + 1) % 5);
        let (l, l1) = (6 + i, 6 + (i + 1) % 5);
        facets.push(vec![0, u, u1]);
        facets.push(vec![u, u1, l]);
        facets.push(vec![u1, l, l1]);
        facets.push(vec![11, l, l1]);
    }
    named(
        &facets
            .into_iter()
            .map(|f| f.into_iter().map(num).collect())
            .collect::<Vec<_>>(),
    )
}

/// The hemi-icosahedron: 6 vertices, 15 edges, 10 triangles.
pub fn rp2_6() -> SimplicialComplex {
    let tris = [
        "abd", "abf", "ace", "acf", "ade", "bcd", "bce", "bef", "cdf", "def",
    ];
    named(
        &tris
            .iter()
            .map(|t| t.chars().map(|c| c.to_string()).collect())
            .collect::<Vec<_>>(),
    )
}

/// Greedy flagification: subdivide the edge lying in the most empty
/// triangles (lowest lexicographic edge on ties) until the complex is flag.
pub fn flagify_by_edge_subdivision(mut c: SimplicialComplex) -> SimplicialComplex {
    loop {
        let empty = c.empty_triangles();
        if empty.is_empty() {
            if c.is_flag() {
                return c;
            }
            // a larger missing clique: split one of its edges
            let clique = c.empty_triangles_or_worse().expect("non-flag has a missing clique");
            let names = c.names_of(&clique[..2]);
            c = c.subdivide_edge(&names[0], &names[1]).expect("clique edge exists");
            continue;
        }
        let mut hits: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for t in &empty {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let e: Face = vec![t[i], t[j]];
                *hits.entry(c.names_of(&e)).or_default() += 1;
            }
        }
        let best = hits.values().copied().max().expect("nonempty");
        let edge = hits
            .into_iter()
            .find(|&(_, n)| n == best)
            .map(|(e, _)| e)
            .expect("maximum attained");
        c = c.subdivide_edge(&edge[0], &edge[1]).expect("edge of an empty triangle exists");
    }
}

pub fn rp2_flag() -> SimplicialComplex {
    flagify_by_edge_subdivision(rp2_6())
}

/// Mapping cone of the simplicial degree-`p` map from a `3p`-cycle onto a
/// triangle boundary.
pub fn moore(p: usize) -> SimplicialComplex {
    let x = |i: usize| format!("x{}", i % 3);
    let y = |i: usize| format!("y{:03}", i % (3 * p));
    let mut facets = Vec::new();
    for i in 0..3 * p {
        facets.push(vec![y(i), y(i + 1), x(i + 1)]);
        facets.push(vec![y(i), x(i), x(i + 1)]);
        facets.push(vec!["c".to_string(), y(i), y(i + 1)]);
    }
    named(&facets)
}
