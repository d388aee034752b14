//! Times the boundary ranks of the flag RP^2 cover.

use std::time::Instant;

use raag_growth::library::rp2_flag;
use raag_growth::linalg::{gfp_rank, PrimeField};
use raag_growth::salvetti::{build_cover_complex, CoverSpec, DEFAULT_CELL_BUDGET};

fn main() {
    let l = rp2_flag();
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let p: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(2);
    println!("L: {} vertices, f = {}", l.num_vertices(), l.f_vector());
    let cover = build_cover_complex(&l, &CoverSpec::uniform(&l, n), DEFAULT_CELL_BUDGET).unwrap();
    println!("dims {:?}", cover.chain.dims());
    let f = PrimeField::new(p).unwrap();
    for k in 1..cover.chain.len() {
        let b = cover.chain.boundary(k);
        let t = Instant::now();
        let r = gfp_rank(&b, f);
        println!("rank d{k} ({}x{}, nnz {}) mod {p} = {r} in {:.2?}", b.rows(), b.cols(), b.nnz(), t.elapsed());
    }
}
