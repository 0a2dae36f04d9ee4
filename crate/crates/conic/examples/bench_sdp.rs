use covcone_core::{CovMatrix, Tolerances};
use covcone_conic::freespec::{membership_free, patterns_for};
use covcone_conic::sdp::{sdp_membership_with, SdpOptions};

fn main() {
    let gamma = CovMatrix::from_fn(3, |i, j| 2f64.powi((i + j + 2) as i32));
    let tol = Tolerances::default();
    let pset = patterns_for(3, 3).unwrap();
    for max in [100usize, 500, 2000, 10000] {
        let opts = SdpOptions { max_sweeps: max, ..Default::default() };
        let t = std::time::Instant::now();
        let out = sdp_membership_with(&gamma, &pset, &tol, &opts);
        println!("max {max}: {:?} -> {}", t.elapsed(), match out { Ok(c) => format!("verdict member={}", c.is_member()), Err(e) => format!("{e}") });
    }
    let t = std::time::Instant::now();
    let _ = membership_free(&gamma, 3, &tol);
    println!("default: {:?}", t.elapsed());
}
