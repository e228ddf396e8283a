//! The disk function f(t) against the two classical sufficient conditions for
//! pairs in SL(2,C).

use std::f64::consts::{PI, SQRT_2};

use qhyper::mobius::{compare_criteria, MobiusPair};
use qhyper::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() {
    let examples = [
        [c(-1.5, 0.0), c(0.0, 2.0), c(0.0, 2.0), c(2.0, 0.0)],
        [c(1.0, 0.0), c(SQRT_2, 0.0), c(SQRT_2, 0.0), c(3.0, 0.0)],
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
    ];
    for h in examples {
        let p = MobiusPair::new(PI / 4.0, h).expect("det h = 1");
        let r = compare_criteria(&p);
        println!("h = {:?}", h.map(|z| (z.re, z.im)));
        println!("  inf f ~ {:.9} at t = {:.6}, f(0) = {:.9}", r.f_inf, r.f_argmin, r.f_at_zero);
        println!("  |h|^2 + 2 = {:.6}, 1 + |bc| = {:.6}, 4(1 + |bc|) = {:.6}", r.norm_sq_plus_two, r.one_plus_bc, r.four_one_plus_bc);
        println!("  scaled: {:.6} / {:.6} / {:.6}", r.disk_value, r.norm_value, r.classical_value);
    }
}
