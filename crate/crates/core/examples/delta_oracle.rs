//! The closed form for delta against a brute-force search over unit quaternions.

use qhyper::elliptic::{delta_bruteforce_oracle, delta_closed_form};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    println!("{:>8} {:>8} {:>14} {:>14} {:>10}", "theta_i", "theta_n", "closed", "oracle", "gap");
    for _ in 0..8 {
        let a = rng.random::<f64>() * std::f64::consts::PI;
        let b = rng.random::<f64>() * std::f64::consts::PI;
        let closed = delta_closed_form(a, b);
        let oracle = delta_bruteforce_oracle(a, b, 100_000);
        println!("{a:>8.4} {b:>8.4} {closed:>14.10} {oracle:>14.10} {:>10.2e}", closed - oracle);
    }
}
