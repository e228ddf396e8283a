//! The discreteness test on three pairs: one sharing a fixed point, one where
//! the criterion fails, and one where the conjugation sequence collapses.

use qhyper::jorgensen::{jorgensen_test, DEFAULT_MAX_STEPS};
use qhyper::{sample, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs = [
        ("shared fixed point", sample::diagonal_elliptic(&[0.1, 0.25, 0.4]), sample::random_stabilizer(&mut rng, 2)),
        ("large translation", sample::diagonal_elliptic(&[0.9, 0.4]), sample::boost(1, 0, 1.5)),
        ("small rotation", sample::diagonal_elliptic(&[0.9, 0.9, 0.0]), sample::boost(2, 0, 0.3)),
    ];
    for (label, g, h) in pairs {
        let r = jorgensen_test(&g, &h, DEFAULT_MAX_STEPS, &tol).expect("g is elliptic");
        println!("{label}: {} (product {:.6})", r.verdict, r.criterion.product);
        if let Some(trace) = &r.trace {
            for s in trace.steps.iter().take(4) {
                println!("  k={:<3} |a|^2={:.12} |beta|={:.3e}", s.k, s.corner_modulus_sq, s.beta_norm);
            }
            println!("  ... {} after {} steps, {} distinct", trace.terminal, trace.steps.len(), trace.distinct_elements);
        }
        for n in &r.notes {
            println!("  note: {n}");
        }
    }
}
