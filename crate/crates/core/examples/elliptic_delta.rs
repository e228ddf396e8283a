//! Eigenvalue classes, delta(g) and fixed point sets of elliptic elements.

use std::f64::consts::PI;

use qhyper::elliptic::{analyze_elliptic, delta_closed_form};
use qhyper::geometry::apply;
use qhyper::{sample, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    for angles in [vec![PI / 3.0, -PI / 3.0], vec![0.4, 1.3, 2.2], vec![0.7, 0.7, 0.7]] {
        let g = sample::diagonal_elliptic(&angles);
        let p = analyze_elliptic(&g, &tol).expect("elliptic");
        println!("angles {angles:.4?}");
        for c in &p.classes {
            println!("  class angle {:.6} x{} {:?}", c.angle, c.multiplicity, c.type_tag);
        }
        println!("  delta = {:.12}, {} with fixed set of dimension {}", p.delta, p.kind, p.fixed_set_dimension);

        for q in p.fixed_set.sample_points(&mut rng, 3) {
            let moved = apply(&g, &q).expect("same dimension").max_abs_diff(&q);
            println!("  sampled fixed point moves by {moved:.1e}");
        }
    }

    println!("closed form at (pi/6, -pi/6): {}", delta_closed_form(PI / 6.0, -PI / 6.0));
}
