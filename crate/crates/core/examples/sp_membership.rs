//! Membership in Sp(n,1), the closed-form inverse and the Bergman distance.

use qhyper::geometry::{apply, bergman_distance, check_membership, membership_report, HermitianSpace, ProjectivePoint};
use qhyper::{sample, QMatrix, Quaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let space = HermitianSpace::new(2).expect("n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = sample::random_isometry(&mut rng, 2, 1.0);

    let report = membership_report(g.matrix(), &space).expect("square");
    for (label, r) in report.identities() {
        println!("{label:<28} {r:.2e}");
    }

    let numeric = g.matrix().inverse_via_adjoint().expect("invertible");
    println!("|J g* J - g^-1| = {:.2e}", g.group_inverse().matrix().max_abs_diff(&numeric));

    let stretched = QMatrix::diag(&[Quaternion::real(2.0), Quaternion::ONE, Quaternion::ONE]);
    match check_membership(&stretched, &space, 1e-8) {
        Ok(_) => println!("diag(2,1,1) accepted"),
        Err(e) => println!("diag(2,1,1) rejected: {e}"),
    }

    let o = ProjectivePoint::origin(2);
    let go = apply(&g, &o).expect("same dimension");
    println!("rho(o, g o) = {:.9}", bergman_distance(&o, &go, &space).expect("interior points"));
}
