//! Right eigenpairs `M v = v lambda` of quaternionic matrices through the
//! complex adjoint.

use qhyper::qmatrix::{adjoint_eigenvalues, right_eigenpairs};
use qhyper::{QMatrix, Quaternion};

fn show(label: &str, m: &QMatrix) {
    println!("{label}");
    println!("  adjoint spectrum: {:?}", adjoint_eigenvalues(m).expect("square"));
    for p in right_eigenpairs(m).expect("square") {
        let v: Vec<String> = p.vector.iter().map(ToString::to_string).collect();
        println!("  lambda = {:.6}, v = [{}], residual {:.1e}", p.value, v.join(", "), p.residual);
    }
}

fn main() {
    show("[[j]]", &QMatrix::diag(&[Quaternion::J]));

    let m = QMatrix::from_rows(&[
        vec![Quaternion::new(1.0, 0.0, 1.0, 0.0), Quaternion::I],
        vec![Quaternion::K, Quaternion::new(0.0, 2.0, 0.0, 0.0)],
    ])
    .expect("rectangular rows");
    show("2x2 with mixed units", &m);

    // a real eigenvalue with a two-dimensional quaternionic eigenspace
    show("2 I", &QMatrix::diag(&[Quaternion::real(2.0), Quaternion::real(2.0)]));
}
