//! Quaternion arithmetic, the complex split and similarity classes.

use qhyper::{Complex64, Quaternion};

fn main() {
    let z = Complex64::new(1.5, -2.0);
    let q = Quaternion::from(z);

    // j does not commute with complex numbers
    println!("z j      = {}", q * Quaternion::J);
    println!("j conj z = {}", Quaternion::J * q.conj());

    let w = Quaternion::new(0.5, 1.0, -2.0, 0.25);
    let split = w.split();
    println!("{w} = ({}) + ({}) j", split.c1, split.c2);
    assert_eq!(split.assemble(), w);

    // a unit quaternion is similar to exactly one e^{i theta} with theta in [0, pi]
    let u = w / w.norm();
    let rep = u.class_representative();
    println!("|w|^-1 w ~ {rep}, angle {:.6}", u.class_angle());
    let conj = u.conjugate_by(&Quaternion::new(0.3, -0.7, 0.1, 0.9));
    println!("conjugate {conj} has angle {:.6}", conj.class_angle());

    let inv = w.try_inverse(1e-15).expect("nonzero");
    println!("w w^-1 = {}", w * inv);
}
