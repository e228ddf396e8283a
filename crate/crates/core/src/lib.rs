//! Quaternionic hyperbolic geometry and a Jørgensen-type discreteness test.
//!
//! The crate is organized bottom-up:
//!
//! - [`quaternion`]: quaternion arithmetic and the complex split `c1 + c2 j`.
//! - [`qmatrix`]: dense quaternionic matrices, the complex adjoint and right
//!   eigenpairs.
//! - [`geometry`]: the signature-`(n,1)` Hermitian form, projective points,
//!   the Bergman distance and membership in `Sp(n,1)`.
//! - [`elliptic`]: eigenvalue classes of elliptic elements, the invariant
//!   `delta(g)`, fixed point sets and a brute-force oracle for `delta`.
//! - [`jorgensen`]: the two-generator test, run as an executable iteration
//!   `h_{k+1} = h_k g h_k^{-1}` with its contraction evidence.
//! - [`mobius`]: the embedding `SL(2,C) -> Sp(1,1)` and the `f(t)` criterion
//!   with its comparisons.
//! - [`cli`]: report types, input parsing and the reproduction battery used
//!   by the `qhyper` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

// negated comparisons are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod elliptic;
mod error;
pub mod expr;
pub mod geometry;
pub mod jorgensen;
pub mod mobius;
pub mod optimize;
pub mod qmatrix;
pub mod quaternion;
pub mod sample;
pub mod sphere;
mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qmatrix::{QMatrix, RightEigenpair};
pub use quaternion::{ComplexSplit, Quaternion};
pub use tolerance::Tolerances;

/// Serde adapter writing a complex number as `[re, im]`.
pub mod serde_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }

    /// Same encoding for sequences of complex numbers.
    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            let raw: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
            raw.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            let raw = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        }
    }
}
