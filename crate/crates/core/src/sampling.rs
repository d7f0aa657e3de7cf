//! Seeded random states, bases and unitaries for property checks.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::scalar::{lit, Real};
use crate::states::{qubit_basis, BasisPair};
use crate::tensor::{vdot, vnorm, Ket, Matrix, SubsystemSignature};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

/// Haar-random normalized ket.
pub fn random_ket<T: Real, R: Rng + ?Sized>(
    signature: &SubsystemSignature,
    rng: &mut R,
) -> Result<Ket<T>> {
    let amps = (0..signature.total_dim()).map(|_| gaussian(rng)).collect();
    Ket::new(signature.clone(), amps)?.normalize()
}

/// Haar-random `n × n` unitary (Gram–Schmidt on a complex Gaussian matrix).
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    random_isometry(n, n, rng)
}

/// Random `rows × cols` isometry, `rows ≥ cols`.
pub fn random_isometry<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut columns: Vec<Vec<Complex<T>>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<Complex<T>> = (0..rows).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &columns {
                let coef = vdot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= coef * *y;
                }
            }
        }
        let n = vnorm(&v);
        if n > lit(1e-8) {
            columns.push(v.iter().map(|x| *x / Complex::new(n, T::zero())).collect());
        }
    }
    Matrix::from_columns(rows, &columns).expect("column lengths match")
}

/// Basis pair with `θ` uniform on `[0, π]` and `φ` uniform on `[0, 2π)`.
pub fn random_basis<T: Real, R: Rng + ?Sized>(rng: &mut R) -> BasisPair<T> {
    let theta: f64 = rng.random_range(0.0..=std::f64::consts::PI);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    qubit_basis(lit(theta), lit(phi)).expect("sampled angles in range")
}
