//! Dense complex linear algebra over labeled tensor-product spaces.

mod density;
mod eigen;
mod ket;
mod matrix;
mod signature;

pub use density::{binary_entropy, entropy_of_spectrum, DensityMatrix};
pub use eigen::{eig_hermitian, eig_hermitian_with, eigenvalues_hermitian, Spectrum};
pub use ket::Ket;
pub use matrix::{vdot, vnorm, Matrix};
pub use signature::{Subsystem, SubsystemSignature};

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

pub fn tensor<T: Real>(a: &Ket<T>, b: &Ket<T>) -> Result<Ket<T>> {
    a.tensor(b)
}

pub fn inner<T: Real>(a: &Ket<T>, b: &Ket<T>) -> Result<Complex<T>> {
    a.inner(b)
}

pub fn density_of<T: Real>(k: &Ket<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_ket(k)
}

pub fn partial_trace<T: Real, S: AsRef<str>>(
    rho: &DensityMatrix<T>,
    keep: &[S],
) -> Result<DensityMatrix<T>> {
    rho.partial_trace(keep)
}

pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    rho.trace_distance(sigma)
}

pub fn entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    rho.entropy()
}
