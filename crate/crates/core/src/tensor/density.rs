use num_complex::Complex;
use num_traits::Zero;

use super::eigen::{eig_hermitian, eigenvalues_hermitian, Spectrum};
use super::ket::Ket;
use super::matrix::Matrix;
use super::signature::SubsystemSignature;
use crate::error::{Error, Result};
use crate::scalar::{cr, lit, to_f64, Real};

/// Hermitian, unit-trace, positive operator over a labeled signature.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    signature: SubsystemSignature,
    matrix: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validating constructor: Hermitian, trace 1 and eigenvalues ≥ −tol.
    pub fn new(signature: SubsystemSignature, matrix: Matrix<T>, tol: T) -> Result<Self> {
        let rho = Self::from_parts_unchecked(signature, matrix)?;
        rho.validate(tol)?;
        Ok(rho)
    }

    /// Shape-checked only; used for intermediates whose validity follows by construction.
    pub fn from_parts_unchecked(signature: SubsystemSignature, matrix: Matrix<T>) -> Result<Self> {
        let n = signature.total_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: matrix.rows().max(matrix.cols()),
            });
        }
        Ok(Self { signature, matrix })
    }

    /// Pure-state projector `|k⟩⟨k|` of a normalized ket.
    pub fn from_ket(k: &Ket<T>) -> Result<Self> {
        let n = k.norm();
        if n <= T::min_positive_value() {
            return Err(Error::ZeroNorm);
        }
        k.check_normalized(T::assertion_tolerance())?;
        let a = k.amplitudes();
        Ok(Self {
            signature: k.signature().clone(),
            matrix: Matrix::outer(a, a),
        })
    }

    /// `I/d` over `signature`.
    pub fn maximally_mixed(signature: SubsystemSignature) -> Self {
        let n = signature.total_dim();
        let inv = T::one() / lit::<T>(n as f64);
        Self {
            signature,
            matrix: Matrix::identity(n).scale_real(inv),
        }
    }

    /// `Σ w_k ρ_k` over a shared signature.
    pub fn mixture(terms: &[(T, &Self)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptyFamily)?;
        let n = first.dim();
        let mut acc = Matrix::zeros(n, n);
        for (w, rho) in terms {
            first.require_same_signature(rho)?;
            acc = &acc + &rho.matrix.scale_real(*w);
        }
        Ok(Self {
            signature: first.signature.clone(),
            matrix: acc,
        })
    }

    /// Unnormalized projector `|v⟩⟨v|`, for building probability-weighted sums.
    pub fn weighted_projector(k: &Ket<T>) -> Self {
        let a = k.amplitudes();
        Self {
            signature: k.signature().clone(),
            matrix: Matrix::outer(a, a),
        }
    }

    pub fn signature(&self) -> &SubsystemSignature {
        &self.signature
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        let dev = self.matrix.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: to_f64(dev),
            });
        }
        let tr = self.trace();
        if (tr - cr(T::one())).norm() > tol {
            return Err(Error::InvalidDensity(format!(
                "trace {} + {}i",
                to_f64(tr.re),
                to_f64(tr.im)
            )));
        }
        let min = self.eigenvalues()?.last().copied().unwrap_or_else(T::zero);
        if min < -tol {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:e}",
                to_f64(min)
            )));
        }
        Ok(())
    }

    pub fn spectrum(&self) -> Result<Spectrum<T>> {
        eig_hermitian(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        eigenvalues_hermitian(&self.matrix)
    }

    /// Reduced state on `keep`, in the signature's original order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut kept_pos = self.signature.positions(keep)?;
        kept_pos.sort_unstable();
        let traced_pos: Vec<usize> = (0..self.signature.len())
            .filter(|p| !kept_pos.contains(p))
            .collect();
        let kept_labels: Vec<&str> = kept_pos
            .iter()
            .map(|&p| self.signature.entries()[p].label.as_str())
            .collect();
        let signature = self.signature.select(&kept_labels)?;

        let kept = self.signature.offsets(&kept_pos);
        let traced = self.signature.offsets(&traced_pos);
        let m = kept.len();
        let mut out = Matrix::zeros(m, m);
        for (i, &oi) in kept.iter().enumerate() {
            for (j, &oj) in kept.iter().enumerate() {
                let mut acc = Complex::zero();
                for &t in &traced {
                    acc += self.matrix[(oi + t, oj + t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self {
            signature,
            matrix: out,
        })
    }

    /// `½ Σ |λ_k(ρ − σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        self.require_same_signature(other)?;
        // fixed operand order keeps the result bit-identical under swapping
        let (x, y) = if self.precedes(other) {
            (self, other)
        } else {
            (other, self)
        };
        let diff = &x.matrix - &y.matrix;
        let eig = eigenvalues_hermitian(&diff)?;
        let sum = eig.iter().fold(T::zero(), |acc, l| acc + l.abs());
        Ok((sum / lit(2.0)).min(T::one()))
    }

    fn precedes(&self, other: &Self) -> bool {
        for (a, b) in self.matrix.as_slice().iter().zip(other.matrix.as_slice()) {
            for (x, y) in [(a.re, b.re), (a.im, b.im)] {
                if x != y {
                    return x < y;
                }
            }
        }
        true
    }

    /// von Neumann entropy in bits, with `0·log 0 = 0`.
    pub fn entropy(&self) -> Result<T> {
        let eig = self.eigenvalues()?;
        Ok(entropy_of_spectrum(&eig))
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.require_same_signature(other)?;
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }

    fn require_same_signature(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch {
                left: self.signature.to_string(),
                right: other.signature.to_string(),
            });
        }
        Ok(())
    }
}

/// `−Σ λ log2 λ`, skipping non-positive eigenvalues.
pub fn entropy_of_spectrum<T: Real>(eigenvalues: &[T]) -> T {
    let s = eigenvalues
        .iter()
        .filter(|&&l| l > T::zero())
        .fold(T::zero(), |acc, &l| acc - l * l.log2());
    s.max(T::zero())
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy<T: Real>(p: T) -> T {
    entropy_of_spectrum(&[p, T::one() - p])
}
