//! Hermitian eigendecomposition for the small dense matrices this crate works
//! with (at most a few hundred rows).
//!
//! Two paths:
//! - 2×2 inputs use the closed form `(tr ± √(tr² − 4 det)) / 2` with an
//!   explicitly orthogonal eigenvector pair;
//! - everything else goes through cyclic complex Jacobi rotations.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, lit, to_f64, Real};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending, with eigenvectors as matching columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn leading(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let v = &self.eigenvectors;
        let lambda = Matrix::diagonal(&self.eigenvalues);
        v.matmul(&lambda).matmul(&v.adjoint())
    }

    /// `‖H − V Λ V†‖_max`.
    pub fn reconstruction_residual(&self, h: &Matrix<T>) -> T {
        self.reconstruct().max_abs_diff(h)
    }

    /// `‖V†V − I‖_max`.
    pub fn orthonormality_residual(&self) -> T {
        self.eigenvectors.isometry_deviation()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is rejected when `‖H − H†‖_max` exceeds the assertion tolerance
/// scaled by `max(1, ‖H‖_max)`.
pub fn eig_hermitian<T: Real>(h: &Matrix<T>) -> Result<Spectrum<T>> {
    let tol = T::assertion_tolerance() * T::one().max(h.max_abs());
    eig_hermitian_with(h, tol)
}

pub fn eig_hermitian_with<T: Real>(h: &Matrix<T>, hermitian_tol: T) -> Result<Spectrum<T>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let dev = h.hermitian_deviation();
    if dev > hermitian_tol {
        return Err(Error::NotHermitian {
            deviation: to_f64(dev),
        });
    }
    match h.rows() {
        0 => Ok(Spectrum {
            eigenvalues: vec![],
            eigenvectors: Matrix::zeros(0, 0),
        }),
        1 => Ok(Spectrum {
            eigenvalues: vec![h[(0, 0)].re],
            eigenvectors: Matrix::identity(1),
        }),
        2 => Ok(closed_form_2x2(h)),
        _ => jacobi(h),
    }
}

/// Eigenvalues only, descending.
pub fn eigenvalues_hermitian<T: Real>(h: &Matrix<T>) -> Result<Vec<T>> {
    Ok(eig_hermitian(h)?.eigenvalues)
}

fn closed_form_2x2<T: Real>(h: &Matrix<T>) -> Spectrum<T> {
    let two = lit::<T>(2.0);
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    // Average the two off-diagonal entries so tiny asymmetries don't bias the result.
    let b = (h[(0, 1)] + h[(1, 0)].conj()) / cr(two);
    let mean = (a + d) / two;
    let radius = ((a - d) / two).hypot(b.norm());
    if b.norm() <= T::epsilon() * T::one().max(a.abs().max(d.abs())) {
        let (hi, lo, eigenvectors) = if a >= d {
            (a, d, Matrix::identity(2))
        } else {
            let swap = Matrix::from_fn(2, 2, |i, j| {
                if i != j {
                    Complex::one()
                } else {
                    Complex::zero()
                }
            });
            (d, a, swap)
        };
        return Spectrum {
            eigenvalues: vec![hi, lo],
            eigenvectors,
        };
    }
    let hi = mean + radius;
    let lo = mean - radius;
    // (H − hi·I) v = 0 for v ∝ (b, hi − a) or (hi − d, b*); pick the larger.
    let v1 = [b, cr(hi - a)];
    let v2 = [cr(hi - d), b.conj()];
    let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
    let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
    let (x, y) = if n1 >= n2 {
        (v1[0] / cr(n1), v1[1] / cr(n1))
    } else {
        (v2[0] / cr(n2), v2[1] / cr(n2))
    };
    // second column is exactly orthogonal to the first
    let eigenvectors = Matrix::from_rows(&[vec![x, -y.conj()], vec![y, x.conj()]]).expect("2x2");
    Spectrum {
        eigenvalues: vec![hi, lo],
        eigenvectors,
    }
}

fn off_diagonal_max<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut m = T::zero();
    for p in 0..n {
        for q in (p + 1)..n {
            m = m.max(a[(p, q)].norm());
        }
    }
    m
}

fn jacobi<T: Real>(h: &Matrix<T>) -> Result<Spectrum<T>> {
    let n = h.rows();
    // Hermitian part, so the rotations see an exactly symmetric start.
    let mut a = Matrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) / cr(lit(2.0)));
    let mut v = Matrix::<T>::identity(n);
    let scale = T::one().max(a.max_abs());
    let threshold = T::jacobi_threshold() * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_max(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_max(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `J = D·P` with `D` removing the phase of `a[p][q]` and `P`
/// the real symmetric Jacobi rotation; `A ← J†AJ`, `V ← VJ`.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase = apq / cr(r);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (lit::<T>(2.0) * r);
    let t = if theta == T::zero() {
        T::one()
    } else {
        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    let c = cr(cs);
    let s = cr(sn);
    let ph_conj = phase.conj();

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * ph_conj * akq;
        a[(k, q)] = s * akp + c * ph_conj * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * phase * aqk;
        a[(q, k)] = s * apk + c * phase * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = cr(a[(p, p)].re);
    a[(q, q)] = cr(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * ph_conj * vkq;
        v[(k, q)] = s * vkp + c * ph_conj * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn diagonal_sorted_descending() {
        let h = Matrix::<f64>::diagonal(&[0.3, 0.7]);
        let s = eig_hermitian(&h).unwrap();
        assert_eq!(s.eigenvalues, vec![0.7, 0.3]);
        assert!(s.reconstruction_residual(&h) < 1e-15);
    }

    #[test]
    fn two_by_two_with_complex_coherence() {
        // ½[[1, m*],[m, 1]] with |m| = 0.3 → (0.65, 0.35)
        let m = c::<f64>(0.3 * 0.6, 0.3 * 0.8);
        let h = Matrix::from_rows(&[
            vec![c(0.5, 0.0), m.conj() * 0.5],
            vec![m * 0.5, c(0.5, 0.0)],
        ])
        .unwrap();
        let s = eig_hermitian(&h).unwrap();
        assert!((s.eigenvalues[0] - 0.65).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 0.35).abs() < 1e-15);
        assert!(s.reconstruction_residual(&h) < 1e-15);
        assert!(s.orthonormality_residual() < 1e-15);
    }

    #[test]
    fn two_by_two_swapped_diagonal() {
        let h = Matrix::<f64>::diagonal(&[0.1, 0.9]);
        let s = eig_hermitian(&h).unwrap();
        assert_eq!(s.eigenvalues, vec![0.9, 0.1]);
        assert!(s.reconstruction_residual(&h) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = Matrix::from_rows(&[
            vec![c::<f64>(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(eig_hermitian(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_rectangular() {
        let h = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(eig_hermitian(&h), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn jacobi_three_by_three_known_spectrum() {
        // [[2, i, 0], [-i, 2, 0], [0, 0, 5]] has eigenvalues 5, 3, 1
        let h = Matrix::from_rows(&[
            vec![c::<f64>(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)],
        ])
        .unwrap();
        let s = eig_hermitian(&h).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([5.0, 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-13);
        }
        assert!(s.reconstruction_residual(&h) < 1e-13);
    }

    #[test]
    fn zero_matrix() {
        let h = Matrix::<f64>::zeros(4, 4);
        let s = eig_hermitian(&h).unwrap();
        assert!(s.eigenvalues.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn works_in_f32() {
        let h = Matrix::<f32>::from_fn(3, 3, |i, j| {
            if i == j {
                Complex::new(1.0 + i as f32, 0.0)
            } else {
                Complex::new(0.25, if i < j { 0.5 } else { -0.5 })
            }
        });
        let s = eig_hermitian(&h).unwrap();
        assert!(s.reconstruction_residual(&h) < 1e-5);
    }
}
