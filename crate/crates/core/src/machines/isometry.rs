use num_complex::Complex;
use num_traits::{One, Zero};

use super::{check_consistency_with, MachineSpec};
use crate::error::{Error, Result};
use crate::scalar::{cr, lit, to_f64, Real};
use crate::tensor::{vdot, vnorm, Matrix, SubsystemSignature};

/// Residual norm below which a lexicographic completion candidate is skipped.
const COMPLETION_THRESHOLD: f64 = 1e-6;

/// Isometry `M` (output dim × input dim) between two signatures.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMachine<T> {
    matrix: Matrix<T>,
    input_signature: SubsystemSignature,
    output_signature: SubsystemSignature,
}

impl<T: Real> LinearMachine<T> {
    /// Rejects matrices whose `M†M` deviates from `I` by more than `tol`.
    pub fn new(
        matrix: Matrix<T>,
        input_signature: SubsystemSignature,
        output_signature: SubsystemSignature,
        tol: T,
    ) -> Result<Self> {
        let lm = Self::from_parts_unchecked(matrix, input_signature, output_signature)?;
        let dev = lm.isometry_deviation();
        if !(dev <= tol) {
            return Err(Error::NotOrthonormal {
                deviation: to_f64(dev),
            });
        }
        Ok(lm)
    }

    fn from_parts_unchecked(
        matrix: Matrix<T>,
        input_signature: SubsystemSignature,
        output_signature: SubsystemSignature,
    ) -> Result<Self> {
        if matrix.cols() != input_signature.total_dim() {
            return Err(Error::LengthMismatch {
                expected: input_signature.total_dim(),
                found: matrix.cols(),
            });
        }
        if matrix.rows() != output_signature.total_dim() {
            return Err(Error::LengthMismatch {
                expected: output_signature.total_dim(),
                found: matrix.rows(),
            });
        }
        Ok(Self {
            matrix,
            input_signature,
            output_signature,
        })
    }

    pub fn identity(signature: SubsystemSignature) -> Self {
        let n = signature.total_dim();
        Self {
            matrix: Matrix::identity(n),
            input_signature: signature.clone(),
            output_signature: signature,
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn input_signature(&self) -> &SubsystemSignature {
        &self.input_signature
    }

    pub fn output_signature(&self) -> &SubsystemSignature {
        &self.output_signature
    }

    /// `‖M†M − I‖_max`.
    pub fn isometry_deviation(&self) -> T {
        self.matrix.isometry_deviation()
    }

    /// Largest `‖M·input − output‖` over the declared pairs of `spec`.
    pub fn pair_residual(&self, spec: &MachineSpec<T>) -> T {
        spec.pairs().iter().fold(T::zero(), |acc, (i, o)| {
            let image = self.matrix.mul_vec(i.amplitudes());
            let diff: Vec<_> = image
                .iter()
                .zip(o.amplitudes())
                .map(|(a, b)| *a - *b)
                .collect();
            acc.max(vnorm(&diff))
        })
    }
}

/// Orthogonalizes `u` against `basis` twice (classical Gram–Schmidt with
/// reorthogonalization), applying the same combination to `shadow` if given.
fn orthogonalize<T: Real>(
    u: &mut [Complex<T>],
    mut shadow: Option<&mut [Complex<T>]>,
    basis: &[Vec<Complex<T>>],
    shadow_basis: &[Vec<Complex<T>>],
) {
    for _ in 0..2 {
        for (k, q) in basis.iter().enumerate() {
            let coef = vdot(q, u);
            if coef.is_zero() {
                continue;
            }
            for (x, y) in u.iter_mut().zip(q) {
                *x -= coef * *y;
            }
            if let Some(v) = shadow.as_deref_mut() {
                for (x, y) in v.iter_mut().zip(&shadow_basis[k]) {
                    *x -= coef * *y;
                }
            }
        }
    }
}

/// Orthonormal completion of `basis` in dimension `dim`, built by running
/// Gram–Schmidt over `e₀, e₁, …` in order until `count` vectors are found.
fn lexicographic_completion<T: Real>(
    basis: &[Vec<Complex<T>>],
    dim: usize,
    count: usize,
) -> Vec<Vec<Complex<T>>> {
    let mut all: Vec<Vec<Complex<T>>> = basis.to_vec();
    let mut out = Vec::with_capacity(count);
    for e in 0..dim {
        if out.len() == count {
            break;
        }
        let mut u = vec![Complex::zero(); dim];
        u[e] = Complex::one();
        orthogonalize(&mut u, None, &all, &[]);
        let n = vnorm(&u);
        if n > lit(COMPLETION_THRESHOLD) {
            let u: Vec<_> = u.iter().map(|x| *x / cr(n)).collect();
            all.push(u.clone());
            out.push(u);
        }
    }
    debug_assert_eq!(out.len(), count, "standard basis spans the space");
    out
}

/// Isometry reproducing every declared pair of a Gram-consistent spec.
///
/// The map is fixed on the span of the inputs; the orthogonal complement is
/// sent to a lexicographically completed orthonormal set of the output
/// complement, so the result is deterministic.
pub fn extend_to_isometry<T: Real>(m: &MachineSpec<T>) -> Result<LinearMachine<T>> {
    let tol = T::assertion_tolerance();
    let report = check_consistency_with(m, tol);
    if !report.consistent {
        return Err(Error::InconsistentGram(Box::new(report.to_f64())));
    }

    let n_in = m.input_signature().total_dim();
    let n_out = m.output_signature().total_dim();
    let dependency = tol.sqrt();

    let mut qs: Vec<Vec<Complex<T>>> = Vec::new();
    let mut ws: Vec<Vec<Complex<T>>> = Vec::new();
    for (index, (input, output)) in m.pairs().iter().enumerate() {
        let mut u = input.amplitudes().to_vec();
        let mut v = output.amplitudes().to_vec();
        orthogonalize(&mut u, Some(&mut v), &qs, &ws);
        let un = vnorm(&u);
        if un <= dependency {
            // dependent input: its output must already be the image of the
            // same combination of earlier outputs
            let vn = vnorm(&v);
            if vn > dependency {
                return Err(Error::DependentInputsConflict {
                    index,
                    deviation: to_f64(vn),
                });
            }
            continue;
        }
        let inv = cr(T::one() / un);
        qs.push(u.iter().map(|x| *x * inv).collect());
        ws.push(v.iter().map(|x| *x * inv).collect());
    }

    let rank = qs.len();
    let q_rest = lexicographic_completion(&qs, n_in, n_in - rank);
    let w_rest = lexicographic_completion(&ws, n_out, n_in - rank);

    let mut matrix = Matrix::zeros(n_out, n_in);
    for (w, q) in ws.iter().chain(&w_rest).zip(qs.iter().chain(&q_rest)) {
        for i in 0..n_out {
            if w[i].is_zero() {
                continue;
            }
            for j in 0..n_in {
                matrix[(i, j)] += w[i] * q[j].conj();
            }
        }
    }
    LinearMachine::from_parts_unchecked(
        matrix,
        m.input_signature().clone(),
        m.output_signature().clone(),
    )
}
