//! Qubit bases, singlets, prescribed-overlap pairs and Gram matrices.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, lit, to_f64, Real};
use crate::tensor::{Ket, Matrix, SubsystemSignature};

/// Label used for the kets stored inside a [`BasisPair`]; relabel with
/// [`BasisPair::primary_on`] / [`BasisPair::complement_on`] before use.
pub const BASIS_LABEL: &str = "q";

/// Orthonormal qubit pair `{|ψ⟩, |ψ̄⟩}` at Bloch angles `(θ, φ)`.
///
/// `|ψ⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and
/// `|ψ̄⟩ = −e^{−iφ} sin(θ/2)|0⟩ + cos(θ/2)|1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPair<T> {
    pub theta: T,
    pub phi: T,
    pub primary: Ket<T>,
    pub complement: Ket<T>,
}

impl<T: Real> BasisPair<T> {
    pub fn computational() -> Self {
        qubit_basis(T::zero(), T::zero()).expect("zero angles are in range")
    }

    pub fn primary_on(&self, label: &str) -> Ket<T> {
        self.primary.relabel(&[label]).expect("qubit relabel")
    }

    pub fn complement_on(&self, label: &str) -> Ket<T> {
        self.complement.relabel(&[label]).expect("qubit relabel")
    }

    /// `(primary, complement)` on `label`, in that order.
    pub fn on(&self, label: &str) -> [Ket<T>; 2] {
        [self.primary_on(label), self.complement_on(label)]
    }
}

pub fn qubit_basis<T: Real>(theta: T, phi: T) -> Result<BasisPair<T>> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::AngleOutOfRange {
            name: "theta",
            value: to_f64(theta),
            lo: 0.0,
            hi: std::f64::consts::PI,
        });
    }
    if !(phi >= T::zero() && phi < T::TAU()) {
        return Err(Error::AngleOutOfRange {
            name: "phi",
            value: to_f64(phi),
            lo: 0.0,
            hi: std::f64::consts::TAU,
        });
    }
    let half = theta / lit(2.0);
    let (s, c) = half.sin_cos();
    let e = Complex::from_polar(T::one(), phi);
    let sig = SubsystemSignature::single(BASIS_LABEL, 2)?;
    let primary = Ket::new(sig.clone(), vec![cr(c), e * cr(s)])?;
    let complement = Ket::new(sig, vec![-(e.conj() * cr(s)), cr(c)])?;
    Ok(BasisPair {
        theta,
        phi,
        primary,
        complement,
    })
}

/// `(1/√2)(|ψ⟩|ψ̄⟩ − |ψ̄⟩|ψ⟩)` over `(first, second)`.
pub fn singlet<T: Real>(basis: &BasisPair<T>, labels: (&str, &str)) -> Result<Ket<T>> {
    if labels.0 == labels.1 {
        return Err(Error::DuplicateLabel(labels.0.to_string()));
    }
    let [p0, c0] = basis.on(labels.0);
    let [p1, c1] = basis.on(labels.1);
    let a = p0.tensor(&c1)?;
    let b = c0.tensor(&p1)?;
    let h = cr(T::FRAC_1_SQRT_2());
    Ket::combine(&[(h, &a), (-h, &b)])
}

/// Non-empty ordered list of normalized kets over one signature.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily<T> {
    members: Vec<Ket<T>>,
}

impl<T: Real> StateFamily<T> {
    pub fn new(members: Vec<Ket<T>>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        for m in &members[1..] {
            if m.signature() != first.signature() {
                return Err(Error::SignatureMismatch {
                    left: first.signature().to_string(),
                    right: m.signature().to_string(),
                });
            }
        }
        for m in &members {
            m.check_normalized(T::assertion_tolerance())?;
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Ket<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn signature(&self) -> &SubsystemSignature {
        self.members[0].signature()
    }

    /// Every member tensored on the right with `suffix`.
    pub fn tensor_each(&self, suffix: &Ket<T>) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.tensor(suffix))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members })
    }

    /// Largest modulus of `gram − I`.
    pub fn orthonormality_deviation(&self) -> T {
        let g = gram(self);
        g.max_abs_diff(&Matrix::identity(self.len()))
    }

    /// True when the family is a complete orthonormal basis of its signature.
    pub fn is_orthonormal_basis(&self, tol: T) -> bool {
        self.len() == self.signature().total_dim() && self.orthonormality_deviation() <= tol
    }
}

/// Product basis `{a ⊗ b}` enumerated with the left factor most significant.
pub fn product_family<T: Real>(left: &[Ket<T>], right: &[Ket<T>]) -> Result<StateFamily<T>> {
    let mut members = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            members.push(a.tensor(b)?);
        }
    }
    StateFamily::new(members)
}

/// `G[i][j] = ⟨f_i|f_j⟩`.
pub fn gram<T: Real>(f: &StateFamily<T>) -> Matrix<T> {
    let m = f.members();
    let n = m.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = crate::tensor::vdot(m[i].amplitudes(), m[j].amplitudes());
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

/// True when some pair of distinct members has overlap modulus below `tol`.
pub fn has_orthogonal_pair<T: Real>(f: &StateFamily<T>, tol: T) -> bool {
    let g = gram(f);
    let n = f.len();
    (0..n).any(|i| ((i + 1)..n).any(|j| g[(i, j)].norm() < tol))
}

/// Two normalized kets over `signature` with `⟨first|second⟩ = target`:
/// `first = e₀`, `second = target·e₀ + √(1 − |target|²)·e₁`.
pub fn kets_with_overlap<T: Real>(
    target: Complex<T>,
    signature: &SubsystemSignature,
) -> Result<(Ket<T>, Ket<T>)> {
    let modulus = target.norm();
    if modulus > T::one() + T::epsilon() * lit(4.0) {
        return Err(Error::OverlapOutOfRange {
            modulus: to_f64(modulus),
        });
    }
    let n = signature.total_dim();
    let mut a = vec![Complex::zero(); n];
    a[0] = Complex::one();
    let mut b = vec![Complex::zero(); n];
    b[0] = target;
    b[1] = cr((T::one() - modulus * modulus).max(T::zero()).sqrt());
    Ok((
        Ket::new(signature.clone(), a)?,
        Ket::new(signature.clone(), b)?,
    ))
}
