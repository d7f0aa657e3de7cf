use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{vdot, vnorm};
use super::signature::SubsystemSignature;
use crate::error::{Error, Result};
use crate::scalar::{cr, to_f64, Real};

/// Pure state (or unnormalized intermediate) over a labeled signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket<T> {
    signature: SubsystemSignature,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> Ket<T> {
    pub fn new(signature: SubsystemSignature, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let expected = signature.total_dim();
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            signature,
            amplitudes,
        })
    }

    /// Like [`Ket::new`] but rejects states whose norm is not 1 within `tol`.
    pub fn normalized_from(
        signature: SubsystemSignature,
        amplitudes: Vec<Complex<T>>,
        tol: T,
    ) -> Result<Self> {
        let k = Self::new(signature, amplitudes)?;
        k.check_normalized(tol)?;
        Ok(k)
    }

    pub fn zero(signature: SubsystemSignature) -> Self {
        let n = signature.total_dim();
        Self {
            signature,
            amplitudes: vec![Complex::zero(); n],
        }
    }

    /// Computational basis state `|index⟩` of the full signature.
    pub fn basis(signature: SubsystemSignature, index: usize) -> Result<Self> {
        let n = signature.total_dim();
        if index >= n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: index + 1,
            });
        }
        let mut k = Self::zero(signature);
        k.amplitudes[index] = Complex::one();
        Ok(k)
    }

    /// `|index⟩` on a single labeled factor of dimension `dim`.
    pub fn basis_on(label: &str, dim: usize, index: usize) -> Result<Self> {
        Self::basis(SubsystemSignature::single(label, dim)?, index)
    }

    pub fn signature(&self) -> &SubsystemSignature {
        &self.signature
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> T {
        vnorm(&self.amplitudes)
    }

    pub fn check_normalized(&self, tol: T) -> Result<()> {
        let n = self.norm();
        if (n - T::one()).abs() > tol {
            return Err(Error::NotNormalized { norm: to_f64(n) });
        }
        Ok(())
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n <= T::min_positive_value() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(cr(T::one() / n)))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            signature: self.signature.clone(),
            amplitudes: self.amplitudes.iter().map(|a| *a * s).collect(),
        }
    }

    /// `self + other` over an identical signature.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_signature(other)?;
        Ok(Self {
            signature: self.signature.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    /// Linear combination `Σ w_k |k⟩`; all terms must share one signature.
    pub fn combine(terms: &[(Complex<T>, &Self)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptyFamily)?;
        let mut acc = Self::zero(first.signature.clone());
        for (w, k) in terms {
            acc.require_same_signature(k)?;
            for (a, b) in acc.amplitudes.iter_mut().zip(&k.amplitudes) {
                *a += *w * *b;
            }
        }
        Ok(acc)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.require_same_signature(other)?;
        Ok(vdot(&self.amplitudes, &other.amplitudes))
    }

    /// Kronecker product; the result signature is `self` followed by `other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let signature = self.signature.concat(&other.signature)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(*a * *b);
            }
        }
        Ok(Self {
            signature,
            amplitudes,
        })
    }

    /// Tensor product of several kets, left to right.
    pub fn tensor_all(parts: &[&Self]) -> Result<Self> {
        let (first, rest) = parts.split_first().ok_or(Error::EmptyFamily)?;
        rest.iter()
            .try_fold((*first).clone(), |acc, k| acc.tensor(k))
    }

    /// Same state with its factors permuted into `order` (a permutation of the labels).
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.signature.len() {
            return Err(Error::SignatureMismatch {
                left: self.signature.to_string(),
                right: order
                    .iter()
                    .map(|s| s.as_ref().to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            });
        }
        let positions = self.signature.positions(order)?;
        let signature = self.signature.select(order)?;
        let offsets = self.signature.offsets(&positions);
        let amplitudes = offsets.iter().map(|&o| self.amplitudes[o]).collect();
        Ok(Self {
            signature,
            amplitudes,
        })
    }

    /// Reorders to match `target`'s label order (same factors required).
    pub fn aligned_to(&self, target: &SubsystemSignature) -> Result<Self> {
        if !self.signature.same_factors(target) {
            return Err(Error::SignatureMismatch {
                left: self.signature.to_string(),
                right: target.to_string(),
            });
        }
        let order: Vec<&str> = target.labels().collect();
        self.reorder(&order)
    }

    /// Same amplitudes placed on new labels; dimensions must match entry by entry.
    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let dims = self.signature.dims();
        if labels.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                found: labels.len(),
            });
        }
        let signature = SubsystemSignature::new(
            labels
                .iter()
                .zip(dims)
                .map(|(l, d)| (l.as_ref().to_string(), d)),
        )?;
        Ok(Self {
            signature,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Contracts `⟨bra|` on the factors `bra` is defined over, leaving an
    /// (unnormalized) ket on the remaining factors in their original order.
    pub fn contract(&self, bra: &Self) -> Result<Self> {
        let bra_labels: Vec<&str> = bra.signature.labels().collect();
        let bra_pos = self.signature.positions(&bra_labels)?;
        for (p, e) in bra_pos.iter().zip(bra.signature.entries()) {
            if self.signature.entries()[*p].dim != e.dim {
                return Err(Error::SignatureMismatch {
                    left: self.signature.to_string(),
                    right: bra.signature.to_string(),
                });
            }
        }
        let rest_pos: Vec<usize> = (0..self.signature.len())
            .filter(|p| !bra_pos.contains(p))
            .collect();
        if rest_pos.is_empty() {
            return Err(Error::EmptySelection);
        }
        let rest_labels: Vec<&str> = rest_pos
            .iter()
            .map(|&p| self.signature.entries()[p].label.as_str())
            .collect();
        let signature = self.signature.select(&rest_labels)?;
        let rest = self.signature.offsets(&rest_pos);
        let sub = self.signature.offsets(&bra_pos);
        let amplitudes = rest
            .iter()
            .map(|&r| {
                sub.iter()
                    .zip(&bra.amplitudes)
                    .fold(Complex::zero(), |acc, (&s, b)| {
                        acc + b.conj() * self.amplitudes[r + s]
                    })
            })
            .collect();
        Ok(Self {
            signature,
            amplitudes,
        })
    }

    /// `|⟨self|other⟩|` after aligning factor order; equality up to global phase
    /// holds when this is 1.
    pub fn overlap_modulus(&self, other: &Self) -> Result<T> {
        let aligned = other.aligned_to(&self.signature)?;
        Ok(vdot(&self.amplitudes, &aligned.amplitudes).norm())
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn q(label: &str, amps: [f64; 2]) -> Ket<f64> {
        Ket::new(
            SubsystemSignature::single(label, 2).unwrap(),
            amps.iter().map(|a| c(*a, 0.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_tensor_one() {
        let k = q("q0", [1.0, 0.0]).tensor(&q("q1", [0.0, 1.0])).unwrap();
        assert_eq!(
            k.amplitudes(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        assert_eq!(k.signature().labels().collect::<Vec<_>>(), vec!["q0", "q1"]);
    }

    #[test]
    fn plus_tensor_plus_uniform() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let k = q("a", [h, h]).tensor(&q("b", [h, h])).unwrap();
        for a in k.amplitudes() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_rejects_duplicate_label() {
        let err = q("a", [1.0, 0.0]).tensor(&q("a", [1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(ref l) if l == "a"));
    }

    #[test]
    fn inner_basics() {
        let z = q("a", [1.0, 0.0]);
        let o = q("a", [0.0, 1.0]);
        assert_eq!(z.inner(&z).unwrap(), c(1.0, 0.0));
        assert_eq!(z.inner(&o).unwrap(), c(0.0, 0.0));
        assert!(z.inner(&q("b", [1.0, 0.0])).is_err());
    }

    #[test]
    fn reorder_swaps_factors() {
        let k = q("a", [1.0, 0.0]).tensor(&q("b", [0.0, 1.0])).unwrap();
        let r = k.reorder(&["b", "a"]).unwrap();
        assert_eq!(r.amplitudes()[2], c(1.0, 0.0));
        assert_eq!(k.overlap_modulus(&r).unwrap(), 1.0);
    }

    #[test]
    fn contract_picks_branch() {
        let k = q("a", [0.6, 0.8]).tensor(&q("b", [0.0, 1.0])).unwrap();
        let r = k.contract(&q("a", [0.0, 1.0])).unwrap();
        assert_eq!(r.signature().labels().collect::<Vec<_>>(), vec!["b"]);
        assert!((r.amplitudes()[1] - c(0.8, 0.0)).norm() < 1e-15);
        assert!(matches!(k.contract(&k), Err(Error::EmptySelection)));
    }

    #[test]
    fn normalize_rejects_zero() {
        let z = Ket::<f64>::zero(SubsystemSignature::single("a", 2).unwrap());
        assert!(matches!(z.normalize(), Err(Error::ZeroNorm)));
    }
}
