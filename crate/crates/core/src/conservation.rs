//! Entanglement bookkeeping for the strong cloner acting on one half of
//! `(1/√2)(|0⟩_A|ψ_i⟩|α_i⟩ + |1⟩_A|ψ_j⟩|α_j⟩)`, and the constructive
//! unitary between two families with equal Gram matrices.
//!
//! Overlaps are `a = ⟨ψ_i|ψ_j⟩`, `b = ⟨α_i|α_j⟩`, `c = ⟨C_i|C_j⟩`. Alice's
//! marginal has coherence `a·b/2` before the machine and `a²·c/2` after it,
//! so its leading eigenvalue moves from `½ + |a||b|/2` to `½ + |a|²|c|/2`
//! unless `|b| = |a||c|`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::machines::{
    apply_branchwise, apply_linear, check_consistency, extend_to_isometry, preset_strong_cloner,
    ConsistencyReport, Layout, LinearMachine, MachineMode, MachineSpec,
};
use crate::scalar::{cr, lit, to_f64, Real};
use crate::states::{gram, kets_with_overlap, StateFamily};
use crate::tensor::{DensityMatrix, Ket, Matrix, SubsystemSignature};

pub const ALICE: &str = "A";

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationScenario<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    /// Probability of Alice's `|0⟩` branch; `½` unless built weighted.
    pub weight0: T,
    pub layout: Layout,
    pub psi: (Ket<T>, Ket<T>),
    pub alpha: (Ket<T>, Ket<T>),
    /// `(|C_i⟩, |C_j⟩)` on the `(α, C)` register.
    pub ancilla_out: (Ket<T>, Ket<T>),
    /// Shared state over `(A, B_psi, B_alpha)`.
    pub shared: Ket<T>,
    pub machine: MachineSpec<T>,
}

/// Shared state with equal branch amplitudes `1/√2`.
pub fn build_conservation<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    layout: Layout,
) -> Result<ConservationScenario<T>> {
    build_conservation_weighted(a, b, c, lit(0.5), layout)
}

/// Shared state `√p|0⟩|ψ_iα_i⟩ + √(1−p)|1⟩|ψ_jα_j⟩` with `p = weight0`.
pub fn build_conservation_weighted<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    weight0: T,
    layout: Layout,
) -> Result<ConservationScenario<T>> {
    if !(weight0 >= T::zero() && weight0 <= T::one()) {
        return Err(Error::InvalidDensity(format!(
            "branch weight {} outside [0, 1]",
            to_f64(weight0)
        )));
    }
    let psi = kets_with_overlap(a, &SubsystemSignature::single(layout.psi.clone(), 2)?)?;
    let alpha = kets_with_overlap(b, &SubsystemSignature::single(layout.alpha.clone(), 2)?)?;
    let ancilla_out = kets_with_overlap(c, &layout.strong_register()?)?;

    let alice = SubsystemSignature::single(ALICE, 2)?;
    let zero = Ket::basis(alice.clone(), 0)?;
    let one = Ket::basis(alice, 1)?;
    let branch0 = Ket::tensor_all(&[&zero, &psi.0, &alpha.0])?;
    let branch1 = Ket::tensor_all(&[&one, &psi.1, &alpha.1])?;
    let shared = Ket::combine(&[
        (cr(weight0.sqrt()), &branch0),
        (cr((T::one() - weight0).sqrt()), &branch1),
    ])?;

    let machine = preset_strong_cloner(
        (&psi.0, &psi.1),
        (&alpha.0, &alpha.1),
        (&ancilla_out.0, &ancilla_out.1),
        &layout,
    )?;
    Ok(ConservationScenario {
        a,
        b,
        c,
        weight0,
        layout,
        psi,
        alpha,
        ancilla_out,
        shared,
        machine,
    })
}

impl<T: Real> ConservationScenario<T> {
    pub fn bob_labels(&self) -> [&str; 2] {
        [self.layout.psi.as_str(), self.layout.alpha.as_str()]
    }

    /// Realized `(⟨ψ_i|ψ_j⟩, ⟨α_i|α_j⟩, ⟨C_i|C_j⟩)`.
    pub fn realized_overlaps(&self) -> Result<(Complex<T>, Complex<T>, Complex<T>)> {
        Ok((
            self.psi.0.inner(&self.psi.1)?,
            self.alpha.0.inner(&self.alpha.1)?,
            self.ancilla_out.0.inner(&self.ancilla_out.1)?,
        ))
    }

    /// Shared state with Bob's blank register and ancilla attached.
    pub fn shared_with_ancillas(&self) -> Result<Ket<T>> {
        let blank = Ket::basis_on(&self.layout.blank, 2, 0)?;
        Ket::tensor_all(&[&self.shared, &blank, &self.layout.ancilla_ready()?])
    }

    pub fn consistency(&self) -> ConsistencyReport<T> {
        check_consistency(&self.machine)
    }
}

pub fn alice_marginal_before<T: Real>(s: &ConservationScenario<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_ket(&s.shared)?.partial_trace(&[ALICE])
}

/// State after the strong cloner has replaced each of Bob's branches by its
/// declared output.
pub fn state_after<T: Real>(s: &ConservationScenario<T>) -> Result<Ket<T>> {
    apply_branchwise(&s.machine, &s.shared, ALICE)
}

pub fn alice_marginal_after<T: Real>(s: &ConservationScenario<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_ket(&state_after(s)?)?.partial_trace(&[ALICE])
}

/// Alice's marginal after Bob applies the isometric extension of the strong
/// cloner; fails with `InconsistentGram` when no such isometry exists.
pub fn alice_marginal_after_isometry<T: Real>(
    s: &ConservationScenario<T>,
) -> Result<DensityMatrix<T>> {
    let lm = extend_to_isometry(&s.machine.clone().with_mode(MachineMode::LinearExtension))?;
    let acted: Vec<&str> = s.machine.input_signature().labels().collect();
    let post = apply_linear(&lm, &s.shared_with_ancillas()?, &acted)?;
    DensityMatrix::from_ket(&post)?.partial_trace(&[ALICE])
}

/// Alice's marginal `[[p, √(pq)·coh*], [√(pq)·coh, q]]` with `p = weight0`,
/// `q = 1 − p`; at `p = ½` the `|1⟩⟨0|` entry is `coh/2`.
pub fn alice_closed_form<T: Real>(weight0: T, coherence: Complex<T>) -> Matrix<T> {
    let q = T::one() - weight0;
    let off = coherence * cr((weight0 * q).sqrt());
    Matrix::from_rows(&[vec![cr(weight0), off.conj()], vec![off, cr(q)]]).expect("2x2")
}

/// `½ + |a||b|/2`.
pub fn lambda_before<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let half = lit::<T>(0.5);
    half + a.norm() * b.norm() * half
}

/// `½ + |a|²|c|/2`.
pub fn lambda_after<T: Real>(a: Complex<T>, c: Complex<T>) -> T {
    let half = lit::<T>(0.5);
    half + a.norm() * a.norm() * c.norm() * half
}

/// Leading eigenvalue of `[[p, √(pq)·m*], [√(pq)·m, q]]` with `q = 1 − p`:
/// `½ + ½√((p − q)² + 4pq|m|²)`. Reduces to the equal-weight forms at `p = ½`.
pub fn lambda_weighted<T: Real>(weight0: T, overlap_modulus: T) -> T {
    let half = lit::<T>(0.5);
    let q = T::one() - weight0;
    let d = weight0 - q;
    half + half * (d * d + lit::<T>(4.0) * weight0 * q * overlap_modulus * overlap_modulus).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementDelta<T> {
    /// `λ_after − λ_before` from the numerically diagonalized marginals.
    pub delta_lambda: T,
    /// `S(ρ_after) − S(ρ_before)` in bits.
    pub delta_entropy: T,
    pub lambda_before: T,
    pub lambda_after: T,
    pub entropy_before: T,
    pub entropy_after: T,
}

pub fn entanglement_delta<T: Real>(s: &ConservationScenario<T>) -> Result<EntanglementDelta<T>> {
    let before = alice_marginal_before(s)?;
    let after = alice_marginal_after(s)?;
    let eb = before.eigenvalues()?;
    let ea = after.eigenvalues()?;
    let entropy_before = crate::tensor::entropy_of_spectrum(&eb);
    let entropy_after = crate::tensor::entropy_of_spectrum(&ea);
    Ok(EntanglementDelta {
        delta_lambda: ea[0] - eb[0],
        delta_entropy: entropy_after - entropy_before,
        lambda_before: eb[0],
        lambda_after: ea[0],
        entropy_before,
        entropy_after,
    })
}

/// Isometry `U` with `U·f_k = g_k` for every member, built on `span(f)` and
/// completed deterministically.
pub fn equivalence_unitary<T: Real>(
    f: &StateFamily<T>,
    g: &StateFamily<T>,
) -> Result<LinearMachine<T>> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let din = f.signature().total_dim();
    let dout = g.signature().total_dim();
    if dout < din {
        return Err(Error::DimensionIncompatible {
            input: din,
            output: dout,
        });
    }
    let deviation = gram(f).max_abs_diff(&gram(g));
    if !(deviation < T::assertion_tolerance()) {
        return Err(Error::GramMismatch {
            max_deviation: to_f64(deviation),
        });
    }
    let pairs = f
        .members()
        .iter()
        .cloned()
        .zip(g.members().iter().cloned())
        .collect();
    let spec = MachineSpec::new(
        f.signature().clone(),
        g.signature().clone(),
        pairs,
        MachineMode::LinearExtension,
    )?;
    extend_to_isometry(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn scenario(a: f64, b: f64, cc: f64) -> ConservationScenario<f64> {
        build_conservation(c(a, 0.0), c(b, 0.0), c(cc, 0.0), Layout::default()).unwrap()
    }

    #[test]
    fn orthogonal_branches_give_maximally_mixed() {
        let s = scenario(0.0, 0.7, 0.2);
        let rho = alice_marginal_before(&s).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&Matrix::identity(2).scale_real(0.5))
                < 1e-15
        );
        let after = alice_marginal_after(&s).unwrap();
        assert!(
            after
                .matrix()
                .max_abs_diff(&Matrix::identity(2).scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn identical_branches_give_pure_marginal() {
        let s = scenario(1.0, 1.0, 1.0);
        let rho = alice_marginal_before(&s).unwrap();
        let e = rho.eigenvalues().unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15);
        assert!((rho.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coherences_match_closed_forms() {
        let s = scenario(0.6, 0.5, 0.5);
        let before = alice_marginal_before(&s).unwrap();
        assert!((before.matrix()[(1, 0)] - c(0.15, 0.0)).norm() < 1e-15);
        let after = alice_marginal_after(&s).unwrap();
        assert!((after.matrix()[(1, 0)] - c(0.09, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lambda_values() {
        let z = c::<f64>(0.0, 0.0);
        let one = c::<f64>(1.0, 0.0);
        assert_eq!(lambda_before(z, c(0.3, 0.0)), 0.5);
        assert_eq!(lambda_before(one, one), 1.0);
        assert!((lambda_before::<f64>(c(0.6, 0.0), c(0.5, 0.0)) - 0.65).abs() < 1e-15);
        assert_eq!(lambda_after(z, one), 0.5);
        assert_eq!(lambda_after(one, one), 1.0);
        assert!((lambda_after::<f64>(c(0.6, 0.0), c(0.5, 0.0)) - 0.59).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let d = entanglement_delta(&scenario(0.6, 0.5, 0.5)).unwrap();
        assert!((d.delta_lambda + 0.06).abs() < 1e-12);
        let d = entanglement_delta(&scenario(0.6, 0.3, 0.5)).unwrap();
        assert!(d.delta_lambda.abs() < 1e-12);
        assert!(d.delta_entropy.abs() < 1e-12);
        let d = entanglement_delta(&scenario(0.0, 0.4, 0.9)).unwrap();
        assert!(d.delta_lambda.abs() < 1e-12 && d.delta_entropy.abs() < 1e-12);
    }

    #[test]
    fn isometric_route_preserves_alice() {
        let s = scenario(0.6, 0.3, 0.5);
        let before = alice_marginal_before(&s).unwrap();
        let after = alice_marginal_after_isometry(&s).unwrap();
        assert!(before.max_abs_diff(&after).unwrap() < 1e-12);
        let inconsistent = scenario(0.6, 0.5, 0.5);
        assert!(matches!(
            alice_marginal_after_isometry(&inconsistent),
            Err(Error::InconsistentGram(_))
        ));
    }

    #[test]
    fn weighted_lambda_reduces_to_equal_weight() {
        assert!((lambda_weighted(0.5f64, 0.3) - 0.65).abs() < 1e-15);
        let s = build_conservation_weighted(
            c(0.6, 0.0),
            c(0.5, 0.0),
            c(0.5, 0.0),
            0.2,
            Layout::default(),
        )
        .unwrap();
        let e = alice_marginal_before(&s).unwrap().eigenvalues().unwrap();
        assert!((e[0] - lambda_weighted(0.2f64, 0.3)).abs() < 1e-12);
        let e = alice_marginal_after(&s).unwrap().eigenvalues().unwrap();
        assert!((e[0] - lambda_weighted(0.2f64, 0.18)).abs() < 1e-12);
    }

    #[test]
    fn equivalence_identity_and_mismatch() {
        let sig = SubsystemSignature::single("q", 3).unwrap();
        let (x, y) = kets_with_overlap(c::<f64>(0.4, 0.1), &sig).unwrap();
        let f = StateFamily::new(vec![x.clone(), y.clone()]).unwrap();
        let u = equivalence_unitary(&f, &f).unwrap();
        for m in f.members() {
            let img = u.matrix().mul_vec(m.amplitudes());
            let d: f64 = img
                .iter()
                .zip(m.amplitudes())
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-15);
        }
        let (_, z) = kets_with_overlap(c::<f64>(0.4 + 0.12, 0.1), &sig).unwrap();
        let g = StateFamily::new(vec![x, z]).unwrap();
        match equivalence_unitary(&f, &g) {
            Err(Error::GramMismatch { max_deviation }) => {
                assert!((max_deviation - 0.12).abs() < 1e-12)
            }
            other => panic!("expected GramMismatch, got {other:?}"),
        }
    }
}
