//! Two shared singlets, a cloning machine on Bob's side, and the question of
//! whether Bob's reduced state reveals which basis Alice measured in.
//!
//! Factor order of the shared state is `(A_psi, B_psi, A_alpha, B_alpha)`
//! followed by Bob's ancilla `C`. Alice's "measurement in basis i" is a
//! complete product-basis measurement on `(A_psi, A_alpha)` whose outcomes
//! are averaged; Bob's state is the resulting unconditional mixture.

use crate::error::{Error, Result};
use crate::machines::{
    apply_linear, apply_termwise, extend_to_isometry, Layout, MachineMode, MachineSpec,
};
use crate::scalar::{cr, lit, Real};
use crate::states::{product_family, singlet, BasisPair, StateFamily};
use crate::tensor::{vdot, DensityMatrix, Ket};

pub const ALICE_PSI: &str = "A_psi";
pub const ALICE_ALPHA: &str = "A_alpha";

/// Which of the two declared bases Alice measures in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisIndex {
    First,
    Second,
}

impl BasisIndex {
    pub fn number(self) -> u8 {
        match self {
            BasisIndex::First => 1,
            BasisIndex::Second => 2,
        }
    }
}

/// Sign pattern used when writing the two-singlet state in basis i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// The actual singlet expansion, `(+, −, −, +)` over
    /// `(ψψ̄αᾱ, ψψ̄ᾱα, ψ̄ψαᾱ, ψ̄ψᾱα)`.
    #[default]
    Faithful,
    /// Every branch with a plus sign.
    AllPlus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSingletScenario<T> {
    pub layout: Layout,
    /// `(ψ basis, α basis)` for index 1.
    pub basis1: (BasisPair<T>, BasisPair<T>),
    /// `(ψ basis, α basis)` for index 2.
    pub basis2: (BasisPair<T>, BasisPair<T>),
    /// `singlet(ψ) ⊗ singlet(α)` over `(A_psi, B_psi, A_alpha, B_alpha)`.
    pub shared: Ket<T>,
    /// `shared ⊗ |C⟩`.
    pub joint: Ket<T>,
}

impl<T: Real> TwoSingletScenario<T> {
    pub fn bases(&self, index: BasisIndex) -> &(BasisPair<T>, BasisPair<T>) {
        match index {
            BasisIndex::First => &self.basis1,
            BasisIndex::Second => &self.basis2,
        }
    }

    pub fn alice_labels(&self) -> [&str; 2] {
        [ALICE_PSI, ALICE_ALPHA]
    }

    pub fn bob_labels(&self) -> [&str; 2] {
        [self.layout.psi.as_str(), self.layout.alpha.as_str()]
    }

    /// Bob's two qubits plus the ancilla.
    pub fn bob_with_ancilla(&self) -> [&str; 3] {
        [
            self.layout.psi.as_str(),
            self.layout.alpha.as_str(),
            self.layout.ancilla.as_str(),
        ]
    }

    /// Bob's expansion basis `{ψα, ψᾱ, ψ̄α, ψ̄ᾱ}` in basis `index`.
    pub fn bob_expansion(&self, index: BasisIndex) -> Result<StateFamily<T>> {
        let (pb, ab) = self.bases(index);
        product_family(&pb.on(&self.layout.psi), &ab.on(&self.layout.alpha))
    }

    /// Shared state written in basis `index` with the chosen sign pattern.
    pub fn shared_in(&self, index: BasisIndex, signs: SignConvention) -> Result<Ket<T>> {
        match signs {
            SignConvention::Faithful => Ok(self.shared.clone()),
            SignConvention::AllPlus => {
                let (pb, ab) = self.bases(index);
                let h = cr(T::FRAC_1_SQRT_2());
                let [ap, apb] = pb.on(ALICE_PSI);
                let [bp, bpb] = pb.on(&self.layout.psi);
                let [aa, aab] = ab.on(ALICE_ALPHA);
                let [ba, bab] = ab.on(&self.layout.alpha);
                let psi_part = Ket::combine(&[(h, &ap.tensor(&bpb)?), (h, &apb.tensor(&bp)?)])?;
                let alpha_part = Ket::combine(&[(h, &aa.tensor(&bab)?), (h, &aab.tensor(&ba)?)])?;
                psi_part.tensor(&alpha_part)
            }
        }
    }
}

pub fn build_scenario<T: Real>(
    basis1: (BasisPair<T>, BasisPair<T>),
    basis2: (BasisPair<T>, BasisPair<T>),
    layout: Layout,
) -> Result<TwoSingletScenario<T>> {
    let chi = singlet(&basis1.0, (ALICE_PSI, &layout.psi))?;
    let xi = singlet(&basis1.1, (ALICE_ALPHA, &layout.alpha))?;
    let shared = chi.tensor(&xi)?;
    let joint = shared.tensor(&layout.ancilla_ready()?)?;
    Ok(TwoSingletScenario {
        layout,
        basis1,
        basis2,
        shared,
        joint,
    })
}

/// Bob's two-qubit marginal before any machine acts.
pub fn bob_marginal_before<T: Real>(s: &TwoSingletScenario<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_ket(&s.shared)?.partial_trace(&s.bob_labels())
}

/// Post-machine joint state when Alice will measure in `index`.
///
/// Termwise machines are expanded in Bob's basis `index`; linear-extension
/// machines are first extended to an isometry and applied as an operator on
/// `(B_psi, B_alpha, C)`.
pub fn state_after<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
    signs: SignConvention,
) -> Result<Ket<T>> {
    let shared = s.shared_in(index, signs)?;
    match m.mode() {
        MachineMode::Termwise => {
            let expansion = s.bob_expansion(index)?;
            apply_termwise(m, &shared, &s.bob_labels(), &expansion, false)
        }
        MachineMode::LinearExtension => {
            let lm = extend_to_isometry(m)?;
            let joint = shared.tensor(&s.layout.ancilla_ready()?)?;
            let acted: Vec<&str> = m.input_signature().labels().collect();
            apply_linear(&lm, &joint, &acted)
        }
    }
}

/// Bob's conditioned (unnormalized) states for each of Alice's four outcomes
/// in basis `index`, in the order `(ψα, ψᾱ, ψ̄α, ψ̄ᾱ)`.
pub fn bob_conditioned<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
    signs: SignConvention,
) -> Result<Vec<Ket<T>>> {
    let post = state_after(s, m, index, signs)?;
    let (pb, ab) = s.bases(index);
    let mut out = Vec::with_capacity(4);
    for x in pb.on(ALICE_PSI) {
        for y in ab.on(ALICE_ALPHA) {
            out.push(post.contract(&x.tensor(&y)?)?);
        }
    }
    Ok(out)
}

/// Outcome probabilities of Alice's measurement in basis `index`.
pub fn outcome_probabilities<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
) -> Result<Vec<T>> {
    Ok(bob_conditioned(s, m, index, SignConvention::Faithful)?
        .iter()
        .map(|k| k.norm() * k.norm())
        .collect())
}

/// Bob's unconditional state over `(B_psi, B_alpha, C)` after the machine,
/// given that Alice measured in basis `index`.
pub fn bob_marginal_after<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
) -> Result<DensityMatrix<T>> {
    bob_marginal_after_with(s, m, index, SignConvention::Faithful)
}

pub fn bob_marginal_after_with<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
    signs: SignConvention,
) -> Result<DensityMatrix<T>> {
    let branches = bob_conditioned(s, m, index, signs)?;
    let projectors: Vec<DensityMatrix<T>> = branches
        .iter()
        .map(DensityMatrix::weighted_projector)
        .collect();
    let terms: Vec<(T, &DensityMatrix<T>)> = projectors.iter().map(|p| (T::one(), p)).collect();
    DensityMatrix::mixture(&terms)
}

/// `¼ Σ |out⟩⟨out|` over the declared outputs whose inputs are Bob's basis
/// `index` expansion elements. Bob's state should equal this after termwise
/// application.
pub fn declared_output_mixture<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
) -> Result<DensityMatrix<T>> {
    let tol = T::assertion_tolerance();
    let expansion = s.bob_expansion(index)?;
    let anc = m.ancilla().ok_or(Error::EmptySelection)?;
    let mut projectors = Vec::with_capacity(expansion.len());
    for (k, e) in expansion.members().iter().enumerate() {
        let input = e.tensor(anc)?.aligned_to(m.input_signature())?;
        let (_, out) = m
            .pairs()
            .iter()
            .find(|(i, _)| {
                (vdot(input.amplitudes(), i.amplitudes()).norm() - T::one()).abs() <= tol
            })
            .ok_or(Error::ExpansionNotCovered { index: k })?;
        projectors.push(DensityMatrix::from_ket(out)?);
    }
    let w = T::one() / lit::<T>(projectors.len() as f64);
    let terms: Vec<(T, &DensityMatrix<T>)> = projectors.iter().map(|p| (w, p)).collect();
    DensityMatrix::mixture(&terms)
}

/// Trace distance between Bob's states for Alice's two basis choices.
pub fn signalling_magnitude<T: Real>(s: &TwoSingletScenario<T>, m: &MachineSpec<T>) -> Result<T> {
    let r1 = bob_marginal_after(s, m, BasisIndex::First)?;
    let r2 = bob_marginal_after(s, m, BasisIndex::Second)?;
    r1.trace_distance(&r2)
}

/// Alice's two-qubit marginal after the machine acts on Bob's side, before
/// she measures.
pub fn alice_marginal_after<T: Real>(
    s: &TwoSingletScenario<T>,
    m: &MachineSpec<T>,
    index: BasisIndex,
) -> Result<DensityMatrix<T>> {
    let post = state_after(s, m, index, SignConvention::Faithful)?.normalize()?;
    DensityMatrix::from_ket(&post)?.partial_trace(&s.alice_labels())
}
