//! Ready-made machine declarations for cloning and deletion scenarios.

use super::{MachineMode, MachineSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::BasisPair;
use crate::tensor::{Ket, SubsystemSignature};

/// Labels and ancilla size shared by the presets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    /// Bob's copy of the state to be cloned.
    pub psi: String,
    /// Bob's supplementary register (`|α⟩`).
    pub alpha: String,
    /// Blank register that receives the second copy.
    pub blank: String,
    /// Environment ancilla (`|C⟩`, or `|A⟩` for deletion).
    pub ancilla: String,
    /// Second copy in the deletion machine.
    pub copy: String,
    pub ancilla_dim: usize,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            psi: "B_psi".into(),
            alpha: "B_alpha".into(),
            blank: "B_blank".into(),
            ancilla: "C".into(),
            copy: "B_copy".into(),
            ancilla_dim: 4,
        }
    }
}

impl Layout {
    pub fn with_ancilla_dim(mut self, dim: usize) -> Self {
        self.ancilla_dim = dim;
        self
    }

    /// Fixed ancilla input `|C⟩ = |0⟩`.
    pub fn ancilla_ready<T: Real>(&self) -> Result<Ket<T>> {
        Ket::basis_on(&self.ancilla, self.ancilla_dim, 0)
    }

    /// `(ψ, α, C)`: signature of the wishful cloner.
    pub fn wishful_signature(&self) -> Result<SubsystemSignature> {
        SubsystemSignature::new([
            (self.psi.clone(), 2),
            (self.alpha.clone(), 2),
            (self.ancilla.clone(), self.ancilla_dim),
        ])
    }

    /// `(ψ, blank, α, C)`: signature of the strong cloner.
    pub fn strong_signature(&self) -> Result<SubsystemSignature> {
        SubsystemSignature::new([
            (self.psi.clone(), 2),
            (self.blank.clone(), 2),
            (self.alpha.clone(), 2),
            (self.ancilla.clone(), self.ancilla_dim),
        ])
    }

    /// `(α, C)`: register that holds `|C_k⟩` after strong cloning.
    pub fn strong_register(&self) -> Result<SubsystemSignature> {
        SubsystemSignature::new([
            (self.alpha.clone(), 2),
            (self.ancilla.clone(), self.ancilla_dim),
        ])
    }

    /// `(ψ, copy, A)`: signature of the deleter.
    pub fn deleter_signature(&self) -> Result<SubsystemSignature> {
        SubsystemSignature::new([
            (self.psi.clone(), 2),
            (self.copy.clone(), 2),
            (self.ancilla.clone(), self.ancilla_dim),
        ])
    }
}

/// Choice of the unconstrained outputs `|φ⟩`, `|φ̄⟩` of the wishful cloner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossOutputs {
    /// `|φ⟩ = |ψ⟩|ᾱ⟩|C⟩`, `|φ̄⟩ = |ψ̄⟩|α⟩|C⟩` (inputs left untouched).
    #[default]
    PassThrough,
    /// Same as pass-through but with the ancilla moved to `|3⟩`.
    FlaggedAncilla,
}

impl std::fmt::Display for CrossOutputs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CrossOutputs::PassThrough => "pass-through",
            CrossOutputs::FlaggedAncilla => "flagged-ancilla",
        })
    }
}

impl std::str::FromStr for CrossOutputs {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pass-through" => Ok(CrossOutputs::PassThrough),
            "flagged-ancilla" => Ok(CrossOutputs::FlaggedAncilla),
            other => Err(format!(
                "unknown cross-output choice `{other}` (expected pass-through or flagged-ancilla)"
            )),
        }
    }
}

fn qubit_on<T: Real>(k: &Ket<T>, label: &str) -> Result<Ket<T>> {
    if k.signature().dims() != [2] {
        return Err(Error::SignatureMismatch {
            left: k.signature().to_string(),
            right: format!("({label}:2)"),
        });
    }
    k.relabel(&[label])
}

/// `(|φ⟩, |φ̄⟩)` for the given choice.
pub fn default_cross_outputs<T: Real>(
    psi_basis: &BasisPair<T>,
    alpha_basis: &BasisPair<T>,
    layout: &Layout,
    choice: CrossOutputs,
) -> Result<(Ket<T>, Ket<T>)> {
    let anc = match choice {
        CrossOutputs::PassThrough => layout.ancilla_ready()?,
        CrossOutputs::FlaggedAncilla => {
            Ket::basis_on(&layout.ancilla, layout.ancilla_dim, layout.ancilla_dim - 1)?
        }
    };
    let [p, pb] = psi_basis.on(&layout.psi);
    let [a, ab] = alpha_basis.on(&layout.alpha);
    Ok((
        Ket::tensor_all(&[&p, &ab, &anc])?,
        Ket::tensor_all(&[&pb, &a, &anc])?,
    ))
}

/// `(|C_{i1}⟩, |C_{i2}⟩) = (|1⟩, |2⟩)` on the ancilla.
pub fn default_ancilla_outputs<T: Real>(layout: &Layout) -> Result<(Ket<T>, Ket<T>)> {
    if layout.ancilla_dim < 3 {
        return Err(Error::InvalidDimension {
            label: layout.ancilla.clone(),
            dim: layout.ancilla_dim,
        });
    }
    Ok((
        Ket::basis_on(&layout.ancilla, layout.ancilla_dim, 1)?,
        Ket::basis_on(&layout.ancilla, layout.ancilla_dim, 2)?,
    ))
}

/// Cloner whose success depends on the supplementary register, declared in
/// one basis index:
///
/// ```text
/// |ψ⟩|α⟩|C⟩ → |ψ⟩|ψ⟩|C₁⟩     |ψ̄⟩|ᾱ⟩|C⟩ → |ψ̄⟩|ψ̄⟩|C₂⟩
/// |ψ⟩|ᾱ⟩|C⟩ → |φ⟩           |ψ̄⟩|α⟩|C⟩ → |φ̄⟩
/// ```
///
/// Mode is termwise and the fixed ancilla input is `|C⟩ = |0⟩`.
pub fn preset_wishful_cloner<T: Real>(
    psi_basis: &BasisPair<T>,
    alpha_basis: &BasisPair<T>,
    cross_outputs: (Ket<T>, Ket<T>),
    ancilla_outputs: (Ket<T>, Ket<T>),
    layout: &Layout,
) -> Result<MachineSpec<T>> {
    let sig = layout.wishful_signature()?;
    let anc = layout.ancilla_ready()?;
    let [p, pb] = psi_basis.on(&layout.psi);
    let [a, ab] = alpha_basis.on(&layout.alpha);
    let [p2, pb2] = psi_basis.on(&layout.alpha);
    let c1 = ancilla_outputs.0.relabel(&[layout.ancilla.as_str()])?;
    let c2 = ancilla_outputs.1.relabel(&[layout.ancilla.as_str()])?;

    let pairs = vec![
        (
            Ket::tensor_all(&[&p, &a, &anc])?,
            Ket::tensor_all(&[&p, &p2, &c1])?,
        ),
        (
            Ket::tensor_all(&[&pb, &ab, &anc])?,
            Ket::tensor_all(&[&pb, &pb2, &c2])?,
        ),
        (Ket::tensor_all(&[&p, &ab, &anc])?, cross_outputs.0),
        (Ket::tensor_all(&[&pb, &a, &anc])?, cross_outputs.1),
    ];
    MachineSpec::new(sig.clone(), sig, pairs, MachineMode::Termwise)?.with_ancilla(anc)
}

/// `|ψ_k⟩|0⟩|α_k⟩|C⟩ → |ψ_k⟩|ψ_k⟩|C_k⟩` for `k ∈ {i, j}`.
///
/// `ancilla_out_pair` kets live on the `(α, C)` register (dimensions
/// `(2, ancilla_dim)`); they are relabeled onto the layout.
pub fn preset_strong_cloner<T: Real>(
    psi_pair: (&Ket<T>, &Ket<T>),
    alpha_pair: (&Ket<T>, &Ket<T>),
    ancilla_out_pair: (&Ket<T>, &Ket<T>),
    layout: &Layout,
) -> Result<MachineSpec<T>> {
    let sig = layout.strong_signature()?;
    let reg = layout.strong_register()?;
    let reg_labels: Vec<&str> = reg.labels().collect();
    let blank = Ket::basis_on(&layout.blank, 2, 0)?;
    let anc = layout.ancilla_ready()?;

    let mut pairs = Vec::with_capacity(2);
    for (psi, alpha, out) in [
        (psi_pair.0, alpha_pair.0, ancilla_out_pair.0),
        (psi_pair.1, alpha_pair.1, ancilla_out_pair.1),
    ] {
        if out.signature().dims() != reg.dims() {
            return Err(Error::SignatureMismatch {
                left: out.signature().to_string(),
                right: reg.to_string(),
            });
        }
        let p = qubit_on(psi, &layout.psi)?;
        let copy = qubit_on(psi, &layout.blank)?;
        let a = qubit_on(alpha, &layout.alpha)?;
        let c = out.relabel(&reg_labels)?;
        pairs.push((
            Ket::tensor_all(&[&p, &blank, &a, &anc])?,
            Ket::tensor_all(&[&p, &copy, &c])?,
        ));
    }
    let ready = blank.tensor(&anc)?;
    MachineSpec::new(sig.clone(), sig, pairs, MachineMode::LinearExtension)?.with_ancilla(ready)
}

/// `|ψ_k⟩|ψ_k⟩|A⟩ → |ψ_k⟩|0⟩|A_k⟩` for `k ∈ {i, j}`; `A_k` live on the
/// layout's ancilla.
pub fn preset_deleter<T: Real>(
    psi_pair: (&Ket<T>, &Ket<T>),
    ancilla_out_pair: (&Ket<T>, &Ket<T>),
    layout: &Layout,
) -> Result<MachineSpec<T>> {
    let sig = layout.deleter_signature()?;
    let blank = Ket::basis_on(&layout.copy, 2, 0)?;
    let anc = layout.ancilla_ready()?;
    let mut pairs = Vec::with_capacity(2);
    for (psi, out) in [
        (psi_pair.0, ancilla_out_pair.0),
        (psi_pair.1, ancilla_out_pair.1),
    ] {
        if out.signature().dims() != [layout.ancilla_dim] {
            return Err(Error::SignatureMismatch {
                left: out.signature().to_string(),
                right: format!("({}:{})", layout.ancilla, layout.ancilla_dim),
            });
        }
        let p = qubit_on(psi, &layout.psi)?;
        let copy = qubit_on(psi, &layout.copy)?;
        let a = out.relabel(&[layout.ancilla.as_str()])?;
        pairs.push((
            Ket::tensor_all(&[&p, &copy, &anc])?,
            Ket::tensor_all(&[&p, &blank, &a])?,
        ));
    }
    MachineSpec::new(sig.clone(), sig, pairs, MachineMode::LinearExtension)?.with_ancilla(anc)
}
