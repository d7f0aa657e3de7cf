//! Machines declared on a finite set of input kets.
//!
//! A [`MachineSpec`] lists `input → output` pairs. It can be used in two ways:
//!
//! - **linear extension**: [`extend_to_isometry`] builds the unique-on-span
//!   isometry reproducing every pair (possible iff input and output Gram
//!   matrices agree), and [`apply_linear`] applies it to part of a larger state;
//! - **termwise**: [`apply_termwise`] expands a state in a chosen basis of the
//!   acted factors and substitutes each declared output rule by rule. This is
//!   the unphysical "wishful" reading; two termwise expansions of the same
//!   state need not agree when the declared pairs are Gram-inconsistent.

mod apply;
mod isometry;
mod presets;

pub use apply::{apply_branchwise, apply_linear, apply_termwise};
pub use isometry::{extend_to_isometry, LinearMachine};
pub use presets::{
    default_ancilla_outputs, default_cross_outputs, preset_deleter, preset_strong_cloner,
    preset_wishful_cloner, CrossOutputs, Layout,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::states::{gram, StateFamily};
use crate::tensor::{Ket, Matrix, SubsystemSignature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineMode {
    LinearExtension,
    Termwise,
}

impl fmt::Display for MachineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MachineMode::LinearExtension => "linear-extension",
            MachineMode::Termwise => "termwise",
        })
    }
}

impl std::str::FromStr for MachineMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear-extension" | "linear" | "isometry" => Ok(MachineMode::LinearExtension),
            "termwise" => Ok(MachineMode::Termwise),
            other => Err(format!(
                "unknown machine mode `{other}` (expected linear-extension or termwise)"
            )),
        }
    }
}

/// Declared `input → output` rules over fixed signatures.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineSpec<T> {
    input_signature: SubsystemSignature,
    output_signature: SubsystemSignature,
    pairs: Vec<(Ket<T>, Ket<T>)>,
    mode: MachineMode,
    ancilla: Option<Ket<T>>,
}

impl<T: Real> MachineSpec<T> {
    /// Pairs whose kets use the signatures' labels in another order are
    /// realigned; every ket must be normalized.
    pub fn new(
        input_signature: SubsystemSignature,
        output_signature: SubsystemSignature,
        pairs: Vec<(Ket<T>, Ket<T>)>,
        mode: MachineMode,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyMachine);
        }
        if output_signature.total_dim() < input_signature.total_dim() {
            return Err(Error::DimensionIncompatible {
                input: input_signature.total_dim(),
                output: output_signature.total_dim(),
            });
        }
        let tol = T::assertion_tolerance();
        let pairs = pairs
            .into_iter()
            .map(|(i, o)| {
                let i = i.aligned_to(&input_signature)?;
                let o = o.aligned_to(&output_signature)?;
                i.check_normalized(tol)?;
                o.check_normalized(tol)?;
                Ok((i, o))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            input_signature,
            output_signature,
            pairs,
            mode,
            ancilla: None,
        })
    }

    /// Fixed ancilla input attached by termwise application. Its labels must
    /// belong to the input signature.
    pub fn with_ancilla(mut self, ancilla: Ket<T>) -> Result<Self> {
        for l in ancilla.signature().labels() {
            if !self.input_signature.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        ancilla.check_normalized(T::assertion_tolerance())?;
        self.ancilla = Some(ancilla);
        Ok(self)
    }

    pub fn with_mode(mut self, mode: MachineMode) -> Self {
        self.mode = mode;
        self
    }

    /// All pairs of `self` followed by those of `other`.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.input_signature != other.input_signature
            || self.output_signature != other.output_signature
        {
            return Err(Error::SignatureMismatch {
                left: format!("{} -> {}", self.input_signature, self.output_signature),
                right: format!("{} -> {}", other.input_signature, other.output_signature),
            });
        }
        let mut out = self.clone();
        out.pairs.extend(other.pairs.iter().cloned());
        Ok(out)
    }

    pub fn input_signature(&self) -> &SubsystemSignature {
        &self.input_signature
    }

    pub fn output_signature(&self) -> &SubsystemSignature {
        &self.output_signature
    }

    pub fn pairs(&self) -> &[(Ket<T>, Ket<T>)] {
        &self.pairs
    }

    pub fn mode(&self) -> MachineMode {
        self.mode
    }

    pub fn ancilla(&self) -> Option<&Ket<T>> {
        self.ancilla.as_ref()
    }

    pub fn inputs(&self) -> StateFamily<T> {
        StateFamily::new(self.pairs.iter().map(|(i, _)| i.clone()).collect())
            .expect("validated at construction")
    }

    pub fn outputs(&self) -> StateFamily<T> {
        StateFamily::new(self.pairs.iter().map(|(_, o)| o.clone()).collect())
            .expect("validated at construction")
    }
}

/// Input vs output Gram comparison.
///
/// `consistent` is the phase-sensitive verdict; `modulus_consistent` compares
/// only the moduli of the Gram entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport<T> {
    pub input_gram: Matrix<T>,
    pub output_gram: Matrix<T>,
    pub max_deviation: T,
    pub consistent: bool,
    pub max_modulus_deviation: T,
    pub modulus_consistent: bool,
}

impl<T: Real> ConsistencyReport<T> {
    pub fn to_f64(&self) -> ConsistencyReport<f64> {
        let conv = |m: &Matrix<T>| {
            Matrix::from_fn(m.rows(), m.cols(), |i, j| {
                num_complex::Complex::new(to_f64(m[(i, j)].re), to_f64(m[(i, j)].im))
            })
        };
        ConsistencyReport {
            input_gram: conv(&self.input_gram),
            output_gram: conv(&self.output_gram),
            max_deviation: to_f64(self.max_deviation),
            consistent: self.consistent,
            max_modulus_deviation: to_f64(self.max_modulus_deviation),
            modulus_consistent: self.modulus_consistent,
        }
    }
}

pub fn check_consistency<T: Real>(m: &MachineSpec<T>) -> ConsistencyReport<T> {
    check_consistency_with(m, T::assertion_tolerance())
}

pub fn check_consistency_with<T: Real>(m: &MachineSpec<T>, tol: T) -> ConsistencyReport<T> {
    let input_gram = gram(&m.inputs());
    let output_gram = gram(&m.outputs());
    let max_deviation = input_gram.max_abs_diff(&output_gram);
    let max_modulus_deviation = input_gram
        .as_slice()
        .iter()
        .zip(output_gram.as_slice())
        .fold(T::zero(), |acc, (a, b)| {
            acc.max((a.norm() - b.norm()).abs())
        });
    ConsistencyReport {
        input_gram,
        output_gram,
        max_deviation,
        consistent: max_deviation < tol,
        max_modulus_deviation,
        modulus_consistent: max_modulus_deviation < tol,
    }
}
