use num_complex::Complex;
use num_traits::Zero;

use super::{LinearMachine, MachineSpec};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::states::StateFamily;
use crate::tensor::{vdot, Ket, SubsystemSignature};

/// Splits `state` into spectator and acted parts.
///
/// Returns the reordered state (spectators first, in original order; then
/// `acted` in the given order) and the spectator labels.
fn split<'a, T: Real>(state: &'a Ket<T>, acted: &[&str]) -> Result<(Ket<T>, Vec<&'a str>)> {
    state.signature().positions(acted)?;
    let spectators: Vec<&str> = state
        .signature()
        .labels()
        .filter(|l| !acted.contains(l))
        .collect();
    let order: Vec<&str> = spectators
        .iter()
        .copied()
        .chain(acted.iter().copied())
        .collect();
    Ok((state.reorder(&order)?, spectators))
}

/// Output labels for a machine whose output signature is expressed over its
/// input labels; `rename` maps machine input labels to state labels.
fn renamed_output(
    out: &SubsystemSignature,
    rename: &[(String, String)],
) -> Result<SubsystemSignature> {
    SubsystemSignature::new(out.entries().iter().map(|e| {
        let label = rename
            .iter()
            .find(|(from, _)| *from == e.label)
            .map_or_else(|| e.label.clone(), |(_, to)| to.clone());
        (label, e.dim)
    }))
}

/// Puts the result back in the caller's label order when possible: the
/// original state labels first, then any labels the machine introduced.
fn restore_order<T: Real>(result: Ket<T>, original: &SubsystemSignature) -> Result<Ket<T>> {
    let mut order: Vec<String> = original
        .labels()
        .filter(|l| result.signature().contains(l))
        .map(str::to_string)
        .collect();
    for l in result.signature().labels() {
        if !order.iter().any(|o| o == l) {
            order.push(l.to_string());
        }
    }
    result.reorder(&order)
}

fn assemble<T: Real>(
    spectators: &[&str],
    source: &SubsystemSignature,
    output: &SubsystemSignature,
    amplitudes: Vec<Complex<T>>,
) -> Result<Ket<T>> {
    let signature = if spectators.is_empty() {
        output.clone()
    } else {
        source.select(spectators)?.concat(output)?
    };
    Ket::new(signature, amplitudes)
}

/// `(I_spectators ⊗ M)·state`, where `acted_labels[k]` plays the role of the
/// machine's k-th input factor.
pub fn apply_linear<T: Real>(
    lm: &LinearMachine<T>,
    state: &Ket<T>,
    acted_labels: &[&str],
) -> Result<Ket<T>> {
    let input = lm.input_signature();
    if acted_labels.len() != input.len() {
        return Err(Error::LengthMismatch {
            expected: input.len(),
            found: acted_labels.len(),
        });
    }
    for (label, entry) in acted_labels.iter().zip(input.entries()) {
        let d = state.signature().dim_of(label)?;
        if d != entry.dim {
            return Err(Error::LengthMismatch {
                expected: entry.dim,
                found: d,
            });
        }
    }
    let (reordered, spectators) = split(state, acted_labels)?;
    let rename: Vec<(String, String)> = input
        .labels()
        .zip(acted_labels)
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let output = renamed_output(lm.output_signature(), &rename)?;

    let n_in = input.total_dim();
    let n_out = output.total_dim();
    let blocks = reordered.dim() / n_in;
    let mut amplitudes = Vec::with_capacity(blocks * n_out);
    for b in 0..blocks {
        let chunk = &reordered.amplitudes()[b * n_in..(b + 1) * n_in];
        amplitudes.extend(lm.matrix().mul_vec(chunk));
    }
    let result = assemble(&spectators, reordered.signature(), &output, amplitudes)?;
    restore_order(result, state.signature())
}

/// Rule-by-rule application of `m` after expanding the acted factors of
/// `state` in `expansion`.
///
/// Each expansion element, tensored with the machine's fixed ancilla input, is
/// matched against the declared inputs (up to global phase) and replaced by
/// the declared output; coefficients, signs included, are kept. The ancilla
/// labels are appended to the result. With `renormalize` the result is scaled
/// to unit norm.
pub fn apply_termwise<T: Real>(
    m: &MachineSpec<T>,
    state: &Ket<T>,
    acted_labels: &[&str],
    expansion: &StateFamily<T>,
    renormalize: bool,
) -> Result<Ket<T>> {
    let tol = T::assertion_tolerance();
    let acted_sig = state.signature().select(acted_labels)?;
    if expansion.signature() != &acted_sig {
        return Err(Error::SignatureMismatch {
            left: expansion.signature().to_string(),
            right: acted_sig.to_string(),
        });
    }
    if !expansion.is_orthonormal_basis(tol) {
        return Err(Error::NotOrthonormal {
            deviation: to_f64(expansion.orthonormality_deviation()),
        });
    }

    let (reordered, spectators) = split(state, acted_labels)?;
    let n_acted = acted_sig.total_dim();
    let blocks = reordered.dim() / n_acted;
    let n_out = m.output_signature().total_dim();
    let mut amplitudes = vec![Complex::zero(); blocks * n_out];

    for (index, e) in expansion.members().iter().enumerate() {
        let full_input = match m.ancilla() {
            Some(anc) => e.tensor(anc)?,
            None => e.clone(),
        };
        if !full_input.signature().same_factors(m.input_signature()) {
            return Err(Error::SignatureMismatch {
                left: full_input.signature().to_string(),
                right: m.input_signature().to_string(),
            });
        }
        let full_input = full_input.aligned_to(m.input_signature())?;
        // declared = p·input  ⇒  M·input = p*·declared output
        let (phase, output) = m
            .pairs()
            .iter()
            .find_map(|(i, o)| {
                let p = vdot(full_input.amplitudes(), i.amplitudes());
                ((p.norm() - T::one()).abs() <= tol).then_some((p, o))
            })
            .ok_or(Error::ExpansionNotCovered { index })?;
        let out: Vec<Complex<T>> = output
            .amplitudes()
            .iter()
            .map(|x| *x * phase.conj())
            .collect();

        for b in 0..blocks {
            let chunk = &reordered.amplitudes()[b * n_acted..(b + 1) * n_acted];
            let coef = vdot(e.amplitudes(), chunk);
            if coef.is_zero() {
                continue;
            }
            for (slot, o) in amplitudes[b * n_out..(b + 1) * n_out].iter_mut().zip(&out) {
                *slot += coef * *o;
            }
        }
    }

    let result = assemble(
        &spectators,
        reordered.signature(),
        m.output_signature(),
        amplitudes,
    )?;
    let result = restore_order(result, state.signature())?;
    if renormalize {
        result.normalize()
    } else {
        Ok(result)
    }
}

/// Applies `m` branch by branch on a state written as
/// `Σ_x |x⟩_control ⊗ |B_x⟩`: each normalized branch `|B_x⟩`, tensored with
/// the fixed ancilla, must match a declared input (up to phase) and is
/// replaced by its declared output with the branch weight kept.
///
/// Branches need not be orthogonal, so this is the rule-by-rule reading of a
/// machine over a superposition of its declared inputs.
pub fn apply_branchwise<T: Real>(
    m: &MachineSpec<T>,
    state: &Ket<T>,
    control: &str,
) -> Result<Ket<T>> {
    let tol = T::assertion_tolerance();
    let dim = state.signature().dim_of(control)?;
    let mut terms: Vec<Ket<T>> = Vec::new();
    for x in 0..dim {
        let sel = Ket::basis_on(control, dim, x)?;
        let branch = state.contract(&sel)?;
        let weight = branch.norm();
        if weight <= tol {
            continue;
        }
        let unit = branch.normalize()?;
        let full = match m.ancilla() {
            Some(anc) => unit.tensor(anc)?,
            None => unit,
        };
        let full = full.aligned_to(m.input_signature())?;
        // pair x is tried first so coinciding inputs keep their own outputs
        let n = m.pairs().len();
        let (phase, output) = (0..n)
            .map(|k| &m.pairs()[(x + k) % n])
            .find_map(|(i, o)| {
                let p = vdot(full.amplitudes(), i.amplitudes());
                ((p.norm() - T::one()).abs() <= tol).then_some((p, o))
            })
            .ok_or(Error::ExpansionNotCovered { index: x })?;
        let scaled = output.scale(phase.conj() * Complex::new(weight, T::zero()));
        terms.push(sel.tensor(&scaled)?);
    }
    let refs: Vec<(Complex<T>, &Ket<T>)> = terms
        .iter()
        .map(|k| (Complex::new(T::one(), T::zero()), k))
        .collect();
    let result = Ket::combine(&refs)?;
    restore_order(result, state.signature())
}
