//! `run`: one scenario configuration to one report.

use permanence::conservation::{
    alice_closed_form, alice_marginal_after, alice_marginal_after_isometry, alice_marginal_before,
    build_conservation_weighted, entanglement_delta, equivalence_unitary, lambda_weighted,
};
use permanence::machines::{
    check_consistency_with, default_ancilla_outputs, default_cross_outputs, preset_wishful_cloner,
    CrossOutputs, Layout,
};
use permanence::nosignal::{
    alice_marginal_after as nosignal_alice_after, bob_marginal_after, bob_marginal_after_with,
    bob_marginal_before, build_scenario, declared_output_mixture, outcome_probabilities,
    BasisIndex, SignConvention, TwoSingletScenario, ALICE_ALPHA, ALICE_PSI,
};
use permanence::sampling::{random_ket, random_unitary};
use permanence::states::{gram, qubit_basis};
use permanence::{
    BasisPair, Complex, DensityMatrix, Error, Ket, MachineMode, MachineSpec, Matrix, StateFamily,
    SubsystemSignature,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{Angles, ConfigError, Kind, ScenarioConfig};
use crate::report::{ScenarioReport, Verdict};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario error: {0}")]
    Model(#[from] Error),
}

pub fn run(config: &ScenarioConfig) -> Result<ScenarioReport, RunError> {
    let mut report = ScenarioReport::new(config.kind.to_string(), config.echo());
    match config.kind {
        Kind::Conservation => run_conservation(config, &mut report)?,
        Kind::NoSignal => run_nosignal(config, &mut report)?,
        Kind::GramEquivalence => run_gram(config, &mut report)?,
    }
    Ok(report)
}

/// Largest violation of the density-matrix invariants: Hermiticity, unit
/// trace and positivity.
pub fn density_violation(rho: &DensityMatrix<f64>) -> Result<f64, Error> {
    let herm = rho.matrix().hermitian_deviation();
    let trace = (rho.trace() - Complex::new(1.0, 0.0)).norm();
    let neg = rho
        .eigenvalues()?
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(-e));
    Ok(herm.max(trace).max(neg))
}

fn run_conservation(cfg: &ScenarioConfig, r: &mut ScenarioReport) -> Result<(), Error> {
    let p = &cfg.conservation;
    let tol = &cfg.tolerance;
    let a = Complex::from_polar(p.a, p.a_phase);
    let b = Complex::from_polar(p.b, p.b_phase);
    let c = Complex::from_polar(p.c, p.c_phase);
    let layout = Layout::default().with_ancilla_dim(cfg.machine.ancilla_dim);
    let s = build_conservation_weighted(a, b, c, p.weight0, layout)?;

    let before = alice_marginal_before(&s)?;
    let after = alice_marginal_after(&s)?;
    let eb = before.eigenvalues()?;
    let ea = after.eigenvalues()?;
    let delta = entanglement_delta(&s)?;
    let lb = lambda_weighted(p.weight0, (a * b).norm());
    let la = lambda_weighted(p.weight0, (a * a * c).norm());
    let consistency = check_consistency_with(&s.machine, tol.assertion);
    let (ra, rb, rc) = s.realized_overlaps()?;

    r.scalar("lambda_before", eb[0]);
    r.scalar("lambda_after", ea[0]);
    r.scalar("lambda_before_closed_form", lb);
    r.scalar("lambda_after_closed_form", la);
    r.scalar("delta_lambda", delta.delta_lambda);
    r.scalar("delta_lambda_closed_form", la - lb);
    r.scalar("entropy_before", delta.entropy_before);
    r.scalar("entropy_after", delta.entropy_after);
    r.scalar("delta_entropy", delta.delta_entropy);
    r.scalar("gram_max_deviation", consistency.max_deviation);
    r.scalar(
        "gram_max_modulus_deviation",
        consistency.max_modulus_deviation,
    );

    let conserved =
        delta.delta_lambda.abs() < tol.assertion && delta.delta_entropy.abs() < tol.assertion;
    r.flag("consistent", consistency.consistent);
    r.flag("modulus_consistent", consistency.modulus_consistent);
    r.flag("conserved", conserved);

    r.spectrum("alice_before", &eb);
    r.spectrum("alice_after", &ea);
    r.density("alice_before", &before);
    r.density("alice_after", &after);
    r.matrix("input_gram", &consistency.input_gram);
    r.matrix("output_gram", &consistency.output_gram);

    let overlap_err = (ra - a).norm().max((rb - b).norm()).max((rc - c).norm());
    r.verdict(Verdict::new("overlaps_realized", overlap_err, tol.residual));
    r.verdict(Verdict::new(
        "alice_before_closed_form",
        before
            .matrix()
            .max_abs_diff(&alice_closed_form(p.weight0, a * b)),
        tol.residual,
    ));
    r.verdict(Verdict::new(
        "alice_after_closed_form",
        after
            .matrix()
            .max_abs_diff(&alice_closed_form(p.weight0, a * a * c)),
        tol.residual,
    ));
    r.verdict(Verdict::new(
        "lambda_before_closed_form",
        (eb[0] - lb).abs(),
        tol.residual,
    ));
    r.verdict(Verdict::new(
        "lambda_after_closed_form",
        (ea[0] - la).abs(),
        tol.residual,
    ));
    r.verdict(Verdict::new(
        "conservation_of_entanglement",
        delta.delta_lambda.abs().max(delta.delta_entropy.abs()),
        tol.assertion,
    ));
    r.verdict(Verdict::holds(
        "consistency_matches_conservation",
        consistency.modulus_consistent == conserved,
    ));
    if consistency.consistent {
        let iso = alice_marginal_after_isometry(&s)?;
        r.verdict(Verdict::new(
            "isometric_extension_preserves_alice",
            iso.max_abs_diff(&before)?,
            tol.residual,
        ));
    }
    Ok(())
}

fn basis(angles: Angles) -> Result<BasisPair<f64>, Error> {
    qubit_basis(angles.theta, angles.phi)
}

/// Wishful cloner declared in basis `index` with the configured outputs.
pub fn wishful_machine(
    s: &TwoSingletScenario<f64>,
    index: BasisIndex,
    cross: CrossOutputs,
) -> Result<MachineSpec<f64>, Error> {
    let (pb, ab) = s.bases(index);
    let cross = default_cross_outputs(pb, ab, &s.layout, cross)?;
    let anc = default_ancilla_outputs(&s.layout)?;
    preset_wishful_cloner(pb, ab, cross, anc, &s.layout)
}

/// The machine a nosignal config describes: termwise mode declares the cloner
/// in both bases; linear-extension mode extends the basis-1 declaration.
pub fn nosignal_machine(
    s: &TwoSingletScenario<f64>,
    mode: MachineMode,
    cross: CrossOutputs,
) -> Result<MachineSpec<f64>, Error> {
    let m1 = wishful_machine(s, BasisIndex::First, cross)?;
    match mode {
        MachineMode::Termwise => m1.union(&wishful_machine(s, BasisIndex::Second, cross)?),
        MachineMode::LinearExtension => Ok(m1.with_mode(MachineMode::LinearExtension)),
    }
}

fn run_nosignal(cfg: &ScenarioConfig, r: &mut ScenarioReport) -> Result<(), Error> {
    let n = &cfg.nosignal;
    let tol = &cfg.tolerance;
    let layout = Layout::default().with_ancilla_dim(cfg.machine.ancilla_dim);
    let s = build_scenario(
        (basis(n.psi1)?, basis(n.alpha1)?),
        (basis(n.psi2)?, basis(n.alpha2)?),
        layout,
    )?;
    let m = nosignal_machine(&s, cfg.machine.mode, cfg.machine.cross_outputs)?;
    let consistency = check_consistency_with(&m, tol.assertion);
    let indices = [BasisIndex::First, BasisIndex::Second];

    let before = bob_marginal_before(&s)?;
    let quarter = Matrix::identity(4).scale_real(0.25);
    let after: Vec<DensityMatrix<f64>> = indices
        .iter()
        .map(|&i| bob_marginal_after(&s, &m, i))
        .collect::<Result<_, _>>()?;
    let magnitude = after[0].trace_distance(&after[1])?;
    let probabilities: Vec<f64> = indices
        .iter()
        .map(|&i| outcome_probabilities(&s, &m, i))
        .collect::<Result<Vec<_>, _>>()?
        .concat();

    r.scalar("signalling_magnitude", magnitude);
    r.scalar(
        "psi_basis_overlap",
        s.basis1.0.primary.overlap_modulus(&s.basis2.0.primary)?,
    );
    r.scalar(
        "alpha_basis_overlap",
        s.basis1.1.primary.overlap_modulus(&s.basis2.1.primary)?,
    );
    r.scalar("gram_max_deviation", consistency.max_deviation);
    r.flag("machine_consistent", consistency.consistent);
    r.flag("machine_modulus_consistent", consistency.modulus_consistent);
    r.flag("termwise", m.mode() == MachineMode::Termwise);
    r.spectrum("outcome_probabilities", &probabilities);
    r.spectrum("bob_after_1", &after[0].eigenvalues()?);
    r.spectrum("bob_after_2", &after[1].eigenvalues()?);
    r.density("bob_before", &before);
    r.density("bob_after_1", &after[0]);
    r.density("bob_after_2", &after[1]);

    r.verdict(Verdict::new(
        "bob_before_maximally_mixed",
        before.matrix().max_abs_diff(&quarter),
        tol.residual,
    ));
    let validity = after
        .iter()
        .map(density_violation)
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.verdict(Verdict::new("bob_after_valid", validity, tol.residual));
    let prob_dev = probabilities
        .iter()
        .fold(0.0f64, |acc, p| acc.max((p - 0.25).abs()));
    r.verdict(Verdict::new(
        "outcome_probabilities_quarter",
        prob_dev,
        tol.residual,
    ));

    match m.mode() {
        MachineMode::Termwise => {
            let mut mix_dev = 0.0f64;
            let mut sign_dev = 0.0f64;
            for (k, &i) in indices.iter().enumerate() {
                mix_dev = mix_dev.max(after[k].max_abs_diff(&declared_output_mixture(&s, &m, i)?)?);
                let plus = bob_marginal_after_with(&s, &m, i, SignConvention::AllPlus)?;
                sign_dev = sign_dev.max(after[k].max_abs_diff(&plus)?);
            }
            r.scalar("declared_mixture_deviation", mix_dev);
            r.verdict(Verdict::new("declared_mixture", mix_dev, tol.residual));
            r.verdict(Verdict::new(
                "sign_convention_invariance",
                sign_dev,
                tol.residual,
            ));
        }
        MachineMode::LinearExtension => {
            let alice_before =
                DensityMatrix::from_ket(&s.joint)?.partial_trace(&[ALICE_PSI, ALICE_ALPHA])?;
            let mut dev = 0.0f64;
            for &i in &indices {
                dev = dev.max(nosignal_alice_after(&s, &m, i)?.max_abs_diff(&alice_before)?);
            }
            r.verdict(Verdict::new("alice_marginal_unchanged", dev, tol.residual));
        }
    }
    r.verdict(Verdict::new("no_signalling", magnitude, tol.assertion));
    Ok(())
}

/// Families `f` and `g = U·f` for the configured seed; with a nonzero
/// mismatch the last member of `g` is tilted towards the first.
pub fn gram_families(
    dimension: usize,
    members: usize,
    seed: u64,
    mismatch: f64,
) -> Result<(StateFamily<f64>, StateFamily<f64>), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = SubsystemSignature::single("x", dimension)?;
    let f: Vec<Ket<f64>> = (0..members)
        .map(|_| random_ket(&sig, &mut rng))
        .collect::<Result<_, _>>()?;
    let u = random_unitary::<f64, _>(dimension, &mut rng);
    let mut g: Vec<Ket<f64>> = f
        .iter()
        .map(|k| Ket::new(sig.clone(), u.mul_vec(k.amplitudes())))
        .collect::<Result<_, _>>()?;
    if mismatch > 0.0 && members > 1 {
        let last = g.len() - 1;
        g[last] = g[last]
            .add(&g[0].scale(Complex::new(mismatch, 0.0)))?
            .normalize()?;
    }
    Ok((StateFamily::new(f)?, StateFamily::new(g)?))
}

fn run_gram(cfg: &ScenarioConfig, r: &mut ScenarioReport) -> Result<(), Error> {
    let p = &cfg.gram;
    let tol = &cfg.tolerance;
    let (f, g) = gram_families(p.dimension, p.members, p.seed, p.mismatch)?;
    let gf = gram(&f);
    let gg = gram(&g);
    let deviation = gf.max_abs_diff(&gg);
    r.scalar("gram_deviation", deviation);
    r.matrix("input_gram", &gf);
    r.matrix("output_gram", &gg);
    r.verdict(Verdict::new("gram_equal", deviation, tol.assertion));

    match equivalence_unitary(&f, &g) {
        Ok(lm) => {
            let residual = f
                .members()
                .iter()
                .zip(g.members())
                .map(|(x, y)| {
                    let img = lm.matrix().mul_vec(x.amplitudes());
                    img.iter()
                        .zip(y.amplitudes())
                        .map(|(p, q)| (p - q).norm())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            r.scalar("member_residual", residual);
            r.scalar("isometry_residual", lm.isometry_deviation());
            r.flag("unitary_constructed", true);
            r.matrix("unitary", lm.matrix());
            r.verdict(Verdict::new(
                "member_residual",
                residual,
                tol.reconstruction,
            ));
            r.verdict(Verdict::new(
                "isometry_residual",
                lm.isometry_deviation(),
                tol.assertion,
            ));
        }
        Err(Error::GramMismatch { max_deviation }) => {
            r.flag("unitary_constructed", false);
            r.scalar("reported_mismatch", max_deviation);
            r.verdict(Verdict::new(
                "mismatch_reported_faithfully",
                (max_deviation - deviation).abs(),
                tol.residual,
            ));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conservation(b: &str) -> ScenarioReport {
        let mut c = ScenarioConfig::new(Kind::Conservation);
        c.set("conservation.b", b, 0).unwrap();
        run(&c).unwrap()
    }

    #[test]
    fn conservation_failure_by_design() {
        let r = conservation("0.5");
        assert_eq!(r.get_scalar("lambda_before"), Some(0.65));
        assert_eq!(r.get_scalar("lambda_after"), Some(0.59));
        assert!(!r.get_verdict("conservation_of_entanglement").unwrap().pass);
        assert!(
            r.get_verdict("consistency_matches_conservation")
                .unwrap()
                .pass
        );
        assert!(!r.all_pass());
    }

    #[test]
    fn conservation_on_the_surface_passes() {
        let r = conservation("0.3");
        assert!(r.all_pass(), "{}", r.render_table());
        assert_eq!(r.get_flag("consistent"), Some(true));
        assert!(r
            .get_verdict("isometric_extension_preserves_alice")
            .is_some());
    }

    #[test]
    fn nosignal_modes() {
        let mut c = ScenarioConfig::new(Kind::NoSignal);
        let r = run(&c).unwrap();
        assert!(!r.get_verdict("no_signalling").unwrap().pass);
        assert!(r.get_verdict("declared_mixture").unwrap().pass);
        assert!(r.get_scalar("signalling_magnitude").unwrap() > 1e-6);

        c.set("machine.mode", "linear-extension", 0).unwrap();
        let r = run(&c).unwrap();
        assert!(r.all_pass(), "{}", r.render_table());
        assert!(r.get_scalar("signalling_magnitude").unwrap() < 1e-12);
    }

    #[test]
    fn gram_equivalence_round_trip_and_mismatch() {
        let mut c = ScenarioConfig::new(Kind::GramEquivalence);
        let r = run(&c).unwrap();
        assert!(r.all_pass(), "{}", r.render_table());
        c.set("gram.mismatch", "0.2", 0).unwrap();
        let r = run(&c).unwrap();
        assert_eq!(r.get_flag("unitary_constructed"), Some(false));
        assert!(!r.get_verdict("gram_equal").unwrap().pass);
        assert!(r.get_verdict("mismatch_reported_faithfully").unwrap().pass);
    }

    #[test]
    fn run_is_deterministic() {
        let c = ScenarioConfig::new(Kind::NoSignal);
        let a = run(&c).unwrap().render_json_like();
        let b = run(&c).unwrap().render_json_like();
        assert_eq!(a, b);
    }
}
