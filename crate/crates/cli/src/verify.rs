//! `verify`: every invariant suite with a fixed seed, one verdict per
//! invariant.

use std::f64::consts::PI;

use permanence::conservation::{
    alice_closed_form, alice_marginal_after, alice_marginal_before, build_conservation,
    entanglement_delta, equivalence_unitary, lambda_after, lambda_before, ALICE,
};
use permanence::machines::{
    apply_linear, apply_termwise, check_consistency_with, extend_to_isometry, preset_deleter,
    Layout, LinearMachine,
};
use permanence::nosignal::{
    bob_marginal_after, bob_marginal_after_with, bob_marginal_before, build_scenario,
    declared_output_mixture, signalling_magnitude, BasisIndex, SignConvention, ALICE_ALPHA,
    ALICE_PSI,
};
use permanence::sampling::{random_basis, random_isometry, random_ket, random_unitary};
use permanence::states::{gram, kets_with_overlap, qubit_basis, singlet};
use permanence::tensor::eig_hermitian;
use permanence::{
    BasisPair, Complex, DensityMatrix, Error, Ket, MachineMode, MachineSpec, Matrix, StateFamily,
    SubsystemSignature,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ToleranceParams;
use crate::report::{ScenarioReport, Verdict};
use crate::scenario::{density_violation, gram_families, nosignal_machine};

pub const DEFAULT_SEED: u64 = 20_240_611;

type Rng64 = ChaCha8Rng;

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn sig(spec: &[(&str, usize)]) -> SubsystemSignature {
    SubsystemSignature::new(spec.iter().copied()).expect("static signature")
}

fn max_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn random_mixed(s: &SubsystemSignature, rng: &mut Rng64) -> Result<DensityMatrix<f64>, Error> {
    let w: f64 = rng.random_range(0.0..1.0);
    let x = DensityMatrix::from_ket(&random_ket(s, rng)?)?;
    let y = DensityMatrix::from_ket(&random_ket(s, rng)?)?;
    DensityMatrix::mixture(&[(w, &x), (1.0 - w, &y)])
}

/// 0, 0.1, …, 1.
fn tenths() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

struct Suite {
    tol: ToleranceParams,
    seed: u64,
    report: ScenarioReport,
}

impl Suite {
    /// Fresh generator per invariant, so adding a check never shifts others.
    fn rng(&self, salt: u64) -> Rng64 {
        Rng64::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn check(&mut self, name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64, Error>) {
        let deviation = f().unwrap_or(f64::INFINITY);
        self.report
            .verdict(Verdict::new(name, deviation, tolerance));
    }

    fn holds(&mut self, name: &str, f: impl FnOnce() -> Result<bool, Error>) {
        self.report
            .verdict(Verdict::holds(name, f().unwrap_or(false)));
    }
}

pub fn verify(tol: ToleranceParams, seed: u64) -> ScenarioReport {
    let config = vec![
        ("seed".to_string(), seed.to_string()),
        (
            "tolerance.assertion".to_string(),
            format!("{:e}", tol.assertion),
        ),
        (
            "tolerance.residual".to_string(),
            format!("{:e}", tol.residual),
        ),
        (
            "tolerance.reconstruction".to_string(),
            format!("{:e}", tol.reconstruction),
        ),
    ];
    let mut s = Suite {
        tol,
        seed,
        report: ScenarioReport::new("verify", config),
    };
    tensor_core(&mut s);
    states(&mut s);
    machines(&mut s);
    nosignal(&mut s);
    conservation(&mut s);
    s.report
}

fn tensor_core(s: &mut Suite) {
    let t = s.tol;

    let mut rng = s.rng(1);
    s.check("tensor_inner_factorization", t.residual, || {
        let (sa, sb) = (sig(&[("a", 2)]), sig(&[("b", 3)]));
        let mut dev = 0.0f64;
        for _ in 0..50 {
            let a = random_ket::<f64, _>(&sa, &mut rng)?;
            let b = random_ket::<f64, _>(&sb, &mut rng)?;
            let x = random_ket::<f64, _>(&sa, &mut rng)?;
            let y = random_ket::<f64, _>(&sb, &mut rng)?;
            let lhs = a.tensor(&b)?.inner(&x.tensor(&y)?)?;
            dev = dev.max((lhs - a.inner(&x)? * b.inner(&y)?).norm());
        }
        Ok(dev)
    });

    let mut rng = s.rng(2);
    let mut herm = 0.0f64;
    s.check("partial_trace_preserves_trace", t.residual, || {
        let full = sig(&[("a", 2), ("b", 3), ("c", 2)]);
        let keeps: [&[&str]; 4] = [&["a"], &["b"], &["a", "c"], &["b", "c"]];
        let mut dev = 0.0f64;
        for k in 0..40 {
            let rho = random_mixed(&full, &mut rng)?;
            let red = rho.partial_trace(keeps[k % keeps.len()])?;
            dev = dev.max((red.trace() - c(1.0)).norm());
            herm = herm.max(red.matrix().hermitian_deviation());
        }
        Ok(dev)
    });
    s.check("partial_trace_preserves_hermiticity", t.residual, || {
        Ok(herm)
    });

    let mut rng = s.rng(3);
    let mut triangle = 0.0f64;
    s.check("trace_distance_symmetry", t.residual, || {
        let full = sig(&[("a", 2), ("b", 2)]);
        let mut dev = 0.0f64;
        for _ in 0..40 {
            let x = random_mixed(&full, &mut rng)?;
            let y = random_mixed(&full, &mut rng)?;
            let z = random_mixed(&full, &mut rng)?;
            let xy = x.trace_distance(&y)?;
            dev = dev.max((xy - y.trace_distance(&x)?).abs());
            triangle = triangle.max(xy - x.trace_distance(&z)? - z.trace_distance(&y)?);
        }
        Ok(dev)
    });
    s.check("trace_distance_triangle", t.residual, || {
        Ok(triangle.max(0.0))
    });

    let mut rng = s.rng(4);
    s.check("eig_reconstruction_8x8", t.residual, || {
        let mut dev = 0.0f64;
        for _ in 0..20 {
            let u = random_unitary::<f64, _>(8, &mut rng);
            let d: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
            let h = u.matmul(&Matrix::diagonal(&d)).matmul(&u.adjoint());
            let h = Matrix::from_fn(8, 8, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
            let sp = eig_hermitian(&h)?;
            dev = dev
                .max(sp.reconstruction_residual(&h))
                .max(sp.orthonormality_residual());
        }
        Ok(dev)
    });

    let mut rng = s.rng(5);
    s.check("density_eigenvalues_in_unit_interval", t.residual, || {
        let full = sig(&[("a", 2), ("b", 4)]);
        let mut dev = 0.0f64;
        for _ in 0..20 {
            for e in random_mixed(&full, &mut rng)?.eigenvalues()? {
                dev = dev.max(-e).max(e - 1.0);
            }
        }
        Ok(dev)
    });

    let mut rng = s.rng(6);
    s.check("pure_state_entropy_zero", t.residual, || {
        let full = sig(&[("a", 2), ("b", 3)]);
        let mut dev = 0.0f64;
        for _ in 0..30 {
            let k = random_ket::<f64, _>(&full, &mut rng)?;
            dev = dev.max(DensityMatrix::from_ket(&k)?.entropy()?.abs());
        }
        Ok(dev)
    });
}

fn states(s: &mut Suite) {
    let t = s.tol;

    let mut rng = s.rng(10);
    s.check("singlet_basis_invariance", t.assertion, || {
        let mut dev = 0.0f64;
        for _ in 0..50 {
            let b1: BasisPair<f64> = random_basis(&mut rng);
            let b2: BasisPair<f64> = random_basis(&mut rng);
            let m = singlet(&b1, ("l", "r"))?.overlap_modulus(&singlet(&b2, ("l", "r"))?)?;
            dev = dev.max((m - 1.0).abs());
        }
        Ok(dev)
    });

    let mut rng = s.rng(11);
    let mut invariance = 0.0f64;
    s.check("gram_positive_semidefinite", t.assertion, || {
        let x = sig(&[("x", 4)]);
        let mut dev = 0.0f64;
        for n in 1..=6 {
            let members: Vec<Ket<f64>> = (0..n)
                .map(|_| random_ket(&x, &mut rng))
                .collect::<Result<_, _>>()?;
            let u = random_unitary::<f64, _>(4, &mut rng);
            let moved: Vec<Ket<f64>> = members
                .iter()
                .map(|k| Ket::new(x.clone(), u.mul_vec(k.amplitudes())))
                .collect::<Result<_, _>>()?;
            let g = gram(&StateFamily::new(members)?);
            invariance = invariance.max(g.max_abs_diff(&gram(&StateFamily::new(moved)?)));
            for e in eig_hermitian(&g)?.eigenvalues {
                dev = dev.max(-e);
            }
        }
        Ok(dev)
    });
    s.check("gram_unitary_invariance", t.residual, || Ok(invariance));

    s.check("overlap_round_trip", t.residual, || {
        let mut dev = 0.0f64;
        for dim in [2, 4] {
            let r = sig(&[("r", dim)]);
            for m in tenths() {
                for phase in [0.0, PI / 3.0, PI] {
                    let target = Complex::from_polar(m, phase);
                    let (x, y) = kets_with_overlap(target, &r)?;
                    dev = dev.max((x.inner(&y)? - target).norm());
                }
            }
        }
        Ok(dev)
    });
}

fn consistent_spec(rng: &mut Rng64) -> Result<(MachineSpec<f64>, StateFamily<f64>), Error> {
    let acted = sig(&[("x", 2), ("y", 2)]);
    let out = sig(&[("x", 2), ("y", 2), ("z", 2)]);
    let basis = random_unitary::<f64, _>(4, rng);
    let v = random_isometry::<f64, _>(8, 4, rng);
    let inputs: Vec<Ket<f64>> = (0..4)
        .map(|k| Ket::new(acted.clone(), basis.column(k)))
        .collect::<Result<_, _>>()?;
    let pairs = inputs
        .iter()
        .map(|i| Ok((i.clone(), Ket::new(out.clone(), v.mul_vec(i.amplitudes()))?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((
        MachineSpec::new(acted, out, pairs, MachineMode::Termwise)?,
        StateFamily::new(inputs)?,
    ))
}

fn machines(s: &mut Suite) {
    let t = s.tol;

    let mut rng = s.rng(20);
    s.holds("strong_cloner_consistency_iff", || {
        let layout = Layout::default();
        for k in 0..200 {
            let a: f64 = rng.random_range(0.05..1.0);
            let cc: f64 = rng.random_range(0.0..1.0);
            let b: f64 = match k % 4 {
                0 => a * cc,
                1 => (a * cc + rng.random_range(1e-6..1e-3)).min(1.0),
                _ => rng.random_range(0.0..1.0),
            };
            let sc = build_conservation(c(a), c(b), c(cc), layout.clone())?;
            let consistent = check_consistency_with(&sc.machine, t.assertion).consistent;
            if consistent != ((b - a * cc).abs() < t.assertion) {
                return Ok(false);
            }
        }
        Ok(true)
    });

    let mut rng = s.rng(21);
    s.holds("deleter_consistency_iff", || {
        let layout = Layout::default();
        let qubit = sig(&[("q", 2)]);
        let anc = sig(&[("C", layout.ancilla_dim)]);
        for k in 0..200 {
            let a: f64 = rng.random_range(0.05..1.0);
            let d: f64 = match k % 4 {
                0 => a,
                1 => (a - rng.random_range(1e-6..1e-3)).max(0.0),
                2 => a * a,
                _ => rng.random_range(0.0..1.0),
            };
            let psi = kets_with_overlap(c(a), &qubit)?;
            let out = kets_with_overlap(c(d), &anc)?;
            let m = preset_deleter((&psi.0, &psi.1), (&out.0, &out.1), &layout)?;
            let consistent = check_consistency_with(&m, t.assertion).consistent;
            if consistent != ((d - a).abs() < t.assertion) {
                return Ok(false);
            }
        }
        Ok(true)
    });

    let mut rng = s.rng(22);
    s.check("isometry_extension_residual", t.assertion, || {
        let mut dev = 0.0f64;
        for _ in 0..30 {
            let (spec, _) = consistent_spec(&mut rng)?;
            let lm = extend_to_isometry(&spec)?;
            dev = dev
                .max(lm.isometry_deviation())
                .max(lm.pair_residual(&spec));
        }
        Ok(dev)
    });

    let mut rng = s.rng(23);
    s.check("termwise_linear_agreement", t.assertion, || {
        let whole = sig(&[("s", 3), ("x", 2), ("y", 2)]);
        let mut dev = 0.0f64;
        for _ in 0..100 {
            let (spec, expansion) = consistent_spec(&mut rng)?;
            let state = random_ket(&whole, &mut rng)?;
            let tw = apply_termwise(&spec, &state, &["x", "y"], &expansion, false)?;
            let lin = apply_linear(&extend_to_isometry(&spec)?, &state, &["x", "y"])?;
            dev = dev.max(max_diff(tw.amplitudes(), lin.amplitudes()));
        }
        Ok(dev)
    });
}

fn nosignal(s: &mut Suite) {
    let t = s.tol;

    let mut rng = s.rng(30);
    s.check("bob_premachine_maximally_mixed", t.residual, || {
        let quarter = Matrix::identity(4).scale_real(0.25);
        let mut dev = 0.0f64;
        for _ in 0..50 {
            let sc = build_scenario(
                (random_basis(&mut rng), random_basis(&mut rng)),
                (random_basis(&mut rng), random_basis(&mut rng)),
                Layout::default(),
            )?;
            dev = dev.max(bob_marginal_before(&sc)?.matrix().max_abs_diff(&quarter));
        }
        Ok(dev)
    });

    let mut rng = s.rng(31);
    let mut alice = 0.0f64;
    s.check("isometric_machines_no_signalling", t.residual, || {
        let layout = Layout::default();
        let bob = layout.wishful_signature()?;
        let n = bob.total_dim();
        let mut dev = 0.0f64;
        for _ in 0..100 {
            let sc = build_scenario(
                (random_basis(&mut rng), random_basis(&mut rng)),
                (random_basis(&mut rng), random_basis(&mut rng)),
                layout.clone(),
            )?;
            let u = random_unitary::<f64, _>(n, &mut rng);
            let pairs = (0..n)
                .map(|k| {
                    Ok((
                        Ket::basis(bob.clone(), k)?,
                        Ket::new(bob.clone(), u.column(k))?,
                    ))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let m = MachineSpec::new(
                bob.clone(),
                bob.clone(),
                pairs,
                MachineMode::LinearExtension,
            )?;
            dev = dev.max(signalling_magnitude(&sc, &m)?);

            let lm = LinearMachine::new(u, bob.clone(), bob.clone(), t.assertion.max(1e-10))?;
            let post = apply_linear(&lm, &sc.joint, &sc.bob_with_ancilla())?;
            let keep = [ALICE_PSI, ALICE_ALPHA];
            let before = DensityMatrix::from_ket(&sc.joint)?.partial_trace(&keep)?;
            let after = DensityMatrix::from_ket(&post)?.partial_trace(&keep)?;
            alice = alice.max(before.max_abs_diff(&after)?);
        }
        Ok(dev)
    });
    s.check("isometric_machines_alice_unchanged", t.residual, || {
        Ok(alice)
    });

    let thetas = [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0];
    let default_scenario = |theta: f64| {
        let comp = BasisPair::computational();
        let b2 = qubit_basis(theta, 0.0)?;
        build_scenario((comp.clone(), comp), (b2.clone(), b2), Layout::default())
    };
    let mut mixture = 0.0f64;
    let mut signs = 0.0f64;
    let mut validity = 0.0f64;
    s.holds("wishful_cloner_signals", || {
        let mut all = true;
        for theta in thetas {
            let sc = default_scenario(theta)?;
            let m = nosignal_machine(&sc, MachineMode::Termwise, Default::default())?;
            let mut after = Vec::new();
            for index in [BasisIndex::First, BasisIndex::Second] {
                let rho = bob_marginal_after(&sc, &m, index)?;
                mixture = mixture.max(rho.max_abs_diff(&declared_output_mixture(&sc, &m, index)?)?);
                let plus = bob_marginal_after_with(&sc, &m, index, SignConvention::AllPlus)?;
                signs = signs.max(rho.max_abs_diff(&plus)?);
                validity = validity.max(density_violation(&rho)?);
                after.push(rho);
            }
            all &= after[0].trace_distance(&after[1])? > 10.0 * t.assertion;
        }
        Ok(all)
    });
    s.check("declared_mixture_matches", t.residual, || Ok(mixture));
    s.check("sign_convention_invariance", t.residual, || Ok(signs));
    s.check("bob_after_valid", t.residual, || Ok(validity));
    s.check("identical_bases_do_not_signal", t.residual, || {
        let sc = default_scenario(0.0)?;
        let m = nosignal_machine(&sc, MachineMode::Termwise, Default::default())?;
        signalling_magnitude(&sc, &m)
    });
}

fn conservation(s: &mut Suite) {
    let t = s.tol;
    let layout = Layout::default();

    let mut lb_dev = 0.0f64;
    let mut la_dev = 0.0f64;
    let mut marg_dev = 0.0f64;
    let mut delta_dev = 0.0f64;
    let mut surface_ok = true;
    let grid_result: Result<(), Error> = (|| {
        for a in tenths() {
            for b in tenths() {
                for cc in tenths() {
                    let sc = build_conservation(c(a), c(b), c(cc), layout.clone())?;
                    let before = alice_marginal_before(&sc)?;
                    let after = alice_marginal_after(&sc)?;
                    let eb = before.eigenvalues()?[0];
                    let ea = after.eigenvalues()?[0];
                    lb_dev = lb_dev.max((eb - lambda_before(c(a), c(b))).abs());
                    la_dev = la_dev.max((ea - lambda_after(c(a), c(cc))).abs());
                    marg_dev = marg_dev
                        .max(
                            before
                                .matrix()
                                .max_abs_diff(&alice_closed_form(0.5, c(a * b))),
                        )
                        .max(
                            after
                                .matrix()
                                .max_abs_diff(&alice_closed_form(0.5, c(a * a * cc))),
                        );
                    let d = entanglement_delta(&sc)?;
                    let formula = (a * a * cc - a * b) / 2.0;
                    delta_dev = delta_dev.max((d.delta_lambda - formula).abs());

                    let on_surface = a == 0.0 || (b - a * cc).abs() < t.residual;
                    let zero =
                        d.delta_lambda.abs() < t.residual && d.delta_entropy.abs() < t.residual;
                    let consistent = check_consistency_with(&sc.machine, t.assertion).consistent;
                    surface_ok &= zero == on_surface && consistent == on_surface;
                }
            }
        }
        Ok(())
    })();
    let failed = grid_result.is_err();
    let or_inf = |x: f64| if failed { f64::INFINITY } else { x };
    s.check("lambda_before_closed_form", t.residual, || {
        Ok(or_inf(lb_dev))
    });
    s.check("lambda_after_closed_form", t.residual, || {
        Ok(or_inf(la_dev))
    });
    s.check("alice_marginal_closed_forms", t.residual, || {
        Ok(or_inf(marg_dev))
    });
    s.check("entanglement_delta_formula", t.residual, || {
        Ok(or_inf(delta_dev))
    });
    s.holds("conservation_surface", || Ok(!failed && surface_ok));

    let mut rng = s.rng(40);
    s.check("isometric_bob_preserves_alice", t.residual, || {
        let bob = sig(&[("B_psi", 2), ("B_alpha", 2)]);
        let out = sig(&[("B_psi", 2), ("B_alpha", 2), ("E", 2)]);
        let mut dev = 0.0f64;
        for _ in 0..30 {
            let (a, b, cc) = (
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
            );
            let sc = build_conservation(c(a), c(b), c(cc), layout.clone())?;
            let lm = LinearMachine::new(
                random_isometry(8, 4, &mut rng),
                bob.clone(),
                out.clone(),
                1e-10,
            )?;
            let post = apply_linear(&lm, &sc.shared, &["B_psi", "B_alpha"])?;
            let after = DensityMatrix::from_ket(&post)?.partial_trace(&[ALICE])?;
            dev = dev.max(after.max_abs_diff(&alice_marginal_before(&sc)?)?);
        }
        Ok(dev)
    });

    let mut rng = s.rng(41);
    let mut iso = 0.0f64;
    s.check("equivalence_unitary_round_trip", t.reconstruction, || {
        let mut dev = 0.0f64;
        for k in 0..100 {
            let dim = 2 + k % 7;
            let members = rng.random_range(1..=dim);
            let (f, g) = gram_families(dim, members, rng.random(), 0.0)?;
            let lm = equivalence_unitary(&f, &g)?;
            iso = iso.max(lm.isometry_deviation());
            for (x, y) in f.members().iter().zip(g.members()) {
                dev = dev.max(max_diff(
                    &lm.matrix().mul_vec(x.amplitudes()),
                    y.amplitudes(),
                ));
            }
        }
        Ok(dev)
    });
    s.check("equivalence_unitary_isometry", t.assertion, || Ok(iso));
    s.holds("gram_mismatch_rejected", || {
        let (f, g) = gram_families(4, 3, 1, 0.3)?;
        Ok(matches!(
            equivalence_unitary(&f, &g),
            Err(Error::GramMismatch { max_deviation }) if max_deviation > 0.0
        ))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances_pass() {
        let r = verify(ToleranceParams::default(), DEFAULT_SEED);
        let failed: Vec<String> = r
            .verdicts
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.line())
            .collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
