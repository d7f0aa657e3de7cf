use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use permanence::conservation::{
    alice_closed_form, alice_marginal_after, alice_marginal_before, build_conservation,
    entanglement_delta, equivalence_unitary, lambda_after, lambda_before, ALICE,
};
use permanence::machines::{
    apply_linear, apply_termwise, check_consistency, default_ancilla_outputs,
    default_cross_outputs, extend_to_isometry, preset_deleter, preset_strong_cloner,
    preset_wishful_cloner, CrossOutputs, Layout, LinearMachine, MachineMode, MachineSpec,
};
use permanence::nosignal::{
    bob_conditioned, bob_marginal_after, bob_marginal_after_with, bob_marginal_before,
    build_scenario, declared_output_mixture, outcome_probabilities, signalling_magnitude,
    BasisIndex, SignConvention, TwoSingletScenario, ALICE_ALPHA, ALICE_PSI,
};
use permanence::sampling::{random_basis, random_isometry, random_ket, random_unitary};
use permanence::states::{kets_with_overlap, qubit_basis, singlet, BasisPair, StateFamily};
use permanence::tensor::{DensityMatrix, Ket, Matrix, SubsystemSignature};
use permanence::{Complex, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn wishful(s: &TwoSingletScenario<f64>, index: BasisIndex) -> MachineSpec<f64> {
    let (pb, ab) = s.bases(index);
    let cross = default_cross_outputs(pb, ab, &s.layout, CrossOutputs::PassThrough).unwrap();
    let anc = default_ancilla_outputs(&s.layout).unwrap();
    preset_wishful_cloner(pb, ab, cross, anc, &s.layout).unwrap()
}

fn scenario_at(theta: f64) -> TwoSingletScenario<f64> {
    let comp = BasisPair::computational();
    let b2 = qubit_basis(theta, 0.0).unwrap();
    build_scenario((comp.clone(), comp), (b2.clone(), b2), Layout::default()).unwrap()
}

#[test]
fn two_singlets_match_explicit_expansion() {
    let b = qubit_basis(1.1, 0.4).unwrap();
    let chi = singlet(&b, ("A_psi", "B_psi")).unwrap();
    let xi = singlet(&b, ("A_alpha", "B_alpha")).unwrap();
    let joint = chi.tensor(&xi).unwrap();

    // ½(ψψ̄αᾱ − ψψ̄ᾱα − ψ̄ψαᾱ + ψ̄ψᾱα) with factors (A_psi, B_psi, A_alpha, B_alpha)
    let [p, pb] = [
        b.primary.amplitudes().to_vec(),
        b.complement.amplitudes().to_vec(),
    ];
    let mut expect = vec![c(0.0, 0.0); 16];
    let terms: [(
        f64,
        &[Complex<f64>],
        &[Complex<f64>],
        &[Complex<f64>],
        &[Complex<f64>],
    ); 4] = [
        (0.5, &p, &pb, &p, &pb),
        (-0.5, &p, &pb, &pb, &p),
        (-0.5, &pb, &p, &p, &pb),
        (0.5, &pb, &p, &pb, &p),
    ];
    for (w, x0, x1, x2, x3) in terms {
        for i in 0..16 {
            let (a0, a1, a2, a3) = (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1);
            expect[i] += x0[a0] * x1[a1] * x2[a2] * x3[a3] * w;
        }
    }
    for (a, e) in joint.amplitudes().iter().zip(&expect) {
        assert!((a - e).norm() < 1e-12);
    }
}

#[test]
fn bob_is_maximally_mixed_before_any_machine() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let b1 = (random_basis(&mut r), random_basis(&mut r));
        let b2 = (random_basis(&mut r), random_basis(&mut r));
        let s = build_scenario(b1, b2, Layout::default()).unwrap();
        let rho = bob_marginal_before(&s).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&Matrix::identity(4).scale_real(0.25))
                < 1e-12
        );
    }
}

#[test]
fn wishful_preset_shape() {
    let s = scenario_at(FRAC_PI_2);
    let m = wishful(&s, BasisIndex::First);
    assert_eq!(m.pairs().len(), 4);
    assert_eq!(m.mode(), MachineMode::Termwise);
    for (i, o) in m.pairs() {
        assert!((i.norm() - 1.0).abs() < 1e-15 && (o.norm() - 1.0).abs() < 1e-15);
    }
    let zero = |l: &str| Ket::<f64>::basis_on(l, 2, 0).unwrap();
    let c1 = Ket::basis_on("C", 4, 1).unwrap();
    let expect = Ket::tensor_all(&[&zero("B_psi"), &zero("B_alpha"), &c1]).unwrap();
    assert_eq!(m.pairs()[0].1, expect);
}

#[test]
fn termwise_reproduces_branches_in_each_basis() {
    for theta in [FRAC_PI_4, FRAC_PI_2] {
        let s = scenario_at(theta);
        for index in [BasisIndex::First, BasisIndex::Second] {
            let m = wishful(&s, index);
            let branches = bob_conditioned(&s, &m, index, SignConvention::Faithful).unwrap();
            // Alice finds (x, y) ⇒ Bob had (x̄, ȳ) with sign from the singlet expansion
            let order = [3usize, 2, 1, 0];
            let signs = [1.0, -1.0, -1.0, 1.0];
            for (k, b) in branches.iter().enumerate() {
                let out = &m.pairs()[match order[k] {
                    0 => 0,
                    3 => 1,
                    1 => 2,
                    _ => 3,
                }]
                .1;
                let expect = out.scale(c(0.5 * signs[k], 0.0));
                let b = b.aligned_to(out.signature()).unwrap();
                let d = b
                    .amplitudes()
                    .iter()
                    .zip(expect.amplitudes())
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(
                    d < 1e-12,
                    "branch {k} basis {} theta {theta}",
                    index.number()
                );
            }
            let p = outcome_probabilities(&s, &m, index).unwrap();
            assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
        }
    }
}

#[test]
fn sign_reading_does_not_change_marginals() {
    let s = scenario_at(0.7);
    for index in [BasisIndex::First, BasisIndex::Second] {
        let m = wishful(&s, index);
        let a = bob_marginal_after_with(&s, &m, index, SignConvention::Faithful).unwrap();
        let b = bob_marginal_after_with(&s, &m, index, SignConvention::AllPlus).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        let d = declared_output_mixture(&s, &m, index).unwrap();
        assert!(a.max_abs_diff(&d).unwrap() < 1e-12);
        a.validate(1e-12).unwrap();
    }
}

#[test]
fn union_of_bases_signals() {
    for theta in [FRAC_PI_4 / 2.0, FRAC_PI_4, 3.0 * FRAC_PI_4 / 2.0, FRAC_PI_2] {
        let s = scenario_at(theta);
        let m = wishful(&s, BasisIndex::First)
            .union(&wishful(&s, BasisIndex::Second))
            .unwrap();
        assert!(!check_consistency(&m).consistent);
        let mag = signalling_magnitude(&s, &m).unwrap();
        assert!(mag > 1e-9, "theta {theta}: {mag}");
        let r1 = bob_marginal_after(&s, &m, BasisIndex::First).unwrap();
        let r2 = bob_marginal_after(&s, &m, BasisIndex::Second).unwrap();
        assert!(r1.max_abs_diff(&r2).unwrap() > 1e-6);
    }
    let s = scenario_at(0.0);
    let m = wishful(&s, BasisIndex::First);
    assert!(signalling_magnitude(&s, &m).unwrap() < 1e-12);
}

#[test]
fn random_isometry_on_bob_never_signals() {
    let mut r = ChaCha8Rng::seed_from_u64(21);
    let layout = Layout::default();
    let sig = layout.wishful_signature().unwrap();
    for _ in 0..10 {
        let s = build_scenario(
            (random_basis(&mut r), random_basis(&mut r)),
            (random_basis(&mut r), random_basis(&mut r)),
            layout.clone(),
        )
        .unwrap();
        let u = random_unitary::<f64, _>(sig.total_dim(), &mut r);
        let lm = LinearMachine::new(u, sig.clone(), sig.clone(), 1e-10).unwrap();
        let post = apply_linear(&lm, &s.joint, &s.bob_with_ancilla()).unwrap();
        let before = DensityMatrix::from_ket(&s.joint)
            .unwrap()
            .partial_trace(&[ALICE_PSI, ALICE_ALPHA])
            .unwrap();
        let after = DensityMatrix::from_ket(&post)
            .unwrap()
            .partial_trace(&[ALICE_PSI, ALICE_ALPHA])
            .unwrap();
        assert!(before.max_abs_diff(&after).unwrap() < 1e-12);
    }
}

#[test]
fn strong_cloner_consistency_examples() {
    let layout = Layout::default();
    for (b, consistent, dev) in [(0.5, false, 0.12), (0.3, true, 0.0)] {
        let s = build_conservation(c(0.6, 0.0), c(b, 0.0), c(0.5, 0.0), layout.clone()).unwrap();
        let rep = check_consistency(&s.machine);
        assert_eq!(rep.consistent, consistent);
        assert!((rep.max_deviation - dev).abs() < 1e-12);
        assert!((rep.input_gram[(0, 1)].re - 0.6 * b).abs() < 1e-12);
        assert!((rep.output_gram[(0, 1)].re - 0.18).abs() < 1e-12);
    }
    let s = build_conservation(c(0.6, 0.0), c(0.3, 0.0), c(0.5, 0.0), layout.clone()).unwrap();
    let lm = extend_to_isometry(&s.machine).unwrap();
    assert!(lm.pair_residual(&s.machine) < 1e-10);
    assert!(lm.isometry_deviation() < 1e-10);

    let zero = Ket::<f64>::basis_on("q", 2, 0).unwrap();
    let one = Ket::<f64>::basis_on("q", 2, 1).unwrap();
    let reg = layout.strong_register().unwrap();
    let m = preset_strong_cloner(
        (&zero, &one),
        (&zero, &zero),
        (
            &Ket::basis(reg.clone(), 0).unwrap(),
            &Ket::basis(reg, 1).unwrap(),
        ),
        &layout,
    )
    .unwrap();
    assert!(check_consistency(&m).consistent);
}

#[test]
fn deleter_consistency_examples() {
    let layout = Layout::default();
    let anc = SubsystemSignature::single("C", 4).unwrap();
    let qubit = SubsystemSignature::single("q", 2).unwrap();
    for a in [0.0, 0.3, 0.7, 1.0] {
        let psi = kets_with_overlap(c(a, 0.0), &qubit).unwrap();
        let exported = kets_with_overlap(c(a, 0.0), &anc).unwrap();
        let m = preset_deleter((&psi.0, &psi.1), (&exported.0, &exported.1), &layout).unwrap();
        assert!(check_consistency(&m).consistent, "a = {a}");
        extend_to_isometry(&m).unwrap();

        let lost = kets_with_overlap(c(a * a, 0.0), &anc).unwrap();
        let m = preset_deleter((&psi.0, &psi.1), (&lost.0, &lost.1), &layout).unwrap();
        let rep = check_consistency(&m);
        assert_eq!(rep.consistent, a == 0.0 || a == 1.0, "a = {a}");
        assert!((rep.max_deviation - (a * a - a * a * a).abs()).abs() < 1e-12);
    }
}

#[test]
fn conservation_marginals_match_closed_forms() {
    let s = build_conservation(c(0.6, 0.0), c(0.5, 0.0), c(0.5, 0.0), Layout::default()).unwrap();
    let before = alice_marginal_before(&s).unwrap();
    assert!(
        before
            .matrix()
            .max_abs_diff(&alice_closed_form(0.5, c(0.3, 0.0)))
            < 1e-12
    );
    assert!((before.matrix()[(1, 0)].norm() - 0.15).abs() < 1e-12);
    let after = alice_marginal_after(&s).unwrap();
    assert!(
        after
            .matrix()
            .max_abs_diff(&alice_closed_form(0.5, c(0.18, 0.0)))
            < 1e-12
    );
    assert!((after.matrix()[(1, 0)].norm() - 0.09).abs() < 1e-12);
    let e = before.eigenvalues().unwrap();
    assert!((e[0] - 0.65).abs() < 1e-12);
    let h = before.entropy().unwrap();
    assert!((h - 0.934068055375491).abs() < 1e-12);
    assert!((lambda_before(c(0.6, 0.0), c(0.5, 0.0)) - 0.65).abs() < 1e-15);
    assert!((lambda_after(c(0.6, 0.0), c(0.5, 0.0)) - 0.59).abs() < 1e-15);
    let d = entanglement_delta(&s).unwrap();
    assert!((d.delta_lambda + 0.06).abs() < 1e-12);
}

#[test]
fn complex_overlaps_keep_phase_in_coherences() {
    let a = Complex::<f64>::from_polar(0.7, 0.4);
    let b = Complex::from_polar(0.5, -1.2);
    let cc = Complex::from_polar(0.8, 2.0);
    let s = build_conservation(a, b, cc, Layout::default()).unwrap();
    let (ra, rb, rc) = s.realized_overlaps().unwrap();
    assert!((ra - a).norm() < 1e-12 && (rb - b).norm() < 1e-12 && (rc - cc).norm() < 1e-12);
    let before = alice_marginal_before(&s).unwrap();
    assert!(before.matrix().max_abs_diff(&alice_closed_form(0.5, a * b)) < 1e-12);
    let after = alice_marginal_after(&s).unwrap();
    assert!(
        after
            .matrix()
            .max_abs_diff(&alice_closed_form(0.5, a * a * cc))
            < 1e-12
    );
    assert!((after.eigenvalues().unwrap()[0] - lambda_after(a, cc)).abs() < 1e-12);
}

#[test]
fn isometry_on_bob_preserves_alice_in_conservation_state() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let s = build_conservation(c(0.6, 0.0), c(0.5, 0.0), c(0.5, 0.0), Layout::default()).unwrap();
    let before = alice_marginal_before(&s).unwrap();
    let bob = SubsystemSignature::new([("B_psi", 2), ("B_alpha", 2)]).unwrap();
    let out = SubsystemSignature::new([("B_psi", 2), ("B_alpha", 2), ("E", 3)]).unwrap();
    let lm = LinearMachine::new(random_isometry(12, 4, &mut r), bob, out, 1e-10).unwrap();
    let post = apply_linear(&lm, &s.shared, &["B_psi", "B_alpha"]).unwrap();
    let after = DensityMatrix::from_ket(&post)
        .unwrap()
        .partial_trace(&[ALICE])
        .unwrap();
    assert!(before.max_abs_diff(&after).unwrap() < 1e-12);
}

#[test]
fn equivalence_unitary_round_trips() {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    for dim in 2..=8 {
        let sig = SubsystemSignature::single("x", dim).unwrap();
        let n = 1 + dim / 2;
        let f: Vec<Ket<f64>> = (0..n).map(|_| random_ket(&sig, &mut r).unwrap()).collect();
        let u = random_unitary::<f64, _>(dim, &mut r);
        let g: Vec<Ket<f64>> = f
            .iter()
            .map(|k| Ket::new(sig.clone(), u.mul_vec(k.amplitudes())).unwrap())
            .collect();
        let f = StateFamily::new(f).unwrap();
        let g = StateFamily::new(g).unwrap();
        let lm = equivalence_unitary(&f, &g).unwrap();
        assert!(lm.isometry_deviation() < 1e-10);
        for (x, y) in f.members().iter().zip(g.members()) {
            let img = lm.matrix().mul_vec(x.amplitudes());
            let res = img
                .iter()
                .zip(y.amplitudes())
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-8);
        }
    }
    let sig = SubsystemSignature::single("x", 3).unwrap();
    let f = StateFamily::new(vec![Ket::<f64>::basis(sig.clone(), 0).unwrap()]).unwrap();
    let big = SubsystemSignature::single("y", 2).unwrap();
    let g = StateFamily::new(vec![Ket::<f64>::basis(big, 0).unwrap()]).unwrap();
    assert!(matches!(
        equivalence_unitary(&f, &g),
        Err(Error::DimensionIncompatible {
            input: 3,
            output: 2
        })
    ));
}

fn consistent_termwise_spec(seed: u64) -> (MachineSpec<f64>, StateFamily<f64>, Ket<f64>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let acted = SubsystemSignature::new([("x", 2), ("y", 2)]).unwrap();
    let out = SubsystemSignature::new([("x", 2), ("y", 2), ("z", 2)]).unwrap();
    let basis = random_unitary::<f64, _>(4, &mut r);
    let v = random_isometry::<f64, _>(8, 4, &mut r);
    let inputs: Vec<Ket<f64>> = (0..4)
        .map(|k| Ket::new(acted.clone(), basis.column(k)).unwrap())
        .collect();
    let pairs = inputs
        .iter()
        .map(|i| {
            let o = Ket::new(out.clone(), v.mul_vec(i.amplitudes())).unwrap();
            (i.clone(), o)
        })
        .collect();
    let spec = MachineSpec::new(acted, out, pairs, MachineMode::Termwise).unwrap();
    let whole = SubsystemSignature::new([("s", 3), ("x", 2), ("y", 2)]).unwrap();
    let state = random_ket(&whole, &mut r).unwrap();
    (spec, StateFamily::new(inputs).unwrap(), state)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn termwise_agrees_with_linear_extension(seed in any::<u64>()) {
        let (spec, expansion, state) = consistent_termwise_spec(seed);
        prop_assert!(check_consistency(&spec).consistent);
        let t = apply_termwise(&spec, &state, &["x", "y"], &expansion, false).unwrap();
        let lm = extend_to_isometry(&spec).unwrap();
        let l = apply_linear(&lm, &state, &["x", "y"]).unwrap();
        prop_assert_eq!(t.signature(), l.signature());
        let d = t
            .amplitudes()
            .iter()
            .zip(l.amplitudes())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        prop_assert!(d < 1e-10);
        prop_assert!((l.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_kets_round_trip(m in 0usize..=10, phase in 0usize..3, dim in 2usize..6) {
        let target = Complex::from_polar(m as f64 / 10.0, [0.0, std::f64::consts::FRAC_PI_3, std::f64::consts::PI][phase]);
        let sig = SubsystemSignature::single("r", dim).unwrap();
        let (x, y) = kets_with_overlap(target, &sig).unwrap();
        prop_assert!((x.inner(&y).unwrap() - target).norm() < 1e-12);
    }

    #[test]
    fn singlets_agree_up_to_phase(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let b1: BasisPair<f64> = random_basis(&mut r);
        let b2: BasisPair<f64> = random_basis(&mut r);
        let s1 = singlet(&b1, ("l", "r")).unwrap();
        let s2 = singlet(&b2, ("l", "r")).unwrap();
        prop_assert!((s1.overlap_modulus(&s2).unwrap() - 1.0).abs() < 1e-10);
        let m = DensityMatrix::from_ket(&s1).unwrap().partial_trace(&["r"]).unwrap();
        prop_assert!(m.matrix().max_abs_diff(&Matrix::identity(2).scale_real(0.5)) < 1e-12);
    }
}

#[test]
fn singlet_computational_amplitudes() {
    let s = singlet(&BasisPair::<f64>::computational(), ("l", "r")).unwrap();
    let expect = [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];
    for (a, e) in s.amplitudes().iter().zip(expect) {
        assert!((a - c(e, 0.0)).norm() < 1e-15);
    }
}
