use std::f64::consts::PI;

use arrconn::arrangement::{Arrangement, Hyperplane};
use arrconn::connection::StandardConnection;
use arrconn::holonomy::*;
use arrconn::lauricella::*;
use arrconn::numkernel::{
    eigenvalues, hermitian_signature, CMatrix, ExactMatrix, GaussianRational,
};
use arrconn::pkcriteria::signature_formula;
use num_complex::Complex64;
use proptest::prelude::*;

fn pv(r: &[(i64, i64)]) -> ParameterVector {
    ParameterVector::from_ratios(r).unwrap()
}

fn unit(a: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * a)
}

/// Parameters are drawn from `(−1, 1)`: transports in the coordinate frame
/// grow like `|λ|^{|a|}` along the tails, so large parameters cost precision.
///
/// Every nonempty subset sum of `a_1, …, a_{n+1}` and `a_{n+2}` is non-integral.
fn generic_real(a: &ParameterVector) -> bool {
    let m = a.n() + 1;
    (1u32..1 << m).all(|mask| {
        let subset: Vec<usize> = (1..=m).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        !a.subset_sum(&subset).is_integer()
    }) && !a.a_infinity().is_integer()
}

fn real_generic_params(n: usize) -> impl Strategy<Value = ParameterVector> {
    prop::collection::vec((2i64..12).prop_flat_map(|d| (-(d - 1)..d, Just(d))), n + 1)
        .prop_map(|r| ParameterVector::from_ratios(&r).unwrap())
        .prop_filter("non-integral subset sums", generic_real)
}

fn floats(a: &ParameterVector) -> Vec<f64> {
    a.to_complex().iter().map(|z| z.re).collect()
}

/// Largest distance in a greedy matching of the two spectra.
fn spectral_distance(x: &CMatrix, y: &CMatrix) -> f64 {
    let mut rest = eigenvalues(y);
    eigenvalues(x).iter().fold(0.0, |worst: f64, e| {
        let (k, d) = rest
            .iter()
            .map(|z| (z - e).norm())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        rest.swap_remove(k);
        worst.max(d)
    })
}

#[test]
fn one_dimensional_holonomy_is_exponential() {
    let arr = Arrangement::new(1, vec![Hyperplane::from_integers("z", &[1])]).unwrap();
    for (p, q) in [(1, 4), (-7, 10), (13, 10)] {
        let r = ExactMatrix::scalar(1, &GaussianRational::from_ratio(p, q));
        let c = StandardConnection::new_exact(arr.clone(), vec![r]).unwrap();
        let loops = generator_loops(&arr, 0).unwrap();
        let t = holonomy(&c, &loops.meridians[0], DEFAULT_ODE_TOL).unwrap();
        assert!((t.matrix[(0, 0)] - unit(p as f64 / q as f64)).norm() < 1e-8);
    }
}

#[test]
fn a2_central_loop_and_meridian_determinants() {
    let a = pv(&[(1, 10), (2, 10), (3, 10)]);
    let c = reduced_residues(&a);
    let rep = holonomy_report(&c, &HolonomyOptions::default()).unwrap();
    let expected = CMatrix::identity(2, 2) * unit(0.6);
    assert!((&rep.central.matrix - expected).norm() < 1e-6);
    let weights = [0.3, 0.4, 0.5];
    for (m, w) in rep.meridians.iter().zip(weights) {
        assert!(
            (m.matrix.determinant() - unit(w)).norm() < 1e-6,
            "{}",
            m.label
        );
    }
}

#[test]
fn pinned_signature_and_irreducibility() {
    let c = reduced_residues(&pv(&[(1, 10), (1, 10), (1, 10)]));
    let rep = holonomy_report(&c, &HolonomyOptions::default()).unwrap();
    assert_eq!(rep.invariant_forms.len(), 1);
    let s = rep.signature.unwrap();
    assert_eq!(s.kernel_dim, 0);
    assert!((s.p, s.q) == (0, 2) || (s.p, s.q) == (2, 0));

    let c = reduced_residues(&pv(&[(1, 10), (2, 10), (3, 10)]));
    let rep = holonomy_report(&c, &HolonomyOptions::default()).unwrap();
    assert_eq!(rep.irreducibility.verdict, Irreducibility::Irreducible);
}

#[test]
fn vanishing_third_parameter_gives_diagonal_invariant_line() {
    for r in [[(3, 10), (4, 10), (0, 1)], [(1, 7), (-2, 5), (0, 1)]] {
        let c = reduced_residues(&pv(&r));
        let rep = holonomy_report(&c, &HolonomyOptions::default()).unwrap();
        assert_eq!(rep.irreducibility.verdict, Irreducibility::Reducible);
        let line = rep.irreducibility.invariant_line.unwrap();
        assert!((line[0] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        assert!((line[1] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }
}

#[test]
fn integral_parameters_give_kernel() {
    for r in [
        vec![(3, 10), (4, 10), (1, 1)],
        vec![(3, 10), (4, 10), (0, 1)],
        vec![(1, 3), (1, 4), (0, 1), (1, 7)],
        vec![(1, 5), (1, 2), (1, 4), (1, 20)],
    ] {
        let a = pv(&r);
        let rep = holonomy_report(&reduced_residues(&a), &HolonomyOptions::default()).unwrap();
        assert_eq!(rep.invariant_forms.len(), 1, "{r:?}");
        let s = rep.signature.unwrap();
        let count = a.values().iter().filter(|x| x.is_integer()).count()
            + usize::from(a.a_infinity().is_integer());
        assert_eq!(s.kernel_dim, count, "{r:?}");
    }
}

#[test]
fn central_spectra_on_every_a3_flat() {
    let c = reduced_residues(&pv(&[(1, 10), (2, 10), (3, 10), (-1, 7)]));
    let lattice = c.arrangement().lattice().unwrap().clone();
    for flat in lattice.flats().iter().filter(|f| !f.is_ambient()) {
        let rep = central_loop_spectrum_check(&c, flat, 1e-6, 5).unwrap();
        assert!(rep.pass, "{}: {:?}", rep.flat, rep.entries);
    }
}

#[test]
fn central_spectra_examples() {
    let c = reduced_residues(&pv(&[(1, 10), (2, 10), (3, 10)]));
    let origin = c
        .arrangement()
        .lattice()
        .unwrap()
        .of_codim(2)
        .next()
        .unwrap()
        .clone();
    let rep = central_loop_spectrum_check(&c, &origin, 1e-6, 0).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.entries.len(), 2);

    let a3 = reduced_residues(&pv(&[(1, 10), (2, 10), (3, 10), (1, 5)]));
    let arr = a3.arrangement().sub_arrangement(&[0]);
    let res = a3.exact_residues().unwrap()[0].clone();
    let single = StandardConnection::new_exact(arr.clone(), vec![res]).unwrap();
    assert!(
        central_loop_spectrum_check(&single, &arr.hyperplane_flat(0), 1e-6, 0)
            .unwrap()
            .pass
    );

    let zero = StandardConnection::zero(arr.clone());
    let rep = central_loop_spectrum_check(&zero, &arr.hyperplane_flat(0), 1e-9, 0).unwrap();
    assert!(rep.pass);
    assert!(rep.entries[0]
        .expected
        .iter()
        .all(|z| *z == Complex64::new(1.0, 0.0)));
}

#[test]
fn residue_limits() {
    let c = reduced_residues(&pv(&[(1, 10), (2, 10), (3, 10)]));
    for h in 0..3 {
        let rep = residue_limit_check(&c, h, &[0.2, 0.1, 0.05], 0).unwrap();
        assert!(rep.decreasing, "{}: {:?}", rep.hyperplane, rep.errors);
    }
    let arr = Arrangement::new(1, vec![Hyperplane::from_integers("z", &[1])]).unwrap();
    let one = StandardConnection::new_exact(
        arr,
        vec![ExactMatrix::scalar(1, &GaussianRational::from_ratio(1, 3))],
    )
    .unwrap();
    let rep = residue_limit_check(&one, 0, &[1.0, 0.5], 0).unwrap();
    assert!(rep.errors.iter().all(|(_, e)| *e < 1e-8));
}

#[test]
fn loops_are_deterministic() {
    let arr = build_an(3).unwrap();
    assert_eq!(
        generator_loops(&arr, 11).unwrap(),
        generator_loops(&arr, 11).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn meridians_with_different_radii_are_conjugate(a in real_generic_params(2), seed in 0u64..50) {
        let c = reduced_residues(&a);
        let wide = generator_loops_with(c.arrangement(), seed, 1.0 / 3.0).unwrap();
        let narrow = generator_loops_with(c.arrangement(), seed, 1.0 / 6.0).unwrap();
        for (m1, m2) in wide.meridians.iter().zip(&narrow.meridians) {
            let t1 = holonomy(&c, m1, DEFAULT_ODE_TOL).unwrap().matrix;
            let t2 = holonomy(&c, m2, DEFAULT_ODE_TOL).unwrap().matrix;
            prop_assert!(spectral_distance(&t1, &t2) < 1e-6);
        }
    }

    #[test]
    fn meridian_determinant_is_exponential_of_weight(a in real_generic_params(2), seed in 0u64..50) {
        let c = reduced_residues(&a);
        let opts = HolonomyOptions { seed, ..HolonomyOptions::default() };
        let rep = holonomy_report(&c, &opts).unwrap();
        for (m, r) in rep.meridians.iter().zip(c.float_residues()) {
            let expected = (Complex64::new(0.0, 2.0 * PI) * r.trace()).exp();
            prop_assert!((m.matrix.determinant() - expected).norm() < 1e-6);
        }
    }

    #[test]
    fn signature_agrees_and_definite_forms_are_preserved(a in real_generic_params(2), seed in 0u64..50) {
        let c = reduced_residues(&a);
        let opts = HolonomyOptions { seed, ..HolonomyOptions::default() };
        let rep = holonomy_report(&c, &opts).unwrap();
        prop_assert_eq!(rep.irreducibility.verdict, Irreducibility::Irreducible);
        prop_assert_eq!(rep.invariant_forms.len(), 1);
        let s = rep.signature.clone().unwrap();
        let formula = signature_formula(&floats(&a));
        prop_assert!((s.p, s.q) == (formula.p, formula.q) || (s.q, s.p) == (formula.p, formula.q));
        prop_assert_eq!(s.kernel_dim, 0);
        if s.p == 0 || s.q == 0 {
            let f = rep.invariant_forms[0].matrix();
            for m in &rep.meridians {
                let drift = (m.matrix.adjoint() * f * &m.matrix - f).norm() / f.norm();
                prop_assert!(drift < 1e-7);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn signature_agrees_in_dimension_three(a in real_generic_params(3)) {
        let rep = holonomy_report(&reduced_residues(&a), &HolonomyOptions::default()).unwrap();
        prop_assert_eq!(rep.invariant_forms.len(), 1);
        let s = rep.signature.clone().unwrap();
        let formula = signature_formula(&floats(&a));
        prop_assert!((s.p, s.q) == (formula.p, formula.q) || (s.q, s.p) == (formula.p, formula.q));
        let signature = hermitian_signature(&rep.invariant_forms[0], DEFAULT_FORM_SIGNATURE_TOL);
        prop_assert_eq!(signature.p + signature.q, 3);
    }
}
