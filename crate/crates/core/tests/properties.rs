use std::collections::BTreeMap;

use proptest::prelude::*;

use halfder_core::algebra::{AlgebraSpec, BasisElem, Degree, Element, Window};
use halfder_core::halfderiv::{self, ClosedFormMap, DegreeFunction};
use halfder_core::linalg;
use halfder_core::scalars::{rat, rat_frac, Rational, Scalar, ScalarField};
use halfder_core::tpa::{self, CenterFunctional, ProductTable};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat_frac(n, d))
}

fn generic_q() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![rat(2), rat(3), rat_frac(1, 2), rat(-2), rat_frac(5, 3), rat_frac(-3, 4)])
}

fn any_spec() -> impl Strategy<Value = AlgebraSpec> {
    prop_oneof![
        generic_q().prop_map(|q| AlgebraSpec::virasoro_generic(q).unwrap()),
        (3u32..=5).prop_map(|t| AlgebraSpec::virasoro_root(t).unwrap()),
        generic_q().prop_map(|q| AlgebraSpec::torus_generic(q).unwrap()),
        (3u32..=4).prop_map(|t| AlgebraSpec::torus_root(t).unwrap()),
    ]
}

fn shift() -> impl Strategy<Value = Degree> {
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| Degree::new(a, b))
}

fn scalar_in(field: &ScalarField, coeffs: &[Rational]) -> Scalar {
    field.from_coefficients(coeffs.to_vec()).unwrap()
}

/// Map read off a kernel vector, evaluated independently of the row builder.
fn kernel_map(sys: &halfderiv::ConstraintSystem, v: Vec<Scalar>) -> ClosedFormMap {
    let layout = sys.layout.clone();
    ClosedFormMap::new("kernel", sys.shift, move |e| layout.apply(&v, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_vectors_are_half_derivations(spec in any_spec(), n in 2u32..=3, i in shift()) {
        let w = Window::new(n);
        let (dims, basis, sys) = halfderiv::solve_shift(&spec, &w, i, 1).unwrap();
        prop_assert_eq!(dims.full, basis.dim());
        prop_assert_eq!(linalg::rank(&basis.vectors, basis.ncols), basis.dim());
        for k in 0..basis.dim() {
            let v = basis.dense(k);
            prop_assert!(sys.is_satisfied_by(&v));
            let rep = halfderiv::verify_candidate(&spec, &w, &kernel_map(&sys, v)).unwrap();
            prop_assert!(rep.passed(), "{:?}", rep.violations.first());
        }
    }

    #[test]
    fn interior_dimension_is_monotone(spec in any_spec(), i in shift()) {
        let w = Window::new(4);
        let (_, basis, sys) = halfderiv::solve_shift(&spec, &w, i, 1).unwrap();
        let dims: Vec<usize> = (1..4).map(|m| halfderiv::interior_dimension(&basis, &sys.layout, m).unwrap()).collect();
        prop_assert!(dims.windows(2).all(|p| p[0] <= p[1]), "{:?}", dims);
        prop_assert!(dims[2] <= basis.dim());
        prop_assert!(halfderiv::interior_dimension(&basis, &sys.layout, 4).is_err());
    }

    #[test]
    fn generic_dimensions_do_not_depend_on_q(q in generic_q(), torus in any::<bool>()) {
        let w = Window::new(3);
        let make = |q: Rational| if torus { AlgebraSpec::torus_generic(q) } else { AlgebraSpec::virasoro_generic(q) }.unwrap();
        let a = halfderiv::shift_sweep(&make(q), &w, 1, 1).unwrap();
        let b = halfderiv::shift_sweep(&make(rat(2)), &w, 1, 1).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cyclotomic_arithmetic_is_a_field(
        t in 3u32..=12,
        x in prop::collection::vec(small_rational(), 12),
        y in prop::collection::vec(small_rational(), 12),
        z in prop::collection::vec(small_rational(), 12),
        j in -30i64..=30,
        k in -30i64..=30,
    ) {
        let f = ScalarField::cyclotomic(t).unwrap();
        let deg = f.degree();
        let (a, b, c) = (scalar_in(&f, &x[..deg]), scalar_in(&f, &y[..deg]), scalar_in(&f, &z[..deg]));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
        prop_assert_eq!(&f.qpow(j) * &f.qpow(k), f.qpow(j + k));
        prop_assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
    }

    #[test]
    fn torus_families_lie_in_the_kernel(c in small_rational(), d in small_rational(), t in 3u32..=4) {
        let w = Window::new(3);
        let generic = AlgebraSpec::torus_generic(rat(2)).unwrap();
        let phi = halfderiv::torus_generic_family(Scalar::Rat(c.clone()), Scalar::Rat(d.clone()));
        let sys = halfderiv::build_constraints(&generic, &w, Degree::ZERO).unwrap();
        prop_assert!(sys.is_satisfied_by(&sys.layout.coefficients_of(&phi)));

        let root = AlgebraSpec::torus_root(t).unwrap();
        let phi = halfderiv::thm_h_family(t, Scalar::Rat(c), Scalar::Rat(d));
        let sys = halfderiv::build_constraints(&root, &w, Degree::ZERO).unwrap();
        prop_assert!(sys.is_satisfied_by(&sys.layout.coefficients_of(&phi)));
    }

    #[test]
    fn root_virasoro_family_lies_in_the_kernel(
        i1 in -1i64..=1,
        i2 in -1i64..=1,
        kappa in prop::collection::vec(small_rational(), 2),
        center in prop::collection::vec(small_rational(), 8),
    ) {
        let spec = AlgebraSpec::virasoro_root(3).unwrap();
        let w = Window::new(4);
        let i = Degree::new(3 * i1, 3 * i2);
        let central: Vec<Degree> = w.points().into_iter().filter(|m| m.divisible_by(3)).collect();
        let overrides: BTreeMap<Degree, Scalar> =
            central.iter().zip(&center).map(|(m, c)| (*m, Scalar::Rat(c.clone()))).collect();
        let phi = halfderiv::thm_f_family(
            3,
            i,
            scalar_in(spec.field(), &kappa),
            DegreeFunction { default: Scalar::zero(), overrides },
        )
        .unwrap();
        let sys = halfderiv::build_constraints(&spec, &w, i).unwrap();
        prop_assert!(sys.is_satisfied_by(&sys.layout.coefficients_of(&phi)));
    }

    #[test]
    fn rank_one_center_products_are_transposed_poisson(
        tau in prop::collection::vec(-3i64..=3, 8),
        v_index in 0usize..8,
    ) {
        let spec = AlgebraSpec::virasoro_root(3).unwrap();
        let w = Window::new(4);
        let central: Vec<Degree> = w.points().into_iter().filter(|m| m.divisible_by(3)).collect();
        let functional = CenterFunctional {
            coeffs: central.iter().zip(&tau).filter(|(_, c)| **c != 0).map(|(m, c)| (*m, Scalar::int(*c))).collect(),
        };
        let v = central[v_index];
        let p = tpa::rank_one_center_product(&spec, &w, &functional, v).unwrap();
        prop_assert!(tpa::verify_axioms(&spec, &w, &p).unwrap().passed());
        // tau(v) != 0 puts an L_v term in L_v · L_v, at offset zero
        let nilpotent = functional.at(v).is_zero();
        prop_assert_eq!(tpa::thm_g_check(&spec, &p).unwrap().passed(), nilpotent);
    }
}

#[test]
fn zero_product_passes_everywhere() {
    let w = Window::new(3);
    for spec in [
        AlgebraSpec::virasoro_generic(rat(2)).unwrap(),
        AlgebraSpec::virasoro_root(3).unwrap(),
        AlgebraSpec::torus_generic(rat_frac(3, 2)).unwrap(),
        AlgebraSpec::torus_root(4).unwrap(),
    ] {
        let rep = tpa::verify_axioms(&spec, &w, &ProductTable::zero(w)).unwrap();
        assert!(rep.passed(), "{}", spec.variant());
    }
    let spec = AlgebraSpec::virasoro_root(3).unwrap();
    assert!(tpa::thm_g_check(&spec, &ProductTable::zero(w)).unwrap().passed());
}

#[test]
fn probe_solutions_are_compatible() {
    let spec = AlgebraSpec::virasoro_root(3).unwrap();
    let w = Window::new(4);
    let r = tpa::triviality_probe(&spec, &w, 2, 3).unwrap();
    assert_eq!(r.basis.len(), r.full_dim);
    assert!(r.full_dim > 0);
    assert!(r.gamma2_entries.is_empty());
    for p in r.basis.iter().step_by((r.basis.len() / 12).max(1)) {
        let rep = tpa::verify_axioms(&spec, &w, p).unwrap();
        assert!(rep.compatibility_violations.is_empty());
    }
    for &k in &r.non_associative {
        assert!(!tpa::verify_axioms(&spec, &w, &r.basis[k]).unwrap().associativity_violations.is_empty());
    }
}

#[test]
fn idempotent_center_product_has_zero_offset() {
    let spec = AlgebraSpec::virasoro_root(3).unwrap();
    let w = Window::new(4);
    let v = Degree::new(3, 0);
    let p = tpa::rank_one_center_product(&spec, &w, &CenterFunctional::indicator(v), v).unwrap();
    assert!(tpa::verify_axioms(&spec, &w, &p).unwrap().passed());
    let g = tpa::thm_g_check(&spec, &p).unwrap();
    assert!(g.vanishing_ok && g.gamma2_ok && !g.gamma1_ok);
}

/// `k[u, w]/(u², w³)` without unit, placed on central degrees:
/// `u = L(3,0)`, `w = L(0,3)`.
fn truncated_monomial_product(w: Window) -> ProductTable {
    let mut p = ProductTable::zero(w);
    for (a, b, c) in [((3, 0), (0, 3), (3, 3)), ((0, 3), (0, 3), (0, 6)), ((3, 3), (0, 3), (3, 6)), ((3, 0), (0, 6), (3, 6))] {
        p.set(BasisElem::l(a.0, a.1), BasisElem::l(b.0, b.1), Element::basis(BasisElem::l(c.0, c.1))).unwrap();
    }
    p
}

#[test]
fn central_monomial_algebra_is_transposed_poisson_but_breaks_quadratic_sums() {
    let spec = AlgebraSpec::virasoro_root(3).unwrap();
    let w = Window::new(6);
    let p = truncated_monomial_product(w);
    let ax = tpa::verify_axioms(&spec, &w, &p).unwrap();
    assert!(ax.passed(), "{:?} {:?}", ax.associativity_violations.first(), ax.compatibility_violations.first());
    let g = tpa::thm_g_check(&spec, &p).unwrap();
    assert!(g.vanishing_ok && g.gamma2_ok);
    assert!(!g.gamma1_ok);
}
