use std::f64::consts::PI;

use qcl_core::fields::{gen_exp_poly, PolyField, QField, Regularity};
use qcl_core::geometry::*;
use qcl_core::theorems::*;
use qcl_core::{BiQuat, Error, C64};

const Q0: [f64; 4] = [0.1, -0.2, 0.15, 0.05];

fn one() -> PolyField {
    PolyField::constant(BiQuat::ONE)
}

/// A nonconstant field of the regularity `t` requires, affine in the coordinates.
fn affine(t: TheoremId) -> PolyField {
    gen_exp_poly(&"x + 2*y*J - z*K".parse().unwrap(), t.f_regularity()).unwrap()
        + PolyField::constant(BiQuat::real(0.5, 0.0, -1.0, 0.3))
}

fn rule(t: TheoremId) -> QuadRule {
    QuadRule::new(if t.is_bi() { 24 } else { 32 })
}

fn default_run(t: TheoremId, f: &dyn QField) -> Report {
    let s = Surface::rebuild(t.default_surface(Q0)).unwrap();
    run(t, f, Q0, &s, &rule(t)).unwrap()
}

#[test]
fn every_theorem_reproduces_its_constant() {
    for t in TheoremId::ALL {
        for f in [one(), affine(t)] {
            let r = default_run(t, &f);
            assert!(r.passes(t.default_tolerance()), "{t}: {r:?}");
        }
    }
}

#[test]
fn fueter_constant_on_the_unit_sphere() {
    let s = sphere3([0.0; 4], 1.0).unwrap();
    let r = run(TheoremId::Fueter32, &one(), [0.0; 4], &s, &QuadRule::new(32)).unwrap();
    assert!((r.value.w.re - 19.7392088).abs() < 1e-6);
    assert!(r.abs_err < 1e-6);
}

#[test]
fn excluded_centre_gives_zero() {
    let s = sphere3([0.0; 4], 1.0).unwrap();
    let r = run(TheoremId::Fueter32, &one(), [3.0, 0.0, 0.0, 0.0], &s, &QuadRule::new(32)).unwrap();
    assert_eq!(r.expected, BiQuat::ZERO);
    assert!(r.abs_err < 1e-10);
}

#[test]
fn sandwich_zero_needs_an_outside_centre() {
    let s = sphere3([0.0; 4], 1.0).unwrap();
    let f = affine(TheoremId::SandwichZero33);
    assert!(matches!(run(TheoremId::SandwichZero33, &f, [0.0; 4], &s, &QuadRule::new(16)), Err(Error::Inadmissible(_))));
    let r = run(TheoremId::SandwichZero33, &f, [0.0, 1.8, 0.0, 0.0], &s, &QuadRule::new(32)).unwrap();
    assert!(r.abs_err < 1e-7);
}

#[test]
fn irregular_fields_are_rejected() {
    let s = sphere3([0.0; 4], 1.0).unwrap();
    let f: PolyField = "x*y".parse().unwrap();
    let r = run(TheoremId::Cauchy28, &f, [0.0; 4], &s, &QuadRule::new(8));
    assert!(matches!(r, Err(Error::RegularityViolation { .. })));
}

#[test]
fn surface_independence_examples() {
    let f: PolyField = "x - w*I".parse().unwrap();
    let surfaces = [
        sphere3([0.0; 4], 0.5).unwrap(),
        sphere3([0.0; 4], 1.0).unwrap(),
        hyperbox([0.0; 4], [0.8; 4]).unwrap(),
    ];
    let dev = surface_independence(TheoremId::Fueter32, &f, [0.0, 0.2, 0.0, 0.0], &surfaces, &QuadRule::new(32)).unwrap();
    assert!(dev < 1e-5, "{dev}");
    let prisms = [prism([0.0; 4], 0.5, 1.0).unwrap(), prism([0.0; 4], 1.0, 1.0).unwrap()];
    let dev = surface_independence(TheoremId::Alt48, &one(), [0.0; 4], &prisms, &QuadRule::new(32)).unwrap();
    assert!(dev < 1e-5, "{dev}");
    let g = gen_exp_poly(&"x*y + z^2*J".parse().unwrap(), Regularity::Left).unwrap();
    let mixed = [sphere3([0.0; 4], 1.0).unwrap(), hyperbox([0.0; 4], [1.0; 4]).unwrap()];
    let dev = surface_independence(TheoremId::Cauchy28, &g, [0.0; 4], &mixed, &QuadRule::new(32)).unwrap();
    assert!(dev < 2e-8);
    let mixed_enclosure = [sphere3([0.0; 4], 1.0).unwrap(), sphere3([5.0, 0.0, 0.0, 0.0], 1.0).unwrap()];
    assert!(surface_independence(TheoremId::Fueter32, &one(), [0.0; 4], &mixed_enclosure, &QuadRule::new(8)).is_err());
}

#[test]
fn right_linearity_over_constant_quaternions() {
    for t in [TheoremId::Fueter32, TheoremId::Alt48] {
        let f1 = affine(t);
        let f2 = gen_exp_poly(&"y - x*K".parse().unwrap(), Regularity::Left).unwrap();
        let (alpha, beta) = (C64::new(-1.5, 0.0), BiQuat::real(0.2, -0.7, 0.1, 0.4));
        let combo = f1.scale(alpha) + f2.right_mul(&beta);
        let r1 = default_run(t, &f1).value;
        let r2 = default_run(t, &f2).value;
        let rc = default_run(t, &combo).value;
        assert!(rc.max_abs_diff(&(r1 * alpha + r2 * beta)) < 1e-10, "{t}");
    }
}

#[test]
fn translation_covariance() {
    let d = [0.4, -0.3, 0.25, 0.6];
    let moved: [f64; 4] = std::array::from_fn(|a| Q0[a] + d[a]);
    for t in [TheoremId::Fueter32, TheoremId::Alt48, TheoremId::Fueter41, TheoremId::BiAlt71, TheoremId::BiFueter74] {
        let f = affine(t);
        let g = f.translate(d.map(|v| -v));
        let a = default_run(t, &f);
        let s = Surface::rebuild(t.default_surface(Q0).translated(d)).unwrap();
        let b = run(t, &g, moved, &s, &rule(t)).unwrap();
        assert!(a.value.max_abs_diff(&b.value) < 1e-10, "{t}: {:?} {:?}", a.value, b.value);
    }
}

#[test]
fn conjugate_pairing_by_time_reversal() {
    let q0 = [0.0, 0.1, -0.2, 0.1];
    let s = sphere3(q0, 1.0).unwrap();
    let f = gen_exp_poly(&"x*y + z*J - y^2*K".parse().unwrap(), Regularity::Conjugate).unwrap();
    let a = run(TheoremId::Fueter40, &f, q0, &s, &QuadRule::new(32)).unwrap();
    let b = run(TheoremId::Fueter32, &f.reflect_time(), q0, &s, &QuadRule::new(32)).unwrap();
    assert!(a.value.max_abs_diff(&b.value) < 1e-10);
}

#[test]
fn alt_constant_needs_affine_fields() {
    let f = gen_exp_poly(&"x*y + z".parse().unwrap(), Regularity::Left).unwrap();
    let r = default_run(TheoremId::Alt48, &f);
    assert!(r.abs_err > 1.0);
    assert!(r.notes.iter().any(|n| n.contains("not regular")));
}

#[test]
fn reflected_alt_variants_carry_the_opposite_sign() {
    let third = 2.0 * PI * PI / 3.0;
    for t in [TheoremId::Alt51, TheoremId::Alt53, TheoremId::BiAlt72] {
        let r = default_run(t, &one());
        assert!(r.value.max_abs_diff(&(BiQuat::I * -third)) < 1e-6, "{t}: {:?}", r.value);
        assert!(r.notes.iter().any(|n| n.starts_with("sign")));
    }
}

#[test]
fn prism_routes_agree() {
    let third = 2.0 * PI * PI / 3.0;
    for t in [TheoremId::BiAlt71, TheoremId::BiAlt72, TheoremId::BiFueter74] {
        for f in [one(), affine(t)] {
            let n = run_bi_narrow(t, &f, Q0, 1.0, &QuadRule::new(24)).unwrap();
            let w = run_bi_wide(t, &f, Q0, 1.0, &QuadRule::new(24)).unwrap();
            assert!(n.abs_err < 1e-6 && w.abs_err < 1e-6, "{t}: {} {}", n.abs_err, w.abs_err);
            assert!(n.value.max_abs_diff(&w.value) < 2e-6);
        }
    }
    let r = run_bi_narrow(TheoremId::BiAlt71, &one(), [0.0; 4], 1.0, &QuadRule::new(24)).unwrap();
    assert!(r.value.max_abs_diff(&(BiQuat::I * third)) < 1e-6);
    assert!(run_bi_narrow(TheoremId::Alt48, &one(), [0.0; 4], 1.0, &QuadRule::new(8)).is_err());
}

#[test]
fn bi_fueter_constant_is_resolved() {
    let r = run_bi_narrow(TheoremId::BiFueter74, &one(), [0.0; 4], 1.0, &QuadRule::new(24)).unwrap();
    let two_pi2 = 2.0 * PI * PI;
    assert!((r.value.euclid() - two_pi2).abs() < 1e-6);
    let note = r.notes.iter().find(|n| n.starts_with("constant resolution")).unwrap();
    assert!(note.ends_with("the constant is 2π²"), "{note}");
    assert!(resolve_bifueter(BiQuat::I * two_pi2).ends_with("2π²·I"));
}

#[test]
fn bi_alt_substitution_is_flagged() {
    let r = default_run(TheoremId::BiAlt72, &one());
    assert!(r.notes.iter().any(|n| n.contains("S_H♯")));
}

#[test]
fn sphere_is_capped_for_axis_kernels() {
    let s = sphere3([0.0; 4], 1.0).unwrap();
    let r = run(TheoremId::Alt49, &one(), [0.0; 4], &s, &QuadRule::new(32)).unwrap();
    assert!(matches!(r.surface, SurfaceKind::CappedSphere { .. }));
    assert!(r.abs_err < 1e-4);
}
