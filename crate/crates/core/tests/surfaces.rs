use std::f64::consts::PI;

use proptest::prelude::*;
use qcl_core::contour::AtanhBranch;
use qcl_core::fields::{gen_exp_poly, Kernel, KernelKind, PolyField, QField, Regularity};
use qcl_core::geometry::*;
use qcl_core::{BiQuat, Error};

fn coeff() -> impl Strategy<Value = BiQuat> {
    [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0].prop_map(|v| BiQuat::real(v[0], v[1], v[2], v[3]))
}

/// Spatial generator of degree ≤ 3, so the regular field has degree ≤ 3 too.
fn generator() -> impl Strategy<Value = PolyField> {
    prop::collection::vec(([0u32..2, 0u32..2, 0u32..2], coeff()), 1..5).prop_map(|terms| {
        let mut p = PolyField::zero();
        for ([a, b, c], q) in terms {
            p.add_term([0, a, b, c], q);
        }
        p
    })
}

fn sides(v: Regularity) -> FormKind {
    if v.is_bi() {
        return if v.is_conjugate() { FormKind::SHSharp } else { FormKind::SH };
    }
    if v.is_conjugate() { FormKind::SqSharp } else { FormKind::Sq }
}

fn closed_integral(f: &PolyField, v: Regularity, s: &Surface) -> BiQuat {
    let rule = QuadRule::new(16);
    let field: &dyn QField = f;
    if v.is_right() {
        integrate_sandwich(Some(field), sides(v), None, s, &rule).unwrap()
    } else {
        integrate_sandwich(None, sides(v), Some(field), s, &rule).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn regular_fields_integrate_to_zero(g in generator()) {
        let sphere = sphere3([0.1, 0.0, -0.2, 0.3], 1.2).unwrap();
        let bx = hyperbox([0.0; 4], [1.0, 0.8, 1.1, 0.9]).unwrap();
        for v in Regularity::ALL {
            let f = gen_exp_poly(&g, v).unwrap();
            for s in [&sphere, &bx] {
                if v.is_bi() && s.kind == sphere.kind {
                    continue;
                }
                let val = closed_integral(&f, v, s);
                prop_assert!(val.max_abs() < 1e-10, "{v:?} on {:?}: {val:?}", s.kind);
            }
        }
    }

    #[test]
    fn sandwich_needs_right_then_left(g in generator(), h in generator()) {
        let left = gen_exp_poly(&g, Regularity::Right).unwrap();
        let right = gen_exp_poly(&h, Regularity::Left).unwrap();
        let s = sphere3([0.0; 4], 1.0).unwrap();
        let rule = QuadRule::new(16);
        let v = integrate_sandwich(Some(&left), FormKind::Sq, Some(&right), &s, &rule).unwrap();
        prop_assert!(v.max_abs() < 1e-10, "{v:?}");
    }
}

#[test]
fn swapping_the_sandwich_breaks_closedness() {
    let left = gen_exp_poly(&"x*y + z*I".parse().unwrap(), Regularity::Right).unwrap();
    let right = gen_exp_poly(&"x^2*J + y".parse().unwrap(), Regularity::Left).unwrap();
    let s = sphere3([0.2, 0.1, -0.3, 0.4], 1.0).unwrap();
    let rule = QuadRule::new(16);
    let good = integrate_sandwich(Some(&left), FormKind::Sq, Some(&right), &s, &rule).unwrap();
    let bad = integrate_sandwich(Some(&right), FormKind::Sq, Some(&left), &s, &rule).unwrap();
    assert!(good.max_abs() < 1e-10);
    assert!(bad.max_abs() > 1e-2, "{bad:?}");
}

#[test]
fn off_centre_fueter_converges() {
    let two_pi2 = 2.0 * PI * PI;
    let h = Kernel::new(KernelKind::FueterH, [0.3, 0.2, 0.0, 0.1]);
    let s = sphere3([0.0; 4], 1.0).unwrap();
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let v = integrate_sandwich(Some(&h), FormKind::Sq, None, &s, &QuadRule::new(n)).unwrap();
            (v - BiQuat::real(two_pi2, 0.0, 0.0, 0.0)).max_abs()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-10);
}

#[test]
fn azimuthal_integration_cancels() {
    let rule = QuadRule::new(24);
    let cs = capped_sphere([0.0; 4], 1.0, CAP_DELTA).unwrap();
    let z = Kernel::new(KernelKind::ZeroRadial, [0.0; 4]);
    assert!(integrate_sandwich(None, FormKind::Sq, Some(&z), &cs, &rule).unwrap().max_abs() < 1e-6);
    let pr = prism([0.0; 4], 1.0, 1.0).unwrap();
    assert!(integrate_sandwich(None, FormKind::Sq, Some(&z), &pr, &rule).unwrap().max_abs() < 1e-6);
    // only the I slot survives for the x-axis kernel
    let a = Kernel::new(KernelKind::AltAxis(1), [0.0; 4]);
    let v = integrate_sandwich(None, FormKind::Sq, Some(&a), &pr, &rule).unwrap();
    let c = v.components();
    assert!((c[2] - 2.0 * PI * PI / 3.0).abs() < 1e-10);
    assert!(c.iter().enumerate().all(|(i, x)| i == 2 || x.abs() < 1e-12), "{c:?}");
}

#[test]
fn areas() {
    let rule = QuadRule::new(16);
    let s = sphere3([1.0, 0.0, 0.0, 0.0], 0.5).unwrap();
    assert!((s.area(&rule) - 2.0 * PI * PI * 0.125).abs() < 1e-12);
    let b = hyperbox([0.0; 4], [1.0, 0.5, 1.0, 1.0]).unwrap();
    // eight faces: 2·Σ_a Π_{b≠a} 2h_b
    assert!((b.area(&rule) - 2.0 * (4.0 + 8.0 + 4.0 + 4.0)).abs() < 1e-12);
    let p = prism([0.0; 4], 1.0, 1.0).unwrap();
    assert!((p.area(&rule) - (4.0 * PI * 2.0 + 2.0 * 4.0 * PI / 3.0)).abs() < 1e-10);
}

#[test]
fn admissibility() {
    let rule = QuadRule::new(8);
    let a = Kernel::new(KernelKind::AltAxis(1), [0.0; 4]);
    let sphere = sphere3([0.0; 4], 1.0).unwrap();
    assert!(matches!(integrate_sandwich(None, FormKind::Sq, Some(&a), &sphere, &rule), Err(Error::Inadmissible(_))));
    let shifted = prism([0.0, 0.1, 0.0, 0.0], 1.0, 1.0).unwrap();
    assert!(matches!(integrate_sandwich(None, FormKind::Sq, Some(&a), &shifted, &rule), Err(Error::Inadmissible(_))));
    let b = Kernel::new(KernelKind::BiFueter, [0.0; 4]);
    let plain = prism([0.0; 4], 1.0, 2.0).unwrap();
    assert!(matches!(integrate_sandwich(Some(&b), FormKind::SH, None, &plain, &rule), Err(Error::Inadmissible(_))));
    let h = Kernel::new(KernelKind::FueterH, [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(integrate_sandwich(Some(&h), FormKind::Sq, None, &sphere, &rule), Err(Error::SingularityOnSurface));
    assert!(QuadRule { order: 0, panels: 1, azimuth: 0 }.validate().is_err());
}

#[test]
fn detour_radius_does_not_matter() {
    let rule = QuadRule::new(24);
    let b = Kernel::new(KernelKind::BiAltAxis(2), [0.0; 4]);
    let vals: Vec<BiQuat> = [0.1, 0.2, 0.35]
        .iter()
        .map(|&eps| {
            let s = deformed_prism([0.0; 4], 1.0, 2.0, eps, AtanhBranch::DEFAULT).unwrap();
            integrate_sandwich(None, FormKind::SH, Some(&b), &s, &rule).unwrap()
        })
        .collect();
    assert!(vals[0].max_abs_diff(&vals[1]) < 1e-9 && vals[1].max_abs_diff(&vals[2]) < 1e-9, "{vals:?}");
    assert!(vals[0].max_abs_diff(&(BiQuat::J * (2.0 * PI * PI / 3.0))) < 1e-9);
}
