use proptest::prelude::*;
use qcl_core::fields::{kernel_series_oracle, Kernel, KernelKind, QField, Regularity};
use qcl_core::operators::{laplace4, regularity_residual, wave_op, FdScheme};
use qcl_core::{BiQuat, Point};

const QUAT_KERNELS: [KernelKind; 6] = [
    KernelKind::FueterH,
    KernelKind::FueterHSharp,
    KernelKind::AltAxis(1),
    KernelKind::AltAxis(2),
    KernelKind::AltAxis(3),
    KernelKind::ZeroRadial,
];

const BI_KERNELS: [KernelKind; 4] =
    [KernelKind::BiAltAxis(1), KernelKind::BiAltAxis(2), KernelKind::BiAltAxis(3), KernelKind::BiFueter];

fn coord() -> impl Strategy<Value = f64> {
    -1.5f64..1.5
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    [coord(), coord(), coord(), coord()]
}

/// Keep sample points well clear of every singular locus; the fourth-order
/// stencil error grows like the eighth inverse power of the distance.
fn admissible(k: &Kernel, p: [f64; 4]) -> bool {
    k.locus().clearance(&Point::from_real(p)) > 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn quaternion_kernels_are_regular(p in point(), off in point()) {
        for kind in QUAT_KERNELS {
            for reflected in [false, true] {
                let mut k = Kernel::new(kind, off);
                if reflected { k = k.reflected(); }
                prop_assume!(admissible(&k, p));
                let x = Point::from_real(p);
                let r = regularity_residual(&k, &x, k.regularity(), &FdScheme::default()).unwrap();
                prop_assert!(r < 1e-6, "{kind:?} reflected={reflected} at {p:?}: {r}");
                let lap = laplace4(&k, &x, &FdScheme::default()).unwrap().euclid();
                prop_assert!(lap < 1e-4, "{kind:?} laplacian {lap}");
            }
        }
    }

    #[test]
    fn fueter_kernels_are_right_regular_too(p in point()) {
        let x = Point::from_real(p);
        let h = Kernel::new(KernelKind::FueterH, [0.0; 4]);
        prop_assume!(admissible(&h, p));
        prop_assert!(regularity_residual(&h, &x, Regularity::Right, &FdScheme::default()).unwrap() < 1e-6);
        let hs = Kernel::new(KernelKind::FueterHSharp, [0.0; 4]);
        prop_assert!(regularity_residual(&hs, &x, Regularity::RightConjugate, &FdScheme::default()).unwrap() < 1e-6);
        let bf = Kernel::new(KernelKind::BiFueter, [0.0; 4]);
        prop_assume!(admissible(&bf, p));
        prop_assert!(regularity_residual(&bf, &x, Regularity::BiRight, &FdScheme::default()).unwrap() < 1e-6);
    }

    #[test]
    fn bi_kernels_are_biregular_and_solve_the_wave_equation(p in point(), off in point()) {
        for kind in BI_KERNELS {
            for reflected in [false, true] {
                let mut k = Kernel::new(kind, off);
                if reflected { k = k.reflected(); }
                prop_assume!(admissible(&k, p));
                let x = Point::from_real(p);
                let r = regularity_residual(&k, &x, k.regularity(), &FdScheme::default()).unwrap();
                prop_assert!(r < 1e-6, "{kind:?} at {p:?}: {r}");
                let w = wave_op(&k, &x, &FdScheme::default()).unwrap().euclid();
                prop_assert!(w < 1e-4, "{kind:?} wave {w}");
            }
        }
    }

    #[test]
    fn closed_forms_match_the_series(p in point(), frac in -0.1f64..0.1) {
        let s = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        prop_assume!(s > 0.3);
        let x = Point::real(frac * s, p[1], p[2], p[3]);
        for kind in QUAT_KERNELS.into_iter().chain(BI_KERNELS) {
            let k = Kernel::new(kind, [0.0; 4]);
            let exact = k.eval(&x).unwrap();
            let series = kernel_series_oracle(&k, &x, 12).unwrap();
            let scale = exact.max_abs().max(1.0);
            prop_assert!(exact.max_abs_diff(&series) < 1e-10 * scale, "{kind:?} {exact:?} {series:?}");
        }
    }
}

#[test]
fn series_examples() {
    let k = Kernel::new(KernelKind::AltAxis(1), [0.0; 4]);
    let p = Point::real(0.05, 1.0, 0.2, -0.1);
    let d = k.eval(&p).unwrap().max_abs_diff(&kernel_series_oracle(&k, &p, 8).unwrap());
    assert!(d < 1e-8, "{d}");
    let h = Kernel::new(KernelKind::FueterH, [0.0; 4]);
    let p = Point::real(0.05, 1.0, 0.0, 0.0);
    let d = h.eval(&p).unwrap().max_abs_diff(&kernel_series_oracle(&h, &p, 8).unwrap());
    assert!(d < 1e-8, "{d}");
}

#[test]
fn alt_kernel_is_accurate_across_the_time_axis() {
    // The closed form stays accurate near w = 0 where the textbook arrangement cancels.
    let k = Kernel::new(KernelKind::AltAxis(1), [0.0; 4]);
    for w in [1e-9, 1e-6, 1e-4, 1e-3, 5e-3, 1e-2, 2e-2] {
        let p = Point::real(w, 0.9, -0.3, 0.4);
        let exact = k.eval(&p).unwrap();
        let series = kernel_series_oracle(&k, &p, 12).unwrap();
        let rel = exact.max_abs_diff(&series) / exact.max_abs();
        assert!(rel < 1e-10, "w={w}: {rel}");
    }
}

#[test]
fn bi_fueter_fd_example() {
    let k = Kernel::new(KernelKind::BiFueter, [0.0; 4]);
    let r = regularity_residual(&k, &Point::real(0.3, 1.0, 0.0, 0.0), Regularity::Bi, &FdScheme::default()).unwrap();
    assert!(r < 1e-6);
    let w = wave_op(&Kernel::new(KernelKind::BiAltAxis(1), [0.0; 4]), &Point::real(0.2, 1.0, 0.3, 0.0), &FdScheme::default())
        .unwrap()
        .euclid();
    assert!(w < 1e-4);
}

#[test]
fn step_halving_matches_scheme_order() {
    let k = Kernel::new(KernelKind::AltAxis(2), [0.0; 4]);
    let p = Point::real(0.4, 0.5, 0.7, -0.6);
    for order in [2u8, 4] {
        let res = |h: f64| {
            regularity_residual(&k, &p, Regularity::Left, &FdScheme::new(order, h).unwrap()).unwrap()
        };
        let h = if order == 2 { 0.02 } else { 0.05 };
        let ratio = (res(h) / res(h / 2.0)).log2();
        assert!((ratio - order as f64).abs() < 0.5, "order {order}: {ratio}");
    }
    let _ = BiQuat::ZERO;
}
