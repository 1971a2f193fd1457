use std::time::Instant;

use qcl_core::contour::{self, residue_analytic, residue_numerical, AtanhBranch, BranchState, ContourRule, PolePolicy, Poly, Rational};
use qcl_core::fields::{Kernel, KernelKind, QField};
use qcl_core::geometry::QuadRule;
use qcl_core::theorems::{self, TheoremId};
use qcl_core::{BiQuat, Point, C64};
use serde::{Deserialize, Serialize};

use crate::config::{default_order, Format, RunConfig};
use crate::error::{CliError, EXIT_PASS, EXIT_TOLERANCE};
use crate::par;
use crate::report::Record;
use crate::spec::{FieldSpec, Route, Shape, SurfaceSpec};

/// One fully specified theorem evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub theorem: TheoremId,
    pub field: FieldSpec,
    pub q0: [f64; 4],
    pub surface: SurfaceSpec,
    pub order: usize,
    pub panels: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Job {
    pub fn from_config(cfg: &RunConfig, order: Option<usize>) -> Result<Self, CliError> {
        cfg.validate()?;
        let t = cfg.theorem()?;
        Ok(Self {
            theorem: t,
            field: cfg.f.clone(),
            q0: cfg.q0,
            surface: cfg.surface(t),
            order: order.or(cfg.orders.first().copied()).unwrap_or_else(|| default_order(t)),
            panels: cfg.panels,
            tol: cfg.tolerance(t),
            seed: cfg.seed,
        })
    }

    pub fn run(&self) -> Result<Record, CliError> {
        let start = Instant::now();
        let (f, field_text) = self.field.build(Some(self.theorem), self.seed)?;
        let rule = QuadRule { panels: self.panels, ..QuadRule::new(self.order) };
        let route = self.surface.route(self.q0)?;
        let report = match &route {
            Route::Surface(s) => theorems::run(self.theorem, f.as_ref(), self.q0, s, &rule)?,
            Route::Narrow { rho } => theorems::run_bi_narrow(self.theorem, f.as_ref(), self.q0, *rho, &rule)?,
            Route::Wide { t1 } => theorems::run_bi_wide(self.theorem, f.as_ref(), self.q0, *t1, &rule)?,
        };
        let seconds = start.elapsed().as_secs_f64();
        Ok(Record::new(&report, route.name(), &field_text, self.q0, self.tol, seconds))
    }
}

pub fn exit_code(records: &[Record]) -> i32 {
    if records.iter().all(|r| r.pass) {
        EXIT_PASS
    } else {
        EXIT_TOLERANCE
    }
}

pub fn verify(cfg: &RunConfig) -> Result<Vec<Record>, CliError> {
    Ok(vec![Job::from_config(cfg, None)?.run()?])
}

/// Rows of a quadrature-order sweep, one per order, in the order given.
pub fn convergence(cfg: &RunConfig) -> Result<Vec<Record>, CliError> {
    if cfg.orders.len() < 2 {
        return Err(CliError::usage("convergence needs at least two orders"));
    }
    let jobs: Vec<Job> = cfg.orders.iter().map(|&o| Job::from_config(cfg, Some(o))).collect::<Result<_, _>>()?;
    par::map(&jobs, Job::run).into_iter().collect()
}

/// Check that errors fall with every step until they reach roundoff level,
/// and stay there.
pub fn convergence_is_monotone(rows: &[Record]) -> bool {
    let floor = |r: &Record| 1e-11 * r.expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    rows.windows(2).all(|w| {
        let f = floor(&w[1]);
        if w[0].abs_err > f {
            w[1].abs_err < w[0].abs_err
        } else {
            w[1].abs_err <= f
        }
    })
}

/// The reproduction table: every theorem with `f = 1` and with a seeded
/// random affine field, plus the narrow and wide routes for the bi kernels.
pub fn table_jobs(cfg: &RunConfig) -> Result<Vec<Job>, CliError> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for (k, t) in TheoremId::ALL.into_iter().enumerate() {
        let base = Job {
            theorem: t,
            field: FieldSpec::default(),
            q0: cfg.q0,
            surface: SurfaceSpec::from_kind(&t.default_surface(cfg.q0)),
            order: cfg.orders.first().copied().unwrap_or_else(|| default_order(t)),
            panels: cfg.panels,
            tol: cfg.tolerance(t),
            seed: cfg.seed.wrapping_add(k as u64),
        };
        jobs.push(base.clone());
        jobs.push(Job { field: FieldSpec::Random { degree: 1 }, ..base.clone() });
        if matches!(t, TheoremId::BiAlt71 | TheoremId::BiAlt72 | TheoremId::BiFueter74) {
            jobs.push(Job { surface: SurfaceSpec::centred(Shape::Narrow { rho: 1.0 }), ..base.clone() });
            jobs.push(Job { surface: SurfaceSpec::centred(Shape::Wide { t1: 1.0 }), ..base });
        }
    }
    Ok(jobs)
}

pub fn table(cfg: &RunConfig) -> Result<Vec<Record>, CliError> {
    let jobs = table_jobs(cfg)?;
    par::map(&jobs, Job::run).into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub kernel: String,
    pub reflected: bool,
    pub offset: [f64; 4],
    /// Complex coordinates `[Re w, Im w, …]` of the evaluation point.
    pub point: [f64; 8],
    pub value: [f64; 8],
}

pub fn kernel_eval(kind: KernelKind, reflected: bool, offset: [f64; 4], at: [f64; 4], at_im: [f64; 4]) -> Result<KernelValue, CliError> {
    let mut k = Kernel::new(kind, offset);
    if reflected {
        k = k.reflected();
    }
    let p = Point([0, 1, 2, 3].map(|a| C64::new(at[a], at_im[a])));
    let v = k.eval(&p)?;
    let point = BiQuat::from_coords(p.0).components();
    Ok(KernelValue { kernel: kind.name().into(), reflected, offset, point, value: v.components() })
}

pub fn write_kernel_value(out: &mut dyn std::io::Write, v: &KernelValue, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, v)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut h = vec!["kernel".to_string(), "reflected".into()];
            h.extend(["w", "x", "y", "z"].map(|c| format!("offset_{c}")));
            h.extend(crate::report::COMPONENTS.map(|c| format!("point_{c}")));
            h.extend(crate::report::COMPONENTS.map(|c| format!("value_{c}")));
            w.write_record(h)?;
            let mut row = vec![v.kernel.clone(), v.reflected.to_string()];
            row.extend(v.offset.iter().map(|x| x.to_string()));
            row.extend(v.point.iter().map(|x| x.to_string()));
            row.extend(v.value.iter().map(|x| x.to_string()));
            w.write_record(row)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueRow {
    pub label: String,
    pub pole: [f64; 2],
    pub order: u32,
    /// Derivative-formula residue, or `2πi` times it for contour rows.
    pub analytic: [f64; 2],
    /// Small-circle residue, or the detoured real-line integral for contour rows.
    pub numerical: [f64; 2],
    pub expected: Option<[f64; 2]>,
    pub abs_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

const RESIDUE_TOL: f64 = 1e-8;
const ANALYTIC_TOL: f64 = 1e-12;

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn residue_row(label: &str, f: &Rational, pole: C64, order: u32, expected: Option<C64>) -> Result<ResidueRow, CliError> {
    let analytic = residue_analytic(f, pole, order)?;
    let numerical = residue_numerical(f, pole, 0.05, 256);
    let mut err = (analytic - numerical).norm();
    let mut pass = err <= RESIDUE_TOL * numerical.norm().max(1.0);
    if let Some(e) = expected {
        pass &= (analytic - e).norm() <= ANALYTIC_TOL;
        err = err.max((analytic - e).norm());
    }
    Ok(ResidueRow {
        label: label.into(),
        pole: pair(pole),
        order,
        analytic: pair(analytic),
        numerical: pair(numerical),
        expected: expected.map(pair),
        abs_err: err,
        tolerance: RESIDUE_TOL,
        pass,
    })
}

/// The residues behind the bi constants and the contour value they feed.
pub fn residue_self_test() -> Result<Vec<ResidueRow>, CliError> {
    let one = C64::new(1.0, 0.0);
    let mut rows = vec![
        residue_row("1/(z^2-1)^2 at +1", &Rational::inv_sq_minus_one_sq(), one, 2, Some(C64::new(-0.25, 0.0)))?,
        residue_row("1/(z^2-1) at -1", &Rational::inv_sq_minus_one(), -one, 1, Some(C64::new(-0.5, 0.0)))?,
        residue_row("(5z^2-3)/(z^2-1)^2 at -1", &Rational::wide_cap_rational(), -one, 2, Some(C64::new(-2.0, 0.0)))?,
    ];
    let f = Rational::inv_sq_minus_one_sq();
    let c = contour::real_line_contour(&[(-1.0, PolePolicy::Exclude), (1.0, PolePolicy::Include)], 0.25)?;
    let value: C64 = contour::contour_integrate(
        |z, _: &mut BranchState| Ok(f.eval(z)),
        &c,
        &ContourRule::default(),
        AtanhBranch::DEFAULT,
    )?;
    let analytic = residue_analytic(&f, one, 2)? * C64::new(0.0, 2.0 * std::f64::consts::PI);
    let expected = C64::new(0.0, -0.5 * std::f64::consts::PI);
    let err = (value - expected).norm().max((analytic - expected).norm());
    rows.push(ResidueRow {
        label: "real-line contour of 1/(z^2-1)^2, +1 included".into(),
        pole: pair(one),
        order: 2,
        analytic: pair(analytic),
        numerical: pair(value),
        expected: Some(pair(expected)),
        abs_err: err,
        tolerance: RESIDUE_TOL,
        pass: err <= RESIDUE_TOL,
    });
    Ok(rows)
}

/// Parse ascending real coefficients `c0,c1,…`.
pub fn parse_poly(s: &str) -> Result<Poly, CliError> {
    let c: Vec<f64> = s.split(',').map(crate::spec::parse_f64).collect::<Result<_, _>>()?;
    if c.iter().all(|v| *v == 0.0) {
        return Err(CliError::usage(format!("polynomial `{s}` is zero")));
    }
    Ok(Poly::real(&c))
}

pub fn write_residue_rows(out: &mut dyn std::io::Write, rows: &[ResidueRow], format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            for r in rows {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "label", "pole_re", "pole_im", "order", "analytic_re", "analytic_im", "numerical_re", "numerical_im",
                "expected_re", "expected_im", "abs_err", "tolerance", "pass",
            ])?;
            for r in rows {
                let e = r.expected.map(|e| [e[0].to_string(), e[1].to_string()]).unwrap_or_default();
                w.write_record([
                    r.label.clone(),
                    r.pole[0].to_string(),
                    r.pole[1].to_string(),
                    r.order.to_string(),
                    r.analytic[0].to_string(),
                    r.analytic[1].to_string(),
                    r.numerical[0].to_string(),
                    r.numerical[1].to_string(),
                    e[0].clone(),
                    e[1].clone(),
                    r.abs_err.to_string(),
                    r.tolerance.to_string(),
                    r.pass.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_test_residues() {
        let rows = residue_self_test().unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn order_mismatch_fails_the_row() {
        // a simple pole treated as double
        let r = residue_row("bad", &Rational::inv_sq_minus_one(), C64::new(1.0, 0.0), 2, None).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn monotone_check() {
        let mk = |e: f64| {
            let mut r: Record = serde_json::from_str(
                r#"{"theorem":"t","route":"surface","field":"const:1","q0":[0,0,0,0],"surface":"s",
                "quad":{"order":8,"panels":1,"azimuth":0},"value":[0,0,0,0,0,0,0,0],
                "expected":[1,0,0,0,0,0,0,0],"abs_err":0,"tolerance":1,"pass":true,"seconds":0,"notes":[]}"#,
            )
            .unwrap();
            r.abs_err = e;
            r
        };
        assert!(convergence_is_monotone(&[mk(1e-2), mk(1e-5), mk(1e-13), mk(2e-13)]));
        assert!(!convergence_is_monotone(&[mk(1e-2), mk(1e-1)]));
        assert!(!convergence_is_monotone(&[mk(1e-13), mk(1e-6)]));
    }
}
