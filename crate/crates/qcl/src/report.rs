//! Serialized reports. Values use the fixed layout
//! `[Re w, Im w, Re x, Im x, Re y, Im y, Re z, Im z]`; floats are written in
//! their shortest round-tripping form, so JSON and CSV carry identical bits.

use std::io::Write;

use qcl_core::theorems::Report;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;
use crate::spec::SurfaceSpec;

pub const COMPONENTS: [&str; 8] = ["re_w", "im_w", "re_x", "im_x", "re_y", "im_y", "re_z", "im_z"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub order: usize,
    pub panels: usize,
    pub azimuth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub theorem: String,
    pub route: String,
    pub field: String,
    pub q0: [f64; 4],
    pub surface: String,
    pub quad: Quad,
    pub value: [f64; 8],
    pub expected: [f64; 8],
    pub abs_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: f64,
    pub notes: Vec<String>,
}

impl Record {
    pub fn new(r: &Report, route: &str, field: &str, q0: [f64; 4], tolerance: f64, seconds: f64) -> Self {
        Self {
            theorem: r.theorem.name().to_string(),
            route: route.to_string(),
            field: field.to_string(),
            q0,
            surface: SurfaceSpec::from_kind(&r.surface).to_string(),
            quad: Quad { order: r.quad.order, panels: r.quad.panels, azimuth: r.quad.azimuth },
            value: r.value.components(),
            expected: r.expected.components(),
            abs_err: r.abs_err,
            tolerance,
            pass: r.passes(tolerance),
            seconds,
            notes: r.notes.clone(),
        }
    }

    /// The record with its timing zeroed, for comparisons across runs.
    pub fn untimed(&self) -> Self {
        Self { seconds: 0.0, ..self.clone() }
    }
}

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = ["theorem", "route", "field", "q0_w", "q0_x", "q0_y", "q0_z", "surface"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(["quad_order", "quad_panels", "quad_azimuth"].map(String::from));
    h.extend(COMPONENTS.iter().map(|c| format!("value_{c}")));
    h.extend(COMPONENTS.iter().map(|c| format!("expected_{c}")));
    h.extend(["abs_err", "tolerance", "pass", "seconds", "notes"].map(String::from));
    h
}

fn csv_row(r: &Record) -> Vec<String> {
    let mut row = vec![r.theorem.clone(), r.route.clone(), r.field.clone()];
    row.extend(r.q0.iter().map(|v| v.to_string()));
    row.push(r.surface.clone());
    row.extend([r.quad.order, r.quad.panels, r.quad.azimuth].map(|v| v.to_string()));
    row.extend(r.value.iter().map(|v| v.to_string()));
    row.extend(r.expected.iter().map(|v| v.to_string()));
    row.extend([r.abs_err.to_string(), r.tolerance.to_string(), r.pass.to_string(), r.seconds.to_string()]);
    row.push(r.notes.join(" | "));
    row
}

/// Write records as JSON lines or as one CSV table with a header.
pub fn write_records(out: &mut dyn Write, records: &[Record], format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(csv_header())?;
            for r in records {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Read back the value and expected components of every CSV row.
pub fn read_csv_values(text: &str) -> Result<Vec<([f64; 8], [f64; 8])>, CliError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers()?.clone();
    let col = |name: String| {
        header.iter().position(|h| h == name).ok_or_else(|| CliError::usage(format!("missing column {name}")))
    };
    let vcols: Vec<usize> = COMPONENTS.iter().map(|c| col(format!("value_{c}"))).collect::<Result<_, _>>()?;
    let ecols: Vec<usize> = COMPONENTS.iter().map(|c| col(format!("expected_{c}"))).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let get = |cols: &[usize]| -> Result<[f64; 8], CliError> {
            let mut a = [0.0; 8];
            for (k, &c) in cols.iter().enumerate() {
                a[k] = rec[c].parse().map_err(|_| CliError::usage(format!("bad number `{}`", &rec[c])))?;
            }
            Ok(a)
        };
        out.push((get(&vcols)?, get(&ecols)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Record {
        Record {
            theorem: "fueter32".into(),
            route: "surface".into(),
            field: "const:1".into(),
            q0: [0.0; 4],
            surface: "sphere:r=1@0,0,0,0".into(),
            quad: Quad { order: 32, panels: 1, azimuth: 0 },
            value: [19.739208802178716, -0.0, 1e-300, 0.1 + 0.2, -3.3e-17, 5e-324, 2.0f64.sqrt(), 1e22],
            expected: [19.739208802178716, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            abs_err: 1e22,
            tolerance: 1e-6,
            pass: false,
            seconds: 0.25,
            notes: vec!["a, \"quoted\" note".into()],
        }
    }

    #[test]
    fn csv_and_json_agree_bit_for_bit() {
        let r = sample();
        let mut json = Vec::new();
        write_records(&mut json, &[r.clone()], Format::Json).unwrap();
        let back: Record = serde_json::from_slice(&json).unwrap();
        let mut csv = Vec::new();
        write_records(&mut csv, &[r.clone()], Format::Csv).unwrap();
        let rows = read_csv_values(std::str::from_utf8(&csv).unwrap()).unwrap();
        for k in 0..8 {
            assert_eq!(back.value[k].to_bits(), r.value[k].to_bits());
            assert_eq!(rows[0].0[k].to_bits(), r.value[k].to_bits());
            assert_eq!(rows[0].1[k].to_bits(), r.expected[k].to_bits());
        }
        assert_eq!(back, r);
    }

    #[test]
    fn header_matches_rows() {
        assert_eq!(csv_header().len(), csv_row(&sample()).len());
    }
}
