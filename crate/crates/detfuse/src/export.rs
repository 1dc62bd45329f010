//! CSV export/import (RFC-4180 via the `csv` crate).
//!
//! Floats are written in shortest-round-trip form, so re-reading a file
//! reproduces the original values exactly and re-running an experiment
//! with the same manifest reproduces the file byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{DetectionCurve, Provenance, RocPoint};
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::power::PowerAllocation;

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    rule: String,
    provenance: String,
    p_fa: f64,
    p_d: f64,
}

/// One record of a parameter-sweep output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub x: f64,
    /// Curve label for multi-level sweeps (e.g. `p=5`); empty otherwise.
    pub level: String,
    pub rule: String,
    pub provenance: String,
    pub p_fa: f64,
    pub p_d: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AllocationRow {
    sensor: usize,
    channel_gain: f64,
    snr: f64,
    tx_power: f64,
    bits: u32,
}

fn parse_provenance(s: &str) -> Result<Provenance> {
    match s {
        "analytic" => Ok(Provenance::Analytic),
        "empirical" => Ok(Provenance::Empirical),
        "empirical-model" => Ok(Provenance::EmpiricalModel),
        other => Err(Error::Config(format!("unknown provenance '{other}'"))),
    }
}

/// Write detection curves as `rule,provenance,p_fa,p_d` rows.
pub fn write_curves_csv(path: &Path, curves: &[DetectionCurve]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for curve in curves {
        for pt in &curve.points {
            w.serialize(CurveRow {
                rule: curve.rule.clone(),
                provenance: curve.provenance.as_str().to_string(),
                p_fa: pt.p_fa,
                p_d: pt.p_d,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read back curves written by [`write_curves_csv`], regrouped by
/// `(rule, provenance)` in file order.
pub fn read_curves_csv(path: &Path) -> Result<Vec<DetectionCurve>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut curves: Vec<DetectionCurve> = Vec::new();
    for row in r.deserialize() {
        let row: CurveRow = row?;
        let provenance = parse_provenance(&row.provenance)?;
        let matches = curves
            .last()
            .map(|c: &DetectionCurve| c.rule == row.rule && c.provenance == provenance)
            .unwrap_or(false);
        if !matches {
            curves.push(DetectionCurve {
                rule: row.rule.clone(),
                provenance,
                points: Vec::new(),
            });
        }
        curves.last_mut().unwrap().points.push(RocPoint {
            p_fa: row.p_fa,
            p_d: row.p_d,
        });
    }
    Ok(curves)
}

/// Write sweep rows (`axis,x,level,rule,provenance,p_fa,p_d`).
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read back sweep rows.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Per-sensor allocation report: `sensor,channel_gain,snr,tx_power,bits`.
pub fn write_allocation_csv(
    path: &Path,
    scenario: &Scenario,
    alloc: &PowerAllocation,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (i, site) in scenario.sites.iter().enumerate() {
        w.serialize(AllocationRow {
            sensor: i,
            channel_gain: site.channel_gain,
            snr: site.snr(scenario.n_samples),
            tx_power: alloc.powers[i],
            bits: alloc.bits[i],
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Raw fused-statistic dumps for external analysis:
/// `trial,hypothesis,value`.
pub fn write_statistics_csv(path: &Path, h0: &[f64], h1: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trial", "hypothesis", "value"])?;
    let mut buf = ryu_record(h0, "h0")?;
    buf.extend(ryu_record(h1, "h1")?);
    for rec in buf {
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn ryu_record(values: &[f64], label: &str) -> Result<Vec<[String; 3]>> {
    Ok(values
        .iter()
        .enumerate()
        .map(|(t, v)| [t.to_string(), label.to_string(), v.to_string()])
        .collect())
}
