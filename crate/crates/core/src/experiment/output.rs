//! CSV emission. Row order follows the record order, so identical sweeps
//! give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use super::sweep::ResultRecord;
use crate::baselines::Scheme;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "axis,value,scheme,e_total_J,feasible,a,rho,p_U_W,p_B_W,x_U,y_U,H_U,t_total_s,e_U,e_UB,e_B,e_BI,e_BS";

/// Shortest representation that parses back to the same `f64`.
fn exact(x: f64) -> String {
    format!("{x:e}")
}

/// Nine significant digits.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn non_empty(records: &[ResultRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("records", "nothing to write"));
    }
    Ok(())
}

/// Full per-record table. Infeasible rows carry `feasible=false` and empty
/// numeric cells.
pub fn csv_string(records: &[ResultRecord]) -> Result<String> {
    non_empty(records)?;
    let mut out = String::with_capacity(256 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        write!(out, "{},{},{},", r.axis, exact(r.value), r.scheme).unwrap();
        match &r.solution {
            Some(s) => {
                let (d, m) = (&s.decision, &s.metrics);
                let cells = [
                    m.e_total, d.rho, d.p_uav, d.p_bs, d.loc.x, d.loc.y, d.loc.h, m.t_total, m.e_u,
                    m.e_ub, m.e_b, m.e_bi, m.e_bs,
                ]
                .map(exact);
                write!(
                    out,
                    "{},true,{},{}",
                    cells[0],
                    d.offload.bit(),
                    cells[1..].join(",")
                )
                .unwrap();
            }
            None => out.push_str(",false,,,,,,,,,,,,,"),
        }
        out.push('\n');
    }
    Ok(out)
}

/// One row per axis value, one energy column per scheme; empty cells where
/// a scheme is infeasible.
pub fn plot_data_string(records: &[ResultRecord]) -> Result<String> {
    non_empty(records)?;
    let mut schemes: Vec<Scheme> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for r in records {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
        if values.last() != Some(&r.value) {
            values.push(r.value);
        }
    }

    let mut out = String::new();
    out.push_str(&records[0].axis);
    for s in &schemes {
        write!(out, ",{s}").unwrap();
    }
    out.push('\n');
    for v in values {
        out.push_str(&sig9(v));
        for s in &schemes {
            out.push(',');
            let hit = records
                .iter()
                .find(|r| r.value == v && r.scheme == *s)
                .and_then(|r| r.solution.as_ref());
            if let Some(sol) = hit {
                out.push_str(&sig9(sol.metrics.e_total));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    write_file(path, &csv_string(records)?)
}

pub fn emit_plot_data(records: &[ResultRecord], path: &Path) -> Result<()> {
    write_file(path, &plot_data_string(records)?)
}
