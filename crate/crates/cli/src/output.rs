//! CSV and gnuplot emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pwshift_core::{CrossSectionCurve, PhaseShiftTable};

use crate::error::CliError;

/// Twelve significant digits in scientific notation.
pub fn number(x: f64) -> String {
    // Avoid a "-0" that would make equal runs look different.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn shifts_csv(table: &PhaseShiftTable) -> String {
    let with_exact = table.records.iter().all(|r| r.exact.is_some());
    let mut out = String::from("l,delta1,delta2,total,sigma_l");
    if with_exact {
        out.push_str(",exact_nuclear");
    }
    out.push('\n');
    for r in &table.records {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            r.l,
            number(r.delta1),
            number(r.delta2),
            number(r.total),
            number(r.sigma)
        );
        if let (true, Some(e)) = (with_exact, r.exact) {
            let _ = write!(out, ",{}", number(e));
        }
        out.push('\n');
    }
    out
}

pub fn curve_csv(curve: &CrossSectionCurve) -> String {
    let mut out = String::from("theta_rad,dsigma_barn\n");
    for (t, v) in curve.theta.iter().zip(&curve.dsigma_barn) {
        let _ = writeln!(out, "{},{}", number(*t), number(*v));
    }
    out
}

pub fn gnuplot_script(csv_names: &[String], title: &str) -> String {
    let mut out = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset logscale y\n\
         set xlabel 'theta [rad]'\nset ylabel 'dsigma/dOmega [b/sr]'\nset title '{title}'\nplot "
    );
    let plots: Vec<String> = csv_names
        .iter()
        .map(|n| format!("'{n}' using 1:2 with lines title '{}'", n.trim_end_matches(".csv")))
        .collect();
    out.push_str(&plots.join(", \\\n     "));
    out.push('\n');
    out
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
