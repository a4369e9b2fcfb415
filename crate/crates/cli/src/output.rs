//! CSV tables, plot scripts and number formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::sweep::SweepRow;
use crate::CliError;

/// Formats like C's `%.9g`: nine significant digits, trailing zeros removed,
/// exponent notation outside `[1e-4, 1e9)`.
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x))
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Header of the results table for `k` bands.
pub fn csv_header(k: usize) -> String {
    let mut cols: Vec<String> = ["epsilon", "variant", "throughput", "interference"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((0..k).map(|i| format!("pf_{i}")));
    cols.extend((0..k).map(|i| format!("pd_{i}")));
    cols.extend(
        ["converged", "iters", "solve_ms"]
            .iter()
            .map(|s| s.to_string()),
    );
    cols.join(",")
}

/// One data row. A failed solve is written with `nan` metrics.
pub fn csv_row(row: &SweepRow, k: usize) -> String {
    let mut cols = vec![fmt_g9(row.epsilon), row.variant.to_string()];
    match &row.outcome {
        Ok(r) => {
            cols.push(fmt_g9(r.true_objective));
            cols.push(fmt_g9(r.metrics.interference));
            cols.extend(r.metrics.pf.iter().map(|&v| fmt_g9(v)));
            cols.extend(r.metrics.pd.iter().map(|&v| fmt_g9(v)));
            cols.push(r.converged.to_string());
            cols.push(r.iterations.to_string());
        }
        Err(_) => {
            cols.extend(std::iter::repeat_n("nan".to_string(), 2 + 2 * k));
            cols.push("false".into());
            cols.push("0".into());
        }
    }
    cols.push(fmt_g9(row.solve_ms));
    cols.join(",")
}

pub fn write_csv(out: &mut dyn Write, rows: &[SweepRow], k: usize) -> std::io::Result<()> {
    writeln!(out, "{}", csv_header(k))?;
    for r in rows {
        writeln!(out, "{}", csv_row(r, k))?;
    }
    Ok(())
}

/// Python/matplotlib script that plots throughput against the budget, one
/// curve per variant, reading `data_file` relative to the script's folder.
pub fn plot_script(data_file: &str) -> String {
    format!(
        r#"import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
data = os.path.join(here, {data_file:?})
curves = defaultdict(list)
with open(data, newline="") as f:
    for row in csv.DictReader(f):
        curves[row["variant"]].append((float(row["epsilon"]), float(row["throughput"])))

for variant, points in curves.items():
    points.sort()
    plt.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=variant)
plt.xlabel("interference budget")
plt.ylabel("aggregate opportunistic throughput")
plt.grid(True)
plt.legend()
plt.savefig(os.path.splitext(data)[0] + ".png", dpi=150)
"#
    )
}

/// Writes the CSV to `path` and, when `plot` is set, a companion script next
/// to it with the same stem and a `.py` extension. Returns the files written.
pub fn emit_results(
    rows: &[SweepRow],
    k: usize,
    path: &Path,
    plot: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let io = |e: std::io::Error, p: &Path| CliError::Io(format!("{}: {e}", p.display()));
    let mut file = std::fs::File::create(path).map_err(|e| io(e, path))?;
    write_csv(&mut file, rows, k).map_err(|e| io(e, path))?;
    let mut written = vec![path.to_path_buf()];
    if plot {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Io(format!("{}: not a file name", path.display())))?;
        let script = path.with_extension("py");
        if script == path {
            return Err(CliError::Io(format!(
                "{}: data file must not end in .py",
                path.display()
            )));
        }
        std::fs::write(&script, plot_script(name)).map_err(|e| io(e, &script))?;
        written.push(script);
    }
    Ok(written)
}
