use std::f64::consts::PI;
use std::fs::File;
use std::io::Write;

use fbx_core::corpus::{read_records_csv, summarize};
use fbx_core::filterbanks::shipped_prototype;
use fbx_core::window_design::{dtft_magnitude, hamming_window, read_window, sine_window};
use fbx_core::FrequencyGrid;

use super::output;
use crate::config::{BoxplotArgs, PlotKind, PlotdataArgs, ResponseArgs};
use crate::{CliError, CliResult};

/// Floor for zeros of the response, in dB.
const DB_FLOOR: f64 = -400.0;

pub fn run(args: &PlotdataArgs) -> CliResult<()> {
    match &args.plot {
        PlotKind::Response(a) => response(a),
        PlotKind::Boxplot(a) => boxplot(a),
    }
}

fn response(args: &ResponseArgs) -> CliResult<()> {
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut subbands = 0;
    if args.window.is_empty() {
        let (w, _) = shipped_prototype()?;
        subbands = w.num_subbands();
        columns.push(("pqmf".into(), w.coefficients().to_vec()));
    }
    for path in &args.window {
        let (w, _) = read_window(path)?;
        subbands = w.num_subbands();
        let name = path
            .file_stem()
            .map_or_else(|| "window".into(), |s| s.to_string_lossy().into_owned());
        columns.push((name, w.coefficients().to_vec()));
    }
    let len = columns[0].1.len();
    if columns.iter().any(|(_, c)| c.len() != len) {
        return Err(CliError::Usage("all windows must have the same length".into()));
    }
    columns.push(("hamming".into(), hamming_window(len)?));
    columns.push(("sine".into(), sine_window(len)?));

    let grid = FrequencyGrid::linear(subbands, args.max_omega.unwrap_or(PI), args.points)?;
    let curves = columns
        .iter()
        .map(|(_, coeffs)| {
            let dc: f64 = coeffs.iter().sum::<f64>().abs();
            let mags = dtft_magnitude(coeffs, &grid)?;
            Ok(mags
                .into_iter()
                .map(|m| {
                    if m > 0.0 && dc > 0.0 {
                        (20.0 * (m / dc).log10()).max(DB_FLOOR)
                    } else {
                        DB_FLOOR
                    }
                })
                .collect::<Vec<f64>>())
        })
        .collect::<fbx_core::Result<Vec<_>>>()?;

    let mut out = output(args.out.as_deref())?;
    let names: Vec<String> = columns.iter().map(|(n, _)| format!("{n}_db")).collect();
    writeln!(out, "omega\t{}", names.join("\t"))?;
    for (i, w) in grid.omegas().iter().enumerate() {
        write!(out, "{w:.9}")?;
        for c in &curves {
            write!(out, "\t{:.6}", c[i])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn boxplot(args: &BoxplotArgs) -> CliResult<()> {
    let file = File::open(&args.metrics)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", args.metrics.display())))?;
    let records = read_records_csv(file)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.metrics.display())))?;
    if records.is_empty() {
        return Err(CliError::Runtime(format!("{} holds no records", args.metrics.display())));
    }
    let report = summarize(&records)?;
    let mut out = output(args.out.as_deref())?;
    writeln!(
        out,
        "metric\ttransform\tsource\tn\tmean\tq1\tmedian\tq3\tlower_whisker\tupper_whisker\toutliers"
    )?;
    for (metric, by_transform) in &report {
        for (transform, by_source) in by_transform {
            for (source, b) in by_source {
                let outliers: Vec<String> = b.outliers.iter().map(|v| v.to_string()).collect();
                writeln!(
                    out,
                    "{metric}\t{transform}\t{source}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    b.n,
                    b.mean,
                    b.q1,
                    b.median,
                    b.q3,
                    b.lower_whisker,
                    b.upper_whisker,
                    outliers.join(";")
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
