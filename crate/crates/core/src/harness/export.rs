use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::ExperimentConfig;
use crate::busemann::{exact_busemann_sample, prelimit_busemann_heights, BusemannSample, DirectionSet};
use crate::environments::EtaSpec;
use crate::error::{LppError, Result};
use crate::rng::RngStream;
use crate::stats::map_indices;

pub const HISTOGRAM_BINS: usize = 64;
const DEFAULT_EXPORT_REPLICAS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct ExportSummary {
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub columns: usize,
}

/// Histogram of every column over `[0, q99]` of that column, as
/// `column,bin_lo,bin_hi,count` lines. Values above the quantile are not counted.
pub fn histogram_csv(header: &[String], rows: &[Vec<f64>], bins: usize) -> String {
    let mut out = String::from("column,bin_lo,bin_hi,count\n");
    for (c, name) in header.iter().enumerate() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        values.sort_by(f64::total_cmp);
        let top = if values.is_empty() {
            0.0
        } else {
            let idx = ((0.99 * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1;
            values[idx].max(0.0)
        };
        let mut counts = vec![0usize; bins];
        if top > 0.0 {
            for &v in values.iter().filter(|v| (0.0..=top).contains(*v)) {
                let b = ((v / top) * bins as f64) as usize;
                counts[b.min(bins - 1)] += 1;
            }
        }
        let width = top / bins as f64;
        for (b, count) in counts.iter().enumerate() {
            writeln!(out, "{name},{},{},{count}", b as f64 * width, (b + 1) as f64 * width).unwrap();
        }
    }
    out
}

fn write_table(dir: &Path, stem: &str, samples: &[BusemannSample], files: &mut Vec<PathBuf>) -> Result<usize> {
    let first = samples.first().ok_or_else(|| LppError::invalid("nothing to export"))?;
    let header_line = first.csv_header();
    let mut body = format!("{header_line}\n");
    for s in samples {
        body.push_str(&s.csv_row());
        body.push('\n');
    }
    let path = dir.join(format!("{stem}.csv"));
    fs::write(&path, body)?;
    files.push(path);

    let header: Vec<String> = header_line.split(',').map(str::to_string).collect();
    let rows: Vec<Vec<f64>> = samples.iter().map(BusemannSample::flat_values).collect();
    let path = dir.join(format!("{stem}_hist.csv"));
    fs::write(&path, histogram_csv(&header, &rows, HISTOGRAM_BINS))?;
    files.push(path);
    Ok(header.len())
}

/// Write exact Busemann replicas, and prelimit replicas when heights are configured, into
/// the output directory (default `.`), each with a histogram side file.
pub fn sample_export(config: &ExperimentConfig) -> Result<ExportSummary> {
    config.validate()?;
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let k = config.k.unwrap_or(2);
    let l = config.l.unwrap_or(2);
    let r = config.directions_or(&[1.0, 4.0]);
    let n = config.replicas.unwrap_or(DEFAULT_EXPORT_REPLICAS);
    let root = RngStream::new(config.seed);

    let spec = EtaSpec::new(k, l, r.clone())?;
    let exact_rng = root.fork("export-exact");
    let exact = map_indices(n, |i| exact_busemann_sample(&spec, &exact_rng.replica(i as u64)));
    let mut files = Vec::new();
    let columns = write_table(&dir, "busemann_exact", &exact, &mut files)?;

    if let Some(heights) = &config.heights {
        let dirs = DirectionSet::new(r)?;
        let pre_rng = root.fork("export-prelimit");
        let pre = map_indices(n, |i| prelimit_busemann_heights(k, l, &dirs, heights, &pre_rng.replica(i as u64)))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for (h, height) in heights.iter().enumerate() {
            let at: Vec<BusemannSample> = pre.iter().map(|reps| reps[h].clone()).collect();
            write_table(&dir, &format!("busemann_prelimit_n{height}"), &at, &mut files)?;
        }
    }
    Ok(ExportSummary { files, rows: n, columns })
}
