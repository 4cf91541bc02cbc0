//! Report emission: CSV, a JSON mirror, and an SVG chart of success CDFs
//! with min/max bands. Output bytes are a pure function of the results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::{success_cdf, CdfPoint, EvalResult};

/// One aggregated report line: a (policy, task) cell across variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub policy: String,
    pub task: String,
    /// Total evaluation episodes across variants.
    pub n: usize,
    /// Mean success rate across variants.
    pub success_rate: f64,
    /// Min/max success rate across variants.
    pub min: f64,
    pub max: f64,
}

fn aggregate(results: &[EvalResult]) -> Vec<ReportRow> {
    let mut cells: BTreeMap<(String, String), Vec<&EvalResult>> = BTreeMap::new();
    for r in results {
        cells
            .entry((r.policy.clone(), r.task.clone()))
            .or_default()
            .push(r);
    }
    cells
        .into_iter()
        .map(|((policy, task), rows)| {
            let rates: Vec<f64> = rows.iter().map(|r| r.success_rate).collect();
            ReportRow {
                policy,
                task,
                n: rows.iter().map(|r| r.flags.len()).sum(),
                success_rate: rates.iter().sum::<f64>() / rates.len() as f64,
                min: rates.iter().cloned().fold(f64::INFINITY, f64::min),
                max: rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

fn fmt_rate(x: f64) -> String {
    format!("{x:.6}")
}

fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut out = String::from("policy,task,n,success_rate,min,max\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.policy,
            row.task,
            row.n,
            fmt_rate(row.success_rate),
            fmt_rate(row.min),
            fmt_rate(row.max)
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_json(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(rows)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Per-variant CDFs plus the pointwise min/mean/max envelope.
struct PolicyCdf {
    policy: String,
    mean: Vec<CdfPoint>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn policy_cdfs(results: &[EvalResult]) -> Vec<PolicyCdf> {
    let mut by_policy: BTreeMap<String, BTreeMap<u32, Vec<&EvalResult>>> = BTreeMap::new();
    for r in results {
        by_policy
            .entry(r.policy.clone())
            .or_default()
            .entry(r.variant)
            .or_default()
            .push(r);
    }
    by_policy
        .into_iter()
        .filter_map(|(policy, variants)| {
            let cdfs: Vec<Vec<CdfPoint>> = variants
                .values()
                .map(|rows| {
                    let owned: Vec<EvalResult> = rows.iter().map(|r| (*r).clone()).collect();
                    success_cdf(&owned)
                })
                .collect();
            let len = cdfs.iter().map(Vec::len).min()?;
            if len == 0 {
                return None;
            }
            let mut mean = Vec::with_capacity(len);
            let mut lo = Vec::with_capacity(len);
            let mut hi = Vec::with_capacity(len);
            for k in 0..len {
                let values: Vec<f64> = cdfs.iter().map(|c| c[k].success).collect();
                mean.push(CdfPoint {
                    rank: k + 1,
                    success: values.iter().sum::<f64>() / values.len() as f64,
                });
                lo.push(values.iter().cloned().fold(f64::INFINITY, f64::min));
                hi.push(values.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            }
            Some(PolicyCdf {
                policy,
                mean,
                lo,
                hi,
            })
        })
        .collect()
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 420.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn x_at(rank: usize, max_rank: usize) -> f64 {
    if max_rank <= 1 {
        return MARGIN;
    }
    MARGIN + (rank - 1) as f64 / (max_rank - 1) as f64 * (SVG_W - 2.0 * MARGIN)
}

fn y_at(rate: f64) -> f64 {
    SVG_H - MARGIN - rate * (SVG_H - 2.0 * MARGIN)
}

fn write_svg(path: &Path, results: &[EvalResult]) -> Result<()> {
    let cdfs = policy_cdfs(results);
    let max_rank = cdfs.iter().map(|c| c.mean.len()).max().unwrap_or(1);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{SVG_W}" height="{SVG_H}" fill="white"/>"#
    );
    // Axes.
    let _ = writeln!(
        svg,
        r#"<line x1="{m}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
        m = MARGIN,
        y0 = SVG_H - MARGIN,
        x1 = SVG_W - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{y0}" stroke="black"/>"#,
        m = MARGIN,
        y0 = SVG_H - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="middle">tasks (ranked by success)</text>"#,
        x = SVG_W / 2.0,
        y = SVG_H - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{y}" font-size="12" transform="rotate(-90 14 {y})" text-anchor="middle">success rate</text>"#,
        y = SVG_H / 2.0
    );
    for tick in 0..=max_rank.min(20) {
        let rank = if tick == 0 { 1 } else { tick.max(1) };
        if rank > max_rank {
            continue;
        }
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y}" font-size="10" text-anchor="middle">{rank}</text>"#,
            x = x_at(rank, max_rank),
            y = SVG_H - MARGIN + 16.0
        );
    }
    for i in 0..=4 {
        let rate = i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y:.2}" font-size="10" text-anchor="end">{rate:.2}</text>"#,
            x = MARGIN - 6.0,
            y = y_at(rate) + 3.0
        );
    }

    for (idx, cdf) in cdfs.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        // Min/max band.
        let mut band = String::new();
        for (k, hi) in cdf.hi.iter().enumerate() {
            let _ = write!(band, "{:.2},{:.2} ", x_at(k + 1, max_rank), y_at(*hi));
        }
        for (k, lo) in cdf.lo.iter().enumerate().rev() {
            let _ = write!(band, "{:.2},{:.2} ", x_at(k + 1, max_rank), y_at(*lo));
        }
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" opacity="0.15"/>"#,
            band.trim_end()
        );
        // Mean line.
        let mut line = String::new();
        for point in &cdf.mean {
            let _ = write!(
                line,
                "{:.2},{:.2} ",
                x_at(point.rank, max_rank),
                y_at(point.success)
            );
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.trim_end()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y:.2}" font-size="12" fill="{color}">{}</text>"#,
            cdf.policy,
            x = SVG_W - MARGIN + 4.0,
            y = y_at(cdf.mean.last().map(|p| p.success).unwrap_or(0.0))
        );
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

/// Write `results.csv`, `results.json`, and `cdf.svg` under `dir`; returns
/// the written paths.
pub fn write_report(dir: &Path, results: &[EvalResult]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let rows = aggregate(results);
    let csv = dir.join("results.csv");
    let json = dir.join("results.json");
    let svg = dir.join("cdf.svg");
    write_csv(&csv, &rows)?;
    write_json(&json, &rows)?;
    write_svg(&svg, results)?;
    Ok(vec![csv, json, svg])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_results() -> Vec<EvalResult> {
        let mk = |policy: &str, variant: u32, task: &str, wins: usize, n: usize| {
            let flags: Vec<bool> = (0..n).map(|i| i < wins).collect();
            EvalResult {
                policy: policy.into(),
                variant,
                task: task.into(),
                seeds: (0..n as u64).collect(),
                success_rate: wins as f64 / n as f64,
                flags,
            }
        };
        vec![
            mk("pcbc", 0, "push", 5, 10),
            mk("pcbc", 1, "push", 7, 10),
            mk("pcbc", 0, "reach", 10, 10),
            mk("pcbc", 1, "reach", 9, 10),
            mk("dc", 0, "push", 1, 10),
            mk("dc", 0, "reach", 8, 10),
        ]
    }

    #[test]
    fn report_writes_all_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_report(dir.path(), &sample_results()).unwrap();
        assert_eq!(files.len(), 3);
        for file in &files {
            assert!(file.exists());
            assert!(std::fs::metadata(file).unwrap().len() > 0);
        }
    }

    #[test]
    fn csv_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        write_report(dir.path(), &sample_results()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        let json: Vec<ReportRow> =
            serde_json::from_reader(std::fs::File::open(dir.path().join("results.json")).unwrap())
                .unwrap();
        let lines: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(lines.len(), json.len());
        for (line, row) in lines.iter().zip(&json) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[0], row.policy);
            assert_eq!(cols[1], row.task);
            assert_eq!(cols[2].parse::<usize>().unwrap(), row.n);
            assert!((cols[3].parse::<f64>().unwrap() - row.success_rate).abs() < 1e-9);
            assert!((cols[4].parse::<f64>().unwrap() - row.min).abs() < 1e-9);
            assert!((cols[5].parse::<f64>().unwrap() - row.max).abs() < 1e-9);
        }
    }

    #[test]
    fn aggregation_takes_min_max_across_variants() {
        let rows = aggregate(&sample_results());
        let push = rows
            .iter()
            .find(|r| r.policy == "pcbc" && r.task == "push")
            .unwrap();
        assert_eq!(push.n, 20);
        assert!((push.success_rate - 0.6).abs() < 1e-12);
        assert_eq!((push.min, push.max), (0.5, 0.7));
    }

    #[test]
    fn svg_is_well_formed_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        write_report(dir.path(), &sample_results()).unwrap();
        let first = std::fs::read(dir.path().join("cdf.svg")).unwrap();
        write_report(dir.path(), &sample_results()).unwrap();
        let second = std::fs::read(dir.path().join("cdf.svg")).unwrap();
        assert_eq!(first, second);

        // Minimal well-formedness: single root, balanced tags.
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("<svg").count(), 1);
        let opens = text.matches("<polyline").count();
        assert_eq!(opens, 2); // one mean line per policy
    }
}
