//! Timing harness comparing the symmetry path against a full eigensolve.

use std::fmt::Write as _;

use crate::job::{Backend, JobSpec};
use crate::pipeline::{run_job, FailureKind, RunOptions, Stage, StageError, Timings};

/// Header printed above the table.
pub const BASELINE_NOTE: &str =
    "baseline: the same general (non-Hermitian) dense eigensolver is used for every problem, including Hermitian ones";

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        if values.is_empty() {
            return Stat::default();
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 { 0.0 } else { (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
        Stat { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    /// Grid side.
    pub n: usize,
    /// Operator dimension `n²`.
    pub dimension: usize,
    pub largest_block: usize,
    pub runs: Vec<Timings>,
    pub t_p: Stat,
    pub t_b: Stat,
    pub t_s: Stat,
    pub t_f: Stat,
    pub speedup: Stat,
}

/// Runs the job's grid problem at each size: one untimed warm-up, then `runs`
/// timed passes with the full-matrix baseline.
pub fn benchmark(spec: &JobSpec, sizes: &[usize], runs: usize, options: RunOptions) -> Result<Vec<BenchRow>, StageError> {
    let bad = |msg: &str| StageError { stage: Stage::Group, kind: FailureKind::Input, source: msg.to_string().into() };
    if spec.backend != Backend::Float {
        return Err(bad("benchmarks need the float backend"));
    }
    if runs == 0 {
        return Err(bad("runs must be at least 1"));
    }
    let problem = spec.problem.as_ref().ok_or_else(|| bad("benchmarks need a [problem] section"))?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut job = spec.clone();
        job.problem = Some(problem.with_size(n).ok_or_else(|| bad("benchmarks need a grid problem"))?);
        job.flags.baseline_comparison = true;
        job.validate().map_err(|e| StageError { stage: Stage::Group, kind: FailureKind::Input, source: e.into() })?;
        let warm = run_job(&job, options)?;
        let largest_block = warm.reduction.as_ref().map_or(warm.degree, |r| r.blocks.iter().map(|b| b.matrix.rows).max().unwrap_or(0));
        let timings = (0..runs).map(|_| run_job(&job, options).map(|o| o.timings)).collect::<Result<Vec<_>, _>>()?;
        let col = |f: &dyn Fn(&Timings) -> f64| Stat::of(&timings.iter().map(f).collect::<Vec<_>>());
        rows.push(BenchRow {
            n,
            dimension: warm.degree,
            largest_block,
            t_p: col(&|t| t.t_p),
            t_b: col(&|t| t.t_b),
            t_s: col(&|t| t.t_s()),
            t_f: col(&|t| t.t_f.unwrap_or(0.0)),
            speedup: col(&|t| t.speedup().unwrap_or(0.0)),
            runs: timings,
        });
    }
    Ok(rows)
}

fn cell(s: Stat) -> String {
    format!("{:.4} ± {:.4}", s.mean, s.std)
}

/// Mean ± std table, one row per grid size.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {BASELINE_NOTE}");
    let header = ["Grid", "N", "T_p (s)", "T_b (s)", "T_s (s)", "T_f (s)", "Speedup"];
    let body: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                format!("{0}x{0}", r.n),
                r.dimension.to_string(),
                cell(r.t_p),
                cell(r.t_b),
                cell(r.t_s),
                cell(r.t_f),
                format!("{:.2} ± {:.2}", r.speedup.mean, r.speedup.std),
            ]
        })
        .collect();
    let widths: Vec<usize> =
        (0..7).map(|c| body.iter().map(|r| r[c].chars().count()).chain([header[c].len()]).max().unwrap_or(0)).collect();
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        format!("| {} |\n", padded.join(" | "))
    };
    s.push_str(&line(header.to_vec()));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    s.push_str(&line(rule.iter().map(String::as_str).collect()));
    for r in &body {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

/// One line per timed run, for plotting.
pub fn timing_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("n,N,run,t_p,t_b,t_s,t_f,speedup\n");
    for r in rows {
        for (i, t) in r.runs.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{:e},{:e},{:e},{}",
                r.n,
                r.dimension,
                i,
                t.t_p,
                t.t_b,
                t.t_s(),
                t.t_f.unwrap_or(0.0),
                t.speedup().unwrap_or(0.0)
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        assert_eq!(Stat::of(&[2.0]), Stat { mean: 2.0, std: 0.0 });
        let s = Stat::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 1.0).abs() < 1e-15);
    }
}
