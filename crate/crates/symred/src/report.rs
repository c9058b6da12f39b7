//! Output files: `blocks.txt`, `spectrum.csv` and `timing.csv`.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::Path;

use crate::formats::{write_spectrum, FormatError};
use crate::pipeline::{RenderedMatrix, RunOutcome, Timings};

/// Matrices larger than this are summarized instead of printed.
pub const PRINT_LIMIT: usize = 32;

pub const BLOCKS_FILE: &str = "blocks.txt";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const TIMING_FILE: &str = "timing.csv";

fn matrix_text(m: &RenderedMatrix, indent: &str) -> String {
    let cells: Vec<String> = m.entries.iter().map(ToString::to_string).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for i in 0..m.rows {
        out.push_str(indent);
        out.push('[');
        let row: Vec<String> = (0..m.cols).map(|j| format!("{:>width$}", cells[i * m.cols + j])).collect();
        out.push_str(&row.join("  "));
        out.push_str("]\n");
    }
    out
}

/// Human-readable block report. Contains no timings, so repeated exact runs
/// produce identical files.
pub fn blocks_report(r: &RunOutcome) -> String {
    let mut s = String::new();
    let backend = match r.backend {
        crate::job::Backend::Exact => "exact",
        crate::job::Backend::Float => "float",
    };
    let _ = writeln!(s, "backend: {backend}");
    let _ = writeln!(s, "group order: {}", r.group_order);
    let _ = writeln!(s, "class sizes: {:?}", r.class_sizes);
    let _ = writeln!(s, "representation degree: {}", r.degree);
    let _ = writeln!(s, "character table: {}", r.table_source);
    for (label, row) in r.table.labels().iter().zip(r.table.values()) {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "  {label:<8} {}", cells.join("  "));
    }
    let _ = writeln!(s, "\nmultiplicities:");
    for m in &r.multiplicities.entries {
        let _ = writeln!(s, "  {:<8} degree {}  multiplicity {}", m.label, m.degree, m.multiplicity);
    }
    let _ = writeln!(s, "\nblock prevision:");
    for p in &r.prevision {
        let _ = writeln!(s, "  {:<8} {} block(s) of size {}x{}", p.label, p.count, p.size, p.size);
    }
    match &r.equivariance {
        Some(e) => {
            let _ = writeln!(s, "\nequivariance: passed (max residual {:e}, relative {:e})", e.max_residual, e.relative_residual);
        }
        None => {
            let _ = writeln!(s, "\nequivariance: not checked");
        }
    }
    let Some(red) = &r.reduction else {
        let _ = writeln!(s, "\nno irrep matrices: spectrum computed from the full operator");
        return s;
    };
    if let Some(basis) = &red.basis {
        let _ = writeln!(s, "\nsymmetry-adapted basis ({}x{}):", basis.rows, basis.cols);
        if basis.rows <= PRINT_LIMIT {
            s.push_str(&matrix_text(basis, "  "));
        } else {
            let _ = writeln!(s, "  (not printed)");
        }
    }
    let _ = writeln!(s, "\nblocks:");
    for (i, b) in red.blocks.iter().enumerate() {
        let _ = writeln!(s, "  block {i}: {} copy {} offset {} size {}x{}", b.label, b.copy, b.offset, b.matrix.rows, b.matrix.cols);
        if b.matrix.rows <= PRINT_LIMIT {
            s.push_str(&matrix_text(&b.matrix, "    "));
        }
    }
    let _ = writeln!(s, "\noff-block residual: {:e}", red.off_block_residual);
    let _ = writeln!(s, "copy deviation: {:e}", red.copy_deviation);
    let _ = writeln!(s, "operator norm: {:e}", red.operator_norm);
    if let Some(d) = r.baseline_deviation {
        let _ = writeln!(s, "baseline deviation: {d:e}");
    }
    s
}

/// Stage timings of one run plus the `T_p, T_b, T_s, T_f, speedup` summary.
pub fn timing_csv(t: &Timings) -> String {
    let mut s = String::from("stage,seconds\n");
    for (stage, secs) in &t.stages {
        let _ = writeln!(s, "{stage},{secs:e}");
    }
    let _ = writeln!(s, "T_p,{:e}", t.t_p);
    let _ = writeln!(s, "T_b,{:e}", t.t_b);
    let _ = writeln!(s, "T_s,{:e}", t.t_s());
    if let (Some(f), Some(sp)) = (t.t_f, t.speedup()) {
        let _ = writeln!(s, "T_f,{f:e}");
        let _ = writeln!(s, "speedup,{sp}");
    }
    s
}

pub fn write_outputs(r: &RunOutcome, dir: &Path) -> Result<(), FormatError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(BLOCKS_FILE), blocks_report(r))?;
    write_spectrum(BufWriter::new(File::create(dir.join(SPECTRUM_FILE))?), &r.spectrum)?;
    fs::write(dir.join(TIMING_FILE), timing_csv(&r.timings))?;
    Ok(())
}

pub fn read_spectrum_file(path: &Path) -> Result<Vec<symred_core::reduction::SpectrumEntry>, FormatError> {
    crate::formats::read_spectrum(io::BufReader::new(File::open(path)?))
}
