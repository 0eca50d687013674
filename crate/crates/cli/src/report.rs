//! Running sweeps and serializing their rows and summaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use sw_asymptotics::asymptotics::{verify_row, CaseVerificationRow, VerificationSummary};
use sw_asymptotics::diophantine::{DiophantineWitness, PairedWitness};
use sw_asymptotics::Error;

use crate::config::{Format, SweepConfig};

pub const ROW_HEADER: [&str; 12] = [
    "case",
    "n",
    "lhs_re",
    "lhs_im",
    "main_re",
    "main_im",
    "abs_err",
    "bound",
    "within",
    "nu_n",
    "witness_m",
    "witness_residual",
];

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<CaseVerificationRow>,
    pub summary: VerificationSummary,
}

/// Rows are computed on `cfg.jobs` workers and returned in degree order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.check()?;
    let params = cfg.params();
    let regime = params.validate()?;
    let ns = cfg.candidates()?;
    if ns.is_empty() {
        return Err(Error::EmptyCandidates.into());
    }
    let (z, q) = (cfg.z(), cfg.qparam()?);
    let row = |&n: &u64| verify_row(regime, &params, z, q, n);
    let rows = if cfg.jobs == 1 {
        ns.iter().map(row).collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
        pool.install(|| ns.par_iter().map(row).collect::<Result<Vec<_>, _>>())?
    };
    let summary = VerificationSummary::from_rows(&params, &rows);
    Ok(SweepReport { rows, summary })
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row_fields(r: &CaseVerificationRow) -> [String; 12] {
    let (wm, wr) = match r.witness {
        Some(w) => (w.m.to_string(), fmt_f64(w.residual)),
        None => (String::new(), String::new()),
    };
    [
        r.case_id.to_string(),
        r.n.to_string(),
        fmt_f64(r.lhs.re),
        fmt_f64(r.lhs.im),
        fmt_f64(r.main.re),
        fmt_f64(r.main.im),
        fmt_f64(r.abs_err),
        fmt_f64(r.bound),
        r.within.to_string(),
        r.nu_n.to_string(),
        wm,
        wr,
    ]
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_rows_csv<W: Write>(rows: &[CaseVerificationRow], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(ROW_HEADER)?;
    for r in rows {
        out.write_record(row_fields(r))?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RowRecord {
    case: u8,
    n: u64,
    lhs_re: f64,
    lhs_im: f64,
    main_re: f64,
    main_im: f64,
    abs_err: f64,
    bound: f64,
    within: bool,
    nu_n: u64,
    witness_m: Option<i64>,
    witness_residual: Option<f64>,
}

impl From<&CaseVerificationRow> for RowRecord {
    fn from(r: &CaseVerificationRow) -> Self {
        Self {
            case: r.case_id,
            n: r.n,
            lhs_re: r.lhs.re,
            lhs_im: r.lhs.im,
            main_re: r.main.re,
            main_im: r.main.im,
            abs_err: r.abs_err,
            bound: r.bound,
            within: r.within,
            nu_n: r.nu_n,
            witness_m: r.witness.map(|w| w.m),
            witness_residual: r.witness.map(|w| w.residual),
        }
    }
}

pub fn write_rows_json<W: Write>(rows: &[CaseVerificationRow], mut w: W) -> Result<()> {
    let records: Vec<RowRecord> = rows.iter().map(RowRecord::from).collect();
    serde_json::to_writer_pretty(&mut w, &records)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[CaseVerificationRow], format: Format, w: W) -> Result<()> {
    match format {
        Format::Csv => write_rows_csv(rows, w),
        Format::Json => write_rows_json(rows, w),
    }
}

pub fn summary_json(summary: &VerificationSummary) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

/// `dir/case4.csv` becomes `dir/case4.summary.json`.
pub fn summary_path(rows_path: &Path) -> PathBuf {
    rows_path.with_extension("summary.json")
}

/// Writes rows to `rows_path` and the summary beside it; returns the
/// summary path.
pub fn write_report(report: &SweepReport, format: Format, rows_path: &Path) -> Result<PathBuf> {
    if let Some(dir) = rows_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(rows_path).with_context(|| format!("creating {}", rows_path.display()))?;
    let mut w = BufWriter::new(file);
    write_rows(&report.rows, format, &mut w)?;
    w.flush()?;
    let sp = summary_path(rows_path);
    std::fs::write(&sp, summary_json(&report.summary)?).with_context(|| format!("writing {}", sp.display()))?;
    Ok(sp)
}

pub fn write_witnesses_csv<W: Write>(ws: &[DiophantineWitness], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["n", "m", "residual"])?;
    for x in ws {
        out.write_record([x.n.to_string(), x.m.to_string(), fmt_f64(x.residual)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_pairs_csv<W: Write>(ws: &[PairedWitness], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["n", "m", "residual", "m1", "residual2"])?;
    for x in ws {
        out.write_record([
            x.n.to_string(),
            x.m.to_string(),
            fmt_f64(x.a_n),
            x.m1.to_string(),
            fmt_f64(x.b_n),
        ])?;
    }
    out.flush()?;
    Ok(())
}
