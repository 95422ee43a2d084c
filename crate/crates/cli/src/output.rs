use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use tvs_core::audit::BudgetRecord;
use tvs_core::snapshot::write_state;
use tvs_core::State;

use crate::CliError;

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `budget.csv` with the fixed header.
pub struct BudgetWriter {
    path: PathBuf,
    out: BufWriter<File>,
    pub rows: usize,
}

impl BudgetWriter {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join("budget.csv");
        let mut out = create(&path)?;
        writeln!(out, "{}", BudgetRecord::CSV_HEADER).map_err(|e| CliError::io(&path, e))?;
        Ok(BudgetWriter { path, out, rows: 0 })
    }

    pub fn push(&mut self, rec: &BudgetRecord) -> Result<(), CliError> {
        writeln!(self.out, "{}", rec.csv_row()).map_err(|e| CliError::io(&self.path, e))?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub fn snapshot_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("snap_{index:05}.tvs"))
}

pub fn write_snapshot(path: &Path, state: &State) -> Result<(), CliError> {
    let mut out = create(path)?;
    write_state(&mut out, state)?;
    out.flush().map_err(|e| CliError::io(path, e))
}

/// 8-bit binary PGM of theta, min-max normalized, top row at y = 1.
pub fn pgm_bytes(state: &State) -> Vec<u8> {
    let g = state.grid();
    let th = &state.theta.data;
    let (lo, hi) = th
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let span = hi - lo;
    let mut bytes = format!("P5\n{} {}\n255\n", g.n, g.n).into_bytes();
    for j in (0..g.n).rev() {
        for i in 0..g.n {
            let x = th[g.idx(i, j)];
            let level = if span > 0.0 {
                ((x - lo) / span * 255.0).round()
            } else {
                0.0
            };
            bytes.push(level.clamp(0.0, 255.0) as u8);
        }
    }
    bytes
}

pub fn write_pgm(path: &Path, state: &State) -> Result<(), CliError> {
    std::fs::write(path, pgm_bytes(state)).map_err(|e| CliError::io(path, e))
}
