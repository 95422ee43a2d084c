//! `TVS1` binary snapshots.
//!
//! A header line `TVS1 <kind> <n> <time>` followed by row-major little-endian
//! `f64` values. The `state` kind stores eight values per cell in the order
//! `v1 v2 F11 F12 F21 F22 theta p`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, ScalarField, TensorField, VectorField};
use crate::solver::State;

pub const MAGIC: &str = "TVS1";
pub const STATE_KIND: &str = "state";
const PER_CELL: usize = 8;

fn io(e: std::io::Error) -> Error {
    Error::Snapshot(e.to_string())
}

pub fn write_state<W: Write>(mut w: W, state: &State) -> Result<()> {
    let g = state.grid();
    writeln!(w, "{MAGIC} {STATE_KIND} {} {:.17e}", g.n, state.t).map_err(io)?;
    let mut buf = Vec::with_capacity(g.len() * PER_CELL * 8);
    for k in 0..g.len() {
        let vals = [
            state.v.c[0][k],
            state.v.c[1][k],
            state.f.c[0][k],
            state.f.c[1][k],
            state.f.c[2][k],
            state.f.c[3][k],
            state.theta.data[k],
            state.p.data[k],
        ];
        for x in vals {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io)
}

/// Reads a `state` snapshot; the boundary mode is not stored and must be supplied.
pub fn read_state<R: BufRead>(mut r: R, bc: Boundary) -> Result<State> {
    let mut header = String::new();
    r.read_line(&mut header).map_err(io)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != MAGIC {
        return Err(Error::Snapshot(format!(
            "bad header `{}`",
            header.trim_end()
        )));
    }
    if parts[1] != STATE_KIND {
        return Err(Error::Snapshot(format!("unsupported kind `{}`", parts[1])));
    }
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Snapshot(format!("bad grid size `{}`", parts[2])))?;
    let t: f64 = parts[3]
        .parse()
        .map_err(|_| Error::Snapshot(format!("bad time `{}`", parts[3])))?;
    let grid = Grid::new(n, bc)?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io)?;
    let want = grid.len() * PER_CELL * 8;
    if bytes.len() != want {
        return Err(Error::Snapshot(format!(
            "expected {want} payload bytes, found {}",
            bytes.len()
        )));
    }
    let vals: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let col = |m: usize| -> Vec<f64> { (0..grid.len()).map(|k| vals[k * PER_CELL + m]).collect() };
    Ok(State {
        v: VectorField {
            grid,
            c: [col(0), col(1)],
        },
        f: TensorField {
            grid,
            c: [col(2), col(3), col(4), col(5)],
        },
        theta: ScalarField { grid, data: col(6) },
        p: ScalarField { grid, data: col(7) },
        t,
    })
}
