//! The 4x4 sequencer matrix. Cells share no state, so each runs its own
//! program to completion independently.

use rayon::prelude::*;
use thiserror::Error;

use super::{run_sequencer, Program, SequencerState, SimError};

pub const GRID_SIDE: usize = 4;
const CELLS: usize = GRID_SIDE * GRID_SIDE;

/// Sixteen sequencers in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridState {
    cells: Vec<SequencerState>,
}

impl GridState {
    pub fn new(cells: [SequencerState; CELLS]) -> Self {
        Self { cells: cells.into() }
    }

    /// Same initial state in every cell.
    pub fn uniform(cell: SequencerState) -> Self {
        Self {
            cells: vec![cell; CELLS],
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> &SequencerState {
        &self.cells[row * GRID_SIDE + col]
    }

    pub fn cells(&self) -> &[SequencerState] {
        &self.cells
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFailure {
    pub row: usize,
    pub col: usize,
    pub error: SimError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} grid cell(s) failed: {}", failures.len(), summary(failures))]
pub struct GridError {
    pub failures: Vec<CellFailure>,
}

fn summary(failures: &[CellFailure]) -> String {
    failures
        .iter()
        .map(|f| format!("P[{},{}]: {}", f.row + 1, f.col + 1, f.error))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Runs `progs[i]` on cell `i` (row-major). Every failing cell is reported.
pub fn run_grid(grid: GridState, progs: &[Program; CELLS], max_steps: u64) -> Result<GridState, GridError> {
    let outcomes: Vec<Result<SequencerState, SimError>> = grid
        .cells
        .into_par_iter()
        .zip(progs.par_iter())
        .map(|(cell, prog)| run_sequencer(cell, prog, max_steps))
        .collect();

    let mut cells = Vec::with_capacity(CELLS);
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(c) => cells.push(c),
            Err(error) => failures.push(CellFailure {
                row: i / GRID_SIDE,
                col: i % GRID_SIDE,
                error,
            }),
        }
    }
    if failures.is_empty() {
        Ok(GridState { cells })
    } else {
        Err(GridError { failures })
    }
}
