//! A behavioral memory model for the test, diagnose, cover, repair loop.
//!
//! Each cell has one test pattern: write 0 and read back, then write 1 and
//! read back. The two read values form one response row, so a memory of
//! `R x C` cells yields `R*C` test patterns of width 2, numbered row-major.

use std::collections::BTreeMap;

use super::{
    build_repair_table, greedy_cover, repair_plan, run_test, CoverError, CoverageInstance, GreedyCover, RepairInstance,
    RepairPlan, RowKind, Spare, SpareBudget,
};
use crate::assoc::{diagnose, AssociativeTable, DiagnosisMode, DiagnosisResult};
use crate::vlcore::BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StuckAt {
    Zero,
    One,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryModel {
    pub rows: usize,
    pub cols: usize,
    faults: BTreeMap<(usize, usize), StuckAt>,
}

impl MemoryModel {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "memory must have at least one cell");
        Self {
            rows,
            cols,
            faults: BTreeMap::new(),
        }
    }

    pub fn inject(&mut self, row: usize, col: usize, fault: StuckAt) -> Result<(), CoverError> {
        if row >= self.rows || col >= self.cols {
            return Err(CoverError::FaultOutOfRange { row, col });
        }
        self.faults.insert((row, col), fault);
        Ok(())
    }

    pub fn faults(&self) -> impl Iterator<Item = ((usize, usize), StuckAt)> + '_ {
        self.faults.iter().map(|(&k, &v)| (k, v))
    }

    /// Same geometry, no faults.
    pub fn reference(&self) -> Self {
        Self::new(self.rows, self.cols)
    }

    fn read_after_write(&self, cell: (usize, usize), written: bool) -> bool {
        match self.faults.get(&cell) {
            Some(StuckAt::Zero) => false,
            Some(StuckAt::One) => true,
            None => written,
        }
    }

    /// Response table: one row per cell pattern, `[read after w0, read after w1]`.
    pub fn responses(&self) -> AssociativeTable {
        let rows = self
            .cells()
            .map(|cell| BitVector::from_bits([self.read_after_write(cell, false), self.read_after_write(cell, true)]).unwrap())
            .collect();
        AssociativeTable::new(rows).expect("memory has cells")
    }

    /// Fault table of the cell patterns: rows are tests, columns are cells,
    /// and each pattern exercises exactly its own cell.
    pub fn fault_table(&self) -> AssociativeTable {
        let n = self.rows * self.cols;
        let rows = (0..n).map(|i| BitVector::with_ones(n, [i]).unwrap()).collect();
        AssociativeTable::new(rows)
            .and_then(|t| t.with_col_labels(self.cells().map(|(r, c)| format!("F{r},{c}")).collect()))
            .expect("one label per cell")
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> {
        let cols = self.cols;
        (0..self.rows * cols).map(move |i| (i / cols, i % cols))
    }
}

/// Everything produced while servicing one memory.
#[derive(Debug, Clone)]
pub struct ServiceReport {
    /// One bit per test pattern; 1 = mismatch against the reference.
    pub response: BitVector,
    pub diagnosis: DiagnosisResult,
    /// Diagnosed faulty cells, `(row, col)`.
    pub located: Vec<(usize, usize)>,
    /// `None` when no fault was found.
    pub repair: Option<RepairStage>,
}

#[derive(Debug, Clone)]
pub struct RepairStage {
    pub instance: RepairInstance,
    pub coverage: CoverageInstance,
    pub greedy: GreedyCover,
    pub plan: RepairPlan,
}

/// Tests a memory against its fault-free reference, locates faulty cells,
/// covers them greedily with spares and validates the plan against `budget`.
pub fn service_memory(uut: &MemoryModel, budget: SpareBudget) -> Result<ServiceReport, CoverError> {
    let response = run_test(&uut.responses(), &uut.reference().responses())?;
    let diagnosis = diagnose(&uut.fault_table(), &response, DiagnosisMode::Multiple)?;
    let located: Vec<(usize, usize)> = diagnosis
        .candidates
        .ones_positions()
        .map(|i| (i / uut.cols, i % uut.cols))
        .collect();
    let repair = if located.is_empty() {
        None
    } else {
        let instance = RepairInstance::new(uut.rows, uut.cols, located.iter().copied(), budget)?;
        let coverage = build_repair_table(&instance)?;
        let greedy = greedy_cover(&coverage);
        let spares: Vec<Spare> = greedy
            .chosen_rows()
            .into_iter()
            .map(|i| match coverage.kinds()[i] {
                RowKind::SpareColumn(c) => Spare::Column(c),
                RowKind::SpareRow(r) => Spare::Row(r),
                RowKind::Generic => unreachable!("repair tables only hold spares"),
            })
            .collect();
        let plan = repair_plan(&instance, &spares)?;
        Some(RepairStage {
            instance,
            coverage,
            greedy,
            plan,
        })
    };
    Ok(ServiceReport {
        response,
        diagnosis,
        located,
        repair,
    })
}
