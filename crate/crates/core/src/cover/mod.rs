//! Covering problems over associative tables.
//!
//! Rows are covering units (spare memory lines, or anything generic),
//! columns are items to cover (faulty cells). [`greedy_cover`] is the
//! one-pass quasi-optimal scan; [`exact_cover_oracle`] enumerates subsets to
//! find every minimum cover and serves as its reference.

mod memory;
mod repair;

pub use memory::{service_memory, MemoryModel, RepairStage, ServiceReport, StuckAt};
pub use repair::{
    build_repair_table, build_repair_table_ordered, repair_plan, run_test, PlanVerdict, Remap, RepairInstance,
    RepairPlan, Spare, SpareOrder,
};

use itertools::Itertools;
use thiserror::Error;

use crate::assoc::{AssociativeTable, TableError};
use crate::vlcore::{BitVector, VectorError};

/// Largest row count the exhaustive oracle accepts.
pub const ORACLE_MAX_ROWS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("{rows} rows exceed the exhaustive oracle limit of {limit}")]
    TooLarge { rows: usize, limit: usize },
    #[error("no cover exists within the given constraints")]
    Infeasible,
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("fault ({row}, {col}) lies outside the memory")]
    FaultOutOfRange { row: usize, col: usize },
    #[error("no faults to repair")]
    NoFaults,
    #[error("spare {0} lies outside the memory")]
    UnknownSpare(Spare),
    #[error("row kinds: expected {expected}, found {found}")]
    KindCount { expected: usize, found: usize },
    #[error("budget exceeded: {rows_used} spare rows (max {max_rows}), {cols_used} spare columns (max {max_cols})")]
    BudgetExceeded {
        rows_used: usize,
        cols_used: usize,
        max_rows: usize,
        max_cols: usize,
    },
    #[error("{} fault(s) left uncovered", uncovered.len())]
    NotCovering { uncovered: Vec<(usize, usize)> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Vector(#[from] VectorError),
}

/// What a coverage-table row stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    SpareColumn(usize),
    SpareRow(usize),
    Generic,
}

/// Maximum spare rows and columns a repair may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpareBudget {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageInstance {
    pub table: AssociativeTable,
    kinds: Vec<RowKind>,
    pub budget: Option<SpareBudget>,
}

impl CoverageInstance {
    /// A covering problem without spare semantics or budgets.
    pub fn generic(table: AssociativeTable) -> Self {
        let kinds = vec![RowKind::Generic; table.height()];
        Self {
            table,
            kinds,
            budget: None,
        }
    }

    pub fn with_kinds(
        table: AssociativeTable,
        kinds: Vec<RowKind>,
        budget: Option<SpareBudget>,
    ) -> Result<Self, CoverError> {
        if kinds.len() != table.height() {
            return Err(CoverError::KindCount {
                expected: table.height(),
                found: kinds.len(),
            });
        }
        Ok(Self { table, kinds, budget })
    }

    pub fn kinds(&self) -> &[RowKind] {
        &self.kinds
    }

    /// Columns no row covers; set bits mark them.
    pub fn uncoverable(&self) -> BitVector {
        let mut all = BitVector::zeros(self.table.width()).expect("table width is positive");
        for row in self.table.rows() {
            all.or_assign(row).expect("rows share the table width");
        }
        all.not()
    }

    pub fn is_feasible(&self) -> bool {
        !self.uncoverable().devectorize()
    }

    /// Whether the rows in `chosen` stay within the spare budget.
    pub fn within_budget(&self, chosen: &[usize]) -> bool {
        let Some(budget) = self.budget else {
            return true;
        };
        let rows = chosen
            .iter()
            .filter(|&&i| matches!(self.kinds[i], RowKind::SpareRow(_)))
            .count();
        let cols = chosen
            .iter()
            .filter(|&&i| matches!(self.kinds[i], RowKind::SpareColumn(_)))
            .count();
        rows <= budget.rows && cols <= budget.cols
    }
}

/// Result of the greedy scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyCover {
    /// `m_a`: one bit per table row, 1 = taken.
    pub selection: BitVector,
    /// `m_b`: columns covered by the taken rows.
    pub covered: BitVector,
}

impl GreedyCover {
    pub fn chosen_rows(&self) -> Vec<usize> {
        self.selection.ones_positions().collect()
    }

    /// 0-based columns left uncovered.
    pub fn uncovered(&self) -> Vec<usize> {
        self.covered.not().ones_positions().collect()
    }

    pub fn is_complete(&self) -> bool {
        self.uncovered().is_empty()
    }
}

/// Scans rows in table order and takes row i iff `or((m_b or A_i) and not m_b)`,
/// i.e. it covers something new; taken rows are folded into `m_b`.
///
/// One vector pass per row. Budgets are not consulted here.
pub fn greedy_cover(instance: &CoverageInstance) -> GreedyCover {
    let table = &instance.table;
    let mut covered = BitVector::zeros(table.width()).expect("table width is positive");
    let mut taken = Vec::with_capacity(table.height());
    for row in table.rows() {
        let gain = covered
            .or(row)
            .and_then(|v| v.and(&covered.not()))
            .expect("rows share the table width");
        let take = gain.devectorize();
        if take {
            covered.or_assign(row).expect("rows share the table width");
        }
        taken.push(take);
    }
    GreedyCover {
        selection: BitVector::from_bits(taken).expect("table has rows"),
        covered,
    }
}

/// Every minimum-cardinality cover, as ascending row-index lists in
/// lexicographic order. Budgets are honored when present.
pub fn exact_cover_oracle(instance: &CoverageInstance) -> Result<Vec<Vec<usize>>, CoverError> {
    let table = &instance.table;
    let n = table.height();
    if n > ORACLE_MAX_ROWS {
        return Err(CoverError::TooLarge {
            rows: n,
            limit: ORACLE_MAX_ROWS,
        });
    }
    if !instance.is_feasible() {
        return Err(CoverError::Infeasible);
    }
    let full = table.width();
    for k in 1..=n {
        let covers: Vec<Vec<usize>> = (0..n)
            .combinations(k)
            .filter(|subset| instance.within_budget(subset))
            .filter(|subset| {
                let mut acc = BitVector::zeros(full).expect("table width is positive");
                for &i in subset {
                    acc.or_assign(table.row(i)).expect("rows share the table width");
                }
                acc.count_ones() == full
            })
            .collect();
        if !covers.is_empty() {
            return Ok(covers);
        }
    }
    Err(CoverError::Infeasible)
}
