//! Memory repair with spare rows and columns.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{CoverError, CoverageInstance, RowKind, SpareBudget};
use crate::assoc::AssociativeTable;
use crate::vlcore::BitVector;

/// A memory with faulty cells and a spare budget. Faults are kept sorted by
/// (row, column) without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairInstance {
    pub rows: usize,
    pub cols: usize,
    faults: Vec<(usize, usize)>,
    pub budget: SpareBudget,
}

impl RepairInstance {
    pub fn new(
        rows: usize,
        cols: usize,
        faults: impl IntoIterator<Item = (usize, usize)>,
        budget: SpareBudget,
    ) -> Result<Self, CoverError> {
        let faults: BTreeSet<_> = faults.into_iter().collect();
        if let Some(&(row, col)) = faults.iter().find(|&&(r, c)| r >= rows || c >= cols) {
            return Err(CoverError::FaultOutOfRange { row, col });
        }
        Ok(Self {
            rows,
            cols,
            faults: faults.into_iter().collect(),
            budget,
        })
    }

    pub fn faults(&self) -> &[(usize, usize)] {
        &self.faults
    }

    /// Distinct faulty columns, ascending.
    pub fn faulty_cols(&self) -> Vec<usize> {
        self.faults.iter().map(|f| f.1).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Distinct faulty rows, ascending.
    pub fn faulty_rows(&self) -> Vec<usize> {
        self.faults.iter().map(|f| f.0).collect::<BTreeSet<_>>().into_iter().collect()
    }
}

/// Text form: a `R C r_max c_max` header, then one `r c` fault per line.
/// Blank lines and `#` comments are ignored.
impl FromStr for RepairInstance {
    type Err = CoverError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let numbers = |line: usize, s: &str, count: usize, what: &str| -> Result<Vec<usize>, CoverError> {
            let v: Vec<usize> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| CoverError::Parse {
                    line,
                    message: format!("expected {what}, got {s:?}"),
                })?;
            if v.len() != count {
                return Err(CoverError::Parse {
                    line,
                    message: format!("expected {what}, got {s:?}"),
                });
            }
            Ok(v)
        };
        let (hl, header) = lines.next().ok_or(CoverError::Parse {
            line: 1,
            message: "missing `R C r_max c_max` header".into(),
        })?;
        let h = numbers(hl, header, 4, "`R C r_max c_max`")?;
        let mut faults = Vec::new();
        for (ln, line) in lines {
            let f = numbers(ln, line, 2, "`r c`")?;
            faults.push((f[0], f[1]));
        }
        RepairInstance::new(h[0], h[1], faults, SpareBudget { rows: h[2], cols: h[3] })
    }
}

impl fmt::Display for RepairInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {} {}", self.rows, self.cols, self.budget.rows, self.budget.cols)?;
        for (r, c) in &self.faults {
            writeln!(f, "{r} {c}")?;
        }
        Ok(())
    }
}

/// A spare unit replacing one memory line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spare {
    Column(usize),
    Row(usize),
}

impl Spare {
    fn covers(self, (r, c): (usize, usize)) -> bool {
        match self {
            Spare::Column(x) => x == c,
            Spare::Row(x) => x == r,
        }
    }
}

impl fmt::Display for Spare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spare::Column(c) => write!(f, "C{c}"),
            Spare::Row(r) => write!(f, "R{r}"),
        }
    }
}

impl FromStr for Spare {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, idx) = s.split_at(1.min(s.len()));
        let idx: usize = idx.parse().map_err(|_| format!("bad spare {s:?}"))?;
        match kind {
            "C" | "c" => Ok(Spare::Column(idx)),
            "R" | "r" => Ok(Spare::Row(idx)),
            _ => Err(format!("bad spare {s:?}, expected C<n> or R<n>")),
        }
    }
}

impl From<Spare> for RowKind {
    fn from(s: Spare) -> Self {
        match s {
            Spare::Column(c) => RowKind::SpareColumn(c),
            Spare::Row(r) => RowKind::SpareRow(r),
        }
    }
}

/// Order of spare rows in the coverage table. Greedy covering is
/// order-sensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpareOrder {
    /// Spare columns ascending, then spare rows ascending.
    #[default]
    ColumnsFirst,
    RowsFirst,
}

/// Coverage table with spare columns first; see [`build_repair_table_ordered`].
pub fn build_repair_table(instance: &RepairInstance) -> Result<CoverageInstance, CoverError> {
    build_repair_table_ordered(instance, SpareOrder::ColumnsFirst)
}

/// One table column per fault, one row per spare line passing through some
/// fault; entry 1 iff the spare line contains the fault.
pub fn build_repair_table_ordered(instance: &RepairInstance, order: SpareOrder) -> Result<CoverageInstance, CoverError> {
    if instance.faults.is_empty() {
        return Err(CoverError::NoFaults);
    }
    let cols = instance.faulty_cols().into_iter().map(Spare::Column);
    let rows = instance.faulty_rows().into_iter().map(Spare::Row);
    let spares: Vec<Spare> = match order {
        SpareOrder::ColumnsFirst => cols.chain(rows).collect(),
        SpareOrder::RowsFirst => rows.chain(cols).collect(),
    };
    let table_rows = spares
        .iter()
        .map(|&s| BitVector::from_bits(instance.faults.iter().map(|&f| s.covers(f))))
        .collect::<Result<Vec<_>, _>>()?;
    let table = AssociativeTable::new(table_rows)?
        .with_row_labels(spares.iter().map(Spare::to_string).collect())?
        .with_col_labels(instance.faults.iter().map(|(r, c)| format!("F{r},{c}")).collect())?;
    CoverageInstance::with_kinds(table, spares.into_iter().map(RowKind::from).collect(), Some(instance.budget))
}

/// A faulty line redirected to a spare unit. Ordinals count from 1,
/// separately for spare rows and spare columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Remap {
    pub line: Spare,
    pub ordinal: usize,
}

impl fmt::Display for Remap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> s{}", self.line, self.ordinal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanVerdict {
    Valid,
    NotCovering { uncovered: Vec<(usize, usize)> },
    BudgetExceeded { rows_used: usize, cols_used: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    /// Spare columns ascending, then spare rows ascending.
    pub spares: Vec<Spare>,
    pub remap: Vec<Remap>,
    pub verdict: PlanVerdict,
    pub budget: SpareBudget,
}

impl RepairPlan {
    pub fn is_valid(&self) -> bool {
        self.verdict == PlanVerdict::Valid
    }

    pub fn rows_used(&self) -> usize {
        self.spares.iter().filter(|s| matches!(s, Spare::Row(_))).count()
    }

    pub fn cols_used(&self) -> usize {
        self.spares.iter().filter(|s| matches!(s, Spare::Column(_))).count()
    }

    /// The plan if valid, otherwise the defect as an error.
    pub fn into_result(self) -> Result<RepairPlan, CoverError> {
        match &self.verdict {
            PlanVerdict::Valid => Ok(self),
            PlanVerdict::NotCovering { uncovered } => Err(CoverError::NotCovering {
                uncovered: uncovered.clone(),
            }),
            PlanVerdict::BudgetExceeded { rows_used, cols_used } => Err(CoverError::BudgetExceeded {
                rows_used: *rows_used,
                cols_used: *cols_used,
                max_rows: self.budget.rows,
                max_cols: self.budget.cols,
            }),
        }
    }
}

/// Checks a chosen set of spares against the faults and the budget, and
/// assigns spare ordinals in ascending line order. Coverage defects are
/// reported ahead of budget overruns.
pub fn repair_plan(instance: &RepairInstance, cover: &[Spare]) -> Result<RepairPlan, CoverError> {
    for &s in cover {
        let inside = match s {
            Spare::Column(c) => c < instance.cols,
            Spare::Row(r) => r < instance.rows,
        };
        if !inside {
            return Err(CoverError::UnknownSpare(s));
        }
    }
    let spares: Vec<Spare> = cover.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();

    let mut remap = Vec::with_capacity(spares.len());
    let (mut next_col, mut next_row) = (0, 0);
    for &line in &spares {
        let ordinal = match line {
            Spare::Column(_) => {
                next_col += 1;
                next_col
            }
            Spare::Row(_) => {
                next_row += 1;
                next_row
            }
        };
        remap.push(Remap { line, ordinal });
    }

    let uncovered: Vec<(usize, usize)> = instance
        .faults
        .iter()
        .copied()
        .filter(|&f| !spares.iter().any(|s| s.covers(f)))
        .collect();
    let verdict = if !uncovered.is_empty() {
        PlanVerdict::NotCovering { uncovered }
    } else if next_row > instance.budget.rows || next_col > instance.budget.cols {
        PlanVerdict::BudgetExceeded {
            rows_used: next_row,
            cols_used: next_col,
        }
    } else {
        PlanVerdict::Valid
    };
    Ok(RepairPlan {
        spares,
        remap,
        verdict,
        budget: instance.budget,
    })
}

/// Compares unit and reference responses row by row; bit i is 1 when test
/// pattern i exposed a mismatch.
pub fn run_test(uut: &AssociativeTable, reference: &AssociativeTable) -> Result<BitVector, CoverError> {
    if uut.height() != reference.height() || uut.width() != reference.width() {
        return Err(CoverError::DimensionMismatch {
            left_rows: uut.height(),
            left_cols: uut.width(),
            right_rows: reference.height(),
            right_cols: reference.width(),
        });
    }
    let bits = uut
        .rows()
        .iter()
        .zip(reference.rows())
        .map(|(u, m)| Ok(u.xor(m)?.devectorize()))
        .collect::<Result<Vec<_>, CoverError>>()?;
    Ok(BitVector::from_bits(bits)?)
}
