//! Associative tables and the row-analysis process models over them:
//! feasible-solution masking, fault diagnosis and best-match search.
//!
//! Tables are stored row-major. In diagnosis tables rows are tests and
//! columns are faults; an entry of 1 means the test detects the fault.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::metric::{better_of, compact_quality, quality_vector, Choice, CompactedQuality};
use crate::vlcore::{BitVector, TernaryVector, VectorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("table has no rows")]
    Empty,
    #[error("row {row} has width {found}, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("{kind} labels: expected {expected}, found {found}")]
    LabelCount {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Vector(#[from] VectorError),
}

fn check_labels(kind: &'static str, labels: &[String], expected: usize) -> Result<(), TableError> {
    if labels.len() != expected {
        return Err(TableError::LabelCount {
            kind,
            expected,
            found: labels.len(),
        });
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(TableError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// An ordered list of equal-width binary rows with optional row and column names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociativeTable {
    rows: Vec<BitVector>,
    width: usize,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl AssociativeTable {
    pub fn new(rows: Vec<BitVector>) -> Result<Self, TableError> {
        let width = rows.first().ok_or(TableError::Empty)?.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(TableError::RaggedRow {
                    row: i + 1,
                    expected: width,
                    found: r.len(),
                });
            }
        }
        Ok(Self {
            rows,
            width,
            row_labels: None,
            col_labels: None,
        })
    }

    /// Parses rows written as `{0,1}` strings.
    pub fn from_strs<S: AsRef<str>>(rows: &[S]) -> Result<Self, TableError> {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().parse::<BitVector>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<Self, TableError> {
        check_labels("row", &labels, self.height())?;
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn with_col_labels(mut self, labels: Vec<String>) -> Result<Self, TableError> {
        check_labels("column", &labels, self.width)?;
        self.col_labels = Some(labels);
        Ok(self)
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    /// Name of row `i` (0-based): its label, or its 1-based number.
    pub fn row_name(&self, i: usize) -> String {
        match &self.row_labels {
            Some(l) => l[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn col_name(&self, j: usize) -> String {
        match &self.col_labels {
            Some(l) => l[j].clone(),
            None => (j + 1).to_string(),
        }
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bits(self.rows.iter().map(|r| r.get(j))).expect("table has rows")
    }

    /// Replaces row `i` (0-based) with a vector of the table width.
    pub fn set_row(&mut self, i: usize, row: BitVector) -> Result<(), TableError> {
        if row.len() != self.width {
            return Err(VectorError::LengthMismatch {
                left: self.width,
                right: row.len(),
            }
            .into());
        }
        self.rows[i] = row;
        Ok(())
    }

    fn check_width(&self, v: &BitVector) -> Result<(), VectorError> {
        if v.len() == self.width {
            Ok(())
        } else {
            Err(VectorError::LengthMismatch {
                left: self.width,
                right: v.len(),
            })
        }
    }

    /// Renders the table in its text file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.height(), self.width);
        for r in &self.rows {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        if self.row_labels.is_some() || self.col_labels.is_some() {
            out.push_str("#labels\n");
            if let Some(l) = &self.row_labels {
                out.push_str(&format!("rows: {}\n", l.join(" ")));
            }
            if let Some(l) = &self.col_labels {
                out.push_str(&format!("cols: {}\n", l.join(" ")));
            }
        }
        out
    }
}

impl FromStr for AssociativeTable {
    type Err = TableError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let raw = TableText::parse(text)?;
        let rows = raw
            .rows
            .iter()
            .map(|(line, s)| {
                s.parse::<BitVector>().map_err(|e| match e {
                    VectorError::InvalidSymbol { position, symbol } => TableError::Parse {
                        line: *line,
                        column: Some(position),
                        message: format!("invalid symbol {symbol:?}, expected 0 or 1"),
                    },
                    other => other.into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        raw.finish(Self::new(rows)?)
    }
}

/// Ternary counterpart of [`AssociativeTable`], used where `x` is legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryTable {
    pub rows: Vec<TernaryVector>,
    pub row_labels: Option<Vec<String>>,
}

impl TernaryTable {
    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row_name(&self, i: usize) -> String {
        match &self.row_labels {
            Some(l) => l[i].clone(),
            None => (i + 1).to_string(),
        }
    }
}

impl FromStr for TernaryTable {
    type Err = TableError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let raw = TableText::parse(text)?;
        let rows = raw
            .rows
            .iter()
            .map(|(line, s)| {
                s.parse::<TernaryVector>().map_err(|e| match e {
                    VectorError::InvalidSymbol { position, symbol } => TableError::Parse {
                        line: *line,
                        column: Some(position),
                        message: format!("invalid symbol {symbol:?}, expected 0, 1 or x"),
                    },
                    other => other.into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(l) = &raw.row_labels {
            check_labels("row", l, rows.len())?;
        }
        if let Some(l) = &raw.col_labels {
            check_labels("column", l, raw.width)?;
        }
        Ok(Self {
            rows,
            row_labels: raw.row_labels,
        })
    }
}

/// Line-level view of a table file: `n w` header, `n` rows of `w` symbols,
/// then an optional `#labels` trailer with `rows:` and `cols:` lines.
struct TableText {
    width: usize,
    rows: Vec<(usize, String)>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl TableText {
    fn parse(text: &str) -> Result<Self, TableError> {
        let perr = |line: usize, message: String| TableError::Parse {
            line,
            column: None,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing `n w` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| perr(hline, format!("bad header {header:?}, expected `n w`")))?;
        let [height, width] = dims[..] else {
            return Err(perr(hline, format!("bad header {header:?}, expected `n w`")));
        };
        if height == 0 || width == 0 {
            return Err(perr(hline, "table dimensions must be positive".into()));
        }

        let mut rows = Vec::with_capacity(height);
        for _ in 0..height {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| perr(text.lines().count(), format!("expected {height} rows, found {}", rows.len())))?;
            if row.starts_with('#') {
                return Err(perr(ln, format!("expected {height} rows, found {}", rows.len())));
            }
            let found = row.chars().count();
            if found != width {
                return Err(perr(ln, format!("row has {found} symbols, expected {width}")));
            }
            rows.push((ln, row.to_string()));
        }

        let mut row_labels = None;
        let mut col_labels = None;
        if let Some((ln, marker)) = lines.next() {
            if marker != "#labels" {
                return Err(perr(ln, format!("unexpected line {marker:?} after {height} rows")));
            }
            for (ln, line) in lines {
                let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
                let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
                match key.trim_end_matches(':') {
                    "rows" => row_labels = Some(names),
                    "cols" => col_labels = Some(names),
                    other => return Err(perr(ln, format!("unknown label key {other:?}"))),
                }
            }
        }
        Ok(Self {
            width,
            rows,
            row_labels,
            col_labels,
        })
    }

    fn finish(self, mut table: AssociativeTable) -> Result<AssociativeTable, TableError> {
        if let Some(l) = self.row_labels {
            table = table.with_row_labels(l)?;
        }
        if let Some(l) = self.col_labels {
            table = table.with_col_labels(l)?;
        }
        Ok(table)
    }
}

/// One bit per row: `or((m_b and A_i) xor m_b)`.
///
/// A 0 marks a feasible row (the query is contained in it), a 1 a
/// contradictory one.
pub fn feasible_mask(table: &AssociativeTable, query: &BitVector) -> Result<BitVector, VectorError> {
    table.check_width(query)?;
    let bits = table
        .rows
        .iter()
        .map(|row| Ok(query.and(row)?.xor(query)?.devectorize()))
        .collect::<Result<Vec<_>, VectorError>>()?;
    BitVector::from_bits(bits)
}

/// Masks every row with the query, dropping coordinates the query ignores.
pub fn restrict(table: &AssociativeTable, query: &BitVector) -> Result<AssociativeTable, VectorError> {
    table.check_width(query)?;
    let rows = table
        .rows
        .iter()
        .map(|row| query.and(row))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AssociativeTable {
        rows,
        width: table.width,
        row_labels: table.row_labels.clone(),
        col_labels: table.col_labels.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosisMode {
    Single,
    Multiple,
}

impl fmt::Display for DiagnosisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosisMode::Single => "single",
            DiagnosisMode::Multiple => "multiple",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosisResult {
    /// One bit per fault column; 1 marks a candidate.
    pub candidates: BitVector,
    pub mode: DiagnosisMode,
    /// False when no column explains the response.
    pub consistent: bool,
}

/// Locates faults from a test response (bit i = 1: test i failed).
///
/// Failing rows are folded into one accumulator (AND for single faults,
/// OR for multiple), passing rows are ORed into another, and the result is
/// `failing and not passing`.
pub fn diagnose(
    table: &AssociativeTable,
    response: &BitVector,
    mode: DiagnosisMode,
) -> Result<DiagnosisResult, VectorError> {
    if response.len() != table.height() {
        return Err(VectorError::LengthMismatch {
            left: table.height(),
            right: response.len(),
        });
    }
    let w = table.width;
    let mut failing = match mode {
        DiagnosisMode::Single => BitVector::ones(w)?,
        DiagnosisMode::Multiple => BitVector::zeros(w)?,
    };
    let mut passing = BitVector::zeros(w)?;
    for (i, row) in table.rows.iter().enumerate() {
        if response.get(i) {
            failing = match mode {
                DiagnosisMode::Single => failing.and(row)?,
                DiagnosisMode::Multiple => failing.or(row)?,
            };
        } else {
            passing.or_assign(row)?;
        }
    }
    let candidates = failing.and(&passing.not())?;
    let consistent = candidates.devectorize();
    Ok(DiagnosisResult {
        candidates,
        mode,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestMatch {
    /// 0-based indices of every row reaching the best quality, ascending.
    pub rows: Vec<usize>,
    pub quality: CompactedQuality,
}

/// Rows whose vector criterion against the query is minimal. Rows are ranked
/// only through [`better_of`].
pub fn best_match(query: &BitVector, table: &AssociativeTable) -> Result<BestMatch, VectorError> {
    table.check_width(query)?;
    let graded = table
        .rows
        .par_iter()
        .map(|row| Ok(compact_quality(&quality_vector(query, row)?)))
        .collect::<Result<Vec<_>, VectorError>>()?;

    let mut best = vec![0];
    for (i, q) in graded.iter().enumerate().skip(1) {
        let current = &graded[best[0]];
        let not_worse = better_of(q, current)? == Choice::First;
        let not_better = better_of(current, q)? == Choice::First;
        match (not_worse, not_better) {
            (true, true) => best.push(i),
            (true, false) => best = vec![i],
            _ => {}
        }
    }
    let quality = graded[best[0]].clone();
    Ok(BestMatch { rows: best, quality })
}

/// Runs [`best_match`] against each table independently.
pub fn best_match_each(query: &BitVector, tables: &[AssociativeTable]) -> Result<Vec<BestMatch>, VectorError> {
    tables.iter().map(|t| best_match(query, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn table(rows: &[&str]) -> AssociativeTable {
        AssociativeTable::from_strs(rows).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert_eq!(AssociativeTable::new(vec![]), Err(TableError::Empty));
        assert_eq!(
            AssociativeTable::from_strs(&["10", "101"]),
            Err(TableError::RaggedRow { row: 2, expected: 2, found: 3 })
        );
        let t = table(&["10", "01"]);
        assert!(matches!(
            t.clone().with_row_labels(vec!["a".into()]),
            Err(TableError::LabelCount { .. })
        ));
        assert_eq!(
            t.with_col_labels(vec!["f".into(), "f".into()]),
            Err(TableError::DuplicateLabel("f".into()))
        );
    }

    #[test]
    fn parse_with_labels() {
        let text = "3 3\n110\n011\n100\n#labels\nrows: t1 t2 t3\ncols: f1 f2 f3\n";
        let t: AssociativeTable = text.parse().unwrap();
        assert_eq!(t.height(), 3);
        assert_eq!(t.row_name(1), "t2");
        assert_eq!(t.col_name(2), "f3");
        assert_eq!(t.to_text().parse::<AssociativeTable>().unwrap(), t);
    }

    #[test]
    fn parse_errors_name_the_position() {
        let err = "2 3\n101\n121\n".parse::<AssociativeTable>().unwrap_err();
        assert_eq!(
            err,
            TableError::Parse {
                line: 3,
                column: Some(2),
                message: "invalid symbol '2', expected 0 or 1".into()
            }
        );
        assert!(err.to_string().contains("line 3, column 2"));
        assert!(matches!("2 3\n101\n".parse::<AssociativeTable>(), Err(TableError::Parse { .. })));
        assert!(matches!("1 3\n1011\n".parse::<AssociativeTable>(), Err(TableError::Parse { line: 2, .. })));
        assert!(matches!("x 3\n101\n".parse::<AssociativeTable>(), Err(TableError::Parse { line: 1, .. })));
        assert!(matches!("1 3\n101\nextra\n".parse::<AssociativeTable>(), Err(TableError::Parse { line: 3, .. })));
        assert!("1 3\n1x1\n".parse::<AssociativeTable>().is_err());
        let tt: TernaryTable = "1 3\n1x1\n".parse().unwrap();
        assert_eq!(tt.rows[0].xcount(), 1);
    }

    #[test]
    fn feasible_mask_examples() {
        let t = table(&["1100", "1111", "0011"]);
        assert_eq!(feasible_mask(&t, &bv("1100")).unwrap(), bv("001"));
        assert_eq!(feasible_mask(&t, &bv("0000")).unwrap(), bv("000"));
        assert_eq!(feasible_mask(&t, &bv("0011")).unwrap(), bv("100"));
        assert!(feasible_mask(&t, &bv("11")).is_err());
    }

    #[test]
    fn feasible_mask_is_containment_exhaustive() {
        for w in 1..=4usize {
            let all: Vec<BitVector> = (0u32..1 << w)
                .map(|x| BitVector::from_bits((0..w).map(|i| x >> i & 1 == 1)).unwrap())
                .collect();
            let t = AssociativeTable::new(all.clone()).unwrap();
            for q in &all {
                let mask = feasible_mask(&t, q).unwrap();
                for (i, row) in all.iter().enumerate() {
                    let contained = q.iter().zip(row.iter()).all(|(a, b)| !a || b);
                    assert_eq!(!mask.get(i), contained);
                }
            }
        }
    }

    #[test]
    fn restrict_examples() {
        let t = table(&["1100", "1111"]);
        assert_eq!(restrict(&t, &bv("1010")).unwrap(), table(&["1000", "1010"]));
        assert_eq!(restrict(&t, &bv("1111")).unwrap(), t);
        assert_eq!(restrict(&t, &bv("0000")).unwrap(), table(&["0000", "0000"]));
    }

    #[test]
    fn diagnose_examples() {
        let t = table(&["110", "011", "100"]);
        let single = diagnose(&t, &bv("110"), DiagnosisMode::Single).unwrap();
        assert_eq!(single.candidates, bv("010"));
        assert!(single.consistent);

        let t2 = table(&["110", "011", "010"]);
        let none = diagnose(&t2, &bv("110"), DiagnosisMode::Single).unwrap();
        assert_eq!(none.candidates, bv("000"));
        assert!(!none.consistent);

        let multi = diagnose(&t, &bv("110"), DiagnosisMode::Multiple).unwrap();
        assert_eq!(multi.candidates, bv("011"));

        // nothing failed: only faults no test can see remain
        let quiet = diagnose(&table(&["100", "010"]), &bv("00"), DiagnosisMode::Single).unwrap();
        assert_eq!(quiet.candidates, bv("001"));

        assert!(diagnose(&t, &bv("11"), DiagnosisMode::Single).is_err());
    }

    #[test]
    fn best_match_examples() {
        let t = table(&["0101", "0011", "1100", "1110"]);
        let exact = best_match(&bv("1100"), &t).unwrap();
        assert_eq!(exact.rows, vec![2]);
        assert_eq!(exact.quality.ones, 0);
        assert_eq!(exact.quality.to_string(), "(0/4)");

        let t = table(&["0000", "1100", "1110"]);
        assert_eq!(best_match(&bv("1100"), &t).unwrap().rows, vec![1]);

        let t = table(&["0011", "0111"]);
        let m = best_match(&bv("1100"), &t).unwrap();
        assert_eq!(m.rows, vec![1]);
        assert_eq!(m.quality.ones, 3);

        let tie = table(&["1000", "0100", "1100"]);
        assert_eq!(best_match(&bv("0000"), &tie).unwrap().rows, vec![0, 1]);
    }

    #[test]
    fn best_match_each_table() {
        let a = table(&["11", "00"]);
        let b = table(&["01", "10", "11"]);
        let out = best_match_each(&bv("11"), &[a, b]).unwrap();
        assert_eq!(out[0].rows, vec![0]);
        assert_eq!(out[1].rows, vec![2]);
    }
}
