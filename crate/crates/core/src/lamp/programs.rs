//! Reference microprograms for the table process models, with helpers that
//! load a sequencer, run the program and read back the result.

use crate::assoc::{AssociativeTable, DiagnosisMode};
use crate::vlcore::BitVector;

use super::{assemble, run_sequencer, Program, Reg, SequencerState, SimError, DEFAULT_MAX_STEPS};

pub const FEASIBLE: &str = include_str!("../../programs/feasible.lamp");
pub const DIAGNOSE_SINGLE: &str = include_str!("../../programs/diagnose_single.lamp");
pub const DIAGNOSE_MULTIPLE: &str = include_str!("../../programs/diagnose_multiple.lamp");
pub const COVER: &str = include_str!("../../programs/cover.lamp");
pub const QUALITY: &str = include_str!("../../programs/quality.lamp");
pub const COMPARE: &str = include_str!("../../programs/compare.lamp");

/// Every shipped program with its file name.
pub const ALL: [(&str, &str); 6] = [
    ("feasible.lamp", FEASIBLE),
    ("diagnose_single.lamp", DIAGNOSE_SINGLE),
    ("diagnose_multiple.lamp", DIAGNOSE_MULTIPLE),
    ("cover.lamp", COVER),
    ("quality.lamp", QUALITY),
    ("compare.lamp", COMPARE),
];

fn load(source: &str) -> Program {
    assemble(source).expect("shipped programs assemble")
}

fn run(source: &str, state: SequencerState) -> Result<SequencerState, SimError> {
    run_sequencer(state, &load(source), DEFAULT_MAX_STEPS)
}

/// Feasibility mask (0 = feasible) and the table restricted to the query.
pub fn run_feasible(table: &AssociativeTable, query: &BitVector) -> Result<(BitVector, AssociativeTable), SimError> {
    let state = SequencerState::new(table.clone()).with_reg(Reg::Mb, query)?;
    let out = run(FEASIBLE, state)?;
    Ok((out.reg_prefix(Reg::Ma, table.height()), out.memory().clone()))
}

/// Candidate fault columns for a test response.
pub fn run_diagnose(table: &AssociativeTable, response: &BitVector, mode: DiagnosisMode) -> Result<BitVector, SimError> {
    let source = match mode {
        DiagnosisMode::Single => DIAGNOSE_SINGLE,
        DiagnosisMode::Multiple => DIAGNOSE_MULTIPLE,
    };
    let state = SequencerState::new(table.clone()).with_reg(Reg::Ma, response)?;
    let out = run(source, state)?;
    Ok(out.reg_prefix(Reg::Md, table.width()))
}

/// Greedy row selection `m_a` (one bit per row).
pub fn run_cover(table: &AssociativeTable) -> Result<BitVector, SimError> {
    let out = run(COVER, SequencerState::new(table.clone()))?;
    Ok(out.reg_prefix(Reg::Ma, table.height()))
}

/// Loss vector and its compacted form for `query` against `associator`.
pub fn run_quality(query: &BitVector, associator: &BitVector) -> Result<(BitVector, BitVector), SimError> {
    let table = AssociativeTable::new(vec![associator.clone()])?;
    let state = SequencerState::new(table).with_reg(Reg::Mb, query)?;
    let out = run(QUALITY, state)?;
    let w = associator.len();
    Ok((out.reg_prefix(Reg::Mc, w), out.reg_prefix(Reg::Md, w)))
}

/// `false` selects the first compacted vector, `true` the second.
pub fn run_compare(first: &BitVector, second: &BitVector) -> Result<bool, SimError> {
    let table = AssociativeTable::new(vec![BitVector::zeros(first.len()).expect("length is positive")])?;
    let state = SequencerState::new(table).with_reg(Reg::Ma, first)?.with_reg(Reg::Mb, second)?;
    let out = run(COMPARE, state)?;
    Ok(out.reg(Reg::Md).get(0))
}
