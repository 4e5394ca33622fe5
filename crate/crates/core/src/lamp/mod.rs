//! Simulator of the logic associative multiprocessor: a sequencer holding an
//! associative data memory and four vector registers `ma..md`, driven by a
//! small vector-logic instruction set, and a 4x4 grid of such sequencers.
//!
//! Registers are `max(width, height)` coordinates wide so they can hold both
//! a table row and a one-bit-per-row result. Rows are zero-extended when
//! read into a register and truncated when stored back.

mod asm;
mod grid;
pub mod programs;

pub use asm::{assemble, AsmError, Program};
pub use grid::{run_grid, CellFailure, GridError, GridState, GRID_SIDE};

use std::fmt;

use thiserror::Error;

use crate::assoc::{AssociativeTable, TableError};
use crate::vlcore::{BitVector, VectorError};

/// Default guard against programs that never halt.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reg {
    Ma,
    Mb,
    Mc,
    Md,
}

impl Reg {
    pub const ALL: [Reg; 4] = [Reg::Ma, Reg::Mb, Reg::Mc, Reg::Md];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reg::Ma => "ma",
            Reg::Mb => "mb",
            Reg::Mc => "mc",
            Reg::Md => "md",
        })
    }
}

impl std::str::FromStr for Reg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Reg::ALL
            .into_iter()
            .find(|r| r.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown register {s:?}"))
    }
}

/// A table row, fixed (0-based) or bound to the loop index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRef {
    Fixed(usize),
    Loop,
}

/// A coordinate index, fixed (0-based) or bound to the loop index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitRef {
    Fixed(usize),
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Reg(Reg),
    Row(RowRef),
    /// One register bit copied to every coordinate.
    Bit(Reg, BitRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Slc,
    Nop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Opcode {
    And,
    Or,
    Xor,
    Not,
    Slc,
    Nop,
    LoadRow,
    StoreRow,
    Devor,
    SetAll,
    ClrAll,
    Loop,
    EndLoop,
    Halt,
}

impl Opcode {
    pub const ALL: [Opcode; 14] = [
        Opcode::And,
        Opcode::Or,
        Opcode::Xor,
        Opcode::Not,
        Opcode::Slc,
        Opcode::Nop,
        Opcode::LoadRow,
        Opcode::StoreRow,
        Opcode::Devor,
        Opcode::SetAll,
        Opcode::ClrAll,
        Opcode::Loop,
        Opcode::EndLoop,
        Opcode::Halt,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    Binary { op: BinaryOp, dst: Reg, a: Operand, b: Operand },
    Unary { op: UnaryOp, dst: Reg, src: Operand },
    /// `NOP` with no operands.
    Idle,
    LoadRow { dst: Reg, row: RowRef },
    StoreRow { row: RowRef, src: Reg },
    /// `dst[bit] <- or(src)`
    Devor { dst: Reg, src: Operand, bit: BitRef },
    SetAll(Reg),
    ClrAll(Reg),
    /// Runs the body `count` times (every table row when `None`); `end` is
    /// the index of the matching `ENDLOOP`.
    Loop { count: Option<usize>, end: usize },
    EndLoop { start: usize },
    Halt,
}

impl Instruction {
    pub fn opcode(&self) -> Opcode {
        match self {
            Instruction::Binary { op, .. } => match op {
                BinaryOp::And => Opcode::And,
                BinaryOp::Or => Opcode::Or,
                BinaryOp::Xor => Opcode::Xor,
            },
            Instruction::Unary { op, .. } => match op {
                UnaryOp::Not => Opcode::Not,
                UnaryOp::Slc => Opcode::Slc,
                UnaryOp::Nop => Opcode::Nop,
            },
            Instruction::Idle => Opcode::Nop,
            Instruction::LoadRow { .. } => Opcode::LoadRow,
            Instruction::StoreRow { .. } => Opcode::StoreRow,
            Instruction::Devor { .. } => Opcode::Devor,
            Instruction::SetAll(_) => Opcode::SetAll,
            Instruction::ClrAll(_) => Opcode::ClrAll,
            Instruction::Loop { .. } => Opcode::Loop,
            Instruction::EndLoop { .. } => Opcode::EndLoop,
            Instruction::Halt => Opcode::Halt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("step limit of {limit} exceeded")]
    StepLimitExceeded { limit: u64 },
    #[error("line {line}: row {row} out of range, table has {height} rows")]
    RowOutOfRange { line: usize, row: usize, height: usize },
    #[error("line {line}: bit {bit} out of range, registers have {width} coordinates")]
    BitOutOfRange { line: usize, bit: usize, width: usize },
    #[error("register {reg} value has {len} coordinates, registers hold {width}")]
    RegisterTooWide { reg: Reg, len: usize, width: usize },
    #[error("line {line}: {message}")]
    Data { line: usize, message: String },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Asm(#[from] AsmError),
}

/// One sequencer: data memory, registers, program counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencerState {
    memory: AssociativeTable,
    regs: [BitVector; 4],
    pub pc: usize,
    pub halted: bool,
    pub steps: u64,
}

impl SequencerState {
    /// Fresh sequencer with zeroed registers.
    pub fn new(memory: AssociativeTable) -> Self {
        let width = memory.width().max(memory.height());
        let zero = BitVector::zeros(width).expect("table dimensions are valid");
        Self {
            memory,
            regs: [zero.clone(), zero.clone(), zero.clone(), zero],
            pc: 0,
            halted: false,
            steps: 0,
        }
    }

    /// Register width: `max(table width, table height)`.
    pub fn width(&self) -> usize {
        self.regs[0].len()
    }

    pub fn memory(&self) -> &AssociativeTable {
        &self.memory
    }

    pub fn reg(&self, r: Reg) -> &BitVector {
        &self.regs[r.index()]
    }

    /// The first `len` coordinates of a register.
    pub fn reg_prefix(&self, r: Reg, len: usize) -> BitVector {
        self.regs[r.index()].resized(len).expect("prefix length is positive")
    }

    /// Loads a register, zero-extending shorter values.
    pub fn set_reg(&mut self, r: Reg, value: &BitVector) -> Result<(), SimError> {
        if value.len() > self.width() {
            return Err(SimError::RegisterTooWide {
                reg: r,
                len: value.len(),
                width: self.width(),
            });
        }
        self.regs[r.index()] = value.resized(self.width()).expect("width is positive");
        Ok(())
    }

    pub fn with_reg(mut self, r: Reg, value: &BitVector) -> Result<Self, SimError> {
        self.set_reg(r, value)?;
        Ok(self)
    }

    /// Parses a data file: a table in the associative-table text format,
    /// optionally followed by a `#regs` section of `<reg> <bits>` lines.
    pub fn load(text: &str) -> Result<Self, SimError> {
        let mut table_part = String::new();
        let mut reg_lines = Vec::new();
        let mut in_regs = false;
        for (i, line) in text.lines().enumerate() {
            if line.trim() == "#regs" {
                in_regs = true;
            } else if in_regs {
                reg_lines.push((i + 1, line.trim()));
            } else {
                table_part.push_str(line);
                table_part.push('\n');
            }
        }
        let mut state = SequencerState::new(table_part.parse()?);
        for (line, text) in reg_lines {
            if text.is_empty() {
                continue;
            }
            let data = |message: String| SimError::Data { line, message };
            let (name, bits) = text
                .split_once(char::is_whitespace)
                .ok_or_else(|| data(format!("expected `<reg> <bits>`, got {text:?}")))?;
            let reg: Reg = name.parse().map_err(data)?;
            let value: BitVector = bits.trim().parse().map_err(|e: VectorError| data(e.to_string()))?;
            state.set_reg(reg, &value)?;
        }
        Ok(state)
    }

    fn row_index(&self, row: RowRef, loop_index: Option<usize>, line: usize) -> Result<usize, SimError> {
        let i = match row {
            RowRef::Fixed(i) => i,
            RowRef::Loop => loop_index.expect("assembler rejects @ outside loops"),
        };
        if i >= self.memory.height() {
            return Err(SimError::RowOutOfRange {
                line,
                row: i + 1,
                height: self.memory.height(),
            });
        }
        Ok(i)
    }

    fn bit_index(&self, bit: BitRef, loop_index: Option<usize>, line: usize) -> Result<usize, SimError> {
        let i = match bit {
            BitRef::Fixed(i) => i,
            BitRef::Loop => loop_index.expect("assembler rejects @ outside loops"),
        };
        if i >= self.width() {
            return Err(SimError::BitOutOfRange {
                line,
                bit: i + 1,
                width: self.width(),
            });
        }
        Ok(i)
    }

    fn read(&self, op: Operand, loop_index: Option<usize>, line: usize) -> Result<BitVector, SimError> {
        let w = self.width();
        Ok(match op {
            Operand::Reg(r) => self.regs[r.index()].clone(),
            Operand::Row(row) => {
                let i = self.row_index(row, loop_index, line)?;
                self.memory.row(i).resized(w).expect("width is positive")
            }
            Operand::Bit(r, bit) => {
                let i = self.bit_index(bit, loop_index, line)?;
                if self.regs[r.index()].get(i) {
                    BitVector::ones(w).expect("width is positive")
                } else {
                    BitVector::zeros(w).expect("width is positive")
                }
            }
        })
    }
}

struct LoopFrame {
    index: usize,
    count: usize,
}

/// Executes `prog` until `HALT`, the end of the program, or `max_steps`
/// executed instructions. A halted state is returned unchanged.
pub fn run_sequencer(mut state: SequencerState, prog: &Program, max_steps: u64) -> Result<SequencerState, SimError> {
    let mut frame: Option<LoopFrame> = None;
    while !state.halted {
        let Some(&instr) = prog.instructions.get(state.pc) else {
            state.halted = true;
            break;
        };
        if state.steps >= max_steps {
            return Err(SimError::StepLimitExceeded { limit: max_steps });
        }
        state.steps += 1;
        let line = prog.lines[state.pc];
        let li = frame.as_ref().map(|f| f.index);
        let mut next = state.pc + 1;
        match instr {
            Instruction::Binary { op, dst, a, b } => {
                let (a, b) = (state.read(a, li, line)?, state.read(b, li, line)?);
                let v = match op {
                    BinaryOp::And => a.and(&b),
                    BinaryOp::Or => a.or(&b),
                    BinaryOp::Xor => a.xor(&b),
                }
                .expect("operands share the register width");
                state.regs[dst.index()] = v;
            }
            Instruction::Unary { op, dst, src } => {
                let v = state.read(src, li, line)?;
                state.regs[dst.index()] = match op {
                    UnaryOp::Not => v.not(),
                    UnaryOp::Slc => v.slc(),
                    UnaryOp::Nop => v,
                };
            }
            Instruction::Idle => {}
            Instruction::LoadRow { dst, row } => {
                state.regs[dst.index()] = state.read(Operand::Row(row), li, line)?;
            }
            Instruction::StoreRow { row, src } => {
                let i = state.row_index(row, li, line)?;
                let w = state.memory.width();
                let v = state.regs[src.index()].resized(w).expect("width is positive");
                state.memory.set_row(i, v)?;
            }
            Instruction::Devor { dst, src, bit } => {
                let b = state.read(src, li, line)?.devectorize();
                let i = state.bit_index(bit, li, line)?;
                state.regs[dst.index()].set(i, b);
            }
            Instruction::SetAll(r) => {
                state.regs[r.index()] = BitVector::ones(state.width()).expect("width is positive");
            }
            Instruction::ClrAll(r) => {
                state.regs[r.index()] = BitVector::zeros(state.width()).expect("width is positive");
            }
            Instruction::Loop { count, end } => {
                let count = count.unwrap_or(state.memory.height());
                if count == 0 {
                    next = end + 1;
                } else {
                    frame = Some(LoopFrame { index: 0, count });
                }
            }
            Instruction::EndLoop { start } => {
                let f = frame.as_mut().expect("ENDLOOP is only reached inside its loop");
                f.index += 1;
                if f.index < f.count {
                    next = start + 1;
                } else {
                    frame = None;
                }
            }
            Instruction::Halt => {
                state.halted = true;
                break;
            }
        }
        state.pc = next;
    }
    Ok(state)
}
