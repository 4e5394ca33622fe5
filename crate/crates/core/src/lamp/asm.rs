//! Line-oriented assembler for sequencer microprograms.
//!
//! ```text
//! ; comment
//! start:  LOADROW ma A[1]
//!         LOOP                ; iterate every table row, A[@] is the current row
//!         AND   mc mb A[@]
//!         DEVOR ma mc @       ; bit @ of ma <- or(mc)
//!         ENDLOOP
//!         HALT
//! ```
//!
//! Row and bit indices are 1-based. `ma[k]` / `ma[@]` is a source operand
//! broadcasting one bit of a register to every coordinate.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{BinaryOp, BitRef, Instruction, Operand, Reg, RowRef, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsmError {
    #[error("empty program")]
    Empty,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown register {name:?}")]
    UnknownRegister { line: usize, name: String },
    #[error("line {line}: {opcode} takes {expected} operand(s), found {found}")]
    BadArity {
        line: usize,
        opcode: String,
        expected: &'static str,
        found: usize,
    },
}

/// An assembled microprogram.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub(super) instructions: Vec<Instruction>,
    pub(super) lines: Vec<usize>,
    labels: BTreeMap<String, usize>,
}

impl Program {
    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Instruction index a label points at.
    pub fn label(&self, name: &str) -> Option<usize> {
        self.labels.get(name).copied()
    }

    /// Source line of instruction `pc`.
    pub fn line_of(&self, pc: usize) -> Option<usize> {
        self.lines.get(pc).copied()
    }
}

pub fn assemble(source: &str) -> Result<Program, AsmError> {
    let mut prog = Program::default();
    let mut open_loop: Option<(usize, usize)> = None;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let syntax = |message: String| AsmError::Syntax { line, message };
        let mut text = raw.split(';').next().unwrap_or("").trim();

        while let Some((head, rest)) = text.split_once(':') {
            let name = head.trim();
            if name.is_empty() || name.contains(char::is_whitespace) || !is_ident(name) {
                break;
            }
            if prog.labels.insert(name.to_string(), prog.instructions.len()).is_some() {
                return Err(syntax(format!("duplicate label {name:?}")));
            }
            text = rest.trim();
        }
        if text.is_empty() {
            continue;
        }

        let mut parts = text.split_whitespace();
        let mnemonic = parts.next().unwrap().to_ascii_uppercase();
        let args: Vec<&str> = parts.collect();
        let in_loop = open_loop.is_some();
        let arity = |expected: &'static str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(AsmError::BadArity {
                    line,
                    opcode: mnemonic.clone(),
                    expected,
                    found: args.len(),
                })
            }
        };
        let operand = |s: &str| parse_operand(s, line, in_loop);
        let reg = |s: &str| parse_reg(s, line);

        let pc = prog.instructions.len();
        let instr = match mnemonic.as_str() {
            "AND" | "OR" | "XOR" => {
                arity("3", args.len() == 3)?;
                let op = match mnemonic.as_str() {
                    "AND" => BinaryOp::And,
                    "OR" => BinaryOp::Or,
                    _ => BinaryOp::Xor,
                };
                let (a, b) = (operand(args[1])?, operand(args[2])?);
                if matches!(a, Operand::Row(_)) && matches!(b, Operand::Row(_)) {
                    return Err(syntax("at most one table-row operand per instruction".into()));
                }
                Instruction::Binary {
                    op,
                    dst: reg(args[0])?,
                    a,
                    b,
                }
            }
            "NOT" | "SLC" => {
                arity("2", args.len() == 2)?;
                let op = if mnemonic == "NOT" { UnaryOp::Not } else { UnaryOp::Slc };
                Instruction::Unary {
                    op,
                    dst: reg(args[0])?,
                    src: operand(args[1])?,
                }
            }
            "NOP" => {
                arity("0 to 2", args.len() <= 2)?;
                match args[..] {
                    [] => Instruction::Idle,
                    [d] => {
                        let dst = reg(d)?;
                        Instruction::Unary {
                            op: UnaryOp::Nop,
                            dst,
                            src: Operand::Reg(dst),
                        }
                    }
                    _ => Instruction::Unary {
                        op: UnaryOp::Nop,
                        dst: reg(args[0])?,
                        src: operand(args[1])?,
                    },
                }
            }
            "LOADROW" => {
                arity("2", args.len() == 2)?;
                Instruction::LoadRow {
                    dst: reg(args[0])?,
                    row: parse_row(args[1], line, in_loop)?,
                }
            }
            "STOREROW" => {
                arity("2", args.len() == 2)?;
                Instruction::StoreRow {
                    row: parse_row(args[0], line, in_loop)?,
                    src: reg(args[1])?,
                }
            }
            "DEVOR" => {
                arity("3", args.len() == 3)?;
                Instruction::Devor {
                    dst: reg(args[0])?,
                    src: operand(args[1])?,
                    bit: parse_index(args[2], line, in_loop)?,
                }
            }
            "SETALL" | "CLRALL" => {
                arity("1", args.len() == 1)?;
                let r = reg(args[0])?;
                if mnemonic == "SETALL" {
                    Instruction::SetAll(r)
                } else {
                    Instruction::ClrAll(r)
                }
            }
            "LOOP" => {
                arity("0 or 1", args.len() <= 1)?;
                if open_loop.is_some() {
                    return Err(syntax("loops cannot nest".into()));
                }
                let count = match args.first() {
                    None => None,
                    Some(s) => Some(s.parse::<usize>().map_err(|_| syntax(format!("bad loop count {s:?}")))?),
                };
                open_loop = Some((pc, line));
                // end is patched at ENDLOOP
                Instruction::Loop { count, end: 0 }
            }
            "ENDLOOP" => {
                arity("0", args.is_empty())?;
                let (start, _) = open_loop.take().ok_or_else(|| syntax("ENDLOOP without LOOP".into()))?;
                if let Instruction::Loop { end, .. } = &mut prog.instructions[start] {
                    *end = pc;
                }
                Instruction::EndLoop { start }
            }
            "HALT" => {
                arity("0", args.is_empty())?;
                Instruction::Halt
            }
            other => return Err(syntax(format!("unknown opcode {other:?}"))),
        };
        prog.instructions.push(instr);
        prog.lines.push(line);
    }

    if let Some((_, line)) = open_loop {
        return Err(AsmError::Syntax {
            line,
            message: "LOOP without ENDLOOP".into(),
        });
    }
    if prog.instructions.is_empty() {
        return Err(AsmError::Empty);
    }
    Ok(prog)
}

fn is_ident(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn parse_reg(s: &str, line: usize) -> Result<Reg, AsmError> {
    match s.to_ascii_lowercase().as_str() {
        "ma" => Ok(Reg::Ma),
        "mb" => Ok(Reg::Mb),
        "mc" => Ok(Reg::Mc),
        "md" => Ok(Reg::Md),
        _ => Err(AsmError::UnknownRegister {
            line,
            name: s.to_string(),
        }),
    }
}

fn parse_index(s: &str, line: usize, in_loop: bool) -> Result<BitRef, AsmError> {
    if s == "@" {
        return if in_loop {
            Ok(BitRef::Loop)
        } else {
            Err(AsmError::Syntax {
                line,
                message: "loop index @ used outside a loop".into(),
            })
        };
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(BitRef::Fixed(k - 1)),
        _ => Err(AsmError::Syntax {
            line,
            message: format!("bad index {s:?}, expected a 1-based number or @"),
        }),
    }
}

/// Splits `name[idx]` into its parts.
fn split_indexed(s: &str) -> Option<(&str, &str)> {
    let open = s.find('[')?;
    let inner = s[open + 1..].strip_suffix(']')?;
    Some((&s[..open], inner))
}

fn parse_row(s: &str, line: usize, in_loop: bool) -> Result<RowRef, AsmError> {
    match split_indexed(s) {
        Some(("A" | "a", idx)) => Ok(match parse_index(idx, line, in_loop)? {
            BitRef::Fixed(i) => RowRef::Fixed(i),
            BitRef::Loop => RowRef::Loop,
        }),
        _ => Err(AsmError::Syntax {
            line,
            message: format!("expected a table row A[k] or A[@], got {s:?}"),
        }),
    }
}

fn parse_operand(s: &str, line: usize, in_loop: bool) -> Result<Operand, AsmError> {
    match split_indexed(s) {
        None => Ok(Operand::Reg(parse_reg(s, line)?)),
        Some(("A" | "a", _)) => Ok(Operand::Row(parse_row(s, line, in_loop)?)),
        Some((name, idx)) => Ok(Operand::Bit(parse_reg(name, line)?, parse_index(idx, line, in_loop)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_binary_instruction() {
        let p = assemble("XOR md ma mb").unwrap();
        assert_eq!(
            p.instructions(),
            &[Instruction::Binary {
                op: BinaryOp::Xor,
                dst: Reg::Md,
                a: Operand::Reg(Reg::Ma),
                b: Operand::Reg(Reg::Mb)
            }]
        );
    }

    #[test]
    fn nop_forms() {
        let p = assemble("NOP\nNOP ma\nnop mb A[2]").unwrap();
        assert_eq!(p.instructions()[0], Instruction::Idle);
        assert_eq!(
            p.instructions()[1],
            Instruction::Unary {
                op: UnaryOp::Nop,
                dst: Reg::Ma,
                src: Operand::Reg(Reg::Ma)
            }
        );
        assert_eq!(
            p.instructions()[2],
            Instruction::Unary {
                op: UnaryOp::Nop,
                dst: Reg::Mb,
                src: Operand::Row(RowRef::Fixed(1))
            }
        );
    }

    #[test]
    fn labels_and_comments() {
        let p = assemble("; header\nstart: SETALL ma ; all ones\n\nend:\n  HALT\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.label("start"), Some(0));
        assert_eq!(p.label("end"), Some(1));
        assert_eq!(p.line_of(1), Some(5));
        assert!(matches!(assemble("a: HALT\na: HALT"), Err(AsmError::Syntax { line: 2, .. })));
    }

    #[test]
    fn loops_are_linked() {
        let p = assemble("LOOP\n DEVOR ma A[@] @\nENDLOOP\nLOOP 3\nENDLOOP").unwrap();
        assert_eq!(p.instructions()[0], Instruction::Loop { count: None, end: 2 });
        assert_eq!(p.instructions()[2], Instruction::EndLoop { start: 0 });
        assert_eq!(p.instructions()[3], Instruction::Loop { count: Some(3), end: 4 });
    }

    #[test]
    fn static_errors() {
        assert_eq!(assemble("  ; nothing\n"), Err(AsmError::Empty));
        assert_eq!(
            assemble("HALT\nXOR me ma mb"),
            Err(AsmError::UnknownRegister { line: 2, name: "me".into() })
        );
        assert!(matches!(
            assemble("AND ma mb"),
            Err(AsmError::BadArity { line: 1, expected: "3", found: 2, .. })
        ));
        assert!(matches!(assemble("FOO ma"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("LOOP\nLOOP\nENDLOOP\nENDLOOP"), Err(AsmError::Syntax { line: 2, .. })));
        assert!(matches!(assemble("ENDLOOP"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("LOOP\nHALT"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("LOADROW ma A[@]"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("LOADROW ma A[0]"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("LOADROW ma mb"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("AND ma A[1] A[2]"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("DEVOR ma mb x"), Err(AsmError::Syntax { line: 1, .. })));
        assert!(matches!(assemble("HALT ma"), Err(AsmError::BadArity { .. })));
    }
}
