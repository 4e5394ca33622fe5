//! Fixed-length binary and ternary vectors.
//!
//! Coordinates are numbered left to right. Textual forms are contiguous
//! strings over `{0,1}` (binary) or `{0,1,x}` (ternary), leftmost character
//! first, e.g. `110x01`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported vector length.
pub const MAX_LEN: usize = 1 << 16;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VectorError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{kind} takes {expected} operand(s)")]
    Arity {
        kind: LogicKind,
        expected: usize,
    },
    #[error("empty input")]
    EmptyInput,
    #[error("vector length {0} exceeds the {MAX_LEN}-coordinate limit")]
    TooLong(usize),
    #[error("invalid symbol {symbol:?} at coordinate {position}")]
    InvalidSymbol { position: usize, symbol: char },
    #[error("need at least {required} points, got {got}")]
    TooFewPoints { required: usize, got: usize },
}

fn check_len(len: usize) -> Result<(), VectorError> {
    if len == 0 {
        Err(VectorError::EmptyInput)
    } else if len > MAX_LEN {
        Err(VectorError::TooLong(len))
    } else {
        Ok(())
    }
}

/// A binary vector of fixed length, packed 64 coordinates per word.
///
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Result<Self, VectorError> {
        check_len(len)?;
        Ok(Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        })
    }

    pub fn ones(len: usize) -> Result<Self, VectorError> {
        let mut v = Self::zeros(len)?;
        v.words.iter_mut().for_each(|w| *w = !0);
        v.clear_tail();
        Ok(v)
    }

    /// Builds a vector from bits in coordinate order.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Result<Self, VectorError> {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if bit {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        check_len(len)?;
        Ok(Self { words, len })
    }

    /// Vector with ones exactly at the given coordinates.
    pub fn with_ones(len: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self, VectorError> {
        let mut v = Self::zeros(len)?;
        for p in positions {
            v.set(p, true);
        }
        Ok(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: vectors have at least one coordinate.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "coordinate {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "coordinate {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the 1 coordinates, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Zero-extends or truncates to `len` coordinates.
    pub fn resized(&self, len: usize) -> Result<Self, VectorError> {
        let mut out = Self::zeros(len)?;
        let keep = len.min(self.len).div_ceil(WORD);
        out.words[..keep].copy_from_slice(&self.words[..keep]);
        out.clear_tail();
        Ok(out)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn same_len(&self, other: &Self) -> Result<(), VectorError> {
        if self.len == other.len {
            Ok(())
        } else {
            Err(VectorError::LengthMismatch {
                left: self.len,
                right: other.len,
            })
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, VectorError> {
        self.same_len(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self { words, len: self.len })
    }

    pub fn and(&self, other: &Self) -> Result<Self, VectorError> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self, VectorError> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Result<Self, VectorError> {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn not(&self) -> Self {
        let mut out = Self {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_tail();
        out
    }

    /// In-place `self |= other`.
    pub fn or_assign(&mut self, other: &Self) -> Result<(), VectorError> {
        self.same_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    /// Shift-left crowding: all ones packed to the left end, count preserved.
    pub fn slc(&self) -> Self {
        let ones = self.count_ones();
        let mut out = Self {
            words: vec![0; self.words.len()],
            len: self.len,
        };
        let full = ones / WORD;
        out.words[..full].iter_mut().for_each(|w| *w = !0);
        if !ones.is_multiple_of(WORD) {
            out.words[full] = (1u64 << (ones % WORD)) - 1;
        }
        out
    }

    /// OR-reduction to a single bit.
    pub fn devectorize(&self) -> bool {
        !self.is_zero()
    }

    /// Renders with zero coordinates as dots, space separated (`1 1 . .`).
    pub fn to_dotted(&self) -> String {
        let mut s = String::with_capacity(self.len * 2);
        for (i, b) in self.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push(if b { '1' } else { '.' });
        }
        s
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = VectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(VectorError::InvalidSymbol {
                    position: i + 1,
                    symbol: other,
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        BitVector::from_bits(bits)
    }
}

/// The five logic-processor operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicKind {
    And,
    Or,
    Xor,
    Not,
    Nop,
}

impl LogicKind {
    pub fn is_binary(self) -> bool {
        matches!(self, LogicKind::And | LogicKind::Or | LogicKind::Xor)
    }
}

impl fmt::Display for LogicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LogicKind::And => "and",
            LogicKind::Or => "or",
            LogicKind::Xor => "xor",
            LogicKind::Not => "not",
            LogicKind::Nop => "nop",
        };
        f.write_str(s)
    }
}

/// Applies `kind` coordinatewise. Binary kinds need `b`, unary kinds must not get one.
pub fn logic_op(kind: LogicKind, a: &BitVector, b: Option<&BitVector>) -> Result<BitVector, VectorError> {
    match (kind, b) {
        (LogicKind::And, Some(b)) => a.and(b),
        (LogicKind::Or, Some(b)) => a.or(b),
        (LogicKind::Xor, Some(b)) => a.xor(b),
        (LogicKind::Not, None) => Ok(a.not()),
        (LogicKind::Nop, None) => Ok(a.clone()),
        (kind, _) => Err(VectorError::Arity {
            kind,
            expected: if kind.is_binary() { 2 } else { 1 },
        }),
    }
}

pub fn slc(a: &BitVector) -> BitVector {
    a.slc()
}

pub fn devectorize(a: &BitVector) -> bool {
    a.devectorize()
}

/// Concatenates bits into a vector; the inverse of reading a vector bit by bit.
pub fn vectorize<I: IntoIterator<Item = bool>>(bits: I) -> Result<BitVector, VectorError> {
    BitVector::from_bits(bits)
}

/// One coordinate of a ternary vector. `X` covers both 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trit {
    Zero,
    One,
    X,
}

impl Trit {
    /// Coordinate intersection; `None` when 0 meets 1.
    pub fn intersect(self, other: Trit) -> Option<Trit> {
        match (self, other) {
            (Trit::X, t) | (t, Trit::X) => Some(t),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::X => 'x',
        }
    }
}

impl From<bool> for Trit {
    fn from(b: bool) -> Self {
        if b {
            Trit::One
        } else {
            Trit::Zero
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TernaryVector {
    coords: Vec<Trit>,
}

impl TernaryVector {
    pub fn new(coords: Vec<Trit>) -> Result<Self, VectorError> {
        check_len(coords.len())?;
        Ok(Self { coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Trit] {
        &self.coords
    }

    /// Number of `x` coordinates; the vector denotes `2^xcount` binary points.
    pub fn xcount(&self) -> usize {
        self.coords.iter().filter(|&&t| t == Trit::X).count()
    }

    fn same_len(&self, other: &Self) -> Result<(), VectorError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(VectorError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }
}

impl From<&BitVector> for TernaryVector {
    fn from(v: &BitVector) -> Self {
        Self {
            coords: v.iter().map(Trit::from).collect(),
        }
    }
}

impl fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.coords.iter().map(|t| t.symbol()).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryVector({self})")
    }
}

impl FromStr for TernaryVector {
    type Err = VectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(Trit::Zero),
                '1' => Ok(Trit::One),
                'x' | 'X' => Ok(Trit::X),
                other => Err(VectorError::InvalidSymbol {
                    position: i + 1,
                    symbol: other,
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        TernaryVector::new(coords)
    }
}

/// Outcome of intersecting two ternary vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    Vector(TernaryVector),
    /// At least one coordinate clashed (0 against 1).
    Empty { clashes: usize },
}

pub fn ternary_intersect(a: &TernaryVector, b: &TernaryVector) -> Result<Intersection, VectorError> {
    a.same_len(b)?;
    let mut coords = Vec::with_capacity(a.len());
    let mut clashes = 0;
    for (&x, &y) in a.coords.iter().zip(&b.coords) {
        match x.intersect(y) {
            Some(t) => coords.push(t),
            None => clashes += 1,
        }
    }
    if clashes > 0 {
        Ok(Intersection::Empty { clashes })
    } else {
        Ok(Intersection::Vector(TernaryVector { coords }))
    }
}

/// Set-theoretic relation between two ternary vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionType {
    Equal,
    /// The first vector lies strictly inside the second.
    QuerySubset,
    /// The second vector lies strictly inside the first.
    TargetSubset,
    Overlap,
    Disjoint,
}

impl fmt::Display for InteractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InteractionType::Equal => "equal",
            InteractionType::QuerySubset => "query-subset",
            InteractionType::TargetSubset => "target-subset",
            InteractionType::Overlap => "overlap",
            InteractionType::Disjoint => "disjoint",
        };
        f.write_str(s)
    }
}

pub fn classify_interaction(a: &TernaryVector, b: &TernaryVector) -> Result<InteractionType, VectorError> {
    let meet = match ternary_intersect(a, b)? {
        Intersection::Empty { .. } => return Ok(InteractionType::Disjoint),
        Intersection::Vector(v) => v,
    };
    Ok(if a == b {
        InteractionType::Equal
    } else if &meet == a {
        InteractionType::QuerySubset
    } else if &meet == b {
        InteractionType::TargetSubset
    } else {
        InteractionType::Overlap
    })
}
