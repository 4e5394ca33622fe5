//! Interaction-quality criteria between a query vector and an associator.
//!
//! Three forms are provided, from arithmetic to purely logical:
//!
//! * [`quality_arith`] averages a normalized compatibility score and two
//!   membership functions over ternary vectors, in exact rationals.
//! * [`quality_counts`] drops the averaging and counts mismatches and
//!   non-memberships over binary vectors (0 means identical vectors).
//! * [`quality_vector`] keeps every term as a vector; ones mark coordinates
//!   where the interaction loses quality. Its `q` field always equals
//!   `m xor A`.
//!
//! Vector criteria are ranked without addition: [`compact_quality`] packs the
//! ones to the left and [`better_of`] picks the smaller compacted vector with
//! one and/xor/devectorize chain.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::vlcore::{ternary_intersect, BitVector, Intersection, TernaryVector, VectorError};

/// Exact-rational quality of two ternary vectors.
///
/// `d` is the share of coordinates whose intersection is non-empty. It is
/// called a code distance in the literature but behaves as a compatibility
/// score: 1 for compatible vectors, 0 when every coordinate clashes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithQuality {
    pub d: BigRational,
    pub mu_query_in_target: BigRational,
    pub mu_target_in_query: BigRational,
    pub q: BigRational,
}

/// Formats a rational as `num/den`, keeping the denominator even when it is 1.
pub fn fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for ArithQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} mu(m in A)={} mu(A in m)={} Q={}",
            fraction(&self.d),
            fraction(&self.mu_query_in_target),
            fraction(&self.mu_target_in_query),
            fraction(&self.q)
        )
    }
}

fn pow2_neg(exp: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << exp)
}

pub fn quality_arith(m: &TernaryVector, a: &TernaryVector) -> Result<ArithQuality, VectorError> {
    let n = m.len();
    let (clashes, mu_in, mu_back) = match ternary_intersect(m, a)? {
        // 2 to the power of an empty intersection is taken as 0.
        Intersection::Empty { clashes } => (clashes, BigRational::zero(), BigRational::zero()),
        Intersection::Vector(meet) => {
            let common = meet.xcount();
            (0, pow2_neg(a.xcount() - common), pow2_neg(m.xcount() - common))
        }
    };
    let d = BigRational::new(BigInt::from(n - clashes), BigInt::from(n));
    let q = (&d + &mu_in + &mu_back) / BigRational::from_integer(BigInt::from(3));
    Ok(ArithQuality {
        d,
        mu_query_in_target: mu_in,
        mu_target_in_query: mu_back,
        q,
    })
}

/// Mismatch and non-membership counts; `total == 0` iff the vectors are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountQuality {
    pub distance: usize,
    pub non_member_query_in_target: usize,
    pub non_member_target_in_query: usize,
    pub total: usize,
}

pub fn quality_counts(m: &BitVector, a: &BitVector) -> Result<CountQuality, VectorError> {
    let common = m.and(a)?.count_ones();
    let distance = m.xor(a)?.count_ones();
    let non_member_query_in_target = a.count_ones() - common;
    let non_member_target_in_query = m.count_ones() - common;
    Ok(CountQuality {
        distance,
        non_member_query_in_target,
        non_member_target_in_query,
        total: distance + non_member_query_in_target + non_member_target_in_query,
    })
}

/// Vector-valued criterion. All four vectors share the input length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityVector {
    /// `m xor A`
    pub distance: BitVector,
    /// `A and not(m and A)`
    pub mu_query_in_target: BitVector,
    /// `m and not(m and A)`
    pub mu_target_in_query: BitVector,
    /// OR of the three terms above.
    pub q: BitVector,
}

pub fn quality_vector(m: &BitVector, a: &BitVector) -> Result<QualityVector, VectorError> {
    let not_common = m.and(a)?.not();
    let distance = m.xor(a)?;
    let mu_query_in_target = a.and(&not_common)?;
    let mu_target_in_query = m.and(&not_common)?;
    let q = distance.or(&mu_query_in_target)?.or(&mu_target_in_query)?;
    Ok(QualityVector {
        distance,
        mu_query_in_target,
        mu_target_in_query,
        q,
    })
}

/// A quality vector with its ones packed left, rendered as `(ones/len)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactedQuality {
    pub compacted: BitVector,
    pub ones: usize,
}

impl CompactedQuality {
    pub fn len(&self) -> usize {
        self.compacted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compacted.is_empty()
    }

    /// Compacts any loss vector.
    pub fn from_loss(q: &BitVector) -> Self {
        Self {
            compacted: q.slc(),
            ones: q.count_ones(),
        }
    }
}

impl fmt::Display for CompactedQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}/{})", self.ones, self.len())
    }
}

pub fn compact_quality(q: &QualityVector) -> CompactedQuality {
    CompactedQuality::from_loss(&q.q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    First,
    Second,
}

/// Picks the better of two compacted criteria: `First` when
/// `or((q1 and q2) xor q1) == 0`, which on left-packed vectors means q1 has no
/// more ones than q2. Ties go to `First`.
pub fn better_of(q1: &CompactedQuality, q2: &CompactedQuality) -> Result<Choice, VectorError> {
    let excess = q1.compacted.and(&q2.compacted)?.xor(&q1.compacted)?;
    Ok(if excess.devectorize() {
        Choice::Second
    } else {
        Choice::First
    })
}

pub fn xor_distance(a: &BitVector, b: &BitVector) -> Result<BitVector, VectorError> {
    a.xor(b)
}

/// XOR-sum of consecutive distances around the closed cycle
/// `p0 -> p1 -> ... -> pk -> p0`. Always the zero vector.
pub fn beta_cycle_check(points: &[BitVector]) -> Result<BitVector, VectorError> {
    if points.len() < 2 {
        return Err(VectorError::TooFewPoints {
            required: 2,
            got: points.len(),
        });
    }
    let mut acc = BitVector::zeros(points[0].len())?;
    for (i, p) in points.iter().enumerate() {
        let next = &points[(i + 1) % points.len()];
        acc = acc.xor(&xor_distance(p, next)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn tv(s: &str) -> TernaryVector {
        s.parse().unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arith_half_of_target_space() {
        let q = quality_arith(&tv("1x"), &tv("xx")).unwrap();
        assert_eq!(q.d, ratio(1, 1));
        assert_eq!(q.mu_query_in_target, ratio(1, 2));
        assert_eq!(q.mu_target_in_query, ratio(1, 1));
        assert_eq!(q.q, ratio(5, 6));
        assert_eq!(fraction(&q.q), "5/6");
    }

    #[test]
    fn arith_half_of_both_spaces() {
        let q = quality_arith(&tv("xx0"), &tv("x1x")).unwrap();
        assert_eq!(q.mu_query_in_target, ratio(1, 2));
        assert_eq!(q.mu_target_in_query, ratio(1, 2));
        assert_eq!(q.q, ratio(2, 3));
    }

    #[test]
    fn arith_boundaries() {
        let eq = quality_arith(&tv("10x"), &tv("10x")).unwrap();
        assert_eq!(eq.q, ratio(1, 1));
        assert_eq!(fraction(&eq.q), "1/1");
        let apart = quality_arith(&tv("0"), &tv("1")).unwrap();
        assert_eq!(apart.d, ratio(0, 1));
        assert_eq!(apart.q, ratio(0, 1));
        // partial clash keeps the compatible share of d
        let partial = quality_arith(&tv("01x"), &tv("11x")).unwrap();
        assert_eq!(partial.d, ratio(2, 3));
        assert_eq!(partial.q, ratio(2, 9));
    }

    #[test]
    fn arith_length_mismatch() {
        assert!(matches!(
            quality_arith(&tv("1x"), &tv("1")),
            Err(VectorError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn counts_examples() {
        let c = quality_counts(&bv("110011001100"), &bv("000011110101")).unwrap();
        assert_eq!((c.distance, c.non_member_query_in_target, c.non_member_target_in_query, c.total), (6, 3, 3, 12));
        let z = quality_counts(&bv("1011"), &bv("1011")).unwrap();
        assert_eq!(z.total, 0);
        let f = quality_counts(&bv("1111"), &bv("0000")).unwrap();
        assert_eq!((f.distance, f.non_member_query_in_target, f.non_member_target_in_query, f.total), (4, 0, 4, 8));
    }

    #[test]
    fn vector_criterion_worked_example() {
        let q = quality_vector(&bv("110011001100"), &bv("000011110101")).unwrap();
        assert_eq!(q.q, bv("110000111001"));
        let c = compact_quality(&q);
        assert_eq!(c.compacted, bv("111111000000"));
        assert_eq!(c.ones, 6);
        assert_eq!(c.to_string(), "(6/12)");
    }

    #[test]
    fn comparison_examples() {
        let six = CompactedQuality::from_loss(&bv("111111000000"));
        let eight = CompactedQuality::from_loss(&bv("111111110000"));
        assert_eq!(better_of(&six, &eight).unwrap(), Choice::First);
        assert_eq!(better_of(&eight, &six).unwrap(), Choice::Second);
        assert_eq!(better_of(&six, &six).unwrap(), Choice::First);
        let zero = CompactedQuality::from_loss(&bv("000000000000"));
        assert_eq!(better_of(&zero, &six).unwrap(), Choice::First);
        let short = CompactedQuality::from_loss(&bv("11"));
        assert!(better_of(&six, &short).is_err());
    }

    #[test]
    fn xor_distance_examples() {
        assert_eq!(xor_distance(&bv("1100"), &bv("0110")).unwrap(), bv("1010"));
        assert!(xor_distance(&bv("1100"), &bv("1100")).unwrap().is_zero());
    }

    #[test]
    fn beta_needs_two_points() {
        assert_eq!(
            beta_cycle_check(&[bv("1")]),
            Err(VectorError::TooFewPoints { required: 2, got: 1 })
        );
        assert!(beta_cycle_check(&[bv("10"), bv("1")]).is_err());
    }

    fn arb_pair() -> impl Strategy<Value = (BitVector, BitVector)> {
        (1usize..200).prop_flat_map(|n| {
            let v = proptest::collection::vec(any::<bool>(), n);
            (v.clone(), v).prop_map(|(a, b)| (BitVector::from_bits(a).unwrap(), BitVector::from_bits(b).unwrap()))
        })
    }

    proptest! {
        #[test]
        fn counts_agree_with_vectors((m, a) in arb_pair()) {
            let c = quality_counts(&m, &a).unwrap();
            let v = quality_vector(&m, &a).unwrap();
            prop_assert_eq!(c.distance, v.distance.count_ones());
            prop_assert_eq!(c.non_member_query_in_target, v.mu_query_in_target.count_ones());
            prop_assert_eq!(c.non_member_target_in_query, v.mu_target_in_query.count_ones());
            prop_assert_eq!(c.total == 0, m == a);
        }

        #[test]
        fn vector_criterion_is_xor((m, a) in arb_pair()) {
            let v = quality_vector(&m, &a).unwrap();
            prop_assert_eq!(&v.q, &m.xor(&a).unwrap());
            prop_assert_eq!(&xor_distance(&m, &a).unwrap(), &v.q);
        }

        #[test]
        fn better_of_ranks_by_ones((m, a) in arb_pair(), flips in any::<u64>()) {
            let q1 = CompactedQuality::from_loss(&m);
            let q2 = CompactedQuality::from_loss(&a);
            let expected = if q1.ones <= q2.ones { Choice::First } else { Choice::Second };
            prop_assert_eq!(better_of(&q1, &q2).unwrap(), expected);
            // ones count ignores coordinate order
            let mut bits: Vec<bool> = m.iter().collect();
            let len = bits.len();
            bits.rotate_left((flips as usize) % len);
            prop_assert_eq!(CompactedQuality::from_loss(&BitVector::from_bits(bits).unwrap()).ones, q1.ones);
        }

        #[test]
        fn beta_cycles_vanish((m, a) in arb_pair()) {
            let c = m.and(&a).unwrap();
            prop_assert!(beta_cycle_check(&[m.clone(), a.clone()]).unwrap().is_zero());
            prop_assert!(beta_cycle_check(&[m, a, c]).unwrap().is_zero());
        }
    }
}
