//! The scalar abstraction every geometric routine is written against.
//!
//! Exactness is the point of this crate, so the canonical instantiation is
//! [`crate::Rational`]. Floating point types satisfy the same bounds and are
//! handy for quick previews, but only exact scalars give sound containment
//! checks.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive};

use crate::Rational;

/// Ordered field element usable as an interval endpoint.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_int(value: i64) -> Self {
        Self::from_i64(value).expect("every scalar type represents small integers")
    }

    /// `self^exp` by repeated squaring.
    fn powu(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn half() -> Self {
        Self::one() / Self::from_int(2)
    }

    /// Writes every value as an integer multiple of one positive unit, when
    /// that is exact and the multiples fit in `i128` with `headroom` bits to
    /// spare. Lets hot loops run on machine integers.
    fn common_unit(_values: &[Self], _headroom: u32) -> Option<(Self, Vec<i128>)> {
        None
    }

    /// `unit * multiple`.
    fn from_multiple(unit: &Self, multiple: i128) -> Self {
        unit.clone() * Self::from_i128(multiple).expect("multiple representable")
    }
}

macro_rules! plain_scalar {
    ($($t:ty),*) => { $(impl Scalar for $t {})* };
}

plain_scalar!(f32, f64, i64, i128, num_rational::Ratio<i64>);

impl Scalar for Rational {
    fn common_unit(values: &[Self], headroom: u32) -> Option<(Self, Vec<i128>)> {
        let mut denom = BigInt::one();
        for v in values {
            denom = denom.lcm(v.denom());
        }
        let limit = BigInt::from(i128::MAX >> headroom);
        let multiples = values
            .iter()
            .map(|v| {
                let m = v.numer() * (&denom / v.denom());
                if m.abs() > limit {
                    None
                } else {
                    m.to_i128()
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Some((Rational::new(BigInt::one(), denom), multiples))
    }

    fn from_multiple(unit: &Self, multiple: i128) -> Self {
        unit * Rational::from_integer(BigInt::from(multiple))
    }
}

pub(crate) fn max_of<T: Scalar>(values: &[T]) -> T {
    let mut best = values[0].clone();
    for v in &values[1..] {
        if *v > best {
            best = v.clone();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn powu_matches_repeated_multiplication() {
        let third = Rational::new(1.into(), 3.into());
        let mut acc = Rational::from_int(1);
        for e in 0..20u32 {
            assert_eq!(third.powu(e), acc);
            acc *= third.clone();
        }
        assert_eq!(2.0f64.powu(10), 1024.0);
    }

    #[test]
    fn common_unit_is_exact() {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        let values = [q(1, 3), q(-2, 9), q(0, 1), q(5, 1)];
        let (unit, ints) = Rational::common_unit(&values, 4).unwrap();
        assert_eq!(unit, q(1, 9));
        assert_eq!(ints, vec![3, -2, 0, 45]);
        for (v, m) in values.iter().zip(&ints) {
            assert_eq!(&Rational::from_multiple(&unit, *m), v);
        }
        let huge = [q(1, 3).powu(90), q(1, 1)];
        assert!(Rational::common_unit(&huge, 4).is_none());
        assert!(f64::common_unit(&[0.5], 4).is_none());
    }
}
