//! Exact arithmetic in the quadratic field `Q(√3)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `a + b√3` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt3 {
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QSqrt3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt3 { a, b }
    }

    /// `(a_num/a_den) + (b_num/b_den)√3`.
    pub fn from_ratios(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        QSqrt3 {
            a: rat(a_num, a_den),
            b: rat(b_num, b_den),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::from_ratios(n, 1, 0, 1)
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_ratios(n, d, 0, 1)
    }

    pub fn sqrt3() -> Self {
        Self::from_ratios(0, 1, 1, 1)
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Conjugate `a − b√3`.
    pub fn conj(&self) -> Self {
        QSqrt3 {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a² − 3b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(3, 1) * &self.b * &self.b
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(√3)");
        let n = self.norm();
        QSqrt3 {
            a: &self.a / &n,
            b: -(&self.b / &n),
        }
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2 = rat(3, 1) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("√3 is irrational"),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 3f64.sqrt()
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt3 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√3", self.b),
            _ if self.b.is_negative() => write!(f, "{} - {}√3", self.a, -self.b.clone()),
            _ => write!(f, "{} + {}√3", self.a, self.b),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a QSqrt3> for &'a QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: &'a QSqrt3) -> QSqrt3 {
                let f: fn(&QSqrt3, &QSqrt3) -> QSqrt3 = $body;
                f(self, rhs)
            }
        }
        impl $tr<QSqrt3> for QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: QSqrt3) -> QSqrt3 {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QSqrt3> for QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: &'a QSqrt3) -> QSqrt3 {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<QSqrt3> for &'a QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, rhs: QSqrt3) -> QSqrt3 {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QSqrt3 {
    a: &x.a + &y.a,
    b: &x.b + &y.b
});
forward_binop!(Sub, sub, |x, y| QSqrt3 {
    a: &x.a - &y.a,
    b: &x.b - &y.b
});
forward_binop!(Mul, mul, |x, y| QSqrt3 {
    a: &x.a * &y.a + rat(3, 1) * &x.b * &y.b,
    b: &x.a * &y.b + &x.b * &y.a
});
forward_binop!(Div, div, |x, y| x * &y.recip());

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3 {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Neg for &QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        -(self.clone())
    }
}

impl From<i64> for QSqrt3 {
    fn from(n: i64) -> Self {
        QSqrt3::int(n)
    }
}

impl One for QSqrt3 {
    fn one() -> Self {
        QSqrt3::int(1)
    }
}

impl Zero for QSqrt3 {
    fn zero() -> Self {
        QSqrt3::int(0)
    }
    fn is_zero(&self) -> bool {
        QSqrt3::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_sqrt3_minus_one() {
        let x = QSqrt3::sqrt3() - QSqrt3::one();
        let y = x.recip();
        assert_eq!(&x * &y, QSqrt3::one());
        assert_eq!(y, QSqrt3::from_ratios(1, 2, 1, 2));
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 7 − 4√3 ≈ 0.0718 is positive, 13 − 8√3 ≈ −0.856 is negative
        assert_eq!(QSqrt3::from_ratios(7, 1, -4, 1).signum(), 1);
        assert_eq!(QSqrt3::from_ratios(13, 1, -8, 1).signum(), -1);
        assert!(QSqrt3::int(2) > QSqrt3::sqrt3());
    }
}
