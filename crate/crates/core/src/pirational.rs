//! Exact numbers of the form `(p/q) * pi^b`.

use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An exact value `(numerator / denominator) * pi^pi_exponent`.
///
/// The rational part is always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiRational {
    coeff: BigRational,
    pi_exponent: i32,
}

impl PiRational {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>, pi_exponent: i32) -> Self {
        let den = denominator.into();
        assert!(!den.is_zero(), "PiRational with zero denominator");
        PiRational { coeff: BigRational::new(numerator.into(), den), pi_exponent }
    }

    pub fn from_ratio(coeff: BigRational, pi_exponent: i32) -> Self {
        PiRational { coeff, pi_exponent }
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        PiRational::new(value, 1, 0)
    }

    pub fn one() -> Self {
        PiRational::integer(1)
    }

    pub fn pi() -> Self {
        PiRational::new(1, 1, 1)
    }

    pub fn numerator(&self) -> &BigInt {
        self.coeff.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.coeff.denom()
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coeff
    }

    pub fn pi_exponent(&self) -> i32 {
        self.pi_exponent
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn recip(&self) -> Self {
        PiRational { coeff: self.coeff.recip(), pi_exponent: -self.pi_exponent }
    }

    pub fn powi(&self, exp: i32) -> Self {
        let base = if exp < 0 { self.recip() } else { self.clone() };
        let e = exp.unsigned_abs();
        let mut coeff = BigRational::one();
        for _ in 0..e {
            coeff *= &base.coeff;
        }
        PiRational { coeff, pi_exponent: base.pi_exponent * e as i32 }
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        c * std::f64::consts::PI.powi(self.pi_exponent)
    }
}

impl Mul for PiRational {
    type Output = PiRational;
    fn mul(self, rhs: PiRational) -> PiRational {
        &self * &rhs
    }
}

impl Mul<&PiRational> for &PiRational {
    type Output = PiRational;
    fn mul(self, rhs: &PiRational) -> PiRational {
        PiRational { coeff: &self.coeff * &rhs.coeff, pi_exponent: self.pi_exponent + rhs.pi_exponent }
    }
}

impl Div for PiRational {
    type Output = PiRational;
    fn div(self, rhs: PiRational) -> PiRational {
        &self / &rhs
    }
}

impl Div<&PiRational> for &PiRational {
    type Output = PiRational;
    fn div(self, rhs: &PiRational) -> PiRational {
        assert!(!rhs.is_zero(), "division of PiRational by zero");
        PiRational { coeff: &self.coeff / &rhs.coeff, pi_exponent: self.pi_exponent - rhs.pi_exponent }
    }
}

impl std::iter::Product for PiRational {
    fn product<I: Iterator<Item = PiRational>>(iter: I) -> Self {
        iter.fold(PiRational::one(), |acc, x| acc * x)
    }
}

/// Renders as `p/q · π^b`.
impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} · π^{}", self.coeff.numer(), self.coeff.denom(), self.pi_exponent)
    }
}

#[derive(Serialize, Deserialize)]
struct PiRationalRepr {
    numerator: String,
    denominator: String,
    pi_exponent: i32,
}

impl Serialize for PiRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiRationalRepr {
            numerator: self.coeff.numer().to_string(),
            denominator: self.coeff.denom().to_string(),
            pi_exponent: self.pi_exponent,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PiRationalRepr::deserialize(d)?;
        let num: BigInt = r.numerator.parse().map_err(D::Error::custom)?;
        let den: BigInt = r.denominator.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(PiRational::new(num, den, r.pi_exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    #[test]
    fn normalizes_on_construction() {
        let x = PiRational::new(6, -4, 2);
        assert_eq!(x.numerator(), &BigInt::from(-3));
        assert_eq!(x.denominator(), &BigInt::from(2));
        assert_eq!(x.to_string(), "-3/2 · π^2");
    }

    #[test]
    fn display_matches_cli_format() {
        assert_eq!(PiRational::new(2, 1, -1).to_string(), "2/1 · π^-1");
    }

    #[test]
    fn serde_round_trip() {
        let x = PiRational::new(-17, 96, -3);
        let s = serde_json::to_string(&x).unwrap();
        let y: PiRational = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    proptest! {
        #[test]
        fn arithmetic_stays_reduced(a in -500i64..500, b in 1i64..500, c in -500i64..500, e in 1i64..500,
                                    p in -10i32..10, q in -10i32..10) {
            prop_assume!(a != 0 && c != 0);
            let x = PiRational::new(a, b, p);
            let y = PiRational::new(c, e, q);
            for z in [&x * &y, &x / &y, x.powi(3), y.powi(-2)] {
                let g = z.numerator().abs().gcd(z.denominator());
                prop_assert!(g.is_one());
                prop_assert!(z.denominator().is_positive());
            }
        }

        #[test]
        fn float_matches_direct_evaluation(a in -10_000i64..10_000, b in 1i64..10_000, p in -20i32..=20) {
            prop_assume!(a != 0);
            let x = PiRational::new(a, b, p);
            let direct = (a as f64 / b as f64) * std::f64::consts::PI.powi(p);
            prop_assert!(((x.to_f64() - direct) / direct).abs() < 1e-12);
        }
    }
}
