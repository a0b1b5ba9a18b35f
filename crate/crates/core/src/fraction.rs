//! Exact rationals for certificate constants (`"2/3"`, `"1/8"`, `"0.125"`).

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Ratio<i64>);

impl Fraction {
    pub fn new(num: i64, den: i64) -> Self {
        Fraction(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        Fraction(Ratio::from_integer(0))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_positive(self) -> bool {
        *self.0.numer() > 0
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("cannot parse {s:?} as an exact fraction"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(Error::invalid("zero denominator"));
            }
            return Ok(Fraction::new(num, den));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
            let den = 10i64.pow(frac.len() as u32);
            let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let num = int.abs() * den + f;
            return Ok(Fraction::new(if neg { -num } else { num }, den));
        }
        let v: i64 = s.parse().map_err(|_| bad())?;
        Ok(Fraction(Ratio::from_integer(v)))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::ops::Add for Fraction {
    type Output = Fraction;
    fn add(self, o: Fraction) -> Fraction {
        Fraction(self.0 + o.0)
    }
}

impl std::ops::Sub for Fraction {
    type Output = Fraction;
    fn sub(self, o: Fraction) -> Fraction {
        Fraction(self.0 - o.0)
    }
}

impl std::ops::Mul for Fraction {
    type Output = Fraction;
    fn mul(self, o: Fraction) -> Fraction {
        Fraction(self.0 * o.0)
    }
}

impl std::ops::Div for Fraction {
    type Output = Fraction;
    fn div(self, o: Fraction) -> Fraction {
        Fraction(self.0 / o.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exactly() {
        assert_eq!("2/3".parse::<Fraction>().unwrap(), Fraction::new(2, 3));
        assert_eq!("0.125".parse::<Fraction>().unwrap(), Fraction::new(1, 8));
        assert_eq!("-0.5".parse::<Fraction>().unwrap(), Fraction::new(-1, 2));
        assert_eq!("32".parse::<Fraction>().unwrap(), Fraction::new(32, 1));
        assert!("1/0".parse::<Fraction>().is_err());
        assert!("abc".parse::<Fraction>().is_err());
        assert_eq!(Fraction::new(4, 6).to_string(), "2/3");
    }
}
