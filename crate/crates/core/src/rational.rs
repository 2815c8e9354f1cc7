//! Exact rational helpers: parsing and printing `num/den` literals, float
//! conversion, and continued-fraction rationalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Prints `n/d`, or `n` for integers.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Parses `n`, `n/d`, or a finite decimal such as `-0.375` into an exact rational.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::parse(0, "empty rational literal"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_int(n.trim(), 0)?;
        let d = parse_int(d.trim(), n.to_string().len() + 1)?;
        if d.is_zero() {
            return Err(Error::parse(t.len(), "zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(whole.len() + 1, "malformed decimal"));
        }
        let w = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_int(whole_digits, 0)?
        };
        let f = parse_int(frac, whole.len() + 1)?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w * &scale + f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    Ok(Rational::from_integer(parse_int(t, 0)?))
}

fn parse_int(s: &str, pos: usize) -> Result<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(pos, format!("malformed integer {s:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|e| Error::parse(pos, e.to_string()))
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// computed from the continued fraction of the exact binary value of `x`.
pub fn rationalize(x: f64, max_den: u64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot rationalize {x}")));
    }
    if max_den == 0 {
        return Err(Error::Domain("denominator bound must be positive".into()));
    }
    let exact = Rational::from_float(x).expect("finite float");
    let bound = BigInt::from(max_den);
    if exact.denom() <= &bound {
        return Ok(exact);
    }
    let neg = exact.is_negative();
    let mut rest = exact.abs();

    // convergents p_k/q_k, seeded with p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            // largest admissible semiconvergent versus the last convergent
            let k = (&bound - &q0).div_floor(&q1);
            let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let conv = Rational::new(p1.clone(), q1.clone());
            let target = exact.abs();
            let pick = if (&semi - &target).abs() < (&conv - &target).abs() {
                semi
            } else {
                conv
            };
            return Ok(if neg { -pick } else { pick });
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            let r = Rational::new(p1, q1);
            return Ok(if neg { -r } else { r });
        }
        rest = frac.recip();
    }
}

/// Serde adapters that store rationals as `"num/den"` strings.
pub mod serde_str {
    use super::{format, parse, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }

    pub mod matrix {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            m: &[Vec<Rational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                let strs: Vec<String> = row.iter().map(format).collect();
                seq.serialize_element(&strs)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let raw = Vec::<Vec<String>>::deserialize(d)?;
            raw.iter()
                .map(|row| row.iter().map(|s| parse(s).map_err(D::Error::custom)).collect())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse("9/16").unwrap(), ratio(9, 16));
        assert_eq!(parse(" -3 ").unwrap(), int(-3));
        assert_eq!(parse("-0.375").unwrap(), ratio(-3, 8));
        assert_eq!(parse("4/8").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(1.0 / 3.0, 1000).unwrap(), ratio(1, 3));
        assert_eq!(rationalize(-0.5625, 100).unwrap(), ratio(-9, 16));
        assert_eq!(rationalize(0.0, 10).unwrap(), int(0));
        assert_eq!(rationalize(std::f64::consts::PI, 1000).unwrap(), ratio(355, 113));
        assert_eq!(rationalize(std::f64::consts::PI, 7).unwrap(), ratio(22, 7));
        assert_eq!(rationalize(0.7, 1).unwrap(), int(1));
        assert!(rationalize(f64::NAN, 10).is_err());
    }

    #[test]
    fn rationalize_respects_bound() {
        for i in 1..200 {
            let x = (i as f64).sqrt() / 7.0;
            let r = rationalize(x, 64).unwrap();
            assert!(r.denom() <= &BigInt::from(64));
            assert!((to_f64(&r) - x).abs() <= 1.0 / 64.0);
        }
    }
}
