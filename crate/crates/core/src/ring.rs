//! The scalar ring that counts, weights and clause labels live in.
//!
//! Everything in this crate is generic over [`Ring`]: plain and signed
//! counting runs over arbitrary-precision integers, degree-one absorption
//! needs exact rationals, and circuit amplitudes need complex doubles.
//! Concrete aliases live at the crate root.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Zero};

/// Failure to read a weight/label directive into a given ring.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("`{0}` is not representable in this ring")]
    NotRepresentable(String),
}

/// Commutative ring scalar.
///
/// `exact_div` is the only partial operation: it must return `None` instead
/// of leaving the ring (integers) or dividing by zero. `from_parts` and
/// `to_parts` read and write the `<re> <im>` fields of weight directives;
/// `to_parts` must render the shortest text that `from_parts` maps back to
/// the same element.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn from_int(value: i64) -> Self;

    /// Exact division: `Some(q)` iff `q * rhs == self` has a unique solution
    /// in the ring.
    fn exact_div(&self, rhs: &Self) -> Option<Self>;

    fn from_parts(re: &str, im: &str) -> Result<Self, ScalarError>;

    /// `(re, im)` rendering for directives and display.
    fn to_parts(&self) -> (String, String);
}

/// A decimal literal split into `mantissa * 10^exponent`.
///
/// Accepts the forms `-12`, `3.5`, `1e-3`, `-0.25e2`.
fn parse_decimal(text: &str) -> Option<(BigInt, i64)> {
    let (body, exp) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = text[pos + 1..].parse().ok()?;
            (&text[..pos], exp)
        }
        None => (text, 0i64),
    };
    let (sign, digits) = match body.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut mantissa = BigInt::from(0);
    for b in int_part.bytes().chain(frac_part.bytes()) {
        mantissa = mantissa * 10 + (b - b'0');
    }
    Some((mantissa * sign, exp - frac_part.len() as i64))
}

fn decimal_to_int(text: &str) -> Result<BigInt, ScalarError> {
    let (mantissa, exp) = parse_decimal(text).ok_or_else(|| ScalarError::Invalid(text.into()))?;
    if exp >= 0 {
        Ok(mantissa * BigInt::from(10).pow(exp as u32))
    } else {
        let scale = BigInt::from(10).pow((-exp) as u32);
        if (&mantissa % &scale).is_zero() {
            Ok(mantissa / scale)
        } else {
            Err(ScalarError::NotRepresentable(text.into()))
        }
    }
}

fn decimal_to_rational(text: &str) -> Result<BigRational, ScalarError> {
    // Fraction form `p/q` is accepted alongside decimals so that serialized
    // rational labels (e.g. 1/3) survive a round trip.
    if let Some((num, den)) = text.split_once('/') {
        let num = decimal_to_int(num)?;
        let den = decimal_to_int(den)?;
        if den.is_zero() {
            return Err(ScalarError::Invalid(text.into()));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = parse_decimal(text).ok_or_else(|| ScalarError::Invalid(text.into()))?;
    if exp >= 0 {
        Ok(BigRational::from_integer(mantissa * BigInt::from(10).pow(exp as u32)))
    } else {
        Ok(BigRational::new(mantissa, BigInt::from(10).pow((-exp) as u32)))
    }
}

fn require_zero_im(re: &str, im: &str) -> Result<(), ScalarError> {
    let (mantissa, _) = parse_decimal(im).ok_or_else(|| ScalarError::Invalid(im.into()))?;
    if mantissa.is_zero() {
        Ok(())
    } else {
        Err(ScalarError::NotRepresentable(format!("{re} {im}")))
    }
}

impl Ring for BigInt {
    fn from_int(value: i64) -> Self {
        BigInt::from(value)
    }

    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() || !(self % rhs).is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn from_parts(re: &str, im: &str) -> Result<Self, ScalarError> {
        require_zero_im(re, im)?;
        decimal_to_int(re)
    }

    fn to_parts(&self) -> (String, String) {
        (self.to_string(), "0".into())
    }
}

impl Ring for BigRational {
    fn from_int(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn from_parts(re: &str, im: &str) -> Result<Self, ScalarError> {
        require_zero_im(re, im)?;
        decimal_to_rational(re)
    }

    fn to_parts(&self) -> (String, String) {
        // Finite decimal expansions render as decimals, everything else as p/q.
        let mut den = self.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut twos = 0u32;
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        let mut fives = 0u32;
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if den.is_one() {
            let pow10 = twos.max(fives);
            let scaled = self.numer() * BigInt::from(10).pow(pow10) / self.denom();
            return (render_scaled_decimal(&scaled.to_string(), pow10), "0".into());
        }
        (format!("{}/{}", self.numer(), self.denom()), "0".into())
    }
}

/// Place a decimal point `pow10` digits from the right of an integer string.
fn render_scaled_decimal(scaled: &str, pow10: u32) -> String {
    if pow10 == 0 {
        return scaled.to_string();
    }
    let (sign, digits) = match scaled.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", scaled),
    };
    let digits = format!("{:0>width$}", digits, width = pow10 as usize + 1);
    let split = digits.len() - pow10 as usize;
    let frac = digits[split..].trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{}", &digits[..split])
    } else {
        format!("{sign}{}.{}", &digits[..split], frac)
    }
}

impl Ring for Complex64 {
    fn from_int(value: i64) -> Self {
        Complex64::new(value as f64, 0.0)
    }

    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn from_parts(re: &str, im: &str) -> Result<Self, ScalarError> {
        let re: f64 = re.parse().map_err(|_| ScalarError::Invalid(re.into()))?;
        let im: f64 = im.parse().map_err(|_| ScalarError::Invalid(im.into()))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(ScalarError::NotRepresentable(format!("{re} {im}")));
        }
        Ok(Complex64::new(re, im))
    }

    fn to_parts(&self) -> (String, String) {
        // `Display` for f64 is the shortest round-tripping decimal.
        (self.re.to_string(), self.im.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("-12"), Some((BigInt::from(-12), 0)));
        assert_eq!(parse_decimal("3.50"), Some((BigInt::from(350), -2)));
        assert_eq!(parse_decimal("1e-3"), Some((BigInt::from(1), -3)));
        assert_eq!(parse_decimal("-0.25e2"), Some((BigInt::from(-25), 0)));
        assert_eq!(parse_decimal(""), None);
        assert_eq!(parse_decimal("1.2.3"), None);
    }

    #[test]
    fn int_ring_rejects_fractions_and_imaginary() {
        assert_eq!(BigInt::from_parts("-1", "0"), Ok(BigInt::from(-1)));
        assert_eq!(BigInt::from_parts("2e3", "0.0"), Ok(BigInt::from(2000)));
        assert!(matches!(
            BigInt::from_parts("0.5", "0"),
            Err(ScalarError::NotRepresentable(_))
        ));
        assert!(matches!(
            BigInt::from_parts("1", "1"),
            Err(ScalarError::NotRepresentable(_))
        ));
    }

    #[test]
    fn int_exact_div() {
        assert_eq!(BigInt::from(6).exact_div(&BigInt::from(3)), Some(BigInt::from(2)));
        assert_eq!(BigInt::from(7).exact_div(&BigInt::from(2)), None);
        assert_eq!(BigInt::from(7).exact_div(&BigInt::from(0)), None);
    }

    #[test]
    fn rational_round_trip() {
        let half = BigRational::from_parts("0.5", "0").unwrap();
        assert_eq!(half, BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(half.to_parts().0, "0.5");

        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let (re, im) = third.to_parts();
        assert_eq!((re.as_str(), im.as_str()), ("1/3", "0"));
        assert_eq!(BigRational::from_parts(&re, &im).unwrap(), third);

        let neg = BigRational::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(neg.to_parts().0, "-0.75");
    }

    #[test]
    fn complex_round_trip() {
        let z = Complex64::new(0.1, -2.5);
        let (re, im) = z.to_parts();
        assert_eq!(Complex64::from_parts(&re, &im).unwrap(), z);
        assert!(Complex64::from_parts("nan", "0").is_err());
    }
}
