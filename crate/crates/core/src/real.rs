//! Real-parameter inputs and their literal grammar.
//!
//! Accepted literal forms:
//! - `p/q` exact rational (plain integers included, e.g. `3` or `-7/2`)
//! - `surd:(a+b√d)/c` exact quadratic surd, ASCII form `surd:(a+b*sqrt(d))/c`
//! - decimal string, optionally `~digits=N` declaring how many fractional
//!   digits are trustworthy (default: the number of digits written)
//!
//! Rationals and surds support unlimited exact computation. A decimal carries
//! a precision horizon: any derived quantity whose magnitude is not safely
//! above the propagated input uncertainty fails with a precision error rather
//! than returning a silently rounded value.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::ExactReal;

/// Guard factor between a result's magnitude and the propagated input
/// uncertainty below which the result is refused as uncertifiable.
const PRECISION_GUARD: u32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum RealParam {
    Exact(ExactReal),
    Decimal {
        /// Exact mantissa: the value is mant/10^places.
        mant: BigInt,
        places: u32,
        /// Trusted fractional digits (≤ places unless explicitly declared larger).
        digits: u32,
    },
}

impl RealParam {
    pub fn from_exact(x: ExactReal) -> Self {
        RealParam::Exact(x)
    }

    pub fn from_rational(r: BigRational) -> Self {
        RealParam::Exact(ExactReal::from_rational(r))
    }

    pub fn from_int(n: i64) -> Self {
        RealParam::Exact(ExactReal::from_int(n))
    }

    /// The stored value as an exact field element (for a decimal this is the
    /// mantissa rational; trust bookkeeping stays with the caller).
    pub fn value(&self) -> ExactReal {
        match self {
            RealParam::Exact(x) => x.clone(),
            RealParam::Decimal { mant, places, .. } => ExactReal::from_rational(
                BigRational::new(mant.clone(), BigInt::from(10u32).pow(*places)),
            ),
        }
    }

    /// Trusted fractional digits; `None` for exact kinds.
    pub fn digits(&self) -> Option<u32> {
        match self {
            RealParam::Exact(_) => None,
            RealParam::Decimal { digits, .. } => Some(*digits),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RealParam::Exact(x) if x.is_rational() => "rational",
            RealParam::Exact(_) => "surd",
            RealParam::Decimal { .. } => "decimal",
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.value().is_zero()
    }

    /// Absolute uncertainty of the stored value when multiplied by `n`
    /// (zero for exact kinds).
    pub fn uncertainty(&self, n: u64) -> BigRational {
        match self {
            RealParam::Exact(_) => BigRational::zero(),
            RealParam::Decimal { digits, .. } => {
                BigRational::new(BigInt::from(n.max(1)), BigInt::from(10u32).pow(*digits))
            }
        }
    }

    /// Certify that a derived magnitude is safely above the propagated input
    /// uncertainty. `context` names the quantity for the error message.
    pub fn certify(&self, n: u64, magnitude: &ExactReal, context: &str) -> Result<()> {
        let u = self.uncertainty(n);
        if u.is_zero() {
            return Ok(());
        }
        let floor = ExactReal::from_rational(u * BigRational::from_integer(BigInt::from(PRECISION_GUARD)));
        let ok = magnitude
            .sub(&floor)
            .map(|d| d.sign() == Ordering::Greater)
            .unwrap_or(false);
        if ok {
            Ok(())
        } else {
            Err(Error::PrecisionExceeded(format!(
                "{context}: magnitude {:.3e} is within 10x the uncertainty carried by a \
                 {}-digit decimal input scaled by n = {n}",
                magnitude.to_f64(),
                self.digits().unwrap_or(0),
            )))
        }
    }

    /// ‖n·x‖, certified against the precision horizon for decimal inputs.
    pub fn dist_checked(&self, n: u64) -> Result<ExactReal> {
        let d = self.value().mul_u64(n).dist_to_int();
        self.certify(n, &d, "distance to nearest integer")?;
        Ok(d)
    }

    pub fn parse(s: &str, default_digits: Option<u32>) -> Result<RealParam> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty real literal".into()));
        }
        if let Some(rest) = s.strip_prefix("surd:") {
            return parse_surd(rest);
        }
        if s.contains('√') || s.contains("sqrt") {
            return parse_surd(s);
        }
        if s.contains('.') || s.contains('e') || s.contains('E') || s.contains('~') {
            return parse_decimal(s, default_digits);
        }
        parse_rational(s)
    }
}

fn parse_rational(s: &str) -> Result<RealParam> {
    let mk = |v: &str| {
        BigInt::from_str(v.trim()).map_err(|_| Error::Parse(format!("bad integer `{v}`")))
    };
    if let Some((n, d)) = s.split_once('/') {
        let den = mk(d)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(RealParam::from_rational(BigRational::new(mk(n)?, den)))
    } else {
        Ok(RealParam::from_rational(BigRational::from_integer(mk(s)?)))
    }
}

/// `(a+b√d)/c` with `√` or `sqrt(...)`, denominator and leading term
/// optional: `sqrt(2)`, `2*sqrt(3)`, `(1+√5)/2`, `(-1-1*sqrt(5))/2`.
fn parse_surd(s: &str) -> Result<RealParam> {
    let err = || Error::Parse(format!("bad surd literal `{s}`; expected (a+b√d)/c"));
    let s = s.trim();
    // Split off the denominator; a parenthesized body may itself contain the
    // `)` of sqrt(d), so match the `)/` pair from the right.
    let (body, tail) = if s.starts_with('(') {
        match s[1..].rfind(")/") {
            Some(i) => (s[1..i + 1].trim(), s[i + 3..].trim()),
            None => {
                let inner_end = s.rfind(')').ok_or_else(err)?;
                if !s[inner_end + 1..].trim().is_empty() {
                    return Err(err());
                }
                (s[1..inner_end].trim(), "")
            }
        }
    } else {
        (s, "")
    };
    let c = if tail.is_empty() {
        BigInt::one()
    } else {
        BigInt::from_str(tail).map_err(|_| err())?
    };
    // body = [a ±] [b] √d  (or ... b*sqrt(d))
    let root_pos = body.find('√').or_else(|| body.find("sqrt(")).ok_or_else(err)?;
    let d_str = if body[root_pos..].starts_with('√') {
        body[root_pos + '√'.len_utf8()..].trim()
    } else {
        let close = body[root_pos..].find(')').ok_or_else(err)? + root_pos;
        if !body[close + 1..].trim().is_empty() {
            return Err(err());
        }
        body[root_pos + 5..close].trim()
    };
    let d = BigUint::from_str(d_str).map_err(|_| err())?;
    let coef_part = &body[..root_pos];
    // The sign separating a from b is the last '+' or '-' not in front.
    let sep = coef_part
        .char_indices()
        .skip(1)
        .filter(|(_, ch)| *ch == '+' || *ch == '-')
        .map(|(i, _)| i)
        .last();
    let (a, b_part) = match sep {
        Some(i) => (
            BigInt::from_str(coef_part[..i].trim()).map_err(|_| err())?,
            coef_part[i..].trim(),
        ),
        None => (BigInt::zero(), coef_part.trim()),
    };
    let (sign, mag) = match b_part.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, b_part.strip_prefix('+').unwrap_or(b_part)),
    };
    let mag = mag.trim();
    let mag = mag.strip_suffix('*').unwrap_or(mag).trim();
    let b_mag = if mag.is_empty() {
        BigInt::one()
    } else {
        BigInt::from_str(mag).map_err(|_| err())?
    };
    let x = ExactReal::surd(a, BigInt::from(sign) * b_mag, d, c)?;
    Ok(RealParam::Exact(x))
}

fn parse_decimal(s: &str, default_digits: Option<u32>) -> Result<RealParam> {
    let (num_str, digits_decl) = match s.split_once('~') {
        Some((n, suffix)) => {
            let d = suffix
                .trim()
                .strip_prefix("digits=")
                .and_then(|v| v.trim().parse::<u32>().ok())
                .ok_or_else(|| Error::Parse(format!("bad precision suffix in `{s}`")))?;
            (n.trim(), Some(d))
        }
        None => (s, None),
    };
    // Split off exponent.
    let (mant_str, exp) = match num_str.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = num_str[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            (&num_str[..i], e)
        }
        None => (num_str, 0),
    };
    let (int_part, frac_part) = match mant_str.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant_str, ""),
    };
    let joined = format!("{int_part}{frac_part}");
    let mant_raw =
        BigInt::from_str(&joined).map_err(|_| Error::Parse(format!("bad decimal `{s}`")))?;
    let places_raw = frac_part.len() as i64 - exp as i64;
    // Normalize to non-negative places.
    let (mant, places) = if places_raw < 0 {
        (
            mant_raw * BigInt::from(10u32).pow((-places_raw) as u32),
            0u32,
        )
    } else {
        (mant_raw, places_raw as u32)
    };
    let digits = digits_decl
        .or(default_digits)
        .unwrap_or(places);
    Ok(RealParam::Decimal { mant, places, digits })
}

impl fmt::Display for RealParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealParam::Exact(x) => write!(f, "{x}"),
            RealParam::Decimal { mant, places, digits } => {
                let neg = mant.is_negative();
                let mag = mant.magnitude().to_string();
                let sign = if neg { "-" } else { "" };
                let p = *places as usize;
                if p == 0 {
                    write!(f, "{sign}{mag}~digits={digits}")
                } else if mag.len() > p {
                    write!(f, "{sign}{}.{}~digits={digits}", &mag[..mag.len() - p], &mag[mag.len() - p..])
                } else {
                    write!(f, "{sign}0.{}{}~digits={digits}", "0".repeat(p - mag.len()), mag)
                }
            }
        }
    }
}

impl FromStr for RealParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RealParam::parse(s, None)
    }
}

impl Serialize for RealParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RealParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        RealParam::parse(&s, None).map_err(serde::de::Error::custom)
    }
}

/// An exact value paired with the number of decimal digits that are actually
/// trustworthy, for quantities derived from decimal inputs (quotients,
/// rescalings). Exact inputs carry `digits = None` and certify everything.
#[derive(Debug, Clone)]
pub struct TrustedReal {
    pub value: ExactReal,
    /// Trustworthy decimal digits after propagation; fractional because
    /// propagation through a quotient erodes sub-digit amounts.
    pub digits: Option<f64>,
}

impl TrustedReal {
    pub fn from_param(p: &RealParam) -> Self {
        TrustedReal {
            value: p.value(),
            digits: p.digits().map(f64::from),
        }
    }

    /// a/b with uncertainty propagated through the quotient.
    pub fn quotient(a: &RealParam, b: &RealParam) -> Result<Self> {
        let bv = b.value();
        if bv.is_zero() {
            return Err(Error::Parameter("denominator parameter is zero".into()));
        }
        let value = a.value().div(&bv)?;
        let digits = match (a.digits(), b.digits()) {
            (None, None) => None,
            (da, db) => {
                let af = a.to_f64().abs().max(1e-300);
                let bf = b.to_f64().abs().max(1e-300);
                let rel = da.map_or(0.0, |d| 10f64.powi(-(d as i32)) / af)
                    + db.map_or(0.0, |d| 10f64.powi(-(d as i32)) / bf);
                let abs_unc = value.to_f64().abs().max(1e-300) * rel;
                Some(-abs_unc.log10())
            }
        };
        Ok(TrustedReal { value, digits })
    }

    /// Absolute uncertainty when the value is scaled by n.
    pub fn uncertainty(&self, n: u64) -> f64 {
        match self.digits {
            None => 0.0,
            Some(d) => n.max(1) as f64 * 10f64.powf(-d),
        }
    }

    pub fn certify(&self, n: u64, magnitude: &ExactReal, context: &str) -> Result<()> {
        let u = self.uncertainty(n);
        if u == 0.0 {
            return Ok(());
        }
        if magnitude.to_f64() > 10.0 * u {
            Ok(())
        } else {
            Err(Error::PrecisionExceeded(format!(
                "{context}: magnitude {:.3e} at multiplier n = {n} is within 10x the \
                 propagated uncertainty {:.3e}",
                magnitude.to_f64(),
                u
            )))
        }
    }

    /// ‖n·x‖ with the horizon guard.
    pub fn dist_checked(&self, n: u64) -> Result<ExactReal> {
        let d = self.value.mul_u64(n).dist_to_int();
        self.certify(n, &d, "distance to nearest integer")?;
        Ok(d)
    }
}

/// Integer part, fractional part, signed fractional part and distance to the
/// nearest integer, all exact.
#[derive(Debug, Clone)]
pub struct FracParts {
    pub int_part: BigInt,
    pub frac: ExactReal,
    pub signed_frac: ExactReal,
    pub dist: ExactReal,
}

/// Decompose x into its integer/fractional parts. For decimal inputs the
/// decomposition must be certified: a value within the guard band of an
/// integer boundary is refused.
pub fn frac_parts(x: &RealParam) -> Result<FracParts> {
    let v = x.value();
    let dist = v.dist_to_int();
    x.certify(1, &dist, "fractional part near integer boundary")?;
    Ok(FracParts {
        int_part: v.floor(),
        frac: v.frac(),
        signed_frac: v.signed_frac(),
        dist,
    })
}

/// Complex literal: `a`, `bi`, `a+bi`, `a-bi` with f64 components.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let err = || Error::Parse(format!("bad complex literal `{s}`; expected re, imi, or re+imi"));
    let parse_f = |v: &str| -> Result<f64> {
        match v {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => v.parse::<f64>().map_err(|_| err()),
        }
    };
    if let Some(body) = t.strip_suffix('i') {
        // Find the split between real and imaginary parts: last +/- that is
        // not a leading sign and not part of an exponent.
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let ch = bytes[i] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => Ok(Complex64::new(parse_f(&body[..i])?, parse_f(&body[i..])?)),
            None => Ok(Complex64::new(0.0, parse_f(body)?)),
        }
    } else {
        Ok(Complex64::new(t.parse::<f64>().map_err(|_| err())?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "415/93",
            "-7/2",
            "3",
            "surd:(1+1√5)/2",
            "surd:(0+1√2)/1",
            "surd:(3-2√7)/5",
            "1.6180339887~digits=10",
            "0.25~digits=2",
        ] {
            let x = RealParam::parse(s, None).unwrap();
            let y = RealParam::parse(&x.to_string(), None).unwrap();
            assert_eq!(x, y, "round trip through `{}`", x);
        }
    }

    #[test]
    fn ascii_sqrt_form_accepted() {
        let a = RealParam::parse("surd:(1+1√5)/2", None).unwrap();
        let b = RealParam::parse("surd:(1+1*sqrt(5))/2", None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plain_decimal_gets_written_digits() {
        let x = RealParam::parse("1.618034", None).unwrap();
        assert_eq!(x.digits(), Some(6));
        let y = RealParam::parse("1.618034", Some(4)).unwrap();
        assert_eq!(y.digits(), Some(4));
        let z = RealParam::parse("1.5e-3", None).unwrap();
        assert_eq!(z.digits(), Some(4));
        assert!((z.to_f64() - 0.0015).abs() < 1e-18);
    }

    #[test]
    fn frac_parts_examples() {
        let p = frac_parts(&RealParam::parse("3/4", None).unwrap()).unwrap();
        assert_eq!(p.int_part, BigInt::from(0));
        assert!((p.frac.to_f64() - 0.75).abs() < 1e-15);
        assert!((p.signed_frac.to_f64() + 0.25).abs() < 1e-15);
        assert!((p.dist.to_f64() - 0.25).abs() < 1e-15);

        let p = frac_parts(&RealParam::parse("-3/10", None).unwrap()).unwrap();
        assert_eq!(p.int_part, BigInt::from(-1));
        assert!((p.frac.to_f64() - 0.7).abs() < 1e-15);
        assert!((p.dist.to_f64() - 0.3).abs() < 1e-15);

        let p = frac_parts(&RealParam::parse("1/2", None).unwrap()).unwrap();
        assert!((p.frac.to_f64() - 0.5).abs() < 1e-15);
        assert!((p.signed_frac.to_f64() + 0.5).abs() < 1e-15);
        assert!((p.dist.to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decimal_near_integer_boundary_refused() {
        // 2.0000000001 with only 5 trusted digits cannot certify its floor.
        let x = RealParam::parse("2.0000000001~digits=5", None).unwrap();
        assert!(matches!(frac_parts(&x), Err(Error::PrecisionExceeded(_))));
        // Ten digits still do not: the boundary distance 1e-10 sits exactly
        // at the uncertainty, inside the safety factor. Twelve digits do.
        let y = RealParam::parse("2.0000000001~digits=10", None).unwrap();
        assert!(matches!(frac_parts(&y), Err(Error::PrecisionExceeded(_))));
        let z = RealParam::parse("2.0000000001~digits=12", None).unwrap();
        assert!(frac_parts(&z).is_ok());
    }

    #[test]
    fn dist_checked_horizon_scales_with_multiplier() {
        let x = RealParam::parse("1.6180339887~digits=10", None).unwrap();
        // Small multiplier: fine.
        assert!(x.dist_checked(10).is_ok());
        // Large multiplier: uncertainty 1e-10·n swallows the norm.
        assert!(matches!(
            x.dist_checked(2_000_000_000),
            Err(Error::PrecisionExceeded(_))
        ));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), Complex64::new(-2.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("1.5-0.3i").unwrap(), Complex64::new(1.5, -0.3));
        assert_eq!(parse_complex("1e-3+2e2i").unwrap(), Complex64::new(0.001, 200.0));
        assert!(parse_complex("bogus").is_err());
    }
}
