//! Flag-value parsers: complex literals, exact rationals, and ladders.

use hrt_core::{Error, RealParam, Result};
use num_complex::Complex64;
use num_rational::BigRational;

/// Complex literal: `1`, `-0.3`, `2i`, `1+2i`, `0.5-0.25i`, `i`, `-i`.
/// Whitespace-insensitive; the imaginary unit closes the literal.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("bad complex literal `{s}`"));
    if compact.is_empty() {
        return Err(err());
    }
    let (body, imaginary_tail) = match compact.strip_suffix('i') {
        Some(b) => (b, true),
        None => (compact.as_str(), false),
    };
    if !imaginary_tail {
        return Ok(Complex64::new(body.parse().map_err(|_| err())?, 0.0));
    }
    // Split body into real part and imaginary coefficient at the last
    // sign that is not an exponent sign and not leading.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| err())?,
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        re_str.parse().map_err(|_| err())?
    };
    Ok(Complex64::new(re, im))
}

/// Real literal for frequency and base-point flags. An optional `surd:`
/// prefix is accepted for explicitness; the grammar itself decides the kind.
pub fn parse_real(s: &str, digits: Option<u32>) -> Result<RealParam> {
    RealParam::parse(s, digits)
}

/// Exact rational for the gap parameter: `1/4`, `2`, or a terminating
/// decimal like `0.25`.
pub fn parse_exact_rational(s: &str) -> Result<BigRational> {
    let r = parse_real(s, None)?;
    match &r {
        RealParam::Exact(x) => x
            .as_rational()
            .cloned()
            .ok_or_else(|| Error::Parse(format!("`{s}` is not rational"))),
        RealParam::Decimal { .. } => {
            // A terminating decimal denotes the exact rational it spells.
            let v = r.value();
            v.as_rational()
                .cloned()
                .ok_or_else(|| Error::Parse(format!("`{s}` is not rational")))
        }
    }
}

/// Comma-separated strictly increasing ladder of orbit lengths.
pub fn parse_ladder(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let v: u64 = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad ladder entry `{part}`")))?;
        if let Some(&last) = out.last() {
            if v <= last {
                return Err(Error::Parse(format!(
                    "ladder must increase strictly, got {last} then {v}"
                )));
            }
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse("empty ladder".into()));
    }
    Ok(out)
}

/// Scale index set: `3` or an inclusive range `1..6` (1-based levels).
pub fn parse_k_range(s: &str) -> Result<Vec<usize>> {
    let err = |part: &str| Error::Parse(format!("bad scale index `{part}` in `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| err(a))?;
        let hi: usize = b.trim().parse().map_err(|_| err(b))?;
        if lo == 0 || hi < lo {
            return Err(Error::Parse(format!("bad scale range `{s}`")));
        }
        Ok((lo..=hi).collect())
    } else {
        let k: usize = s.trim().parse().map_err(|_| err(s))?;
        if k == 0 {
            return Err(Error::Parse("scale indices are 1-based".into()));
        }
        Ok(vec![k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms_parse() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(
            parse_complex("0.5 - 0.25i").unwrap(),
            Complex64::new(0.5, -0.25)
        );
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2e2i").unwrap(),
            Complex64::new(1e-3, 200.0)
        );
        assert!(parse_complex("one").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn rational_gap_forms() {
        let q = parse_exact_rational("1/4").unwrap();
        assert_eq!(q, BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_exact_rational("0.25").unwrap(), q);
        assert!(parse_exact_rational("sqrt(2)").is_err());
    }

    #[test]
    fn ladders_and_ranges() {
        assert_eq!(parse_ladder("100, 1000").unwrap(), vec![100, 1000]);
        assert!(parse_ladder("100,100").is_err());
        assert_eq!(parse_k_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_k_range("4").unwrap(), vec![4]);
        assert!(parse_k_range("0..2").is_err());
    }
}
