//! Continued fraction expansions with exact convergents.
//!
//! Rationals expand by the Euclidean algorithm (canonical form, final
//! quotient ≥ 2 except for integer inputs). Quadratic surds use the integer
//! recurrence on states (Pᵢ, Qᵢ) with xᵢ = (Pᵢ + √D)/Qᵢ, which is eventually
//! periodic; the detected cycle is reported. Decimal inputs expand only as
//! deep as their precision horizon certifies: a convergent denominator q is
//! trusted while q² stays within the declared digit budget.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::real::RealParam;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convergent {
    #[serde(with = "crate::cf::bigint_string")]
    pub p: BigInt,
    #[serde(with = "crate::cf::bigint_string")]
    pub q: BigInt,
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}

pub(crate) mod bigint_vec_string {
    use num_bigint::BigInt;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuedFraction {
    #[serde(with = "crate::cf::bigint_vec_string")]
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<Convergent>,
    /// Number of leading levels whose convergents are certified by the
    /// input's precision; equals the full length for exact inputs.
    pub trust_depth: usize,
    /// True when the expansion stopped at the precision horizon rather than
    /// at the requested depth or a finite end.
    pub truncated: bool,
    /// (start, length) of the repeating block of partial quotients, when the
    /// input is a quadratic surd and the cycle closed within the depth.
    pub period: Option<(usize, usize)>,
    /// True when the input is rational and fully expanded.
    pub finite: bool,
}

impl ContinuedFraction {
    /// Convergent denominators as u64 where they fit (ascending).
    pub fn denominators_u64(&self) -> Vec<u64> {
        self.convergents
            .iter()
            .filter_map(|c| u64::try_from(&c.q).ok())
            .collect()
    }
}

fn push_convergent(quotients: &[BigInt], convergents: &mut Vec<Convergent>) {
    let k = convergents.len();
    let a = &quotients[k];
    // Seeds: (p_-1, q_-1) = (1, 0) and (p_-2, q_-2) = (0, 1).
    let (p_prev, q_prev) = if k >= 1 {
        (convergents[k - 1].p.clone(), convergents[k - 1].q.clone())
    } else {
        (BigInt::one(), BigInt::zero())
    };
    let (p_prev2, q_prev2) = match k {
        0 => (BigInt::zero(), BigInt::one()),
        1 => (BigInt::one(), BigInt::zero()),
        _ => (convergents[k - 2].p.clone(), convergents[k - 2].q.clone()),
    };
    convergents.push(Convergent {
        p: a * &p_prev + p_prev2,
        q: a * &q_prev + q_prev2,
    });
}

fn euclid(num: &BigInt, den: &BigInt, max_levels: usize, stop_q: Option<&BigInt>) -> (Vec<BigInt>, Vec<Convergent>, bool, bool) {
    let mut n = num.clone();
    let mut d = den.clone();
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let mut finite = false;
    let mut truncated = false;
    while quotients.len() < max_levels {
        let a = n.div_floor(&d);
        let r = &n - &a * &d;
        quotients.push(a);
        push_convergent(&quotients, &mut convergents);
        if let Some(limit) = stop_q {
            let q = &convergents.last().unwrap().q;
            if q > limit {
                quotients.pop();
                convergents.pop();
                truncated = true;
                break;
            }
        }
        if r.is_zero() {
            finite = true;
            break;
        }
        n = d;
        d = r;
    }
    (quotients, convergents, finite, truncated)
}

/// Expansion of an exact value to at most `depth` partial quotients.
pub fn continued_fraction_exact(x: &ExactReal, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::Parameter("depth must be at least 1".into()));
    }
    if let Some(r) = x.as_rational() {
        let (quotients, convergents, finite, _) =
            euclid(r.numer(), r.denom(), depth, None);
        let n = quotients.len();
        return Ok(ContinuedFraction {
            quotients,
            convergents,
            trust_depth: n,
            truncated: false,
            period: None,
            finite,
        });
    }

    // Integer form (P + √D)/Q with Q | D − P².
    let e = BigRational::from_integer(BigInt::from(
        x.rational_part().denom().lcm(x.surd_coef().denom()),
    ));
    let mut a = (x.rational_part() * &e).to_integer();
    let mut b = (x.surd_coef() * &e).to_integer();
    let mut q0 = e.to_integer();
    if b.is_negative() {
        a = -a;
        b = -b;
        q0 = -q0;
    }
    let d_big = BigInt::from(x.surd_base().clone());
    let mut dd: BigInt = &b * &b * &d_big;
    let mut p = a;
    let mut q = q0;
    if !((&dd - &p * &p) % &q).is_zero() {
        let qa = q.abs();
        p *= &qa;
        dd *= &qa * &qa;
        q *= &qa;
    }

    let mut quotients: Vec<BigInt> = Vec::new();
    let mut convergents: Vec<Convergent> = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut period = None;
    let d_uint: BigUint = dd.magnitude().clone();
    for i in 0..depth {
        if period.is_none() {
            if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                period = Some((start, i - start));
            } else {
                seen.insert((p.clone(), q.clone()), i);
            }
        }
        let xi = ExactReal::from_parts(
            BigRational::new(p.clone(), q.clone()),
            BigRational::new(BigInt::one(), q.clone()),
            d_uint.clone(),
        )?;
        let ai = xi.floor();
        quotients.push(ai.clone());
        push_convergent(&quotients, &mut convergents);
        let p_next = &ai * &q - &p;
        let q_next = (&dd - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
    let n = quotients.len();
    Ok(ContinuedFraction {
        quotients,
        convergents,
        trust_depth: n,
        truncated: false,
        period,
        finite: false,
    })
}

/// Expansion of a parameter, honoring the precision horizon of decimals:
/// levels stop once the convergent denominator q would have q² beyond the
/// trusted digit budget.
pub fn continued_fraction(x: &RealParam, depth: usize) -> Result<ContinuedFraction> {
    match x {
        RealParam::Exact(v) => continued_fraction_exact(v, depth),
        RealParam::Decimal { mant, places, digits } => {
            if depth == 0 {
                return Err(Error::Parameter("depth must be at least 1".into()));
            }
            // q trusted while q² ≤ 10^digits.
            let horizon = BigInt::from(10u32).pow(*digits).sqrt();
            let den = BigInt::from(10u32).pow(*places);
            let (quotients, convergents, finite, truncated) =
                euclid(mant, &den, depth, Some(&horizon));
            if quotients.is_empty() {
                return Err(Error::PrecisionExceeded(format!(
                    "decimal with {digits} trusted digits certifies no continued fraction level"
                )));
            }
            let n = quotients.len();
            Ok(ContinuedFraction {
                quotients,
                convergents,
                trust_depth: n,
                // A "finite" end of a decimal's Euclid run is an artifact of
                // the truncated representation, not a claim about the value.
                truncated: truncated || finite,
                period: None,
                finite: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn quots(v: &ContinuedFraction) -> Vec<i64> {
        v.quotients.iter().map(|a| a.to_i64().unwrap()).collect()
    }

    #[test]
    fn euclid_examples() {
        let x = RealParam::parse("415/93", None).unwrap();
        let cf = continued_fraction(&x, 32).unwrap();
        assert_eq!(quots(&cf), vec![4, 2, 6, 7]);
        assert!(cf.finite);
        assert_eq!(cf.convergents.last().unwrap().p.to_i64().unwrap(), 415);
        assert_eq!(cf.convergents.last().unwrap().q.to_i64().unwrap(), 93);

        let x = RealParam::parse("1/3", None).unwrap();
        let cf = continued_fraction(&x, 8).unwrap();
        assert_eq!(quots(&cf), vec![0, 3]);
    }

    #[test]
    fn golden_ratio_all_ones_fibonacci() {
        let x = RealParam::parse("surd:(1+1√5)/2", None).unwrap();
        let cf = continued_fraction(&x, 12).unwrap();
        assert_eq!(quots(&cf), vec![1; 12]);
        let fib = [1i64, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233];
        for (c, f) in cf.convergents.iter().zip(fib.iter()) {
            assert_eq!(c.p.to_i64().unwrap(), *f);
        }
        assert_eq!(cf.period, Some((0, 1)));
    }

    #[test]
    fn sqrt2_periodic() {
        let x = RealParam::parse("surd:(0+1√2)/1", None).unwrap();
        let cf = continued_fraction(&x, 10).unwrap();
        assert_eq!(quots(&cf), vec![1, 2, 2, 2, 2, 2, 2, 2, 2, 2]);
        assert_eq!(cf.period, Some((1, 1)));
        // Denominators 1, 2, 5, 12, 29, 70, …
        assert_eq!(&cf.denominators_u64()[..6], &[1, 2, 5, 12, 29, 70]);
    }

    #[test]
    fn general_surd_cycle() {
        let x = RealParam::parse("surd:(3+1√7)/2", None).unwrap();
        let cf = continued_fraction(&x, 13).unwrap();
        assert_eq!(quots(&cf), vec![2, 1, 4, 1, 1, 1, 4, 1, 1, 1, 4, 1, 1]);
        assert_eq!(cf.period, Some((1, 4)));
    }

    #[test]
    fn convergents_satisfy_classical_bounds() {
        // gcd(p,q) = 1 and |x − p/q| ≤ 1/(q·q_next), checked exactly.
        for lit in ["surd:(1+1√5)/2", "surd:(0+1√2)/1", "415/93", "surd:(3+1√7)/2"] {
            let x = RealParam::parse(lit, None).unwrap();
            let v = x.value();
            let cf = continued_fraction(&x, 14).unwrap();
            for k in 0..cf.convergents.len() {
                let c = &cf.convergents[k];
                assert!(c.p.gcd(&c.q).is_one(), "{lit} level {k} not coprime");
                if k + 1 < cf.convergents.len() {
                    let approx = ExactReal::from_rational(BigRational::new(
                        c.p.clone(),
                        c.q.clone(),
                    ));
                    let err = v.sub(&approx).unwrap().abs();
                    let bound = ExactReal::from_rational(BigRational::new(
                        BigInt::one(),
                        &c.q * &cf.convergents[k + 1].q,
                    ));
                    assert_ne!(
                        err.sub(&bound).unwrap().sign(),
                        std::cmp::Ordering::Greater,
                        "{lit} level {k} violates |x − p/q| ≤ 1/(q q')"
                    );
                }
            }
        }
    }

    #[test]
    fn recurrence_holds() {
        let x = RealParam::parse("surd:(3+1√7)/2", None).unwrap();
        let cf = continued_fraction(&x, 12).unwrap();
        for k in 2..cf.convergents.len() {
            let a = &cf.quotients[k];
            assert_eq!(
                cf.convergents[k].p,
                a * &cf.convergents[k - 1].p + &cf.convergents[k - 2].p
            );
            assert_eq!(
                cf.convergents[k].q,
                a * &cf.convergents[k - 1].q + &cf.convergents[k - 2].q
            );
        }
    }

    #[test]
    fn decimal_truncates_at_horizon() {
        // φ to 10 digits: trusted denominators satisfy q² ≤ 10^10, i.e. q ≤ 1e5.
        let x = RealParam::parse("1.6180339887~digits=10", None).unwrap();
        let cf = continued_fraction(&x, 60).unwrap();
        assert!(cf.truncated);
        let qmax = cf.convergents.last().unwrap().q.to_u64().unwrap();
        assert!(qmax as u128 * qmax as u128 <= 10u128.pow(10));
        // All reported quotients must match the true φ expansion (all ones).
        assert!(cf.quotients.iter().all(|a| a.is_one()), "{:?}", quots(&cf));
        assert_eq!(cf.trust_depth, cf.quotients.len());
    }
}
