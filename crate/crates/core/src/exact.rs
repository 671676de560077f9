//! Exact arithmetic in quadratic number fields.
//!
//! [`ExactReal`] represents `rat + coef·√base` with arbitrary-precision
//! rational `rat`, `coef` and a square-free integer radicand `base`
//! (`base == 0` means the value is rational). All comparisons, floors and
//! fractional parts are exact; conversion to `f64` refines an integer
//! interval around √base until the two endpoints round to the same double,
//! so cancellation (e.g. a distance-to-nearest-integer of size 1e-12 held
//! as a difference of two numbers of size 1e4) never costs accuracy.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Exact element of ℚ(√base): `rat + coef·√base`.
///
/// Invariants: `base` is zero or square-free and ≥ 2; `coef == 0` iff
/// `base == 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactReal {
    rat: BigRational,
    coef: BigRational,
    base: BigUint,
}

/// Floor division of BigInt exponents of a rational against 2^k scaling.
fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

/// f64 conversion of a big rational without intermediate overflow.
///
/// num-rational's `to_f64` divides two independently rounded doubles, which
/// yields NaN for very large operands and loses a few ulps otherwise.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let n = r.numer().magnitude().clone();
    let d = r.denom().magnitude().clone();
    // Scale so the integer quotient carries ~64 significant bits.
    let shift: i64 = d.bits() as i64 + 64 - n.bits() as i64;
    let (num, den) = if shift >= 0 {
        (n << shift as u64, d)
    } else {
        (n, d << (-shift) as u64)
    };
    let q = &num / &den;
    let mut v = q.to_f64().unwrap_or(f64::INFINITY) * (shift as f64 * -1.0).exp2();
    if neg {
        v = -v;
    }
    v
}

/// Strip square factors out of a radicand: returns (multiplier, reduced) with
/// `√input = multiplier·√reduced` and `reduced` square-free as far as trial
/// division by small primes plus a perfect-square check can certify.
fn reduce_radicand(d: &BigUint) -> (BigUint, BigUint) {
    let mut outside = BigUint::one();
    let mut rest = d.clone();
    let mut p = 2u64;
    while p <= 1000 {
        let pp = BigUint::from(p * p);
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            outside *= BigUint::from(p);
        }
        p += 1;
    }
    let s = rest.sqrt();
    if &s * &s == rest {
        outside *= &s;
        rest = BigUint::one();
    }
    (outside, rest)
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(rat: BigRational) -> Self {
        ExactReal {
            rat,
            coef: BigRational::zero(),
            base: BigUint::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    /// Build `(a + b√d)/c` exactly. Fails for `c == 0` or `d` with an exact
    /// square radicand collapsing to a rational is fine and handled.
    pub fn surd(a: BigInt, b: BigInt, d: BigUint, c: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Parse("surd denominator c must be nonzero".into()));
        }
        let (mult, reduced) = reduce_radicand(&d);
        let c_rat = BigRational::from_integer(c);
        if reduced.is_one() || d.is_zero() || b.is_zero() {
            // √d is an integer (or the coefficient vanishes): rational value.
            let root_int = if b.is_zero() || d.is_zero() {
                BigInt::zero()
            } else {
                BigInt::from(mult)
            };
            let val = (BigRational::from_integer(a) + BigRational::from_integer(b * root_int))
                / c_rat;
            return Ok(Self::from_rational(val));
        }
        Ok(ExactReal {
            rat: BigRational::from_integer(a) / c_rat.clone(),
            coef: BigRational::from_integer(b * BigInt::from(mult)) / c_rat,
            base: reduced,
        })
    }

    /// `rat + coef·√base` from rational parts; used by the continued fraction
    /// machinery for values of the form (P + √D)/Q.
    pub fn from_parts(rat: BigRational, coef: BigRational, base: BigUint) -> Result<Self> {
        if coef.is_zero() || base.is_zero() {
            return Ok(Self::from_rational(rat));
        }
        let (mult, reduced) = reduce_radicand(&base);
        if reduced.is_one() {
            return Ok(Self::from_rational(
                rat + coef * BigRational::from_integer(BigInt::from(mult)),
            ));
        }
        Ok(ExactReal {
            rat,
            coef: coef * BigRational::from_integer(BigInt::from(mult)),
            base: reduced,
        })
    }

    pub fn is_rational(&self) -> bool {
        self.base.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.rat.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rat.is_integer()
    }

    /// The rational value, if this is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.rat)
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd_coef(&self) -> &BigRational {
        &self.coef
    }

    pub fn surd_base(&self) -> &BigUint {
        &self.base
    }

    fn check_base(&self, other: &Self) -> Result<BigUint> {
        if self.base.is_zero() {
            Ok(other.base.clone())
        } else if other.base.is_zero() || self.base == other.base {
            Ok(self.base.clone())
        } else {
            Err(Error::IncompatibleSurds(
                self.base.to_string(),
                other.base.to_string(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let base = self.check_base(other)?;
        Ok(ExactReal {
            rat: &self.rat + &other.rat,
            coef: &self.coef + &other.coef,
            base,
        }
        .normalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ExactReal {
            rat: -self.rat.clone(),
            coef: -self.coef.clone(),
            base: self.base.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let base = self.check_base(other)?;
        let d = BigRational::from_integer(BigInt::from(base.clone()));
        let rat = &self.rat * &other.rat + &self.coef * &other.coef * &d;
        let coef = &self.rat * &other.coef + &self.coef * &other.rat;
        Ok(ExactReal { rat, coef, base }.normalized())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Singularity("division by exact zero".into()));
        }
        if other.is_rational() {
            return Ok(ExactReal {
                rat: &self.rat / &other.rat,
                coef: &self.coef / &other.rat,
                base: self.base.clone(),
            });
        }
        // 1/(r + c√d) = (r − c√d)/(r² − c²·d); the denominator is a nonzero
        // rational because d is square-free (so r² = c²d forces r = c = 0).
        let d = BigRational::from_integer(BigInt::from(other.base.clone()));
        let denom = &other.rat * &other.rat - &other.coef * &other.coef * &d;
        let conj = ExactReal {
            rat: other.rat.clone(),
            coef: -other.coef.clone(),
            base: other.base.clone(),
        };
        let num = self.mul(&conj)?;
        Ok(ExactReal {
            rat: num.rat / &denom,
            coef: num.coef / &denom,
            base: num.base,
        }
        .normalized())
    }

    pub fn mul_bigint(&self, n: &BigInt) -> Self {
        let nr = BigRational::from_integer(n.clone());
        ExactReal {
            rat: &self.rat * &nr,
            coef: &self.coef * &nr,
            base: self.base.clone(),
        }
        .normalized()
    }

    pub fn mul_u64(&self, n: u64) -> Self {
        self.mul_bigint(&BigInt::from(n))
    }

    pub fn add_bigint(&self, n: &BigInt) -> Self {
        ExactReal {
            rat: &self.rat + BigRational::from_integer(n.clone()),
            coef: self.coef.clone(),
            base: self.base.clone(),
        }
    }

    fn normalized(mut self) -> Self {
        if self.coef.is_zero() {
            self.base = BigUint::zero();
        }
        self
    }

    /// Exact sign of the value.
    pub fn sign(&self) -> Ordering {
        if self.coef.is_zero() {
            return self
                .rat
                .cmp(&BigRational::zero());
        }
        if self.rat.is_zero() {
            return self.coef.cmp(&BigRational::zero());
        }
        let r_pos = self.rat.is_positive();
        let c_pos = self.coef.is_positive();
        if r_pos == c_pos {
            return if r_pos {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        // Opposite signs: compare r² against c²·d.
        let d = BigRational::from_integer(BigInt::from(self.base.clone()));
        let r2 = &self.rat * &self.rat;
        let c2d = &self.coef * &self.coef * &d;
        match r2.cmp(&c2d) {
            Ordering::Equal => Ordering::Equal, // impossible for square-free d, kept for safety
            Ordering::Greater => {
                if r_pos {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            Ordering::Less => {
                if c_pos {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        Ok(self.sub(other)?.sign())
    }

    /// Exact comparison for values known to live in compatible fields (same
    /// radicand, or either side rational). Panics otherwise; scan loops that
    /// compare norms of multiples of one fixed irrational rely on this.
    pub fn cmp_known(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
            .expect("comparison across incompatible quadratic fields")
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Crude f64 estimate (used only to seed exact floor fix-ups).
    fn to_f64_rough(&self) -> f64 {
        let mut v = rational_to_f64(&self.rat);
        if !self.coef.is_zero() {
            let d = self.base.to_f64().unwrap_or(f64::INFINITY);
            v += rational_to_f64(&self.coef) * d.sqrt();
        }
        v
    }

    /// Accurate f64 conversion via interval refinement around √base.
    pub fn to_f64(&self) -> f64 {
        if self.coef.is_zero() {
            return rational_to_f64(&self.rat);
        }
        let mut k: u32 = 64;
        loop {
            let scaled = &self.base * (BigUint::one() << (2 * k as u64));
            let s = scaled.sqrt(); // ⌊√(base·4^k)⌋, so √base ∈ [s, s+1]/2^k
            let two_k = BigRational::from_integer(pow2(k));
            let lo_root = BigRational::from_integer(BigInt::from(s.clone())) / &two_k;
            let hi_root =
                BigRational::from_integer(BigInt::from(s) + BigInt::one()) / &two_k;
            let (a, b) = if self.coef.is_positive() {
                (
                    &self.rat + &self.coef * &lo_root,
                    &self.rat + &self.coef * &hi_root,
                )
            } else {
                (
                    &self.rat + &self.coef * &hi_root,
                    &self.rat + &self.coef * &lo_root,
                )
            };
            let fa = rational_to_f64(&a);
            let fb = rational_to_f64(&b);
            if fa == fb || k >= 4096 {
                return fa;
            }
            k *= 2;
        }
    }

    /// Exact integer part ⌊x⌋.
    pub fn floor(&self) -> BigInt {
        if self.coef.is_zero() {
            return self.rat.floor().to_integer();
        }
        let guess = self.to_f64_rough().floor();
        let mut m = if guess.is_finite() {
            BigInt::from(guess as i128)
        } else {
            BigInt::zero()
        };
        // Fix up with exact comparisons; the guess is off by at most a few.
        loop {
            let diff = self.add_bigint(&(-m.clone()));
            match diff.sign() {
                Ordering::Less => m -= 1,
                _ => {
                    let above = diff.add_bigint(&BigInt::from(-1));
                    if above.sign() == Ordering::Less {
                        return m;
                    }
                    m += 1;
                }
            }
        }
    }

    /// Exact fractional part {x} ∈ [0, 1).
    pub fn frac(&self) -> Self {
        self.add_bigint(&-self.floor())
    }

    /// Signed fractional part ⟨x⟩ ∈ [−1/2, 1/2); at the midpoint the value is −1/2.
    pub fn signed_frac(&self) -> Self {
        let f = self.frac();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let over = match f.coef.is_zero() {
            true => f.rat >= half,
            false => {
                f.sub(&ExactReal::from_rational(half)).map(|d| d.sign() != Ordering::Less).unwrap_or(false)
            }
        };
        if over {
            f.add_bigint(&BigInt::from(-1))
        } else {
            f
        }
    }

    /// Exact distance to the nearest integer ‖x‖ ∈ [0, 1/2].
    pub fn dist_to_int(&self) -> Self {
        self.signed_frac().abs()
    }
}

/// Reports carry exact values as their display strings, which round-trip
/// through the same parser.
impl serde::Serialize for ExactReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coef.is_zero() {
            if self.rat.is_integer() {
                return write!(f, "{}", self.rat.numer());
            }
            return write!(f, "{}/{}", self.rat.numer(), self.rat.denom());
        }
        // Common-denominator presentation (a+b√d)/c.
        let c = self.rat.denom().lcm(self.coef.denom());
        let a = (&self.rat * BigRational::from_integer(c.clone())).to_integer();
        let b = (&self.coef * BigRational::from_integer(c.clone())).to_integer();
        let sign = if b.sign() == Sign::Minus { "-" } else { "+" };
        write!(f, "surd:({}{}{}√{})/{}", a, sign, b.magnitude(), self.base, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> ExactReal {
        ExactReal::surd(
            BigInt::one(),
            BigInt::one(),
            BigUint::from(5u32),
            BigInt::from(2),
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> ExactReal {
        ExactReal::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn surd_radicand_reduced() {
        // (0 + 1√8)/1 = 2√2
        let x = ExactReal::surd(BigInt::zero(), BigInt::one(), BigUint::from(8u32), BigInt::one())
            .unwrap();
        assert_eq!(x.surd_base(), &BigUint::from(2u32));
        assert!((x.to_f64() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn perfect_square_radicand_collapses() {
        let x = ExactReal::surd(BigInt::from(3), BigInt::from(2), BigUint::from(9u32), BigInt::from(3))
            .unwrap();
        assert!(x.is_rational());
        assert_eq!(x.as_rational().unwrap(), &BigRational::from_integer(BigInt::from(3)));
    }

    #[test]
    fn floor_and_frac_of_phi_multiples() {
        // ⌊nφ⌋ against the closed form: φ = 1.6180339887…
        let p = phi();
        let expect = [1i64, 3, 4, 6, 8, 9, 11, 12, 14, 16];
        for (i, e) in expect.iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(p.mul_u64(n).floor(), BigInt::from(*e), "n = {n}");
        }
        let f = p.mul_u64(5).frac();
        assert!((f.to_f64() - (5.0 * 1.618_033_988_749_895 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn floor_negative_surd() {
        // −φ = −1.618…, floor −2
        assert_eq!(phi().neg().floor(), BigInt::from(-2));
        assert_eq!(rat(-1, 2).floor(), BigInt::from(-1));
    }

    #[test]
    fn signed_frac_midpoint_convention() {
        let h = rat(1, 2);
        assert_eq!(h.frac().as_rational().unwrap(), &BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(
            h.signed_frac().as_rational().unwrap(),
            &BigRational::new(BigInt::from(-1), BigInt::from(2))
        );
        assert_eq!(
            h.dist_to_int().as_rational().unwrap(),
            &BigRational::new(BigInt::one(), BigInt::from(2))
        );
    }

    #[test]
    fn dist_to_int_cancellation_accurate() {
        // ‖987·φ‖ is ~4e-4; the f64 conversion must not lose it to cancellation.
        let v = phi().mul_u64(987).dist_to_int().to_f64();
        let direct = (987.0 * (1.0 + 5f64.sqrt()) / 2.0).round() - 987.0 * 1.618_033_988_749_894_8;
        assert!((v - direct.abs()).abs() < 1e-10, "v = {v}, direct = {direct}");
    }

    #[test]
    fn field_ops_and_sign() {
        let p = phi();
        // φ² = φ + 1
        let sq = p.mul(&p).unwrap();
        let rhs = p.add(&ExactReal::one()).unwrap();
        assert_eq!(sq, rhs);
        // 1/φ = φ − 1
        let inv = ExactReal::one().div(&p).unwrap();
        let rhs = p.sub(&ExactReal::one()).unwrap();
        assert_eq!(inv, rhs);
        assert_eq!(p.sub(&rat(8, 5)).unwrap().sign(), Ordering::Greater);
        assert_eq!(p.sub(&rat(13, 8)).unwrap().sign(), Ordering::Less);
    }

    #[test]
    fn incompatible_bases_rejected() {
        let a = ExactReal::surd(BigInt::zero(), BigInt::one(), BigUint::from(2u32), BigInt::one())
            .unwrap();
        let b = ExactReal::surd(BigInt::zero(), BigInt::one(), BigUint::from(3u32), BigInt::one())
            .unwrap();
        assert!(matches!(a.add(&b), Err(Error::IncompatibleSurds(_, _))));
        // But √8 + √2 share a base after reduction.
        let c = ExactReal::surd(BigInt::zero(), BigInt::one(), BigUint::from(8u32), BigInt::one())
            .unwrap();
        let s = a.add(&c).unwrap();
        assert!((s.to_f64() - (2f64.sqrt() + 8f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn rational_to_f64_large_operands() {
        let big = BigInt::from(10u8).pow(40);
        let r = BigRational::new(&big * BigInt::from(3), big);
        assert_eq!(rational_to_f64(&r), 3.0);
    }
}
