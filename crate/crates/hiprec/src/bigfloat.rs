//! Arbitrary-precision binary floating point on top of `BigInt`.
//!
//! A value is `mant * 2^exp` with the mantissa truncated to the working
//! precision after every operation. Truncation (not rounding) is fine here:
//! callers carry guard bits and account for roundoff explicitly.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct Bf {
    pub mant: BigInt,
    pub exp: i64,
}

impl Bf {
    pub fn zero() -> Self {
        Bf { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        Bf { mant: BigInt::from(v), exp: 0 }
    }

    /// Exact conversion; every finite f64 is a dyadic rational.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "Bf::from_f64 on non-finite value");
        if v == 0.0 {
            return Bf::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Bf { mant: BigInt::from(sign) * BigInt::from(mant), exp }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        // keep 56 bits and round to nearest at the 54th
        let shift = bits - 56;
        let (m, e) = if shift > 0 {
            ((&self.mant >> shift).to_i64().unwrap(), self.exp + shift)
        } else {
            ((&self.mant << -shift).to_i64().unwrap(), self.exp + shift)
        };
        // scale in two steps so intermediate powers of two stay representable
        let f = m as f64;
        if (-960..=960).contains(&e) {
            f * (e as f64).exp2()
        } else if e < 0 {
            f * (-960f64).exp2() * (((e + 960).max(-1400)) as f64).exp2()
        } else {
            f * (960f64).exp2() * (((e - 960).min(1400)) as f64).exp2()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn neg(&self) -> Self {
        Bf { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Bf { mant: self.mant.abs(), exp: self.exp }
    }

    /// log2 magnitude, i.e. floor(log2 |x|) + 1; i64::MIN for zero.
    pub fn mag2(&self) -> i64 {
        if self.mant.is_zero() {
            i64::MIN
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }

    /// |self| < |other|
    pub fn abs_lt(&self, other: &Bf) -> bool {
        let (ma, mb) = (self.mag2(), other.mag2());
        if ma != mb {
            return ma < mb;
        }
        if self.mant.is_zero() {
            return !other.mant.is_zero();
        }
        // align and compare
        let d = self.exp - other.exp;
        if d >= 0 {
            (self.mant.abs() << d as u64) < other.mant.abs()
        } else {
            self.mant.abs() < (other.mant.abs() << (-d) as u64)
        }
    }

    fn trunc(mut self, prec: u32) -> Self {
        let bits = self.mant.bits();
        if bits > prec as u64 {
            let shift = bits - prec as u64;
            self.mant >>= shift;
            self.exp += shift as i64;
        }
        self
    }
}

/// Precision-threading arithmetic context.
#[derive(Clone, Copy, Debug)]
pub struct Prec(pub u32);

impl Prec {
    pub fn add(&self, a: &Bf, b: &Bf) -> Bf {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        // if one operand is negligibly small, drop it
        let (ma, mb) = (a.mag2(), b.mag2());
        let guard = self.0 as i64 + 8;
        if ma > mb + guard {
            return a.clone();
        }
        if mb > ma + guard {
            return b.clone();
        }
        let r = if a.exp >= b.exp {
            Bf { mant: (&a.mant << (a.exp - b.exp) as u64) + &b.mant, exp: b.exp }
        } else {
            Bf { mant: &a.mant + (&b.mant << (b.exp - a.exp) as u64), exp: a.exp }
        };
        r.trunc(self.0)
    }

    pub fn sub(&self, a: &Bf, b: &Bf) -> Bf {
        self.add(a, &b.neg())
    }

    pub fn mul(&self, a: &Bf, b: &Bf) -> Bf {
        Bf { mant: &a.mant * &b.mant, exp: a.exp + b.exp }.trunc(self.0)
    }

    pub fn mul_i64(&self, a: &Bf, k: i64) -> Bf {
        Bf { mant: &a.mant * k, exp: a.exp }.trunc(self.0)
    }

    pub fn div(&self, a: &Bf, b: &Bf) -> Bf {
        assert!(!b.is_zero(), "Bf division by zero");
        if a.is_zero() {
            return Bf::zero();
        }
        let extra = self.0 as u64 + 64 + b.mant.bits();
        let mant = (&a.mant << extra) / &b.mant;
        Bf { mant, exp: a.exp - b.exp - extra as i64 }.trunc(self.0)
    }

    pub fn div_i64(&self, a: &Bf, k: i64) -> Bf {
        self.div(a, &Bf::from_i64(k))
    }

    pub fn shl(&self, a: &Bf, k: i64) -> Bf {
        Bf { mant: a.mant.clone(), exp: a.exp + k }
    }

    pub fn powi(&self, a: &Bf, mut n: u64) -> Bf {
        let mut base = a.clone();
        let mut acc = Bf::from_i64(1);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_f64() {
        for &v in &[0.0, 1.0, -1.5, 0.1, 12345.6789e-3, 2.2250738585072014e-308, 1e300] {
            assert_eq!(Bf::from_f64(v).to_f64(), v);
        }
    }

    #[test]
    fn arith_basics() {
        let p = Prec(128);
        let a = Bf::from_f64(1.5);
        let b = Bf::from_f64(0.25);
        assert_eq!(p.add(&a, &b).to_f64(), 1.75);
        assert_eq!(p.sub(&a, &b).to_f64(), 1.25);
        assert_eq!(p.mul(&a, &b).to_f64(), 0.375);
        assert_eq!(p.div(&a, &b).to_f64(), 6.0);
        assert_eq!(p.powi(&b, 3).to_f64(), 0.015625);
    }

    #[test]
    fn div_is_precise() {
        let p = Prec(200);
        let third = p.div(&Bf::from_i64(1), &Bf::from_i64(3));
        let one = p.mul_i64(&third, 3);
        let err = p.sub(&one, &Bf::from_i64(1));
        assert!(err.mag2() < -190);
    }
}
