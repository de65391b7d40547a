//! Elementary transcendentals and the gamma function at arbitrary precision.
//!
//! Gamma uses the Stirling series with exact Bernoulli numbers (from tangent
//! numbers via the Knuth–Buckholtz recurrence) after shifting the argument up
//! far enough that the divergent tail starts below the target precision.

use crate::bigfloat::{Bf, Prec};
use num_bigint::BigInt;
use num_traits::One;

/// Shared constants and Bernoulli cache for one working precision.
pub struct Ctx {
    pub p: Prec,
    ln2: Bf,
    half_ln_two_pi: Bf,
    /// bern[m-1] = B_{2m} as a big float
    bern: Vec<Bf>,
    /// arguments below this get shifted up before Stirling
    y0: f64,
}

impl Ctx {
    pub fn new(prec_bits: u32) -> Self {
        let p = Prec(prec_bits);
        let ln2 = ln2(p);
        let pi = machin_pi(p);
        // (1/2) ln(2 pi) = (1/2)(ln pi + ln 2); ln pi via ln(pi/2) + ln 2
        let y0 = prec_bits as f64 / 9.06 * 1.25 + 16.0;
        let n_bern = (3.2 * y0) as usize + 24;
        let bern = bernoulli_table(p, n_bern);
        let ln_pi_half = ln_near_one(p, &p.shl(&pi, -1), &ln2);
        let ln_pi = p.add(&ln_pi_half, &ln2);
        let half_ln_two_pi = p.shl(&p.add(&ln_pi, &ln2), -1);
        Ctx { p, ln2, half_ln_two_pi, bern, y0 }
    }

    pub fn prec_bits(&self) -> u32 {
        self.p.0
    }

    /// exp(x) by 2^k reduction and Taylor.
    pub fn exp(&self, x: &Bf) -> Bf {
        let p = self.p;
        if x.is_zero() {
            return Bf::from_i64(1);
        }
        // x = m ln2 + r, |r| <= ln2/2
        let m = (x.to_f64() / std::f64::consts::LN_2).round();
        let r = p.sub(x, &p.mul(&Bf::from_f64(m), &self.ln2));
        // further halve k times
        let k = 24i64;
        let rs = p.shl(&r, -k);
        let mut term = Bf::from_i64(1);
        let mut sum = Bf::from_i64(1);
        let mut n = 1i64;
        loop {
            term = p.div_i64(&p.mul(&term, &rs), n);
            if term.mag2() < sum.mag2().saturating_sub(p.0 as i64 + 8) {
                break;
            }
            sum = p.add(&sum, &term);
            n += 1;
        }
        for _ in 0..k {
            sum = p.mul(&sum, &sum);
        }
        p.shl(&sum, m as i64)
    }

    /// natural log for y > 0.
    pub fn ln(&self, y: &Bf) -> Bf {
        assert!(!y.is_zero() && !y.is_negative());
        let p = self.p;
        // normalize to [1, 2)
        let m = y.mag2() - 1;
        let z = p.shl(y, -m);
        let lnz = ln_near_one(p, &z, &self.ln2);
        p.add(&lnz, &p.mul_i64(&self.ln2, m))
    }

    /// ln Gamma(y) for y > 0.
    pub fn ln_gamma(&self, y: &Bf) -> Bf {
        let p = self.p;
        // shift up: lnG(y) = lnG(y + s) - ln(prod_{j<s} (y+j))
        let mut shift_log = Bf::zero();
        let mut ybig = y.clone();
        let mut yf = y.to_f64();
        if yf < self.y0 {
            let s = (self.y0 - yf).ceil() as i64;
            let mut prod = Bf::from_i64(1);
            for j in 0..s {
                prod = p.mul(&prod, &p.add(y, &Bf::from_i64(j)));
            }
            shift_log = self.ln(&prod);
            ybig = p.add(y, &Bf::from_i64(s));
            yf += s as f64;
        }
        let _ = yf;
        // Stirling: (y - 1/2) ln y - y + (1/2) ln 2pi + sum B_2m / (2m(2m-1) y^{2m-1})
        let ln_y = self.ln(&ybig);
        let mut acc = p.mul(&p.sub(&ybig, &Bf::from_f64(0.5)), &ln_y);
        acc = p.sub(&acc, &ybig);
        acc = p.add(&acc, &self.half_ln_two_pi);
        let inv_y = p.div(&Bf::from_i64(1), &ybig);
        let inv_y2 = p.mul(&inv_y, &inv_y);
        let mut ypow = inv_y.clone(); // y^{-(2m-1)}
        let mut tail = Bf::zero();
        for (mi, b2m) in self.bern.iter().enumerate() {
            let m = (mi + 1) as i64;
            let term = p.div_i64(&p.mul(b2m, &ypow), 2 * m * (2 * m - 1));
            if term.mag2() < acc.mag2().saturating_sub(p.0 as i64 + 8) {
                tail = p.add(&tail, &term);
                break;
            }
            tail = p.add(&tail, &term);
            ypow = p.mul(&ypow, &inv_y2);
        }
        acc = p.add(&acc, &tail);
        p.sub(&acc, &shift_log)
    }

    pub fn gamma(&self, y: &Bf) -> Bf {
        self.exp(&self.ln_gamma(y))
    }
}

/// ln z for z in [1, 2) via atanh series, plus ln2 supplied for the caller.
fn ln_near_one(p: Prec, z: &Bf, _ln2: &Bf) -> Bf {
    let one = Bf::from_i64(1);
    let num = p.sub(z, &one);
    if num.is_zero() {
        return Bf::zero();
    }
    let u = p.div(&num, &p.add(z, &one));
    let u2 = p.mul(&u, &u);
    let mut term = u.clone();
    let mut sum = u.clone();
    let mut k = 1i64;
    loop {
        term = p.mul(&term, &u2);
        let add = p.div_i64(&term, 2 * k + 1);
        if add.mag2() < sum.mag2().saturating_sub(p.0 as i64 + 8) {
            break;
        }
        sum = p.add(&sum, &add);
        k += 1;
    }
    p.shl(&sum, 1)
}

/// ln 2 = 2 atanh(1/3).
fn ln2(p: Prec) -> Bf {
    p.shl(&atanh_inv(p, 3), 1)
}

/// pi = 16 atan(1/5) - 4 atan(1/239).
fn machin_pi(p: Prec) -> Bf {
    let a = atan_inv(p, 5);
    let b = atan_inv(p, 239);
    p.sub(&p.shl(&a, 4), &p.shl(&b, 2))
}

fn atan_inv(p: Prec, q: i64) -> Bf {
    let x = p.div_i64(&Bf::from_i64(1), q);
    let x2 = p.mul(&x, &x);
    let mut term = x.clone();
    let mut sum = x.clone();
    let mut k = 1i64;
    loop {
        term = p.mul(&term, &x2);
        let add = p.div_i64(&term, 2 * k + 1);
        if add.mag2() < sum.mag2().saturating_sub(p.0 as i64 + 8) {
            break;
        }
        if k % 2 == 1 {
            sum = p.sub(&sum, &add);
        } else {
            sum = p.add(&sum, &add);
        }
        k += 1;
    }
    sum
}

fn atanh_inv(p: Prec, q: i64) -> Bf {
    let x = p.div_i64(&Bf::from_i64(1), q);
    let x2 = p.mul(&x, &x);
    let mut term = x.clone();
    let mut sum = x.clone();
    let mut k = 1i64;
    loop {
        term = p.mul(&term, &x2);
        let add = p.div_i64(&term, 2 * k + 1);
        if add.mag2() < sum.mag2().saturating_sub(p.0 as i64 + 8) {
            break;
        }
        sum = p.add(&sum, &add);
        k += 1;
    }
    sum
}

/// Tangent numbers T_1..T_n by the Knuth–Buckholtz recurrence (exact integers).
fn tangent_numbers(n: usize) -> Vec<BigInt> {
    let mut t: Vec<BigInt> = Vec::with_capacity(n);
    t.push(BigInt::one());
    for k in 1..n {
        let prev = t[k - 1].clone();
        t.push(prev * k);
    }
    for k in 1..n {
        for j in k..n {
            let a = &t[j - 1] * (j - k);
            let b = &t[j] * (j - k + 2);
            t[j] = a + b;
        }
    }
    t
}

/// B_{2m} for m = 1..=n as big floats: |B_2m| = 2m T_m / (4^m (4^m - 1)), sign (-1)^{m+1}.
fn bernoulli_table(p: Prec, n: usize) -> Vec<Bf> {
    let t = tangent_numbers(n);
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let num = Bf { mant: &t[m - 1] * (2 * m as i64), exp: 0 };
        let four_m = BigInt::one() << (2 * m);
        let den = Bf { mant: (&four_m - BigInt::one()) * &four_m, exp: 0 };
        let mut b = p.div(&num, &den);
        if m % 2 == 0 {
            b = b.neg();
        }
        out.push(b);
    }
    out
}
