//! Brute-force Mittag-Leffler partial sums at adaptive precision.
//!
//! E_{a,b}(z) = sum_k z^k / Gamma(a k + b), summed term by term in big-float
//! arithmetic with enough digits to survive the cancellation of the
//! alternating series (the largest intermediate term is ~ e^{|z|^{1/a}}).
//! The gamma arguments a*k + b are formed exactly from the dyadic (f64)
//! inputs, so the oracle evaluates the same function the f64 code sees.
//!
//! `eval` returns `None` when the required precision or term count exceeds
//! the oracle's budget; callers treat that as "oracle does not converge here".

use crate::bigfloat::Bf;
use crate::gamma::Ctx;
use std::collections::HashMap;

const MAX_DIGITS: f64 = 330.0;
const MAX_TERMS: usize = 30_000;

pub struct MlOracle {
    ctxs: HashMap<u32, Ctx>,
    /// gamma tables keyed by (alpha bits, beta bits, prec)
    tables: HashMap<(u64, u64, u32), Vec<Bf>>,
}

impl Default for MlOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl MlOracle {
    pub fn new() -> Self {
        MlOracle { ctxs: HashMap::new(), tables: HashMap::new() }
    }

    /// Largest x >= 0 such that the oracle converges for E_{alpha,beta}(-x).
    pub fn neg_domain_limit(&self, alpha: f64) -> f64 {
        // digits = 20 + log10(e) * s * 1.1 <= MAX_DIGITS, s = x^(1/alpha)
        let s_max = (MAX_DIGITS - 20.0) / (std::f64::consts::LOG10_E * 1.1);
        s_max.powf(alpha)
    }

    pub fn eval(&mut self, alpha: f64, beta: f64, z: f64) -> Option<f64> {
        assert!(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && z.is_finite());
        // cancellation scale: log of the largest term magnitude
        let s = if z == 0.0 {
            0.0
        } else {
            let l = z.abs().ln() / alpha;
            if l > 710.0 {
                // result (z>0) or intermediate terms not representable cheaply
                if z > 0.0 {
                    return None;
                }
                l.min(5000.0).exp()
            } else {
                l.exp()
            }
        };
        if z > 0.0 && s > 700.0 {
            return None; // e^s overflows f64
        }
        let digits = 20.0 + std::f64::consts::LOG10_E * s * 1.1;
        if digits > MAX_DIGITS {
            return None;
        }
        let prec_bits = (((digits + 12.0) * 3.3220) as u32 + 64).next_multiple_of(256);
        let ctx = self.ctxs.entry(prec_bits).or_insert_with(|| Ctx::new(prec_bits));
        let p = ctx.p;

        let key = (alpha.to_bits(), beta.to_bits(), prec_bits);
        let table = self.tables.entry(key).or_default();

        let zb = Bf::from_f64(z);
        let ab = Bf::from_f64(alpha);
        let bb = Bf::from_f64(beta);

        let mut sum = Bf::zero();
        let mut max_mag: i64 = i64::MIN;
        let mut zpow = Bf::from_i64(1);
        let mut small_streak = 0;
        let mut n_terms = 0usize;
        for k in 0..MAX_TERMS {
            if table.len() <= k {
                // argument formed exactly: alpha * k + beta
                let arg = p.add(&p.mul_i64(&ab, k as i64), &bb);
                table.push(ctx.gamma(&arg));
            }
            let term = p.div(&zpow, &table[k]);
            sum = p.add(&sum, &term);
            max_mag = max_mag.max(sum.mag2()).max(term.mag2());
            n_terms = k + 1;
            let thresh = max_mag.max(0) - prec_bits as i64 - 16;
            if k > 4 && term.mag2() < thresh {
                small_streak += 1;
                if small_streak >= 4 {
                    break;
                }
            } else {
                small_streak = 0;
            }
            zpow = p.mul(&zpow, &zb);
        }
        if n_terms >= MAX_TERMS {
            return None;
        }
        // roundoff: each operation truncates at 2^-prec relative to its scale
        let round_mag = max_mag + (n_terms as f64 * 4.0).log2().ceil() as i64 - prec_bits as i64;
        let v = sum.to_f64();
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return None; // cannot certify a relative error
        }
        // require certified relative error below 1e-14
        if round_mag > sum.mag2() - 47 {
            return None;
        }
        Some(v)
    }
}
