//! Gamma, reciprocal gamma, digamma and polygamma for complex arguments at
//! arbitrary precision.
//!
//! Strategy: shift the argument right until it clears a precision-dependent
//! threshold, evaluate the Stirling asymptotic series with exact Bernoulli
//! coefficients there, and undo the shift. Gamma values left of
//! `Re z = 1/2` go through the reflection formula with an argument-reduced
//! `sin(pi z)` so accuracy survives near the poles.

use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    as_small_int, complex_exp, principal_log, real_cos, real_cosh, real_from_i64,
    real_from_rational, real_ln, real_ln2, real_pi, real_sin, real_sinh, real_two_pow, to_f64,
    BigComplex, BigReal, Precision, RM,
};
use crate::Rational;

/// Minimum `Re z` from which the Stirling series reaches `bits` of accuracy.
fn shift_threshold(bits: usize) -> usize {
    (bits as f64 * 0.15) as usize + 12
}

/// Shared evaluation context: working precision plus caches for the exact
/// Bernoulli numbers and Euler's constant.
#[derive(Debug)]
pub struct GammaContext {
    prec: Precision,
    shift_threshold: usize,
    bernoulli: Arc<RwLock<Vec<Rational>>>,
    euler: OnceLock<BigReal>,
}

impl GammaContext {
    pub fn new(prec: Precision) -> Self {
        GammaContext {
            prec,
            shift_threshold: shift_threshold(prec.get()),
            bernoulli: Arc::new(RwLock::new(vec![Rational::one()])),
            euler: OnceLock::new(),
        }
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    /// The `Re z` threshold above which the asymptotic series is used directly.
    pub fn shift_threshold(&self) -> usize {
        self.shift_threshold
    }

    /// A context at a different working precision sharing the Bernoulli cache.
    pub fn at_precision(&self, prec: Precision) -> Self {
        GammaContext {
            prec,
            shift_threshold: shift_threshold(prec.get()),
            bernoulli: Arc::clone(&self.bernoulli),
            euler: OnceLock::new(),
        }
    }

    /// Exact Bernoulli number `B_n` (`B_1 = -1/2` convention).
    pub fn bernoulli(&self, n: usize) -> Rational {
        {
            let cache = self.bernoulli.read().expect("bernoulli cache");
            if n < cache.len() {
                return cache[n].clone();
            }
        }
        let mut cache = self.bernoulli.write().expect("bernoulli cache");
        while cache.len() <= n {
            let m = cache.len();
            if m % 2 == 1 && m > 1 {
                cache.push(Rational::zero());
                continue;
            }
            // sum_{k=0}^{m} C(m+1,k) B_k = 0 solved for B_m
            let mut acc = Rational::zero();
            let mut binom = BigInt::one(); // C(m+1, 0)
            for (k, b) in cache.iter().enumerate().take(m) {
                if !b.is_zero() {
                    acc += Rational::from(binom.clone()) * b;
                }
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            cache.push(-acc / Rational::from(BigInt::from(m + 1)));
        }
        cache[n].clone()
    }

    /// Euler's constant, computed once per context as `-psi(1)`.
    pub fn euler_gamma(&self) -> BigReal {
        self.euler
            .get_or_init(|| {
                let one = BigComplex::from_i64(1, self.prec);
                let psi1 = polygamma(0, &one, self).expect("psi(1) is regular");
                let mut g = psi1.re;
                g.inv_sign();
                g
            })
            .clone()
    }

    /// The constant pi at this context's precision.
    pub fn pi(&self) -> BigReal {
        real_pi(self.prec)
    }
}

/// Exact pole check: nonpositive-integer-valued argument, returned as `n >= 0`
/// for the pole at `-n`.
pub(crate) fn pole_index(z: &BigComplex) -> Option<i64> {
    if !z.im.is_zero() {
        return None;
    }
    let k = as_small_int(&z.re)?;
    if k <= 0 {
        Some(-k)
    } else {
        None
    }
}

fn shift_count(re: &BigReal, threshold: usize) -> Result<u64> {
    let r = to_f64(re);
    if r >= threshold as f64 {
        return Ok(0);
    }
    let k = (threshold as f64 - r).ceil();
    if k.is_nan() || k > 2e6 {
        return Err(Error::Domain("argument too far left for gamma evaluation".into()));
    }
    Ok(k as u64)
}

/// `sin(pi z)` with the integer part of `Re z` removed before multiplying by
/// pi, so relative accuracy survives near the zeros.
pub fn sin_pi(z: &BigComplex, prec: Precision) -> BigComplex {
    let wp = prec.plus(32);
    let half = real_two_pow(-1, wp);
    let n = z.re.add(&half, wp.get(), RM).floor();
    let frac = z.re.sub(&n, wp.get(), RM);
    let odd = !n.rem(&real_from_i64(2, wp)).is_zero();
    let pi = real_pi(wp);
    let a = pi.mul(&frac, wp.get(), RM);
    let b = pi.mul(&z.im, wp.get(), RM);
    let mut re = real_sin(&a, wp).mul(&real_cosh(&b, wp), prec.get(), RM);
    let mut im = real_cos(&a, wp).mul(&real_sinh(&b, wp), prec.get(), RM);
    if odd {
        re.inv_sign();
        im.inv_sign();
    }
    BigComplex::new(re, im)
}

/// Stirling series for `log Gamma(w)`; requires `Re w` above the threshold.
fn stirling_log_gamma(w: &BigComplex, wp: Precision, ctx: &GammaContext) -> Result<BigComplex> {
    let p = wp.get();
    let log_w = principal_log(w, wp)?;
    let half = real_two_pow(-1, wp);
    let w_minus_half = BigComplex::new(w.re.sub(&half, p, RM), w.im.clone());
    let mut acc = w_minus_half.mul(&log_w, wp).sub(w, wp);
    let ln_2pi = real_ln(&real_pi(wp), wp).add(&real_ln2(wp), p, RM);
    acc.re = acc.re.add(&ln_2pi.mul(&half, p, RM), p, RM);

    let scale = acc.abs(wp).max(&real_from_i64(1, wp));
    let tol = scale.mul(&real_two_pow(-(p as i32) - 2, wp), p, RM);

    let inv_w = BigComplex::one(wp).div(w, wp);
    let inv_w2 = inv_w.mul(&inv_w, wp);
    let mut pw = inv_w;
    let cap = p / 2 + 40;
    let mut converged = false;
    for n in 1..=cap {
        let coeff = ctx.bernoulli(2 * n) / Rational::from(BigInt::from(2 * n * (2 * n - 1)));
        let term = pw.mul_real(&real_from_rational(&coeff, wp), wp);
        acc = acc.add(&term, wp);
        if term.abs(wp) < tol {
            converged = true;
            break;
        }
        pw = pw.mul(&inv_w2, wp);
    }
    if !converged {
        return Err(Error::Inconsistency(
            "stirling series did not reach tolerance; shift threshold too small".into(),
        ));
    }
    Ok(acc)
}

/// Log-gamma by shift and Stirling series: continuous and real on `(0, inf)`;
/// elsewhere the branch follows the accumulated principal logarithms of the
/// shift factors.
pub fn log_gamma(z: &BigComplex, ctx: &GammaContext) -> Result<BigComplex> {
    if let Some(n) = pole_index(z) {
        return Err(Error::GammaPole { n });
    }
    let wp = ctx.prec.plus(64);
    let k = shift_count(&z.re, shift_threshold(wp.get()))?;
    let mut log_sum = BigComplex::zero(wp);
    let mut w = z.with_precision(wp);
    for _ in 0..k {
        log_sum = log_sum.add(&principal_log(&w, wp)?, wp);
        w = w.add(&BigComplex::one(wp), wp);
    }
    let st = stirling_log_gamma(&w, wp, ctx)?;
    Ok(st.sub(&log_sum, wp).with_precision(ctx.prec))
}

/// Gamma function value. Reflects to the right half plane for `Re z < 1/2`.
pub fn gamma(z: &BigComplex, ctx: &GammaContext) -> Result<BigComplex> {
    if let Some(n) = pole_index(z) {
        return Err(Error::GammaPole { n });
    }
    let wp = ctx.prec.plus(64);
    let half = real_two_pow(-1, wp);
    if z.re >= half {
        let lg = log_gamma(&z.with_precision(wp), &ctx.at_precision(wp))?;
        return Ok(complex_exp(&lg, ctx.prec));
    }
    // Gamma(z) = pi / (sin(pi z) * Gamma(1 - z))
    let one_minus = BigComplex::one(wp).sub(&z.with_precision(wp), wp);
    let g = gamma(&one_minus, &ctx.at_precision(wp))?;
    let denom = sin_pi(z, wp).mul(&g, wp);
    Ok(BigComplex::from_real(real_pi(wp)).div(&denom, ctx.prec))
}

/// Entire reciprocal gamma; exactly zero at the poles of gamma.
pub fn rgamma(z: &BigComplex, ctx: &GammaContext) -> BigComplex {
    if pole_index(z).is_some() {
        return BigComplex::zero(ctx.prec);
    }
    let wp = ctx.prec.plus(64);
    let half = real_two_pow(-1, wp);
    if z.re >= half {
        let lg = log_gamma(&z.with_precision(wp), &ctx.at_precision(wp)).expect("not a pole");
        return complex_exp(&lg.neg(), ctx.prec);
    }
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    let one_minus = BigComplex::one(wp).sub(&z.with_precision(wp), wp);
    let g = gamma(&one_minus, &ctx.at_precision(wp)).expect("1 - z is right of the poles");
    sin_pi(z, wp).mul(&g, wp).div_real(&real_pi(wp), ctx.prec)
}

/// `w^(-m)` for small positive `m`.
fn inv_int_pow(w: &BigComplex, m: u32, wp: Precision) -> BigComplex {
    let inv = BigComplex::one(wp).div(w, wp);
    let mut acc = inv.clone();
    for _ in 1..m {
        acc = acc.mul(&inv, wp);
    }
    acc
}

fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    Rational::from(acc)
}

/// Asymptotic polygamma series at `w`; requires `Re w` above the threshold.
fn polygamma_asymptotic(
    order: u32,
    w: &BigComplex,
    wp: Precision,
    ctx: &GammaContext,
) -> Result<BigComplex> {
    let p = wp.get();
    let m = order;
    // head terms; the Bernoulli tail enters with sign `tail_sign`
    let (mut acc, tail_sign) = if m == 0 {
        let log_w = principal_log(w, wp)?;
        let half = real_two_pow(-1, wp);
        (log_w.sub(&inv_int_pow(w, 1, wp).mul_real(&half, wp), wp), -1)
    } else {
        let lead = inv_int_pow(w, m, wp).mul_real(&real_from_rational(&factorial(m - 1), wp), wp);
        let half_fact = factorial(m) / Rational::from(BigInt::from(2));
        let second = inv_int_pow(w, m + 1, wp).mul_real(&real_from_rational(&half_fact, wp), wp);
        (lead.add(&second, wp), 1)
    };
    let scale = acc.abs(wp).max(&real_two_pow(-(p as i32) / 2, wp));
    let tol = scale.mul(&real_two_pow(-(p as i32) - 2, wp), p, RM);

    let inv_w2 = {
        let i = BigComplex::one(wp).div(w, wp);
        i.mul(&i, wp)
    };
    let mut pw = inv_int_pow(w, m + 2, wp); // w^-(2n+m) at n = 1
    let cap = p / 2 + 40;
    let mut converged = false;
    for n in 1..=cap as u32 {
        // B_2n * (2n+m-1)!/(2n)!  (for m = 0 this reads B_2n / (2n))
        let mut coeff = ctx.bernoulli(2 * n as usize);
        if m == 0 {
            coeff /= Rational::from(BigInt::from(2 * n));
        } else {
            for j in 1..m {
                coeff *= Rational::from(BigInt::from(2 * n + j));
            }
        }
        let term = pw.mul_real(&real_from_rational(&coeff, wp), wp);
        acc = if tail_sign < 0 { acc.sub(&term, wp) } else { acc.add(&term, wp) };
        if term.abs(wp) < tol {
            converged = true;
            break;
        }
        pw = pw.mul(&inv_w2, wp);
    }
    if !converged {
        return Err(Error::Inconsistency(
            "polygamma series did not reach tolerance; shift threshold too small".into(),
        ));
    }
    if m >= 1 && m.is_multiple_of(2) {
        Ok(acc.neg()) // overall (-1)^(m-1)
    } else {
        Ok(acc)
    }
}

/// `order`-th derivative of digamma (`order = 0` is digamma itself).
pub fn polygamma(order: u32, z: &BigComplex, ctx: &GammaContext) -> Result<BigComplex> {
    if let Some(n) = pole_index(z) {
        return Err(Error::GammaPole { n });
    }
    let wp = ctx.prec.plus(64);
    let threshold = shift_threshold(wp.get()) + 2 * order as usize;
    let k = shift_count(&z.re, threshold)?;
    let mut tail = BigComplex::zero(wp);
    let mut w = z.with_precision(wp);
    for _ in 0..k {
        tail = tail.add(&inv_int_pow(&w, order + 1, wp), wp);
        w = w.add(&BigComplex::one(wp), wp);
    }
    let head = polygamma_asymptotic(order, &w, wp, ctx)?;
    // psi^(m)(z) = psi^(m)(z+k) - (-1)^m m! sum_j (z+j)^-(m+1)
    let m_fact = real_from_rational(&factorial(order), wp);
    let mut signed_tail = tail.mul_real(&m_fact, wp);
    if order % 2 == 1 {
        signed_tail = signed_tail.neg();
    }
    Ok(head.sub(&signed_tail, wp).with_precision(ctx.prec))
}

// ---------------------------------------------------------------------------
// Exact-rational front ends
// ---------------------------------------------------------------------------

/// True when the rational is a pole of gamma (a nonpositive integer).
pub fn rational_is_gamma_pole(r: &Rational) -> bool {
    r.is_integer() && !r.numer().is_positive()
}

/// Gamma of an exact rational argument.
pub fn gamma_rat(r: &Rational, ctx: &GammaContext) -> Result<BigComplex> {
    if rational_is_gamma_pole(r) {
        let n = i64::try_from(-r.numer()).unwrap_or(i64::MAX);
        return Err(Error::GammaPole { n });
    }
    gamma(&BigComplex::from_rational(r, ctx.prec.plus(8)), ctx)
}

/// Reciprocal gamma of an exact rational argument; exact zero at the poles.
pub fn rgamma_rat(r: &Rational, ctx: &GammaContext) -> BigComplex {
    if rational_is_gamma_pole(r) {
        return BigComplex::zero(ctx.prec);
    }
    rgamma(&BigComplex::from_rational(r, ctx.prec.plus(8)), ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx(bits: usize) -> GammaContext {
        GammaContext::new(Precision::bits(bits))
    }

    fn rational(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn rel_err(got: &BigComplex, expect: &BigComplex, prec: Precision) -> BigReal {
        let d = got.dist(expect, prec);
        let s = expect.abs(prec).max(&real_two_pow(-2 * prec.get() as i32, prec));
        d.div(&s, prec.get(), RM)
    }

    #[test]
    fn bernoulli_numbers_are_exact() {
        let c = ctx(64);
        assert_eq!(c.bernoulli(0), Rational::one());
        assert_eq!(c.bernoulli(1), rational(-1, 2));
        assert_eq!(c.bernoulli(2), rational(1, 6));
        assert_eq!(c.bernoulli(3), Rational::zero());
        assert_eq!(c.bernoulli(4), rational(-1, 30));
        assert_eq!(c.bernoulli(12), rational(-691, 2730));
    }

    #[test]
    fn log_gamma_of_five_is_ln_24() {
        let prec = Precision::bits(256);
        let c = ctx(256);
        let lg = log_gamma(&BigComplex::from_i64(5, prec), &c).unwrap();
        let expect = real_ln(&real_from_i64(24, prec), prec);
        let d = lg.re.sub(&expect, prec.get(), RM).abs();
        assert!(d < real_two_pow(-240, prec));
        assert!(lg.im.is_zero() || lg.im.exponent().unwrap() < -200);
    }

    #[test]
    fn log_gamma_of_half_is_half_ln_pi() {
        let prec = Precision::bits(256);
        let c = ctx(256);
        let z = BigComplex::from_rational(&rational(1, 2), prec);
        let lg = log_gamma(&z, &c).unwrap();
        let expect = real_ln(&real_pi(prec), prec).mul(&real_two_pow(-1, prec), prec.get(), RM);
        let d = lg.re.sub(&expect, prec.get(), RM).abs();
        assert!(d < real_two_pow(-240, prec));
    }

    #[test]
    fn gamma_10_3_satisfies_product_recursion() {
        // Gamma(10/3) = (7/3)(4/3)(1/3) Gamma(1/3), checked at 60 digits
        let prec = Precision::from_digits(60);
        let c = GammaContext::new(prec);
        let g103 = gamma(&BigComplex::from_rational(&rational(10, 3), prec), &c).unwrap();
        let g13 = gamma(&BigComplex::from_rational(&rational(1, 3), prec), &c).unwrap();
        let factor = real_from_rational(&(rational(7, 3) * rational(4, 3) * rational(1, 3)), prec);
        let expect = g13.mul_real(&factor, prec);
        assert!(rel_err(&g103, &expect, prec) < real_two_pow(-(prec.get() as i32) + 10, prec));
    }

    #[test]
    fn rgamma_at_poles_and_one() {
        let prec = Precision::bits(128);
        let c = ctx(128);
        assert!(rgamma(&BigComplex::from_i64(0, prec), &c).is_zero());
        assert!(rgamma(&BigComplex::from_i64(-3, prec), &c).is_zero());
        let one = rgamma(&BigComplex::from_i64(1, prec), &c);
        assert!(rel_err(&one, &BigComplex::one(prec), prec) < real_two_pow(-110, prec));
    }

    #[test]
    fn gamma_of_minus_five_halves() {
        // Gamma(-5/2) = -8 sqrt(pi) / 15
        let prec = Precision::bits(256);
        let c = ctx(256);
        let g = gamma(&BigComplex::from_rational(&rational(-5, 2), prec), &c).unwrap();
        let sqrt_pi = real_pi(prec).sqrt(prec.get(), RM);
        let expect = BigComplex::from_real(
            sqrt_pi
                .mul(&real_from_i64(-8, prec), prec.get(), RM)
                .div(&real_from_i64(15, prec), prec.get(), RM),
        );
        assert!(rel_err(&g, &expect, prec) < real_two_pow(-240, prec));
    }

    #[test]
    fn digamma_at_one_is_minus_euler() {
        let prec = Precision::from_digits(60);
        let c = GammaContext::new(prec);
        let psi1 = polygamma(0, &BigComplex::from_i64(1, prec), &c).unwrap();
        let sum = psi1.re.add(&c.euler_gamma(), prec.get(), RM);
        assert!(sum.abs() < real_two_pow(-(prec.get() as i32) + 8, prec));
        // independent anchor: first 40 published digits of Euler's constant
        let anchor =
            crate::numeric::parse_complex("0.5772156649015328606065120900824024310422", prec)
                .unwrap();
        let d = anchor.re.sub(&c.euler_gamma(), prec.get(), RM).abs();
        assert!(d < real_two_pow(-128, prec), "euler constant mismatch");
    }

    #[test]
    fn digamma_at_half() {
        // psi(1/2) = -gamma - 2 ln 2
        let prec = Precision::bits(256);
        let c = ctx(256);
        let psi = polygamma(0, &BigComplex::from_rational(&rational(1, 2), prec), &c).unwrap();
        let expect = c
            .euler_gamma()
            .add(&real_ln2(prec).mul(&real_from_i64(2, prec), prec.get(), RM), prec.get(), RM);
        let sum = psi.re.add(&expect, prec.get(), RM);
        assert!(sum.abs() < real_two_pow(-240, prec));
    }

    #[test]
    fn trigamma_at_one_is_pi_squared_over_six() {
        let prec = Precision::bits(256);
        let c = ctx(256);
        let t = polygamma(1, &BigComplex::from_i64(1, prec), &c).unwrap();
        let pi = real_pi(prec);
        let expect = pi.mul(&pi, prec.get(), RM).div(&real_from_i64(6, prec), prec.get(), RM);
        let d = t.re.sub(&expect, prec.get(), RM).abs();
        assert!(d < real_two_pow(-240, prec));
    }

    #[test]
    fn polygamma_rejects_poles() {
        let prec = Precision::bits(128);
        let c = ctx(128);
        assert!(matches!(
            polygamma(0, &BigComplex::from_i64(-4, prec), &c),
            Err(Error::GammaPole { n: 4 })
        ));
        assert!(matches!(
            log_gamma(&BigComplex::from_i64(0, prec), &c),
            Err(Error::GammaPole { n: 0 })
        ));
    }

    fn random_point(rng: &mut StdRng, prec: Precision) -> BigComplex {
        // keep clear of the real axis so reflection and recurrence stay regular
        let re = rng.gen_range(-8.0..12.0);
        let im = rng.gen_range(0.3..6.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        BigComplex::new(
            crate::numeric::parse_complex(&format!("{re:.6}"), prec).unwrap().re,
            crate::numeric::parse_complex(&format!("{im:.6}"), prec).unwrap().re,
        )
    }

    #[test]
    fn gamma_recurrence_on_random_grid() {
        let prec = Precision::bits(192);
        let c = ctx(192);
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let z = random_point(&mut rng, prec);
            let g = gamma(&z, &c).unwrap();
            let g1 = gamma(&z.add(&BigComplex::one(prec), prec), &c).unwrap();
            let expect = g.mul(&z, prec);
            assert!(
                rel_err(&g1, &expect, prec) < real_two_pow(-(prec.get() as i32) + 12, prec),
                "recurrence failed at {:?}",
                z
            );
        }
    }

    #[test]
    fn gamma_reflection_on_random_grid() {
        let prec = Precision::bits(192);
        let c = ctx(192);
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..10 {
            let z = random_point(&mut rng, prec);
            let g = gamma(&z, &c).unwrap();
            let gr = gamma(&BigComplex::one(prec).sub(&z, prec), &c).unwrap();
            let lhs = g.mul(&gr, prec).mul(&sin_pi(&z, prec), prec);
            let pi = BigComplex::from_real(real_pi(prec));
            assert!(
                rel_err(&lhs, &pi, prec) < real_two_pow(-(prec.get() as i32) + 12, prec),
                "reflection failed at {:?}",
                z
            );
        }
    }

    #[test]
    fn rgamma_inverts_log_gamma() {
        let prec = Precision::bits(192);
        let c = ctx(192);
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..8 {
            let z = random_point(&mut rng, prec);
            let r = rgamma(&z, &c);
            let lg = log_gamma(&z, &c).unwrap();
            let back = r.mul(&complex_exp(&lg, prec), prec);
            assert!(rel_err(&back, &BigComplex::one(prec), prec)
                < real_two_pow(-(prec.get() as i32) + 12, prec));
        }
    }

    #[test]
    fn polygamma_recurrence() {
        let prec = Precision::bits(192);
        let c = ctx(192);
        let z = BigComplex::new(
            real_from_rational(&rational(7, 4), prec),
            real_from_rational(&rational(3, 5), prec),
        );
        for m in 0..4u32 {
            let a = polygamma(m, &z.add(&BigComplex::one(prec), prec), &c).unwrap();
            let b = polygamma(m, &z, &c).unwrap();
            // psi^(m)(z+1) - psi^(m)(z) = (-1)^m m! / z^(m+1)
            let mut corr =
                inv_int_pow(&z, m + 1, prec).mul_real(&real_from_rational(&factorial(m), prec), prec);
            if m % 2 == 1 {
                corr = corr.neg();
            }
            let lhs = a.sub(&b, prec);
            let tol = corr
                .abs(prec)
                .mul(&real_two_pow(-(prec.get() as i32) + 16, prec), prec.get(), RM);
            assert!(lhs.dist(&corr, prec) < tol, "polygamma recurrence failed at order {m}");
        }
    }

    #[test]
    fn shared_context_is_thread_safe() {
        let prec = Precision::from_digits(40);
        let c = GammaContext::new(prec);
        let z = BigComplex::from_rational(&rational(10, 3), prec);
        let base = gamma(&z, &c).unwrap();
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| {
                    let cr = &c;
                    let zr = &z;
                    s.spawn(move || gamma(zr, cr).unwrap())
                })
                .collect();
            for h in handles {
                let g = h.join().unwrap();
                assert_eq!(
                    crate::numeric::round_to_digits(&g, 38),
                    crate::numeric::round_to_digits(&base, 38)
                );
            }
        });
    }
}
