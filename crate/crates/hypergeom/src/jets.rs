//! Truncated Laurent series in a formal parameter ("jets") over complex
//! coefficients.
//!
//! A jet stores coefficients `a_0 .. a_(n-1)` for `sum_k a_k eps^(v+k)` and
//! remembers the exclusive truncation exponent `v + n`: the series is known
//! modulo `eps^(v+n)`. Gamma factors of perturbed arguments expand to jets,
//! including at the poles of gamma where the jet picks up valuation -1; this
//! is what turns the parameter limits of the degenerate connection formulas
//! into finite arithmetic.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{complex_exp, real_from_rational, BigComplex, Precision};
use crate::special::{gamma, pole_index, polygamma, GammaContext};
use crate::Rational;

/// Guard precision for jet arithmetic over a caller precision.
pub fn jet_precision(caller: Precision, order: usize) -> Precision {
    caller.plus(32 + 10 * order)
}

/// Truncated Laurent series `sum_k coeffs[k] * eps^(valuation + k)`.
#[derive(Debug, Clone)]
pub struct LaurentJet {
    valuation: i64,
    coeffs: Vec<BigComplex>,
    work: Precision,
}

impl LaurentJet {
    pub fn new(valuation: i64, coeffs: Vec<BigComplex>, work: Precision) -> Self {
        assert!(!coeffs.is_empty(), "jet order must be at least 1");
        LaurentJet { valuation, coeffs, work }
    }

    /// Constant jet `c + O(eps^order)`.
    pub fn constant(c: BigComplex, order: usize, work: Precision) -> Self {
        let mut coeffs = vec![BigComplex::zero(work); order];
        coeffs[0] = c;
        LaurentJet { valuation: 0, coeffs, work }
    }

    /// The exact zero jet (absorbing element; never clips truncation).
    pub fn zero(work: Precision) -> Self {
        LaurentJet { valuation: 0, coeffs: vec![BigComplex::zero(work)], work }
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Exclusive truncation exponent: coefficients at `eps^k` are known for
    /// `valuation <= k < upper`.
    pub fn upper(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    pub fn work_precision(&self) -> Precision {
        self.work
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `eps^k`; zero below the valuation, `None` at or above
    /// the truncation boundary (unknown).
    pub fn coeff(&self, k: i64) -> Option<BigComplex> {
        if self.is_exactly_zero() {
            return Some(BigComplex::zero(self.work));
        }
        if k >= self.upper() {
            return None;
        }
        if k < self.valuation {
            return Some(BigComplex::zero(self.work));
        }
        Some(self.coeffs[(k - self.valuation) as usize].clone())
    }

    /// Drops exactly-zero leading coefficients (always keeps one).
    pub fn strip_exact_zeros(mut self) -> Self {
        let mut start = 0;
        while start + 1 < self.coeffs.len() && self.coeffs[start].is_zero() {
            start += 1;
        }
        if start > 0 {
            self.valuation += start as i64;
            self.coeffs.drain(..start);
        }
        self
    }

    pub fn neg(&self) -> Self {
        LaurentJet {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            work: self.work,
        }
    }

    pub fn scale(&self, f: &BigComplex) -> Self {
        LaurentJet {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| c.mul(f, self.work)).collect(),
            work: self.work,
        }
    }

    /// Multiplication by the exact monomial `eps^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentJet { valuation: self.valuation + k, coeffs: self.coeffs.clone(), work: self.work }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_exactly_zero() {
            return rhs.clone();
        }
        if rhs.is_exactly_zero() {
            return self.clone();
        }
        let val = self.valuation.min(rhs.valuation);
        let upper = self.upper().min(rhs.upper());
        assert!(upper > val, "jets do not overlap");
        let mut coeffs = Vec::with_capacity((upper - val) as usize);
        for k in val..upper {
            let a = self.coeff(k).unwrap();
            let b = rhs.coeff(k).unwrap();
            coeffs.push(a.add(&b, self.work));
        }
        LaurentJet { valuation: val, coeffs, work: self.work }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        jet_mul(self, rhs)
    }

    /// Multiplicative inverse; the leading coefficient (after stripping exact
    /// zeros) must be nonzero.
    pub fn invert(&self) -> Result<Self> {
        let a = self.clone().strip_exact_zeros();
        if a.coeffs[0].is_zero() {
            return Err(Error::Domain("inverse of a zero jet".into()));
        }
        let wp = a.work;
        let n = a.coeffs.len();
        let inv0 = a.coeffs[0].recip(wp);
        let mut out = vec![BigComplex::zero(wp); n];
        out[0] = inv0.clone();
        for k in 1..n {
            let mut acc = BigComplex::zero(wp);
            for j in 1..=k {
                acc = acc.add(&a.coeffs[j].mul(&out[k - j], wp), wp);
            }
            out[k] = acc.mul(&inv0, wp).neg();
        }
        Ok(LaurentJet { valuation: -a.valuation, coeffs: out, work: wp })
    }

    /// Evaluates the jet at a concrete epsilon.
    pub fn eval_at(&self, eps: &BigComplex, prec: Precision) -> BigComplex {
        let wp = prec.plus(32);
        let mut acc = BigComplex::zero(wp);
        let mut pw = BigComplex::one(wp);
        for c in &self.coeffs {
            acc = acc.add(&c.mul(&pw, wp), wp);
            pw = pw.mul(eps, wp);
        }
        let step = if self.valuation >= 0 { eps.clone() } else { eps.recip(wp) };
        let mut lead = BigComplex::one(wp);
        for _ in 0..self.valuation.unsigned_abs() {
            lead = lead.mul(&step, wp);
        }
        acc.mul(&lead, prec)
    }

    /// Largest coefficient magnitude, for relative tolerance checks.
    pub fn max_abs_coeff(&self, prec: Precision) -> crate::numeric::BigReal {
        let mut m = crate::numeric::real_from_i64(0, prec);
        for c in &self.coeffs {
            m = m.max(&c.abs(prec));
        }
        m
    }
}

/// Cauchy product truncated to the common coverage.
pub fn jet_mul(x: &LaurentJet, y: &LaurentJet) -> LaurentJet {
    let wp = x.work;
    if x.is_exactly_zero() || y.is_exactly_zero() {
        return LaurentJet::zero(wp);
    }
    let val = x.valuation + y.valuation;
    let upper = (x.valuation + y.upper()).min(y.valuation + x.upper());
    let len = (upper - val) as usize;
    let mut coeffs = vec![BigComplex::zero(wp); len];
    for (i, a) in x.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.coeffs.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if !b.is_zero() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b, wp), wp);
            }
        }
    }
    LaurentJet { valuation: val, coeffs, work: wp }
}

/// Exponential of a jet with no pole part; the constant term is
/// exponentiated numerically and the rest by the power series.
pub fn jet_exp(x: &LaurentJet) -> Result<LaurentJet> {
    let wp = x.work;
    if x.valuation < 0 {
        for k in x.valuation..0 {
            if let Some(c) = x.coeff(k) {
                if !c.is_zero() {
                    return Err(Error::Domain("exp of a jet with a pole part".into()));
                }
            }
        }
    }
    let upper = x.upper();
    if upper <= 0 {
        return Ok(LaurentJet::constant(BigComplex::one(wp), 1, wp));
    }
    let len = upper as usize;
    let constant = x.coeff(0).unwrap_or_else(|| BigComplex::zero(wp));
    // h = x - constant term; valuation >= 1
    let mut h = vec![BigComplex::zero(wp); len];
    for k in 1..upper {
        if let Some(c) = x.coeff(k) {
            h[k as usize] = c;
        }
    }
    let mut acc = vec![BigComplex::zero(wp); len];
    acc[0] = BigComplex::one(wp);
    let mut power = vec![BigComplex::zero(wp); len];
    power[0] = BigComplex::one(wp);
    let mut inv_kfact = Rational::from(num_bigint::BigInt::from(1));
    for k in 1..len {
        let mut next = vec![BigComplex::zero(wp); len];
        for (i, a) in power.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in h.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    next[i + j] = next[i + j].add(&a.mul(b, wp), wp);
                }
            }
        }
        power = next;
        inv_kfact /= Rational::from(num_bigint::BigInt::from(k));
        let f = real_from_rational(&inv_kfact, wp);
        for (slot, p) in acc.iter_mut().zip(power.iter()) {
            if !p.is_zero() {
                *slot = slot.add(&p.mul_real(&f, wp), wp);
            }
        }
    }
    let mut out = LaurentJet { valuation: 0, coeffs: acc, work: wp };
    if !constant.is_zero() {
        out = out.scale(&complex_exp(&constant, wp));
    }
    Ok(out)
}

/// Jet of `Gamma(z0 + a*eps)` of length `order`.
///
/// Away from the poles this is
/// `Gamma(z0) * exp(sum_(k>=1) psi^(k-1)(z0) (a eps)^k / k!)`. At a pole
/// `z0 = -m` the shift identity
/// `Gamma(z) = Gamma(z+m+1) / (z (z+1) ... (z+m))` is applied in jet
/// arithmetic, producing valuation -1.
pub fn gamma_jet(
    z0: &BigComplex,
    a: &Rational,
    order: usize,
    ctx: &GammaContext,
) -> Result<LaurentJet> {
    assert!(order >= 1);
    let work = jet_precision(ctx.prec(), order);
    let wctx = ctx.at_precision(work);
    if let Some(m) = pole_index(z0) {
        if a.is_zero() {
            return Err(Error::Domain("zero perturbation direction at a gamma pole".into()));
        }
        if m > 100_000 {
            return Err(Error::Domain("gamma pole too deep for jet shift".into()));
        }
        let one = BigComplex::one(work);
        let numer = regular_gamma_jet(&one, a, order + 1, &wctx)?;
        // denominator: prod_{k=0..m} ((k - m) + a eps); constant term exactly 0
        let a_val = BigComplex::from_rational(a, work);
        let mut denom = LaurentJet::constant(BigComplex::one(work), order + 1, work);
        for k in 0..=m {
            let mut coeffs = vec![BigComplex::zero(work); order + 1];
            coeffs[0] = BigComplex::from_i64(k - m, work);
            coeffs[1] = a_val.clone();
            denom = denom.mul(&LaurentJet::new(0, coeffs, work));
        }
        return Ok(numer.mul(&denom.invert()?));
    }
    regular_gamma_jet(z0, a, order, &wctx)
}

fn regular_gamma_jet(
    z0: &BigComplex,
    a: &Rational,
    order: usize,
    wctx: &GammaContext,
) -> Result<LaurentJet> {
    let work = wctx.prec();
    let g0 = gamma(z0, wctx)?;
    if order == 1 {
        return Ok(LaurentJet::constant(g0, 1, work));
    }
    let mut logs = vec![BigComplex::zero(work); order];
    let a_real = real_from_rational(a, work);
    let mut a_pow = a_real.clone();
    let mut inv_kfact = Rational::from(num_bigint::BigInt::from(1));
    for (k, slot) in logs.iter_mut().enumerate().skip(1) {
        let psi = polygamma(k as u32 - 1, z0, wctx)?;
        inv_kfact /= Rational::from(num_bigint::BigInt::from(k));
        let f = real_from_rational(&inv_kfact, work);
        *slot = psi.mul_real(&a_pow, work).mul_real(&f, work);
        a_pow = a_pow.mul(&a_real, work.get(), crate::numeric::RM);
    }
    let exp_part = jet_exp(&LaurentJet::new(0, logs, work))?;
    Ok(exp_part.scale(&g0))
}

/// Jet of `1/Gamma(z0 + a*eps)`; entire, so poles of gamma become zeros of
/// order 1 (or the exact zero jet when `a = 0`).
pub fn rgamma_jet(
    z0: &BigComplex,
    a: &Rational,
    order: usize,
    ctx: &GammaContext,
) -> Result<LaurentJet> {
    let work = jet_precision(ctx.prec(), order);
    if pole_index(z0).is_some() && a.is_zero() {
        return Ok(LaurentJet::zero(work));
    }
    gamma_jet(z0, a, order, ctx)?.invert()
}
