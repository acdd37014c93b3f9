//! Direct Taylor evaluation of `pF(p-1)` inside the unit disk, with exact
//! binary-splitting summation for Gaussian-rational arguments.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    real_from_f64, real_from_i64, real_from_rational, real_two_pow, to_f64, BigComplex, BigReal,
    Precision, RM,
};
use crate::special::rational_is_gamma_pole;
use crate::Rational;

/// Exact-rational parameter lists of `pF(p-1)`: `|upper| = |lower| + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperParams {
    upper: Vec<Rational>,
    lower: Vec<Rational>,
}

impl HyperParams {
    /// Validates arity and that no lower parameter sits on a gamma pole.
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>) -> Result<Self> {
        if upper.is_empty() {
            return Err(Error::Parameter("at least one upper parameter required".into()));
        }
        if upper.len() != lower.len() + 1 {
            return Err(Error::Parameter(format!(
                "expected {} lower parameters for {} upper, got {}",
                upper.len() - 1,
                upper.len(),
                lower.len()
            )));
        }
        for b in &lower {
            if rational_is_gamma_pole(b) {
                return Err(Error::Parameter(format!(
                    "lower parameter {b} is a nonpositive integer"
                )));
            }
        }
        Ok(HyperParams { upper, lower })
    }

    /// Parses comma-separated rational lists, e.g. `"10/3,10/3"` and `"7/2"`.
    pub fn parse(upper: &str, lower: &str) -> Result<Self> {
        let parse_list = |s: &str| -> Result<Vec<Rational>> {
            let s = s.trim();
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<Rational>()
                        .map_err(|_| Error::Parse(format!("invalid rational {t:?}")))
                })
                .collect()
        };
        HyperParams::new(parse_list(upper)?, parse_list(lower)?)
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }
}

impl std::fmt::Display for HyperParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", join(&self.upper), join(&self.lower))
    }
}

/// Stop rule for the Taylor sum.
#[derive(Debug, Clone)]
pub struct TruncationPolicy {
    pub max_terms: usize,
    pub target_digits: usize,
}

impl TruncationPolicy {
    pub fn new(max_terms: usize, target_digits: usize) -> Self {
        assert!(max_terms >= 1);
        TruncationPolicy { max_terms, target_digits }
    }
}

/// Which evaluation path produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Taylor,
    BinarySplitting,
    Connection,
    EulerIntegral,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Taylor => "taylor",
            Method::BinarySplitting => "binary_splitting",
            Method::Connection => "connection",
            Method::EulerIntegral => "euler_integral",
        };
        f.write_str(s)
    }
}

/// Value with an a-posteriori error estimate.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: BigComplex,
    pub err_estimate: BigReal,
    pub terms_used: usize,
    pub method: Method,
    /// Set when `z` lies on the branch cut `[1, inf)`; the value follows the
    /// `arg in (-pi, pi]` convention, i.e. the limit from `Im z < 0`.
    pub on_branch_cut: bool,
}

/// Rising factorial `(a)_k`, exact.
pub fn pochhammer(a: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    let mut f = a.clone();
    for _ in 0..k {
        acc *= &f;
        f += Rational::one();
    }
    acc
}

/// Term ratio `t_(k+1)/t_k` without the `z` factor, exact.
fn term_ratio(params: &HyperParams, k: usize) -> Rational {
    let kq = Rational::from(num_bigint::BigInt::from(k));
    let mut num = Rational::one();
    for a in params.upper() {
        num *= a + &kq;
    }
    let mut den = Rational::from(num_bigint::BigInt::from(k + 1));
    for b in params.lower() {
        den *= b + &kq;
    }
    num / den
}

/// Sums the defining series; requires `|z| < 1`.
pub fn taylor_eval(
    params: &HyperParams,
    z: &BigComplex,
    prec: Precision,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    let wp = prec.plus(32);
    let abs_z = z.abs(wp);
    if abs_z >= real_from_i64(1, wp) {
        return Err(Error::Domain("series diverges for |z| >= 1".into()));
    }
    let mut sum = BigComplex::one(wp);
    let mut term = BigComplex::one(wp);
    let mut terms_used = 0usize;
    let mut small_streak = 0usize;
    let mut last_ratio = 1.0f64;
    // stop when three consecutive terms fall below 10^-(target+2) * |sum|
    let digits_tol = {
        let bits = ((policy.target_digits + 2) as f64 * std::f64::consts::LOG2_10).ceil() as i32;
        real_two_pow(-bits, wp)
    };
    for k in 0..policy.max_terms {
        let ratio = term_ratio(params, k);
        last_ratio = to_f64(&real_from_rational(&ratio, Precision::bits(64))).abs();
        term = term.mul(z, wp).mul_real(&real_from_rational(&ratio, wp), wp);
        sum = sum.add(&term, wp);
        terms_used = k + 1;
        if term.abs(wp) < sum.abs(wp).mul(&digits_tol, wp.get(), RM) {
            small_streak += 1;
            if small_streak >= 3 {
                break;
            }
        } else {
            small_streak = 0;
        }
    }
    // geometric tail bound from the last included term
    let q = to_f64(&abs_z) * last_ratio.max(1.0);
    let tail_factor = if q < 0.999 { 1.0 / (1.0 - q) } else { 1.0e6 };
    let err = term.abs(wp).mul(&real_from_f64(tail_factor, wp), prec.get(), RM);
    Ok(EvalResult {
        value: sum.with_precision(prec),
        err_estimate: err,
        terms_used,
        method: Method::Taylor,
        on_branch_cut: false,
    })
}

/// Complex number with exact rational components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    /// Parses `"a+bi"` with rational or plain decimal components into exact
    /// rationals (`"1.3"` becomes `13/10`); exponent notation is rejected.
    pub fn parse(s: &str) -> Result<Self> {
        fn component(s: &str) -> Result<Rational> {
            let s = s.trim();
            if s.is_empty() || s == "+" {
                return Ok(Rational::one());
            }
            if s == "-" {
                return Ok(-Rational::one());
            }
            if s.contains('/') {
                return s
                    .parse::<Rational>()
                    .map_err(|_| Error::Parse(format!("invalid rational component {s:?}")));
            }
            let (sign, body) = match s.strip_prefix('-') {
                Some(b) => (-Rational::one(), b),
                None => (Rational::one(), s.strip_prefix('+').unwrap_or(s)),
            };
            let (int_part, frac_part) = match body.split_once('.') {
                Some((i, f)) => (i, f),
                None => (body, ""),
            };
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(Error::Parse(format!("invalid decimal component {s:?}")));
            }
            if !int_part.chars().all(|c| c.is_ascii_digit())
                || !frac_part.chars().all(|c| c.is_ascii_digit())
            {
                return Err(Error::UnsupportedInput(format!(
                    "component {s:?} is not an exact rational"
                )));
            }
            let digits = format!("{int_part}{frac_part}");
            let numer: num_bigint::BigInt = digits
                .parse()
                .map_err(|_| Error::Parse(format!("invalid decimal component {s:?}")))?;
            let denom = num_bigint::BigInt::from(10u32).pow(frac_part.len() as u32);
            Ok(sign * Rational::new(numer, denom))
        }
        let t = s.trim();
        if let Some(body) = t.strip_suffix(['i', 'I']) {
            let mut split = None;
            for (idx, b) in body.bytes().enumerate().skip(1) {
                if b == b'+' || b == b'-' {
                    split = Some(idx);
                }
            }
            if let Some(idx) = split {
                let (re_s, im_s) = body.split_at(idx);
                Ok(GaussianRational::new(component(re_s)?, component(im_s)?))
            } else {
                Ok(GaussianRational::new(Rational::zero(), component(body)?))
            }
        } else {
            Ok(GaussianRational::new(component(t)?, Rational::zero()))
        }
    }

    pub fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }

    pub fn scale(&self, f: &Rational) -> Self {
        GaussianRational::new(&self.re * f, &self.im * f)
    }

    pub fn to_complex(&self, prec: Precision) -> BigComplex {
        BigComplex::from_rational_pair(&self.re, &self.im, prec)
    }
}

/// Exact partial sum through `z^terms` by recursive halving over the
/// product-sum tree of term ratios.
pub fn binary_splitting_eval(
    params: &HyperParams,
    z: &GaussianRational,
    terms: usize,
) -> Result<GaussianRational> {
    for b in params.lower() {
        if rational_is_gamma_pole(b) {
            return Err(Error::Parameter(format!("lower parameter {b} is a nonpositive integer")));
        }
    }
    if terms == 0 {
        return Ok(GaussianRational::one());
    }
    let ratio = |k: usize| z.scale(&term_ratio(params, k));
    // over [lo, hi): P = prod r_l, S = sum_{k in [lo,hi)} prod_{l in [lo,k)} r_l
    fn split(
        lo: usize,
        hi: usize,
        ratio: &dyn Fn(usize) -> GaussianRational,
    ) -> (GaussianRational, GaussianRational) {
        if hi - lo == 1 {
            return (ratio(lo), GaussianRational::one());
        }
        let mid = lo + (hi - lo) / 2;
        let (pl, sl) = split(lo, mid, ratio);
        let (pr, sr) = split(mid, hi, ratio);
        (pl.mul(&pr), sl.add(&pl.mul(&sr)))
    }
    let (_p, s) = split(0, terms + 1, &ratio);
    Ok(s)
}

/// Binary splitting packaged as an evaluation: the exact partial sum rounded
/// to working precision, with a tail estimate from the first omitted term.
/// Requires `|z| < 1` like the Taylor sum.
pub fn binary_splitting_result(
    params: &HyperParams,
    z: &GaussianRational,
    terms: usize,
    prec: Precision,
) -> Result<EvalResult> {
    let wp = prec.plus(32);
    let zc = z.to_complex(wp);
    if zc.abs(wp) >= real_from_i64(1, wp) {
        return Err(Error::Domain("series diverges for |z| >= 1".into()));
    }
    let sum = binary_splitting_eval(params, z, terms)?;
    // first omitted term, exact, then a geometric tail factor
    let mut tail_term = GaussianRational::one();
    for k in 0..=terms {
        tail_term = tail_term.mul(z).scale(&term_ratio(params, k));
    }
    let t_abs = to_f64(&tail_term.to_complex(Precision::bits(64)).abs(Precision::bits(64)));
    let q = to_f64(&zc.abs(Precision::bits(64)))
        * to_f64(&real_from_rational(&term_ratio(params, terms + 1), Precision::bits(64))).abs().max(1.0);
    let tail_factor = if q < 0.999 { 1.0 / (1.0 - q) } else { 1.0e6 };
    Ok(EvalResult {
        value: sum.to_complex(prec),
        err_estimate: real_from_f64(t_abs * tail_factor, Precision::bits(64)),
        terms_used: terms,
        method: Method::BinarySplitting,
        on_branch_cut: false,
    })
}
