//! Arbitrary-precision real and complex arithmetic with fixed branch
//! conventions.
//!
//! Reals are `astro_float::BigFloat` values; every operation takes the
//! working [`Precision`] explicitly, there is no global precision state.
//! The complex argument convention is fixed crate-wide to `(-pi, pi]`, so
//! for real `z > 1` the value `log(-z) = ln z + i*pi` (boundary values from
//! the `Im z < 0` side).

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::Rational;

/// Crate-wide rounding mode: round to nearest, ties to even.
pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Arbitrary-precision real number (binary mantissa, explicit precision).
pub type BigReal = BigFloat;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

/// Runs `f` with the thread-local mathematical constants cache.
pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

// ---------------------------------------------------------------------------
// Precision
// ---------------------------------------------------------------------------

/// Working mantissa size in bits. Always at least 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Precision(usize);

impl Precision {
    /// Creates a precision of `bits` mantissa bits (clamped to the 64-bit minimum).
    pub fn bits(bits: usize) -> Self {
        Precision(bits.max(64))
    }

    /// Precision sufficient for `digits` decimal digits: `ceil(digits / log10(2))`.
    pub fn from_digits(digits: usize) -> Self {
        Precision::bits((digits as f64 / std::f64::consts::LOG10_2).ceil() as usize)
    }

    /// Equivalent decimal digits: `floor(bits * log10(2))`.
    pub fn digits(&self) -> usize {
        (self.0 as f64 * std::f64::consts::LOG10_2).floor() as usize
    }

    /// Mantissa size in bits.
    pub fn get(&self) -> usize {
        self.0
    }

    /// This precision widened by `extra` guard bits.
    pub fn plus(&self, extra: usize) -> Self {
        Precision(self.0 + extra)
    }
}

// ---------------------------------------------------------------------------
// Real helpers
// ---------------------------------------------------------------------------

/// Integer as a `BigReal` at the given precision.
pub fn real_from_i64(v: i64, prec: Precision) -> BigReal {
    BigFloat::from_i64(v, prec.get())
}

/// Double as a `BigReal` (used only for coarse error estimates).
pub fn real_from_f64(v: f64, prec: Precision) -> BigReal {
    BigFloat::from_f64(v, prec.get())
}

/// Converts a big integer exactly (then rounds to `prec`).
pub fn real_from_bigint(n: &BigInt, prec: Precision) -> BigReal {
    let (sign, digits) = n.to_u64_digits();
    let full = 64 * digits.len().max(1) + 64;
    let mut acc = BigFloat::from_i64(0, full);
    for d in digits.iter().rev() {
        if let Some(e) = acc.exponent() {
            if !acc.is_zero() {
                acc.set_exponent(e + 64);
            }
        }
        acc = acc.add(&BigFloat::from_u64(*d, full), full, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc.inv_sign();
    }
    let mut out = acc;
    out.set_precision(prec.get(), RM).expect("precision change");
    out
}

/// Exact rational rounded to a `BigReal` at the given precision.
pub fn real_from_rational(r: &Rational, prec: Precision) -> BigReal {
    if r.is_integer() {
        return real_from_bigint(r.numer(), prec);
    }
    let wp = prec.plus(64);
    let n = real_from_bigint(r.numer(), wp);
    let d = real_from_bigint(r.denom(), wp);
    n.div(&d, prec.get(), RM)
}

/// The constant pi at the given precision.
pub fn real_pi(prec: Precision) -> BigReal {
    with_consts(|cc| cc.pi(prec.get(), RM))
}

/// Natural logarithm of 2 at the given precision.
pub fn real_ln2(prec: Precision) -> BigReal {
    with_consts(|cc| cc.ln_2(prec.get(), RM))
}

pub(crate) fn real_exp(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.exp(prec.get(), RM, cc))
}

pub(crate) fn real_ln(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.ln(prec.get(), RM, cc))
}

pub(crate) fn real_sin(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.sin(prec.get(), RM, cc))
}

pub(crate) fn real_cos(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.cos(prec.get(), RM, cc))
}

pub(crate) fn real_sinh(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.sinh(prec.get(), RM, cc))
}

pub(crate) fn real_cosh(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.cosh(prec.get(), RM, cc))
}

pub(crate) fn real_atan(x: &BigReal, prec: Precision) -> BigReal {
    with_consts(|cc| x.atan(prec.get(), RM, cc))
}

/// Approximate `f64` value (top 128 mantissa bits). Saturates on overflow.
pub fn to_f64(x: &BigReal) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    let (words, _n, sign, e, _) = x.as_raw_parts().expect("finite value");
    // mantissa is a fraction in [0.5, 1): value = 0.m * 2^e
    let top = *words.last().unwrap_or(&0);
    let next = if words.len() >= 2 { words[words.len() - 2] } else { 0 };
    let frac = (top as f64) / 2f64.powi(64) + (next as f64) / 2f64.powi(128);
    let mag = frac * 2f64.powi(e);
    if sign == astro_float::Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// Exact small-integer value of an integer-valued `BigReal`, if it fits.
pub(crate) fn as_small_int(x: &BigReal) -> Option<i64> {
    if x.is_zero() {
        return Some(0);
    }
    if !x.is_int() {
        return None;
    }
    let e = x.exponent()?;
    if e > 53 {
        return None;
    }
    Some(to_f64(x) as i64)
}

/// `2^(-k)` as a `BigReal`.
pub fn real_two_pow(k: i32, prec: Precision) -> BigReal {
    let mut one = BigFloat::from_i64(1, prec.get());
    one.set_exponent(1 + k);
    one
}

/// atan2 with result in `(-pi, pi]`; returns 0 at the origin.
pub fn atan2(y: &BigReal, x: &BigReal, prec: Precision) -> BigReal {
    let wp = prec.plus(32);
    let pi = real_pi(wp);
    if y.is_zero() {
        if x.is_negative() {
            let mut p = pi;
            p.set_precision(prec.get(), RM).expect("precision change");
            return p;
        }
        return BigFloat::from_i64(0, prec.get());
    }
    if x.is_zero() {
        let mut half_pi = pi.div(&BigFloat::from_i64(2, wp.get()), prec.get(), RM);
        if y.is_negative() {
            half_pi.inv_sign();
        }
        return half_pi;
    }
    let r = real_atan(&y.div(x, wp.get(), RM), wp);
    let v = if x.is_positive() {
        r
    } else if y.is_positive() {
        r.add(&pi, wp.get(), RM)
    } else {
        r.sub(&pi, wp.get(), RM)
    };
    let mut v = v;
    v.set_precision(prec.get(), RM).expect("precision change");
    v
}

// ---------------------------------------------------------------------------
// BigComplex
// ---------------------------------------------------------------------------

/// Arbitrary-precision complex number.
#[derive(Debug, Clone)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.mantissa_max_bit_len().unwrap_or(64);
        BigComplex { re, im: BigFloat::from_i64(0, p) }
    }

    pub fn from_i64(v: i64, prec: Precision) -> Self {
        BigComplex::new(real_from_i64(v, prec), real_from_i64(0, prec))
    }

    pub fn from_rational(r: &Rational, prec: Precision) -> Self {
        BigComplex::new(real_from_rational(r, prec), real_from_i64(0, prec))
    }

    pub fn from_rational_pair(re: &Rational, im: &Rational, prec: Precision) -> Self {
        BigComplex::new(real_from_rational(re, prec), real_from_rational(im, prec))
    }

    pub fn zero(prec: Precision) -> Self {
        BigComplex::from_i64(0, prec)
    }

    pub fn one(prec: Precision) -> Self {
        BigComplex::from_i64(1, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        let mut im = self.im.clone();
        im.inv_sign();
        BigComplex::new(self.re.clone(), im)
    }

    pub fn neg(&self) -> Self {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re.inv_sign();
        im.inv_sign();
        BigComplex::new(re, im)
    }

    pub fn add(&self, rhs: &Self, prec: Precision) -> Self {
        let p = prec.get();
        BigComplex::new(self.re.add(&rhs.re, p, RM), self.im.add(&rhs.im, p, RM))
    }

    pub fn sub(&self, rhs: &Self, prec: Precision) -> Self {
        let p = prec.get();
        BigComplex::new(self.re.sub(&rhs.re, p, RM), self.im.sub(&rhs.im, p, RM))
    }

    pub fn mul(&self, rhs: &Self, prec: Precision) -> Self {
        let wp = prec.plus(64).get();
        let p = prec.get();
        let ac = self.re.mul(&rhs.re, wp, RM);
        let bd = self.im.mul(&rhs.im, wp, RM);
        let ad = self.re.mul(&rhs.im, wp, RM);
        let bc = self.im.mul(&rhs.re, wp, RM);
        BigComplex::new(ac.sub(&bd, p, RM), ad.add(&bc, p, RM))
    }

    pub fn mul_real(&self, rhs: &BigReal, prec: Precision) -> Self {
        let p = prec.get();
        BigComplex::new(self.re.mul(rhs, p, RM), self.im.mul(rhs, p, RM))
    }

    pub fn div_real(&self, rhs: &BigReal, prec: Precision) -> Self {
        let p = prec.get();
        BigComplex::new(self.re.div(rhs, p, RM), self.im.div(rhs, p, RM))
    }

    pub fn div(&self, rhs: &Self, prec: Precision) -> Self {
        let wp = prec.plus(64).get();
        let p = prec.get();
        let den = rhs.re.mul(&rhs.re, wp, RM).add(&rhs.im.mul(&rhs.im, wp, RM), wp, RM);
        let num = self.mul(&rhs.conj(), Precision::bits(wp));
        BigComplex::new(num.re.div(&den, p, RM), num.im.div(&den, p, RM))
    }

    pub fn recip(&self, prec: Precision) -> Self {
        BigComplex::one(prec).div(self, prec)
    }

    /// Modulus, computed with exponent scaling so squares cannot overflow.
    pub fn abs(&self, prec: Precision) -> BigReal {
        if self.is_zero() {
            return real_from_i64(0, prec);
        }
        let wp = prec.plus(32).get();
        let er = if self.re.is_zero() { i32::MIN } else { self.re.exponent().unwrap_or(0) };
        let ei = if self.im.is_zero() { i32::MIN } else { self.im.exponent().unwrap_or(0) };
        let e = er.max(ei);
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        if !re.is_zero() {
            re.set_exponent(er - e);
        }
        if !im.is_zero() {
            im.set_exponent(ei - e);
        }
        let s = re.mul(&re, wp, RM).add(&im.mul(&im, wp, RM), wp, RM);
        let mut r = s.sqrt(prec.get(), RM);
        if !r.is_zero() {
            let re2 = r.exponent().unwrap_or(0);
            r.set_exponent(re2 + e);
        }
        r
    }

    /// |self - rhs| at the given precision.
    pub fn dist(&self, rhs: &Self, prec: Precision) -> BigReal {
        self.sub(rhs, prec.plus(16)).abs(prec)
    }

    /// Rounds both components to `prec`.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re.set_precision(prec.get(), RM).expect("precision change");
        im.set_precision(prec.get(), RM).expect("precision change");
        BigComplex::new(re, im)
    }
}

/// Complex exponential `e^z`.
pub fn complex_exp(z: &BigComplex, prec: Precision) -> BigComplex {
    let wp = prec.plus(32);
    let m = real_exp(&z.re, wp);
    let c = real_cos(&z.im, wp);
    let s = real_sin(&z.im, wp);
    BigComplex::new(m.mul(&c, prec.get(), RM), m.mul(&s, prec.get(), RM))
}

/// Principal logarithm: `log|z| + i*arg(z)` with `arg` in `(-pi, pi]`.
pub fn principal_log(z: &BigComplex, prec: Precision) -> Result<BigComplex> {
    if z.is_zero() {
        return Err(Error::Domain("log of zero".into()));
    }
    let wp = prec.plus(32);
    // ln|z| = (ln(re^2 + im^2))/2 after scaling out the common exponent
    let er = if z.re.is_zero() { i32::MIN } else { z.re.exponent().unwrap_or(0) };
    let ei = if z.im.is_zero() { i32::MIN } else { z.im.exponent().unwrap_or(0) };
    let e = er.max(ei);
    let mut re = z.re.clone();
    let mut im = z.im.clone();
    if !re.is_zero() {
        re.set_exponent(er - e);
    }
    if !im.is_zero() {
        im.set_exponent(ei - e);
    }
    let s = re.mul(&re, wp.get(), RM).add(&im.mul(&im, wp.get(), RM), wp.get(), RM);
    let half = {
        let mut h = BigFloat::from_i64(1, wp.get());
        h.set_exponent(0); // 0.5
        h
    };
    let ln_scaled = real_ln(&s, wp).mul(&half, wp.get(), RM);
    let e_ln2 = real_ln2(wp).mul(&BigFloat::from_i64(e as i64, wp.get()), wp.get(), RM);
    let modulus_log = ln_scaled.add(&e_ln2, prec.get(), RM);
    let argument = atan2(&z.im, &z.re, prec);
    Ok(BigComplex::new(modulus_log, argument))
}

/// Principal power: `exp(exponent * principal_log(base))`.
pub fn principal_pow(base: &BigComplex, exponent: &BigComplex, prec: Precision) -> Result<BigComplex> {
    if base.is_zero() {
        if exponent.re.is_positive() && !exponent.re.is_zero() {
            return Ok(BigComplex::zero(prec));
        }
        return Err(Error::Domain("zero base with nonpositive real exponent".into()));
    }
    let wp = prec.plus(32);
    let lg = principal_log(base, wp)?;
    Ok(complex_exp(&lg.mul(exponent, wp), prec))
}

// ---------------------------------------------------------------------------
// Decimal rendering
// ---------------------------------------------------------------------------

fn render_real(x: &BigReal, digits: usize) -> String {
    assert!(digits >= 1);
    if x.is_zero() {
        if digits == 1 {
            return "0".into();
        }
        return format!("0.{}", "0".repeat(digits - 1));
    }
    let (sign, mant, e10) = with_consts(|cc| x.convert_to_radix(Radix::Dec, RoundingMode::None, cc))
        .expect("finite value");
    // value = 0.d1 d2 d3 ... * 10^e10
    let mut d: Vec<u8> = mant;
    while d.len() < digits + 1 {
        d.push(0);
    }
    // round half away from zero at position `digits`
    let mut e10 = e10;
    let round_up = d[digits] >= 5;
    d.truncate(digits);
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                d.insert(0, 1);
                d.truncate(digits);
                e10 += 1;
                break;
            }
            i -= 1;
            if d[i] == 9 {
                d[i] = 0;
            } else {
                d[i] += 1;
                break;
            }
        }
    }
    let digits_str: String = d.iter().map(|v| (b'0' + v) as char).collect();
    let neg = sign == astro_float::Sign::Neg;
    let body = if e10 > 0 && (e10 as usize) <= digits {
        let k = e10 as usize;
        if k == digits {
            digits_str
        } else {
            format!("{}.{}", &digits_str[..k], &digits_str[k..])
        }
    } else if e10 <= 0 && e10 >= -(6 + digits as i32) {
        format!("0.{}{}", "0".repeat((-e10) as usize), digits_str)
    } else if e10 > 0 && (e10 as usize) <= digits + 6 {
        format!("{}{}", digits_str, "0".repeat(e10 as usize - digits))
    } else {
        // far outside the plain-decimal window
        format!("{}.{}e{}", &digits_str[..1], &digits_str[1..], e10 - 1)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Correctly rounded decimal strings (`digits` significant digits) for the
/// real and imaginary parts.
pub fn round_to_digits(x: &BigComplex, digits: usize) -> (String, String) {
    (render_real(&x.re, digits), render_real(&x.im, digits))
}

// ---------------------------------------------------------------------------
// Complex parsing ("a+bi" with decimal or rational components)
// ---------------------------------------------------------------------------

fn parse_real_component(s: &str, prec: Precision) -> Result<BigReal> {
    parse_component(s, prec, false)
}

/// `bare_sign` admits the imaginary-unit shorthands `""`, `"+"`, `"-"`.
fn parse_component(s: &str, prec: Precision, bare_sign: bool) -> Result<BigReal> {
    let s = s.trim();
    if s.is_empty() || s == "+" {
        if bare_sign {
            return Ok(real_from_i64(1, prec));
        }
        return Err(Error::Parse("empty component".into()));
    }
    if s == "-" {
        if bare_sign {
            return Ok(real_from_i64(-1, prec));
        }
        return Err(Error::Parse("empty component".into()));
    }
    if s.contains('/') {
        let r: Rational = s
            .parse()
            .map_err(|_| Error::Parse(format!("invalid rational component {s:?}")))?;
        return Ok(real_from_rational(&r, prec));
    }
    let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, prec.get(), RM, cc));
    if v.is_nan() {
        return Err(Error::Parse(format!("invalid decimal component {s:?}")));
    }
    Ok(v)
}

/// Parses `"a+bi"`, `"a-bi"`, `"a"`, `"bi"` with decimal or rational components.
pub fn parse_complex(s: &str, prec: Precision) -> Result<BigComplex> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // find the sign separating re and im (not the leading sign, not in "/")
        let bytes = body.as_bytes();
        let mut split = None;
        for (idx, b) in bytes.iter().enumerate().skip(1) {
            if *b == b'+' || *b == b'-' {
                split = Some(idx);
            }
        }
        if let Some(idx) = split {
            let (re_s, im_s) = body.split_at(idx);
            let re = parse_component(re_s, prec, false)?;
            let im = parse_component(im_s, prec, true)?;
            Ok(BigComplex::new(re, im))
        } else {
            let im = parse_component(body, prec, true)?;
            Ok(BigComplex::new(real_from_i64(0, prec), im))
        }
    } else {
        let re = parse_component(t, prec, false)?;
        Ok(BigComplex::new(re, real_from_i64(0, prec)))
    }
}

// ---------------------------------------------------------------------------
