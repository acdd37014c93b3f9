//! Log-series solutions at `z = infinity` and the ODE-driven coefficient
//! recurrence.
//!
//! The differential operator is `P(theta) - z Q(theta)` with
//! `P(t) = t prod_j (t + beta_j - 1)` and `Q(t) = prod_k (t + alpha_k)`,
//! where `theta = z d/dz`. Solutions at infinity live in the basis
//! `phi[i][j] = (-z)^(-alpha) z^(-i) log(-z)^j`, on which theta acts as
//! `theta phi[i][j] = -(alpha+i) phi[i][j] + j phi[i][j-1]`. Everything in
//! this module follows from that single relation.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    principal_log, principal_pow, real_from_rational, BigComplex, BigReal, Precision,
};
use crate::series::HyperParams;
use crate::Rational;

/// Polynomial with exact rational coefficients, index = power.
pub type RatPoly = Vec<Rational>;

fn poly_mul_linear(p: &RatPoly, c: &Rational) -> RatPoly {
    // p(t) * (t + c)
    let mut out = vec![Rational::zero(); p.len() + 1];
    for (i, a) in p.iter().enumerate() {
        out[i + 1] += a;
        out[i] += a * c;
    }
    out
}

/// Taylor coefficients `p^(m)(x0)/m!` for `m = 0..deg` by repeated synthetic
/// division; exact.
fn taylor_shift(p: &RatPoly, x0: &Rational) -> Vec<Rational> {
    let mut b = p.to_vec();
    let d = b.len() - 1;
    for m in 0..d {
        for i in (m..d).rev() {
            let t = &b[i + 1] * x0;
            b[i] += t;
        }
    }
    b
}

/// The operator polynomials of `pF(p-1)`.
#[derive(Debug, Clone)]
pub struct ODEPolys {
    p_poly: RatPoly,
    q_poly: RatPoly,
}

impl ODEPolys {
    pub fn p_poly(&self) -> &RatPoly {
        &self.p_poly
    }

    pub fn q_poly(&self) -> &RatPoly {
        &self.q_poly
    }

    /// deg P = deg Q = p.
    pub fn degree(&self) -> usize {
        self.q_poly.len() - 1
    }
}

/// `P(t) = t prod_j (t + beta_j - 1)`, `Q(t) = prod_k (t + alpha_k)`.
pub fn build_ode_polys(params: &HyperParams) -> ODEPolys {
    let mut p_poly = vec![Rational::zero(), Rational::one()]; // t
    for b in params.lower() {
        p_poly = poly_mul_linear(&p_poly, &(b - Rational::one()));
    }
    let mut q_poly = vec![Rational::one()];
    for a in params.upper() {
        q_poly = poly_mul_linear(&q_poly, a);
    }
    ODEPolys { p_poly, q_poly }
}

/// One solution block at infinity:
/// `(-z)^(-alpha) sum_(i<=N) sum_(j<logdeg) c[i][j] z^(-i) log(-z)^j`.
#[derive(Debug, Clone)]
pub struct LogSeries {
    alpha: Rational,
    logdeg: usize,
    coeffs: Vec<Vec<BigComplex>>, // [i][j]
    prec: Precision,
}

impl LogSeries {
    /// Builds from raw coefficients (used by file round-trips and tests).
    pub fn from_parts(alpha: Rational, logdeg: usize, coeffs: Vec<Vec<BigComplex>>, prec: Precision) -> Self {
        assert!(logdeg >= 1);
        assert!(coeffs.iter().all(|row| row.len() == logdeg));
        assert!(!coeffs.is_empty());
        LogSeries { alpha, logdeg, coeffs, prec }
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn logdeg(&self) -> usize {
        self.logdeg
    }

    /// Truncation order N (rows are `0..=N`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn coeff(&self, i: usize, j: usize) -> &BigComplex {
        &self.coeffs[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigComplex>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|row| row.iter().all(|c| c.is_zero()))
    }

    /// Adds `bump` to one stored coefficient. Mutation hook for residual
    /// self-tests; not part of the numerical API.
    #[doc(hidden)]
    pub fn bump_coefficient(&mut self, i: usize, j: usize, bump: &BigComplex) {
        self.coeffs[i][j] = self.coeffs[i][j].add(bump, self.prec);
    }

    /// Drops rows above `n`.
    pub fn truncated(&self, n: usize) -> LogSeries {
        let upto = n.min(self.order());
        LogSeries {
            alpha: self.alpha.clone(),
            logdeg: self.logdeg,
            coeffs: self.coeffs[..=upto].to_vec(),
            prec: self.prec,
        }
    }

    /// Point evaluation including the `(-z)^(-alpha)` prefactor. Also returns
    /// the magnitude of the last included order, for tail estimates.
    pub fn eval(&self, z: &BigComplex, prec: Precision) -> Result<(BigComplex, BigReal)> {
        let wp = prec.plus(32);
        let minus_z = z.neg();
        let log_mz = principal_log(&minus_z, wp)?;
        let inv_z = z.recip(wp);
        // log powers L^j
        let mut lpow = Vec::with_capacity(self.logdeg);
        let mut acc_l = BigComplex::one(wp);
        for _ in 0..self.logdeg {
            lpow.push(acc_l.clone());
            acc_l = acc_l.mul(&log_mz, wp);
        }
        let row_value = |i: usize| -> BigComplex {
            let mut acc = BigComplex::zero(wp);
            for (j, l) in lpow.iter().enumerate() {
                let c = &self.coeffs[i][j];
                if !c.is_zero() {
                    acc = acc.add(&c.mul(l, wp), wp);
                }
            }
            acc
        };
        // Horner over descending i
        let n = self.order();
        let mut acc = row_value(n);
        let last_mag = acc.abs(wp);
        for i in (0..n).rev() {
            acc = acc.mul(&inv_z, wp).add(&row_value(i), wp);
        }
        let alpha_c = BigComplex::from_rational(&-self.alpha.clone(), wp);
        let prefactor = principal_pow(&minus_z, &alpha_c, wp)?;
        let tail_scale = {
            let mut m = inv_z.abs(wp);
            for _ in 1..n.max(1) {
                m = m.mul(&inv_z.abs(wp), wp.get(), crate::numeric::RM);
            }
            m
        };
        let tail = last_mag
            .mul(&tail_scale, wp.get(), crate::numeric::RM)
            .mul(&prefactor.abs(wp), prec.get(), crate::numeric::RM);
        Ok((acc.mul(&prefactor, prec), tail))
    }
}

/// Image of a polynomial `R(theta)` on a block: for column `i`,
/// `out[i][j] = sum_m R^(m)(-alpha-i)/m! * ((j+m)!/j!) * c[i][j+m]`.
fn apply_poly_columns(r: &RatPoly, s: &LogSeries) -> Vec<Vec<BigComplex>> {
    let q = s.logdeg;
    let n = s.order();
    let wp = s.prec;
    let mut out = vec![vec![BigComplex::zero(wp); q]; n + 1];
    for (i, out_row) in out.iter_mut().enumerate() {
        let x0 = -(&s.alpha + Rational::from(num_bigint::BigInt::from(i)));
        let tc = taylor_shift(r, &x0);
        for (j, slot) in out_row.iter_mut().enumerate() {
            let mut acc = BigComplex::zero(wp);
            let mut rising = Rational::one(); // (j+m)!/j!
            for (m, coeff) in tc.iter().enumerate() {
                if j + m >= q {
                    break;
                }
                if m > 0 {
                    rising *= Rational::from(num_bigint::BigInt::from(j + m));
                }
                if !coeff.is_zero() {
                    let f = real_from_rational(&(coeff * &rising), wp);
                    acc = acc.add(&s.coeffs[i][j + m].mul_real(&f, wp), wp);
                }
            }
            *slot = acc;
        }
    }
    out
}

/// Extends leading coefficients `c0` (column `i = 0`) to order `N` with the
/// recurrence induced by the operator, solved from `j = q-1` down to `0`.
pub fn extend_coefficients(
    ode: &ODEPolys,
    alpha: &Rational,
    q: usize,
    c0: &[BigComplex],
    n: usize,
    prec: Precision,
) -> Result<LogSeries> {
    assert_eq!(c0.len(), q, "leading coefficient vector must have length q");
    let sp = prec.plus(10 * q); // guard for the triangular back-substitution
    let mut coeffs: Vec<Vec<BigComplex>> = Vec::with_capacity(n + 1);
    coeffs.push(c0.iter().map(|c| c.with_precision(sp)).collect());
    for i in 1..=n {
        let iq = Rational::from(num_bigint::BigInt::from(i));
        let x_q = -(alpha + &iq);
        let x_p = &x_q + Rational::one();
        let qm = taylor_shift(&ode.q_poly, &x_q);
        let pm = taylor_shift(&ode.p_poly, &x_p);
        if qm[0].is_zero() {
            return Err(Error::Resonance { index: i as i64 });
        }
        let q0 = real_from_rational(&qm[0], sp);
        let mut row = vec![BigComplex::zero(sp); q];
        for j in (0..q).rev() {
            // rhs: P side on column i-1
            let mut rhs = BigComplex::zero(sp);
            let mut rising = Rational::one();
            for (m, coeff) in pm.iter().enumerate() {
                if j + m >= q {
                    break;
                }
                if m > 0 {
                    rising *= Rational::from(num_bigint::BigInt::from(j + m));
                }
                if !coeff.is_zero() {
                    let f = real_from_rational(&(coeff * &rising), sp);
                    rhs = rhs.add(&coeffs[i - 1][j + m].mul_real(&f, sp), sp);
                }
            }
            // known Q-side terms on column i (m >= 1)
            let mut known = BigComplex::zero(sp);
            let mut rising_q = Rational::one();
            for (m, coeff) in qm.iter().enumerate() {
                if j + m >= q {
                    break;
                }
                if m > 0 {
                    rising_q *= Rational::from(num_bigint::BigInt::from(j + m));
                    if !coeff.is_zero() {
                        let f = real_from_rational(&(coeff * &rising_q), sp);
                        known = known.add(&row[j + m].mul_real(&f, sp), sp);
                    }
                }
            }
            row[j] = rhs.sub(&known, sp).div_real(&q0, sp);
        }
        coeffs.push(row);
    }
    Ok(LogSeries { alpha: alpha.clone(), logdeg: q, coeffs, prec: sp })
}

/// Image of `theta = z d/dz` in the `phi` basis:
/// `c[i][j] -> -(alpha+i) c[i][j] + (j+1) c[i][j+1]`.
pub fn apply_theta(s: &LogSeries) -> LogSeries {
    let wp = s.prec;
    let q = s.logdeg;
    let mut out = s.coeffs.clone();
    for (i, row) in out.iter_mut().enumerate() {
        let factor = real_from_rational(
            &-(&s.alpha + Rational::from(num_bigint::BigInt::from(i))),
            wp,
        );
        for (j, slot) in row.iter_mut().enumerate() {
            let mut v = s.coeffs[i][j].mul_real(&factor, wp);
            if j + 1 < q {
                let jp = real_from_rational(&Rational::from(num_bigint::BigInt::from(j + 1)), wp);
                v = v.add(&s.coeffs[i][j + 1].mul_real(&jp, wp), wp);
            }
            *slot = v;
        }
    }
    LogSeries { alpha: s.alpha.clone(), logdeg: q, coeffs: out, prec: wp }
}

/// Raising contiguity operator `(theta + a)/a`: maps the expansion of a
/// function with upper parameter `a` to the expansion with `a + 1`.
pub fn contiguity_raise(s: &LogSeries, a: &Rational) -> Result<LogSeries> {
    if a.is_zero() {
        return Err(Error::Domain("contiguity raise through parameter zero".into()));
    }
    let wp = s.prec;
    let th = apply_theta(s);
    let a_real = real_from_rational(a, wp);
    let inv_a = real_from_rational(&(Rational::one() / a), wp);
    let mut coeffs = th.coeffs;
    for (i, row) in coeffs.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let v = slot.add(&s.coeffs[i][j].mul_real(&a_real, wp), wp);
            *slot = v.mul_real(&inv_a, wp);
        }
    }
    Ok(LogSeries { alpha: s.alpha.clone(), logdeg: s.logdeg, coeffs, prec: wp })
}

/// Magnitude of `[P(theta) - z Q(theta)]` applied to the truncated series,
/// evaluated at `z`. For a truncation of a true solution this is
/// `O(|z|^-N)` relative to the leading term.
pub fn ode_residual(ode: &ODEPolys, s: &LogSeries, z: &BigComplex, prec: Precision) -> Result<BigReal> {
    let wp = prec.plus(32);
    if s.is_zero() {
        return Ok(crate::numeric::real_from_i64(0, prec));
    }
    let p_cols = apply_poly_columns(&ode.p_poly, s);
    let q_cols = apply_poly_columns(&ode.q_poly, s);
    let n = s.order();
    let q = s.logdeg;
    // residual columns: index i runs -1..=N with rc[i] = P[i] - Q[i+1]
    let minus_z = z.neg();
    let log_mz = principal_log(&minus_z, wp)?;
    let inv_z = z.recip(wp);
    let mut lpow = Vec::with_capacity(q);
    let mut acc_l = BigComplex::one(wp);
    for _ in 0..q {
        lpow.push(acc_l.clone());
        acc_l = acc_l.mul(&log_mz, wp);
    }
    let mut acc = BigComplex::zero(wp);
    // Horner from i = N down to i = -1
    for idx in (-1i64..=(n as i64)).rev() {
        let mut row = BigComplex::zero(wp);
        for j in 0..q {
            let mut v = BigComplex::zero(wp);
            if idx >= 0 {
                v = v.add(&p_cols[idx as usize][j], wp);
            }
            if idx < n as i64 {
                v = v.sub(&q_cols[(idx + 1) as usize][j], wp);
            }
            if !v.is_zero() {
                row = row.add(&v.mul(&lpow[j], wp), wp);
            }
        }
        acc = if idx == n as i64 { row } else { acc.mul(&inv_z, wp).add(&row, wp) };
    }
    // the loop ran one index past zero, so acc = z^-1 * sum rc[i] z^(-i)
    let acc = acc.mul(z, wp);
    let alpha_c = BigComplex::from_rational(&-s.alpha.clone(), wp);
    let prefactor = principal_pow(&minus_z, &alpha_c, wp)?;
    Ok(acc.mul(&prefactor, wp).abs(prec))
}
