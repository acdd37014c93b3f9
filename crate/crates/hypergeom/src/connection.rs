//! Connection coefficients at `z = infinity`, generic and degenerate, the
//! assembly of the full expansion, and the top-level evaluator dispatch.
//!
//! Upper parameters are grouped by integer difference. Integer-spaced values
//! collapse to the group minimum and are restored afterwards by replaying
//! contiguity raises on the assembled expansion (this normalization is
//! conjectural in general and flagged experimental; failures surface as
//! errors rather than guesses). Each repeated group contributes a log-series
//! block whose leading coefficients come from a collinear perturbation
//! `alpha_i = alpha + o_i * eps` of the generic coefficients, expanded as
//! Laurent jets in `eps`: the pole parts must cancel and the constant terms
//! are the degenerate connection coefficients.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frobenius::{build_ode_polys, contiguity_raise, extend_coefficients, LogSeries};
use crate::jets::{gamma_jet, jet_precision, rgamma_jet, LaurentJet};
use crate::numeric::{
    real_from_i64, real_two_pow, to_f64, BigComplex, Precision, RM,
};
use crate::series::{taylor_eval, EvalResult, HyperParams, Method, TruncationPolicy};
use crate::special::{gamma_rat, rgamma_rat, GammaContext};
use crate::Rational;

/// One group of upper parameters sharing an exponent after normalization.
#[derive(Debug, Clone)]
pub struct Group {
    /// Collapsed exponent (the smallest member of the integer class).
    pub alpha: Rational,
    /// Indices into the upper parameter list.
    pub members: Vec<usize>,
}

impl Group {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// A single contiguity raise `a -> a + 1` applied with operator
/// `(theta + a)/a`.
#[derive(Debug, Clone)]
pub struct RaiseStep {
    /// Which upper parameter is being raised (index into the original list).
    pub param_index: usize,
    /// Parameter value before this unit step.
    pub from: Rational,
}

/// Result of grouping the upper parameters.
#[derive(Debug, Clone)]
pub struct ParamGrouping {
    groups: Vec<Group>,
    raise_steps: Vec<RaiseStep>,
    collapsed: HyperParams,
}

impl ParamGrouping {
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn raise_steps(&self) -> &[RaiseStep] {
        &self.raise_steps
    }

    /// Parameters with every integer class collapsed to its minimum.
    pub fn collapsed(&self) -> &HyperParams {
        &self.collapsed
    }
}

/// Partitions the upper parameters into integer-difference classes, collapsed
/// to the class minimum with the raises recorded for replay.
pub fn group_parameters(params: &HyperParams) -> Result<ParamGrouping> {
    let upper = params.upper();
    let mut groups: Vec<Group> = Vec::new();
    for (idx, a) in upper.iter().enumerate() {
        let mut placed = false;
        for g in groups.iter_mut() {
            if (a - &g.alpha).is_integer() {
                if a < &g.alpha {
                    g.alpha = a.clone();
                }
                g.members.push(idx);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push(Group { alpha: a.clone(), members: vec![idx] });
        }
    }
    let mut raise_steps = Vec::new();
    for g in &groups {
        for &idx in &g.members {
            let shift = (&upper[idx] - &g.alpha).to_integer();
            let mut from = g.alpha.clone();
            for _ in 0..i64::try_from(shift.clone()).map_err(|_| {
                Error::UnsupportedDegeneracy("integer parameter spread too large".into())
            })? {
                if from.is_zero() {
                    return Err(Error::UnsupportedDegeneracy(format!(
                        "restoring parameter {} from {} passes through zero; the \
                         collapse-and-raise normalization is conjectural and does not \
                         cover this configuration",
                        upper[idx], g.alpha
                    )));
                }
                raise_steps.push(RaiseStep { param_index: idx, from: from.clone() });
                from += Rational::one();
            }
        }
    }
    let collapsed_upper: Vec<Rational> = upper
        .iter()
        .enumerate()
        .map(|(idx, _)| {
            groups
                .iter()
                .find(|g| g.members.contains(&idx))
                .map(|g| g.alpha.clone())
                .expect("every index is grouped")
        })
        .collect();
    let collapsed = HyperParams::new(collapsed_upper, params.lower().to_vec())?;
    Ok(ParamGrouping { groups, raise_steps, collapsed })
}

/// Generic connection coefficients `C_1 .. C_p`; requires all upper-parameter
/// differences to be non-integer. Gamma poles in the denominators are
/// absorbed to exact zeros.
pub fn generic_coefficients(params: &HyperParams, prec: Precision) -> Result<Vec<BigComplex>> {
    let upper = params.upper();
    for (i, a) in upper.iter().enumerate() {
        for b in upper.iter().skip(i + 1) {
            if (a - b).is_integer() {
                return Err(Error::Degenerate(format!(
                    "upper parameters {a} and {b} differ by an integer"
                )));
            }
        }
    }
    let wp = prec.plus(32);
    let ctx = GammaContext::new(wp);
    let mut out = Vec::with_capacity(upper.len());
    for (i, ai) in upper.iter().enumerate() {
        out.push(branch_coefficient(params, i, ai, &ctx)?.with_precision(prec));
    }
    Ok(out)
}

/// `C_i` for one branch at exact rational parameter values.
fn branch_coefficient(
    params: &HyperParams,
    i: usize,
    alpha_i: &Rational,
    ctx: &GammaContext,
) -> Result<BigComplex> {
    let wp = ctx.prec();
    let mut acc = BigComplex::one(wp);
    for b in params.lower() {
        acc = acc.mul(&gamma_rat(b, ctx)?, wp);
        let r = rgamma_rat(&(b - alpha_i), ctx);
        if r.is_zero() {
            return Ok(BigComplex::zero(wp));
        }
        acc = acc.mul(&r, wp);
    }
    for (j, aj) in params.upper().iter().enumerate() {
        if j == i {
            continue;
        }
        acc = acc.mul(&gamma_rat(&(aj - alpha_i), ctx)?, wp);
        let r = rgamma_rat(aj, ctx);
        if r.is_zero() {
            return Ok(BigComplex::zero(wp));
        }
        acc = acc.mul(&r, wp);
    }
    Ok(acc)
}

/// Leading coefficients `c_j^0`, `j = 0..q-1`, of the group `g` of a grouped
/// (collapsed) parameter list.
///
/// For `q = 1` this is the generic branch coefficient. For `q >= 2` the group
/// members are perturbed collinearly with integer offsets `0..q-1`, each
/// perturbed branch coefficient is expanded as a Laurent jet, and
/// `c_j^0 = [eps^0] sum_i C_i(eps) (-o_i)^j eps^j / j!`. Every pole
/// coefficient of those sums must cancel; a violation signals a precision
/// shortfall or a grouping bug.
pub fn degenerate_leading_coefficients(
    grouping: &ParamGrouping,
    g: usize,
    params: &HyperParams,
    prec: Precision,
) -> Result<Vec<BigComplex>> {
    let group = &grouping.groups[g];
    let q = group.multiplicity();
    let alpha = &group.alpha;
    let ctx = GammaContext::new(prec);
    if q == 1 {
        let i = group.members[0];
        let wp = prec.plus(32);
        let c = branch_coefficient(params, i, alpha, &GammaContext::new(wp))?;
        return Ok(vec![c.with_precision(prec)]);
    }
    let order = q + 2;
    let work = jet_precision(prec, order);
    let jets = perturbed_branch_jets(grouping, g, params, order, &ctx)?;
    // scale for the cancellation tolerance
    let mut scale = real_from_i64(1, work);
    for j in &jets {
        scale = scale.max(&j.max_abs_coeff(work));
    }
    let tol = scale.mul(&real_two_pow(-(prec.get() as i32) - 16, work), work.get(), RM);
    let mut out = Vec::with_capacity(q);
    for j in 0..q {
        // S_j = sum_i C_i(eps) * (-o_i)^j eps^j / j!
        let mut sum = LaurentJet::zero(work);
        let mut j_fact = 1i64;
        for t in 1..=j as i64 {
            j_fact *= t;
        }
        for (o, cjet) in jets.iter().enumerate() {
            let f = Rational::new((-(o as i64)).pow(j as u32).into(), j_fact.into());
            if f.is_zero() && j > 0 {
                continue;
            }
            let scaled = cjet.scale(&BigComplex::from_rational(&f, work)).shift(j as i64);
            sum = sum.add(&scaled);
        }
        // all pole coefficients must cancel
        for m in sum.valuation()..0 {
            if let Some(c) = sum.coeff(m) {
                let mag = c.abs(work);
                if mag > tol {
                    return Err(Error::Inconsistency(format!(
                        "eps^{m} coefficient {:?} above guard tolerance in degenerate limit",
                        to_f64(&mag)
                    )));
                }
            }
        }
        let c0 = sum
            .coeff(0)
            .ok_or_else(|| Error::Inconsistency("jet truncation excludes eps^0".into()))?;
        out.push(c0.with_precision(prec));
    }
    Ok(out)
}

/// Branch coefficients `C_i(eps)` as jets for the members of group `g`,
/// perturbed as `alpha + o_i eps` with offsets `o_i = 0..q-1`.
fn perturbed_branch_jets(
    grouping: &ParamGrouping,
    g: usize,
    params: &HyperParams,
    order: usize,
    ctx: &GammaContext,
) -> Result<Vec<LaurentJet>> {
    let group = &grouping.groups[g];
    let alpha = &group.alpha;
    let work = jet_precision(ctx.prec(), order);
    // constant factor prod_j Gamma(beta_j), shared by every member
    let wctx = ctx.at_precision(work);
    let mut beta_scale = BigComplex::one(work);
    for b in params.lower() {
        beta_scale = beta_scale.mul(&gamma_rat(b, &wctx)?, work);
    }
    let offset_of = |idx: usize| group.members.iter().position(|m| *m == idx).unwrap() as i64;
    let mut jets = Vec::with_capacity(group.multiplicity());
    for &i in &group.members {
        let oi = offset_of(i);
        let mut acc = LaurentJet::constant(beta_scale.clone(), order, work);
        // 1/Gamma(beta_j - alpha - o_i eps); exactly zero only for the
        // unperturbed member sitting on a gamma pole, which drops out of the
        // limit while the other members still contribute
        for b in params.lower() {
            let center = BigComplex::from_rational(&(b - alpha), work);
            let f = rgamma_jet(&center, &Rational::from(num_bigint::BigInt::from(-oi)), order, ctx)?;
            acc = acc.mul(&f);
            if acc.is_exactly_zero() {
                break;
            }
        }
        for (j, aj) in params.upper().iter().enumerate() {
            if j == i || acc.is_exactly_zero() {
                continue;
            }
            // Gamma(alpha_j(eps) - alpha_i(eps))
            let f = if group.members.contains(&j) {
                let d = offset_of(j) - oi;
                gamma_jet(
                    &BigComplex::zero(work),
                    &Rational::from(num_bigint::BigInt::from(d)),
                    order,
                    ctx,
                )?
            } else {
                gamma_jet(
                    &BigComplex::from_rational(&(aj - alpha), work),
                    &Rational::from(num_bigint::BigInt::from(-oi)),
                    order,
                    ctx,
                )?
            };
            acc = acc.mul(&f);
            // 1/Gamma(alpha_j(eps))
            let r = if group.members.contains(&j) {
                rgamma_jet(
                    &BigComplex::from_rational(alpha, work),
                    &Rational::from(num_bigint::BigInt::from(offset_of(j))),
                    order,
                    ctx,
                )?
            } else {
                rgamma_jet(&BigComplex::from_rational(aj, work), &Rational::zero(), order, ctx)?
            };
            acc = acc.mul(&r);
            if acc.is_exactly_zero() {
                break;
            }
        }
        jets.push(acc);
    }
    Ok(jets)
}

/// The full expansion at infinity: one log-series block per group.
#[derive(Debug, Clone)]
pub struct ConnectionExpansion {
    params: HyperParams,
    grouping: ParamGrouping,
    series: Vec<LogSeries>,
    n_order: usize,
    prec: Precision,
}

impl ConnectionExpansion {
    pub fn params(&self) -> &HyperParams {
        &self.params
    }

    pub fn grouping(&self) -> &ParamGrouping {
        &self.grouping
    }

    pub fn series(&self) -> &[LogSeries] {
        &self.series
    }

    /// Mutation hook for residual self-tests; not part of the numerical API.
    #[doc(hidden)]
    pub fn series_mut(&mut self) -> &mut [LogSeries] {
        &mut self.series
    }

    pub fn order(&self) -> usize {
        self.n_order
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    /// Rebuilds an expansion from dumped parts (file round trips).
    pub fn from_parts(
        params: HyperParams,
        series: Vec<LogSeries>,
        n_order: usize,
        prec: Precision,
    ) -> Result<Self> {
        let grouping = group_parameters(&params)?;
        if series.len() != grouping.groups().len() {
            return Err(Error::Parameter("series count does not match grouping".into()));
        }
        Ok(ConnectionExpansion { params, grouping, series, n_order, prec })
    }
}

/// Builds the expansion at infinity to order `N`: leading coefficients per
/// group, ODE recurrence extension, then replay of the recorded contiguity
/// raises.
pub fn expansion_at_infinity(
    params: &HyperParams,
    n: usize,
    prec: Precision,
) -> Result<ConnectionExpansion> {
    let grouping = group_parameters(params)?;
    let collapsed = grouping.collapsed().clone();
    let ode = build_ode_polys(&collapsed);
    let mut series = Vec::with_capacity(grouping.groups().len());
    for (g, group) in grouping.groups().iter().enumerate() {
        let leading = degenerate_leading_coefficients(&grouping, g, &collapsed, prec)?;
        let block = extend_coefficients(
            &ode,
            &group.alpha,
            group.multiplicity(),
            &leading,
            n,
            prec,
        )?;
        series.push(block);
    }
    for step in grouping.raise_steps() {
        for block in series.iter_mut() {
            *block = contiguity_raise(block, &step.from)?;
        }
    }
    Ok(ConnectionExpansion { params: params.clone(), grouping, series, n_order: n, prec })
}

/// Evaluates an expansion at a point with `|z| > 1`.
pub fn evaluate_at_infinity(exp: &ConnectionExpansion, z: &BigComplex) -> Result<EvalResult> {
    let prec = exp.prec;
    let wp = prec.plus(32);
    let abs_z = z.abs(wp);
    if abs_z <= real_from_i64(1, wp) {
        return Err(Error::Domain("expansion at infinity needs |z| > 1".into()));
    }
    let on_cut = z.im.is_zero() && z.re.is_positive();
    let mut value = BigComplex::zero(wp);
    let mut err = real_from_i64(0, wp);
    for block in exp.series() {
        if block.is_zero() {
            continue;
        }
        let (v, tail) = block.eval(z, wp)?;
        value = value.add(&v, wp);
        err = err.add(&tail, wp.get(), RM);
    }
    // rounding floor
    let floor = value.abs(wp).mul(&real_two_pow(-(prec.get() as i32) + 4, wp), wp.get(), RM);
    err = err.max(&floor);
    let mut err_out = err;
    err_out.set_precision(64, RM).expect("precision change");
    Ok(EvalResult {
        value: value.with_precision(prec),
        err_estimate: err_out,
        terms_used: exp.n_order,
        method: Method::Connection,
        on_branch_cut: on_cut,
    })
}

/// Evaluation controls for [`evaluate_with`].
#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Requested correct decimal digits.
    pub digits: usize,
    /// Fixed truncation order; `EvalOptions::terms` pairs it with the
    /// `terms + 10` digit policy unless `with_digits` overrides it.
    pub terms: Option<usize>,
    /// Taylor dispatch radius (default 0.9).
    pub inner_radius: f64,
    /// Connection dispatch radius (default 1.1).
    pub outer_radius: f64,
    /// Cap on Taylor terms.
    pub max_terms: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            digits: 19,
            terms: None,
            inner_radius: 0.9,
            outer_radius: 1.1,
            max_terms: 200_000,
        }
    }
}

impl EvalOptions {
    pub fn digits(digits: usize) -> Self {
        EvalOptions { digits, ..Default::default() }
    }

    /// Fixed truncation order; working precision follows `terms + 10` digits.
    pub fn terms(terms: usize) -> Self {
        EvalOptions {
            digits: terms + 10,
            terms: Some(terms),
            ..Default::default()
        }
    }

    pub fn with_digits(mut self, digits: usize) -> Self {
        self.digits = digits;
        self
    }
}

/// Where the evaluator will send a point, decided by `|z|` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispatchPlan {
    /// Taylor sum with this term cap.
    Taylor { terms: usize },
    /// Expansion at infinity truncated at this order.
    Connection { order: usize },
    /// Unsupported unit-circle neighborhood.
    Annulus,
}

/// Dispatch decision and derived truncation sizes; depends only on `|z|`.
pub fn dispatch_plan(z: &BigComplex, opts: &EvalOptions) -> DispatchPlan {
    let digits = opts.digits;
    let az = to_f64(&z.abs(Precision::bits(64)));
    if az <= opts.inner_radius {
        let terms = match opts.terms {
            Some(t) => t.max(1),
            None => {
                let per_term = -az.max(1e-300).log10();
                (((digits as f64 + 2.0) / per_term.max(1e-6)).ceil() as usize + 16)
                    .clamp(8, opts.max_terms)
            }
        };
        return DispatchPlan::Taylor { terms };
    }
    if az >= opts.outer_radius {
        let order = match opts.terms {
            Some(t) => t,
            None => ((digits as f64 + 2.0) / az.log10()).ceil() as usize + 10,
        };
        return DispatchPlan::Connection { order };
    }
    DispatchPlan::Annulus
}

/// Working precision used for a given digit request.
pub fn working_precision(digits: usize) -> Precision {
    Precision::from_digits(digits + 10)
}

/// Evaluates `pF(p-1)(z)`: Taylor series inside `|z| <= inner`, connection
/// expansion outside `|z| >= outer`, error in the annulus between.
pub fn evaluate(params: &HyperParams, z: &BigComplex, digits: usize) -> Result<EvalResult> {
    evaluate_with(params, z, &EvalOptions::digits(digits))
}

pub fn evaluate_with(params: &HyperParams, z: &BigComplex, opts: &EvalOptions) -> Result<EvalResult> {
    let digits = opts.digits;
    let prec = working_precision(digits);
    match dispatch_plan(z, opts) {
        DispatchPlan::Taylor { terms } => {
            if z.is_zero() {
                return Ok(EvalResult {
                    value: BigComplex::one(prec),
                    err_estimate: real_from_i64(0, Precision::bits(64)),
                    terms_used: 0,
                    method: Method::Taylor,
                    on_branch_cut: false,
                });
            }
            let policy = TruncationPolicy::new(terms, digits);
            taylor_eval(params, z, prec, &policy)
        }
        DispatchPlan::Connection { order } => {
            let exp = expansion_at_infinity(params, order, prec)?;
            evaluate_at_infinity(&exp, z)
        }
        DispatchPlan::Annulus => {
            let az = to_f64(&z.abs(Precision::bits(64)));
            Err(Error::Annulus(format!(
                "|z| = {az:.4} lies in the unsupported neighborhood ({}, {}) of the unit circle",
                opts.inner_radius, opts.outer_radius
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{parse_complex, principal_log, principal_pow};
    use crate::special::polygamma;

    fn rational(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn params(upper: &[(i64, i64)], lower: &[(i64, i64)]) -> HyperParams {
        HyperParams::new(
            upper.iter().map(|(n, d)| rational(*n, *d)).collect(),
            lower.iter().map(|(n, d)| rational(*n, *d)).collect(),
        )
        .unwrap()
    }

    fn rel_close(a: &BigComplex, b: &BigComplex, prec: Precision, tol: &str) -> bool {
        let d = a.dist(b, prec);
        let s = b.abs(prec).max(&real_two_pow(-(2 * prec.get() as i32), prec));
        d < s.mul(&parse_complex(tol, prec).unwrap().re, prec.get(), RM)
    }

    #[test]
    fn grouping_repeated_and_distinct() {
        let g = group_parameters(&params(&[(10, 3), (10, 3)], &[(7, 2)])).unwrap();
        assert_eq!(g.groups().len(), 1);
        assert_eq!(g.groups()[0].multiplicity(), 2);
        assert!(g.raise_steps().is_empty());

        let g = group_parameters(&params(&[(10, 3), (1, 2)], &[(7, 2)])).unwrap();
        assert_eq!(g.groups().len(), 2);
        assert!(g.groups().iter().all(|x| x.multiplicity() == 1));
    }

    #[test]
    fn grouping_integer_difference_records_raises() {
        let g = group_parameters(&params(&[(10, 3), (13, 3)], &[(7, 2)])).unwrap();
        assert_eq!(g.groups().len(), 1);
        assert_eq!(g.groups()[0].multiplicity(), 2);
        assert_eq!(g.groups()[0].alpha, rational(10, 3));
        assert_eq!(g.raise_steps().len(), 1);
        assert_eq!(g.raise_steps()[0].param_index, 1);
        assert_eq!(g.raise_steps()[0].from, rational(10, 3));
        assert_eq!(g.collapsed().upper(), &[rational(10, 3), rational(10, 3)]);
    }

    #[test]
    fn grouping_rejects_raise_through_zero() {
        let r = group_parameters(&params(&[(-2, 1), (1, 1)], &[(1, 2)]));
        assert!(matches!(r, Err(Error::UnsupportedDegeneracy(_))));
    }

    #[test]
    fn generic_coefficients_telescoping() {
        // 2F1(1/3, 1/5; 1/5): C = [1, 0]
        let prec = Precision::from_digits(40);
        let c = generic_coefficients(&params(&[(1, 3), (1, 5)], &[(1, 5)]), prec).unwrap();
        assert!(rel_close(&c[0], &BigComplex::one(prec), prec, "1e-35"));
        assert!(c[1].is_zero());
    }

    #[test]
    fn generic_coefficients_p1_empty_products() {
        let prec = Precision::from_digits(30);
        let p = HyperParams::new(vec![rational(5, 7)], vec![]).unwrap();
        let c = generic_coefficients(&p, prec).unwrap();
        assert!(rel_close(&c[0], &BigComplex::one(prec), prec, "1e-25"));
    }

    #[test]
    fn generic_coefficients_gauss_closed_form() {
        // C_1 for 2F1(1/2, 1/4; 3/4) = Gamma(3/4)Gamma(-1/4)/Gamma(1/4)^2
        let prec = Precision::from_digits(60);
        let ctx = GammaContext::new(prec.plus(32));
        let c = generic_coefficients(&params(&[(1, 2), (1, 4)], &[(3, 4)]), prec).unwrap();
        let g34 = gamma_rat(&rational(3, 4), &ctx).unwrap();
        let gm14 = gamma_rat(&rational(-1, 4), &ctx).unwrap();
        let g14 = gamma_rat(&rational(1, 4), &ctx).unwrap();
        let expect = g34.mul(&gm14, prec).div(&g14.mul(&g14, prec), prec);
        assert!(rel_close(&c[0], &expect, prec, "1e-55"));
        assert!(matches!(
            generic_coefficients(&params(&[(1, 2), (1, 2)], &[(3, 4)]), prec),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn degenerate_leading_q2_worked_example() {
        // (alpha, beta) = (10/3, 7/2):
        //   c_1^0 = Gamma(b)/(Gamma(a)Gamma(b-a))
        //   c_0^0 = -Gamma(b)(2 gamma + psi(a) + psi(b-a))/(Gamma(a)Gamma(b-a))
        let prec = Precision::from_digits(60);
        let p = params(&[(10, 3), (10, 3)], &[(7, 2)]);
        let grouping = group_parameters(&p).unwrap();
        let lead = degenerate_leading_coefficients(&grouping, 0, grouping.collapsed(), prec).unwrap();
        assert_eq!(lead.len(), 2);
        let ctx = GammaContext::new(prec.plus(32));
        let gb = gamma_rat(&rational(7, 2), &ctx).unwrap();
        let ga = gamma_rat(&rational(10, 3), &ctx).unwrap();
        let gba = gamma_rat(&rational(1, 6), &ctx).unwrap();
        let k = gb.div(&ga.mul(&gba, prec), prec);
        assert!(rel_close(&lead[1], &k, prec, "1e-52"), "c_1^0 mismatch");
        let psi_a = polygamma(0, &BigComplex::from_rational(&rational(10, 3), prec), &ctx).unwrap();
        let psi_ba = polygamma(0, &BigComplex::from_rational(&rational(1, 6), prec), &ctx).unwrap();
        let two_gamma = BigComplex::from_real(ctx.euler_gamma())
            .mul_real(&real_from_i64(2, prec), prec);
        let expect0 = k.mul(&two_gamma.add(&psi_a, prec).add(&psi_ba, prec), prec).neg();
        assert!(rel_close(&lead[0], &expect0, prec, "1e-52"), "c_0^0 mismatch");
    }

    #[test]
    fn degenerate_leading_q1_is_generic_branch() {
        let prec = Precision::from_digits(40);
        let p = params(&[(1, 2), (1, 4)], &[(3, 4)]);
        let grouping = group_parameters(&p).unwrap();
        let lead = degenerate_leading_coefficients(&grouping, 0, grouping.collapsed(), prec).unwrap();
        let all = generic_coefficients(&p, prec).unwrap();
        assert!(rel_close(&lead[0], &all[0], prec, "1e-35"));
    }

    #[test]
    fn degenerate_leading_q3_pole_cancellation() {
        // triple group: the eps^-1 and eps^-2 layers must cancel silently
        let prec = Precision::from_digits(40);
        let p = params(&[(7, 2), (7, 2), (7, 2)], &[(31, 5), (36, 7)]);
        let grouping = group_parameters(&p).unwrap();
        let lead = degenerate_leading_coefficients(&grouping, 0, grouping.collapsed(), prec).unwrap();
        assert_eq!(lead.len(), 3);
        assert!(!lead[2].is_zero());
    }

    #[test]
    fn expansion_matches_binomial_closed_form() {
        // 2F1(1/3, 1/5; 1/5; z) = (1-z)^(-1/3)
        let prec = Precision::from_digits(40);
        let p = params(&[(1, 3), (1, 5)], &[(1, 5)]);
        let exp = expansion_at_infinity(&p, 40, prec).unwrap();
        // the 1/5 branch carries C_2 = 0
        let zero_blocks = exp.series().iter().filter(|s| s.is_zero()).count();
        assert_eq!(zero_blocks, 1);
        // tolerance tracks the O(|z|^-41) truncation of the fixed N=40 expansion
        for (zs, tol) in [("13+13i", "1e-30"), ("-10", "1e-30"), ("2+2i", "1e-16")] {
            let z = parse_complex(zs, prec).unwrap();
            let r = evaluate_at_infinity(&exp, &z).unwrap();
            let expect = principal_pow(
                &BigComplex::one(prec).sub(&z, prec),
                &BigComplex::from_rational(&rational(-1, 3), prec),
                prec,
            )
            .unwrap();
            assert!(rel_close(&r.value, &expect, prec, tol), "mismatch at z={zs}");
        }
    }

    #[test]
    fn expansion_matches_log_closed_form() {
        // 2F1(1,1;2;z) = -log(1-z)/z through the q=2 degenerate path
        let prec = Precision::from_digits(40);
        let p = params(&[(1, 1), (1, 1)], &[(2, 1)]);
        let exp = expansion_at_infinity(&p, 40, prec).unwrap();
        let z = parse_complex("2+2i", prec).unwrap();
        let r = evaluate_at_infinity(&exp, &z).unwrap();
        let expect = principal_log(&BigComplex::one(prec).sub(&z, prec), prec)
            .unwrap()
            .neg()
            .div(&z, prec);
        assert!(rel_close(&r.value, &expect, prec, "1e-14"), "got {:?}", r.value);
    }

    #[test]
    fn degenerate_group_on_lower_parameter_pole() {
        // beta - alpha is a gamma pole: the unperturbed member drops out of
        // the limit but the perturbed members still contribute.
        let prec = Precision::from_digits(40);
        // 2F1(1/2,1/2;1/2;z) = (1-z)^(-1/2), log-free
        let p = params(&[(1, 2), (1, 2)], &[(1, 2)]);
        let exp = expansion_at_infinity(&p, 40, prec).unwrap();
        for zs in ["13+13i", "-10"] {
            let z = parse_complex(zs, prec).unwrap();
            let r = evaluate_at_infinity(&exp, &z).unwrap();
            let expect = principal_pow(
                &BigComplex::one(prec).sub(&z, prec),
                &BigComplex::from_rational(&rational(-1, 2), prec),
                prec,
            )
            .unwrap();
            assert!(rel_close(&r.value, &expect, prec, "1e-30"), "mismatch at z={zs}");
        }
        // 2F1(5/2,5/2;1/2): psi and gamma poles cancel in the limit, leaving
        // c_0^0 = 2 Gamma(1/2)/Gamma(5/2) = 8/3 and no log term
        let p = params(&[(5, 2), (5, 2)], &[(1, 2)]);
        let grouping = group_parameters(&p).unwrap();
        let lead =
            degenerate_leading_coefficients(&grouping, 0, grouping.collapsed(), prec).unwrap();
        let expect0 = BigComplex::from_rational(&rational(8, 3), prec);
        assert!(rel_close(&lead[0], &expect0, prec, "1e-35"), "c_0^0 = {:?}", lead[0]);
        let mag1 = lead[1].abs(prec);
        assert!(mag1 < real_two_pow(-(prec.get() as i32) + 16, prec), "log term should vanish");
        // and the whole evaluation agrees with the perturbed generic path
        let z = parse_complex("5+5i", prec).unwrap();
        let a = evaluate(&p, &z, 35).unwrap().value;
        let delta = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(20));
        let p2 = HyperParams::new(
            vec![rational(5, 2), rational(5, 2) + delta],
            vec![rational(1, 2)],
        )
        .unwrap();
        let b = evaluate(&p2, &z, 50).unwrap().value;
        let d = a.dist(&b, prec);
        let tol = a.abs(prec).mul(&parse_complex("1e-15", prec).unwrap().re, prec.get(), RM);
        assert!(d < tol, "{:?} vs {:?}", a, b);
    }

    #[test]
    fn raise_replay_agrees_with_generic_perturbation() {
        // (1/2, 3/2; 7/4): collapsed to (1/2, 1/2) + one raise; compare with
        // the generic path at (1/2, 3/2 + 1e-25)
        let prec = Precision::from_digits(60);
        let p = params(&[(1, 2), (3, 2)], &[(7, 4)]);
        let z = parse_complex("5+5i", prec).unwrap();
        let degen = {
            let exp = expansion_at_infinity(&p, 80, prec).unwrap();
            evaluate_at_infinity(&exp, &z).unwrap().value
        };
        let delta = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(25));
        let p_pert = HyperParams::new(
            vec![rational(1, 2), rational(3, 2) + delta],
            vec![rational(7, 4)],
        )
        .unwrap();
        let generic = {
            let exp = expansion_at_infinity(&p_pert, 80, prec).unwrap();
            evaluate_at_infinity(&exp, &z).unwrap().value
        };
        let d = degen.dist(&generic, prec);
        let tol = generic.abs(prec).mul(&parse_complex("1e-20", prec).unwrap().re, prec.get(), RM);
        assert!(d < tol, "raise path {:?} vs generic {:?}", degen, generic);
    }

    #[test]
    fn evaluate_dispatch() {
        let prec = Precision::from_digits(30);
        let p = params(&[(10, 3), (10, 3)], &[(7, 2)]);
        // z = 0
        let r = evaluate(&p, &BigComplex::zero(prec), 30).unwrap();
        assert!(r.value.sub(&BigComplex::one(prec), prec).abs(prec) < real_two_pow(-90, prec));
        assert_eq!(r.method, Method::Taylor);
        // annulus
        let z = parse_complex("1+0.05i", prec).unwrap();
        assert!(matches!(evaluate(&p, &z, 20), Err(Error::Annulus(_))));
        // inside
        let z = parse_complex("0.5+0.1i", prec).unwrap();
        assert_eq!(evaluate(&p, &z, 25).unwrap().method, Method::Taylor);
        // outside
        let z = parse_complex("13+13i", prec).unwrap();
        let r = evaluate(&p, &z, 25).unwrap();
        assert_eq!(r.method, Method::Connection);
        assert!(!r.on_branch_cut);
        // on the cut
        let z = parse_complex("5", prec).unwrap();
        assert!(evaluate(&p, &z, 20).unwrap().on_branch_cut);
    }

    #[test]
    fn terminating_series_through_connection_path() {
        // 2F1(-3, 1/2; 1/4; z) is a cubic polynomial; the branch for the
        // nonpositive-integer parameter terminates at the recurrence level
        let prec = Precision::from_digits(40);
        let p = params(&[(-3, 1), (1, 2)], &[(1, 4)]);
        let z = parse_complex("13+13i", prec).unwrap();
        let r = evaluate(&p, &z, 35).unwrap();
        // exact polynomial sum in rationals
        let zr = crate::series::GaussianRational::new(rational(13, 1), rational(13, 1));
        let exact = crate::series::binary_splitting_eval(&p, &zr, 3).unwrap().to_complex(prec);
        assert!(rel_close(&r.value, &exact, prec, "1e-33"), "{:?} vs {:?}", r.value, exact);
        // terms beyond the polynomial degree vanish identically
        let s4 = crate::series::binary_splitting_eval(&p, &zr, 9).unwrap().to_complex(prec);
        assert!(exact.dist(&s4, prec).is_zero());
    }

    #[test]
    fn quadruple_degenerate_group_smoke() {
        // q = 4 exercises triple eps-poles and offsets 0..3
        let prec = Precision::from_digits(30);
        let p = params(&[(1, 2), (1, 2), (1, 2), (1, 2)], &[(4, 3), (5, 4), (6, 5)]);
        let z = parse_complex("7+5i", prec).unwrap();
        let a = evaluate(&p, &z, 25).unwrap().value;
        let delta = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(15));
        let mut upper = Vec::new();
        for k in 0..4i64 {
            upper.push(rational(1, 2) + delta.clone() * Rational::from(num_bigint::BigInt::from(k)));
        }
        let p2 = HyperParams::new(upper, p.lower().to_vec()).unwrap();
        let b = evaluate(&p2, &z, 80).unwrap().value;
        let d = a.dist(&b, prec);
        let tol = a.abs(prec).mul(&parse_complex("1e-12", prec).unwrap().re, prec.get(), RM);
        assert!(d < tol, "q=4 degenerate {:?} vs perturbed {:?}", a, b);
    }

    #[test]
    fn evaluate_matches_published_value_at_30_digits() {
        // 2F1(10/3,10/3;7/2; 13+13i), published 50-digit value prefix
        let prec = Precision::from_digits(34);
        let p = params(&[(10, 3), (10, 3)], &[(7, 2)]);
        let z = parse_complex("13+13i", prec).unwrap();
        let r = evaluate(&p, &z, 30).unwrap();
        let expect = parse_complex(
            "0.000046465374473393490391242138657270730145885033760382+0.000098886403506421825123991623258719990457812894238744i",
            prec,
        )
        .unwrap();
        assert!(rel_close(&r.value, &expect, prec, "1e-28"), "got {:?}", r.value);
    }

    #[test]
    fn degenerate_vs_generic_offset_consistency() {
        // (10/3, 10/3; 7/2) vs (10/3, 10/3 + 1e-25; 7/2) at 60 digits
        let prec = Precision::from_digits(60);
        let p = params(&[(10, 3), (10, 3)], &[(7, 2)]);
        let z = parse_complex("13+13i", prec).unwrap();
        let a = evaluate(&p, &z, 60).unwrap().value;
        let delta = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(25));
        let p2 = HyperParams::new(
            vec![rational(10, 3), rational(10, 3) + delta],
            vec![rational(7, 2)],
        )
        .unwrap();
        let b = evaluate(&p2, &z, 60).unwrap().value;
        let d = a.dist(&b, prec);
        let tol = a.abs(prec).mul(&parse_complex("1e-20", prec).unwrap().re, prec.get(), RM);
        assert!(d < tol);
    }

    #[test]
    fn expansion_is_reusable_across_threads() {
        let prec = Precision::from_digits(30);
        let p = params(&[(10, 3), (10, 3)], &[(7, 2)]);
        let exp = expansion_at_infinity(&p, 30, prec).unwrap();
        // inside the unit circle the evaluation refuses
        let inside = parse_complex("0.5", prec).unwrap();
        assert!(matches!(evaluate_at_infinity(&exp, &inside), Err(Error::Domain(_))));
        let z = parse_complex("13+13i", prec).unwrap();
        let base = evaluate_at_infinity(&exp, &z).unwrap().value;
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| {
                    let e = &exp;
                    let zr = &z;
                    s.spawn(move || evaluate_at_infinity(e, zr).unwrap().value)
                })
                .collect();
            for h in handles {
                let v = h.join().unwrap();
                assert_eq!(
                    crate::numeric::round_to_digits(&v, 28),
                    crate::numeric::round_to_digits(&base, 28)
                );
            }
        });
    }

    #[test]
    fn singleton_assembly_matches_direct_prop_sum() {
        // fully generic: evaluate_at_infinity equals
        // sum_i C_i (-z)^(-a_i) * F(infty-side params; 1/z) summed directly
        let prec = Precision::from_digits(45);
        let p = params(&[(1, 2), (1, 4)], &[(3, 4)]);
        let n = 60;
        let exp = expansion_at_infinity(&p, n, prec).unwrap();
        let z = parse_complex("3+4i", prec).unwrap();
        let got = evaluate_at_infinity(&exp, &z).unwrap().value;
        let cs = generic_coefficients(&p, prec).unwrap();
        let inv_z = z.recip(prec);
        let mut expect = BigComplex::zero(prec);
        let uppers = p.upper();
        for (i, ai) in uppers.iter().enumerate() {
            // infinity-side parameters
            let mut up = vec![ai.clone()];
            for b in p.lower() {
                up.push(ai - b + Rational::one());
            }
            let mut low = Vec::new();
            for (j, aj) in uppers.iter().enumerate() {
                if j != i {
                    low.push(ai - aj + Rational::one());
                }
            }
            let side = HyperParams::new(up, low).unwrap();
            let f = taylor_eval(&side, &inv_z, prec, &TruncationPolicy::new(n, 45)).unwrap();
            let pref = principal_pow(
                &z.neg(),
                &BigComplex::from_rational(&-ai.clone(), prec),
                prec,
            )
            .unwrap();
            expect = expect.add(&cs[i].mul(&pref, prec).mul(&f.value, prec), prec);
        }
        assert!(rel_close(&got, &expect, prec, "1e-38"), "{:?} vs {:?}", got, expect);
    }
}
