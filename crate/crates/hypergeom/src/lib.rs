//! Arbitrary-precision evaluation of the generalized hypergeometric
//! functions `pF(p-1)(z)` anywhere off the unit circle.
//!
//! Inside the unit disk the defining Taylor series is summed directly
//! (optionally with exact binary splitting for rational arguments). Outside,
//! the function is continued through series solutions at `z = infinity`:
//! generic upper parameters use the classical connection coefficients, and
//! repeated or integer-spaced upper parameters use log-carrying expansions
//! whose leading coefficients are produced by a confluent limit in a formal
//! perturbation parameter.
//!
//! Branch convention: principal arguments in `(-pi, pi]` throughout, so the
//! prefactors `(-z)^(-alpha)` and `log(-z)` are continuous on the plane cut
//! along `[1, +inf)` and real evaluation below `1` matches the series.

pub mod connection;
pub mod error;
pub mod frobenius;
pub mod jets;
pub mod series;
pub mod special;
pub mod numeric;
pub mod oracle;

/// Exact rational scalar; parameters of the hypergeometric function are
/// always carried in this form.
pub type Rational = num_rational::BigRational;

pub use connection::{
    dispatch_plan, working_precision, DispatchPlan,
    evaluate, evaluate_at_infinity, evaluate_with, expansion_at_infinity, ConnectionExpansion,
    EvalOptions, ParamGrouping,
};
pub use error::{Error, Result};
pub use series::{EvalResult, HyperParams, Method, TruncationPolicy};
pub use special::GammaContext;
pub use numeric::{parse_complex, principal_log, principal_pow, round_to_digits, BigComplex, BigReal, Precision};
