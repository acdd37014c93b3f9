//! Command line interface: point evaluation, expansion-coefficient
//! inspection, benchmark tables and difference grids, and a self-test of the
//! library invariants.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hypergeom::numeric::{parse_complex, real_from_f64, round_to_digits, to_f64, BigComplex};
use hypergeom::oracle::{self, QuadRule, QuadratureSpec};
use hypergeom::special::{gamma, polygamma, rgamma, GammaContext};
use hypergeom::{
    connection, dispatch_plan, evaluate_at_infinity, expansion_at_infinity, working_precision,
    DispatchPlan, Error, EvalOptions, EvalResult, HyperParams, Precision,
};

#[derive(Parser)]
#[command(
    name = "hypergeom",
    version,
    about = "Arbitrary-precision generalized hypergeometric functions pFq off the unit circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate pF(p-1) at a point
    Eval(EvalArgs),
    /// Print the expansion coefficients at infinity
    Expand(ExpandArgs),
    /// Re-run the built-in benchmark cases, or emit a difference grid
    Bench(BenchArgs),
    /// Run the invariant self-test suites
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Taylor,
    Connection,
    /// Exact partial sum; needs a Gaussian-rational z inside the unit disk
    BinarySplitting,
}

#[derive(Args)]
struct EvalArgs {
    /// Upper parameters as comma-separated rationals, e.g. "10/3,10/3"
    #[arg(short = 'p', long = "upper", allow_hyphen_values = true)]
    upper: String,
    /// Lower parameters as comma-separated rationals, e.g. "7/2"
    #[arg(short = 'q', long = "lower", default_value = "", allow_hyphen_values = true)]
    lower: String,
    /// Evaluation point, e.g. "13+13i", "1.3-1.8i", "-10"
    #[arg(short, long, allow_hyphen_values = true)]
    z: String,
    /// Requested correct decimal digits
    #[arg(short, long)]
    digits: Option<usize>,
    /// Fixed truncation order (precision then follows terms + 10 digits)
    #[arg(short, long)]
    terms: Option<usize>,
    #[arg(short, long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(short, long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(short = 'p', long = "upper", allow_hyphen_values = true)]
    upper: String,
    #[arg(short = 'q', long = "lower", default_value = "", allow_hyphen_values = true)]
    lower: String,
    /// Truncation order N (coefficients for z^0 .. z^-N)
    #[arg(short = 'n', long = "order")]
    order: usize,
    /// Decimal digits used when printing coefficients
    #[arg(short, long, default_value_t = 19)]
    digits: usize,
    #[arg(short, long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// Cases to run: example1, example2, example3
    cases: Vec<String>,
    /// Emit a |r20 - r10| difference grid instead of the timing table
    #[arg(long)]
    grid: bool,
    /// Grid x range as "lo:hi"
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    xrange: String,
    /// Grid y range as "lo:hi"
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    yrange: String,
    /// Grid step
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(short, long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SelftestArgs {
    /// Digit budget for the reference-table comparisons
    #[arg(short, long, default_value_t = 19)]
    digits: usize,
    /// Corrupt one expansion coefficient to exercise the residual check
    #[arg(long, hide = true)]
    inject_corruption: bool,
    /// Write the reference table to this path and exit
    #[arg(long, value_name = "PATH")]
    dump_references: Option<std::path::PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => 2,
            Error::Annulus(_) => 4,
            Error::Inconsistency(_) | Error::Resonance { .. } => 5,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 3, message: format!("io error: {e}") }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

fn build_options(digits: Option<usize>, terms: Option<usize>, method: MethodArg) -> EvalOptions {
    let mut opts = match (terms, digits) {
        (Some(t), Some(d)) => EvalOptions::terms(t).with_digits(d),
        (Some(t), None) => EvalOptions::terms(t),
        (None, Some(d)) => EvalOptions::digits(d),
        (None, None) => EvalOptions::digits(19),
    };
    match method {
        MethodArg::Auto | MethodArg::BinarySplitting => {}
        MethodArg::Taylor => {
            // route everything to the Taylor arm; it rejects |z| >= 1 itself
            opts.inner_radius = f64::INFINITY;
            opts.outer_radius = f64::INFINITY;
        }
        MethodArg::Connection => {
            opts.inner_radius = -1.0;
            opts.outer_radius = 0.0;
        }
    }
    opts
}

struct TimedEval {
    result: EvalResult,
    setup_seconds: f64,
    sum_seconds: f64,
}

fn timed_evaluate(
    params: &HyperParams,
    z: &BigComplex,
    opts: &EvalOptions,
) -> Result<TimedEval, Error> {
    match dispatch_plan(z, opts) {
        DispatchPlan::Connection { order } => {
            let prec = working_precision(opts.digits);
            let t0 = Instant::now();
            let exp = expansion_at_infinity(params, order, prec)?;
            let setup_seconds = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let result = evaluate_at_infinity(&exp, z)?;
            Ok(TimedEval { result, setup_seconds, sum_seconds: t1.elapsed().as_secs_f64() })
        }
        _ => {
            let t0 = Instant::now();
            let result = connection::evaluate_with(params, z, opts)?;
            Ok(TimedEval { result, setup_seconds: 0.0, sum_seconds: t0.elapsed().as_secs_f64() })
        }
    }
}

fn err_display(e: &hypergeom::BigReal) -> String {
    format!("{:.2e}", to_f64(e))
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    let params = HyperParams::parse(&a.upper, &a.lower)?;
    let opts = build_options(a.digits, a.terms, a.method);
    let digits = opts.digits;
    let prec = working_precision(digits);
    let z = parse_complex(&a.z, prec)?;
    let timed = if a.method == MethodArg::BinarySplitting {
        let zr = hypergeom::series::GaussianRational::parse(&a.z)?;
        let terms = match hypergeom::dispatch_plan(&z, &opts) {
            DispatchPlan::Taylor { terms } => terms,
            _ => {
                return Err(Failure::from(Error::Domain(
                    "binary splitting needs |z| inside the Taylor disk".into(),
                )))
            }
        };
        let t0 = Instant::now();
        let result = hypergeom::series::binary_splitting_result(&params, &zr, terms, prec)?;
        TimedEval { result, setup_seconds: 0.0, sum_seconds: t0.elapsed().as_secs_f64() }
    } else {
        timed_evaluate(&params, &z, &opts)?
    };
    let r = &timed.result;
    let (re, im) = round_to_digits(&r.value, digits);
    match a.format {
        Format::Text => {
            println!("pFq({}) at z = {}", params, a.z);
            println!("method = {}, terms = {}, digits = {}", r.method, r.terms_used, digits);
            println!("re  = {re}");
            println!("im  = {im}");
            println!("err ~ {}", err_display(&r.err_estimate));
            if r.on_branch_cut {
                println!("note: z lies on the cut [1, inf); this is the Im z < 0 limit");
            }
            println!("time: setup {:.4} s, sum {:.4} s", timed.setup_seconds, timed.sum_seconds);
        }
        Format::Json => {
            let out = serde_json::json!({
                "params": params.to_string(),
                "z": a.z,
                "digits": digits,
                "method": r.method.to_string(),
                "terms_used": r.terms_used,
                "value_re": re,
                "value_im": im,
                "err_estimate": err_display(&r.err_estimate),
                "on_branch_cut": r.on_branch_cut,
                "seconds_setup": timed.setup_seconds,
                "seconds_sum": timed.sum_seconds,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Format::Csv => {
            println!("case,terms,digits,seconds,value_re,value_im,err_estimate");
            println!(
                "pFq({})@{},{},{},{:.6},{},{},{}",
                params,
                a.z,
                r.terms_used,
                digits,
                timed.setup_seconds + timed.sum_seconds,
                re,
                im,
                err_display(&r.err_estimate)
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

fn cmd_expand(a: ExpandArgs) -> Result<(), Failure> {
    let params = HyperParams::parse(&a.upper, &a.lower)?;
    let prec = working_precision(a.digits);
    let exp = expansion_at_infinity(&params, a.order, prec)?;
    match a.format {
        Format::Text => {
            println!("pFq({}) expansion at infinity, order {}", params, a.order);
            if !exp.grouping().raise_steps().is_empty() {
                println!(
                    "note: {} contiguity raise(s) replayed for integer-spaced parameters",
                    exp.grouping().raise_steps().len()
                );
            }
            for (g, s) in exp.series().iter().enumerate() {
                println!("group {g}: exponent {}, log-degree {}", s.alpha(), s.logdeg());
                for i in 0..=s.order() {
                    for j in 0..s.logdeg() {
                        let (re, im) = round_to_digits(s.coeff(i, j), a.digits);
                        println!("  c[{i}][{j}] = {re} + {im} i");
                    }
                }
            }
        }
        Format::Json => {
            let groups: Vec<serde_json::Value> = exp
                .series()
                .iter()
                .map(|s| {
                    let coeffs: Vec<Vec<[String; 2]>> = (0..=s.order())
                        .map(|i| {
                            (0..s.logdeg())
                                .map(|j| {
                                    let (re, im) = round_to_digits(s.coeff(i, j), a.digits);
                                    [re, im]
                                })
                                .collect()
                        })
                        .collect();
                    serde_json::json!({
                        "alpha": s.alpha().to_string(),
                        "logdeg": s.logdeg(),
                        "coefficients": coeffs,
                    })
                })
                .collect();
            let out = serde_json::json!({
                "params": params.to_string(),
                "order": a.order,
                "digits": a.digits,
                "raises": exp.grouping().raise_steps().len(),
                "groups": groups,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Format::Csv => {
            println!("group,alpha,logdeg,i,j,re,im");
            for (g, s) in exp.series().iter().enumerate() {
                for i in 0..=s.order() {
                    for j in 0..s.logdeg() {
                        let (re, im) = round_to_digits(s.coeff(i, j), a.digits);
                        println!("{g},{},{},{i},{j},{re},{im}", s.alpha(), s.logdeg());
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

fn bench_case(name: &str) -> Option<(HyperParams, &'static str)> {
    let (upper, lower, z) = match name {
        "example1" => ("10/3,10/3", "7/2", "13+13i"),
        "example2" => ("7/2,7/2", "31/5", "1.3+1.8i"),
        "example3" => ("7/2,7/2,7/2", "31/5,36/7", "13+13i"),
        _ => return None,
    };
    Some((HyperParams::parse(upper, lower).expect("benchmark params"), z))
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let err = |m: String| Failure { code: 2, message: m };
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| err(format!("invalid range {s:?}, expected lo:hi")))?;
    let lo: f64 = lo.parse().map_err(|_| err(format!("invalid range bound {lo:?}")))?;
    let hi: f64 = hi.parse().map_err(|_| err(format!("invalid range bound {hi:?}")))?;
    if hi < lo {
        return Err(err(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    if a.grid {
        return bench_grid(&a);
    }
    if a.format == Format::Csv {
        println!("case,terms,digits,seconds,value_re,value_im,err_estimate");
    }
    for name in &a.cases {
        let (params, z_str) = bench_case(name).ok_or_else(|| Failure {
            code: 2,
            message: format!("unknown case {name:?}; expected example1, example2 or example3"),
        })?;
        for terms in [5usize, 10, 20, 40, 80] {
            let digits = terms + 10;
            let prec = working_precision(digits);
            let z = parse_complex(z_str, prec)?;
            let t0 = Instant::now();
            let exp = expansion_at_infinity(&params, terms, prec)?;
            let setup = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let r = evaluate_at_infinity(&exp, &z)?;
            let sum = t1.elapsed().as_secs_f64();
            let (re, im) = round_to_digits(&r.value, digits);
            match a.format {
                Format::Csv => println!(
                    "{name},{terms},{digits},{:.6},{re},{im},{}",
                    setup + sum,
                    err_display(&r.err_estimate)
                ),
                Format::Text => println!(
                    "{name} terms={terms} digits={digits} setup={setup:.4}s sum={sum:.4}s\n  {re} + {im} i  (err ~ {})",
                    err_display(&r.err_estimate)
                ),
                Format::Json => {
                    let out = serde_json::json!({
                        "case": name, "terms": terms, "digits": digits,
                        "seconds_setup": setup, "seconds_sum": sum,
                        "value_re": re, "value_im": im,
                        "err_estimate": err_display(&r.err_estimate),
                    });
                    println!("{}", serde_json::to_string(&out).expect("json"));
                }
            }
        }
    }
    Ok(())
}

fn bench_grid(a: &BenchArgs) -> Result<(), Failure> {
    if a.cases.len() != 1 {
        return Err(Failure { code: 2, message: "--grid needs exactly one case name".into() });
    }
    let (params, _) = bench_case(&a.cases[0])
        .ok_or_else(|| Failure { code: 2, message: format!("unknown case {:?}", a.cases[0]) })?;
    let (x_lo, x_hi) = parse_range(&a.xrange)?;
    let (y_lo, y_hi) = parse_range(&a.yrange)?;
    if a.step.is_nan() || a.step <= 0.0 {
        return Err(Failure { code: 2, message: "step must be positive".into() });
    }
    let prec = working_precision(19);
    let r10 = expansion_at_infinity(&params, 10, prec)?;
    let r20 = expansion_at_infinity(&params, 20, prec)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "x,y,diff")?;
    let nx = ((x_hi - x_lo) / a.step).round() as i64;
    let ny = ((y_hi - y_lo) / a.step).round() as i64;
    for ix in 0..=nx {
        let x = x_lo + ix as f64 * a.step;
        for iy in 0..=ny {
            let y = y_lo + iy as f64 * a.step;
            if (x * x + y * y).sqrt() <= 1.02 {
                continue; // the expansions only converge outside the unit circle
            }
            let z = BigComplex::new(real_from_f64(x, prec), real_from_f64(y, prec));
            let v20 = evaluate_at_infinity(&r20, &z)?.value;
            let v10 = evaluate_at_infinity(&r10, &z)?.value;
            let diff = to_f64(&v20.dist(&v10, prec));
            writeln!(out, "{x:.4},{y:.4},{diff:.6e}")?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

struct SuiteReport {
    failures: Vec<String>,
}

impl SuiteReport {
    fn new() -> Self {
        SuiteReport { failures: Vec::new() }
    }

    fn finish(&mut self, name: &str, result: Result<(), String>) {
        match result {
            Ok(()) => println!("suite {name}: ok"),
            Err(msg) => {
                println!("suite {name}: FAILED ({msg})");
                self.failures.push(name.to_string());
            }
        }
    }
}

fn rel_error_digits(got: &BigComplex, expect: &BigComplex, prec: Precision) -> f64 {
    let d = to_f64(&got.dist(expect, prec));
    let s = to_f64(&expect.abs(prec)).abs().max(1e-300);
    if d == 0.0 {
        1e6
    } else {
        -(d / s).log10()
    }
}

fn suite_gamma_identities(digits: usize) -> Result<(), String> {
    let prec = Precision::from_digits(digits.max(30));
    let ctx = GammaContext::new(prec);
    let pts = [(1.7, 2.3), (-3.4, 1.25), (5.5, -0.75), (0.31, -4.2), (-6.8, -2.6), (8.25, 0.125)];
    let tol_digits = (prec.digits() as f64) - 6.0;
    for (x, y) in pts {
        let z = BigComplex::new(real_from_f64(x, prec), real_from_f64(y, prec));
        let g = gamma(&z, &ctx).map_err(|e| e.to_string())?;
        let g1 = gamma(&z.add(&BigComplex::one(prec), prec), &ctx).map_err(|e| e.to_string())?;
        let agree = rel_error_digits(&g1, &g.mul(&z, prec), prec);
        if agree < tol_digits {
            return Err(format!("recurrence at {x}+{y}i: {agree:.1} digits"));
        }
        let r = rgamma(&z, &ctx);
        let agree = rel_error_digits(&r.mul(&g, prec), &BigComplex::one(prec), prec);
        if agree < tol_digits {
            return Err(format!("rgamma at {x}+{y}i: {agree:.1} digits"));
        }
    }
    Ok(())
}

fn suite_jet_pole_cancellation(digits: usize) -> Result<(), String> {
    let prec = Precision::from_digits(digits.max(30));
    for (upper, lower) in [("10/3,10/3", "7/2"), ("7/2,7/2,7/2", "31/5,36/7")] {
        let params = HyperParams::parse(upper, lower).map_err(|e| e.to_string())?;
        let grouping = connection::group_parameters(&params).map_err(|e| e.to_string())?;
        connection::degenerate_leading_coefficients(&grouping, 0, grouping.collapsed(), prec)
            .map_err(|e| format!("{upper}: {e}"))?;
    }
    // closed form for the double group
    let params = HyperParams::parse("10/3,10/3", "7/2").map_err(|e| e.to_string())?;
    let grouping = connection::group_parameters(&params).map_err(|e| e.to_string())?;
    let lead =
        connection::degenerate_leading_coefficients(&grouping, 0, grouping.collapsed(), prec)
            .map_err(|e| e.to_string())?;
    let ctx = GammaContext::new(prec.plus(32));
    let rat = |n: i64, d: i64| hypergeom::Rational::new(n.into(), d.into());
    let k = {
        let gb = hypergeom::special::gamma_rat(&rat(7, 2), &ctx).map_err(|e| e.to_string())?;
        let ga = hypergeom::special::gamma_rat(&rat(10, 3), &ctx).map_err(|e| e.to_string())?;
        let gba = hypergeom::special::gamma_rat(&rat(1, 6), &ctx).map_err(|e| e.to_string())?;
        gb.div(&ga.mul(&gba, prec), prec)
    };
    let floor = digits.max(30) as f64 - 8.0;
    let agree = rel_error_digits(&lead[1], &k, prec);
    if agree < floor {
        return Err(format!("log coefficient matches closed form to only {agree:.1} digits"));
    }
    let psi_a = polygamma(0, &BigComplex::from_rational(&rat(10, 3), prec), &ctx)
        .map_err(|e| e.to_string())?;
    let psi_ba = polygamma(0, &BigComplex::from_rational(&rat(1, 6), prec), &ctx)
        .map_err(|e| e.to_string())?;
    let two_gamma = BigComplex::from_real(ctx.euler_gamma())
        .mul_real(&hypergeom::numeric::real_from_i64(2, prec), prec);
    let expect0 = k.mul(&two_gamma.add(&psi_a, prec).add(&psi_ba, prec), prec).neg();
    let agree = rel_error_digits(&lead[0], &expect0, prec);
    if agree < floor {
        return Err(format!("constant coefficient matches closed form to only {agree:.1} digits"));
    }
    Ok(())
}

fn suite_ode_residual_decay(inject_corruption: bool) -> Result<(), String> {
    let prec = Precision::from_digits(30);
    let cases = [("10/3,10/3", "7/2"), ("7/2,7/2", "31/5"), ("7/2,7/2,7/2", "31/5,36/7")];
    let z_grid = ["13+13i", "2+2i", "-5+i"];
    for (upper, lower) in cases {
        let params = HyperParams::parse(upper, lower).map_err(|e| e.to_string())?;
        let ode = hypergeom::frobenius::build_ode_polys(&params);
        let mut per_z_last: Vec<Option<f64>> = vec![None; z_grid.len()];
        for n in [10usize, 20, 40] {
            let mut exp = expansion_at_infinity(&params, n, prec).map_err(|e| e.to_string())?;
            if inject_corruption && n == 40 {
                let bump = parse_complex("1e-6", prec).map_err(|e| e.to_string())?;
                exp.series_mut()[0].bump_coefficient(2, 0, &bump);
            }
            for (zi, zs) in z_grid.iter().enumerate() {
                let z = parse_complex(zs, prec).map_err(|e| e.to_string())?;
                let mut rel_worst = 0.0f64;
                for s in exp.series() {
                    if s.is_zero() {
                        continue;
                    }
                    let r = hypergeom::frobenius::ode_residual(&ode, s, &z, prec)
                        .map_err(|e| e.to_string())?;
                    let (v, _) = s.eval(&z, prec).map_err(|e| e.to_string())?;
                    let rel = to_f64(&r) / to_f64(&v.abs(prec)).max(1e-300);
                    rel_worst = rel_worst.max(rel);
                }
                if let Some(prev) = per_z_last[zi] {
                    if rel_worst >= prev {
                        return Err(format!(
                            "{upper} at z={zs}: residual did not decay ({prev:.2e} -> {rel_worst:.2e} at N={n})"
                        ));
                    }
                }
                if n == 40 && rel_worst > 1e-10 {
                    return Err(format!(
                        "{upper} at z={zs}: relative residual {rel_worst:.2e} above 1e-10 at N=40"
                    ));
                }
                per_z_last[zi] = Some(rel_worst);
            }
        }
    }
    Ok(())
}

fn suite_oracle_agreement() -> Result<(), String> {
    let prec = Precision::from_digits(25);
    let spec = QuadratureSpec::new(QuadRule::DoubleExponential, 6000, prec);
    for (upper, lower, zs) in [("10/3,10/3", "7/2", "13+13i"), ("1/2,1/4", "3/4", "3+4i")] {
        let params = HyperParams::parse(upper, lower).map_err(|e| e.to_string())?;
        let z = parse_complex(zs, prec).map_err(|e| e.to_string())?;
        let o = oracle::euler_integral_for_params(&params, &z, &spec).map_err(|e| e.to_string())?;
        let v = connection::evaluate(&params, &z, 25).map_err(|e| e.to_string())?;
        let agree = rel_error_digits(&o.value, &v.value, prec);
        if agree < 15.0 {
            return Err(format!("{upper} at z={zs}: only {agree:.1} digits of agreement"));
        }
    }
    // published trapezoid row, sample-level agreement
    let prec_t = Precision::from_digits(22);
    let z = parse_complex("1.3+1.8i", prec_t).map_err(|e| e.to_string())?;
    let rat = |n: i64, d: i64| hypergeom::Rational::new(n.into(), d.into());
    let t = oracle::euler_integral_2f1(
        &rat(7, 2),
        &rat(7, 2),
        &rat(31, 5),
        &z,
        &QuadratureSpec::trapezoid(2000, prec_t),
    )
    .map_err(|e| e.to_string())?;
    let params = HyperParams::parse("7/2,7/2", "31/5").map_err(|e| e.to_string())?;
    let row = oracle::lookup(&params, "1.3+1.8i", "trapezoid-2000")
        .ok_or_else(|| "missing trapezoid row".to_string())?;
    let d = to_f64(&t.value.dist(&row.value(prec_t), prec_t));
    if d > 1e-8 {
        return Err(format!("trapezoid-2000 deviates from the published row by {d:.2e}"));
    }
    Ok(())
}

fn suite_reference_table(digits: usize) -> Result<(), String> {
    let mut skipped = 0usize;
    let p3 = HyperParams::parse("7/2,7/2,7/2", "31/5,36/7").map_err(|e| e.to_string())?;
    for e in oracle::reference_table() {
        if e.source.starts_with("trapezoid") {
            continue; // quadrature data, covered by the oracle suite
        }
        // the published series rows of the triple-degenerate case are
        // inconsistent with their own companion rows; the acceptance suite
        // carries the full comparison
        if e.params == p3 && e.source.starts_with("series") {
            skipped += 1;
            continue;
        }
        let cmp_digits = e.published_digits.min(digits);
        let prec = Precision::from_digits(cmp_digits + 12);
        let z = e.z_value(prec);
        let ours = if let Some(terms) = e.source.strip_prefix("series-") {
            let terms: usize = terms.parse().expect("series tag");
            let opts = EvalOptions::terms(terms);
            connection::evaluate_with(&e.params, &z, &opts).map_err(|err| err.to_string())?
        } else {
            connection::evaluate(&e.params, &z, cmp_digits + 6).map_err(|err| err.to_string())?
        };
        // published rows carry rounding of their own finite-precision runs
        // in the last couple of digits
        let agree = rel_error_digits(&ours.value, &e.value(prec), prec);
        if agree < cmp_digits as f64 - 2.5 {
            return Err(format!(
                "{} {} {}: {agree:.1} digits of agreement, need about {cmp_digits}",
                e.params, e.z, e.source
            ));
        }
    }
    if skipped > 0 {
        println!("  (skipped {skipped} series rows known inconsistent with their companion rows)");
    }
    Ok(())
}

fn cmd_selftest(a: SelftestArgs) -> Result<(), Failure> {
    if let Some(path) = &a.dump_references {
        let mut f = std::fs::File::create(path)?;
        oracle::write_reference_table(&mut f)?;
        println!("reference table written to {}", path.display());
        return Ok(());
    }
    let mut report = SuiteReport::new();
    report.finish("gamma-identities", suite_gamma_identities(a.digits));
    report.finish("jet-pole-cancellation", suite_jet_pole_cancellation(a.digits));
    report.finish("ode-residual-decay", suite_ode_residual_decay(a.inject_corruption));
    report.finish("oracle-agreement", suite_oracle_agreement());
    report.finish("reference-table", suite_reference_table(a.digits));
    if report.failures.is_empty() {
        println!("all suites passed");
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!(
                "{} suite(s) failed: {}",
                report.failures.len(),
                report.failures.join(", ")
            ),
        })
    }
}
