//! Command-line entry point: density tables, exact moments, coefficient
//! dumps, verification suites, asymptotic formulas, and Monte Carlo sampling.
//!
//! Exit status: 0 on success, 1 when a verification reports a defect, 2 on
//! usage errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use eginoe::algebra::{parse_rational, rational_str, Poly, Rational};
use eginoe::coeffs::CoeffSet;
use eginoe::density::{density_grid, DensityInstance};
use eginoe::moments::{exact_moment, mgf_u_discrete, quad_moment, MgfSeries, MomentKind, MomentTable};
use eginoe::recursion::{self, VerifyReport};
use eginoe::sampler::{empirical_stats, sample_eigenvalues, Convention};
use eginoe::{asymptotics, ModelParams};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "eginoe",
    about = "Finite-N real-eigenvalue statistics of the elliptic Ginibre orthogonal ensemble",
    version
)]
struct Cli {
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Worker threads for grids and sampling (defaults to RAYON_NUM_THREADS
    /// or the core count)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the real-eigenvalue density as CSV: x, r1, r2, total
    ///
    /// Example: eginoe density --n 4 --tau 1/2 --points 81
    Density(DensityArgs),
    /// Exact even moments as CSV: order, coeff_num, coeff_den, radicand, float_value
    ///
    /// Example: eginoe moments --n 2 --tau 1 --pmax 3
    Moments(MomentsArgs),
    /// Dump the A_k / B_k polynomial tables as JSON
    ///
    /// Example: eginoe coeffs --n 2 --tau 1/2
    Coeffs(CoeffsArgs),
    /// Run one verification identity and emit a JSON report
    ///
    /// Example: eginoe verify --identity eleven --n 4 --tau 1/2 --pmax 12
    Verify(VerifyArgs),
    /// Closed-form count and large-N asymptotics as CSV
    ///
    /// Example: eginoe asymptotics --regime weak --alpha 1 --p 2
    Asymptotics(AsymptoticsArgs),
    /// Monte Carlo sampling: statistics or an eigenvalue scatter dump
    ///
    /// Example: eginoe sample --n 100 --tau 1/2 --samples 200 --emit stats
    Sample(SampleArgs),
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    n: usize,
    /// Non-Hermiticity parameter as an exact rational ("1/2" or "0.5")
    #[arg(long)]
    tau: String,
    /// Number of grid points
    #[arg(long, default_value_t = 41)]
    points: usize,
    /// Half-width of the grid (defaults to 3 sqrt(N (1+tau)))
    #[arg(long)]
    xmax: Option<f64>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tau: String,
    /// Largest half-order: emits M_0, M_2, ..., M_{2 pmax}
    #[arg(long, default_value_t = 10)]
    pmax: usize,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tau: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Eleven,
    Gue,
    Goe,
    Ginoe,
    Mixed,
    Ode7,
    Ode3,
    OdeV,
    Uv,
    Sigma,
    D0,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    identity: Identity,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value = "1/2")]
    tau: String,
    /// Largest recurrence index p (recurrence identities)
    #[arg(long, default_value_t = 12)]
    pmax: usize,
    /// Series order J for differential identities
    #[arg(long, default_value_t = 30)]
    order: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Count,
    Strong,
    Weak,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[arg(long, value_enum)]
    regime: Regime,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Half-order of the moment (M_{2p})
    #[arg(long, default_value_t = 0)]
    p: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Stats,
    Eigenvalues,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tau: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "overN")]
    convention: String,
    #[arg(long, value_enum, default_value_t = Emit::Stats)]
    emit: Emit,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let out: Box<dyn Write> = match &cli.output {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot open {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(std::io::stdout()),
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// 17 significant digits.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_params(n: usize, tau: &str) -> Result<ModelParams, eginoe::Error> {
    let tau = parse_rational(tau)?;
    ModelParams::new(n, tau)
}

fn run(command: Command, mut out: Box<dyn Write>) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match command {
        Command::Density(args) => {
            let params = parse_params(args.n, &args.tau)?;
            eprintln!("tau parsed as {}", rational_str(params.tau()));
            let inst = DensityInstance::new(params.clone());
            let grid: Vec<f64> = match args.xmax {
                Some(xmax) => {
                    let m = args.points.max(2);
                    (0..m).map(|i| -xmax + 2.0 * xmax * i as f64 / (m - 1) as f64).collect()
                }
                None if args.points == 41 => density_grid(&params),
                None => {
                    let xmax = 3.0 * (params.n() as f64 * (1.0 + params.tau_f64())).sqrt();
                    let m = args.points.max(2);
                    (0..m).map(|i| -xmax + 2.0 * xmax * i as f64 / (m - 1) as f64).collect()
                }
            };
            writeln!(out, "x,r1,r2,total")?;
            for x in grid {
                let r1 = inst.r1(x);
                let r2 = inst.r2(x);
                writeln!(out, "{},{},{},{}", fmt_f64(x), fmt_f64(r1), fmt_f64(r2), fmt_f64(r1 + r2))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Moments(args) => {
            let params = parse_params(args.n, &args.tau)?;
            eprintln!("tau parsed as {}", rational_str(params.tau()));
            let table = MomentTable::build(&params, MomentKind::Total, args.pmax)?;
            writeln!(out, "order,coeff_num,coeff_den,radicand,float_value")?;
            for p in 0..=args.pmax {
                let v = table.value(2 * p)?;
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    2 * p,
                    v.coeff().numer(),
                    v.coeff().denom(),
                    rational_str(v.radicand()),
                    fmt_f64(v.to_f64())
                )?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs(args) => {
            let params = parse_params(args.n, &args.tau)?;
            let set = CoeffSet::build(&params)?;
            let poly_json = |p: &Poly| -> Value {
                Value::Array(p.coeffs().iter().map(|c| Value::String(rational_str(c))).collect())
            };
            let doc = json!({
                "params": { "n": params.n(), "tau": rational_str(params.tau()) },
                "base": {
                    "a": poly_json(set.base().0),
                    "b": poly_json(set.base().1),
                    "c": poly_json(set.base().2),
                    "d": poly_json(set.base().3),
                },
                "B": (0..5).map(|k| poly_json(set.b_poly(k))).collect::<Vec<_>>(),
                "A": (0..8).map(|k| poly_json(set.a_poly(k))).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let report = run_verify(&args)?;
            let doc = json!({
                "identity": report.identity,
                "params": report.params,
                "status": if report.passed { "pass" } else { "fail" },
                "first_defect": report.first_defect,
                "note": report.note,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Asymptotics(args) => {
            run_asymptotics(&args, &mut out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample(args) => {
            let params = parse_params(args.n, &args.tau)?;
            eprintln!("tau parsed as {}", rational_str(params.tau()));
            let convention: Convention = args.convention.parse()?;
            let tau = params.tau_f64();
            match args.emit {
                Emit::Stats => {
                    let report = empirical_stats(
                        args.n,
                        tau,
                        args.samples,
                        args.seed,
                        &[1, 2, 4],
                        convention,
                    )?;
                    writeln!(out, "metric,value,stderr")?;
                    writeln!(
                        out,
                        "count_mean,{},{}",
                        fmt_f64(report.count_mean),
                        fmt_f64(report.count_stderr)
                    )?;
                    for (p, mean, se) in &report.power_sums {
                        writeln!(out, "power_sum_{p},{},{}", fmt_f64(*mean), fmt_f64(*se))?;
                    }
                    writeln!(out, "max_backward_error,{},0", fmt_f64(report.max_backward_error))?;
                    writeln!(
                        out,
                        "parity_even_all,{},0",
                        if report.parity_even_all { 1 } else { 0 }
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
                Emit::Eigenvalues => {
                    writeln!(out, "sample_index,re,im")?;
                    for s in 0..args.samples as u64 {
                        for (re, im) in
                            sample_eigenvalues(args.n, tau, args.seed, s, convention)?
                        {
                            writeln!(out, "{s},{},{}", fmt_f64(re), fmt_f64(im))?;
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Result<VerifyReport, Box<dyn std::error::Error>> {
    let report = match args.identity {
        Identity::Eleven => {
            let params = parse_params(args.n, &args.tau)?;
            let set = CoeffSet::build(&params)?;
            let p_max = args.pmax.max(10) as i64;
            let table = MomentTable::build(&params, MomentKind::Total, p_max as usize)?;
            recursion::verify_elliptic_recurrence(&set, &table, 10, p_max)?
        }
        Identity::Gue => verify_gue(args.pmax)?,
        Identity::Goe => verify_goe(args.n, args.pmax)?,
        Identity::Ginoe => verify_ginoe(args.n, args.pmax)?,
        Identity::Mixed => recursion::verify_mixed_goe_gue(args.pmax)?,
        Identity::Ode7 => {
            let params = parse_params(args.n, &args.tau)?;
            let set = CoeffSet::build(&params)?;
            let table = build_for_order(&params, MomentKind::Total, args.order)?;
            recursion::verify_mgf_ode(&set, &table, args.order)?
        }
        Identity::Ode3 => {
            let params = parse_params(args.n, &args.tau)?;
            let table = build_for_order(&params, MomentKind::Component1, args.order)?;
            recursion::verify_u_ode(&params, &table, args.order)?
        }
        Identity::OdeV => {
            let params = parse_params(args.n, &args.tau)?;
            let set = CoeffSet::build(&params)?;
            let table = build_for_order(&params, MomentKind::Total, args.order)?;
            recursion::verify_v_ode(&set, &table, args.order)?
        }
        Identity::Uv => {
            let params = parse_params(args.n, &args.tau)?;
            let set = CoeffSet::build(&params)?;
            let u = build_for_order(&params, MomentKind::Component1, args.order)?;
            let m = build_for_order(&params, MomentKind::Total, args.order)?;
            recursion::verify_u_from_v(&set, &u, &m, args.order)?
        }
        Identity::Sigma => {
            let params = parse_params(args.n, &args.tau)?;
            let table = build_for_order(&params, MomentKind::Sigma, args.order)?;
            recursion::verify_sigma_ode(&params, &table, args.order)?
        }
        Identity::D0 => {
            let len = args.order + 12;
            let a = recursion::verify_d0_annihilation(
                &recursion::sinh_t_over_t_series(len),
                args.order,
            )?;
            let b = recursion::verify_d0_annihilation(&recursion::half_cosh_series(len), args.order)?;
            VerifyReport {
                identity: "d0".into(),
                params: format!("order {}", args.order),
                passed: a.passed && b.passed,
                first_defect: a.first_defect.or(b.first_defect),
                note: Some("checked on sinh(t)/t and cosh(t)/2 series".into()),
            }
        }
    };
    Ok(report)
}

fn build_for_order(
    params: &ModelParams,
    kind: MomentKind,
    order: usize,
) -> Result<MomentTable, eginoe::Error> {
    MomentTable::build(params, kind, (order + 3).div_ceil(2) + 2)
}

fn verify_gue(p_max: usize) -> Result<VerifyReport, Box<dyn std::error::Error>> {
    let table = recursion::run_gue(p_max.max(3));
    for p in 0..=p_max.max(3) {
        let coeffs = recursion::genus_coeffs(&table, p)?;
        if Rational::from_integer(coeffs[0].clone())
            != Rational::from_integer(eginoe::algebra::catalan(p))
        {
            return Ok(VerifyReport {
                identity: "gue".into(),
                params: format!("p={p}"),
                passed: false,
                first_defect: Some(format!("leading coefficient {} != Catalan", coeffs[0])),
                note: None,
            });
        }
    }
    Ok(VerifyReport {
        identity: "gue".into(),
        params: format!("p<=?{p_max}").replace('?', ""),
        passed: true,
        first_defect: None,
        note: Some("genus expansion integral and Catalan-led".into()),
    })
}

fn verify_goe(n: usize, p_max: usize) -> Result<VerifyReport, Box<dyn std::error::Error>> {
    let params = ModelParams::new(n, Rational::one())?;
    let table = recursion::run_goe(p_max.max(4));
    let nf = eginoe::algebra::rat(n as i64);
    for p in 0..=p_max.max(4) {
        let generated = table.entry(p).eval(&nf);
        let exact = exact_moment(&params, 2 * p);
        if exact.coeff() != &generated || !exact.radicand().is_one() {
            return Ok(VerifyReport {
                identity: "goe".into(),
                params: format!("N={n} p={p}"),
                passed: false,
                first_defect: Some(format!("recursion {generated} vs exact {exact}")),
                note: None,
            });
        }
    }
    Ok(VerifyReport {
        identity: "goe".into(),
        params: format!("N={n} p<={p_max}"),
        passed: true,
        first_defect: None,
        note: None,
    })
}

fn verify_ginoe(n: usize, p_max: usize) -> Result<VerifyReport, Box<dyn std::error::Error>> {
    let params = ModelParams::new(n, Rational::zero())?;
    let generated = recursion::run_ginoe(n, p_max.max(2))?;
    for (p, value) in generated.iter().enumerate() {
        let exact = exact_moment(&params, 2 * p);
        if value != &exact {
            return Ok(VerifyReport {
                identity: "ginoe".into(),
                params: format!("N={n} p={p}"),
                passed: false,
                first_defect: Some(format!("recursion {value} vs exact {exact}")),
                note: None,
            });
        }
    }
    Ok(VerifyReport {
        identity: "ginoe".into(),
        params: format!("N={n} p<={p_max}"),
        passed: true,
        first_defect: None,
        note: None,
    })
}

fn run_asymptotics(
    args: &AsymptoticsArgs,
    out: &mut Box<dyn Write>,
) -> Result<(), Box<dyn std::error::Error>> {
    match args.regime {
        Regime::Count => {
            let n = args.n.ok_or("count regime needs --n")?;
            let tau_str = args.tau.as_deref().ok_or("count regime needs --tau")?;
            let params = parse_params(n, tau_str)?;
            let count = asymptotics::expected_real_count(&params)?;
            writeln!(out, "n,tau,expected_real_count")?;
            writeln!(out, "{n},{},{}", rational_str(params.tau()), fmt_f64(count))?;
        }
        Regime::Strong => {
            let tau_str = args.tau.as_deref().ok_or("strong regime needs --tau")?;
            let tau = eginoe::algebra::rational_to_f64(&parse_rational(tau_str)?);
            writeln!(out, "tau,p,strong_moment")?;
            writeln!(
                out,
                "{tau},{},{}",
                args.p,
                fmt_f64(asymptotics::strong_moment(tau, args.p))
            )?;
        }
        Regime::Weak => {
            let alpha = args.alpha.ok_or("weak regime needs --alpha")?;
            let series = asymptotics::weak_moment_series(alpha, args.p, 1e-12)?;
            writeln!(out, "alpha,p,weak_moment_series,weak_moment_bessel")?;
            let bessel = if args.p <= 2 {
                fmt_f64(asymptotics::weak_moment_bessel(alpha, args.p)?)
            } else {
                String::from("")
            };
            writeln!(out, "{alpha},{},{},{bessel}", args.p, fmt_f64(series))?;
        }
    }
    Ok(())
}

use num_traits_shim::*;
mod num_traits_shim {
    pub trait OneShim {
        fn one() -> Self;
    }
    pub trait IsOneShim {
        fn is_one(&self) -> bool;
    }
}
