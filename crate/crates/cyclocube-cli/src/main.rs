//! Command-line front end: load designs and measures, run the analyses,
//! print exact and decimal reports as aligned text or JSON.
//!
//! Exit codes: 0 success, 2 input error, 3 not-found result, 4 internal
//! invariant breach.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use cyclocube::cubature::{
    compute_weights, equal_weight_basis_search, mixed_exactness_check, precision_basis_report,
    quadrature_holomorphic, quotient_rule, verify_exactness, CubatureRule, RuleDoc, SearchOutcome,
};
use cyclocube::design::{indicator_coefficients, is_regular_fraction, Design, Monomial};
use cyclocube::interp::{MonomialBasis, TermOrder};
use cyclocube::measures::{
    gaussian_null_moment_predicate, gaussian_sampler, mc_estimate_moment, DiscreteMeasure,
    GaussianSpec, McEstimate, MixedExponent, Moment, MomentProvider,
};

#[derive(Parser)]
#[command(
    name = "cyclocube",
    version,
    about = "Interpolatory cubature on grids of roots of unity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Tolerance for float comparisons (exact data never uses it).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the nonzero indicator coefficients of a design and whether it
    /// is a regular fraction.
    Indicator {
        /// Design JSON file.
        #[arg(long)]
        design: PathBuf,
    },
    /// Compute the unique interpolatory weights for a basis and a measure.
    Weights {
        /// Design JSON file.
        #[arg(long)]
        design: PathBuf,
        /// "auto" builds the quotient basis under --order; otherwise a JSON
        /// file holding an array of exponent vectors.
        #[arg(long, default_value = "auto")]
        basis: String,
        /// "deglex" or a JSON file listing candidate monomials in order.
        #[arg(long, default_value = "deglex")]
        order: String,
        /// "gaussian" (standard, one variable per design factor) or a JSON
        /// measure file, discrete or Gaussian.
        #[arg(long, default_value = "gaussian")]
        measure: String,
    },
    /// Search for a basis whose weights are all 1/n; exits 3 when none
    /// exists.
    EqualSearch {
        /// Design JSON file.
        #[arg(long)]
        design: PathBuf,
        /// "gaussian" or a JSON measure file.
        #[arg(long, default_value = "gaussian")]
        measure: String,
    },
    /// Check a saved rule's exactness on given exponents.
    Verify {
        /// Design JSON file; must match the rule.
        #[arg(long)]
        design: PathBuf,
        /// Rule JSON file as produced by `weights` or `equal-search`.
        #[arg(long)]
        rule: PathBuf,
        /// "gaussian" or a JSON measure file.
        #[arg(long, default_value = "gaussian")]
        measure: String,
        /// Exponent vector, comma separated (e.g. "0,5"); repeatable.
        #[arg(long = "alpha", required = true)]
        alphas: Vec<String>,
        /// Conjugate shift for the mixed-monomial transfer check, applied
        /// to every alpha.
        #[arg(long)]
        gamma: Option<String>,
        /// Append a Monte Carlo estimate of each integral (Gaussian
        /// measures only), with this many samples.
        #[arg(long)]
        mc: Option<u64>,
        /// RNG seed for --mc.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide the sufficient zero-moment criterion for a mixed Gaussian
    /// moment.
    NullMoment {
        /// Gaussian spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Exponent pairs "n1,m1;n2,m2;...".
        #[arg(long)]
        pairs: String,
        /// Append a Monte Carlo estimate with this many samples.
        #[arg(long)]
        mc: Option<u64>,
        /// RNG seed for --mc.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<cyclocube::Error> for CliError {
    fn from(e: cyclocube::Error) -> Self {
        let code = match &e {
            cyclocube::Error::Internal(_) => 4,
            _ => 2,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Indicator { design } => cmd_indicator(&design, cli.format),
        Command::Weights {
            design,
            basis,
            order,
            measure,
        } => cmd_weights(&design, &basis, &order, &measure, cli.format, cli.tol),
        Command::EqualSearch { design, measure } => {
            cmd_equal_search(&design, &measure, cli.format, cli.tol)
        }
        Command::Verify {
            design,
            rule,
            measure,
            alphas,
            gamma,
            mc,
            seed,
        } => cmd_verify(
            &design, &rule, &measure, &alphas, gamma.as_deref(), mc, seed, cli.format, cli.tol,
        ),
        Command::NullMoment {
            spec,
            pairs,
            mc,
            seed,
        } => cmd_null_moment(&spec, &pairs, mc, seed, cli.format),
    }
}

// ---------------------------------------------------------------- loading

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_design(path: &Path) -> CliResult<Design> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_gaussian(path: &Path) -> CliResult<GaussianSpec> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

enum Measure {
    Gaussian(GaussianSpec),
    Discrete(DiscreteMeasure),
}

impl Measure {
    fn provider(&self) -> &dyn MomentProvider {
        match self {
            Measure::Gaussian(g) => g,
            Measure::Discrete(d) => d,
        }
    }
}

/// "gaussian" means the standard spec with one independent unit-variance
/// variable per design factor; a path is sniffed by its fields.
fn load_measure(arg: &str, k: usize) -> CliResult<Measure> {
    if arg == "gaussian" {
        return Ok(Measure::Gaussian(GaussianSpec::standard(k)?));
    }
    let path = Path::new(arg);
    let text = read_file(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if value.get("atoms").is_some() {
        let m: DiscreteMeasure = serde_json::from_value(value)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok(Measure::Discrete(m))
    } else if value.get("sigma2").is_some() {
        let g: GaussianSpec = serde_json::from_value(value)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok(Measure::Gaussian(g))
    } else {
        Err(CliError::input(format!(
            "{}: neither a discrete measure (atoms) nor a Gaussian spec (sigma2)",
            path.display()
        )))
    }
}

fn load_monomial_list(path: &Path) -> CliResult<Vec<Monomial>> {
    let exps: Vec<Vec<u64>> = serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(exps.into_iter().map(Monomial::new).collect())
}

fn load_order(arg: &str) -> CliResult<TermOrder> {
    if arg == "deglex" {
        Ok(TermOrder::DegLex)
    } else {
        Ok(TermOrder::Explicit(load_monomial_list(Path::new(arg))?))
    }
}

fn parse_exponents(s: &str, k: usize) -> CliResult<Monomial> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::input(format!("bad exponent {t:?} in {s:?}")))
        })
        .collect::<CliResult<_>>()?;
    if parts.len() != k {
        return Err(CliError::input(format!(
            "exponent list {s:?} has {} entries, design has {k} factors",
            parts.len()
        )));
    }
    Ok(Monomial::new(parts))
}

fn parse_pairs(s: &str) -> CliResult<MixedExponent> {
    let pairs: Vec<(u64, u64)> = s
        .split(';')
        .map(|chunk| {
            let mut it = chunk.split(',').map(str::trim);
            let a = it.next().unwrap_or("");
            let b = it.next();
            let rest = it.next();
            match (a.parse::<u64>(), b.map(str::parse::<u64>), rest) {
                (Ok(n), Some(Ok(m)), None) => Ok((n, m)),
                _ => Err(CliError::input(format!("bad pair {chunk:?} in {s:?}"))),
            }
        })
        .collect::<CliResult<_>>()?;
    Ok(MixedExponent::new(pairs))
}

// --------------------------------------------------------------- printing

fn fmt_complex(c: Complex64) -> String {
    format!("{:.12}{:+.12}i", c.re, c.im)
}

fn moment_value(v: &Moment) -> (Option<String>, Complex64) {
    match v {
        Moment::Exact(x) => (Some(x.to_string()), x.to_complex()),
        Moment::Approx(x) => (None, *x),
    }
}

fn moment_json(v: &Moment) -> serde_json::Value {
    let (exact, c) = moment_value(v);
    match exact {
        Some(s) => json!({"exact": s, "re": c.re, "im": c.im}),
        None => json!({"re": c.re, "im": c.im}),
    }
}

fn moment_text(v: &Moment) -> String {
    let (exact, c) = moment_value(v);
    match exact {
        Some(s) => format!("{s} = {}", fmt_complex(c)),
        None => fmt_complex(c),
    }
}

fn mc_json(est: &McEstimate) -> serde_json::Value {
    json!({
        "mean_re": est.mean.re,
        "mean_im": est.mean.im,
        "se_re": est.se_re,
        "se_im": est.se_im,
        "n": est.n,
    })
}

fn print_rule_text(out: &mut String, rule: &CubatureRule) {
    let doc = rule.to_doc();
    let basis_names: Vec<String> = rule
        .basis()
        .monomials()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let _ = writeln!(out, "design: m={} k={} n={}", doc.m, doc.k, doc.nodes.len());
    let _ = writeln!(out, "basis: {}", basis_names.join(", "));
    let _ = writeln!(out, "weights:");
    for w in &doc.weights {
        let node = w
            .node
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match &w.exact {
            Some(s) => {
                let _ = writeln!(
                    out,
                    "  ({node}): {s} = {}",
                    fmt_complex(Complex64::new(w.re, w.im))
                );
            }
            None => {
                let _ = writeln!(out, "  ({node}): {}", fmt_complex(Complex64::new(w.re, w.im)));
            }
        }
    }
    let _ = writeln!(out, "equal weights: {}", rule.equal_weights());
    if let Some(r) = rule.residual() {
        let _ = writeln!(out, "solve residual: {r:.3e}");
    }
}

// --------------------------------------------------------------- commands

fn cmd_indicator(design_path: &Path, format: Format) -> CliResult<u8> {
    let design = load_design(design_path)?;
    let ind = indicator_coefficients(&design)?;
    let regularity = is_regular_fraction(&design)?;
    let support = ind.support();
    let total = design.class_count()?;

    match format {
        Format::Json => {
            let coefficients: Vec<serde_json::Value> = support
                .iter()
                .map(|s| {
                    let v = ind.coeff(s).expect("support member");
                    let c = v.to_complex();
                    Ok(json!({
                        "monomial": s.exponents(),
                        "exact": v.to_string(),
                        "re": c.re,
                        "im": c.im,
                    }))
                })
                .collect::<CliResult<_>>()?;
            let doc = json!({
                "m": design.m(),
                "k": design.k(),
                "n": design.n(),
                "classes": total,
                "coefficients": coefficients,
                "regular": regularity.is_regular,
                "witnesses": regularity
                    .witnesses
                    .iter()
                    .map(|w| w.exponents().to_vec())
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "design: m={} k={} n={}",
                design.m(),
                design.k(),
                design.n()
            );
            let _ = writeln!(
                out,
                "nonzero indicator coefficients ({} of {} classes):",
                support.len(),
                total
            );
            let width = support
                .iter()
                .map(|s| s.to_string().len())
                .max()
                .unwrap_or(1);
            for s in &support {
                let v = ind.coeff(s)?;
                let _ = writeln!(
                    out,
                    "  {:width$}  {}",
                    s.to_string(),
                    moment_text(&Moment::Exact(v.clone())),
                );
            }
            let _ = writeln!(out, "regular fraction: {}", regularity.is_regular);
            if !regularity.witnesses.is_empty() {
                let names: Vec<String> = regularity
                    .witnesses
                    .iter()
                    .map(|w| w.to_string())
                    .collect();
                let _ = writeln!(out, "witnesses: {}", names.join(", "));
            }
            print!("{out}");
        }
    }
    Ok(0)
}

fn cmd_weights(
    design_path: &Path,
    basis_arg: &str,
    order_arg: &str,
    measure_arg: &str,
    format: Format,
    tol: f64,
) -> CliResult<u8> {
    let design = load_design(design_path)?;
    let measure = load_measure(measure_arg, design.k())?;
    let rule = if basis_arg == "auto" {
        let order = load_order(order_arg)?;
        quotient_rule(&design, &order, measure.provider(), tol)?
    } else {
        let monomials = load_monomial_list(Path::new(basis_arg))?;
        let basis = MonomialBasis::new(design.m(), monomials)?;
        compute_weights(&design, &basis, measure.provider(), tol)?
    };
    emit_rule(&rule, format);
    Ok(0)
}

fn emit_rule(rule: &CubatureRule, format: Format) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&rule.to_doc()).unwrap()
            );
        }
        Format::Text => {
            let mut out = String::new();
            print_rule_text(&mut out, rule);
            print!("{out}");
        }
    }
}

fn cmd_equal_search(
    design_path: &Path,
    measure_arg: &str,
    format: Format,
    tol: f64,
) -> CliResult<u8> {
    let design = load_design(design_path)?;
    let measure = load_measure(measure_arg, design.k())?;
    match equal_weight_basis_search(&design, measure.provider(), tol)? {
        SearchOutcome::Found(rule) => {
            let report = precision_basis_report(&rule, measure.provider(), tol)?;
            match format {
                Format::Json => {
                    let doc = json!({
                        "found": true,
                        "rule": serde_json::to_value(rule.to_doc()).unwrap(),
                        "precision": serde_json::to_value(&report).unwrap(),
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Text => {
                    let mut out = String::new();
                    print_rule_text(&mut out, &rule);
                    let names: Vec<String> = report
                        .classes
                        .iter()
                        .map(|c| c.monomial.to_string())
                        .collect();
                    let _ = writeln!(out, "precision classes: {}", names.join(", "));
                    let _ = writeln!(
                        out,
                        "precision degree: {}{}",
                        report.precision_degree,
                        if report.degree_unbounded {
                            " (unbounded over lifts)"
                        } else {
                            ""
                        }
                    );
                    print!("{out}");
                }
            }
            Ok(0)
        }
        SearchOutcome::NotFound { members } => {
            match format {
                Format::Json => {
                    let doc = json!({"found": false, "members": members});
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Text => {
                    println!("none: no equal-weight basis exists (membership classes: {members})");
                }
            }
            Ok(3)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    design_path: &Path,
    rule_path: &Path,
    measure_arg: &str,
    alphas: &[String],
    gamma: Option<&str>,
    mc: Option<u64>,
    seed: u64,
    format: Format,
    tol: f64,
) -> CliResult<u8> {
    let design = load_design(design_path)?;
    let rule_doc: RuleDoc = serde_json::from_str(&read_file(rule_path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", rule_path.display())))?;
    let rule = CubatureRule::from_doc(rule_doc)?;
    if rule.design() != &design {
        return Err(CliError::input(format!(
            "rule in {} was built for a different design than {}",
            rule_path.display(),
            design_path.display()
        )));
    }
    let measure = load_measure(measure_arg, design.k())?;
    if let Some(n) = mc {
        if n == 0 {
            return Err(CliError::input("--mc must be at least 1"));
        }
        if !matches!(measure, Measure::Gaussian(_)) {
            return Err(CliError::input(
                "--mc needs a Gaussian measure; discrete integrals are already exact",
            ));
        }
    }
    let gamma = gamma
        .map(|g| parse_exponents(g, design.k()))
        .transpose()?;

    let mut rows = Vec::new();
    for alpha_str in alphas {
        let alpha = parse_exponents(alpha_str, design.k())?;
        let exact = verify_exactness(&rule, measure.provider(), &alpha, tol)?;
        let quad = quadrature_holomorphic(&rule, &alpha)?;
        let integral = measure.provider().moment(&alpha, design.m())?;
        let mixed = gamma
            .as_ref()
            .map(|g| mixed_exactness_check(&rule, &alpha, g, measure.provider(), tol))
            .transpose()?;
        let est = match (mc, &measure) {
            (Some(n), Measure::Gaussian(spec)) => {
                let mut sampler = gaussian_sampler(spec, seed)?;
                let pairs =
                    MixedExponent::new(alpha.exponents().iter().map(|&a| (a, 0)).collect());
                Some(mc_estimate_moment(&mut sampler, &pairs, n)?)
            }
            _ => None,
        };
        rows.push((alpha, exact, quad, integral, mixed, est));
    }

    match format {
        Format::Json => {
            let results: Vec<serde_json::Value> = rows
                .iter()
                .map(|(alpha, exact, quad, integral, mixed, est)| {
                    let mut row = json!({
                        "alpha": alpha.exponents(),
                        "exact": exact,
                        "quadrature": moment_json(quad),
                        "integral": moment_json(integral),
                    });
                    if let Some(check) = mixed {
                        row["mixed"] = serde_json::to_value(check).unwrap();
                    }
                    if let Some(est) = est {
                        row["mc"] = mc_json(est);
                    }
                    row
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({"results": results})).unwrap()
            );
        }
        Format::Text => {
            for (alpha, exact, quad, integral, mixed, est) in &rows {
                println!("alpha=({})  exact: {exact}", alpha_csv(alpha));
                println!("  rule value:  {}", moment_text(quad));
                println!("  integral:    {}", moment_text(integral));
                if let Some(check) = mixed {
                    println!(
                        "  mixed shift: moments match: {}, mixed exact: {}",
                        check.moments_match,
                        check
                            .mixed_exact
                            .map(|b| b.to_string())
                            .unwrap_or_else(|| "unavailable".into())
                    );
                }
                if let Some(est) = est {
                    println!(
                        "  mc estimate: {} +- ({:.3e}, {:.3e}) over n={}",
                        fmt_complex(est.mean),
                        est.se_re,
                        est.se_im,
                        est.n
                    );
                }
            }
        }
    }
    Ok(0)
}

fn alpha_csv(alpha: &Monomial) -> String {
    alpha
        .exponents()
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_null_moment(
    spec_path: &Path,
    pairs_arg: &str,
    mc: Option<u64>,
    seed: u64,
    format: Format,
) -> CliResult<u8> {
    let spec = load_gaussian(spec_path)?;
    let pairs = parse_pairs(pairs_arg)?;
    let nullity = gaussian_null_moment_predicate(&pairs, &spec)?;
    let est = match mc {
        Some(n) => {
            if n == 0 {
                return Err(CliError::input("--mc must be at least 1"));
            }
            let mut sampler = gaussian_sampler(&spec, seed)?;
            Some(mc_estimate_moment(&mut sampler, &pairs, n)?)
        }
        None => None,
    };
    match format {
        Format::Json => {
            let mut doc = json!({"nullity": serde_json::to_value(nullity).unwrap()});
            if let Some(est) = &est {
                doc["mc"] = mc_json(est);
            }
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Text => {
            println!(
                "nullity: {}",
                serde_json::to_value(nullity).unwrap().as_str().unwrap()
            );
            if let Some(est) = &est {
                println!(
                    "mc estimate: {} +- ({:.3e}, {:.3e}) over n={}",
                    fmt_complex(est.mean),
                    est.se_re,
                    est.se_im,
                    est.n
                );
            }
        }
    }
    Ok(0)
}
