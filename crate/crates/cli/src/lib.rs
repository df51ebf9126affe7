//! The `qcx` command line. [`run`] does all the work and returns the exit
//! code with captured output, so tests can drive it without a process.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Map, Value};

use qcx_core::construction::profile_volume;
use qcx_core::lp::{
    build_dual_lp, build_reduced_lp, certify, check_strong_duality, solve_simplex, LinearProgram, LpVariant,
    SimplexResult,
};
use qcx_core::verify::{
    check_k_increasing_extension, check_quasi_copula_axioms, check_symmetric_feasibility, FeasibilityReport,
};
use qcx_core::{
    alt_binom_tail, binom, build_profile, build_tables, extreme_table, extreme_volume, format_rational, parse_rational,
    verify_alpha_beta_gamma, BigInt, Error, ExtremeTable, Rational, Sign,
};

pub const BRUTE_FORCE_ENV: &str = "QCX_BRUTE_FORCE_DMAX";
pub const DEFAULT_BRUTE_FORCE_DMAX: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(name = "qcx", version, about = "Extreme box volumes of k-increasing quasi-copulas")]
struct Cli {
    /// Write the result to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Query {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// minus or plus
    #[arg(long)]
    sign: Sign,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    #[value(alias = "markdown")]
    Md,
    Latex,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Both tables, minimal then maximal volumes.
    Tables {
        #[arg(long, default_value_t = 15)]
        dmax: usize,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// One extreme volume with its witness and candidates.
    Extremes(Query),
    /// One table of extreme volumes, rows k and columns d.
    Table {
        #[arg(long, default_value_t = 15)]
        dmax: usize,
        #[arg(long)]
        sign: Sign,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// The extremal profile, optionally evaluated at points.
    Construct {
        #[command(flatten)]
        query: Query,
        /// Comma-separated coordinates, e.g. 1/2,1,2/3. Repeatable.
        #[arg(long, value_name = "POINT")]
        eval: Vec<String>,
    },
    /// Check the construction.
    Verify {
        #[command(flatten)]
        query: Query,
        /// Also enumerate every face of the extension on the grid.
        #[arg(long)]
        brute_force: bool,
    },
    /// Solve one linear program exactly.
    LpOracle {
        #[command(flatten)]
        query: Query,
        #[arg(long, default_value = "symmetric")]
        variant: LpVariant,
        /// Re-check the certificate and, for reduced and dual, strong duality.
        #[arg(long)]
        certify: bool,
    },
    /// Recursion and alternating-sum identity sweeps.
    Identities {
        #[arg(long, default_value_t = 20)]
        dmax: usize,
        #[arg(long, default_value_t = 20)]
        rmax: u64,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDimensions { .. }
            | Error::UnsupportedK1
            | Error::IndexOutOfRange { .. }
            | Error::CoordinateOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::LpTooLarge { .. }
            | Error::ParseRational(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

/// Text to emit and whether every check passed.
struct Report {
    text: String,
    passed: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, passed: true }
    }

    fn json(value: Value, passed: bool) -> Self {
        let mut text = serde_json::to_string_pretty(&value).expect("json values serialize");
        text.push('\n');
        Report { text, passed }
    }
}

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn rs(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(r).collect())
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let report = match dispatch(cli.command) {
        Ok(report) => report,
        Err(Failure::Usage(msg)) => {
            return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
        Err(Failure::Check(msg)) => {
            return Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
    };
    let code = if report.passed { 0 } else { 1 };
    match cli.out {
        None => Outcome { code, stdout: report.text, stderr: String::new() },
        Some(path) => match std::fs::write(&path, &report.text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) },
        },
    }
}

fn dispatch(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Tables { dmax, format } => tables(dmax, format),
        Command::Extremes(q) => extremes(&q),
        Command::Table { dmax, sign, format } => Ok(Report::ok(render_table(&extreme_table(dmax, sign)?, format))),
        Command::Construct { query, eval } => construct(&query, &eval),
        Command::Verify { query, brute_force } => verify(&query, brute_force),
        Command::LpOracle { query, variant, certify } => lp_oracle(&query, variant, certify),
        Command::Identities { dmax, rmax } => identities(dmax, rmax),
    }
}

fn tables(dmax: usize, format: Format) -> Result<Report, Failure> {
    let minus = extreme_table(dmax, Sign::Minus)?;
    let plus = extreme_table(dmax, Sign::Plus)?;
    if let Format::Json = format {
        return Ok(Report::json(json!({ "minus": table_json(&minus), "plus": table_json(&plus) }), true));
    }
    let text = [&minus, &plus].map(|t| render_table(t, format)).join("\n");
    Ok(Report::ok(text))
}

fn caption(sign: Sign) -> &'static str {
    match sign {
        Sign::Minus => "Minimal box volumes",
        Sign::Plus => "Maximal box volumes",
    }
}

fn latex_cell(x: &Rational) -> String {
    if x.is_integer() {
        return x.to_string();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}\\tfrac{{{}}}{{{}}}", x.numer().abs(), x.denom())
}

fn table_json(t: &ExtremeTable) -> Value {
    let rows: Vec<Value> = t
        .rows()
        .map(|(k, cells)| {
            let mut row = Map::new();
            for (c, cell) in cells.iter().enumerate() {
                if let Some(v) = cell {
                    row.insert((c + 2).to_string(), r(v));
                }
            }
            json!({ "k": k, "values": row })
        })
        .collect();
    json!({ "sign": t.sign.as_str(), "dmax": t.d_max, "rows": rows })
}

fn render_table(t: &ExtremeTable, format: Format) -> String {
    let ds: Vec<String> = (2..=t.d_max).map(|d| d.to_string()).collect();
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(&table_json(t)).expect("json values serialize");
            out.push('\n');
        }
        Format::Csv => {
            out.push_str(&format!("k,{}\n", ds.join(",")));
            for (k, cells) in t.rows() {
                let row: Vec<String> =
                    cells.iter().map(|c| c.as_ref().map(format_rational).unwrap_or_default()).collect();
                out.push_str(&format!("{k},{}\n", row.join(",")));
            }
        }
        Format::Md => {
            out.push_str(&format!("{} ({})\n\n", caption(t.sign), t.sign));
            out.push_str(&format!("| k \\ d | {} |\n", ds.join(" | ")));
            out.push_str(&format!("|---|{}\n", "---|".repeat(ds.len())));
            for (k, cells) in t.rows() {
                let row: Vec<String> =
                    cells.iter().map(|c| c.as_ref().map(format_rational).unwrap_or_default()).collect();
                out.push_str(&format!("| {k} | {} |\n", row.join(" | ")));
            }
        }
        Format::Latex => {
            out.push_str("\\begin{table}\n\\centering\n");
            out.push_str(&format!("\\begin{{tabular}}{{c|{}}}\n", "c".repeat(ds.len())));
            out.push_str(&format!("$k \\backslash d$ & {} \\\\\n\\hline\n", ds.join(" & ")));
            for (k, cells) in t.rows() {
                let row: Vec<String> = cells
                    .iter()
                    .map(|c| c.as_ref().map(|v| format!("${}$", latex_cell(v))).unwrap_or_default())
                    .collect();
                out.push_str(&format!("{k} & {} \\\\\n", row.join(" & ")));
            }
            out.push_str("\\end{tabular}\n");
            out.push_str(&format!("\\caption{{{}}}\n\\end{{table}}\n", caption(t.sign)));
        }
    }
    out
}

fn extremes(q: &Query) -> Result<Report, Failure> {
    let e = extreme_volume(q.d, q.k, q.sign)?;
    let candidates: Vec<Value> = e.candidates.iter().map(|(i, v)| json!({ "i": i, "value": r(v) })).collect();
    Ok(Report::json(
        json!({
            "d": e.d,
            "k": e.k,
            "sign": e.sign.as_str(),
            "value": r(&e.value),
            "i0": e.witness_index,
            "candidates": candidates,
        }),
        true,
    ))
}

fn parse_point(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',').map(|c| parse_rational(c).map_err(Failure::from)).collect()
}

fn construct(q: &Query, eval: &[String]) -> Result<Report, Failure> {
    let p = build_profile(q.d, q.k, q.sign)?;
    let evaluations = eval
        .iter()
        .map(|text| {
            let x = parse_point(text)?;
            let v = p.evaluate(&x)?;
            Ok(json!({ "x": rs(&x), "value": r(&v) }))
        })
        .collect::<Result<Vec<Value>, Failure>>()?;
    Ok(Report::json(
        json!({
            "d": p.d,
            "k": p.k,
            "sign": p.sign.as_str(),
            "a": r(&p.a),
            "b": "1",
            "i0": p.i0,
            "q": rs(&p.q),
            "volume": r(&profile_volume(&p)),
            "evaluations": evaluations,
        }),
        true,
    ))
}

fn check_json(name: &str, report: &FeasibilityReport) -> Value {
    json!({
        "name": name,
        "passed": report.passed(),
        "violations": report.violations.len(),
        "first_violation": report.violations.first().map(|v| v.to_string()),
    })
}

fn brute_force_cap() -> Result<usize, Failure> {
    match std::env::var(BRUTE_FORCE_ENV) {
        Err(_) => Ok(DEFAULT_BRUTE_FORCE_DMAX),
        Ok(v) => {
            v.parse().map_err(|_| Failure::Usage(format!("{BRUTE_FORCE_ENV} must be a positive integer, got {v:?}")))
        }
    }
}

fn verify(q: &Query, brute_force: bool) -> Result<Report, Failure> {
    let w = extreme_volume(q.d, q.k, q.sign)?.value;
    let head = json!({ "d": q.d, "k": q.k, "sign": q.sign.as_str(), "value": r(&w) });
    if q.sign == Sign::Minus && !w.is_negative() {
        let mut out = head;
        out["passed"] = json!(true);
        out["checks"] = json!([]);
        out["note"] = json!("no negative volume is attainable, so there is nothing to construct");
        return Ok(Report::json(out, true));
    }
    if brute_force {
        let cap = brute_force_cap()?;
        if q.d > cap {
            return Err(Failure::Usage(format!(
                "brute force is limited to d <= {cap}; raise it with {BRUTE_FORCE_ENV}"
            )));
        }
    }
    let p = build_profile(q.d, q.k, q.sign)?;
    let symmetric = check_symmetric_feasibility(&p);
    let volume = profile_volume(&p);
    let mut checks = vec![check_json("symmetric_feasibility", &symmetric)];
    checks.push(json!({ "name": "volume", "passed": volume == w, "value": r(&volume) }));
    let mut passed = symmetric.passed() && volume == w;
    if brute_force {
        let field = p.density_field();
        let axioms = check_quasi_copula_axioms(&field);
        let increasing = check_k_increasing_extension(&field, q.k);
        passed &= axioms.passed() && increasing.passed();
        checks.push(check_json("quasi_copula_axioms", &axioms));
        checks.push(check_json(&format!("{}_increasing", q.k), &increasing));
    }
    let mut out = head;
    out["passed"] = json!(passed);
    out["checks"] = Value::Array(checks);
    Ok(Report::json(out, passed))
}

fn named(names: &[String], values: &[Rational]) -> Value {
    Value::Object(names.iter().zip(values).map(|(n, v)| (n.clone(), r(v))).collect())
}

fn solve_json(lp: &LinearProgram, s: &SimplexResult) -> Value {
    let rows: Vec<String> = lp.constraints.iter().map(|c| c.name.clone()).collect();
    json!({
        "status": s.status.as_str(),
        "optimum": s.optimum.as_ref().map(r),
        "pivot_count": s.pivot_count,
        "primal": named(&lp.variable_names, &s.primal_solution),
        "dual": named(&rows, &s.dual_solution),
    })
}

fn lp_oracle(q: &Query, variant: LpVariant, recheck: bool) -> Result<Report, Failure> {
    let w = extreme_volume(q.d, q.k, q.sign)?.value;
    let lp = variant.build(q.d, q.k, q.sign)?;
    let s = solve_simplex(&lp)?;
    let agrees = s.optimum.as_ref() == Some(&w);
    let mut out = json!({ "variant": variant.as_str(), "d": q.d, "k": q.k, "sign": q.sign.as_str() });
    for (key, value) in solve_json(&lp, &s).as_object().expect("object").clone() {
        out[key] = value;
    }
    out["closed_form"] = r(&w);
    out["agrees"] = json!(agrees);
    let mut passed = agrees;
    if recheck {
        let certificate = certify(&lp, &s.primal_solution, &s.dual_solution);
        passed &= certificate.is_ok();
        out["certificate"] = json!(match &certificate {
            Ok(()) => "verified".to_string(),
            Err(e) => e.to_string(),
        });
        if matches!(variant, LpVariant::Reduced | LpVariant::Dual) {
            let primal = solve_simplex(&build_reduced_lp(q.d, q.k, q.sign)?)?;
            let dual = solve_simplex(&build_dual_lp(q.d, q.k, q.sign)?)?;
            let strong = check_strong_duality(&primal, &dual);
            passed &= strong;
            out["strong_duality"] = json!(strong);
        }
    }
    Ok(Report::json(out, passed))
}

fn identities(dmax: usize, rmax: u64) -> Result<Report, Failure> {
    let mut tables = 0usize;
    let mut abg_failures = Vec::new();
    let mut top_failures = Vec::new();
    for d in 2..=dmax {
        for k in 2..=d {
            let t = build_tables(d, k)?;
            tables += 1;
            if !verify_alpha_beta_gamma(&t) {
                abg_failures.push(json!({ "d": d, "k": k }));
            }
            if (2..=k).any(|j| t.gamma(j, d) != 1) {
                top_failures.push(json!({ "d": d, "k": k }));
            }
        }
    }
    let mut tails = 0usize;
    let mut tail_failures = Vec::new();
    for rr in 0..=rmax {
        for n in 0..=rr as i64 {
            let direct = (n..=rr as i64).fold(BigInt::default(), |acc, j| {
                if j % 2 == 0 {
                    acc + binom(rr, j)
                } else {
                    acc - binom(rr, j)
                }
            });
            tails += 1;
            if alt_binom_tail(rr, n)? != direct {
                tail_failures.push(json!({ "r": rr, "n": n }));
            }
        }
    }
    let passed = abg_failures.is_empty() && top_failures.is_empty() && tail_failures.is_empty();
    Ok(Report::json(
        json!({
            "passed": passed,
            "alpha_plus_beta_equals_gamma": { "cases": tables, "failures": abg_failures },
            "gamma_at_top_is_one": { "cases": tables, "failures": top_failures },
            "alternating_binomial_tail": { "cases": tails, "failures": tail_failures },
        }),
        passed,
    ))
}
