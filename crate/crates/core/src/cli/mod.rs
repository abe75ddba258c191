//! Command-line front end.
//!
//! Exit codes: 0 when every comparison passes, 1 on a table mismatch,
//! 2 on usage or domain errors.

pub mod format;
pub mod tables;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::Float;
use serde_json::{json, Map, Value};

use crate::error::{domain, Result};
use crate::expansions::{self, IntegralKind, Params};
use crate::numeric::{rel_dev, Prec, Rational};
use crate::quadrature::{oracle_in, oracle_in_hat, oracle_jn, oracle_kn, QuadResult};
use crate::specfun::HyperParams;
use format::sci;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "ball-asymptotics",
    version,
    about = "Large-n expansions of Ball-type Bessel integrals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Coefficients of dx/dτ for one integral kind.
    Coeffs {
        #[command(flatten)]
        params: ParamArgs,
        /// Highest coefficient index.
        #[arg(long = "K", default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Truncated asymptotic expansion, optionally compared with quadrature.
    Expand {
        #[command(flatten)]
        params: ParamArgs,
        /// Values of n (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<String>,
        /// Truncation index; terms 0..=K are summed.
        #[arg(long = "K", default_value_t = 0)]
        k: usize,
        /// Also evaluate the integral by quadrature and report relative errors.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Direct evaluation of the integral by quadrature.
    Integrate {
        #[command(flatten)]
        params: ParamArgs,
        /// Values of n (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recompute a reference table and compare cell by cell.
    Table {
        /// Table number.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
        /// Relative tolerance for error-table cells.
        #[arg(long, default_value_t = 0.005)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "I")]
    I,
    #[value(name = "Ihat")]
    Ihat,
    #[value(name = "K")]
    K,
    #[value(name = "J")]
    J,
}

impl From<KindArg> for IntegralKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::I => IntegralKind::I,
            KindArg::Ihat => IntegralKind::IHat,
            KindArg::K => IntegralKind::K,
            KindArg::J => IntegralKind::J,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Order ν for the I, Ihat and K kinds (rational, e.g. 2/3).
    #[arg(long)]
    pub nu: Option<String>,
    /// Number of hyper-Bessel parameters; must match --sigma.
    #[arg(long)]
    pub m: Option<usize>,
    /// Hyper-Bessel parameters σ_1..σ_m (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Working precision in bits.
    #[arg(long, default_value_t = 256)]
    pub prec: Prec,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Significant digits for computed values.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Rendered command output.
#[derive(Clone, Debug)]
pub struct Report {
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub all_pass: bool,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|v| match v {
                            Value::String(t) => t.clone(),
                            other => other.to_string(),
                        })
                        .collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .map(|c| c.to_string())
                            .zip(row.iter().cloned())
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "config": self.config, "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass {
            EXIT_OK
        } else {
            EXIT_MISMATCH
        }
    }
}

fn params_of(p: &ParamArgs) -> Result<Params> {
    match p.kind {
        KindArg::J => {
            if p.sigma.is_empty() {
                return Err(domain("J-kind needs --sigma"));
            }
            if let Some(m) = p.m {
                if m != p.sigma.len() {
                    return Err(domain(format!("--m {m} does not match {} sigma values", p.sigma.len())));
                }
            }
            let sigma = p.sigma.iter().map(|s| s.parse()).collect::<Result<Vec<Rational>>>()?;
            Ok(Params::Hyper(HyperParams::new(sigma)?))
        }
        _ => {
            let nu =
                p.nu.as_deref()
                    .ok_or_else(|| domain(format!("{:?}-kind needs --nu", p.kind)))?;
            if p.m.is_some() || !p.sigma.is_empty() {
                return Err(domain("--m and --sigma apply to the J kind only"));
            }
            Ok(Params::Nu(nu.parse()?))
        }
    }
}

fn parse_n(s: &str, prec: Prec) -> Result<Float> {
    let v = Float::parse(s.trim()).map_err(|_| domain(format!("invalid n `{s}`")))?;
    let v = Float::with_val(prec, v);
    if !v.is_finite() || v <= 0 {
        return Err(domain(format!("n must be positive, got {s}")));
    }
    Ok(v)
}

fn config_echo(command: &str, params: Option<(&ParamArgs, &Params)>, out: &OutputArgs, extra: Value) -> Value {
    let mut cfg = Map::new();
    cfg.insert("command".into(), json!(command));
    if let Some((args, p)) = params {
        cfg.insert("kind".into(), json!(IntegralKind::from(args.kind).name()));
        match p {
            Params::Nu(nu) => {
                cfg.insert("nu".into(), json!(nu.to_string()));
            }
            Params::Hyper(hp) => {
                cfg.insert("m".into(), json!(hp.m()));
                cfg.insert(
                    "sigma".into(),
                    json!(hp.sigma().iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                );
            }
        }
    }
    cfg.insert("prec".into(), json!(out.prec));
    cfg.insert("digits".into(), json!(out.digits));
    if let Value::Object(m) = extra {
        cfg.extend(m);
    }
    Value::Object(cfg)
}

fn oracle(kind: IntegralKind, params: &Params, n: &Float, prec: Prec) -> Result<QuadResult> {
    match (kind, params) {
        (IntegralKind::I, Params::Nu(nu)) => oracle_in(*nu, n, prec),
        (IntegralKind::IHat, Params::Nu(nu)) => oracle_in_hat(*nu, n, prec),
        (IntegralKind::K, Params::Nu(nu)) => oracle_kn(*nu, n, prec),
        (IntegralKind::J, Params::Hyper(hp)) => oracle_jn(hp, n, prec),
        _ => Err(domain(format!("{kind}-kind does not take parameters {params}"))),
    }
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Coeffs { params, k, out } => {
            let p = params_of(params)?;
            let table = expansions::coeffs(params.kind.into(), &p, *k, out.prec)?;
            let rows = table
                .exponents
                .iter()
                .zip(&table.values)
                .enumerate()
                .map(|(i, (e, v))| vec![json!(i.to_string()), json!(e.to_string()), json!(sci(v, out.digits))])
                .collect();
            Ok(Report {
                config: config_echo("coeffs", Some((params, &p)), out, json!({ "K": k })),
                columns: vec!["k", "exponent", "coefficient"],
                rows,
                all_pass: true,
            })
        }
        Command::Expand {
            params,
            n,
            k,
            compare,
            out,
        } => {
            let p = params_of(params)?;
            let kind = IntegralKind::from(params.kind);
            let ns = n.iter().map(|s| parse_n(s, out.prec)).collect::<Result<Vec<_>>>()?;
            let per_n: Vec<Result<Vec<Vec<Value>>>> = ns
                .par_iter()
                .zip(n.par_iter())
                .map(|(nv, label)| {
                    let (exp, _) = expansions::expand(kind, &p, nv, *k, out.prec)?;
                    let sums = exp.partial_sums(nv);
                    let exact = if *compare {
                        Some(oracle(kind, &p, nv, out.prec)?)
                    } else {
                        None
                    };
                    let mut rows = Vec::new();
                    for (i, ((e, c), s)) in exp.terms.iter().zip(&sums).enumerate() {
                        let mut row = vec![
                            json!(label.trim()),
                            json!(i.to_string()),
                            json!(e.to_string()),
                            json!(sci(c, out.digits)),
                            json!(sci(s, out.digits)),
                        ];
                        if let Some(q) = &exact {
                            row.push(json!(sci(&q.value, out.digits)));
                            row.push(json!(sci(&rel_dev(s, &q.value), 4)));
                        }
                        rows.push(row);
                    }
                    Ok(rows)
                })
                .collect();
            let mut rows = Vec::new();
            for r in per_n {
                rows.extend(r?);
            }
            let mut columns = vec!["n", "k", "n_exponent", "coefficient", "partial_sum"];
            if *compare {
                columns.extend(["oracle", "rel_error"]);
            }
            Ok(Report {
                config: config_echo(
                    "expand",
                    Some((params, &p)),
                    out,
                    json!({ "n": n, "K": k, "compare": compare }),
                ),
                columns,
                rows,
                all_pass: true,
            })
        }
        Command::Integrate { params, n, out } => {
            let p = params_of(params)?;
            let kind = IntegralKind::from(params.kind);
            let ns = n.iter().map(|s| parse_n(s, out.prec)).collect::<Result<Vec<_>>>()?;
            let results: Vec<Result<QuadResult>> = ns.par_iter().map(|nv| oracle(kind, &p, nv, out.prec)).collect();
            let mut rows = Vec::new();
            for (label, r) in n.iter().zip(results) {
                let r = r?;
                rows.push(vec![
                    json!(label.trim()),
                    json!(sci(&r.value, out.digits)),
                    json!(sci(&r.err_estimate, 4)),
                    json!(r.nodes_used.to_string()),
                ]);
            }
            Ok(Report {
                config: config_echo("integrate", Some((params, &p)), out, json!({ "n": n })),
                columns: vec!["n", "value", "err_estimate", "nodes"],
                rows,
                all_pass: true,
            })
        }
        Command::Table { id, tolerance, out } => {
            let cells = tables::compute_table(*id, out.prec, *tolerance)?;
            let all_pass = cells.iter().all(|c| c.pass);
            let rows = cells
                .into_iter()
                .map(|c| {
                    vec![
                        json!(c.row_key),
                        json!(c.col_key),
                        json!(c.computed),
                        json!(c.paper),
                        json!(c.rel_dev),
                        json!(c.pass),
                    ]
                })
                .collect();
            Ok(Report {
                config: config_echo("table", None, out, json!({ "table": id, "tolerance": tolerance })),
                columns: vec!["row_key", "col_key", "computed", "paper", "rel_dev", "pass"],
                rows,
                all_pass,
            })
        }
    }
}

fn output_args(cli: &Cli) -> &OutputArgs {
    match &cli.command {
        Command::Coeffs { out, .. }
        | Command::Expand { out, .. }
        | Command::Integrate { out, .. }
        | Command::Table { out, .. } => out,
    }
}

/// Parses `args`, runs the command, writes the output, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = output_args(&cli).clone();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = report.render(out.format);
    let written = match &out.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    report.exit_code()
}
