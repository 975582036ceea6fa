//! Command implementations for the `binquad` binary.
//!
//! Every command renders its full output into a [`Report`] so the binary only
//! has to choose where to write it; tests call the same functions directly.

use std::fmt::Write as _;
use std::path::PathBuf;

use binquad::format::{fixed14, json_number, json_string, rule_json, sig17};
use binquad::{
    build_rule, reference_integral, run_composite_with, Alpha, ConvergenceHistory, ErrorKind, Expr,
    Family, MomentCache, Polynomial, QuadratureRule, StopConfig, MAX_COMPOSITE_LEVEL,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Highest moment order the `moments` and `table` commands print.
pub const MAX_PRINT_ORDER: u32 = 60;
/// Lowest level used for reference values of non-polynomial integrands.
pub const MIN_REFERENCE_LEVEL: u32 = 22;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] binquad::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 usage, 3 domain, 4 parse, 5 evaluation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Usage => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Parse => 4,
                ErrorKind::Evaluation => 5,
                ErrorKind::Numerical => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Rendered command output plus diagnostics destined for stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub body: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Pretty,
}

const MAIN_HELP: &str = "\
Examples:
  binquad moments --alpha 0.05 --max-order 5
  binquad table --alpha 0.3 --rules NC0,NC1,NC2,NC3,G0,G1,W1 --format pretty
  binquad integrate --alpha 0.3 --rule GL2 --builtin f1 --tol 1e-8
  binquad converge --alpha 0.3 --rules NC2,NC3,GL2,G1 --builtin f2 --max-level 12
  binquad sweep-alpha --rule NC2 --builtin f1 --from 0.01 --to 0.5 --steps 50
  binquad rule GL2 --alpha 0.3 --format json

Exit status: 0 success, 2 usage, 3 rule domain, 4 expression syntax,
5 integrand evaluation, 1 other failures.";

#[derive(Debug, Parser)]
#[command(
    name = "binquad",
    version,
    about = "Quadrature for binomial measures on [0, 1]"
)]
#[command(after_help = MAIN_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write to this file instead of standard output (`-` means stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Integrand as an expression in `x`, e.g. "exp(-x)*sin(3*x)".
    #[arg(long)]
    pub expr: Option<String>,
    /// Built-in test integrand: f1 = (5x^4+6x^3-x)/10, f2 = x^20.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact moments m_s of the measure.
    #[command(after_help = "Example:\n  binquad moments --alpha 0.5 --max-order 3")]
    Moments {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        max_order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rules applied to x^s next to the exact moments.
    #[command(after_help = "Example:\n  binquad table --alpha 0.45 --rules G1 --max-order 5")]
    Table {
        #[arg(long)]
        alpha: f64,
        /// Comma-separated rule names (G0, G1, W1, NC0..NC4, GL2, H4).
        #[arg(long, value_delimiter = ',', default_value = "NC0,NC1,NC2,NC3,G0,G1")]
        rules: Vec<String>,
        #[arg(long, default_value_t = 5)]
        max_order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Composite integration with the derivative-estimate stopping rule.
    #[command(
        after_help = "Examples:\n  binquad integrate --alpha 0.3 --rule GL2 --builtin f1 --tol 1e-8\n  binquad integrate --alpha 0.3 --rule W1 --expr \"exp(x)\""
    )]
    Integrate {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        rule: String,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 20)]
        k_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Composite errors per level against an exact or reference value.
    #[command(
        after_help = "Example:\n  binquad converge --alpha 0.3 --rules NC2,NC3,GL2,G1 --builtin f2 --max-level 12\n\nPolynomial integrands are compared with exact moments; anything else with\nthe reference integral at level max(22, max-level + 4), capped at 24."
    )]
    Converge {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 1)]
        min_level: u32,
        #[arg(long, default_value_t = 12)]
        max_level: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Single-application error of one rule as alpha varies.
    #[command(
        after_help = "Example:\n  binquad sweep-alpha --rule NC2 --builtin f1 --from 0.01 --to 0.5 --steps 50"
    )]
    SweepAlpha {
        #[arg(long)]
        rule: String,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 50)]
        steps: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Nodes, weights and degree of a rule.
    #[command(after_help = "Example:\n  binquad rule GL2 --alpha 0.3 --format json")]
    Rule {
        name: String,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Moments { output, .. }
            | Command::Table { output, .. }
            | Command::Integrate { output, .. }
            | Command::Converge { output, .. }
            | Command::SweepAlpha { output, .. }
            | Command::Rule { output, .. } => output,
        }
    }
}

/// An integrand given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Expr(String),
    Builtin(String),
}

impl From<&SourceArgs> for Source {
    fn from(args: &SourceArgs) -> Self {
        match (&args.expr, &args.builtin) {
            (Some(e), _) => Source::Expr(e.clone()),
            (None, Some(b)) => Source::Builtin(b.clone()),
            (None, None) => Source::Expr(String::new()),
        }
    }
}

struct Resolved {
    expr: Expr,
    poly: Option<Polynomial>,
}

impl Source {
    fn resolve(&self) -> CliResult<Resolved> {
        let expr = match self {
            Source::Expr(text) => binquad::parse(text).map_err(binquad::Error::from)?,
            Source::Builtin(name) => binquad::builtin(name)?,
        };
        let poly = expr.as_polynomial();
        Ok(Resolved { expr, poly })
    }
}

/// True value used for error columns, and where it came from.
struct Exact {
    value: f64,
    source: String,
}

fn exact_value(
    alpha: Alpha,
    f: &Resolved,
    cache: &MomentCache,
    requested: u32,
) -> CliResult<Exact> {
    if let Some(p) = &f.poly {
        return Ok(Exact {
            value: p.integrate(cache)?,
            source: "moments".into(),
        });
    }
    let level = requested
        .saturating_add(4)
        .clamp(MIN_REFERENCE_LEVEL, MAX_COMPOSITE_LEVEL);
    Ok(Exact {
        value: reference_integral(alpha, &f.expr, level)?,
        source: format!("reference_integral level {level}"),
    })
}

pub fn run(command: &Command) -> CliResult<Report> {
    match command {
        Command::Moments {
            alpha,
            max_order,
            output,
        } => cmd_moments(*alpha, *max_order, output.format),
        Command::Table {
            alpha,
            rules,
            max_order,
            output,
        } => cmd_table(*alpha, &parse_families(rules)?, *max_order, output.format),
        Command::Integrate {
            alpha,
            rule,
            source,
            tol,
            k_min,
            k_max,
            output,
        } => {
            let cfg = StopConfig::new(*tol, *k_min, *k_max)?;
            cmd_integrate(
                *alpha,
                parse_family(rule)?,
                &source.into(),
                cfg,
                output.format,
            )
        }
        Command::Converge {
            alpha,
            rules,
            source,
            min_level,
            max_level,
            output,
        } => cmd_converge(
            *alpha,
            &parse_families(rules)?,
            &source.into(),
            *min_level,
            *max_level,
            output.format,
        ),
        Command::SweepAlpha {
            rule,
            source,
            from,
            to,
            steps,
            output,
        } => cmd_sweep_alpha(
            parse_family(rule)?,
            &source.into(),
            *from,
            *to,
            *steps,
            output.format,
        ),
        Command::Rule {
            name,
            alpha,
            output,
        } => cmd_rule(parse_family(name)?, *alpha, output.format),
    }
}

pub fn parse_family(name: &str) -> CliResult<Family> {
    let family: Family = name.parse()?;
    if family == Family::Custom {
        return Err(CliError::Usage(
            "`custom` rules cannot be built from a name".into(),
        ));
    }
    Ok(family)
}

pub fn parse_families(names: &[String]) -> CliResult<Vec<Family>> {
    if names.is_empty() {
        return Err(CliError::Usage("at least one rule is required".into()));
    }
    names.iter().map(|n| parse_family(n)).collect()
}

fn build(family: Family, alpha: Alpha, notes: &mut Vec<String>) -> CliResult<QuadratureRule> {
    let rule = build_rule(family, alpha)?;
    if rule.has_duplicate_nodes(1e-12) {
        let note = format!(
            "warning: {family} at alpha = {alpha} has coincident nodes; merging them gives {} distinct nodes",
            rule.merge_duplicate_nodes(1e-12).len()
        );
        if !notes.contains(&note) {
            notes.push(note);
        }
    }
    Ok(rule)
}

fn check_order(max_order: u32) -> CliResult<()> {
    if max_order > MAX_PRINT_ORDER {
        return Err(CliError::Usage(format!(
            "--max-order {max_order} exceeds the maximum {MAX_PRINT_ORDER}"
        )));
    }
    Ok(())
}

fn json_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| json_number(*v)).collect();
    format!("[{}]", items.join(","))
}

fn scientific(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6e}")
    } else {
        sig17(x)
    }
}

/// Left-aligned first column, right-aligned others.
fn pretty_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let mut parts = Vec::with_capacity(cols);
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            parts.push(if i == 0 {
                format!("{cell:<w$}")
            } else {
                format!("{cell:>w$}")
            });
        }
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header);
    for row in rows {
        line(row);
    }
    out
}

pub fn cmd_moments(alpha: f64, max_order: u32, format: OutputFormat) -> CliResult<Report> {
    let alpha = Alpha::new(alpha)?;
    check_order(max_order)?;
    let moments = MomentCache::new(alpha).moments_up_to(max_order)?;
    let body = match format {
        OutputFormat::Csv => {
            let mut out = String::from("s,m_s\n");
            for (s, m) in moments.iter().enumerate() {
                let _ = writeln!(out, "{s},{}", sig17(*m));
            }
            out
        }
        OutputFormat::Json => format!(
            "{{\"alpha\":{},\"moments\":{}}}\n",
            json_number(alpha.value()),
            json_array(&moments)
        ),
        OutputFormat::Pretty => {
            let rows: Vec<Vec<String>> = moments
                .iter()
                .enumerate()
                .map(|(s, m)| vec![s.to_string(), fixed14(*m)])
                .collect();
            pretty_table(&["s".into(), "m_s".into()], &rows)
        }
    };
    Ok(Report {
        body,
        notes: Vec::new(),
    })
}

pub fn cmd_table(
    alpha: f64,
    families: &[Family],
    max_order: u32,
    format: OutputFormat,
) -> CliResult<Report> {
    let alpha = Alpha::new(alpha)?;
    check_order(max_order)?;
    let mut notes = Vec::new();
    let cache = MomentCache::new(alpha);
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    let exact = cache.moments_up_to(max_order)?;
    rows.push(("exact".into(), exact[1..].to_vec()));
    for &family in families {
        let rule = build(family, alpha, &mut notes)?;
        rows.push((
            family.name().into(),
            (1..=max_order).map(|s| rule.monomial(s)).collect(),
        ));
    }
    let body = match format {
        OutputFormat::Csv => {
            let mut out = String::from("rule");
            for s in 1..=max_order {
                let _ = write!(out, ",{s}");
            }
            out.push('\n');
            for (name, values) in &rows {
                out.push_str(name);
                for v in values {
                    let _ = write!(out, ",{}", sig17(*v));
                }
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|(name, values)| {
                    format!(
                        "{{\"rule\":{},\"values\":{}}}",
                        json_string(name),
                        json_array(values)
                    )
                })
                .collect();
            format!(
                "{{\"alpha\":{},\"max_order\":{max_order},\"rows\":[{}]}}\n",
                json_number(alpha.value()),
                items.join(",")
            )
        }
        OutputFormat::Pretty => {
            let mut header = vec!["rule".to_string()];
            header.extend((1..=max_order).map(|s| format!("x^{s}")));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(name, values)| {
                    let mut row = vec![name.clone()];
                    row.extend(values.iter().map(|v| fixed14(*v)));
                    row
                })
                .collect();
            pretty_table(&header, &body)
        }
    };
    Ok(Report { body, notes })
}

pub fn cmd_integrate(
    alpha: f64,
    family: Family,
    source: &Source,
    cfg: StopConfig,
    format: OutputFormat,
) -> CliResult<Report> {
    let alpha = Alpha::new(alpha)?;
    let mut notes = Vec::new();
    let rule = build(family, alpha, &mut notes)?;
    let f = source.resolve()?;
    let cache = MomentCache::new(alpha);
    let out = run_composite_with(&rule, &cache, &f.expr, cfg)?;
    if out.estimator_bypassed {
        notes.push(format!(
            "note: the Peano constant of {family} vanishes at degree {}; stopping on successive-level differences",
            out.degree
        ));
    }
    if out.nonfinite_estimate {
        notes.push("warning: derivative estimate was not finite; refined to k_max".into());
    }
    let stopped = out.stopped_by.as_str();
    let body = match format {
        OutputFormat::Csv => format!(
            "rule,alpha,result,final_level,est_error,stopped_by\n{},{},{},{},{},{stopped}\n",
            family.name(),
            sig17(alpha.value()),
            sig17(out.value),
            out.final_level,
            sig17(out.est_error)
        ),
        OutputFormat::Json => format!(
            "{{\"rule\":{},\"alpha\":{},\"result\":{},\"final_level\":{},\"est_error\":{},\"stopped_by\":{},\"degree\":{},\"peano_constant\":{},\"estimator_bypassed\":{},\"nonfinite_estimate\":{},\"levels\":{},\"values\":{}}}\n",
            json_string(family.name()),
            json_number(alpha.value()),
            json_number(out.value),
            out.final_level,
            json_number(out.est_error),
            json_string(stopped),
            out.degree,
            json_number(out.peano_constant),
            out.estimator_bypassed,
            out.nonfinite_estimate,
            format!("{:?}", out.history.levels).replace(' ', ""),
            json_array(&out.history.values)
        ),
        OutputFormat::Pretty => {
            let rows = vec![
                vec!["rule".into(), family.name().into()],
                vec!["alpha".into(), sig17(alpha.value())],
                vec!["result".into(), fixed14(out.value)],
                vec!["final_level".into(), out.final_level.to_string()],
                vec!["est_error".into(), scientific(out.est_error)],
                vec!["stopped_by".into(), stopped.into()],
            ];
            pretty_table(&["field".into(), "value".into()], &rows)
        }
    };
    Ok(Report { body, notes })
}

pub fn cmd_converge(
    alpha: f64,
    families: &[Family],
    source: &Source,
    min_level: u32,
    max_level: u32,
    format: OutputFormat,
) -> CliResult<Report> {
    let alpha = Alpha::new(alpha)?;
    if max_level > MAX_COMPOSITE_LEVEL {
        return Err(CliError::Usage(format!(
            "--max-level {max_level} exceeds the maximum {MAX_COMPOSITE_LEVEL}"
        )));
    }
    if min_level > max_level {
        return Err(CliError::Usage(format!(
            "--min-level {min_level} exceeds --max-level {max_level}"
        )));
    }
    let mut notes = Vec::new();
    let f = source.resolve()?;
    let cache = MomentCache::new(alpha);
    let exact = exact_value(alpha, &f, &cache, max_level)?;
    let mut histories = Vec::with_capacity(families.len());
    for &family in families {
        let rule = build(family, alpha, &mut notes)?;
        let history =
            ConvergenceHistory::sweep(&rule, &f.expr, min_level..=max_level, Some(exact.value))?;
        histories.push((family, history));
    }
    let levels: Vec<u32> = (min_level..=max_level).collect();
    let errors = |h: &ConvergenceHistory| h.errors.clone().unwrap_or_default();

    let body = match format {
        OutputFormat::Csv => {
            notes.push(format!(
                "# exact = {} ({})",
                sig17(exact.value),
                exact.source
            ));
            for (family, h) in &histories {
                let order = h.fitted_order.map_or_else(|| "n/a".to_string(), sig17);
                notes.push(format!("# fitted order {}: {order}", family.name()));
            }
            let mut out = String::from("level");
            for (family, _) in &histories {
                let _ = write!(out, ",{}", family.name());
            }
            out.push('\n');
            for (i, k) in levels.iter().enumerate() {
                let _ = write!(out, "{k}");
                for (_, h) in &histories {
                    let _ = write!(out, ",{}", sig17(errors(h)[i]));
                }
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = histories
                .iter()
                .map(|(family, h)| {
                    format!(
                        "{{\"rule\":{},\"values\":{},\"errors\":{},\"fitted_order\":{}}}",
                        json_string(family.name()),
                        json_array(&h.values),
                        json_array(&errors(h)),
                        h.fitted_order
                            .map_or_else(|| "null".to_string(), json_number)
                    )
                })
                .collect();
            format!(
                "{{\"alpha\":{},\"exact\":{},\"exact_source\":{},\"levels\":{},\"rules\":[{}]}}\n",
                json_number(alpha.value()),
                json_number(exact.value),
                json_string(&exact.source),
                format!("{levels:?}").replace(' ', ""),
                items.join(",")
            )
        }
        OutputFormat::Pretty => {
            let mut header = vec!["level".to_string()];
            header.extend(histories.iter().map(|(f, _)| f.name().to_string()));
            let mut rows: Vec<Vec<String>> = levels
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    let mut row = vec![k.to_string()];
                    row.extend(histories.iter().map(|(_, h)| scientific(errors(h)[i])));
                    row
                })
                .collect();
            let mut order_row = vec!["order".to_string()];
            order_row.extend(histories.iter().map(|(_, h)| {
                h.fitted_order
                    .map_or_else(|| "n/a".into(), |o| format!("{o:.3}"))
            }));
            rows.push(order_row);
            let mut out = pretty_table(&header, &rows);
            let _ = writeln!(out, "exact = {} ({})", fixed14(exact.value), exact.source);
            out
        }
    };
    Ok(Report { body, notes })
}

pub fn cmd_sweep_alpha(
    family: Family,
    source: &Source,
    from: f64,
    to: f64,
    steps: u32,
    format: OutputFormat,
) -> CliResult<Report> {
    if !(0.0 < from && from < to && to < 1.0) {
        return Err(CliError::Usage(format!(
            "need 0 < from < to < 1, got from = {from}, to = {to}"
        )));
    }
    if steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let f = source.resolve()?;
    let mut notes = Vec::new();
    let mut alphas = Vec::with_capacity(steps as usize);
    let mut errs = Vec::with_capacity(steps as usize);
    let mut sources = Vec::new();
    for i in 0..steps {
        let a = if i + 1 == steps {
            to
        } else {
            from + (to - from) * f64::from(i) / f64::from(steps - 1)
        };
        let alpha = Alpha::new(a)?;
        let rule = build(family, alpha, &mut notes)?;
        let cache = MomentCache::new(alpha);
        let exact = exact_value(alpha, &f, &cache, 0)?;
        if !sources.contains(&exact.source) {
            sources.push(exact.source);
        }
        alphas.push(a);
        errs.push(exact.value - rule.apply(&f.expr)?);
    }
    let source_text = sources.join(", ");
    let body = match format {
        OutputFormat::Csv => {
            notes.push(format!("# exact values from {source_text}"));
            let mut out = format!("alpha,{}\n", family.name());
            for (a, e) in alphas.iter().zip(&errs) {
                let _ = writeln!(out, "{},{}", sig17(*a), sig17(*e));
            }
            out
        }
        OutputFormat::Json => format!(
            "{{\"rule\":{},\"exact_source\":{},\"alpha\":{},\"error\":{}}}\n",
            json_string(family.name()),
            json_string(&source_text),
            json_array(&alphas),
            json_array(&errs)
        ),
        OutputFormat::Pretty => {
            let rows: Vec<Vec<String>> = alphas
                .iter()
                .zip(&errs)
                .map(|(a, e)| vec![fixed14(*a), scientific(*e)])
                .collect();
            pretty_table(&["alpha".into(), format!("error {}", family.name())], &rows)
        }
    };
    Ok(Report { body, notes })
}

pub fn cmd_rule(family: Family, alpha: f64, format: OutputFormat) -> CliResult<Report> {
    let alpha = Alpha::new(alpha)?;
    let mut notes = Vec::new();
    let rule = build(family, alpha, &mut notes)?;
    let body = match format {
        OutputFormat::Json => format!("{}\n", rule_json(&rule)),
        OutputFormat::Csv => {
            let mut out = String::from("family,alpha,degree,node,weight\n");
            for (z, w) in rule.nodes().iter().zip(rule.weights()) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    family.name(),
                    sig17(alpha.value()),
                    rule.degree(),
                    sig17(*z),
                    sig17(*w)
                );
            }
            out
        }
        OutputFormat::Pretty => {
            let rows: Vec<Vec<String>> = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .enumerate()
                .map(|(q, (z, w))| vec![q.to_string(), fixed14(*z), fixed14(*w)])
                .collect();
            let mut out = format!(
                "{} at alpha = {}, degree {}\n",
                family.name(),
                alpha,
                rule.degree()
            );
            out.push_str(&pretty_table(
                &["q".into(), "node".into(), "weight".into()],
                &rows,
            ));
            out
        }
    };
    Ok(Report { body, notes })
}
