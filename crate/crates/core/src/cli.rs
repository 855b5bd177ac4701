//! The `strengthlab` command line. `run` is a pure function of its arguments
//! (and input files), so it is tested in-process.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expsum::{analytic_rank, bias, gowers_norm, GowersPath, McOptions, Mode};
use crate::family::{equidistribution_check, family_min_arank, search_shifts, PolyFamily};
use crate::generators::{gen_f, gen_f_block, gen_g, Generated};
use crate::gf::{field_create, Field};
use crate::kernel::{ExecConfig, DEFAULT_BUDGET};
use crate::parse::{parse, parse_lines};
use crate::poly::Polynomial;
use crate::suite::{run_suite, SuiteReport, SUITES};
use crate::variety::{codim_singular, count_table};

#[derive(Parser, Debug)]
#[command(name = "strengthlab", version, about = "Rank, bias and singular-locus experiments over finite fields")]
pub struct Cli {
    #[command(flatten)]
    pub opts: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Field as `P` or `P,S` for F_{P^S}.
    #[arg(long, global = true, default_value = "2")]
    pub field: String,
    #[arg(long, global = true, env = "STRENGTHLAB_THREADS")]
    pub threads: Option<usize>,
    /// Maximum number of points an exact enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, global = true, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, global = true)]
    pub poly: Option<String>,
    #[arg(long, global = true)]
    pub poly_file: Option<PathBuf>,
    #[arg(long, global = true, visible_alias = "file")]
    pub family_file: Option<PathBuf>,
    /// Number of variables (default: the largest index used).
    #[arg(long, global = true)]
    pub vars: Option<usize>,
    #[arg(long, global = true, default_value_t = 2)]
    pub smax: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathArg {
    Definition,
    Tensor,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bias of one polynomial, with its analytic rank and optionally a Gowers norm.
    Bias {
        #[arg(long)]
        gowers: Option<usize>,
        #[arg(long, value_enum, default_value = "definition")]
        path: PathArg,
    },
    #[command(subcommand)]
    Family(FamilyCommand),
    #[command(subcommand)]
    Variety(VarietyCommand),
    /// Generator polynomials; prints polynomial text.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u32>,
        /// Where to write the variable-naming JSON.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Runs an acceptance suite (or `all`).
    Suite { name: String },
}

#[derive(Subcommand, Debug)]
pub enum FamilyCommand {
    /// Minimum analytic rank over the span.
    Rank,
    /// Fiber sizes of the joint evaluation map.
    Fibers,
    /// Random search for shifts maximizing the shift family's rank.
    SearchShifts {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum VarietyCommand {
    /// Point counts of X and its singular locus over F_{p^s}, s ≤ smax.
    Count,
    /// Dimension estimates and the codimension of the singular locus.
    Codim,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    #[value(name = "F")]
    F,
    #[value(name = "F-block")]
    FBlock,
    #[value(name = "G")]
    G,
}

/// What a command printed and how it exited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() },
    }
}

impl RunConfig {
    pub fn field(&self) -> Result<Field> {
        let bad = || Error::BadParameters(format!("--field expects P or P,S, got {:?}", self.field));
        let mut parts = self.field.split(',').map(str::trim);
        let p: u64 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let s: u32 = match parts.next() {
            Some(x) => x.parse().map_err(|_| bad())?,
            None => 1,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        field_create(p, s)
    }

    pub fn exec(&self) -> Result<ExecConfig> {
        if self.budget == 0 {
            return Err(Error::BadParameters("--budget must be ≥ 1".into()));
        }
        let threads = match self.threads {
            Some(0) => return Err(Error::BadParameters("--threads must be ≥ 1".into())),
            Some(t) => t,
            None => ExecConfig::default().threads,
        };
        Ok(ExecConfig { threads, budget: self.budget })
    }

    pub fn mode(&self) -> Result<Mode> {
        match self.mode {
            ModeArg::Exact => Ok(Mode::Exact),
            ModeArg::Mc => {
                if !(self.delta > 0.0 && self.delta < 1.0) {
                    return Err(Error::BadParameters(format!("--delta must lie in (0, 1), got {}", self.delta)));
                }
                if self.samples == 0 {
                    return Err(Error::ZeroSamples);
                }
                Ok(Mode::MonteCarlo(McOptions { samples: self.samples, delta: self.delta, seed: self.seed.unwrap_or(0) }))
            }
        }
    }

    /// The polynomial given by `--poly` or `--poly-file` (first member of the file).
    pub fn polynomial(&self, field: &Field) -> Result<Polynomial> {
        if let Some(text) = &self.poly {
            return parse(text, field, self.vars);
        }
        let path = self
            .poly_file
            .as_ref()
            .ok_or_else(|| Error::BadParameters("give the polynomial with --poly or --poly-file".into()))?;
        let members = parse_lines(&std::fs::read_to_string(path)?, field, self.vars)?;
        members
            .into_iter()
            .next()
            .ok_or_else(|| Error::BadParameters(format!("{} holds no polynomial", path.display())))
    }

    /// The family given by `--family-file`, or a single member from `--poly`/`--poly-file`.
    pub fn family(&self, field: &Field) -> Result<PolyFamily> {
        let members = match (&self.family_file, &self.poly_file) {
            (Some(path), _) | (None, Some(path)) => parse_lines(&std::fs::read_to_string(path)?, field, self.vars)?,
            (None, None) => vec![self.polynomial(field)?],
        };
        PolyFamily::new_allow_dependent(members)
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let opts = &cli.opts;
    let cfg = opts.exec()?;
    match &cli.command {
        Command::Bias { gowers, path } => cmd_bias(opts, &cfg, *gowers, *path),
        Command::Family(sub) => cmd_family(opts, &cfg, sub),
        Command::Variety(sub) => cmd_variety(opts, &cfg, sub),
        Command::Gen { kind, n, s, m, i, t, degrees, sidecar } => {
            cmd_gen(opts, *kind, GenParams { n: *n, s: *s, m: *m, i: *i, t: *t, degrees }, sidecar.as_ref())
        }
        Command::Suite { name } => cmd_suite(opts, &cfg, name),
    }
}

fn ok(stdout: String) -> Outcome {
    Outcome { stdout, stderr: String::new(), code: 0 }
}

fn json_line(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn text_lines(value: &Value) -> String {
    match value {
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
        other => format!("{other}\n"),
    }
}

fn csv_of(value: &Value) -> String {
    let Value::Object(map) = value else { return format!("{value}\n") };
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    };
    let keys: Vec<&str> = map.keys().map(String::as_str).collect();
    let values: Vec<String> = map.values().map(cell).collect();
    format!("{}\n{}\n", keys.join(","), values.join(","))
}

fn render(value: &Value, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => json_line(value)?,
        Format::Text => text_lines(value),
        Format::Csv => csv_of(value),
    })
}

/// BiasReport plus the analytic rank of `P̃`, the thread count and the wall time.
pub fn bias_json(poly: &Polynomial, mode: &Mode, cfg: &ExecConfig) -> Result<Value> {
    let start = Instant::now();
    let report = bias(poly, mode, cfg)?;
    let ar = match analytic_rank(poly, mode, cfg) {
        Ok(r) => serde_json::to_value(r)?,
        Err(Error::DegreeZero) => Value::Null,
        Err(e) => return Err(e),
    };
    let mut value = serde_json::to_value(&report)?;
    let map = value.as_object_mut().expect("struct");
    map.insert("analytic_rank".into(), ar);
    map.insert("threads".into(), json!(cfg.threads));
    map.insert("elapsed_ms".into(), json!(start.elapsed().as_millis() as u64));
    Ok(value)
}

fn cmd_bias(opts: &RunConfig, cfg: &ExecConfig, gowers: Option<usize>, path: PathArg) -> Result<Outcome> {
    let field = opts.field()?;
    let poly = opts.polynomial(&field)?;
    let mode = opts.mode()?;
    let mut value = bias_json(&poly, &mode, cfg)?;
    if let Some(d) = gowers {
        let path = match path {
            PathArg::Definition => GowersPath::Definition,
            PathArg::Tensor => GowersPath::Tensor,
        };
        let g = gowers_norm(&poly, d, path, cfg)?;
        value.as_object_mut().expect("struct").insert("gowers".into(), serde_json::to_value(g)?);
    }
    Ok(ok(render(&value, opts.format.unwrap_or(Format::Json))?))
}

fn cmd_family(opts: &RunConfig, cfg: &ExecConfig, sub: &FamilyCommand) -> Result<Outcome> {
    let field = opts.field()?;
    let mode = opts.mode()?;
    let value = match sub {
        FamilyCommand::Rank => {
            let family = opts.family(&field)?;
            let best = family_min_arank(&family, &mode, cfg)?;
            json!({
                "q": field.q(),
                "n": family.n(),
                "members": family.len(),
                "dimension": family.dimension(),
                "min_analytic_rank": best.rank,
                "coefficients": best.coefficients.iter().map(|c| c.id()).collect::<Vec<_>>(),
                "representative": best.representative.to_string(),
            })
        }
        FamilyCommand::Fibers => {
            let family = opts.family(&field)?;
            let dist = crate::expsum::joint_distribution(family.members(), cfg)?;
            let check = equidistribution_check(&family, cfg)?;
            json!({
                "q": field.q(),
                "n": family.n(),
                "c": family.len(),
                "counts": dist.counts(),
                "uniform": dist.counts().iter().all(|&x| x == dist.counts()[0]),
                "equidistribution": check,
            })
        }
        FamilyCommand::SearchShifts { m, trials } => {
            let seed = opts
                .seed
                .ok_or_else(|| Error::BadParameters("search-shifts requires --seed".into()))?;
            let poly = opts.polynomial(&field)?;
            serde_json::to_value(search_shifts(&poly, *m, *trials, seed, &mode, cfg)?)?
        }
    };
    Ok(ok(render(&value, opts.format.unwrap_or(Format::Json))?))
}

fn cmd_variety(opts: &RunConfig, cfg: &ExecConfig, sub: &VarietyCommand) -> Result<Outcome> {
    let field = opts.field()?;
    let family = opts.family(&field)?;
    match sub {
        VarietyCommand::Count => {
            let table = count_table(&family, opts.smax, cfg)?;
            let out = match opts.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => json_line(&table)?,
                Format::Text => table.to_csv().replace(',', "\t"),
            };
            Ok(ok(out))
        }
        VarietyCommand::Codim => {
            let report = codim_singular(&family, opts.smax, cfg)?;
            let out = match opts.format.unwrap_or(Format::Json) {
                Format::Csv => report.table.to_csv(),
                Format::Json => json_line(&report)?,
                Format::Text => {
                    let kappa = serde_json::to_value(report.kappa)?;
                    let mut s = format!("dim X: {:?}\ndim sing: {:?}\nkappa: {kappa}\n", report.dim_x.estimate, report.dim_sing.estimate);
                    for w in &report.warnings {
                        s += &format!("warning: {w}\n");
                    }
                    s
                }
            };
            Ok(ok(out))
        }
    }
}

struct GenParams<'a> {
    n: Option<usize>,
    s: Option<usize>,
    m: Option<usize>,
    i: Option<usize>,
    t: Option<usize>,
    degrees: &'a [u32],
}

fn need(v: Option<usize>, flag: &str, kind: &str) -> Result<usize> {
    v.ok_or_else(|| Error::BadParameters(format!("gen {kind} requires --{flag}")))
}

/// The sidecar written next to generated text.
pub fn sidecar_json(g: &Generated, field: &Field) -> Value {
    json!({
        "kind": g.kind,
        "params": g.params,
        "q": field.q(),
        "num_vars": g.poly.n(),
        "variables": g.variables,
    })
}

fn cmd_gen(opts: &RunConfig, kind: GenKind, p: GenParams<'_>, sidecar: Option<&PathBuf>) -> Result<Outcome> {
    let field = opts.field()?;
    let generated = match kind {
        GenKind::F => gen_f(&field, need(p.n, "n", "F")?, need(p.s, "s", "F")?)?,
        GenKind::FBlock => gen_f_block(
            &field,
            need(p.n, "n", "F-block")?,
            need(p.s, "s", "F-block")?,
            need(p.m, "m", "F-block")?,
            need(p.i, "i", "F-block")?,
        )?,
        GenKind::G => {
            let t = need(p.t, "t", "G")?;
            if p.degrees.is_empty() {
                return Err(Error::BadParameters("gen G requires --degrees".into()));
            }
            if let Some(s) = p.s {
                if s != p.degrees.len() {
                    return Err(Error::BadParameters(format!("--s {s} but {} degrees given", p.degrees.len())));
                }
            }
            gen_g(&field, t, p.degrees)?
        }
    };
    let side = sidecar_json(&generated, &field);
    if let Some(path) = sidecar {
        std::fs::write(path, json_line(&side)?)?;
    }
    let out = match opts.format.unwrap_or(Format::Text) {
        Format::Json => {
            let mut v = side;
            v.as_object_mut().expect("object").insert("poly".into(), json!(generated.poly.to_string()));
            json_line(&v)?
        }
        Format::Text | Format::Csv => format!("{}\n", generated.poly),
    };
    Ok(ok(out))
}

fn cmd_suite(opts: &RunConfig, cfg: &ExecConfig, name: &str) -> Result<Outcome> {
    let names: Vec<&str> = if name == "all" { SUITES.iter().map(|s| s.0).collect() } else { vec![name] };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for n in names {
        reports.push(run_suite(n, cfg)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let stdout = match opts.format.unwrap_or(Format::Json) {
        Format::Json if reports.len() == 1 => json_line(&reports[0])?,
        Format::Json => json_line(&json!({ "pass": pass, "suites": reports }))?,
        Format::Csv => {
            let mut s = String::from("criterion,suite,pass,checks\n");
            for r in &reports {
                s += &format!("{},{},{},{}\n", r.criterion, r.suite, r.pass, r.checks);
            }
            s
        }
        Format::Text => reports
            .iter()
            .map(|r| {
                let mut line = format!(
                    "criterion {:>2} {:<20} {} ({} checks)\n",
                    r.criterion,
                    r.suite,
                    if r.pass { "pass" } else { "FAIL" },
                    r.checks
                );
                for f in &r.failures {
                    line += &format!("    {f}\n");
                }
                line
            })
            .collect(),
    };
    Ok(Outcome { stdout, stderr: String::new(), code: if pass { 0 } else { 1 } })
}
