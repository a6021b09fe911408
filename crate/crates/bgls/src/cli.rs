//! Command-line front end.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::Parser;

use bgls_core::criteria::{boundedness, hardy_norm_probe, Operator, ProbeFlag};
use bgls_core::dilation::{dilation_norm_empirical, matrix_boyd_limits, matrix_dilation_norm, Matrix, Relation};
use bgls_core::indices::{boyd_index, sandwich_check, shimogaki_indices, BoydSide};
use bgls_core::search::ArgMax;
use bgls_core::space::{bgls_norm, fundamental_function_psi};
use bgls_core::{BlockSpec, GrandSpace, Interval, PsiFunction, WeightedDomain};

use crate::config::{Command, ConfigError, RawConfig, RunConfig};
use crate::output::{write_text, Cell, OutputError, Sink, Table};
use crate::verify;

/// Norms, fundamental functions, dilation norms, indices and operator
/// criteria for bilateral grand Lebesgue spaces.
#[derive(Parser, Debug)]
#[command(name = "bgls", version)]
pub struct Args {
    /// norm | fundfn | dilation-norm | matrix-dilation | boyd | shimogaki |
    /// criteria | probe | verify-all
    pub command: Option<String>,

    /// TOML file of flat key = value settings; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Exponent interval `a,b`; `b` may be `inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,

    /// ψ expression, e.g. `canonical`, `const(2)`, `power(1,0.5,0.5)`.
    #[arg(long)]
    pub psi: Option<String>,

    /// Second ψ expression (the target space is G(ψν)).
    #[arg(long)]
    pub nu: Option<String>,

    /// Domain blocks `dim:theta,...`.
    #[arg(long)]
    pub blocks: Option<String>,

    /// Function expression for `norm`, e.g. `pw([0,1,1,-0.2])`.
    #[arg(long)]
    pub function: Option<String>,

    /// Dilation factors, one per block; for `fundfn`, the δ grid.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,

    /// Row-major square matrix.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,

    /// Exponent of the weight |||x|||^σ for `matrix-dilation`.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,

    #[arg(long)]
    pub levels: Option<String>,

    #[arg(long)]
    pub tol: Option<String>,

    /// Seed of the random function banks.
    #[arg(long)]
    pub seed: Option<String>,

    #[arg(long)]
    pub out: Option<String>,

    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Config(ConfigError),
    Compute { op: &'static str, err: bgls_core::Error },
    Output(OutputError),
    /// `verify-all` ran and this many criteria failed.
    Failed(usize),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Failed(_) => 1,
            RunError::Usage(_) | RunError::Config(_) => 2,
            RunError::Compute { .. } | RunError::Output(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => f.write_str(m),
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Compute { op, err } => write!(f, "{op}: {err}"),
            RunError::Output(e) => write!(f, "{e}"),
            RunError::Failed(n) => write!(f, "{n} criteria failed"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<OutputError> for RunError {
    fn from(e: OutputError) -> Self {
        RunError::Output(e)
    }
}

fn invalid(field: &str, msg: impl Into<String>) -> RunError {
    RunError::Config(ConfigError::Invalid { field: field.into(), msg: msg.into() })
}

trait Op<T> {
    fn op(self, name: &'static str) -> Result<T, RunError>;
}

impl<T> Op<T> for bgls_core::Result<T> {
    fn op(self, name: &'static str) -> Result<T, RunError> {
        self.map_err(|err| RunError::Compute { op: name, err })
    }
}

pub fn raw_config(args: &Args) -> Result<RawConfig, RunError> {
    let mut raw = match &args.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    let flags = [
        ("command", &args.command),
        ("interval", &args.interval),
        ("psi", &args.psi),
        ("nu", &args.nu),
        ("blocks", &args.blocks),
        ("function", &args.function),
        ("s", &args.s),
        ("matrix", &args.matrix),
        ("sigma", &args.sigma),
        ("alpha", &args.alpha),
        ("beta", &args.beta),
        ("levels", &args.levels),
        ("tol", &args.tol),
        ("seed", &args.seed),
        ("out", &args.out),
        ("format", &args.format),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            raw.set_flag(k, v.clone());
        }
    }
    Ok(raw)
}

/// Parse, run, write. Returns the process exit code.
pub fn main_with<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = raw_config(&args).and_then(|raw| Ok(raw.resolve()?)).and_then(|cfg| execute(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bgls: {e}");
            e.exit_code()
        }
    }
}

/// Run a resolved configuration and write its table.
pub fn execute(cfg: &RunConfig) -> Result<(), RunError> {
    let (table, failed) = run(cfg)?;
    let text = table.render(cfg.format, &cfg.entries)?;
    write_text(&Sink { path: cfg.out.as_deref(), format: cfg.format }, &text)?;
    if failed > 0 {
        return Err(RunError::Failed(failed));
    }
    Ok(())
}

fn interval(cfg: &RunConfig) -> Result<Interval, RunError> {
    cfg.interval.ok_or_else(|| invalid("interval", "required"))
}

fn domain_or_line(cfg: &RunConfig) -> WeightedDomain {
    cfg.blocks.clone().unwrap_or_else(WeightedDomain::line)
}

fn build_psi(cfg: &RunConfig, d: &WeightedDomain) -> Result<PsiFunction, RunError> {
    cfg.psi.build(d, interval(cfg)?).op("psi")
}

fn build_nu(cfg: &RunConfig, d: &WeightedDomain) -> Result<PsiFunction, RunError> {
    cfg.nu.build(d, interval(cfg)?).op("nu")
}

fn relation(r: Relation) -> &'static str {
    match r {
        Relation::EqualityExpected => "equality",
        Relation::UpperBoundOnly => "upper-bound",
    }
}

fn opt_num(v: Option<f64>) -> Cell {
    v.map_or(Cell::Text(String::new()), Cell::Num)
}

/// The table of a run and the number of failed criteria.
pub fn run(cfg: &RunConfig) -> Result<(Table, usize), RunError> {
    let t = match cfg.command {
        Command::Norm => norm(cfg)?,
        Command::Fundfn => fundfn(cfg)?,
        Command::DilationNorm => dilation(cfg)?,
        Command::MatrixDilation => matrix(cfg)?,
        Command::Boyd => boyd(cfg)?,
        Command::Shimogaki => shimogaki(cfg)?,
        Command::Criteria => criteria(cfg)?,
        Command::Probe => probe(cfg)?,
        Command::VerifyAll => return Ok(verify_all(cfg)),
    };
    Ok((t, 0))
}

fn norm(cfg: &RunConfig) -> Result<Table, RunError> {
    let d = domain_or_line(cfg);
    let psi = build_psi(cfg, &d)?;
    let f = match &cfg.function {
        Some(fe) => fe.build(&d, interval(cfg)?).op("function")?,
        None => psi.representation().cloned().ok_or_else(|| invalid("function", "required when ψ has no representation"))?,
    };
    let sp = GrandSpace::new(d, psi).op("norm")?;
    let r = bgls_norm(&sp, &f, cfg.tol).op("norm")?;
    let mut t = Table::new("norm", "p-profile", cfg.tol, &["p", "ratio"]);
    for &(p, v) in &r.profile {
        t.push(vec![p.into(), v.into()]);
    }
    t.note("norm", r.value);
    t.note(
        "argmax",
        match r.argmax {
            ArgMax::Interior(p) => crate::output::fmt_f64(p),
            ArgMax::LowerEnd => "a+".into(),
            ArgMax::UpperEnd => "b-".into(),
        },
    );
    Ok(t)
}

fn fundfn(cfg: &RunConfig) -> Result<Table, RunError> {
    let d = domain_or_line(cfg);
    let psi = build_psi(cfg, &d)?;
    let (grid, kind): (Vec<f64>, &str) = match &cfg.s {
        Some(s) => (s.clone(), "listed"),
        None => ((-6..=6).map(|k| 10f64.powi(k)).collect(), "log10"),
    };
    let mut vals = Vec::with_capacity(grid.len());
    for &delta in &grid {
        vals.push(fundamental_function_psi(&psi, delta).op("fundfn")?.value);
    }
    Ok(crate::output::sweep_table("phi", kind, "delta", &grid, &vals, cfg.tol)?)
}

fn dilation(cfg: &RunConfig) -> Result<Table, RunError> {
    let d = domain_or_line(cfg);
    let psi = build_psi(cfg, &d)?;
    let nu = build_nu(cfg, &d)?;
    let s = cfg.s.clone().ok_or_else(|| invalid("s", "required"))?;
    if s.len() != d.num_blocks() {
        return Err(invalid("s", format!("{} factors for {} blocks", s.len(), d.num_blocks())));
    }
    let r = dilation_norm_empirical(&psi, &nu, &d, &s).op("dilation-norm")?;
    let mut cols: Vec<String> = (1..=s.len()).map(|j| format!("s_{j}")).collect();
    cols.extend(["closed_form", "empirical", "relation"].map(String::from));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("dilation-norm", "point", cfg.tol, &cols);
    let mut row: Vec<Cell> = s.iter().map(|&v| v.into()).collect();
    row.extend([r.closed_form.into(), opt_num(r.empirical_lower), relation(r.relation).into()]);
    t.push(row);
    Ok(t)
}

fn matrix(cfg: &RunConfig) -> Result<Table, RunError> {
    let m = cfg.matrix.clone().ok_or_else(|| invalid("matrix", "required"))?;
    let n = (m.len() as f64).sqrt().round() as usize;
    let a = Matrix::new(n, m).op("matrix-dilation")?;
    let d = match (&cfg.blocks, cfg.sigma) {
        (Some(b), _) => b.clone(),
        (None, None) => WeightedDomain::new(vec![BlockSpec::lebesgue(1); n]).op("matrix-dilation")?,
        (None, Some(sg)) => WeightedDomain::new(vec![BlockSpec::power(n, sg, 1.0)]).op("matrix-dilation")?,
    };
    let psi = build_psi(cfg, &d)?;
    let nu = build_nu(cfg, &d)?;
    let r = matrix_dilation_norm(&psi, &nu, &a, cfg.sigma).op("matrix-dilation")?;
    let mut t = Table::new("matrix-dilation", "point", cfg.tol, &["det", "spectral_norm", "closed_form", "empirical", "relation"]);
    t.push(vec![a.det().into(), a.spectral_norm().into(), r.closed_form.into(), opt_num(r.empirical_lower), relation(r.relation).into()]);
    if psi.representation().is_some() {
        let (up, down) = matrix_boyd_limits(&psi, &nu, n, cfg.levels).op("matrix-dilation")?;
        t.note("det_slope_inf", up.value);
        t.note("det_slope_zero", down.value);
    }
    Ok(t)
}

fn boyd(cfg: &RunConfig) -> Result<Table, RunError> {
    let d = domain_or_line(cfg);
    let psi = build_psi(cfg, &d)?;
    let nu = build_nu(cfg, &d)?;
    let mut t = Table::new("boyd", "log10-even", cfg.tol, &["block", "side", "s", "h", "slope"]);
    for j in 0..d.num_blocks() {
        for (side, name) in [(BoydSide::Lower, "lower"), (BoydSide::Upper, "upper")] {
            let e = boyd_index(&psi, &nu, &d, j, side, cfg.levels).op("boyd")?;
            let est = &e.estimate;
            for m in 1..est.ln_s.len() {
                t.push(vec![(j + 1).into(), name.into(), est.ln_s[m].exp().into(), est.ln_h[m].exp().into(), est.slopes[m - 1].into()]);
            }
            let key = if side == BoydSide::Upper { "B_plus" } else { "B_minus" };
            t.note(&format!("{key}_{}", j + 1), est.value);
            t.note(&format!("{key}_{}_closed_form", j + 1), e.closed_form);
        }
    }
    Ok(t)
}

fn shimogaki(cfg: &RunConfig) -> Result<Table, RunError> {
    let d = domain_or_line(cfg);
    let psi = build_psi(cfg, &d)?;
    let r = shimogaki_indices(&psi, cfg.levels).op("shimogaki")?;
    let mut t = Table::new("shimogaki", "log10", cfg.tol, &["t", "M"]);
    for &(x, m) in &r.m_profile {
        t.push(vec![x.into(), m.into()]);
    }
    let iv = psi.interval();
    t.note("beta_minus", r.beta_minus);
    t.note("beta_plus", r.beta_plus);
    t.note("beta_minus_def", r.beta_minus_def);
    t.note("beta_plus_def", r.beta_plus_def);
    t.note("inv_b", iv.inv_b());
    t.note("inv_a", 1.0 / iv.a());
    t.note("disagreement", r.disagreement);
    if psi.representation().is_some() && d.num_blocks() == 1 && d.total_dim() == 1 {
        let sw = sandwich_check(&psi, cfg.levels).op("shimogaki")?;
        t.note("B_minus", sw.b_minus);
        t.note("B_plus", sw.b_plus);
        t.note("sandwich_holds", sw.holds);
    }
    Ok(t)
}

fn criteria(cfg: &RunConfig) -> Result<Table, RunError> {
    let iv = interval(cfg)?;
    let mut t = Table::new("criteria", "operators", 0.0, &["operator", "parameter", "bounded", "condition"]);
    for op in Operator::ALL {
        let param = match op {
            Operator::PAlpha => cfg.alpha,
            Operator::QBeta => cfg.beta,
            _ => None,
        };
        let needs = matches!(op, Operator::PAlpha | Operator::QBeta);
        if needs && param.is_none() {
            let rule = boundedness(op, &iv, Some(0.5)).op("criteria")?.condition_text;
            let threshold = match op {
                Operator::PAlpha => format!("alpha > {}", crate::output::fmt_f64(1.0 / iv.a())),
                _ => format!("beta < {}", crate::output::fmt_f64(iv.inv_b())),
            };
            t.push(vec![op.name().into(), Cell::Text(String::new()), threshold.into(), rule.into()]);
            continue;
        }
        let v = boundedness(op, &iv, param).op("criteria")?;
        t.push(vec![op.name().into(), opt_num(param), v.bounded.into(), v.condition_text.into()]);
    }
    Ok(t)
}

fn probe(cfg: &RunConfig) -> Result<Table, RunError> {
    let (op, param) = match (cfg.alpha, cfg.beta) {
        (Some(a), None) => (Operator::PAlpha, a),
        (None, Some(b)) => (Operator::QBeta, b),
        _ => return Err(invalid("alpha", "give exactly one of alpha and beta")),
    };
    let iv = interval(cfg)?;
    let psi = build_psi(cfg, &WeightedDomain::line())?;
    let sp = GrandSpace::from_representation(psi).op("probe")?;
    let r = hardy_norm_probe(op, &sp, param, cfg.levels).op("probe")?;
    let verdict = boundedness(op, &iv, Some(param)).op("probe")?.bounded;
    let mut t = Table::new("probe", "log10-levels", 1e-9, &["n", "ratio"]);
    for (&n, &v) in r.ns.iter().zip(&r.ratios) {
        t.push(vec![n.into(), v.into()]);
    }
    let flag = match r.flag {
        ProbeFlag::BoundedConsistent => "bounded-consistent",
        ProbeFlag::UnboundedConsistent => "unbounded-consistent",
        ProbeFlag::Inconclusive => "inconclusive",
    };
    t.note("operator", op.name());
    t.note("flag", flag);
    t.note("verdict_bounded", verdict);
    Ok(t)
}

fn verify_all(cfg: &RunConfig) -> (Table, usize) {
    let results = verify::run_all(cfg.seed);
    let mut t = Table::new("verify-all", "criteria", 0.0, &["criterion", "name", "status", "cases", "failures", "worst", "detail"]);
    let mut failed = 0;
    for r in &results {
        eprintln!("{}", r.line());
        if !r.passed() {
            failed += 1;
        }
        let detail = r.error.clone().unwrap_or_else(|| r.failures.first().cloned().unwrap_or_default());
        t.push(vec![
            r.id.into(),
            r.name.into(),
            if r.passed() { "PASS" } else { "FAIL" }.into(),
            r.cases.into(),
            r.failures.len().into(),
            r.worst.into(),
            detail.into(),
        ]);
    }
    t.note("seed", cfg.seed.to_string());
    (t, failed)
}
