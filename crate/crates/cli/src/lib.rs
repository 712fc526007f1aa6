//! Command implementations for the `jetsym` binary.
//!
//! Every command produces a [`Report`], printed either as plain text or as a
//! JSON document with the fields `command`, `inputs`, `verdict`,
//! `remainder`, `certificate` and `values`. Exit status is 0 on success or
//! a positive verdict, 1 on a negative verdict, 2 on error.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use jetsym::catalog::{self, CatalogEntry};
use jetsym::{
    bracket_characteristic, bt_apply, bt_rhs, certify_operator, check_symmetry, declare_potential,
    default_bt_basis, find_operator, reduce_mod_pde, structure_constants, AnsatzConfig,
    Characteristic, Dependent, Kind, LinearOperatorAnsatz, NormalForm, Pde, PotentialDef, Problem,
    Verdict,
};
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "jetsym",
    version,
    about = "Symmetry checks for (matrix-valued) PDEs"
)]
pub struct Cli {
    /// Emit one JSON document per command instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether Q is a symmetry and search for a certificate.
    Check {
        #[command(flatten)]
        pde: PdeArgs,
        /// Characteristic: an expression or a catalog name such as q3.
        #[arg(long)]
        q: String,
        #[command(flatten)]
        ansatz: AnsatzArgs,
    },
    /// Verify a given operator certificate, written on the placeholder F.
    Certify {
        #[command(flatten)]
        pde: PdeArgs,
        #[arg(long)]
        q: String,
        /// Operator applied to F, e.g. "5*F + x*F_x + 3*t*F_t".
        #[arg(long)]
        op: String,
    },
    /// Bracket of two characteristics.
    Bracket {
        #[command(flatten)]
        pde: PdeArgs,
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
    },
    /// Structure constants of a basis of characteristics.
    Structconsts {
        #[command(flatten)]
        pde: PdeArgs,
        /// Comma-separated catalog names, or expressions separated by `;`.
        #[arg(long)]
        basis: String,
    },
    /// Reduce an expression modulo the equation.
    Reduce {
        #[command(flatten)]
        pde: PdeArgs,
        expr: String,
    },
    /// Apply the chiral Bäcklund map to a seed Φ.
    BtApply {
        #[command(flatten)]
        pde: PdeArgs,
        #[arg(long)]
        phi: String,
        /// Longest word in the default candidate basis.
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// List the built-in equations.
    List,
    /// Parse and normalize an expression.
    Parse {
        #[command(flatten)]
        pde: PdeArgs,
        expr: String,
    },
    /// Run a batch file: a declaration header followed by one command per line.
    Run { file: PathBuf },
}

/// Selects a catalog equation or declares one inline.
#[derive(Args, Debug, Clone, Default)]
pub struct PdeArgs {
    /// Catalog equation name (see `list`).
    #[arg(long)]
    pub pde: Option<String>,
    /// Coordinates, comma-separated.
    #[arg(long, default_value = "x,t")]
    pub coords: String,
    /// Dependent variable name.
    #[arg(long, default_value = "u")]
    pub dep: String,
    /// Dependent is matrix-valued.
    #[arg(long)]
    pub matrix: bool,
    /// Dependent is invertible.
    #[arg(long)]
    pub invertible: bool,
    /// Scalar constant symbols, comma-separated.
    #[arg(long)]
    pub constants: Option<String>,
    /// Constant matrices, comma-separated; suffix `!` marks invertible.
    #[arg(long)]
    pub matrices: Option<String>,
    /// Solved form `LEADING = RHS`, e.g. "u_t = u_xx".
    #[arg(long)]
    pub solved: Option<String>,
    /// F itself, when it differs from `LEADING - RHS`.
    #[arg(long)]
    pub f: Option<String>,
    /// Potential `NAME: x = EXPR, t = EXPR`; repeatable.
    #[arg(long)]
    pub potential: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct AnsatzArgs {
    /// Highest derivative order in the searched operator.
    #[arg(long, default_value_t = 2)]
    pub max_order: usize,
    /// Highest coefficient degree in the searched operator.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
}

impl Default for AnsatzArgs {
    fn default() -> Self {
        AnsatzArgs {
            max_order: 2,
            degree: 2,
        }
    }
}

/// Declarations in effect for a command.
pub struct Context {
    pub problem: Problem,
    pub pde: Option<Pde>,
    pub entry: Option<CatalogEntry>,
}

impl Context {
    fn pde(&self) -> Result<&Pde> {
        self.pde
            .as_ref()
            .ok_or_else(|| anyhow!("no equation given: use --pde NAME or --solved"))
    }

    fn problem(&self) -> &Problem {
        self.pde.as_ref().map_or(&self.problem, Pde::problem)
    }

    /// A catalog characteristic by name, or a parsed expression.
    fn characteristic(&self, text: &str) -> Result<Characteristic> {
        let text = text.trim();
        if let Some(c) = self.entry.as_ref().and_then(|e| e.characteristic(text)) {
            return Ok(c.clone());
        }
        Ok(Characteristic::parse(self.problem(), text, text)?)
    }
}

fn split_list(s: &str, sep: char) -> Vec<&str> {
    s.split(sep)
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

fn parse_potential(text: &str) -> Result<PotentialDef> {
    let (name, rest) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("potential `{text}` must look like `X: x = ..., t = ...`"))?;
    let mut def = PotentialDef::new(name.trim());
    for part in split_list(rest, ',') {
        let (coord, expr) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected `coordinate = expression` in `{part}`"))?;
        def = def.derivative(coord.trim(), expr.trim());
    }
    Ok(def)
}

impl PdeArgs {
    pub fn context(&self) -> Result<Context> {
        if let Some(name) = &self.pde {
            let mut entry = catalog::get_pde(name)?;
            let mut pde = entry.pde.clone();
            for p in &self.potential {
                declare_potential(&mut pde, &parse_potential(p)?)?;
            }
            entry.pde = pde.clone();
            return Ok(Context {
                problem: pde.problem().clone(),
                pde: Some(pde),
                entry: Some(entry),
            });
        }
        let coords = split_list(&self.coords, ',');
        let kind = if self.matrix {
            Kind::Matrix
        } else {
            Kind::Scalar
        };
        let mut problem = Problem::new(&coords, Dependent::new(&self.dep, kind, self.invertible))?;
        for c in self.constants.iter().flat_map(|s| split_list(s, ',')) {
            problem = problem.with_constant(c)?;
        }
        for m in self.matrices.iter().flat_map(|s| split_list(s, ',')) {
            problem = match m.strip_suffix('!') {
                Some(name) => problem.with_matrix(name, true)?,
                None => problem.with_matrix(m, false)?,
            };
        }
        let pde = match &self.solved {
            Some(solved) => {
                let (lead, rhs) = solved
                    .split_once('=')
                    .ok_or_else(|| anyhow!("solved form must be `LEADING = RHS`"))?;
                let mut pde = Pde::from_text(
                    "custom",
                    problem.clone(),
                    self.f.as_deref(),
                    lead.trim(),
                    rhs.trim(),
                )?;
                for p in &self.potential {
                    declare_potential(&mut pde, &parse_potential(p)?)?;
                }
                Some(pde)
            }
            None => {
                if !self.potential.is_empty() || self.f.is_some() {
                    bail!("--potential and --f need a solved form (--solved)");
                }
                None
            }
        };
        Ok(Context {
            problem,
            pde,
            entry: None,
        })
    }
}

/// Outcome of one command.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub verdict: Option<String>,
    pub remainder: Option<String>,
    pub certificate: Option<String>,
    pub values: Map<String, Value>,
    pub lines: Vec<String>,
    pub status: i32,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Default::default()
        }
    }

    fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    fn value(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn error(command: &str, err: &anyhow::Error) -> Self {
        let mut r = Report::new(command);
        r.verdict = Some("Error".into());
        r.value("error", format!("{err:#}"));
        r.lines.push(format!("error: {err:#}"));
        r.status = EXIT_ERROR;
        r
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "remainder": self.remainder,
            "certificate": self.certificate,
            "values": self.values,
        })
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            self.to_json().to_string()
        } else {
            self.lines.join("\n")
        }
    }
}

fn pde_input(args: &PdeArgs) -> Value {
    match &args.pde {
        Some(name) => Value::String(name.clone()),
        None => json!({
            "coords": args.coords,
            "dep": args.dep,
            "matrix": args.matrix,
            "solved": args.solved,
            "f": args.f,
        }),
    }
}

pub fn check(ctx: &Context, q: &str, cfg: &AnsatzConfig) -> Result<Report> {
    let pde = ctx.pde()?;
    let p = pde.problem();
    let q = ctx.characteristic(q)?;
    let mut report = check_symmetry(pde, &q)?;
    if report.verdict == Verdict::Symmetry {
        report.certificate = find_operator(pde, &q, cfg)?;
    }
    let mut r = Report::new("check");
    r.verdict = Some(report.verdict.to_string());
    r.remainder = Some(p.render(&report.remainder));
    r.certificate = report.certificate.as_ref().map(|c| c.render(p));
    r.value("q", p.render(q.q()));
    r.value("raw", p.render(&report.raw));
    r.lines.push(format!("Q = {}", p.render(q.q())));
    r.lines.push(format!("verdict: {}", report.verdict));
    r.lines.push(format!("raw: {}", p.render(&report.raw)));
    r.lines
        .push(format!("remainder: {}", p.render(&report.remainder)));
    match (&r.certificate, report.verdict) {
        (Some(c), _) => r.lines.push(format!("certificate: {c}")),
        (None, Verdict::Symmetry) => r
            .lines
            .push("certificate: none found within the search bounds".into()),
        (None, Verdict::NotSymmetry) => {}
    }
    r.status = match report.verdict {
        Verdict::Symmetry => EXIT_OK,
        Verdict::NotSymmetry => EXIT_NEGATIVE,
    };
    Ok(r)
}

pub fn certify(ctx: &Context, q: &str, op: &str) -> Result<Report> {
    let pde = ctx.pde()?;
    let p = pde.problem();
    let q = ctx.characteristic(q)?;
    let op = LinearOperatorAnsatz::parse(p, op)?;
    let ok = certify_operator(pde, &q, &op)?;
    let mut r = Report::new("certify");
    r.verdict = Some(if ok { "Certified" } else { "NotCertified" }.into());
    r.certificate = Some(op.render(p));
    r.value("q", p.render(q.q()));
    r.value("holds", ok);
    r.lines.push(format!(
        "Δ_Q F = {}: {}",
        op.render(p),
        if ok { "holds" } else { "fails" }
    ));
    r.status = if ok { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(r)
}

pub fn bracket(ctx: &Context, q1: &str, q2: &str) -> Result<Report> {
    let p = ctx.problem();
    let a = ctx.characteristic(q1)?;
    let b = ctx.characteristic(q2)?;
    let c = bracket_characteristic(p, &a, &b)?;
    let text = p.render(c.q());
    let mut r = Report::new("bracket");
    r.value("bracket", text.clone());
    r.lines
        .push(format!("[{}, {}] = {text}", a.name(), b.name()));
    Ok(r)
}

fn basis(ctx: &Context, text: &str) -> Result<Vec<Characteristic>> {
    let named = ctx.entry.is_some()
        && split_list(text, ',')
            .iter()
            .all(|n| ctx.entry.as_ref().unwrap().characteristic(n).is_some());
    if named {
        split_list(text, ',')
            .into_iter()
            .map(|n| ctx.characteristic(n))
            .collect()
    } else {
        split_list(text, ';')
            .into_iter()
            .enumerate()
            .map(|(i, q)| Ok(ctx.characteristic(q)?.renamed(&format!("q{}", i + 1))))
            .collect()
    }
}

fn signed_sum(terms: &[(String, String)]) -> String {
    let mut out = String::new();
    for (coeff, name) in terms {
        let (neg, mag) = match coeff.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, coeff.as_str()),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag != "1" {
            out.push_str(mag);
            out.push('*');
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn structconsts(ctx: &Context, text: &str) -> Result<Report> {
    let pde = ctx.pde()?;
    let p = pde.problem();
    let basis = basis(ctx, text)?;
    let sc = structure_constants(pde, &basis)?;
    let n = basis.len();
    let mut r = Report::new("structconsts");
    let names: Vec<String> = basis.iter().map(|q| q.name().to_string()).collect();
    r.value(
        "basis",
        basis
            .iter()
            .map(|q| json!([q.name(), p.render(q.q())]))
            .collect::<Vec<_>>(),
    );
    let tensor: Vec<Vec<Vec<String>>> =
        sc.c.iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(ToString::to_string).collect())
                    .collect()
            })
            .collect();
    r.value("c", json!(tensor));
    for q in &basis {
        r.lines.push(format!("{} = {}", q.name(), p.render(q.q())));
    }
    r.lines.push(String::new());
    for i in 0..n {
        for j in i + 1..n {
            let terms: Vec<(String, String)> = (0..n)
                .filter(|&k| !num_is_zero(&tensor[i][j][k]))
                .map(|k| (tensor[i][j][k].clone(), names[k].clone()))
                .collect();
            r.lines.push(format!(
                "[{}, {}] = {}",
                names[i],
                names[j],
                signed_sum(&terms)
            ));
        }
    }
    r.lines.push(String::new());
    r.lines.push("nonzero c(i,j;k), i < j, 1-based:".into());
    for (i, row) in tensor.iter().enumerate() {
        for (j, cell) in row.iter().enumerate().skip(i + 1) {
            for (k, v) in cell.iter().enumerate() {
                if !num_is_zero(v) {
                    r.lines
                        .push(format!("  c({},{};{}) = {v}", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    Ok(r)
}

fn num_is_zero(s: &str) -> bool {
    s == "0"
}

pub fn reduce(ctx: &Context, expr: &str) -> Result<Report> {
    let pde = ctx.pde()?;
    let p = pde.problem();
    let e = p.parse_nf(expr)?;
    let red = reduce_mod_pde(pde, &e)?;
    let mut r = Report::new("reduce");
    r.remainder = Some(p.render(&red));
    r.lines.push(p.render(&red));
    Ok(r)
}

pub fn parse(ctx: &Context, expr: &str) -> Result<Report> {
    let p = ctx.problem();
    let e = p.parse_nf(expr)?;
    let mut r = Report::new("parse");
    r.value("normal_form", p.render(&e));
    r.value("terms", e.len());
    r.lines.push(p.render(&e));
    Ok(r)
}

pub fn bt(ctx: &Context, phi: &str, max_len: usize) -> Result<Report> {
    let pde = ctx.pde()?;
    let p = pde.problem();
    let phi = p.parse_nf(phi)?;
    let pair = bt_rhs(pde, &phi)?;
    let basis = default_bt_basis(pde, max_len)?;
    let result = bt_apply(pde, &phi, &basis)?;
    let mut r = Report::new("bt-apply");
    r.value("phi", p.render(&phi));
    r.value("rhs_x", p.render(&pair.rhs_x));
    r.value("rhs_t", p.render(&pair.rhs_t));
    r.value("basis_size", basis.len());
    r.lines.push(format!("Φ = {}", p.render(&phi)));
    r.lines.push(format!("Φ'_x = {}", p.render(&pair.rhs_x)));
    r.lines.push(format!("Φ'_t = {}", p.render(&pair.rhs_t)));
    match result {
        Some(out) => {
            let g = NormalForm::atom(p.jet_atom(Default::default()));
            let q = g.mul(&out);
            r.verdict = Some("found".into());
            r.value("phi_prime", p.render(&out));
            r.value("q_prime", p.render(&q));
            r.lines.push(format!("Φ' = {}", p.render(&out)));
            r.lines.push(format!("Q' = {}", p.render(&q)));
        }
        None => {
            r.verdict = Some("none".into());
            r.value("phi_prime", Value::Null);
            r.lines.push(format!(
                "Φ' = none: no combination of the {} candidates integrates the system; \
                 a new potential or a longer word length is needed",
                basis.len()
            ));
            r.status = EXIT_NEGATIVE;
        }
    }
    Ok(r)
}

pub fn list() -> Result<Report> {
    let mut r = Report::new("list");
    let mut entries = Vec::new();
    for name in catalog::names() {
        let e = catalog::get_pde(&name)?;
        let p = e.pde.problem();
        let lead = NormalForm::atom(p.jet_atom(e.pde.leading().clone()));
        let solved = format!("{} = {}", p.render(&lead), p.render(e.pde.rhs()));
        r.lines.push(format!("{name}: {} ({solved})", e.title));
        let mut chars = Vec::new();
        for c in &e.characteristics {
            let cert = c.certificate.as_ref().map(|o| o.render(p));
            r.lines.push(format!(
                "  {} = {}{}",
                c.characteristic.name(),
                p.render(c.characteristic.q()),
                cert.as_ref()
                    .map(|s| format!("   [certificate {s}]"))
                    .unwrap_or_default()
            ));
            chars.push(json!({
                "name": c.characteristic.name(),
                "q": p.render(c.characteristic.q()),
                "certificate": cert,
                "transformation": c.transformation,
            }));
        }
        entries.push(json!({
            "name": name,
            "title": e.title,
            "solved": solved,
            "f": p.render(e.pde.f()),
            "characteristics": chars,
        }));
    }
    r.value("pdes", entries);
    Ok(r)
}

/// Runs one parsed command line (other than `run`).
pub fn execute(command: &Command) -> Result<Report> {
    Ok(match command {
        Command::Check { pde, q, ansatz } => {
            let cfg = AnsatzConfig {
                max_order: ansatz.max_order,
                degree: ansatz.degree,
                ..AnsatzConfig::default()
            };
            check(&pde.context()?, q, &cfg)?
                .input("pde", pde_input(pde))
                .input("q", q.as_str())
        }
        Command::Certify { pde, q, op } => certify(&pde.context()?, q, op)?
            .input("pde", pde_input(pde))
            .input("q", q.as_str())
            .input("op", op.as_str()),
        Command::Bracket { pde, q1, q2 } => bracket(&pde.context()?, q1, q2)?
            .input("pde", pde_input(pde))
            .input("q1", q1.as_str())
            .input("q2", q2.as_str()),
        Command::Structconsts { pde, basis } => structconsts(&pde.context()?, basis)?
            .input("pde", pde_input(pde))
            .input("basis", basis.as_str()),
        Command::Reduce { pde, expr } => reduce(&pde.context()?, expr)?
            .input("pde", pde_input(pde))
            .input("expr", expr.as_str()),
        Command::BtApply { pde, phi, max_len } => bt(&pde.context()?, phi, *max_len)?
            .input("pde", pde_input(pde))
            .input("phi", phi.as_str())
            .input("max_len", *max_len),
        Command::List => list()?,
        Command::Parse { pde, expr } => parse(&pde.context()?, expr)?
            .input("pde", pde_input(pde))
            .input("expr", expr.as_str()),
        Command::Run { .. } => bail!("`run` cannot be nested"),
    })
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Check { .. } => "check",
        Command::Certify { .. } => "certify",
        Command::Bracket { .. } => "bracket",
        Command::Structconsts { .. } => "structconsts",
        Command::Reduce { .. } => "reduce",
        Command::BtApply { .. } => "bt-apply",
        Command::List => "list",
        Command::Parse { .. } => "parse",
        Command::Run { .. } => "run",
    }
}

/// Batch input: header directives, then one command per line.
///
/// ```text
/// # comments and blank lines are ignored
/// coords x, t
/// dependent g matrix invertible
/// constant c
/// matrix M
/// solved g_tt = g_t*inv(g)*g_t + g_x*inv(g)*g_x - g_xx
/// f D(inv(g)*g_x, x) + D(inv(g)*g_t, t)
/// potential X: x = inv(g)*g_t, t = -inv(g)*g_x
/// check g*M
/// bt-apply M
/// ```
///
/// `catalog NAME` may replace the declarations. Commands taking several
/// arguments separate them with `|`: `certify Q | OP`, `bracket Q1 | Q2`,
/// `structconsts Q1 | Q2 | ...`.
pub fn run_batch(text: &str) -> Vec<Report> {
    let mut args = PdeArgs {
        coords: "x,t".into(),
        dep: "u".into(),
        ..PdeArgs::default()
    };
    let mut ctx: Option<Context> = None;
    let mut reports = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let header = matches!(
            word,
            "catalog"
                | "coords"
                | "dependent"
                | "constant"
                | "matrix"
                | "solved"
                | "f"
                | "potential"
        );
        let result = if header {
            let done = if ctx.is_some() {
                Err(anyhow!("declaration after the first command"))
            } else {
                header_line(&mut args, word, rest)
            };
            done.map(|_| None)
        } else {
            let built = match ctx.take() {
                Some(c) => Ok(c),
                None => args.context(),
            };
            built.and_then(|c| {
                let out = batch_command(&c, word, rest);
                ctx = Some(c);
                out.map(Some)
            })
        };
        match result {
            Ok(Some(r)) => reports.push(r.input("line", lineno + 1)),
            Ok(None) => {}
            Err(e) => {
                let e = e.context(format!("line {}", lineno + 1));
                reports.push(Report::error(word, &e).input("line", lineno + 1));
            }
        }
    }
    reports
}

fn header_line(args: &mut PdeArgs, word: &str, rest: &str) -> Result<()> {
    let append = |slot: &mut Option<String>, v: &str| {
        *slot = Some(match slot.take() {
            Some(s) => format!("{s},{v}"),
            None => v.to_string(),
        });
    };
    match word {
        "catalog" => args.pde = Some(rest.to_string()),
        "coords" => args.coords = rest.to_string(),
        "dependent" => {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let (name, flags) = parts
                .split_first()
                .ok_or_else(|| anyhow!("`dependent` needs a name"))?;
            args.dep = name.to_string();
            for f in flags {
                match *f {
                    "scalar" => args.matrix = false,
                    "matrix" => args.matrix = true,
                    "invertible" => args.invertible = true,
                    other => bail!("unknown dependent attribute `{other}`"),
                }
            }
        }
        "constant" => append(&mut args.constants, rest),
        "matrix" => {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let entry = match parts.as_slice() {
                [name] => name.to_string(),
                [name, "invertible"] => format!("{name}!"),
                _ => bail!("expected `matrix NAME [invertible]`"),
            };
            append(&mut args.matrices, &entry);
        }
        "solved" => args.solved = Some(rest.to_string()),
        "f" => args.f = Some(rest.to_string()),
        "potential" => args.potential.push(rest.to_string()),
        _ => unreachable!(),
    }
    Ok(())
}

fn batch_command(ctx: &Context, word: &str, rest: &str) -> Result<Report> {
    let parts: Vec<&str> = rest.split('|').map(str::trim).collect();
    let want = |n: usize| -> Result<()> {
        if parts.len() != n {
            bail!("`{word}` takes {n} argument(s) separated by `|`");
        }
        Ok(())
    };
    let r = match word {
        "check" => {
            want(1)?;
            check(ctx, parts[0], &AnsatzConfig::default())?.input("q", parts[0])
        }
        "certify" => {
            want(2)?;
            certify(ctx, parts[0], parts[1])?
                .input("q", parts[0])
                .input("op", parts[1])
        }
        "bracket" => {
            want(2)?;
            bracket(ctx, parts[0], parts[1])?
                .input("q1", parts[0])
                .input("q2", parts[1])
        }
        "structconsts" => {
            let joined = parts.join(";");
            structconsts(ctx, &joined)?.input("basis", rest)
        }
        "reduce" => {
            want(1)?;
            reduce(ctx, parts[0])?.input("expr", parts[0])
        }
        "bt-apply" => {
            want(1)?;
            bt(ctx, parts[0], 2)?.input("phi", parts[0])
        }
        "parse" => {
            want(1)?;
            parse(ctx, parts[0])?.input("expr", parts[0])
        }
        other => bail!("unknown command `{other}`"),
    };
    Ok(r)
}

/// Runs the parsed command line; returns the printed output and exit status.
pub fn run(cli: &Cli) -> (String, i32) {
    let reports = match &cli.command {
        Command::Run { file } => match std::fs::read_to_string(file)
            .with_context(|| format!("reading {}", file.display()))
        {
            Ok(text) => run_batch(&text),
            Err(e) => vec![Report::error("run", &e)],
        },
        cmd => vec![execute(cmd).unwrap_or_else(|e| Report::error(command_name(cmd), &e))],
    };
    let status = reports.iter().map(|r| r.status).max().unwrap_or(EXIT_OK);
    let sep = if cli.json || reports.len() < 2 {
        "\n"
    } else {
        "\n\n"
    };
    let out = reports
        .iter()
        .map(|r| r.render(cli.json))
        .collect::<Vec<_>>()
        .join(sep);
    (out, status)
}
