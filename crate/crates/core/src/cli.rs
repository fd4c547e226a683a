//! Command-line front end.
//!
//! Every command produces a [`Report`]. Its canonical part (everything but
//! `timing`) is byte-identical across runs with equal flags.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{jacobi_check, lemma41_relations, AlgebraSelection, AlgebraSpec, Degree, Variant, Window};
use crate::halfderiv::{self, ClosedFormMap, DegreeFunction};
use crate::par::*;
use crate::scalars::Scalar;
use crate::tpa::{self, CenterFunctional, ProductTable, TableEntry};
use crate::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "halfder", version, about = "Exact ½-derivation and transposed Poisson checks on q-analog Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Antisymmetry and Jacobi identity on a window.
    Jacobi(CommonArgs),
    /// Windowed ½-derivation dimensions per degree shift.
    Solve(CommonArgs),
    /// Check a closed-form candidate map.
    Verify(VerifyArgs),
    /// Transposed Poisson structures.
    Tpa {
        #[command(subcommand)]
        command: TpaCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum TpaCommand {
    /// Check a product table read from JSON.
    Verify(TpaVerifyArgs),
    /// Build and check a rank-one center product.
    Example(TpaExampleArgs),
    /// Solve for all compatible symmetric products.
    Probe(CommonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CandidateName {
    Identity,
    #[value(name = "thmF")]
    ThmF,
    #[value(name = "thmH")]
    ThmH,
    TorusGeneric,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long, value_parser = parse_variant)]
    pub algebra: Variant,
    /// Generic deformation parameter, a nonzero rational other than ±1.
    #[arg(long)]
    pub q: Option<String>,
    /// Order of the root of unity.
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long, default_value_t = 4)]
    pub window: u32,
    /// Interior bound; defaults to window - 2.
    #[arg(long)]
    pub interior: Option<u32>,
    /// Shift bound (degree shifts for `solve`, product shifts for `tpa probe`).
    #[arg(long)]
    pub shifts: Option<u32>,
    #[arg(long)]
    pub expect_dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub candidate: CandidateName,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    /// Degree shift of the candidate, e.g. `(3,0)`.
    #[arg(long, value_parser = parse_degree)]
    pub shift: Option<Degree>,
    /// Coefficient on central degrees.
    #[arg(long)]
    pub center: Option<String>,
    /// Override on one central degree, e.g. `(3,0)=2`; repeatable.
    #[arg(long)]
    pub center_at: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct TpaVerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// JSON list of entries `{a, a_tag, b, b_tag, terms: [{degree, tag, coeff}]}`.
    #[arg(long)]
    pub table: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TpaExampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Functional value on a central degree, e.g. `(3,0)=1`; repeatable.
    #[arg(long)]
    pub tau: Vec<String>,
    /// Central target degree.
    #[arg(long, value_parser = parse_degree)]
    pub v: Option<Degree>,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_degree(s: &str) -> std::result::Result<Degree, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Output of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub violations: Vec<Value>,
    pub passed: bool,
    /// `None` when no `--expect-dim` was given.
    pub expectation_met: Option<bool>,
    pub csv: Vec<Vec<String>>,
    pub wall_clock_ms: u128,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed && self.expectation_met != Some(false) {
            0
        } else {
            1
        }
    }

    pub fn canonical(&self) -> Value {
        json!({
            "tool": "halfder",
            "toolVersion": TOOL_VERSION,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "violations": self.violations,
            "passed": self.passed,
            "expectationMet": self.expectation_met,
        })
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).unwrap()
    }

    pub fn to_json(&self) -> String {
        let mut v = self.canonical();
        v["timing"] = json!({ "wallClockMs": self.wall_clock_ms as u64 });
        serde_json::to_string_pretty(&v).unwrap()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.csv {
            let cells: Vec<String> = row
                .iter()
                .map(|c| if c.contains([',', '"']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

impl CommonArgs {
    fn spec(&self) -> Result<AlgebraSpec> {
        AlgebraSpec::from_selection(&AlgebraSelection { variant: self.algebra, q: self.q.clone(), t: self.t })
    }

    fn window(&self) -> Result<Window> {
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        Ok(Window::new(self.window))
    }

    fn interior(&self) -> Result<u32> {
        let m = self.interior.unwrap_or(self.window.saturating_sub(2).max(1));
        if m >= self.window {
            return Err(Error::InvalidInterior { interior: m, window: self.window });
        }
        Ok(m)
    }

    fn config(&self, spec: &AlgebraSpec) -> Value {
        json!({
            "algebra": spec.selection(),
            "window": self.window,
            "interior": self.interior,
            "shifts": self.shifts,
            "expectDim": self.expect_dim,
        })
    }

    fn expect(&self, found: usize) -> Option<bool> {
        self.expect_dim.map(|e| e == found)
    }
}

fn param(spec: &AlgebraSpec, s: &Option<String>, default: &str) -> Result<Scalar> {
    spec.field().parse(s.as_deref().unwrap_or(default))
}

fn degree_values(spec: &AlgebraSpec, items: &[String]) -> Result<BTreeMap<Degree, Scalar>> {
    items
        .iter()
        .map(|it| {
            let (d, v) = it
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected DEGREE=VALUE, got `{it}`")))?;
            Ok((d.trim().parse()?, spec.field().parse(v)?))
        })
        .collect()
}

pub fn cmd_jacobi(args: &CommonArgs) -> Result<Report> {
    let start = Instant::now();
    let spec = args.spec()?;
    let w = args.window()?;
    let rep = jacobi_check(&spec, spec.field(), &w)?;
    let mut passed = rep.passed();
    let mut results = json!({
        "pairsChecked": rep.pairs_checked,
        "triplesChecked": rep.triples_checked,
        "antisymmetryViolations": rep.antisymmetry_violations.len(),
        "jacobiViolations": rep.jacobi_violations.len(),
    });
    let mut csv = vec![
        vec!["check".into(), "value".into()],
        vec!["pairs_checked".into(), rep.pairs_checked.to_string()],
        vec!["triples_checked".into(), rep.triples_checked.to_string()],
        vec!["antisymmetry_violations".into(), rep.antisymmetry_violations.len().to_string()],
        vec!["jacobi_violations".into(), rep.jacobi_violations.len().to_string()],
    ];
    if spec.variant() == Variant::TorusGeneric {
        let rel = lemma41_relations(&spec)?;
        let failed = rel.iter().filter(|r| !r.holds).count();
        passed &= failed == 0;
        csv.push(vec!["relations_failed".into(), failed.to_string()]);
        results["relations"] = serde_json::to_value(&rel).unwrap();
    }
    let mut violations: Vec<Value> = rep.antisymmetry_violations.iter().map(|v| json!({"kind": "antisymmetry", "witness": v})).collect();
    violations.extend(rep.jacobi_violations.iter().map(|v| json!({"kind": "jacobi", "witness": v})));
    Ok(Report {
        command: "jacobi".into(),
        config: args.config(&spec),
        results,
        violations,
        passed,
        expectation_met: None,
        csv,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

pub fn cmd_solve(args: &CommonArgs) -> Result<Report> {
    let start = Instant::now();
    let spec = args.spec()?;
    let w = args.window()?;
    let m = args.interior()?;
    let list = halfderiv::shifts(args.shifts.unwrap_or(1));
    let solved: Vec<_> = list
        .par_iter()
        .map(|&i| halfderiv::solve_shift(&spec, &w, i, m).map(|(d, b, sys)| (i, d, b, sys)))
        .collect::<Result<_>>()?;

    let field = spec.field();
    let mut rows = Vec::new();
    let mut csv = vec![vec!["shift".into(), "full_dim".into(), "interior_dim".into()]];
    let mut total = 0;
    let mut soundness_failures = Vec::new();
    for (i, dims, basis, sys) in &solved {
        total += dims.interior;
        csv.push(vec![i.to_string(), dims.full.to_string(), dims.interior.to_string()]);
        let vectors: Vec<Value> = basis
            .vectors
            .iter()
            .map(|v| {
                Value::Array(
                    v.iter()
                        .map(|(c, x)| json!({"unknown": sys.layout.label(*c), "target": sys.layout.entries[*c].1, "coeff": field.format(x)}))
                        .collect(),
                )
            })
            .collect();
        if (0..basis.dim()).any(|k| !sys.is_satisfied_by(&basis.dense(k))) {
            soundness_failures.push(json!({"kind": "resubstitution", "shift": i.to_string()}));
        }
        rows.push(json!({
            "shift": i.to_string(),
            "unknowns": sys.layout.len(),
            "rows": sys.matrix.rows.len(),
            "fullDim": dims.full,
            "interiorDim": dims.interior,
            "basis": vectors,
        }));
    }
    let results = json!({
        "interior": m,
        "shifts": rows,
        "totalInteriorDim": total,
    });
    Ok(Report {
        command: "solve".into(),
        config: args.config(&spec),
        results,
        passed: soundness_failures.is_empty(),
        violations: soundness_failures,
        expectation_met: args.expect(total),
        csv,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

fn build_candidate(spec: &AlgebraSpec, args: &VerifyArgs) -> Result<(ClosedFormMap, Value)> {
    let need = |v: Variant| -> Result<()> {
        if spec.variant() == v {
            Ok(())
        } else {
            Err(Error::Config(format!("candidate {:?} requires --algebra {v}", args.candidate)))
        }
    };
    let field = spec.field();
    Ok(match args.candidate {
        CandidateName::Identity => (halfderiv::identity(), json!({"name": "identity"})),
        CandidateName::ThmF => {
            need(Variant::VirasoroRoot)?;
            let t = spec.t().unwrap();
            let kappa = param(spec, &args.kappa, "1")?;
            let center = DegreeFunction {
                default: param(spec, &args.center, "0")?,
                overrides: degree_values(spec, &args.center_at)?,
            };
            let shift = args.shift.unwrap_or(Degree::ZERO);
            let desc = json!({
                "name": "thmF",
                "shift": shift.to_string(),
                "kappa": field.format(&kappa),
                "center": field.format(&center.default),
                "centerAt": center.overrides.iter().map(|(d, v)| (d.to_string(), field.format(v))).collect::<BTreeMap<_, _>>(),
            });
            (halfderiv::thm_f_family(t, shift, kappa, center)?, desc)
        }
        CandidateName::ThmH => {
            need(Variant::TorusRoot)?;
            let a = param(spec, &args.a, "1")?;
            let c = param(spec, &args.c, "0")?;
            let desc = json!({"name": "thmH", "a": field.format(&a), "c": field.format(&c)});
            (halfderiv::thm_h_family(spec.t().unwrap(), a, c), desc)
        }
        CandidateName::TorusGeneric => {
            need(Variant::TorusGeneric)?;
            let c = param(spec, &args.c, "0")?;
            let d = param(spec, &args.d, "1")?;
            let desc = json!({"name": "torus-generic", "c": field.format(&c), "d": field.format(&d)});
            (halfderiv::torus_generic_family(c, d), desc)
        }
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report> {
    let start = Instant::now();
    let common = &args.common;
    let spec = common.spec()?;
    let w = common.window()?;
    let (phi, desc) = build_candidate(&spec, args)?;
    let rep = halfderiv::verify_candidate(&spec, &w, &phi)?;
    let mut config = common.config(&spec);
    config["candidate"] = desc;
    Ok(Report {
        command: "verify".into(),
        config,
        results: json!({
            "constraintsChecked": rep.constraints_checked,
            "violations": rep.violations.len(),
        }),
        violations: rep.violations.iter().map(|v| serde_json::to_value(v).unwrap()).collect(),
        passed: rep.passed(),
        expectation_met: None,
        csv: vec![
            vec!["check".into(), "value".into()],
            vec!["constraints_checked".into(), rep.constraints_checked.to_string()],
            vec!["violations".into(), rep.violations.len().to_string()],
        ],
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

fn table_checks(spec: &AlgebraSpec, w: &Window, p: &ProductTable) -> Result<(Value, Vec<Value>, bool, Vec<Vec<String>>)> {
    let ax = tpa::verify_axioms(spec, w, p)?;
    let mut results = json!({
        "commutativityOk": ax.commutativity_ok,
        "associativityTriples": ax.associativity_triples,
        "compatibilityTriples": ax.compatibility_triples,
        "triplesEvaluated": ax.triples_evaluated,
        "associativityViolations": ax.associativity_violations.len(),
        "compatibilityViolations": ax.compatibility_violations.len(),
    });
    let mut csv = vec![
        vec!["check".into(), "value".into()],
        vec!["associativity_violations".into(), ax.associativity_violations.len().to_string()],
        vec!["compatibility_violations".into(), ax.compatibility_violations.len().to_string()],
    ];
    let mut violations: Vec<Value> = ax.associativity_violations.iter().map(|v| json!({"kind": "associativity", "witness": v})).collect();
    violations.extend(ax.compatibility_violations.iter().map(|v| json!({"kind": "compatibility", "witness": v})));
    let mut passed = ax.passed();
    if spec.variant() == Variant::VirasoroRoot {
        let g = tpa::thm_g_check(spec, p)?;
        passed &= g.passed();
        csv.push(vec!["structure_violations".into(), g.violations.len().to_string()]);
        results["structure"] = json!({
            "pairsChecked": g.pairs_checked,
            "triplesChecked": g.triples_checked,
            "vanishingOk": g.vanishing_ok,
            "gamma2Ok": g.gamma2_ok,
            "gamma1Ok": g.gamma1_ok,
        });
        violations.extend(g.violations.iter().map(|v| json!({"kind": "structure", "witness": v})));
    }
    Ok((results, violations, passed, csv))
}

pub fn cmd_tpa_verify(args: &TpaVerifyArgs) -> Result<Report> {
    let start = Instant::now();
    let common = &args.common;
    let spec = common.spec()?;
    let w = common.window()?;
    let text = std::fs::read_to_string(&args.table)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.table.display())))?;
    let entries: Vec<TableEntry> = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("product table: {e}")))?;
    let p = ProductTable::from_entries(spec.field(), w, &entries)?;
    let (results, violations, passed, csv) = table_checks(&spec, &w, &p)?;
    let mut config = common.config(&spec);
    config["table"] = json!(args.table.display().to_string());
    Ok(Report {
        command: "tpa verify".into(),
        config,
        results,
        violations,
        passed,
        expectation_met: None,
        csv,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

pub fn cmd_tpa_example(args: &TpaExampleArgs) -> Result<Report> {
    let start = Instant::now();
    let common = &args.common;
    let spec = common.spec()?;
    if spec.variant() != Variant::VirasoroRoot {
        return Err(Error::Config("tpa example requires --algebra virasoro-root".into()));
    }
    let w = common.window()?;
    let t = spec.t().unwrap() as i64;
    let tau = if args.tau.is_empty() {
        CenterFunctional::indicator(Degree::new(t, 0))
    } else {
        CenterFunctional { coeffs: degree_values(&spec, &args.tau)? }
    };
    let v = args.v.unwrap_or(Degree::new(0, t));
    let p = tpa::rank_one_center_product(&spec, &w, &tau, v)?;
    let (mut results, violations, passed, csv) = table_checks(&spec, &w, &p)?;
    results["table"] = serde_json::to_value(p.to_json(spec.field())).unwrap();
    let mut config = common.config(&spec);
    config["tau"] = json!(tau.coeffs.iter().map(|(d, x)| (d.to_string(), spec.field().format(x))).collect::<BTreeMap<_, _>>());
    config["v"] = json!(v.to_string());
    Ok(Report {
        command: "tpa example".into(),
        config,
        results,
        violations,
        passed,
        expectation_met: None,
        csv,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

pub fn cmd_tpa_probe(args: &CommonArgs) -> Result<Report> {
    let start = Instant::now();
    let spec = args.spec()?;
    let w = args.window()?;
    let m = args.interior()?;
    let bound = args.shifts.unwrap_or_else(|| tpa::default_shift_bound(&spec));
    let r = tpa::triviality_probe(&spec, &w, m, bound)?;
    let per_shift: Vec<Value> = r
        .per_shift
        .iter()
        .map(|(s, d)| json!({"shift": s.to_string(), "fullDim": d.full, "interiorDim": d.interior}))
        .collect();
    let mut csv = vec![vec!["shift".into(), "full_dim".into(), "interior_dim".into()]];
    csv.extend(r.per_shift.iter().map(|(s, d)| vec![s.to_string(), d.full.to_string(), d.interior.to_string()]));
    let mut results = json!({
        "interior": m,
        "shiftBound": bound,
        "fullDim": r.full_dim,
        "interiorDim": r.interior_dim,
        "perShift": per_shift,
        "nonAssociative": r.non_associative,
        "gamma2Entries": r.gamma2_entries,
        "gamma2Flag": !r.gamma2_entries.is_empty(),
    });
    if r.basis.len() <= 50 {
        results["basis"] = Value::Array(r.basis.iter().map(|p| serde_json::to_value(p.to_json(spec.field())).unwrap()).collect());
    }
    let violations: Vec<Value> = r
        .gamma2_entries
        .iter()
        .map(|k| json!({"kind": "gamma2-product", "basisIndex": k}))
        .collect();
    let mut config = args.config(&spec);
    config["shifts"] = json!(bound);
    Ok(Report {
        command: "tpa probe".into(),
        config,
        results,
        violations,
        passed: true,
        expectation_met: args.expect(r.interior_dim),
        csv,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

fn common_of(cmd: &Command) -> &CommonArgs {
    match cmd {
        Command::Jacobi(a) | Command::Solve(a) => a,
        Command::Verify(v) => &v.common,
        Command::Tpa { command } => match command {
            TpaCommand::Verify(v) => &v.common,
            TpaCommand::Example(e) => &e.common,
            TpaCommand::Probe(p) => p,
        },
    }
}

pub fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Jacobi(a) => cmd_jacobi(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(v) => cmd_verify(v),
        Command::Tpa { command } => match command {
            TpaCommand::Verify(v) => cmd_tpa_verify(v),
            TpaCommand::Example(e) => cmd_tpa_example(e),
            TpaCommand::Probe(p) => cmd_tpa_probe(p),
        },
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("HALFDER_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("HALFDER_THREADS must be a positive integer, got `{v}`")))?;
    // a pool may already exist when called twice in one process
    #[cfg(feature = "parallel")]
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

/// Runs the command line and returns the process exit code.
/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                emit(&e.to_string());
                return 0;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments"));
            return 2;
        }
    };
    let report = configure_threads().and_then(|_| dispatch(&cli.command));
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let common = common_of(&cli.command);
    let text = match common.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => emit(&text),
    }
    report.exit_code()
}
