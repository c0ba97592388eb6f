//! Command-line front end: parsing, configuration, dispatch and exit codes.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use wavesym::classif::{
    builtin_catalog, table_scan, verify_adjoint_actions, verify_case_with, verify_equivalence_algebra,
    verify_equivalence_group, verify_potential_link, verify_reductions, verify_subalgebra_lists, CaseReport, Settings,
    Status, VerificationReport, SUITES,
};
use wavesym::detsys::{check_symmetry, generate_determining_system, solve_within_ansatz, AnsatzBasis, ClassSpec};
use wavesym::expr::{set_default_config, SampleConfig, Verdict, JET_CAP};
use wavesym::vecfield::{prolong2, transform_equation, PointTransform, Space};
use wavesym::{Chart, Expr, VectorField};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wavesym", version, about = "Symbolic checks for u_tt = f(x,u_x) u_xx + g(x,u_x)")]
pub struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Points per sampled zero test.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Parameter samples per catalog entry.
    #[arg(long, global = true)]
    pub case_samples: Option<usize>,
    /// Highest jet order accepted in input expressions.
    #[arg(long, global = true)]
    pub jet_cap: Option<u8>,
    /// Worker threads for `verify`; 1 runs single-threaded.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lie bracket of two fields written as `coef@coord + ...`.
    Bracket {
        v: String,
        w: String,
        /// Fields live on (t,x,u,u_x,f,g).
        #[arg(long)]
        augmented: bool,
    },
    /// Second prolongation of a field on (t,x,u).
    Prolong { q: String },
    /// Determining equations for symbolic or given f, g.
    Detsys {
        #[arg(short)]
        f: Option<String>,
        #[arg(short)]
        g: Option<String>,
    },
    /// Check that a field is a point symmetry.
    Check {
        #[arg(short)]
        f: String,
        #[arg(short)]
        g: String,
        #[arg(short = 'Q')]
        q: String,
    },
    /// Dimension of the symmetry algebra within the ansatz.
    Dim {
        #[arg(short)]
        f: String,
        #[arg(short)]
        g: String,
        /// TOML file with `tau`, `xi`, `eta` string arrays.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Change variables in the equation.
    Transform {
        /// TOML file with `t`, `x`, `u1`, `u0` and optionally `x_inverse`, `positive`.
        #[arg(long)]
        params: PathBuf,
        #[arg(short)]
        f: String,
        #[arg(short)]
        g: String,
    },
    /// Run verification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Restrict the table suite to these catalog ids.
        #[arg(long = "case")]
        cases: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table,
    Algebra,
    Adjoint,
    Reductions,
    Potential,
    Subalgebras,
    Group,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Table => "table",
            Suite::Algebra => "algebra",
            Suite::Adjoint => "adjoint",
            Suite::Reductions => "reductions",
            Suite::Potential => "potential",
            Suite::Subalgebras => "subalgebras",
            Suite::Group => "group",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    #[serde(default)]
    pub tau: Vec<String>,
    #[serde(default)]
    pub xi: Vec<String>,
    #[serde(default)]
    pub eta: Vec<String>,
}

/// Settings file; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub case_samples: Option<usize>,
    pub jet_cap: Option<u8>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    /// Replaces the default ansatz for `dim` and `verify`.
    pub basis: Option<BasisFile>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Clone, Debug)]
struct Resolved {
    seed: u64,
    samples: usize,
    case_samples: usize,
    jet_cap: u8,
    threads: usize,
    output: Option<PathBuf>,
    format: Format,
    basis: AnsatzBasis,
}

fn resolve(cli: &Cli) -> Result<Resolved, String> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let basis = match &cfg.basis {
        Some(b) => basis_from(b)?,
        None => AnsatzBasis::default(),
    };
    let defaults = SampleConfig::default();
    Ok(Resolved {
        seed: cli.seed.or(cfg.seed).unwrap_or(defaults.seed),
        samples: cli.samples.or(cfg.samples).unwrap_or(defaults.samples),
        case_samples: cli.case_samples.or(cfg.case_samples).unwrap_or(3),
        jet_cap: cli.jet_cap.or(cfg.jet_cap).unwrap_or(JET_CAP),
        threads: cli.threads.or(cfg.threads).unwrap_or(0),
        output: cli.output.clone().or(cfg.output),
        format: cli.format.or(cfg.format).unwrap_or(Format::Text),
        basis,
    })
}

fn basis_from(b: &BasisFile) -> Result<AnsatzBasis, String> {
    fn v(xs: &[String]) -> Vec<&str> {
        xs.iter().map(String::as_str).collect()
    }
    AnsatzBasis::parse(&v(&b.tau), &v(&b.xi), &v(&b.eta)).map_err(|e| e.to_string())
}

/// Failure with its exit status.
struct Exit(i32, String);

fn usage(e: impl std::fmt::Display) -> Exit {
    Exit(EXIT_USAGE, e.to_string())
}

fn exit_of(s: Status) -> i32 {
    match s {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Undecided => EXIT_UNDECIDED,
    }
}

/// Parse `argv` (including the program name), run, write to `out`/`err`, return the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok((code, text)) => {
            let r = match resolve(&cli).ok().and_then(|r| r.output) {
                Some(path) => std::fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match r {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(cli: &Cli) -> Result<(i32, String), Exit> {
    let cfg = resolve(cli).map_err(usage)?;
    set_default_config(SampleConfig { seed: cfg.seed, samples: cfg.samples, ..SampleConfig::default() });
    let chart = Chart::base().with_jet_cap(cfg.jet_cap);
    let expr = |s: &str| chart.parse(s).map_err(|e| usage(format!("{s}: {e}")));
    match &cli.command {
        Command::Bracket { v, w, augmented } => {
            let (space, ch) = if *augmented { (Space::Augmented, Chart::augmented()) } else { (Space::Base, chart.clone()) };
            let a = VectorField::parse(v, space, &ch).map_err(usage)?;
            let b = VectorField::parse(w, space, &ch).map_err(usage)?;
            let r = a.bracket(&b).map_err(usage)?;
            Ok((EXIT_PASS, format!("{r}\n")))
        }
        Command::Prolong { q } => {
            let q = VectorField::parse(q, Space::Base, &chart).map_err(usage)?;
            let pr = prolong2(&q).map_err(|e| Exit(EXIT_FAIL, e.to_string()))?;
            let mut s = String::new();
            for (n, e) in [("eta^t", &pr.eta_t), ("eta^x", &pr.eta_x), ("eta^tt", &pr.eta_tt), ("eta^tx", &pr.eta_tx), ("eta^xx", &pr.eta_xx)]
            {
                s.push_str(&format!("{n} = {e}\n"));
            }
            Ok((EXIT_PASS, s))
        }
        Command::Detsys { f, g } => {
            let spec = match (f, g) {
                (None, None) => ClassSpec::symbolic(),
                (Some(f), Some(g)) => ClassSpec::new(expr(f)?, expr(g)?),
                _ => return Err(usage("give both -f and -g, or neither")),
            };
            let sys = generate_determining_system(&spec).map_err(|e| Exit(EXIT_FAIL, e.to_string()))?;
            let mut s = String::new();
            for l in sys.split_log() {
                s.push_str(&format!("# {l}\n"));
            }
            for l in sys.lines() {
                s.push_str(&l);
                s.push('\n');
            }
            Ok((EXIT_PASS, s))
        }
        Command::Check { f, g, q } => {
            let q = VectorField::parse(q, Space::Base, &chart).map_err(usage)?;
            let chk = check_symmetry(&expr(f)?, &expr(g)?, &q).map_err(|e| Exit(EXIT_FAIL, e.to_string()))?;
            let status = Status::of(&chk.verdict);
            let text = match cfg.format {
                Format::Json => {
                    let v = serde_json::json!({
                        "status": status.as_str(),
                        "verdict": chk.verdict,
                        "residual": chk.residual.to_string(),
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                Format::Text => {
                    let mut s = format!("{}\n", status.as_str());
                    if !chk.residual.is_zero() {
                        s.push_str(&format!("residual: {}\n", chk.residual));
                    }
                    if let Verdict::Nonzero { point, value } = &chk.verdict {
                        let pt: Vec<String> = point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        s.push_str(&format!("value {value} at {}\n", pt.join(", ")));
                    }
                    s
                }
            };
            Ok((exit_of(status), text))
        }
        Command::Dim { f, g, basis } => {
            let basis = match basis {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                    let b: BasisFile = toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                    basis_from(&b).map_err(usage)?
                }
                None => cfg.basis.clone(),
            };
            let sol = solve_within_ansatz(&expr(f)?, &expr(g)?, &basis).map_err(|e| Exit(EXIT_FAIL, e.to_string()))?;
            let text = match cfg.format {
                Format::Json => {
                    let fields: Vec<String> = sol.fields.iter().map(|q| q.to_string()).collect();
                    let v = serde_json::json!({ "dimension_within_ansatz": sol.dimension, "fields": fields });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                Format::Text => {
                    let mut s = format!("dimension within ansatz: {}\n", sol.dimension);
                    for q in &sol.fields {
                        s.push_str(&format!("  {q}\n"));
                    }
                    s
                }
            };
            Ok((EXIT_PASS, text))
        }
        Command::Transform { params, f, g } => {
            let text = std::fs::read_to_string(params).map_err(|e| usage(format!("{}: {e}", params.display())))?;
            let tp: TransformFile = toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", params.display())))?;
            let mut pt = PointTransform::new(expr(&tp.t)?, expr(&tp.x)?, expr(&tp.u1)?, expr(&tp.u0)?).map_err(usage)?;
            if let Some(inv) = &tp.x_inverse {
                pt = pt.with_inverse(expr(inv)?);
            }
            if tp.positive {
                pt = pt.with_positive_x();
            }
            let r = transform_equation(&pt, &expr(f)?, &expr(g)?).map_err(|e| Exit(EXIT_FAIL, e.to_string()))?;
            let show = |e: &Option<Expr>| e.as_ref().map_or("(no inverse given)".to_string(), |e| e.to_string());
            let s = format!(
                "f~(old variables) = {}\ng~(old variables) = {}\nf~ = {}\ng~ = {}\n",
                r.f_old,
                r.g_old,
                show(&r.f_new),
                show(&r.g_new)
            );
            Ok((EXIT_PASS, s))
        }
        Command::Verify { suite, cases } => {
            let report = run_verify(*suite, cases, &cfg)?;
            let mut text = match cfg.format {
                Format::Json => format!("{}\n", report.to_json()),
                Format::Text => report.summary_table(),
            };
            let mut status = report.status();
            if matches!(suite, Suite::Table | Suite::All) && cases.is_empty() {
                let (line, ok) = coverage(&report);
                if !ok {
                    status = Status::Fail;
                }
                if cfg.format == Format::Text {
                    text.push_str(&line);
                    text.push('\n');
                }
            }
            Ok((exit_of(status), text))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformFile {
    t: String,
    x: String,
    u1: String,
    u0: String,
    x_inverse: Option<String>,
    #[serde(default)]
    positive: bool,
}

/// Footer asserting that every catalog entry was verified exactly once.
fn coverage(r: &VerificationReport) -> (String, bool) {
    let cat: BTreeSet<String> = builtin_catalog().into_iter().map(|c| c.id).collect();
    let seen: Vec<&str> = r
        .cases
        .iter()
        .filter_map(|c| {
            let id = c.id.strip_prefix("table/").unwrap_or(&c.id);
            (cat.contains(id)).then_some(id)
        })
        .collect();
    let unique: BTreeSet<&str> = seen.iter().copied().collect();
    let ok = seen.len() == cat.len() && unique.len() == cat.len();
    (format!("catalog coverage: {} of {} entries verified, {} distinct", seen.len(), cat.len(), unique.len()), ok)
}

fn settings(cfg: &Resolved) -> Settings {
    Settings { seed: cfg.seed, samples: cfg.case_samples, basis: cfg.basis.clone() }
}

fn table(cfg: &Resolved, only: &[String]) -> Result<VerificationReport, Exit> {
    let cat = builtin_catalog();
    let s = settings(cfg);
    let chosen: Vec<_> = if only.is_empty() {
        cat.clone()
    } else {
        let mut v = Vec::new();
        for id in only {
            match cat.iter().find(|c| &c.id == id) {
                Some(c) => v.push(c.clone()),
                None => return Err(usage(format!("unknown catalog id {id}"))),
            }
        }
        v
    };
    let work = || chosen.par_iter().map(|c| verify_case_with(c, &s)).collect::<Vec<CaseReport>>();
    let mut reports = if cfg.threads == 1 {
        chosen.iter().map(|c| verify_case_with(c, &s)).collect()
    } else if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build().map_err(usage)?;
        pool.install(work)
    } else {
        work()
    };
    if only.is_empty() {
        reports.push(table_scan(&cat));
    }
    Ok(VerificationReport::new("table", reports))
}

fn run_verify(suite: Suite, only: &[String], cfg: &Resolved) -> Result<VerificationReport, Exit> {
    if !only.is_empty() && suite != Suite::Table {
        return Err(usage("--case applies to the table suite only"));
    }
    let s = settings(cfg);
    let one = |name: &str| -> Result<VerificationReport, Exit> {
        Ok(match name {
            "table" => table(cfg, only)?,
            "algebra" => verify_equivalence_algebra(&s),
            "adjoint" => verify_adjoint_actions(&s),
            "reductions" => verify_reductions(&s),
            "potential" => verify_potential_link(&s),
            "subalgebras" => verify_subalgebra_lists(&s),
            "group" => verify_equivalence_group(&s),
            other => return Err(usage(format!("unknown suite {other}"))),
        })
    };
    if suite == Suite::All {
        let parts = SUITES.iter().map(|n| one(n)).collect::<Result<Vec<_>, _>>()?;
        Ok(VerificationReport::merge("all", parts))
    } else {
        one(suite.name())
    }
}
