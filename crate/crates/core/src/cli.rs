//! Command-line front end. Exit codes are a stable contract:
//! 0 success, 1 property fails, 2 hypothesis gate, 3 retries exhausted,
//! 4 I/O or parse error, 5 inconclusive.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certify::{
    certify_superstable, ggr_report_with_budget, GgrReport, SuperStabilityCertificate,
};
use crate::construct::{
    bolker_roth_dim, build_core, build_kmn_with_budget, ConstructionAudit, Core, RandomSource,
    DEFAULT_RETRY_BUDGET,
};
use crate::exactmat::{format_rational, parse_rational};
use crate::framework::Framework;
use crate::rigidity::{is_infinitesimally_rigid, maxwell_audit, stress_basis, StressVector};
use crate::selftest::run_selftest;
use crate::veronese::{hull_relation, HullStatus};
use crate::{to_canonical_json, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_GATE: i32 = 2;
pub const EXIT_RETRY: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_INCONCLUSIVE: i32 = 5;

pub const RETRY_BUDGET_ENV: &str = "RIGIDCERT_RETRY_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "rigidcert",
    version,
    about = "Exact certificates for rigidity of complete bipartite frameworks"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Progress and timing on stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Superstable,
    Infrigid,
    Maxwell,
    BolkerRoth,
    Hulls,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a realization of K_{m,n} in dimension d and audit it.
    Construct {
        #[arg(short)]
        d: usize,
        #[arg(short, required_unless_present = "core")]
        m: Option<usize>,
        #[arg(short, required_unless_present = "core")]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only build and certify the alternating K_{d+1,d+1} core.
        #[arg(long)]
        core: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check one property of a framework read from a JSON file.
    Certify {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Comma-separated stress in edge order (superstable only).
        #[arg(long, allow_hyphen_values = true)]
        stress: Option<String>,
        input: PathBuf,
    },
    /// Build K_{m,n} and emit the full report with computed and cited claims.
    Report {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in invariant suite for d <= 3.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Maps library errors onto the exit-code contract.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::GateFailure { .. }
        | Error::SpanHypothesis(_)
        | Error::NotCompleteBipartite
        | Error::TooFewVertices { .. }
        | Error::NoEdges
        | Error::StressSearchOutOfScope { .. } => EXIT_GATE,
        Error::RetryExhausted { .. } => EXIT_RETRY,
        Error::Framework(_)
        | Error::Mat(_)
        | Error::InvalidCoreSpec(_)
        | Error::StressLength { .. }
        | Error::NotEquilibrium { .. } => EXIT_IO,
        Error::CheckFailed(_) | Error::Internal(_) => EXIT_FAILS,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn io_failure(context: &str, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{context}: {e}"),
    }
}

struct Ctx<'a> {
    format: Format,
    verbose: u8,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn note(&mut self, level: u8, msg: &str) {
        if self.verbose >= level {
            let _ = writeln!(self.err, "{msg}");
        }
    }

    /// JSON goes to `path` when given, else stdout; text always goes to stdout.
    fn emit<T: Serialize>(
        &mut self,
        value: &T,
        text: &str,
        path: Option<&Path>,
    ) -> Result<(), Failure> {
        let json = to_canonical_json(value);
        if let Some(path) = path {
            std::fs::write(path, &json).map_err(|e| io_failure(&path.display().to_string(), e))?;
            self.note(1, &format!("wrote {}", path.display()));
        }
        let shown = match (self.format, path) {
            (Format::Text, _) => text.to_string(),
            (Format::Json, None) => json,
            (Format::Json, Some(_)) => return Ok(()),
        };
        self.out
            .write_all(shown.as_bytes())
            .map_err(|e| io_failure("stdout", e))
    }
}

fn retry_budget() -> Result<usize, Failure> {
    match std::env::var(RETRY_BUDGET_ENV) {
        Err(_) => Ok(DEFAULT_RETRY_BUDGET),
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| {
                io_failure(RETRY_BUDGET_ENV, format!("not a positive integer: {raw:?}"))
            }),
    }
}

fn row(label: &str, computed: impl std::fmt::Display, expected: impl std::fmt::Display) -> String {
    format!("{label:<28} {computed:<12} expected {expected}\n")
}

fn flag(label: &str, value: bool) -> String {
    format!("{label:<28} {value}\n")
}

fn audit_text(a: &ConstructionAudit) -> String {
    let mut s = format!(
        "K_{{{},{}}} in dimension {} (seed {})\n",
        a.m, a.n, a.d, a.seed
    );
    s += &row("stress dimension", a.stress_dim, a.stress_dim_expected);
    s += &row(
        "Bolker–Roth count",
        a.bolker_roth_dim,
        a.stress_dim_expected,
    );
    s += &row("rigidity rank", a.rigidity_rank, a.rigidity_rank_expected);
    s += &row(
        "Veronese span",
        a.veronese_span_dim,
        crate::construct::veronese_dim(a.d),
    );
    s += &flag("core super stable", a.core_superstable);
    s += &flag("general position", a.general_position);
    s += &flag("infinitesimally rigid", a.inf_rigid);
    s += &format!("{:<28} {}\n", "retries used", a.retries_used);
    s
}

fn certificate_text(c: &SuperStabilityCertificate) -> String {
    let mut s = row("affine span", c.span_dim, c.dimension);
    s += &row("stress matrix rank", c.stress_matrix_rank, c.expected_rank);
    s += &flag("stress matrix PSD", c.psd.is_psd);
    s += &row(
        "direction conic rank",
        c.conic.direction_veronese_rank,
        c.conic.max_rank,
    );
    let stress: Vec<String> = c.stress.0.iter().map(format_rational).collect();
    s += &format!("{:<28} [{}]\n", "stress", stress.join(", "));
    s += &flag("super stable", c.verdict);
    s
}

#[derive(Serialize)]
struct ConstructOutput<'a> {
    seed: u64,
    framework: &'a Framework,
    audit: &'a ConstructionAudit,
}

#[derive(Serialize)]
struct CoreOutput<'a> {
    seed: u64,
    #[serde(flatten)]
    core: &'a Core,
}

fn cmd_construct(
    ctx: &mut Ctx,
    d: usize,
    m: Option<usize>,
    n: Option<usize>,
    seed: u64,
    core_only: bool,
    output: Option<&Path>,
) -> Result<i32, Failure> {
    if core_only {
        let core = build_core(d, None)?;
        let text = format!("alternating core K_{{{0},{0}}} in dimension {d}\n", d + 1)
            + &certificate_text(&core.certificate);
        ctx.emit(&CoreOutput { seed, core: &core }, &text, output)?;
        return Ok(if core.certificate.verdict {
            EXIT_OK
        } else {
            EXIT_FAILS
        });
    }
    let (m, n) = (m.expect("clap enforces -m"), n.expect("clap enforces -n"));
    let budget = retry_budget()?;
    let built = build_kmn_with_budget(d, m, n, &mut RandomSource::new(seed), budget)?;
    ctx.note(
        1,
        &format!("construction used {} retries", built.audit.retries_used),
    );
    let payload = ConstructOutput {
        seed,
        framework: &built.framework,
        audit: &built.audit,
    };
    ctx.emit(&payload, &audit_text(&built.audit), output)?;
    Ok(if built.audit.passes() {
        EXIT_OK
    } else {
        EXIT_FAILS
    })
}

/// Accepts a bare framework or any object carrying it under `"framework"`,
/// so construct and report outputs can be fed back in directly.
pub fn read_framework(path: &Path) -> Result<(Framework, Option<u64>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let seed = value.get("seed").and_then(serde_json::Value::as_u64);
    let inner = match value.get("framework") {
        Some(f) => f.to_string(),
        None => text,
    };
    Framework::from_json(&inner)
        .map(|f| (f, seed))
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_stress(raw: &str) -> Result<StressVector, Failure> {
    raw.split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map(StressVector)
        .map_err(|e| io_failure("--stress", e))
}

#[derive(Serialize)]
struct Certified<T: Serialize> {
    seed: Option<u64>,
    kind: &'static str,
    holds: bool,
    result: T,
}

fn cmd_certify(
    ctx: &mut Ctx,
    kind: Kind,
    stress: Option<&str>,
    input: &Path,
) -> Result<i32, Failure> {
    let (f, seed) = read_framework(input).map_err(|message| Failure {
        code: EXIT_IO,
        message,
    })?;
    if stress.is_some() && kind != Kind::Superstable {
        return Err(io_failure("--stress", "only valid with --kind superstable"));
    }
    match kind {
        Kind::Superstable => {
            let stress = stress.map(parse_stress).transpose()?;
            let cert = certify_superstable(&f, stress.as_ref())?;
            let text = certificate_text(&cert);
            let holds = cert.verdict;
            ctx.emit(
                &Certified {
                    seed,
                    kind: "superstable",
                    holds,
                    result: cert,
                },
                &text,
                None,
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_FAILS })
        }
        Kind::Infrigid => {
            let r = is_infinitesimally_rigid(&f)?;
            let text = row("rigidity rank", r.rank, r.expected_rank)
                + &row(
                    "affine span",
                    r.span_dim,
                    f.dimension().min(f.vertex_count() - 1),
                )
                + &flag("infinitesimally rigid", r.rigid);
            let holds = r.rigid;
            ctx.emit(
                &Certified {
                    seed,
                    kind: "infrigid",
                    holds,
                    result: r,
                },
                &text,
                None,
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_FAILS })
        }
        Kind::Maxwell => {
            let a = maxwell_audit(&f)?;
            let lhs = a.m_edges as i64 - (a.d * a.n_vertices) as i64;
            let rhs = a.s as i64 - a.f as i64;
            let text = format!(
                "m = {}  r = {}  s = {}  f = {}  d·n = {}\n",
                a.m_edges,
                a.r,
                a.s,
                a.f,
                a.d * a.n_vertices
            ) + &row("m − d·n vs s − f", lhs, rhs)
                + &row("nontrivial flexes", a.nontrivial_flexes, 0)
                + &flag("identity holds", a.identity_holds);
            let holds = a.identity_holds;
            ctx.emit(
                &Certified {
                    seed,
                    kind: "maxwell",
                    holds,
                    result: a,
                },
                &text,
                None,
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_FAILS })
        }
        Kind::BolkerRoth => {
            let br = bolker_roth_dim(&f)?;
            let direct = stress_basis(&f)?.len();
            let text = format!(
                "Gale ranks: U {}, V {}, Veronese {}\n",
                br.gale_rank_u, br.gale_rank_v, br.gale_rank_veronese
            ) + &row("Bolker–Roth count", br.dimension, direct);
            let holds = br.dimension == direct;
            #[derive(Serialize)]
            struct Out {
                #[serde(flatten)]
                count: crate::construct::BolkerRothDim,
                stress_dim: usize,
            }
            let result = Out {
                count: br,
                stress_dim: direct,
            };
            ctx.emit(
                &Certified {
                    seed,
                    kind: "bolker-roth",
                    holds,
                    result,
                },
                &text,
                None,
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_FAILS })
        }
        Kind::Hulls => {
            let (p, q) = f.part_points().ok_or(Error::NotCompleteBipartite)?;
            let r = hull_relation(&p, &q, f.dimension())?;
            let status = to_canonical_json(&r.status);
            let mut text = format!("hull relation: {}", status.trim().trim_matches('"'));
            if let Some(t) = &r.t_star {
                text += &format!(" (t* = {})", format_rational(t));
            }
            text.push('\n');
            if let Some(q) = &r.separating_quadric {
                text += &format!("separating quadric:\n{q}\n");
            }
            let code = match r.status {
                HullStatus::RelativeInteriorIntersect => EXIT_OK,
                HullStatus::DisjointStrictlySeparable => EXIT_FAILS,
                HullStatus::BoundaryInconclusive => EXIT_INCONCLUSIVE,
            };
            ctx.emit(
                &Certified {
                    seed,
                    kind: "hulls",
                    holds: code == EXIT_OK,
                    result: r,
                },
                &text,
                None,
            )?;
            Ok(code)
        }
    }
}

fn report_text(r: &GgrReport) -> String {
    let mut s = audit_text(&r.audit);
    s += "claims:\n";
    for c in &r.claims {
        let basis = match c.basis {
            crate::certify::ClaimBasis::Computed => "COMPUTED",
            crate::certify::ClaimBasis::Theorem => "THEOREM",
        };
        s += &format!("  [{basis:<8}] {:<5} {}\n", c.holds, c.fact);
        if let Some(cite) = &c.citation {
            s += &format!("                   ({cite})\n");
        }
    }
    s
}

fn cmd_report(
    ctx: &mut Ctx,
    d: usize,
    m: usize,
    n: usize,
    seed: u64,
    output: Option<&Path>,
) -> Result<i32, Failure> {
    let report = ggr_report_with_budget(d, m, n, seed, retry_budget()?)?;
    ctx.emit(&report, &report_text(&report), output)?;
    Ok(if report.all_hold() {
        EXIT_OK
    } else {
        EXIT_FAILS
    })
}

fn cmd_selftest(ctx: &mut Ctx, seed: u64) -> Result<i32, Failure> {
    let report = run_selftest(seed);
    let mut text = String::new();
    for c in &report.cases {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        text += &format!("{mark} {} ({} ms): {}\n", c.name, c.millis, c.detail);
    }
    ctx.emit(&report, &text, None)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILS })
}

/// Runs the CLI with explicit streams; returns the exit code.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        verbose: cli.verbose,
        out,
        err,
    };
    let started = std::time::Instant::now();
    let result = match &cli.command {
        Command::Construct {
            d,
            m,
            n,
            seed,
            core,
            output,
        } => cmd_construct(&mut ctx, *d, *m, *n, *seed, *core, output.as_deref()),
        Command::Certify {
            kind,
            stress,
            input,
        } => cmd_certify(&mut ctx, *kind, stress.as_deref(), input),
        Command::Report {
            d,
            m,
            n,
            seed,
            output,
        } => cmd_report(&mut ctx, *d, *m, *n, *seed, output.as_deref()),
        Command::Selftest { seed } => cmd_selftest(&mut ctx, *seed),
    };
    ctx.note(
        2,
        &format!("finished in {:.3}s", started.elapsed().as_secs_f64()),
    );
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}
