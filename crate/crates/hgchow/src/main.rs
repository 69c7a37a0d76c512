//! Command-line front end: compute the certified presentation, run the
//! verification suites, or reduce an expression in one of the presented
//! rings. Exit codes: 0 success, 1 failed check, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hgchow::hgpipe::{self, Report, Status, Suite};
use hgchow::ideal::{EngineOpts, DEFAULT_BUDGET};
use hgchow::parser::parse_poly;
use hgchow::rings::{build_ring, RingKind};

#[derive(Parser)]
#[command(
    name = "hgchow",
    about = "Integral Chow ring of the stack of odd-genus hyperelliptic curves: \
             compute the presentation, verify it lemma by lemma, or reduce \
             expressions in the intermediate rings."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Betas,
    Divisibility,
    Charts,
    Criterion,
    Theorem,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Betas => Suite::Betas,
            SuiteArg::Divisibility => Suite::Divisibility,
            SuiteArg::Charts => Suite::Charts,
            SuiteArg::Criterion => Suite::Criterion,
            SuiteArg::Theorem => Suite::Theorem,
        }
    }
}

#[derive(clap::Args)]
struct EngineArgs {
    /// Reduction-step limit for the ideal engine.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Basis cache directory (overrides HGCHOW_CACHE; empty disables).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl EngineArgs {
    fn opts(&self) -> EngineOpts {
        let cache_dir = match &self.cache_dir {
            Some(p) if p.as_os_str().is_empty() => None,
            Some(p) => Some(p.clone()),
            None => EngineOpts::default().cache_dir,
        };
        EngineOpts {
            budget: self.budget,
            cache_dir,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute and certify the presentation at an odd genus.
    Compute {
        #[arg(short = 'g', long = "genus")]
        genus: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run a verification suite at an odd genus.
    Verify {
        #[arg(short = 'g', long = "genus")]
        genus: i64,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Worker threads for independent checks (0 = all cores).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Reduce an expression to its canonical form in a presented ring.
    Reduce {
        /// Ring spec: T-S, GL-S, T-point, GL-point, T-PV:n, GL-PV:n,
        /// T-PV:axb, GLGm or aux.
        #[arg(long)]
        ring: String,
        expr: String,
    },
}

fn parse_ring_spec(s: &str) -> Option<RingKind> {
    Some(match s {
        "T-S" => RingKind::TS,
        "GL-S" => RingKind::GlS,
        "T-point" => RingKind::TPoint,
        "GL-point" => RingKind::GlPoint,
        "GLGm" => RingKind::GlGm,
        "aux" => RingKind::Aux,
        _ => {
            if let Some(rest) = s.strip_prefix("T-PV:") {
                if let Some((a, b)) = rest.split_once('x') {
                    RingKind::TProjPair(a.parse().ok()?, b.parse().ok()?)
                } else {
                    RingKind::TProj(rest.parse().ok()?)
                }
            } else if let Some(rest) = s.strip_prefix("GL-PV:") {
                RingKind::GlProj(rest.parse().ok()?)
            } else {
                return None;
            }
        }
    })
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "A*(H_{}) = Z[tau,c2,c3]/({})\n",
        report.genus,
        report.relations.join(", ")
    ));
    out.push_str(&format!("n = {}\n", report.n));
    out.push_str("generators:\n");
    for g in &report.generators {
        out.push_str(&format!(
            "  {} (degree {}): {}\n",
            g.name, g.degree, g.geometric_meaning
        ));
    }
    out.push_str("relations:\n");
    for r in &report.relations {
        out.push_str(&format!("  {r}\n"));
    }
    out.push_str("checks:\n");
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        };
        out.push_str(&format!("  [{status}] {}: {} ({})\n", c.name, c.witness, c.paper_anchor));
    }
    out
}

fn emit(report: &Report, format: Format) -> ExitCode {
    match format {
        Format::Text => print!("{}", render_text(report)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        ),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn genus_usage_error(e: &hgpipe::PipeError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Compute { genus, format, engine } => {
            match hgpipe::chow_ring_hg(genus, &engine.opts()) {
                Ok(result) => emit(&result.report, format),
                Err(e @ hgpipe::PipeError::InvalidGenus(_)) => genus_usage_error(&e),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Cmd::Verify { genus, suite, format, jobs, engine } => {
            match hgpipe::verify_suite(genus, suite.into(), &engine.opts(), jobs) {
                Ok(report) => emit(&report, format),
                Err(e @ hgpipe::PipeError::InvalidGenus(_)) => genus_usage_error(&e),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Cmd::Reduce { ring, expr } => {
            let kind = match parse_ring_spec(&ring) {
                Some(k) => k,
                None => {
                    eprintln!(
                        "error: unknown ring spec `{ring}` (expected T-S, GL-S, T-point, \
                         GL-point, T-PV:n, GL-PV:n, T-PV:axb, GLGm or aux)"
                    );
                    return ExitCode::from(2);
                }
            };
            let presentation = match build_ring(kind) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match parse_poly(&expr, &presentation.table) {
                Ok(p) => {
                    println!("{}", presentation.reduce(&p));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
