//! The `vertexco` command line: checks axiom bundles on coalgebra files,
//! certifies lattice closure, runs the formal-calculus self-test, and
//! produces example and mutant files.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vertexco::algebra::Scalar;
use vertexco::coalgebra::{
    check_bundle_in, effective_window, parse_coalgebra, write_coalgebra, Bundle, VertexCoalgebra,
};
use vertexco::examples::{dualize_algebra, mutate, random_mutation, Derivation, DifferentialAlgebraSpec, MutationSpec};
use vertexco::formal::{binomial_selftest, delta_selftest};
use vertexco::lattice::{check_seeds, cross_validate, minimal_margin, propagate, LatticeBox, SeedSet};
use vertexco::report::{CheckReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "vertexco", version, about = "Exact verification of vertex coalgebra axioms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check axiom bundles on a coalgebra file.
    Check {
        input: PathBuf,
        #[arg(long, default_value = "all")]
        bundle: BundleChoice,
        /// Also cover [-R, R]^3; the computed window is never shrunk.
        #[arg(long = "box", value_name = "R", value_parser = clap::value_parser!(i64).range(0..))]
        radius: Option<i64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Certify closure of the seed planes over [-R, R]^3 and confirm it on a coalgebra.
    Certify {
        input: PathBuf,
        #[arg(long = "box", value_name = "R", default_value_t = 6, value_parser = clap::value_parser!(i64).range(0..))]
        radius: i64,
        #[arg(long, default_value_t = 20)]
        margin: u32,
        #[arg(long, default_value = "both")]
        seed_planes: SeedPlanes,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Delta-function and binomial identity self-test.
    Selftest {
        #[arg(long, default_value_t = 12)]
        order: u32,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write the dual of k[t]/(t^m) with a derivation.
    Dualize {
        #[arg(long = "m", value_name = "M")]
        m: i64,
        #[arg(long, default_value = "raising")]
        derivation: DerivationChoice,
        /// Output file; standard output if absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run all bundles on the result.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Perturb one coproduct coefficient, chosen at random from a seed or given explicitly.
    Mutate {
        input: PathBuf,
        #[arg(long, required_unless_present = "n", conflicts_with = "n")]
        seed: Option<u64>,
        #[arg(long, requires_all = ["i", "j", "k", "by"], allow_negative_numbers = true)]
        n: Option<i64>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        by: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BundleChoice {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "D", alias = "d")]
    D,
    All,
}

impl BundleChoice {
    fn bundles(self) -> Vec<Bundle> {
        match self {
            BundleChoice::A => vec![Bundle::A],
            BundleChoice::B => vec![Bundle::B],
            BundleChoice::C => vec![Bundle::C],
            BundleChoice::D => vec![Bundle::D],
            BundleChoice::All => Bundle::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SeedPlanes {
    Both,
    R,
    P,
}

impl SeedPlanes {
    fn seeds(self) -> Vec<SeedSet> {
        match self {
            SeedPlanes::Both => vec![SeedSet::plane_r(0), SeedSet::plane_p(0)],
            SeedPlanes::R => vec![SeedSet::plane_r(0)],
            SeedPlanes::P => vec![SeedSet::plane_p(0)],
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DerivationChoice {
    Raising,
    Plain,
}

/// Failure to read, parse or write something; maps to exit code 2.
#[derive(Debug)]
struct InputError(String);

type CmdResult = Result<i32, InputError>;

#[derive(Serialize)]
struct CoalgebraSummary {
    name: String,
    dimension: usize,
    support: String,
}

impl CoalgebraSummary {
    fn of(v: &VertexCoalgebra) -> Self {
        CoalgebraSummary { name: v.name().to_string(), dimension: v.dim(), support: v.support().to_string() }
    }
}

#[derive(Serialize)]
struct WindowSummary {
    planes: String,
    bounds: String,
    checked: String,
}

#[derive(Serialize)]
struct CheckOutput {
    schema_version: u32,
    command: &'static str,
    coalgebra: CoalgebraSummary,
    effective_window: WindowSummary,
    verdict: Verdict,
    bundles: Vec<CheckReport>,
}

#[derive(Serialize)]
struct Coverage {
    target_points: u64,
    covered: u64,
    uncovered: Vec<String>,
}

#[derive(Serialize)]
struct CertifyOutput {
    schema_version: u32,
    command: &'static str,
    coalgebra: CoalgebraSummary,
    seeds: Vec<String>,
    target: String,
    margin: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimal_margin: Option<u32>,
    verdict: Verdict,
    seed_check: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<Coverage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structure: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_validation: Option<CheckReport>,
}

#[derive(Serialize)]
struct SelftestOutput {
    schema_version: u32,
    command: &'static str,
    order: u32,
    verdict: Verdict,
    checks: Vec<CheckReport>,
}

fn verdict_of(parts: &[CheckReport]) -> Verdict {
    if parts.iter().all(CheckReport::passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn exit_for(v: Verdict) -> i32 {
    if v.is_pass() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn read_coalgebra(path: &Path) -> Result<VertexCoalgebra, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_coalgebra(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, InputError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| InputError(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn note(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", line.as_ref());
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            io.note(format!("error: {msg}"));
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> CmdResult {
    match command {
        Command::Check { input, bundle, radius, jobs, report } => {
            let v = read_coalgebra(&input)?;
            cmd_check(&v, bundle, radius, jobs, report.as_deref(), io)
        }
        Command::Certify { input, radius, margin, seed_planes, certificate, jobs, report } => {
            let v = read_coalgebra(&input)?;
            cmd_certify(&v, radius, margin, seed_planes, certificate.as_deref(), jobs, report.as_deref(), io)
        }
        Command::Selftest { order, report } => cmd_selftest(order, report.as_deref(), io),
        Command::Dualize { m, derivation, output, check, jobs, report } => {
            cmd_dualize(m, derivation, output.as_deref(), check, jobs, report.as_deref(), io)
        }
        Command::Mutate { input, seed, n, i, j, k, by, output } => {
            let v = read_coalgebra(&input)?;
            let spec = match (seed, n) {
                (Some(seed), _) => random_mutation(&v, seed).map_err(|e| InputError(e.to_string()))?,
                (None, Some(n)) => {
                    let by = by.expect("required by clap");
                    let perturbation: Scalar = by.parse().map_err(|e| InputError(format!("--by: {e}")))?;
                    MutationSpec {
                        n,
                        i: i.expect("required by clap"),
                        j: j.expect("required by clap"),
                        k: k.expect("required by clap"),
                        perturbation,
                        seed: None,
                    }
                }
                (None, None) => unreachable!("clap requires --seed or --n"),
            };
            let mutant = mutate(&v, &spec).map_err(|e| InputError(e.to_string()))?;
            io.note(format!("mutation: {spec}"));
            emit(&write_coalgebra(&mutant), output.as_deref(), io)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(text: &str, path: Option<&Path>, io: &mut Io<'_>) -> Result<(), InputError> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let _ = io.out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn cmd_check(
    v: &VertexCoalgebra,
    choice: BundleChoice,
    radius: Option<i64>,
    jobs: usize,
    report: Option<&Path>,
    io: &mut Io<'_>,
) -> CmdResult {
    let window = effective_window(v);
    let extra = radius.map_or(LatticeBox::EMPTY, LatticeBox::cube);
    let region = window.bounds.hull(&extra);
    let mut bundles = Vec::new();
    for b in choice.bundles() {
        let t = Instant::now();
        let r = with_jobs(jobs, || check_bundle_in(b, v, &extra))?;
        io.note(format!("bundle {b}: {:.3}s", t.elapsed().as_secs_f64()));
        io.say(format!("bundle {b}: {}", r.verdict));
        for w in r.witnesses.iter().take(3) {
            io.say(format!("  witness {w}"));
        }
        bundles.push(r);
    }
    let verdict = verdict_of(&bundles);
    let output = CheckOutput {
        schema_version: SCHEMA_VERSION,
        command: "check",
        coalgebra: CoalgebraSummary::of(v),
        effective_window: WindowSummary {
            planes: window.planes.to_string(),
            bounds: window.bounds.to_string(),
            checked: region.to_string(),
        },
        verdict,
        bundles,
    };
    let passed = output.bundles.iter().filter(|b| b.passed()).count();
    io.say(format!("{}: {passed}/{} bundles pass", v.name(), output.bundles.len()));
    if let Some(p) = report {
        write_file(p, &to_json(&output))?;
    }
    Ok(exit_for(verdict))
}

#[allow(clippy::too_many_arguments)]
fn cmd_certify(
    v: &VertexCoalgebra,
    radius: i64,
    margin: u32,
    planes: SeedPlanes,
    certificate: Option<&Path>,
    jobs: usize,
    report: Option<&Path>,
    io: &mut Io<'_>,
) -> CmdResult {
    let seeds = planes.seeds();
    let target = LatticeBox::cube(radius);
    let region = target.inflate(i64::from(margin));
    let mut output = CertifyOutput {
        schema_version: SCHEMA_VERSION,
        command: "certify",
        coalgebra: CoalgebraSummary::of(v),
        seeds: seeds.iter().map(ToString::to_string).collect(),
        target: target.to_string(),
        margin,
        minimal_margin: None,
        verdict: Verdict::Fail,
        seed_check: with_jobs(jobs, || check_seeds(&seeds, &region, v))?,
        coverage: None,
        steps: None,
        structure: None,
        cross_validation: None,
    };
    let t = Instant::now();
    if !output.seed_check.passed() {
        io.say("seed planes: fail");
        for w in output.seed_check.witnesses.iter().take(3) {
            io.say(format!("  witness {w}"));
        }
    } else {
        io.say("seed planes: pass");
        match propagate(&seeds, &target, margin) {
            Err(gap) => {
                io.say(format!("coverage: gap, {gap}"));
                output.coverage = Some(Coverage {
                    target_points: target.len(),
                    covered: gap.covered,
                    uncovered: gap.uncovered.iter().take(64).map(ToString::to_string).collect(),
                });
            }
            Ok(cert) => {
                io.say(format!("coverage: {} points, {} steps", target.len(), cert.steps.len()));
                output.coverage =
                    Some(Coverage { target_points: target.len(), covered: target.len(), uncovered: vec![] });
                output.minimal_margin = minimal_margin(&seeds, &target, margin).map(|c| c.margin);
                output.steps = Some(cert.steps.len());
                let structure = cert.verify();
                let cross = with_jobs(jobs, || cross_validate(&cert, v))?;
                io.say(format!("certificate structure: {}", structure.verdict));
                io.say(format!("cross validation: {}", cross.verdict));
                output.verdict = verdict_of(&[structure.clone(), cross.clone()]);
                output.structure = Some(structure);
                output.cross_validation = Some(cross);
                if let Some(p) = certificate {
                    write_file(p, &cert.to_text())?;
                }
            }
        }
    }
    io.note(format!("certify: {:.3}s", t.elapsed().as_secs_f64()));
    io.say(format!("certify: {}", output.verdict));
    if let Some(p) = report {
        write_file(p, &to_json(&output))?;
    }
    Ok(exit_for(output.verdict))
}

fn cmd_selftest(order: u32, report: Option<&Path>, io: &mut Io<'_>) -> CmdResult {
    if order == 0 {
        return Err(InputError("--order must be at least 1".into()));
    }
    let t = Instant::now();
    let delta = delta_selftest(order).map_err(|e| InputError(e.to_string()))?;
    let binomial = binomial_selftest(20, 20);
    io.note(format!("selftest: {:.3}s", t.elapsed().as_secs_f64()));
    let checks = vec![delta, binomial];
    let verdict = verdict_of(&checks);
    for c in &checks {
        io.say(format!("{}: {}", c.check, c.verdict));
    }
    let output = SelftestOutput { schema_version: SCHEMA_VERSION, command: "selftest", order, verdict, checks };
    if let Some(p) = report {
        write_file(p, &to_json(&output))?;
    }
    Ok(exit_for(verdict))
}

fn cmd_dualize(
    m: i64,
    derivation: DerivationChoice,
    output: Option<&Path>,
    check: bool,
    jobs: usize,
    report: Option<&Path>,
    io: &mut Io<'_>,
) -> CmdResult {
    if m < 1 {
        return Err(InputError(format!("--m must be at least 1, got {m}")));
    }
    let derivation = match derivation {
        DerivationChoice::Raising => Derivation::Raising,
        DerivationChoice::Plain => Derivation::Plain,
    };
    let spec = DifferentialAlgebraSpec { m: m as usize, derivation };
    let v = dualize_algebra(&spec).map_err(|e| InputError(e.to_string()))?;
    let text = write_coalgebra(&v);
    if check {
        let Some(path) = output else {
            return Err(InputError("--check needs --output so the report does not mix with the file".into()));
        };
        write_file(path, &text)?;
        return cmd_check(&v, BundleChoice::All, None, jobs, report, io);
    }
    emit(&text, output, io)?;
    Ok(EXIT_OK)
}
