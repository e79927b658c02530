//! Command-line front end.
//!
//! Every verb prints a human-readable section, a `---` separator, then
//! stable `key=value` records for scripting. Exit codes: 0 when the checked
//! property holds, 1 when it fails (obstruction, unmet hypotheses, bad
//! roundtrip), 2 on parse or validation errors.

use std::error::Error;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use shiftkit::analysis;
use shiftkit::extension::{self, Budgets, ExtensionResult, ObstructionWitness};
use shiftkit::format::{parse_document, Document};
use shiftkit::oracle::{continuity_probe, worked_example, EquivariantOracle, CodeOracle};
use shiftkit::{PointPresentation, ShiftPresentation, Sidedness};

#[derive(Parser)]
#[command(name = "shiftkit", version, about = "Symbolic dynamics toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    Two,
    One,
}

impl Scope {
    fn sidedness(self) -> Sidedness {
        match self {
            Scope::Two => Sidedness::TwoSided,
            Scope::One => Sidedness::OneSided,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the hypotheses under which oracle extensions are decidable.
    Check {
        /// Shift definition file.
        file: PathBuf,
        /// Shift name inside the file (default: first).
        #[arg(long)]
        shift: Option<String>,
        /// Treat the shift as two- or one-sided (default: as defined).
        #[arg(long, value_enum)]
        scope: Option<Scope>,
        /// Largest orbit period to test.
        #[arg(long, default_value_t = 8)]
        period_bound: usize,
    },
    /// Topological entropy to a guaranteed bracket.
    Entropy {
        file: PathBuf,
        #[arg(long)]
        shift: Option<String>,
        /// Bracket width.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// List periodic orbits by least period.
    Orbits {
        file: PathBuf,
        #[arg(long)]
        shift: Option<String>,
        /// Largest least period to enumerate.
        #[arg(long, default_value_t = 6)]
        max: usize,
    },
    /// Apply a sliding block code to a point literal.
    Apply {
        /// Code definition file.
        #[arg(long)]
        code: PathBuf,
        /// Code name inside the file (default: first).
        #[arg(long)]
        name: Option<String>,
        /// Point literal over the code's domain alphabet,
        /// e.g. "[01]^inf" or "[0]^-inf 1 [0]^inf @2".
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value = "two")]
        sided: Scope,
    },
    /// Decide whether an oracle extends to a sliding block code.
    Extend {
        /// Either "example:<id>" for a built-in oracle or a code file.
        #[arg(long)]
        oracle: String,
        /// Domain shift file (required for code-file oracles).
        #[arg(long)]
        shift: Option<PathBuf>,
        /// Codomain shift file (default: domain, or the code's image).
        #[arg(long)]
        codomain: Option<PathBuf>,
        #[arg(long)]
        period_max: Option<usize>,
        #[arg(long)]
        scale_max: Option<usize>,
        #[arg(long)]
        depth_factor: Option<usize>,
    },
    /// Run a built-in worked example end to end.
    Example {
        /// One of 5.1, 5.2, 5.3, 5.4, 5.5.
        id: String,
        #[arg(long)]
        period_max: Option<usize>,
        #[arg(long)]
        scale_max: Option<usize>,
        #[arg(long)]
        depth_factor: Option<usize>,
    },
    /// Verify a code and its inverse compose to the identity, then check
    /// that restriction-then-extension reproduces the code.
    Roundtrip {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        inverse: PathBuf,
        #[arg(long)]
        shift: PathBuf,
        #[arg(long)]
        period_max: Option<usize>,
        #[arg(long)]
        scale_max: Option<usize>,
        #[arg(long)]
        depth_factor: Option<usize>,
    },
}

/// Human lines, then `---`, then key=value records.
#[derive(Default)]
struct Report {
    human: Vec<String>,
    records: Vec<(String, String)>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.human.push(s.into());
    }

    fn record(&mut self, key: impl Into<String>, value: impl Display) {
        self.records.push((key.into(), value.to_string()));
    }

    fn print(&self) {
        for l in &self.human {
            println!("{l}");
        }
        println!("---");
        for (k, v) in &self.records {
            println!("{k}={v}");
        }
    }
}

type Failure = Box<dyn Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Check {
            file,
            shift,
            scope,
            period_bound,
        } => cmd_check(&file, shift.as_deref(), scope, period_bound),
        Cmd::Entropy { file, shift, tol } => cmd_entropy(&file, shift.as_deref(), tol),
        Cmd::Orbits { file, shift, max } => cmd_orbits(&file, shift.as_deref(), max),
        Cmd::Apply {
            code,
            name,
            point,
            sided,
        } => cmd_apply(&code, name.as_deref(), &point, sided.sidedness()),
        Cmd::Extend {
            oracle,
            shift,
            codomain,
            period_max,
            scale_max,
            depth_factor,
        } => {
            let budgets = budgets_with(period_max, scale_max, depth_factor)?;
            cmd_extend(&oracle, shift.as_deref(), codomain.as_deref(), &budgets)
        }
        Cmd::Example {
            id,
            period_max,
            scale_max,
            depth_factor,
        } => {
            let budgets = budgets_with(period_max, scale_max, depth_factor)?;
            cmd_example(&id, &budgets)
        }
        Cmd::Roundtrip {
            code,
            inverse,
            shift,
            period_max,
            scale_max,
            depth_factor,
        } => {
            let budgets = budgets_with(period_max, scale_max, depth_factor)?;
            cmd_roundtrip(&code, &inverse, &shift, &budgets)
        }
    }
}

fn env_usize(name: &str) -> Result<Option<usize>, Failure> {
    match std::env::var(name) {
        Ok(v) => {
            let n = v
                .parse::<usize>()
                .map_err(|_| format!("{name} must be a number, got {v:?}"))?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Defaults, overridden by SHIFTKIT_* environment variables, overridden by
/// explicit flags.
fn budgets_with(
    period_max: Option<usize>,
    scale_max: Option<usize>,
    depth_factor: Option<usize>,
) -> Result<Budgets, Failure> {
    let mut b = Budgets::default();
    if let Some(n) = env_usize("SHIFTKIT_PERIOD_MAX")? {
        b.period_max = n;
    }
    if let Some(n) = env_usize("SHIFTKIT_SCALE_MAX")? {
        b.scale_max = n;
    }
    if let Some(n) = env_usize("SHIFTKIT_DEPTH_FACTOR")? {
        b.depth_factor = n;
    }
    if let Some(n) = period_max {
        b.period_max = n;
    }
    if let Some(n) = scale_max {
        b.scale_max = n;
    }
    if let Some(n) = depth_factor {
        b.depth_factor = n;
    }
    Ok(b)
}

fn load_document(path: &Path) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    parse_document(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_shift(path: &Path, name: Option<&str>) -> Result<ShiftPresentation, Failure> {
    let doc = load_document(path)?;
    match doc.shift(name) {
        Some(s) => Ok(s.clone()),
        None => match name {
            Some(n) => Err(format!("{}: no shift named {n:?}", path.display()).into()),
            None => Err(format!("{}: no shift definitions", path.display()).into()),
        },
    }
}

fn load_code(path: &Path, name: Option<&str>) -> Result<shiftkit::code::SlidingBlockCode, Failure> {
    let doc = load_document(path)?;
    match doc.code(name) {
        Some(c) => Ok(c.clone()),
        None => match name {
            Some(n) => Err(format!("{}: no code named {n:?}", path.display()).into()),
            None => Err(format!("{}: no code definitions", path.display()).into()),
        },
    }
}

fn sided_text(s: Sidedness) -> &'static str {
    match s {
        Sidedness::TwoSided => "two",
        Sidedness::OneSided => "one",
    }
}

/// C-style %.0e: one significant digit, two-digit signed exponent.
fn sci0(x: f64) -> String {
    let s = format!("{x:.0e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn cmd_check(
    file: &Path,
    name: Option<&str>,
    scope: Option<Scope>,
    period_bound: usize,
) -> Result<u8, Failure> {
    let mut shift = load_shift(file, name)?;
    if let Some(scope) = scope {
        if scope.sidedness() != shift.sidedness() {
            shift = ShiftPresentation::from_graph(
                shift.name(),
                shift.graph().clone(),
                scope.sidedness(),
            )?;
        }
    }
    let report = analysis::check_hypotheses(&shift, period_bound)?;
    let mut out = Report::default();
    out.line(format!(
        "checking {} ({}-sided), orbits up to period {}",
        shift.name(),
        sided_text(shift.sidedness()),
        period_bound
    ));
    out.line(format!(
        "transitive: {}",
        if report.transitive { "yes" } else { "no" }
    ));
    out.line(format!(
        "mixing: {}",
        if report.mixing { "yes" } else { "no" }
    ));
    out.line(format!(
        "infinite: {}",
        if report.infinite { "yes" } else { "no" }
    ));
    out.line(format!("orbits checked: {}", report.orbits.len()));

    out.record("shift", shift.name());
    out.record("sided", sided_text(shift.sidedness()));
    out.record("period_bound", period_bound);
    out.record("transitive", report.transitive);
    out.record("mixing", report.mixing);
    out.record("infinite", report.infinite);
    if report.satisfied() {
        out.line("hypotheses hold".to_string());
        out.record("hypotheses", "pass");
        out.print();
        Ok(0)
    } else {
        let first = &report.failures[0];
        match first.orbit() {
            Some(w) => out.line(format!("hypotheses fail at orbit {w}: {}", first.reason())),
            None => out.line(format!("hypotheses fail: {}", first.reason())),
        }
        out.record("hypotheses", "fail");
        if let Some(w) = first.orbit() {
            out.record("witness", w);
        }
        out.record("reason", first.reason());
        out.print();
        Ok(1)
    }
}

fn cmd_entropy(file: &Path, name: Option<&str>, tol: f64) -> Result<u8, Failure> {
    let shift = load_shift(file, name)?;
    let est = analysis::entropy(&shift, tol)?;
    let mut out = Report::default();
    out.line(format!(
        "entropy of {}: {:.6} bits per symbol (bracket width {})",
        shift.name(),
        est.value(),
        sci0(tol)
    ));
    out.record("shift", shift.name());
    out.record("entropy", format!("{:.6}", est.value()));
    out.record("bracket", sci0(tol));
    out.print();
    Ok(0)
}

fn cmd_orbits(file: &Path, name: Option<&str>, max: usize) -> Result<u8, Failure> {
    let shift = load_shift(file, name)?;
    let orbits = analysis::enumerate_periodic_orbits(&shift, max)?;
    let mut out = Report::default();
    out.line(format!(
        "{} periodic orbits of {} with least period <= {}",
        orbits.len(),
        shift.name(),
        max
    ));
    const SHOWN: usize = 64;
    for o in orbits.iter().take(SHOWN) {
        out.line(format!("  period {}: {}", o.least_period, o.generator));
    }
    if orbits.len() > SHOWN {
        out.line(format!("  ... and {} more", orbits.len() - SHOWN));
    }
    out.record("shift", shift.name());
    out.record("max", max);
    out.record("count", orbits.len());
    out.print();
    Ok(0)
}

fn cmd_apply(
    file: &Path,
    name: Option<&str>,
    literal: &str,
    sided: Sidedness,
) -> Result<u8, Failure> {
    let code = load_code(file, name)?;
    let x = PointPresentation::parse(code.domain(), sided, literal)?;
    let y = code.apply(&x)?;
    let mut out = Report::default();
    out.line(format!(
        "{} maps {} to {}",
        code.name(),
        x.to_literal(),
        y.to_literal()
    ));
    out.record("code", code.name());
    out.record("memory", code.memory());
    out.record("anticipation", code.anticipation());
    out.record("point", x.to_literal());
    out.record("image", y.to_literal());
    out.print();
    Ok(0)
}

fn resolve_oracle(
    selector: &str,
    shift_file: Option<&Path>,
    codomain_file: Option<&Path>,
) -> Result<Box<dyn EquivariantOracle>, Failure> {
    if let Some(id) = selector.strip_prefix("example:") {
        return worked_example(id)
            .ok_or_else(|| format!("no built-in oracle {selector:?}").into());
    }
    let path = Path::new(selector);
    let code = load_code(path, None)?;
    let Some(shift_file) = shift_file else {
        return Err("code-file oracles need --shift for the domain".into());
    };
    let domain = load_shift(shift_file, None)?;
    let codomain = match codomain_file {
        Some(p) => load_shift(p, None)?,
        None if code.codomain() == domain.alphabet() => domain.clone(),
        None => code.image_presentation(&domain)?,
    };
    Ok(Box::new(CodeOracle::new(code, domain, codomain)?))
}

fn report_budgets(out: &mut Report, budgets: &Budgets) {
    out.record("period_max", budgets.period_max);
    out.record("scale_max", budgets.scale_max);
    out.record("depth_factor", budgets.depth_factor);
}

fn report_obstruction(out: &mut Report, w: &ObstructionWitness) {
    let period_in = w.orbit.len();
    let period_out = w
        .windows
        .iter()
        .map(|r| r.window.least_word_period())
        .max()
        .unwrap_or(0);
    out.line(format!(
        "obstruction at the orbit of {} (period {}): {} image windows persist around {} at scale {}",
        w.orbit,
        period_in,
        w.windows.len(),
        w.target.to_literal(),
        w.scale
    ));
    const SHOWN: usize = 8;
    for r in w.windows.iter().take(SHOWN) {
        out.line(format!("  {}  from context {}", r.window, r.context.to_literal()));
    }
    if w.windows.len() > SHOWN {
        out.line(format!("  ... and {} more", w.windows.len() - SHOWN));
    }
    let counts = w
        .scale_counts
        .iter()
        .map(|(s, c)| format!("{c} at scale {s}"))
        .collect::<Vec<_>>()
        .join(", ");
    out.line(format!("window counts: {counts}"));
    if w.growth {
        out.line("counts keep pace with the scale: the forced image set is infinite".to_string());
    }
    out.record("orbit", &w.orbit);
    out.record("period_in", period_in);
    out.record("target", w.target.to_literal());
    out.record("scale", w.scale);
    out.record("windows", w.windows.len());
    out.record("period_out", period_out);
    out.record("growth", w.growth);
    for (s, c) in &w.scale_counts {
        out.record(format!("count.{s}"), c);
    }
    for (i, r) in w.windows.iter().enumerate() {
        out.record(format!("window.{i}"), &r.window);
    }
}

fn report_extension(out: &mut Report, result: &ExtensionResult) -> u8 {
    out.record("verdict", result.verdict());
    match result {
        ExtensionResult::Extended { table } => {
            out.line(format!(
                "extends to a sliding block code; {} orbits verified",
                table.len()
            ));
            const SHOWN: usize = 32;
            for e in table.iter().take(SHOWN) {
                out.line(format!("  {} -> {}", e.orbit, e.image.to_literal()));
            }
            if table.len() > SHOWN {
                out.line(format!("  ... and {} more", table.len() - SHOWN));
            }
            out.record("orbits", table.len());
            for (i, e) in table.iter().enumerate() {
                out.record(format!("orbit.{i}"), &e.orbit);
                out.record(format!("image.{i}"), e.image.to_literal());
            }
            0
        }
        ExtensionResult::Obstruction(w) => {
            report_obstruction(out, w);
            1
        }
        ExtensionResult::Inconclusive {
            orbit,
            target,
            scale,
        } => {
            out.line(format!(
                "inconclusive: {} (around {}) did not stabilize within scale {}",
                orbit,
                target.to_literal(),
                scale
            ));
            out.record("orbit", orbit);
            out.record("target", target.to_literal());
            out.record("scale", scale);
            1
        }
    }
}

fn run_extension(
    o: &dyn EquivariantOracle,
    budgets: &Budgets,
) -> Result<ExtensionResult, Failure> {
    let result = match o.domain().sidedness() {
        Sidedness::TwoSided => extension::extend(o, budgets)?,
        Sidedness::OneSided => extension::extend_one_sided(o, budgets)?,
    };
    Ok(result)
}

fn cmd_extend(
    selector: &str,
    shift_file: Option<&Path>,
    codomain_file: Option<&Path>,
    budgets: &Budgets,
) -> Result<u8, Failure> {
    let oracle = resolve_oracle(selector, shift_file, codomain_file)?;
    let mut out = Report::default();
    out.line(format!(
        "extending {} : {} -> {} ({}-sided)",
        oracle.name(),
        oracle.domain().name(),
        oracle.codomain().name(),
        sided_text(oracle.domain().sidedness())
    ));
    out.record("oracle", oracle.name());
    out.record("domain", oracle.domain().name());
    out.record("codomain", oracle.codomain().name());
    out.record("sided", sided_text(oracle.domain().sidedness()));
    report_budgets(&mut out, budgets);
    let result = run_extension(oracle.as_ref(), budgets)?;
    let code = report_extension(&mut out, &result);
    out.print();
    Ok(code)
}

fn cmd_example(id: &str, budgets: &Budgets) -> Result<u8, Failure> {
    let oracle = worked_example(id)
        .ok_or_else(|| format!("no worked example {id:?}; try one of 5.1 .. 5.5"))?;
    let mut out = Report::default();
    out.record("example", id);
    out.record("oracle", oracle.name());
    let code = match id {
        "5.1" => {
            out.line(
                "run-flip: runs of 0s and 1s sit between a 2-marker and a 3-marker; \
                 a run flips exactly when a marker adjoins it on the flipping side."
                    .to_string(),
            );
            out.line(
                "far from all markers both readings stay live, so the image of the \
                 all-0 point never settles."
                    .to_string(),
            );
            report_budgets(&mut out, budgets);
            let result = run_extension(oracle.as_ref(), budgets)?;
            report_extension(&mut out, &result)
        }
        "5.2" => {
            out.line(
                "parity-recode: sends each 1 to a 2 and grades the zero runs by \
                 distance parity; the fixed point of 0s has no consistent image."
                    .to_string(),
            );
            report_budgets(&mut out, budgets);
            let result = run_extension(oracle.as_ref(), budgets)?;
            report_extension(&mut out, &result)
        }
        "5.3" => {
            out.line(
                "gap-midpoint: marks the middle of each run of 0s between two 2s; \
                 around the all-0 point the forced image set grows without bound."
                    .to_string(),
            );
            report_budgets(&mut out, budgets);
            let result = run_extension(oracle.as_ref(), budgets)?;
            report_extension(&mut out, &result)
        }
        "5.4" => {
            out.line(
                "right-parity-flip (one-sided): a nonzero symbol flips when the \
                 nearest nonzero to its right sits at odd distance."
                    .to_string(),
            );
            report_budgets(&mut out, budgets);
            let result = run_extension(oracle.as_ref(), budgets)?;
            let code = report_extension(&mut out, &result);
            let dom = oracle.domain();
            let target =
                PointPresentation::parse(dom.alphabet(), Sidedness::OneSided, "1 [0]^inf")?;
            if let Some(wit) = continuity_probe(oracle.as_ref(), &target, 0, 2, 3)? {
                out.line(format!(
                    "continuity fails at {} coordinate 0: contexts agreeing to radius {} force {} and {}",
                    target.to_literal(),
                    wit.agreement_radius,
                    dom.alphabet().symbol(wit.first.0),
                    dom.alphabet().symbol(wit.second.0)
                ));
                out.record("witness", "continuity");
                out.record("coord", wit.coord);
                out.record("radius", wit.agreement_radius);
                out.record("first", dom.alphabet().symbol(wit.first.0));
                out.record("second", dom.alphabet().symbol(wit.second.0));
            }
            code
        }
        "5.5" => {
            out.line(
                "nearest-parity-flip (two-sided): a nonzero symbol flips when the \
                 nearest nonzero neighbor sits at odd distance; every periodic \
                 orbit extends but the map is not continuous at a lone spike."
                    .to_string(),
            );
            report_budgets(&mut out, budgets);
            let dom = oracle.domain();
            let target = PointPresentation::parse(
                dom.alphabet(),
                Sidedness::TwoSided,
                "[0]^-inf 1 [0]^inf",
            )?;
            match continuity_probe(oracle.as_ref(), &target, 0, 2, 3)? {
                Some(wit) => {
                    out.line(format!(
                        "continuity fails at {} coordinate 0: contexts agreeing to radius {} force {} and {}",
                        target.to_literal(),
                        wit.agreement_radius,
                        dom.alphabet().symbol(wit.first.0),
                        dom.alphabet().symbol(wit.second.0)
                    ));
                    out.line(format!(
                        "  {}  from {}",
                        dom.alphabet().symbol(wit.first.0),
                        wit.first.1
                    ));
                    out.line(format!(
                        "  {}  from {}",
                        dom.alphabet().symbol(wit.second.0),
                        wit.second.1
                    ));
                    out.record("verdict", "obstruction");
                    out.record("witness", "continuity");
                    out.record("target", target.to_literal());
                    out.record("coord", wit.coord);
                    out.record("radius", wit.agreement_radius);
                    out.record("first", dom.alphabet().symbol(wit.first.0));
                    out.record("second", dom.alphabet().symbol(wit.second.0));
                    out.record("context.first", &wit.first.1);
                    out.record("context.second", &wit.second.1);
                    1
                }
                None => {
                    out.line("no continuity witness found at the probed depths".to_string());
                    out.record("verdict", "inconclusive");
                    1
                }
            }
        }
        _ => unreachable!("worked_example covers exactly these ids"),
    };
    out.print();
    Ok(code)
}

fn cmd_roundtrip(
    code_file: &Path,
    inverse_file: &Path,
    shift_file: &Path,
    budgets: &Budgets,
) -> Result<u8, Failure> {
    let f = load_code(code_file, None)?;
    let f_inv = load_code(inverse_file, None)?;
    let shift = load_shift(shift_file, None)?;
    let ok = extension::aut_roundtrip(&f, &f_inv, &shift, budgets)?;
    let mut out = Report::default();
    out.line(format!(
        "{} composed with {} on {}: {}",
        f.name(),
        f_inv.name(),
        shift.name(),
        if ok {
            "identity both ways, and extension reproduces the code"
        } else {
            "mismatch"
        }
    ));
    out.record("code", f.name());
    out.record("inverse", f_inv.name());
    out.record("shift", shift.name());
    report_budgets(&mut out, budgets);
    out.record("roundtrip", if ok { "pass" } else { "fail" });
    out.print();
    Ok(if ok { 0 } else { 1 })
}
