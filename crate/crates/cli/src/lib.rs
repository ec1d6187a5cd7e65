//! The `compos` command line: checking, composing, mediating, simulating and
//! law-checking architecture descriptions.
//!
//! Commands return an [`Output`] instead of printing, so they can be driven
//! in-process. Exit codes: 0 success, 1 validation failure, 2 usage or IO error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use compos_core::dsl::{
    emit_component, emit_legs, emit_morphism, parse_component_unit, parse_diagram, parse_sentences,
    DiagramFile, DslError, FsLoader, SourceUnit, Warning,
};
use compos_core::sim::{self, SimError};
use compos_core::{
    check_cocone, colimit_system, mediating_morphism, run_laws, Fault, SentenceSet, Violation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "compos", version, about = "Component composition by colimits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate `.compos` and `.diagram` files.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Compose a diagram into a single component.
    Compose {
        diagram: PathBuf,
        /// Output file; a `.legs` file with the colimit legs is written next to it.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check an environment cocone and print its mediating morphism.
    Mediate {
        diagram: PathBuf,
        environment: String,
    },
    /// Run a schedule of events, or search for a state satisfying a goal.
    Simulate(SimulateArgs),
    /// Check the category laws and the colimit construction on random inputs.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: u64,
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
    /// Print components in canonical form.
    Fmt {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Rewrite the files instead of printing.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub component: PathBuf,
    /// Comma-separated literals, e.g. `!h,!l,!a,t`.
    #[arg(long)]
    pub init: Option<String>,
    /// Goal sentences for a breadth-first search.
    #[arg(long, conflicts_with = "schedule")]
    pub reach: Option<String>,
    #[arg(long, requires = "reach", default_value_t = 10)]
    pub bound: usize,
    /// Events to fire, in order.
    pub schedule: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    ComposeSkipEvents,
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn label(&self, kind: &str, code: &str) -> String {
        let tag = format!("{kind}[{code}]");
        if !self.color {
            return tag;
        }
        let ansi = if kind == "error" { "1;31" } else { "1;33" };
        format!("\x1b[{ansi}m{tag}\x1b[0m")
    }
}

struct Ctx {
    out: Output,
    style: Style,
}

impl Ctx {
    fn new(style: Style) -> Self {
        Ctx {
            out: Output::default(),
            style,
        }
    }

    fn fail(&mut self, code: i32) {
        self.out.code = self.out.code.max(code);
    }

    fn error(&mut self, code: &str, msg: impl AsRef<str>) {
        let label = self.style.label("error", code);
        writeln!(self.out.stderr, "{label}: {}", msg.as_ref()).unwrap();
    }

    fn usage(&mut self, msg: impl AsRef<str>) {
        writeln!(self.out.stderr, "error: {}", msg.as_ref()).unwrap();
        self.fail(EXIT_USAGE);
    }

    /// `path` is the file that was read; warnings from files it references
    /// are reported against those files.
    fn warning(&mut self, path: &Path, w: &Warning) {
        let label = self.style.label("warning", w.code());
        let file = match &w.file {
            Some(f) => path.parent().unwrap_or(Path::new("")).join(f),
            None => path.to_path_buf(),
        };
        let msg = &w.message;
        writeln!(
            self.out.stderr,
            "{label}: {}:{}:{}: {msg}",
            file.display(),
            w.line,
            w.col
        )
        .unwrap();
    }

    fn violation(&mut self, path: &str, subject: Option<&str>, v: &Violation) {
        let msg = match subject {
            Some(s) => format!("{path}: {s}: {v}"),
            None => format!("{path}: {v}"),
        };
        self.error(v.code(), msg);
    }

    /// Reports a parse failure in `path`, whose text is `text` when available.
    /// Failures inside a referenced component file are reported against that file.
    fn dsl_error(&mut self, path: &Path, text: Option<&str>, err: &DslError) {
        if let DslError::InFile { path: inner, error } = err {
            let p = path.parent().unwrap_or(Path::new("")).join(inner);
            let t = fs::read_to_string(&p).ok();
            return self.dsl_error(&p, t.as_deref(), error);
        }
        let shown = path.display().to_string();
        match err {
            DslError::Validation { subject, report } => {
                for v in report {
                    self.violation(&shown, Some(subject), v);
                }
            }
            _ => {
                self.error(err.code(), format!("{shown}: {err}"));
                if let (Some((line, col)), Some(text)) = (position(err), text) {
                    self.snippet(text, line, col);
                }
            }
        }
        self.fail(if err.is_io() {
            EXIT_USAGE
        } else {
            EXIT_INVALID
        });
    }

    fn snippet(&mut self, text: &str, line: usize, col: usize) {
        let unit = SourceUnit::inline(text);
        let Some(src) = unit.line_text(line) else {
            return;
        };
        let gutter = line.to_string().len();
        let pad = " ".repeat(gutter);
        let caret = " ".repeat(col.saturating_sub(1));
        writeln!(self.out.stderr, "{pad} |\n{line} | {src}\n{pad} | {caret}^").unwrap();
    }
}

fn position(err: &DslError) -> Option<(usize, usize)> {
    match err {
        DslError::Syntax(s) => Some((s.line, s.col)),
        DslError::UnresolvedReference { line, col, .. } | DslError::Duplicate { line, col, .. } => {
            Some((*line, *col))
        }
        DslError::TotalityViolation { line, .. } => Some((*line, 1)),
        _ => None,
    }
}

fn read(ctx: &mut Ctx, path: &Path) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(t) => Some(t),
        Err(e) => {
            ctx.error("E006", format!("cannot read `{}`: {e}", path.display()));
            ctx.fail(EXIT_USAGE);
            None
        }
    }
}

fn load_component(ctx: &mut Ctx, path: &Path) -> Option<compos_core::Component> {
    let text = read(ctx, path)?;
    match parse_component_unit(&SourceUnit::new(path.display().to_string(), text.clone())) {
        Ok(p) => {
            for w in &p.warnings {
                ctx.warning(path, w);
            }
            Some(p.component)
        }
        Err(e) => {
            ctx.dsl_error(path, Some(&text), &e);
            None
        }
    }
}

fn load_diagram(ctx: &mut Ctx, path: &Path) -> Option<DiagramFile> {
    let text = read(ctx, path)?;
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    match parse_diagram(&text, &FsLoader::new(base)) {
        Ok(f) => {
            for w in &f.warnings {
                ctx.warning(path, w);
            }
            Some(f)
        }
        Err(e) => {
            ctx.dsl_error(path, Some(&text), &e);
            None
        }
    }
}

fn is_diagram(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "diagram")
}

pub fn cmd_check(paths: &[PathBuf], style: Style) -> Output {
    let mut ctx = Ctx::new(style);
    for path in paths {
        let shown = path.display().to_string();
        if is_diagram(path) {
            let Some(f) = load_diagram(&mut ctx, path) else {
                continue;
            };
            let mut ok = true;
            for (name, cocone) in &f.cocones {
                for v in check_cocone(&f.diagram, cocone) {
                    ctx.violation(&shown, Some(&format!("environment `{name}`")), &v);
                    ok = false;
                }
            }
            if ok {
                writeln!(ctx.out.stdout, "{shown}: ok").unwrap();
            } else {
                ctx.fail(EXIT_INVALID);
            }
        } else if load_component(&mut ctx, path).is_some() {
            writeln!(ctx.out.stdout, "{shown}: ok").unwrap();
        }
    }
    ctx.out
}

/// The `.legs` file written next to a composed component.
pub fn legs_path(output: &Path) -> PathBuf {
    output.with_extension("legs")
}

pub fn cmd_compose(diagram: &Path, output: Option<&Path>, style: Style) -> Output {
    let mut ctx = Ctx::new(style);
    let Some(f) = load_diagram(&mut ctx, diagram) else {
        return ctx.out;
    };
    let r = match colimit_system(&f.diagram) {
        Ok(r) => r,
        Err(e) => {
            ctx.error("E005", format!("{}: {e}", diagram.display()));
            ctx.fail(EXIT_INVALID);
            return ctx.out;
        }
    };
    let text = emit_component(r.apex());
    let Some(output) = output else {
        ctx.out.stdout = text;
        return ctx.out;
    };
    let legs = emit_legs(&r.cocone, &r.apex().name);
    let sidecar = legs_path(output);
    for (p, body) in [(output, &text), (sidecar.as_path(), &legs)] {
        if let Err(e) = fs::write(p, body) {
            ctx.error("E006", format!("cannot write `{}`: {e}", p.display()));
            ctx.fail(EXIT_USAGE);
            return ctx.out;
        }
    }
    writeln!(
        ctx.out.stdout,
        "wrote {} and {}",
        output.display(),
        sidecar.display()
    )
    .unwrap();
    ctx.out
}

pub fn cmd_mediate(diagram: &Path, environment: &str, style: Style) -> Output {
    let mut ctx = Ctx::new(style);
    let Some(f) = load_diagram(&mut ctx, diagram) else {
        return ctx.out;
    };
    let Some(cocone) = f.cocones.get(environment) else {
        ctx.usage(format!(
            "{}: no environment named `{environment}`",
            diagram.display()
        ));
        return ctx.out;
    };
    let shown = diagram.display().to_string();
    let report = check_cocone(&f.diagram, cocone);
    if !report.is_empty() {
        for v in &report {
            ctx.violation(&shown, Some(&format!("environment `{environment}`")), v);
        }
        ctx.fail(EXIT_INVALID);
        return ctx.out;
    }
    let result = colimit_system(&f.diagram).and_then(|r| {
        let u = mediating_morphism(&r, cocone)?;
        Ok((r, u))
    });
    match result {
        Ok((r, u)) => {
            ctx.out.stdout = emit_morphism("mediator", &r.apex().name, environment, &u);
        }
        Err(e) => {
            ctx.error("E033", format!("{shown}: {e}"));
            ctx.fail(EXIT_INVALID);
        }
    }
    ctx.out
}

/// Reads `!h, l` style literal lists.
pub fn parse_literals(text: &str) -> Result<SentenceSet, String> {
    let set = parse_sentences(text).map_err(|e| e.to_string())?;
    if let Some(f) = set.iter().find(|f| f.as_literal().is_none()) {
        return Err(format!("`{f}` is not a literal"));
    }
    Ok(set)
}

pub fn cmd_simulate(args: &SimulateArgs, style: Style) -> Output {
    let mut ctx = Ctx::new(style);
    let init = match args.init.as_deref().map(parse_literals).transpose() {
        Ok(i) => i.unwrap_or_default(),
        Err(e) => {
            ctx.usage(format!("--init: {e}"));
            return ctx.out;
        }
    };
    let goal = match args.reach.as_deref().map(parse_sentences).transpose() {
        Ok(g) => g,
        Err(e) => {
            ctx.usage(format!("--reach: {e}"));
            return ctx.out;
        }
    };
    let Some(c) = load_component(&mut ctx, &args.component) else {
        return ctx.out;
    };
    let mut symbols = init.symbols();
    symbols.extend(goal.iter().flat_map(SentenceSet::symbols));
    for symbol in &symbols {
        if !c.variables().contains(symbol) {
            ctx.usage(format!("`{symbol}` is not a variable of `{}`", c.name));
            return ctx.out;
        }
    }

    if let Some(goal) = goal {
        match sim::reachable(&c, &init, &goal, args.bound) {
            Ok(Some(trace)) => ctx.out.stdout = trace.to_string(),
            Ok(None) => {
                ctx.error("S004", format!("no witness within {} steps", args.bound));
                ctx.fail(EXIT_INVALID);
            }
            Err(e) => sim_error(&mut ctx, &e),
        }
        return ctx.out;
    }

    let states = match sim::initial_states(&c, &init) {
        Ok(s) => s,
        Err(e) => {
            sim_error(&mut ctx, &e);
            return ctx.out;
        }
    };
    if states.len() != 1 {
        sim_error(&mut ctx, &SimError::AmbiguousInitial(states.len()));
        return ctx.out;
    }
    let mut trace = sim::Trace::new(states.into_iter().next().unwrap());
    for e in &args.schedule {
        match sim::fire(&c, trace.last(), e) {
            Ok(next) => trace.steps.push((e.clone(), next)),
            Err(err) => {
                ctx.out.stdout = trace.to_string();
                sim_error(&mut ctx, &err);
                return ctx.out;
            }
        }
    }
    ctx.out.stdout = trace.to_string();
    ctx.out
}

fn sim_error(ctx: &mut Ctx, e: &SimError) {
    let code = match e {
        SimError::Unsatisfiable | SimError::AmbiguousInitial(_) => "S001",
        SimError::NotEnabled(_) | SimError::UnknownEvent(_) => "S002",
        _ => "S003",
    };
    ctx.error(code, e.to_string());
    ctx.fail(EXIT_INVALID);
}

pub fn cmd_laws(seed: u64, iters: u64, fault: Option<FaultArg>, style: Style) -> Output {
    let mut ctx = Ctx::new(style);
    let fault = fault.map(|FaultArg::ComposeSkipEvents| Fault::ComposeSkipsEvents);
    let report = run_laws(seed, iters, fault);
    match report.failure {
        None => {
            writeln!(
                ctx.out.stdout,
                "laws: seed {seed}, {} iterations, {} checks passed",
                report.iterations, report.checks
            )
            .unwrap();
        }
        Some(cx) => {
            ctx.error("L001", format!("counterexample (seed {seed})"));
            writeln!(ctx.out.stderr, "{cx}").unwrap();
            ctx.fail(EXIT_INVALID);
        }
    }
    ctx.out
}

pub fn cmd_fmt(paths: &[PathBuf], write: bool, style: Style) -> Output {
    let mut ctx = Ctx::new(style);
    for path in paths {
        let Some(c) = load_component(&mut ctx, path) else {
            continue;
        };
        let text = emit_component(&c);
        if write {
            if let Err(e) = fs::write(path, &text) {
                ctx.error("E006", format!("cannot write `{}`: {e}", path.display()));
                ctx.fail(EXIT_USAGE);
            }
        } else {
            ctx.out.stdout.push_str(&text);
        }
    }
    ctx.out
}

pub fn dispatch(cli: &Cli, style: Style) -> Output {
    match &cli.command {
        Command::Check { paths } => cmd_check(paths, style),
        Command::Compose { diagram, output } => cmd_compose(diagram, output.as_deref(), style),
        Command::Mediate {
            diagram,
            environment,
        } => cmd_mediate(diagram, environment, style),
        Command::Simulate(args) => cmd_simulate(args, style),
        Command::Laws {
            seed,
            iters,
            inject_fault,
        } => cmd_laws(*seed, *iters, *inject_fault, style),
        Command::Fmt { paths, write } => cmd_fmt(paths, *write, style),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, style: Style) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli, style),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

/// Whether diagnostics should be colored: never when `COMPOS_COLOR=0`.
pub fn color_enabled(env_value: Option<&str>, stderr_is_terminal: bool) -> bool {
    env_value != Some("0") && stderr_is_terminal
}
