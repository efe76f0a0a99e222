use clap::{Args, Parser, Subcommand};
use pddl::diagnostics::Diagnostic;
use pddl::report::{chk_path, emit_chk, pretty_print_all, PrintOptions};
use pddl::syntax::{read_str, FileId};
use pddl::validator::{check_hints, parse_hints, parse_solution, solves, ValidateOptions, Verdict};
use pddl::Session;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;
const REFUSED: u8 = 3;

#[derive(Parser)]
#[command(name = "pddl", version, about = "Syntax checker and solution validator for PDDL 1.2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check files and write a `.chk` next to each (or into --out-dir).
    Check {
        #[command(flatten)]
        load: LoadArgs,
        #[command(flatten)]
        print: PrintArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Decide whether a solution solves a problem.
    Validate {
        #[command(flatten)]
        load: LoadArgs,
        /// Domain, situation and addendum files, loaded in order.
        #[arg(long, required = true, num_args = 1..)]
        domain: Vec<PathBuf>,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Extra hints, one list of nonprimitive action terms.
        #[arg(long)]
        hints: Option<PathBuf>,
        /// Check only the plan and the problem's own expansion.
        #[arg(long)]
        ignore_hints: bool,
        /// Write the structured report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Search nodes allowed per expansion.
        #[arg(long, default_value_t = pddl::expansion::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Pretty-print a file to standard output.
    Print {
        #[command(flatten)]
        print: PrintArgs,
        file: PathBuf,
    },
    /// Print the closed requirement set of the last domain defined.
    Requirements {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct LoadArgs {
    /// Enforce field order, one definition per file, and no addenda.
    #[arg(long, env = "PDDL_STRICT", value_parser = clap::builder::BoolishValueParser::new())]
    strict: bool,
}

#[derive(Args)]
struct PrintArgs {
    #[arg(long, default_value_t = 80)]
    width: usize,
    /// Keep atoms as written instead of lower-casing them.
    #[arg(long)]
    preserve_case: bool,
}

impl PrintArgs {
    fn options(&self) -> PrintOptions {
        PrintOptions {
            width: self.width,
            preserve_case: self.preserve_case,
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}")]
    Usage(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn report_diagnostics(name: &str, diags: &[Diagnostic]) {
    for d in diags {
        let severity = if d.is_error() { "error" } else { "warning" };
        eprintln!("{name}:{}: {severity}: {}: {}", d.span, d.description, d.subject);
    }
}

fn load(session: &mut Session, files: &[PathBuf]) -> Result<(), CliError> {
    for path in files {
        let text = read(path)?;
        session.load(&path.display().to_string(), &text);
    }
    Ok(())
}

fn check(strict: bool, opts: PrintOptions, out_dir: Option<&Path>, files: &[PathBuf]) -> Result<u8, CliError> {
    let mut session = Session::new(strict);
    load(&mut session, files)?;
    let mut status = OK;
    for (i, (f, path)) in session.files.iter().zip(files).enumerate() {
        let doc = emit_chk(FileId(i as u32), &f.parsed.forms, &f.diagnostics, opts);
        let out = match out_dir {
            Some(dir) => dir.join(chk_path(Path::new(path.file_name().unwrap_or_default()))),
            None => chk_path(path),
        };
        write(&out, &doc.text)?;
        report_diagnostics(&f.name, &f.diagnostics);
        let (errors, warnings) = pddl::diagnostics::tally(&f.diagnostics);
        println!("{}: {errors} errors, {warnings} warnings -> {}", f.name, out.display());
        if errors > 0 {
            status = FAILED;
        }
    }
    Ok(status)
}

struct ValidateArgs<'a> {
    strict: bool,
    domain: &'a [PathBuf],
    problem: &'a Path,
    solution: &'a Path,
    hints: Option<&'a Path>,
    report: Option<&'a Path>,
    options: ValidateOptions,
}

fn validate(a: ValidateArgs) -> Result<u8, CliError> {
    let mut session = Session::new(a.strict);
    let mut inputs = a.domain.to_vec();
    inputs.push(a.problem.to_path_buf());
    load(&mut session, &inputs)?;
    for f in &session.files {
        report_diagnostics(&f.name, &f.diagnostics);
    }
    if session.errors() > 0 {
        eprintln!("{} errors in the input files; not validating", session.errors());
        return Ok(FAILED);
    }
    let problem_file = session.files.last().expect("problem file loaded");
    let problem_name = problem_file
        .parsed
        .defs
        .iter()
        .rev()
        .find_map(|d| match &d.def {
            pddl::syntax::Definition::Problem(p) => Some(p.name.canonical.clone()),
            _ => None,
        })
        .ok_or_else(|| CliError::Usage(format!("{} defines no problem", a.problem.display())))?;
    let problem = session.registry.problem(&problem_name).expect("registered");
    let model = session.registry.domain(&problem.domain).expect("problem domain is checked");

    let sol_id = FileId(session.files.len() as u32);
    let sol_text = read(a.solution)?;
    let (mut solution, mut diags) = parse_solution(&sol_text, sol_id);
    // a malformed solution stops here; a primitive hint only warns, and the
    // expansion clause then fails
    let mut malformed = diags.iter().any(Diagnostic::is_error);
    diags.extend(check_hints(model, &solution.hints, &sol_text, sol_id).into_iter().map(Diagnostic::warning));
    report_diagnostics(&a.solution.display().to_string(), &diags);
    if let Some(h) = a.hints {
        let text = read(h)?;
        let id = FileId(sol_id.0 + 1);
        let (extra, mut hd) = parse_hints(&text, id);
        malformed |= hd.iter().any(Diagnostic::is_error);
        hd.extend(check_hints(model, &extra, &text, id).into_iter().map(Diagnostic::warning));
        report_diagnostics(&h.display().to_string(), &hd);
        solution.hints.extend(extra);
    }
    if malformed {
        return Ok(FAILED);
    }

    let report = solves(model, problem, &solution, a.options);
    print!("{report}");
    if let Some(path) = a.report {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write(path, &(json + "\n"))?;
    }
    Ok(match report.verdict {
        Verdict::Solves => OK,
        Verdict::Fails => FAILED,
        Verdict::Refused => REFUSED,
    })
}

fn print(opts: PrintOptions, file: &Path) -> Result<u8, CliError> {
    let text = read(file)?;
    let (forms, diags) = read_str(&text, FileId(0));
    print!("{}", pretty_print_all(&forms, opts));
    report_diagnostics(&file.display().to_string(), &diags);
    Ok(if diags.iter().any(Diagnostic::is_error) { FAILED } else { OK })
}

fn requirements(files: &[PathBuf]) -> Result<u8, CliError> {
    let mut session = Session::new(false);
    load(&mut session, files)?;
    if session.errors() > 0 {
        for f in &session.files {
            report_diagnostics(&f.name, &f.diagnostics);
        }
        return Ok(FAILED);
    }
    let name = session
        .files
        .iter()
        .rev()
        .flat_map(|f| f.parsed.defs.iter().rev())
        .find_map(|d| match &d.def {
            pddl::syntax::Definition::Domain(dom) => Some(dom.name.canonical.clone()),
            _ => None,
        })
        .ok_or_else(|| CliError::Usage("no domain definition in the input".into()))?;
    let model = session.registry.domain(&name).expect("registered");
    println!("{}", model.requirements.sorted_keywords().join(" "));
    Ok(OK)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check {
            load,
            print,
            out_dir,
            files,
        } => check(load.strict, print.options(), out_dir.as_deref(), &files),
        Command::Validate {
            load,
            domain,
            problem,
            solution,
            hints,
            ignore_hints,
            report,
            budget,
        } => validate(ValidateArgs {
            strict: load.strict,
            domain: &domain,
            problem: &problem,
            solution: &solution,
            hints: hints.as_deref(),
            report: report.as_deref(),
            options: ValidateOptions { ignore_hints, budget },
        }),
        Command::Print { print: p, file } => print(p.options(), &file),
        Command::Requirements { files } => requirements(&files),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}
