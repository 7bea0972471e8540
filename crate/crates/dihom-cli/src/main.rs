//! `dihom`: validate concurrent-program models and compute their globular
//! and corner homologies, Hurewicz cokernels and deadlock reports.

mod dot;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dihom::cube_model::{enumerate_in, CubeError};
use dihom::cubical_sets::{read_model, validate, Model, ModelError};
use dihom::free_cat::{Caps, Category, FreeCatError, FreeCategory};
use dihom::homology_engine::HomologyError;
use dihom::invariants::{deadlock_report, homology, hurewicz_cokernel, InvariantError, Theory, MAX_DEGREE};
use dihom::nerve::{all_cubes, cells_up_to_two, enumerate_corner_generators, NerveError};

use output::Output;

#[derive(Parser, Debug)]
#[command(name = "dihom", version, about = "Directed homology of cubical models of concurrent programs")]
struct Cli {
    /// Enumeration caps as `max_words,max_len`.
    #[arg(long, global = true, value_parser = parse_caps, default_value = "200000,64")]
    caps: Caps,
    /// Print machine-readable JSON (schema `dihom/1`) instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file and print its size.
    Validate {
        model: PathBuf,
        /// Also write the 1-skeleton and squares as a Graphviz file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// List the cells of the free ω-category on the n-cube.
    In {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// List the paths of a model.
    Paths {
        #[command(flatten)]
        view: ViewArgs,
    },
    /// List the cells of dimension ≤ 2 of the free 2-category of a model.
    Cells {
        #[command(flatten)]
        view: ViewArgs,
    },
    /// Homology group with cycle representatives.
    Homology {
        #[command(flatten)]
        view: ViewArgs,
        #[command(flatten)]
        degree: DegreeArgs,
    },
    /// Cokernel of the Hurewicz map into negative or positive corner homology.
    Hurewicz {
        #[command(flatten)]
        view: ViewArgs,
        #[command(flatten)]
        degree: DegreeArgs,
    },
    /// Deadlocks, unreachable states and the cokernels that detect them.
    Deadlocks {
        model: PathBuf,
        /// Intended initial states, comma separated (grids default to the
        /// lower-left corner).
        #[arg(long, value_delimiter = ',')]
        initial: Option<Vec<String>>,
        /// Intended final states, comma separated (grids default to the
        /// upper-right corner).
        #[arg(long = "final", value_delimiter = ',')]
        fin: Option<Vec<String>>,
        /// Also write the graph with deadlocks and unreachable states marked.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// List singular n-cubes, or corner generators with `--theory neg|pos`.
    Cubes {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "gl", value_parser = parse_theory)]
        theory: Theory,
    },
}

#[derive(Args, Debug)]
struct ViewArgs {
    model: PathBuf,
    /// Restrict to paths from initial states to final states.
    #[arg(long)]
    bilocal: bool,
}

#[derive(Args, Debug)]
struct DegreeArgs {
    /// gl, neg or pos.
    #[arg(long, default_value = "gl", value_parser = parse_theory)]
    theory: Theory,
    /// Homology degree, at most 2.
    #[arg(long, default_value_t = 1)]
    degree: usize,
}

fn parse_caps(s: &str) -> Result<Caps, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [w, l] = parts.as_slice() else {
        return Err(format!("expected max_words,max_len, got {s:?}"));
    };
    let num = |x: &str| x.parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let caps = Caps { max_words: num(w)?, max_len: num(l)? };
    if caps.max_words == 0 || caps.max_len == 0 {
        return Err("caps must be positive".into());
    }
    Ok(caps)
}

fn parse_theory(s: &str) -> Result<Theory, String> {
    s.parse()
}

/// Exit codes.
const OK: u8 = 0;
const INVALID: u8 = 1;
const CAPPED: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Failure {
        Failure { code: INVALID, kind: "invalid", message: message.into() }
    }
}

fn free_cat_failure(e: &FreeCatError) -> Failure {
    match e {
        FreeCatError::CapExceeded { .. } => Failure { code: CAPPED, kind: "cap_exceeded", message: e.to_string() },
        _ => Failure::invalid(e.to_string()),
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        Failure::invalid(e.to_string())
    }
}

impl From<FreeCatError> for Failure {
    fn from(e: FreeCatError) -> Failure {
        free_cat_failure(&e)
    }
}

impl From<NerveError> for Failure {
    fn from(e: NerveError) -> Failure {
        match &e {
            NerveError::Category(c) => free_cat_failure(c),
            NerveError::DimensionTooHigh { .. } => Failure::invalid(e.to_string()),
            _ => Failure { code: INTERNAL, kind: "internal", message: e.to_string() },
        }
    }
}

impl From<CubeError> for Failure {
    fn from(e: CubeError) -> Failure {
        match e {
            CubeError::CapExceeded { .. } => Failure::invalid(e.to_string()),
            _ => Failure { code: INTERNAL, kind: "internal", message: e.to_string() },
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Failure {
        match e {
            InvariantError::Model(m) => m.into(),
            InvariantError::Category(c) => c.into(),
            InvariantError::Nerve(n) => n.into(),
            InvariantError::NotExhaustive(_) => Failure { code: CAPPED, kind: "cap_exceeded", message: e.to_string() },
            InvariantError::Homology(HomologyError::DegreeOutOfRange(_))
            | InvariantError::Degree(_)
            | InvariantError::NotNonContracting(_)
            | InvariantError::NotAFunctor(_) => Failure::invalid(e.to_string()),
            InvariantError::Homology(_) | InvariantError::Internal(_) => {
                Failure { code: INTERNAL, kind: "internal", message: e.to_string() }
            }
        }
    }
}

fn load(path: &Path) -> Result<(Model, Arc<FreeCategory>), Failure> {
    let model = read_model(path)?;
    let cat = Arc::new(FreeCategory::new(model.to_polygraph()?)?);
    cat.check_acyclic()?;
    Ok((model, cat))
}

fn view(args: &ViewArgs) -> Result<(Model, Category), Failure> {
    let (model, cat) = load(&args.model)?;
    let full = Category::full(cat);
    Ok((model, if args.bilocal { full.bilocalize_states() } else { full }))
}

fn check_degree(d: &DegreeArgs) -> Result<(), Failure> {
    if d.degree > MAX_DEGREE {
        return Err(Failure::invalid(format!("--degree {} is above the maximum {MAX_DEGREE}", d.degree)));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let caps = cli.caps;
    match &cli.command {
        Command::Validate { model, dot } => {
            let m = read_model(model)?;
            if let Model::Cubical(k) = &m {
                let report = validate(k);
                if !report.is_valid() {
                    return Err(Failure::invalid(report.to_string()));
                }
            }
            let (_, cat) = load(model)?;
            if let Some(path) = dot {
                dot::write(path, &cat, &[], &[])?;
            }
            Ok(output::validate(&m, &cat))
        }
        Command::In { n } => Ok(output::cube_cells(*n, &enumerate_in(*n)?)),
        Command::Paths { view: args } => {
            let (_, v) = view(args)?;
            let paths = v.paths(None, None)?;
            Ok(output::paths(&v, &paths))
        }
        Command::Cells { view: args } => {
            let (_, v) = view(args)?;
            let cells = cells_up_to_two(&v, caps)?;
            Ok(output::cells(&v, &cells))
        }
        Command::Homology { view: args, degree } => {
            check_degree(degree)?;
            let (_, v) = view(args)?;
            Ok(output::homology(&homology(&v, degree.theory, degree.degree, caps)?))
        }
        Command::Hurewicz { view: args, degree } => {
            check_degree(degree)?;
            let Some(alpha) = degree.theory.alpha() else {
                return Err(Failure::invalid("hurewicz needs --theory neg or pos"));
            };
            let (_, v) = view(args)?;
            Ok(output::cokernel(&hurewicz_cokernel(&v, alpha, degree.degree, caps)?))
        }
        Command::Deadlocks { model, initial, fin, dot } => {
            let (m, cat) = load(model)?;
            let intended = match (initial, fin) {
                (None, None) => None,
                (i, f) => {
                    let names = |s: &[usize]| s.iter().map(|&v| cat.poly.vertices[v].clone()).collect::<Vec<_>>();
                    Some((
                        i.clone().unwrap_or_else(|| names(&cat.initial_states())),
                        f.clone().unwrap_or_else(|| names(&cat.final_states())),
                    ))
                }
            };
            let report = deadlock_report(&m, intended, caps)?;
            if let Some(path) = dot {
                dot::write(path, &cat, &report.deadlocks, &report.unreachable)?;
            }
            Ok(output::deadlocks(&report))
        }
        Command::Cubes { view: args, n, theory } => {
            if *n > 3 {
                return Err(Failure::invalid(format!("--n {n} is above the maximum 3")));
            }
            let (_, v) = view(args)?;
            let cubes = match theory.alpha() {
                None => all_cubes(&v, *n, caps)?,
                Some(alpha) => enumerate_corner_generators(&v, alpha, *n, caps)?,
            };
            Ok(output::cubes(&v, *n, *theory, &cubes))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::In { .. } => "in",
        Command::Paths { .. } => "paths",
        Command::Cells { .. } => "cells",
        Command::Homology { .. } => "homology",
        Command::Hurewicz { .. } => "hurewicz",
        Command::Deadlocks { .. } => "deadlocks",
        Command::Cubes { .. } => "cubes",
    }
}

fn report_failure(json: bool, command: Option<&str>, f: &Failure) -> ExitCode {
    if json {
        let body = json!({
            "schema": output::SCHEMA,
            "command": command,
            "error": { "kind": f.kind, "message": f.message, "exit_code": f.code },
        });
        eprintln!("{}", serde_json::to_string_pretty(&body).expect("json"));
    } else {
        eprintln!("error: {}", f.message);
    }
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::from(OK);
            }
            let json = std::env::args().any(|a| a == "--json");
            if json {
                return report_failure(true, None, &Failure::invalid(e.to_string().trim_end()));
            }
            eprint!("{e}");
            return ExitCode::from(INVALID);
        }
    };
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                let body: Value = out.json(name);
                println!("{}", serde_json::to_string_pretty(&body).expect("json"));
            } else {
                print!("{}", out.text);
                for c in &out.caveats {
                    eprintln!("caveat: {c}");
                }
            }
            ExitCode::from(if out.partial { CAPPED } else { OK })
        }
        Err(f) => report_failure(cli.json, Some(name), &f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_parse() {
        assert_eq!(parse_caps("10, 4").unwrap(), Caps { max_words: 10, max_len: 4 });
        assert!(parse_caps("10").is_err());
        assert!(parse_caps("0,4").is_err());
        assert!(parse_caps("a,4").is_err());
    }

    #[test]
    fn exit_codes_by_error() {
        assert_eq!(Failure::from(InvariantError::Degree(5)).code, INVALID);
        assert_eq!(Failure::from(InvariantError::NotExhaustive("x".into())).code, CAPPED);
        assert_eq!(Failure::from(InvariantError::Internal("x".into())).code, INTERNAL);
        assert_eq!(Failure::from(InvariantError::Homology(HomologyError::NotAChainMap(1))).code, INTERNAL);
        let cap = FreeCatError::CapExceeded { max_words: 1, max_len: 1 };
        assert_eq!(Failure::from(NerveError::Category(cap)).code, CAPPED);
    }
}
