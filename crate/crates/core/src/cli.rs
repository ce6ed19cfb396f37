//! Command-line frontend. Verdicts go to stdout, diagnostics to stderr.
//! Exit codes: 0 decided, 2 invalid input, 3 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::brute::{brute_member_capped, DEFAULT_DEPTH_CAP};
use crate::gog::{CycleTypeWord, GogError, GraphOfGroups, SpecError};
use crate::raag::{compile, SimpleGraph};
use crate::saturation::{SaturationError, SaturationState, Verdict, DEFAULT_MAX_ROUNDS};
use crate::spec::{GraphFile, QueryFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "benign-gwp", version, about = "Subgroup membership in benign graphs of groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a graph-of-groups spec.
    Check { spec: PathBuf },
    /// Decide whether the query element lies in the query subgroup.
    Member {
        spec: PathBuf,
        query: PathBuf,
        /// Log every applied step to stderr.
        #[arg(long)]
        trace: bool,
        /// Write round_%04d.dot snapshots into this directory.
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
        /// Round cap; reaching it is reported as an internal error.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
    },
    /// Decide whether a word of cycle type is trivial.
    Wordprob { spec: PathBuf, word: String },
    /// Compile a chordal graph into a graph-of-groups spec.
    Raag { graph: PathBuf, out: PathBuf },
    /// Search products of subgroup generators for the query element.
    BruteMember {
        spec: PathBuf,
        query: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
        depth: usize,
    },
}

/// A failed command: exit code plus message.
struct Failure(i32, String);

impl Failure {
    fn invalid(msg: impl ToString) -> Self {
        Failure(EXIT_INVALID, msg.to_string())
    }
}

impl From<GogError> for Failure {
    fn from(e: GogError) -> Self {
        Failure::invalid(e)
    }
}

impl From<SaturationError> for Failure {
    fn from(e: SaturationError) -> Self {
        let code = if e.is_internal() { EXIT_INTERNAL } else { EXIT_INVALID };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<GraphOfGroups, Failure> {
    GraphOfGroups::from_json(&read(path)?).map_err(|e| match e {
        SpecError::Invalid(GogError::Invalid(vs)) => Failure::invalid(
            vs.iter().map(|v| format!("invalid spec: {v}")).collect::<Vec<_>>().join("\n"),
        ),
        other => Failure::invalid(format!("{}: {other}", path.display())),
    })
}

fn load_query(g: &GraphOfGroups, path: &Path) -> Result<(Vec<CycleTypeWord>, CycleTypeWord), Failure> {
    let q = QueryFile::from_json(&read(path)?)
        .map_err(|e| Failure::invalid(format!("{}: malformed query: {e}", path.display())))?;
    let parse = |w: &str| g.parse_cycle(w).map_err(|e| Failure::invalid(format!("word \"{w}\": {e}")));
    let ks = q.subgroup.iter().map(|w| parse(w)).collect::<Result<Vec<_>, _>>()?;
    Ok((ks, parse(&q.element)?))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure(EXIT_INTERNAL, e.to_string());
    match command {
        Command::Check { spec } => {
            let g = load_spec(&spec)?;
            writeln!(out, "OK").map_err(io)?;
            writeln!(err, "{}", g.summary()).map_err(io)?;
        }
        Command::Member { spec, query, trace, dot, max_rounds } => {
            let g = load_spec(&spec)?;
            let (ks, elem) = load_query(&g, &query)?;
            let verdict = member(&g, &ks, &elem, trace, dot.as_deref(), max_rounds, err)?;
            writeln!(out, "{verdict}").map_err(io)?;
        }
        Command::Wordprob { spec, word } => {
            let g = load_spec(&spec)?;
            let w = g.parse_cycle(&word)?;
            let token = if g.is_trivial(&w)? { "TRIVIAL" } else { "NONTRIVIAL" };
            writeln!(out, "{token}").map_err(io)?;
        }
        Command::Raag { graph, out: out_path } => {
            let file = GraphFile::from_json(&read(&graph)?)
                .map_err(|e| Failure::invalid(format!("{}: malformed graph: {e}", graph.display())))?;
            let compiled = SimpleGraph::from_file(&file).and_then(|g| compile(&g)).map_err(Failure::invalid)?;
            fs::write(&out_path, compiled.spec.to_json_pretty())
                .map_err(|e| Failure::invalid(format!("{}: {e}", out_path.display())))?;
            writeln!(out, "OK").map_err(io)?;
            writeln!(
                err,
                "{} cliques, {} clique-tree edges, written to {}",
                compiled.tree.cliques.len(),
                compiled.tree.edges.len(),
                out_path.display()
            )
            .map_err(io)?;
        }
        Command::BruteMember { spec, query, depth } => {
            let g = load_spec(&spec)?;
            let (ks, elem) = load_query(&g, &query)?;
            let result = brute_member_capped(&g, &ks, &elem, depth, DEFAULT_DEPTH_CAP).map_err(Failure::invalid)?;
            writeln!(out, "{}", result.render(&g, &ks)).map_err(io)?;
        }
    }
    Ok(())
}

/// Saturation with optional trace and DOT snapshots: `round_0000.dot` is the
/// initial automaton, then one snapshot per round that changed something.
fn member(
    g: &GraphOfGroups,
    ks: &[CycleTypeWord],
    elem: &CycleTypeWord,
    trace: bool,
    dot: Option<&Path>,
    max_rounds: usize,
    err: &mut dyn Write,
) -> Result<Verdict, Failure> {
    let mut state = SaturationState::build(g, ks, elem);
    let snapshot = |state: &SaturationState| -> Result<(), Failure> {
        if let Some(dir) = dot {
            let path = dir.join(format!("round_{:04}.dot", state.rounds()));
            fs::write(&path, state.automaton().export_dot(g.table()))
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    };
    if let Some(dir) = dot {
        fs::create_dir_all(dir).map_err(|e| Failure::invalid(format!("{}: {e}", dir.display())))?;
    }
    snapshot(&state)?;
    if state.trivially_member() {
        if trace {
            let _ = writeln!(err, "empty element: trivially a member");
        }
        return Ok(Verdict::Member);
    }
    let mut logged = 0;
    loop {
        let changed = state.run_round()?;
        if trace {
            for event in &state.log()[logged..] {
                let _ = writeln!(err, "{}", event.render(g));
            }
            logged = state.log().len();
        }
        if !changed {
            break;
        }
        snapshot(&state)?;
        if state.rounds() >= max_rounds {
            return Err(SaturationError::RoundCap(max_rounds).into());
        }
    }
    if trace {
        let a = state.automaton();
        let _ = writeln!(
            err,
            "fixpoint after {} rounds: {} states, {} edges",
            state.rounds(),
            a.state_count(),
            a.edge_count()
        );
    }
    Ok(state.verdict())
}
