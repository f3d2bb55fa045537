//! Command-line surface.
//!
//! Exit codes: 0 success, 1 input error, 2 property violation (verify and
//! profile engine disagreement), 3 resource guard.

pub mod format;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::{
    dow, hierholzer, kotzig_orbit_limited, EulerError, EulerSystem, EXHAUSTIVE_LIMIT,
};
use crate::gf2::Gf2Matrix;
use crate::graph4::{connected_components, trace_partition, Graph4R};
use crate::interlace::modified_interlacement_matrix;
use crate::profile::{profile_by_nullity, profile_by_tracing, ProfileError, ProfileOptions};
use crate::random::{random_connected_graph, random_graph};
use format::{
    inline_transitions, parse_graph, parse_transitions, print_graph, print_transitions, FormatError,
};
use verify::{VerifyError, VerifyMode, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "interlacement",
    version,
    about = "Modified interlacement matrices of 4-regular graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph file and report its size.
    Validate { graph: PathBuf },
    /// Print an Euler system as a transition file with its double occurrence words.
    Euler { graph: PathBuf },
    /// Print M(C, P) with its rank, kernel, |P| and c(F).
    Matrix {
        graph: PathBuf,
        /// Transition file of the Euler system C (default: Hierholzer's).
        #[arg(long)]
        euler: Option<PathBuf>,
        /// Transition file of the partition P (default: C itself).
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Euler system used to resolve phi/chi/psi labels in the partition file.
        #[arg(long)]
        relative_to: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// List every Euler system reachable by kappa-transforms.
    Orbit {
        graph: PathBuf,
        /// Give up once the orbit exceeds this many systems.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Coefficients of the circuit-partition generating function.
    Profile {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Trace)]
        engine: Engine,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Lift the vertex limit on exhaustive enumeration.
        #[arg(long)]
        allow_large: bool,
        /// Report progress on stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Run every theorem check on a graph.
    Verify {
        graph: PathBuf,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        allow_large: bool,
        #[arg(long, hide = true)]
        corrupt_theorem1: bool,
    },
    /// Print a random 4-regular multigraph (random matching on half-edges).
    Generate {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Try successive seeds until the graph is connected.
        #[arg(long)]
        connected: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Trace,
    Nullity,
    Both,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Guard(_) => 3,
            _ => 1,
        }
    }
}

/// Output of a successful command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

/// JSON form of `matrix --json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub vertices: Vec<String>,
    pub matrix: Vec<Vec<u8>>,
    pub rank: usize,
    pub kernel: Vec<Vec<u8>>,
    pub p_size: usize,
    pub components: usize,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<Graph4R, CliError> {
    parse_graph(&read(path)?).map_err(|source| CliError::Format {
        path: path.display().to_string(),
        source,
    })
}

fn load_euler(g: &Graph4R, path: &Path) -> Result<EulerSystem, CliError> {
    let ts = parse_transitions(&read(path)?, g, None).map_err(|source| CliError::Format {
        path: path.display().to_string(),
        source,
    })?;
    EulerSystem::from_transitions(g, ts)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

pub fn validate(g: &Graph4R) -> String {
    format!(
        "{}, {}, {}\n",
        plural(g.vertex_count(), "vertex", "vertices"),
        plural(g.edge_count(), "edge", "edges"),
        plural(connected_components(g).count, "component", "components")
    )
}

pub fn euler(g: &Graph4R) -> String {
    let c = hierholzer(g);
    let mut out = print_transitions(g, c.transitions());
    for comp in 0..connected_components(g).count {
        let word = dow(g, &c, comp).expect("one circuit per component");
        writeln!(out, "# word: {}", word.display(g)).unwrap();
    }
    out
}

pub fn matrix_report(
    g: &Graph4R,
    c: &EulerSystem,
    p: &crate::graph4::TransitionSystem,
) -> MatrixReport {
    let m = modified_interlacement_matrix(c, p)
        .expect("same graph")
        .matrix;
    MatrixReport {
        vertices: g.names().to_vec(),
        matrix: m.to_rows(),
        rank: m.rank(),
        kernel: m.kernel_basis().iter().map(|v| v.to_bits()).collect(),
        p_size: trace_partition(g, p).size(),
        components: connected_components(g).count,
    }
}

/// Matrix with row and column labels, padded to the longest name.
pub fn render_matrix(names: &[String], m: &Gf2Matrix) -> String {
    let width = names.iter().map(String::len).max().unwrap_or(1);
    let mut out = format!("{:width$}", "");
    for name in names {
        write!(out, " {name:>width$}").unwrap();
    }
    out.push('\n');
    for (r, name) in names.iter().enumerate() {
        write!(out, "{name:width$}").unwrap();
        for c in 0..m.cols() {
            write!(out, " {:>width$}", m.get(r, c) as u8).unwrap();
        }
        out.push('\n');
    }
    out
}

fn render_report(
    g: &Graph4R,
    c: &EulerSystem,
    p: &crate::graph4::TransitionSystem,
    r: &MatrixReport,
) -> String {
    let m = Gf2Matrix::from_rows(&r.matrix).expect("rectangular");
    let mut out = format!(
        "euler: {}\npartition: {}\n",
        inline_transitions(g, c.transitions()),
        inline_transitions(g, p)
    );
    out.push_str(&render_matrix(&r.vertices, &m));
    writeln!(out, "hex: {}", m.to_hex_rows().join(" ")).unwrap();
    writeln!(out, "rank: {}", r.rank).unwrap();
    let kernel: Vec<String> = r
        .kernel
        .iter()
        .map(|k| {
            format!(
                "({})",
                k.iter().map(u8::to_string).collect::<Vec<_>>().join(" ")
            )
        })
        .collect();
    writeln!(
        out,
        "kernel: {}",
        if kernel.is_empty() {
            "none".to_string()
        } else {
            kernel.join(" ")
        }
    )
    .unwrap();
    writeln!(out, "p_size: {}\ncomponents: {}", r.p_size, r.components).unwrap();
    out
}

pub fn orbit(g: &Graph4R, limit: Option<usize>) -> Result<String, CliError> {
    let start = hierholzer(g);
    let orbit =
        kotzig_orbit_limited(g, &start, limit.unwrap_or(usize::MAX)).map_err(|e| match e {
            EulerError::OrbitTooLarge { .. } => CliError::Guard(e.to_string()),
            other => CliError::Input(other.to_string()),
        })?;
    let mut out = format!("orbit size: {}\n", orbit.len());
    for c in &orbit {
        writeln!(out, "{}", inline_transitions(g, c.transitions())).unwrap();
    }
    Ok(out)
}

fn profile_error(e: ProfileError) -> CliError {
    match e {
        ProfileError::TooLarge { .. } | ProfileError::Unsupported => CliError::Guard(e.to_string()),
        ProfileError::GraphMismatch => CliError::Input(e.to_string()),
    }
}

pub fn profile(g: &Graph4R, engine: Engine, options: &ProfileOptions) -> Result<Output, CliError> {
    let c = hierholzer(g);
    let traced = match engine {
        Engine::Trace | Engine::Both => {
            Some(profile_by_tracing(g, options).map_err(profile_error)?)
        }
        Engine::Nullity => None,
    };
    let nullity = match engine {
        Engine::Nullity | Engine::Both => {
            Some(profile_by_nullity(g, &c, options).map_err(profile_error)?)
        }
        Engine::Trace => None,
    };
    match (traced, nullity) {
        (Some(t), Some(n)) => {
            let agree = t == n;
            let mut stdout = format!("{t}\n");
            if agree {
                stdout.push_str("engines agree: yes\n");
            } else {
                writeln!(stdout, "engines agree: no\nnullity: {n}").unwrap();
            }
            Ok(Output {
                stdout,
                code: if agree { 0 } else { 2 },
            })
        }
        (Some(p), None) | (None, Some(p)) => Ok(Output::ok(format!("{p}\n"))),
        (None, None) => unreachable!("at least one engine runs"),
    }
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate { graph } => Ok(Output::ok(validate(&load_graph(graph)?))),
        Command::Euler { graph } => Ok(Output::ok(euler(&load_graph(graph)?))),
        Command::Matrix {
            graph,
            euler,
            partition,
            relative_to,
            json,
        } => {
            let g = load_graph(graph)?;
            let c = match euler {
                Some(path) => load_euler(&g, path)?,
                None => hierholzer(&g),
            };
            let reference = relative_to
                .as_deref()
                .map(|p| load_euler(&g, p))
                .transpose()?;
            let p =
                match partition {
                    Some(path) => parse_transitions(&read(path)?, &g, reference.as_ref()).map_err(
                        |source| CliError::Format {
                            path: path.display().to_string(),
                            source,
                        },
                    )?,
                    None => c.transitions().clone(),
                };
            let report = matrix_report(&g, &c, &p);
            let stdout = if *json {
                serde_json::to_string(&report).expect("serializable") + "\n"
            } else {
                render_report(&g, &c, &p, &report)
            };
            Ok(Output::ok(stdout))
        }
        Command::Orbit { graph, limit } => Ok(Output::ok(orbit(&load_graph(graph)?, *limit)?)),
        Command::Profile {
            graph,
            engine,
            threads,
            allow_large,
            progress,
        } => {
            let options = ProfileOptions {
                threads: (*threads).max(1),
                max_vertices: if *allow_large {
                    usize::MAX
                } else {
                    EXHAUSTIVE_LIMIT
                },
                progress: *progress,
            };
            profile(&load_graph(graph)?, *engine, &options)
        }
        Command::Verify {
            graph,
            exhaustive,
            samples,
            seed,
            threads,
            allow_large,
            corrupt_theorem1,
        } => {
            let g = load_graph(graph)?;
            let mode = match (samples, exhaustive) {
                (Some(count), _) => VerifyMode::Samples {
                    count: *count,
                    seed: *seed,
                },
                (None, _) => VerifyMode::Exhaustive,
            };
            let options = VerifyOptions {
                mode,
                threads: *threads,
                allow_large: *allow_large,
                corrupt_theorem1: *corrupt_theorem1,
            };
            let report = verify::verify(&g, &options).map_err(|e| match e {
                VerifyError::TooLarge { .. } => CliError::Guard(e.to_string()),
                VerifyError::Euler(EulerError::OrbitTooLarge { .. }) => {
                    CliError::Guard(e.to_string())
                }
                VerifyError::Euler(other) => CliError::Input(other.to_string()),
            })?;
            Ok(Output {
                stdout: report.render(),
                code: if report.passed() { 0 } else { 2 },
            })
        }
        Command::Generate {
            vertices,
            seed,
            connected,
        } => {
            if *vertices == 0 {
                return Err(CliError::Input("--vertices must be at least 1".into()));
            }
            let (g, used) = if *connected {
                random_connected_graph(*vertices, *seed)
            } else {
                (random_graph(*vertices, *seed), *seed)
            };
            Ok(Output::ok(format!(
                "# random matching, seed {used}\n{}",
                print_graph(&g)
            )))
        }
    }
}
