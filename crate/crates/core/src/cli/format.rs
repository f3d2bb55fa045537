//! Text formats for graphs and transition systems.
//!
//! Graph file:
//!
//! ```text
//! # two loops at one vertex
//! vertices: a
//! edge a.0 a.1
//! edge a.2 a.3
//! ```
//!
//! Transition file, one line per vertex, either absolute (`a: 01|23`) or
//! relative to an Euler system (`a: psi`).

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::euler::{transition_for_label, EulerSystem, TransitionLabel};
use crate::graph4::{Graph4R, GraphError, HalfEdge, Transition, TransitionSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("no vertices declared")]
    NoVertices,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown vertex {name:?}")]
    UnknownVertex { line: usize, name: String },
    #[error("line {line}: SlotReused: half-edge {vertex}.{slot} already used on line {first}")]
    SlotReused {
        line: usize,
        vertex: String,
        slot: u8,
        first: usize,
    },
    #[error("line {line}: SlotMissing: vertex {vertex:?} has only {used} of 4 slots in use")]
    SlotMissing {
        line: usize,
        vertex: String,
        used: usize,
    },
    #[error("line {line}: vertex {name:?} declared twice")]
    DuplicateVertex { line: usize, name: String },
    #[error("line {line}: transition for {name:?} given twice")]
    DuplicateTransition { line: usize, name: String },
    #[error("no transition given for vertex {0:?}")]
    MissingTransition(String),
    #[error("line {line}: relative label {label:?} needs --relative-to")]
    RelativeWithoutEuler { line: usize, label: String },
    #[error("{0}")]
    Graph(#[from] GraphError),
}

/// Strips a trailing `#` comment and surrounding whitespace.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph4R, FormatError> {
    let mut names: Option<(usize, Vec<String>)> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut used: HashMap<(usize, u8), usize> = HashMap::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("vertices:") {
            if names.is_some() {
                return Err(syntax(line, "second `vertices:` line"));
            }
            let list: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            for (k, name) in list.iter().enumerate() {
                if index.insert(name.clone(), k).is_some() {
                    return Err(FormatError::DuplicateVertex {
                        line,
                        name: name.clone(),
                    });
                }
            }
            names = Some((line, list));
            continue;
        }
        let mut words = body.split_whitespace();
        if words.next() != Some("edge") {
            return Err(syntax(
                line,
                format!("expected `vertices:` or `edge`, found {body:?}"),
            ));
        }
        if names.is_none() {
            return Err(syntax(line, "`edge` before `vertices:`"));
        }
        let ends: Vec<&str> = words.collect();
        if ends.len() != 2 {
            return Err(syntax(line, "an edge has exactly two endpoints"));
        }
        let mut pair = [HalfEdge::new(0, 0); 2];
        for (k, end) in ends.iter().enumerate() {
            let (name, slot) = end
                .rsplit_once('.')
                .ok_or_else(|| syntax(line, format!("endpoint {end:?} is not `vertex.slot`")))?;
            let slot: u8 = match slot.parse() {
                Ok(s) if s < 4 => s,
                _ => return Err(syntax(line, format!("slot in {end:?} is not 0..3"))),
            };
            let v = *index.get(name).ok_or_else(|| FormatError::UnknownVertex {
                line,
                name: name.to_string(),
            })?;
            if let Some(&first) = used.get(&(v, slot)) {
                return Err(FormatError::SlotReused {
                    line,
                    vertex: name.to_string(),
                    slot,
                    first,
                });
            }
            used.insert((v, slot), line);
            pair[k] = HalfEdge::new(v, slot);
        }
        edges.push((pair[0], pair[1]));
    }
    let (decl_line, names) = names.ok_or(FormatError::NoVertices)?;
    if names.is_empty() {
        return Err(FormatError::NoVertices);
    }
    for (v, name) in names.iter().enumerate() {
        let count = (0..4).filter(|&s| used.contains_key(&(v, s))).count();
        if count < 4 {
            return Err(FormatError::SlotMissing {
                line: decl_line,
                vertex: name.clone(),
                used: count,
            });
        }
    }
    Ok(Graph4R::new(names, edges)?)
}

pub fn print_graph(g: &Graph4R) -> String {
    let mut out = format!("vertices: {}\n", g.names().join(" "));
    for &(a, b) in g.edges() {
        writeln!(
            out,
            "edge {}.{} {}.{}",
            g.name(a.vertex),
            a.slot,
            g.name(b.vertex),
            b.slot
        )
        .unwrap();
    }
    out
}

/// Parses a transition file. Relative labels are resolved against
/// `relative_to`.
pub fn parse_transitions(
    text: &str,
    g: &Graph4R,
    relative_to: Option<&EulerSystem>,
) -> Result<TransitionSystem, FormatError> {
    let mut choice: Vec<Option<Transition>> = vec![None; g.vertex_count()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let (name, value) = body.split_once(':').ok_or_else(|| {
            syntax(
                line,
                format!("expected `vertex: transition`, found {body:?}"),
            )
        })?;
        let (name, value) = (name.trim(), value.trim());
        let v = g
            .vertex_index(name)
            .ok_or_else(|| FormatError::UnknownVertex {
                line,
                name: name.to_string(),
            })?;
        let t = if let Ok(t) = value.parse::<Transition>() {
            t
        } else if let Ok(label) = value.parse::<TransitionLabel>() {
            let c = relative_to.ok_or_else(|| FormatError::RelativeWithoutEuler {
                line,
                label: value.to_string(),
            })?;
            transition_for_label(c, v, label)
        } else {
            return Err(syntax(
                line,
                format!("{value:?} is neither a transition (01|23, 02|13, 03|12) nor a label (phi, chi, psi)"),
            ));
        };
        if choice[v].replace(t).is_some() {
            return Err(FormatError::DuplicateTransition {
                line,
                name: name.to_string(),
            });
        }
    }
    let choice = choice
        .into_iter()
        .enumerate()
        .map(|(v, t)| t.ok_or_else(|| FormatError::MissingTransition(g.name(v).to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TransitionSystem::new(choice))
}

pub fn print_transitions(g: &Graph4R, ts: &TransitionSystem) -> String {
    let mut out = String::new();
    for v in 0..g.vertex_count() {
        writeln!(out, "{}: {}", g.name(v), ts.get(v)).unwrap();
    }
    out
}

/// Single-line form `a:01|23 b:03|12`.
pub fn inline_transitions(g: &Graph4R, ts: &TransitionSystem) -> String {
    (0..g.vertex_count())
        .map(|v| format!("{}:{}", g.name(v), ts.get(v)))
        .collect::<Vec<_>>()
        .join(" ")
}
