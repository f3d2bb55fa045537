//! Interlacement graphs and modified interlacement matrices.
//!
//! `M(C, P)` starts from the adjacency matrix of the interlacement graph
//! `I(C)`; at a vertex where `P` uses the φ transition relative to `C` the
//! column becomes the unit vector, where it uses ψ the diagonal entry
//! becomes 1, and χ columns are left alone.

use std::fmt;

use crate::euler::{
    euler_from_partition, kappa_transform, label_transitions, EulerError, EulerSystem,
    TransitionLabel,
};
use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::graph4::{
    connected_components, core_space, core_vector, trace_partition, Graph4R, TransitionSystem,
};

/// A loopless simple graph on the vertex order of a [`Graph4R`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Gf2Matrix,
}

impl SimpleGraph {
    pub fn edgeless(n: usize) -> Self {
        Self {
            adjacency: Gf2Matrix::zeros(n, n),
        }
    }

    /// From a list of edges; panics on loops.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::edgeless(n);
        for &(a, b) in edges {
            g.toggle_edge(a, b);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a, b)
    }

    fn toggle_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "simple graphs have no loops");
        self.adjacency.toggle(a, b);
        self.adjacency.toggle(b, a);
    }

    /// Indicator vector of the open neighborhood of `v`.
    pub fn neighborhood(&self, v: usize) -> Gf2Vector {
        self.adjacency.row(v)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.neighborhood(v).ones().collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adjacent(a, b))
            .collect()
    }
}

pub fn adjacency_matrix(g: &SimpleGraph) -> Gf2Matrix {
    g.adjacency.clone()
}

/// `v ~ w` iff they alternate `v..w..v..w` on one circuit of `c`.
pub fn interlacement_graph(c: &EulerSystem) -> SimpleGraph {
    let n = c.vertex_count();
    let mut pos = vec![Vec::with_capacity(2); n];
    let mut circuit_of = vec![0; n];
    for (ci, circ) in c.circuits().iter().enumerate() {
        for (i, v) in circ.vertices().enumerate() {
            pos[v].push(i);
            circuit_of[v] = ci;
        }
    }
    let mut g = SimpleGraph::edgeless(n);
    for v in 0..n {
        let (p, q) = (pos[v][0], pos[v][1]);
        for w in v + 1..n {
            if circuit_of[w] != circuit_of[v] {
                continue;
            }
            let inside = pos[w].iter().filter(|&&r| p < r && r < q).count();
            if inside == 1 {
                g.toggle_edge(v, w);
            }
        }
    }
    g
}

/// Toggles adjacency between every pair of distinct neighbors of `v`.
pub fn simple_local_complement(g: &SimpleGraph, v: usize) -> SimpleGraph {
    let nbrs = g.neighbors(v);
    let mut out = g.clone();
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            out.toggle_edge(a, b);
        }
    }
    out
}

/// `M(C, P)` together with the Euler system and partition it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifiedInterlacementMatrix {
    pub matrix: Gf2Matrix,
    pub euler: EulerSystem,
    pub partition: TransitionSystem,
}

/// Applies the φ and ψ rules to an interlacement adjacency matrix.
pub fn modify_adjacency(adjacency: &Gf2Matrix, labels: &[TransitionLabel]) -> Gf2Matrix {
    let n = labels.len();
    let mut m = adjacency.clone();
    for (v, label) in labels.iter().enumerate() {
        match label {
            TransitionLabel::Phi => m.set_column(v, &Gf2Vector::unit(n, v)),
            TransitionLabel::Psi => m.set(v, v, true),
            TransitionLabel::Chi => {}
        }
    }
    m
}

pub fn modified_interlacement_matrix(
    c: &EulerSystem,
    ts: &TransitionSystem,
) -> Result<ModifiedInterlacementMatrix, EulerError> {
    let labels = label_transitions(c, ts)?;
    let base = adjacency_matrix(&interlacement_graph(c));
    Ok(ModifiedInterlacementMatrix {
        matrix: modify_adjacency(&base, &labels),
        euler: c.clone(),
        partition: ts.clone(),
    })
}

/// Adds row `v` to the row of every neighbor of `v` in `neighbors`.
pub fn add_row_to_neighbors(m: &Gf2Matrix, v: usize, neighbors: &Gf2Vector) -> Gf2Matrix {
    let mut out = m.clone();
    for w in neighbors.ones() {
        out.add_row_in_place(v, w)
            .expect("neighbors are distinct from v and in range");
    }
    out
}

/// `M^v_mod`, with neighbors of `v` taken in `I(C)` for the tagged `C`;
/// the result is tagged with `C * v`.
pub fn modified_local_complement(
    g: &Graph4R,
    m: &ModifiedInterlacementMatrix,
    v: usize,
) -> ModifiedInterlacementMatrix {
    let nbrs = interlacement_graph(&m.euler).neighborhood(v);
    ModifiedInterlacementMatrix {
        matrix: add_row_to_neighbors(&m.matrix, v, &nbrs),
        euler: kappa_transform(g, &m.euler, v),
        partition: m.partition.clone(),
    }
}

/// Why a theorem check failed, with the data needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two matrices that should have been equal.
    Matrices {
        what: &'static str,
        left: Gf2Matrix,
        right: Gf2Matrix,
    },
    Singular {
        what: &'static str,
        matrix: Gf2Matrix,
    },
    Nullity {
        kernel_dim: usize,
        partition_size: usize,
        components: usize,
    },
    Labels {
        vertex: usize,
        expected: TransitionLabel,
        got: TransitionLabel,
    },
    Independence {
        subset: Vec<usize>,
        independent: bool,
        closed_component: bool,
    },
    Other(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Matrices { what, left, right } => {
                write!(f, "{what}: {left:?} != {right:?}")
            }
            Violation::Singular { what, matrix } => write!(f, "{what} is singular: {matrix:?}"),
            Violation::Nullity {
                kernel_dim,
                partition_size,
                components,
            } => write!(
                f,
                "dim ker = {kernel_dim} but |P| - c = {partition_size} - {components}"
            ),
            Violation::Labels {
                vertex,
                expected,
                got,
            } => write!(f, "vertex #{vertex}: expected {expected}, got {got}"),
            Violation::Independence {
                subset,
                independent,
                closed_component,
            } => write!(
                f,
                "circuits {subset:?}: independent = {independent}, contains a whole component = {closed_component}"
            ),
            Violation::Other(s) => f.write_str(s),
        }
    }
}

fn matrices_equal(what: &'static str, left: Gf2Matrix, right: Gf2Matrix) -> Result<(), Violation> {
    if left == right {
        Ok(())
    } else {
        Err(Violation::Matrices { what, left, right })
    }
}

fn mim(c: &EulerSystem, ts: &TransitionSystem) -> Gf2Matrix {
    modified_interlacement_matrix(c, ts)
        .expect("systems of the same graph")
        .matrix
}

/// `M(C, P)^v_mod = M(C * v, P)`.
pub fn check_theorem1(
    g: &Graph4R,
    c: &EulerSystem,
    ts: &TransitionSystem,
    v: usize,
) -> Result<(), Violation> {
    check_theorem1_with(g, c, ts, v, |_| {})
}

/// As [`check_theorem1`], with a hook that may alter the left-hand side
/// before comparison (used for negative controls).
pub fn check_theorem1_with(
    g: &Graph4R,
    c: &EulerSystem,
    ts: &TransitionSystem,
    v: usize,
    hook: impl FnOnce(&mut Gf2Matrix),
) -> Result<(), Violation> {
    let m = modified_interlacement_matrix(c, ts).map_err(|e| Violation::Other(e.to_string()))?;
    let mut left = modified_local_complement(g, &m, v).matrix;
    hook(&mut left);
    let right = mim(&kappa_transform(g, c, v), ts);
    matrices_equal("M(C,P)^v_mod vs M(C*v,P)", left, right)
}

/// `M(C', C)` is nonsingular and `M(C', P) = M(C', C) M(C, P)`.
pub fn check_naturality(
    c: &EulerSystem,
    c2: &EulerSystem,
    ts: &TransitionSystem,
) -> Result<(), Violation> {
    let change = mim(c2, c.transitions());
    if change.inverse().is_err() {
        return Err(Violation::Singular {
            what: "M(C',C)",
            matrix: change,
        });
    }
    let product = change.mat_mul(&mim(c, ts)).expect("square of equal size");
    matrices_equal("M(C',P) vs M(C',C)M(C,P)", mim(c2, ts), product)
}

/// `M(C, C') M(C', C) = I`.
pub fn check_inverse(c: &EulerSystem, c2: &EulerSystem) -> Result<(), Violation> {
    let a = mim(c, c2.transitions());
    let b = mim(c2, c.transitions());
    let product = a.mat_mul(&b).expect("square of equal size");
    matrices_equal(
        "M(C,C')M(C',C) vs I",
        product,
        Gf2Matrix::identity(c.vertex_count()),
    )
}

/// `core(P) = ker M(C, P)` as subspaces of `GF(2)^V`.
pub fn check_core_kernel(
    g: &Graph4R,
    c: &EulerSystem,
    ts: &TransitionSystem,
) -> Result<(), Violation> {
    let n = g.vertex_count();
    let core = core_space(g, &trace_partition(g, ts));
    let kernel = Gf2Matrix::from_vectors(n, &mim(c, ts).kernel_basis());
    if core.spans_equal(&kernel).expect("same column count") {
        Ok(())
    } else {
        Err(Violation::Matrices {
            what: "core(P) basis vs ker M(C,P) basis",
            left: core.rref(),
            right: kernel.rref(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NullityReport {
    pub kernel_dim: usize,
    pub partition_size: usize,
    pub components: usize,
}

impl NullityReport {
    pub fn holds(&self) -> bool {
        self.kernel_dim + self.components == self.partition_size
    }
}

pub fn circuit_nullity(g: &Graph4R, c: &EulerSystem, ts: &TransitionSystem) -> NullityReport {
    NullityReport {
        kernel_dim: mim(c, ts).nullity(),
        partition_size: trace_partition(g, ts).size(),
        components: connected_components(g).count,
    }
}

pub fn check_circuit_nullity(
    g: &Graph4R,
    c: &EulerSystem,
    ts: &TransitionSystem,
) -> Result<(), Violation> {
    let r = circuit_nullity(g, c, ts);
    if r.holds() {
        Ok(())
    } else {
        Err(Violation::Nullity {
            kernel_dim: r.kernel_dim,
            partition_size: r.partition_size,
            components: r.components,
        })
    }
}

/// The core vectors of the circuits in `subset` are independent iff no
/// component has all of its circuits inside `subset`.
pub fn check_core_independence(
    g: &Graph4R,
    ts: &TransitionSystem,
    subset: &[usize],
) -> Result<(), Violation> {
    let p = trace_partition(g, ts);
    let comps = connected_components(g);
    let cores: Vec<_> = subset
        .iter()
        .map(|&i| core_vector(g, &p.circuits[i]))
        .collect();
    let independent = Gf2Matrix::from_vectors(g.vertex_count(), &cores).rank() == subset.len();
    let comp_of = |i: usize| comps.of_vertex[p.circuits[i].crossings()[0].vertex()];
    let closed_component = (0..comps.count).any(|k| {
        (0..p.size())
            .filter(|&i| comp_of(i) == k)
            .all(|i| subset.contains(&i))
    });
    if independent != closed_component {
        Ok(())
    } else {
        Err(Violation::Independence {
            subset: subset.to_vec(),
            independent,
            closed_component,
        })
    }
}

/// Postconditions of [`euler_from_partition`] for a non-Euler partition:
/// only φ and χ relative to the result, χ at `v0` and φ elsewhere on
/// `gamma0`, and `core(gamma0) = e_v0 + N(v0)` in the result's
/// interlacement graph.
pub fn check_partition_lemma(g: &Graph4R, ts: &TransitionSystem) -> Result<(), Violation> {
    let p = trace_partition(g, ts);
    let united = euler_from_partition(g, &p).map_err(|e| Violation::Other(e.to_string()))?;
    let labels =
        label_transitions(&united.euler, ts).map_err(|e| Violation::Other(e.to_string()))?;
    if let Some(v) = labels.iter().position(|&l| l == TransitionLabel::Psi) {
        return Err(Violation::Labels {
            vertex: v,
            expected: TransitionLabel::Chi,
            got: TransitionLabel::Psi,
        });
    }
    if labels[united.v0] != TransitionLabel::Chi {
        return Err(Violation::Labels {
            vertex: united.v0,
            expected: TransitionLabel::Chi,
            got: labels[united.v0],
        });
    }
    for v in united.gamma0.vertices().filter(|&v| v != united.v0) {
        if labels[v] != TransitionLabel::Phi {
            return Err(Violation::Labels {
                vertex: v,
                expected: TransitionLabel::Phi,
                got: labels[v],
            });
        }
    }
    let n = g.vertex_count();
    let mut expected = interlacement_graph(&united.euler).neighborhood(united.v0);
    expected.toggle(united.v0);
    let core = core_vector(g, &united.gamma0);
    if core != expected {
        return Err(Violation::Matrices {
            what: "core(gamma0) vs e_v0 + N(v0)",
            left: Gf2Matrix::from_vectors(n, &[core]),
            right: Gf2Matrix::from_vectors(n, &[expected]),
        });
    }
    Ok(())
}

/// Labels relative to `C * v` predicted from labels relative to `C`: φ and
/// ψ swap at `v`, χ and ψ swap at neighbors of `v` in `I(C)`.
pub fn exchanged_labels(
    labels: &[TransitionLabel],
    v: usize,
    neighbors: &Gf2Vector,
) -> Vec<TransitionLabel> {
    use TransitionLabel::*;
    labels
        .iter()
        .enumerate()
        .map(|(w, &l)| match (w == v, neighbors.get(w), l) {
            (true, _, Phi) => Psi,
            (true, _, Psi) => Phi,
            (false, true, Chi) => Psi,
            (false, true, Psi) => Chi,
            _ => l,
        })
        .collect()
}

pub fn check_label_exchange(
    g: &Graph4R,
    c: &EulerSystem,
    ts: &TransitionSystem,
    v: usize,
) -> Result<(), Violation> {
    let before = label_transitions(c, ts).map_err(|e| Violation::Other(e.to_string()))?;
    let nbrs = interlacement_graph(c).neighborhood(v);
    let predicted = exchanged_labels(&before, v, &nbrs);
    let after = label_transitions(&kappa_transform(g, c, v), ts)
        .map_err(|e| Violation::Other(e.to_string()))?;
    match (0..after.len()).find(|&w| after[w] != predicted[w]) {
        None => Ok(()),
        Some(w) => Err(Violation::Labels {
            vertex: w,
            expected: predicted[w],
            got: after[w],
        }),
    }
}

/// `I(C * v) = I(C)^v`.
pub fn check_local_complement(g: &Graph4R, c: &EulerSystem, v: usize) -> Result<(), Violation> {
    let left = interlacement_graph(&kappa_transform(g, c, v));
    let right = simple_local_complement(&interlacement_graph(c), v);
    matrices_equal("I(C*v) vs I(C)^v", left.adjacency, right.adjacency)
}
