//! 4-regular multigraphs in half-edge form.
//!
//! Vertex `v` owns the four half-edges `4v..4v+3`; slot `s` of `v` is the
//! half-edge `4v + s`. Loops and parallel edges are ordinary edges here:
//! nothing in this module looks at vertex adjacency, only at half-edges.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::{Gf2Matrix, Gf2Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("vertex {0:?} declared twice")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("slot {slot} is not in 0..4")]
    InvalidSlot { slot: u8 },
    #[error("half-edge {vertex}.{slot} used by more than one edge")]
    SlotReused { vertex: String, slot: u8 },
    #[error("vertex {vertex:?} has only {used} of 4 slots in use")]
    SlotMissing { vertex: String, used: usize },
    #[error("transition system covers {got} vertices, graph has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("vertex {0:?} is not incident on two distinct circuits")]
    NotAJunction(String),
}

/// One end of an edge: a slot `0..4` at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub vertex: usize,
    pub slot: u8,
}

impl HalfEdge {
    pub fn new(vertex: usize, slot: u8) -> Self {
        Self { vertex, slot }
    }

    pub fn index(self) -> usize {
        4 * self.vertex + self.slot as usize
    }

    pub fn from_index(index: usize) -> Self {
        Self {
            vertex: index / 4,
            slot: (index % 4) as u8,
        }
    }
}

/// A validated 4-regular multigraph.
///
/// The vertex order given at construction indexes every vector and matrix
/// derived from the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph4R {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(HalfEdge, HalfEdge)>,
    mate: Vec<usize>,
}

impl Graph4R {
    /// Validates and builds a graph. Every slot of every vertex must be an
    /// endpoint of exactly one edge.
    pub fn new(names: Vec<String>, edges: Vec<(HalfEdge, HalfEdge)>) -> Result<Self, GraphError> {
        if names.is_empty() {
            return Err(GraphError::NoVertices);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let n = names.len();
        let mut mate = vec![usize::MAX; 4 * n];
        for &(a, b) in &edges {
            for h in [a, b] {
                if h.vertex >= n {
                    return Err(GraphError::UnknownVertex(format!("#{}", h.vertex)));
                }
                if h.slot > 3 {
                    return Err(GraphError::InvalidSlot { slot: h.slot });
                }
            }
            if a == b || mate[a.index()] != usize::MAX || mate[b.index()] != usize::MAX {
                let h = if a == b || mate[a.index()] != usize::MAX {
                    a
                } else {
                    b
                };
                return Err(GraphError::SlotReused {
                    vertex: names[h.vertex].clone(),
                    slot: h.slot,
                });
            }
            mate[a.index()] = b.index();
            mate[b.index()] = a.index();
        }
        for v in 0..n {
            let used = (0..4).filter(|s| mate[4 * v + s] != usize::MAX).count();
            if used < 4 {
                return Err(GraphError::SlotMissing {
                    vertex: names[v].clone(),
                    used,
                });
            }
        }
        Ok(Self {
            names,
            index,
            edges,
            mate,
        })
    }

    /// Builds a graph from vertex names and `(name, slot, name, slot)` edges.
    pub fn from_named(names: &[&str], edges: &[(&str, u8, &str, u8)]) -> Result<Self, GraphError> {
        let lookup: HashMap<&str, usize> = names.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let resolve = |name: &str, slot: u8| {
            lookup
                .get(name)
                .map(|&v| HalfEdge::new(v, slot))
                .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
        };
        let edges = edges
            .iter()
            .map(|&(a, i, b, j)| Ok((resolve(a, i)?, resolve(b, j)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Self::new(names.iter().map(|s| s.to_string()).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(HalfEdge, HalfEdge)] {
        &self.edges
    }

    /// The half-edge at the other end of the edge containing `h`.
    pub fn mate(&self, h: usize) -> usize {
        self.mate[h]
    }

    /// Disjoint union; the vertices of `other` follow those of `self`.
    /// Name clashes are resolved by suffixing `'`.
    pub fn disjoint_union(&self, other: &Graph4R) -> Graph4R {
        let n = self.vertex_count();
        let mut names = self.names.clone();
        for name in &other.names {
            let mut name = name.clone();
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        let shift = |h: HalfEdge| HalfEdge::new(h.vertex + n, h.slot);
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(a, b)| (shift(a), shift(b))))
            .collect();
        Graph4R::new(names, edges).expect("union of valid graphs is valid")
    }

    /// A stable fingerprint of the edge structure, used to catch objects
    /// built for one graph being used with another.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the mate table
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for &m in &self.mate {
            for byte in (m as u64).to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(0x0100_0000_01b3);
            }
        }
        hash
    }
}

/// Connected components of a graph, numbered by their lowest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub of_vertex: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn members(&self, component: usize) -> impl Iterator<Item = usize> + '_ {
        self.of_vertex
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c == component)
            .map(|(v, _)| v)
    }
}

pub fn connected_components(g: &Graph4R) -> Components {
    let n = g.vertex_count();
    let mut of_vertex = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if of_vertex[start] != usize::MAX {
            continue;
        }
        of_vertex[start] = count;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for s in 0..4 {
                let w = g.mate(4 * v + s) / 4;
                if of_vertex[w] == usize::MAX {
                    of_vertex[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    Components { of_vertex, count }
}

/// One of the three ways to pair the four slots at a vertex.
///
/// The discriminant is the XOR of paired slots, so the partner of slot `s`
/// is `s ^ t as u8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transition {
    /// `01|23`
    Pair01 = 1,
    /// `02|13`
    Pair02 = 2,
    /// `03|12`
    Pair03 = 3,
}

impl Transition {
    pub const ALL: [Transition; 3] = [Transition::Pair01, Transition::Pair02, Transition::Pair03];

    /// The transition pairing slot `a` with slot `b`.
    pub fn pairing(a: u8, b: u8) -> Self {
        Self::from_code(a ^ b).expect("slots must be distinct and in 0..4")
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Transition::Pair01),
            2 => Some(Transition::Pair02),
            3 => Some(Transition::Pair03),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn partner(self, slot: u8) -> u8 {
        slot ^ self.code()
    }

    /// Base-3 digit used by enumerations.
    pub fn digit(self) -> usize {
        self.code() as usize - 1
    }

    pub fn from_digit(d: usize) -> Self {
        Self::ALL[d]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Transition::Pair01 => "01|23",
            Transition::Pair02 => "02|13",
            Transition::Pair03 => "03|12",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid transition {0:?}; expected 01|23, 02|13 or 03|12")]
pub struct ParseTransitionError(pub String);

impl FromStr for Transition {
    type Err = ParseTransitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Transition::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ParseTransitionError(s.to_string()))
    }
}

/// A choice of transition at every vertex, indexed by vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionSystem {
    choice: Vec<Transition>,
}

impl TransitionSystem {
    pub fn new(choice: Vec<Transition>) -> Self {
        Self { choice }
    }

    pub fn uniform(n: usize, t: Transition) -> Self {
        Self { choice: vec![t; n] }
    }

    /// The system numbered `index` in the mixed-radix base-3 order, vertex 0
    /// being the least significant digit.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let choice = (0..n)
            .map(|_| {
                let d = (index % 3) as usize;
                index /= 3;
                Transition::from_digit(d)
            })
            .collect();
        Self { choice }
    }

    /// Position in the base-3 counter order; inverse of [`Self::from_index`].
    pub fn index(&self) -> u64 {
        self.choice
            .iter()
            .rev()
            .fold(0, |acc, t| 3 * acc + t.digit() as u64)
    }

    /// All `3^n` systems in base-3 counter order.
    pub fn enumerate(n: usize) -> impl Iterator<Item = TransitionSystem> {
        (0..3u64.pow(n as u32)).map(move |i| TransitionSystem::from_index(n, i))
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn get(&self, v: usize) -> Transition {
        self.choice[v]
    }

    pub fn set(&mut self, v: usize, t: Transition) {
        self.choice[v] = t;
    }

    pub fn with(&self, v: usize, t: Transition) -> Self {
        let mut out = self.clone();
        out.set(v, t);
        out
    }

    pub fn as_slice(&self) -> &[Transition] {
        &self.choice
    }

    /// Compact canonical key: one digit `1..=3` per vertex.
    pub fn key(&self) -> String {
        self.choice
            .iter()
            .map(|t| char::from(b'0' + t.code()))
            .collect()
    }

    fn check(&self, g: &Graph4R) -> Result<(), GraphError> {
        if self.len() != g.vertex_count() {
            return Err(GraphError::WrongLength {
                expected: g.vertex_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Passage of a circuit through a vertex: it arrives on `entered` and
/// leaves on `exited`, both half-edges of the same vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub entered: HalfEdge,
    pub exited: HalfEdge,
}

impl Crossing {
    pub fn vertex(&self) -> usize {
        self.entered.vertex
    }

    pub fn reversed(self) -> Self {
        Self {
            entered: self.exited,
            exited: self.entered,
        }
    }
}

/// A directed closed walk, stored as its cyclic sequence of crossings.
/// Between consecutive crossings the walk follows the edge from `exited`
/// to the next `entered`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    crossings: Vec<Crossing>,
}

impl Circuit {
    pub fn new(crossings: Vec<Crossing>) -> Self {
        Self { crossings }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Vertex sequence of the walk.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.crossings.iter().map(Crossing::vertex)
    }

    /// Number of times the circuit passes through `v` (0, 1 or 2).
    pub fn passes(&self, v: usize) -> usize {
        self.vertices().filter(|&w| w == v).count()
    }

    pub fn reversed(&self) -> Self {
        Self {
            crossings: self.crossings.iter().rev().map(|c| c.reversed()).collect(),
        }
    }

    /// Same cycle, started at crossing `start`.
    pub fn rotated(&self, start: usize) -> Self {
        let mut crossings = self.crossings.clone();
        crossings.rotate_left(start);
        Self { crossings }
    }

    /// Checks that consecutive crossings are joined by edges of `g`.
    pub fn is_walk_of(&self, g: &Graph4R) -> bool {
        let k = self.crossings.len();
        (0..k).all(|i| {
            let here = self.crossings[i];
            let next = self.crossings[(i + 1) % k];
            here.entered.vertex == here.exited.vertex
                && here.entered != here.exited
                && g.mate(here.exited.index()) == next.entered.index()
        })
    }
}

/// The circuits determined by a transition system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitPartition {
    pub source: TransitionSystem,
    pub circuits: Vec<Circuit>,
}

impl CircuitPartition {
    pub fn size(&self) -> usize {
        self.circuits.len()
    }

    /// Indices of the circuits through `v`, one entry per passage.
    pub fn circuits_at(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2);
        for (i, c) in self.circuits.iter().enumerate() {
            for _ in 0..c.passes(v) {
                out.push(i);
            }
        }
        out
    }
}

/// Successor on entered half-edges: cross the vertex by the transition, then
/// follow the edge to the half-edge it enters next.
#[inline]
fn successor(g: &Graph4R, ts: &TransitionSystem, h: usize) -> usize {
    g.mate(transition_partner(ts, h))
}

#[inline]
fn transition_partner(ts: &TransitionSystem, h: usize) -> usize {
    (h & !3) | (h & 3) ^ ts.get(h / 4).code() as usize
}

pub fn trace_partition(g: &Graph4R, ts: &TransitionSystem) -> CircuitPartition {
    ts.check(g).expect("transition system does not fit graph");
    let mut visited = vec![false; 4 * g.vertex_count()];
    let mut circuits = Vec::new();
    for start in 0..visited.len() {
        if visited[start] {
            continue;
        }
        let mut crossings = Vec::new();
        let mut h = start;
        loop {
            let out = transition_partner(ts, h);
            // the mirror orbit enters where this one exits
            visited[h] = true;
            visited[out] = true;
            crossings.push(Crossing {
                entered: HalfEdge::from_index(h),
                exited: HalfEdge::from_index(out),
            });
            h = g.mate(out);
            if h == start {
                break;
            }
        }
        circuits.push(Circuit::new(crossings));
    }
    CircuitPartition {
        source: ts.clone(),
        circuits,
    }
}

/// Reusable scratch space for counting circuits without materializing them.
#[derive(Debug, Default)]
pub struct CircuitCounter {
    visited: Vec<bool>,
}

impl CircuitCounter {
    /// Number of orbits of the successor permutation. Always twice the
    /// number of circuits.
    pub fn orbits(&mut self, g: &Graph4R, ts: &TransitionSystem) -> usize {
        let len = 4 * g.vertex_count();
        self.visited.clear();
        self.visited.resize(len, false);
        let mut orbits = 0;
        for start in 0..len {
            if self.visited[start] {
                continue;
            }
            orbits += 1;
            let mut h = start;
            while !self.visited[h] {
                self.visited[h] = true;
                h = successor(g, ts, h);
            }
        }
        orbits
    }

    pub fn count(&mut self, g: &Graph4R, ts: &TransitionSystem) -> usize {
        self.orbits(g, ts) / 2
    }
}

pub fn count_circuits(g: &Graph4R, ts: &TransitionSystem) -> usize {
    CircuitCounter::default().count(g, ts)
}

/// Coordinate `v` is 1 iff the circuit passes through `v` exactly once.
pub fn core_vector(g: &Graph4R, gamma: &Circuit) -> Gf2Vector {
    let mut core = Gf2Vector::zeros(g.vertex_count());
    for v in gamma.vertices() {
        core.toggle(v);
    }
    core
}

/// Rows are the core vectors of the circuits of `p`, in circuit order.
pub fn core_space(g: &Graph4R, p: &CircuitPartition) -> Gf2Matrix {
    let cores: Vec<_> = p.circuits.iter().map(|c| core_vector(g, c)).collect();
    Gf2Matrix::from_vectors(g.vertex_count(), &cores)
}

/// Unites the two circuits of `p` that meet at `v`, keeping both stored
/// orientations: the lower-indexed circuit is traversed first, and at `v` it
/// hands over to the second, which hands back.
///
/// The united circuit takes the place of the lower-indexed one.
pub fn unite_circuits(
    g: &Graph4R,
    p: &CircuitPartition,
    v: usize,
) -> Result<CircuitPartition, GraphError> {
    let at_v = p.circuits_at(v);
    let (first, second) = match at_v.as_slice() {
        &[a, b] if a != b => (a, b),
        _ => return Err(GraphError::NotAJunction(g.name(v).to_string())),
    };
    let position = |c: usize| {
        p.circuits[c]
            .crossings()
            .iter()
            .position(|x| x.vertex() == v)
            .expect("circuit passes through v")
    };
    let (i1, i2) = (position(first), position(second));
    let a = p.circuits[first].rotated(i1 + 1);
    let b = p.circuits[second].rotated(i2 + 1);
    let last_a = *a.crossings().last().unwrap();
    let last_b = *b.crossings().last().unwrap();

    let mut crossings = Vec::with_capacity(a.len() + b.len());
    crossings.extend_from_slice(&a.crossings()[..a.len() - 1]);
    crossings.push(Crossing {
        entered: last_a.entered,
        exited: last_b.exited,
    });
    crossings.extend_from_slice(&b.crossings()[..b.len() - 1]);
    crossings.push(Crossing {
        entered: last_b.entered,
        exited: last_a.exited,
    });

    let mut source = p.source.clone();
    source.set(
        v,
        Transition::pairing(last_a.entered.slot, last_b.exited.slot),
    );
    let mut circuits = p.circuits.clone();
    circuits[first] = Circuit::new(crossings);
    circuits.remove(second);
    Ok(CircuitPartition { source, circuits })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::random::random_graph;
    use proptest::prelude::*;

    #[test]
    fn build_errors() {
        assert!(matches!(
            Graph4R::from_named(&["u", "v"], &[("u", 0, "v", 0)]),
            Err(GraphError::SlotMissing { .. })
        ));
        assert!(matches!(
            Graph4R::from_named(&["a"], &[("a", 0, "a", 1), ("a", 1, "a", 2)]),
            Err(GraphError::SlotReused { slot: 1, .. })
        ));
        assert!(matches!(
            Graph4R::from_named(&["a"], &[("a", 0, "b", 1)]),
            Err(GraphError::UnknownVertex(_))
        ));
        assert_eq!(Graph4R::from_named(&[], &[]), Err(GraphError::NoVertices));
        assert!(matches!(
            Graph4R::from_named(&["a"], &[("a", 0, "a", 4), ("a", 2, "a", 3)]),
            Err(GraphError::InvalidSlot { slot: 4 })
        ));
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&g_loops()).count, 1);
        assert_eq!(connected_components(&g_4par()).count, 1);
        let u = g_loops().disjoint_union(&g_4par());
        let comps = connected_components(&u);
        assert_eq!(comps.count, 2);
        assert_eq!(comps.of_vertex, vec![0, 1, 1]);
        assert_eq!(u.edge_count(), 2 * u.vertex_count());
    }

    #[test]
    fn transition_encoding() {
        for t in Transition::ALL {
            assert_eq!(t.as_str().parse::<Transition>().unwrap(), t);
            assert_eq!(Transition::pairing(0, t.partner(0)), t);
        }
        assert!("10|23".parse::<Transition>().is_err());
        assert_eq!(Transition::pairing(2, 1), Transition::Pair03);
    }

    #[test]
    fn tracing_examples() {
        let g = g_loops();
        let p = trace_partition(&g, &ts(&["01|23"]));
        assert_eq!(p.size(), 2);
        assert!(p.circuits.iter().all(|c| c.len() == 1));
        assert_eq!(trace_partition(&g, &ts(&["02|13"])).size(), 1);

        let g = g_4par();
        let p = trace_partition(&g, &ts(&["03|12", "01|23"]));
        assert_eq!(p.size(), 1);
        assert_eq!(
            p.circuits[0].vertices().collect::<Vec<_>>(),
            vec![0, 1, 0, 1]
        );
    }

    #[test]
    fn core_examples() {
        let g = g_loops();
        let euler = trace_partition(&g, &ts(&["02|13"]));
        assert!(core_vector(&g, &euler.circuits[0]).is_zero());
        let loops = trace_partition(&g, &ts(&["01|23"]));
        for c in &loops.circuits {
            assert_eq!(core_vector(&g, c), Gf2Vector::from_bits(&[1]));
        }
        let space = core_space(&g, &loops);
        assert_eq!(space.to_rows(), vec![vec![1], vec![1]]);
        assert_eq!(space.rank(), 1);
        assert_eq!(core_space(&g, &euler).rank(), 0);

        let g = g_4par();
        let p = trace_partition(&g, &ts(&["02|13", "02|13"]));
        assert_eq!(p.size(), 2);
        let space = core_space(&g, &p);
        assert_eq!(space.to_rows(), vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(space.rank(), 1);
    }

    #[test]
    fn uniting() {
        let g = g_loops();
        let p = trace_partition(&g, &ts(&["01|23"]));
        let united = unite_circuits(&g, &p, 0).unwrap();
        assert_eq!(united.size(), 1);
        assert!(united.circuits[0].is_walk_of(&g));
        assert_eq!(trace_partition(&g, &united.source).size(), 1);
        // first loop enters at a.0; handing over to the second loop pairs it with a.3
        assert_eq!(united.source.get(0), Transition::Pair03);

        let g = g_4par();
        let p = trace_partition(&g, &ts(&["02|13", "02|13"]));
        let united = unite_circuits(&g, &p, 0).unwrap();
        assert_eq!(united.size(), 1);
        assert_eq!(united.source.get(1), Transition::Pair02);

        let euler = trace_partition(&g, &ts(&["03|12", "01|23"]));
        assert_eq!(
            unite_circuits(&g, &euler, 1),
            Err(GraphError::NotAJunction("v".into()))
        );
    }

    fn arb_graph_and_ts(max_n: usize) -> impl Strategy<Value = (Graph4R, TransitionSystem)> {
        (1..=max_n, any::<u64>(), any::<u64>()).prop_map(|(n, seed, idx)| {
            let g = random_graph(n, seed);
            let ts = TransitionSystem::from_index(n, idx % 3u64.pow(n as u32));
            (g, ts)
        })
    }

    proptest! {
        #[test]
        fn partition_covers_every_edge_once((g, ts) in arb_graph_and_ts(10)) {
            let p = trace_partition(&g, &ts);
            let mut used = vec![0usize; 4 * g.vertex_count()];
            for c in &p.circuits {
                prop_assert!(c.is_walk_of(&g));
                for x in c.crossings() {
                    used[x.entered.index()] += 1;
                    used[x.exited.index()] += 1;
                }
            }
            prop_assert!(used.iter().all(|&u| u == 1));
            let orbits = CircuitCounter::default().orbits(&g, &ts);
            prop_assert_eq!(orbits % 2, 0);
            prop_assert_eq!(orbits / 2, p.size());
            prop_assert!(p.size() >= connected_components(&g).count);
        }

        #[test]
        fn zero_core_iff_euler_circuit((g, ts) in arb_graph_and_ts(8)) {
            let comps = connected_components(&g);
            let p = trace_partition(&g, &ts);
            for c in &p.circuits {
                let comp = comps.of_vertex[c.crossings()[0].vertex()];
                let size = comps.members(comp).count();
                let euler = c.len() == 2 * size;
                prop_assert_eq!(core_vector(&g, c).is_zero(), euler);
            }
        }

        #[test]
        fn uniting_adds_cores((g, ts) in arb_graph_and_ts(8), pick in any::<usize>()) {
            let p = trace_partition(&g, &ts);
            let junctions: Vec<usize> = (0..g.vertex_count())
                .filter(|&v| matches!(p.circuits_at(v).as_slice(), &[a, b] if a != b))
                .collect();
            if junctions.is_empty() {
                prop_assert_eq!(p.size(), connected_components(&g).count);
                return Ok(());
            }
            let v = junctions[pick % junctions.len()];
            let at = p.circuits_at(v);
            let expected = &core_vector(&g, &p.circuits[at[0]]) + &core_vector(&g, &p.circuits[at[1]]);
            let united = unite_circuits(&g, &p, v).unwrap();
            prop_assert_eq!(united.size(), p.size() - 1);
            prop_assert_eq!(core_vector(&g, &united.circuits[at[0]]), expected);
            prop_assert!(united.circuits[at[0]].is_walk_of(&g));
            for w in 0..g.vertex_count() {
                if w != v {
                    prop_assert_eq!(united.source.get(w), ts.get(w));
                }
            }
            prop_assert_eq!(trace_partition(&g, &united.source).size(), united.size());
        }
    }
}
