//! Euler systems, κ-transforms and transition labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

use crate::graph4::{
    connected_components, trace_partition, unite_circuits, Circuit, CircuitCounter,
    CircuitPartition, Crossing, Graph4R, HalfEdge, Transition, TransitionSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerError {
    #[error("transition system gives {circuits} circuits, graph has {components} components")]
    NotEuler { circuits: usize, components: usize },
    #[error("transition system and Euler system belong to different graphs")]
    GraphMismatch,
    #[error("{vertices} vertices exceeds the exhaustive limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("orbit has more than {limit} Euler systems")]
    OrbitTooLarge { limit: usize },
    #[error("partition is already an Euler system")]
    AlreadyEuler,
}

/// Default bound on `|V|` for anything that enumerates all `3^|V|`
/// transition systems.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// An Euler system together with a stored orientation of each of its
/// circuits, one circuit per connected component.
///
/// Equality, ordering and hashing look only at the transitions; the
/// orientation and starting points are representation details.
#[derive(Debug, Clone)]
pub struct EulerSystem {
    ts: TransitionSystem,
    circuits: Vec<Circuit>,
    ins: Vec<[HalfEdge; 2]>,
    graph: u64,
}

impl PartialEq for EulerSystem {
    fn eq(&self, other: &Self) -> bool {
        self.ts == other.ts
    }
}

impl Eq for EulerSystem {}

impl Hash for EulerSystem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ts.hash(state);
    }
}

impl PartialOrd for EulerSystem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EulerSystem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ts.cmp(&other.ts)
    }
}

impl EulerSystem {
    /// Builds the Euler system of `ts`, oriented as traced.
    pub fn from_transitions(g: &Graph4R, ts: TransitionSystem) -> Result<Self, EulerError> {
        if ts.len() != g.vertex_count() {
            return Err(EulerError::GraphMismatch);
        }
        let p = trace_partition(g, &ts);
        Self::from_partition(g, p)
    }

    /// Uses the partition's circuits, with their orientations, as the Euler
    /// circuits.
    pub fn from_partition(g: &Graph4R, p: CircuitPartition) -> Result<Self, EulerError> {
        let comps = connected_components(g);
        if p.size() != comps.count {
            return Err(EulerError::NotEuler {
                circuits: p.size(),
                components: comps.count,
            });
        }
        let mut circuits = p.circuits;
        circuits.sort_by_key(|c| comps.of_vertex[c.crossings()[0].vertex()]);
        let mut ins = vec![[HalfEdge::new(0, 0); 2]; g.vertex_count()];
        let mut seen = vec![0usize; g.vertex_count()];
        for c in &circuits {
            for x in c.crossings() {
                let v = x.vertex();
                ins[v][seen[v]] = x.entered;
                seen[v] += 1;
            }
        }
        debug_assert!(seen.iter().all(|&s| s == 2));
        Ok(Self {
            ts: p.source,
            circuits,
            ins,
            graph: g.fingerprint(),
        })
    }

    pub fn transitions(&self) -> &TransitionSystem {
        &self.ts
    }

    pub fn circuits(&self) -> &[Circuit] {
        &self.circuits
    }

    pub fn vertex_count(&self) -> usize {
        self.ts.len()
    }

    pub fn belongs_to(&self, g: &Graph4R) -> bool {
        self.graph == g.fingerprint()
    }

    /// The two half-edges on which the stored orientation enters `v`.
    pub fn in_half_edges(&self, v: usize) -> [HalfEdge; 2] {
        self.ins[v]
    }

    /// The same Euler system with circuit `index` traversed backwards.
    pub fn reoriented(&self, g: &Graph4R, index: usize) -> Self {
        let mut circuits = self.circuits.clone();
        circuits[index] = circuits[index].reversed();
        Self::from_partition(
            g,
            CircuitPartition {
                source: self.ts.clone(),
                circuits,
            },
        )
        .expect("reorienting keeps the circuit count")
    }

    fn psi(&self, v: usize) -> Transition {
        let [a, b] = self.ins[v];
        Transition::pairing(a.slot, b.slot)
    }

    fn check(&self, g: &Graph4R) {
        assert!(
            self.belongs_to(g),
            "Euler system used with a different graph"
        );
    }
}

/// Greedy closed walk from `v`, always leaving on the lowest unused
/// half-edge, until the walk is stuck (necessarily back at `v`).
fn greedy_walk(g: &Graph4R, v: usize, used: &mut [bool]) -> Vec<(usize, usize)> {
    let mut walk = Vec::new();
    let mut cur = v;
    while let Some(h) = (4 * cur..4 * cur + 4).find(|&h| !used[h]) {
        let m = g.mate(h);
        used[h] = true;
        used[m] = true;
        walk.push((h, m));
        cur = m / 4;
    }
    walk
}

/// Hierholzer's algorithm on half-edges.
///
/// Each component starts from its lowest half-edge; sub-tours are spliced
/// in at the first vertex of the current tour that still has unused
/// half-edges.
pub fn hierholzer(g: &Graph4R) -> EulerSystem {
    let n = g.vertex_count();
    let mut used = vec![false; 4 * n];
    let mut choice = vec![Transition::Pair01; n];
    let mut circuits = Vec::new();
    for start in 0..4 * n {
        if used[start] {
            continue;
        }
        // tour[i] = (departing half-edge, arriving half-edge) of edge i
        let mut tour = greedy_walk(g, start / 4, &mut used);
        let mut i = 0;
        while i < tour.len() {
            let v = tour[i].0 / 4;
            let sub = greedy_walk(g, v, &mut used);
            if !sub.is_empty() {
                tour.splice(i..i, sub);
            }
            i += 1;
        }
        let m = tour.len();
        let crossings: Vec<Crossing> = (0..m)
            .map(|i| {
                let arrive = tour[(i + m - 1) % m].1;
                let depart = tour[i].0;
                Crossing {
                    entered: HalfEdge::from_index(arrive),
                    exited: HalfEdge::from_index(depart),
                }
            })
            .collect();
        for x in &crossings {
            choice[x.vertex()] = Transition::pairing(x.entered.slot, x.exited.slot);
        }
        circuits.push(Circuit::new(crossings));
    }
    let p = CircuitPartition {
        source: TransitionSystem::new(choice),
        circuits,
    };
    debug_assert_eq!(trace_partition(g, &p.source).size(), p.size());
    EulerSystem::from_partition(g, p).expect("a 4-regular graph is Eulerian")
}

/// Cyclic vertex sequence of one Euler circuit; each vertex of the
/// component occurs exactly twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleOccurrenceWord(pub Vec<usize>);

impl DoubleOccurrenceWord {
    pub fn display(&self, g: &Graph4R) -> String {
        self.0
            .iter()
            .map(|&v| g.name(v))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Equal up to rotation and reflection.
    pub fn equivalent(&self, other: &DoubleOccurrenceWord) -> bool {
        let n = self.0.len();
        if n != other.0.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        let reversed: Vec<usize> = other.0.iter().rev().copied().collect();
        (0..n).any(|shift| {
            (0..n).all(|i| self.0[(i + shift) % n] == other.0[i])
                || (0..n).all(|i| self.0[(i + shift) % n] == reversed[i])
        })
    }
}

/// The double occurrence word of the circuit of `c` in `component`.
pub fn dow(g: &Graph4R, c: &EulerSystem, component: usize) -> Option<DoubleOccurrenceWord> {
    c.check(g);
    let comps = connected_components(g);
    c.circuits
        .iter()
        .find(|circ| comps.of_vertex[circ.crossings()[0].vertex()] == component)
        .map(|circ| DoubleOccurrenceWord(circ.vertices().collect()))
}

/// Relationship of a transition to an Euler system at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionLabel {
    /// The transition the Euler system itself uses.
    Phi,
    /// Pairs each entering half-edge with a leaving one.
    Chi,
    /// Pairs the entering half-edges together.
    Psi,
}

impl TransitionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionLabel::Phi => "phi",
            TransitionLabel::Chi => "chi",
            TransitionLabel::Psi => "psi",
        }
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransitionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phi" => Ok(TransitionLabel::Phi),
            "chi" => Ok(TransitionLabel::Chi),
            "psi" => Ok(TransitionLabel::Psi),
            _ => Err(format!("invalid label {s:?}; expected phi, chi or psi")),
        }
    }
}

pub fn label_at(c: &EulerSystem, v: usize, t: Transition) -> TransitionLabel {
    if t == c.ts.get(v) {
        TransitionLabel::Phi
    } else if t == c.psi(v) {
        TransitionLabel::Psi
    } else {
        TransitionLabel::Chi
    }
}

pub fn label_transitions(
    c: &EulerSystem,
    ts: &TransitionSystem,
) -> Result<Vec<TransitionLabel>, EulerError> {
    if ts.len() != c.vertex_count() {
        return Err(EulerError::GraphMismatch);
    }
    Ok((0..ts.len()).map(|v| label_at(c, v, ts.get(v))).collect())
}

pub fn transition_for_label(c: &EulerSystem, v: usize, label: TransitionLabel) -> Transition {
    let phi = c.ts.get(v);
    let psi = c.psi(v);
    match label {
        TransitionLabel::Phi => phi,
        TransitionLabel::Psi => psi,
        TransitionLabel::Chi => Transition::from_code(phi.code() ^ psi.code()).unwrap(),
    }
}

/// `C * v`: the Euler system whose transition at `v` is the ψ transition of
/// `c` there.
pub fn kappa_transform(g: &Graph4R, c: &EulerSystem, v: usize) -> EulerSystem {
    c.check(g);
    let ts = c.ts.with(v, c.psi(v));
    EulerSystem::from_transitions(g, ts).expect("a kappa-transform is an Euler system")
}

/// `C * v` computed literally, by reversing the walk between the two
/// passages of the circuit through `v`.
pub fn kappa_by_reversal(g: &Graph4R, c: &EulerSystem, v: usize) -> EulerSystem {
    c.check(g);
    let index = c
        .circuits
        .iter()
        .position(|circ| circ.passes(v) > 0)
        .expect("every vertex lies on an Euler circuit");
    let first = c.circuits[index]
        .crossings()
        .iter()
        .position(|x| x.vertex() == v)
        .unwrap();
    let circ = c.circuits[index].rotated(first);
    let xs = circ.crossings();
    let second = (1..xs.len()).find(|&i| xs[i].vertex() == v).unwrap();

    let mut crossings = Vec::with_capacity(xs.len());
    crossings.push(Crossing {
        entered: xs[0].entered,
        exited: xs[second].entered,
    });
    crossings.extend(xs[1..second].iter().rev().map(|x| x.reversed()));
    crossings.push(Crossing {
        entered: xs[0].exited,
        exited: xs[second].exited,
    });
    crossings.extend_from_slice(&xs[second + 1..]);

    let mut circuits = c.circuits.clone();
    circuits[index] = Circuit::new(crossings);
    let ts = c.ts.with(
        v,
        Transition::pairing(xs[0].entered.slot, xs[second].entered.slot),
    );
    EulerSystem::from_partition(
        g,
        CircuitPartition {
            source: ts,
            circuits,
        },
    )
    .expect("walk reversal keeps one circuit per component")
}

/// Closure of `{c}` under κ-transforms, sorted by transition system.
pub fn kotzig_orbit(g: &Graph4R, c: &EulerSystem) -> Vec<EulerSystem> {
    kotzig_orbit_limited(g, c, usize::MAX).expect("unbounded search cannot overflow")
}

/// Breadth-first κ-orbit search that gives up after `limit` systems.
pub fn kotzig_orbit_limited(
    g: &Graph4R,
    c: &EulerSystem,
    limit: usize,
) -> Result<Vec<EulerSystem>, EulerError> {
    c.check(g);
    let mut seen: BTreeMap<TransitionSystem, EulerSystem> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(c.ts.clone(), c.clone());
    queue.push_back(c.clone());
    while let Some(cur) = queue.pop_front() {
        for v in 0..g.vertex_count() {
            let next = kappa_transform(g, &cur, v);
            if !seen.contains_key(&next.ts) {
                if seen.len() == limit {
                    return Err(EulerError::OrbitTooLarge { limit });
                }
                seen.insert(next.ts.clone(), next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Every transition system with exactly `c(g)` circuits, by enumeration.
pub fn all_euler_systems_bruteforce(
    g: &Graph4R,
    limit: usize,
) -> Result<BTreeSet<TransitionSystem>, EulerError> {
    let n = g.vertex_count();
    if n > limit {
        return Err(EulerError::TooLarge { vertices: n, limit });
    }
    let components = connected_components(g).count;
    let mut counter = CircuitCounter::default();
    Ok(TransitionSystem::enumerate(n)
        .filter(|ts| counter.count(g, ts) == components)
        .collect())
}

/// Result of building an Euler system out of a circuit partition by
/// repeatedly uniting circuits.
#[derive(Debug, Clone)]
pub struct UnitedEuler {
    pub euler: EulerSystem,
    /// Vertex of the last uniting step.
    pub v0: usize,
    /// Circuit of the original partition united at `v0` in the last step.
    pub gamma0: Circuit,
}

/// Unites circuits of `p` until one circuit per component remains.
///
/// Every step joins an untouched circuit of `p` either to the circuit
/// already grown in its component or, if nothing has been grown there
/// yet, to another untouched circuit. The lowest-indexed admissible
/// vertex is used each time. Orientations of the circuits of `p` are
/// respected throughout, so `p` is χ at every uniting vertex and φ
/// elsewhere relative to the result.
pub fn euler_from_partition(g: &Graph4R, p: &CircuitPartition) -> Result<UnitedEuler, EulerError> {
    let comps = connected_components(g);
    if p.size() == comps.count {
        return Err(EulerError::AlreadyEuler);
    }
    let mut cur = p.clone();
    let mut untouched = vec![true; p.size()];
    let mut grown = vec![false; comps.count];
    let mut last = None;
    while cur.size() > comps.count {
        let (v, a, b) = (0..g.vertex_count())
            .find_map(|v| match cur.circuits_at(v).as_slice() {
                &[a, b] if a != b => {
                    let admissible = if grown[comps.of_vertex[v]] {
                        untouched[a] != untouched[b]
                    } else {
                        untouched[a] && untouched[b]
                    };
                    admissible.then_some((v, a, b))
                }
                _ => None,
            })
            .expect("a non-Euler partition has an admissible junction");
        let gamma0 = if untouched[b] { b } else { a };
        last = Some((v, cur.circuits[gamma0].clone()));
        cur = unite_circuits(g, &cur, v).expect("v is a junction");
        untouched[a] = false;
        untouched.remove(b);
        grown[comps.of_vertex[v]] = true;
    }
    let (v0, gamma0) = last.expect("at least one step was taken");
    let euler = EulerSystem::from_partition(g, cur).expect("uniting ends with an Euler system");
    Ok(UnitedEuler { euler, v0, gamma0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph4::fixtures::*;
    use crate::random::random_graph;
    use proptest::prelude::*;
    use TransitionLabel::*;

    fn word(g: &Graph4R, c: &EulerSystem, comp: usize) -> String {
        dow(g, c, comp).unwrap().display(g)
    }

    #[test]
    fn hierholzer_examples() {
        let g = g_loops();
        let c = hierholzer(&g);
        assert_eq!(c.circuits().len(), 1);
        assert_eq!(c.transitions(), &ts(&["03|12"]));
        assert_eq!(word(&g, &c, 0), "a a");

        let g = g_4par();
        let c = hierholzer(&g);
        assert_eq!(c.transitions(), &ts(&["03|12", "01|23"]));
        assert_eq!(word(&g, &c, 0), "u v u v");
        let ins = c.in_half_edges(0);
        assert_eq!(ins.map(|h| h.slot), [3, 1]);

        let g = g_loops().disjoint_union(&g_4par());
        let c = hierholzer(&g);
        assert_eq!(c.circuits().len(), 2);
        assert_eq!(word(&g, &c, 0), "a a");
        assert_eq!(word(&g, &c, 1), "u v u v");
        assert!(dow(&g, &c, 2).is_none());
    }

    #[test]
    fn labels_on_c2() {
        let g = g_4par();
        let c2 = hierholzer(&g);
        let labels = label_transitions(&c2, c2.transitions()).unwrap();
        assert_eq!(labels, vec![Phi, Phi]);
        assert_eq!(
            label_transitions(&c2, &ts(&["01|23", "01|23"])).unwrap()[0],
            Chi
        );
        assert_eq!(
            label_transitions(&c2, &ts(&["02|13", "01|23"])).unwrap()[0],
            Psi
        );
        assert_eq!(transition_for_label(&c2, 0, Phi).as_str(), "03|12");
        assert_eq!(transition_for_label(&c2, 0, Chi).as_str(), "01|23");
        assert_eq!(transition_for_label(&c2, 0, Psi).as_str(), "02|13");
        assert_eq!(
            label_transitions(&c2, &ts(&["01|23"])),
            Err(EulerError::GraphMismatch)
        );

        let g = g_loops();
        let c = hierholzer(&g);
        assert_eq!(label_transitions(&c, &ts(&["01|23"])).unwrap(), vec![Chi]);
        assert_eq!(label_transitions(&c, &ts(&["02|13"])).unwrap(), vec![Psi]);
    }

    #[test]
    fn kappa_examples() {
        let g = g_4par();
        let c2 = hierholzer(&g);
        let cu = kappa_transform(&g, &c2, 0);
        assert_eq!(cu.transitions().get(0).as_str(), "02|13");
        assert_eq!(cu.transitions().get(1), c2.transitions().get(1));
        let w = dow(&g, &cu, 0).unwrap();
        assert!(w.equivalent(&DoubleOccurrenceWord(vec![0, 1, 0, 1])));
        assert_eq!(kappa_transform(&g, &cu, 0), c2);
    }

    #[test]
    fn orbit_examples() {
        let g = g_loops();
        let orbit = kotzig_orbit(&g, &hierholzer(&g));
        let systems: Vec<_> = orbit.iter().map(|c| c.transitions().clone()).collect();
        assert_eq!(systems, vec![ts(&["02|13"]), ts(&["03|12"])]);
        let brute = all_euler_systems_bruteforce(&g, EXHAUSTIVE_LIMIT).unwrap();
        assert_eq!(brute.into_iter().collect::<Vec<_>>(), systems);

        let g = g_4par();
        let orbit = kotzig_orbit(&g, &hierholzer(&g));
        let brute = all_euler_systems_bruteforce(&g, EXHAUSTIVE_LIMIT).unwrap();
        assert_eq!(
            orbit
                .iter()
                .map(|c| c.transitions().clone())
                .collect::<BTreeSet<_>>(),
            brute
        );
        for c in &orbit {
            assert_eq!(kotzig_orbit(&g, c).len(), orbit.len());
        }
        assert_eq!(
            kotzig_orbit_limited(&g, &hierholzer(&g), 1),
            Err(EulerError::OrbitTooLarge { limit: 1 })
        );
        assert!(matches!(
            all_euler_systems_bruteforce(&random_graph(6, 1), 5),
            Err(EulerError::TooLarge {
                vertices: 6,
                limit: 5
            })
        ));
    }

    #[test]
    fn uniting_into_euler_system() {
        let g = g_loops();
        let p = trace_partition(&g, &ts(&["01|23"]));
        let united = euler_from_partition(&g, &p).unwrap();
        assert_eq!(united.euler.transitions(), &ts(&["03|12"]));
        assert_eq!(united.v0, 0);
        assert_eq!(
            label_transitions(&united.euler, &p.source).unwrap(),
            vec![Chi]
        );
        assert_eq!(united.gamma0.len(), 1);

        let g = g_4par();
        let p = trace_partition(&g, &ts(&["02|13", "02|13"]));
        let united = euler_from_partition(&g, &p).unwrap();
        assert_eq!(united.v0, 0);
        let labels = label_transitions(&united.euler, &p.source).unwrap();
        assert_eq!(labels, vec![Chi, Phi]);

        let c = hierholzer(&g);
        let euler = trace_partition(&g, c.transitions());
        assert_eq!(
            euler_from_partition(&g, &euler).unwrap_err(),
            EulerError::AlreadyEuler
        );
    }

    proptest! {
        #[test]
        fn kappa_matches_walk_reversal(n in 1usize..9, seed in any::<u64>(), steps in proptest::collection::vec(any::<usize>(), 1..6)) {
            let g = random_graph(n, seed);
            let mut c = hierholzer(&g);
            for s in steps {
                let v = s % n;
                let k = kappa_transform(&g, &c, v);
                prop_assert_eq!(&kappa_by_reversal(&g, &c, v), &k);
                prop_assert_eq!(k.circuits().len(), c.circuits().len());
                prop_assert_eq!(&kappa_transform(&g, &k, v), &c);
                c = k;
            }
        }

        #[test]
        fn labels_ignore_orientation(n in 1usize..8, seed in any::<u64>(), idx in any::<u64>(), flip in any::<usize>()) {
            let g = random_graph(n, seed);
            let c = hierholzer(&g);
            let ts = TransitionSystem::from_index(n, idx % 3u64.pow(n as u32));
            let flipped = c.reoriented(&g, flip % c.circuits().len());
            prop_assert_eq!(label_transitions(&c, &ts).unwrap(), label_transitions(&flipped, &ts).unwrap());
            for v in 0..n {
                for label in [Phi, Chi, Psi] {
                    let t = transition_for_label(&c, v, label);
                    prop_assert_eq!(label_at(&c, v, t), label);
                }
            }
        }

        #[test]
        fn hierholzer_is_euler(n in 1usize..30, seed in any::<u64>()) {
            let g = random_graph(n, seed);
            let c = hierholzer(&g);
            let comps = connected_components(&g);
            prop_assert_eq!(c.circuits().len(), comps.count);
            prop_assert_eq!(trace_partition(&g, c.transitions()).size(), comps.count);
            for circ in c.circuits() {
                prop_assert!(circ.is_walk_of(&g));
            }
            for comp in 0..comps.count {
                let w = dow(&g, &c, comp).unwrap();
                for v in comps.members(comp) {
                    prop_assert_eq!(w.0.iter().filter(|&&x| x == v).count(), 2);
                }
            }
        }
    }
}
