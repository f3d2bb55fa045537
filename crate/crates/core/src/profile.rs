//! The circuit-partition profile `Σ x^|P|` over all `3^|V|` transition
//! systems.
//!
//! Two engines compute it independently: one traces every partition, the
//! other reads `|P|` off the nullity of `M(C, P)`. The counter space is
//! split into fixed-size chunks so the result does not depend on how many
//! threads run them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::euler::{transition_for_label, EulerSystem, TransitionLabel, EXHAUSTIVE_LIMIT};
use crate::gf2::rank_of_words;
use crate::graph4::{connected_components, CircuitCounter, Graph4R, Transition, TransitionSystem};
use crate::interlace::interlacement_graph;

/// Systems per chunk; also the progress reporting interval.
pub const CHUNK: u64 = 1 << 20;

/// Hard ceiling: above this the counter no longer fits in a `u64`.
const ABSOLUTE_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("{vertices} vertices exceeds the exhaustive limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("the nullity engine supports at most 64 vertices")]
    Unsupported,
    #[error("Euler system belongs to a different graph")]
    GraphMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionProfile {
    /// Number of transition systems with `|P| = k`, for each `k` that occurs.
    pub coefficients: BTreeMap<usize, u64>,
    pub n_vertices: usize,
    pub c_components: usize,
}

impl PartitionProfile {
    pub fn total(&self) -> u64 {
        self.coefficients.values().sum()
    }

    pub fn coefficient(&self, k: usize) -> u64 {
        self.coefficients.get(&k).copied().unwrap_or(0)
    }

    /// Checks the sum and support bounds every profile must satisfy.
    pub fn is_consistent(&self) -> bool {
        let min = self.coefficients.keys().next().copied();
        let max = self.coefficients.keys().next_back().copied();
        self.total() == 3u64.pow(self.n_vertices as u32)
            && min == Some(self.c_components)
            && max.is_some_and(|m| m <= self.c_components + self.n_vertices)
            && self.coefficients.values().all(|&c| c > 0)
    }
}

impl fmt::Display for PartitionProfile {
    /// `k:count` pairs separated by spaces, ascending in `k`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .map(|(k, c)| format!("{k}:{c}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// 0 uses the current rayon pool; 1 runs on the calling thread.
    pub threads: usize,
    pub max_vertices: usize,
    /// Report every `CHUNK` systems on stderr.
    pub progress: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            max_vertices: EXHAUSTIVE_LIMIT,
            progress: false,
        }
    }
}

fn guard(n: usize, options: &ProfileOptions) -> Result<(), ProfileError> {
    let limit = options.max_vertices.min(ABSOLUTE_LIMIT);
    if n > limit {
        return Err(ProfileError::TooLarge { vertices: n, limit });
    }
    Ok(())
}

/// Runs `count` over every chunk of the base-3 counter, merging the
/// per-chunk histograms.
fn run_chunks<F>(
    n: usize,
    components: usize,
    options: &ProfileOptions,
    count: F,
) -> PartitionProfile
where
    F: Fn(u64, u64, &mut [u64]) + Sync,
{
    let total = 3u64.pow(n as u32);
    let chunks = total.div_ceil(CHUNK);
    let done = AtomicU64::new(0);
    let run = |chunk: u64| {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut hist = vec![0u64; components + n + 1];
        count(start, end, &mut hist);
        if options.progress {
            let finished = done.fetch_add(end - start, Ordering::Relaxed) + (end - start);
            eprintln!("progress: {finished}/{total} transition systems");
        }
        hist
    };
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };
    let empty = || vec![0u64; components + n + 1];
    let hist = match options.threads {
        1 => (0..chunks).map(run).fold(empty(), merge),
        0 => (0..chunks).into_par_iter().map(run).reduce(empty, merge),
        k => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(|| (0..chunks).into_par_iter().map(run).reduce(empty, merge)),
    };
    PartitionProfile {
        coefficients: hist
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .collect(),
        n_vertices: n,
        c_components: components,
    }
}

/// Mixed-radix base-3 counter over vertices, vertex 0 least significant.
struct Counter {
    digits: Vec<usize>,
}

impl Counter {
    fn at(n: usize, mut index: u64) -> Self {
        let digits = (0..n)
            .map(|_| {
                let d = (index % 3) as usize;
                index /= 3;
                d
            })
            .collect();
        Self { digits }
    }

    /// Advances by one; calls `changed(v, digit)` for every digit that moved.
    fn step(&mut self, mut changed: impl FnMut(usize, usize)) {
        for (v, d) in self.digits.iter_mut().enumerate() {
            *d = (*d + 1) % 3;
            changed(v, *d);
            if *d != 0 {
                break;
            }
        }
    }
}

pub fn profile_by_tracing(
    g: &Graph4R,
    options: &ProfileOptions,
) -> Result<PartitionProfile, ProfileError> {
    let n = g.vertex_count();
    guard(n, options)?;
    let components = connected_components(g).count;
    Ok(run_chunks(n, components, options, |start, end, hist| {
        let mut counter = Counter::at(n, start);
        let mut ts = TransitionSystem::new(
            counter
                .digits
                .iter()
                .map(|&d| Transition::from_digit(d))
                .collect(),
        );
        let mut tracer = CircuitCounter::default();
        for _ in start..end {
            hist[tracer.count(g, &ts)] += 1;
            counter.step(|v, d| ts.set(v, Transition::from_digit(d)));
        }
    }))
}

/// `|P| = c(F) + dim ker M(C, P)` for every transition system.
///
/// Works on the transpose: row `v` of `M(C, P)^T` is column `v` of
/// `M(C, P)`, which is the unit vector, the interlacement column, or their
/// sum according to the label at `v`. Each counter step patches only the
/// rows whose digits moved.
pub fn profile_by_nullity(
    g: &Graph4R,
    c: &EulerSystem,
    options: &ProfileOptions,
) -> Result<PartitionProfile, ProfileError> {
    let n = g.vertex_count();
    guard(n, options)?;
    if n > 64 {
        return Err(ProfileError::Unsupported);
    }
    if !c.belongs_to(g) {
        return Err(ProfileError::GraphMismatch);
    }
    let components = connected_components(g).count;
    let interlacement = interlacement_graph(c);
    // column options per vertex, indexed by the transition's base-3 digit
    let options_per_vertex: Vec<[u64; 3]> = (0..n)
        .map(|v| {
            let unit = 1u64 << v;
            let adjacency = interlacement
                .neighbors(v)
                .into_iter()
                .fold(0u64, |acc, w| acc | 1 << w);
            let mut row = [0u64; 3];
            for (label, word) in [
                (TransitionLabel::Phi, unit),
                (TransitionLabel::Chi, adjacency),
                (TransitionLabel::Psi, adjacency | unit),
            ] {
                row[transition_for_label(c, v, label).digit()] = word;
            }
            row
        })
        .collect();
    Ok(run_chunks(n, components, options, |start, end, hist| {
        let mut counter = Counter::at(n, start);
        let mut rows: Vec<u64> = (0..n)
            .map(|v| options_per_vertex[v][counter.digits[v]])
            .collect();
        let mut scratch = rows.clone();
        for _ in start..end {
            scratch.copy_from_slice(&rows);
            let nullity = n - rank_of_words(&mut scratch);
            hist[components + nullity] += 1;
            counter.step(|v, d| rows[v] = options_per_vertex[v][d]);
        }
    }))
}

/// Number of Euler systems: the profile coefficient at `c(F)`.
pub fn euler_count(g: &Graph4R, options: &ProfileOptions) -> Result<u64, ProfileError> {
    let p = profile_by_tracing(g, options)?;
    Ok(p.coefficient(p.c_components))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{hierholzer, kotzig_orbit};
    use crate::graph4::fixtures::*;
    use crate::random::random_graph;
    use proptest::prelude::*;

    fn opts() -> ProfileOptions {
        ProfileOptions::default()
    }

    #[test]
    fn loops_profile() {
        let g = g_loops();
        let p = profile_by_tracing(&g, &opts()).unwrap();
        assert_eq!(p.coefficients, BTreeMap::from([(1, 2), (2, 1)]));
        assert_eq!(p.to_string(), "1:2 2:1");
        for c in kotzig_orbit(&g, &hierholzer(&g)) {
            assert_eq!(profile_by_nullity(&g, &c, &opts()).unwrap(), p);
        }
        assert_eq!(euler_count(&g, &opts()).unwrap(), 2);
    }

    #[test]
    fn parallel_edges_profile() {
        let g = g_4par();
        let p = profile_by_tracing(&g, &opts()).unwrap();
        assert!(p.is_consistent());
        assert_eq!(p.total(), 9);
        assert_eq!(p.coefficients.keys().next(), Some(&1));
        let orbit = kotzig_orbit(&g, &hierholzer(&g));
        assert_eq!(euler_count(&g, &opts()).unwrap(), orbit.len() as u64);
    }

    #[test]
    fn disjoint_union_multiplies() {
        let a = g_loops();
        let b = g_4par();
        let u = a.disjoint_union(&b);
        let (pa, pb) = (
            profile_by_tracing(&a, &opts()).unwrap(),
            profile_by_tracing(&b, &opts()).unwrap(),
        );
        let mut product = BTreeMap::new();
        for (ka, ca) in &pa.coefficients {
            for (kb, cb) in &pb.coefficients {
                *product.entry(ka + kb).or_insert(0) += ca * cb;
            }
        }
        let pu = profile_by_tracing(&u, &opts()).unwrap();
        assert_eq!(pu.coefficients, product);
        assert_eq!(pu.c_components, 2);
        assert_eq!(
            euler_count(&u, &opts()).unwrap(),
            euler_count(&a, &opts()).unwrap() * euler_count(&b, &opts()).unwrap()
        );
    }

    #[test]
    fn guard_refuses_large_graphs() {
        let g = random_graph(21, 0);
        assert_eq!(
            profile_by_tracing(&g, &opts()),
            Err(ProfileError::TooLarge {
                vertices: 21,
                limit: 20
            })
        );
        let c = hierholzer(&g);
        assert!(profile_by_nullity(&g, &c, &opts()).is_err());
        let small = ProfileOptions {
            max_vertices: 3,
            ..opts()
        };
        assert!(profile_by_tracing(&random_graph(4, 0), &small).is_err());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let g = random_graph(14, 7);
        let c = hierholzer(&g);
        let one = profile_by_nullity(&g, &c, &opts()).unwrap();
        let four = profile_by_nullity(
            &g,
            &c,
            &ProfileOptions {
                threads: 4,
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(one, four);
        assert!(one.is_consistent());
    }

    #[test]
    fn counter_matches_index_order() {
        let n = 4;
        let mut counter = Counter::at(n, 0);
        for i in 0..81u64 {
            let ts = TransitionSystem::from_index(n, i);
            let from_counter: Vec<_> = counter
                .digits
                .iter()
                .map(|&d| Transition::from_digit(d))
                .collect();
            assert_eq!(ts.as_slice(), &from_counter[..]);
            counter.step(|_, _| {});
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn engines_agree(n in 1usize..8, seed in any::<u64>()) {
            let g = random_graph(n, seed);
            let traced = profile_by_tracing(&g, &opts()).unwrap();
            let c = hierholzer(&g);
            prop_assert!(traced.is_consistent());
            prop_assert_eq!(&profile_by_nullity(&g, &c, &opts()).unwrap(), &traced);
        }
    }
}
