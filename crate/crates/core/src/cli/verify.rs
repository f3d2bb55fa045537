//! Runs every theorem check on one graph, either exhaustively or on seeded
//! random samples.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::format::inline_transitions;
use crate::euler::{
    all_euler_systems_bruteforce, hierholzer, kappa_transform, kotzig_orbit_limited, EulerError,
    EulerSystem, EXHAUSTIVE_LIMIT,
};
use crate::gf2::Gf2Matrix;
use crate::graph4::{connected_components, trace_partition, Graph4R, TransitionSystem};
use crate::interlace::{
    check_circuit_nullity, check_core_independence, check_core_kernel, check_label_exchange,
    check_local_complement, check_partition_lemma, check_theorem1_with,
    modified_interlacement_matrix, Violation,
};

/// Work bound for exhaustive runs, in (C, C', P) triples.
pub const EXHAUSTIVE_BUDGET: u64 = 50_000_000;
/// Subset enumeration for core independence is skipped above this many circuits.
const MAX_SUBSET_CIRCUITS: usize = 10;
/// Kotzig closure is brute-forced in sample mode only up to this size.
const SAMPLE_CLOSURE_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Samples { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    pub threads: usize,
    pub allow_large: bool,
    /// Negative control: flips entry (0, 0) of every left-hand side in the
    /// `theorem1` check.
    pub corrupt_theorem1: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("exhaustive verification needs about {estimate} checks (limit {limit}); use --samples or --allow-large")]
    TooLarge { estimate: u64, limit: u64 },
    #[error(transparent)]
    Euler(#[from] EulerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Skip(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: u64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub header: String,
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results
            .iter()
            .all(|r| !matches!(r.outcome, Outcome::Fail(_)))
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.header);
        for r in &self.results {
            match &r.outcome {
                Outcome::Pass => writeln!(out, "PASS {} ({})", r.name, checks(r.checked)),
                Outcome::Fail(w) => writeln!(out, "FAIL {} ({}): {w}", r.name, checks(r.checked)),
                Outcome::Skip(why) => writeln!(out, "SKIP {}: {why}", r.name),
            }
            .unwrap();
        }
        out
    }
}

/// Checks every case, returning the count and the first failure in case
/// order.
fn sweep<T, F>(name: &'static str, cases: &[T], check: F) -> PropertyResult
where
    T: Sync,
    F: Fn(&T) -> Result<(), String> + Sync,
{
    let failures: Vec<(usize, String)> = cases
        .par_iter()
        .enumerate()
        .filter_map(|(i, case)| check(case).err().map(|w| (i, w)))
        .collect();
    let outcome = match failures.into_iter().min_by_key(|(i, _)| *i) {
        None => Outcome::Pass,
        Some((_, w)) => Outcome::Fail(w),
    };
    PropertyResult {
        name,
        checked: cases.len() as u64,
        outcome,
    }
}

struct Context<'a> {
    g: &'a Graph4R,
    corrupt: bool,
}

impl Context<'_> {
    fn describe(
        &self,
        c: Option<&EulerSystem>,
        ts: Option<&TransitionSystem>,
        v: Option<usize>,
    ) -> String {
        let mut parts = Vec::new();
        if let Some(c) = c {
            parts.push(format!(
                "C=[{}]",
                inline_transitions(self.g, c.transitions())
            ));
        }
        if let Some(ts) = ts {
            parts.push(format!("P=[{}]", inline_transitions(self.g, ts)));
        }
        if let Some(v) = v {
            parts.push(format!("v={}", self.g.name(v)));
        }
        parts.join(" ")
    }

    fn witness(&self, context: String, violation: Violation) -> String {
        let detail = match violation {
            Violation::Labels {
                vertex,
                expected,
                got,
            } => {
                format!(
                    "vertex {}: expected {expected}, got {got}",
                    self.g.name(vertex)
                )
            }
            other => other.to_string(),
        };
        format!("{context}: {detail}")
    }

    fn theorem1(&self, c: &EulerSystem, ts: &TransitionSystem, v: usize) -> Result<(), String> {
        let corrupt = self.corrupt;
        check_theorem1_with(self.g, c, ts, v, |m| {
            if corrupt {
                m.toggle(0, 0);
            }
        })
        .map_err(|e| self.witness(self.describe(Some(c), Some(ts), Some(v)), e))
    }

    fn with_c(
        &self,
        c: &EulerSystem,
        ts: &TransitionSystem,
        check: fn(&Graph4R, &EulerSystem, &TransitionSystem) -> Result<(), Violation>,
    ) -> Result<(), String> {
        check(self.g, c, ts).map_err(|e| self.witness(self.describe(Some(c), Some(ts), None), e))
    }

    fn label_exchange(
        &self,
        c: &EulerSystem,
        ts: &TransitionSystem,
        v: usize,
    ) -> Result<(), String> {
        check_label_exchange(self.g, c, ts, v)
            .map_err(|e| self.witness(self.describe(Some(c), Some(ts), Some(v)), e))
    }

    fn local_complement(&self, c: &EulerSystem, v: usize) -> Result<(), String> {
        check_local_complement(self.g, c, v)
            .map_err(|e| self.witness(self.describe(Some(c), None, Some(v)), e))
    }

    fn lemma(&self, ts: &TransitionSystem) -> Result<(), String> {
        check_partition_lemma(self.g, ts)
            .map_err(|e| self.witness(self.describe(None, Some(ts), None), e))
    }

    fn independence(&self, ts: &TransitionSystem, subset: &[usize]) -> Result<(), String> {
        check_core_independence(self.g, ts, subset)
            .map_err(|e| self.witness(self.describe(None, Some(ts), None), e))
    }
}

fn mim(c: &EulerSystem, ts: &TransitionSystem) -> Gf2Matrix {
    modified_interlacement_matrix(c, ts)
        .expect("same graph")
        .matrix
}

fn kotzig_closure(g: &Graph4R, orbit: &[EulerSystem]) -> PropertyResult {
    let outcome = match all_euler_systems_bruteforce(g, EXHAUSTIVE_LIMIT) {
        Ok(brute) => {
            let found: BTreeSet<TransitionSystem> =
                orbit.iter().map(|c| c.transitions().clone()).collect();
            if found == brute {
                Outcome::Pass
            } else {
                let missing = brute
                    .difference(&found)
                    .next()
                    .or(found.difference(&brute).next());
                Outcome::Fail(format!(
                    "orbit has {} systems, brute force {}; first difference [{}]",
                    found.len(),
                    brute.len(),
                    missing
                        .map(|ts| inline_transitions(g, ts))
                        .unwrap_or_default()
                ))
            }
        }
        Err(e) => Outcome::Skip(e.to_string()),
    };
    PropertyResult {
        name: "kotzig_closure",
        checked: 1,
        outcome,
    }
}

pub fn verify(g: &Graph4R, options: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| match options.mode {
        VerifyMode::Exhaustive => exhaustive(g, options),
        VerifyMode::Samples { count, seed } => Ok(samples(g, options, count, seed)),
    })
}

fn checks(n: u64) -> String {
    format!("{n} {}", if n == 1 { "check" } else { "checks" })
}

fn header(g: &Graph4R, mode: &str) -> String {
    format!("verify: {}; {mode}", super::validate(g).trim_end())
}

fn exhaustive(g: &Graph4R, options: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let n = g.vertex_count();
    let budget = if options.allow_large {
        u64::MAX
    } else {
        EXHAUSTIVE_BUDGET
    };
    if n > EXHAUSTIVE_LIMIT {
        return Err(VerifyError::TooLarge {
            estimate: u64::MAX,
            limit: budget,
        });
    }
    let systems = 3u64.pow(n as u32);
    let orbit_limit = if options.allow_large {
        usize::MAX
    } else {
        100_000
    };
    let orbit = kotzig_orbit_limited(g, &hierholzer(g), orbit_limit)?;
    let k = orbit.len() as u64;
    let estimate = k.saturating_mul(k).saturating_mul(systems);
    if estimate > budget {
        return Err(VerifyError::TooLarge {
            estimate,
            limit: budget,
        });
    }
    let cx = Context {
        g,
        corrupt: options.corrupt_theorem1,
    };
    let all_ts: Vec<TransitionSystem> = TransitionSystem::enumerate(n).collect();

    let triples: Vec<(usize, usize, usize)> = (0..orbit.len())
        .flat_map(|c| (0..all_ts.len()).flat_map(move |t| (0..n).map(move |v| (c, t, v))))
        .collect();
    let pairs_ct: Vec<(usize, usize)> = (0..orbit.len())
        .flat_map(|c| (0..all_ts.len()).map(move |t| (c, t)))
        .collect();
    let pairs_cc: Vec<(usize, usize)> = (0..orbit.len())
        .flat_map(|a| (0..orbit.len()).map(move |b| (a, b)))
        .collect();
    let pairs_cv: Vec<(usize, usize)> = (0..orbit.len())
        .flat_map(|c| (0..n).map(move |v| (c, v)))
        .collect();

    let mut results = Vec::new();
    results.push(sweep("theorem1", &triples, |&(c, t, v)| {
        cx.theorem1(&orbit[c], &all_ts[t], v)
    }));

    // M(C, P) for every C in the orbit and every P
    let table: Vec<Vec<Gf2Matrix>> = orbit
        .par_iter()
        .map(|c| all_ts.iter().map(|ts| mim(c, ts)).collect())
        .collect();
    let euler_ts_index: Vec<usize> = orbit
        .iter()
        .map(|c| c.transitions().index() as usize)
        .collect();
    let mut natural = sweep("naturality", &pairs_cc, |&(a, b)| {
        let change = &table[b][euler_ts_index[a]];
        if change.inverse().is_err() {
            return Err(format!(
                "{}: M(C',C) singular",
                cx.describe(Some(&orbit[b]), Some(orbit[a].transitions()), None)
            ));
        }
        for (t, ts) in all_ts.iter().enumerate() {
            let product = change.mat_mul(&table[a][t]).expect("square");
            if product != table[b][t] {
                return Err(format!(
                    "C=[{}] {}: M(C',P) {:?} != M(C',C)M(C,P) {:?}",
                    inline_transitions(g, orbit[a].transitions()),
                    cx.describe(Some(&orbit[b]), Some(ts), None)
                        .replacen("C=", "C'=", 1),
                    table[b][t],
                    product
                ));
            }
        }
        Ok(())
    });
    natural.checked *= systems;
    results.push(natural);

    results.push(sweep("inverse", &pairs_cc, |&(a, b)| {
        let product = table[a][euler_ts_index[b]]
            .mat_mul(&table[b][euler_ts_index[a]])
            .expect("square");
        if product == Gf2Matrix::identity(n) {
            Ok(())
        } else {
            Err(format!(
                "C=[{}] C'=[{}]: M(C,C')M(C',C) = {product:?}",
                inline_transitions(g, orbit[a].transitions()),
                inline_transitions(g, orbit[b].transitions())
            ))
        }
    }));

    results.push(sweep("core_kernel", &pairs_ct, |&(c, t)| {
        cx.with_c(&orbit[c], &all_ts[t], check_core_kernel)
    }));
    results.push(sweep("circuit_nullity", &pairs_ct, |&(c, t)| {
        cx.with_c(&orbit[c], &all_ts[t], check_circuit_nullity)
    }));

    let components = connected_components(g).count;
    let sizes: Vec<usize> = all_ts
        .iter()
        .map(|ts| trace_partition(g, ts).size())
        .collect();
    let subset_cases: Vec<(usize, u64)> = (0..all_ts.len())
        .filter(|&t| sizes[t] <= MAX_SUBSET_CIRCUITS)
        .flat_map(|t| (0..1u64 << sizes[t]).map(move |mask| (t, mask)))
        .collect();
    let mut independence = sweep("core_independence", &subset_cases, |&(t, mask)| {
        let subset: Vec<usize> = (0..sizes[t]).filter(|&i| mask >> i & 1 == 1).collect();
        cx.independence(&all_ts[t], &subset)
    });
    if sizes.iter().any(|&s| s > MAX_SUBSET_CIRCUITS) && independence.outcome == Outcome::Pass {
        independence.outcome = Outcome::Skip(format!(
            "{} subsets passed; partitions with more than {MAX_SUBSET_CIRCUITS} circuits not enumerated",
            independence.checked
        ));
    }
    results.push(independence);

    results.push(kotzig_closure(g, &orbit));
    results.push(sweep("label_exchange", &triples, |&(c, t, v)| {
        cx.label_exchange(&orbit[c], &all_ts[t], v)
    }));
    results.push(sweep("local_complement", &pairs_cv, |&(c, v)| {
        cx.local_complement(&orbit[c], v)
    }));
    let non_euler: Vec<usize> = (0..all_ts.len())
        .filter(|&t| sizes[t] > components)
        .collect();
    results.push(sweep("partition_lemma", &non_euler, |&t| {
        cx.lemma(&all_ts[t])
    }));

    Ok(VerifyReport {
        header: header(
            g,
            &format!(
                "exhaustive over {} Euler systems and {systems} partitions",
                orbit.len()
            ),
        ),
        results,
    })
}

struct Sample {
    c: EulerSystem,
    c2: EulerSystem,
    ts: TransitionSystem,
    v: usize,
    subset: Vec<usize>,
    non_euler: bool,
}

fn random_euler<R: Rng>(g: &Graph4R, start: &EulerSystem, rng: &mut R) -> EulerSystem {
    let n = g.vertex_count();
    let steps = rng.gen_range(0..=2 * n);
    (0..steps).fold(start.clone(), |c, _| {
        kappa_transform(g, &c, rng.gen_range(0..n))
    })
}

fn samples(g: &Graph4R, options: &VerifyOptions, count: usize, seed: u64) -> VerifyReport {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = hierholzer(g);
    let components = connected_components(g).count;
    let cases: Vec<Sample> = (0..count)
        .map(|_| {
            let c = random_euler(g, &start, &mut rng);
            let c2 = random_euler(g, &start, &mut rng);
            let ts = TransitionSystem::new(
                (0..n)
                    .map(|_| crate::graph4::Transition::from_digit(rng.gen_range(0..3)))
                    .collect(),
            );
            let v = rng.gen_range(0..n);
            let size = trace_partition(g, &ts).size();
            let subset = (0..size).filter(|_| rng.gen()).collect();
            Sample {
                c,
                c2,
                ts,
                v,
                subset,
                non_euler: size > components,
            }
        })
        .collect();
    let cx = Context {
        g,
        corrupt: options.corrupt_theorem1,
    };
    let mut results = vec![
        sweep("theorem1", &cases, |s| cx.theorem1(&s.c, &s.ts, s.v)),
        sweep("naturality", &cases, |s| {
            crate::interlace::check_naturality(&s.c, &s.c2, &s.ts).map_err(|e| {
                format!(
                    "C=[{}] C'=[{}] P=[{}]: {e}",
                    inline_transitions(g, s.c.transitions()),
                    inline_transitions(g, s.c2.transitions()),
                    inline_transitions(g, &s.ts)
                )
            })
        }),
        sweep("inverse", &cases, |s| {
            crate::interlace::check_inverse(&s.c, &s.c2).map_err(|e| {
                format!(
                    "C=[{}] C'=[{}]: {e}",
                    inline_transitions(g, s.c.transitions()),
                    inline_transitions(g, s.c2.transitions())
                )
            })
        }),
        sweep("core_kernel", &cases, |s| {
            cx.with_c(&s.c, &s.ts, check_core_kernel)
        }),
        sweep("circuit_nullity", &cases, |s| {
            cx.with_c(&s.c, &s.ts, check_circuit_nullity)
        }),
        sweep("core_independence", &cases, |s| {
            cx.independence(&s.ts, &s.subset)
        }),
    ];
    if n <= SAMPLE_CLOSURE_LIMIT {
        let orbit = kotzig_orbit_limited(g, &start, usize::MAX).expect("unbounded");
        results.push(kotzig_closure(g, &orbit));
    } else {
        results.push(PropertyResult {
            name: "kotzig_closure",
            checked: 0,
            outcome: Outcome::Skip(format!(
                "brute force limited to {SAMPLE_CLOSURE_LIMIT} vertices in sample mode"
            )),
        });
    }
    results.push(sweep("label_exchange", &cases, |s| {
        cx.label_exchange(&s.c, &s.ts, s.v)
    }));
    results.push(sweep("local_complement", &cases, |s| {
        cx.local_complement(&s.c, s.v)
    }));
    let non_euler: Vec<&Sample> = cases.iter().filter(|s| s.non_euler).collect();
    results.push(sweep("partition_lemma", &non_euler, |s| cx.lemma(&s.ts)));
    VerifyReport {
        header: header(g, &format!("{count} samples, seed {seed}")),
        results,
    }
}
