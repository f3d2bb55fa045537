//! Seeded random 4-regular multigraphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph4::{connected_components, Graph4R, HalfEdge};

/// Uniformly random perfect matching on the `4n` labelled half-edges.
/// Loops and parallel edges occur naturally. Vertices are named `v0..`.
pub fn random_graph(n: usize, seed: u64) -> Graph4R {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_graph_with(n, &mut rng)
}

pub fn random_graph_with<R: rand::Rng>(n: usize, rng: &mut R) -> Graph4R {
    let mut halves: Vec<usize> = (0..4 * n).collect();
    halves.shuffle(rng);
    let edges = halves
        .chunks(2)
        .map(|pair| (HalfEdge::from_index(pair[0]), HalfEdge::from_index(pair[1])))
        .collect();
    let names = (0..n).map(|i| format!("v{i}")).collect();
    Graph4R::new(names, edges).expect("a perfect matching is 4-regular")
}

/// The first connected graph produced by seeds `seed, seed + 1, ...`,
/// together with the seed that produced it.
pub fn random_connected_graph(n: usize, seed: u64) -> (Graph4R, u64) {
    (seed..)
        .map(|s| (random_graph(n, s), s))
        .find(|(g, _)| connected_components(g).count == 1)
        .expect("connected graphs exist for every n")
}
