//! Seeded random systems, graphs and spectral parameters for property
//! tests and the verification suite. All log-moduli and phases are dyadic,
//! so `f64` and exact scalars see the same values.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cycle_means::WeightedDigraph;
use crate::model::{
    Anchor, AperiodicBlock, Block, ClopenPeriodicBlock, CoreEntry, CycleBlock, Lambda, LogWeight, ProductSpec,
    SystemDescription, SystemDraft, Trajectory,
};
use crate::partition::SystemAnalysis;
use crate::scalar::Scalar;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct SystemShape {
    pub max_blocks: usize,
    pub max_trajectories: usize,
    pub max_vertices: usize,
    pub max_period: usize,
    pub max_core: usize,
    /// Log-moduli are multiples of `1/8` in `[-bound, bound]`.
    pub bound: i64,
}

impl Default for SystemShape {
    fn default() -> Self {
        Self {
            max_blocks: 4,
            max_trajectories: 4,
            max_vertices: 5,
            max_period: 3,
            max_core: 3,
            bound: 2,
        }
    }
}

fn dyadic<S: Scalar>(rng: &mut SampleRng, bound: i64, den: i64) -> S {
    S::from_ratio(rng.gen_range(-bound * den..=bound * den), den)
}

fn turn<S: Scalar>(rng: &mut SampleRng, den: i64) -> S {
    S::from_ratio(rng.gen_range(0..den), den)
}

fn weight<S: Scalar>(rng: &mut SampleRng, bound: i64) -> LogWeight<S> {
    let phase = if rng.gen_bool(0.5) { S::zero() } else { turn(rng, 8) };
    LogWeight::new(dyadic(rng, bound, 8), phase)
}

/// Random strongly connected successor lists on `n` vertices: a Hamiltonian
/// cycle through a random order plus `extra` random edges. Returns the
/// adjacency and the Hamiltonian cycle.
fn strongly_connected(rng: &mut SampleRng, n: usize, extra: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 0..n {
        edges.insert((order[i], order[(i + 1) % n]));
    }
    let target = edges.len() + extra;
    while edges.len() < target && edges.len() < n * n {
        edges.insert((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let mut adjacency = vec![Vec::new(); n];
    for (u, v) in edges {
        adjacency[u].push(v);
    }
    (adjacency, order)
}

/// Random strongly connected vertex-weighted graph with `1..=max_vertices`
/// vertices and dyadic weights in `[-4, 4]`.
pub fn random_graph<S: Scalar>(rng: &mut SampleRng, max_vertices: usize) -> WeightedDigraph<S> {
    let n = rng.gen_range(1..=max_vertices);
    let extra = rng.gen_range(0..=n * 2);
    let (adjacency, _) = strongly_connected(rng, n, extra);
    let weights = (0..n).map(|_| dyadic(rng, 4, 8)).collect();
    WeightedDigraph::new(weights, adjacency)
}

struct Attachable {
    id: String,
    /// Anchor cycles available on this block (vertex ids), empty for cycle blocks.
    cycles: Vec<Vec<String>>,
    period: usize,
}

fn aperiodic<S: Scalar>(rng: &mut SampleRng, id: String, shape: &SystemShape) -> (Block<S>, Attachable) {
    let n = rng.gen_range(2..=shape.max_vertices.max(2));
    let extra = rng.gen_range(1..=n + 1);
    let (adjacency, order) = strongly_connected(rng, n, extra);
    let name = |v: usize| format!("v{v}");
    let vertices: BTreeMap<String, LogWeight<S>> = (0..n).map(|v| (name(v), weight(rng, shape.bound))).collect();
    let edges: BTreeSet<(String, String)> = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, succ)| succ.iter().map(move |&v| (name(u), name(v))))
        .collect();
    let mut cycles = vec![order.iter().map(|&v| name(v)).collect::<Vec<_>>()];
    cycles.extend((0..n).filter(|&v| adjacency[v].contains(&v)).map(|v| vec![name(v)]));
    for (u, succ) in adjacency.iter().enumerate() {
        for &v in succ {
            if u < v && adjacency[v].contains(&u) {
                cycles.push(vec![name(u), name(v)]);
            }
        }
    }
    (
        Block::Aperiodic(AperiodicBlock {
            id: id.clone(),
            vertices,
            edges,
        }),
        Attachable { id, cycles, period: 0 },
    )
}

/// A random valid system.
pub fn random_system<S: Scalar>(rng: &mut SampleRng, shape: &SystemShape) -> SystemDescription<S> {
    let mut blocks = Vec::new();
    let mut attachable = Vec::new();
    for b in 0..rng.gen_range(1..=shape.max_blocks) {
        let id = format!("b{b}");
        match rng.gen_range(0..10) {
            0..=3 => {
                let (block, a) = aperiodic(rng, id, shape);
                blocks.push(block);
                attachable.push(a);
            }
            4..=7 => {
                let p = rng.gen_range(1..=shape.max_period);
                blocks.push(Block::Cycle(CycleBlock {
                    id: id.clone(),
                    weights: (0..p).map(|_| weight(rng, shape.bound)).collect(),
                }));
                attachable.push(Attachable {
                    id,
                    cycles: Vec::new(),
                    period: p,
                });
            }
            _ => {
                let period = rng.gen_range(1..=shape.max_period);
                let products = (0..rng.gen_range(1..=2))
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            ProductSpec::Point(weight(rng, shape.bound))
                        } else {
                            let a: S = dyadic(rng, shape.bound, 8);
                            let b: S = dyadic(rng, shape.bound, 8);
                            if a <= b {
                                ProductSpec::Band { lo: a, hi: b }
                            } else {
                                ProductSpec::Band { lo: b, hi: a }
                            }
                        }
                    })
                    .collect();
                blocks.push(Block::ClopenPeriodic(ClopenPeriodicBlock { id, period, products }));
            }
        }
    }

    let mut trajectories = Vec::new();
    if !attachable.is_empty() {
        for j in 0..rng.gen_range(0..=shape.max_trajectories) {
            let anchor = |rng: &mut SampleRng| {
                let a = &attachable[rng.gen_range(0..attachable.len())];
                if a.cycles.is_empty() {
                    Anchor {
                        block: a.id.clone(),
                        cycle: Vec::new(),
                        offset: rng.gen_range(0..a.period),
                    }
                } else {
                    let cycle = a.cycles[rng.gen_range(0..a.cycles.len())].clone();
                    let offset = rng.gen_range(0..cycle.len());
                    Anchor {
                        block: a.id.clone(),
                        cycle,
                        offset,
                    }
                }
            };
            let backward = anchor(rng);
            let forward = anchor(rng);
            let core = (0..rng.gen_range(0..=shape.max_core))
                .map(|_| CoreEntry::Weight(weight(rng, shape.bound)))
                .collect();
            trajectories.push(Trajectory {
                id: format!("t{j}"),
                backward,
                core,
                forward,
            });
        }
    }
    SystemDraft { blocks, trajectories }
        .validate()
        .expect("sampled systems are valid")
}

/// A random system of isolated cycle blocks of total dimension at most `max_dim`.
pub fn random_finite_system<S: Scalar>(rng: &mut SampleRng, max_dim: usize) -> SystemDescription<S> {
    let mut blocks = Vec::new();
    let mut dim = 0;
    let count = rng.gen_range(1..=6);
    for b in 0..count {
        let room = max_dim - dim;
        if room == 0 {
            break;
        }
        let p = rng.gen_range(1..=room.min(12));
        dim += p;
        blocks.push(Block::Cycle(CycleBlock {
            id: format!("c{b}"),
            weights: (0..p).map(|_| weight(rng, 2)).collect(),
        }));
    }
    SystemDraft {
        blocks,
        trajectories: Vec::new(),
    }
    .validate()
    .expect("finite systems are valid")
}

/// Random nonzero spectral parameter, biased towards the interesting radii:
/// uniform dyadic radii, critical radii, and discrete spectral points.
pub fn random_lambda<S: Scalar>(rng: &mut SampleRng, analysis: &SystemAnalysis<'_, S>) -> Lambda<S> {
    let radii = analysis.critical_radii();
    let points: Vec<LogWeight<S>> = analysis
        .summaries()
        .iter()
        .flat_map(|s| s.radial_spectrum.points().iter().cloned())
        .collect();
    match rng.gen_range(0..6) {
        0 if !points.is_empty() => Lambda::Polar(points[rng.gen_range(0..points.len())].clone()),
        1 | 2 if !radii.is_empty() => {
            let t = radii[rng.gen_range(0..radii.len())].clone();
            Lambda::polar(t, turn(rng, 32))
        }
        3 if radii.len() > 1 => {
            let i = rng.gen_range(0..radii.len() - 1);
            let mid = (radii[i].clone() + radii[i + 1].clone()) / S::from_count(2);
            Lambda::polar(mid, turn(rng, 32))
        }
        _ => Lambda::polar(dyadic(rng, 3, 16), turn(rng, 32)),
    }
}

/// Random spectral parameter whose radius keeps at least `gap` away from
/// every value in `avoid`; `None` if 64 attempts fail.
pub fn random_lambda_away<S: Scalar>(rng: &mut SampleRng, avoid: &[S], gap: &S) -> Option<Lambda<S>> {
    (0..64).find_map(|_| {
        let t: S = dyadic(rng, 3, 16);
        avoid
            .iter()
            .all(|a| (t.clone() - a.clone()).abs() >= *gap)
            .then(|| Lambda::polar(t, turn(rng, 32)))
    })
}
