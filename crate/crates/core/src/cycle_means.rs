//! Graph analysis of blocks: strongly connected components, Karp's extreme
//! cycle means, and the radial spectrum each block contributes.
//!
//! Vertex `u` carries the log-weight of every edge leaving it, matching
//! `(Tf)(k) = w(k) f(phi(k))`. The maximum over all cycles of the mean
//! log-weight equals the maximum of `integral ln|w| d mu` over invariant
//! probability measures of the subshift, and likewise for the minimum.

use crate::model::{Block, LogWeight, ProductSpec};
use crate::scalar::{max_of, min_of, Scalar};
use crate::spectral_set::SpectralSet;

/// Directed graph on `0..n` with a scalar weight per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDigraph<S> {
    weights: Vec<S>,
    adjacency: Vec<Vec<usize>>,
}

impl<S: Scalar> WeightedDigraph<S> {
    pub fn new(weights: Vec<S>, mut adjacency: Vec<Vec<usize>>) -> Self {
        assert_eq!(weights.len(), adjacency.len(), "one adjacency list per vertex");
        for succ in &mut adjacency {
            succ.sort_unstable();
            succ.dedup();
        }
        Self { weights, adjacency }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, v: usize) -> &S {
        &self.weights[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn negated(&self) -> Self {
        Self {
            weights: self.weights.iter().map(|w| -w.clone()).collect(),
            adjacency: self.adjacency.clone(),
        }
    }

    pub fn reversed(&self) -> Self {
        let mut adjacency = vec![Vec::new(); self.len()];
        for (u, succ) in self.adjacency.iter().enumerate() {
            for &v in succ {
                adjacency[v].push(u);
            }
        }
        Self::new(self.weights.clone(), adjacency)
    }

    /// Maximum mean vertex weight over all cycles, `None` if acyclic.
    pub fn max_cycle_mean(&self) -> Option<S> {
        scc_decompose(&self.adjacency)
            .into_iter()
            .filter_map(|component| self.karp(&component))
            .reduce(|a, b| max_of(&a, &b))
    }

    pub fn min_cycle_mean(&self) -> Option<S> {
        self.negated().max_cycle_mean().map(|m| -m)
    }

    /// Karp's dynamic program restricted to one strongly connected component.
    ///
    /// `best[k][v]` is the heaviest walk of exactly `k` edges from the first
    /// component vertex to `v`; the answer is
    /// `max_v min_k (best[n][v] - best[k][v]) / (n - k)`.
    fn karp(&self, component: &[usize]) -> Option<S> {
        let n = component.len();
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in component.iter().enumerate() {
            local[v] = i;
        }
        let has_edge = component
            .iter()
            .any(|&u| self.adjacency[u].iter().any(|&v| local[v] != usize::MAX));
        if !has_edge {
            return None;
        }

        let mut best: Vec<Vec<Option<S>>> = vec![vec![None; n]; n + 1];
        best[0][0] = Some(S::zero());
        for k in 1..=n {
            for (iu, &u) in component.iter().enumerate() {
                let Some(base) = best[k - 1][iu].clone() else { continue };
                let cand = base + self.weights[u].clone();
                for &v in &self.adjacency[u] {
                    let iv = local[v];
                    if iv == usize::MAX {
                        continue;
                    }
                    let slot = &mut best[k][iv];
                    if slot.as_ref().is_none_or(|cur| cand > *cur) {
                        *slot = Some(cand.clone());
                    }
                }
            }
        }

        (0..n)
            .filter_map(|v| {
                let last = best[n][v].clone()?;
                (0..n)
                    .filter_map(|k| {
                        let prefix = best[k][v].clone()?;
                        Some((last.clone() - prefix) / S::from_count(n - k))
                    })
                    .reduce(|a, b| min_of(&a, &b))
            })
            .reduce(|a, b| max_of(&a, &b))
    }
}

/// Strongly connected components in topological order (sources first).
///
/// Iterative Tarjan; within a component vertices are sorted.
pub fn scc_decompose(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adjacency[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    // Tarjan emits sinks first
    components.reverse();
    components
}

/// Block-specific data carried alongside the radial spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockPayload<S: Scalar> {
    Aperiodic,
    Cycle { product: LogWeight<S>, isolated: bool },
    ClopenPeriodic { sigma: SpectralSet<S> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpectrumSummary<S: Scalar> {
    pub block_id: String,
    pub min_mean: S,
    pub max_mean: S,
    pub radial_spectrum: SpectralSet<S>,
    pub payload: BlockPayload<S>,
}

/// Spectrum contributed by one clopen periodic family.
pub fn clopen_sigma<S: Scalar>(period: usize, products: &[ProductSpec<S>]) -> SpectralSet<S> {
    let p = S::from_count(period);
    let mut radial = Vec::new();
    let mut points = Vec::new();
    for spec in products {
        match spec {
            ProductSpec::Point(c) => points.extend(c.roots(period)),
            ProductSpec::Band { lo, hi } => radial.push((lo.clone() / p.clone(), hi.clone() / p.clone())),
        }
    }
    SpectralSet::from_parts(radial, points, false)
}

/// Radial spectrum of a block in isolation. `isolated` only matters for
/// cycle blocks: an isolated orbit contributes its `p` eigenvalues, a
/// non-isolated one the full circle at its mean.
pub fn block_radial_spectrum<S: Scalar>(block: &Block<S>, isolated: bool) -> BlockSpectrumSummary<S> {
    match block {
        Block::Aperiodic(a) => {
            let graph = a.digraph();
            let min_mean = graph.min_cycle_mean().expect("validated aperiodic block has cycles");
            let max_mean = graph.max_cycle_mean().expect("validated aperiodic block has cycles");
            BlockSpectrumSummary {
                block_id: a.id.clone(),
                radial_spectrum: SpectralSet::annulus(min_mean.clone(), max_mean.clone()),
                min_mean,
                max_mean,
                payload: BlockPayload::Aperiodic,
            }
        }
        Block::Cycle(c) => {
            let product = c.product();
            let mean = c.mean();
            let radial_spectrum = if isolated {
                SpectralSet::from_parts(Vec::new(), product.roots(c.period()), false)
            } else {
                SpectralSet::circle(mean.clone())
            };
            BlockSpectrumSummary {
                block_id: c.id.clone(),
                min_mean: mean.clone(),
                max_mean: mean,
                radial_spectrum,
                payload: BlockPayload::Cycle { product, isolated },
            }
        }
        Block::ClopenPeriodic(c) => {
            let sigma = clopen_sigma(c.period, &c.products);
            let min_mean = sigma.min_logmod().expect("clopen block has products");
            let max_mean = sigma.max_logmod().expect("clopen block has products");
            BlockSpectrumSummary {
                block_id: c.id.clone(),
                min_mean,
                max_mean,
                radial_spectrum: sigma.clone(),
                payload: BlockPayload::ClopenPeriodic { sigma },
            }
        }
    }
}
