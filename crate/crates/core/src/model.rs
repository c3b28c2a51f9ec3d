//! System descriptions: the finitely presented compact dynamical systems
//! `(K, phi, w)` the crate analyses, plus their validation.
//!
//! A system is a list of invariant blocks joined by trajectories. Blocks are
//! irreducible vertex-weighted graphs ([`AperiodicBlock`]), single periodic
//! orbits ([`CycleBlock`]) or open families of periodic points
//! ([`ClopenPeriodicBlock`]). A [`Trajectory`] is a bi-infinite orbit of
//! isolated points whose weights eventually repeat an anchor cycle in each
//! direction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::cycle_means::{scc_decompose, WeightedDigraph};
use crate::error::{Result, Rule, SpectraError, Violation};
use crate::scalar::Scalar;

/// Nonzero complex weight in log-polar form: `exp(logmod) * e^{2 pi i phase}`.
#[derive(Clone, Debug)]
pub struct LogWeight<S: Scalar> {
    logmod: S,
    phase: S,
}

impl<S: Scalar> LogWeight<S> {
    /// Builds a weight; the phase is reduced into `[0, 1)` turns.
    pub fn new(logmod: S, phase: S) -> Self {
        Self {
            logmod,
            phase: phase.wrap_turn(),
        }
    }

    pub fn real(logmod: S) -> Self {
        Self::new(logmod, S::zero())
    }

    pub fn logmod(&self) -> &S {
        &self.logmod
    }

    pub fn phase(&self) -> &S {
        &self.phase
    }

    /// Rotates by `turns` (multiplication by `e^{2 pi i turns}`).
    pub fn rotated(&self, turns: &S) -> Self {
        Self::new(self.logmod.clone(), self.phase.clone() + turns.clone())
    }

    /// Product of weights: logmods add, phases add mod 1.
    pub fn product<'a>(weights: impl IntoIterator<Item = &'a Self>) -> Self
    where
        S: 'a,
    {
        let (logmod, phase) = weights
            .into_iter()
            .fold((S::zero(), S::zero()), |(l, p), w| (l + w.logmod.clone(), p + w.phase.clone()));
        Self::new(logmod, phase)
    }

    /// All `p` solutions of `lambda^p = self`.
    pub fn roots(&self, p: usize) -> Vec<Self> {
        let pp = S::from_count(p);
        let logmod = self.logmod.clone() / pp.clone();
        (0..p)
            .map(|k| Self::new(logmod.clone(), (self.phase.clone() + S::from_count(k)) / pp.clone()))
            .collect()
    }

    pub fn to_f64(&self) -> LogWeight<f64> {
        LogWeight::new(self.logmod.as_f64(), self.phase.as_f64())
    }
}

impl<S: Scalar> PartialEq for LogWeight<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for LogWeight<S> {}

impl<S: Scalar> PartialOrd for LogWeight<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for LogWeight<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.logmod
            .cmp_total(&other.logmod)
            .then_with(|| self.phase.cmp_total(&other.phase))
    }
}

/// A spectral parameter: zero, or a nonzero complex number in log-polar form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda<S: Scalar> {
    Zero,
    Polar(LogWeight<S>),
}

impl<S: Scalar> Lambda<S> {
    pub fn polar(logmod: S, phase: S) -> Self {
        Lambda::Polar(LogWeight::new(logmod, phase))
    }

    /// Converts a cartesian value. The log-modulus and phase are computed in
    /// `f64` and then converted to `S`, so exact scalars receive the nearest
    /// binary value rather than the true transcendental one.
    pub fn from_cartesian(re: f64, im: f64) -> Option<Self> {
        if !re.is_finite() || !im.is_finite() {
            return None;
        }
        if re == 0.0 && im == 0.0 {
            return Some(Lambda::Zero);
        }
        let logmod = re.hypot(im).ln();
        let phase = im.atan2(re) / std::f64::consts::TAU;
        Some(Lambda::polar(S::from_f64_lossy(logmod)?, S::from_f64_lossy(phase)?))
    }

    pub fn logmod(&self) -> Option<&S> {
        match self {
            Lambda::Zero => None,
            Lambda::Polar(w) => Some(w.logmod()),
        }
    }

    pub fn rotated(&self, turns: &S) -> Self {
        match self {
            Lambda::Zero => Lambda::Zero,
            Lambda::Polar(w) => Lambda::Polar(w.rotated(turns)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AperiodicBlock<S: Scalar> {
    pub id: String,
    pub vertices: BTreeMap<String, LogWeight<S>>,
    pub edges: BTreeSet<(String, String)>,
}

impl<S: Scalar> AperiodicBlock<S> {
    /// Vertex-weighted digraph with vertices in id order.
    pub fn digraph(&self) -> WeightedDigraph<S> {
        let index: BTreeMap<&str, usize> = self
            .vertices
            .keys()
            .enumerate()
            .map(|(i, k)| (k.as_str(), i))
            .collect();
        let weights = self.vertices.values().map(|w| w.logmod().clone()).collect();
        let mut adjacency = vec![Vec::new(); index.len()];
        for (from, to) in &self.edges {
            if let (Some(&u), Some(&v)) = (index.get(from.as_str()), index.get(to.as_str())) {
                adjacency[u].push(v);
            }
        }
        WeightedDigraph::new(weights, adjacency)
    }

    pub fn is_cycle(&self, cycle: &[String]) -> bool {
        if cycle.is_empty() {
            return false;
        }
        let distinct: BTreeSet<&String> = cycle.iter().collect();
        if distinct.len() != cycle.len() || cycle.iter().any(|v| !self.vertices.contains_key(v)) {
            return false;
        }
        (0..cycle.len()).all(|i| {
            let next = &cycle[(i + 1) % cycle.len()];
            self.edges.contains(&(cycle[i].clone(), next.clone()))
        })
    }
}

/// A single periodic orbit; position `j` maps to `j + 1 mod p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleBlock<S: Scalar> {
    pub id: String,
    pub weights: Vec<LogWeight<S>>,
}

impl<S: Scalar> CycleBlock<S> {
    pub fn period(&self) -> usize {
        self.weights.len()
    }

    /// `w_p` at any point of the orbit.
    pub fn product(&self) -> LogWeight<S> {
        LogWeight::product(&self.weights)
    }

    pub fn mean(&self) -> S {
        self.product().logmod().clone() / S::from_count(self.period())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductSpec<S: Scalar> {
    /// Every point of the family has `w_p` equal to this value.
    Point(LogWeight<S>),
    /// `log |w_p|` sweeps the closed band `[lo, hi]`, all phases.
    Band { lo: S, hi: S },
}

/// An open invariant set of non-isolated periodic points of one period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenPeriodicBlock<S: Scalar> {
    pub id: String,
    pub period: usize,
    pub products: Vec<ProductSpec<S>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block<S: Scalar> {
    Aperiodic(AperiodicBlock<S>),
    Cycle(CycleBlock<S>),
    ClopenPeriodic(ClopenPeriodicBlock<S>),
}

impl<S: Scalar> Block<S> {
    pub fn id(&self) -> &str {
        match self {
            Block::Aperiodic(b) => &b.id,
            Block::Cycle(b) => &b.id,
            Block::ClopenPeriodic(b) => &b.id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Block::Aperiodic(_) => "aperiodic",
            Block::Cycle(_) => "cycle",
            Block::ClopenPeriodic(_) => "clopen_periodic",
        }
    }
}

/// Limit cycle of one end of a trajectory.
///
/// For aperiodic blocks `cycle` lists the vertices of a simple cycle in
/// edge order; for cycle blocks it is empty and the whole orbit is meant.
/// `offset` is the cycle position whose weight the orbit carries at the
/// first index of the tail (forward) or the position the orbit would occupy
/// at index 0 if the backward tail were continued (backward).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub block: String,
    pub cycle: Vec<String>,
    pub offset: usize,
}

impl Anchor {
    pub fn whole(block: impl Into<String>) -> Self {
        Self {
            block: block.into(),
            cycle: Vec::new(),
            offset: 0,
        }
    }

    pub fn on_cycle(block: impl Into<String>, cycle: &[&str], offset: usize) -> Self {
        Self {
            block: block.into(),
            cycle: cycle.iter().map(|v| v.to_string()).collect(),
            offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreEntry<S: Scalar> {
    Weight(LogWeight<S>),
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory<S: Scalar> {
    pub id: String,
    pub backward: Anchor,
    pub core: Vec<CoreEntry<S>>,
    pub forward: Anchor,
}

impl<S: Scalar> Trajectory<S> {
    pub fn zero_count(&self) -> usize {
        self.core.iter().filter(|e| matches!(e, CoreEntry::Zero)).count()
    }
}

/// Unvalidated system; build one freely, then call [`SystemDraft::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDraft<S: Scalar> {
    pub blocks: Vec<Block<S>>,
    pub trajectories: Vec<Trajectory<S>>,
}

impl<S: Scalar> Default for SystemDraft<S> {
    fn default() -> Self {
        Self {
            blocks: Vec::new(),
            trajectories: Vec::new(),
        }
    }
}

impl<S: Scalar> SystemDraft<S> {
    pub fn validate(self) -> std::result::Result<SystemDescription<S>, Vec<Violation>> {
        let violations = violations(&self);
        if !violations.is_empty() {
            return Err(violations);
        }
        let attached = self
            .trajectories
            .iter()
            .flat_map(|t| [t.backward.block.clone(), t.forward.block.clone()])
            .collect();
        Ok(SystemDescription {
            blocks: self.blocks,
            trajectories: self.trajectories,
            attached,
        })
    }
}

/// A validated system. Immutable; derive variants through [`Self::to_draft`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDescription<S: Scalar> {
    blocks: Vec<Block<S>>,
    trajectories: Vec<Trajectory<S>>,
    attached: BTreeSet<String>,
}

impl<S: Scalar> SystemDescription<S> {
    pub fn blocks(&self) -> &[Block<S>] {
        &self.blocks
    }

    pub fn trajectories(&self) -> &[Trajectory<S>] {
        &self.trajectories
    }

    pub fn block(&self, id: &str) -> Option<&Block<S>> {
        self.blocks.iter().find(|b| b.id() == id)
    }

    pub fn trajectory(&self, id: &str) -> Option<&Trajectory<S>> {
        self.trajectories.iter().find(|t| t.id == id)
    }

    /// True iff no trajectory accumulates on the block, so its points are
    /// isolated in `K`. Only meaningful for cycle blocks.
    pub fn is_isolated(&self, block_id: &str) -> bool {
        !self.attached.contains(block_id)
    }

    pub fn zero_count(&self) -> usize {
        self.trajectories.iter().map(Trajectory::zero_count).sum()
    }

    pub fn is_zero_free(&self) -> bool {
        self.zero_count() == 0
    }

    pub fn to_draft(&self) -> SystemDraft<S> {
        SystemDraft {
            blocks: self.blocks.clone(),
            trajectories: self.trajectories.clone(),
        }
    }

    /// Weight sequence along a trajectory; fails if the core holds a zero.
    pub fn orbit_weights(&self, trajectory: &Trajectory<S>) -> Result<OrbitWeights<S>> {
        let core = trajectory
            .core
            .iter()
            .map(|e| match e {
                CoreEntry::Weight(w) => Ok(w.clone()),
                CoreEntry::Zero => Err(SpectraError::ZeroWeightUnsupported(trajectory.id.clone())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OrbitWeights {
            core,
            forward: self.anchor_weights(&trajectory.forward),
            backward: self.anchor_weights(&trajectory.backward),
        })
    }

    /// Anchor cycle weights rotated so element 0 sits at the anchor offset.
    pub fn anchor_weights(&self, anchor: &Anchor) -> Vec<LogWeight<S>> {
        let cycle: Vec<LogWeight<S>> = match self.block(&anchor.block) {
            Some(Block::Cycle(c)) => c.weights.clone(),
            Some(Block::Aperiodic(a)) => anchor.cycle.iter().map(|v| a.vertices[v].clone()).collect(),
            _ => unreachable!("validated anchors reference aperiodic or cycle blocks"),
        };
        let q = cycle.len();
        (0..q).map(|j| cycle[(anchor.offset + j) % q].clone()).collect()
    }

    /// Mean log-modulus of an anchor cycle.
    pub fn anchor_mean(&self, anchor: &Anchor) -> S {
        let weights = self.anchor_weights(anchor);
        let n = S::from_count(weights.len());
        LogWeight::product(&weights).logmod().clone() / n
    }

    /// The system for `phi^{-1}` carrying the adjoint's shifted weights.
    ///
    /// Edges and trajectories are reversed and every orbit weight moves one
    /// step, `v(x) = w(phi^{-1} x)`, so classifying the result at `lambda`
    /// describes `lambda I - T'` on point masses. Cycle means, cycle products
    /// and block intervals are unchanged.
    pub fn reversed(&self) -> SystemDescription<S> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Aperiodic(a) => Block::Aperiodic(AperiodicBlock {
                    id: a.id.clone(),
                    vertices: a.vertices.clone(),
                    edges: a.edges.iter().map(|(u, v)| (v.clone(), u.clone())).collect(),
                }),
                Block::Cycle(c) => {
                    // new position m is old position -m, weighted by its old
                    // predecessor -m - 1
                    let p = c.period();
                    let weights = (0..p).map(|m| c.weights[(2 * p - m - 1) % p].clone()).collect();
                    Block::Cycle(CycleBlock {
                        id: c.id.clone(),
                        weights,
                    })
                }
                Block::ClopenPeriodic(c) => Block::ClopenPeriodic(c.clone()),
            })
            .collect();
        let trajectories = self
            .trajectories
            .iter()
            .map(|t| self.reversed_trajectory(t))
            .collect();
        SystemDraft {
            blocks,
            trajectories,
        }
        .validate()
        .expect("reversal preserves validity")
    }

    fn reversed_trajectory(&self, t: &Trajectory<S>) -> Trajectory<S> {
        // With y_j = x_{n-j} the new weight at y_j is w_{n-1-j}: the core is
        // read backwards, the new forward tail reads old indices -1, -2, ...
        // and the new backward tail reads old indices n, n+1, ...
        Trajectory {
            id: t.id.clone(),
            backward: self.reversed_anchor(&t.forward),
            core: t.core.iter().rev().cloned().collect(),
            forward: self.reversed_anchor(&t.backward),
        }
    }

    fn reversed_anchor(&self, anchor: &Anchor) -> Anchor {
        match self.block(&anchor.block) {
            Some(Block::Cycle(c)) => {
                let p = c.period();
                Anchor {
                    block: anchor.block.clone(),
                    cycle: Vec::new(),
                    offset: (p - anchor.offset % p) % p,
                }
            }
            _ => {
                let q = anchor.cycle.len();
                Anchor {
                    block: anchor.block.clone(),
                    cycle: (0..q).map(|m| anchor.cycle[(q - m) % q].clone()).collect(),
                    offset: (q + 1 - anchor.offset % q) % q,
                }
            }
        }
    }
}

/// Eventually periodic weight sequence of a zero-free trajectory.
#[derive(Clone, Debug)]
pub struct OrbitWeights<S: Scalar> {
    pub core: Vec<LogWeight<S>>,
    /// Weight at index `core.len() + j` is `forward[j mod q]`.
    pub forward: Vec<LogWeight<S>>,
    /// Weight at a negative index `i` is `backward[i mod q]`.
    pub backward: Vec<LogWeight<S>>,
}

impl<S: Scalar> OrbitWeights<S> {
    pub fn at(&self, index: i64) -> &LogWeight<S> {
        let n = self.core.len() as i64;
        if index < 0 {
            &self.backward[index.rem_euclid(self.backward.len() as i64) as usize]
        } else if index < n {
            &self.core[index as usize]
        } else {
            &self.forward[((index - n) as usize) % self.forward.len()]
        }
    }

    pub fn forward_mean(&self) -> S {
        mean_logmod(&self.forward)
    }

    pub fn backward_mean(&self) -> S {
        mean_logmod(&self.backward)
    }
}

fn mean_logmod<S: Scalar>(weights: &[LogWeight<S>]) -> S {
    LogWeight::product(weights).logmod().clone() / S::from_count(weights.len())
}

fn violations<S: Scalar>(draft: &SystemDraft<S>) -> Vec<Violation> {
    let mut out = Vec::new();
    if draft.blocks.is_empty() {
        out.push(Violation::new("system", Rule::NoBlocks, ""));
    }

    let mut seen = BTreeSet::new();
    for id in draft
        .blocks
        .iter()
        .map(Block::id)
        .chain(draft.trajectories.iter().map(|t| t.id.as_str()))
    {
        if !seen.insert(id) {
            out.push(Violation::new(id, Rule::DuplicateId, ""));
        }
    }

    for block in &draft.blocks {
        block_violations(block, &mut out);
    }
    for trajectory in &draft.trajectories {
        trajectory_violations(draft, trajectory, &mut out);
    }
    out.sort();
    out.dedup();
    out
}

fn check_weight<S: Scalar>(subject: &str, w: &LogWeight<S>, out: &mut Vec<Violation>) {
    if !w.logmod().is_finite_value() || !w.phase().is_finite_value() {
        out.push(Violation::new(subject, Rule::NonFiniteWeight, ""));
    }
}

fn block_violations<S: Scalar>(block: &Block<S>, out: &mut Vec<Violation>) {
    match block {
        Block::Aperiodic(a) => {
            let id = a.id.as_str();
            if a.vertices.is_empty() {
                out.push(Violation::new(id, Rule::EmptyBlock, ""));
                return;
            }
            for w in a.vertices.values() {
                check_weight(id, w, out);
            }
            let mut unknown = false;
            for (u, v) in &a.edges {
                for x in [u, v] {
                    if !a.vertices.contains_key(x) {
                        unknown = true;
                        out.push(Violation::new(id, Rule::UnknownVertex, format!("vertex {x}")));
                    }
                }
            }
            if unknown {
                return;
            }
            let graph = a.digraph();
            for (name, v) in a.vertices.keys().zip(0..) {
                let out_deg = graph.successors(v).len();
                let in_deg = (0..graph.len()).filter(|&u| graph.successors(u).contains(&v)).count();
                if out_deg == 0 || in_deg == 0 {
                    out.push(Violation::new(id, Rule::DegreeTooLow, format!("vertex {name}")));
                }
            }
            if scc_decompose(graph.adjacency()).len() != 1 {
                out.push(Violation::new(id, Rule::NotStronglyConnected, ""));
            } else if a.edges.len() <= a.vertices.len() {
                // strongly connected with |E| = |V| is exactly one simple cycle
                out.push(Violation::new(id, Rule::AperiodicSimpleCycle, ""));
            }
        }
        Block::Cycle(c) => {
            if c.weights.is_empty() {
                out.push(Violation::new(&c.id, Rule::EmptyCycle, ""));
            }
            for w in &c.weights {
                check_weight(&c.id, w, out);
            }
        }
        Block::ClopenPeriodic(c) => {
            if c.period == 0 {
                out.push(Violation::new(&c.id, Rule::PeriodZero, ""));
            }
            if c.products.is_empty() {
                out.push(Violation::new(&c.id, Rule::EmptyProducts, ""));
            }
            for p in &c.products {
                match p {
                    ProductSpec::Point(w) => check_weight(&c.id, w, out),
                    ProductSpec::Band { lo, hi } => {
                        if !lo.is_finite_value() || !hi.is_finite_value() {
                            out.push(Violation::new(&c.id, Rule::NonFiniteWeight, ""));
                        } else if lo > hi {
                            out.push(Violation::new(&c.id, Rule::BandOrder, format!("[{lo}, {hi}]")));
                        }
                    }
                }
            }
        }
    }
}

fn trajectory_violations<S: Scalar>(draft: &SystemDraft<S>, t: &Trajectory<S>, out: &mut Vec<Violation>) {
    for entry in &t.core {
        if let CoreEntry::Weight(w) = entry {
            check_weight(&t.id, w, out);
        }
    }
    for (end, anchor) in [("backward", &t.backward), ("forward", &t.forward)] {
        let Some(block) = draft.blocks.iter().find(|b| b.id() == anchor.block) else {
            out.push(Violation::new(&t.id, Rule::UnknownBlock, format!("{end} block {}", anchor.block)));
            continue;
        };
        match block {
            Block::ClopenPeriodic(_) => {
                out.push(Violation::new(&t.id, Rule::IllegalLimitBlock, format!("{end} block {}", anchor.block)));
            }
            Block::Cycle(_) => {
                if !anchor.cycle.is_empty() {
                    out.push(Violation::new(&t.id, Rule::AnchorCycleOnCycleBlock, format!("{end} anchor")));
                }
            }
            Block::Aperiodic(a) => {
                if !a.is_cycle(&anchor.cycle) {
                    out.push(Violation::new(
                        &t.id,
                        Rule::AnchorNotCycle,
                        format!("{end} anchor [{}] in block {}", anchor.cycle.join(", "), a.id),
                    ));
                }
            }
        }
    }
}
