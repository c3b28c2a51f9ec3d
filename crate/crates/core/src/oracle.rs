//! Independent checks: explicit eigenfunctions along trajectories, adjoint
//! point-mass recurrences, brute-force cycle enumeration, and the weighted
//! permutation matrix of a purely finite system.
//!
//! Trajectory constructions run in `f64` log-polar arithmetic with
//! compensated summation, whatever scalar the system uses.

use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::cycle_means::WeightedDigraph;
use crate::error::{Result, SpectraError};
use crate::model::{Block, Lambda, LogWeight, OrbitWeights, SystemDescription};
use crate::scalar::Scalar;

pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
pub const TAIL_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_WINDOW: usize = 200;
pub const ENUMERATION_LIMIT: usize = 12;
pub const MATRIX_LIMIT: usize = 64;

/// Cooperative cancellation flag shared between a caller and a long
/// enumeration.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, AtomicOrdering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(AtomicOrdering::Relaxed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub trajectory_id: String,
    pub lambda: LogWeight<f64>,
    pub window: usize,
    /// Largest relative residual of the eigen-equation on the window.
    pub max_residual: f64,
    /// `|u(-N)|` and `|u(N)|` (kernel) or the `l1` mass of the outer half of
    /// the window on each side (adjoint), relative to the window maximum.
    pub tails: (f64, f64),
    pub verdict: bool,
}

/// Neumaier summation.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `log|c_j|` and `arg c_j` (turns) on `[-n, n]` for `c_0 = 1`,
/// `c_{j+1} = w_j c_j / lambda`. The kernel function is `u_j = 1 / c_j`.
struct Walk {
    n: usize,
    logmod: Vec<f64>,
    phase: Vec<f64>,
}

impl Walk {
    fn new<S: Scalar>(orbit: &OrbitWeights<S>, lambda: &LogWeight<f64>, n: usize) -> Self {
        let step = |j: i64| {
            let w = orbit.at(j);
            (w.logmod().as_f64() - lambda.logmod(), w.phase().as_f64() - lambda.phase())
        };
        let mut logmod = vec![0.0; 2 * n + 1];
        let mut phase = vec![0.0; 2 * n + 1];
        let (mut lm, mut ph) = (Compensated::default(), Compensated::default());
        for j in 1..=n as i64 {
            let (a, p) = step(j - 1);
            lm.add(a);
            ph.add(p);
            logmod[n + j as usize] = lm.value();
            phase[n + j as usize] = ph.value();
        }
        let (mut lm, mut ph) = (Compensated::default(), Compensated::default());
        for j in 1..=n as i64 {
            let (a, p) = step(-j);
            lm.add(-a);
            ph.add(-p);
            logmod[n - j as usize] = lm.value();
            phase[n - j as usize] = ph.value();
        }
        Self { n, logmod, phase }
    }

    fn at(&self, j: i64) -> (f64, f64) {
        let k = (self.n as i64 + j) as usize;
        (self.logmod[k], self.phase[k])
    }
}

/// `|e^{x + 2 pi i p} - 1|`.
fn distance_from_one(x: f64, p: f64) -> f64 {
    let theta = std::f64::consts::TAU * (p - p.round());
    (Complex64::from_polar(x.exp(), theta) - Complex64::new(1.0, 0.0)).norm()
}

fn prepare<S: Scalar>(
    system: &SystemDescription<S>,
    trajectory_id: &str,
    lambda: &Lambda<S>,
) -> Result<(OrbitWeights<S>, LogWeight<f64>)> {
    let trajectory = system
        .trajectory(trajectory_id)
        .ok_or_else(|| SpectraError::UnknownTrajectory(trajectory_id.to_string()))?;
    let orbit = system.orbit_weights(trajectory)?;
    let Lambda::Polar(w) = lambda else {
        return Err(SpectraError::ZeroLambda);
    };
    Ok((orbit, w.to_f64()))
}

/// Builds `u(phi^i k) = lambda^i / w_i(k)`, `u(phi^{-i} k) = w_i(phi^{-i} k) / lambda^i`
/// with `k` the first core point, and checks `w u o phi = lambda u` and decay
/// at both ends of the window `[-n, n]`.
pub fn kernel_candidate<S: Scalar>(
    system: &SystemDescription<S>,
    trajectory_id: &str,
    lambda: &Lambda<S>,
    n: usize,
) -> Result<ResidualReport> {
    let (orbit, lam) = prepare(system, trajectory_id, lambda)?;
    let walk = Walk::new(&orbit, &lam, n);
    let u = |j: i64| {
        let (l, p) = walk.at(j);
        (-l, -p)
    };
    let n_i = n as i64;
    let mut max_residual: f64 = 0.0;
    for j in -n_i..n_i {
        let w = orbit.at(j);
        let (lu0, pu0) = u(j);
        let (lu1, pu1) = u(j + 1);
        let x = w.logmod().as_f64() + lu1 - lam.logmod() - lu0;
        let p = w.phase().as_f64() + pu1 - lam.phase() - pu0;
        max_residual = max_residual.max(distance_from_one(x, p));
    }
    let peak = (-n_i..=n_i).map(|j| u(j).0).fold(f64::NEG_INFINITY, f64::max);
    let tails = ((u(-n_i).0 - peak).exp(), (u(n_i).0 - peak).exp());
    let verdict = max_residual <= RESIDUAL_TOLERANCE && tails.0 <= TAIL_TOLERANCE && tails.1 <= TAIL_TOLERANCE;
    Ok(ResidualReport {
        trajectory_id: trajectory_id.to_string(),
        lambda: lam,
        window: n,
        max_residual,
        tails,
        verdict,
    })
}

/// Point-mass solution `mu = sum c_j delta_{phi^j k}` of `T' mu = lambda mu`,
/// i.e. `lambda c_{j+1} = w(phi^j k) c_j`, tested for summability on `[-n, n]`.
pub fn adjoint_candidate<S: Scalar>(
    system: &SystemDescription<S>,
    trajectory_id: &str,
    lambda: &Lambda<S>,
    n: usize,
) -> Result<ResidualReport> {
    let (orbit, lam) = prepare(system, trajectory_id, lambda)?;
    let walk = Walk::new(&orbit, &lam, n);
    let n_i = n as i64;
    let mut max_residual: f64 = 0.0;
    for j in -n_i..n_i {
        let w = orbit.at(j);
        let (lc0, pc0) = walk.at(j);
        let (lc1, pc1) = walk.at(j + 1);
        let x = w.logmod().as_f64() + lc0 - lam.logmod() - lc1;
        let p = w.phase().as_f64() + pc0 - lam.phase() - pc1;
        max_residual = max_residual.max(distance_from_one(x, p));
    }
    let peak = (-n_i..=n_i).map(|j| walk.at(j).0).fold(f64::NEG_INFINITY, f64::max);
    let outer = |range: &mut dyn Iterator<Item = i64>| {
        let mut mass = Compensated::default();
        for j in range {
            mass.add((walk.at(j).0 - peak).exp());
        }
        mass.value()
    };
    let half = n_i / 2;
    let tails = (outer(&mut (-n_i..-half)), outer(&mut (half + 1..=n_i)));
    let verdict = max_residual <= RESIDUAL_TOLERANCE && tails.0 <= TAIL_TOLERANCE && tails.1 <= TAIL_TOLERANCE;
    Ok(ResidualReport {
        trajectory_id: trajectory_id.to_string(),
        lambda: lam,
        window: n,
        max_residual,
        tails,
        verdict,
    })
}

/// Exact `(min, max)` simple-cycle mean by listing every simple cycle.
pub fn enumerate_cycle_means<S: Scalar>(graph: &WeightedDigraph<S>, cancel: &CancelToken) -> Result<(S, S)> {
    if graph.len() > ENUMERATION_LIMIT {
        return Err(SpectraError::TooLarge(graph.len(), ENUMERATION_LIMIT));
    }
    let mut best: Option<(S, S)> = None;
    for start in 0..graph.len() {
        let mut on_path = vec![false; graph.len()];
        on_path[start] = true;
        // (vertex, next successor slot, path sum up to and including vertex)
        let mut stack = vec![(start, 0usize, graph.weight(start).clone())];
        while let Some((v, slot, sum)) = stack.last().cloned() {
            if cancel.is_cancelled() {
                return Err(SpectraError::Cancelled);
            }
            let Some(&next) = graph.successors(v).get(slot) else {
                on_path[v] = false;
                stack.pop();
                continue;
            };
            stack.last_mut().expect("nonempty").1 += 1;
            if next == start {
                let mean = sum / S::from_count(stack.len());
                best = Some(match best {
                    None => (mean.clone(), mean),
                    Some((lo, hi)) => (
                        if mean < lo { mean.clone() } else { lo },
                        if mean > hi { mean } else { hi },
                    ),
                });
            } else if next > start && !on_path[next] {
                on_path[next] = true;
                let total = sum + graph.weight(next).clone();
                stack.push((next, 0, total));
            }
        }
    }
    best.ok_or_else(|| SpectraError::Malformed("graph has no cycles".into()))
}

/// Eigenvalues of `T` on a system made only of isolated cycle blocks,
/// read off the cycles of its weighted permutation matrix.
pub fn finite_matrix_spectrum<S: Scalar>(system: &SystemDescription<S>) -> Result<Vec<Complex64>> {
    if let Some(t) = system.trajectories().first() {
        return Err(SpectraError::NotFinite(t.id.clone()));
    }
    let mut diagonal_weights = Vec::new();
    for block in system.blocks() {
        match block {
            Block::Cycle(c) => diagonal_weights.push(&c.weights),
            other => return Err(SpectraError::NotFinite(other.id().to_string())),
        }
    }
    let dim: usize = diagonal_weights.iter().map(|w| w.len()).sum();
    if dim > MATRIX_LIMIT {
        return Err(SpectraError::TooLarge(dim, MATRIX_LIMIT));
    }

    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    let mut base = 0;
    for weights in &diagonal_weights {
        let p = weights.len();
        for (j, w) in weights.iter().enumerate() {
            let w = w.to_f64();
            matrix[base + j][base + (j + 1) % p] =
                Complex64::from_polar(w.logmod().exp(), std::f64::consts::TAU * w.phase());
        }
        base += p;
    }

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut seen = vec![false; dim];
    for start in 0..dim {
        if seen[start] {
            continue;
        }
        let mut product = Complex64::new(1.0, 0.0);
        let mut length = 0;
        let mut row = start;
        while !seen[row] {
            seen[row] = true;
            let col = (0..dim)
                .find(|&c| matrix[row][c].norm() > 0.0)
                .expect("permutation matrix row has one entry");
            product *= matrix[row][col];
            length += 1;
            row = col;
        }
        let (r, theta) = product.to_polar();
        let modulus = r.powf(1.0 / length as f64);
        for k in 0..length {
            let arg = (theta + std::f64::consts::TAU * k as f64) / length as f64;
            eigenvalues.push(Complex64::from_polar(modulus, arg));
        }
    }
    eigenvalues.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite eigenvalues"));
    Ok(eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Anchor, CycleBlock, SystemDraft, Trajectory};
    use crate::scalar::{rational, Rational};

    fn fixed(id: &str, logmod: f64) -> Block<f64> {
        Block::Cycle(CycleBlock {
            id: id.into(),
            weights: vec![LogWeight::real(logmod)],
        })
    }

    fn shift(back: f64, fwd: f64) -> SystemDescription<f64> {
        SystemDraft {
            blocks: vec![fixed("b", back), fixed("f", fwd)],
            trajectories: vec![Trajectory {
                id: "t".into(),
                backward: Anchor::whole("b"),
                core: vec![],
                forward: Anchor::whole("f"),
            }],
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn kernel_on_shift() {
        let ln2 = std::f64::consts::LN_2;
        let one = Lambda::polar(0.0, 0.0);
        let r = kernel_candidate(&shift(-ln2, ln2), "t", &one, 200).unwrap();
        assert!(r.max_residual <= 1e-12);
        assert!(r.tails.0 < 1e-50 && r.tails.1 < 1e-50);
        assert!(r.verdict);

        let r = kernel_candidate(&shift(ln2, -ln2), "t", &one, 200).unwrap();
        assert!(!r.verdict);

        let edge = Lambda::polar(ln2, 0.25);
        assert!(!kernel_candidate(&shift(-ln2, ln2), "t", &edge, 200).unwrap().verdict);
    }

    #[test]
    fn adjoint_on_shift() {
        let ln2 = std::f64::consts::LN_2;
        let one = Lambda::polar(0.0, 0.0);
        let r = adjoint_candidate(&shift(ln2, -ln2), "t", &one, 200).unwrap();
        assert!(r.max_residual <= 1e-12);
        assert!(r.verdict);
        assert!(!adjoint_candidate(&shift(-ln2, ln2), "t", &one, 200).unwrap().verdict);
        let above = Lambda::polar(1.0, 0.0);
        assert!(!adjoint_candidate(&shift(-ln2, ln2), "t", &above, 200).unwrap().verdict);
    }

    #[test]
    fn enumeration_examples() {
        let g = WeightedDigraph::new(vec![rational(2, 1), rational(0, 1)], vec![vec![0, 1], vec![0]]);
        assert_eq!(
            enumerate_cycle_means(&g, &CancelToken::new()).unwrap(),
            (rational(1, 1), rational(2, 1))
        );
        let g = WeightedDigraph::new(vec![rational(-3, 4)], vec![vec![0]]);
        assert_eq!(
            enumerate_cycle_means(&g, &CancelToken::new()).unwrap(),
            (rational(-3, 4), rational(-3, 4))
        );
        let g: WeightedDigraph<Rational> = WeightedDigraph::new(
            vec![rational(0, 1); 13],
            (0..13).map(|v| vec![(v + 1) % 13]).collect(),
        );
        assert!(matches!(
            enumerate_cycle_means(&g, &CancelToken::new()),
            Err(SpectraError::TooLarge(13, 12))
        ));
        let token = CancelToken::new();
        token.cancel();
        let g = WeightedDigraph::new(vec![0.0, 0.0], vec![vec![1], vec![0]]);
        assert!(matches!(enumerate_cycle_means(&g, &token), Err(SpectraError::Cancelled)));
    }

    #[test]
    fn finite_matrix_examples() {
        let close = |a: &[Complex64], b: &[Complex64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
        };
        let two = SystemDraft {
            blocks: vec![Block::Cycle(CycleBlock {
                id: "c".into(),
                weights: vec![LogWeight::real(0.0), LogWeight::real(0.0)],
            })],
            trajectories: vec![],
        }
        .validate()
        .unwrap();
        let ev = finite_matrix_spectrum(&two).unwrap();
        assert!(close(&ev, &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]));

        let diag = SystemDraft {
            blocks: vec![fixed("a", 3f64.ln()), fixed("b", 5f64.ln())],
            trajectories: vec![],
        }
        .validate()
        .unwrap();
        let ev = finite_matrix_spectrum(&diag).unwrap();
        assert!(close(&ev, &[Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0)]));

        let cube = SystemDraft {
            blocks: vec![Block::Cycle(CycleBlock {
                id: "c".into(),
                weights: vec![LogWeight::new(0.0, 0.5), LogWeight::real(0.0), LogWeight::real(0.0)],
            })],
            trajectories: vec![],
        }
        .validate()
        .unwrap();
        for z in finite_matrix_spectrum(&cube).unwrap() {
            assert!((z.powu(3) + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }

        assert!(matches!(
            finite_matrix_spectrum(&shift(0.0, 1.0)),
            Err(SpectraError::NotFinite(_))
        ));
    }
}
