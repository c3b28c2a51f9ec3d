//! Fredholm analysis of `lambda I - T` at a single spectral parameter.

use serde_json::{json, Map, Value};

use crate::error::{Result, SpectraError};
use crate::model::{Lambda, LogWeight, SystemDescription, Trajectory};
use crate::partition::{without, Obstruction, OneSided, SystemAnalysis};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Forward partial sums stay at or above `n t`, backward ones at or below.
    Kernel,
    /// The reversed inequalities.
    Deficiency,
}

/// Which defect number is finite for a semi-Fredholm operator that is not
/// Fredholm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiniteSide {
    Nul,
    Def,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FredholmStatus {
    Resolvent,
    Fredholm { nul: usize, def: usize, index: i64 },
    SemiFredholmOnly { side: FiniteSide, count: usize },
    NotSemiFredholm { witness: String },
}

impl FredholmStatus {
    pub fn is_fredholm(&self) -> bool {
        matches!(self, FredholmStatus::Resolvent | FredholmStatus::Fredholm { .. })
    }

    /// `Some(0)` for the resolvent set.
    pub fn index(&self) -> Option<i64> {
        match self {
            FredholmStatus::Resolvent => Some(0),
            FredholmStatus::Fredholm { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// Membership of `lambda` in the five essential spectra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SigmaMembership(pub [bool; 5]);

impl SigmaMembership {
    /// `i` in `1..=5`.
    pub fn contains(&self, i: usize) -> bool {
        self.0[i - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FredholmReport<S: Scalar> {
    pub lambda: Lambda<S>,
    pub status: FredholmStatus,
    pub kernel_trajectories: Vec<String>,
    pub deficiency_trajectories: Vec<String>,
    pub matched_cycles: Vec<String>,
    pub sigma: SigmaMembership,
}

/// Index of a point on the trajectory satisfying the crossing inequalities
/// in `direction`, if any.
///
/// With `S(j)` the partial sums of `logmod - t` (`S(0) = 0`), a point at
/// index `j` satisfies the kernel inequalities iff `S(j)` is a global
/// minimum of `S`, and the deficiency inequalities iff it is a global
/// maximum. Beyond one anchor period on either side `S` only repeats or
/// moves away from its extremum, so a finite window decides.
pub fn crossing_witness<S: Scalar>(
    system: &SystemDescription<S>,
    trajectory: &Trajectory<S>,
    t: &S,
    direction: Direction,
) -> Result<Option<i64>> {
    let orbit = system.orbit_weights(trajectory)?;
    let (mb, mf) = (orbit.backward_mean(), orbit.forward_mean());
    let bounded = match direction {
        Direction::Kernel => &mb <= t && t <= &mf,
        Direction::Deficiency => &mf <= t && t <= &mb,
    };
    if !bounded {
        return Ok(None);
    }
    let n = orbit.core.len() as i64;
    let qb = orbit.backward.len() as i64;
    let qf = orbit.forward.len() as i64;

    let mut sums = vec![(0i64, S::zero())];
    let mut s = S::zero();
    for j in 1..=(n + qf) {
        s = s + orbit.at(j - 1).logmod().clone() - t.clone();
        sums.push((j, s.clone()));
    }
    let mut s = S::zero();
    for j in (-qb..0).rev() {
        s = s - (orbit.at(j).logmod().clone() - t.clone());
        sums.push((j, s.clone()));
    }
    sums.sort_by_key(|(j, _)| *j);
    let better = |a: &S, b: &S| match direction {
        Direction::Kernel => a < b,
        Direction::Deficiency => a > b,
    };
    let mut best = sums[0].clone();
    for (j, v) in sums.into_iter().skip(1) {
        if better(&v, &best.1) {
            best = (j, v);
        }
    }
    Ok(Some(best.0))
}

pub fn crossing_exists<S: Scalar>(
    system: &SystemDescription<S>,
    trajectory: &Trajectory<S>,
    t: &S,
    direction: Direction,
) -> Result<bool> {
    Ok(crossing_witness(system, trajectory, t, direction)?.is_some())
}

/// Classifies `lambda I - T`.
pub fn classify<S: Scalar>(system: &SystemDescription<S>, lambda: &Lambda<S>) -> Result<FredholmReport<S>> {
    classify_with(&SystemAnalysis::new(system), lambda)
}

/// [`classify`] reusing precomputed block summaries.
pub fn classify_with<S: Scalar>(analysis: &SystemAnalysis<'_, S>, lambda: &Lambda<S>) -> Result<FredholmReport<S>> {
    let system = analysis.system();
    let Lambda::Polar(w) = lambda else {
        let zeros = system.zero_count();
        let status = if zeros == 0 {
            FredholmStatus::Resolvent
        } else {
            FredholmStatus::Fredholm {
                nul: zeros,
                def: zeros,
                index: 0,
            }
        };
        let holders = system
            .trajectories()
            .iter()
            .filter(|t| t.zero_count() > 0)
            .map(|t| t.id.clone())
            .collect::<Vec<_>>();
        return Ok(FredholmReport {
            lambda: Lambda::Zero,
            status,
            kernel_trajectories: holders.clone(),
            deficiency_trajectories: holders,
            matched_cycles: Vec::new(),
            sigma: SigmaMembership::default(),
        });
    };
    if let Some(t) = system.trajectories().iter().find(|t| t.zero_count() > 0) {
        return Err(SpectraError::ZeroWeightUnsupported(t.id.clone()));
    }
    let t = w.logmod();
    let obstructions = analysis.obstructions(w);
    let matched_cycles: Vec<String> = obstructions
        .iter()
        .filter(|o| !o.is_essential())
        .map(|o| o.block().to_string())
        .collect();
    let (mut kernel, mut deficiency) = (Vec::new(), Vec::new());
    for (traj, (mb, mf)) in system.trajectories().iter().zip(analysis.anchor_means()) {
        if mb < t && t < mf {
            kernel.push(traj.id.clone());
        } else if mf < t && t < mb {
            deficiency.push(traj.id.clone());
        }
    }
    let in_fill = system.trajectories().iter().any(|traj| {
        let (lo, hi) = analysis.trajectory_hull(traj);
        &lo <= t && t <= &hi
    });

    let status = if let Some(o) = obstructions.iter().find(|o| o.is_essential()) {
        FredholmStatus::NotSemiFredholm { witness: o.describe() }
    } else {
        let l = matched_cycles.len();
        let counted: Vec<String> = kernel.iter().chain(&deficiency).cloned().collect();
        let remainder = match without(system, &counted, &matched_cycles) {
            Some(rest) => SystemAnalysis::new(&rest).one_sided(lambda)?.status,
            None => OneSided::Both,
        };
        let (nul, def) = (kernel.len() + l, deficiency.len() + l);
        match remainder {
            OneSided::Both if nul == 0 && def == 0 => FredholmStatus::Resolvent,
            OneSided::Both => FredholmStatus::Fredholm {
                nul,
                def,
                index: nul as i64 - def as i64,
            },
            OneSided::LeftOnly => FredholmStatus::SemiFredholmOnly {
                side: FiniteSide::Nul,
                count: nul,
            },
            OneSided::RightOnly => FredholmStatus::SemiFredholmOnly {
                side: FiniteSide::Def,
                count: def,
            },
            OneSided::Neither => FredholmStatus::NotSemiFredholm {
                witness: "remainder has neither one-sided inverse".into(),
            },
        }
    };

    let essential = obstructions.iter().any(Obstruction::is_essential);
    let sigma = sigma_flags(&status, essential || in_fill);
    Ok(FredholmReport {
        lambda: lambda.clone(),
        status,
        kernel_trajectories: kernel,
        deficiency_trajectories: deficiency,
        matched_cycles,
        sigma,
    })
}

fn sigma_flags(status: &FredholmStatus, sigma5: bool) -> SigmaMembership {
    let (s1, s2, s3, s4) = match status {
        FredholmStatus::Resolvent => (false, false, false, false),
        FredholmStatus::Fredholm { index, .. } => (false, false, false, *index != 0),
        FredholmStatus::SemiFredholmOnly { side: FiniteSide::Nul, .. } => (false, false, true, true),
        FredholmStatus::SemiFredholmOnly { side: FiniteSide::Def, .. } => (false, true, true, true),
        FredholmStatus::NotSemiFredholm { .. } => (true, true, true, true),
    };
    SigmaMembership([s1, s2, s3, s4, sigma5])
}

pub(crate) fn weight_json<S: Scalar>(w: &LogWeight<S>) -> Value {
    json!({ "logmod": w.logmod().as_f64(), "phase": w.phase().as_f64() })
}

pub(crate) fn lambda_json<S: Scalar>(lambda: &Lambda<S>) -> Value {
    match lambda {
        Lambda::Zero => json!("zero"),
        Lambda::Polar(w) => weight_json(w),
    }
}

impl<S: Scalar> FredholmReport<S> {
    pub fn to_json(&self) -> Value {
        let mut status = Map::new();
        match &self.status {
            FredholmStatus::Resolvent => {
                status.insert("kind".into(), json!("resolvent"));
            }
            FredholmStatus::Fredholm { nul, def, index } => {
                status.insert("kind".into(), json!("fredholm"));
                status.insert("nul".into(), json!(nul));
                status.insert("def".into(), json!(def));
                status.insert("index".into(), json!(index));
            }
            FredholmStatus::SemiFredholmOnly { side, count } => {
                status.insert("kind".into(), json!("semi_fredholm_only"));
                let key = match side {
                    FiniteSide::Nul => "nul",
                    FiniteSide::Def => "def",
                };
                status.insert("finite".into(), json!(key));
                status.insert(key.into(), json!(count));
            }
            FredholmStatus::NotSemiFredholm { witness } => {
                status.insert("kind".into(), json!("not_semi_fredholm"));
                status.insert("witness".into(), json!(witness));
            }
        }
        let sigma: Map<String, Value> = (1..=5)
            .map(|i| (format!("sigma{i}"), json!(self.sigma.contains(i))))
            .collect();
        json!({
            "lambda": lambda_json(&self.lambda),
            "status": status,
            "kernel_trajectories": self.kernel_trajectories,
            "deficiency_trajectories": self.deficiency_trajectories,
            "matched_cycles": self.matched_cycles,
            "sigma": sigma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Anchor, Block, CoreEntry, CycleBlock, SystemDraft};
    use crate::scalar::{rational, Rational};

    fn ln2() -> Rational {
        rational(6931, 10000)
    }

    fn fixed(id: &str, logmod: Rational) -> Block<Rational> {
        Block::Cycle(CycleBlock {
            id: id.into(),
            weights: vec![LogWeight::real(logmod)],
        })
    }

    fn shift(core: Vec<CoreEntry<Rational>>, back: Rational, fwd: Rational) -> SystemDescription<Rational> {
        SystemDraft {
            blocks: vec![fixed("b", back), fixed("f", fwd)],
            trajectories: vec![Trajectory {
                id: "t".into(),
                backward: Anchor::whole("b"),
                core,
                forward: Anchor::whole("f"),
            }],
        }
        .validate()
        .unwrap()
    }

    fn one() -> Lambda<Rational> {
        Lambda::polar(rational(0, 1), rational(0, 1))
    }

    #[test]
    fn crossing_examples() {
        let core = vec![CoreEntry::Weight(LogWeight::real(rational(0, 1)))];
        let s = shift(core, -ln2(), ln2());
        let t = &s.trajectories()[0];
        assert!(crossing_exists(&s, t, &rational(0, 1), Direction::Kernel).unwrap());
        assert!(!crossing_exists(&s, t, &rational(1, 1), Direction::Kernel).unwrap());
        assert!(!crossing_exists(&s, t, &rational(0, 1), Direction::Deficiency).unwrap());

        let flat = shift(vec![], rational(0, 1), rational(0, 1));
        let t = &flat.trajectories()[0];
        assert!(crossing_exists(&flat, t, &rational(0, 1), Direction::Kernel).unwrap());
        assert!(crossing_exists(&flat, t, &rational(0, 1), Direction::Deficiency).unwrap());
    }

    #[test]
    fn crossing_witness_is_the_minimum() {
        let core = [3, -5, 1]
            .iter()
            .map(|&x| CoreEntry::Weight(LogWeight::real(rational(x, 1))))
            .collect();
        let s = shift(core, rational(-1, 1), rational(1, 1));
        let t = &s.trajectories()[0];
        assert_eq!(crossing_witness(&s, t, &rational(0, 1), Direction::Kernel).unwrap(), Some(2));
    }

    #[test]
    fn shift_classification() {
        let s = shift(vec![], -ln2(), ln2());
        let r = classify(&s, &one()).unwrap();
        assert_eq!(r.status, FredholmStatus::Fredholm { nul: 1, def: 0, index: 1 });
        assert_eq!(r.kernel_trajectories, vec!["t".to_string()]);
        assert_eq!(r.sigma, SigmaMembership([false, false, false, true, true]));

        let r = classify(&s.reversed(), &one()).unwrap();
        assert_eq!(r.status, FredholmStatus::Fredholm { nul: 0, def: 1, index: -1 });

        let r = classify(&s, &Lambda::polar(ln2(), rational(1, 3))).unwrap();
        assert!(matches!(r.status, FredholmStatus::NotSemiFredholm { .. }));
        assert_eq!(r.sigma, SigmaMembership([true; 5]));

        let r = classify(&s, &Lambda::polar(rational(2, 1), rational(0, 1))).unwrap();
        assert_eq!(r.status, FredholmStatus::Resolvent);
    }

    #[test]
    fn isolated_fixed_point() {
        let s = SystemDraft {
            blocks: vec![fixed("c", rational(0, 1))],
            trajectories: vec![],
        }
        .validate()
        .unwrap();
        let r = classify(&s, &one()).unwrap();
        assert_eq!(r.status, FredholmStatus::Fredholm { nul: 1, def: 1, index: 0 });
        assert_eq!(r.matched_cycles, vec!["c".to_string()]);
        assert_eq!(r.sigma, SigmaMembership::default());
    }

    #[test]
    fn zero_weights() {
        let s = shift(vec![CoreEntry::Zero], -ln2(), ln2());
        let r = classify(&s, &Lambda::Zero).unwrap();
        assert_eq!(r.status, FredholmStatus::Fredholm { nul: 1, def: 1, index: 0 });
        assert!(matches!(classify(&s, &one()), Err(SpectraError::ZeroWeightUnsupported(_))));
        let clean = shift(vec![], -ln2(), ln2());
        assert_eq!(classify(&clean, &Lambda::Zero).unwrap().status, FredholmStatus::Resolvent);
    }
}
