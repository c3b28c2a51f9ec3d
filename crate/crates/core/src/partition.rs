//! One-sided invertibility of `lambda I - T` and the full spectrum.
//!
//! For `lambda != 0` with `t = log|lambda|`, every block is labelled `E`
//! (its spectrum lies strictly inside `|z| < |lambda|`), `F` (strictly
//! outside), `P` (an isolated periodic part with `lambda` off its
//! eigenvalues) or `Obstructed`. Trajectories are then oriented by the
//! labels of their two limit blocks. A trajectory running from `E` back to
//! `F` forward makes `lambda I - T` surjective but not injective; the
//! opposite orientation makes it bounded below but not surjective.

use serde_json::{json, Value};

use crate::cycle_means::{block_radial_spectrum, BlockPayload, BlockSpectrumSummary};
use crate::error::{Result, SpectraError};
use crate::model::{Lambda, LogWeight, SystemDescription, Trajectory};
use crate::scalar::{max_of, min_of, Scalar};
use crate::spectral_set::SpectralSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockLabel {
    E,
    F,
    P,
    Obstructed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    InsideE,
    InsideF,
    /// Forward limit in `F`, backward limit in `E`.
    ForwardFBackwardE,
    /// Forward limit in `E`, backward limit in `F`.
    ForwardEBackwardF,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionAssignment {
    pub blocks: Vec<(String, BlockLabel)>,
    /// `None` when a limit block is obstructed.
    pub trajectories: Vec<(String, Option<Orientation>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OneSided {
    /// `lambda` is in the resolvent set.
    Both,
    /// Right invertible only: `lambda` in the residual spectrum of `T'`.
    RightOnly,
    /// Left invertible only: `lambda` in the residual spectrum of `T`.
    LeftOnly,
    /// Approximate eigenvalue of both `T` and `T'`.
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneSidedResult {
    pub status: OneSided,
    /// Present when `status` is `Both`, `RightOnly` or `LeftOnly`.
    pub witness: Option<PartitionAssignment>,
}

/// Why a block forbids any partition at a given `lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `t` inside an aperiodic block's cycle-mean interval.
    Aperiodic { block: String },
    /// `t` equals the mean of a cycle that trajectories accumulate on.
    Circle { block: String },
    /// `lambda` in the spectrum of a clopen periodic family.
    Sigma { block: String },
    /// `lambda^p = w_p` on an isolated periodic orbit.
    Eigenvalue { block: String },
}

impl Obstruction {
    pub fn block(&self) -> &str {
        match self {
            Obstruction::Aperiodic { block }
            | Obstruction::Circle { block }
            | Obstruction::Sigma { block }
            | Obstruction::Eigenvalue { block } => block,
        }
    }

    /// Non-isolated witnesses kill semi-Fredholmness; eigenvalues of
    /// isolated orbits do not.
    pub fn is_essential(&self) -> bool {
        !matches!(self, Obstruction::Eigenvalue { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            Obstruction::Aperiodic { block } => format!("log|lambda| within cycle-mean interval of aperiodic block {block}"),
            Obstruction::Circle { block } => format!("log|lambda| equals the mean of non-isolated cycle {block}"),
            Obstruction::Sigma { block } => format!("lambda lies in the spectrum of clopen periodic block {block}"),
            Obstruction::Eigenvalue { block } => format!("lambda^p = w_p on isolated cycle {block}"),
        }
    }
}

/// Per-system data shared across many spectral parameters: block summaries
/// (cycle means) and anchor means of every trajectory.
#[derive(Clone, Debug)]
pub struct SystemAnalysis<'a, S: Scalar> {
    system: &'a SystemDescription<S>,
    summaries: Vec<BlockSpectrumSummary<S>>,
    anchor_means: Vec<(S, S)>,
}

impl<'a, S: Scalar> SystemAnalysis<'a, S> {
    pub fn new(system: &'a SystemDescription<S>) -> Self {
        let summaries = system
            .blocks()
            .iter()
            .map(|b| block_radial_spectrum(b, system.is_isolated(b.id())))
            .collect();
        let anchor_means = system
            .trajectories()
            .iter()
            .map(|t| (system.anchor_mean(&t.backward), system.anchor_mean(&t.forward)))
            .collect();
        Self {
            system,
            summaries,
            anchor_means,
        }
    }

    pub fn system(&self) -> &'a SystemDescription<S> {
        self.system
    }

    pub fn summaries(&self) -> &[BlockSpectrumSummary<S>] {
        &self.summaries
    }

    pub fn summary(&self, block_id: &str) -> &BlockSpectrumSummary<S> {
        self.summaries
            .iter()
            .find(|s| s.block_id == block_id)
            .expect("block id resolves")
    }

    /// `(backward anchor mean, forward anchor mean)` per trajectory.
    pub fn anchor_means(&self) -> &[(S, S)] {
        &self.anchor_means
    }

    /// Closed log-radius hull spanned by a trajectory's two limit blocks.
    pub fn trajectory_hull(&self, trajectory: &Trajectory<S>) -> (S, S) {
        let b = self.summary(&trajectory.backward.block);
        let f = self.summary(&trajectory.forward.block);
        (min_of(&b.min_mean, &f.min_mean), max_of(&b.max_mean, &f.max_mean))
    }

    pub fn label(&self, summary: &BlockSpectrumSummary<S>, lambda: &LogWeight<S>) -> BlockLabel {
        let t = lambda.logmod();
        match &summary.payload {
            BlockPayload::Aperiodic | BlockPayload::Cycle { isolated: false, .. } => {
                if &summary.max_mean < t {
                    BlockLabel::E
                } else if &summary.min_mean > t {
                    BlockLabel::F
                } else {
                    BlockLabel::Obstructed
                }
            }
            BlockPayload::Cycle { isolated: true, .. } | BlockPayload::ClopenPeriodic { .. } => {
                if summary.radial_spectrum.contains_point(lambda) {
                    BlockLabel::Obstructed
                } else {
                    BlockLabel::P
                }
            }
        }
    }

    pub fn obstructions(&self, lambda: &LogWeight<S>) -> Vec<Obstruction> {
        self.summaries
            .iter()
            .filter(|s| self.label(s, lambda) == BlockLabel::Obstructed)
            .map(|s| {
                let block = s.block_id.clone();
                match &s.payload {
                    BlockPayload::Aperiodic => Obstruction::Aperiodic { block },
                    BlockPayload::Cycle { isolated: false, .. } => Obstruction::Circle { block },
                    BlockPayload::Cycle { isolated: true, .. } => Obstruction::Eigenvalue { block },
                    BlockPayload::ClopenPeriodic { .. } => Obstruction::Sigma { block },
                }
            })
            .collect()
    }

    pub fn assignment(&self, lambda: &LogWeight<S>) -> PartitionAssignment {
        let blocks: Vec<(String, BlockLabel)> = self
            .summaries
            .iter()
            .map(|s| (s.block_id.clone(), self.label(s, lambda)))
            .collect();
        let label_of = |id: &str| {
            blocks
                .iter()
                .find(|(b, _)| b == id)
                .map(|(_, l)| *l)
                .expect("block id resolves")
        };
        let trajectories = self
            .system
            .trajectories()
            .iter()
            .map(|t| {
                let orientation = match (label_of(&t.backward.block), label_of(&t.forward.block)) {
                    (BlockLabel::E, BlockLabel::E) => Some(Orientation::InsideE),
                    (BlockLabel::F, BlockLabel::F) => Some(Orientation::InsideF),
                    (BlockLabel::E, BlockLabel::F) => Some(Orientation::ForwardFBackwardE),
                    (BlockLabel::F, BlockLabel::E) => Some(Orientation::ForwardEBackwardF),
                    _ => None,
                };
                (t.id.clone(), orientation)
            })
            .collect();
        PartitionAssignment { blocks, trajectories }
    }

    /// Left/right invertibility of `lambda I - T`. Requires a zero-free system.
    pub fn one_sided(&self, lambda: &Lambda<S>) -> Result<OneSidedResult> {
        let Lambda::Polar(lambda) = lambda else {
            return Err(SpectraError::ZeroLambda);
        };
        if let Some(t) = self.system.trajectories().iter().find(|t| t.zero_count() > 0) {
            return Err(SpectraError::ZeroWeightUnsupported(t.id.clone()));
        }
        let assignment = self.assignment(lambda);
        if assignment.blocks.iter().any(|(_, l)| *l == BlockLabel::Obstructed) {
            return Ok(OneSidedResult {
                status: OneSided::Neither,
                witness: None,
            });
        }
        let count = |o: Orientation| {
            assignment
                .trajectories
                .iter()
                .filter(|(_, x)| *x == Some(o))
                .count()
        };
        let right = count(Orientation::ForwardFBackwardE);
        let left = count(Orientation::ForwardEBackwardF);
        let status = match (right > 0, left > 0) {
            (false, false) => OneSided::Both,
            (true, false) => OneSided::RightOnly,
            (false, true) => OneSided::LeftOnly,
            (true, true) => OneSided::Neither,
        };
        let witness = (status != OneSided::Neither).then_some(assignment);
        Ok(OneSidedResult { status, witness })
    }

    /// The spectrum of `T`: block spectra, clopen families, the radial hull
    /// of every trajectory and the origin iff some weight vanishes.
    pub fn full_spectrum(&self) -> SpectralSet<S> {
        let hulls: Vec<SpectralSet<S>> = self
            .system
            .trajectories()
            .iter()
            .map(|t| {
                let (lo, hi) = self.trajectory_hull(t);
                SpectralSet::annulus(lo, hi)
            })
            .collect();
        let zero = if self.system.zero_count() > 0 {
            SpectralSet::zero()
        } else {
            SpectralSet::empty()
        };
        SpectralSet::union_all(
            self.summaries
                .iter()
                .map(|s| &s.radial_spectrum)
                .chain(hulls.iter())
                .chain(std::iter::once(&zero)),
        )
    }

    /// Radii at which the partition can change, sorted and deduplicated.
    pub fn critical_radii(&self) -> Vec<S> {
        let mut radii: Vec<S> = Vec::new();
        for s in &self.summaries {
            radii.push(s.min_mean.clone());
            radii.push(s.max_mean.clone());
            radii.extend(s.radial_spectrum.radial().iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
            radii.extend(s.radial_spectrum.points().iter().map(|p| p.logmod().clone()));
        }
        for (b, f) in &self.anchor_means {
            radii.push(b.clone());
            radii.push(f.clone());
        }
        radii.sort_by(|a, b| a.cmp_total(b));
        radii.dedup_by(|a, b| a == b);
        radii
    }

    /// Recomputes the spectrum by evaluating [`Self::one_sided`] at every
    /// critical radius, between consecutive ones, and at each candidate
    /// eigenvalue. Zero-free systems only.
    pub fn radial_sweep(&self) -> Result<SpectralSet<S>> {
        let radii = self.critical_radii();
        let two = S::from_count(2);
        let mut radial = Vec::new();
        for (i, t) in radii.iter().enumerate() {
            if self.is_spectral_radius(t)? {
                radial.push((t.clone(), t.clone()));
            }
            if let Some(next) = radii.get(i + 1) {
                let mid = (t.clone() + next.clone()) / two.clone();
                if self.is_spectral_radius(&mid)? {
                    radial.push((t.clone(), next.clone()));
                }
            }
        }
        let mut points = Vec::new();
        for s in &self.summaries {
            for p in s.radial_spectrum.points() {
                if self.one_sided(&Lambda::Polar(p.clone()))?.status != OneSided::Both {
                    points.push(p.clone());
                }
            }
        }
        Ok(SpectralSet::from_parts(radial, points, false))
    }

    /// Whether a generic point of the circle `|z| = e^t` (one avoiding every
    /// discrete eigenvalue) lies in the spectrum.
    fn is_spectral_radius(&self, t: &S) -> Result<bool> {
        let phase = self.generic_phase(t);
        Ok(self.one_sided(&Lambda::polar(t.clone(), phase))?.status != OneSided::Both)
    }

    fn generic_phase(&self, t: &S) -> S {
        let mut phases: Vec<S> = self
            .summaries
            .iter()
            .flat_map(|s| s.radial_spectrum.points().iter())
            .filter(|p| p.logmod() == t)
            .map(|p| p.phase().clone())
            .collect();
        phases.sort_by(|a, b| a.cmp_total(b));
        match phases.as_slice() {
            [] => S::zero(),
            [only] => only.clone() + S::from_ratio(1, 2),
            [first, second, ..] => (first.clone() + second.clone()) / S::from_count(2),
        }
    }
}

/// Decides left/right invertibility of `lambda I - T` for `lambda != 0`.
pub fn one_sided<S: Scalar>(system: &SystemDescription<S>, lambda: &Lambda<S>) -> Result<OneSidedResult> {
    SystemAnalysis::new(system).one_sided(lambda)
}

pub fn full_spectrum<S: Scalar>(system: &SystemDescription<S>) -> SpectralSet<S> {
    SystemAnalysis::new(system).full_spectrum()
}

/// System with the given trajectories and blocks removed. Removing a
/// trajectory can leave a cycle block isolated, which changes its spectrum.
pub fn without<S: Scalar>(
    system: &SystemDescription<S>,
    trajectories: &[String],
    blocks: &[String],
) -> Option<SystemDescription<S>> {
    let mut draft = system.to_draft();
    draft.trajectories.retain(|t| !trajectories.contains(&t.id));
    draft.blocks.retain(|b| !blocks.contains(&b.id().to_string()));
    if draft.blocks.is_empty() {
        return None;
    }
    draft.validate().ok()
}

impl OneSidedResult {
    pub fn to_json(&self) -> Value {
        json!({
            "status": format!("{:?}", self.status),
            "witness": self.witness.as_ref().map(|w| json!({
                "blocks": w.blocks.iter().map(|(id, l)| json!([id, format!("{l:?}")])).collect::<Vec<_>>(),
                "trajectories": w.trajectories.iter().map(|(id, o)| json!([id, o.map(|o| format!("{o:?}"))])).collect::<Vec<_>>(),
            })),
        })
    }
}
