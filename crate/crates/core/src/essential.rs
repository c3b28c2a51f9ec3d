//! The five essential spectra and the essential spectral radius.
//!
//! Writing `A` for the aperiodic annuli, `C` for the circles of non-isolated
//! cycles and `Sigma` for the clopen periodic families:
//!
//! * `sigma_1 = sigma_2 = sigma_3 = A + C + Sigma`; every such radius carries
//!   witnesses of both the kernel and the deficiency type.
//! * `sigma_4` adds the radii where kernel-oriented and deficiency-oriented
//!   trajectory gaps do not balance.
//! * `sigma_5` adds the radial hull of every trajectory.

use serde_json::{json, Value};

use crate::cycle_means::BlockPayload;
use crate::error::{Result, SpectraError};
use crate::model::{Block, SystemDescription};
use crate::partition::SystemAnalysis;
use crate::scalar::{max_of, min_of, Scalar};
use crate::spectral_set::SpectralSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentialSpectra<S: Scalar> {
    /// `sigma[i]` is `sigma_{i+1}`.
    pub sigma: [SpectralSet<S>; 5],
    /// Log of the essential spectral radius; `None` when every block is an
    /// isolated cycle and all five sets are empty.
    pub rho_e: Option<S>,
    pub sigma_set: SpectralSet<S>,
}

/// Union of the clopen periodic families' spectra.
pub fn sigma_term<S: Scalar>(system: &SystemDescription<S>) -> SpectralSet<S> {
    let parts: Vec<SpectralSet<S>> = system
        .blocks()
        .iter()
        .filter_map(|b| match b {
            Block::ClopenPeriodic(c) => Some(crate::cycle_means::clopen_sigma(c.period, &c.products)),
            _ => None,
        })
        .collect();
    SpectralSet::union_all(&parts)
}

pub fn essential_spectra<S: Scalar>(system: &SystemDescription<S>) -> Result<EssentialSpectra<S>> {
    essential_spectra_with(&SystemAnalysis::new(system))
}

pub fn essential_spectra_with<S: Scalar>(analysis: &SystemAnalysis<'_, S>) -> Result<EssentialSpectra<S>> {
    let system = analysis.system();
    if let Some(t) = system.trajectories().iter().find(|t| t.zero_count() > 0) {
        return Err(SpectraError::ZeroWeightUnsupported(t.id.clone()));
    }
    let mut rho_e: Option<S> = None;
    let mut parts = Vec::new();
    for s in analysis.summaries() {
        let essential = !matches!(s.payload, BlockPayload::Cycle { isolated: true, .. });
        if essential {
            parts.push(s.radial_spectrum.clone());
            rho_e = Some(match rho_e {
                Some(r) => max_of(&r, &s.max_mean),
                None => s.max_mean.clone(),
            });
        }
    }
    let sigma3 = SpectralSet::union_all(&parts);

    let unbalanced = unbalanced_gaps(analysis.anchor_means());
    let sigma4 = sigma3.union(&unbalanced);

    let fill: Vec<SpectralSet<S>> = system
        .trajectories()
        .iter()
        .map(|t| {
            let (lo, hi) = analysis.trajectory_hull(t);
            SpectralSet::annulus(lo, hi)
        })
        .collect();
    let sigma5 = sigma4.union(&SpectralSet::union_all(&fill));

    Ok(EssentialSpectra {
        sigma: [sigma3.clone(), sigma3.clone(), sigma3, sigma4, sigma5],
        rho_e,
        sigma_set: sigma_term(system),
    })
}

/// Closed radii where the number of kernel-oriented gaps `(m_b, m_f)` differs
/// from the number of deficiency-oriented gaps `(m_f, m_b)`.
fn unbalanced_gaps<S: Scalar>(anchor_means: &[(S, S)]) -> SpectralSet<S> {
    let gaps: Vec<(S, S, bool)> = anchor_means
        .iter()
        .filter(|(b, f)| b != f)
        .map(|(b, f)| (min_of(b, f), max_of(b, f), b < f))
        .collect();
    let mut ends: Vec<S> = gaps.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
    ends.sort_by(|a, b| a.cmp_total(b));
    ends.dedup();
    let two = S::from_count(2);
    let mut radial = Vec::new();
    for w in ends.windows(2) {
        let mid = (w[0].clone() + w[1].clone()) / two.clone();
        let covering = |kernel: bool| {
            gaps.iter()
                .filter(|(a, b, k)| *k == kernel && a < &mid && &mid < b)
                .count()
        };
        if covering(true) != covering(false) {
            radial.push((w[0].clone(), w[1].clone()));
        }
    }
    SpectralSet::from_parts(radial, Vec::new(), false)
}

/// `sigma_5` from its definition: `sigma_1` together with every component
/// of the complement of `sigma_1` that misses the resolvent set.
///
/// Components are the open annuli between consecutive radial pieces of
/// `sigma_1` (finitely many points do not disconnect). The innermost one
/// contains the origin and the outermost is unbounded, so both meet the
/// resolvent of a zero-free system; a middle one misses it exactly when the
/// radial part of `spectrum` covers it.
pub fn sigma5_by_components<S: Scalar>(sigma1: &SpectralSet<S>, spectrum: &SpectralSet<S>) -> SpectralSet<S> {
    let covered: Vec<(S, S)> = sigma1
        .radial()
        .windows(2)
        .map(|w| (w[0].1.clone(), w[1].0.clone()))
        .filter(|(a, b)| spectrum.radial().iter().any(|(lo, hi)| lo <= a && b <= hi))
        .collect();
    sigma1.union(&SpectralSet::from_parts(covered, Vec::new(), false))
}

impl<S: Scalar> EssentialSpectra<S> {
    pub fn to_json(&self) -> Value {
        let mut out = serde_json::Map::new();
        for (i, s) in self.sigma.iter().enumerate() {
            out.insert(format!("sigma{}", i + 1), s.to_json());
        }
        out.insert("Sigma".into(), self.sigma_set.to_json());
        out.insert("rho_e".into(), json!(self.rho_e.as_ref().map(Scalar::as_f64)));
        Value::Object(out)
    }
}
