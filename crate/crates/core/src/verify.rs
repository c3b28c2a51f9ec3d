//! Oracle suite run against one system: every check compares a library
//! answer with an independent recomputation on seeded random samples.

use std::fmt::Write as _;

use crate::classifier::{classify_with, FredholmStatus};
use crate::cycle_means::BlockPayload;
use crate::essential::{essential_spectra_with, sigma5_by_components};
use crate::model::{Block, Lambda, SystemDescription};
use crate::oracle::{
    adjoint_candidate, enumerate_cycle_means, finite_matrix_spectrum, kernel_candidate, CancelToken,
    DEFAULT_WINDOW, ENUMERATION_LIMIT,
};
use crate::partition::SystemAnalysis;
use crate::sample::{random_lambda, random_lambda_away, rng};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{mark}  {:width$}  {}", c.name, c.detail);
        }
        out
    }

    fn push(&mut self, name: &'static str, failures: Vec<String>, total: usize) {
        let detail = match failures.first() {
            None => format!("{total} case(s)"),
            Some(first) => format!("{} of {total} failed; first: {first}", failures.len()),
        };
        self.checks.push(Check {
            name,
            passed: failures.is_empty(),
            detail,
        });
    }

    fn skip(&mut self, name: &'static str, why: &str) {
        self.checks.push(Check {
            name,
            passed: true,
            detail: format!("skipped: {why}"),
        });
    }
}

/// Runs the suite with `samples` random spectral parameters per check.
pub fn verify_system<S: Scalar>(system: &SystemDescription<S>, seed: u64, samples: usize) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut rng = rng(seed);
    let analysis = SystemAnalysis::new(system);

    let mut failures = Vec::new();
    let mut total = 0;
    for block in system.blocks() {
        if let Block::Aperiodic(a) = block {
            let graph = a.digraph();
            if graph.len() > ENUMERATION_LIMIT {
                continue;
            }
            total += 1;
            let summary = analysis.summary(&a.id);
            match enumerate_cycle_means(&graph, &CancelToken::new()) {
                Ok((lo, hi)) if lo == summary.min_mean && hi == summary.max_mean => {}
                Ok((lo, hi)) => failures.push(format!(
                    "{}: enumeration ({lo}, {hi}) vs karp ({}, {})",
                    a.id, summary.min_mean, summary.max_mean
                )),
                Err(e) => failures.push(format!("{}: {e}", a.id)),
            }
        }
    }
    report.push("karp-vs-enumeration", failures, total);

    if !system.is_zero_free() {
        for name in [
            "spectrum-sweep",
            "resolvent-consistency",
            "kernel-oracle",
            "adjoint-oracle",
            "essential-nesting",
            "essential-radius",
            "sigma5-components",
            "duality",
        ] {
            report.skip(name, "system has zero weights");
        }
        return report;
    }

    let spectrum = analysis.full_spectrum();
    match analysis.radial_sweep() {
        Ok(swept) if swept == spectrum => report.push("spectrum-sweep", vec![], 1),
        Ok(swept) => report.push(
            "spectrum-sweep",
            vec![format!("sweep {} vs union {}", swept.to_json(), spectrum.to_json())],
            1,
        ),
        Err(e) => report.push("spectrum-sweep", vec![e.to_string()], 1),
    }

    let mut failures = Vec::new();
    for _ in 0..samples {
        let lambda = random_lambda(&mut rng, &analysis);
        match classify_with(&analysis, &lambda) {
            Ok(r) => {
                if (r.status == FredholmStatus::Resolvent) == spectrum.contains(&lambda) {
                    failures.push(format!("{lambda:?}: {:?}", r.status));
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    report.push("resolvent-consistency", failures, samples);

    let means: Vec<S> = analysis
        .anchor_means()
        .iter()
        .flat_map(|(b, f)| [b.clone(), f.clone()])
        .collect();
    let gap = S::from_ratio(1, 4);
    let (mut kernel_failures, mut adjoint_failures, mut cases) = (Vec::new(), Vec::new(), 0);
    for _ in 0..samples {
        let Some(lambda) = random_lambda_away(&mut rng, &means, &gap) else {
            continue;
        };
        let Ok(r) = classify_with(&analysis, &lambda) else {
            continue;
        };
        for t in system.trajectories() {
            cases += 1;
            match kernel_candidate(system, &t.id, &lambda, DEFAULT_WINDOW) {
                Ok(k) if k.verdict == r.kernel_trajectories.contains(&t.id) => {}
                Ok(k) => kernel_failures.push(format!("{} at {lambda:?}: oracle {}", t.id, k.verdict)),
                Err(e) => kernel_failures.push(e.to_string()),
            }
            match adjoint_candidate(system, &t.id, &lambda, DEFAULT_WINDOW) {
                Ok(k) if k.verdict == r.deficiency_trajectories.contains(&t.id) => {}
                Ok(k) => adjoint_failures.push(format!("{} at {lambda:?}: oracle {}", t.id, k.verdict)),
                Err(e) => adjoint_failures.push(e.to_string()),
            }
        }
    }
    report.push("kernel-oracle", kernel_failures, cases);
    report.push("adjoint-oracle", adjoint_failures, cases);

    match essential_spectra_with(&analysis) {
        Ok(e) => {
            let nested = e.sigma.windows(2).all(|w| w[0].is_subset(&w[1]));
            report.push(
                "essential-nesting",
                if nested { vec![] } else { vec!["chain broken".into()] },
                1,
            );
            let radii: Vec<Option<S>> = e.sigma.iter().map(|s| s.max_logmod()).collect();
            let expected = analysis
                .summaries()
                .iter()
                .filter(|s| !matches!(s.payload, BlockPayload::Cycle { isolated: true, .. }))
                .map(|s| s.max_mean.clone())
                .reduce(|a, b| if b > a { b } else { a });
            let ok = radii.iter().all(|r| *r == e.rho_e) && e.rho_e == expected;
            report.push(
                "essential-radius",
                if ok { vec![] } else { vec![format!("{radii:?} vs {:?}", e.rho_e)] },
                1,
            );
            let chased = sigma5_by_components(&e.sigma[0], &spectrum);
            report.push(
                "sigma5-components",
                if chased == e.sigma[4] { vec![] } else { vec![format!("{}", chased.to_json())] },
                1,
            );
        }
        Err(err) => report.push("essential-nesting", vec![err.to_string()], 1),
    }

    let reversed = system.reversed();
    let reversed_analysis = SystemAnalysis::new(&reversed);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let lambda = random_lambda(&mut rng, &analysis);
        let (Ok(a), Ok(b)) = (
            classify_with(&analysis, &lambda),
            classify_with(&reversed_analysis, &lambda),
        ) else {
            failures.push(format!("{lambda:?}: classification failed"));
            continue;
        };
        if !is_dual(&a.status, &b.status) {
            failures.push(format!("{lambda:?}: {:?} vs {:?}", a.status, b.status));
        }
    }
    report.push("duality", failures, samples);

    let finite = system.trajectories().is_empty() && system.blocks().iter().all(|b| matches!(b, Block::Cycle(_)));
    if finite {
        match finite_matrix_spectrum(system) {
            Ok(eigenvalues) => {
                let points: Vec<num_complex::Complex64> = spectrum
                    .points()
                    .iter()
                    .map(|p| {
                        let p = p.to_f64();
                        num_complex::Complex64::from_polar(p.logmod().exp(), std::f64::consts::TAU * p.phase())
                    })
                    .collect();
                let mut failures = Vec::new();
                for z in &eigenvalues {
                    if !points.iter().any(|p| (p - z).norm() <= 1e-9 * z.norm().max(1.0)) {
                        failures.push(format!("eigenvalue {z} missing from spectrum"));
                    }
                }
                for exact in spectrum.points() {
                    let index = classify_with(&analysis, &Lambda::Polar(exact.clone()))
                        .ok()
                        .and_then(|r| r.status.index());
                    if index != Some(0) {
                        failures.push(format!("eigenvalue {exact:?} has index {index:?}"));
                    }
                }
                for p in &points {
                    if !eigenvalues.iter().any(|z| (p - z).norm() <= 1e-9 * z.norm().max(1.0)) {
                        failures.push(format!("spectral point {p} is not an eigenvalue"));
                    }
                }
                report.push("finite-matrix", failures, eigenvalues.len());
            }
            Err(e) => report.push("finite-matrix", vec![e.to_string()], 1),
        }
    } else {
        report.skip("finite-matrix", "system has infinite components");
    }
    report
}

/// `b` is the status of the reversed system at the same parameter.
pub fn is_dual(a: &FredholmStatus, b: &FredholmStatus) -> bool {
    use crate::classifier::FiniteSide;
    match (a, b) {
        (FredholmStatus::Resolvent, FredholmStatus::Resolvent) => true,
        (
            FredholmStatus::Fredholm { nul, def, index },
            FredholmStatus::Fredholm {
                nul: n2,
                def: d2,
                index: i2,
            },
        ) => nul == d2 && def == n2 && *index == -i2,
        (
            FredholmStatus::SemiFredholmOnly { side, count },
            FredholmStatus::SemiFredholmOnly { side: s2, count: c2 },
        ) => {
            count == c2
                && matches!(
                    (side, s2),
                    (FiniteSide::Nul, FiniteSide::Def) | (FiniteSide::Def, FiniteSide::Nul)
                )
        }
        (FredholmStatus::NotSemiFredholm { .. }, FredholmStatus::NotSemiFredholm { .. }) => true,
        _ => false,
    }
}
