//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use spectrakit_core::classifier::{classify_with, FredholmStatus};
use spectrakit_core::cycle_means::BlockPayload;
use spectrakit_core::essential::essential_spectra_with;
use spectrakit_core::oracle::{adjoint_candidate, enumerate_cycle_means, finite_matrix_spectrum, kernel_candidate, CancelToken};
use spectrakit_core::sample::{random_finite_system, random_graph, random_lambda, random_system, rng, SystemShape};
use spectrakit_core::verify::is_dual;
use spectrakit_core::{
    full_spectrum, sigma5_by_components, Anchor, Block, CycleBlock, Lambda, LogWeight, Rational, Scalar, SpectralSet,
    SystemAnalysis, SystemDescription, SystemDraft, Trajectory,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn systems(count: u64, base: u64) -> Vec<SystemDescription<Rational>> {
    let shape = SystemShape::default();
    (0..count).map(|i| random_system(&mut rng(base + i), &shape)).collect()
}

fn nesting() -> Outcome {
    for (i, s) in systems(200, 1_000).iter().enumerate() {
        let e = essential_spectra_with(&SystemAnalysis::new(s)).map_err(|e| e.to_string())?;
        for k in 0..4 {
            if !e.sigma[k].is_subset(&e.sigma[k + 1]) {
                return Err(format!("system {i}: sigma{} not inside sigma{}", k + 1, k + 2));
            }
        }
    }
    Ok("200 systems".into())
}

fn equal_radii() -> Outcome {
    let mut nonempty = 0;
    for (i, s) in systems(200, 1_000).iter().enumerate() {
        let a = SystemAnalysis::new(s);
        let e = essential_spectra_with(&a).map_err(|e| e.to_string())?;
        let largest = a
            .summaries()
            .iter()
            .filter(|b| !matches!(b.payload, BlockPayload::Cycle { isolated: true, .. }))
            .map(|b| b.max_mean.clone())
            .max();
        let r1 = e.sigma[0].max_logmod();
        let r5 = e.sigma[4].max_logmod();
        if r1 != r5 || r5 != e.rho_e || e.rho_e != largest {
            return Err(format!("system {i}: {r1:?} {r5:?} {:?} {largest:?}", e.rho_e));
        }
        nonempty += usize::from(e.rho_e.is_some());
    }
    Ok(format!("200 systems, {nonempty} with essential spectrum"))
}

fn karp_vs_enumeration() -> Outcome {
    let mut r = rng(3);
    for i in 0..500 {
        let g = random_graph::<Rational>(&mut r, 8);
        let karp = (g.min_cycle_mean().unwrap(), g.max_cycle_mean().unwrap());
        let brute = enumerate_cycle_means(&g, &CancelToken::new()).map_err(|e| e.to_string())?;
        if karp != brute {
            return Err(format!("graph {i}: karp {karp:?} vs enumeration {brute:?}"));
        }
    }
    Ok("500 graphs, exact".into())
}

fn shift(back: Rational, fwd: Rational) -> SystemDescription<Rational> {
    let fixed = |id: &str, l: Rational| {
        Block::Cycle(CycleBlock {
            id: id.into(),
            weights: vec![LogWeight::real(l)],
        })
    };
    SystemDraft {
        blocks: vec![fixed("low", back), fixed("high", fwd)],
        trajectories: vec![Trajectory {
            id: "t".into(),
            backward: Anchor::whole("low"),
            core: vec![],
            forward: Anchor::whole("high"),
        }],
    }
    .validate()
    .expect("shift system is valid")
}

fn shift_benchmark() -> Outcome {
    let ln2 = Rational::parse_decimal("0.693147180559945309417232121458").unwrap();
    let one = Lambda::polar(Rational::from_count(0), Rational::from_count(0));
    let annulus = SpectralSet::annulus(-ln2.clone(), ln2.clone());
    let circles = SpectralSet::circle(-ln2.clone()).union(&SpectralSet::circle(ln2.clone()));

    let forward = shift(-ln2.clone(), ln2.clone());
    let reversed = shift(ln2.clone(), -ln2.clone());
    for (name, s, nul, def, index) in [("shift", &forward, 1, 0, 1), ("reversed", &reversed, 0, 1, -1)] {
        let a = SystemAnalysis::new(s);
        if a.full_spectrum() != annulus {
            return Err(format!("{name}: spectrum {}", a.full_spectrum().to_json()));
        }
        let status = classify_with(&a, &one).map_err(|e| e.to_string())?.status;
        if status != (FredholmStatus::Fredholm { nul, def, index }) {
            return Err(format!("{name}: classify(1) = {status:?}"));
        }
        let e = essential_spectra_with(&a).map_err(|e| e.to_string())?;
        if e.sigma[..3].iter().any(|x| *x != circles) || e.sigma[3] != annulus || e.sigma[4] != annulus {
            return Err(format!("{name}: essential spectra {}", e.to_json()));
        }
    }
    let k = kernel_candidate(&forward, "t", &one, 200).map_err(|e| e.to_string())?;
    if !(k.max_residual <= 1e-12 && k.tails.0 <= 1e-6 && k.tails.1 <= 1e-6 && k.verdict) {
        return Err(format!("kernel candidate {k:?}"));
    }
    let adj = adjoint_candidate(&reversed, "t", &one, 200).map_err(|e| e.to_string())?;
    if !adj.verdict {
        return Err(format!("adjoint candidate on reversed {adj:?}"));
    }
    if kernel_candidate(&reversed, "t", &one, 200).map_err(|e| e.to_string())?.verdict
        || adjoint_candidate(&forward, "t", &one, 200).map_err(|e| e.to_string())?.verdict
    {
        return Err("oracle accepts the wrong orientation".into());
    }
    Ok(format!(
        "kernel residual {:.1e}, tails {:.1e}/{:.1e}; adjoint tails {:.1e}/{:.1e}",
        k.max_residual, k.tails.0, k.tails.1, adj.tails.0, adj.tails.1
    ))
}

fn consistency() -> Outcome {
    let mut r = rng(5);
    let shape = SystemShape::default();
    let mut counts = [0usize; 2];
    for i in 0..500 {
        let s: SystemDescription<Rational> = random_system(&mut r, &shape);
        let a = SystemAnalysis::new(&s);
        let lambda = random_lambda(&mut r, &a);
        let status = classify_with(&a, &lambda).map_err(|e| e.to_string())?.status;
        let e = essential_spectra_with(&a).map_err(|e| e.to_string())?;
        let resolvent = status == FredholmStatus::Resolvent;
        let in_spectrum = a.full_spectrum().contains(&lambda);
        let fredholm = status.is_fredholm();
        let index_zero = status.index() == Some(0);
        if resolvent == in_spectrum {
            return Err(format!("pair {i}: {status:?} but membership {in_spectrum}"));
        }
        if e.sigma[2].contains(&lambda) == fredholm {
            return Err(format!("pair {i}: sigma3 membership vs {status:?}"));
        }
        if e.sigma[3].contains(&lambda) == index_zero {
            return Err(format!("pair {i}: sigma4 membership vs {status:?}"));
        }
        counts[usize::from(in_spectrum)] += 1;
    }
    Ok(format!("500 pairs ({} in spectrum, {} resolvent)", counts[1], counts[0]))
}

fn rotation_invariance() -> Outcome {
    let mut r = rng(6);
    let shape = SystemShape::default();
    let mut compared = 0;
    for i in 0..100 {
        let s: SystemDescription<Rational> = random_system(&mut r, &shape);
        let a = SystemAnalysis::new(&s);
        let discrete: Vec<LogWeight<Rational>> = a
            .summaries()
            .iter()
            .flat_map(|b| b.radial_spectrum.points().iter().cloned())
            .collect();
        let is_discrete = |l: &Lambda<Rational>| matches!(l, Lambda::Polar(w) if discrete.contains(w));
        for _ in 0..5 {
            let lambda = random_lambda(&mut r, &a);
            if is_discrete(&lambda) {
                continue;
            }
            let base = classify_with(&a, &lambda).map_err(|e| e.to_string())?;
            for k in 0..16 {
                let turns = Rational::from_ratio(k * 7 + 1, 113);
                let rotated = lambda.rotated(&turns);
                if is_discrete(&rotated) {
                    continue;
                }
                let mut other = classify_with(&a, &rotated).map_err(|e| e.to_string())?;
                other.lambda = lambda.clone();
                if other != base {
                    return Err(format!("system {i}: {:?} vs {:?}", base.status, other.status));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} rotated queries"))
}

fn to_complex(w: &LogWeight<Rational>) -> Complex64 {
    let w = w.to_f64();
    Complex64::from_polar(w.logmod().exp(), std::f64::consts::TAU * w.phase())
}

fn finite_systems() -> Outcome {
    let mut r = rng(7);
    let mut eigenvalues = 0;
    for i in 0..100 {
        let s: SystemDescription<Rational> = random_finite_system(&mut r, 64);
        let a = SystemAnalysis::new(&s);
        let e = essential_spectra_with(&a).map_err(|e| e.to_string())?;
        if e.sigma[..4].iter().any(|x| !x.is_empty()) {
            return Err(format!("system {i}: nonempty essential spectrum"));
        }
        let spectrum = full_spectrum(&s);
        if !spectrum.radial().is_empty() {
            return Err(format!("system {i}: radial spectrum"));
        }
        for p in spectrum.points() {
            let status = classify_with(&a, &Lambda::Polar(p.clone())).map_err(|e| e.to_string())?.status;
            if !matches!(status, FredholmStatus::Fredholm { index: 0, .. }) {
                return Err(format!("system {i}: eigenvalue classified {status:?}"));
            }
        }
        let matrix = finite_matrix_spectrum(&s).map_err(|e| e.to_string())?;
        let points: Vec<Complex64> = spectrum.points().iter().map(to_complex).collect();
        let close = |z: &Complex64, w: &Complex64| (z - w).norm() <= 1e-9 * z.norm().max(1.0);
        let mut distinct: Vec<Complex64> = Vec::new();
        for z in &matrix {
            if !distinct.iter().any(|w| close(z, w)) {
                distinct.push(*z);
            }
        }
        if distinct.len() != points.len() || !distinct.iter().all(|z| points.iter().any(|p| close(z, p))) {
            return Err(format!("system {i}: matrix eigenvalues differ from spectrum points"));
        }
        eigenvalues += points.len();
    }
    Ok(format!("100 systems, {eigenvalues} distinct eigenvalues"))
}

fn duality() -> Outcome {
    let mut r = rng(8);
    for (i, s) in systems(100, 2_000).iter().enumerate() {
        let reversed = s.reversed();
        let (a, b) = (SystemAnalysis::new(s), SystemAnalysis::new(&reversed));
        for _ in 0..20 {
            let lambda = random_lambda(&mut r, &a);
            let x = classify_with(&a, &lambda).map_err(|e| e.to_string())?.status;
            let y = classify_with(&b, &lambda).map_err(|e| e.to_string())?.status;
            if !is_dual(&x, &y) {
                return Err(format!("system {i}: {x:?} vs reversed {y:?}"));
            }
        }
    }
    Ok("100 systems x 20 parameters".into())
}

fn sigma5_cross_check() -> Outcome {
    let all: Vec<SystemDescription<Rational>> = systems(200, 1_000).into_iter().chain(systems(100, 2_000)).collect();
    for (i, s) in all.iter().enumerate() {
        let a = SystemAnalysis::new(s);
        let e = essential_spectra_with(&a).map_err(|e| e.to_string())?;
        let chased = sigma5_by_components(&e.sigma[0], &a.full_spectrum());
        if chased != e.sigma[4] {
            return Err(format!("system {i}: {} vs {}", chased.to_json(), e.sigma[4].to_json()));
        }
    }
    Ok(format!("{} systems", all.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("nesting of essential spectra", nesting),
        ("equal essential radii", equal_radii),
        ("karp vs enumeration", karp_vs_enumeration),
        ("shift-2 benchmark", shift_benchmark),
        ("classifier/spectrum consistency", consistency),
        ("rotation invariance", rotation_invariance),
        ("finite systems", finite_systems),
        ("duality", duality),
        ("sigma5 component cross-check", sigma5_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {ms} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
