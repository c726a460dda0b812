//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p noisy-designs --test acceptance`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::Instant;

use noisy_designs::designs::max_oracle_deviation;
use noisy_designs::{
    clifford_design, cube_grid, density_from_point, icosahedral_design, make_channel, noisy_moment, pauli_design,
    spherical_grid, verify_design_order, BlochGridSpec, BlochPoint, CertifiedDesign, ChannelKind, ComplexMatrix,
    EpsilonMode, NoiseModel, PreparedSample,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FLIPS: [ChannelKind; 3] = [ChannelKind::BitFlip, ChannelKind::PhaseFlip, ChannelKind::BitPhaseFlip];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn params() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn sample(spec: &BlochGridSpec, t: usize) -> PreparedSample {
    PreparedSample::from_points(&spherical_grid(spec).unwrap(), t, &CertifiedDesign::icosahedral(), EpsilonMode::projected())
        .unwrap()
}

fn sweep(sample: &PreparedSample, kind: ChannelKind, model: NoiseModel, ps: &[f64]) -> Vec<f64> {
    ps.iter()
        .map(|&p| sample.epsilon(&make_channel(kind, p).unwrap(), model).unwrap().epsilon)
        .collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Uniform in the Bloch ball.
fn random_states(seed: u64, n: usize) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.gen::<f64>().cbrt();
            let cos_theta = rng.gen_range(-1.0..=1.0f64);
            let phi = rng.gen_range(0.0..2.0 * PI);
            density_from_point(BlochPoint::from_spherical(r, cos_theta.acos(), phi)).unwrap()
        })
        .collect()
}

fn c1_first_moment_invariance() -> Verdict {
    let s = sample(&BlochGridSpec::default(), 1);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for kind in ChannelKind::ALL {
        for model in [NoiseModel::Before, NoiseModel::After] {
            for p in params() {
                let eps = s.epsilon(&make_channel(kind, p).unwrap(), model).unwrap().epsilon;
                worst = worst.max(eps);
                if !(eps <= 1e-10) {
                    failures.push(format!("{kind}/{model}/{p}={eps:.3}"));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("132 combinations, max epsilon {worst:.1e}")
    } else {
        format!("{} of 132 combinations exceed 1e-10 (max {worst:.3}): {}", failures.len(), failures.join(" "))
    };
    verdict(failures.is_empty(), detail)
}

fn c2_depolarising_equivalence() -> Verdict {
    let design = CertifiedDesign::icosahedral();
    let states = random_states(0xDE90, 100);
    let mut worst = 0.0f64;
    for p in [0.1, 0.5, 0.9] {
        let ch = make_channel(ChannelKind::Depolarising, p).unwrap();
        for rho in &states {
            for t in 1..=5 {
                let b = noisy_moment(rho, t, &design, &ch, NoiseModel::Before).unwrap();
                let a = noisy_moment(rho, t, &design, &ch, NoiseModel::After).unwrap();
                worst = worst.max(b.distance(&a));
            }
        }
    }
    verdict(worst <= 1e-12, format!("max |before - after|_F = {worst:.2e} over 1500 moments"))
}

fn c3_ensemble_independence() -> Verdict {
    let ico = CertifiedDesign::icosahedral();
    let cliff = CertifiedDesign::clifford();
    let states = random_states(0xC11F, 20);
    let mut worst = 0.0f64;
    for kind in ChannelKind::ALL {
        let ch = make_channel(kind, 0.3).unwrap();
        for model in [NoiseModel::Before, NoiseModel::After] {
            for rho in &states {
                for t in 1..=3 {
                    let a = noisy_moment(rho, t, &ico, &ch, model).unwrap();
                    let b = noisy_moment(rho, t, &cliff, &ch, model).unwrap();
                    worst = worst.max(a.distance(&b));
                }
            }
        }
    }
    verdict(worst <= 1e-12, format!("max |clifford - icosahedral|_F = {worst:.2e}"))
}

fn c4_design_certification() -> Verdict {
    let cases = [("pauli", pauli_design(), 1), ("clifford", clifford_design(), 3), ("icosahedral", icosahedral_design(), 5)];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, ens, expected) in cases {
        let order = verify_design_order(&ens, expected + 1).unwrap();
        let beyond = max_oracle_deviation(&ens, expected + 1).unwrap();
        passed &= order == expected && beyond > 1e-3;
        parts.push(format!("{name} order {order} (deviation at t={} is {beyond:.2e})", expected + 1));
    }
    verdict(passed, parts.join("; "))
}

fn c5_amplitude_damping_endpoints() -> Verdict {
    let full = BlochGridSpec::default();
    let ad = ChannelKind::AmplitudeDamping;
    let e2 = sweep(&sample(&full, 2), ad, NoiseModel::Before, &[1.0])[0];
    let e4 = sweep(&sample(&full, 4), ad, NoiseModel::Before, &[1.0 - 1e-6])[0];
    let e5 = sweep(&sample(&full, 5), ad, NoiseModel::Before, &[1.0 - 1e-6])[0];
    let passed = (e2 - 1.0).abs() <= 1e-6 && (e4 - 2.20).abs() <= 0.01 && (e5 - 4.33).abs() <= 0.01;
    verdict(passed, format!("t=2 lambda=1: {e2:.9}; t=4: {e4:.6}; t=5: {e5:.6}"))
}

fn c6_flip_symmetry() -> Verdict {
    let spec = BlochGridSpec::with_radius(0.95);
    let ps = params();
    let mut passed = true;
    let mut parts = Vec::new();
    for t in [2, 4] {
        let s = sample(&spec, t);
        let curves: Vec<Vec<f64>> = FLIPS.iter().map(|&k| sweep(&s, k, NoiseModel::Before, &ps)).collect();
        let bit = &curves[0];
        let mirrored: Vec<f64> = bit.iter().rev().copied().collect();
        let asym = max_gap(bit, &mirrored);
        let peak = bit.iter().cloned().fold(f64::MIN, f64::max);
        let peak_at_half = bit[5] >= peak;
        let cross = max_gap(bit, &curves[1]).max(max_gap(bit, &curves[2])).max(max_gap(&curves[1], &curves[2]));
        passed &= asym <= 1e-8 && peak_at_half && cross <= 1e-8;
        parts.push(format!("t={t}: asymmetry {asym:.1e}, max {peak:.6} at p=0.5: {peak_at_half}, cross-flip gap {cross:.1e}"));
    }
    verdict(passed, parts.join("; "))
}

fn c7_step_function() -> Verdict {
    let spec = BlochGridSpec::with_radius(0.95);
    let samples: Vec<PreparedSample> = (1..=5).map(|t| sample(&spec, t)).collect();
    let mut passed = true;
    let mut parts = Vec::new();
    for kind in [ChannelKind::BitFlip, ChannelKind::PhaseDamping, ChannelKind::Depolarising] {
        let eps: Vec<f64> = samples.iter().map(|s| sweep(s, kind, NoiseModel::Before, &[0.5])[0]).collect();
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        let ok = rel(eps[2], eps[1]) <= 1e-6 && rel(eps[4], eps[3]) <= 1e-6 && eps[3] / eps[2] >= 1.5;
        passed &= ok;
        parts.push(format!(
            "{kind}: e2={:.6} e3={:.6} e4={:.6} e5={:.6} ratio {:.3}",
            eps[1],
            eps[2],
            eps[3],
            eps[4],
            eps[3] / eps[2]
        ));
    }
    verdict(passed, parts.join("; "))
}

fn c8_truncation_independence() -> Verdict {
    let t = 2;
    let ps = params();
    let base = BlochGridSpec::with_radius(0.95);
    let mut passed = true;

    let thetas: Vec<f64> = (1..=6).map(|k| k as f64 * PI / 6.0).collect();
    let bit_curves: Vec<Vec<f64>> = thetas
        .iter()
        .map(|&theta_t| sweep(&sample(&BlochGridSpec { theta_t, ..base }, t), ChannelKind::BitFlip, NoiseModel::Before, &ps))
        .collect();
    let theta_gap = bit_curves.iter().map(|c| max_gap(c, &bit_curves[5])).fold(0.0, f64::max);
    passed &= theta_gap <= 1e-8;

    let phase = |theta_t: f64| {
        sweep(&sample(&BlochGridSpec { theta_t, ..base }, t), ChannelKind::PhaseFlip, NoiseModel::Before, &ps)
    };
    let (p6, p2, p1) = (phase(PI / 6.0), phase(PI / 2.0), phase(PI));
    let phase_gap = max_gap(&p2, &p1);
    passed &= phase_gap <= 1e-8 && p2[5] > p6[5];

    let mut phi_gap = 0.0f64;
    let phi_samples: Vec<PreparedSample> =
        (1..=12).map(|k| sample(&BlochGridSpec { phi_t: k as f64 * PI / 6.0, ..base }, t)).collect();
    for kind in ChannelKind::ALL {
        for model in [NoiseModel::Before, NoiseModel::After] {
            let curves: Vec<Vec<f64>> = phi_samples.iter().map(|s| sweep(s, kind, model, &ps)).collect();
            phi_gap = curves.iter().map(|c| max_gap(c, &curves[11])).fold(phi_gap, f64::max);
        }
    }
    passed &= phi_gap <= 1e-8;

    verdict(
        passed,
        format!(
            "bitflip across theta_t gap {theta_gap:.1e}; phaseflip pi/2 vs pi gap {phase_gap:.1e}, \
             p=0.5: {:.6} (pi/2) vs {:.6} (pi/6); six channels x two models across phi_t gap {phi_gap:.1e}",
            p2[5], p6[5]
        ),
    )
}

fn c9_after_model_regions() -> Verdict {
    let points = cube_grid(20).unwrap();
    let s = PreparedSample::from_points(&points, 2, &CertifiedDesign::icosahedral(), EpsilonMode::projected()).unwrap();
    let index = |v: f64| (v * 19.0).round() as i64;
    let sets: Vec<BTreeSet<(i64, i64, i64)>> = FLIPS
        .iter()
        .map(|&k| {
            let res = s.per_state(&make_channel(k, 0.3).unwrap(), NoiseModel::After).unwrap();
            points
                .iter()
                .zip(res)
                .filter(|(_, r)| r.feasible && r.epsilon <= 0.5)
                .map(|(p, _)| (index(p.x), index(p.y), index(p.z)))
                .collect()
        })
        .collect();
    let identical = sets[0] == sets[1] && sets[0] == sets[2];
    let symmetric = sets[0].iter().all(|&(x, y, z)| {
        [(-x, y, z), (x, -y, z), (x, y, -z), (y, x, z), (z, y, x), (x, z, y)]
            .iter()
            .all(|q| sets[0].contains(q))
    });
    verdict(
        identical && symmetric,
        format!("accept sets of size {}/{}/{} of {}; identical: {identical}; symmetric: {symmetric}", sets[0].len(), sets[1].len(), sets[2].len(), points.len()),
    )
}

fn c10_strict_obstruction() -> Verdict {
    let design = CertifiedDesign::icosahedral();
    let ch = make_channel(ChannelKind::BitFlip, 0.3).unwrap();
    let pure: Vec<BlochPoint> = spherical_grid(&BlochGridSpec::default())
        .unwrap()
        .into_iter()
        .filter(|p| (p.radius() - 1.0).abs() < 1e-12)
        .collect();
    let mut obstructed = 0;
    let mut fixed = 0;
    let mut min_residual = f64::INFINITY;
    let mut passed = true;
    for p in &pure {
        let rho = density_from_point(*p).unwrap();
        let run = |mode| noisy_designs::epsilon_for_state(&rho, 2, &design, &ch, NoiseModel::Before, mode).unwrap();
        let (strict, proj) = (run(EpsilonMode::strict()), run(EpsilonMode::projected()));
        passed &= proj.feasible && proj.epsilon.is_finite();
        // Eigenstates of X are fixed points of the bit flip, so nothing is lost.
        if (p.x.abs() - 1.0).abs() < 1e-12 {
            fixed += 1;
            passed &= strict.feasible && strict.epsilon < 1e-12;
        } else {
            obstructed += 1;
            min_residual = min_residual.min(strict.kernel_residual);
            passed &= !strict.feasible && strict.kernel_residual > 1e-3;
        }
    }
    verdict(
        passed,
        format!(
            "{obstructed} pure states infeasible in strict mode (min kernel residual {min_residual:.3e}), \
             all finite when projected; {fixed} X-eigenstates are bit-flip fixed points"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1-design invariance", c1_first_moment_invariance),
        ("depolarising model equivalence", c2_depolarising_equivalence),
        ("ensemble independence", c3_ensemble_independence),
        ("design certification", c4_design_certification),
        ("amplitude-damping endpoints", c5_amplitude_damping_endpoints),
        ("flip symmetry and equality", c6_flip_symmetry),
        ("step function", c7_step_function),
        ("truncation independence", c8_truncation_independence),
        ("after-model flip regions", c9_after_model_regions),
        ("strict-mode obstruction", c10_strict_obstruction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.passed);
        println!(
            "{} criterion {:>2} {name} [{:.1}s]: {}",
            if v.passed { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
