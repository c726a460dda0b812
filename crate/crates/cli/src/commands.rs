use std::fmt::Write as _;
use std::path::Path;

use noisy_designs::bloch::{cube_grid, spherical_grid};
use noisy_designs::channels::validate_density;
use noisy_designs::designs::{clifford_design, icosahedral_design, pauli_design, verify_design_order};
use noisy_designs::{
    density_from_point, epsilon_for_state, make_channel, noisy_moment, BlochPoint, CertifiedDesign, ChannelKind,
    EpsilonMode, Error, KrausChannel, NoiseModel, PreparedSample, UnitaryEnsemble,
};

use crate::config::Experiment;

/// CSV text plus whether any state was infeasible.
pub struct Output {
    pub csv: String,
    pub infeasible: bool,
}

/// Fixed point with twelve decimals (`1.000000000000`), `inf` for
/// infeasible values. Rounding residue below 5e-13 prints as zero.
pub fn format_epsilon(v: f64) -> String {
    if !v.is_finite() {
        return "inf".to_string();
    }
    let s = format!("{v:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn header(command: &str, exp: &Experiment, extra: &[(&str, String)]) -> String {
    let mut out = format!("# noisy-designs {command}\n");
    let mut fields: Vec<(&str, String)> = vec![
        ("channel", exp.channel.to_string()),
        ("model", exp.model.to_string()),
        ("design", "icosahedral".into()),
        ("mode", exp.mode.name().into()),
    ];
    fields.extend(extra.iter().cloned());
    for (k, v) in fields {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

fn grid_fields(exp: &Experiment) -> Vec<(&'static str, String)> {
    vec![
        ("rt", exp.grid.r_t.to_string()),
        ("thetat", exp.grid.theta_t.to_string()),
        ("phit", exp.grid.phi_t.to_string()),
        ("grid-n", exp.grid.n_r.to_string()),
    ]
}

fn spherical_sample(exp: &Experiment, t: usize) -> Result<PreparedSample, Error> {
    let points = spherical_grid(&exp.grid)?;
    PreparedSample::from_points(&points, t, &CertifiedDesign::icosahedral(), exp.mode)
}

/// Sample ε at each parameter value of the sweep.
pub fn sweep(exp: &Experiment) -> Result<Output, Error> {
    let sample = spherical_sample(exp, exp.t)?;
    let mut extra = vec![
        ("t", exp.t.to_string()),
        ("param-start", exp.param_start.to_string()),
        ("param-stop", exp.param_stop.to_string()),
        ("param-steps", exp.param_steps.to_string()),
    ];
    extra.extend(grid_fields(exp));
    let mut csv = header("sweep", exp, &extra);
    csv.push_str("param,epsilon\n");
    let mut infeasible = false;
    for p in exp.param_values() {
        let ch = make_channel(exp.channel, p)?;
        let res = sample.epsilon(&ch, exp.model)?;
        infeasible |= !res.feasible;
        let _ = writeln!(csv, "{p},{}", format_epsilon(res.epsilon));
    }
    Ok(Output { csv, infeasible })
}

/// Sample ε for t = 1..=5 at a fixed parameter.
pub fn ttable(exp: &Experiment) -> Result<Output, Error> {
    let mut extra = vec![("param", exp.param.to_string())];
    extra.extend(grid_fields(exp));
    let mut csv = header("ttable", exp, &extra);
    csv.push_str("t,epsilon\n");
    let ch = make_channel(exp.channel, exp.param)?;
    let mut infeasible = false;
    for t in 1..=5 {
        let res = spherical_sample(exp, t)?.epsilon(&ch, exp.model)?;
        infeasible |= !res.feasible;
        let _ = writeln!(csv, "{t},{}", format_epsilon(res.epsilon));
    }
    Ok(Output { csv, infeasible })
}

/// Per-point ε over the in-ball cube lattice, with the threshold verdict.
pub fn region(exp: &Experiment) -> Result<Output, Error> {
    let points = cube_grid(exp.cube_n)?;
    let extra = vec![
        ("t", exp.t.to_string()),
        ("param", exp.param.to_string()),
        ("threshold", exp.threshold.to_string()),
        ("grid-n", exp.cube_n.to_string()),
    ];
    let mut csv = header("region", exp, &extra);
    csv.push_str("x,y,z,epsilon,accept\n");
    let ch = make_channel(exp.channel, exp.param)?;
    let mut infeasible = false;
    if !points.is_empty() {
        let sample = PreparedSample::from_points(&points, exp.t, &CertifiedDesign::icosahedral(), exp.mode)?;
        for (p, res) in points.iter().zip(sample.per_state(&ch, exp.model)?) {
            infeasible |= !res.feasible;
            let accept = u8::from(res.feasible && res.epsilon <= exp.threshold);
            let _ = writeln!(csv, "{},{},{accept}", p.csv_row(), format_epsilon(res.epsilon));
        }
    }
    Ok(Output { csv, infeasible })
}

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

pub struct VerifyOptions<'a> {
    pub ensemble_file: Option<&'a Path>,
    pub oracle_enabled: bool,
}

fn certification(label: &str, ens: &UnitaryEnsemble, t_max: usize, expected: usize, oracle: bool) -> Check {
    let name = format!("certify-{label}");
    if !oracle {
        return Check::new(name, false, "Haar oracle disabled; certification cannot run");
    }
    match verify_design_order(ens, t_max) {
        Ok(order) if order == expected => Check::new(name, true, format!("order {order}")),
        Ok(order) => Check::new(name, false, format!("order {order}, expected {expected}")),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

fn test_states() -> Vec<BlochPoint> {
    let mut pts = vec![
        BlochPoint::ORIGIN,
        BlochPoint::new(0.0, 0.0, 1.0),
        BlochPoint::new(0.0, 0.0, -1.0),
        BlochPoint::new(1.0, 0.0, 0.0),
        BlochPoint::new(0.0, 1.0, 0.0),
    ];
    pts.extend([
        BlochPoint::from_spherical(0.35, 0.9, 2.1),
        BlochPoint::from_spherical(0.8, 2.4, 4.0),
        BlochPoint::from_spherical(0.95, 1.3, 5.5),
    ]);
    pts
}

fn cptp_check(kind: ChannelKind) -> Check {
    let mut worst_complete = 0.0f64;
    let mut worst_trace = 0.0f64;
    for step in 0..=10 {
        let ch = match make_channel(kind, step as f64 / 10.0) {
            Ok(ch) => ch,
            Err(e) => return Check::new(format!("cptp-{kind}"), false, e.to_string()),
        };
        worst_complete = worst_complete.max(ch.completeness_defect());
        for p in test_states() {
            let out = ch.apply_unchecked(&density_from_point(p).expect("test states lie in the ball"));
            worst_trace = worst_trace.max((out.trace().re - 1.0).abs());
            if let Err(e) = validate_density(&out) {
                return Check::new(format!("cptp-{kind}"), false, e.to_string());
            }
        }
    }
    let passed = worst_complete <= 1e-12 && worst_trace <= 1e-12;
    Check::new(
        format!("cptp-{kind}"),
        passed,
        format!("completeness {worst_complete:.1e}, trace {worst_trace:.1e}"),
    )
}

/// ε at t = 1 vanishes before the design and after it for unital channels;
/// after it, amplitude damping leaves ε = λ since ε(I/2) ≠ I/2.
fn first_moment_check() -> Check {
    let design = CertifiedDesign::pauli();
    let mut worst = 0.0f64;
    for kind in ChannelKind::ALL {
        for step in 0..=10 {
            let param = step as f64 / 10.0;
            let ch = make_channel(kind, param).expect("grid parameters are valid");
            for p in test_states() {
                let rho = density_from_point(p).expect("test states lie in the ball");
                for model in [NoiseModel::Before, NoiseModel::After] {
                    let expected = if model == NoiseModel::After && !kind.is_unital() { param } else { 0.0 };
                    match epsilon_for_state(&rho, 1, &design, &ch, model, EpsilonMode::strict()) {
                        Ok(res) => worst = worst.max((res.epsilon - expected).abs()),
                        Err(e) => return Check::new("first-moment", false, e.to_string()),
                    }
                }
            }
        }
    }
    Check::new(
        "first-moment",
        worst <= 1e-10,
        format!("max deviation {worst:.1e} (after-model ampdamp expects epsilon = lambda)"),
    )
}

fn depolarising_equivalence_check() -> Check {
    let design = CertifiedDesign::icosahedral();
    let mut worst = 0.0f64;
    for p in [0.1, 0.5, 0.9] {
        let ch = make_channel(ChannelKind::Depolarising, p).expect("valid parameter");
        for point in test_states() {
            let rho = density_from_point(point).expect("test states lie in the ball");
            for t in 1..=5 {
                let moments = noisy_moment(&rho, t, &design, &ch, NoiseModel::Before)
                    .and_then(|b| Ok((b, noisy_moment(&rho, t, &design, &ch, NoiseModel::After)?)));
                match moments {
                    Ok((b, a)) => worst = worst.max(b.distance(&a)),
                    Err(e) => return Check::new("depolarising-models", false, e.to_string()),
                }
            }
        }
    }
    Check::new("depolarising-models", worst <= 1e-12, format!("max |before - after|_F {worst:.1e}"))
}

fn strict_obstruction_check() -> Check {
    let design = CertifiedDesign::icosahedral();
    let ch: KrausChannel = make_channel(ChannelKind::BitFlip, 0.3).expect("valid parameter");
    let rho = density_from_point(BlochPoint::new(0.0, 0.0, 1.0)).expect("north pole");
    let run = |mode| epsilon_for_state(&rho, 2, &design, &ch, NoiseModel::Before, mode);
    match (run(EpsilonMode::strict()), run(EpsilonMode::projected())) {
        (Ok(strict), Ok(proj)) => {
            let passed = !strict.feasible && strict.kernel_residual > 1e-3 && proj.feasible && proj.epsilon.is_finite();
            Check::new(
                "strict-obstruction",
                passed,
                format!(
                    "pure |0>, bitflip p=0.3, t=2: strict infeasible={} residual {:.3e}; projected epsilon {}",
                    !strict.feasible,
                    strict.kernel_residual,
                    format_epsilon(proj.epsilon)
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => Check::new("strict-obstruction", false, e.to_string()),
    }
}

fn ensemble_file_check(path: &Path, oracle: bool) -> Check {
    let name = "ensemble-file";
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Check::new(name, false, format!("{}: {e}", path.display())),
    };
    let ens = match UnitaryEnsemble::from_text(&text) {
        Ok(ens) => ens,
        Err(e) => return Check::new(name, false, format!("{}: {e}", path.display())),
    };
    if !oracle {
        return Check::new(name, false, "Haar oracle disabled; certification cannot run");
    }
    match verify_design_order(&ens, 5) {
        Ok(order) if order >= 1 => Check::new(name, true, format!("'{}' certified to order {order}", ens.label())),
        Ok(_) => Check::new(name, false, format!("'{}' is not even a 1-design", ens.label())),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

pub fn verify(opts: &VerifyOptions<'_>) -> Vec<Check> {
    let oracle = opts.oracle_enabled;
    let mut checks = vec![
        certification("pauli", &pauli_design(), 3, 1, oracle),
        certification("clifford", &clifford_design(), 4, 3, oracle),
        certification("icosahedral", &icosahedral_design(), 5, 5, oracle),
    ];
    if let Some(path) = opts.ensemble_file {
        checks.push(ensemble_file_check(path, oracle));
    }
    checks.extend(ChannelKind::ALL.into_iter().map(cptp_check));
    checks.push(first_moment_check());
    checks.push(depolarising_equivalence_check());
    checks.push(strict_obstruction_check());
    checks
}

pub fn render_checks(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status}  {:width$}  {}", c.name, c.detail);
    }
    out
}
