//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::time::{Duration, Instant};

use mpemba_qsim::linalg::{
    ladder_lowering, propagator, sigma_minus, sigma_plus, tensor, ComplexMatrix, DensityMatrix, FockTruncation,
    TruncationPolicy,
};
use mpemba_qsim::metrics::{hs_distance, trace_distance};
use mpemba_qsim::mpemba::{alpha_window_edges, detect_crossings, sample_series, DEFAULT_CROSSING_TOLERANCE};
use mpemba_qsim::oracle::{jcm_oracle, oscillator_oracle_checked, tls_pair_oracle};
use mpemba_qsim::oscillator::{
    evolve_closed_form, evolve_closed_form_checked, hs_distance_closed, trace_distance_closed, InitialOscState,
};
use mpemba_qsim::schedules::{uniform_grid, Schedule};
use mpemba_qsim::tls::{
    crossing_tau_cavity, jcm_propagator_closed, jcm_thermal_components, jcm_trace_distance, jcm_zero_temperature_state,
    tls_pair_evolve, BathThermal, BlochVector,
};
use mpemba_qsim::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn half_state() -> BlochVector {
    BlochVector::new(0.5, 0.5, 0.5).unwrap()
}

/// Crossing times of the excited-state and (½,½,½) zero-temperature curves.
fn jcm_pair_crossings(schedule: &Schedule, points: usize) -> Vec<f64> {
    let grid = uniform_grid(0.0, 2.0, points).unwrap();
    let cos2 = |tau: f64| schedule.eval_tau(tau).unwrap().cos2;
    let s1 = sample_series(|t| jcm_trace_distance(&BlochVector::EXCITED, cos2(t)), &grid, "excited").unwrap();
    let s2 = sample_series(|t| jcm_trace_distance(&half_state(), cos2(t)), &grid, "half").unwrap();
    detect_crossings(&s1, &s2, DEFAULT_CROSSING_TOLERANCE).unwrap().pairs[0].crossing_times.clone()
}

/// `cos²φ` at which `cos²φ = √(9/16 cos⁴φ + 1/8 cos²φ)`.
fn analytic_cos2() -> f64 {
    0.125 / (1.0 - 0.5625)
}

fn criterion_1() -> Outcome {
    let crossings = jcm_pair_crossings(&Schedule::ramp(1.0).unwrap(), 1001);
    // ramp phase (π/2)τ²
    let tau_exact = (2.0 * analytic_cos2().sqrt().acos() / PI).sqrt();
    let pass = crossings.len() == 1
        && (crossings[0] - 0.800).abs() <= 0.02
        && (crossings[0] - tau_exact).abs() <= 1e-3;
    outcome(pass, format!("ramp crossings {crossings:?}, analytic τ = {tau_exact:.6} (cos²φ = 2/7)"))
}

fn criterion_2() -> Outcome {
    let crossings = jcm_pair_crossings(&Schedule::cavity_mode(1.0).unwrap(), 1001);
    // cavity phase (π/4)(1 - cos πτ)
    let phi = analytic_cos2().sqrt().acos();
    let tau_exact = (1.0 - 4.0 * phi / PI).acos() / PI;
    let pass = crossings.len() == 1
        && (crossings[0] - 0.591).abs() <= 0.02
        && (crossings[0] - tau_exact).abs() <= 1e-3;
    outcome(pass, format!("cavity crossings {crossings:?}, analytic τ = {tau_exact:.6}"))
}

fn criterion_3() -> Outcome {
    let tau1 = crossing_tau_cavity(1.0).unwrap();
    let taus: Vec<f64> = (1..=50).map(|k| crossing_tau_cavity(k as f64 / 50.0).unwrap()).collect();
    let decreasing = taus.windows(2).all(|w| w[1] < w[0]);

    // detected crossing of (1,0,0) against the excited state under the cavity schedule
    let cavity = Schedule::cavity_mode(1.0).unwrap();
    let grid = uniform_grid(0.0, 1.0, 4001).unwrap();
    let c = |t: f64| cavity.eval_tau(t).unwrap().cos2;
    let equator = BlochVector::new(1.0, 0.0, 0.0).unwrap();
    let s1 = sample_series(|t| jcm_trace_distance(&BlochVector::EXCITED, c(t)), &grid, "excited").unwrap();
    let s2 = sample_series(|t| jcm_trace_distance(&equator, c(t)), &grid, "equator").unwrap();
    let detected = detect_crossings(&s1, &s2, DEFAULT_CROSSING_TOLERANCE).unwrap().pairs[0].crossing_times.clone();

    let pass = (tau1 - 0.5695).abs() <= 0.01
        && decreasing
        && detected.len() == 1
        && (detected[0] - tau1).abs() <= 1e-3;
    outcome(
        pass,
        format!("τ(1) = {tau1:.6}, detected {detected:?}, strictly decreasing on 50 points: {decreasing}"),
    )
}

fn criterion_4() -> Outcome {
    let trunc = FockTruncation::new(40).unwrap();
    let families: [(&str, Vec<InitialOscState>, f64); 3] = [
        ("thermal", [0.5, 1.0, 3.0].map(|n| InitialOscState::thermal(n).unwrap()).to_vec(), 1e-6),
        (
            "coherent",
            [0.5, 1.0, 2.0].map(|a| InitialOscState::coherent(Complex64::new(a, 0.0)).unwrap()).to_vec(),
            1e-8,
        ),
        ("number", [1, 2, 5].map(InitialOscState::number).to_vec(), 1e-8),
    ];
    let exp = Schedule::exp_decay(1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, states, tol) in &families {
        let mut worst = 0.0f64;
        for state in states {
            for k in 0..=10 {
                let tau = 0.6 * k as f64;
                let sample = exp.eval_tau(tau).unwrap();
                let closed =
                    evolve_closed_form_checked(state, sample.cos2, tau, trunc, TruncationPolicy::Warn).unwrap();
                let oracle =
                    oscillator_oracle_checked(state, 0.0, tau, sample.phase, trunc, TruncationPolicy::Warn).unwrap();
                worst = worst.max(closed.state.matrix().max_abs_diff(oracle.state.matrix()));
            }
        }
        pass &= worst <= *tol;
        parts.push(format!("{name} {worst:.2e} (≤ {tol:e})"));
    }
    outcome(pass, format!("max deviation: {}", parts.join(", ")))
}

fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v = [(); 3].map(|_| rng.random_range(-1.0..=1.0));
        if let Ok(r) = BlochVector::new(v[0], v[1], v[2]) {
            return r;
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vectors: Vec<BlochVector> = (0..10).map(|_| random_bloch(&mut rng)).collect();
    let phases: Vec<f64> = (0..10).map(|k| FRAC_PI_2 * k as f64 / 9.0).collect();
    let baths = [BathThermal::zero_temperature(), BathThermal::new(1.0).unwrap()];
    let trunc = FockTruncation::new(40).unwrap();
    let (mut pair_worst, mut jcm_worst) = (0.0f64, 0.0f64);
    for bath in &baths {
        for r in &vectors {
            for &phase in &phases {
                let omega_t = 1.7 * phase;
                let oracle = tls_pair_oracle(r, bath, phase, omega_t).unwrap();
                let closed = tls_pair_evolve(r, bath, phase.cos().powi(2), omega_t).unwrap();
                pair_worst = pair_worst.max(oracle.matrix().max_abs_diff(closed.matrix()));

                let oracle = jcm_oracle(r, bath, phase, omega_t, trunc).unwrap();
                let closed = if bath.is_zero_temperature() {
                    jcm_zero_temperature_state(r, phase, omega_t).unwrap()
                } else {
                    jcm_thermal_components(r, bath, phase, omega_t, bath.series_cutoff()).unwrap()
                };
                jcm_worst = jcm_worst.max(oracle.matrix().max_abs_diff(closed.matrix()));
            }
        }
    }
    outcome(
        pair_worst <= 1e-8 && jcm_worst <= 1e-8,
        format!("max deviation: TLS pair {pair_worst:.2e}, JCM {jcm_worst:.2e} (≤ 1e-8)"),
    )
}

fn criterion_6() -> Outcome {
    let cos2s: Vec<f64> = (0..=20).map(|k| (-0.3 * k as f64).exp()).collect();

    let vacuum = DensityMatrix::basis(160, 0).unwrap();
    let trunc = FockTruncation::new(160).unwrap();

    // Frobenius norm of the explicit coherent state against √2 times the closed trace distance
    let mut coherent_dev = 0.0f64;
    for alpha in [0.3, 1.0, 2.0] {
        let state = InitialOscState::coherent(Complex64::new(alpha, 0.4)).unwrap();
        for &c in &cos2s {
            let rho = evolve_closed_form(&state, c, 0.9, trunc).unwrap();
            let hs = hs_distance(&rho, &vacuum).unwrap();
            coherent_dev = coherent_dev.max((hs - SQRT_2 * trace_distance_closed(&state, c)).abs());
        }
    }

    let ground = DensityMatrix::basis(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut jcm_dev = 0.0f64;
    for _ in 0..50 {
        let r = random_bloch(&mut rng);
        let phi = rng.random_range(0.0..FRAC_PI_2);
        let rho = jcm_zero_temperature_state(&r, phi, 0.8).unwrap();
        let dt = trace_distance(&rho, &ground).unwrap();
        let dhs = hs_distance(&rho, &ground).unwrap();
        jcm_dev = jcm_dev.max((dhs - SQRT_2 * dt).abs());
    }

    // Frobenius norm of the explicit thermal state over the closed trace distance
    let mut thermal_dev = 0.0f64;
    for nbar in [0.5, 1.0, 3.0] {
        let state = InitialOscState::thermal(nbar).unwrap();
        for &c in &cos2s {
            let rho = evolve_closed_form(&state, c, 0.0, trunc).unwrap();
            let ratio = hs_distance(&rho, &vacuum).unwrap() / trace_distance_closed(&state, c);
            let x = nbar * c;
            thermal_dev = thermal_dev.max((ratio - ((2.0 * x + 2.0) / (2.0 * x + 1.0)).sqrt()).abs());
        }
    }
    let late = InitialOscState::thermal(3.0).unwrap();
    let c20 = (-20.0f64).exp();
    let late_dev = (hs_distance_closed(&late, c20) / trace_distance_closed(&late, c20) - SQRT_2).abs();

    let pass = coherent_dev <= 1e-12 && jcm_dev <= 1e-12 && thermal_dev <= 1e-12 && late_dev <= 1e-8;
    outcome(
        pass,
        format!(
            "coherent {coherent_dev:.1e}, JCM {jcm_dev:.1e}, thermal ratio {thermal_dev:.1e} (≤ 1e-12); √2 limit at γt=20 {late_dev:.1e} (≤ 1e-8)"
        ),
    )
}

fn criterion_7() -> Outcome {
    let exp = Schedule::exp_decay(1.0).unwrap();
    let grid = uniform_grid(0.0, 6.0, 1001).unwrap();
    let series = |n: u32| {
        let state = InitialOscState::number(n);
        sample_series(|t| hs_distance_closed(&state, exp.eval_tau(t).unwrap().cos2), &grid, state.label()).unwrap()
    };
    let three = series(3).local_increases(0.0);
    let one = series(1);
    let one_decreasing = one.values.windows(2).all(|w| w[1] < w[0]);
    outcome(
        !three.is_empty() && one_decreasing,
        format!(
            "N=3 strict local increases: {}; N=1 monotone decreasing: {one_decreasing}",
            three.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let exp = Schedule::exp_decay(1.0).unwrap();
    let grid = uniform_grid(0.0, 6.0, 1001).unwrap();
    let window = alpha_window_edges(3.0, (0.02, 1.2), 60, &exp, &grid, 1e-5).unwrap();
    let analytic_upper = (16.0f64 / 7.0).ln().sqrt();
    match window {
        Some(w) => {
            let upper_ok = (w.upper - 0.909).abs() <= 0.005 && (w.upper - analytic_upper).abs() <= 0.005;
            let lower_ok = (0.2..=0.4).contains(&w.lower);
            outcome(
                upper_ok && lower_ok,
                format!(
                    "upper edge {:.4} (analytic {analytic_upper:.4}, {}), lower edge {:.4} ({} [0.2, 0.4])",
                    w.upper,
                    if upper_ok { "ok" } else { "off" },
                    w.lower,
                    if lower_ok { "inside" } else { "outside" }
                ),
            )
        }
        None => outcome(false, "no crossing found for any scanned amplitude"),
    }
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
    });
    (&g + &g.adjoint()).scale_real(0.5)
}

fn valid(rho: &DensityMatrix) -> bool {
    (rho.matrix().trace().re - 1.0).abs() <= 1e-10 && rho.min_eigenvalue() >= -1e-10
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();

    let mut axioms = true;
    for _ in 0..200 {
        let dim = rng.random_range(2..=8);
        let (a, b, c) = (random_density(&mut rng, dim), random_density(&mut rng, dim), random_density(&mut rng, dim));
        let d = |x: &DensityMatrix, y: &DensityMatrix| trace_distance(x, y).unwrap();
        let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &c), d(&a, &c));
        axioms &= d(&a, &a) == 0.0 && (0.0..=1.0).contains(&ab) && (ab - ba).abs() <= 1e-12 && ac <= ab + bc + 1e-12;
    }
    if !axioms {
        failures.push("metric axioms");
    }

    let mut unitary_defect = 0.0f64;
    for dim in [2, 5, 12, 40] {
        unitary_defect = unitary_defect.max(propagator(&random_hermitian(&mut rng, dim)).unwrap().unitarity_defect());
    }
    let trunc = FockTruncation::new(40).unwrap();
    let b = ladder_lowering(trunc);
    let jcm_gen = &tensor(&sigma_plus(), &b) + &tensor(&sigma_minus(), &b.adjoint());
    unitary_defect = unitary_defect.max(propagator(&jcm_gen.scale_real(1.1)).unwrap().unitarity_defect());
    // closed-form JCM propagator away from the truncation edge
    let closed = jcm_propagator_closed(1.1, trunc);
    let product = &closed * &closed.adjoint();
    for i in (0..80).filter(|i| i % 40 != 39) {
        for j in (0..80).filter(|j| j % 40 != 39) {
            let target = if i == j { 1.0 } else { 0.0 };
            unitary_defect = unitary_defect.max((product[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    if unitary_defect > 1e-10 {
        failures.push("unitarity");
    }

    let mut states_ok = true;
    let osc_states = [
        InitialOscState::thermal(1.0).unwrap(),
        InitialOscState::coherent(Complex64::new(1.0, -0.5)).unwrap(),
        InitialOscState::number(3),
    ];
    for state in &osc_states {
        for k in 0..=10 {
            let c = (-0.6 * k as f64).exp();
            let rho = evolve_closed_form(state, c, 0.3, trunc).unwrap();
            let oracle = oscillator_oracle_checked(state, 0.2, 0.3, c.sqrt().acos(), trunc, TruncationPolicy::Warn)
                .unwrap()
                .state;
            states_ok &= valid(&rho) && valid(&oracle);
        }
    }
    let warm = BathThermal::new(1.0).unwrap();
    for _ in 0..20 {
        let r = random_bloch(&mut rng);
        let phi = rng.random_range(0.0..FRAC_PI_2);
        for bath in [BathThermal::zero_temperature(), warm] {
            states_ok &= valid(&tls_pair_evolve(&r, &bath, phi.cos().powi(2), 0.4).unwrap());
            states_ok &= valid(&tls_pair_oracle(&r, &bath, phi, 0.4).unwrap());
            states_ok &= valid(&jcm_thermal_components(&r, &bath, phi, 0.4, bath.series_cutoff()).unwrap());
        }
        states_ok &= valid(&jcm_zero_temperature_state(&r, phi, 0.4).unwrap());
    }
    if !states_ok {
        failures.push("state validity");
    }

    let ground = DensityMatrix::basis(2, 1).unwrap();
    let mut relax_dev = 0.0f64;
    for _ in 0..100 {
        let r = random_bloch(&mut rng);
        let rho = jcm_zero_temperature_state(&r, FRAC_PI_2, rng.random_range(0.0..6.0)).unwrap();
        relax_dev = relax_dev.max(rho.matrix().max_abs_diff(ground.matrix()));
    }
    if relax_dev > 1e-12 {
        failures.push("universal relaxation");
    }

    outcome(
        failures.is_empty(),
        format!(
            "metric axioms {axioms}, max unitarity defect {unitary_defect:.1e}, evolved states valid {states_ok}, relaxation deviation {relax_dev:.1e}{}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst = 0.0f64;
    let mut counts_stable = true;
    for schedule in [Schedule::ramp(1.0).unwrap(), Schedule::cavity_mode(1.0).unwrap()] {
        let coarse = jcm_pair_crossings(&schedule, 1001);
        let fine = jcm_pair_crossings(&schedule, 4001);
        counts_stable &= coarse.len() == fine.len();
        for (a, b) in coarse.iter().zip(&fine) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        counts_stable && worst < 1e-3,
        format!("crossing counts stable {counts_stable}, max shift {worst:.2e} (< 1e-3)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 JCM ramp crossing", criterion_1, Some(Duration::from_secs(1))),
        ("2 JCM cavity crossing", criterion_2, Some(Duration::from_secs(1))),
        ("3 cavity crossing-time formula", criterion_3, None),
        ("4 oscillator closed form vs oracle", criterion_4, Some(Duration::from_secs(60))),
        ("5 TLS pair and JCM closed form vs oracle", criterion_5, Some(Duration::from_secs(60))),
        ("6 Hilbert-Schmidt identities", criterion_6, None),
        ("7 Hilbert-Schmidt non-monotonicity", criterion_7, None),
        ("8 thermal vs coherent amplitude window", criterion_8, None),
        ("9 property suites", criterion_9, None),
        ("10 crossing grid stability", criterion_10, None),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = match budget {
            Some(b) => format!("{:.3}s of {}s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.3}s", elapsed.as_secs_f64()),
        };
        println!("{} criterion {name}: {} [{timing}]", if pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
