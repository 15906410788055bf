//! Closed-form versus brute-force equivalence suites.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    ladder_lowering, propagator, sigma_minus, sigma_plus, tensor, ComplexMatrix, FockTruncation, TruncationPolicy,
};
use crate::oracle::{jcm_oracle, oscillator_oracle_checked, tls_pair_oracle};
use crate::oscillator::{evolve_closed_form_checked, InitialOscState};
use crate::tls::{jcm_propagator_closed, jcm_thermal_components, jcm_zero_temperature_state, tls_pair_evolve, BathThermal, BlochVector};
use crate::Complex64;

pub const SUITES: [(&str, f64); 6] = [
    ("oscillator_thermal", 1e-6),
    ("oscillator_coherent", 1e-8),
    ("oscillator_number", 1e-8),
    ("tls_pair", 1e-8),
    ("jcm", 1e-8),
    ("jcm_propagator", 1e-9),
];

/// Parses `suite=tol,suite=tol`.
pub fn parse_overrides(spec: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, tol) = item
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("tolerance override {item:?} is not suite=value")))?;
        let name = name.trim();
        if !SUITES.iter().any(|(s, _)| *s == name) {
            return Err(Error::Usage(format!("unknown suite {name:?} in tolerance overrides")));
        }
        let tol: f64 = tol
            .trim()
            .parse()
            .ok()
            .filter(|t: &f64| *t >= 0.0 && t.is_finite())
            .ok_or_else(|| Error::Usage(format!("bad tolerance in {item:?}")))?;
        out.insert(name.to_string(), tol);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_case: Value,
    pub truncation_warnings: Vec<Value>,
    pub errors: Vec<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub dim: usize,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &SuiteReport> {
        self.suites.iter().filter(|s| !s.pass)
    }
}

struct CaseOutcome {
    params: Value,
    deviation: Result<f64>,
    warnings: Vec<String>,
}

fn summarize(name: &str, tolerance: f64, outcomes: Vec<CaseOutcome>) -> SuiteReport {
    let mut max_deviation = 0.0f64;
    let mut worst_case = Value::Null;
    let mut truncation_warnings = Vec::new();
    let mut errors = Vec::new();
    let cases = outcomes.len();
    for case in outcomes {
        for w in case.warnings {
            truncation_warnings.push(json!({ "case": case.params.clone(), "warning": w }));
        }
        match case.deviation {
            Ok(d) => {
                if worst_case.is_null() || d > max_deviation || d.is_nan() {
                    max_deviation = d;
                    worst_case = case.params;
                }
            }
            Err(e) => errors.push(json!({ "case": case.params, "error": e.to_string() })),
        }
    }
    let pass = errors.is_empty() && max_deviation <= tolerance;
    SuiteReport {
        name: name.to_string(),
        cases,
        max_deviation,
        tolerance,
        pass,
        worst_case,
        truncation_warnings,
        errors,
    }
}

fn oscillator_cases(states: &[InitialOscState], trunc: FockTruncation) -> Vec<CaseOutcome> {
    let taus: Vec<f64> = (0..=10).map(|i| 0.6 * i as f64).collect();
    let cases: Vec<(InitialOscState, f64)> = states.iter().flat_map(|s| taus.iter().map(move |&t| (*s, t))).collect();
    cases
        .par_iter()
        .map(|&(state, tau)| {
            let cos2 = (-tau).exp();
            let kappa = cos2.sqrt().acos();
            let omega0_t = tau;
            let params = json!({ "state": state.label(), "tau": tau, "cos2": cos2 });
            let mut warnings = Vec::new();
            let deviation = (|| {
                let closed = evolve_closed_form_checked(&state, cos2, omega0_t, trunc, TruncationPolicy::Warn)?;
                let oracle = oscillator_oracle_checked(&state, 0.0, omega0_t, kappa, trunc, TruncationPolicy::Warn)?;
                for w in [&closed.warning, &oracle.warning].into_iter().flatten() {
                    warnings.push(w.to_string());
                }
                warnings.dedup();
                Ok(closed.state.matrix().max_abs_diff(oracle.state.matrix()))
            })();
            CaseOutcome { params, deviation, warnings }
        })
        .collect()
}

fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let (x, y, z) = (
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        if let Ok(r) = BlochVector::new(x, y, z) {
            return r;
        }
    }
}

/// Ten random Bloch vectors times ten phases in `[0, π/2]`, for two baths.
fn qubit_grid(seed: u64, salt: u64) -> Vec<(BlochVector, f64, BathThermal)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    let vectors: Vec<BlochVector> = (0..10).map(|_| random_bloch(&mut rng)).collect();
    let baths = [BathThermal::zero_temperature(), BathThermal::new(1.0).expect("valid")];
    let mut grid = Vec::new();
    for bath in baths {
        for r in &vectors {
            for k in 0..10 {
                grid.push((*r, FRAC_PI_2 * k as f64 / 9.0, bath));
            }
        }
    }
    grid
}

fn beta_label(bath: &BathThermal) -> Value {
    if bath.is_zero_temperature() {
        json!("inf")
    } else {
        json!(bath.beta_hbar_omega())
    }
}

fn qubit_params(r: &BlochVector, phase_name: &str, phase: f64, bath: &BathThermal) -> Value {
    json!({ "bloch": [r.rx, r.ry, r.rz], phase_name: phase, "omega_t": 2.0 * phase, "beta": beta_label(bath) })
}

fn tls_pair_cases(seed: u64) -> Vec<CaseOutcome> {
    qubit_grid(seed, 0x7a17)
        .par_iter()
        .map(|(r, mu, bath)| {
            let omega_t = 2.0 * mu;
            let deviation = (|| {
                let oracle = tls_pair_oracle(r, bath, *mu, omega_t)?;
                let closed = tls_pair_evolve(r, bath, mu.cos().powi(2), omega_t)?;
                Ok(oracle.matrix().max_abs_diff(closed.matrix()))
            })();
            CaseOutcome {
                params: qubit_params(r, "mu", *mu, bath),
                deviation,
                warnings: Vec::new(),
            }
        })
        .collect()
}

fn jcm_cases(seed: u64, trunc: FockTruncation) -> Vec<CaseOutcome> {
    qubit_grid(seed, 0x1c3)
        .par_iter()
        .map(|(r, phi, bath)| {
            let omega_t = 2.0 * phi;
            let deviation = (|| {
                let oracle = jcm_oracle(r, bath, *phi, omega_t, trunc)?;
                let closed = if bath.is_zero_temperature() {
                    jcm_zero_temperature_state(r, *phi, omega_t)?
                } else {
                    jcm_thermal_components(r, bath, *phi, omega_t, bath.series_cutoff())?
                };
                Ok(oracle.matrix().max_abs_diff(closed.matrix()))
            })();
            CaseOutcome {
                params: qubit_params(r, "phi", *phi, bath),
                deviation,
                warnings: Vec::new(),
            }
        })
        .collect()
}

fn jcm_propagator_cases(trunc: FockTruncation) -> Vec<CaseOutcome> {
    let dim = trunc.dim();
    let b = ladder_lowering(trunc);
    let generator = &tensor(&sigma_plus(), &b) + &tensor(&sigma_minus(), &b.adjoint());
    let interior = |i: usize| i % dim != dim - 1;
    (0..10)
        .into_par_iter()
        .map(|k| {
            let phi = 0.37 * k as f64;
            let deviation = (|| {
                let closed = jcm_propagator_closed(phi, trunc);
                let direct: ComplexMatrix = propagator(&generator.scale_real(phi))?;
                let mut worst = 0.0f64;
                for i in (0..2 * dim).filter(|&i| interior(i)) {
                    for j in (0..2 * dim).filter(|&j| interior(j)) {
                        let d: Complex64 = closed[(i, j)] - direct[(i, j)];
                        worst = worst.max(d.norm());
                    }
                }
                Ok(worst)
            })();
            CaseOutcome {
                params: json!({ "phi": phi }),
                deviation,
                warnings: Vec::new(),
            }
        })
        .collect()
}

/// Runs every suite. The report depends only on `dim`, `seed` and the
/// tolerances.
pub fn run_suites(trunc: FockTruncation, seed: u64, overrides: &BTreeMap<String, f64>) -> Result<VerifyReport> {
    let thermal: Vec<InitialOscState> = [0.5, 1.0, 3.0]
        .iter()
        .map(|&n| InitialOscState::thermal(n))
        .collect::<Result<_>>()?;
    let coherent: Vec<InitialOscState> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&a| InitialOscState::coherent(Complex64::new(a, 0.0)))
        .collect::<Result<_>>()?;
    let number: Vec<InitialOscState> = [1, 2, 5].iter().map(|&n| InitialOscState::number(n)).collect();

    let mut suites = Vec::new();
    for (name, default_tol) in SUITES {
        let tol = overrides.get(name).copied().unwrap_or(default_tol);
        let outcomes = match name {
            "oscillator_thermal" => oscillator_cases(&thermal, trunc),
            "oscillator_coherent" => oscillator_cases(&coherent, trunc),
            "oscillator_number" => oscillator_cases(&number, trunc),
            "tls_pair" => tls_pair_cases(seed),
            "jcm" => jcm_cases(seed, trunc),
            "jcm_propagator" => jcm_propagator_cases(trunc),
            _ => unreachable!("suite list is fixed"),
        };
        suites.push(summarize(name, tol, outcomes));
    }
    Ok(VerifyReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        dim: trunc.dim(),
        seed,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parsing() {
        let o = parse_overrides("tls_pair=1e-6, jcm=0.1").unwrap();
        assert_eq!(o["tls_pair"], 1e-6);
        assert_eq!(o["jcm"], 0.1);
        assert!(parse_overrides("").unwrap().is_empty());
        assert!(matches!(parse_overrides("nope=1"), Err(Error::Usage(_))));
        assert!(matches!(parse_overrides("jcm"), Err(Error::Usage(_))));
        assert!(matches!(parse_overrides("jcm=-1"), Err(Error::Usage(_))));
    }

    #[test]
    fn qubit_grid_is_seeded() {
        let a = qubit_grid(7, 1);
        let b = qubit_grid(7, 1);
        let c = qubit_grid(8, 1);
        assert_eq!(a.len(), 200);
        assert!(a.iter().zip(&b).all(|(x, y)| x.0 == y.0 && x.1 == y.1));
        assert!(a.iter().zip(&c).any(|(x, y)| x.0 != y.0));
    }

    #[test]
    fn summary_tracks_worst_case_and_errors() {
        let outcomes = vec![
            CaseOutcome { params: json!(1), deviation: Ok(1e-12), warnings: vec![] },
            CaseOutcome { params: json!(2), deviation: Ok(1e-3), warnings: vec!["w".into()] },
            CaseOutcome { params: json!(3), deviation: Ok(1e-9), warnings: vec![] },
        ];
        let s = summarize("x", 1e-6, outcomes);
        assert_eq!(s.worst_case, json!(2));
        assert!(!s.pass);
        assert_eq!(s.truncation_warnings.len(), 1);

        let failing = vec![CaseOutcome { params: json!(0), deviation: Err(Error::Truncation("t".into())), warnings: vec![] }];
        assert!(!summarize("y", 1.0, failing).pass);
    }
}
