//! Brute-force evolutions of the full composite systems in truncated bases.
//!
//! Each model's couplings conserve the total excitation number and commute
//! with the free Hamiltonian, so the propagator is the exponential of a
//! single Hermitian generator built from the accumulated phases. That
//! shortcut is exact only for commuting generators; a coupling that does not
//! conserve excitations would need a time-ordered product instead.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    ladder_lowering, number_operator, partial_trace_b, propagator, sigma_minus, sigma_plus, tensor, Checked,
    ComplexMatrix, DensityMatrix, FockTruncation, TruncationPolicy,
};
use crate::oscillator::{binomial_pmf, coherent_amplitudes, thermal_populations, InitialOscState};
use crate::tls::{BathThermal, BlochVector};

/// Probability mass allowed beyond the retained levels of an initial state.
pub const INITIAL_TAIL_LIMIT: f64 = 1e-12;

/// Probability of the first dropped level of an initial coherent state.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-24;

/// Upper bound on the levels per mode the oscillator oracle will allocate.
pub const MAX_WORKING_LEVELS: usize = 400;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Levels needed by a coherent state of mean occupation `mean` so that the
/// dropped amplitudes, which enter coherences linearly, stay negligible.
fn coherent_levels(mean: f64) -> Result<usize> {
    for n in 0..MAX_WORKING_LEVELS {
        // beyond n > 2·mean the Poisson tail is at most twice its first term
        if n as f64 > 2.0 * mean && poisson_pmf(mean, n) < COHERENT_TAIL_LIMIT {
            return Ok(n);
        }
    }
    Err(Error::Truncation(format!(
        "coherent state with mean {mean} needs more than {MAX_WORKING_LEVELS} levels"
    )))
}

fn thermal_levels(nbar: f64, what: &str) -> Result<usize> {
    if nbar == 0.0 {
        return Ok(1);
    }
    let ratio = nbar / (nbar + 1.0);
    // geometric tail beyond n levels is ratio^n
    let n = (INITIAL_TAIL_LIMIT.ln() / ratio.ln()).ceil();
    if n.is_finite() && n < MAX_WORKING_LEVELS as f64 {
        Ok((n as usize).max(1))
    } else {
        Err(Error::Truncation(format!(
            "{what} with mean {nbar} needs more than {MAX_WORKING_LEVELS} levels"
        )))
    }
}

/// Pure-state ensemble `{(p_i, |ψ_i>)}` for the system mode, on `levels` levels.
fn system_ensemble(init: &InitialOscState) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let basis = |levels: usize, k: usize| {
        let mut v = vec![zero(); levels];
        v[k] = Complex64::new(1.0, 0.0);
        v
    };
    match *init {
        InitialOscState::Thermal { nbar } => {
            let levels = thermal_levels(nbar, "initial thermal state")?;
            let p = renormalize(thermal_populations(nbar, levels))?;
            Ok(p.into_iter().enumerate().map(|(k, w)| (w, basis(levels, k))).collect())
        }
        InitialOscState::Number { n } => {
            let levels = n as usize + 1;
            if levels > MAX_WORKING_LEVELS {
                return Err(Error::Truncation(format!("number state {n} exceeds {MAX_WORKING_LEVELS} levels")));
            }
            Ok(vec![(1.0, basis(levels, n as usize))])
        }
        InitialOscState::Coherent { alpha } => {
            let mean = alpha.norm_sqr();
            let levels = coherent_levels(mean)?;
            let mut amps = coherent_amplitudes(alpha, levels);
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            Ok(vec![(1.0, amps)])
        }
    }
}

fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mean.ln() - mean - statrs::function::gamma::ln_gamma(n as f64 + 1.0)).exp()
}

fn renormalize(mut p: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = p.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Truncation("empty truncated distribution".into()));
    }
    p.iter_mut().for_each(|x| *x /= total);
    Ok(p)
}

/// Propagator of `ω₀t K + κ(a b† + a† b)` on the sector with `K` total
/// excitations, basis `|k, K-k>` for `k = 0..=K`.
fn sector_propagator(excitations: usize, omega0_t: f64, kappa: f64) -> Result<ComplexMatrix> {
    let size = excitations + 1;
    let mut h = ComplexMatrix::zeros(size, size);
    for k in 0..size {
        h[(k, k)] = Complex64::new(omega0_t * excitations as f64, 0.0);
        if k > 0 {
            // a b† |k, K-k> = √k √(K-k+1) |k-1, K-k+1>
            let coupling = kappa * ((k * (excitations - k + 1)) as f64).sqrt();
            h[(k - 1, k)] = Complex64::new(coupling, 0.0);
            h[(k, k - 1)] = Complex64::new(coupling, 0.0);
        }
    }
    propagator(&h)
}

/// Reduced system state after the two oscillators exchanged excitations for
/// a coupling phase `kappa`, with the bath initially thermal at mean `nbar_b`.
///
/// The composite evolution runs in a working basis large enough that the
/// initial states lose less than [`INITIAL_TAIL_LIMIT`]; the reduced state is
/// then projected onto `trunc` levels and renormalized. Fails with
/// [`Error::Truncation`] if that projection discards population in the top
/// two retained levels; see [`oscillator_oracle_checked`].
pub fn oscillator_oracle(
    init_a: &InitialOscState,
    nbar_b: f64,
    omega0_t: f64,
    kappa: f64,
    trunc: FockTruncation,
) -> Result<DensityMatrix> {
    oscillator_oracle_checked(init_a, nbar_b, omega0_t, kappa, trunc, TruncationPolicy::Strict).map(|c| c.state)
}

pub fn oscillator_oracle_checked(
    init_a: &InitialOscState,
    nbar_b: f64,
    omega0_t: f64,
    kappa: f64,
    trunc: FockTruncation,
    policy: TruncationPolicy,
) -> Result<Checked> {
    if !(nbar_b >= 0.0) || !nbar_b.is_finite() {
        return Err(Error::InvalidState(format!("bath mean occupation {nbar_b} must be finite and ≥ 0")));
    }
    let ensemble = system_ensemble(init_a)?;
    let levels_a = ensemble[0].1.len();
    let levels_b = thermal_levels(nbar_b, "bath thermal state")?;
    let bath = renormalize(thermal_populations(nbar_b, levels_b))?;

    let max_k = levels_a + levels_b - 2;
    let width = max_k + 1;
    let sectors = (0..=max_k)
        .map(|k| sector_propagator(k, omega0_t, kappa))
        .collect::<Result<Vec<_>>>()?;

    let mut rho = ComplexMatrix::zeros(width, width);
    let mut psi = vec![zero(); width * width];
    for &(p_a, ref amps) in &ensemble {
        for (j, &p_b) in bath.iter().enumerate() {
            let weight = p_a * p_b;
            if weight == 0.0 {
                continue;
            }
            psi.iter_mut().for_each(|x| *x = zero());
            // |ψ> ⊗ |j> lies in sectors K = m + j; component m sits at index k = m there
            for (m, &c) in amps.iter().enumerate() {
                if c == zero() {
                    continue;
                }
                let sector_k = m + j;
                let u = &sectors[sector_k];
                for k in 0..=sector_k {
                    psi[k * width + (sector_k - k)] += u[(k, m)] * c;
                }
            }
            for k in 0..width {
                let row_k = &psi[k * width..(k + 1) * width];
                for l in 0..width {
                    let row_l = &psi[l * width..(l + 1) * width];
                    let mut acc = zero();
                    for (x, y) in row_k.iter().zip(row_l) {
                        acc += x * y.conj();
                    }
                    rho[(k, l)] += acc * weight;
                }
            }
        }
    }
    let projected = project(&rho, trunc.dim())?;
    Checked::inspect(projected, policy)
}

fn project(rho: &ComplexMatrix, dim: usize) -> Result<DensityMatrix> {
    let keep = dim.min(rho.rows());
    let mut out = ComplexMatrix::from_fn(dim, dim, |i, j| if i < keep && j < keep { rho[(i, j)] } else { zero() });
    let trace = out.trace().re;
    if !(trace > 0.0) {
        return Err(Error::Truncation("no population inside the retained levels".into()));
    }
    out = out.scale_real(1.0 / trace);
    DensityMatrix::new(out.hermitian_part())
}

/// Composite oscillator state `U ρ_a ⊗ ρ_b U†` on `dim × dim` levels with
/// the full generator exponentiated directly. Both initial states are
/// truncated to `dim` levels and renormalized. Intended for small `dim`.
pub fn oscillator_oracle_joint(
    init_a: &InitialOscState,
    nbar_b: f64,
    omega0_t: f64,
    kappa: f64,
    trunc: FockTruncation,
) -> Result<DensityMatrix> {
    let dim = trunc.dim();
    let rho_a = match *init_a {
        InitialOscState::Thermal { nbar } => DensityMatrix::from_populations(&renormalize(thermal_populations(nbar, dim))?)?,
        InitialOscState::Number { n } => {
            DensityMatrix::from_populations(&renormalize((0..dim).map(|k| binomial_pmf(n, k as u32, 1.0)).collect())?)?
        }
        InitialOscState::Coherent { alpha } => DensityMatrix::from_pure(&coherent_amplitudes(alpha, dim))?,
    };
    let rho_b = DensityMatrix::from_populations(&renormalize(thermal_populations(nbar_b, dim))?)?;
    let a = tensor(&ladder_lowering(trunc), &ComplexMatrix::identity(dim));
    let b = tensor(&ComplexMatrix::identity(dim), &ladder_lowering(trunc));
    let hop = &(&a * &b.adjoint()) + &(&a.adjoint() * &b);
    let total = excitation_operator(trunc);
    let h = &total.scale_real(omega0_t) + &hop.scale_real(kappa);
    let u = propagator(&h)?;
    let rho0 = DensityMatrix::new(tensor(rho_a.matrix(), rho_b.matrix()))?;
    rho0.evolve(&u)
}

/// `n_a + n_b` on the two-mode space.
pub fn excitation_operator(trunc: FockTruncation) -> ComplexMatrix {
    let dim = trunc.dim();
    let n = number_operator(trunc);
    let id = ComplexMatrix::identity(dim);
    &tensor(&n, &id) + &tensor(&id, &n)
}

/// Dense version of [`oscillator_oracle`]: [`oscillator_oracle_joint`]
/// followed by the partial trace over the bath.
pub fn oscillator_oracle_dense(
    init_a: &InitialOscState,
    nbar_b: f64,
    omega0_t: f64,
    kappa: f64,
    trunc: FockTruncation,
) -> Result<DensityMatrix> {
    let joint = oscillator_oracle_joint(init_a, nbar_b, omega0_t, kappa, trunc)?;
    partial_trace_b(&joint, trunc.dim(), trunc.dim())
}

fn qubit_thermal(bath: &BathThermal) -> Result<DensityMatrix> {
    DensityMatrix::from_populations(&[bath.p_excited(), bath.p_ground()])
}

/// Reduced state of the first qubit after exchange with a thermal bath qubit.
pub fn tls_pair_oracle(r: &BlochVector, bath: &BathThermal, mu: f64, omega_t: f64) -> Result<DensityMatrix> {
    r.validate()?;
    let id = ComplexMatrix::identity(2);
    let sz = crate::linalg::pauli_z();
    let free = (&tensor(&sz, &id) + &tensor(&id, &sz)).scale_real(0.5 * omega_t);
    let swap = &tensor(&sigma_minus(), &sigma_plus()) + &tensor(&sigma_plus(), &sigma_minus());
    let u = propagator(&(&free + &swap.scale_real(mu)))?;
    let rho0 = DensityMatrix::new(tensor(r.to_density().matrix(), qubit_thermal(bath)?.matrix()))?;
    partial_trace_b(&rho0.evolve(&u)?, 2, 2)
}

/// Reduced qubit state of the resonant Jaynes–Cummings model with coupling
/// phase `phi` and a thermal boson truncated to `trunc` levels.
pub fn jcm_oracle(
    r: &BlochVector,
    bath: &BathThermal,
    phi: f64,
    omega_t: f64,
    trunc: FockTruncation,
) -> Result<DensityMatrix> {
    r.validate()?;
    let dim = trunc.dim();
    let boson = bath.oscillator_populations(dim, INITIAL_TAIL_LIMIT)?;
    let b = ladder_lowering(trunc);
    let coupling = &tensor(&sigma_plus(), &b) + &tensor(&sigma_minus(), &b.adjoint());
    let u_int = propagator(&coupling.scale_real(phi))?;
    let free_gen = &tensor(&crate::linalg::pauli_z(), &ComplexMatrix::identity(dim)).scale_real(0.5)
        + &tensor(&ComplexMatrix::identity(2), &number_operator(trunc));
    let u_free = propagator(&free_gen.scale_real(omega_t))?;
    let u = &u_free * &u_int;
    let rho0 = DensityMatrix::new(tensor(
        r.to_density().matrix(),
        DensityMatrix::from_populations(&boson)?.matrix(),
    ))?;
    partial_trace_b(&rho0.evolve(&u)?, 2, dim)
}
