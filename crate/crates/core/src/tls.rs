//! Two-level-system dynamics.
//!
//! Two dissipative constructions are covered:
//!
//! * a qubit exchanging excitations with a bath qubit through the coupling
//!   `c(t)(σ₋¹σ₊² + σ₊¹σ₋²)`, with accumulated phase `μ(t)`;
//! * a qubit coupled resonantly to a bosonic mode, `f(t)(b σ₊ + b† σ₋)`
//!   (time-dependent Jaynes-Cummings), with accumulated phase `φ(t)`.
//!
//! Basis ordering is `(excited, ground)` throughout, so `σ_z = diag(1, -1)`
//! and the relaxed zero-temperature state is `diag(0, 1)`.

use std::f64::consts::{FRAC_1_PI, PI};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, FockTruncation};

/// Slack allowed on `|r| ≤ 1`.
pub const BLOCH_NORM_TOLERANCE: f64 = 1e-12;

/// Bloch vector of a qubit state `ρ = ½(1 + r·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let r = Self { rx, ry, rz };
        r.validate()?;
        Ok(r)
    }

    /// The excited state `(0, 0, 1)`.
    pub const EXCITED: Self = Self {
        rx: 0.0,
        ry: 0.0,
        rz: 1.0,
    };

    /// The ground state `(0, 0, -1)`.
    pub const GROUND: Self = Self {
        rx: 0.0,
        ry: 0.0,
        rz: -1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let norm = self.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "Bloch vector ({}, {}, {}) has norm {norm} > 1",
                self.rx, self.ry, self.rz
            )));
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }

    /// Transverse length `√(rx² + ry²)`, the initial coherence.
    pub fn r_perp(&self) -> f64 {
        self.rx.hypot(self.ry)
    }

    /// `r₋ = rx - i ry`, twice the `(e, g)` coherence.
    pub fn r_minus(&self) -> Complex64 {
        Complex64::new(self.rx, -self.ry)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let half = 0.5;
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(half * (1.0 + self.rz), 0.0),
                self.r_minus() * half,
                self.r_minus().conj() * half,
                Complex64::new(half * (1.0 - self.rz), 0.0),
            ],
        )
        .expect("2x2")
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new(self.to_matrix()).expect("a valid Bloch vector describes a valid state")
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::InvalidDimension(format!(
                "Bloch vectors describe qubits, got dimension {}",
                rho.dim()
            )));
        }
        let coherence = rho.get(0, 1);
        Ok(Self {
            rx: 2.0 * coherence.re,
            ry: -2.0 * coherence.im,
            rz: (rho.get(0, 0) - rho.get(1, 1)).re,
        })
    }

    pub fn label(&self) -> String {
        format!("bloch:{}:{}:{}", self.rx, self.ry, self.rz)
    }
}

impl FromStr for BlochVector {
    type Err = Error;

    /// Parses `rx,ry,rz`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Usage(format!("expected rx,ry,rz, got {s:?}")));
        }
        let mut xyz = [0.0; 3];
        for (slot, part) in xyz.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::Usage(format!("cannot parse {part:?} in Bloch vector {s:?}")))?;
        }
        Self::new(xyz[0], xyz[1], xyz[2]).map_err(|e| Error::Usage(e.to_string()))
    }
}

/// Thermal bath at dimensionless inverse temperature `βħω`; infinity is
/// the zero-temperature bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathThermal {
    beta_hbar_omega: f64,
}

/// Largest Boltzmann weight allowed beyond the last retained bath level.
pub const SERIES_WEIGHT_CUTOFF: f64 = 1e-14;
/// Hard cap on the number of bath levels summed in the thermal series.
pub const SERIES_MAX_TERMS: usize = 4000;

impl BathThermal {
    pub fn new(beta_hbar_omega: f64) -> Result<Self> {
        if beta_hbar_omega.is_nan() || beta_hbar_omega < 0.0 {
            return Err(Error::InvalidState(format!(
                "βħω must be non-negative, got {beta_hbar_omega}"
            )));
        }
        Ok(Self { beta_hbar_omega })
    }

    pub fn zero_temperature() -> Self {
        Self {
            beta_hbar_omega: f64::INFINITY,
        }
    }

    pub fn beta_hbar_omega(&self) -> f64 {
        self.beta_hbar_omega
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta_hbar_omega == f64::INFINITY
    }

    /// Excited-state population of a thermal qubit, `1/(1 + e^{βħω})`.
    pub fn p_excited(&self) -> f64 {
        1.0 / (1.0 + self.beta_hbar_omega.exp())
    }

    pub fn p_ground(&self) -> f64 {
        1.0 - self.p_excited()
    }

    /// Mean occupation `1/(e^{βħω} - 1)` of a thermal oscillator.
    pub fn mean_occupation(&self) -> f64 {
        1.0 / self.beta_hbar_omega.exp_m1()
    }

    /// Unnormalized Boltzmann factor `e^{-βħω n}`.
    pub fn boltzmann(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            (-self.beta_hbar_omega * n as f64).exp()
        }
    }

    /// Number of bath levels to keep so the first dropped Boltzmann factor
    /// is below [`SERIES_WEIGHT_CUTOFF`], capped at [`SERIES_MAX_TERMS`].
    pub fn series_cutoff(&self) -> usize {
        if self.is_zero_temperature() {
            return 1;
        }
        let needed = (-SERIES_WEIGHT_CUTOFF.ln() / self.beta_hbar_omega).floor() + 1.0;
        if needed.is_finite() && needed < SERIES_MAX_TERMS as f64 {
            needed as usize
        } else {
            SERIES_MAX_TERMS
        }
    }

    /// Normalized oscillator populations on `n_levels` levels, refusing a
    /// truncation that drops a Boltzmann factor above `tail_limit`.
    pub fn oscillator_populations(&self, n_levels: usize, tail_limit: f64) -> Result<Vec<f64>> {
        let first_dropped = self.boltzmann(n_levels);
        if first_dropped >= tail_limit {
            return Err(Error::Truncation(format!(
                "bath at βħω = {} keeps weight {first_dropped:.3e} beyond {n_levels} levels",
                self.beta_hbar_omega
            )));
        }
        let weights: Vec<f64> = (0..n_levels).map(|n| self.boltzmann(n)).collect();
        let z: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / z).collect())
    }
}

impl FromStr for BathThermal {
    type Err = Error;

    /// Accepts a non-negative number or `inf` for zero temperature.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Self::zero_temperature());
        }
        let value: f64 = s
            .parse()
            .map_err(|_| Error::Usage(format!("cannot parse beta {s:?} (use a number or `inf`)")))?;
        Self::new(value).map_err(|e| Error::Usage(e.to_string()))
    }
}

fn unit_interval(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidState(format!("{name} = {value} outside [0, 1]")))
    }
}

fn qubit_state(rho11: f64, rho12: Complex64) -> Result<DensityMatrix> {
    let m = ComplexMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(rho11, 0.0),
            rho12,
            rho12.conj(),
            Complex64::new(1.0 - rho11, 0.0),
        ],
    )?;
    DensityMatrix::new(m)
}

/// The relaxed zero-temperature qubit state `diag(0, 1)`.
pub fn ground_state() -> DensityMatrix {
    DensityMatrix::basis(2, 1).expect("2-level basis state")
}

/// Reduced state of a qubit that exchanged excitations with a thermal bath
/// qubit for an accumulated phase `μ` with `cos²μ = mu_cos2`.
pub fn tls_pair_evolve(r: &BlochVector, bath: &BathThermal, mu_cos2: f64, omega_t: f64) -> Result<DensityMatrix> {
    r.validate()?;
    unit_interval("cos²μ", mu_cos2)?;
    let (pe, pg) = (bath.p_excited(), bath.p_ground());
    let up = 0.5 * (1.0 + r.rz);
    let down = 0.5 * (1.0 - r.rz);
    let sin2 = 1.0 - mu_cos2;
    let rho11 = up * pe + up * pg * mu_cos2 + down * pe * sin2;
    let rho12 = r.r_minus() * 0.5 * Complex64::new(0.0, -omega_t).exp() * mu_cos2.sqrt();
    qubit_state(rho11, rho12)
}

/// Trace distance of [`tls_pair_evolve`] from `diag(0, 1)` with a
/// zero-temperature bath qubit.
pub fn tls_pair_trace_distance(r: &BlochVector, mu_cos2: f64) -> f64 {
    let up = 1.0 + r.rz;
    let perp2 = r.rx * r.rx + r.ry * r.ry;
    0.5 * (up * up * mu_cos2 * mu_cos2 + perp2 * mu_cos2).sqrt()
}

/// Interaction-picture propagator `exp(-iφ(b σ₊ + b† σ₋))` assembled from
/// its operator-block closed form on `C² ⊗ C^dim`.
///
/// Index `q·dim + n` labels `|q, n>` with `q = 0` excited and `q = 1`
/// ground. The block pairing `|e, dim-1>` with the missing `|g, dim>` is
/// cut by the truncation, so the last excited row is not unitary.
pub fn jcm_propagator_closed(phi: f64, trunc: FockTruncation) -> ComplexMatrix {
    let dim = trunc.dim();
    let mut u = ComplexMatrix::zeros(2 * dim, 2 * dim);
    let e = |n: usize| n;
    let g = |n: usize| dim + n;
    let minus_i = Complex64::new(0.0, -1.0);
    for n in 0..dim {
        let rabi_up = phi * ((n + 1) as f64).sqrt();
        u[(e(n), e(n))] = Complex64::new(rabi_up.cos(), 0.0);
        u[(g(n), g(n))] = Complex64::new((phi * (n as f64).sqrt()).cos(), 0.0);
        if n + 1 < dim {
            u[(e(n), g(n + 1))] = minus_i * rabi_up.sin();
            u[(g(n + 1), e(n))] = minus_i * rabi_up.sin();
        }
    }
    u
}

/// Reduced qubit state of the Jaynes-Cummings model with the mode initially
/// thermal, as a Boltzmann-weighted series over `n_max` mode levels.
pub fn jcm_thermal_components(
    r: &BlochVector,
    bath: &BathThermal,
    phi: f64,
    omega_t: f64,
    n_max: usize,
) -> Result<DensityMatrix> {
    r.validate()?;
    if n_max == 0 {
        return Err(Error::Truncation("thermal series needs at least one term".into()));
    }
    let dropped = bath.boltzmann(n_max);
    if dropped >= SERIES_WEIGHT_CUTOFF {
        return Err(Error::Truncation(format!(
            "Boltzmann weight {dropped:.3e} after {n_max} terms exceeds {SERIES_WEIGHT_CUTOFF:e}"
        )));
    }
    let mut z = 0.0;
    let mut stay_excited = 0.0;
    let mut get_excited = 0.0;
    let mut coherence = 0.0;
    for n in 0..n_max {
        let w = bath.boltzmann(n);
        if w == 0.0 {
            break;
        }
        let c_up = (phi * ((n + 1) as f64).sqrt()).cos();
        let c_dn = (phi * (n as f64).sqrt()).cos();
        let s_dn = (phi * (n as f64).sqrt()).sin();
        z += w;
        stay_excited += w * c_up * c_up;
        get_excited += w * s_dn * s_dn;
        coherence += w * c_up * c_dn;
    }
    let rho11 = 0.5 * (1.0 + r.rz) * stay_excited / z + 0.5 * (1.0 - r.rz) * get_excited / z;
    let rho12 = r.r_minus() * 0.5 * Complex64::new(0.0, -omega_t).exp() * (coherence / z);
    qubit_state(rho11, rho12)
}

/// Zero-temperature Jaynes-Cummings state written out directly.
pub fn jcm_zero_temperature_state(r: &BlochVector, phi: f64, omega_t: f64) -> Result<DensityMatrix> {
    r.validate()?;
    let cos_phi = phi.cos();
    let rho11 = 0.5 * (1.0 + r.rz) * cos_phi * cos_phi;
    let rho12 = r.r_minus() * 0.5 * Complex64::new(0.0, -omega_t).exp() * cos_phi;
    qubit_state(rho11, rho12)
}

/// Bloch vector of the zero-temperature Jaynes-Cummings state.
pub fn jcm_bloch(r: &BlochVector, phi: f64, omega_t: f64) -> BlochVector {
    let (c, s) = (phi.cos(), phi.sin());
    let (cw, sw) = (omega_t.cos(), omega_t.sin());
    BlochVector {
        rx: (r.rx * cw - r.ry * sw) * c,
        ry: (r.rx * sw + r.ry * cw) * c,
        rz: r.rz * c * c - s * s,
    }
}

/// Trace distance of the zero-temperature Jaynes-Cummings state from
/// `diag(0, 1)`, given `cos²φ`.
pub fn jcm_trace_distance(r: &BlochVector, phi_cos2: f64) -> f64 {
    let up = 0.5 * (1.0 + r.rz);
    let perp2 = r.rx * r.rx + r.ry * r.ry;
    (up * up * phi_cos2 * phi_cos2 + 0.25 * perp2 * phi_cos2).sqrt()
}

/// Energy in units of `ħω`, `½(ρ₁₁ - ρ₂₂)`.
pub fn tls_energy(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!(
            "qubit energy needs a 2x2 state, got dimension {}",
            rho.dim()
        )));
    }
    Ok(0.5 * (rho.get(0, 0) - rho.get(1, 1)).re)
}

/// Value of `cos φ` at which the zero-temperature distance of `r` meets the
/// distance of the fully excited state, if the two curves meet at all.
pub fn crossing_cos_phi(r: &BlochVector) -> Option<f64> {
    let r_perp = r.r_perp();
    if r_perp == 0.0 {
        return None;
    }
    let denom = 4.0 - (1.0 + r.rz).powi(2);
    if denom <= 0.0 {
        return None;
    }
    let value = r_perp / denom.sqrt();
    (value > 0.0 && value <= 1.0).then_some(value)
}

/// Scaled crossing time `t/t0` under the cavity-mode schedule for a state
/// with `r_z = 0` and transverse length `r_perp`.
pub fn crossing_tau_cavity(r_perp: f64) -> Result<f64> {
    if !(r_perp > 0.0 && r_perp <= 1.0) {
        return Err(Error::InvalidState(format!("r_perp = {r_perp} outside (0, 1]")));
    }
    let argument = 1.0 - 4.0 * FRAC_1_PI * (r_perp / 3f64.sqrt()).acos();
    if !(-1.0..=1.0).contains(&argument) {
        return Err(Error::NoCrossingInWindow(format!(
            "r_perp = {r_perp} gives arccos argument {argument}"
        )));
    }
    Ok(argument.acos() / PI)
}
