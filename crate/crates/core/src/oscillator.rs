//! Damped oscillator relaxing into a zero-temperature bath oscillator.
//!
//! With an excitation-exchanging coupling of accumulated phase `κ(t)` the
//! system mode transforms as `a → e^{-iω₀t}(cos κ · a - i sin κ · b)`.
//! Starting from thermal, coherent or Fock states, the reduced state stays
//! in the same family: thermal with mean `n̄ cos²κ`, coherent with amplitude
//! `α e^{-iω₀t} cos κ`, or a binomial mixture of Fock states.
//!
//! `cos κ` always enters as the non-negative root of `cos²κ`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::linalg::{Checked, DensityMatrix, FockTruncation, TruncationPolicy};

/// Initial state of the system oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialOscState {
    Thermal { nbar: f64 },
    Coherent { alpha: Complex64 },
    Number { n: u32 },
}

impl InitialOscState {
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidState(format!("mean occupation {nbar} must be finite and ≥ 0")));
        }
        Ok(Self::Thermal { nbar })
    }

    pub fn coherent(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidState(format!("coherent amplitude {alpha} is not finite")));
        }
        Ok(Self::Coherent { alpha })
    }

    pub fn number(n: u32) -> Self {
        Self::Number { n }
    }

    /// Initial energy above the ground state in units of `ħω₀`.
    pub fn mean_occupation(&self) -> f64 {
        match *self {
            Self::Thermal { nbar } => nbar,
            Self::Coherent { alpha } => alpha.norm_sqr(),
            Self::Number { n } => n as f64,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for InitialOscState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Thermal { nbar } => write!(f, "thermal:{nbar}"),
            Self::Coherent { alpha } if alpha.im == 0.0 => write!(f, "coherent:{}", alpha.re),
            Self::Coherent { alpha } => write!(f, "coherent:{}{:+}i", alpha.re, alpha.im),
            Self::Number { n } => write!(f, "number:{n}"),
        }
    }
}

impl FromStr for InitialOscState {
    type Err = Error;

    /// Parses `thermal:<n̄>`, `coherent:<α>` (real or `a+bi`) or `number:<N>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("unknown state spec {s:?} (expected thermal:n̄, coherent:α or number:N)"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value = value.trim();
        match kind.trim().to_ascii_lowercase().as_str() {
            "thermal" => {
                let nbar: f64 = value.parse().map_err(|_| bad())?;
                Self::thermal(nbar).map_err(|e| Error::Usage(e.to_string()))
            }
            "coherent" => {
                let alpha: Complex64 = value.parse().map_err(|_| bad())?;
                Self::coherent(alpha).map_err(|e| Error::Usage(e.to_string()))
            }
            "number" | "fock" => Ok(Self::number(value.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

fn check_cos2(cos2: f64) -> Result<()> {
    if (0.0..=1.0).contains(&cos2) {
        Ok(())
    } else {
        Err(Error::InvalidState(format!("cos²κ = {cos2} outside [0, 1]")))
    }
}

/// Binomial probability `C(n, k) p^k (1-p)^{n-k}` through log-gamma.
pub fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let log = ln_binomial(n as u64, k as u64) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();
    log.exp()
}

/// Populations of a thermal state with mean `mean`, levels `0..levels`.
pub fn thermal_populations(mean: f64, levels: usize) -> Vec<f64> {
    let ratio = mean / (mean + 1.0);
    let mut p = 1.0 / (mean + 1.0);
    (0..levels)
        .map(|_| {
            let current = p;
            p *= ratio;
            current
        })
        .collect()
}

/// Amplitudes `e^{-|β|²/2} β^n / √n!` of a coherent state, levels `0..levels`.
pub fn coherent_amplitudes(beta: Complex64, levels: usize) -> Vec<Complex64> {
    let mut amp = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    let mut out = Vec::with_capacity(levels);
    for n in 0..levels {
        out.push(amp);
        amp = amp * beta / ((n + 1) as f64).sqrt();
    }
    out
}

fn renormalized_populations(mut p: Vec<f64>) -> Result<DensityMatrix> {
    let total: f64 = p.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Truncation("no population inside the retained levels".into()));
    }
    p.iter_mut().for_each(|x| *x /= total);
    DensityMatrix::from_populations(&p)
}

/// Reduced oscillator state after a phase with `cos²κ = cos2` and free
/// rotation `ω₀t`, represented on `trunc` levels and renormalized there.
///
/// Fails with [`Error::Truncation`] when the top two levels hold more than
/// [`crate::linalg::EDGE_POPULATION_LIMIT`]; see [`evolve_closed_form_checked`].
pub fn evolve_closed_form(
    state: &InitialOscState,
    cos2: f64,
    omega0_t: f64,
    trunc: FockTruncation,
) -> Result<DensityMatrix> {
    evolve_closed_form_checked(state, cos2, omega0_t, trunc, TruncationPolicy::Strict).map(|c| c.state)
}

pub fn evolve_closed_form_checked(
    state: &InitialOscState,
    cos2: f64,
    omega0_t: f64,
    trunc: FockTruncation,
    policy: TruncationPolicy,
) -> Result<Checked> {
    check_cos2(cos2)?;
    let dim = trunc.dim();
    let rho = match *state {
        InitialOscState::Thermal { nbar } => renormalized_populations(thermal_populations(nbar * cos2, dim))?,
        InitialOscState::Number { n } => {
            renormalized_populations((0..dim).map(|k| binomial_pmf(n, k as u32, cos2)).collect())?
        }
        InitialOscState::Coherent { alpha } => {
            let beta = alpha * Complex64::new(0.0, -omega0_t).exp() * cos2.sqrt();
            DensityMatrix::from_pure(&coherent_amplitudes(beta, dim))?
        }
    };
    Checked::inspect(rho, policy)
}

/// Trace distance between the evolved state and the vacuum.
pub fn trace_distance_closed(state: &InitialOscState, cos2: f64) -> f64 {
    match *state {
        InitialOscState::Thermal { nbar } => {
            let x = nbar * cos2;
            x / (x + 1.0)
        }
        InitialOscState::Coherent { alpha } => (-(-alpha.norm_sqr() * cos2).exp_m1()).sqrt(),
        InitialOscState::Number { n } => 1.0 - (1.0 - cos2).powi(n as i32),
    }
}

/// Hilbert-Schmidt distance between the evolved state and the vacuum.
pub fn hs_distance_closed(state: &InitialOscState, cos2: f64) -> f64 {
    match *state {
        InitialOscState::Coherent { .. } => std::f64::consts::SQRT_2 * trace_distance_closed(state, cos2),
        InitialOscState::Thermal { nbar } => {
            let x = nbar * cos2;
            thermal_hs_ratio(nbar, cos2) * x / (x + 1.0)
        }
        InitialOscState::Number { n } => {
            let vacuum_gap = 1.0 - (1.0 - cos2).powi(n as i32);
            let excited: f64 = (1..=n).map(|k| binomial_pmf(n, k, cos2).powi(2)).sum();
            (excited + vacuum_gap * vacuum_gap).sqrt()
        }
    }
}

/// `D_HS / D_T` for a thermal initial state: `√((2x + 2)/(2x + 1))`, `x = n̄ cos²κ`.
pub fn thermal_hs_ratio(nbar: f64, cos2: f64) -> f64 {
    let x = nbar * cos2;
    ((2.0 * x + 2.0) / (2.0 * x + 1.0)).sqrt()
}
