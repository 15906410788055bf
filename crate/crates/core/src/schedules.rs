//! Coupling schedules: accumulated interaction phases `∫ g(t') dt'`.
//!
//! Every closed form in this crate depends on the phase only through
//! `cos²` of it, so each schedule reports both the phase and its `cos²`.
//! The two decay schedules are defined directly through their `cos²`
//! profile; their phase is reported as `arccos(√cos²) ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `cos²κ(t) = e^{-γt}`
    ExpDecay { gamma: f64 },
    /// `cos²κ(t) = sin²((π/2) e^{-γt})`
    SinExpDecay { gamma: f64 },
    /// Linear ramp coupling `πt/t0²` switched off at `t0`; phase `(π/2)(t/t0)²`.
    Ramp { t0: f64 },
    /// Half-sine cavity mode profile switched off at `t0`; phase `(π/4)(1 - cos(πt/t0))`.
    CavityMode { t0: f64 },
    /// User-supplied `cos²` samples, linearly interpolated.
    Tabulated(TabulatedProfile),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleSample {
    pub t: f64,
    pub cos2: f64,
    pub phase: f64,
}

impl ScheduleSample {
    fn from_cos2(t: f64, cos2: f64) -> Self {
        let cos2 = cos2.clamp(0.0, 1.0);
        Self {
            t,
            cos2,
            phase: cos2.sqrt().acos(),
        }
    }

    fn from_phase(t: f64, phase: f64) -> Self {
        Self {
            t,
            cos2: phase.cos().powi(2).clamp(0.0, 1.0),
            phase,
        }
    }
}

impl Schedule {
    pub fn exp_decay(gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(Self::ExpDecay { gamma })
    }

    pub fn sin_exp_decay(gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(Self::SinExpDecay { gamma })
    }

    pub fn ramp(t0: f64) -> Result<Self> {
        positive("t0", t0)?;
        Ok(Self::Ramp { t0 })
    }

    pub fn cavity_mode(t0: f64) -> Result<Self> {
        positive("t0", t0)?;
        Ok(Self::CavityMode { t0 })
    }

    pub fn eval(&self, t: f64) -> Result<ScheduleSample> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidTime(t));
        }
        let sample = match *self {
            Self::ExpDecay { gamma } => ScheduleSample::from_cos2(t, (-gamma * t).exp()),
            Self::SinExpDecay { gamma } => {
                // cos²κ = sin²((π/2)e^{-γt})  ⇔  κ = (π/2)(1 - e^{-γt})
                let kappa = FRAC_PI_2 * (1.0 - (-gamma * t).exp());
                ScheduleSample {
                    t,
                    cos2: (FRAC_PI_2 * (-gamma * t).exp()).sin().powi(2),
                    phase: kappa,
                }
            }
            Self::Ramp { t0 } => {
                let phase = if t <= t0 { FRAC_PI_2 * (t / t0).powi(2) } else { FRAC_PI_2 };
                ScheduleSample::from_phase(t, phase)
            }
            Self::CavityMode { t0 } => {
                let phase = if t <= t0 {
                    FRAC_PI_4 * (1.0 - (PI * t / t0).cos())
                } else {
                    FRAC_PI_2
                };
                ScheduleSample::from_phase(t, phase)
            }
            Self::Tabulated(ref table) => ScheduleSample::from_cos2(t, table.interpolate(t)),
        };
        Ok(sample)
    }

    /// Conversion factor from the dimensionless time τ to physical time:
    /// `1/γ` for the decays, `t0` for the switched couplings.
    pub fn time_scale(&self) -> f64 {
        match *self {
            Self::ExpDecay { gamma } | Self::SinExpDecay { gamma } => 1.0 / gamma,
            Self::Ramp { t0 } | Self::CavityMode { t0 } => t0,
            Self::Tabulated(_) => 1.0,
        }
    }

    pub fn time_from_tau(&self, tau: f64) -> f64 {
        tau * self.time_scale()
    }

    /// Evaluates at dimensionless time τ.
    pub fn eval_tau(&self, tau: f64) -> Result<ScheduleSample> {
        self.eval(self.time_from_tau(tau))
    }

    /// Default end of the sampling window in units of τ.
    pub fn default_tau_max(&self) -> f64 {
        match self {
            Self::ExpDecay { .. } | Self::SinExpDecay { .. } => 6.0,
            Self::Ramp { .. } | Self::CavityMode { .. } => 2.0,
            Self::Tabulated(table) => *table.times.last().expect("validated non-empty"),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::ExpDecay { .. } => "exp",
            Self::SinExpDecay { .. } => "sinexp",
            Self::Ramp { .. } => "ramp",
            Self::CavityMode { .. } => "cavity",
            Self::Tabulated(_) => "tabulated",
        }
    }

    /// Named parameters, for provenance records.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::ExpDecay { gamma } | Self::SinExpDecay { gamma } => vec![("gamma", gamma)],
            Self::Ramp { t0 } | Self::CavityMode { t0 } => vec![("t0", t0)],
            Self::Tabulated(ref table) => vec![("points", table.times.len() as f64)],
        }
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!("{name} must be positive, got {value}")))
    }
}

/// Tabulated `cos²` profile on a strictly ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    times: Vec<f64>,
    cos2: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(times: Vec<f64>, cos2: Vec<f64>) -> Result<Self> {
        if times.len() != cos2.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} times but {} cos² values",
                times.len(),
                cos2.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidSchedule("need at least two samples".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSchedule("times must be finite and strictly ascending".into()));
        }
        if let Some(bad) = cos2.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::InvalidSchedule(format!("cos² value {bad} outside [0, 1]")));
        }
        Ok(Self { times, cos2 })
    }

    /// Reads two-column `t,cos2` CSV. A header row is detected and skipped
    /// when its first field is not a number.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut times = Vec::new();
        let mut cos2 = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidSchedule(format!(
                    "row {}: expected 2 columns, found {}",
                    row + 1,
                    record.len()
                )));
            }
            let t = record[0].parse::<f64>();
            let c = record[1].parse::<f64>();
            match (t, c) {
                (Ok(t), Ok(c)) => {
                    times.push(t);
                    cos2.push(c);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::InvalidSchedule(format!(
                        "row {}: cannot parse {:?}",
                        row + 1,
                        record.iter().collect::<Vec<_>>()
                    )))
                }
            }
        }
        Self::new(times, cos2)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.cos2[0];
        }
        if t >= self.times[n - 1] {
            return self.cos2[n - 1];
        }
        let hi = self.times.partition_point(|&x| x <= t);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        self.cos2[lo] + w * (self.cos2[hi] - self.cos2[lo])
    }
}

/// `points` equally spaced values on `[start, end]`, both ends included.
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(end > start) || !start.is_finite() || !end.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points on a non-empty interval, got {points} on [{start}, {end}]"
        )));
    }
    let step = (end - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i == points - 1 { end } else { start + step * i as f64 })
        .collect())
}

/// Default number of samples per trajectory.
pub const DEFAULT_GRID_POINTS: usize = 1001;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_decay_starts_at_one() {
        let s = Schedule::exp_decay(1.0).unwrap().eval(0.0).unwrap();
        assert_eq!(s.cos2, 1.0);
        assert_eq!(s.phase, 0.0);
    }

    #[test]
    fn ramp_reaches_half_pi_at_t0() {
        let s = Schedule::ramp(1.0).unwrap().eval(1.0).unwrap();
        assert!((s.phase - FRAC_PI_2).abs() < 1e-15);
        assert!(s.cos2 < 1e-30);
    }

    #[test]
    fn cavity_mode_midpoint() {
        let s = Schedule::cavity_mode(1.0).unwrap().eval(0.5).unwrap();
        assert!((s.phase - FRAC_PI_4).abs() < 1e-15);
        assert!((s.cos2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sin_exp_decay_relaxes() {
        let sched = Schedule::sin_exp_decay(1.0).unwrap();
        assert!((sched.eval(0.0).unwrap().cos2 - 1.0).abs() < 1e-15);
        assert!(sched.eval(60.0).unwrap().cos2 < 1e-24);
        let s = sched.eval(0.8).unwrap();
        assert!((s.phase.cos().powi(2) - s.cos2).abs() < 1e-12);
    }

    #[test]
    fn switched_couplings_are_constant_afterwards() {
        for sched in [Schedule::ramp(2.0).unwrap(), Schedule::cavity_mode(2.0).unwrap()] {
            for t in [2.0 + 1e-9, 3.0, 50.0] {
                assert_eq!(sched.eval(t).unwrap().phase, FRAC_PI_2);
            }
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        let sched = Schedule::exp_decay(1.0).unwrap();
        assert!(matches!(sched.eval(-0.1), Err(Error::InvalidTime(_))));
        assert!(sched.eval(f64::NAN).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(Schedule::exp_decay(0.0).is_err());
        assert!(Schedule::ramp(-1.0).is_err());
        assert!(Schedule::cavity_mode(f64::INFINITY).is_err());
    }

    #[test]
    fn cavity_phase_is_flat_at_both_ends() {
        let sched = Schedule::cavity_mode(1.0).unwrap();
        let h = 1e-6;
        let phase = |t: f64| sched.eval(t).unwrap().phase;
        let d0 = (phase(h) - phase(0.0)) / h;
        let d1 = (phase(1.0) - phase(1.0 - h)) / h;
        assert!(d0.abs() < 1e-5 && d1.abs() < 1e-5, "{d0} {d1}");
        // interior slope is the coupling (π²/4t0) sin(πt/t0)
        let mid = (phase(0.5 + h) - phase(0.5 - h)) / (2.0 * h);
        assert!((mid - PI * PI / 4.0).abs() < 1e-6);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let table = TabulatedProfile::new(vec![0.0, 1.0, 3.0], vec![1.0, 0.5, 0.0]).unwrap();
        let sched = Schedule::Tabulated(table);
        assert!((sched.eval(0.5).unwrap().cos2 - 0.75).abs() < 1e-15);
        assert!((sched.eval(2.0).unwrap().cos2 - 0.25).abs() < 1e-15);
        assert_eq!(sched.eval(10.0).unwrap().cos2, 0.0);
        assert_eq!(sched.default_tau_max(), 3.0);
    }

    #[test]
    fn tabulated_validation() {
        assert!(TabulatedProfile::new(vec![0.0], vec![1.0]).is_err());
        assert!(TabulatedProfile::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TabulatedProfile::new(vec![0.0, 1.0], vec![1.0, 1.5]).is_err());
        assert!(TabulatedProfile::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn tabulated_csv_with_and_without_header() {
        let with = "t,cos2\n0,1\n1,0.5\n2,0.25\n";
        let without = "0,1\n1,0.5\n2,0.25\n";
        let a = TabulatedProfile::from_csv_reader(with.as_bytes()).unwrap();
        let b = TabulatedProfile::from_csv_reader(without.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.times(), &[0.0, 1.0, 2.0]);
        assert!(TabulatedProfile::from_csv_reader("0,1\n1,x\n".as_bytes()).is_err());
        assert!(TabulatedProfile::from_csv_reader("0,1\n0.5,0.5\n0.4,0.2\n".as_bytes()).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(0.0, 2.0, 1001).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1000], 2.0);
        assert!((g[500] - 1.0).abs() < 1e-15);
        assert!(uniform_grid(0.0, 1.0, 1).is_err());
        assert!(uniform_grid(1.0, 1.0, 5).is_err());
    }
}
