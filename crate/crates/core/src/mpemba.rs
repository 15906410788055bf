//! Distance trajectories, crossing detection and Mpemba classification.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{trace_distance_closed, InitialOscState};
use crate::schedules::Schedule;
use num_complex::Complex64;

/// Differences with `|Δ|` at or below this are treated as ties.
pub const DEFAULT_CROSSING_TOLERANCE: f64 = 1e-9;

/// A sampled distance-to-equilibrium curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl DistanceSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&times)?;
        if times.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidGrid(format!("distance {bad} is not a non-negative number")));
        }
        Ok(Self {
            label: label.into(),
            times,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Indices `i` where `values[i+1] > values[i] + tol`.
    pub fn local_increases(&self, tol: f64) -> Vec<usize> {
        self.values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0] + tol)
            .map(|(i, _)| i)
            .collect()
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid(format!("grid needs at least 2 points, got {}", grid.len())));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("grid contains a non-finite time".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid is not strictly ascending at index {} ({} then {})",
            i + 1,
            grid[i],
            grid[i + 1]
        )));
    }
    Ok(())
}

/// Evaluates `distance` at every grid point.
pub fn sample_series(distance: impl Fn(f64) -> f64, grid: &[f64], label: impl Into<String>) -> Result<DistanceSeries> {
    check_grid(grid)?;
    let values = grid.iter().map(|&t| distance(t)).collect();
    DistanceSeries::new(label, grid.to_vec(), values)
}

/// Fallible variant of [`sample_series`] evaluated on the rayon pool.
/// Results keep grid order.
pub fn try_sample_series(
    distance: impl Fn(f64) -> Result<f64> + Sync,
    grid: &[f64],
    label: impl Into<String>,
) -> Result<DistanceSeries> {
    check_grid(grid)?;
    let values = grid.par_iter().map(|&t| distance(t)).collect::<Result<Vec<_>>>()?;
    DistanceSeries::new(label, grid.to_vec(), values)
}

/// Crossings between one pair of curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingPair {
    pub label_a: String,
    pub label_b: String,
    pub crossing_times: Vec<f64>,
    /// The curve that started farther away ends up closer.
    pub mpemba: bool,
    /// Both curves start at the same distance (within the tolerance).
    pub degenerate_start: bool,
    pub window: [f64; 2],
}

/// Machine-readable form of a [`CrossingPair`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub pair: [String; 2],
    pub crossings: Vec<f64>,
    pub mpemba: bool,
    pub window: [f64; 2],
}

impl CrossingPair {
    pub fn record(&self) -> CrossingRecord {
        CrossingRecord {
            pair: [self.label_a.clone(), self.label_b.clone()],
            crossings: self.crossing_times.clone(),
            mpemba: self.mpemba,
            window: self.window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CrossingReport {
    pub pairs: Vec<CrossingPair>,
}

impl CrossingReport {
    /// Every unordered pair of `series`, in input order.
    pub fn all_pairs(series: &[DistanceSeries], tol: f64) -> Result<Self> {
        let mut pairs = Vec::new();
        for i in 0..series.len() {
            for j in i + 1..series.len() {
                pairs.extend(detect_crossings(&series[i], &series[j], tol)?.pairs);
            }
        }
        Ok(Self { pairs })
    }

    pub fn records(&self) -> Vec<CrossingRecord> {
        self.pairs.iter().map(CrossingPair::record).collect()
    }
}

fn sign(delta: f64, tol: f64) -> i8 {
    if delta > tol {
        1
    } else if delta < -tol {
        -1
    } else {
        0
    }
}

/// Finds the sign changes of `s1 - s2`.
///
/// Samples with `|Δ| <= tol` are skipped, so a touch without a sign change
/// is not a crossing and a run of ties is collapsed. Each crossing time is
/// interpolated linearly between the bracketing non-tied samples.
pub fn detect_crossings(s1: &DistanceSeries, s2: &DistanceSeries, tol: f64) -> Result<CrossingReport> {
    if s1.times != s2.times {
        return Err(Error::InvalidGrid(format!(
            "series {:?} and {:?} are sampled on different grids",
            s1.label, s2.label
        )));
    }
    check_grid(&s1.times)?;
    let times = &s1.times;
    let delta: Vec<f64> = s1.values.iter().zip(&s2.values).map(|(a, b)| a - b).collect();
    let degenerate_start = sign(delta[0], tol) == 0;

    let mut crossings = Vec::new();
    let mut first_sign = 0;
    let mut last: Option<(usize, i8)> = None;
    for (i, &d) in delta.iter().enumerate() {
        let s = sign(d, tol);
        if s == 0 {
            continue;
        }
        match last {
            None => first_sign = s,
            Some((j, prev)) if prev != s => {
                let (t0, t1) = (times[j], times[i]);
                let (d0, d1) = (delta[j], d);
                crossings.push(t0 + (t1 - t0) * d0 / (d0 - d1));
            }
            _ => {}
        }
        last = Some((i, s));
    }
    let final_sign = last.map_or(0, |(_, s)| s);
    let mpemba = !degenerate_start && first_sign != 0 && final_sign == -first_sign;

    Ok(CrossingReport {
        pairs: vec![CrossingPair {
            label_a: s1.label.clone(),
            label_b: s2.label.clone(),
            crossing_times: crossings,
            mpemba,
            degenerate_start,
            window: [times[0], times[times.len() - 1]],
        }],
    })
}

/// Outcome of one `|α|` in [`alpha_window_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaScanEntry {
    pub alpha: f64,
    pub crossing_count: usize,
    /// The thermal and coherent curves end the window in the opposite order
    /// from how they started.
    pub has_crossing: bool,
}

/// Thermal and coherent trace-distance curves for mean occupation `nbar_a`
/// and amplitude `alpha` on the `grid` of scaled times of `schedule`.
pub fn thermal_coherent_pair(nbar_a: f64, alpha: f64, schedule: &Schedule, grid: &[f64]) -> Result<(DistanceSeries, DistanceSeries)> {
    let thermal = InitialOscState::thermal(nbar_a)?;
    let coherent = InitialOscState::coherent(Complex64::new(alpha, 0.0))?;
    let cos2 = grid
        .iter()
        .map(|&tau| schedule.eval_tau(tau).map(|s| s.cos2))
        .collect::<Result<Vec<_>>>()?;
    let th = DistanceSeries::new(
        thermal.label(),
        grid.to_vec(),
        cos2.iter().map(|&c| trace_distance_closed(&thermal, c)).collect(),
    )?;
    let coh = DistanceSeries::new(
        coherent.label(),
        grid.to_vec(),
        cos2.iter().map(|&c| trace_distance_closed(&coherent, c)).collect(),
    )?;
    Ok((th, coh))
}

/// For each `|α|`, whether the thermal (mean `nbar_a`) and coherent
/// trace-distance curves swap order on the window spanned by `grid`.
///
/// The answer depends on the window. Over an unbounded window the curves
/// swap for every `|α|` below the amplitude at which both start equally far
/// away; a finite window raises the lower edge. Entries are evaluated in
/// parallel and returned in input order.
pub fn alpha_window_scan(
    nbar_a: f64,
    alphas: &[f64],
    schedule: &Schedule,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<AlphaScanEntry>> {
    check_grid(grid)?;
    alphas
        .par_iter()
        .map(|&alpha| {
            let (th, coh) = thermal_coherent_pair(nbar_a, alpha, schedule, grid)?;
            let pair = detect_crossings(&th, &coh, tol)?.pairs.remove(0);
            Ok(AlphaScanEntry {
                alpha,
                crossing_count: pair.crossing_times.len(),
                has_crossing: pair.mpemba,
            })
        })
        .collect()
}

/// Edges of the `|α|` interval in which [`alpha_window_scan`] reports a
/// crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaWindow {
    pub lower: f64,
    pub upper: f64,
}

/// Locates the crossing window inside `[alpha_min, alpha_max]`: a coarse
/// scan over `coarse_points` amplitudes, then bisection of both edges down to
/// `resolution`. Returns `None` when no scanned amplitude crosses.
pub fn alpha_window_edges(
    nbar_a: f64,
    (alpha_min, alpha_max): (f64, f64),
    coarse_points: usize,
    schedule: &Schedule,
    grid: &[f64],
    resolution: f64,
) -> Result<Option<AlphaWindow>> {
    if !(alpha_min < alpha_max) || coarse_points < 2 || !(resolution > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "bad amplitude scan [{alpha_min}, {alpha_max}] with {coarse_points} points"
        )));
    }
    let alphas = crate::schedules::uniform_grid(alpha_min, alpha_max, coarse_points)?;
    let scan = alpha_window_scan(nbar_a, &alphas, schedule, grid, DEFAULT_CROSSING_TOLERANCE)?;
    let Some(first) = scan.iter().position(|e| e.has_crossing) else {
        return Ok(None);
    };
    let last = scan.iter().rposition(|e| e.has_crossing).unwrap_or(first);

    let crosses = |alpha: f64| -> Result<bool> {
        Ok(alpha_window_scan(nbar_a, &[alpha], schedule, grid, DEFAULT_CROSSING_TOLERANCE)?[0].has_crossing)
    };
    let bisect = |mut outside: f64, mut inside: f64| -> Result<f64> {
        while (inside - outside).abs() > resolution {
            let mid = 0.5 * (inside + outside);
            if crosses(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(0.5 * (inside + outside))
    };
    let lower = if first == 0 { alphas[0] } else { bisect(alphas[first - 1], alphas[first])? };
    let upper = if last + 1 == alphas.len() {
        alphas[last]
    } else {
        bisect(alphas[last + 1], alphas[last])?
    };
    Ok(Some(AlphaWindow { lower, upper }))
}
