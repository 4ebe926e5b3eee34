//! One-parameter design studies over joint position and spring stiffness,
//! plus bisection for the non-flipping design point.

use crate::error::{EpjError, Result};
use crate::flight::{self, JumpMetrics};
use crate::model::{DesignParameter, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: DesignParameter,
    /// SI units of the parameter.
    pub lower: f64,
    pub upper: f64,
    pub num_points: usize,
    pub base: Scenario,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(EpjError::invalid(
                "sweep.bounds",
                format!("need lower < upper, got [{}, {}]", self.lower, self.upper),
            ));
        }
        if self.num_points < 2 {
            return Err(EpjError::invalid("sweep.points", "need at least 2 points"));
        }
        self.base.validate()
    }

    /// Inclusive, evenly spaced grid.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.num_points;
        let span = self.upper - self.lower;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.upper
                } else {
                    self.lower + span * (i as f64 / (n - 1) as f64)
                }
            })
            .collect()
    }

    fn scenario_at(&self, value: f64) -> Result<Scenario> {
        self.base.with_parameter(self.parameter, value)
    }

    /// ω_end with the joint working, at one parameter value.
    pub fn omega_end_at(&self, value: f64) -> Result<f64> {
        Ok(flight::evaluate(&self.scenario_at(value)?)?.omega_end)
    }
}

/// Outcome of one grid point; failures keep their cause.
pub type PointOutcome = std::result::Result<JumpMetrics, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCrossing {
    pub bracket: (f64, f64),
    pub root: f64,
    pub abs_omega: f64,
    pub iterations: u32,
    /// `abs_omega` reached the tolerance, as opposed to the bracket collapsing.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: DesignParameter,
    pub grid: Vec<f64>,
    pub metrics: Vec<PointOutcome>,
    pub baseline_metrics: Vec<PointOutcome>,
    pub zero_crossings: Vec<ZeroCrossing>,
}

impl SweepResult {
    pub fn successes(&self) -> impl Iterator<Item = (f64, &JumpMetrics)> {
        self.grid
            .iter()
            .zip(&self.metrics)
            .filter_map(|(&v, m)| m.as_ref().ok().map(|m| (v, m)))
    }
}

fn evaluate_point(spec: &SweepSpec, value: f64) -> (PointOutcome, PointOutcome) {
    let scenario = match spec.scenario_at(value) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let epj = flight::evaluate(&scenario).map_err(|e| e.to_string());
    let rigid = flight::evaluate(&scenario.rigid_baseline()).map_err(|e| e.to_string());
    (epj, rigid)
}

#[cfg(feature = "parallel")]
fn evaluate_grid(spec: &SweepSpec, grid: &[f64]) -> Vec<(PointOutcome, PointOutcome)> {
    use rayon::prelude::*;
    grid.par_iter().map(|&v| evaluate_point(spec, v)).collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_grid(spec: &SweepSpec, grid: &[f64]) -> Vec<(PointOutcome, PointOutcome)> {
    grid.iter().map(|&v| evaluate_point(spec, v)).collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let (metrics, baseline_metrics): (Vec<_>, Vec<_>) =
        evaluate_grid(spec, &grid).into_iter().unzip();

    if metrics.iter().all(|m| m.is_err()) {
        let cause = metrics[0].clone().unwrap_err();
        return Err(EpjError::SweepFailed(cause));
    }

    let mut zero_crossings = Vec::new();
    let ok: Vec<(f64, f64)> = grid
        .iter()
        .zip(&metrics)
        .filter_map(|(&v, m)| m.as_ref().ok().map(|m| (v, m.omega_end)))
        .collect();
    for w in ok.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa == 0.0 {
            zero_crossings.push(ZeroCrossing {
                bracket: (a, b),
                root: a,
                abs_omega: 0.0,
                iterations: 0,
                converged: true,
            });
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            zero_crossings.push(find_zero_crossing(spec, (a, b))?);
        }
    }

    Ok(SweepResult {
        parameter: spec.parameter,
        grid,
        metrics,
        baseline_metrics,
        zero_crossings,
    })
}

/// Plain bisection of `f` on `bracket`; stops when `|f| <= tol` or the
/// interval is narrower than `1e-6` of the starting span.
pub fn bisect(
    mut f: impl FnMut(f64) -> Result<f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<ZeroCrossing> {
    let (mut lo, mut hi) = bracket;
    let (mut f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.abs() <= tol {
        return Ok(ZeroCrossing {
            bracket,
            root: lo,
            abs_omega: f_lo.abs(),
            iterations: 0,
            converged: true,
        });
    }
    if f_hi.abs() <= tol {
        return Ok(ZeroCrossing {
            bracket,
            root: hi,
            abs_omega: f_hi.abs(),
            iterations: 0,
            converged: true,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(EpjError::Bracket {
            lower: lo,
            upper: hi,
            f_lower: f_lo,
            f_upper: f_hi,
        });
    }

    let min_width = 1e-6 * (hi - lo).abs();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() <= tol {
            return Ok(ZeroCrossing {
                bracket,
                root: mid,
                abs_omega: f_mid.abs(),
                iterations,
                converged: true,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < min_width {
            return Ok(ZeroCrossing {
                bracket,
                root: mid,
                abs_omega: f_mid.abs(),
                iterations,
                converged: false,
            });
        }
    }
}

/// Refines the parameter value where ω_end changes sign inside `bracket`.
pub fn find_zero_crossing(spec: &SweepSpec, bracket: (f64, f64)) -> Result<ZeroCrossing> {
    let tol = spec.base.settings.omega_zero_tol;
    bisect(|v| spec.omega_end_at(v), bracket, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    Increasing,
    NonDecreasing,
    Decreasing,
    NonIncreasing,
    NonMonotone,
}

impl Monotonicity {
    pub fn of(values: &[f64]) -> Self {
        let mut up = false;
        let mut down = false;
        let mut flat = false;
        for w in values.windows(2) {
            match w[1].partial_cmp(&w[0]) {
                Some(std::cmp::Ordering::Greater) => up = true,
                Some(std::cmp::Ordering::Less) => down = true,
                _ => flat = true,
            }
        }
        match (up, down, flat) {
            (false, false, _) => Monotonicity::Constant,
            (true, false, false) => Monotonicity::Increasing,
            (true, false, true) => Monotonicity::NonDecreasing,
            (false, true, false) => Monotonicity::Decreasing,
            (false, true, true) => Monotonicity::NonIncreasing,
            (true, true, _) => Monotonicity::NonMonotone,
        }
    }

    pub fn is_monotone(self) -> bool {
        self != Monotonicity::NonMonotone
    }

    pub fn non_decreasing(self) -> bool {
        matches!(
            self,
            Monotonicity::Constant | Monotonicity::Increasing | Monotonicity::NonDecreasing
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Monotonicity::Constant => "constant",
            Monotonicity::Increasing => "increasing",
            Monotonicity::NonDecreasing => "non-decreasing",
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::NonIncreasing => "non-increasing",
            Monotonicity::NonMonotone => "non-monotone",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTrend {
    pub name: &'static str,
    pub monotonicity: Monotonicity,
    pub min: f64,
    pub max: f64,
}

/// Direction of the flip transition as the parameter grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipTransition {
    /// ω_end goes from negative (forward flip) to positive.
    ForwardToBackward,
    BackwardToForward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendVerdict {
    pub omega_monotone: bool,
    pub sign_changes: usize,
    pub transition: Option<FlipTransition>,
    pub apex_below_baseline: bool,
    pub distance_non_decreasing: bool,
    pub failed_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub parameter: DesignParameter,
    pub series: Vec<SeriesTrend>,
    /// Grid cells `(i, i + 1)` where ω_end changes sign.
    pub sign_change_cells: Vec<(f64, f64)>,
    pub verdict: TrendVerdict,
}

impl TrendReport {
    pub fn series(&self, name: &str) -> Option<&SeriesTrend> {
        self.series.iter().find(|s| s.name == name)
    }
}

fn series(name: &'static str, values: &[f64]) -> SeriesTrend {
    SeriesTrend {
        name,
        monotonicity: Monotonicity::of(values),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Summarizes a sweep over its successful points. Needs at least three.
pub fn trend_report(result: &SweepResult) -> Result<TrendReport> {
    let points: Vec<(f64, &JumpMetrics, Option<&JumpMetrics>)> = result
        .grid
        .iter()
        .zip(result.metrics.iter().zip(&result.baseline_metrics))
        .filter_map(|(&v, (m, b))| m.as_ref().ok().map(|m| (v, m, b.as_ref().ok())))
        .collect();
    if points.len() < 3 {
        return Err(EpjError::invalid(
            "sweep",
            format!(
                "trend report needs >= 3 successful points, got {}",
                points.len()
            ),
        ));
    }

    let pick = |f: fn(&JumpMetrics) -> f64| points.iter().map(|p| f(p.1)).collect::<Vec<_>>();
    let omega = pick(|m| m.omega_end);
    let apex = pick(|m| m.apex_height);
    let distance = pick(|m| m.landing_distance);
    let corrected = pick(|m| m.corrected_distance);
    let baseline: Vec<&JumpMetrics> = points.iter().filter_map(|p| p.2).collect();
    let base_omega: Vec<f64> = baseline.iter().map(|m| m.omega_end).collect();
    let base_apex: Vec<f64> = baseline.iter().map(|m| m.apex_height).collect();
    let base_distance: Vec<f64> = baseline.iter().map(|m| m.landing_distance).collect();

    let sign_change_cells: Vec<(f64, f64)> = points
        .windows(2)
        .filter(|w| (w[0].1.omega_end < 0.0) != (w[1].1.omega_end < 0.0))
        .map(|w| (w[0].0, w[1].0))
        .collect();
    let transition = match (omega.first(), omega.last()) {
        (Some(&a), Some(&b)) if a < 0.0 && b > 0.0 => Some(FlipTransition::ForwardToBackward),
        (Some(&a), Some(&b)) if a > 0.0 && b < 0.0 => Some(FlipTransition::BackwardToForward),
        _ => None,
    };
    let apex_below_baseline = points.iter().all(|p| match p.2 {
        Some(b) => p.1.apex_height <= b.apex_height,
        None => false,
    });

    let series = vec![
        series("omega_end", &omega),
        series("apex_m", &apex),
        series("distance_m", &distance),
        series("distance_corrected_m", &corrected),
        series("baseline_omega_end", &base_omega),
        series("baseline_apex_m", &base_apex),
        series("baseline_distance_m", &base_distance),
    ];
    let verdict = TrendVerdict {
        omega_monotone: series[0].monotonicity.is_monotone(),
        sign_changes: sign_change_cells.len(),
        transition,
        apex_below_baseline,
        distance_non_decreasing: series[2].monotonicity.non_decreasing(),
        failed_points: result.grid.len() - points.len(),
    };
    Ok(TrendReport {
        parameter: result.parameter,
        series,
        sign_change_cells,
        verdict,
    })
}
