use std::fmt::Write as _;

use epj_core::export::{metrics_row, sig9, METRICS_HEADER};
use epj_core::sweep::{FlipTransition, TrendReport, ZeroCrossing};
use epj_core::{DesignParameter, JumpMetrics, Scenario};

/// Published jump for the original robot; shown beside our numbers only.
pub struct ReferenceValues {
    pub omega_epj: f64,
    pub omega_rigid: f64,
    pub apex_epj_cm: f64,
    pub apex_rigid_cm: f64,
    pub distance_epj_m: f64,
    pub distance_rigid_m: f64,
}

pub const REFERENCE_VALUES: ReferenceValues = ReferenceValues {
    omega_epj: -0.37,
    omega_rigid: -3.46,
    apex_epj_cm: 49.29,
    apex_rigid_cm: 49.68,
    distance_epj_m: 1.50,
    distance_rigid_m: 1.46,
};

pub struct ComparisonReport {
    pub with_epj: JumpMetrics,
    pub without_epj: JumpMetrics,
    /// `1 - |ω_epj| / |ω_rigid|`; undefined when the rigid robot does not spin.
    pub omega_reduction_ratio: Option<f64>,
    pub reference: ReferenceValues,
}

impl ComparisonReport {
    pub fn new(with_epj: JumpMetrics, without_epj: JumpMetrics) -> Self {
        let rigid = without_epj.omega_end.abs();
        let omega_reduction_ratio = (rigid != 0.0).then(|| 1.0 - with_epj.omega_end.abs() / rigid);
        ComparisonReport {
            with_epj,
            without_epj,
            omega_reduction_ratio,
            reference: REFERENCE_VALUES,
        }
    }

    pub fn human(&self) -> String {
        let (a, b) = (&self.with_epj, &self.without_epj);
        let mut out = String::new();
        let _ = writeln!(out, "{:<26}{:>16}{:>16}", "", "with joint", "rigid");
        let mut row = |label: &str, x: String, y: String| {
            let _ = writeln!(out, "{label:<26}{x:>16}{y:>16}");
        };
        row("omega_end [rad/s]", sig9(a.omega_end), sig9(b.omega_end));
        row("apex [m]", sig9(a.apex_height), sig9(b.apex_height));
        row(
            "distance [m]",
            sig9(a.landing_distance),
            sig9(b.landing_distance),
        );
        row(
            "corrected distance [m]",
            sig9(a.corrected_distance),
            sig9(b.corrected_distance),
        );
        row("flight time [s]", sig9(a.flight_time), sig9(b.flight_time));
        row(
            "relock after [s]",
            a.relock_time.map(sig9).unwrap_or_else(|| "-".into()),
            b.relock_time.map(sig9).unwrap_or_else(|| "-".into()),
        );
        row("net flip [rad]", sig9(a.flip_angle), sig9(b.flip_angle));
        let ratio = self
            .omega_reduction_ratio
            .map(sig9)
            .unwrap_or_else(|| "undefined (rigid omega is 0)".into());
        let _ = writeln!(out, "omega_reduction_ratio: {ratio}");
        let r = &self.reference;
        let _ = writeln!(
            out,
            "reference (paper-reported, not expected to match): omega_end {} vs {} rad/s, apex {} vs {} cm, distance {:.2} vs {:.2} m",
            r.omega_epj, r.omega_rigid, r.apex_epj_cm, r.apex_rigid_cm, r.distance_epj_m, r.distance_rigid_m
        );
        out
    }

    pub fn csv(&self, with: &Scenario, without: &Scenario) -> String {
        let ratio = self.omega_reduction_ratio.map(sig9).unwrap_or_default();
        format!(
            "{METRICS_HEADER}\n{}\n{}\n#omega_reduction_ratio,{ratio}\n",
            metrics_row("with_epj", with, &self.with_epj),
            metrics_row("without_epj", without, &self.without_epj),
        )
    }
}

pub fn summary_line(m: &JumpMetrics) -> String {
    format!(
        "omega_end={} apex_m={} distance_m={} distance_corrected_m={} flight_s={} relock_s={}",
        sig9(m.omega_end),
        sig9(m.apex_height),
        sig9(m.landing_distance),
        sig9(m.corrected_distance),
        sig9(m.flight_time),
        m.relock_time.map(sig9).unwrap_or_else(|| "-".into())
    )
}

fn unit(p: DesignParameter) -> &'static str {
    match p {
        DesignParameter::Stiffness => "N/m",
        _ => "mm",
    }
}

pub fn trend_text(report: &TrendReport) -> String {
    let p = report.parameter;
    let scale = p.display_scale();
    let mut out = String::new();
    for s in &report.series {
        let _ = writeln!(
            out,
            "{}: {} over [{}, {}]",
            s.name,
            s.monotonicity.as_str(),
            sig9(s.min),
            sig9(s.max)
        );
    }
    for (lo, hi) in &report.sign_change_cells {
        let _ = writeln!(
            out,
            "omega_end changes sign in [{}, {}] {}",
            sig9(lo * scale),
            sig9(hi * scale),
            unit(p)
        );
    }
    let v = &report.verdict;
    let transition = match v.transition {
        Some(FlipTransition::ForwardToBackward) => "forward_to_backward",
        Some(FlipTransition::BackwardToForward) => "backward_to_forward",
        None => "none",
    };
    let _ = writeln!(
        out,
        "verdict: omega_monotone={} sign_changes={} transition={} apex_below_baseline={} distance_non_decreasing={} failed_points={}",
        v.omega_monotone,
        v.sign_changes,
        transition,
        v.apex_below_baseline,
        v.distance_non_decreasing,
        v.failed_points
    );
    out
}

pub fn root_text(p: DesignParameter, z: &ZeroCrossing) -> String {
    let scale = p.display_scale();
    format!(
        "{} = {} {} (|omega_end| = {} rad/s, {} iterations, converged={}, bracket [{}, {}])",
        p.name(),
        sig9(z.root * scale),
        unit(p),
        sig9(z.abs_omega),
        z.iterations,
        z.converged,
        sig9(z.bracket.0 * scale),
        sig9(z.bracket.1 * scale)
    )
}

pub const ROOT_HEADER: &str = "param_name,lower,upper,root,abs_omega,iterations,converged";

pub fn root_csv(p: DesignParameter, z: &ZeroCrossing) -> String {
    let scale = p.display_scale();
    format!(
        "{ROOT_HEADER}\n{},{},{},{},{},{},{}\n",
        p.name(),
        sig9(z.bracket.0 * scale),
        sig9(z.bracket.1 * scale),
        sig9(z.root * scale),
        sig9(z.abs_omega),
        z.iterations,
        z.converged
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(omega: f64) -> JumpMetrics {
        JumpMetrics {
            omega_end: omega,
            apex_height: 0.5,
            landing_distance: 1.5,
            corrected_distance: 1.5,
            flight_time: 0.6,
            relock_time: None,
            flip_angle: 0.0,
        }
    }

    #[test]
    fn reduction_ratio() {
        let r = ComparisonReport::new(metrics(-0.346), metrics(-3.46));
        assert!((r.omega_reduction_ratio.unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(
            ComparisonReport::new(metrics(-2.0), metrics(-2.0)).omega_reduction_ratio,
            Some(0.0)
        );
        assert_eq!(
            ComparisonReport::new(metrics(1.0), metrics(0.0)).omega_reduction_ratio,
            None
        );
    }

    #[test]
    fn reference_values_are_labelled() {
        let text = ComparisonReport::new(metrics(-0.3), metrics(-3.0)).human();
        assert!(text.contains("paper-reported, not expected to match"));
        assert!(text.contains("-0.37 vs -3.46"));
    }
}
