//! Plot-ready CSV writers. Numbers use nine significant digits (`%.9g`).

use std::fmt::Write as _;

use crate::dynamics::AerialTrajectory;
use crate::error::Result;
use crate::flight::{self, JumpMetrics};
use crate::model::{LatchMode, Scenario};
use crate::spring;
use crate::sweep::SweepResult;

pub const TRAJECTORY_HEADER: &str =
    "t,theta_a,theta_b,omega_a,omega_b,phi,latch,com_x,com_y,energy";
pub const METRICS_HEADER: &str = "scenario_id,epj,k,joint_x_mm,joint_y_mm,omega_end,apex_m,distance_m,distance_corrected_m,flight_s,relock_s";
pub const SWEEP_HEADER: &str =
    "param_name,param_value,omega_end,apex_m,distance_m,distance_corrected_m,status";

/// C-style `%.9g`.
pub fn sig9(v: f64) -> String {
    const PRECISION: i32 = 9;
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Energy bookkeeping for one sample, whatever the latch state.
pub fn sample_energy(state: &crate::dynamics::AerialState, scenario: &Scenario) -> Result<f64> {
    let mp = &scenario.mass_properties;
    match state.latch {
        LatchMode::Open => crate::dynamics::open_phase_energy(state, scenario),
        LatchMode::Relocked => Ok(0.5 * mp.total_inertia() * state.omega_a * state.omega_a
            + spring::potential_energy(&scenario.spring_geometry(), state.phi)?),
        LatchMode::Locked => Ok(0.5 * mp.total_inertia() * state.omega_a * state.omega_a),
    }
}

pub fn trajectory_csv(traj: &AerialTrajectory, scenario: &Scenario) -> Result<String> {
    let g = scenario.settings.gravity;
    let mut out = String::with_capacity(traj.samples.len() * 120);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let com = flight::ballistic_state(&traj.launch, g, s.t - traj.launch.t0);
        let energy = sample_energy(s, scenario)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            sig9(s.t),
            sig9(s.theta_a),
            sig9(s.theta_b),
            sig9(s.omega_a),
            sig9(s.omega_b),
            sig9(s.phi),
            s.latch.as_str(),
            sig9(com.x),
            sig9(com.y),
            sig9(energy)
        );
    }
    Ok(out)
}

pub fn metrics_row(id: &str, scenario: &Scenario, m: &JumpMetrics) -> String {
    let j = &scenario.joint_design;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        id,
        scenario.epj_enabled,
        sig9(j.stiffness),
        sig9(j.joint_x * 1000.0),
        sig9(j.joint_y * 1000.0),
        sig9(m.omega_end),
        sig9(m.apex_height),
        sig9(m.landing_distance),
        sig9(m.corrected_distance),
        sig9(m.flight_time),
        m.relock_time.map(sig9).unwrap_or_default()
    )
}

fn metric_fields(m: &JumpMetrics) -> String {
    format!(
        "{},{},{},{}",
        sig9(m.omega_end),
        sig9(m.apex_height),
        sig9(m.landing_distance),
        sig9(m.corrected_distance)
    )
}

/// Sweep table, parameter values in display units (mm or N/m), with the
/// rigid baseline and every refined zero crossing as `#` footer lines.
pub fn sweep_csv(result: &SweepResult) -> String {
    let name = result.parameter.name();
    let scale = result.parameter.display_scale();
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for (v, m) in result.grid.iter().zip(&result.metrics) {
        match m {
            Ok(m) => {
                let _ = writeln!(out, "{name},{},{},ok", sig9(v * scale), metric_fields(m));
            }
            Err(e) => {
                let cause = e.replace([',', '\n'], ";");
                let _ = writeln!(out, "{name},{},,,,,failed: {cause}", sig9(v * scale));
            }
        }
    }
    if let Some(b) = result.baseline_metrics.iter().find_map(|b| b.as_ref().ok()) {
        let _ = writeln!(out, "#baseline,{}", metric_fields(b));
    }
    for z in &result.zero_crossings {
        let _ = writeln!(
            out,
            "#root,{name},{},{},{},{},{},{}",
            sig9(z.bracket.0 * scale),
            sig9(z.bracket.1 * scale),
            sig9(z.root * scale),
            sig9(z.abs_omega),
            z.iterations,
            z.converged
        );
    }
    out
}
