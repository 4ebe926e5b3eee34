//! Browser front end: fly one jump, sweep a design parameter, or search for
//! the non-spinning design. Each export wraps a plain function so the logic
//! can be tested off the browser.

use epj_core::dynamics::simulate_aerial;
use epj_core::sweep::{find_zero_crossing, trend_report};
use epj_core::{
    default_reference_scenario, evaluate, run_sweep, DesignParameter, EpjError, Scenario, SweepSpec,
};
use wasm_bindgen::prelude::*;

/// Most samples handed to the page per flight.
const MAX_PLOT_SAMPLES: usize = 1500;

/// Reference robot with the three design knobs applied (N/m, mm, mm).
fn design(stiffness: f64, joint_x_mm: f64, joint_y_mm: f64) -> Result<Scenario, EpjError> {
    default_reference_scenario()
        .with_joint_position(joint_x_mm / 1000.0, joint_y_mm / 1000.0)?
        .with_stiffness(stiffness)
}

fn parameter(name: &str) -> Result<DesignParameter, String> {
    DesignParameter::parse(name).ok_or_else(|| format!("unknown parameter `{name}`"))
}

#[wasm_bindgen]
pub struct Flight {
    t: Vec<f64>,
    omega_a: Vec<f64>,
    omega_b: Vec<f64>,
    phi: Vec<f64>,
    com_x: Vec<f64>,
    com_y: Vec<f64>,
    attitude: Vec<f64>,
    omega_end: f64,
    rigid_omega: f64,
    apex: f64,
    rigid_apex: f64,
    distance: f64,
    relock_time: f64,
}

#[wasm_bindgen]
impl Flight {
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    pub fn omega_a(&self) -> Vec<f64> {
        self.omega_a.clone()
    }
    pub fn omega_b(&self) -> Vec<f64> {
        self.omega_b.clone()
    }
    pub fn phi(&self) -> Vec<f64> {
        self.phi.clone()
    }
    pub fn com_x(&self) -> Vec<f64> {
        self.com_x.clone()
    }
    pub fn com_y(&self) -> Vec<f64> {
        self.com_y.clone()
    }
    /// Body attitude relative to take-off, rad.
    pub fn attitude(&self) -> Vec<f64> {
        self.attitude.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn omega_end(&self) -> f64 {
        self.omega_end
    }
    #[wasm_bindgen(getter)]
    pub fn rigid_omega(&self) -> f64 {
        self.rigid_omega
    }
    #[wasm_bindgen(getter)]
    pub fn apex(&self) -> f64 {
        self.apex
    }
    #[wasm_bindgen(getter)]
    pub fn rigid_apex(&self) -> f64 {
        self.rigid_apex
    }
    #[wasm_bindgen(getter)]
    pub fn distance(&self) -> f64 {
        self.distance
    }
    #[wasm_bindgen(getter)]
    pub fn relock_time(&self) -> f64 {
        self.relock_time
    }
}

pub fn fly_design(stiffness: f64, joint_x_mm: f64, joint_y_mm: f64) -> Result<Flight, String> {
    let s = design(stiffness, joint_x_mm, joint_y_mm).map_err(|e| e.to_string())?;
    let traj = simulate_aerial(&s).map_err(|e| e.to_string())?;
    let m = evaluate(&s).map_err(|e| e.to_string())?;
    let rigid = evaluate(&s.rigid_baseline()).map_err(|e| e.to_string())?;

    let stride = traj.samples.len().div_ceil(MAX_PLOT_SAMPLES).max(1);
    let last = traj.samples.len() - 1;
    let picked: Vec<_> = traj
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, st)| st)
        .collect();
    let g = s.settings.gravity;
    let start = traj.samples[0];
    let mp = s.mass_properties;
    let j = mp.inertia_a + mp.inertia_b;
    let mut f = Flight {
        t: Vec::with_capacity(picked.len()),
        omega_a: Vec::with_capacity(picked.len()),
        omega_b: Vec::with_capacity(picked.len()),
        phi: Vec::with_capacity(picked.len()),
        com_x: Vec::with_capacity(picked.len()),
        com_y: Vec::with_capacity(picked.len()),
        attitude: Vec::with_capacity(picked.len()),
        omega_end: m.omega_end,
        rigid_omega: rigid.omega_end,
        apex: m.apex_height,
        rigid_apex: rigid.apex_height,
        distance: m.landing_distance,
        relock_time: m.relock_time.unwrap_or(f64::NAN),
    };
    for st in picked {
        let com = epj_core::flight::ballistic_state(&traj.launch, g, st.t - traj.launch.t0);
        f.t.push(st.t);
        f.omega_a.push(st.omega_a);
        f.omega_b.push(st.omega_b);
        f.phi.push(st.phi);
        f.com_x.push(com.x);
        f.com_y.push(com.y);
        f.attitude.push(
            (mp.inertia_a * (st.theta_a - start.theta_a)
                + mp.inertia_b * (st.theta_b - start.theta_b))
                / j,
        );
    }
    Ok(f)
}

#[wasm_bindgen]
pub struct SweepCurve {
    values: Vec<f64>,
    omega_end: Vec<f64>,
    apex: Vec<f64>,
    distance: Vec<f64>,
    roots: Vec<f64>,
    rigid_omega: f64,
    rigid_apex: f64,
    verdict: String,
}

#[wasm_bindgen]
impl SweepCurve {
    /// Parameter values in display units; failed points carry NaN metrics.
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
    pub fn omega_end(&self) -> Vec<f64> {
        self.omega_end.clone()
    }
    pub fn apex(&self) -> Vec<f64> {
        self.apex.clone()
    }
    pub fn distance(&self) -> Vec<f64> {
        self.distance.clone()
    }
    pub fn roots(&self) -> Vec<f64> {
        self.roots.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rigid_omega(&self) -> f64 {
        self.rigid_omega
    }
    #[wasm_bindgen(getter)]
    pub fn rigid_apex(&self) -> f64 {
        self.rigid_apex
    }
    #[wasm_bindgen(getter)]
    pub fn verdict(&self) -> String {
        self.verdict.clone()
    }
}

/// Sweeps `name` over `[lower, upper]` (display units) around the design.
pub fn sweep_design(
    name: &str,
    lower: f64,
    upper: f64,
    points: usize,
    stiffness: f64,
    joint_x_mm: f64,
    joint_y_mm: f64,
) -> Result<SweepCurve, String> {
    let p = parameter(name)?;
    let scale = p.display_scale();
    let spec = SweepSpec {
        parameter: p,
        lower: lower / scale,
        upper: upper / scale,
        num_points: points,
        base: design(stiffness, joint_x_mm, joint_y_mm).map_err(|e| e.to_string())?,
    };
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    let pick = |f: fn(&epj_core::JumpMetrics) -> f64| {
        result
            .metrics
            .iter()
            .map(|m| m.as_ref().map(f).unwrap_or(f64::NAN))
            .collect::<Vec<_>>()
    };
    let baseline = result.baseline_metrics.iter().find_map(|b| b.as_ref().ok());
    let verdict = match trend_report(&result) {
        Ok(r) => format!(
            "{} sign change(s), omega_end {}, {} failed point(s)",
            r.verdict.sign_changes,
            r.series("omega_end")
                .map(|s| s.monotonicity.as_str())
                .unwrap_or("-"),
            r.verdict.failed_points
        ),
        Err(e) => e.to_string(),
    };
    Ok(SweepCurve {
        values: result.grid.iter().map(|v| v * scale).collect(),
        omega_end: pick(|m| m.omega_end),
        apex: pick(|m| m.apex_height),
        distance: pick(|m| m.landing_distance),
        roots: result
            .zero_crossings
            .iter()
            .map(|z| z.root * scale)
            .collect(),
        rigid_omega: baseline.map(|b| b.omega_end).unwrap_or(f64::NAN),
        rigid_apex: baseline.map(|b| b.apex_height).unwrap_or(f64::NAN),
        verdict,
    })
}

/// Parameter value (display units) in `[lower, upper]` where ω_end vanishes.
pub fn optimize_design(
    name: &str,
    lower: f64,
    upper: f64,
    stiffness: f64,
    joint_x_mm: f64,
    joint_y_mm: f64,
) -> Result<f64, String> {
    let p = parameter(name)?;
    let scale = p.display_scale();
    let spec = SweepSpec {
        parameter: p,
        lower: lower / scale,
        upper: upper / scale,
        num_points: 2,
        base: design(stiffness, joint_x_mm, joint_y_mm).map_err(|e| e.to_string())?,
    };
    spec.validate().map_err(|e| e.to_string())?;
    let z = find_zero_crossing(&spec, (spec.lower, spec.upper)).map_err(|e| match e {
        EpjError::Bracket { f_lower, f_upper, .. } => format!(
            "no sign change: omega_end is {f_lower:.4} rad/s at {lower} and {f_upper:.4} rad/s at {upper}"
        ),
        other => other.to_string(),
    })?;
    Ok(z.root * scale)
}

#[wasm_bindgen]
pub fn simulate(stiffness: f64, joint_x_mm: f64, joint_y_mm: f64) -> Result<Flight, JsError> {
    fly_design(stiffness, joint_x_mm, joint_y_mm).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(
    name: &str,
    lower: f64,
    upper: f64,
    points: usize,
    stiffness: f64,
    joint_x_mm: f64,
    joint_y_mm: f64,
) -> Result<SweepCurve, JsError> {
    sweep_design(
        name, lower, upper, points, stiffness, joint_x_mm, joint_y_mm,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn optimize(
    name: &str,
    lower: f64,
    upper: f64,
    stiffness: f64,
    joint_x_mm: f64,
    joint_y_mm: f64,
) -> Result<f64, JsError> {
    optimize_design(name, lower, upper, stiffness, joint_x_mm, joint_y_mm)
        .map_err(|e| JsError::new(&e))
}
