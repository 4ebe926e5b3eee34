//! Ballistic flight of the centre of mass and the per-jump metrics.

use crate::dynamics;
use crate::error::{EpjError, Result};
use crate::model::{EnergyPartition, LaunchState, Scenario};
use crate::spring;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallisticState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMetrics {
    pub omega_end: f64,
    pub apex_height: f64,
    /// CoM range to the point where it is back at launch height.
    pub landing_distance: f64,
    /// Range shifted by the landing attitude, see [`corrected_distance`].
    pub corrected_distance: f64,
    pub flight_time: f64,
    pub relock_time: Option<f64>,
    pub flip_angle: f64,
}

/// Projectile state `t` seconds after launch.
pub fn ballistic_state(launch: &LaunchState, g: f64, t: f64) -> BallisticState {
    let [x0, y0] = launch.com_position;
    let [vx, vy] = launch.com_velocity;
    BallisticState {
        t,
        x: x0 + vx * t,
        y: y0 + vy * t - 0.5 * g * t * t,
        vx,
        vy: vy - g * t,
    }
}

fn rising(launch: &LaunchState) -> Result<f64> {
    let vy = launch.com_velocity[1];
    if vy > 0.0 {
        Ok(vy)
    } else {
        Err(EpjError::invalid(
            "launch.vy_m_s",
            format!("vertical launch speed must be > 0, got {vy}"),
        ))
    }
}

pub fn apex_height(launch: &LaunchState, g: f64) -> Result<f64> {
    let vy = rising(launch)?;
    Ok(launch.com_position[1] + vy * vy / (2.0 * g))
}

/// Time for the CoM to return to its launch height.
pub fn flight_time(launch: &LaunchState, g: f64) -> Result<f64> {
    Ok(2.0 * rising(launch)? / g)
}

pub fn landing_distance(launch: &LaunchState, g: f64) -> Result<f64> {
    Ok(launch.com_velocity[0] * flight_time(launch, g)?)
}

/// Spring energy parked at the take-off opening.
pub fn stored_spring_energy(scenario: &Scenario) -> Result<f64> {
    spring::potential_energy(&scenario.spring_geometry(), scenario.launch.phi_open)
}

/// Launch state after paying for the energy left in the spring at take-off.
/// The rigid baseline and a joint that never opened are returned unchanged.
pub fn takeoff_energy_partition(scenario: &Scenario) -> Result<LaunchState> {
    let mut launch = scenario.launch;
    if !scenario.joint_opens() {
        return Ok(launch);
    }
    let stored = stored_spring_energy(scenario)?;
    if stored == 0.0 {
        return Ok(launch);
    }
    let m = scenario.mass_properties.total_mass();
    let [vx, vy] = launch.com_velocity;
    match scenario.partition {
        EnergyPartition::PreserveAngle => {
            let kinetic = 0.5 * m * (vx * vx + vy * vy);
            if stored >= kinetic {
                return Err(EpjError::Infeasible {
                    spring: stored,
                    budget: kinetic,
                });
            }
            let scale = (1.0 - stored / kinetic).sqrt();
            launch.com_velocity = [vx * scale, vy * scale];
        }
        EnergyPartition::Redirect => {
            let vertical = 0.5 * m * vy * vy;
            if stored >= vertical {
                return Err(EpjError::Infeasible {
                    spring: stored,
                    budget: vertical,
                });
            }
            let shift = 2.0 * stored / m;
            launch.com_velocity = [
                (vx * vx + shift).sqrt().copysign(vx),
                (vy * vy - shift).sqrt(),
            ];
        }
    }
    Ok(launch)
}

/// Range after moving the landing point by how far the CoM (body-frame offset
/// `com`) swings when the robot comes down rotated by `flip_angle`
/// (counter-clockwise positive, i.e. leaning back shortens the jump).
pub fn corrected_distance(distance: f64, flip_angle: f64, com: [f64; 2]) -> f64 {
    let (s, c) = flip_angle.sin_cos();
    distance + (c * com[0] - s * com[1]) - com[0]
}

fn com_offset(scenario: &Scenario) -> [f64; 2] {
    let mp = &scenario.mass_properties;
    scenario
        .geometry
        .map(|g| g.composite_com(mp.mass_a, mp.mass_b))
        .unwrap_or([0.0, 0.0])
}

/// Runs one jump and reduces it to its metrics. Only the open phase is
/// integrated; flight after relock is closed form.
pub fn evaluate(scenario: &Scenario) -> Result<JumpMetrics> {
    let g = scenario.settings.gravity;
    let (launch, omega_end, relock_time, flip_angle) = if scenario.joint_opens() {
        let launch = takeoff_energy_partition(scenario)?;
        let out = dynamics::integrate_to_relock(scenario, |_| {})?;
        let t_land = launch.t0 + flight_time(&launch, g)?;
        let flip = out.attitude + out.event.omega_end * (t_land - out.event.t_end);
        (
            launch,
            out.event.omega_end,
            Some(out.event.t_end - launch.t0),
            flip,
        )
    } else {
        let launch = scenario.launch;
        let flip = scenario.rigid_omega * flight_time(&launch, g)?;
        (launch, scenario.rigid_omega, None, flip)
    };
    let distance = landing_distance(&launch, g)?;
    Ok(JumpMetrics {
        omega_end,
        apex_height: apex_height(&launch, g)?,
        landing_distance: distance,
        corrected_distance: corrected_distance(distance, flip_angle, com_offset(scenario)),
        flight_time: flight_time(&launch, g)?,
        relock_time,
        flip_angle,
    })
}
