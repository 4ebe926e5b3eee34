//! Aerial phase of the hinged pair.
//!
//! While the latch is open each mechanism is driven about axis O by the
//! spring torque alone:
//!
//! ```text
//! J_A dω_A/dt = M(φ)      J_B dω_B/dt = M(φ)      dφ/dt = -(ω_A + ω_B)
//! ```
//!
//! with both rates counted in the sense that closes the joint. The latch
//! relocks the first time φ falls through the latch angle; the impact keeps
//! `J_A ω_A + J_B ω_B` and leaves one rigid body spinning at ω_end.
//!
//! Integration is fixed-step classical RK4. The relock instant is found by
//! bisecting over the length of a single RK4 sub-step taken from the last
//! state before the crossing.

use std::f64::consts::PI;

use crate::error::{EpjError, Result};
use crate::flight;
use crate::model::{LatchMode, LaunchState, MassProperties, Scenario};
use crate::spring::{self, SpringGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AerialState {
    pub t: f64,
    pub theta_a: f64,
    pub theta_b: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub phi: f64,
    pub latch: LatchMode,
}

impl AerialState {
    /// State at take-off, in joint coordinates.
    pub fn at_launch(scenario: &Scenario) -> Self {
        let launch = &scenario.launch;
        let (theta_a, theta_b) = launch.joint_angles();
        let (omega_a, omega_b) = launch.joint_rates();
        AerialState {
            t: launch.t0,
            theta_a,
            theta_b,
            omega_a,
            omega_b,
            phi: launch.phi_open,
            latch: if scenario.epj_enabled {
                scenario.initial_latch
            } else {
                LatchMode::Locked
            },
        }
    }

    fn check_finite(&self) -> Result<()> {
        let fields = [
            ("t", self.t),
            ("theta_a", self.theta_a),
            ("theta_b", self.theta_b),
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("phi", self.phi),
        ];
        match fields.iter().find(|(_, v)| !v.is_finite()) {
            Some(&(field, _)) => Err(EpjError::NonFinite { field, t: self.t }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub theta_a: f64,
    pub theta_b: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelockEvent {
    pub t_end: f64,
    pub omega_a_before: f64,
    pub omega_b_before: f64,
    pub omega_end: f64,
    pub energy_dissipated: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AerialTrajectory {
    pub samples: Vec<AerialState>,
    /// Absent for a joint that never opened.
    pub relock: Option<RelockEvent>,
    /// Launch actually flown, after any take-off energy partition.
    pub launch: LaunchState,
    pub landing_time: f64,
    /// Net attitude change of the whole robot between take-off and landing.
    pub flip_angle: f64,
}

impl AerialTrajectory {
    pub fn final_omega(&self) -> f64 {
        match (&self.relock, self.samples.last()) {
            (Some(r), _) => r.omega_end,
            (None, Some(s)) => s.omega_b,
            (None, None) => 0.0,
        }
    }
}

/// Spring plus inertias, unpacked once per simulation.
#[derive(Debug, Clone, Copy)]
struct Hinge {
    spring: SpringGeometry,
    inertia_a: f64,
    inertia_b: f64,
    latch_angle: f64,
}

impl Hinge {
    fn new(scenario: &Scenario) -> Self {
        Hinge {
            spring: scenario.spring_geometry(),
            inertia_a: scenario.mass_properties.inertia_a,
            inertia_b: scenario.mass_properties.inertia_b,
            latch_angle: scenario.joint_design.latch_angle,
        }
    }

    /// A slack spring exerts nothing at any angle, so the joint may then
    /// swing freely past full extension.
    fn slack(&self) -> bool {
        self.spring.stiffness == 0.0
    }

    fn rates(&self, s: &AerialState) -> Result<Rates> {
        let m = if self.slack() {
            0.0
        } else {
            spring::joint_torque(&self.spring, s.phi).map_err(|e| match e {
                EpjError::Domain { .. } if s.phi > PI => EpjError::OverCenter { t: s.t },
                other => other,
            })?
        };
        Ok(Rates {
            theta_a: s.omega_a,
            theta_b: s.omega_b,
            omega_a: m / self.inertia_a,
            omega_b: m / self.inertia_b,
            phi: -(s.omega_a + s.omega_b),
        })
    }

    fn step(&self, s: &AerialState, dt: f64) -> Result<AerialState> {
        let shifted = |k: &Rates, h: f64| AerialState {
            t: s.t + h,
            theta_a: s.theta_a + h * k.theta_a,
            theta_b: s.theta_b + h * k.theta_b,
            omega_a: s.omega_a + h * k.omega_a,
            omega_b: s.omega_b + h * k.omega_b,
            phi: s.phi + h * k.phi,
            latch: s.latch,
        };
        s.check_finite()?;
        let k1 = self.rates(s)?;
        let k2 = self.rates(&shifted(&k1, 0.5 * dt))?;
        let k3 = self.rates(&shifted(&k2, 0.5 * dt))?;
        let k4 = self.rates(&shifted(&k3, dt))?;
        let mix = |a: f64, b: f64, c: f64, d: f64| dt / 6.0 * (a + 2.0 * b + 2.0 * c + d);
        let next = AerialState {
            t: s.t + dt,
            theta_a: s.theta_a + mix(k1.theta_a, k2.theta_a, k3.theta_a, k4.theta_a),
            theta_b: s.theta_b + mix(k1.theta_b, k2.theta_b, k3.theta_b, k4.theta_b),
            omega_a: s.omega_a + mix(k1.omega_a, k2.omega_a, k3.omega_a, k4.omega_a),
            omega_b: s.omega_b + mix(k1.omega_b, k2.omega_b, k3.omega_b, k4.omega_b),
            phi: s.phi + mix(k1.phi, k2.phi, k3.phi, k4.phi),
            latch: s.latch,
        };
        next.check_finite()?;
        Ok(next)
    }

    /// Bisects the sub-step length from `prev` until the bracket collapses to
    /// floating-point resolution. `prev` must sit above the latch angle and a
    /// full `dt` step must land at or below it.
    fn locate(&self, prev: &AerialState, dt: f64, event_tol: f64) -> Result<AerialState> {
        let target = self.latch_angle;
        let (mut lo, mut hi) = (0.0_f64, dt);
        let mut lo_state = *prev;
        let mut hi_state = self.step(prev, dt)?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = self.step(prev, mid)?;
            if s.phi > target {
                lo = mid;
                lo_state = s;
            } else {
                hi = mid;
                hi_state = s;
            }
            if s.phi == target {
                break;
            }
        }
        let best = if (lo_state.phi - target).abs() < (hi_state.phi - target).abs() {
            lo_state
        } else {
            hi_state
        };
        debug_assert!((best.phi - target).abs() <= event_tol.max(1e-12));
        Ok(best)
    }

    fn energy(&self, s: &AerialState) -> Result<f64> {
        let kinetic = 0.5 * self.inertia_a * s.omega_a * s.omega_a
            + 0.5 * self.inertia_b * s.omega_b * s.omega_b;
        if self.slack() {
            return Ok(kinetic);
        }
        Ok(kinetic + spring::potential_energy(&self.spring, s.phi)?)
    }

    /// Attitude of the composite body relative to take-off.
    fn attitude(&self, s: &AerialState, start: &AerialState) -> f64 {
        (self.inertia_a * (s.theta_a - start.theta_a)
            + self.inertia_b * (s.theta_b - start.theta_b))
            / (self.inertia_a + self.inertia_b)
    }
}

fn require_open(state: &AerialState) -> Result<()> {
    if state.latch == LatchMode::Open {
        Ok(())
    } else {
        Err(EpjError::LatchState {
            found: state.latch,
            expected: LatchMode::Open,
        })
    }
}

pub fn rotational_derivatives(state: &AerialState, scenario: &Scenario) -> Result<Rates> {
    require_open(state)?;
    Hinge::new(scenario).rates(state)
}

pub fn step_rk4(state: &AerialState, scenario: &Scenario, dt: f64) -> Result<AerialState> {
    require_open(state)?;
    if dt.is_nan() || dt <= 0.0 {
        return Err(EpjError::invalid("dt", "step must be > 0"));
    }
    Hinge::new(scenario).step(state, dt)
}

/// Time at which φ falls through the latch angle between two consecutive
/// samples, if it does.
pub fn detect_relock(
    prev: &AerialState,
    next: &AerialState,
    scenario: &Scenario,
) -> Result<Option<f64>> {
    require_open(prev)?;
    require_open(next)?;
    let hinge = Hinge::new(scenario);
    if !(prev.phi > hinge.latch_angle && next.phi <= hinge.latch_angle) {
        return Ok(None);
    }
    let hit = hinge.locate(prev, next.t - prev.t, scenario.settings.event_tol)?;
    Ok(Some(hit.t))
}

/// Perfectly plastic relock: the pair leaves as one body.
pub fn relock_impact(state: &AerialState, masses: &MassProperties) -> Result<RelockEvent> {
    require_open(state)?;
    let (ja, jb) = (masses.inertia_a, masses.inertia_b);
    let omega_end = (ja * state.omega_a + jb * state.omega_b) / (ja + jb);
    let relative = state.omega_a - state.omega_b;
    Ok(RelockEvent {
        t_end: state.t,
        omega_a_before: state.omega_a,
        omega_b_before: state.omega_b,
        omega_end,
        energy_dissipated: 0.5 * masses.reduced_inertia() * relative * relative,
    })
}

/// Rotational plus spring energy of an open-joint state.
pub fn open_phase_energy(state: &AerialState, scenario: &Scenario) -> Result<f64> {
    Hinge::new(scenario).energy(state)
}

/// Result of integrating only up to the relock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelockOutcome {
    pub state: AerialState,
    pub event: RelockEvent,
    /// Composite attitude change accumulated while open.
    pub attitude: f64,
}

/// Integrates the open joint until relock, feeding every grid sample to
/// `visit`. The launch state itself is not passed to `visit`.
pub fn integrate_to_relock(
    scenario: &Scenario,
    mut visit: impl FnMut(&AerialState),
) -> Result<RelockOutcome> {
    let start = AerialState::at_launch(scenario);
    require_open(&start)?;
    let hinge = Hinge::new(scenario);
    let settings = scenario.settings;
    let dt = settings.dt;

    let mut prev = start;
    let mut min_phi = start.phi;
    let mut n: u64 = 0;
    loop {
        n += 1;
        let mut next = hinge.step(&prev, dt)?;
        next.t = start.t + n as f64 * dt;
        if next.phi > PI && !hinge.slack() {
            return Err(EpjError::OverCenter { t: next.t });
        }
        if prev.phi > hinge.latch_angle && next.phi <= hinge.latch_angle {
            let mut hit = hinge.locate(&prev, dt, settings.event_tol)?;
            let event = relock_impact(&hit, &scenario.mass_properties)?;
            let attitude = hinge.attitude(&hit, &start);
            hit.latch = LatchMode::Relocked;
            hit.omega_a = event.omega_end;
            hit.omega_b = event.omega_end;
            return Ok(RelockOutcome {
                state: hit,
                event,
                attitude,
            });
        }
        min_phi = min_phi.min(next.phi);
        if next.t - start.t > settings.t_max {
            return Err(EpjError::Watchdog {
                t_max: settings.t_max,
                min_phi,
            });
        }
        visit(&next);
        prev = next;
    }
}

fn grid_times(t0: f64, dt: f64, after: f64, before: f64) -> impl Iterator<Item = f64> {
    let first = ((after - t0) / dt).floor() as u64 + 1;
    (first..)
        .map(move |n| t0 + n as f64 * dt)
        .skip_while(move |&t| t <= after)
        .take_while(move |&t| t < before)
}

/// Full flight with the joint working: open phase, relock, then rigid
/// rotation at ω_end until the centre of mass is back at launch height.
pub fn simulate_aerial(scenario: &Scenario) -> Result<AerialTrajectory> {
    if !scenario.epj_enabled {
        return Err(EpjError::invalid(
            "scenario.epj_enabled",
            "aerial simulation needs the joint enabled; use simulate_rigid",
        ));
    }
    if scenario.initial_latch == LatchMode::Locked {
        return locked_trajectory(scenario, scenario.launch);
    }

    let launch = flight::takeoff_energy_partition(scenario)?;
    let g = scenario.settings.gravity;
    let landing_time = launch.t0 + flight::flight_time(&launch, g)?;
    let dt = scenario.settings.dt;

    let start = AerialState::at_launch(scenario);
    let mut samples = vec![start];
    let outcome = integrate_to_relock(scenario, |s| samples.push(*s))?;
    let relocked = outcome.state;
    samples.push(relocked);

    let omega_end = outcome.event.omega_end;
    let t_end = relocked.t;
    let coast = |t: f64| AerialState {
        t,
        theta_a: relocked.theta_a + omega_end * (t - t_end),
        theta_b: relocked.theta_b + omega_end * (t - t_end),
        ..relocked
    };
    samples.extend(grid_times(launch.t0, dt, t_end, landing_time).map(coast));
    if landing_time > t_end {
        samples.push(coast(landing_time));
    }

    Ok(AerialTrajectory {
        samples,
        relock: Some(outcome.event),
        launch,
        landing_time,
        flip_angle: outcome.attitude + omega_end * (landing_time - t_end),
    })
}

/// The no-joint baseline: one rigid body at `rigid_omega` for the whole flight.
pub fn simulate_rigid(scenario: &Scenario) -> Result<AerialTrajectory> {
    if scenario.epj_enabled {
        return Err(EpjError::invalid(
            "scenario.epj_enabled",
            "rigid simulation needs the joint disabled",
        ));
    }
    locked_trajectory(scenario, scenario.launch)
}

fn locked_trajectory(scenario: &Scenario, launch: LaunchState) -> Result<AerialTrajectory> {
    let g = scenario.settings.gravity;
    let flight_time = flight::flight_time(&launch, g)?;
    let landing_time = launch.t0 + flight_time;
    let omega = scenario.rigid_omega;
    let phi = scenario.joint_design.latch_angle;
    let at = |t: f64| AerialState {
        t,
        theta_a: omega * (t - launch.t0),
        theta_b: omega * (t - launch.t0),
        omega_a: omega,
        omega_b: omega,
        phi,
        latch: LatchMode::Locked,
    };
    let mut samples = vec![at(launch.t0)];
    samples.extend(grid_times(launch.t0, scenario.settings.dt, launch.t0, landing_time).map(at));
    samples.push(at(landing_time));
    Ok(AerialTrajectory {
        samples,
        relock: None,
        launch,
        landing_time,
        flip_angle: omega * flight_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_reference_scenario;
    use std::f64::consts::FRAC_PI_2;

    fn open_state(phi: f64, omega_a: f64, omega_b: f64) -> AerialState {
        AerialState {
            t: 0.0,
            theta_a: 0.0,
            theta_b: 0.0,
            omega_a,
            omega_b,
            phi,
            latch: LatchMode::Open,
        }
    }

    /// Scenario with the 30/40 mm arms used in the spring examples.
    fn textbook(k: f64, l0: f64) -> Scenario {
        let mut s = default_reference_scenario();
        s.geometry = None;
        let j = &mut s.joint_design;
        j.l_oc = 0.03;
        j.l_od = 0.04;
        j.natural_length = l0;
        j.stiffness = k;
        s
    }

    #[test]
    fn torque_free_configuration_has_no_acceleration() {
        let s = textbook(1566.0, 0.05);
        let r = rotational_derivatives(&open_state(FRAC_PI_2, 3.0, -1.0), &s).unwrap();
        assert_eq!(r.omega_a, 0.0);
        assert_eq!(r.omega_b, 0.0);
        assert_eq!(r.phi, -2.0);
    }

    #[test]
    fn equal_inertias_accelerate_equally() {
        let mut s = textbook(1566.0, 0.03);
        s.mass_properties.inertia_a = 3e-5;
        s.mass_properties.inertia_b = 3e-5;
        let r = rotational_derivatives(&open_state(FRAC_PI_2, 0.0, 0.0), &s).unwrap();
        assert!(r.omega_a > 0.0);
        assert_eq!(r.omega_a, r.omega_b);
    }

    #[test]
    fn acceleration_from_hand_torque() {
        let s = textbook(1566.0, 0.03);
        let ja = s.mass_properties.inertia_a;
        let r = rotational_derivatives(&open_state(FRAC_PI_2, 0.0, 0.0), &s).unwrap();
        assert!((r.omega_a - 0.75168 / ja).abs() < 1e-9 * r.omega_a);
    }

    #[test]
    fn derivatives_require_open_latch() {
        let s = textbook(1566.0, 0.03);
        let mut st = open_state(FRAC_PI_2, 0.0, 0.0);
        st.latch = LatchMode::Relocked;
        assert!(matches!(
            rotational_derivatives(&st, &s),
            Err(EpjError::LatchState { .. })
        ));
        assert!(step_rk4(&st, &s, 1e-3).is_err());
    }

    #[test]
    fn constant_rate_rotation_advances_exactly() {
        let s = textbook(1566.0, 0.05);
        let next = step_rk4(&open_state(FRAC_PI_2, 1.0, -1.0), &s, 0.01).unwrap();
        assert_eq!(next.theta_a, 0.01);
        assert_eq!(next.omega_a, 1.0);
    }

    #[test]
    fn non_finite_state_is_reported() {
        let s = textbook(1566.0, 0.05);
        let err = step_rk4(&open_state(FRAC_PI_2, f64::NAN, 0.0), &s, 1e-3).unwrap_err();
        assert!(matches!(err, EpjError::NonFinite { .. }));
    }

    #[test]
    fn detect_bracketed_crossing() {
        // zero stiffness: phi is exactly linear in time
        let s = textbook(0.0, 0.03);
        let phi0 = s.joint_design.latch_angle;
        let prev = open_state(phi0 + 0.01, 0.5, 0.5);
        let next = step_rk4(&prev, &s, 0.02).unwrap();
        assert!((next.phi - (phi0 - 0.01)).abs() < 1e-15);
        let t = detect_relock(&prev, &next, &s).unwrap().unwrap();
        assert!((t - 0.01).abs() < 1e-12);
        let at = step_rk4(&prev, &s, t).unwrap();
        assert!((at.phi - phi0).abs() <= s.settings.event_tol);
    }

    #[test]
    fn no_crossing_above_latch() {
        let s = textbook(0.0, 0.03);
        let phi0 = s.joint_design.latch_angle;
        let prev = open_state(phi0 + 0.02, 0.25, 0.25);
        let next = step_rk4(&prev, &s, 0.02).unwrap();
        assert!(next.phi > phi0);
        assert_eq!(detect_relock(&prev, &next, &s).unwrap(), None);
    }

    #[test]
    fn impact_examples() {
        let masses = MassProperties {
            mass_a: 0.03,
            mass_b: 0.1,
            inertia_a: 2e-4,
            inertia_b: 8e-4,
        };
        let ev = relock_impact(&open_state(1.0, 10.0, -1.0), &masses).unwrap();
        assert!((ev.omega_end - 1.2).abs() < 1e-12);
        assert!(ev.energy_dissipated > 0.0);

        let same = relock_impact(&open_state(1.0, 2.5, 2.5), &masses).unwrap();
        assert_eq!(same.omega_end, 2.5);
        assert_eq!(same.energy_dissipated, 0.0);

        let sym = MassProperties {
            inertia_a: 5e-4,
            inertia_b: 5e-4,
            ..masses
        };
        let opposite = relock_impact(&open_state(1.0, 4.0, -4.0), &sym).unwrap();
        assert_eq!(opposite.omega_end, 0.0);
    }

    #[test]
    fn zero_stiffness_never_relocks() {
        let s = default_reference_scenario().with_stiffness(0.0).unwrap();
        let mut s = s;
        s.settings.t_max = 0.01;
        // opening at ~30 rad/s runs past full extension or trips the watchdog
        let err = simulate_aerial(&s).unwrap_err();
        assert!(matches!(
            err,
            EpjError::Watchdog { .. } | EpjError::OverCenter { .. }
        ));
    }

    #[test]
    fn zero_stiffness_watchdog_reports_min_phi() {
        let mut s = default_reference_scenario().with_stiffness(0.0).unwrap();
        s.launch.omega_a0 = 0.0;
        s.launch.omega_b0 = 0.0;
        s.settings.t_max = 0.05;
        match simulate_aerial(&s).unwrap_err() {
            EpjError::Watchdog { min_phi, .. } => assert_eq!(min_phi, s.launch.phi_open),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rigid_rate_is_constant() {
        let s = default_reference_scenario().rigid_baseline();
        let traj = simulate_rigid(&s).unwrap();
        assert!(traj
            .samples
            .iter()
            .all(|x| x.omega_b == -3.46 && x.omega_a == -3.46));
        assert!(traj.relock.is_none());
        let t = traj.landing_time - traj.launch.t0;
        assert_eq!(traj.flip_angle, -3.46 * t);
        let last = traj.samples.last().unwrap();
        assert_eq!(last.t, traj.landing_time);
        assert_eq!(last.theta_b, -3.46 * t);
    }

    #[test]
    fn rigid_zero_rate_never_turns() {
        let mut s = default_reference_scenario().rigid_baseline();
        s.rigid_omega = 0.0;
        let traj = simulate_rigid(&s).unwrap();
        assert!(traj
            .samples
            .iter()
            .all(|x| x.theta_b == 0.0 && x.omega_b == 0.0));
        assert!(simulate_rigid(&default_reference_scenario()).is_err());
    }

    #[test]
    fn trajectory_time_strictly_increases() {
        let traj = simulate_aerial(&default_reference_scenario()).unwrap();
        assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(
            traj.samples[0],
            AerialState::at_launch(&default_reference_scenario())
        );
        assert_eq!(traj.samples.last().unwrap().latch, LatchMode::Relocked);
        assert_eq!(traj.samples.last().unwrap().t, traj.landing_time);
    }

    #[test]
    fn grid_times_skip_event_instant() {
        let ts: Vec<f64> = grid_times(0.0, 0.1, 0.25, 0.61).collect();
        assert_eq!(ts.len(), 4);
        assert!(ts[0] > 0.25 && ts[3] < 0.61);
    }
}
