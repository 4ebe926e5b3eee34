//! Domain types shared by every other module.
//!
//! All quantities are SI internally. The configuration boundary (see
//! [`crate::config`]) accepts the millimetre/gram/degree units used on the
//! drawings and converts them once, at load time.
//!
//! Angular-rate convention: the rates stored in [`LaunchState`] and
//! `rigid_omega` are inertial, counter-clockwise positive, so a negative value
//! is a forward flip. The aerial integrator works in joint coordinates, where
//! the rear frame (mechanism A) is counted clockwise; see
//! [`LaunchState::joint_rates`].

use std::f64::consts::PI;

use crate::error::{EpjError, Result};
use crate::spring::SpringGeometry;

/// Tolerance on `mass_a + mass_b` against a configured total mass.
pub const MASS_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    /// Leg plus rear frame, kg.
    pub mass_a: f64,
    /// Body, kg.
    pub mass_b: f64,
    /// Mechanism A about axis O, kg·m².
    pub inertia_a: f64,
    /// Mechanism B about axis O, kg·m².
    pub inertia_b: f64,
}

impl MassProperties {
    pub fn total_mass(&self) -> f64 {
        self.mass_a + self.mass_b
    }

    pub fn total_inertia(&self) -> f64 {
        self.inertia_a + self.inertia_b
    }

    /// `J_A J_B / (J_A + J_B)`, the inertia seen by the relative joint motion.
    pub fn reduced_inertia(&self) -> f64 {
        self.inertia_a * self.inertia_b / (self.inertia_a + self.inertia_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDesign {
    /// Revolute joint x, measured from the rear end of the body, m.
    pub joint_x: f64,
    /// Revolute joint y, measured from the lowest point of the body, m.
    pub joint_y: f64,
    pub l_oc: f64,
    pub l_od: f64,
    pub natural_length: f64,
    /// N/m.
    pub stiffness: f64,
    /// Joint angle at which the switch relocks, rad.
    pub latch_angle: f64,
    /// Clamp the spring force at zero when compressed.
    pub tension_only: bool,
}

/// Body-frame points that let the joint be moved: spring anchors and the
/// segment centres of mass, all in the latched pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyGeometry {
    pub anchor_c: [f64; 2],
    pub anchor_d: [f64; 2],
    pub com_a: [f64; 2],
    pub com_b: [f64; 2],
    /// Own-centroid inertias, kg·m². Zero for a point-mass pair.
    pub inertia_a_cm: f64,
    pub inertia_b_cm: f64,
}

/// Quantities of the hinge that follow from where the joint sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedJoint {
    pub l_oc: f64,
    pub l_od: f64,
    pub latch_angle: f64,
    pub inertia_a: f64,
    pub inertia_b: f64,
}

impl BodyGeometry {
    pub fn derive(&self, joint: [f64; 2], mass_a: f64, mass_b: f64) -> DerivedJoint {
        let oc = sub(self.anchor_c, joint);
        let od = sub(self.anchor_d, joint);
        let cross = oc[0] * od[1] - oc[1] * od[0];
        let dot = oc[0] * od[0] + oc[1] * od[1];
        let ra = sub(self.com_a, joint);
        let rb = sub(self.com_b, joint);
        DerivedJoint {
            l_oc: oc[0].hypot(oc[1]),
            l_od: od[0].hypot(od[1]),
            latch_angle: cross.abs().atan2(dot),
            inertia_a: mass_a * (ra[0] * ra[0] + ra[1] * ra[1]) + self.inertia_a_cm,
            inertia_b: mass_b * (rb[0] * rb[0] + rb[1] * rb[1]) + self.inertia_b_cm,
        }
    }

    /// Whole-robot centre of mass in the body frame.
    pub fn composite_com(&self, mass_a: f64, mass_b: f64) -> [f64; 2] {
        let m = mass_a + mass_b;
        [
            (mass_a * self.com_a[0] + mass_b * self.com_b[0]) / m,
            (mass_a * self.com_a[1] + mass_b * self.com_b[1]) / m,
        ]
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchState {
    pub t0: f64,
    pub com_position: [f64; 2],
    pub com_velocity: [f64; 2],
    pub theta_a0: f64,
    pub theta_b0: f64,
    /// Leg rate at take-off, inertial.
    pub omega_a0: f64,
    /// Body rate at take-off, inertial.
    pub omega_b0: f64,
    /// Joint opening φ(t0).
    pub phi_open: f64,
}

impl LaunchState {
    /// Take-off rates in joint coordinates, where a positive spring torque
    /// accelerates both and `dφ/dt = -(ω_A + ω_B)`.
    pub fn joint_rates(&self) -> (f64, f64) {
        (-self.omega_a0, self.omega_b0)
    }

    pub fn joint_angles(&self) -> (f64, f64) {
        (-self.theta_a0, self.theta_b0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatchMode {
    Locked,
    Open,
    Relocked,
}

impl LatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LatchMode::Locked => "Locked",
            LatchMode::Open => "Open",
            LatchMode::Relocked => "Relocked",
        }
    }
}

/// How the energy parked in the spring at take-off is taken out of the launch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyPartition {
    /// Rescale the launch speed, keep its direction.
    #[default]
    PreserveAngle,
    /// Debit vertical kinetic energy and credit the same amount horizontally.
    Redirect,
}

impl EnergyPartition {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyPartition::PreserveAngle => "preserve_angle",
            EnergyPartition::Redirect => "redirect",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "preserve_angle" => Some(EnergyPartition::PreserveAngle),
            "redirect" => Some(EnergyPartition::Redirect),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub t_max: f64,
    pub event_tol: f64,
    pub gravity: f64,
    pub omega_zero_tol: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            dt: 1e-5,
            t_max: 2.0,
            event_tol: 1e-9,
            gravity: 9.81,
            omega_zero_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub epj_enabled: bool,
    pub mass_properties: MassProperties,
    /// Configured total mass, checked against the segment masses.
    pub total_mass: Option<f64>,
    pub joint_design: JointDesign,
    pub geometry: Option<BodyGeometry>,
    pub launch: LaunchState,
    pub initial_latch: LatchMode,
    pub partition: EnergyPartition,
    pub settings: SimSettings,
    /// Rigid-body rate used when the joint never opens, rad/s.
    pub rigid_omega: f64,
}

/// Parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignParameter {
    JointX,
    JointY,
    Stiffness,
}

impl DesignParameter {
    pub const ALL: [DesignParameter; 3] = [
        DesignParameter::JointX,
        DesignParameter::JointY,
        DesignParameter::Stiffness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DesignParameter::JointX => "joint_x",
            DesignParameter::JointY => "joint_y",
            DesignParameter::Stiffness => "stiffness_k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Factor from SI to the units used on the command line and in CSVs.
    pub fn display_scale(self) -> f64 {
        match self {
            DesignParameter::JointX | DesignParameter::JointY => 1000.0,
            DesignParameter::Stiffness => 1.0,
        }
    }
}

impl Scenario {
    pub fn spring_geometry(&self) -> SpringGeometry {
        let j = &self.joint_design;
        SpringGeometry {
            arm_oc: j.l_oc,
            arm_od: j.l_od,
            natural_length: j.natural_length,
            stiffness: j.stiffness,
            tension_only: j.tension_only,
        }
    }

    /// True when the dynamics see an open joint at take-off.
    pub fn joint_opens(&self) -> bool {
        self.epj_enabled && self.initial_latch == LatchMode::Open
    }

    pub fn rigid_baseline(&self) -> Scenario {
        Scenario {
            epj_enabled: false,
            ..self.clone()
        }
    }

    pub fn with_stiffness(&self, stiffness: f64) -> Result<Scenario> {
        let mut s = self.clone();
        s.joint_design.stiffness = stiffness;
        s.validate()?;
        Ok(s)
    }

    /// Moves the revolute joint. Needs body geometry; arm lengths, latch
    /// angle and inertias are re-derived, the take-off opening
    /// `phi_open - latch_angle` is kept.
    pub fn with_joint_position(&self, x: f64, y: f64) -> Result<Scenario> {
        let geometry = self.geometry.ok_or_else(|| {
            EpjError::invalid(
                "geometry",
                "moving the joint needs [geometry] anchors and centres of mass",
            )
        })?;
        let mut s = self.clone();
        let opening = s.launch.phi_open - s.joint_design.latch_angle;
        let mp = &mut s.mass_properties;
        let d = geometry.derive([x, y], mp.mass_a, mp.mass_b);
        mp.inertia_a = d.inertia_a;
        mp.inertia_b = d.inertia_b;
        let j = &mut s.joint_design;
        j.joint_x = x;
        j.joint_y = y;
        j.l_oc = d.l_oc;
        j.l_od = d.l_od;
        j.latch_angle = d.latch_angle;
        s.launch.phi_open = d.latch_angle + opening;
        s.validate()?;
        Ok(s)
    }

    pub fn with_parameter(&self, parameter: DesignParameter, value: f64) -> Result<Scenario> {
        match parameter {
            DesignParameter::Stiffness => self.with_stiffness(value),
            DesignParameter::JointX => self.with_joint_position(value, self.joint_design.joint_y),
            DesignParameter::JointY => self.with_joint_position(self.joint_design.joint_x, value),
        }
    }

    pub fn parameter_value(&self, parameter: DesignParameter) -> f64 {
        match parameter {
            DesignParameter::Stiffness => self.joint_design.stiffness,
            DesignParameter::JointX => self.joint_design.joint_x,
            DesignParameter::JointY => self.joint_design.joint_y,
        }
    }

    /// Enforces every type invariant; the error names the first offending field.
    pub fn validate(&self) -> Result<()> {
        let mp = &self.mass_properties;
        positive("masses.leg", mp.mass_a)?;
        positive("masses.body", mp.mass_b)?;
        positive("masses.inertia_a", mp.inertia_a)?;
        positive("masses.inertia_b", mp.inertia_b)?;
        if let Some(total) = self.total_mass {
            positive("masses.total", total)?;
            if (mp.total_mass() - total).abs() > MASS_SUM_TOL {
                return Err(EpjError::invalid(
                    "masses.total",
                    format!(
                        "leg + body = {} kg does not match total {} kg",
                        mp.total_mass(),
                        total
                    ),
                ));
            }
        }

        let j = &self.joint_design;
        finite("joint.x", j.joint_x)?;
        finite("joint.y", j.joint_y)?;
        positive("joint.l_oc", j.l_oc)?;
        positive("joint.l_od", j.l_od)?;
        non_negative("joint.l0", j.natural_length)?;
        non_negative("joint.k_n_per_m", j.stiffness)?;
        finite("joint.phi0", j.latch_angle)?;
        if !(j.latch_angle > 0.0 && j.latch_angle < PI) {
            return Err(EpjError::invalid("joint.phi0", "must lie in (0, pi)"));
        }

        if let Some(g) = &self.geometry {
            for (name, v) in [
                ("geometry.c", g.anchor_c),
                ("geometry.d", g.anchor_d),
                ("geometry.com_a", g.com_a),
                ("geometry.com_b", g.com_b),
            ] {
                finite(name, v[0])?;
                finite(name, v[1])?;
            }
            non_negative("geometry.inertia_a_cm", g.inertia_a_cm)?;
            non_negative("geometry.inertia_b_cm", g.inertia_b_cm)?;
        }

        let l = &self.launch;
        finite("launch.t0", l.t0)?;
        for v in l.com_position {
            finite("launch.com_position", v)?;
        }
        finite("launch.vx_m_s", l.com_velocity[0])?;
        positive("launch.vy_m_s", l.com_velocity[1])?;
        finite("launch.theta_a", l.theta_a0)?;
        finite("launch.theta_b", l.theta_b0)?;
        finite("launch.omega_a", l.omega_a0)?;
        finite("launch.omega_b", l.omega_b0)?;
        finite("launch.rigid_omega", self.rigid_omega)?;
        finite("joint.phi_open", l.phi_open)?;

        match self.initial_latch {
            LatchMode::Relocked => {
                return Err(EpjError::invalid(
                    "launch.initial_latch",
                    "a jump cannot start relocked",
                ))
            }
            LatchMode::Open if self.epj_enabled => {
                if l.phi_open <= j.latch_angle {
                    return Err(EpjError::invalid(
                        "joint.phi_open",
                        "joint must be open at take-off (phi_open > phi0)",
                    ));
                }
                if l.phi_open > PI {
                    return Err(EpjError::invalid("joint.phi_open", "must not exceed pi"));
                }
            }
            _ => {}
        }

        let s = &self.settings;
        positive("sim.dt", s.dt)?;
        positive("sim.t_max", s.t_max)?;
        positive("sim.event_tol", s.event_tol)?;
        positive("sim.g", s.gravity)?;
        positive("sim.omega_zero_tol", s.omega_zero_tol)?;
        Ok(())
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(EpjError::invalid(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(EpjError::invalid(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(EpjError::invalid(field, format!("must be >= 0, got {v}")))
    }
}

pub(crate) fn mm(v: f64) -> f64 {
    v / 1000.0
}

pub(crate) fn grams(v: f64) -> f64 {
    v / 1000.0
}

/// Reference take-off height and range of the rigid jump, used to invert the
/// launch velocity.
pub const REFERENCE_BASELINE_APEX: f64 = 0.4968;
pub const REFERENCE_BASELINE_RANGE: f64 = 1.46;

/// Calibrated reference design.
///
/// Masses and take-off rates are the prototype's. The launch velocity comes
/// from inverting the rigid jump's 0.4968 m apex and 1.46 m range. The spring
/// anchors and segment centres of mass are a point-mass estimate for a 10 cm
/// body, with the spring relaxed in the latched pose.
pub fn default_reference_scenario() -> Scenario {
    let settings = SimSettings::default();
    let g = settings.gravity;
    let vy = (2.0 * g * REFERENCE_BASELINE_APEX).sqrt();
    let vx = REFERENCE_BASELINE_RANGE / (2.0 * vy / g);

    let mass_a = grams(33.46);
    let mass_b = grams(118.8);
    let geometry = BodyGeometry {
        anchor_c: [mm(8.0), mm(5.0)],
        anchor_d: [mm(30.0), mm(30.0)],
        com_a: [mm(45.0), mm(-35.0)],
        com_b: [mm(22.0), mm(10.0)],
        inertia_a_cm: 0.0,
        inertia_b_cm: 0.0,
    };
    let joint = [mm(30.35), mm(3.7)];
    let d = geometry.derive(joint, mass_a, mass_b);
    let cd = sub(geometry.anchor_d, geometry.anchor_c);

    Scenario {
        epj_enabled: true,
        mass_properties: MassProperties {
            mass_a,
            mass_b,
            inertia_a: d.inertia_a,
            inertia_b: d.inertia_b,
        },
        total_mass: Some(grams(152.26)),
        joint_design: JointDesign {
            joint_x: joint[0],
            joint_y: joint[1],
            l_oc: d.l_oc,
            l_od: d.l_od,
            natural_length: cd[0].hypot(cd[1]),
            stiffness: 1457.0,
            latch_angle: d.latch_angle,
            tension_only: false,
        },
        geometry: Some(geometry),
        launch: LaunchState {
            t0: 0.0,
            com_position: [0.0, 0.0],
            com_velocity: [vx, vy],
            theta_a0: 0.0,
            theta_b0: 0.0,
            omega_a0: 29.99,
            omega_b0: -0.02,
            phi_open: 97.5_f64.to_radians(),
        },
        initial_latch: LatchMode::Open,
        partition: EnergyPartition::Redirect,
        settings,
        rigid_omega: -3.46,
    }
}
