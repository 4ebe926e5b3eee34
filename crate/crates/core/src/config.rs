//! TOML scenario files.
//!
//! Lengths, masses and angles are written in the drawing units (mm, g, deg).
//! Every such key has an SI twin (`_m`, `_kg`, `_rad`, `_kg_m2`) which the
//! writer falls back to when the drawing-unit value would not reload to the
//! identical `f64`. Giving both forms of one quantity is an error.
//!
//! ```toml
//! [masses]
//! leg_g = 33.46
//! body_g = 118.8
//! inertia_a_g_mm2 = 57294.0
//! inertia_b_g_mm2 = 12998.0
//!
//! [joint]
//! x_mm = 30.35
//! y_mm = 3.7
//! l_oc_mm = 22.5
//! l_od_mm = 26.3
//! l0_mm = 33.3
//! k_n_per_m = 1457
//! phi0_deg = 85.9
//! phi_open_deg = 97.5
//!
//! [launch]
//! vx_m_s = 2.29
//! vy_m_s = 3.12
//! omega_a = 29.99
//! omega_b = -0.02
//! rigid_omega = -3.46
//! ```
//!
//! A `[geometry]` section (spring anchors `c_*`, `d_*` and segment centres of
//! mass `com_a_*`, `com_b_*`, in body-frame mm) replaces `l_oc`, `l_od`,
//! `phi0` and the inertias, which are then derived from the joint position.

use std::collections::BTreeSet;

use toml::{Table, Value};

use crate::error::{EpjError, Result};
use crate::model::{
    BodyGeometry, EnergyPartition, JointDesign, LatchMode, LaunchState, MassProperties, Scenario,
    SimSettings,
};

const MM: f64 = 1000.0;
const GRAM: f64 = 1000.0;
/// g·mm² per kg·m².
const G_MM2: f64 = 1e9;

#[derive(Clone, Copy)]
enum Unit {
    /// Drawing value divided by the factor gives SI.
    Scaled(f64),
    Degrees,
}

impl Unit {
    fn to_si(self, v: f64) -> f64 {
        match self {
            Unit::Scaled(f) => v / f,
            Unit::Degrees => v.to_radians(),
        }
    }

    fn to_drawing(self, v: f64) -> f64 {
        match self {
            Unit::Scaled(f) => v * f,
            Unit::Degrees => v.to_degrees(),
        }
    }
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    seen: BTreeSet<String>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'static str) -> Result<Self> {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(EpjError::Parse(format!("`{name}` must be a table"))),
        };
        Ok(Section {
            name,
            table,
            seen: BTreeSet::new(),
        })
    }

    fn present(&self) -> bool {
        self.table.is_some()
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{}", self.name, key)
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.seen.insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(EpjError::invalid(self.path(key), "expected a number")),
        }
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| EpjError::MissingKey(self.path(key)))
    }

    fn or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    /// Quantity that may be given as `<stem>_<unit>` or `<stem>_<si>`.
    fn quantity(
        &mut self,
        stem: &str,
        unit_key: &str,
        si_key: &str,
        unit: Unit,
    ) -> Result<Option<f64>> {
        let drawing = format!("{stem}_{unit_key}");
        let si = format!("{stem}_{si_key}");
        match (self.number(&drawing)?, self.number(&si)?) {
            (Some(_), Some(_)) => Err(EpjError::invalid(
                self.path(stem),
                format!("give either `{drawing}` or `{si}`, not both"),
            )),
            (Some(v), None) => Ok(Some(unit.to_si(v))),
            (None, Some(v)) => Ok(Some(v)),
            (None, None) => Ok(None),
        }
    }

    fn quantity_required(
        &mut self,
        stem: &str,
        unit_key: &str,
        si_key: &str,
        unit: Unit,
    ) -> Result<f64> {
        self.quantity(stem, unit_key, si_key, unit)?
            .ok_or_else(|| EpjError::MissingKey(self.path(&format!("{stem}_{unit_key}"))))
    }

    fn length(&mut self, stem: &str) -> Result<f64> {
        self.quantity_required(stem, "mm", "m", Unit::Scaled(MM))
    }

    fn string(&mut self, key: &str) -> Result<Option<&'a str>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(EpjError::invalid(self.path(key), "expected a string")),
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(EpjError::invalid(self.path(key), "expected true or false")),
        }
    }

    /// Rejects any key that was never asked for.
    fn finish(self) -> Result<()> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !self.seen.contains(*k)) {
                return Err(EpjError::invalid(self.path(k), "unknown key"));
            }
        }
        Ok(())
    }
}

fn forbid_with_geometry(present: Option<f64>, field: String) -> Result<()> {
    match present {
        Some(_) => Err(EpjError::invalid(
            field,
            "derived from [geometry]; remove it or the [geometry] section",
        )),
        None => Ok(()),
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let root: Table = toml::from_str(text).map_err(|e| EpjError::Parse(e.to_string()))?;
    const SECTIONS: [&str; 6] = ["scenario", "masses", "joint", "geometry", "launch", "sim"];
    if let Some(k) = root.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(EpjError::invalid(k.clone(), "unknown section"));
    }

    let mut top = Section::new(&root, "scenario")?;
    let epj_enabled = top.boolean("epj_enabled", true)?;
    top.finish()?;

    let mut masses = Section::new(&root, "masses")?;
    let mass_a = masses.quantity_required("leg", "g", "kg", Unit::Scaled(GRAM))?;
    let mass_b = masses.quantity_required("body", "g", "kg", Unit::Scaled(GRAM))?;
    let total_mass = masses.quantity("total", "g", "kg", Unit::Scaled(GRAM))?;
    let inertia_a = masses.quantity("inertia_a", "g_mm2", "kg_m2", Unit::Scaled(G_MM2))?;
    let inertia_b = masses.quantity("inertia_b", "g_mm2", "kg_m2", Unit::Scaled(G_MM2))?;

    let mut geo = Section::new(&root, "geometry")?;
    let geometry = if geo.present() {
        let point = |s: &mut Section, p: &str| -> Result<[f64; 2]> {
            Ok([s.length(&format!("{p}_x"))?, s.length(&format!("{p}_y"))?])
        };
        Some(BodyGeometry {
            anchor_c: point(&mut geo, "c")?,
            anchor_d: point(&mut geo, "d")?,
            com_a: point(&mut geo, "com_a")?,
            com_b: point(&mut geo, "com_b")?,
            inertia_a_cm: geo
                .quantity("inertia_a_cm", "g_mm2", "kg_m2", Unit::Scaled(G_MM2))?
                .unwrap_or(0.0),
            inertia_b_cm: geo
                .quantity("inertia_b_cm", "g_mm2", "kg_m2", Unit::Scaled(G_MM2))?
                .unwrap_or(0.0),
        })
    } else {
        None
    };
    geo.finish()?;

    let mut joint = Section::new(&root, "joint")?;
    let joint_x = joint.length("x")?;
    let joint_y = joint.length("y")?;
    let natural_length = joint.length("l0")?;
    let stiffness = joint.required("k_n_per_m")?;
    let tension_only = joint.boolean("tension_only", false)?;
    let phi_open = joint.quantity("phi_open", "deg", "rad", Unit::Degrees)?;
    let l_oc = joint.quantity("l_oc", "mm", "m", Unit::Scaled(MM))?;
    let l_od = joint.quantity("l_od", "mm", "m", Unit::Scaled(MM))?;
    let phi0 = joint.quantity("phi0", "deg", "rad", Unit::Degrees)?;

    let (mass_properties, l_oc, l_od, latch_angle) = match &geometry {
        Some(g) => {
            forbid_with_geometry(l_oc, "joint.l_oc_mm".into())?;
            forbid_with_geometry(l_od, "joint.l_od_mm".into())?;
            forbid_with_geometry(phi0, "joint.phi0_deg".into())?;
            forbid_with_geometry(inertia_a, "masses.inertia_a_g_mm2".into())?;
            forbid_with_geometry(inertia_b, "masses.inertia_b_g_mm2".into())?;
            let d = g.derive([joint_x, joint_y], mass_a, mass_b);
            let mp = MassProperties {
                mass_a,
                mass_b,
                inertia_a: d.inertia_a,
                inertia_b: d.inertia_b,
            };
            (mp, d.l_oc, d.l_od, d.latch_angle)
        }
        None => {
            let need =
                |v: Option<f64>, key: &str| v.ok_or_else(|| EpjError::MissingKey(key.into()));
            let mp = MassProperties {
                mass_a,
                mass_b,
                inertia_a: need(inertia_a, "masses.inertia_a_g_mm2")?,
                inertia_b: need(inertia_b, "masses.inertia_b_g_mm2")?,
            };
            (
                mp,
                need(l_oc, "joint.l_oc_mm")?,
                need(l_od, "joint.l_od_mm")?,
                need(phi0, "joint.phi0_deg")?,
            )
        }
    };
    masses.finish()?;

    let mut launch = Section::new(&root, "launch")?;
    let initial_latch = match launch.string("initial_latch")? {
        None | Some("open") => LatchMode::Open,
        Some("locked") => LatchMode::Locked,
        Some(other) => {
            return Err(EpjError::invalid(
                "launch.initial_latch",
                format!("expected \"open\" or \"locked\", got {other:?}"),
            ))
        }
    };
    let phi_open = match (phi_open, initial_latch) {
        (Some(v), _) => v,
        (None, LatchMode::Locked) => latch_angle,
        (None, _) => return Err(EpjError::MissingKey("joint.phi_open_deg".into())),
    };
    joint.finish()?;

    let partition = match launch.string("partition")? {
        None => EnergyPartition::default(),
        Some(s) => EnergyPartition::parse(s).ok_or_else(|| {
            EpjError::invalid(
                "launch.partition",
                format!("expected \"preserve_angle\" or \"redirect\", got {s:?}"),
            )
        })?,
    };
    let launch_state = LaunchState {
        t0: launch.or("t0", 0.0)?,
        com_position: [launch.or("x0_m", 0.0)?, launch.or("y0_m", 0.0)?],
        com_velocity: [launch.required("vx_m_s")?, launch.required("vy_m_s")?],
        theta_a0: launch
            .quantity("theta_a", "deg", "rad", Unit::Degrees)?
            .unwrap_or(0.0),
        theta_b0: launch
            .quantity("theta_b", "deg", "rad", Unit::Degrees)?
            .unwrap_or(0.0),
        omega_a0: launch.required("omega_a")?,
        omega_b0: launch.required("omega_b")?,
        phi_open,
    };
    let rigid_omega = launch.required("rigid_omega")?;
    launch.finish()?;

    let defaults = SimSettings::default();
    let mut sim = Section::new(&root, "sim")?;
    let settings = SimSettings {
        dt: sim.or("dt", defaults.dt)?,
        t_max: sim.or("t_max", defaults.t_max)?,
        event_tol: sim.or("event_tol", defaults.event_tol)?,
        gravity: sim.or("g", defaults.gravity)?,
        omega_zero_tol: sim.or("omega_zero_tol", defaults.omega_zero_tol)?,
    };
    sim.finish()?;

    let scenario = Scenario {
        epj_enabled,
        mass_properties,
        total_mass,
        joint_design: JointDesign {
            joint_x,
            joint_y,
            l_oc,
            l_od,
            natural_length,
            stiffness,
            latch_angle,
            tension_only,
        },
        geometry,
        launch: launch_state,
        initial_latch,
        partition,
        settings,
        rigid_omega,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario_file(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EpjError::Parse(format!("{}: {e}", path.display())))?;
    load_scenario(&text)
}

fn put_quantity(t: &mut Table, stem: &str, unit_key: &str, si_key: &str, unit: Unit, v: f64) {
    let drawing = unit.to_drawing(v);
    if unit.to_si(drawing).to_bits() == v.to_bits() {
        t.insert(format!("{stem}_{unit_key}"), Value::Float(drawing));
    } else {
        t.insert(format!("{stem}_{si_key}"), Value::Float(v));
    }
}

fn put_length(t: &mut Table, stem: &str, v: f64) {
    put_quantity(t, stem, "mm", "m", Unit::Scaled(MM), v);
}

/// Writes a scenario that [`load_scenario`] reads back field for field.
/// With body geometry the derived joint quantities are not written, so they
/// must be consistent with it (as they are after loading or moving the joint).
pub fn save_scenario(s: &Scenario) -> String {
    let mut root = Table::new();

    let mut top = Table::new();
    top.insert("epj_enabled".into(), Value::Boolean(s.epj_enabled));
    root.insert("scenario".into(), Value::Table(top));

    let mp = &s.mass_properties;
    let mut masses = Table::new();
    put_quantity(&mut masses, "leg", "g", "kg", Unit::Scaled(GRAM), mp.mass_a);
    put_quantity(
        &mut masses,
        "body",
        "g",
        "kg",
        Unit::Scaled(GRAM),
        mp.mass_b,
    );
    if let Some(total) = s.total_mass {
        put_quantity(&mut masses, "total", "g", "kg", Unit::Scaled(GRAM), total);
    }

    let j = &s.joint_design;
    let mut joint = Table::new();
    put_length(&mut joint, "x", j.joint_x);
    put_length(&mut joint, "y", j.joint_y);
    put_length(&mut joint, "l0", j.natural_length);
    joint.insert("k_n_per_m".into(), Value::Float(j.stiffness));
    put_quantity(
        &mut joint,
        "phi_open",
        "deg",
        "rad",
        Unit::Degrees,
        s.launch.phi_open,
    );
    if j.tension_only {
        joint.insert("tension_only".into(), Value::Boolean(true));
    }

    let mut geometry = None;
    match &s.geometry {
        Some(g) => {
            let mut geo = Table::new();
            for (p, xy) in [
                ("c", g.anchor_c),
                ("d", g.anchor_d),
                ("com_a", g.com_a),
                ("com_b", g.com_b),
            ] {
                put_length(&mut geo, &format!("{p}_x"), xy[0]);
                put_length(&mut geo, &format!("{p}_y"), xy[1]);
            }
            let inertia = Unit::Scaled(G_MM2);
            put_quantity(
                &mut geo,
                "inertia_a_cm",
                "g_mm2",
                "kg_m2",
                inertia,
                g.inertia_a_cm,
            );
            put_quantity(
                &mut geo,
                "inertia_b_cm",
                "g_mm2",
                "kg_m2",
                inertia,
                g.inertia_b_cm,
            );
            geometry = Some(geo);
        }
        None => {
            let inertia = Unit::Scaled(G_MM2);
            put_quantity(
                &mut masses,
                "inertia_a",
                "g_mm2",
                "kg_m2",
                inertia,
                mp.inertia_a,
            );
            put_quantity(
                &mut masses,
                "inertia_b",
                "g_mm2",
                "kg_m2",
                inertia,
                mp.inertia_b,
            );
            put_length(&mut joint, "l_oc", j.l_oc);
            put_length(&mut joint, "l_od", j.l_od);
            put_quantity(
                &mut joint,
                "phi0",
                "deg",
                "rad",
                Unit::Degrees,
                j.latch_angle,
            );
        }
    }
    root.insert("masses".into(), Value::Table(masses));
    root.insert("joint".into(), Value::Table(joint));
    if let Some(geo) = geometry {
        root.insert("geometry".into(), Value::Table(geo));
    }

    let l = &s.launch;
    let mut launch = Table::new();
    launch.insert("vx_m_s".into(), Value::Float(l.com_velocity[0]));
    launch.insert("vy_m_s".into(), Value::Float(l.com_velocity[1]));
    launch.insert("omega_a".into(), Value::Float(l.omega_a0));
    launch.insert("omega_b".into(), Value::Float(l.omega_b0));
    launch.insert("rigid_omega".into(), Value::Float(s.rigid_omega));
    launch.insert("t0".into(), Value::Float(l.t0));
    launch.insert("x0_m".into(), Value::Float(l.com_position[0]));
    launch.insert("y0_m".into(), Value::Float(l.com_position[1]));
    put_quantity(
        &mut launch,
        "theta_a",
        "deg",
        "rad",
        Unit::Degrees,
        l.theta_a0,
    );
    put_quantity(
        &mut launch,
        "theta_b",
        "deg",
        "rad",
        Unit::Degrees,
        l.theta_b0,
    );
    launch.insert(
        "partition".into(),
        Value::String(s.partition.as_str().into()),
    );
    launch.insert(
        "initial_latch".into(),
        Value::String(
            match s.initial_latch {
                LatchMode::Locked => "locked",
                _ => "open",
            }
            .into(),
        ),
    );
    root.insert("launch".into(), Value::Table(launch));

    let st = &s.settings;
    let mut sim = Table::new();
    sim.insert("dt".into(), Value::Float(st.dt));
    sim.insert("t_max".into(), Value::Float(st.t_max));
    sim.insert("event_tol".into(), Value::Float(st.event_tol));
    sim.insert("g".into(), Value::Float(st.gravity));
    sim.insert("omega_zero_tol".into(), Value::Float(st.omega_zero_tol));
    root.insert("sim".into(), Value::Table(sim));

    toml::to_string(&root).expect("a plain table always serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_reference_scenario;

    const MINIMAL: &str = r#"
[masses]
leg_g = 33.46
body_g = 118.8
inertia_a_g_mm2 = 57294
inertia_b_g_mm2 = 12998

[joint]
x_mm = 30.35
y_mm = 3.7
l_oc_mm = 22.5
l_od_mm = 26.3
l0_mm = 33.3
k_n_per_m = 1566
phi0_deg = 85.9
phi_open_deg = 97.5

[launch]
vx_m_s = 2.29
vy_m_s = 3.12
omega_a = 29.99
omega_b = -0.02
rigid_omega = -3.46
"#;

    #[test]
    fn drawing_units_convert_to_si() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(s.mass_properties.mass_a, 33.46 / 1000.0);
        assert_eq!(s.mass_properties.mass_b, 118.8 / 1000.0);
        assert!((s.mass_properties.total_mass() - 0.15226).abs() < 1e-15);
        assert_eq!(s.joint_design.joint_x, 30.35 / 1000.0);
        assert!((s.joint_design.joint_x - 0.03035).abs() < 1e-17);
        assert_eq!(s.mass_properties.inertia_a, 57294.0 / 1e9);
    }

    #[test]
    fn sim_defaults_applied() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(s.settings, SimSettings::default());
        assert_eq!(s.settings.dt, 1e-5);
        assert_eq!(s.settings.t_max, 2.0);
        assert_eq!(s.settings.event_tol, 1e-9);
        assert_eq!(s.settings.gravity, 9.81);
        assert_eq!(s.settings.omega_zero_tol, 1e-4);
        assert!(s.epj_enabled);
        assert_eq!(s.partition, EnergyPartition::PreserveAngle);
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("k_n_per_m = 1566\n", "");
        assert_eq!(
            load_scenario(&text).unwrap_err(),
            EpjError::MissingKey("joint.k_n_per_m".into())
        );
        let text = MINIMAL.replace("leg_g = 33.46\n", "");
        assert_eq!(
            load_scenario(&text).unwrap_err(),
            EpjError::MissingKey("masses.leg_g".into())
        );
    }

    #[test]
    fn non_positive_values_name_the_field() {
        for (from, to, field) in [
            ("body_g = 118.8", "body_g = 0", "masses.body"),
            ("l_oc_mm = 22.5", "l_oc_mm = -1", "joint.l_oc"),
            (
                "inertia_b_g_mm2 = 12998",
                "inertia_b_g_mm2 = 0",
                "masses.inertia_b",
            ),
            ("vy_m_s = 3.12", "vy_m_s = -0.5", "launch.vy_m_s"),
        ] {
            let err = load_scenario(&MINIMAL.replace(from, to)).unwrap_err();
            match err {
                EpjError::Invalid { field: f, .. } => assert_eq!(f, field),
                other => panic!("{from}: {other:?}"),
            }
        }
    }

    #[test]
    fn both_unit_forms_rejected() {
        let text = MINIMAL.replace("x_mm = 30.35", "x_mm = 30.35\nx_m = 0.03035");
        assert!(load_scenario(&text)
            .unwrap_err()
            .to_string()
            .contains("joint.x"));
    }

    #[test]
    fn unknown_keys_and_sections_rejected() {
        assert!(load_scenario(&MINIMAL.replace("y_mm = 3.7", "y_mm = 3.7\nz_mm = 1")).is_err());
        assert!(load_scenario(&format!("{MINIMAL}\n[extra]\na = 1\n")).is_err());
        assert!(matches!(load_scenario("[masses"), Err(EpjError::Parse(_))));
    }

    #[test]
    fn geometry_conflicts_with_explicit_arms() {
        let text = format!(
            "{MINIMAL}\n[geometry]\nc_x_mm = 8\nc_y_mm = 5\nd_x_mm = 30\nd_y_mm = 30\ncom_a_x_mm = 45\ncom_a_y_mm = -35\ncom_b_x_mm = 22\ncom_b_y_mm = 10\n"
        );
        let err = load_scenario(&text).unwrap_err();
        assert!(err.to_string().contains("derived from [geometry]"), "{err}");
    }

    #[test]
    fn reference_round_trips_bit_identically() {
        let s = default_reference_scenario();
        let text = save_scenario(&s);
        assert_eq!(load_scenario(&text).unwrap(), s);
    }

    #[test]
    fn minimal_round_trips() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(load_scenario(&save_scenario(&s)).unwrap(), s);
    }

    #[test]
    fn awkward_values_fall_back_to_si_keys() {
        let mut s = load_scenario(MINIMAL).unwrap();
        s.joint_design.joint_x = 0.1 + 0.2;
        s.launch.phi_open = 1.9;
        let text = save_scenario(&s);
        assert_eq!(load_scenario(&text).unwrap(), s);
    }

    #[test]
    fn locked_launch_needs_no_opening() {
        let text = MINIMAL.replace("phi_open_deg = 97.5\n", "").replace(
            "rigid_omega = -3.46",
            "rigid_omega = -3.46\ninitial_latch = \"locked\"",
        );
        let s = load_scenario(&text).unwrap();
        assert_eq!(s.initial_latch, LatchMode::Locked);
        assert_eq!(s.launch.phi_open, s.joint_design.latch_angle);
    }
}
