use std::path::PathBuf;

use epj_core::config::{load_scenario, load_scenario_file, save_scenario};
use epj_core::model::{default_reference_scenario, EnergyPartition, LatchMode};
use epj_core::{DesignParameter, EpjError};
use proptest::prelude::*;

fn reference_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")
}

#[test]
fn shipped_reference_file_is_the_built_in_scenario() {
    let s = load_scenario_file(&reference_file()).unwrap();
    assert_eq!(s, default_reference_scenario());
}

#[test]
fn missing_file_is_a_config_error() {
    let err = load_scenario_file(&reference_file().with_file_name("nope.toml")).unwrap_err();
    assert_eq!(err.class(), epj_core::ErrorClass::Config);
}

#[test]
fn joint_moves_survive_a_round_trip() {
    let base = default_reference_scenario();
    for (p, v) in [
        (DesignParameter::JointX, 0.027),
        (DesignParameter::JointY, 0.0061),
        (DesignParameter::Stiffness, 2345.5),
    ] {
        let s = base.with_parameter(p, v).unwrap();
        assert_eq!(
            load_scenario(&save_scenario(&s)).unwrap(),
            s,
            "{}",
            p.name()
        );
    }
}

#[test]
fn explicit_arm_lengths_without_geometry() {
    let mut s = default_reference_scenario();
    s.geometry = None;
    s.joint_design.latch_angle = 1.5;
    let text = save_scenario(&s);
    assert!(text.contains("l_oc_"));
    assert!(text.contains("inertia_a_"));
    assert_eq!(load_scenario(&text).unwrap(), s);
}

#[test]
fn dropping_an_arm_length_is_named() {
    let mut s = default_reference_scenario();
    s.geometry = None;
    let text: String = save_scenario(&s)
        .lines()
        .filter(|l| !l.starts_with("l_od"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(
        load_scenario(&text).unwrap_err(),
        EpjError::MissingKey("joint.l_od_mm".into())
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn any_valid_scenario_round_trips_exactly(
        k in 0.0f64..5000.0,
        x in 0.02f64..0.04,
        y in 0.0f64..0.008,
        vx in 0.1f64..4.0,
        vy in 2.0f64..5.0,
        wa in -60.0f64..60.0,
        wb in -5.0f64..5.0,
        rigid in -10.0f64..10.0,
        opening in 0.0f64..0.3,
        dt in 1e-6f64..1e-4,
        redirect in any::<bool>(),
        locked in any::<bool>(),
        enabled in any::<bool>(),
        explicit in any::<bool>(),
    ) {
        let mut s = default_reference_scenario().with_joint_position(x, y).unwrap();
        s.joint_design.stiffness = k;
        s.launch.com_velocity = [vx, vy];
        s.launch.omega_a0 = wa;
        s.launch.omega_b0 = wb;
        s.launch.phi_open = s.joint_design.latch_angle + opening;
        s.rigid_omega = rigid;
        s.settings.dt = dt;
        s.epj_enabled = enabled;
        s.partition = if redirect { EnergyPartition::Redirect } else { EnergyPartition::PreserveAngle };
        s.initial_latch = if locked { LatchMode::Locked } else { LatchMode::Open };
        if explicit {
            s.geometry = None;
            s.total_mass = None;
        }
        let back = load_scenario(&save_scenario(&s)).unwrap();
        prop_assert_eq!(back, s);
    }
}
