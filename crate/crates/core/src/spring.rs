//! Spring geometry across the joint: length by the law of cosines, linear
//! elastic force, and the torque it exerts about axis O.

use std::f64::consts::PI;

use crate::error::{EpjError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringGeometry {
    /// |OC|, m.
    pub arm_oc: f64,
    /// |OD|, m.
    pub arm_od: f64,
    pub natural_length: f64,
    /// N/m.
    pub stiffness: f64,
    pub tension_only: bool,
}

/// Everything the spring does at one joint angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLoad {
    pub length: f64,
    pub elongation: f64,
    pub force: f64,
    pub torque: f64,
    /// Sine of the angle between arm OC and the spring line CD.
    pub sin_phi1: f64,
}

fn check_angle(phi: f64) -> Result<()> {
    if (0.0..=PI).contains(&phi) {
        Ok(())
    } else {
        Err(EpjError::Domain { phi })
    }
}

pub fn spring_length(g: &SpringGeometry, phi: f64) -> Result<f64> {
    check_angle(phi)?;
    let sq = g.arm_oc * g.arm_oc + g.arm_od * g.arm_od - 2.0 * g.arm_oc * g.arm_od * phi.cos();
    // cancellation can leave a tiny negative when the arms are equal and phi ~ 0
    Ok(sq.max(0.0).sqrt())
}

fn force_from_elongation(g: &SpringGeometry, elongation: f64) -> f64 {
    let f = g.stiffness * elongation;
    if g.tension_only {
        f.max(0.0)
    } else {
        f
    }
}

/// `k (L - L0)`. Negative when compressed unless the spring is tension-only.
pub fn spring_force(g: &SpringGeometry, phi: f64) -> Result<f64> {
    let l = spring_length(g, phi)?;
    Ok(force_from_elongation(g, l - g.natural_length))
}

/// Torque magnitude applied to each mechanism, `F l_OC sin φ1` with
/// `sin φ1 = (l_OD / L) sin φ`. Positive closes the joint.
pub fn joint_torque(g: &SpringGeometry, phi: f64) -> Result<f64> {
    joint_load(g, phi).map(|load| load.torque)
}

pub fn joint_load(g: &SpringGeometry, phi: f64) -> Result<JointLoad> {
    let length = spring_length(g, phi)?;
    if length == 0.0 {
        return Err(EpjError::Singular);
    }
    let elongation = length - g.natural_length;
    let force = force_from_elongation(g, elongation);
    let sin_phi1 = (g.arm_od / length * phi.sin()).clamp(-1.0, 1.0);
    Ok(JointLoad {
        length,
        elongation,
        force,
        torque: force * g.arm_oc * sin_phi1,
        sin_phi1,
    })
}

/// Elastic energy stored at angle `phi`. `dU/dφ` equals the joint torque, so
/// a positive torque drives φ downhill.
pub fn potential_energy(g: &SpringGeometry, phi: f64) -> Result<f64> {
    let e = spring_length(g, phi)? - g.natural_length;
    let e = if g.tension_only { e.max(0.0) } else { e };
    Ok(0.5 * g.stiffness * e * e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn geom(k: f64, l0: f64) -> SpringGeometry {
        SpringGeometry {
            arm_oc: 0.03,
            arm_od: 0.04,
            natural_length: l0,
            stiffness: k,
            tension_only: false,
        }
    }

    #[test]
    fn length_examples() {
        let g = geom(1566.0, 0.03);
        assert!((spring_length(&g, FRAC_PI_2).unwrap() - 0.05).abs() < 1e-15);
        assert!((spring_length(&g, 0.0).unwrap() - 0.01).abs() < 1e-15);
        assert!((spring_length(&g, PI).unwrap() - 0.07).abs() < 1e-15);
    }

    #[test]
    fn length_rejects_out_of_domain() {
        let g = geom(1566.0, 0.03);
        assert_eq!(spring_length(&g, -0.1), Err(EpjError::Domain { phi: -0.1 }));
        assert!(spring_length(&g, PI + 1e-9).is_err());
    }

    #[test]
    fn force_examples() {
        let g = geom(1566.0, 0.03);
        // 1566 * (0.05 - 0.03)
        assert!((spring_force(&g, FRAC_PI_2).unwrap() - 31.32).abs() < 1e-12);
        let relaxed = geom(1566.0, 0.05);
        assert!(spring_force(&relaxed, FRAC_PI_2).unwrap().abs() < 1e-12);
        let limp = geom(0.0, 0.03);
        for phi in [0.0, 0.4, 1.3, PI] {
            assert_eq!(spring_force(&limp, phi).unwrap(), 0.0);
        }
    }

    #[test]
    fn torque_examples() {
        let g = geom(1566.0, 0.03);
        // 1566 * 0.03 * 0.02 * (0.04 / 0.05)
        assert!((joint_torque(&g, FRAC_PI_2).unwrap() - 0.75168).abs() < 1e-12);
        assert_eq!(joint_torque(&g, 0.0).unwrap(), 0.0);
        let relaxed = geom(1566.0, 0.05);
        assert!(joint_torque(&relaxed, FRAC_PI_2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn torque_singular_when_arms_fold_flat() {
        let g = SpringGeometry {
            arm_oc: 0.03,
            arm_od: 0.03,
            natural_length: 0.0,
            stiffness: 10.0,
            tension_only: false,
        };
        assert_eq!(joint_torque(&g, 0.0), Err(EpjError::Singular));
    }

    #[test]
    fn compression_pushes_unless_tension_only() {
        let mut g = geom(1000.0, 0.06);
        assert!(spring_force(&g, FRAC_PI_2).unwrap() < 0.0);
        assert!(joint_torque(&g, FRAC_PI_2).unwrap() < 0.0);
        g.tension_only = true;
        assert_eq!(spring_force(&g, FRAC_PI_2).unwrap(), 0.0);
        assert_eq!(joint_torque(&g, FRAC_PI_2).unwrap(), 0.0);
        assert_eq!(potential_energy(&g, FRAC_PI_2).unwrap(), 0.0);
    }

    #[test]
    fn torque_is_energy_gradient() {
        let g = geom(1566.0, 0.035);
        for phi in [0.3, 1.0, 1.7, 2.6] {
            let h = 1e-6;
            let du = (potential_energy(&g, phi + h).unwrap()
                - potential_energy(&g, phi - h).unwrap())
                / (2.0 * h);
            // dU/dphi = k (L - L0) dL/dphi = M
            let m = joint_torque(&g, phi).unwrap();
            assert!(
                (du - m).abs() < 1e-7 * m.abs().max(1e-3),
                "{phi}: {du} vs {m}"
            );
        }
    }

    fn arms() -> impl Strategy<Value = (f64, f64)> {
        (1e-3..0.2f64, 1e-3..0.2f64)
    }

    proptest! {
        #[test]
        fn length_bounded_by_arm_sum_and_difference((a, b) in arms(), phi in 0.0..=PI) {
            let g = SpringGeometry { arm_oc: a, arm_od: b, natural_length: 0.0, stiffness: 1.0, tension_only: false };
            let l = spring_length(&g, phi).unwrap();
            prop_assert!(l >= (a - b).abs() - 1e-15);
            prop_assert!(l <= a + b + 1e-15);
        }

        #[test]
        fn length_increases_with_angle((a, b) in arms(), p in 1e-3..(PI - 1e-3), dp in 1e-6..1e-2f64) {
            let g = SpringGeometry { arm_oc: a, arm_od: b, natural_length: 0.0, stiffness: 1.0, tension_only: false };
            let q = (p + dp).min(PI);
            prop_assert!(spring_length(&g, q).unwrap() > spring_length(&g, p).unwrap());
        }

        #[test]
        fn length_symmetric_in_arms((a, b) in arms(), phi in 0.0..=PI) {
            let g = SpringGeometry { arm_oc: a, arm_od: b, natural_length: 0.0, stiffness: 1.0, tension_only: false };
            let h = SpringGeometry { arm_oc: b, arm_od: a, ..g };
            let (lg, lh) = (spring_length(&g, phi).unwrap(), spring_length(&h, phi).unwrap());
            prop_assert!((lg - lh).abs() <= 1e-15 * (a + b));
        }

        #[test]
        fn torque_factorizes((a, b) in arms(), l0 in 0.0..0.3f64, k in 0.0..5000.0f64, phi in 1e-3..=PI) {
            let g = SpringGeometry { arm_oc: a, arm_od: b, natural_length: l0, stiffness: k, tension_only: false };
            let load = joint_load(&g, phi).unwrap();
            let f = spring_force(&g, phi).unwrap();
            prop_assert_eq!(load.torque, f * a * load.sin_phi1);
            prop_assert!(load.sin_phi1.abs() <= 1.0);
            prop_assert_eq!(load.force, k * load.elongation);
        }

        #[test]
        fn torque_vanishes_at_natural_length((a, b) in arms(), phi in 1e-3..(PI - 1e-3)) {
            let l = spring_length(&SpringGeometry { arm_oc: a, arm_od: b, natural_length: 0.0, stiffness: 1.0, tension_only: false }, phi).unwrap();
            let g = SpringGeometry { arm_oc: a, arm_od: b, natural_length: l, stiffness: 1234.0, tension_only: false };
            prop_assert_eq!(joint_torque(&g, phi).unwrap(), 0.0);
        }
    }
}
