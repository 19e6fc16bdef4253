//! Impulsive impact kinematics for point masses and planar cylinders, and
//! the two-body target solver used by the online replanner.
//!
//! All impacts are instantaneous velocity jumps between two non-rotating
//! bodies. For a robot R and object O with masses `m_R`, `m_O` and a shared
//! restitution coefficient `e`, the post-impact velocities are
//!
//! ```text
//! vR⁺ = m1 vR⁻ + m2 vO⁻        m1 = (m_R − e·m_O)/(m_R + m_O)
//! vO⁺ = m3 vR⁻ + m4 vO⁻        m2 = (1 + e)·m_O/(m_R + m_O)
//!                              m3 = (1 + e)·m_R/(m_R + m_O)
//!                              m4 = (m_O − e·m_R)/(m_R + m_O)
//! ```
//!
//! For finite-radius cylinders the law applies along the contact normal only;
//! each body keeps its tangential velocity component.

use nalgebra::{DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImpactError {
    #[error("mass must be positive (got {0})")]
    NonPositiveMass(f64),
    #[error("radius must be non-negative (got {0})")]
    NegativeRadius(f64),
    #[error("restitution must lie in [0,1] (got {0})")]
    RestitutionOutOfRange(f64),
    #[error("velocity dimensions disagree ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("bodies are not in contact: center distance {distance}, radii sum {radii_sum}")]
    NotInContact { distance: f64, radii_sum: f64 },
    #[error("coincident centers leave the contact normal undefined")]
    DegenerateNormal,
    #[error("desired and predicted object velocities coincide; no impact needed")]
    NoImpactNeeded,
    #[error("impact times must increase (got {0} then {1})")]
    NonIncreasingTimes(f64, f64),
    #[error("prediction time {t} lies after the impact time {t_impact}")]
    PredictionPastImpact { t: f64, t_impact: f64 },
}

/// Inertial and contact parameters of one body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    /// Mass in kg.
    pub mass: f64,
    /// Contact radius in m (0 for the point-mass abstraction).
    pub radius: f64,
    /// Restitution coefficient in [0,1]; a pair impacts with the smaller of
    /// the two bodies' coefficients.
    pub restitution: f64,
}

impl BodyParams {
    pub fn new(mass: f64, radius: f64, restitution: f64) -> Result<Self, ImpactError> {
        if mass <= 0.0 {
            return Err(ImpactError::NonPositiveMass(mass));
        }
        if radius < 0.0 {
            return Err(ImpactError::NegativeRadius(radius));
        }
        if !(0.0..=1.0).contains(&restitution) {
            return Err(ImpactError::RestitutionOutOfRange(restitution));
        }
        Ok(Self {
            mass,
            radius,
            restitution,
        })
    }
}

/// Effective restitution of a pair: the softer material dominates.
pub fn pair_restitution(a: &BodyParams, b: &BodyParams) -> f64 {
    a.restitution.min(b.restitution)
}

/// The four mass fractions `(m1, m2, m3, m4)` of the two-body impact law.
pub fn mass_fractions(robot: &BodyParams, object: &BodyParams) -> (f64, f64, f64, f64) {
    let e = pair_restitution(robot, object);
    let (mr, mo) = (robot.mass, object.mass);
    let total = mr + mo;
    (
        (mr - e * mo) / total,
        (1.0 + e) * mo / total,
        (1.0 + e) * mr / total,
        (mo - e * mr) / total,
    )
}

/// Point-mass impact: applies the 1D law on every axis simultaneously.
pub fn point_impact(
    v_robot: &DVector<f64>,
    v_object: &DVector<f64>,
    robot: &BodyParams,
    object: &BodyParams,
) -> Result<(DVector<f64>, DVector<f64>), ImpactError> {
    if v_robot.len() != v_object.len() {
        return Err(ImpactError::DimensionMismatch(v_robot.len(), v_object.len()));
    }
    let (m1, m2, m3, m4) = mass_fractions(robot, object);
    Ok((v_robot * m1 + v_object * m2, v_robot * m3 + v_object * m4))
}

/// 2D convenience wrapper around [`point_impact`].
pub fn point_impact_2d(
    v_robot: Vector2<f64>,
    v_object: Vector2<f64>,
    robot: &BodyParams,
    object: &BodyParams,
) -> (Vector2<f64>, Vector2<f64>) {
    let (m1, m2, m3, m4) = mass_fractions(robot, object);
    (v_robot * m1 + v_object * m2, v_robot * m3 + v_object * m4)
}

/// Impact law for a known contact normal angle `theta` (direction from the
/// robot center to the object center). Normal components exchange momentum
/// under the restitution law; each body keeps its tangential component.
pub fn impact_along_normal(
    v_robot: Vector2<f64>,
    v_object: Vector2<f64>,
    robot: &BodyParams,
    object: &BodyParams,
    theta: f64,
) -> (Vector2<f64>, Vector2<f64>) {
    let rot = Matrix2::new(theta.cos(), theta.sin(), -theta.sin(), theta.cos());
    let vr = rot * v_robot; // local frame: x along the normal
    let vo = rot * v_object;
    let (m1, m2, m3, m4) = mass_fractions(robot, object);
    let vr_plus = Vector2::new(m1 * vr.x + m2 * vo.x, vr.y);
    let vo_plus = Vector2::new(m3 * vr.x + m4 * vo.x, vo.y);
    let back = rot.transpose();
    (back * vr_plus, back * vo_plus)
}

/// Finite-radius planar impact. Checks contact (`‖xO − xR‖ ≈ rad_R + rad_O`
/// within `contact_tol`), derives the normal angle from the center line and
/// applies [`impact_along_normal`].
pub fn cylinder_impact(
    x_robot: Vector2<f64>,
    x_object: Vector2<f64>,
    v_robot: Vector2<f64>,
    v_object: Vector2<f64>,
    robot: &BodyParams,
    object: &BodyParams,
    contact_tol: f64,
) -> Result<(Vector2<f64>, Vector2<f64>, f64), ImpactError> {
    let line = x_object - x_robot;
    let distance = line.norm();
    if distance <= 1e-12 {
        return Err(ImpactError::DegenerateNormal);
    }
    let radii_sum = robot.radius + object.radius;
    if (distance - radii_sum).abs() > contact_tol * (1.0 + radii_sum) {
        return Err(ImpactError::NotInContact { distance, radii_sum });
    }
    let theta = line.y.atan2(line.x);
    let (vr_plus, vo_plus) = impact_along_normal(v_robot, v_object, robot, object, theta);
    Ok((vr_plus, vo_plus, theta))
}

/// One recorded impact: who hit whom, when, where, and the velocity jump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactEvent {
    pub robot_id: String,
    pub object_id: String,
    pub time: f64,
    pub contact_point: Vector2<f64>,
    /// Contact-normal angle in (−π, π], robot-to-object direction.
    pub normal_angle: f64,
    pub robot_velocity_pre: Vector2<f64>,
    pub robot_velocity_post: Vector2<f64>,
    pub object_velocity_pre: Vector2<f64>,
    pub object_velocity_post: Vector2<f64>,
}

impl ImpactEvent {
    /// Residual of the point-mass impact law on the recorded velocities
    /// (max-norm across the two bodies).
    pub fn point_law_residual(&self, robot: &BodyParams, object: &BodyParams) -> f64 {
        let (vr, vo) = point_impact_2d(
            self.robot_velocity_pre,
            self.object_velocity_pre,
            robot,
            object,
        );
        (vr - self.robot_velocity_post)
            .norm()
            .max((vo - self.object_velocity_post).norm())
    }

    /// Residual of the cylinder impact law along the recorded normal.
    pub fn cylinder_law_residual(&self, robot: &BodyParams, object: &BodyParams) -> f64 {
        let (vr, vo) = impact_along_normal(
            self.robot_velocity_pre,
            self.object_velocity_pre,
            robot,
            object,
            self.normal_angle,
        );
        (vr - self.robot_velocity_post)
            .norm()
            .max((vo - self.object_velocity_post).norm())
    }
}

/// Output of [`solve_two_body_targets`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyTargets {
    /// Contact-normal angle (robot-to-object direction).
    pub theta: f64,
    /// Robot center placement relative to the predicted object center:
    /// `−(rad_R + rad_O)·[cos θ, sin θ]`.
    pub robot_center_offset: Vector2<f64>,
    /// Robot pre-impact velocity to realize the desired object velocity.
    pub robot_velocity: Vector2<f64>,
    /// Object post-impact velocity the returned targets actually achieve.
    pub achieved_object_velocity: Vector2<f64>,
    /// `‖vO⁺ − vO_des‖` at the optimum.
    pub residual: f64,
    /// Set when the residual stays above the exactness threshold.
    pub approximate: bool,
}

/// Weights of the two-body target objective.
#[derive(Debug, Clone, Copy)]
pub struct TwoBodyWeights {
    /// Weight on the object post-velocity error (per axis).
    pub q_object: f64,
    /// Weight on the robot pre-velocity deviation from its prior (per axis).
    pub q_robot: f64,
}

impl Default for TwoBodyWeights {
    fn default() -> Self {
        Self {
            q_object: 1.0,
            q_robot: 1e-6,
        }
    }
}

const THETA_GRID: usize = 256;
const EXACTNESS_THRESHOLD: f64 = 1e-6;

/// Solves the two-body impact targeting problem: find a contact angle and a
/// robot pre-impact velocity so the object leaves the impact with `vO_des`,
/// staying close to the robot's planned velocity `vR_prior`.
///
/// The problem is non-convex in the contact angle; a 256-sample grid over
/// `(−π, π]` (optionally seeded with `theta_hint`) is refined by a local
/// Newton iteration on the grid winner. For each candidate angle the inner
/// problem is an unconstrained convex quadratic in the robot velocity and is
/// solved in closed form.
pub fn solve_two_body_targets(
    v_object_desired: Vector2<f64>,
    v_robot_prior: Vector2<f64>,
    robot: &BodyParams,
    object: &BodyParams,
    v_object_predicted: Vector2<f64>,
    weights: TwoBodyWeights,
    theta_hint: Option<f64>,
) -> Result<TwoBodyTargets, ImpactError> {
    if (v_object_desired - v_object_predicted).norm() <= 1e-12 {
        return Err(ImpactError::NoImpactNeeded);
    }
    let cost_at = |theta: f64| -> (f64, Vector2<f64>, Vector2<f64>) {
        let (vr, vo, cost) = inner_solution(
            theta,
            v_object_desired,
            v_robot_prior,
            v_object_predicted,
            robot,
            object,
            weights,
        );
        (cost, vr, vo)
    };

    let mut best_theta = 0.0;
    let mut best_cost = f64::INFINITY;
    let mut candidates: Vec<f64> = (0..THETA_GRID)
        .map(|i| -std::f64::consts::PI + (i as f64 + 1.0) * 2.0 * std::f64::consts::PI / THETA_GRID as f64)
        .collect();
    if let Some(hint) = theta_hint {
        candidates.push(wrap_angle(hint));
    }
    for theta in candidates {
        let (cost, _, _) = cost_at(theta);
        if cost < best_cost {
            best_cost = cost;
            best_theta = theta;
        }
    }

    // Newton refinement on the 1D reduced cost with numerical derivatives.
    let mut theta = best_theta;
    let eps = 1e-5;
    for _ in 0..30 {
        let (c0, _, _) = cost_at(theta);
        let (cp, _, _) = cost_at(theta + eps);
        let (cm, _, _) = cost_at(theta - eps);
        let grad = (cp - cm) / (2.0 * eps);
        let hess = (cp - 2.0 * c0 + cm) / (eps * eps);
        let step = if hess.abs() > 1e-12 && hess > 0.0 {
            -grad / hess
        } else {
            -grad.signum() * 1e-3
        };
        let step = step.clamp(-0.1, 0.1);
        let candidate = wrap_angle(theta + step);
        let (c1, _, _) = cost_at(candidate);
        if c1 < c0 {
            theta = candidate;
        }
        if step.abs() < 1e-12 {
            break;
        }
    }

    let (_, robot_velocity, achieved) = cost_at(theta);
    let residual = (achieved - v_object_desired).norm();
    let offset = -(robot.radius + object.radius) * Vector2::new(theta.cos(), theta.sin());
    Ok(TwoBodyTargets {
        theta,
        robot_center_offset: offset,
        robot_velocity,
        achieved_object_velocity: achieved,
        residual,
        approximate: residual > EXACTNESS_THRESHOLD,
    })
}

/// Closed-form minimizer over the robot pre-impact velocity for a fixed
/// contact angle, returning (vR, achieved vO⁺, total cost).
fn inner_solution(
    theta: f64,
    v_object_desired: Vector2<f64>,
    v_robot_prior: Vector2<f64>,
    v_object_predicted: Vector2<f64>,
    robot: &BodyParams,
    object: &BodyParams,
    weights: TwoBodyWeights,
) -> (Vector2<f64>, Vector2<f64>, f64) {
    let rot = Matrix2::new(theta.cos(), theta.sin(), -theta.sin(), theta.cos());
    let vo_pred = rot * v_object_predicted;
    let vo_des = rot * v_object_desired;
    let vr_prior = rot * v_robot_prior;
    let (_, _, m3, m4) = mass_fractions(robot, object);

    // Local frame: vO⁺ = [m3 vR_n + m4 vO_n, vO_t]. Only vR_n affects the
    // object. The objective is separable:
    //   q_o (m3 vR_n + m4 vO_n − vO_des_n)² + q_r (vR_n − vR_prior_n)²
    // in the normal axis, plus q_r (vR_t − vR_prior_t)² tangentially.
    let (qo, qr) = (weights.q_object, weights.q_robot);
    let a = qo * m3 * m3 + qr;
    let rhs = qo * m3 * (vo_des.x - m4 * vo_pred.x) + qr * vr_prior.x;
    // The impact law only holds for approaching bodies; clamping to the
    // constraint boundary (vR_n ≥ vO_n) is the exact constrained minimizer
    // of this 1D convex quadratic and rules out phantom tension contacts.
    let vr_n = (rhs / a).max(vo_pred.x);
    let vr_t = vr_prior.y;
    let vr_local = Vector2::new(vr_n, vr_t);
    let vo_plus_local = Vector2::new(m3 * vr_n + m4 * vo_pred.x, vo_pred.y);
    let cost = qo * (vo_plus_local - vo_des).norm_squared()
        + qr * (vr_local - vr_prior).norm_squared();
    let back = rot.transpose();
    (back * vr_local, back * vo_plus_local, cost)
}

fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = (theta + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    }
    t
}

/// Ballistic prediction of the object pose at the impact time.
pub fn predict_preimpact_object_state(
    x_object: Vector2<f64>,
    v_object: Vector2<f64>,
    t: f64,
    t_impact: f64,
) -> Result<Vector2<f64>, ImpactError> {
    if t > t_impact {
        return Err(ImpactError::PredictionPastImpact { t, t_impact });
    }
    Ok(x_object + v_object * (t_impact - t))
}

/// Straight-line velocity bringing the object from the estimated impact
/// position to the next planned impact location on schedule.
pub fn desired_next_object_velocity(
    x_object_at_impact: Vector2<f64>,
    x_next_desired: Vector2<f64>,
    t_impact_i: f64,
    t_impact_i1: f64,
) -> Result<Vector2<f64>, ImpactError> {
    if t_impact_i1 <= t_impact_i {
        return Err(ImpactError::NonIncreasingTimes(t_impact_i, t_impact_i1));
    }
    Ok((x_next_desired - x_object_at_impact) / (t_impact_i1 - t_impact_i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn body(mass: f64, radius: f64, e: f64) -> BodyParams {
        BodyParams::new(mass, radius, e).unwrap()
    }

    #[test]
    fn elastic_equal_mass_impact_swaps_velocities() {
        let b = body(1.0, 0.0, 1.0);
        let (vr, vo) = point_impact(
            &DVector::from_vec(vec![1.0, 0.0]),
            &DVector::from_vec(vec![0.0, 0.0]),
            &b,
            &b,
        )
        .unwrap();
        assert_abs_diff_eq!(vr.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((vo - DVector::from_vec(vec![1.0, 0.0])).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn plastic_equal_mass_impact_moves_together() {
        let b = body(1.0, 0.0, 0.0);
        let (vr, vo) = point_impact(
            &DVector::from_vec(vec![2.0, 0.0]),
            &DVector::from_vec(vec![0.0, 0.0]),
            &b,
            &b,
        )
        .unwrap();
        // Oracle: common post velocity = (mR vR + mO vO)/(mR + mO).
        assert_abs_diff_eq!(vr[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vo[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_relative_velocity_is_a_fixed_point() {
        for e in [0.0, 0.3, 1.0] {
            let b = body(2.0, 0.0, e);
            let v = DVector::from_vec(vec![0.7, -0.2]);
            let (vr, vo) = point_impact(&v, &v, &b, &body(5.0, 0.0, e)).unwrap();
            assert_abs_diff_eq!((vr - &v).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!((vo - &v).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn momentum_and_restitution_hold_for_random_impacts() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let r = body(rng.gen_range(0.2..20.0), 0.0, rng.gen_range(0.0..=1.0));
            let o = body(rng.gen_range(0.2..20.0), 0.0, r.restitution);
            let vr = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let vo = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let (vrp, vop) = point_impact(&vr, &vo, &r, &o).unwrap();
            let p_pre = &vr * r.mass + &vo * o.mass;
            let p_post = &vrp * r.mass + &vop * o.mass;
            assert_abs_diff_eq!((p_pre - p_post).norm(), 0.0, epsilon = 1e-10);
            // Relative velocity reversed and scaled by e on each axis.
            let e = pair_restitution(&r, &o);
            for i in 0..2 {
                assert_abs_diff_eq!(vrp[i] - vop[i], -e * (vr[i] - vo[i]), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn elastic_impacts_conserve_kinetic_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..1000 {
            let r = body(rng.gen_range(0.2..20.0), 0.0, 1.0);
            let o = body(rng.gen_range(0.2..20.0), 0.0, 1.0);
            let vr = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let vo = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let (vrp, vop) = point_impact(&vr, &vo, &r, &o).unwrap();
            let ke_pre = 0.5 * r.mass * vr.norm_squared() + 0.5 * o.mass * vo.norm_squared();
            let ke_post = 0.5 * r.mass * vrp.norm_squared() + 0.5 * o.mass * vop.norm_squared();
            assert_abs_diff_eq!(ke_pre, ke_post, epsilon = 1e-10 * ke_pre.max(1.0));
        }
    }

    #[test]
    fn inelastic_impacts_never_gain_kinetic_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..1000 {
            let e = rng.gen_range(0.0..1.0);
            let r = body(rng.gen_range(0.2..20.0), 0.0, e);
            let o = body(rng.gen_range(0.2..20.0), 0.0, e);
            let vr = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let vo = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let (vrp, vop) = point_impact(&vr, &vo, &r, &o).unwrap();
            let ke_pre = 0.5 * r.mass * vr.norm_squared() + 0.5 * o.mass * vo.norm_squared();
            let ke_post = 0.5 * r.mass * vrp.norm_squared() + 0.5 * o.mass * vop.norm_squared();
            assert!(ke_post <= ke_pre + 1e-10);
        }
    }

    #[test]
    fn scaling_masses_leaves_fractions_unchanged() {
        let r = body(3.0, 0.0, 0.7);
        let o = body(5.0, 0.0, 0.7);
        let scaled_r = body(30.0, 0.0, 0.7);
        let scaled_o = body(50.0, 0.0, 0.7);
        let a = mass_fractions(&r, &o);
        let b = mass_fractions(&scaled_r, &scaled_o);
        assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-15);
        assert_abs_diff_eq!(a.2, b.2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.3, b.3, epsilon = 1e-15);
    }

    #[test]
    fn head_on_cylinder_impact_reduces_to_point_impact() {
        let r = body(2.0, 0.1, 0.8);
        let o = body(1.0, 0.2, 0.8);
        let vr = Vector2::new(1.5, 0.4);
        let vo = Vector2::new(-0.5, 0.2);
        let (vrp, vop, theta) = cylinder_impact(
            Vector2::new(0.0, 0.0),
            Vector2::new(0.3, 0.0),
            vr,
            vo,
            &r,
            &o,
            1e-6,
        )
        .unwrap();
        assert_abs_diff_eq!(theta, 0.0, epsilon = 1e-12);
        let (pr, po) = point_impact_2d(vr, vo, &r, &o);
        // x components follow the point law, y components are untouched.
        assert_abs_diff_eq!(vrp.x, pr.x, epsilon = 1e-12);
        assert_abs_diff_eq!(vop.x, po.x, epsilon = 1e-12);
        assert_abs_diff_eq!(vrp.y, vr.y, epsilon = 1e-12);
        assert_abs_diff_eq!(vop.y, vo.y, epsilon = 1e-12);
    }

    #[test]
    fn grazing_contact_changes_nothing_for_elastic_bodies() {
        let r = body(1.0, 0.1, 1.0);
        let o = body(1.0, 0.1, 1.0);
        // Centers along x; both velocities purely tangential (y).
        let vr = Vector2::new(0.0, 1.0);
        let vo = Vector2::new(0.0, -0.5);
        let (vrp, vop, _) = cylinder_impact(
            Vector2::new(0.0, 0.0),
            Vector2::new(0.2, 0.0),
            vr,
            vo,
            &r,
            &o,
            1e-6,
        )
        .unwrap();
        assert_abs_diff_eq!((vrp - vr).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((vop - vo).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cylinder_impact_conserves_normal_momentum_and_tangential_speeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..500 {
            let r = body(rng.gen_range(0.5..5.0), 0.15, rng.gen_range(0.0..=1.0));
            let o = body(rng.gen_range(0.5..5.0), 0.15, r.restitution);
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let xr = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let xo = xr + 0.3 * Vector2::new(theta.cos(), theta.sin());
            let vr = Vector2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let vo = Vector2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (vrp, vop, theta_out) = cylinder_impact(xr, xo, vr, vo, &r, &o, 1e-6).unwrap();
            let n = Vector2::new(theta_out.cos(), theta_out.sin());
            let t = Vector2::new(-theta_out.sin(), theta_out.cos());
            let momentum_pre = r.mass * vr.dot(&n) + o.mass * vo.dot(&n);
            let momentum_post = r.mass * vrp.dot(&n) + o.mass * vop.dot(&n);
            assert_abs_diff_eq!(momentum_pre, momentum_post, epsilon = 1e-10);
            assert_abs_diff_eq!(vr.dot(&t), vrp.dot(&t), epsilon = 1e-10);
            assert_abs_diff_eq!(vo.dot(&t), vop.dot(&t), epsilon = 1e-10);
        }
    }

    #[test]
    fn cylinder_impact_is_frame_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let r = body(2.0, 0.1, 0.9);
        let o = body(1.0, 0.2, 0.9);
        for _ in 0..100 {
            let base = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let xr = Vector2::new(0.1, -0.4);
            let xo = xr + 0.3 * Vector2::new(base.cos(), base.sin());
            let vr = Vector2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let vo = Vector2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (vrp, vop, _) = cylinder_impact(xr, xo, vr, vo, &r, &o, 1e-6).unwrap();

            let alpha: f64 = rng.gen_range(-3.0..3.0);
            let rot = Matrix2::new(alpha.cos(), -alpha.sin(), alpha.sin(), alpha.cos());
            let (vrp2, vop2, _) =
                cylinder_impact(rot * xr, rot * xo, rot * vr, rot * vo, &r, &o, 1e-6).unwrap();
            assert_abs_diff_eq!((rot * vrp - vrp2).norm(), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!((rot * vop - vop2).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn separated_bodies_are_rejected() {
        let r = body(1.0, 0.1, 1.0);
        let o = body(1.0, 0.1, 1.0);
        let err = cylinder_impact(
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::zeros(),
            Vector2::zeros(),
            &r,
            &o,
            1e-6,
        );
        assert!(matches!(err, Err(ImpactError::NotInContact { .. })));
    }

    #[test]
    fn target_solver_swap_case_recovers_unit_velocity() {
        let r = body(1.0, 0.0, 1.0);
        let o = body(1.0, 0.0, 1.0);
        let out = solve_two_body_targets(
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 0.0),
            &r,
            &o,
            Vector2::zeros(),
            TwoBodyWeights::default(),
            None,
        )
        .unwrap();
        assert_abs_diff_eq!(out.theta, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!((out.robot_velocity - Vector2::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-6);
        assert!(!out.approximate);
        assert_abs_diff_eq!(out.robot_center_offset.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn target_solver_aligns_normal_with_desired_velocity_change() {
        let r = body(1.0, 0.15, 1.0);
        let o = body(1.0, 0.15, 1.0);
        let desired = Vector2::new(1.0, 1.0).normalize() * 0.8;
        let out = solve_two_body_targets(
            desired,
            Vector2::zeros(),
            &r,
            &o,
            Vector2::zeros(),
            TwoBodyWeights::default(),
            None,
        )
        .unwrap();
        assert_abs_diff_eq!(out.theta, std::f64::consts::FRAC_PI_4, epsilon = 1e-4);
        // Placement is behind the object, against the desired direction.
        assert_abs_diff_eq!(
            (out.robot_center_offset + 0.3 * Vector2::new(out.theta.cos(), out.theta.sin())).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn target_solver_matches_theta_grid_search_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let weights = TwoBodyWeights::default();
        for _ in 0..50 {
            let r = body(rng.gen_range(0.5..5.0), 0.15, 1.0);
            let o = body(rng.gen_range(0.5..5.0), 0.15, 1.0);
            let v_des = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let v_pred = Vector2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            if (v_des - v_pred).norm() < 1e-3 {
                continue;
            }
            let prior = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let out =
                solve_two_body_targets(v_des, prior, &r, &o, v_pred, weights, None).unwrap();

            // Oracle: dense grid over theta with cylinder_impact as the
            // forward model of the achieved object velocity. Candidates that
            // would separate instead of approach are skipped.
            let mut best = f64::INFINITY;
            for i in 0..1024 {
                let theta = -std::f64::consts::PI
                    + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / 1024.0;
                let xo = Vector2::zeros();
                let xr = xo - 0.3 * Vector2::new(theta.cos(), theta.sin());
                let n = Vector2::new(theta.cos(), theta.sin());
                let t = Vector2::new(-theta.sin(), theta.cos());
                for k in -40..=40 {
                    let vn = k as f64 * 0.05;
                    let vr = n * vn + t * prior.dot(&t);
                    if (vr - v_pred).dot(&n) < 0.0 {
                        continue;
                    }
                    let (_, vo_plus, _) =
                        cylinder_impact(xr, xo, vr, v_pred, &r, &o, 1e-6).unwrap();
                    let cost = weights.q_object * (vo_plus - v_des).norm_squared()
                        + weights.q_robot * (vr - prior).norm_squared();
                    best = best.min(cost);
                }
            }
            let solver_cost = weights.q_object * out.residual.powi(2)
                + weights.q_robot * (out.robot_velocity - prior).norm_squared();
            assert!(
                solver_cost <= best * 1.01 + 1e-9,
                "solver cost {solver_cost} worse than grid oracle {best}"
            );
        }
    }

    #[test]
    fn target_solver_round_trips_through_cylinder_impact() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        for _ in 0..100 {
            let r = body(rng.gen_range(0.5..5.0), 0.15, 1.0);
            let o = body(rng.gen_range(0.5..5.0), 0.15, 1.0);
            let v_des = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let v_pred = Vector2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            if (v_des - v_pred).norm() < 1e-3 {
                continue;
            }
            let out = solve_two_body_targets(
                v_des,
                Vector2::zeros(),
                &r,
                &o,
                v_pred,
                TwoBodyWeights::default(),
                None,
            )
            .unwrap();
            let xo = Vector2::new(2.0, -1.0);
            let xr = xo + out.robot_center_offset;
            let (_, vo_plus, _) =
                cylinder_impact(xr, xo, out.robot_velocity, v_pred, &r, &o, 1e-6).unwrap();
            assert_abs_diff_eq!(
                (vo_plus - out.achieved_object_velocity).norm(),
                0.0,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn prediction_is_linear_extrapolation() {
        let x = predict_preimpact_object_state(
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 2.0),
            0.0,
            3.0,
        )
        .unwrap();
        assert_abs_diff_eq!((x - Vector2::new(3.0, 6.0)).norm(), 0.0, epsilon = 1e-15);
        let idle = predict_preimpact_object_state(
            Vector2::new(0.4, 0.2),
            Vector2::zeros(),
            1.0,
            9.0,
        )
        .unwrap();
        assert_abs_diff_eq!((idle - Vector2::new(0.4, 0.2)).norm(), 0.0, epsilon = 1e-15);
        assert!(predict_preimpact_object_state(Vector2::zeros(), Vector2::zeros(), 2.0, 1.0).is_err());
    }

    #[test]
    fn desired_velocity_is_straight_line_mean() {
        let v = desired_next_object_velocity(
            Vector2::new(0.0, 0.0),
            Vector2::new(2.0, 0.0),
            1.0,
            5.0,
        )
        .unwrap();
        assert_abs_diff_eq!((v - Vector2::new(0.5, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let hold = desired_next_object_velocity(
            Vector2::new(1.0, 1.0),
            Vector2::new(1.0, 1.0),
            1.0,
            2.0,
        )
        .unwrap();
        assert_abs_diff_eq!(hold.norm(), 0.0, epsilon = 1e-15);
        assert!(desired_next_object_velocity(Vector2::zeros(), Vector2::zeros(), 2.0, 2.0).is_err());
    }

    #[test]
    fn perturbing_impact_position_shifts_desired_velocity_with_inverse_dt_slope() {
        let dt = 4.0;
        let base = desired_next_object_velocity(
            Vector2::new(0.0, 0.0),
            Vector2::new(2.0, 1.0),
            0.0,
            dt,
        )
        .unwrap();
        let shifted = desired_next_object_velocity(
            Vector2::new(0.1, 0.0),
            Vector2::new(2.0, 1.0),
            0.0,
            dt,
        )
        .unwrap();
        assert_abs_diff_eq!(shifted.x - base.x, -0.1 / dt, epsilon = 1e-12);
        assert_abs_diff_eq!(shifted.y - base.y, 0.0, epsilon = 1e-12);
    }
}
