//! impactplan: planning and control for transporting free-floating objects
//! through impulsive robot-object impacts.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: Bézier curves, phased (space/time separated) paths,
//!   zonotopes, axis-aligned boxes and halfspace polytopes.
//! - [`impact`]: impulsive impact kinematics for point masses and planar
//!   cylinders, plus the two-body impact target solver used online.
//! - [`stl`]: signal temporal logic formulas, parser and an exact
//!   quantitative monitor over piecewise-linear signals.
//! - [`mip`]: a self-contained mixed-integer linear/quadratic solver
//!   (branch and bound over simplex / active-set relaxations).
//! - [`planner`]: offline multi-robot impact planning as an MILP/MIQP,
//!   in spatially-robust and impact-robust variants.
//! - [`replanner`]: online convex re-planning of the next impact for
//!   finite-size bodies.
//! - [`control`]: impact-aware model predictive control for planar rigid
//!   bodies, plus the velocity-keeping controller used to emulate
//!   free-floating objects on actuated platforms.
//! - [`sim`]: a deterministic 2D frictionless physics simulator with
//!   impact resolution, disturbance injection and run logging.

pub mod config;
pub mod control;
pub mod geometry;
pub mod impact;
pub mod mip;
pub mod planner;
pub mod replanner;
pub mod sim;
pub mod stl;

pub use config::NumericConfig;
pub use geometry::{BezierCurve, HPolytope, IntervalBox, PhasedPath, SegmentLabel, Zonotope};
pub use impact::{BodyParams, ImpactEvent};
