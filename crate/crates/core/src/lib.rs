//! Free-vibration and supersonic flutter analysis of flat laminated
//! composite panels.
//!
//! The plate kinematics use a hierarchical through-thickness expansion
//! (sinusoidal in-plane, quadratic transverse terms), discretized with
//! field-consistent 4-node quadrilaterals. Aerodynamic loads come from
//! first-order piston theory; flutter is located by tracking eigenvalue
//! coalescence (undamped) or the zero crossing of the largest modal growth
//! rate (with aerodynamic damping).

pub mod assembly;
pub mod eigen;
pub mod fem;
pub mod kinematics;
pub mod laminate;
pub mod quadrature;
pub mod sparse;
pub mod flutter;
pub mod model;
