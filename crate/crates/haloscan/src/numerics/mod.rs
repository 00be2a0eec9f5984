//! Shared numerical routines: adaptive quadrature, adaptive Runge-Kutta
//! integration, and small statistics helpers.

pub mod ode;
pub mod quad;
pub mod stats;
