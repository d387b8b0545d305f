//! Small numerical kernels used across the crate: adaptive quadrature,
//! bracketed root finding, an embedded Runge-Kutta stepper and 1-D
//! minimisation.

pub mod minimize;
pub mod ode;
pub mod quadrature;
pub mod roots;
