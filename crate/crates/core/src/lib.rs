//! Stochastic geometry of random spherical triangles.
//!
//! The crate covers the distribution theory of triangles with independent
//! uniform vertices on the unit sphere: exact spherical trigonometry
//! ([`sphere`]), seeded samplers including conditional ones ([`sampling`]),
//! closed-form densities ([`densities`]), the special functions their
//! moments need ([`special`]), singular-endpoint quadrature
//! ([`quadrature`]), bivariate moment computations ([`moments`]),
//! great-circle arrangements ([`tessellation`]), and a constants engine
//! that evaluates every quantity along several routes ([`verification`]).

pub mod densities;
pub mod moments;
pub mod quadrature;
pub mod sampling;
pub mod special;
pub mod sphere;
pub mod stats;
pub mod tessellation;
pub mod verification;
