//! Numerical laboratory for radial Kähler metrics.
//!
//! The crate studies Kähler potentials `v = chi(log(|z|^2 + eps^2))` on the
//! punctured unit ball of C^n: their Monge-Ampère densities, diameters and
//! geodesic distances, moduli of continuity, Orlicz-type integrability of the
//! density, and the Ricci eigenvalues of the smoothing family, together with
//! brute-force oracles that cross-verify every closed-form path.
//!
//! Modules:
//!
//! * [`jet`] — truncated Taylor arithmetic up to order 4.
//! * [`expr`] — expression trees and the profile parser.
//! * [`profile`] — the built-in profile families and custom profiles.
//! * [`quadrature`] — improper-integral convergence classification,
//!   adaptive Gauss-Kronrod, threshold bisection.
//! * [`geometry`] — metric matrix and eigenvalues, Monge-Ampère density,
//!   radial distances, diameter, modulus of continuity, Dini transform.
//! * [`curvature`] — Ricci eigenvalues of the smoothing family, uniform
//!   lower-bound scans, the n=1 minoration polynomial.
//! * [`integrability`] — Condition (K), log/log-log Orlicz weights,
//!   weight-to-modulus lookup, diameter-sufficiency predicates.
//! * [`oracle`] — finite-difference metric/Ricci verifiers, annulus-mesh
//!   shortest paths, a registry of closed-form reference integrals.
//! * [`verify`] — the invariant suites behind `rklab verify`.

pub mod curvature;
mod error;
pub mod expr;
pub mod geometry;
pub mod guide;
pub mod integrability;
pub mod jet;
pub mod oracle;
pub mod profile;
pub mod quadrature;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
