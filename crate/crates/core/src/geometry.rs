//! Ground-station/satellite geometry: slant range, altitude, zenith angle,
//! orbital parametrisation and a single-slab refraction model.
//!
//! All lengths are metres and all angles radians. Zenith angles may be
//! signed; the formulas here only use `|θ|`.

use crate::error::{domain, Result};
use crate::scalar::{lit, Real};

/// Mean Earth radius (m).
pub const EARTH_RADIUS: f64 = 6.371e6;
/// Gravitational constant (N m² kg⁻²).
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674e-11;
/// Earth mass (kg).
pub const EARTH_MASS: f64 = 5.972e24;
/// Surface refractive index of air.
pub const SURFACE_REFRACTIVE_INDEX: f64 = 1.00027;

/// Standard gravitational parameter `G M_E` (m³ s⁻²).
pub fn mu_earth<T: Real>() -> T {
    lit::<T>(GRAVITATIONAL_CONSTANT) * lit(EARTH_MASS)
}

fn check_theta<T: Real>(theta: T) -> Result<T> {
    let t = theta.abs();
    // allow a few ulps of slack so that π/2 computed in T is accepted
    if !(t <= T::FRAC_PI_2() * (T::one() + lit::<T>(4.0) * T::epsilon())) {
        return domain(format!("|theta| = {t} exceeds pi/2"));
    }
    Ok(t.min(T::FRAC_PI_2()))
}

/// A ground-to-satellite line of sight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    /// Satellite altitude above sea level.
    pub h: T,
    /// Signed zenith angle.
    pub theta: T,
    /// Slant range.
    pub z: T,
    /// Ground-station altitude.
    pub h0: T,
}

impl<T: Real> LinkGeometry<T> {
    pub fn new(h: T, theta: T) -> Result<Self> {
        Self::elevated(h, theta, T::zero())
    }

    pub fn elevated(h: T, theta: T, h0: T) -> Result<Self> {
        let z = slant_range_elevated(h, theta, h0)?;
        Ok(Self { h, theta, z, h0 })
    }
}

/// Slant range to a satellite at altitude `h` seen at zenith angle `theta`.
pub fn slant_range<T: Real>(h: T, theta: T) -> Result<T> {
    if !(h >= T::zero()) {
        return domain(format!("altitude must be non-negative, got {h}"));
    }
    let t = check_theta(theta)?;
    let re = lit::<T>(EARTH_RADIUS);
    let rc = re * t.cos();
    // z = √(h² + 2hR + R²cos²θ) − R cos θ, rationalised against cancellation
    let num = h * (h + lit::<T>(2.0) * re);
    let root = (num + rc * rc).sqrt();
    if num == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / (root + rc))
}

/// Altitude of a point at slant range `z` and zenith angle `theta`.
pub fn altitude_from_slant<T: Real>(z: T, theta: T) -> Result<T> {
    if !(z >= T::zero()) {
        return domain(format!("slant range must be non-negative, got {z}"));
    }
    let c = theta.abs().cos();
    let re = lit::<T>(EARTH_RADIUS);
    let num = z * (z + lit::<T>(2.0) * re * c);
    if num == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / ((re * re + num).sqrt() + re))
}

/// Zenith angle in `[0, π/2]` of a point at slant range `z` and altitude `h`.
pub fn zenith_from<T: Real>(z: T, h: T) -> Result<T> {
    if !(z > T::zero()) {
        return domain(format!("slant range must be positive, got {z}"));
    }
    let re = lit::<T>(EARTH_RADIUS);
    let c = h / z + (h * h - z * z) / (lit::<T>(2.0) * z * re);
    let slack = lit::<T>(1e-12).max(lit::<T>(16.0) * T::epsilon());
    if c > T::one() + slack || c < -slack {
        return domain(format!("inconsistent (z, h) pair: cos(theta) = {c}"));
    }
    Ok(c.max(T::zero()).min(T::one()).acos())
}

/// Slant range from a ground station at altitude `h0`.
pub fn slant_range_elevated<T: Real>(h: T, theta: T, h0: T) -> Result<T> {
    if !(h0 >= T::zero()) || !(h0 < h) {
        if h0 == T::zero() && h == T::zero() {
            return Ok(T::zero());
        }
        return domain(format!("need 0 <= h0 < h, got h0 = {h0}, h = {h}"));
    }
    let t = check_theta(theta)?;
    let re = lit::<T>(EARTH_RADIUS);
    let rs = re + h;
    let rg = re + h0;
    let c = t.cos();
    // z = √(R_S² − R_G² sin²θ) − R_G cos θ
    let num = (rs - rg) * (rs + rg);
    let root = (rs * rs - rg * rg * (T::one() - c * c)).sqrt();
    Ok(num / (root + rg * c))
}

/// Inverse of [`slant_range_elevated`].
pub fn altitude_elevated<T: Real>(z: T, theta: T, h0: T) -> Result<T> {
    if !(z >= T::zero()) || !(h0 >= T::zero()) {
        return domain("slant range and station altitude must be non-negative");
    }
    let c = theta.abs().cos();
    let re = lit::<T>(EARTH_RADIUS);
    let rg = re + h0;
    // √(R_G² + z² + 2zR_G cos θ) − R_E
    let num = z * (z + lit::<T>(2.0) * rg * c) + h0 * (lit::<T>(2.0) * re + h0);
    Ok(num / ((rg * rg + z * (z + lit::<T>(2.0) * rg * c)).sqrt() + re))
}

/// Slant range to a satellite on a circular orbit of radius `r_s` at
/// orbital angle `alpha` from the station's zenith.
pub fn slant_orbital<T: Real>(r_s: T, alpha: T) -> Result<T> {
    let re = lit::<T>(EARTH_RADIUS);
    if !(r_s > re) {
        return domain(format!("orbital radius {r_s} is inside the Earth"));
    }
    // law of cosines written as (R_S − R_E)² + 4 R_E R_S sin²(α/2)
    let s = (alpha * lit(0.5)).sin();
    let d = r_s - re;
    Ok((d * d + lit::<T>(4.0) * re * r_s * s * s).sqrt())
}

/// Apparent zenith angle after refraction through a single uniform slab.
pub fn apparent_zenith<T: Real>(theta: T) -> T {
    (theta.sin() / lit(SURFACE_REFRACTIVE_INDEX)).asin()
}

/// True zenith angle corresponding to an apparent one.
pub fn true_zenith<T: Real>(theta_app: T) -> Result<T> {
    let s = lit::<T>(SURFACE_REFRACTIVE_INDEX) * theta_app.sin();
    if s.abs() > T::one() {
        return domain(format!("n0 sin(theta_app) = {s} exceeds one"));
    }
    Ok(s.asin())
}

/// Path elongation factor `ε(θ_app) ≥ 1` as a tabulated function with
/// linear interpolation and flat extrapolation. The empty table is the
/// identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Elongation<T> {
    nodes: Vec<(T, T)>,
}

impl<T: Real> Elongation<T> {
    pub fn identity() -> Self {
        Self { nodes: Vec::new() }
    }

    /// Builds a table from `(θ_app, factor)` pairs; angles must be strictly
    /// increasing and factors at least one.
    pub fn from_table(nodes: Vec<(T, T)>) -> Result<Self> {
        for w in nodes.windows(2) {
            if !(w[1].0 > w[0].0) {
                return domain("elongation table angles must increase");
            }
        }
        if nodes.iter().any(|&(_, f)| !(f >= T::one())) {
            return domain("elongation factors must be >= 1");
        }
        Ok(Self { nodes })
    }

    pub fn factor(&self, theta_app: T) -> T {
        let t = theta_app.abs();
        match self.nodes.as_slice() {
            [] => T::one(),
            [only] => only.1,
            nodes => {
                if t <= nodes[0].0 {
                    return nodes[0].1;
                }
                for w in nodes.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if t <= x1 {
                        return y0 + (y1 - y0) * (t - x0) / (x1 - x0);
                    }
                }
                nodes[nodes.len() - 1].1
            }
        }
    }
}

/// Refracted slant range `ε(θ_app) · z(h, arcsin(n0 sin θ_app))`.
pub fn refracted_slant<T: Real>(h: T, theta_app: T, elongation: &Elongation<T>) -> Result<T> {
    let theta = true_zenith(theta_app)?;
    Ok(elongation.factor(theta_app) * slant_range(h, theta)?)
}
