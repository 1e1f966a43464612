//! Beer–Lambert extinction with an exponentially decaying coefficient
//! `α(h) = α₀ e^{-h/h̃}`.

use crate::error::{domain, Result};
use crate::geometry::{altitude_from_slant, slant_range, true_zenith, Elongation};
use crate::quad::{integrate_breaks, Tolerance};
use crate::scalar::{lit, Real};

/// Altitude above which the path integral is truncated (m).
pub const PATH_CEILING: f64 = 100e3;

/// Extinction profile parameters (defaults are for 800 nm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtinctionModel<T> {
    /// Sea-level extinction coefficient (m⁻¹).
    pub alpha0: T,
    /// Scale height (m).
    pub h_tilde: T,
}

impl<T: Real> Default for ExtinctionModel<T> {
    fn default() -> Self {
        Self {
            alpha0: lit(5e-6),
            h_tilde: lit(6600.0),
        }
    }
}

impl<T: Real> ExtinctionModel<T> {
    pub fn new(alpha0: T, h_tilde: T) -> Result<Self> {
        if !(alpha0 > T::zero()) || !(h_tilde > T::zero()) {
            return domain("extinction coefficient and scale height must be positive");
        }
        Ok(Self { alpha0, h_tilde })
    }

    /// Extinction coefficient at altitude `h`.
    pub fn alpha(&self, h: T) -> T {
        self.alpha0 * (-h / self.h_tilde).exp()
    }

    /// Vertical transmissivity from the ground up to altitude `h`.
    pub fn eta_zenith(&self, h: T) -> T {
        (self.alpha0 * self.h_tilde * (-h / self.h_tilde).exp_m1()).exp()
    }

    /// Vertical transmissivity through the whole atmosphere.
    pub fn eta_zenith_inf(&self) -> T {
        (-self.alpha0 * self.h_tilde).exp()
    }

    /// Secant-law transmissivity `η_zen(∞)^{sec θ}`.
    pub fn eta_secant(&self, theta: T) -> T {
        (-self.alpha0 * self.h_tilde / theta.abs().cos()).exp()
    }

    /// Path integral `g(h, θ) = ∫ e^{-h(y,θ)/h̃} dy` along the line of sight
    /// (so that `η = e^{-α₀ g}`), truncated at [`PATH_CEILING`].
    pub fn path_integral(&self, h: T, theta: T) -> Result<T> {
        if !(h >= T::zero()) {
            return domain(format!("altitude must be non-negative, got {h}"));
        }
        let top = h.min(lit(PATH_CEILING));
        let z_top = slant_range(top, theta)?;
        if z_top == T::zero() {
            return Ok(T::zero());
        }
        let t = theta.abs();
        let mut pts = vec![T::zero()];
        for &alt in &[2e3, 8e3, 20e3, 45e3] {
            let a = lit::<T>(alt);
            if a < top {
                pts.push(slant_range(a, theta)?);
            }
        }
        pts.push(z_top);
        let ht = self.h_tilde;
        let f = |y: T| match altitude_from_slant(y, t) {
            Ok(a) => (-a / ht).exp(),
            Err(_) => T::nan(),
        };
        Ok(integrate_breaks(f, &pts, Tolerance::new(0.0, 1e-10))?.value)
    }

    /// Slant-path transmissivity by quadrature.
    pub fn eta(&self, h: T, theta: T) -> Result<T> {
        if theta == T::zero() {
            return Ok(self.eta_zenith(h));
        }
        Ok((-self.alpha0 * self.path_integral(h, theta)?).exp())
    }

    /// Transmissivity along the refracted path for apparent zenith angle
    /// `theta_app`. The elongation scales the path at fixed `θ_app`, so the
    /// path integral scales by the same factor.
    pub fn eta_refracted(&self, h: T, theta_app: T, elongation: &Elongation<T>) -> Result<T> {
        let theta = true_zenith(theta_app)?;
        let g = self.path_integral(h, theta)?;
        Ok((-self.alpha0 * elongation.factor(theta_app) * g).exp())
    }
}

/// Transmissivity expressed as a loss in dB.
pub fn to_db<T: Real>(eta: T) -> T {
    -lit::<T>(10.0) * eta.log10()
}
