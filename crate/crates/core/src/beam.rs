//! Gaussian-beam diffraction, aperture transmissivity and the loss-only
//! repeaterless bounds.

use crate::atmosphere::ExtinctionModel;
use crate::error::{domain, Result};
use crate::geometry::slant_range;
use crate::scalar::{lit, Real};

/// Transmitted Gaussian beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams<T> {
    /// Wavelength (m).
    pub lambda: T,
    /// Initial field spot size (m).
    pub w0: T,
    /// Curvature radius (m); `None` is a collimated beam.
    pub r0: Option<T>,
}

impl<T: Real> BeamParams<T> {
    pub fn collimated(lambda: T, w0: T) -> Result<Self> {
        Self::new(lambda, w0, None)
    }

    pub fn new(lambda: T, w0: T, r0: Option<T>) -> Result<Self> {
        if !(lambda > T::zero()) || !(w0 > T::zero()) {
            return domain("wavelength and waist must be positive");
        }
        if let Some(r) = r0 {
            if !(r > T::zero()) {
                return domain("curvature radius must be positive");
            }
        }
        Ok(Self { lambda, w0, r0 })
    }

    /// Wavenumber `2π/λ`.
    pub fn k(&self) -> T {
        lit::<T>(2.0) * T::PI() / self.lambda
    }

    /// Rayleigh range `π w0²/λ`.
    pub fn rayleigh_range(&self) -> T {
        T::PI() * self.w0 * self.w0 / self.lambda
    }

    /// Diffraction-limited spot size at distance `z`.
    pub fn waist(&self, z: T) -> T {
        let zr = self.rayleigh_range();
        let focus = match self.r0 {
            Some(r) => T::one() - z / r,
            None => T::one(),
        };
        self.w0 * (focus * focus + (z / zr) * (z / zr)).sqrt()
    }
}

/// Receiver (telescope plus detection) parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverParams<T> {
    /// Aperture radius (m).
    pub a_r: T,
    /// Angular field of view (sr).
    pub omega_fov: T,
    /// Detection time window (s).
    pub delta_t: T,
    /// Spectral filter width (m).
    pub delta_lambda: T,
    /// Setup efficiency.
    pub eta_eff: T,
    /// Trusted excess photons at the receiver.
    pub n_ex: T,
}

impl<T: Real> ReceiverParams<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.a_r, self.omega_fov, self.delta_t, self.delta_lambda];
        if pos.iter().any(|v| !(*v > T::zero())) {
            return domain("receiver aperture, field of view, time window and filter must be positive");
        }
        if !(self.eta_eff > T::zero() && self.eta_eff <= T::one()) {
            return domain("setup efficiency must lie in (0, 1]");
        }
        if !(self.n_ex >= T::zero()) {
            return domain("excess noise must be non-negative");
        }
        Ok(())
    }

    /// `Γ_R = Δλ[nm] Δt Ω a_R²` (m² s nm sr).
    pub fn gamma_r(&self) -> T {
        self.delta_lambda * lit(1e9) * self.delta_t * self.omega_fov * self.a_r * self.a_r
    }
}

/// Aperture transmissivity `1 − exp(−2a²/w²)` for a spot of size `w`.
pub fn eta_aperture<T: Real>(a_r: T, w: T) -> T {
    -(-lit::<T>(2.0) * a_r * a_r / (w * w)).exp_m1()
}

/// Far-field aperture transmissivity `2a²/w²`.
pub fn eta_aperture_far<T: Real>(a_r: T, w: T) -> T {
    lit::<T>(2.0) * a_r * a_r / (w * w)
}

/// Diffraction-induced transmissivity at distance `z`.
pub fn eta_diffraction<T: Real>(z: T, beam: &BeamParams<T>, a_r: T) -> T {
    eta_aperture(a_r, beam.waist(z))
}

/// Far-field form of [`eta_diffraction`].
pub fn eta_diffraction_far<T: Real>(z: T, beam: &BeamParams<T>, a_r: T) -> T {
    eta_aperture_far(a_r, beam.waist(z))
}

/// Repeaterless capacity `−log₂(1 − η)` of a pure-loss channel. Returns
/// `+∞` for `η = 1`.
pub fn plob<T: Real>(eta: T) -> T {
    if eta >= T::one() {
        return T::infinity();
    }
    -(-eta).ln_1p() / T::LN_2()
}

/// Far-field diffraction bound `(2/ln 2) a²/w_d²`.
pub fn diffraction_bound<T: Real>(z: T, beam: &BeamParams<T>, a_r: T) -> T {
    eta_diffraction_far(z, beam, a_r) / T::LN_2()
}

/// Fixed-loss budget `η_eff η_atm η_d` at altitude `h` and zenith angle `θ`.
pub fn eta_total<T: Real>(
    h: T,
    theta: T,
    beam: &BeamParams<T>,
    receiver: &ReceiverParams<T>,
    atm: &ExtinctionModel<T>,
) -> Result<T> {
    let z = slant_range(h, theta)?;
    Ok(receiver.eta_eff * atm.eta(h, theta)? * eta_diffraction(z, beam, receiver.a_r))
}

/// Bound `V = −log₂(1 − η_tot)` including extinction and efficiency.
pub fn bound_v<T: Real>(
    h: T,
    theta: T,
    beam: &BeamParams<T>,
    receiver: &ReceiverParams<T>,
    atm: &ExtinctionModel<T>,
) -> Result<T> {
    Ok(plob(eta_total(h, theta, beam, receiver, atm)?))
}
