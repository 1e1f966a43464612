//! Background thermal photons for up- and downlinks (values at 800 nm).

use crate::beam::ReceiverParams;
use crate::error::{domain, Result};
use crate::scalar::{lit, Real};
use crate::Direction;

/// Solar spectral irradiance (photons m⁻² s⁻¹ nm⁻¹ sr⁻¹).
pub const H_SUN: f64 = 4.61e18;
/// Sky spectral irradiance, clear night with full Moon.
pub const H_SKY_NIGHT: f64 = 1.9e13;
/// Sky spectral irradiance, clear day.
pub const H_SKY_CLEAR_DAY: f64 = 1.9e16;
/// Sky spectral irradiance, cloudy day.
pub const H_SKY_CLOUDY_DAY: f64 = 1.9e18;
/// Earth albedo, which is also the day-time geometric factor.
pub const EARTH_ALBEDO: f64 = 0.3;
pub const MOON_ALBEDO: f64 = 0.12;
pub const MOON_RADIUS: f64 = 1.737e6;
pub const EARTH_MOON_DISTANCE: f64 = 3.84e8;

const PLANCK: f64 = 6.62607015e-34;
const SPEED_OF_LIGHT: f64 = 2.99792458e8;
const BOLTZMANN: f64 = 1.380649e-23;

/// Day or night operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Period {
    Day,
    Night,
}

/// Sky condition seen by a ground receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sky {
    Clear,
    Cloudy,
}

/// `κ_day = A_E`.
pub fn kappa_day<T: Real>() -> T {
    lit(EARTH_ALBEDO)
}

/// `κ_night = A_E A_M R_M²/d_EM²` (Earth and Moon as Lambertian disks).
pub fn kappa_night<T: Real>() -> T {
    let r = lit::<T>(MOON_RADIUS) / lit(EARTH_MOON_DISTANCE);
    lit::<T>(EARTH_ALBEDO) * lit(MOON_ALBEDO) * r * r
}

/// A named noise scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEnvironment<T> {
    pub direction: Direction,
    pub period: Period,
    pub sky: Sky,
    pub h_sun: T,
    pub h_sky: T,
    pub kappa: T,
}

impl<T: Real> NoiseEnvironment<T> {
    pub fn new(direction: Direction, period: Period, sky: Sky) -> Self {
        let h_sky = match (period, sky) {
            (Period::Night, _) => H_SKY_NIGHT,
            (Period::Day, Sky::Clear) => H_SKY_CLEAR_DAY,
            (Period::Day, Sky::Cloudy) => H_SKY_CLOUDY_DAY,
        };
        let kappa = match period {
            Period::Day => kappa_day(),
            Period::Night => kappa_night(),
        };
        Self { direction, period, sky, h_sun: lit(H_SUN), h_sky: lit(h_sky), kappa }
    }

    /// Parses one of `night-up`, `night-down`, `day-up`, `day-down-clear`,
    /// `day-down-cloudy`.
    pub fn from_name(name: &str) -> Result<Self> {
        use Direction::*;
        let (d, p, s) = match name {
            "night-up" => (Up, Period::Night, Sky::Clear),
            "night-down" => (Down, Period::Night, Sky::Clear),
            "day-up" => (Up, Period::Day, Sky::Clear),
            "day-down-clear" => (Down, Period::Day, Sky::Clear),
            "day-down-cloudy" => (Down, Period::Day, Sky::Cloudy),
            other => return domain(format!("unknown scenario '{other}'")),
        };
        Ok(Self::new(d, p, s))
    }

    pub fn name(&self) -> &'static str {
        match (self.direction, self.period, self.sky) {
            (Direction::Up, Period::Night, _) => "night-up",
            (Direction::Down, Period::Night, _) => "night-down",
            (Direction::Up, Period::Day, _) => "day-up",
            (Direction::Down, Period::Day, Sky::Clear) => "day-down-clear",
            (Direction::Down, Period::Day, Sky::Cloudy) => "day-down-cloudy",
        }
    }

    /// Effective spectral irradiance collected by the receiver.
    pub fn irradiance(&self) -> T {
        match self.direction {
            Direction::Up => self.kappa * self.h_sun,
            Direction::Down => self.h_sky,
        }
    }
}

/// Mean background photons per mode `n̄_B` for receiver parameter `Γ_R`.
pub fn nbar_background<T: Real>(env: &NoiseEnvironment<T>, gamma_r: T) -> T {
    env.irradiance() * gamma_r
}

/// Total thermal photons `η_eff n̄_B + n̄_ex` at the receiver.
pub fn nbar_total<T: Real>(env: &NoiseEnvironment<T>, receiver: &ReceiverParams<T>) -> T {
    receiver.eta_eff * nbar_background(env, receiver.gamma_r()) + receiver.n_ex
}

/// Environmental photons `n̄/(1 − τ)` of the equivalent thermal-loss channel.
pub fn nbar_env<T: Real>(nbar: T, tau: T) -> Result<T> {
    if !(tau >= T::zero() && tau < T::one()) {
        return domain(format!("transmissivity {tau} must lie in [0, 1)"));
    }
    Ok(nbar / (T::one() - tau))
}

/// Black-body spectral photon radiance `2cλ⁻⁴/(e^{hc/λkT} − 1)` in photons
/// m⁻² s⁻¹ nm⁻¹ sr⁻¹.
pub fn blackbody_radiance<T: Real>(lambda: T, temperature: T) -> Result<T> {
    if !(lambda > T::zero()) || !(temperature >= T::zero()) {
        return domain("wavelength must be positive and temperature non-negative");
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    let x = lit::<T>(PLANCK * SPEED_OF_LIGHT / BOLTZMANN) / (lambda * temperature);
    let per_m = lit::<T>(2.0 * SPEED_OF_LIGHT) / lambda.powi(4) / x.exp_m1();
    Ok(per_m * lit(1e-9))
}
