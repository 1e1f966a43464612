//! Link budgets, fading-channel capacity bounds and composable CV-QKD key
//! rates for ground/satellite free-space optical links.
//!
//! Every model is generic over the floating point type through [`Real`];
//! the aliases at the crate root fix it to `f64`, which is what the
//! scenario layer and the command-line front end use.

pub mod atmosphere;
pub mod beam;
pub mod bounds;
pub mod cvqkd;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod noise;
pub mod orbit;
pub mod quad;
pub mod scalar;
pub mod scenario;
pub mod special;
pub mod turbulence;

pub use error::{Error, Result};
pub use scalar::Real;

/// Propagation direction of the quantum signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Ground station to satellite.
    Up,
    /// Satellite to ground station.
    Down,
}

pub type LinkGeometry = geometry::LinkGeometry<f64>;
pub type Elongation = geometry::Elongation<f64>;
pub type ExtinctionModel = atmosphere::ExtinctionModel<f64>;
pub type BeamParams = beam::BeamParams<f64>;
pub type ReceiverParams = beam::ReceiverParams<f64>;
pub type TurbulenceProfile = turbulence::Profile<f64>;
pub type SpotSizes = turbulence::SpotSizes<f64>;
pub type FadingModel = fading::FadingModel<f64>;
pub type ProtocolParams = cvqkd::ProtocolParams<f64>;
pub type CircularOrbit = orbit::CircularOrbit<f64>;

/// A non-negative quantity together with its unclamped value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped<T> {
    /// `max(0, raw)`.
    pub value: T,
    /// Value before clamping; may be negative.
    pub raw: T,
}

impl<T: Real> Clamped<T> {
    pub fn new(raw: T) -> Self {
        let value = if raw > T::zero() { raw } else { T::zero() };
        Self { value, raw }
    }

    /// True when the raw value was negative and got clamped.
    pub fn was_clamped(&self) -> bool {
        self.raw < T::zero()
    }
}
