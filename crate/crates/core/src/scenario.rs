//! Ready-made `f64` link scenarios: the four receiver setups, the five
//! noise environments and the pipeline from geometry to fading model,
//! bounds and key rates.

use crate::{BeamParams, ExtinctionModel, FadingModel, ProtocolParams, ReceiverParams};
use crate::beam::{bound_v, diffraction_bound, plob};
use crate::bounds::{bound_b, max_range_simple, max_range_tight, thermal_lower, thermal_upper, MaxRange, RangeSearch};
use crate::cvqkd::{secret_key_rate, PostSelectedRate};
use crate::error::{domain, Result};
use crate::fading::{pointing_variance, POINTING_ERROR};
use crate::geometry::{altitude_from_slant, slant_range};
use crate::noise::{nbar_total, NoiseEnvironment, Period};
use crate::orbit::{orbital_rate, CircularOrbit, Slice};
use crate::turbulence::{spot_sizes, spot_sizes_exact, Profile, PsiForm, SpotSizes};
use crate::Direction;

/// Wavelength used by every setup (m).
pub const WAVELENGTH: f64 = 800e-9;

/// Beam and receiver preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub id: u8,
    /// Initial spot size (m).
    pub w0: f64,
    /// Aperture radius (m).
    pub a_r: f64,
    /// Spectral filter (m).
    pub delta_lambda: f64,
}

pub const SETUPS: [Setup; 4] = [
    Setup { id: 1, w0: 0.2, a_r: 0.4, delta_lambda: 1e-9 },
    Setup { id: 2, w0: 0.4, a_r: 1.0, delta_lambda: 1e-9 },
    Setup { id: 3, w0: 0.4, a_r: 2.0, delta_lambda: 1e-9 },
    Setup { id: 4, w0: 0.4, a_r: 2.0, delta_lambda: 1e-13 },
];

pub fn setup(id: u8) -> Result<Setup> {
    SETUPS
        .iter()
        .copied()
        .find(|s| s.id == id)
        .ok_or_else(|| crate::Error::Domain(format!("setup must be 1..4, got {id}")))
}

/// How the atmospheric extinction along the slant path is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtmosphereMode {
    /// `exp(−α₀ h̃ sec θ)`, the flat-Earth limit above the atmosphere.
    Secant,
    /// Path integral over the curved geometry.
    Quadrature,
}

/// Which spot-size formulas are used on the uplink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpotModel {
    /// Closed forms with the planar coherence length.
    Simplified,
    /// Quadrature coherence length along the path.
    Exact(PsiForm),
}

/// A fully specified ground/satellite link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    pub env: NoiseEnvironment<f64>,
    pub beam: BeamParams,
    pub receiver: ReceiverParams,
    pub extinction: ExtinctionModel,
    pub profile: Profile<f64>,
    /// Integrated turbulence strength of `profile`.
    pub i_infty: f64,
    pub atmosphere: AtmosphereMode,
    pub spot_model: SpotModel,
    /// Pointing error (rad).
    pub pointing_error: f64,
}

/// Channel state at one point of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub h: f64,
    pub theta: f64,
    pub z: f64,
    pub eta_atm: f64,
    pub spots: SpotSizes<f64>,
    pub model: FadingModel,
    pub nbar: f64,
}

/// Bounds at one point, in bits per use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub eta: f64,
    pub nbar: f64,
    pub u: f64,
    pub v: f64,
    pub b: f64,
    pub thermal_upper: f64,
    pub thermal_lower: f64,
    pub thermal_lower_simple: f64,
}

/// Summary of one zenith-crossing pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PassReport {
    pub h: f64,
    pub t_q: f64,
    pub t_t: f64,
    pub orbits_per_day: f64,
    pub slices: Vec<Slice<f64>>,
    pub per_slice_rate: Vec<f64>,
    pub r_orb: f64,
    pub bits_per_pass: f64,
    /// Only the zenith-crossing pass is counted.
    pub bits_per_day: f64,
    pub warning: Option<String>,
}

impl LinkScenario {
    /// Scenario from an environment name (`night-up`, `day-down-clear`, ...)
    /// and a setup number. Day environments use the day turbulence profile.
    pub fn new(env_name: &str, setup_id: u8) -> Result<Self> {
        let env = NoiseEnvironment::from_name(env_name)?;
        let s = setup(setup_id)?;
        let profile = match env.period {
            Period::Day => Profile::hv_day(),
            Period::Night => Profile::hv_night(),
        };
        let receiver = ReceiverParams {
            a_r: s.a_r,
            omega_fov: 1e-10,
            delta_t: 10e-9,
            delta_lambda: s.delta_lambda,
            eta_eff: 0.4,
            n_ex: 0.0,
        };
        Ok(Self {
            env,
            beam: BeamParams::collimated(WAVELENGTH, s.w0)?,
            receiver,
            extinction: ExtinctionModel::default(),
            i_infty: profile.i_infty()?,
            profile,
            atmosphere: AtmosphereMode::Quadrature,
            spot_model: SpotModel::Simplified,
            pointing_error: POINTING_ERROR,
        })
    }

    pub fn with_profile(mut self, profile: Profile<f64>) -> Result<Self> {
        self.i_infty = profile.i_infty()?;
        self.profile = profile;
        Ok(self)
    }

    pub fn direction(&self) -> Direction {
        self.env.direction
    }

    pub fn validate(&self) -> Result<()> {
        self.receiver.validate()?;
        if !(self.pointing_error >= 0.0) {
            return domain("pointing error must be non-negative");
        }
        Ok(())
    }

    /// Thermal photons at the receiver `η_eff n̄_B + n̄_ex`.
    pub fn nbar(&self) -> f64 {
        nbar_total(&self.env, &self.receiver)
    }

    pub fn eta_atm(&self, h: f64, theta: f64) -> Result<f64> {
        match self.atmosphere {
            AtmosphereMode::Secant => Ok(self.extinction.eta_secant(theta)),
            AtmosphereMode::Quadrature => self.extinction.eta(h, theta),
        }
    }

    fn spots(&self, z: f64, theta: f64) -> Result<SpotSizes<f64>> {
        let dir = self.direction();
        match self.spot_model {
            SpotModel::Simplified => spot_sizes(z, theta, &self.beam, self.i_infty, dir),
            SpotModel::Exact(form) => spot_sizes_exact(z, theta, &self.beam, &self.profile, dir, form),
        }
    }

    /// Channel state at altitude `h` and zenith angle `theta`.
    pub fn state(&self, h: f64, theta: f64) -> Result<LinkState> {
        let z = slant_range(h, theta)?;
        self.state_with(h, theta, z)
    }

    /// Channel state at slant range `z` and zenith angle `theta`.
    pub fn state_at_range(&self, z: f64, theta: f64) -> Result<LinkState> {
        let h = altitude_from_slant(z, theta)?;
        self.state_with(h, theta, z)
    }

    fn state_with(&self, h: f64, theta: f64, z: f64) -> Result<LinkState> {
        let eta_atm = self.eta_atm(h, theta)?;
        let spots = self.spots(z, theta)?;
        let sigma2 = spots.sigma_tb2 + pointing_variance(z, self.pointing_error);
        let model = FadingModel::new(self.receiver.eta_eff * eta_atm, self.receiver.a_r, spots.w_st, sigma2)?;
        Ok(LinkState { h, theta, z, eta_atm, spots, model, nbar: self.nbar() })
    }

    /// U, V, B and the thermal bounds at `(h, θ)`.
    pub fn bounds_at(&self, h: f64, theta: f64) -> Result<BoundsRow> {
        let st = self.state(h, theta)?;
        let m = &st.model;
        let u = diffraction_bound(st.z, &self.beam, self.receiver.a_r);
        let v = match self.atmosphere {
            AtmosphereMode::Quadrature => bound_v(h, theta, &self.beam, &self.receiver, &self.extinction)?,
            AtmosphereMode::Secant => {
                let eta_d = crate::beam::eta_diffraction(st.z, &self.beam, self.receiver.a_r);
                plob(self.receiver.eta_eff * st.eta_atm * eta_d)
            }
        };
        let lower = thermal_lower(st.nbar, m)?;
        Ok(BoundsRow {
            eta: m.eta,
            nbar: st.nbar,
            u,
            v,
            b: bound_b(m.eta, m)?,
            thermal_upper: thermal_upper(st.nbar, m)?.value,
            thermal_lower: lower.integral.value,
            thermal_lower_simple: lower.simple.value,
        })
    }

    /// Post-selected composable key rate at `(h, θ)`.
    pub fn rate_at(&self, h: f64, theta: f64, params: &ProtocolParams) -> Result<PostSelectedRate<f64>> {
        let st = self.state(h, theta)?;
        secret_key_rate(&st.model, st.nbar, params)
    }

    /// Tight maximum slant range at fixed zenith angle.
    pub fn max_range_tight(&self, theta: f64, search: RangeSearch<f64>) -> Result<MaxRange<f64>> {
        max_range_tight(
            |z| {
                let st = self.state_at_range(z, theta)?;
                Ok((st.model, st.nbar))
            },
            search,
        )
    }

    /// Closed-form maximum range.
    pub fn max_range_simple(&self) -> Result<MaxRange<f64>> {
        max_range_simple(&self.env, &self.receiver, &self.beam)
    }

    /// Sliced orbital rate and key yield for a zenith-crossing pass at
    /// altitude `h`.
    pub fn pass(&self, h: f64, params: &ProtocolParams, n_bks: Option<usize>) -> Result<PassReport> {
        let orbit = CircularOrbit::new(h)?;
        let tt = orbit.transit_times()?;
        let slicing = orbit.slice_orbit(n_bks, params.clock_hz, params.block_size)?;
        let (per_slice_rate, r_orb) = if slicing.slices.is_empty() {
            (Vec::new(), 0.0)
        } else {
            let r = orbital_rate(|t: f64| Ok(self.rate_at(h, t.abs(), params)?.rate.raw), &slicing.slices)?;
            (r.per_slice, r.mean)
        };
        let bits_per_pass = r_orb * params.clock_hz * tt.t_q;
        Ok(PassReport {
            h,
            t_q: tt.t_q,
            t_t: tt.t_t,
            orbits_per_day: orbit.orbits_per_day(),
            slices: slicing.slices,
            per_slice_rate,
            r_orb,
            bits_per_pass,
            bits_per_day: bits_per_pass,
            warning: slicing.warning,
        })
    }
}
