//! Beam-wandering fading: short-term transmissivity, the Weibull-type law of
//! the instantaneous transmissivity, threshold probabilities and a Monte
//! Carlo sampler of the centroid random walk.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::beam::{eta_aperture, eta_aperture_far};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_to_inf, Integral, Tolerance};
use crate::scalar::{lit, to_f64, Real};
use crate::special::{bessel_i1e, one_minus_i0e};

/// Default transmitter pointing error (rad).
pub const POINTING_ERROR: f64 = 1e-6;

/// Pointing-induced centroid variance `(ε z)²`.
pub fn pointing_variance<T: Real>(z: T, error_rad: T) -> T {
    let s = error_rad * z;
    s * s
}

/// `f₀(x) = [1 − e^{−2x} I₀(2x)]⁻¹`.
pub fn f0<T: Real>(x: T) -> T {
    T::one() / one_minus_i0e(lit::<T>(2.0) * x)
}

/// `f₁(x) = e^{−2x} I₁(2x)`.
pub fn f1<T: Real>(x: T) -> T {
    bessel_i1e(lit::<T>(2.0) * x)
}

/// Weibull shape `γ` and scale `r₀` from the short-term transmissivity
/// (exact and far-field forms, mixed as in the reference expression).
pub fn fading_params<T: Real>(eta_st: T, eta_st_far: T, a_r: T) -> Result<(T, T)> {
    if !(eta_st > T::zero() && eta_st < T::one()) || !(eta_st_far > T::zero()) {
        return domain("short-term transmissivity must lie in (0, 1)");
    }
    let x = eta_st_far;
    let f0x = f0(x);
    let l = (lit::<T>(2.0) * eta_st * f0x).ln();
    if !(l > T::zero()) {
        return Err(Error::Degenerate(format!("log argument 2 eta_st f0 = {} is not above one", (lit::<T>(2.0) * eta_st * f0x))));
    }
    let gamma = lit::<T>(4.0) * x * f0x * f1(x) / l;
    let r0 = a_r / l.powf(T::one() / gamma);
    if !(gamma > T::zero()) || !r0.is_finite() {
        return Err(Error::Degenerate("non-positive fading parameters".into()));
    }
    Ok((gamma, r0))
}

/// Distribution of the instantaneous transmissivity `τ ∈ (0, η]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel<T> {
    /// Maximum transmissivity `η_eff η_atm η_st`.
    pub eta: T,
    /// Short-term aperture transmissivity.
    pub eta_st: T,
    /// Far-field short-term transmissivity `2a²/w_st²`.
    pub eta_st_far: T,
    /// Total centroid variance `σ² = σ_TB² + σ_P²` (m²).
    pub sigma2: T,
    /// Weibull shape.
    pub gamma: T,
    /// Weibull scale (m).
    pub r0: T,
}

impl<T: Real> FadingModel<T> {
    /// Builds the model for aperture `a_r`, short-term spot `w_st`, centroid
    /// variance `sigma2` and fixed losses `eta_fixed = η_eff η_atm`.
    pub fn new(eta_fixed: T, a_r: T, w_st: T, sigma2: T) -> Result<Self> {
        if !(eta_fixed > T::zero() && eta_fixed <= T::one()) {
            return domain("fixed transmissivity must lie in (0, 1]");
        }
        if !(sigma2 >= T::zero()) {
            return domain("wandering variance must be non-negative");
        }
        let eta_st = eta_aperture(a_r, w_st);
        let eta_st_far = eta_aperture_far(a_r, w_st);
        let (gamma, r0) = fading_params(eta_st, eta_st_far, a_r)?;
        Ok(Self {
            eta: eta_fixed * eta_st,
            eta_st,
            eta_st_far,
            sigma2,
            gamma,
            r0,
        })
    }

    /// The same geometry with a different maximum transmissivity.
    pub fn with_eta(&self, eta: T) -> Self {
        Self { eta, ..*self }
    }

    /// `r₀²/(2σ²)`; infinite without wandering.
    pub fn kappa(&self) -> T {
        if self.sigma2 == T::zero() {
            T::infinity()
        } else {
            self.r0 * self.r0 / (lit::<T>(2.0) * self.sigma2)
        }
    }

    /// Density `P_σ(τ)`; zero outside `(0, η)`.
    pub fn pdf(&self, tau: T) -> T {
        if !(tau > T::zero() && tau < self.eta) || self.sigma2 == T::zero() {
            return T::zero();
        }
        let l = (self.eta / tau).ln();
        let k = self.kappa();
        let e = lit::<T>(2.0) / self.gamma;
        let two_k = lit::<T>(2.0) * k;
        two_k / (self.gamma * tau) * l.powf(e - T::one()) * (-k * l.powf(e)).exp()
    }

    /// `P(τ ≤ x)`.
    pub fn cdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        if x >= self.eta {
            return T::one();
        }
        if self.sigma2 == T::zero() {
            return T::zero();
        }
        let l = (self.eta / x).ln();
        (-self.kappa() * l.powf(lit::<T>(2.0) / self.gamma)).exp()
    }

    /// Probability that `τ` exceeds `eta_th`.
    pub fn p_threshold(&self, eta_th: T) -> Result<T> {
        if !(eta_th >= T::zero()) {
            return domain("threshold must be non-negative");
        }
        if eta_th >= self.eta {
            return Ok(T::zero());
        }
        Ok(T::one() - self.cdf(eta_th))
    }

    /// Probability of the slot `[k δτ, (k+1) δτ)`, clipped to `(0, η]`.
    pub fn p_slot(&self, k: usize, delta_tau: T) -> Result<T> {
        if !(delta_tau > T::zero()) {
            return domain("slot width must be positive");
        }
        let lo = lit::<T>(k as f64) * delta_tau;
        let hi = lo + delta_tau;
        Ok(self.cdf(hi) - self.cdf(lo))
    }

    /// Transmissivity reached with survival probability `e^{-u}`, i.e. the
    /// substitution `u = κ (ln η/τ)^{2/γ}` that flattens the density.
    pub fn tau_of_u(&self, u: T) -> T {
        if self.sigma2 == T::zero() {
            return self.eta;
        }
        let l = (u / self.kappa()).powf(self.gamma / lit(2.0));
        self.eta * (-l).exp()
    }

    /// Quantile: `τ` with `P(τ ≤ x) = q`.
    pub fn quantile(&self, q: T) -> T {
        if q <= T::zero() {
            return T::zero();
        }
        if q >= T::one() {
            return self.eta;
        }
        self.tau_of_u(-q.ln())
    }

    /// `E[f(τ)]` over the fading law, integrated in the flattened variable.
    pub fn expectation<F: Fn(T) -> T>(&self, f: F, rel_tol: f64) -> Result<Integral<T>> {
        if self.sigma2 == T::zero() {
            return Ok(Integral { value: f(self.eta), abs_err: T::zero(), intervals: 0 });
        }
        integrate_to_inf(|u: T| (-u).exp() * f(self.tau_of_u(u)), T::zero(), Tolerance::new(0.0, rel_tol))
    }

    /// Seeded sampler of the instantaneous transmissivity.
    pub fn sampler(&self, seed: u64) -> FadingSampler<T> {
        FadingSampler { model: *self, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

/// Draws `τ = η exp[−(r/r₀)^γ]` with `r` the norm of a 2-D Gaussian
/// centroid deflection of per-axis variance `σ²`.
#[derive(Debug, Clone)]
pub struct FadingSampler<T> {
    model: FadingModel<T>,
    rng: ChaCha8Rng,
}

impl<T: Real> FadingSampler<T> {
    pub fn sample(&mut self) -> T {
        let s = to_f64(self.model.sigma2).sqrt();
        let x: f64 = StandardNormal.sample(&mut self.rng);
        let y: f64 = StandardNormal.sample(&mut self.rng);
        let r = lit::<T>(s * x.hypot(y));
        self.tau_from_deflection(r)
    }

    pub fn tau_from_deflection(&self, r: T) -> T {
        self.model.eta * (-(r / self.model.r0).powf(self.model.gamma)).exp()
    }
}

impl<T: Real> Iterator for FadingSampler<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        Some(self.sample())
    }
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic<T: Real, F: Fn(T) -> T>(samples: &mut [T], cdf: F) -> T {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = lit::<T>(samples.len() as f64);
    let mut d = T::zero();
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        let lo = lit::<T>(i as f64) / n;
        let hi = lit::<T>((i + 1) as f64) / n;
        d = d.max((c - lo).abs()).max((hi - c).abs());
    }
    d
}

/// Transmissivity seen by a slow detector that averages over wandering:
/// `η_eff η_atm [1 − e^{−2a²/(w_lt² + σ_P²)}]`.
pub fn eta_slow<T: Real>(eta_eff: T, eta_atm: T, a_r: T, w_lt: T, sigma_p2: T) -> T {
    eta_eff * eta_atm * eta_aperture(a_r, (w_lt * w_lt + sigma_p2).sqrt())
}
