//! Capacity-type bounds over the fading channel: the loss-limited bound
//! `B`, thermal upper/lower bounds and the maximum secure range.

use crate::beam::{plob, BeamParams, ReceiverParams};
use crate::error::{domain, Error, Result};
use crate::fading::FadingModel;
use crate::noise::NoiseEnvironment;
use crate::quad::{integrate, integrate_to_inf, Tolerance};
use crate::scalar::{lit, log2, Real};
use crate::Clamped;

/// Thermal entropy `h(x) = (x+1)log₂(x+1) − x log₂x` in bits.
pub fn entropy_h<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    ((x + T::one()) * x.ln_1p() - x * x.ln()) / T::LN_2()
}

/// Relative-entropy bound of a thermal-loss channel with transmissivity
/// `tau` and total thermal photons `nbar`; zero once `nbar > tau`.
pub fn phi_thermal<T: Real>(tau: T, nbar: T) -> T {
    if nbar > tau {
        return T::zero();
    }
    if nbar == T::zero() {
        return plob(tau);
    }
    let ne = nbar / (T::one() - tau);
    -((-tau).ln_1p() + ne * tau.ln()) / T::LN_2() - entropy_h(ne)
}

/// Fading reduction factor `Δ(η, σ)` with `B = −Δ log₂(1 − η)`.
pub fn delta_factor<T: Real>(eta: T, model: &FadingModel<T>) -> Result<T> {
    if !(eta > T::zero() && eta < T::one()) {
        return domain(format!("transmissivity {eta} must lie in (0, 1)"));
    }
    let kappa = model.kappa();
    if !kappa.is_finite() {
        return Ok(T::one());
    }
    let gamma = model.gamma;
    let e = lit::<T>(2.0) / gamma;
    let tol = Tolerance::new(1e-14, 1e-12);
    // [0, 1]: substitute u = x^{2/γ} when the power is not smooth at 0
    let head = if gamma > lit(2.0) {
        let half = gamma / lit(2.0);
        integrate(
            |u: T| {
                let x = u.powf(half);
                (-kappa * u).exp() / (x.exp() - eta) * half * u.powf(half - T::one())
            },
            T::zero(),
            T::one(),
            tol,
        )?
    } else {
        integrate(|x: T| (-kappa * x.powf(e)).exp() / (x.exp() - eta), T::zero(), T::one(), tol)?
    };
    let tail = integrate_to_inf(|x: T| (-kappa * x.powf(e) - x).exp() / (T::one() - eta * (-x).exp()), T::one(), tol)?;
    let j = head.value + tail.value;
    Ok(T::one() + eta / (-eta).ln_1p() * j)
}

/// Loss-limited bound `B(η, σ)` in bits per use.
pub fn bound_b<T: Real>(eta: T, model: &FadingModel<T>) -> Result<T> {
    Ok(delta_factor(eta, model)? * plob(eta))
}

/// Convenience form of [`bound_b`] with explicit fading parameters.
pub fn bound_b_params<T: Real>(eta: T, sigma2: T, gamma: T, r0: T) -> Result<T> {
    let model = FadingModel { eta, eta_st: T::zero(), eta_st_far: T::zero(), sigma2, gamma, r0 };
    bound_b(eta, &model)
}

/// Thermal correction `T(n̄, η, σ)`.
pub fn thermal_correction<T: Real>(nbar: T, model: &FadingModel<T>) -> Result<T> {
    if nbar == T::zero() {
        return Ok(T::zero());
    }
    let eta = model.eta;
    if !(nbar > T::zero() && nbar <= eta) {
        return domain(format!("thermal correction needs 0 < nbar <= eta, got nbar = {nbar}"));
    }
    let tail = if model.kappa().is_finite() {
        -(-model.kappa() * (eta / nbar).ln().powf(lit::<T>(2.0) / model.gamma)).exp_m1()
    } else {
        T::one()
    };
    let bracket = nbar * log2(nbar) / (T::one() - nbar) + entropy_h(nbar);
    Ok(tail * bracket + bound_b(nbar, model)?)
}

/// Upper bound `max(0, B − T)`; zero when `n̄ ≥ η`.
pub fn thermal_upper<T: Real>(nbar: T, model: &FadingModel<T>) -> Result<Clamped<T>> {
    if nbar >= model.eta {
        return Ok(Clamped { value: T::zero(), raw: T::zero() });
    }
    let b = bound_b(model.eta, model)?;
    Ok(Clamped::new(b - thermal_correction(nbar, model)?))
}

/// The two lower bounds: the fading average and its simpler relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBounds<T> {
    /// `B − ∫ P_σ(τ) h(n̄/(1−τ)) dτ`.
    pub integral: Clamped<T>,
    /// `B − h(n̄/(1−η))`.
    pub simple: Clamped<T>,
}

pub fn thermal_lower<T: Real>(nbar: T, model: &FadingModel<T>) -> Result<LowerBounds<T>> {
    let b = bound_b(model.eta, model)?;
    let avg = model.expectation(|tau| entropy_h(nbar / (T::one() - tau)), 1e-10)?.value;
    Ok(LowerBounds {
        integral: Clamped::new(b - avg),
        simple: Clamped::new(b - entropy_h(nbar / (T::one() - model.eta))),
    })
}

/// Slow-detection bound `min(−log₂(1 − η_slow), (2/ln2) a²/(w_lt² + σ_P²))`.
pub fn bound_slow<T: Real>(eta_slow: T, a_r: T, w_lt: T, sigma_p2: T) -> T {
    let far = lit::<T>(2.0) * a_r * a_r / (w_lt * w_lt + sigma_p2) / T::LN_2();
    plob(eta_slow).min(far)
}

/// Outcome of a maximum-range search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxRange<T> {
    /// Secure up to this slant range (m).
    Range(T),
    /// Still secure at the search cap (value is the cap).
    BeyondCap(T),
    /// Entanglement breaking already at the smallest range probed.
    BreakingEverywhere,
}

impl<T: Real> MaxRange<T> {
    pub fn meters(&self) -> Option<T> {
        match *self {
            MaxRange::Range(z) | MaxRange::BeyondCap(z) => Some(z),
            MaxRange::BreakingEverywhere => None,
        }
    }
}

/// Simple maximum range `Σ/(κ H_sun)` (uplink) or `Σ/H_sky` (downlink),
/// with `Σ = π w₀/(λ Δλ[nm] Δt Ω a_R)`.
pub fn max_range_simple<T: Real>(env: &NoiseEnvironment<T>, receiver: &ReceiverParams<T>, beam: &BeamParams<T>) -> Result<MaxRange<T>> {
    let gamma_r = receiver.gamma_r();
    if env.irradiance() * gamma_r >= T::one() {
        return Ok(MaxRange::BreakingEverywhere);
    }
    let sigma = T::PI() * beam.w0
        / (beam.lambda * receiver.delta_lambda * lit(1e9) * receiver.delta_t * receiver.omega_fov * receiver.a_r);
    Ok(MaxRange::Range(sigma / env.irradiance()))
}

/// Search limits for [`max_range_tight`].
#[derive(Debug, Clone, Copy)]
pub struct RangeSearch<T> {
    pub z_min: T,
    pub z_cap: T,
    pub tol: T,
}

impl<T: Real> Default for RangeSearch<T> {
    fn default() -> Self {
        Self { z_min: lit(10e3), z_cap: lit(1e9), tol: lit(1e3) }
    }
}

/// Largest slant range where `B(η, σ) > T(n̄, η, σ)`. `link` maps a slant
/// range to its fading model and thermal photon number.
pub fn max_range_tight<T, F>(link: F, search: RangeSearch<T>) -> Result<MaxRange<T>>
where
    T: Real,
    F: Fn(T) -> Result<(FadingModel<T>, T)>,
{
    let margin = |z: T| -> Result<T> {
        let (model, nbar) = link(z)?;
        if nbar >= model.eta {
            return Ok(-T::one());
        }
        Ok(bound_b(model.eta, &model)? - thermal_correction(nbar, &model)?)
    };
    if margin(search.z_min)? <= T::zero() {
        return Ok(MaxRange::BreakingEverywhere);
    }
    let mut lo = search.z_min;
    let mut hi = lo;
    loop {
        hi = (hi * lit(2.0)).min(search.z_cap);
        if margin(hi)? <= T::zero() {
            break;
        }
        if hi >= search.z_cap {
            return Ok(MaxRange::BeyondCap(search.z_cap));
        }
        lo = hi;
    }
    let mut iter = 0;
    while hi - lo > search.tol {
        let mid = lit::<T>(0.5) * (lo + hi);
        if margin(mid)? > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        if iter > 200 {
            return Err(Error::Numerical("max-range bisection did not terminate".into()));
        }
    }
    Ok(MaxRange::Range(lit::<T>(0.5) * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(eta_fixed: f64, w: f64, s2: f64) -> FadingModel<f64> {
        FadingModel::new(eta_fixed, 0.4, w, s2).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy_h(0.0f64), 0.0);
        assert!((entropy_h(1.0f64) - 2.0).abs() < 1e-15);
        let x = 0.5f64;
        let d = 1e-6;
        let fd = (entropy_h(x + d) - entropy_h(x - d)) / (2.0 * d);
        assert!((fd - ((x + 1.0) / x).log2()).abs() < 1e-6);
    }

    #[test]
    fn phi_thermal_limits() {
        assert!((phi_thermal(0.3f64, 0.0) - plob(0.3)).abs() < 1e-15);
        assert_eq!(phi_thermal(0.3f64, 0.31), 0.0);
        let near = phi_thermal(0.3f64, 0.3 - 1e-9);
        assert!(near.abs() < 1e-6, "{near}");
        assert!(phi_thermal(0.3f64, 0.01) < plob(0.3));
    }

    #[test]
    fn bound_b_matches_fading_average() {
        for &(w, s2) in &[(2.5, 0.36), (30.0, 40.0), (300.0, 1e4), (1.0, 0.01), (1.0, 5.0)] {
            let m = model(0.38, w, s2);
            let b = bound_b(m.eta, &m).unwrap();
            let avg = m.expectation(plob, 1e-12).unwrap().value;
            assert!((b / avg - 1.0).abs() < 1e-8, "w={w}: {b} vs {avg}");
            let d = delta_factor(m.eta, &m).unwrap();
            assert!(d > 0.0 && d <= 1.0);
        }
        let still = model(0.38, 2.5, 0.0);
        assert!((bound_b(still.eta, &still).unwrap() - plob(still.eta)).abs() < 1e-15);
    }

    #[test]
    fn thermal_bounds_order() {
        let m = model(0.38, 3.0, 0.5);
        for &n in &[0.0, 1e-4, 1e-3, 0.01] {
            let b = bound_b(m.eta, &m).unwrap();
            let up = thermal_upper(n, &m).unwrap().value;
            let lo = thermal_lower(n, &m).unwrap();
            assert!(up <= b + 1e-15);
            assert!(lo.integral.value <= up + 1e-12, "n={n}");
            assert!(lo.simple.value <= lo.integral.value + 1e-12);
            if n == 0.0 {
                assert!((up - b).abs() < 1e-15 && (lo.simple.value - b).abs() < 1e-15);
            }
            // upper bound dominates the fading average of Φ while n̄ ≪ η;
            // with n̄ comparable to η the B(n̄) term over-subtracts
            if n <= 0.1 * m.eta {
                let avg_phi = m.expectation(|t| phi_thermal(t, n), 1e-10).unwrap().value;
                assert!(avg_phi <= up + 1e-9, "n={n}: {avg_phi} > {up}");
            }
        }
        assert_eq!(thermal_upper(m.eta, &m).unwrap().value, 0.0);
        assert!(thermal_correction(1e-12f64, &m).unwrap() < 1e-9);
    }

    #[test]
    fn slow_bound_chain() {
        let b = bound_slow(0.01f64, 0.4, 5.0, 1.0);
        assert!(b <= plob(0.01));
        assert!(b <= 2.0 * 0.16 / 26.0 / std::f64::consts::LN_2 + 1e-15);
    }

    #[test]
    fn tight_range_search() {
        // toy link: far-field spot growing linearly, constant noise
        let link = |z: f64| {
            let m = FadingModel::new(0.4, 0.4, 0.5 + 1e-6 * z, (1e-6 * z) * (1e-6 * z))?;
            Ok((m, 1e-4))
        };
        let r = max_range_tight(link, RangeSearch::default()).unwrap();
        let z = r.meters().unwrap();
        let (m, n) = link(z - 2e3).unwrap();
        assert!(thermal_upper(n, &m).unwrap().raw > 0.0);
        let (m, n) = link(z + 2e3).unwrap();
        assert!(thermal_upper(n, &m).unwrap().raw <= 0.0);
        let hot = |z: f64| Ok((FadingModel::new(0.4, 0.4, 0.5 + 1e-6 * z, 1.0)?, 0.5));
        assert_eq!(max_range_tight(hot, RangeSearch::default()).unwrap(), MaxRange::BreakingEverywhere);
    }
}
