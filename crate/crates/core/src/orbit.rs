//! Zenith-crossing circular passes, orbital slicing and averaged key
//! yields, plus the comparison against ground fiber links.

use rayon::prelude::*;

use crate::beam::plob;
use crate::error::{domain, Error, Result};
use crate::geometry::{mu_earth, slant_orbital, slant_range, EARTH_RADIUS};
use crate::scalar::{lit, Real};

/// Seconds per day.
pub const SECONDS_PER_DAY: f64 = 86_400.0;
/// Fiber attenuation (dB/km).
pub const FIBER_LOSS_DB_PER_KM: f64 = 0.2;
/// Semi-major axis (km) above which no sun-synchronous orbit exists.
const SUN_SYNC_AXIS_KM: f64 = 12_352.0;

/// Circular orbit at altitude `h` passing through the station's zenith.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularOrbit<T> {
    pub h: T,
}

/// Quantum (`t_Q`, |θ| ≤ 1 rad) and total (`t_T`, horizon to horizon)
/// transit times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitTimes<T> {
    pub t_q: T,
    pub t_t: T,
}

impl<T: Real> TransitTimes<T> {
    /// Time available on each side of the quantum window for classical
    /// processing and communication.
    pub fn side_budget(&self) -> T {
        (self.t_t - self.t_q) / lit(2.0)
    }
}

/// Angular slice `[theta_start, theta_end]` of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice<T> {
    pub theta_start: T,
    pub theta_end: T,
}

/// Result of [`CircularOrbit::slice_orbit`].
#[derive(Debug, Clone, PartialEq)]
pub struct Slicing<T> {
    pub slices: Vec<Slice<T>>,
    /// Block duration `δt = t_Q/n_bks` (s).
    pub delta_t: T,
    /// Set when the requested block count was reduced or no block fits.
    pub warning: Option<String>,
}

impl<T: Real> CircularOrbit<T> {
    pub fn new(h: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return domain(format!("orbit altitude must be positive, got {h}"));
        }
        Ok(Self { h })
    }

    /// Orbit radius `R_S = R_E + h`.
    pub fn radius(&self) -> T {
        lit::<T>(EARTH_RADIUS) + self.h
    }

    /// `√(R_S³/μ_G)`, the inverse angular rate.
    fn time_scale(&self) -> T {
        let r = self.radius();
        (r * r * r / mu_earth()).sqrt()
    }

    /// Period `T_S = 2π√(R_S³/μ_G)` (s).
    pub fn period(&self) -> T {
        lit::<T>(2.0) * T::PI() * self.time_scale()
    }

    pub fn orbits_per_day(&self) -> T {
        lit::<T>(SECONDS_PER_DAY) / self.period()
    }

    /// Sun-synchronous inclination (degrees), `arccos[−(R_S/12352 km)^{7/2}]`.
    pub fn sun_sync_inclination(&self) -> Result<T> {
        let ratio = self.radius() / lit(1e3) / lit(SUN_SYNC_AXIS_KM);
        if ratio > T::one() {
            return domain(format!("no sun-synchronous orbit at altitude {} km", self.h / lit(1e3)));
        }
        Ok((-ratio.powf(lit(3.5))).acos().to_degrees())
    }

    /// Signed zenith angle seen from the station `t` seconds after the
    /// zenith crossing.
    pub fn zenith_angle_at(&self, t: T) -> Result<T> {
        let alpha = t / self.time_scale();
        let r_s = self.radius();
        if alpha.abs() > T::FRAC_PI_2() || r_s * alpha.cos() < lit(EARTH_RADIUS) {
            return Err(Error::OutOfPass(format!("satellite below the horizon at t = {t} s")));
        }
        if alpha == T::zero() {
            return Ok(T::zero());
        }
        let z = slant_orbital(r_s, alpha)?;
        // the elevation stays non-negative, so θ ≤ π/2 and asin is unambiguous
        let s = (r_s * alpha.abs().sin() / z).min(T::one());
        Ok(s.asin() * alpha.signum())
    }

    /// Time from the zenith crossing at which the zenith angle equals
    /// `theta` (signed).
    pub fn time_of_zenith(&self, theta: T) -> Result<T> {
        if !(theta.abs() <= T::FRAC_PI_2()) {
            return domain("zenith angle must lie in [-pi/2, pi/2]");
        }
        let z = slant_range(self.h, theta.abs())?;
        let r_e = lit::<T>(EARTH_RADIUS);
        let c = ((r_e + z * theta.abs().cos()) / self.radius()).min(T::one());
        Ok(self.time_scale() * c.acos() * theta.signum())
    }

    pub fn transit_times(&self) -> Result<TransitTimes<T>> {
        let two = lit::<T>(2.0);
        Ok(TransitTimes {
            t_q: two * self.time_of_zenith(T::one())?,
            t_t: two * self.time_of_zenith(T::FRAC_PI_2())?,
        })
    }

    /// Number of blocks of `block_size` pulses that fit in `t_Q` at
    /// `clock_hz`.
    pub fn block_count(&self, clock_hz: T, block_size: T) -> Result<usize> {
        let t_q = self.transit_times()?.t_q;
        let n = (t_q * clock_hz / block_size).floor();
        Ok(n.to_usize().unwrap_or(0))
    }

    /// Splits the quantum window into `n_bks` equal-duration blocks (or as
    /// many as fit when `n_bks` is `None` or too large).
    pub fn slice_orbit(&self, n_bks: Option<usize>, clock_hz: T, block_size: T) -> Result<Slicing<T>> {
        if !(clock_hz > T::zero()) || !(block_size > T::zero()) {
            return domain("clock and block size must be positive");
        }
        let t_q = self.transit_times()?.t_q;
        let fit = self.block_count(clock_hz, block_size)?;
        let mut warning = None;
        let n = match n_bks {
            None => fit,
            Some(k) if k > fit => {
                warning = Some(format!("only {fit} blocks fit in the quantum window; reduced from {k}"));
                fit
            }
            Some(k) => k,
        };
        if n == 0 {
            return Ok(Slicing {
                slices: Vec::new(),
                delta_t: T::zero(),
                warning: Some(warning.unwrap_or_else(|| "no block fits in the quantum window".into())),
            });
        }
        let dt = t_q / lit(n as f64);
        let half = t_q / lit(2.0);
        let mut thetas = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = if i == n { half } else { -half + dt * lit(i as f64) };
            thetas.push(self.zenith_angle_at(t)?);
        }
        let slices = thetas.windows(2).map(|w| Slice { theta_start: w[0], theta_end: w[1] }).collect();
        Ok(Slicing { slices, delta_t: dt, warning })
    }
}

/// Averaged orbital rate together with its per-slice minima.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalRate<T> {
    /// Minimum rate over each slice (unclamped).
    pub per_slice: Vec<T>,
    /// Zenith angle of each minimum.
    pub argmin: Vec<T>,
    /// `(1/n_bks) Σ max(0, min_slice R)`.
    pub mean: T,
}

fn golden_min<T: Real, F: Fn(T) -> Result<T>>(f: &F, mut lo: T, mut hi: T, tol: T) -> Result<(T, T)> {
    let r = lit::<T>((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iter = 0;
    while hi - lo > tol && iter < 200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
        iter += 1;
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimum of `rate_fn` over each slice (golden section plus both end
/// points) and the clamped average over the pass.
pub fn orbital_rate<T, F>(rate_fn: F, slices: &[Slice<T>]) -> Result<OrbitalRate<T>>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
{
    if slices.is_empty() {
        return Err(Error::Degenerate("no slices in the pass".into()));
    }
    let mins: Vec<Result<(T, T)>> = slices
        .par_iter()
        .map(|s| {
            let (a, b) = (s.theta_start.min(s.theta_end), s.theta_start.max(s.theta_end));
            let mut best = (a, rate_fn(a)?);
            let fb = rate_fn(b)?;
            if fb < best.1 {
                best = (b, fb);
            }
            if b - a > lit(1e-6) {
                let g = golden_min(&rate_fn, a, b, lit(1e-5))?;
                if g.1 < best.1 {
                    best = g;
                }
            }
            Ok(best)
        })
        .collect();
    let mut per_slice = Vec::with_capacity(slices.len());
    let mut argmin = Vec::with_capacity(slices.len());
    for m in mins {
        let (t, v) = m?;
        argmin.push(t);
        per_slice.push(v);
    }
    let sum = per_slice.iter().fold(T::zero(), |acc, &v| acc + v.max(T::zero()));
    Ok(OrbitalRate { mean: sum / lit(per_slice.len() as f64), per_slice, argmin })
}

/// Bits per day from a rate in bits per use at `clock_hz`.
pub fn bits_per_day<T: Real>(rate: T, clock_hz: T) -> T {
    rate * clock_hz * lit(SECONDS_PER_DAY)
}

/// Great-circle separation `2πΔt R_E/T_S` between two stations overflown
/// `delta_t` seconds apart.
pub fn station_distance<T: Real>(delta_t: T, orbit: &CircularOrbit<T>) -> Result<T> {
    let period = orbit.period();
    if !(delta_t >= T::zero() && delta_t <= period / lit(2.0)) {
        return domain("station time offset must lie in [0, T_S/2]");
    }
    Ok(lit::<T>(2.0) * T::PI() * delta_t * lit(EARTH_RADIUS) / period)
}

/// Fiber transmissivity `10^{−0.02 d[km]}` for a distance in metres.
pub fn fiber_eta<T: Real>(distance: T) -> Result<T> {
    if !(distance >= T::zero()) {
        return domain("fiber length must be non-negative");
    }
    Ok(lit::<T>(10.0).powf(-lit::<T>(FIBER_LOSS_DB_PER_KM / 10.0) * distance / lit(1e3)))
}

/// Repeaterless fiber capacity; `+∞` at zero distance.
pub fn fiber_rate<T: Real>(distance: T) -> Result<T> {
    Ok(plob(fiber_eta(distance)?))
}

/// Capacity with `n_rep` ideal repeaters (`n_rep = 0` is plain fiber).
pub fn repeater_rate<T: Real>(distance: T, n_rep: u32) -> Result<T> {
    let eta = fiber_eta(distance)?;
    Ok(plob(eta.powf(T::one() / lit((n_rep + 1) as f64))))
}

/// Fiber distance (m) at which a chain with `n_rep` ideal repeaters
/// delivers `bits_per_day` at `clock_hz`.
pub fn fiber_crossover<T: Real>(bits_per_day_target: T, clock_hz: T, n_rep: u32) -> Result<T> {
    if !(bits_per_day_target > T::zero()) || !(clock_hz > T::zero()) {
        return domain("target and clock must be positive");
    }
    let rate = bits_per_day_target / (clock_hz * lit(SECONDS_PER_DAY));
    // η^{1/(N+1)} = 1 − 2^{−R}
    let per_link = -(-rate * T::LN_2()).exp_m1();
    let db = -lit::<T>(10.0) * per_link.log10() * lit((n_rep + 1) as f64);
    Ok(db / lit(FIBER_LOSS_DB_PER_KM) * lit(1e3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_and_inclination() {
        let o = CircularOrbit::new(530e3f64).unwrap();
        let t = o.period();
        let r = o.radius();
        assert!((t * t * mu_earth::<f64>() / (4.0 * std::f64::consts::PI.powi(2)) / r.powi(3) - 1.0).abs() < 1e-12);
        assert!((t / 60.0 - 95.0).abs() < 1.0);
        assert_eq!(o.orbits_per_day().floor(), 15.0);
        assert!((o.sun_sync_inclination().unwrap() - 97.5).abs() < 0.1);
        let low = CircularOrbit::new(155e3f64).unwrap();
        assert!((low.sun_sync_inclination().unwrap() - 96.1).abs() < 0.1);
        assert!((low.period() / 60.0 - 87.0).abs() < 1.0);
        assert_eq!(low.orbits_per_day().floor(), 16.0);
        assert!(CircularOrbit::new(6.0e6f64).unwrap().sun_sync_inclination().is_err());
        let i = CircularOrbit::new(5.9e6f64).unwrap().sun_sync_inclination().unwrap();
        assert!(i > 90.0 && i < 180.0);
    }

    #[test]
    fn zenith_time_round_trip() {
        let o = CircularOrbit::new(530e3f64).unwrap();
        assert_eq!(o.zenith_angle_at(0.0).unwrap(), 0.0);
        assert_eq!(o.time_of_zenith(0.0).unwrap(), 0.0);
        let mut last = -10.0;
        for i in -20..=20 {
            let theta = 0.07 * i as f64;
            let t = o.time_of_zenith(theta).unwrap();
            let back = o.zenith_angle_at(t).unwrap();
            assert!((back - theta).abs() < 1e-9);
            let t2 = o.time_of_zenith(back).unwrap();
            assert!((t2 - t).abs() < 1e-6);
            assert!(back > last);
            last = back;
        }
        assert!(matches!(o.zenith_angle_at(1000.0), Err(Error::OutOfPass(_))));
    }

    #[test]
    fn transit_times() {
        let t = CircularOrbit::new(530e3f64).unwrap().transit_times().unwrap();
        assert!((t.t_t - 716.0).abs() < 1.0 && (t.t_q - 200.0).abs() < 1.0);
        assert!((t.side_budget() - 258.0).abs() < 1.0);
        let t = CircularOrbit::new(155e3f64).unwrap().transit_times().unwrap();
        assert!((t.t_t - 364.0).abs() < 1.0 && (t.t_q - 60.0).abs() < 1.0);
    }

    #[test]
    fn slices() {
        let o = CircularOrbit::new(530e3f64).unwrap();
        let s = o.slice_orbit(None, 5e6, 1e8).unwrap();
        assert_eq!(s.slices.len(), 10);
        let ends = [-1.0, -0.88, -0.72, -0.53, -0.28, 0.0];
        for (k, e) in ends.iter().enumerate().take(5) {
            assert!((s.slices[k].theta_start - e).abs() < 0.01, "{k}: {:?}", s.slices[k]);
        }
        for k in 0..10 {
            let a = s.slices[k];
            let b = s.slices[9 - k];
            assert!((a.theta_start + b.theta_end).abs() < 1e-9);
        }
        let low = CircularOrbit::new(155e3f64).unwrap().slice_orbit(None, 5e6, 1e8).unwrap();
        assert_eq!(low.slices.len(), 3);
        assert!((low.slices[0].theta_end + 0.468).abs() < 0.01);
        let reduced = o.slice_orbit(Some(50), 5e6, 1e8).unwrap();
        assert_eq!(reduced.slices.len(), 10);
        assert!(reduced.warning.is_some());
        let none = o.slice_orbit(None, 1.0, 1e8).unwrap();
        assert!(none.slices.is_empty() && none.warning.is_some());
    }

    #[test]
    fn orbital_average() {
        let o = CircularOrbit::new(530e3f64).unwrap();
        let s = o.slice_orbit(None, 5e6, 1e8).unwrap();
        let f = |t: f64| Ok(1.0 - t * t);
        let r = orbital_rate(f, &s.slices).unwrap();
        for (k, sl) in s.slices.iter().enumerate() {
            let edge = sl.theta_start.abs().max(sl.theta_end.abs());
            assert!((r.per_slice[k] - (1.0 - edge * edge)).abs() < 1e-12);
        }
        assert!(r.mean >= 0.0);
        let neg = orbital_rate(|t: f64| Ok(t - 0.5), &s.slices).unwrap();
        assert!(neg.mean >= 0.0);
        assert!(orbital_rate(f, &[]).is_err());
    }

    #[test]
    fn fiber_and_repeaters() {
        assert_eq!(fiber_rate(0.0f64).unwrap(), f64::INFINITY);
        assert!((fiber_eta(100e3f64).unwrap() - 0.01).abs() < 1e-15);
        let d = 300e3f64;
        assert_eq!(repeater_rate(d, 0).unwrap(), fiber_rate(d).unwrap());
        let mut last = 0.0;
        for n in 0..5 {
            let r = repeater_rate(d, n).unwrap();
            assert!(r > last);
            last = r;
        }
        let x = fiber_crossover(4.1e7f64, 5e6, 0).unwrap();
        let r = fiber_rate(x).unwrap();
        assert!((bits_per_day(r, 5e6) / 4.1e7 - 1.0).abs() < 1e-9);
        assert!((bits_per_day(2.0f64, 4.0) - 2.0 * bits_per_day(1.0, 4.0)).abs() < 1e-9);
        let o = CircularOrbit::new(530e3f64).unwrap();
        assert_eq!(station_distance(0.0, &o).unwrap(), 0.0);
        assert!(station_distance(o.period(), &o).is_err());
    }
}
