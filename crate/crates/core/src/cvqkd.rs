//! Composable finite-size key rates of the pilot-guided, Gaussian-modulated
//! coherent-state protocol with homodyne or heterodyne detection.
//!
//! Eve's Holevo information is computed from the entangling-cloner
//! purification of the thermal-loss channel: a two-mode Gaussian state for
//! Alice's purification and Bob's mode, whose symplectic spectrum gives
//! `S(AB)`, plus the conditional state after Bob's measurement.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bounds::entropy_h;
use crate::error::{domain, Error, Result};
use crate::fading::FadingModel;
use crate::scalar::{lit, log2, to_f64, Real};
use crate::special::{erfc_inv, log2_binomial_plus4};
use crate::Clamped;

/// Coherent detection at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

impl Detection {
    /// Vacuum-noise multiplicity `ν_add` (1 homodyne, 2 heterodyne); also
    /// the number of quadrature samples per pilot.
    pub fn nu_add<T: Real>(self) -> T {
        match self {
            Detection::Homodyne => T::one(),
            Detection::Heterodyne => lit(2.0),
        }
    }
}

/// Tail bound used for the confidence factor `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `w = √2 erf⁻¹(1 − ε_pe)`.
    Gaussian,
    /// `w = √(2 ln(1/ε_pe))`.
    Hoeffding,
}

/// Attack model for the security analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attack {
    Collective,
    /// Coherent attacks via energy tests (heterodyne only).
    General,
}

/// Protocol and post-processing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams<T> {
    /// Block size `N` (channel uses).
    pub block_size: T,
    /// Pilot pulses `m` per block.
    pub pilots: T,
    /// Energy-test fraction `f_et` (general attacks).
    pub f_et: T,
    /// Reconciliation efficiency `β`.
    pub beta: T,
    /// Error-correction success probability.
    pub p_ec: T,
    pub eps_s: T,
    pub eps_h: T,
    pub eps_pe: T,
    pub eps_cor: T,
    /// Alphabet size after digitisation.
    pub d: T,
    /// Modulation variance `μ` (`σ_x² = μ − 1`).
    pub mu: T,
    /// Threshold fraction `φ` (`η_th = φ η`).
    pub phi: T,
    /// Source clock (Hz).
    pub clock_hz: T,
    pub detection: Detection,
    pub tail: Tail,
    pub attack: Attack,
    /// Laser linewidth (Hz) when the local oscillator is regenerated at the
    /// receiver; `None` for a transmitted local oscillator.
    pub llo_linewidth: Option<T>,
}

impl<T: Real> ProtocolParams<T> {
    /// Collective-attack budget: N = 1e8, m = 0.15 N, d = 32, β = 0.96,
    /// p_ec = 0.9, all epsilons 2⁻³³, 5 MHz clock.
    pub fn collective() -> Self {
        let eps = lit::<T>(2f64.powi(-33));
        Self {
            block_size: lit(1e8),
            pilots: lit(1.5e7),
            f_et: T::zero(),
            beta: lit(0.96),
            p_ec: lit(0.9),
            eps_s: eps,
            eps_h: eps,
            eps_pe: eps,
            eps_cor: eps,
            d: lit(32.0),
            mu: lit(9.28),
            phi: lit(0.73),
            clock_hz: lit(5e6),
            detection: Detection::Heterodyne,
            tail: Tail::Gaussian,
            attack: Attack::Collective,
            llo_linewidth: None,
        }
    }

    /// General-attack budget: p_ec = 0.1, epsilons 1e-43, f_et = 0.9,
    /// μ = 7.49, φ = 0.73, Hoeffding tail.
    pub fn general() -> Self {
        let eps = lit::<T>(1e-43);
        Self {
            f_et: lit(0.9),
            p_ec: lit(0.1),
            eps_s: eps,
            eps_h: eps,
            eps_pe: eps,
            eps_cor: eps,
            mu: lit(7.49),
            phi: lit(0.73),
            tail: Tail::Hoeffding,
            attack: Attack::General,
            ..Self::collective()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > T::one()) {
            return domain("modulation variance must exceed one");
        }
        if !(self.phi > T::zero() && self.phi < T::one()) {
            return domain("threshold fraction must lie in (0, 1)");
        }
        for (name, e) in [("eps_s", self.eps_s), ("eps_h", self.eps_h), ("eps_pe", self.eps_pe), ("eps_cor", self.eps_cor)] {
            if !(e > T::zero() && e < T::one()) {
                return domain(format!("{name} must lie in (0, 1)"));
            }
        }
        if !(self.pilots >= T::one()) || !(self.block_size > self.pilots) {
            return domain("need 1 <= m < N");
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) || !(self.p_ec > T::zero() && self.p_ec <= T::one()) {
            return domain("beta and p_ec must lie in (0, 1]");
        }
        if !(self.d >= T::one()) || !(self.clock_hz > T::zero()) {
            return domain("alphabet size and clock must be positive");
        }
        if self.attack == Attack::General {
            if self.detection != Detection::Heterodyne {
                return Err(Error::Unsupported("general-attack rate requires heterodyne detection".into()));
            }
            if !(self.f_et > T::zero()) {
                return domain("energy-test fraction must be positive");
            }
        }
        Ok(())
    }

    /// Signal variance `σ_x² = μ − 1`.
    pub fn sigma_x2(&self) -> T {
        self.mu - T::one()
    }

    /// Key-generation pulses `n`: `N − m`, or `(N − m)/(1 + f_et)` against
    /// general attacks.
    pub fn n_key(&self) -> T {
        let n = self.block_size - self.pilots;
        match self.attack {
            Attack::Collective => n,
            Attack::General => n / (T::one() + self.f_et),
        }
    }

    /// Confidence factor `w`.
    pub fn w(&self) -> T {
        pe_confidence(self.eps_pe, self.tail)
    }

    /// Overall security `ε = p_ec ε_pe + ε_cor + ε_s + ε_h`.
    pub fn epsilon(&self) -> T {
        self.p_ec * self.eps_pe + self.eps_cor + self.eps_s + self.eps_h
    }

    /// `Δ_aep = 4 log₂(2√d + 1) √(log₂(18/(p_ec² ε_s⁴)))`.
    pub fn delta_aep(&self) -> T {
        let two = lit::<T>(2.0);
        let inner = lit::<T>(18.0) / (self.p_ec * self.p_ec * self.eps_s.powi(4));
        // log₂ of the tiny ε_s⁴ taken term by term to avoid underflow in f32
        let l = log2(lit::<T>(18.0)) - two * log2(self.p_ec) - lit::<T>(4.0) * log2(self.eps_s);
        let l = if inner.is_finite() && inner > T::zero() { log2(inner) } else { l };
        lit::<T>(4.0) * log2(two * self.d.sqrt() + T::one()) * l.sqrt()
    }

    /// `Θ = log₂[p_ec(1 − ε_s²/3)] + 2 log₂(√2 ε_h)`.
    pub fn theta(&self) -> T {
        let two = lit::<T>(2.0);
        log2(self.p_ec * (T::one() - self.eps_s * self.eps_s / lit(3.0))) + two * log2(two.sqrt() * self.eps_h)
    }
}

/// Confidence factor for parameter estimation with failure probability
/// `eps_pe`.
pub fn pe_confidence<T: Real>(eps_pe: T, tail: Tail) -> T {
    match tail {
        // erf⁻¹(1 − ε) = erfc⁻¹(ε), evaluated without forming 1 − ε
        Tail::Gaussian => lit::<T>(2.0).sqrt() * erfc_inv(eps_pe),
        Tail::Hoeffding => (lit::<T>(2.0) * (T::one() / eps_pe).ln()).sqrt(),
    }
}

/// Worst-case thermal number `n̄′ = n̄ + w(2n̄ + ν_add)/√(2ν_add m)`.
pub fn worst_case_nbar<T: Real>(nbar: T, m: T, detection: Detection, eps_pe: T, tail: Tail) -> Result<T> {
    if !(m >= T::one()) {
        return domain("need at least one pilot");
    }
    let nu = detection.nu_add::<T>();
    let w = pe_confidence(eps_pe, tail);
    Ok(nbar + w * (lit::<T>(2.0) * nbar + nu) / (lit::<T>(2.0) * nu * m).sqrt())
}

/// Mutual information between Alice's variable and Bob's outcome.
pub fn mutual_information<T: Real>(tau: T, nbar: T, sigma_x2: T, detection: Detection) -> T {
    match detection {
        Detection::Homodyne => lit::<T>(0.5) * log2(T::one() + tau * sigma_x2 / (lit::<T>(2.0) * nbar + T::one())),
        Detection::Heterodyne => log2(T::one() + tau * sigma_x2 / (lit::<T>(2.0) * nbar + lit(2.0))),
    }
}

/// Equivalent input noise `Σ = ε_ch + (ν_add + 2n̄_ex)/τ` with
/// `ε_ch = 2η_eff n̄_B/τ`; then `I = (ν_add/2) log₂(1 + σ_x²/Σ)`.
pub fn equivalent_noise<T: Real>(tau: T, eta_eff_nbar_b: T, n_ex: T, detection: Detection) -> T {
    let two = lit::<T>(2.0);
    two * eta_eff_nbar_b / tau + (detection.nu_add::<T>() + two * n_ex) / tau
}

/// Mutual information from the equivalent-noise form.
pub fn mutual_information_equivalent<T: Real>(sigma_x2: T, sigma_eq: T, detection: Detection) -> T {
    detection.nu_add::<T>() / lit(2.0) * log2(T::one() + sigma_x2 / sigma_eq)
}

/// von Neumann entropy of a single-mode thermal state with symplectic
/// eigenvalue `ν`.
fn g_nu<T: Real>(nu: T) -> T {
    entropy_h((nu - T::one()) / lit(2.0))
}

/// Eve's Holevo information on Bob's outcome (reverse reconciliation).
pub fn holevo_bound<T: Real>(tau: T, nbar: T, mu: T, detection: Detection) -> Result<T> {
    if !(tau > T::zero() && tau < T::one()) {
        return domain(format!("transmissivity {tau} must lie in (0, 1)"));
    }
    if !(mu > T::one()) || !(nbar >= T::zero()) {
        return domain("need mu > 1 and nbar >= 0");
    }
    let omega = lit::<T>(2.0) * nbar / (T::one() - tau) + T::one();
    let a = mu;
    let b = tau * mu + (T::one() - tau) * omega;
    let c2 = tau * (mu * mu - T::one());
    let big = a * a + b * b - lit::<T>(2.0) * c2;
    let det = a * b - c2;
    let disc = (big * big - lit::<T>(4.0) * det * det).max(T::zero()).sqrt();
    let nu_p = ((big + disc) / lit(2.0)).sqrt();
    let nu_m = ((big - disc) / lit(2.0)).max(T::zero()).sqrt();
    let nu_c = match detection {
        Detection::Heterodyne => a - c2 / (b + T::one()),
        Detection::Homodyne => (a * (a - c2 / b)).sqrt(),
    };
    let tol = T::one() - lit::<T>(1e-9).max(lit::<T>(1e3) * T::epsilon());
    for v in [nu_p, nu_m, nu_c] {
        if !(v >= tol) {
            return Err(Error::Numerical(format!("non-physical symplectic eigenvalue {v}")));
        }
    }
    let clip = |v: T| v.max(T::one());
    Ok(g_nu(clip(nu_p)) + g_nu(clip(nu_m)) - g_nu(clip(nu_c)))
}

/// Asymptotic rate `β I − χ` (not clamped).
pub fn asymptotic_rate<T: Real>(tau: T, nbar: T, params: &ProtocolParams<T>) -> Result<T> {
    let i = mutual_information(tau, nbar, params.sigma_x2(), params.detection);
    Ok(params.beta * i - holevo_bound(tau, nbar, params.mu, params.detection)?)
}

fn finite_size_bracket<T: Real>(tau: T, nbar_prime: T, params: &ProtocolParams<T>, n_eff: T, extra: T) -> Result<T> {
    let rm = asymptotic_rate(tau, nbar_prime, params)?;
    Ok(rm - params.delta_aep() / n_eff.sqrt() + (params.theta() - extra) / n_eff)
}

fn llo_factor<T: Real>(params: &ProtocolParams<T>) -> T {
    if params.llo_linewidth.is_some() {
        lit(0.5)
    } else {
        T::one()
    }
}

/// Composable finite-size rate against collective attacks at fixed `τ`.
pub fn composable_rate<T: Real>(tau: T, nbar_prime: T, params: &ProtocolParams<T>) -> Result<Clamped<T>> {
    let p = ProtocolParams { attack: Attack::Collective, ..*params };
    p.validate()?;
    let n = p.n_key();
    let raw = n * p.p_ec / p.block_size * finite_size_bracket(tau, nbar_prime, &p, n, T::zero())?;
    Ok(Clamped::new(llo_factor(params) * raw))
}

/// `Σ_n` of the energy test.
pub fn sigma_n<T: Real>(n: T, f_et: T, epsilon: T) -> Result<T> {
    let l = (lit::<T>(8.0) / epsilon).ln();
    let two = lit::<T>(2.0);
    let num = T::one() + two * (l / (two * n)).sqrt() + l / n;
    let den = T::one() - two * (l / (two * f_et * n)).sqrt();
    if !(den > T::zero()) {
        return Err(Error::Numerical("energy-test block too small".into()));
    }
    Ok(num / den)
}

/// Energy-test cutoff `K_n = max{1, 2n n̄_T Σ_n}` with `n̄_T = (μ − 1)/2`.
pub fn energy_cutoff<T: Real>(n: T, params: &ProtocolParams<T>) -> Result<T> {
    let n_t = params.sigma_x2() / lit(2.0);
    Ok((lit::<T>(2.0) * n * n_t * sigma_n(n, params.f_et, params.epsilon())?).max(T::one()))
}

/// Rate against general attacks with its security parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralRate<T> {
    pub rate: Clamped<T>,
    pub k_n: T,
    /// `ε′ = K_n⁴ ε/50`.
    pub eps_prime: T,
}

fn general_penalty<T: Real>(n_eff: T, params: &ProtocolParams<T>) -> Result<(T, T, T)> {
    let k = energy_cutoff(n_eff, params)?;
    let penalty = lit::<T>(2.0) * log2_binomial_plus4(k).ceil();
    let eps_prime = k.powi(4) * params.epsilon() / lit(50.0);
    Ok((k, penalty, eps_prime))
}

/// Heterodyne rate against general coherent attacks at fixed `τ`.
pub fn general_attack_rate<T: Real>(tau: T, nbar_prime: T, params: &ProtocolParams<T>) -> Result<GeneralRate<T>> {
    let p = ProtocolParams { attack: Attack::General, ..*params };
    p.validate()?;
    let n = p.n_key();
    let (k_n, penalty, eps_prime) = general_penalty(n, &p)?;
    let raw = n * p.p_ec / p.block_size * finite_size_bracket(tau, nbar_prime, &p, n, penalty)?;
    Ok(GeneralRate { rate: Clamped::new(llo_factor(params) * raw), k_n, eps_prime })
}

/// Post-selected rate over a fading channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostSelectedRate<T> {
    pub rate: Clamped<T>,
    pub eta_th: T,
    pub p_th: T,
    pub nbar_prime: T,
    /// Security parameter against general attacks (`None` for collective).
    pub eps_prime: Option<T>,
}

/// Rate keeping only the blocks with `τ ≥ η_th = φη`, computed at the
/// threshold transmissivity.
pub fn postselected_rate<T: Real>(model: &FadingModel<T>, nbar_prime: T, params: &ProtocolParams<T>) -> Result<PostSelectedRate<T>> {
    params.validate()?;
    let eta_th = params.phi * model.eta;
    let p_th = model.p_threshold(eta_th)?;
    let zero = PostSelectedRate { rate: Clamped::new(T::zero()), eta_th, p_th, nbar_prime, eps_prime: None };
    if p_th <= T::zero() {
        return Ok(zero);
    }
    let n = params.n_key();
    let n_eff = n * p_th;
    let (extra, eps_prime) = match params.attack {
        Attack::Collective => (T::zero(), None),
        Attack::General => {
            let (_, penalty, eps) = general_penalty(n_eff, params)?;
            (penalty, Some(eps))
        }
    };
    let raw = n_eff * params.p_ec / params.block_size * finite_size_bracket(eta_th, nbar_prime, params, n_eff, extra)?;
    Ok(PostSelectedRate { rate: Clamped::new(llo_factor(params) * raw), eps_prime, ..zero })
}

/// Local-oscillator phase noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloNoise<T> {
    pub eps_llo: T,
    pub nbar_llo: T,
}

/// `ε_LLO = 2πσ_x²Δν/C`, `n̄_LLO = τ ε_LLO/2`.
pub fn llo_noise<T: Real>(sigma_x2: T, clock_hz: T, linewidth: T, tau: T) -> Result<LloNoise<T>> {
    if !(clock_hz > T::zero()) {
        return domain("clock must be positive");
    }
    let eps_llo = lit::<T>(2.0) * T::PI() * sigma_x2 * linewidth / clock_hz;
    Ok(LloNoise { eps_llo, nbar_llo: tau * eps_llo / lit(2.0) })
}

/// End-to-end rate from the fading model and the true thermal number:
/// adds local-oscillator noise if configured, builds the worst-case
/// estimate from the pilots and applies post-selection.
pub fn secret_key_rate<T: Real>(model: &FadingModel<T>, nbar: T, params: &ProtocolParams<T>) -> Result<PostSelectedRate<T>> {
    params.validate()?;
    let mut n = nbar;
    if let Some(dv) = params.llo_linewidth {
        n = n + llo_noise(params.sigma_x2(), params.clock_hz, dv, params.phi * model.eta)?.nbar_llo;
    }
    let nbar_prime = worst_case_nbar(n, params.pilots, params.detection, params.eps_pe, params.tail)?;
    postselected_rate(model, nbar_prime, params)
}

/// Outcome of one emulated pilot-estimation round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult<T> {
    pub sqrt_tau_hat: T,
    /// Predicted variance `σ_z²/(2ν_add m n̄_p)` of the estimator.
    pub sqrt_tau_var: T,
    pub nbar_hat: T,
    pub nbar_prime: T,
}

/// Monte Carlo emulation of the pilot-based estimators at fixed `τ`.
#[derive(Debug, Clone)]
pub struct PilotEmulator {
    rng: ChaCha8Rng,
}

impl PilotEmulator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Emulates `m` pilots of `n_p` photons each through a channel with
    /// transmissivity `tau` and thermal number `nbar`.
    pub fn estimate<T: Real>(
        &mut self,
        tau: T,
        nbar: T,
        m: usize,
        n_p: T,
        detection: Detection,
        eps_pe: T,
        tail: Tail,
    ) -> Result<EstimationResult<T>> {
        if m == 0 {
            return domain("need at least one pilot");
        }
        let nu: f64 = detection.nu_add();
        let samples = m * nu as usize;
        let x = (2.0 * to_f64(n_p)).sqrt();
        let st = to_f64(tau).sqrt();
        let sz = (2.0 * to_f64(nbar) + nu).sqrt();
        let ys: Vec<f64> = (0..samples)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut self.rng);
                st * x + sz * g
            })
            .collect();
        let k = samples as f64;
        let sqrt_tau_hat = ys.iter().map(|y| y / x).sum::<f64>() / k;
        let resid = ys.iter().map(|y| (y - st * x).powi(2)).sum::<f64>() / k;
        let nbar_hat = 0.5 * (resid - nu);
        let sqrt_tau_var = sz * sz / (2.0 * nu * m as f64 * to_f64(n_p));
        let w = to_f64(pe_confidence(eps_pe, tail));
        let nbar_prime = nbar_hat + w * (2.0 * to_f64(nbar) + nu) / (2.0 * nu * m as f64).sqrt();
        Ok(EstimationResult {
            sqrt_tau_hat: lit(sqrt_tau_hat),
            sqrt_tau_var: lit(sqrt_tau_var),
            nbar_hat: lit(nbar_hat),
            nbar_prime: lit(nbar_prime),
        })
    }
}

/// Result of [`optimize_protocol`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum<T> {
    pub mu: T,
    pub phi: T,
    pub rate: T,
    /// False when the rate is non-positive everywhere on the grid.
    pub feasible: bool,
}

const GRID: usize = 32;

fn golden_max<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, iters: usize) -> (T, T) {
    let r = lit::<T>((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximises `rate(μ, φ)` over a box: a 32×32 grid evaluated in parallel,
/// then golden-section refinement along each axis around the best cell.
/// Ties prefer smaller `μ`, then smaller `φ`.
pub fn optimize_protocol<T, F>(rate: F, mu_range: (T, T), phi_range: (T, T)) -> Result<Optimum<T>>
where
    T: Real,
    F: Fn(T, T) -> T + Sync,
{
    let (m0, m1) = mu_range;
    let (p0, p1) = phi_range;
    if !(m0 > T::one() && m1 >= m0 && m1 <= lit(100.0)) || !(p0 > T::zero() && p1 >= p0 && p1 < T::one()) {
        return domain("optimizer ranges must satisfy 1 < mu <= 100 and 0 < phi < 1");
    }
    let axis = |a: T, b: T, i: usize| {
        if b == a {
            a
        } else {
            a + (b - a) * lit(i as f64) / lit((GRID - 1) as f64)
        }
    };
    let clean = |v: T| if v.is_nan() { T::neg_infinity() } else { v };
    let values: Vec<(T, T, T)> = (0..GRID * GRID)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / GRID, idx % GRID);
            let (mu, phi) = (axis(m0, m1, i), axis(p0, p1, j));
            (mu, phi, clean(rate(mu, phi)))
        })
        .collect();
    let mut best = values[0];
    for &v in &values[1..] {
        if v.2 > best.2 {
            best = v;
        }
    }
    if !(best.2 > T::zero()) {
        return Ok(Optimum { mu: best.0, phi: best.1, rate: best.2.max(T::zero()), feasible: false });
    }
    let dmu = (m1 - m0) / lit((GRID - 1) as f64);
    let dphi = (p1 - p0) / lit((GRID - 1) as f64);
    let (mut mu, mut phi, mut r) = best;
    for _ in 0..3 {
        if dmu > T::zero() {
            let (x, fx) = golden_max(|x| clean(rate(x, phi)), (mu - dmu).max(m0), (mu + dmu).min(m1), 40);
            if fx > r {
                mu = x;
                r = fx;
            }
        }
        if dphi > T::zero() {
            let (y, fy) = golden_max(|y| clean(rate(mu, y)), (phi - dphi).max(p0), (phi + dphi).min(p1), 40);
            if fy > r {
                phi = y;
                r = fy;
            }
        }
    }
    Ok(Optimum { mu, phi, rate: r, feasible: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::plob;

    #[test]
    fn mutual_information_values() {
        assert_eq!(mutual_information(0.5f64, 0.1, 0.0, Detection::Homodyne), 0.0);
        assert!((mutual_information(1.0f64, 0.0, 3.0, Detection::Homodyne) - 1.0).abs() < 1e-15);
        // equivalent-noise form
        for det in [Detection::Homodyne, Detection::Heterodyne] {
            let (tau, nb, nex, sx2) = (0.3f64, 0.02, 0.001, 8.0);
            let n = nb + nex;
            let direct = mutual_information(tau, n, sx2, det);
            let eq = equivalent_noise(tau, nb, nex, det);
            let via = mutual_information_equivalent(sx2, eq, det);
            let direct_het_form = if det == Detection::Heterodyne { direct } else { direct };
            assert!((direct_het_form - via).abs() < 1e-12, "{det:?}: {direct} vs {via}");
        }
    }

    #[test]
    fn holevo_limits_and_positivity() {
        let near_id = holevo_bound(1.0 - 1e-9, 0.0, 10.0, Detection::Heterodyne).unwrap();
        assert!(near_id < 1e-5, "{near_id}");
        for &tau in &[0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            for &nb in &[0.0, 0.1, 0.5] {
                for &mu in &[2.0, 5.0, 10.0, 20.0] {
                    for det in [Detection::Homodyne, Detection::Heterodyne] {
                        let chi = holevo_bound(tau, nb, mu, det).unwrap();
                        assert!(chi >= -1e-12, "chi<0 at {tau} {nb} {mu}");
                        let p = ProtocolParams { beta: 1.0, mu, detection: det, ..ProtocolParams::collective() };
                        let r = asymptotic_rate(tau, 0.0, &p).unwrap();
                        assert!(r <= plob(tau) + 1e-12);
                    }
                }
            }
        }
        assert!(holevo_bound(0.0f64, 0.0, 2.0, Detection::Homodyne).is_err());
    }

    #[test]
    fn rate_decreases_with_noise() {
        let p = ProtocolParams::<f64>::collective();
        let mut last = f64::INFINITY;
        for &nb in &[0.0, 0.001, 0.01, 0.05] {
            let r = asymptotic_rate(0.3, nb, &p).unwrap();
            assert!(r < last);
            last = r;
        }
        let tiny = asymptotic_rate(1e-9, 0.0, &p).unwrap();
        assert!(tiny.abs() < 1e-6);
    }

    #[test]
    fn table_budget_values() {
        let c = ProtocolParams::<f64>::collective();
        assert!((c.epsilon() / 4.5e-10 - 1.0).abs() < 0.02);
        assert!((c.delta_aep() - 169.26).abs() < 0.05);
        let g = ProtocolParams::<f64>::general();
        assert!((g.n_key() / 4.47e7 - 1.0).abs() < 1e-3);
        assert!((g.w() - 14.07).abs() < 0.01);
        assert!((g.epsilon() / 3.1e-43 - 1.0).abs() < 1e-12);
        let nb = worst_case_nbar(0.01, 1e30, Detection::Heterodyne, 1e-10, Tail::Gaussian).unwrap();
        assert!((nb - 0.01f64).abs() < 1e-12);
    }

    #[test]
    fn composable_below_asymptotic_and_converges() {
        let p = ProtocolParams::<f64>::collective();
        let asym = asymptotic_rate(0.3, 0.01, &p).unwrap();
        let r = composable_rate(0.3, 0.01, &p).unwrap();
        assert!(r.value < asym);
        let big = ProtocolParams { block_size: 1e12, pilots: 1.5e11, p_ec: 1.0, ..p };
        let rb = composable_rate(0.3, 0.01, &big).unwrap().value / 0.85;
        assert!((rb / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn general_rate_below_collective() {
        let g = ProtocolParams::<f64>::general();
        let c = ProtocolParams { attack: Attack::Collective, ..g };
        let rc = composable_rate(0.3, 0.01, &c).unwrap().raw;
        let rg = general_attack_rate(0.3, 0.01, &g).unwrap();
        assert!(rg.rate.raw < rc);
        let hom = ProtocolParams { detection: Detection::Homodyne, ..g };
        assert!(matches!(general_attack_rate(0.3, 0.01, &hom), Err(Error::Unsupported(_))));
    }

    #[test]
    fn llo_arithmetic() {
        let l = llo_noise(10.0f64, 5e6, 1e3, 0.5).unwrap();
        assert!((l.eps_llo - 2.0 * std::f64::consts::PI * 10.0 * 1e3 / 5e6).abs() < 1e-15);
        assert!((l.nbar_llo - 0.25 * l.eps_llo).abs() < 1e-15);
        assert_eq!(llo_noise(10.0f64, 5e6, 0.0, 0.5).unwrap().eps_llo, 0.0);
    }

    #[test]
    fn postselection_without_fading_reduces_to_fixed_rate() {
        let m = FadingModel::new(0.38, 1.0, 4.0, 0.0).unwrap();
        let p = ProtocolParams { phi: 1.0 - 1e-12, ..ProtocolParams::<f64>::collective() };
        let ps = postselected_rate(&m, 0.01, &p).unwrap();
        let fixed = composable_rate(m.eta, 0.01, &p).unwrap();
        assert_eq!(ps.p_th, 1.0);
        assert!((ps.rate.raw / fixed.raw - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pilot_emulation_statistics() {
        let mut em = PilotEmulator::new(3);
        let (tau, nb, m, np) = (1e-3f64, 0.01, 200, 1e6);
        let trials = 10_000;
        let mut st = Vec::with_capacity(trials);
        let mut nh = Vec::with_capacity(trials);
        let mut pred = 0.0;
        for _ in 0..trials {
            let e = em.estimate(tau, nb, m, np, Detection::Heterodyne, 1e-10, Tail::Gaussian).unwrap();
            st.push(e.sqrt_tau_hat);
            nh.push(e.nbar_hat);
            pred = e.sqrt_tau_var;
            assert!(e.nbar_prime >= e.nbar_hat);
        }
        let mean = st.iter().sum::<f64>() / trials as f64;
        let var = st.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        assert!((var / pred - 1.0).abs() < 0.05, "{var} vs {pred}");
        let mn = nh.iter().sum::<f64>() / trials as f64;
        let sd = (nh.iter().map(|v| (v - mn).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
        assert!((mn - nb).abs() < 3.0 * sd / (trials as f64).sqrt());
    }

    #[test]
    fn optimizer_basics() {
        let f = |mu: f64, phi: f64| -(mu - 7.3).powi(2) - (phi - 0.61).powi(2) + 1.0;
        let o = optimize_protocol(f, (2.0, 20.0), (0.3, 0.95)).unwrap();
        assert!((o.mu - 7.3).abs() < 1e-4 && (o.phi - 0.61).abs() < 1e-4);
        let single = optimize_protocol(f, (5.0, 5.0), (0.5, 0.5)).unwrap();
        assert_eq!((single.mu, single.phi), (5.0, 0.5));
        let none = optimize_protocol(|_: f64, _: f64| -1.0, (2.0, 20.0), (0.3, 0.9)).unwrap();
        assert!(!none.feasible);
    }
}
