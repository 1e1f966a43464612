//! Typed views of the configuration.

use satqkd::atmosphere::ExtinctionModel;
use satqkd::beam::BeamParams;
use satqkd::cvqkd::{optimize_protocol, Attack, Detection, ProtocolParams, Tail};
use satqkd::noise::NoiseEnvironment;
use satqkd::scenario::{setup, AtmosphereMode, LinkScenario, SpotModel};
use satqkd::turbulence::{Profile, PsiForm};

use crate::config::Config;
use crate::error::CliError;

pub const ALL_ENVIRONMENTS: [&str; 5] = ["night-up", "night-down", "day-up", "day-down-clear", "day-down-cloudy"];

fn bad(key: &str, v: &str) -> CliError {
    CliError::Config(format!("{key}: unrecognised value '{v}'"))
}

/// Link scenario for `env` with every `link.*`, `receiver.*`,
/// `atmosphere.*`, `turbulence.*` and `pointing.*` override applied.
pub fn scenario(cfg: &Config, env: &str) -> Result<LinkScenario, CliError> {
    NoiseEnvironment::<f64>::from_name(env).map_err(|e| CliError::Config(e.to_string()))?;
    let id = cfg.count("scenario.setup")?;
    let id = u8::try_from(id).map_err(|_| CliError::Config("scenario.setup must be 1..4".into()))?;
    setup(id).map_err(|e| CliError::Config(e.to_string()))?;
    let mut sc = LinkScenario::new(env, id)?;

    let lambda = cfg.length("link.wavelength")?;
    let w0 = match cfg.auto("link.w0") {
        Some(_) => cfg.length("link.w0")?,
        None => sc.beam.w0,
    };
    let curvature = cfg.length("link.curvature")?;
    let r0 = if curvature.is_infinite() { None } else { Some(curvature) };
    sc.beam = BeamParams::new(lambda, w0, r0)?;
    if cfg.auto("receiver.aperture").is_some() {
        sc.receiver.a_r = cfg.length("receiver.aperture")?;
    }
    if cfg.auto("receiver.filter").is_some() {
        sc.receiver.delta_lambda = cfg.length("receiver.filter")?;
    }
    sc.receiver.delta_t = cfg.time("receiver.time_window")?;
    sc.receiver.omega_fov = cfg.number("receiver.fov")?;
    sc.receiver.eta_eff = cfg.number("receiver.efficiency")?;
    sc.receiver.n_ex = cfg.number("receiver.excess_noise")?;

    sc.atmosphere = match cfg.raw("atmosphere.mode") {
        "quadrature" => AtmosphereMode::Quadrature,
        "secant" => AtmosphereMode::Secant,
        v => return Err(bad("atmosphere.mode", v)),
    };
    sc.extinction = ExtinctionModel::new(cfg.number("atmosphere.alpha0")?, cfg.length("atmosphere.scale_height")?)?;
    if let Some(name) = cfg.auto("turbulence.profile") {
        let p = Profile::from_name(name).map_err(|e| CliError::Config(e.to_string()))?;
        sc = sc.with_profile(p)?;
    }
    sc.spot_model = match cfg.raw("turbulence.spot_model") {
        "simplified" => SpotModel::Simplified,
        "exact" => SpotModel::Exact(PsiForm::Exact),
        "exact-linear" => SpotModel::Exact(PsiForm::Linear),
        v => return Err(bad("turbulence.spot_model", v)),
    };
    sc.pointing_error = cfg.angle("pointing.error")?;
    sc.validate()?;
    Ok(sc)
}

pub fn protocol(cfg: &Config) -> Result<ProtocolParams<f64>, CliError> {
    let n = cfg.number("protocol.block_size")?;
    let eps = cfg.number("protocol.epsilon")?;
    let p = ProtocolParams {
        block_size: n,
        pilots: (cfg.number("protocol.pilot_fraction")? * n).round(),
        f_et: cfg.number("protocol.energy_test")?,
        beta: cfg.number("protocol.beta")?,
        p_ec: cfg.number("protocol.p_ec")?,
        eps_s: eps,
        eps_h: eps,
        eps_pe: eps,
        eps_cor: eps,
        d: cfg.number("protocol.alphabet")?,
        mu: cfg.number("protocol.mu")?,
        phi: cfg.number("protocol.phi")?,
        clock_hz: cfg.frequency("protocol.clock")?,
        detection: match cfg.raw("protocol.detection") {
            "heterodyne" | "het" => Detection::Heterodyne,
            "homodyne" | "hom" => Detection::Homodyne,
            v => return Err(bad("protocol.detection", v)),
        },
        tail: match cfg.raw("protocol.tail") {
            "gaussian" => Tail::Gaussian,
            "hoeffding" => Tail::Hoeffding,
            v => return Err(bad("protocol.tail", v)),
        },
        attack: match cfg.raw("protocol.attack") {
            "collective" => Attack::Collective,
            "general" => Attack::General,
            v => return Err(bad("protocol.attack", v)),
        },
        llo_linewidth: match cfg.raw("protocol.llo_linewidth") {
            "none" => None,
            _ => Some(cfg.frequency("protocol.llo_linewidth")?),
        },
    };
    p.validate()?;
    Ok(p)
}

/// Protocol parameters with `μ`, `φ` optimised at `(h, θ)` when
/// `protocol.optimize` is set.
pub fn tuned_protocol(cfg: &Config, sc: &LinkScenario, h: f64, theta: f64) -> Result<ProtocolParams<f64>, CliError> {
    let base = protocol(cfg)?;
    if !cfg.flag("protocol.optimize")? {
        return Ok(base);
    }
    let mu_range = cfg.range("protocol.mu_range")?;
    let phi_range = cfg.range("protocol.phi_range")?;
    let state = sc.state(h, theta)?;
    let rate = |mu: f64, phi: f64| {
        let p = ProtocolParams { mu, phi, ..base };
        satqkd::cvqkd::secret_key_rate(&state.model, state.nbar, &p).map(|r| r.rate.raw).unwrap_or(f64::NEG_INFINITY)
    };
    let best = optimize_protocol(rate, mu_range, phi_range)?;
    Ok(ProtocolParams { mu: best.mu, phi: best.phi, ..base })
}

pub fn environments(cfg: &Config, key: &str) -> Result<Vec<String>, CliError> {
    let list = cfg.list(key);
    if list.len() == 1 && list[0] == "all" {
        return Ok(ALL_ENVIRONMENTS.iter().map(|s| s.to_string()).collect());
    }
    if list.is_empty() {
        return Err(CliError::Config(format!("{key}: empty list")));
    }
    for e in &list {
        if !ALL_ENVIRONMENTS.contains(&e.as_str()) {
            return Err(bad(key, e));
        }
    }
    Ok(list)
}
