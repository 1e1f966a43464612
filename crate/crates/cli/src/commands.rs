use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use satqkd::bounds::{MaxRange, RangeSearch};
use satqkd::cvqkd::secret_key_rate;
use satqkd::fading::ks_statistic;
use satqkd::orbit::{fiber_crossover, repeater_rate, bits_per_day, CircularOrbit};

use crate::config::{Config, Kind};
use crate::error::CliError;
use crate::settings::{environments, protocol, scenario, tuned_protocol};

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Writes the config comment line, the header and the rows.
fn write_csv(out: &mut dyn Write, cfg: &Config, comments: &[String], header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    writeln!(out, "# config: {}", cfg.summary())?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluates `f` over `items` on the pool, keeping input order and
/// reporting the first failure in that order.
fn ordered<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> Result<O, CliError> + Sync + Send) -> Result<Vec<O>, CliError> {
    let results: Vec<Result<O, CliError>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}

pub fn bounds(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let env = cfg.text("scenario.environment");
    let sc = scenario(cfg, &env)?;
    let hs = cfg.grid("sweep.altitudes", Kind::Length)?;
    let ts = cfg.grid("sweep.angles", Kind::Angle)?;
    let points: Vec<(f64, f64)> = ts.iter().flat_map(|&t| hs.iter().map(move |&h| (h, t))).collect();
    let rows = ordered(&points, |&(h, t)| {
        let r = sc.bounds_at(h, t)?;
        Ok(vec![
            fmt(h / 1e3),
            fmt(t),
            fmt(r.eta),
            fmt(r.nbar),
            fmt(r.u),
            fmt(r.v),
            fmt(r.b),
            fmt(r.thermal_upper),
            fmt(r.thermal_lower),
            fmt(r.thermal_lower_simple),
        ])
    })?;
    let header = ["h_km", "theta", "eta", "nbar", "U", "V", "B", "thermal_upper", "thermal_lower", "thermal_lower_simple"];
    write_csv(out, cfg, &[], &header, &rows)
}

pub fn rate(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let env = cfg.text("scenario.environment");
    let sc = scenario(cfg, &env)?;
    let h = cfg.length("orbit.altitude")?;
    let ts = cfg.grid("sweep.angles", Kind::Angle)?;
    protocol(cfg)?;
    let rows = ordered(&ts, |&t| {
        let p = tuned_protocol(cfg, &sc, h, t)?;
        let st = sc.state(h, t)?;
        let r = secret_key_rate(&st.model, st.nbar, &p)?;
        Ok(vec![
            fmt(h / 1e3),
            fmt(t),
            fmt(st.model.eta),
            fmt(st.nbar),
            fmt(p.mu),
            fmt(p.phi),
            fmt(r.eta_th),
            fmt(r.p_th),
            fmt(r.nbar_prime),
            fmt(r.rate.value),
            fmt(r.rate.raw),
            fmt(r.rate.value * p.clock_hz),
            opt(r.eps_prime),
        ])
    })?;
    let header = [
        "h_km", "theta", "eta", "nbar", "mu", "phi", "eta_th", "p_th", "nbar_prime", "rate", "rate_raw", "bits_per_second",
        "eps_prime",
    ];
    write_csv(out, cfg, &[], &header, &rows)
}

#[derive(Debug, Serialize)]
struct PassJson {
    config: String,
    environment: String,
    setup: u64,
    h_km: f64,
    #[serde(rename = "t_Q_s")]
    t_q_s: f64,
    #[serde(rename = "t_T_s")]
    t_t_s: f64,
    side_budget_s: f64,
    orbits_per_day: f64,
    inclination_deg: Option<f64>,
    mu: f64,
    phi: f64,
    n_bks: usize,
    slices: Vec<[f64; 2]>,
    per_slice_rate: Vec<f64>,
    #[serde(rename = "R_orb")]
    r_orb: f64,
    bits_per_second: f64,
    bits_per_pass: f64,
    bits_per_day: f64,
    warning: Option<String>,
}

fn blocks(cfg: &Config) -> Result<Option<usize>, CliError> {
    Ok(match cfg.auto("orbit.blocks") {
        None => None,
        Some(_) => Some(cfg.count("orbit.blocks")? as usize),
    })
}

/// Runs one pass; `μ`, `φ` are tuned at the 1 rad edge of the window.
fn run_pass(cfg: &Config, env: &str) -> Result<(satqkd::scenario::PassReport, satqkd::ProtocolParams), CliError> {
    let sc = scenario(cfg, env)?;
    let h = cfg.length("orbit.altitude")?;
    let p = tuned_protocol(cfg, &sc, h, 1.0)?;
    Ok((sc.pass(h, &p, blocks(cfg)?)?, p))
}

pub fn pass(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let env = cfg.text("scenario.environment");
    let (r, p) = run_pass(cfg, &env)?;
    let orbit = CircularOrbit::new(r.h)?;
    let json = PassJson {
        config: cfg.summary(),
        environment: env,
        setup: cfg.count("scenario.setup")?,
        h_km: r.h / 1e3,
        t_q_s: r.t_q,
        t_t_s: r.t_t,
        side_budget_s: (r.t_t - r.t_q) / 2.0,
        orbits_per_day: r.orbits_per_day,
        inclination_deg: orbit.sun_sync_inclination().ok(),
        mu: p.mu,
        phi: p.phi,
        n_bks: r.slices.len(),
        slices: r.slices.iter().map(|s| [s.theta_start, s.theta_end]).collect(),
        per_slice_rate: r.per_slice_rate.clone(),
        r_orb: r.r_orb,
        bits_per_second: r.r_orb * p.clock_hz,
        bits_per_pass: r.bits_per_pass,
        bits_per_day: r.bits_per_day,
        warning: r.warning.clone(),
    };
    serde_json::to_writer_pretty(&mut *out, &json)?;
    writeln!(out)?;
    Ok(())
}

pub fn compare_fiber(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let envs = environments(cfg, "fiber.environments")?;
    let ds = cfg.grid("fiber.distances", Kind::Length)?;
    let reps: Vec<u32> = cfg
        .grid("fiber.repeaters", Kind::Plain)?
        .into_iter()
        .map(|v| if v >= 0.0 && v.fract() == 0.0 { Ok(v as u32) } else { Err(CliError::Config("fiber.repeaters: expected integers".into())) })
        .collect::<Result<_, _>>()?;
    let clock = protocol(cfg)?.clock_hz;
    let sat = ordered(&envs, |e| Ok(run_pass(cfg, e)?.0.bits_per_day))?;
    let mut comments = Vec::new();
    for (e, bits) in envs.iter().zip(&sat) {
        comments.push(format!("satellite {e}: {bits} bits/day"));
        for &n in &reps {
            let x = if *bits > 0.0 { fmt(fiber_crossover(*bits, clock, n)? / 1e3) } else { "none".into() };
            comments.push(format!("crossover {e} repeaters={n}: {x} km"));
        }
    }
    let rows = ordered(&ds, |&d| {
        let mut row = vec![fmt(d / 1e3)];
        for &n in &reps {
            row.push(fmt(bits_per_day(repeater_rate(d, n)?, clock)));
        }
        row.extend(sat.iter().map(|&b| fmt(b)));
        Ok(row)
    })?;
    let mut header: Vec<String> = vec!["d_km".into()];
    header.extend(reps.iter().map(|n| format!("fiber_rep{n}_bits_per_day")));
    header.extend(envs.iter().map(|e| format!("sat_{e}_bits_per_day")));
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(out, cfg, &comments, &h, &rows)
}

pub fn validate_mc(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let env = cfg.text("scenario.environment");
    let sc = scenario(cfg, &env)?;
    let h = cfg.length("orbit.altitude")?;
    let t = cfg.angle("mc.angle")?;
    let n = cfg.count("mc.samples")? as usize;
    if n == 0 {
        return Err(CliError::Config("mc.samples must be positive".into()));
    }
    let seed = cfg.count("mc.seed")?;
    let phi = protocol(cfg)?.phi;
    let m = sc.state(h, t)?.model;
    let mut s: Vec<f64> = m.sampler(seed).take(n).collect();
    let eta_th = phi * m.eta;
    let above = s.iter().filter(|&&x| x > eta_th).count() as f64 / n as f64;
    let p = m.p_threshold(eta_th)?;
    let ks = ks_statistic(&mut s, |x| m.cdf(x));
    let row = vec![
        env,
        fmt(h / 1e3),
        fmt(t),
        fmt(m.eta),
        fmt(m.sigma2),
        fmt(m.gamma),
        fmt(m.r0),
        n.to_string(),
        seed.to_string(),
        fmt(ks),
        fmt(p),
        fmt(above),
        fmt((p * (1.0 - p) / n as f64).sqrt()),
    ];
    let header = [
        "environment", "h_km", "theta", "eta", "sigma2", "gamma", "r0", "samples", "seed", "ks", "p_threshold",
        "p_threshold_mc", "mc_std_error",
    ];
    write_csv(out, cfg, &[], &header, &[row])
}

pub fn max_range(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let envs = environments(cfg, "max_range.environments")?;
    let modes: Vec<&str> = match cfg.raw("max_range.mode") {
        "simple" => vec!["simple"],
        "tight" => vec!["tight"],
        "both" => vec!["simple", "tight"],
        v => return Err(CliError::Config(format!("max_range.mode: unrecognised value '{v}'"))),
    };
    let theta = cfg.angle("max_range.angle")?;
    let jobs: Vec<(String, &str)> = envs.iter().flat_map(|e| modes.iter().map(move |m| (e.clone(), *m))).collect();
    let rows = ordered(&jobs, |(e, mode)| {
        let sc = scenario(cfg, e)?;
        let r = match *mode {
            "simple" => sc.max_range_simple()?,
            _ => sc.max_range_tight(theta, RangeSearch::default())?,
        };
        let (z, status) = match r {
            MaxRange::Range(z) => (fmt(z / 1e3), "range"),
            MaxRange::BeyondCap(z) => (fmt(z / 1e3), "beyond-cap"),
            MaxRange::BreakingEverywhere => (String::new(), "breaking"),
        };
        Ok(vec![e.clone(), mode.to_string(), fmt(theta), fmt(sc.nbar()), z, status.to_string()])
    })?;
    write_csv(out, cfg, &[], &["environment", "mode", "theta", "nbar", "z_max_km", "status"], &rows)
}

pub fn show_config(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    out.write_all(cfg.render().as_bytes())?;
    Ok(())
}
