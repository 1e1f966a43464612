//! Flat `key = value` configuration with unit suffixes.
//!
//! Lines starting with `#` are comments. Every key has a default (see
//! `satqkd show-config`); files and `--set` overrides only replace values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// (key, default, description)
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario.environment", "night-down", "night-up | night-down | day-up | day-down-clear | day-down-cloudy"),
    ("scenario.setup", "2", "receiver preset 1..4 (beam waist, aperture, filter)"),
    ("link.wavelength", "800nm", "optical wavelength"),
    ("link.w0", "auto", "initial spot size (auto: from setup)"),
    ("link.curvature", "inf", "wavefront curvature radius (inf: collimated)"),
    ("receiver.aperture", "auto", "aperture radius (auto: from setup)"),
    ("receiver.filter", "auto", "spectral filter width (auto: from setup)"),
    ("receiver.time_window", "10ns", "detection time window"),
    ("receiver.fov", "1e-10", "field of view (sr)"),
    ("receiver.efficiency", "0.4", "setup efficiency"),
    ("receiver.excess_noise", "0", "trusted excess photons"),
    ("atmosphere.mode", "quadrature", "quadrature | secant"),
    ("atmosphere.alpha0", "5e-6", "sea-level extinction (1/m)"),
    ("atmosphere.scale_height", "6.6km", "extinction scale height"),
    ("turbulence.profile", "auto", "auto | hv-night | hv-day | hv-worst-day | hufnagel-stanley"),
    ("turbulence.spot_model", "simplified", "simplified | exact | exact-linear"),
    ("pointing.error", "1urad", "pointing error"),
    ("protocol.block_size", "1e8", "block size N"),
    ("protocol.pilot_fraction", "0.15", "pilots m as a fraction of N"),
    ("protocol.mu", "9.28", "modulation variance"),
    ("protocol.phi", "0.73", "post-selection threshold fraction"),
    ("protocol.optimize", "false", "optimise mu and phi (true | false)"),
    ("protocol.mu_range", "2:20", "optimizer range for mu"),
    ("protocol.phi_range", "0.3:0.95", "optimizer range for phi"),
    ("protocol.beta", "0.96", "reconciliation efficiency"),
    ("protocol.p_ec", "0.9", "error-correction success probability"),
    ("protocol.epsilon", "1.1641532182693481e-10", "eps_s = eps_h = eps_pe = eps_cor"),
    ("protocol.alphabet", "32", "alphabet size d"),
    ("protocol.clock", "5MHz", "source clock"),
    ("protocol.detection", "heterodyne", "heterodyne | homodyne"),
    ("protocol.tail", "gaussian", "gaussian | hoeffding"),
    ("protocol.attack", "collective", "collective | general"),
    ("protocol.energy_test", "0.9", "energy-test fraction (general attacks)"),
    ("protocol.llo_linewidth", "none", "laser linewidth for a local LO (none: transmitted LO)"),
    ("orbit.altitude", "530km", "satellite altitude"),
    ("orbit.blocks", "auto", "blocks per pass (auto: as many as fit)"),
    ("sweep.altitudes", "100km:36000km:40:log", "altitude grid (list or start:stop:n[:log])"),
    ("sweep.angles", "0,1", "zenith-angle grid"),
    ("max_range.mode", "tight", "simple | tight | both"),
    ("max_range.angle", "0", "zenith angle for the tight search"),
    ("max_range.environments", "all", "comma list of environments or all"),
    ("fiber.distances", "10km:10000km:61:log", "station-separation grid"),
    ("fiber.repeaters", "0,30", "repeater counts"),
    ("fiber.environments", "night-down", "satellite scenarios to compare"),
    ("mc.samples", "1000000", "Monte Carlo samples"),
    ("mc.seed", "1", "random seed"),
    ("mc.angle", "0.5", "zenith angle for the fading check"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        let values = KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect();
        Self { values }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override '{pair}' is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(CliError::Config(format!("unknown key '{key}'"))),
        }
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("undeclared key {key}"))
    }

    /// Single-line rendering used in output headers.
    pub fn summary(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join("; ")
    }

    /// File rendering with descriptions, readable back by [`Config::load`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, _, doc) in KEYS {
            out.push_str(&format!("# {doc}\n{k} = {}\n", self.raw(k)));
        }
        out
    }

    pub fn text(&self, key: &str) -> String {
        self.raw(key).to_string()
    }

    /// `None` for the value `auto`.
    pub fn auto(&self, key: &str) -> Option<&str> {
        match self.raw(key) {
            "auto" => None,
            v => Some(v),
        }
    }

    pub fn number(&self, key: &str) -> Result<f64, CliError> {
        parse_quantity(self.raw(key), Kind::Plain).map_err(|e| keyed(key, e))
    }

    pub fn length(&self, key: &str) -> Result<f64, CliError> {
        parse_quantity(self.raw(key), Kind::Length).map_err(|e| keyed(key, e))
    }

    pub fn time(&self, key: &str) -> Result<f64, CliError> {
        parse_quantity(self.raw(key), Kind::Time).map_err(|e| keyed(key, e))
    }

    pub fn angle(&self, key: &str) -> Result<f64, CliError> {
        parse_quantity(self.raw(key), Kind::Angle).map_err(|e| keyed(key, e))
    }

    pub fn frequency(&self, key: &str) -> Result<f64, CliError> {
        parse_quantity(self.raw(key), Kind::Frequency).map_err(|e| keyed(key, e))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(CliError::Config(format!("{key}: expected true or false, got '{v}'"))),
        }
    }

    pub fn count(&self, key: &str) -> Result<u64, CliError> {
        let v = self.number(key)?;
        if v < 0.0 || v.fract() != 0.0 || v > 9e15 {
            return Err(CliError::Config(format!("{key}: expected a non-negative integer")));
        }
        Ok(v as u64)
    }

    pub fn grid(&self, key: &str, kind: Kind) -> Result<Vec<f64>, CliError> {
        let g = parse_grid(self.raw(key), kind).map_err(|e| keyed(key, e))?;
        if g.is_empty() {
            return Err(CliError::Config(format!("{key}: empty grid")));
        }
        Ok(g)
    }

    pub fn range(&self, key: &str) -> Result<(f64, f64), CliError> {
        let raw = self.raw(key);
        let (a, b) = raw.split_once(':').ok_or_else(|| CliError::Config(format!("{key}: expected lo:hi")))?;
        let lo = parse_quantity(a, Kind::Plain).map_err(|e| keyed(key, e))?;
        let hi = parse_quantity(b, Kind::Plain).map_err(|e| keyed(key, e))?;
        Ok((lo, hi))
    }

    pub fn list(&self, key: &str) -> Vec<String> {
        self.raw(key).split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    }
}

fn keyed(key: &str, msg: String) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Plain,
    Length,
    Time,
    Angle,
    Frequency,
}

fn unit_scale(kind: Kind, unit: &str) -> Option<f64> {
    let s = match (kind, unit) {
        (_, "") => 1.0,
        (Kind::Length, "m") => 1.0,
        (Kind::Length, "km") => 1e3,
        (Kind::Length, "cm") => 1e-2,
        (Kind::Length, "mm") => 1e-3,
        (Kind::Length, "um") => 1e-6,
        (Kind::Length, "nm") => 1e-9,
        (Kind::Length, "pm") => 1e-12,
        (Kind::Time, "s") => 1.0,
        (Kind::Time, "ms") => 1e-3,
        (Kind::Time, "us") => 1e-6,
        (Kind::Time, "ns") => 1e-9,
        (Kind::Time, "ps") => 1e-12,
        (Kind::Angle, "rad") => 1.0,
        (Kind::Angle, "mrad") => 1e-3,
        (Kind::Angle, "urad") => 1e-6,
        (Kind::Angle, "deg") => std::f64::consts::PI / 180.0,
        (Kind::Frequency, "Hz") => 1.0,
        (Kind::Frequency, "kHz") => 1e3,
        (Kind::Frequency, "MHz") => 1e6,
        (Kind::Frequency, "GHz") => 1e9,
        _ => return None,
    };
    Some(s)
}

/// Parses a number with an optional unit suffix into SI units.
pub fn parse_quantity(text: &str, kind: Kind) -> Result<f64, String> {
    let t = text.trim();
    if t == "inf" {
        return Ok(f64::INFINITY);
    }
    let split = t
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphabetic())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    // keep exponents such as 1e-9 intact
    let (num, unit) = if split > 0 && t[..split].ends_with(|c: char| c.is_ascii_digit() || c == '.') {
        (&t[..split], &t[split..])
    } else {
        (t, "")
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("cannot parse '{text}'"))?;
    let scale = unit_scale(kind, unit).ok_or_else(|| format!("unit '{unit}' not accepted here"))?;
    if !v.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(v * scale)
}

/// Comma list or `start:stop:n[:log]`.
pub fn parse_grid(text: &str, kind: Kind) -> Result<Vec<f64>, String> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if !(parts.len() == 3 || (parts.len() == 4 && parts[3] == "log")) {
            return Err(format!("range '{t}' must be start:stop:n or start:stop:n:log"));
        }
        let a = parse_quantity(parts[0], kind)?;
        let b = parse_quantity(parts[1], kind)?;
        let n: usize = parts[2].trim().parse().map_err(|_| format!("bad point count in '{t}'"))?;
        let log = parts.len() == 4;
        if log && !(a > 0.0 && b > 0.0) {
            return Err("log grid needs positive end points".into());
        }
        return Ok((0..n)
            .map(|i| {
                let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if log {
                    (a.ln() + f * (b.ln() - a.ln())).exp()
                } else {
                    a + f * (b - a)
                }
            })
            .collect());
    }
    t.split(',').map(|p| parse_quantity(p, kind)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units() {
        assert_eq!(parse_quantity("530km", Kind::Length).unwrap(), 530e3);
        assert_eq!(parse_quantity("1e-9", Kind::Length).unwrap(), 1e-9);
        assert!((parse_quantity("0.1pm", Kind::Length).unwrap() - 1e-13).abs() < 1e-28);
        assert_eq!(parse_quantity("10ns", Kind::Time).unwrap(), 1e-8);
        assert!((parse_quantity("90deg", Kind::Angle).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(parse_quantity("5MHz", Kind::Frequency).unwrap(), 5e6);
        assert!(parse_quantity("5km", Kind::Time).is_err());
        assert!(parse_quantity("abc", Kind::Plain).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0,1", Kind::Angle).unwrap(), vec![0.0, 1.0]);
        let g = parse_grid("1km:100km:3:log", Kind::Length).unwrap();
        assert!((g[1] - 1e4).abs() < 1e-6);
        assert_eq!(parse_grid("0:1:3", Kind::Plain).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("", Kind::Plain).unwrap().is_empty());
    }

    #[test]
    fn overrides_and_round_trip() {
        let mut c = Config::default();
        c.set_pair("orbit.altitude=155km").unwrap();
        assert!(c.set_pair("nope=1").is_err());
        let mut d = Config::default();
        d.apply_text(&c.render()).unwrap();
        assert_eq!(c, d);
    }
}
