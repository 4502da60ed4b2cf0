//! Flat `section.key = value` configuration with a fixed schema.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// One configurable key with its default and a short description.
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

const fn k(key: &'static str, default: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { key, default, doc }
}

/// Every recognised key. An empty default means "unset".
pub const SCHEMA: &[KeySpec] = &[
    k("run.seed", "20240601", "seed for randomized checks"),
    // multi-bump lemma and candidate builder
    k("bump.shape", "quartic", "bump shape (registry name)"),
    k("bump.alpha", "0.2", "Hölder order alpha in (0,1)"),
    k("bump.beta", "1.5", "dyadic width exponent beta > 1"),
    k("bump.n", "", "single level n; overrides n_min..n_max"),
    k("bump.n_min", "4", "first level"),
    k("bump.n_max", "6", "last level"),
    k("bump.k_min", "1", "first window half-width k"),
    k("bump.k_max", "2", "last window half-width k"),
    k("bump.h", "1", "Hölder budget H"),
    k("bump.lambda_scale", "1", "Lambda_n = scale * 2^((1-alpha)*beta*n)"),
    k("bump.grid_points", "2000", "points of the global verification grid"),
    k("bump.kohn", "true", "also run the candidate builder and measure budget"),
    k("bump.eps1", "0.5", "Hölder margin eps1 of the candidate"),
    k("bump.eps0", "1", "allowed C1 distance eps0 of the candidate"),
    k("bump.k0", "1", "window k0 of the candidate"),
    // wave modes
    k("wave.alpha", "0.5", "Hölder order of the speed"),
    k("wave.beta", "4", "Gevrey index of the initial data"),
    k("wave.big_b", "4", "ultradistribution index B"),
    k("wave.mu1", "1", "lower speed bound"),
    k("wave.mu2", "200", "upper speed bound"),
    k("wave.h", "2000", "Hölder constant budget H"),
    k("wave.eps1", "0.5", "fraction of H spent on the oscillation"),
    k("wave.delta", "0.9", "oscillation window delta < 1/k0"),
    k("wave.k0", "1", "time horizon and ultradistribution radius k0"),
    k("wave.c0", "100", "constant tail speed c0 = m^2"),
    k("wave.n", "", "single dyadic level; overrides n_min..n_max"),
    k("wave.n_min", "4", "first mode lambda = 2^n_min"),
    k("wave.n_max", "11", "last mode lambda = 2^n_max"),
    k("wave.tol", "1e-12", "integrator tolerance"),
    k("wave.integrator", "dopri5", "mode integrator (registry name)"),
    k("wave.samples", "101", "output times per mode on [1/k0, k0]"),
    k("wave.h_gamma", "", "override for the derived constant H_gamma"),
    k("wave.ingredient_eps", "0.01,0.05,0.1,0.2", "epsilons for the ingredient identity"),
    k("wave.energy_speeds", "20", "random Lipschitz speeds for the energy sandwich"),
    k("wave.energy_mu1", "0.5", "lower bound of the random speeds"),
    k("wave.energy_mu2", "2", "upper bound of the random speeds"),
    k("wave.energy_knots", "30", "knots per random speed"),
    k("wave.energy_lambda", "10", "frequency of the energy test mode"),
    k("wave.energy_tmax", "5", "horizon of the energy test"),
    // transport
    k("transport.base", "shear-mixer", "base triple (registry name)"),
    k("transport.amplitude", "1", "stand-in mixer amplitude"),
    k("transport.switch_period", "1", "stand-in mixer switch period"),
    k("transport.grid", "512", "grid size for the resampled copies"),
    k("transport.box", "2.5", "side of the periodic box"),
    k("transport.x0", "0.6", "attachment point (x0, 0)"),
    k("transport.eps1", "0.5", "placement margin: 1 - eps1 < |x0| < 1"),
    k("transport.n", "", "single n; overrides n_min..n_max"),
    k("transport.n_min", "1", "first n"),
    k("transport.n_max", "16", "last n"),
    k("transport.direct_n_max", "2", "resample u_n on the grid for n up to this"),
    k("transport.base_grid", "256", "grid for base-scale measurements"),
    k("transport.base_times", "0.25,1.25", "base times at which u_* is sampled"),
    k("transport.base_dt", "0.02", "step for the base-scale advection"),
    k("transport.t_grid", "0,0.125", "times t of the hs_norm columns"),
    k("transport.k0", "1", "k0; the hs columns use s = 1/k0"),
    k("transport.gamma0", "0", "Gamma0 of the blow-up bound"),
    k("transport.big_c", "1", "C of the blow-up bound"),
    k("transport.c", "1", "rate c of the blow-up bound"),
    k("transport.budget_n_max", "64", "range of the crossing search"),
    k("transport.advect", "false", "advect u_n directly and compare with the prediction"),
    k("transport.interp", "cubic-lagrange", "advection interpolation kernel (registry name)"),
    k("transport.tmax", "0.1", "horizon of the direct advection"),
    k("transport.dt", "0.005", "step of the direct advection"),
    // sawtooth exercise
    k("exercise.n_min", "1", "first n"),
    k("exercise.n_max", "16", "last n"),
    k("exercise.h", "1", "Hölder budget H"),
    k("exercise.eps1", "0.5", "fraction of H spent on the sawtooth"),
    k("exercise.holder_points", "4001", "grid points on [0,1] for the order-1/2 constant"),
    k("exercise.lip_points", "20001", "grid points on [0,0.1] for the Lipschitz constant"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Effective configuration: the schema defaults overridden by files and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { values: SCHEMA.iter().map(|s| (s.key, s.default.to_string())).collect() }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let spec = SCHEMA.iter().find(|s| s.key == key).ok_or_else(|| err(format!("unknown config key `{key}`")))?;
        self.values.insert(spec.key, value.trim().to_string());
        Ok(())
    }

    /// Applies `section.key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(key.trim(), value).map_err(|e| err(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Resolves a possibly unqualified key against `section`.
    pub fn resolve(&self, section: &str, key: &str) -> Result<&'static str, ConfigError> {
        let full = if key.contains('.') { key.to_string() } else { format!("{section}.{key}") };
        SCHEMA.iter().find(|s| s.key == full).map(|s| s.key).ok_or_else(|| err(format!("unknown config key `{full}`")))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("key `{key}` missing from the schema"))
    }

    pub fn is_set(&self, key: &str) -> bool {
        !self.raw(key).is_empty()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        let v = self.raw(key);
        v.parse().map_err(|_| err(format!("`{key}`: cannot parse `{v}` as {}", std::any::type_name::<T>())))
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        if self.is_set(key) {
            self.get(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn get_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.raw(key)
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| err(format!("`{key}`: `{s}` is not a number"))))
            .collect()
    }

    /// `key` if set, otherwise the inclusive range `min_key..=max_key`.
    pub fn levels(&self, key: &str, min_key: &str, max_key: &str) -> Result<Vec<u32>, ConfigError> {
        if let Some(n) = self.get_opt::<u32>(key)? {
            return Ok(vec![n]);
        }
        self.range(min_key, max_key)
    }

    /// The inclusive range `min_key..=max_key`.
    pub fn range(&self, min_key: &str, max_key: &str) -> Result<Vec<u32>, ConfigError> {
        let (a, b): (u32, u32) = (self.get(min_key)?, self.get(max_key)?);
        if a > b {
            return Err(err(format!("`{min_key}` = {a} exceeds `{max_key}` = {b}")));
        }
        Ok((a..=b).collect())
    }

    /// `(key, value)` pairs under `run.` and `section.`, sorted by key.
    pub fn echo(&self, section: &str) -> Vec<(&'static str, &str)> {
        let prefix = format!("{section}.");
        self.values
            .iter()
            .filter(|(k, _)| k.starts_with("run.") || k.starts_with(&prefix))
            .map(|(k, v)| (*k, v.as_str()))
            .collect()
    }
}

/// `--sweep key=a..b`, an inclusive integer range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub key: String,
    pub lo: i64,
    pub hi: i64,
}

impl FromStr for Sweep {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || err(format!("sweep `{s}` is not of the form key=a..b"));
        let (key, range) = s.split_once('=').ok_or_else(bad)?;
        let (a, b) = range.split_once("..").ok_or_else(bad)?;
        let (lo, hi) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if lo > hi {
            return Err(err(format!("sweep `{s}` is empty")));
        }
        Ok(Sweep { key: key.trim().to_string(), lo, hi })
    }
}
