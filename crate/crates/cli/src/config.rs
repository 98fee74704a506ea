//! Run configuration: a config file (`key = value` lines or one JSON object)
//! overlaid by command-line flags.
//!
//! Keys (all optional in the file):
//!
//! | key | meaning | range |
//! |---|---|---|
//! | `command` | `wigner`, `squeeze`, `evolve`, `times`, `sweep` | |
//! | `atoms` | N, or a list `2,5,20` | 1 ..= 100000 |
//! | `atoms_log` | `min,max,count`: log-spaced integer N list | |
//! | `nbar` | n̄, or a list | 0 ..= 1e6 |
//! | `state` | `polar`, `nonpolar`, `coherent` | |
//! | `beta_deg`, `alpha_deg` | state angles in degrees | β in [0, 180] |
//! | `beta_min_deg`, `beta_max_deg`, `beta_step_deg` | squeezing β grid | [0, 180] |
//! | `n_theta`, `n_phi` | Wigner grid size | 1 ..= 8192 |
//! | `oversample` | grid factor over the minimal exact grid | 1 ..= 64 |
//! | `horizon` | evolution horizon (units 1/γ) | > 0 |
//! | `horizon_factor` | horizon in units of t_diss (default 5) | > 0 |
//! | `samples` | evolution samples | 2 ..= 10^6 |
//! | `nu` | also write ν(t) | bool |
//! | `ncl` | search for t_ncl | bool |
//! | `report_times` | append t_dec/t_diss from the written trace | bool |
//! | `output` | output path (default stdout) | |
//! | `format` | `csv` or `json` | |
//! | `precision` | significant digits of reals | 1 ..= 17 |

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Number, Value};

use crate::error::CliError;
use crate::table::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Wigner,
    Squeeze,
    Evolve,
    Times,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Polar,
    Nonpolar,
    Coherent,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(Option::<OneOrMany<T>>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub atoms: Option<Vec<usize>>,
    pub atoms_log: Option<Vec<usize>>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub nbar: Option<Vec<f64>>,
    pub state: Option<StateKind>,
    pub beta_deg: Option<f64>,
    pub alpha_deg: Option<f64>,
    pub beta_min_deg: Option<f64>,
    pub beta_max_deg: Option<f64>,
    pub beta_step_deg: Option<f64>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    pub oversample: Option<usize>,
    pub horizon: Option<f64>,
    pub horizon_factor: Option<f64>,
    pub samples: Option<usize>,
    pub nu: Option<bool>,
    pub ncl: Option<bool>,
    pub report_times: Option<bool>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub precision: Option<usize>,
}

pub const MAX_ATOMS: usize = 100_000;
pub const MAX_NBAR: f64 = 1e6;
pub const MAX_GRID: usize = 8192;

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    /// Fields set in `flags` replace those read from the file.
    pub fn overlay(mut self, flags: RunConfig) -> RunConfig {
        overlay!(self, flags; command, atoms, atoms_log, nbar, state, beta_deg, alpha_deg, beta_min_deg,
            beta_max_deg, beta_step_deg, n_theta, n_phi, oversample, horizon, horizon_factor, samples, nu, ncl,
            report_times, output, format, precision);
        self
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        RunConfig::parse(&text)
    }

    /// A JSON object if the first non-blank character is `{`, otherwise
    /// `key = value` lines (`#` starts a comment, lists are comma separated).
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            key_value_object(text)?
        };
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The N list: `atoms`, else `atoms_log`, else `default`.
    pub fn atoms_list(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let list = match (&self.atoms, &self.atoms_log) {
            (Some(a), _) => a.clone(),
            (None, Some(spec)) => log_spaced(spec)?,
            (None, None) => default.to_vec(),
        };
        if list.is_empty() {
            return Err(CliError::Config("atoms list is empty".into()));
        }
        for &n in &list {
            if !(1..=MAX_ATOMS).contains(&n) {
                return Err(CliError::Config(format!("atoms must lie in 1..={MAX_ATOMS}, got {n}")));
            }
        }
        Ok(list)
    }

    /// Exactly one N.
    pub fn single_atoms(&self, default: usize) -> Result<usize, CliError> {
        match self.atoms_list(&[default])?.as_slice() {
            [n] => Ok(*n),
            _ => Err(CliError::Config("this command takes a single atoms value".into())),
        }
    }

    pub fn nbar_list(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let list = self.nbar.clone().unwrap_or_else(|| default.to_vec());
        if list.is_empty() {
            return Err(CliError::Config("nbar list is empty".into()));
        }
        for &v in &list {
            if !(0.0..=MAX_NBAR).contains(&v) {
                return Err(CliError::Config(format!("nbar must lie in [0, {MAX_NBAR}], got {v}")));
            }
        }
        Ok(list)
    }

    pub fn single_nbar(&self, default: f64) -> Result<f64, CliError> {
        match self.nbar_list(&[default])?.as_slice() {
            [v] => Ok(*v),
            _ => Err(CliError::Config("this command takes a single nbar value".into())),
        }
    }

    pub fn precision(&self) -> Result<usize, CliError> {
        match self.precision.unwrap_or(17) {
            p @ 1..=17 => Ok(p),
            p => Err(CliError::Config(format!("precision must lie in 1..=17, got {p}"))),
        }
    }

    pub fn samples(&self, default: usize) -> Result<usize, CliError> {
        match self.samples.unwrap_or(default) {
            s @ 2..=1_000_000 => Ok(s),
            s => Err(CliError::Config(format!("samples must lie in 2..=1000000, got {s}"))),
        }
    }
}

pub fn angle(name: &str, deg: f64, max: Option<f64>) -> Result<f64, CliError> {
    let ok = deg.is_finite() && max.map_or(true, |m| (0.0..=m).contains(&deg));
    if !ok {
        let range = max.map_or("a finite value".to_string(), |m| format!("[0, {m}]"));
        return Err(CliError::Config(format!("{name} must be {range} degrees, got {deg}")));
    }
    Ok(deg.to_radians())
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn log_spaced(spec: &[usize]) -> Result<Vec<usize>, CliError> {
    let &[lo, hi, count] = spec else {
        return Err(CliError::Config("atoms_log takes min,max,count".into()));
    };
    if lo == 0 || hi < lo || count == 0 {
        return Err(CliError::Config(format!("bad atoms_log {lo},{hi},{count}")));
    }
    let mut out: Vec<usize> = (0..count)
        .map(|k| {
            if count == 1 {
                lo
            } else {
                let f = k as f64 / (count - 1) as f64;
                ((lo as f64).ln() * (1.0 - f) + (hi as f64).ln() * f).exp().round() as usize
            }
        })
        .collect();
    out.dedup();
    Ok(out)
}

fn scalar(s: &str) -> Value {
    if let Ok(v) = s.parse::<u64>() {
        return Value::Number(v.into());
    }
    if let Ok(v) = s.parse::<f64>() {
        if let Some(n) = Number::from_f64(v) {
            return Value::Number(n);
        }
    }
    match s {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(s.to_string()),
    }
}

fn key_value_object(text: &str) -> Result<Value, CliError> {
    let mut map = Map::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let v = if value.contains(',') {
            Value::Array(value.split(',').map(|p| scalar(p.trim())).collect())
        } else {
            scalar(value)
        };
        if map.insert(key.to_string(), v).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(Value::Object(map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_and_json_agree() {
        let kv = RunConfig::parse("command = times\natoms = 5, 50  # list\nnbar = 10\nncl=false\n").unwrap();
        let js = RunConfig::parse(r#"{"command": "times", "atoms": [5, 50], "nbar": 10, "ncl": false}"#).unwrap();
        assert_eq!(kv, js);
        assert_eq!(kv.atoms, Some(vec![5, 50]));
        assert_eq!(kv.nbar, Some(vec![10.0]));
    }

    #[test]
    fn unknown_and_malformed_keys_rejected() {
        assert!(matches!(RunConfig::parse("atom = 5"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse(r#"{"colour": 1}"#), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("atoms"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("atoms = 5\natoms = 6"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("atoms = -5"), Err(CliError::Config(_))));
    }

    #[test]
    fn flags_take_precedence() {
        let file = RunConfig::parse("atoms = 5\nnbar = 1\nprecision = 8").unwrap();
        let flags = RunConfig { atoms: Some(vec![7]), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.atoms, Some(vec![7]));
        assert_eq!(merged.nbar, Some(vec![1.0]));
        assert_eq!(merged.precision, Some(8));
    }

    #[test]
    fn ranges() {
        let c = RunConfig { atoms: Some(vec![0]), ..Default::default() };
        assert!(c.atoms_list(&[1]).is_err());
        let c = RunConfig { nbar: Some(vec![-1.0]), ..Default::default() };
        assert!(c.nbar_list(&[0.0]).is_err());
        let c = RunConfig { precision: Some(18), ..Default::default() };
        assert!(c.precision().is_err());
        assert!(angle("beta", 181.0, Some(180.0)).is_err());
        assert!(positive("horizon", 0.0).is_err());
    }

    #[test]
    fn log_spacing() {
        let c = RunConfig { atoms_log: Some(vec![5, 1000, 4]), ..Default::default() };
        assert_eq!(c.atoms_list(&[]).unwrap(), vec![5, 29, 171, 1000]);
        let c = RunConfig { atoms_log: Some(vec![2, 3, 5]), ..Default::default() };
        assert_eq!(c.atoms_list(&[]).unwrap(), vec![2, 3]);
    }
}
