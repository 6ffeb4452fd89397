//! Experiment configuration: a TOML document with explicit `"auto"`
//! markers for the quantities the parameter pipeline can choose.
//!
//! ```toml
//! s = 0.75
//! T = 4.0
//! stride = 8
//! seed = 1
//! N = "auto"        # or a dyadic value
//! epsilon = "auto"  # N^(1/2), or a value
//! C = 1.0
//! C0 = "auto"       # calibrated, or a value
//!
//! [grid]
//! n = 64
//! L = 24.0          # optional for localized recipes
//!
//! [recipe]
//! kind = "gaussian-bump"
//! amplitude = 0.5
//! width = 0.5
//! ```

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::dynamics::{default_dt, Nonlinearity};
use crate::spectral::{Grid3, Recipe};
use crate::{Error, Result};

/// A value or the marker `"auto"`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Setting<T> {
    #[default]
    Auto,
    Value(T),
}

impl<T: Copy> Setting<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Setting::Auto => None,
            Setting::Value(v) => Some(*v),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Setting<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Auto => f.write_str("auto"),
            Setting::Value(v) => v.fmt(f),
        }
    }
}

impl Serialize for Setting<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Setting::Auto => s.serialize_str("auto"),
            Setting::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Setting<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Setting::Value(v as f64)),
            Raw::Float(v) => Ok(Setting::Value(v)),
            Raw::Text(t) if t == "auto" => Ok(Setting::Auto),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", found \"{t}\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub box_length: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub s: f64,
    /// Horizon `T` (unscaled time).
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Time step in unscaled time; defaults to a quarter of the stability
    /// bound of the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "N", default)]
    pub cutoff: Setting<f64>,
    #[serde(default)]
    pub epsilon: Setting<f64>,
    /// Safety constant of the cutoff condition.
    #[serde(rename = "C", default = "one")]
    pub safety: f64,
    #[serde(rename = "C0", default)]
    pub c0: Setting<f64>,
    /// Constant in front of the growth envelope.
    #[serde(rename = "K", default = "one")]
    pub envelope_constant: f64,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "yes")]
    pub check_commutator: bool,
    pub grid: GridConfig,
    pub recipe: Recipe,
}

/// Sets `path = raw` in `doc`; `raw` is read as a TOML value when it parses
/// as one and as a string otherwise.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not of the form key=value")))?;
    let path = path.trim();
    let raw = raw.trim();
    if path.is_empty() {
        return Err(Error::Config(format!("override '{assignment}' has an empty key")));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys.pop().expect("nonempty path");
    let mut table = doc;
    for k in keys {
        table = table
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{path}': '{k}' is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Parses `text`, applies `key=value` overrides, fills defaults and
    /// validates. Unknown keys are rejected.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        if let Some(r) = doc.get("recipe") {
            Recipe::from_toml(r)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.resolve()
    }

    /// Fills `L` and `dt` and checks every range; all violations are
    /// reported, one per line.
    pub fn resolve(mut self) -> Result<Self> {
        let mut bad = Vec::new();
        if !(self.s > 0.5 && self.s < 1.0) {
            bad.push(format!("s = {} must lie in the open interval (1/2, 1)", self.s));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            bad.push(format!("T = {} must be positive", self.horizon));
        }
        if self.stride == 0 {
            bad.push("stride must be at least 1".to_string());
        }
        if !(self.safety > 0.0 && self.safety.is_finite()) {
            bad.push(format!("C = {} must be positive", self.safety));
        }
        if !(self.envelope_constant > 0.0 && self.envelope_constant.is_finite()) {
            bad.push(format!("K = {} must be positive", self.envelope_constant));
        }
        if let Setting::Value(n) = self.cutoff {
            if !(n >= 1.0 && n.is_finite() && n.log2().fract() == 0.0) {
                bad.push(format!("N = {n} must be a dyadic number >= 1"));
            }
        }
        if let Setting::Value(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                bad.push(format!("epsilon = {e} must be positive"));
            }
        }
        if let Setting::Value(c) = self.c0 {
            if !(c > 0.0 && c.is_finite()) {
                bad.push(format!("C0 = {c} must be positive"));
            }
        }
        if let Err(e) = self.recipe.validate() {
            bad.push(e.to_string());
        }
        if self.box_length().is_none() {
            match self.recipe.default_box_length() {
                Some(l) => self.grid.box_length = Some(l),
                None => bad.push(format!(
                    "grid.L is required for the non-localized recipe '{}'",
                    self.recipe.name()
                )),
            }
        }
        match self.box_length().map(|l| Grid3::new(self.grid.n, l)) {
            Some(Ok(g)) => {
                let dt = *self.dt.get_or_insert_with(|| default_dt(&g));
                if !(dt > 0.0 && dt <= g.stability_bound()) {
                    bad.push(format!(
                        "dt = {dt} must lie in (0, {}], the stability bound 0.5·L/n",
                        g.stability_bound()
                    ));
                }
            }
            Some(Err(e)) => bad.push(e.to_string()),
            None => {}
        }
        if bad.is_empty() {
            Ok(self)
        } else {
            Err(Error::Config(bad.join("\n")))
        }
    }

    pub fn box_length(&self) -> Option<f64> {
        self.grid.box_length
    }

    /// Unscaled grid; valid after [`resolve`](Self::resolve).
    pub fn grid(&self) -> Result<Grid3> {
        let l = self
            .box_length()
            .ok_or_else(|| Error::Config("grid.L is unresolved".into()))?;
        Grid3::new(self.grid.n, l)
    }

    /// Time step; valid after [`resolve`](Self::resolve).
    pub fn time_step(&self) -> Result<f64> {
        self.dt.ok_or_else(|| Error::Config("dt is unresolved".into()))
    }

    /// Canonical TOML echo of the resolved values.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize configuration: {e}")))
    }

    /// SHA-256 of [`to_toml`](Self::to_toml), hex encoded.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
