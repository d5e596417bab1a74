//! Flat JSON run configuration and the per-scenario key policy.
//!
//! A config is one JSON object of scalar values. Unknown keys fail at
//! parse time; keys a scenario does not consume fail afterwards, so a
//! config cannot silently carry settings that do nothing.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Everything a run can be told. Fields are optional; each scenario
/// resolves its own defaults and rejects keys outside its vocabulary.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub dim: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub n_up: Option<f64>,
    pub n_dn: Option<f64>,
    pub n_upp: Option<f64>,
    pub n_ddn: Option<f64>,
    pub omega0: Option<f64>,
    pub rotating_frame: Option<bool>,
    pub sigma_v2: Option<f64>,
    pub sigma_w2: Option<f64>,
    pub interpretation: Option<String>,
    pub n_traj: Option<usize>,
    pub seed: Option<u64>,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub x0: Option<f64>,
    pub v0: Option<f64>,
    pub y0: Option<f64>,
    pub px0: Option<f64>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub record_stride: Option<usize>,
    pub output_dir: Option<String>,
}

/// Experiment selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Me,
    Sde,
    Sle,
    Vdp,
    VdpHam,
    PresetA,
    PresetB,
    PresetC,
    Equivalence,
    CommutatorCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Me,
        Scenario::Sde,
        Scenario::Sle,
        Scenario::Vdp,
        Scenario::VdpHam,
        Scenario::PresetA,
        Scenario::PresetB,
        Scenario::PresetC,
        Scenario::Equivalence,
        Scenario::CommutatorCheck,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Scenario::Me => "me",
            Scenario::Sde => "sde",
            Scenario::Sle => "sle",
            Scenario::Vdp => "vdp",
            Scenario::VdpHam => "vdp-ham",
            Scenario::PresetA => "preset-a",
            Scenario::PresetB => "preset-b",
            Scenario::PresetC => "preset-c",
            Scenario::Equivalence => "equivalence",
            Scenario::CommutatorCheck => "commutator-check",
        }
    }

    /// Keys the scenario consumes beyond the universal trio
    /// (seed, output_dir, scenario).
    pub fn allowed_keys(&self) -> &'static [&'static str] {
        const ME_COMMON: &[&str] = &[
            "dim", "dt", "t_final", "gamma1", "gamma2", "omega0", "rotating_frame", "alpha_re",
            "alpha_im", "record_stride",
        ];
        match self {
            Scenario::Me | Scenario::Sle => &[
                "dim", "dt", "t_final", "gamma1", "gamma2", "n_up", "n_dn", "n_upp", "n_ddn",
                "omega0", "rotating_frame", "alpha_re", "alpha_im", "record_stride",
            ],
            Scenario::PresetA => &[
                "dim", "dt", "t_final", "gamma1", "gamma2", "omega0", "rotating_frame",
                "alpha_re", "alpha_im", "record_stride", "n_up", "n_dn",
            ],
            Scenario::PresetB | Scenario::PresetC => ME_COMMON,
            Scenario::Sde => &[
                "dt", "t_final", "gamma1", "n_up", "n_dn", "sigma_v2", "sigma_w2",
                "interpretation", "n_traj", "alpha_re", "alpha_im", "record_stride",
            ],
            Scenario::Vdp => &["mu", "omega0", "x0", "v0", "dt", "t_final", "record_stride"],
            Scenario::VdpHam => &[
                "lambda", "omega0", "x0", "v0", "y0", "px0", "dt", "t_final", "record_stride",
            ],
            Scenario::Equivalence => &[
                "lambda", "omega0", "x0", "v0", "dt", "t_final", "record_stride",
            ],
            Scenario::CommutatorCheck => &["lambda", "omega0", "dim"],
        }
    }

    pub fn required_keys(&self) -> &'static [&'static str] {
        match self {
            Scenario::Me | Scenario::Sle => {
                &["gamma1", "gamma2", "n_up", "n_dn", "n_upp", "n_ddn"]
            }
            Scenario::Sde => &["sigma_w2", "interpretation"],
            Scenario::Vdp => &["mu"],
            Scenario::VdpHam | Scenario::Equivalence => &["lambda"],
            Scenario::PresetA
            | Scenario::PresetB
            | Scenario::PresetC
            | Scenario::CommutatorCheck => &[],
        }
    }
}

impl FromStr for Scenario {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.key() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Scenario::ALL.iter().map(|sc| sc.key()).collect();
                anyhow!("unknown scenario `{s}` (known: {})", known.join(", "))
            })
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario
            .as_deref()
            .ok_or_else(|| anyhow!("no scenario selected (config key or --scenario)"))?
            .parse()
    }

    /// Names of every key carrying a value, `scenario` excluded.
    pub fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! note {
            ($field:ident) => {
                if self.$field.is_some() {
                    keys.push(stringify!($field));
                }
            };
        }
        note!(dim);
        note!(dt);
        note!(t_final);
        note!(gamma1);
        note!(gamma2);
        note!(n_up);
        note!(n_dn);
        note!(n_upp);
        note!(n_ddn);
        note!(omega0);
        note!(rotating_frame);
        note!(sigma_v2);
        note!(sigma_w2);
        note!(interpretation);
        note!(n_traj);
        note!(seed);
        note!(mu);
        note!(lambda);
        note!(x0);
        note!(v0);
        note!(y0);
        note!(px0);
        note!(alpha_re);
        note!(alpha_im);
        note!(record_stride);
        note!(output_dir);
        keys
    }

    /// Enforces the scenario's key vocabulary and required set.
    pub fn check_keys(&self) -> Result<Scenario> {
        let scenario = self.scenario()?;
        let allowed = scenario.allowed_keys();
        for key in self.present_keys() {
            if matches!(key, "seed" | "output_dir") {
                continue;
            }
            if !allowed.contains(&key) {
                bail!("scenario `{scenario}` does not accept key `{key}`");
            }
        }
        let present = self.present_keys();
        for key in scenario.required_keys() {
            if !present.contains(key) {
                bail!("scenario `{scenario}` requires key `{key}`");
            }
        }
        Ok(scenario)
    }

    /// Applies one `key=value` or (`key`, `value`) command-line override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
        }
        match key {
            "scenario" => self.scenario = Some(value.to_string()),
            "dim" => self.dim = Some(num(key, value)?),
            "dt" => self.dt = Some(num(key, value)?),
            "t_final" => self.t_final = Some(num(key, value)?),
            "gamma1" => self.gamma1 = Some(num(key, value)?),
            "gamma2" => self.gamma2 = Some(num(key, value)?),
            "n_up" => self.n_up = Some(num(key, value)?),
            "n_dn" => self.n_dn = Some(num(key, value)?),
            "n_upp" => self.n_upp = Some(num(key, value)?),
            "n_ddn" => self.n_ddn = Some(num(key, value)?),
            "omega0" => self.omega0 = Some(num(key, value)?),
            "rotating_frame" => self.rotating_frame = Some(num(key, value)?),
            "sigma_v2" => self.sigma_v2 = Some(num(key, value)?),
            "sigma_w2" => self.sigma_w2 = Some(num(key, value)?),
            "interpretation" => self.interpretation = Some(value.to_string()),
            "n_traj" => self.n_traj = Some(num(key, value)?),
            "seed" => self.seed = Some(num(key, value)?),
            "mu" => self.mu = Some(num(key, value)?),
            "lambda" => self.lambda = Some(num(key, value)?),
            "x0" => self.x0 = Some(num(key, value)?),
            "v0" => self.v0 = Some(num(key, value)?),
            "y0" => self.y0 = Some(num(key, value)?),
            "px0" => self.px0 = Some(num(key, value)?),
            "alpha_re" => self.alpha_re = Some(num(key, value)?),
            "alpha_im" => self.alpha_im = Some(num(key, value)?),
            "record_stride" => self.record_stride = Some(num(key, value)?),
            "output_dir" => self.output_dir = Some(value.to_string()),
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }
}

/// Resolved key-value echo carried into the summary; insertion builds the
/// exact parameter set a rerun needs.
#[derive(Clone, Debug, Default)]
pub struct ParamEcho(pub BTreeMap<String, serde_json::Value>);

impl ParamEcho {
    pub fn num(&mut self, key: &str, v: f64) {
        self.0.insert(
            key.to_string(),
            serde_json::Number::from_f64(v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
        );
    }

    pub fn int(&mut self, key: &str, v: u64) {
        self.0.insert(key.to_string(), serde_json::Value::from(v));
    }

    pub fn text(&mut self, key: &str, v: &str) {
        self.0.insert(key.to_string(), serde_json::Value::from(v));
    }

    pub fn flag(&mut self, key: &str, v: bool) {
        self.0.insert(key.to_string(), serde_json::Value::from(v));
    }
}
