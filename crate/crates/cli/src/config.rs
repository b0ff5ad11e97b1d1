//! Experiment configuration: a flat INI file with `[scene]`, `[run]`,
//! `[output]` and an optional `[sweep]` section.
//!
//! Every key is optional and falls back to the default listed in [`KEYS`].
//! Unknown sections or keys, duplicate keys and unparsable values are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ini::Ini;
use tapgp_core::env::{flat_box, slope_block, wave_block, Scene};
use tapgp_core::explorer::{RunConfig, Strategy};
use tapgp_core::KernelParams;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    Scene,
    Run,
    Output,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "scene" => Some(Section::Scene),
            "run" => Some(Section::Run),
            "output" => Some(Section::Output),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Section::Scene => "scene",
            Section::Run => "run",
            Section::Output => "output",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(section, key, default)`. A `None` default is derived from another key.
pub const KEYS: &[(Section, &str, Option<&str>)] = &[
    (Section::Scene, "object", Some("wave")),
    (Section::Scene, "placement_x_cm", Some("5")),
    (Section::Scene, "placement_y_cm", Some("8.5")),
    (Section::Scene, "area_cm", Some("23")),
    (Section::Scene, "height_scale_cm", Some("15")),
    (Section::Scene, "noise_sd_cm", Some("0")),
    (Section::Scene, "box_length_cm", Some("23")),
    (Section::Scene, "box_width_cm", Some("23")),
    (Section::Scene, "box_height_cm", Some("5")),
    (Section::Run, "seed", Some("0")),
    // defaults to [seed]
    (Section::Run, "seeds", None),
    (Section::Run, "budget", Some("17")),
    (Section::Run, "n_initial_random", Some("3")),
    (Section::Run, "grid_resolution", Some("47")),
    (Section::Run, "strategy", Some("weighted")),
    (Section::Run, "lengthscale_sq", Some("0.017")),
    (Section::Run, "noise_var", Some("1e-6")),
    (Section::Run, "prior_mean", Some("0")),
    // default to the surface kernel's lengthscale_sq / noise_var
    (Section::Run, "weight_lengthscale_sq", None),
    (Section::Run, "weight_noise_var", None),
    (Section::Run, "weight_prior_mean", Some("0.5")),
    (Section::Run, "desk_taps_in_surface_gp", Some("true")),
    (Section::Run, "eval_resolution", Some("93")),
    (Section::Output, "output_dir", Some("out")),
    (Section::Output, "snapshot_every", Some("none")),
    (Section::Output, "emit_pgm", Some("false")),
];

fn lookup(key: &str) -> Option<&'static (Section, &'static str, Option<&'static str>)> {
    KEYS.iter().find(|(_, k, _)| *k == key)
}

fn nearest_key(key: &str) -> &'static str {
    KEYS.iter()
        .map(|(_, k, _)| *k)
        .chain(["sweep"])
        .min_by_key(|k| strsim::levenshtein(key, k))
        .expect("key table is non-empty")
}

fn unknown_key(section: &str, key: &str) -> CliError {
    CliError::config(format!(
        "unknown key `{key}` in [{section}]; did you mean `{}`?",
        nearest_key(key)
    ))
}

/// Key/value pairs as written in the file, before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<(Section, String), String>,
    sweep: Option<(String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let mut raw = RawConfig::default();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::config(format!(
                        "key `{key}` appears before any [section]"
                    )));
                }
                continue;
            };
            if section == "sweep" {
                for (key, value) in props.iter() {
                    if raw.sweep.is_some() {
                        return Err(CliError::config("[sweep] must contain exactly one key"));
                    }
                    match lookup(key) {
                        Some((Section::Output, ..)) => {
                            return Err(CliError::config(format!(
                                "[sweep] cannot vary output key `{key}`"
                            )))
                        }
                        Some(_) => raw.sweep = Some((key.to_string(), value.to_string())),
                        None => return Err(unknown_key("sweep", key)),
                    }
                }
                continue;
            }
            let parsed = Section::parse(section).ok_or_else(|| {
                CliError::config(format!(
                    "unknown section [{section}]; expected scene, run, output or sweep"
                ))
            })?;
            for (key, value) in props.iter() {
                match lookup(key) {
                    Some((s, ..)) if *s == parsed => {}
                    Some((s, ..)) => {
                        return Err(CliError::config(format!(
                            "key `{key}` belongs in [{s}], not [{section}]"
                        )))
                    }
                    None => return Err(unknown_key(section, key)),
                }
                let slot = (parsed, key.to_string());
                if raw.values.insert(slot, value.trim().to_string()).is_some() {
                    return Err(CliError::config(format!(
                        "duplicate key `{key}` in [{section}]"
                    )));
                }
            }
        }
        Ok(raw)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        let (section, ..) = lookup(key)?;
        self.values
            .get(&(*section, key.to_string()))
            .map(String::as_str)
    }

    /// Value or the table default.
    fn value(&self, key: &str) -> Option<&str> {
        self.get(key)
            .or_else(|| lookup(key).and_then(|(_, _, d)| *d))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let (section, ..) = lookup(key).ok_or_else(|| unknown_key("?", key))?;
        self.values
            .insert((*section, key.to_string()), value.to_string());
        Ok(())
    }

    pub fn sweep(&self) -> Option<&(String, String)> {
        self.sweep.as_ref()
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.value(key).expect("key has a default");
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(bad_value(key, v, "a finite number")),
        }
    }

    fn uint<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.value(key).expect("key has a default");
        v.parse::<T>()
            .map_err(|_| bad_value(key, v, "a non-negative integer"))
    }

    fn bool(&self, key: &str) -> Result<bool, CliError> {
        let v = self.value(key).expect("key has a default");
        parse_bool(v).ok_or_else(|| bad_value(key, v, "true or false"))
    }
}

fn bad_value(key: &str, value: &str, expected: &str) -> CliError {
    CliError::config(format!("`{key}` = `{value}`: expected {expected}"))
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// `a..b` (inclusive) or a comma-separated list.
pub fn parse_seeds(v: &str) -> Result<Vec<u64>, CliError> {
    let bad = || bad_value("seeds", v, "`a..b` or a comma-separated list of integers");
    if let Some((a, b)) = v.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let seeds: Vec<u64> = v
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// Comma-separated sweep values, optionally wrapped in `[...]`.
pub fn parse_list(v: &str) -> Vec<String> {
    let v = v.trim();
    let v = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(v);
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub output_dir: PathBuf,
    pub snapshot_every: Option<usize>,
    pub emit_pgm: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub scene: Scene,
    pub run: RunConfig,
    pub seeds: Vec<u64>,
    pub eval_resolution: usize,
    pub output: OutputConfig,
    pub sweep: Option<Sweep>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::from_raw(RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let scene = scene_from(&raw)?;
        let run = run_from(&raw)?;
        let seeds = match raw.get("seeds") {
            Some(v) => parse_seeds(v)?,
            None => vec![run.seed],
        };
        let eval_resolution = raw.uint("eval_resolution")?;
        if eval_resolution < 2 {
            return Err(CliError::config("eval_resolution must be at least 2"));
        }
        let snapshot_every = match raw.value("snapshot_every").expect("default") {
            "none" | "" => None,
            v => match v.parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => return Err(bad_value("snapshot_every", v, "a positive integer or none")),
            },
        };
        let output = OutputConfig {
            output_dir: PathBuf::from(raw.value("output_dir").expect("default")),
            snapshot_every,
            emit_pgm: raw.bool("emit_pgm")?,
        };
        let sweep = match raw.sweep() {
            Some((key, values)) => {
                let values = parse_list(values);
                if values.is_empty() {
                    return Err(CliError::config(format!(
                        "sweep over `{key}` has no values"
                    )));
                }
                // every cell must be a valid configuration on its own
                for v in &values {
                    let mut cell = raw.clone();
                    cell.set(key, v)?;
                    cell.sweep = None;
                    ExperimentConfig::from_raw(cell)?;
                }
                Some(Sweep {
                    key: key.clone(),
                    values,
                })
            }
            None => None,
        };
        Ok(ExperimentConfig {
            raw,
            scene,
            run,
            seeds,
            eval_resolution,
            output,
            sweep,
        })
    }

    /// Configuration of one sweep cell.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self, CliError> {
        let mut raw = self.raw.clone();
        raw.set(key, value)?;
        raw.sweep = None;
        let mut cfg = ExperimentConfig::from_raw(raw)?;
        cfg.output = self.output.clone();
        Ok(cfg)
    }
}

/// Whether `value` equals the built-in default of `key`.
pub fn is_default(key: &str, value: &str) -> bool {
    let default = match lookup(key) {
        Some((_, _, Some(d))) => *d,
        Some((_, "weight_lengthscale_sq", None)) => "0.017",
        Some((_, "weight_noise_var", None)) => "1e-6",
        _ => return false,
    };
    match (value.parse::<f64>(), default.parse::<f64>()) {
        (Ok(a), Ok(b)) => a == b,
        _ => value == default,
    }
}

fn scene_from(raw: &RawConfig) -> Result<Scene, CliError> {
    let object = match raw.value("object").expect("default") {
        "wave" => wave_block(),
        "slope" => slope_block(),
        "box" => flat_box(
            raw.f64("box_length_cm")?,
            raw.f64("box_width_cm")?,
            raw.f64("box_height_cm")?,
        )
        .map_err(|e| CliError::config(format!("[scene]: {e}")))?,
        other => return Err(bad_value("object", other, "wave, slope or box")),
    };
    let area = raw.f64("area_cm")?;
    let placement = (raw.f64("placement_x_cm")?, raw.f64("placement_y_cm")?);
    let noise_sd = raw.f64("noise_sd_cm")?;
    Scene::new((area, area), object, placement, raw.f64("height_scale_cm")?)
        .and_then(|s| s.with_noise_sd(noise_sd))
        .map_err(|e| CliError::config(format!("[scene]: {e}")))
}

fn run_from(raw: &RawConfig) -> Result<RunConfig, CliError> {
    let strategy: Strategy = raw
        .value("strategy")
        .expect("default")
        .parse()
        .map_err(|e: tapgp_core::Error| CliError::config(e.to_string()))?;
    let lengthscale_sq = raw.f64("lengthscale_sq")?;
    let noise_var = raw.f64("noise_var")?;
    let weight_lengthscale_sq = match raw.get("weight_lengthscale_sq") {
        Some(_) => raw.f64("weight_lengthscale_sq")?,
        None => lengthscale_sq,
    };
    let weight_noise_var = match raw.get("weight_noise_var") {
        Some(_) => raw.f64("weight_noise_var")?,
        None => noise_var,
    };
    let kernel = |l2, noise, mean, which: &str| {
        KernelParams::new(l2, noise, mean)
            .map_err(|e| CliError::config(format!("{which} kernel: {e}")))
    };
    let config = RunConfig {
        seed: raw.uint("seed")?,
        budget: raw.uint("budget")?,
        n_initial_random: raw.uint("n_initial_random")?,
        grid_resolution: raw.uint("grid_resolution")?,
        surface_kernel: kernel(lengthscale_sq, noise_var, raw.f64("prior_mean")?, "surface")?,
        weight_kernel: kernel(
            weight_lengthscale_sq,
            weight_noise_var,
            raw.f64("weight_prior_mean")?,
            "weight",
        )?,
        desk_taps_in_surface_gp: raw.bool("desk_taps_in_surface_gp")?,
        strategy,
        snapshot_every: None,
    };
    config
        .validate()
        .map_err(|e| CliError::config(format!("[run]: {e}")))?;
    Ok(config)
}
