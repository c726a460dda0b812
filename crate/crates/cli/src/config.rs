//! Experiment options: command-line flags layered over an optional
//! key-value file that uses the same names as the long flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Args;
use noisy_designs::{BlochGridSpec, ChannelKind, EpsilonMode, NoiseModel};

/// Flags shared by the experiment subcommands. Every field is optional so
/// that unset flags fall through to the config file, then to defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct ExperimentArgs {
    /// Key-value file (`key = value` per line) with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// bitflip, phaseflip, bitphaseflip, phasedamp, ampdamp or depolarising.
    #[arg(long)]
    pub channel: Option<String>,
    /// before or after.
    #[arg(long)]
    pub model: Option<String>,
    /// Design order, 1..=5.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long = "param-start")]
    pub param_start: Option<f64>,
    #[arg(long = "param-stop")]
    pub param_stop: Option<f64>,
    #[arg(long = "param-steps")]
    pub param_steps: Option<usize>,
    /// Fixed noise parameter for ttable and region.
    #[arg(long)]
    pub param: Option<f64>,
    /// Truncation radius.
    #[arg(long)]
    pub rt: Option<f64>,
    /// Polar truncation angle, radians.
    #[arg(long)]
    pub thetat: Option<f64>,
    /// Azimuthal truncation angle, radians.
    #[arg(long)]
    pub phit: Option<f64>,
    /// Points per axis: the spherical grid for sweep/ttable, the cube for region.
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// strict or projected.
    #[arg(long)]
    pub mode: Option<String>,
    /// Acceptance threshold for region.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// An experiment with every default applied and every value validated.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub channel: ChannelKind,
    pub model: NoiseModel,
    pub t: usize,
    pub param_start: f64,
    pub param_stop: f64,
    pub param_steps: usize,
    pub param: f64,
    pub grid: BlochGridSpec,
    pub cube_n: usize,
    pub mode: EpsilonMode,
    pub threshold: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn read_file(path: &Path) -> Result<ExperimentArgs, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut args = ExperimentArgs::default();
    for (key, value) in table {
        let num = || -> Result<f64, ConfigError> {
            value
                .as_float()
                .or_else(|| value.as_integer().map(|i| i as f64))
                .ok_or_else(|| ConfigError(format!("config key '{key}' must be a number")))
        };
        let int = || -> Result<usize, ConfigError> {
            value
                .as_integer()
                .and_then(|i| usize::try_from(i).ok())
                .ok_or_else(|| ConfigError(format!("config key '{key}' must be a non-negative integer")))
        };
        let text = || -> Result<String, ConfigError> {
            value
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| ConfigError(format!("config key '{key}' must be a string")))
        };
        match key.as_str() {
            "channel" => args.channel = Some(text()?),
            "model" => args.model = Some(text()?),
            "mode" => args.mode = Some(text()?),
            "t" => args.t = Some(int()?),
            "param-start" => args.param_start = Some(num()?),
            "param-stop" => args.param_stop = Some(num()?),
            "param-steps" => args.param_steps = Some(int()?),
            "param" => args.param = Some(num()?),
            "rt" => args.rt = Some(num()?),
            "thetat" => args.thetat = Some(num()?),
            "phit" => args.phit = Some(num()?),
            "grid-n" => args.grid_n = Some(int()?),
            "threshold" => args.threshold = Some(num()?),
            "out" => args.out = Some(PathBuf::from(text()?)),
            other => return err(format!("unknown config key '{other}'")),
        }
    }
    Ok(args)
}

impl ExperimentArgs {
    /// Flags win over file values.
    fn overlay(self, file: ExperimentArgs) -> ExperimentArgs {
        ExperimentArgs {
            config: self.config,
            channel: self.channel.or(file.channel),
            model: self.model.or(file.model),
            t: self.t.or(file.t),
            param_start: self.param_start.or(file.param_start),
            param_stop: self.param_stop.or(file.param_stop),
            param_steps: self.param_steps.or(file.param_steps),
            param: self.param.or(file.param),
            rt: self.rt.or(file.rt),
            thetat: self.thetat.or(file.thetat),
            phit: self.phit.or(file.phit),
            grid_n: self.grid_n.or(file.grid_n),
            mode: self.mode.or(file.mode),
            threshold: self.threshold.or(file.threshold),
            out: self.out.or(file.out),
        }
    }

    /// Merges the config file (if any), applies defaults and validates.
    /// `default_grid_n` is 11 for spherical grids and 20 for the cube.
    pub fn resolve(self, default_grid_n: usize) -> Result<Experiment, ConfigError> {
        let merged = match &self.config {
            Some(path) => {
                let file = read_file(path)?;
                self.overlay(file)
            }
            None => self,
        };
        let channel: ChannelKind = match merged.channel.as_deref() {
            Some(name) => name.parse().map_err(|e: noisy_designs::ChannelError| ConfigError(e.to_string()))?,
            None => return err("--channel is required"),
        };
        let model: NoiseModel = merged.model.as_deref().unwrap_or("before").parse().map_err(ConfigError)?;
        let mode: EpsilonMode = merged.mode.as_deref().unwrap_or("projected").parse().map_err(ConfigError)?;
        let t = merged.t.unwrap_or(2);
        if !(1..=5).contains(&t) {
            return err(format!("--t must be in 1..=5, got {t}"));
        }
        let param_start = merged.param_start.unwrap_or(0.0);
        let param_stop = merged.param_stop.unwrap_or(1.0);
        let param_steps = merged.param_steps.unwrap_or(11);
        let param = merged.param.unwrap_or(0.5);
        for (name, v) in [("param-start", param_start), ("param-stop", param_stop), ("param", param)] {
            if !(0.0..=1.0).contains(&v) {
                return err(format!("--{name} must lie in [0, 1], got {v}"));
            }
        }
        if param_steps < 2 {
            return err(format!("--param-steps must be at least 2, got {param_steps}"));
        }
        let grid_n = merged.grid_n.unwrap_or(default_grid_n);
        let grid = BlochGridSpec {
            r_t: merged.rt.unwrap_or(1.0),
            theta_t: merged.thetat.unwrap_or(PI),
            phi_t: merged.phit.unwrap_or(2.0 * PI),
            n_r: grid_n,
            n_theta: grid_n,
            n_phi: grid_n,
        };
        grid.validate().map_err(|e| ConfigError(e.to_string()))?;
        let threshold = merged.threshold.unwrap_or(0.5);
        if !(threshold >= 0.0) {
            return err(format!("--threshold must be non-negative, got {threshold}"));
        }
        Ok(Experiment {
            channel,
            model,
            t,
            param_start,
            param_stop,
            param_steps,
            param,
            grid,
            cube_n: grid_n,
            mode,
            threshold,
            out: merged.out,
        })
    }
}

impl Experiment {
    /// Evenly spaced parameter values, both endpoints included.
    pub fn param_values(&self) -> Vec<f64> {
        let n = self.param_steps;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.param_stop
                } else {
                    self.param_start + (self.param_stop - self.param_start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}
