use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use staeckel_core::SystemSpec;

/// Bad flags, bad config file or parameters the core rejects.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(ConfigError(msg.into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Ellipsoidal,
    Prolate,
    Oblate,
    Lame,
    Spherical,
    Cylindrical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Geodesic,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    First,
    Second,
}

/// Flags shared by every subcommand. Each one may also come from the
/// `--config` JSON file; flags given on the command line win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    #[arg(long, value_enum, global = true)]
    pub system: Option<SystemKind>,
    /// Ellipsoidal poles e1 < e2 < e3 < e4
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, global = true)]
    pub e: Option<Vec<f64>>,
    /// Prolate parameter b > 1
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Oblate parameter a > 1
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Lame poles f1 < f2 < f3
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, global = true)]
    pub f: Option<Vec<f64>>,
    /// Casimir level 2h
    #[arg(long = "two-h", global = true)]
    pub two_h: Option<f64>,
    /// Grid resolution per axis
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Integrator tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for grid sweeps
    #[arg(long, env = "STAECKEL_S3_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Skip SVG output
    #[arg(long = "no-plot", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub no_plot: Option<bool>,
    /// Integration time
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum, global = true)]
    pub flow: Option<Flow>,
    #[arg(long, value_enum, global = true)]
    pub generator: Option<Generator>,
    /// Random samples used by verify and classify
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Monodromy loop centre (l, g)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, global = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Bivector (l12, l13, l14, l23, l24, l34) to classify
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, global = true)]
    pub point: Option<Vec<f64>>,
    /// Integral value (first, second) to classify
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, global = true)]
    pub value: Option<Vec<f64>>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl Settings {
    pub fn load(path: &Path) -> anyhow::Result<Settings> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("bad config {}: {e}", path.display())).into())
    }

    /// Fills every unset field from `other`.
    pub fn or(mut self, other: &Settings) -> Settings {
        merge_fields!(self, other; system, e, b, a, f, two_h, grid, tol, seed, threads, out, no_plot,
            t_end, flow, generator, samples, center, radius, point, value);
        self
    }

    pub fn two_h(&self) -> f64 {
        self.two_h.unwrap_or(1.0)
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(41)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-10)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn plot(&self) -> bool {
        !self.no_plot.unwrap_or(false)
    }

    pub fn t_end(&self) -> f64 {
        self.t_end.unwrap_or(100.0)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(1000)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let lists = [("e", &self.e, 4), ("f", &self.f, 3), ("center", &self.center, 2), ("point", &self.point, 6), ("value", &self.value, 2)];
        for (name, list, len) in lists {
            if let Some(v) = list {
                if v.len() != len || v.iter().any(|x| !x.is_finite()) {
                    return config_error(format!("--{name} takes {len} finite comma-separated numbers, got {v:?}"));
                }
            }
        }
        if self.grid() < 2 {
            return config_error(format!("grid must be at least 2, got {}", self.grid()));
        }
        let tol = self.tol();
        if !(tol > 0.0 && tol <= 1e-2) {
            return config_error(format!("tol must lie in (0, 1e-2], got {tol}"));
        }
        if !(self.two_h() > 0.0) {
            return config_error(format!("two-h must be positive, got {}", self.two_h()));
        }
        if !(self.t_end() > 0.0) {
            return config_error(format!("t-end must be positive, got {}", self.t_end()));
        }
        if self.threads == Some(0) {
            return config_error("threads must be positive");
        }
        if self.samples() == 0 {
            return config_error("samples must be positive");
        }
        Ok(())
    }

    /// The system at level 2h. Missing parameters default to the reference
    /// values e = (1,2,5,8), b = a = 2.4, f = (0.4,1.3,3.2).
    pub fn spec(&self) -> anyhow::Result<SystemSpec> {
        let Some(kind) = self.system else {
            return config_error("--system is required");
        };
        let built = match kind {
            SystemKind::Ellipsoidal => {
                let e = self.e.clone().unwrap_or_else(|| vec![1.0, 2.0, 5.0, 8.0]);
                SystemSpec::ellipsoidal([e[0], e[1], e[2], e[3]])
            }
            SystemKind::Prolate => SystemSpec::prolate(self.b.unwrap_or(2.4)),
            SystemKind::Oblate => SystemSpec::oblate(self.a.unwrap_or(2.4)),
            SystemKind::Lame => {
                let f = self.f.clone().unwrap_or_else(|| vec![0.4, 1.3, 3.2]);
                SystemSpec::lame([f[0], f[1], f[2]])
            }
            SystemKind::Spherical => Ok(SystemSpec::spherical23()),
            SystemKind::Cylindrical => Ok(SystemSpec::cylindrical()),
        };
        built
            .and_then(|s| s.with_level(self.two_h()))
            .map_err(|e| ConfigError(format!("invalid system: {e}")).into())
    }
}
