//! Run configuration as `key = value` lines.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::range::RangeConfig;

/// Every configuration key, in serialization order.
pub const CONFIG_KEYS: [&str; 25] = [
    "dim",
    "n_theta",
    "n_polar",
    "n_az",
    "n_t",
    "t_max",
    "n_r",
    "m_max",
    "k_max",
    "zeros",
    "orthogonality_m_max",
    "moment_threshold",
    "fit_threshold",
    "recurrence_threshold",
    "growth_bound",
    "orthogonality_threshold",
    "bessel_zero_threshold",
    "energy_floor",
    "zonal_angles",
    "panel_nodes",
    "panel_width",
    "h_r",
    "h_t",
    "epsilon",
    "seed",
];

/// Grid sizes, truncation orders, thresholds, quadrature orders and seeds of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    /// Centers on the circle (`n = 2`).
    pub n_theta: usize,
    /// Polar Gauss-Legendre order of the sphere grid (`n = 3`).
    pub n_polar: usize,
    /// Azimuthal points of the sphere grid (`n = 3`).
    pub n_az: usize,
    pub n_t: usize,
    pub t_max: f64,
    /// Radial samples of reconstructed fields.
    pub n_r: usize,
    pub m_max: usize,
    pub k_max: usize,
    pub zeros: usize,
    pub orthogonality_m_max: usize,
    pub moment_threshold: f64,
    pub fit_threshold: f64,
    pub recurrence_threshold: f64,
    pub growth_bound: f64,
    pub orthogonality_threshold: f64,
    pub bessel_zero_threshold: f64,
    pub energy_floor: f64,
    /// Angular samples of the zonal reduction in the forward model.
    pub zonal_angles: usize,
    /// Gauss-Legendre nodes per λ panel of the series inversion.
    pub panel_nodes: usize,
    pub panel_width: f64,
    pub h_r: f64,
    pub h_t: f64,
    pub epsilon: f64,
    /// Seed of randomized fixtures.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = RangeConfig::default();
        RunConfig {
            dim: 2,
            n_theta: 128,
            n_polar: 64,
            n_az: 128,
            n_t: 512,
            t_max: 2.0,
            n_r: 257,
            m_max: r.m_max,
            k_max: r.k_max,
            zeros: r.zeros,
            orthogonality_m_max: r.orthogonality_m_max,
            moment_threshold: r.moment_threshold,
            fit_threshold: r.fit_threshold,
            recurrence_threshold: r.recurrence_threshold,
            growth_bound: r.growth_bound,
            orthogonality_threshold: r.orthogonality_threshold,
            bessel_zero_threshold: r.bessel_zero_threshold,
            energy_floor: r.energy_floor,
            zonal_angles: 192,
            panel_nodes: 12,
            panel_width: 1.0,
            h_r: 1.0 / 256.0,
            h_t: 1.0 / 512.0,
            epsilon: 1.0 / 256.0,
            seed: 1,
        }
    }
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| match e {
                Error::UnknownKey(_) => e,
                other => Error::Parse { line: i + 1, message: other.to_string() },
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::InvalidArgument(format!("`{key}` expects an integer, got `{v}`")))
        }
        fn real(key: &str, v: &str) -> Result<f64> {
            v.parse().map_err(|_| Error::InvalidArgument(format!("`{key}` expects a number, got `{v}`")))
        }
        match key {
            "dim" => self.dim = int(key, value)?,
            "n_theta" => self.n_theta = int(key, value)?,
            "n_polar" => self.n_polar = int(key, value)?,
            "n_az" => self.n_az = int(key, value)?,
            "n_t" => self.n_t = int(key, value)?,
            "t_max" => self.t_max = real(key, value)?,
            "n_r" => self.n_r = int(key, value)?,
            "m_max" => self.m_max = int(key, value)?,
            "k_max" => self.k_max = int(key, value)?,
            "zeros" => self.zeros = int(key, value)?,
            "orthogonality_m_max" => self.orthogonality_m_max = int(key, value)?,
            "moment_threshold" => self.moment_threshold = real(key, value)?,
            "fit_threshold" => self.fit_threshold = real(key, value)?,
            "recurrence_threshold" => self.recurrence_threshold = real(key, value)?,
            "growth_bound" => self.growth_bound = real(key, value)?,
            "orthogonality_threshold" => self.orthogonality_threshold = real(key, value)?,
            "bessel_zero_threshold" => self.bessel_zero_threshold = real(key, value)?,
            "energy_floor" => self.energy_floor = real(key, value)?,
            "zonal_angles" => self.zonal_angles = int(key, value)?,
            "panel_nodes" => self.panel_nodes = int(key, value)?,
            "panel_width" => self.panel_width = real(key, value)?,
            "h_r" => self.h_r = real(key, value)?,
            "h_t" => self.h_t = real(key, value)?,
            "epsilon" => self.epsilon = real(key, value)?,
            "seed" => self.seed = int(key, value)?,
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Checks that every value is positive and the dimension is 2 or 3.
    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::Dimension(self.dim));
        }
        for (k, v) in self.values() {
            let positive = match v {
                Value::Int(i) => i > 0,
                Value::Real(x) => x > 0.0 && x.is_finite(),
            };
            if !positive {
                return Err(Error::InvalidArgument(format!("config value `{k}` must be positive")));
            }
        }
        Ok(())
    }

    fn values(&self) -> Vec<(&'static str, Value)> {
        use Value::{Int, Real};
        let v = vec![
            Int(self.dim as u64),
            Int(self.n_theta as u64),
            Int(self.n_polar as u64),
            Int(self.n_az as u64),
            Int(self.n_t as u64),
            Real(self.t_max),
            Int(self.n_r as u64),
            Int(self.m_max as u64),
            Int(self.k_max as u64),
            Int(self.zeros as u64),
            Int(self.orthogonality_m_max as u64),
            Real(self.moment_threshold),
            Real(self.fit_threshold),
            Real(self.recurrence_threshold),
            Real(self.growth_bound),
            Real(self.orthogonality_threshold),
            Real(self.bessel_zero_threshold),
            Real(self.energy_floor),
            Int(self.zonal_angles as u64),
            Int(self.panel_nodes as u64),
            Real(self.panel_width),
            Real(self.h_r),
            Real(self.h_t),
            Real(self.epsilon),
            Int(self.seed),
        ];
        CONFIG_KEYS.iter().copied().zip(v).collect()
    }

    /// `(key, value)` pairs in serialization order, floats with 17 significant digits.
    pub fn entries(&self) -> Vec<(String, String)> {
        self.values()
            .into_iter()
            .map(|(k, v)| {
                let s = match v {
                    Value::Int(i) => i.to_string(),
                    Value::Real(x) => format!("{x:.16e}"),
                };
                (k.to_string(), s)
            })
            .collect()
    }

    /// Serialized `key = value` lines.
    pub fn to_text(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 of [`RunConfig::to_text`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Time grid `[0, T]` with `n_t` samples.
    pub fn t_grid(&self) -> Result<UniformGrid> {
        UniformGrid::new(0.0, self.t_max, self.n_t)
    }

    /// Range-check settings.
    pub fn range_config(&self) -> RangeConfig {
        RangeConfig {
            m_max: self.m_max,
            k_max: self.k_max,
            zeros: self.zeros,
            orthogonality_m_max: self.orthogonality_m_max,
            moment_threshold: self.moment_threshold,
            fit_threshold: self.fit_threshold,
            recurrence_threshold: self.recurrence_threshold,
            growth_bound: self.growth_bound,
            orthogonality_threshold: self.orthogonality_threshold,
            bessel_zero_threshold: self.bessel_zero_threshold,
            energy_floor: self.energy_floor,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Value {
    Int(u64),
    Real(f64),
}
