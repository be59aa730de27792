//! Flat `key = value` run configuration with `#` comments.

use std::path::{Path, PathBuf};

use graphtori_core::field::{FieldFamily, FourierMode};
use graphtori_core::lattice::FlatTorus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("{key} = {value}: {expected}")]
    Invalid { key: String, value: String, expected: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

fn invalid(key: &str, value: impl ToString, expected: &str) -> ConfigError {
    ConfigError::Invalid { key: key.into(), value: value.to_string(), expected: expected.into() }
}

/// Where the sampled field comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSource {
    Family(FieldKind),
    /// Little-endian f64 samples, `N³` values, `λ₃` fastest.
    Raw(PathBuf),
}

/// Built-in families as named in config files. Centres and radii are in
/// physical units; a missing well centre means the centre of the domain.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    Zero,
    RadialWell {
        depth: f64,
        radius: f64,
        center: Option<[f64; 3]>,
    },
    Cosine1d {
        amplitude: f64,
    },
    /// `modes` random Fourier modes with wavevectors in `{-2..2}³` and
    /// amplitudes up to `amplitude`, drawn from `seed`.
    Fourier {
        modes: usize,
        amplitude: f64,
        seed: u64,
    },
}

impl FieldKind {
    pub fn family(&self, torus: &FlatTorus) -> FieldFamily {
        match self {
            FieldKind::Zero => FieldFamily::Zero,
            FieldKind::RadialWell { depth, radius, center } => FieldFamily::RadialWell {
                depth: *depth,
                radius: *radius,
                center: center.unwrap_or_else(|| torus.center()),
            },
            FieldKind::Cosine1d { amplitude } => FieldFamily::Cosine1d { amplitude: *amplitude },
            FieldKind::Fourier { modes, amplitude, seed } => {
                FieldFamily::Fourier { modes: fourier_modes(*modes, *amplitude, *seed) }
            }
        }
    }
}

/// Deterministic random modes; the zero wavevector is skipped.
pub fn fourier_modes(count: usize, amplitude: f64, seed: u64) -> Vec<FourierMode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = [rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
        if k == [0, 0, 0] {
            continue;
        }
        out.push(FourierMode {
            wavevector: k,
            amplitude: amplitude * rng.gen_range(-1.0..=1.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    RadialWell,
    Collapsing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub depth0: f64,
    pub radius: f64,
    pub indices: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Discretization tolerance constant `c` in `c/N`, relative to `m(f)`.
    pub disc: f64,
    /// Absolute floor of the level-set regularity threshold.
    pub delta_reg: f64,
    /// `None` means `1e-10` times the field amplitude.
    pub max: Option<f64>,
    pub boundary: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub generators: [[f64; 3]; 3],
    pub field: FieldSource,
    pub grid: usize,
    pub xi: f64,
    pub window: f64,
    pub ode_step: f64,
    pub heights: usize,
    pub tolerances: Tolerances,
    pub sweep: SweepConfig,
    pub plot_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            generators: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            field: FieldSource::Family(FieldKind::RadialWell { depth: 0.1, radius: 0.25, center: None }),
            grid: 64,
            xi: 1.0,
            window: f64::INFINITY,
            ode_step: 1e-4,
            heights: 129,
            tolerances: Tolerances { disc: 0.064, delta_reg: 1e-6, max: None, boundary: None },
            sweep: SweepConfig { kind: SweepKind::RadialWell, depth0: 0.2, radius: 0.25, indices: (1..=8).collect() },
            plot_dir: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    match value {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => value.parse::<f64>().map_err(|_| invalid(key, value, "a decimal number")),
    }
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v = parse_f64(key, value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, value, "must be > 0"))
    }
}

pub fn check_grid(n: usize) -> Result<usize, ConfigError> {
    if n.is_power_of_two() && (16..=256).contains(&n) {
        Ok(n)
    } else {
        Err(invalid("grid", n, "must be a power of two in [16, 256]"))
    }
}

pub fn check_xi(xi: f64) -> Result<f64, ConfigError> {
    if xi >= 1.0 {
        Ok(xi)
    } else {
        Err(invalid("xi", xi, "xi must be ≥ 1"))
    }
}

pub fn parse_sweep_kind(value: &str) -> Result<SweepKind, ConfigError> {
    match value {
        "radial_well" => Ok(SweepKind::RadialWell),
        "collapsing" => Ok(SweepKind::Collapsing),
        _ => Err(invalid("sweep_family", value, "radial_well or collapsing")),
    }
}

/// `1..8`, `1,2,5` or a single index; indices start at 1.
pub fn parse_indices(value: &str) -> Result<Vec<usize>, ConfigError> {
    let bad = || invalid("indices", value, "a range `a..b` or a comma list of integers >= 1");
    let out: Vec<usize> = if let Some((a, b)) = value.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        value.split(',').map(|s| s.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

fn parse_field(value: &str) -> Result<FieldKind, ConfigError> {
    let mut parts = value.split_whitespace();
    let name = parts.next().unwrap_or("");
    let mut params = std::collections::BTreeMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| invalid("field", value, "parameters as name=value"))?;
        params.insert(k.to_string(), v.to_string());
    }
    let mut take = |k: &str, default: Option<f64>| -> Result<f64, ConfigError> {
        match params.remove(k) {
            Some(v) => parse_f64(k, &v),
            None => default.ok_or_else(|| invalid("field", value, &format!("missing parameter {k}"))),
        }
    };
    let kind = match name {
        "zero" => FieldKind::Zero,
        "radial_well" => {
            let depth = take("depth", None)?;
            let radius = take("radius", None)?;
            let center = match params.remove("center") {
                Some(c) => {
                    let xs: Vec<f64> = c.split(',').map(|s| parse_f64("center", s)).collect::<Result<_, _>>()?;
                    let arr: [f64; 3] =
                        xs.try_into().map_err(|_| invalid("center", &c, "three comma-separated numbers"))?;
                    Some(arr)
                }
                None => None,
            };
            FieldKind::RadialWell { depth, radius, center }
        }
        "cosine_1d" => FieldKind::Cosine1d { amplitude: take("amplitude", None)? },
        "fourier" => {
            let modes = take("modes", Some(4.0))?;
            let amplitude = take("amplitude", Some(0.05))?;
            let seed = take("seed", Some(0.0))?;
            FieldKind::Fourier { modes: modes as usize, amplitude, seed: seed as u64 }
        }
        _ => return Err(invalid("field", value, "one of zero, radial_well, cosine_1d, fourier")),
    };
    if let Some(k) = params.keys().next() {
        return Err(invalid("field", value, &format!("unexpected parameter {k}")));
    }
    Ok(kind)
}

/// Parses configuration text on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "generators" => {
                let xs: Vec<f64> = value.split_whitespace().map(|s| parse_f64(key, s)).collect::<Result<_, _>>()?;
                if xs.len() != 9 {
                    return Err(invalid(key, value, "nine numbers, one generator per row of three"));
                }
                c.generators = [[xs[0], xs[1], xs[2]], [xs[3], xs[4], xs[5]], [xs[6], xs[7], xs[8]]];
            }
            "field" => c.field = FieldSource::Family(parse_field(value)?),
            "field_file" => c.field = FieldSource::Raw(PathBuf::from(value)),
            "grid" => c.grid = check_grid(value.parse().map_err(|_| invalid(key, value, "an integer"))?)?,
            "xi" => c.xi = check_xi(parse_f64(key, value)?)?,
            "L" => c.window = positive(key, value)?,
            "ode_step" => c.ode_step = positive(key, value)?,
            "heights" => {
                let n: usize = value.parse().map_err(|_| invalid(key, value, "an integer >= 5"))?;
                if n < 5 {
                    return Err(invalid(key, value, "an integer >= 5"));
                }
                c.heights = n;
            }
            "tol_disc" => c.tolerances.disc = positive(key, value)?,
            "delta_reg" => c.tolerances.delta_reg = positive(key, value)?,
            "tol_max" => c.tolerances.max = Some(positive(key, value)?),
            "tol_bdy" => c.tolerances.boundary = Some(positive(key, value)?),
            "sweep_family" => c.sweep.kind = parse_sweep_kind(value)?,
            "sweep_depth" => c.sweep.depth0 = positive(key, value)?,
            "sweep_radius" => c.sweep.radius = positive(key, value)?,
            "indices" => c.sweep.indices = parse_indices(value)?,
            "plot_dir" => c.plot_dir = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey { key: key.into(), line: i + 1 }),
        }
    }
    Ok(c)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    parse_config(&text)
}

impl RunConfig {
    pub fn torus(&self) -> Result<FlatTorus, graphtori_core::Error> {
        FlatTorus::new(self.generators)
    }
}
