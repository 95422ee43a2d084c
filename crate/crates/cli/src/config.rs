//! Flat `key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment; values may be quoted.
//! Keys are dotted (`material.g = "concave_rational(2, 1)"`). Unknown keys
//! are rejected so that typos surface as errors instead of silent defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tvs_core::mms::{ManufacturedCase, StudySettings};
use tvs_core::projection::PoissonMethod;
use tvs_core::scenario::InitPreset;
use tvs_core::solver::TemperaturePath;
use tvs_core::{Boundary, DtPolicy, Error, Law, MaterialModel, Regime, Result, SolverConfig};

const KNOWN_KEYS: &[&str] = &[
    "grid.n",
    "grid.bc",
    "material.regime",
    "material.c_v",
    "material.nu",
    "material.kappa",
    "material.delta",
    "material.g",
    "material.C1",
    "material.C2",
    "material.sample_max",
    "material.samples",
    "solver.epsilon",
    "solver.r",
    "solver.dt",
    "solver.dt.value",
    "solver.dt.safety",
    "solver.T",
    "solver.projection_tol",
    "solver.temperature_path",
    "solver.poisson",
    "output.dir",
    "output.stride",
    "output.snapshots",
    "output.pgm",
    "init.preset",
    "init.seed",
    "init.amplitude",
    "init.b0",
    "init.lo",
    "init.hi",
    "mms.a_v",
    "mms.a_theta",
    "mms.a_F",
    "mms.k",
    "mms.grids",
    "mms.dt_coeff",
    "mms.T",
    "mms.order_min",
    "mms.order_max",
    "mms.order_F_min",
    "galerkin.n_flow",
    "galerkin.m_temp",
    "galerkin.fd_n",
    "galerkin.T",
    "galerkin.dt",
    "galerkin.threshold",
    "galerkin.fd_regime",
    "galerkin.a_v",
    "galerkin.a_theta",
    "galerkin.a_F",
];

/// Raw key/value pairs with the line each key came from.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

fn parse_error(line: usize, key: &str, reason: impl Into<String>) -> Error {
    Error::ConfigParse {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(parse_error(line, content, "expected `key = value`"));
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(parse_error(line, "", "empty key"));
            }
            if !KNOWN_KEYS.contains(&key) {
                return Err(parse_error(line, key, "unknown key"));
            }
            let value = unquote(v.trim());
            if entries.insert(key.to_string(), (line, value)).is_some() {
                return Err(parse_error(line, key, "duplicate key"));
            }
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigParse {
            line: 0,
            key: String::new(),
            reason: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |(l, _)| *l)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| parse_error(*line, key, format!("invalid value `{v}`: {e}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn real_in(&self, key: &str, default: f64, lo: f64, hi: f64, open: bool) -> Result<f64> {
        let v: f64 = self.get_or(key, default)?;
        let ok = if open {
            v > lo && v < hi
        } else {
            v >= lo && v <= hi
        };
        if !ok {
            let range = if open {
                format!("({lo}, {hi})")
            } else {
                format!("[{lo}, {hi}]")
            };
            return Err(parse_error(
                self.line(key),
                key,
                format!("value {v} outside the valid range {range}"),
            ));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.get_or(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(parse_error(
                self.line(key),
                key,
                format!("value {v} must be positive"),
            ));
        }
        Ok(v)
    }

    fn list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|e| {
                        parse_error(
                            *line,
                            key,
                            format!("invalid list entry `{}`: {e}", s.trim()),
                        )
                    })
                })
                .collect(),
        }
    }

    fn law(&self, key: &str) -> Result<Option<Law>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => parse_law(v)
                .map(Some)
                .map_err(|r| parse_error(*line, key, r)),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(v: &str) -> String {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
        .to_string()
}

/// `constant(c)`, `linear(a, b)`, `concave_rational(a, b)`, `exponential(a, r)`
/// or a bare number for a constant.
pub fn parse_law(text: &str) -> std::result::Result<Law, String> {
    let t = text.trim();
    if let Ok(c) = t.parse::<f64>() {
        return Ok(Law::Constant(c));
    }
    let (name, rest) = t
        .split_once('(')
        .ok_or_else(|| format!("cannot parse law `{t}`"))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| format!("missing `)` in `{t}`"))?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad argument `{}`: {e}", a.trim()))
        })
        .collect::<std::result::Result<_, _>>()?;
    let want = |n: usize| {
        if nums.len() == n {
            Ok(())
        } else {
            Err(format!("`{}` takes {n} argument(s)", name.trim()))
        }
    };
    match name.trim() {
        "constant" => want(1).map(|_| Law::Constant(nums[0])),
        "linear" => want(2).map(|_| Law::Linear {
            intercept: nums[0],
            slope: nums[1],
        }),
        "concave_rational" => want(2).map(|_| Law::ConcaveRational {
            a: nums[0],
            b: nums[1],
        }),
        "exponential" => want(2).map(|_| Law::Exponential {
            scale: nums[0],
            rate: nums[1],
        }),
        other => Err(format!("unknown law `{other}`")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Preset(InitPreset),
    Mms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub stride: usize,
    pub snapshots: bool,
    pub pgm: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsSpec {
    pub case: ManufacturedCase,
    pub grids: Vec<usize>,
    pub settings: StudySettings,
    pub order_min: f64,
    pub order_max: f64,
    pub order_f_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSpec {
    pub n_flow: usize,
    pub m_temp: usize,
    pub fd_n: usize,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub threshold: f64,
    pub fd_regime: Regime,
    pub data: tvs_core::galerkin::LowModeData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub bc: Boundary,
    pub model: MaterialModel,
    pub solver: SolverConfig,
    pub init: InitSpec,
    pub output: OutputSpec,
    pub mms: MmsSpec,
    pub galerkin: GalerkinSpec,
    pub sample_max: f64,
    pub samples: usize,
}

impl SimConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let n: usize = raw.get_or("grid.n", 64)?;
        if n < 8 || !n.is_multiple_of(2) {
            return Err(parse_error(
                raw.line("grid.n"),
                "grid.n",
                format!("value {n} must be an even integer >= 8"),
            ));
        }
        let bc: Boundary = raw.get_or("grid.bc", Boundary::Periodic)?;

        let regime: Regime = raw.get_or("material.regime", Regime::P1)?;
        let mut model = MaterialModel::preset(regime).with_c_v(raw.positive("material.c_v", 1.0)?);
        if let Some(l) = raw.law("material.nu")? {
            model.nu = l;
        }
        if let Some(l) = raw.law("material.kappa")? {
            model.kappa = l;
        }
        if let Some(l) = raw.law("material.delta")? {
            model.delta = l;
        }
        if let Some(l) = raw.law("material.g")? {
            model.g = l;
        }
        model.c1 = raw.positive("material.C1", model.c1)?;
        model.c2 = raw.positive("material.C2", model.c2)?;
        model.check()?;

        let defaults = SolverConfig::default();
        let dt_kind: String = raw.get_or("solver.dt", "cfl".to_string())?;
        let dt_policy = match dt_kind.as_str() {
            "cfl" => DtPolicy::Cfl {
                safety: raw.real_in("solver.dt.safety", 0.4, 0.0, 1.0, true)?,
            },
            "fixed" => DtPolicy::Fixed(raw.positive("solver.dt.value", 1e-4)?),
            other => {
                return Err(parse_error(
                    raw.line("solver.dt"),
                    "solver.dt",
                    format!("expected `cfl` or `fixed`, got `{other}`"),
                ))
            }
        };
        let path = match raw
            .get_or("solver.temperature_path", "auto".to_string())?
            .as_str()
        {
            "auto" => TemperaturePath::Auto,
            "theta" => TemperaturePath::DirectTheta,
            "internal_energy" => TemperaturePath::InternalEnergy,
            other => {
                return Err(parse_error(
                    raw.line("solver.temperature_path"),
                    "solver.temperature_path",
                    format!("expected `auto`, `theta` or `internal_energy`, got `{other}`"),
                ))
            }
        };
        let poisson = match raw.get_or("solver.poisson", "auto".to_string())?.as_str() {
            "auto" => PoissonMethod::Auto,
            "spectral" => PoissonMethod::Spectral,
            "cg" => PoissonMethod::ConjugateGradient,
            other => {
                return Err(parse_error(
                    raw.line("solver.poisson"),
                    "solver.poisson",
                    format!("expected `auto`, `spectral` or `cg`, got `{other}`"),
                ))
            }
        };
        let solver = SolverConfig {
            epsilon: raw.real_in("solver.epsilon", defaults.epsilon, 0.0, 1.0, false)?,
            r: raw.real_in("solver.r", defaults.r, 0.0, 1.0, true)?,
            dt_policy,
            projection_tol: raw.positive("solver.projection_tol", defaults.projection_tol)?,
            t_end: raw.positive("solver.T", defaults.t_end)?,
            temperature_path: path,
            poisson,
        };
        if solver.epsilon >= 1.0 {
            return Err(parse_error(
                raw.line("solver.epsilon"),
                "solver.epsilon",
                "value must lie in [0, 1)",
            ));
        }
        solver.check()?;
        solver.resolved_path(regime)?;

        let seed: u64 = raw.get_or("init.seed", 1)?;
        let preset: String = raw.get_or("init.preset", "stationary".to_string())?;
        let init = match preset.as_str() {
            "stationary" => InitSpec::Preset(InitPreset::Stationary),
            "pure_diffusion" => InitSpec::Preset(InitPreset::PureDiffusion {
                amplitude: raw.get_or("init.amplitude", 0.1)?,
            }),
            "shear" => InitSpec::Preset(InitPreset::Shear {
                amplitude: raw.get_or("init.amplitude", 0.5)?,
            }),
            "random_smooth" => InitSpec::Preset(InitPreset::RandomSmooth {
                seed,
                amplitude: raw.get_or("init.amplitude", 0.3)?,
            }),
            "relaxation" => InitSpec::Preset(InitPreset::Relaxation {
                b0: raw.positive("init.b0", 2.0)?,
            }),
            "rough_temperature" => InitSpec::Preset(InitPreset::RoughTemperature {
                seed,
                amplitude: raw.get_or("init.amplitude", 0.3)?,
                lo: raw.positive("init.lo", 0.05)?,
                hi: raw.positive("init.hi", 30.0)?,
            }),
            "mms" => InitSpec::Mms,
            other => {
                return Err(parse_error(
                    raw.line("init.preset"),
                    "init.preset",
                    format!("unknown preset `{other}`"),
                ))
            }
        };

        let stride: usize = raw.get_or("output.stride", 10)?;
        if stride == 0 {
            return Err(parse_error(
                raw.line("output.stride"),
                "output.stride",
                "must be at least 1",
            ));
        }
        let output = OutputSpec {
            dir: PathBuf::from(raw.get_or("output.dir", "out".to_string())?),
            stride,
            snapshots: raw.get_or("output.snapshots", false)?,
            pgm: raw.get_or("output.pgm", false)?,
        };

        let mut case = ManufacturedCase::new(regime);
        case.a_v = raw.get_or("mms.a_v", case.a_v)?;
        case.a_theta = raw.get_or("mms.a_theta", case.a_theta)?;
        case.a_f = raw.get_or("mms.a_F", case.a_f)?;
        case.k = raw.get_or("mms.k", case.k)?;
        case.check().map_err(|e| relabel(raw, e))?;
        let sd = StudySettings::default();
        let mms = MmsSpec {
            case,
            grids: raw.list("mms.grids", &[32, 64, 128])?,
            settings: StudySettings {
                epsilon: solver.epsilon,
                t_end: raw.positive("mms.T", sd.t_end)?,
                dt_coeff: raw.positive("mms.dt_coeff", sd.dt_coeff)?,
                projection_tol: solver.projection_tol,
            },
            order_min: raw.get_or("mms.order_min", 1.75)?,
            order_max: raw.get_or("mms.order_max", 2.25)?,
            order_f_min: raw.get_or("mms.order_F_min", 1.8)?,
        };

        let gd = tvs_core::galerkin::LowModeData::default();
        let galerkin = GalerkinSpec {
            n_flow: raw.get_or("galerkin.n_flow", 8)?,
            m_temp: raw.get_or("galerkin.m_temp", 8)?,
            fd_n: raw.get_or("galerkin.fd_n", 64)?,
            t_end: raw.positive("galerkin.T", 0.05)?,
            dt: raw.get("galerkin.dt")?,
            threshold: raw.positive("galerkin.threshold", 5e-3)?,
            fd_regime: raw.get_or("galerkin.fd_regime", regime)?,
            data: tvs_core::galerkin::LowModeData {
                a_v: raw.get_or("galerkin.a_v", gd.a_v)?,
                a_theta: raw.get_or("galerkin.a_theta", gd.a_theta)?,
                a_f: raw.get_or("galerkin.a_F", gd.a_f)?,
            },
        };

        Ok(SimConfig {
            n,
            bc,
            model,
            solver,
            init,
            output,
            mms,
            galerkin,
            sample_max: raw.positive("material.sample_max", 100.0)?,
            samples: raw.get_or("material.samples", 2000)?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_raw(&RawConfig::load(path)?)
    }

    /// Output directory, overridden by `TVS_OUT_DIR` when set.
    pub fn out_dir(&self) -> PathBuf {
        match std::env::var_os("TVS_OUT_DIR") {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output.dir.clone(),
        }
    }
}

/// Attaches line numbers to parameter errors raised by core validation.
fn relabel(raw: &RawConfig, e: Error) -> Error {
    match e {
        Error::InvalidParameter { key, reason } => Error::ConfigParse {
            line: raw.line(&key),
            key,
            reason,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<SimConfig> {
        SimConfig::from_raw(&RawConfig::parse(text)?)
    }

    #[test]
    fn defaults_and_comments() {
        let c = cfg("# nothing but comments\n\ngrid.n = 16 # trailing\n").unwrap();
        assert_eq!(c.n, 16);
        assert_eq!(c.model.regime, Regime::P1);
        assert_eq!(c.init, InitSpec::Preset(InitPreset::Stationary));
        assert_eq!(c.output.stride, 10);
    }

    #[test]
    fn quoted_values_and_laws() {
        let c = cfg("material.regime = P3\nmaterial.g = \"concave_rational(3, 1)\"\nmaterial.C2 = 3\ninit.preset = \"random_smooth\"\ninit.seed = 7\n").unwrap();
        assert_eq!(c.model.g, Law::ConcaveRational { a: 3.0, b: 1.0 });
        assert_eq!(
            c.init,
            InitSpec::Preset(InitPreset::RandomSmooth {
                seed: 7,
                amplitude: 0.3
            })
        );
        assert_eq!(parse_law("2.5"), Ok(Law::Constant(2.5)));
        assert_eq!(
            parse_law("linear(1, 0.5)"),
            Ok(Law::Linear {
                intercept: 1.0,
                slope: 0.5
            })
        );
        assert!(parse_law("cubic(1)").is_err());
        assert!(parse_law("linear(1)").is_err());
    }

    #[test]
    fn r_out_of_range_names_key_and_range() {
        let e = cfg("grid.n = 16\nsolver.r = 1.5\n").unwrap_err();
        match e {
            Error::ConfigParse { line, key, reason } => {
                assert_eq!(line, 2);
                assert_eq!(key, "solver.r");
                assert!(reason.contains("(0, 1)"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert!(matches!(
            RawConfig::parse("grid.n 16"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert!(
            matches!(RawConfig::parse("\ngrid.m = 3"), Err(Error::ConfigParse { line: 2, ref key, .. }) if key == "grid.m")
        );
        assert!(matches!(
            RawConfig::parse("grid.n = 8\ngrid.n = 16"),
            Err(Error::ConfigParse { line: 2, .. })
        ));
        assert!(matches!(
            cfg("grid.n = 12x"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert!(matches!(
            cfg("grid.n = 7"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert!(matches!(
            cfg("init.preset = vortex"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
        assert!(matches!(
            cfg("mms.a_F = 0.5"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
    }

    #[test]
    fn hash_inside_quotes_is_kept() {
        let raw = RawConfig::parse("output.dir = \"runs/#1\"").unwrap();
        assert_eq!(
            raw.get::<String>("output.dir").unwrap().as_deref(),
            Some("runs/#1")
        );
    }

    #[test]
    fn direct_path_rejected_for_p3() {
        assert!(cfg("material.regime = P3\nsolver.temperature_path = theta").is_err());
    }

    #[test]
    fn grids_list() {
        let c = cfg("mms.grids = 8, 16,32").unwrap();
        assert_eq!(c.mms.grids, vec![8, 16, 32]);
    }
}
