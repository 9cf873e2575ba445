//! Model configuration files.

use std::path::Path;

use lattice_ext::lattice::{build_lattice, LatticeError, Lattice, SplitSpace, SplitVector};
use lattice_ext::scalar::{squarefree_part, Quadratic, Rational, Real, RealScalar};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, ExprError, Radical};

pub const SUITES: &[&str] = &["lattice", "cocycle", "fock", "vertex", "net2d", "braidcat", "classify"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown backend {0:?}; expected rational, quadratic(d) or float(tol)")]
    Backend(String),
    #[error("unknown suite {0:?}")]
    Suite(String),
    #[error("{what}: {source}")]
    Expr { what: String, source: ExprError },
    #[error("{what} = {value} does not fit the {backend} backend")]
    Field { what: String, value: String, backend: String },
    #[error("r_squared must be positive")]
    RSquared,
    #[error("generator {i} has {got} entries, expected d_plus + d_minus = {want}")]
    Width { i: usize, got: usize, want: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("cutoff {0} must be positive")]
    Cutoff(&'static str),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: Model,
    pub lattice: LatticeSection,
    #[serde(default)]
    pub cutoffs: Cutoffs,
    #[serde(default)]
    pub suites: SuiteSection,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub d_plus: usize,
    pub d_minus: usize,
    #[serde(default = "default_backend")]
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<String>,
}

fn default_backend() -> String {
    "rational".into()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub generators: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    pub energy: usize,
    pub series_order: usize,
    pub box_radius: i64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs { energy: 6, series_order: 4, box_radius: 2 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    pub enabled: Vec<String>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        SuiteSection { enabled: vec!["all".into()] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Backend {
    Rational,
    /// `Q(√d)`; `None` infers `d` from the generators.
    Quadratic(Option<i128>),
    Float(f64),
}

impl Backend {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let t = s.trim();
        let arg = |name: &str| -> Option<&str> { t.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')') };
        match t {
            "rational" => return Ok(Backend::Rational),
            "quadratic" => return Ok(Backend::Quadratic(None)),
            "float" => return Ok(Backend::Float(1e-9)),
            _ => {}
        }
        if let Some(d) = arg("quadratic") {
            let d: i128 = d.trim().parse().map_err(|_| ConfigError::Backend(s.into()))?;
            if d < 2 || squarefree_part(d) != d {
                return Err(ConfigError::Backend(s.into()));
            }
            return Ok(Backend::Quadratic(Some(d)));
        }
        if let Some(tol) = arg("float") {
            let tol: f64 = tol.trim().parse().map_err(|_| ConfigError::Backend(s.into()))?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(ConfigError::Backend(s.into()));
            }
            return Ok(Backend::Float(tol));
        }
        Err(ConfigError::Backend(s.into()))
    }
}

/// A validated lattice in the configured backend.
#[derive(Clone, Debug)]
pub enum ModelLattice {
    Rational(Lattice<Rational>),
    Quadratic(Lattice<Quadratic>),
    Float(Lattice<Real>),
}

#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub lattice: ModelLattice,
    /// `R²` when declared; exact when the backend is exact.
    pub r_squared: Option<RSquared>,
    pub suites: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RSquared {
    Exact(Rational),
    Float(f64),
}

impl RSquared {
    pub fn to_f64(&self) -> f64 {
        match self {
            RSquared::Exact(q) => num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN),
            RSquared::Float(x) => *x,
        }
    }
}

pub fn load(path: &Path) -> Result<ModelConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ModelConfig, ConfigError> {
    let cfg: ModelConfig = toml::from_str(text)?;
    Ok(cfg)
}

/// Suite names selected by the config, or by `overrides` when non-empty.
pub fn selected_suites(cfg: &ModelConfig, overrides: &[String]) -> Result<Vec<String>, ConfigError> {
    let list = if overrides.is_empty() { &cfg.suites.enabled } else { overrides };
    let mut out = Vec::new();
    for s in list {
        if s == "all" {
            out.extend(SUITES.iter().map(|s| s.to_string()));
        } else if SUITES.contains(&s.as_str()) {
            out.push(s.clone());
        } else {
            return Err(ConfigError::Suite(s.clone()));
        }
    }
    // canonical order, no repeats
    Ok(SUITES.iter().filter(|s| out.iter().any(|o| o == *s)).map(|s| s.to_string()).collect())
}

fn expr_err(what: String) -> impl FnOnce(ExprError) -> ConfigError {
    move |source| ConfigError::Expr { what, source }
}

fn to_quadratic(v: &Radical, d: i128, what: &str) -> Result<Quadratic, ConfigError> {
    let bad = || ConfigError::Field { what: what.into(), value: v.to_string(), backend: format!("quadratic({d})") };
    if v.radicands().iter().any(|&n| n != d) {
        return Err(bad());
    }
    Ok(Quadratic::new(v.part(1), v.part(d), d as i64))
}

fn split_row<F: RealScalar>(space: SplitSpace, mut v: Vec<F>) -> SplitVector<F> {
    let minus = v.split_off(space.d_plus);
    SplitVector::new(v, minus)
}

/// Evaluates tokens in the declared backend and validates the lattice.
pub fn build_model(cfg: &ModelConfig, overrides: &[String]) -> Result<ResolvedModel, ConfigError> {
    let c = &cfg.cutoffs;
    if c.energy == 0 {
        return Err(ConfigError::Cutoff("energy"));
    }
    if c.series_order == 0 {
        return Err(ConfigError::Cutoff("series_order"));
    }
    if c.box_radius < 1 {
        return Err(ConfigError::Cutoff("box_radius"));
    }
    let suites = selected_suites(cfg, overrides)?;
    let backend = Backend::parse(&cfg.model.backend)?;
    let space = SplitSpace::new(cfg.model.d_plus, cfg.model.d_minus);
    let want = space.dim();
    for (i, row) in cfg.lattice.generators.iter().enumerate() {
        if row.len() != want {
            return Err(ConfigError::Width { i, got: row.len(), want });
        }
    }
    let exprs = cfg
        .lattice
        .generators
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, t)| parse(t).map_err(expr_err(format!("generator {i} entry {j}"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let r2_expr = cfg
        .model
        .r_squared
        .as_deref()
        .map(|s| parse(s).map_err(expr_err("r_squared".into())))
        .transpose()?;

    let (lattice, r_squared) = match backend {
        Backend::Float(tol) => {
            let r2 = r2_expr.map(|e| e.eval_f64(None).map_err(expr_err("r_squared".into()))).transpose()?;
            if r2.is_some_and(|x| !(x > 0.0)) {
                return Err(ConfigError::RSquared);
            }
            let r = r2.map(f64::sqrt);
            let gens = exprs
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, e)| {
                            e.eval_f64(r)
                                .map(|x| Real::with_tolerance(x, tol))
                                .map_err(expr_err(format!("generator {i} entry {j}")))
                        })
                        .collect::<Result<Vec<_>, _>>()
                        .map(|v| split_row(space, v))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (ModelLattice::Float(build_lattice(space, gens)?), r2.map(RSquared::Float))
        }
        Backend::Rational | Backend::Quadratic(_) => {
            let r2 = r2_expr
                .map(|e| {
                    let v = e.eval_exact(None).map_err(expr_err("r_squared".into()))?;
                    v.as_rational().ok_or_else(|| ConfigError::Field {
                        what: "r_squared".into(),
                        value: v.to_string(),
                        backend: cfg.model.backend.clone(),
                    })
                })
                .transpose()?;
            if r2.is_some_and(|q| q <= Rational::from_integer(0)) {
                return Err(ConfigError::RSquared);
            }
            let r = r2.map(|q| Radical::sqrt(&q)).transpose().map_err(expr_err("r_squared".into()))?;
            let vals = exprs
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, e)| e.eval_exact(r.as_ref()).map_err(expr_err(format!("generator {i} entry {j}"))))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let lat = match backend {
                Backend::Rational => {
                    let gens = vals
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            row.iter()
                                .enumerate()
                                .map(|(j, v)| {
                                    v.as_rational().ok_or_else(|| ConfigError::Field {
                                        what: format!("generator {i} entry {j}"),
                                        value: v.to_string(),
                                        backend: "rational".into(),
                                    })
                                })
                                .collect::<Result<Vec<_>, _>>()
                                .map(|v| split_row(space, v))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    ModelLattice::Rational(build_lattice(space, gens)?)
                }
                Backend::Quadratic(d) => {
                    let mut seen: Vec<i128> = vals.iter().flatten().flat_map(Radical::radicands).collect();
                    seen.sort_unstable();
                    seen.dedup();
                    let d = match d {
                        Some(d) => d,
                        None if seen.len() <= 1 => seen.first().copied().unwrap_or(2),
                        None => {
                            return Err(ConfigError::Field {
                                what: "generators".into(),
                                value: format!("radicands {seen:?}"),
                                backend: "quadratic".into(),
                            })
                        }
                    };
                    let gens = vals
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            row.iter()
                                .enumerate()
                                .map(|(j, v)| to_quadratic(v, d, &format!("generator {i} entry {j}")))
                                .collect::<Result<Vec<_>, _>>()
                                .map(|v| split_row(space, v))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    ModelLattice::Quadratic(build_lattice(space, gens)?)
                }
                Backend::Float(_) => unreachable!(),
            };
            (lat, r2.map(RSquared::Exact))
        }
    };
    Ok(ResolvedModel { lattice, r_squared, suites })
}
