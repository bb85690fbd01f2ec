//! Sectioned `key = value` run configuration.
//!
//! ```text
//! [domain]
//! kind = ball
//! radius = 1.0
//!
//! [grid]
//! n = 24
//!
//! [scenario]
//! kind = divcurl
//! g = 0, 0, 1
//! ```
//!
//! Lines starting with `#` or `;` are comments. Field values are arithmetic
//! expressions in `x1`, `x2`, `x3`; vector fields list three comma-separated
//! components. A value `csv:<path>` reads samples exported by this tool
//! instead.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use starcurl::potentials::{SingularCorrection, VolumeOperatorConfig};
use starcurl::Vec3;

use crate::error::ConfigError;

/// Arithmetic expression over `x1`, `x2`, `x3` (`+ - * / ^`, `exp`, `sin`,
/// `cos`, `sqrt`, `pi`, `e`, ...).
#[derive(Debug, Clone)]
pub struct FieldExpr {
    text: String,
    expr: meval::Expr,
}

impl FieldExpr {
    pub fn parse(text: &str) -> Result<Self, String> {
        let expr = meval::Expr::from_str(text).map_err(|e| format!("cannot parse `{text}`: {e}"))?;
        if let Err(e) = expr.clone().bind3("x1", "x2", "x3") {
            return Err(format!("in `{text}`: {e}"));
        }
        Ok(Self {
            text: text.trim().to_string(),
            expr,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Evaluates the expression at every point, in order.
    pub fn eval_all(&self, points: &[Vec3]) -> Vec<f64> {
        let f = self
            .expr
            .clone()
            .bind3("x1", "x2", "x3")
            .expect("variables checked at parse time");
        points.iter().map(|p| f(p.x, p.y, p.z)).collect()
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.eval_all(&[x])[0]
    }
}

/// Source of a sampled field: closed-form components or a CSV export.
#[derive(Debug, Clone)]
pub enum FieldSource {
    Exprs(Vec<FieldExpr>),
    Csv(PathBuf),
}

impl FieldSource {
    fn parse(value: &str, components: usize) -> Result<Self, String> {
        if let Some(path) = value.strip_prefix("csv:") {
            return Ok(FieldSource::Csv(PathBuf::from(path.trim())));
        }
        let parts = split_top_level(value);
        if parts.len() != components {
            return Err(format!(
                "expected {components} comma-separated component(s), got {}",
                parts.len()
            ));
        }
        parts
            .iter()
            .map(|p| FieldExpr::parse(p))
            .collect::<Result<Vec<_>, _>>()
            .map(FieldSource::Exprs)
    }
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    parts.push(cur.trim().to_string());
    parts
}

#[derive(Debug, Clone)]
pub enum DomainConfig {
    Ball {
        radius: f64,
        center: Vec3,
        refinement: usize,
    },
    Box {
        half_extents: Vec3,
        center: Vec3,
        facets_per_edge: usize,
    },
    /// `{center + r d : r < ρ(d)}`, with `ρ` an expression in the unit
    /// direction `(x1, x2, x3)`.
    Radial {
        rho: FieldExpr,
        center: Vec3,
        refinement: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Free,
    Neumann,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VekuaOperator {
    DMinusAlpha,
    DPlusM,
}

#[derive(Debug, Clone)]
pub enum Scenario {
    DivCurl {
        g0: Option<FieldSource>,
        g: Option<FieldSource>,
        boundary: BoundaryKind,
        degree: u32,
    },
    Beltrami {
        g: Option<FieldSource>,
        a0: Option<FieldExpr>,
        alpha0: f64,
        /// Admissibility limit; estimated from random fields when absent.
        alpha_limit: Option<f64>,
        norm_samples: usize,
        neumann: bool,
        k_max: usize,
        tail_tol: f64,
        degree: u32,
    },
    Vekua {
        operator: VekuaOperator,
        alpha: FieldSource,
        g0: Option<FieldSource>,
        g: Option<FieldSource>,
    },
    Maxwell {
        eps: FieldSource,
        mu: FieldSource,
        rho: FieldSource,
        j: FieldSource,
    },
    Verify {
        samples: usize,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::DivCurl { .. } => "divcurl",
            Scenario::Beltrami { .. } => "beltrami",
            Scenario::Vekua { .. } => "vekua",
            Scenario::Maxwell { .. } => "maxwell",
            Scenario::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Vtk,
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub n: usize,
    pub quadrature: VolumeOperatorConfig,
    pub seed: u64,
    pub scenario: Scenario,
    pub output: OutputConfig,
    /// The configuration text as given.
    pub source: String,
}

/// Value with the line it was read from.
#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

type Section = BTreeMap<String, Entry>;

const SECTIONS: [&str; 5] = ["domain", "grid", "quadrature", "scenario", "output"];

fn read_sections(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, format!("malformed section header `{s}`")))?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::at(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(&name) {
                return Err(ConfigError::at(line, format!("duplicate section [{name}]")));
            }
            sections.insert(name.clone(), Section::new());
            current = Some(name);
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{s}`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::at(line, "missing key before `=`"));
        }
        let section = current
            .as_ref()
            .ok_or_else(|| ConfigError::at(line, format!("key `{key}` outside of any section")))?;
        let map = sections.get_mut(section).expect("section inserted");
        if map.contains_key(key) {
            return Err(ConfigError::at(line, format!("duplicate key `{key}` in [{section}]")));
        }
        map.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                line,
            },
        );
    }
    Ok(sections)
}

/// Reader over one section that tracks which keys were consumed.
struct Keys<'a> {
    name: &'a str,
    map: Section,
}

impl<'a> Keys<'a> {
    fn new(name: &'a str, map: Option<Section>) -> Self {
        Self {
            name,
            map: map.unwrap_or_default(),
        }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.map.remove(key)
    }

    fn parse<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| {
                ConfigError::at(e.line, format!("`{key}`: cannot parse `{}`", e.value))
            }),
        }
    }

    fn ranged<T>(&mut self, key: &str, default: T, ok: impl Fn(T) -> bool, range: &str) -> Result<T, ConfigError>
    where
        T: FromStr + Copy + std::fmt::Display,
    {
        let line = self.map.get(key).map(|e| e.line);
        let v = self.parse(key, default)?;
        if !ok(v) {
            return Err(ConfigError::new(line, format!("`{key}` = {v} is out of range ({range})")));
        }
        Ok(v)
    }

    fn vec3(&mut self, key: &str, default: Vec3) -> Result<Vec3, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => {
                let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
                let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
                match nums {
                    Ok(v) if v.len() == 3 && v.iter().all(|x| x.is_finite()) => Ok(Vec3::new(v[0], v[1], v[2])),
                    _ => Err(ConfigError::at(e.line, format!("`{key}`: expected three numbers, got `{}`", e.value))),
                }
            }
        }
    }

    fn field(&mut self, key: &str, components: usize) -> Result<Option<FieldSource>, ConfigError> {
        self.take(key)
            .map(|e| FieldSource::parse(&e.value, components).map_err(|m| ConfigError::at(e.line, format!("`{key}`: {m}"))))
            .transpose()
    }

    fn required_field(&mut self, key: &str, components: usize) -> Result<FieldSource, ConfigError> {
        self.field(key, components)?
            .ok_or_else(|| ConfigError::new(None, format!("[{}] requires `{key}`", self.name)))
    }

    fn choice<T: Copy>(&mut self, key: &str, default: T, options: &[(&str, T)]) -> Result<T, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => options
                .iter()
                .find(|(name, _)| *name == e.value)
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                    ConfigError::at(e.line, format!("`{key}` must be one of {}, got `{}`", names.join(" | "), e.value))
                }),
        }
    }

    /// Fails on the first key that was not consumed.
    fn finish(self) -> Result<(), ConfigError> {
        match self.map.into_iter().min_by_key(|(_, e)| e.line) {
            None => Ok(()),
            Some((k, e)) => Err(ConfigError::at(e.line, format!("unknown key `{k}` in [{}]", self.name))),
        }
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_as(text, None)
}

/// Parses `text` for the scenario `kind` (a subcommand name). The file may
/// omit `[scenario] kind`; if it names one, it must agree.
pub fn parse_config_as(text: &str, scenario_kind: Option<&str>) -> Result<RunConfig, ConfigError> {
    let mut sections = read_sections(text)?;

    let mut d = Keys::new("domain", sections.remove("domain"));
    let kind = d.choice("kind", 0u8, &[("ball", 0), ("box", 1), ("radial", 2)])?;
    let center = d.vec3("center", Vec3::zeros())?;
    let domain = match kind {
        0 => DomainConfig::Ball {
            radius: d.ranged("radius", 1.0, positive, "> 0")?,
            center,
            refinement: d.ranged("refinement", 3, |r| r <= 6, "0..=6")?,
        },
        1 => {
            let half_extents = d.vec3("extents", Vec3::new(1.0, 1.0, 1.0))?;
            if !half_extents.iter().all(|&v| positive(v)) {
                return Err(ConfigError::new(None, "`extents` must be positive"));
            }
            DomainConfig::Box {
                half_extents,
                center,
                facets_per_edge: d.ranged("facets_per_edge", 4, |r| (1..=64).contains(&r), "1..=64")?,
            }
        }
        _ => {
            let rho = d.take("rho").ok_or_else(|| ConfigError::new(None, "radial domain requires `rho`"))?;
            DomainConfig::Radial {
                rho: FieldExpr::parse(&rho.value).map_err(|m| ConfigError::at(rho.line, format!("`rho`: {m}")))?,
                center,
                refinement: d.ranged("refinement", 3, |r| r <= 6, "0..=6")?,
            }
        }
    };
    d.finish()?;

    let mut g = Keys::new("grid", sections.remove("grid"));
    let n = g.ranged("n", 24usize, |n| (8..=256).contains(&n), "8..=256")?;
    g.finish()?;

    let mut q = Keys::new("quadrature", sections.remove("quadrature"));
    let defaults = VolumeOperatorConfig::default();
    let quadrature = VolumeOperatorConfig {
        ray_nodes: q.ranged("ray_nodes", defaults.ray_nodes, |n| (8..=256).contains(&n), "8..=256")?,
        gradient_step_fraction: q.ranged(
            "gradient_step_fraction",
            defaults.gradient_step_fraction,
            |f| f > 0.0 && f <= 0.5,
            "(0, 0.5]",
        )?,
        singular_correction: q.choice(
            "singular_correction",
            defaults.singular_correction,
            &[
                ("equivalent_ball", SingularCorrection::EquivalentBall),
                ("exclude_cell", SingularCorrection::ExcludeCell),
            ],
        )?,
    };
    q.finish()?;

    let mut s = Keys::new("scenario", sections.remove("scenario"));
    let kind_entry = match (s.take("kind"), scenario_kind) {
        (Some(e), Some(k)) if e.value != k => {
            return Err(ConfigError::at(
                e.line,
                format!("scenario kind `{}` does not match subcommand `{k}`", e.value),
            ))
        }
        (Some(e), _) => e,
        (None, Some(k)) => Entry {
            value: k.to_string(),
            line: 0,
        },
        (None, None) => return Err(ConfigError::new(None, "[scenario] requires `kind`")),
    };
    let seed = s.parse("seed", 0u64)?;
    let scenario = match kind_entry.value.as_str() {
        "divcurl" => {
            let g0 = s.field("g0", 1)?;
            let g = s.field("g", 3)?;
            if g0.is_none() && g.is_none() {
                return Err(ConfigError::new(None, "divcurl scenario requires `g0` or `g`"));
            }
            Scenario::DivCurl {
                g0,
                g,
                boundary: s.choice(
                    "boundary",
                    BoundaryKind::Free,
                    &[
                        ("free", BoundaryKind::Free),
                        ("neumann", BoundaryKind::Neumann),
                        ("dirichlet", BoundaryKind::Dirichlet),
                    ],
                )?,
                degree: s.ranged("degree", 6u32, |d| (1..=12).contains(&d), "1..=12")?,
            }
        }
        "beltrami" => {
            let g = s.field("g", 3)?;
            let a0 = s
                .take("a0")
                .map(|e| FieldExpr::parse(&e.value).map_err(|m| ConfigError::at(e.line, format!("`a0`: {m}"))))
                .transpose()?;
            if g.is_some() == a0.is_some() {
                return Err(ConfigError::new(None, "beltrami scenario requires exactly one of `g` and `a0`"));
            }
            let alpha_limit = match s.take("alpha_limit") {
                None => None,
                Some(e) => Some(
                    e.value
                        .parse::<f64>()
                        .ok()
                        .filter(|v| positive(*v))
                        .ok_or_else(|| ConfigError::at(e.line, format!("`alpha_limit` must be positive, got `{}`", e.value)))?,
                ),
            };
            Scenario::Beltrami {
                g,
                a0,
                alpha0: s.ranged("alpha0", 0.2, f64::is_finite, "finite")?,
                alpha_limit,
                norm_samples: s.ranged("norm_samples", 20usize, |v| (1..=1000).contains(&v), "1..=1000")?,
                neumann: s.choice("variant", false, &[("free", false), ("neumann", true)])?,
                k_max: s.ranged("k_max", 30usize, |v| (1..=1000).contains(&v), "1..=1000")?,
                tail_tol: s.ranged("tail_tol", 1e-8, |v| v > 0.0 && v < 1.0, "(0, 1)")?,
                degree: s.ranged("degree", 6u32, |d| (1..=12).contains(&d), "1..=12")?,
            }
        }
        "vekua" => {
            let operator = s.choice(
                "operator",
                VekuaOperator::DMinusAlpha,
                &[
                    ("d_minus_alpha", VekuaOperator::DMinusAlpha),
                    ("d_plus_m", VekuaOperator::DPlusM),
                ],
            )?;
            Scenario::Vekua {
                operator,
                alpha: s.required_field("alpha", 3)?,
                g0: s.field("g0", 1)?,
                g: s.field("g", 3)?,
            }
        }
        "maxwell" => Scenario::Maxwell {
            eps: s.field("eps", 1)?.unwrap_or_else(|| FieldSource::parse("1", 1).expect("constant")),
            mu: s.field("mu", 1)?.unwrap_or_else(|| FieldSource::parse("1", 1).expect("constant")),
            rho: s.field("rho", 1)?.unwrap_or_else(|| FieldSource::parse("0", 1).expect("constant")),
            j: s.field("j", 3)?.unwrap_or_else(|| FieldSource::parse("0, 0, 0", 3).expect("constant")),
        },
        "verify" => Scenario::Verify {
            samples: s.ranged("samples", 3usize, |v| (1..=100).contains(&v), "1..=100")?,
        },
        other => {
            return Err(ConfigError::at(
                kind_entry.line,
                format!("unknown scenario kind `{other}` (divcurl | beltrami | vekua | maxwell | verify)"),
            ))
        }
    };
    s.finish()?;

    let mut o = Keys::new("output", sections.remove("output"));
    let dir = o.parse("dir", PathBuf::from("out"))?;
    let formats = match o.take("formats") {
        None => vec![Format::Csv],
        Some(e) => e
            .value
            .split(',')
            .map(|f| match f.trim() {
                "csv" => Ok(Format::Csv),
                "vtk" => Ok(Format::Vtk),
                other => Err(ConfigError::at(e.line, format!("unknown output format `{other}` (csv | vtk)"))),
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    o.finish()?;

    Ok(RunConfig {
        domain,
        n,
        quadrature,
        seed,
        scenario,
        output: OutputConfig { dir, formats },
        source: text.to_string(),
    })
}
