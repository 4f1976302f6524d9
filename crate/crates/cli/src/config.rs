//! Experiment files: `[section]` headers followed by `key = value` lines.
//!
//! ```text
//! # unit sphere, equator
//! [geometry]
//! kind = round-sphere
//! n = 2
//! radius = 1
//!
//! [surface]
//! r0 = 1.5707963267948966
//!
//! [checks]
//! run = hk-full, rigidity
//! expect = rigid
//!
//! [output]
//! format = csv
//! path = sphere.csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use needlecomp::geometry::{GeometrySpec, SurfaceSpec};
use needlecomp::hk::DEFAULT_EQUALITY_TOLERANCE;
use needlecomp::model1d::CurvatureDimension;

pub const TOLERANCE_ENV: &str = "NEEDLECOMP_TOL";

const KEYS: &[(&str, &[&str])] = &[
    (
        "geometry",
        &["kind", "n", "radius", "K", "N", "length", "base_volume"],
    ),
    ("surface", &["r0"]),
    ("checks", &["run", "t_values", "h0", "epsilons", "expect"]),
    ("tolerances", &["equality", "grid"]),
    ("output", &["format", "path"]),
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        f.write_str(&self.reason)
    }
}

fn err(line: Option<usize>, key: Option<&str>, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        key: key.map(str::to_owned),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    CdDensity,
    Sturm,
    Ratio,
    HkOuter,
    HkFull,
    Corollaries,
    LevyGromov,
    Rigidity,
    Minkowski,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::CdDensity,
        Check::Sturm,
        Check::Ratio,
        Check::HkOuter,
        Check::HkFull,
        Check::Corollaries,
        Check::LevyGromov,
        Check::Rigidity,
        Check::Minkowski,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::CdDensity => "cd-density",
            Check::Sturm => "sturm",
            Check::Ratio => "ratio",
            Check::HkOuter => "hk-outer",
            Check::HkFull => "hk-full",
            Check::Corollaries => "corollaries",
            Check::LevyGromov => "levy-gromov",
            Check::Rigidity => "rigidity",
            Check::Minkowski => "minkowski",
        }
    }

    fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Assertions that turn a reported outcome into an exit-status condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Rigid,
    NotRigid,
    /// The full bound is attained.
    Equality,
    /// The full bound is strict.
    Strict,
}

impl Expectation {
    pub fn name(self) -> &'static str {
        match self {
            Expectation::Rigid => "rigid",
            Expectation::NotRigid => "not-rigid",
            Expectation::Equality => "equality",
            Expectation::Strict => "strict",
        }
    }

    fn parse(s: &str) -> Option<Expectation> {
        [
            Expectation::Rigid,
            Expectation::NotRigid,
            Expectation::Equality,
            Expectation::Strict,
        ]
        .into_iter()
        .find(|e| e.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Report,
    Csv,
    PlotData,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "report" => Some(Format::Report),
            "csv" => Some(Format::Csv),
            "plotdata" => Some(Format::PlotData),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub geometry: GeometrySpec,
    pub surface: SurfaceSpec,
    pub checks: Vec<Check>,
    pub t_values: Vec<f64>,
    pub h0: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub expect: Vec<Expectation>,
    pub tolerance: f64,
    pub grid: usize,
    pub format: Format,
    /// `None` writes to standard output.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Entry {
    line: Option<usize>,
    value: String,
}

/// Raw `(section, key) → value` table, before validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), Entry>,
}

fn known(section: &str, key: &str) -> bool {
    KEYS.iter()
        .any(|(s, keys)| *s == section && keys.contains(&key))
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(Some(n), None, "unterminated section header"))?
                    .trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(err(Some(n), None, format!("unknown section [{name}]")));
                }
                section = Some(name.to_owned());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(Some(n), None, "expected `key = value`"))?;
            let key = key.trim();
            let sec = section
                .as_deref()
                .ok_or_else(|| err(Some(n), Some(key), "key outside any [section]"))?;
            if !known(sec, key) {
                return Err(err(Some(n), Some(key), format!("unknown key in [{sec}]")));
            }
            let slot = (sec.to_owned(), key.to_owned());
            if raw.entries.contains_key(&slot) {
                return Err(err(Some(n), Some(key), "duplicate key"));
            }
            raw.entries.insert(
                slot,
                Entry {
                    line: Some(n),
                    value: value.trim().to_owned(),
                },
            );
        }
        Ok(raw)
    }

    /// Applies `section.key=value`, replacing any value from the file.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (path, value) = assignment.split_once('=').ok_or_else(|| {
            err(
                None,
                Some(assignment),
                "override must be `section.key=value`",
            )
        })?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| err(None, Some(path), "override must name `section.key`"))?;
        if !known(section, key) {
            return Err(err(None, Some(path.trim()), "unknown key"));
        }
        self.entries.insert(
            (section.to_owned(), key.to_owned()),
            Entry {
                line: None,
                value: value.trim().to_owned(),
            },
        );
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_owned(), key.to_owned()))
    }

    fn present_in<'a>(
        &'a self,
        section: &'a str,
    ) -> impl Iterator<Item = (&'a str, &'a Entry)> + 'a {
        self.entries
            .iter()
            .filter(move |((s, _), _)| s == section)
            .map(|((_, k), e)| (k.as_str(), e))
    }

    fn real(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => parse_real(&e.value).map(Some).ok_or_else(|| {
                err(
                    e.line,
                    Some(key),
                    format!("not a real number: `{}`", e.value),
                )
            }),
        }
    }

    fn required_real(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.real(section, key)?
            .ok_or_else(|| err(None, Some(key), format!("missing in [{section}]")))
    }

    fn list<T>(
        &self,
        section: &str,
        key: &str,
        item: impl Fn(&str) -> Option<T>,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        let trimmed = e.value.trim_start_matches('[').trim_end_matches(']');
        trimmed
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| item(s).ok_or_else(|| err(e.line, Some(key), format!("invalid entry `{s}`"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// Validates the table. `env_tolerance` replaces the built-in default
    /// equality tolerance when the file does not set one.
    pub fn into_config(self, env_tolerance: Option<f64>) -> Result<ExperimentConfig, ConfigError> {
        let geometry = self.geometry()?;
        let r0 = self.required_real("surface", "r0")?;
        let surface = match geometry {
            GeometrySpec::WeightedInterval { .. } => SurfaceSpec::LevelPoint { r0 },
            _ => SurfaceSpec::GeodesicSphere { r0 },
        };
        let line = self.get("surface", "r0").and_then(|e| e.line);
        surface
            .validate(&geometry)
            .map_err(|e| err(line, Some("r0"), e.to_string()))?;

        let mut checks = self
            .list("checks", "run", Check::parse)?
            .unwrap_or_default();
        checks.sort();
        checks.dedup();
        let t_values = self
            .list("checks", "t_values", parse_real)?
            .unwrap_or_default();
        if let Some(bad) = t_values.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(err(
                None,
                Some("t_values"),
                format!("tube radii must be positive, got {bad}"),
            ));
        }
        let expect = self
            .list("checks", "expect", Expectation::parse)?
            .unwrap_or_default();
        if expect.contains(&Expectation::Rigid) && expect.contains(&Expectation::NotRigid)
            || expect.contains(&Expectation::Equality) && expect.contains(&Expectation::Strict)
        {
            return Err(err(None, Some("expect"), "contradictory expectations"));
        }

        let tolerance = match self.real("tolerances", "equality")? {
            Some(t) => t,
            None => env_tolerance.unwrap_or(DEFAULT_EQUALITY_TOLERANCE),
        };
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(err(
                None,
                Some("equality"),
                format!("tolerance must be positive, got {tolerance}"),
            ));
        }
        let grid = match self.get("tolerances", "grid") {
            None => 32,
            Some(e) => e
                .value
                .parse::<usize>()
                .ok()
                .filter(|&g| g >= 3)
                .ok_or_else(|| err(e.line, Some("grid"), "grid must be an integer >= 3"))?,
        };
        let format = match self.get("output", "format") {
            None => Format::Report,
            Some(e) => Format::parse(&e.value)
                .ok_or_else(|| err(e.line, Some("format"), "expected report, csv or plotdata"))?,
        };
        let path = self
            .get("output", "path")
            .map(|e| e.value.as_str())
            .filter(|p| !p.is_empty() && *p != "-")
            .map(PathBuf::from);

        Ok(ExperimentConfig {
            geometry,
            surface,
            checks,
            t_values,
            h0: self.real("checks", "h0")?,
            epsilons: self.list("checks", "epsilons", parse_real)?,
            expect,
            tolerance,
            grid,
            format,
            path,
        })
    }

    fn geometry(&self) -> Result<GeometrySpec, ConfigError> {
        let kind = self
            .get("geometry", "kind")
            .ok_or_else(|| err(None, Some("kind"), "missing in [geometry]"))?;
        let allowed: &[&str] = match kind.value.as_str() {
            "round-sphere" | "euclidean-ball" => &["kind", "n", "radius"],
            "model-interval" => &["kind", "K", "N"],
            "truncated-interval" => &["kind", "K", "N", "length"],
            "spherical-suspension" => &["kind", "K", "N", "base_volume"],
            other => {
                return Err(err(
                    kind.line,
                    Some("kind"),
                    format!("unknown geometry `{other}`"),
                ))
            }
        };
        for (key, e) in self.present_in("geometry") {
            if !allowed.contains(&key) {
                return Err(err(
                    e.line,
                    Some(key),
                    format!("not a parameter of {}", kind.value),
                ));
            }
        }
        let fail = |e: needlecomp::Error| err(kind.line, Some("kind"), e.to_string());
        let dimension = || -> Result<u32, ConfigError> {
            let n = self.required_real("geometry", "n")?;
            if n.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&n) {
                return Err(err(
                    None,
                    Some("n"),
                    format!("expected a positive integer, got {n}"),
                ));
            }
            Ok(n as u32)
        };
        let cd = || -> Result<CurvatureDimension, ConfigError> {
            CurvatureDimension::new(
                self.required_real("geometry", "K")?,
                self.required_real("geometry", "N")?,
            )
            .map_err(fail)
        };
        match kind.value.as_str() {
            "round-sphere" => {
                GeometrySpec::round_sphere(dimension()?, self.required_real("geometry", "radius")?)
                    .map_err(fail)
            }
            "euclidean-ball" => GeometrySpec::euclidean_ball(
                dimension()?,
                self.required_real("geometry", "radius")?,
            )
            .map_err(fail),
            "model-interval" => GeometrySpec::model_interval(cd()?).map_err(fail),
            "truncated-interval" => GeometrySpec::truncated_model_interval(
                cd()?,
                self.required_real("geometry", "length")?,
            )
            .map_err(fail),
            _ => GeometrySpec::spherical_suspension(
                cd()?,
                self.required_real("geometry", "base_volume")?,
            )
            .map_err(fail),
        }
    }
}

/// Decimal reals plus the constants `pi`, `pi/q` and `p*pi/q`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(p) => p.trim().trim_end_matches('*').trim().parse::<f64>().ok()?,
        None => return None,
    };
    Some(factor * std::f64::consts::PI / den)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    RawConfig::parse(text)?.into_config(None)
}

/// Reads [`TOLERANCE_ENV`], if set.
pub fn env_tolerance() -> Result<Option<f64>, ConfigError> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => parse_real(&v)
            .filter(|t| *t > 0.0 && t.is_finite())
            .map(Some)
            .ok_or_else(|| {
                err(
                    None,
                    Some(TOLERANCE_ENV),
                    format!("not a positive real: `{v}`"),
                )
            }),
        Err(_) => Ok(None),
    }
}
