use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ahnls::brackets::BracketOptions;
use ahnls::dirac::{Potential, PotentialKind};
use ahnls::quad::QuadOptions;
use ahnls::weyl::{WeylOptions, CUT_FLOOR};
use ahnls::Complex64;
use serde::Deserialize;

use crate::error::ConfigError;

/// Declarative potential description, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Constant {
        value: [f64; 2],
    },
    Gaussian {
        amplitude: [f64; 2],
        center: f64,
        width: f64,
        tail_bound: Option<f64>,
    },
    CompactBump {
        amplitude: [f64; 2],
        center: f64,
        radius: f64,
    },
    /// Inline `(x, re ψ, im ψ)` rows.
    Tabulated {
        rows: Vec<[f64; 3]>,
    },
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential, ConfigError> {
        if let PotentialSpec::Constant { value } = self {
            if !(value[0].is_finite() && value[1].is_finite()) {
                return Err(ahnls::Error::InvalidPotential("constant value must be finite".into()).into());
            }
        }
        Ok(match self {
            PotentialSpec::Zero => Potential::zero(),
            PotentialSpec::Constant { value } => Potential::constant(complex(*value)),
            PotentialSpec::Gaussian { amplitude, center, width, tail_bound: None } => {
                Potential::gaussian(complex(*amplitude), *center, *width)?
            }
            PotentialSpec::Gaussian { amplitude, center, width, tail_bound: Some(t) } => {
                Potential::gaussian_with_tail(complex(*amplitude), *center, *width, *t)?
            }
            PotentialSpec::CompactBump { amplitude, center, radius } => {
                Potential::compact_bump(complex(*amplitude), *center, *radius)?
            }
            PotentialSpec::Tabulated { rows } => tabulated_from_rows(rows)?,
        })
    }

    /// Short identifier used in report rows.
    pub fn id(&self) -> String {
        match self {
            PotentialSpec::Zero => "zero".into(),
            PotentialSpec::Constant { value } => format!("constant({})", complex(*value)),
            PotentialSpec::Gaussian { amplitude, center, width, .. } => {
                format!("gaussian({},{center},{width})", complex(*amplitude))
            }
            PotentialSpec::CompactBump { amplitude, center, radius } => {
                format!("compact-bump({},{center},{radius})", complex(*amplitude))
            }
            PotentialSpec::Tabulated { rows } => format!("tabulated({} rows)", rows.len()),
        }
    }
}

pub fn tabulated_from_rows(rows: &[[f64; 3]]) -> Result<Potential, ConfigError> {
    let grid = rows.iter().map(|r| r[0]).collect();
    let values = rows.iter().map(|r| Complex64::new(r[1], r[2])).collect();
    Ok(Potential::tabulated(grid, values)?)
}

/// Point where `|ψ|` peaks; suites that probe local behavior sit there.
pub fn peak(p: &Potential) -> f64 {
    match p.kind() {
        PotentialKind::Zero | PotentialKind::Constant(_) => 0.0,
        PotentialKind::GaussianBump { center, .. } | PotentialKind::CompactBump { center, .. } => *center,
        PotentialKind::Tabulated(s) => {
            s.grid()
                .iter()
                .zip(s.values())
                .fold((s.grid()[0], -1.0), |best, (x, v)| if v.norm() > best.1 { (*x, v.norm()) } else { best })
                .0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    AhcoreAlgebra,
    TransitionSymmetries,
    WeylIdentities,
    Theorem41,
    Gradients,
    Lemma42,
    Lemma45,
    Reality,
    Theorem44Delta,
    AsymptoticSeries,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::AhcoreAlgebra,
        Suite::TransitionSymmetries,
        Suite::WeylIdentities,
        Suite::Theorem41,
        Suite::Gradients,
        Suite::Lemma42,
        Suite::Lemma45,
        Suite::Reality,
        Suite::Theorem44Delta,
        Suite::AsymptoticSeries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AhcoreAlgebra => "ahcore-algebra",
            Suite::TransitionSymmetries => "transition-symmetries",
            Suite::WeylIdentities => "weyl-identities",
            Suite::Theorem41 => "theorem41",
            Suite::Gradients => "gradients",
            Suite::Lemma42 => "lemma42",
            Suite::Lemma45 => "lemma45",
            Suite::Reality => "reality",
            Suite::Theorem44Delta => "theorem44-delta",
            Suite::AsymptoticSeries => "asymptotic-series",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| ConfigError::UnknownSuite(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Rectangle of spectral parameters, kept off the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub counts: [usize; 2],
}

pub const MAX_GRID_POINTS: usize = 1_000_000;

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { re: [-1.0, 1.0], im: [0.5, 2.0], counts: [5, 4] }
    }
}

fn ladder(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range[0]];
    }
    (0..n).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64).collect()
}

impl LambdaGrid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let all = [self.re[0], self.re[1], self.im[0], self.im[1]];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::Grid("bounds must be finite".into()));
        }
        if self.counts[0] == 0 || self.counts[1] == 0 {
            return Err(ConfigError::Grid("counts must be positive".into()));
        }
        if self.counts[0].saturating_mul(self.counts[1]) > MAX_GRID_POINTS {
            return Err(ConfigError::Grid(format!("more than {MAX_GRID_POINTS} grid points")));
        }
        let (lo, hi) = (self.im[0].min(self.im[1]), self.im[0].max(self.im[1]));
        if !(lo >= CUT_FLOOR || hi <= -CUT_FLOOR) {
            return Err(ConfigError::Grid(format!(
                "imaginary range [{lo}, {hi}] meets the strip |Im λ| < {CUT_FLOOR}"
            )));
        }
        Ok(())
    }

    /// Grid points in row-major order (real part varies fastest).
    pub fn points(&self) -> Vec<Complex64> {
        let res = ladder(self.re, self.counts[0]);
        ladder(self.im, self.counts[1])
            .into_iter()
            .flat_map(|im| res.iter().map(move |re| Complex64::new(*re, im)))
            .collect()
    }
}

/// Named numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub transition: f64,
    pub weyl: f64,
    pub quad_abs: f64,
    pub quad_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { transition: 1e-10, weyl: 1e-12, quad_abs: 1e-13, quad_rel: 1e-10 }
    }
}

impl Tolerances {
    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<Self, ConfigError> {
        let mut t = Self::default();
        for (name, &value) in map {
            let slot = match name.as_str() {
                "transition" => &mut t.transition,
                "weyl" => &mut t.weyl,
                "quad_abs" => &mut t.quad_abs,
                "quad_rel" => &mut t.quad_rel,
                _ => return Err(ConfigError::UnknownTolerance(name.clone())),
            };
            if !(value > 0.0) || !value.is_finite() {
                return Err(ConfigError::NonPositiveTolerance { name: name.clone(), value });
            }
            *slot = value;
        }
        Ok(t)
    }

    pub fn weyl_options(&self) -> WeylOptions {
        WeylOptions::riccati_only(self.weyl)
    }

    pub fn bracket_options(&self) -> BracketOptions {
        BracketOptions {
            weyl: self.weyl_options(),
            quad: QuadOptions { abs_tol: self.quad_abs, rel_tol: self.quad_rel, ..QuadOptions::default() },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    potential: PotentialSpec,
    #[serde(default)]
    suites: Vec<String>,
    #[serde(default)]
    grid: Option<LambdaGrid>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    format: Option<Format>,
    base_point: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub suites: Vec<Suite>,
    pub grid: LambdaGrid,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: Format,
    /// Base point `y` for scans.
    pub base_point: f64,
}

impl RunConfig {
    pub fn new(potential: PotentialSpec, suites: Vec<Suite>, seed: u64) -> Self {
        Self {
            potential,
            suites,
            grid: LambdaGrid::default(),
            tolerances: Tolerances::default(),
            seed,
            output_dir: PathBuf::from("out"),
            format: Format::Both,
            base_point: 0.0,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_seed(text, None)
    }

    /// Parses a TOML document; `seed` takes precedence over the file's value.
    pub fn parse_with_seed(text: &str, seed: Option<u64>) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let suites = raw.suites.iter().map(|s| s.parse()).collect::<Result<Vec<Suite>, _>>()?;
        let config = Self {
            potential: raw.potential,
            suites,
            grid: raw.grid.unwrap_or_default(),
            tolerances: Tolerances::from_map(&raw.tolerances)?,
            seed: seed.or(raw.seed).ok_or(ConfigError::MissingSeed)?,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            format: raw.format.unwrap_or(Format::Both),
            base_point: raw.base_point.unwrap_or(0.0),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse_with_seed(&text, seed)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        self.potential.build()?;
        if !self.base_point.is_finite() {
            return Err(ConfigError::Parse("base_point must be finite".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 17
suites = ["ahcore-algebra", "theorem41"]
format = "csv"

[potential]
kind = "compact-bump"
amplitude = [1.0, 0.0]
center = 0.0
radius = 2.0

[grid]
re = [-1.0, 1.0]
im = [-2.0, -0.5]
counts = [3, 2]

[tolerances]
weyl = 1e-11
"#;

    #[test]
    fn parses_sample() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.seed, 17);
        assert_eq!(c.suites, vec![Suite::AhcoreAlgebra, Suite::Theorem41]);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.tolerances.weyl, 1e-11);
        assert_eq!(c.grid.points().len(), 6);
        assert_eq!(c.potential.id(), "compact-bump(1+0i,0,2)");
    }

    #[test]
    fn seed_override_and_missing_seed() {
        assert_eq!(RunConfig::parse_with_seed(SAMPLE, Some(3)).unwrap().seed, 3);
        let text = "[potential]\nkind = \"zero\"\n";
        assert!(matches!(RunConfig::parse(text), Err(ConfigError::MissingSeed)));
        assert!(RunConfig::parse_with_seed(text, Some(1)).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let unknown = SAMPLE.replace("\"theorem41\"", "\"foo\"");
        assert!(matches!(RunConfig::parse(&unknown), Err(ConfigError::UnknownSuite(s)) if s == "foo"));
        let negative = SAMPLE.replace("weyl = 1e-11", "weyl = -1.0");
        assert!(matches!(RunConfig::parse(&negative), Err(ConfigError::NonPositiveTolerance { .. })));
        let cut = SAMPLE.replace("im = [-2.0, -0.5]", "im = [-2.0, 0.5]");
        assert!(matches!(RunConfig::parse(&cut), Err(ConfigError::Grid(_))));
        let bad_kind = SAMPLE.replace("compact-bump", "square");
        assert!(matches!(RunConfig::parse(&bad_kind), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn inline_tabulated_rows() {
        let text = r#"
seed = 1
[potential]
kind = "tabulated"
rows = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.5], [0.5, 0.3, 0.0], [1.0, 0.0, 0.0]]
"#;
        let c = RunConfig::parse(text).unwrap();
        let p = c.potential.build().unwrap();
        assert_eq!(peak(&p), 0.0);
        let unsorted = text.replace("[0.5, 0.3, 0.0]", "[-0.5, 0.3, 0.0]");
        assert!(matches!(RunConfig::parse(&unsorted), Err(ConfigError::Potential(_))));
    }

    #[test]
    fn grid_points_are_row_major() {
        let g = LambdaGrid { re: [0.0, 1.0], im: [1.0, 2.0], counts: [2, 2] };
        let pts = g.points();
        assert_eq!(pts[1], Complex64::new(1.0, 1.0));
        assert_eq!(pts[2], Complex64::new(0.0, 2.0));
    }
}
