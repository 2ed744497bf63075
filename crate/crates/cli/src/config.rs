//! Run configuration: `[run]` and `[tolerances]` sections of a config file,
//! overridden by command-line flags, with `NODALDIV_OUT` overriding the
//! output directory last.

use std::path::{Path, PathBuf};

use nodaldiv::textconf;

use crate::error::CliError;

pub const DEFAULT_OUT: &str = "nodaldiv-out";
pub const OUT_ENV: &str = "NODALDIV_OUT";

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    Spec(PathBuf),
    Mesh(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Option<Source>,
    /// `None` defers to the spec file, or 0.
    pub level: Option<u32>,
    pub rho0: f64,
    /// `None` defers to the spec file, or 8 for presets.
    pub collar_rings: Option<usize>,
    pub margin: f64,
    pub smooth: bool,
    pub eigen_tol: Option<f64>,
    pub samples: usize,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: None,
            level: None,
            rho0: 0.2,
            collar_rings: None,
            margin: 0.05,
            smooth: false,
            eigen_tol: None,
            samples: nodaldiv::verify::DEFAULT_SAMPLES,
            out: PathBuf::from(DEFAULT_OUT),
            seed: nodaldiv::verify::DEFAULT_SEED,
        }
    }
}

/// Values given on the command line; `None` keeps the config value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub spec: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
    pub level: Option<u32>,
    pub rho0: Option<f64>,
    pub collar_rings: Option<usize>,
    pub margin: Option<f64>,
    pub smooth: bool,
    pub eigen_tol: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: bad value '{value}' for {key}")))
}

impl RunConfig {
    /// Parses a config file. Relative paths are taken relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let sections = textconf::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = RunConfig::default();
        let mut sources = Vec::new();
        for sec in &sections {
            for e in &sec.entries {
                let (k, v, line) = (e.key.as_str(), e.value.as_str(), e.line);
                match (sec.name.as_str(), k) {
                    ("run", "preset") => sources.push(Source::Preset(v.to_string())),
                    ("run", "spec") => sources.push(Source::Spec(base.join(v))),
                    ("run", "mesh") => sources.push(Source::Mesh(base.join(v))),
                    ("run", "level") => cfg.level = Some(parse_value(k, v, line)?),
                    ("run", "rho0") => cfg.rho0 = parse_value(k, v, line)?,
                    ("run", "collar_rings") => cfg.collar_rings = Some(parse_value(k, v, line)?),
                    ("run", "margin") => cfg.margin = parse_value(k, v, line)?,
                    ("run", "smooth") => cfg.smooth = parse_value(k, v, line)?,
                    ("run", "out") => cfg.out = base.join(v),
                    ("run", "seed") => cfg.seed = parse_value(k, v, line)?,
                    ("run", "samples") => cfg.samples = parse_value(k, v, line)?,
                    ("tolerances", "eigen") => cfg.eigen_tol = Some(parse_value(k, v, line)?),
                    ("", _) if sec.entries.is_empty() => {}
                    (s, k) => {
                        let s = if s.is_empty() { "top level".to_string() } else { format!("[{s}]") };
                        return Err(CliError::Config(format!("line {line}: unknown key '{k}' in {s}")));
                    }
                }
            }
            if !matches!(sec.name.as_str(), "" | "run" | "tolerances") {
                return Err(CliError::Config(format!("line {}: unknown section [{}]", sec.line, sec.name)));
            }
        }
        if sources.len() > 1 {
            return Err(CliError::Config("give only one of preset, spec and mesh".into()));
        }
        cfg.source = sources.pop();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies flags, then the environment override of the output
    /// directory, then validates.
    pub fn apply(mut self, o: &Overrides, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        let flag_sources = [
            o.preset.clone().map(Source::Preset),
            o.spec.clone().map(Source::Spec),
            o.mesh.clone().map(Source::Mesh),
        ];
        let mut given: Vec<Source> = flag_sources.into_iter().flatten().collect();
        if given.len() > 1 {
            return Err(CliError::Config("give only one of --preset, --spec and --mesh".into()));
        }
        if let Some(s) = given.pop() {
            self.source = Some(s);
        }
        self.level = o.level.or(self.level);
        self.rho0 = o.rho0.unwrap_or(self.rho0);
        self.collar_rings = o.collar_rings.or(self.collar_rings);
        self.margin = o.margin.unwrap_or(self.margin);
        self.smooth |= o.smooth;
        self.eigen_tol = o.eigen_tol.or(self.eigen_tol);
        self.samples = o.samples.unwrap_or(self.samples);
        self.seed = o.seed.unwrap_or(self.seed);
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(out) = env_out {
            self.out = out;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad("rho0 must be positive");
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return bad("margin must lie in (0, 1)");
        }
        if self.level.is_some_and(|l| l > nodaldiv::mesh::MAX_LEVEL) {
            return bad(&format!("level must be at most {}", nodaldiv::mesh::MAX_LEVEL));
        }
        if self.collar_rings.is_some_and(|r| r < 4) {
            return bad("collar_rings must be at least 4");
        }
        if self.samples == 0 {
            return bad("samples must be positive");
        }
        if self.eigen_tol.is_some_and(|t| !(t > 0.0)) {
            return bad("eigen tolerance must be positive");
        }
        Ok(())
    }
}

/// Inclusive level range `a..b`.
pub fn parse_levels(s: &str) -> Result<std::ops::RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected 'a..b', got '{s}'"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad level '{a}'"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad level '{b}'"))?;
    if a > b {
        return Err(format!("empty level range '{s}'"));
    }
    Ok(a..=b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_sections_and_defaults() {
        let cfg = RunConfig::parse(
            "[run]\npreset = torus-two-meridians\nlevel = 1\nsmooth = true\nout = runs/t\n[tolerances]\neigen = 0.3\n",
            Path::new("/base"),
        )
        .unwrap();
        assert_eq!(cfg.source, Some(Source::Preset("torus-two-meridians".into())));
        assert_eq!(cfg.level, Some(1));
        assert!(cfg.smooth);
        assert_eq!(cfg.out, PathBuf::from("/base/runs/t"));
        assert_eq!(cfg.eigen_tol, Some(0.3));
        assert_eq!(cfg.rho0, 0.2);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        for text in ["[run]\nfoo = 1\n", "[other]\nx = 1\n", "level = 1\n", "[run]\nrho0 = -1\n"] {
            assert!(RunConfig::parse(text, Path::new(".")).is_err(), "{text}");
        }
    }

    #[test]
    fn flags_then_environment_win() {
        let cfg = RunConfig::parse("[run]\npreset = sphere-equator\nout = a\n", Path::new("")).unwrap();
        let o = Overrides { mesh: Some("m.off".into()), out: Some("b".into()), rho0: Some(0.1), ..Default::default() };
        let c = cfg.clone().apply(&o, None).unwrap();
        assert_eq!(c.source, Some(Source::Mesh("m.off".into())));
        assert_eq!(c.out, PathBuf::from("b"));
        assert_eq!(c.rho0, 0.1);
        let c = cfg.apply(&o, Some("c".into())).unwrap();
        assert_eq!(c.out, PathBuf::from("c"));
    }

    #[test]
    fn level_ranges_are_inclusive() {
        assert_eq!(parse_levels("0..2").unwrap(), 0..=2);
        assert!(parse_levels("2..1").is_err());
        assert!(parse_levels("3").is_err());
    }
}
