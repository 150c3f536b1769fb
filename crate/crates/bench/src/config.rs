//! Experiment configuration: an INI-style file with `[instance]`,
//! `[solver]`, `[reference]` and `[output]` sections. Unknown sections and
//! keys are rejected so typos never silently fall back to defaults.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use apdpro::pagerank::{RadiusRule, Teleport};
use apdpro::solvers::{MetricIterate, SolverConfig, Variant};
use ini::Ini;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    Synthetic { center: Vec<f64>, level: f64 },
    Graph { path: PathBuf, alpha: f64, b: f64, teleport: Teleport, radius_rule: RadiusRule },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceMode {
    None,
    Oracle,
    LongRun,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpec {
    pub mode: ReferenceMode,
    /// KKT residual a long run must reach.
    pub kkt_tol: f64,
    pub max_iters: usize,
    pub cache: bool,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self { mode: ReferenceMode::None, kkt_tol: 1e-10, max_iters: 2_000_000, cache: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub stride: usize,
    pub truncation: f64,
}

/// Primary starting point; the dual start is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartPoint {
    /// The origin projected onto the ball.
    #[default]
    Origin,
    /// The ball center x̃.
    Center,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    /// The first entry is the `run` solver; `compare` runs them all.
    pub solvers: Vec<SolverConfig>,
    /// Early stop once the tracked residual drops to this value.
    pub tolerance: Option<f64>,
    /// `None` follows each variant's convention.
    pub metric_iterate: Option<MetricIterate>,
    pub start: StartPoint,
    pub reference: ReferenceSpec,
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn solver(&self) -> &SolverConfig {
        &self.solvers[0]
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        let mut sections = Sections { ini: &ini, used: HashSet::new() };
        for (name, props) in ini.iter() {
            match name {
                Some("instance" | "solver" | "reference" | "output") => {}
                None if props.is_empty() => {}
                None => return Err(BenchError::Config("keys must sit inside a section".into())),
                Some(other) => return Err(BenchError::Config(format!("unknown section [{other}]"))),
            }
        }

        let instance = match sections.str("instance", "kind")?.as_deref().unwrap_or("synthetic") {
            "synthetic" => InstanceSpec::Synthetic {
                center: sections.list("instance", "center")?.unwrap_or_else(|| vec![2.0]),
                level: sections.num("instance", "level")?.unwrap_or(1.0),
            },
            "graph" => InstanceSpec::Graph {
                path: base.join(sections.required("instance", "graph")?),
                alpha: sections.num("instance", "alpha")?.ok_or_else(|| missing("instance", "alpha"))?,
                b: sections.num("instance", "b")?.ok_or_else(|| missing("instance", "b"))?,
                teleport: sections.str("instance", "teleport")?.as_deref().unwrap_or("uniform").parse()?,
                radius_rule: sections.str("instance", "r_rule")?.as_deref().unwrap_or("min_degree").parse()?,
            },
            other => return Err(BenchError::Config(format!("unknown instance kind '{other}'"))),
        };

        let variants: Vec<Variant> = match (sections.str("solver", "variant")?, sections.str("solver", "variants")?) {
            (Some(_), Some(_)) => {
                return Err(BenchError::Config("give either solver.variant or solver.variants".into()));
            }
            (Some(v), None) => vec![v.parse()?],
            (None, Some(list)) => list.split(',').map(|v| v.trim().parse()).collect::<apdpro::Result<_>>()?,
            (None, None) => vec![Variant::Apdpro],
        };
        if variants.is_empty() {
            return Err(BenchError::Config("solver list is empty".into()));
        }
        let mut template = SolverConfig::new(variants[0]);
        template.tau0 = sections.num("solver", "tau0")?;
        template.sigma0 = sections.num("solver", "sigma0")?;
        if let Some(v) = sections.num("solver", "rho0")? {
            template.rho0 = v;
        }
        if let Some(v) = sections.parsed::<bool>("solver", "estimator")? {
            template.estimator = v;
        }
        if let Some(v) = sections.parsed::<usize>("solver", "max_iters")? {
            template.max_iters = v;
        }
        if let Some(v) = sections.parsed::<usize>("solver", "max_epochs")? {
            template.max_epochs = v;
        }
        if let Some(v) = sections.num("solver", "nu0")? {
            template.nu0 = v;
        }
        if let Some(v) = sections.num("solver", "delta")? {
            template.delta = v;
        }
        template.restart_period = sections.parsed("solver", "restart_period")?;
        template.forced_stage_iters = sections.parsed("solver", "forced_stage_iters")?;
        let tolerance = sections.num("solver", "tolerance")?;
        let metric_iterate = match sections.str("solver", "metric_iterate")?.as_deref() {
            None | Some("default") => None,
            Some("last") => Some(MetricIterate::Last),
            Some("ergodic") => Some(MetricIterate::Ergodic),
            Some(other) => return Err(BenchError::Config(format!("unknown metric_iterate '{other}'"))),
        };
        let start = match sections.str("solver", "start")?.as_deref() {
            None | Some("origin") => StartPoint::Origin,
            Some("center") => StartPoint::Center,
            Some(other) => return Err(BenchError::Config(format!("unknown start '{other}'"))),
        };
        let solvers = variants.into_iter().map(|variant| SolverConfig { variant, ..template.clone() }).collect();

        let mode = match sections.str("reference", "mode")?.as_deref() {
            None | Some("none") => ReferenceMode::None,
            Some("oracle") => ReferenceMode::Oracle,
            Some("long-run") => ReferenceMode::LongRun,
            Some("file") => ReferenceMode::File(base.join(sections.required("reference", "path")?)),
            Some(other) => return Err(BenchError::Config(format!("unknown reference mode '{other}'"))),
        };
        let mut reference = ReferenceSpec { mode, ..ReferenceSpec::default() };
        if let Some(v) = sections.num("reference", "kkt_tol")? {
            reference.kkt_tol = v;
        }
        if let Some(v) = sections.parsed::<usize>("reference", "max_iters")? {
            reference.max_iters = v;
        }
        if let Some(v) = sections.parsed::<bool>("reference", "cache")? {
            reference.cache = v;
        }

        let output = OutputSpec {
            path: base.join(sections.str("output", "path")?.unwrap_or_else(|| "trace.csv".into())),
            stride: sections.parsed("output", "stride")?.unwrap_or(1),
            truncation: sections.num("output", "truncation")?.unwrap_or(1e-8),
        };
        if output.stride == 0 {
            return Err(BenchError::Config("output.stride must be positive".into()));
        }
        if !(output.truncation > 0.0) {
            return Err(BenchError::Config("output.truncation must be positive".into()));
        }

        sections.reject_unused()?;
        Ok(Self { instance, solvers, tolerance, metric_iterate, start, reference, output })
    }
}

fn missing(section: &str, key: &str) -> BenchError {
    BenchError::Config(format!("missing {section}.{key}"))
}

/// Typed lookups that remember which keys were read.
struct Sections<'a> {
    ini: &'a Ini,
    used: HashSet<(String, String)>,
}

impl Sections<'_> {
    fn str(&mut self, section: &str, key: &str) -> Result<Option<String>> {
        self.used.insert((section.into(), key.into()));
        Ok(self.ini.section(Some(section)).and_then(|s| s.get(key)).map(|v| v.trim().to_string()))
    }

    fn required(&mut self, section: &str, key: &str) -> Result<String> {
        self.str(section, key)?.ok_or_else(|| missing(section, key))
    }

    fn parsed<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Result<Option<T>> {
        match self.str(section, key)? {
            None => Ok(None),
            Some(v) => {
                v.parse().map(Some).map_err(|_| BenchError::Config(format!("{section}.{key}: cannot parse '{v}'")))
            }
        }
    }

    fn num(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        self.parsed(section, key)
    }

    fn list(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.str(section, key)? {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|w| w.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| BenchError::Config(format!("{section}.{key}: cannot parse '{v}'"))),
        }
    }

    fn reject_unused(&self) -> Result<()> {
        for (name, props) in self.ini.iter() {
            let Some(name) = name else { continue };
            for (key, _) in props.iter() {
                if !self.used.contains(&(name.to_string(), key.to_string())) {
                    return Err(BenchError::Config(format!("unknown key {name}.{key}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_defaults() {
        let c = ExperimentConfig::parse("[solver]\nvariant = rapdpro\nmax_iters = 50\n", Path::new("/tmp")).unwrap();
        assert_eq!(c.instance, InstanceSpec::Synthetic { center: vec![2.0], level: 1.0 });
        assert_eq!(c.solver().variant, Variant::Rapdpro);
        assert_eq!(c.solver().max_iters, 50);
        assert_eq!(c.output.path, Path::new("/tmp/trace.csv"));
        assert_eq!(c.output.stride, 1);
        assert_eq!(c.output.truncation, 1e-8);
        assert_eq!(c.start, StartPoint::Origin);
        let c = ExperimentConfig::parse("[solver]\nstart = center\n", Path::new("/tmp")).unwrap();
        assert_eq!(c.start, StartPoint::Center);
        assert!(ExperimentConfig::parse("[solver]\nstart = left\n", Path::new("/tmp")).is_err());
    }

    #[test]
    fn graph_instance_parameters() {
        let text = "[instance]\nkind = graph\ngraph = bio-CE-HT.txt\nalpha = 0.4\nb = -0.04\nteleport = seed:0\n\
                    [solver]\nvariants = apdpro, apd\n[reference]\nmode = long-run\n[output]\npath = out/run.csv\nstride = 10\n";
        let c = ExperimentConfig::parse(text, Path::new("/data")).unwrap();
        match &c.instance {
            InstanceSpec::Graph { path, alpha, b, teleport, radius_rule } => {
                assert_eq!(path, Path::new("/data/bio-CE-HT.txt"));
                assert_eq!((*alpha, *b), (0.4, -0.04));
                assert_eq!(teleport, &Teleport::Seeds(vec![0]));
                assert_eq!(*radius_rule, RadiusRule::MinDegree);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.solvers.len(), 2);
        assert_eq!(c.reference.mode, ReferenceMode::LongRun);
        assert_eq!(c.output.stride, 10);
    }

    #[test]
    fn unknown_keys_and_sections_rejected() {
        let base = Path::new(".");
        assert!(
            matches!(ExperimentConfig::parse("[solver]\nvarient = apd\n", base), Err(BenchError::Config(m)) if m.contains("varient"))
        );
        assert!(ExperimentConfig::parse("[extra]\na = 1\n", base).is_err());
        assert!(ExperimentConfig::parse("[solver]\nvariant = nope\n", base).is_err());
        assert!(ExperimentConfig::parse("[solver]\nmax_iters = many\n", base).is_err());
        assert!(ExperimentConfig::parse("[output]\nstride = 0\n", base).is_err());
        assert!(ExperimentConfig::parse("[instance]\nkind = graph\n", base).is_err());
    }
}
