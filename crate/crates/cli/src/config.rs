//! Experiment configuration: a TOML file with `[instance]`, `[solver]` and
//! `[experiment]` sections. Every field is optional.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use nexus_opt_core::indicators::HvMethod;
use nexus_opt_core::nexus::ResourceTopology;
use nexus_opt_core::solvers::{SolverConfig, Variant};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceConfig,
    pub solver: SolverSection,
    pub experiment: ExperimentSection,
}

/// Resource counts: water, energy, food sources and demand sinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceConfig {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub epsilon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub variants: Vec<String>,
    pub population: usize,
    pub budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisions: Option<usize>,
    pub split: f64,
    pub perturbations: usize,
    pub ridge: f64,
    pub target_sigma: f64,
    pub archive_factor: usize,
    pub dva_fraction: f64,
    pub dva_sample: usize,
    pub trace_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub runs: usize,
    pub seed: u64,
    /// Two-sided significance level of the rank-sum markers.
    pub level: f64,
    pub hv: HvChoice,
    pub mc_samples: usize,
    /// Column the markers compare against.
    pub champion: String,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Also persist final-front decision vectors.
    pub save_decisions: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HvChoice {
    /// Exact for small fronts, Monte Carlo otherwise.
    #[default]
    Auto,
    Exact,
    Mc,
}

impl HvChoice {
    pub fn name(self) -> &'static str {
        match self {
            HvChoice::Auto => "auto",
            HvChoice::Exact => "exact",
            HvChoice::Mc => "mc",
        }
    }

    pub fn method(self, samples: usize, seed: u64) -> HvMethod {
        match self {
            HvChoice::Auto => HvMethod::Auto { samples, seed },
            HvChoice::Exact => HvMethod::Exact,
            HvChoice::Mc => HvMethod::MonteCarlo { samples, seed },
        }
    }
}

impl Default for InstanceConfig {
    fn default() -> Self {
        let t = ResourceTopology::standard();
        Self {
            alpha: t.water(),
            beta: t.energy(),
            gamma: t.food(),
            epsilon: t.demand(),
        }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            variants: Variant::ALL.iter().map(|v| v.name().to_string()).collect(),
            population: d.population,
            budget: d.budget,
            divisions: d.divisions,
            split: d.split,
            perturbations: d.perturbations,
            ridge: d.ridge,
            target_sigma: d.target_sigma,
            archive_factor: d.archive_factor,
            dva_fraction: d.dva_fraction,
            dva_sample: d.dva_sample,
            trace_samples: d.trace_samples,
        }
    }
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            runs: 10,
            seed: 0,
            level: 0.05,
            hv: HvChoice::Auto,
            mc_samples: 100_000,
            champion: Variant::InverseModel.name().to_string(),
            out: PathBuf::from("results"),
            workers: None,
            save_decisions: false,
        }
    }
}

impl InstanceConfig {
    pub fn topology(&self) -> anyhow::Result<ResourceTopology> {
        ResourceTopology::new(self.alpha, self.beta, self.gamma, self.epsilon)
            .with_context(|| format!("invalid topology {self:?}"))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Self = toml::from_str(text)?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn variants(&self) -> anyhow::Result<Vec<Variant>> {
        self.solver
            .variants
            .iter()
            .map(|name| name.parse::<Variant>().map_err(anyhow::Error::from))
            .collect()
    }

    pub fn champion(&self) -> anyhow::Result<Variant> {
        Ok(self.experiment.champion.parse::<Variant>()?)
    }

    pub fn hv_method(&self) -> HvMethod {
        self.experiment
            .hv
            .method(self.experiment.mc_samples, self.experiment.seed)
    }

    /// Solver settings for one run of `variant`.
    pub fn solver_config(&self, variant: Variant, seed: u64) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            divisions: s.divisions,
            split: s.split,
            perturbations: s.perturbations,
            ridge: s.ridge,
            target_sigma: s.target_sigma,
            archive_factor: s.archive_factor,
            dva_fraction: s.dva_fraction,
            dva_sample: s.dva_sample,
            trace_samples: s.trace_samples,
            ..SolverConfig::new(variant, s.population, s.budget, seed)
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.instance.topology()?;
        let variants = self.variants()?;
        ensure!(!variants.is_empty(), "no variants selected");
        for (i, v) in variants.iter().enumerate() {
            if variants[..i].contains(v) {
                bail!("variant {} listed twice", v.name());
            }
        }
        self.champion()?;
        let e = &self.experiment;
        ensure!(e.runs >= 1, "run count must be at least 1");
        ensure!(
            e.level > 0.0 && e.level < 1.0,
            "significance level must lie in (0, 1), got {}",
            e.level
        );
        ensure!(e.mc_samples >= 1, "mc_samples must be at least 1");
        ensure!(e.workers != Some(0), "workers must be at least 1");
        e.seed
            .checked_add(e.runs as u64 - 1)
            .context("seed range overflows")?;
        self.solver_config(variants[0], e.seed).validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_standard_instance() {
        let c = ExperimentConfig::default();
        assert_eq!(c.instance.topology().unwrap(), ResourceTopology::standard());
        assert_eq!(c.solver.population, 70);
        assert_eq!(c.solver.budget, 50_000);
        assert_eq!(c.experiment.runs, 10);
        assert_eq!(c.variants().unwrap(), Variant::ALL.to_vec());
        assert_eq!(c.champion().unwrap(), Variant::InverseModel);
        c.validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = ExperimentConfig::parse(
            "[instance]\nalpha = 2\n[experiment]\nruns = 3\nhv = \"mc\"\n",
        )
        .unwrap();
        assert_eq!(c.instance.alpha, 2);
        assert_eq!(c.instance.beta, 7);
        assert_eq!(c.experiment.runs, 3);
        assert_eq!(c.experiment.hv, HvChoice::Mc);
        assert_eq!(c.solver.population, 70);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = ExperimentConfig::default();
        c.solver.divisions = Some(3);
        c.experiment.workers = Some(2);
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("[solver]\nbogus = 1\n").is_err());
        let bad = |edit: fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            edit(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.experiment.runs = 0));
        assert!(bad(|c| c.solver.variants = vec!["nsga2".into()]));
        assert!(bad(|c| c.solver.variants.clear()));
        assert!(bad(|c| c.solver.variants.push("ref_guided".into())));
        assert!(bad(|c| c.experiment.champion = "flea".into()));
        assert!(bad(|c| c.instance.gamma = 0));
        assert!(bad(|c| c.solver.population = 7));
        assert!(bad(|c| c.solver.budget = 10));
        assert!(bad(|c| c.experiment.level = 0.0));
    }
}
