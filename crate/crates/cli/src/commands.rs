use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use nexus_opt_core::indicators::{normalized_hv, HvMethod, ReferenceBox, EXACT_MAX_POINTS};
use nexus_opt_core::nexus::{decision_dim, NexusProblem, NUM_OBJECTIVES};
use nexus_opt_core::solvers::{run, RunResult, Variant};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, HvChoice};
use crate::io::{
    decisions_csv, front_csv, front_with_decisions_csv, read_front, read_matrix, trace_csv,
    write_atomic, BoxRecord, HvRecord, Manifest, RunRecord, SUMMARY_FILE,
};
use crate::report::{Column, Table, PROBLEM_NAME};

pub const WORKERS_ENV: &str = "NEXUS_OPT_WORKERS";

/// Machine-readable summary written next to `summary.md`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Parallel run limit: the configured worker count (default: available
/// cores), capped by `NEXUS_OPT_WORKERS` when set.
pub fn worker_limit(configured: Option<usize>) -> anyhow::Result<usize> {
    let mut workers = configured.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        let cap: usize = raw
            .trim()
            .parse()
            .with_context(|| format!("{WORKERS_ENV}={raw:?} is not a positive integer"))?;
        ensure!(cap >= 1, "{WORKERS_ENV} must be at least 1");
        workers = workers.min(cap);
    }
    Ok(workers.max(1))
}

fn pool(workers: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

fn check_exact(method: HvMethod, fronts: &[&[Vec<f64>]]) -> anyhow::Result<()> {
    if method == HvMethod::Exact {
        if let Some(big) = fronts.iter().map(|f| f.len()).max().filter(|&n| n > EXACT_MAX_POINTS) {
            bail!(
                "exact hypervolume supports at most {EXACT_MAX_POINTS} points per front, \
                 found {big}; use --hv mc or --hv auto"
            );
        }
    }
    Ok(())
}

/// What `cmd_run` produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out: PathBuf,
    pub manifest: Manifest,
    pub table: Table,
}

fn run_dir_name(run: usize) -> String {
    format!("run_{run:03}")
}

/// Executes `runs` seeded runs per variant (seed = base seed + run index),
/// writing per-run fronts and traces, then the manifest and summary table.
pub fn cmd_run(config: &ExperimentConfig, format: Format) -> anyhow::Result<RunReport> {
    config.validate()?;
    let topology = config.instance.topology()?;
    let problem = NexusProblem::new(topology);
    let variants = config.variants()?;
    let out = config.experiment.out.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let jobs: Vec<(Variant, usize)> = variants
        .iter()
        .flat_map(|&v| (0..config.experiment.runs).map(move |r| (v, r)))
        .collect();
    let workers = worker_limit(config.experiment.workers)?;
    let pool = pool(workers)?;
    let total = jobs.len();

    let results: Vec<(RunResult, RunRecord)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(variant, r)| {
                let seed = config.experiment.seed + r as u64;
                let start = Instant::now();
                let mut result = run(&problem, &config.solver_config(variant, seed))
                    .with_context(|| format!("{} run {r}", variant.name()))?;
                let elapsed = start.elapsed();
                result.wall_time = Some(elapsed);
                let record = persist_run(&out, &result, r, config.experiment.save_decisions)?;
                eprintln!(
                    "{} run {r} (seed {seed}): {} evaluations, front {}, {:.2}s",
                    variant.name(),
                    result.evaluations,
                    result.front.len(),
                    elapsed.as_secs_f64()
                );
                Ok((result, record))
            })
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    eprintln!("{total} runs finished with {workers} worker(s)");

    let fronts: Vec<Vec<Vec<f64>>> = results
        .iter()
        .map(|(r, _)| r.front.iter().map(|i| i.objectives.clone()).collect())
        .collect();
    let bx = ReferenceBox::from_fronts(fronts.iter().map(Vec::as_slice))
        .context("every final front is empty")?;
    let method = config.hv_method();
    check_exact(method, &fronts.iter().map(Vec::as_slice).collect::<Vec<_>>())?;
    let hvs: Vec<f64> = pool.install(|| fronts.par_iter().map(|f| normalized_hv(f, &bx, method)).collect());

    let runs: Vec<RunRecord> = results
        .into_iter()
        .zip(hvs)
        .map(|((_, mut record), hv)| {
            record.hv = hv;
            record
        })
        .collect();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        problem: PROBLEM_NAME.to_string(),
        objectives: NUM_OBJECTIVES,
        dimension: decision_dim(&topology),
        config: config.clone(),
        reference_box: BoxRecord::from(&bx),
        hv: HvRecord {
            method: config.experiment.hv,
            samples: config.experiment.mc_samples,
            seed: config.experiment.seed,
        },
        runs,
    };
    manifest.write_dir(&out)?;

    let table = manifest_table(&manifest, Some(config.experiment.champion.as_str()), config.experiment.level);
    write_summary(&out, &table, &bx, format)?;
    Ok(RunReport {
        out,
        manifest,
        table,
    })
}

fn persist_run(out: &Path, result: &RunResult, run: usize, save_decisions: bool) -> anyhow::Result<RunRecord> {
    let variant_dir = PathBuf::from(result.variant.name());
    let stem = run_dir_name(run);
    let front_file = variant_dir.join(format!("{stem}_front.csv"));
    let trace_file = variant_dir.join(format!("{stem}_trace.csv"));
    let objectives: Vec<Vec<f64>> = result.front.iter().map(|i| i.objectives.clone()).collect();
    write_atomic(&out.join(&front_file), &front_csv(&objectives, NUM_OBJECTIVES)?)?;
    write_atomic(&out.join(&trace_file), &trace_csv(&result.trace)?)?;
    let decisions_file = if save_decisions {
        let file = variant_dir.join(format!("{stem}_decisions.csv"));
        let decisions: Vec<Vec<f64>> = result.front.iter().map(|i| i.decision.clone()).collect();
        let dim = result.front.first().map_or(0, |i| i.decision.len());
        write_atomic(&out.join(&file), &decisions_csv(&decisions, dim)?)?;
        Some(file)
    } else {
        None
    };
    Ok(RunRecord {
        variant: result.variant.name().to_string(),
        run,
        seed: result.seed,
        evaluations: result.evaluations,
        front_size: result.front.len(),
        hv: f64::NAN,
        front_file,
        trace_file,
        decisions_file,
        trace_box: BoxRecord::from(&result.trace_box),
        wall_time_s: result.wall_time.map_or(0.0, |d| d.as_secs_f64()),
    })
}

fn write_summary(out: &Path, table: &Table, bx: &ReferenceBox, format: Format) -> anyhow::Result<()> {
    let mut md = table.to_markdown();
    md.push_str(&format!(
        "\nHV normalized to [0, 1] in the box lower = {:?}, reference = {:?}.\n",
        bx.lower, bx.reference
    ));
    write_atomic(&out.join(SUMMARY_FILE), md.as_bytes())?;
    let machine = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    };
    write_atomic(&out.join(format!("summary.{}", format.extension())), &machine)
}

fn manifest_table(manifest: &Manifest, champion: Option<&str>, level: f64) -> Table {
    let columns: Vec<Column> = manifest
        .variants()
        .into_iter()
        .map(|v| Column {
            values: manifest.runs.iter().filter(|r| r.variant == v).map(|r| r.hv).collect(),
            label: v,
        })
        .collect();
    let champion = champion.and_then(|c| columns.iter().position(|col| col.label == c));
    Table::new(&manifest.problem, manifest.objectives, manifest.dimension, &columns, champion, level)
}

/// Options for [`cmd_compare`].
#[derive(Debug, Clone, Default)]
pub struct CompareOptions {
    /// Champion variant name; defaults to the first manifest's setting.
    pub champion: Option<String>,
    pub level: Option<f64>,
    /// Forces recomputation of every HV with this method.
    pub hv: Option<HvMethod>,
    /// Also write `comparison.md` and `comparison.<format>` here.
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub table: Table,
    /// Whether HV values were recomputed from the front files.
    pub recomputed: bool,
    pub reference_box: ReferenceBox,
}

/// One column per (directory, variant) pair. Stored HV values are used when
/// all directories share a reference box and HV method; otherwise every front
/// is re-read and normalized in the box of their union.
pub fn cmd_compare(dirs: &[PathBuf], options: &CompareOptions) -> anyhow::Result<CompareReport> {
    ensure!(!dirs.is_empty(), "no result directories given");
    let manifests: Vec<Manifest> = dirs
        .iter()
        .map(|d| Manifest::load_dir(d))
        .collect::<anyhow::Result<_>>()?;
    let first = &manifests[0];
    for (dir, m) in dirs.iter().zip(&manifests).skip(1) {
        if m.problem != first.problem
            || m.config.instance != first.config.instance
            || m.objectives != first.objectives
            || m.dimension != first.dimension
        {
            bail!(
                "{} holds {} {:?} (M = {}, D = {}) but {} holds {} {:?} (M = {}, D = {}); \
                 refusing to compare different instances",
                dir.display(),
                m.problem,
                m.config.instance,
                m.objectives,
                m.dimension,
                dirs[0].display(),
                first.problem,
                first.config.instance,
                first.objectives,
                first.dimension
            );
        }
    }

    struct Source<'a> {
        dir: &'a Path,
        variant: String,
        runs: Vec<&'a RunRecord>,
    }
    let mut sources: Vec<Source> = Vec::new();
    for (dir, m) in dirs.iter().zip(&manifests) {
        for v in m.variants() {
            let runs = m.runs.iter().filter(|r| r.variant == v).collect();
            sources.push(Source { dir, variant: v, runs });
        }
    }
    ensure!(!sources.is_empty(), "no completed runs in the given directories");

    let same_box = manifests.iter().all(|m| m.reference_box == first.reference_box);
    let same_hv = manifests.iter().all(|m| m.hv == first.hv);
    let recompute = options.hv.is_some() || !same_box || !same_hv;
    let (values, bx): (Vec<Vec<f64>>, ReferenceBox) = if recompute {
        let fronts: Vec<Vec<Vec<f64>>> = sources
            .iter()
            .flat_map(|s| s.runs.iter().map(move |r| (s.dir, *r)))
            .map(|(dir, r)| {
                let (m, rows) = read_front(&dir.join(&r.front_file))?;
                ensure!(m == first.objectives, "{}: {m} objectives", r.front_file.display());
                Ok(rows)
            })
            .collect::<anyhow::Result<_>>()?;
        let bx = ReferenceBox::from_fronts(fronts.iter().map(Vec::as_slice))
            .context("every front is empty")?;
        let method = options.hv.unwrap_or_else(|| first.hv.method.method(first.hv.samples, first.hv.seed));
        check_exact(method, &fronts.iter().map(Vec::as_slice).collect::<Vec<_>>())?;
        let workers = worker_limit(None)?;
        let hvs: Vec<f64> = pool(workers)?
            .install(|| fronts.par_iter().map(|f| normalized_hv(f, &bx, method)).collect());
        let mut it = hvs.into_iter();
        let values = sources
            .iter()
            .map(|s| it.by_ref().take(s.runs.len()).collect())
            .collect();
        (values, bx)
    } else {
        let values = sources.iter().map(|s| s.runs.iter().map(|r| r.hv).collect()).collect();
        (values, first.reference_box.to_box()?)
    };

    let mut columns: Vec<Column> = sources
        .iter()
        .zip(values)
        .map(|(s, values)| Column {
            label: s.variant.clone(),
            values,
        })
        .collect();
    // Disambiguate repeated variants by their directory.
    let labels: Vec<String> = columns.iter().map(|c| c.label.clone()).collect();
    for (c, s) in columns.iter_mut().zip(&sources) {
        if labels.iter().filter(|l| **l == c.label).count() > 1 {
            c.label = format!("{} ({})", c.label, s.dir.display());
        }
    }

    let champion_name = options
        .champion
        .clone()
        .unwrap_or_else(|| first.config.experiment.champion.clone());
    champion_name.parse::<Variant>()?;
    let champion = sources.iter().position(|s| s.variant == champion_name);
    let level = options.level.unwrap_or(first.config.experiment.level);
    let table = Table::new(&first.problem, first.objectives, first.dimension, &columns, champion, level);

    if let Some(out) = &options.out {
        let mut md = table.to_markdown();
        md.push_str(&format!(
            "\nHV normalized to [0, 1] in the box lower = {:?}, reference = {:?}{}.\n",
            bx.lower,
            bx.reference,
            if recompute { " (recomputed from the front files)" } else { "" }
        ));
        write_atomic(&out.join("comparison.md"), md.as_bytes())?;
        let machine = match options.format {
            Format::Csv => table.to_csv()?,
            Format::Json => table.to_json()?,
        };
        write_atomic(&out.join(format!("comparison.{}", options.format.extension())), &machine)?;
    }
    Ok(CompareReport {
        table,
        recomputed: recompute,
        reference_box: bx,
    })
}

/// Options for [`cmd_front_dump`].
#[derive(Debug, Clone, Default)]
pub struct DumpOptions {
    pub variant: String,
    pub run: usize,
    pub format: Format,
    /// Map objectives into `[0, 1]` with the experiment's reference box.
    pub normalized: bool,
    /// Append decision vectors (needs a run saved with `save_decisions`).
    pub decisions: bool,
}

#[derive(Serialize)]
struct JsonFront<'a> {
    problem: &'a str,
    variant: &'a str,
    run: usize,
    normalized: bool,
    columns: Vec<String>,
    objectives: &'a [Vec<f64>],
    #[serde(skip_serializing_if = "Option::is_none")]
    decisions: Option<&'a [Vec<f64>]>,
}

/// Final front of one run in a parallel-coordinates layout: one row per
/// solution, one column per objective.
pub fn cmd_front_dump(dir: &Path, options: &DumpOptions) -> anyhow::Result<Vec<u8>> {
    let manifest = Manifest::load_dir(dir)?;
    let record = manifest.find_run(&options.variant, options.run).with_context(|| {
        format!(
            "{} has no run {} of variant {:?}",
            dir.display(),
            options.run,
            options.variant
        )
    })?;
    let (m, mut objectives) = read_front(&dir.join(&record.front_file))?;
    if options.normalized {
        let bx = &manifest.reference_box;
        for row in &mut objectives {
            for ((v, lo), hi) in row.iter_mut().zip(&bx.lower).zip(&bx.reference) {
                let span = hi - lo;
                *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
            }
        }
    }
    let decisions = if options.decisions {
        let file = record.decisions_file.as_ref().with_context(|| {
            format!(
                "{} run {} was stored without decisions; rerun with save_decisions = true",
                options.variant, options.run
            )
        })?;
        let (_, rows) = read_matrix(&dir.join(file), 'x')?;
        ensure!(rows.len() == objectives.len(), "decision and front files disagree in length");
        Some(rows)
    } else {
        None
    };
    match options.format {
        Format::Csv => match &decisions {
            Some(x) => front_with_decisions_csv(&objectives, x, m, manifest.dimension),
            None => front_csv(&objectives, m),
        },
        Format::Json => {
            let mut columns: Vec<String> = (1..=m).map(|i| format!("f{i}")).collect();
            if decisions.is_some() {
                columns.extend((1..=manifest.dimension).map(|i| format!("x{i}")));
            }
            let doc = JsonFront {
                problem: &manifest.problem,
                variant: &options.variant,
                run: options.run,
                normalized: options.normalized,
                columns,
                objectives: &objectives,
                decisions: decisions.as_deref(),
            };
            let mut bytes = serde_json::to_vec_pretty(&doc)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Applies the command-line overrides shared by `run` invocations.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub budget: Option<usize>,
    pub variants: Vec<String>,
    pub hv: Option<HvChoice>,
    pub mc_samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(out) = &self.out {
            config.experiment.out = out.clone();
        }
        if let Some(seed) = self.seed {
            config.experiment.seed = seed;
        }
        if let Some(runs) = self.runs {
            config.experiment.runs = runs;
        }
        if let Some(budget) = self.budget {
            config.solver.budget = budget;
        }
        if !self.variants.is_empty() {
            config.solver.variants = self.variants.clone();
        }
        if let Some(hv) = self.hv {
            config.experiment.hv = hv;
        }
        if let Some(n) = self.mc_samples {
            config.experiment.mc_samples = n;
        }
    }
}
