//! Runs one experiment and writes its directory:
//!
//! ```text
//! <out>/
//!   trajectories.csv   aggregate.csv   receiver_info.svg   manifest.json
//!   tables/run<r>_turn<t>_<pre|post>_<table>.csv
//!   tables/run<r>_turn<t>_expected_compound_acts.csv
//!   policy_run<r>.json                 (with --dump-policy)
//! ```

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;
use urnsig_core::sim::csv::{aggregate_csv, trajectory_csv};
use urnsig_core::sim::ReportTables;
use urnsig_core::{compositional_expectation, run_batch, Batch, Phase};

use crate::config::ExperimentConfig;
use crate::plot::receiver_info_svg;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub plot: Option<bool>,
    pub dump_policy: bool,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub name: String,
    pub status: &'static str,
    pub error: Option<String>,
    pub receiver: &'static str,
    pub seed: u64,
    pub num_runs: usize,
    pub total_turns: u64,
    pub snapshot_every: u64,
    pub event_turns: Vec<u64>,
    /// Per run, the first snapshot turn with expected payoff at least 0.95.
    pub signaling_turns: Vec<Option<u64>>,
    pub files: Vec<String>,
}

pub struct Outcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn write(&mut self, relative: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(relative.to_string());
        Ok(())
    }
}

/// Runs the experiment with any command-line overrides applied. The manifest
/// is written even when the run fails, with status `failed`.
pub fn run_experiment(experiment: &ExperimentConfig, options: &RunOptions) -> Result<Outcome> {
    let mut experiment = experiment.clone();
    if let Some(runs) = options.runs {
        experiment.num_runs = runs;
    }
    if let Some(seed) = options.seed {
        experiment.seed = seed;
    }
    if let Some(plot) = options.plot {
        experiment.plot = plot;
    }
    let dir = match &options.out {
        Some(out) => out.join(&experiment.name),
        None => experiment.output_dir(),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut writer = Writer { dir: dir.clone(), files: Vec::new() };
    let mut manifest = Manifest {
        name: experiment.name.clone(),
        status: "ok",
        error: None,
        receiver: experiment.receiver.kind_name(),
        seed: experiment.seed,
        num_runs: experiment.num_runs,
        total_turns: experiment.total_turns,
        snapshot_every: experiment.snapshot_every,
        event_turns: experiment.events.iter().map(|e| e.turn).collect(),
        signaling_turns: Vec::new(),
        files: Vec::new(),
    };

    let result = write_results(&experiment, options, &mut writer, &mut manifest);
    if let Err(e) = &result {
        manifest.status = "failed";
        manifest.error = Some(format!("{e:#}"));
    }
    manifest.files = writer.files.clone();
    manifest.files.push("manifest.json".into());
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(dir.join("manifest.json"), text)
        .with_context(|| format!("writing manifest in {}", dir.display()))?;
    result.map(|()| Outcome { dir, manifest })
}

fn write_results(
    experiment: &ExperimentConfig,
    options: &RunOptions,
    writer: &mut Writer,
    manifest: &mut Manifest,
) -> Result<()> {
    let config = experiment.trajectory()?;
    let batch = run_batch(&config, experiment.num_runs)?;
    manifest.signaling_turns = batch.trajectories.iter().map(|t| t.signaling_turn).collect();

    writer.write("trajectories.csv", &trajectory_csv(&batch))?;
    writer.write("aggregate.csv", &aggregate_csv(&batch))?;
    write_tables(&batch, writer)?;
    if experiment.plot {
        let svg = receiver_info_svg(&experiment.name, &batch.aggregate, &manifest.event_turns);
        writer.write("receiver_info.svg", &svg)?;
    }
    if options.dump_policy {
        for (r, t) in batch.trajectories.iter().enumerate() {
            writer.write(&format!("policy_run{r}.json"), &(t.final_agents.to_json() + "\n"))?;
        }
    }
    Ok(())
}

fn write_tables(batch: &Batch, writer: &mut Writer) -> Result<()> {
    for (r, t) in batch.trajectories.iter().enumerate() {
        for record in &t.records {
            let (Some(tables), phase @ (Phase::Pre | Phase::Post)) = (&record.tables, record.phase)
            else {
                continue;
            };
            let prefix = format!("tables/run{r}_turn{}_{}", record.turn, phase.as_str());
            for (name, table) in named(tables) {
                writer.write(&format!("{prefix}_{name}.csv"), &table.to_csv())?;
            }
        }
        for event in &t.events {
            let expected = compositional_expectation(&event.pre, &event.event.old, &event.event.new)?;
            writer.write(
                &format!("tables/run{r}_turn{}_expected_compound_acts.csv", event.event.turn),
                &expected.table.to_csv(),
            )?;
        }
    }
    Ok(())
}

fn named(tables: &ReportTables) -> [(&'static str, &urnsig_core::InfoTable); 4] {
    [
        ("atomic_states", &tables.atomic_states),
        ("compound_states", &tables.compound_states),
        ("atomic_acts", &tables.atomic_acts),
        ("compound_acts", &tables.compound_acts),
    ]
}
