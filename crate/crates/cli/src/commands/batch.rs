//! `batch`: stream JSON-lines jobs through the pipeline with job-level
//! parallelism. Jobs are independent; failures are recorded per job and the
//! run continues.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use patchwarp::io::{load_person, save_patchset, save_warped_garment};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::commands::{decompose::decompose_person, homography_report, retarget::retarget_to_person, write_json, CategoryArg};
use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum JobOp {
    Decompose,
    Retarget,
}

/// One line of the job manifest.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Job {
    #[serde(default)]
    id: Option<String>,
    op: JobOp,
    /// Person id (directory under the data root) providing the garment.
    source: String,
    /// Target person id; required for retarget jobs.
    #[serde(default)]
    target: Option<String>,
    #[serde(default)]
    category: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    alpha: Option<f64>,
}

fn parse_category(text: Option<&str>) -> Result<CategoryArg> {
    Ok(match text {
        None | Some("auto") => CategoryArg::Auto,
        Some("upper") => CategoryArg::Upper,
        Some("lower") => CategoryArg::Lower,
        Some("dress") => CategoryArg::Dress,
        Some(other) => anyhow::bail!("unknown category {other:?}"),
    })
}

fn run_job(job: &Job, key: &str, config: &RunConfig, out_root: &Path) -> Result<()> {
    let out_dir = out_root.join(key);
    std::fs::create_dir_all(&out_dir)?;
    let source_dir = config.data_root.join(&job.source);
    let category = parse_category(job.category.as_deref())?;
    match job.op {
        JobOp::Decompose => {
            let person = load_person(&source_dir)?;
            let set = decompose_person(&person, category, config)?;
            save_patchset(&set, &out_dir.join("archive"))?;
        }
        JobOp::Retarget => {
            let target_id = job
                .target
                .as_ref()
                .context("retarget job needs a target id")?;
            let person = load_person(&source_dir)?;
            let target = load_person(&config.data_root.join(target_id))?;
            let set = decompose_person(&person, category, config)?;
            let outcome = retarget_to_person(
                set,
                &target,
                config,
                None,
                job.seed.unwrap_or(config.seed),
                job.alpha.unwrap_or(config.alpha),
            )?;
            save_warped_garment(&outcome.warped, &out_dir, "warped")?;
            let report = homography_report(&outcome.set, &outcome.info)?;
            write_json(&out_dir.join("homographies.json"), &report)?;
        }
    }
    Ok(())
}

pub fn run(manifest_path: &Path, out_root: &Path, config: &RunConfig, jobs: Option<usize>) -> Result<bool> {
    let text = std::fs::read_to_string(manifest_path)
        .with_context(|| format!("reading manifest {}", manifest_path.display()))?;
    let mut parsed: Vec<(String, Job)> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let job: Job = serde_json::from_str(line)
            .with_context(|| format!("manifest line {}", index + 1))?;
        let key = job
            .id
            .clone()
            .unwrap_or_else(|| format!("job{:04}", parsed.len()));
        parsed.push((key, job));
    }

    std::fs::create_dir_all(out_root)?;
    let parallelism = jobs.unwrap_or(config.jobs).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .context("building worker pool")?;

    let results: Vec<(String, Result<()>)> = pool.install(|| {
        parsed
            .par_iter()
            .map(|(key, job)| (key.clone(), run_job(job, key, config, out_root)))
            .collect()
    });

    let mut failures = 0usize;
    for ((key, job), (_, result)) in parsed.iter().zip(results.iter()) {
        let status_path: PathBuf = out_root.join(key).join("status.json");
        std::fs::create_dir_all(out_root.join(key))?;
        let status = match result {
            Ok(()) => json!({
                "id": key,
                "op": match job.op { JobOp::Decompose => "decompose", JobOp::Retarget => "retarget" },
                "ok": true,
            }),
            Err(err) => {
                failures += 1;
                let code = err
                    .downcast_ref::<patchwarp::Error>()
                    .map(|e| e.code())
                    .unwrap_or("JobFailed");
                json!({
                    "id": key,
                    "op": match job.op { JobOp::Decompose => "decompose", JobOp::Retarget => "retarget" },
                    "ok": false,
                    "error": { "code": code, "message": format!("{err:#}") },
                })
            }
        };
        write_json(&status_path, &status)?;
    }

    println!(
        "batch complete: {} jobs, {} failed",
        parsed.len(),
        failures
    );
    Ok(failures == 0)
}
