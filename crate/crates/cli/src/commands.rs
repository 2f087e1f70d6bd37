//! Subcommand bodies. Each computes everything first and touches the
//! filesystem only once the results are complete.

use crate::bundle::{self, Envelope, Meta, Staged};
use crate::{render, CliError, ModeArg, PowerModeArg};
use serde::{Deserialize, Serialize};
use sms_core::adequacy::{run_campaign_with_workers, CampaignConfig, CampaignResults, EquivalenceMode};
use sms_core::degeneration::{check_degeneration, DegenerateLimitConfig, DegenerationReport, DEGENERATE_K_EQ};
use sms_core::lrca::{lrca_report, LrcaReport};
use sms_core::mr::{density, mr_catalog};
use sms_core::mutation::{authored, default_probes, l0_prescreen, MutantKind, OperatorClass, Prescreen, SemanticityFlags};
use sms_core::stats::{compute_stats, power_plugin, power_stipulated, sms_summary, PowerReport, SmsSummary, StatsReport, PLUGIN_THRESHOLDS};
use sms_core::{MetaPattern, PutId};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const PLUGIN_NSIM: usize = 5000;
pub const STIPULATED_NSIM: usize = 2000;

#[derive(Debug, Clone, Default)]
pub struct RunArgs {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub keq: Option<usize>,
    pub replicates: Option<usize>,
    pub mode: Option<ModeArg>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Statistics of a campaign. `report` is absent, with `reason` set, when the
/// campaign does not cover every cell the hypotheses need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub cells: usize,
    pub sms: SmsSummary,
    pub report: Option<StatsReport>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantManifestEntry {
    pub mutant_id: String,
    pub put: PutId,
    pub operator: OperatorClass,
    pub kind: MutantKind,
    pub semanticity: SemanticityFlags,
    pub artefact_flag: bool,
    pub description: String,
    pub prescreen: Prescreen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrManifestEntry {
    pub mr_id: String,
    pub put: PutId,
    pub mp: MetaPattern,
    pub description: String,
    pub method: String,
    pub tolerance: f64,
    pub density: String,
}

/// Wall-clock facts about a run; the only file that differs between reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub elapsed_seconds: f64,
    pub workers: usize,
    pub output_directory: PathBuf,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub results: CampaignResults,
    pub stats: StatsFile,
    pub elapsed_seconds: f64,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Reads the TOML config (when given) and applies result-affecting flags.
pub fn load_config(args: &RunArgs) -> Result<CampaignConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => CliError::missing(format!("config {} not found", path.display())),
                _ => CliError::other(format!("read {}: {e}", path.display())),
            })?;
            toml::from_str::<CampaignConfig>(&text)
                .map_err(|e| CliError::config(format!("invalid configuration {}: {e}", path.display())))?
        }
        None => CampaignConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(k) = args.keq {
        config.k_eq = k;
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(m) = args.mode {
        config.equivalence_mode = match m {
            ModeArg::E1e2 => EquivalenceMode::E1AndE2,
            ModeArg::E1 => EquivalenceMode::E1Only,
            ModeArg::E2 => EquivalenceMode::E2Only,
        };
    }
    config.validate()?;
    Ok(config)
}

pub fn stats_file(results: &CampaignResults) -> StatsFile {
    let sms = sms_summary(&results.cells);
    match compute_stats(results) {
        Ok(report) => StatsFile { cells: results.cells.len(), sms, report: Some(report), reason: None },
        Err(e) => StatsFile { cells: results.cells.len(), sms, report: None, reason: Some(e.to_string()) },
    }
}

pub fn mutant_manifest(puts: &[PutId]) -> Vec<MutantManifestEntry> {
    puts.iter()
        .flat_map(|&put| {
            let probes = default_probes(put);
            authored(put).into_iter().map(move |m| MutantManifestEntry {
                prescreen: l0_prescreen(&m, &probes),
                mutant_id: m.mutant_id,
                put: m.put,
                operator: m.operator,
                kind: m.kind,
                semanticity: m.semanticity,
                artefact_flag: m.artefact_flag,
                description: m.description,
            })
        })
        .collect()
}

pub fn mr_manifest(puts: &[PutId]) -> Vec<MrManifestEntry> {
    mr_catalog()
        .iter()
        .filter(|m| puts.contains(&m.put))
        .map(|m| MrManifestEntry {
            mr_id: m.mr_id.clone(),
            put: m.put,
            mp: m.mp,
            description: m.description.clone(),
            method: m.method().into(),
            tolerance: m.tolerance,
            density: density(m.put, m.mp).map(|d| d.symbol().to_string()).unwrap_or_default(),
        })
        .collect()
}

/// Every result file of a run, keyed by name, before anything is written.
pub fn stage_run(config: &CampaignConfig, workers: usize) -> Result<(Staged, CampaignResults, StatsFile), CliError> {
    let raw = run_campaign_with_workers(config, workers)?;
    let (annotated, lrca): (CampaignResults, LrcaReport) = lrca_report(&raw, &config.lrca)?;
    let stats = stats_file(&annotated);
    let meta = Meta::of(config);
    let mut puts = config.puts.clone();
    puts.sort();

    let mut staged = Staged::default();
    staged.add(bundle::CAMPAIGN_FILE, &Envelope::new(meta.clone(), &annotated))?;
    staged.add(bundle::LRCA_FILE, &Envelope::new(meta.clone(), &lrca))?;
    staged.add(bundle::STATS_FILE, &Envelope::new(meta.clone(), &stats))?;
    staged.add(bundle::MUTANT_MANIFEST_FILE, &Envelope::new(meta.clone(), mutant_manifest(&puts)))?;
    staged.add(bundle::MR_MANIFEST_FILE, &Envelope::new(meta, mr_manifest(&puts)))?;
    Ok((staged, annotated, stats))
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn run(args: &RunArgs) -> Result<RunSummary, CliError> {
    let config = load_config(args)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::config("--workers must be at least 1"));
    }
    let out = args.out.clone().unwrap_or_else(|| config.output_directory.clone());
    let started_unix = unix_now();
    let clock = Instant::now();
    let (mut staged, results, stats) = stage_run(&config, workers)?;
    let elapsed_seconds = clock.elapsed().as_secs_f64();
    let metadata = RunMetadata {
        tool_version: bundle::TOOL_VERSION.into(),
        started_unix,
        finished_unix: unix_now(),
        elapsed_seconds,
        workers,
        output_directory: out.clone(),
        files: [
            bundle::CAMPAIGN_FILE,
            bundle::LRCA_FILE,
            bundle::STATS_FILE,
            bundle::MUTANT_MANIFEST_FILE,
            bundle::MR_MANIFEST_FILE,
        ]
        .map(String::from)
        .to_vec(),
    };
    staged.add(bundle::METADATA_FILE, &metadata)?;
    staged.commit(&out)?;
    Ok(RunSummary { out, results, stats, elapsed_seconds })
}

pub fn read_campaign(dir: &Path) -> Result<Envelope<CampaignResults>, CliError> {
    bundle::read(dir, bundle::CAMPAIGN_FILE)
}

pub fn stats(dir: &Path) -> Result<StatsFile, CliError> {
    let campaign = read_campaign(dir)?;
    let file = stats_file(&campaign.data);
    let mut staged = Staged::default();
    staged.add(bundle::STATS_FILE, &Envelope::new(campaign.meta, &file))?;
    staged.commit(dir)?;
    Ok(file)
}

/// SMS of the aligned and cross cells where it is defined.
pub fn aligned_and_cross(results: &CampaignResults) -> (Vec<f64>, Vec<f64>) {
    let pick = |aligned: bool| results.cells.iter().filter(|c| c.aligned == aligned).filter_map(|c| c.sms).collect();
    (pick(true), pick(false))
}

pub fn power(
    dir: &Path,
    mode: PowerModeArg,
    target: f64,
    nsim: Option<usize>,
    seed: Option<u64>,
) -> Result<Envelope<PowerReport>, CliError> {
    let campaign = read_campaign(dir)?;
    let (aligned, cross) = aligned_and_cross(&campaign.data);
    let seed = seed.unwrap_or(campaign.meta.seed);
    let report = match mode {
        PowerModeArg::Plugin => power_plugin(&aligned, &cross, &PLUGIN_THRESHOLDS, nsim.unwrap_or(PLUGIN_NSIM), seed)?,
        PowerModeArg::Stipulated => power_stipulated(&aligned, &cross, target, nsim.unwrap_or(STIPULATED_NSIM), seed)?,
    };
    let file = Envelope::new(campaign.meta, report);
    let mut staged = Staged::default();
    staged.add(bundle::POWER_FILE, &file)?;
    staged.commit(dir)?;
    Ok(file)
}

/// The degeneration check over the limit's PUT subset. Any mismatch aborts
/// with the mismatch exit status and nothing is written.
pub fn degenerate_check(seed: u64, out: Option<&Path>) -> Result<Envelope<Vec<DegenerationReport>>, CliError> {
    let cfg = DegenerateLimitConfig::default();
    cfg.validate()?;
    let puts = cfg.put_subset.clone().unwrap_or_default();
    let reports = puts.iter().map(|&put| check_degeneration(put, &cfg, seed)).collect::<Result<Vec<_>, _>>()?;
    let meta = Meta {
        tool_version: bundle::TOOL_VERSION.into(),
        seed,
        k_eq: cfg.k_eq.unwrap_or(DEGENERATE_K_EQ),
        replicates: 1,
    };
    let file = Envelope::new(meta, reports);
    if let Some(dir) = out {
        let mut staged = Staged::default();
        staged.add(bundle::DEGENERATION_FILE, &file)?;
        staged.commit(dir)?;
    }
    Ok(file)
}

/// Renders the text report and writes the heatmap CSV next to the bundle.
pub fn report(dir: &Path) -> Result<String, CliError> {
    let campaign = read_campaign(dir)?;
    let stats = match bundle::read::<Envelope<StatsFile>>(dir, bundle::STATS_FILE) {
        Ok(s) => s.data,
        Err(e) if e.code == crate::EXIT_MISSING => stats_file(&campaign.data),
        Err(e) => return Err(e),
    };
    let mut staged = Staged::default();
    staged.add_text(bundle::HEATMAP_FILE, render::heatmap_csv(&campaign.data));
    staged.commit(dir)?;
    Ok(render::report(&campaign.meta, &campaign.data, &stats))
}
