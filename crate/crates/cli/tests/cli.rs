use serde::de::DeserializeOwned;
use serde::Serialize;
use sms_cli::bundle::{self, to_json, Envelope};
use sms_cli::commands::{MrManifestEntry, MutantManifestEntry, StatsFile};
use sms_core::adequacy::CampaignResults;
use sms_core::lrca::LrcaReport;
use sms_core::stats::PowerReport;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "seed = 7\nreplicates = 2\nputs = [\"A2\", \"B1\", \"D2\", \"D3\"]\n";

fn sms(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sms")).args(args).current_dir(cwd).output().expect("spawn sms")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn small_run(dir: &Path, name: &str, workers: &str) {
    fs::write(dir.join("small.toml"), SMALL).unwrap();
    let out = sms(&["run", "--config", "small.toml", "--out", name, "--workers", workers], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

/// Parses a file and writes it back, which must reproduce it byte for byte.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(dir: &Path, name: &str) -> T {
    let text = fs::read_to_string(dir.join(name)).unwrap();
    assert!(!text.contains("NaN") && !text.contains("Infinity"), "{name} carries a bare non-finite value");
    let parsed: T = bundle::read(dir, name).unwrap();
    assert_eq!(to_json(&parsed).unwrap(), text, "{name} does not round-trip");
    parsed
}

#[test]
fn small_campaign_bundle_is_consistent_and_worker_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_run(dir, "one", "1");
    small_run(dir, "four", "4");
    for name in [
        bundle::CAMPAIGN_FILE,
        bundle::LRCA_FILE,
        bundle::STATS_FILE,
        bundle::MUTANT_MANIFEST_FILE,
        bundle::MR_MANIFEST_FILE,
    ] {
        let a = fs::read(dir.join("one").join(name)).unwrap();
        let b = fs::read(dir.join("four").join(name)).unwrap();
        assert!(a == b, "{name} depends on the worker count");
    }

    let one = dir.join("one");
    let campaign: Envelope<CampaignResults> = round_trip(&one, bundle::CAMPAIGN_FILE);
    let _: Envelope<LrcaReport> = round_trip(&one, bundle::LRCA_FILE);
    let stats: Envelope<StatsFile> = round_trip(&one, bundle::STATS_FILE);
    let mutants: Envelope<Vec<MutantManifestEntry>> = round_trip(&one, bundle::MUTANT_MANIFEST_FILE);
    let mrs: Envelope<Vec<MrManifestEntry>> = round_trip(&one, bundle::MR_MANIFEST_FILE);

    assert_eq!((campaign.meta.seed, campaign.meta.k_eq, campaign.meta.replicates), (7, 1000, 2));
    assert_eq!(campaign.data.cells.len(), 20);
    assert_eq!(stats.data.cells, campaign.data.cells.len());
    assert!(stats.data.report.is_none() && stats.data.reason.is_some());
    assert!(campaign.data.cells.iter().all(|c| c.partition_holds()));
    assert!(!mutants.data.is_empty() && !mrs.data.is_empty());
    assert!(mrs.data.iter().all(|m| ["A2", "B1", "D2", "D3"].contains(&m.put.as_str())));
    let meta = fs::read_to_string(one.join(bundle::METADATA_FILE)).unwrap();
    assert!(meta.contains("\"workers\": 1"));
}

#[test]
fn stats_power_and_report_read_a_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_run(dir, "b", "2");
    let b = dir.join("b");

    let out = sms(&["stats", "--in", "b"], dir);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("no hypothesis verdicts"));

    let out = sms(&["power", "--in", "b", "--nsim", "300"], dir);
    assert_eq!(code(&out), 0);
    let first = fs::read(b.join(bundle::POWER_FILE)).unwrap();
    let power: Envelope<PowerReport> = round_trip(&b, bundle::POWER_FILE);
    let thresholds: Vec<f64> = power.data.powers.iter().map(|r| r.threshold).collect();
    assert_eq!(thresholds, [0.0, 0.147, 0.330, 0.474]);
    assert!(power.data.powers.windows(2).all(|w| w[0].power >= w[1].power));
    sms(&["power", "--in", "b", "--nsim", "300"], dir);
    assert_eq!(fs::read(b.join(bundle::POWER_FILE)).unwrap(), first);

    let out = sms(&["report", "--in", "b"], dir);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("SMS heatmap") && text.contains("class marginals") && text.contains("pattern coverage"));
    let csv = fs::read_to_string(b.join(bundle::HEATMAP_FILE)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "put,MP1,MP2,MP3,MP4,MP5");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 6));
}

#[test]
fn exit_statuses() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&sms(&["run", "--replicates", "0", "--out", "x"], dir)), 2);
    assert_eq!(code(&sms(&["run", "--workers", "0", "--out", "x"], dir)), 2);
    fs::write(dir.join("bad.toml"), "bogus = 1\n").unwrap();
    assert_eq!(code(&sms(&["run", "--config", "bad.toml"], dir)), 2);
    fs::write(dir.join("partial.toml"), "[lrca]\nood_band = 0.07\n").unwrap();
    assert_eq!(code(&sms(&["run", "--config", "partial.toml"], dir)), 2);
    assert_eq!(code(&sms(&["run", "--config", "absent.toml"], dir)), 3);
    assert_eq!(code(&sms(&["stats", "--in", "nowhere"], dir)), 3);
    assert_eq!(code(&sms(&["power", "--in", "nowhere"], dir)), 3);
    assert_eq!(code(&sms(&["report", "--in", "nowhere"], dir)), 3);
    assert!(!dir.join("x").exists(), "a rejected run must not write anything");

    small_run(dir, "b", "2");
    let out = sms(&["power", "--in", "b", "--mode", "stipulated", "--target", "0.0", "--nsim", "200"], dir);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unreachable"));
}
