//! Executes a validated [`ExperimentConfig`].

use std::io::Write;
use std::path::Path;

use porous_ot::acceptance::{self, Fault, Options};
use porous_ot::io::{self, Manifest};
use porous_ot::porosity::{self, class_a_diagnostic};
use porous_ot::rates::{self, Probe};
use porous_ot::{AlphaRule, CantorSpec, Execution, IntervalSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{AlphaKind, CommandId, ExperimentConfig, Grid, Inputs};
use crate::Failure;

const DEFAULT_DEPTH: usize = 14;
const DEFAULT_THRESHOLD: f64 = 0.1;
/// Random points per scale for the porosity cross-check.
const POROSITY_SAMPLES: usize = 1000;

/// What a command hands back: the artifact and, when the artifact goes to a
/// file, a one-line JSON summary for stdout.
pub struct Output {
    pub artifact: Vec<u8>,
    pub summary: Option<serde_json::Value>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Output, Failure> {
    cfg.validate()?;
    let manifest = Manifest { config_hash: cfg.hash()?, seed: cfg.seed };
    let out = match cfg.command {
        CommandId::RateScan => rate_scan(cfg, &manifest)?,
        CommandId::Cantor => cantor(cfg, &manifest)?,
        CommandId::Porosity => porosity(cfg, &manifest)?,
        CommandId::Verify => verify(cfg, &manifest)?,
    };
    Ok(out)
}

fn inputs(cfg: &ExperimentConfig) -> Inputs {
    cfg.inputs.clone().unwrap_or_default()
}

fn read(path: &str) -> Result<String, Failure> {
    Ok(io::read_file(Path::new(path))?)
}

fn ps(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.p.clone().unwrap_or_else(|| vec![1.0])
}

fn grid(g: &Grid) -> Result<Vec<f64>, Failure> {
    Ok(rates::geometric_grid(g.max, g.min, g.count)?)
}

fn csv(write: impl FnOnce(&mut Vec<u8>) -> porous_ot::Result<()>) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn rate_scan(cfg: &ExperimentConfig, manifest: &Manifest) -> Result<Output, Failure> {
    let path = inputs(cfg).measure.ok_or_else(|| Failure::Input("rate-scan needs --measure".into()))?;
    let m = io::parse_measure(&read(&path)?).map_err(|e| Failure::located(&path, e))?;
    let hs = match &cfg.h_grid {
        Some(g) => grid(g)?,
        None => rates::default_grid(),
    };
    let mut rows = Vec::new();
    for p in ps(cfg) {
        rows.extend(rates::rate_scan_with(Execution::Parallel, &m, &hs, p, 0.0)?);
    }
    let artifact = csv(|b| io::write_rate_csv(b, manifest, &rows))?;
    let worst = rates::scan_max(&rows).map(|s| s.quotient);
    Ok(Output { artifact, summary: Some(json!({ "rows": rows.len(), "max_quotient": worst })) })
}

/// The Cantor spec named by the config: a spec file, optionally with its depth
/// overridden, or the alpha flags.
fn cantor_spec(cfg: &ExperimentConfig) -> Result<Option<CantorSpec>, Failure> {
    if let Some(path) = inputs(cfg).cantor {
        if cfg.alpha.is_some() {
            return Err(Failure::Input("give either a Cantor spec file or alpha flags, not both".into()));
        }
        let mut spec = io::parse_cantor_spec(&read(&path)?).map_err(|e| Failure::located(&path, e))?;
        if let Some(depth) = cfg.depth {
            spec = CantorSpec::new(spec.alpha, depth)?;
        }
        return Ok(Some(spec));
    }
    if cfg.alpha.is_none() && cfg.depth.is_none() {
        return Ok(None);
    }
    let rule = match cfg.alpha {
        None => AlphaRule::Constant { c: 1.0 / 3.0 },
        Some(a) => match a.kind {
            AlphaKind::Constant => AlphaRule::Constant { c: a.c },
            AlphaKind::Harmonic => AlphaRule::Harmonic { c: a.c },
        },
    };
    Ok(Some(CantorSpec::new(rule, cfg.depth.unwrap_or(DEFAULT_DEPTH))?))
}

fn cantor(cfg: &ExperimentConfig, manifest: &Manifest) -> Result<Output, Failure> {
    let spec = match cantor_spec(cfg)? {
        Some(s) => s,
        None => CantorSpec::new(AlphaRule::Constant { c: 1.0 / 3.0 }, DEFAULT_DEPTH)?,
    };
    let [lo, hi] = cfg.n_range.unwrap_or([2.min(spec.depth), 8.min(spec.depth)]);
    if lo > hi || hi > spec.depth {
        return Err(Failure::Input(format!("n range {lo}..={hi} must be ordered and within depth {}", spec.depth)));
    }
    let probes = match &cfg.probes {
        None => vec![Probe::Fail, Probe::Band],
        Some(names) => names.iter().map(|n| if n == "fail" { Probe::Fail } else { Probe::Band }).collect(),
    };
    let mut rows = Vec::new();
    for p in ps(cfg) {
        rows.extend(rates::cantor_scan(Execution::Parallel, &spec, lo..=hi, p, &probes)?);
    }
    let artifact = csv(|b| io::write_cantor_csv(b, manifest, &rows))?;
    Ok(Output { artifact, summary: Some(json!({ "rows": rows.len(), "depth": spec.depth })) })
}

fn porosity(cfg: &ExperimentConfig, manifest: &Manifest) -> Result<Output, Failure> {
    let (set, spec): (IntervalSet, _) = match inputs(cfg).intervals {
        Some(path) => {
            if cfg.alpha.is_some() || cfg.depth.is_some() {
                return Err(Failure::Input("give either an interval file or a Cantor spec, not both".into()));
            }
            (io::parse_intervals(&read(&path)?).map_err(|e| Failure::located(&path, e))?, None)
        }
        None => {
            let spec = cantor_spec(cfg)?
                .ok_or_else(|| Failure::Input("porosity needs --intervals, --cantor or alpha/depth flags".into()))?;
            (spec.generation(spec.depth)?, Some(spec))
        }
    };
    let scales = match (&cfg.scales, &spec) {
        (Some(g), _) => grid(g)?,
        // matched scales: the interval lengths of every generation
        (None, Some(spec)) => (1..=spec.depth).map(|n| spec.delta(n)).collect(),
        (None, None) => rates::geometric_grid(0.5, 1e-4, 14)?,
    };
    if scales.is_empty() {
        return Err(Failure::Input("no porosity scales (depth 0 has none)".into()));
    }
    let profile = porosity::porosity_profile_with(Execution::Parallel, &set, &scales)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for row in &profile.rows {
        let sampled = porosity::porosity_sampled(&set, row.s, POROSITY_SAMPLES, &mut rng)?;
        if sampled > row.tau + 1e-12 {
            return Err(Failure::Numeric(format!(
                "sampled porosity {sampled} exceeds the exact supremum {} at s = {}",
                row.tau, row.s
            )));
        }
    }
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let verdict = class_a_diagnostic(&profile, threshold);
    let artifact = csv(|b| io::write_profile_csv(b, manifest, &profile, verdict, threshold))?;
    Ok(Output {
        artifact,
        summary: Some(json!({ "verdict": verdict, "threshold": threshold, "rows": profile.rows.len() })),
    })
}

fn verify(cfg: &ExperimentConfig, manifest: &Manifest) -> Result<Output, Failure> {
    let opts = Options {
        seed: cfg.seed,
        fault: cfg.inject_fault.as_ref().map(|_| Fault::W1),
        exec: Execution::Parallel,
    };
    let ids = cfg.only.clone().unwrap_or_else(|| acceptance::CRITERIA.to_vec());
    let report = acceptance::run(&ids, &opts);
    let mut stderr = std::io::stderr().lock();
    for c in &report.criteria {
        let _ = writeln!(stderr, "{}", c.line());
    }
    let doc = json!({
        "manifest": { "version": io::VERSION, "config": manifest.config_hash, "seed": manifest.seed },
        "report": report,
    });
    let mut artifact = serde_json::to_vec_pretty(&doc).expect("report serializes");
    artifact.push(b'\n');
    if !report.all_passed {
        let failed: Vec<String> =
            report.criteria.iter().filter(|c| !c.passed).map(|c| format!("{} ({})", c.id, c.name)).collect();
        return Err(Failure::Acceptance { artifact, failed: failed.join(", ") });
    }
    Ok(Output { artifact, summary: Some(json!({ "all_passed": true, "criteria": report.criteria.len() })) })
}
