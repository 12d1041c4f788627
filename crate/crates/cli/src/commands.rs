use std::path::{Path, PathBuf};

use actscan::localization::{build_level_task_with, run_kmeans_baseline, ConsensusMode};
use actscan::overlap::{sankey_csv, CrossLevelOverlap, SankeyLink, UpsetData};
use actscan::plot::{layer_curves_csv, pca_scatter, pca_scatter_csv};
use actscan::scan::{empirical_pvalues_with, PValueOptions};
use actscan::store::actv;
use actscan::synth::Planted;
use actscan::{
    cross_level_overlap, detection_power, intersection_counts, jaccard_matrix, layer_sweep, load_matrix,
    run_localization, scan, DatasetManifest, Level, LayerDivergenceReport, LocalizationConfig, LocalizationReport,
    NamedSetFamily, ScanConfig, SweepConfig, SynthConfig, TailMode,
};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::args::{Consensus, LayersArgs, LocalizeArgs, OverlapArgs, PlotDataArgs, PlotKind, ScanArgs, ScanOpts, SynthPowerArgs};
use crate::Failure;

/// Files a command read and wrote.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub upset: UpsetData,
    pub jaccard: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLevelReport {
    pub level0: String,
    pub level2: String,
    pub overlap: CrossLevelOverlap,
}

fn scan_config(o: &ScanOpts, seed: u64) -> ScanConfig {
    ScanConfig {
        score_kind: o.score.into(),
        alpha_max: o.alpha_max,
        restarts: o.restarts,
        max_iters: o.max_iters,
        init_fraction: o.init_fraction,
        seed,
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("cannot create {}: {e}", dir.display())))?;
    }
    actv::write_atomic(path, bytes)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Data(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{} is not {what}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

pub fn layers(a: &LayersArgs, seed: u64) -> Result<Outcome, Failure> {
    let manifest = DatasetManifest::load(&a.manifest)?;
    let cfg = SweepConfig {
        layers: a.layers.clone(),
        k: a.pcs,
        n: a.n,
        seeds: (0..a.seeds).map(|s| seed.wrapping_add(s)).collect(),
        standardize: a.standardize,
        raw_space_metrics: false,
    };
    let report = layer_sweep(&manifest, &a.persona, &cfg)?;
    write_json(&a.out, &report)?;
    Ok(Outcome { inputs: vec![a.manifest.clone()], outputs: vec![a.out.clone()] })
}

pub fn scan_cmd(a: &ScanArgs, seed: u64) -> Result<Outcome, Failure> {
    let background = load_matrix(&a.background)?;
    let test = load_matrix(&a.test)?;
    let opts = PValueOptions { tail: if a.two_sided { TailMode::TwoSided } else { TailMode::Upper }, strict: a.strict };
    let p = empirical_pvalues_with(background.values.view(), test.values.view(), opts)?;
    let result = scan(&p, &scan_config(&a.scan, seed))?;
    write_json(&a.out, &result)?;
    Ok(Outcome { inputs: vec![a.background.clone(), a.test.clone()], outputs: vec![a.out.clone()] })
}

pub fn localize(a: &LocalizeArgs, seed: u64) -> Result<Outcome, Failure> {
    let manifest = DatasetManifest::load(&a.manifest)?;
    let level = Level::try_from(a.level)?;
    let task = build_level_task_with(&manifest, level, &a.target, a.layer, seed, a.background_fraction)?;
    let consensus = match a.consensus {
        Consensus::Frequency => ConsensusMode::Frequency { tau: a.tau },
        Consensus::Union => ConsensusMode::Union,
        Consensus::Intersection => ConsensusMode::Intersection,
    };
    let cfg = LocalizationConfig { n_runs: a.runs, test_size: a.test_size, h1_fraction: a.h1_fraction, consensus, seed };
    let mut report = run_localization(&task, &scan_config(&a.scan, seed), &cfg)?;

    let freq_path = crate::run_manifest::sibling(&a.out, "freq.actv");
    let freq: Vec<f32> = report.selection_frequency.iter().map(|&f| f as f32).collect();
    let values = Array2::from_shape_vec((1, freq.len()), freq).expect("1 x J");
    write_bytes(&freq_path, &actv::encode(&values)?)?;
    report.selection_frequency_path = freq_path.file_name().map(|f| f.to_string_lossy().into_owned());
    write_json(&a.out, &report)?;

    let mut outputs = vec![a.out.clone(), freq_path];
    if a.kmeans_baseline {
        let path = crate::run_manifest::sibling(&a.out, "kmeans.json");
        write_json(&path, &run_kmeans_baseline(&task, &cfg)?)?;
        outputs.push(path);
    }
    Ok(Outcome { inputs: vec![a.manifest.clone()], outputs })
}

/// A position set and, for `localize` reports, the number of positions.
fn load_set(path: &Path) -> Result<(Vec<usize>, Option<usize>), Failure> {
    let value: serde_json::Value = read_json(path, "JSON")?;
    if value.is_array() {
        let v: Vec<usize> = serde_json::from_value(value)
            .map_err(|e| Failure::Data(format!("{}: expected an array of indices: {e}", path.display())))?;
        return Ok((v, None));
    }
    let report: LocalizationReport = serde_json::from_value(value)
        .map_err(|e| Failure::Data(format!("{} is neither an index array nor a localize report: {e}", path.display())))?;
    Ok((report.consensus, Some(report.dim)))
}

fn universe_of(explicit: Option<usize>, dims: &[Option<usize>]) -> Result<usize, Failure> {
    let mut known = dims.iter().flatten();
    let first = known.next().copied();
    if let Some(d) = first {
        if known.any(|x| *x != d) {
            return Err(Failure::Data("reports disagree on the number of positions".into()));
        }
    }
    match (explicit, first) {
        (Some(u), Some(d)) if u != d => Err(Failure::Data(format!("--universe {u} but the reports have {d} positions"))),
        (Some(u), _) => Ok(u),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Failure::Usage("--universe is required when no set is a localize report".into())),
    }
}

pub fn overlap(a: &OverlapArgs) -> Result<Outcome, Failure> {
    if let (Some(l0), Some(l2)) = (&a.level0, &a.level2) {
        let (s0, d0) = load_set(l0)?;
        let (s2, d2) = load_set(l2)?;
        let universe = universe_of(a.universe, &[d0, d2])?;
        let report = CrossLevelReport { level0: stem(l0), level2: stem(l2), overlap: cross_level_overlap(&s0, &s2, universe)? };
        write_json(&a.out, &report)?;
        return Ok(Outcome { inputs: vec![l0.clone(), l2.clone()], outputs: vec![a.out.clone()] });
    }
    if a.sets.is_empty() {
        return Err(Failure::Usage("overlap needs --sets or --level0/--level2".into()));
    }
    let loaded = a.sets.iter().map(|p| load_set(p)).collect::<Result<Vec<_>, _>>()?;
    let dims: Vec<Option<usize>> = loaded.iter().map(|(_, d)| *d).collect();
    let universe = universe_of(a.universe, &dims)?;
    let family = NamedSetFamily::new(a.sets.iter().map(|p| stem(p)).collect(), loaded.into_iter().map(|(s, _)| s).collect(), universe)?;
    let upset = intersection_counts(&family);
    if a.out.extension().is_some_and(|e| e == "csv") {
        write_bytes(&a.out, upset.to_csv().as_bytes())?;
    } else {
        write_json(&a.out, &OverlapReport { upset, jaccard: jaccard_matrix(&family) })?;
    }
    Ok(Outcome { inputs: a.sets.clone(), outputs: vec![a.out.clone()] })
}

pub fn synth_power(a: &SynthPowerArgs, seed: u64) -> Result<Outcome, Failure> {
    let synth = SynthConfig {
        n_background: a.n_background,
        n_signal: a.n_signal,
        n_null_test: Some(a.n_null),
        dim: a.dim,
        planted: Planted::Count(a.planted),
        mu: a.mu,
        seed,
    };
    let report = detection_power(&synth, &scan_config(&a.scan, seed), a.seeds)?;
    write_json(&a.out, &report)?;
    Ok(Outcome { inputs: vec![], outputs: vec![a.out.clone()] })
}

pub fn plot_data(a: &PlotDataArgs, seed: u64) -> Result<Outcome, Failure> {
    let single = || -> Result<&PathBuf, Failure> {
        match a.input.as_slice() {
            [one] => Ok(one),
            _ => Err(Failure::Usage(format!("--kind {:?} takes exactly one --input", a.kind))),
        }
    };
    let csv = match a.kind {
        PlotKind::LayerCurves => {
            let r: LayerDivergenceReport = read_json(single()?, "a layers report")?;
            layer_curves_csv(&r)
        }
        PlotKind::Upset => read_json::<OverlapReport>(single()?, "an overlap report")?.upset.to_csv(),
        PlotKind::Venn => read_json::<OverlapReport>(single()?, "an overlap report")?.upset.to_venn_csv()?,
        PlotKind::Sankey => {
            let links = a
                .input
                .iter()
                .map(|p| {
                    let r: CrossLevelReport = read_json(p, "a cross-level overlap report")?;
                    Ok(SankeyLink { source: r.level0, target: r.level2, value: r.overlap.overlap_count })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            sankey_csv(&links)
        }
        PlotKind::PcaScatter => {
            let (Some(persona), Some(layer)) = (&a.persona, a.layer) else {
                return Err(Failure::Usage("--kind pca-scatter needs --persona and --layer".into()));
            };
            let manifest = DatasetManifest::load(single()?)?;
            pca_scatter_csv(&pca_scatter(&manifest, persona, layer, a.n, seed)?)
        }
    };
    write_bytes(&a.out, csv.as_bytes())?;
    Ok(Outcome { inputs: a.input.clone(), outputs: vec![a.out.clone()] })
}
