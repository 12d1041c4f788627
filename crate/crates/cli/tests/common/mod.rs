#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use actscan::store::actv;
use actscan::synth::Planted;
use actscan::{generate_synthetic, SynthConfig, SyntheticDataset};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_actscan"));
    c.env_remove("ACTSCAN_JOBS");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn actscan")
}

pub fn run_ok(args: &[String]) -> Result<(), String> {
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("`actscan {}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

pub struct Fixture {
    pub manifest: PathBuf,
    pub background: PathBuf,
    pub test: PathBuf,
}

/// A small persona dataset plus one background/test matrix pair.
pub fn fixture(root: &Path) -> Fixture {
    let data = root.join("data");
    SyntheticDataset::catalog(60, 24, vec![0.0, 2.0], 5).write(&data).unwrap();
    let cfg = SynthConfig { n_background: 80, n_signal: 20, n_null_test: Some(20), dim: 24, planted: Planted::Count(6), seed: 3, ..Default::default() };
    let (bg, test, _) = generate_synthetic(&cfg).unwrap();
    let background = data.join("bg.actv");
    let test_path = data.join("test.actv");
    actv::write_values(&bg.values, &background).unwrap();
    actv::write_values(&test.values, &test_path).unwrap();
    Fixture { manifest: data.join("manifest.json"), background, test: test_path }
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Every subcommand, writing into `dir`. Returns the argument lists.
pub fn pipeline(f: &Fixture, dir: &Path) -> Vec<Vec<String>> {
    let m = s(&f.manifest);
    let o = |name: &str| s(&dir.join(name));
    let cmds: Vec<Vec<String>> = vec![
        vec!["layers", "--manifest", &m, "--persona", "openness", "--pcs", "3", "--n", "40", "--seeds", "3", "--out", &o("layers.json")],
        vec!["scan", "--background", &s(&f.background), "--test", &s(&f.test), "--out", &o("scan.json")],
        vec!["localize", "--manifest", &m, "--level", "2", "--target", "openness", "--layer", "1", "--runs", "6", "--test-size", "30", "--kmeans-baseline", "--out", &o("openness.json")],
        vec!["localize", "--manifest", &m, "--level", "1", "--target", "openness", "--layer", "1", "--runs", "4", "--test-size", "40", "--out", &o("persona.json")],
        vec!["localize", "--manifest", &m, "--level", "0", "--target", "personality", "--layer", "1", "--runs", "4", "--test-size", "60", "--score", "hc", "--out", &o("personality.json")],
        vec!["overlap", "--sets", &o("personality.json"), &o("persona.json"), &o("openness.json"), "--out", &o("overlap.json")],
        vec!["overlap", "--sets", &o("personality.json"), &o("persona.json"), &o("openness.json"), "--out", &o("upset_direct.csv")],
        vec!["overlap", "--level0", &o("personality.json"), "--level2", &o("openness.json"), "--out", &o("cross.json")],
        vec!["synth-power", "--mu", "1.5", "--dim", "48", "--planted", "6", "--n-background", "60", "--n-signal", "20", "--n-null", "20", "--seeds", "3", "--out", &o("power.json")],
        vec!["plot-data", "--kind", "layer-curves", "--input", &o("layers.json"), "--out", &o("curves.csv")],
        vec!["plot-data", "--kind", "upset", "--input", &o("overlap.json"), "--out", &o("upset.csv")],
        vec!["plot-data", "--kind", "venn", "--input", &o("overlap.json"), "--out", &o("venn.csv")],
        vec!["plot-data", "--kind", "sankey", "--input", &o("cross.json"), "--out", &o("sankey.csv")],
        vec!["plot-data", "--kind", "pca-scatter", "--input", &m, "--persona", "openness", "--layer", "1", "--n", "30", "--out", &o("scatter.csv")],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    cmds
}

fn with_globals(args: &[String], jobs: usize) -> Vec<String> {
    let mut v = vec!["--seed".to_string(), "7".to_string(), "--jobs".to_string(), jobs.to_string()];
    v.extend(args.iter().cloned());
    v
}

fn outputs(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| !n.ends_with(".run.json"))
        .collect();
    names.sort();
    names
}

fn same_files(a: &Path, b: &Path, names: &[String]) -> Result<(), String> {
    for n in names {
        let x = std::fs::read(a.join(n)).map_err(|e| format!("{n}: {e}"))?;
        let y = std::fs::read(b.join(n)).map_err(|e| format!("{n}: {e}"))?;
        if x != y {
            return Err(format!("{n} differs between {} and {}", a.display(), b.display()));
        }
    }
    Ok(())
}

fn manifest_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs every subcommand with `--jobs 1` and `--jobs 4`, then replays each
/// run manifest, and requires byte-identical outputs throughout.
pub fn determinism_suite(root: &Path) -> Result<String, String> {
    let f = fixture(root);
    let (a, b, c) = (root.join("jobs1"), root.join("jobs4"), root.join("replay"));
    for d in [&a, &b, &c] {
        std::fs::create_dir_all(d).unwrap();
    }
    let cmds_a = pipeline(&f, &a);
    for args in &cmds_a {
        run_ok(&with_globals(args, 1))?;
    }
    for args in pipeline(&f, &b) {
        run_ok(&with_globals(&args, 4))?;
    }
    let names = outputs(&a);
    if outputs(&b) != names {
        return Err("--jobs 1 and --jobs 4 produced different file sets".into());
    }
    same_files(&a, &b, &names)?;

    let mut manifests: Vec<PathBuf> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".run.json"))
        .collect();
    manifests.sort();
    if manifests.len() != cmds_a.len() {
        return Err(format!("{} run manifests for {} commands", manifests.len(), cmds_a.len()));
    }
    for rm in &manifests {
        let recorded = manifest_json(rm);
        let main_out = PathBuf::from(recorded["outputs"][0].as_str().unwrap());
        let target = c.join(main_out.file_name().unwrap());
        run_ok(&["rerun".to_string(), s(rm), "--out".to_string(), s(&target)])?;
        let replayed = manifest_json(&c.join(rm.file_name().unwrap()));
        if replayed["config_hash"] != recorded["config_hash"] {
            return Err(format!("config hash changed on replay of {}", rm.display()));
        }
        let twin = manifest_json(&b.join(rm.file_name().unwrap()));
        if twin["config_hash"] != recorded["config_hash"] {
            return Err(format!("config hash depends on --jobs for {}", rm.display()));
        }
    }
    if outputs(&c) != names {
        return Err(format!("replay produced {:?}, expected {:?}", outputs(&c), names));
    }
    same_files(&a, &c, &names)?;
    let json = names.iter().filter(|n| n.ends_with(".json")).count();
    Ok(format!(
        "{} commands, {} output files ({json} JSON) identical across --jobs 1/4 and manifest replay",
        cmds_a.len(),
        names.len()
    ))
}
