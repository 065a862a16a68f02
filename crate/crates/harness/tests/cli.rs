use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;

use qrc_core::optics::DEFAULT_R_SCALE;
use qrc_core::reservoir::{observables_from_covariance, Backend, Normalization, ObservableSelection};

fn qrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrc")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let k = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[k].parse().unwrap()).collect()
}

fn metric_values(dir: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(dir.join("metrics.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect()
}

fn run(tmp: &TempDir, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = write(tmp.path(), "run.toml", config);
    let out = tmp.path().join("out");
    let mut args = vec!["run-task", "--quiet", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (qrc(&args), out)
}

const SEEDS: &str = "seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]\n";

#[test]
fn toy_crystal_dump_is_normalized() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "jsa.toml", "toy_index = 1.8\nmodes = 8\n[source]\ngrid_points = 64\n");
    let out = tmp.path().join("jsa");
    let o = qrc(&["jsa", "--quiet", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["jsa_magnitude.csv", "schmidt_spectrum.csv", "mode_profiles.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let c = column(&out.join("schmidt_spectrum.csv"), "coefficient");
    let total: f64 = c.iter().map(|x| x * x).sum();
    assert!((total - 1.0).abs() < 1e-10, "{total}");
    assert_eq!(column(&out.join("mode_profiles.csv"), "mode").len(), 8 * 64);
}

#[test]
fn ktp_source_has_at_least_twenty_modes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "jsa.toml", "modes = 40\n");
    let out = tmp.path().join("jsa");
    let o = qrc(&["jsa", "--quiet", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = column(&out.join("schmidt_spectrum.csv"), "coefficient");
    let above = c.iter().filter(|&&x| x > 0.01 * c[0]).count();
    assert!(above >= 20, "{above}");
}

#[test]
fn missing_crystal_file_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nowhere").join("ppktp.toml");
    let cfg = write(tmp.path(), "jsa.toml", &format!("crystal = {:?}\n", missing.to_str().unwrap()));
    let o = qrc(&["jsa", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(missing.to_str().unwrap()), "{}", stderr(&o));
    assert!(stderr(&o).contains("crystal"));
}

#[test]
fn xor_at_low_noise_over_ten_seeds() {
    let tmp = TempDir::new().unwrap();
    let (o, out) = run(&tmp, &format!("task = \"xor\"\nnoise = \"low\"\n{SEEDS}"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = metric_values(&out);
    assert_eq!(v.len(), 10);
    let mean = v.iter().sum::<f64>() / 10.0;
    assert!(mean >= 0.95, "{mean}");
    for s in 0..10 {
        assert!(out.join(format!("predictions_seed{s}.csv")).is_file());
        assert!(out.join(format!("traces_seed{s}.csv")).is_file());
    }
    assert!(out.join("run.json").is_file() && out.join("timing.json").is_file());
}

#[test]
fn memory_r5_capacity() {
    let tmp = TempDir::new().unwrap();
    let (o, out) = run(&tmp, &format!("task = \"memory\"\npreset = \"memory-r5\"\nnoise = \"low\"\ntau = 1\n{SEEDS}"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = metric_values(&out);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean >= 0.70, "{mean}");
}

#[test]
fn summary_table_is_printed() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "run.toml", "task = \"xor\"\nseeds = [0, 1]\n");
    let out = tmp.path().join("o");
    let o = qrc(&["run-task", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("accuracy") && text.contains("mean") && text.contains("std"), "{text}");
}

#[test]
fn invalid_preset_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let (o, _) = run(&tmp, "task = \"xor\"\npreset = \"xor-r9\"\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("preset"));
}

#[test]
fn identical_runs_give_identical_metrics() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = "task = \"memory\"\nnoise = \"average\"\nseeds = [3, 4]\n";
    let (oa, da) = run(&a, cfg, &[]);
    let (ob, db) = run(&b, cfg, &[]);
    assert!(oa.status.success() && ob.status.success());
    let ra = std::fs::read(da.join("metrics.json")).unwrap();
    assert_eq!(ra, std::fs::read(db.join("metrics.json")).unwrap());
    let (oc, dc) = run(&a, cfg, &["--seed", "5"]);
    assert!(oc.status.success());
    assert_ne!(ra, std::fs::read(dc.join("metrics.json")).unwrap());
}

#[test]
fn sweep_writes_long_format() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "s.toml", "task = \"memory\"\npreset = \"memory-r5\"\nnoise = \"low\"\nseeds = [0, 1]\n");
    let out = tmp.path().join("sweep");
    let o = qrc(&[
        "sweep", "--quiet", "--config", cfg.to_str().unwrap(), "--axis", "tau", "--values", "1,2,3,4", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let tau = column(&out.join("sweep.csv"), "axis_value");
    let cap = column(&out.join("sweep.csv"), "value");
    assert_eq!(tau.len(), 8);
    let mean = |t: f64| {
        let v: Vec<f64> = tau.iter().zip(&cap).filter(|(a, _)| **a == t).map(|(_, c)| *c).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(mean(1.0) > mean(2.0) && mean(2.0) > mean(3.0) && mean(3.0) > mean(4.0));
}

#[test]
fn empty_or_malformed_sweep_axis_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "s.toml", "task = \"xor\"\n[sweep]\naxis = \"tau\"\nvalues = []\n");
    let o = qrc(&["sweep", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("empty"));
    let cfg = write(tmp.path(), "s2.toml", "task = \"xor\"\n");
    for (axis, values) in [("tau", "one,two"), ("depth", "1")] {
        let o = qrc(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", axis, "--values", values]);
        assert_eq!(o.status.code(), Some(2), "{axis}");
    }
}

/// Long-format repeated traces around the single-mode prediction.
fn synthetic_traces(std: f64, seed: u64) -> String {
    let sel = ObservableSelection::single_mode(Normalization::MinMax);
    let backend = Backend::single_mode(DEFAULT_R_SCALE);
    let scaler = backend.analytic_scaler(&sel).unwrap().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, std.max(f64::MIN_POSITIVE)).unwrap();
    let mut text = String::from("phase,repetition,observable,value\n");
    for k in 0..40 {
        let phase = k as f64 * std::f64::consts::PI / 40.0;
        let mean = observables_from_covariance(&backend.covariance(&[phase]).unwrap(), &sel, Some(&scaler)).unwrap();
        for rep in 0..25 {
            for (j, m) in mean.iter().enumerate() {
                let v = if std > 0.0 { m + noise.sample(&mut rng) } else { *m };
                text.push_str(&format!("{phase},{rep},{},{v}\n", sel.name(j)));
            }
        }
    }
    text
}

fn fitted_std(tmp: &TempDir, traces: &str, reference: &str) -> Vec<f64> {
    let t = write(tmp.path(), "traces.csv", traces);
    let out = tmp.path().join("noise.toml");
    let o = qrc(&["fit-noise", "--quiet", t.to_str().unwrap(), "--out", out.to_str().unwrap(), "--reference", reference]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: toml::Value = toml::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    v["std"].as_array().unwrap().iter().map(|x| x.as_float().unwrap()).collect()
}

#[test]
fn noiseless_traces_fit_zero_noise() {
    let tmp = TempDir::new().unwrap();
    let traces = synthetic_traces(0.0, 0);
    for reference in ["sample-mean", "single-mode"] {
        let s = fitted_std(&tmp, &traces, reference);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| *x < 1e-8), "{reference}: {s:?}");
    }
}

#[test]
fn known_noise_is_recovered() {
    let tmp = TempDir::new().unwrap();
    let traces = synthetic_traces(0.05, 42);
    for reference in ["sample-mean", "single-mode"] {
        let s = fitted_std(&tmp, &traces, reference);
        assert!(s.iter().all(|x| (x - 0.05).abs() <= 0.01), "{reference}: {s:?}");
    }
}

#[test]
fn fitted_noise_file_is_a_usable_noise_level() {
    let tmp = TempDir::new().unwrap();
    let s = fitted_std(&tmp, &synthetic_traces(0.03, 1), "single-mode");
    let noise = std::fs::read_to_string(tmp.path().join("noise.toml")).unwrap();
    let inline = noise.lines().find(|l| l.starts_with("std")).unwrap();
    let (o, _) = run(&tmp, &format!("task = \"xor\"\nnoise = {{ {inline} }}\n"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(s.len(), 3);
}

#[test]
fn headerless_trace_file_reports_line_one() {
    let tmp = TempDir::new().unwrap();
    let t = write(tmp.path(), "bad.csv", "0.0,0,q1q1,0.5\n0.0,1,q1q1,0.52\n");
    let o = qrc(&["fit-noise", t.to_str().unwrap(), "--out", tmp.path().join("n.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    let t = write(tmp.path(), "short.csv", "phase,repetition,observable,value\n0,0,q1q1,0.5\n0,1,q1q1\n");
    let o = qrc(&["fit-noise", t.to_str().unwrap(), "--out", tmp.path().join("n.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn single_repetition_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let t = write(tmp.path(), "one.csv", "phase,repetition,observable,value\n0,0,q1q1,0.5\n1,0,q1q1,0.4\n");
    let o = qrc(&["fit-noise", t.to_str().unwrap(), "--out", tmp.path().join("n.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
