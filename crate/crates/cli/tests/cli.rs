use std::path::Path;
use std::process::{Command, Output};

fn autoion(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autoion"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let meta = text.lines().filter(|l| l.starts_with('#')).map(str::to_owned).collect();
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (meta, rows)
}

fn col(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn spectra_files_and_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let out = autoion(&["spectra", "--preset", "a-prime", "--grid=-0.5656:-0.3656:2001", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (meta, rows) = read_rows(&dir.path().join("o/a-prime_spectra.csv"));
    assert!(meta.iter().any(|m| m.starts_with("# scenario_hash = ")));
    assert!(meta.iter().any(|m| m.starts_with("# p0 = ")));
    assert_eq!(rows.len(), 2001);
    let (w0, w1, c0, c1) = (col(&rows, 1), col(&rows, 2), col(&rows, 4), col(&rows, 5));
    let sup = w0.iter().copied().fold(0.0, f64::max);
    let gap = w0.iter().zip(&w1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let cgap = c0.iter().zip(&c1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap / sup < 0.05);
    assert!(cgap / sup > 0.1);
    // 17 significant digits.
    assert_eq!(rows[0][1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    let pops: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/a-prime_populations.json")).unwrap()).unwrap();
    assert!(pops["p0"].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let o = autoion(&["spectra", "--preset", "c", "--grid=-2:3:301", "--out", sub], dir.path());
        assert!(o.status.success());
        let o = autoion(&["negativity", "--preset", "c", "--map-grid=-2:3:21", "--out", sub], dir.path());
        assert!(o.status.success());
    }
    for f in ["c_spectra.csv", "c_populations.json", "c_negativity.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn zero_field_gives_zero_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let o = autoion(&["spectra", "--preset", "b", "--omega", "0", "--grid=-2:3:101", "--out", "."], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_rows(&dir.path().join("b_spectra.csv"));
    assert!(col(&rows, 3).iter().all(|w| *w == 0.0));
    assert!(rows.iter().all(|r| r[4] == "NA" && r[5] == "NA"));
}

#[test]
fn fano_zero_restored_by_discrete_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let min_of = |preset: &str| {
        let o = autoion(&["spectra", "--preset", preset, "--pump", "coherent:3", "--grid=-2:3:2001", "--out", "."], dir.path());
        assert!(o.status.success());
        let (_, rows) = read_rows(&dir.path().join(format!("{preset}_spectra.csv")));
        col(&rows, 3).into_iter().fold(f64::INFINITY, f64::min)
    };
    assert!(min_of("c") < 1e-2 * min_of("b"));
}

#[test]
fn negativity_maps() {
    let dir = tempfile::tempdir().unwrap();
    let o = autoion(&["negativity", "--preset", "b", "--pump", "fock:1", "--map-grid=-2:3:21", "--out", "one"], dir.path());
    assert!(o.status.success());
    let (_, rows) = read_rows(&dir.path().join("one/b_negativity.csv"));
    assert_eq!(rows.len(), 441);
    assert!(rows.iter().all(|r| r[2] == "NA" || r[2].parse::<f64>().unwrap() == 0.0));

    let o = autoion(&["negativity", "--preset", "b", "--pump", "fock:2", "--map-grid=-2:3:21", "--out", "two"], dir.path());
    assert!(o.status.success());
    let (_, rows) = read_rows(&dir.path().join("two/b_negativity.csv"));
    let value = |i: usize, k: usize| rows[i * 21 + k][2].clone();
    let mut max: f64 = 0.0;
    for i in 0..21 {
        assert_eq!(value(i, i), "NA");
        for k in 0..21 {
            assert_eq!(rows[i * 21 + k][0], rows[k * 21 + i][1]);
            if i != k {
                let (a, b): (f64, f64) = (value(i, k).parse().unwrap(), value(k, i).parse().unwrap());
                assert!((a - b).abs() <= 1e-10);
                max = max.max(a);
            }
        }
    }
    assert!(max > 1e-3);
}

#[test]
fn fock_components_both_normalizations() {
    let dir = tempfile::tempdir().unwrap();
    let o = autoion(&["fock-components", "--preset", "a-prime", "--grid=-5:10:51", "--out", "w"], dir.path());
    assert!(o.status.success());
    let o = autoion(
        &["fock-components", "--preset", "a-prime", "--grid=-5:10:51", "--normalization", "unweighted", "--out", "u"],
        dir.path(),
    );
    assert!(o.status.success());
    let (meta, w) = read_rows(&dir.path().join("w/a-prime_fock2.csv"));
    let (_, u) = read_rows(&dir.path().join("u/a-prime_fock2.csv"));
    let weight: f64 = meta.iter().find_map(|m| m.strip_prefix("# pump_weight = ")).unwrap().parse().unwrap();
    assert!((weight - (-1.0f64).exp() / 2.0).abs() < 1e-15);
    for (a, b) in col(&w, 1).iter().zip(col(&u, 1)) {
        assert!((a - weight * b).abs() <= 1e-14 * a.abs().max(1e-300));
    }
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "name = \"x\"\nt = \"late\"\n").unwrap();
    let o = autoion(&["spectra", "--scenario", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cli::load_scenario") && err.contains("line 2"), "{err}");

    for args in [
        vec!["spectra"],
        vec!["spectra", "--preset", "z"],
        vec!["spectra", "--preset", "b", "--grid", "3:1:10"],
        vec!["spectra", "--preset", "b", "--pump", "coherent:-1"],
        vec!["spectra", "--preset", "b", "--pairing", "sideways"],
    ] {
        let o = autoion(&args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn scenario_file_raw_mode() {
    let dir = tempfile::tempdir().unwrap();
    let text = "name = \"raw\"\nt = 2.0\n\n[raw]\nv = 0.5641895835477563\nmu = 0.019947114020071637\nmu_b = [0.035355339059327376, 0.0]\n\n[pump]\nkind = \"fock\"\nfock_n = 1\n\n[grid]\nmin = -2.0\nmax = 3.0\ncount = 51\n";
    std::fs::write(dir.path().join("raw.toml"), text).unwrap();
    let o = autoion(&["spectra", "--scenario", "raw.toml", "--out", "."], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_rows(&dir.path().join("raw_spectra.csv"));
    assert!(col(&rows, 2).iter().all(|w| *w == 0.0));
    assert!(col(&rows, 1).iter().any(|w| *w > 0.0));
}

#[test]
fn verify_passes_then_fails_on_coarse_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = autoion(&["verify", "--preset", "a", "--pump", "fock:1", "--map-grid=-2:3:11", "--out", "."], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    let o = autoion(&["verify", "--preset", "a", "--pump", "fock:1", "--map-grid=-2:3:11", "--h", "0.5", "--out", "coarse"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("coarse/a_verify.json")).unwrap()).unwrap();
    for c in report["checks"].as_array().unwrap() {
        let name = c["name"].as_str().unwrap();
        assert_eq!(c["pass"].as_bool().unwrap(), !name.starts_with("oracle_agreement"), "{name}");
    }
}

#[test]
fn verify_tolerates_flipped_coupling_sign() {
    let dir = tempfile::tempdir().unwrap();
    let text = "name = \"flip\"\n\n[raw]\nv = -0.5641895835477563\nmu = 0.019947114020071637\nmu_b = 0.035355339059327376\n\n[pump]\nkind = \"fock\"\nfock_n = 1\n\n[map_grid]\nmin = -2.0\nmax = 3.0\ncount = 11\n\n[oracle]\nh = 0.002\n[oracle.grid]\nmin = -20.0\nmax = 22.0\ncount = 2001\n";
    std::fs::write(dir.path().join("flip.toml"), text).unwrap();
    let o = autoion(&["verify", "--scenario", "flip.toml", "--out", "."], dir.path());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("flip_verify.json")).unwrap()).unwrap();
    for c in report["checks"].as_array().unwrap() {
        if ["sylvester_residual", "complete_ionization"].contains(&c["name"].as_str().unwrap()) {
            assert!(c["pass"].as_bool().unwrap(), "{c}");
        }
    }
    assert!(o.status.code() == Some(0) || o.status.code() == Some(3));
}
