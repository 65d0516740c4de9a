use std::path::Path;
use std::process::{Command, Output};

fn volbound(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volbound"))
        .args(args)
        .current_dir(dir)
        .env("VOLBOUND_THREADS", "2")
        .output()
        .unwrap()
}

#[test]
fn figure_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = volbound(&["figure", "--id", "2", "--paths", "5000", "--steps", "32", "--out", "f.txt"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let main = std::fs::read_to_string(dir.path().join("f.txt")).unwrap();
    let se = std::fs::read_to_string(dir.path().join("f.se.txt")).unwrap();
    assert_eq!(main.lines().count(), 22);
    assert_eq!(se.lines().count(), 22);
    assert_eq!(main.lines().next(), Some("x\ty1\ty2\ty3"));
    assert_eq!(se.lines().next(), Some("x\ty1_se\ty2_se\ty3_se"));
    let volswap: Vec<&str> = main.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert!(volswap.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn figure_defaults_to_preset_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = volbound(&["figure", "--id", "3", "--paths", "2000", "--steps", "16"], dir.path());
    assert!(out.status.success());
    assert!(dir.path().join("fig3.txt").exists());
    assert!(dir.path().join("fig3.se.txt").exists());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# small sweep\nsigma0 = 0.2\nalpha = 0.4\nT = 0.25\nrho_start = -0.5\nrho_end = 0.5\nrho_step = 0.25\n\
         paths = 3000\nsteps = 16\nout = from_file.txt\n",
    )
    .unwrap();
    let out = volbound(&["sweep", "--config", "run.cfg", "--out", "from_flag.txt"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("from_file.txt").exists());
    let text = std::fs::read_to_string(dir.path().join("from_flag.txt")).unwrap();
    let rhos: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(rhos, ["-0.5000000000", "-0.2500000000", "0.000000000", "0.2500000000", "0.5000000000"]);
}

#[test]
fn one_shot_estimators() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--paths", "4000", "--steps", "16", "--alpha", "1e-12", "--sigma0", "0.2", "--T", "1"];

    let out = volbound(&[&["volswap"][..], &common].concat(), dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.lines().nth(1).unwrap().split('\t').next().unwrap().parse().unwrap();
    assert!((value - 0.2).abs() < 1e-9);

    let out = volbound(&[&["price", "--rho", "0", "--k", "0"][..], &common].concat(), dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.lines().nth(1).unwrap().split('\t').next().unwrap().parse().unwrap();
    assert!((value - 0.0796557).abs() < 1e-6);

    let out = volbound(&[&["zviv", "--rho", "0"][..], &common].concat(), dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<f64> = text.lines().nth(1).unwrap().split('\t').map(|f| f.parse().unwrap()).collect();
    assert!((fields[0] + 0.02).abs() < 1e-8);
    assert!((fields[1] - 0.2).abs() < 1e-8);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sweep", "--alpha", "-1"][..],
        &["sweep", "--rho-start", "0.5", "--rho-end", "-0.5"],
        &["sweep", "--paths", "0"],
        &["figure", "--id", "9"],
        &["sweep", "--config", "missing.cfg"],
        &["price", "--rho", "1.5", "--k", "0", "--paths", "10"],
        &["sweep", "--unknown-flag"],
    ] {
        let out = volbound(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    std::fs::write(dir.path().join("bad.cfg"), "sigma0 = 0.3\nvol = 2\n").unwrap();
    assert_eq!(volbound(&["sweep", "--config", "bad.cfg"], dir.path()).status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_volbound"))
        .args(["volswap", "--paths", "10"])
        .env("VOLBOUND_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = volbound(
        &[
            "sweep",
            "--paths",
            "500",
            "--steps",
            "8",
            "--rho-start",
            "0",
            "--rho-end",
            "0",
            "--out",
            "no/such/dir/x.txt",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}
