use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn netlist(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("netlists").join(name)
}

fn magnonsim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnonsim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// CSV body without the `#` metadata block.
fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn shipped_netlists_match_builtins() {
    use magnonsim::logic::{BUFFER_NET, FIG3_NET, FIG4_NET, INVERTER_NET};
    for (file, text) in [("buffer.net", BUFFER_NET), ("inverter.net", INVERTER_NET), ("fig3.net", FIG3_NET), ("fig4.net", FIG4_NET)] {
        assert_eq!(fs::read_to_string(netlist(file)).unwrap(), text, "{file}");
    }
}

#[test]
fn fig3_truth_table() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["truth-table", "--netlist", netlist("fig3.net").to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("phase-only: NO; with timing: YES"), "{}", stdout(&o));
    let rows = body(&dir.path().join("truth_table.csv"));
    assert_eq!(rows[0], "in_A,in_B,out_A,out_B,t_A,t_B,reflect_events,status");
    let bits: Vec<&str> = rows[1..].iter().map(|r| &r[..7]).collect();
    assert_eq!(bits, ["0,0,1,0", "0,1,0,1", "1,0,1,0", "1,1,0,1"]);
    let meta = fs::read_to_string(dir.path().join("truth_table.csv")).unwrap();
    assert!(meta.contains("# injective_phase_only = false"));
    assert!(meta.contains("# injective_with_timing = true"));
}

#[test]
fn buffer_is_identity() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["truth-table", "--netlist", netlist("buffer.net").to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = body(&dir.path().join("truth_table.csv"));
    assert_eq!(rows[1..], ["0,0,4,0,ok", "1,1,4,0,ok"]);
}

#[test]
fn malformed_netlist_reports_line() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.net");
    fs::write(&bad, "gate bad\nport A in\nedge w A B len=oops\n").unwrap();
    let o = magnonsim(&["truth-table", "--netlist", bad.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_netlist_fails() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["truth-table", "--netlist", "no/such/file.net"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no/such/file.net"), "{}", stderr(&o));
}

#[test]
fn dissipation_worked_numbers() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["dissipation", "--length", "100nm", "--velocity", "1e6cm/s", "--tau", "1ns"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = body(&dir.path().join("dissipation.csv"));
    assert_eq!(rows.len(), 3);
    let cells: Vec<Vec<f64>> = rows[1..]
        .iter()
        .map(|r| r.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
        .collect();
    // additive, then literal product; columns: excitation, junction, propagation, total
    assert!((cells[0][1] - 8.0).abs() < 0.01);
    assert!((cells[0][2] - 0.79).abs() < 0.01);
    assert!((cells[0][3] - 10.03).abs() < 0.01);
    assert!((cells[1][3] - 1.40).abs() < 0.01);
    let meta = fs::read_to_string(dir.path().join("dissipation.csv")).unwrap();
    assert!(meta.contains("# param.t_s = 1e-11"), "{meta}");
}

#[test]
fn si_suffixes_are_validated() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["dissipation", "--t", "10 parsecs"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("invalid time"), "{}", stderr(&o));
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# four packets, cascaded\nn = 4\nnc = 2\nt = 20ps\n").unwrap();
    let o = magnonsim(&["dissipation", "--config", cfg.to_str().unwrap(), "--n", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let meta = fs::read_to_string(dir.path().join("dissipation.csv")).unwrap();
    assert!(meta.contains("# param.n = 2"), "flag must win: {meta}");
    assert!(meta.contains("# param.nc = 2"), "file value applies: {meta}");
    assert!(meta.contains("# param.t_s = 2e-11"), "{meta}");

    fs::write(&cfg, "n = 4\nwidth = 3\n").unwrap();
    let o = magnonsim(&["dissipation", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("run.cfg:2"), "{}", stderr(&o));
}

#[test]
fn sweep_t_increases_and_gamma_decreases() {
    let dir = TempDir::new().unwrap();
    for (axis, args) in [("t", ["--from", "1ps", "--to", "1ns"]), ("gamma", ["--from", "0", "--to", "0.99"])] {
        let o = magnonsim(&["sweep", "--axis", axis, args[0], args[1], args[2], args[3], "--steps", "6"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        let totals: Vec<f64> = body(&dir.path().join(format!("sweep_{axis}.csv")))[1..]
            .iter()
            .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(totals.len(), 6);
        for w in totals.windows(2) {
            if axis == "t" {
                assert!(w[1] > w[0], "{totals:?}");
            } else {
                assert!(w[1] < w[0], "{totals:?}");
            }
        }
    }
}

#[test]
fn junction_runs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["junction", "--arm-len", "120", "--width", "8", "--snapshot-stride", "2000"];
    for dir in [&a, &b] {
        let o = magnonsim(&args, dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("selectivity gamma"));
    }
    let mut files = vec!["junction.csv".to_string(), "lattice.csv".to_string()];
    let mut frames: Vec<String> = fs::read_dir(a.path().join("frames"))
        .unwrap()
        .map(|e| format!("frames/{}", e.unwrap().file_name().to_string_lossy()))
        .collect();
    frames.sort();
    assert!(frames.len() >= 2);
    files.extend(frames);
    for f in &files {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    let rows = body(&a.path().join("junction.csv"));
    let t_pi: f64 = rows[2].split(',').nth(4).unwrap().parse().unwrap();
    assert!(t_pi < 0.02, "{}", rows[2]);
}

#[test]
fn dispersion_csv() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["dispersion", "--k", "0.5,1.2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = body(&dir.path().join("dispersion.csv"));
    assert_eq!(rows.len(), 3);
    for r in &rows[1..] {
        let err: f64 = r.split(',').nth(3).unwrap().parse().unwrap();
        assert!(err.abs() < 0.01, "{r}");
    }
}

#[test]
fn verify_buffer_and_short_inverter() {
    let dir = TempDir::new().unwrap();
    let o = magnonsim(&["verify-physical", "--netlist", netlist("buffer.net").to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("2/2 rows agree"));

    // A 4-unit inverter is too short to resolve at 40 sites per unit; the
    // readout is ambiguous and the command says so with its own exit code.
    let o = magnonsim(&["verify-physical", "--netlist", netlist("inverter.net").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("ambiguous phase"));
    let o = magnonsim(
        &["verify-physical", "--netlist", netlist("inverter.net").to_str().unwrap(), "--sites-per-unit", "80"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn unknown_subcommand_and_axis_fail() {
    let dir = TempDir::new().unwrap();
    assert!(!magnonsim(&["teleport"], dir.path()).status.success());
    let o = magnonsim(&["sweep", "--axis", "mass", "--values", "1"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("mass"), "{}", stderr(&o));
}
