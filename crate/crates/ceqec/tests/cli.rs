use std::path::{Path, PathBuf};
use std::process::Command;

use ceqec::circuitfile::{parse_circuit, serialize_circuit};
use ceqec::cli::main_with;
use ceqec::codefile::{parse_code, serialize_code};
use ceqec::sim::CSV_HEADER;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ceqec").chain(args.iter().copied()).map(Into::into);
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn codes_check_c12() {
    let (code, out, _) = run(&["codes", "check", "c12"]);
    assert_eq!(code, 0);
    assert!(out.contains("CE=true w=6"), "{out}");
    assert!(out.contains("distance(<=3 search)=3"), "{out}");
}

#[test]
fn steane_fails_the_ce_check() {
    let (code, out, _) = run(&["codes", "check", "steane"]);
    assert_eq!(code, 1);
    assert!(out.contains("CE=false"), "{out}");
}

#[test]
fn shipped_code_files_match_builtins() {
    for name in ["c4", "c12", "c14", "c10"] {
        let shipped = std::fs::read_to_string(data(&format!("codes/{name}.code"))).unwrap();
        let (code, out, _) = run(&["codes", "show", name]);
        assert_eq!(code, 0);
        assert_eq!(out, shipped);
        assert_eq!(serialize_code(&parse_code(&shipped).unwrap()), shipped);
        let (code, out, _) = run(&["codes", "check", path_str(&data(&format!("codes/{name}.code")))]);
        assert_eq!(code, 0, "{out}");
    }
}

#[test]
fn shipped_circuits_round_trip_and_match_builders() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("c12_shor.ceqc", vec!["--code", "c12"]),
        ("c12_shor_packed.ceqc", vec!["--code", "c12", "--schedule", "packed"]),
        ("c12_steane.ceqc", vec!["--code", "c12", "--method", "steane"]),
        ("c4_shor.ceqc", vec!["--code", "c4"]),
    ];
    for (file, flags) in cases {
        let shipped = std::fs::read_to_string(data(&format!("circuits/{file}"))).unwrap();
        assert_eq!(serialize_circuit(&parse_circuit(&shipped).unwrap()), shipped, "{file}");
        let target = dir.path().join(file);
        let mut args = vec!["circuit", "build"];
        args.extend(flags);
        args.extend(["-o", path_str(&target)]);
        assert_eq!(run(&args).0, 0);
        assert_eq!(std::fs::read_to_string(&target).unwrap(), shipped, "{file}");
    }
    let (code, out, _) = run(&["circuit", "check", path_str(&data("circuits/c12_shor_packed.ceqc"))]);
    assert_eq!(code, 0);
    assert!(out.contains("depth=6 locations=140"), "{out}");
}

#[test]
fn bad_circuit_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.ceqc");
    std::fs::write(&f, "ceqc v1\nqubits 2\ndata 0..1\nlayer: CX 0 0\n").unwrap();
    let (code, _, err) = run(&["circuit", "check", path_str(&f)]);
    assert_eq!(code, 1);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn trace_lines_follow_the_dump_format() {
    let (code, out, _) =
        run(&["circuit", "trace", path_str(&data("circuits/c4_shor.ceqc")), "--fault", "3:X", "--theta", "0.3"]);
    assert_eq!(code, 0);
    let events: Vec<&str> = out.lines().filter(|l| l.starts_with("t=")).collect();
    assert!(!events.is_empty());
    for l in &events {
        let fields: Vec<&str> = l.splitn(5, ' ').collect();
        assert!(fields[1].starts_with("kind=") && fields[2].starts_with("a=") && fields[3].starts_with("b="), "{l}");
        assert!(fields[4].starts_with("records=[") && fields[4].ends_with(']'), "{l}");
    }
    assert!(out.contains("records=[(-0.600000,002)]"), "{out}");
    let (code, _, err) = run(&["circuit", "trace", path_str(&data("circuits/c4_shor.ceqc")), "--fault", "3:flip"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn twirl_quarter_turn() {
    let (code, out, _) = run(&["twirl", "--lambda", "0", "--theta", "0.7853981634", "--p", "0.001"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("lambda,p,theta,q0,q1,q2,q3,R,gain_t1"));
    let q3: f64 = lines.next().unwrap().split(',').nth(6).unwrap().parse().unwrap();
    assert!((q3 - 0.5).abs() < 1e-9);
}

#[test]
fn twirl_sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("twirl.csv");
    let args = ["twirl", "--lambda", "0.5", "--p", "0.001", "--theta", "0.1", "--sweep", "theta=0:1.5:4", "-o", path_str(&f)];
    assert_eq!(run(&args).0, 0);
    assert_eq!(std::fs::read_to_string(&f).unwrap().lines().count(), 5);
    assert_eq!(run(&["twirl", "--lambda", "0", "--p", "0", "--theta", "0", "--sweep", "x=1"]).0, 2);
}

#[test]
fn searches() {
    let (code, out, _) = run(&["search", "lemma3"]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with("RESULT: exists=false"));
    let (_, out, _) = run(&["search", "lemma3", "--sanity"]);
    assert!(out.trim_end().ends_with("RESULT: exists=true"));
    for n in ["8", "9"] {
        let (code, out, _) = run(&["search", "lemma2", "--n", n]);
        assert_eq!(code, 0);
        assert!(out.trim_end().ends_with("RESULT: exists=false"), "{out}");
    }
    assert_eq!(run(&["search", "lemma2"]).0, 2);
    assert_eq!(run(&["search", "lemma2", "--n", "7"]).0, 1);
}

#[test]
fn calibrate_flags_deviations() {
    let (code, out, _) = run(&["calibrate"]);
    assert_eq!(code, 0);
    assert!(out.contains("deviations: c0x, c0z"), "{out}");
}

#[test]
fn verify_ft_writes_and_reads_tables() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("c4.table");
    let report = dir.path().join("c4.csv");
    let (code, out, _) =
        run(&["verify-ft", "--code", "c4", "--table", path_str(&table), "--csv", path_str(&report)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("fault_tolerant=true"));
    let csv = std::fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("round,layer,kind,qubits,fault,input,syndrome2,residual,status\n"));
    let (code, out2, _) = run(&["verify-ft", "--code", "c4", "--load-table", path_str(&table)]);
    assert_eq!(code, 0);
    assert_eq!(out, out2);
}

#[test]
fn sim_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "code = c4\np = 0.002, 0.02\ngamma = 0.5\ncc_policy = off, random_per_trial\ntrials = 2000\n").unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "2"] {
        let out = dir.path().join(format!("out{jobs}.csv"));
        let args = ["sim", "--config", path_str(&cfg), "--seed", "11", "--jobs", jobs, "-o", path_str(&out)];
        let (code, _, err) = run(&args);
        assert_eq!(code, 0, "{err}");
        assert!(err.contains("wall_time="));
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let lines: Vec<&str> = outputs[0].lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",11")));
}

#[test]
fn threshold_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.cfg");
    std::fs::write(&cfg, "code = c4\np_min = 1e-3\np_max = 1e-1\nper_decade = 2\ngamma = 1\ntrials = 500\nseed = 2\n").unwrap();
    let out = dir.path().join("t.csv");
    let plots = dir.path().join("plots");
    let args = ["threshold", "--config", path_str(&cfg), "-o", path_str(&out), "--plot-data", path_str(&plots)];
    let (code, stdout, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("gamma=1 cc=off"), "{stdout}");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 6);
    let plot = std::fs::read_to_string(plots.join("gamma1_off.dat")).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn config_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "p = 0.1\nflavour = 3\n").unwrap();
    let (code, _, err) = run(&["sim", "--config", path_str(&cfg)]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.cfg") && err.contains("line 2"), "{err}");
    assert_eq!(run(&["sim", "--set", "nonsense"]).0, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ceqec");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let v = status(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).starts_with("ceqec "));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
    assert_eq!(status(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(status(&["codes", "show", "c99"]).status.code(), Some(1));
    let ok = status(&["search", "lemma3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("RESULT: exists=false"));
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(data("configs")).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ceqec::config::Config::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(!cfg.p_values().unwrap().is_empty(), "{}", path.display());
        assert!(!cfg.cc_policies().unwrap().is_empty());
        n += 1;
    }
    assert!(n >= 3);
}
