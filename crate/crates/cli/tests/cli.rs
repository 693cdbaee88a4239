//! End-to-end runs of the `smrt` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use smrt_core::io::{boundary_from_file, boundary_to_file, read_file, write_file, Provenance, ReportFile};

const SMALL_CONFIG: &str = "n_theta = 64\nn_t = 256\nn_r = 129\nm_max = 6\nh_r = 0.0078125\nh_t = 0.00390625\nepsilon = 0.0078125\n";

fn smrt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smrt")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("small.cfg"), SMALL_CONFIG).unwrap();
        let w = Workspace { dir };
        let o = w.run(&["phantom", "--preset", "three-bumps", "--out", "ph.txt"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = w.run(&["forward", "ph.txt", "--config", "small.cfg", "--out", "g.smrt"]);
        assert!(o.status.success(), "{}", stderr(&o));
        w
    }

    fn run(&self, args: &[&str]) -> Output {
        smrt(self.dir.path(), args)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn check_accepts_forward_data() {
    let w = Workspace::new();
    let o = w.run(&["check", "g.smrt", "--config", "small.cfg", "--out", "rep.smrt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("bessel-zero"));
    let rep = ReportFile::from_file(&read_file(&w.path("rep.smrt")).unwrap()).unwrap();
    assert!(rep.all_pass);
    assert!(!rep.rows.is_empty());
}

#[test]
fn check_accepts_zero_data() {
    let w = Workspace::new();
    let g = boundary_from_file(&read_file(&w.path("g.smrt")).unwrap()).unwrap().scaled(0.0);
    write_file(&w.path("zero.smrt"), &boundary_to_file(&g, &Provenance::default())).unwrap();
    let o = w.run(&["check", "zero.smrt", "--config", "small.cfg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn check_rejects_perturbed_data_with_bessel_zero_rows() {
    let w = Workspace::new();
    let o = w.run(&["forward", "ph.txt", "--config", "small.cfg", "--perturb", "zero:m=2,l=1,j=3,amp=1e-3", "--out", "gp.smrt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = w.run(&["check", "gp.smrt", "--config", "small.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL bessel-zero m=2 l=1 j=3"), "{}", stdout(&o));
    let o = w.run(&["forward", "ph.txt", "--config", "small.cfg", "--perturb", "bump:m=1,l=2,amp=1e-2,t0=1.2,width=0.05", "--out", "gb.smrt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(w.run(&["check", "gb.smrt", "--config", "small.cfg"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic_and_carry_provenance() {
    let w = Workspace::new();
    let o = w.run(&["forward", "ph.txt", "--config", "small.cfg", "--out", "g2.smrt"]);
    assert!(o.status.success());
    let a = std::fs::read_to_string(w.path("g.smrt")).unwrap();
    let b = std::fs::read_to_string(w.path("g2.smrt")).unwrap();
    assert_eq!(a.replace("g.smrt", "g2.smrt"), b);
    let f = read_file(&w.path("g.smrt")).unwrap();
    assert_eq!(f.get("provenance.command").unwrap(), "smrt forward ph.txt --config small.cfg --out g.smrt");
    assert_eq!(f.get("config.n_theta").unwrap(), "64");
    assert_eq!(f.get("provenance.config_hash").unwrap().len(), 64);
}

#[test]
fn malformed_inputs_name_the_problem() {
    let w = Workspace::new();
    let text = std::fs::read_to_string(w.path("g.smrt")).unwrap();
    std::fs::write(w.path("bad.smrt"), text.replacen("t.len", "t.length", 1)).unwrap();
    let o = w.run(&["check", "bad.smrt", "--config", "small.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t.length"), "{}", stderr(&o));

    let mut lines: Vec<&str> = text.lines().collect();
    let last = lines.len() - 1;
    lines[last] = "1.0 nope";
    std::fs::write(w.path("bad2.smrt"), lines.join("\n")).unwrap();
    let o = w.run(&["check", "bad2.smrt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("line {}", lines.len())), "{}", stderr(&o));

    std::fs::write(w.path("bad.cfg"), "n_t = 256\nbogus = 1\n").unwrap();
    let o = w.run(&["check", "g.smrt", "--config", "bad.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));

    let o = w.run(&["forward", "ph.txt", "--perturb", "zero:m=2,l=1", "--out", "x.smrt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`j`"), "{}", stderr(&o));
}

#[test]
fn invert_and_compare() {
    let w = Workspace::new();
    for (method, out, tol) in [("series", "fs.smrt", 1e-4), ("timereversal", "ft.smrt", 0.1)] {
        let o = w.run(&["invert", "g.smrt", "--config", "small.cfg", "--method", method, "--out", out, "--csv", "f.csv"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = w.run(&["compare", "ph.txt", out]);
        assert!(o.status.success(), "{}", stderr(&o));
        let table = stdout(&o);
        let l2: f64 = table
            .lines()
            .find(|l| l.starts_with("relative_l2"))
            .and_then(|l| l.split_whitespace().nth(1))
            .unwrap()
            .parse()
            .unwrap();
        assert!(l2 < tol, "{method}: {l2}");
    }
    let csv = std::fs::read_to_string(w.path("f.csv")).unwrap();
    assert!(csv.starts_with("x,y,value\n"));
}

#[test]
fn phantom_random_is_seeded() {
    let w = Workspace::new();
    std::fs::write(w.path("seed.cfg"), "seed = 42\ndim = 3\n").unwrap();
    for out in ["r1.txt", "r2.txt"] {
        assert!(w.run(&["phantom", "--random", "3", "--config", "seed.cfg", "--out", out]).status.success());
    }
    let a = std::fs::read_to_string(w.path("r1.txt")).unwrap();
    assert_eq!(a, std::fs::read_to_string(w.path("r2.txt")).unwrap());
    assert!(a.contains("dim = 3"));
    assert_eq!(a.matches("bump =").count(), 3);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = smrt(dir.path(), &["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
