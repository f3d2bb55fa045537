use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use interlacement::cli::MatrixReport;

const G_4PAR: &str = "# four parallel edges\nvertices: u v\nedge u.0 v.0\nedge u.1 v.1\nedge u.2 v.2\nedge u.3 v.3\n";
const G_LOOPS: &str = "vertices: a\nedge a.0 a.1\nedge a.2 a.3\n";

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir =
            std::env::temp_dir().join(format!("interlacement-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

fn run(args: &[&str], files: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interlacement"))
        .args(args)
        .args(files)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_and_euler() {
    let s = Scratch::new("euler");
    let g = s.file("g.txt", G_4PAR);
    let o = run(&["validate"], &[&g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 vertices, 4 edges, 1 component\n");
    let o = run(&["euler"], &[&g]);
    assert_eq!(stdout(&o), "u: 03|12\nv: 01|23\n# word: u v u v\n");
}

#[test]
fn euler_output_feeds_matrix() {
    let s = Scratch::new("matrix");
    let g = s.file("g.txt", G_4PAR);
    let c = s.file("c.txt", &stdout(&run(&["euler"], &[&g])));
    let p = s.file("p.txt", "u: phi\nv: psi\n");
    let o = Command::new(env!("CARGO_BIN_EXE_interlacement"))
        .arg("matrix")
        .arg(&g)
        .arg("--euler")
        .arg(&c)
        .arg("--partition")
        .arg(&p)
        .arg("--relative-to")
        .arg(&c)
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: MatrixReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.vertices, ["u", "v"]);
    assert_eq!(r.matrix, vec![vec![1, 1], vec![0, 1]]);
    assert_eq!((r.rank, r.p_size, r.components), (2, 1, 1));
    assert!(r.kernel.is_empty());

    let o = run(&["matrix"], &[&g]);
    let text = stdout(&o);
    assert!(text.contains("rank: 2\n"), "{text}");
    assert!(text.contains("kernel: none\n"), "{text}");
}

#[test]
fn relative_labels_need_reference() {
    let s = Scratch::new("relative");
    let g = s.file("g.txt", G_4PAR);
    let p = s.file("p.txt", "u: psi\nv: psi\n");
    let o = Command::new(env!("CARGO_BIN_EXE_interlacement"))
        .arg("matrix")
        .arg(&g)
        .arg("--partition")
        .arg(&p)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--relative-to"));
}

#[test]
fn malformed_graphs_exit_1_with_line() {
    let s = Scratch::new("bad");
    let reused = s.file("reused.txt", "vertices: a\nedge a.0 a.1\nedge a.1 a.2\n");
    let o = run(&["validate"], &[&reused]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(
        err.contains("line 3") && err.contains("SlotReused"),
        "{err}"
    );

    let missing = s.file("missing.txt", "vertices: a\nedge a.0 a.1\n");
    let o = run(&["validate"], &[&missing]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("SlotMissing"));

    let o = run(&["validate"], &[Path::new("/nonexistent/graph.txt")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn profile_and_orbit() {
    let s = Scratch::new("profile");
    let g = s.file("g.txt", G_LOOPS);
    let o = run(&["profile", "--engine", "both"], &[&g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1:2 2:1\nengines agree: yes\n");
    let o = run(&["orbit"], &[&g]);
    assert_eq!(stdout(&o), "orbit size: 2\na:02|13\na:03|12\n");
    let g4 = s.file("g4.txt", G_4PAR);
    assert_eq!(
        run(&["orbit", "--limit", "3"], &[&g4]).status.code(),
        Some(3)
    );
}

#[test]
fn resource_guards_exit_3() {
    let s = Scratch::new("guard");
    let big = stdout(&run(&["generate", "--vertices", "22", "--seed", "5"], &[]));
    let g = s.file("big.txt", &big);
    assert_eq!(run(&["profile"], &[&g]).status.code(), Some(3));
    assert_eq!(
        run(&["verify", "--exhaustive"], &[&g]).status.code(),
        Some(3)
    );
}

#[test]
fn verify_passes_and_detects_corruption() {
    let s = Scratch::new("verify");
    let g = s.file(
        "g.txt",
        &stdout(&run(&["generate", "--vertices", "3", "--seed", "9"], &[])),
    );
    let o = run(&["verify", "--exhaustive"], &[&g]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.starts_with("PASS")));

    let o = run(&["verify", "--exhaustive", "--corrupt-theorem1"], &[&g]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    let fails: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fails.len(), 1, "{text}");
    assert!(fails[0].starts_with("FAIL theorem1"));
}

#[test]
fn thread_count_does_not_change_output() {
    let s = Scratch::new("threads");
    let g = s.file(
        "g.txt",
        &stdout(&run(
            &["generate", "--vertices", "9", "--seed", "3", "--connected"],
            &[],
        )),
    );
    let outputs: Vec<Output> = ["1", "3", "8"]
        .iter()
        .map(|t| run(&["profile", "--engine", "both", "--threads", t], &[&g]))
        .collect();
    assert!(outputs.windows(2).all(|w| w[0].stdout == w[1].stdout));
    let samples: Vec<Output> = ["1", "4"]
        .iter()
        .map(|t| {
            run(
                &["verify", "--samples", "30", "--seed", "7", "--threads", t],
                &[&g],
            )
        })
        .collect();
    assert_eq!(samples[0].stdout, samples[1].stdout);
    assert_eq!(samples[0].status.code(), Some(0));
}

#[test]
fn generate_is_deterministic_and_valid() {
    let a = run(&["generate", "--vertices", "6", "--seed", "42"], &[]);
    let b = run(&["generate", "--vertices", "6", "--seed", "42"], &[]);
    assert_eq!(a.stdout, b.stdout);
    let s = Scratch::new("generate");
    let g = s.file("g.txt", &stdout(&a));
    let o = run(&["validate"], &[&g]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("6 vertices, 12 edges"));
    assert_eq!(
        run(&["generate", "--vertices", "0"], &[]).status.code(),
        Some(1)
    );
}
