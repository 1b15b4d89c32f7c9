mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

use panelize::fixtures::{reference_mesh, reference_stiffeners};
use panelize::global::{run_global_local, LoopConfig, LoopStatus, StiffnessRedistribution};
use panelize::manifest::{read_manifest, Manifest, StiffenerRecord};
use panelize::sizing::SmearedPlate;
use panelize::stiffener::{associate_stiffeners, chains_by_panel};
use panelize::{build_adjacency, decompose, DividingCurve};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_panelize"))
        .args(args)
        .env("PANELIZE_LOG", "error")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fx(name: &str) -> String {
    common::fixture(name).to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn decomposed(dir: &TempDir) -> PathBuf {
    let out = dir.path().join("panels.json");
    let o = run(&[
        "decompose",
        "--mesh",
        &fx("reference.bdf"),
        "--curves",
        &fx("mid_row_curve.json"),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    out
}

fn stiffened(dir: &TempDir) -> PathBuf {
    let out = dir.path().join("stiffened.json");
    let m = decomposed(dir);
    let o = run(&[
        "stiffen",
        "--manifest",
        s(&m),
        "--mesh",
        &fx("stiffeners.bdf"),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    out
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn decompose_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let o = run(&[
        "decompose",
        "--mesh",
        &fx("reference.bdf"),
        "--curves",
        &fx("mid_row_curve.json"),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "2 panels, elements 8 + 8 = 16\n"
    );

    let idx = build_adjacency(&reference_mesh()).unwrap();
    let curves = vec![DividingCurve::from_ids(6..=10).unwrap()];
    let expected = Manifest {
        mesh: Some(fx("reference.bdf")),
        curves: curves.clone(),
        ..Manifest::from_panels(&decompose(&idx, &curves).unwrap())
    };
    assert_eq!(read_manifest(&out).unwrap(), expected);
}

#[test]
fn decompose_without_curves_gives_one_panel() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let o = run(&[
        "decompose",
        "--mesh",
        &fx("reference.bdf"),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_manifest(&out).unwrap().panels.len(), 1);
}

#[test]
fn parse_failures_exit_1() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let o = run(&[
        "decompose",
        "--mesh",
        "does/not/exist.bdf",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    let bad = write(&dir, "bad.bdf", "GRID,1,,0.,0.,0.\nGRID,2,,1.,x,0.\n");
    let o = run(&["decompose", "--mesh", s(&bad), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let curves = write(&dir, "c.json", "[[6, 7,");
    let o = run(&[
        "decompose",
        "--mesh",
        &fx("reference.bdf"),
        "--curves",
        s(&curves),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let m = decomposed(&dir);
    let config = write(&dir, "c.toml", "[material]\nE = 71e9\n");
    let o = run(&["optimize", "--manifest", s(&m), "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn topology_failures_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let dangling = write(&dir, "d.json", "[[6, 7, 8]]");
    let o = run(&[
        "decompose",
        "--mesh",
        &fx("reference.bdf"),
        "--curves",
        s(&dangling),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("curve endpoint not on boundary"),
        "{}",
        stderr(&o)
    );

    let m = decomposed(&dir);
    let mut deck = fs::read_to_string(common::fixture("stiffeners.bdf")).unwrap();
    deck = deck.replace(
        "ENDDATA\n",
        "GRID           7             1.0     1.0     0.0\nGRID         107             1.0     1.0     0.1\n\
         CQUAD4       141       1       2       7     107     102\nENDDATA\n",
    );
    let branching = write(&dir, "branching.bdf", &deck);
    let o = run(&[
        "stiffen",
        "--manifest",
        s(&m),
        "--mesh",
        s(&branching),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("touches 2 other quads"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn stiffen_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let out = stiffened(&dir);
    let got = read_manifest(&out).unwrap();
    let panels = got.panels().unwrap();
    let quads = reference_stiffeners();
    let a = associate_stiffeners(&panels, &quads).unwrap();
    let chains = chains_by_panel(&a, &quads).unwrap();
    assert_eq!(got.stiffeners, Some(StiffenerRecord::new(&a, &chains)));
    assert_eq!(got.stiffeners.as_ref().unwrap().ambiguous.len(), 1);
}

#[test]
fn empty_stiffener_deck_leaves_manifest_unchanged() {
    let dir = TempDir::new().unwrap();
    let m = decomposed(&dir);
    let empty = write(
        &dir,
        "empty.bdf",
        "$ no stiffeners\nGRID,1,,0.,0.,0.\nENDDATA\n",
    );
    let out = dir.path().join("same.json");
    let o = run(&[
        "stiffen",
        "--manifest",
        s(&m),
        "--mesh",
        s(&empty),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&out).unwrap(), fs::read(&m).unwrap());
}

#[test]
fn optimize_matches_the_library_for_any_worker_count() {
    let dir = TempDir::new().unwrap();
    let m = stiffened(&dir);
    let mut outputs = Vec::new();
    for workers in ["1", "2", "5"] {
        let out = dir.path().join(format!("sized{workers}.json"));
        let o = run(&[
            "optimize",
            "--manifest",
            s(&m),
            "--config",
            &fx("toy.toml"),
            "--workers",
            workers,
            "--seed",
            "0",
            "--out",
            s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let got = Manifest::from_json(std::str::from_utf8(&outputs[0]).unwrap()).unwrap();
    assert_eq!(got.status, Some(LoopStatus::Converged));
    let panels = common::toy_panels();
    let analyzer = SmearedPlate::default();
    let mut provider = StiffnessRedistribution {
        force_x: common::TOY_FORCE,
        ny: 0.0,
        nxy: 0.0,
    };
    let lib = run_global_local(
        &common::toy_inputs(&panels, &analyzer),
        &mut provider,
        &LoopConfig::default(),
    )
    .unwrap();
    assert_eq!(got.history, lib.history);
    assert_eq!(got.designs, lib.history.last().unwrap().panels);
}

#[test]
fn optimize_single_iteration() {
    let dir = TempDir::new().unwrap();
    let m = decomposed(&dir);
    let text = fs::read_to_string(common::fixture("toy.toml"))
        .unwrap()
        .replace("max_iterations = 10", "max_iterations = 1");
    let config = write(&dir, "one.toml", &text);
    let o = run(&["optimize", "--manifest", s(&m), "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = read_manifest(&m).unwrap();
    assert_eq!(got.status, Some(LoopStatus::MaxIterations));
    assert_eq!(got.history.len(), 1);
}

#[test]
fn infeasible_bounds_exit_3() {
    let dir = TempDir::new().unwrap();
    let m = decomposed(&dir);
    let text = fs::read_to_string(common::fixture("toy.toml"))
        .unwrap()
        .replace("force_x = -2.0e5", "force_x = -5.0e7");
    let config = write(&dir, "heavy.toml", &text);
    let out = dir.path().join("o.json");
    let o = run(&[
        "optimize",
        "--manifest",
        s(&m),
        "--config",
        s(&config),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        read_manifest(&out).unwrap().status,
        Some(LoopStatus::NotConvergedFeasibility)
    );
}

#[test]
fn render_decomposition() {
    let dir = TempDir::new().unwrap();
    let m = stiffened(&dir);
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for out in [&a, &b] {
        let o = run(&[
            "render",
            "--manifest",
            s(&m),
            "--mesh",
            &fx("reference.bdf"),
            "--out",
            s(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let svg = fs::read_to_string(&a).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 16);
    assert_eq!(
        svg.matches(&format!("fill=\"{}\"", panelize::render::palette(1)))
            .count(),
        8
    );
    assert_eq!(
        svg.matches(&format!("fill=\"{}\"", panelize::render::palette(2)))
            .count(),
        8
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let bare = dir.path().join("bare.svg");
    let o = run(&[
        "render",
        "--mesh",
        &fx("reference.bdf"),
        "--out",
        s(&bare),
        "--color-by",
        "none",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&bare)
            .unwrap()
            .matches("#e6e6e6")
            .count(),
        16
    );

    let chains = dir.path().join("chains.svg");
    let o = run(&[
        "render",
        "--manifest",
        s(&m),
        "--mesh",
        &fx("stiffeners.bdf"),
        "--out",
        s(&chains),
        "--color-by",
        "chain",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&chains)
            .unwrap()
            .matches("<polygon")
            .count(),
        7
    );
}

#[test]
fn render_without_coordinates_exits_4() {
    let dir = TempDir::new().unwrap();
    let deck = write(
        &dir,
        "bare.bdf",
        "GRID,1\nGRID,2\nGRID,3\nCTRIA3,1,1,1,2,3\n",
    );
    let out = dir.path().join("x.svg");
    let o = run(&["render", "--mesh", s(&deck), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!out.exists());
}

#[test]
fn info_reports_both_files() {
    let dir = TempDir::new().unwrap();
    let m = stiffened(&dir);
    let o = run(&["info", "--mesh", &fx("reference.bdf"), "--manifest", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("15 nodes, 16 tri, 0 quad"), "{text}");
    assert!(text.contains("2 panels, 1 curves"), "{text}");
    assert!(text.contains("1 ambiguous, 1 unassigned"), "{text}");
}

#[test]
fn log_level_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let m = decomposed(&dir);
    let out = dir.path().join("s.json");
    let o = Command::new(env!("CARGO_BIN_EXE_panelize"))
        .args([
            "stiffen",
            "--manifest",
            s(&m),
            "--mesh",
            &fx("stiffeners.bdf"),
            "--out",
            s(&out),
        ])
        .env("PANELIZE_LOG", "warn")
        .output()
        .unwrap();
    assert!(stderr(&o).contains("shares 1 nodes"), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_panelize"))
        .args([
            "stiffen",
            "--manifest",
            s(&m),
            "--mesh",
            &fx("stiffeners.bdf"),
            "--out",
            s(&out),
        ])
        .env("PANELIZE_LOG", "off")
        .output()
        .unwrap();
    assert_eq!(stderr(&o), "");
}
