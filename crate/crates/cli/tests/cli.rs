use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nucleus(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nucleus"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn grid_csv(dir: &Path, k: usize) -> &'static str {
    let text: String = (0..k)
        .flat_map(|j| (0..k).map(move |i| format!("{i},{j}\n")))
        .collect();
    std::fs::write(dir.join("grid.csv"), format!("# unit grid\n{text}")).unwrap();
    "grid.csv"
}

const GRID_BOX: &str = "-0.5,-0.5,2.5,2.5";

#[test]
fn tessellate_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = grid_csv(dir.path(), 3);
    let o = nucleus(
        dir.path(),
        &["tessellate", "--sites", csv, "--bbox", GRID_BOX],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["regions"].as_array().unwrap().len(), 9);
    let adj = v["adjacency"].as_array().unwrap();
    assert_eq!(adj.len(), 12);
    assert!(adj.iter().all(|e| e["length"] == 1.0));
}

#[test]
fn single_site_owns_the_box() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("one.csv"), "0.5,0.5\n").unwrap();
    let o = nucleus(
        dir.path(),
        &["tessellate", "--sites", "one.csv", "--bbox", "0,0,1,1"],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let verts = v["regions"][0]["vertices"].as_array().unwrap();
    assert_eq!(verts.len(), 4);
    assert_eq!(v["regions"].as_array().unwrap().len(), 1);
    assert!(v["adjacency"].as_array().unwrap().is_empty());
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "a,b\n").unwrap();
    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    let o = nucleus(dir.path(), &["tessellate", "--sites", "bad.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["render", "--sites", "empty.csv", "--svg", "x.svg"]
        )),
        2
    );
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["tessellate", "--sites", "missing.csv"]
        )),
        2
    );
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["tessellate", "--random", "5", "--bbox", "1,1,0,0"]
        )),
        2
    );
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["validate", "--random", "5", "--tol-angle", "120"]
        )),
        2
    );
    assert_eq!(code(&nucleus(dir.path(), &["tessellate"])), 2);
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["render", "--random", "5", "--svg", "no/such/dir/x.svg"]
        )),
        2
    );
    std::fs::write(dir.path().join("x.pgm"), b"\x89PNG\r\n").unwrap();
    assert_eq!(
        code(&nucleus(dir.path(), &["tessellate", "--image", "x.pgm"])),
        2
    );
}

#[test]
fn clusters_on_grids() {
    let dir = tempfile::tempdir().unwrap();
    let csv = grid_csv(dir.path(), 3);
    let v = json(&nucleus(
        dir.path(),
        &["clusters", "--sites", csv, "--bbox", GRID_BOX],
    ));
    let cs = v["clusters"].as_array().unwrap();
    assert_eq!(cs.len(), 9);
    let maximal: Vec<u64> = cs
        .iter()
        .filter(|c| c["maximal"] == true)
        .map(|c| c["nucleus"].as_u64().unwrap())
        .collect();
    assert_eq!(maximal, [4]);

    let v = json(&nucleus(
        dir.path(),
        &[
            "clusters",
            "--sites",
            csv,
            "--bbox",
            GRID_BOX,
            "--nucleus",
            "0",
        ],
    ));
    assert_eq!(v["clusters"][0]["members"].as_array().unwrap().len(), 3);
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["clusters", "--sites", csv, "--nucleus", "9"]
        )),
        2
    );

    let csv = grid_csv(dir.path(), 2);
    let v = json(&nucleus(
        dir.path(),
        &["clusters", "--sites", csv, "--bbox", "-0.5,-0.5,1.5,1.5"],
    ));
    assert!(v["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["maximal"] == true));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucleus(dir.path(), &["validate", "--random", "100", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 17);

    let csv = grid_csv(dir.path(), 3);
    assert_eq!(
        code(&nucleus(
            dir.path(),
            &["validate", "--sites", csv, "--descriptor", "point"]
        )),
        0
    );

    assert_eq!(
        code(&nucleus(
            dir.path(),
            &[
                "tessellate",
                "--sites",
                csv,
                "--bbox",
                GRID_BOX,
                "--out",
                "m.json"
            ]
        )),
        0
    );
    let mut mesh: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    let list = mesh["regions"][4]["neighbors"].as_array_mut().unwrap();
    list.retain(|j| j != 5);
    std::fs::write(dir.path().join("bad.json"), mesh.to_string()).unwrap();
    let o = nucleus(dir.path(), &["validate", "--mesh", "bad.json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let check = |id: &str| {
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["id"] == id)
            .unwrap()
            .clone()
    };
    assert_eq!(check("covering")["status"], "pass");
    assert_eq!(check("sn_cluster_equivalence")["status"], "fail");
    assert!(check("sn_cluster_equivalence")["counterexample"]["regions"].is_array());
}

#[test]
fn stored_clusters_must_match_the_mesh() {
    let dir = tempfile::tempdir().unwrap();
    nucleus(
        dir.path(),
        &[
            "clusters", "--random", "20", "--seed", "1", "--out", "c.json",
        ],
    );
    let o = nucleus(
        dir.path(),
        &[
            "validate",
            "--random",
            "20",
            "--seed",
            "2",
            "--clusters",
            "c.json",
        ],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn render_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = grid_csv(dir.path(), 3);
    let o = nucleus(dir.path(), &["render", "--sites", csv, "--bbox", GRID_BOX]);
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 9);
    assert_eq!(svg.matches("<line").count(), 12);
    assert_eq!(svg.matches("#d1495b").count(), 1);
    // y is flipped: site (0,0) is drawn at the bottom left
    assert!(svg.contains(r#"<circle cx="133.333" cy="666.667" r="2"/>"#));
}

#[test]
fn image_sites() {
    let dir = tempfile::tempdir().unwrap();
    let mut pgm = b"P5\n16 12\n255\n".to_vec();
    pgm.extend((0..16 * 12).map(|i| if (i % 16) < 8 { 20u8 } else { 220 }));
    std::fs::write(dir.path().join("step.pgm"), pgm).unwrap();
    let o = nucleus(
        dir.path(),
        &[
            "tessellate",
            "--image",
            "step.pgm",
            "--k",
            "5",
            "--min-sep",
            "2",
        ],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["bbox"], serde_json::json!([0.0, 0.0, 16.0, 12.0]));
    // the step sits between columns 7 and 8; suppression leaves five sites there
    for s in v["sites"].as_array().unwrap() {
        let x = s[0].as_f64().unwrap();
        assert!(x == 7.5 || x == 8.5, "{x}");
    }
    let o = nucleus(
        dir.path(),
        &[
            "validate",
            "--image",
            "step.pgm",
            "--k",
            "6",
            "--min-sep",
            "2",
            "--descriptor",
            "point",
        ],
    );
    assert_eq!(code(&o), 0);
}

#[test]
fn descriptor_selection_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let csv = grid_csv(dir.path(), 3);
    let name = |extra: &[&str]| {
        let mut args = vec!["validate", "--sites", csv, "--bbox", GRID_BOX];
        args.extend_from_slice(extra);
        let o = nucleus(dir.path(), &args);
        assert_eq!(code(&o), 0);
        json(&o)["descriptor"].as_str().unwrap().to_string()
    };
    assert_eq!(name(&[]), "region-shape");
    assert_eq!(name(&["--with-location"]), "region");
    assert_eq!(name(&["--descriptor", "point"]), "site");
}
