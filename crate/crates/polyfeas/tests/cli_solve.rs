mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{identity_problem, polyfeas, stderr_json, stdout, write};
use nalgebra::{DVector, Vector3};
use polyfeas::io::{ProblemFile, ResultFile};
use polyfeas_core::msk::mock_model;

fn vertices(result: &ResultFile) -> Vec<Vec<f64>> {
    result.vertices.clone()
}

fn same_set(got: &[Vec<f64>], want: &[[f64; 2]]) -> bool {
    got.len() == want.len()
        && want
            .iter()
            .all(|w| got.iter().any(|g| (g[0] - w[0]).abs() < 1e-9 && (g[1] - w[1]).abs() < 1e-9))
}

#[test]
fn unit_square_has_four_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "square.json", &identity_problem("[[1,0],[0,1]]"));
    let out = polyfeas(&["solve", &input, "--eps", "1e-6"]);
    assert!(out.status.success(), "{out:?}");
    let result: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(result.status, "converged");
    assert!(same_set(&vertices(&result), &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]));
    assert_eq!(result.hrep.normals.len(), 4);
    assert_eq!(result.hrep.offsets.len(), 4);
}

#[test]
fn parallelogram_vertices_match_the_mapped_corners() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "par.json", &identity_problem("[[1,1],[1,-1]]"));
    let output = dir.path().join("out.json");
    let out = polyfeas(&["solve", &input, "--eps", "1e-6", "--output", output.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).starts_with("converged: 4 vertices"));
    let result: ResultFile = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert!(same_set(&vertices(&result), &[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0], [1.0, -1.0]]));
    assert_eq!(result.epsilon, 1e-6);
}

#[test]
fn file_epsilon_and_seed_are_used_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let text = identity_problem("[[1,0],[0,1]]").replace('}', r#","epsilon":0.25,"seed":42}"#);
    let input = write(dir.path(), "p.json", &text);
    let out = polyfeas(&["solve", &input]);
    assert!(out.status.success(), "{out:?}");
    let result: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((result.epsilon, result.seed), (0.25, 42));

    let bare = write(dir.path(), "bare.json", &identity_problem("[[1,0],[0,1]]"));
    let out = polyfeas(&["solve", &bare]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", "{\"schema_version\": \"1\", \"kind\": ");
    let out = polyfeas(&["solve", &input, "--eps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "parse");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn missing_input_is_an_io_error() {
    let out = polyfeas(&["solve", "/nonexistent/p.json", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn empty_set_exits_3() {
    // y1 = y2 is required but the boxes do not overlap.
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"schema_version":"1","kind":"generic","a":[[1],[1]],"b":[[1,0],[0,1]],"y_lo":[0,2],"y_hi":[1,3]}"#;
    let input = write(dir.path(), "empty.json", text);
    let out = polyfeas(&["solve", &input, "--eps", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "empty");
    let result: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(result.status, "empty");
    assert!(result.vertices.is_empty());
}

#[test]
fn degenerate_set_exits_4() {
    // Both outputs equal y1 + y2: a segment in the plane.
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "flat.json", &identity_problem("[[1,1],[1,1]]"));
    let out = polyfeas(&["solve", &input, "--eps", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"], "degenerate");
    let result: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(result.status, "degenerate");
}

#[test]
fn spent_budget_exits_5_with_a_partial_result() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot = mock_model(3, 7, 30, 3).unwrap();
    let input = dir.path().join("msk.json");
    ProblemFile::msk(&snapshot).write(&input).unwrap();
    let out = polyfeas(&["solve", input.to_str().unwrap(), "--eps", "0.1", "--max-lp", "40"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(stderr_json(&out)["error"], "limit");
    let result: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(result.status, "limit");
    assert!(result.lp_count <= 40);
    assert!(!result.vertices.is_empty());
}

#[test]
fn bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "sq.json", &identity_problem("[[1,0],[0,1]]"));
    assert_eq!(polyfeas(&["solve", &input, "--eps", "-1"]).status.code(), Some(2));
    assert_eq!(polyfeas(&["solve", &input, "--eps", "x"]).status.code(), Some(2));
    let mesh = dir.path().join("m.off");
    assert_eq!(
        polyfeas(&["solve", &input, "--eps", "1", "--mesh", mesh.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

struct Off {
    points: Vec<Vector3<f64>>,
    faces: Vec<Vec<usize>>,
    declared_edges: usize,
}

fn parse_off(text: &str) -> Off {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let points = (0..counts[0])
        .map(|_| {
            let v: Vec<f64> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
            Vector3::new(v[0], v[1], v[2])
        })
        .collect();
    let faces = (0..counts[1])
        .map(|_| {
            let v: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
            assert_eq!(v[0], v.len() - 1);
            v[1..].to_vec()
        })
        .collect();
    assert!(lines.all(|l| l.trim().is_empty()));
    Off {
        points,
        faces,
        declared_edges: counts[2],
    }
}

#[test]
fn off_mesh_is_a_closed_outward_surface_on_the_result_vertices() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..8u64 {
        let snapshot = mock_model(seed, 7, 12 + seed as usize, 3).unwrap();
        let input = dir.path().join(format!("msk{seed}.json"));
        ProblemFile::msk(&snapshot).write(&input).unwrap();
        let mesh = dir.path().join(format!("m{seed}.off"));
        let out = polyfeas(&[
            "solve",
            input.to_str().unwrap(),
            "--eps",
            "0.5",
            "--raw",
            "--mesh",
            mesh.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        let result: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
        let off = parse_off(&std::fs::read_to_string(&mesh).unwrap());

        // Every mesh vertex is a result vertex, and every face uses valid ids.
        for p in &off.points {
            assert!(result
                .vertices
                .iter()
                .any(|v| (DVector::from_column_slice(v) - DVector::from_column_slice(p.as_slice())).norm() < 1e-9));
        }
        assert!(off.faces.iter().flatten().all(|&i| i < off.points.len()));

        // Closed 2-manifold: each undirected edge appears once in each direction.
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &off.faces {
            for k in 0..f.len() {
                *directed.entry((f[k], f[(k + 1) % f.len()])).or_default() += 1;
            }
        }
        assert!(directed.iter().all(|(&(a, b), &c)| c == 1 && directed.get(&(b, a)) == Some(&1)));
        let edges: BTreeSet<(usize, usize)> = directed.keys().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        assert_eq!(edges.len(), off.declared_edges);
        assert_eq!(off.points.len() + off.faces.len(), edges.len() + 2, "Euler relation");

        // Counter-clockwise seen from outside: normals point away from the centroid.
        let centroid = off.points.iter().sum::<Vector3<f64>>() / off.points.len() as f64;
        for f in &off.faces {
            let (a, b, c) = (off.points[f[0]], off.points[f[1]], off.points[f[2]]);
            let normal = (b - a).cross(&(c - a));
            assert!(normal.dot(&(a - centroid)) > 0.0);
        }
    }
}
