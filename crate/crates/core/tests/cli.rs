use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fan(name: &str) -> PathBuf {
  [env!("CARGO_MANIFEST_DIR"), "..", "..", "fans", &format!("{name}.json")].iter().collect()
}

fn run(args: &[&str]) -> Output { Command::new(env!("CARGO_BIN_EXE_toric-cohom")).args(args).output().unwrap() }

fn stdout(o: &Output) -> String { String::from_utf8_lossy(&o.stdout).into_owned() }

fn path(name: &str) -> String { fan(name).to_string_lossy().into_owned() }

#[test]
fn cohom_examples() {
  for (name, divisor, want) in
    [("p2", "2,0,0", "h = [6, 0, 0]"), ("p2", "-3,0,0", "h = [0, 0, 1]"), ("p1xp1", "-2,0,0,0", "h = [0, 1, 0]")]
  {
    let o = run(&["cohom", &path(name), "--divisor", divisor]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), want);
  }
}

#[test]
fn cohom_explain_and_json() {
  let o = run(&["cohom", &path("p1xp1"), "--divisor", "-2,0,0,0", "--explain"]);
  let text = stdout(&o);
  assert!(text.contains("h^1 += 1 * 1"), "{text}");

  let o = run(&["cohom", &path("p2"), "--divisor", "1,1,0", "--json"]);
  let v: Value = serde_json::from_slice(&o.stdout).unwrap();
  assert_eq!(v["dims"], serde_json::json!([6, 0, 0]));
  assert_eq!(v["divisor"], serde_json::json!([1, 1, 0]));
}

#[test]
fn cohom_input_errors() {
  let o = run(&["cohom", &path("p2"), "--divisor", "1,0"]);
  assert_eq!(o.status.code(), Some(2));
  let o = run(&["cohom", "/nonexistent/fan.json", "--divisor", "0"]);
  assert_eq!(o.status.code(), Some(2));
  // P^2 with one ray scaled: non-primitive
  let dir = std::env::temp_dir().join(format!("toric-cohom-cli-{}", std::process::id()));
  std::fs::create_dir_all(&dir).unwrap();
  let bad = dir.join("bad.json");
  std::fs::write(&bad, r#"{"dim": 2, "rays": [[2,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2],[0,2]]}"#).unwrap();
  let o = run(&["cohom", bad.to_str().unwrap(), "--divisor", "0,0,0"]);
  assert_eq!(o.status.code(), Some(2));
  assert!(String::from_utf8_lossy(&o.stderr).contains("non-primitive ray"));
  std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn info_reports() {
  let o = run(&["info", &path("p2"), "--json"]);
  assert!(o.status.success());
  let v: Value = serde_json::from_slice(&o.stdout).unwrap();
  assert_eq!(v["sr"], serde_json::json!([[0, 1, 2]]));
  assert_eq!(v["usr_count"], 1);
  assert_eq!(v["class_group"]["display"], "Z");

  let o = run(&["info", &path("p1xp1"), "--json"]);
  let v: Value = serde_json::from_slice(&o.stdout).unwrap();
  assert_eq!(v["sr"].as_array().unwrap().len(), 2);
  assert_eq!(v["usr_count"], 3);
  assert_eq!(v["class_group"]["free_rank"], 2);

  let text = stdout(&run(&["info", &path("p2_mod_z3")]));
  assert!(text.contains("class group: Z + Z/3"), "{text}");
}

#[test]
fn info_rejects_incomplete_fan() {
  let dir = std::env::temp_dir().join(format!("toric-cohom-info-{}", std::process::id()));
  std::fs::create_dir_all(&dir).unwrap();
  let f = dir.join("partial.json");
  std::fs::write(&f, r#"{"dim": 2, "rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2]]}"#).unwrap();
  let o = run(&["info", f.to_str().unwrap()]);
  assert_eq!(o.status.code(), Some(2));
  std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_matches_closed_form_and_cohom() {
  let o = run(&["table", &path("p2"), "--box", "-3:2", "--json"]);
  assert!(o.status.success());
  let rows: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
  assert_eq!(rows.len(), 6);
  let want = [[0, 0, 1], [0, 0, 0], [0, 0, 0], [1, 0, 0], [3, 0, 0], [6, 0, 0]];
  for (k, (row, w)) in rows.iter().zip(want).enumerate() {
    assert_eq!(row["divisor"], serde_json::json!([k as i64 - 3, 0, 0]));
    assert_eq!(row["dims"], serde_json::json!(w));
    let single = run(&["cohom", &path("p2"), "--divisor", &format!("{},0,0", k as i64 - 3), "--json"]);
    let single: Value = serde_json::from_slice(&single.stdout).unwrap();
    assert_eq!(single["dims"], row["dims"]);
  }
}

#[test]
fn table_kunneth_box() {
  let o = run(&["table", &path("p1xp1"), "--box", "-3:1,-2:2", "--json"]);
  let rows: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
  assert_eq!(rows.len(), 25);
  let h = |m: i64| [if m >= 0 { m + 1 } else { 0 }, if m <= -2 { -m - 1 } else { 0 }];
  let mut prev: Option<Vec<i64>> = None;
  for row in &rows {
    let d: Vec<i64> = serde_json::from_value(row["divisor"].clone()).unwrap();
    if let Some(p) = &prev {
      assert!(p < &d);
    }
    let (x, y) = (h(d[0]), h(d[1]));
    assert_eq!(row["dims"], serde_json::json!([x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]]));
    prev = Some(d);
  }
}

#[test]
fn table_empty_range() {
  let o = run(&["table", &path("p2"), "--box", "1:0"]);
  assert!(o.status.success());
  assert!(stdout(&o).is_empty());
}

#[test]
fn verify_exit_codes() {
  for name in ["p2", "p1xp1"] {
    let o = run(&["verify", &path(name)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
  }
  let o = run(&["verify", &path("p1xp1"), "--corrupt-sr", "0", "--json"]);
  assert_eq!(o.status.code(), Some(1));
  let v: Value = serde_json::from_slice(&o.stdout).unwrap();
  assert!(v["mismatch_count"].as_u64().unwrap() > 0);
  let o = run(&["verify", &path("p2"), "--box", "-1:1,0:1"]);
  assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_is_stable() {
  let a = run(&["verify", &path("f1"), "--json"]);
  let b = run(&["verify", &path("f1"), "--json"]);
  assert_eq!(a.stdout, b.stdout);
  let a = run(&["info", &path("p3"), "--json"]);
  let b = run(&["info", &path("p3"), "--json"]);
  assert_eq!(a.stdout, b.stdout);
}
