use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hofer-bars"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn schema(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// Required keys, recursively through `properties` and `items`; `$ref`s and
/// value constraints are left to a full validator.
fn check_required(s: &Value, v: &Value, at: &str) {
    if let Some(req) = s["required"].as_array() {
        for k in req {
            let k = k.as_str().unwrap();
            assert!(v.get(k).is_some(), "{at}: missing {k}");
        }
    }
    if let (Some(props), Some(obj)) = (s["properties"].as_object(), v.as_object()) {
        for (k, sub) in props {
            if let Some(x) = obj.get(k) {
                check_required(sub, x, &format!("{at}.{k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            check_required(items, x, &format!("{at}[{i}]"));
        }
    }
}

const TENT: &str = "R=1\n0 0\n1/2 1/4\n1 0\n";
const S2: &str = "n=1\nN=2\ngamma2pi=2\nR=9/10\nepsilon=1/20\na=1\n";

#[test]
fn tent_spectrum_has_four_actions() {
    let dir = scratch("tent");
    let f = write(&dir, "tent.txt", TENT);
    let out = bin().args(["spectrum", f.to_str().unwrap(), "--n", "1", "--N", "0", "--degrees", "-2..2"]).output().unwrap();
    assert!(out.status.success());
    let v = json(&out);
    check_required(&schema("spectrum.schema.json"), &v, "spectrum");
    let got: Vec<(i64, &str)> = v.as_array().unwrap().iter().map(|a| (a["degree"].as_i64().unwrap(), a["value"].as_str().unwrap())).collect();
    assert_eq!(got, vec![(-1, "0"), (-1, "0"), (0, "1/4"), (1, "1/4")]);
}

#[test]
fn spectrum_is_deterministic_and_empty_ranges_are_fine() {
    let dir = scratch("empty");
    let f = write(&dir, "tent.txt", TENT);
    let run = |deg: &str| bin().args(["spectrum", f.to_str().unwrap(), "--n", "1", "--degrees", deg]).output().unwrap();
    let out = run("3..2");
    assert!(out.status.success());
    assert_eq!(json(&out), Value::Array(vec![]));
    assert_eq!(run("-4..4").stdout, run("-4..4").stdout);
}

#[test]
fn bad_slope_exits_2() {
    let dir = scratch("slope");
    let f = write(&dir, "bad.txt", "R=1\n0 0\n1/2 1/4\n1 5/4\n");
    let out = bin().args(["spectrum", f.to_str().unwrap(), "--n", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slope condition"));
}

#[test]
fn sphere_certificate_with_frames() {
    let dir = scratch("cert");
    let f = write(&dir, "s2.txt", S2);
    let frames = dir.join("frames");
    let out = bin().args(["certificate", f.to_str().unwrap(), "--frames", frames.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    check_required(&schema("certificate.schema.json"), &v, "report");
    assert_eq!(v["case"], 1);
    assert_eq!(v["meetsTarget"], true);
    assert_eq!(v["targetBound"]["symbolic"], "2π·(4/5) - 7/20");
    assert_eq!(v["lowerBound"]["decimal"].as_str().unwrap().replace(['-', '.'], "").len(), 20);
    let n = v["frames"].as_u64().unwrap() as usize;
    assert_eq!(fs::read_dir(&frames).unwrap().count(), n);
    assert!(fs::read_to_string(frames.join("s2-000.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn flags_override_the_scenario() {
    let dir = scratch("override");
    let f = write(&dir, "s2.txt", S2);
    let out = bin().args(["certificate", f.to_str().unwrap(), "--N", "3", "--seed", "4"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["case"], 3);
    assert!(v["scenario"].as_str().unwrap().contains("seed=4"));
}

#[test]
fn zero_scenario_exits_2_and_jobs_keep_order() {
    let dir = scratch("jobs");
    let good = write(&dir, "s2.txt", S2);
    let zero = write(&dir, "zero.txt", &S2.replace("a=1", "a=0"));
    let out = bin().args(["certificate", zero.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let paths = [good.to_str().unwrap(), zero.to_str().unwrap(), good.to_str().unwrap()];
    let out = bin().arg("certificate").args(paths).args(["--jobs", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    assert_eq!(arr[0], arr[2]);
    assert_eq!(arr[1]["exitCode"], 2);
}

#[test]
fn bottleneck_examples() {
    let dir = scratch("bottleneck");
    let b = write(&dir, "b.json", r#"{"degree":0,"bars":[{"left":"0","right":"10"}]}"#);
    let c = write(&dir, "c.json", r#"{"degree":0,"bars":[{"left":"1","right":"10"}]}"#);
    let e = write(&dir, "e.json", r#"{"degree":0,"bars":[]}"#);
    let short = write(&dir, "s.json", r#"{"degree":0,"bars":[{"left":"0","right":"2"}]}"#);
    let other = write(&dir, "o.json", r#"{"degree":1,"bars":[]}"#);
    let run = |x: &Path, y: &Path| bin().arg("bottleneck").args([x, y]).output().unwrap();
    for (x, y, want) in [(&b, &b, "0"), (&b, &c, "1"), (&short, &e, "1")] {
        let out = run(x, y);
        assert!(out.status.success());
        let v = json(&out);
        check_required(&schema("bottleneck.schema.json"), &v, "bottleneck");
        assert_eq!(v["exact"], want);
    }
    assert_eq!(run(&b, &other).status.code(), Some(2));
}
