use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kwise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kwise")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn extremal_writes_witness_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let (w, c) = (dir.path().join("w.json"), dir.path().join("c.json"));
    let o = kwise(&[
        "extremal", "-f", "and:n=3", "-k", "2", "-p", "1/2", "--dir", "max", "--witness", path_str(&w),
        "--certificate", path_str(&c),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("value 1/4\n"));
    let v = kwise(&["verify", path_str(&w)]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("strength 2"));
    let cv = kwise(&["verify", path_str(&c), "-f", "and:n=3"]);
    assert_eq!(cv.status.code(), Some(0), "{}", stderr(&cv));
    assert_eq!(stdout(&cv), "gap 1/4\n");
}

#[test]
fn corrupted_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    let out = kwise(&["construct", "xor", "-n", "3", "-o", path_str(&d)]);
    assert_eq!(out.status.code(), Some(0));

    let text = fs::read_to_string(&d).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["atoms"][2]["word"] = "0111".into();
    fs::write(&d, json.to_string()).unwrap();
    let bad = kwise(&["verify", path_str(&d)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("row 2"), "{}", stderr(&bad));

    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["atoms"][0]["prob"] = "1/2".into();
    fs::write(&d, json.to_string()).unwrap();
    let bad = kwise(&["verify", path_str(&d)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("sum"), "{}", stderr(&bad));

    // a valid law that claims more than it has
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["claimed_strength"] = 3.into();
    fs::write(&d, json.to_string()).unwrap();
    assert_eq!(kwise(&["verify", path_str(&d)]).status.code(), Some(2));

    let c = dir.path().join("c.json");
    kwise(&["extremal", "-f", "and:n=3", "-k", "2", "-p", "1/2", "--dir", "min", "--certificate", path_str(&c)]);
    let mut cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(&c).unwrap()).unwrap();
    cert["lower"] = serde_json::json!([{"monomial": [], "coeff": "1/2"}]);
    fs::write(&c, cert.to_string()).unwrap();
    let bad = kwise(&["verify", path_str(&c), "-f", "and:n=3"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("x = "), "{}", stderr(&bad));
}

#[test]
fn bounds_as_json() {
    let o = kwise(&["bound", "rao", "-n", "4", "-k", "2", "-q", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["name"], "rao");
    assert_eq!(v["value"], "5");
    let m = kwise(&["bound", "maj-deviation", "-k", "8"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&m)).unwrap();
    assert_eq!(v["value"]["lo"], "1");
    assert_eq!(v["value"]["hi"], "1");
    assert_eq!(kwise(&["bound", "rao", "-n", "4", "-k", "3", "-q", "2"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(kwise(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kwise(&["extremal", "-f", "and:n=3", "-k", "2", "-p", "1/2", "--bogus"]).status.code(), Some(1));
    assert_eq!(kwise(&["extremal", "-f", "and:n=3", "-k", "0", "-p", "1/2"]).status.code(), Some(1));
    assert_eq!(kwise(&["extremal", "-f", "nope:n=3", "-k", "1", "-p", "1/2"]).status.code(), Some(1));
    assert_eq!(kwise(&["--seed", "7", "nc", "-k", "2", "-p", "1/2"]).status.code(), Some(0));
}

#[test]
fn sweeps_are_deterministic() {
    let args = ["sweep", "--functions", "and:n=4;tribes:w=2,t=2", "-k", "1-4", "-p", "1/3,1/2", "--format", "csv"];
    let a = kwise(&args);
    let b = kwise(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 1 + 2 * 4 * 2);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    let nc = kwise(&["sweep", "--kind", "nc", "-k", "2,3,4", "-p", "1/2"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&nc)).unwrap();
    for row in rows.as_array().unwrap() {
        assert_eq!(row["n_c"], row["k"].as_u64().unwrap() + 1);
    }
}

#[test]
fn constructions_and_fourier() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    assert_eq!(kwise(&["construct", "gv", "-q", "2", "-n", "4", "-d", "4", "-o", path_str(&code)]).status.code(), Some(0));
    let v = kwise(&["verify", path_str(&code)]);
    assert!(stdout(&v).contains("dual strength 3"), "{}", stdout(&v));
    let bits = dir.path().join("bits.json");
    assert_eq!(kwise(&["construct", "oa", "--code", path_str(&code), "--one", "1", "-o", path_str(&bits)]).status.code(), Some(0));
    assert_eq!(stdout(&kwise(&["fourier", "--dist", path_str(&bits)])), "strength 3\n");
    let f = kwise(&["fourier", "-f", "maj:n=3"]);
    assert_eq!(stdout(&f), "level 0 0\nlevel 1 3/4\nlevel 2 0\nlevel 3 1/4\n");
    let w = kwise(&["construct", "block-xor", "-m", "3", "-l", "3"]);
    let law: serde_json::Value = serde_json::from_str(&stdout(&w)).unwrap();
    assert_eq!(law["atoms"].as_array().unwrap().len(), 64);
}
