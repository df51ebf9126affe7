use qcx_cli::run;
use serde_json::Value;

fn qcx(args: &str) -> qcx_cli::Outcome {
    run(std::iter::once("qcx").chain(args.split_whitespace()))
}

fn json(args: &str) -> Value {
    let out = qcx(args);
    assert_eq!(out.code, 0, "{args}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn csv_tables_equal_fixtures() {
    let out = qcx("table --dmax 15 --sign minus --format csv");
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, fixture("table_minus.csv"));
    assert_eq!(qcx("table --dmax 15 --sign plus --format csv").stdout, fixture("table_plus.csv"));
}

#[test]
fn extremes_reports_value_and_witness() {
    let v = json("extremes --d 11 --k 4 --sign plus");
    assert_eq!(v["value"], "21/10");
    assert_eq!(v["i0"], 9);
    let v = json("extremes --d 5 --k 5 --sign minus");
    assert_eq!(v["value"], "0");
    assert!(v["i0"].is_null());
}

#[test]
fn brute_force_verification_passes() {
    let out = qcx("verify --d 4 --k 2 --sign minus --brute-force");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn zero_minus_volume_has_nothing_to_verify() {
    let v = json("verify --d 3 --k 3 --sign minus");
    assert_eq!(v["passed"], true);
    assert!(v["note"].is_string());
}

#[test]
fn brute_force_cap_is_enforced() {
    let out = qcx("verify --d 9 --k 2 --sign plus --brute-force");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("QCX_BRUTE_FORCE_DMAX"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        "",
        "frobnicate",
        "extremes --d 4 --k 2",
        "extremes --d 4 --k 2 --sign sideways",
        "extremes --d 4 --k 6 --sign plus",
        "extremes --d 4 --k 1 --sign plus",
        "construct --d 4 --k 2 --sign minus --eval 1/2,x,1,1",
    ] {
        assert_eq!(qcx(args).code, 2, "{args:?}");
    }
    assert_eq!(qcx("--help").code, 0);
}

#[test]
fn construction_and_evaluation() {
    let v = json("construct --d 6 --k 2 --sign plus --eval 1,1,1,1,1,1 --eval 2/3,1,1,1,1,1");
    assert_eq!(v["a"], "2/3");
    assert_eq!(v["i0"], 4);
    assert_eq!(v["volume"], "2");
    assert_eq!(v["evaluations"][0]["value"], "1");
    assert_eq!(v["evaluations"][1]["value"], "2/3");
    let out = qcx("construct --d 4 --k 4 --sign minus");
    assert_eq!(out.code, 1);
}

#[test]
fn lp_oracle_agrees_and_certifies() {
    for variant in ["full", "symmetric", "reduced", "dual"] {
        let v = json(&format!("lp-oracle --d 4 --k 2 --sign minus --variant {variant} --certify"));
        assert_eq!(v["optimum"], "-1", "{variant}");
        assert_eq!(v["agrees"], true);
        assert_eq!(v["certificate"], "verified");
    }
    assert_eq!(qcx("lp-oracle --d 6 --k 2 --sign minus --variant full").code, 2);
}

#[test]
fn identities_pass() {
    let v = json("identities");
    assert_eq!(v["passed"], true);
    assert_eq!(v["alternating_binomial_tail"]["cases"], 231);
}

#[test]
fn output_is_deterministic() {
    for args in [
        "tables --dmax 12 --format latex",
        "tables --format json",
        "extremes --d 9 --k 3 --sign minus",
        "lp-oracle --d 6 --k 3 --sign plus --variant reduced",
    ] {
        assert_eq!(qcx(args), qcx(args), "{args}");
    }
}

#[test]
fn out_file_receives_output() {
    let dir = std::env::temp_dir().join(format!("qcx-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plus.csv");
    let out = qcx(&format!("table --sign plus --out {}", path.display()));
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), fixture("table_plus.csv"));
    std::fs::remove_dir_all(dir).unwrap();
}
