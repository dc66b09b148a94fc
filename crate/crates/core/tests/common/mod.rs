//! Shared fixtures, golden-file comparison and CLI helpers for the
//! integration tests.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

use mpinv::isometry::{generate_special, prop53_check, theorem54_check, SpecialKind};
use mpinv::mp_hermitian::theorem51_check;
use mpinv::svd::operator_norm;
use mpinv::{classify, conorm, full_report, pinv, ComplexMatrix, Tolerance};

pub fn real(rows: &[&[f64]]) -> ComplexMatrix {
    let rows: Vec<Vec<_>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| mpinv::C64::new(x, 0.0)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).expect("valid fixture")
}

/// `a = diag(1, 0)`, `b = [[0, 1], [0, 0]]`.
pub fn rol_holding_pair() -> (ComplexMatrix, ComplexMatrix) {
    (real(&[&[1.0, 0.0], &[0.0, 0.0]]), real(&[&[0.0, 1.0], &[0.0, 0.0]]))
}

/// `a = diag(1, 0)`, `b = [[1, 0], [1, 0]]`.
pub fn rol_failing_pair() -> (ComplexMatrix, ComplexMatrix) {
    (real(&[&[1.0, 0.0], &[0.0, 0.0]]), real(&[&[1.0, 0.0], &[1.0, 0.0]]))
}

/// `[[1, 1], [0, -1]]`: Moore-Penrose hermitian, not normal.
pub fn t2() -> ComplexMatrix {
    real(&[&[1.0, 1.0], &[0.0, -1.0]])
}

pub const PLANTED_SIGMA: [f64; 3] = [5.0, 3.0, 0.5];
pub const PLANTED_SEED: u64 = 11;

pub fn planted_conorm_fixture() -> ComplexMatrix {
    let kind = SpecialKind::PrescribedSingularValues {
        sigma: PLANTED_SIGMA.to_vec(),
    };
    generate_special(&kind, 4, PLANTED_SEED).expect("valid fixture")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Compares `actual` with `tests/golden/<name>.json`; `MPINV_BLESS=1`
/// rewrites the file instead.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(format!("{name}.json"));
    if std::env::var_os("MPINV_BLESS").is_some() {
        fs::create_dir_all(golden_dir()).map_err(|e| e.to_string())?;
        fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{name}: output differs from {}", path.display()))
    }
}

/// Library-level golden documents, keyed by file name.
pub fn library_goldens() -> Vec<(&'static str, String)> {
    let t = Tolerance::default();
    let pair_doc = |(a, b): (ComplexMatrix, ComplexMatrix)| {
        let report = full_report(&a, &b, &t).expect("defined product");
        pretty(&json!({ "a": a, "b": b, "report": report }))
    };
    let a = t2();
    let t2_doc = json!({
        "a": a,
        "operator_norm": operator_norm(&a).unwrap(),
        "pinv": pinv(&a, &t).unwrap(),
        "classification": classify(&a, &t).unwrap(),
        "theorem51": theorem51_check(&a, &t).unwrap(),
        "theorem54": theorem54_check(&a, &t).unwrap(),
    });
    let diag = ComplexMatrix::from_real_diag(&[3.0, 2.0, 0.0]);
    let planted = planted_conorm_fixture();
    let conorm_entry = |m: &ComplexMatrix| {
        json!({
            "a": m,
            "conorm": conorm(m, &t).unwrap(),
            "pinv_norm": operator_norm(&pinv(m, &t).unwrap().pinv).unwrap(),
            "prop53": prop53_check(m, &t).unwrap(),
        })
    };
    let conorm_doc = json!({
        "diagonal": conorm_entry(&diag),
        "planted": conorm_entry(&planted),
    });
    vec![
        ("rol_holding_pair", pair_doc(rol_holding_pair())),
        ("rol_failing_pair", pair_doc(rol_failing_pair())),
        ("t2", pretty(&t2_doc)),
        ("conorm_fixtures", pretty(&conorm_doc)),
    ]
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliRun {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

pub fn mpinv(args: &[&str]) -> CliRun {
    let out = Command::new(env!("CARGO_BIN_EXE_mpinv"))
        .args(args)
        .output()
        .expect("mpinv binary runs");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Scratch directory holding the CLI input fixtures.
pub fn cli_inputs() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-inputs");
    fs::create_dir_all(&dir).expect("scratch dir");
    let (a_hold, b_hold) = rol_holding_pair();
    let (a_fail, b_fail) = rol_failing_pair();
    let files: Vec<(&str, String)> = vec![
        ("diag2.json", r#"{"rows":2,"cols":2,"data":[[2,0],[0,0],[0,0],[0,0]]}"#.into()),
        ("diag_pm.json", serde_json::to_string(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0])).unwrap()),
        ("diag320.json", serde_json::to_string(&ComplexMatrix::from_real_diag(&[3.0, 2.0, 0.0])).unwrap()),
        ("t2.json", serde_json::to_string(&t2()).unwrap()),
        ("a_hold.json", serde_json::to_string(&a_hold).unwrap()),
        ("b_hold.json", serde_json::to_string(&b_hold).unwrap()),
        ("a_fail.json", serde_json::to_string(&a_fail).unwrap()),
        ("b_fail.json", serde_json::to_string(&b_fail).unwrap()),
        ("wide.json", serde_json::to_string(&ComplexMatrix::zeros(1, 3)).unwrap()),
        ("zero.json", serde_json::to_string(&ComplexMatrix::zeros(2, 2)).unwrap()),
        ("malformed.json", r#"{"rows":2,"cols":2,"data":[[1,0]"#.into()),
        ("short.json", r#"{"rows":2,"cols":2,"data":[[1,0]]}"#.into()),
    ];
    // Tests run concurrently; rename keeps readers from seeing partial files.
    let tag = format!("{:?}", std::thread::current().id()).replace(|c: char| !c.is_ascii_alphanumeric(), "");
    for (name, text) in files {
        let tmp = dir.join(format!(".{name}.{}.{tag}", std::process::id()));
        fs::write(&tmp, text).expect("write fixture");
        fs::rename(&tmp, dir.join(name)).expect("publish fixture");
    }
    dir
}

pub fn path_arg(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

/// Structural skeleton of a JSON value: object keys are kept, scalars are
/// replaced by their type, arrays by the skeleton of their first element.
pub fn skeleton(v: &Value) -> Value {
    match v {
        Value::Null => json!("null"),
        Value::Bool(_) => json!("bool"),
        Value::Number(_) => json!("number"),
        Value::String(_) => json!("string"),
        Value::Array(items) => Value::Array(items.first().map(skeleton).into_iter().collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), skeleton(v))).collect()),
    }
}

/// Deterministic CLI invocations whose stdout is compared verbatim.
pub fn cli_golden_invocations(dir: &Path) -> Vec<(&'static str, Vec<String>)> {
    let p = |name: &str| path_arg(dir, name);
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("cli_pinv_diag", [s(&["pinv", "--in"]), vec![p("diag2.json")]].concat()),
        (
            "cli_rol_holding",
            [s(&["rol", "--a"]), vec![p("a_hold.json")], s(&["--b"]), vec![p("b_hold.json")]].concat(),
        ),
        (
            "cli_rol_failing",
            [s(&["rol", "--a"]), vec![p("a_fail.json")], s(&["--b"]), vec![p("b_fail.json")]].concat(),
        ),
        ("cli_classify_diag_pm", [s(&["classify", "--in"]), vec![p("diag_pm.json")]].concat()),
        ("cli_decompose_t2", [s(&["decompose", "--in"]), vec![p("t2.json")]].concat()),
        ("cli_conorm_diag", [s(&["conorm", "--in"]), vec![p("diag320.json")]].concat()),
        (
            "cli_gen_regular",
            s(&["gen", "--kind", "regular", "--rows", "3", "--cols", "2", "--rank", "1", "--seed", "4"]),
        ),
        (
            "cli_fuzz_replay",
            s(&["fuzz", "--suite", "rol", "--trials", "1", "--max-dim", "4", "--seed", "3", "--trial", "0"]),
        ),
    ]
}

/// Invocations whose output contains run-dependent values (timings); only
/// their skeleton is compared.
pub fn cli_schema_invocations() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("cli_fuzz_penrose", vec!["fuzz", "--suite", "penrose", "--trials", "20", "--max-dim", "4", "--seed", "1"]),
        (
            "cli_fuzz_all_verdicts",
            vec!["fuzz", "--suite", "all", "--trials", "2", "--max-dim", "3", "--seed", "5", "--verdicts"],
        ),
    ]
}

/// Runs every golden and schema invocation; returns the mismatches.
pub fn check_cli_goldens() -> Vec<String> {
    let dir = cli_inputs();
    let mut problems = Vec::new();
    for (name, args) in cli_golden_invocations(&dir) {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let run = mpinv(&args);
        if run.code != 0 {
            problems.push(format!("{name}: exit {} ({})", run.code, run.stderr.trim()));
            continue;
        }
        // Input paths depend on the build directory; the output never echoes them.
        if let Err(e) = check_golden(name, &run.stdout) {
            problems.push(e);
        }
    }
    for (name, args) in cli_schema_invocations() {
        let run = mpinv(&args);
        if run.code != 0 {
            problems.push(format!("{name}: exit {} ({})", run.code, run.stderr.trim()));
            continue;
        }
        let schema = pretty(&skeleton(&run.json()));
        if let Err(e) = check_golden(&format!("{name}.schema"), &schema) {
            problems.push(e);
        }
    }
    problems
}
