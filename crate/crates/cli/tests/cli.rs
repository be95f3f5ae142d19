use std::process::Command;

use clap::Parser;
use serde_json::Value;
use tmagic_cli::{run, Cli, Outcome};

fn cli(args: &[&str]) -> Result<Outcome, String> {
    let mut argv = vec!["tmagic", "--no-timing"];
    argv.extend_from_slice(args);
    run(&Cli::try_parse_from(argv).map_err(|e| e.to_string())?)
}

fn ok(args: &[&str]) -> String {
    let out = cli(args).unwrap();
    assert_eq!(out.exit_code, 0, "{args:?}: {}", out.stdout);
    out.stdout
}

fn expect_value(args: &[&str]) -> (f64, Value) {
    let out = ok(args);
    let mut lines = out.lines();
    let value: f64 = lines.next().unwrap().parse().unwrap();
    let record: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(record["value"].as_f64().unwrap(), value);
    (value, record)
}

fn temp_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tmagic-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn expect_examples() {
    let (v, rec) = expect_value(&["expect", "--t", "1", "--pauli", "X", "--mode", "gauss"]);
    assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    assert_eq!(rec["exact"], "(1,0,0,0,1)");
    assert!(rec.get("wall_time_s").is_none());

    let out = ok(&["expect", "--t", "6", "--pauli", "IIIIII", "--mode", "gauss"]);
    assert!(out.starts_with("1.0\n"));
}

#[test]
fn exact_and_gauss_agree_on_random_twelve_qubit_paulis() {
    for seed in ["7", "20", "51"] {
        let (a, ra) = expect_value(&["expect", "--t", "12", "--pauli", "random", "--seed", seed, "--mode", "exact"]);
        let (b, rb) = expect_value(&["expect", "--t", "12", "--pauli", "random", "--seed", seed, "--mode", "gauss"]);
        assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}");
        assert_eq!(ra["exact"], rb["exact"]);
        assert_eq!(ra["pauli"], rb["pauli"]);
        assert_eq!(ra["inner_products"], 47 * 47);
    }
}

#[test]
fn negative_pauli_and_projector_forms() {
    let (plus, _) = expect_value(&["expect", "--t", "2", "--pauli", "XY"]);
    let (minus, _) = expect_value(&["expect", "--t", "2", "--pauli", "-XY"]);
    assert!((plus + minus).abs() < 1e-15);
    // (I + Z)/2 on an ancilla in |0⟩ is 1.
    let (v, _) = expect_value(&["expect", "--t", "1", "--n", "2", "--projector", "+IZ"]);
    assert!((v - 1.0).abs() < 1e-15);
    // Projector on the magic qubits only is padded to n.
    let (v, rec) = expect_value(&["expect", "--t", "2", "--n", "3", "--projector", "+XX;+ZZ"]);
    assert_eq!(rec["projector"], "+XXI;+ZZI");
    assert!(v > 0.0 && v < 1.0);
}

#[test]
fn sampled_mode_reports_counters() {
    let (v, rec) = expect_value(&[
        "expect", "--t", "6", "--pauli", "XXXXXX", "--mode", "sampled", "--samples", "400", "--seed", "1",
    ]);
    assert_eq!(rec["samples"], 400);
    assert_eq!(rec["inner_products"], 400 * rec["projected_terms"].as_u64().unwrap());
    assert!((v - 0.125).abs() < 0.5);
    // Without --samples, L = ⌈ε⁻² ln(1/p_f)⌉.
    let (_, rec) = expect_value(&[
        "expect", "--t", "1", "--pauli", "Z", "--mode", "sampled", "--epsilon", "0.5", "--pf", "0.1",
    ]);
    assert_eq!(rec["samples"], 10);
}

#[test]
fn input_errors() {
    let e = cli(&["expect", "--t", "3", "--pauli", "XQZ"]).unwrap_err();
    assert!(e.contains("position 1"), "{e}");
    let e = cli(&["expect", "--t", "3", "--pauli", "-XQZ"]).unwrap_err();
    assert!(e.contains("position 2"), "{e}");
    assert!(cli(&["expect", "--t", "2", "--pauli", "XZZ", "--mode", "gauss"]).is_err());
    assert!(cli(&["expect", "--t", "2", "--pauli", "i:XZ", "--mode", "gauss"]).is_err());
    assert!(cli(&["expect", "--t", "2", "--n", "3", "--pauli", "XZ", "--mode", "gauss"]).is_err());
    assert!(cli(&["expect", "--t", "2", "--projector", "+XI;+ZI"]).is_err());
    assert!(cli(&["expect", "--t", "5", "--pauli", "XXXXX", "--policy", "6,3"]).is_err());
    assert!(cli(&["expect", "--t", "5", "--pauli", "XXXXX", "--policy", "4"]).is_err());
    assert!(cli(&["census", "--k", "12"]).is_err());
    assert!(cli(&["census", "--k", "4"]).is_err());
    assert!(cli(&["bench", "--t", "6", "--reps", "2"]).is_err());
    assert!(cli(&["bench", "--t", "5", "--policy", "6"]).is_err());
    assert!(cli(&["verify", "--scope", "nonsense"]).is_err());
}

#[test]
fn census_csv() {
    let out = ok(&["census", "--k", "3"]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["k", "mode", "row", "unique_nonzero_sums", "paulis", "witness"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let total: u64 = rows.iter().filter(|r| &r[2] == "bin").map(|r| r[4].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 64);
    let max = rows.last().unwrap();
    assert_eq!((&max[2], &max[3]), ("max", "3"));

    let six = ok(&["census", "--k", "6"]);
    assert!(six.lines().last().unwrap().starts_with("6,exhaustive,max,7,144,"));

    let path = temp_path("census12.csv");
    let out = ok(&[
        "census", "--k", "12", "--mode", "sampled", "--samples", "2000", "--seed", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out);
    let max: usize = out.lines().last().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(max <= 42);
}

#[test]
fn verify_scopes() {
    let out = ok(&["verify", "--scope", "gauss-k6"]);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["cases"][0]["checked"], 4096);
    assert_eq!(report["cases"][0]["failures"], 0);

    let out = ok(&["verify", "--scope", "decompositions"]);
    let report: Value = serde_json::from_str(&out).unwrap();
    let cases = report["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 5);
    assert!(cases.iter().all(|c| c["passed"] == true));
}

#[test]
fn bench_writes_records_and_fit() {
    let path = temp_path("bench.csv");
    let out = ok(&[
        "bench", "--t", "6,12,18", "--policy", "6", "--policy", "3", "--mode", "gauss", "--out",
        path.to_str().unwrap(),
    ]);
    let records = std::fs::read_to_string(&path).unwrap();
    let fit = std::fs::read_to_string(temp_path("bench.csv.fit.csv")).unwrap();
    assert_eq!(out, format!("{records}\n{fit}"));
    let mut rdr = csv::Reader::from_reader(fit.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let exp6: f64 = rows[0][6].parse().unwrap();
    let exp3: f64 = rows[1][6].parse().unwrap();
    assert!((exp6 - 7f64.log2() / 6.0).abs() < 1e-12);
    assert!((exp3 - 3f64.log2() / 3.0).abs() < 1e-12);
    assert!(!records.contains("median_wall_s"));
}

#[test]
fn bench_sampled_policy_ratio() {
    let out = ok(&["bench", "--t", "24", "--policy", "12", "--policy", "6", "--mode", "sampled", "--samples", "2"]);
    let mut rdr = csv::Reader::from_reader(out.split("\n\n").next().unwrap().as_bytes());
    let work: Vec<u64> = rdr.records().map(|r| r.unwrap()[6].parse().unwrap()).collect();
    assert_eq!(work, vec![2 * 47 * 47, 2 * 49 * 49]);
}

#[test]
fn bench_timing_columns() {
    let argv = ["tmagic", "bench", "--t", "2,4,6", "--policy", "2", "--mode", "exact"];
    let out = run(&Cli::try_parse_from(argv).unwrap()).unwrap().stdout;
    assert!(out.lines().next().unwrap().ends_with("median_wall_s"));
    assert!(out.contains("time_exponent"));
}

#[test]
fn catalog_round_trip_and_tamper_detection() {
    let path = temp_path("t3.txt");
    ok(&["catalog", "export", "--k", "3", "--out", path.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&ok(&["catalog", "check", "--catalog-file", path.to_str().unwrap()])).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["matches_builtin"], true);
    assert_eq!(report["terms"], 3);

    let (v_file, _) = expect_value(&["expect", "--catalog-file", path.to_str().unwrap(), "--pauli", "XYZ"]);
    let (v_builtin, _) = expect_value(&["expect", "--t", "3", "--pauli", "XYZ"]);
    assert_eq!(v_file, v_builtin);

    // Flip the first coefficient's sign: the file still parses but no longer
    // reconstructs the target.
    let text = std::fs::read_to_string(&path).unwrap();
    let line = text.lines().find(|l| l.starts_with("coeff=")).unwrap().to_string();
    let value = line.trim_start_matches("coeff=").trim();
    let inner: Vec<i64> = value
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|x| x.trim().parse().unwrap())
        .collect();
    let negated = format!(
        "coeff=({},{},{},{},{})",
        -inner[0], -inner[1], -inner[2], -inner[3], inner[4]
    );
    let bad = temp_path("t3-bad.txt");
    std::fs::write(&bad, text.replacen(&line, &negated, 1)).unwrap();
    let out = cli(&["catalog", "check", "--catalog-file", bad.to_str().unwrap()]).unwrap();
    assert_eq!(out.exit_code, 1);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["reconstructs_target"], false);
    assert_eq!(report["matches_builtin"], false);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tmagic");
    let out = Command::new(bin)
        .args(["verify", "--scope", "gauss-k3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    let out = Command::new(bin).args(["census", "--k", "12"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exhaustive"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["census", "--k", "12", "--mode", "sampled", "--samples", "500", "--seed", "11"];
    let one = run(&Cli::try_parse_from(["tmagic", "--threads", "1"].iter().chain(&args)).unwrap()).unwrap();
    let four = run(&Cli::try_parse_from(["tmagic", "--threads", "4"].iter().chain(&args)).unwrap()).unwrap();
    assert_eq!(one, four);
}
