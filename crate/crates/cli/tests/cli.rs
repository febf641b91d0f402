use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use copinfo::copula::{
    apply_marginals, excess_information, mi_t, sample_copula, CopulaModel, MarginalSpec,
};
use copinfo::SamplePairs;
use copinfo_cli::commands::write_pair_file;
use copinfo_cli::input::{ingest_returns, pairwise_complete, read_panel, ReturnMode};
use serde_json::Value;

fn copinfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copinfo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

/// Data rows of a CSV table, skipping the metadata comment.
fn table(text: &str) -> Vec<csv::StringRecord> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

fn column(rows: &[csv::StringRecord], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn error_of(o: &Output) -> (i32, Value) {
    let err: Value = serde_json::from_slice(&o.stderr).expect("machine-readable error");
    (o.status.code().unwrap(), err["error"].clone())
}

fn sample(model: CopulaModel, n: usize, seed: u64) -> SamplePairs {
    let p = sample_copula(&model, n, seed).unwrap();
    let g = MarginalSpec::Gaussian {
        mu: 0.0,
        sigma: 1.0,
    };
    apply_marginals(&p, &g, &g).unwrap()
}

fn pair_file(dir: &Path, name: &str, s: &SamplePairs) -> String {
    let path = dir.join(name);
    write_pair_file(&path, s).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn excess_curve_values() {
    let rows = table(&stdout(&copinfo(&["excess-curve", "--nu", "1"])));
    assert_eq!(rows.len(), 1);
    assert!((column(&rows, 1)[0] - 0.2241714275292).abs() < 1e-12);

    let rows = table(&stdout(&copinfo(&[
        "excess-curve",
        "--nu-min",
        "0.5",
        "--nu-max",
        "1e6",
        "--steps",
        "60",
    ])));
    let excess = column(&rows, 1);
    assert_eq!(excess.len(), 60);
    assert!(excess.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(column(&rows, 0)[59], 1e6);
    assert!(excess[59] < 1e-5);

    let (code, err) = error_of(&copinfo(&[
        "excess-curve",
        "--nu-min",
        "5",
        "--nu-max",
        "2",
    ]));
    assert_eq!(code, 2);
    assert_eq!(err["kind"], "usage");
}

#[test]
fn simulate_is_deterministic_and_tracks_the_excess() {
    let args = [
        "simulate",
        "--rho",
        "0.5",
        "--nu",
        "4",
        "--n",
        "4700",
        "--runs",
        "20",
        "--marginals",
        "lognormal",
        "student:3",
        "--seed",
        "11",
    ];
    let first = copinfo(&args);
    let second = copinfo(&args);
    assert_eq!(first.stdout, second.stdout);

    let text = stdout(&first);
    assert!(text.starts_with("# command=simulate"));
    let rows = table(&text);
    assert_eq!(rows.len(), 20);
    let excess = column(&rows, 7);
    let mean = excess.iter().sum::<f64>() / 20.0;
    let sd = (excess.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 19.0).sqrt();
    let truth = excess_information(4.0).unwrap();
    assert!(
        (mean - truth).abs() < 3.0 * sd / 20f64.sqrt(),
        "{mean} vs {truth}"
    );
    assert!((column(&rows, 6)[0] - mi_t(0.5, 4.0).unwrap()).abs() < 1e-15);
}

#[test]
fn simulate_independence_gives_near_zero_mi() {
    let rows = table(&stdout(&copinfo(&[
        "simulate",
        "--rho",
        "0",
        "--marginals",
        "lognormal:0,2",
        "--runs",
        "20",
    ])));
    let mi = column(&rows, 5);
    assert!((mi.iter().sum::<f64>() / 20.0).abs() < 0.02);
}

#[test]
fn simulated_samples_round_trip_through_fit() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("runs");
    stdout(&copinfo(&[
        "simulate",
        "--rho",
        "0.5",
        "--nu",
        "3",
        "--n",
        "5000",
        "--runs",
        "1",
        "--samples",
        samples.to_str().unwrap(),
    ]));
    let fit = json(&copinfo(&[
        "fit",
        samples.join("run_000.csv").to_str().unwrap(),
    ]));
    assert!((fit["rho_hat"].as_f64().unwrap() - 0.5).abs() < 0.03);
    let nu = fit["nu_hat"].as_f64().expect("finite nu_hat");
    assert!((nu - 3.0).abs() < 0.75 * 3.0, "{nu}");
    assert_eq!(fit["units"], "nats");
    assert_eq!(fit["replicates"], 200);
    assert_eq!(fit["level"], 0.9);
}

#[test]
fn mi_on_independent_data_covers_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = pair_file(
        dir.path(),
        "ind.csv",
        &sample(CopulaModel::gaussian(0.0).unwrap(), 2000, 4),
    );
    let r = json(&copinfo(&["mi", &file]));
    assert!(r["ci_low"].as_f64().unwrap() <= 0.0 && r["ci_high"].as_f64().unwrap() >= 0.0);
    for key in ["k", "transform", "tie_seed", "replicates", "level", "seed"] {
        assert!(r.get(key).is_some(), "{key} missing");
    }

    let csv_out = stdout(&copinfo(&["mi", &file, "--format", "csv", "--k", "5"]));
    let mut lines = csv_out.lines();
    assert!(lines.next().unwrap().starts_with("n,value,ci_low,ci_high"));
    assert!(lines.next().unwrap().starts_with("2000,"));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let one_col = dir.path().join("one.csv");
    std::fs::write(&one_col, "1\n2\n3\n").unwrap();
    let (code, err) = error_of(&copinfo(&["fit", one_col.to_str().unwrap()]));
    assert_eq!(code, 3);
    assert!(err["message"].as_str().unwrap().contains(":1:"));

    let small = pair_file(
        dir.path(),
        "small.csv",
        &sample(CopulaModel::gaussian(0.3).unwrap(), 50, 1),
    );
    assert_eq!(error_of(&copinfo(&["fit", &small])).0, 3);
    assert_eq!(error_of(&copinfo(&["mi", &small, "--level", "1.5"])).0, 2);
    assert_eq!(error_of(&copinfo(&["mi", &small, "--k", "x"])).0, 2);
    assert_eq!(
        error_of(&copinfo(&["simulate", "--rho", "0.5", "--nu", "-1"])).0,
        2
    );

    // A common random scale makes uncorrelated coordinates strongly
    // dependent, beyond what any T-copula can carry.
    let z = sample(CopulaModel::gaussian(0.0).unwrap(), 2000, 2);
    let g = sample(CopulaModel::gaussian(0.0).unwrap(), 2000, 3);
    let mixed = z
        .pairs()
        .zip(g.x())
        .map(|((a, b), s)| {
            let r = s.abs().powi(6);
            (r * a, r * b)
        })
        .collect::<Vec<_>>();
    let mixed = pair_file(
        dir.path(),
        "mixed.csv",
        &SamplePairs::from_pairs(&mixed).unwrap(),
    );
    let (code, err) = error_of(&copinfo(&[
        "fit",
        &mixed,
        "--replicates",
        "20",
        "--force-nu",
    ]));
    assert_eq!(code, 4);
    assert_eq!(err["kind"], "numerical");
}

/// Panel with a T-copula pair, an independent ticker with gaps and a short
/// ticker. Prices are 100 at the open and 100 e^r at the close.
fn write_panel(path: &Path) {
    let n = 3000;
    let t = sample(CopulaModel::student_t(0.5, 4.0).unwrap(), n, 21);
    let c = sample(CopulaModel::gaussian(0.0).unwrap(), n, 22);
    let mut text = String::from(
        "date,BBB_open,BBB_close,AAA_open,AAA_close,CCC_open,CCC_close,DDD_open,DDD_close\n",
    );
    for i in 0..n {
        let cell = |r: f64| format!("100,{}", 100.0 * r.exp());
        let ccc = if i % 7 == 0 {
            "100,NA".to_string()
        } else {
            cell(c.x()[i])
        };
        let ddd = if i < 60 {
            cell(c.y()[i])
        } else {
            ",".to_string()
        };
        writeln!(
            text,
            "{:04}-{:02}-{:02},{},{},{ccc},{ddd}",
            2000 + i / 360,
            1 + (i / 30) % 12,
            1 + i % 30,
            cell(t.y()[i]),
            cell(t.x()[i]),
        )
        .unwrap();
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn scan_rows_match_fit() {
    let dir = tempfile::tempdir().unwrap();
    let panel_path = dir.path().join("panel.csv");
    write_panel(&panel_path);
    let p = panel_path.to_str().unwrap();

    let out = copinfo(&["scan", p, "--format", "json", "--seed", "9"]);
    let scan = json(&out);
    assert_eq!(scan["units"], "nats");
    assert_eq!(scan["mode"], "close-open");
    let rows = scan["rows"].as_array().unwrap();
    let names: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| {
            (
                r["ticker_a"].as_str().unwrap(),
                r["ticker_b"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        names,
        [
            ("AAA", "BBB"),
            ("AAA", "CCC"),
            ("AAA", "DDD"),
            ("BBB", "CCC"),
            ("BBB", "DDD"),
            ("CCC", "DDD")
        ]
    );

    let ab = &rows[0];
    // The one-sided bound decides the verdict; at this n the two-sided
    // interval is too wide to exclude zero reliably.
    assert!(ab["excess_lower_bound"].as_f64().unwrap() > 0.0, "{ab}");
    assert!(ab["nu_hat"].is_f64());
    assert!(ab["skip_reason"].is_null());
    assert_eq!(rows[1]["n"], 3000 - 3000 / 7 - 1);
    for (i, n) in [(2, 60), (4, 60), (5, 60 - 9)] {
        let r = &rows[i];
        assert_eq!(r["n"], n);
        assert!(r["mi"].is_null());
        assert!(r["skip_reason"].as_str().unwrap().contains("100"));
    }

    // The same pair through `fit` with the row's seed reproduces the row.
    let series = ingest_returns(&read_panel(&panel_path).unwrap(), ReturnMode::CloseOpen);
    let find = |t: &str| series.iter().find(|s| s.ticker == t).unwrap();
    for (i, (a, b)) in [(0, ("AAA", "BBB")), (1, ("AAA", "CCC"))] {
        let (x, y) = pairwise_complete(find(a), find(b));
        let file = pair_file(
            dir.path(),
            &format!("{a}{b}.csv"),
            &SamplePairs::new(x, y).unwrap(),
        );
        let seed = rows[i]["seed"].as_u64().unwrap().to_string();
        let fit = json(&copinfo(&["fit", &file, "--seed", &seed]));
        for (key, value) in fit.as_object().unwrap() {
            if let Some(scanned) = rows[i].get(key) {
                assert_eq!(scanned, value, "{a}/{b} field {key}");
            }
        }
    }

    // Deterministic output, independent of thread scheduling.
    assert_eq!(
        out.stdout,
        copinfo(&["scan", p, "--format", "json", "--seed", "9"]).stdout
    );

    let csv_out = stdout(&copinfo(&[
        "scan",
        p,
        "--mode",
        "close-close",
        "--replicates",
        "20",
    ]));
    assert!(csv_out.starts_with("# command=scan mode=close-close k=3"));
    assert_eq!(table(&csv_out).len(), 6);
}

#[test]
fn scan_rejects_bad_panels() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "date,A_open,A_close,B_open,B_close\n2024-01-02,1,1,1,0\n",
    )
    .unwrap();
    let (code, err) = error_of(&copinfo(&["scan", bad.to_str().unwrap()]));
    assert_eq!(code, 3);
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains('B') && msg.contains("2024-01-02"), "{msg}");

    let single = dir.path().join("single.csv");
    std::fs::write(&single, "date,A_open,A_close\n2024-01-02,1,1\n").unwrap();
    assert_eq!(error_of(&copinfo(&["scan", single.to_str().unwrap()])).0, 3);
}
