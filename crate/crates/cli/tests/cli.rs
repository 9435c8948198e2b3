use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use menzerath_core::{REFERENCE_TABLE_TSV, SAMPLE_VERTICAL};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_menzerath"));
    c.env("RUST_LOG", "info");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn segment_two_sentences() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "two.txt", "Він стояв. Вона пішла.");
    let out = run(&["segment", s(&input)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "Він\tOTHER\nстояв\tOTHER\n.\tPUNCT\n\nВона\tOTHER\nпішла\tOTHER\n.\tPUNCT\n");
    assert_eq!(text.matches("\n\n").count(), 1);

    let outdir = dir.path().join("seg");
    let out = run(&["segment", s(&input), "--out", s(&outdir)]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(outdir.join("two.vert")).unwrap(), text);
}

#[test]
fn segment_empty_file() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "empty.txt", "");
    let out = run(&["segment", s(&input)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn segment_unreadable_path() {
    let out = run(&["segment", "/nonexistent/dir/missing.txt"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/nonexistent/dir/missing.txt"));
}

#[test]
fn segment_invalid_utf8_reports_offset() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, b"ok \xfe").unwrap();
    let out = run(&["segment", s(&p)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("byte offset 3"), "{}", stderr(&out));
}

#[test]
fn analyze_tagged_sample() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "sample.vert", SAMPLE_VERTICAL);
    let outdir = dir.path().join("out");
    let out = run(&["analyze", s(&input), "--out", s(&outdir)]);
    assert!(out.status.success(), "{}", stderr(&out));

    // Counted by hand from the sample file.
    let expected = "index\twords\tsyllables\tn1\tn2\tn3\tn4\tnc\tclauses\n\
                    0\t11\t26\t1\t2\t0\t0\t0\t3\n\
                    1\t4\t7\t0\t0\t0\t1\t0\t1\n\
                    2\t7\t12\t2\t0\t1\t0\t1\t3\n\
                    3\t8\t15\t4\t0\t0\t0\t2\t4\n\
                    4\t1\t2\t0\t0\t1\t0\t0\t1\n";
    assert_eq!(fs::read_to_string(outdir.join("sentences.tsv")).unwrap(), expected);

    let table = fs::read_to_string(outdir.join("table.tsv")).unwrap();
    let t = menzerath_core::AggregateTable::parse(&table).unwrap();
    assert_eq!(t.total_sentences, 5);
    assert_eq!(t.rows.len(), 4);
    assert_eq!((t.rows[0].sentences, t.rows[0].mean_words, t.rows[0].mean_syllables), (2, 2.5, 4.5));
    assert_eq!(t.rows[1].sentences, 0);
    assert_eq!((t.rows[2].sentences, t.rows[2].mean_words), (2, 3.0));
    assert!((t.rows[2].mean_syllables - 38.0 / 6.0).abs() < 1e-12);
    assert_eq!((t.rows[3].mean_words, t.rows[3].mean_syllables), (2.0, 3.75));
}

#[test]
fn analyze_json_table() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "sample.vert", SAMPLE_VERTICAL);
    let outdir = dir.path().join("out");
    let out = run(&["analyze", s(&input), "--format", "json", "--out", s(&outdir)]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(outdir.join("table.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["total_sentences"], 5);
}

#[test]
fn analyze_raw_mode_warns() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "raw.txt", "Він знав, що вона прийде. Шкода.");
    let outdir = dir.path().join("out");
    let out = run(&["analyze", s(&input), "--mode", "raw", "--out", s(&outdir)]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("lower bound"));
    let tsv = fs::read_to_string(outdir.join("sentences.tsv")).unwrap();
    assert_eq!(tsv.lines().nth(1).unwrap(), "0\t5\t7\t0\t0\t0\t0\t1\t2");
    assert_eq!(tsv.lines().nth(2).unwrap(), "1\t1\t2\t0\t0\t0\t0\t0\t1");
}

#[test]
fn analyze_missing_lexicon_fails() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "sample.vert", SAMPLE_VERTICAL);
    let out = run(&[
        "analyze",
        s(&input),
        "--lexicon",
        "/nonexistent/lexicon.txt",
        "--out",
        s(&dir.path().join("o")),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/nonexistent/lexicon.txt"));
}

#[test]
fn analyze_custom_lexicon() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "s.vert", "Треба\tOTHER\nйти\tINFINITIVE\n");
    let lex = write(dir.path(), "lex.txt", "# empty list\n");
    let outdir = dir.path().join("o");
    assert!(run(&["analyze", s(&input), "--lexicon", s(&lex), "--out", s(&outdir)]).status.success());
    let tsv = fs::read_to_string(outdir.join("sentences.tsv")).unwrap();
    assert_eq!(tsv.lines().nth(1).unwrap(), "0\t2\t3\t0\t0\t0\t0\t0\t1");
}

#[test]
fn analyze_malformed_tagged_line() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "bad.vert", "а\tCONJ\nб\tOTHER\tx\ty\n");
    let out = run(&["analyze", s(&input), "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn fit_reference_table() {
    let dir = TempDir::new().unwrap();
    let table = write(dir.path(), "table.tsv", REFERENCE_TABLE_TSV);
    let outdir = dir.path().join("fit");
    let out = run(&["fit", s(&table), "--out", s(&outdir)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(outdir.join("fit.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let a = report["words"]["params"]["a"].as_f64().unwrap();
    assert!((a - 6.80).abs() <= 0.84);
    let p = report["sentences"]["params"]["p"].as_f64().unwrap();
    assert!((p - 0.515).abs() <= 0.012);
    for name in ["plot_words.tsv", "plot_syllables.tsv", "plot_sentences.tsv"] {
        let plot = fs::read_to_string(outdir.join(name)).unwrap();
        assert!(plot.starts_with("x\tobserved\testimated\n"));
        assert_eq!(plot.lines().count(), 17);
    }
}

#[test]
fn fit_insufficient_rows() {
    let dir = TempDir::new().unwrap();
    let table = write(dir.path(), "t.tsv", "x\tmean_words\tmean_syllables\tsentences\n1\t5\t10\t30\n2\t5.2\t10.1\t20\n3\t5.1\t10.3\t9\n");
    let out = run(&["fit", s(&table), "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("need at least 4 rows"), "{}", stderr(&out));
}

#[test]
fn fit_malformed_table() {
    let dir = TempDir::new().unwrap();
    let table = write(dir.path(), "t.tsv", "x\tmean_words\tmean_syllables\tsentences\n1\t5\t10\t30\n2\tfive\t10\t2\n");
    let out = run(&["fit", s(&table), "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn evaluate_small_pair() {
    let dir = TempDir::new().unwrap();
    let auto = write(dir.path(), "auto.tsv", "index\twords\tclauses\n0\t4\t1\n1\t9\t2\n2\t12\t2\n");
    let gold = write(dir.path(), "gold.tsv", "index\tclauses\n0\t1\n1\t2\n2\t3\n");
    let out = run(&["evaluate", s(&auto), "--gold", s(&gold)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# mismatches\t1\n"));
    assert!(text.contains("2\t4.50\t5.25\t1\t2\n"), "{text}");
    assert!(text.contains("3\t4.00\t0.00\t1\t0\n"), "{text}");

    let short = write(dir.path(), "short.tsv", "index\tclauses\n0\t1\n");
    let out = run(&["evaluate", s(&auto), "--gold", s(&short)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("align"));
}

#[test]
fn report_with_estimates() {
    let dir = TempDir::new().unwrap();
    let table = write(dir.path(), "t.tsv", REFERENCE_TABLE_TSV);
    let out = run(&["report", s(&table), "--estimated"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17);
    assert!(lines[0].starts_with("x\twords_observed\twords_estimated"));
    assert!(lines[15].starts_with("15\t0.00\t"));
    let first: Vec<&str> = lines[1].split('\t').collect();
    assert_eq!(first[1], "4.96");
    assert_eq!(first[5], "3930");
    let est: f64 = first[6].parse().unwrap();
    assert!((est - 3929.0).abs() < 2.0, "{est}");

    let out = run(&["report", s(&table), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["total_sentences"], 8455);
    assert!(json["rows"][0]["words_estimated"].is_null());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "sample.vert", SAMPLE_VERTICAL);
    let table = write(dir.path(), "t.tsv", REFERENCE_TABLE_TSV);
    let mut snapshots = Vec::new();
    for i in 0..2 {
        let a = dir.path().join(format!("a{i}"));
        let f = dir.path().join(format!("f{i}"));
        assert!(run(&["analyze", s(&input), "--out", s(&a)]).status.success());
        assert!(run(&["fit", s(&table), "--out", s(&f)]).status.success());
        let mut files = Vec::new();
        for (d, name) in [(&a, "sentences.tsv"), (&a, "table.tsv"), (&f, "fit.json"), (&f, "plot_sentences.tsv")] {
            files.push(fs::read(d.join(name)).unwrap());
        }
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn unwritable_output_directory() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "sample.vert", SAMPLE_VERTICAL);
    // a regular file cannot serve as output directory
    let blocker = write(dir.path(), "file", "");
    let out = run(&["analyze", s(&input), "--out", s(&blocker.join("sub"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("output directory"));
}
