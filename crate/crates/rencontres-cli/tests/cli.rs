//! End-to-end tests against the built binary. Every test runs in its own
//! temporary directory so the default `./rencontres.cache` never leaks
//! between tests or into the workspace.

use std::path::Path;
use std::process::{Command, Output};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rencontres"))
        .env_remove("RENCONTRES_CACHE")
        .env_remove("RENCONTRES_HORIZON")
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_of(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn compute_prints_single_values() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["two-term", "alternating", "subfactorial"] {
        let out = run_in(dir.path(), &["compute", "6", "--method", method]);
        assert_eq!(exit_of(&out), 0, "{method}: {}", stderr_of(&out));
        assert_eq!(stdout_of(&out), "265\n", "{method}");
    }
    let out = run_in(dir.path(), &["compute", "0", "--method", "subfactorial"]);
    assert_eq!(stdout_of(&out), "1\n");
    let out = run_in(dir.path(), &["compute", "6", "--method", "telescoped"]);
    assert_eq!(stdout_of(&out), "265\n");
    // Flag spelling of the index behaves identically.
    let out = run_in(dir.path(), &["compute", "--n", "6"]);
    assert_eq!(stdout_of(&out), "265\n");
}

#[test]
fn compute_oracle_honors_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["compute", "12", "--method", "oracle"]);
    assert_eq!(exit_of(&out), 3);
    assert!(stderr_of(&out).contains("horizon"));

    let out = run_in(dir.path(), &["compute", "8", "--method", "oracle", "--horizon", "8"]);
    assert_eq!(exit_of(&out), 0);
    assert_eq!(stdout_of(&out), "14833\n");

    // The structural cap cannot be raised past the u64-safe bound.
    let out = run_in(dir.path(), &["compute", "21", "--method", "oracle", "--horizon", "30"]);
    assert_eq!(exit_of(&out), 3);
}

#[test]
fn compute_oracle_census_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["compute", "4", "--method", "oracle", "--format", "csv"]);
    assert_eq!(stdout_of(&out), "r,count\n0,9\n1,8\n2,6\n3,0\n4,1\n");
    let out = run_in(dir.path(), &["compute", "3", "--method", "oracle", "--format", "jsonl"]);
    assert_eq!(
        stdout_of(&out),
        "{\"n\":3,\"r\":0,\"count\":2}\n{\"n\":3,\"r\":1,\"count\":3}\n\
         {\"n\":3,\"r\":2,\"count\":0}\n{\"n\":3,\"r\":3,\"count\":1}\n"
    );
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // Method-specific minimum.
    let out = run_in(dir.path(), &["compute", "1", "--method", "telescoped"]);
    assert_eq!(exit_of(&out), 2);
    // Sampler minimum.
    let out = run_in(dir.path(), &["sample", "1"]);
    assert_eq!(exit_of(&out), 2);
    // Unsorted bench targets.
    let out = run_in(dir.path(), &["bench", "3", "2"]);
    assert_eq!(exit_of(&out), 2);
    // Unknown identity tag.
    let out = run_in(dir.path(), &["verify", "--identity", "nonsense"]);
    assert_eq!(exit_of(&out), 2);
    // Missing argument and malformed flags are caught by the parser.
    let out = run_in(dir.path(), &["compute"]);
    assert_eq!(exit_of(&out), 2);
    let out = run_in(dir.path(), &["compute", "six"]);
    assert_eq!(exit_of(&out), 2);
    // Zero draws make no sense.
    let out = run_in(dir.path(), &["sample", "4", "--count", "0"]);
    assert_eq!(exit_of(&out), 2);
}

#[test]
fn table_derangements_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["table", "0", "derangements"]);
    assert_eq!(stdout_of(&out), "0,1\n");
    let out = run_in(dir.path(), &["table", "6", "derangements"]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().last().unwrap(), "6,265");
    assert_eq!(text.lines().count(), 7);
    // Kind defaults to derangements.
    let out = run_in(dir.path(), &["table", "6"]);
    assert_eq!(stdout_of(&out), text);
    // CSV adds a header above the same rows.
    let out = run_in(dir.path(), &["table", "2", "derangements", "--format", "csv"]);
    assert_eq!(stdout_of(&out), "n,derangement\n0,1\n1,0\n2,1\n");
}

#[test]
fn table_rencontres_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["table", "4", "rencontres", "--format", "csv"]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().next().unwrap(), "n,r0,r1,r2,r3,r4");
    assert_eq!(text.lines().last().unwrap(), "4,9,8,6,0,1");
    let out = run_in(dir.path(), &["table", "3", "rencontres"]);
    assert_eq!(stdout_of(&out), "0,1\n1,0,1\n2,1,0,1\n3,2,3,0,1\n");
    let out = run_in(dir.path(), &["table", "1", "rencontres", "--format", "jsonl"]);
    assert_eq!(
        stdout_of(&out),
        "{\"n\":0,\"counts\":[\"1\"]}\n{\"n\":1,\"counts\":[\"0\",\"1\"]}\n"
    );
}

#[test]
fn verify_full_suite_small_range_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--n-max", "30"]);
    assert_eq!(exit_of(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    // 31 + 29 + 29 + 29 + 30 + 30 + 4*30 + 4*30 + 30 points.
    assert_eq!(text.lines().last().unwrap(), "checked=448 failed=0");
    assert!(!text.contains("FAIL"));
    // Clamping goes to stderr, not into the report stream.
    assert!(stderr_of(&out).contains("clamped"));
}

#[test]
fn verify_single_identity_reports_each_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--identity", "thm1", "--n-max", "4"]);
    assert_eq!(exit_of(&out), 0);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[3], "thm1 n=4: 53/24 == 53/24 ok");
    assert_eq!(lines[4], "checked=4 failed=0");
}

#[test]
fn verify_jsonl_reports_have_stable_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["verify", "--identity", "row_sum", "--n-max", "1", "--format", "jsonl"],
    );
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        r#"{"identity_id":"row_sum","n":0,"r":null,"lhs":"1/1","rhs":"1/1","holds":true}"#
    );
    assert_eq!(lines[2], "checked=2 failed=0");
    for line in &lines[..2] {
        let value: serde_json::Value = serde_json::from_str(line).expect("valid JSON");
        assert_eq!(value["holds"], serde_json::json!(true));
    }
}

#[test]
fn verify_exits_one_on_tampered_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["compute", "12"]);
    assert_eq!(exit_of(&out), 0);

    let cache_path = dir.path().join("rencontres.cache");
    let tampered = std::fs::read_to_string(&cache_path)
        .unwrap()
        .replace("\n44\n", "\n45\n");
    std::fs::write(&cache_path, tampered).unwrap();

    let out = run_in(dir.path(), &["verify", "--n-max", "10"]);
    assert_eq!(exit_of(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("cache_recurrence n=5: 45/1 == 44/1 FAIL"), "{text}");
    assert_eq!(text.lines().last().unwrap(), "checked=1 failed=1");

    // Commands that need a trustworthy cache refuse it outright.
    let out = run_in(dir.path(), &["compute", "6"]);
    assert_eq!(exit_of(&out), 4);
    // Structurally broken files are an internal error for verify too.
    std::fs::write(&cache_path, "nonsense\n").unwrap();
    let out = run_in(dir.path(), &["verify", "--n-max", "10"]);
    assert_eq!(exit_of(&out), 4);
}

#[test]
fn bench_digests_agree_across_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["bench", "30"]);
    assert_eq!(exit_of(&out), 0);
    let text = stdout_of(&out);
    let digests: Vec<&str> = text
        .lines()
        .map(|line| line.rsplit("digest=").next().unwrap())
        .collect();
    // two-term, alternating, subfactorial, telescoped; oracle sits above the
    // default horizon and is skipped with a notice.
    assert_eq!(digests.len(), 4);
    assert!(digests.windows(2).all(|pair| pair[0] == pair[1]), "{text}");
    assert!(digests[0].ends_with("x32"), "{text}");
    assert!(stderr_of(&out).contains("oracle skipped"));

    let out = run_in(dir.path(), &["bench", "0"]);
    let text = stdout_of(&out);
    assert!(text.lines().all(|line| line.contains("digest=1x1")), "{text}");
}

#[test]
fn bench_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["bench", "5", "--format", "csv"]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().next().unwrap(), "n,method,milliseconds,digest");
    assert!(text.lines().any(|line| line.starts_with("5,oracle,") && line.ends_with(",44x2")));
}

#[test]
fn sample_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["sample", "2", "--count", "3", "--seed", "7"]);
    assert_eq!(stdout_of(&out), "2 1\n2 1\n2 1\n");

    let first = run_in(dir.path(), &["sample", "8", "--count", "5", "--seed", "11"]);
    let second = run_in(dir.path(), &["sample", "8", "--count", "5", "--seed", "11"]);
    assert_eq!(first.stdout, second.stdout);
    let other_seed = run_in(dir.path(), &["sample", "8", "--count", "5", "--seed", "12"]);
    assert_ne!(first.stdout, other_seed.stdout);

    // Only the two derangements of [3] can ever appear.
    let out = run_in(dir.path(), &["sample", "3", "--count", "100", "--seed", "9"]);
    for line in stdout_of(&out).lines() {
        assert!(line == "2 3 1" || line == "3 1 2", "unexpected draw {line}");
    }
}

#[test]
fn sample_draws_are_derangements() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["sample", "5", "--count", "20", "--seed", "1"]);
    for line in stdout_of(&out).lines() {
        let images: Vec<usize> = line.split(' ').map(|s| s.parse().unwrap()).collect();
        let mut seen = [false; 5];
        for (position, &image) in images.iter().enumerate() {
            assert_ne!(position + 1, image, "fixed point in {line}");
            seen[image - 1] = true;
        }
        assert!(seen.iter().all(|&s| s), "not a permutation: {line}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["compute", "40", "--format", "jsonl"] as &[&str],
        &["table", "12", "rencontres", "--format", "csv"],
        &["verify", "--n-max", "20", "--format", "jsonl"],
        &["sample", "6", "--count", "4", "--seed", "3"],
    ] {
        let first = run_in(dir.path(), args);
        let second = run_in(dir.path(), args);
        assert_eq!(exit_of(&first), 0);
        assert_eq!(first.stdout, second.stdout, "args: {args:?}");
    }
}

#[test]
fn cache_env_var_is_honored_and_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = dir.path().join("env.cache");
    let out = Command::new(env!("CARGO_BIN_EXE_rencontres"))
        .env_remove("RENCONTRES_HORIZON")
        .env("RENCONTRES_CACHE", &from_env)
        .current_dir(dir.path())
        .args(["compute", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(from_env.exists());
    assert!(!dir.path().join("rencontres.cache").exists());

    let from_flag = dir.path().join("flag.cache");
    let out = Command::new(env!("CARGO_BIN_EXE_rencontres"))
        .env_remove("RENCONTRES_HORIZON")
        .env("RENCONTRES_CACHE", dir.path().join("ignored.cache"))
        .current_dir(dir.path())
        .args(["compute", "10", "--cache", from_flag.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(from_flag.exists());
    assert!(!dir.path().join("ignored.cache").exists());
}

#[test]
fn horizon_env_var_is_honored_and_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let refused = Command::new(env!("CARGO_BIN_EXE_rencontres"))
        .env_remove("RENCONTRES_CACHE")
        .env("RENCONTRES_HORIZON", "5")
        .current_dir(dir.path())
        .args(["compute", "8", "--method", "oracle"])
        .output()
        .unwrap();
    assert_eq!(refused.status.code(), Some(3));

    let allowed = Command::new(env!("CARGO_BIN_EXE_rencontres"))
        .env_remove("RENCONTRES_CACHE")
        .env("RENCONTRES_HORIZON", "5")
        .current_dir(dir.path())
        .args(["compute", "8", "--method", "oracle", "--horizon", "8"])
        .output()
        .unwrap();
    assert_eq!(allowed.status.code(), Some(0));
    assert_eq!(String::from_utf8(allowed.stdout).unwrap(), "14833\n");
}

#[test]
fn cache_is_created_extended_and_left_alone() {
    let dir = tempfile::tempdir().unwrap();
    let cache_path = dir.path().join("rencontres.cache");
    assert!(!cache_path.exists());

    run_in(dir.path(), &["compute", "40"]);
    let after_create = std::fs::read_to_string(&cache_path).unwrap();
    assert!(after_create.starts_with("rencontres-kit-cache v1\nderangements 41\n"));

    // A smaller request touches nothing.
    run_in(dir.path(), &["table", "10"]);
    let after_smaller = std::fs::read_to_string(&cache_path).unwrap();
    assert_eq!(after_create, after_smaller);

    // A larger request extends in place; the old prefix survives verbatim.
    run_in(dir.path(), &["compute", "60"]);
    let after_larger = std::fs::read_to_string(&cache_path).unwrap();
    assert!(after_larger.starts_with("rencontres-kit-cache v1\nderangements 61\n"));
    let old_entries: Vec<&str> = after_create.lines().skip(2).collect();
    let new_entries: Vec<&str> = after_larger.lines().skip(2).collect();
    assert_eq!(&new_entries[..old_entries.len()], &old_entries[..]);
}
