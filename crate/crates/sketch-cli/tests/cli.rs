//! End-to-end tests of the `sketch` binary: command behavior, exit codes,
//! and seeded determinism, all against temp directories.

use sketch_core::json::{parse_json, JsonValue};
use sketch_core::schema::validate_lenient;
use sketch_core::tasks::{fixtures, Catalog};
use std::path::Path;
use std::process::{Command, Stdio};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sketch_in(dir: &Path, args: &[&str], stdin: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sketch"));
    cmd.args(args)
        .current_dir(dir)
        .env_remove("SKETCH_CI")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary spawns");
    if let Some(text) = stdin {
        use std::io::Write;
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    let output = child.wait_with_output().expect("binary runs");
    Run {
        code: output.status.code().expect("no signal"),
        stdout: String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    }
}

fn write(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

const SCRIPT_SINGLE: &str = r#"{"mode":"sequence","responses":["[{\"name\":\"Kamala Harris\",\"entity_type\":\"person\"}]"]}"#;

#[test]
fn schemas_list_names_the_full_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let run = sketch_in(dir.path(), &["schemas", "list"], None);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout.lines().count(), 13);
    assert!(run.stdout.contains("named_entity_recognition"));
    assert!(run.stdout.contains("information_extraction"));
}

#[test]
fn schemas_show_prints_required_fields_and_rejects_unknown_names() {
    let dir = tempfile::tempdir().unwrap();
    let run = sketch_in(dir.path(), &["schemas", "show", "ner"], None);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("required: taskDesc, entityTypes, outputFormat"));

    let run = sketch_in(dir.path(), &["schemas", "show", "bogus"], None);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("unknown task schema"));
}

#[test]
fn task_new_from_file_validates_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let from = write(dir.path(), "in.json", fixtures::EXAMPLE_NER_INSTANCE);
    let out = dir.path().join("out.task.json");
    let run = sketch_in(
        dir.path(),
        &[
            "task", "new", "--schema", "ner",
            "--from", from.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let instance = Catalog::builtin().load_instance(&out).unwrap();
    assert_eq!(instance.schema_name(), "named_entity_recognition");
}

#[test]
fn task_new_rejects_invalid_fields_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // topic classification without its required choiceType
    let from = write(
        dir.path(),
        "in.json",
        r#"{"taskDesc":"t","labelSet":[{"tag":"World"}],
            "outputFormat":{"type":"object","properties":{"tag":{"type":"string"}},"required":["tag"]}}"#,
    );
    let run = sketch_in(
        dir.path(),
        &[
            "task", "new", "--schema", "topic_classification",
            "--from", from.to_str().unwrap(),
            "--out", dir.path().join("o.json").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(run.code, 3, "{}", run.stderr);
    assert!(run.stderr.contains("choiceType"), "{}", run.stderr);
}

#[test]
fn wizard_collects_fields_revalidating_bad_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wizard.task.json");
    // second line is an invalid labelSet entry (not an array) and must be
    // re-asked; the rest complete the topic_classification form
    let stdin = concat!(
        "Classify the topic.\n",
        "{\"tag\":\"World\"}\n",
        "[{\"tag\":\"World\"},{\"tag\":\"Sports\"}]\n",
        "single\n",
        "{\"type\":\"object\",\"properties\":{\"tag\":{\"type\":\"string\",\"enum\":[\"World\",\"Sports\"]}},\"required\":[\"tag\"]}\n",
    );
    let run = sketch_in(
        dir.path(),
        &[
            "task", "new", "--schema", "topic_classification",
            "--out", out.to_str().unwrap(),
        ],
        Some(stdin),
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stderr.contains("try again"), "{}", run.stderr);
    let instance = Catalog::builtin().load_instance(&out).unwrap();
    assert_eq!(instance.task_desc(), "Classify the topic.");

    // premature end of input is an input error, not a validation error
    let run = sketch_in(
        dir.path(),
        &[
            "task", "new", "--schema", "topic_classification",
            "--out", out.to_str().unwrap(),
        ],
        Some("only the description\n"),
    );
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("input ended"));
}

#[test]
fn generate_scripted_free_prints_the_canonical_value() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(dir.path(), "ner.task.json", fixtures::LISTING_NER_INSTANCE);
    let script = write(dir.path(), "script.json", SCRIPT_SINGLE);
    let args = [
        "--backend", "scripted",
        "--script", script.to_str().unwrap(),
        "generate",
        "--task", task.to_str().unwrap(),
        "--input", fixtures::NER_SAMPLE_INPUT,
        "--free",
    ];
    let run = sketch_in(dir.path(), &args, None);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, format!("{}\n", fixtures::NER_SAMPLE_OUTPUT));

    // byte-identical on rerun
    let again = sketch_in(dir.path(), &args, None);
    assert_eq!(again.stdout, run.stdout);
}

#[test]
fn generate_strict_output_validates_and_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(dir.path(), "ner.task.json", fixtures::LISTING_NER_INSTANCE);
    let args = [
        "--seed", "11",
        "generate",
        "--task", task.to_str().unwrap(),
        "--input", "any text",
        "--strict",
        "--max-tokens", "4096",
    ];
    let run = sketch_in(dir.path(), &args, None);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let value = parse_json(run.stdout.trim()).expect("strict output is JSON");
    let instance = Catalog::builtin()
        .parse_instance(fixtures::LISTING_NER_INSTANCE)
        .unwrap();
    assert!(validate_lenient(&value, instance.output_format()).valid());

    let again = sketch_in(dir.path(), &args, None);
    assert_eq!(again.stdout, run.stdout);
}

#[test]
fn generate_empty_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(dir.path(), "ner.task.json", fixtures::LISTING_NER_INSTANCE);
    let run = sketch_in(
        dir.path(),
        &[
            "generate",
            "--task", task.to_str().unwrap(),
            "--input", "   ",
            "--strict",
        ],
        None,
    );
    assert_eq!(run.code, 2);
}

#[test]
fn generate_unsupported_keyword_in_strict_mode_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(
        dir.path(),
        "u.task.json",
        r#"{"schemaName":"named_entity_recognition","fields":{
            "taskDesc":"x","entityTypes":[{"name":"person"}],
            "outputFormat":{"type":"string","pattern":"^a"}}}"#,
    );
    let run = sketch_in(
        dir.path(),
        &[
            "generate",
            "--task", task.to_str().unwrap(),
            "--input", "hi",
            "--strict",
        ],
        None,
    );
    assert_eq!(run.code, 5, "{}", run.stderr);
}

#[test]
fn generate_format_failure_exits_4_with_raw_text_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(dir.path(), "ner.task.json", fixtures::LISTING_NER_INSTANCE);
    let script = write(
        dir.path(),
        "script.json",
        r#"{"mode":"keyed","pairs":[],"fallback":"I could not find any entities, sorry!"}"#,
    );
    let run = sketch_in(
        dir.path(),
        &[
            "--backend", "scripted",
            "--script", script.to_str().unwrap(),
            "generate",
            "--task", task.to_str().unwrap(),
            "--input", "hi",
            "--free",
            "--attempts", "2",
        ],
        None,
    );
    assert_eq!(run.code, 4, "{}", run.stderr);
    assert!(run.stderr.contains("I could not find any entities"));
}

#[test]
fn dataset_samples_writes_jsonl_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let args = [
        "--seed", "5",
        "dataset", "samples",
        "--schemas", "30",
        "--per-schema", "2",
        "--out", out.to_str().unwrap(),
    ];
    let run = sketch_in(dir.path(), &args, None);
    assert_eq!(run.code, 0, "{}", run.stderr);

    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 60);
    // every response validates against the schema embedded in its prompt
    for line in text.lines() {
        let sample = parse_json(line).unwrap();
        let prompt = sample.get("prompt").and_then(JsonValue::as_str).unwrap();
        let response = sample.get("response").and_then(JsonValue::as_str).unwrap();
        let mut lines = prompt.lines();
        lines.find(|l| *l == "Schema:").expect("prompt names its schema");
        let schema_line = lines.next().unwrap();
        let schema =
            sketch_core::schema::parse_schema(&parse_json(schema_line).unwrap()).unwrap();
        assert!(validate_lenient(&parse_json(response).unwrap(), &schema).valid());
    }

    let manifest_text = std::fs::read_to_string(dir.path().join("corpus.manifest.json")).unwrap();
    let manifest = parse_json(&manifest_text).unwrap();
    assert_eq!(
        manifest.get("samples").and_then(|v| v.as_number()).unwrap().as_i64(),
        Some(60)
    );
    assert_eq!(run.stdout.trim(), manifest_text);

    // rebuilds are byte-identical
    let rerun_dir = tempfile::tempdir().unwrap();
    let out2 = rerun_dir.path().join("corpus.jsonl");
    let args2 = [
        "--seed", "5",
        "dataset", "samples",
        "--schemas", "30",
        "--per-schema", "2",
        "--out", out2.to_str().unwrap(),
    ];
    sketch_in(rerun_dir.path(), &args2, None);
    assert_eq!(std::fs::read_to_string(&out2).unwrap(), text);
}

#[test]
fn dataset_mix_reports_the_ratio_in_lowest_terms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mixed.jsonl");
    let run = sketch_in(
        dir.path(),
        &[
            "--seed", "9",
            "dataset", "mix",
            "--task", "70",
            "--sf", "10",
            "--out", out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains(r#""ratio":"7:1""#), "{}", run.stdout);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 80);
}

#[test]
fn dataset_mix_with_an_undersized_pool_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(
        dir.path(),
        "tiny.jsonl",
        r#"{"prompt":"p","response":"1","kind":"task","schema_hash":"h"}"#,
    );
    let run = sketch_in(
        dir.path(),
        &[
            "--seed", "1",
            "dataset", "mix",
            "--task", "5",
            "--sf", "0",
            "--task-pool", pool.to_str().unwrap(),
            "--out", dir.path().join("m.jsonl").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(run.code, 3, "{}", run.stderr);
    assert!(run.stderr.contains("pool"), "{}", run.stderr);
}

#[test]
fn eval_scripted_gold_reaches_lor_one_and_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write(
        dir.path(),
        "eval.json",
        include_str!("../assets/eval_ner.json"),
    );
    let script = write(
        dir.path(),
        "script.json",
        include_str!("../assets/script_ner.json"),
    );
    let report = dir.path().join("report.json");
    let args = [
        "--backend", "scripted",
        "--script", script.to_str().unwrap(),
        "--seed", "3",
        "eval",
        "--dataset", dataset.to_str().unwrap(),
        "--mode", "free",
        "--report", report.to_str().unwrap(),
    ];
    let run = sketch_in(dir.path(), &args, None);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout.contains("ner_smoke  micro_f1_entities  3      3       3      1.000   1.000"),
        "{}",
        run.stdout
    );
    let report_doc = parse_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let datasets = report_doc.get("datasets").and_then(JsonValue::as_array).unwrap();
    assert_eq!(datasets.len(), 1);

    // byte-identical across reruns and across worker-pool sizes
    let rerun = sketch_in(dir.path(), &args, None);
    assert_eq!(rerun.stdout, run.stdout);
    let mut with_workers = args.to_vec();
    with_workers.extend_from_slice(&["--workers", "8"]);
    let eight = sketch_in(dir.path(), &with_workers, None);
    assert_eq!(eight.stdout, run.stdout);
}

#[test]
fn eval_strict_valid_counts_dominate_free_counts() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = write(
        dir.path(),
        "eval.json",
        include_str!("../assets/eval_ner.json"),
    );
    let valid_count = |mode: &str| {
        let report = dir.path().join(format!("report_{mode}.json"));
        let run = sketch_in(
            dir.path(),
            &[
                "--seed", "2",
                "eval",
                "--dataset", dataset.to_str().unwrap(),
                "--mode", mode,
                "--max-tokens", "16384",
                "--report", report.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(run.code, 0, "{}", run.stderr);
        let doc = parse_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
        doc.get("datasets").and_then(JsonValue::as_array).unwrap()[0]
            .get("valid")
            .and_then(|v| v.as_number())
            .and_then(|n| n.as_i64())
            .unwrap()
    };
    let strict = valid_count("strict");
    let free = valid_count("free");
    assert_eq!(strict, 3, "strict mode must keep every output legal");
    assert!(strict >= free, "strict {strict} < free {free}");
}

#[test]
fn http_backend_requires_a_base_url() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(dir.path(), "ner.task.json", fixtures::LISTING_NER_INSTANCE);
    let run = sketch_in(
        dir.path(),
        &[
            "--backend", "http",
            "generate",
            "--task", task.to_str().unwrap(),
            "--input", "hi",
        ],
        None,
    );
    assert_eq!(run.code, 2, "{}", run.stderr);
    assert!(run.stderr.contains("--base-url"), "{}", run.stderr);
}

#[test]
fn eval_missing_dataset_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let run = sketch_in(
        dir.path(),
        &["eval", "--dataset", "nope.json"],
        None,
    );
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("no such dataset file"));
}

#[test]
fn config_file_is_honored_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let task = write(dir.path(), "ner.task.json", fixtures::LISTING_NER_INSTANCE);
    write(dir.path(), "script.json", SCRIPT_SINGLE);
    write(
        dir.path(),
        "sketch.toml",
        "backend = \"scripted\"\nscript = \"script.json\"\nmode = \"free\"\nseed = 4\n",
    );
    // picked up from ./sketch.toml: scripted backend, free mode
    let run = sketch_in(
        dir.path(),
        &["generate", "--task", task.to_str().unwrap(), "--input", "x"],
        None,
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, format!("{}\n", fixtures::NER_SAMPLE_OUTPUT));

    // a flag beats the file: strict + the default mock backend
    let run = sketch_in(
        dir.path(),
        &[
            "--backend", "mock_uniform",
            "generate",
            "--task", task.to_str().unwrap(),
            "--input", "x",
            "--strict",
            "--max-tokens", "4096",
        ],
        None,
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(parse_json(run.stdout.trim()).is_ok());
}

#[test]
fn ci_mode_requires_an_explicit_seed_on_randomized_commands() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sketch"));
    let output = cmd
        .args(["dataset", "schemas", "--count", "1"])
        .current_dir(dir.path())
        .env("SKETCH_CI", "1")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sketch"));
    let output = cmd
        .args(["--seed", "1", "dataset", "schemas", "--count", "1"])
        .current_dir(dir.path())
        .env("SKETCH_CI", "1")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));

    // non-randomized commands stay exempt
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sketch"));
    let output = cmd
        .args(["schemas", "list"])
        .current_dir(dir.path())
        .env("SKETCH_CI", "1")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn schema_dir_overlays_the_builtin_catalog() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "haiku.json",
        r#"{
          "name": "haiku",
          "category": "text_generation",
          "spec": {
            "type": "object",
            "properties": {"taskDesc": {"type": "string"}, "outputFormat": {"type": "object"}},
            "required": ["taskDesc", "outputFormat"]
          }
        }"#,
    );
    let run = sketch_in(
        dir.path(),
        &["--schema-dir", ".", "schemas", "list"],
        None,
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout.lines().count(), 14);
    assert!(run.stdout.contains("haiku"));
}
