//! The published schema files match the types. Regenerate with
//! `BERMUDAN_WRITE_SCHEMA=1 cargo test --test schema`.

use std::path::PathBuf;

use bermudan_snell::{ExperimentConfig, RunReport};
use schemars::schema_for;

fn check(file: &str, schema: schemars::schema::RootSchema) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(file);
    let text = serde_json::to_string_pretty(&schema).unwrap() + "\n";
    if std::env::var_os("BERMUDAN_WRITE_SCHEMA").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    let published = std::fs::read_to_string(&path).unwrap_or_default();
    assert!(
        published == text,
        "{} is stale; regenerate it",
        path.display()
    );
}

#[test]
fn config_schema_is_current() {
    check("config.schema.json", schema_for!(ExperimentConfig));
}

#[test]
fn report_schema_is_current() {
    check("report.schema.json", schema_for!(RunReport));
}

#[test]
fn shipped_configs_use_only_schema_keys() {
    let schema = serde_json::to_value(schema_for!(ExperimentConfig)).unwrap();
    let top: Vec<&String> = schema["properties"].as_object().unwrap().keys().collect();
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for key in value.as_object().unwrap().keys() {
            assert!(top.contains(&key), "{}: {key}", path.display());
        }
        ExperimentConfig::load(&path).unwrap();
    }
}
