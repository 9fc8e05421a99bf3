use std::fs;
use std::path::{Path, PathBuf};

use esspec::fixtures;
use esspec::interval_maps::{MapDefinition, PiecewiseMap};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] esspec::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
        }
    }

    /// 2 config, 3 resource cap, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(esspec::Error::Resource(_)) => 3,
            CliError::Core(
                esspec::Error::Numeric(_) | esspec::Error::Probe { .. } | esspec::Error::Classification(_),
            ) => 4,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code()}})
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Drops `null` members so that unset flags do not mask config values.
fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        other => other,
    }
}

/// Overlays explicit flags on the `--config` file (flags win).
pub fn merge_config<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let mut base = match config {
        Some(p) => {
            let text = read_text(p)?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(CliError::Config("the config file must hold a JSON object".into())),
                Err(e) => return Err(CliError::Config(format!("{}: {e}", p.display()))),
            }
        }
        None => Map::new(),
    };
    let flags = strip_nulls(serde_json::to_value(flags).expect("flags serialize"));
    if let Value::Object(m) = flags {
        base.extend(m);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::Config(e.to_string()))
}

/// A map given as a file path or as a bundled name (`d2`, `d2.json`, ...).
pub fn load_map(source: &str) -> CliResult<(PiecewiseMap, MapDefinition)> {
    let path = PathBuf::from(source);
    let text = if path.is_file() {
        read_text(&path)?
    } else {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(source);
        fixtures::json_by_name(stem)
            .ok_or_else(|| CliError::Config(format!("map {source:?} is neither a file nor a bundled map")))?
            .to_string()
    };
    let def = MapDefinition::from_json(&text)?;
    Ok((def.build()?, def))
}

/// Header block embedded in every output.
pub fn header(command: &str, config: &Value) -> Value {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
    json!({
        "tool": "esspec",
        "version": VERSION,
        "command": command,
        "config": config,
        "config_sha256": hash,
    })
}

pub enum Body {
    Json(Value),
    Csv(String),
}

/// A rendered output: header plus body.
pub fn render(command: &str, config: &Value, body: &Body) -> String {
    let head = header(command, config);
    match body {
        Body::Json(v) => {
            let mut s = serde_json::to_string_pretty(&json!({"header": head, "result": v})).expect("serializable");
            s.push('\n');
            s
        }
        Body::Csv(csv) => format!("# {}\n{csv}", serde_json::to_string(&head).expect("serializable")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Default)]
    struct Opts {
        a: Option<u32>,
        b: Option<String>,
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"a": 1, "b": "x"}"#).unwrap();
        let flags = Opts { a: Some(5), b: None };
        let m = merge_config(&flags, Some(&p)).unwrap();
        assert_eq!((m.a, m.b.as_deref()), (Some(5), Some("x")));
        fs::write(&p, "[1]").unwrap();
        assert!(merge_config(&flags, Some(&p)).is_err());
    }

    #[test]
    fn header_hash_is_stable() {
        let c = json!({"k": 1, "a": [1, 2]});
        assert_eq!(header("x", &c), header("x", &c));
        assert_ne!(header("x", &c)["config_sha256"], header("x", &json!({"k": 2}))["config_sha256"]);
    }

    #[test]
    fn bundled_maps_resolve() {
        assert!(load_map("d2").is_ok());
        assert!(load_map("no/such/l3.json").is_ok());
        assert!(matches!(load_map("nope"), Err(CliError::Config(_))));
    }
}
