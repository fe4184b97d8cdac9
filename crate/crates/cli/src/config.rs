//! JSON configuration loading with dotted-path overrides.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Recursively overlays `top` onto `base`. Objects merge key by key unless
/// both carry different `kind` tags, in which case `top` replaces `base`.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) if same_kind(b, &t) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, t) => *slot = t,
    }
}

fn same_kind(a: &Map<String, Value>, b: &Map<String, Value>) -> bool {
    match (a.get("kind"), b.get("kind")) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

/// Parses `key.path=value`. The value is read as JSON when possible and as a
/// plain string otherwise.
pub fn parse_override(spec: &str) -> Result<(Vec<String>, Value)> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!("override {spec:?} is not of the form key=value");
    };
    let path: Vec<String> = key.split('.').map(str::to_string).collect();
    if path.iter().any(String::is_empty) {
        bail!("override key {key:?} has an empty segment");
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((path, value))
}

/// Sets `path` inside `root`, creating intermediate objects.
pub fn set_path(root: &mut Value, path: &[String], value: Value) -> Result<()> {
    let mut node = root;
    for (i, key) in path.iter().enumerate() {
        let Value::Object(map) = node else {
            bail!("cannot set {:?}: {:?} is not an object", path.join("."), path[..i].join("."));
        };
        if i + 1 == path.len() {
            map.insert(key.clone(), value);
            return Ok(());
        }
        node = map.entry(key.clone()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("override paths are non-empty")
}

/// Default config, overlaid with the file at `path`, then `overrides`, then
/// the seed. Unknown keys are rejected by the target type.
pub fn load<T: Serialize + DeserializeOwned>(
    defaults: &T,
    path: Option<&Path>,
    overrides: &[String],
    seed: Option<(&[&str], u64)>,
) -> Result<T> {
    let mut value = serde_json::to_value(defaults)?;
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
        let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?;
        if !file.is_object() {
            bail!("config {} must hold a JSON object", p.display());
        }
        merge(&mut value, file);
    }
    for o in overrides {
        let (path, v) = parse_override(o)?;
        let mut patch = Value::Object(Map::new());
        set_path(&mut patch, &path, v)?;
        merge(&mut value, patch);
    }
    if let Some((path, s)) = seed {
        let path: Vec<String> = path.iter().map(|p| p.to_string()).collect();
        set_path(&mut value, &path, Value::from(s))?;
    }
    serde_json::from_value(value).map_err(|e| anyhow::Error::new(ConfigError(e.to_string())))
}

/// A configuration that fails to deserialize.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;
    use serde_json::json;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Cfg {
        seed: u64,
        inner: Inner,
    }

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Inner {
        name: String,
        size: usize,
    }

    fn defaults() -> Cfg {
        Cfg { seed: 1, inner: Inner { name: "a".into(), size: 3 } }
    }

    #[test]
    fn overrides_win_and_seed_is_last() {
        let c: Cfg = load(&defaults(), None, &["inner.size=9".into(), "inner.name=bob".into(), "seed=4".into()], Some((&["seed"], 7))).unwrap();
        assert_eq!(c, Cfg { seed: 7, inner: Inner { name: "bob".into(), size: 9 } });
    }

    #[test]
    fn file_merges_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"inner":{"size":5}}"#).unwrap();
        let c: Cfg = load(&defaults(), Some(&p), &[], None).unwrap();
        assert_eq!(c.inner, Inner { name: "a".into(), size: 5 });
        std::fs::write(&p, r#"{"inner":{"colour":5}}"#).unwrap();
        let err = load(&defaults(), Some(&p), &[], None).unwrap_err();
        assert!(err.downcast_ref::<ConfigError>().is_some());
    }

    #[test]
    fn tagged_objects_replace() {
        let mut base = json!({"model": {"kind": "km", "step": 0.05}});
        merge(&mut base, json!({"model": {"kind": "fca", "kappa": 5}}));
        assert_eq!(base, json!({"model": {"kind": "fca", "kappa": 5}}));
        let mut same = json!({"model": {"kind": "km", "step": 0.05}});
        merge(&mut same, json!({"model": {"kind": "km", "coupling": 2.0}}));
        assert_eq!(same, json!({"model": {"kind": "km", "step": 0.05, "coupling": 2.0}}));
    }

    #[test]
    fn override_parsing() {
        assert_eq!(parse_override("a.b=[1,2]").unwrap(), (vec!["a".into(), "b".into()], json!([1, 2])));
        assert_eq!(parse_override("a=hello").unwrap().1, json!("hello"));
        assert!(parse_override("novalue").is_err());
        assert!(parse_override("a..b=1").is_err());
        let mut v = json!({"a": 1});
        assert!(set_path(&mut v, &["a".into(), "b".into()], json!(2)).is_err());
    }
}
