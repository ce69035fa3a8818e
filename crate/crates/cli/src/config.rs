//! JSON config files whose keys mirror command-line flags. Flags given on
//! the command line win; config values fill the rest.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const GLOBAL_KEYS: &[&str] = &["format", "output"];

/// Keys whose flag takes JSON text; the config may give the JSON inline.
const JSON_KEYS: &[&str] = &["map", "element"];

pub fn load(path: &str) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect()),
        Ok(_) => Err(CliError::Config(format!("config {path} must be a JSON object"))),
        Err(e) => Err(CliError::Config(format!("config {path}: {e}"))),
    }
}

/// Fills unset fields of `args` from `config`. Keys unknown to `args` and
/// not in `other_keys` are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(args: &T, config: Option<&Map<String, Value>>, other_keys: &[&str]) -> Result<T, CliError> {
    let Some(config) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(args).expect("args serialize")).expect("args roundtrip"));
    };
    let Value::Object(mut fields) = serde_json::to_value(args).expect("args serialize") else {
        unreachable!("argument structs serialize to objects")
    };
    for (k, v) in config {
        match fields.get_mut(k) {
            Some(slot) if slot.is_null() => {
                *slot = if JSON_KEYS.contains(&k.as_str()) && !v.is_string() { Value::String(v.to_string()) } else { v.clone() };
            }
            Some(_) => {}
            None if other_keys.contains(&k.as_str()) || (other_keys.is_empty() && k != "config") => {}
            None => return Err(CliError::Config(format!("unknown config key `{k}`"))),
        }
    }
    serde_json::from_value(Value::Object(fields)).map_err(|e| CliError::Config(format!("config: {e}")))
}
