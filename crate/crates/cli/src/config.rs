//! Config-file overlay and process exit codes.

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use strobe_core::StrobeError;

/// Environment variable fixing the size of the worker pool.
pub const WORKERS_ENV: &str = "STROBE_WORKERS";

pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_RESOURCE_CAP: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Raised when a check ran to completion and did not pass.
#[derive(Debug)]
pub struct CertificationFailure(pub String);

impl fmt::Display for CertificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certification failed: {}", self.0)
    }
}

impl std::error::Error for CertificationFailure {}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<CertificationFailure>().is_some() {
        return EXIT_CERTIFICATION;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<StrobeError>() {
            return match e {
                StrobeError::DenseCap { .. } | StrobeError::EnumerationCap { .. } | StrobeError::RegisterTooLarge(_) => {
                    EXIT_RESOURCE_CAP
                }
                StrobeError::PurgeCertification(_) | StrobeError::BranchCut | StrobeError::NoiseFloor => EXIT_CERTIFICATION,
                _ => EXIT_INPUT,
            };
        }
    }
    EXIT_INPUT
}

/// Replace every flag named in the config object with the file's value.
pub fn overlay<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Value>) -> anyhow::Result<T> {
    let Some(cfg) = config else { return Ok(flags) };
    let cfg = cfg.as_object().ok_or_else(|| anyhow!("config file must hold a JSON object"))?;
    let mut v = serde_json::to_value(flags)?;
    let obj = v.as_object_mut().expect("flag structs serialize to objects");
    for (k, val) in cfg {
        let key = k.replace('-', "_");
        if !obj.contains_key(&key) {
            return Err(anyhow!("unknown config key `{k}`"));
        }
        obj.insert(key, val.clone());
    }
    serde_json::from_value(v).context("config value has the wrong type")
}

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json(path: &Path, v: &Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn init_workers() -> anyhow::Result<()> {
    if let Ok(s) = std::env::var(WORKERS_ENV) {
        let n: usize = s.trim().parse().map_err(|_| anyhow!("{WORKERS_ENV} must be a positive integer, got `{s}`"))?;
        if n == 0 {
            return Err(anyhow!("{WORKERS_ENV} must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// `"1,2"` → `[1, 2]`.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow!("bad {what} `{s}`")))
        .collect()
}
