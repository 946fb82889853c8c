//! Run configuration files.

use std::fmt;
use std::marker::PhantomData;

use indexmap::IndexMap;
use qrunes::qir::Value;
use qrunes::simulator::RunConfig;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

/// Contents of a `--config` JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub entry: String,
    #[serde(deserialize_with = "unique_keys")]
    pub args: IndexMap<String, Value>,
    pub shots: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_qwhile_iters: Option<u64>,
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<RunConfigFile, String> {
        let cfg: RunConfigFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if cfg.shots == 0 {
            return Err("shots must be at least 1".into());
        }
        if cfg.max_qwhile_iters == Some(0) {
            return Err("max_qwhile_iters must be at least 1".into());
        }
        Ok(cfg)
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            shots: self.shots,
            seed: self.seed,
            max_qwhile_iters: self.max_qwhile_iters.unwrap_or(RunConfig::DEFAULT_MAX_QWHILE_ITERS),
        }
    }
}

fn unique_keys<'de, D>(d: D) -> Result<IndexMap<String, Value>, D::Error>
where
    D: Deserializer<'de>,
{
    struct Unique(PhantomData<Value>);

    impl<'de> Visitor<'de> for Unique {
        type Value = IndexMap<String, Value>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object of entry arguments")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
            let mut out = IndexMap::new();
            while let Some((k, v)) = map.next_entry::<String, Value>()? {
                if out.contains_key(&k) {
                    return Err(de::Error::custom(format!("argument '{k}' given twice")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }

    d.deserialize_map(Unique(PhantomData))
}
