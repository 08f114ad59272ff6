//! Flat key=value config files mirroring the command-line flags. Flags given
//! on the command line take precedence over file values.

use crate::Common;
use anyhow::{bail, Context};
use std::collections::HashMap;
use std::path::Path;

pub type Map = HashMap<String, String>;

pub fn load(path: &Path) -> anyhow::Result<Map> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut map = Map::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value, got `{line}`", path.display(), lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad list item `{x}`")))
        .collect()
}

/// Fill unset fields of `common` from the config map.
pub fn merge(mut common: Common, file: &Map) -> anyhow::Result<Common> {
    if common.code.is_none() {
        common.code = file.get("code").cloned();
    }
    if common.size.is_empty() {
        if let Some(v) = file.get("size") {
            common.size = parse_list(v)?;
        }
    }
    if common.beta.is_empty() {
        if let Some(v) = file.get("beta") {
            common.beta = parse_list(v)?;
        }
    }
    if common.rate.is_empty() {
        if let Some(v) = file.get("rate") {
            common.rate = parse_list(v)?;
        }
    }
    macro_rules! scalar {
        ($field:ident, $key:literal) => {
            if common.$field.is_none() {
                if let Some(v) = file.get($key) {
                    common.$field = Some(v.parse().map_err(|_| {
                        anyhow::anyhow!(concat!("bad config value for ", $key, ": `{}`"), v)
                    })?);
                }
            }
        };
    }
    scalar!(samples, "samples");
    scalar!(seed, "seed");
    scalar!(workers, "workers");
    if common.mode.is_none() {
        common.mode = file.get("mode").cloned();
    }
    if common.format.is_none() {
        common.format = file.get("format").cloned();
    }
    if common.out.is_none() {
        common.out = file.get("out").map(Into::into);
    }
    Ok(common)
}
