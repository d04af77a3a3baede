//! Scenario configuration: an INI file with `[paths]`, `[sim]`, `[opt]`,
//! `[eval]` and `[output]` sections, plus `--key value` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::CliError;

const SECTIONS: [&str; 5] = ["paths", "sim", "opt", "eval", "output"];

/// Keys accepted in each section.
const KEYS: &[(&str, &[&str])] = &[
    (
        "paths",
        &[
            "ontology",
            "documents",
            "replay",
            "gazetteer",
            "boundary",
            "hurdat2",
            "layout",
            "reference_layout",
            "graph",
            "rules",
            "annotations",
            "extracted",
            "ground_truth",
        ],
    ),
    (
        "sim",
        &[
            "storm_id",
            "start",
            "end",
            "hub_height",
            "ref_height",
            "cutout",
            "holland_b",
            "rmax_km",
            "shear_alpha",
            "proximity_km",
            "timestep_min",
            "hysteresis",
            "cyclonic_offset",
        ],
    ),
    (
        "opt",
        &[
            "turbines",
            "rows",
            "iterations",
            "learning_rate",
            "learning_rate_final",
            "spacing_min",
            "spacing_weight",
            "boundary_weight",
            "seed",
            "sectors_per_iteration",
            "fd_step",
            "eval_every",
            "weibull_k",
            "weibull_a",
        ],
    ),
    ("eval", &["threshold", "document"]),
    ("output", &["dir"]),
];

/// Flattened `section.key -> value` map with paths resolved against the config directory.
#[derive(Debug, Clone, Default)]
pub struct ScenarioConfig {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

fn section_of(key: &str) -> Result<&'static str, CliError> {
    let hits: Vec<&'static str> =
        KEYS.iter().filter(|(_, keys)| keys.contains(&key)).map(|(s, _)| *s).collect();
    match hits.as_slice() {
        [one] => Ok(one),
        [] => Err(CliError::Usage(format!("unknown config key `{key}`"))),
        _ => Err(CliError::Usage(format!("ambiguous key `{key}`; qualify it as section.key"))),
    }
}

fn qualify(key: &str) -> Result<String, CliError> {
    match key.split_once('.') {
        Some((section, name)) => {
            let known = KEYS.iter().any(|(s, keys)| *s == section && keys.contains(&name));
            if known {
                Ok(key.to_string())
            } else {
                Err(CliError::Usage(format!("unknown config key `{key}`")))
            }
        }
        None => Ok(format!("{}.{key}", section_of(key)?)),
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let ini = Ini::load_from_file(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if props.iter().next().is_some() {
                    return Err(CliError::Usage("keys must appear under a section header".into()));
                }
                continue;
            };
            if !SECTIONS.contains(&section) {
                return Err(CliError::Usage(format!("unknown section [{section}]")));
            }
            for (k, v) in props.iter() {
                values.insert(qualify(&format!("{section}.{k}"))?, v.to_string());
            }
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(ScenarioConfig { values, base })
    }

    /// Config rooted at `base` with no keys set.
    pub fn empty(base: &Path) -> Self {
        ScenarioConfig { values: BTreeMap::new(), base: base.to_path_buf() }
    }

    /// Apply `--key value` pairs; keys may be bare or `section.key`.
    pub fn apply_overrides(&mut self, args: &[String]) -> Result<(), CliError> {
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            let key = flag
                .strip_prefix("--")
                .ok_or_else(|| CliError::Usage(format!("expected --key, found `{flag}`")))?;
            let value = it.next().ok_or_else(|| CliError::Usage(format!("missing value for `{flag}`")))?;
            // command-line paths are relative to the working directory
            let value = if key.starts_with("paths.") || KEYS[0].1.contains(&key) {
                std::path::absolute(value).map_err(|e| CliError::Usage(e.to_string()))?.display().to_string()
            } else {
                value.clone()
            };
            self.values.insert(qualify(key)?, value);
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        self.values.insert(qualify(key)?, value.into());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("`{key}` = `{v}` has the wrong type"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|v| self.base.join(v))
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.path(key).ok_or_else(|| CliError::Usage(format!("missing required setting `{key}`")))
    }

    /// Every configured input path must exist.
    pub fn check_paths(&self) -> Result<(), CliError> {
        for (key, _) in self.values.range("paths.".to_string().."paths/".to_string()) {
            let p = self.path(key).expect("key present");
            if !p.exists() {
                return Err(CliError::Usage(format!("`{key}` points to missing {}", p.display())));
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.path("output.dir").unwrap_or_else(|| self.base.join("out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.ini");
        std::fs::write(&path, "[sim]\ncutout = 25\n[opt]\nseed = 7\n").unwrap();
        let mut c = ScenarioConfig::load(&path).unwrap();
        assert_eq!(c.get::<f64>("sim.cutout").unwrap(), Some(25.0));
        c.apply_overrides(&["--cutout".into(), "30".into(), "--opt.seed".into(), "9".into()]).unwrap();
        assert_eq!(c.get::<f64>("sim.cutout").unwrap(), Some(30.0));
        assert_eq!(c.get::<u64>("opt.seed").unwrap(), Some(9));
        assert!(c.apply_overrides(&["--nope".into(), "1".into()]).is_err());
        assert!(c.apply_overrides(&["--cutout".into()]).is_err());
        c.set("sim.cutout", "abc").unwrap();
        assert!(c.get::<f64>("sim.cutout").is_err());
    }

    #[test]
    fn rejects_unknown_sections_and_missing_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.ini");
        std::fs::write(&path, "[weird]\na = 1\n").unwrap();
        assert!(ScenarioConfig::load(&path).is_err());
        std::fs::write(&path, "[paths]\nboundary = missing.wkt\n").unwrap();
        let c = ScenarioConfig::load(&path).unwrap();
        assert!(c.check_paths().is_err());
        assert_eq!(c.path("paths.boundary").unwrap(), dir.path().join("missing.wkt"));
    }
}
