//! Scan configuration: flag parsing, config-file merging, validation.

use anyhow::{anyhow, bail, Result};
use std::path::{Path, PathBuf};

/// Inclusive `min:max:steps` range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("range must have the form min:max:steps, got {text:?}");
        }
        let min: f64 = parts[0]
            .parse()
            .map_err(|_| anyhow!("bad range minimum {:?}", parts[0]))?;
        let max: f64 = parts[1]
            .parse()
            .map_err(|_| anyhow!("bad range maximum {:?}", parts[1]))?;
        let steps: usize = parts[2]
            .parse()
            .map_err(|_| anyhow!("bad range step count {:?}", parts[2]))?;
        if steps == 0 {
            bail!("range step count must be at least 1");
        }
        if steps == 1 && min != max {
            bail!("a single-step range requires min == max, got {text:?}");
        }
        if max < min {
            bail!("range maximum {max} is below minimum {min}");
        }
        Ok(Self { min, max, steps })
    }

    /// Endpoint-inclusive grid; `steps == 1` yields just the minimum.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub model: String,
    pub m: Range,
    pub t: Range,
    pub bz: usize,
    pub out: PathBuf,
    pub json: Option<PathBuf>,
    pub svg: Option<String>,
    pub emit_chern: bool,
    pub emit_convergence_pair: bool,
    pub seed: u64,
}

/// Raw option bag prior to validation; flags override file entries.
#[derive(Clone, Debug, Default)]
pub struct PartialConfig {
    pub model: Option<String>,
    pub m: Option<String>,
    pub t: Option<String>,
    pub bz: Option<usize>,
    pub out: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<String>,
    pub emit_chern: Option<bool>,
    pub emit_convergence_pair: Option<bool>,
    pub seed: Option<u64>,
}

impl PartialConfig {
    fn merge_under(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            model: self.model.or(base.model),
            m: self.m.or(base.m),
            t: self.t.or(base.t),
            bz: self.bz.or(base.bz),
            out: self.out.or(base.out),
            json: self.json.or(base.json),
            svg: self.svg.or(base.svg),
            emit_chern: self.emit_chern.or(base.emit_chern),
            emit_convergence_pair: self.emit_convergence_pair.or(base.emit_convergence_pair),
            seed: self.seed.or(base.seed),
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => bail!("key {key}: expected a boolean, got {value:?}"),
    }
}

/// `key = value` lines; `#` starts a comment; unknown keys are rejected by
/// name.
pub fn parse_config_file(path: &Path) -> Result<PartialConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("cannot read config file {}: {e}", path.display()))?;
    let mut cfg = PartialConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {} is not key = value: {raw:?}", lineno + 1);
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "model" => cfg.model = Some(value.to_string()),
            "m" => cfg.m = Some(value.to_string()),
            "t" => cfg.t = Some(value.to_string()),
            "bz" => {
                cfg.bz = Some(
                    value
                        .parse()
                        .map_err(|_| anyhow!("key bz: expected an integer, got {value:?}"))?,
                )
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            "json" => cfg.json = Some(PathBuf::from(value)),
            "svg" => cfg.svg = Some(value.to_string()),
            "emit_chern" => cfg.emit_chern = Some(parse_bool(key, value)?),
            "emit_convergence_pair" => cfg.emit_convergence_pair = Some(parse_bool(key, value)?),
            "seed" => {
                cfg.seed = Some(
                    value
                        .parse()
                        .map_err(|_| anyhow!("key seed: expected an integer, got {value:?}"))?,
                )
            }
            other => bail!("unknown config key {other:?}"),
        }
    }
    Ok(cfg)
}

/// Merge flags over an optional config file and validate the result.
pub fn resolve(flags: PartialConfig, config_file: Option<&Path>) -> Result<ScanConfig> {
    let merged = match config_file {
        Some(path) => flags.merge_under(parse_config_file(path)?),
        None => flags,
    };
    let model = merged.model.ok_or_else(|| anyhow!("missing model name (--model)"))?;
    if interfgeo::bandmodels::by_name(&model).is_none() {
        bail!("unknown model {model:?} (built-ins: dirac)");
    }
    let m = Range::parse(&merged.m.ok_or_else(|| anyhow!("missing M range (--m)"))?)?;
    let t = Range::parse(&merged.t.ok_or_else(|| anyhow!("missing T range (--t)"))?)?;
    if t.min <= 0.0 {
        bail!("temperatures must be positive, got minimum {}", t.min);
    }
    let bz = merged.bz.ok_or_else(|| anyhow!("missing BZ grid size (--bz)"))?;
    if bz % 2 == 0 {
        bail!("bz_grid must be odd");
    }
    if bz < 3 {
        bail!("bz_grid must be at least 3");
    }
    let out = merged.out.ok_or_else(|| anyhow!("missing output path (--out)"))?;
    Ok(ScanConfig {
        model,
        m,
        t,
        bz,
        out,
        json: merged.json,
        svg: merged.svg,
        emit_chern: merged.emit_chern.unwrap_or(false),
        emit_convergence_pair: merged.emit_convergence_pair.unwrap_or(false),
        seed: merged.seed.unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r = Range::parse("-1:1:41").unwrap();
        assert_eq!(r, Range { min: -1.0, max: 1.0, steps: 41 });
        let vals = r.values();
        assert_eq!(vals.len(), 41);
        assert_eq!(vals[0], -1.0);
        assert_eq!(vals[40], 1.0);
        assert!(vals[20].abs() < 1e-15, "odd step count puts 0 on-grid");

        assert_eq!(Range::parse("0.5:0.5:1").unwrap().values(), vec![0.5]);
        assert!(Range::parse("1:2").is_err());
        assert!(Range::parse("2:1:5").is_err());
        assert!(Range::parse("1:2:0").is_err());
        assert!(Range::parse("0.3:0.4:1").is_err());
    }

    #[test]
    fn unknown_config_key_is_named() {
        let dir = std::env::temp_dir().join("interfgeo-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        std::fs::write(&path, "model = dirac\nbogus_key = 7\n").unwrap();
        let err = parse_config_file(&path).unwrap_err().to_string();
        assert!(err.contains("bogus_key"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join("interfgeo-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("base.cfg");
        std::fs::write(
            &path,
            "model = dirac\nm = -1:1:5\nt = 0.1:1.0:10\nbz = 51\nout = base.csv\n",
        )
        .unwrap();
        let flags = PartialConfig {
            t: Some("0.5:0.5:1".to_string()),
            ..Default::default()
        };
        let cfg = resolve(flags, Some(&path)).unwrap();
        assert_eq!(cfg.t.values(), vec![0.5]);
        assert_eq!(cfg.m.steps, 5);
        assert_eq!(cfg.bz, 51);
    }

    #[test]
    fn even_bz_is_rejected() {
        let flags = PartialConfig {
            model: Some("dirac".into()),
            m: Some("0:1:2".into()),
            t: Some("0.5:0.5:1".into()),
            bz: Some(200),
            out: Some("x.csv".into()),
            ..Default::default()
        };
        let err = resolve(flags, None).unwrap_err().to_string();
        assert!(err.contains("bz_grid must be odd"), "{err}");
    }
}
