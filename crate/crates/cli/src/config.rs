use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use satake_core::apartment::default_q;
use satake_core::par::Exec;
use satake_core::rational::{parse_rat, Rat};

use crate::json::usage;
use crate::GlobalArgs;

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    root_system: Option<String>,
    tits_index: Option<PathBuf>,
    q: Option<String>,
    p: Option<i64>,
    n: Option<usize>,
    radius: Option<usize>,
    distance_cap: Option<usize>,
    steps: Option<usize>,
    out: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub root_system: Option<String>,
    pub tits_index: Option<PathBuf>,
    pub q: Rat,
    pub p: Option<i64>,
    pub n: Option<usize>,
    pub radius: Option<usize>,
    pub distance_cap: Option<usize>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub exec: Exec,
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let v = read_json(path)?;
                let mut f: ConfigFile =
                    serde_json::from_value(v).with_context(|| format!("bad config file {}", path.display()))?;
                // Paths inside the file are relative to it.
                let dir = path.parent().unwrap_or(Path::new("."));
                for p in [&mut f.tits_index, &mut f.out, &mut f.cache_dir].into_iter().flatten() {
                    if p.is_relative() {
                        *p = dir.join(&*p);
                    }
                }
                f
            }
            None => ConfigFile::default(),
        };
        let q = match args.q.as_ref().or(file.q.as_ref()) {
            Some(s) => parse_rat(s)?,
            None => default_q(),
        };
        if q <= Rat::from_integer(1.into()) {
            return Err(usage(format!("q must be greater than 1, got {}", satake_core::rational::fmt_rat(&q))));
        }
        let cfg = RunConfig {
            root_system: file.root_system,
            tits_index: file.tits_index,
            q,
            p: args.p.or(file.p),
            n: args.n.or(file.n),
            radius: args.radius.or(file.radius),
            distance_cap: file.distance_cap,
            steps: args.steps.or(file.steps),
            out: args.out.clone().or(file.out),
            cache_dir: args.cache_dir.clone().or(file.cache_dir),
            exec: if args.sequential { Exec::Sequential } else { Exec::default() },
        };
        if let Some(t) = &cfg.tits_index {
            if !t.exists() {
                return Err(usage(format!("tits index file {} does not exist", t.display())));
            }
        }
        if let Some(p) = cfg.p {
            if !satake_core::rational::is_prime(p) {
                return Err(usage(format!("p = {p} is not a prime")));
            }
        }
        if cfg.radius.is_some_and(|r| r > 8) {
            return Err(usage("radius above 8 is out of range"));
        }
        if cfg.steps.is_some_and(|s| s > 1000) {
            return Err(usage("steps above 1000 is out of range"));
        }
        Ok(cfg)
    }
}
