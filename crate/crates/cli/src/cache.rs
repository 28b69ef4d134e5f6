//! On-disk BFS layer cache. Internal format, no stability promise.
//!
//! Each layer is a JSON file named by the sha256 of its bytes. A manifest
//! maps a key (ring, n, p and basepoint) to the hashes of layers 1, 2, ...
//! Layers do not depend on the radius, so a deeper run extends the entry
//! written by a shallower one.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use satake_core::building::{LatticeClass, LayerStore, QuadElt, Ring};

const FORMAT: u32 = 1;

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    format: u32,
    entries: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    n: usize,
    p: i64,
    depth: usize,
    vertices: Vec<Vec<Vec<String>>>,
}

pub struct DiskStore {
    dir: PathBuf,
    key: String,
    n: usize,
    p: i64,
}

pub fn key_for(starts: &[LatticeClass]) -> String {
    let first = &starts[0];
    let base: Vec<String> = starts.iter().map(|s| s.to_string()).collect();
    let digest = Sha256::digest(base.join("|").as_bytes());
    format!("ramified/n={}/p={}/base={}", first.n, first.p, &hex::encode(digest)[..16])
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

impl DiskStore {
    pub fn new(dir: &Path, starts: &[LatticeClass]) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir.join("layers"))?;
        Ok(DiskStore { dir: dir.to_path_buf(), key: key_for(starts), n: starts[0].n, p: starts[0].p })
    }

    fn manifest_path(&self) -> PathBuf {
        self.dir.join("manifest.json")
    }

    fn manifest(&self) -> Manifest {
        std::fs::read(self.manifest_path())
            .ok()
            .and_then(|b| serde_json::from_slice::<Manifest>(&b).ok())
            .filter(|m| m.format == FORMAT)
            .unwrap_or(Manifest { format: FORMAT, entries: BTreeMap::new() })
    }

    fn read_layer(&self, hash: &str, depth: usize) -> Option<Vec<LatticeClass>> {
        let bytes = std::fs::read(self.dir.join("layers").join(format!("{hash}.json"))).ok()?;
        if hex::encode(Sha256::digest(&bytes)) != hash {
            return None;
        }
        let file: LayerFile = serde_json::from_slice(&bytes).ok()?;
        if file.n != self.n || file.p != self.p || file.depth != depth {
            return None;
        }
        let mut out = Vec::with_capacity(file.vertices.len());
        for rows in file.vertices {
            let basis = rows
                .iter()
                .flatten()
                .map(|x| QuadElt::parse(x, self.p).ok())
                .collect::<Option<Vec<_>>>()?;
            let stored = LatticeClass { ring: Ring::Ramified, p: self.p, n: self.n, basis };
            // only trust entries that are already in canonical form
            if stored.lattice().class().ok()? != stored {
                return None;
            }
            out.push(stored);
        }
        Some(out)
    }
}

impl LayerStore for DiskStore {
    fn load(&self, depth: usize) -> Option<Vec<LatticeClass>> {
        let m = self.manifest();
        let hash = m.entries.get(&self.key)?.get(depth - 1)?;
        self.read_layer(hash, depth)
    }

    fn store(&self, depth: usize, layer: &[LatticeClass]) {
        let file = LayerFile {
            n: self.n,
            p: self.p,
            depth,
            vertices: layer
                .iter()
                .map(|v| v.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
                .collect(),
        };
        let bytes = serde_json::to_vec(&file).expect("layer serializes");
        let hash = hex::encode(Sha256::digest(&bytes));
        let res = write_atomic(&self.dir.join("layers").join(format!("{hash}.json")), &bytes).and_then(|_| {
            let mut m = self.manifest();
            let entry = m.entries.entry(self.key.clone()).or_default();
            // a layer is only useful if every shallower one is recorded
            if entry.len() + 1 < depth {
                return Ok(());
            }
            entry.truncate(depth - 1);
            entry.push(hash);
            write_atomic(&self.manifest_path(), &serde_json::to_vec_pretty(&m).expect("manifest serializes"))
        });
        if let Err(e) = res {
            eprintln!("warning: cache write failed in {}: {e}", self.dir.display());
        }
    }
}
