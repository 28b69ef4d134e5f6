//! The 1-skeleton of the building: neighbours, breadth-first layers and
//! graph distances.

use std::collections::HashSet;

use super::lattice::{hermite, LatticeClass, Ring};
use super::quad::QuadElt;
use crate::error::{config, Result};
use crate::par::{self, Exec};

/// Proper nonzero subspaces of `F_p^n`, each as a list of reduced row
/// echelon basis vectors with entries in `0..p`.
pub fn subspaces(n: usize, p: i64) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for dim in 1..n {
        for pivots in super::lattice::subsets(n, dim) {
            // free slots: row r, column c > pivots[r], c not a pivot
            let free: Vec<(usize, usize)> = (0..dim)
                .flat_map(|r| (pivots[r] + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
                .collect();
            let total = (p as u64).pow(free.len() as u32);
            for mut code in 0..total {
                let mut rows = vec![vec![0i64; n]; dim];
                for (r, &c) in pivots.iter().enumerate() {
                    rows[r][c] = 1;
                }
                for &(r, c) in &free {
                    rows[r][c] = (code % p as u64) as i64;
                    code /= p as u64;
                }
                out.push(rows);
            }
        }
    }
    out
}

/// Number of `d`-dimensional subspaces of `F_p^n`.
pub fn gaussian_binomial(n: u32, d: u32, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..d {
        num *= p.pow(n - i) - 1;
        den *= p.pow(i + 1) - 1;
    }
    num / den
}

pub fn check_rank(n: usize) -> Result<()> {
    if !(2..=3).contains(&n) {
        return Err(config!("building rank n = {n} unsupported (n must be 2 or 3)"));
    }
    Ok(())
}

/// All classes `M'` with `pi M < M' < M`, one per proper nonzero subspace of
/// `M / pi M`.
pub fn neighbors(v: &LatticeClass) -> Result<Vec<LatticeClass>> {
    check_rank(v.n)?;
    let (n, p, ring) = (v.n, v.p, v.ring);
    let cols = v.lattice().columns();
    let pi = ring.uniformizer_pow(p, 1);
    let scaled: Vec<Vec<QuadElt>> = cols.iter().map(|c| c.iter().map(|x| x * &pi).collect()).collect();
    let mut out = Vec::new();
    for sub in subspaces(n, p) {
        let mut gens = scaled.clone();
        for s in &sub {
            let mut g = vec![QuadElt::zero(p); n];
            for (j, &sj) in s.iter().enumerate() {
                if sj != 0 {
                    let c = QuadElt::from_int(sj, p);
                    for (gi, x) in g.iter_mut().zip(&cols[j]) {
                        *gi = &*gi + &(&c * x);
                    }
                }
            }
            gens.push(g);
        }
        out.push(hermite(ring, p, n, gens)?.class);
    }
    Ok(out)
}

/// Cache hook for breadth-first layers.
pub trait LayerStore {
    fn load(&self, depth: usize) -> Option<Vec<LatticeClass>>;
    fn store(&self, depth: usize, layer: &[LatticeClass]);
}

/// Stores nothing.
pub struct NoStore;

impl LayerStore for NoStore {
    fn load(&self, _: usize) -> Option<Vec<LatticeClass>> {
        None
    }
    fn store(&self, _: usize, _: &[LatticeClass]) {}
}

/// Breadth-first layers around `starts`: `layers[d]` holds the vertices at
/// distance exactly `d`, sorted.
pub fn bfs_layers(starts: &[LatticeClass], radius: usize, exec: Exec) -> Result<Vec<Vec<LatticeClass>>> {
    bfs_layers_cached(starts, radius, exec, &NoStore)
}

pub fn bfs_layers_cached(
    starts: &[LatticeClass],
    radius: usize,
    exec: Exec,
    store: &dyn LayerStore,
) -> Result<Vec<Vec<LatticeClass>>> {
    let mut first = starts.to_vec();
    first.sort();
    first.dedup();
    let mut visited: HashSet<LatticeClass> = first.iter().cloned().collect();
    let mut layers = vec![first];
    for depth in 1..=radius {
        let layer = match store.load(depth) {
            Some(l) => l,
            None => {
                let frontier = &layers[depth - 1];
                let found = par::map(exec, frontier, neighbors);
                let mut next: Vec<LatticeClass> = Vec::new();
                for nb in found {
                    next.extend(nb?.into_iter().filter(|c| !visited.contains(c)));
                }
                next.sort();
                next.dedup();
                store.store(depth, &next);
                next
            }
        };
        visited.extend(layer.iter().cloned());
        layers.push(layer);
    }
    Ok(layers)
}

/// BFS distance, or `None` when it exceeds `cap`.
pub fn graph_distance(v1: &LatticeClass, v2: &LatticeClass, cap: usize, exec: Exec) -> Result<Option<usize>> {
    distance_to(v1, |v| v == v2, cap, exec)
}

/// Distance from `v` to the nearest vertex satisfying `target`.
pub fn distance_to<F>(v: &LatticeClass, target: F, cap: usize, exec: Exec) -> Result<Option<usize>>
where
    F: Fn(&LatticeClass) -> bool + Sync + Send,
{
    let mut visited: HashSet<LatticeClass> = HashSet::from([v.clone()]);
    let mut frontier = vec![v.clone()];
    for depth in 0..=cap {
        let hits = par::map(exec, &frontier, |c| target(c));
        if hits.into_iter().any(|h| h) {
            return Ok(Some(depth));
        }
        if depth == cap {
            break;
        }
        let found = par::map(exec, &frontier, neighbors);
        let mut next = Vec::new();
        for nb in found {
            for c in nb? {
                if visited.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        next.sort();
        frontier = next;
    }
    Ok(None)
}

/// The vertices of the standard chamber: `[O^n]`, `[O..O pi]`, ...,
/// `[O pi..pi]`.
pub fn standard_chamber(ring: Ring, p: i64, n: usize) -> Vec<LatticeClass> {
    (0..n)
        .map(|k| {
            let d: Vec<i64> = (0..n).map(|i| i64::from(i >= n - k)).collect();
            super::lattice::Lattice::diagonal(ring, p, &d).class().expect("diagonal")
        })
        .collect()
}
