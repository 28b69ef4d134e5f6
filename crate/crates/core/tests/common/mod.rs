#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use satake_core::building::{neighbors, Lattice, LatticeClass, QuadElt, Ring};
use satake_core::linalg::RatMatrix;
use satake_core::rational::{rat, Rat};

/// Plain BFS distances from `v` up to `radius`, independent of the
/// library's layered search.
pub fn bfs_distances(v: &LatticeClass, radius: usize) -> HashMap<LatticeClass, usize> {
    let mut dist = HashMap::from([(v.clone(), 0usize)]);
    let mut queue = VecDeque::from([v.clone()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d == radius {
            continue;
        }
        for w in neighbors(&u).unwrap() {
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Minimal enclosing ball by trying every subset of at most `dim + 1`
/// points as the boundary.
pub fn brute_force_center(points: &[Vec<Rat>], metric: &RatMatrix) -> Vec<Rat> {
    let n = points.len();
    let dim = metric.rows;
    let form = |u: &[Rat], v: &[Rat]| -> Rat {
        let mv = metric.apply(v);
        u.iter().zip(&mv).map(|(a, b)| a * b).sum()
    };
    let diff = |u: &[Rat], v: &[Rat]| -> Vec<Rat> { u.iter().zip(v).map(|(a, b)| a - b).collect() };
    let mut best: Option<(Rat, Vec<Rat>)> = None;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if idx.len() > dim + 1 {
            continue;
        }
        let p0 = &points[idx[0]];
        let dirs: Vec<Vec<Rat>> = idx[1..].iter().map(|&i| diff(&points[i], p0)).collect();
        let k = dirs.len();
        let center = if k == 0 {
            p0.clone()
        } else {
            let mut g = RatMatrix::zeros(k, k);
            for a in 0..k {
                for b in 0..k {
                    g.set(a, b, form(&dirs[a], &dirs[b]) * rat(2));
                }
            }
            let Some(inv) = g.inverse() else { continue };
            let rhs: Vec<Rat> = dirs.iter().map(|d| form(d, d)).collect();
            let t = inv.apply(&rhs);
            let mut c = p0.clone();
            for (tb, d) in t.iter().zip(&dirs) {
                for (ci, x) in c.iter_mut().zip(d) {
                    *ci += tb * x;
                }
            }
            c
        };
        let r = form(&diff(&center, p0), &diff(&center, p0));
        if points.iter().all(|p| form(&diff(&center, p), &diff(&center, p)) <= r)
            && best.as_ref().is_none_or(|(b, _)| r < *b)
        {
            best = Some((r, center));
        }
    }
    best.expect("some ball encloses the points").1
}

pub fn random_points(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<Rat>> {
    let n = rng.gen_range(1..=6);
    (0..n).map(|_| (0..dim).map(|_| Rat::new(rng.gen_range(-6..=6).into(), rng.gen_range(1..=2).into())).collect()).collect()
}

/// `A^T A + I` for a small random integer `A`.
pub fn random_metric(rng: &mut ChaCha8Rng, dim: usize) -> RatMatrix {
    let a: Vec<Vec<i64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let mut m = RatMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            let s: i64 = (0..dim).map(|k| a[k][i] * a[k][j]).sum();
            m.set(i, j, m.get(i, j) + rat(s));
        }
    }
    m
}

pub fn random_quad(rng: &mut ChaCha8Rng, p: i64) -> QuadElt {
    let mut x = QuadElt::new(rat(rng.gen_range(-9..=9)), rat(rng.gen_range(-9..=9)), p);
    if rng.gen_bool(0.2) {
        x = &x * &QuadElt::w_pow(p, rng.gen_range(-2..=2));
    }
    if rng.gen_bool(0.1) {
        x = x.scale(&Rat::new(1.into(), 7.into()));
    }
    x
}

/// Random invertible lattice over `Z_p[w]`.
pub fn random_lattice(rng: &mut ChaCha8Rng, n: usize, p: i64) -> Lattice {
    loop {
        let basis: Vec<QuadElt> = (0..n * n).map(|_| random_quad(rng, p)).collect();
        let l = Lattice::new(Ring::Ramified, p, n, basis).unwrap();
        if !l.det().is_zero() {
            return l;
        }
    }
}

/// A random unit of `Z_p[w]`.
pub fn random_unit(rng: &mut ChaCha8Rng, p: i64) -> QuadElt {
    loop {
        let x = QuadElt::new(rat(rng.gen_range(-9..=9)), rat(rng.gen_range(-9..=9)), p);
        if x.val() == Some(0) {
            return x;
        }
    }
}

/// Random elementary column operations (unimodular over the valuation ring).
pub fn random_column_ops(rng: &mut ChaCha8Rng, l: &Lattice) -> Lattice {
    let mut cols = l.columns();
    let n = l.n;
    for _ in 0..4 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            let u = random_unit(rng, l.p);
            cols[i] = cols[i].iter().map(|x| x * &u).collect();
        } else {
            let f = QuadElt::new(rat(rng.gen_range(-3..=3)), rat(rng.gen_range(-3..=3)), l.p);
            let add: Vec<QuadElt> = cols[j].iter().map(|x| x * &f).collect();
            cols[i] = cols[i].iter().zip(&add).map(|(a, b)| a + b).collect();
        }
    }
    Lattice::from_columns(l.ring, l.p, &cols).unwrap()
}
