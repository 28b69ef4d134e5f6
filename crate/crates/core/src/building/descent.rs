//! Galois descent for `k'/k`: rational parts of lattices, the image of the
//! building over `k`, and barbs (fixed vertices outside that image).

use std::collections::BTreeSet;

use super::graph::{bfs_layers, bfs_layers_cached, LayerStore, NoStore, distance_to, standard_chamber, subspaces};
use super::lattice::{hermite, HermiteForm, Lattice, LatticeClass, Ring};
use super::quad::QuadElt;
use crate::error::{contract, Result};
use crate::par::{self, Exec};
use crate::rational::vp_int;

/// `L ∩ k^n` for a lattice over `Z_p[w]`, as a lattice over `Z_p`.
pub fn rational_part(l: &Lattice) -> Result<Lattice> {
    if l.ring != Ring::Ramified {
        return Err(contract!("rational part of a lattice already over Z_p"));
    }
    let (n, p) = (l.n, l.p);
    let w = QuadElt::w(p);
    // Z_p-coordinates (b-part, a-part) of h and w h for every column h
    let mut gens = Vec::with_capacity(2 * n);
    for col in l.columns() {
        for v in [col.clone(), col.iter().map(|x| x * &w).collect::<Vec<_>>()] {
            let mut g: Vec<QuadElt> = v.iter().map(|x| QuadElt::from_rat(x.b.clone(), p)).collect();
            g.extend(v.iter().map(|x| QuadElt::from_rat(x.a.clone(), p)));
            gens.push(g);
        }
    }
    let h = hermite(Ring::Base, p, 2 * n, gens)?;
    let scale = Ring::Base.uniformizer_pow(p, h.shift);
    // columns pivoting in the a-rows have vanishing b-part
    let cols: Vec<Vec<QuadElt>> =
        (n..2 * n).map(|j| (n..2 * n).map(|i| h.class.get(i, j) * &scale).collect()).collect();
    Lattice::from_columns(Ring::Base, p, &cols)
}

/// Whether `[L]` lies in the image of the building over `k`: a vertex
/// `[M ⊗ O']` or the midpoint `[M' O' + w M O']` of an edge `pM < M' < M`.
/// Exact criterion: `L = (L ∩ k^n) O' + w^{-1} (wL ∩ k^n) O'`.
pub fn in_base_image(v: &LatticeClass) -> Result<bool> {
    let l = v.lattice();
    let l0 = rational_part(&l)?;
    let l1 = rational_part(&l.scale(&QuadElt::w(l.p)))?;
    let winv = QuadElt::w_pow(l.p, -1);
    let mut gens = l0.columns();
    gens.extend(l1.columns().into_iter().map(|c| c.iter().map(|x| x * &winv).collect()));
    let h = hermite(Ring::Ramified, l.p, l.n, gens)?;
    Ok(h == HermiteForm { shift: 0, class: v.clone() })
}

/// `[M] -> [M ⊗ O']`.
pub fn tensor_up(v: &LatticeClass) -> LatticeClass {
    v.lattice().with_ring(Ring::Ramified).and_then(|l| l.class()).expect("full rank")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseImage {
    /// Tensor images of the k-vertices within the radius.
    pub vertices: BTreeSet<LatticeClass>,
    /// Images of midpoints of k-edges with both ends within the radius.
    pub midpoints: BTreeSet<LatticeClass>,
}

impl BaseImage {
    pub fn all(&self) -> BTreeSet<LatticeClass> {
        self.vertices.union(&self.midpoints).cloned().collect()
    }
}

/// Breadth-first search in the building over `k` from `basepoint`, mapped
/// into the building over `k'`.
pub fn base_building_image(basepoint: &LatticeClass, radius: usize, exec: Exec) -> Result<BaseImage> {
    if basepoint.ring != Ring::Base {
        return Err(contract!("basepoint must be a lattice class over Z_p"));
    }
    let layers = bfs_layers(std::slice::from_ref(basepoint), radius, exec)?;
    let ball: Vec<LatticeClass> = layers.concat();
    let in_ball: BTreeSet<&LatticeClass> = ball.iter().collect();
    let vertices = par::map(exec, &ball, tensor_up).into_iter().collect();
    let (n, p) = (basepoint.n, basepoint.p);
    let subs = subspaces(n, p);
    let mids = par::map(exec, &ball, |m| -> Result<Vec<LatticeClass>> {
        let cols = m.lattice().columns();
        let w = QuadElt::w(p);
        let mut out = Vec::new();
        for s in &subs {
            let span: Vec<Vec<QuadElt>> = s.iter().map(|row| combine(&cols, row, p)).collect();
            let mut sub = span.clone();
            sub.extend(cols.iter().map(|c| c.iter().map(|x| x * &QuadElt::from_int(p, p)).collect()));
            if !in_ball.contains(&hermite(Ring::Base, p, n, sub)?.class) {
                continue;
            }
            let mut gens = span;
            gens.extend(cols.iter().map(|c| c.iter().map(|x| x * &w).collect()));
            out.push(hermite(Ring::Ramified, p, n, gens)?.class);
        }
        Ok(out)
    });
    let mut midpoints = BTreeSet::new();
    for m in mids {
        midpoints.extend(m?);
    }
    Ok(BaseImage { vertices, midpoints })
}

fn combine(cols: &[Vec<QuadElt>], coeffs: &[i64], p: i64) -> Vec<QuadElt> {
    let n = cols[0].len();
    let mut g = vec![QuadElt::zero(p); n];
    for (c, &k) in cols.iter().zip(coeffs) {
        if k != 0 {
            let k = QuadElt::from_int(k, p);
            for (gi, x) in g.iter_mut().zip(c) {
                *gi = &*gi + &(&k * x);
            }
        }
    }
    g
}

/// Wildness `s(k'/k) = v_p(e) = v_p(2)`.
pub fn wildness(p: i64) -> i64 {
    vp_int(&2.into(), p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barb {
    pub vertex: LatticeClass,
    /// `None` when no image vertex was found within the cap.
    pub distance_to_image: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarbReport {
    pub p: i64,
    pub n: usize,
    pub radius: usize,
    pub s: i64,
    pub distance_cap: usize,
    pub ball: Vec<LatticeClass>,
    pub fixed: Vec<LatticeClass>,
    pub image: Vec<LatticeClass>,
    pub barbs: Vec<Barb>,
}

impl BarbReport {
    pub fn max_distance(&self) -> Option<usize> {
        self.barbs.iter().filter_map(|b| b.distance_to_image).max()
    }
}

/// Classifies every vertex within `radius` of the standard chamber.
pub fn barb_search(n: usize, p: i64, radius: usize, distance_cap: usize, exec: Exec) -> Result<BarbReport> {
    barb_search_from(&standard_chamber(Ring::Ramified, p, n), radius, distance_cap, exec)
}

pub fn barb_search_from(
    starts: &[LatticeClass],
    radius: usize,
    distance_cap: usize,
    exec: Exec,
) -> Result<BarbReport> {
    barb_search_cached(starts, radius, distance_cap, exec, &NoStore)
}

/// As [`barb_search_from`], reading and writing BFS layers through `store`.
pub fn barb_search_cached(
    starts: &[LatticeClass],
    radius: usize,
    distance_cap: usize,
    exec: Exec,
    store: &dyn LayerStore,
) -> Result<BarbReport> {
    let first = starts.first().ok_or_else(|| contract!("no basepoint"))?;
    if starts.iter().any(|s| s.ring != Ring::Ramified) {
        return Err(contract!("barb search runs in the building over k'"));
    }
    crate::building::graph::check_rank(first.n)?;
    let (n, p) = (first.n, first.p);
    let ball = bfs_layers_cached(starts, radius, exec, store)?.concat();
    let flags = par::map(exec, &ball, |v| -> Result<(bool, bool)> { Ok((v.is_sigma_fixed(), in_base_image(v)?)) });
    let mut fixed = Vec::new();
    let mut image = Vec::new();
    let mut barb_vertices = Vec::new();
    for (v, f) in ball.iter().zip(flags) {
        let (is_fixed, in_image) = f?;
        if is_fixed {
            fixed.push(v.clone());
        }
        if in_image {
            image.push(v.clone());
        }
        if is_fixed && !in_image {
            barb_vertices.push(v.clone());
        }
    }
    let mut barbs = Vec::new();
    for v in barb_vertices {
        let d = distance_to(&v, |c| in_base_image(c).unwrap_or(false), distance_cap, exec)?;
        barbs.push(Barb { vertex: v, distance_to_image: d });
    }
    Ok(BarbReport { p, n, radius, s: wildness(p), distance_cap, ball, fixed, image, barbs })
}

#[cfg(test)]
mod tests {
    use super::super::graph::neighbors;
    use super::super::lattice::{q, qw, Lattice};
    use super::*;

    fn barb_class(p: i64) -> LatticeClass {
        let z = q(0, p);
        let cols = vec![
            vec![QuadElt::w_pow(p, -1), z.clone(), q(1, p)],
            vec![z.clone(), q(1, p), z.clone()],
            vec![z.clone(), z.clone(), QuadElt::w(p)],
        ];
        Lattice::from_columns(Ring::Ramified, p, &cols).unwrap().class().unwrap()
    }

    #[test]
    fn rational_part_of_tensor_and_midpoint() {
        let p = 2;
        let std = Lattice::standard(Ring::Ramified, p, 3);
        assert_eq!(rational_part(&std).unwrap().class().unwrap(), LatticeClass::standard(Ring::Base, p, 3));
        let mid = Lattice::diagonal(Ring::Ramified, p, &[0, 0, 1]).class().unwrap();
        assert!(in_base_image(&mid).unwrap());
        assert!(in_base_image(&LatticeClass::standard(Ring::Ramified, p, 3)).unwrap());
        assert!(!in_base_image(&barb_class(p)).unwrap());
        let l = Lattice::from_rows(Ring::Ramified, 3, &[vec![q(1, 3), q(0, 3)], vec![qw(1, 1, 3), QuadElt::w(3)]])
            .unwrap();
        assert_eq!(rational_part(&l).unwrap().n, 2);
    }

    #[test]
    fn image_matches_enumeration_and_is_fixed() {
        for p in [2, 3] {
            let base = LatticeClass::standard(Ring::Base, p, 3);
            let img = base_building_image(&base, 1, Exec::Sequential).unwrap();
            assert_eq!(img.vertices.len(), 1 + 26 * usize::from(p == 3) + 14 * usize::from(p == 2));
            for v in img.all() {
                assert!(v.is_sigma_fixed());
                assert!(in_base_image(&v).unwrap());
            }
            // tensor images have divisors 0 or 2 relative to the standard vertex
            let s = LatticeClass::standard(Ring::Ramified, p, 3);
            for v in &img.vertices {
                let d = super::super::lattice::normalized_divisors(&s, v);
                assert!(d.iter().all(|x| x % 2 == 0));
            }
            // every k'-neighbour of the standard vertex that is in the image
            // is a midpoint of a k-edge at the basepoint
            for nb in neighbors(&s).unwrap() {
                assert_eq!(in_base_image(&nb).unwrap(), img.midpoints.contains(&nb));
            }
        }
        let r0 = base_building_image(&LatticeClass::standard(Ring::Base, 2, 3), 0, Exec::Sequential).unwrap();
        assert_eq!(r0.vertices.len(), 1);
    }

    #[test]
    fn barbs_at_two_and_none_at_three() {
        let rep = barb_search(3, 2, 1, 4, Exec::Parallel).unwrap();
        assert_eq!(rep.s, 1);
        let b = rep.barbs.iter().find(|b| b.vertex == barb_class(2)).expect("barb found");
        assert_eq!(b.distance_to_image, Some(1));
        let rep = barb_search(3, 3, 1, 4, Exec::Parallel).unwrap();
        assert_eq!(rep.s, 0);
        assert!(rep.barbs.is_empty());
        assert_eq!(rep.fixed, rep.image);
    }

    #[test]
    fn rank_two_fixed_neighbours() {
        for (p, want) in [(2, 3), (3, 2)] {
            let v = Lattice::diagonal(Ring::Ramified, p, &[0, 1]).class().unwrap();
            let fixed = neighbors(&v).unwrap().iter().filter(|c| c.is_sigma_fixed()).count();
            assert_eq!(fixed, want);
        }
    }
}
