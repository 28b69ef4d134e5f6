//! Orbit combinatorics of the wonderful compactification.
//!
//! The boundary point `e_tau` is represented by the weight support of the
//! projector `lim_{t->0} [rho(lambda_tau(t))]` in `P(End V)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{contract, Result};
use crate::rootsys::{Coweight, LatticeAutomorphism, NodeSet, RootSystem, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitType(pub NodeSet);

#[derive(Debug, Clone)]
pub struct TitsIndex {
    pub root_system: RootSystem,
    pub star_generators: Vec<LatticeAutomorphism>,
    pub anisotropic: NodeSet,
}

impl TitsIndex {
    pub fn new(rs: RootSystem, gens: Vec<LatticeAutomorphism>, anisotropic: NodeSet) -> Result<Self> {
        if !anisotropic.is_subset(NodeSet::full(rs.rank())) {
            return Err(contract!("anisotropic set {anisotropic} not contained in Delta"));
        }
        for g in &gens {
            if rs.star_on_set(g, anisotropic)? != anisotropic {
                return Err(contract!("anisotropic set {anisotropic} is not stable under the star action"));
            }
        }
        Ok(TitsIndex { root_system: rs, star_generators: gens, anisotropic })
    }

    pub fn split(rs: RootSystem) -> Self {
        TitsIndex { root_system: rs, star_generators: vec![], anisotropic: NodeSet::EMPTY }
    }

    pub fn anisotropic_index(rs: RootSystem) -> Self {
        let all = NodeSet::full(rs.rank());
        TitsIndex { root_system: rs, star_generators: vec![], anisotropic: all }
    }

    pub fn is_star_stable(&self, tau: NodeSet) -> Result<bool> {
        for g in &self.star_generators {
            if self.root_system.star_on_set(g, tau)? != tau {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A finite multiset of weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedRep {
    pub weights: Vec<(Weight, u32)>,
}

impl WeightedRep {
    pub fn new(weights: Vec<(Weight, u32)>) -> Result<Self> {
        if weights.is_empty() {
            return Err(contract!("representation has no weights"));
        }
        if weights.iter().any(|(_, m)| *m == 0) {
            return Err(contract!("multiplicities must be positive"));
        }
        let mut merged: BTreeMap<Weight, u32> = BTreeMap::new();
        for (w, m) in weights {
            *merged.entry(w).or_default() += m;
        }
        Ok(WeightedRep { weights: merged.into_iter().collect() })
    }

    /// Roots with multiplicity one plus the zero weight with multiplicity
    /// equal to the rank.
    pub fn adjoint(rs: &RootSystem) -> Self {
        let mut w: Vec<(Weight, u32)> = rs.roots().into_iter().map(|r| (r, 1)).collect();
        w.push((Weight::zero(rs.rank()), rs.rank() as u32));
        WeightedRep::new(w).expect("adjoint weights")
    }

    /// The Weyl orbit of `mu`, each weight with multiplicity one.
    pub fn weyl_orbit(rs: &RootSystem, mu: &Weight) -> Self {
        let set: BTreeSet<Weight> = rs.weyl_group().iter().map(|w| w.apply(mu)).collect();
        WeightedRep { weights: set.into_iter().map(|w| (w, 1)).collect() }
    }

    pub fn multiset(&self) -> BTreeMap<Weight, u32> {
        self.weights.iter().cloned().collect()
    }

    pub fn map(&self, f: impl Fn(&Weight) -> Weight) -> BTreeMap<Weight, u32> {
        let mut out = BTreeMap::new();
        for (w, m) in &self.weights {
            *out.entry(f(w)).or_default() += m;
        }
        out
    }

    pub fn is_weyl_stable(&self, rs: &RootSystem) -> bool {
        let ms = self.multiset();
        (0..rs.rank()).all(|j| {
            let s = rs.simple_reflection(j);
            self.map(|w| Weight(s.apply(&w.0))) == ms
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDescriptor {
    pub tau: OrbitType,
    pub levi_roots: Vec<Weight>,
    pub unip_plus: Vec<Weight>,
    pub unip_minus: Vec<Weight>,
    /// Types of `P_tau` and of its opposite.
    pub fibration_target: (NodeSet, NodeSet),
    pub codimension: usize,
}

#[derive(Debug, Clone)]
pub struct OrbitLattice {
    pub orbits: Vec<OrbitDescriptor>,
    /// Pairs `(tau, sigma)` with `sigma = tau + one node`: `X(sigma)` is a
    /// codimension-one stratum of the closure of `X(tau)`.
    pub covers: Vec<(NodeSet, NodeSet)>,
}

impl OrbitLattice {
    /// `X(sigma)` lies in the closure of `X(tau)`.
    pub fn in_closure(tau: NodeSet, sigma: NodeSet) -> bool {
        tau.is_subset(sigma)
    }

    pub fn get(&self, tau: NodeSet) -> Option<&OrbitDescriptor> {
        self.orbits.iter().find(|o| o.tau.0 == tau)
    }
}

pub fn orbit_descriptor(rs: &RootSystem, tau: NodeSet) -> OrbitDescriptor {
    let part = rs
        .parabolic_root_partition(&rs.lambda_tau(tau))
        .expect("lambda_tau has the right rank");
    OrbitDescriptor {
        tau: OrbitType(tau),
        levi_roots: part.levi,
        unip_plus: part.unip_plus,
        unip_minus: part.unip_minus,
        fibration_target: (tau, rs.opposition_involution(tau)),
        codimension: tau.len(),
    }
}

pub fn orbit_lattice(rs: &RootSystem) -> OrbitLattice {
    let r = rs.rank();
    let orbits: Vec<OrbitDescriptor> = NodeSet::all(r).map(|t| orbit_descriptor(rs, t)).collect();
    let mut covers = Vec::new();
    for tau in NodeSet::all(r) {
        for i in tau.complement(r).iter() {
            let mut sigma = tau;
            sigma.insert(i);
            covers.push((tau, sigma));
        }
    }
    OrbitLattice { orbits, covers }
}

/// Weights minimising `<mu, lambda>`: the image of the limit projector.
pub fn limit_support(rs: &RootSystem, rep: &WeightedRep, lambda: &Coweight) -> Result<BTreeSet<Weight>> {
    support_argmin(rs, rep.weights.iter().map(|(w, _)| w), lambda)
}

fn support_argmin<'a>(
    rs: &RootSystem,
    weights: impl Iterator<Item = &'a Weight>,
    lambda: &Coweight,
) -> Result<BTreeSet<Weight>> {
    let mut best: Option<i64> = None;
    let mut out = BTreeSet::new();
    for w in weights {
        let v = rs.pairing(w, lambda)?;
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => {
                out.insert(w.clone());
            }
            _ => {
                best = Some(v);
                out.clear();
                out.insert(w.clone());
            }
        }
    }
    if best.is_none() {
        return Err(contract!("representation has no weights"));
    }
    Ok(out)
}

/// Compares the support of `e_{gamma * tau}` with `w_gamma gamma` applied to
/// the support of `e_tau`.
pub fn check_star_orbit_identity(
    rs: &RootSystem,
    rep: &WeightedRep,
    gamma: &LatticeAutomorphism,
    tau: NodeSet,
) -> Result<bool> {
    if rep.map(|w| gamma.apply(w)) != rep.multiset() {
        return Err(contract!("representation is not stable under gamma"));
    }
    let w_gamma = rs.twisting_element(gamma)?;
    let star_tau = rs.star_on_set(gamma, tau)?;
    let lhs = limit_support(rs, rep, &rs.lambda_tau(star_tau))?;
    let rhs: BTreeSet<Weight> = limit_support(rs, rep, &rs.lambda_tau(tau))?
        .iter()
        .map(|w| w_gamma.apply(&gamma.apply(w)))
        .collect();
    Ok(lhs == rhs)
}

/// Flowing by `lambda_sigma` inside the support of `e_tau` lands on the
/// support of `e_{tau + sigma}`.
pub fn degeneration_lands(rs: &RootSystem, rep: &WeightedRep, tau: NodeSet, sigma: NodeSet) -> Result<bool> {
    let start = limit_support(rs, rep, &rs.lambda_tau(tau))?;
    let flowed = support_argmin(rs, start.iter(), &rs.lambda_tau(sigma))?;
    let target = limit_support(rs, rep, &rs.lambda_tau(tau.union(sigma)))?;
    Ok(flowed == target)
}

/// Standard Tits-index test: `tau` is star-stable and misses the
/// anisotropic kernel.
pub fn k_parabolic_exists(index: &TitsIndex, tau: NodeSet) -> Result<bool> {
    Ok(index.is_star_stable(tau)? && tau.intersection(index.anisotropic).is_empty())
}

pub fn rational_boundary_orbits(index: &TitsIndex) -> Result<Vec<OrbitType>> {
    let mut out = Vec::new();
    for tau in NodeSet::all(index.root_system.rank()).filter(|t| !t.is_empty()) {
        if k_parabolic_exists(index, tau)? {
            out.push(OrbitType(tau));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        s.parse().unwrap()
    }

    #[test]
    fn orbit_counts_and_codims() {
        let a1 = orbit_lattice(&rs("A1"));
        assert_eq!(a1.orbits.len(), 2);
        assert_eq!(a1.orbits.iter().map(|o| o.codimension).collect::<Vec<_>>(), vec![0, 1]);
        let a2 = orbit_lattice(&rs("A2"));
        let mut codims: Vec<usize> = a2.orbits.iter().map(|o| o.codimension).collect();
        codims.sort();
        assert_eq!(codims, vec![0, 1, 1, 2]);
        assert_eq!(orbit_lattice(&rs("D4")).orbits.len(), 16);
        for (t, s) in &a2.covers {
            let ct = a2.get(*t).unwrap().codimension;
            let cs = a2.get(*s).unwrap().codimension;
            assert_eq!(cs, ct + 1);
        }
    }

    #[test]
    fn adjoint_a1_limit() {
        let r = rs("A1");
        let rep = WeightedRep::adjoint(&r);
        let alpha_vee = r.coweight_from_coroots(&[crate::rational::rat(1)]).unwrap();
        let got = limit_support(&r, &rep, &alpha_vee).unwrap();
        assert_eq!(got, BTreeSet::from([Weight(vec![-1])]));
        let all = limit_support(&r, &rep, &Coweight::zero(1)).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn su3_index() {
        let r = rs("A2");
        let g = LatticeAutomorphism::preset(&r, "swap").unwrap();
        let idx = TitsIndex::new(r, vec![g], NodeSet::EMPTY).unwrap();
        assert!(!k_parabolic_exists(&idx, NodeSet::from_indices([0])).unwrap());
        assert!(k_parabolic_exists(&idx, NodeSet::full(2)).unwrap());
        assert!(k_parabolic_exists(&idx, NodeSet::EMPTY).unwrap());
        assert_eq!(rational_boundary_orbits(&idx).unwrap(), vec![OrbitType(NodeSet::full(2))]);
    }

    #[test]
    fn unstable_anisotropic_set_rejected() {
        let r = rs("A2");
        let g = LatticeAutomorphism::preset(&r, "swap").unwrap();
        assert!(TitsIndex::new(r, vec![g], NodeSet::from_indices([0])).is_err());
    }

    #[test]
    fn non_stable_rep_rejected() {
        let r = rs("A2");
        let g = LatticeAutomorphism::preset(&r, "swap").unwrap();
        let rep = WeightedRep::new(vec![(Weight(vec![1, 0]), 1)]).unwrap();
        assert!(check_star_orbit_identity(&r, &rep, &g, NodeSet::EMPTY).is_err());
    }
}
