//! The apartment `Hom(X*(T), R_{>0})` of a split torus, its partial
//! compactification along the Weyl fan, and cocharacter flows.
//!
//! A point is recorded by its values on the simple roots. Values are exact
//! `c * q^e` numbers; the additive ("log") picture takes `log_q`.

pub mod ball;
pub mod pipeline;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{contract, Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::multval::{LogValue, MultVal};
use crate::rational::{rat, Rat};
use crate::rootsys::{Coweight, NodeSet, RootSystem, Weight};
use crate::wonderful::{orbit_descriptor, OrbitDescriptor};

pub use ball::{min_ball, Ball, Metric, Scalar};
pub use pipeline::{
    circumcenter, project_to_fiber, fixed_point_pipeline, AffineGaloisAction, AffineMap, FiberSpec, PipelineReport,
};

pub fn default_q() -> Rat {
    rat(2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApartmentPoint {
    pub q: Rat,
    /// Values `<alpha_i, x>` on the simple roots.
    pub coords: Vec<MultVal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogCoords {
    pub values: Vec<LogValue>,
}

impl LogCoords {
    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|v| matches!(v, LogValue::Exact(_)))
    }

    pub fn exact(&self) -> Option<Vec<Rat>> {
        self.values.iter().map(|v| v.exact().cloned()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(LogValue::to_f64).collect()
    }
}

impl ApartmentPoint {
    pub fn new(q: &Rat, coords: Vec<MultVal>) -> Result<Self> {
        if *q <= Rat::one() {
            return Err(contract!("base q = {q} must exceed 1"));
        }
        if coords.iter().any(|c| c.q != *q) {
            return Err(contract!("coordinate with a different base"));
        }
        Ok(ApartmentPoint { q: q.clone(), coords })
    }

    pub fn base(q: &Rat, rank: usize) -> Self {
        ApartmentPoint { q: q.clone(), coords: vec![MultVal::one(q); rank] }
    }

    pub fn from_rats(q: &Rat, coords: &[Rat]) -> Result<Self> {
        let c = coords.iter().map(|c| MultVal::from_rat(q, c.clone())).collect::<Result<_>>()?;
        Self::new(q, c)
    }

    pub fn from_log(q: &Rat, v: &[Rat]) -> Self {
        ApartmentPoint { q: q.clone(), coords: v.iter().map(|e| MultVal::q_pow(q, e.clone())).collect() }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// `<chi, x>` for any character, by multiplicativity.
    pub fn value_on(&self, chi: &Weight) -> MultVal {
        chi.0
            .iter()
            .zip(&self.coords)
            .fold(MultVal::one(&self.q), |acc, (&k, c)| acc.mul(&c.pow(k)))
    }

    pub fn log_coords(&self) -> LogCoords {
        LogCoords { values: self.coords.iter().map(MultVal::log_q).collect() }
    }

    pub fn exact_log(&self) -> Result<Vec<Rat>> {
        self.log_coords()
            .exact()
            .ok_or_else(|| Error::Domain("point has a coordinate that is not a rational power of q".into()))
    }
}

/// `<alpha, lambda^n x> = q^{n <alpha, lambda>} <alpha, x>`.
pub fn cochar_flow(rs: &RootSystem, x: &ApartmentPoint, lambda: &Coweight, n: u64) -> Result<ApartmentPoint> {
    check_rank(rs, x.rank(), lambda)?;
    let coords = x
        .coords
        .iter()
        .zip(&lambda.0)
        .map(|(c, &l)| c.mul_q_pow(&Rat::from_integer((l * n as i64).into())))
        .collect();
    Ok(ApartmentPoint { q: x.q.clone(), coords })
}

fn check_rank(rs: &RootSystem, rank: usize, lambda: &Coweight) -> Result<()> {
    if rank != rs.rank() || lambda.rank() != rs.rank() {
        return Err(contract!("rank mismatch: point {rank}, coweight {}, root system {}", lambda.rank(), rs.rank()));
    }
    Ok(())
}

/// A point of the compactified apartment: a stratum `tau` and the values on
/// the simple roots outside `tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactifiedPoint {
    pub q: Rat,
    pub tau: NodeSet,
    pub coords: BTreeMap<usize, MultVal>,
}

impl CompactifiedPoint {
    pub fn new(q: &Rat, rank: usize, tau: NodeSet, coords: BTreeMap<usize, MultVal>) -> Result<Self> {
        let expected = tau.complement(rank);
        let got = NodeSet::from_indices(coords.keys().copied());
        if got != expected {
            return Err(contract!("stratum {tau} needs coordinates on {expected}, got {got}"));
        }
        Ok(CompactifiedPoint { q: q.clone(), tau, coords })
    }

    pub fn interior(x: &ApartmentPoint) -> Self {
        CompactifiedPoint { q: x.q.clone(), tau: NodeSet::EMPTY, coords: x.coords.iter().cloned().enumerate().collect() }
    }

    /// The point of the closed stratum `Delta`.
    pub fn deepest(q: &Rat, rank: usize) -> Self {
        CompactifiedPoint { q: q.clone(), tau: NodeSet::full(rank), coords: BTreeMap::new() }
    }

    /// Value on the negative root `-beta`, `None` meaning 0.
    pub fn value_on_negative(&self, beta: &Weight) -> Option<MultVal> {
        if !beta.support().intersection(self.tau).is_empty() {
            return None;
        }
        let mut acc = MultVal::one(&self.q);
        for (i, &b) in beta.0.iter().enumerate() {
            if b != 0 {
                acc = acc.mul(&self.coords[&i].pow(-b));
            }
        }
        Some(acc)
    }

    /// Evaluation as a monoid map on `<Phi^->`; `beta` is any element of the
    /// positive root cone, result for `-beta`.
    pub fn eval_monoid(&self, beta: &Weight) -> Result<Option<MultVal>> {
        if beta.0.iter().any(|&b| b < 0) {
            return Err(contract!("{beta} is not in the positive cone"));
        }
        Ok(self.value_on_negative(beta))
    }

    pub fn to_apartment(&self, rank: usize) -> Option<ApartmentPoint> {
        self.tau.is_empty().then(|| ApartmentPoint {
            q: self.q.clone(),
            coords: (0..rank).map(|i| self.coords[&i].clone()).collect(),
        })
    }

    pub fn exact_log(&self) -> Result<BTreeMap<usize, Rat>> {
        self.coords
            .iter()
            .map(|(&i, v)| {
                v.log_q()
                    .exact()
                    .cloned()
                    .map(|e| (i, e))
                    .ok_or_else(|| Error::Domain(format!("coordinate a{} is not a rational power of q", i + 1)))
            })
            .collect()
    }
}

/// Limit of `lambda^n x` as `n -> infinity`; needs `lambda` dominant.
pub fn limit_point(rs: &RootSystem, x: &ApartmentPoint, lambda: &Coweight) -> Result<CompactifiedPoint> {
    check_rank(rs, x.rank(), lambda)?;
    if !lambda.is_dominant() {
        return Err(Error::Domain(format!(
            "cocharacter {:?} is negative on a simple root; the flow leaves this partial compactification",
            lambda.0
        )));
    }
    let tau = lambda.positive_support();
    let coords = tau.complement(rs.rank()).iter().map(|i| (i, x.coords[i].clone())).collect();
    Ok(CompactifiedPoint { q: x.q.clone(), tau, coords })
}

/// The stratum of `z` with its orbit data, after checking the vanishing
/// pattern on every negative root.
pub fn stratum_of(rs: &RootSystem, z: &CompactifiedPoint) -> Result<(NodeSet, OrbitDescriptor)> {
    let desc = orbit_descriptor(rs, z.tau);
    for beta in rs.positive_roots() {
        let vanishes = z.value_on_negative(beta).is_none();
        let in_unipotent = desc.unip_minus.contains(&beta.neg());
        if vanishes != in_unipotent {
            return Err(contract!("vanishing pattern of -{beta} does not match stratum {}", z.tau));
        }
    }
    Ok((z.tau, desc))
}

/// The W-invariant form on `X_*(T) (x) R` in simple-root value coordinates:
/// the inverse of the root Gram matrix, scaled to primitive integers.
pub fn default_metric(rs: &RootSystem) -> RatMatrix {
    let g = RatMatrix::from_int(rs.gram());
    let inv = g.inverse().expect("Gram matrix is invertible");
    let scaled = scale_to_primitive(&inv);
    debug_assert!(is_weyl_invariant(rs, &scaled));
    scaled
}

fn scale_to_primitive(m: &RatMatrix) -> RatMatrix {
    use num_integer::Integer;
    let mut den = num_bigint::BigInt::one();
    for i in 0..m.rows {
        for j in 0..m.cols {
            den = den.lcm(m.get(i, j).denom());
        }
    }
    let mut num = num_bigint::BigInt::zero();
    for i in 0..m.rows {
        for j in 0..m.cols {
            num = num.gcd(&(m.get(i, j) * Rat::from_integer(den.clone())).to_integer());
        }
    }
    let f = Rat::new(den, num);
    let mut out = m.clone();
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.set(i, j, m.get(i, j) * &f);
        }
    }
    out
}

/// Linear action on value coordinates induced by a lattice map `g` on
/// characters: `(g x)(chi) = x(g^{-1} chi)`, i.e. the matrix `g^{-T}`.
pub fn value_action(g: &IntMatrix) -> RatMatrix {
    RatMatrix::from_int(g).inverse().expect("automorphism is invertible").transpose()
}

pub fn is_isometry(metric: &RatMatrix, l: &RatMatrix) -> bool {
    l.transpose().mul(metric).mul(l) == *metric
}

pub fn is_weyl_invariant(rs: &RootSystem, metric: &RatMatrix) -> bool {
    (0..rs.rank()).all(|j| is_isometry(metric, &value_action(&rs.simple_reflection(j))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn a2() -> RootSystem {
        "A2".parse().unwrap()
    }

    #[test]
    fn log_round_trip() {
        let q = rat(2);
        let x = ApartmentPoint::from_rats(&q, &[rat(2), rat(4)]).unwrap();
        assert_eq!(x.exact_log().unwrap(), vec![rat(1), rat(2)]);
        assert_eq!(ApartmentPoint::from_log(&q, &x.exact_log().unwrap()), x);
        let base = ApartmentPoint::base(&q, 2);
        assert_eq!(base.exact_log().unwrap(), vec![rat(0), rat(0)]);
        let y = ApartmentPoint::from_rats(&q, &[rat(3), rat(1)]).unwrap();
        let l = y.log_coords();
        assert!(!l.is_exact());
        assert!((l.to_f64()[0] - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn flow_on_base_point() {
        let rs = a2();
        let q = rat(2);
        let x = ApartmentPoint::base(&q, 2);
        let lam = rs.lambda_tau(NodeSet::from_indices([0]));
        let y = cochar_flow(&rs, &x, &lam, 1).unwrap();
        assert_eq!(y.coords[0].to_rat(), Some(rat(2)));
        assert!(y.coords[1].is_one());
        assert_eq!(cochar_flow(&rs, &x, &lam, 0).unwrap(), x);
        assert_eq!(cochar_flow(&rs, &y, &Coweight::zero(2), 7).unwrap(), y);
    }

    #[test]
    fn limit_and_stratum() {
        let rs = a2();
        let q = rat(2);
        let x = ApartmentPoint::from_rats(&q, &[ratio(1, 3), rat(5)]).unwrap();
        let lam = rs.lambda_tau(NodeSet::from_indices([1]));
        let z = limit_point(&rs, &x, &lam).unwrap();
        assert_eq!(z.tau, NodeSet::from_indices([1]));
        assert_eq!(z.coords[&0].to_rat(), Some(ratio(1, 3)));
        let (tau, desc) = stratum_of(&rs, &z).unwrap();
        assert_eq!(tau, z.tau);
        assert_eq!(desc.codimension, 1);
        assert_eq!(z.value_on_negative(&Weight(vec![1, 0])).unwrap().to_rat(), Some(rat(3)));
        assert!(z.value_on_negative(&Weight(vec![1, 1])).is_none());
        assert!(limit_point(&rs, &x, &Coweight(vec![1, -1])).is_err());
        let (t, d) = stratum_of(&rs, &CompactifiedPoint::interior(&x)).unwrap();
        assert!(t.is_empty() && d.codimension == 0);
        let (t, _) = stratum_of(&rs, &CompactifiedPoint::deepest(&q, 2)).unwrap();
        assert_eq!(t, NodeSet::full(2));
    }

    #[test]
    fn metric_is_invariant() {
        for s in ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2"] {
            let rs: RootSystem = s.parse().unwrap();
            let m = default_metric(&rs);
            assert!(is_weyl_invariant(&rs, &m), "{s}");
            for g in rs.diagram_automorphisms() {
                assert!(is_isometry(&m, &value_action(&g.matrix)), "{s}");
            }
        }
        let m = default_metric(&a2());
        assert_eq!(m.get(0, 0), &rat(2));
        assert_eq!(m.get(0, 1), &rat(1));
    }
}
