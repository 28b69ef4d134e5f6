//! Galois-fixed points of the compactified apartment: orbit, circumcentre,
//! orthogonal projection to a fibre, then a cocharacter flow to the boundary.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::ball::{min_ball, Metric};
use super::{cochar_flow, limit_point, value_action, ApartmentPoint, CompactifiedPoint};
use crate::error::{contract, Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::multval::MultVal;
use crate::rational::{rat, Rat};
use crate::rootsys::{Coweight, LatticeAutomorphism, NodeSet, RootSystem};

/// `v -> linear v + translation` on value (log) coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub linear: RatMatrix,
    pub translation: Vec<Rat>,
}

impl AffineMap {
    pub fn identity(rank: usize) -> Self {
        AffineMap { linear: RatMatrix::identity(rank), translation: vec![Rat::zero(); rank] }
    }

    /// The map induced by a root-preserving lattice automorphism, followed
    /// by a translation.
    pub fn from_automorphism(g: &LatticeAutomorphism, translation: Vec<Rat>) -> Result<Self> {
        if translation.len() != g.matrix.n {
            return Err(contract!("translation has length {}, expected {}", translation.len(), g.matrix.n));
        }
        Ok(AffineMap { linear: value_action(&g.matrix), translation })
    }

    /// Reflection in the wall `<alpha_j, x> = c` (log coordinates).
    pub fn affine_reflection(rs: &RootSystem, j: usize, c: &Rat) -> Self {
        let linear = value_action(&rs.simple_reflection(j));
        let translation = (0..rs.rank()).map(|l| c * rat(rs.cartan().get(l, j))).collect();
        AffineMap { linear, translation }
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.linear.apply(v).into_iter().zip(&self.translation).map(|(a, b)| a + b).collect()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap { linear: self.linear.mul(&other.linear), translation: self.apply(&other.translation) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineGaloisAction {
    /// All group elements, identity first.
    pub maps: Vec<AffineMap>,
}

pub const GROUP_CAP: usize = 1024;

impl AffineGaloisAction {
    pub fn trivial(rank: usize) -> Self {
        AffineGaloisAction { maps: vec![AffineMap::identity(rank)] }
    }

    /// Closes `gens` under composition.
    pub fn generate(rank: usize, gens: &[AffineMap]) -> Result<Self> {
        let mut maps = vec![AffineMap::identity(rank)];
        let mut k = 0;
        while k < maps.len() {
            for g in gens {
                let m = g.compose(&maps[k]);
                if !maps.contains(&m) {
                    maps.push(m);
                    if maps.len() > GROUP_CAP {
                        return Err(contract!("action does not close to a finite group within {GROUP_CAP} elements"));
                    }
                }
            }
            k += 1;
        }
        Ok(AffineGaloisAction { maps })
    }

    pub fn orbit(&self, v: &[Rat]) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for m in &self.maps {
            let w = m.apply(v);
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    pub fn fixes(&self, v: &[Rat]) -> bool {
        self.maps.iter().all(|m| m.apply(v) == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSpec {
    pub tau: NodeSet,
    pub target: CompactifiedPoint,
}

impl FiberSpec {
    pub fn new(tau: NodeSet, target: CompactifiedPoint) -> Result<Self> {
        if target.tau != tau {
            return Err(contract!("fibre over {tau} with target in stratum {}", target.tau));
        }
        Ok(FiberSpec { tau, target })
    }

    /// Pinned log values on `Delta \ tau`.
    pub fn pinned(&self) -> Result<BTreeMap<usize, Rat>> {
        self.target.exact_log().map_err(|e| contract!("fibre target not exact in log coordinates: {e}"))
    }
}

/// Centre of the minimal enclosing ball of `points` in the metric.
pub fn circumcenter(points: &[Vec<Rat>], metric: &RatMatrix) -> Result<Vec<Rat>> {
    let m = Metric::<Rat>::from_rat(metric);
    if points.iter().any(|p| p.len() != m.dim) {
        return Err(contract!("point dimension does not match the metric"));
    }
    let (ball, _) = min_ball(points, &m).ok_or_else(|| contract!("no points"))?;
    Ok(ball.center)
}

/// Floating-point fallback used when coordinates are not exact in log form.
pub fn circumcenter_f64(points: &[Vec<f64>], metric: &RatMatrix) -> Result<Vec<f64>> {
    let m = Metric::<f64>::from_rat(metric);
    let (ball, _) = min_ball(points, &m).ok_or_else(|| contract!("no points"))?;
    Ok(ball.center)
}

/// Orthogonal projection onto `{z : z_j = pinned_j}`: the free block moves by
/// `-M_II^{-1} M_IJ d_J`.
pub fn project_to_fiber(x: &[Rat], fiber: &FiberSpec, metric: &RatMatrix) -> Result<Vec<Rat>> {
    let pinned = fiber.pinned()?;
    let n = x.len();
    if metric.rows != n || pinned.keys().any(|&j| j >= n) {
        return Err(contract!("fibre and point dimensions disagree"));
    }
    let free: Vec<usize> = (0..n).filter(|i| !pinned.contains_key(i)).collect();
    let fixed: Vec<usize> = pinned.keys().copied().collect();
    let d_j: Vec<Rat> = fixed.iter().map(|j| &pinned[j] - &x[*j]).collect();
    let mut z = x.to_vec();
    for (j, v) in &pinned {
        z[*j] = v.clone();
    }
    if !free.is_empty() && !fixed.is_empty() {
        let m_ii = metric.submatrix(&free, &free);
        let m_ij = metric.submatrix(&free, &fixed);
        let inv = m_ii.inverse().ok_or_else(|| contract!("metric is degenerate on the fibre"))?;
        let shift = inv.apply(&m_ij.apply(&d_j));
        for (k, &i) in free.iter().enumerate() {
            z[i] = &z[i] - &shift[k];
        }
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub orbit: Vec<Vec<Rat>>,
    pub circumcenter: Vec<Rat>,
    pub x_tilde: Vec<Rat>,
    /// `lambda^n x_tilde` for `n = 0..=steps`, log coordinates.
    pub trace: Vec<Vec<Rat>>,
    pub limit: CompactifiedPoint,
    pub x_tilde_fixed: bool,
    pub flow_fixed: bool,
    pub limit_is_target: bool,
    pub limit_fixed_on_boundary: bool,
    pub semigroup_law: bool,
    pub decay: bool,
}

impl PipelineReport {
    pub fn all_flags(&self) -> bool {
        self.x_tilde_fixed
            && self.flow_fixed
            && self.limit_is_target
            && self.limit_fixed_on_boundary
            && self.semigroup_law
            && self.decay
    }
}

fn check(cond: bool, name: &str, detail: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Contract(format!("{name}: {}", detail())))
    }
}

pub fn fixed_point_pipeline(
    rs: &RootSystem,
    x0: &ApartmentPoint,
    action: &AffineGaloisAction,
    fiber: &FiberSpec,
    lambda: &Coweight,
    metric: &RatMatrix,
    steps: u64,
) -> Result<PipelineReport> {
    let r = rs.rank();
    check(x0.rank() == r && lambda.rank() == r, "rank", || "inputs do not match the root system".into())?;
    check(lambda.positive_support() == fiber.tau && lambda.is_dominant(), "lambda-type", || {
        format!("cocharacter {:?} does not define the parabolic of type {}", lambda.0, fiber.tau)
    })?;
    for (k, m) in action.maps.iter().enumerate() {
        check(m.linear.rows == r, "action-rank", || format!("map {k} has the wrong size"))?;
        check(super::is_isometry(metric, &m.linear), "isometry", || format!("map {k} is not an isometry"))?;
    }
    let pinned = fiber.pinned()?;
    let free: Vec<usize> = fiber.tau.iter().collect();
    let mut base = vec![Rat::zero(); r];
    for (j, v) in &pinned {
        base[*j] = v.clone();
    }
    for (k, m) in action.maps.iter().enumerate() {
        let img = m.apply(&base);
        let ok_point = pinned.iter().all(|(j, v)| img[*j] == *v);
        let ok_dirs = free.iter().all(|&i| pinned.keys().all(|&j| m.linear.get(j, i).is_zero()));
        check(ok_point && ok_dirs, "fiber-stability", || format!("map {k} does not preserve the fibre"))?;
    }
    let start = x0.exact_log()?;
    let orbit = action.orbit(&start);
    let center = circumcenter(&orbit, metric)?;
    let x_tilde = project_to_fiber(&center, fiber, metric)?;
    let x_tilde_fixed = action.fixes(&x_tilde);

    let lam: Vec<Rat> = lambda.0.iter().map(|&l| rat(l)).collect();
    let q = x0.q.clone();
    let trace: Vec<Vec<Rat>> = (0..=steps)
        .map(|n| x_tilde.iter().zip(&lam).map(|(v, l)| v + l * rat(n as i64)).collect())
        .collect();
    let flow_fixed = trace.iter().all(|v| action.fixes(v));

    let xt = ApartmentPoint::from_log(&q, &x_tilde);
    let small = steps.min(3);
    let mut semigroup_law = true;
    for m in 0..=small {
        for n in 0..=small {
            let a = cochar_flow(rs, &cochar_flow(rs, &xt, lambda, m)?, lambda, n)?;
            semigroup_law &= a == cochar_flow(rs, &xt, lambda, m + n)?;
        }
    }
    for (n, v) in trace.iter().enumerate() {
        semigroup_law &= ApartmentPoint::from_log(&q, v) == cochar_flow(rs, &xt, lambda, n as u64)?;
    }
    let decay = decay_holds(rs, &xt, lambda, steps)?;

    let limit = limit_point(rs, &xt, lambda)?;
    let limit_is_target = limit == fiber.target;
    let limit_log = limit.exact_log()?;
    let limit_fixed_on_boundary = action.maps.iter().all(|m| {
        let mut z = vec![Rat::zero(); r];
        for (j, v) in &limit_log {
            z[*j] = v.clone();
        }
        let img = m.apply(&z);
        limit_log.iter().all(|(j, v)| img[*j] == *v)
    });

    Ok(PipelineReport {
        orbit,
        circumcenter: center,
        x_tilde,
        trace,
        limit,
        x_tilde_fixed,
        flow_fixed,
        limit_is_target,
        limit_fixed_on_boundary,
        semigroup_law,
        decay,
    })
}

/// Along the flow, values on `-beta` strictly decrease when
/// `<beta, lambda> > 0` and stay constant on the Levi.
pub fn decay_holds(rs: &RootSystem, x: &ApartmentPoint, lambda: &Coweight, steps: u64) -> Result<bool> {
    use std::cmp::Ordering;
    let pts: Vec<ApartmentPoint> = (0..=steps).map(|n| cochar_flow(rs, x, lambda, n)).collect::<Result<_>>()?;
    for beta in rs.positive_roots() {
        let pairing = rs.pairing(beta, lambda)?;
        let vals: Vec<MultVal> = pts.iter().map(|p| p.value_on(&beta.neg())).collect();
        for w in vals.windows(2) {
            let ord = w[1].cmp_value(&w[0]);
            let want = match pairing.signum() {
                1 => Ordering::Less,
                0 => Ordering::Equal,
                _ => Ordering::Greater,
            };
            if ord != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Integer matrix of a lattice automorphism given as rows.
pub fn automorphism_from_rows(rs: &RootSystem, rows: &[Vec<i64>]) -> Result<LatticeAutomorphism> {
    let m = IntMatrix::try_from_rows(rows).ok_or_else(|| contract!("automorphism matrix must be square"))?;
    LatticeAutomorphism::new(rs, m)
}
