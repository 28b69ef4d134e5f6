//! Flowing a vertex towards the boundary along a diagonal cocharacter.

use super::descent::in_base_image;
use super::lattice::{hermite, normalized_divisors, Lattice, LatticeClass, Ring};
use super::quad::QuadElt;
use crate::error::{contract, Result};

/// The reduced diagonal cocharacter that flows the barb to the boundary.
pub const BARB_FLOW_LAMBDA: [i64; 3] = [1, -2, 1];

/// Columns `w^-1 e1 + e3`, `e2`, `w e3`.
pub fn barb_lattice(p: i64) -> Lattice {
    let z = QuadElt::zero(p);
    let one = QuadElt::one(p);
    let cols = vec![
        vec![QuadElt::w_pow(p, -1), z.clone(), one.clone()],
        vec![z.clone(), one, z.clone()],
        vec![z.clone(), z, QuadElt::w(p)],
    ];
    Lattice::from_columns(Ring::Ramified, p, &cols).expect("square")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowStep {
    pub class: LatticeClass,
    pub sigma_fixed: bool,
    pub in_base_image: bool,
    /// Normalized elementary divisors relative to the starting class.
    pub divisors: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeviData {
    /// Coordinates where the cocharacter is maximal.
    pub block: Vec<usize>,
    /// Class of `L ∩ span(e_i : i in block)`.
    pub class: LatticeClass,
    pub sigma_fixed: bool,
    pub in_base_image: bool,
    /// The block class is the same at every step.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowReport {
    pub lambda: Vec<i64>,
    pub steps: Vec<FlowStep>,
    pub levi: LeviData,
}

impl FlowReport {
    pub fn all_fixed(&self) -> bool {
        self.steps.iter().all(|s| s.sigma_fixed)
    }
}

/// `L_n = diag(w^{-c_1}, ..., w^{-c_n})^n L_0` for `n = 0..=steps`.
pub fn boundary_flow(start: &LatticeClass, lambda: &[i64], steps: usize) -> Result<FlowReport> {
    if start.ring != Ring::Ramified {
        return Err(contract!("flow runs in the building over k'"));
    }
    if lambda.len() != start.n {
        return Err(contract!("cocharacter has {} entries, expected {}", lambda.len(), start.n));
    }
    if lambda.iter().sum::<i64>() != 0 {
        return Err(contract!("cocharacter {lambda:?} does not sum to zero"));
    }
    let (n, p) = (start.n, start.p);
    let mut g = vec![QuadElt::zero(p); n * n];
    for (i, c) in lambda.iter().enumerate() {
        g[i * n + i] = QuadElt::w_pow(p, -c);
    }
    let max = *lambda.iter().max().expect("nonempty");
    let block: Vec<usize> = (0..n).filter(|&i| lambda[i] == max).collect();

    let mut lat = start.lattice();
    let mut out = Vec::with_capacity(steps + 1);
    let mut levis = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            lat = lat.left_mul(&g);
        }
        let class = lat.class()?;
        levis.push(block_class(&lat, &block)?);
        out.push(FlowStep {
            sigma_fixed: class.is_sigma_fixed(),
            in_base_image: in_base_image(&class)?,
            divisors: normalized_divisors(start, &class),
            class,
        });
    }
    let class = levis[0].clone();
    let stable = levis.iter().all(|c| *c == class);
    let levi = LeviData {
        block,
        sigma_fixed: class.is_sigma_fixed(),
        in_base_image: in_base_image(&class)?,
        stable,
        class,
    };
    Ok(FlowReport { lambda: lambda.to_vec(), steps: out, levi })
}

/// Class of `L ∩ span(e_i : i in block)` as a lattice of rank `block.len()`.
fn block_class(l: &Lattice, block: &[usize]) -> Result<LatticeClass> {
    let n = l.n;
    let rest: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
    let order: Vec<usize> = rest.iter().chain(block).copied().collect();
    let gens: Vec<Vec<QuadElt>> =
        l.columns().into_iter().map(|c| order.iter().map(|&i| c[i].clone()).collect()).collect();
    let h = hermite(l.ring, l.p, n, gens)?;
    let k = rest.len();
    let cols: Vec<Vec<QuadElt>> = (k..n).map(|j| (k..n).map(|i| h.class.get(i, j).clone()).collect()).collect();
    Lattice::from_columns(l.ring, l.p, &cols)?.class()
}
