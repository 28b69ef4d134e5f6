//! Max-times evaluation of big-cell polynomials at pairs of apartment points.
//!
//! A polynomial in the coordinates `xi_alpha` (`alpha` outside the Levi
//! roots) is recorded only through the norms of its coefficients, which is
//! all the seminorm sees.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::apartment::{ApartmentPoint, CompactifiedPoint};
use crate::error::{contract, Error, Result};
use crate::multval::MultVal;
use crate::rational::Rat;
use crate::rootsys::{NodeSet, RootSystem, Weight};

/// A nonnegative value: zero or an exact `c * q^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormValue(pub Option<MultVal>);

impl NormValue {
    pub fn zero() -> Self {
        NormValue(None)
    }

    pub fn from_rat(q: &Rat, r: &Rat) -> Self {
        if r.is_zero() {
            NormValue(None)
        } else {
            NormValue(Some(MultVal::from_rat(q, r.clone()).expect("positive")))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    pub fn mul(&self, other: &NormValue) -> NormValue {
        match (&self.0, &other.0) {
            (Some(a), Some(b)) => NormValue(Some(a.mul(b))),
            _ => NormValue(None),
        }
    }

    pub fn cmp_value(&self, other: &NormValue) -> Ordering {
        match (&self.0, &other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp_value(b),
        }
    }

    pub fn max(self, other: NormValue) -> NormValue {
        if other.cmp_value(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn to_rat(&self) -> Option<Rat> {
        match &self.0 {
            None => Some(Rat::zero()),
            Some(v) => v.to_rat(),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => f.write_str("0"),
            Some(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    /// Signed roots with positive exponents.
    pub exps: BTreeMap<Weight, u32>,
    pub norm: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BigCellPoly {
    pub monomials: Vec<Monomial>,
}

impl BigCellPoly {
    pub fn new(monomials: Vec<Monomial>) -> Result<Self> {
        if monomials.iter().any(|m| m.norm.is_negative()) {
            return Err(contract!("coefficient norms must be nonnegative"));
        }
        Ok(BigCellPoly { monomials })
    }

    pub fn monomial(exps: BTreeMap<Weight, u32>, norm: Rat) -> Self {
        BigCellPoly { monomials: vec![Monomial { exps, norm }] }
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.iter().all(|m| m.norm.is_zero())
    }

    /// Coefficient norms of the sum, bounded by the ultrametric inequality.
    pub fn add(&self, other: &BigCellPoly) -> BigCellPoly {
        let mut acc: BTreeMap<BTreeMap<Weight, u32>, Rat> = BTreeMap::new();
        for m in self.monomials.iter().chain(&other.monomials) {
            let e = acc.entry(m.exps.clone()).or_insert_with(Rat::zero);
            if m.norm > *e {
                *e = m.norm.clone();
            }
        }
        BigCellPoly { monomials: acc.into_iter().map(|(exps, norm)| Monomial { exps, norm }).collect() }
    }

    /// Max-times convolution of coefficient norms.
    pub fn mul(&self, other: &BigCellPoly) -> BigCellPoly {
        let mut acc: BTreeMap<BTreeMap<Weight, u32>, Rat> = BTreeMap::new();
        for a in &self.monomials {
            for b in &other.monomials {
                let mut exps = a.exps.clone();
                for (r, k) in &b.exps {
                    *exps.entry(r.clone()).or_default() += k;
                }
                let n = &a.norm * &b.norm;
                let e = acc.entry(exps).or_insert_with(Rat::zero);
                if n > *e {
                    *e = n;
                }
            }
        }
        BigCellPoly { monomials: acc.into_iter().map(|(exps, norm)| Monomial { exps, norm }).collect() }
    }
}

/// The coordinate ring of a big cell: roots outside `levi` carry variables.
#[derive(Debug, Clone)]
pub struct BigCell {
    pub rs: RootSystem,
    pub levi: BTreeSet<Weight>,
}

impl BigCell {
    /// Levi with no roots, i.e. the cell of a Borel subgroup.
    pub fn split(rs: RootSystem) -> Self {
        BigCell { rs, levi: BTreeSet::new() }
    }

    /// Levi generated by the simple roots in `nodes`.
    pub fn standard(rs: RootSystem, nodes: NodeSet) -> Self {
        let levi = rs.subsystem(nodes).into_iter().collect();
        BigCell { rs, levi }
    }

    /// Levi made of the roots restricting to zero.
    pub fn from_grouping(rs: RootSystem, grouping: &RelativeGrouping) -> Result<Self> {
        let mut levi = BTreeSet::new();
        for r in rs.roots() {
            if grouping.restrict(&r)?.is_zero() {
                levi.insert(r);
            }
        }
        Ok(BigCell { rs, levi })
    }

    pub fn check_poly(&self, f: &BigCellPoly) -> Result<()> {
        for m in &f.monomials {
            for r in m.exps.keys() {
                if !self.rs.is_root(r) || self.levi.contains(r) {
                    return Err(contract!("{r} is not a root outside the Levi"));
                }
            }
        }
        Ok(())
    }
}

/// `|f|(Theta(x, y))`: the max over monomials of
/// `|f_nu| prod_{alpha < 0} <alpha, y>^nu prod_{alpha > 0} <alpha, x>^nu`,
/// with `0^0 = 1` on boundary points.
pub fn theta_eval(cell: &BigCell, f: &BigCellPoly, x: &ApartmentPoint, y: &CompactifiedPoint) -> Result<NormValue> {
    cell.check_poly(f)?;
    if x.q != y.q {
        return Err(contract!("points use different bases q"));
    }
    if x.rank() != cell.rs.rank() {
        return Err(contract!("point rank does not match the root system"));
    }
    let mut best = NormValue::zero();
    for m in &f.monomials {
        let mut v = NormValue::from_rat(&x.q, &m.norm);
        for (r, &k) in &m.exps {
            if k == 0 {
                continue;
            }
            let base = if r.is_positive() {
                NormValue(Some(x.value_on(r)))
            } else {
                NormValue(y.value_on_negative(&r.neg()))
            };
            let p = match base.0 {
                Some(b) => NormValue(Some(b.pow(k as i64))),
                None => NormValue::zero(),
            };
            v = v.mul(&p);
        }
        best = best.max(v);
    }
    Ok(best)
}

pub fn gauss_norm(f: &BigCellPoly) -> Rat {
    f.monomials.iter().map(|m| m.norm.clone()).fold(Rat::zero(), |a, b| if b > a { b } else { a })
}

/// Restriction of absolute roots to the maximal split torus, as an integer
/// matrix acting on simple-root coordinates (rows are relative coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeGrouping {
    pub rows: Vec<Vec<i64>>,
}

impl RelativeGrouping {
    pub fn identity(rank: usize) -> Self {
        RelativeGrouping { rows: (0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect() }
    }

    pub fn restrict(&self, chi: &Weight) -> Result<Weight> {
        if self.rows.iter().any(|r| r.len() != chi.rank()) {
            return Err(contract!("grouping matrix does not match the rank"));
        }
        Ok(Weight(self.rows.iter().map(|r| r.iter().zip(&chi.0).map(|(a, b)| a * b).sum()).collect()))
    }
}

/// A linear form on a root group `U_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub relative_root: Weight,
    pub coefficients: BTreeMap<Weight, Rat>,
}

impl LinearForm {
    pub fn as_poly(&self) -> BigCellPoly {
        BigCellPoly {
            monomials: self
                .coefficients
                .iter()
                .map(|(r, c)| Monomial { exps: BTreeMap::from([(r.clone(), 1)]), norm: c.clone() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub root: Weight,
    pub form: LinearForm,
    pub value_y: NormValue,
    pub value_y_prime: NormValue,
}

/// A linear form on some `U_a` whose seminorms at `Theta(x, y)` and
/// `Theta(x, y')` differ. Candidates are the negative roots of the stratum's
/// Levi outside the cell's Levi, simple roots first.
pub fn separating_form(
    cell: &BigCell,
    grouping: &RelativeGrouping,
    x: &ApartmentPoint,
    y: &CompactifiedPoint,
    y_prime: &CompactifiedPoint,
) -> Result<Separation> {
    if y.tau != y_prime.tau {
        return Err(contract!("points lie in different strata {} and {}", y.tau, y_prime.tau));
    }
    if y == y_prime {
        return Err(contract!("no separator exists: the points coincide"));
    }
    let mut candidates: Vec<Weight> = cell
        .rs
        .positive_roots()
        .iter()
        .filter(|b| b.support().intersection(y.tau).is_empty())
        .map(Weight::neg)
        .filter(|a| !cell.levi.contains(a))
        .collect();
    candidates.sort_by_key(|a| (-a.height(), a.clone()));
    for alpha in candidates {
        let beta = alpha.neg();
        if y.value_on_negative(&beta) == y_prime.value_on_negative(&beta) {
            continue;
        }
        let a = grouping.restrict(&alpha)?;
        let fibre: BTreeMap<Weight, Rat> = cell
            .rs
            .roots()
            .into_iter()
            .filter(|r| !r.is_positive() && !cell.levi.contains(r))
            .filter(|r| r.support().intersection(y.tau).is_empty())
            .filter(|r| grouping.restrict(r).map(|w| w == a).unwrap_or(false))
            .map(|r| (r, Rat::from_integer(1.into())))
            .collect();
        let uniform = LinearForm { relative_root: a.clone(), coefficients: fibre };
        let single = LinearForm {
            relative_root: a.clone(),
            coefficients: BTreeMap::from([(alpha.clone(), Rat::from_integer(1.into()))]),
        };
        for form in [uniform, single] {
            let poly = form.as_poly();
            let v = theta_eval(cell, &poly, x, y)?;
            let w = theta_eval(cell, &poly, x, y_prime)?;
            if v.cmp_value(&w) != Ordering::Equal {
                return Ok(Separation { root: alpha, form, value_y: v, value_y_prime: w });
            }
        }
    }
    Err(Error::Domain("no root of the stratum Levi separates the points".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomsReport {
    pub submultiplicative: bool,
    pub ultrametric: bool,
    pub multiplicative_on_monomials: bool,
}

impl AxiomsReport {
    pub fn all(&self) -> bool {
        self.submultiplicative && self.ultrametric && self.multiplicative_on_monomials
    }
}

pub fn seminorm_axioms_check(
    cell: &BigCell,
    f: &BigCellPoly,
    g: &BigCellPoly,
    x: &ApartmentPoint,
    y: &CompactifiedPoint,
) -> Result<AxiomsReport> {
    let ev = |p: &BigCellPoly| theta_eval(cell, p, x, y);
    let (vf, vg) = (ev(f)?, ev(g)?);
    let submultiplicative = ev(&f.mul(g))?.cmp_value(&vf.mul(&vg)) != Ordering::Greater;
    let ultrametric = ev(&f.add(g))?.cmp_value(&vf.clone().max(vg.clone())) != Ordering::Greater;
    let mut multiplicative_on_monomials = true;
    for a in &f.monomials {
        for b in &g.monomials {
            let pa = BigCellPoly { monomials: vec![a.clone()] };
            let pb = BigCellPoly { monomials: vec![b.clone()] };
            let prod = ev(&pa.mul(&pb))?;
            multiplicative_on_monomials &= prod.cmp_value(&ev(&pa)?.mul(&ev(&pb)?)) == Ordering::Equal;
        }
    }
    Ok(AxiomsReport { submultiplicative, ultrametric, multiplicative_on_monomials })
}
