//! Lattices over the valuation rings of `k = Q_p` and `k' = Q_p(sqrt p)`,
//! their Hermite normal forms and homothety classes.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::quad::QuadElt;
use crate::error::{contract, Result};
use crate::rational::{residue, Rat};

/// Which valuation ring the lattice is a module over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// `Z_p`, uniformizer `p`. Entries must be rational.
    Base,
    /// `Z_p[w]`, uniformizer `w`.
    Ramified,
}

impl Ring {
    pub fn val(self, x: &QuadElt) -> Option<i64> {
        match self {
            Ring::Base => crate::rational::vp(&x.a, x.p),
            Ring::Ramified => x.val(),
        }
    }

    pub fn uniformizer_pow(self, p: i64, d: i64) -> QuadElt {
        match self {
            Ring::Base => QuadElt::w_pow(p, 2 * d),
            Ring::Ramified => QuadElt::w_pow(p, d),
        }
    }

    /// Canonical representative of an integral `x` modulo `pi^d`:
    /// over `Z_p` the residue in `[0, p^d)`; over `Z_p[w]` the pair
    /// `a mod p^ceil(d/2)`, `b mod p^floor(d/2)`.
    pub fn representative(self, x: &QuadElt, d: i64) -> QuadElt {
        let p = x.p;
        let pw = |e: i64| num_traits::pow(BigInt::from(p), e as usize);
        let red = |r: &Rat, e: i64| -> Rat {
            if e == 0 {
                return Rat::zero();
            }
            Rat::from_integer(residue(r, &pw(e)).expect("integral entry"))
        };
        match self {
            Ring::Base => QuadElt::from_rat(red(&x.a, d), p),
            Ring::Ramified => QuadElt::new(red(&x.a, (d + 1) / 2), red(&x.b, d / 2), p),
        }
    }
}

/// A full-rank lattice given by the columns of `basis` (row-major `n x n`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub ring: Ring,
    pub p: i64,
    pub n: usize,
    pub basis: Vec<QuadElt>,
}

/// Homothety class of a lattice, stored as its canonical basis.
///
/// The representative lies in `O^n` but not in `pi O^n`; the basis is lower
/// triangular with pivots `pi^d` and every entry below a pivot row reduced
/// by [`Ring::representative`] modulo that row's pivot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    pub ring: Ring,
    pub p: i64,
    pub n: usize,
    pub basis: Vec<QuadElt>,
}

/// A vertex of the building over `k'`.
pub type VertexClass = LatticeClass;

/// Exact span: the lattice equals `pi^shift` times the class representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HermiteForm {
    pub shift: i64,
    pub class: LatticeClass,
}

impl Lattice {
    pub fn new(ring: Ring, p: i64, n: usize, basis: Vec<QuadElt>) -> Result<Self> {
        if basis.len() != n * n {
            return Err(contract!("basis has {} entries, expected {}", basis.len(), n * n));
        }
        if ring == Ring::Base && basis.iter().any(|x| !x.is_rational()) {
            return Err(contract!("lattice over Z_p with irrational entries"));
        }
        if basis.iter().any(|x| x.p != p) {
            return Err(contract!("entries over mixed primes"));
        }
        Ok(Lattice { ring, p, n, basis })
    }

    pub fn from_rows(ring: Ring, p: i64, rows: &[Vec<QuadElt>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(contract!("basis must be square"));
        }
        Self::new(ring, p, n, rows.iter().flatten().cloned().collect())
    }

    pub fn standard(ring: Ring, p: i64, n: usize) -> Self {
        Self::diagonal(ring, p, &vec![0; n])
    }

    /// `diag(pi^d_1, ..., pi^d_n)`.
    pub fn diagonal(ring: Ring, p: i64, d: &[i64]) -> Self {
        let n = d.len();
        let mut basis = vec![QuadElt::zero(p); n * n];
        for (i, &di) in d.iter().enumerate() {
            basis[i * n + i] = ring.uniformizer_pow(p, di);
        }
        Lattice { ring, p, n, basis }
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadElt {
        &self.basis[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<QuadElt> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<QuadElt>> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn from_columns(ring: Ring, p: i64, cols: &[Vec<QuadElt>]) -> Result<Self> {
        let n = cols.len();
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for c in cols {
                basis.push(c.get(i).cloned().ok_or_else(|| contract!("ragged columns"))?);
            }
        }
        Self::new(ring, p, n, basis)
    }

    pub fn scale(&self, s: &QuadElt) -> Self {
        Lattice { basis: self.basis.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    /// `g L` for a matrix `g` given row-major.
    pub fn left_mul(&self, g: &[QuadElt]) -> Self {
        Lattice { basis: mat_mul(g, &self.basis, self.n), ..self.clone() }
    }

    pub fn sigma(&self) -> Self {
        Lattice { basis: self.basis.iter().map(QuadElt::sigma).collect(), ..self.clone() }
    }

    pub fn det(&self) -> QuadElt {
        det(&self.basis, self.n, self.p)
    }

    pub fn hermite(&self) -> Result<HermiteForm> {
        hermite(self.ring, self.p, self.n, self.columns())
    }

    pub fn class(&self) -> Result<LatticeClass> {
        Ok(self.hermite()?.class)
    }

    /// The same matrix read over the other ring (tensoring up when going
    /// from `Base` to `Ramified`).
    pub fn with_ring(&self, ring: Ring) -> Result<Self> {
        Self::new(ring, self.p, self.n, self.basis.clone())
    }
}

impl LatticeClass {
    pub fn lattice(&self) -> Lattice {
        Lattice { ring: self.ring, p: self.p, n: self.n, basis: self.basis.clone() }
    }

    pub fn standard(ring: Ring, p: i64, n: usize) -> Self {
        Lattice::standard(ring, p, n).class().expect("standard lattice")
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadElt {
        &self.basis[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<QuadElt>> {
        self.basis.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Valuations of the pivots.
    pub fn diagonal_valuations(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.ring.val(self.get(i, i)).expect("pivot")).collect()
    }

    pub fn galois_image(&self) -> LatticeClass {
        self.lattice().sigma().class().expect("sigma preserves rank")
    }

    pub fn is_sigma_fixed(&self) -> bool {
        self.galois_image() == *self
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

fn mat_mul(a: &[QuadElt], b: &[QuadElt], n: usize) -> Vec<QuadElt> {
    let p = a[0].p;
    let mut out = vec![QuadElt::zero(p); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let t = aik * &b[k * n + j];
                out[i * n + j] = &out[i * n + j] + &t;
            }
        }
    }
    out
}

/// Determinant by cofactor expansion along the first row (`n <= 4` here).
pub fn det(m: &[QuadElt], n: usize, p: i64) -> QuadElt {
    match n {
        0 => QuadElt::one(p),
        1 => m[0].clone(),
        _ => {
            let mut acc = QuadElt::zero(p);
            for j in 0..n {
                if m[j].is_zero() {
                    continue;
                }
                let minor: Vec<QuadElt> = (1..n)
                    .flat_map(|i| (0..n).filter(move |&c| c != j).map(move |c| (i, c)))
                    .map(|(i, c)| m[i * n + c].clone())
                    .collect();
                let t = &m[j] * &det(&minor, n - 1, p);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Hermite form of the lattice spanned by `gens` (columns of length `n`).
/// Fails if the span does not have full rank.
pub fn hermite(ring: Ring, p: i64, n: usize, mut gens: Vec<Vec<QuadElt>>) -> Result<HermiteForm> {
    if gens.iter().any(|c| c.len() != n) {
        return Err(contract!("generator of wrong length"));
    }
    let shift = gens
        .iter()
        .flatten()
        .filter_map(|x| ring.val(x))
        .min()
        .ok_or_else(|| contract!("singular lattice: all generators vanish"))?;
    if shift != 0 {
        let s = ring.uniformizer_pow(p, -shift);
        for c in gens.iter_mut() {
            for x in c.iter_mut() {
                *x = &*x * &s;
            }
        }
    }
    let mut pivots = Vec::with_capacity(n);
    for i in 0..n {
        // pivot: minimal valuation in row i among the remaining columns
        let best = (i..gens.len())
            .filter_map(|c| ring.val(&gens[c][i]).map(|v| (v, c)))
            .min()
            .ok_or_else(|| contract!("singular lattice: rank {i} < {n}"))?;
        let (d, c) = best;
        gens.swap(i, c);
        let pi_d = ring.uniformizer_pow(p, d);
        let unit = gens[i][i].div(&pi_d).expect("nonzero pivot");
        let unit_inv = unit.inv().expect("unit");
        for x in gens[i].iter_mut() {
            *x = &*x * &unit_inv;
        }
        gens[i][i] = pi_d.clone();
        let (head, tail) = gens.split_at_mut(i + 1);
        let piv = &head[i];
        for col in tail.iter_mut() {
            if col[i].is_zero() {
                continue;
            }
            let f = col[i].div(&pi_d).expect("pivot");
            for r in i..n {
                if !piv[r].is_zero() {
                    col[r] = &col[r] - &(&f * &piv[r]);
                }
            }
            debug_assert!(col[i].is_zero());
        }
        pivots.push(d);
    }
    gens.truncate(n);
    // reduce below-pivot entries, top row first so later rows absorb the carry
    for j in 0..n {
        for r in j + 1..n {
            let x = gens[j][r].clone();
            let rep = ring.representative(&x, pivots[r]);
            if rep == x {
                continue;
            }
            let pi_d = ring.uniformizer_pow(p, pivots[r]);
            let f = (&x - &rep).div(&pi_d).expect("pivot");
            let (left, right) = gens.split_at_mut(r);
            let piv = &right[0];
            let col = &mut left[j];
            for k in r..n {
                if !piv[k].is_zero() {
                    col[k] = &col[k] - &(&f * &piv[k]);
                }
            }
            col[r] = rep;
        }
    }
    let mut basis = vec![QuadElt::zero(p); n * n];
    for (j, c) in gens.into_iter().enumerate() {
        for (i, x) in c.into_iter().enumerate() {
            basis[i * n + j] = x;
        }
    }
    Ok(HermiteForm { shift, class: LatticeClass { ring, p, n, basis } })
}

/// Elementary divisors of `m2` relative to `m1`, via determinantal divisors
/// of `m1^{-1} m2`.
pub fn elementary_divisors(m1: &Lattice, m2: &Lattice) -> Result<Vec<i64>> {
    let n = m1.n;
    if m2.n != n || m1.p != m2.p || m1.ring != m2.ring {
        return Err(contract!("lattices live in different spaces"));
    }
    let inv = inverse(&m1.basis, n, m1.p).ok_or_else(|| contract!("singular lattice"))?;
    let x = mat_mul(&inv, &m2.basis, n);
    let ring = m1.ring;
    let mut delta = vec![0i64];
    for k in 1..=n {
        let mut best: Option<i64> = None;
        for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let minor: Vec<QuadElt> =
                    rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).map(|(i, j)| x[i * n + j].clone()).collect();
                if let Some(v) = ring.val(&det(&minor, k, m1.p)) {
                    best = Some(best.map_or(v, |b: i64| b.min(v)));
                }
            }
        }
        delta.push(best.ok_or_else(|| contract!("singular lattice"))?);
    }
    Ok(delta.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Divisors shifted so the smallest is zero.
pub fn normalized_divisors(v1: &LatticeClass, v2: &LatticeClass) -> Vec<i64> {
    let d = elementary_divisors(&v1.lattice(), &v2.lattice()).expect("classes are full rank");
    let m = d[0];
    d.into_iter().map(|x| x - m).collect()
}

/// Vertex distance in the 1-skeleton: `max d_i - min d_i`.
pub fn divisor_distance(v1: &LatticeClass, v2: &LatticeClass) -> u64 {
    let d = normalized_divisors(v1, v2);
    (d[d.len() - 1] - d[0]) as u64
}

pub fn adjacent(v1: &LatticeClass, v2: &LatticeClass) -> bool {
    divisor_distance(v1, v2) == 1
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn inverse(m: &[QuadElt], n: usize, p: i64) -> Option<Vec<QuadElt>> {
    let mut a = m.to_vec();
    let mut inv = vec![QuadElt::zero(p); n * n];
    for i in 0..n {
        inv[i * n + i] = QuadElt::one(p);
    }
    for c in 0..n {
        let r = (c..n).find(|&r| !a[r * n + c].is_zero())?;
        for k in 0..n {
            a.swap(r * n + k, c * n + k);
            inv.swap(r * n + k, c * n + k);
        }
        let s = a[c * n + c].inv()?;
        for k in 0..n {
            a[c * n + k] = &a[c * n + k] * &s;
            inv[c * n + k] = &inv[c * n + k] * &s;
        }
        for r in 0..n {
            if r == c || a[r * n + c].is_zero() {
                continue;
            }
            let f = a[r * n + c].clone();
            for k in 0..n {
                a[r * n + k] = &a[r * n + k] - &(&f * &a[c * n + k]);
                inv[r * n + k] = &inv[r * n + k] - &(&f * &inv[c * n + k]);
            }
        }
    }
    Some(inv)
}

/// Rational entry helper for tests and callers building lattices by hand.
pub fn q(a: i64, p: i64) -> QuadElt {
    QuadElt::from_int(a, p)
}

/// `a + b w` with integer coefficients.
pub fn qw(a: i64, b: i64, p: i64) -> QuadElt {
    QuadElt::new(Rat::from_integer(a.into()), Rat::from_integer(b.into()), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(p: i64, c: &[[QuadElt; 3]]) -> Lattice {
        Lattice::from_columns(Ring::Ramified, p, &c.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Columns `w^-1 e1 + e3`, `e2`, `w e3`.
    pub(crate) fn barb_example(p: i64) -> Lattice {
        let z = q(0, p);
        cols(
            p,
            &[
                [QuadElt::w_pow(p, -1), z.clone(), q(1, p)],
                [z.clone(), q(1, p), z.clone()],
                [z.clone(), z.clone(), QuadElt::w(p)],
            ],
        )
    }

    #[test]
    fn identity_and_scaling() {
        let std = Lattice::standard(Ring::Ramified, 2, 3);
        assert_eq!(std.class().unwrap().lattice(), std);
        let d = Lattice::diagonal(Ring::Ramified, 2, &[-1, 0, 1]).scale(&QuadElt::w(2));
        assert_eq!(d.hermite().unwrap().shift, 0);
        assert_eq!(d.class().unwrap().lattice(), Lattice::diagonal(Ring::Ramified, 2, &[0, 1, 2]));
        assert_eq!(Lattice::diagonal(Ring::Ramified, 2, &[-1, 0, 1]).hermite().unwrap().shift, -1);
    }

    #[test]
    fn barb_canonical_form() {
        for p in [2, 3] {
            let c = barb_example(p).class().unwrap();
            assert_eq!(c.lattice().class().unwrap(), c);
            assert_eq!(c.diagonal_valuations(), vec![0, 1, 2]);
            assert_eq!(elementary_divisors(&barb_example(p), &c.lattice()).unwrap(), vec![1, 1, 1]);
        }
        let c = barb_example(2).class().unwrap();
        assert_eq!(c.to_string(), "[1, 0, 0; 0, w, 0; w, 0, 2]");
        assert!(c.is_sigma_fixed());
        assert!(!barb_example(3).class().unwrap().is_sigma_fixed());
    }

    #[test]
    fn divisors_and_adjacency() {
        let r = Ring::Ramified;
        let s = Lattice::standard(r, 2, 3);
        assert_eq!(elementary_divisors(&s, &s).unwrap(), vec![0, 0, 0]);
        assert_eq!(elementary_divisors(&s, &s.scale(&QuadElt::w(2))).unwrap(), vec![1, 1, 1]);
        let e = Lattice::diagonal(r, 2, &[0, 0, 1]);
        assert_eq!(elementary_divisors(&s, &e).unwrap(), vec![0, 0, 1]);
        let sc = s.class().unwrap();
        assert!(!adjacent(&sc, &sc));
        assert!(adjacent(&sc, &e.class().unwrap()));
        let f = Lattice::diagonal(r, 2, &[0, 1, 2]).class().unwrap();
        assert!(!adjacent(&sc, &f));
        assert_eq!(divisor_distance(&sc, &f), 2);
    }

    #[test]
    fn singular_is_contract_error() {
        let l = Lattice::new(Ring::Ramified, 2, 2, vec![q(1, 2), q(2, 2), q(2, 2), q(4, 2)]).unwrap();
        assert!(l.class().is_err());
        assert!(elementary_divisors(&Lattice::standard(Ring::Ramified, 2, 2), &l).is_err());
    }

    #[test]
    fn base_ring_form() {
        let l = Lattice::from_rows(Ring::Base, 3, &[vec![q(3, 3), q(1, 3)], vec![q(0, 3), q(9, 3)]]).unwrap();
        let h = l.hermite().unwrap();
        assert_eq!(h.shift, 0);
        assert_eq!(h.class.diagonal_valuations().iter().sum::<i64>(), 3);
        assert_eq!(h.class.lattice().hermite().unwrap(), HermiteForm { shift: 0, class: h.class.clone() });
    }
}
