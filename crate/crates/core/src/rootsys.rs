//! Root systems, Weyl groups, cocharacters and the twisted Galois action on
//! Dynkin bases.
//!
//! The group is taken adjoint: the character lattice has the simple roots as
//! a basis, so weights are integer vectors in the simple-root basis and
//! coweights are stored by their (integer) values on the simple roots.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{config, contract, Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::rational::{rat, Rat};

pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    G,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CartanType::A => "A",
            CartanType::B => "B",
            CartanType::C => "C",
            CartanType::D => "D",
            CartanType::G => "G",
        };
        f.write_str(s)
    }
}

/// A subset of the simple roots, stored as a bitmask over their indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSet(pub u32);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn full(rank: usize) -> Self {
        NodeSet((1u32 << rank) - 1)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(idx: I) -> Self {
        NodeSet(idx.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn complement(self, rank: usize) -> NodeSet {
        NodeSet(!self.0 & Self::full(rank).0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// All subsets of `{0, .., rank-1}` in increasing bitmask order.
    pub fn all(rank: usize) -> impl Iterator<Item = NodeSet> {
        (0..(1u32 << rank)).map(NodeSet)
    }

    /// Labels `a1, a2, ..` (1-based) used in every textual format.
    pub fn labels(self) -> Vec<String> {
        self.iter().map(|i| format!("a{}", i + 1)).collect()
    }

    pub fn from_labels<S: AsRef<str>>(labels: &[S], rank: usize) -> Result<Self> {
        let mut set = NodeSet::EMPTY;
        for l in labels {
            set.insert(parse_node_label(l.as_ref(), rank)?);
        }
        Ok(set)
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

pub fn parse_node_label(s: &str, rank: usize) -> Result<usize> {
    let s = s.trim();
    let idx: usize = s
        .strip_prefix('a')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad simple root label {s:?}")))?;
    if idx == 0 || idx > rank {
        return Err(Error::Parse(format!("simple root {s:?} out of range for rank {rank}")));
    }
    Ok(idx - 1)
}

/// A character in the simple-root basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Weight(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.0.iter().all(|&c| c >= 0)
    }

    /// Simple roots occurring with nonzero coefficient.
    pub fn support(&self) -> NodeSet {
        NodeSet::from_indices(self.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i))
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Weight {
    /// `a1+a2`, `-2a1-a2`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if c.abs() != 1 {
                out.push_str(&c.abs().to_string());
            }
            out.push_str(&format!("a{}", i + 1));
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Parses the textual form produced by `Display` (rank must be supplied).
pub fn parse_weight(s: &str, rank: usize) -> Result<Weight> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad root expression {s:?}"));
    let mut coords = vec![0i64; rank];
    if s == "0" {
        return Ok(Weight(coords));
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        } else if i != 0 {
            return Err(bad());
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef: i64 = if i == start { 1 } else { s[start..i].parse().map_err(|_| bad())? };
        if i >= bytes.len() || bytes[i] != b'a' {
            return Err(bad());
        }
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let idx: usize = s[start..i].parse().map_err(|_| bad())?;
        if idx == 0 || idx > rank {
            return Err(bad());
        }
        coords[idx - 1] += sign * coef;
    }
    Ok(Weight(coords))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoweightBasis {
    FundamentalCoweight,
    SimpleCoroot,
}

/// A cocharacter of the adjoint torus, stored by its values on the simple
/// roots (its coordinates in the fundamental-coweight basis).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(rank: usize) -> Self {
        Coweight(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, k: i64) -> Coweight {
        Coweight(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Simple roots on which the cocharacter is strictly positive.
    pub fn positive_support(&self) -> NodeSet {
        NodeSet::from_indices(self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i))
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub word: Vec<usize>,
    /// Action on the root lattice, simple-root coordinates, column convention.
    pub matrix: IntMatrix,
}

impl WeylElement {
    pub fn apply(&self, w: &Weight) -> Weight {
        Weight(self.matrix.apply(&w.0))
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// An automorphism of the character lattice preserving the roots, e.g. the
/// action of a Galois generator. Column `j` of `matrix` is the image of the
/// `j`-th simple root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeAutomorphism {
    pub matrix: IntMatrix,
    pub order: u32,
}

impl LatticeAutomorphism {
    pub fn identity(rank: usize) -> Self {
        LatticeAutomorphism { matrix: IntMatrix::identity(rank), order: 1 }
    }

    /// Validates that `matrix` permutes the roots of `rs` and has finite order.
    pub fn new(rs: &RootSystem, matrix: IntMatrix) -> Result<Self> {
        if matrix.n != rs.rank() {
            return Err(contract!("automorphism has size {}, root system rank {}", matrix.n, rs.rank()));
        }
        let roots: HashSet<Weight> = rs.roots().into_iter().collect();
        for r in &roots {
            let img = Weight(matrix.apply(&r.0));
            if !roots.contains(&img) {
                return Err(contract!("matrix sends root {r} to {img}, which is not a root"));
            }
        }
        let id = IntMatrix::identity(rs.rank());
        let mut acc = matrix.clone();
        let mut order = 1u32;
        while acc != id {
            acc = acc.mul(&matrix);
            order += 1;
            if order > 10_000 {
                return Err(contract!("automorphism has no finite order"));
            }
        }
        Ok(LatticeAutomorphism { matrix, order })
    }

    pub fn from_permutation(rs: &RootSystem, perm: &[usize]) -> Result<Self> {
        let n = rs.rank();
        let mut m = IntMatrix::zeros(n);
        for (j, &pj) in perm.iter().enumerate() {
            m.set(pj, j, 1);
        }
        Self::new(rs, m)
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        Weight(self.matrix.apply(&w.0))
    }

    /// Named generators: `swap` (the order-2 diagram automorphism of
    /// A_n, n >= 2, and of D_n, exchanging the two short legs), `triality`
    /// (D4, a1 -> a3 -> a4 -> a1), `neg` (minus the identity).
    pub fn preset(rs: &RootSystem, name: &str) -> Result<Self> {
        let n = rs.rank();
        let mut perm: Vec<usize> = (0..n).collect();
        match (name, rs.cartan_type()) {
            ("swap", CartanType::A) if n >= 2 => perm.reverse(),
            ("swap", CartanType::D) => perm.swap(n - 2, n - 1),
            ("triality", CartanType::D) if n == 4 => perm = vec![2, 1, 3, 0],
            ("neg", _) => {
                let mut m = IntMatrix::zeros(n);
                for i in 0..n {
                    m.set(i, i, -1);
                }
                return Self::new(rs, m);
            }
            _ => return Err(config!("no automorphism {name:?} for {rs}")),
        }
        Self::from_permutation(rs, &perm)
    }

    pub fn compose(&self, rs: &RootSystem, other: &LatticeAutomorphism) -> Result<Self> {
        Self::new(rs, self.matrix.mul(&other.matrix))
    }

    pub fn inverse(&self) -> LatticeAutomorphism {
        let mut inv = IntMatrix::identity(self.matrix.n);
        for _ in 1..self.order {
            inv = inv.mul(&self.matrix);
        }
        LatticeAutomorphism { matrix: inv, order: self.order }
    }
}

/// Partition of all roots by the sign of their pairing with a cocharacter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootPartition {
    pub levi: Vec<Weight>,
    pub unip_plus: Vec<Weight>,
    pub unip_minus: Vec<Weight>,
}

#[derive(Debug)]
pub struct RootSystem {
    cartan_type: CartanType,
    rank: usize,
    /// Symmetric invariant form on the simple roots, integer normalised.
    gram: IntMatrix,
    /// `cartan[i][j] = <alpha_i, alpha_j^vee>`.
    cartan: IntMatrix,
    positive: Vec<Weight>,
    weyl: OnceLock<Vec<WeylElement>>,
}

impl Clone for RootSystem {
    fn clone(&self) -> Self {
        RootSystem {
            cartan_type: self.cartan_type,
            rank: self.rank,
            gram: self.gram.clone(),
            cartan: self.cartan.clone(),
            positive: self.positive.clone(),
            weyl: OnceLock::new(),
        }
    }
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.cartan_type == other.cartan_type && self.rank == other.rank
    }
}

impl Eq for RootSystem {}

impl FromStr for RootSystem {
    type Err = Error;

    /// Parses specs such as `"A2"`, `"B3"`, `"D4"`, `"G2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let t = chars.next().ok_or_else(|| config!("empty root system spec"))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| config!("malformed root system spec {s:?}"))?;
        RootSystem::build(&t.to_string(), rank)
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.cartan_type, self.rank)
    }
}

fn gram_matrix(t: CartanType, n: usize) -> IntMatrix {
    let mut g = IntMatrix::zeros(n);
    for i in 0..n {
        g.set(i, i, 2);
        if i + 1 < n {
            g.set(i, i + 1, -1);
            g.set(i + 1, i, -1);
        }
    }
    match t {
        CartanType::A => {}
        CartanType::B => g.set(n - 1, n - 1, 1),
        CartanType::C => {
            g.set(n - 1, n - 1, 4);
            g.set(n - 2, n - 1, -2);
            g.set(n - 1, n - 2, -2);
        }
        CartanType::D => {
            // alpha_n = e_{n-1} + e_n hangs off alpha_{n-2}.
            g.set(n - 2, n - 1, 0);
            g.set(n - 1, n - 2, 0);
            g.set(n - 3, n - 1, -1);
            g.set(n - 1, n - 3, -1);
        }
        CartanType::G => {
            g.set(1, 1, 6);
            g.set(0, 1, -3);
            g.set(1, 0, -3);
        }
    }
    g
}

impl RootSystem {
    pub fn build(type_name: &str, rank: usize) -> Result<Self> {
        let t = match type_name.trim() {
            "A" => CartanType::A,
            "B" => CartanType::B,
            "C" => CartanType::C,
            "D" => CartanType::D,
            "G" => CartanType::G,
            other => return Err(config!("unsupported root system type {other:?}")),
        };
        let ok = match t {
            CartanType::A => rank >= 1,
            CartanType::B | CartanType::C => rank >= 2,
            CartanType::D => rank >= 3,
            CartanType::G => rank == 2,
        };
        if !ok || rank > MAX_RANK {
            return Err(config!("rank {rank} not supported for type {t}"));
        }
        let gram = gram_matrix(t, rank);
        let mut cartan = IntMatrix::zeros(rank);
        for i in 0..rank {
            for j in 0..rank {
                let num = 2 * gram.get(i, j);
                let den = gram.get(j, j);
                debug_assert_eq!(num % den, 0);
                cartan.set(i, j, num / den);
            }
        }
        let mut rs = RootSystem {
            cartan_type: t,
            rank,
            gram,
            cartan,
            positive: Vec::new(),
            weyl: OnceLock::new(),
        };
        rs.positive = rs.close_positive_roots();
        Ok(rs)
    }

    /// Positive roots by the root-string closure: `beta + alpha_j` is a root
    /// iff the `alpha_j`-string through `beta` extends upward, i.e.
    /// `r - <beta, alpha_j^vee> > 0` where `r` counts downward steps.
    fn close_positive_roots(&self) -> Vec<Weight> {
        let n = self.rank;
        let mut known: HashSet<Weight> = HashSet::new();
        let mut all = Vec::new();
        let mut layer: Vec<Weight> = (0..n).map(|i| Weight::simple(n, i)).collect();
        while !layer.is_empty() {
            for r in &layer {
                known.insert(r.clone());
            }
            all.extend(layer.iter().cloned());
            let mut next = Vec::new();
            for beta in &layer {
                for j in 0..n {
                    if *beta == Weight::simple(n, j) {
                        continue;
                    }
                    let step = Weight::simple(n, j);
                    let mut down = 0i64;
                    let mut probe = beta.add(&step.neg());
                    while known.contains(&probe) {
                        down += 1;
                        probe = probe.add(&step.neg());
                    }
                    let up = down - self.pairing_coroot(beta, j);
                    if up > 0 {
                        let gamma = beta.add(&step);
                        if !known.contains(&gamma) && !next.contains(&gamma) {
                            next.push(gamma);
                        }
                    }
                }
            }
            next.sort();
            layer = next;
        }
        all
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn simple_roots(&self) -> Vec<Weight> {
        (0..self.rank).map(|i| Weight::simple(self.rank, i)).collect()
    }

    pub fn positive_roots(&self) -> &[Weight] {
        &self.positive
    }

    /// Positive roots followed by their negatives.
    pub fn roots(&self) -> Vec<Weight> {
        let mut v = self.positive.clone();
        v.extend(self.positive.iter().map(Weight::neg));
        v
    }

    pub fn is_root(&self, w: &Weight) -> bool {
        self.positive.contains(w) || self.positive.contains(&w.neg())
    }

    /// `<beta, alpha_j^vee>`.
    pub fn pairing_coroot(&self, beta: &Weight, j: usize) -> i64 {
        (0..self.rank).map(|i| beta.0[i] * self.cartan.get(i, j)).sum()
    }

    /// Canonical pairing of a character with a cocharacter.
    pub fn pairing(&self, chi: &Weight, lambda: &Coweight) -> Result<i64> {
        if chi.rank() != self.rank || lambda.rank() != self.rank {
            return Err(contract!(
                "pairing of rank-{} weight with rank-{} coweight in rank {}",
                chi.rank(),
                lambda.rank(),
                self.rank
            ));
        }
        Ok(chi.0.iter().zip(&lambda.0).map(|(a, b)| a * b).sum())
    }

    /// Builds a coweight from simple-coroot coordinates, checking that it
    /// pairs integrally with the whole character lattice.
    pub fn coweight_from_coroots(&self, coords: &[Rat]) -> Result<Coweight> {
        if coords.len() != self.rank {
            return Err(contract!("expected {} coroot coordinates", self.rank));
        }
        let mut vals = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let v: Rat = (0..self.rank).map(|j| &coords[j] * rat(self.cartan.get(i, j))).sum();
            if !v.is_integer() {
                return Err(contract!("coweight pairs to {v} with a{}: not in the coweight lattice", i + 1));
            }
            vals.push(i64::try_from(v.to_integer()).map_err(|_| contract!("coweight too large"))?);
        }
        Ok(Coweight(vals))
    }

    pub fn coweight_coords(&self, lambda: &Coweight, basis: CoweightBasis) -> Vec<Rat> {
        match basis {
            CoweightBasis::FundamentalCoweight => lambda.0.iter().map(|&c| rat(c)).collect(),
            CoweightBasis::SimpleCoroot => {
                let c = RatMatrix::from_int(&self.cartan);
                let inv = c.inverse().expect("Cartan matrix is invertible");
                let l: Vec<Rat> = lambda.0.iter().map(|&c| rat(c)).collect();
                inv.apply(&l)
            }
        }
    }

    /// The cocharacter pairing to 1 on `tau` and 0 on the other simple roots.
    pub fn lambda_tau(&self, tau: NodeSet) -> Coweight {
        Coweight((0..self.rank).map(|i| i64::from(tau.contains(i))).collect())
    }

    pub fn simple_reflection(&self, j: usize) -> IntMatrix {
        let n = self.rank;
        let mut m = IntMatrix::identity(n);
        for l in 0..n {
            let v = m.get(j, l) - self.cartan.get(l, j);
            m.set(j, l, v);
        }
        m
    }

    /// All Weyl group elements, generated breadth-first over words with
    /// matrix deduplication; shortlex-minimal words.
    pub fn weyl_group(&self) -> &[WeylElement] {
        self.weyl.get_or_init(|| {
            let gens: Vec<IntMatrix> = (0..self.rank).map(|j| self.simple_reflection(j)).collect();
            let id = WeylElement { word: vec![], matrix: IntMatrix::identity(self.rank) };
            let mut seen: HashMap<IntMatrix, usize> = HashMap::new();
            let mut out = vec![id.clone()];
            seen.insert(id.matrix.clone(), 0);
            let mut queue = VecDeque::from([0usize]);
            while let Some(k) = queue.pop_front() {
                for (j, g) in gens.iter().enumerate() {
                    let m = out[k].matrix.mul(g);
                    if seen.contains_key(&m) {
                        continue;
                    }
                    let mut word = out[k].word.clone();
                    word.push(j);
                    seen.insert(m.clone(), out.len());
                    out.push(WeylElement { word, matrix: m });
                    queue.push_back(out.len() - 1);
                }
            }
            out
        })
    }

    /// The unique Weyl element mapping `image_basis` (as a set) onto the
    /// simple roots.
    pub fn weyl_element_to_basis(&self, image_basis: &[Weight]) -> Result<WeylElement> {
        if image_basis.len() != self.rank || !image_basis.iter().all(|b| self.is_root(b)) {
            return Err(contract!("input is not a set of {} roots", self.rank));
        }
        let target: BTreeSet<Weight> = self.simple_roots().into_iter().collect();
        self.weyl_group()
            .iter()
            .find(|w| image_basis.iter().map(|b| w.apply(b)).collect::<BTreeSet<_>>() == target)
            .cloned()
            .ok_or_else(|| contract!("input is not a basis of the root system"))
    }

    pub fn longest_element(&self) -> WeylElement {
        let neg: Vec<Weight> = self.simple_roots().iter().map(Weight::neg).collect();
        self.weyl_element_to_basis(&neg).expect("-Delta is a basis")
    }

    /// `w_gamma`: the Weyl element with `w_gamma(gamma(Delta)) = Delta`.
    pub fn twisting_element(&self, gamma: &LatticeAutomorphism) -> Result<WeylElement> {
        let img: Vec<Weight> = self.simple_roots().iter().map(|a| gamma.apply(a)).collect();
        self.weyl_element_to_basis(&img)
    }

    /// `gamma * chi = w_gamma(gamma(chi))`.
    pub fn star_action(&self, gamma: &LatticeAutomorphism, chi: &Weight) -> Result<Weight> {
        let w = self.twisting_element(gamma)?;
        Ok(w.apply(&gamma.apply(chi)))
    }

    /// The permutation of simple-root indices induced by the star action.
    pub fn star_permutation(&self, gamma: &LatticeAutomorphism) -> Result<Vec<usize>> {
        let w = self.twisting_element(gamma)?;
        Ok((0..self.rank)
            .map(|i| {
                let img = w.apply(&gamma.apply(&Weight::simple(self.rank, i)));
                img.0.iter().position(|&c| c == 1).expect("star action permutes Delta")
            })
            .collect())
    }

    pub fn star_on_set(&self, gamma: &LatticeAutomorphism, tau: NodeSet) -> Result<NodeSet> {
        let perm = self.star_permutation(gamma)?;
        Ok(NodeSet::from_indices(tau.iter().map(|i| perm[i])))
    }

    /// Orbits of the group generated by `gens` acting on Delta via the star
    /// action.
    pub fn star_orbits(&self, gens: &[LatticeAutomorphism]) -> Result<Vec<NodeSet>> {
        let perms: Vec<Vec<usize>> = gens.iter().map(|g| self.star_permutation(g)).collect::<Result<_>>()?;
        let mut seen = NodeSet::EMPTY;
        let mut orbits = Vec::new();
        for i in 0..self.rank {
            if seen.contains(i) {
                continue;
            }
            let mut orbit = NodeSet::from_indices([i]);
            let mut stack = vec![i];
            while let Some(k) = stack.pop() {
                for p in &perms {
                    if !orbit.contains(p[k]) {
                        orbit.insert(p[k]);
                        stack.push(p[k]);
                    }
                }
            }
            seen = seen.union(orbit);
            orbits.push(orbit);
        }
        Ok(orbits)
    }

    /// `(-w_0)(tau)`: the type of the opposite parabolic.
    pub fn opposition_involution(&self, tau: NodeSet) -> NodeSet {
        let w0 = self.longest_element();
        NodeSet::from_indices(tau.iter().map(|i| {
            let img = w0.apply(&Weight::simple(self.rank, i)).neg();
            img.0.iter().position(|&c| c == 1).expect("-w0 permutes Delta")
        }))
    }

    pub fn parabolic_root_partition(&self, lambda: &Coweight) -> Result<RootPartition> {
        let mut part = RootPartition { levi: vec![], unip_plus: vec![], unip_minus: vec![] };
        for r in self.roots() {
            match self.pairing(&r, lambda)?.signum() {
                0 => part.levi.push(r),
                1 => part.unip_plus.push(r),
                _ => part.unip_minus.push(r),
            }
        }
        Ok(part)
    }

    /// Permutations of Delta preserving the Cartan matrix, as lattice
    /// automorphisms (the full diagram automorphism group).
    pub fn diagram_automorphisms(&self) -> Vec<LatticeAutomorphism> {
        let n = self.rank;
        let mut out = Vec::new();
        for perm in permutations(n) {
            let keeps = (0..n).all(|i| (0..n).all(|j| self.cartan.get(perm[i], perm[j]) == self.cartan.get(i, j)));
            if keeps {
                out.push(LatticeAutomorphism::from_permutation(self, &perm).expect("diagram automorphism"));
            }
        }
        out
    }

    /// Roots whose support lies in `nodes`: the subsystem they generate.
    pub fn subsystem(&self, nodes: NodeSet) -> Vec<Weight> {
        self.roots().into_iter().filter(|r| r.support().is_subset(nodes)).collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
