//! Minimal enclosing balls under a quadratic form, via Welzl's
//! move-to-front recursion. Generic over exact rationals and `f64`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Signed, Zero};

use crate::linalg::RatMatrix;
use crate::rational::{rat_to_f64, Rat};

/// The arithmetic needed by the ball routines.
pub trait Scalar: Clone + Debug + PartialOrd + Zero + One + Send + Sync
where
    for<'a> &'a Self: Add<&'a Self, Output = Self> + Sub<&'a Self, Output = Self> + Mul<&'a Self, Output = Self>,
{
    fn div(&self, other: &Self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    /// Exact zero for rationals, a relative tolerance for floats.
    fn negligible(&self, scale: &Self) -> bool;
    fn abs_val(&self) -> Self;
}

impl Scalar for Rat {
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f64 {
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
    fn negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-12 * scale.abs().max(1.0)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball<F> {
    pub center: Vec<F>,
    pub radius_sq: F,
    /// Indices (into the deduplicated input) of the points spanning the ball.
    pub support: Vec<usize>,
}

/// A positive-definite quadratic form in the scalar type.
#[derive(Debug, Clone)]
pub struct Metric<F> {
    pub dim: usize,
    m: Vec<F>,
}

impl<F: Scalar> Metric<F>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    pub fn from_rat(m: &RatMatrix) -> Self {
        assert_eq!(m.rows, m.cols);
        let n = m.rows;
        let data = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| F::from_rat(m.get(i, j))).collect();
        Metric { dim: n, m: data }
    }

    pub fn form(&self, u: &[F], v: &[F]) -> F {
        let mut acc = F::zero();
        for (ui, row) in u.iter().zip(self.m.chunks(self.dim)) {
            if ui.is_zero() {
                continue;
            }
            for (mij, vj) in row.iter().zip(v) {
                acc = &acc + &(&(ui * mij) * vj);
            }
        }
        acc
    }

    pub fn dist_sq(&self, u: &[F], v: &[F]) -> F {
        let d = sub(u, v);
        self.form(&d, &d)
    }
}

fn sub<F: Scalar>(u: &[F], v: &[F]) -> Vec<F>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

/// Solves a square system by Gaussian elimination with partial pivoting;
/// `None` when singular.
fn solve<F: Scalar>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.abs_val())
        .fold(F::zero(), |m, x| if x > m { x } else { m });
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs_val().partial_cmp(&a[j][col].abs_val()).unwrap())?;
        if a[piv][col].negligible(&scale) {
            return None;
        }
        a.swap(piv, col);
        b.swap(piv, col);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].div(&a[col][col]);
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = &*x - &(&f * y);
            }
            let v = &b[r] - &(&f * &b[col]);
            b[r] = v;
        }
    }
    let mut x = vec![F::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for k in r + 1..n {
            acc = &acc - &(&a[r][k] * &x[k]);
        }
        x[r] = acc.div(&a[r][r]);
    }
    Some(x)
}

/// Smallest ball whose boundary passes through every point of `pts`, with
/// centre in their affine hull. Dependent points are dropped greedily first;
/// `None` if the remaining points are not cospherical with the kept ones.
pub fn circumball<F: Scalar>(pts: &[Vec<F>], idx: &[usize], metric: &Metric<F>) -> Option<Ball<F>>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let (&first, rest) = idx.split_first()?;
    let p0 = &pts[first];
    let mut kept = vec![first];
    let mut dirs: Vec<Vec<F>> = Vec::new();
    for &i in rest {
        let d = sub(&pts[i], p0);
        let mut cand = dirs.clone();
        cand.push(d.clone());
        if independent(&cand, metric) {
            dirs = cand;
            kept.push(i);
        }
    }
    let k = dirs.len();
    // 2 <d_a, M (c - p0)> = |d_a|^2 with c - p0 = sum_b t_b d_b.
    let gram: Vec<Vec<F>> =
        (0..k).map(|a| (0..k).map(|b| &(&F::one() + &F::one()) * &metric.form(&dirs[a], &dirs[b])).collect()).collect();
    let rhs: Vec<F> = (0..k).map(|a| metric.form(&dirs[a], &dirs[a])).collect();
    let t = if k == 0 { vec![] } else { solve(gram, rhs)? };
    let mut center = p0.clone();
    for (tb, d) in t.iter().zip(&dirs) {
        for (c, x) in center.iter_mut().zip(d) {
            *c = &*c + &(tb * x);
        }
    }
    let radius_sq = metric.dist_sq(&center, p0);
    for &i in idx {
        let r = metric.dist_sq(&center, &pts[i]);
        if !(&r - &radius_sq).negligible(&radius_sq) {
            return None;
        }
    }
    Some(Ball { center, radius_sq, support: kept })
}

fn independent<F: Scalar>(dirs: &[Vec<F>], metric: &Metric<F>) -> bool
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let k = dirs.len();
    let gram: Vec<Vec<F>> = (0..k).map(|a| (0..k).map(|b| metric.form(&dirs[a], &dirs[b])).collect()).collect();
    solve(gram, vec![F::zero(); k]).is_some()
}

fn contains<F: Scalar>(ball: &Ball<F>, p: &[F], metric: &Metric<F>) -> bool
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let d = metric.dist_sq(&ball.center, p);
    d <= ball.radius_sq || (&d - &ball.radius_sq).negligible(&ball.radius_sq)
}

/// Removes repeated points, keeping first occurrences.
pub fn dedup<F: Scalar>(points: &[Vec<F>], metric: &Metric<F>) -> Vec<Vec<F>>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let mut out: Vec<Vec<F>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| metric.dist_sq(p, q).negligible(&F::one())) {
            out.push(p.clone());
        }
    }
    out
}

/// Minimal enclosing ball of `points` (deduplicated; `support` indexes the
/// deduplicated list returned alongside).
pub fn min_ball<F: Scalar>(points: &[Vec<F>], metric: &Metric<F>) -> Option<(Ball<F>, Vec<Vec<F>>)>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let pts = dedup(points, metric);
    if pts.is_empty() {
        return None;
    }
    let order: Vec<usize> = (0..pts.len()).collect();
    let ball = welzl(&pts, &order, &mut Vec::new(), metric);
    Some((ball, pts))
}

fn welzl<F: Scalar>(pts: &[Vec<F>], todo: &[usize], boundary: &mut Vec<usize>, metric: &Metric<F>) -> Ball<F>
where
    for<'a> &'a F: Add<&'a F, Output = F> + Sub<&'a F, Output = F> + Mul<&'a F, Output = F>,
{
    let mut ball = if boundary.is_empty() {
        Ball { center: pts[todo.first().copied().unwrap_or(0)].clone(), radius_sq: F::zero(), support: vec![] }
    } else {
        circumball(pts, boundary, metric).expect("boundary points are cospherical")
    };
    if boundary.is_empty() && !todo.is_empty() {
        ball.support = vec![todo[0]];
    }
    if boundary.len() > metric.dim {
        return ball;
    }
    for (k, &i) in todo.iter().enumerate() {
        if contains(&ball, &pts[i], metric) {
            continue;
        }
        boundary.push(i);
        ball = welzl(pts, &todo[..k], boundary, metric);
        boundary.pop();
    }
    ball
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn single_and_pair() {
        let m = Metric::<Rat>::from_rat(&RatMatrix::identity(2));
        let (b, _) = min_ball(&[v(&[1, 2])], &m).unwrap();
        assert_eq!(b.center, v(&[1, 2]));
        assert_eq!(b.radius_sq, rat(0));
        let (b, _) = min_ball(&[v(&[0, 0]), v(&[2, 1])], &m).unwrap();
        assert_eq!(b.center, vec![rat(1), ratio(1, 2)]);
    }

    #[test]
    fn obtuse_triangle_uses_long_edge() {
        let m = Metric::<Rat>::from_rat(&RatMatrix::identity(2));
        let (b, _) = min_ball(&[v(&[0, 0]), v(&[4, 0]), v(&[2, 1])], &m).unwrap();
        assert_eq!(b.center, v(&[2, 0]));
        assert_eq!(b.radius_sq, rat(4));
    }

    #[test]
    fn cospherical_square() {
        let m = Metric::<Rat>::from_rat(&RatMatrix::identity(2));
        let pts = [v(&[0, 0]), v(&[2, 0]), v(&[0, 2]), v(&[2, 2]), v(&[1, 1])];
        let (b, _) = min_ball(&pts, &m).unwrap();
        assert_eq!(b.center, v(&[1, 1]));
        assert_eq!(b.radius_sq, rat(2));
    }

    #[test]
    fn float_agrees_with_exact() {
        let m = Metric::<f64>::from_rat(&RatMatrix::identity(3));
        let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        // The origin lies inside the ball through e1, e2, e3.
        let (b, _) = min_ball(&pts, &m).unwrap();
        for c in &b.center {
            assert!((c - 1.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(b.support.len(), 3);
    }
}
