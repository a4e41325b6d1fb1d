//! Exact dense linear algebra over a DifferenceField.

use crate::exactfield::{DifferenceField, Scalar};

pub type Mat = Vec<Vec<Scalar>>;

fn weight(x: &Scalar) -> usize {
    match x {
        Scalar::R(r) => r.num.terms.len() + r.den.terms.len() + 4 * (r.num.total_degree() + r.den.total_degree()) as usize,
        _ => 0,
    }
}

/// Reduced row echelon form in place; zero rows dropped. Returns pivot columns.
pub fn rref(k: &DifferenceField, m: &mut Mat) -> Vec<usize> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let mut best: Option<(usize, usize)> = None;
        for i in r..m.len() {
            if !k.is_zero(&m[i][c]) {
                let w = weight(&m[i][c]);
                if best.map_or(true, |(_, bw)| w < bw) {
                    best = Some((i, w));
                    if w == 0 {
                        break;
                    }
                }
            }
        }
        let Some((piv, _)) = best else { continue };
        m.swap(r, piv);
        let inv = k.inv(&m[r][c]).expect("nonzero pivot");
        if !k.is_one(&inv) {
            for j in c..ncols {
                m[r][j] = k.mul(&m[r][j], &inv);
            }
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || k.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                if !k.is_zero(&prow[j]) {
                    row[j] = k.sub(&row[j], &k.mul(&f, &prow[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(k: &DifferenceField, m: &Mat) -> usize {
    let mut a = m.clone();
    rref(k, &mut a).len()
}

/// Basis of {x : m x = 0}.
pub fn kernel(k: &DifferenceField, m: &Mat, ncols: usize) -> Vec<Vec<Scalar>> {
    let mut a = m.clone();
    let piv = rref(k, &mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![k.zero(); ncols];
            v[f] = k.one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = k.neg(&a[r][f]);
            }
            v
        })
        .collect()
}

/// Some solution of m x = b.
pub fn solve(k: &DifferenceField, m: &Mat, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut a: Mat = m.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    let piv = rref(k, &mut a);
    if piv.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![k.zero(); ncols];
    for (r, &pc) in piv.iter().enumerate() {
        x[pc] = a[r][ncols].clone();
    }
    Some(x)
}

pub fn mat_vec(k: &DifferenceField, m: &Mat, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            let mut s = k.zero();
            for (a, b) in row.iter().zip(v) {
                if !k.is_zero(a) && !k.is_zero(b) {
                    s = k.add(&s, &k.mul(a, b));
                }
            }
            s
        })
        .collect()
}

pub fn mat_mul(k: &DifferenceField, a: &Mat, b: &Mat) -> Mat {
    let bt = transpose(b);
    let cols = bt.len();
    a.iter()
        .map(|row| (0..cols).map(|j| dot(k, row, &bt[j])).collect())
        .collect()
}

pub fn dot(k: &DifferenceField, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut s = k.zero();
    for (x, y) in a.iter().zip(b) {
        if !k.is_zero(x) && !k.is_zero(y) {
            s = k.add(&s, &k.mul(x, y));
        }
    }
    s
}

pub fn transpose(m: &Mat) -> Mat {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity(k: &DifferenceField, n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect()
}

pub fn zeros(k: &DifferenceField, r: usize, c: usize) -> Mat {
    vec![vec![k.zero(); c]; r]
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(k: &DifferenceField, cols: &[Vec<Scalar>], nrows: usize) -> Mat {
    (0..nrows).map(|i| cols.iter().map(|c| c.get(i).cloned().unwrap_or_else(|| k.zero())).collect()).collect()
}

pub fn inverse(k: &DifferenceField, m: &Mat) -> Option<Mat> {
    let n = m.len();
    let mut a: Mat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            r
        })
        .collect();
    let piv = rref(k, &mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(k: &DifferenceField, m: &Mat) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut d = k.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !k.is_zero(&a[i][c])) else { return k.zero() };
        if p != c {
            a.swap(p, c);
            d = k.neg(&d);
        }
        d = k.mul(&d, &a[c][c]);
        let inv = k.inv(&a[c][c]).unwrap();
        for i in c + 1..n {
            if k.is_zero(&a[i][c]) {
                continue;
            }
            let f = k.mul(&a[i][c], &inv);
            for j in c..n {
                a[i][j] = k.sub(&a[i][j], &k.mul(&f, &a[c][j]));
            }
        }
    }
    d
}

/// Subspace of k^n kept as a reduced echelon basis (canonical).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    pub n: usize,
    pub rows: Mat,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, rows: vec![], pivots: vec![] }
    }

    pub fn full(k: &DifferenceField, n: usize) -> Self {
        Subspace { n, rows: identity(k, n), pivots: (0..n).collect() }
    }

    pub fn span(k: &DifferenceField, n: usize, vs: &[Vec<Scalar>]) -> Self {
        let mut m: Mat = vs.to_vec();
        let pivots = rref(k, &mut m);
        Subspace { n, rows: m, pivots }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// v minus its projection along the pivot structure; zero iff v lies in the subspace.
    pub fn reduce(&self, k: &DifferenceField, v: &[Scalar]) -> Vec<Scalar> {
        let mut r = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if k.is_zero(&r[pc]) {
                continue;
            }
            let f = r[pc].clone();
            for j in pc..self.n {
                if !k.is_zero(&row[j]) {
                    r[j] = k.sub(&r[j], &k.mul(&f, &row[j]));
                }
            }
        }
        r
    }

    pub fn contains(&self, k: &DifferenceField, v: &[Scalar]) -> bool {
        self.reduce(k, v).iter().all(|x| k.is_zero(x))
    }

    /// Coordinates with respect to `rows`, if contained.
    pub fn coords(&self, k: &DifferenceField, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(k, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Insert a vector; returns true when the dimension grew.
    pub fn insert(&mut self, k: &DifferenceField, v: &[Scalar]) -> bool {
        let r = self.reduce(k, v);
        if r.iter().all(|x| k.is_zero(x)) {
            return false;
        }
        let pc = r.iter().position(|x| !k.is_zero(x)).unwrap();
        let inv = k.inv(&r[pc]).unwrap();
        let r: Vec<Scalar> = r.iter().map(|x| k.mul(x, &inv)).collect();
        for row in self.rows.iter_mut() {
            if !k.is_zero(&row[pc]) {
                let f = row[pc].clone();
                for j in pc..self.n {
                    if !k.is_zero(&r[j]) {
                        row[j] = k.sub(&row[j], &k.mul(&f, &r[j]));
                    }
                }
            }
        }
        let at = self.pivots.iter().position(|&q| q > pc).unwrap_or(self.pivots.len());
        self.rows.insert(at, r);
        self.pivots.insert(at, pc);
        true
    }

    pub fn is_subspace_of(&self, k: &DifferenceField, o: &Subspace) -> bool {
        self.rows.iter().all(|v| o.contains(k, v))
    }

    pub fn sum(&self, k: &DifferenceField, o: &Subspace) -> Subspace {
        let mut vs = self.rows.clone();
        vs.extend(o.rows.iter().cloned());
        Subspace::span(k, self.n, &vs)
    }

    pub fn intersect(&self, k: &DifferenceField, o: &Subspace) -> Subspace {
        let (a, b) = (self.dim(), o.dim());
        if a == 0 || b == 0 {
            return Subspace::zero(self.n);
        }
        // solve sum x_i u_i - sum y_j w_j = 0
        let mut cols = self.rows.clone();
        cols.extend(o.rows.iter().map(|w| w.iter().map(|x| k.neg(x)).collect()));
        let m = from_columns(k, &cols, self.n);
        let ker = kernel(k, &m, a + b);
        let vs: Vec<Vec<Scalar>> = ker
            .iter()
            .map(|x| {
                let mut v = vec![k.zero(); self.n];
                for (i, u) in self.rows.iter().enumerate() {
                    if k.is_zero(&x[i]) {
                        continue;
                    }
                    for j in 0..self.n {
                        v[j] = k.add(&v[j], &k.mul(&x[i], &u[j]));
                    }
                }
                v
            })
            .collect();
        Subspace::span(k, self.n, &vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_inverse_over_f5() {
        let k = DifferenceField::prime(5, 0).unwrap();
        let e = |v: i64| k.from_i64(v);
        let m = vec![vec![e(1), e(2)], vec![e(2), e(4)]];
        assert_eq!(rank(&k, &m), 1);
        let ker = kernel(&k, &m, 2);
        assert_eq!(ker.len(), 1);
        assert!(mat_vec(&k, &m, &ker[0]).iter().all(|x| k.is_zero(x)));
        let m2 = vec![vec![e(1), e(2)], vec![e(3), e(4)]];
        let inv = inverse(&k, &m2).unwrap();
        assert_eq!(mat_mul(&k, &m2, &inv), identity(&k, 2));
        assert_eq!(det(&k, &m2), e(-2));
    }

    #[test]
    fn intersection_dimension() {
        let k = DifferenceField::rationals();
        let e = |v: i64| k.from_i64(v);
        let u = Subspace::span(&k, 3, &[vec![e(1), e(0), e(0)], vec![e(0), e(1), e(0)]]);
        let w = Subspace::span(&k, 3, &[vec![e(0), e(1), e(0)], vec![e(0), e(0), e(1)]]);
        let i = u.intersect(&k, &w);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&k, &[e(0), e(3), e(0)]));
    }
}
