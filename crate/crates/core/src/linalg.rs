//! Small dense linear algebra: field elimination over any [`Scalar`] and
//! integer Smith/Hermite normal forms over `i128`.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Determinant by Gaussian elimination with nonzero pivoting.
    pub fn determinant(&self) -> F {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_negligible()) else {
                return F::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det = det * piv.clone();
            let inv = piv.inv().expect("nonzero pivot");
            for r in c + 1..n {
                let f = a[(r, c)].clone() * inv.clone();
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = a[(r, k)].clone() - f.clone() * a[(c, k)].clone();
                    a[(r, k)] = v;
                }
            }
        }
        det
    }

    /// Determinants of the leading `k x k` blocks, `k = 1..=n`.
    pub fn leading_minors(&self) -> Vec<F> {
        assert!(self.is_square());
        (1..=self.rows)
            .map(|k| {
                let sub = Matrix::from_rows(
                    (0..k).map(|i| self.row(i)[..k].to_vec()).collect(),
                );
                sub.determinant()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_negligible()) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            for k in 0..self.cols {
                let v = self[(r, k)].clone() * inv.clone();
                self[(r, k)] = v;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for k in 0..self.cols {
                    let v = self[(i, k)].clone() - f.clone() * self[(r, k)].clone();
                    self[(i, k)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Solves `self * x = b`; `None` when inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(F::zero(), |s, (x, y)| s + x.clone() * y.clone())
}

/// Greedy maximal independent subset of `vectors`, in the given order.
pub fn independent_subset<F: Scalar>(vectors: &[Vec<F>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<F>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut trial = rows.clone();
        trial.push(v.clone());
        if Matrix::from_rows(trial.clone()).rank() == trial.len() {
            rows = trial;
            chosen.push(i);
        }
    }
    chosen
}

// ---------------------------------------------------------------------------
// Integer normal forms

pub type IntMatrix = Vec<Vec<i128>>;

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

/// Smith normal form `U * A * V = D` with `D` diagonal, `d_i | d_{i+1}`,
/// nonnegative entries and unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i128> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i]).collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut u = int_identity(n);
    let mut v = int_identity(m);

    let swap_rows = |x: &mut IntMatrix, i: usize, j: usize| x.swap(i, j);
    let swap_cols = |x: &mut IntMatrix, i: usize, j: usize| {
        for row in x.iter_mut() {
            row.swap(i, j);
        }
    };

    for t in 0..n.min(m) {
        loop {
            // pivot: smallest nonzero absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if d[i][j] != 0
                        && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, d, v);
            };
            swap_rows(&mut d, t, pi);
            swap_rows(&mut u, t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..n {
                let q = d[i][t].div_euclid(d[t][t]);
                if q != 0 {
                    for k in 0..m {
                        d[i][k] -= q * d[t][k];
                    }
                    for k in 0..n {
                        u[i][k] -= q * u[t][k];
                    }
                }
                clean &= d[i][t] == 0;
            }
            for j in t + 1..m {
                let q = d[t][j].div_euclid(d[t][t]);
                if q != 0 {
                    for k in 0..n {
                        d[k][j] -= q * d[k][t];
                    }
                    for k in 0..m {
                        v[k][j] -= q * v[k][t];
                    }
                }
                clean &= d[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let piv = d[t][t];
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..m).map(move |j| (i, j)))
                .find(|&(i, j)| d[i][j] % piv != 0);
            match bad {
                Some((i, _)) => {
                    for k in 0..m {
                        d[t][k] += d[i][k];
                    }
                    for k in 0..n {
                        u[t][k] += u[i][k];
                    }
                }
                None => break,
            }
        }
    }
    finish(u, d, v)
}

fn finish(mut u: IntMatrix, d: IntMatrix, v: IntMatrix) -> Smith {
    let mut d = d;
    for i in 0..d.len().min(d.first().map_or(0, |r| r.len())) {
        if d[i][i] < 0 {
            for x in d[i].iter_mut() {
                *x = -*x;
            }
            for x in u[i].iter_mut() {
                *x = -*x;
            }
        }
    }
    Smith { u, d, v }
}

/// Row Hermite normal form of the integer row span; zero rows are dropped.
pub fn hermite_normal_form(rows: &IntMatrix) -> IntMatrix {
    let mut h: IntMatrix = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let m = h.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..m {
        if r == h.len() {
            break;
        }
        loop {
            let piv = (r..h.len())
                .filter(|&i| h[i][c] != 0)
                .min_by_key(|&i| h[i][c].abs());
            let Some(p) = piv else { break };
            h.swap(r, p);
            let mut done = true;
            for i in r + 1..h.len() {
                let q = h[i][c].div_euclid(h[r][c]);
                if q != 0 {
                    for k in 0..m {
                        h[i][k] -= q * h[r][k];
                    }
                }
                done &= h[i][c] == 0;
            }
            if done {
                break;
            }
        }
        if r < h.len() && h[r][c] != 0 {
            if h[r][c] < 0 {
                for x in h[r].iter_mut() {
                    *x = -*x;
                }
            }
            for i in 0..r {
                let q = h[i][c].div_euclid(h[r][c]);
                if q != 0 {
                    for k in 0..m {
                        h[i][k] -= q * h[r][k];
                    }
                }
            }
            r += 1;
        }
    }
    h.truncate(r);
    h
}

pub fn int_determinant(a: &IntMatrix) -> i128 {
    let q: Matrix<crate::scalar::Rational> = Matrix::from_rows(
        a.iter()
            .map(|r| r.iter().map(|&x| crate::scalar::Rational::from_integer(x)).collect())
            .collect(),
    );
    if a.is_empty() {
        return 1;
    }
    *q.determinant().numer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn qm(rows: &[&[i128]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn determinant_and_minors() {
        let m = qm(&[&[2, 1], &[1, 3]]);
        assert_eq!(m.determinant(), rat(5, 1));
        assert_eq!(m.leading_minors(), vec![rat(2, 1), rat(5, 1)]);
        assert_eq!(qm(&[&[0, 1], &[1, 0]]).determinant(), rat(-1, 1));
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = qm(&[&[1, 1], &[1, -1]]);
        let x = m.solve(&[rat(3, 1), rat(1, 1)]).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(1, 1)]);
        let s = qm(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[rat(1, 1), rat(3, 1)]).is_none());
    }

    #[test]
    fn smith_form_reconstructs() {
        let a: IntMatrix = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a);
        assert_eq!(int_mul(&int_mul(&s.u, &a), &s.v), s.d);
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
    }

    #[test]
    fn hermite_form_of_redundant_rows() {
        let h = hermite_normal_form(&vec![vec![2, 0], vec![0, 3], vec![2, 3], vec![4, 6]]);
        assert_eq!(h, vec![vec![2, 0], vec![0, 3]]);
        let h = hermite_normal_form(&vec![vec![3, 1], vec![1, 1]]);
        assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn independent_subset_skips_dependent() {
        let v = vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(2, 1), rat(0, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ];
        assert_eq!(independent_subset(&v), vec![0, 2]);
    }
}
