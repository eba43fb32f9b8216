//! Dense exact linear algebra: rational row reduction plus integer Hermite and Smith forms.
//!
//! Matrices are row lists. Integer reductions never leave ℤ.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{IVec, Int, QVec, Rat};

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

pub fn rank_i(rows: &[IVec], ncols: usize) -> usize {
    let q: Vec<QVec> = rows.iter().map(|r| crate::arith::to_q(r)).collect();
    rank(&q, ncols)
}

/// Basis of `{x : row · x = 0 for every row}`.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (row, &p) in m.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Coefficients `λ` with `Σ λ_i basis_i = v`, or `None` when `v` is outside the row span.
pub fn solve_left(basis: &[QVec], v: &[Rat]) -> Option<QVec> {
    let n = v.len();
    let k = basis.len();
    // columns of the system are the basis vectors; augment with v
    let rows: Vec<QVec> = (0..n)
        .map(|i| {
            let mut r: QVec = basis.iter().map(|b| b[i].clone()).collect();
            r.push(v[i].clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rat::zero(); k];
    for (row, &p) in m.iter().zip(&pivots) {
        x[p] = row[k].clone();
    }
    Some(x)
}

pub fn det(m: &[QVec]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0].iter_mut().zip(&top[c]).skip(c) {
                *x -= &f * y;
            }
        }
    }
    d
}

pub fn det_i(m: &[IVec]) -> Int {
    let q: Vec<QVec> = m.iter().map(|r| crate::arith::to_q(r)).collect();
    det(&q).to_integer()
}

pub fn inverse(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let (red, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec_left(x: &[Rat], m: &[QVec]) -> QVec {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut out = vec![Rat::zero(); ncols];
    for (c, row) in x.iter().zip(m) {
        if c.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o += c * y;
        }
    }
    out
}

pub fn mat_vec_left_i(x: &[Int], m: &[IVec]) -> IVec {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut out = vec![Int::zero(); ncols];
    for (c, row) in x.iter().zip(m) {
        if c.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o += c * y;
        }
    }
    out
}

/// Row-style Hermite normal form of the ℤ-span of `rows`: echelon, positive pivots,
/// entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    let mut m: Vec<IVec> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        loop {
            let best = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by(|&i, &j| m[i][c].abs().cmp(&m[j][c].abs()));
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pr = m[r].clone();
        for row in m.iter_mut().take(r) {
            let q = row[c].div_floor(&pr[c]);
            if !q.is_zero() {
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    m
}

/// Smith normal form `u · a · v = diag(d)` with unimodular `u` (m×m) and `v` (n×n).
/// `d` holds the nonzero invariant factors, each dividing the next.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Vec<IVec>,
    pub d: Vec<Int>,
    pub v: Vec<IVec>,
}

fn identity_i(n: usize) -> Vec<IVec> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect()
}

fn row_axpy(m: &mut [IVec], dst: usize, q: &Int, src: usize) {
    let s = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(&s) {
        *x -= q * y;
    }
}

fn col_axpy(m: &mut [IVec], dst: usize, q: &Int, src: usize) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] -= q * y;
    }
}

fn col_swap(m: &mut [IVec], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith(a: &[IVec], ncols: usize) -> Smith {
    let nrows = a.len();
    let mut m: Vec<IVec> = a.to_vec();
    let mut u = identity_i(nrows);
    let mut v = identity_i(ncols);
    let mut d = Vec::new();
    for t in 0..nrows.min(ncols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nrows {
                for j in t..ncols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(t, bi);
            u.swap(t, bi);
            col_swap(&mut m, t, bj);
            col_swap(&mut v, t, bj);
            let mut clean = true;
            for i in t + 1..nrows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, &q, t);
                row_axpy(&mut u, i, &q, t);
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..ncols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_axpy(&mut m, j, &q, t);
                col_axpy(&mut v, j, &q, t);
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let piv = m[t][t].clone();
            let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !m[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let q = -Int::one();
                    row_axpy(&mut m, t, &q, i);
                    row_axpy(&mut u, t, &q, i);
                }
                None => break,
            }
        }
        if t >= nrows || m[t][t].is_zero() {
            break;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        d.push(m[t][t].clone());
    }
    Smith { u, d, v }
}

pub fn mat_mul_i(a: &[IVec], b: &[IVec]) -> Vec<IVec> {
    a.iter().map(|row| mat_vec_left_i(row, b)).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}
