//! Laurent polynomials and matrices in one variable over ℚ, and the splitting of invertible
//! Laurent matrices into `σ θ τ = diag(t^{u_i})` with `σ` over ℚ[t] and `τ` over ℚ[t⁻¹].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, QVec, Rat};
use crate::error::{pre, Error, Result};
use crate::linalg;

/// A finite sum `Σ c_d t^d`; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(Rat::one(), 0)
    }

    pub fn monomial(c: Rat, d: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(d, c);
        }
        LaurentPoly { terms }
    }

    /// `t^d`.
    pub fn t_pow(d: i64) -> Self {
        LaurentPoly::monomial(Rat::one(), d)
    }

    pub fn constant(c: Rat) -> Self {
        LaurentPoly::monomial(c, 0)
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (d, c) in it {
            p.add_term(d, &c);
        }
        p
    }

    fn add_term(&mut self, d: i64, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(d).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn coef(&self, d: i64) -> Rat {
        self.terms.get(&d).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_deg(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_deg(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `Some((c, d))` when the polynomial is the unit `c t^d`.
    pub fn as_unit(&self) -> Option<(Rat, i64)> {
        (self.terms.len() == 1).then(|| {
            let (d, c) = self.terms.iter().next().expect("one term");
            (c.clone(), *d)
        })
    }

    pub fn is_polynomial_in_t(&self) -> bool {
        self.min_deg().is_none_or(|d| d >= 0)
    }

    pub fn is_polynomial_in_t_inv(&self) -> bool {
        self.max_deg().is_none_or(|d| d <= 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (d, c) in &o.terms {
            p.add_term(*d, c);
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(d, x)| (*d, x * c)).collect() }
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(d, c)| (d + k, c.clone())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = LaurentPoly::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &o.terms {
                p.add_term(d1 + d2, &(c1 * c2));
            }
        }
        p
    }

    /// `self / o` when the quotient is a Laurent polynomial.
    pub fn div_exact(&self, o: &Self) -> Option<Self> {
        let (om, oh) = (o.min_deg()?, o.max_deg()?);
        let lead = o.coef(oh);
        let mut rem = self.clone();
        let mut q = LaurentPoly::zero();
        while let Some(rh) = rem.max_deg() {
            if rem.min_deg()? - om > rh - oh {
                return None;
            }
            let c = rem.coef(rh) / &lead;
            let term = LaurentPoly::monomial(c, rh - oh);
            rem = rem.sub(&term.mul(o));
            q = q.add(&term);
        }
        Some(q)
    }

    /// `f(t) ↦ f(t⁻¹)`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(d, c)| (-d, c.clone())).collect() }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let coef = arith::fmt_rat(&a);
            match (*d, a.is_one()) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{coef}t")?,
                (_, true) => write!(f, "t^{d}")?,
                (_, false) => write!(f, "{coef}t^{d}")?,
            }
        }
        Ok(())
    }
}

/// Square matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentMatrix {
    n: usize,
    rows: Vec<Vec<LaurentPoly>>,
}

impl LaurentMatrix {
    pub fn new(rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("Laurent matrix must be square".into()));
        }
        Ok(LaurentMatrix { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        LaurentMatrix::diag(&vec![LaurentPoly::one(); n])
    }

    pub fn diag(d: &[LaurentPoly]) -> Self {
        let n = d.len();
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { LaurentPoly::zero() }).collect()).collect();
        LaurentMatrix { n, rows }
    }

    /// `diag(t^{u_1}, …)`.
    pub fn diag_t(u: &[i64]) -> Self {
        LaurentMatrix::diag(&u.iter().map(|&d| LaurentPoly::t_pow(d)).collect::<Vec<_>>())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<LaurentPoly>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.rows[i][j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(LaurentPoly::zero(), |a, k| a.add(&self.rows[i][k].mul(&o.rows[k][j])))).collect())
            .collect();
        LaurentMatrix { n, rows }
    }

    pub fn scale(&self, p: &LaurentPoly) -> Self {
        LaurentMatrix { n: self.n, rows: self.rows.iter().map(|r| r.iter().map(|x| x.mul(p)).collect()).collect() }
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let n = self.n + o.n;
        let mut rows = vec![vec![LaurentPoly::zero(); n]; n];
        for (row, src) in rows.iter_mut().zip(&self.rows) {
            row[..self.n].clone_from_slice(src);
        }
        for (row, src) in rows[self.n..].iter_mut().zip(&o.rows) {
            row[self.n..].clone_from_slice(src);
        }
        LaurentMatrix { n, rows }
    }

    pub fn is_over_t(&self) -> bool {
        self.rows.iter().flatten().all(|p| p.is_polynomial_in_t())
    }

    pub fn is_over_t_inv(&self) -> bool {
        self.rows.iter().flatten().all(|p| p.is_polynomial_in_t_inv())
    }

    /// `Some(u)` when the matrix is exactly `diag(t^{u_i})`.
    pub fn as_diag_t(&self) -> Option<Vec<i64>> {
        let mut u = Vec::with_capacity(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let p = &self.rows[i][j];
                if i == j {
                    match p.as_unit() {
                        Some((c, d)) if c.is_one() => u.push(d),
                        _ => return None,
                    }
                } else if !p.is_zero() {
                    return None;
                }
            }
        }
        Some(u)
    }

    fn min_exponent(&self) -> i64 {
        self.rows.iter().flatten().filter_map(|p| p.min_deg()).min().unwrap_or(0)
    }

    /// Fraction-free elimination after shifting into ℚ[t].
    pub fn det(&self) -> LaurentPoly {
        let n = self.n;
        if n == 0 {
            return LaurentPoly::one();
        }
        let k = -self.min_exponent().min(0);
        let mut a: Vec<Vec<LaurentPoly>> = self.rows.iter().map(|r| r.iter().map(|x| x.shift(k)).collect()).collect();
        let mut prev = LaurentPoly::one();
        let mut sign = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return LaurentPoly::zero() };
            if p != c {
                a.swap(p, c);
                sign = -sign;
            }
            for i in c + 1..n {
                for j in c + 1..n {
                    let num = a[i][j].mul(&a[c][c]).sub(&a[i][c].mul(&a[c][j]));
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
                a[i][c] = LaurentPoly::zero();
            }
            prev = a[c][c].clone();
        }
        a[n - 1][n - 1].scale(&sign).shift(-k * n as i64)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> LaurentMatrix {
        let rows = (0..self.n)
            .filter(|&i| i != skip_r)
            .map(|i| (0..self.n).filter(|&j| j != skip_c).map(|j| self.rows[i][j].clone()).collect())
            .collect();
        LaurentMatrix { n: self.n - 1, rows }
    }

    /// Inverse over Laurent polynomials; `None` unless the determinant is a unit.
    pub fn inverse(&self) -> Option<LaurentMatrix> {
        let (c, d) = self.det().as_unit()?;
        let inv_det = LaurentPoly::monomial(Rat::one() / c, -d);
        let n = self.n;
        if n == 1 {
            return Some(LaurentMatrix { n, rows: vec![vec![inv_det]] });
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let m = self.minor(j, i).det();
                        let m = if (i + j) % 2 == 1 { m.neg() } else { m };
                        m.mul(&inv_det)
                    })
                    .collect()
            })
            .collect();
        Some(LaurentMatrix { n, rows })
    }

    pub fn is_invertible(&self) -> bool {
        self.det().as_unit().is_some()
    }

    fn permute_rows(&self, p: &[usize]) -> Self {
        LaurentMatrix { n: self.n, rows: p.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    fn permute_cols(&self, p: &[usize]) -> Self {
        LaurentMatrix { n: self.n, rows: self.rows.iter().map(|r| p.iter().map(|&j| r[j].clone()).collect()).collect() }
    }
}

/// `σ θ τ = diag(t^{u_1}, …, t^{u_n})` with `u` descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Birkhoff {
    pub sigma: LaurentMatrix,
    pub u: Vec<i64>,
    pub tau: LaurentMatrix,
}

/// Row-reduces `t^K θ` over ℚ[t] until its leading row coefficients are independent; then
/// `t^K θ = diag(t^{d_i}) Q(t⁻¹)` with `det Q` constant and `τ = Q⁻¹`.
pub fn birkhoff_factorize(theta: &LaurentMatrix) -> Result<Birkhoff> {
    let n = theta.n;
    if !theta.is_invertible() {
        return pre("matrix is not invertible over Laurent polynomials");
    }
    let k = -theta.min_exponent();
    let mut p: Vec<Vec<LaurentPoly>> = theta.rows.iter().map(|r| r.iter().map(|x| x.shift(k)).collect()).collect();
    let mut sigma = LaurentMatrix::identity(n).rows;
    loop {
        let d: Vec<i64> = p.iter().map(|r| r.iter().filter_map(|x| x.max_deg()).max().expect("invertible rows are nonzero")).collect();
        let lead: Vec<QVec> = (0..n).map(|i| p[i].iter().map(|x| x.coef(d[i])).collect()).collect();
        let lt = linalg::transpose(&lead, n);
        let ns = linalg::nullspace(&lt, n);
        let Some(alpha) = ns.first() else {
            let u: Vec<i64> = d.iter().map(|x| x - k).collect();
            // Q = diag(t^{-d}) t^K θ, a matrix over ℚ[t⁻¹] with constant determinant
            let q = LaurentMatrix { n, rows: p.iter().zip(&d).map(|(r, di)| r.iter().map(|x| x.shift(-di)).collect()).collect() };
            let tau = q.inverse().ok_or_else(|| Error::Geometry("reduced matrix lost invertibility".into()))?;
            let sigma = LaurentMatrix { n, rows: sigma };
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| u[b].cmp(&u[a]).then(a.cmp(&b)));
            let u_sorted = order.iter().map(|&i| u[i]).collect();
            return Ok(Birkhoff { sigma: sigma.permute_rows(&order), u: u_sorted, tau: tau.permute_cols(&order) });
        };
        let piv = (0..n).filter(|&i| !alpha[i].is_zero()).max_by_key(|&i| (d[i], std::cmp::Reverse(i))).expect("nonzero kernel vector");
        let mut new_p = vec![LaurentPoly::zero(); n];
        let mut new_s = vec![LaurentPoly::zero(); n];
        for i in (0..n).filter(|&i| !alpha[i].is_zero()) {
            let m = LaurentPoly::monomial(&alpha[i] / &alpha[piv], d[piv] - d[i]);
            for j in 0..n {
                new_p[j] = new_p[j].add(&m.mul(&p[i][j]));
                new_s[j] = new_s[j].add(&m.mul(&sigma[i][j]));
            }
        }
        p[piv] = new_p;
        sigma[piv] = new_s;
    }
}

/// `θ` restricted along the pole, with the unverifiable `K₁` condition carried as an annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleTriple {
    pub theta: LaurentMatrix,
    /// Whether `[θ(0)⁻¹ θ] = 0` in `K₁` has been asserted by the caller; never checked.
    pub k1_trivial_asserted: bool,
}

impl BundleTriple {
    pub fn new(theta: LaurentMatrix) -> Result<Self> {
        if !theta.is_invertible() {
            return pre("θ must be invertible");
        }
        Ok(BundleTriple { theta, k1_trivial_asserted: false })
    }

    pub fn rank(&self) -> usize {
        self.theta.n
    }
}

/// `[min u, max u]` of the splitting type.
pub fn polarization_interval(triple: &BundleTriple) -> Result<(i64, i64)> {
    let b = birkhoff_factorize(&triple.theta)?;
    let lo = *b.u.last().unwrap_or(&0);
    let hi = *b.u.first().unwrap_or(&0);
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KoszulMode {
    /// `(tθ) ⊕ (tθ)`.
    F1,
    /// `t²θ`.
    F2,
}

pub fn koszul_twist(triple: &BundleTriple, mode: KoszulMode) -> BundleTriple {
    let th = &triple.theta;
    let theta = match mode {
        KoszulMode::F1 => {
            let tt = th.scale(&LaurentPoly::t_pow(1));
            tt.direct_sum(&tt)
        }
        KoszulMode::F2 => th.scale(&LaurentPoly::t_pow(2)),
    };
    BundleTriple { theta, k1_trivial_asserted: triple.k1_trivial_asserted }
}

/// Rectangular Laurent matrix product, rows of `a` times columns of `b`.
fn rect_mul(a: &[Vec<LaurentPoly>], b: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter().map(|r| (0..m).map(|j| r.iter().zip(b).fold(LaurentPoly::zero(), |s, (x, row)| s.add(&x.mul(&row[j])))).collect()).collect()
}

fn block_row(l: LaurentPoly, r: LaurentPoly, n: usize) -> Vec<Vec<LaurentPoly>> {
    (0..n)
        .map(|i| {
            let mut row = vec![LaurentPoly::zero(); 2 * n];
            row[i] = l.clone();
            row[n + i] = r.clone();
            row
        })
        .collect()
}

fn block_col(top: LaurentPoly, bottom: LaurentPoly, n: usize) -> Vec<Vec<LaurentPoly>> {
    let mut out = vec![vec![LaurentPoly::zero(); n]; 2 * n];
    for i in 0..n {
        out[i][i] = top.clone();
        out[n + i][i] = bottom.clone();
    }
    out
}

/// The identities making the two-row Koszul diagram commute with exact rows
/// (row vectors act on the left of the matrices).
pub fn koszul_identities(theta: &LaurentMatrix) -> Vec<(String, bool)> {
    let n = theta.n;
    let t = LaurentPoly::t_pow(1);
    let one = LaurentPoly::one();
    let f1 = koszul_twist(&BundleTriple { theta: theta.clone(), k1_trivial_asserted: false }, KoszulMode::F1).theta;
    let f2 = theta.scale(&LaurentPoly::t_pow(2));
    let a_top = block_row(t.clone(), one.neg(), n);
    let b_top = block_col(one.clone(), t.clone(), n);
    let a_bot = block_row(one.clone(), LaurentPoly::t_pow(-1).neg(), n);
    let b_bot = block_col(LaurentPoly::t_pow(-1), one.clone(), n);
    let zero_n = vec![vec![LaurentPoly::zero(); n]; n];
    vec![
        ("(t,−1)·(1,t)ᵀ = 0".into(), rect_mul(&a_top, &b_top) == zero_n),
        ("(1,−t⁻¹)·(t⁻¹,1)ᵀ = 0".into(), rect_mul(&a_bot, &b_bot) == zero_n),
        ("(t,−1)·(tθ ⊕ tθ) = t²θ·(1,−t⁻¹)".into(), rect_mul(&a_top, &f1.rows) == rect_mul(&f2.rows, &a_bot)),
        ("(tθ ⊕ tθ)·(t⁻¹,1)ᵀ = (1,t)ᵀ·θ".into(), rect_mul(&f1.rows, &b_bot) == rect_mul(&b_top, &theta.rows)),
    ]
}

/// Outcome of comparing two triples up to `θ ↦ α θ β`, `α` over ℚ[t], `β` over ℚ[t⁻¹].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// `left · θ₁ · right = θ₂`.
    Equivalent { left: LaurentMatrix, right: LaurentMatrix },
    /// The splitting types differ.
    Distinct { u1: Vec<i64>, u2: Vec<i64> },
}

/// Decides equivalence through the splitting type, which is a complete invariant.
pub fn equivalent_triples(theta1: &LaurentMatrix, theta2: &LaurentMatrix) -> Result<Equivalence> {
    if theta1.n != theta2.n {
        return pre("sizes differ");
    }
    let b1 = birkhoff_factorize(theta1)?;
    let b2 = birkhoff_factorize(theta2)?;
    if b1.u != b2.u {
        return Ok(Equivalence::Distinct { u1: b1.u, u2: b2.u });
    }
    // θ₂ = σ₂⁻¹ σ₁ θ₁ τ₁ τ₂⁻¹
    let s2i = b2.sigma.inverse().expect("σ is invertible");
    let t2i = b2.tau.inverse().expect("τ is invertible");
    Ok(Equivalence::Equivalent { left: s2i.mul(&b1.sigma), right: b1.tau.mul(&t2i) })
}
