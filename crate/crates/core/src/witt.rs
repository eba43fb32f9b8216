//! Truncated big Witt vectors `1 + a₁T + … + a_mT^m` over ℚ, and the Weibel map `A → A[T]`
//! of a graded monoid algebra.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{self, IVec, Int, Rat};
use crate::error::{pre, Error, Result};
use crate::lambda::MPoly;

/// `1 + Σ_{i ≤ m} a_i T^i`, all arithmetic modulo `T^{m+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WittVector {
    coeffs: Vec<Rat>,
}

impl WittVector {
    /// `coeffs[i]` is the coefficient of `T^{i+1}`.
    pub fn new(coeffs: Vec<Rat>) -> Self {
        WittVector { coeffs }
    }

    /// The additive identity `1`.
    pub fn one(m: usize) -> Self {
        WittVector { coeffs: vec![Rat::zero(); m] }
    }

    /// `1 − r T^n` truncated at `m`.
    pub fn elementary(r: Rat, n: usize, m: usize) -> Self {
        let mut w = WittVector::one(m);
        if (1..=m).contains(&n) {
            w.coeffs[n - 1] = -r;
        }
        w
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `T^i`, with `coeff(0) = 1`.
    pub fn coeff(&self, i: usize) -> Rat {
        if i == 0 {
            Rat::one()
        } else {
            self.coeffs.get(i - 1).cloned().unwrap_or_else(Rat::zero)
        }
    }

    fn full(&self) -> Vec<Rat> {
        std::iter::once(Rat::one()).chain(self.coeffs.iter().cloned()).collect()
    }

    fn from_full(s: &[Rat]) -> Self {
        debug_assert!(s[0].is_one());
        WittVector { coeffs: s[1..].to_vec() }
    }

    /// Parses `1 - 2T + 3/4T^2`-style strings.
    pub fn parse(s: &str, m: usize) -> Result<Self> {
        let mut full = vec![Rat::zero(); m + 1];
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Input("empty power series".into()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(b) => (-Rat::one(), b),
                None => (Rat::one(), term.strip_prefix('+').unwrap_or(&term)),
            };
            let (coef, deg) = match body.find('T') {
                None => (arith::parse_rat(body)?, 0usize),
                Some(p) => {
                    let c = match &body[..p] {
                        "" => Rat::one(),
                        c => arith::parse_rat(c.trim_end_matches('*'))?,
                    };
                    let d = match &body[p + 1..] {
                        "" => 1,
                        e => e
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| Error::Input(format!("bad exponent in `{term}`")))?,
                    };
                    (c, d)
                }
            };
            if deg <= m {
                full[deg] += sign * coef;
            }
        }
        if !full[0].is_one() {
            return Err(Error::Input("constant term must be 1".into()));
        }
        Ok(WittVector::from_full(&full))
    }
}

impl std::fmt::Display for WittVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "1")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rat::zero();
            let a = if neg { -c } else { c.clone() };
            write!(f, "{}", if neg { "-" } else { "+" })?;
            if !a.is_one() {
                write!(f, "{}", arith::fmt_rat(&a))?;
            }
            match i + 1 {
                1 => write!(f, "T")?,
                d => write!(f, "T^{d}")?,
            }
        }
        Ok(())
    }
}

fn same_truncation(f: &WittVector, g: &WittVector) -> Result<usize> {
    if f.truncation() != g.truncation() {
        return pre(format!("truncation mismatch: {} vs {}", f.truncation(), g.truncation()));
    }
    Ok(f.truncation())
}

fn series_mul(a: &[Rat], b: &[Rat], m: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); m + 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Witt addition: the power-series product.
pub fn witt_add(f: &WittVector, g: &WittVector) -> Result<WittVector> {
    let m = same_truncation(f, g)?;
    Ok(WittVector::from_full(&series_mul(&f.full(), &g.full(), m)))
}

/// Additive inverse `1/f`.
pub fn witt_neg(f: &WittVector) -> WittVector {
    let m = f.truncation();
    let a = f.full();
    let mut inv = vec![Rat::zero(); m + 1];
    inv[0] = Rat::one();
    for n in 1..=m {
        inv[n] = -(1..=n).map(|i| &a[i] * &inv[n - i]).fold(Rat::zero(), |s, x| s + x);
    }
    WittVector::from_full(&inv)
}

/// `gh_n` with `−T f′/f = Σ gh_n T^n`.
pub fn ghost(f: &WittVector) -> Vec<Rat> {
    let m = f.truncation();
    let a = f.full();
    // q = T f′ / f, from q·f = T f′
    let mut q = vec![Rat::zero(); m + 1];
    for n in 1..=m {
        let mut v = Rat::from_integer(Int::from(n)) * &a[n];
        for i in 1..n {
            v -= &a[i] * &q[n - i];
        }
        q[n] = v;
    }
    q[1..].iter().map(|x| -x).collect()
}

pub fn from_ghost(v: &[Rat]) -> WittVector {
    let m = v.len();
    let q: Vec<Rat> = std::iter::once(Rat::zero()).chain(v.iter().map(|x| -x)).collect();
    let mut a = vec![Rat::zero(); m + 1];
    a[0] = Rat::one();
    for n in 1..=m {
        let mut s = q[n].clone();
        for i in 1..n {
            s += &a[i] * &q[n - i];
        }
        a[n] = s / Rat::from_integer(Int::from(n));
    }
    WittVector::from_full(&a)
}

/// Witt multiplication, computed as the componentwise product of ghost vectors.
pub fn witt_star(f: &WittVector, g: &WittVector) -> Result<WittVector> {
    same_truncation(f, g)?;
    let p: Vec<Rat> = ghost(f).iter().zip(ghost(g)).map(|(x, y)| x * y).collect();
    Ok(from_ghost(&p))
}

/// `r_1, …, r_m` with `f ≡ Π (1 − r_n T^n)`.
pub fn factor_expansion(f: &WittVector) -> Vec<Rat> {
    let m = f.truncation();
    let mut cur = f.clone();
    let mut r = Vec::with_capacity(m);
    for n in 1..=m {
        let rn = -cur.coeff(n);
        if !rn.is_zero() {
            cur = witt_add(&cur, &witt_neg(&WittVector::elementary(rn.clone(), n, m))).expect("same truncation");
        }
        r.push(rn);
    }
    r
}

/// `Π (1 − r_n T^n)` truncated at `m = r.len()`.
pub fn from_factors(r: &[Rat]) -> WittVector {
    let m = r.len();
    r.iter()
        .enumerate()
        .fold(WittVector::one(m), |acc, (i, rn)| witt_add(&acc, &WittVector::elementary(rn.clone(), i + 1, m)).expect("same truncation"))
}

/// Star product by expanding both sides into elementary factors and applying
/// `(1−rT^a)⋆(1−sT^b) = (1 − r^{b/d} s^{a/d} T^{ab/d})^d`, `d = gcd(a, b)`.
/// Uses no division by integers, unlike the ghost route.
pub fn witt_star_by_factors(f: &WittVector, g: &WittVector) -> Result<WittVector> {
    let m = same_truncation(f, g)?;
    let (rf, rg) = (factor_expansion(f), factor_expansion(g));
    let mut acc = WittVector::one(m);
    for (i, r) in rf.iter().enumerate().filter(|(_, r)| !r.is_zero()) {
        for (j, s) in rg.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
            let (a, b) = (i + 1, j + 1);
            let d = a.gcd(&b);
            let deg = a * b / d;
            if deg > m {
                continue;
            }
            let coef = num_traits::pow(r.clone(), b / d) * num_traits::pow(s.clone(), a / d);
            let e = WittVector::elementary(coef, deg, m);
            for _ in 0..d {
                acc = witt_add(&acc, &e)?;
            }
        }
    }
    Ok(acc)
}

/// Largest `m₀` with `f ∈ 1 + T^{m₀}ℚ[[T]]`; `m + 1` for `f = 1`.
pub fn filtration_degree(f: &WittVector) -> usize {
    f.coeffs.iter().position(|c| !c.is_zero()).map_or(f.truncation() + 1, |i| i + 1)
}

/// `f(T) ↦ f(T^n)` at the same truncation.
pub fn substitute_power(f: &WittVector, n: usize) -> Result<WittVector> {
    if n == 0 {
        return pre("n must be ≥ 1");
    }
    let m = f.truncation();
    let mut c = vec![Rat::zero(); m];
    for (i, a) in f.coeffs.iter().enumerate() {
        let d = (i + 1) * n;
        if d <= m {
            c[d - 1] = a.clone();
        }
    }
    Ok(WittVector::new(c))
}

/// The norm `Π_{ζⁿ=1} f(ζ T^{1/n})`, truncated at `⌊m/n⌋`; on ghost vectors it keeps every
/// `n`-th component.
pub fn frobenius(f: &WittVector, n: usize) -> Result<WittVector> {
    if n == 0 {
        return pre("n must be ≥ 1");
    }
    let g = ghost(f);
    Ok(from_ghost(&g.iter().skip(n - 1).step_by(n).cloned().collect::<Vec<_>>()))
}

/// An element of a monoid algebra graded by `deg(x^m) = w·m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    poly: MPoly,
    weights: IVec,
}

impl GradedElement {
    /// Errors unless every monomial has nonnegative degree.
    pub fn new(poly: MPoly, weights: IVec) -> Result<Self> {
        for m in poly.support() {
            if m.len() != weights.len() {
                return Err(Error::Input("monomial length does not match the grading".into()));
            }
            if arith::dot_i(&weights, m) < Int::zero() {
                return Err(Error::Input(format!("monomial {m:?} has negative degree")));
            }
        }
        Ok(GradedElement { poly, weights })
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn weights(&self) -> &IVec {
        &self.weights
    }

    pub fn degree_of(&self, m: &[Int]) -> u64 {
        u64::try_from(arith::dot_i(&self.weights, m)).expect("degrees are nonnegative and small")
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.weights != o.weights {
            return pre("gradings differ");
        }
        GradedElement::new(self.poly.mul(&o.poly), self.weights.clone())
    }

    /// Lowest degree present; `None` for zero.
    pub fn min_degree(&self) -> Option<u64> {
        self.poly.support().map(|m| self.degree_of(m)).min()
    }
}

/// Polynomial in `T` with monoid-algebra coefficients, keyed by the power of `T`.
pub type TPoly = BTreeMap<u64, MPoly>;

/// `Σ a_j ↦ Σ a_j T^j`.
pub fn weibel_map(x: &GradedElement) -> TPoly {
    let mut out: TPoly = BTreeMap::new();
    for (m, c) in x.poly.terms() {
        let e = out.entry(x.degree_of(m)).or_default();
        *e = e.add(&MPoly::monomial(m.clone(), c.clone()));
    }
    out.retain(|_, p| !p.is_zero());
    out
}

pub fn tpoly_mul(a: &TPoly, b: &TPoly) -> TPoly {
    let mut out: TPoly = BTreeMap::new();
    for (i, p) in a {
        for (j, q) in b {
            let e = out.entry(i + j).or_default();
            *e = e.add(&p.mul(q));
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// `T ↦ 1`.
pub fn tpoly_at_one(a: &TPoly) -> MPoly {
    a.values().fold(MPoly::zero(), |s, p| s.add(p))
}
