//! 2×2 matrix rings over monoid algebras whose off-diagonal supports are tied to a pole `t`,
//! and the twisted Frobenius `c̃` on the bipyramidal variant.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, IVec, Int, Rat};
use crate::cone::Cone;
use crate::error::{check_rank, pre, Error, Result};
use crate::lattice::Lattice;
use crate::pyramidal::PolarizedMonoid;

/// Finite sum of monomials `c·x^m`, `m ∈ ℤ^r`; no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<IVec, Rat>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn monomial(m: IVec, c: Rat) -> Self {
        let mut p = MPoly::zero();
        p.add_term(m, &c);
        p
    }

    pub fn one(rank: usize) -> Self {
        MPoly::monomial(vec![Int::zero(); rank], Rat::one())
    }

    pub fn from_terms(it: impl IntoIterator<Item = (IVec, Rat)>) -> Self {
        let mut p = MPoly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: IVec, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IVec, &Rat)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &IVec> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c);
        }
        p
    }

    pub fn scale(&self, c: &Rat) -> Self {
        MPoly::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(arith::add_i(m1, m2), &(c1 * c2));
            }
        }
        p
    }

    /// Multiplication by the monomial `x^v`.
    pub fn shift(&self, v: &[Int]) -> Self {
        MPoly { terms: self.terms.iter().map(|(m, c)| (arith::add_i(m, v), c.clone())).collect() }
    }

    /// `x^m ↦ x^{c·m}`.
    pub fn dilate(&self, c: &Int) -> Self {
        MPoly { terms: self.terms.iter().map(|(m, x)| (arith::scale_i(c, m), x.clone())).collect() }
    }
}

/// `[[φ11, φ12], [φ21, φ22]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix2 {
    pub e: [[MPoly; 2]; 2],
}

impl Matrix2 {
    pub fn new(e11: MPoly, e12: MPoly, e21: MPoly, e22: MPoly) -> Self {
        Matrix2 { e: [[e11, e12], [e21, e22]] }
    }

    pub fn identity(rank: usize) -> Self {
        Matrix2::new(MPoly::one(rank), MPoly::zero(), MPoly::zero(), MPoly::one(rank))
    }

    pub fn zero() -> Self {
        Matrix2::new(MPoly::zero(), MPoly::zero(), MPoly::zero(), MPoly::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = |i: usize, j: usize| self.e[i][j].add(&o.e[i][j]);
        Matrix2::new(f(0, 0), f(0, 1), f(1, 0), f(1, 1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = |i: usize, j: usize| self.e[i][0].mul(&o.e[0][j]).add(&self.e[i][1].mul(&o.e[1][j]));
        Matrix2::new(f(0, 0), f(0, 1), f(1, 0), f(1, 1))
    }

    fn monomials(&self) -> impl Iterator<Item = &IVec> {
        self.e.iter().flatten().flat_map(|p| p.support())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RingVariant {
    /// Supports governed by `L(Γ)` and the pole.
    Lambda,
    /// As `Lambda`, with no positive pole powers in position 21.
    LambdaPrime,
    /// Supports governed by `C₁ ∩ ℤ^r` for a bipyramidal decomposition `C = C₁ ∪ C₂`.
    Bipyramidal,
}

/// A monomial matrix ring: the diagonal is supported in `S = cone ∩ lattice`, position 12 in
/// `S ∩ (S − t)`, position 21 in `S ∪ (S + t)`.
#[derive(Debug, Clone)]
pub struct MonomialMatrixRing {
    variant: RingVariant,
    t: IVec,
    cone: Cone,
    lattice: Lattice,
    omega: Option<IVec>,
}

impl MonomialMatrixRing {
    pub fn from_polarized(p: &PolarizedMonoid, prime: bool) -> Self {
        MonomialMatrixRing {
            variant: if prime { RingVariant::LambdaPrime } else { RingVariant::Lambda },
            t: p.t().clone(),
            cone: p.gamma_cone().clone(),
            lattice: p.monoid().gp().clone(),
            omega: None,
        }
    }

    /// Raw polarization data; the caller vouches for the polarized conditions.
    pub fn from_parts(t: IVec, gamma_cone: Cone, lattice: Lattice, prime: bool) -> Result<Self> {
        check_rank(gamma_cone.ambient_rank(), t.len())?;
        check_rank(lattice.ambient_rank(), t.len())?;
        let variant = if prime { RingVariant::LambdaPrime } else { RingVariant::Lambda };
        Ok(MonomialMatrixRing { variant, t, cone: gamma_cone, lattice, omega: None })
    }

    /// `C₁` and `C₂` pyramidal with `C₂ = ℝ₊t + (C₁ ∩ C₂)`; computes `ω = l ∩ (−t + C₁∩C₂)`.
    pub fn bipyramidal(t: IVec, c1: &Cone, c2: &Cone) -> Result<Self> {
        let r = t.len();
        check_rank(c1.ambient_rank(), r)?;
        check_rank(c2.ambient_rank(), r)?;
        if !c1.is_full_dimensional() || !c2.is_full_dimensional() {
            return pre("C₁ and C₂ must be full-dimensional");
        }
        let common = c1.intersect(c2)?;
        if common.dim() + 1 != r {
            return pre("C₁ ∩ C₂ must be a common facet");
        }
        if !c2.rays().contains(&arith::primitive_i(&t)) || common.contains(&t) {
            return pre("t must span the extremal ray of C₂ off C₁ ∩ C₂");
        }
        let outside: Vec<&IVec> = c1.rays().iter().filter(|v| !common.contains(v)).collect();
        let [l] = outside.as_slice() else {
            return pre("C₁ must have exactly one extremal ray off C₁ ∩ C₂");
        };
        let mu = &common.equations()[0];
        let (ml, mt) = (arith::dot_i(mu, l), arith::dot_i(mu, &t));
        let lambda = -Rat::new(mt, ml.clone());
        if !lambda.is_positive() {
            return pre("l and t lie on the same side of C₁ ∩ C₂");
        }
        let omega_q = arith::scale_q(&lambda, &arith::to_q(l));
        if !arith::is_integral(&omega_q) {
            return Err(Error::Input(format!(
                "ω = {} is not a lattice point",
                omega_q.iter().map(arith::fmt_rat).collect::<Vec<_>>().join(",")
            )));
        }
        let omega: IVec = omega_q.iter().map(|x| x.to_integer()).collect();
        debug_assert!(common.contains(&arith::add_i(&omega, &t)));
        Ok(MonomialMatrixRing { variant: RingVariant::Bipyramidal, t, cone: c1.clone(), lattice: Lattice::full(r), omega: Some(omega) })
    }

    pub fn variant(&self) -> RingVariant {
        self.variant
    }

    pub fn rank(&self) -> usize {
        self.t.len()
    }

    pub fn t(&self) -> &IVec {
        &self.t
    }

    pub fn omega(&self) -> Option<&IVec> {
        self.omega.as_ref()
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    fn in_base(&self, m: &[Int]) -> bool {
        self.cone.contains(m) && self.lattice.contains(m)
    }

    /// Whether the monomial `m` may appear in position `(i, j)`.
    pub fn entry_allows(&self, i: usize, j: usize, m: &[Int]) -> bool {
        match (i, j) {
            (0, 0) | (1, 1) => self.in_base(m),
            (0, 1) => self.in_base(m) && self.in_base(&arith::add_i(m, &self.t)),
            _ => {
                let ok = self.in_base(m) || self.in_base(&arith::sub_i(m, &self.t));
                ok && !(self.variant == RingVariant::LambdaPrime && positive_multiple_of(m, &self.t))
            }
        }
    }

    /// First offending `(i, j, m)`, if any.
    pub fn violation(&self, phi: &Matrix2) -> Result<Option<(usize, usize, IVec)>> {
        if phi.monomials().any(|m| m.len() != self.rank()) {
            return Err(Error::Input("monomial exponent length does not match the ring".into()));
        }
        for i in 0..2 {
            for j in 0..2 {
                if let Some(m) = phi.e[i][j].support().find(|m| !self.entry_allows(i, j, m)) {
                    return Ok(Some((i, j, m.clone())));
                }
            }
        }
        Ok(None)
    }

    /// Whether every monomial of `C₁` other than 0 is interior to `C′`.
    pub fn endo_precondition(&self, c_prime: &Cone) -> bool {
        self.cone.rays().iter().all(|v| c_prime.interior_contains(v))
    }
}

fn positive_multiple_of(m: &[Int], t: &[Int]) -> bool {
    let Some(k) = t.iter().position(|x| !x.is_zero()) else { return false };
    let n = Rat::new(m[k].clone(), t[k].clone());
    n.is_integer() && n.is_positive() && arith::scale_i(&n.to_integer(), t) == m
}

pub fn lambda_membership(phi: &Matrix2, ring: &MonomialMatrixRing) -> Result<bool> {
    Ok(ring.violation(phi)?.is_none())
}

/// `c̃(φ) = [[c#φ11, ω^{1−c} c#φ12], [ω^{c−1} c#φ21, c#φ22]]`.
pub fn tilde_c_apply(phi: &Matrix2, c: u64, ring: &MonomialMatrixRing) -> Result<Matrix2> {
    let Some(omega) = &ring.omega else {
        return pre("c̃ is defined on the bipyramidal ring only");
    };
    if c == 0 {
        return pre("c must be ≥ 1");
    }
    if !lambda_membership(phi, ring)? {
        return pre("φ is not in the ring");
    }
    let ci = Int::from(c);
    let w = arith::scale_i(&(&ci - 1), omega);
    let d = |p: &MPoly| p.dilate(&ci);
    Ok(Matrix2::new(d(&phi.e[0][0]), d(&phi.e[0][1]).shift(&arith::neg_i(&w)), d(&phi.e[1][0]).shift(&w), d(&phi.e[1][1])))
}

/// Least `c₀ ≥ 1` with `(c−1)ω + c·t ∈ int C′` for every `c ≥ c₀`.
pub fn minimal_endo_exponent(t: &[Int], omega: &[Int], c_prime: &Cone, cap: u64) -> Result<u64> {
    check_rank(c_prime.ambient_rank(), t.len())?;
    check_rank(omega.len(), t.len())?;
    if !c_prime.is_full_dimensional() {
        return pre("C′ must be full-dimensional");
    }
    let wt = arith::add_i(omega, t);
    let mut c0 = Int::one();
    // μ((c−1)ω + ct) = c·μ(ω+t) − μ(ω) > 0
    for mu in c_prime.facets() {
        let (a, b) = (arith::dot_i(mu, &wt), arith::dot_i(mu, omega));
        let need = if a.is_positive() {
            num_integer::Integer::div_floor(&b, &a) + 1
        } else if a.is_zero() && b.is_negative() {
            Int::one()
        } else {
            return Err(Error::CapExceeded(format!("(c−1)ω + ct leaves C′ for all large c (cap {cap})")));
        };
        c0 = c0.max(need);
    }
    if c0 > Int::from(cap) {
        return Err(Error::CapExceeded(format!("minimal exponent {c0} exceeds cap {cap}")));
    }
    Ok(u64::try_from(&c0).expect("bounded by cap"))
}
