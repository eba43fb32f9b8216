//! Finite stages `M/(c_1⋯c_j)` of a dilation tower and the witnesses built from them.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, IVec, Int, QVec, Rat};
use crate::cone::Cone;
use crate::error::{check_rank, pre, Error, Result};
use crate::lattice::Lattice;
use crate::linalg;
use crate::monoid::{AffineMonoid, ExtremalInversion};

/// `c_1, c_2, …` with every entry ≥ 2; entries past the prefix equal `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CSeq {
    pub prefix: Vec<u64>,
    pub tail: u64,
}

impl CSeq {
    pub fn new(prefix: Vec<u64>, tail: u64) -> Result<CSeq> {
        if tail < 2 || prefix.iter().any(|&c| c < 2) {
            return Err(Error::Input("dilation sequence entries must be ≥ 2".into()));
        }
        Ok(CSeq { prefix, tail })
    }

    pub fn constant(c: u64) -> Result<CSeq> {
        CSeq::new(Vec::new(), c)
    }

    pub fn validate(&self) -> Result<()> {
        CSeq::new(self.prefix.clone(), self.tail).map(|_| ())
    }

    /// `c_j` for `j ≥ 1`.
    pub fn c(&self, j: usize) -> u64 {
        assert!(j >= 1, "dilation sequence is 1-indexed");
        self.prefix.get(j - 1).copied().unwrap_or(self.tail)
    }

    /// `c_1 ⋯ c_j`, with the empty product at `j = 0`.
    pub fn denom(&self, j: usize) -> Int {
        (1..=j).map(|i| Int::from(self.c(i))).product()
    }
}

/// The monoid `M/(c_1⋯c_j) ⊂ ℚ ⊗ gp(M)`, held as `M` together with the denominator.
#[derive(Debug, Clone)]
pub struct DilationStage {
    pub base: AffineMonoid,
    pub cseq: CSeq,
    pub j: usize,
    pub denom: Int,
}

impl DilationStage {
    fn scaled(&self, x: &[Rat]) -> Option<IVec> {
        let y = arith::scale_q(&Rat::from_integer(self.denom.clone()), x);
        arith::is_integral(&y).then(|| y.iter().map(|v| v.to_integer()).collect())
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.base.ambient_rank() && self.scaled(x).is_some_and(|y| self.base.contains(&y))
    }

    /// Membership in the interior ideal of the stage monoid.
    pub fn interior_contains(&self, x: &[Rat]) -> bool {
        x.len() == self.base.ambient_rank() && self.scaled(x).is_some_and(|y| self.base.in_interior_ideal(&y))
    }

    /// Membership in the stage lattice `gp(M)/(c_1⋯c_j)`.
    pub fn lattice_contains(&self, x: &[Rat]) -> bool {
        self.scaled(x).is_some_and(|y| self.base.gp().contains(&y))
    }

    pub fn generators(&self) -> Vec<QVec> {
        let s = Rat::new(Int::one(), self.denom.clone());
        self.base.generators().iter().map(|g| arith::scale_q(&s, &arith::to_q(g))).collect()
    }
}

pub fn stage(m: &AffineMonoid, cseq: &CSeq, j: usize) -> DilationStage {
    DilationStage { base: m.clone(), cseq: cseq.clone(), j, denom: cseq.denom(j) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitWitness {
    pub stage: usize,
    /// `c_{j+1} = 2a + 3b` when the proof step was needed.
    pub split: Option<(u64, u64)>,
}

/// Given `2m, 3m` in stage `j`, a stage `j′ ≤ j + 1` containing `m`.
pub fn seminormal_limit_witness(m: &AffineMonoid, cseq: &CSeq, x: &[Rat], j: usize) -> Result<LimitWitness> {
    check_rank(m.ambient_rank(), x.len())?;
    let s = stage(m, cseq, j);
    let two = arith::scale_q(&Rat::from_integer(Int::from(2)), x);
    let three = arith::scale_q(&Rat::from_integer(Int::from(3)), x);
    if !s.contains(&two) || !s.contains(&three) {
        return pre("2m or 3m not in stage");
    }
    if s.contains(x) {
        return Ok(LimitWitness { stage: j, split: None });
    }
    let c = cseq.c(j + 1);
    // c ≥ 2 is a ℤ₊-combination of 2 and 3, so c·m lies in stage j
    let (a, b) = if c.is_multiple_of(2) { (c / 2, 0) } else { ((c - 3) / 2, 1) };
    let next = stage(m, cseq, j + 1);
    if !next.contains(x) {
        return Err(Error::Geometry("c·m ∈ stage j did not give m ∈ stage j+1".into()));
    }
    Ok(LimitWitness { stage: j + 1, split: Some((a, b)) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcisionWitness {
    pub m: IVec,
    pub b: Vec<QVec>,
    pub u: QVec,
    pub v: QVec,
    pub stage: usize,
}

/// Least interior element of `M` by degree, then lexicographically.
pub fn least_interior_element(m: &AffineMonoid, cap: u32) -> Result<IVec> {
    let mut d = Int::one();
    for _ in 0..cap {
        let mut hits: Vec<(Int, IVec)> = m
            .elements_up_to(&d)?
            .into_iter()
            .filter(|x| m.in_interior_ideal(x))
            .map(|x| (m.degree(&x).expect("member of gp"), x))
            .collect();
        hits.sort();
        if let Some((_, x)) = hits.into_iter().next() {
            return Ok(x);
        }
        d *= 2;
    }
    Err(Error::CapExceeded("no interior element found".into()))
}

/// `a_i = b_i + u + v` with every part interior at the returned stage.
pub fn excision_witness(m: &AffineMonoid, cseq: &CSeq, a: &[QVec], j: usize, cap: usize) -> Result<ExcisionWitness> {
    let s = stage(m, cseq, j);
    for ai in a {
        check_rank(m.ambient_rank(), ai.len())?;
        if !s.interior_contains(ai) {
            return pre("element is not interior at the given stage");
        }
    }
    let base = least_interior_element(m, 16)?;
    let mq = arith::to_q(&base);
    for jp in j..j + cap {
        let next = stage(m, cseq, jp + 1);
        let c = Int::from(cseq.c(jp + 1));
        let u = arith::scale_q(&Rat::new(Int::one(), next.denom.clone()), &mq);
        let v = arith::scale_q(&Rat::from_integer(&c - 1), &u);
        let mj = arith::scale_q(&Rat::new(Int::one(), cseq.denom(jp)), &mq);
        let b: Vec<QVec> = a.iter().map(|ai| arith::sub_q(ai, &mj)).collect();
        if b.iter().all(|bi| next.interior_contains(bi)) {
            debug_assert!(next.interior_contains(&u) && next.interior_contains(&v));
            return Ok(ExcisionWitness { m: base, b, u, v, stage: jp + 1 });
        }
    }
    Err(Error::CapExceeded("excision stage cap".into()))
}

/// `N_c = (⊕ ℤ(b_i − c t)) ∩ (ℤ₊(−t) + M)` with `Φ(N) ⊆ conv(π(b_i))`.
#[derive(Debug, Clone)]
pub struct PyrappStage {
    pub c: Int,
    pub t: IVec,
    /// Lifts `b_i ∈ gp(M)` of a basis of `gp(N)` whose cone contains `C(N)`.
    pub lifts: Vec<IVec>,
    pub lattice: Lattice,
    pub monoid: AffineMonoid,
    basis_q: Vec<QVec>,
}

impl PyrappStage {
    /// Membership in `ℤ₊t + N_c`.
    pub fn contains_shifted(&self, x: &[Int]) -> bool {
        let Some(l) = linalg::solve_left(&self.basis_q, &arith::to_q(x)) else {
            return false;
        };
        if !arith::is_integral(&l) || l[0].is_negative() {
            return false;
        }
        let y = arith::sub_i(x, &arith::scale_i(&l[0].to_integer(), &self.t));
        self.monoid.contains(&y)
    }
}

/// The lift `b + n t` with the least `n` satisfying every facet of `C(M)` that is not tight on `t`.
fn canonical_lift(m: &AffineMonoid, b: &IVec, t: &IVec) -> IVec {
    let mut n: Option<Int> = None;
    for f in m.cone().facets() {
        let ft = arith::dot_i(f, t);
        if ft.is_positive() {
            let need = (-arith::dot_i(f, b)).div_ceil(&ft);
            n = Some(n.map_or(need.clone(), |x: Int| x.max(need)));
        }
    }
    arith::add_i(b, &arith::scale_i(&n.unwrap_or_else(Int::zero), t))
}

pub fn pyrapp_stage(m: &AffineMonoid, t: &[Int], c: &Int) -> Result<PyrappStage> {
    if !c.is_positive() {
        return pre("c must be ≥ 1");
    }
    let inv: ExtremalInversion = m.invert_extremal(t)?;
    let t = t.to_vec();
    let k1 = inv.quotient.ambient_rank();
    let emb = inv.quotient.embed_in_free()?;
    // dual basis to the free functionals: f_i(b'_j) = δ_ij
    let fq: Vec<QVec> = emb.functionals.clone();
    let finv = linalg::inverse(&fq).ok_or_else(|| Error::Geometry("free functionals are dependent".into()))?;
    let ft = linalg::transpose(&finv, k1);
    let lifts: Vec<IVec> = ft
        .iter()
        .map(|col| {
            let bq: IVec = col.iter().map(|x| x.to_integer()).collect();
            canonical_lift(m, &inv.combine(&Int::zero(), &bq), &t)
        })
        .collect();
    let gens: Vec<IVec> = lifts.iter().map(|b| arith::sub_i(b, &arith::scale_i(c, &t))).collect();
    let lattice = Lattice::from_generators(m.ambient_rank(), &gens);
    let mut loc_gens = m.generators().to_vec();
    loc_gens.push(arith::neg_i(&t));
    let loc = Cone::from_generators(m.ambient_rank(), &loc_gens)?;
    let mut eqs = loc.equations().to_vec();
    eqs.extend(lattice.span_equations());
    let cone_c = Cone::from_inequalities(m.ambient_rank(), loc.facets(), &eqs)?;
    let monoid = AffineMonoid::from_cone_lattice(&cone_c, &lattice)?;
    let mut basis_q = vec![arith::to_q(&t)];
    basis_q.extend(gens.iter().map(|g| arith::to_q(g)));
    Ok(PyrappStage { c: c.clone(), t, lifts, lattice, monoid, basis_q })
}
