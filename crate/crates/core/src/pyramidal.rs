//! Pyramidal extensions, polarized monoids, and the constructive approximations built on them.
//!
//! Every construction here is a bounded search whose output is re-verified clause by clause;
//! the clause lists are returned so callers can print them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, IVec, Int, QVec, Rat};
use crate::cone::Cone;
use crate::dilation::{stage, CSeq};
use crate::error::{check_rank, pre, Error, Result};
use crate::hilbert::hilbert_basis;
use crate::lattice::Lattice;
use crate::linalg;
use crate::monoid::{complete_basis, AffineMonoid};
use crate::polytope::Polytope;

/// One named pass/fail line of a verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
}

fn clause(name: impl Into<String>, pass: bool) -> Clause {
    Clause { name: name.into(), pass }
}

/// Search bounds shared by the approximation routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApproxCaps {
    /// Geometric refinement rounds.
    pub refine: u32,
    /// Offset search bound.
    pub offset: u32,
    /// Extra dilation stages tried beyond the requested one.
    pub stage: usize,
}

impl Default for ApproxCaps {
    fn default() -> Self {
        ApproxCaps { refine: 32, offset: 64, stage: 24 }
    }
}

/// `x / ξ(x)`.
fn slice(x: &[Rat], xi: &[Int]) -> QVec {
    let d = arith::dot_iq(xi, x);
    x.iter().map(|v| v / &d).collect()
}

fn round_rat(x: &Rat) -> Int {
    arith::floor_rat(&(x + Rat::new(Int::one(), Int::from(2))))
}

fn cone_over(rank: usize, pts: &[QVec]) -> Result<Cone> {
    Cone::over_points(rank, pts)
}

fn rays_interior(c: &Cone, inside: &Cone) -> bool {
    c.rays().iter().all(|r| inside.interior_contains(r))
}

fn lattice_eq(a: &Lattice, b: &Lattice) -> bool {
    a.is_sublattice_of(b) && b.is_sublattice_of(a)
}

// ---------------------------------------------------------------------------------------------
// Pyramidal extensions
// ---------------------------------------------------------------------------------------------

/// `M ⊆ N` with `Φ(N) = Φ(M) ∪ δ`, δ a pyramid meeting `Φ(M)` in its base.
/// Polytopes live in the slice `ξ_N = 1` of the ambient space.
#[derive(Debug, Clone)]
pub struct PyramidalExtension {
    pub m: AffineMonoid,
    pub n: AffineMonoid,
    pub phi_n: Polytope,
    pub phi_m: Polytope,
    pub delta: Polytope,
    pub apex: QVec,
    pub base: Polytope,
}

impl PyramidalExtension {
    /// Primitive lattice vector on the ray through the apex.
    pub fn apex_ray(&self) -> IVec {
        arith::primitive_q(&self.apex)
    }

    /// Primitive lattice vectors on the rays through the base vertices, sorted.
    pub fn base_rays(&self) -> Vec<IVec> {
        let mut v: Vec<IVec> = self.base.vertices().iter().map(|p| arith::primitive_q(p)).collect();
        v.sort();
        v
    }
}

#[derive(Debug, Clone)]
pub enum Verdict<T> {
    Holds(T),
    Fails(String),
}

impl<T> Verdict<T> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Holds(_) => None,
            Verdict::Fails(s) => Some(s),
        }
    }
}

pub fn is_pyramidal_extension(m: &AffineMonoid, n: &AffineMonoid) -> Result<Verdict<PyramidalExtension>> {
    check_rank(n.ambient_rank(), m.ambient_rank())?;
    if !m.generators().iter().all(|g| n.contains(g)) {
        return pre("M is not contained in N");
    }
    if !m.has_trivial_units() || !n.has_trivial_units() {
        return Err(Error::NotPointed);
    }
    if !m.is_normal()? || !n.is_normal()? {
        return pre("pyramidal extensions need normal monoids");
    }
    if !lattice_eq(m.gp(), n.gp()) {
        return Ok(Verdict::Fails("gp mismatch".into()));
    }
    let r = n.ambient_rank();
    let xi = n.cone().xi();
    let phi_n = n.cross_section()?;
    let qv: Vec<QVec> = m.cone().rays().iter().map(|x| slice(&arith::to_q(x), &xi)).collect();
    let phi_m = Polytope::from_points(r, &qv);
    if phi_m.dim() != phi_n.dim() {
        return Ok(Verdict::Fails("dim Φ(M) ≠ dim Φ(N)".into()));
    }
    let outside: Vec<&QVec> = phi_n.vertices().iter().filter(|v| !phi_m.contains(v)).collect();
    let v = match outside.len() {
        0 => return Ok(Verdict::Fails("Φ(M) = Φ(N): δ would be empty".into())),
        1 => outside[0].clone(),
        _ => return Ok(Verdict::Fails("more than one vertex of Φ(N) lies outside Φ(M)".into())),
    };
    let ineqs = phi_m.facet_inequalities();
    let visible: Vec<&(QVec, Rat)> = ineqs.iter().filter(|(a, b)| (arith::dot_q(a, &v) + b).is_negative()).collect();
    if visible.len() != 1 {
        return Ok(Verdict::Fails(format!("apex sees {} facets of Φ(M), not one", visible.len())));
    }
    let (a, b) = visible[0];
    let base_idx: Vec<usize> = (0..phi_m.vertices().len()).filter(|&i| (arith::dot_q(a, &phi_m.vertices()[i]) + b).is_zero()).collect();
    let base = phi_m.sub_polytope(&base_idx);
    let mut hull = phi_m.vertices().to_vec();
    hull.push(v.clone());
    if Polytope::from_points(r, &hull).vertices() != phi_n.vertices() {
        return Ok(Verdict::Fails("Φ(N) ≠ Φ(M) ∪ δ".into()));
    }
    let mut dv = base.vertices().to_vec();
    dv.push(v.clone());
    let delta = Polytope::from_points(r, &dv);
    Ok(Verdict::Holds(PyramidalExtension { m: m.clone(), n: n.clone(), phi_n, phi_m, delta, apex: v, base }))
}

// ---------------------------------------------------------------------------------------------
// Polarized monoids
// ---------------------------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacetSign {
    Positive,
    Negative,
}

impl FacetSign {
    pub fn flip(self) -> FacetSign {
        match self {
            FacetSign::Positive => FacetSign::Negative,
            FacetSign::Negative => FacetSign::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetReport {
    /// Rays of `ℝ₊F`.
    pub rays: Vec<IVec>,
    pub off_hyperplane: bool,
    pub lattice_split: bool,
    pub hilbert_split: bool,
}

impl FacetReport {
    pub fn pass(&self) -> bool {
        self.off_hyperplane && self.lattice_split && self.hilbert_split
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedReport {
    pub clauses: Vec<Clause>,
    pub facets: Vec<FacetReport>,
    pub failure: Option<String>,
}

impl PolarizedReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }

    pub fn failing_facet(&self) -> Option<&[IVec]> {
        self.facets.iter().find(|f| !f.pass()).map(|f| f.rays.as_slice())
    }
}

/// Checks the cone identity `C(N) = ℝ₊t + ℝ₊Γ` and, for each facet `F` of `Γ`,
/// `N ∩ (ℝ₊t + ℝ₊F) ≅ ℤ₊ × N(F)` via a lattice splitting and a Hilbert-basis comparison.
pub fn verify_polarized(t: &[Int], gamma: &Polytope, n: &AffineMonoid) -> PolarizedReport {
    let mut clauses = Vec::new();
    let mut facets = Vec::new();
    let fail =
        |clauses: Vec<Clause>, facets: Vec<FacetReport>, why: &str| PolarizedReport { clauses, facets, failure: Some(why.to_string()) };
    let r = n.ambient_rank();
    if t.len() != r || gamma.ambient_dim() != r {
        clauses.push(clause("ranks agree", false));
        return fail(clauses, facets, "rank mismatch");
    }
    let normal = n.has_trivial_units() && n.is_normal().unwrap_or(false);
    clauses.push(clause("N normal with trivial units", normal));
    if !normal {
        return fail(clauses, facets, "N is not normal with trivial units");
    }
    let d = match cone_over(r, gamma.vertices()) {
        Ok(d) if d.is_pointed() && gamma.dim() >= 0 && d.dim() as isize == gamma.dim() + 1 => d,
        _ => {
            clauses.push(clause("Γ spans a pointed cone of dimension dim Γ + 1", false));
            return fail(clauses, facets, "Γ is degenerate");
        }
    };
    let t_in = n.contains(t);
    clauses.push(clause("t ∈ N", t_in));
    if !t_in {
        return fail(clauses, facets, "t not in N");
    }
    let edge = n.check_edge_generator(t).is_ok();
    clauses.push(clause("pole is the generator of an edge of C(N)", edge));
    if !edge {
        return fail(clauses, facets, "pole not edge generator");
    }
    let full = d.dim() == n.cone().dim();
    clauses.push(clause("dim Γ = dim Φ(N)", full));
    if !full {
        return fail(clauses, facets, "Γ does not span Φ(N)");
    }
    let mut gens = d.rays().to_vec();
    gens.push(t.to_vec());
    let ident = Cone::from_generators(r, &gens).is_ok_and(|c| &c == n.cone());
    clauses.push(clause("C(N) = ℝ₊t + ℝ₊Γ", ident));
    if !ident {
        return fail(clauses, facets, "cone identity fails");
    }
    let gp = n.gp();
    let tl = Lattice::from_generators(r, &[t.to_vec()]);
    let mut first_bad: Option<String> = None;
    for i in 0..d.facets().len() {
        let f = d.facet_cone(i);
        let off = !arith::dot_i(&d.facets()[i], t).is_zero();
        let gf = gp.restrict(f.equations());
        let split = lattice_eq(&gf.sum(&tl), gp);
        let mut ft = f.rays().to_vec();
        ft.push(t.to_vec());
        let hb_split = match (Cone::from_generators(r, &ft), hilbert_basis(&f, gp)) {
            (Ok(cft), Ok(mut expect)) => {
                expect.push(t.to_vec());
                expect.sort();
                hilbert_basis(&cft, gp).is_ok_and(|hb| hb == expect)
            }
            _ => false,
        };
        let rep = FacetReport { rays: f.rays().to_vec(), off_hyperplane: off, lattice_split: split, hilbert_split: hb_split };
        clauses.push(clause(format!("facet {:?}: N ∩ (ℝ₊t + ℝ₊F) ≅ ℤ₊ × N(F)", fmt_rays(&rep.rays)), rep.pass()));
        if !rep.pass() && first_bad.is_none() {
            first_bad = Some(format!("facet {:?} does not split off ℤ₊t", fmt_rays(&rep.rays)));
        }
        facets.push(rep);
    }
    PolarizedReport { clauses, facets, failure: first_bad }
}

fn fmt_rays(r: &[IVec]) -> Vec<Vec<String>> {
    r.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect()
}

/// Sign of facet `i` of the cone `D = ℝ₊Γ` relative to the pole.
pub fn facet_sign_of(t: &[Int], d: &Cone, i: usize) -> Result<FacetSign> {
    let nu = d.facets().get(i).ok_or_else(|| Error::Input(format!("no facet {i}")))?;
    match arith::sign_i(&arith::dot_i(nu, t)) {
        1 => Ok(FacetSign::Positive),
        -1 => Ok(FacetSign::Negative),
        _ => pre("not polarized: t lies on the hyperplane of a facet"),
    }
}

/// A verified polarized monoid `(t, Γ, N)`, stored as an integral model:
/// the actual objects are the stored ones divided by `scale`.
#[derive(Debug, Clone)]
pub struct PolarizedMonoid {
    t: IVec,
    gamma: Polytope,
    d: Cone,
    n: AffineMonoid,
    scale: Int,
    signs: Vec<FacetSign>,
}

impl PolarizedMonoid {
    pub fn new(t: &[Int], gamma: &Polytope, n: &AffineMonoid) -> Result<PolarizedMonoid> {
        let rep = verify_polarized(t, gamma, n);
        if let Some(f) = rep.failure {
            return pre(format!("not polarized: {f}"));
        }
        let d = cone_over(n.ambient_rank(), gamma.vertices())?;
        let signs = (0..d.facets().len()).map(|i| facet_sign_of(t, &d, i)).collect::<Result<Vec<_>>>()?;
        Ok(PolarizedMonoid { t: t.to_vec(), gamma: gamma.clone(), d, n: n.clone(), scale: Int::one(), signs })
    }

    pub fn with_scale(mut self, scale: Int) -> PolarizedMonoid {
        self.scale = scale;
        self
    }

    pub fn t(&self) -> &IVec {
        &self.t
    }

    pub fn gamma(&self) -> &Polytope {
        &self.gamma
    }

    /// `ℝ₊Γ`; its facets index the facets of Γ.
    pub fn gamma_cone(&self) -> &Cone {
        &self.d
    }

    pub fn monoid(&self) -> &AffineMonoid {
        &self.n
    }

    pub fn scale(&self) -> &Int {
        &self.scale
    }

    pub fn facet_signs(&self) -> &[FacetSign] {
        &self.signs
    }

    /// The pole in actual coordinates.
    pub fn t_actual(&self) -> QVec {
        arith::scale_q(&Rat::new(Int::one(), self.scale.clone()), &arith::to_q(&self.t))
    }

    /// `N(Γ) = N ∩ ℝ₊Γ`.
    pub fn face_monoid(&self) -> Result<AffineMonoid> {
        AffineMonoid::from_cone_lattice(&self.d, self.n.gp())
    }

    /// Equality of the underlying triples.
    pub fn same_as(&self, other: &PolarizedMonoid) -> bool {
        self.t == other.t
            && self.scale == other.scale
            && self.d == other.d
            && self.n.cone() == other.n.cone()
            && lattice_eq(self.n.gp(), other.n.gp())
    }
}

pub fn facet_sign(p: &PolarizedMonoid, i: usize) -> Result<FacetSign> {
    facet_sign_of(&p.t, &p.d, i)
}

/// `(−t, Γ, ℤ₊(−t) + N(Γ))`.
pub fn antipode(p: &PolarizedMonoid) -> Result<PolarizedMonoid> {
    let r = p.n.ambient_rank();
    let mt = arith::neg_i(&p.t);
    let mut gens = p.d.rays().to_vec();
    gens.push(mt.clone());
    let cone = Cone::from_generators(r, &gens)?;
    let nm = AffineMonoid::from_cone_lattice(&cone, p.n.gp())?;
    let mut sum_gens = hilbert_basis(&p.d, p.n.gp())?;
    sum_gens.push(mt.clone());
    let generated = AffineMonoid::new(r, &sum_gens)?;
    if !nm.generators().iter().all(|g| generated.contains(g)) {
        return Err(Error::Geometry("ℤ₊(−t) + N(Γ) is not the normal monoid of its cone".into()));
    }
    Ok(PolarizedMonoid::new(&mt, &p.gamma, &nm)?.with_scale(p.scale.clone()))
}

/// The two maximal cones `C(N)*`, `C(N⁻)*` of the fan of the glued scheme.
#[derive(Debug, Clone)]
pub struct SchemeFan {
    pub plus: Cone,
    pub minus: Cone,
    pub common: Cone,
    pub clauses: Vec<Clause>,
}

impl SchemeFan {
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

pub fn scheme_fan(p: &PolarizedMonoid) -> Result<SchemeFan> {
    let r = p.n.ambient_rank();
    let anti = antipode(p)?;
    let plus = p.n.cone().dual();
    let minus = anti.n.cone().dual();
    let dg = p.d.dual();
    let half = |s: &IVec| -> Result<Cone> { dg.intersect(&Cone::from_inequalities(r, std::slice::from_ref(s), &[])?) };
    let common = plus.intersect(&minus)?;
    let wall = dg.intersect(&Cone::from_inequalities(r, &[], std::slice::from_ref(&p.t))?)?;
    let is_facet = |c: &Cone| common.dim() + 1 == c.dim() && (0..c.facets().len()).any(|i| c.facet_cone(i) == common);
    let clauses = vec![
        clause("C(N)* = C(N(Γ))* ∩ {t ≥ 0}", plus == half(&p.t)?),
        clause("C(N⁻)* = C(N(Γ))* ∩ {t ≤ 0}", minus == half(&arith::neg_i(&p.t))?),
        clause("C(N)* ∪ C(N⁻)* = C(N(Γ))*", plus.is_subset_of(&dg) && minus.is_subset_of(&dg)),
        clause("C(N)* ∩ C(N⁻)* = C(N(Γ))* ∩ t^⊥", common == wall),
        clause("common facet of both maximal cones", is_facet(&plus) && is_facet(&minus)),
        clause("both maximal cones full-dimensional", plus.dim() == r && minus.dim() == r),
    ];
    Ok(SchemeFan { plus, minus, common, clauses })
}

// ---------------------------------------------------------------------------------------------
// Free approximation of simplicial dilations
// ---------------------------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FreeApprox {
    /// Free generators, in ambient coordinates.
    pub generators: Vec<QVec>,
    /// The generators lie in the interior of this stage.
    pub stage: usize,
    pub clauses: Vec<Clause>,
}

/// Functional vanishing on `rows` (a hyperplane basis in ℚ^d), positive on `pos`.
fn normal_of(rows: &[QVec], d: usize, pos: &[Rat]) -> QVec {
    let ns = linalg::nullspace(rows, d);
    let nu = ns[0].clone();
    if arith::dot_q(&nu, pos).is_negative() {
        nu.iter().map(|x| -x).collect()
    } else {
        nu
    }
}

/// A basis `f` of a superlattice of ℤ^d inside `(1/n)ℤ^d`, with every `f_i` interior to the
/// simplicial cone spanned by `rays` and `pts ⊂ cone(f)`.
fn free_cover(rays: &[QVec], pts: &[IVec], n: &Int, offset_cap: u32) -> Option<Vec<QVec>> {
    let d = rays.len();
    if d == 1 {
        let s = if rays[0][0].is_positive() { 1 } else { -1 };
        return Some(vec![vec![Rat::from_integer(Int::from(s))]]);
    }
    let e1 = &rays[0];
    let facet = &rays[1..];
    let nu = normal_of(facet, d, e1);
    let rest_sum = facet.iter().fold(vec![Rat::zero(); d], |a, r| arith::add_q(&a, r));
    for n0 in 1..=offset_cap {
        let tau = arith::primitive_q(&arith::add_q(&arith::scale_q(&Rat::from_integer(Int::from(n0 + 1)), e1), &rest_sum));
        let (_, comp) = complete_basis(&Lattice::full(d), &tau).ok()?;
        let mut basis = vec![arith::to_q(&tau)];
        basis.extend(comp.iter().map(|b| arith::to_q(b)));
        let proj = |x: &[Rat]| -> QVec { linalg::solve_left(&basis, x).expect("basis")[1..].to_vec() };
        let qrays: Vec<QVec> = facet.iter().map(|r| proj(r)).collect();
        let qcone = Cone::over_points(d - 1, &qrays).ok()?;
        let qpts: Vec<IVec> = pts.iter().map(|p| proj(&arith::to_q(p)).iter().map(|x| x.to_integer()).collect()).collect();
        if !qpts.iter().all(|p| qcone.interior_contains(p)) {
            continue;
        }
        let g = free_cover(&qrays, &qpts, n, offset_cap)?;
        let tq = arith::to_q(&tau);
        let nu_tau = arith::dot_q(&nu, &tq);
        let inv_n = Rat::new(Int::one(), n.clone());
        let mut f = vec![arith::scale_q(&inv_n, &tq)];
        for gi in &g {
            let lift = gi.iter().zip(&comp).fold(vec![Rat::zero(); d], |a, (c, b)| arith::add_q(&a, &arith::scale_q(c, &arith::to_q(b))));
            let xstar = -arith::dot_q(&nu, &lift) / &nu_tau;
            let a = arith::floor_rat(&(&xstar * Rat::from_integer(n.clone()))) + 1;
            f.push(arith::add_q(&lift, &arith::scale_q(&(Rat::from_integer(a) * &inv_n), &tq)));
        }
        let ok = pts.iter().all(|p| linalg::solve_left(&f, &arith::to_q(p)).is_some_and(|c| c.iter().all(|x| !x.is_negative())));
        return ok.then_some(f);
    }
    None
}

/// A free monoid `F ≅ ℤ₊^k` inside the interior of a stage of `L^𝔠` with `S ⊆ F` and, when given,
/// `target ⊆ gp(F)`. `S` must lie in the interior of stage `j`.
pub fn approx_a_free(
    l: &AffineMonoid,
    cseq: &CSeq,
    s: &[QVec],
    j: usize,
    target: Option<&[QVec]>,
    caps: &ApproxCaps,
) -> Result<FreeApprox> {
    if !l.has_trivial_units() {
        return Err(Error::NotPointed);
    }
    if !l.cone().is_simplicial() {
        return pre("not simplicial");
    }
    let st = stage(l, cseq, j);
    if !s.iter().all(|x| st.interior_contains(x)) {
        return pre("S is not in the interior of the given stage");
    }
    let r = l.ambient_rank();
    let basis_q = l.gp().basis_q();
    let k = basis_q.len();
    let coords = |x: &[Rat]| linalg::solve_left(&basis_q, x).expect("in gp span");
    let dj = Rat::from_integer(cseq.denom(j));
    let rays: Vec<QVec> = l.cone().rays().iter().map(|x| coords(&arith::to_q(x))).collect();
    let pts: Vec<IVec> = s.iter().map(|x| coords(&arith::scale_q(&dj, x)).iter().map(|v| v.to_integer()).collect()).collect();
    for extra in 0..=caps.stage {
        let n = cseq.denom(j + extra) / cseq.denom(j);
        let Some(f) = free_cover(&rays, &pts, &n, caps.offset) else { continue };
        let gens: Vec<QVec> = f.iter().map(|c| arith::scale_q(&(Rat::one() / &dj), &linalg::mat_vec_left(c, &basis_q))).collect();
        let in_span = |x: &[Rat]| linalg::solve_left(&gens, x).is_some_and(|c| arith::is_integral(&c));
        let independent = linalg::rank(&gens, r) == k;
        let s_in =
            s.iter().all(|x| linalg::solve_left(&gens, x).is_some_and(|c| arith::is_integral(&c) && c.iter().all(|v| !v.is_negative())));
        let t_in = target.is_none_or(|g| g.iter().all(|x| in_span(x)));
        let Some(deep) = (j + extra..=j + caps.stage).find(|&jj| {
            let st = stage(l, cseq, jj);
            gens.iter().all(|g| st.interior_contains(g))
        }) else {
            continue;
        };
        let clauses = vec![
            clause("generators independent", independent),
            clause(format!("generators interior to stage {deep}"), true),
            clause("S ⊆ F", s_in),
            clause("target lattice ⊆ gp(F)", t_in),
        ];
        if independent && s_in && t_in {
            return Ok(FreeApprox { generators: gens, stage: deep, clauses });
        }
    }
    Err(Error::CapExceeded("approximation depth exceeded".into()))
}

// ---------------------------------------------------------------------------------------------
// Systems of polarized monoids approximating a pyramidal extension
// ---------------------------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ApproxB {
    /// `(t, Γ_l, N_l)` for `l = 1..s`, integral models with common scale.
    pub triples: Vec<PolarizedMonoid>,
    /// Every `N_l` lies in the interior part of this stage of `N^𝔠`.
    pub stage: usize,
    pub clauses: Vec<Clause>,
}

/// Least-norm functional on the span of `basis` taking `vals` on it.
fn functional_on_basis(basis: &[QVec], vals: &[Rat]) -> QVec {
    let gram: Vec<QVec> = basis.iter().map(|a| basis.iter().map(|b| arith::dot_q(a, b)).collect()).collect();
    let ginv = linalg::inverse(&gram).expect("independent basis");
    let y: QVec = ginv.iter().map(|row| arith::dot_q(row, vals)).collect();
    linalg::mat_vec_left(&y, basis)
}

struct Attempt {
    cones: Vec<Cone>,
    lattice: Lattice,
}

/// Builds `s` nested polarized monoids with common pole, following the apex of the extension.
/// Requires `W ⊂ int Φ(N)` and `W′ ⊂ int Φ(M)`, given as points on the corresponding rays.
pub fn approx_b_construct(
    ext: &PyramidalExtension,
    cseq: &CSeq,
    s: usize,
    j: usize,
    w: &[QVec],
    w_prime: &[QVec],
    caps: &ApproxCaps,
) -> Result<ApproxB> {
    if s == 0 {
        return pre("s must be ≥ 1");
    }
    let (m, n) = (&ext.m, &ext.n);
    let r = n.ambient_rank();
    let cn = n.cone();
    let cm = m.cone();
    if !w.iter().all(|x| cn.interior_contains_q(x)) {
        return pre("W not interior");
    }
    if !w_prime.iter().all(|x| cm.interior_contains_q(x)) {
        return pre("W′ not interior");
    }
    let xi = cn.xi();
    let xiq = arith::to_q(&xi);
    let span_eqs = cn.equations().to_vec();
    let phis: Vec<QVec> = cm.facets().iter().map(|f| arith::to_q(f)).collect();
    let centre_p = ext.phi_n.centroid();
    let mut probe: Vec<QVec> = w_prime.iter().map(|x| slice(x, &xi)).collect();
    probe.push(ext.phi_m.centroid());
    let eps_base = probe.iter().flat_map(|x| phis.iter().map(move |f| arith::dot_q(f, x))).min().expect("nonempty");
    let mut last = String::from("no attempt");
    for round in 0..caps.refine {
        let k0 = Rat::from_integer(Int::from(4u64) << round);
        let v0 = arith::add_q(&ext.apex, &arith::scale_q(&(Rat::one() / &k0), &arith::sub_q(&centre_p, &ext.apex)));
        let vals: Vec<Rat> = phis.iter().map(|f| arith::dot_q(f, &v0)).collect();
        if !ext.phi_n.relint_contains(&v0) || vals.iter().any(|x| x.is_zero()) || !vals.iter().any(|x| x.is_negative()) {
            last = "apex approximation v₀ badly placed".into();
            continue;
        }
        let eps1 = &eps_base / Rat::from_integer(Int::from(2u64) << round);
        let eps: Vec<Rat> = (1..=s).map(|l| &eps1 * Rat::new(Int::from(s + 1 - l), Int::from(s))).collect();
        let shrink = |e: &Rat| -> Result<Cone> {
            let ineqs: Vec<IVec> = phis.iter().map(|f| arith::primitive_q(&arith::sub_q(f, &arith::scale_q(e, &xiq)))).collect();
            Cone::from_inequalities(r, &ineqs, &span_eqs)
        };
        let limit1 = shrink(&eps[0])?;
        let mut lim_gens = limit1.rays().to_vec();
        lim_gens.push(arith::primitive_q(&v0));
        let limit_cone = Cone::from_generators(r, &lim_gens)?;
        if !w.iter().all(|x| limit_cone.interior_contains_q(x)) || !w_prime.iter().all(|x| limit1.interior_contains_q(x)) {
            last = "W or W′ escapes the limiting shape".into();
            continue;
        }
        let line = n.gp().restrict(&Lattice::from_generators(r, &[arith::primitive_q(&v0)]).span_equations());
        let mut tau = line.basis()[0].clone();
        if arith::dot_i(&xi, &tau).is_negative() {
            tau = arith::neg_i(&tau);
        }
        let (tau, rest) = complete_basis(n.gp(), &tau)?;
        let tq = arith::to_q(&tau);
        for extra in 1..=caps.stage {
            let big_j = j + extra;
            let nn = cseq.denom(big_j) / cseq.denom(j);
            let mut basis = vec![tau.clone()];
            basis.extend(rest.iter().map(|b| arith::scale_i(&nn, b)));
            let basis_q: Vec<QVec> = basis.iter().map(|b| arith::to_q(b)).collect();
            let mut cones = Vec::with_capacity(s);
            for e in &eps {
                let ineqs: Vec<IVec> = phis
                    .iter()
                    .map(|f| {
                        let psi = arith::sub_q(f, &arith::scale_q(e, &xiq));
                        let pt = arith::dot_q(&psi, &tq);
                        let mut v = vec![Rat::from_integer(Int::from(arith::sign(&pt)))];
                        v.extend(basis_q[1..].iter().map(|b| Rat::from_integer(round_rat(&(arith::dot_q(&psi, b) / pt.abs())))));
                        arith::primitive_q(&functional_on_basis(&basis_q, &v))
                    })
                    .collect();
                cones.push(Cone::from_inequalities(r, &ineqs, &span_eqs)?);
            }
            let att = Attempt { cones, lattice: Lattice::from_generators(r, &basis) };
            match check_attempt(&att, &tau, ext, w, w_prime) {
                Err(why) => {
                    last = why;
                    continue;
                }
                Ok(mut clauses) => {
                    let scale = nn.clone() * cseq.denom(j);
                    match finish_attempt(&att, &tau, &xi, &scale, &mut clauses) {
                        Ok(triples) => {
                            clauses.push(clause(format!("every N_l lies in stage {big_j} of N^𝔠"), true));
                            return Ok(ApproxB { triples, stage: big_j, clauses });
                        }
                        Err(why) => last = why,
                    }
                }
            }
        }
    }
    Err(Error::CapExceeded(format!("polarized approximation: {last}")))
}

/// Cheap cone-level checks of a candidate system.
fn check_attempt(
    att: &Attempt,
    tau: &IVec,
    ext: &PyramidalExtension,
    w: &[QVec],
    w_prime: &[QVec],
) -> std::result::Result<Vec<Clause>, String> {
    let (cm, cn) = (ext.m.cone(), ext.n.cone());
    let r = cn.ambient_rank();
    let mut out = Vec::new();
    let mut need = |name: String, ok: bool| -> std::result::Result<(), String> {
        out.push(clause(name.clone(), ok));
        if ok {
            Ok(())
        } else {
            Err(name)
        }
    };
    let s = att.cones.len();
    for (l, d) in att.cones.iter().enumerate() {
        need(format!("Γ_{} full-dimensional", l + 1), d.dim() == cn.dim() && d.is_pointed())?;
        need(format!("Γ_{} ⊂ int Φ(M)", l + 1), rays_interior(d, cm))?;
        let mut g = d.rays().to_vec();
        g.push(tau.clone());
        let c = Cone::from_generators(r, &g).map_err(|e| e.to_string())?;
        need(format!("N_{} ∖ 0 ⊂ int C(N)", l + 1), rays_interior(&c, cn))?;
        if l + 1 < s {
            need(format!("Γ_{} ⊆ Γ_{} and N_{} ⊆ N_{}", l + 1, l + 2, l + 1, l + 2), d.is_subset_of(&att.cones[l + 1]))?;
        }
    }
    let d1 = &att.cones[0];
    let mut g = d1.rays().to_vec();
    g.push(tau.clone());
    let c1 = Cone::from_generators(r, &g).map_err(|e| e.to_string())?;
    need("W ⊆ Φ(N_1)".into(), w.iter().all(|x| c1.contains_q(x)))?;
    need("W′ ⊆ Γ_1".into(), w_prime.iter().all(|x| d1.contains_q(x)))?;
    Ok(out)
}

/// Hilbert-basis level checks and assembly of the verified triples.
fn finish_attempt(
    att: &Attempt,
    tau: &IVec,
    xi: &[Int],
    scale: &Int,
    clauses: &mut Vec<Clause>,
) -> std::result::Result<Vec<PolarizedMonoid>, String> {
    let r = tau.len();
    let s = att.cones.len();
    for l in 0..s.saturating_sub(1) {
        let hb = hilbert_basis(&att.cones[l], &att.lattice).map_err(|e| e.to_string())?;
        let next = &att.cones[l + 1];
        let ok = next.facets().iter().all(|mu| {
            let mt = arith::dot_i(mu, tau).abs();
            hb.iter().all(|h| arith::dot_i(mu, h) > mt)
        });
        clauses.push(clause(format!("±t + (N_{l1}(Γ_{l1}) ∖ 0) ⊂ int N_{l2}(Γ_{l2})", l1 = l + 1, l2 = l + 2), ok));
        if !ok {
            return Err(format!("shift condition fails between levels {} and {}", l + 1, l + 2));
        }
    }
    let mut triples = Vec::with_capacity(s);
    for (l, d) in att.cones.iter().enumerate() {
        let gamma = Polytope::from_points(r, &d.rays().iter().map(|x| slice(&arith::to_q(x), xi)).collect::<Vec<_>>());
        let mut g = d.rays().to_vec();
        g.push(tau.clone());
        let c = Cone::from_generators(r, &g).map_err(|e| e.to_string())?;
        let nl = AffineMonoid::from_cone_lattice(&c, &att.lattice).map_err(|e| e.to_string())?;
        let rep = verify_polarized(tau, &gamma, &nl);
        clauses.push(clause(format!("(t, Γ_{0}, N_{0}) polarized", l + 1), rep.holds()));
        if let Some(f) = rep.failure {
            return Err(format!("level {} not polarized: {f}", l + 1));
        }
        let p = PolarizedMonoid::new(tau, &gamma, &nl).map_err(|e| e.to_string())?;
        triples.push(p.with_scale(scale.clone()));
    }
    clauses.push(clause("gp(N)/(c₁⋯c_j) ⊆ gp(N_1)", true));
    Ok(triples)
}

// ---------------------------------------------------------------------------------------------
// Bipyramidal approximation
// ---------------------------------------------------------------------------------------------

/// `l ∩ (−t + (C₁ ∩ C₂))`, where `l` is the ray of `C₁` off the common facet.
pub fn omega_point(c1: &Cone, c2: &Cone, t: &[Rat]) -> Result<QVec> {
    let common = c1.intersect(c2)?;
    if common.dim() + 1 != c1.dim() {
        return pre("C₁ ∩ C₂ is not a facet of C₁");
    }
    let off: Vec<&IVec> = c1.rays().iter().filter(|x| !common.contains(x)).collect();
    if off.len() != 1 {
        return pre("C₁ is not a pyramid over C₁ ∩ C₂");
    }
    let a = arith::to_q(off[0]);
    let (mut basis, _) = linalg::rref(&common.rays().iter().map(|x| arith::to_q(x)).collect::<Vec<_>>(), c1.ambient_rank());
    basis.push(a.iter().map(|x| -x).collect());
    let sol = linalg::solve_left(&basis, t).ok_or_else(|| Error::Geometry("t is not in the span of C₁".into()))?;
    let lambda = sol.last().expect("nonempty").clone();
    if lambda.is_negative() {
        return Err(Error::Geometry("l does not meet −t + (C₁ ∩ C₂)".into()));
    }
    Ok(arith::scale_q(&lambda, &a))
}

#[derive(Debug, Clone)]
pub struct Bipyramid {
    pub c: Cone,
    pub c1: Cone,
    pub c2: Cone,
    pub common: Cone,
    pub omega: QVec,
    /// `ω ∈ gp(N)/(c₁⋯c_stage)`.
    pub stage: usize,
    pub clauses: Vec<Clause>,
}

/// A bipyramidal cone `C = C₁ ∪ C₂` inside `int C(N)` adapted to the polarized monoid `p`,
/// where `C(N) = C′ ∪ C″` is a split into pyramids along a common base facet.
pub fn bipyramidal_approx(
    n: &AffineMonoid,
    c_prime: &Cone,
    c_second: &Cone,
    p: &PolarizedMonoid,
    cseq: &CSeq,
    caps: &ApproxCaps,
) -> Result<Bipyramid> {
    let r = n.ambient_rank();
    let cn = n.cone();
    let base = c_prime.intersect(c_second)?;
    let mut union = c_prime.rays().to_vec();
    union.extend(c_second.rays().iter().cloned());
    if Cone::from_generators(r, &union)? != *cn || base.dim() + 1 != cn.dim() || c_prime.dim() != cn.dim() || c_second.dim() != cn.dim() {
        return pre("C′ ∪ C″ is not a split of C(N) along a common facet");
    }
    let apex: Vec<&IVec> = c_prime.rays().iter().filter(|x| !base.contains(x)).collect();
    if apex.len() != 1 {
        return pre("C′ is not a pyramid over C′ ∩ C″");
    }
    let t = p.t_actual();
    if !cn.interior_contains_q(&t) || c_prime.contains_q(&t) || !c_second.contains_q(&t) {
        return pre("t must lie in int C(N) and in C″ ∖ C′");
    }
    if !rays_interior(p.monoid().cone(), cn) {
        return pre("L ∖ 0 must lie in int C(N)");
    }
    if !p.gamma().vertices().iter().all(|x| c_prime.interior_contains_q(x)) {
        return pre("Γ must lie in int Φ(M)");
    }
    let j0 = (0..=caps.stage)
        .find(|&jj| n.gp().contains_q(&arith::scale_q(&Rat::from_integer(cseq.denom(jj)), &t)))
        .ok_or_else(|| Error::CapExceeded("t lies in no stage lattice".into()))?;
    let xi = cn.xi();
    let base_pts: Vec<QVec> = base.rays().iter().map(|x| slice(&arith::to_q(x), &xi)).collect();
    let apex_pt = slice(&arith::to_q(apex[0]), &xi);
    let mut all = base_pts.clone();
    all.push(apex_pt.clone());
    let centre = Polytope::from_points(r, &all).centroid();
    let toward = |x: &QVec, rho: &Rat| arith::add_q(&centre, &arith::scale_q(rho, &arith::sub_q(x, &centre)));
    let mut last = String::from("no attempt");
    for a in 1..=caps.refine {
        let rho = Rat::one() - Rat::new(Int::one(), Int::one() << a);
        let fb: Vec<QVec> = base_pts.iter().map(|x| toward(x, &rho)).collect();
        let ap = toward(&apex_pt, &rho);
        let f = cone_over(r, &fb)?;
        let (mut sb, _) = linalg::rref(&fb, r);
        sb.push(ap.iter().map(|x| -x).collect());
        let Some(sol) = linalg::solve_left(&sb, &t) else {
            last = "t outside the span of the approximating pyramid".into();
            continue;
        };
        let lambda = sol.last().expect("nonempty").clone();
        if !lambda.is_positive() {
            last = "apex ray does not reach −t + F".into();
            continue;
        }
        let target = arith::add_q(&t, &arith::scale_q(&lambda, &ap));
        let lf = n.gp().restrict(f.equations());
        let lfq = lf.basis_q();
        let Some(coords) = linalg::solve_left(&lfq, &target) else {
            last = "facet span misses the lattice".into();
            continue;
        };
        for big_j in j0..=j0 + caps.stage {
            let dj = Rat::from_integer(cseq.denom(big_j));
            let y: QVec = coords.iter().map(|c| Rat::from_integer(round_rat(&(c * &dj))) / &dj).collect();
            let pnt = linalg::mat_vec_left(&y, &lfq);
            let omega = arith::sub_q(&pnt, &t);
            if !f.interior_contains_q(&pnt) || !c_prime.interior_contains_q(&omega) {
                last = "rounded ω misses the approximating pyramid".into();
                continue;
            }
            let mut g1 = fb.clone();
            g1.push(omega.clone());
            let mut g2 = fb.clone();
            g2.push(t.clone());
            let mut gall = g1.clone();
            gall.push(t.clone());
            let (c1, c2, c) = (cone_over(r, &g1)?, cone_over(r, &g2)?, cone_over(r, &gall)?);
            let common = c1.intersect(&c2)?;
            let mut g2b = common.rays().to_vec();
            g2b.push(arith::primitive_q(&t));
            let clauses = vec![
                clause("C ∖ 0 ⊂ int C(N)", rays_interior(&c, cn)),
                clause("Γ ⊂ int C₁", p.gamma().vertices().iter().all(|x| c1.interior_contains_q(x))),
                clause("C₁ ∖ 0 ⊂ int C′", rays_interior(&c1, c_prime)),
                clause("L ⊆ C", p.monoid().cone().rays().iter().all(|x| c.contains(x))),
                clause("C₁ ∩ C₂ = F", common == f),
                clause("C₂ = ℝ₊t + (C₁ ∩ C₂)", Cone::from_generators(r, &g2b)? == c2),
                clause("t + ω ∈ relint(C₁ ∩ C₂)", f.interior_contains_q(&pnt)),
                clause("ω = l ∩ (−t + (C₁ ∩ C₂))", omega_point(&c1, &c2, &t).is_ok_and(|o| o == omega)),
                clause(format!("ω ∈ gp(N)/(c₁⋯c_{big_j})"), n.gp().contains_q(&arith::scale_q(&dj, &omega))),
            ];
            if let Some(bad) = clauses.iter().find(|c| !c.pass) {
                last = bad.name.clone();
                continue;
            }
            return Ok(Bipyramid { c, c1, c2, common, omega, stage: big_j, clauses });
        }
    }
    Err(Error::CapExceeded(format!("bipyramidal approximation: {last}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ivec, qvec};

    fn quadrant() -> AffineMonoid {
        AffineMonoid::from_i64(&[&[1, 0], &[0, 1]]).unwrap()
    }

    fn seg(a: &[i64], b: &[i64]) -> Polytope {
        Polytope::from_points(2, &[qvec(a), qvec(b)])
    }

    fn square_ext() -> PyramidalExtension {
        let m = AffineMonoid::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1]]).unwrap();
        let n = AffineMonoid::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
        match is_pyramidal_extension(&m, &n).unwrap() {
            Verdict::Holds(e) => e,
            Verdict::Fails(f) => panic!("{f}"),
        }
    }

    #[test]
    fn polarized_quadrant() {
        let rep = verify_polarized(&ivec(&[0, 1]), &seg(&[1, 0], &[1, 1]), &quadrant());
        assert!(rep.holds(), "{rep:?}");
        let bad = verify_polarized(&ivec(&[0, 1]), &seg(&[1, 0], &[2, 1]), &quadrant());
        assert_eq!(bad.failing_facet(), Some(&[ivec(&[2, 1])][..]));
        let pole = verify_polarized(&ivec(&[0, 2]), &seg(&[1, 0], &[1, 1]), &quadrant());
        assert_eq!(pole.failure.as_deref(), Some("pole not edge generator"));
    }

    #[test]
    fn antipode_and_signs() {
        let p = PolarizedMonoid::new(&ivec(&[0, 1]), &seg(&[1, 0], &[1, 1]), &quadrant()).unwrap();
        let mut signs = p.facet_signs().to_vec();
        signs.sort_by_key(|s| *s == FacetSign::Negative);
        assert_eq!(signs, vec![FacetSign::Positive, FacetSign::Negative]);
        let a = antipode(&p).unwrap();
        let expect = Cone::from_generators(2, &[ivec(&[0, -1]), ivec(&[1, 0]), ivec(&[1, 1])]).unwrap();
        assert_eq!(a.monoid().cone(), &expect);
        for i in 0..2 {
            assert_eq!(facet_sign(&a, i).unwrap(), facet_sign(&p, i).unwrap().flip());
        }
        assert!(antipode(&a).unwrap().same_as(&p));
        let fan = scheme_fan(&p).unwrap();
        assert!(fan.holds(), "{:?}", fan.clauses);
        assert_eq!(fan.common.rays().len(), 1);
    }

    #[test]
    fn pyramidal_triangle_in_square() {
        let e = square_ext();
        assert_eq!(e.apex_ray(), ivec(&[1, 1, 1]));
        assert_eq!(e.base_rays(), vec![ivec(&[0, 1, 1]), ivec(&[1, 0, 1])]);
        let n = e.n.clone();
        assert_eq!(is_pyramidal_extension(&n, &n).unwrap().reason(), Some("Φ(M) = Φ(N): δ would be empty"));
        let sub = AffineMonoid::from_i64(&[&[0, 0, 1], &[2, 0, 1], &[0, 2, 1], &[2, 2, 1]]).unwrap();
        let sub_n = AffineMonoid::from_cone_lattice(
            sub.cone(),
            &Lattice::from_generators(3, &[ivec(&[2, 0, 0]), ivec(&[0, 2, 0]), ivec(&[0, 0, 1])]),
        )
        .unwrap();
        let big = AffineMonoid::from_cone_lattice(sub.cone(), &Lattice::full(3)).unwrap();
        assert_eq!(is_pyramidal_extension(&sub_n, &big).unwrap().reason(), Some("gp mismatch"));
    }

    #[test]
    fn approx_a_examples() {
        let c = CSeq::constant(2).unwrap();
        let f = approx_a_free(&quadrant(), &c, &[qvec(&[1, 1])], 0, None, &ApproxCaps::default()).unwrap();
        assert_eq!(f.generators.len(), 2);
        assert!(f.clauses.iter().all(|c| c.pass));
        let s = vec![vec![Rat::new(1.into(), 2.into()), Rat::new(5.into(), 2.into())], qvec(&[3, 1])];
        let g = approx_a_free(&quadrant(), &c, &s, 1, Some(&[qvec(&[1, 0]), qvec(&[0, 1])]), &ApproxCaps::default()).unwrap();
        assert!(g.clauses.iter().all(|c| c.pass));
        let sq = AffineMonoid::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
        assert_eq!(
            approx_a_free(&sq, &c, &[qvec(&[1, 1, 2])], 0, None, &ApproxCaps::default()).unwrap_err(),
            Error::Precondition("not simplicial".into())
        );
    }

    #[test]
    fn omega_toy() {
        let c1 = Cone::from_generators(2, &[ivec(&[1, 0]), ivec(&[1, 1])]).unwrap();
        let c2 = Cone::from_generators(2, &[ivec(&[1, 1]), ivec(&[0, 1])]).unwrap();
        let w = omega_point(&c1, &c2, &qvec(&[0, 1])).unwrap();
        assert_eq!(w, qvec(&[1, 0]));
        assert!(quadrant().cone().interior_contains_q(&arith::add_q(&w, &qvec(&[0, 1]))));
    }

    #[test]
    fn approx_b_square() {
        let e = square_ext();
        let c = CSeq::constant(2).unwrap();
        let w = vec![qvec(&[1, 1, 2])];
        let wp = vec![qvec(&[1, 1, 3])];
        let out = approx_b_construct(&e, &c, 2, 1, &w, &wp, &ApproxCaps::default()).unwrap();
        assert_eq!(out.triples.len(), 2);
        assert!(out.clauses.iter().all(|c| c.pass), "{:?}", out.clauses);
        let one = approx_b_construct(&e, &c, 1, 1, &w, &wp, &ApproxCaps::default()).unwrap();
        assert_eq!(one.triples.len(), 1);
        let edge = vec![qvec(&[1, 0, 1])];
        assert_eq!(
            approx_b_construct(&e, &c, 2, 1, &edge, &wp, &ApproxCaps::default()).unwrap_err(),
            Error::Precondition("W not interior".into())
        );
        let c_prime = e.m.cone().clone();
        let c_second = Cone::from_generators(3, &[ivec(&[1, 0, 1]), ivec(&[0, 1, 1]), ivec(&[1, 1, 1])]).unwrap();
        let b = bipyramidal_approx(&e.n, &c_prime, &c_second, &out.triples[0], &c, &ApproxCaps::default()).unwrap();
        assert!(b.clauses.iter().all(|c| c.pass));
    }
}
