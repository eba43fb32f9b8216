//! Affine monoids inside ℤ^r: membership, closures, interior and region submonoids,
//! extremal inversion and free embeddings.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::arith::{self, IVec, Int, QVec, Rat};
use crate::cone::Cone;
use crate::error::{check_rank, pre, Error, Result};
use crate::hilbert::{hilbert_basis, ConeLattice};
use crate::lattice::Lattice;
use crate::linalg;
use crate::polytope::Polytope;

pub type MonoidElement = IVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// The monoid generated by `generators`.
    Generated,
    /// `int(M) ∪ {0}` for the monoid `M` generated by `generators`.
    Interior,
}

pub struct AffineMonoid {
    rank: usize,
    gens: Vec<IVec>,
    kind: Kind,
    gp: Lattice,
    cone: Cone,
    cl: OnceLock<std::result::Result<Arc<ConeLattice>, Error>>,
    normal: OnceLock<bool>,
}

impl Clone for AffineMonoid {
    fn clone(&self) -> Self {
        let normal = OnceLock::new();
        if let Some(&n) = self.normal.get() {
            let _ = normal.set(n);
        }
        AffineMonoid {
            rank: self.rank,
            gens: self.gens.clone(),
            kind: self.kind,
            gp: self.gp.clone(),
            cone: self.cone.clone(),
            cl: OnceLock::new(),
            normal,
        }
    }
}

impl std::fmt::Debug for AffineMonoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AffineMonoid").field("rank", &self.rank).field("kind", &self.kind).field("gens", &self.gens).finish()
    }
}

/// Result of closing a monoid under `2m, 3m ∈ M ⇒ m ∈ M`.
#[derive(Debug, Clone)]
pub struct Seminormalization {
    pub monoid: AffineMonoid,
    /// Number of one-step applications until the fixpoint.
    pub steps: usize,
    /// Elements adjoined by each step, lexicographically sorted.
    pub added: Vec<Vec<IVec>>,
}

/// `ℤ₊(−t) + M ≅ ℤ × N` via a basis `{t, b_2, …, b_k}` of `gp(M)`.
#[derive(Debug, Clone)]
pub struct ExtremalInversion {
    pub t: IVec,
    pub complement: Vec<IVec>,
    /// `N` in the coordinates of `b_2, …, b_k`.
    pub quotient: AffineMonoid,
    basis_q: Vec<QVec>,
}

impl ExtremalInversion {
    /// `x = a·t + Σ c_i b_i`; `None` when `x ∉ gp(M)`.
    pub fn split(&self, x: &[Int]) -> Option<(Int, IVec)> {
        let l = linalg::solve_left(&self.basis_q, &arith::to_q(x))?;
        if !arith::is_integral(&l) {
            return None;
        }
        let l: IVec = l.iter().map(|v| v.to_integer()).collect();
        Some((l[0].clone(), l[1..].to_vec()))
    }

    pub fn combine(&self, a: &Int, c: &[Int]) -> IVec {
        let mut x = arith::scale_i(a, &self.t);
        for (ci, b) in c.iter().zip(&self.complement) {
            x = arith::add_i(&x, &arith::scale_i(ci, b));
        }
        x
    }

    /// Membership in `ℤ₊(−t) + M`, read off through the splitting.
    pub fn contains_localized(&self, x: &[Int]) -> bool {
        self.split(x).is_some_and(|(_, c)| self.quotient.contains(&c))
    }
}

/// Lattice embedding `gp(M) ≅ ℤ^k` carrying `M` into `ℤ₊^k`.
#[derive(Debug, Clone)]
pub struct FreeEmbedding {
    /// One rational functional per output coordinate, in ambient coordinates.
    pub functionals: Vec<QVec>,
    /// The free dual monoid generators in `gp(M)`-coordinates.
    pub dual_basis: Vec<IVec>,
}

impl FreeEmbedding {
    pub fn apply(&self, x: &[Int]) -> Option<IVec> {
        let v: QVec = self.functionals.iter().map(|f| arith::dot_iq(x, f)).collect();
        arith::is_integral(&v).then(|| v.iter().map(|c| c.to_integer()).collect())
    }

    pub fn degree(&self, x: &[Int]) -> Option<Int> {
        self.apply(x).map(|v| v.iter().sum())
    }
}

impl AffineMonoid {
    pub fn new(rank: usize, gens: &[IVec]) -> Result<AffineMonoid> {
        for g in gens {
            check_rank(rank, g.len())?;
        }
        let mut g: Vec<IVec> = gens.iter().filter(|g| !arith::is_zero_i(g)).cloned().collect();
        g.sort();
        g.dedup();
        let gp = Lattice::from_generators(rank, &g);
        let cone = Cone::from_generators(rank, &g)?;
        Ok(AffineMonoid { rank, gens: g, kind: Kind::Generated, gp, cone, cl: OnceLock::new(), normal: OnceLock::new() })
    }

    /// The normal monoid `C ∩ L`.
    pub fn from_cone_lattice(cone: &Cone, lattice: &Lattice) -> Result<AffineMonoid> {
        let hb = hilbert_basis(cone, lattice)?;
        let m = AffineMonoid::new(cone.ambient_rank(), &hb)?;
        let _ = m.normal.set(true);
        Ok(m)
    }

    pub fn from_i64(gens: &[&[i64]]) -> Result<AffineMonoid> {
        let rank = gens.first().map_or(0, |g| g.len());
        AffineMonoid::new(rank, &gens.iter().map(|g| arith::ivec(g)).collect::<Vec<_>>())
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    /// `rank M = rank gp(M)`.
    pub fn rank(&self) -> usize {
        self.gp.dim()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Generators of the underlying finitely generated monoid.
    pub fn generators(&self) -> &[IVec] {
        &self.gens
    }

    pub fn gp(&self) -> &Lattice {
        &self.gp
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    /// `U(M) = 0`.
    pub fn has_trivial_units(&self) -> bool {
        self.cone.is_pointed()
    }

    pub fn cross_section(&self) -> Result<Polytope> {
        self.cone.cross_section()
    }

    fn cone_lattice(&self) -> Result<Arc<ConeLattice>> {
        self.cl.get_or_init(|| ConeLattice::new(&self.cone, &self.gp).map(Arc::new)).clone()
    }

    /// Positive integral grading on `gp(M)`, defined on `gp(M)` only.
    pub fn degree(&self, x: &[Int]) -> Result<Int> {
        self.cone_lattice()?.degree(x).ok_or_else(|| Error::Input("element outside gp(M)".into()))
    }

    fn generated_contains(&self, x: &[Int], memo: &mut HashMap<IVec, bool>) -> bool {
        if arith::is_zero_i(x) {
            return true;
        }
        if let Some(&b) = memo.get(x) {
            return b;
        }
        let mut ok = false;
        for g in &self.gens {
            let y = arith::sub_i(x, g);
            if self.cone.contains(&y) && self.generated_contains(&y, memo) {
                ok = true;
                break;
            }
        }
        memo.insert(x.to_vec(), ok);
        ok
    }

    fn base_contains(&self, x: &[Int]) -> bool {
        if !self.gp.contains(x) || !self.cone.contains(x) {
            return false;
        }
        if self.normal.get() == Some(&true) && self.kind == Kind::Generated {
            return true;
        }
        self.generated_contains(x, &mut HashMap::new())
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        if x.len() != self.rank {
            return false;
        }
        if arith::is_zero_i(x) {
            return true;
        }
        match self.kind {
            Kind::Generated => self.base_contains(x),
            Kind::Interior => self.cone.interior_contains(x) && self.base_contains(x),
        }
    }

    /// `contains` for the generated case, sharing the search memo across queries.
    fn contains_memo(&self, x: &[Int], memo: &mut HashMap<IVec, bool>) -> bool {
        debug_assert_eq!(self.kind, Kind::Generated);
        x.len() == self.rank && self.gp.contains(x) && self.cone.contains(x) && self.generated_contains(x, memo)
    }

    /// The interior ideal `int(M) = int(C(M)) ∩ M`.
    pub fn in_interior_ideal(&self, x: &[Int]) -> bool {
        !arith::is_zero_i(x) && self.cone.interior_contains(x) && self.base_contains(x)
    }

    fn require_pointed(&self) -> Result<()> {
        if self.has_trivial_units() {
            Ok(())
        } else {
            Err(Error::NotPointed)
        }
    }

    /// Members of degree at most `d`, ordered by degree then lexicographically.
    pub fn elements_up_to(&self, d: &Int) -> Result<Vec<IVec>> {
        self.require_pointed()?;
        let cl = self.cone_lattice()?;
        Ok(cl.points_up_to(d).into_iter().filter(|x| self.contains(x)).collect())
    }

    /// Irreducible members of degree at most `d`, lexicographically sorted.
    pub fn irreducibles_up_to(&self, d: &Int) -> Result<Vec<IVec>> {
        let elems = self.elements_up_to(d)?;
        let mut irr: Vec<IVec> = Vec::new();
        for x in elems.into_iter().filter(|x| !arith::is_zero_i(x)) {
            if !irr.iter().any(|h| self.contains(&arith::sub_i(&x, h))) {
                irr.push(x);
            }
        }
        irr.sort();
        Ok(irr)
    }

    /// The unique minimal generating set (pointed, finitely generated case).
    pub fn hilbert_basis(&self) -> Result<Vec<IVec>> {
        self.require_pointed()?;
        if self.kind == Kind::Interior && self.cone.dim() > 1 {
            return pre("interior submonoid of rank ≥ 2 is not finitely generated");
        }
        let cl = self.cone_lattice()?;
        let mut by_deg: Vec<(Int, IVec)> = self.gens.iter().map(|g| (cl.degree(g).expect("generator in gp"), g.clone())).collect();
        by_deg.sort();
        let mut irr: Vec<IVec> = Vec::new();
        for (_, g) in by_deg {
            if !irr.iter().any(|h| self.contains(&arith::sub_i(&g, h))) {
                irr.push(g);
            }
        }
        irr.sort();
        Ok(irr)
    }

    pub fn is_normal(&self) -> Result<bool> {
        if let Some(&n) = self.normal.get() {
            return Ok(n);
        }
        self.require_pointed()?;
        let n = match self.kind {
            Kind::Generated => hilbert_basis(&self.cone, &self.gp)?.iter().all(|h| self.base_contains(h)),
            Kind::Interior => self.interior_saturated()?,
        };
        let _ = self.normal.set(n);
        Ok(n)
    }

    /// `n(M) = C(M) ∩ gp(M)`; for an interior monoid this is `n(M)_*`.
    pub fn normalization(&self) -> Result<AffineMonoid> {
        self.require_pointed()?;
        let mut n = AffineMonoid::from_cone_lattice(&self.cone, &self.gp)?;
        if self.kind == Kind::Interior && self.cone.dim() > 1 {
            n.kind = Kind::Interior;
            let _ = n.normal.set(true);
        }
        Ok(n)
    }

    /// Checks `int(C) ∩ gp(M) ⊆ M`. Uses that `{n : p + Σ n_i e_i ∈ M}` is upward closed,
    /// so only the corner `n = 1_S` of each support pattern needs testing.
    fn interior_saturated(&self) -> Result<bool> {
        let witness = self.region_gap(&self.cone, &self.gp)?;
        Ok(witness.is_none())
    }

    /// A point of `relint(F) ∩ L` outside `M`, if any. `F` is a face of `C(M)`, `L ⊆ gp(M)`.
    fn region_gap(&self, face: &Cone, lattice: &Lattice) -> Result<Option<IVec>> {
        // ray generators of M on the face
        let mut seeds: Vec<IVec> = Vec::new();
        for r in face.rays() {
            let on: Vec<&IVec> = self.gens.iter().filter(|g| arith::primitive_i(g) == *r).collect();
            let Some(e) = on.into_iter().min_by_key(|g| g.iter().map(|x| x.abs()).sum::<Int>()) else {
                return pre("face ray carries no generator");
            };
            seeds.push(e.clone());
        }
        let seed_cone = Cone::from_generators(self.rank, &seeds)?;
        for simplex in crate::hilbert::triangulate(&seed_cone) {
            let es: Vec<IVec> =
                simplex.iter().map(|r| seeds.iter().find(|e| arith::primitive_i(e) == *r).expect("seed on ray").clone()).collect();
            let k = es.len();
            let coords: Vec<IVec> = es.iter().map(|e| lattice_coords(lattice, e)).collect();
            let mut residues = vec![vec![Int::zero(); k]];
            residues.extend(crate::hilbert::parallelepiped_points(&coords));
            for p in residues {
                let p_amb = lattice.from_coords(&p);
                for mask in 0u32..(1 << k) {
                    let mut x = p_amb.clone();
                    for (i, e) in es.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            x = arith::add_i(&x, e);
                        }
                    }
                    if face.interior_contains(&x) && !arith::is_zero_i(&x) && !self.base_contains(&x) {
                        return Ok(Some(x));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Membership in the seminormalization through its face-wise description
    /// `⋃_F relint(F) ∩ gp(M ∩ F)`.
    fn in_facewise_sn(&self, x: &[Int], cache: &mut HashMap<BTreeSet<usize>, Lattice>) -> bool {
        if arith::is_zero_i(x) {
            return true;
        }
        if !self.gp.contains(x) || !self.cone.contains(x) {
            return false;
        }
        let tight = self.cone.tight_facets(x);
        let lat = cache.entry(tight.clone()).or_insert_with(|| {
            let on_face: Vec<IVec> =
                self.gens.iter().filter(|g| tight.iter().all(|&i| arith::dot_i(&self.cone.facets()[i], g).is_zero())).cloned().collect();
            Lattice::from_generators(self.rank, &on_face)
        });
        lat.contains(x)
    }

    /// Degree bound for generators of the seminormalization: `dim C · max_ray deg(e_ray)`.
    fn sn_degree_bound(&self) -> Result<Int> {
        let cl = self.cone_lattice()?;
        let mut best = Int::one();
        for r in self.cone.rays() {
            let d = self
                .gens
                .iter()
                .filter(|g| arith::primitive_i(g) == *r)
                .map(|g| cl.degree(g).expect("generator in gp"))
                .min()
                .ok_or_else(|| Error::Geometry("ray without generator".into()))?;
            if d > best {
                best = d;
            }
        }
        Ok(best * Int::from(self.cone.dim().max(1)))
    }

    /// Least fixpoint of `S ↦ {m ∈ gp : 2m, 3m ∈ S}` over `M`.
    ///
    /// The fixpoint equals the face-wise description, whose Hilbert basis lies in degrees
    /// at most `sn_degree_bound`. Since `S_k = {x : 2x, 3x ∈ S_{k−1}}` is already a monoid,
    /// membership in `S_k` recurses on the multiples `2x, 3x`, which is how the steps are counted.
    pub fn seminormalization(&self) -> Result<Seminormalization> {
        self.require_pointed()?;
        if self.kind == Kind::Interior {
            return self.interior_seminormalization();
        }
        let cl = self.cone_lattice()?;
        let window = cl.points_up_to(&self.sn_degree_bound()?);
        let mut cache = HashMap::new();
        let members: Vec<IVec> = window.iter().filter(|x| self.in_facewise_sn(x, &mut cache)).cloned().collect();
        let mut target: Vec<IVec> = Vec::new();
        for x in members.into_iter().filter(|x| !arith::is_zero_i(x)) {
            if !target.iter().any(|h| self.in_facewise_sn(&arith::sub_i(&x, h), &mut cache)) {
                target.push(x);
            }
        }
        let mut lv = Levels::new(self);
        let mut steps = 0;
        for t in &target {
            steps = steps.max(lv.level(t)?);
        }
        // elements entering at each step, kept when not a sum of earlier generators inside S_k
        let mut by_level: Vec<Vec<IVec>> = vec![Vec::new(); steps];
        for (x, &k) in &lv.memo {
            if k > 0 {
                by_level[k - 1].push(x.clone());
            }
        }
        let mut gens = self.gens.clone();
        let mut added = Vec::new();
        for (k, mut xs) in by_level.into_iter().enumerate() {
            xs.sort_by_cached_key(|x| (cl.degree(x).expect("element of gp"), x.clone()));
            let mut new: Vec<IVec> = Vec::new();
            for x in xs {
                let mut reducible = false;
                for h in gens.iter().chain(&new) {
                    let y = arith::sub_i(&x, h);
                    if self.in_facewise_sn(&y, &mut cache) && lv.level(&y)? <= k + 1 {
                        reducible = true;
                        break;
                    }
                }
                if !reducible {
                    new.push(x);
                }
            }
            new.sort();
            gens.extend(new.iter().cloned());
            added.push(new);
        }
        Ok(Seminormalization { monoid: AffineMonoid::new(self.rank, &target)?, steps, added })
    }

    /// Interior case: the one-step operator is applied as a nested membership predicate.
    fn interior_seminormalization(&self) -> Result<Seminormalization> {
        // x is interior iff 2x and 3x are, so the one-step operator commutes with (·)_*
        let mut base = self.clone();
        base.kind = Kind::Generated;
        base.normal = OnceLock::new();
        let s = base.seminormalization()?;
        let added: Vec<Vec<IVec>> = s
            .added
            .into_iter()
            .map(|step| step.into_iter().filter(|x| self.cone.interior_contains(x)).collect::<Vec<_>>())
            .filter(|step| !step.is_empty())
            .collect();
        Ok(Seminormalization { monoid: s.monoid.interior_submonoid()?, steps: added.len(), added })
    }

    pub fn is_seminormal(&self) -> Result<bool> {
        self.require_pointed()?;
        match self.kind {
            Kind::Generated => {
                let s = self.seminormalization()?;
                Ok(s.steps == 0)
            }
            Kind::Interior => self.interior_saturated(),
        }
    }

    /// `M_* = int(M) ∪ {0}`.
    pub fn interior_submonoid(&self) -> Result<AffineMonoid> {
        self.require_pointed()?;
        let mut m = self.clone();
        if self.cone.dim() > 1 {
            m.kind = Kind::Interior;
            m.normal = OnceLock::new();
        }
        Ok(m)
    }

    /// Checks that `W` lies in `Φ(M)` and returns the cone it spans.
    fn region_cone(&self, w: &Polytope) -> Result<Cone> {
        check_rank(self.rank, w.ambient_dim())?;
        let phi = self.cross_section()?;
        for v in w.vertices() {
            if !phi.contains(v) {
                return Err(Error::Precondition("W is not inside Φ(M)".into()));
            }
        }
        Cone::over_points(self.rank, w.vertices())
    }

    /// `M(W) = ℝ₊W ∩ M`.
    pub fn region_submonoid(&self, w: &Polytope) -> Result<AffineMonoid> {
        self.require_pointed()?;
        if self.kind == Kind::Interior {
            return pre("region submonoid is computed for finitely generated monoids");
        }
        let d = self.region_cone(w)?;
        if self.is_normal()? {
            return AffineMonoid::from_cone_lattice(&d, &self.gp);
        }
        // lift to ℤ₊^n over the generators; the preimage of ℝ₊W is a rational cone
        let n = self.gens.len();
        let mut ineqs: Vec<IVec> = (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect();
        let img = |f: &IVec| -> IVec { self.gens.iter().map(|g| arith::dot_i(f, g)).collect() };
        ineqs.extend(d.facets().iter().map(img));
        let eqs: Vec<IVec> = d.equations().iter().map(img).collect();
        let lifted = Cone::from_inequalities(n, &ineqs, &eqs)?;
        let hb = hilbert_basis(&lifted, &Lattice::full(n))?;
        let imgs: Vec<IVec> = hb.iter().map(|c| linalg::mat_vec_left_i(c, &self.gens)).collect();
        let m = AffineMonoid::new(self.rank, &imgs)?;
        AffineMonoid::new(self.rank, &m.hilbert_basis()?)
    }

    /// The minimal generator of `M ∩ ℝ₊t` when `t` spans an edge of `C(M)`.
    pub(crate) fn check_edge_generator(&self, t: &[Int]) -> Result<()> {
        let prim = arith::primitive_i(t);
        if arith::is_zero_i(t) || !self.cone.rays().contains(&prim) {
            return pre("t is not on an extremal ray");
        }
        let e = Cone::from_generators(self.rank, &[prim])?;
        let hb = AffineMonoid::from_cone_lattice(&e, &self.gp)?;
        if hb.generators() != [t.to_vec()] {
            return pre("t is not the minimal generator of its edge");
        }
        Ok(())
    }

    /// `ℤ₊(−t) + M ≅ ℤ × N` for normal `M` and `t` the generator of an edge.
    pub fn invert_extremal(&self, t: &[Int]) -> Result<ExtremalInversion> {
        self.require_pointed()?;
        check_rank(self.rank, t.len())?;
        if self.kind != Kind::Generated || !self.is_normal()? {
            return pre("extremal inversion needs a finitely generated normal monoid");
        }
        self.check_edge_generator(t)?;
        let (t_basis, complement) = complete_basis(&self.gp, t)?;
        let mut basis = vec![t_basis];
        basis.extend(complement.iter().cloned());
        let basis_q: Vec<QVec> = basis.iter().map(|b| arith::to_q(b)).collect();
        let k = basis.len();
        let proj = |x: &IVec| -> IVec {
            let l = linalg::solve_left(&basis_q, &arith::to_q(x)).expect("in gp");
            l[1..].iter().map(|v| v.to_integer()).collect()
        };
        let images: Vec<IVec> = self.gens.iter().map(&proj).filter(|v| !arith::is_zero_i(v)).collect();
        let qcone = Cone::from_generators(k - 1, &images)?;
        if !qcone.is_pointed() {
            return pre("t is not extremal: quotient cone has lineality");
        }
        let quotient = AffineMonoid::from_cone_lattice(&qcone, &Lattice::full(k - 1))?;
        Ok(ExtremalInversion { t: t.to_vec(), complement, quotient, basis_q })
    }

    /// A basis `m, m_2 + c m, …, m_k + c m` of `gp(M)` whose rays all meet `relint(W)`.
    pub fn free_basis_in_region(&self, w: &Polytope, cap: u32) -> Result<Vec<IVec>> {
        self.require_pointed()?;
        if !self.is_normal()? {
            return pre("free basis search needs a normal monoid");
        }
        let phi = self.cross_section()?;
        self.region_cone(w)?;
        if w.dim() != phi.dim() {
            return pre("dim W must equal dim Φ(M)");
        }
        let xi = self.cone.xi();
        let meets = |v: &IVec| -> bool {
            let d = arith::dot_i(&xi, v);
            if !d.is_positive() {
                return false;
            }
            let p: QVec = v.iter().map(|x| Rat::new(x.clone(), d.clone())).collect();
            w.relint_contains(&p)
        };
        let centre = w.centroid();
        let ray = arith::primitive_q(&centre);
        let line = self.gp.restrict(&Lattice::from_generators(self.rank, std::slice::from_ref(&ray)).span_equations());
        let mut m = line.basis()[0].clone();
        if arith::dot_i(&xi, &m).is_negative() {
            m = arith::neg_i(&m);
        }
        let (m, rest) = complete_basis(&self.gp, &m)?;
        if rest.is_empty() {
            return Ok(vec![m]);
        }
        let mut c = Int::one();
        for _ in 0..cap {
            let cand: Vec<IVec> = rest.iter().map(|b| arith::add_i(b, &arith::scale_i(&c, &m))).collect();
            if cand.iter().all(&meets) {
                let mut out = vec![m.clone()];
                out.extend(cand);
                return Ok(out);
            }
            c *= 2;
        }
        Err(Error::CapExceeded("free basis multiplier".into()))
    }

    /// Embeds `M` into `ℤ₊^{rank M}` with `gp(M) ≅ ℤ^{rank M}` via a free dual monoid.
    pub fn embed_in_free(&self) -> Result<FreeEmbedding> {
        self.require_pointed()?;
        let k = self.gp.dim();
        let basis_q = self.gp.basis_q();
        let coords =
            |x: &IVec| -> IVec { linalg::solve_left(&basis_q, &arith::to_q(x)).expect("in gp").iter().map(|v| v.to_integer()).collect() };
        let gens_k: Vec<IVec> = self.gens.iter().map(coords).collect();
        let c_k = Cone::from_generators(k, &gens_k)?;
        let dual = c_k.dual();
        let dual_monoid = AffineMonoid::from_cone_lattice(&dual, &Lattice::full(k))?;
        let phi = dual.cross_section()?;
        let f = dual_monoid.free_basis_in_region(&phi, 64)?;
        // functional on ambient x: f · coords(x); coords(x) = x · P with P a right inverse of the basis
        let bt = linalg::transpose(&basis_q, self.rank);
        let gram: Vec<QVec> = basis_q.iter().map(|a| basis_q.iter().map(|b| arith::dot_q(a, b)).collect()).collect();
        let ginv = linalg::inverse(&gram).expect("independent basis");
        // coords(x) = x Bᵀ G⁻¹, so f(x) = x · (Bᵀ G⁻¹ fᵀ)
        let functionals: Vec<QVec> = f
            .iter()
            .map(|fi| {
                let gf: QVec = ginv.iter().map(|row| arith::dot_iq(fi, row)).collect();
                bt.iter().map(|row| arith::dot_q(row, &gf)).collect()
            })
            .collect();
        Ok(FreeEmbedding { functionals, dual_basis: f })
    }

    /// Equality as sets, for finitely generated monoids.
    pub fn same_as(&self, other: &AffineMonoid) -> bool {
        self.kind == other.kind
            && self.rank == other.rank
            && self.gens.iter().all(|g| other.contains(g))
            && other.gens.iter().all(|g| self.contains(g))
    }
}

/// `level(x)`: the least `k` with `x ∈ S_k`, where `S_0 = M` and `S_k = {x : 2x, 3x ∈ S_{k−1}}`.
/// Only called on elements of the seminormalization, where it terminates.
struct Levels<'a> {
    monoid: &'a AffineMonoid,
    small: Option<SmallSearch<'a>>,
    exact: HashMap<IVec, bool>,
    memo: HashMap<IVec, usize>,
}

impl<'a> Levels<'a> {
    const MAX_DEPTH: usize = 64;

    fn new(monoid: &'a AffineMonoid) -> Self {
        Levels { monoid, small: SmallSearch::new(monoid), exact: HashMap::new(), memo: HashMap::new() }
    }

    fn in_m(&mut self, x: &IVec) -> bool {
        match self.small.as_mut().and_then(|s| s.contains(x)) {
            Some(b) => b,
            None => self.monoid.contains_memo(x, &mut self.exact),
        }
    }

    fn level(&mut self, x: &IVec) -> Result<usize> {
        self.level_at(x, 0)
    }

    fn level_at(&mut self, x: &IVec, depth: usize) -> Result<usize> {
        if let Some(&k) = self.memo.get(x) {
            return Ok(k);
        }
        if depth > Self::MAX_DEPTH {
            return Err(Error::CapExceeded("seminormalization did not reach its fixpoint".into()));
        }
        let k = if self.in_m(x) {
            0
        } else {
            let two = self.level_at(&arith::scale_i(&Int::from(2), x), depth + 1)?;
            let three = self.level_at(&arith::scale_i(&Int::from(3), x), depth + 1)?;
            1 + two.max(three)
        };
        self.memo.insert(x.clone(), k);
        Ok(k)
    }
}

/// Membership search for a generated monoid in machine integers. Answers `None` when a
/// value leaves the `i64` range, so callers fall back to the exact search.
struct SmallSearch<'a> {
    monoid: &'a AffineMonoid,
    gens: Vec<Vec<i64>>,
    facets: Vec<Vec<i64>>,
    equations: Vec<Vec<i64>>,
    solver: Option<CoordinateSolver>,
    memo: HashMap<Vec<i64>, bool>,
}

/// Solves `Σ a_j g_j = x` over `ℤ₊` when at most two generators exceed the rank. A square
/// block `B` of generators is inverted as `adj / det`; the remaining coordinates are enumerated,
/// the last one as an interval cut down by congruences mod `det`.
struct CoordinateSolver {
    rows: Vec<usize>,
    adj: Vec<Vec<i128>>,
    det: i128,
    /// `adj · g_j` on `rows`, sign-normalized so that `det > 0`, for the free generators
    free: Vec<Vec<i128>>,
    /// positive grading of the free generators, paired with the grading vector
    free_deg: Vec<i128>,
    grading: Vec<i64>,
}

fn small_det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * small_det(&minor)
            })
            .sum(),
    }
}

/// `adj(m)` with `m · adj(m) = det(m) · I`.
fn small_adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    // adj[j][i] is the signed minor at (i, j)
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let minor: Vec<Vec<i128>> =
                        m.iter().enumerate().filter(|&(r, _)| r != i).map(|(_, row)| [&row[..j], &row[j + 1..]].concat()).collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * small_det(&minor)
                })
                .collect()
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

impl CoordinateSolver {
    const MAX_FREE: usize = 2;
    const MAX_DIM: usize = 6;

    fn new(gens: &[Vec<i64>], dim: usize, grading: Vec<i64>) -> Option<Self> {
        let n = gens.len();
        let ambient = grading.len();
        if n < dim || n - dim > Self::MAX_FREE || dim > Self::MAX_DIM {
            return None;
        }
        for cols in combinations(n, dim) {
            for rows in combinations(ambient, dim) {
                let b: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| gens[j][i] as i128).collect()).collect();
                let det = small_det(&b);
                if det == 0 {
                    continue;
                }
                let sign = det.signum();
                let adj: Vec<Vec<i128>> = small_adjugate(&b).into_iter().map(|r| r.into_iter().map(|v| sign * v).collect()).collect();
                let free_idx: Vec<usize> = (0..n).filter(|j| !cols.contains(j)).collect();
                let project =
                    |v: &[i64]| -> Vec<i128> { adj.iter().map(|r| r.iter().zip(&rows).map(|(&a, &i)| a * v[i] as i128).sum()).collect() };
                let free = free_idx.iter().map(|&j| project(&gens[j])).collect();
                let free_deg: Vec<i128> = free_idx.iter().map(|&j| small_dot(&grading, &gens[j])).collect();
                if free_deg.iter().any(|&d| d <= 0) {
                    return None;
                }
                return Some(CoordinateSolver { rows, adj, det: det.abs(), free, free_deg, grading });
            }
        }
        None
    }

    /// `x` is assumed to lie in the span of the generators.
    fn solve(&self, x: &[i64]) -> bool {
        let w: Vec<i128> = self.adj.iter().map(|r| r.iter().zip(&self.rows).map(|(&a, &i)| a * x[i] as i128).sum()).collect();
        let deg = small_dot(&self.grading, x);
        match self.free.len() {
            0 => self.basis_ok(&w),
            1 => self.last_coordinate(&w, 0, deg),
            _ => (0..=deg / self.free_deg[0]).any(|a| {
                let w1: Vec<i128> = w.iter().zip(&self.free[0]).map(|(&v, &u)| v - a * u).collect();
                self.last_coordinate(&w1, 1, deg - a * self.free_deg[0])
            }),
        }
    }

    fn basis_ok(&self, w: &[i128]) -> bool {
        w.iter().all(|&v| v >= 0 && v % self.det == 0)
    }

    /// Is there `s ≥ 0` with `w − s·u` nonnegative and divisible by `det`?
    fn last_coordinate(&self, w: &[i128], j: usize, deg: i128) -> bool {
        let u = &self.free[j];
        let (mut lo, mut hi) = (0i128, deg / self.free_deg[j]);
        for (&v, &c) in w.iter().zip(u) {
            match c.signum() {
                0 if v < 0 => return false,
                0 => {}
                1 => hi = hi.min(v.div_euclid(c)),
                _ => lo = lo.max(-v.div_euclid(-c)),
            }
        }
        // the congruences are periodic in s with period det
        let top = hi.min(lo + self.det - 1);
        (lo..=top).any(|s| w.iter().zip(u).all(|(&v, &c)| (v - s * c) % self.det == 0))
    }
}

fn small_vec(v: &[Int]) -> Option<Vec<i64>> {
    v.iter().map(i64::try_from).collect::<std::result::Result<_, _>>().ok()
}

fn small_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

impl<'a> SmallSearch<'a> {
    fn new(monoid: &'a AffineMonoid) -> Option<Self> {
        let all = |vs: &[IVec]| vs.iter().map(|v| small_vec(v)).collect::<Option<Vec<_>>>();
        Some(SmallSearch {
            monoid,
            gens: all(&monoid.gens)?,
            facets: all(monoid.cone.facets())?,
            equations: all(monoid.cone.equations())?,
            solver: None,
            memo: HashMap::new(),
        })
        .map(|mut s| {
            let grading = s.facets.iter().fold(vec![0i64; monoid.rank], |acc, f| acc.iter().zip(f).map(|(a, b)| a + b).collect());
            s.solver = CoordinateSolver::new(&s.gens, monoid.cone.dim(), grading);
            s
        })
    }

    fn in_cone(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|e| small_dot(e, x) == 0) && self.facets.iter().all(|f| small_dot(f, x) >= 0)
    }

    fn contains(&mut self, x: &[Int]) -> Option<bool> {
        if x.len() != self.monoid.rank || !self.monoid.gp.contains(x) {
            return Some(false);
        }
        let x = small_vec(x)?;
        if !self.in_cone(&x) {
            return Some(false);
        }
        if let Some(solver) = &self.solver {
            return Some(solver.solve(&x));
        }
        self.search(&x)
    }

    fn search(&mut self, x: &[i64]) -> Option<bool> {
        if x.iter().all(|&c| c == 0) {
            return Some(true);
        }
        if let Some(&b) = self.memo.get(x) {
            return Some(b);
        }
        let mut ok = false;
        for k in 0..self.gens.len() {
            let y: Vec<i64> = x.iter().zip(&self.gens[k]).map(|(&a, &b)| a.checked_sub(b)).collect::<Option<_>>()?;
            if self.in_cone(&y) && self.search(&y)? {
                ok = true;
                break;
            }
        }
        self.memo.insert(x.to_vec(), ok);
        Some(ok)
    }
}

fn lattice_coords(l: &Lattice, x: &[Int]) -> IVec {
    let q = l.basis_q();
    linalg::solve_left(&q, &arith::to_q(x)).expect("in lattice span").iter().map(|v| v.to_integer()).collect()
}

/// Completes a primitive `t ∈ L` to a basis `{t, b_2, …}` of `L`.
pub fn complete_basis(l: &Lattice, t: &[Int]) -> Result<(IVec, Vec<IVec>)> {
    let c = l.coords(t).ok_or_else(|| Error::Precondition("vector not in lattice".into()))?;
    if !arith::gcd_all(&c).is_one() {
        return pre("vector is not primitive in the lattice");
    }
    let k = c.len();
    let s = linalg::smith(std::slice::from_ref(&c), k);
    let vq: Vec<QVec> = s.v.iter().map(|r| arith::to_q(r)).collect();
    let vinv: Vec<IVec> = linalg::inverse(&vq).expect("unimodular").iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    // c = u⁻¹ · e_1 · v⁻¹ with u = ±1, so the first row of v⁻¹ is ±c
    let rest: Vec<IVec> = vinv[1..].iter().map(|r| l.from_coords(r)).collect();
    Ok((t.to_vec(), rest))
}
