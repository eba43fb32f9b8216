//! Rational polyhedral cones with both representations kept in sync by double description.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::arith::{self, IVec, Int, QVec, Rat};
use crate::error::{check_rank, Error, Result};
use crate::linalg;
use crate::polytope::Polytope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    Outside,
    Boundary,
    Interior,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        if i / 64 >= self.0.len() {
            self.0.resize(i / 64 + 1, 0);
        }
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn superset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

/// Extreme rays and lineality basis of `{x ∈ ℚ^n : a·x ≥ 0 for every a}`.
///
/// Incremental double description. Rays are kept minimal after every step, which is what
/// makes the combinatorial adjacency test exact.
pub fn double_description(ineqs: &[IVec], n: usize) -> (Vec<IVec>, Vec<IVec>) {
    let mut lin: Vec<IVec> = (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect();
    let mut rays: Vec<(IVec, Bits)> = Vec::new();
    let m = ineqs.len();
    for (k, a) in ineqs.iter().enumerate() {
        if arith::is_zero_i(a) {
            for (_, z) in rays.iter_mut() {
                z.set(k);
            }
            continue;
        }
        if let Some(p) = lin.iter().position(|l| !arith::dot_i(a, l).is_zero()) {
            let mut l0 = lin.swap_remove(p);
            let mut a0 = arith::dot_i(a, &l0);
            if a0.is_negative() {
                l0 = arith::neg_i(&l0);
                a0 = -a0;
            }
            for l in lin.iter_mut() {
                let al = arith::dot_i(a, l);
                if !al.is_zero() {
                    *l = arith::primitive_i(&arith::sub_i(&arith::scale_i(&a0, l), &arith::scale_i(&al, &l0)));
                }
            }
            for (r, z) in rays.iter_mut() {
                let ar = arith::dot_i(a, r);
                if !ar.is_zero() {
                    *r = arith::primitive_i(&arith::sub_i(&arith::scale_i(&a0, r), &arith::scale_i(&ar, &l0)));
                }
                z.set(k);
            }
            let mut z = Bits::new(m);
            for j in 0..k {
                z.set(j);
            }
            rays.push((arith::primitive_i(&l0), z));
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|(r, _)| arith::dot_i(a, r)).collect();
        let mut next: Vec<(IVec, Bits)> = Vec::new();
        for ((r, z), v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                let mut z = z.clone();
                if v.is_zero() {
                    z.set(k);
                }
                next.push((r.clone(), z));
            }
        }
        for (i, vi) in vals.iter().enumerate() {
            if !vi.is_positive() {
                continue;
            }
            for (j, vj) in vals.iter().enumerate() {
                if !vj.is_negative() {
                    continue;
                }
                let common = rays[i].1.and(&rays[j].1);
                let blocked = rays.iter().enumerate().any(|(l, (_, zl))| l != i && l != j && zl.superset_of(&common));
                if blocked {
                    continue;
                }
                let r = arith::sub_i(&arith::scale_i(vi, &rays[j].0), &arith::scale_i(vj, &rays[i].0));
                let mut z = common;
                z.set(k);
                next.push((arith::primitive_i(&r), z));
            }
        }
        rays = next;
    }
    (rays.into_iter().map(|(r, _)| r).collect(), lin)
}

/// Canonical basis of a rational subspace: reduced echelon rows scaled to primitive integers.
pub fn canonical_subspace(vs: &[IVec], n: usize) -> Vec<IVec> {
    let q: Vec<QVec> = vs.iter().map(|v| arith::to_q(v)).collect();
    let (red, _) = linalg::rref(&q, n);
    red.iter().map(|r| arith::primitive_q(r)).collect()
}

/// Orthogonal projection onto the complement of `sub` (given by any basis), made primitive.
pub fn project_off(v: &[Int], sub: &[IVec]) -> IVec {
    if sub.is_empty() {
        return arith::primitive_i(v);
    }
    let n = v.len();
    let q: Vec<QVec> = sub.iter().map(|s| arith::to_q(s)).collect();
    // v − Σ c_i s_i with Gram system G c = (s_i · v)
    let gram: Vec<QVec> = q.iter().map(|a| q.iter().map(|b| arith::dot_q(a, b)).collect()).collect();
    let rhs: QVec = q.iter().map(|a| arith::dot_iq(v, a)).collect();
    let inv = linalg::inverse(&gram).expect("independent basis");
    let c: QVec = inv.iter().map(|row| arith::dot_q(row, &rhs)).collect();
    let mut out = arith::to_q(v);
    for (ci, s) in c.iter().zip(&q) {
        for (o, x) in out.iter_mut().zip(s) {
            *o -= ci * x;
        }
    }
    debug_assert_eq!(out.len(), n);
    arith::primitive_q(&out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cone {
    rank: usize,
    rays: Vec<IVec>,
    lineality: Vec<IVec>,
    facets: Vec<IVec>,
    equations: Vec<IVec>,
}

impl Cone {
    pub fn zero(rank: usize) -> Cone {
        Cone::from_generators(rank, &[]).expect("empty generator list is valid")
    }

    pub fn from_generators(rank: usize, gens: &[IVec]) -> Result<Cone> {
        for g in gens {
            check_rank(rank, g.len())?;
        }
        let gens: Vec<IVec> = gens.iter().filter(|g| !arith::is_zero_i(g)).cloned().collect();
        let (drays, dlin) = double_description(&gens, rank);
        let equations = canonical_subspace(&dlin, rank);
        let mut facets: Vec<IVec> = drays.iter().map(|f| project_off(f, &equations)).collect();
        facets.sort();
        facets.dedup();
        Ok(Cone::from_h_canonical(rank, facets, equations))
    }

    /// Cone `{x : f·x ≥ 0, e·x = 0}`.
    pub fn from_inequalities(rank: usize, ineqs: &[IVec], eqs: &[IVec]) -> Result<Cone> {
        for v in ineqs.iter().chain(eqs) {
            check_rank(rank, v.len())?;
        }
        let mut all = ineqs.to_vec();
        for e in eqs {
            all.push(e.clone());
            all.push(arith::neg_i(e));
        }
        let (rays, lin) = double_description(&all, rank);
        let mut gens = rays;
        for l in &lin {
            gens.push(l.clone());
            gens.push(arith::neg_i(l));
        }
        Cone::from_generators(rank, &gens)
    }

    fn from_h_canonical(rank: usize, facets: Vec<IVec>, equations: Vec<IVec>) -> Cone {
        let mut all = facets.clone();
        for e in &equations {
            all.push(e.clone());
            all.push(arith::neg_i(e));
        }
        let (rays, lin) = double_description(&all, rank);
        let lineality = canonical_subspace(&lin, rank);
        let mut rays: Vec<IVec> = rays.iter().map(|r| project_off(r, &lineality)).collect();
        rays.sort();
        rays.dedup();
        Cone { rank, rays, lineality, facets, equations }
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    /// Primitive generators of the extremal rays, lexicographically sorted.
    pub fn rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[IVec] {
        &self.lineality
    }

    /// Primitive facet normals, canonical inside the span, lexicographically sorted.
    pub fn facets(&self) -> &[IVec] {
        &self.facets
    }

    /// Integer basis of the annihilator of the span.
    pub fn equations(&self) -> &[IVec] {
        &self.equations
    }

    pub fn dim(&self) -> usize {
        self.rank - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_pointed() && self.rays.len() == self.dim()
    }

    /// Every generator needed to rebuild the cone: rays plus both signs of the lineality.
    pub fn generators(&self) -> Vec<IVec> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(arith::neg_i(l));
        }
        g
    }

    pub fn position(&self, x: &[Int]) -> Position {
        if self.equations.iter().any(|e| !arith::dot_i(e, x).is_zero()) {
            return Position::Outside;
        }
        let mut interior = true;
        for f in &self.facets {
            let v = arith::dot_i(f, x);
            if v.is_negative() {
                return Position::Outside;
            }
            if v.is_zero() {
                interior = false;
            }
        }
        if interior {
            Position::Interior
        } else {
            Position::Boundary
        }
    }

    pub fn position_q(&self, x: &[Rat]) -> Position {
        self.position(&arith::clear_denoms(x).1)
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.position(x) != Position::Outside
    }

    pub fn contains_q(&self, x: &[Rat]) -> bool {
        self.position_q(x) != Position::Outside
    }

    pub fn interior_contains(&self, x: &[Int]) -> bool {
        self.position(x) == Position::Interior
    }

    pub fn interior_contains_q(&self, x: &[Rat]) -> bool {
        self.position_q(x) == Position::Interior
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.rank == other.rank && self.generators().iter().all(|g| other.contains(g))
    }

    /// Indices of facets vanishing at `x`.
    pub fn tight_facets(&self, x: &[Int]) -> BTreeSet<usize> {
        self.facets.iter().enumerate().filter(|(_, f)| arith::dot_i(f, x).is_zero()).map(|(i, _)| i).collect()
    }

    /// Rays lying on facet `i`.
    pub fn facet_rays(&self, i: usize) -> Vec<IVec> {
        let f = &self.facets[i];
        self.rays.iter().filter(|r| arith::dot_i(f, r).is_zero()).cloned().collect()
    }

    /// The facet `i` as a cone of its own.
    pub fn facet_cone(&self, i: usize) -> Cone {
        let mut g = self.facet_rays(i);
        for l in &self.lineality {
            g.push(l.clone());
            g.push(arith::neg_i(l));
        }
        Cone::from_generators(self.rank, &g).expect("ranks agree")
    }

    /// The smallest face containing `x` (which must lie in the cone).
    pub fn face_of(&self, x: &[Int]) -> Cone {
        let tight = self.tight_facets(x);
        let mut g: Vec<IVec> =
            self.rays.iter().filter(|r| tight.iter().all(|&i| arith::dot_i(&self.facets[i], r).is_zero())).cloned().collect();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(arith::neg_i(l));
        }
        Cone::from_generators(self.rank, &g).expect("ranks agree")
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone> {
        check_rank(self.rank, other.rank)?;
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_inequalities(self.rank, &ineqs, &eqs)
    }

    /// `C* = {ξ : ξ(x) ≥ 0 on C}` in the full dual space; the span annihilator becomes lineality.
    pub fn dual(&self) -> Cone {
        let mut g = self.facets.clone();
        for e in &self.equations {
            g.push(e.clone());
            g.push(arith::neg_i(e));
        }
        Cone::from_generators(self.rank, &g).expect("ranks agree")
    }

    /// Sum of the primitive facet normals. Strictly positive on `C ∖ {0}` when pointed.
    pub fn xi(&self) -> IVec {
        let mut s = vec![Int::zero(); self.rank];
        for f in &self.facets {
            s = arith::add_i(&s, f);
        }
        s
    }

    /// `{x ∈ C : ξ(x) = 1}` for the canonical functional `ξ`.
    pub fn cross_section(&self) -> Result<Polytope> {
        if !self.is_pointed() {
            return Err(Error::NotPointed);
        }
        if self.rays.is_empty() {
            return Ok(Polytope::empty(self.rank));
        }
        let xi = self.xi();
        let verts: Vec<QVec> = self
            .rays
            .iter()
            .map(|r| {
                let d = Rat::from_integer(arith::dot_i(&xi, r));
                r.iter().map(|x| Rat::from_integer(x.clone()) / &d).collect()
            })
            .collect();
        Ok(Polytope::from_points(self.rank, &verts))
    }

    /// Cone over a set of rational points.
    pub fn over_points(rank: usize, pts: &[QVec]) -> Result<Cone> {
        let g: Vec<IVec> = pts.iter().map(|p| arith::primitive_q(p)).collect();
        Cone::from_generators(rank, &g)
    }

    /// Face lattice as sets of ray indices (including the apex face and the cone itself), by dimension.
    pub fn face_lattice(&self) -> Vec<(usize, Vec<usize>)> {
        let n = self.rays.len();
        let facet_sets: Vec<BTreeSet<usize>> =
            (0..self.facets.len()).map(|i| (0..n).filter(|&j| arith::dot_i(&self.facets[i], &self.rays[j]).is_zero()).collect()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let full: Vec<usize> = (0..n).collect();
        seen.insert(full.clone());
        let mut queue: Vec<BTreeSet<usize>> = Vec::new();
        for f in &facet_sets {
            if seen.insert(f.iter().copied().collect()) {
                queue.push(f.clone());
            }
        }
        while let Some(f) = queue.pop() {
            for g in &facet_sets {
                let h: BTreeSet<usize> = f.intersection(g).copied().collect();
                if seen.insert(h.iter().copied().collect()) {
                    queue.push(h);
                }
            }
        }
        let lin = self.lineality.len();
        let mut out: Vec<(usize, Vec<usize>)> = seen
            .into_iter()
            .map(|s| {
                let rows: Vec<IVec> = s.iter().map(|&i| self.rays[i].clone()).chain(self.lineality.iter().cloned()).collect();
                let d = if rows.is_empty() { 0 } else { linalg::rank_i(&rows, self.rank) };
                (d.max(lin), s)
            })
            .collect();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ivec;

    fn cone(g: &[&[i64]]) -> Cone {
        let r = g[0].len();
        Cone::from_generators(r, &g.iter().map(|v| ivec(v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn quadrant_representations() {
        let c = cone(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(c.rays(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
        assert_eq!(c.facets(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
        assert!(c.is_pointed());
        assert_eq!(c.position(&ivec(&[1, 1])), Position::Interior);
        assert_eq!(c.position(&ivec(&[1, 0])), Position::Boundary);
        assert_eq!(c.position(&ivec(&[-1, 1])), Position::Outside);
    }

    #[test]
    fn dual_examples() {
        let q = cone(&[&[1, 0], &[0, 1]]);
        assert_eq!(q.dual(), q);
        let ray = cone(&[&[1, 0]]);
        let d = ray.dual();
        assert_eq!(d.rays(), &[ivec(&[1, 0])]);
        assert_eq!(d.lineality(), &[ivec(&[0, 1])]);
        let c = cone(&[&[1, 0], &[1, 2]]);
        assert_eq!(c.dual().rays(), &[ivec(&[0, 1]), ivec(&[2, -1])]);
        assert_eq!(c.dual().dual(), c);
    }

    #[test]
    fn non_full_dimensional_span() {
        let c = cone(&[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.equations().len(), 1);
        assert_eq!(c.facets().len(), 2);
        assert_eq!(c.position(&ivec(&[1, 1, 2])), Position::Interior);
        assert_eq!(c.position(&ivec(&[1, 1, 1])), Position::Outside);
        assert_eq!(c.dual().dual(), c);
    }

    #[test]
    fn square_cone_facets() {
        let c = cone(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.facets().len(), 4);
        let lat = c.face_lattice();
        let count = |d: usize| lat.iter().filter(|(k, _)| *k == d).count();
        assert_eq!((count(0), count(1), count(2), count(3)), (1, 4, 4, 1));
    }

    #[test]
    fn line_and_half_plane() {
        let l = cone(&[&[1, 0], &[-1, 0]]);
        assert!(!l.is_pointed());
        assert!(l.facets().is_empty());
        assert_eq!(l.cross_section(), Err(Error::NotPointed));
        let h = cone(&[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(h.facets(), &[ivec(&[0, 1])]);
    }

    #[test]
    fn zero_cone_is_valid() {
        let z = Cone::zero(3);
        assert!(z.is_pointed());
        assert_eq!(z.dim(), 0);
        assert!(z.cross_section().unwrap().vertices().is_empty());
        assert_eq!(z.dual().dim(), 3);
    }
}
