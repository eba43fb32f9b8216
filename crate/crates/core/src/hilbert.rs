//! Hilbert bases and bounded lattice-point enumeration for `C ∩ L`.
//!
//! The cone is moved into coordinates of `L ∩ span(C)` so it becomes full-dimensional over ℤ^k,
//! triangulated by a recursive fan from one ray, and every simplicial piece contributes the
//! lattice points of its half-open fundamental parallelepiped. Those points together with the
//! rays contain every irreducible element.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, IVec, Int, QVec, Rat};
use crate::cone::Cone;
use crate::error::{check_rank, Error, Result};
use crate::lattice::Lattice;
use crate::linalg;

/// Simplicial pieces of a pointed cone, as ray lists, covering it without gaps.
pub fn triangulate(cone: &Cone) -> Vec<Vec<IVec>> {
    let rays = cone.rays();
    if rays.is_empty() {
        return Vec::new();
    }
    if rays.len() == cone.dim() {
        return vec![rays.to_vec()];
    }
    let r0 = &rays[0];
    let mut out = Vec::new();
    for i in 0..cone.facets().len() {
        if arith::dot_i(&cone.facets()[i], r0).is_zero() {
            continue;
        }
        for mut s in triangulate(&cone.facet_cone(i)) {
            s.push(r0.clone());
            out.push(s);
        }
    }
    out
}

/// Nonzero lattice points `Σ λ_i v_i` with `λ ∈ [0,1)^k`, for a basis `v` of ℚ^k.
pub fn parallelepiped_points(simplex: &[IVec]) -> Vec<IVec> {
    let k = simplex.len();
    let s = linalg::smith(simplex, k);
    let vq: Vec<QVec> = s.v.iter().map(|r| arith::to_q(r)).collect();
    let vinv: Vec<IVec> = linalg::inverse(&vq).expect("unimodular").iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    let sq: Vec<QVec> = simplex.iter().map(|r| arith::to_q(r)).collect();
    let sinv = linalg::inverse(&sq).expect("simplex rays are independent");
    let mut out = Vec::new();
    let mut y = vec![Int::zero(); k];
    loop {
        if !arith::is_zero_i(&y) {
            let x = linalg::mat_vec_left_i(&y, &vinv);
            let lam = linalg::mat_vec_left(&arith::to_q(&x), &sinv);
            let fr: QVec = lam.iter().map(arith::frac).collect();
            let p = linalg::mat_vec_left(&fr, &sq);
            out.push(p.iter().map(|c| c.to_integer()).collect());
        }
        // odometer over Π [0, d_i)
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            y[i] += 1;
            if y[i] < s.d[i] {
                break;
            }
            y[i] = Int::zero();
            i += 1;
        }
    }
}

struct Piece {
    rays: Vec<IVec>,
    degs: Vec<Int>,
    par: Vec<IVec>,
}

/// A pointed cone together with a lattice, in coordinates where both are standard.
pub struct ConeLattice {
    rank: usize,
    basis: Vec<IVec>,
    basis_q: Vec<QVec>,
    cone: Cone,
    grading: IVec,
    pieces: Vec<Piece>,
}

impl ConeLattice {
    pub fn new(cone: &Cone, lattice: &Lattice) -> Result<ConeLattice> {
        check_rank(cone.ambient_rank(), lattice.ambient_rank())?;
        if !cone.is_pointed() {
            return Err(Error::NotPointed);
        }
        let rank = cone.ambient_rank();
        let mut sub = lattice.restrict(cone.equations());
        let mut c = cone.clone();
        if sub.dim() < cone.dim() {
            let mut eqs = cone.equations().to_vec();
            eqs.extend(sub.span_equations());
            c = Cone::from_inequalities(rank, cone.facets(), &eqs)?;
            sub = sub.restrict(c.equations());
        }
        let basis = sub.basis().to_vec();
        let basis_q = sub.basis_q();
        let k = basis.len();
        let rays_k: Vec<IVec> =
            c.rays().iter().map(|r| arith::primitive_q(&linalg::solve_left(&basis_q, &arith::to_q(r)).expect("ray in span"))).collect();
        let cone_k = Cone::from_generators(k, &rays_k)?;
        let grading = cone_k.xi();
        let pieces = triangulate(&cone_k)
            .into_iter()
            .map(|rays| {
                let degs = rays.iter().map(|r| arith::dot_i(&grading, r)).collect();
                let par = parallelepiped_points(&rays);
                Piece { rays, degs, par }
            })
            .collect();
        Ok(ConeLattice { rank, basis, basis_q, cone: cone_k, grading, pieces })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Lattice coordinates of an ambient point, if it lies in the lattice part of the span.
    pub fn coords(&self, x: &[Int]) -> Option<IVec> {
        let l = linalg::solve_left(&self.basis_q, &arith::to_q(x))?;
        arith::is_integral(&l).then(|| l.iter().map(|v| v.to_integer()).collect())
    }

    pub fn ambient(&self, c: &[Int]) -> IVec {
        if self.basis.is_empty() {
            return vec![Int::zero(); self.rank];
        }
        linalg::mat_vec_left_i(c, &self.basis)
    }

    /// Integral grading, strictly positive on the nonzero points of the cone.
    pub fn degree(&self, x: &[Int]) -> Option<Int> {
        self.coords(x).map(|c| arith::dot_i(&self.grading, &c))
    }

    /// Degree for rational points of the span.
    pub fn degree_q(&self, x: &[Rat]) -> Option<Rat> {
        let l = linalg::solve_left(&self.basis_q, x)?;
        Some(arith::dot_iq(&self.grading, &l))
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.coords(x).is_some_and(|c| self.cone.contains(&c))
    }

    pub fn hilbert_basis(&self) -> Vec<IVec> {
        let mut cand: BTreeSet<(Int, IVec)> = BTreeSet::new();
        for p in &self.pieces {
            for (r, d) in p.rays.iter().zip(&p.degs) {
                cand.insert((d.clone(), r.clone()));
            }
            for x in &p.par {
                cand.insert((arith::dot_i(&self.grading, x), x.clone()));
            }
        }
        let mut hb: Vec<IVec> = Vec::new();
        for (_, x) in cand {
            let reducible = hb.iter().any(|h| self.cone.contains(&arith::sub_i(&x, h)));
            if !reducible {
                hb.push(x);
            }
        }
        let mut out: Vec<IVec> = hb.iter().map(|c| self.ambient(c)).collect();
        out.sort();
        out
    }

    /// All lattice points of the cone with degree at most `max_deg`, sorted by degree then lexicographically.
    pub fn points_up_to(&self, max_deg: &Int) -> Vec<IVec> {
        let mut seen: BTreeSet<(Int, IVec)> = BTreeSet::new();
        if !max_deg.is_negative() {
            seen.insert((Int::zero(), vec![Int::zero(); self.dim()]));
        }
        for p in &self.pieces {
            let k = p.rays.len();
            let zero = vec![Int::zero(); self.dim()];
            for base in std::iter::once(&zero).chain(p.par.iter()) {
                let d0 = arith::dot_i(&self.grading, base);
                if &d0 > max_deg {
                    continue;
                }
                let mut n = vec![Int::zero(); k];
                let mut stack_deg = d0.clone();
                loop {
                    let x = n
                        .iter()
                        .zip(&p.rays)
                        .filter(|(c, _)| !c.is_zero())
                        .fold(base.clone(), |acc, (c, r)| arith::add_i(&acc, &arith::scale_i(c, r)));
                    seen.insert((stack_deg.clone(), x));
                    // next multi-index with bounded degree
                    let mut i = 0;
                    loop {
                        if i == k {
                            break;
                        }
                        n[i] += 1;
                        stack_deg += &p.degs[i];
                        if &stack_deg <= max_deg {
                            break;
                        }
                        stack_deg -= &p.degs[i] * &n[i];
                        n[i] = Int::zero();
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
            }
        }
        seen.into_iter().map(|(_, x)| self.ambient(&x)).collect()
    }

    /// Largest degree among the rays' primitive lattice generators.
    pub fn max_ray_degree(&self) -> Int {
        self.cone.rays().iter().map(|r| arith::dot_i(&self.grading, r)).max().unwrap_or_else(Int::one)
    }
}

/// The unique minimal generating set of `C ∩ L`, lexicographically sorted.
pub fn hilbert_basis(cone: &Cone, lattice: &Lattice) -> Result<Vec<IVec>> {
    Ok(ConeLattice::new(cone, lattice)?.hilbert_basis())
}
