//! Sublattices of ℤ^r stored by a Hermite basis.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, IVec, Int, QVec, Rat};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    rank: usize,
    basis: Vec<IVec>,
}

/// Basis of `{λ ∈ ℤ^k : λ · a = 0}` for a k×m integer matrix `a`.
pub fn integer_left_kernel(a: &[IVec], ncols: usize) -> Vec<IVec> {
    let s = linalg::smith(a, ncols);
    let r = s.d.len();
    let ker: Vec<IVec> = s.u[r..].to_vec();
    linalg::hnf(&ker, a.len())
}

impl Lattice {
    pub fn from_generators(rank: usize, gens: &[IVec]) -> Self {
        Lattice { rank, basis: linalg::hnf(gens, rank) }
    }

    pub fn full(rank: usize) -> Self {
        let basis = (0..rank).map(|i| (0..rank).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect();
        Lattice { rank, basis }
    }

    pub fn zero(rank: usize) -> Self {
        Lattice { rank, basis: Vec::new() }
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IVec] {
        &self.basis
    }

    pub fn basis_q(&self) -> Vec<QVec> {
        self.basis.iter().map(|b| arith::to_q(b)).collect()
    }

    /// Integer coordinates of `v` in the Hermite basis.
    pub fn coords(&self, v: &[Int]) -> Option<IVec> {
        if v.len() != self.rank {
            return None;
        }
        let mut rest = v.to_vec();
        let mut out = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let p = b.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let (q, r) = rest[p].div_rem(&b[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(b) {
                *x -= &q * y;
            }
            out.push(q);
        }
        arith::is_zero_i(&rest).then_some(out)
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_q(&self, v: &[Rat]) -> bool {
        arith::is_integral(v) && self.contains(&v.iter().map(|x| x.to_integer()).collect::<IVec>())
    }

    pub fn from_coords(&self, c: &[Int]) -> IVec {
        linalg::mat_vec_left_i(c, &self.basis)
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.rank == other.rank && self.basis.iter().all(|b| other.contains(b))
    }

    /// `[other : self]` when `self ⊆ other` have equal dimension.
    pub fn index_in(&self, other: &Lattice) -> Option<Int> {
        if !self.is_sublattice_of(other) || self.dim() != other.dim() {
            return None;
        }
        let rows: Vec<IVec> = self.basis.iter().map(|b| other.coords(b).unwrap()).collect();
        Some(linalg::det_i(&rows).abs())
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut g = self.basis.clone();
        g.extend(other.basis.iter().cloned());
        Lattice::from_generators(self.rank, &g)
    }

    /// Integer equations cutting out the ℚ-span of the lattice.
    pub fn span_equations(&self) -> Vec<IVec> {
        let ns = linalg::nullspace(&self.basis_q(), self.rank);
        ns.iter().map(|v| arith::primitive_q(v)).collect()
    }

    /// `self ∩ {x : e · x = 0 for all e in equations}`.
    pub fn restrict(&self, equations: &[IVec]) -> Lattice {
        if equations.is_empty() || self.basis.is_empty() {
            return self.clone();
        }
        let a: Vec<IVec> = self.basis.iter().map(|b| equations.iter().map(|e| arith::dot_i(b, e)).collect()).collect();
        let ker = integer_left_kernel(&a, equations.len());
        let gens: Vec<IVec> = ker.iter().map(|l| self.from_coords(l)).collect();
        Lattice::from_generators(self.rank, &gens)
    }

    /// `span_ℚ(self) ∩ ℤ^r`.
    pub fn saturation(&self) -> Lattice {
        Lattice::full(self.rank).restrict(&self.span_equations())
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        // x = λB = μB' ⇔ (λ, μ) in the left kernel of [B; -B']
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().map(|b| arith::neg_i(b)));
        let ker = integer_left_kernel(&rows, self.rank);
        let k = self.basis.len();
        let gens: Vec<IVec> = ker.iter().map(|l| self.from_coords(&l[..k])).collect();
        Lattice::from_generators(self.rank, &gens)
    }

    pub fn image(&self, f: impl Fn(&IVec) -> IVec, new_rank: usize) -> Lattice {
        let g: Vec<IVec> = self.basis.iter().map(f).collect();
        Lattice::from_generators(new_rank, &g)
    }

    /// Scales a rational functional on the span so that it maps the lattice onto ℤ
    /// with positive orientation preserved. Returns `None` for functionals vanishing on the lattice.
    pub fn primitive_functional(&self, nu: &[Rat]) -> Option<QVec> {
        let vals: QVec = self.basis.iter().map(|b| arith::dot_iq(b, nu)).collect();
        if arith::is_zero_q(&vals) {
            return None;
        }
        let (_, ints) = arith::clear_denoms(&vals);
        let g = arith::gcd_all(&ints);
        let l = arith::lcm_denoms(&vals);
        let scale = Rat::new(l, g);
        Some(arith::scale_q(&scale, nu))
    }
}
