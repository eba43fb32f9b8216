//! Iterated pyramids and bipyramids: detection, the type string `σ(P)`, witnesses for every
//! type, and corner monoids at the vertices of a cross-section.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, Int, QVec, Rat};
use crate::cone::Cone;
use crate::error::{pre, Error, Result};
use crate::linalg;
use crate::monoid::AffineMonoid;
use crate::polytope::Polytope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PyramidCert {
    pub apex: usize,
    /// Vertex indices of the base facet.
    pub base: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipyramidCert {
    pub v: usize,
    pub w: usize,
    /// Vertex indices of the equator.
    pub equator: Vec<usize>,
    /// Where the open segment `(v, w)` meets the relative interior of the equator.
    pub crossing: QVec,
}

/// Some facet misses exactly one vertex; the least such apex is reported.
pub fn is_pyramid(p: &Polytope) -> Option<PyramidCert> {
    pyramids(p).into_iter().next()
}

fn pyramids(p: &Polytope) -> Vec<PyramidCert> {
    let n = p.vertices().len();
    if p.dim() < 1 {
        return Vec::new();
    }
    let mut out: Vec<PyramidCert> = p
        .facets()
        .into_iter()
        .filter(|f| f.len() + 1 == n)
        .map(|f| {
            let apex = (0..n).find(|i| !f.contains(i)).expect("one vertex off the facet");
            PyramidCert { apex, base: f }
        })
        .collect();
    out.sort_by_key(|c| c.apex);
    out
}

/// Two vertices whose removal leaves a codimension-one polytope pierced once by the open
/// segment between them; the lexicographically least pair is reported.
pub fn is_bipyramid(p: &Polytope) -> Option<BipyramidCert> {
    bipyramids(p).into_iter().next()
}

fn bipyramids(p: &Polytope) -> Vec<BipyramidCert> {
    let n = p.vertices().len();
    let d = p.dim();
    let mut out = Vec::new();
    if d < 2 {
        return out;
    }
    for v in 0..n {
        for w in v + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&i| i != v && i != w).collect();
            let eq = p.sub_polytope(&rest);
            if eq.dim() != d - 1 || eq.vertices().len() != rest.len() {
                continue;
            }
            if let Some(x) = segment_crossing(&p.vertices()[v], &p.vertices()[w], &eq) {
                out.push(BipyramidCert { v, w, equator: rest, crossing: x });
            }
        }
    }
    out
}

/// The single point of the open segment `(a, b)` in `relint(q)`, if `q` has codimension one
/// in the span of the configuration.
fn segment_crossing(a: &[Rat], b: &[Rat], q: &Polytope) -> Option<QVec> {
    let dir = arith::sub_q(b, a);
    let mut s: Option<Rat> = None;
    for (coef, c0) in q.hull_equations() {
        let at_a = arith::dot_q(&coef, a) + &c0;
        let slope = arith::dot_q(&coef, &dir);
        if slope.is_zero() {
            if !at_a.is_zero() {
                return None;
            }
            continue;
        }
        let si = -at_a / slope;
        match &s {
            Some(prev) if *prev != si => return None,
            _ => s = Some(si),
        }
    }
    let s = s?;
    if s <= Rat::zero() || s >= Rat::one() {
        return None;
    }
    let x = arith::add_q(a, &arith::scale_q(&s, &dir));
    q.relint_contains(&x).then_some(x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Step {
    Pyramid { dim: isize, apex: Vec<String> },
    Bipyramid { dim: isize, v: Vec<String>, w: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// First character is the top dimension.
    pub sigma: String,
    pub trace: Vec<Step>,
}

fn fmt_point(x: &[Rat]) -> Vec<String> {
    x.iter().map(arith::fmt_rat).collect()
}

/// `Ok(None)` when `P` is not an iterated pyramid/bipyramid over a segment.
pub fn classify_sigma(p: &Polytope) -> Result<Option<Classification>> {
    if p.dim() < 1 {
        return pre("classification needs a polytope of dimension ≥ 1");
    }
    Ok(classify_rec(p))
}

fn classify_rec(p: &Polytope) -> Option<Classification> {
    if p.dim() == 1 {
        return Some(Classification { sigma: String::new(), trace: Vec::new() });
    }
    let verts = p.vertices();
    // pyramid and bipyramid are exclusive; alternatives within one kind are tried in order
    for c in pyramids(p) {
        if let Some(mut rest) = classify_rec(&p.sub_polytope(&c.base)) {
            rest.sigma.insert(0, '0');
            rest.trace.insert(0, Step::Pyramid { dim: p.dim(), apex: fmt_point(&verts[c.apex]) });
            return Some(rest);
        }
    }
    for c in bipyramids(p) {
        if let Some(mut rest) = classify_rec(&p.sub_polytope(&c.equator)) {
            rest.sigma.insert(0, '1');
            rest.trace.insert(0, Step::Bipyramid { dim: p.dim(), v: fmt_point(&verts[c.v]), w: fmt_point(&verts[c.w]) });
            return Some(rest);
        }
    }
    None
}

/// Polytope in ℝ^r realizing the type `sigma` (length `r − 1`, first character on top).
pub fn witness(sigma: &str) -> Result<Polytope> {
    if sigma.chars().any(|c| c != '0' && c != '1') {
        return Err(Error::Input(format!("type string `{sigma}` must consist of 0 and 1")));
    }
    let r = sigma.len() + 1;
    let unit = |i: usize| -> QVec { (0..r).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect() };
    let mut pts: Vec<QVec> = vec![vec![Rat::zero(); r], unit(0)];
    for (s, bit) in sigma.chars().rev().enumerate() {
        let n = Rat::from_integer(Int::from(pts.len()));
        let c: QVec = pts.iter().fold(vec![Rat::zero(); r], |a, x| arith::add_q(&a, x)).iter().map(|x| x / &n).collect();
        let e = unit(s + 1);
        pts.push(arith::add_q(&c, &e));
        if bit == '1' {
            pts.push(arith::sub_q(&c, &e));
        }
    }
    Ok(Polytope::from_points(r, &pts))
}

/// All types of dimension `r` in lexicographic order, each with a witness.
pub fn enumerate_types(r: usize) -> Result<Vec<(String, Polytope)>> {
    if r == 0 {
        return pre("r must be ≥ 1");
    }
    let len = r - 1;
    (0..1u64 << len)
        .map(|k| {
            let s: String = (0..len).rev().map(|i| if k >> i & 1 == 1 { '1' } else { '0' }).collect();
            let p = witness(&s)?;
            Ok((s, p))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Corner {
    /// Least `λ ≥ 1` with `λv ∈ gp(N)`.
    pub lambda: Int,
    pub monoid: AffineMonoid,
}

/// The corner monoid `−λv + (C_v ∩ gp(N))`, i.e. the tangent cone of `Φ(N)` at `v` cut with
/// the degree-zero part of `gp(N)`.
pub fn corner_cone(n: &AffineMonoid, v: &[Rat]) -> Result<Corner> {
    if !n.is_normal()? {
        return pre("corner monoids need a normal monoid");
    }
    let phi = n.cross_section()?;
    let Some(vi) = phi.vertices().iter().position(|x| x.as_slice() == v) else {
        return pre("v is not a vertex of Φ(N)");
    };
    let rank = n.ambient_rank();
    let xi = n.cone().xi();
    let (den, vint) = arith::clear_denoms(v);
    let dir = vint.clone();
    // least λ: λv = (λ/den)·vint must lie in gp(N)
    let mut lambda = Int::one();
    let scaled = |l: &Int| -> Option<Vec<Int>> {
        let q: QVec = dir.iter().map(|x| Rat::new(x * l, den.clone())).collect();
        arith::is_integral(&q).then(|| q.iter().map(|x| x.to_integer()).collect())
    };
    loop {
        if let Some(p) = scaled(&lambda) {
            if n.gp().contains(&p) {
                break;
            }
        }
        lambda += 1;
        if lambda > &den * n.gp().index_in(&n.gp().saturation()).unwrap_or_else(Int::one) {
            return Err(Error::Geometry("no multiple of v lies in gp(N)".into()));
        }
    }
    let gens: Vec<_> =
        phi.vertices().iter().enumerate().filter(|(i, _)| *i != vi).map(|(_, x)| arith::primitive_q(&arith::sub_q(x, v))).collect();
    let cone = Cone::from_generators(rank, &gens)?;
    let lattice = n.gp().restrict(&[xi]);
    debug_assert!(linalg::rank(&cone.rays().iter().map(|r| arith::to_q(r)).collect::<Vec<_>>(), rank) + 1 == n.cone().dim());
    Ok(Corner { lambda, monoid: AffineMonoid::from_cone_lattice(&cone, &lattice)? })
}
