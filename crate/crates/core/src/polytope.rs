//! Rational polytopes as slices of their homogenizing cone.

use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::arith::{self, IVec, QVec, Rat};
use crate::cone::{Cone, Position};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub dim: isize,
    /// Indices into [`Polytope::vertices`].
    pub vertices: Vec<usize>,
}

#[derive(Debug)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<QVec>,
    hom: Cone,
    faces: OnceLock<Vec<Face>>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        Polytope { ambient: self.ambient, vertices: self.vertices.clone(), hom: self.hom.clone(), faces: OnceLock::new() }
    }
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

pub fn homogenize(p: &[Rat]) -> IVec {
    let mut v = p.to_vec();
    v.push(Rat::one());
    arith::primitive_q(&v)
}

fn dehomogenize(r: &[arith::Int]) -> QVec {
    let n = r.len() - 1;
    let d = Rat::from_integer(r[n].clone());
    r[..n].iter().map(|x| Rat::from_integer(x.clone()) / &d).collect()
}

impl Polytope {
    pub fn empty(ambient: usize) -> Polytope {
        Polytope { ambient, vertices: Vec::new(), hom: Cone::zero(ambient + 1), faces: OnceLock::new() }
    }

    /// Convex hull of finitely many rational points.
    pub fn from_points(ambient: usize, pts: &[QVec]) -> Polytope {
        if pts.is_empty() {
            return Polytope::empty(ambient);
        }
        let gens: Vec<IVec> = pts.iter().map(|p| homogenize(p)).collect();
        let hom = Cone::from_generators(ambient + 1, &gens).expect("homogenized ranks agree");
        let mut vertices: Vec<QVec> = hom.rays().iter().map(|r| dehomogenize(r)).collect();
        vertices.sort();
        Polytope { ambient, vertices, hom, faces: OnceLock::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Extreme points, lexicographically sorted.
    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    /// Dimension; `-1` for the empty polytope.
    pub fn dim(&self) -> isize {
        self.hom.dim() as isize - 1
    }

    pub fn cone(&self) -> &Cone {
        &self.hom
    }

    pub fn position(&self, x: &[Rat]) -> Position {
        if self.vertices.is_empty() {
            return Position::Outside;
        }
        self.hom.position(&homogenize(x))
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.position(x) != Position::Outside
    }

    pub fn relint_contains(&self, x: &[Rat]) -> bool {
        self.position(x) == Position::Interior
    }

    /// Facet inequalities `a·x + b ≥ 0`, one per facet, inside the affine hull.
    pub fn facet_inequalities(&self) -> Vec<(QVec, Rat)> {
        self.hom
            .facets()
            .iter()
            .map(|f| {
                let n = self.ambient;
                (arith::to_q(&f[..n]), Rat::from_integer(f[n].clone()))
            })
            .collect()
    }

    /// Affine-hull equations `a·x + b = 0`.
    pub fn hull_equations(&self) -> Vec<(QVec, Rat)> {
        let n = self.ambient;
        self.hom.equations().iter().map(|e| (arith::to_q(&e[..n]), Rat::from_integer(e[n].clone()))).collect()
    }

    fn vertex_index(&self, ray: &[arith::Int]) -> usize {
        let v = dehomogenize(ray);
        self.vertices.binary_search(&v).expect("rays are vertices")
    }

    /// The graded face lattice: the empty face, all proper faces and the polytope itself.
    pub fn faces(&self) -> &[Face] {
        self.faces.get_or_init(|| {
            if self.vertices.is_empty() {
                return vec![Face { dim: -1, vertices: vec![] }];
            }
            let map: Vec<usize> = self.hom.rays().iter().map(|r| self.vertex_index(r)).collect();
            let mut out: Vec<Face> = self
                .hom
                .face_lattice()
                .into_iter()
                .map(|(d, s)| {
                    let mut v: Vec<usize> = s.iter().map(|&i| map[i]).collect();
                    v.sort();
                    Face { dim: d as isize - 1, vertices: v }
                })
                .collect();
            out.sort();
            out
        })
    }

    /// Vertex index sets of the facets.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let d = self.dim();
        self.faces().iter().filter(|f| f.dim == d - 1).map(|f| f.vertices.clone()).collect()
    }

    /// `f_i` for `i` in `0..dim`: counts of proper nonempty faces.
    pub fn f_vector(&self) -> Vec<usize> {
        let d = self.dim().max(0) as usize;
        (0..d).map(|i| self.faces().iter().filter(|f| f.dim == i as isize).count()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) }).sum()
    }

    pub fn sub_polytope(&self, idx: &[usize]) -> Polytope {
        let pts: Vec<QVec> = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        Polytope::from_points(self.ambient, &pts)
    }

    pub fn centroid(&self) -> QVec {
        let n = Rat::from_integer(arith::Int::from(self.vertices.len()));
        let mut s = vec![Rat::zero(); self.ambient];
        for v in &self.vertices {
            s = arith::add_q(&s, v);
        }
        s.iter().map(|x| x / &n).collect()
    }

    /// Applies an affine map `x ↦ x·A + b` (rows of `a` are images of unit vectors).
    pub fn affine_image(&self, a: &[QVec], b: &[Rat]) -> Polytope {
        let out_dim = b.len();
        let pts: Vec<QVec> = self.vertices.iter().map(|v| arith::add_q(&linalg::mat_vec_left(v, a), b)).collect();
        Polytope::from_points(out_dim, &pts)
    }
}

/// Affine dimension of a finite point set; `-1` when empty.
pub fn affine_dim(pts: &[QVec]) -> isize {
    if pts.is_empty() {
        return -1;
    }
    let diffs: Vec<QVec> = pts[1..].iter().map(|p| arith::sub_q(p, &pts[0])).collect();
    linalg::rank(&diffs, pts[0].len()) as isize
}

/// Intersection of the line through `pole` and `x` with the hyperplane `{y : a·y = b}`.
pub fn polar_project(x: &[Rat], pole: &[Rat], a: &[Rat], b: &Rat) -> Result<QVec> {
    let d = arith::sub_q(x, pole);
    let ad = arith::dot_q(a, &d);
    if ad.is_zero() {
        return Err(Error::Geometry("line through pole is parallel to the target hyperplane".into()));
    }
    let s = (b - arith::dot_q(a, pole)) / ad;
    Ok(arith::add_q(pole, &arith::scale_q(&s, &d)))
}
