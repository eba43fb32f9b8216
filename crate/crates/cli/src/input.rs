//! JSON input schemas and their conversion into library values.

use serde::Deserialize;
use serde_json::Value;

use toric_core::arith::{self, IVec, Int, QVec, Rat};
use toric_core::cone::Cone;
use toric_core::dilation::CSeq;
use toric_core::lambda::{MPoly, Matrix2, MonomialMatrixRing};
use toric_core::lattice::Lattice;
use toric_core::laurent::{LaurentMatrix, LaurentPoly};
use toric_core::monoid::AffineMonoid;
use toric_core::polytope::Polytope;
use toric_core::pyramidal::{FacetSign, PolarizedMonoid};
use toric_core::{Error, Result};

/// Integer literal: a JSON number or a decimal string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IntIn {
    Num(i64),
    Str(String),
}

impl IntIn {
    pub fn value(&self) -> Result<Int> {
        match self {
            IntIn::Num(n) => Ok(Int::from(*n)),
            IntIn::Str(s) => s.trim().parse().map_err(|_| Error::Input(format!("malformed integer literal {s:?}"))),
        }
    }
}

/// Rational literal: a JSON integer or a string `"p/q"` / `"p"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RatIn {
    Num(i64),
    Str(String),
}

impl RatIn {
    pub fn value(&self) -> Result<Rat> {
        match self {
            RatIn::Num(n) => Ok(Rat::from_integer(Int::from(*n))),
            RatIn::Str(s) => arith::parse_rat(s),
        }
    }
}

pub fn ivec(v: &[IntIn]) -> Result<IVec> {
    v.iter().map(IntIn::value).collect()
}

pub fn qvec(v: &[RatIn]) -> Result<QVec> {
    v.iter().map(RatIn::value).collect()
}

pub fn ivecs(v: &[Vec<IntIn>], rank: usize) -> Result<Vec<IVec>> {
    v.iter()
        .map(|g| {
            if g.len() != rank {
                return Err(Error::RankMismatch { expected: rank, got: g.len() });
            }
            ivec(g)
        })
        .collect()
}

pub fn qvecs(v: &[Vec<RatIn>], rank: usize) -> Result<Vec<QVec>> {
    v.iter()
        .map(|g| {
            if g.len() != rank {
                return Err(Error::RankMismatch { expected: rank, got: g.len() });
            }
            qvec(g)
        })
        .collect()
}

/// `{"rank": r, "generators": [[..], ..]}`, shared by cones and monoids.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GensIn {
    pub rank: usize,
    pub generators: Vec<Vec<IntIn>>,
}

impl GensIn {
    pub fn gens(&self) -> Result<Vec<IVec>> {
        ivecs(&self.generators, self.rank)
    }

    pub fn monoid(&self) -> Result<AffineMonoid> {
        AffineMonoid::new(self.rank, &self.gens()?)
    }

    pub fn cone(&self) -> Result<Cone> {
        Cone::from_generators(self.rank, &self.gens()?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeIn {
    pub vertices: Vec<Vec<RatIn>>,
}

impl PolytopeIn {
    pub fn polytope(&self) -> Result<Polytope> {
        let Some(first) = self.vertices.first() else {
            return Err(Error::Input("a polytope needs at least one vertex".into()));
        };
        let pts = qvecs(&self.vertices, first.len())?;
        Ok(Polytope::from_points(first.len(), &pts))
    }

    pub fn polytope_in(&self, rank: usize) -> Result<Polytope> {
        Ok(Polytope::from_points(rank, &qvecs(&self.vertices, rank)?))
    }
}

pub fn cseq(c: &CSeq) -> Result<CSeq> {
    c.validate()?;
    Ok(c.clone())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizedIn {
    pub t: Vec<IntIn>,
    pub gamma_vertices: Vec<Vec<RatIn>>,
    pub monoid: GensIn,
    /// Integral model scale: the pole is `t / scale`. Absent means 1.
    #[serde(default)]
    pub scale: Option<IntIn>,
    /// Checked against the computed signs when present, so reports can be fed back in.
    #[serde(default)]
    pub facet_signs: Option<Vec<FacetSign>>,
}

impl PolarizedIn {
    pub fn parts(&self) -> Result<(IVec, Polytope, AffineMonoid)> {
        let n = self.monoid.monoid()?;
        let r = n.ambient_rank();
        let t = ivec(&self.t)?;
        if t.len() != r {
            return Err(Error::RankMismatch { expected: r, got: t.len() });
        }
        let gamma = Polytope::from_points(r, &qvecs(&self.gamma_vertices, r)?);
        Ok((t, gamma, n))
    }

    pub fn build(&self) -> Result<PolarizedMonoid> {
        let (t, g, n) = self.parts()?;
        let mut p = PolarizedMonoid::new(&t, &g, &n)?;
        if let Some(s) = &self.scale {
            let s = s.value()?;
            if s <= Int::from(0) {
                return Err(Error::Input("scale must be positive".into()));
            }
            p = p.with_scale(s);
        }
        if let Some(signs) = &self.facet_signs {
            if signs.as_slice() != p.facet_signs() {
                return Err(Error::Input("facet_signs disagree with the computed signs".into()));
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermIn {
    pub exp: i64,
    pub coef: RatIn,
}

/// `{"n": n, "entries": [[[{"exp": d, "coef": "p/q"}, ..], ..], ..]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentMatrixIn {
    pub n: usize,
    pub entries: Vec<Vec<Vec<TermIn>>>,
}

impl LaurentMatrixIn {
    pub fn matrix(&self) -> Result<LaurentMatrix> {
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::Input(format!("Laurent matrix entries must be {0}×{0}", self.n)));
        }
        let rows = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|terms| {
                        let t: Result<Vec<(i64, Rat)>> = terms.iter().map(|x| Ok((x.exp, x.coef.value()?))).collect();
                        Ok(LaurentPoly::from_terms(t?))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LaurentMatrix::new(rows)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoTermIn {
    pub mono: Vec<IntIn>,
    pub coef: RatIn,
}

/// 2×2 array of monomial sums.
#[derive(Debug, Clone, Deserialize)]
#[serde(transparent)]
pub struct Matrix2In(pub Vec<Vec<Vec<MonoTermIn>>>);

impl Matrix2In {
    pub fn matrix(&self) -> Result<Matrix2> {
        if self.0.len() != 2 || self.0.iter().any(|r| r.len() != 2) {
            return Err(Error::Input("φ must be a 2×2 array".into()));
        }
        let p = |i: usize, j: usize| -> Result<MPoly> {
            let t: Result<Vec<(IVec, Rat)>> = self.0[i][j].iter().map(|x| Ok((ivec(&x.mono)?, x.coef.value()?))).collect();
            Ok(MPoly::from_terms(t?))
        };
        Ok(Matrix2::new(p(0, 0)?, p(0, 1)?, p(1, 0)?, p(1, 1)?))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RingIn {
    Lambda { t: Vec<IntIn>, gamma_cone: GensIn, lattice: Option<Vec<Vec<IntIn>>> },
    LambdaPrime { t: Vec<IntIn>, gamma_cone: GensIn, lattice: Option<Vec<Vec<IntIn>>> },
    Bipyramidal { t: Vec<IntIn>, c1: GensIn, c2: GensIn },
}

impl RingIn {
    pub fn ring(&self) -> Result<MonomialMatrixRing> {
        match self {
            RingIn::Lambda { t, gamma_cone, lattice } | RingIn::LambdaPrime { t, gamma_cone, lattice } => {
                let cone = gamma_cone.cone()?;
                let r = cone.ambient_rank();
                let l = match lattice {
                    Some(g) => Lattice::from_generators(r, &ivecs(g, r)?),
                    None => Lattice::full(r),
                };
                MonomialMatrixRing::from_parts(ivec(t)?, cone, l, matches!(self, RingIn::LambdaPrime { .. }))
            }
            RingIn::Bipyramidal { t, c1, c2 } => MonomialMatrixRing::bipyramidal(ivec(t)?, &c1.cone()?, &c2.cone()?),
        }
    }
}

/// Deserializes a command's input object, mapping schema errors to input errors.
pub fn parse<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Input(format!("malformed input: {e}")))
}
