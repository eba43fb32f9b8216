//! Exact scalar helpers over arbitrary-precision integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IVec = Vec<Int>;
pub type QVec = Vec<Rat>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

pub fn ivec(v: &[i64]) -> IVec {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()
}

pub fn to_q(v: &[Int]) -> QVec {
    v.iter().map(rat_int).collect()
}

/// Parses `"p/q"`, `"p"` or a decimal-free signed integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Input(format!("malformed rational literal {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| bad())?;
            let q: Int = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Input(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn dot_i(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a · b` with integer `a` and rational `b`.
pub fn dot_iq(a: &[Int], b: &[Rat]) -> Rat {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| y * x).sum()
}

pub fn add_i(a: &[Int], b: &[Int]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_i(a: &[Int], b: &[Int]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_i(c: &Int, a: &[Int]) -> IVec {
    a.iter().map(|x| c * x).collect()
}

pub fn neg_i(a: &[Int]) -> IVec {
    a.iter().map(|x| -x).collect()
}

pub fn add_q(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_q(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_q(c: &Rat, a: &[Rat]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero_i(a: &[Int]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn is_zero_q(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn gcd_all(a: &[Int]) -> Int {
    a.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

pub fn lcm_denoms(a: &[Rat]) -> Int {
    a.iter().fold(Int::one(), |l, x| l.lcm(x.denom()))
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive_i(a: &[Int]) -> IVec {
    let g = gcd_all(a);
    if g.is_zero() || g.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &g).collect()
}

/// The primitive integer vector on the ray through `a`.
pub fn primitive_q(a: &[Rat]) -> IVec {
    let l = lcm_denoms(a);
    let scaled: IVec = a.iter().map(|x| (x * &l).to_integer()).collect();
    primitive_i(&scaled)
}

/// Clears denominators: returns `(D, D·a)` with `D` the least common denominator.
pub fn clear_denoms(a: &[Rat]) -> (Int, IVec) {
    let l = lcm_denoms(a);
    let v = a.iter().map(|x| (x * &l).to_integer()).collect();
    (l, v)
}

pub fn is_integral(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_integer())
}

pub fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn sign_i(x: &Int) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn floor_rat(x: &Rat) -> Int {
    x.floor().to_integer()
}

pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}
