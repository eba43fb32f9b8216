//! JSON encodings of library values. Integers that fit in `i64` are numbers, larger ones strings;
//! rationals are always strings.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use toric_core::arith::{self, Int, Rat};
use toric_core::lambda::{MPoly, Matrix2};
use toric_core::laurent::{LaurentMatrix, LaurentPoly};
use toric_core::polytope::Polytope;
use toric_core::witt::WittVector;

pub fn int(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn rat(x: &Rat) -> Value {
    json!(arith::fmt_rat(x))
}

pub fn ivec(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn qvec(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn ivecs<'a>(v: impl IntoIterator<Item = &'a Vec<Int>>) -> Value {
    Value::Array(v.into_iter().map(|x| ivec(x)).collect())
}

pub fn qvecs<'a>(v: impl IntoIterator<Item = &'a Vec<Rat>>) -> Value {
    Value::Array(v.into_iter().map(|x| qvec(x)).collect())
}

pub fn polytope(p: &Polytope) -> Value {
    json!({ "vertices": qvecs(p.vertices()) })
}

pub fn laurent_poly(p: &LaurentPoly) -> Value {
    Value::Array(p.terms().map(|(d, c)| json!({ "exp": d, "coef": arith::fmt_rat(c) })).collect())
}

pub fn laurent_matrix(m: &LaurentMatrix) -> Value {
    let entries: Vec<Value> = m.rows().iter().map(|r| Value::Array(r.iter().map(laurent_poly).collect())).collect();
    json!({ "n": m.size(), "entries": entries, "text": m.rows().iter().map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>() })
}

pub fn mpoly(p: &MPoly) -> Value {
    Value::Array(p.terms().map(|(m, c)| json!({ "mono": ivec(m), "coef": arith::fmt_rat(c) })).collect())
}

pub fn matrix2(m: &Matrix2) -> Value {
    Value::Array(m.e.iter().map(|r| Value::Array(r.iter().map(mpoly).collect())).collect())
}

pub fn witt(w: &WittVector) -> Value {
    json!({ "m": w.truncation(), "coeffs": qvec(w.coeffs()), "text": w.to_string() })
}
