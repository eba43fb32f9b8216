//! One adapter per subcommand: parse the input object, call the library, encode the result.

use serde::Deserialize;
use serde_json::{json, Value};

use toric_core::arith::{self, Int, QVec};
use toric_core::dilation::{self, CSeq};
use toric_core::hilbert;
use toric_core::lambda::{lambda_membership, minimal_endo_exponent, tilde_c_apply};
use toric_core::lattice::Lattice;
use toric_core::laurent::{self, BundleTriple, Equivalence, KoszulMode};
use toric_core::pclass;
use toric_core::pyramidal::{self, ApproxCaps, Clause, PolarizedMonoid, Verdict};
use toric_core::witt::{self, WittVector};
use toric_core::{Error, Result};

use crate::input::{self as inp, parse, GensIn, IntIn, LaurentMatrixIn, Matrix2In, PolarizedIn, PolytopeIn, RatIn, RingIn};
use crate::output as out;
use crate::Config;

/// What a command produced before it is wrapped into a report.
pub struct Outcome {
    pub result: Value,
    pub clauses: Vec<Clause>,
    /// `false` for a verified negative answer.
    pub verified: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, clauses: Vec::new(), verified: true }
    }

    fn checked(result: Value, clauses: Vec<Clause>) -> Self {
        let verified = clauses.iter().all(|c| c.pass);
        Outcome { result, clauses, verified }
    }
}

fn clause(name: impl Into<String>, pass: bool) -> Clause {
    Clause { name: name.into(), pass }
}

fn caps(cfg: &Config) -> ApproxCaps {
    ApproxCaps { stage: cfg.cap_stage, ..ApproxCaps::default() }
}

pub const COMMANDS: &[&str] = &[
    "hilbert",
    "normalize",
    "seminormalize",
    "interior",
    "region",
    "invert-extremal",
    "stage",
    "excision-witness",
    "check-pyramidal",
    "check-polarized",
    "antipode",
    "approx-b",
    "bipyramid-approx",
    "birkhoff",
    "interval",
    "koszul",
    "equivalent",
    "lambda-check",
    "tilde-c",
    "witt",
    "classify-p",
    "enumerate-types",
    "corner",
];

pub fn dispatch(command: &str, v: &Value, cfg: &Config) -> Result<Outcome> {
    match command {
        "hilbert" => hilbert_cmd(v),
        "normalize" => normalize(v),
        "seminormalize" => seminormalize(v),
        "interior" => interior(v),
        "region" => region(v),
        "invert-extremal" => invert_extremal(v),
        "stage" => stage(v),
        "excision-witness" => excision(v, cfg),
        "check-pyramidal" => check_pyramidal(v),
        "check-polarized" => check_polarized(v),
        "antipode" => antipode(v),
        "approx-b" => approx_b(v, cfg),
        "bipyramid-approx" => bipyramid(v, cfg),
        "birkhoff" => birkhoff(v),
        "interval" => interval(v),
        "koszul" => koszul(v),
        "equivalent" => equivalent(v),
        "lambda-check" => lambda_check(v),
        "tilde-c" => tilde_c(v, cfg),
        "witt" => witt_cmd(v, cfg),
        "classify-p" => classify(v),
        "enumerate-types" => enumerate(v),
        "corner" => corner(v),
        other => Err(Error::Input(format!("unknown command `{other}`"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HilbertIn {
    rank: usize,
    generators: Vec<Vec<IntIn>>,
    lattice: Option<Vec<Vec<IntIn>>>,
}

fn hilbert_cmd(v: &Value) -> Result<Outcome> {
    let h: HilbertIn = parse(v)?;
    let cone = toric_core::cone::Cone::from_generators(h.rank, &inp::ivecs(&h.generators, h.rank)?)?;
    let lattice = match &h.lattice {
        Some(g) => Lattice::from_generators(h.rank, &inp::ivecs(g, h.rank)?),
        None => Lattice::full(h.rank),
    };
    let hb = hilbert::hilbert_basis(&cone, &lattice)?;
    Ok(Outcome::ok(json!({ "size": hb.len(), "hilbert_basis": out::ivecs(&hb) })))
}

fn normalize(v: &Value) -> Result<Outcome> {
    let m = parse::<GensIn>(v)?.monoid()?;
    let n = m.normalization()?;
    Ok(Outcome::ok(json!({ "is_normal": m.is_normal()?, "hilbert_basis": out::ivecs(&n.hilbert_basis()?) })))
}

fn seminormalize(v: &Value) -> Result<Outcome> {
    let m = parse::<GensIn>(v)?.monoid()?;
    let s = m.seminormalization()?;
    let added: Vec<Value> = s.added.iter().map(out::ivecs).collect();
    Ok(Outcome::ok(json!({
        "is_seminormal": s.steps == 0,
        "steps": s.steps,
        "added": added,
        "hilbert_basis": out::ivecs(&s.monoid.hilbert_basis()?),
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InteriorIn {
    monoid: GensIn,
    #[serde(default = "default_degree")]
    degree: u64,
}

fn default_degree() -> u64 {
    4
}

fn interior(v: &Value) -> Result<Outcome> {
    let i: InteriorIn = parse(v)?;
    let m = i.monoid.monoid()?;
    let mi = m.interior_submonoid()?;
    let irr = mi.irreducibles_up_to(&Int::from(i.degree))?;
    Ok(Outcome::ok(json!({ "degree_window": i.degree, "irreducibles": out::ivecs(&irr) })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionIn {
    monoid: GensIn,
    region: PolytopeIn,
}

fn region(v: &Value) -> Result<Outcome> {
    let r: RegionIn = parse(v)?;
    let m = r.monoid.monoid()?;
    let w = r.region.polytope_in(m.ambient_rank())?;
    let sub = m.region_submonoid(&w)?;
    Ok(Outcome::ok(json!({ "hilbert_basis": out::ivecs(&sub.hilbert_basis()?) })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvertIn {
    monoid: GensIn,
    t: Vec<IntIn>,
}

fn invert_extremal(v: &Value) -> Result<Outcome> {
    let i: InvertIn = parse(v)?;
    let m = i.monoid.monoid()?;
    let inv = m.invert_extremal(&inp::ivec(&i.t)?)?;
    let q = &inv.quotient;
    let clauses = vec![clause("rank N = rank M − 1", q.rank() + 1 == m.rank()), clause("U(N) = 0", q.has_trivial_units())];
    Ok(Outcome::checked(
        json!({
            "t": out::ivec(&inv.t),
            "complement": out::ivecs(&inv.complement),
            "quotient": { "rank": q.ambient_rank(), "generators": out::ivecs(&q.hilbert_basis()?) },
        }),
        clauses,
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StageIn {
    monoid: GensIn,
    cseq: CSeq,
    j: usize,
    #[serde(default)]
    points: Vec<Vec<RatIn>>,
}

fn stage(v: &Value) -> Result<Outcome> {
    let s: StageIn = parse(v)?;
    let m = s.monoid.monoid()?;
    let c = inp::cseq(&s.cseq)?;
    let st = dilation::stage(&m, &c, s.j);
    let pts = inp::qvecs(&s.points, m.ambient_rank())?;
    let members: Vec<Value> =
        pts.iter().map(|p| json!({ "point": out::qvec(p), "contains": st.contains(p), "interior": st.interior_contains(p) })).collect();
    Ok(Outcome::ok(json!({
        "j": s.j,
        "denominator": out::int(&st.denom),
        "generators": out::qvecs(&st.generators()),
        "points": members,
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExcisionIn {
    monoid: GensIn,
    cseq: CSeq,
    j: usize,
    a: Vec<Vec<RatIn>>,
}

fn excision(v: &Value, cfg: &Config) -> Result<Outcome> {
    let e: ExcisionIn = parse(v)?;
    let m = e.monoid.monoid()?;
    let c = inp::cseq(&e.cseq)?;
    let a = inp::qvecs(&e.a, m.ambient_rank())?;
    let w = dilation::excision_witness(&m, &c, &a, e.j, cfg.cap_stage)?;
    let st = dilation::stage(&m, &c, w.stage);
    let uv = arith::add_q(&w.u, &w.v);
    let clauses = vec![
        clause("a_i = b_i + u + v", a.iter().zip(&w.b).all(|(ai, bi)| *ai == arith::add_q(bi, &uv))),
        clause("b_i interior at the returned stage", w.b.iter().all(|b| st.interior_contains(b))),
        clause("u, v interior at the returned stage", st.interior_contains(&w.u) && st.interior_contains(&w.v)),
    ];
    Ok(Outcome::checked(
        json!({ "m": out::ivec(&w.m), "b": out::qvecs(&w.b), "u": out::qvec(&w.u), "v": out::qvec(&w.v), "stage": w.stage }),
        clauses,
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairIn {
    m: GensIn,
    n: GensIn,
}

fn check_pyramidal(v: &Value) -> Result<Outcome> {
    let p: PairIn = parse(v)?;
    match pyramidal::is_pyramidal_extension(&p.m.monoid()?, &p.n.monoid()?)? {
        Verdict::Holds(ext) => Ok(Outcome::checked(
            json!({
                "pyramidal": true,
                "apex": out::qvec(&ext.apex),
                "apex_ray": out::ivec(&ext.apex_ray()),
                "base_rays": out::ivecs(&ext.base_rays()),
                "phi_n": out::polytope(&ext.phi_n),
                "delta": out::polytope(&ext.delta),
            }),
            vec![clause("Φ(N) = Φ(M) ∪ δ with δ a pyramid over a facet of Φ(M)", true)],
        )),
        Verdict::Fails(why) => Ok(Outcome {
            result: json!({ "pyramidal": false, "reason": why }),
            clauses: vec![clause("Φ(N) = Φ(M) ∪ δ with δ a pyramid over a facet of Φ(M)", false)],
            verified: false,
        }),
    }
}

fn polarized_clauses(rep: &pyramidal::PolarizedReport) -> Vec<Clause> {
    let mut c = rep.clauses.clone();
    for f in &rep.facets {
        let rays =
            f.rays.iter().map(|r| format!("{:?}", r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).collect::<Vec<_>>().join(" ");
        c.push(clause(format!("facet {rays}: t off the facet hyperplane"), f.off_hyperplane));
        c.push(clause(format!("facet {rays}: ℤt + gp(N(F)) = gp(N)"), f.lattice_split));
        c.push(clause(format!("facet {rays}: Hilbert basis of N(F + t) is t with that of N(F)"), f.hilbert_split));
    }
    c
}

fn check_polarized(v: &Value) -> Result<Outcome> {
    let (t, g, n) = parse::<PolarizedIn>(v)?.parts()?;
    let rep = pyramidal::verify_polarized(&t, &g, &n);
    let failing = rep.failing_facet().map(out::ivecs);
    let result = json!({ "polarized": rep.holds(), "failure": rep.failure, "failing_facet": failing });
    let clauses = polarized_clauses(&rep);
    Ok(Outcome { result, clauses, verified: rep.holds() })
}

fn polarized_json(p: &PolarizedMonoid) -> Result<Value> {
    Ok(json!({
        "t": out::ivec(p.t()),
        "scale": out::int(p.scale()),
        "gamma_vertices": out::qvecs(p.gamma().vertices()),
        "monoid": { "rank": p.monoid().ambient_rank(), "generators": out::ivecs(&p.monoid().hilbert_basis()?) },
        "facet_signs": p.facet_signs(),
    }))
}

fn antipode(v: &Value) -> Result<Outcome> {
    let p = parse::<PolarizedIn>(v)?.build()?;
    let a = pyramidal::antipode(&p)?;
    let aa = pyramidal::antipode(&a)?;
    let fan = pyramidal::scheme_fan(&p)?;
    let mut clauses = vec![
        clause("antipode is polarized", true),
        clause("antipode flips every facet sign", a.facet_signs().iter().zip(p.facet_signs()).all(|(x, y)| *x == y.flip())),
        clause("antipode of the antipode has the same pole and face monoid", aa.t() == p.t() && aa.gamma_cone() == p.gamma_cone()),
    ];
    clauses.extend(fan.clauses.iter().cloned());
    Ok(Outcome::checked(
        json!({
            "antipode": polarized_json(&a)?,
            "fan": { "plus_rays": out::ivecs(fan.plus.rays()), "minus_rays": out::ivecs(fan.minus.rays()), "common_rays": out::ivecs(fan.common.rays()) },
        }),
        clauses,
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxBIn {
    m: GensIn,
    n: GensIn,
    cseq: CSeq,
    s: usize,
    j: usize,
    w: Vec<Vec<RatIn>>,
    w_prime: Vec<Vec<RatIn>>,
}

fn approx_b(v: &Value, cfg: &Config) -> Result<Outcome> {
    let a: ApproxBIn = parse(v)?;
    let (m, n) = (a.m.monoid()?, a.n.monoid()?);
    let ext = match pyramidal::is_pyramidal_extension(&m, &n)? {
        Verdict::Holds(e) => e,
        Verdict::Fails(why) => return Err(Error::Precondition(format!("not a pyramidal extension: {why}"))),
    };
    let r = n.ambient_rank();
    let res = pyramidal::approx_b_construct(
        &ext,
        &inp::cseq(&a.cseq)?,
        a.s,
        a.j,
        &inp::qvecs(&a.w, r)?,
        &inp::qvecs(&a.w_prime, r)?,
        &caps(cfg),
    )?;
    let triples = res.triples.iter().map(polarized_json).collect::<Result<Vec<_>>>()?;
    Ok(Outcome::checked(json!({ "stage": res.stage, "triples": triples }), res.clauses))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BipyramidIn {
    n: GensIn,
    c_prime: GensIn,
    c_second: GensIn,
    polarized: PolarizedIn,
    cseq: CSeq,
}

fn bipyramid(v: &Value, cfg: &Config) -> Result<Outcome> {
    let b: BipyramidIn = parse(v)?;
    let p = b.polarized.build()?;
    let res = pyramidal::bipyramidal_approx(&b.n.monoid()?, &b.c_prime.cone()?, &b.c_second.cone()?, &p, &inp::cseq(&b.cseq)?, &caps(cfg))?;
    Ok(Outcome::checked(
        json!({
            "c_rays": out::ivecs(res.c.rays()),
            "c1_rays": out::ivecs(res.c1.rays()),
            "c2_rays": out::ivecs(res.c2.rays()),
            "common_rays": out::ivecs(res.common.rays()),
            "omega": out::qvec(&res.omega),
            "stage": res.stage,
        }),
        res.clauses,
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaIn {
    theta: LaurentMatrixIn,
}

fn birkhoff(v: &Value) -> Result<Outcome> {
    let th = parse::<ThetaIn>(v)?.theta.matrix()?;
    let b = laurent::birkhoff_factorize(&th)?;
    let residual = b.sigma.mul(&th).mul(&b.tau);
    let det_deg = th.det().as_unit().map(|(_, d)| d);
    let clauses = vec![
        clause("σ invertible over ℚ[t]", b.sigma.is_over_t() && b.sigma.is_invertible()),
        clause("τ invertible over ℚ[t⁻¹]", b.tau.is_over_t_inv() && b.tau.is_invertible()),
        clause("σθτ = diag(t^u)", residual.as_diag_t().as_ref() == Some(&b.u)),
        clause("Σu = t-degree of det θ", det_deg == Some(b.u.iter().sum())),
    ];
    Ok(Outcome::checked(
        json!({ "u": b.u, "sigma": out::laurent_matrix(&b.sigma), "tau": out::laurent_matrix(&b.tau), "residual": out::laurent_matrix(&residual) }),
        clauses,
    ))
}

fn interval(v: &Value) -> Result<Outcome> {
    let th = parse::<ThetaIn>(v)?.theta.matrix()?;
    let (a, b) = laurent::polarization_interval(&BundleTriple::new(th)?)?;
    Ok(Outcome::ok(json!({ "interval": [a, b] })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KoszulIn {
    theta: LaurentMatrixIn,
    mode: String,
}

fn koszul(v: &Value) -> Result<Outcome> {
    let k: KoszulIn = parse(v)?;
    let mode = match k.mode.as_str() {
        "F1" => KoszulMode::F1,
        "F2" => KoszulMode::F2,
        m => return Err(Error::Input(format!("mode must be F1 or F2, got `{m}`"))),
    };
    let tr = BundleTriple::new(k.theta.matrix()?)?;
    let tw = laurent::koszul_twist(&tr, mode);
    let clauses = laurent::koszul_identities(&tr.theta).into_iter().map(|(n, ok)| clause(n, ok)).collect();
    Ok(Outcome::checked(json!({ "theta": out::laurent_matrix(&tw.theta) }), clauses))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivIn {
    theta1: LaurentMatrixIn,
    theta2: LaurentMatrixIn,
}

fn equivalent(v: &Value) -> Result<Outcome> {
    let e: EquivIn = parse(v)?;
    let (a, b) = (e.theta1.matrix()?, e.theta2.matrix()?);
    match laurent::equivalent_triples(&a, &b)? {
        Equivalence::Equivalent { left, right } => {
            let ok = left.mul(&a).mul(&right) == b && left.is_over_t() && right.is_over_t_inv();
            Ok(Outcome::checked(
                json!({ "equivalent": true, "left": out::laurent_matrix(&left), "right": out::laurent_matrix(&right) }),
                vec![clause("left·θ₁·right = θ₂ with left over ℚ[t], right over ℚ[t⁻¹]", ok)],
            ))
        }
        Equivalence::Distinct { u1, u2 } => Ok(Outcome {
            result: json!({ "equivalent": false, "u1": u1, "u2": u2 }),
            clauses: vec![clause("splitting types agree", false)],
            verified: false,
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaIn {
    ring: RingIn,
    phi: Matrix2In,
}

fn lambda_check(v: &Value) -> Result<Outcome> {
    let l: LambdaIn = parse(v)?;
    let ring = l.ring.ring()?;
    let viol = ring.violation(&l.phi.matrix()?)?;
    let member = viol.is_none();
    let result = json!({
        "member": member,
        "variant": ring.variant(),
        "violation": viol.map(|(i, j, m)| json!({ "entry": format!("{}{}", i + 1, j + 1), "mono": out::ivec(&m) })),
    });
    Ok(Outcome { result, clauses: vec![clause("monomial supports allowed in every entry", member)], verified: member })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TildeCIn {
    ring: RingIn,
    phi: Matrix2In,
    c: u64,
    c_prime: Option<GensIn>,
}

fn tilde_c(v: &Value, cfg: &Config) -> Result<Outcome> {
    let t: TildeCIn = parse(v)?;
    let ring = t.ring.ring()?;
    let img = tilde_c_apply(&t.phi.matrix()?, t.c, &ring)?;
    let mut result = json!({
        "omega": ring.omega().map(|w| out::ivec(w)),
        "image": out::matrix2(&img),
    });
    let mut clauses = vec![clause("image lies in the ring", lambda_membership(&img, &ring)?)];
    if let Some(cp) = &t.c_prime {
        let cp = cp.cone()?;
        let c0 = minimal_endo_exponent(ring.t(), ring.omega().expect("bipyramidal ring"), &cp, cfg.cap_degree)?;
        result["minimal_exponent"] = json!(c0);
        result["c1_interior_to_c_prime"] = json!(ring.endo_precondition(&cp));
        clauses.push(clause("(c₀−1)ω + c₀t interior to C′", {
            let c0i = Int::from(c0);
            let x = arith::add_i(&arith::scale_i(&(&c0i - 1), ring.omega().unwrap()), &arith::scale_i(&c0i, ring.t()));
            cp.interior_contains(&x)
        }));
    }
    Ok(Outcome::checked(result, clauses))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WittIn {
    Text(String),
    Obj { m: usize, coeffs: Vec<RatIn> },
}

impl WittIn {
    fn vector(&self, m: usize) -> Result<WittVector> {
        match self {
            WittIn::Text(s) => WittVector::parse(s, m),
            WittIn::Obj { m: mm, coeffs } => {
                if *mm != m || coeffs.len() != m {
                    return Err(Error::Input(format!("Witt vector truncation {mm} with {} coefficients, expected {m}", coeffs.len())));
                }
                Ok(WittVector::new(inp::qvec(coeffs)?))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WittCmdIn {
    op: String,
    m: Option<usize>,
    f: Option<WittIn>,
    g: Option<WittIn>,
    v: Option<Vec<RatIn>>,
}

fn witt_cmd(v: &Value, cfg: &Config) -> Result<Outcome> {
    let w: WittCmdIn = parse(v)?;
    let m = w.m.unwrap_or(cfg.truncation);
    if !(1..=crate::MAX_TRUNCATION).contains(&m) {
        return Err(Error::Input(format!("truncation {m} outside 1..={}", crate::MAX_TRUNCATION)));
    }
    let need = |x: &Option<WittIn>, name: &str| -> Result<WittVector> {
        x.as_ref().ok_or_else(|| Error::Input(format!("`{name}` is required for `{}`", w.op)))?.vector(m)
    };
    let result = match w.op.as_str() {
        "add" => json!({ "value": out::witt(&witt::witt_add(&need(&w.f, "f")?, &need(&w.g, "g")?)?) }),
        "star" => json!({ "value": out::witt(&witt::witt_star(&need(&w.f, "f")?, &need(&w.g, "g")?)?) }),
        "ghost" => json!({ "ghost": out::qvec(&witt::ghost(&need(&w.f, "f")?)) }),
        "from-ghost" => {
            let g = inp::qvec(w.v.as_deref().ok_or_else(|| Error::Input("`v` is required for `from-ghost`".into()))?)?;
            json!({ "value": out::witt(&witt::from_ghost(&g)) })
        }
        "expand" => json!({ "factors": out::qvec(&witt::factor_expansion(&need(&w.f, "f")?)) }),
        "degree" => json!({ "filtration_degree": witt::filtration_degree(&need(&w.f, "f")?) }),
        op => return Err(Error::Input(format!("unknown witt operation `{op}`"))),
    };
    Ok(Outcome::ok(result))
}

fn classify(v: &Value) -> Result<Outcome> {
    let p = parse::<PolytopeIn>(v)?.polytope()?;
    match pclass::classify_sigma(&p)? {
        Some(c) => Ok(Outcome::checked(
            json!({ "in_class": true, "sigma": c.sigma, "trace": c.trace }),
            vec![clause("iterated pyramid/bipyramid over a segment", true)],
        )),
        None => Ok(Outcome {
            result: json!({ "in_class": false, "sigma": Value::Null }),
            clauses: vec![clause("iterated pyramid/bipyramid over a segment", false)],
            verified: false,
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnumIn {
    r: usize,
}

fn enumerate(v: &Value) -> Result<Outcome> {
    let e: EnumIn = parse(v)?;
    if e.r > 8 {
        return Err(Error::Input("r must be ≤ 8".into()));
    }
    let types = pclass::enumerate_types(e.r)?;
    let mut clauses = Vec::new();
    let list: Vec<Value> = types
        .iter()
        .map(|(s, p)| {
            let back = pclass::classify_sigma(p).ok().flatten().map(|c| c.sigma);
            clauses.push(clause(format!("witness of `{s}` reclassifies"), back.as_ref() == Some(s)));
            json!({ "sigma": s, "witness": out::polytope(p) })
        })
        .collect();
    Ok(Outcome::checked(json!({ "count": list.len(), "types": list }), clauses))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CornerIn {
    monoid: GensIn,
    vertex: Option<Vec<RatIn>>,
}

fn corner(v: &Value) -> Result<Outcome> {
    let c: CornerIn = parse(v)?;
    let n = c.monoid.monoid()?.normalization()?;
    let verts: Vec<QVec> = match &c.vertex {
        Some(x) => vec![inp::qvec(x)?],
        None => n.cross_section()?.vertices().to_vec(),
    };
    let mut list = Vec::new();
    for x in &verts {
        let k = pclass::corner_cone(&n, x)?;
        let phi = k.monoid.cross_section()?;
        let sigma = if phi.dim() >= 1 { pclass::classify_sigma(&phi)?.map(|s| s.sigma) } else { Some(String::new()) };
        list.push(json!({
            "vertex": out::qvec(x),
            "lambda": out::int(&k.lambda),
            "rank": k.monoid.rank(),
            "generators": out::ivecs(&k.monoid.hilbert_basis()?),
            "sigma": sigma,
        }));
    }
    Ok(Outcome::ok(json!({ "corners": list })))
}
