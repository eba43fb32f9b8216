//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion; every sample size, bound and
//! time budget is pinned in the constants below. Oracles are written here, independently of the
//! library code paths they check.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_core::arith::{self, ivec, qvec, rat, IVec, Int, QVec, Rat};
use toric_core::cone::Cone;
use toric_core::dilation::{self, CSeq};
use toric_core::hilbert;
use toric_core::lambda::{self, MPoly, Matrix2, MonomialMatrixRing};
use toric_core::lattice::Lattice;
use toric_core::laurent::{self, LaurentMatrix, LaurentPoly};
use toric_core::monoid::AffineMonoid;
use toric_core::pclass;
use toric_core::polytope::Polytope;
use toric_core::pyramidal::{self, ApproxCaps, PolarizedMonoid, Verdict};
use toric_core::witt::{self, WittVector};

const SEED: u64 = 20_241_018;

const HB_CONES: usize = 200;
const HB_MAX_RANK: usize = 3;
const HB_MAX_COORD: i64 = 6;
const HB_BUDGET: Duration = Duration::from_secs(60);

const SN_MONOIDS: usize = 50;
const SN_MAX_COORD: i64 = 4;
/// Irreducibles are compared up to this multiple of the largest generator degree.
const SN_WINDOW_FACTOR: i64 = 2;

const INV_CASES: usize = 100;
const INV_PROBE: i64 = 4;
const INV_SHIFT_CAP: i64 = 64;

const APPROX_B_BUDGET: Duration = Duration::from_secs(120);

const BIRKHOFF_MATRICES: usize = 100;
const BIRKHOFF_PERTURBATIONS: usize = 100;
const BIRKHOFF_MAX_N: usize = 4;
const BIRKHOFF_MAX_SPREAD: i64 = 4;

const WITT_TRUNCATION: usize = 12;
const WITT_SAMPLES: usize = 40;

const LAMBDA_PAIRS: usize = 100;
const TILDE_SAMPLES: usize = 100;

const PCLASS_MAX_R: usize = 5;

const EXCISION_BATCHES: usize = 100;

const CLI_THREAD_COUNTS: [usize; 2] = [1, 8];

/// Criteria whose literal wording is not attainable, with the reason. Such a criterion prints
/// `FAIL` and does not abort the suite; anything else failing does.
const DOCUMENTED: &[(u32, &str)] = &[(
    7,
    "anchor [[t,1],[0,t^-1]] -> (0,0) contradicts the σ-over-ℚ[t] / τ-over-ℚ[t⁻¹] convention; \
     θ·[[1,-t^-1],[0,1]] = diag(t,t^-1) gives (1,-1), asserted instead",
)];

#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn ensure(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn rng(k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ (k << 32))
}

type Criterion = (u32, &'static str, fn(&mut Check));

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "Hilbert basis equals brute-force irreducibles", c01_hilbert_oracle),
        (2, "sn(M₊) = sn(M)₊ = n(M₊) = n(M)₊", c02_interior_identity),
        (3, "seminormalization anchors", c03_seminormal_anchors),
        (4, "extremal inversion drops rank, keeps U(N)=0", c04_invert_extremal),
        (5, "polarized monoids, antipode, scheme fan", c05_polarized),
        (6, "nested polarized approximation of triangle⊂square", c06_approx_b),
        (7, "Birkhoff splitting type", c07_birkhoff),
        (8, "big Witt vectors over ℚ", c08_witt),
        (9, "monomial matrix rings and c̃", c09_lambda),
        (10, "iterated pyramid/bipyramid classification", c10_pclass),
        (11, "excision witness", c11_excision),
        (12, "CLI determinism", c12_cli_determinism),
    ];
    // `ACCEPTANCE_ONLY=2,7` restricts the run to the listed criteria.
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut hard_failure = false;
    for (id, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let mut chk = Check::default();
        if let Err(p) = panic::catch_unwind(AssertUnwindSafe(|| f(&mut chk))) {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            chk.failures.push(format!("panicked: {}", msg.unwrap_or_default()));
        }
        let secs = start.elapsed().as_secs_f64();
        let documented = DOCUMENTED.iter().find(|(d, _)| *d == id).map(|(_, why)| *why);
        let status = if chk.failures.is_empty() && documented.is_none() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {id:>2} {status} {name} ({secs:.2}s)");
        if !chk.notes.is_empty() {
            line.push_str(&format!(" [{}]", chk.notes.join("; ")));
        }
        if let Some(why) = documented {
            line.push_str(&format!(" documented deviation: {why}"));
        }
        println!("{line}");
        for f in chk.failures.iter().take(5) {
            println!("    {f}");
        }
        if !chk.failures.is_empty() {
            hard_failure = true;
        }
    }
    if hard_failure {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

// ---------------------------------------------------------------------------------------------
// 1
// ---------------------------------------------------------------------------------------------

fn det_i64(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("rank ≤ 3"),
    }
}

fn subsets(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(k, n - 1);
    for mut s in subsets(k - 1, n - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Cone membership by Carathéodory: `x` lies in some simplicial subcone. Cramer's rule in i64.
struct SimplicialCover {
    /// `(det, columns)` for every independent `r`-subset of generators.
    pieces: Vec<(i64, Vec<Vec<i64>>)>,
}

impl SimplicialCover {
    fn new(gens: &[Vec<i64>], r: usize) -> Self {
        let pieces = subsets(r, gens.len())
            .into_iter()
            .filter_map(|s| {
                // rows of the matrix are coordinates, columns are generators
                let m: Vec<Vec<i64>> = (0..r).map(|i| s.iter().map(|&j| gens[j][i]).collect()).collect();
                let d = det_i64(&m);
                (d != 0).then_some((d, m))
            })
            .collect();
        SimplicialCover { pieces }
    }

    /// Cramer numerators times `sign(det)`: `x` is in the piece iff all are ≥ 0.
    fn coefficients(d: i64, m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
        let r = m.len();
        (0..r)
            .map(|k| {
                let mk: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| if j == k { x[i] } else { m[i][j] }).collect()).collect();
                det_i64(&mk) * d.signum()
            })
            .collect()
    }

    fn contains(&self, x: &[i64]) -> bool {
        self.pieces.iter().any(|(d, m)| Self::coefficients(*d, m, x).iter().all(|&c| c >= 0))
    }
}

fn random_gens(rng: &mut ChaCha8Rng, r: usize, max: i64) -> Vec<Vec<i64>> {
    loop {
        let k = rng.gen_range(r..=r + 2);
        let gens: Vec<Vec<i64>> =
            (0..k).map(|_| (0..r).map(|_| rng.gen_range(0..=max)).collect::<Vec<i64>>()).filter(|g| g.iter().any(|&c| c != 0)).collect();
        if !gens.is_empty() && !SimplicialCover::new(&gens, r).pieces.is_empty() {
            return gens;
        }
    }
}

fn brute_force_hilbert_basis(gens: &[Vec<i64>], r: usize) -> Vec<IVec> {
    let cover = SimplicialCover::new(gens, r);
    let bound: Vec<i64> = (0..r).map(|i| gens.iter().map(|g| g[i]).sum()).collect();
    let mut pts: Vec<Vec<i64>> = vec![vec![]];
    for b in &bound {
        pts = pts.into_iter().flat_map(|p| (0..=*b).map(move |c| [p.clone(), vec![c]].concat())).collect();
    }
    let members: HashSet<Vec<i64>> = pts.into_iter().filter(|x| cover.contains(x)).collect();
    let mut sorted: Vec<&Vec<i64>> = members.iter().filter(|x| x.iter().any(|&c| c != 0)).collect();
    sorted.sort_by_key(|x| (x.iter().sum::<i64>(), (*x).clone()));
    let mut irr: Vec<Vec<i64>> = Vec::new();
    for x in sorted {
        let reducible = irr.iter().any(|h| {
            let d: Vec<i64> = x.iter().zip(h).map(|(a, b)| a - b).collect();
            members.contains(&d)
        });
        if !reducible {
            irr.push(x.clone());
        }
    }
    let mut out: Vec<IVec> = irr.iter().map(|v| ivec(v)).collect();
    out.sort();
    out
}

fn c01_hilbert_oracle(chk: &mut Check) {
    let mut rng = rng(1);
    let start = Instant::now();
    for case in 0..HB_CONES {
        let r = rng.gen_range(1..=HB_MAX_RANK);
        let gens = random_gens(&mut rng, r, HB_MAX_COORD);
        let cone = Cone::from_generators(r, &gens.iter().map(|g| ivec(g)).collect::<Vec<_>>()).expect("cone");
        let mut got = hilbert::hilbert_basis(&cone, &Lattice::full(r)).expect("hilbert basis");
        got.sort();
        let want = brute_force_hilbert_basis(&gens, r);
        chk.ensure(got == want, || format!("case {case}: gens {gens:?}: got {got:?}, oracle {want:?}"));
    }
    let el = start.elapsed();
    chk.ensure(el < HB_BUDGET, || format!("runtime {el:?} exceeds {HB_BUDGET:?}"));
    chk.note(format!("{HB_CONES} cones in {:.1}s, budget {}s", el.as_secs_f64(), HB_BUDGET.as_secs()));
}

// ---------------------------------------------------------------------------------------------
// 2, 3
// ---------------------------------------------------------------------------------------------

fn random_monoid(rng: &mut ChaCha8Rng, max_rank: usize, max: i64) -> AffineMonoid {
    let r = rng.gen_range(1..=max_rank);
    let gens = random_gens(rng, r, max);
    AffineMonoid::new(r, &gens.iter().map(|g| ivec(g)).collect::<Vec<_>>()).expect("monoid")
}

fn c02_interior_identity(chk: &mut Check) {
    let mut rng = rng(2);
    for case in 0..SN_MONOIDS {
        let m = random_monoid(&mut rng, 3, SN_MAX_COORD);
        let top = m.generators().iter().map(|g| m.degree(g).unwrap()).max().unwrap();
        let window = &top * Int::from(SN_WINDOW_FACTOR);
        let plus = m.interior_submonoid().unwrap();
        let sn_plus = plus.seminormalization().unwrap().monoid;
        let sn_then_plus = m.seminormalization().unwrap().monoid.interior_submonoid().unwrap();
        let n_plus = plus.normalization().unwrap();
        let n_then_plus = m.normalization().unwrap().interior_submonoid().unwrap();
        let sets: Vec<Vec<IVec>> =
            [&sn_plus, &sn_then_plus, &n_plus, &n_then_plus].iter().map(|x| x.irreducibles_up_to(&window).unwrap()).collect();
        chk.ensure(sets.windows(2).all(|w| w[0] == w[1]), || format!("case {case} {m:?}: {sets:?}"));
        // independent: interior lattice points of the window, filtered by membership in each
        for x in m.normalization().unwrap().elements_up_to(&window).unwrap() {
            let interior = arith::is_zero_i(&x) || m.cone().interior_contains(&x);
            chk.ensure(sn_plus.contains(&x) == interior, || format!("case {case}: sn(M₊) membership of {x:?}"));
        }
    }
    chk.note(format!("{SN_MONOIDS} monoids, window {SN_WINDOW_FACTOR}× top generator degree"));
}

fn c03_seminormal_anchors(chk: &mut Check) {
    let m = |g: &[&[i64]]| AffineMonoid::from_i64(g).unwrap();
    let a = m(&[&[2], &[3]]).seminormalization().unwrap();
    chk.ensure(a.monoid.generators() == [ivec(&[1])], || format!("<2,3>: {:?}", a.monoid));
    let b = m(&[&[3], &[4], &[5]]).seminormalization().unwrap();
    chk.ensure(b.monoid.generators() == [ivec(&[1])] && b.steps == 2, || format!("<3,4,5>: {:?} in {} steps", b.monoid, b.steps));
    chk.ensure(b.added == vec![vec![ivec(&[2])], vec![ivec(&[1])]], || format!("<3,4,5> steps {:?}", b.added));
    // {(a,b) ∈ ℤ₊² : b = 0 ⇒ a even}
    let parity = m(&[&[2, 0], &[0, 1], &[1, 1]]);
    for a in 0..8 {
        for bb in 0..8 {
            let want = bb > 0 || a % 2 == 0;
            chk.ensure(parity.contains(&ivec(&[a, bb])) == want, || format!("parity monoid membership ({a},{bb})"));
        }
    }
    chk.ensure(parity.is_seminormal().unwrap(), || "parity monoid not seminormal".into());
    chk.ensure(!parity.is_normal().unwrap(), || "parity monoid normal".into());
}

// ---------------------------------------------------------------------------------------------
// 4
// ---------------------------------------------------------------------------------------------

fn c04_invert_extremal(chk: &mut Check) {
    let mut rng = rng(4);
    let mut done = 0;
    while done < INV_CASES {
        let r = rng.gen_range(2..=3);
        let gens = random_gens(&mut rng, r, 4);
        let cone = Cone::from_generators(r, &gens.iter().map(|g| ivec(g)).collect::<Vec<_>>()).unwrap();
        let m = AffineMonoid::from_cone_lattice(&cone, &Lattice::full(r)).unwrap();
        let t = cone.rays()[rng.gen_range(0..cone.rays().len())].clone();
        let inv = m.invert_extremal(&t).unwrap();
        chk.ensure(inv.quotient.rank() + 1 == m.rank(), || format!("rank: M {:?}, t {t:?}", m));
        chk.ensure(inv.quotient.has_trivial_units(), || format!("U(N) ≠ 0: M {m:?}, t {t:?}"));
        // x ∈ ℤ₊(−t) + M  ⇔  x + k t ∈ M for some k ≥ 0
        for _ in 0..8 {
            let x: IVec = (0..r).map(|_| Int::from(rng.gen_range(-INV_PROBE..=INV_PROBE))).collect();
            let oracle = (0..=INV_SHIFT_CAP).any(|k| cone.contains(&arith::add_i(&x, &arith::scale_i(&Int::from(k), &t))));
            chk.ensure(inv.contains_localized(&x) == oracle, || format!("localized membership of {x:?}, t {t:?}"));
        }
        done += 1;
    }
    chk.note(format!("{INV_CASES} instances"));
}

// ---------------------------------------------------------------------------------------------
// 5, 6
// ---------------------------------------------------------------------------------------------

fn poly_i(pts: &[&[i64]]) -> Polytope {
    Polytope::from_points(pts[0].len(), &pts.iter().map(|p| qvec(p)).collect::<Vec<_>>())
}

fn square_extension() -> pyramidal::PyramidalExtension {
    let m = AffineMonoid::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1]]).unwrap();
    let n = AffineMonoid::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
    match pyramidal::is_pyramidal_extension(&m, &n).unwrap() {
        Verdict::Holds(e) => e,
        Verdict::Fails(f) => panic!("triangle⊂square: {f}"),
    }
}

fn approx_b_square(s: usize) -> pyramidal::ApproxB {
    let c = CSeq::constant(2).unwrap();
    pyramidal::approx_b_construct(&square_extension(), &c, s, 1, &[qvec(&[1, 1, 2])], &[qvec(&[1, 1, 3])], &ApproxCaps::default()).unwrap()
}

fn c05_polarized(chk: &mut Check) {
    let quadrant = AffineMonoid::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
    let octant = AffineMonoid::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
    let mut instances = vec![
        ("2D quadrant".to_string(), PolarizedMonoid::new(&ivec(&[0, 1]), &poly_i(&[&[1, 0], &[1, 1]]), &quadrant).unwrap()),
        (
            "3D octant".to_string(),
            PolarizedMonoid::new(&ivec(&[0, 0, 1]), &poly_i(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]]), &octant).unwrap(),
        ),
    ];
    for (l, p) in approx_b_square(2).triples.into_iter().enumerate() {
        instances.push((format!("3D approximation triple {}", l + 1), p));
    }
    for (name, p) in &instances {
        let rep = pyramidal::verify_polarized(p.t(), p.gamma(), p.monoid());
        chk.ensure(rep.holds(), || format!("{name}: {:?}", rep.failure));
        let a = pyramidal::antipode(p).unwrap();
        let arep = pyramidal::verify_polarized(a.t(), a.gamma(), a.monoid());
        chk.ensure(arep.holds(), || format!("{name}: antipode not polarized: {:?}", arep.failure));
        chk.ensure(arith::neg_i(a.t()) == *p.t(), || format!("{name}: antipode pole"));
        chk.ensure(pyramidal::antipode(&a).unwrap().same_as(p), || format!("{name}: antipode not an involution"));
        for i in 0..p.facet_signs().len() {
            let (s, sa) = (pyramidal::facet_sign(p, i).unwrap(), pyramidal::facet_sign(&a, i).unwrap());
            chk.ensure(sa == s.flip(), || format!("{name}: facet {i} sign not flipped"));
        }
        let fan = pyramidal::scheme_fan(p).unwrap();
        chk.ensure(fan.holds(), || format!("{name}: scheme fan {:?}", fan.clauses));
        // union check by rays: every ray of C(N(Γ))* lies in one of the two maximal cones
        let dual_gamma = p.gamma_cone().dual();
        chk.ensure(
            dual_gamma.rays().iter().all(|x| fan.plus.contains(x) || fan.minus.contains(x))
                && fan.plus.is_subset_of(&dual_gamma)
                && fan.minus.is_subset_of(&dual_gamma),
            || format!("{name}: C(N)* ∪ C(N⁻)* ≠ C(N(Γ))*"),
        );
    }
    let bad = pyramidal::verify_polarized(&ivec(&[0, 1]), &poly_i(&[&[1, 0], &[2, 1]]), &quadrant);
    chk.ensure(!bad.holds(), || "(2,1)-instance verified".into());
    chk.ensure(bad.failing_facet() == Some(&[ivec(&[2, 1])][..]), || format!("(2,1)-instance failing facet {:?}", bad.failing_facet()));
    // the obstruction: (1,1) is irreducible in N ∩ cone((0,1),(2,1)) but not in ℤ₊t × ℤ₊(2,1)
    let sub =
        AffineMonoid::from_cone_lattice(&Cone::from_generators(2, &[ivec(&[0, 1]), ivec(&[2, 1])]).unwrap(), &Lattice::full(2)).unwrap();
    chk.ensure(sub.hilbert_basis().unwrap().contains(&ivec(&[1, 1])), || "(1,1) missing from the facet Hilbert basis".into());
    chk.note(format!("{} verified instances", instances.len()));
}

fn c06_approx_b(chk: &mut Check) {
    let start = Instant::now();
    let out = approx_b_square(2);
    let el = start.elapsed();
    chk.ensure(out.triples.len() == 2, || format!("{} triples", out.triples.len()));
    for c in &out.clauses {
        chk.ensure(c.pass, || format!("clause failed: {}", c.name));
    }
    chk.ensure(out.clauses.iter().any(|c| c.name.starts_with("±t +")), || "shift condition not checked".into());
    for (l, p) in out.triples.iter().enumerate() {
        let rep = pyramidal::verify_polarized(p.t(), p.gamma(), p.monoid());
        chk.ensure(rep.holds(), || format!("triple {l}: {:?}", rep.failure));
    }
    // nesting Γ_1 ⊂ Γ_2, in actual coordinates: compare the cones spanned
    let (g1, g2) = (out.triples[0].gamma_cone(), out.triples[1].gamma_cone());
    chk.ensure(g1.is_subset_of(g2), || "Γ_1 ⊄ Γ_2".into());
    // shift condition, sampled: ±t + x interior to the next level for x ∈ N_1(Γ_1) ∖ 0
    let (p1, p2) = (&out.triples[0], &out.triples[1]);
    let f1 = p1.face_monoid().unwrap();
    let f2 = p2.face_monoid().unwrap();
    for x in f1.elements_up_to(&Int::from(3)).unwrap().into_iter().filter(|x| !arith::is_zero_i(x)) {
        for sgn in [1, -1] {
            let y = arith::add_i(&x, &arith::scale_i(&Int::from(sgn), p1.t()));
            chk.ensure(f2.in_interior_ideal(&y), || format!("±t + {x:?} not interior to N_2(Γ_2)"));
        }
    }
    chk.ensure(el < APPROX_B_BUDGET, || format!("runtime {el:?} exceeds {APPROX_B_BUDGET:?}"));
    chk.note(format!("stage {}, {:.1}s, budget {}s", out.stage, el.as_secs_f64(), APPROX_B_BUDGET.as_secs()));
}

// ---------------------------------------------------------------------------------------------
// 7
// ---------------------------------------------------------------------------------------------

fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().map(|&(d, c)| (d, rat(c, 1))))
}

/// Product of random elementary operations and a permutation; entries are polynomials in `t`
/// (or in `t⁻¹` when `inverse_variable`), so the determinant is a nonzero constant.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, ops: usize, inverse_variable: bool) -> LaurentMatrix {
    let mut m = LaurentMatrix::identity(n);
    for _ in 0..ops {
        if n == 1 {
            break;
        }
        let (i, j) = loop {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                break (i, j);
            }
        };
        let mut p = lp(&[(0, rng.gen_range(-2..=2)), (1, rng.gen_range(-2..=2))]);
        if inverse_variable {
            p = p.invert_variable();
        }
        let rows: Vec<Vec<LaurentPoly>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a == b {
                            LaurentPoly::one()
                        } else if (a, b) == (i, j) {
                            p.clone()
                        } else {
                            LaurentPoly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        m = LaurentMatrix::new(rows).unwrap().mul(&m);
    }
    let scale: Vec<LaurentPoly> = (0..n).map(|_| LaurentPoly::constant(rat([1, -1, 2][rng.gen_range(0..3)], 1))).collect();
    m.mul(&LaurentMatrix::diag(&scale))
}

fn spread(m: &LaurentMatrix) -> i64 {
    let degs: Vec<i64> = m.rows().iter().flatten().flat_map(|p| [p.min_deg(), p.max_deg()]).flatten().collect();
    degs.iter().max().unwrap() - degs.iter().min().unwrap()
}

fn check_factorization(chk: &mut Check, label: &str, theta: &LaurentMatrix) -> Option<Vec<i64>> {
    let b = match laurent::birkhoff_factorize(theta) {
        Ok(b) => b,
        Err(e) => {
            chk.failures.push(format!("{label}: {e}"));
            return None;
        }
    };
    let prod = b.sigma.mul(theta).mul(&b.tau);
    chk.ensure(prod.as_diag_t().as_ref() == Some(&b.u), || format!("{label}: σθτ = {:?}, u = {:?}", prod, b.u));
    chk.ensure(b.sigma.is_over_t() && b.sigma.det().as_unit().is_some_and(|(_, d)| d == 0), || format!("{label}: σ not in GL(ℚ[t])"));
    chk.ensure(b.tau.is_over_t_inv() && b.tau.det().as_unit().is_some_and(|(_, d)| d == 0), || format!("{label}: τ not in GL(ℚ[t⁻¹])"));
    chk.ensure(b.u.windows(2).all(|w| w[0] >= w[1]), || format!("{label}: u not descending"));
    let deg = theta.det().as_unit().map(|(_, d)| d);
    chk.ensure(deg == Some(b.u.iter().sum()), || format!("{label}: Σu = {} but deg det = {deg:?}", b.u.iter().sum::<i64>()));
    Some(b.u)
}

fn c07_birkhoff(chk: &mut Check) {
    let mut rng = rng(7);
    let mut made = 0;
    let mut factorizations = 0;
    while made < BIRKHOFF_MATRICES {
        let n = rng.gen_range(1..=BIRKHOFF_MAX_N);
        let mut u: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        let a = random_unimodular(&mut rng, n, 2, false);
        let b = random_unimodular(&mut rng, n, 2, true);
        let theta = a.mul(&LaurentMatrix::diag_t(&u)).mul(&b);
        if spread(&theta) > BIRKHOFF_MAX_SPREAD {
            continue;
        }
        made += 1;
        // oracle: θ was built as A(t)·diag(t^u)·B(t⁻¹), so its type is u sorted descending
        u.sort_unstable_by(|x, y| y.cmp(x));
        let label = format!("matrix {made}");
        let Some(got) = check_factorization(chk, &label, &theta) else { continue };
        factorizations += 1;
        chk.ensure(got == u, || format!("{label}: type {got:?}, constructed {u:?}"));
        for k in 0..BIRKHOFF_PERTURBATIONS {
            let p = random_unimodular(&mut rng, n, 1, false);
            let q = random_unimodular(&mut rng, n, 1, true);
            let pert = p.mul(&theta).mul(&q);
            match laurent::birkhoff_factorize(&pert) {
                Ok(bp) => {
                    factorizations += 1;
                    chk.ensure(bp.u == u, || format!("{label} perturbation {k}: {:?} vs {u:?}", bp.u));
                    chk.ensure(bp.sigma.mul(&pert).mul(&bp.tau).as_diag_t().as_ref() == Some(&bp.u), || {
                        format!("{label} perturbation {k}: σθτ not diagonal")
                    });
                }
                Err(e) => chk.failures.push(format!("{label} perturbation {k}: {e}")),
            }
        }
    }
    let d = LaurentMatrix::diag(&[lp(&[(2, 1)]), lp(&[(-1, 1)])]);
    let got = check_factorization(chk, "diag(t²,t⁻¹)", &d);
    chk.ensure(got == Some(vec![2, -1]), || format!("diag(t²,t⁻¹) gave {got:?}"));
    let upper = LaurentMatrix::new(vec![vec![lp(&[(1, 1)]), lp(&[(0, 1)])], vec![LaurentPoly::zero(), lp(&[(-1, 1)])]]).unwrap();
    let witness =
        LaurentMatrix::new(vec![vec![LaurentPoly::one(), lp(&[(-1, -1)])], vec![LaurentPoly::zero(), LaurentPoly::one()]]).unwrap();
    chk.ensure(upper.mul(&witness) == LaurentMatrix::diag_t(&[1, -1]), || "witness for [[t,1],[0,t⁻¹]] failed".into());
    let got = check_factorization(chk, "[[t,1],[0,t⁻¹]]", &upper);
    chk.ensure(got == Some(vec![1, -1]), || format!("[[t,1],[0,t⁻¹]] gave {got:?}"));
    chk.note(format!("{factorizations} factorizations, spread ≤ {BIRKHOFF_MAX_SPREAD}, n ≤ {BIRKHOFF_MAX_N}"));
}

// ---------------------------------------------------------------------------------------------
// 8
// ---------------------------------------------------------------------------------------------

fn random_witt(rng: &mut ChaCha8Rng, m: usize) -> WittVector {
    WittVector::new((0..m).map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect())
}

/// Power series (constant term first) truncated at degree `m`.
fn series_mul(a: &[Rat], b: &[Rat], m: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); m + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= m {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Ghost components via `−T d/dT log f`, with `log f = Σ (−1)^{k+1} (f−1)^k / k`.
fn ghost_oracle(f: &WittVector) -> Vec<Rat> {
    let m = f.truncation();
    let mut g = vec![Rat::zero(); m + 1];
    g[1..].clone_from_slice(f.coeffs());
    let mut pow = g.clone();
    let mut log = vec![Rat::zero(); m + 1];
    for k in 1..=m {
        let c = Rat::new(if k % 2 == 1 { Int::one() } else { -Int::one() }, Int::from(k));
        for (l, p) in log.iter_mut().zip(&pow) {
            *l += &c * p;
        }
        pow = series_mul(&pow, &g, m);
    }
    (1..=m).map(|n| -Rat::from_integer(Int::from(n)) * &log[n]).collect()
}

fn full(f: &WittVector) -> Vec<Rat> {
    let mut v = vec![Rat::one()];
    v.extend(f.coeffs().iter().cloned());
    v
}

fn c08_witt(chk: &mut Check) {
    let m = WITT_TRUNCATION;
    let mut rng = rng(8);
    for k in 0..WITT_SAMPLES {
        let (f, g) = (random_witt(&mut rng, m), random_witt(&mut rng, m));
        let (gf, gg) = (witt::ghost(&f), witt::ghost(&g));
        chk.ensure(gf == ghost_oracle(&f), || format!("sample {k}: ghost disagrees with the log-derivative oracle"));
        let sum = witt::witt_add(&f, &g).unwrap();
        chk.ensure(full(&sum) == series_mul(&full(&f), &full(&g), m), || format!("sample {k}: addition is not series product"));
        let want: Vec<Rat> = gf.iter().zip(&gg).map(|(a, b)| a + b).collect();
        chk.ensure(witt::ghost(&sum) == want, || format!("sample {k}: ghost not additive"));
        let star = witt::witt_star(&f, &g).unwrap();
        let want: Vec<Rat> = gf.iter().zip(&gg).map(|(a, b)| a * b).collect();
        chk.ensure(witt::ghost(&star) == want, || format!("sample {k}: ghost not multiplicative"));
        chk.ensure(witt::witt_star_by_factors(&f, &g).unwrap() == star, || format!("sample {k}: factor route disagrees"));
        chk.ensure(witt::from_ghost(&gf) == f, || format!("sample {k}: from_ghost ∘ ghost ≠ id"));
        let v: Vec<Rat> = (0..m).map(|_| rat(rng.gen_range(-5..=5), 1)).collect();
        chk.ensure(witt::ghost(&witt::from_ghost(&v)) == v, || format!("sample {k}: ghost ∘ from_ghost ≠ id"));
        chk.ensure(witt::witt_add(&f, &witt::witt_neg(&f)).unwrap() == WittVector::one(m), || format!("sample {k}: f + (−f) ≠ 0"));
    }
    let unit = WittVector::elementary(Rat::one(), 1, m);
    chk.ensure(witt::ghost(&unit) == vec![Rat::one(); m], || "ghost(1−T) ≠ (1,1,…)".into());
    chk.ensure(witt::ghost(&WittVector::one(m)) == vec![Rat::zero(); m], || "ghost(1) ≠ 0".into());
    for r in -3..=3 {
        for s in -3..=3 {
            let (rr, ss) = (rat(r, 1), rat(s, 1));
            let a = WittVector::elementary(rr.clone(), 1, m);
            let b = WittVector::elementary(ss.clone(), 1, m);
            let want = WittVector::elementary(&rr * &ss, 1, m);
            chk.ensure(witt::witt_star(&a, &b).unwrap() == want, || format!("(1−{r}T)⋆(1−{s}T)"));
            chk.ensure(witt::witt_star_by_factors(&a, &b).unwrap() == want, || format!("(1−{r}T)⋆(1−{s}T) via factors"));
            let a2 = WittVector::elementary(rr.clone(), 2, m);
            let b2 = WittVector::elementary(ss.clone(), 2, m);
            // (1 − rs T²)² = 1 − 2rs T² + r²s² T⁴
            let mut c = vec![Rat::zero(); m];
            c[1] = -Rat::from_integer(Int::from(2)) * &rr * &ss;
            c[3] = (&rr * &ss) * (&rr * &ss);
            let want2 = WittVector::new(c);
            chk.ensure(witt::witt_star(&a2, &b2).unwrap() == want2, || format!("(1−{r}T²)⋆(1−{s}T²)"));
            chk.ensure(witt::witt_star_by_factors(&a2, &b2).unwrap() == want2, || format!("(1−{r}T²)⋆(1−{s}T²) via factors"));
        }
    }
    for mm in [12, 24] {
        let p = witt::witt_star(&WittVector::elementary(Rat::one(), 4, mm), &WittVector::elementary(Rat::one(), 6, mm)).unwrap();
        chk.ensure(witt::filtration_degree(&p) == 12, || format!("filtration degree {} at truncation {mm}", witt::filtration_degree(&p)));
    }
    chk.note(format!("truncation {m}, {WITT_SAMPLES} random pairs, r,s ∈ −3..3"));
}

// ---------------------------------------------------------------------------------------------
// 9
// ---------------------------------------------------------------------------------------------

/// Support rules written out for the toy data `t = (0,1)`, base cone `{y ≥ 0, x ≥ y}`.
fn toy_allows(prime: bool, i: usize, j: usize, m: &[i64]) -> bool {
    let s = |x: i64, y: i64| y >= 0 && x >= y;
    let (x, y) = (m[0], m[1]);
    match (i, j) {
        (0, 0) | (1, 1) => s(x, y),
        (0, 1) => s(x, y) && s(x, y + 1),
        _ => (s(x, y) || s(x, y - 1)) && !(prime && x == 0 && y >= 1),
    }
}

fn random_member(rng: &mut ChaCha8Rng, prime: bool) -> Matrix2 {
    let mut e: Vec<MPoly> = Vec::new();
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let mut p = MPoly::zero();
        let want = rng.gen_range(0..=3);
        let mut have = 0;
        while have < want {
            let m = [rng.gen_range(-2..=4), rng.gen_range(-2..=4)];
            if toy_allows(prime, i, j, &m) {
                p = p.add(&MPoly::monomial(ivec(&m), rat(rng.gen_range(1..=3), 1)));
                have += 1;
            }
        }
        e.push(p);
    }
    let mut it = e.into_iter();
    Matrix2::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
}

fn oracle_member(phi: &Matrix2, prime: bool) -> bool {
    (0..2).all(|i| {
        (0..2).all(|j| {
            phi.e[i][j].support().all(|m| {
                let v: Vec<i64> = m.iter().map(|x| i64::try_from(x).unwrap()).collect();
                toy_allows(prime, i, j, &v)
            })
        })
    })
}

fn c09_lambda(chk: &mut Check) {
    let mut rng = rng(9);
    let quadrant = AffineMonoid::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
    let p = PolarizedMonoid::new(&ivec(&[0, 1]), &poly_i(&[&[1, 0], &[1, 1]]), &quadrant).unwrap();
    let c1 = Cone::from_generators(2, &[ivec(&[1, 0]), ivec(&[1, 1])]).unwrap();
    let c2 = Cone::from_generators(2, &[ivec(&[1, 1]), ivec(&[0, 1])]).unwrap();
    let bip = MonomialMatrixRing::bipyramidal(ivec(&[0, 1]), &c1, &c2).unwrap();
    chk.ensure(bip.omega() == Some(&ivec(&[1, 0])), || format!("ω = {:?}", bip.omega()));
    let rings = [
        ("Λ", MonomialMatrixRing::from_polarized(&p, false), false),
        ("Λ′", MonomialMatrixRing::from_polarized(&p, true), true),
        ("Λ_{t,C}", bip.clone(), false),
    ];
    for (name, ring, prime) in &rings {
        for k in 0..LAMBDA_PAIRS {
            let (a, b) = (random_member(&mut rng, *prime), random_member(&mut rng, *prime));
            chk.ensure(lambda::lambda_membership(&a, ring).unwrap(), || format!("{name}: sample {k} rejected"));
            let ab = a.mul(&b);
            chk.ensure(oracle_member(&ab, *prime), || format!("{name}: product {k} leaves the ring (oracle)"));
            chk.ensure(lambda::lambda_membership(&ab, ring).unwrap(), || format!("{name}: product {k} leaves the ring"));
        }
        chk.ensure(lambda::lambda_membership(&Matrix2::identity(2), ring).unwrap(), || format!("{name}: identity missing"));
    }
    let t_in_21 = Matrix2::new(MPoly::zero(), MPoly::zero(), MPoly::monomial(ivec(&[0, 1]), Rat::one()), MPoly::zero());
    chk.ensure(!lambda::lambda_membership(&t_in_21, &rings[1].1).unwrap(), || "Λ′ admits t in entry 21".into());
    chk.ensure(lambda::lambda_membership(&t_in_21, &rings[0].1).unwrap(), || "Λ rejects t in entry 21".into());
    for k in 0..TILDE_SAMPLES {
        let c = rng.gen_range(1..=4u64);
        let (a, b) = (random_member(&mut rng, false), random_member(&mut rng, false));
        let ta = lambda::tilde_c_apply(&a, c, &bip).unwrap();
        let tb = lambda::tilde_c_apply(&b, c, &bip).unwrap();
        chk.ensure(lambda::tilde_c_apply(&a.add(&b), c, &bip).unwrap() == ta.add(&tb), || format!("c̃ not additive (sample {k}, c={c})"));
        chk.ensure(lambda::tilde_c_apply(&a.mul(&b), c, &bip).unwrap() == ta.mul(&tb), || {
            format!("c̃ not multiplicative (sample {k}, c={c})")
        });
        chk.ensure(lambda::tilde_c_apply(&Matrix2::identity(2), c, &bip).unwrap() == Matrix2::identity(2), || {
            format!("c̃ not unital (c={c})")
        });
    }
    let quad = Cone::from_generators(2, &[ivec(&[1, 0]), ivec(&[0, 1])]).unwrap();
    let c0 = lambda::minimal_endo_exponent(&ivec(&[0, 1]), &ivec(&[1, 0]), &quad, 64);
    chk.ensure(c0 == Ok(2), || format!("minimal exponent {c0:?}"));
    // independent: (c−1)ω + ct = (c−1, c) is interior to the quadrant iff c ≥ 2
    for c in 1..10i64 {
        let x = ivec(&[c - 1, c]);
        chk.ensure(quad.interior_contains(&x) == (c >= 2), || format!("quadrant interior at c={c}"));
    }
    chk.note(format!("{LAMBDA_PAIRS} products per ring, {TILDE_SAMPLES} c̃ samples"));
}

// ---------------------------------------------------------------------------------------------
// 10
// ---------------------------------------------------------------------------------------------

fn sigma_of(p: &Polytope) -> Option<String> {
    pclass::classify_sigma(p).unwrap().map(|c| c.sigma)
}

fn c10_pclass(chk: &mut Check) {
    for d in 1..=4usize {
        let mut pts = vec![vec![0i64; d]];
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            pts.push(e);
        }
        let simplex = Polytope::from_points(d, &pts.iter().map(|p| qvec(p)).collect::<Vec<_>>());
        let want = "0".repeat(d - 1);
        chk.ensure(sigma_of(&simplex).as_deref() == Some(want.as_str()), || format!("{d}-simplex: {:?}", sigma_of(&simplex)));
    }
    let square = poly_i(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
    chk.ensure(sigma_of(&square).as_deref() == Some("1"), || "square".into());
    let pyr = poly_i(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[2, 2, 0], &[1, 1, 1]]);
    chk.ensure(sigma_of(&pyr).as_deref() == Some("01"), || "square pyramid".into());
    let oct = poly_i(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
    chk.ensure(sigma_of(&oct).as_deref() == Some("11"), || "octahedron".into());
    let cube: Vec<Vec<i64>> = (0..8).map(|k| vec![k & 1, k >> 1 & 1, k >> 2 & 1]).collect();
    let cube = Polytope::from_points(3, &cube.iter().map(|p| qvec(p)).collect::<Vec<_>>());
    chk.ensure(sigma_of(&cube).is_none(), || "cube accepted".into());
    for r in 1..=PCLASS_MAX_R {
        let types = pclass::enumerate_types(r).unwrap();
        chk.ensure(types.len() == 1 << (r - 1), || format!("r={r}: {} types", types.len()));
        let distinct: HashSet<&String> = types.iter().map(|(s, _)| s).collect();
        chk.ensure(distinct.len() == types.len(), || format!("r={r}: repeated types"));
        for (s, p) in &types {
            chk.ensure(sigma_of(p).as_ref() == Some(s), || format!("r={r}: witness of {s} classifies as {:?}", sigma_of(p)));
        }
    }
    let oct_cone = AffineMonoid::from_i64(&[&[1, 0, 0, 1], &[-1, 0, 0, 1], &[0, 1, 0, 1], &[0, -1, 0, 1], &[0, 0, 1, 1], &[0, 0, -1, 1]])
        .unwrap()
        .normalization()
        .unwrap();
    let phi = oct_cone.cross_section().unwrap();
    chk.ensure(phi.vertices().len() == 6, || "octahedron cone cross-section".into());
    for v in phi.vertices() {
        let corner = pclass::corner_cone(&oct_cone, v).unwrap();
        let s = sigma_of(&corner.monoid.cross_section().unwrap());
        chk.ensure(s.as_deref() == Some("1"), || format!("corner at {v:?}: {s:?}"));
    }
    chk.note(format!("enumeration checked for r ≤ {PCLASS_MAX_R}"));
}

// ---------------------------------------------------------------------------------------------
// 11
// ---------------------------------------------------------------------------------------------

/// Strict positivity of the simplicial coordinates of `x` (rational) w.r.t. the columns `g`.
fn simplicial_interior(g: &[Vec<i64>], x: &[Rat]) -> bool {
    let (_, xi) = arith::clear_denoms(x);
    let xi: Vec<i64> = xi.iter().map(|v| i64::try_from(v).unwrap()).collect();
    let r = g.len();
    let m: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| g[j][i]).collect()).collect();
    let d = det_i64(&m);
    SimplicialCover::coefficients(d, &m, &xi).iter().all(|&c| c > 0)
}

fn c11_excision(chk: &mut Check) {
    let mut rng = rng(11);
    let mut done = 0;
    while done < EXCISION_BATCHES {
        let r = rng.gen_range(1..=3);
        // simplicial cone over ℤ^r, so interiority has a closed form
        let g: Vec<Vec<i64>> = (0..r).map(|_| (0..r).map(|_| rng.gen_range(0..=3)).collect()).collect();
        let m_cols: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| g[j][i]).collect()).collect();
        if det_i64(&m_cols) == 0 {
            continue;
        }
        let cone = Cone::from_generators(r, &g.iter().map(|v| ivec(v)).collect::<Vec<_>>()).unwrap();
        let m = AffineMonoid::from_cone_lattice(&cone, &Lattice::full(r)).unwrap();
        let cseq = CSeq::new((0..2).map(|_| rng.gen_range(2..=3)).collect(), rng.gen_range(2..=3)).unwrap();
        let j = rng.gen_range(0..=2);
        let den = cseq.denom(j);
        // interior points of the stage: strictly positive combinations of the generators, divided down
        let batch: Vec<QVec> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let coef: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=3)).collect();
                let x: Vec<Int> = (0..r).map(|i| Int::from((0..r).map(|k| coef[k] * g[k][i]).sum::<i64>())).collect();
                x.iter().map(|v| Rat::new(v.clone(), den.clone())).collect()
            })
            .collect();
        let w = match dilation::excision_witness(&m, &cseq, &batch, j, 24) {
            Ok(w) => w,
            Err(e) => {
                chk.failures.push(format!("batch {done}: {e}"));
                done += 1;
                continue;
            }
        };
        let st = dilation::stage(&m, &cseq, w.stage);
        let stage_den = Rat::from_integer(cseq.denom(w.stage));
        let on_stage = |x: &[Rat]| arith::is_integral(&arith::scale_q(&stage_den, x)) && simplicial_interior(&g, x);
        for (a, b) in batch.iter().zip(&w.b) {
            let sum = arith::add_q(&arith::add_q(b, &w.u), &w.v);
            chk.ensure(&sum == a, || format!("batch {done}: a ≠ b + u + v"));
            chk.ensure(on_stage(b) && st.interior_contains(b), || format!("batch {done}: b not interior at stage {}", w.stage));
        }
        chk.ensure(on_stage(&w.u) && st.interior_contains(&w.u), || format!("batch {done}: u not interior"));
        chk.ensure(on_stage(&w.v) && st.interior_contains(&w.v), || format!("batch {done}: v not interior"));
        done += 1;
    }
    chk.note(format!("{EXCISION_BATCHES} batches"));
}

// ---------------------------------------------------------------------------------------------
// 12
// ---------------------------------------------------------------------------------------------

fn job_file() -> String {
    let jobs = serde_json::json!([
        { "command": "hilbert", "input": { "rank": 4, "generators": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[1,1,-1,0]] } },
        { "command": "hilbert", "input": { "rank": 3, "generators": [[1,0,1],[0,1,1],[1,1,1],[0,0,1]] } },
        { "command": "seminormalize", "input": { "rank": 1, "generators": [[3],[4],[5]] } },
        { "command": "check-polarized", "input": { "t": [0,1], "gamma_vertices": [[1,0],[2,1]], "monoid": { "rank": 2, "generators": [[1,0],[0,1]] } } },
        { "command": "birkhoff", "input": { "theta": { "n": 2, "entries": [[[{"exp": 2, "coef": 1}], []], [[], [{"exp": -1, "coef": 1}]]] } } },
        { "command": "witt", "input": { "op": "star", "f": "1-2T", "g": "1-3T", "m": 6 } },
        { "command": "enumerate-types", "input": { "r": 4 } },
        { "command": "classify-p", "input": { "vertices": [[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0,0,1],[0,0,-1]] } },
        { "command": "approx-b", "input": {
            "m": { "rank": 3, "generators": [[0,0,1],[1,0,1],[0,1,1]] },
            "n": { "rank": 3, "generators": [[0,0,1],[1,0,1],[0,1,1],[1,1,1]] },
            "cseq": { "prefix": [], "tail": 2 }, "s": 2, "j": 1,
            "w": [[1,1,2]], "w_prime": [[1,1,3]] } },
        { "command": "excision-witness", "input": { "monoid": { "rank": 2, "generators": [[1,0],[0,1]] }, "cseq": { "prefix": [], "tail": 2 }, "j": 1, "a": [["1","1"], ["3/2","1/2"]] } },
        { "command": "hilbert", "input": { "rank": 2, "generators": [[1,0]] , "lattice": [[1,0],[0,1]], "extra": 1 } }
    ]);
    serde_json::to_string(&jobs).unwrap()
}

fn run_cli(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_toric")).args(args).output().expect("spawn toric");
    (out.stdout, out.status.code())
}

fn c12_cli_determinism(chk: &mut Check) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("jobs.json");
    std::fs::write(&path, job_file()).unwrap();
    let p = path.to_str().unwrap();
    let mut outputs = Vec::new();
    for threads in CLI_THREAD_COUNTS {
        for _run in 0..2 {
            let t = threads.to_string();
            outputs.push((threads, run_cli(&["batch", "--input", p, "--threads", &t])));
        }
    }
    let (_, (first, code)) = &outputs[0];
    chk.ensure(*code == Some(2), || format!("batch exit code {code:?}, the malformed last job should give 2"));
    let parsed: serde_json::Value = serde_json::from_slice(first).unwrap();
    chk.ensure(parsed.as_array().map(|a| a.len()) == Some(11), || "batch report length".into());
    for (threads, (o, c)) in &outputs[1..] {
        chk.ensure(o == first && c == code, || format!("threads={threads}: report differs"));
    }
    let single = ["witt", "star", "--f", "1-2T", "--g", "1-3T", "--m", "6"];
    let (a, _) = run_cli(&single);
    let (b, _) = run_cli(&single);
    chk.ensure(a == b && !a.is_empty(), || "single-command reports differ".into());
    chk.note(format!("threads {CLI_THREAD_COUNTS:?}, two runs each, {} bytes", first.len()));
}
