//! Verification suites. Each criterion returns a list of named checks; the
//! named suites group criteria for the command line.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::brauer::{
    cubic_h, double_factorial_count, enhanced_coupon_check, enumerate_basis, four_term_checks, BrauerElem,
};
use crate::error::{Error, Result};
use crate::g2::verify_g2_suite;
use crate::linalg::Mat;
use crate::polar::{normalize, relation_battery, z_closure, Engine, PolarElem, PolarGen, DEFAULT_BUDGET};
use crate::ptl::{binomial, projected_span_rank, ptl_rank, tlb_specialize, tlb_witness, verma_image_rank, Ptl};
use crate::scalars::{rat, ratio, Frac, Poly, Var};
use crate::superlin::{
    brauer_matrix, cap_cup, hom_dim_weightzero, standard_family, tau, DensePole, Module, Oracle, Osp,
};
use crate::uea::{sl2_char_identity, so3_char_identity, so3_identity_on_module, LieData, Pbw, Uea};

/// One verified statement.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    /// The relation as stated mathematically.
    pub anchor: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(criterion: u8, name: impl Into<String>, anchor: impl Into<String>, pass: bool) -> Check {
        Check { criterion, name: name.into(), anchor: anchor.into(), pass, detail: String::new() }
    }

    fn with(mut self, detail: impl Into<String>) -> Check {
        self.detail = detail.into();
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}

/// Knobs for the randomized parts of the suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub budget: usize,
    pub seed: u64,
    pub words: usize,
    pub pairs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { budget: DEFAULT_BUDGET, seed: 20240601, words: 200, pairs: 100 }
    }
}

pub const SUITES: [&str; 6] = ["brauer", "polar", "ptl", "osp", "uea", "g2"];

/// Criteria grouped under a suite name.
pub fn suite_criteria(name: &str) -> Result<Vec<u8>> {
    Ok(match name {
        "brauer" => vec![1, 2, 12],
        "polar" => vec![3, 4],
        "ptl" => vec![5, 11],
        "osp" => vec![6],
        "uea" => vec![7, 8, 9],
        "g2" => vec![10],
        "all" => (1..=12).collect(),
        other => return Err(Error::Parse(format!("unknown suite {other}"))),
    })
}

pub fn run_criterion(n: u8, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    match n {
        1 => brauer_core(cfg),
        2 => four_term(),
        3 => polar_battery(cfg),
        4 => normal_form_soundness(cfg),
        5 => ptl_ranks(),
        6 => osp_functor(cfg),
        7 => sl2_identity(),
        8 => so3_identity(),
        9 => centre(),
        10 => g2_suite(),
        11 => sp2_tlb(),
        12 => coupon(),
        _ => Err(Error::IndexOutOfRange { index: n as usize, rank: 12 }),
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for c in suite_criteria(name)? {
        out.extend(run_criterion(c, cfg)?);
    }
    Ok(out)
}

/// Random composable polar word with at most `max_r` strands, in
/// composition order (last generator applied first).
pub fn random_polar_word(rng: &mut ChaCha8Rng, src: usize, len: usize, max_r: usize, bubbles: bool) -> PolarElem {
    let mut r = src;
    let mut gens = Vec::new();
    let mut guard = 0;
    while gens.len() < len && guard < 10_000 {
        guard += 1;
        let g = match rng.gen_range(0..7) {
            0 if r >= 2 => PolarGen::S { i: rng.gen_range(1..r), r },
            1 if r >= 2 => PolarGen::E { i: rng.gen_range(1..r), r },
            2 if r >= 2 => PolarGen::Cap { i: rng.gen_range(1..r), r },
            3 if r + 2 <= max_r => PolarGen::Cup { i: rng.gen_range(1..=r + 1), r: r + 2 },
            4 | 5 if r >= 1 => PolarGen::D { r },
            6 if bubbles && rng.gen_bool(0.3) => PolarGen::Z { l: 2, r },
            _ => continue,
        };
        r = g.target();
        gens.push(g);
    }
    gens.reverse();
    PolarElem::product(&gens).expect("composable by construction")
}

fn random_brauer(rng: &mut ChaCha8Rng, r: usize, s: usize) -> Result<BrauerElem> {
    let basis = enumerate_basis(r, s)?;
    let mut e = BrauerElem::zero(r, s);
    for _ in 0..rng.gen_range(1..=3) {
        let d = basis[rng.gen_range(0..basis.len())].clone();
        e.add_term(d, Frac::int(rng.gen_range(-3..=3)));
    }
    Ok(e)
}

fn ranks_with_parity(rng: &mut ChaCha8Rng, max: usize, parity: usize) -> usize {
    loop {
        let x = rng.gen_range(0..=max);
        if x % 2 == parity % 2 {
            return x;
        }
    }
}

fn brauer_core(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for n in (0..=10).step_by(2) {
        for r in 0..=n {
            let got = enumerate_basis(r, n - r)?.len() as u128;
            if got != double_factorial_count(n) {
                bad.push(format!("({r},{})", n - r));
            }
        }
    }
    out.push(Check::new(1, "hom counts", "|Hom(r,s)| = (r+s−1)!! for r+s ≤ 10", bad.is_empty()).with(bad.join(" ")));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fails = 0;
    for _ in 0..cfg.pairs {
        let r = rng.gen_range(0..=4);
        let s = ranks_with_parity(&mut rng, 4, r);
        let t = ranks_with_parity(&mut rng, 4, s);
        let u = ranks_with_parity(&mut rng, 4, t);
        let c = random_brauer(&mut rng, r, s)?;
        let b = random_brauer(&mut rng, s, t)?;
        let a = random_brauer(&mut rng, t, u)?;
        if a.compose(&b.compose(&c)?)? != a.compose(&b)?.compose(&c)? {
            fails += 1;
        }
    }
    out.push(
        Check::new(1, "associativity", "A∘(B∘C) = (A∘B)∘C", fails == 0)
            .with(format!("{} triples, {fails} failures", cfg.pairs)),
    );
    out.push(Check::new(1, "cubic", "(H−1)(H+1)(H−(1−δ)) = 0", cubic_h().is_zero()));
    Ok(out)
}

fn four_term() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for r in [3, 4] {
        for (name, e) in four_term_checks(r)? {
            out.push(Check::new(2, name, "[H₁₂, H₁₃+H₂₃] = 0 = [H₁₂+H₁₃, H₂₃]", e.is_zero()));
        }
    }
    Ok(out)
}

fn family() -> Result<Vec<(String, Oracle<DensePole>)>> {
    standard_family()
}

fn polar_battery(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let fam = family()?;
    let mut eng = Engine::new(cfg.budget);
    let mut out = Vec::new();
    for (name, rel) in relation_battery(4)? {
        let nf = eng.normalize(&rel)?;
        let mut failing = Vec::new();
        for (fname, o) in &fam {
            let t = o.test_vectors(rel.src(), 120, 6, cfg.seed ^ rel.src() as u64);
            if !o.vanishes(&rel, &t)? {
                failing.push(fname.clone());
            }
        }
        let pass = nf.is_zero() && failing.is_empty();
        let detail = if pass {
            String::new()
        } else {
            format!("normal form zero: {}; failing reps: {}", nf.is_zero(), failing.join(", "))
        };
        out.push(Check::new(3, name.clone(), name, pass).with(detail));
    }
    Ok(out)
}

fn normal_form_soundness(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let fam = family()?;
    let mut eng = Engine::new(cfg.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let (mut agree_fail, mut idem_fail) = (Vec::new(), 0);
    for trial in 0..cfg.words {
        let src = rng.gen_range(0..=4);
        let len = rng.gen_range(1..=8);
        let w = random_polar_word(&mut rng, src, len, 4, true);
        let nf = eng.normalize(&w)?;
        let nf_elem = nf.to_elem()?;
        if eng.normalize(&nf_elem)? != nf {
            idem_fail += 1;
        }
        for (fname, o) in &fam {
            let t = o.test_vectors(src, 60, 4, trial as u64);
            if !o.agree(&w, &nf_elem, &t)? {
                agree_fail.push(format!("{w} on {fname}"));
            }
        }
    }
    Ok(vec![
        Check::new(4, "oracle equality", "F(W) = F(normalize(W))", agree_fail.is_empty())
            .with(format!("{} words; {}", cfg.words, agree_fail.join("; "))),
        Check::new(4, "idempotence", "normalize(normalize(W)) = normalize(W)", idem_fail == 0)
            .with(format!("{idem_fail} failures")),
    ])
}

fn ptl_ranks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        let expect = binomial(2 * n as u64, n as u64);
        let mut bad = Vec::new();
        for r in 0..=2 * n {
            let got = ptl_rank(r, 2 * n - r)? as u128;
            let spanned = projected_span_rank(r, 2 * n - r, &ratio(3, 7))? as u128;
            if got != expect || spanned != expect {
                bad.push(format!("r={r}: basis {got}, projected span {spanned}"));
            }
        }
        out.push(
            Check::new(5, format!("rank N={n}"), format!("rank Hom(r, 2N−r) = C(2N,N) = {expect}"), bad.is_empty())
                .with(bad.join(" ")),
        );
    }
    for n in 1..=2 {
        let (rank, len) = verma_image_rank(n, ratio(1, 2))?;
        out.push(
            Check::new(5, format!("Verma images N={n}"), "standard basis images independent at λ = 1/2", rank == len)
                .with(format!("rank {rank} of {len}")),
        );
    }
    Ok(out)
}

/// Graded flip `A ⊗ B → B ⊗ A`.
fn flip(pa: &[u8], pb: &[u8]) -> Mat {
    let (da, db) = (pa.len(), pb.len());
    let mut m = Mat::zeros(da * db, da * db);
    for a in 0..da {
        for b in 0..db {
            let s = if pa[a] & pb[b] == 1 { rat(-1) } else { rat(1) };
            m[(b * da + a, a * db + b)] = s;
        }
    }
    m
}

fn duality_checks(osp: &Osp, label: &str) -> Result<Vec<Check>> {
    let d = osp.space.dim();
    let (cap, cup) = cap_cup(&osp.space, &osp.g)?;
    let id = Mat::identity(d);
    let t = tau(&osp.space);
    let mut out = vec![
        Check::new(6, format!("τČ = Č {label}"), "τČ = Č, Ĉτ = Ĉ", &t * &cup == cup && &cap * &t == cap),
        Check::new(
            6,
            format!("straightening {label}"),
            "(id⊗Ĉ)(Č⊗id) = id = (Ĉ⊗id)(id⊗Č)",
            &id.kron(&cap) * &cup.kron(&id) == id && &cap.kron(&id) * &id.kron(&cup) == id,
        ),
        Check::new(
            6,
            format!("loop {label}"),
            "ĈČ = sdim(V)",
            (&cap * &cup).as_scalar() == Some(rat(osp.sdim())),
        ),
    ];
    let modules = [("V", Module::natural(osp)), ("ad", Module::adjoint(osp)?)];
    for (mname, m) in modules {
        let pl = osp.space.parities();
        let pm = &m.parity;
        let im = Mat::identity(m.dim());
        // (Ĉ⊗id_M)(id_V⊗τ_{MV}) = (id_M⊗Ĉ)(τ_{VM}⊗id_V)
        let lhs3 = &cap.kron(&im) * &id.kron(&flip(pm, pl));
        let rhs3 = &im.kron(&cap) * &flip(pl, pm).kron(&id);
        // (τ_{MV}⊗id_V)(id_M⊗Č) = (id_V⊗τ_{VM})(Č⊗id_M)
        let lhs4 = &flip(pm, pl).kron(&id) * &im.kron(&cup);
        let rhs4 = &id.kron(&flip(pl, pm)) * &cup.kron(&im);
        out.push(Check::new(
            6,
            format!("sliding M={mname} {label}"),
            "(Ĉ⊗id)(id⊗τ) = (id⊗Ĉ)(τ⊗id) and its dual",
            lhs3 == rhs3 && lhs4 == rhs4,
        ));
    }
    Ok(out)
}

fn osp_functor(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let spaces = [(3, 0), (5, 0), (0, 1), (0, 2), (2, 1)];
    let mut out = Vec::new();
    let mut osps = Vec::new();
    for (m, n) in spaces {
        let osp = Osp::build(m, n)?;
        let label = format!("({m}|{})", 2 * n);
        let nat = Module::natural(&osp);
        let h = osp.tempered(&nat, &nat);
        let (cap, cup) = cap_cup(&osp.space, &osp.g)?;
        let e = &cup * &cap;
        let t = tau(&osp.space);
        let d2 = h.rows;
        let one = Mat::identity(d2);
        let cubic = &(&(&h - &one) * &(&h + &one)) * &(&h - &one.scale(&rat(1 - osp.sdim())));
        out.push(Check::new(6, format!("ℋ = τ − e {label}"), "(μ⊗μ)(t) = τ − e", h == &t - &e));
        out.push(Check::new(6, format!("cubic {label}"), "(ℋ−1)(ℋ+1)(ℋ−(1−δ)) = 0", cubic.is_zero()));
        let chi = nat.casimir(&osp).as_scalar();
        out.push(
            Check::new(6, format!("χ_V(C) {label}"), "χ_V(C) = sdim(V) − 1", chi == Some(rat(osp.sdim() - 1)))
                .with(chi.map(|c| c.to_string()).unwrap_or_default()),
        );
        out.extend(duality_checks(&osp, &label)?);
        osps.push(osp);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(6));
    let mut fails = Vec::new();
    for k in 0..cfg.pairs {
        let osp = &osps[k % osps.len()];
        let r = rng.gen_range(0..=3);
        let s = ranks_with_parity(&mut rng, 3, r);
        let t = ranks_with_parity(&mut rng, 3, s);
        let a = random_brauer(&mut rng, r, s)?;
        let b = random_brauer(&mut rng, s, t)?;
        let lhs = brauer_matrix(osp, &b.compose(&a)?)?;
        let rhs = &brauer_matrix(osp, &b)? * &brauer_matrix(osp, &a)?;
        if lhs != rhs {
            fails.push(format!("pair {k}"));
        }
    }
    out.push(
        Check::new(6, "functoriality", "F(B∘A) = F(B)F(A)", fails.is_empty())
            .with(format!("{} pairs; {}", cfg.pairs, fails.join(" "))),
    );
    Ok(out)
}

fn sl2_identity() -> Result<Vec<Check>> {
    let grid = [ratio(1, 2), rat(1), ratio(5, 3), rat(3)];
    let (u, ci) = sl2_char_identity(&grid)?;
    let e = u.e_matrix();
    let c = u.casimir();
    // E² − 2E + C, computed directly
    let e2 = u.mat_mul(&e, &e);
    let mut direct = true;
    for i in 0..2 {
        for j in 0..2 {
            let mut x = e2.entries[i][j].sub(&e.entries[i][j].scale(&rat(2)));
            if i == j {
                x = x.add(&c);
            }
            direct &= x.is_zero();
        }
    }
    // both basis vectors of (0|2) are odd
    let str_e2 = e2.entries[0][0].add(&e2.entries[1][1]).scale(&rat(-1));
    Ok(vec![
        Check::new(7, "quadratic identity", "E² − 2E + C = 0", direct && ci.vanishes && ci.degree == 2)
            .with(format!("Q1 = {}, Q2 = {}", ci.q[0].display(u.labels()), ci.q[1].display(u.labels()))),
        Check::new(7, "supertrace", "str(E²) = 2C", str_e2 == c.scale(&rat(2))),
    ])
}

fn so3_identity() -> Result<Vec<Check>> {
    let (u, ci) = so3_char_identity(&[1, 2, 3, 4, 5])?;
    let mut out = vec![Check::new(8, "cubic identity", "E³ + Q₁E² + Q₂E + Q₃ = 0", ci.vanishes && ci.degree == 3)
        .with(ci.q.iter().map(|q| q.display(u.labels())).collect::<Vec<_>>().join(" | "))];
    out.push(Check::new(8, "central coefficients", "Q_i ∈ Z(U(so₃))", ci.q.iter().all(|q| u.is_central(q))));
    for j in 0..=2 {
        out.push(Check::new(
            8,
            format!("on L_{j}"),
            "identity holds on L_λ",
            so3_identity_on_module(&u, &ci, j)?,
        ));
    }
    Ok(out)
}

fn centre() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for m in [3, 4] {
        let u = Uea::new(LieData::so(m)?);
        let i2 = u.gelfand(2)?;
        out.push(Check::new(9, format!("I(2) central so{m}"), "I(2) ∈ Z(U(so_m))", u.is_central(&i2)));
    }
    let z3 = Frac::from(z_closure(3)?);
    for m in [3, 5] {
        let u = Uea::new(LieData::so(m)?);
        let pushed = u.push_forward(&z3)?;
        out.push(Check::new(
            9,
            format!("I(3) so{m}"),
            "I(3) = −F_U(z_closure(3))",
            u.gelfand(3)? == pushed.scale(&rat(-1)),
        ));
    }
    let u = Uea::new(LieData::so(5)?);
    let i2 = u.gelfand(2)?;
    let fam = [Pbw::one(), i2.clone(), u.mul(&i2, &i2), u.gelfand(4)?];
    let rank = u.rank(&fam);
    out.push(
        Check::new(9, "independence so5", "{1, I(2), I(2)², I(4)} independent", rank == 4)
            .with(format!("rank {rank}")),
    );
    Ok(out)
}

fn g2_suite() -> Result<Vec<Check>> {
    let rep = verify_g2_suite()?;
    let mut out: Vec<Check> = rep
        .relations
        .iter()
        .map(|r| {
            Check::new(10, r.name.clone(), r.name.clone(), r.holds).with(format!("rank {}", r.lhs_minus_rhs_rank))
        })
        .collect();
    out.push(
        Check::new(10, "normalizations", "χ_V(C) = 12, Υ̂Υ = 6I, contraction = 3Č(1)", true).with(format!(
            "s = {}, κ² = {}, c² = {}",
            rep.casimir_scale, rep.kappa_sq, rep.c3_sq
        )),
    );
    Ok(out)
}

fn sp2_tlb() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let lam = Frac::from(Poly::var(Var::Lambda));
    let d = PolarElem::gen(PolarGen::D { r: 1 })?;
    let id = PolarElem::identity(1);
    let shift = &(&Frac::int(-2) - &Frac::int(2)).scale(&ratio(1, 2)) - &lam;
    let q = d.add(&id.scale(&lam))?.compose(&d.add(&id.scale(&shift))?)?;
    let mut ptl = Ptl::with_delta(Frac::int(-2))?;
    let p = ptl.project(&q)?;
    out.push(Check::new(
        11,
        "type B quadratic",
        "(ℍ+λ)(ℍ+(δ−2)/2−λ) = 0 at δ = −2",
        tlb_specialize(&p, &rat(-2), &lam)?.is_zero(),
    ));
    let bad: Vec<usize> = (0..=6).filter(|&n| hom_dim_weightzero(n) != binomial(2 * n as u64, n as u64)).collect();
    out.push(Check::new(11, "weight-zero dimensions", "dim Hom(M, M⊗V^{⊗2N}) = C(2N,N), N ≤ 6", bad.is_empty()));
    for t in 1..=3 {
        let img = tlb_witness(t, ratio(1, 2))?;
        let expect = vec![(t, rat((-2i64).pow(t as u32)))];
        out.push(
            Check::new(
                11,
                format!("witness t={t}"),
                "(−2Y)^t m₊ ≠ 0",
                img == expect && img.iter().any(|(_, c)| !c.is_zero()),
            )
            .with(format!("{img:?}")),
        );
    }
    Ok(out)
}

fn coupon() -> Result<Vec<Check>> {
    let osp = Osp::build(3, 0)?;
    let rep = enhanced_coupon_check(&osp)?;
    Ok(vec![
        Check::new(12, "skew symmetry", "σΔ₃ = sgn(σ)Δ₃", rep.skew && rep.harmonic),
        Check::new(12, "Σ(3) = Δ₃Δ₃^*", "Σ(3) = Δ₃Δ₃^*", rep.relation_rank == 0)
            .with(format!("c² = {}", rep.c_sq)),
        Check::new(
            12,
            "δ = 3",
            "closures force δ = m",
            rep.forced_delta == vec![rat(3)] && rep.sdim == 3,
        )
        .with(rep.to_json().to_string()),
    ])
}

/// Normalize a word and report whether the normal form is stable.
pub fn normalize_is_idempotent(w: &PolarElem) -> Result<bool> {
    let nf = normalize(w)?;
    Ok(normalize(&nf.to_elem()?)? == nf)
}

