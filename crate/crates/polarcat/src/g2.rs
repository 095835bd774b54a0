//! G₂ inside `so₇`: the invariant 3-form, its annihilator, the maps Υ and Υ̂,
//! and the relations they satisfy on `V ⊗ V`.
//!
//! Υ is only defined up to a square root of a rational number, so it is
//! stored as a raw ε-contraction together with the square `κ²` of its
//! scale. Every relation below involves Υ an even number of times.

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalars::{rat, ratio, Rational};

const D: usize = 7;

/// Totally antisymmetric coefficients of `Č₃(1)` on `ℚ⁷`.
#[derive(Clone, Debug)]
pub struct Epsilon3 {
    /// Increasing 0-based triples with their sign.
    pub triples: Vec<([usize; 3], i64)>,
    table: Vec<i64>,
}

impl Epsilon3 {
    /// `e₁∧e₂∧e₃ − e₁∧(e₄∧e₅ + e₆∧e₇) − e₂∧(e₄∧e₆ − e₅∧e₇) − e₃∧(e₄∧e₇ + e₅∧e₆)`.
    pub fn standard() -> Self {
        let one_based = [
            ([1, 2, 3], 1),
            ([1, 4, 5], -1),
            ([1, 6, 7], -1),
            ([2, 4, 6], -1),
            ([2, 5, 7], 1),
            ([3, 4, 7], -1),
            ([3, 5, 6], -1),
        ];
        let triples: Vec<([usize; 3], i64)> =
            one_based.iter().map(|(t, s)| ([t[0] - 1, t[1] - 1, t[2] - 1], *s)).collect();
        let mut table = vec![0; D * D * D];
        for (t, s) in &triples {
            for (p, sg) in PERMS3 {
                table[t[p[0]] * D * D + t[p[1]] * D + t[p[2]]] = s * sg;
            }
        }
        Epsilon3 { triples, table }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> i64 {
        self.table[i * D * D + j * D + k]
    }

    /// Column vector in `V^{⊗3}`.
    pub fn vector(&self) -> Vec<Rational> {
        self.table.iter().map(|&x| rat(x)).collect()
    }
}

const PERMS3: [([usize; 3], i64); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];

/// The 14-dimensional annihilator of `Č₃(1)` with a normalized Casimir.
#[derive(Clone, Debug)]
pub struct G2Data {
    pub basis: Vec<Mat>,
    /// Trace form restricted to the basis.
    pub gram: Mat,
    /// Scale of the inverse trace form so that `χ_V(C) = 12`.
    pub s: Rational,
    /// `t = Σ tcoef[i][j] b_i ⊗ b_j`.
    pub tcoef: Mat,
}

fn so7_basis() -> Vec<Mat> {
    let mut out = Vec::new();
    for a in 0..D {
        for b in a + 1..D {
            let mut m = Mat::zeros(D, D);
            m[(a, b)] = rat(1);
            m[(b, a)] = rat(-1);
            out.push(m);
        }
    }
    out
}

/// `(A⊗1⊗1 + 1⊗A⊗1 + 1⊗1⊗A) v` on `V^{⊗3}`.
pub fn act3(a: &Mat, v: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); D * D * D];
    for i in 0..D {
        for j in 0..D {
            for k in 0..D {
                let mut s = Rational::zero();
                for p in 0..D {
                    s += &a[(i, p)] * &v[p * D * D + j * D + k];
                    s += &a[(j, p)] * &v[i * D * D + p * D + k];
                    s += &a[(k, p)] * &v[i * D * D + j * D + p];
                }
                out[i * D * D + j * D + k] = s;
            }
        }
    }
    out
}

pub fn g2_subalgebra() -> Result<G2Data> {
    let eps = Epsilon3::standard().vector();
    let so7 = so7_basis();
    let cols: Vec<Vec<Rational>> = so7.iter().map(|l| act3(l, &eps)).collect();
    let m = Mat::from_fn(D * D * D, so7.len(), |i, j| cols[j][i].clone());
    let basis: Vec<Mat> = m
        .nullspace()
        .iter()
        .map(|c| {
            c.iter()
                .zip(&so7)
                .filter(|(x, _)| !x.is_zero())
                .fold(Mat::zeros(D, D), |acc, (x, l)| &acc + &l.scale(x))
        })
        .collect();
    let n = basis.len();
    let gram = Mat::from_fn(n, n, |i, j| (&basis[i] * &basis[j]).trace());
    let k = gram.inverse().ok_or(Error::SingularForm)?;
    let raw = casimir_of(&basis, &k);
    let c0 = raw
        .as_scalar()
        .ok_or_else(|| Error::SolveUnderdetermined("Casimir is not scalar on V".into()))?;
    if c0.is_zero() {
        return Err(Error::SingularForm);
    }
    let s = &rat(12) / &c0;
    let tcoef = k.scale(&s);
    Ok(G2Data { basis, gram, s, tcoef })
}

fn casimir_of(basis: &[Mat], coef: &Mat) -> Mat {
    let mut c = Mat::zeros(D, D);
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if !coef[(i, j)].is_zero() {
                c = &c + &(&basis[i] * &basis[j]).scale(&coef[(i, j)]);
            }
        }
    }
    c
}

impl G2Data {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn casimir_v(&self) -> Mat {
        casimir_of(&self.basis, &self.tcoef)
    }

    /// `ℋ = (μ⊗μ)(t)`.
    pub fn tempered(&self) -> Mat {
        let mut h = Mat::zeros(D * D, D * D);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if !self.tcoef[(i, j)].is_zero() {
                    h = &h + &self.basis[i].kron(&self.basis[j]).scale(&self.tcoef[(i, j)]);
                }
            }
        }
        h
    }

    /// `Δ(C) = C⊗1 + 1⊗C + 2ℋ` on `V⊗V`.
    pub fn casimir_vv(&self) -> Mat {
        let c = self.casimir_v();
        let id = Mat::identity(D);
        &(&c.kron(&id) + &id.kron(&c)) + &self.tempered().scale(&rat(2))
    }

    /// Action of a basis element on `V⊗V`.
    pub fn action_vv(&self, i: usize) -> Mat {
        let id = Mat::identity(D);
        &self.basis[i].kron(&id) + &id.kron(&self.basis[i])
    }

    /// Every basis element kills `Č₃(1)`.
    pub fn annihilates_epsilon(&self) -> bool {
        let eps = Epsilon3::standard().vector();
        self.basis.iter().all(|b| act3(b, &eps).iter().all(|x| x.is_zero()))
    }
}

/// Υ = κ·Υ₀ and Υ̂ = κ·Υ̂₀ with `Υ₀(e_l) = Σ ε_ijl e_i⊗e_j` and
/// `Υ̂₀ = (I⊗∩)(Υ₀⊗I)`.
#[derive(Clone, Debug)]
pub struct Upsilon {
    pub raw: Mat,
    pub raw_hat: Mat,
    /// `κ²`, fixed by `Υ̂Υ = 6I`.
    pub kappa_sq: Rational,
}

pub fn upsilon() -> Result<Upsilon> {
    let eps = Epsilon3::standard();
    let raw = Mat::from_fn(D * D, D, |ij, l| rat(eps.get(ij / D, ij % D, l)));
    // (I⊗∩)(Υ₀⊗I): e_l⊗e_m ↦ Σ_i ε_{i m l} e_i
    let raw_hat = Mat::from_fn(D, D * D, |i, lm| rat(eps.get(i, lm % D, lm / D)));
    let hu = &raw_hat * &raw;
    let c = hu
        .as_scalar()
        .ok_or_else(|| Error::SolveUnderdetermined("Υ̂Υ is not scalar".into()))?;
    if c.is_zero() {
        return Err(Error::SingularForm);
    }
    Ok(Upsilon { raw, raw_hat, kappa_sq: &rat(6) / &c })
}

impl Upsilon {
    /// `Υ̂Υ`.
    pub fn hat_up(&self) -> Mat {
        (&self.raw_hat * &self.raw).scale(&self.kappa_sq)
    }

    /// `𝒦 = ΥΥ̂`.
    pub fn k(&self) -> Mat {
        (&self.raw * &self.raw_hat).scale(&self.kappa_sq)
    }
}

/// `c²` such that contracting `c·ε ⊗ c·ε` along the middle gives `3Č(1)`,
/// together with the raw contraction (`c = 1`).
pub fn norm_contraction() -> Result<(Rational, Mat)> {
    let eps = Epsilon3::standard();
    // (id⊗ω⊗id)(id⊗id⊗ω⊗id⊗id)(ε⊗ε)
    let mut out = Mat::zeros(D * D, 1);
    for a in 0..D {
        for d in 0..D {
            let mut s = 0i64;
            for b in 0..D {
                for k in 0..D {
                    s += eps.get(a, b, k) * eps.get(k, b, d);
                }
            }
            out[(a * D + d, 0)] = rat(s);
        }
    }
    let cup = cup_vec();
    let ratio = &out[(0, 0)] / &cup[(0, 0)];
    if out.scale(&Rational::one()) != cup.scale(&ratio) || ratio.is_zero() {
        return Err(Error::SolveUnderdetermined("contraction is not a multiple of Č(1)".into()));
    }
    Ok((&rat(3) / &ratio, out))
}

fn cup_vec() -> Mat {
    Mat::from_fn(D * D, 1, |i, _| if i / D == i % D { rat(1) } else { rat(0) })
}

fn flip() -> Mat {
    Mat::from_fn(D * D, D * D, |r, c| if r == (c % D) * D + c / D { rat(1) } else { rat(0) })
}

fn e_op() -> Mat {
    let cup = cup_vec();
    &cup * &cup.transpose()
}

/// Partial transpose on the second tensor factor,
/// `(id⊗∨)(A⊗B) = A⊗Bᵀ`.
pub fn vee_second(a: &Mat) -> Mat {
    Mat::from_fn(D * D, D * D, |r, c| {
        let (p, q) = (r / D, r % D);
        let (x, y) = (c / D, c % D);
        a[(p * D + y, x * D + q)].clone()
    })
}

/// `(I⊗∩⊗I)(A⊗X)(I⊗∪⊗I)` evaluated strand by strand.
pub fn rotate_with_crossing(a: &Mat) -> Mat {
    let mut out = Mat::zeros(D * D, D * D);
    for x in 0..D {
        for y in 0..D {
            let col = x * D + y;
            // I⊗∪⊗I: e_x⊗e_y ↦ Σ_c e_x⊗e_c⊗e_c⊗e_y
            for c in 0..D {
                // A⊗X: e_x⊗e_c⊗e_c⊗e_y ↦ A(e_x⊗e_c) ⊗ e_y⊗e_c
                for r in 0..D * D {
                    let v = &a[(r, x * D + c)];
                    if v.is_zero() {
                        continue;
                    }
                    let (p, q) = (r / D, r % D);
                    // I⊗∩⊗I pairs q with y
                    if q == y {
                        let cur = &out[(p * D + c, col)] + v;
                        out[(p * D + c, col)] = cur;
                    }
                }
            }
        }
    }
    out
}

/// Right partial closure `(I⊗∩)(A⊗I)(I⊗∪)` of an operator on `V⊗V`.
pub fn partial_closure(a: &Mat) -> Mat {
    Mat::from_fn(D, D, |p, x| (0..D).map(|c| a[(p * D + c, x * D + c)].clone()).sum())
}

/// One checked relation: `lhs − rhs` and its rank.
#[derive(Clone, Debug, Serialize)]
pub struct G2Relation {
    pub name: String,
    pub holds: bool,
    pub lhs_minus_rhs_rank: usize,
}

fn rel(name: &str, diff: &Mat) -> G2Relation {
    let rank = diff.rank();
    G2Relation { name: name.to_string(), holds: rank == 0, lhs_minus_rhs_rank: rank }
}

fn flag(name: &str, ok: bool) -> G2Relation {
    G2Relation { name: name.to_string(), holds: ok, lhs_minus_rhs_rank: usize::from(!ok) }
}

fn nullity(a: &Mat) -> usize {
    a.cols - a.rank()
}

/// Spectrum check: the product of `(A − λ)` vanishes and each eigenspace
/// has the expected dimension.
fn spectrum(name: &str, a: &Mat, eig: &[(i64, usize)]) -> G2Relation {
    let n = a.rows;
    let shifted: Vec<Mat> = eig.iter().map(|(l, _)| a - &Mat::scalar(n, rat(*l))).collect();
    let prod = shifted.iter().skip(1).fold(shifted[0].clone(), |acc, m| &acc * m);
    let mults_ok = shifted.iter().zip(eig).all(|(m, (_, k))| nullity(m) == *k);
    let rank = prod.rank();
    G2Relation { name: name.to_string(), holds: rank == 0 && mults_ok, lhs_minus_rhs_rank: rank }
}

/// Summary scalars of a G₂ run.
#[derive(Clone, Debug)]
pub struct G2Report {
    pub relations: Vec<G2Relation>,
    pub casimir_scale: Rational,
    pub kappa_sq: Rational,
    pub c3_sq: Rational,
    pub forced_delta: Rational,
}

impl G2Report {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    /// `name → {"holds", "lhs_minus_rhs_rank"}`.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for r in &self.relations {
            m.insert(r.name.clone(), json!({"holds": r.holds, "lhs_minus_rhs_rank": r.lhs_minus_rhs_rank}));
        }
        Value::Object(m)
    }
}

pub fn verify_g2_suite() -> Result<G2Report> {
    let g = g2_subalgebra()?;
    let up = upsilon()?;
    let (c3_sq, raw_norm) = norm_contraction()?;
    let n2 = D * D;
    let one = Mat::identity(n2);
    let tau = flip();
    let e = e_op();
    let h = g.tempered();
    let k = up.k();
    let p = k.scale(&ratio(1, 6));
    let mut rels = Vec::new();

    rels.push(flag("dim G2 = 14", g.dim() == 14 && g.annihilates_epsilon()));
    rels.push(rel("χ_V(C) = 12", &(&g.casimir_v() - &Mat::scalar(D, rat(12)))));
    rels.push(spectrum("Casimir spectrum on V⊗V = {0,12,24,28}", &g.casimir_vv(), &[(0, 1), (12, 7), (24, 14), (28, 27)]));
    rels.push(spectrum("tempered spectrum on V⊗V = {−12,−6,0,2}", &h, &[(-12, 1), (-6, 7), (0, 14), (2, 27)]));
    let quartic = &(&(&h * &(&h - &Mat::scalar(n2, rat(2)))) * &(&h + &Mat::scalar(n2, rat(6))))
        * &(&h + &Mat::scalar(n2, rat(12)));
    rels.push(rel("ℋ(ℋ−2)(ℋ+6)(ℋ+12) = 0", &quartic));
    rels.push(rel("Υ̂Υ = 6I", &(&up.hat_up() - &Mat::scalar(D, rat(6)))));
    rels.push(rel("(ΥΥ̂)² = 6ΥΥ̂", &(&(&k * &k) - &k.scale(&rat(6)))));
    rels.push(rel("contraction of Č₃⊗Č₃ = 3Č(1)", &(&raw_norm.scale(&c3_sq) - &cup_vec().scale(&rat(3)))));
    rels.push(flag("ω̌₃ = √2·Č₃ (κ² = 2c²)", up.kappa_sq == &c3_sq * &rat(2)));
    let spectral = &(&(&one + &tau) - &e.scale(&rat(2))) - &k;
    rels.push(rel("ℋ = 1 + τ − 2e − ΥΥ̂", &(&h - &spectral)));
    rels.push(rel("P² = P", &(&(&p * &p) - &p)));
    rels.push(rel("τP = −P", &(&(&tau * &p) + &p)));
    rels.push(rel("eP = 0", &(&e * &p)));
    let eq_h = (0..g.dim()).map(|i| {
        let a = g.action_vv(i);
        &(&a * &h) - &(&h * &a)
    });
    rels.push(flag("ℋ is G2-equivariant", eq_h.into_iter().all(|m| m.is_zero())));
    let eq_u = (0..g.dim()).all(|i| (&g.action_vv(i) * &up.raw) == (&up.raw * &g.basis[i]));
    rels.push(flag("Υ is G2-equivariant", eq_u));
    rels.push(rel("(id⊗∨)ℋ = −ℋ", &(&vee_second(&h) + &h)));
    let pv = vee_second(&p);
    let lemma = &(&(&pv.scale(&rat(6)) + &p.scale(&rat(6))) - &Mat::scalar(n2, rat(2))) + &(&e + &tau);
    rels.push(rel("6(id⊗∨)P + 6P − 2 + e + τ = 0", &lemma));
    let lemma_tau = &(&(&(&tau * &pv).scale(&rat(6)) - &p.scale(&rat(6))) - &tau.scale(&rat(2))) + &(&e + &one);
    rels.push(rel("6τ(id⊗∨)P − 6P = 2τ − e − 1", &lemma_tau));
    let kt = rotate_with_crossing(&k);
    rels.push(rel("𝒦ᵀ = (id⊗∨)𝒦", &(&kt - &vee_second(&k))));
    let reduction = &(&(&(&tau + &e) - &one.scale(&rat(2))) + &k) + &kt;
    rels.push(rel("X + E − 2I + 𝒦 + 𝒦ᵀ = 0", &reduction));
    rels.push(rel("𝒦Υ = 6Υ", &(&(&k * &up.raw) - &up.raw.scale(&rat(6)))));

    // Partial closure of the reduction relation, with the loop left as δ.
    let scalar_of = |m: &Mat| partial_closure(m).as_scalar();
    let (cx, ce, ck, ckt) = (scalar_of(&tau), scalar_of(&e), scalar_of(&k), scalar_of(&kt));
    let forced_delta = match (cx, ce, ck, ckt) {
        (Some(a), Some(b), Some(c), Some(d)) => (a + b + c + d) / rat(2),
        _ => return Err(Error::SolveUnderdetermined("partial closures are not scalar".into())),
    };
    let loop_value = (&cup_vec().transpose() * &cup_vec()).as_scalar().unwrap_or_default();
    rels.push(flag("ĈČ = 7", loop_value == rat(7)));
    rels.push(flag("reduction forces δ = 7", forced_delta == rat(7)));

    Ok(G2Report { relations: rels, casimir_scale: g.s, kappa_sq: up.kappa_sq, c3_sq, forced_delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_support() {
        let e = Epsilon3::standard();
        let nonzero = e.vector().iter().filter(|x| !x.is_zero()).count();
        assert_eq!(nonzero, 42);
        assert_eq!(e.get(0, 1, 2), 1);
        assert_eq!(e.get(1, 0, 2), -1);
    }

    #[test]
    fn partial_transpose_of_flip_is_e() {
        assert_eq!(vee_second(&flip()), e_op());
        assert_eq!(vee_second(&e_op()), flip());
    }
}
