//! Enveloping algebras of ordinary Lie algebras in PBW form, central
//! elements and characteristic identities.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalars::{fmt_rational, rat, Frac, Rational, Var};
use crate::superlin::{cap_cup, default_form, gkron, str_, tau, GradedSpace};

/// Lie algebra given by a matrix realization on a graded space `V`.
#[derive(Clone, Debug)]
pub struct LieData {
    pub labels: Vec<String>,
    pub mats: Vec<Mat>,
    pub space: GradedSpace,
    /// `[b_i, b_j] = Σ_k c[i][j][k] b_k`.
    pub c: Vec<Vec<Vec<Rational>>>,
    /// `t = Σ tcoef[i][j] b_i ⊗ b_j`, normalized so that `(μ⊗μ)(t) = τ − e`.
    pub tcoef: Mat,
}

fn span_coords(mats: &[Mat], x: &Mat) -> Option<Vec<Rational>> {
    let d2 = x.rows * x.cols;
    let a = Mat::from_fn(d2, mats.len(), |p, j| mats[j].entries()[p].clone());
    a.solve(x.entries())
}

impl LieData {
    pub fn from_matrices(labels: &[&str], mats: Vec<Mat>, space: GradedSpace) -> Result<LieData> {
        let n = mats.len();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let br = &(&mats[i] * &mats[j]) - &(&mats[j] * &mats[i]);
                c[i][j] = span_coords(&mats, &br)
                    .ok_or_else(|| Error::SolveUnderdetermined("matrices do not close under the bracket".into()))?;
            }
        }
        let gram = Mat::from_fn(n, n, |i, j| str_(&(&mats[i] * &mats[j]), &space));
        let k = gram.inverse().ok_or(Error::SingularForm)?;
        let d = space.dim();
        let mut raw = Mat::zeros(d * d, d * d);
        for i in 0..n {
            for j in 0..n {
                if !k[(i, j)].is_zero() {
                    raw = &raw + &gkron(&mats[i], space.parities(), &mats[j], 0).scale(&k[(i, j)]);
                }
            }
        }
        let g = default_form(&space);
        let (cap, cup) = cap_cup(&space, &g)?;
        let target = &tau(&space) - &(&cup * &cap);
        let p = (0..raw.entries().len()).find(|&p| !raw.entries()[p].is_zero()).ok_or(Error::SingularForm)?;
        let kappa = &target.entries()[p] / &raw.entries()[p];
        if raw.scale(&kappa) != target {
            return Err(Error::SolveUnderdetermined("tempered Casimir is not τ − e".into()));
        }
        let lie = LieData {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            mats,
            space,
            c,
            tcoef: k.scale(&kappa),
        };
        lie.check_jacobi()?;
        Ok(lie)
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if self.c[i][j].iter().zip(&self.c[j][i]).any(|(a, b)| !(a + b).is_zero()) {
                    return Err(Error::SolveUnderdetermined("structure constants not antisymmetric".into()));
                }
                for k in 0..n {
                    for m in 0..n {
                        let mut s = Rational::zero();
                        for l in 0..n {
                            s += &self.c[j][k][l] * &self.c[i][l][m];
                            s += &self.c[k][i][l] * &self.c[j][l][m];
                            s += &self.c[i][j][l] * &self.c[k][l][m];
                        }
                        if !s.is_zero() {
                            return Err(Error::SolveUnderdetermined("Jacobi identity fails".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `sl₂ = sp₂` on `V = (0|2)` with basis `Y, X, T` in PBW order.
    pub fn sl2() -> Result<LieData> {
        let y = Mat::from_i64(2, 2, &[0, 0, 1, 0]);
        let x = Mat::from_i64(2, 2, &[0, 1, 0, 0]);
        let t = Mat::from_i64(2, 2, &[1, 0, 0, -1]);
        LieData::from_matrices(&["Y", "X", "T"], vec![y, x, t], GradedSpace::new(0, 1))
    }

    /// `so_m` on `V = (m|0)` with basis `L_ab = E_ab − E_ba`, `a < b`.
    pub fn so(m: usize) -> Result<LieData> {
        let mut labels = Vec::new();
        let mut mats = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                labels.push(format!("L{}{}", a + 1, b + 1));
                let mut x = Mat::zeros(m, m);
                x[(a, b)] = rat(1);
                x[(b, a)] = rat(-1);
                mats.push(x);
            }
        }
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        LieData::from_matrices(&refs, mats, GradedSpace::new(m, 0))
    }

    /// Index and sign of `X_ab` for `so_m` data (`X_ba = −X_ab`).
    pub fn so_index(&self, a: usize, b: usize) -> Option<(usize, Rational)> {
        if a == b {
            return None;
        }
        let (lo, hi, s) = if a < b { (a, b, rat(1)) } else { (b, a, rat(-1)) };
        let name = format!("L{}{}", lo + 1, hi + 1);
        self.labels.iter().position(|l| *l == name).map(|i| (i, s))
    }
}

/// Monomial: nondecreasing list of basis indices.
pub type Mono = Vec<usize>;

/// Element of `U(𝔤)` in the PBW basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Pbw {
    terms: BTreeMap<Mono, Rational>,
}

impl Pbw {
    pub fn zero() -> Self {
        Pbw::default()
    }

    pub fn scalar(c: Rational) -> Self {
        let mut p = Pbw::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Pbw::scalar(Rational::one())
    }

    pub fn gen(i: usize) -> Self {
        let mut p = Pbw::zero();
        p.add_term(vec![i], Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[usize]) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Pbw) -> Pbw {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Pbw) -> Pbw {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Pbw {
        let mut out = Pbw::zero();
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn display(&self, labels: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut word = Vec::new();
            let mut k = 0;
            while k < m.len() {
                let mut e = 1;
                while k + e < m.len() && m[k + e] == m[k] {
                    e += 1;
                }
                let l = &labels[m[k]];
                word.push(if e == 1 { l.clone() } else { format!("{l}^{e}") });
                k += e;
            }
            let w = word.join("*");
            parts.push(match (w.is_empty(), c.is_one()) {
                (true, _) => fmt_rational(c),
                (false, true) => w,
                (false, false) => format!("{}*{w}", fmt_rational(c)),
            });
        }
        parts.join(" + ")
    }

    pub fn to_json(&self, labels: &[String]) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!({"monomial": m.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>(), "coeff": fmt_rational(c)}))
            .collect();
        json!({"terms": terms})
    }
}

/// Enveloping algebra with a straightening cache.
pub struct Uea {
    pub lie: LieData,
    cache: RefCell<HashMap<(Mono, usize), Pbw>>,
}

impl Uea {
    pub fn new(lie: LieData) -> Uea {
        Uea { lie, cache: RefCell::new(HashMap::new()) }
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.lie.labels
    }

    /// `m · x_g` in PBW form.
    fn mul_mono_gen(&self, m: &[usize], g: usize) -> Pbw {
        match m.last() {
            None => return Pbw::gen(g),
            Some(&h) if h <= g => {
                let mut w = m.to_vec();
                w.push(g);
                let mut p = Pbw::zero();
                p.add_term(w, Rational::one());
                return p;
            }
            _ => {}
        }
        let key = (m.to_vec(), g);
        if let Some(p) = self.cache.borrow().get(&key) {
            return p.clone();
        }
        let h = *m.last().unwrap();
        let head = &m[..m.len() - 1];
        // head x_h x_g = (head x_g) x_h + head [x_h, x_g]
        let mut out = Pbw::zero();
        for (mm, c) in self.mul_mono_gen(head, g).terms {
            for (m2, c2) in self.mul_mono_gen(&mm, h).terms {
                out.add_term(m2, &c * &c2);
            }
        }
        for (k, ck) in self.lie.c[h][g].iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            for (m2, c2) in self.mul_mono_gen(head, k).terms {
                out.add_term(m2, ck * &c2);
            }
        }
        self.cache.borrow_mut().insert(key, out.clone());
        out
    }

    pub fn mul(&self, a: &Pbw, b: &Pbw) -> Pbw {
        let mut out = Pbw::zero();
        for (mb, cb) in &b.terms {
            let mut cur = a.scale(cb);
            for &g in mb {
                let mut next = Pbw::zero();
                for (m, c) in &cur.terms {
                    for (m2, c2) in self.mul_mono_gen(m, g).terms {
                        next.add_term(m2, c * &c2);
                    }
                }
                cur = next;
            }
            out = out.add(&cur);
        }
        out
    }

    pub fn pow(&self, a: &Pbw, e: u32) -> Pbw {
        (0..e).fold(Pbw::one(), |acc, _| self.mul(&acc, a))
    }

    pub fn bracket(&self, a: &Pbw, b: &Pbw) -> Pbw {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    pub fn is_central(&self, a: &Pbw) -> bool {
        (0..self.dim()).all(|i| self.bracket(a, &Pbw::gen(i)).is_zero())
    }

    /// `C = Σ t_ij b_i b_j`.
    pub fn casimir(&self) -> Pbw {
        let t = &self.lie.tcoef;
        let mut out = Pbw::zero();
        for i in 0..t.rows {
            for j in 0..t.cols {
                if !t[(i, j)].is_zero() {
                    out = out.add(&self.mul(&Pbw::gen(i), &Pbw::gen(j)).scale(&t[(i, j)]));
                }
            }
        }
        out
    }

    /// `E = (id ⊗ μ)(t)` as a matrix over `U(𝔤)`.
    pub fn e_matrix(&self) -> UeaMatrix {
        let d = self.lie.space.dim();
        let t = &self.lie.tcoef;
        let mut e = UeaMatrix::zeros(d);
        for i in 0..t.rows {
            for j in 0..t.cols {
                if t[(i, j)].is_zero() {
                    continue;
                }
                let mj = &self.lie.mats[j];
                for k in 0..d {
                    for l in 0..d {
                        if !mj[(k, l)].is_zero() {
                            let c = &t[(i, j)] * &mj[(k, l)];
                            e.entries[k][l].add_term(vec![i], c);
                        }
                    }
                }
            }
        }
        e
    }

    /// Gelfand invariant `I(r) = Σ X_{i₁i₂} X_{i₂i₃} ⋯ X_{i_r i₁}` for `so_m`.
    pub fn gelfand(&self, r: usize) -> Result<Pbw> {
        let m = self.lie.space.dim();
        if r == 0 {
            return Ok(Pbw::scalar(rat(m as i64)));
        }
        // X as a matrix over U, then the trace of its r-th power
        let mut x = UeaMatrix::zeros(m);
        for a in 0..m {
            for b in 0..m {
                if let Some((i, s)) = self.lie.so_index(a, b) {
                    x.entries[a][b] = Pbw::gen(i).scale(&s);
                } else if a != b {
                    return Err(Error::UnsupportedParameter("Gelfand invariants need so_m data".into()));
                }
            }
        }
        Ok(self.mat_pow(&x, r as u32).trace())
    }

    pub fn mat_mul(&self, a: &UeaMatrix, b: &UeaMatrix) -> UeaMatrix {
        let d = a.dim();
        let mut out = UeaMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                if a.entries[i][k].is_zero() {
                    continue;
                }
                for j in 0..d {
                    if !b.entries[k][j].is_zero() {
                        let p = self.mul(&a.entries[i][k], &b.entries[k][j]);
                        out.entries[i][j] = out.entries[i][j].add(&p);
                    }
                }
            }
        }
        out
    }

    pub fn mat_pow(&self, a: &UeaMatrix, e: u32) -> UeaMatrix {
        (0..e).fold(UeaMatrix::identity(a.dim()), |acc, _| self.mat_mul(&acc, a))
    }

    /// `str(E^ℓ)`, the image of `Z_ℓ`.
    pub fn z_image(&self, l: u32) -> Pbw {
        let p = self.mat_pow(&self.e_matrix(), l);
        let mut out = Pbw::zero();
        for i in 0..p.dim() {
            let s = if self.lie.space.parity(i) == 0 { rat(1) } else { rat(-1) };
            out = out.add(&p.entries[i][i].scale(&s));
        }
        out
    }

    /// Evaluate a polynomial in `δ` and the `z_k` with `δ ↦ sdim` and
    /// `z_k ↦ str(E^k)`.
    pub fn push_forward(&self, p: &Frac) -> Result<Pbw> {
        let den = p.den().as_constant().ok_or_else(|| Error::SpecializationMissing("denominator".into()))?;
        let mut out = Pbw::zero();
        for (m, c) in p.num().terms() {
            let mut term = Pbw::scalar(c / &den);
            for v in p.num().vars() {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                let base = match v {
                    Var::Delta => Pbw::scalar(rat(self.lie.space.sdim())),
                    Var::Z(k) => self.z_image(k),
                    Var::Lambda => return Err(Error::SpecializationMissing("lambda".into())),
                };
                term = self.mul(&term, &self.pow(&base, e));
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Image of a PBW element under a representation.
    pub fn eval(&self, a: &Pbw, rep: &[Mat]) -> Mat {
        let n = rep[0].rows;
        let mut out = Mat::zeros(n, n);
        for (m, c) in &a.terms {
            let mut p = Mat::identity(n);
            for &i in m {
                p = &p * &rep[i];
            }
            out = &out + &p.scale(c);
        }
        out
    }

    /// `(μ_M ⊗ μ_V)(t)` for a representation `rep` of even parity.
    pub fn tempered_on(&self, rep: &[Mat]) -> Mat {
        let t = &self.lie.tcoef;
        let par = vec![0u8; rep[0].rows];
        let n = rep[0].rows * self.lie.space.dim();
        let mut out = Mat::zeros(n, n);
        for i in 0..t.rows {
            for j in 0..t.cols {
                if !t[(i, j)].is_zero() {
                    out = &out + &gkron(&rep[i], &par, &self.lie.mats[j], 0).scale(&t[(i, j)]);
                }
            }
        }
        out
    }

    /// Rank of a family of PBW elements over ℚ.
    pub fn rank(&self, elems: &[Pbw]) -> usize {
        let mut keys: Vec<&Mono> = elems.iter().flat_map(|e| e.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        let rows: Vec<Vec<Rational>> = elems.iter().map(|e| keys.iter().map(|k| e.coeff(k)).collect()).collect();
        crate::linalg::rank_of(&rows)
    }
}

/// Square matrix over `U(𝔤)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UeaMatrix {
    pub entries: Vec<Vec<Pbw>>,
}

impl UeaMatrix {
    pub fn zeros(d: usize) -> Self {
        UeaMatrix { entries: vec![vec![Pbw::zero(); d]; d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = UeaMatrix::zeros(d);
        for i in 0..d {
            m.entries[i][i] = Pbw::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Pbw::is_zero)
    }

    pub fn trace(&self) -> Pbw {
        (0..self.dim()).fold(Pbw::zero(), |acc, i| acc.add(&self.entries[i][i]))
    }

    pub fn add(&self, o: &UeaMatrix) -> UeaMatrix {
        let mut out = self.clone();
        for (r, ro) in out.entries.iter_mut().zip(&o.entries) {
            for (x, y) in r.iter_mut().zip(ro) {
                *x = x.add(y);
            }
        }
        out
    }

    /// Multiply every entry on the left by a central element.
    pub fn left_scale(&self, u: &Uea, c: &Pbw) -> UeaMatrix {
        UeaMatrix { entries: self.entries.iter().map(|r| r.iter().map(|x| u.mul(c, x)).collect()).collect() }
    }

    pub fn display(&self, labels: &[String]) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.display(labels)).collect()).collect()
    }
}

/// Harmonic polynomials of degree `j` in `m` variables with the `so_m` action.
pub fn harmonic_module(lie: &LieData, j: usize) -> Result<Vec<Mat>> {
    let m = lie.space.dim();
    let monos = |deg: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|e: Vec<usize>| {
                    let used: usize = e.iter().sum();
                    (0..=deg - used).map(move |k| {
                        let mut e2 = e.clone();
                        e2.push(k);
                        e2
                    })
                })
                .collect();
        }
        out.into_iter().filter(|e| e.iter().sum::<usize>() == deg).collect()
    };
    let pj = monos(j);
    let idx: HashMap<Vec<usize>, usize> = pj.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    // harmonic subspace: kernel of the Laplacian
    let basis: Vec<Vec<Rational>> = if j < 2 {
        (0..pj.len()).map(|i| (0..pj.len()).map(|k| rat((i == k) as i64)).collect()).collect()
    } else {
        let low = monos(j - 2);
        let lidx: HashMap<Vec<usize>, usize> = low.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut lap = Mat::zeros(low.len(), pj.len());
        for (c, e) in pj.iter().enumerate() {
            for v in 0..m {
                if e[v] >= 2 {
                    let mut e2 = e.clone();
                    e2[v] -= 2;
                    lap[(lidx[&e2], c)] += rat((e[v] * (e[v] - 1)) as i64);
                }
            }
        }
        lap.nullspace()
    };
    let hb = Mat::from_fn(pj.len(), basis.len(), |i, k| basis[k][i].clone());
    let mut out = Vec::new();
    for x in &lie.mats {
        // derivation extending x on linear forms: x_c ↦ Σ_a x[a][c] x_a
        let mut act = Mat::zeros(pj.len(), pj.len());
        for (c, e) in pj.iter().enumerate() {
            for v in 0..m {
                if e[v] == 0 {
                    continue;
                }
                for a in 0..m {
                    if x[(a, v)].is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[v] -= 1;
                    e2[a] += 1;
                    act[(idx[&e2], c)] += &x[(a, v)] * rat(e[v] as i64);
                }
            }
        }
        let img = &act * &hb;
        let mut rep = Mat::zeros(basis.len(), basis.len());
        for col in 0..basis.len() {
            let v: Vec<Rational> = (0..img.rows).map(|i| img[(i, col)].clone()).collect();
            let coords = hb.solve(&v).ok_or_else(|| Error::SolveUnderdetermined("harmonic space not invariant".into()))?;
            for (i, c) in coords.into_iter().enumerate() {
                rep[(i, col)] = c;
            }
        }
        out.push(rep);
    }
    Ok(out)
}

/// Dense `sl₂` Verma module `M_λ` truncated to `m_0 … m_n` in the basis
/// order `Y, X, T`.
pub fn sl2_verma(lambda: &Rational, n: usize) -> Vec<Mat> {
    let mut y = Mat::zeros(n + 1, n + 1);
    let mut x = Mat::zeros(n + 1, n + 1);
    let mut t = Mat::zeros(n + 1, n + 1);
    for k in 0..=n {
        let kk = rat(k as i64);
        t[(k, k)] = lambda - rat(2 * k as i64);
        if k < n {
            y[(k + 1, k)] = rat(1);
        }
        if k > 0 {
            x[(k - 1, k)] = &kk * (lambda - &kk + rat(1));
        }
    }
    vec![y, x, t]
}

/// Coefficients `q_1 … q_d` of the monic relation `A^d + q_1 A^{d−1} + … + q_d = 0`,
/// if unique.
pub fn monic_relation(a: &Mat, d: usize) -> Result<Vec<Rational>> {
    let pows: Vec<Mat> = (0..=d).map(|k| a.pow(k as u32)).collect();
    let n = a.entries().len();
    let sys = Mat::from_fn(n, d, |p, i| pows[d - 1 - i].entries()[p].clone());
    let rhs: Vec<Rational> = pows[d].entries().iter().map(|x| -x).collect();
    if sys.rank() < d {
        return Err(Error::SolveUnderdetermined(format!("degree {d} relation not unique")));
    }
    sys.solve(&rhs).ok_or_else(|| Error::SolveUnderdetermined("no monic relation".into()))
}

/// Report of a characteristic-identity construction.
#[derive(Clone, Debug)]
pub struct CharIdentity {
    pub degree: usize,
    /// `Q_i = Σ_k coeffs[i][k] C^k`.
    pub coeffs: Vec<Vec<Rational>>,
    pub q: Vec<Pbw>,
    pub vanishes: bool,
}

/// Express each `P_i` sampled on a grid as a polynomial in the Casimir value
/// and check `E^d + Σ Q_i E^{d−i} = 0` in `Mat_d(U)`.
pub fn char_identity_from_samples(u: &Uea, samples: &[(Rational, Vec<Rational>)], cdeg: usize) -> Result<CharIdentity> {
    let d = samples.first().map(|s| s.1.len()).ok_or(Error::EmptySpace)?;
    if samples.len() < cdeg + 1 {
        return Err(Error::SolveUnderdetermined("grid too small".into()));
    }
    let vand = Mat::from_fn(samples.len(), cdeg + 1, |r, k| {
        let mut p = rat(1);
        for _ in 0..k {
            p *= &samples[r].0;
        }
        p
    });
    let cas = u.casimir();
    let mut coeffs = Vec::new();
    let mut q = Vec::new();
    for i in 0..d {
        let rhs: Vec<Rational> = samples.iter().map(|s| s.1[i].clone()).collect();
        let a = vand.solve(&rhs).ok_or_else(|| Error::SolveUnderdetermined(format!("Q_{} not polynomial in C", i + 1)))?;
        let mut qi = Pbw::zero();
        for (k, ak) in a.iter().enumerate() {
            qi = qi.add(&u.pow(&cas, k as u32).scale(ak));
        }
        coeffs.push(a);
        q.push(qi);
    }
    let e = u.e_matrix();
    let mut r = u.mat_pow(&e, d as u32);
    for (i, qi) in q.iter().enumerate() {
        r = r.add(&u.mat_pow(&e, (d - 1 - i) as u32).left_scale(u, qi));
    }
    Ok(CharIdentity { degree: d, coeffs, q, vanishes: r.is_zero() })
}

/// Weight-space block of `(μ_{M_λ} ⊗ μ)(t)` on `span{m_1⊗e_1, m_0⊗e_2}`.
pub fn sl2_verma_block(u: &Uea, lambda: &Rational) -> Mat {
    let rep = sl2_verma(lambda, 3);
    let t = u.tempered_on(&rep);
    let idx = [1 * 2, 1];
    Mat::from_fn(2, 2, |i, j| t[(idx[i], idx[j])].clone())
}

/// Casimir value on the highest-weight vector of `M_λ`.
pub fn sl2_casimir_value(u: &Uea, lambda: &Rational) -> Rational {
    let rep = sl2_verma(lambda, 3);
    u.eval(&u.casimir(), &rep)[(0, 0)].clone()
}

/// Characteristic identity for `sl₂` from Verma eigenvalue data.
pub fn sl2_char_identity(grid: &[Rational]) -> Result<(Uea, CharIdentity)> {
    let u = Uea::new(LieData::sl2()?);
    let samples: Vec<(Rational, Vec<Rational>)> = grid
        .iter()
        .map(|l| {
            let b = sl2_verma_block(&u, l);
            let tr = b.trace();
            let det = &b[(0, 0)] * &b[(1, 1)] - &b[(0, 1)] * &b[(1, 0)];
            (sl2_casimir_value(&u, l), vec![-tr, det])
        })
        .collect();
    let ci = char_identity_from_samples(&u, &samples, 1)?;
    Ok((u, ci))
}

/// Characteristic identity for `so₃` from harmonic modules `L_j`,
/// `j ∈ grid` (each `j ≥ 1`).
pub fn so3_char_identity(grid: &[usize]) -> Result<(Uea, CharIdentity)> {
    let u = Uea::new(LieData::so(3)?);
    let cas = u.casimir();
    let mut samples = Vec::new();
    for &j in grid {
        let rep = harmonic_module(&u.lie, j)?;
        let c = u.eval(&cas, &rep).as_scalar().ok_or(Error::SolveUnderdetermined("Casimir not scalar".into()))?;
        samples.push((c, monic_relation(&u.tempered_on(&rep), 3)?));
    }
    let ci = char_identity_from_samples(&u, &samples, 2)?;
    Ok((u, ci))
}

/// Whether the identity holds after applying `μ_{L_j}` (checked on the
/// tempered Casimir of `L_j ⊗ V`).
pub fn so3_identity_on_module(u: &Uea, ci: &CharIdentity, j: usize) -> Result<bool> {
    let rep = harmonic_module(&u.lie, j)?;
    let t = u.tempered_on(&rep);
    let cval = u.eval(&u.casimir(), &rep).as_scalar().ok_or(Error::SolveUnderdetermined("Casimir not scalar".into()))?;
    let n = t.rows;
    let mut acc = t.pow(ci.degree as u32);
    for (i, a) in ci.coeffs.iter().enumerate() {
        let mut qv = Rational::zero();
        let mut p = rat(1);
        for ak in a {
            qv += ak * &p;
            p *= &cval;
        }
        acc = &acc + &t.pow((ci.degree - 1 - i) as u32).scale(&qv);
    }
    Ok(acc == Mat::zeros(n, n))
}

impl fmt::Display for UeaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries.iter().map(|r| r.len()).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_straightening() {
        let u = Uea::new(LieData::sl2().unwrap());
        let (y, x, t) = (Pbw::gen(0), Pbw::gen(1), Pbw::gen(2));
        let xy = u.mul(&x, &y);
        assert_eq!(xy, u.mul(&y, &x).add(&t));
        assert_eq!(u.mul(&t, &x), u.mul(&x, &t).add(&x.scale(&rat(2))));
        assert_eq!(xy.display(u.labels()), "Y*X + T");
    }

    #[test]
    fn harmonic_dims() {
        let l = LieData::so(3).unwrap();
        for j in 0..4 {
            assert_eq!(harmonic_module(&l, j).unwrap()[0].rows, 2 * j + 1);
        }
    }
}
