//! Parity-graded exact linear algebra, orthosymplectic Lie superalgebras and
//! the representation functors on `M ⊗ V^{⊗r}`.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::brauer::{BrauerElem, GenKind};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::polar::{PolarElem, PolarGen, PolarWord};
use crate::scalars::{rat, Frac, Rational, Var};

/// Parity vector of a super vector space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    parity: Vec<u8>,
}

impl GradedSpace {
    /// `m` even basis vectors followed by `2n` odd ones.
    pub fn new(m: usize, n: usize) -> Self {
        let mut parity = vec![0; m];
        parity.extend(std::iter::repeat(1).take(2 * n));
        GradedSpace { parity }
    }

    pub fn from_parities(parity: Vec<u8>) -> Self {
        GradedSpace { parity }
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn parity(&self, i: usize) -> u8 {
        self.parity[i]
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }

    pub fn sdim(&self) -> i64 {
        self.parity.iter().map(|&p| if p == 0 { 1 } else { -1 }).sum()
    }

    /// Parities of the tensor square, index `i * d + j`.
    pub fn square(&self) -> GradedSpace {
        let mut p = Vec::with_capacity(self.dim() * self.dim());
        for &a in &self.parity {
            for &b in &self.parity {
                p.push(a ^ b);
            }
        }
        GradedSpace { parity: p }
    }
}

fn sign(p: u8) -> Rational {
    if p % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Graded tensor product `A ⊗ B` where `B` is homogeneous of parity
/// `b_par`: `(A⊗B)(x⊗y) = (−1)^{|B||x|} Ax ⊗ By`. `a_cols` are the
/// parities of the domain of `A`.
pub fn gkron(a: &Mat, a_cols: &[u8], b: &Mat, b_par: u8) -> Mat {
    let mut m = a.kron(b);
    if b_par == 1 {
        for j in 0..a.cols {
            if a_cols[j] == 1 {
                for jb in 0..b.cols {
                    let col = j * b.cols + jb;
                    for i in 0..m.rows {
                        if !m[(i, col)].is_zero() {
                            let v = -m[(i, col)].clone();
                            m[(i, col)] = v;
                        }
                    }
                }
            }
        }
    }
    m
}

/// Supertrace.
pub fn str_(a: &Mat, space: &GradedSpace) -> Rational {
    (0..a.rows).map(|i| &a[(i, i)] * sign(space.parity(i))).sum()
}

/// Signed flip on `V ⊗ V`.
pub fn tau(space: &GradedSpace) -> Mat {
    let d = space.dim();
    let mut t = Mat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            t[(b * d + a, a * d + b)] = sign(space.parity(a) * space.parity(b));
        }
    }
    t
}

/// Standard supersymmetric form: identity on the even block, `[[0,1],[−1,0]]`
/// blocks on the odd part.
pub fn default_form(space: &GradedSpace) -> Mat {
    let d = space.dim();
    let mut g = Mat::zeros(d, d);
    let m = space.parities().iter().filter(|&&p| p == 0).count();
    for i in 0..m {
        g[(i, i)] = rat(1);
    }
    let mut k = m;
    while k + 1 < d {
        g[(k, k + 1)] = rat(1);
        g[(k + 1, k)] = rat(-1);
        k += 2;
    }
    g
}

/// `Ĉ: V⊗V → 𝕂` as a `1 × d²` matrix and `Č: 𝕂 → V⊗V` as `d² × 1`.
pub fn cap_cup(space: &GradedSpace, g: &Mat) -> Result<(Mat, Mat)> {
    let d = space.dim();
    let k = g.inverse().ok_or(Error::SingularForm)?;
    let cap = Mat::from_fn(1, d * d, |_, j| g[(j / d, j % d)].clone());
    let cup = Mat::from_fn(d * d, 1, |i, _| k[(i / d, i % d)].clone());
    Ok((cap, cup))
}

/// Orthosymplectic data for `V = (m|2n)` with the default form.
#[derive(Clone, Debug)]
pub struct Osp {
    pub m: usize,
    pub n: usize,
    pub space: GradedSpace,
    pub g: Mat,
    pub ginv: Mat,
    pub basis: Vec<Mat>,
    pub basis_parity: Vec<u8>,
    /// Casimir `C = Σ K_ij b_i b_j`.
    pub casimir_coeffs: Mat,
    /// `ℋ = Σ h_ij b_i ⊗ b_j`.
    pub h_terms: Vec<(usize, usize, Rational)>,
}

impl Osp {
    pub fn build(m: usize, n: usize) -> Result<Osp> {
        if m == 0 && n == 0 {
            return Err(Error::EmptySpace);
        }
        let space = GradedSpace::new(m, n);
        let g = default_form(&space);
        let ginv = g.inverse().ok_or(Error::SingularForm)?;
        let d = space.dim();
        let mut basis = Vec::new();
        let mut basis_parity = Vec::new();
        for par in [0u8, 1] {
            // unknowns: entries (a, b) with p(a) + p(b) = par
            let slots: Vec<(usize, usize)> = (0..d)
                .flat_map(|a| (0..d).map(move |b| (a, b)))
                .filter(|&(a, b)| (space.parity(a) ^ space.parity(b)) == par)
                .collect();
            if slots.is_empty() {
                continue;
            }
            // (Xᵀg)_{cd} + (−1)^{|X||c|} (gX)_{cd} = 0
            let mut rows = Vec::new();
            for c in 0..d {
                for e in 0..d {
                    let mut row = vec![Rational::zero(); slots.len()];
                    for (u, &(a, b)) in slots.iter().enumerate() {
                        if b == c {
                            row[u] += &g[(a, e)];
                        }
                        if b == e {
                            row[u] += &g[(c, a)] * sign(par * space.parity(c));
                        }
                    }
                    rows.push(row);
                }
            }
            let sys = Mat::from_fn(rows.len(), slots.len(), |i, j| rows[i][j].clone());
            for v in sys.nullspace() {
                let mut x = Mat::zeros(d, d);
                for (u, &(a, b)) in slots.iter().enumerate() {
                    x[(a, b)] = v[u].clone();
                }
                basis.push(x);
                basis_parity.push(par);
            }
        }
        let expect = m * m.saturating_sub(1) / 2 + 2 * m * n + n * (2 * n + 1);
        if basis.len() != expect {
            return Err(Error::DimensionMismatch(basis.len(), expect));
        }
        let nb = basis.len();
        let gram = Mat::from_fn(nb, nb, |i, j| str_(&(&basis[i] * &basis[j]), &space));
        let kinv = gram.inverse().ok_or(Error::SingularForm)?;
        let mut osp = Osp {
            m,
            n,
            space,
            g,
            ginv,
            basis,
            basis_parity,
            casimir_coeffs: Mat::zeros(nb, nb),
            h_terms: Vec::new(),
        };
        // pick the dual convention giving a central element, then rescale
        let vv = Module::natural(&osp).tensor(&Module::natural(&osp));
        let mut chosen = None;
        for cand in [kinv.transpose(), kinv.clone()] {
            let c = vv.casimir_with(&cand);
            if vv.act.iter().zip(&osp.basis_parity).all(|(x, _)| &c * x == x * &c) {
                chosen = Some(cand);
                break;
            }
        }
        let k = chosen.ok_or_else(|| Error::SolveUnderdetermined("no central Casimir".into()))?;
        osp.set_casimir(k);
        let h = osp.tempered(&Module::natural(&osp), &Module::natural(&osp));
        let (cap, cup) = cap_cup(&osp.space, &osp.g)?;
        let target = &tau(&osp.space) - &(&cup * &cap);
        // (1|0): τ − e vanishes and so does the Casimir
        let Some(idx) = (0..target.entries().len()).find(|&i| !target.entries()[i].is_zero()) else {
            return if h.is_zero() { Ok(osp) } else { Err(Error::SingularForm) };
        };
        let scale = &h.entries()[idx] / &target.entries()[idx];
        if scale.is_zero() {
            return Err(Error::SingularForm);
        }
        let k = osp.casimir_coeffs.scale(&scale.recip());
        osp.set_casimir(k);
        if osp.tempered(&Module::natural(&osp), &Module::natural(&osp)) != target {
            return Err(Error::UnsupportedParameter(format!("tempered Casimir of ({m}|{}) is not proportional to τ − e", 2 * n)));
        }
        Ok(osp)
    }

    fn set_casimir(&mut self, k: Mat) {
        let mut terms: HashMap<(usize, usize), Rational> = HashMap::new();
        let half = Rational::new(1.into(), 2.into());
        for i in 0..k.rows {
            for j in 0..k.cols {
                if k[(i, j)].is_zero() {
                    continue;
                }
                let c = &k[(i, j)] * &half;
                *terms.entry((i, j)).or_insert_with(Rational::zero) += &c;
                let s = sign(self.basis_parity[i] * self.basis_parity[j]);
                *terms.entry((j, i)).or_insert_with(Rational::zero) += &c * &s;
            }
        }
        let mut h: Vec<(usize, usize, Rational)> =
            terms.into_iter().filter(|(_, c)| !c.is_zero()).map(|((i, j), c)| (i, j, c)).collect();
        h.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        self.casimir_coeffs = k;
        self.h_terms = h;
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn sdim(&self) -> i64 {
        self.space.sdim()
    }

    /// Super bracket of basis elements.
    pub fn bracket(&self, i: usize, j: usize) -> Mat {
        let s = sign(self.basis_parity[i] * self.basis_parity[j]);
        &(&self.basis[i] * &self.basis[j]) - &(&self.basis[j] * &self.basis[i]).scale(&s)
    }

    /// Coordinates of a matrix in the basis, if it lies in the span.
    pub fn coords(&self, x: &Mat) -> Option<Vec<Rational>> {
        let d2 = x.rows * x.cols;
        let a = Mat::from_fn(d2, self.dim(), |p, j| self.basis[j].entries()[p].clone());
        a.solve(x.entries())
    }

    /// Whether `ω(Xu, w) + (−1)^{|X||u|} ω(u, Xw) = 0` for every basis pair.
    pub fn preserves_form(&self, i: usize) -> bool {
        let x = &self.basis[i];
        let p = self.basis_parity[i];
        let d = self.space.dim();
        let lhs = &x.transpose() * &self.g;
        let rhs = &self.g * x;
        (0..d).all(|c| (0..d).all(|e| (&lhs[(c, e)] + &rhs[(c, e)] * sign(p * self.space.parity(c))).is_zero()))
    }

    /// `(μ_A ⊗ μ_B)(t)` on `A ⊗ B`.
    pub fn tempered(&self, a: &Module, b: &Module) -> Mat {
        let n = a.dim() * b.dim();
        let mut out = Mat::zeros(n, n);
        for (i, j, c) in &self.h_terms {
            let t = gkron(&a.act[*i], &a.parity, &b.act[*j], self.basis_parity[*j]);
            out = &out + &t.scale(c);
        }
        out
    }
}

/// Finite-dimensional module given by matrices of the basis action.
#[derive(Clone, Debug)]
pub struct Module {
    pub parity: Vec<u8>,
    pub act: Vec<Mat>,
    pub basis_parity: Vec<u8>,
}

impl Module {
    pub fn natural(osp: &Osp) -> Module {
        Module { parity: osp.space.parities().to_vec(), act: osp.basis.clone(), basis_parity: osp.basis_parity.clone() }
    }

    pub fn trivial(osp: &Osp) -> Module {
        Module { parity: vec![0], act: vec![Mat::zeros(1, 1); osp.dim()], basis_parity: osp.basis_parity.clone() }
    }

    pub fn adjoint(osp: &Osp) -> Result<Module> {
        let nb = osp.dim();
        let mut act = vec![Mat::zeros(nb, nb); nb];
        for i in 0..nb {
            for j in 0..nb {
                let c = osp
                    .coords(&osp.bracket(i, j))
                    .ok_or_else(|| Error::SolveUnderdetermined("bracket leaves the span".into()))?;
                for (k, v) in c.into_iter().enumerate() {
                    act[i][(k, j)] = v;
                }
            }
        }
        Ok(Module { parity: osp.basis_parity.clone(), act, basis_parity: osp.basis_parity.clone() })
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    /// Diagonal action on `self ⊗ o`.
    pub fn tensor(&self, o: &Module) -> Module {
        let ia = Mat::identity(self.dim());
        let ib = Mat::identity(o.dim());
        let act = self
            .act
            .iter()
            .zip(&o.act)
            .zip(&self.basis_parity)
            .map(|((x, y), &p)| &gkron(x, &self.parity, &ib, 0) + &gkron(&ia, &self.parity, y, p))
            .collect();
        let mut parity = Vec::new();
        for &a in &self.parity {
            for &b in &o.parity {
                parity.push(a ^ b);
            }
        }
        Module { parity, act, basis_parity: self.basis_parity.clone() }
    }

    fn casimir_with(&self, k: &Mat) -> Mat {
        let n = self.dim();
        let mut c = Mat::zeros(n, n);
        for i in 0..k.rows {
            for j in 0..k.cols {
                if !k[(i, j)].is_zero() {
                    c = &c + &(&self.act[i] * &self.act[j]).scale(&k[(i, j)]);
                }
            }
        }
        c
    }

    pub fn casimir(&self, osp: &Osp) -> Mat {
        self.casimir_with(&osp.casimir_coeffs)
    }
}

/// Number of zero-weight vectors in `V^{⊗2N}` for `sp₂`.
pub fn hom_dim_weightzero(n: usize) -> u128 {
    // weights ±1 per slot; count sequences summing to zero
    let len = 2 * n;
    let mut ways = vec![0u128; 2 * len + 1];
    ways[len] = 1;
    for _ in 0..len {
        let mut next = vec![0u128; 2 * len + 1];
        for (w, &c) in ways.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if w + 1 <= 2 * len {
                next[w + 1] += c;
            }
            if w >= 1 {
                next[w - 1] += c;
            }
        }
        ways = next;
    }
    ways[len]
}

// ---------------------------------------------------------------------------
// Pole modules and the functor on sparse vectors

/// Module placed on the pole.
pub trait PoleModule {
    fn parity(&self, m: usize) -> u8;
    /// `ℋ(m ⊗ e_v)` as `(m', v', c)` triples.
    fn h_apply(&self, osp: &Osp, m: usize, v: usize) -> Result<Vec<(usize, usize, Rational)>>;
    /// Basis indices used as inputs when comparing maps.
    fn window(&self) -> Vec<usize>;
}

/// Dense module with a precomputed `ℋ_{M,V}`.
pub struct DensePole {
    module: Module,
    h: Mat,
    dv: usize,
}

impl DensePole {
    pub fn new(osp: &Osp, module: Module) -> DensePole {
        let h = osp.tempered(&module, &Module::natural(osp));
        DensePole { module, h, dv: osp.space.dim() }
    }

    pub fn module(&self) -> &Module {
        &self.module
    }
}

impl PoleModule for DensePole {
    fn parity(&self, m: usize) -> u8 {
        self.module.parity[m]
    }

    fn h_apply(&self, _osp: &Osp, m: usize, v: usize) -> Result<Vec<(usize, usize, Rational)>> {
        let col = m * self.dv + v;
        Ok((0..self.h.rows)
            .filter(|&i| !self.h[(i, col)].is_zero())
            .map(|i| (i / self.dv, i % self.dv, self.h[(i, col)].clone()))
            .collect())
    }

    fn window(&self) -> Vec<usize> {
        (0..self.module.dim()).collect()
    }
}

/// Verma module `M_λ` of `sp₂` with basis `m_k = Y^k m_+`, `0 ≤ k ≤ cutoff`.
#[derive(Clone, Debug)]
pub struct TruncVerma {
    pub lambda: Rational,
    pub cutoff: usize,
    /// Inputs used for comparisons: `m_0 … m_window`.
    pub window: usize,
}

impl TruncVerma {
    pub fn new(lambda: Rational, cutoff: usize, window: usize) -> Self {
        TruncVerma { lambda, cutoff, window }
    }

    /// Action of `αT + βX + γY` on `m_k`.
    fn act(&self, coeffs: (&Rational, &Rational, &Rational), k: usize) -> Result<Vec<(usize, Rational)>> {
        let (a, b, c) = coeffs;
        let mut out = Vec::new();
        if !a.is_zero() {
            out.push((k, a * (&self.lambda - rat(2 * k as i64))));
        }
        if !b.is_zero() && k > 0 {
            let kk = rat(k as i64);
            out.push((k - 1, b * &kk * (&self.lambda - &kk + rat(1))));
        }
        if !c.is_zero() {
            if k + 1 > self.cutoff {
                return Err(Error::CutoffExceeded(self.cutoff));
            }
            out.push((k + 1, c.clone()));
        }
        Ok(out)
    }
}

impl PoleModule for TruncVerma {
    fn parity(&self, _m: usize) -> u8 {
        0
    }

    fn h_apply(&self, osp: &Osp, m: usize, v: usize) -> Result<Vec<(usize, usize, Rational)>> {
        if osp.m != 0 || osp.n != 1 {
            return Err(Error::UnsupportedParameter("Verma pole requires (0|2)".into()));
        }
        let mut acc: HashMap<(usize, usize), Rational> = HashMap::new();
        for (i, j, c) in &osp.h_terms {
            let bi = &osp.basis[*i];
            // b = αT + βX + γY with T = diag(1,−1), X = E12, Y = E21
            let left = self.act((&bi[(0, 0)], &bi[(0, 1)], &bi[(1, 0)]), m)?;
            let bj = &osp.basis[*j];
            for (m2, cm) in &left {
                for v2 in 0..2 {
                    let e = &bj[(v2, v)];
                    if !e.is_zero() {
                        *acc.entry((*m2, v2)).or_insert_with(Rational::zero) += c * cm * e;
                    }
                }
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((a, b), c)| (a, b, c)).collect())
    }

    fn window(&self) -> Vec<usize> {
        (0..=self.window).collect()
    }
}

/// Sparse vector in `M ⊗ V^{⊗r}`; keys are `[m, v_1, …, v_r]`.
pub type SVec = HashMap<Vec<usize>, Rational>;

fn push(acc: &mut SVec, k: Vec<usize>, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(k).or_insert_with(Rational::zero);
    *e += c;
}

fn clean(v: SVec) -> SVec {
    v.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Functor `ℱ_M` evaluated on sparse vectors.
pub struct Oracle<P: PoleModule> {
    pub osp: Osp,
    pub pole: P,
    zcache: RefCell<HashMap<(u32, usize), SVec>>,
    zvals: RefCell<HashMap<u32, Rational>>,
    extra: HashMap<Var, Rational>,
}

impl<P: PoleModule> Oracle<P> {
    pub fn new(osp: Osp, pole: P) -> Self {
        Oracle { osp, pole, zcache: RefCell::new(HashMap::new()), zvals: RefCell::new(HashMap::new()), extra: HashMap::new() }
    }

    /// Bind an extra indeterminate (e.g. `λ`).
    pub fn bind(&mut self, v: Var, q: Rational) {
        self.extra.insert(v, q);
    }

    fn dv(&self) -> usize {
        self.osp.space.dim()
    }

    fn vpar(&self, v: usize) -> u8 {
        self.osp.space.parity(v)
    }

    pub fn apply_gen(&self, g: &PolarGen, x: &SVec) -> Result<SVec> {
        let mut out = SVec::new();
        let d = self.dv();
        match *g {
            PolarGen::Id { .. } => return Ok(x.clone()),
            PolarGen::S { i, .. } => {
                for (k, c) in x {
                    let mut k2 = k.clone();
                    k2.swap(i, i + 1);
                    let s = sign(self.vpar(k[i]) * self.vpar(k[i + 1]));
                    push(&mut out, k2, c * s);
                }
            }
            PolarGen::E { i, .. } => {
                for (k, c) in x {
                    let w = &self.osp.g[(k[i], k[i + 1])];
                    if w.is_zero() {
                        continue;
                    }
                    for a in 0..d {
                        for b in 0..d {
                            let kk = &self.osp.ginv[(a, b)];
                            if !kk.is_zero() {
                                let mut k2 = k.clone();
                                k2[i] = a;
                                k2[i + 1] = b;
                                push(&mut out, k2, c * w * kk);
                            }
                        }
                    }
                }
            }
            PolarGen::Cap { i, .. } => {
                for (k, c) in x {
                    let w = &self.osp.g[(k[i], k[i + 1])];
                    if !w.is_zero() {
                        let mut k2 = k.clone();
                        k2.drain(i..i + 2);
                        push(&mut out, k2, c * w);
                    }
                }
            }
            PolarGen::Cup { i, .. } => {
                for (k, c) in x {
                    for a in 0..d {
                        for b in 0..d {
                            let kk = &self.osp.ginv[(a, b)];
                            if !kk.is_zero() {
                                let mut k2 = k[..i].to_vec();
                                k2.push(a);
                                k2.push(b);
                                k2.extend_from_slice(&k[i..]);
                                push(&mut out, k2, c * kk);
                            }
                        }
                    }
                }
            }
            PolarGen::D { .. } => {
                for (k, c) in x {
                    for (m2, v2, h) in self.pole.h_apply(&self.osp, k[0], k[1])? {
                        let mut k2 = k.clone();
                        k2[0] = m2;
                        k2[1] = v2;
                        push(&mut out, k2, c * h);
                    }
                }
            }
            PolarGen::Z { l, .. } => {
                for (k, c) in x {
                    for (mk, zc) in self.z_column(l, k[0])? {
                        let mut k2 = k.clone();
                        k2[0] = mk[0];
                        push(&mut out, k2, c * zc);
                    }
                }
            }
        }
        Ok(clean(out))
    }

    /// `Z_l(m)` computed by closing `ℍ^l`.
    fn z_column(&self, l: u32, m: usize) -> Result<SVec> {
        if let Some(v) = self.zcache.borrow().get(&(l, m)) {
            return Ok(v.clone());
        }
        let mut x = SVec::new();
        x.insert(vec![m], rat(1));
        x = self.apply_gen(&PolarGen::Cup { i: 1, r: 2 }, &x)?;
        for _ in 0..l {
            x = self.apply_gen(&PolarGen::D { r: 2 }, &x)?;
        }
        x = self.apply_gen(&PolarGen::Cap { i: 1, r: 2 }, &x)?;
        self.zcache.borrow_mut().insert((l, m), x.clone());
        Ok(x)
    }

    /// Scalar by which `Z_l` acts, checked on the input window.
    pub fn z_value(&self, l: u32) -> Result<Rational> {
        if let Some(v) = self.zvals.borrow().get(&l) {
            return Ok(v.clone());
        }
        let mut val: Option<Rational> = None;
        for m in self.pole.window() {
            let col = self.z_column(l, m)?;
            let c = col.get(&vec![m]).cloned().unwrap_or_else(Rational::zero);
            if col.len() > 1 || (col.len() == 1 && c.is_zero()) {
                return Err(Error::SpecializationMissing(format!("z{l} is not scalar")));
            }
            match &val {
                None => val = Some(c),
                Some(v) if *v != c => return Err(Error::SpecializationMissing(format!("z{l} is not scalar"))),
                _ => {}
            }
        }
        let v = val.ok_or(Error::EmptySpace)?;
        self.zvals.borrow_mut().insert(l, v.clone());
        Ok(v)
    }

    /// Value of a coefficient with `δ ↦ sdim` and each `z_k` bound to its
    /// scalar.
    pub fn scalar(&self, c: &Frac) -> Result<Rational> {
        let mut b: HashMap<Var, Rational> = self.extra.clone();
        b.insert(Var::Delta, rat(self.osp.sdim()));
        let mut vars = c.num().vars();
        vars.extend(c.den().vars());
        for v in vars {
            if let Var::Z(k) = v {
                b.insert(v, self.z_value(k)?);
            }
        }
        c.eval(&b)
    }

    pub fn apply_word(&self, w: &PolarWord, x: &SVec) -> Result<SVec> {
        let mut cur = x.clone();
        for g in w.gens() {
            cur = self.apply_gen(g, &cur)?;
        }
        Ok(cur)
    }

    pub fn apply(&self, e: &PolarElem, x: &SVec) -> Result<SVec> {
        let mut out = SVec::new();
        for (w, c) in e.terms() {
            let s = self.scalar(c)?;
            for (k, v) in self.apply_word(w, x)? {
                push(&mut out, k, v * &s);
            }
        }
        Ok(clean(out))
    }

    pub fn apply_brauer(&self, b: &BrauerElem, x: &SVec) -> Result<SVec> {
        self.apply(&PolarElem::from_brauer(b)?, x)
    }

    /// Basis vectors `m ⊗ e_{v_1} ⊗ … ⊗ e_{v_r}` over the pole window.
    pub fn basis_inputs(&self, r: usize) -> Vec<Vec<usize>> {
        let d = self.dv();
        let mut out: Vec<Vec<usize>> = self.pole.window().into_iter().map(|m| vec![m]).collect();
        for _ in 0..r {
            out = out
                .into_iter()
                .flat_map(|k| {
                    (0..d).map(move |v| {
                        let mut k2 = k.clone();
                        k2.push(v);
                        k2
                    })
                })
                .collect();
        }
        out
    }

    /// Test vectors: every basis vector if there are at most `limit`,
    /// otherwise `samples` random integer combinations.
    pub fn test_vectors(&self, r: usize, limit: usize, samples: usize, seed: u64) -> Vec<SVec> {
        let basis = self.basis_inputs(r);
        if basis.len() <= limit {
            return basis
                .into_iter()
                .map(|k| {
                    let mut v = SVec::new();
                    v.insert(k, rat(1));
                    v
                })
                .collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let mut v = SVec::new();
                for _ in 0..12 {
                    let k = basis[rng.gen_range(0..basis.len())].clone();
                    push(&mut v, k, rat(rng.gen_range(-5..=5)));
                }
                clean(v)
            })
            .collect()
    }

    /// Whether `a` and `b` agree on the given test vectors.
    pub fn agree(&self, a: &PolarElem, b: &PolarElem, tests: &[SVec]) -> Result<bool> {
        for x in tests {
            if self.apply(a, x)? != self.apply(b, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `a` vanishes on the given test vectors.
    pub fn vanishes(&self, a: &PolarElem, tests: &[SVec]) -> Result<bool> {
        for x in tests {
            if !self.apply(a, x)?.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Matrix of `a` on the window basis; rows indexed by the sorted output
    /// keys that occur.
    pub fn matrix(&self, a: &PolarElem) -> Result<(Vec<Vec<usize>>, Mat)> {
        let inputs = self.basis_inputs(a.src());
        let cols: Vec<SVec> = inputs
            .iter()
            .map(|k| {
                let mut v = SVec::new();
                v.insert(k.clone(), rat(1));
                self.apply(a, &v)
            })
            .collect::<Result<_>>()?;
        let mut keys: Vec<Vec<usize>> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        let index: HashMap<&Vec<usize>, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut m = Mat::zeros(keys.len(), inputs.len());
        for (j, c) in cols.iter().enumerate() {
            for (k, v) in c {
                m[(index[k], j)] = v.clone();
            }
        }
        Ok((keys, m))
    }
}

/// Oracle family used for soundness checks: natural and adjoint modules on
/// the pole for each `(m|2n)`.
pub fn standard_family() -> Result<Vec<(String, Oracle<DensePole>)>> {
    let mut out = Vec::new();
    for (m, n) in [(3, 0), (5, 0), (0, 1), (0, 2), (2, 1)] {
        let osp = Osp::build(m, n)?;
        let nat = DensePole::new(&osp, Module::natural(&osp));
        out.push((format!("({m}|{}) M=V", 2 * n), Oracle::new(osp.clone(), nat)));
        let ad = DensePole::new(&osp, Module::adjoint(&osp)?);
        out.push((format!("({m}|{}) M=ad", 2 * n), Oracle::new(osp, ad)));
    }
    Ok(out)
}

/// Matrix of a Brauer element on `V^{⊗r} → V^{⊗s}` with `δ ↦ sdim`.
pub fn brauer_matrix(osp: &Osp, b: &BrauerElem) -> Result<Mat> {
    let pole = DensePole::new(osp, Module::trivial(osp));
    let o = Oracle::new(osp.clone(), pole);
    let (keys, m) = o.matrix(&PolarElem::from_brauer(b)?)?;
    // reindex rows onto the full output basis
    let d = osp.space.dim();
    let rows = d.pow(b.top() as u32);
    let mut full = Mat::zeros(rows, m.cols);
    for (i, k) in keys.iter().enumerate() {
        let idx = k[1..].iter().fold(0, |acc, &v| acc * d + v);
        for j in 0..m.cols {
            full[(idx, j)] = m[(i, j)].clone();
        }
    }
    Ok(full)
}

/// Matrix of a single Brauer generator.
pub fn generator_matrix(osp: &Osp, kind: GenKind, i: usize, r: usize) -> Result<Mat> {
    brauer_matrix(osp, &crate::brauer::generator(kind, i, r)?)
}

/// True when every coefficient vanishes.
pub fn is_zero_map(v: &SVec) -> bool {
    v.values().all(|c| c.is_zero())
}

/// Absolute-value helper for reporting.
pub fn max_abs(m: &Mat) -> Rational {
    m.entries().iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_form() {
        assert_eq!(Osp::build(0, 1).unwrap().dim(), 3);
        assert_eq!(Osp::build(3, 0).unwrap().dim(), 3);
        let o = Osp::build(2, 1).unwrap();
        assert_eq!(o.dim(), 1 + 4 + 3);
        assert!((0..o.dim()).all(|i| o.preserves_form(i)));
        assert!(Osp::build(0, 0).is_err());
    }

    #[test]
    fn tau_and_cap_cup() {
        for (m, n) in [(3, 0), (0, 1), (2, 1)] {
            let o = Osp::build(m, n).unwrap();
            let t = tau(&o.space);
            let d = o.space.dim();
            assert_eq!(&t * &t, Mat::identity(d * d));
            let (cap, cup) = cap_cup(&o.space, &o.g).unwrap();
            assert_eq!((&cap * &cup)[(0, 0)], rat(o.sdim()));
            let id = Mat::identity(d);
            let lhs = &gkron(&cap, &vec![0; d * d], &id, 0) * &gkron(&id, o.space.parities(), &cup, 0);
            assert_eq!(lhs, id);
        }
    }

    #[test]
    fn tempered_is_tau_minus_e() {
        for (m, n) in [(3, 0), (4, 0), (0, 1), (0, 2), (2, 1)] {
            let o = Osp::build(m, n).unwrap();
            let nat = Module::natural(&o);
            let h = o.tempered(&nat, &nat);
            let (cap, cup) = cap_cup(&o.space, &o.g).unwrap();
            assert_eq!(h, &tau(&o.space) - &(&cup * &cap), "({m}|{})", 2 * n);
            let c = nat.casimir(&o);
            assert_eq!(c, Mat::scalar(o.space.dim(), rat(o.sdim() - 1)));
        }
    }

    #[test]
    fn weight_zero_counts() {
        assert_eq!(hom_dim_weightzero(0), 1);
        assert_eq!(hom_dim_weightzero(1), 2);
        assert_eq!(hom_dim_weightzero(3), 20);
    }
}
