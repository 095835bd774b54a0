//! The polar Brauer category: generator words on objects `(m, v^r)`,
//! connector diagrams, and rewriting to dotted-diagram normal form over
//! `ℚ[δ, z2, z4, …]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::brauer::{self, BrauerDiagram, BrauerElem, GenKind};
use crate::error::{Error, Result};
use crate::scalars::{Frac, Poly};

/// Default rewrite-step budget for a single normalization.
pub const DEFAULT_BUDGET: usize = 20_000_000;

/// Generating morphisms. `Cup` carries its target rank; all others carry
/// their source rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolarGen {
    S { i: usize, r: usize },
    E { i: usize, r: usize },
    Cap { i: usize, r: usize },
    Cup { i: usize, r: usize },
    D { r: usize },
    Id { r: usize },
    /// `Z_l ⊗ I_r`.
    Z { l: u32, r: usize },
}

impl PolarGen {
    pub fn source(&self) -> usize {
        match *self {
            PolarGen::Cup { r, .. } => r - 2,
            PolarGen::S { r, .. }
            | PolarGen::E { r, .. }
            | PolarGen::Cap { r, .. }
            | PolarGen::D { r }
            | PolarGen::Id { r }
            | PolarGen::Z { r, .. } => r,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            PolarGen::Cap { r, .. } => r - 2,
            PolarGen::S { r, .. }
            | PolarGen::E { r, .. }
            | PolarGen::Cup { r, .. }
            | PolarGen::D { r }
            | PolarGen::Id { r }
            | PolarGen::Z { r, .. } => r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let oob = |index, rank| Err(Error::IndexOutOfRange { index, rank });
        match *self {
            PolarGen::S { i, r } | PolarGen::E { i, r } | PolarGen::Cap { i, r } | PolarGen::Cup { i, r } => {
                if i == 0 || i + 1 > r {
                    return oob(i, r);
                }
                Ok(())
            }
            PolarGen::D { r } => {
                if r == 0 {
                    return oob(1, 0);
                }
                Ok(())
            }
            PolarGen::Id { .. } | PolarGen::Z { .. } => Ok(()),
        }
    }

    fn cd(&self) -> Result<Cd> {
        self.validate()?;
        Ok(match *self {
            PolarGen::S { i, r } => Cd::from_brauer(&brauer::generator_diagram(GenKind::S, i, r)?),
            PolarGen::E { i, r } => Cd::from_brauer(&brauer::generator_diagram(GenKind::E, i, r)?),
            PolarGen::Cap { i, r } => Cd::from_brauer(&brauer::generator_diagram(GenKind::Cap, i, r)?),
            PolarGen::Cup { i, r } => Cd::from_brauer(&brauer::generator_diagram(GenKind::Cup, i, r)?),
            PolarGen::D { r } => Cd::connector(r),
            PolarGen::Id { r } => Cd::identity(r),
            PolarGen::Z { l, r } => Cd::bubble(l as usize, r),
        })
    }

    fn from_step(st: &brauer::Step) -> PolarGen {
        match st.kind {
            GenKind::S => PolarGen::S { i: st.i, r: st.r },
            GenKind::E => PolarGen::E { i: st.i, r: st.r },
            GenKind::Cap => PolarGen::Cap { i: st.i, r: st.r },
            GenKind::Cup => PolarGen::Cup { i: st.i, r: st.r },
            GenKind::Id | GenKind::H => PolarGen::Id { r: st.r },
        }
    }
}

impl fmt::Display for PolarGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PolarGen::S { i, r } => write!(f, "S{i}@{r}"),
            PolarGen::E { i, r } => write!(f, "E{i}@{r}"),
            PolarGen::Cap { i, r } => write!(f, "CAP{i}@{r}"),
            PolarGen::Cup { i, r } => write!(f, "CUP{i}@{r}"),
            PolarGen::D { r } => write!(f, "D@{r}"),
            PolarGen::Id { r } => write!(f, "ID@{r}"),
            PolarGen::Z { l, r } => write!(f, "Z{l}@{r}"),
        }
    }
}

/// Composable generator sequence, stored in application order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolarWord {
    src: usize,
    tgt: usize,
    gens: Vec<PolarGen>,
}

impl PolarWord {
    pub fn identity(r: usize) -> Self {
        PolarWord { src: r, tgt: r, gens: Vec::new() }
    }

    /// Build from generators in application order (first applied first).
    pub fn new(src: usize, gens: Vec<PolarGen>) -> Result<Self> {
        let mut cur = src;
        let mut kept = Vec::with_capacity(gens.len());
        for g in gens {
            g.validate()?;
            if g.source() != cur {
                return Err(Error::RankMismatch(cur, g.source()));
            }
            cur = g.target();
            if !matches!(g, PolarGen::Id { .. }) {
                kept.push(g);
            }
        }
        Ok(PolarWord { src, tgt: cur, gens: kept })
    }

    pub fn gen(g: PolarGen) -> Result<Self> {
        PolarWord::new(g.source(), vec![g])
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn tgt(&self) -> usize {
        self.tgt
    }

    /// Generators in application order.
    pub fn gens(&self) -> &[PolarGen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &PolarWord) -> Result<PolarWord> {
        if self.src != o.tgt {
            return Err(Error::RankMismatch(self.src, o.tgt));
        }
        let mut gens = o.gens.clone();
        gens.extend_from_slice(&self.gens);
        Ok(PolarWord { src: o.src, tgt: self.tgt, gens })
    }

    fn cd(&self) -> Result<(Cd, usize)> {
        let mut cur = Cd::identity(self.src);
        let mut loops = 0;
        for g in &self.gens {
            let (c, l) = g.cd()?.compose(&cur)?;
            cur = c;
            loops += l;
        }
        Ok((cur, loops))
    }
}

impl fmt::Display for PolarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "ID@{}", self.src);
        }
        let parts: Vec<String> = self.gens.iter().rev().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Linear combination of words with a common source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarElem {
    src: usize,
    tgt: usize,
    terms: BTreeMap<PolarWord, Frac>,
}

impl PolarElem {
    pub fn zero(src: usize, tgt: usize) -> Self {
        PolarElem { src, tgt, terms: BTreeMap::new() }
    }

    pub fn identity(r: usize) -> Self {
        PolarElem::from_word(PolarWord::identity(r))
    }

    pub fn from_word(w: PolarWord) -> Self {
        PolarElem::term(w, Frac::one())
    }

    pub fn term(w: PolarWord, c: Frac) -> Self {
        let mut e = PolarElem::zero(w.src, w.tgt);
        e.add_term(w, c);
        e
    }

    pub fn gen(g: PolarGen) -> Result<Self> {
        Ok(PolarElem::from_word(PolarWord::gen(g)?))
    }

    /// Words from generators listed in composition order (leftmost applied
    /// last), matching the text grammar.
    pub fn product(gens: &[PolarGen]) -> Result<Self> {
        let app: Vec<PolarGen> = gens.iter().rev().copied().collect();
        let src = app.first().map(|g| g.source()).ok_or_else(|| Error::Parse("empty product".into()))?;
        Ok(PolarElem::from_word(PolarWord::new(src, app)?))
    }

    pub fn from_brauer(b: &BrauerElem) -> Result<Self> {
        let mut out = PolarElem::zero(b.bot(), b.top());
        for (d, c) in b.terms() {
            out.add_term(diagram_word(d)?, c.clone());
        }
        Ok(out)
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn tgt(&self) -> usize {
        self.tgt
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolarWord, &Frac)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: PolarWord, c: Frac) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&w) {
            Some(a) => &a + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(w, v);
        }
    }

    fn check_shape(&self, o: &PolarElem) -> Result<()> {
        if self.src != o.src {
            return Err(Error::RankMismatch(self.src, o.src));
        }
        if self.tgt != o.tgt {
            return Err(Error::RankMismatch(self.tgt, o.tgt));
        }
        Ok(())
    }

    pub fn add(&self, o: &PolarElem) -> Result<Self> {
        self.check_shape(o)?;
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &PolarElem) -> Result<Self> {
        self.add(&o.scale(&Frac::int(-1)))
    }

    pub fn scale(&self, c: &Frac) -> Self {
        let mut out = PolarElem::zero(self.src, self.tgt);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// `self ∘ o` (free concatenation, no rewriting).
    pub fn compose(&self, o: &PolarElem) -> Result<Self> {
        if self.src != o.tgt {
            return Err(Error::RankMismatch(self.src, o.tgt));
        }
        let mut out = PolarElem::zero(o.src, self.tgt);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.compose(b)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        if self.src != self.tgt {
            return Err(Error::RankMismatch(self.src, self.tgt));
        }
        let mut out = PolarElem::identity(self.src);
        for _ in 0..e {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &PolarElem) -> Result<Self> {
        self.compose(o)?.sub(&o.compose(self)?)
    }

    /// Substitute each generator by an element (used by the affine layer).
    pub fn substitute(&self, f: &dyn Fn(&PolarGen) -> Result<PolarElem>) -> Result<PolarElem> {
        let mut out = PolarElem::zero(self.src, self.tgt);
        for (w, c) in &self.terms {
            let mut acc = PolarElem::identity(w.src);
            for g in &w.gens {
                acc = f(g)?.compose(&acc)?;
            }
            out = out.add(&acc.scale(c))?;
        }
        Ok(out)
    }
}

impl fmt::Display for PolarElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0*ID@{}", self.src);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| if c.is_one() { w.to_string() } else { format!("({c})*{w}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Word realising a Brauer diagram.
pub fn diagram_word(d: &BrauerDiagram) -> Result<PolarWord> {
    let gens = brauer::diagram_steps(d).iter().map(PolarGen::from_step).collect();
    PolarWord::new(d.bot(), gens)
}

/// `ℍ_{0j}(r)`: the connector moved to strand `j` by conjugation.
pub fn hh(j: usize, r: usize) -> Result<PolarElem> {
    if j == 0 || j > r {
        return Err(Error::IndexOutOfRange { index: j, rank: r });
    }
    let mut gens = Vec::new();
    for i in (1..j).rev() {
        gens.push(PolarGen::S { i, r });
    }
    gens.push(PolarGen::D { r });
    for i in 1..j {
        gens.push(PolarGen::S { i, r });
    }
    Ok(PolarElem::from_word(PolarWord::new(r, gens)?))
}

/// `ℍ_{aj}(r)` for `0 ≤ a < j`; for `a ≥ 1` this is the Brauer element
/// `X_{aj} − E_{aj}`.
pub fn hh_pair(a: usize, j: usize, r: usize) -> Result<PolarElem> {
    if a == 0 {
        return hh(j, r);
    }
    PolarElem::from_brauer(&brauer::h_ij(a, j, r)?)
}

/// `ϑ_j(r) = Σ_{0≤a<j} ℍ_{aj}(r)`.
pub fn vartheta(j: usize, r: usize) -> Result<PolarElem> {
    let mut out = hh(j, r)?;
    for a in 1..j {
        out = out.add(&hh_pair(a, j, r)?)?;
    }
    Ok(out)
}

/// The closure `Z_l` as an element of `End(r)` (acting as `Z_l ⊗ I_r`).
pub fn z_elem(l: u32, r: usize) -> Result<PolarElem> {
    PolarElem::gen(PolarGen::Z { l, r })
}

/// `Π(ℍ^l ⊗ I)⨿` spelled out with cup, connectors and cap.
pub fn z_word(l: u32) -> Result<PolarElem> {
    let mut gens = vec![PolarGen::Cup { i: 1, r: 2 }];
    gens.extend(std::iter::repeat(PolarGen::D { r: 2 }).take(l as usize));
    gens.push(PolarGen::Cap { i: 1, r: 2 });
    Ok(PolarElem::from_word(PolarWord::new(0, gens)?))
}

/// Transpose of an endomorphism of `1`, obtained by rotating it onto the
/// second strand of rank 3.
pub fn transpose1(a: &PolarElem) -> Result<PolarElem> {
    if a.src != 1 || a.tgt != 1 {
        return Err(Error::RankMismatch(a.src, 1));
    }
    let mut moved = PolarElem::zero(3, 3);
    for (w, c) in a.terms() {
        let mut acc = PolarElem::identity(3);
        for g in w.gens() {
            let step = match *g {
                PolarGen::D { r: 1 } => hh(2, 3)?,
                PolarGen::Z { l, r: 1 } => z_elem(l, 3)?,
                _ => return Err(Error::Parse(format!("transpose1 expects D and Z only, found {g}"))),
            };
            acc = step.compose(&acc)?;
        }
        moved = moved.add(&acc.scale(c))?;
    }
    let cup = PolarElem::gen(PolarGen::Cup { i: 2, r: 3 })?;
    let cap = PolarElem::gen(PolarGen::Cap { i: 1, r: 3 })?;
    cap.compose(&moved)?.compose(&cup)
}

/// `ℍ^k` in `End(1)`.
pub fn h_power(k: u32) -> Result<PolarElem> {
    PolarElem::gen(PolarGen::D { r: 1 })?.pow(k)
}

/// `Y_l = ϑ_l(r) + ((1−δ)/2)·I_r`.
pub fn affine_y(l: usize, r: usize) -> Result<PolarElem> {
    let c = Frac::from((Poly::int(1) - Poly::delta()).scale(&crate::scalars::ratio(1, 2)));
    vartheta(l, r)?.add(&PolarElem::identity(r).scale(&c))
}

fn half_one_minus_delta() -> Frac {
    Frac::from((Poly::int(1) - Poly::delta()).scale(&crate::scalars::ratio(1, 2)))
}

/// Generator of the affine presentation: Brauer generators plus `Y` on the
/// first strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AffineGen {
    Brauer(PolarGen),
    Y { r: usize },
}

impl fmt::Display for AffineGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineGen::Brauer(g) => write!(f, "{g}"),
            AffineGen::Y { r } => write!(f, "Y@{r}"),
        }
    }
}

/// Element of the affine presentation: `(coefficient, generators in
/// application order)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineElem {
    pub src: usize,
    pub tgt: usize,
    pub terms: BTreeMap<Vec<AffineGen>, Frac>,
}

impl AffineElem {
    fn add_term(&mut self, w: Vec<AffineGen>, c: Frac) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&w) {
            Some(a) => &a + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(w, v);
        }
    }
}

/// Rewrite with `D = Y_1 − ((1−δ)/2)·I`. Brauer generators map to
/// themselves; `Z` generators are kept as Brauer-slice scalars.
pub fn to_affine(a: &PolarElem) -> AffineElem {
    let c = half_one_minus_delta();
    let mut out = AffineElem { src: a.src, tgt: a.tgt, terms: BTreeMap::new() };
    for (w, coef) in &a.terms {
        let mut partial: Vec<(Vec<AffineGen>, Frac)> = vec![(Vec::new(), coef.clone())];
        for g in &w.gens {
            let mut next = Vec::new();
            for (ws, k) in partial {
                match *g {
                    PolarGen::D { r } => {
                        let mut w1 = ws.clone();
                        w1.push(AffineGen::Y { r });
                        next.push((w1, k.clone()));
                        next.push((ws, -(&k * &c)));
                    }
                    _ => {
                        let mut w1 = ws;
                        w1.push(AffineGen::Brauer(*g));
                        next.push((w1, k));
                    }
                }
            }
            partial = next;
        }
        for (ws, k) in partial {
            out.add_term(ws, k);
        }
    }
    out
}

/// Inverse of [`to_affine`]: `Y_1 = D + ((1−δ)/2)·I`.
pub fn from_affine(a: &AffineElem) -> Result<PolarElem> {
    let c = half_one_minus_delta();
    let mut out = PolarElem::zero(a.src, a.tgt);
    for (ws, coef) in &a.terms {
        let mut acc = PolarElem::term(PolarWord::identity(a.src), coef.clone());
        for g in ws {
            let step = match *g {
                AffineGen::Brauer(p) => PolarElem::gen(p)?,
                AffineGen::Y { r } => PolarElem::gen(PolarGen::D { r })?.add(&PolarElem::identity(r).scale(&c))?,
            };
            acc = step.compose(&acc)?;
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Connector diagrams

/// Matching on boundary points and connector ports. Boundary labels follow
/// [`BrauerDiagram`]; connector `k` has ports `b + 2k` (in) and `b + 2k + 1`
/// (out), with `b = bot + top`. Connector order is pole order, connector 0
/// applied first. Cycles through connector ports only are closed loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cd {
    bot: usize,
    top: usize,
    n: usize,
    adj: Vec<usize>,
}

/// Pair up terminals through degree-two internal nodes. Returns the
/// terminal pairing and the number of internal-only cycles.
fn contract(n_term: usize, n_nodes: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    const NONE: usize = usize::MAX;
    let mut inc = vec![[NONE; 2]; n_nodes];
    for (e, &(u, v)) in edges.iter().enumerate() {
        for x in [u, v] {
            let slot = if inc[x][0] == NONE { 0 } else { 1 };
            debug_assert!(inc[x][slot] == NONE, "node degree exceeded");
            inc[x][slot] = e;
        }
    }
    let other_end = |e: usize, x: usize| if edges[e].0 == x { edges[e].1 } else { edges[e].0 };
    let other_edge = |x: usize, e: usize| if inc[x][0] == e { inc[x][1] } else { inc[x][0] };
    let mut used = vec![false; edges.len()];
    let mut pair = vec![NONE; n_term];
    for t in 0..n_term {
        if pair[t] != NONE {
            continue;
        }
        let mut cur = t;
        let mut e = inc[t][0];
        loop {
            used[e] = true;
            let nxt = other_end(e, cur);
            if nxt < n_term {
                pair[t] = nxt;
                pair[nxt] = t;
                break;
            }
            e = other_edge(nxt, e);
            cur = nxt;
        }
    }
    let mut cycles = 0;
    for e0 in 0..edges.len() {
        if used[e0] {
            continue;
        }
        cycles += 1;
        let mut e = e0;
        let mut cur = edges[e0].0;
        loop {
            used[e] = true;
            let nxt = other_end(e, cur);
            let e2 = other_edge(nxt, e);
            if used[e2] {
                break;
            }
            e = e2;
            cur = nxt;
        }
    }
    (pair, cycles)
}

#[derive(Debug, Clone)]
struct Plan {
    /// Connectors in target order with a reversal flag.
    order: Vec<(usize, bool)>,
    /// Sizes of the loop components (these come first in `order`).
    loops: Vec<usize>,
}

impl Cd {
    fn b(&self) -> usize {
        self.bot + self.top
    }

    fn cin(&self, k: usize) -> usize {
        self.b() + 2 * k
    }

    fn cout(&self, k: usize) -> usize {
        self.b() + 2 * k + 1
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn connectors(&self) -> usize {
        self.n
    }

    pub fn identity(r: usize) -> Cd {
        Cd::from_brauer(&BrauerDiagram::identity(r))
    }

    pub fn from_brauer(d: &BrauerDiagram) -> Cd {
        Cd { bot: d.bot(), top: d.top(), n: 0, adj: d.pairing().to_vec() }
    }

    /// Connector on the first strand of rank `r`.
    pub fn connector(r: usize) -> Cd {
        let b = 2 * r;
        let mut adj = vec![0; b + 2];
        for i in 1..r {
            adj[i] = r + i;
            adj[r + i] = i;
        }
        adj[0] = b;
        adj[b] = 0;
        adj[b + 1] = r;
        adj[r] = b + 1;
        Cd { bot: r, top: r, n: 1, adj }
    }

    /// Identity of rank `r` together with a loop of `l` connectors.
    pub fn bubble(l: usize, r: usize) -> Cd {
        let mut c = Cd::identity(r);
        if l == 0 {
            return c;
        }
        let b = 2 * r;
        c.n = l;
        c.adj.resize(b + 2 * l, 0);
        for k in 0..l {
            let out = b + 2 * k + 1;
            let nin = b + 2 * ((k + 1) % l);
            c.adj[out] = nin;
            c.adj[nin] = out;
        }
        c
    }

    /// `self ∘ b` (`b` first); returns loops without connectors separately.
    pub fn compose(&self, b: &Cd) -> Result<(Cd, usize)> {
        if self.bot != b.top {
            return Err(Error::RankMismatch(self.bot, b.top));
        }
        let (r, s, t) = (b.bot, b.top, self.top);
        let n_term = r + t + 2 * (b.n + self.n);
        let n_nodes = n_term + 2 * s;
        let mb = |p: usize| {
            if p < r {
                p
            } else if p < r + s {
                n_term + (p - r)
            } else {
                r + t + (p - r - s)
            }
        };
        let ma = |p: usize| {
            if p < s {
                n_term + s + p
            } else if p < s + t {
                r + (p - s)
            } else {
                r + t + 2 * b.n + (p - s - t)
            }
        };
        let mut edges = Vec::with_capacity(n_nodes);
        for p in 0..b.adj.len() {
            if p < b.adj[p] {
                edges.push((mb(p), mb(b.adj[p])));
            }
        }
        for p in 0..self.adj.len() {
            if p < self.adj[p] {
                edges.push((ma(p), ma(self.adj[p])));
            }
        }
        for m in 0..s {
            edges.push((n_term + m, n_term + s + m));
        }
        let (adj, loops) = contract(n_term, n_nodes, &edges);
        Ok((Cd { bot: r, top: t, n: b.n + self.n, adj }, loops))
    }

    fn remap(&self, f: impl Fn(usize) -> usize) -> Cd {
        let mut adj = vec![0; self.adj.len()];
        for p in 0..self.adj.len() {
            adj[f(p)] = f(self.adj[p]);
        }
        Cd { bot: self.bot, top: self.top, n: self.n, adj }
    }

    fn swap_adjacent(&self, k: usize) -> Cd {
        let (lo, hi) = (self.cin(k), self.cin(k + 1));
        self.remap(|p| {
            if p == lo || p == lo + 1 {
                p + 2
            } else if p == hi || p == hi + 1 {
                p - 2
            } else {
                p
            }
        })
    }

    fn flip(&self, k: usize) -> Cd {
        let (i, o) = (self.cin(k), self.cout(k));
        self.remap(|p| if p == i { o } else if p == o { i } else { p })
    }

    /// Remove connectors `0..m`, which must close up among themselves.
    fn drop_prefix(&self, m: usize) -> Cd {
        let b = self.b();
        let cut = b + 2 * m;
        let mut adj = vec![0; self.adj.len() - 2 * m];
        for p in (0..b).chain(cut..self.adj.len()) {
            let q = self.adj[p];
            debug_assert!(q < b || q >= cut);
            let f = |x: usize| if x < b { x } else { x - 2 * m };
            adj[f(p)] = f(q);
        }
        Cd { bot: self.bot, top: self.top, n: self.n - m, adj }
    }

    /// Walk from a port along a strand until a boundary point; records the
    /// connectors met and whether each was entered through its out-port.
    fn walk(&self, start: usize) -> (Vec<(usize, bool)>, usize) {
        let b = self.b();
        let mut seq = Vec::new();
        let mut cur = self.adj[start];
        while cur >= b {
            let k = (cur - b) / 2;
            let entered_in = (cur - b) % 2 == 0;
            seq.push((k, !entered_in));
            let exit = if entered_in { self.cout(k) } else { self.cin(k) };
            cur = self.adj[exit];
        }
        (seq, cur)
    }

    fn plan(&self) -> Plan {
        let b = self.b();
        let mut seen = vec![false; self.n];
        let mut done = vec![false; b];
        let mut open = Vec::new();
        for p in 0..b {
            if done[p] {
                continue;
            }
            let (mut seq, end) = self.walk(p);
            done[p] = true;
            done[end] = true;
            if p >= self.bot {
                // cup: traverse from the far end toward the anchor
                seq.reverse();
                for x in seq.iter_mut() {
                    x.1 = !x.1;
                }
            }
            for &(k, _) in &seq {
                seen[k] = true;
            }
            open.extend(seq);
        }
        let mut order = Vec::new();
        let mut loops = Vec::new();
        for k0 in 0..self.n {
            if seen[k0] {
                continue;
            }
            seen[k0] = true;
            let mut seq = vec![(k0, false)];
            let mut cur = self.adj[self.cout(k0)];
            while cur != self.cin(k0) {
                let k = (cur - b) / 2;
                let entered_in = (cur - b) % 2 == 0;
                seen[k] = true;
                seq.push((k, !entered_in));
                cur = self.adj[if entered_in { self.cout(k) } else { self.cin(k) }];
            }
            loops.push(seq.len());
            order.extend(seq);
        }
        order.extend(open);
        Plan { order, loops }
    }

    /// The correction term obtained by deleting connector `k` and joining
    /// its site to connector `k+1` by `X` (`cross`) or `E`, either after or
    /// before connector `k+1`.
    fn correction(&self, k: usize, after: bool, cross: bool) -> (Cd, usize) {
        let b = self.b();
        let n_term = b + 2 * (self.n - 1);
        let (alo, ahi, blo, bhi) = (n_term, n_term + 1, n_term + 2, n_term + 3);
        let map = |p: usize| {
            if p < b {
                return p;
            }
            let (j, side) = ((p - b) / 2, (p - b) % 2);
            match j.cmp(&k) {
                std::cmp::Ordering::Less => b + 2 * j + side,
                std::cmp::Ordering::Equal => n_term + side,
                std::cmp::Ordering::Greater => b + 2 * (j - 1) + side,
            }
        };
        let cp = if after { self.cout(k + 1) } else { self.cin(k + 1) };
        let partner = self.adj[cp];
        let mut edges = Vec::with_capacity(self.adj.len() / 2 + 3);
        for p in 0..self.adj.len() {
            let q = self.adj[p];
            if p < q && p != cp && q != cp {
                edges.push((map(p), map(q)));
            }
        }
        if after {
            edges.push((map(cp), blo));
            edges.push((bhi, map(partner)));
        } else {
            edges.push((map(partner), blo));
            edges.push((bhi, map(cp)));
        }
        if cross {
            edges.push((alo, bhi));
            edges.push((blo, ahi));
        } else {
            edges.push((alo, blo));
            edges.push((ahi, bhi));
        }
        let (adj, loops) = contract(n_term, n_term + 4, &edges);
        (Cd { bot: self.bot, top: self.top, n: self.n - 1, adj }, loops)
    }

    /// Underlying Brauer diagram and connector counts per strand anchor.
    pub fn dotted(&self) -> DottedDiagram {
        let b = self.b();
        let mut pair = vec![usize::MAX; b];
        let mut dots = BTreeMap::new();
        for p in 0..b {
            if pair[p] != usize::MAX {
                continue;
            }
            let (seq, end) = self.walk(p);
            pair[p] = end;
            pair[end] = p;
            if !seq.is_empty() {
                dots.insert(p.min(end), seq.len() as u32);
            }
        }
        let diagram = BrauerDiagram::new(self.bot, self.top, pair).expect("strands form a matching");
        DottedDiagram { diagram, dots }
    }

    fn is_normal(&self) -> bool {
        let p = self.plan();
        p.loops.is_empty() && p.order.iter().enumerate().all(|(i, &(k, rev))| i == k && !rev)
    }
}

// ---------------------------------------------------------------------------
// Normal forms

/// Brauer diagram with connector counts on strands, keyed by the 0-based
/// minimal endpoint label of each strand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DottedDiagram {
    pub diagram: BrauerDiagram,
    pub dots: BTreeMap<usize, u32>,
}

impl DottedDiagram {
    pub fn total_dots(&self) -> u32 {
        self.dots.values().sum()
    }

    /// Word `T ∘ d ∘ B`: bottom-anchored dots first, then the diagram, then
    /// dots on cups.
    pub fn word(&self) -> Result<PolarElem> {
        let (r, s) = (self.diagram.bot(), self.diagram.top());
        let mut out = PolarElem::identity(r);
        for (&a, &k) in self.dots.range(..r) {
            out = hh(a + 1, r)?.pow(k)?.compose(&out)?;
        }
        out = PolarElem::from_word(diagram_word(&self.diagram)?).compose(&out)?;
        for (&a, &k) in self.dots.range(r..) {
            out = hh(a - r + 1, s)?.pow(k)?.compose(&out)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let mut dots = serde_json::Map::new();
        for (&a, &k) in &self.dots {
            let e = self.diagram.partner(a);
            dots.insert(format!("{}-{}", a + 1, e + 1), json!(k));
        }
        json!({"diagram": self.diagram.to_json(), "dots": dots})
    }
}

impl fmt::Display for DottedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.diagram)?;
        for (&a, &k) in &self.dots {
            write!(f, "•{}^{}", a + 1, k)?;
        }
        Ok(())
    }
}

/// Normal form of a morphism `src → tgt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    src: usize,
    tgt: usize,
    terms: BTreeMap<Cd, Frac>,
}

impl NormalForm {
    pub fn zero(src: usize, tgt: usize) -> Self {
        NormalForm { src, tgt, terms: BTreeMap::new() }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn tgt(&self) -> usize {
        self.tgt
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, cd: Cd, c: Frac) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&cd) {
            Some(a) => &a + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(cd, v);
        }
    }

    pub fn terms(&self) -> Vec<(DottedDiagram, Frac)> {
        self.terms.iter().map(|(cd, c)| (cd.dotted(), c.clone())).collect()
    }

    pub fn coeff_of(&self, d: &DottedDiagram) -> Frac {
        self.terms.iter().find(|(cd, _)| &cd.dotted() == d).map(|(_, c)| c.clone()).unwrap_or_else(Frac::zero)
    }

    /// Embed back into the category as a combination of words.
    pub fn to_elem(&self) -> Result<PolarElem> {
        let mut out = PolarElem::zero(self.src, self.tgt);
        for (cd, c) in &self.terms {
            out = out.add(&cd.dotted().word()?.scale(c))?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(cd, c)| {
                    let mut v = cd.dotted().to_json();
                    v["coeff"] = Value::String(c.to_string());
                    v
                })
                .collect(),
        )
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(cd, c)| format!("({c})·{}", cd.dotted())).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

type CdSum = BTreeMap<Cd, Poly>;

fn add_into(acc: &mut CdSum, cd: Cd, c: Poly) {
    if c.is_zero() {
        return;
    }
    let v = match acc.remove(&cd) {
        Some(a) => &a + &c,
        None => c,
    };
    if !v.is_zero() {
        acc.insert(cd, v);
    }
}

/// Rewriting engine with a memo table shared across calls.
pub struct Engine {
    memo: HashMap<Cd, CdSum>,
    zmemo: HashMap<u32, Poly>,
    budget: usize,
    steps: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(DEFAULT_BUDGET)
    }
}

impl Engine {
    pub fn new(budget: usize) -> Self {
        Engine { memo: HashMap::new(), zmemo: HashMap::new(), budget, steps: 0 }
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
    }

    /// Rewrite steps used by the most recent call.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn normalize(&mut self, a: &PolarElem) -> Result<NormalForm> {
        self.steps = 0;
        let mut out = NormalForm::zero(a.src, a.tgt);
        for (w, c) in &a.terms {
            let (cd, loops) = w.cd()?;
            let scale = c * &Frac::delta().pow(loops as u32);
            let nf = self.nf_cd(&cd).map_err(|e| match e {
                Error::NonTermination { budget, terms, .. } => {
                    Error::NonTermination { budget, terms, partial: out.to_string() }
                }
                e => e,
            })?;
            for (k, v) in nf {
                out.add_term(k, &scale * &Frac::from(v));
            }
        }
        Ok(out)
    }

    /// Ring element represented by the closure `Z_l`.
    pub fn z_closure(&mut self, l: u32) -> Result<Poly> {
        if l == 0 {
            return Ok(Poly::delta());
        }
        if l == 1 {
            return Ok(Poly::zero());
        }
        if l % 2 == 0 {
            return Ok(Poly::z(l));
        }
        if let Some(p) = self.zmemo.get(&l) {
            return Ok(p.clone());
        }
        // normal form of (ℍ^l)^T in End(1): strand order opposite to pole order
        let n = l as usize;
        let mut adj = vec![0; 2 + 2 * n];
        let link = |adj: &mut Vec<usize>, a: usize, b: usize| {
            adj[a] = b;
            adj[b] = a;
        };
        let (cin, cout) = (|k: usize| 2 + 2 * k, |k: usize| 3 + 2 * k);
        link(&mut adj, 0, cout(n - 1));
        for k in (1..n).rev() {
            link(&mut adj, cin(k), cout(k - 1));
        }
        link(&mut adj, cin(0), 1);
        let cd = Cd { bot: 1, top: 1, n, adj };
        let nf = self.nf_cd(&cd)?;
        let mut rhs = Poly::zero();
        for (k, c) in nf {
            let i = k.n as u32;
            if i == l {
                if c != Poly::int(-1) {
                    return Err(Error::SolveUnderdetermined(format!("leading coefficient {c} for l = {l}")));
                }
                continue;
            }
            rhs = &rhs + &(&c * &self.z_closure(i)?);
        }
        let z = rhs.scale(&crate::scalars::ratio(1, 2));
        self.zmemo.insert(l, z.clone());
        Ok(z)
    }

    fn nf_cd(&mut self, cd: &Cd) -> Result<CdSum> {
        if let Some(v) = self.memo.get(cd) {
            return Ok(v.clone());
        }
        let plan = cd.plan();
        let mut cur = cd.clone();
        let mut sign = Poly::one();
        let mut tgt = vec![0; cd.n];
        for (pos, &(k, rev)) in plan.order.iter().enumerate() {
            tgt[k] = pos;
            if rev {
                cur = cur.flip(k);
                sign = -sign;
            }
        }
        let mut out = CdSum::new();
        loop {
            let Some(k) = (0..cd.n.saturating_sub(1)).find(|&k| tgt[k] > tgt[k + 1]) else { break };
            self.steps += 1;
            if self.steps > self.budget {
                return Err(Error::NonTermination { budget: self.budget, terms: out.len(), partial: String::new() });
            }
            for (after, cross, s) in [(true, true, 1), (true, false, -1), (false, true, -1), (false, false, 1)] {
                let (c2, loops) = cur.correction(k, after, cross);
                let f = sign.scale(&crate::scalars::rat(s)) * Poly::delta().pow(loops as u32);
                for (kk, v) in self.nf_cd(&c2)? {
                    add_into(&mut out, kk, &f * &v);
                }
            }
            cur = cur.swap_adjacent(k);
            tgt.swap(k, k + 1);
        }
        let mut coef = sign;
        let mut removed = 0;
        for &l in &plan.loops {
            if l == 1 {
                coef = Poly::zero();
                break;
            }
            coef = &coef * &self.z_closure(l as u32)?;
            removed += l;
        }
        if !coef.is_zero() {
            add_into(&mut out, cur.drop_prefix(removed), coef);
        }
        debug_assert!(out.keys().all(|k| k.is_normal()));
        self.memo.insert(cd.clone(), out.clone());
        Ok(out)
    }
}

/// Normalize with a fresh engine and the default budget.
pub fn normalize(a: &PolarElem) -> Result<NormalForm> {
    Engine::default().normalize(a)
}

/// `z_closure(l)` with a fresh engine.
pub fn z_closure(l: u32) -> Result<Poly> {
    Engine::default().z_closure(l)
}

/// Named relations of the polar category, each expected to vanish.
pub fn relation_battery(rmax: usize) -> Result<Vec<(String, PolarElem)>> {
    let mut out: Vec<(String, PolarElem)> = Vec::new();
    let d1 = PolarElem::gen(PolarGen::D { r: 1 })?;
    let i1 = PolarElem::identity(1);
    let delta = Frac::delta();

    out.push(("Z_1 = 0".into(), z_word(1)?));
    let two_minus_delta = Frac::from(Poly::int(2) - Poly::delta());
    out.push(("2Z_3 = (2-δ)Z_2".into(), z_word(3)?.scale(&Frac::int(2)).sub(&z_word(2)?.scale(&two_minus_delta))?));
    let h2t = transpose1(&h_power(2)?)?;
    let rhs = h_power(2)?.add(&d1.scale(&(&delta - &Frac::int(2))))?;
    out.push(("(H^2)^T = H^2 + (δ-2)H".into(), h2t.sub(&rhs)?));
    out.push(("H^T = -H".into(), transpose1(&d1)?.add(&d1)?));

    // Φ = (1−δ)I − ℍ, G_l = Z_l ⊗ I − ℍ^l
    let phi = i1.scale(&(&Frac::one() - &delta)).sub(&d1)?;
    for l in 0..=4u32 {
        let g = if l == 0 {
            i1.scale(&(&delta - &Frac::one()))
        } else {
            z_elem(l, 1)?.sub(&h_power(l)?)?
        };
        let hl1 = transpose1(&h_power(l + 1)?)?;
        let hl = if l == 0 { i1.clone() } else { transpose1(&h_power(l)?)? };
        out.push((format!("HT-1 l={l}"), hl1.sub(&hl.compose(&phi)?)?.sub(&g)?));
        out.push((format!("HT-2 l={l}"), hl1.sub(&phi.compose(&hl)?)?.sub(&g)?));
    }
    for k in 1..=5u32 {
        for l in 1..=(6 - k) {
            let a = h_power(k)?;
            let b = transpose1(&h_power(l)?)?;
            out.push((format!("[H^{k}, (H^{l})^T] = 0"), a.commutator(&b)?));
        }
    }
    for l in 1..=3u32 {
        let sum = (1..l).try_fold(PolarElem::zero(1, 1), |acc, i| {
            let phi_pow = phi.pow(l - i)?;
            acc.add(&z_elem(i, 1)?.compose(&phi_pow)?.sub(&phi_pow.compose(&z_elem(i, 1)?)?)?)
        })?;
        out.push((format!("Σ[Z_i⊗I, Φ^(l-i)] = 0 l={l}"), sum));
    }
    for l in [2u32, 3, 4] {
        for r in 1..=2 {
            for j in 1..=r {
                out.push((format!("[Z_{l}, H_0{j}({r})] = 0"), z_elem(l, r)?.commutator(&hh(j, r)?)?));
            }
        }
    }
    let four = hh(1, 2)?.add(&hh(2, 2)?)?.commutator(&hh_pair(1, 2, 2)?)?;
    out.push(("[H01+H02, H12] = 0".into(), four));
    out.push((
        "[H01, H02+H12] = 0".into(),
        hh(1, 2)?.commutator(&hh(2, 2)?.add(&hh_pair(1, 2, 2)?)?)?,
    ));

    for r in 2..=rmax {
        let e1 = PolarElem::gen(PolarGen::E { i: 1, r })?;
        for l in 1..=3u32 {
            let lhs = e1.compose(&vartheta(1, r)?.pow(l)?)?.compose(&e1)?;
            out.push((format!("JM-1 r={r} l={l}"), lhs.sub(&z_elem(l, r)?.compose(&e1)?)?));
        }
        for i in 1..=r {
            for j in i + 1..=r {
                out.push((format!("JM-2 r={r} i={i} j={j}"), vartheta(i, r)?.commutator(&vartheta(j, r)?)?));
            }
        }
        for k in 1..r {
            let s = PolarElem::gen(PolarGen::S { i: k, r })?;
            let e = PolarElem::gen(PolarGen::E { i: k, r })?;
            let id = PolarElem::identity(r);
            for j in 1..=r {
                if j != k && j != k + 1 {
                    out.push((format!("JM-3 r={r} k={k} j={j}"), s.commutator(&vartheta(j, r)?)?));
                    out.push((format!("JM-4 r={r} k={k} j={j}"), e.commutator(&vartheta(j, r)?)?));
                }
            }
            let tk = vartheta(k, r)?;
            let tk1 = vartheta(k + 1, r)?;
            let e_minus_i = e.sub(&id)?;
            out.push((format!("JM-5 r={r} k={k}"), s.compose(&tk)?.sub(&tk1.compose(&s)?)?.sub(&e_minus_i)?));
            out.push((format!("JM-6 r={r} k={k}"), tk.compose(&s)?.sub(&s.compose(&tk1)?)?.sub(&e_minus_i)?));
            let sum = tk.add(&tk1)?;
            let one_minus_delta = &Frac::one() - &delta;
            out.push((format!("JM-7 r={r} k={k}"), e.compose(&sum)?.sub(&e.scale(&one_minus_delta))?));
            out.push((format!("JM-8 r={r} k={k}"), sum.compose(&e)?.sub(&e.scale(&one_minus_delta))?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(r: usize) -> PolarElem {
        PolarElem::gen(PolarGen::D { r }).unwrap()
    }

    #[test]
    fn contract_counts_cycles() {
        // two terminals joined through a chain, plus a separate 2-cycle
        let edges = [(0, 2), (2, 3), (3, 1), (4, 5), (5, 4)];
        let (pair, cycles) = contract(2, 6, &edges);
        assert_eq!(pair, vec![1, 0]);
        assert_eq!(cycles, 1);
    }

    #[test]
    fn z1_vanishes_and_z3() {
        assert!(normalize(&z_word(1).unwrap()).unwrap().is_zero());
        let z3 = z_closure(3).unwrap();
        let expect = (Poly::int(2) - Poly::delta()).scale(&crate::scalars::ratio(1, 2)) * Poly::z(2);
        assert_eq!(z3, expect);
        let nf = normalize(&z_word(2).unwrap()).unwrap();
        assert_eq!(nf.terms().len(), 1);
        assert_eq!(nf.terms()[0].1, Frac::from(Poly::z(2)));
    }

    #[test]
    fn transpose_square() {
        let lhs = normalize(&transpose1(&h_power(2).unwrap()).unwrap()).unwrap();
        let rhs = normalize(&h_power(2).unwrap().add(&d(1).scale(&(Frac::delta() - Frac::int(2)))).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hh_is_single_dot() {
        for r in 1..=4 {
            for j in 1..=r {
                let nf = normalize(&hh(j, r).unwrap()).unwrap();
                let terms = nf.terms();
                assert_eq!(terms.len(), 1);
                assert!(terms[0].1.is_one());
                assert_eq!(terms[0].0.dots, BTreeMap::from([(j - 1, 1)]));
            }
        }
    }

    #[test]
    fn battery_normalizes_to_zero() {
        let mut eng = Engine::default();
        for (name, rel) in relation_battery(3).unwrap() {
            let nf = eng.normalize(&rel).unwrap();
            assert!(nf.is_zero(), "{name}: {nf}");
        }
    }

    #[test]
    fn affine_roundtrip() {
        let w = hh(2, 3).unwrap().compose(&d(3)).unwrap().add(&PolarElem::identity(3)).unwrap();
        assert_eq!(from_affine(&to_affine(&w)).unwrap(), w);
        let y1 = affine_y(1, 2).unwrap();
        let c = half_one_minus_delta();
        assert_eq!(y1, d(2).add(&PolarElem::identity(2).scale(&c)).unwrap());
    }

    #[test]
    fn normal_form_is_fixed() {
        let w = PolarElem::product(&[
            PolarGen::Cap { i: 2, r: 4 },
            PolarGen::D { r: 4 },
            PolarGen::S { i: 1, r: 4 },
            PolarGen::D { r: 4 },
            PolarGen::S { i: 3, r: 4 },
            PolarGen::D { r: 4 },
        ])
        .unwrap();
        let mut eng = Engine::default();
        let nf = eng.normalize(&w).unwrap();
        assert_eq!(eng.normalize(&nf.to_elem().unwrap()).unwrap(), nf);
    }
}
