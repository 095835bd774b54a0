//! Polar Temperley–Lieb calculus: planar diagrams whose arcs facing the pole
//! may carry one connector, subject to `x² = a x + c` with `a = (2−δ)/2` and
//! `c = z₂/δ`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::brauer::{enumerate_basis, generator_diagram, BrauerDiagram, GenKind};
use crate::error::{Error, Result};
use crate::polar::{diagram_word, hh, DottedDiagram, PolarElem, PolarGen};
use crate::scalars::{rat, Frac, Poly, Rational, Var};
use crate::superlin::{Oracle, Osp, PoleModule, SVec, TruncVerma};

/// Planar diagram with a set of dotted arcs, keyed by their lowest label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blob {
    pub diagram: BrauerDiagram,
    pub dots: BTreeSet<usize>,
}

/// Per arc anchor: whether no other arc separates it from the pole.
pub fn exposed_arcs(d: &BrauerDiagram) -> BTreeMap<usize, bool> {
    let (r, n) = (d.bot(), d.bot() + d.top());
    let pos = |p: usize| if p < r { p } else { r + (n - 1 - p) };
    let mut at = vec![0; n];
    for p in 0..n {
        at[pos(p)] = p;
    }
    let mut out = BTreeMap::new();
    let mut depth = 0usize;
    for &p in &at {
        let q = d.partner(p);
        if pos(q) > pos(p) {
            out.insert(p.min(q), depth == 0);
            depth += 1;
        } else {
            depth -= 1;
        }
    }
    out
}

impl Blob {
    pub fn plain(diagram: BrauerDiagram) -> Blob {
        Blob { diagram, dots: BTreeSet::new() }
    }

    pub fn new(diagram: BrauerDiagram, dots: BTreeSet<usize>) -> Result<Blob> {
        if !diagram.is_planar() {
            return Err(Error::UnsupportedParameter("diagram is not planar".into()));
        }
        let exp = exposed_arcs(&diagram);
        if dots.iter().any(|a| exp.get(a) != Some(&true)) {
            return Err(Error::UnsupportedParameter("connector on a hidden arc".into()));
        }
        Ok(Blob { diagram, dots })
    }

    pub fn bot(&self) -> usize {
        self.diagram.bot()
    }

    pub fn top(&self) -> usize {
        self.diagram.top()
    }

    pub fn connectors(&self) -> usize {
        self.dots.len()
    }

    fn dot(&self, p: usize) -> u32 {
        self.dots.contains(&p.min(self.diagram.partner(p))) as u32
    }

    pub fn to_dotted(&self) -> DottedDiagram {
        DottedDiagram { diagram: self.diagram.clone(), dots: self.dots.iter().map(|&a| (a, 1)).collect() }
    }

    /// Polar lift with every connector drawn without crossings: bottom dots
    /// left to right, then the diagram, then top dots right to left.
    pub fn to_polar(&self) -> Result<PolarElem> {
        let (r, s) = (self.bot(), self.top());
        let mut out = PolarElem::identity(r);
        for &a in self.dots.range(..r) {
            out = hh(a + 1, r)?.compose(&out)?;
        }
        out = PolarElem::from_word(diagram_word(&self.diagram)?).compose(&out)?;
        for &a in self.dots.range(r..).rev() {
            out = hh(a - r + 1, s)?.compose(&out)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.diagram.to_json();
        let mut conn = serde_json::Map::new();
        for (a, _) in exposed_arcs(&self.diagram) {
            let b = self.diagram.partner(a);
            conn.insert(format!("{}-{}", a + 1, b + 1), json!(self.dots.contains(&a) as u32));
        }
        v["planar"] = json!(true);
        v["connectors"] = Value::Object(conn);
        v
    }
}

impl fmt::Display for Blob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.diagram)?;
        for a in &self.dots {
            write!(f, "•{}", a + 1)?;
        }
        Ok(())
    }
}

/// Linear combination of blob diagrams.
#[derive(Clone, Debug, PartialEq)]
pub struct PtlElem {
    src: usize,
    tgt: usize,
    terms: BTreeMap<Blob, Frac>,
}

impl PtlElem {
    pub fn zero(src: usize, tgt: usize) -> Self {
        PtlElem { src, tgt, terms: BTreeMap::new() }
    }

    pub fn from_blob(b: Blob) -> Self {
        let mut e = PtlElem::zero(b.bot(), b.top());
        e.terms.insert(b, Frac::one());
        e
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

    pub fn terms(&self) -> impl Iterator<Item = (&Blob, &Frac)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &Blob) -> Frac {
        self.terms.get(b).cloned().unwrap_or_else(Frac::zero)
    }

    pub fn max_connectors(&self) -> usize {
        self.terms.keys().map(Blob::connectors).max().unwrap_or(0)
    }

    fn add_term(&mut self, b: Blob, c: Frac) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&b) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(b, v);
        }
    }

    pub fn add(&self, o: &PtlElem) -> Result<PtlElem> {
        if (self.src, self.tgt) != (o.src, o.tgt) {
            return Err(Error::RankMismatch(self.src, o.src));
        }
        let mut out = self.clone();
        for (b, c) in &o.terms {
            out.add_term(b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Frac) -> PtlElem {
        let mut out = PtlElem::zero(self.src, self.tgt);
        for (b, v) in &self.terms {
            out.add_term(b.clone(), v * c);
        }
        out
    }

    /// Polar element whose image under the quotient is `self`.
    pub fn to_polar(&self) -> Result<PolarElem> {
        let mut out = PolarElem::zero(self.src, self.tgt);
        for (b, c) in &self.terms {
            out = out.add(&b.to_polar()?.scale(c))?;
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Frac) -> Result<Frac>) -> Result<PtlElem> {
        let mut out = PtlElem::zero(self.src, self.tgt);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> =
            self.terms.iter().map(|(b, c)| json!({"coeff": c.to_string(), "diagram": b.to_json()})).collect();
        json!({"src": self.src, "tgt": self.tgt, "planar": true, "terms": terms})
    }
}

impl fmt::Display for PtlElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{b}")?;
        }
        Ok(())
    }
}

/// Parameters of the quotient: `δ` (symbolic or a nonzero rational other
/// than 2) and the reduction data for powers of a connector.
#[derive(Clone, Debug)]
pub struct Ptl {
    delta: Frac,
    a: Frac,
    c: Frac,
    /// `x^k = p_k x + q_k`.
    pq: Vec<(Frac, Frac)>,
}

impl Ptl {
    pub fn symbolic() -> Ptl {
        Ptl::with_delta(Frac::delta()).expect("symbolic delta")
    }

    pub fn with_delta(delta: Frac) -> Result<Ptl> {
        if delta.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if delta.as_rational() == Some(rat(2)) {
            return Err(Error::UnsupportedParameter("delta = 2".into()));
        }
        let a = (&Frac::int(2) - &delta).scale(&Rational::new(1.into(), 2.into()));
        let c = Frac::from(Poly::z(2)).div(&delta)?;
        Ok(Ptl { delta, a, c, pq: vec![(Frac::zero(), Frac::one())] })
    }

    pub fn delta(&self) -> &Frac {
        &self.delta
    }

    fn pq(&mut self, k: usize) -> (Frac, Frac) {
        while self.pq.len() <= k {
            let (p, q) = self.pq.last().unwrap().clone();
            self.pq.push((&(&self.a * &p) + &q, &self.c * &p));
        }
        self.pq[k].clone()
    }

    /// Value of a closed loop carrying `k` connectors.
    pub fn loop_value(&mut self, k: usize) -> Frac {
        let q = self.pq(k).1;
        &self.delta * &q
    }

    /// Stack `b` on top of `a`.
    pub fn compose_blobs(&mut self, b: &Blob, a: &Blob) -> Result<PtlElem> {
        let (r, s, t) = (a.bot(), a.top(), b.top());
        if b.bot() != s {
            return Err(Error::RankMismatch(b.bot(), s));
        }
        let mut seen_mid = vec![false; s];
        let mut arcs: Vec<((usize, usize), u32)> = Vec::new();
        let mut loops: Vec<u32> = Vec::new();
        // true: in `a`, label as in `a`; false: in `b`
        let walk = |mut in_a: bool, mut p: usize, seen: &mut Vec<bool>| -> (Option<usize>, u32) {
            let mut dots = 0;
            loop {
                if in_a {
                    let q = a.diagram.partner(p);
                    dots += a.dot(p);
                    if q < r {
                        return (Some(q), dots);
                    }
                    let m = q - r;
                    if seen[m] {
                        return (None, dots);
                    }
                    seen[m] = true;
                    in_a = false;
                    p = m;
                } else {
                    let q = b.diagram.partner(p);
                    dots += b.dot(p);
                    if q >= s {
                        return (Some(r + q - s), dots);
                    }
                    if seen[q] {
                        return (None, dots);
                    }
                    seen[q] = true;
                    in_a = true;
                    p = r + q;
                }
            }
        };
        let mut done = vec![false; r + t];
        for start in 0..r + t {
            if done[start] {
                continue;
            }
            let (end, dots) = if start < r {
                walk(true, start, &mut seen_mid)
            } else {
                walk(false, s + start - r, &mut seen_mid)
            };
            let end = end.expect("open strand ends on the boundary");
            done[start] = true;
            done[end] = true;
            arcs.push(((start, end), dots));
        }
        for m in 0..s {
            if !seen_mid[m] {
                seen_mid[m] = true;
                let (_, dots) = walk(true, r + m, &mut seen_mid);
                loops.push(dots);
            }
        }
        let pairs: Vec<(usize, usize)> = arcs.iter().map(|x| x.0).collect();
        let diagram = BrauerDiagram::from_pairs(r, t, &pairs)?;
        let mut scalar = Frac::one();
        for k in loops {
            scalar = &scalar * &self.loop_value(k as usize);
        }
        let mut partial: Vec<(BTreeSet<usize>, Frac)> = vec![(BTreeSet::new(), scalar)];
        for ((p, q), k) in arcs {
            if k == 0 {
                continue;
            }
            let (pk, qk) = self.pq(k as usize);
            let anchor = p.min(q);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (set, c) in partial {
                if !pk.is_zero() {
                    let mut s2 = set.clone();
                    s2.insert(anchor);
                    next.push((s2, &c * &pk));
                }
                if !qk.is_zero() {
                    next.push((set, &c * &qk));
                }
            }
            partial = next;
        }
        let mut out = PtlElem::zero(r, t);
        for (dots, c) in partial {
            out.add_term(Blob { diagram: diagram.clone(), dots }, c);
        }
        Ok(out)
    }

    /// `b ∘ a`.
    pub fn compose(&mut self, b: &PtlElem, a: &PtlElem) -> Result<PtlElem> {
        if b.src != a.tgt {
            return Err(Error::RankMismatch(b.src, a.tgt));
        }
        let mut out = PtlElem::zero(a.src, b.tgt);
        for (bb, cb) in &b.terms {
            for (ba, ca) in &a.terms {
                let cab = cb * ca;
                for (blob, c) in self.compose_blobs(bb, ba)?.terms {
                    out.add_term(blob, &c * &cab);
                }
            }
        }
        Ok(out)
    }

    pub fn identity(&self, r: usize) -> PtlElem {
        PtlElem::from_blob(Blob::plain(BrauerDiagram::identity(r)))
    }

    /// Image of a single generator.
    pub fn generator(&mut self, g: &PolarGen) -> Result<PtlElem> {
        g.validate()?;
        let plain = |k: GenKind, i: usize, r: usize| -> Result<PtlElem> {
            Ok(PtlElem::from_blob(Blob::plain(generator_diagram(k, i, r)?)))
        };
        Ok(match *g {
            PolarGen::Id { r } => self.identity(r),
            PolarGen::S { i, r } => {
                let two_over = Frac::int(2).div(&self.delta)?;
                plain(GenKind::E, i, r)?.scale(&two_over).add(&self.identity(r).scale(&Frac::int(-1)))?
            }
            PolarGen::E { i, r } => plain(GenKind::E, i, r)?,
            PolarGen::Cap { i, r } => plain(GenKind::Cap, i, r)?,
            PolarGen::Cup { i, r } => plain(GenKind::Cup, i, r)?,
            PolarGen::D { r } => {
                let mut dots = BTreeSet::new();
                dots.insert(0);
                PtlElem::from_blob(Blob { diagram: BrauerDiagram::identity(r), dots })
            }
            PolarGen::Z { l, r } => {
                let v = self.loop_value(l as usize);
                self.identity(r).scale(&v)
            }
        })
    }

    /// Image of a polar element in the quotient.
    pub fn project(&mut self, e: &PolarElem) -> Result<PtlElem> {
        let mut out = PtlElem::zero(e.src(), e.tgt());
        for (w, c) in e.terms() {
            let mut cur = self.identity(w.src());
            for g in w.gens() {
                let gi = self.generator(g)?;
                cur = self.compose(&gi, &cur)?;
            }
            let c = match (c.num().vars().is_empty(), c.den().vars().is_empty()) {
                (true, true) => c.clone(),
                _ => self.bind_delta(c)?,
            };
            out = out.add(&cur.scale(&c))?;
        }
        Ok(out)
    }

    fn bind_delta(&self, c: &Frac) -> Result<Frac> {
        match self.delta.as_rational() {
            Some(d) => {
                let mut b = HashMap::new();
                b.insert(Var::Delta, d);
                c.specialize(&b)
            }
            None => Ok(c.clone()),
        }
    }
}

/// Image of a polar element with symbolic `δ`.
pub fn project_ptl(e: &PolarElem) -> Result<PtlElem> {
    Ptl::symbolic().project(e)
}

/// Blob basis of `Hom(r, s)`: planar matchings with any subset of exposed
/// arcs dotted.
pub fn standard_basis(r: usize, s: usize) -> Result<Vec<Blob>> {
    let mut out = Vec::new();
    for d in enumerate_basis(r, s)? {
        if !d.is_planar() {
            continue;
        }
        let open: Vec<usize> = exposed_arcs(&d).into_iter().filter(|x| x.1).map(|x| x.0).collect();
        for mask in 0u32..(1 << open.len()) {
            let dots = open.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect();
            out.push(Blob { diagram: d.clone(), dots });
        }
    }
    Ok(out)
}

pub fn ptl_rank(r: usize, s: usize) -> Result<usize> {
    Ok(standard_basis(r, s)?.len())
}

/// Rank over ℚ of the projections, at δ = −2 and `z₂ = z2`, of every
/// Brauer diagram `r → s` carrying at most one connector per strand.
/// Equals `ptl_rank(r, s)` exactly when the projection is onto.
pub fn projected_span_rank(r: usize, s: usize, z2: &Rational) -> Result<usize> {
    let basis = standard_basis(r, s)?;
    let index: HashMap<&Blob, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut ptl = Ptl::with_delta(Frac::int(-2))?;
    let mut bind = HashMap::new();
    bind.insert(Var::Z(2), z2.clone());
    bind.insert(Var::Delta, rat(-2));
    let mut ech = crate::linalg::Echelon::new(basis.len());
    let mut dot_cache: HashMap<(usize, usize), PtlElem> = HashMap::new();
    let mut dot = |ptl: &mut Ptl, j: usize, n: usize| -> Result<PtlElem> {
        if let Some(p) = dot_cache.get(&(j, n)) {
            return Ok(p.clone());
        }
        let p = ptl.project(&hh(j, n)?)?;
        dot_cache.insert((j, n), p.clone());
        Ok(p)
    };
    for d in enumerate_basis(r, s)? {
        let anchors: Vec<usize> = d.pairs().iter().map(|&(a, b)| a.min(b)).collect();
        let pd = ptl.project(&PolarElem::from_word(diagram_word(&d)?))?;
        for mask in 0u32..(1 << anchors.len()) {
            // same factorization as DottedDiagram::word
            let mut p = ptl.identity(r);
            let chosen = anchors.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a);
            let (bot, top): (Vec<usize>, Vec<usize>) = chosen.partition(|&a| a < r);
            for a in bot {
                let x = dot(&mut ptl, a + 1, r)?;
                p = ptl.compose(&x, &p)?;
            }
            p = ptl.compose(&pd, &p)?;
            for a in top {
                let x = dot(&mut ptl, a - r + 1, s)?;
                p = ptl.compose(&x, &p)?;
            }
            let mut row = vec![Rational::zero(); basis.len()];
            for (b, c) in p.terms() {
                let i = *index.get(b).ok_or_else(|| Error::Parse(format!("{b} is not a basis blob")))?;
                row[i] = c.eval(&bind)?;
            }
            ech.insert(&row);
            if ech.is_full() {
                return Ok(ech.rank());
            }
        }
    }
    Ok(ech.rank())
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `Σ_i [C(2N, N−i) − C(2N, N−i−1)]`.
pub fn filtration_rank(n: u64) -> u128 {
    (0..=n).map(|i| binomial(2 * n, n - i) - if i < n { binomial(2 * n, n - i - 1) } else { 0 }).sum()
}

/// Value of `z₂` in the type-B specialization.
pub fn tlb_z2(delta0: &Frac, lambda: &Frac) -> Frac {
    let half = Rational::new(1.into(), 2.into());
    let inner = &(&delta0.clone() - &Frac::int(2)).scale(&half) - lambda;
    &(&(-delta0) * lambda) * &inner
}

/// Substitute `δ ↦ δ₀` and `z₂ ↦ −δ₀λ((δ₀−2)/2 − λ)`.
pub fn tlb_specialize(a: &PtlElem, delta0: &Rational, lambda: &Frac) -> Result<PtlElem> {
    if delta0.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let d = Frac::rational(delta0.clone());
    let mut b = HashMap::new();
    b.insert(Var::Delta, Poly::constant(delta0.clone()));
    let z2 = tlb_z2(&d, lambda);
    a.map_coeffs(|c| {
        let c = c.substitute(&b)?;
        let num = frac_subst_z2(c.num(), &z2)?;
        let den = frac_subst_z2(c.den(), &z2)?;
        num.div(&den)
    })
}

fn frac_subst_z2(p: &Poly, z2: &Frac) -> Result<Frac> {
    let mut out = Frac::zero();
    for (m, c) in p.terms() {
        let e = m.exp(Var::Z(2));
        let rest = Frac::from(Poly::monomial(m.without(Var::Z(2)), c.clone()));
        out = &out + &(&rest * &z2.pow(e));
    }
    Ok(out)
}

/// Oracle for `sp₂` with the truncated Verma module `M_λ` on the pole.
pub fn verma_oracle(lambda: Rational, cutoff: usize, window: usize) -> Result<Oracle<TruncVerma>> {
    let osp = Osp::build(0, 1)?;
    let mut o = Oracle::new(osp, TruncVerma::new(lambda.clone(), cutoff, window));
    o.bind(Var::Lambda, lambda);
    Ok(o)
}

/// Rank over ℚ of the images of `standard_basis(0, 2N)` under the Verma
/// functor, evaluated on `m_0 … m_{2N}`.
pub fn verma_image_rank(n: usize, lambda: Rational) -> Result<(usize, usize)> {
    let basis = standard_basis(0, 2 * n)?;
    let o = verma_oracle(lambda, 4 * n + 2, 2 * n)?;
    let inputs: Vec<SVec> = o
        .pole.window()
        .into_iter()
        .map(|m| {
            let mut v = SVec::new();
            v.insert(vec![m], rat(1));
            v
        })
        .collect();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut keys: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    let mut images = Vec::new();
    for b in &basis {
        let e = b.to_polar()?;
        let mut img = Vec::new();
        for (i, x) in inputs.iter().enumerate() {
            for (k, c) in o.apply(&e, x)? {
                let n_keys = keys.len();
                let idx = *keys.entry((i, k)).or_insert(n_keys);
                img.push((idx, c));
            }
        }
        images.push(img);
    }
    for img in images {
        let mut row = vec![Rational::zero(); keys.len()];
        for (i, c) in img {
            row[i] = c;
        }
        rows.push(row);
    }
    Ok((crate::linalg::rank_of(&rows), basis.len()))
}

/// Witness map `m_0 ⊗ e₂^{⊗2t} ↦ M_λ` built from `t` connectors on the left
/// legs of nested caps. Returns the image as `(k, coefficient)` pairs.
pub fn tlb_witness(t: usize, lambda: Rational) -> Result<Vec<(usize, Rational)>> {
    let r = 2 * t;
    let mut e = PolarElem::identity(r);
    for j in 1..=t {
        e = crate::polar::hh(j, r)?.compose(&e)?;
    }
    for k in (1..=t).rev() {
        e = PolarElem::gen(PolarGen::Cap { i: k, r: 2 * k })?.compose(&e)?;
    }
    let o = verma_oracle(lambda, t + 2, 0)?;
    let mut key = vec![0];
    key.extend(std::iter::repeat(1).take(r));
    let mut x = SVec::new();
    x.insert(key, rat(1));
    let mut out: Vec<(usize, Rational)> = o.apply(&e, &x)?.into_iter().map(|(k, c)| (k[0], c)).collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exposure() {
        let d = BrauerDiagram::from_pairs(0, 4, &[(0, 3), (1, 2)]).unwrap();
        let e = exposed_arcs(&d);
        assert_eq!(e[&0], true);
        assert_eq!(e[&1], false);
        let id = BrauerDiagram::identity(3);
        let e = exposed_arcs(&id);
        assert_eq!(e.values().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn small_ranks() {
        assert_eq!(ptl_rank(0, 2).unwrap(), 2);
        assert_eq!(ptl_rank(0, 4).unwrap(), 6);
        assert_eq!(ptl_rank(1, 3).unwrap(), 6);
        assert!(matches!(ptl_rank(0, 3), Err(Error::OddBoundary(_))));
    }

    #[test]
    fn parameters() {
        assert!(matches!(Ptl::with_delta(Frac::int(0)), Err(Error::DivisionByZero)));
        assert!(matches!(Ptl::with_delta(Frac::int(2)), Err(Error::UnsupportedParameter(_))));
    }
}
