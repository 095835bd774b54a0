//! The Brauer category: diagrams, composition with loop removal, tensor
//! product, generators and the Temperley–Lieb element.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use num_traits::{One, Zero};

use crate::linalg::Mat;
use crate::scalars::{rat, ratio, Frac, Poly, Rational, Var};
use crate::superlin::{brauer_matrix, Osp};

/// Perfect matching on `bot + top` points. Labels `0..bot` are the bottom
/// row left to right, `bot..bot+top` the top row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrauerDiagram {
    bot: usize,
    top: usize,
    pair: Vec<usize>,
}

impl BrauerDiagram {
    pub fn new(bot: usize, top: usize, pair: Vec<usize>) -> Result<Self> {
        let n = bot + top;
        if n % 2 == 1 {
            return Err(Error::OddBoundary(n));
        }
        if pair.len() != n {
            return Err(Error::DimensionMismatch(pair.len(), n));
        }
        for (i, &j) in pair.iter().enumerate() {
            if j >= n || j == i || pair[j] != i {
                return Err(Error::Parse(format!("not a perfect matching at {i}")));
            }
        }
        Ok(BrauerDiagram { bot, top, pair })
    }

    /// Build from 0-based label pairs.
    pub fn from_pairs(bot: usize, top: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut pair = vec![usize::MAX; bot + top];
        for &(a, b) in pairs {
            if a >= pair.len() || b >= pair.len() {
                return Err(Error::IndexOutOfRange { index: a.max(b), rank: bot + top });
            }
            pair[a] = b;
            pair[b] = a;
        }
        if pair.contains(&usize::MAX) {
            return Err(Error::Parse("unpaired point".into()));
        }
        BrauerDiagram::new(bot, top, pair)
    }

    pub fn identity(r: usize) -> Self {
        let mut pair = vec![0; 2 * r];
        for i in 0..r {
            pair[i] = r + i;
            pair[r + i] = i;
        }
        BrauerDiagram { bot: r, top: r, pair }
    }

    /// Permutation diagram: bottom `p` joined to top `sigma[p]`.
    pub fn permutation(sigma: &[usize]) -> Self {
        let r = sigma.len();
        let mut pair = vec![0; 2 * r];
        for (p, &q) in sigma.iter().enumerate() {
            pair[p] = r + q;
            pair[r + q] = p;
        }
        BrauerDiagram { bot: r, top: r, pair }
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn partner(&self, p: usize) -> usize {
        self.pair[p]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pair
    }

    pub fn is_bottom(&self, p: usize) -> bool {
        p < self.bot
    }

    /// Sorted 0-based pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.pair.len()).filter(|&i| i < self.pair[i]).map(|i| (i, self.pair[i])).collect()
    }

    pub fn through_count(&self) -> usize {
        (0..self.bot).filter(|&i| self.pair[i] >= self.bot).count()
    }

    /// `self ∘ other` (other applied first); returns the diagram and the
    /// number of closed loops.
    pub fn compose(&self, other: &BrauerDiagram) -> Result<(BrauerDiagram, usize)> {
        if self.bot != other.top {
            return Err(Error::RankMismatch(self.bot, other.top));
        }
        let (r, s, t) = (other.bot, other.top, self.top);
        let n = r + t;
        let mut pair = vec![usize::MAX; n];
        let mut seen = vec![false; s];
        // result label -> (is_upper_diagram, local port)
        let start = |x: usize| if x < r { (false, x) } else { (true, s + (x - r)) };
        let out_label = |upper: bool, p: usize| if upper { r + (p - s) } else { p };
        for x in 0..n {
            if pair[x] != usize::MAX {
                continue;
            }
            let (mut upper, mut port) = start(x);
            loop {
                if upper {
                    let q = self.pair[port];
                    if q >= s {
                        let y = out_label(true, q);
                        pair[x] = y;
                        pair[y] = x;
                        break;
                    }
                    seen[q] = true;
                    upper = false;
                    port = r + q;
                } else {
                    let q = other.pair[port];
                    if q < r {
                        pair[x] = q;
                        pair[q] = x;
                        break;
                    }
                    let m = q - r;
                    seen[m] = true;
                    upper = true;
                    port = m;
                }
            }
        }
        let mut loops = 0;
        for m0 in 0..s {
            if seen[m0] {
                continue;
            }
            loops += 1;
            let mut m = m0;
            loop {
                seen[m] = true;
                let a = self.pair[m];
                seen[a] = true;
                let b = other.pair[r + a] - r;
                if b == m0 {
                    break;
                }
                m = b;
            }
        }
        Ok((BrauerDiagram { bot: r, top: t, pair }, loops))
    }

    pub fn tensor(&self, o: &BrauerDiagram) -> BrauerDiagram {
        let (r, s) = (self.bot + o.bot, self.top + o.top);
        // map each operand label to the combined label
        let ma = |p: usize| if p < self.bot { p } else { r + (p - self.bot) };
        let mb = |p: usize| if p < o.bot { self.bot + p } else { r + self.top + (p - o.bot) };
        let mut pair = vec![0; r + s];
        for p in 0..self.pair.len() {
            pair[ma(p)] = ma(self.pair[p]);
        }
        for p in 0..o.pair.len() {
            pair[mb(p)] = mb(o.pair[p]);
        }
        BrauerDiagram { bot: r, top: s, pair }
    }

    /// Whether the matching is crossingless with all points on one line
    /// (bottom left to right, then top right to left).
    pub fn is_planar(&self) -> bool {
        let n = self.bot + self.top;
        let pos = |p: usize| if p < self.bot { p } else { self.bot + (n - 1 - p) };
        let mut at = vec![0; n];
        for p in 0..n {
            at[pos(p)] = p;
        }
        let mut stack: Vec<usize> = Vec::new();
        for k in 0..n {
            let p = at[k];
            let q = pos(self.pair[p]);
            if q > k {
                stack.push(k);
            } else if stack.pop() != Some(q) {
                return false;
            }
        }
        true
    }

    pub fn to_json(&self) -> Value {
        let pairs: Vec<[usize; 2]> = self.pairs().iter().map(|&(a, b)| [a + 1, b + 1]).collect();
        json!({"bot": self.bot, "top": self.top, "pairs": pairs})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("diagram json".into());
        let bot = v["bot"].as_u64().ok_or_else(bad)? as usize;
        let top = v["top"].as_u64().ok_or_else(bad)? as usize;
        let mut pairs = Vec::new();
        for p in v["pairs"].as_array().ok_or_else(bad)? {
            let a = p[0].as_u64().ok_or_else(bad)? as usize;
            let b = p[1].as_u64().ok_or_else(bad)? as usize;
            if a == 0 || b == 0 {
                return Err(bad());
            }
            pairs.push((a - 1, b - 1));
        }
        BrauerDiagram::from_pairs(bot, top, &pairs)
    }
}

impl fmt::Display for BrauerDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.pairs().iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
        write!(f, "[{}->{}: {}]", self.bot, self.top, ps.join(" "))
    }
}

/// All perfect matchings on `r + s` points, in lexicographic order.
pub fn enumerate_basis(r: usize, s: usize) -> Result<Vec<BrauerDiagram>> {
    let n = r + s;
    if n % 2 == 1 {
        return Err(Error::OddBoundary(n));
    }
    let mut out = Vec::new();
    let mut pair = vec![usize::MAX; n];
    fn rec(pair: &mut Vec<usize>, r: usize, s: usize, out: &mut Vec<BrauerDiagram>) {
        let Some(i) = pair.iter().position(|&x| x == usize::MAX) else {
            out.push(BrauerDiagram { bot: r, top: s, pair: pair.clone() });
            return;
        };
        for j in i + 1..pair.len() {
            if pair[j] == usize::MAX {
                pair[i] = j;
                pair[j] = i;
                rec(pair, r, s, out);
                pair[i] = usize::MAX;
                pair[j] = usize::MAX;
            }
        }
    }
    rec(&mut pair, r, s, &mut out);
    Ok(out)
}

/// `(n-1)!!` for even `n`.
pub fn double_factorial_count(n: usize) -> u128 {
    (1..n).step_by(2).map(|k| k as u128).product()
}

/// Formal combination of diagrams sharing a shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerElem {
    bot: usize,
    top: usize,
    terms: BTreeMap<BrauerDiagram, Frac>,
}

impl BrauerElem {
    pub fn zero(bot: usize, top: usize) -> Self {
        BrauerElem { bot, top, terms: BTreeMap::new() }
    }

    pub fn from_diagram(d: BrauerDiagram) -> Self {
        BrauerElem::term(d, Frac::one())
    }

    pub fn term(d: BrauerDiagram, c: Frac) -> Self {
        let mut e = BrauerElem::zero(d.bot, d.top);
        e.add_term(d, c);
        e
    }

    pub fn identity(r: usize) -> Self {
        BrauerElem::from_diagram(BrauerDiagram::identity(r))
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BrauerDiagram, &Frac)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, d: &BrauerDiagram) -> Frac {
        self.terms.get(d).cloned().unwrap_or_else(Frac::zero)
    }

    pub fn add_term(&mut self, d: BrauerDiagram, c: Frac) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&d) {
            Some(a) => &a + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(d, v);
        }
    }

    pub fn scale(&self, c: &Frac) -> Self {
        let mut out = BrauerElem::zero(self.bot, self.top);
        for (d, a) in &self.terms {
            out.add_term(d.clone(), a * c);
        }
        out
    }

    pub fn add(&self, o: &BrauerElem) -> Result<Self> {
        if (self.bot, self.top) != (o.bot, o.top) {
            return Err(Error::RankMismatch(self.bot + self.top, o.bot + o.top));
        }
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.add_term(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &BrauerElem) -> Result<Self> {
        self.add(&o.scale(&Frac::int(-1)))
    }

    /// `self ∘ o`: `o` applied first. Each closed loop gives a factor δ.
    pub fn compose(&self, o: &BrauerElem) -> Result<Self> {
        if self.bot != o.top {
            return Err(Error::RankMismatch(self.bot, o.top));
        }
        let mut out = BrauerElem::zero(o.bot, self.top);
        let delta = Frac::delta();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let (d, loops) = a.compose(b)?;
                out.add_term(d, &(ca * cb) * &delta.pow(loops as u32));
            }
        }
        Ok(out)
    }

    pub fn tensor(&self, o: &BrauerElem) -> Self {
        let mut out = BrauerElem::zero(self.bot + o.bot, self.top + o.top);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.tensor(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = BrauerElem::identity(self.bot);
        for _ in 0..e {
            out = out.compose(self)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &BrauerElem) -> Result<Self> {
        self.compose(o)?.sub(&o.compose(self)?)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(d, c)| {
                    let mut v = d.to_json();
                    v["coeff"] = Value::String(c.to_string());
                    v
                })
                .collect(),
        )
    }
}

impl fmt::Display for BrauerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(d, c)| format!("({c})·{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    S,
    E,
    H,
    Cap,
    Cup,
    Id,
}

/// Diagram of an elementary generator. For `Cup` the rank `r` is the
/// target; otherwise it is the source. Indices are 1-based.
pub fn generator_diagram(kind: GenKind, i: usize, r: usize) -> Result<BrauerDiagram> {
    let oob = || Error::IndexOutOfRange { index: i, rank: r };
    match kind {
        GenKind::Id => Ok(BrauerDiagram::identity(r)),
        GenKind::S => {
            if i == 0 || i + 1 > r {
                return Err(oob());
            }
            let mut sigma: Vec<usize> = (0..r).collect();
            sigma.swap(i - 1, i);
            Ok(BrauerDiagram::permutation(&sigma))
        }
        GenKind::E => {
            if i == 0 || i + 1 > r {
                return Err(oob());
            }
            let mut ps: Vec<(usize, usize)> = (0..r).filter(|&k| k + 1 != i && k != i).map(|k| (k, r + k)).collect();
            ps.push((i - 1, i));
            ps.push((r + i - 1, r + i));
            BrauerDiagram::from_pairs(r, r, &ps)
        }
        GenKind::Cap => {
            if i == 0 || i + 1 > r {
                return Err(oob());
            }
            let t = r - 2;
            let mut ps = vec![(i - 1, i)];
            let mut k = 0;
            for b in 0..r {
                if b + 1 != i && b != i {
                    ps.push((b, r + k));
                    k += 1;
                }
            }
            BrauerDiagram::from_pairs(r, t, &ps)
        }
        GenKind::Cup => {
            if r < 2 || i == 0 || i + 1 > r {
                return Err(oob());
            }
            let s = r - 2;
            let mut ps = vec![(s + i - 1, s + i)];
            let mut k = 0;
            for tp in 0..r {
                if tp + 1 != i && tp != i {
                    ps.push((k, s + tp));
                    k += 1;
                }
            }
            BrauerDiagram::from_pairs(s, r, &ps)
        }
        GenKind::H => Err(Error::Parse("H is not a single diagram".into())),
    }
}

/// Generator as an element; `H_i = s_i − e_i`.
pub fn generator(kind: GenKind, i: usize, r: usize) -> Result<BrauerElem> {
    match kind {
        GenKind::H => {
            let s = BrauerElem::from_diagram(generator_diagram(GenKind::S, i, r)?);
            let e = BrauerElem::from_diagram(generator_diagram(GenKind::E, i, r)?);
            s.sub(&e)
        }
        _ => Ok(BrauerElem::from_diagram(generator_diagram(kind, i, r)?)),
    }
}

/// `Θ = X + I − (2/δ)E` in `B_2`.
pub fn theta() -> BrauerElem {
    let two_over_delta = Frac::new(Poly::int(2), Poly::delta()).expect("δ ≠ 0 symbolically");
    let x = generator(GenKind::S, 1, 2).unwrap();
    let e = generator(GenKind::E, 1, 2).unwrap();
    x.add(&BrauerElem::identity(2)).unwrap().sub(&e.scale(&two_over_delta)).unwrap()
}

/// `H_{ij}` in `B_r` (1-based, `i < j`): transposition minus the
/// contraction of strands `i` and `j`.
pub fn h_ij(i: usize, j: usize, r: usize) -> Result<BrauerElem> {
    if !(1 <= i && i < j && j <= r) {
        return Err(Error::IndexOutOfRange { index: j, rank: r });
    }
    let mut sigma: Vec<usize> = (0..r).collect();
    sigma.swap(i - 1, j - 1);
    let x = BrauerDiagram::permutation(&sigma);
    let mut ps: Vec<(usize, usize)> = (0..r).filter(|&k| k != i - 1 && k != j - 1).map(|k| (k, r + k)).collect();
    ps.push((i - 1, j - 1));
    ps.push((r + i - 1, r + j - 1));
    let e = BrauerDiagram::from_pairs(r, r, &ps)?;
    BrauerElem::from_diagram(x).sub(&BrauerElem::from_diagram(e))
}

/// Elementary factorisation step used by the diagram-to-word conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub kind: GenKind,
    pub i: usize,
    /// Source rank for `S`, `E`, `Cap`; target rank for `Cup`.
    pub r: usize,
}

/// Adjacent transpositions realising `sigma` (bottom `p` to top `sigma[p]`),
/// in application order.
pub fn permutation_steps(sigma: &[usize]) -> Vec<Step> {
    let r = sigma.len();
    let mut cur: Vec<usize> = (0..r).collect();
    let mut out = Vec::new();
    loop {
        let Some(k) = (0..r.saturating_sub(1)).find(|&k| sigma[cur[k]] > sigma[cur[k + 1]]) else { break };
        cur.swap(k, k + 1);
        out.push(Step { kind: GenKind::S, i: k + 1, r });
    }
    out
}

/// Factor `d` as permutation, caps, cups, permutation (application order).
pub fn diagram_steps(d: &BrauerDiagram) -> Vec<Step> {
    let (r, s) = (d.bot, d.top);
    let mut through: Vec<(usize, usize)> = Vec::new();
    let mut caps: Vec<(usize, usize)> = Vec::new();
    let mut cups: Vec<(usize, usize)> = Vec::new();
    for (a, b) in d.pairs() {
        if b < r {
            caps.push((a, b));
        } else if a >= r {
            cups.push((a - r, b - r));
        } else {
            through.push((a, b - r));
        }
    }
    through.sort_by_key(|&(_, t)| t);
    let t = through.len();
    let mut sigma = vec![0; r];
    for (k, &(b, _)) in through.iter().enumerate() {
        sigma[b] = k;
    }
    for (j, &(a, b)) in caps.iter().enumerate() {
        sigma[a] = t + 2 * j;
        sigma[b] = t + 2 * j + 1;
    }
    let mut out = permutation_steps(&sigma);
    let mut rank = r;
    for _ in 0..caps.len() {
        out.push(Step { kind: GenKind::Cap, i: t + 1, r: rank });
        rank -= 2;
    }
    for _ in 0..cups.len() {
        rank += 2;
        out.push(Step { kind: GenKind::Cup, i: t + 1, r: rank });
    }
    let mut rho = vec![0; s];
    for (k, &(_, tp)) in through.iter().enumerate() {
        rho[k] = tp;
    }
    // the cup created last sits leftmost
    for (j, &(a, b)) in cups.iter().rev().enumerate() {
        rho[t + 2 * j] = a;
        rho[t + 2 * j + 1] = b;
    }
    out.extend(permutation_steps(&rho));
    out
}

/// Evaluate a step list back to a diagram.
pub fn steps_diagram(steps: &[Step], r: usize) -> Result<BrauerDiagram> {
    let mut cur = BrauerDiagram::identity(r);
    for st in steps {
        let g = generator_diagram(st.kind, st.i, st.r)?;
        let (d, loops) = g.compose(&cur)?;
        debug_assert_eq!(loops, 0);
        cur = d;
    }
    Ok(cur)
}

/// `Σ(m) = Σ_σ sgn(σ) σ` in `B_m`.
pub fn antisymmetrizer(m: usize) -> BrauerElem {
    let mut out = BrauerElem::zero(m, m);
    let mut perm: Vec<usize> = (0..m).collect();
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut BrauerElem) {
        if k <= 1 {
            let sign = permutation_sign(a);
            out.add_term(BrauerDiagram::permutation(a), Frac::int(sign));
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    heap(m, &mut perm, &mut out);
    out
}

pub fn permutation_sign(a: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] > a[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Named Brauer relations, each evaluated to an element that must vanish.
pub fn four_term_checks(r: usize) -> Result<Vec<(String, BrauerElem)>> {
    let mut out = Vec::new();
    let triples: Vec<(usize, usize, usize)> = (1..=r)
        .flat_map(|a| (a + 1..=r).flat_map(move |b| (b + 1..=r).map(move |c| (a, b, c))))
        .collect();
    for (a, b, c) in triples {
        let hab = h_ij(a, b, r)?;
        let hac = h_ij(a, c, r)?;
        let hbc = h_ij(b, c, r)?;
        out.push((format!("[H{a}{b}, H{a}{c}+H{b}{c}] (r={r})"), hab.commutator(&hac.add(&hbc)?)?));
        out.push((format!("[H{a}{b}+H{a}{c}, H{b}{c}] (r={r})"), hab.add(&hac)?.commutator(&hbc)?));
    }
    Ok(out)
}

/// `(H−1)(H+1)(H−(1−δ))` in `B_2`.
pub fn cubic_h() -> BrauerElem {
    let h = generator(GenKind::H, 1, 2).unwrap();
    let id = BrauerElem::identity(2);
    let one_minus_delta = Frac::from(&Poly::int(1) - &Poly::delta());
    let a = h.sub(&id).unwrap();
    let b = h.add(&id).unwrap();
    let c = h.sub(&id.scale(&one_minus_delta)).unwrap();
    a.compose(&b).unwrap().compose(&c).unwrap()
}

/// Nested cap `Cap(m): 2m → 0` pairing point `i` with `2m−1−i`.
pub fn nested_cap(m: usize) -> BrauerDiagram {
    let ps: Vec<(usize, usize)> = (0..m).map(|i| (i, 2 * m - 1 - i)).collect();
    BrauerDiagram::from_pairs(2 * m, 0, &ps).expect("nested cap")
}

/// Nested cup `Cup(m): 0 → 2m`.
pub fn nested_cup(m: usize) -> BrauerDiagram {
    let ps: Vec<(usize, usize)> = (0..m).map(|i| (i, 2 * m - 1 - i)).collect();
    BrauerDiagram::from_pairs(0, 2 * m, &ps).expect("nested cup")
}

/// Closure `Cap(m)(A ⊗ I(m))Cup(m)` of an endomorphism of `m`.
pub fn closure(a: &BrauerElem) -> Result<Frac> {
    let m = a.bot();
    if a.top() != m {
        return Err(Error::RankMismatch(a.bot(), a.top()));
    }
    let cap = BrauerElem::from_diagram(nested_cap(m));
    let cup = BrauerElem::from_diagram(nested_cup(m));
    let c = cap.compose(&a.tensor(&BrauerElem::identity(m)))?.compose(&cup)?;
    Ok(c.terms().map(|(_, f)| f.clone()).fold(Frac::zero(), |x, y| &x + &y))
}

/// Outcome of realizing the coupon `Δ_m = c·ε` on the natural module of `so_m`.
#[derive(Clone, Debug)]
pub struct CouponReport {
    pub m: usize,
    /// `c²` solving `Σ(m) = Δ_m Δ_m^*`.
    pub c_sq: Rational,
    /// `σΔ_m = sgn(σ)Δ_m` for every `σ ∈ Sym_m`.
    pub skew: bool,
    /// `(∩ ⊗ I(m−2))Δ_m = 0`.
    pub harmonic: bool,
    /// Rank of `Σ(m) − Δ_m Δ_m^*` after normalization.
    pub relation_rank: usize,
    /// Closure of `Σ(m)` as a polynomial in δ.
    pub closure_sigma: Frac,
    /// Value of the closure of `Δ_m Δ_m^*`.
    pub closure_coupon: Rational,
    /// Rational δ for which both closures agree; `m` must be among them.
    pub forced_delta: Vec<Rational>,
    pub sdim: i64,
}

impl CouponReport {
    pub fn holds(&self) -> bool {
        self.skew
            && self.harmonic
            && self.relation_rank == 0
            && self.forced_delta.contains(&Rational::from_integer(self.m.into()))
            && self.sdim == self.m as i64
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "c_squared": crate::scalars::fmt_rational(&self.c_sq),
            "skew_symmetric": self.skew,
            "harmonic": self.harmonic,
            "relation_rank": self.relation_rank,
            "closure_sigma": self.closure_sigma.to_string(),
            "closure_coupon": crate::scalars::fmt_rational(&self.closure_coupon),
            "forced_delta": self.forced_delta.iter().map(crate::scalars::fmt_rational).collect::<Vec<_>>(),
            "sdim": self.sdim,
        })
    }
}

fn all_perms(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// Check the enhanced coupon relations for `Δ_m` on the natural module of
/// `osp`, which must be purely even of dimension `m`.
pub fn enhanced_coupon_check(osp: &Osp) -> Result<CouponReport> {
    if osp.space.parities().iter().any(|&p| p == 1) {
        return Err(Error::UnsupportedParameter("coupon check needs an even space".into()));
    }
    let m = osp.space.dim();
    let big = m.pow(m as u32);
    // Levi-Civita vector in V^{⊗m}
    let mut eps = Mat::zeros(big, 1);
    for p in all_perms(m) {
        let idx = p.iter().fold(0, |acc, &v| acc * m + v);
        eps[(idx, 0)] = rat(permutation_sign(&p));
    }
    let cap = brauer_matrix(osp, &BrauerElem::from_diagram(nested_cap(m)))?;
    let cup = brauer_matrix(osp, &BrauerElem::from_diagram(nested_cup(m)))?;
    let star = &cap * &eps.kron(&Mat::identity(big));
    let sigma = antisymmetrizer(m);
    let sigma_m = brauer_matrix(osp, &sigma)?;
    let raw = &eps * &star;
    let pos = (0..raw.entries().len())
        .find(|&p| !raw.entries()[p].is_zero())
        .ok_or(Error::SingularForm)?;
    let c_sq = &sigma_m.entries()[pos] / &raw.entries()[pos];
    let relation_rank = (&sigma_m - &raw.scale(&c_sq)).rank();

    let skew = all_perms(m).iter().all(|p| {
        let pm = brauer_matrix(osp, &BrauerElem::from_diagram(BrauerDiagram::permutation(p))).unwrap();
        &pm * &eps == eps.scale(&rat(permutation_sign(p)))
    });
    let harmonic = {
        let c = brauer_matrix(osp, &generator(GenKind::Cap, 1, m)?)?;
        (&c * &eps).is_zero()
    };

    let closure_sigma = closure(&sigma)?;
    let dd = raw.scale(&c_sq);
    let closure_coupon = (&(&cap * &dd.kron(&Mat::identity(big))) * &cup)
        .as_scalar()
        .ok_or(Error::DimensionMismatch(1, 0))?;
    let forced_delta = delta_roots(&closure_sigma, &closure_coupon)?;
    Ok(CouponReport {
        m,
        c_sq,
        skew,
        harmonic,
        relation_rank,
        closure_sigma,
        closure_coupon,
        forced_delta,
        sdim: osp.sdim(),
    })
}

/// Rational roots of `p(δ) = v` for a polynomial `p` with integer
/// coefficients.
fn delta_roots(p: &Frac, v: &Rational) -> Result<Vec<Rational>> {
    let poly = p.as_poly().ok_or_else(|| Error::Parse("closure is not a polynomial".into()))?;
    let shifted = poly - &Poly::constant(v.clone());
    let coeffs = shifted.coeffs_in(Var::Delta);
    let c0 = coeffs.get(&0).and_then(|c| c.as_constant()).unwrap_or_else(Rational::zero);
    let lead = coeffs.iter().next_back().and_then(|(_, c)| c.as_constant()).ok_or(Error::SingularForm)?;
    if !c0.denom().is_one() || !lead.denom().is_one() {
        return Err(Error::UnsupportedParameter("non-integral closure polynomial".into()));
    }
    let divisors = |n: &num_bigint::BigInt| -> Vec<i64> {
        let n: i64 = n.to_string().parse::<i64>().unwrap_or(0).abs();
        (1..=n.max(1)).filter(|d| n == 0 || n % d == 0).collect()
    };
    let mut roots = Vec::new();
    if c0.is_zero() {
        roots.push(Rational::zero());
    }
    for p in divisors(c0.numer()) {
        for q in divisors(lead.numer()) {
            for sgn in [1, -1] {
                let r = ratio(sgn * p, q);
                let mut b = HashMap::new();
                b.insert(Var::Delta, r.clone());
                if shifted.eval(&b)?.is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_squared_is_delta_e() {
        let e = generator(GenKind::E, 1, 2).unwrap();
        assert_eq!(e.compose(&e).unwrap(), e.scale(&Frac::delta()));
    }

    #[test]
    fn s_involution() {
        let s = generator(GenKind::S, 2, 4).unwrap();
        assert_eq!(s.compose(&s).unwrap(), BrauerElem::identity(4));
    }

    #[test]
    fn h_squared() {
        let h = generator(GenKind::H, 1, 2).unwrap();
        let e = generator(GenKind::E, 1, 2).unwrap();
        let two_minus_delta = Frac::from(&Poly::int(2) - &Poly::delta());
        let rhs = BrauerElem::identity(2).sub(&e.scale(&two_minus_delta)).unwrap();
        assert_eq!(h.compose(&h).unwrap(), rhs);
    }

    #[test]
    fn tensor_generators() {
        let e = generator(GenKind::E, 1, 2).unwrap();
        assert_eq!(e.tensor(&BrauerElem::identity(1)), generator(GenKind::E, 1, 3).unwrap());
        assert_eq!(BrauerElem::identity(1).tensor(&BrauerElem::identity(1)), BrauerElem::identity(2));
    }

    #[test]
    fn theta_relations() {
        let th = theta();
        assert_eq!(th.compose(&th).unwrap(), th.scale(&Frac::int(2)));
        let x = generator(GenKind::S, 1, 2).unwrap();
        let i_minus_x = BrauerElem::identity(2).sub(&x).unwrap();
        assert!(i_minus_x.compose(&th).unwrap().is_zero());
        let e = generator(GenKind::E, 1, 2).unwrap();
        assert!(e.compose(&th).unwrap().is_zero());
    }

    #[test]
    fn cubic_vanishes() {
        assert!(cubic_h().is_zero());
    }

    #[test]
    fn basis_counts() {
        assert_eq!(enumerate_basis(2, 0).unwrap().len(), 1);
        assert_eq!(enumerate_basis(3, 3).unwrap().len(), 15);
        assert!(enumerate_basis(0, 1).is_err());
    }

    #[test]
    fn cap_cup_shapes() {
        let c = generator_diagram(GenKind::Cap, 1, 2).unwrap();
        assert_eq!((c.bot(), c.top()), (2, 0));
        let u = generator_diagram(GenKind::Cup, 1, 2).unwrap();
        let (d, loops) = c.compose(&u).unwrap();
        assert_eq!((d.bot(), d.top(), loops), (0, 0, 1));
    }

    #[test]
    fn factorisation_roundtrip() {
        for (r, s) in [(2, 2), (3, 3), (4, 2), (1, 3), (4, 4), (0, 4)] {
            for d in enumerate_basis(r, s).unwrap() {
                assert_eq!(steps_diagram(&diagram_steps(&d), r).unwrap(), d, "{d}");
            }
        }
    }

    #[test]
    fn planarity() {
        let e = generator_diagram(GenKind::E, 1, 3).unwrap();
        assert!(e.is_planar());
        let s = generator_diagram(GenKind::S, 1, 2).unwrap();
        assert!(!s.is_planar());
        assert!(BrauerDiagram::identity(3).is_planar());
    }
}
