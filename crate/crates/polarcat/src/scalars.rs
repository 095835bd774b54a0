//! Exact coefficients: rationals, sparse polynomials over the named
//! indeterminates `delta, z2, z3, ..., lambda`, and reduced fractions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `3`, `-7/2`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Indeterminate. The derived order is the canonical variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Delta,
    Z(u32),
    Lambda,
}

impl Var {
    pub fn name(self) -> String {
        match self {
            Var::Delta => "delta".into(),
            Var::Z(k) => format!("z{k}"),
            Var::Lambda => "lambda".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        match s {
            "delta" | "δ" => Some(Var::Delta),
            "lambda" | "λ" => Some(Var::Lambda),
            _ => {
                let rest = s.strip_prefix('z').or_else(|| s.strip_prefix('Z'))?;
                let k: u32 = rest.parse().ok()?;
                (k >= 1).then_some(Var::Z(k))
            }
        }
    }
}

/// Sparse exponent vector, sorted by variable, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || other.0[j].0 < self.0[i].0 {
                out.push(other.0[j]);
                j += 1;
            } else {
                out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    /// `self / other` when divisible.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = other.exp(v);
            if f > e {
                return None;
            }
            if e > f {
                out.push((v, e - f));
            }
        }
        if other.0.iter().any(|&(v, _)| self.exp(v) == 0) {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }

    /// Graded order: higher total degree first, then earlier variables with
    /// larger exponents first.
    pub fn grlex_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match other.degree().cmp(&self.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let mut vars: Vec<Var> = self.0.iter().chain(other.0.iter()).map(|p| p.0).collect();
        vars.sort();
        vars.dedup();
        for v in vars {
            match other.exp(v).cmp(&self.exp(v)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    fn render(&self) -> String {
        self.0
            .iter()
            .map(|&(v, e)| if e == 1 { v.name() } else { format!("{}^{}", v.name(), e) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Sparse polynomial over ℚ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::var(v, 1), Rational::one())
    }

    pub fn delta() -> Self {
        Poly::var(Var::Delta)
    }

    pub fn z(k: u32) -> Self {
        Poly::var(Var::Z(k))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.keys().flat_map(|m| m.0.iter().map(|p| p.0)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Leading term under the graded order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().min_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Gcd of numerators over lcm of denominators, sign of the leading term.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let mut q = Rational::new(num, den);
        if let Some((_, c)) = self.leading() {
            if c.is_negative() {
                q = -q;
            }
        }
        q
    }

    /// Exact quotient `self / d`, if `d` divides `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(&dm)?;
            let qc = c / &dc;
            let t = Poly::monomial(qm, qc);
            rem = &rem - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    /// View as a polynomial in `v` with coefficients in the other variables.
    pub fn coeffs_in(&self, v: Var) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(v)).or_default().add_term(m.without(v), c.clone());
        }
        out
    }

    /// Dense coefficient list when univariate in `v` (index = power).
    fn univariate(&self, v: Var) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            if m.0.iter().any(|&(w, _)| w != v) {
                return None;
            }
            out[m.exp(v) as usize] = c.clone();
        }
        Some(out)
    }

    fn from_univariate(v: Var, cs: &[Rational]) -> Poly {
        let mut p = Poly::zero();
        for (i, c) in cs.iter().enumerate() {
            p.add_term(Monomial::var(v, i as u32), c.clone());
        }
        p
    }

    pub fn specialize(&self, b: &HashMap<Var, Rational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match b.get(&v) {
                    Some(x) => coef *= num_traits::pow(x.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), coef);
        }
        out
    }

    /// Substitute polynomials for variables.
    pub fn substitute(&self, b: &HashMap<Var, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for &(v, e) in &m.0 {
                match b.get(&v) {
                    Some(p) => t = &t * &p.pow(e),
                    None => t = &t * &Poly::monomial(Monomial::var(v, e), Rational::one()),
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn eval(&self, b: &HashMap<Var, Rational>) -> Result<Rational> {
        let p = self.specialize(b);
        p.as_constant().ok_or_else(|| {
            Error::SpecializationMissing(p.vars().iter().map(|v| v.name()).collect::<Vec<_>>().join(","))
        })
    }
}

fn uni_trim(a: &mut Vec<Rational>) {
    while a.len() > 1 && a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

/// Monic gcd in ℚ[x] on dense coefficient vectors.
fn uni_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    uni_trim(&mut a);
    uni_trim(&mut b);
    while !(b.len() == 1 && b[0].is_zero()) {
        // a mod b
        let mut r = a.clone();
        let db = b.len() - 1;
        let lb = b[db].clone();
        while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
            let dr = r.len() - 1;
            let f = &r[dr] / &lb;
            for i in 0..=db {
                let t = &f * &b[i];
                r[dr - db + i] -= t;
            }
            r.pop();
            if r.is_empty() {
                r.push(Rational::zero());
            }
            uni_trim(&mut r);
        }
        a = b;
        b = r;
    }
    let l = a.last().cloned().unwrap_or_else(Rational::one);
    if l.is_zero() {
        return vec![Rational::zero()];
    }
    a.iter().map(|c| c / &l).collect()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
owned_ops!(Poly);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        ts.sort_by(|a, b| a.0.grlex_cmp(b.0));
        for (i, (m, c)) in ts.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.0.is_empty() {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", m.render())?;
            } else {
                write!(f, "{}*{}", fmt_rational(&a), m.render())?;
            }
        }
        Ok(())
    }
}

/// Reduced fraction of polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frac {
    num: Poly,
    den: Poly,
}

impl Default for Frac {
    fn default() -> Self {
        Frac::zero()
    }
}

impl From<Poly> for Frac {
    fn from(p: Poly) -> Self {
        Frac { num: p, den: Poly::one() }
    }
}

impl From<Rational> for Frac {
    fn from(q: Rational) -> Self {
        Frac::from(Poly::constant(q))
    }
}

impl Frac {
    pub fn zero() -> Self {
        Frac { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Frac::from(Poly::one())
    }

    pub fn int(n: i64) -> Self {
        Frac::from(Poly::int(n))
    }

    pub fn rational(q: Rational) -> Self {
        Frac::from(q)
    }

    pub fn delta() -> Self {
        Frac::from(Poly::delta())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }

    pub fn new(num: Poly, den: Poly) -> Result<Frac> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Frac::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Frac {
        if num.is_zero() {
            return Frac::zero();
        }
        if let Some(c) = den.as_constant() {
            return Frac { num: num.scale(&c.recip()), den: Poly::one() };
        }
        if let Some(q) = num.div_exact(&den) {
            return Frac { num: q, den: Poly::one() };
        }
        let (mut num, mut den) = (num, den);
        for v in den.vars() {
            if let Some(du) = den.univariate(v) {
                let mut g = du.clone();
                // gcd with every coefficient of num viewed in ℚ[others][v]
                let mut inner: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
                for (m, c) in num.terms() {
                    let e = m.exp(v) as usize;
                    let e_vec = inner.entry(m.without(v)).or_default();
                    if e_vec.len() <= e {
                        e_vec.resize(e + 1, Rational::zero());
                    }
                    e_vec[e] = c.clone();
                }
                for cs in inner.values() {
                    g = uni_gcd(&g, cs);
                    if g.len() == 1 {
                        break;
                    }
                }
                if g.len() > 1 {
                    let gp = Poly::from_univariate(v, &g);
                    num = num.div_exact(&gp).expect("gcd divides numerator");
                    den = den.div_exact(&gp).expect("gcd divides denominator");
                }
                break;
            }
        }
        if let Some(c) = den.as_constant() {
            return Frac { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lc.recip();
        Frac { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn recip(&self) -> Result<Frac> {
        Frac::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Frac) -> Result<Frac> {
        Ok(self * &o.recip()?)
    }

    pub fn scale(&self, c: &Rational) -> Frac {
        Frac { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Frac {
        let mut out = Frac::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Substitute values; errors if the denominator vanishes.
    pub fn specialize(&self, b: &HashMap<Var, Rational>) -> Result<Frac> {
        let d = self.den.specialize(b);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Frac::new(self.num.specialize(b), d)
    }

    pub fn eval(&self, b: &HashMap<Var, Rational>) -> Result<Rational> {
        let f = self.specialize(b)?;
        f.as_rational().ok_or_else(|| {
            let mut vs = f.num.vars();
            vs.extend(f.den.vars());
            Error::SpecializationMissing(vs.iter().map(|v| v.name()).collect::<Vec<_>>().join(","))
        })
    }

    pub fn substitute(&self, b: &HashMap<Var, Poly>) -> Result<Frac> {
        Frac::new(self.num.substitute(b), self.den.substitute(b))
    }
}

impl Add for &Frac {
    type Output = Frac;
    fn add(self, o: &Frac) -> Frac {
        if self.den.is_one() && o.den.is_one() {
            return Frac { num: &self.num + &o.num, den: Poly::one() };
        }
        if self.den == o.den {
            return Frac::reduced(&self.num + &o.num, self.den.clone());
        }
        Frac::reduced(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for &Frac {
    type Output = Frac;
    fn sub(self, o: &Frac) -> Frac {
        self + &(-o)
    }
}

impl Neg for &Frac {
    type Output = Frac;
    fn neg(self) -> Frac {
        Frac { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &Frac {
    type Output = Frac;
    fn mul(self, o: &Frac) -> Frac {
        if self.den.is_one() && o.den.is_one() {
            return Frac { num: &self.num * &o.num, den: Poly::one() };
        }
        Frac::reduced(&self.num * &o.num, &self.den * &o.den)
    }
}
owned_ops!(Frac);

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Parse a scalar expression: numbers, `delta`, `zK`, `lambda`, `+ - * / ^`,
/// parentheses.
pub fn parse_scalar(s: &str) -> Result<Frac> {
    let toks = tokenize(s)?;
    let mut p = ScalarParser { toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in scalar: {s}")));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().unwrap()));
        } else if c.is_alphabetic() {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric()) {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in scalar")));
        }
    }
    Ok(out)
}

struct ScalarParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl ScalarParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut v = if self.eat('-') { -self.term()? } else { self.term()? };
        loop {
            if self.eat('+') {
                v = &v + &self.term()?;
            } else if self.eat('-') {
                v = &v - &self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Frac> {
        let mut v = self.power()?;
        loop {
            if self.eat('*') {
                v = &v * &self.power()?;
            } else if self.eat('/') {
                v = v.div(&self.power()?)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn power(&mut self) -> Result<Frac> {
        let b = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(b.pow(e))
                }
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(b)
        }
    }

    fn atom(&mut self) -> Result<Frac> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Frac::rational(Rational::from_integer(n)))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                let v = Var::parse(&id).ok_or_else(|| Error::Parse(format!("unknown indeterminate {id}")))?;
                Ok(Frac::from(Poly::var(v)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(v)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?} in scalar"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Poly {
        Poly::delta()
    }

    #[test]
    fn spec_examples() {
        assert!((&d() + &(-&d())).is_zero());
        let a = &Poly::int(2) + &Poly::z(2);
        assert_eq!((&a + &Poly::z(2)).to_string(), "2*z2 + 2");
        assert_eq!((&(&d() - &Poly::int(2)) + &Poly::int(2)), d());
        let p = &(&d() - &Poly::int(2)) * &(&d() + &Poly::int(2));
        assert_eq!(p.to_string(), "delta^2 - 4");
        assert_eq!((&Poly::z(2) * &Poly::z(4)).to_string(), "z2*z4");
        assert!((&Poly::zero() * &p).is_zero());
    }

    #[test]
    fn specialization() {
        let mut b = HashMap::new();
        b.insert(Var::Delta, rat(-2));
        assert_eq!((&d() - &Poly::int(2)).eval(&b).unwrap(), rat(-4));
        let two_over = Frac::new(Poly::int(2), d()).unwrap();
        assert_eq!(two_over.eval(&b).unwrap(), rat(-1));
        b.insert(Var::Delta, rat(0));
        assert!(matches!(two_over.eval(&b), Err(Error::DivisionByZero)));
    }

    #[test]
    fn fraction_reduction() {
        let num = &(&d() - &Poly::int(2)) * &Poly::z(2);
        let den = &(&d() - &Poly::int(2)) * &d();
        let f = Frac::new(num, den).unwrap();
        assert_eq!(f.den(), &d());
        assert_eq!(f.num(), &Poly::z(2));
        let g = Frac::new(f.num().clone(), f.den().clone()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn parse_roundtrip() {
        let f = parse_scalar("(1-delta)/2").unwrap();
        assert_eq!(f.to_string(), "-1/2*delta + 1/2");
        let g = parse_scalar(&f.to_string()).unwrap();
        assert_eq!(f, g);
        let h = parse_scalar("2/delta").unwrap();
        assert_eq!(h.to_string(), "(2)/(delta)");
        assert_eq!(parse_scalar(&h.to_string()).unwrap(), h);
    }
}
