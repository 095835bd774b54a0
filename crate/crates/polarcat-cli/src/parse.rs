//! Morphism expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' int)?
//! atom   := number | scalar-var | generator | '(' expr ')'
//! ```
//!
//! Generators are upper case (`S1@3`, `E1@2`, `CAP1@2`, `CUP2@3`, `D@1`,
//! `ID@2`, `Z2@1`, or `Z2` with the rank taken from its neighbour); scalar
//! variables are lower case (`delta`, `lambda`, `z2`). `A * B` is `A ∘ B`.

use std::fmt;

use polarcat::polar::{PolarElem, PolarGen};
use polarcat::scalars::{parse_rational, rat, Frac, Poly, Rational, Var};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    S,
    E,
    Cap,
    Cup,
    D,
    Id,
    Z,
}

/// A generator occurrence. `index` is `i` for S/E/CAP/CUP and `ℓ` for Z.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenAtom {
    pub kind: GenKind,
    pub index: usize,
    pub rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismAst {
    Num(Rational),
    Var(Var),
    Gen(GenAtom),
    Neg(Box<MorphismAst>),
    Add(Box<MorphismAst>, Box<MorphismAst>),
    Sub(Box<MorphismAst>, Box<MorphismAst>),
    Mul(Box<MorphismAst>, Box<MorphismAst>),
    Div(Box<MorphismAst>, Box<MorphismAst>),
    Pow(Box<MorphismAst>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Word(String),
    Op(char),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, CliError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let (l0, c0) = (line, col);
        let step = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            step(&mut i, &mut col);
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                step(&mut i, &mut col);
            }
            out.push(Spanned { tok: Tok::Num(cs[st..i].iter().collect()), line: l0, col: c0 });
        } else if c.is_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_alphabetic() && !cs[i].is_ascii_digit() {
                step(&mut i, &mut col);
            }
            out.push(Spanned { tok: Tok::Word(cs[st..i].iter().collect()), line: l0, col: c0 });
        } else if "+-*/^()@".contains(c) {
            out.push(Spanned { tok: Tok::Op(c), line: l0, col: c0 });
            step(&mut i, &mut col);
        } else if c == '−' {
            out.push(Spanned { tok: Tok::Op('-'), line: l0, col: c0 });
            step(&mut i, &mut col);
        } else if c == '∘' || c == '·' {
            out.push(Spanned { tok: Tok::Op('*'), line: l0, col: c0 });
            step(&mut i, &mut col);
        } else {
            return Err(CliError::Syntax { line: l0, col: c0, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CliError> {
        let (line, col) = self.here();
        Err(CliError::Syntax { line, col, msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<usize, CliError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                n.parse().or_else(|_| self.err("number too large"))
            }
            _ => self.err("expected a number"),
        }
    }

    fn expr(&mut self) -> Result<MorphismAst, CliError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = MorphismAst::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = MorphismAst::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MorphismAst, CliError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = MorphismAst::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = MorphismAst::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MorphismAst, CliError> {
        if self.eat('-') {
            return Ok(MorphismAst::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.number()?;
            let e = u32::try_from(e).or_else(|_| self.err("exponent too large"))?;
            return Ok(MorphismAst::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MorphismAst, CliError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let q = parse_rational(&n).or_else(|_| self.err("bad number"))?;
                Ok(MorphismAst::Num(q))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Word(w)) => {
                self.pos += 1;
                self.word(&w)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    fn word(&mut self, w: &str) -> Result<MorphismAst, CliError> {
        if w == "z" {
            let k = self.number()?;
            return match Var::parse(&format!("z{k}")) {
                Some(v) => Ok(MorphismAst::Var(v)),
                None => self.err("z index must be positive"),
            };
        }
        if let Some(v) = Var::parse(w) {
            return Ok(MorphismAst::Var(v));
        }
        let kind = match w {
            "S" => GenKind::S,
            "E" => GenKind::E,
            "CAP" => GenKind::Cap,
            "CUP" => GenKind::Cup,
            "D" => GenKind::D,
            "ID" => GenKind::Id,
            "Z" => GenKind::Z,
            _ => {
                self.pos -= 1;
                return self.err(format!("unknown identifier {w}"));
            }
        };
        let index = match kind {
            GenKind::D | GenKind::Id => 0,
            _ => self.number()?,
        };
        let rank = if self.eat('@') {
            Some(self.number()?)
        } else if kind == GenKind::Z {
            None
        } else {
            return self.err(format!("generator {w} needs a rank annotation '@r'"));
        };
        Ok(MorphismAst::Gen(GenAtom { kind, index, rank }))
    }
}

pub fn parse_morphism(text: &str) -> Result<MorphismAst, CliError> {
    let toks = lex(text)?;
    let end = toks.last().map(|s| (s.line, s.col + 1)).unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, end };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Printing

fn prec(a: &MorphismAst) -> u8 {
    match a {
        MorphismAst::Add(..) | MorphismAst::Sub(..) => 1,
        MorphismAst::Mul(..) | MorphismAst::Div(..) => 2,
        MorphismAst::Neg(..) => 3,
        MorphismAst::Pow(..) => 4,
        MorphismAst::Num(q) if !q.is_integer() => 2,
        MorphismAst::Num(q) if *q < rat(0) => 3,
        _ => 5,
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, a: &MorphismAst, min: u8) -> fmt::Result {
    if prec(a) < min {
        write!(f, "({a})")
    } else {
        write!(f, "{a}")
    }
}

impl fmt::Display for GenAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GenKind::S => "S",
            GenKind::E => "E",
            GenKind::Cap => "CAP",
            GenKind::Cup => "CUP",
            GenKind::D => "D",
            GenKind::Id => "ID",
            GenKind::Z => "Z",
        };
        write!(f, "{name}")?;
        if !matches!(self.kind, GenKind::D | GenKind::Id) {
            write!(f, "{}", self.index)?;
        }
        if let Some(r) = self.rank {
            write!(f, "@{r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for MorphismAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismAst::Num(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            MorphismAst::Var(v) => write!(f, "{}", v.name()),
            MorphismAst::Gen(g) => write!(f, "{g}"),
            MorphismAst::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 4)
            }
            MorphismAst::Add(a, b) | MorphismAst::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " {} ", if matches!(self, MorphismAst::Add(..)) { '+' } else { '-' })?;
                wrap(f, b, 2)
            }
            MorphismAst::Mul(a, b) | MorphismAst::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " {} ", if matches!(self, MorphismAst::Mul(..)) { '*' } else { '/' })?;
                wrap(f, b, 3)
            }
            MorphismAst::Pow(a, e) => {
                wrap(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Elaboration

/// Elaborated value: a scalar, a morphism, or a bubble whose rank is not
/// yet known.
#[derive(Clone, Debug)]
pub enum Value {
    Scalar(Frac),
    Morph(PolarElem),
    Bubble(u32, Frac),
}

impl Value {
    fn into_morph(self) -> Result<PolarElem, CliError> {
        match self {
            Value::Morph(m) => Ok(m),
            Value::Bubble(l, c) => Ok(PolarElem::gen(PolarGen::Z { l, r: 0 })?.scale(&c)),
            Value::Scalar(c) => Ok(PolarElem::identity(0).scale(&c)),
        }
    }
}

fn gen_of(g: &GenAtom, rank: usize) -> Result<PolarGen, CliError> {
    let i = g.index;
    let pg = match g.kind {
        GenKind::S => PolarGen::S { i, r: rank },
        GenKind::E => PolarGen::E { i, r: rank },
        GenKind::Cap => PolarGen::Cap { i, r: rank },
        GenKind::Cup => PolarGen::Cup { i, r: rank },
        GenKind::D => PolarGen::D { r: rank },
        GenKind::Id => PolarGen::Id { r: rank },
        GenKind::Z => PolarGen::Z { l: i as u32, r: rank },
    };
    pg.validate()?;
    Ok(pg)
}

fn bubble_at(l: u32, c: &Frac, r: usize) -> Result<PolarElem, CliError> {
    Ok(PolarElem::gen(PolarGen::Z { l, r })?.scale(c))
}

fn compose(a: &PolarElem, b: &PolarElem) -> Result<PolarElem, CliError> {
    if a.src() != b.tgt() {
        return Err(CliError::RankMismatch { left: a.src(), right: b.tgt(), context: format!("{a} * {b}") });
    }
    Ok(a.compose(b)?)
}

fn add(a: &PolarElem, b: &PolarElem, sign: i64) -> Result<PolarElem, CliError> {
    if (a.src(), a.tgt()) != (b.src(), b.tgt()) {
        let (l, r) = if a.src() != b.src() { (a.src(), b.src()) } else { (a.tgt(), b.tgt()) };
        return Err(CliError::RankMismatch { left: l, right: r, context: format!("{a} ± {b}") });
    }
    Ok(a.add(&b.scale(&Frac::int(sign)))?)
}

pub fn elaborate(ast: &MorphismAst) -> Result<Value, CliError> {
    Ok(match ast {
        MorphismAst::Num(q) => Value::Scalar(Frac::rational(q.clone())),
        MorphismAst::Var(v) => Value::Scalar(Frac::from(Poly::var(*v))),
        MorphismAst::Gen(g) => match (g.kind, g.rank) {
            (GenKind::Z, None) => Value::Bubble(g.index as u32, Frac::one()),
            (_, Some(r)) => Value::Morph(PolarElem::gen(gen_of(g, r)?)?),
            (_, None) => unreachable!("parser requires ranks"),
        },
        MorphismAst::Neg(a) => scale(elaborate(a)?, &Frac::int(-1)),
        MorphismAst::Add(a, b) | MorphismAst::Sub(a, b) => {
            let sign = if matches!(ast, MorphismAst::Add(..)) { 1 } else { -1 };
            match (elaborate(a)?, elaborate(b)?) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y.scale(&Rational::from_integer(sign.into()))),
                (x, y) => {
                    let (x, y) = align(x, y)?;
                    Value::Morph(add(&x, &y, sign)?)
                }
            }
        }
        MorphismAst::Mul(a, b) => match (elaborate(a)?, elaborate(b)?) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x * &y),
            (Value::Scalar(x), v) | (v, Value::Scalar(x)) => scale(v, &x),
            (Value::Bubble(l, c), Value::Bubble(k, d)) => {
                Value::Morph(compose(&bubble_at(l, &c, 0)?, &bubble_at(k, &d, 0)?)?)
            }
            (Value::Bubble(l, c), Value::Morph(m)) => Value::Morph(compose(&bubble_at(l, &c, m.tgt())?, &m)?),
            (Value::Morph(m), Value::Bubble(l, c)) => Value::Morph(compose(&m, &bubble_at(l, &c, m.src())?)?),
            (Value::Morph(x), Value::Morph(y)) => Value::Morph(compose(&x, &y)?),
        },
        MorphismAst::Div(a, b) => match (elaborate(a)?, elaborate(b)?) {
            (v, Value::Scalar(y)) => scale(v, &Frac::one().div(&y)?),
            _ => return Err(CliError::Type("only division by a scalar is allowed".into())),
        },
        MorphismAst::Pow(a, e) => match elaborate(a)? {
            Value::Scalar(x) => Value::Scalar(x.pow(*e)),
            Value::Bubble(l, c) => {
                let m = bubble_at(l, &c, 0)?;
                Value::Morph(m.pow(*e)?)
            }
            Value::Morph(m) => {
                if m.src() != m.tgt() {
                    return Err(CliError::RankMismatch { left: m.src(), right: m.tgt(), context: format!("({m})^{e}") });
                }
                Value::Morph(m.pow(*e)?)
            }
        },
    })
}

fn scale(v: Value, c: &Frac) -> Value {
    match v {
        Value::Scalar(x) => Value::Scalar(&x * c),
        Value::Morph(m) => Value::Morph(m.scale(c)),
        Value::Bubble(l, x) => Value::Bubble(l, &x * c),
    }
}

/// Give unranked bubbles and scalars the endomorphism rank of the other
/// summand.
fn align(x: Value, y: Value) -> Result<(PolarElem, PolarElem), CliError> {
    let rank_of = |v: &Value| match v {
        Value::Morph(m) if m.src() == m.tgt() => Some(m.src()),
        _ => None,
    };
    let fix = |v: Value, r: Option<usize>| -> Result<PolarElem, CliError> {
        match (v, r) {
            (Value::Bubble(l, c), Some(r)) => bubble_at(l, &c, r),
            (Value::Scalar(c), Some(r)) => Ok(PolarElem::identity(r).scale(&c)),
            (v, _) => v.into_morph(),
        }
    };
    let (rx, ry) = (rank_of(&x), rank_of(&y));
    Ok((fix(x, ry)?, fix(y, rx)?))
}

/// Parse and elaborate to a morphism.
pub fn parse_elem(text: &str) -> Result<PolarElem, CliError> {
    elaborate(&parse_morphism(text)?)?.into_morph()
}
