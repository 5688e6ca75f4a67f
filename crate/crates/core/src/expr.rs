//! Text syntax for scalars and algebra elements.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := quot quot*                 juxtaposition, left to right
//! quot   := power ('/' power)*         divisor must be a scalar
//! power  := factor ('^' ['-'] uint)*   negative exponents on scalars only
//! factor := uint | 'q' | atom | '(' expr ')'
//! atom   := 'z[' uint ',' uint ']' | 'zs[' uint ',' uint ']' | 'det' | 'detinv'
//! ```
//!
//! `z[a,α]` names the generator with column `a` and row `α`. The symbol `*`
//! is rejected: the involution is written with the `zs` atom.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ncalg::{Gen, NcElement};
use crate::qdet::{det_q, GlElement};
use crate::scalar::Scalar;
use crate::shilov::{restrict, BoundaryElement, RectConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Q,
    Gen(Gen),
    Det,
    DetInv,
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, i64),
}

impl Expr {
    /// No generator, det or detinv occurs.
    pub fn is_scalar(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Q => true,
            Expr::Gen(_) | Expr::Det | Expr::DetInv => false,
            Expr::Neg(e) | Expr::Power(e, _) => e.is_scalar(),
            Expr::Quotient(a, b) => a.is_scalar() && b.is_scalar(),
            Expr::Sum(v) | Expr::Product(v) => v.iter().all(Expr::is_scalar),
        }
    }

    /// Number of generator, det and detinv leaves.
    pub fn atom_count(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::Q => 0,
            Expr::Gen(_) | Expr::Det | Expr::DetInv => 1,
            Expr::Neg(e) | Expr::Power(e, _) => e.atom_count(),
            Expr::Quotient(a, b) => a.atom_count() + b.atom_count(),
            Expr::Sum(v) | Expr::Product(v) => v.iter().map(Expr::atom_count).sum(),
        }
    }

    pub fn contains_detinv(&self) -> bool {
        match self {
            Expr::DetInv => true,
            Expr::Int(_) | Expr::Q | Expr::Gen(_) | Expr::Det => false,
            Expr::Neg(e) | Expr::Power(e, _) => e.contains_detinv(),
            Expr::Quotient(a, b) => a.contains_detinv() || b.contains_detinv(),
            Expr::Sum(v) | Expr::Product(v) => v.iter().any(Expr::contains_detinv),
        }
    }

    fn gens(&self, out: &mut Vec<Gen>) {
        match self {
            Expr::Gen(g) => out.push(*g),
            Expr::Int(_) | Expr::Q | Expr::Det | Expr::DetInv => {}
            Expr::Neg(e) | Expr::Power(e, _) => e.gens(out),
            Expr::Quotient(a, b) => {
                a.gens(out);
                b.gens(out);
            }
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.gens(out)),
        }
    }

    fn has_det(&self) -> bool {
        match self {
            Expr::Det | Expr::DetInv => true,
            Expr::Int(_) | Expr::Q | Expr::Gen(_) => false,
            Expr::Neg(e) | Expr::Power(e, _) => e.has_det(),
            Expr::Quotient(a, b) => a.has_det() || b.has_det(),
            Expr::Sum(v) | Expr::Product(v) => v.iter().any(Expr::has_det),
        }
    }

    /// Check generator indices against `n`, and the block rows when `m` is set.
    pub fn validate(&self, n: u8, m: Option<u8>) -> Result<()> {
        let mut gs = Vec::new();
        self.gens(&mut gs);
        for g in &gs {
            g.check(n)?;
        }
        if let Some(m) = m {
            let cfg = RectConfig::new(m, n)?;
            if let Some(g) = gs.iter().find(|g| !cfg.contains(**g)) {
                return Err(Error::OutsideRectangle {
                    col: g.col as usize,
                    row: g.row as usize,
                    min_row_exclusive: (n - m) as usize,
                });
            }
            if self.has_det() {
                return Err(Error::Config("det and detinv are not available in the rectangular case".into()));
            }
        }
        Ok(())
    }

    pub fn eval_scalar(&self) -> Result<Scalar> {
        Ok(match self {
            Expr::Int(i) => Scalar::from_poly(crate::scalar::Poly::constant(i.clone())),
            Expr::Q => Scalar::q(),
            Expr::Gen(g) => return Err(not_scalar(&g.to_string())),
            Expr::Det => return Err(not_scalar("det")),
            Expr::DetInv => return Err(not_scalar("detinv")),
            Expr::Neg(e) => -e.eval_scalar()?,
            Expr::Sum(v) => {
                let mut acc = Scalar::zero();
                for e in v {
                    acc += &e.eval_scalar()?;
                }
                acc
            }
            Expr::Product(v) => {
                let mut acc = Scalar::one();
                for e in v {
                    acc *= &e.eval_scalar()?;
                }
                acc
            }
            Expr::Quotient(a, b) => a.eval_scalar()?.checked_div(&b.eval_scalar()?)?,
            Expr::Power(e, k) => {
                let b = e.eval_scalar()?;
                let p = b.pow(k.unsigned_abs() as u32);
                if *k < 0 {
                    p.inv()?
                } else {
                    p
                }
            }
        })
    }

    /// Evaluate in Pol(Mat_n)_q. `detinv` is not available here.
    pub fn eval_pol(&self, n: u8) -> Result<NcElement> {
        self.validate(n, None)?;
        eval_ring(self, &PolRing(n))
    }

    /// Evaluate on the Shilov boundary: `zs` atoms go to their cofactor images.
    pub fn eval_boundary(&self, n: u8) -> Result<BoundaryElement> {
        self.validate(n, None)?;
        Ok(BoundaryElement(eval_ring(self, &GlRing(n))?))
    }

    /// Evaluate in C[GL_n]_q; starred atoms are rejected.
    pub fn eval_gl(&self, n: u8) -> Result<GlElement> {
        let mut gs = Vec::new();
        self.gens(&mut gs);
        if let Some(g) = gs.iter().find(|g| g.starred) {
            return Err(Error::Config(format!("{g} is not an element of C[GL_n]_q")));
        }
        Ok(self.eval_boundary(n)?.into_inner())
    }
}

fn not_scalar(what: &str) -> Error {
    Error::Config(format!("expected a scalar, found {what}"))
}

trait Ring {
    type E: Clone;
    fn scalar(&self, c: Scalar) -> Self::E;
    fn gen(&self, g: Gen) -> Result<Self::E>;
    fn det(&self) -> Self::E;
    fn detinv(&self) -> Result<Self::E>;
    fn add(&self, a: &Self::E, b: &Self::E) -> Result<Self::E>;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Result<Self::E>;
    fn scale(&self, a: &Self::E, c: &Scalar) -> Self::E;
}

struct PolRing(u8);

impl Ring for PolRing {
    type E = NcElement;
    fn scalar(&self, c: Scalar) -> NcElement {
        NcElement::scalar(self.0, c)
    }
    fn gen(&self, g: Gen) -> Result<NcElement> {
        NcElement::generator(self.0, g)
    }
    fn det(&self) -> NcElement {
        det_q(self.0)
    }
    fn detinv(&self) -> Result<NcElement> {
        Err(Error::Config("detinv is not an element of Pol(Mat_n)_q".into()))
    }
    fn add(&self, a: &NcElement, b: &NcElement) -> Result<NcElement> {
        a.try_add(b)
    }
    fn mul(&self, a: &NcElement, b: &NcElement) -> Result<NcElement> {
        a.multiply(b)
    }
    fn scale(&self, a: &NcElement, c: &Scalar) -> NcElement {
        a.scale(c)
    }
}

struct GlRing(u8);

impl Ring for GlRing {
    type E = GlElement;
    fn scalar(&self, c: Scalar) -> GlElement {
        GlElement::scalar(self.0, c)
    }
    fn gen(&self, g: Gen) -> Result<GlElement> {
        Ok(restrict(&NcElement::generator(self.0, g)?)?.into_inner())
    }
    fn det(&self) -> GlElement {
        GlElement::det(self.0)
    }
    fn detinv(&self) -> Result<GlElement> {
        Ok(GlElement::det_inverse(self.0))
    }
    fn add(&self, a: &GlElement, b: &GlElement) -> Result<GlElement> {
        a.try_add(b)
    }
    fn mul(&self, a: &GlElement, b: &GlElement) -> Result<GlElement> {
        a.mul_raw(b)
    }
    fn scale(&self, a: &GlElement, c: &Scalar) -> GlElement {
        a.scale(c)
    }
}

fn eval_ring<R: Ring>(e: &Expr, r: &R) -> Result<R::E> {
    if e.is_scalar() {
        return Ok(r.scalar(e.eval_scalar()?));
    }
    match e {
        Expr::Int(_) | Expr::Q => unreachable!("scalar leaves handled above"),
        Expr::Gen(g) => r.gen(*g),
        Expr::Det => Ok(r.det()),
        Expr::DetInv => r.detinv(),
        Expr::Neg(x) => Ok(r.scale(&eval_ring(x, r)?, &-Scalar::one())),
        Expr::Sum(v) => {
            let mut acc = r.scalar(Scalar::zero());
            for x in v {
                acc = r.add(&acc, &eval_ring(x, r)?)?;
            }
            Ok(acc)
        }
        Expr::Product(v) => {
            let mut acc = r.scalar(Scalar::one());
            for x in v {
                acc = r.mul(&acc, &eval_ring(x, r)?)?;
            }
            Ok(acc)
        }
        Expr::Quotient(a, b) => {
            if !b.is_scalar() {
                return Err(Error::Config("only division by a scalar is supported".into()));
            }
            let c = Scalar::one().checked_div(&b.eval_scalar()?)?;
            Ok(r.scale(&eval_ring(a, r)?, &c))
        }
        Expr::Power(x, k) => {
            let k = u32::try_from(*k)
                .map_err(|_| Error::Config("negative powers are only defined for scalars".into()))?;
            let base = eval_ring(x, r)?;
            let mut acc = r.scalar(Scalar::one());
            for _ in 0..k {
                acc = r.mul(&acc, &base)?;
            }
            Ok(acc)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Q,
    Z(bool),
    Det,
    DetInv,
    LParen,
    RParen,
    RBracket,
    Comma,
    Plus,
    Minus,
    Slash,
    Caret,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(i) => write!(f, "{i}"),
            Tok::Q => write!(f, "q"),
            Tok::Z(false) => write!(f, "z["),
            Tok::Z(true) => write!(f, "zs["),
            Tok::Det => write!(f, "det"),
            Tok::DetInv => write!(f, "detinv"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
        }
    }
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos: pos + 1, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            out.push((i, Tok::Int(text[i..end].parse().expect("digits"))));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_alphabetic() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let word = &text[i..end];
            let bracket = matches!(chars.peek(), Some((_, '[')));
            let tok = match (word, bracket) {
                ("q", _) => Tok::Q,
                ("det", _) => Tok::Det,
                ("detinv", _) => Tok::DetInv,
                ("z", true) => Tok::Z(false),
                ("zs", true) => Tok::Z(true),
                ("z" | "zs", false) => return Err(err(end, format!("expected '[' after {word}"))),
                _ => return Err(err(i, format!("unknown symbol '{word}'"))),
            };
            if bracket && matches!(tok, Tok::Z(_)) {
                chars.next();
            }
            out.push((i, tok));
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '*' => {
                return Err(err(
                    i,
                    "'*' is not an operator: write products by juxtaposition and adjoints with zs[a,b]",
                ))
            }
            _ => return Err(err(i, format!("unexpected character '{c}'"))),
        };
        out.push((i, tok));
        chars.next();
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(err(pos, format!("expected '{want}', found '{t}'"))),
            None => Err(err(pos, format!("expected '{want}', found end of input"))),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(i)) => Ok(i),
            Some(t) => Err(err(pos, format!("expected an integer, found '{t}'"))),
            None => Err(err(pos, "expected an integer, found end of input")),
        }
    }

    fn index(&mut self) -> Result<u8> {
        let pos = self.pos();
        let i = self.uint()?;
        u8::try_from(&i).map_err(|_| err(pos, format!("index {i} is too large")))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut neg = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            terms.push(if neg { Expr::Neg(Box::new(t)) } else { t });
            match self.peek() {
                Some(Tok::Plus) => neg = false,
                Some(Tok::Minus) => neg = true,
                _ => break,
            }
            self.bump();
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_) | Tok::Q | Tok::Z(_) | Tok::Det | Tok::DetInv | Tok::LParen))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.quot()?];
        while self.starts_factor() {
            fs.push(self.quot()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) })
    }

    fn quot(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        while self.peek() == Some(&Tok::Slash) {
            self.bump();
            e = Expr::Quotient(Box::new(e), Box::new(self.power()?));
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            let neg = if self.peek() == Some(&Tok::Minus) {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.pos();
            let k = self.uint()?;
            let k = i64::try_from(&k).map_err(|_| err(pos, "exponent too large"))?;
            e = Expr::Power(Box::new(e), if neg { -k } else { k });
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(i)) => Ok(Expr::Int(i)),
            Some(Tok::Q) => Ok(Expr::Q),
            Some(Tok::Det) => Ok(Expr::Det),
            Some(Tok::DetInv) => Ok(Expr::DetInv),
            Some(Tok::Z(starred)) => {
                let col = self.index()?;
                self.expect(Tok::Comma)?;
                let row = self.index()?;
                self.expect(Tok::RBracket)?;
                Ok(Expr::Gen(Gen { starred, col, row }))
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(t) => Err(err(pos, format!("unexpected '{t}'"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, at: 0, end: text.len() };
    if p.peek().is_none() {
        return Err(err(0, "empty expression"));
    }
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return Err(err(p.pos(), format!("unexpected '{t}'")));
    }
    Ok(e)
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    parse(text)?.eval_scalar()
}

pub fn parse_pol(text: &str, n: u8) -> Result<NcElement> {
    parse(text)?.eval_pol(n)
}
