//! Text forms of ψ-functions, functions, block lists and number lists.
//!
//! ψ grammar:
//!
//! ```text
//! psi    := canonical | one | const(c) | power(c, ga, gb)
//!         | prod(psi, psi) | scale(c, psi) | rep(func)
//! func   := canonical | indicator(delta) | factor ('*' factor)*
//! factor := pw(piece, ...) | zero
//! piece  := [lo, hi, c, e]
//! ```
//!
//! `power(c, ga, gb)` is `c (p-a)^{-ga} (b-p)^{-gb}`. A function has one
//! factor per domain block.

use std::fmt;

use bgls_core::function::canonical_function;
use bgls_core::psi::{from_representation, multiply_psi, scale_psi};
use bgls_core::{BlockSpec, Factor, Interval, Piece, PiecewisePowerFactor, ProductFunction, PsiFunction, WeightedDomain};

/// A parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Punct(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

fn lex(src: &str, line: usize) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "inf" {
                toks.push((Tok::Num(f64::INFINITY), col));
            } else {
                toks.push((Tok::Ident(word), col));
            }
        } else if (c == '-' || c == '+') && chars[i + 1..].starts_with(&['i', 'n', 'f']) {
            toks.push((Tok::Num(if c == '-' { f64::NEG_INFINITY } else { f64::INFINITY }), col));
            i += 4;
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| ParseError { line, col, msg: format!("malformed number '{text}'") })?;
            toks.push((Tok::Num(v), col));
        } else if "(),[]*".contains(c) {
            toks.push((Tok::Punct(c), col));
            i += 1;
        } else {
            return Err(ParseError { line, col, msg: format!("unexpected character '{c}'") });
        }
    }
    toks.push((Tok::End, chars.len() + 1));
    Ok(Lexer { toks, pos: 0, line })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line, col: self.col(), msg: msg.into() })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected '{c}', found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(w) => {
                self.next();
                Ok(w)
            }
            t => self.err(format!("expected a name, found {}", describe(&t))),
        }
    }

    fn num(&mut self) -> Result<f64, ParseError> {
        match *self.peek() {
            Tok::Num(v) => {
                self.next();
                Ok(v)
            }
            ref t => self.err(format!("expected a number, found {}", describe(t))),
        }
    }

    fn args(&mut self, n: usize) -> Result<Vec<f64>, ParseError> {
        self.expect('(')?;
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(',')?;
            }
            v.push(self.num()?);
        }
        self.expect(')')?;
        Ok(v)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => self.err(format!("trailing input at {}", describe(t))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(w) => format!("'{w}'"),
        Tok::Num(v) => format!("number {v}"),
        Tok::Punct(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

/// Parsed ψ expression, resolved later against an interval and a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiExpr {
    Canonical,
    Const(f64),
    Power(f64, f64, f64),
    Prod(Box<PsiExpr>, Box<PsiExpr>),
    Scale(f64, Box<PsiExpr>),
    Rep(FuncExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FuncExpr {
    Canonical,
    Indicator(f64),
    Factors(Vec<Option<Vec<[f64; 4]>>>),
}

fn psi_expr(lx: &mut Lexer) -> Result<PsiExpr, ParseError> {
    let col = lx.col();
    let name = lx.ident()?;
    Ok(match name.as_str() {
        "canonical" => PsiExpr::Canonical,
        "one" => PsiExpr::Const(1.0),
        "const" => PsiExpr::Const(lx.args(1)?[0]),
        "power" => {
            let v = lx.args(3)?;
            PsiExpr::Power(v[0], v[1], v[2])
        }
        "prod" => {
            lx.expect('(')?;
            let x = psi_expr(lx)?;
            lx.expect(',')?;
            let y = psi_expr(lx)?;
            lx.expect(')')?;
            PsiExpr::Prod(Box::new(x), Box::new(y))
        }
        "scale" => {
            lx.expect('(')?;
            let c = lx.num()?;
            lx.expect(',')?;
            let x = psi_expr(lx)?;
            lx.expect(')')?;
            PsiExpr::Scale(c, Box::new(x))
        }
        "rep" => {
            lx.expect('(')?;
            let f = func_expr(lx)?;
            lx.expect(')')?;
            PsiExpr::Rep(f)
        }
        other => return Err(ParseError { line: lx.line, col, msg: format!("unknown ψ form '{other}'") }),
    })
}

fn factor(lx: &mut Lexer) -> Result<Option<Vec<[f64; 4]>>, ParseError> {
    let col = lx.col();
    match lx.ident()?.as_str() {
        "zero" => Ok(None),
        "pw" => {
            lx.expect('(')?;
            let mut pieces = Vec::new();
            loop {
                lx.expect('[')?;
                let mut q = [0.0; 4];
                for (i, slot) in q.iter_mut().enumerate() {
                    if i > 0 {
                        lx.expect(',')?;
                    }
                    *slot = lx.num()?;
                }
                lx.expect(']')?;
                pieces.push(q);
                if *lx.peek() == Tok::Punct(',') {
                    lx.next();
                } else {
                    break;
                }
            }
            lx.expect(')')?;
            Ok(Some(pieces))
        }
        other => Err(ParseError { line: lx.line, col, msg: format!("unknown factor form '{other}'") }),
    }
}

fn func_expr(lx: &mut Lexer) -> Result<FuncExpr, ParseError> {
    match lx.peek().clone() {
        Tok::Ident(w) if w == "canonical" => {
            lx.next();
            Ok(FuncExpr::Canonical)
        }
        Tok::Ident(w) if w == "indicator" => {
            lx.next();
            Ok(FuncExpr::Indicator(lx.args(1)?[0]))
        }
        _ => {
            let mut fs = vec![factor(lx)?];
            while *lx.peek() == Tok::Punct('*') {
                lx.next();
                fs.push(factor(lx)?);
            }
            Ok(FuncExpr::Factors(fs))
        }
    }
}

pub fn parse_psi(src: &str) -> Result<PsiExpr, ParseError> {
    parse_psi_at(src, 1)
}

/// As [`parse_psi`], reporting errors on config line `line`.
pub fn parse_psi_at(src: &str, line: usize) -> Result<PsiExpr, ParseError> {
    let mut lx = lex(src, line)?;
    let e = psi_expr(&mut lx)?;
    lx.finish()?;
    Ok(e)
}

pub fn parse_function(src: &str) -> Result<FuncExpr, ParseError> {
    parse_function_at(src, 1)
}

pub fn parse_function_at(src: &str, line: usize) -> Result<FuncExpr, ParseError> {
    let mut lx = lex(src, line)?;
    let e = func_expr(&mut lx)?;
    lx.finish()?;
    Ok(e)
}

/// Tolerance for the `L_p` norms of a `rep(...)` ψ.
const REP_TOL: f64 = 1e-11;

impl FuncExpr {
    pub fn build(&self, domain: &WeightedDomain, interval: Interval) -> bgls_core::Result<ProductFunction> {
        match self {
            FuncExpr::Canonical => canonical_function(domain, interval.a(), interval.b()),
            FuncExpr::Indicator(d) => bgls_core::function::indicator_of_measure(domain, *d),
            FuncExpr::Factors(fs) => {
                let mut factors = Vec::with_capacity(fs.len());
                for f in fs {
                    let pieces = match f {
                        None => Vec::new(),
                        Some(ps) => ps.iter().map(|q| Piece::power(q[0], q[1], q[2], q[3])).collect(),
                    };
                    factors.push(Factor::from(PiecewisePowerFactor::new(pieces)?));
                }
                ProductFunction::new(factors, domain.clone())
            }
        }
    }
}

impl PsiExpr {
    pub fn build(&self, domain: &WeightedDomain, interval: Interval) -> bgls_core::Result<PsiFunction> {
        match self {
            PsiExpr::Canonical => PsiFunction::canonical(domain, interval),
            PsiExpr::Const(c) => PsiFunction::constant(interval, *c),
            PsiExpr::Power(c, ga, gb) => PsiFunction::power(interval, *c, *ga, *gb),
            PsiExpr::Prod(x, y) => multiply_psi(&x.build(domain, interval)?, &y.build(domain, interval)?),
            PsiExpr::Scale(c, x) => scale_psi(&x.build(domain, interval)?, *c),
            PsiExpr::Rep(f) => from_representation(f.build(domain, interval)?, interval, REP_TOL),
        }
    }
}

fn simple_err(msg: String) -> ParseError {
    ParseError { line: 1, col: 1, msg }
}

/// Comma-separated floats; `inf` allowed.
pub fn parse_floats(src: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    let mut col = 1;
    for part in src.split(',') {
        let t = part.trim();
        let lead = part.len() - part.trim_start().len();
        let v = match t {
            "inf" | "+inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            _ => t.parse().map_err(|_| ParseError { line: 1, col: col + lead, msg: format!("malformed number '{t}'") })?,
        };
        out.push(v);
        col += part.len() + 1;
    }
    Ok(out)
}

/// `a,b` with `b` possibly `inf`.
pub fn parse_interval(src: &str) -> Result<Interval, ParseError> {
    let v = parse_floats(src)?;
    if v.len() != 2 {
        return Err(simple_err(format!("an interval needs two numbers, got {}", v.len())));
    }
    Interval::new(v[0], v[1]).map_err(|e| simple_err(e.to_string()))
}

/// `dim:theta,dim:theta,...`; a bare `dim` means `θ = 0`.
pub fn parse_blocks(src: &str) -> Result<WeightedDomain, ParseError> {
    let mut blocks = Vec::new();
    let mut col = 1;
    for part in src.split(',') {
        let err = |msg: String| ParseError { line: 1, col, msg };
        let (d, t) = match part.split_once(':') {
            Some((d, t)) => (d.trim(), t.trim()),
            None => (part.trim(), "0"),
        };
        let dim: usize = d.parse().map_err(|_| err(format!("malformed block dimension '{d}'")))?;
        let theta: f64 = t.parse().map_err(|_| err(format!("malformed block weight exponent '{t}'")))?;
        blocks.push(if theta == 0.0 { BlockSpec::lebesgue(dim) } else { BlockSpec::power(dim, theta, 1.0) });
        col += part.len() + 1;
    }
    WeightedDomain::new(blocks).map_err(|e| simple_err(e.to_string()))
}
