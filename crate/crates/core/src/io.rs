//! Expressions, the `BFN1` coefficient file format, and plane slices.

use std::fmt;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::ball::{cart_to_sph, sph_to_cart, BallScalar, ConstructOptions, Coords};
use crate::error::{BallError, Result};
use crate::real::{Real, C};
use crate::tensor::CffTensor;

// ---------------------------------------------------------------------------
// Expressions

/// Failure to parse an expression. Offsets are byte positions in the source.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    Unknown { offset: usize, name: String },
    #[error("function `{name}` at byte {offset} takes 1 argument, got {got}")]
    Arity { offset: usize, name: String, got: usize },
}

/// Failure while evaluating an expression.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
    R,
    Lam,
    Th,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Parsed expression over `x, y, z` and `r, lam, th`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Var {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "x" => Var::X,
            "y" => Var::Y,
            "z" => Var::Z,
            "r" => Var::R,
            "lam" => Var::Lam,
            "th" => Var::Th,
            _ => return None,
        })
    }
    fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::R => "r",
            Var::Lam => "lam",
            Var::Th => "th",
        }
    }
}

impl Func {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let ch = b[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if ch.is_ascii_digit() || (ch == b'.' && b.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{text}`") })?;
            out.push((Tok::Num(v), start));
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match ch {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(ch as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                _ => {
                    let c = src[i..].chars().next().unwrap_or('?');
                    return Err(ParseError::Syntax { offset: i, message: format!("unexpected character `{c}`") });
                }
            };
            out.push((tok, start));
            i += 1;
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }
    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match *self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    /// `primary ('^' unary)?`: binds tighter than unary minus on its left
    /// and recurses to the right, so `^` is right-associative.
    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            let at = self.offset();
            self.bump();
            let exp = self.unary()?;
            if let (Some(b), Some(e)) = (const_value(&base), const_value(&exp)) {
                if b < 0.0 && e.fract() != 0.0 {
                    log::warn!("non-integer power of a negative base at byte {at}");
                }
            }
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let Some(f) = Func::parse(&name) else {
                        return Err(ParseError::Unknown { offset: at, name });
                    };
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.expr()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    if *self.peek() != Tok::RParen {
                        return self.syntax("expected `)` after arguments");
                    }
                    self.bump();
                    if args.len() != 1 {
                        return Err(ParseError::Arity { offset: at, name, got: args.len() });
                    }
                    return Ok(Expr::Call(f, Box::new(args.pop().expect("one argument"))));
                }
                if let Some(v) = Var::parse(&name) {
                    Ok(Expr::Var(v))
                } else if name == "pi" {
                    Ok(Expr::Const(Constant::Pi))
                } else if name == "e" {
                    Ok(Expr::Const(Constant::E))
                } else {
                    Err(ParseError::Unknown { offset: at, name })
                }
            }
            Tok::End => Err(ParseError::Syntax { offset: at, message: "unexpected end of input".into() }),
            other => Err(ParseError::Syntax { offset: at, message: format!("unexpected token {other:?}") }),
        }
    }
}

fn const_value(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Const(Constant::Pi) => Some(std::f64::consts::PI),
        Expr::Const(Constant::E) => Some(std::f64::consts::E),
        Expr::Neg(a) => const_value(a).map(|v| -v),
        _ => None,
    }
}

/// Parses `src` into an expression tree.
pub fn parse_expr(src: &str) -> std::result::Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

fn pow(b: f64, e: f64) -> std::result::Result<f64, EvalError> {
    if e.fract() == 0.0 && e.abs() <= 1024.0 {
        return Ok(b.powi(e as i32));
    }
    if b < 0.0 {
        return Err(EvalError::Domain(format!("{b}^{e} is not real")));
    }
    Ok(b.powf(e))
}

impl Expr {
    /// Value at `(x, y, z)`; spherical variables are derived from the point.
    pub fn eval(&self, x: f64, y: f64, z: f64) -> std::result::Result<f64, EvalError> {
        let (r, lam, th) = cart_to_sph(x, y, z);
        self.eval_with(&[x, y, z, r, lam, th])
    }

    /// Value at spherical `(r, λ, θ)`.
    pub fn eval_sph(&self, r: f64, lam: f64, th: f64) -> std::result::Result<f64, EvalError> {
        let (x, y, z) = sph_to_cart(r, lam, th);
        self.eval_with(&[x, y, z, r, lam, th])
    }

    fn eval_with(&self, v: &[f64; 6]) -> std::result::Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(a) => *a,
            Expr::Var(var) => v[*var as usize],
            Expr::Const(Constant::Pi) => std::f64::consts::PI,
            Expr::Const(Constant::E) => std::f64::consts::E,
            Expr::Neg(a) => -a.eval_with(v)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_with(v)?, b.eval_with(v)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b)?,
                }
            }
            Expr::Call(f, a) => {
                let a = a.eval_with(v)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Log if a > 0.0 => a.ln(),
                    Func::Log => return Err(EvalError::Domain(format!("log({a})"))),
                    Func::Sqrt if a >= 0.0 => a.sqrt(),
                    Func::Sqrt => return Err(EvalError::Domain(format!("sqrt({a})"))),
                }
            }
        })
    }

    /// Builds the ball function of this expression, sampling in `coords`.
    pub fn construct(&self, coords: Coords, opts: &ConstructOptions) -> Result<BallScalar<f64>> {
        let f = |a: f64, b: f64, c_: f64| -> Result<C<f64>> {
            let v = match coords {
                Coords::Cartesian => self.eval(a, b, c_),
                Coords::Spherical => self.eval_sph(a, b, c_),
            };
            v.map(|v| C::new(v, 0.0)).map_err(|e| BallError::Evaluator(e.to_string()))
        };
        BallScalar::construct_with(coords, opts, f, true)
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesised form; parsing it yields the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let o = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {o} {b})")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

// ---------------------------------------------------------------------------
// BFN1 files

const MAGIC: &[u8; 4] = b"BFN1";
const HEADER: usize = 17;

fn coords_byte(c: Coords) -> u8 {
    match c {
        Coords::Cartesian => 0,
        Coords::Spherical => 1,
    }
}

/// Serialises coefficients: magic, `m n p` as little-endian `u32`, a
/// coordinate byte, then `(re, im)` pairs as little-endian `f64` in storage
/// order `i + m (s + n t)`.
pub fn to_bytes<T: Real>(a: &CffTensor<T>, coords: Coords) -> Result<Vec<u8>> {
    let [m, n, p] = a.sizes();
    let mut out = Vec::with_capacity(HEADER + 16 * a.data().len());
    out.extend_from_slice(MAGIC);
    for d in [m, n, p] {
        let d = u32::try_from(d).map_err(|_| BallError::Format(format!("size {d} does not fit in 32 bits")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    out.push(coords_byte(coords));
    for z in a.data() {
        out.extend_from_slice(&z.re.as_f64().to_le_bytes());
        out.extend_from_slice(&z.im.as_f64().to_le_bytes());
    }
    Ok(out)
}

/// Inverse of [`to_bytes`]; validates magic, sizes and length.
pub fn from_bytes<T: Real>(bytes: &[u8]) -> Result<(CffTensor<T>, Coords)> {
    if bytes.len() < HEADER {
        return Err(BallError::Format(format!("file has {} bytes, header needs {HEADER}", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(BallError::Format("bad magic (expected BFN1)".into()));
    }
    let dim = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as u64;
    let (m, n, p) = (dim(4), dim(8), dim(12));
    let coords = match bytes[16] {
        0 => Coords::Cartesian,
        1 => Coords::Spherical,
        b => return Err(BallError::Format(format!("unknown coordinate byte {b}"))),
    };
    let count = m
        .checked_mul(n)
        .and_then(|x| x.checked_mul(p))
        .filter(|&c| c > 0)
        .ok_or_else(|| BallError::Format(format!("invalid sizes {m}x{n}x{p}")))?;
    let expected = count.checked_mul(16).and_then(|x| x.checked_add(HEADER as u64));
    if expected != Some(bytes.len() as u64) {
        return Err(BallError::Format(format!(
            "length {} does not match sizes {m}x{n}x{p} (expected {})",
            bytes.len(),
            expected.map_or("overflow".to_string(), |e| e.to_string())
        )));
    }
    let f = |o: usize| T::lit(f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes")));
    let data = (0..count as usize).map(|q| C::new(f(HEADER + 16 * q), f(HEADER + 16 * q + 8))).collect();
    Ok((CffTensor::from_vec(m as usize, n as usize, p as usize, data)?, coords))
}

/// Writes `f` to `path` in the `BFN1` format.
pub fn save<T: Real>(f: &BallScalar<T>, coords: Coords, path: impl AsRef<Path>) -> Result<()> {
    let bytes = to_bytes(f.coeffs(), coords)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

/// Reads a `BFN1` file. Coefficients are taken verbatim.
pub fn load<T: Real>(path: impl AsRef<Path>) -> Result<(BallScalar<T>, Coords)> {
    let bytes = std::fs::read(path)?;
    let (a, coords) = from_bytes(&bytes)?;
    Ok((BallScalar::from_coeffs_raw(a, true), coords))
}

// ---------------------------------------------------------------------------
// Slices

/// Plane (or the boundary sphere) to sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Plane {
    X(f64),
    Y(f64),
    Z(f64),
    Sphere,
}

impl Plane {
    /// Parses `x=c`, `y=c`, `z=c` or `r=1`.
    pub fn parse(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| BallError::Precondition(format!("plane `{s}` must look like z=0.5 or r=1")))?;
        let v: f64 = rhs
            .trim()
            .parse()
            .map_err(|_| BallError::Precondition(format!("plane value `{rhs}` is not a number")))?;
        let plane = match lhs.trim() {
            "x" => Plane::X(v),
            "y" => Plane::Y(v),
            "z" => Plane::Z(v),
            "r" if v == 1.0 => Plane::Sphere,
            "r" => return Err(BallError::Precondition("only the sphere r=1 is supported".into())),
            other => return Err(BallError::Precondition(format!("unknown plane variable `{other}`"))),
        };
        Ok(plane)
    }

    /// Column names of the emitted records.
    pub fn header(&self) -> [&'static str; 3] {
        match self {
            Plane::X(_) => ["y", "z", "value"],
            Plane::Y(_) => ["x", "z", "value"],
            Plane::Z(_) => ["x", "y", "value"],
            Plane::Sphere => ["lam", "theta", "value"],
        }
    }
}

/// One sample `(a, b, f)` of a slice, `a` and `b` being the in-plane coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceRecord {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// Samples `f` on a `res × res` lattice of the plane, keeping points inside
/// the closed ball, in row-major order (`a` fastest). On the sphere the
/// lattice covers `λ ∈ [-π, π)` and `θ ∈ [0, π]`.
pub fn emit_slice(f: &BallScalar<f64>, plane: Plane, res: usize) -> Result<Vec<SliceRecord>> {
    if res < 2 {
        return Err(BallError::Precondition("slice resolution must be at least 2".into()));
    }
    let mut out = Vec::new();
    if plane == Plane::Sphere {
        let pi = std::f64::consts::PI;
        for bi in 0..res {
            let th = pi * bi as f64 / (res - 1) as f64;
            for ai in 0..res {
                let lam = -pi + 2.0 * pi * ai as f64 / res as f64;
                out.push(SliceRecord { a: lam, b: th, value: f.eval_sph(1.0, lam, th).re });
            }
        }
        return Ok(out);
    }
    let c = match plane {
        Plane::X(c) | Plane::Y(c) | Plane::Z(c) => c,
        Plane::Sphere => unreachable!(),
    };
    if !(c.abs() <= 1.0) {
        return Err(BallError::Precondition(format!("plane at {c} does not intersect the unit ball")));
    }
    let step = 2.0 / (res - 1) as f64;
    for bi in 0..res {
        let b = -1.0 + step * bi as f64;
        for ai in 0..res {
            let a = -1.0 + step * ai as f64;
            if a * a + b * b + c * c > 1.0 {
                continue;
            }
            let (x, y, z) = match plane {
                Plane::X(_) => (c, a, b),
                Plane::Y(_) => (a, c, b),
                _ => (a, b, c),
            };
            out.push(SliceRecord { a, b, value: f.eval(x, y, z)? });
        }
    }
    Ok(out)
}

/// Writes slice records as CSV with a single header row.
pub fn write_slice_csv<W: std::io::Write>(plane: Plane, records: &[SliceRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| BallError::Io(std::io::Error::other(e));
    wr.write_record(plane.header()).map_err(io)?;
    for r in records {
        wr.write_record([fmt_g(r.a), fmt_g(r.b), fmt_g(r.value)]).map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// Formats like C's `%.15g`: 15 significant digits, trailing zeros removed,
/// exponent form outside `[1e-5, 1e15)`.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.14e}", v);
    // rounding can bump the exponent, so read it back from the formatted string
    let (mant, e) = sci.split_once('e').expect("exponent present");
    let e: i32 = e.parse().expect("integer exponent");
    if !(-5..15).contains(&e) {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs());
    }
    let decimals = (14 - e).max(0) as usize;
    let s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
