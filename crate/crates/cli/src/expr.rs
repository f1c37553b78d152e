//! Closed-form holomorphic expressions: `+ - * / ^`, `exp`, `sin`, `cos`,
//! the constants `i` and `pi`, numeric literals and named variables.
//!
//! Non-holomorphic primitives (`conj`, `re`, `im`, `abs`, `arg`) are rejected
//! at parse time. An expression can be evaluated pointwise or as a truncated
//! complex series.

use std::collections::BTreeSet;
use std::fmt;

use reflexcr_core::series::ComplexSeries;
use reflexcr_core::{Complex64, Error as CoreError};

const REJECTED: [&str; 6] = ["conj", "re", "im", "abs", "arg", "norm"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expression `{src}`: {msg} (at byte {pos})")]
pub struct ExprError {
    pub src: String,
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let err = |pos: usize, msg: String| ExprError {
        src: src.to_string(),
        pos,
        msg,
    };
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        match ch {
            c if c.is_whitespace() => k += 1,
            '0'..='9' | '.' => {
                let start = k;
                while k < chars.len() && (chars[k].1.is_ascii_digit() || chars[k].1 == '.') {
                    k += 1;
                }
                if k < chars.len() && matches!(chars[k].1, 'e' | 'E') {
                    let save = k;
                    k += 1;
                    if k < chars.len() && matches!(chars[k].1, '+' | '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].1.is_ascii_digit() {
                        while k < chars.len() && chars[k].1.is_ascii_digit() {
                            k += 1;
                        }
                    } else {
                        k = save;
                    }
                }
                let end = chars.get(k).map(|c| c.0).unwrap_or(src.len());
                let text = &src[pos..end];
                let v: f64 = text.parse().map_err(|_| err(chars[start].0, format!("malformed number `{text}`")))?;
                out.push((pos, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                    k += 1;
                }
                let end = chars.get(k).map(|c| c.0).unwrap_or(src.len());
                out.push((pos, Tok::Ident(src[pos..end].to_string())));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((pos, Tok::Op(ch)));
                k += 1;
            }
            '−' => {
                out.push((pos, Tok::Op('-')));
                k += 1;
            }
            '·' => {
                out.push((pos, Tok::Op('*')));
                k += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                k += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                k += 1;
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ExprError {
        ExprError {
            src: self.src.to_string(),
            pos: self.toks.get(self.at).map(|t| t.0).unwrap_or(self.src.len()),
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        t
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.at += 1;
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.at += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.at += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.at += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.at -= 1;
                        Err(self.err("expected `)`"))
                    }
                }
            }
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    self.at -= 1;
                    let func = match name.as_str() {
                        "exp" => Func::Exp,
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        n if REJECTED.contains(&n) => {
                            return Err(self.err(format!("`{n}` is not holomorphic and is not allowed")))
                        }
                        n => return Err(self.err(format!("unknown function `{n}`"))),
                    };
                    self.at += 2;
                    let arg = self.sum()?;
                    match self.next() {
                        Some(Tok::RParen) => Ok(Expr::Call(func, Box::new(arg))),
                        _ => {
                            self.at -= 1;
                            Err(self.err("expected `)` after function argument"))
                        }
                    }
                } else {
                    Ok(match name.as_str() {
                        "i" => Expr::I,
                        "pi" => Expr::Pi,
                        n if REJECTED.contains(&n) => {
                            self.at -= 1;
                            return Err(self.err(format!("`{n}` is not holomorphic and is not allowed")));
                        }
                        _ => Expr::Var(name),
                    })
                }
            }
            Some(_) => {
                self.at -= 1;
                Err(self.err("expected a number, variable, function call or `(`"))
            }
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

/// Parses an expression.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(src)?;
    let mut p = Parser { src, toks, at: 0 };
    if p.toks.is_empty() {
        return Err(p.err("empty expression"));
    }
    let e = p.sum()?;
    if p.at < p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl Expr {
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            _ => {}
        }
    }

    /// Resolves variable names to argument positions; `names[k]` becomes
    /// argument `k`. Unknown names are an error.
    pub fn compile(&self, names: &[&str]) -> Result<Compiled, String> {
        Ok(Compiled(self.resolve(names)?))
    }

    fn resolve(&self, names: &[&str]) -> Result<Node, String> {
        Ok(match self {
            Expr::Num(v) => Node::Const(Complex64::new(*v, 0.0)),
            Expr::I => Node::Const(Complex64::i()),
            Expr::Pi => Node::Const(Complex64::new(std::f64::consts::PI, 0.0)),
            Expr::Var(v) => match names.iter().position(|n| n == v) {
                Some(k) => Node::Arg(k),
                None => return Err(format!("unknown variable `{v}` (expected one of {names:?})")),
            },
            Expr::Neg(a) => Node::Neg(Box::new(a.resolve(names)?)),
            Expr::Call(f, a) => Node::Call(*f, Box::new(a.resolve(names)?)),
            Expr::Bin(op, a, b) => Node::Bin(*op, Box::new(a.resolve(names)?), Box::new(b.resolve(names)?)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(Complex64),
    Arg(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Expression with variables bound to argument positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled(Node);

impl Node {
    fn constant(&self) -> Option<Complex64> {
        self.is_closed().then(|| self.eval(&[]))
    }

    fn is_closed(&self) -> bool {
        match self {
            Node::Const(_) => true,
            Node::Arg(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_closed(),
            Node::Bin(_, a, b) => a.is_closed() && b.is_closed(),
        }
    }

    fn eval(&self, args: &[Complex64]) -> Complex64 {
        match self {
            Node::Const(c) => *c,
            Node::Arg(k) => args[*k],
            Node::Neg(a) => -a.eval(args),
            Node::Call(f, a) => {
                let x = a.eval(args);
                match f {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                }
            }
            Node::Bin(op, a, b) => {
                let x = a.eval(args);
                match op {
                    BinOp::Add => x + b.eval(args),
                    BinOp::Sub => x - b.eval(args),
                    BinOp::Mul => x * b.eval(args),
                    BinOp::Div => x / b.eval(args),
                    BinOp::Pow => match small_integer(b) {
                        Some(k) => x.powi(k),
                        None => x.powc(b.eval(args)),
                    },
                }
            }
        }
    }

    fn eval_series(&self, args: &[ComplexSeries], one: &ComplexSeries) -> Result<ComplexSeries, CoreError> {
        Ok(match self {
            Node::Const(c) => one.scale(*c)?,
            Node::Arg(k) => args[*k].clone(),
            Node::Neg(a) => a.eval_series(args, one)?.neg(),
            Node::Call(f, a) => {
                let x = a.eval_series(args, one)?;
                match f {
                    Func::Exp => x.exp()?,
                    Func::Sin => x.sin()?,
                    Func::Cos => x.cos()?,
                }
            }
            Node::Bin(op, a, b) => {
                let x = a.eval_series(args, one)?;
                match op {
                    BinOp::Add => x.add(&b.eval_series(args, one)?)?,
                    BinOp::Sub => x.sub(&b.eval_series(args, one)?)?,
                    BinOp::Mul => x.mul(&b.eval_series(args, one)?)?,
                    BinOp::Div => match b.constant() {
                        Some(c) if c != Complex64::new(0.0, 0.0) => x.scale(1.0 / c)?,
                        _ => {
                            return Err(CoreError::InvalidInput(
                                "series expansion supports division by nonzero constants only".into(),
                            ))
                        }
                    },
                    BinOp::Pow => match small_integer(b) {
                        Some(k) if k >= 0 => x.powi(k as u32)?,
                        _ => {
                            return Err(CoreError::InvalidInput(
                                "series expansion supports nonnegative integer powers only".into(),
                            ))
                        }
                    },
                }
            }
        })
    }
}

fn small_integer(n: &Node) -> Option<i32> {
    let c = n.constant()?;
    (c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() <= 1024.0).then_some(c.re as i32)
}

impl Compiled {
    pub fn eval(&self, args: &[Complex64]) -> Complex64 {
        self.0.eval(args)
    }

    /// Evaluates with series arguments; `args` must share one variable set.
    pub fn eval_series(&self, args: &[ComplexSeries]) -> Result<ComplexSeries, CoreError> {
        let template = args
            .first()
            .ok_or_else(|| CoreError::InvalidInput("series evaluation needs at least one argument".into()))?;
        let one = ComplexSeries::constant_like(&template.re, Complex64::new(1.0, 0.0));
        self.0.eval_series(args, &one)
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_closed()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::I => f.write_str("i"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                };
                write!(f, "{name}({a})")
            }
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
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use reflexcr_core::series::MultiSeries;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ev(src: &str, z: Complex64) -> Complex64 {
        parse(src).unwrap().compile(&["z"]).unwrap().eval(&[z])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", c(0.0, 0.0)), c(7.0, 0.0));
        assert_eq!(ev("2^3^2", c(0.0, 0.0)), c(512.0, 0.0));
        assert_eq!(ev("-2^2", c(0.0, 0.0)), c(-4.0, 0.0));
        assert_eq!(ev("(1 - z) / 2", c(3.0, 0.0)), c(-1.0, 0.0));
        assert_eq!(ev("z*z - 1e-1*10", c(2.0, 0.0)), c(3.0, 0.0));
        assert_eq!(ev("2 · z − 1", c(2.0, 0.0)), c(3.0, 0.0));
    }

    #[test]
    fn constants_and_functions() {
        let z = c(0.3, -0.2);
        assert!((ev("exp(i*z)", z) - (Complex64::i() * z).exp()).norm() < 1e-16);
        assert!((ev("sin(z)^2 + cos(z)^2", z) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((ev("exp(i*pi)", z) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((ev("z^0.5", c(4.0, 0.0)) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_holomorphic_and_malformed() {
        for bad in ["conj(z)", "abs(z) + 1", "re(z)", "z +", "(z", "sinh(z)", "z $ 2", "", "2 3"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
        let e = parse("conj(z)").unwrap_err();
        assert!(e.msg.contains("not holomorphic"));
        assert!(parse("q + 1").unwrap().compile(&["z"]).is_err());
    }

    #[test]
    fn series_evaluation_matches_pointwise() {
        let x = MultiSeries::polynomial(&["x", "y"], 24, [(vec![1, 0], 1.0)]).unwrap();
        let y = x.variable_like("y").unwrap();
        let z = ComplexSeries::new(x, y);
        let e = parse("exp(i*z) * (z^2 - 3) / 2 + cos(z)").unwrap().compile(&["z"]).unwrap();
        let s = e.eval_series(&[z]).unwrap();
        let at = [0.1, -0.15];
        let got = c(s.re.eval_real(&at).unwrap(), s.im.eval_real(&at).unwrap());
        assert!((got - e.eval(&[c(at[0], at[1])])).norm() < 1e-14);
    }

    #[test]
    fn series_rejects_variable_division() {
        let x = MultiSeries::polynomial(&["x"], 8, [(vec![1], 1.0)]).unwrap();
        let z = ComplexSeries::real(x);
        let e = parse("1 / (1 + z)").unwrap().compile(&["z"]).unwrap();
        assert!(e.eval_series(&[z]).is_err());
    }
}
