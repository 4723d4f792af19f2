//! Arithmetic expressions in one integer variable `n`.
//!
//! Custom coefficient sequences are written as plain formulas, e.g.
//! `n + 1 + 0.25*(-1)^n*log(n+1)^(-2)`. Expressions are parsed once and
//! evaluated in extended precision regardless of the working scalar, so a
//! custom sequence never injects double-rounding noise into a deep run.
//!
//! Grammar: `+ - * / ^` with usual precedence, `^` binds tightest and is
//! right-associative, unary minus, parentheses, and the functions `log`
//! (natural), `sqrt`, `exp`, `abs`. Integer exponents are computed by
//! repeated squaring, so `(-1)^n` is exact.

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64, String),
    Var,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Log(Box<Node>),
    Sqrt(Box<Node>),
    Exp(Box<Node>),
    Abs(Box<Node>),
}

/// A parsed expression over `n`.
#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    root: Node,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Invalid(format!(
                "unexpected trailing input in expression at token {}",
                p.pos
            )));
        }
        Ok(Self {
            source: source.trim().to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates at integer `n` in extended precision.
    pub fn eval(&self, n: u64) -> Result<DoubleDouble> {
        eval_node(&self.root, n)
    }
}

impl std::fmt::Display for Expression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.source)
    }
}

fn eval_node(node: &Node, n: u64) -> Result<DoubleDouble> {
    let v = match node {
        Node::Num(_, literal) => {
            DoubleDouble::parse(literal).ok_or_else(|| Error::Invalid(format!("bad literal {literal}")))?
        }
        Node::Var => DoubleDouble::from_u64(n),
        Node::Add(a, b) => eval_node(a, n)? + eval_node(b, n)?,
        Node::Sub(a, b) => eval_node(a, n)? - eval_node(b, n)?,
        Node::Mul(a, b) => eval_node(a, n)? * eval_node(b, n)?,
        Node::Div(a, b) => {
            let d = eval_node(b, n)?;
            if d == DoubleDouble::ZERO {
                return Err(Error::Invalid(format!("division by zero at n = {n}")));
            }
            eval_node(a, n)? / d
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, n)?;
            let exp = eval_node(b, n)?;
            let trunc = exp.trunc();
            if trunc == exp {
                // Integer power: exact parity, negative bases allowed.
                if exp.abs().to_f64() <= 1_000_000.0 {
                    base.powi(exp.to_f64() as i32)
                } else {
                    // Enormous exponents only make sense for base +-1,
                    // where only the parity matters.
                    let half = DoubleDouble::from_f64(0.5);
                    let two = DoubleDouble::from_f64(2.0);
                    let even = (exp - (exp * half).trunc() * two).to_f64() == 0.0;
                    let b = base.to_f64();
                    if b == 1.0 {
                        DoubleDouble::ONE
                    } else if b == -1.0 {
                        if even {
                            DoubleDouble::ONE
                        } else {
                            -DoubleDouble::ONE
                        }
                    } else {
                        return Err(Error::Invalid(format!(
                            "exponent {exp} too large for base {b}"
                        )));
                    }
                }
            } else {
                if base.hi() < 0.0 {
                    return Err(Error::Invalid(format!(
                        "negative base with non-integer exponent at n = {n}"
                    )));
                }
                base.powf(exp)
            }
        }
        Node::Neg(a) => -eval_node(a, n)?,
        Node::Log(a) => {
            let x = eval_node(a, n)?;
            if x.hi() <= 0.0 {
                return Err(Error::Invalid(format!("log of non-positive value at n = {n}")));
            }
            x.ln()
        }
        Node::Sqrt(a) => {
            let x = eval_node(a, n)?;
            if x.hi() < 0.0 {
                return Err(Error::Invalid(format!("sqrt of negative value at n = {n}")));
            }
            x.sqrt()
        }
        Node::Exp(a) => eval_node(a, n)?.exp(),
        Node::Abs(a) => eval_node(a, n)?.abs(),
    };
    if !v.is_finite() {
        return Err(Error::Invalid(format!("non-finite value at n = {n}")));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64, String),
    Var,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' => i += 1,
            b'+' => {
                out.push(Token::Plus);
                i += 1;
            }
            b'-' => {
                out.push(Token::Minus);
                i += 1;
            }
            b'*' => {
                out.push(Token::Star);
                i += 1;
            }
            b'/' => {
                out.push(Token::Slash);
                i += 1;
            }
            b'^' => {
                out.push(Token::Caret);
                i += 1;
            }
            b'(' => {
                out.push(Token::LParen);
                i += 1;
            }
            b')' => {
                out.push(Token::RParen);
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                // Exponent suffix: 1e-3
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    let mut j = i + 1;
                    if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                        j += 1;
                    }
                    if j < b.len() && b[j].is_ascii_digit() {
                        i = j;
                        while i < b.len() && b[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &s[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad number literal {lit}")))?;
                out.push(Token::Num(v, lit.to_string()));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &s[start..i];
                if word == "n" {
                    out.push(Token::Var);
                } else {
                    out.push(Token::Ident(word.to_string()));
                }
            }
            _ => {
                return Err(Error::Invalid(format!(
                    "unexpected character {:?} in expression",
                    c as char
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Invalid(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            // Right-associative; allow a signed exponent like n^-2.
            let exp = self.unary_power()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    /// Exponent position: unary minus then another power expression.
    fn unary_power(&mut self) -> Result<Node> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary_power()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Node> {
        match self.next() {
            Some(Token::Num(v, lit)) => Ok(Node::Num(v, lit)),
            Some(Token::Var) => Ok(Node::Var),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.expect(Token::LParen)?;
                let arg = Box::new(self.expr()?);
                self.expect(Token::RParen)?;
                match name.as_str() {
                    "log" | "ln" => Ok(Node::Log(arg)),
                    "sqrt" => Ok(Node::Sqrt(arg)),
                    "exp" => Ok(Node::Exp(arg)),
                    "abs" => Ok(Node::Abs(arg)),
                    other => Err(Error::Invalid(format!("unknown function {other}"))),
                }
            }
            got => Err(Error::Invalid(format!("unexpected token {got:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, n: u64) -> f64 {
        Expression::parse(src).unwrap().eval(n).unwrap().to_f64()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1 + 2 * 3", 0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0), 9.0);
        assert_eq!(ev("2^3^2", 0), 512.0); // right-associative
        assert_eq!(ev("-2^2", 0), -4.0); // unary minus binds looser than ^
        assert_eq!(ev("2*n + 1", 5), 11.0);
        assert_eq!(ev("n^-2", 2), 0.25);
    }

    #[test]
    fn alternating_sign_is_exact() {
        let e = Expression::parse("(-1)^n").unwrap();
        for n in 0..20u64 {
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(e.eval(n).unwrap().to_f64(), want);
        }
        // Huge n still exact.
        assert_eq!(e.eval(10_000_000_001).unwrap().to_f64(), -1.0);
    }

    #[test]
    fn functions_evaluate() {
        assert!((ev("log(exp(2))", 0) - 2.0).abs() < 1e-30);
        assert!((ev("sqrt(n)", 9) - 3.0).abs() < 1e-30);
        assert_eq!(ev("abs(-3)", 0), 3.0);
        assert!((ev("n + 1 + 0.25*(-1)^n*log(n+1)^(-2)", 4) - (5.0 + 0.25 / 1.6094379124341003f64.powi(2))).abs() < 1e-14);
    }

    #[test]
    fn extended_precision_is_used() {
        // 1 + 1e-25 - 1 survives only beyond double precision.
        let e = Expression::parse("(1 + 1e-25) - 1").unwrap();
        let v = e.eval(1).unwrap();
        assert!((v.to_f64() - 1e-25).abs() < 1e-35);
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(Expression::parse("1 +").is_err());
        assert!(Expression::parse("foo(3)").is_err());
        assert!(Expression::parse("2 $ 3").is_err());
        assert!(Expression::parse("(1").is_err());
        assert!(Expression::parse("1 2").is_err());
    }

    #[test]
    fn eval_errors_are_reported() {
        assert!(Expression::parse("1/(n-3)").unwrap().eval(3).is_err());
        assert!(Expression::parse("log(n-5)").unwrap().eval(2).is_err());
        assert!(Expression::parse("sqrt(0-n)").unwrap().eval(4).is_err());
        assert!(Expression::parse("(-2)^0.5").unwrap().eval(1).is_err());
    }

    #[test]
    fn source_round_trips() {
        let e = Expression::parse("  n/log(n+1) + 1 ").unwrap();
        assert_eq!(e.source(), "n/log(n+1) + 1");
        assert_eq!(format!("{e}"), "n/log(n+1) + 1");
    }
}
