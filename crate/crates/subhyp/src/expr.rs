//! Tiny arithmetic expression evaluator for boundary-data rules.
//!
//! Grammar: numbers, the anchor variables `ax` / `ay`, `+ - * / ^`, unary
//! minus, parentheses, the constants `pi` and `e`, and the functions `abs`,
//! `sqrt`, `exp`, `log`, `sin`, `cos`, `min(,)`, `max(,)`, `pow(,)`,
//! `hypot(,)`. `^` is right-associative.

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call2(Fn2, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Var {
    Ax,
    Ay,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fn2 {
    Min,
    Max,
    Pow,
    Hypot,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser {
            tokens: tokenize(text)?,
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::InvalidInput(format!(
                "trailing input in expression {text:?}"
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, ax: f64, ay: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::Ax) => ax,
            Expr::Var(Var::Ay) => ay,
            Expr::Unary(op, e) => {
                let v = e.eval(ax, ay);
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Abs => v.abs(),
                    UnaryOp::Sqrt => v.sqrt(),
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Log => v.ln(),
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                }
            }
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(ax, ay), r.eval(ax, ay));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call2(f, l, r) => {
                let (a, b) = (l.eval(ax, ay), r.eval(ax, ay));
                match f {
                    Fn2::Min => a.min(b),
                    Fn2::Max => a.max(b),
                    Fn2::Pow => a.powf(b),
                    Fn2::Hypot => a.hypot(b),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, '0'..='9' | '.' | 'e' | 'E')
                {
                    // allow exponent signs
                    if matches!(bytes[i] as char, 'e' | 'E')
                        && i + 1 < bytes.len()
                        && matches!(bytes[i + 1] as char, '+' | '-')
                    {
                        i += 1;
                    }
                    i += 1;
                }
                let s = &text[start..i];
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))?;
                out.push(Token::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push(Token::Ident(text[start..i].to_string()));
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unexpected character {other:?} in expression"
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
            Some(got) if got == t => Ok(()),
            got => Err(Error::InvalidInput(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Binary(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Binary(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    lhs = Expr::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    lhs = Expr::Binary(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exp = self.power()?; // right-associative
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(e)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "ax" => Ok(Expr::Var(Var::Ax)),
                "ay" => Ok(Expr::Var(Var::Ay)),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                "abs" | "sqrt" | "exp" | "log" | "sin" | "cos" => {
                    self.expect(Token::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    let op = match name.as_str() {
                        "abs" => UnaryOp::Abs,
                        "sqrt" => UnaryOp::Sqrt,
                        "exp" => UnaryOp::Exp,
                        "log" => UnaryOp::Log,
                        "sin" => UnaryOp::Sin,
                        _ => UnaryOp::Cos,
                    };
                    Ok(Expr::Unary(op, Box::new(arg)))
                }
                "min" | "max" | "pow" | "hypot" => {
                    self.expect(Token::LParen)?;
                    let a = self.expr()?;
                    self.expect(Token::Comma)?;
                    let b = self.expr()?;
                    self.expect(Token::RParen)?;
                    let f = match name.as_str() {
                        "min" => Fn2::Min,
                        "max" => Fn2::Max,
                        "pow" => Fn2::Pow,
                        _ => Fn2::Hypot,
                    };
                    Ok(Expr::Call2(f, Box::new(a), Box::new(b)))
                }
                other => Err(Error::InvalidInput(format!(
                    "unknown identifier {other:?} in expression"
                ))),
            },
            got => Err(Error::InvalidInput(format!(
                "unexpected token {got:?} in expression"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn arithmetic_and_precedence() {
        let e = Expr::parse("1 + 2 * 3 - 4 / 2").unwrap();
        assert_abs_diff_eq!(e.eval(0.0, 0.0), 5.0);
        let e = Expr::parse("2 ^ 3 ^ 2").unwrap(); // right-assoc: 2^9
        assert_abs_diff_eq!(e.eval(0.0, 0.0), 512.0);
        let e = Expr::parse("-(ax + ay) * 2").unwrap();
        assert_abs_diff_eq!(e.eval(1.0, 2.0), -6.0);
    }

    #[test]
    fn functions() {
        let e = Expr::parse("max(abs(ax - 0.5), abs(ay))").unwrap();
        assert_abs_diff_eq!(e.eval(0.25, -0.1), 0.25);
        let e = Expr::parse("min(1, max(0, (0.25 - ay) / 0.5))").unwrap();
        assert_abs_diff_eq!(e.eval(0.0, 0.25), 0.0);
        assert_abs_diff_eq!(e.eval(0.0, -0.25), 1.0);
        assert_abs_diff_eq!(e.eval(0.0, 0.0), 0.5);
        let e = Expr::parse("hypot(3, 4) + sqrt(2) ^ 2").unwrap();
        assert_abs_diff_eq!(e.eval(0.0, 0.0), 7.0, epsilon = 1e-12);
        let e = Expr::parse("1e-3 + 2E2").unwrap();
        assert_abs_diff_eq!(e.eval(0.0, 0.0), 200.001);
    }

    #[test]
    fn parse_errors() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("min(1)").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("@").is_err());
    }
}
