//! Minimal arithmetic expressions in x and y for source terms.
//!
//! Grammar: numbers, `x`, `y`, unary minus, `+ - * /`, integer powers with
//! `^`, and parentheses. Enough to express the polynomial sources the
//! Green-function cross-checks use (`"1"`, `"x"`, `"4*(1 - x^2 - y^2)"`).

use crate::{Error, Result};

/// A parsed source expression.
#[derive(Debug, Clone)]
pub enum Expr {
    Const(f64),
    X,
    Y,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Config(format!(
                "unexpected trailing input in expression at token {}",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Y => y,
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Expr::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Expr::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Expr::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Expr::Pow(e, n) => e.eval(x, y).powi(*n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    X,
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            'x' => {
                tokens.push(Token::X);
                i += 1;
            }
            'y' => {
                tokens.push(Token::Y);
                i += 1;
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && matches!(chars[i - 1], 'e' | 'E')))
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number \"{s}\" in expression")))?;
                tokens.push(Token::Num(v));
            }
            other => {
                return Err(Error::Config(format!(
                    "unexpected character '{other}' in expression"
                )))
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Star => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        if self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            return self.factor();
        }
        let mut base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let sign = if self.peek() == Some(&Token::Minus) {
                self.pos += 1;
                -1
            } else {
                1
            };
            match self.peek().cloned() {
                Some(Token::Num(v)) if v.fract() == 0.0 && v.abs() < 1e9 => {
                    self.pos += 1;
                    base = Expr::Pow(Box::new(base), sign * v as i32);
                }
                _ => return Err(Error::Config("exponent must be an integer".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Token::X) => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Some(Token::Y) => {
                self.pos += 1;
                Ok(Expr::Y)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(Error::Config("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::Config(format!("unexpected token {other:?} in expression"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_variables() {
        assert_eq!(Expr::parse("1").unwrap().eval(0.3, 0.7), 1.0);
        assert_eq!(Expr::parse("x").unwrap().eval(0.3, 0.7), 0.3);
        assert_eq!(Expr::parse("y").unwrap().eval(0.3, 0.7), 0.7);
        assert_eq!(Expr::parse("-2.5e-1").unwrap().eval(0.0, 0.0), -0.25);
    }

    #[test]
    fn arithmetic_and_precedence() {
        let e = Expr::parse("1 + 2*x - y/2").unwrap();
        assert_eq!(e.eval(3.0, 4.0), 1.0 + 6.0 - 2.0);
        let p = Expr::parse("4*(1 - x^2 - y^2)").unwrap();
        assert!((p.eval(0.5, 0.5) - 4.0 * 0.5).abs() < 1e-15);
        assert_eq!(Expr::parse("2^-2").unwrap().eval(0.0, 0.0), 0.25);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("sin(x)").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(x").is_err());
        assert!(Expr::parse("x^0.5").is_err());
    }
}
