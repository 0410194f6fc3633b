//! Constant expressions for target values such as `(5+sqrt(33))/2`.
//!
//! The expression is kept as a tree so it can be re-evaluated at any
//! precision; certificate escalation relies on this.

use std::fmt;

use crate::error::Error;
use crate::numeric::{BigReal, Field, Real};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(String),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sqrt,
    Cbrt,
}

/// A parsed constant expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    text: String,
}

impl Expr {
    /// Grammar: integers and decimals, `+ - * /` (also `×`, `÷`),
    /// `sqrt(..)`, `cbrt(..)`, parentheses and unary minus.
    pub fn parse(text: &str) -> Result<Expr, Error> {
        let mut p = Parser {
            s: text.chars().collect(),
            i: 0,
        };
        let root = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(Expr {
            root,
            text: text.trim().to_string(),
        })
    }

    /// Exact binary value of an `f64`.
    pub fn from_f64(x: f64) -> Expr {
        let text = format!("{x:?}");
        Expr {
            root: Node::Num(text.clone()),
            text,
        }
    }

    pub fn eval(&self, prec: usize) -> BigReal {
        eval(&self.root, prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.eval(128).to_f64()
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Expr::parse(s)
    }
}

fn eval(n: &Node, prec: usize) -> BigReal {
    match n {
        Node::Num(s) => BigReal::parse_decimal(s, prec).expect("validated literal"),
        Node::Neg(a) => -eval(a, prec),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval(a, prec), eval(b, prec));
            match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => x / y,
            }
        }
        Node::Call(Func::Sqrt, a) => eval(a, prec).sqrt(),
        Node::Call(Func::Cbrt, a) => {
            let x = eval(a, prec);
            if x.is_negative() {
                -(-x).cbrt()
            } else {
                x.cbrt()
            }
        }
    }
}

struct Parser {
    s: Vec<char>,
    i: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.i,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<Node, Error> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.i += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, Error> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some('*' | '×') => '*',
                Some('/' | '÷') => '/',
                _ => break,
            };
            self.i += 1;
            let rhs = self.factor()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Node, Error> {
        match self.peek() {
            Some('-') => {
                self.i += 1;
                Ok(Node::Neg(Box::new(self.factor()?)))
            }
            Some('+') => {
                self.i += 1;
                self.factor()
            }
            Some('(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
                    self.i += 1;
                }
                let name: String = self.s[start..self.i].iter().collect();
                let f = match name.as_str() {
                    "sqrt" => Func::Sqrt,
                    "cbrt" => Func::Cbrt,
                    _ => {
                        self.i = start;
                        return Err(self.err("unknown function"));
                    }
                };
                if self.peek() != Some('(') {
                    return Err(self.err("expected '(' after function name"));
                }
                self.i += 1;
                let arg = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(Node::Call(f, Box::new(arg)))
            }
            _ => Err(self.err("expected a number, function or '('")),
        }
    }

    fn number(&mut self) -> Result<Node, Error> {
        let start = self.i;
        let mut seen_dot = false;
        let mut digits = 0;
        while let Some(&c) = self.s.get(self.i) {
            if c.is_ascii_digit() {
                digits += 1;
            } else if c == '.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.i += 1;
        }
        if digits == 0 {
            return Err(self.err("malformed number"));
        }
        // optional decimal exponent
        if let Some('e' | 'E') = self.s.get(self.i) {
            let save = self.i;
            self.i += 1;
            if let Some('+' | '-') = self.s.get(self.i) {
                self.i += 1;
            }
            let exp_start = self.i;
            while self.s.get(self.i).is_some_and(|c| c.is_ascii_digit()) {
                self.i += 1;
            }
            if self.i == exp_start {
                self.i = save;
            }
        }
        Ok(Node::Num(self.s[start..self.i].iter().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_diff;

    #[test]
    fn mu_star_expression() {
        let e = Expr::parse("(5+sqrt(33))/2").unwrap();
        let v = e.eval(512);
        let want = (BigReal::from_int(5, 512) + BigReal::from_int(33, 512).sqrt())
            / BigReal::from_int(2, 512);
        assert_eq!(v, want);
        assert!((e.to_f64() - 5.372281323269014).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_unicode_ops() {
        let e = Expr::parse("2 + 3 × 4 ÷ 2 - -1").unwrap();
        assert_eq!(e.to_f64(), 9.0);
        let c = Expr::parse("cbrt(19+3*sqrt(33))").unwrap();
        assert!(rel_diff(&c.eval(128).to_f64(), &3.3090564799660944) < 1e-15);
        assert_eq!(Expr::parse("cbrt(-8)").unwrap().to_f64(), -2.0);
    }

    #[test]
    fn decimal_is_exact_at_precision() {
        let e = Expr::parse("5.4").unwrap();
        let hi = e.eval(1024);
        let ten = BigReal::from_int(10, 1024);
        let back = hi * ten - BigReal::from_int(54, 1024);
        assert!(back.abs() < BigReal::from_int(1, 1024).pow2(-1000));
    }

    #[test]
    fn syntax_errors_report_position() {
        match Expr::parse("(5+sqrt(33)/2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 13),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("log(2)").is_err());
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
