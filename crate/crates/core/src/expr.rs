//! A small arithmetic expression language for user-supplied potentials.
//!
//! Grammar: `+ - * / ^`, parentheses, unary minus, the functions
//! `sin cos exp log`, numeric literals, the constant `pi` and the variables
//! `x1 x2 x3`. This is the entire surface; anything else is a parse error.
//! The parser is total: any input either yields an AST or a typed error,
//! it never panics (it is fuzzed, see `fuzz/fuzz_targets/expr.rs`).

use thiserror::Error;

/// Maximum nesting depth accepted by the recursive-descent parser.
const MAX_DEPTH: usize = 96;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("unexpected character {found:?} at byte {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("malformed number at byte {0}")]
    BadNumber(usize),
    #[error("expression nested deeper than {MAX_DEPTH} levels")]
    TooDeep,
    #[error("trailing input at byte {0}")]
    TrailingInput(usize),
    #[error("expected {expected:?} at byte {pos}")]
    Expected { pos: usize, expected: char },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
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
    /// Variable index: 0 for `x1`, 1 for `x2`, 2 for `x3`.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates with IEEE semantics; division by zero and out-of-domain
    /// logs produce infinities/NaNs rather than errors.
    pub fn eval(&self, vars: &[f64; 3]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => vars[*i],
            Expr::Neg(e) => -e.eval(vars),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(vars), r.eval(vars));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(vars);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                }
            }
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr(0)?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ExprError::TrailingInput(p.pos));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, ExprError> {
        if depth > MAX_DEPTH {
            return Err(ExprError::TooDeep);
        }
        let mut lhs = self.term(depth + 1)?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term(depth + 1)?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term(depth + 1)?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<Expr, ExprError> {
        if depth > MAX_DEPTH {
            return Err(ExprError::TooDeep);
        }
        let mut lhs = self.factor(depth + 1)?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.factor(depth + 1)?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.factor(depth + 1)?;
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // factor := '-' factor | power; power := atom ('^' factor)?
    // so `-x^2` is `-(x^2)` and `2^-3` works.
    fn factor(&mut self, depth: usize) -> Result<Expr, ExprError> {
        if depth > MAX_DEPTH {
            return Err(ExprError::TooDeep);
        }
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.skip_ws();
            let inner = self.factor(depth + 1)?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom(depth + 1)?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let exp = self.factor(depth + 1)?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self, depth: usize) -> Result<Expr, ExprError> {
        if depth > MAX_DEPTH {
            return Err(ExprError::TooDeep);
        }
        self.skip_ws();
        let c = self.peek().ok_or(ExprError::UnexpectedEnd)?;
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr(depth + 1)?;
            self.skip_ws();
            if self.peek() == Some(b')') {
                self.pos += 1;
                return Ok(inner);
            }
            return Err(ExprError::Expected {
                pos: self.pos,
                expected: ')',
            });
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            return self.identifier(depth);
        }
        Err(ExprError::UnexpectedChar {
            pos: self.pos,
            found: c as char,
        })
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                // exponent part: e[+-]?digits
                let save = self.pos;
                self.pos += 1;
                if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        self.pos += 1;
                    }
                } else {
                    self.pos = save;
                    break;
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| ExprError::BadNumber(start))?;
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| ExprError::BadNumber(start))
    }

    fn identifier(&mut self, depth: usize) -> Result<Expr, ExprError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| ExprError::UnknownIdentifier(String::from("<non-utf8>")))?;
        match name {
            "x1" => return Ok(Expr::Var(0)),
            "x2" => return Ok(Expr::Var(1)),
            "x3" => return Ok(Expr::Var(2)),
            "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
            _ => {}
        }
        let func = match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return Err(ExprError::UnknownIdentifier(name.to_string())),
        };
        self.skip_ws();
        if self.peek() != Some(b'(') {
            return Err(ExprError::Expected {
                pos: self.pos,
                expected: '(',
            });
        }
        self.pos += 1;
        let arg = self.expr(depth + 1)?;
        self.skip_ws();
        if self.peek() != Some(b')') {
            return Err(ExprError::Expected {
                pos: self.pos,
                expected: ')',
            });
        }
        self.pos += 1;
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
