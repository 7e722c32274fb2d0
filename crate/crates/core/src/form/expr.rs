//! Replacement-function expressions.
//!
//! Concrete syntax:
//!
//! ```text
//! expr    := if | or
//! if      := "if" expr "then" expr ("elif" expr "then" expr)* "else" expr
//! or      := and ("or" and)*
//! and     := not ("and" not)*
//! not     := "not" not | cmp
//! cmp     := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | primary
//! primary := number | name | "floor" "(" expr ")" | "missing" "(" name ")"
//!          | "(" expr ")" | if
//! name    := [A-Za-z_][A-Za-z0-9_]* | "`" any-but-backtick "`"
//! ```
//!
//! Values are doubles and booleans; `floor` is the mathematical floor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }

    fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

// Precedence levels for printing: if = 0, or = 1, and = 2, not = 3,
// comparison = 4, sum = 5, product = 6, unary minus = 7, atoms = 8.
const PREC_NOT: u8 = 3;
const PREC_NEG: u8 = 7;
const PREC_ATOM: u8 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Ref(VertexId),
    Missing(VertexId),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Floor(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    If {
        branches: Vec<(Expr, Expr)>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {column}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("argument `{0}` is missing and not guarded by missing()")]
    MissingUnhandled(VertexId),
    #[error("type error: {0}")]
    TypeError(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Quoted(String),
    Op(&'static str),
    LParen,
    RParen,
}

const KEYWORDS: &[&str] = &[
    "if", "then", "elif", "else", "and", "or", "not", "floor", "missing",
];

fn is_plain_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, message: String| ParseError { column: i + 1, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| err(start, format!("malformed number `{text}`")))?;
            out.push((Token::Num(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Token::Name(chars[start..i].iter().collect()), start));
            continue;
        }
        if c == '`' {
            i += 1;
            while i < chars.len() && chars[i] != '`' {
                i += 1;
            }
            if i == chars.len() {
                return Err(err(start, "unterminated quoted name".into()));
            }
            let name: String = chars[start + 1..i].iter().collect();
            if name.is_empty() {
                return Err(err(start, "empty quoted name".into()));
            }
            i += 1;
            out.push((Token::Quoted(name), start));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let op = match two.as_str() {
            "<=" => Some("<="),
            ">=" => Some(">="),
            "==" => Some("=="),
            "!=" => Some("!="),
            _ => None,
        };
        if let Some(op) = op {
            out.push((Token::Op(op), start));
            i += 2;
            continue;
        }
        let tok = match c {
            '+' => Token::Op("+"),
            '-' => Token::Op("-"),
            '*' => Token::Op("*"),
            '/' => Token::Op("/"),
            '<' => Token::Op("<"),
            '>' => Token::Op(">"),
            '(' => Token::LParen,
            ')' => Token::RParen,
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_column, |(_, c)| c + 1)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.column(), message: message.into() })
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token::Name(n)) if n == kw)
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Some(Token::Op(o)) if *o == op)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{kw}`"))
        }
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.at_keyword("if") {
            return self.if_expr();
        }
        self.or_expr()
    }

    fn if_expr(&mut self) -> Result<Expr, ParseError> {
        self.expect_keyword("if")?;
        let mut branches = Vec::new();
        loop {
            let cond = self.expr()?;
            self.expect_keyword("then")?;
            let value = self.expr()?;
            branches.push((cond, value));
            if self.at_keyword("elif") {
                self.pos += 1;
                continue;
            }
            if self.at_keyword("else") {
                self.pos += 1;
                let otherwise = Box::new(self.expr()?);
                return Ok(Expr::If { branches, otherwise });
            }
            return self.error("expected `elif` or `else`");
        }
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.at_keyword("or") {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = Expr::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.not_expr()?;
        while self.at_keyword("and") {
            self.pos += 1;
            let rhs = self.not_expr()?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, ParseError> {
        if self.at_keyword("not") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Token::Op("<")) => BinOp::Lt,
            Some(Token::Op("<=")) => BinOp::Le,
            Some(Token::Op(">")) => BinOp::Gt,
            Some(Token::Op(">=")) => BinOp::Ge,
            Some(Token::Op("==")) => BinOp::Eq,
            Some(Token::Op("!=")) => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        if matches!(self.peek(), Some(Token::Op(o)) if ["<", "<=", ">", ">=", "==", "!="].contains(o)) {
            return self.error("comparisons cannot be chained; use parentheses");
        }
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.at_op("+") {
                BinOp::Add
            } else if self.at_op("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at_op("*") {
                BinOp::Mul
            } else if self.at_op("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.at_op("-") {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn name(&mut self) -> Result<VertexId, ParseError> {
        match self.peek().cloned() {
            Some(Token::Quoted(n)) => {
                self.pos += 1;
                Ok(VertexId::new(n))
            }
            Some(Token::Name(n)) if !KEYWORDS.contains(&n.as_str()) => {
                self.pos += 1;
                Ok(VertexId::new(n))
            }
            _ => self.error("expected a field name"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Name(n)) if n == "if" => self.if_expr(),
            Some(Token::Name(n)) if n == "floor" => {
                self.pos += 1;
                self.expect(Token::LParen, "`(` after floor")?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Expr::Floor(Box::new(inner)))
            }
            Some(Token::Name(n)) if n == "missing" => {
                self.pos += 1;
                self.expect(Token::LParen, "`(` after missing")?;
                let name = self.name()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Expr::Missing(name))
            }
            Some(Token::Name(_)) | Some(Token::Quoted(_)) => Ok(Expr::Ref(self.name()?)),
            Some(_) => self.error("expected an expression"),
            None => self.error("unexpected end of expression"),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let tokens = tokenize(src)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            end_column: src.chars().count() + 1,
        };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return parser.error("unexpected trailing input");
        }
        Ok(expr)
    }

    /// Every field name the expression reads or tests.
    pub fn names(&self) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Ref(n) | Expr::Missing(n) => {
                out.insert(n.clone());
            }
            _ => {}
        });
        out
    }

    pub fn uses_missing(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Missing(_)));
        found
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Ref(_) | Expr::Missing(_) => {}
            Expr::Neg(e) | Expr::Not(e) | Expr::Floor(e) => e.visit(f),
            Expr::Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::If { branches, otherwise } => {
                for (c, v) in branches {
                    c.visit(f);
                    v.visit(f);
                }
                otherwise.visit(f);
            }
        }
    }

    /// Evaluates to a number. Names absent from `env` are missing.
    pub fn eval(&self, env: &BTreeMap<VertexId, f64>) -> Result<f64, EvalError> {
        match self.eval_scalar(env)? {
            Scalar::Num(v) => Ok(v),
            Scalar::Bool(_) => Err(EvalError::TypeError("expression yields a boolean, expected a number".into())),
        }
    }

    fn eval_scalar(&self, env: &BTreeMap<VertexId, f64>) -> Result<Scalar, EvalError> {
        let num = |e: &Expr| -> Result<f64, EvalError> {
            match e.eval_scalar(env)? {
                Scalar::Num(v) => Ok(v),
                Scalar::Bool(_) => Err(EvalError::TypeError(format!("expected a number in `{e}`"))),
            }
        };
        let boolean = |e: &Expr| -> Result<bool, EvalError> {
            match e.eval_scalar(env)? {
                Scalar::Bool(b) => Ok(b),
                Scalar::Num(_) => Err(EvalError::TypeError(format!("expected a condition in `{e}`"))),
            }
        };
        Ok(match self {
            Expr::Num(v) => Scalar::Num(*v),
            Expr::Ref(n) => Scalar::Num(
                *env.get(n).ok_or_else(|| EvalError::MissingUnhandled(n.clone()))?,
            ),
            Expr::Missing(n) => Scalar::Bool(!env.contains_key(n)),
            Expr::Neg(e) => Scalar::Num(-num(e)?),
            Expr::Not(e) => Scalar::Bool(!boolean(e)?),
            Expr::Floor(e) => Scalar::Num(num(e)?.floor()),
            Expr::Binary(BinOp::And, a, b) => Scalar::Bool(boolean(a)? && boolean(b)?),
            Expr::Binary(BinOp::Or, a, b) => Scalar::Bool(boolean(a)? || boolean(b)?),
            Expr::Binary(op, a, b) => {
                let (x, y) = (num(a)?, num(b)?);
                match op {
                    BinOp::Add => Scalar::Num(x + y),
                    BinOp::Sub => Scalar::Num(x - y),
                    BinOp::Mul => Scalar::Num(x * y),
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        Scalar::Num(x / y)
                    }
                    BinOp::Lt => Scalar::Bool(x < y),
                    BinOp::Le => Scalar::Bool(x <= y),
                    BinOp::Gt => Scalar::Bool(x > y),
                    BinOp::Ge => Scalar::Bool(x >= y),
                    BinOp::Eq => Scalar::Bool(x == y),
                    BinOp::Ne => Scalar::Bool(x != y),
                    BinOp::And | BinOp::Or => unreachable!("handled above"),
                }
            }
            Expr::If { branches, otherwise } => {
                for (cond, value) in branches {
                    if boolean(cond)? {
                        return value.eval_scalar(env);
                    }
                }
                return otherwise.eval_scalar(env);
            }
        })
    }

    /// Checks that every read of an argument happens where the argument is
    /// known to be present, given that at least one of `args` is present.
    /// Returns the first unguarded name.
    pub fn first_unguarded(&self, args: &[VertexId]) -> Option<VertexId> {
        let k = Knowledge { args, present: BTreeSet::new(), absent: BTreeSet::new() };
        self.unguarded(&k)
    }

    fn unguarded(&self, k: &Knowledge<'_>) -> Option<VertexId> {
        match self {
            Expr::Num(_) | Expr::Missing(_) => None,
            Expr::Ref(n) => (!k.is_present(n)).then(|| n.clone()),
            Expr::Neg(e) | Expr::Not(e) | Expr::Floor(e) => e.unguarded(k),
            Expr::Binary(BinOp::And, a, b) => a.unguarded(k).or_else(|| b.unguarded(&k.assuming(a, true))),
            Expr::Binary(BinOp::Or, a, b) => a.unguarded(k).or_else(|| b.unguarded(&k.assuming(a, false))),
            Expr::Binary(_, a, b) => a.unguarded(k).or_else(|| b.unguarded(k)),
            Expr::If { branches, otherwise } => {
                let mut k = k.clone();
                for (cond, value) in branches {
                    if let Some(n) = cond.unguarded(&k) {
                        return Some(n);
                    }
                    if let Some(n) = value.unguarded(&k.assuming(cond, true)) {
                        return Some(n);
                    }
                    k = k.assuming(cond, false);
                }
                otherwise.unguarded(&k)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::If { .. } => 0,
            Expr::Not(_) => PREC_NOT,
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => PREC_NEG,
            Expr::Num(_) | Expr::Ref(_) | Expr::Missing(_) | Expr::Floor(_) => PREC_ATOM,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Ref(n) => write_name(f, n),
            Expr::Missing(n) => {
                f.write_str("missing(")?;
                write_name(f, n)?;
                f.write_str(")")
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_at(f, PREC_NEG)
            }
            Expr::Not(e) => {
                f.write_str("not ")?;
                e.fmt_at(f, PREC_NOT)
            }
            Expr::Floor(e) => {
                f.write_str("floor(")?;
                e.fmt_at(f, 0)?;
                f.write_str(")")
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                // Left-associative; comparisons do not chain at all.
                let left_min = if op.is_comparison() { p + 1 } else { p };
                a.fmt_at(f, left_min)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_at(f, p + 1)
            }
            Expr::If { branches, otherwise } => {
                for (i, (cond, value)) in branches.iter().enumerate() {
                    f.write_str(if i == 0 { "if " } else { " elif " })?;
                    cond.fmt_at(f, 0)?;
                    f.write_str(" then ")?;
                    value.fmt_at(f, 0)?;
                }
                f.write_str(" else ")?;
                otherwise.fmt_at(f, 0)
            }
        }
    }
}

fn write_name(f: &mut fmt::Formatter<'_>, n: &VertexId) -> fmt::Result {
    if is_plain_name(n.as_str()) {
        f.write_str(n.as_str())
    } else {
        write!(f, "`{n}`")
    }
}

/// Canonical concrete syntax; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    Num(f64),
    Bool(bool),
}

#[derive(Clone, Debug)]
struct Knowledge<'a> {
    args: &'a [VertexId],
    present: BTreeSet<VertexId>,
    absent: BTreeSet<VertexId>,
}

impl Knowledge<'_> {
    fn is_present(&self, n: &VertexId) -> bool {
        // At least one argument is present whenever the rule fires.
        self.present.contains(n)
            || (self.args.contains(n) && self.args.iter().all(|a| a == n || self.absent.contains(a)))
    }

    fn assuming(&self, cond: &Expr, truth: bool) -> Self {
        let mut next = self.clone();
        next.learn(cond, truth);
        next
    }

    fn learn(&mut self, cond: &Expr, truth: bool) {
        match cond {
            Expr::Missing(n) => {
                if truth {
                    self.absent.insert(n.clone());
                } else {
                    self.present.insert(n.clone());
                }
            }
            Expr::Not(e) => self.learn(e, !truth),
            Expr::Binary(BinOp::And, a, b) if truth => {
                self.learn(a, true);
                self.learn(b, true);
            }
            Expr::Binary(BinOp::Or, a, b) if !truth => {
                self.learn(a, false);
                self.learn(b, false);
            }
            _ => {}
        }
    }
}
