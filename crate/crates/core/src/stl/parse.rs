//! Recursive-descent parser for the specification grammar.
//!
//! Grammar (lowest precedence first):
//!
//! ```text
//! or     := and ('|' and)*
//! and    := until ('&' until)*
//! until  := unary ('U' interval unary)*          left associative
//! unary  := '!' unary | 'F' interval unary | 'G' interval unary | atom
//! atom   := '(' or ')'
//!         | 'inside' '(' ident ',' ident ')'
//!         | 'outside' '(' ident ',' ident ')'
//!         | affine '>=' affine
//! affine := ['-'] term (('+' | '-') term)*
//! term   := number '*' coord | coord | number
//! coord  := ('x' | 'y') '(' ident ')'
//! ```
//!
//! `U`, `F`, `G`, `x`, `y`, `inside`, and `outside` are reserved words and
//! cannot name systems or regions.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::geometry::HPolytope;

use super::ast::{Formula, Predicate, TimeInterval};
use super::StlError;

/// Names the parser resolves predicates against: the systems that may appear
/// in position terms and the regions available to the membership macros.
#[derive(Debug, Clone, Default)]
pub struct SpecContext {
    pub systems: Vec<String>,
    pub regions: BTreeMap<String, HPolytope>,
}

impl SpecContext {
    pub fn new(systems: Vec<String>, regions: BTreeMap<String, HPolytope>) -> Self {
        SpecContext { systems, regions }
    }

    fn check_system(&self, name: &str) -> Result<(), StlError> {
        if self.systems.iter().any(|s| s == name) {
            Ok(())
        } else {
            Err(StlError::UnknownSystem(name.to_string()))
        }
    }

    fn region(&self, name: &str) -> Result<&HPolytope, StlError> {
        self.regions.get(name).ok_or_else(|| StlError::UnknownRegion(name.to_string()))
    }
}

/// Parse a formula, resolving systems and regions through `ctx`.
pub fn parse_formula(text: &str, ctx: &SpecContext) -> Result<Formula, StlError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, ctx };
    let f = p.parse_or()?;
    match p.peek() {
        Token { kind: TokenKind::End, .. } => Ok(f),
        t => Err(p.err_at(t.line, t.col, "unexpected trailing input")),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Star,
    Plus,
    Minus,
    Bang,
    Amp,
    Pipe,
    Ge,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, StlError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let kind = match c {
            '(' => {
                bump(&mut chars);
                TokenKind::LParen
            }
            ')' => {
                bump(&mut chars);
                TokenKind::RParen
            }
            '[' => {
                bump(&mut chars);
                TokenKind::LBracket
            }
            ']' => {
                bump(&mut chars);
                TokenKind::RBracket
            }
            ',' => {
                bump(&mut chars);
                TokenKind::Comma
            }
            '*' => {
                bump(&mut chars);
                TokenKind::Star
            }
            '+' => {
                bump(&mut chars);
                TokenKind::Plus
            }
            '-' => {
                bump(&mut chars);
                TokenKind::Minus
            }
            '!' => {
                bump(&mut chars);
                TokenKind::Bang
            }
            '&' => {
                bump(&mut chars);
                TokenKind::Amp
            }
            '|' => {
                bump(&mut chars);
                TokenKind::Pipe
            }
            '>' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('=') => {
                        bump(&mut chars);
                        TokenKind::Ge
                    }
                    _ => {
                        return Err(StlError::Syntax {
                            line: tl,
                            col: tc,
                            msg: "expected `>=`".to_string(),
                        })
                    }
                }
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        s.push(bump(&mut chars));
                    } else if d == 'e' || d == 'E' {
                        // exponent, possibly signed
                        s.push(bump(&mut chars));
                        if matches!(chars.peek(), Some('+') | Some('-')) {
                            s.push(bump(&mut chars));
                        }
                    } else {
                        break;
                    }
                }
                let v: f64 = s.parse().map_err(|_| StlError::Syntax {
                    line: tl,
                    col: tc,
                    msg: format!("bad number literal `{s}`"),
                })?;
                TokenKind::Number(v)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                TokenKind::Ident(s)
            }
            other => {
                return Err(StlError::Syntax {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Token { kind, line: tl, col: tc });
    }
    out.push(Token { kind: TokenKind::End, line, col });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    ctx: &'a SpecContext,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, line: usize, col: usize, msg: impl Into<String>) -> StlError {
        StlError::Syntax { line, col, msg: msg.into() }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, StlError> {
        let t = self.next();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(self.err_at(t.line, t.col, format!("expected {what}")))
        }
    }

    fn parse_or(&mut self) -> Result<Formula, StlError> {
        let first = self.parse_and()?;
        let mut children = vec![first];
        while self.peek().kind == TokenKind::Pipe {
            self.next();
            children.push(self.parse_and()?);
        }
        if children.len() == 1 {
            Ok(children.pop().unwrap())
        } else {
            Ok(Formula::Or(children))
        }
    }

    fn parse_and(&mut self) -> Result<Formula, StlError> {
        let first = self.parse_until()?;
        let mut children = vec![first];
        while self.peek().kind == TokenKind::Amp {
            self.next();
            children.push(self.parse_until()?);
        }
        if children.len() == 1 {
            Ok(children.pop().unwrap())
        } else {
            Ok(Formula::And(children))
        }
    }

    fn parse_until(&mut self) -> Result<Formula, StlError> {
        let mut lhs = self.parse_unary()?;
        while matches!(&self.peek().kind, TokenKind::Ident(s) if s == "U") {
            self.next();
            let i = self.parse_interval()?;
            let rhs = self.parse_unary()?;
            lhs = Formula::until(i, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, StlError> {
        match &self.peek().kind {
            TokenKind::Bang => {
                self.next();
                Ok(Formula::not(self.parse_unary()?))
            }
            TokenKind::Ident(s) if s == "F" => {
                self.next();
                let i = self.parse_interval()?;
                Ok(Formula::eventually(i, self.parse_unary()?))
            }
            TokenKind::Ident(s) if s == "G" => {
                self.next();
                let i = self.parse_interval()?;
                Ok(Formula::always(i, self.parse_unary()?))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_interval(&mut self) -> Result<TimeInterval, StlError> {
        self.expect(TokenKind::LBracket, "`[`")?;
        let t1 = self.parse_signed_number()?;
        self.expect(TokenKind::Comma, "`,`")?;
        let t2 = self.parse_signed_number()?;
        self.expect(TokenKind::RBracket, "`]`")?;
        TimeInterval::new(t1, t2)
    }

    fn parse_signed_number(&mut self) -> Result<f64, StlError> {
        let mut sign = 1.0;
        if self.peek().kind == TokenKind::Minus {
            self.next();
            sign = -1.0;
        }
        let t = self.next();
        match t.kind {
            TokenKind::Number(v) => Ok(sign * v),
            _ => Err(self.err_at(t.line, t.col, "expected a number")),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, StlError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::LParen => {
                self.next();
                let f = self.parse_or()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(f)
            }
            TokenKind::Ident(s) if s == "inside" || s == "outside" => {
                let inside = s == "inside";
                self.next();
                self.expect(TokenKind::LParen, "`(`")?;
                let sys = self.parse_ident("system name")?;
                self.ctx.check_system(&sys.0)?;
                self.expect(TokenKind::Comma, "`,`")?;
                let reg = self.parse_ident("region name")?;
                self.expect(TokenKind::RParen, "`)`")?;
                let poly = self.ctx.region(&reg.0)?.clone();
                let p = if inside {
                    Predicate::Inside { system: sys.0, region: reg.0, poly }
                } else {
                    Predicate::Outside { system: sys.0, region: reg.0, poly }
                };
                Ok(Formula::Pred(p))
            }
            TokenKind::Number(_)
            | TokenKind::Minus
            | TokenKind::Plus
            | TokenKind::Ident(_) => self.parse_affine_predicate(),
            _ => Err(self.err_at(t.line, t.col, "expected a predicate or `(`")),
        }
    }

    fn parse_ident(&mut self, what: &str) -> Result<(String, usize, usize), StlError> {
        let t = self.next();
        match t.kind {
            TokenKind::Ident(s) => Ok((s, t.line, t.col)),
            _ => Err(self.err_at(t.line, t.col, format!("expected a {what}"))),
        }
    }

    fn parse_affine_predicate(&mut self) -> Result<Formula, StlError> {
        let at = self.peek().clone();
        let lhs = self.parse_affine_expr()?;
        self.expect(TokenKind::Ge, "`>=`")?;
        let rhs = self.parse_affine_expr()?;
        // normalize to lhs - rhs >= 0
        let system = match (lhs.system.clone(), rhs.system.clone()) {
            (Some(l), Some(r)) if l != r => return Err(StlError::MixedSystems(l, r)),
            (Some(l), _) => l,
            (None, Some(r)) => r,
            (None, None) => {
                return Err(self.err_at(
                    at.line,
                    at.col,
                    "predicate references no system position",
                ))
            }
        };
        let a = DVector::from_column_slice(&[lhs.ax - rhs.ax, lhs.ay - rhs.ay]);
        Predicate::affine(system, a, lhs.b - rhs.b).map(Formula::Pred)
    }

    fn parse_affine_expr(&mut self) -> Result<AffineExpr, StlError> {
        let mut acc = AffineExpr::default();
        let mut sign = 1.0;
        if self.peek().kind == TokenKind::Minus {
            self.next();
            sign = -1.0;
        }
        self.parse_affine_term(sign, &mut acc)?;
        loop {
            let sign = match self.peek().kind {
                TokenKind::Plus => 1.0,
                TokenKind::Minus => -1.0,
                _ => break,
            };
            self.next();
            self.parse_affine_term(sign, &mut acc)?;
        }
        Ok(acc)
    }

    fn parse_affine_term(&mut self, sign: f64, acc: &mut AffineExpr) -> Result<(), StlError> {
        let t = self.next();
        match t.kind {
            TokenKind::Number(v) => {
                if self.peek().kind == TokenKind::Star {
                    self.next();
                    let (axis, sys) = self.parse_coord()?;
                    acc.add_coord(axis, sign * v, sys)?;
                } else {
                    acc.b += sign * v;
                }
                Ok(())
            }
            TokenKind::Ident(s) if s == "x" || s == "y" => {
                // bare coordinate with implicit coefficient 1
                let axis = if s == "x" { 0 } else { 1 };
                self.expect(TokenKind::LParen, "`(`")?;
                let sys = self.parse_ident("system name")?;
                self.ctx.check_system(&sys.0)?;
                self.expect(TokenKind::RParen, "`)`")?;
                acc.add_coord(axis, sign, sys.0)
            }
            _ => Err(self.err_at(t.line, t.col, "expected a number or coordinate term")),
        }
    }

    fn parse_coord(&mut self) -> Result<(usize, String), StlError> {
        let t = self.next();
        let axis = match &t.kind {
            TokenKind::Ident(s) if s == "x" => 0,
            TokenKind::Ident(s) if s == "y" => 1,
            _ => return Err(self.err_at(t.line, t.col, "expected `x(...)` or `y(...)`")),
        };
        self.expect(TokenKind::LParen, "`(`")?;
        let sys = self.parse_ident("system name")?;
        self.ctx.check_system(&sys.0)?;
        self.expect(TokenKind::RParen, "`)`")?;
        Ok((axis, sys.0))
    }
}

#[derive(Default)]
struct AffineExpr {
    ax: f64,
    ay: f64,
    b: f64,
    system: Option<String>,
}

impl AffineExpr {
    fn add_coord(&mut self, axis: usize, coeff: f64, system: String) -> Result<(), StlError> {
        match &self.system {
            Some(s) if *s != system => {
                return Err(StlError::MixedSystems(s.clone(), system));
            }
            None => self.system = Some(system),
            _ => {}
        }
        if axis == 0 {
            self.ax += coeff;
        } else {
            self.ay += coeff;
        }
        Ok(())
    }
}
