// Copyright 2026 The nilmin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use alloc::boxed::Box;

use super::ast::{Ast, Func, Node};
use super::lexer::{Token, TokenKind};
use super::ParseError;

/// Largest accepted `|n|` in `e ^ n`.
pub const MAX_EXPONENT: i32 = 64;
const MAX_DEPTH: usize = 200;

/// Which free variables the expression may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vars {
    /// `z`, `zbar`, `x`, `y` and the unit `j`.
    Plane,
    /// The real parameter `s` only.
    Profile,
}

pub fn parse(tokens: &[Token<'_>], src_len: usize, vars: Vars) -> Result<Ast, ParseError> {
    let mut p = Parser {
        toks: tokens,
        at: 0,
        end: src_len,
        vars,
        depth: 0,
    };
    let ast = p.expr()?;
    match p.peek() {
        None => Ok(ast),
        Some(t) => Err(ParseError {
            position: t.position,
            expected: "operator or end of input",
        }),
    }
}

struct Parser<'t, 'a> {
    toks: &'t [Token<'a>],
    at: usize,
    end: usize,
    vars: Vars,
    depth: usize,
}

impl<'t, 'a> Parser<'t, 'a> {
    fn peek(&self) -> Option<Token<'a>> {
        self.toks.get(self.at).copied()
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn fail<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            expected,
        })
    }

    fn eat_op(&mut self, op: &str) -> Option<usize> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Op && t.text == op => {
                self.at += 1;
                Some(t.position)
            }
            _ => None,
        }
    }

    fn eat(&mut self, kind: TokenKind) -> Option<Token<'a>> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.at += 1;
                Some(t)
            }
            _ => None,
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("shallower nesting");
        }
        Ok(())
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Ast, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if let Some(pos) = self.eat_op("+") {
                let rhs = self.term()?;
                lhs = Ast::new(Node::Add(Box::new(lhs), Box::new(rhs)), pos);
            } else if let Some(pos) = self.eat_op("-") {
                let rhs = self.term()?;
                lhs = Ast::new(Node::Sub(Box::new(lhs), Box::new(rhs)), pos);
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if let Some(pos) = self.eat_op("*") {
                let rhs = self.unary()?;
                lhs = Ast::new(Node::Mul(Box::new(lhs), Box::new(rhs)), pos);
            } else if let Some(pos) = self.eat_op("/") {
                let rhs = self.unary()?;
                lhs = Ast::new(Node::Div(Box::new(lhs), Box::new(rhs)), pos);
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Ast, ParseError> {
        if let Some(pos) = self.eat_op("-") {
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Ast::new(Node::Neg(Box::new(inner)), pos));
        }
        self.power()
    }

    // power := atom ('^' exponent)?
    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if let Some(pos) = self.eat_op("^") {
            let n = self.exponent()?;
            return Ok(Ast::new(Node::Pow(Box::new(base), n), pos));
        }
        Ok(base)
    }

    // exponent := '-'? integer ('^' exponent)?, folded right to left
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let start = self.here();
        let neg = self.eat_op("-").is_some();
        let tok = match self.eat(TokenKind::Number) {
            Some(t) => t,
            None => return self.fail("integer exponent"),
        };
        let v: f64 = tok.text.parse().map_err(|_| ParseError {
            position: tok.position,
            expected: "integer exponent",
        })?;
        if v != crate::math::trunc(v) || v > MAX_EXPONENT as f64 {
            return Err(ParseError {
                position: tok.position,
                expected: "integer exponent in -64..=64",
            });
        }
        let mut n = v as i64;
        if self.eat_op("^").is_some() {
            let e = self.exponent()?;
            if e < 0 {
                return Err(ParseError {
                    position: start,
                    expected: "non-negative tower exponent",
                });
            }
            n = match (n as i128).checked_pow(e as u32) {
                Some(p) if p.abs() <= MAX_EXPONENT as i128 => p as i64,
                _ => {
                    return Err(ParseError {
                        position: start,
                        expected: "integer exponent in -64..=64",
                    })
                }
            };
        }
        if neg {
            n = -n;
        }
        Ok(n as i32)
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let tok = match self.peek() {
            Some(t) => t,
            None => return self.fail("expression"),
        };
        match tok.kind {
            TokenKind::Number => {
                self.at += 1;
                let v: f64 = tok.text.parse().map_err(|_| ParseError {
                    position: tok.position,
                    expected: "finite number",
                })?;
                if !v.is_finite() {
                    return Err(ParseError {
                        position: tok.position,
                        expected: "finite number",
                    });
                }
                Ok(Ast::new(Node::Const(v), tok.position))
            }
            TokenKind::LParen => {
                self.at += 1;
                let inner = self.expr()?;
                if self.eat(TokenKind::RParen).is_none() {
                    return self.fail("')'");
                }
                Ok(inner)
            }
            TokenKind::Ident => {
                self.at += 1;
                if let Some(func) = Func::from_name(tok.text) {
                    if self.eat(TokenKind::LParen).is_none() {
                        return self.fail("'(' after function name");
                    }
                    let arg = self.expr()?;
                    if self.eat(TokenKind::RParen).is_none() {
                        return self.fail("')' closing the single argument");
                    }
                    return Ok(Ast::new(Node::Call(func, Box::new(arg)), tok.position));
                }
                let node = match (self.vars, tok.text) {
                    (Vars::Plane, "z") => Node::VarZ,
                    (Vars::Plane, "zbar") => Node::VarZbar,
                    (Vars::Plane, "x") => Node::VarX,
                    (Vars::Plane, "y") => Node::VarY,
                    (Vars::Plane, "j") => Node::UnitJ,
                    (Vars::Profile, "s") => Node::VarS,
                    (Vars::Plane, _) => {
                        self.at -= 1;
                        return self.fail("z, zbar, x, y, j or a function");
                    }
                    (Vars::Profile, _) => {
                        self.at -= 1;
                        return self.fail("s or a function");
                    }
                };
                Ok(Ast::new(node, tok.position))
            }
            _ => self.fail("expression"),
        }
    }
}
