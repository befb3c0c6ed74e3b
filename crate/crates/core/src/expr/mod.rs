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

//! Expression language for closed-form Gauss maps `g(z, zbar)` and real
//! curvature profiles `kappa(s)`.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-'? integer ('^' exponent)?
//! atom     := number | variable | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `z`, `zbar`, `x`, `y` and the unit `j` (`j^2 = 1`); a
//! profile uses `s` instead. Functions: `conj`, `exp`, `sinh`, `cosh`, `re`,
//! `im`. Unary minus binds looser than `^`, so `-z^2` is `-(z^2)`, and
//! tighter than `*`. Exponents are integer literals with `|n| <= 64`.

mod ast;
mod eval;
mod lexer;
mod parser;

pub use ast::{Ast, Func, Node};
pub use eval::{eval, eval_jet};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{Vars, MAX_EXPONENT};

use crate::paracomplex::Paracomplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unexpected character at byte {position}")]
pub struct LexError {
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: &'static str,
}

/// Division by, or negative power of, a null paracomplex value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("null divisor while evaluating the node at byte {position}")]
pub struct EvalError {
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl ExprError {
    pub fn position(&self) -> usize {
        match self {
            ExprError::Lex(e) => e.position,
            ExprError::Parse(e) => e.position,
        }
    }
}

/// Parses a Gauss map in `z`, `zbar`, `x`, `y`, `j`.
pub fn parse(src: &str) -> Result<Ast, ExprError> {
    let toks = tokenize(src)?;
    Ok(parser::parse(&toks, src.len(), Vars::Plane)?)
}

/// Parses a real function of `s`.
pub fn parse_profile(src: &str) -> Result<Ast, ExprError> {
    let toks = tokenize(src)?;
    Ok(parser::parse(&toks, src.len(), Vars::Profile)?)
}

/// Value and first two derivatives of a profile at real `s`.
pub fn eval_profile(ast: &Ast, s: f64) -> Result<(f64, f64, f64), EvalError> {
    let jet = eval_jet(ast, Paracomplex::real(s))?;
    // d/dx = d/dz + d/dzbar on functions of x alone
    let d1 = jet.dz + jet.dzb;
    let d2 = jet.dzz + jet.dzzb.scale(2.0) + jet.dzbzb;
    Ok((jet.v.re, d1.re, d2.re))
}
