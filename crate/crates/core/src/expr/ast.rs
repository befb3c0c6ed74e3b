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
use alloc::string::String;
use core::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Conj,
    Exp,
    Sinh,
    Cosh,
    Re,
    Im,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "conj" => Func::Conj,
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "re" => Func::Re,
            "im" => Func::Im,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Conj => "conj",
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Re => "re",
            Func::Im => "im",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Node {
    Const(f64),
    VarZ,
    VarZbar,
    VarX,
    VarY,
    /// Real parameter of a curvature profile; evaluates like `x`.
    VarS,
    UnitJ,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Call(Func, Box<Ast>),
}

/// Expression tree. Equality compares structure and ignores positions.
#[derive(Clone, Debug)]
pub struct Ast {
    pub node: Node,
    /// Byte offset of the token that produced this node.
    pub pos: usize,
}

impl Ast {
    pub fn new(node: Node, pos: usize) -> Self {
        Ast { node, pos }
    }

    /// Fully parenthesised text that parses back to an equal tree.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{}", self);
        s
    }
}

impl PartialEq for Ast {
    fn eq(&self, other: &Ast) -> bool {
        use Node::*;
        match (&self.node, &other.node) {
            (Const(a), Const(b)) => a.to_bits() == b.to_bits(),
            (VarZ, VarZ) | (VarZbar, VarZbar) | (VarX, VarX) | (VarY, VarY) => true,
            (VarS, VarS) | (UnitJ, UnitJ) => true,
            (Neg(a), Neg(b)) => a == b,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d)) => a == c && b == d,
            (Pow(a, n), Pow(b, m)) => n == m && a == b,
            (Call(f, a), Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Const(c) => write!(f, "{:?}", c),
            Node::VarZ => f.write_str("z"),
            Node::VarZbar => f.write_str("zbar"),
            Node::VarX => f.write_str("x"),
            Node::VarY => f.write_str("y"),
            Node::VarS => f.write_str("s"),
            Node::UnitJ => f.write_str("j"),
            Node::Neg(a) => write!(f, "(-{})", a),
            Node::Add(a, b) => write!(f, "({} + {})", a, b),
            Node::Sub(a, b) => write!(f, "({} - {})", a, b),
            Node::Mul(a, b) => write!(f, "({} * {})", a, b),
            Node::Div(a, b) => write!(f, "({} / {})", a, b),
            Node::Pow(a, n) => write!(f, "({})^{}", a, n),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}
