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

use super::ast::{Ast, Func, Node};
use super::EvalError;
use crate::paracomplex::{Jet2, Paracomplex};

/// Second-order jet of the expression at `z0`.
pub fn eval_jet(ast: &Ast, z0: Paracomplex) -> Result<Jet2, EvalError> {
    let z = Jet2::var_z(z0);
    let zb = Jet2::var_zbar(z0);
    jet(ast, z, zb)
}

fn jet(ast: &Ast, z: Jet2, zb: Jet2) -> Result<Jet2, EvalError> {
    let fail = |_| EvalError { position: ast.pos };
    Ok(match &ast.node {
        Node::Const(c) => Jet2::constant(Paracomplex::real(*c)),
        Node::VarZ => z,
        Node::VarZbar => zb,
        Node::VarX | Node::VarS => (z + zb).scale(Paracomplex::real(0.5)),
        Node::VarY => (z - zb).scale(Paracomplex::new(0.0, 0.5)),
        Node::UnitJ => Jet2::constant(Paracomplex::J),
        Node::Neg(a) => -jet(a, z, zb)?,
        Node::Add(a, b) => jet(a, z, zb)? + jet(b, z, zb)?,
        Node::Sub(a, b) => jet(a, z, zb)? - jet(b, z, zb)?,
        Node::Mul(a, b) => jet(a, z, zb)? * jet(b, z, zb)?,
        Node::Div(a, b) => jet(a, z, zb)?.checked_div(jet(b, z, zb)?).map_err(fail)?,
        Node::Pow(a, n) => jet(a, z, zb)?.powi(*n).map_err(fail)?,
        Node::Call(f, a) => {
            let v = jet(a, z, zb)?;
            match f {
                Func::Conj => v.conj(),
                Func::Exp => v.exp(),
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Re => v.re_part(),
                Func::Im => v.im_part(),
            }
        }
    })
}

/// Plain value of the expression at `z0`, evaluated without jets.
pub fn eval(ast: &Ast, z0: Paracomplex) -> Result<Paracomplex, EvalError> {
    let fail = |_| EvalError { position: ast.pos };
    Ok(match &ast.node {
        Node::Const(c) => Paracomplex::real(*c),
        Node::VarZ => z0,
        Node::VarZbar => z0.conj(),
        Node::VarX | Node::VarS => Paracomplex::real(z0.re),
        Node::VarY => Paracomplex::real(z0.im),
        Node::UnitJ => Paracomplex::J,
        Node::Neg(a) => -eval(a, z0)?,
        Node::Add(a, b) => eval(a, z0)? + eval(b, z0)?,
        Node::Sub(a, b) => eval(a, z0)? - eval(b, z0)?,
        Node::Mul(a, b) => eval(a, z0)? * eval(b, z0)?,
        Node::Div(a, b) => eval(a, z0)?.checked_div(eval(b, z0)?).map_err(fail)?,
        Node::Pow(a, n) => eval(a, z0)?.powi(*n).map_err(fail)?,
        Node::Call(f, a) => {
            let v = eval(a, z0)?;
            match f {
                Func::Conj => v.conj(),
                Func::Exp => v.exp(),
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Re => Paracomplex::real(v.re),
                Func::Im => Paracomplex::real(v.im),
            }
        }
    })
}
