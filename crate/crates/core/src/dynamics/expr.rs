//! Scalar expressions in the chain state and time, backed by `meval`.
//!
//! Recognised names: `s` and `v` (first two channels), `x1`..`xn`, `t`,
//! `m` (model mass) and `g` (9.81), plus meval's builtins (`sin`, `cos`,
//! `tan`, `exp`, `ln`, `sqrt`, `abs`, `pi`, `e`, ...).

use std::fmt;

use meval::{Context, ContextProvider, Expr};

use super::GRAVITY;
use crate::{Error, Result};

#[derive(Clone)]
pub struct Expression {
    source: String,
    expr: Expr,
}

struct Vars<'a> {
    state: &'a [f64],
    t: f64,
    mass: f64,
}

impl ContextProvider for Vars<'_> {
    fn get_var(&self, name: &str) -> Option<f64> {
        match name {
            "s" => self.state.first().copied(),
            "v" => self.state.get(1).copied(),
            "t" => Some(self.t),
            "m" => Some(self.mass),
            "g" => Some(GRAVITY),
            _ => {
                let k: usize = name.strip_prefix('x')?.parse().ok()?;
                if k == 0 {
                    return None;
                }
                self.state.get(k - 1).copied()
            }
        }
    }
}

thread_local! {
    static BUILTINS: Context<'static> = Context::new();
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let expr: Expr = source
            .parse()
            .map_err(|e| Error::Expression(format!("`{source}`: {e}")))?;
        Ok(Self {
            source: source.to_owned(),
            expr,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, state: &[f64], t: f64, mass: f64) -> Result<f64> {
        BUILTINS.with(|builtins| {
            self.expr
                .eval_with_context((Vars { state, t, mass }, builtins))
                .map_err(|e| Error::Expression(format!("`{}`: {e}", self.source)))
        })
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Expression").field(&self.source).finish()
    }
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}
