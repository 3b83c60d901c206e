//! Symbolic expressions over named real variables: parsing, exact
//! differentiation, substitution, and numeric evaluation.
//!
//! Expressions are immutable DAGs behind [`alloc::sync::Arc`] handles, so
//! clones are cheap and differentiation shares subterms instead of copying
//! them. Evaluation and differentiation memoize on node identity, which keeps
//! both linear in the number of distinct nodes even for the fourth-order
//! derivative towers the geometry kernel builds.
//!
//! Simplification is deliberately minimal: constant folding plus the unit
//! identities (`x + 0`, `x * 1`, `x * 0`, `x^1`, `x^0`). Anything stronger
//! trades correctness review effort for speed this crate does not need.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;

mod parse;

pub use parse::ParseError;

/// Unary operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

/// Binary operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Var(String),
    Unary(UnaryOp, Expr),
    Binary(BinaryOp, Expr, Expr),
}

/// A shared, immutable expression.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

/// Variable bindings for evaluation, kept sorted by name.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    entries: Vec<(String, f64)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Self {
        let mut b = Self::new();
        for (name, value) in pairs {
            b.set(name, *value);
        }
        b
    }

    /// Insert or overwrite a binding.
    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        match self.entries.binary_search_by(|(n, _)| n.as_str().cmp(name)) {
            Ok(i) => self.entries[i].1 = value,
            Err(i) => self.entries.insert(i, (name.to_string(), value)),
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .binary_search_by(|(n, _)| n.as_str().cmp(name))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }
}

/// Evaluation failure: a free variable without a binding, an argument outside
/// a function's domain, or a non-finite intermediate value.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    Unbound { names: Vec<String> },
    Domain { op: &'static str, value: f64 },
    NonFinite { op: &'static str },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unbound { names } => {
                write!(f, "unbound variable(s): ")?;
                for (i, n) in names.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{n}")?;
                }
                Ok(())
            }
            EvalError::Domain { op, value } => {
                write!(f, "domain error: {op} of {value}")
            }
            EvalError::NonFinite { op } => write!(f, "non-finite result in {op}"),
        }
    }
}

impl core::error::Error for EvalError {}

fn apply_unary(op: UnaryOp, v: f64) -> Result<f64, EvalError> {
    let out = match op {
        UnaryOp::Neg => -v,
        UnaryOp::Sin => fmath::sin(v),
        UnaryOp::Cos => fmath::cos(v),
        UnaryOp::Sinh => fmath::sinh(v),
        UnaryOp::Cosh => fmath::cosh(v),
        UnaryOp::Exp => fmath::exp(v),
        UnaryOp::Ln => {
            if v <= 0.0 {
                return Err(EvalError::Domain { op: "ln", value: v });
            }
            fmath::ln(v)
        }
        UnaryOp::Sqrt => {
            if v < 0.0 {
                return Err(EvalError::Domain { op: "sqrt", value: v });
            }
            fmath::sqrt(v)
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(EvalError::NonFinite { op: op.name() })
    }
}

fn apply_binary(op: BinaryOp, a: f64, b: f64) -> Result<f64, EvalError> {
    let out = match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return Err(EvalError::Domain { op: "div", value: 0.0 });
            }
            a / b
        }
        BinaryOp::Pow => {
            if fmath::is_integer(b) && fmath::abs(b) <= 2147483647.0 {
                if a == 0.0 && b < 0.0 {
                    return Err(EvalError::Domain { op: "pow", value: 0.0 });
                }
                fmath::powi(a, b as i64)
            } else if a > 0.0 {
                fmath::powf(a, b)
            } else {
                return Err(EvalError::Domain { op: "pow", value: a });
            }
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(EvalError::NonFinite {
            op: match op {
                BinaryOp::Add => "add",
                BinaryOp::Sub => "sub",
                BinaryOp::Mul => "mul",
                BinaryOp::Div => "div",
                BinaryOp::Pow => "pow",
            },
        })
    }
}

impl Expr {
    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(value: f64) -> Expr {
        Expr(Arc::new(Node::Const(value)))
    }

    pub fn var(name: &str) -> Expr {
        Expr(Arc::new(Node::Var(name.to_string())))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    fn as_const(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(value)
    }

    fn raw_unary(op: UnaryOp, inner: Expr) -> Expr {
        Expr(Arc::new(Node::Unary(op, inner)))
    }

    fn raw_binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr(Arc::new(Node::Binary(op, lhs, rhs)))
    }

    /// Smart unary constructor: folds constants.
    pub fn unary(op: UnaryOp, inner: Expr) -> Expr {
        if let Some(c) = inner.as_const() {
            if let Ok(v) = apply_unary(op, c) {
                return Expr::constant(v);
            }
        }
        Expr(Arc::new(Node::Unary(op, inner)))
    }

    /// Smart binary constructor: folds constants and unit identities.
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        if let (Some(a), Some(b)) = (lhs.as_const(), rhs.as_const()) {
            if let Ok(v) = apply_binary(op, a, b) {
                return Expr::constant(v);
            }
        }
        match op {
            BinaryOp::Add => {
                if lhs.is_const(0.0) {
                    return rhs;
                }
                if rhs.is_const(0.0) {
                    return lhs;
                }
            }
            BinaryOp::Sub => {
                if rhs.is_const(0.0) {
                    return lhs;
                }
            }
            BinaryOp::Mul => {
                if lhs.is_const(0.0) || rhs.is_const(0.0) {
                    return Expr::zero();
                }
                if lhs.is_const(1.0) {
                    return rhs;
                }
                if rhs.is_const(1.0) {
                    return lhs;
                }
            }
            BinaryOp::Div => {
                if rhs.is_const(1.0) {
                    return lhs;
                }
            }
            BinaryOp::Pow => {
                if rhs.is_const(1.0) {
                    return lhs;
                }
                if rhs.is_const(0.0) {
                    return Expr::one();
                }
            }
        }
        Expr(Arc::new(Node::Binary(op, lhs, rhs)))
    }

    pub fn sin(&self) -> Expr {
        Expr::unary(UnaryOp::Sin, self.clone())
    }
    pub fn cos(&self) -> Expr {
        Expr::unary(UnaryOp::Cos, self.clone())
    }
    pub fn sinh(&self) -> Expr {
        Expr::unary(UnaryOp::Sinh, self.clone())
    }
    pub fn cosh(&self) -> Expr {
        Expr::unary(UnaryOp::Cosh, self.clone())
    }
    pub fn exp(&self) -> Expr {
        Expr::unary(UnaryOp::Exp, self.clone())
    }
    pub fn ln(&self) -> Expr {
        Expr::unary(UnaryOp::Ln, self.clone())
    }
    pub fn sqrt(&self) -> Expr {
        Expr::unary(UnaryOp::Sqrt, self.clone())
    }
    pub fn pow(&self, exponent: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, self.clone(), exponent)
    }
    pub fn powi(&self, exponent: i64) -> Expr {
        self.pow(Expr::constant(exponent as f64))
    }

    /// Parse an expression from text. The grammar is documented in the crate
    /// README: `+ - * / ^` with usual precedence, `^` right-associative and
    /// binding tighter than unary minus, plus the functions
    /// `sin cos sinh cosh exp ln sqrt`.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Expr {
        let mut memo: BTreeMap<usize, Expr> = BTreeMap::new();
        self.diff_memo(var, &mut memo)
    }

    fn diff_memo(&self, var: &str, memo: &mut BTreeMap<usize, Expr>) -> Expr {
        if let Some(d) = memo.get(&self.key()) {
            return d.clone();
        }
        let d = match &*self.0 {
            Node::Const(_) => Expr::zero(),
            Node::Var(name) => {
                if name == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Unary(op, inner) => {
                let di = inner.diff_memo(var, memo);
                match op {
                    UnaryOp::Neg => -di,
                    UnaryOp::Sin => inner.cos() * di,
                    UnaryOp::Cos => -(inner.sin() * di),
                    UnaryOp::Sinh => inner.cosh() * di,
                    UnaryOp::Cosh => inner.sinh() * di,
                    UnaryOp::Exp => self.clone() * di,
                    UnaryOp::Ln => di / inner.clone(),
                    UnaryOp::Sqrt => di / (Expr::constant(2.0) * self.clone()),
                }
            }
            Node::Binary(op, lhs, rhs) => match op {
                BinaryOp::Add => lhs.diff_memo(var, memo) + rhs.diff_memo(var, memo),
                BinaryOp::Sub => lhs.diff_memo(var, memo) - rhs.diff_memo(var, memo),
                BinaryOp::Mul => {
                    lhs.diff_memo(var, memo) * rhs.clone()
                        + lhs.clone() * rhs.diff_memo(var, memo)
                }
                BinaryOp::Div => {
                    let dl = lhs.diff_memo(var, memo);
                    let dr = rhs.diff_memo(var, memo);
                    (dl * rhs.clone() - lhs.clone() * dr) / (rhs.clone() * rhs.clone())
                }
                BinaryOp::Pow => {
                    let dl = lhs.diff_memo(var, memo);
                    match rhs.as_const() {
                        // d(u^c) = c u^(c-1) u'; keeps integer exponents
                        // integral so negative bases stay evaluable.
                        Some(c) => {
                            Expr::constant(c) * lhs.pow(Expr::constant(c - 1.0)) * dl
                        }
                        None => {
                            let dr = rhs.diff_memo(var, memo);
                            self.clone() * (dr * lhs.ln() + rhs.clone() * dl / lhs.clone())
                        }
                    }
                }
            },
        };
        memo.insert(self.key(), d.clone());
        d
    }

    /// Evaluate with every free variable bound; reports all missing names.
    pub fn evaluate(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        let missing: Vec<String> = self
            .free_vars()
            .into_iter()
            .filter(|v| bindings.get(v).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(EvalError::Unbound { names: missing });
        }
        let mut ev = Evaluator::new(bindings);
        ev.eval(self)
    }

    /// Free variable names, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        self.collect_vars(&mut out, &mut seen);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>, seen: &mut BTreeSet<usize>) {
        if !seen.insert(self.key()) {
            return;
        }
        match &*self.0 {
            Node::Const(_) => {}
            Node::Var(name) => {
                out.insert(name.clone());
            }
            Node::Unary(_, inner) => inner.collect_vars(out, seen),
            Node::Binary(_, lhs, rhs) => {
                lhs.collect_vars(out, seen);
                rhs.collect_vars(out, seen);
            }
        }
    }

    /// Simultaneous substitution of variables by expressions.
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        Substitution::new(map.clone()).apply(self)
    }

    fn subst_memo(&self, map: &BTreeMap<String, Expr>, memo: &mut BTreeMap<usize, Expr>) -> Expr {
        if let Some(e) = memo.get(&self.key()) {
            return e.clone();
        }
        let out = match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            Node::Unary(op, inner) => Expr::unary(*op, inner.subst_memo(map, memo)),
            Node::Binary(op, lhs, rhs) => Expr::binary(
                *op,
                lhs.subst_memo(map, memo),
                rhs.subst_memo(map, memo),
            ),
        };
        memo.insert(self.key(), out.clone());
        out
    }

    /// Number of distinct DAG nodes (diagnostic).
    pub fn node_count(&self) -> usize {
        let mut seen = BTreeSet::new();
        self.count_nodes(&mut seen);
        seen.len()
    }

    fn count_nodes(&self, seen: &mut BTreeSet<usize>) {
        if !seen.insert(self.key()) {
            return;
        }
        match &*self.0 {
            Node::Const(_) | Node::Var(_) => {}
            Node::Unary(_, inner) => inner.count_nodes(seen),
            Node::Binary(_, lhs, rhs) => {
                lhs.count_nodes(seen);
                rhs.count_nodes(seen);
            }
        }
    }
}

/// Substitution context with a memo that persists across `apply` calls, so
/// composing many expressions with the same map keeps their shared subterms
/// shared in the results.
pub struct Substitution {
    map: BTreeMap<String, Expr>,
    memo: BTreeMap<usize, Expr>,
}

impl Substitution {
    pub fn new(map: BTreeMap<String, Expr>) -> Self {
        Self {
            map,
            memo: BTreeMap::new(),
        }
    }

    pub fn apply(&mut self, expr: &Expr) -> Expr {
        expr.subst_memo(&self.map, &mut self.memo)
    }
}

/// Shared-cache evaluator: evaluating several expressions that share subterms
/// (as every field of a surface's geometry does) touches each node once.
pub struct Evaluator<'b> {
    bindings: &'b Bindings,
    cache: BTreeMap<usize, f64>,
}

impl<'b> Evaluator<'b> {
    pub fn new(bindings: &'b Bindings) -> Self {
        Self {
            bindings,
            cache: BTreeMap::new(),
        }
    }

    pub fn eval(&mut self, expr: &Expr) -> Result<f64, EvalError> {
        if let Some(v) = self.cache.get(&expr.key()) {
            return Ok(*v);
        }
        let v = match &*expr.0 {
            Node::Const(c) => *c,
            Node::Var(name) => self.bindings.get(name).ok_or_else(|| EvalError::Unbound {
                names: alloc::vec![name.clone()],
            })?,
            Node::Unary(op, inner) => {
                let x = self.eval(inner)?;
                apply_unary(*op, x)?
            }
            Node::Binary(op, lhs, rhs) => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                apply_binary(*op, a, b)?
            }
        };
        self.cache.insert(expr.key(), v);
        Ok(v)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Unary(op1, a), Node::Unary(op2, b)) => op1 == op2 && a == b,
            (Node::Binary(op1, a1, b1), Node::Binary(op2, a2, b2)) => {
                op1 == op2 && a1 == a2 && b1 == b2
            }
            _ => false,
        }
    }
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, self, rhs)
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, self, rhs)
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, self, rhs)
    }
}

impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, self, rhs)
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self)
    }
}

// Canonical emission. Precedence levels: add/sub 1, mul/div 2, unary minus 3,
// pow 4, atoms 5. A child is parenthesized when its level is below what its
// position requires, so the printed form re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Expr {
    fn level(&self) -> u8 {
        match &*self.0 {
            Node::Const(c) if *c < 0.0 => 3,
            Node::Const(_) | Node::Var(_) => 5,
            Node::Unary(UnaryOp::Neg, _) => 3,
            Node::Unary(..) => 5,
            Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Node::Binary(BinaryOp::Pow, ..) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        let level = self.level();
        let parens = level < min_level;
        if parens {
            write!(f, "(")?;
        }
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}")?,
            Node::Var(name) => write!(f, "{name}")?,
            Node::Unary(UnaryOp::Neg, inner) => {
                write!(f, "-")?;
                // One extra level so nested negations print as -(-x).
                inner.fmt_prec(f, 4)?;
            }
            Node::Unary(op, inner) => {
                write!(f, "{}(", op.name())?;
                inner.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Node::Binary(op, lhs, rhs) => {
                let (sym, bl, br) = match op {
                    BinaryOp::Add => (" + ", 1, 2),
                    BinaryOp::Sub => (" - ", 1, 2),
                    BinaryOp::Mul => (" * ", 2, 3),
                    BinaryOp::Div => (" / ", 2, 3),
                    // Right-associative: the left child needs a full atom.
                    BinaryOp::Pow => ("^", 5, 3),
                };
                lhs.fmt_prec(f, bl)?;
                write!(f, "{sym}")?;
                rhs.fmt_prec(f, br)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}
