//! Closed-form scalar fields over a chart.
//!
//! A [`ScalarField`] is an expression tree over chart coordinates with exact
//! structural differentiation. The only simplification performed is constant
//! folding (plus elimination of additive/multiplicative identities), so the
//! residual of an algebraic identity evaluated at a point reflects only
//! floating-point rounding. Equality of fields is decided numerically on a
//! sample plan, never symbolically.

use std::fmt;
use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{Error, EvalError, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Const(f64),
    Coord(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, i32),
    Recip(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
}

/// A differentiable scalar field on a chart.
#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: Chart,
    expr: Arc<Expr>,
}

fn constant_of(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

// Smart constructors: fold constants and drop exact identities. No other
// rewriting happens; x - x stays a tree.
fn mk_add(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    if let (Some(x), Some(y)) = (constant_of(&a), constant_of(&b)) {
        return Arc::new(Expr::Const(x + y));
    }
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Arc::new(Expr::Add(a, b))
}

fn mk_mul(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    if let (Some(x), Some(y)) = (constant_of(&a), constant_of(&b)) {
        return Arc::new(Expr::Const(x * y));
    }
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Arc::new(Expr::Const(0.0));
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Arc::new(Expr::Mul(a, b))
}

fn mk_neg(a: Arc<Expr>) -> Arc<Expr> {
    match &*a {
        Expr::Const(c) => Arc::new(Expr::Const(-c)),
        Expr::Neg(inner) => inner.clone(),
        _ => Arc::new(Expr::Neg(a)),
    }
}

fn mk_pow(a: Arc<Expr>, m: i32) -> Arc<Expr> {
    if m == 0 {
        return Arc::new(Expr::Const(1.0));
    }
    if m == 1 {
        return a;
    }
    if let Some(x) = constant_of(&a) {
        let v = x.powi(m);
        if v.is_finite() {
            return Arc::new(Expr::Const(v));
        }
    }
    Arc::new(Expr::Pow(a, m))
}

fn mk_recip(a: Arc<Expr>) -> Arc<Expr> {
    if let Some(x) = constant_of(&a) {
        if x != 0.0 {
            return Arc::new(Expr::Const(1.0 / x));
        }
    }
    Arc::new(Expr::Recip(a))
}

fn mk_sin(a: Arc<Expr>) -> Arc<Expr> {
    match constant_of(&a) {
        Some(x) => Arc::new(Expr::Const(x.sin())),
        None => Arc::new(Expr::Sin(a)),
    }
}

fn mk_cos(a: Arc<Expr>) -> Arc<Expr> {
    match constant_of(&a) {
        Some(x) => Arc::new(Expr::Const(x.cos())),
        None => Arc::new(Expr::Cos(a)),
    }
}

fn mk_exp(a: Arc<Expr>) -> Arc<Expr> {
    match constant_of(&a) {
        Some(x) => Arc::new(Expr::Const(x.exp())),
        None => Arc::new(Expr::Exp(a)),
    }
}

impl ScalarField {
    pub fn constant(chart: &Chart, value: f64) -> Self {
        ScalarField {
            chart: chart.clone(),
            expr: Arc::new(Expr::Const(value)),
        }
    }

    pub fn zero(chart: &Chart) -> Self {
        Self::constant(chart, 0.0)
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, 1.0)
    }

    /// The coordinate field x^i.
    pub fn coord(chart: &Chart, i: usize) -> Self {
        assert!(
            i < chart.dim(),
            "coordinate index {i} out of range for chart of dim {}",
            chart.dim()
        );
        ScalarField {
            chart: chart.clone(),
            expr: Arc::new(Expr::Coord(i)),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// True when the tree is literally the constant 0. Fields that merely
    /// evaluate to zero everywhere are not detected; use a sample plan.
    pub fn is_structural_zero(&self) -> bool {
        is_const(&self.expr, 0.0)
    }

    pub fn as_constant(&self) -> Option<f64> {
        constant_of(&self.expr)
    }

    fn assert_same_chart(&self, other: &ScalarField) {
        assert!(
            self.chart == other.chart,
            "scalar fields live on different charts: [{}] vs [{}]",
            self.chart,
            other.chart
        );
    }

    pub fn recip(&self) -> Self {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_recip(self.expr.clone()),
        }
    }

    pub fn powi(&self, m: i32) -> Self {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_pow(self.expr.clone(), m),
        }
    }

    pub fn sin(&self) -> Self {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_sin(self.expr.clone()),
        }
    }

    pub fn cos(&self) -> Self {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_cos(self.expr.clone()),
        }
    }

    pub fn exp(&self) -> Self {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_exp(self.expr.clone()),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_mul(Arc::new(Expr::Const(c)), self.expr.clone()),
        }
    }

    /// Pointwise evaluation.
    pub fn eval(&self, point: &[f64]) -> std::result::Result<f64, EvalError> {
        if point.len() != self.chart.dim() {
            return Err(EvalError::DomainMismatch {
                expected: self.chart.dim(),
                got: point.len(),
            });
        }
        eval_expr(&self.expr, point)
    }

    /// Exact structural partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(
            i < self.chart.dim(),
            "coordinate index {i} out of range for chart of dim {}",
            self.chart.dim()
        );
        ScalarField {
            chart: self.chart.clone(),
            expr: diff(&self.expr, i),
        }
    }

    /// Structural equality of the underlying trees.
    pub fn same_tree(&self, other: &ScalarField) -> bool {
        self.chart == other.chart && self.expr == other.expr
    }
}

fn eval_expr(e: &Expr, p: &[f64]) -> std::result::Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Coord(i) => p[*i],
        Expr::Add(a, b) => eval_expr(a, p)? + eval_expr(b, p)?,
        Expr::Mul(a, b) => eval_expr(a, p)? * eval_expr(b, p)?,
        Expr::Neg(a) => -eval_expr(a, p)?,
        Expr::Pow(a, m) => {
            let base = eval_expr(a, p)?;
            if base == 0.0 && *m < 0 {
                return Err(EvalError::DivisionByZero { point: p.to_vec() });
            }
            base.powi(*m)
        }
        Expr::Recip(a) => {
            let d = eval_expr(a, p)?;
            if d == 0.0 {
                return Err(EvalError::DivisionByZero { point: p.to_vec() });
            }
            1.0 / d
        }
        Expr::Sin(a) => eval_expr(a, p)?.sin(),
        Expr::Cos(a) => eval_expr(a, p)?.cos(),
        Expr::Exp(a) => eval_expr(a, p)?.exp(),
    })
}

fn diff(e: &Expr, i: usize) -> Arc<Expr> {
    match e {
        Expr::Const(_) => Arc::new(Expr::Const(0.0)),
        Expr::Coord(j) => Arc::new(Expr::Const(if *j == i { 1.0 } else { 0.0 })),
        Expr::Add(a, b) => mk_add(diff(a, i), diff(b, i)),
        Expr::Mul(a, b) => mk_add(mk_mul(diff(a, i), b.clone()), mk_mul(a.clone(), diff(b, i))),
        Expr::Neg(a) => mk_neg(diff(a, i)),
        Expr::Pow(a, m) => {
            // d(u^m) = m u^{m-1} u'
            let coeff = Arc::new(Expr::Const(*m as f64));
            mk_mul(mk_mul(coeff, mk_pow(a.clone(), m - 1)), diff(a, i))
        }
        Expr::Recip(a) => {
            // d(1/u) = -u' / u^2
            let sq = mk_mul(a.clone(), a.clone());
            mk_neg(mk_mul(diff(a, i), mk_recip(sq)))
        }
        Expr::Sin(a) => mk_mul(mk_cos(a.clone()), diff(a, i)),
        Expr::Cos(a) => mk_neg(mk_mul(mk_sin(a.clone()), diff(a, i))),
        Expr::Exp(a) => mk_mul(mk_exp(a.clone()), diff(a, i)),
    }
}

impl std::ops::Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.assert_same_chart(rhs);
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_add(self.expr.clone(), rhs.expr.clone()),
        }
    }
}

impl std::ops::Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.assert_same_chart(rhs);
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_add(self.expr.clone(), mk_neg(rhs.expr.clone())),
        }
    }
}

impl std::ops::Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.assert_same_chart(rhs);
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_mul(self.expr.clone(), rhs.expr.clone()),
        }
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            expr: mk_neg(self.expr.clone()),
        }
    }
}

// Printing targets the DSL grammar: everything printed here re-parses to an
// evaluation-equivalent field. Levels: 0 sum, 1 product, 2 power base/atom.
fn write_expr(e: &Expr, chart: &Chart, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let my_level = match e {
        Expr::Add(..) => 0,
        Expr::Mul(..) | Expr::Recip(..) => 1,
        Expr::Pow(..) => 2,
        Expr::Neg(..) => 2,
        Expr::Const(c) if *c < 0.0 => 2,
        _ => 3,
    };
    let parens = my_level < level;
    if parens {
        write!(f, "(")?;
    }
    match e {
        Expr::Const(c) => {
            if *c < 0.0 || c.is_nan() {
                write!(f, "-{}", -c)?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Expr::Coord(i) => write!(f, "{}", chart.coord_name(*i))?,
        Expr::Add(a, b) => {
            write_expr(a, chart, 0, f)?;
            match &**b {
                Expr::Neg(inner) => {
                    write!(f, " - ")?;
                    write_expr(inner, chart, 1, f)?;
                }
                Expr::Const(c) if *c < 0.0 => {
                    write!(f, " - {}", -c)?;
                }
                _ => {
                    write!(f, " + ")?;
                    write_expr(b, chart, 1, f)?;
                }
            }
        }
        Expr::Mul(a, b) => {
            write_expr(a, chart, 1, f)?;
            match &**b {
                Expr::Recip(inner) => {
                    write!(f, " / ")?;
                    write_expr(inner, chart, 2, f)?;
                }
                _ => {
                    write!(f, " * ")?;
                    write_expr(b, chart, 2, f)?;
                }
            }
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_expr(a, chart, 3, f)?;
        }
        Expr::Pow(a, m) => {
            write_expr(a, chart, 3, f)?;
            write!(f, "^{m}")?;
        }
        Expr::Recip(a) => {
            write!(f, "1 / ")?;
            write_expr(a, chart, 2, f)?;
        }
        Expr::Sin(a) => {
            write!(f, "sin(")?;
            write_expr(a, chart, 0, f)?;
            write!(f, ")")?;
        }
        Expr::Cos(a) => {
            write!(f, "cos(")?;
            write_expr(a, chart, 0, f)?;
            write!(f, ")")?;
        }
        Expr::Exp(a) => {
            write!(f, "exp(")?;
            write_expr(a, chart, 0, f)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(&self.expr, &self.chart, 0, f)
    }
}

impl ScalarField {
    /// Validation used by public entry points that take caller data.
    pub fn expect_chart(&self, chart: &Chart) -> Result<()> {
        if self.chart == *chart {
            Ok(())
        } else {
            Err(Error::ChartMismatch(
                chart.to_string(),
                self.chart.to_string(),
            ))
        }
    }
}
