//! Sample plans and numerical equality of fields.
//!
//! All identity checking in this crate is plan-relative: a claim `f = g`
//! is decided by evaluating both sides at a fixed set of sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::{Error, EvalError, Result};
use crate::scalar::ScalarField;

pub const DEFAULT_ABS_TOL: f64 = 1e-9;
pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_POINT_COUNT: usize = 20;
pub const DEFAULT_SEED: u64 = 42;

/// A fixed set of evaluation points with tolerances.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    points: Vec<Vec<f64>>,
    abs_tol: f64,
    rel_tol: f64,
    seed: Option<u64>,
}

impl SamplePlan {
    pub fn new(points: Vec<Vec<f64>>, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid(
                "sample plan needs at least one point".into(),
            ));
        }
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(Error::Invalid(
                "sample plan tolerances must be positive".into(),
            ));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Invalid(
                "sample points have inconsistent dimensions".into(),
            ));
        }
        Ok(SamplePlan {
            points,
            abs_tol,
            rel_tol,
            seed: None,
        })
    }

    /// Draw `count` points uniformly from `[-half_width, half_width]^dim`.
    /// The seed is recorded for reporting.
    pub fn sample(
        dim: usize,
        count: usize,
        half_width: f64,
        seed: u64,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::Invalid(
                "sample plan needs at least one point".into(),
            ));
        }
        if !(half_width > 0.0) {
            return Err(Error::Invalid(
                "sample box half-width must be positive".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.random_range(-half_width..half_width))
                    .collect()
            })
            .collect();
        let mut plan = SamplePlan::new(points, abs_tol, rel_tol)?;
        plan.seed = Some(seed);
        Ok(plan)
    }

    /// 20 points in `[-1,1]^n`, seed 42, tolerances 1e-9.
    pub fn default_for(chart: &Chart) -> Self {
        SamplePlan::sample(
            chart.dim(),
            DEFAULT_POINT_COUNT,
            1.0,
            DEFAULT_SEED,
            DEFAULT_ABS_TOL,
            DEFAULT_REL_TOL,
        )
        .expect("default plan parameters are valid")
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Result of comparing two fields on a plan.
#[derive(Debug, Clone)]
pub struct EqualityReport {
    pub max_residual: f64,
    pub threshold: f64,
    pub equal: bool,
    pub worst_point: Vec<f64>,
}

/// Max over plan points of `|f(p) - g(p)|`; equal when the max does not
/// exceed `abs_tol + rel_tol * (1 + max(|f|, |g|))`.
pub fn fields_equal_on(
    f: &ScalarField,
    g: &ScalarField,
    plan: &SamplePlan,
) -> std::result::Result<EqualityReport, EvalError> {
    assert!(
        f.chart() == g.chart(),
        "fields_equal_on requires fields on the same chart"
    );
    let mut max_residual = 0.0f64;
    let mut scale = 0.0f64;
    let mut worst = plan.points()[0].clone();
    for p in plan.points() {
        let a = f.eval(p)?;
        let b = g.eval(p)?;
        let r = (a - b).abs();
        if r > max_residual {
            max_residual = r;
            worst = p.clone();
        }
        scale = scale.max(a.abs()).max(b.abs());
    }
    let threshold = plan.abs_tol() + plan.rel_tol() * (1.0 + scale);
    Ok(EqualityReport {
        max_residual,
        threshold,
        equal: max_residual <= threshold,
        worst_point: worst,
    })
}

/// Max over plan points of `|f(p)|`.
pub fn max_abs_on(f: &ScalarField, plan: &SamplePlan) -> std::result::Result<f64, EvalError> {
    let mut m = 0.0f64;
    for p in plan.points() {
        m = m.max(f.eval(p)?.abs());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_is_reproducible() {
        let c = Chart::standard(3).unwrap();
        let a = SamplePlan::default_for(&c);
        let b = SamplePlan::default_for(&c);
        assert_eq!(a.points(), b.points());
        assert_eq!(a.seed(), Some(DEFAULT_SEED));
        assert_eq!(a.points().len(), 20);
        assert!(a.points().iter().flatten().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn equal_fields_have_zero_residual() {
        let c = Chart::standard(2).unwrap();
        let plan = SamplePlan::default_for(&c);
        let x0 = ScalarField::coord(&c, 0);
        let rep = fields_equal_on(&x0, &x0, &plan).unwrap();
        assert_eq!(rep.max_residual, 0.0);
        assert!(rep.equal);
    }

    #[test]
    fn algebraic_identity_within_rounding() {
        // (x0+1)^2 vs x0^2 + 2 x0 + 1
        let c = Chart::standard(1).unwrap();
        let plan = SamplePlan::default_for(&c);
        let x = ScalarField::coord(&c, 0);
        let one = ScalarField::one(&c);
        let f = (&x + &one).powi(2);
        let g = &(&x.powi(2) + &x.scale(2.0)) + &one;
        let rep = fields_equal_on(&f, &g, &plan).unwrap();
        assert!(rep.equal, "residual {}", rep.max_residual);
    }

    #[test]
    fn detects_offset() {
        let c = Chart::standard(1).unwrap();
        let plan = SamplePlan::sample(1, 20, 1.0, 7, 1e-8, 1e-12).unwrap();
        let x = ScalarField::coord(&c, 0);
        let g = &x + &ScalarField::constant(&c, 1e-3);
        let rep = fields_equal_on(&x, &g, &plan).unwrap();
        assert!(!rep.equal);
        assert!((rep.max_residual - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn propagates_division_by_zero() {
        let c = Chart::standard(1).unwrap();
        let points = vec![vec![0.0]];
        let plan = SamplePlan::new(points, 1e-9, 1e-9).unwrap();
        let f = ScalarField::coord(&c, 0).recip();
        let res = fields_equal_on(&f, &f, &plan);
        assert!(matches!(res, Err(EvalError::DivisionByZero { .. })));
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(SamplePlan::new(vec![], 1e-9, 1e-9).is_err());
        assert!(SamplePlan::new(vec![vec![0.0]], 0.0, 1e-9).is_err());
    }
}
