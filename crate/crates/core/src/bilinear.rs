//! Associative bilinear forms on the full exterior bundle.
//!
//! A form `η` with `η(x ∧ y, z) = η(x, y ∧ z)` is equivalent to a
//! collection of differential forms `{ω^(t)}_{t=0..n}` through
//! `η(x, y) = ω^{(k+l)}(x ∧ y)`; [`BilinearFormEta`] stores the collection,
//! so associativity holds by construction and the round trip with
//! [`BilinearFormEta::forms`] is exact.
//!
//! The module also carries the metric machinery needed to build an almost
//! torsion-free higher connection with `∇η ≡ 0`: a symmetric metric with a
//! symbolic adjugate/determinant inverse, the induced inner product on
//! forms, index raising, the normalized fields `E^(t)` with
//! `ω^(t)(E^(t)) = 1`, and the twist recipe
//! `F^{k,l}(X, Y) = [(∇̃_X ω^(t))(Y)] E^(t)`.

use crate::chart::Chart;
use crate::connection::{cov_form, AffineConnection, HigherConnection, TwistFields};
use crate::error::{Error, EvalError, Result};
use crate::exterior::{DifferentialForm, MultiVectorField};
use crate::linalg;
use crate::multi_index::MultiIndex;
use crate::plan::{max_abs_on, SamplePlan};
use crate::scalar::ScalarField;

/// Threshold below which a pointwise value counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-10;

/// Largest chart dimension for which the symbolic metric inverse is built.
pub const MAX_METRIC_DIM: usize = 6;

/// Determinant of a square matrix of scalar fields by cofactor expansion.
fn det_field_matrix(chart: &Chart, m: &[Vec<ScalarField>]) -> ScalarField {
    let n = m.len();
    if n == 0 {
        return ScalarField::one(chart);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = ScalarField::zero(chart);
    for j in 0..n {
        if m[0][j].is_structural_zero() {
            continue;
        }
        let minor: Vec<Vec<ScalarField>> = (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m[r][c].clone())
                    .collect()
            })
            .collect();
        let cof = det_field_matrix(chart, &minor);
        let term = &m[0][j] * &cof;
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// A symmetric metric with a symbolic inverse (adjugate over determinant).
/// Evaluation of inverse entries guards `det g = 0` at each point.
#[derive(Debug, Clone)]
pub struct Metric {
    chart: Chart,
    g: Vec<Vec<ScalarField>>,
    det: ScalarField,
    inv: Vec<Vec<ScalarField>>,
}

impl Metric {
    /// Build from a full matrix. Entries must be structurally symmetric:
    /// `g[i][j]` and `g[j][i]` must be the same expression tree.
    pub fn new(chart: &Chart, g: Vec<Vec<ScalarField>>) -> Result<Self> {
        let n = chart.dim();
        if n > MAX_METRIC_DIM {
            return Err(Error::Invalid(format!(
                "symbolic metric inverse supports dimension <= {MAX_METRIC_DIM}, got {n}"
            )));
        }
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!("metric must be {n}x{n}")));
        }
        for row in &g {
            for f in row {
                f.expect_chart(chart)?;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !g[i][j].same_tree(&g[j][i]) {
                    return Err(Error::Invalid(format!(
                        "metric is not structurally symmetric at ({i},{j}): `{}` vs `{}`",
                        g[i][j], g[j][i]
                    )));
                }
            }
        }
        // Canonicalize: share one tree per unordered pair.
        let mut g = g;
        for i in 0..n {
            for j in (i + 1)..n {
                g[j][i] = g[i][j].clone();
            }
        }
        let det = det_field_matrix(chart, &g);
        let det_recip = det.recip();
        let mut inv = vec![vec![ScalarField::zero(chart); n]; n];
        for i in 0..n {
            for j in i..n {
                // Adjugate entry (transposed cofactor); symmetry fills both
                // triangles at once.
                let minor: Vec<Vec<ScalarField>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != i)
                            .map(|c| g[r][c].clone())
                            .collect()
                    })
                    .collect();
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let entry = &det_field_matrix(chart, &minor).scale(sign) * &det_recip;
                inv[i][j] = entry.clone();
                inv[j][i] = entry;
            }
        }
        Ok(Metric {
            chart: chart.clone(),
            g,
            det,
            inv,
        })
    }

    pub fn identity(chart: &Chart) -> Self {
        let n = chart.dim();
        let mut g = vec![vec![ScalarField::zero(chart); n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = ScalarField::one(chart);
        }
        Metric::new(chart, g).expect("identity metric is valid")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.g[i][j]
    }

    pub fn det(&self) -> &ScalarField {
        &self.det
    }

    /// Entry `ḡ^{ij}` of the symbolic inverse.
    pub fn inverse_entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.inv[i][j]
    }

    /// The Levi-Civita connection:
    /// `Γ^k_{ij} = 1/2 Σ_m ḡ^{km} (∂_i g_{jm} + ∂_j g_{im} - ∂_m g_{ij})`.
    /// Symmetric in `i, j` by shared coefficient trees.
    pub fn levi_civita(&self) -> AffineConnection {
        let n = self.chart.dim();
        let mut conn = AffineConnection::flat(&self.chart);
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = ScalarField::zero(&self.chart);
                    for m in 0..n {
                        let bracket = &(&self.g[j][m].partial(i) + &self.g[i][m].partial(j))
                            - &self.g[i][j].partial(m);
                        if bracket.is_structural_zero() {
                            continue;
                        }
                        acc = &acc + &(&self.inv[k][m] * &bracket);
                    }
                    let gamma = acc.scale(0.5);
                    conn.set_christoffel(k, i, j, gamma.clone())
                        .expect("valid symbol");
                    conn.set_christoffel(k, j, i, gamma).expect("valid symbol");
                }
            }
        }
        conn
    }
}

/// Inner product of two equal-degree forms induced by the metric:
/// `⟨ω, φ⟩ = Σ_{I,J} ω_I φ_J det(ḡ^{i_a j_b})`.
pub fn form_inner(
    omega: &DifferentialForm,
    phi: &DifferentialForm,
    g: &Metric,
) -> Result<ScalarField> {
    g.chart().expect_same(omega.chart())?;
    g.chart().expect_same(phi.chart())?;
    if omega.degree() != phi.degree() {
        return Err(Error::DegreeMismatch(omega.degree(), phi.degree()));
    }
    let chart = g.chart();
    let mut acc = ScalarField::zero(chart);
    for (i_idx, ci) in omega.coefficients() {
        let rows = i_idx.indices();
        for (j_idx, cj) in phi.coefficients() {
            let cols = j_idx.indices();
            let mat: Vec<Vec<ScalarField>> = rows
                .iter()
                .map(|&a| {
                    cols.iter()
                        .map(|&b| g.inverse_entry(a, b).clone())
                        .collect()
                })
                .collect();
            acc = &acc + &(&(ci * cj) * &det_field_matrix(chart, &mat));
        }
    }
    Ok(acc)
}

/// Index raising: the multivector field with
/// `(ω^♯)^J = Σ_I det(ḡ^{j_a i_b}) ω_I`; satisfies `ω(ω^♯) = ⟨ω, ω⟩`.
pub fn sharp(omega: &DifferentialForm, g: &Metric) -> Result<MultiVectorField> {
    g.chart().expect_same(omega.chart())?;
    let t = omega.degree();
    if t == 0 {
        return Err(Error::Degree("index raising needs degree >= 1".into()));
    }
    let chart = g.chart();
    let mut out = MultiVectorField::zero(chart, t);
    for j_idx in MultiIndex::enumerate(chart.dim(), t) {
        let cols = j_idx.indices();
        let mut acc = ScalarField::zero(chart);
        for (i_idx, ci) in omega.coefficients() {
            let rows = i_idx.indices();
            let mat: Vec<Vec<ScalarField>> = cols
                .iter()
                .map(|&a| {
                    rows.iter()
                        .map(|&b| g.inverse_entry(a, b).clone())
                        .collect()
                })
                .collect();
            acc = &acc + &(ci * &det_field_matrix(chart, &mat));
        }
        out.set_term(j_idx, acc)?;
    }
    Ok(out)
}

/// The normalized field `E^(t) = (1 / ⟨ω^(t), ω^(t)⟩) (ω^(t))^♯`, which
/// satisfies `ω^(t)(E^(t)) = 1`. Errors when the squared norm vanishes at
/// a plan point.
pub fn e_field(
    omega: &DifferentialForm,
    g: &Metric,
    plan: &SamplePlan,
) -> Result<MultiVectorField> {
    let norm2 = form_inner(omega, omega, g)?;
    for p in plan.points() {
        let v = norm2.eval(p).map_err(Error::Eval)?;
        if v.abs() <= VANISHING_TOL {
            return Err(Error::VanishingNorm { point: p.clone() });
        }
    }
    Ok(sharp(omega, g)?.scale_field(&norm2.recip()))
}

/// An associative bilinear form on the full exterior bundle, stored as its
/// equivalent collection of differential forms `ω^(0)..ω^(n)`.
#[derive(Debug, Clone)]
pub struct BilinearFormEta {
    chart: Chart,
    forms: Vec<DifferentialForm>,
}

impl BilinearFormEta {
    pub fn zero(chart: &Chart) -> Self {
        let forms = (0..=chart.dim())
            .map(|t| DifferentialForm::zero(chart, t))
            .collect();
        BilinearFormEta {
            chart: chart.clone(),
            forms,
        }
    }

    /// Build from homogeneous forms; at most one per degree, missing
    /// degrees are zero.
    pub fn from_forms(
        chart: &Chart,
        forms: impl IntoIterator<Item = DifferentialForm>,
    ) -> Result<Self> {
        let mut eta = BilinearFormEta::zero(chart);
        let mut seen = vec![false; chart.dim() + 1];
        for f in forms {
            f.chart().expect_same(chart)?;
            let t = f.degree();
            if t > chart.dim() {
                return Err(Error::Degree(format!(
                    "form of degree {t} exceeds chart dimension {}",
                    chart.dim()
                )));
            }
            if seen[t] {
                return Err(Error::Invalid(format!("two forms of degree {t} supplied")));
            }
            seen[t] = true;
            eta.forms[t] = f;
        }
        Ok(eta)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// The associated collection `{ω^(t)}`, indexed by degree.
    pub fn forms(&self) -> &[DifferentialForm] {
        &self.forms
    }

    pub fn form(&self, t: usize) -> &DifferentialForm {
        &self.forms[t]
    }

    /// `η(X, Y) = ω^{(k+l)}(X ∧ Y)` for `1 ≤ k+l ≤ n`, the product
    /// `X Y ω^(0)` at degree zero, and the zero field above degree `n`.
    pub fn eval(&self, x: &MultiVectorField, y: &MultiVectorField) -> Result<ScalarField> {
        self.chart.expect_same(x.chart())?;
        self.chart.expect_same(y.chart())?;
        let total = x.degree() + y.degree();
        if total > self.chart.dim() {
            return Ok(ScalarField::zero(&self.chart));
        }
        if total == 0 {
            return Ok(&(&x.scalar_coefficient() * &y.scalar_coefficient())
                * &self.forms[0].scalar_coefficient());
        }
        self.forms[total].pair(&x.wedge(y)?)
    }
}

/// True when `ω^(n)` does not vanish at `p` (threshold [`VANISHING_TOL`]);
/// equivalently, `η` is nondegenerate on the fiber at `p`, which also makes
/// the fiber a supercommutative Frobenius algebra.
pub fn nondegenerate_at(eta: &BilinearFormEta, p: &[f64]) -> std::result::Result<bool, EvalError> {
    let n = eta.chart().dim();
    let top = eta.form(n);
    let full = MultiIndex::enumerate(n, n)[0];
    Ok(top.coefficient(&full).eval(p)?.abs() > VANISHING_TOL)
}

/// Result of the closedness identity check.
#[derive(Debug, Clone)]
pub struct ClosedReport {
    /// Max residual of the alternating-sum identity over plan points.
    pub identity_residual: f64,
    /// Max residual of the partials of `η(1,1)` over the plan.
    pub unit_residual: f64,
}

/// For closed collections, the derivation identity along 1-vector fields
/// `X_1..X_{k+1}`:
///
/// ```text
/// Σ_i (-1)^i X_i(η(X[i], 1)) = Σ_{i<j} (-1)^{i+j} η([X_i, X_j], X[i,j])
/// ```
///
/// plus constancy of `η(1, 1)`. Errors with `NotClosed` when some
/// `dω^(t)` fails to vanish on the plan.
pub fn closed_identity_check(
    eta: &BilinearFormEta,
    xs: &[MultiVectorField],
    plan: &SamplePlan,
) -> Result<ClosedReport> {
    let chart = eta.chart();
    let n = chart.dim();
    if xs.is_empty() || xs.len() > n + 1 {
        return Err(Error::Degree(format!(
            "need between 1 and {} fields, got {}",
            n + 1,
            xs.len()
        )));
    }
    for x in xs {
        chart.expect_same(x.chart())?;
        if x.degree() != 1 {
            return Err(Error::Degree(
                "closedness identity takes 1-vector fields".into(),
            ));
        }
    }
    for t in 0..=n {
        let d = eta.form(t).d();
        let r = d.max_abs_on(plan).map_err(Error::Eval)?;
        if r > plan.abs_tol() {
            return Err(Error::NotClosed(format!(
                "d of the degree-{t} form has residual {r:.3e}"
            )));
        }
    }
    let wedge_all = |skip: &[usize]| -> Result<MultiVectorField> {
        let mut acc = MultiVectorField::unit(chart);
        for (i, x) in xs.iter().enumerate() {
            if !skip.contains(&i) {
                acc = acc.wedge(x)?;
            }
        }
        Ok(acc)
    };
    // LHS: Σ_i (-1)^i X_i(η(X[i], 1)), 1-based i.
    let unit = MultiVectorField::unit(chart);
    let mut lhs = ScalarField::zero(chart);
    for i in 0..xs.len() {
        let omitted = wedge_all(&[i])?;
        let h = eta.eval(&omitted, &unit)?;
        let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
        lhs = &lhs + &xs[i].apply_to_function(&h).scale(sign);
    }
    // RHS: Σ_{i<j} (-1)^{i+j} η([X_i, X_j], X[i,j]), 1-based i, j.
    let mut rhs = ScalarField::zero(chart);
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let br = crate::exterior::snb(&xs[i], &xs[j])?;
            let rest = wedge_all(&[i, j])?;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            rhs = &rhs + &eta.eval(&br, &rest)?.scale(sign);
        }
    }
    let identity_residual = max_abs_on(&(&lhs - &rhs), plan).map_err(Error::Eval)?;
    let mut unit_residual = 0.0f64;
    for i in 0..n {
        unit_residual = unit_residual.max(
            max_abs_on(&eta.form(0).scalar_coefficient().partial(i), plan).map_err(Error::Eval)?,
        );
    }
    Ok(ClosedReport {
        identity_residual,
        unit_residual,
    })
}

/// Covariant derivative of `η`:
/// `(∇_X η)(Y, Z) = (∇_X ω^(t))(Y ∧ Z)` with `t = k + l + m - 1`.
pub fn nabla_eta(
    conn: &HigherConnection,
    eta: &BilinearFormEta,
    x: &MultiVectorField,
    y: &MultiVectorField,
    z: &MultiVectorField,
) -> Result<ScalarField> {
    let chart = eta.chart();
    chart.expect_same(conn.chart())?;
    chart.expect_same(x.chart())?;
    chart.expect_same(y.chart())?;
    chart.expect_same(z.chart())?;
    let n = chart.dim();
    let (k, l, m) = (x.degree(), y.degree(), z.degree());
    if k + l + m > n + 1 {
        return Err(Error::Degree(format!(
            "degrees ({k},{l},{m}) exceed the admissible total {}",
            n + 1
        )));
    }
    if k == 0 {
        return Ok(ScalarField::zero(chart));
    }
    let t = k + l + m - 1;
    let domega = cov_form(conn, x, eta.form(t))?;
    let yz = y.wedge(z)?;
    if domega.degree() == 0 {
        // Degree-0 functional: η(f) means f·η.
        return Ok(&domega.scalar_coefficient() * &yz.scalar_coefficient());
    }
    domega.pair(&yz)
}

/// Result of the parallelism scan.
#[derive(Debug, Clone)]
pub struct ParallelReport {
    pub max_residual: f64,
    pub parallel: bool,
    /// Bidegree and basis pair attaining the max residual.
    pub worst: Option<(usize, usize, MultiIndex, MultiIndex)>,
}

/// Scan the parallelism criterion
/// `(∇̃_X ω^(t))(Y) = ω^(t)(F^{k,l}(X, Y))` over all basis pairs
/// `(∂_I, ∂_J)` with `k, l > 0`, `t = k + l - 1 ≤ n`.
pub fn is_parallel(
    conn: &HigherConnection,
    eta: &BilinearFormEta,
    plan: &SamplePlan,
) -> Result<ParallelReport> {
    let chart = eta.chart();
    chart.expect_same(conn.chart())?;
    let n = chart.dim();
    let induced = HigherConnection::induced(conn.base().clone());
    let mut max_residual = 0.0f64;
    let mut worst = None;
    for k in 1..=n {
        for l in 1..=n {
            if k + l - 1 > n {
                continue;
            }
            let t = k + l - 1;
            for i_idx in MultiIndex::enumerate(n, k) {
                let x = MultiVectorField::basis(chart, i_idx);
                // (∇̃_{∂_I} ω^(t)) is an l-form; probing it at ∂_J reads a
                // coefficient.
                let lhs_form = cov_form(&induced, &x, eta.form(t))?;
                for j_idx in MultiIndex::enumerate(n, l) {
                    let y = MultiVectorField::basis(chart, j_idx);
                    let lhs = lhs_form.coefficient(&j_idx);
                    let rhs = eta.form(t).pair(&conn.twist().apply(&x, &y)?)?;
                    let r = max_abs_on(&(&lhs - &rhs), plan).map_err(Error::Eval)?;
                    if r > max_residual {
                        max_residual = r;
                        worst = Some((k, l, i_idx, j_idx));
                    }
                }
            }
        }
    }
    Ok(ParallelReport {
        max_residual,
        parallel: max_residual <= plan.abs_tol(),
        worst,
    })
}

/// Plan-relative diagnostics for one degree of the collection.
#[derive(Debug, Clone)]
pub struct DegreeDiagnostic {
    pub degree: usize,
    /// Every coefficient below [`VANISHING_TOL`] at every plan point.
    pub zero_on_plan: bool,
    /// Some coefficient above [`VANISHING_TOL`] at every plan point.
    pub nonvanishing_on_plan: bool,
    /// Max residual of the exterior derivative on the plan.
    pub closed_residual: f64,
    /// The contraction `v ↦ i_v ω` has trivial kernel at every plan point.
    pub pointwise_nondegenerate: bool,
}

/// Membership flags for the admissible classes of collections. All
/// judgments are plan-relative.
#[derive(Debug, Clone)]
pub struct EtaClassification {
    pub in_b_circle: bool,
    pub in_b_plectic: bool,
    pub per_degree: Vec<DegreeDiagnostic>,
}

/// Classify a collection: the base class needs a vanishing degree-1 part
/// and every nonzero part of degree `t > 1` nonvanishing on the plan; the
/// plectic class additionally needs each such part closed and pointwise
/// nondegenerate as a map `v ↦ i_v ω` on tangent vectors.
pub fn classify_eta(eta: &BilinearFormEta, plan: &SamplePlan) -> Result<EtaClassification> {
    let chart = eta.chart();
    let n = chart.dim();
    let mut per_degree = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let omega = eta.form(t);
        let mut zero = true;
        let mut nonvanishing = true;
        for p in plan.points() {
            let mut point_max = 0.0f64;
            for (_, c) in omega.coefficients() {
                point_max = point_max.max(c.eval(p).map_err(Error::Eval)?.abs());
            }
            if point_max > VANISHING_TOL {
                zero = false;
            } else {
                nonvanishing = false;
            }
        }
        let closed_residual = omega.d().max_abs_on(plan).map_err(Error::Eval)?;
        let pointwise_nondegenerate = if t == 0 || zero {
            false
        } else {
            contraction_nondegenerate(omega, plan)?
        };
        per_degree.push(DegreeDiagnostic {
            degree: t,
            zero_on_plan: zero,
            nonvanishing_on_plan: nonvanishing,
            closed_residual,
            pointwise_nondegenerate,
        });
    }
    let degree_one_zero = per_degree[1].zero_on_plan;
    let in_b_circle = degree_one_zero
        && per_degree
            .iter()
            .skip(2)
            .all(|d| d.zero_on_plan || d.nonvanishing_on_plan);
    let in_b_plectic = in_b_circle
        && per_degree.iter().skip(2).all(|d| {
            d.zero_on_plan || (d.closed_residual <= plan.abs_tol() && d.pointwise_nondegenerate)
        });
    Ok(EtaClassification {
        in_b_circle,
        in_b_plectic,
        per_degree,
    })
}

/// Trivial kernel of `v ↦ i_v ω` at every plan point: the
/// `C(n,t-1) x n` matrix `A[K][i] = sign({i},K) ω_{{i}∪K}(p)` has rank n.
fn contraction_nondegenerate(omega: &DifferentialForm, plan: &SamplePlan) -> Result<bool> {
    let chart = omega.chart();
    let n = chart.dim();
    let t = omega.degree();
    if t == 0 {
        return Ok(false);
    }
    let rows = MultiIndex::enumerate(n, t - 1);
    if rows.len() < n {
        return Ok(false);
    }
    for p in plan.points() {
        let mut mat = Vec::with_capacity(rows.len());
        for k_idx in &rows {
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                let single = MultiIndex::single(i);
                let v = match single.merge(k_idx) {
                    Some((sign, merged)) => {
                        sign * omega.coefficient(&merged).eval(p).map_err(Error::Eval)?
                    }
                    None => 0.0,
                };
                row.push(v);
            }
            mat.push(row);
        }
        if linalg::rank(mat) < n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Build an almost torsion-free higher connection with `∇η ≡ 0` from a
/// collection in the base class, a metric, and a torsion-free base affine
/// connection (the Levi-Civita connection of the metric when `None`).
///
/// For each degree `t` with `ω^(t)` nonzero on the plan, the twist fields
/// of every bidegree with `k + l - 1 = t` are
/// `F[K][I][J] = [(∇̃_{∂_I} ω^(t))(∂_J)] (E^(t))^K`; all other bidegrees
/// are zero.
pub fn construct_parallel(
    eta: &BilinearFormEta,
    g: &Metric,
    base: Option<AffineConnection>,
    plan: &SamplePlan,
) -> Result<HigherConnection> {
    let chart = eta.chart();
    chart.expect_same(g.chart())?;
    let n = chart.dim();
    let classification = classify_eta(eta, plan)?;
    if !classification.in_b_circle {
        let mut reasons = Vec::new();
        if !classification.per_degree[1].zero_on_plan {
            reasons.push("the degree-1 part does not vanish".to_string());
        }
        for d in classification.per_degree.iter().skip(2) {
            if !d.zero_on_plan && !d.nonvanishing_on_plan {
                reasons.push(format!(
                    "the degree-{} part vanishes at a plan point",
                    d.degree
                ));
            }
        }
        return Err(Error::NotInBCircle(reasons.join("; ")));
    }
    let base = match base {
        Some(b) => {
            chart.expect_same(b.chart())?;
            b
        }
        None => g.levi_civita(),
    };
    let sym = base.symmetry_residual(plan)?;
    if sym > plan.abs_tol() {
        return Err(Error::BaseNotTorsionFree(format!(
            "Christoffel symmetry residual {sym:.3e}"
        )));
    }
    let induced = HigherConnection::induced(base.clone());
    let mut twist = TwistFields::zero(chart);
    for t in 1..=n {
        if classification.per_degree[t].zero_on_plan {
            continue;
        }
        let omega = eta.form(t);
        let e_t = e_field(omega, g, plan)?;
        for k in 1..=t {
            let l = t + 1 - k;
            for i_idx in MultiIndex::enumerate(n, k) {
                let x = MultiVectorField::basis(chart, i_idx);
                let cov = cov_form(&induced, &x, omega)?;
                for j_idx in MultiIndex::enumerate(n, l) {
                    let scalar = cov.coefficient(&j_idx);
                    if scalar.is_structural_zero() {
                        continue;
                    }
                    for (kk, ec) in e_t.coefficients() {
                        twist.add_term(k, l, (*kk, i_idx, j_idx), &scalar * ec)?;
                    }
                }
            }
        }
    }
    HigherConnection::new(base, twist)
}
