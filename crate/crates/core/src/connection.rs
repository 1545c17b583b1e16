//! Higher affine connections.
//!
//! A higher connection is classified by a pair: an affine connection on the
//! chart (Christoffel symbols) together with a collection of twist fields
//! `F^{k,l}`, one tensor per bidegree with `k, l > 0`, `k + l - 1 ≤ n`, and
//! `F^{1,1} ≡ 0`. The covariant derivative splits as
//!
//! ```text
//! ∇_X Y = ∇̃_X Y + F^{k,l}(X, Y)
//! ```
//!
//! where `∇̃` is the induced extension of the base connection: along a
//! decomposable `X = X_1 ∧ ... ∧ X_k`,
//!
//! ```text
//! ∇̃_X Y = Σ_j (-1)^{k-j} X_1 ∧ ... X̂_j ... ∧ X_k ∧ ∇̃_{X_j} Y
//! ```
//!
//! with `∇̃_{X_j}` acting on `Y` as a derivation over the wedge and as
//! `X_j` itself on functions.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::exterior::{interior_form, lie, snb, DifferentialForm, GradedMVF, MultiVectorField};
use crate::multi_index::{parity_sign, MultiIndex};
use crate::plan::SamplePlan;
use crate::random::random_polynomial;
use crate::scalar::ScalarField;

/// An affine connection on the chart, stored as Christoffel symbols:
/// `∇̃_{∂_i} ∂_j = Σ_k Γ^k_{ij} ∂_k`.
#[derive(Debug, Clone)]
pub struct AffineConnection {
    chart: Chart,
    gamma: Vec<Vec<Vec<ScalarField>>>,
}

impl AffineConnection {
    /// The flat connection, `Γ ≡ 0`.
    pub fn flat(chart: &Chart) -> Self {
        let n = chart.dim();
        let zero = ScalarField::zero(chart);
        AffineConnection {
            chart: chart.clone(),
            gamma: vec![vec![vec![zero; n]; n]; n],
        }
    }

    /// Build from a full `[k][i][j]` table of Christoffel symbols.
    pub fn from_coefficients(chart: &Chart, gamma: Vec<Vec<Vec<ScalarField>>>) -> Result<Self> {
        let n = chart.dim();
        if gamma.len() != n
            || gamma
                .iter()
                .any(|a| a.len() != n || a.iter().any(|b| b.len() != n))
        {
            return Err(Error::Invalid(format!(
                "Christoffel table must be {n}x{n}x{n}"
            )));
        }
        for plane in &gamma {
            for row in plane {
                for f in row {
                    f.expect_chart(chart)?;
                }
            }
        }
        Ok(AffineConnection {
            chart: chart.clone(),
            gamma,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> &ScalarField {
        &self.gamma[k][i][j]
    }

    pub fn set_christoffel(&mut self, k: usize, i: usize, j: usize, f: ScalarField) -> Result<()> {
        f.expect_chart(&self.chart)?;
        self.gamma[k][i][j] = f;
        Ok(())
    }

    /// `∇̃_{∂_i} ∂_j` as a 1-vector field.
    fn cov_coordinate(&self, i: usize, j: usize) -> MultiVectorField {
        let n = self.chart.dim();
        let mut out = MultiVectorField::zero(&self.chart, 1);
        for k in 0..n {
            let g = &self.gamma[k][i][j];
            if !g.is_structural_zero() {
                out.set_term(MultiIndex::single(k), g.clone())
                    .expect("valid term");
            }
        }
        out
    }

    /// Max residual of `Γ^k_{ij} - Γ^k_{ji}` on the plan; within tolerance
    /// exactly when the connection is torsion-free as an affine connection.
    pub fn symmetry_residual(&self, plan: &SamplePlan) -> Result<f64> {
        let n = self.chart.dim();
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let diff = &self.gamma[k][i][j] - &self.gamma[k][j][i];
                    worst = worst.max(crate::plan::max_abs_on(&diff, plan).map_err(Error::Eval)?);
                }
            }
        }
        Ok(worst)
    }
}

/// Covariant derivative of a homogeneous multivector field along a 1-vector
/// field: the derivation extension `∇̃_Z (Y_1 ∧ ... ∧ Y_l) =
/// Σ_j Y_1 ∧ ... ∇̃_Z Y_j ... ∧ Y_l`, with `∇̃_Z f = Z f` on functions.
pub fn affine_cov(
    conn: &AffineConnection,
    z: &MultiVectorField,
    y: &MultiVectorField,
) -> Result<MultiVectorField> {
    conn.chart().expect_same(z.chart())?;
    conn.chart().expect_same(y.chart())?;
    if z.degree() != 1 {
        return Err(Error::Degree(format!(
            "affine covariant derivative needs a 1-vector direction, got degree {}",
            z.degree()
        )));
    }
    let chart = conn.chart();
    let l = y.degree();
    if l == 0 {
        return Ok(MultiVectorField::from_scalar(
            z.apply_to_function(&y.scalar_coefficient()),
        ));
    }
    let mut out = MultiVectorField::zero(chart, l);
    for (j_idx, c) in y.coefficients() {
        // Leibniz on the coefficient: (Z c) ∂_J
        out = out.add(&MultiVectorField::basis(chart, *j_idx).scale_field(&z.apply_to_function(c)));
        // and on each wedge factor of ∂_J.
        let indices = j_idx.indices();
        for (zi, zc) in z.coefficients() {
            let i = zi.indices()[0];
            for (pos, &jr) in indices.iter().enumerate() {
                let nabla = conn.cov_coordinate(i, jr);
                if nabla.is_structural_zero() {
                    continue;
                }
                let prefix = MultiVectorField::basis(
                    chart,
                    MultiIndex::new(&indices[..pos]).expect("increasing"),
                );
                let suffix = MultiVectorField::basis(
                    chart,
                    MultiIndex::new(&indices[pos + 1..]).expect("increasing"),
                );
                let term = prefix.wedge(&nabla)?.wedge(&suffix)?;
                out = out.add(&term.scale_field(&(c * zc)));
            }
        }
    }
    Ok(out)
}

/// The induced higher connection of a base affine connection, applied to a
/// homogeneous direction `X` of degree `k` and a graded argument. Degree-0
/// directions give zero.
pub fn induced_cov(
    conn: &AffineConnection,
    x: &MultiVectorField,
    y: &GradedMVF,
) -> Result<GradedMVF> {
    conn.chart().expect_same(x.chart())?;
    conn.chart().expect_same(y.chart())?;
    let mut out = GradedMVF::zero(conn.chart());
    for (_, yl) in y.components() {
        out.add_component(induced_cov_homogeneous(conn, x, yl)?);
    }
    Ok(out)
}

/// As [`induced_cov`], for a homogeneous argument.
pub fn induced_cov_homogeneous(
    conn: &AffineConnection,
    x: &MultiVectorField,
    y: &MultiVectorField,
) -> Result<MultiVectorField> {
    conn.chart().expect_same(x.chart())?;
    conn.chart().expect_same(y.chart())?;
    let chart = conn.chart();
    let k = x.degree();
    let l = y.degree();
    if k == 0 {
        return Ok(MultiVectorField::zero(chart, 0));
    }
    let out_degree = k + l - 1;
    let mut out = MultiVectorField::zero(chart, out_degree);
    for (i_idx, xc) in x.coefficients() {
        for pos in 0..k {
            let (ij, rest) = i_idx.remove_position(pos);
            let direction = MultiVectorField::coordinate(chart, ij);
            let cov = affine_cov(conn, &direction, y)?;
            if cov.is_structural_zero() {
                continue;
            }
            let term = MultiVectorField::basis(chart, rest).wedge(&cov)?;
            // (-1)^{k-j} with j = pos + 1
            let sign = parity_sign(k as i64 - (pos as i64 + 1));
            out = out.add(&term.scale_field(xc).scale(sign));
        }
    }
    Ok(out)
}

/// One twist tensor: coefficients keyed by `(K, I, J)`.
pub type TwistTensor = BTreeMap<(MultiIndex, MultiIndex, MultiIndex), ScalarField>;

/// The twist fields of a higher connection: for each bidegree `(k, l)` with
/// `k, l > 0` and `k + l - 1 ≤ n`, a tensor of coefficients
/// `F[K][I][J]` meaning `F^{k,l}(∂_I, ∂_J) = Σ_K F[K][I][J] ∂_K`.
/// The `(1,1)` tensor is identically zero.
#[derive(Debug, Clone)]
pub struct TwistFields {
    chart: Chart,
    blocks: BTreeMap<(usize, usize), TwistTensor>,
}

impl TwistFields {
    pub fn zero(chart: &Chart) -> Self {
        TwistFields {
            chart: chart.clone(),
            blocks: BTreeMap::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Add a coefficient to `F^{k,l}[K][I][J]`.
    pub fn add_term(
        &mut self,
        k: usize,
        l: usize,
        key: (MultiIndex, MultiIndex, MultiIndex),
        f: ScalarField,
    ) -> Result<()> {
        let n = self.chart.dim();
        if k == 0 || l == 0 {
            return Err(Error::Invalid("twist fields vanish when kl = 0".into()));
        }
        if k + l - 1 > n {
            return Err(Error::Invalid(format!(
                "twist bidegree ({k},{l}) exceeds chart dimension {n}"
            )));
        }
        if (k, l) == (1, 1) {
            return Err(Error::Invalid(
                "the (1,1) twist field is identically zero".into(),
            ));
        }
        let (kk, ii, jj) = key;
        if kk.degree() != k + l - 1 || ii.degree() != k || jj.degree() != l {
            return Err(Error::Invalid(format!(
                "twist entry [{kk}][{ii}][{jj}] has degrees ({},{},{}), expected ({},{k},{l})",
                kk.degree(),
                ii.degree(),
                jj.degree(),
                k + l - 1
            )));
        }
        if kk.min_dim() > n || ii.min_dim() > n || jj.min_dim() > n {
            return Err(Error::Invalid(
                "twist entry index out of chart range".into(),
            ));
        }
        f.expect_chart(&self.chart)?;
        if f.is_structural_zero() {
            return Ok(());
        }
        let block = self.blocks.entry((k, l)).or_default();
        match block.entry(key) {
            Entry::Occupied(mut e) => {
                let sum = e.get() + &f;
                if sum.is_structural_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            Entry::Vacant(v) => {
                v.insert(f);
            }
        }
        Ok(())
    }

    pub fn coefficient(
        &self,
        k: usize,
        l: usize,
        key: &(MultiIndex, MultiIndex, MultiIndex),
    ) -> ScalarField {
        self.blocks
            .get(&(k, l))
            .and_then(|b| b.get(key))
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(&self.chart))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &TwistTensor)> {
        self.blocks.iter()
    }

    pub fn is_structural_zero(&self) -> bool {
        self.blocks.values().all(|b| b.is_empty())
    }

    /// Contraction `F^{k,l}(X, Y)^K = Σ_{I,J} F[K][I][J] X^I Y^J`, zero for
    /// bidegrees without a stored block.
    pub fn apply(&self, x: &MultiVectorField, y: &MultiVectorField) -> Result<MultiVectorField> {
        self.chart.expect_same(x.chart())?;
        self.chart.expect_same(y.chart())?;
        let (k, l) = (x.degree(), y.degree());
        let out_degree = (k + l).saturating_sub(1);
        let mut out = MultiVectorField::zero(&self.chart, out_degree);
        let Some(block) = self.blocks.get(&(k, l)) else {
            return Ok(out);
        };
        for ((kk, ii, jj), f) in block {
            let xc = x.coefficient(ii);
            if xc.is_structural_zero() {
                continue;
            }
            let yc = y.coefficient(jj);
            if yc.is_structural_zero() {
                continue;
            }
            out.set_term(*kk, &(f * &xc) * &yc)?;
        }
        Ok(out)
    }

    /// The graded symmetrization
    /// `G^{k,l}(X,Y) = F^{k,l}(X,Y) + (-1)^{(k-1)(l-1)} F^{l,k}(Y,X)`.
    /// With a torsion-free base, the connection classified by `G` has
    /// vanishing higher torsion.
    pub fn symmetrized(&self) -> TwistFields {
        let mut out = TwistFields::zero(&self.chart);
        for (&(k, l), block) in &self.blocks {
            let sign = parity_sign((k as i64 - 1) * (l as i64 - 1));
            for ((kk, ii, jj), f) in block {
                out.add_term(k, l, (*kk, *ii, *jj), f.clone())
                    .expect("valid twist term");
                out.add_term(l, k, (*kk, *jj, *ii), f.scale(sign))
                    .expect("valid twist term");
            }
        }
        out
    }

    /// Max absolute value of any stored coefficient on the plan.
    pub fn max_abs_on(&self, plan: &SamplePlan) -> Result<f64> {
        let mut m = 0.0f64;
        for block in self.blocks.values() {
            for f in block.values() {
                m = m.max(crate::plan::max_abs_on(f, plan).map_err(Error::Eval)?);
            }
        }
        Ok(m)
    }
}

/// Graded symmetrization of a twist family (see [`TwistFields::symmetrized`]).
pub fn symmetrize_twist(twist: &TwistFields) -> TwistFields {
    twist.symmetrized()
}

/// A higher affine connection, classified by its base affine connection and
/// twist fields.
#[derive(Debug, Clone)]
pub struct HigherConnection {
    base: AffineConnection,
    twist: TwistFields,
}

impl HigherConnection {
    pub fn new(base: AffineConnection, twist: TwistFields) -> Result<Self> {
        base.chart().expect_same(twist.chart())?;
        Ok(HigherConnection { base, twist })
    }

    /// The induced higher connection of `base` (zero twist).
    pub fn induced(base: AffineConnection) -> Self {
        let twist = TwistFields::zero(base.chart());
        HigherConnection { base, twist }
    }

    pub fn chart(&self) -> &Chart {
        self.base.chart()
    }

    pub fn base(&self) -> &AffineConnection {
        &self.base
    }

    pub fn twist(&self) -> &TwistFields {
        &self.twist
    }

    /// The classifying pair.
    pub fn decompose(&self) -> (AffineConnection, TwistFields) {
        (self.base.clone(), self.twist.clone())
    }
}

/// Covariant derivative `∇_X Y = ∇̃_X Y + F^{k,l}(X, Y)`.
pub fn higher_cov(
    conn: &HigherConnection,
    x: &MultiVectorField,
    y: &MultiVectorField,
) -> Result<MultiVectorField> {
    let induced = induced_cov_homogeneous(conn.base(), x, y)?;
    let twist = conn.twist().apply(x, y)?;
    Ok(induced.add(&twist))
}

/// Higher torsion `T(X,Y) = ∇_X Y - (-1)^{(k-1)(l-1)} ∇_Y X - [X,Y]`.
pub fn torsion(
    conn: &HigherConnection,
    x: &MultiVectorField,
    y: &MultiVectorField,
) -> Result<MultiVectorField> {
    let (k, l) = (x.degree() as i64, y.degree() as i64);
    let a = higher_cov(conn, x, y)?;
    let b = higher_cov(conn, y, x)?;
    let br = snb(x, y)?;
    Ok(a.add_scaled(&b, -parity_sign((k - 1) * (l - 1))).sub(&br))
}

/// Twist fields of an upper-induced connection, built from the seed family
/// `{F^{k,1}}`: along a decomposable `Y = Y_1 ∧ ... ∧ Y_l`,
///
/// ```text
/// F^{k,l}(X, Y) = Σ_j (-1)^{j-1} F^{k,1}(X, Y_j) ∧ Y_1 ∧ ... Ŷ_j ... ∧ Y_l.
/// ```
///
/// The seed family may only contain `(k, 1)` blocks; `F^{1,1}` must vanish,
/// which forces `F^{1,l} ≡ 0` in the output.
pub fn upper_induced_from(base: &AffineConnection, seeds: &TwistFields) -> Result<TwistFields> {
    base.chart().expect_same(seeds.chart())?;
    let chart = base.chart();
    let n = chart.dim();
    for (&(k, l), block) in seeds.blocks() {
        if l != 1 && !block.is_empty() {
            return Err(Error::InvalidSeed(format!(
                "upper-induced seeds must have bidegree (k,1), found ({k},{l})"
            )));
        }
    }
    let mut out = TwistFields::zero(chart);
    for (&(k, _), block) in seeds.blocks() {
        // Copy the seed block itself; the new blocks extend it to l >= 2.
        for ((kk, ii, jj), f) in block {
            out.add_term(k, 1, (*kk, *ii, *jj), f.clone())?;
        }
        for l in 2..=n {
            if k + l - 1 > n {
                break;
            }
            for j_idx in MultiIndex::enumerate(n, l) {
                for i_idx in MultiIndex::enumerate(n, k) {
                    let mut value = MultiVectorField::zero(chart, k + l - 1);
                    for pos in 0..l {
                        let (jr, rest) = j_idx.remove_position(pos);
                        // F^{k,1}(∂_I, ∂_{j_r}) from the seed block
                        let mut seed_val = MultiVectorField::zero(chart, k);
                        for ((kk, ii, jj), f) in block {
                            if *ii == i_idx && *jj == MultiIndex::single(jr) {
                                seed_val.set_term(*kk, f.clone())?;
                            }
                        }
                        if seed_val.is_structural_zero() {
                            continue;
                        }
                        let term = seed_val.wedge(&MultiVectorField::basis(chart, rest))?;
                        value = value.add(&term.scale(parity_sign(pos as i64)));
                    }
                    for (kk, f) in value.coefficients() {
                        out.add_term(k, l, (*kk, i_idx, j_idx), f.clone())?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Twist fields of a lower-induced connection, built from the seed family
/// `{F^{1,l}}`: along a decomposable `X = X_1 ∧ ... ∧ X_k`,
///
/// ```text
/// F^{k,l}(X, Y) = Σ_j (-1)^{k-j} X_1 ∧ ... X̂_j ... ∧ X_k ∧ F^{1,l}(X_j, Y).
/// ```
///
/// The output has `F^{k,1} ≡ 0`.
pub fn lower_induced_from(base: &AffineConnection, seeds: &TwistFields) -> Result<TwistFields> {
    base.chart().expect_same(seeds.chart())?;
    let chart = base.chart();
    let n = chart.dim();
    for (&(k, l), block) in seeds.blocks() {
        if k != 1 && !block.is_empty() {
            return Err(Error::InvalidSeed(format!(
                "lower-induced seeds must have bidegree (1,l), found ({k},{l})"
            )));
        }
    }
    let mut out = TwistFields::zero(chart);
    for (&(_, l), block) in seeds.blocks() {
        for ((kk, ii, jj), f) in block {
            out.add_term(1, l, (*kk, *ii, *jj), f.clone())?;
        }
        for k in 2..=n {
            if k + l - 1 > n {
                break;
            }
            for i_idx in MultiIndex::enumerate(n, k) {
                for j_idx in MultiIndex::enumerate(n, l) {
                    let mut value = MultiVectorField::zero(chart, k + l - 1);
                    for pos in 0..k {
                        let (ir, rest) = i_idx.remove_position(pos);
                        let mut seed_val = MultiVectorField::zero(chart, l);
                        for ((kk, ii, jj), f) in block {
                            if *ii == MultiIndex::single(ir) && *jj == j_idx {
                                seed_val.set_term(*kk, f.clone())?;
                            }
                        }
                        if seed_val.is_structural_zero() {
                            continue;
                        }
                        let term = MultiVectorField::basis(chart, rest).wedge(&seed_val)?;
                        // (-1)^{k-j} with j = pos + 1
                        value = value.add(&term.scale(parity_sign(k as i64 - (pos as i64 + 1))));
                    }
                    for (kk, f) in value.coefficients() {
                        out.add_term(k, l, (*kk, i_idx, j_idx), f.clone())?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Covariant derivative of a differential form along a multivector field:
/// the `(deg ω - k + 1)`-form with coefficients recovered from
///
/// ```text
/// ∇_X ω (Y) = (-1)^{(k-1)(l-1)} L_X i_Y ω - ω(∇_X Y)
/// ```
///
/// on basis fields `Y = ∂_J`. Zero for `k = 0` or negative target degree;
/// at target degree 0 this is the scalar `L_X ω`.
pub fn cov_form(
    conn: &HigherConnection,
    x: &MultiVectorField,
    omega: &DifferentialForm,
) -> Result<DifferentialForm> {
    conn.chart().expect_same(x.chart())?;
    conn.chart().expect_same(omega.chart())?;
    let chart = conn.chart();
    let k = x.degree() as i64;
    let l = omega.degree() as i64;
    if k == 0 {
        return Ok(DifferentialForm::zero(chart, omega.degree() + 1));
    }
    let target = l - k + 1;
    if target < 0 {
        return Ok(DifferentialForm::zero(chart, 0));
    }
    let sign = parity_sign((k - 1) * (l - 1));
    let mut out = DifferentialForm::zero(chart, target as usize);
    for j_idx in MultiIndex::enumerate(chart.dim(), target as usize) {
        let probe = MultiVectorField::basis(chart, j_idx);
        let lie_part = lie(x, &interior_form(&probe, omega)?)?;
        let cov_part = omega.pair(&higher_cov(conn, x, &probe)?)?;
        let coeff = &lie_part.scalar_coefficient().scale(sign) - &cov_part;
        out.set_term(j_idx, coeff)?;
    }
    Ok(out)
}

/// Residual scan of the higher torsion over basis pairs, plus the finite
/// surrogate family for the almost-torsion-free property: all 1-vector
/// basis pairs together with pairs `(f ∂_I, g ∂_J)` with `I ∩ J ≠ ∅` and
/// random polynomial `f, g` (their wedge is certified structurally zero
/// before testing).
#[derive(Debug, Clone)]
pub struct TorsionReport {
    /// Max residual of `T(∂_I, ∂_J)` per bidegree.
    pub residuals: BTreeMap<(usize, usize), f64>,
    /// Max residual over 1-vector basis pairs.
    pub one_vector_residual: f64,
    /// Max residual over the overlapping-pair surrogate family.
    pub overlap_residual: f64,
    pub torsion_free: bool,
    pub almost_torsion_free: bool,
}

impl TorsionReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0f64, |a, &b| a.max(b))
    }
}

/// Scan torsion residuals on the plan. `seed` drives the random polynomial
/// coefficients of the surrogate family; the pass threshold is the plan's
/// absolute tolerance.
pub fn torsion_report(
    conn: &HigherConnection,
    plan: &SamplePlan,
    seed: u64,
) -> Result<TorsionReport> {
    let chart = conn.chart();
    let n = chart.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residuals = BTreeMap::new();
    let mut overlap_residual = 0.0f64;
    for k in 1..=n {
        for l in 1..=n {
            if k + l - 1 > n {
                continue;
            }
            let mut worst = 0.0f64;
            for i_idx in MultiIndex::enumerate(n, k) {
                for j_idx in MultiIndex::enumerate(n, l) {
                    let xi = MultiVectorField::basis(chart, i_idx);
                    let yj = MultiVectorField::basis(chart, j_idx);
                    let t = torsion(conn, &xi, &yj)?;
                    worst = worst.max(t.max_abs_on(plan).map_err(Error::Eval)?);
                    if i_idx.merge(&j_idx).is_none() {
                        // Overlapping indices: (f ∂_I) ∧ (g ∂_J) = 0.
                        let f = random_polynomial(chart, 2, &mut rng);
                        let g = random_polynomial(chart, 2, &mut rng);
                        let fx = xi.scale_field(&f);
                        let gy = yj.scale_field(&g);
                        assert!(fx.wedge(&gy)?.is_structural_zero());
                        let t = torsion(conn, &fx, &gy)?;
                        overlap_residual =
                            overlap_residual.max(t.max_abs_on(plan).map_err(Error::Eval)?);
                    }
                }
            }
            residuals.insert((k, l), worst);
        }
    }
    let one_vector_residual = residuals.get(&(1, 1)).copied().unwrap_or(0.0);
    let tol = plan.abs_tol();
    let torsion_free = residuals.values().all(|&r| r <= tol);
    let almost_torsion_free = one_vector_residual <= tol && overlap_residual <= tol;
    Ok(TorsionReport {
        residuals,
        one_vector_residual,
        overlap_residual,
        torsion_free,
        almost_torsion_free,
    })
}
