//! Multivector fields and differential forms on a chart.
//!
//! Both are graded coefficient maps over strictly increasing multi-indices:
//! a k-vector field is `Σ_I X^I ∂_I`, an l-form is `Σ_I ω_I dx^I`, with
//! `dx^I(∂_J) = δ_IJ`. Every sign in the module flows through
//! [`MultiIndex::merge`]. Degree-0 values are carried under the empty
//! multi-index, so functions, fields, and forms share one code path.
//!
//! Operations that the calculus leaves undefined at negative degree (an
//! interior product `i_X ω` with `deg ω < deg X`, a bracket of two
//! functions) return the zero value, represented as a structural zero of
//! degree 0.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::chart::Chart;
use crate::error::{Error, EvalError, Result};
use crate::multi_index::{parity_sign, MultiIndex};
use crate::plan::{max_abs_on, SamplePlan};
use crate::scalar::ScalarField;

type CoeffMap = BTreeMap<MultiIndex, ScalarField>;

fn insert_add(map: &mut CoeffMap, idx: MultiIndex, f: ScalarField) {
    if f.is_structural_zero() {
        return;
    }
    match map.entry(idx) {
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
}

fn wedge_maps(a: &CoeffMap, b: &CoeffMap) -> CoeffMap {
    let mut out = CoeffMap::new();
    for (i, fa) in a {
        for (j, fb) in b {
            if let Some((sign, merged)) = i.merge(j) {
                insert_add(&mut out, merged, (fa * fb).scale(sign));
            }
        }
    }
    out
}

fn map_max_abs_on(map: &CoeffMap, plan: &SamplePlan) -> std::result::Result<f64, EvalError> {
    let mut m = 0.0f64;
    for f in map.values() {
        m = m.max(max_abs_on(f, plan)?);
    }
    Ok(m)
}

macro_rules! graded_value_impl {
    ($name:ident, $basis_doc:literal) => {
        impl $name {
            pub fn zero(chart: &Chart, degree: usize) -> Self {
                $name {
                    chart: chart.clone(),
                    degree,
                    coeffs: CoeffMap::new(),
                }
            }

            /// Degree-0 value holding a single scalar field.
            pub fn from_scalar(f: ScalarField) -> Self {
                let chart = f.chart().clone();
                let mut coeffs = CoeffMap::new();
                insert_add(&mut coeffs, MultiIndex::EMPTY, f);
                $name {
                    chart,
                    degree: 0,
                    coeffs,
                }
            }

            /// The degree-0 unit (constant 1).
            pub fn unit(chart: &Chart) -> Self {
                Self::from_scalar(ScalarField::one(chart))
            }

            #[doc = $basis_doc]
            pub fn basis(chart: &Chart, index: MultiIndex) -> Self {
                assert!(
                    index.min_dim() <= chart.dim(),
                    "multi-index {index} does not fit on a chart of dimension {}",
                    chart.dim()
                );
                let mut coeffs = CoeffMap::new();
                coeffs.insert(index, ScalarField::one(chart));
                $name {
                    chart: chart.clone(),
                    degree: index.degree(),
                    coeffs,
                }
            }

            pub fn from_coeffs(
                chart: &Chart,
                degree: usize,
                entries: impl IntoIterator<Item = (MultiIndex, ScalarField)>,
            ) -> Result<Self> {
                let mut out = Self::zero(chart, degree);
                for (idx, f) in entries {
                    out.set_term(idx, f)?;
                }
                Ok(out)
            }

            /// Add `f` at index `idx`, validating degree, range, and chart.
            pub fn set_term(&mut self, idx: MultiIndex, f: ScalarField) -> Result<()> {
                if idx.degree() != self.degree {
                    return Err(Error::Invalid(format!(
                        "index {idx} has degree {}, value has degree {}",
                        idx.degree(),
                        self.degree
                    )));
                }
                if idx.min_dim() > self.chart.dim() {
                    return Err(Error::Invalid(format!(
                        "index {idx} does not fit on a chart of dimension {}",
                        self.chart.dim()
                    )));
                }
                f.expect_chart(&self.chart)?;
                insert_add(&mut self.coeffs, idx, f);
                Ok(())
            }

            pub fn chart(&self) -> &Chart {
                &self.chart
            }

            pub fn degree(&self) -> usize {
                self.degree
            }

            pub fn coefficient(&self, idx: &MultiIndex) -> ScalarField {
                self.coeffs
                    .get(idx)
                    .cloned()
                    .unwrap_or_else(|| ScalarField::zero(&self.chart))
            }

            pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarField)> {
                self.coeffs.iter()
            }

            /// The scalar coefficient of a degree-0 value.
            pub fn scalar_coefficient(&self) -> ScalarField {
                assert_eq!(self.degree, 0, "scalar_coefficient requires degree 0");
                self.coefficient(&MultiIndex::EMPTY)
            }

            /// True when every stored coefficient tree is literally zero.
            pub fn is_structural_zero(&self) -> bool {
                self.coeffs.is_empty()
            }

            /// `self + c * other`. Degrees must agree unless one side is a
            /// structural zero, which acts as the neutral element at any
            /// degree.
            pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
                assert!(self.chart == other.chart, "values live on different charts");
                if other.is_structural_zero() {
                    return self.clone();
                }
                if self.is_structural_zero() {
                    return other.scale(c);
                }
                assert_eq!(self.degree, other.degree, "degree mismatch in addition");
                let mut out = self.clone();
                for (idx, f) in &other.coeffs {
                    insert_add(&mut out.coeffs, *idx, f.scale(c));
                }
                out
            }

            pub fn add(&self, other: &Self) -> Self {
                self.add_scaled(other, 1.0)
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.add_scaled(other, -1.0)
            }

            pub fn neg(&self) -> Self {
                self.scale(-1.0)
            }

            pub fn scale(&self, c: f64) -> Self {
                if c == 0.0 {
                    return Self::zero(&self.chart, self.degree);
                }
                let mut out = Self::zero(&self.chart, self.degree);
                for (idx, f) in &self.coeffs {
                    insert_add(&mut out.coeffs, *idx, f.scale(c));
                }
                out
            }

            pub fn scale_field(&self, g: &ScalarField) -> Self {
                let mut out = Self::zero(&self.chart, self.degree);
                for (idx, f) in &self.coeffs {
                    insert_add(&mut out.coeffs, *idx, f * g);
                }
                out
            }

            /// Exterior product; degrees add, and anything above the chart
            /// dimension is the zero value.
            pub fn wedge(&self, other: &Self) -> Result<Self> {
                self.chart.expect_same(&other.chart)?;
                let degree = self.degree + other.degree;
                if degree > self.chart.dim() {
                    return Ok(Self::zero(&self.chart, degree));
                }
                Ok($name {
                    chart: self.chart.clone(),
                    degree,
                    coeffs: wedge_maps(&self.coeffs, &other.coeffs),
                })
            }

            /// Max over plan points and coefficients of the absolute value.
            pub fn max_abs_on(&self, plan: &SamplePlan) -> std::result::Result<f64, EvalError> {
                map_max_abs_on(&self.coeffs, plan)
            }

            /// Max residual of `self - other` on the plan.
            pub fn residual_on(
                &self,
                other: &Self,
                plan: &SamplePlan,
            ) -> std::result::Result<f64, EvalError> {
                self.sub(other).max_abs_on(plan)
            }
        }
    };
}

/// A multivector field `Σ_I X^I ∂_I` of homogeneous degree.
#[derive(Debug, Clone)]
pub struct MultiVectorField {
    chart: Chart,
    degree: usize,
    coeffs: CoeffMap,
}

/// A differential form `Σ_I ω_I dx^I` of homogeneous degree.
#[derive(Debug, Clone)]
pub struct DifferentialForm {
    chart: Chart,
    degree: usize,
    coeffs: CoeffMap,
}

graded_value_impl!(MultiVectorField, "The coordinate multivector `∂_I`.");
graded_value_impl!(DifferentialForm, "The coordinate form `dx^I`.");

impl MultiVectorField {
    /// The coordinate vector field `∂_i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        Self::basis(chart, MultiIndex::single(i))
    }

    /// Apply a 1-vector field to a function: `Z f = Σ_i Z^i ∂_i f`.
    pub fn apply_to_function(&self, f: &ScalarField) -> ScalarField {
        assert_eq!(
            self.degree, 1,
            "only 1-vector fields act on functions as derivations"
        );
        let mut acc = ScalarField::zero(&self.chart);
        for (idx, c) in &self.coeffs {
            let i = idx.indices()[0];
            acc = &acc + &(c * &f.partial(i));
        }
        acc
    }
}

impl DifferentialForm {
    /// The coordinate 1-form `dx^i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        Self::basis(chart, MultiIndex::single(i))
    }

    /// The exterior derivative `dω = Σ_I Σ_j (∂_j ω_I) dx^j ∧ dx^I`.
    pub fn d(&self) -> DifferentialForm {
        let n = self.chart.dim();
        let mut out = DifferentialForm::zero(&self.chart, self.degree + 1);
        if self.degree + 1 > n {
            return out;
        }
        for (idx, c) in &self.coeffs {
            for j in 0..n {
                let dc = c.partial(j);
                if dc.is_structural_zero() {
                    continue;
                }
                if let Some((sign, merged)) = MultiIndex::single(j).merge(idx) {
                    insert_add(&mut out.coeffs, merged, dc.scale(sign));
                }
            }
        }
        out
    }

    /// Dual pairing `ω(X) = Σ_I ω_I X^I`. For degree 0 this is the product
    /// of the two scalar fields.
    pub fn pair(&self, x: &MultiVectorField) -> Result<ScalarField> {
        self.chart.expect_same(x.chart())?;
        if self.degree != x.degree() {
            return Err(Error::DegreeMismatch(self.degree, x.degree()));
        }
        let mut acc = ScalarField::zero(&self.chart);
        for (idx, c) in &self.coeffs {
            let xc = x.coefficient(idx);
            if !xc.is_structural_zero() {
                acc = &acc + &(c * &xc);
            }
        }
        Ok(acc)
    }
}

/// Interior product of a multivector field with a form:
/// `(i_X ω)(Y) = ω(X ∧ Y)`, the scalar `ω(X)` at equal degree, zero when
/// `deg ω < deg X`, and `i_f ω = f ω` for functions.
pub fn interior_form(x: &MultiVectorField, omega: &DifferentialForm) -> Result<DifferentialForm> {
    x.chart().expect_same(omega.chart())?;
    let chart = omega.chart();
    let (k, l) = (x.degree(), omega.degree());
    if k == 0 {
        return Ok(omega.scale_field(&x.scalar_coefficient()));
    }
    if l < k {
        return Ok(DifferentialForm::zero(chart, 0));
    }
    let mut out = DifferentialForm::zero(chart, l - k);
    for (iw, cw) in omega.coefficients() {
        for (ix, cx) in x.coefficients() {
            if !ix.is_subset_of(iw) {
                continue;
            }
            let rest = iw.difference(ix);
            let (sign, _) = ix.merge(&rest).expect("disjoint by construction");
            insert_add(&mut out.coeffs, rest, (cw * cx).scale(sign));
        }
    }
    Ok(out)
}

/// Interior product of a function with a multivector field:
/// `i_f X = Σ_I X^I Σ_r (-1)^{r+1} (∂_{i_r} f) ∂_{I \ i_r}` (1-based `r`),
/// and zero on degree-0 fields.
pub fn interior_fn(f: &ScalarField, x: &MultiVectorField) -> MultiVectorField {
    assert!(
        f.chart() == x.chart(),
        "interior_fn requires a common chart"
    );
    let chart = x.chart();
    let k = x.degree();
    if k == 0 {
        return MultiVectorField::zero(chart, 0);
    }
    let mut out = MultiVectorField::zero(chart, k - 1);
    for (idx, c) in x.coefficients() {
        for pos in 0..k {
            let (i_r, rest) = idx.remove_position(pos);
            let df = f.partial(i_r);
            if df.is_structural_zero() {
                continue;
            }
            insert_add(
                &mut out.coeffs,
                rest,
                (c * &df).scale(parity_sign(pos as i64)),
            );
        }
    }
    out
}

/// Lie derivative of a form along a multivector field of degree `k ≥ 1`:
/// `L_X ω = d i_X ω - (-1)^k i_X dω`, of degree `deg ω - k + 1`.
pub fn lie(x: &MultiVectorField, omega: &DifferentialForm) -> Result<DifferentialForm> {
    x.chart().expect_same(omega.chart())?;
    let k = x.degree();
    if k == 0 {
        return Err(Error::Degree(
            "Lie derivative requires a field of degree >= 1".into(),
        ));
    }
    let t1 = interior_form(x, omega)?.d();
    let t2 = interior_form(x, &omega.d())?;
    let sum = t1.add_scaled(&t2, -parity_sign(k as i64));
    let target = omega.degree() as i64 - k as i64 + 1;
    let nominal = target.max(0) as usize;
    if sum.is_structural_zero() && sum.degree() != nominal {
        return Ok(DifferentialForm::zero(omega.chart(), nominal));
    }
    Ok(sum)
}

/// One decomposable factor `c · ∂_i` of a basis term.
struct Factor {
    coeff: Option<ScalarField>,
    index: usize,
}

fn bracket_factors(chart: &Chart, a: &Factor, b: &Factor) -> MultiVectorField {
    // [c ∂_i, d ∂_j] = c (∂_i d) ∂_j - d (∂_j c) ∂_i
    let mut out = MultiVectorField::zero(chart, 1);
    if let Some(d) = &b.coeff {
        let dd = d.partial(a.index);
        let c_dd = match &a.coeff {
            Some(c) => c * &dd,
            None => dd,
        };
        insert_add(&mut out.coeffs, MultiIndex::single(b.index), c_dd);
    }
    if let Some(c) = &a.coeff {
        let dc = c.partial(b.index);
        let d_dc = match &b.coeff {
            Some(d) => d * &dc,
            None => dc,
        };
        insert_add(&mut out.coeffs, MultiIndex::single(a.index), -&d_dc);
    }
    out
}

/// Schouten-Nijenhuis bracket of a pair of basis terms `f ∂_I`, `g ∂_J`
/// with `deg I, deg J ≥ 1`. The coefficient is absorbed into the first
/// wedge factor and the decomposable formula
/// `Σ_{i,j} (-1)^{i+j} [X_i, Y_j] ∧ X[i] ∧ Y[j]` is applied directly.
fn snb_basis_terms(
    chart: &Chart,
    i_idx: &MultiIndex,
    f: &ScalarField,
    j_idx: &MultiIndex,
    g: &ScalarField,
) -> Result<MultiVectorField> {
    let k = i_idx.degree();
    let l = j_idx.degree();
    let i_list = i_idx.indices();
    let j_list = j_idx.indices();
    let factor = |list: &[usize], coeff: &ScalarField, pos: usize| Factor {
        coeff: if pos == 0 { Some(coeff.clone()) } else { None },
        index: list[pos],
    };
    // Omitting position 0 removes the coefficient along with the factor;
    // omitting any later position keeps it.
    let omitted = |idx: &MultiIndex, coeff: &ScalarField, pos: usize| -> MultiVectorField {
        let (_, rest) = idx.remove_position(pos);
        let base = MultiVectorField::basis(chart, rest);
        if pos == 0 {
            base
        } else {
            base.scale_field(coeff)
        }
    };
    let mut acc = MultiVectorField::zero(chart, k + l - 1);
    for a in 0..k {
        for b in 0..l {
            if a > 0 && b > 0 {
                continue; // both factors are constant coordinate fields
            }
            let br = bracket_factors(chart, &factor(&i_list, f, a), &factor(&j_list, g, b));
            if br.is_structural_zero() {
                continue;
            }
            let term = br
                .wedge(&omitted(i_idx, f, a))?
                .wedge(&omitted(j_idx, g, b))?;
            acc = acc.add_scaled(&term, parity_sign((a + b) as i64));
        }
    }
    Ok(acc)
}

/// Schouten-Nijenhuis bracket, of degree `k + l - 1`. Brackets with a
/// function reduce to interior products: `[X, f] = (-1)^{k-1} i_f X`,
/// `[f, Y] = -i_f Y`, and `[f, g] = 0`.
pub fn snb(x: &MultiVectorField, y: &MultiVectorField) -> Result<MultiVectorField> {
    x.chart().expect_same(y.chart())?;
    let chart = x.chart();
    let (k, l) = (x.degree(), y.degree());
    if k == 0 && l == 0 {
        return Ok(MultiVectorField::zero(chart, 0));
    }
    if k == 0 {
        return Ok(interior_fn(&x.scalar_coefficient(), y).neg());
    }
    if l == 0 {
        return Ok(interior_fn(&y.scalar_coefficient(), x).scale(parity_sign(k as i64 - 1)));
    }
    let mut acc = MultiVectorField::zero(chart, k + l - 1);
    for (i_idx, f) in x.coefficients() {
        for (j_idx, g) in y.coefficients() {
            acc = acc.add(&snb_basis_terms(chart, i_idx, f, j_idx, g)?);
        }
    }
    Ok(acc)
}

/// An inhomogeneous multivector field: one component per degree.
#[derive(Debug, Clone)]
pub struct GradedMVF {
    chart: Chart,
    components: BTreeMap<usize, MultiVectorField>,
}

impl GradedMVF {
    pub fn zero(chart: &Chart) -> Self {
        GradedMVF {
            chart: chart.clone(),
            components: BTreeMap::new(),
        }
    }

    pub fn from_component(x: MultiVectorField) -> Self {
        let mut g = GradedMVF::zero(x.chart());
        g.add_component(x);
        g
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Add a homogeneous component, merging with any existing one of the
    /// same degree. Structural zeros are dropped.
    pub fn add_component(&mut self, x: MultiVectorField) {
        assert!(
            self.chart == *x.chart(),
            "components live on different charts"
        );
        if x.is_structural_zero() {
            return;
        }
        assert!(
            x.degree() <= self.chart.dim(),
            "nonzero component of degree {} exceeds chart dimension {}",
            x.degree(),
            self.chart.dim()
        );
        match self.components.entry(x.degree()) {
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&x);
                if sum.is_structural_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            Entry::Vacant(v) => {
                v.insert(x);
            }
        }
    }

    pub fn component(&self, degree: usize) -> MultiVectorField {
        self.components
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| MultiVectorField::zero(&self.chart, degree))
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &MultiVectorField)> {
        self.components.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (_, x) in other.components() {
            out.add_component(x.clone());
        }
        out
    }

    pub fn is_structural_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_abs_on(&self, plan: &SamplePlan) -> std::result::Result<f64, EvalError> {
        let mut m = 0.0f64;
        for (_, x) in self.components() {
            m = m.max(x.max_abs_on(plan)?);
        }
        Ok(m)
    }
}
