//! Named verification suites. Each suite evaluates a family of identities
//! on the spec's objects plus seeded random fields and returns one check
//! per identity with the max residual observed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hiconn_core::bilinear::{
    classify_eta, closed_identity_check, construct_parallel, e_field, is_parallel,
};
use hiconn_core::connection::{
    cov_form, higher_cov, symmetrize_twist, torsion, torsion_report, AffineConnection,
    HigherConnection,
};
use hiconn_core::exterior::{
    interior_fn, interior_form, lie, snb, DifferentialForm, MultiVectorField,
};
use hiconn_core::random::{random_form, random_mvf, random_polynomial};
use hiconn_core::{Error, MultiIndex, SamplePlan, ScalarField};

use crate::report::Check;
use crate::spec_model::Context;

type Result<T> = std::result::Result<T, Error>;

fn sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn max_deg(ctx: &Context) -> usize {
    ctx.chart.dim().min(3)
}

fn scalar_residual(f: &ScalarField, g: &ScalarField, plan: &SamplePlan) -> Result<f64> {
    hiconn_core::max_abs_on(&(f - g), plan).map_err(Error::Eval)
}

/// Max-residual accumulator for one check.
struct Acc {
    worst: f64,
}

impl Acc {
    fn new() -> Self {
        Acc { worst: 0.0 }
    }
    fn push(&mut self, r: f64) {
        self.worst = self.worst.max(r);
    }
    fn check(self, id: &str, label: &str, tol: f64) -> Check {
        Check::from_residual(id, label, self.worst, tol)
    }
}

/// Add values whose degrees agree up to structural zeros.
fn add_forms(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm {
    if a.is_structural_zero() && a.degree() != b.degree() {
        return b;
    }
    if b.is_structural_zero() && a.degree() != b.degree() {
        return a;
    }
    a.add(&b)
}

pub fn snb_suite(ctx: &Context) -> Result<Vec<Check>> {
    let c = &ctx.chart;
    let plan = &ctx.plan;
    let tol = plan.abs_tol();
    let top = max_deg(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x534e42);
    let mut checks = Vec::new();

    let mut anti = Acc::new();
    let mut named: Vec<&MultiVectorField> = ctx.mvfs.values().collect();
    for _ in 0..15 {
        let p = rng.random_range(0..=top);
        let q = rng.random_range(0..=top);
        let a = random_mvf(c, p, 2, &mut rng);
        let b = random_mvf(c, q, 2, &mut rng);
        let s = -sign((p as i64 - 1) * (q as i64 - 1));
        let diff = snb(&a, &b)?.add_scaled(&snb(&b, &a)?, -s);
        anti.push(diff.max_abs_on(plan).map_err(Error::Eval)?);
    }
    // Named fields participate pairwise.
    for a in &named {
        for b in &named {
            let s = -sign((a.degree() as i64 - 1) * (b.degree() as i64 - 1));
            let diff = snb(a, b)?.add_scaled(&snb(b, a)?, -s);
            anti.push(diff.max_abs_on(plan).map_err(Error::Eval)?);
        }
    }
    checks.push(anti.check("snb.antisymmetry", "graded-antisymmetry", tol));

    let mut jacobi = Acc::new();
    for _ in 0..12 {
        let p = rng.random_range(0..=top.min(2));
        let q = rng.random_range(1..=top.min(2));
        let r = rng.random_range(1..=top.min(2));
        let a = random_mvf(c, p, 2, &mut rng);
        let b = random_mvf(c, q, 2, &mut rng);
        let d = random_mvf(c, r, 2, &mut rng);
        let (pi, qi, ri) = (p as i64, q as i64, r as i64);
        let total = snb(&a, &snb(&b, &d)?)?
            .scale(sign((pi - 1) * (ri - 1)))
            .add(&snb(&b, &snb(&d, &a)?)?.scale(sign((qi - 1) * (pi - 1))))
            .add(&snb(&d, &snb(&a, &b)?)?.scale(sign((ri - 1) * (qi - 1))));
        jacobi.push(total.max_abs_on(plan).map_err(Error::Eval)?);
    }
    checks.push(jacobi.check("snb.jacobi", "graded-jacobi", tol));

    let mut leibniz = Acc::new();
    for _ in 0..14 {
        let p = rng.random_range(1..=top.min(2));
        let q = rng.random_range(0..=1usize);
        let r = rng.random_range(0..=1usize);
        let a = random_mvf(c, p, 2, &mut rng);
        let b = random_mvf(c, q, 2, &mut rng);
        let d = random_mvf(c, r, 2, &mut rng);
        let lhs = snb(&a, &b.wedge(&d)?)?;
        let rhs = snb(&a, &b)?.wedge(&d)?.add(
            &b.wedge(&snb(&a, &d)?)?
                .scale(sign((p as i64 - 1) * q as i64)),
        );
        leibniz.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);
    }
    checks.push(leibniz.check("snb.leibniz", "wedge-derivation", tol));

    let mut bracket_fn = Acc::new();
    for _ in 0..14 {
        let k = rng.random_range(0..=top);
        let x = random_mvf(c, k, 2, &mut rng);
        let f = random_polynomial(c, 2, &mut rng);
        let lhs = snb(&x, &MultiVectorField::from_scalar(f.clone()))?;
        let rhs = interior_fn(&f, &x).scale(sign(k as i64 - 1));
        bracket_fn.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);
    }
    for a in named.drain(..) {
        let f = random_polynomial(c, 2, &mut rng);
        let lhs = snb(a, &MultiVectorField::from_scalar(f.clone()))?;
        let rhs = interior_fn(&f, a).scale(sign(a.degree() as i64 - 1));
        bracket_fn.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);
    }
    checks.push(bracket_fn.check("snb.bracket_function", "bracket-vs-interior-product", tol));

    // One-vector brackets against the coordinate commutator formula.
    let mut one_vec = Acc::new();
    for _ in 0..8 {
        let u = random_mvf(c, 1, 2, &mut rng);
        let v = random_mvf(c, 1, 2, &mut rng);
        let got = snb(&u, &v)?;
        let mut expect = MultiVectorField::zero(c, 1);
        for b in 0..c.dim() {
            let vb = v.coefficient(&MultiIndex::single(b));
            let ub = u.coefficient(&MultiIndex::single(b));
            let mut acc = ScalarField::zero(c);
            for a in 0..c.dim() {
                let ua = u.coefficient(&MultiIndex::single(a));
                let va = v.coefficient(&MultiIndex::single(a));
                acc = &acc + &(&(&ua * &vb.partial(a)) - &(&va * &ub.partial(a)));
            }
            expect.set_term(MultiIndex::single(b), acc)?;
        }
        one_vec.push(got.residual_on(&expect, plan).map_err(Error::Eval)?);
    }
    checks.push(one_vec.check("snb.one_vector", "one-vector-commutator", tol));

    Ok(checks)
}

pub fn axioms_suite(ctx: &Context) -> Result<Vec<Check>> {
    let c = &ctx.chart;
    let plan = &ctx.plan;
    let tol = plan.abs_tol();
    let top = max_deg(ctx);
    let conn = ctx.connection();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x4158);
    let mut linearity = Acc::new();
    let mut additivity = Acc::new();
    let mut fn_action = Acc::new();
    let mut leibniz = Acc::new();
    let mut fn_direction = Acc::new();
    let mut interior_leibniz = Acc::new();
    for _ in 0..8 {
        let k = rng.random_range(1..=top.min(2));
        let l = rng.random_range(1..=top.min(2));
        let x = random_mvf(c, k, 1, &mut rng);
        let x2 = random_mvf(c, k, 1, &mut rng);
        let y = random_mvf(c, l, 1, &mut rng);
        let y2 = random_mvf(c, l, 1, &mut rng);
        let f = random_polynomial(c, 2, &mut rng);

        let lhs = higher_cov(&conn, &x.scale_field(&f).add(&x2), &y)?;
        let rhs = higher_cov(&conn, &x, &y)?
            .scale_field(&f)
            .add(&higher_cov(&conn, &x2, &y)?);
        linearity.push(lhs.residual_on(&rhs, plan).map_err(Error::Eval)?);

        let lhs = higher_cov(&conn, &x, &y.add(&y2))?;
        let rhs = higher_cov(&conn, &x, &y)?.add(&higher_cov(&conn, &x, &y2)?);
        additivity.push(lhs.residual_on(&rhs, plan).map_err(Error::Eval)?);

        let lhs = higher_cov(&conn, &x, &MultiVectorField::from_scalar(f.clone()))?;
        let rhs = snb(&x, &MultiVectorField::from_scalar(f.clone()))?;
        fn_action.push(lhs.residual_on(&rhs, plan).map_err(Error::Eval)?);

        let lhs = higher_cov(&conn, &x, &y.scale_field(&f))?;
        let bracket = snb(&x, &MultiVectorField::from_scalar(f.clone()))?;
        let rhs = bracket
            .wedge(&y)?
            .add(&higher_cov(&conn, &x, &y)?.scale_field(&f));
        leibniz.push(lhs.residual_on(&rhs, plan).map_err(Error::Eval)?);

        let zero = higher_cov(&conn, &MultiVectorField::from_scalar(f.clone()), &y)?;
        fn_direction.push(zero.max_abs_on(plan).map_err(Error::Eval)?);

        let rhs2 = interior_fn(&f, &x)
            .scale(sign(k as i64 - 1))
            .wedge(&y)?
            .add(&higher_cov(&conn, &x, &y)?.scale_field(&f));
        interior_leibniz.push(lhs.residual_on(&rhs2, plan).map_err(Error::Eval)?);
    }
    let mut checks = vec![
        linearity.check(
            "axioms.linearity_direction",
            "function-linear-direction",
            tol,
        ),
        additivity.check("axioms.additivity_argument", "additive-argument", tol),
        fn_action.check("axioms.function_action", "function-action-is-bracket", tol),
        leibniz.check("axioms.leibniz", "leibniz-rule", tol),
        fn_direction.check(
            "axioms.function_direction",
            "function-direction-vanishes",
            tol,
        ),
        interior_leibniz.check(
            "axioms.interior_leibniz",
            "leibniz-via-interior-product",
            tol,
        ),
    ];

    // Classification round trip: probing the twist as the difference of the
    // connection and its induced part recovers the stored tensors exactly.
    let induced = HigherConnection::induced(conn.base().clone());
    let n = c.dim();
    let mut round = Acc::new();
    let mut probe11 = Acc::new();
    for k in 1..=n {
        for l in 1..=n {
            if k + l - 1 > n {
                continue;
            }
            for i_idx in MultiIndex::enumerate(n, k) {
                for j_idx in MultiIndex::enumerate(n, l) {
                    let x = MultiVectorField::basis(c, i_idx);
                    let y = MultiVectorField::basis(c, j_idx);
                    let probed = higher_cov(&conn, &x, &y)?.sub(&higher_cov(&induced, &x, &y)?);
                    let stored = conn.twist().apply(&x, &y)?;
                    round.push(probed.residual_on(&stored, plan).map_err(Error::Eval)?);
                    if k == 1 && l == 1 {
                        probe11.push(probed.max_abs_on(plan).map_err(Error::Eval)?);
                    }
                }
            }
        }
    }
    checks.push(round.check("axioms.roundtrip", "twist-probe-roundtrip", 1e-10));
    checks.push(probe11.check("axioms.f11_probe", "degree-1-1-twist-vanishes", 1e-10));
    Ok(checks)
}

pub fn torsion_suite(ctx: &Context) -> Result<Vec<Check>> {
    let c = &ctx.chart;
    let plan = &ctx.plan;
    let tol = plan.abs_tol();
    let top = max_deg(ctx);
    let conn = ctx.connection();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x544f52);
    let mut checks = Vec::new();

    let mut anti = Acc::new();
    let mut tensorial = Acc::new();
    for _ in 0..8 {
        let k = rng.random_range(1..=top.min(2));
        let l = rng.random_range(1..=top.min(2));
        let x = random_mvf(c, k, 1, &mut rng);
        let y = random_mvf(c, l, 1, &mut rng);
        let f = random_polynomial(c, 2, &mut rng);
        let s = sign((k as i64 - 1) * (l as i64 - 1));
        let txy = torsion(&conn, &x, &y)?;
        let tyx = torsion(&conn, &y, &x)?;
        anti.push(
            txy.add_scaled(&tyx, s)
                .max_abs_on(plan)
                .map_err(Error::Eval)?,
        );
        let tf = torsion(&conn, &x.scale_field(&f), &y)?;
        tensorial.push(
            tf.residual_on(&txy.scale_field(&f), plan)
                .map_err(Error::Eval)?,
        );
    }
    checks.push(anti.check("torsion.antisymmetry", "graded-antisymmetry", tol));
    checks.push(tensorial.check("torsion.tensoriality", "function-linear", tol));

    // Characterization: torsion vanishes exactly when the base is
    // symmetric and the twist is graded symmetric.
    let scan = torsion_report(&conn, plan, ctx.seed ^ 0x5343)?;
    let base_sym = conn.base().symmetry_residual(plan)?;
    let twist_sym = twist_symmetry_residual(&conn, plan)?;
    let expected_free = base_sym <= tol && twist_sym <= tol;
    checks.push(Check::from_flag(
        "torsion.characterization",
        "vanishing-iff-symmetric-data",
        scan.torsion_free == expected_free,
    ));
    checks.push(Check::from_residual(
        "torsion.torsion_free",
        "vanishing-torsion",
        scan.max_residual(),
        tol,
    ));

    // With a symmetric base, symmetrizing the twist kills the torsion.
    if base_sym <= tol {
        let fixed = HigherConnection::new(conn.base().clone(), symmetrize_twist(conn.twist()))?;
        let fixed_scan = torsion_report(&fixed, plan, ctx.seed ^ 0x5344)?;
        checks.push(Check::from_residual(
            "torsion.symmetrized",
            "symmetrized-twist-is-torsion-free",
            fixed_scan.max_residual(),
            tol,
        ));
    }
    Ok(checks)
}

/// Max residual of `F^{k,l}(∂_I, ∂_J) - (-1)^{(k-1)(l-1)} F^{l,k}(∂_J, ∂_I)`.
fn twist_symmetry_residual(conn: &HigherConnection, plan: &SamplePlan) -> Result<f64> {
    let c = conn.chart();
    let n = c.dim();
    let mut worst = 0.0f64;
    for k in 1..=n {
        for l in 1..=n {
            if k + l - 1 > n {
                continue;
            }
            let s = sign((k as i64 - 1) * (l as i64 - 1));
            for i_idx in MultiIndex::enumerate(n, k) {
                for j_idx in MultiIndex::enumerate(n, l) {
                    let x = MultiVectorField::basis(c, i_idx);
                    let y = MultiVectorField::basis(c, j_idx);
                    let a = conn.twist().apply(&x, &y)?;
                    let b = conn.twist().apply(&y, &x)?;
                    worst = worst.max(a.add_scaled(&b, -s).max_abs_on(plan).map_err(Error::Eval)?);
                }
            }
        }
    }
    Ok(worst)
}

pub fn forms_suite(ctx: &Context) -> Result<Vec<Check>> {
    let c = &ctx.chart;
    let plan = &ctx.plan;
    let tol = plan.abs_tol();
    let n = c.dim();
    let top = max_deg(ctx);
    let conn = ctx.connection();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x464f52);
    let mut checks = Vec::new();

    let mut d2 = Acc::new();
    for form in ctx.forms.values() {
        d2.push(form.d().d().max_abs_on(plan).map_err(Error::Eval)?);
    }
    for _ in 0..6 {
        let m = rng.random_range(0..n.min(2));
        d2.push(
            random_form(c, m, 2, &mut rng)
                .d()
                .d()
                .max_abs_on(plan)
                .map_err(Error::Eval)?,
        );
    }
    checks.push(d2.check(
        "forms.d_squared",
        "exterior-derivative-squares-to-zero",
        tol,
    ));

    let mut lie_d = Acc::new();
    let mut lie_int = Acc::new();
    let mut lie_bracket = Acc::new();
    let mut lie_wedge = Acc::new();
    let mut int_comp = Acc::new();
    for _ in 0..6 {
        let k = rng.random_range(1..=top.min(2));
        let l = rng.random_range(1..=top.min(2));
        let m = rng.random_range(1..=n.min(3));
        let x = random_mvf(c, k, 1, &mut rng);
        let y = random_mvf(c, l, 1, &mut rng);
        let om = random_form(c, m, 1, &mut rng);
        let (ki, li) = (k as i64, l as i64);

        lie_d.push(
            lie(&x, &om)?
                .d()
                .sub(&lie(&x, &om.d())?.scale(sign(ki - 1)))
                .max_abs_on(plan)
                .map_err(Error::Eval)?,
        );

        let bracket = snb(&x, &y)?;
        let lhs = interior_form(&bracket, &om)?;
        let rhs = add_forms(
            lie(&x, &interior_form(&y, &om)?)?.scale(sign((ki - 1) * li)),
            interior_form(&y, &lie(&x, &om)?)?.neg(),
        );
        lie_int.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);

        if bracket.degree() >= 1 {
            let lhs = lie(&bracket, &om)?;
            let rhs = add_forms(
                lie(&x, &lie(&y, &om)?)?.scale(sign((ki - 1) * (li - 1))),
                lie(&y, &lie(&x, &om)?)?.neg(),
            );
            lie_bracket.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);
        }

        let lhs = lie(&x.wedge(&y)?, &om)?;
        let rhs = add_forms(
            interior_form(&y, &lie(&x, &om)?)?.scale(sign(li)),
            lie(&y, &interior_form(&x, &om)?)?,
        );
        lie_wedge.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);

        if k + l <= m {
            let via_wedge = interior_form(&x.wedge(&y)?, &om)?;
            let composed = interior_form(&y, &interior_form(&x, &om)?)?;
            int_comp.push(
                via_wedge
                    .sub(&composed)
                    .max_abs_on(plan)
                    .map_err(Error::Eval)?,
            );
            let flipped = interior_form(&x, &interior_form(&y, &om)?)?;
            int_comp.push(
                composed
                    .add_scaled(&flipped, -sign(ki * li))
                    .max_abs_on(plan)
                    .map_err(Error::Eval)?,
            );
        }
    }
    checks.push(lie_d.check("forms.lie_d_commutation", "lie-commutes-with-d", tol));
    checks.push(lie_int.check("forms.lie_interior_bracket", "interior-of-bracket", tol));
    checks.push(lie_bracket.check("forms.lie_bracket_composition", "lie-of-bracket", tol));
    checks.push(lie_wedge.check("forms.lie_wedge_direction", "lie-along-wedge", tol));
    checks.push(int_comp.check(
        "forms.interior_composition",
        "interior-products-compose",
        tol,
    ));

    let mut intfn_product = Acc::new();
    let mut intfn_wedge = Acc::new();
    let mut bracket_scaled = Acc::new();
    let mut lie_module = Acc::new();
    for _ in 0..6 {
        let k = rng.random_range(1..=top.min(2));
        let l = rng.random_range(1..=top.min(2));
        let x = random_mvf(c, k, 1, &mut rng);
        let y = random_mvf(c, l, 1, &mut rng);
        let f = random_polynomial(c, 2, &mut rng);
        let g = random_polynomial(c, 2, &mut rng);

        let product = interior_fn(&(&f * &g), &x);
        let split = interior_fn(&f, &x)
            .scale_field(&g)
            .add(&interior_fn(&g, &x).scale_field(&f));
        intfn_product.push(product.sub(&split).max_abs_on(plan).map_err(Error::Eval)?);

        let lhs = interior_fn(&f, &x.wedge(&y)?);
        let rhs = interior_fn(&f, &x)
            .wedge(&y)?
            .add(&x.wedge(&interior_fn(&f, &y))?.scale(sign(k as i64)));
        intfn_wedge.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);

        let bl = snb(&x.scale_field(&f), &y)?;
        let br = snb(&x, &y)?
            .scale_field(&f)
            .sub(&x.wedge(&interior_fn(&f, &y))?);
        bracket_scaled.push(bl.sub(&br).max_abs_on(plan).map_err(Error::Eval)?);

        let m = rng.random_range(k..=n.min(3));
        let om = random_form(c, m, 1, &mut rng);
        let lhs = lie(&x, &om.scale_field(&f))?;
        let bracket = snb(&x, &MultiVectorField::from_scalar(f.clone()))?;
        let rhs = add_forms(lie(&x, &om)?.scale_field(&f), interior_form(&bracket, &om)?);
        lie_module.push(lhs.sub(&rhs).max_abs_on(plan).map_err(Error::Eval)?);

        let lhs2 = lie(&x.scale_field(&f), &om)?;
        let df = DifferentialForm::from_scalar(f.clone()).d();
        let rhs2 = add_forms(
            df.wedge(&interior_form(&x, &om)?)?,
            lie(&x, &om)?.scale_field(&f),
        );
        lie_module.push(lhs2.sub(&rhs2).max_abs_on(plan).map_err(Error::Eval)?);
    }
    checks.push(intfn_product.check("forms.intfn_product", "interior-product-of-a-product", tol));
    checks.push(intfn_wedge.check("forms.intfn_wedge", "interior-product-over-wedge", tol));
    checks.push(bracket_scaled.check("forms.bracket_scaled", "bracket-of-scaled-field", tol));
    checks.push(lie_module.check("forms.lie_module", "lie-module-rules", tol));

    // Covariant derivative of forms, against the spec connection.
    let mut covform_direct = Acc::new();
    let mut covform_tensorial = Acc::new();
    let mut covform_fx = Acc::new();
    let mut covform_fomega = Acc::new();
    let mut covform_scalar = Acc::new();
    for _ in 0..5 {
        let k = rng.random_range(1..=top.min(2));
        let l = rng.random_range(k..=n.min(3));
        let x = random_mvf(c, k, 1, &mut rng);
        let om = random_form(c, l, 1, &mut rng);
        let f = random_polynomial(c, 2, &mut rng);
        let target = l - k + 1;
        let got = cov_form(&conn, &x, &om)?;

        let y = random_mvf(c, target, 1, &mut rng);
        let (ki, li) = (k as i64, l as i64);
        let direct = &lie(&x, &interior_form(&y, &om)?)?
            .scalar_coefficient()
            .scale(sign((ki - 1) * (li - 1)))
            - &om.pair(&higher_cov(&conn, &x, &y)?)?;
        covform_direct.push(scalar_residual(&got.pair(&y)?, &direct, plan)?);

        let scaled = &lie(&x, &interior_form(&y.scale_field(&f), &om)?)?
            .scalar_coefficient()
            .scale(sign((ki - 1) * (li - 1)))
            - &om.pair(&higher_cov(&conn, &x, &y.scale_field(&f))?)?;
        covform_tensorial.push(scalar_residual(&scaled, &(&f * &direct), plan)?);

        let lhs = cov_form(&conn, &x.scale_field(&f), &om)?;
        covform_fx.push(
            lhs.residual_on(&got.scale_field(&f), plan)
                .map_err(Error::Eval)?,
        );

        let lhs2 = cov_form(&conn, &x, &om.scale_field(&f))?;
        let bracket = snb(&x, &MultiVectorField::from_scalar(f.clone()))?;
        let rhs2 = add_forms(got.scale_field(&f), interior_form(&bracket, &om)?);
        covform_fomega.push(lhs2.residual_on(&rhs2, plan).map_err(Error::Eval)?);

        let low = random_form(c, k - 1, 2, &mut rng);
        let scalar_target = cov_form(&conn, &x, &low)?;
        covform_scalar.push(
            scalar_target
                .residual_on(&lie(&x, &low)?, plan)
                .map_err(Error::Eval)?,
        );
    }
    checks.push(covform_direct.check(
        "forms.covform_functional",
        "covariant-derivative-matches-functional",
        tol,
    ));
    checks.push(covform_tensorial.check("forms.covform_tensorial", "functional-is-tensorial", tol));
    checks.push(covform_fx.check("forms.covform_direction_scaling", "direction-scaling", tol));
    checks.push(covform_fomega.check("forms.covform_argument_scaling", "argument-scaling", tol));
    checks.push(covform_scalar.check("forms.covform_scalar_target", "scalar-target-is-lie", tol));

    // Interior-product compatibility for an upper-induced connection and the
    // wedge-direction identity for a torsion-free induced one. Both use the
    // induced connection of the spec base when it is symmetric, otherwise
    // the flat connection.
    let base_sym = conn.base().symmetry_residual(plan)?;
    let base = if base_sym <= tol {
        conn.base().clone()
    } else {
        AffineConnection::flat(c)
    };
    let induced = HigherConnection::induced(base);
    let mut covform_interior = Acc::new();
    let mut covform_wedge = Acc::new();
    for _ in 0..4 {
        let k = rng.random_range(1..=top.min(2));
        let j = rng.random_range(1..=top.min(2));
        let l = rng.random_range((k + j).min(n)..=n);
        let x = random_mvf(c, k, 1, &mut rng);
        let w = random_mvf(c, j, 1, &mut rng);
        let om = random_form(c, l, 1, &mut rng);
        let lhs = cov_form(&induced, &x, &interior_form(&w, &om)?)?;
        let rhs = add_forms(
            interior_form(&w, &cov_form(&induced, &x, &om)?)?,
            interior_form(&higher_cov(&induced, &x, &w)?, &om)?,
        )
        .scale(sign(j as i64 * (k as i64 - 1)));
        if lhs.degree() == rhs.degree() || lhs.is_structural_zero() || rhs.is_structural_zero() {
            let r = if lhs.degree() == rhs.degree() {
                lhs.residual_on(&rhs, plan).map_err(Error::Eval)?
            } else {
                lhs.max_abs_on(plan)
                    .map_err(Error::Eval)?
                    .max(rhs.max_abs_on(plan).map_err(Error::Eval)?)
            };
            covform_interior.push(r);
        }

        let y = random_mvf(c, j, 1, &mut rng);
        let lhs2 = cov_form(&induced, &x.wedge(&y)?, &om)?;
        let t1 = interior_form(&y, &cov_form(&induced, &x, &om)?)?.scale(sign(j as i64));
        let t2 = interior_form(&x, &cov_form(&induced, &y, &om)?)?
            .scale(sign(k as i64 * (j as i64 - 1)));
        let rhs2 = add_forms(t1, t2);
        let r2 = if lhs2.degree() == rhs2.degree() {
            lhs2.residual_on(&rhs2, plan).map_err(Error::Eval)?
        } else {
            lhs2.max_abs_on(plan)
                .map_err(Error::Eval)?
                .max(rhs2.max_abs_on(plan).map_err(Error::Eval)?)
        };
        covform_wedge.push(r2);
    }
    checks.push(covform_interior.check(
        "forms.covform_interior",
        "interior-product-compatibility",
        tol,
    ));
    checks.push(covform_wedge.check(
        "forms.covform_wedge_direction",
        "wedge-direction-splitting",
        tol,
    ));

    Ok(checks)
}

pub fn eta_suite(ctx: &Context) -> Result<Vec<Check>> {
    let eta = ctx
        .eta
        .as_ref()
        .ok_or_else(|| Error::Invalid("suite `eta` needs an [eta] section in the spec".into()))?;
    let c = &ctx.chart;
    let plan = &ctx.plan;
    let tol = plan.abs_tol();
    let n = c.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x455441);
    let mut checks = Vec::new();

    let mut assoc = Acc::new();
    let mut symm = Acc::new();
    for _ in 0..8 {
        let k = rng.random_range(0..=n.min(2));
        let l = rng.random_range(0..=n.min(2));
        let m = rng.random_range(0..=1usize);
        let x = random_mvf(c, k, 2, &mut rng);
        let y = random_mvf(c, l, 2, &mut rng);
        let z = random_mvf(c, m, 2, &mut rng);
        let lhs = eta.eval(&x.wedge(&y)?, &z)?;
        let rhs = eta.eval(&x, &y.wedge(&z)?)?;
        assoc.push(scalar_residual(&lhs, &rhs, plan)?);
        let sl = eta.eval(&x, &y)?;
        let sr = eta.eval(&y, &x)?.scale(sign((k * l) as i64));
        symm.push(scalar_residual(&sl, &sr, plan)?);
    }
    checks.push(assoc.check("eta.associativity", "wedge-associativity", tol));
    checks.push(symm.check("eta.graded_symmetry", "graded-symmetry", tol));

    // Probing η(∂_I, 1) recovers the coefficients of each form.
    let unit = MultiVectorField::unit(c);
    let mut round = Acc::new();
    for t in 1..=n {
        for i_idx in MultiIndex::enumerate(n, t) {
            let probe = eta.eval(&MultiVectorField::basis(c, i_idx), &unit)?;
            round.push(scalar_residual(
                &probe,
                &eta.form(t).coefficient(&i_idx),
                plan,
            )?);
        }
    }
    checks.push(round.check("eta.round_trip", "form-collection-roundtrip", tol));

    // Closedness identity, only when the collection is closed on the plan.
    let all_closed = (0..=n)
        .map(|t| eta.form(t).d().max_abs_on(plan))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(Error::Eval)?
        .into_iter()
        .all(|r| r <= tol);
    if all_closed {
        let count = n.min(3);
        let xs: Vec<MultiVectorField> = (0..count).map(|_| random_mvf(c, 1, 2, &mut rng)).collect();
        let rep = closed_identity_check(eta, &xs, plan)?;
        checks.push(Check::from_residual(
            "eta.closedness",
            "closed-collection-identity",
            rep.identity_residual,
            tol,
        ));
        checks.push(Check::from_residual(
            "eta.unit_constancy",
            "unit-pairing-constant",
            rep.unit_residual,
            tol,
        ));
    }

    // Nondegeneracy flag is consistent across the plan with the top form.
    let mut consistent = true;
    for p in plan.points() {
        let top = eta.form(n);
        let full = MultiIndex::enumerate(n, n)[0];
        let direct = top.coefficient(&full).eval(p).map_err(Error::Eval)?.abs()
            > hiconn_core::bilinear::VANISHING_TOL;
        let via_op = hiconn_core::bilinear::nondegenerate_at(eta, p).map_err(Error::Eval)?;
        consistent &= direct == via_op;
    }
    checks.push(Check::from_flag(
        "eta.nondegeneracy_consistency",
        "top-form-test",
        consistent,
    ));

    if ctx.has_connection() {
        let conn = ctx.connection();
        let rep = is_parallel(&conn, eta, plan)?;
        checks.push(Check::from_residual(
            "eta.parallel",
            "covariant-derivative-vanishes",
            rep.max_residual,
            tol,
        ));
    }
    Ok(checks)
}

pub fn construct_parallel_suite(ctx: &Context) -> Result<Vec<Check>> {
    let eta = ctx.eta.as_ref().ok_or_else(|| {
        Error::Invalid("suite `construct-parallel` needs an [eta] section".into())
    })?;
    let metric = ctx.metric.as_ref().ok_or_else(|| {
        Error::Invalid("suite `construct-parallel` needs a [metric] section".into())
    })?;
    let plan = &ctx.plan;
    let tol = plan.abs_tol();
    let n = ctx.chart.dim();
    let mut checks = Vec::new();

    let conn = construct_parallel(eta, metric, ctx.base.clone(), plan)?;

    // Normalized fields pair to one on every nonzero degree.
    let classification = classify_eta(eta, plan)?;
    let mut normalization = Acc::new();
    for t in 1..=n {
        if classification.per_degree[t].zero_on_plan {
            continue;
        }
        let e_t = e_field(eta.form(t), metric, plan)?;
        let pairing = eta.form(t).pair(&e_t)?;
        normalization.push(scalar_residual(
            &pairing,
            &ScalarField::one(&ctx.chart),
            plan,
        )?);
    }
    checks.push(normalization.check("cp.normalization", "unit-pairing-of-normalized-fields", tol));

    let rep = is_parallel(&conn, eta, plan)?;
    checks.push(Check::from_residual(
        "cp.parallel",
        "constructed-connection-is-parallel",
        rep.max_residual,
        tol,
    ));

    let scan = torsion_report(&conn, plan, ctx.seed ^ 0x4350)?;
    checks.push(Check::from_residual(
        "cp.torsion_one_vector",
        "one-vector-torsion",
        scan.one_vector_residual,
        tol,
    ));
    checks.push(Check::from_residual(
        "cp.torsion_overlap",
        "vanishing-wedge-torsion",
        scan.overlap_residual,
        tol,
    ));

    let f11 = conn
        .twist()
        .blocks()
        .filter(|(&(k, l), _)| (k, l) == (1, 1))
        .map(|(_, block)| block.len())
        .sum::<usize>();
    checks.push(Check::from_flag(
        "cp.f11_zero",
        "degree-1-1-twist-absent",
        f11 == 0,
    ));
    Ok(checks)
}

/// Run a suite by name; `all` concatenates every suite whose inputs the
/// spec provides.
pub fn run_suite(name: &str, ctx: &Context) -> Result<Vec<Check>> {
    match name {
        "axioms" => axioms_suite(ctx),
        "snb" => snb_suite(ctx),
        "torsion" => torsion_suite(ctx),
        "forms" => forms_suite(ctx),
        "eta" => eta_suite(ctx),
        "construct-parallel" => construct_parallel_suite(ctx),
        "all" => {
            let mut checks = axioms_suite(ctx)?;
            checks.extend(snb_suite(ctx)?);
            checks.extend(torsion_suite(ctx)?);
            checks.extend(forms_suite(ctx)?);
            if ctx.eta.is_some() {
                checks.extend(eta_suite(ctx)?);
                if ctx.metric.is_some() {
                    checks.extend(construct_parallel_suite(ctx)?);
                }
            }
            Ok(checks)
        }
        other => Err(Error::Invalid(format!("unknown suite `{other}`"))),
    }
}
