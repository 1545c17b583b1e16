//! Bracket and derivative identities for multivector fields and forms:
//! graded antisymmetry, the graded Jacobi identity, the Leibniz rule,
//! bracket/interior-product compatibilities, and the Lie-derivative
//! composition laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hiconn_core::exterior::{
    interior_fn, interior_form, lie, snb, DifferentialForm, MultiVectorField,
};
use hiconn_core::multi_index::MultiIndex;
use hiconn_core::random::{random_form, random_mvf, random_polynomial};
use hiconn_core::{Chart, SamplePlan, ScalarField};

const TOL: f64 = 1e-8;

fn chart() -> Chart {
    Chart::standard(3).unwrap()
}

fn sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn assert_mvf_zero(v: &MultiVectorField, plan: &SamplePlan, what: &str) {
    let r = v.max_abs_on(plan).unwrap();
    assert!(r <= TOL, "{what}: residual {r}");
}

fn assert_form_zero(v: &DifferentialForm, plan: &SamplePlan, what: &str) {
    let r = v.max_abs_on(plan).unwrap();
    assert!(r <= TOL, "{what}: residual {r}");
}

#[test]
fn snb_graded_antisymmetry() {
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = rng.random_range(0..4usize);
        let q = rng.random_range(0..4usize);
        let a = random_mvf(&c, p, 2, &mut rng);
        let b = random_mvf(&c, q, 2, &mut rng);
        let ab = snb(&a, &b).unwrap();
        let ba = snb(&b, &a).unwrap();
        let s = -sign((p as i64 - 1) * (q as i64 - 1));
        let diff = ab.add_scaled(&ba, -s);
        assert_mvf_zero(&diff, &plan, &format!("antisymmetry at degrees ({p},{q})"));
    }
}

#[test]
fn snb_graded_jacobi() {
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..12 {
        let (p, q, r) = (
            rng.random_range(0..3usize),
            rng.random_range(1..3usize),
            rng.random_range(1..3usize),
        );
        let a = random_mvf(&c, p, 2, &mut rng);
        let b = random_mvf(&c, q, 2, &mut rng);
        let d = random_mvf(&c, r, 2, &mut rng);
        let (pi, qi, ri) = (p as i64, q as i64, r as i64);
        let t1 = snb(&a, &snb(&b, &d).unwrap())
            .unwrap()
            .scale(sign((pi - 1) * (ri - 1)));
        let t2 = snb(&b, &snb(&d, &a).unwrap())
            .unwrap()
            .scale(sign((qi - 1) * (pi - 1)));
        let t3 = snb(&d, &snb(&a, &b).unwrap())
            .unwrap()
            .scale(sign((ri - 1) * (qi - 1)));
        let total = t1.add(&t2).add(&t3);
        assert_mvf_zero(&total, &plan, &format!("Jacobi at degrees ({p},{q},{r})"));
    }
}

#[test]
fn snb_leibniz_over_wedge() {
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..16 {
        let p = rng.random_range(1..3usize);
        let q = rng.random_range(0..2usize);
        let r = rng.random_range(0..2usize);
        let a = random_mvf(&c, p, 2, &mut rng);
        let b = random_mvf(&c, q, 2, &mut rng);
        let d = random_mvf(&c, r, 2, &mut rng);
        let lhs = snb(&a, &b.wedge(&d).unwrap()).unwrap();
        let rhs = snb(&a, &b).unwrap().wedge(&d).unwrap().add(
            &b.wedge(&snb(&a, &d).unwrap())
                .unwrap()
                .scale(sign((p as i64 - 1) * q as i64)),
        );
        assert_mvf_zero(
            &lhs.sub(&rhs),
            &plan,
            &format!("Leibniz at degrees ({p},{q},{r})"),
        );
    }
}

#[test]
fn snb_with_function_is_interior_product() {
    // [X, f] = (-1)^{k-1} i_f X
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in 0..4usize {
        let x = random_mvf(&c, k, 2, &mut rng);
        let f = random_polynomial(&c, 2, &mut rng);
        let lhs = snb(&x, &MultiVectorField::from_scalar(f.clone())).unwrap();
        let rhs = interior_fn(&f, &x).scale(sign(k as i64 - 1));
        assert_mvf_zero(
            &lhs.sub(&rhs),
            &plan,
            &format!("bracket-function at degree {k}"),
        );
    }
}

#[test]
fn snb_on_one_vectors_is_the_lie_bracket() {
    // Against an independent coordinate formula for [U, V].
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let u = random_mvf(&c, 1, 2, &mut rng);
        let v = random_mvf(&c, 1, 2, &mut rng);
        let got = snb(&u, &v).unwrap();
        let mut expect = MultiVectorField::zero(&c, 1);
        for b in 0..3 {
            let vb = v.coefficient(&MultiIndex::single(b));
            let ub = u.coefficient(&MultiIndex::single(b));
            let mut acc = ScalarField::zero(&c);
            for a in 0..3 {
                let ua = u.coefficient(&MultiIndex::single(a));
                let va = v.coefficient(&MultiIndex::single(a));
                acc = &acc + &(&(&ua * &vb.partial(a)) - &(&va * &ub.partial(a)));
            }
            expect.set_term(MultiIndex::single(b), acc).unwrap();
        }
        assert_mvf_zero(&got.sub(&expect), &plan, "one-vector bracket");
    }
}

#[test]
fn interior_products_compose_and_commute() {
    // i_{X∧Y} = i_Y ∘ i_X and i_Y ∘ i_X = (-1)^{kl} i_X ∘ i_Y
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for (k, l) in [(1, 1), (1, 2), (2, 1)] {
        for m in (k + l)..4usize {
            let x = random_mvf(&c, k, 2, &mut rng);
            let y = random_mvf(&c, l, 2, &mut rng);
            let om = random_form(&c, m, 2, &mut rng);
            let via_wedge = interior_form(&x.wedge(&y).unwrap(), &om).unwrap();
            let composed = interior_form(&y, &interior_form(&x, &om).unwrap()).unwrap();
            assert_form_zero(
                &via_wedge.sub(&composed),
                &plan,
                &format!("composition at ({k},{l},{m})"),
            );
            let flipped = interior_form(&x, &interior_form(&y, &om).unwrap()).unwrap();
            let diff = composed.add_scaled(&flipped, -sign((k * l) as i64));
            assert_form_zero(
                &diff,
                &plan,
                &format!("graded commutation at ({k},{l},{m})"),
            );
        }
    }
}

#[test]
fn interior_fn_product_and_wedge_rules() {
    // i_{fg} X = g i_f X + f i_g X;
    // i_f (X ∧ Y) = (i_f X) ∧ Y + (-1)^k X ∧ (i_f Y);
    // [fX, Y] = f [X, Y] - X ∧ i_f Y.
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let k = rng.random_range(1..3usize);
        let l = rng.random_range(1..3usize);
        let x = random_mvf(&c, k, 2, &mut rng);
        let y = random_mvf(&c, l, 2, &mut rng);
        let f = random_polynomial(&c, 2, &mut rng);
        let g = random_polynomial(&c, 2, &mut rng);

        let product = interior_fn(&(&f * &g), &x);
        let split = interior_fn(&f, &x)
            .scale_field(&g)
            .add(&interior_fn(&g, &x).scale_field(&f));
        assert_mvf_zero(&product.sub(&split), &plan, "product rule");

        let lhs = interior_fn(&f, &x.wedge(&y).unwrap());
        let rhs = interior_fn(&f, &x)
            .wedge(&y)
            .unwrap()
            .add(&x.wedge(&interior_fn(&f, &y)).unwrap().scale(sign(k as i64)));
        assert_mvf_zero(&lhs.sub(&rhs), &plan, "wedge rule");

        let bl = snb(&x.scale_field(&f), &y).unwrap();
        let br = snb(&x, &y)
            .unwrap()
            .scale_field(&f)
            .sub(&x.wedge(&interior_fn(&f, &y)).unwrap());
        assert_mvf_zero(&bl.sub(&br), &plan, "bracket of a scaled field");
    }
}

#[test]
fn interior_of_one_form_wedge_expansion() {
    // For decomposable X = ∂_I and a 1-form α:
    // i_X(α ∧ ω) = Σ_j (-1)^{j+1} α(X_j) i_{X[j]} ω + (-1)^k α ∧ i_X ω.
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for i_list in [vec![0, 1], vec![0, 2], vec![0, 1, 2]] {
        let k = i_list.len();
        let idx = MultiIndex::new(&i_list).unwrap();
        let x = MultiVectorField::basis(&c, idx);
        let alpha = random_form(&c, 1, 2, &mut rng);
        let om = random_form(&c, k.min(2), 2, &mut rng);
        let lhs = interior_form(&x, &alpha.wedge(&om).unwrap()).unwrap();
        let mut rhs = interior_form(&x, &om)
            .unwrap()
            .wedge_front(&alpha)
            .scale(sign(k as i64));
        for (pos, &j) in i_list.iter().enumerate() {
            let alpha_xj = alpha.pair(&MultiVectorField::coordinate(&c, j)).unwrap();
            let (_, rest) = idx.remove_position(pos);
            let term = interior_form(&MultiVectorField::basis(&c, rest), &om)
                .unwrap()
                .scale_field(&alpha_xj)
                .scale(sign(pos as i64));
            rhs = rhs.add_degree_tolerant(&term);
        }
        assert_form_zero(
            &lhs.sub(&rhs),
            &plan,
            &format!("expansion for I = {i_list:?}"),
        );
    }
}

#[test]
fn lie_derivative_module_rules() {
    // L_X(fω) = f L_X ω + i_{[X,f]} ω  and  L_{fX} ω = df ∧ i_X ω + f L_X ω.
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10 {
        let k = rng.random_range(1..3usize);
        let m = rng.random_range(k..4usize);
        let x = random_mvf(&c, k, 2, &mut rng);
        let om = random_form(&c, m, 2, &mut rng);
        let f = random_polynomial(&c, 2, &mut rng);

        let lhs = lie(&x, &om.scale_field(&f)).unwrap();
        let bracket = snb(&x, &MultiVectorField::from_scalar(f.clone())).unwrap();
        let rhs = lie(&x, &om)
            .unwrap()
            .scale_field(&f)
            .add_degree_tolerant(&interior_form(&bracket, &om).unwrap());
        assert_form_zero(&lhs.sub(&rhs), &plan, "module rule in the form");

        let lhs2 = lie(&x.scale_field(&f), &om).unwrap();
        let df = DifferentialForm::from_scalar(f.clone()).d();
        let rhs2 = df
            .wedge(&interior_form(&x, &om).unwrap())
            .unwrap()
            .add_degree_tolerant(&lie(&x, &om).unwrap().scale_field(&f));
        assert_form_zero(&lhs2.sub(&rhs2), &plan, "module rule in the field");
    }
}

#[test]
fn lie_derivative_composition_laws() {
    // (i)   d L_X ω = (-1)^{k-1} L_X dω
    // (ii)  i_{[X,Y]} ω = (-1)^{(k-1)l} L_X i_Y ω - i_Y L_X ω
    // (iii) L_{[X,Y]} ω = (-1)^{(k-1)(l-1)} L_X L_Y ω - L_Y L_X ω
    // (iv)  L_{X∧Y} ω = (-1)^l i_Y L_X ω + L_Y i_X ω
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (k, l, m) in [
        (1, 1, 1),
        (1, 1, 2),
        (1, 2, 2),
        (2, 1, 2),
        (2, 2, 3),
        (1, 2, 3),
    ] {
        let x = random_mvf(&c, k, 2, &mut rng);
        let y = random_mvf(&c, l, 2, &mut rng);
        let om = random_form(&c, m, 2, &mut rng);
        let (ki, li) = (k as i64, l as i64);

        let d_l = lie(&x, &om).unwrap().d();
        let l_d = lie(&x, &om.d()).unwrap().scale(sign(ki - 1));
        assert_form_zero(&d_l.sub(&l_d), &plan, &format!("(i) at ({k},{l},{m})"));

        let bracket = snb(&x, &y).unwrap();
        let lhs2 = interior_form(&bracket, &om).unwrap();
        let rhs2 = lie(&x, &interior_form(&y, &om).unwrap())
            .unwrap()
            .scale(sign((ki - 1) * li))
            .add_degree_tolerant(&interior_form(&y, &lie(&x, &om).unwrap()).unwrap().neg());
        assert_form_zero(&lhs2.sub(&rhs2), &plan, &format!("(ii) at ({k},{l},{m})"));

        if bracket.degree() >= 1 {
            let lhs3 = lie(&bracket, &om).unwrap();
            let rhs3 = lie(&x, &lie(&y, &om).unwrap())
                .unwrap()
                .scale(sign((ki - 1) * (li - 1)))
                .add_degree_tolerant(&lie(&y, &lie(&x, &om).unwrap()).unwrap().neg());
            assert_form_zero(&lhs3.sub(&rhs3), &plan, &format!("(iii) at ({k},{l},{m})"));
        }

        let lhs4 = lie(&x.wedge(&y).unwrap(), &om).unwrap();
        let rhs4 = interior_form(&y, &lie(&x, &om).unwrap())
            .unwrap()
            .scale(sign(li))
            .add_degree_tolerant(&lie(&y, &interior_form(&x, &om).unwrap()).unwrap());
        assert_form_zero(&lhs4.sub(&rhs4), &plan, &format!("(iv) at ({k},{l},{m})"));
    }
}

#[test]
fn invariant_formulas_anchor_the_conventions() {
    // Independent textbook routes, written out coordinate by coordinate:
    //   dω(X, Y) = X(ω(Y)) - Y(ω(X)) - ω([X,Y])
    //   (L_X ω)(Y) = X(ω(Y)) - ω([X,Y])
    // for 1-vector fields X, Y and a 1-form ω, with the commutator
    // computed directly from partial derivatives.
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let commutator = |u: &MultiVectorField, v: &MultiVectorField| -> MultiVectorField {
        let mut out = MultiVectorField::zero(&c, 1);
        for b in 0..3 {
            let mut acc = ScalarField::zero(&c);
            for a in 0..3 {
                let ua = u.coefficient(&MultiIndex::single(a));
                let va = v.coefficient(&MultiIndex::single(a));
                let vb = v.coefficient(&MultiIndex::single(b));
                let ub = u.coefficient(&MultiIndex::single(b));
                acc = &acc + &(&(&ua * &vb.partial(a)) - &(&va * &ub.partial(a)));
            }
            out.set_term(MultiIndex::single(b), acc).unwrap();
        }
        out
    };
    for _ in 0..10 {
        let x = random_mvf(&c, 1, 2, &mut rng);
        let y = random_mvf(&c, 1, 2, &mut rng);
        let om = random_form(&c, 1, 2, &mut rng);
        let bracket = commutator(&x, &y);

        let d_om = om.d();
        let lhs_d = d_om.pair(&x.wedge(&y).unwrap()).unwrap();
        let rhs_d = &(&x.apply_to_function(&om.pair(&y).unwrap())
            - &y.apply_to_function(&om.pair(&x).unwrap()))
            - &om.pair(&bracket).unwrap();
        let r_d = hiconn_core::max_abs_on(&(&lhs_d - &rhs_d), &plan).unwrap();
        assert!(r_d <= TOL, "exterior-derivative invariant formula: {r_d}");

        let lhs_l = lie(&x, &om).unwrap().pair(&y).unwrap();
        let rhs_l = &x.apply_to_function(&om.pair(&y).unwrap()) - &om.pair(&bracket).unwrap();
        let r_l = hiconn_core::max_abs_on(&(&lhs_l - &rhs_l), &plan).unwrap();
        assert!(r_l <= TOL, "Lie-derivative invariant formula: {r_l}");
    }
}

/// Helpers for adding values whose nominal degrees differ only through
/// structural zeros, and for wedging a 1-form on the left.
trait DegreeTolerant {
    fn add_degree_tolerant(&self, other: &Self) -> Self;
}

impl DegreeTolerant for DifferentialForm {
    fn add_degree_tolerant(&self, other: &Self) -> Self {
        if other.is_structural_zero() && other.degree() != self.degree() {
            return self.clone();
        }
        if self.is_structural_zero() && other.degree() != self.degree() {
            return other.clone();
        }
        self.add(other)
    }
}

trait WedgeFront {
    fn wedge_front(&self, alpha: &DifferentialForm) -> DifferentialForm;
}

impl WedgeFront for DifferentialForm {
    fn wedge_front(&self, alpha: &DifferentialForm) -> DifferentialForm {
        alpha.wedge(self).unwrap()
    }
}
