//! Seeded random generators for fields, connections, and twist data.
//!
//! Verification suites draw their random instances from here so that one
//! seed makes a whole run reproducible. Coefficients are polynomials with
//! uniform coefficients in [-1, 1].

use rand::Rng;

use crate::bilinear::Metric;
use crate::chart::Chart;
use crate::connection::{AffineConnection, TwistFields};
use crate::exterior::{DifferentialForm, MultiVectorField};
use crate::multi_index::MultiIndex;
use crate::scalar::ScalarField;

/// All monomials of total degree at most `max_degree`, as exponent vectors.
fn monomials(dim: usize, max_degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; dim]];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for m in &out {
            let start = m.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in start..dim {
                let mut bumped = m.clone();
                bumped[i] += 1;
                next.push(bumped);
            }
        }
        out.extend(next.iter().cloned());
        out.dedup();
        out = {
            let mut seen = std::collections::BTreeSet::new();
            out.into_iter().filter(|m| seen.insert(m.clone())).collect()
        };
    }
    out
}

fn monomial_field(chart: &Chart, exponents: &[usize]) -> ScalarField {
    let mut acc = ScalarField::one(chart);
    for (i, &e) in exponents.iter().enumerate() {
        if e > 0 {
            acc = &acc * &ScalarField::coord(chart, i).powi(e as i32);
        }
    }
    acc
}

/// A random polynomial of total degree at most `max_degree`.
pub fn random_polynomial(chart: &Chart, max_degree: usize, rng: &mut impl Rng) -> ScalarField {
    let mut acc = ScalarField::zero(chart);
    for m in monomials(chart.dim(), max_degree) {
        let c: f64 = rng.random_range(-1.0..1.0);
        acc = &acc + &monomial_field(chart, &m).scale(c);
    }
    acc
}

/// A random multivector field of the given degree with polynomial
/// coefficients of total degree at most `max_degree`.
pub fn random_mvf(
    chart: &Chart,
    degree: usize,
    max_degree: usize,
    rng: &mut impl Rng,
) -> MultiVectorField {
    let mut out = MultiVectorField::zero(chart, degree);
    for idx in MultiIndex::enumerate(chart.dim(), degree) {
        out.set_term(idx, random_polynomial(chart, max_degree, rng))
            .expect("valid term");
    }
    out
}

/// A random differential form of the given degree.
pub fn random_form(
    chart: &Chart,
    degree: usize,
    max_degree: usize,
    rng: &mut impl Rng,
) -> DifferentialForm {
    let mut out = DifferentialForm::zero(chart, degree);
    for idx in MultiIndex::enumerate(chart.dim(), degree) {
        out.set_term(idx, random_polynomial(chart, max_degree, rng))
            .expect("valid term");
    }
    out
}

/// A random affine connection with polynomial Christoffel symbols.
pub fn random_affine(chart: &Chart, max_degree: usize, rng: &mut impl Rng) -> AffineConnection {
    let n = chart.dim();
    let mut conn = AffineConnection::flat(chart);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                conn.set_christoffel(k, i, j, random_polynomial(chart, max_degree, rng))
                    .expect("valid symbol");
            }
        }
    }
    conn
}

/// A random affine connection symmetric in its lower indices (shared
/// coefficient trees, so the symmetry is structural).
pub fn random_symmetric_affine(
    chart: &Chart,
    max_degree: usize,
    rng: &mut impl Rng,
) -> AffineConnection {
    let n = chart.dim();
    let mut conn = AffineConnection::flat(chart);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let f = random_polynomial(chart, max_degree, rng);
                conn.set_christoffel(k, i, j, f.clone())
                    .expect("valid symbol");
                conn.set_christoffel(k, j, i, f).expect("valid symbol");
            }
        }
    }
    conn
}

/// Random twist fields filling every admissible bidegree.
pub fn random_twist(chart: &Chart, max_degree: usize, rng: &mut impl Rng) -> TwistFields {
    let n = chart.dim();
    let mut twist = TwistFields::zero(chart);
    for k in 1..=n {
        for l in 1..=n {
            if (k, l) == (1, 1) || k + l - 1 > n {
                continue;
            }
            for kk in MultiIndex::enumerate(n, k + l - 1) {
                for ii in MultiIndex::enumerate(n, k) {
                    for jj in MultiIndex::enumerate(n, l) {
                        twist
                            .add_term(
                                k,
                                l,
                                (kk, ii, jj),
                                random_polynomial(chart, max_degree, rng),
                            )
                            .expect("valid twist term");
                    }
                }
            }
        }
    }
    twist
}

/// A random polynomial metric: the identity plus a symmetric perturbation
/// small enough (by Gershgorin) to stay positive definite on the unit box.
pub fn random_metric(chart: &Chart, max_degree: usize, rng: &mut impl Rng) -> Metric {
    let n = chart.dim();
    let monomial_count = monomials(n, max_degree).len() as f64;
    let amp = 0.25 / (n as f64 * monomial_count);
    let mut g = vec![vec![ScalarField::zero(chart); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut entry = random_polynomial(chart, max_degree, rng).scale(amp);
            if i == j {
                entry = &entry + &ScalarField::one(chart);
            }
            g[i][j] = entry.clone();
            g[j][i] = entry;
        }
    }
    Metric::new(chart, g).expect("perturbed identity metric is valid")
}
