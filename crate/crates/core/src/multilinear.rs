//! Pointwise exterior algebra over R^n with numeric coefficients:
//! k-vectors on the basis `e_I`, wedge products, the Plücker embedding,
//! subspace intersection via wedge vanishing, duality through the top-degree
//! pairing, and the vector/covector pairing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg;
use crate::multi_index::MultiIndex;

/// Tolerance for deciding that a wedge of normalized k-vectors vanishes.
const WEDGE_ZERO_TOL: f64 = 1e-8;

/// A k-vector in the exterior algebra of R^n, stored sparsely over the
/// basis `e_I`. Degrees above `n` are representable and always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct KVector {
    n: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl KVector {
    pub fn zero(n: usize, degree: usize) -> Self {
        KVector {
            n,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis k-vector `e_I`.
    pub fn basis(n: usize, index: MultiIndex) -> Self {
        assert!(
            index.min_dim() <= n,
            "multi-index {index} does not fit in dimension {n}"
        );
        let mut coeffs = BTreeMap::new();
        coeffs.insert(index, 1.0);
        KVector {
            n,
            degree: index.degree(),
            coeffs,
        }
    }

    /// A 1-vector from coordinates.
    pub fn from_vector(coords: &[f64]) -> Self {
        let n = coords.len();
        let mut v = KVector::zero(n, 1);
        for (i, &c) in coords.iter().enumerate() {
            v.add_coefficient(MultiIndex::single(i), c);
        }
        v
    }

    pub fn from_coeffs(
        n: usize,
        degree: usize,
        entries: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut v = KVector::zero(n, degree);
        for (idx, c) in entries {
            if idx.degree() != degree {
                return Err(Error::Invalid(format!(
                    "coefficient index {idx} has degree {}, expected {degree}",
                    idx.degree()
                )));
            }
            if idx.min_dim() > n {
                return Err(Error::Invalid(format!(
                    "index {idx} does not fit in dimension {n}"
                )));
            }
            v.add_coefficient(idx, c);
        }
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        self.coeffs.get(index).copied().unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.coeffs.iter()
    }

    fn add_coefficient(&mut self, index: MultiIndex, value: f64) {
        let entry = self.coeffs.entry(index).or_insert(0.0);
        *entry += value;
        if *entry == 0.0 {
            self.coeffs.remove(&index);
        }
    }

    pub fn add(&self, other: &KVector) -> KVector {
        assert_eq!(self.n, other.n, "ambient dimensions differ");
        assert_eq!(self.degree, other.degree, "degrees differ");
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            out.add_coefficient(*idx, *c);
        }
        out
    }

    pub fn scale(&self, c: f64) -> KVector {
        if c == 0.0 {
            return KVector::zero(self.n, self.degree);
        }
        KVector {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Bilinear extension of `e_I ∧ e_J = sign(I,J) e_{I∪J}`. Degrees above
    /// `n` give the zero value.
    pub fn wedge(&self, other: &KVector) -> KVector {
        assert_eq!(self.n, other.n, "ambient dimensions differ");
        let degree = self.degree + other.degree;
        let mut out = KVector::zero(self.n, degree);
        if degree > self.n {
            return out;
        }
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if let Some((sign, merged)) = i.merge(j) {
                    out.add_coefficient(merged, sign * a * b);
                }
            }
        }
        out
    }

    /// Coefficients flattened in enumeration order, for rank computations.
    fn dense(&self) -> Vec<f64> {
        MultiIndex::enumerate(self.n, self.degree)
            .iter()
            .map(|i| self.coefficient(i))
            .collect()
    }
}

/// Sign bookkeeping shared by every wedge product: 0 (as `None`) when the
/// indices overlap, otherwise the permutation sign and the sorted union.
pub fn merge_sign(i: &MultiIndex, j: &MultiIndex) -> Option<(f64, MultiIndex)> {
    i.merge(j)
}

/// A subspace of R^n presented by a spanning list of vectors. Rank is
/// validated by the operations that require independence, not on
/// construction, so rank-deficient presentations can be diagnosed.
#[derive(Debug, Clone)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Invalid(
                "subspace needs at least one basis vector".into(),
            ));
        }
        let n = basis[0].len();
        if n == 0 || basis.iter().any(|v| v.len() != n) {
            return Err(Error::Invalid(
                "subspace basis vectors have inconsistent dimensions".into(),
            ));
        }
        Ok(Subspace { n, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }
}

/// The decomposable k-vector `w_1 ∧ ... ∧ w_k` representing the subspace.
/// Two bases of the same subspace give proportional outputs.
pub fn plucker(w: &Subspace) -> Result<KVector> {
    if linalg::rank(w.basis.to_vec()) < w.dim() {
        return Err(Error::RankDeficient);
    }
    let mut acc = KVector::from_coeffs(w.n, 0, [(MultiIndex::EMPTY, 1.0)])?;
    for v in &w.basis {
        acc = acc.wedge(&KVector::from_vector(v));
    }
    Ok(acc)
}

/// True exactly when `dim(W ∩ W') > 0`, decided by vanishing of the wedge
/// of the (normalized) Plücker vectors.
pub fn subspaces_intersect(w: &Subspace, w2: &Subspace) -> Result<bool> {
    if w.n != w2.n {
        return Err(Error::Invalid(
            "subspaces live in different ambient dimensions".into(),
        ));
    }
    let a = plucker(w)?;
    let b = plucker(w2)?;
    let a = a.scale(1.0 / a.max_abs());
    let b = b.scale(1.0 / b.max_abs());
    Ok(a.wedge(&b).is_zero(WEDGE_ZERO_TOL))
}

/// For a linearly independent list `v_1..v_t` of k-vectors, an (n-k)-vector
/// `u` with `u ∧ v_1 ≠ 0` and `u ∧ v_i = 0` for `i ≥ 2`, found through the
/// isomorphism `u ↦ λ_u` onto the dual of the k-vectors, where
/// `u ∧ v = λ_u(v) e` against the top basis vector `e`.
pub fn dual_separator(v_list: &[KVector], n: usize) -> Result<KVector> {
    if v_list.is_empty() {
        return Err(Error::Invalid(
            "dual_separator needs at least one k-vector".into(),
        ));
    }
    let k = v_list[0].degree();
    if k > n {
        return Err(Error::Degree(format!(
            "degree {k} exceeds ambient dimension {n}"
        )));
    }
    for v in v_list {
        if v.degree() != k || v.n() != n {
            return Err(Error::DegreeMismatch(k, v.degree()));
        }
    }
    let columns = MultiIndex::enumerate(n, n - k);
    // A[i][J] = λ_{e_J}(v_i) = sign(J, Jᶜ) * v_i^{Jᶜ}
    let a: Vec<Vec<f64>> = v_list
        .iter()
        .map(|v| {
            columns
                .iter()
                .map(|j| {
                    let complement = j.complement(n);
                    match j.merge(&complement) {
                        Some((sign, _)) => sign * v.coefficient(&complement),
                        None => 0.0,
                    }
                })
                .collect()
        })
        .collect();
    let mut b = vec![0.0; v_list.len()];
    b[0] = 1.0;
    // Dependent input shows up as a dependent row system.
    if linalg::rank(a.clone()) < v_list.len() {
        return Err(Error::DependentInput);
    }
    let u = linalg::solve_any(&a, &b).ok_or(Error::DependentInput)?;
    KVector::from_coeffs(n, n - k, columns.into_iter().zip(u))
}

/// Pairing of a k-covector (coefficients over the dual basis `φ^I`) with a
/// k-vector: the bilinear extension of `φ^I(e_J) = δ_IJ`. On decomposables
/// this equals the determinant `det(ω^i(v_j))`.
pub fn pair_covector(omega: &KVector, v: &KVector) -> Result<f64> {
    if omega.degree() != v.degree() {
        return Err(Error::DegreeMismatch(omega.degree(), v.degree()));
    }
    if omega.n() != v.n() {
        return Err(Error::Invalid("ambient dimensions differ".into()));
    }
    Ok(omega
        .coefficients()
        .map(|(i, c)| c * v.coefficient(i))
        .sum())
}

/// Numeric rank of a list of k-vectors viewed as coefficient vectors.
pub fn coefficient_rank(v_list: &[KVector]) -> usize {
    linalg::rank(v_list.iter().map(|v| v.dense()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, idx: &[usize]) -> KVector {
        KVector::basis(n, MultiIndex::new(idx).unwrap())
    }

    #[test]
    fn wedge_basis_and_antisymmetry() {
        let e0 = e(2, &[0]);
        let e1 = e(2, &[1]);
        let e01 = MultiIndex::new(&[0, 1]).unwrap();
        assert_eq!(e0.wedge(&e1).coefficient(&e01), 1.0);
        assert_eq!(e1.wedge(&e0).coefficient(&e01), -1.0);
    }

    #[test]
    fn wedge_bilinear_expansion() {
        // (e0 + e1) ∧ (e0 - e1) = -2 e01
        let u = e(2, &[0]).add(&e(2, &[1]));
        let v = e(2, &[0]).add(&e(2, &[1]).scale(-1.0));
        let w = u.wedge(&v);
        assert_eq!(w.coefficient(&MultiIndex::new(&[0, 1]).unwrap()), -2.0);
        assert_eq!(w.coefficients().count(), 1);
    }

    #[test]
    fn wedge_above_top_degree_is_zero() {
        let w = e(2, &[0, 1]).wedge(&e(2, &[0]));
        assert_eq!(w.degree(), 3);
        assert!(w.is_zero(0.0));
    }

    #[test]
    fn plucker_of_standard_plane() {
        let w = Subspace::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let v = plucker(&w).unwrap();
        assert_eq!(v.coefficient(&MultiIndex::new(&[0, 1]).unwrap()), 1.0);
    }

    #[test]
    fn plucker_sheared_basis() {
        // span{e0 + e1, e1} wedges to e01
        let w = Subspace::new(vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let v = plucker(&w).unwrap();
        assert_eq!(v.coefficient(&MultiIndex::new(&[0, 1]).unwrap()), 1.0);
        assert_eq!(v.coefficients().count(), 1);
    }

    #[test]
    fn plucker_rank_deficient() {
        let w = Subspace::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(plucker(&w), Err(Error::RankDeficient)));
    }

    #[test]
    fn intersection_shared_and_complementary() {
        let w1 = Subspace::new(vec![vec![1., 0., 0., 0.], vec![0., 1., 0., 0.]]).unwrap();
        let w2 = Subspace::new(vec![vec![0., 1., 0., 0.], vec![0., 0., 1., 0.]]).unwrap();
        let w3 = Subspace::new(vec![vec![0., 0., 1., 0.], vec![0., 0., 0., 1.]]).unwrap();
        assert!(subspaces_intersect(&w1, &w2).unwrap());
        assert!(!subspaces_intersect(&w1, &w3).unwrap());
    }

    #[test]
    fn dual_separator_single() {
        let v = e(3, &[0, 1]);
        let u = dual_separator(std::slice::from_ref(&v), 3).unwrap();
        assert_eq!(u.degree(), 1);
        assert!(!u.wedge(&v).is_zero(1e-12));
    }

    #[test]
    fn dual_separator_pair() {
        let v1 = e(3, &[0, 1]);
        let v2 = e(3, &[0, 2]);
        let u = dual_separator(&[v1.clone(), v2.clone()], 3).unwrap();
        assert!(!u.wedge(&v1).is_zero(1e-12));
        assert!(u.wedge(&v2).is_zero(1e-12));
    }

    #[test]
    fn dual_separator_dependent() {
        let v1 = e(3, &[0, 1]);
        let v2 = v1.scale(2.0);
        assert!(matches!(
            dual_separator(&[v1, v2], 3),
            Err(Error::DependentInput)
        ));
    }

    #[test]
    fn covector_pairing_dual_basis() {
        let phi01 = e(3, &[0, 1]);
        assert_eq!(pair_covector(&phi01, &e(3, &[0, 1])).unwrap(), 1.0);
        assert_eq!(pair_covector(&phi01, &e(3, &[0, 2])).unwrap(), 0.0);
    }

    #[test]
    fn covector_pairing_decomposable_determinant() {
        // ω = (φ0 + φ1) ∧ φ2, v = e0 ∧ (e1 + e2); det [[1,1],[0,1]] = 1
        let omega = e(3, &[0]).add(&e(3, &[1])).wedge(&e(3, &[2]));
        let v = e(3, &[0]).wedge(&e(3, &[1]).add(&e(3, &[2])));
        assert_eq!(pair_covector(&omega, &v).unwrap(), 1.0);
    }

    #[test]
    fn covector_pairing_degree_mismatch() {
        assert!(matches!(
            pair_covector(&e(3, &[0]), &e(3, &[0, 1])),
            Err(Error::DegreeMismatch(1, 2))
        ));
    }
}
