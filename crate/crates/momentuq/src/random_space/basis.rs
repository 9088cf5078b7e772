//! Total-degree multi-index bases of normalized Legendre polynomials.

use nalgebra::DMatrix;

use super::{QuadratureRule, RandomSpaceError};

/// Multi-index i = (i_1,…,i_p) of univariate polynomial degrees.
///
/// The total degree is |i| = Σ_n i_n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }
}

/// All multi-indices with |i| ≤ M over p dimensions, in graded
/// lexicographic order: ascending total degree, lexicographic on the
/// entries within each degree block.
///
/// The ordering makes bases of increasing order prefixes of each other,
/// which is what lets adaptive solvers truncate or zero-pad moment
/// vectors when a cell changes its refinement level.
#[derive(Debug, Clone)]
pub struct BasisSet {
    dim: usize,
    max_degree: usize,
    indices: Vec<MultiIndex>,
}

impl BasisSet {
    /// Basis of all multi-indices with total degree ≤ `max_degree`.
    ///
    /// The number of basis functions is binomial(max_degree + dim, dim).
    pub fn total_degree(max_degree: usize, dim: usize) -> Self {
        assert!(dim >= 1, "stochastic dimension must be at least 1");
        let mut indices = Vec::new();
        for degree in 0..=max_degree {
            let mut scratch = vec![0usize; dim];
            compositions(degree, dim, 0, &mut scratch, &mut indices);
        }
        Self { dim, max_degree, indices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Number of indices with total degree ≤ `degree` (a prefix length of
    /// this basis, by the graded ordering).
    pub fn len_up_to_degree(&self, degree: usize) -> usize {
        self.indices
            .iter()
            .take_while(|i| i.total_degree() <= degree)
            .count()
    }

    /// Evaluate all N basis functions at ξ ∈ [-1,1]^p.
    pub fn eval(&self, xi: &[f64]) -> Result<Vec<f64>, RandomSpaceError> {
        if xi.len() != self.dim {
            return Err(RandomSpaceError::DimensionMismatch { basis: self.dim, point: xi.len() });
        }
        if xi.iter().any(|x| !(-1.0..=1.0).contains(x)) {
            return Err(RandomSpaceError::OutOfSupport(xi.to_vec()));
        }
        let mut out = vec![0.0; self.len()];
        self.eval_unchecked(xi, &mut out);
        Ok(out)
    }

    /// Evaluate without the support check (quadrature points are inside by
    /// construction).
    pub fn eval_unchecked(&self, xi: &[f64], out: &mut [f64]) {
        debug_assert_eq!(xi.len(), self.dim);
        debug_assert_eq!(out.len(), self.len());
        // Univariate values φ_n(ξ_d) for all degrees n ≤ M, per dimension.
        let m = self.max_degree;
        let mut uni = vec![0.0; self.dim * (m + 1)];
        for (d, &x) in xi.iter().enumerate() {
            legendre_orthonormal(m, x, &mut uni[d * (m + 1)..(d + 1) * (m + 1)]);
        }
        for (slot, idx) in out.iter_mut().zip(&self.indices) {
            let mut prod = 1.0;
            for (d, &deg) in idx.entries().iter().enumerate() {
                prod *= uni[d * (m + 1) + deg];
            }
            *slot = prod;
        }
    }

    /// Tabulate basis values at all points of a rule: a Q × N matrix with
    /// entries φ_i(ξ_k).
    pub fn tabulate(&self, rule: &QuadratureRule) -> DMatrix<f64> {
        assert_eq!(rule.dim(), self.dim, "rule and basis dimension differ");
        let q = rule.len();
        let n = self.len();
        let mut tab = DMatrix::zeros(q, n);
        let mut row = vec![0.0; n];
        for k in 0..q {
            self.eval_unchecked(rule.point(k), &mut row);
            for i in 0..n {
                tab[(k, i)] = row[i];
            }
        }
        tab
    }
}

/// All compositions of `degree` into `slots` parts, lexicographic.
fn compositions(
    degree: usize,
    slots: usize,
    pos: usize,
    scratch: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if pos + 1 == slots {
        scratch[pos] = degree;
        out.push(MultiIndex::new(scratch.clone()));
        return;
    }
    for v in 0..=degree {
        scratch[pos] = v;
        compositions(degree - v, slots, pos + 1, scratch, out);
    }
}

/// Normalized Legendre polynomials φ_n(x) = √(2n+1) P_n(x), orthonormal on
/// [-1,1] with respect to the uniform density 1/2. Fills `out[0..=max_deg]`.
pub fn legendre_orthonormal(max_deg: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= max_deg + 1);
    let mut p_prev = 1.0;
    out[0] = 1.0;
    if max_deg == 0 {
        return;
    }
    let mut p_curr = x;
    out[1] = (3.0f64).sqrt() * x;
    for n in 1..max_deg {
        let nf = n as f64;
        let p_next = ((2.0 * nf + 1.0) * x * p_curr - nf * p_prev) / (nf + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
        out[n + 1] = ((2 * (n + 1) + 1) as f64).sqrt() * p_curr;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_space::{gauss_legendre_1d, tensor_quadrature, QuadratureFamily};
    use approx::assert_abs_diff_eq;

    fn binomial(n: usize, k: usize) -> usize {
        let mut r = 1usize;
        for j in 0..k {
            r = r * (n - j) / (j + 1);
        }
        r
    }

    #[test]
    fn basis_counts() {
        assert_eq!(BasisSet::total_degree(9, 2).len(), 55);
        assert_eq!(BasisSet::total_degree(0, 3).len(), 1);
        assert_eq!(BasisSet::total_degree(3, 1).len(), 4);
        for m in 0..=10 {
            for p in 1..=4 {
                assert_eq!(BasisSet::total_degree(m, p).len(), binomial(m + p, p));
            }
        }
    }

    #[test]
    fn graded_lexicographic_ordering() {
        let basis = BasisSet::total_degree(2, 2);
        let idx: Vec<&[usize]> = basis.indices().iter().map(|i| i.entries()).collect();
        assert_eq!(
            idx,
            vec![
                &[0, 0][..],
                &[0, 1],
                &[1, 0],
                &[0, 2],
                &[1, 1],
                &[2, 0]
            ]
        );
        // Lower-degree bases are prefixes of higher-degree ones.
        let coarse = BasisSet::total_degree(1, 2);
        assert_eq!(&basis.indices()[..coarse.len()], coarse.indices());
        assert_eq!(basis.len_up_to_degree(1), coarse.len());
    }

    #[test]
    fn first_entry_constant_one() {
        let basis = BasisSet::total_degree(4, 3);
        let v = basis.eval(&[0.3, -0.7, 0.1]).unwrap();
        assert_eq!(v[0], 1.0);
    }

    #[test]
    fn degree_one_value_matches_gram_schmidt_oracle() {
        // Gram-Schmidt on monomials {1, x} with weight 1/2 on [-1,1]:
        // e0 = 1; x is already orthogonal to 1, with norm² = ⟨x²⟩ = 1/3,
        // so e1(x) = √3·x and e1(1) = √3.
        let basis = BasisSet::total_degree(1, 1);
        let v = basis.eval(&[1.0]).unwrap();
        assert_abs_diff_eq!(v[1], 3.0f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn out_of_support_rejected() {
        let basis = BasisSet::total_degree(2, 2);
        assert!(basis.eval(&[0.0, 1.5]).is_err());
        assert!(basis.eval(&[0.0]).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        // ⟨φ_i φ_j⟩_Q = δ_ij under a Gauss-Legendre rule of exactness ≥ 2M.
        for p in 1..=3usize {
            for m in [0usize, 1, 3, 6, 10] {
                if m == 10 && p == 3 {
                    continue; // covered by the dedicated property test below
                }
                let basis = BasisSet::total_degree(m, p);
                let rule =
                    tensor_quadrature(QuadratureFamily::GaussLegendre, &vec![m + 1; p], p);
                let tab = basis.tabulate(&rule);
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        let mut acc = 0.0;
                        for k in 0..rule.len() {
                            acc += rule.weight(k) * rule.density(k) * tab[(k, i)] * tab[(k, j)];
                        }
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(acc, want, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn gram_identity_largest_case() {
        let basis = BasisSet::total_degree(10, 3);
        let rule = tensor_quadrature(QuadratureFamily::GaussLegendre, &[11, 11, 11], 3);
        let tab = basis.tabulate(&rule);
        let mut max_err: f64 = 0.0;
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let mut acc = 0.0;
                for k in 0..rule.len() {
                    acc += rule.weight(k) * rule.density(k) * tab[(k, i)] * tab[(k, j)];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                max_err = max_err.max((acc - want).abs());
            }
        }
        assert!(max_err < 1e-10, "Gram deviation {max_err:.2e}");
    }

    #[test]
    fn univariate_recurrence_against_explicit_p4() {
        // P_4(x) = (35x⁴ − 30x² + 3)/8
        let x = 0.42;
        let mut vals = [0.0; 5];
        legendre_orthonormal(4, x, &mut vals);
        let p4 = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
        assert_abs_diff_eq!(vals[4], 3.0 * p4, epsilon = 1e-14); // √9 = 3
    }

    #[test]
    fn gauss_legendre_exactness_on_odd_power() {
        // A Q-point rule integrates ξ^{2Q-1} exactly on U(-1,1): the moment
        // is zero by symmetry, and ξ^{2Q-2} is matched against the analytic
        // value 1/(2Q-1).
        for q in 1..=8usize {
            let rule = gauss_legendre_1d(q);
            let odd = crate::random_space::bracket(&rule, |x| x[0].powi(2 * q as i32 - 1));
            assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-14);
            let even = crate::random_space::bracket(&rule, |x| x[0].powi(2 * q as i32 - 2));
            assert_abs_diff_eq!(even, 1.0 / (2.0 * q as f64 - 1.0), epsilon = 1e-13);
        }
    }
}
