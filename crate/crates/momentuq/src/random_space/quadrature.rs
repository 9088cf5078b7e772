//! Gauss-Legendre, Gauss-Lobatto and Clenshaw-Curtis rules, their tensor
//! products and Smolyak sparse combinations.
//!
//! Clenshaw-Curtis levels follow the doubling convention of the nested
//! family: level 0 is the single point {0}, level L ≥ 1 has 2^L + 1 points,
//! so levels 2, 3, 4 carry 5, 9, 17 points. Points of level L-1 are a
//! bit-exact subset of level L, recorded in [`QuadratureRule::nesting`].
//! Smolyak weights may be negative; they are kept as-is.

use std::collections::HashMap;

/// Nested point families usable in tensor and sparse constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureFamily {
    /// Levels are point counts; optimal polynomial exactness 2Q-1, not nested.
    GaussLegendre,
    /// Levels are point counts; includes ±1; exactness 2Q-3, not nested.
    GaussLobatto,
    /// Doubling levels, nested; level 0 = midpoint, level L = 2^L+1 points.
    ClenshawCurtis,
}

impl std::fmt::Display for QuadratureFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuadratureFamily::GaussLegendre => write!(f, "gauss-legendre"),
            QuadratureFamily::GaussLobatto => write!(f, "gauss-lobatto"),
            QuadratureFamily::ClenshawCurtis => write!(f, "clenshaw-curtis"),
        }
    }
}

/// Points, weights and density values in Θ ⊆ R^p.
///
/// Weights are plain Lebesgue weights on [-1,1]^p; `density` holds
/// f_Ξ(ξ_k) = 2^{-p} for the uniform inputs used throughout.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    points: Vec<f64>, // row-major, len() * dim entries
    weights: Vec<f64>,
    density: Vec<f64>,
    /// Human-readable identity, carried into error reports.
    label: String,
    /// For nested families: index of each point of the next-coarser rule of
    /// the same construction inside this rule. Empty when non-nested or at
    /// the coarsest level.
    nesting: Vec<usize>,
}

impl QuadratureRule {
    fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>, label: String) -> Self {
        let n = weights.len();
        debug_assert_eq!(points.len(), n * dim);
        let density = vec![0.5f64.powi(dim as i32); n];
        Self { dim, points, weights, density, label, nesting: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    /// f_Ξ(ξ_k).
    pub fn density(&self, k: usize) -> f64 {
        self.density[k]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Map from the next-coarser rule's point indices into this rule.
    pub fn nesting(&self) -> &[usize] {
        &self.nesting
    }

    pub fn has_negative_weights(&self) -> bool {
        self.weights.iter().any(|w| *w < 0.0)
    }
}

/// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on P_n.
pub fn gauss_legendre_1d(n: usize) -> QuadratureRule {
    assert!(n >= 1);
    let (x, w) = gauss_legendre_nodes(n);
    QuadratureRule::new(1, x, w, format!("gauss-legendre({n})"))
}

fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n / 2;
    for i in 0..half {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // Mirror for exact symmetry.
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_and_derivative(n, 0.0);
        x[half] = 0.0;
        w[half] = 2.0 / (d * d);
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p_curr = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p_curr - kf * p_prev) / (kf + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
    }
    let d = if (x * x - 1.0).abs() < 1e-300 {
        // Endpoint formula P'_n(±1) = ±^{n+1} n(n+1)/2.
        let s = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        (n as f64) * (x * p_curr - p_prev) / (x * x - 1.0)
    };
    (p_curr, d)
}

/// Gauss-Lobatto nodes (including ±1) and weights on [-1,1].
///
/// Interior nodes are the roots of P'_{n-1}; weights are
/// 2/(n(n-1) P_{n-1}(x_i)²). Exact for polynomials of degree ≤ 2n-3.
pub fn gauss_lobatto_1d(n: usize) -> QuadratureRule {
    assert!(n >= 2, "Lobatto rules need at least the two endpoints");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    x[0] = -1.0;
    x[n - 1] = 1.0;
    let endpoint = 2.0 / (n * (n - 1)) as f64;
    w[0] = endpoint;
    w[n - 1] = endpoint;
    let interior = n - 2;
    for i in 0..(interior + 1) / 2 {
        // Interior nodes interlace Chebyshev-like points; Newton on P'_{n-1}.
        let mut z =
            (std::f64::consts::PI * (i as f64 + 1.0) / (n as f64 - 1.0)).cos();
        for _ in 0..100 {
            let (d1, d2) = legendre_derivatives(n - 1, z);
            let dz = d1 / d2;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (p, _) = legendre_and_derivative(n - 1, z);
        let wi = 2.0 / ((n * (n - 1)) as f64 * p * p);
        // z descends from +1; store mirrored pair for exact symmetry.
        x[n - 2 - i] = z;
        x[1 + i] = -z;
        w[n - 2 - i] = wi;
        w[1 + i] = wi;
    }
    if interior % 2 == 1 {
        let mid = n / 2;
        x[mid] = 0.0;
        let (p, _) = legendre_and_derivative(n - 1, 0.0);
        w[mid] = 2.0 / ((n * (n - 1)) as f64 * p * p);
    }
    QuadratureRule::new(1, x, w, format!("gauss-lobatto({n})"))
}

/// P'_n and P''_n via the stable recurrences.
fn legendre_derivatives(n: usize, x: f64) -> (f64, f64) {
    let (p, d1) = legendre_and_derivative(n, x);
    // (1-x²)P'' = 2xP' - n(n+1)P
    let d2 = (2.0 * x * d1 - (n * (n + 1)) as f64 * p) / (1.0 - x * x);
    (d1, d2)
}

/// Number of Clenshaw-Curtis points at a doubling level.
pub fn clenshaw_curtis_count(level: usize) -> usize {
    if level == 0 {
        1
    } else {
        (1 << level) + 1
    }
}

/// Clenshaw-Curtis rule at a doubling level: level 0 is {0} with weight 2,
/// level L has 2^L + 1 points cos(jπ/2^L) in ascending order.
pub fn clenshaw_curtis_1d(level: usize) -> QuadratureRule {
    let (x, w) = clenshaw_curtis_nodes(level);
    let mut rule = QuadratureRule::new(1, x, w, format!("clenshaw-curtis(level {level})"));
    if level >= 1 {
        let coarse = clenshaw_curtis_count(level - 1);
        rule.nesting = (0..coarse)
            .map(|j| if level == 1 { 1 } else { 2 * j })
            .collect();
    }
    rule
}

fn clenshaw_curtis_nodes(level: usize) -> (Vec<f64>, Vec<f64>) {
    if level == 0 {
        return (vec![0.0], vec![2.0]);
    }
    let n_int = 1usize << level; // number of intervals, points = n_int + 1
    let n = n_int + 1;
    let mut x = vec![0.0; n];
    for (j, slot) in x.iter_mut().enumerate() {
        *slot = (j as f64 * std::f64::consts::PI / n_int as f64).cos();
    }
    // Enforce exact symmetry (in particular an exact midpoint zero); the
    // symmetrized values agree bit-exactly across nested levels.
    let raw = x.clone();
    for j in 0..n {
        x[j] = (raw[j] - raw[n - 1 - j]) / 2.0;
    }
    let mut w = vec![0.0; n];
    for (j, slot) in w.iter_mut().enumerate() {
        let mut s = 0.0;
        for k in 0..=n_int / 2 {
            let mut term = (2.0 * k as f64 * j as f64 * std::f64::consts::PI / n_int as f64)
                .cos()
                / (1.0 - 4.0 * (k * k) as f64);
            if k == 0 || k == n_int / 2 {
                term *= 0.5;
            }
            s += term;
        }
        let c = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        *slot = 4.0 * c / n_int as f64 * s;
    }
    // Stored in ascending point order.
    x.reverse();
    w.reverse();
    (x, w)
}

/// Tensor-product rule. For Gauss families the per-dimension level is the
/// point count; for Clenshaw-Curtis it is the doubling level.
pub fn tensor_quadrature(
    family: QuadratureFamily,
    level_per_dim: &[usize],
    dim: usize,
) -> QuadratureRule {
    assert_eq!(level_per_dim.len(), dim);
    let rules_1d: Vec<QuadratureRule> = level_per_dim
        .iter()
        .map(|&l| match family {
            QuadratureFamily::GaussLegendre => gauss_legendre_1d(l),
            QuadratureFamily::GaussLobatto => gauss_lobatto_1d(l),
            QuadratureFamily::ClenshawCurtis => clenshaw_curtis_1d(l),
        })
        .collect();
    let total: usize = rules_1d.iter().map(|r| r.len()).product();
    let mut points = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    'outer: loop {
        let mut w = 1.0;
        for (d, r) in rules_1d.iter().enumerate() {
            points.push(r.point(idx[d])[0]);
            w *= r.weight(idx[d]);
        }
        weights.push(w);
        // odometer increment, last dimension fastest
        for d in (0..dim).rev() {
            idx[d] += 1;
            if idx[d] < rules_1d[d].len() {
                continue 'outer;
            }
            idx[d] = 0;
            if d == 0 {
                break 'outer;
            }
        }
    }
    let label = format!("{family} tensor levels {level_per_dim:?}");
    let mut rule = QuadratureRule::new(dim, points, weights, label);
    if family == QuadratureFamily::ClenshawCurtis && level_per_dim.iter().all(|&l| l >= 1) {
        let coarser: Vec<usize> = level_per_dim.iter().map(|&l| l - 1).collect();
        let coarse = tensor_quadrature(family, &coarser, dim);
        rule.nesting = nesting_map(&coarse, &rule)
            .expect("Clenshaw-Curtis tensor levels are nested by construction");
    }
    rule
}

/// Smolyak sparse rule over nested Clenshaw-Curtis levels.
///
/// Level q combines tensor grids with per-dimension levels l, |l|₁ ≤ q,
/// using the standard combination coefficients; for p = 3 levels 2 and 5
/// give the 25- and 441-point grids. Degenerates to the 1D rule for p = 1.
/// Combination weights may be negative.
pub fn sparse_quadrature(level: usize, dim: usize) -> QuadratureRule {
    assert!(dim >= 1);
    let q = level as isize;
    let p = dim as isize;
    let rules_1d: Vec<QuadratureRule> = (0..=level).map(clenshaw_curtis_1d).collect();
    // Points keyed by their index on the level-q grid so that merging uses
    // integer identity, never floating-point comparison.
    let mut merged: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut levels = vec![0usize; dim];
    loop {
        let s: usize = levels.iter().sum();
        let si = s as isize;
        if si <= q && si >= (q - p + 1).max(0) {
            let coeff = if (q - si) % 2 == 0 { 1.0 } else { -1.0 }
                * binomial((p - 1) as usize, (q - si) as usize) as f64;
            accumulate_tensor(&rules_1d, &levels, level, coeff, &mut merged);
        }
        // odometer over levels 0..=q per dimension
        let mut d = dim;
        loop {
            if d == 0 {
                // done
                return finish_sparse(merged, level, dim);
            }
            d -= 1;
            levels[d] += 1;
            if levels[d] <= level {
                break;
            }
            levels[d] = 0;
        }
    }
}

fn accumulate_tensor(
    rules_1d: &[QuadratureRule],
    levels: &[usize],
    q: usize,
    coeff: f64,
    merged: &mut HashMap<Vec<usize>, f64>,
) {
    let dim = levels.len();
    let mut idx = vec![0usize; dim];
    'outer: loop {
        let mut w = coeff;
        let mut key = Vec::with_capacity(dim);
        for d in 0..dim {
            let l = levels[d];
            let r = &rules_1d[l];
            w *= r.weight(idx[d]);
            key.push(fine_grid_index(l, idx[d], q));
        }
        *merged.entry(key).or_insert(0.0) += w;
        for d in (0..dim).rev() {
            idx[d] += 1;
            if idx[d] < rules_1d[levels[d]].len() {
                continue 'outer;
            }
            idx[d] = 0;
            if d == 0 {
                break 'outer;
            }
        }
    }
}

/// Index of point `j` of a level-`l` CC rule inside the level-`q` rule.
fn fine_grid_index(l: usize, j: usize, q: usize) -> usize {
    if q == 0 {
        return 0;
    }
    if l == 0 {
        1 << (q - 1) // the midpoint of the fine grid
    } else {
        j << (q - l)
    }
}

fn finish_sparse(merged: HashMap<Vec<usize>, f64>, level: usize, dim: usize) -> QuadratureRule {
    let fine = clenshaw_curtis_1d(level);
    let mut keys: Vec<Vec<usize>> = merged.keys().cloned().collect();
    keys.sort();
    let mut points = Vec::with_capacity(keys.len() * dim);
    let mut weights = Vec::with_capacity(keys.len());
    for key in &keys {
        for &kd in key {
            points.push(fine.point(kd)[0]);
        }
        weights.push(merged[key]);
    }
    let label = format!("clenshaw-curtis sparse(level {level}, p {dim})");
    let mut rule = QuadratureRule::new(dim, points, weights, label);
    if level >= 1 {
        let coarse = sparse_quadrature(level - 1, dim);
        rule.nesting = nesting_map(&coarse, &rule)
            .expect("sparse Clenshaw-Curtis levels are nested by construction");
    }
    rule
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for j in 0..k {
        r = r * (n - j) / (j + 1);
    }
    r
}

/// Index of every point of `coarse` inside `fine`, by exact coordinate
/// match. Returns `None` if some coarse point is missing, i.e. the rules
/// are not nested.
pub fn nesting_map(coarse: &QuadratureRule, fine: &QuadratureRule) -> Option<Vec<usize>> {
    if coarse.dim() != fine.dim() {
        return None;
    }
    let key = |pt: &[f64]| -> Vec<u64> { pt.iter().map(|x| x.to_bits()).collect() };
    let mut lookup: HashMap<Vec<u64>, usize> = HashMap::with_capacity(fine.len());
    for k in 0..fine.len() {
        lookup.insert(key(fine.point(k)), k);
    }
    (0..coarse.len())
        .map(|j| lookup.get(&key(coarse.point(j))).copied())
        .collect()
}
