//! Refinement ladders: per-level basis/quadrature pairs with the
//! cross-level basis tabulations the adaptive moment update needs.

use nalgebra::DMatrix;

use crate::random_space::{nesting_map, BasisSet, QuadratureRule};

/// One refinement level: a total-degree basis and a matching rule.
#[derive(Debug, Clone)]
pub struct LevelSpec {
    pub basis: BasisSet,
    pub rule: QuadratureRule,
}

/// Levels 0..N_ad−1 ordered coarse to fine. Bases must share the
/// stochastic dimension and strictly increase in total degree; for
/// multi-level ladders the quadrature rules must be nested so that
/// stencil cells of coarser levels are known at every finer point.
#[derive(Debug)]
pub struct StochasticLadder {
    levels: Vec<LevelSpec>,
    /// `tabs[target][source]`: basis of `source` evaluated at the rule
    /// points of `target` (Q_target × N_source).
    tabs: Vec<Vec<DMatrix<f64>>>,
    /// Nesting maps between consecutive rules (multi-level ladders only).
    nestings: Vec<Vec<usize>>,
}

impl StochasticLadder {
    pub fn new(levels: Vec<LevelSpec>) -> Self {
        assert!(!levels.is_empty());
        let dim = levels[0].basis.dim();
        for w in levels.windows(2) {
            assert_eq!(w[0].basis.dim(), dim, "all levels share the stochastic dimension");
            assert!(
                w[0].basis.max_degree() < w[1].basis.max_degree(),
                "levels must strictly increase in total degree"
            );
        }
        let mut nestings = Vec::new();
        for w in levels.windows(2) {
            let map = nesting_map(&w[0].rule, &w[1].rule).unwrap_or_else(|| {
                panic!(
                    "ladder rules must be nested: {} is not contained in {}",
                    w[0].rule.label(),
                    w[1].rule.label()
                )
            });
            nestings.push(map);
        }
        let tabs = levels
            .iter()
            .map(|target| {
                levels.iter().map(|source| source.basis.tabulate(&target.rule)).collect()
            })
            .collect();
        Self { levels, tabs, nestings }
    }

    /// Single-level ladder: the degenerate case used by non-adaptive runs.
    pub fn single(basis: BasisSet, rule: QuadratureRule) -> Self {
        Self::new(vec![LevelSpec { basis, rule }])
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, l: usize) -> &LevelSpec {
        &self.levels[l]
    }

    pub fn basis(&self, l: usize) -> &BasisSet {
        &self.levels[l].basis
    }

    pub fn rule(&self, l: usize) -> &QuadratureRule {
        &self.levels[l].rule
    }

    /// Basis values of level `source` at the points of level `target`.
    pub fn tab(&self, target: usize, source: usize) -> &DMatrix<f64> {
        &self.tabs[target][source]
    }

    /// Map of level `l` points into level `l+1` points.
    pub fn nesting(&self, l: usize) -> &[usize] {
        &self.nestings[l]
    }

    /// Number of moments strictly below the top degree band of level `l`:
    /// the basis size of level l−1, or the size at degree M₀−1 for the
    /// coarsest level (zero when M₀ = 0).
    pub fn prefix_len(&self, l: usize) -> usize {
        if l > 0 {
            self.levels[l - 1].basis.len()
        } else {
            let m0 = self.levels[0].basis.max_degree();
            if m0 == 0 {
                0
            } else {
                self.levels[0].basis.len_up_to_degree(m0 - 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_space::{clenshaw_curtis_1d, gauss_legendre_1d, sparse_quadrature};

    #[test]
    fn cross_tabs_have_expected_shapes() {
        let ladder = StochasticLadder::new(vec![
            LevelSpec { basis: BasisSet::total_degree(1, 3), rule: sparse_quadrature(2, 3) },
            LevelSpec { basis: BasisSet::total_degree(2, 3), rule: sparse_quadrature(3, 3) },
        ]);
        assert_eq!(ladder.tab(1, 0).nrows(), 69);
        assert_eq!(ladder.tab(1, 0).ncols(), 4);
        assert_eq!(ladder.tab(0, 1).nrows(), 25);
        assert_eq!(ladder.tab(0, 1).ncols(), 10);
        assert_eq!(ladder.nesting(0).len(), 25);
        assert_eq!(ladder.prefix_len(1), 4);
        assert_eq!(ladder.prefix_len(0), 1);
    }

    #[test]
    #[should_panic(expected = "nested")]
    fn non_nested_rules_are_rejected() {
        StochasticLadder::new(vec![
            LevelSpec { basis: BasisSet::total_degree(1, 1), rule: gauss_legendre_1d(3) },
            LevelSpec { basis: BasisSet::total_degree(2, 1), rule: gauss_legendre_1d(5) },
        ]);
    }

    #[test]
    fn single_level_needs_no_nesting() {
        let ladder =
            StochasticLadder::single(BasisSet::total_degree(3, 1), clenshaw_curtis_1d(3));
        assert_eq!(ladder.n_levels(), 1);
    }
}
