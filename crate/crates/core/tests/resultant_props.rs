mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn resultant_vanishes_iff_common_root((p, q) in resultant_pair()) {
        common_root_law(&p, &q)?;
    }

    #[test]
    fn resultant_degree_respects_bound(a in bivariate_terms(), b in bivariate_terms()) {
        degree_law(&bivariate(&a), &bivariate(&b))?;
    }

    #[test]
    fn bareiss_determinant_matches_cofactor_expansion(m in poly_matrix()) {
        bareiss_matches_cofactor(&m)?;
    }
}
