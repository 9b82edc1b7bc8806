mod common;

use boxwire::semiring::{lang_add, lang_mul, lang_one, lang_zero};
use common::Gen;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eight_axioms(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (a, b, c) = (g.lang(), g.lang(), g.lang());
        prop_assert_eq!(lang_add(&lang_add(&a, &b), &c), lang_add(&a, &lang_add(&b, &c)));
        prop_assert_eq!(lang_add(&a, &b), lang_add(&b, &a));
        prop_assert_eq!(lang_add(&a, &lang_zero()), a.clone());
        prop_assert_eq!(lang_mul(&lang_mul(&a, &b), &c), lang_mul(&a, &lang_mul(&b, &c)));
        prop_assert_eq!(lang_mul(&a, &lang_one()), a.clone());
        prop_assert_eq!(lang_mul(&lang_one(), &a), a.clone());
        prop_assert_eq!(lang_mul(&a, &lang_add(&b, &c)), lang_add(&lang_mul(&a, &b), &lang_mul(&a, &c)));
        prop_assert_eq!(lang_mul(&lang_add(&a, &b), &c), lang_add(&lang_mul(&a, &c), &lang_mul(&b, &c)));
        prop_assert!(lang_mul(&a, &lang_zero()).is_zero() && lang_mul(&lang_zero(), &a).is_zero());
    }
}
