mod property_suite;

use property_suite::*;

macro_rules! checks {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = property_suite::$name() {
                    panic!("{e}");
                }
            }
        )*

        #[test]
        fn every_check_has_a_test() {
            let names = [$(stringify!($name)),*];
            assert_eq!(names.len(), CHECKS.len());
        }
    };
}

checks!(
    greedy_dominance,
    filter_monotone,
    lambda_argmin_invariant,
    determinism,
    brute_force_checked,
    head_plus_tail,
    simulation_reproducible,
);
