//! F-sets against direct matrix powers.

mod support;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

use sarith::lrs::PowersClosedSet;
use sarith::sarith::{AmbientGroup, GrouplessSArithSet};
use support::{check_fset, common_base_sequence, rng, split_matrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn frobenius_orbits_match_the_converted_set(seed in any::<u64>()) {
        let mut r = rng(seed);
        let phi = split_matrix(&mut r);
        prop_assert_eq!(check_fset(&phi, &mut r), Ok(()));
    }

    #[test]
    fn translation_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let amb = AmbientGroup::free(2);
        let mut v = || amb.free_element(vec![BigInt::from(r.gen_range(-5..=5)), BigInt::from(r.gen_range(-5..=5))]).unwrap();
        let (offset, p, delta) = (v(), v(), v());
        let seq = common_base_sequence(&mut r, 2);
        let s = PowersClosedSet::new(vec![BigInt::from(2), BigInt::from(-2)]).unwrap();
        let u = GrouplessSArithSet::new(amb.clone(), offset, vec![(p, seq)], s).unwrap();
        let moved = u.translate(&delta).unwrap();
        for n in 1..=10 {
            prop_assert_eq!(moved.evaluate(&[n]).unwrap(), amb.add(&u.evaluate(&[n]).unwrap(), &delta));
        }
        prop_assert_eq!(moved.translate(&amb.neg(&delta)).unwrap(), u);
    }
}
