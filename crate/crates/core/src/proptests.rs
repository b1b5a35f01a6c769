use crate::counting::{koblitz_count, DeformationFamily};
use crate::ffield::FieldSpec;
use crate::padic::{padic_gamma, teichmuller, PadicInt, RationalInZp};
use crate::weights::{extract_params, landau, landau_by_jumps, WeightSystem};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const FIELDS: [(u64, u32); 6] = [(3, 1), (7, 1), (3, 2), (5, 2), (3, 3), (31, 1)];

fn weight_system() -> impl Strategy<Value = WeightSystem> {
    prop_oneof![
        (2u64..=8).prop_map(WeightSystem::binomial),
        (2u64..=7).prop_map(WeightSystem::dwork),
        Just(WeightSystem::parse("5:1,2:1,3:-2,1:-1").unwrap()),
        Just(WeightSystem::parse("6:1,1:1,3:-1,2:-2").unwrap()),
        Just(WeightSystem::parse("10:1,1:1,5:-1,2:-3").unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dlog_is_a_homomorphism(field in 0usize..FIELDS.len(), a in 1u64..1000, b in 1u64..1000) {
        let (p, f) = FIELDS[field];
        let spec = FieldSpec::new(p, f, None).unwrap();
        let q = spec.order();
        let x = spec.element(1 + a % (q - 1)).unwrap();
        let y = spec.element(1 + b % (q - 1)).unwrap();
        let lhs = spec.dlog(spec.mul(x, y)).unwrap();
        let rhs = (spec.dlog(x).unwrap() + spec.dlog(y).unwrap()) % spec.unit_order();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(spec.exp(lhs as i64), spec.mul(x, y));
    }

    #[test]
    fn landau_two_routes_agree(g in weight_system(), num in 0i64..600, den in 1i64..=60) {
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        let params = extract_params(&g);
        prop_assert_eq!(landau(&g, &x), landau_by_jumps(&params, &x));
    }

    #[test]
    fn padic_ring_laws(p in prop::sample::select(vec![3u64, 5, 7, 11]), k in 1u32..6,
                       a in -10_000i128..10_000, b in -10_000i128..10_000, c in -10_000i128..10_000) {
        let (a, b, c) = (PadicInt::new(p, k, a).unwrap(), PadicInt::new(p, k, b).unwrap(), PadicInt::new(p, k, c).unwrap());
        prop_assert_eq!((a + b) * c, a * c + b * c);
        prop_assert_eq!(a - a, PadicInt::new(p, k, 0).unwrap());
        prop_assert_eq!(a + (-a), PadicInt::new(p, k, 0).unwrap());
        if a.is_unit() {
            prop_assert_eq!(a * a.inv().unwrap(), PadicInt::one(p, k).unwrap());
        }
    }

    #[test]
    fn teichmuller_is_fixed_by_frobenius(p in prop::sample::select(vec![5u64, 7, 13]), k in 1u32..5, x in 1i64..1000) {
        prop_assume!(x as u64 % p != 0);
        let w = teichmuller(p, k, x).unwrap();
        prop_assert_eq!(w.pow(p as i128).unwrap(), w);
        prop_assert_eq!(w.residue() % p, x as u64 % p);
    }

    #[test]
    fn padic_gamma_is_continuous(p in prop::sample::select(vec![3u64, 5, 7]), k in 1u32..4, x in 0i64..150, m in 1i64..4) {
        let pk = (p as i64).pow(k);
        let near = padic_gamma(p, k, RationalInZp::integer(x + m * pk)).unwrap();
        let here = padic_gamma(p, k, RationalInZp::integer(x)).unwrap();
        prop_assert_eq!(near, here);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_fibres_match_enumeration(
        field in prop::sample::select(vec![(7u64, 1u32), (13, 1), (19, 1), (3, 2)]),
        family in 0usize..3,
        lambda in 1u64..1000,
    ) {
        let spec = FieldSpec::new(field.0, field.1, None).unwrap();
        let lambda = (1 + lambda % (spec.order() - 1)) as i64;
        let fam = match family {
            0 => DeformationFamily::zero_dimensional(3, lambda),
            1 => DeformationFamily::dwork(3, lambda),
            _ => DeformationFamily::new(4, vec![1, 1, 2], lambda).unwrap(),
        };
        prop_assume!(spec.unit_order() % fam.d() as u64 == 0);
        let r = koblitz_count(&fam, &spec).unwrap();
        prop_assert!(r.matches(), "{:?}", r);
    }
}
