use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use witt_lab::{
    diff, module_action, E1Element, Json, PadicElement, RingContext, VDecomposition, WittVector,
};

/// `(context, level, rng)` for odd `p ∈ {3, 5, 7}`, `d ∈ {1, 2}`, `n ∈ 1..=4`.
fn setting() -> impl Strategy<Value = (Arc<RingContext>, usize, ChaCha20Rng)> {
    (
        prop::sample::select(vec![3u64, 5, 7]),
        1usize..=2,
        1usize..=4,
        any::<u64>(),
    )
        .prop_map(|(p, d, n, seed)| {
            let ctx = RingContext::with_default_polynomial(p, d, 2 * n as u32 + 4).unwrap();
            (ctx, n, ChaCha20Rng::seed_from_u64(seed))
        })
}

fn same(a: &WittVector, b: &WittVector) -> bool {
    a.agrees_with(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn padic_matches_integer_arithmetic(p in prop::sample::select(vec![2u64, 3, 5, 7]), x in any::<i64>(), y in any::<i64>()) {
        let ctx = RingContext::zp(p, 9).unwrap();
        let modulus = BigInt::from(p).pow(9);
        let (a, b) = (PadicElement::from_int(&ctx, x), PadicElement::from_int(&ctx, y));
        let check = |got: PadicElement, want: BigInt| {
            got.eq_at(&PadicElement::from_int(&ctx, want.mod_floor(&modulus)), 9)
        };
        prop_assert!(check(a.add(&b).unwrap(), BigInt::from(x) + y));
        prop_assert!(check(a.sub(&b).unwrap(), BigInt::from(x) - y));
        prop_assert!(check(a.mul(&b).unwrap(), BigInt::from(x) * y));
    }

    #[test]
    fn frobenius_is_a_ring_automorphism((ctx, _, mut rng) in setting()) {
        let a = PadicElement::random(&ctx, &mut rng);
        let b = PadicElement::random(&ctx, &mut rng);
        prop_assert_eq!(a.mul(&b).unwrap().frobenius(), a.frobenius().mul(&b.frobenius()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().frobenius(), a.frobenius().add(&b.frobenius()).unwrap());
        prop_assert_eq!(a.frobenius().frobenius_inv(), a.clone());
        prop_assert_eq!(a.frobenius_pow(ctx.degree() as i64), a);
    }

    #[test]
    fn witt_ring_axioms((ctx, n, mut rng) in setting()) {
        let x = WittVector::random(&ctx, n, &mut rng).unwrap();
        let y = WittVector::random(&ctx, n, &mut rng).unwrap();
        let z = WittVector::random(&ctx, n, &mut rng).unwrap();
        prop_assert!(same(&x.add(&y).unwrap().add(&z).unwrap(), &x.add(&y.add(&z).unwrap()).unwrap()));
        prop_assert!(same(&x.mul(&y).unwrap().mul(&z).unwrap(), &x.mul(&y.mul(&z).unwrap()).unwrap()));
        prop_assert!(same(&x.mul(&y).unwrap(), &y.mul(&x).unwrap()));
        let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
        let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        prop_assert!(x.add(&x.neg().unwrap()).unwrap().is_zero());
        prop_assert!(same(&x.mul(&WittVector::one(&ctx, n).unwrap()).unwrap(), &x));
        prop_assert!(same(&x.pow(3).unwrap(), &x.pow_by_mul(3).unwrap()));
    }

    #[test]
    fn restriction_is_a_ring_map((ctx, n, mut rng) in setting()) {
        let x = WittVector::random(&ctx, n + 1, &mut rng).unwrap();
        let y = WittVector::random(&ctx, n + 1, &mut rng).unwrap();
        let r = |w: &WittVector| w.restrict().unwrap();
        prop_assert!(same(&r(&x.mul(&y).unwrap()), &r(&x).mul(&r(&y)).unwrap()));
        prop_assert!(same(&r(&x.add(&y).unwrap()), &r(&x).add(&r(&y)).unwrap()));
    }

    #[test]
    fn json_round_trips((ctx, n, mut rng) in setting()) {
        let a = PadicElement::random(&ctx, &mut rng);
        prop_assert_eq!(PadicElement::from_json_str(&a.to_json_string()).unwrap(), a);
        let x = WittVector::random(&ctx, n, &mut rng).unwrap();
        let back = WittVector::from_json_str(&x.to_json_string()).unwrap();
        prop_assert_eq!(back.to_json_string(), x.to_json_string());
        let xi = E1Element::random(&ctx, n, &mut rng).unwrap();
        prop_assert_eq!(E1Element::from_json_str(&xi.to_json_string()).unwrap(), xi);
        let dec = x.v_decompose().unwrap();
        let dec_back = VDecomposition::from_json_str(&dec.to_json_string()).unwrap();
        prop_assert!(dec_back.agrees_with(&dec).unwrap());
    }

    #[test]
    fn differential_is_additive_and_linear((ctx, n, mut rng) in setting()) {
        prop_assume!(n >= 2);
        let x = WittVector::random(&ctx, n, &mut rng).unwrap();
        let y = WittVector::random(&ctx, n, &mut rng).unwrap();
        let d = |w: &WittVector| diff(w).unwrap();
        prop_assert_eq!(d(&x.add(&y).unwrap()), d(&x).add(&d(&y)).unwrap());
        let a = PadicElement::random(&ctx, &mut rng);
        let s = WittVector::s_phi(&a, n).unwrap();
        prop_assert_eq!(d(&s), E1Element::zero(&ctx, n).unwrap());
        prop_assert_eq!(d(&s.mul(&x).unwrap()), module_action(&s, &d(&x)).unwrap());
    }
}

#[test]
fn large_moduli_use_the_big_backend() {
    let ctx = RingContext::with_default_polynomial(7, 2, 40).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let x = WittVector::random(&ctx, 3, &mut rng).unwrap();
    let y = WittVector::random(&ctx, 3, &mut rng).unwrap();
    let ghost_product: Vec<_> = x
        .ghost()
        .components()
        .iter()
        .zip(y.ghost().components())
        .map(|(a, b)| a.mul(b).unwrap())
        .collect();
    assert_eq!(x.mul(&y).unwrap().ghost().components(), &ghost_product[..]);
    let text = x.to_json_string();
    assert!(
        text.contains('"'),
        "coefficients above 2^53 serialize as strings"
    );
    assert_eq!(
        WittVector::from_json_str(&text).unwrap().to_json_string(),
        text
    );
}
