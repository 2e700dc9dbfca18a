//! Property checks shared by the `properties` and `acceptance` targets.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use towerdigits::conjecture::{discriminants, predict, CaseTag, Variant};
use towerdigits::modmath::{crt_combine, pow10, pow_mod, vp, ModulusChain};
use towerdigits::tower::{
    min_stable_height, stable_height, stable_residue, tet_mod, tet_mod_general, HeightProfile, TowerBase, TowerSpec,
};
use towerdigits::verify::{sweep, verify_cell, SweepConfig};

pub type Check = fn() -> Result<(), String>;

/// Every suite, grouped by module, in reporting order.
pub const SUITES: &[(&str, &str, Check)] = &[
    ("modmath", "valuation strips exactly the prime power", valuation_strips_prime_power),
    ("modmath", "CRT round trip for n <= 6", crt_round_trip),
    ("modmath", "pow_mod matches plain powers", pow_mod_matches_plain_power),
    ("tower", "projection compatibility", projection_is_compatible),
    ("tower", "CRT consistency of prime-power parts", prime_power_parts_recombine),
    ("tower", "stabilization by the chain-length bound", towers_stop_changing),
    ("tower", "direct bignum equivalence on tiny towers", agrees_with_direct_bignum_towers),
    ("tower", "oracle monotonicity in n", minimum_height_is_monotone),
    ("conjecture", "a-independence of predict", prediction_ignores_cofactor),
    ("conjecture", "discriminant-class invariance of predict", prediction_depends_on_class_only),
    ("verify", "sweep determinism", sweep_is_deterministic),
    ("verify", "sweep order independence", sweep_is_order_independent),
];

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    TestRunner::new(Config::with_cases(cases)).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn base_strategy(max_q: u64) -> impl Strategy<Value = TowerBase> {
    (2..=max_q, 0u32..=4, 0u32..=2, prop::sample::select(vec![1u64, 3, 7, 9, 11, 13]))
        .prop_filter("q = 10h is excluded", |(q, ..)| q % 10 != 0)
        .prop_map(|(q, x, y, a)| TowerBase::new(q, x, y, a).unwrap())
}

/// `^h(b)` as an exact integer, or `None` once it is too large to hold.
pub fn exact_tower(b: &BigUint, h: u32) -> Option<BigUint> {
    let mut t = BigUint::one();
    for _ in 0..h {
        let e = t.to_u32()?;
        if u64::from(e) * b.bits() > 1 << 20 {
            return None;
        }
        t = b.pow(e);
    }
    Some(t)
}

pub fn valuation_strips_prime_power() -> Result<(), String> {
    let primes = prop::sample::select(vec![2u64, 3, 5, 7, 11]);
    check(256, (1u128..=u128::from(u64::MAX), primes), |(m, p)| {
        let v = vp(m, p).unwrap().value();
        let pv = u128::from(p).pow(v);
        prop_assert_eq!(m % pv, 0);
        prop_assert_ne!((m / pv) % u128::from(p), 0);
        Ok(())
    })
}

pub fn crt_round_trip() -> Result<(), String> {
    check(256, (1u32..=6, any::<u64>()), |(n, seed)| {
        let r = seed % 10u64.pow(n);
        let (r2, r5) = (r % (1 << n), r % 5u64.pow(n));
        prop_assert_eq!(crt_combine(&BigUint::from(r2), &BigUint::from(r5), n).unwrap(), BigUint::from(r));
        Ok(())
    })
}

pub fn pow_mod_matches_plain_power() -> Result<(), String> {
    check(256, (0u32..=30, 0u32..=30, 1u64..=100_000), |(b, e, m)| {
        let m = BigUint::from(m);
        let expected = BigUint::from(b).pow(e) % &m;
        prop_assert_eq!(pow_mod(&BigUint::from(b), &BigUint::from(e), &m).unwrap(), expected);
        Ok(())
    })
}

pub fn projection_is_compatible() -> Result<(), String> {
    check(96, (base_strategy(400), 0u64..=8, 1u32..=24, 1u32..=24), |(base, h, n, k)| {
        let k = k.min(n);
        let spec = TowerSpec { base, height: h };
        prop_assert_eq!(tet_mod(&spec, n).unwrap() % pow10(k), tet_mod(&spec, k).unwrap());
        Ok(())
    })
}

pub fn prime_power_parts_recombine() -> Result<(), String> {
    check(96, (base_strategy(400), 0u64..=8, 1u32..=24), |(base, h, n)| {
        let spec = TowerSpec { base, height: h };
        let two = BigUint::one() << n;
        let five = BigUint::from(5u32).pow(n);
        let r2 = tet_mod_general(&spec, &two).unwrap();
        let r5 = tet_mod_general(&spec, &five).unwrap();
        let full = tet_mod(&spec, n).unwrap();
        prop_assert_eq!(&full % &two, r2.clone());
        prop_assert_eq!(&full % &five, r5.clone());
        prop_assert_eq!(crt_combine(&r2, &r5, n).unwrap(), full);
        Ok(())
    })
}

pub fn towers_stop_changing() -> Result<(), String> {
    check(96, (base_strategy(60), 1u32..=14), |(base, n)| {
        let chain_len = ModulusChain::new(n).len() as u64;
        let top = stable_height(&base, n).unwrap();
        prop_assert!(top > chain_len);
        let stable = stable_residue(&base, n).unwrap();
        for h in top..=top.max(chain_len) + 5 {
            prop_assert_eq!(tet_mod(&TowerSpec { base, height: h }, n).unwrap(), stable.clone(), "height {}", h);
        }
        Ok(())
    })
}

/// Independent oracle: build the tower exactly, then reduce once.
pub fn agrees_with_direct_bignum_towers() -> Result<(), String> {
    check(128, (2u64..=7, 1u64..=8, 0u32..=3, 1u32..=6), |(q, e, h, n)| {
        let base = TowerBase::from_exponent(q, &BigUint::from(e)).unwrap();
        let b = BigUint::from(q).pow(e as u32);
        let m = pow10(n);
        let direct = if h == 0 {
            BigUint::one() % &m
        } else {
            let Some(below) = exact_tower(&b, h - 1) else { return Ok(()) };
            b.modpow(&below, &m)
        };
        prop_assert_eq!(tet_mod(&TowerSpec { base, height: u64::from(h) }, n).unwrap(), direct);
        Ok(())
    })
}

pub fn minimum_height_is_monotone() -> Result<(), String> {
    check(96, (base_strategy(300), 2u32..=20), |(base, n)| {
        let profile = HeightProfile::new(&base, n).unwrap();
        let mut previous = 0;
        for k in 1..=n {
            let u = profile.project(k).unwrap().u_min;
            prop_assert!(u >= previous, "u dropped from {} to {} at n = {}", previous, u, k);
            previous = u;
        }
        prop_assert_eq!(previous, min_stable_height(&base, n).unwrap().u_min);
        Ok(())
    })
}

pub fn prediction_ignores_cofactor() -> Result<(), String> {
    let cofactors = prop::sample::select(vec![3u64, 7, 9, 11, 13, 17]);
    check(96, (2u64..=2000, 0u32..=6, 0u32..=4, 1u32..=12, cofactors), |(q, x, y, n, a)| {
        prop_assume!(q % 10 != 0);
        let one = verify_cell(q, x, y, 1, n, Variant::default()).unwrap();
        let other = verify_cell(q, x, y, a, n, Variant::default()).unwrap();
        prop_assert_eq!(one.predicted_u_as_written, other.predicted_u_as_written);
        prop_assert_eq!(one.predicted_u_example, other.predicted_u_example);
        Ok(())
    })
}

pub fn prediction_depends_on_class_only() -> Result<(), String> {
    check(256, (2u64..=100_000, 1u64..=50, 2u32..=8, 0u32..=6, 1u32..=60), |(q, t, x, y, n)| {
        prop_assume!(q % 10 != 0);
        let d = discriminants(q).unwrap();
        prop_assume!(d.delta2.value() < 8 && d.delta5.value() < 6 && d.gamma5.value() < 6);
        // q and q' agree mod 2^10 * 5^8, so all four valuations coincide
        let shifted = q + t * (1 << 10) * 5u64.pow(8);
        prop_assert_eq!(discriminants(shifted).unwrap(), d);
        prop_assert_eq!(CaseTag::of(shifted), CaseTag::of(q));
        for v in Variant::BOTH {
            prop_assert_eq!(predict(q, x, y, n, v).unwrap().u, predict(shifted, x, y, n, v).unwrap().u);
        }
        Ok(())
    })
}

pub fn small_sweep(parallel: bool) -> SweepConfig {
    SweepConfig {
        q: (2..=60).collect(),
        x: vec![0, 1, 2, 3],
        y: vec![0, 1],
        a: vec![1, 3],
        n: (1..=10).collect(),
        variant: Variant::default(),
        parallel,
    }
}

pub fn sweep_is_deterministic() -> Result<(), String> {
    let first = serde_json::to_string(&sweep(&small_sweep(true)).unwrap()).unwrap();
    let second = serde_json::to_string(&sweep(&small_sweep(true)).unwrap()).unwrap();
    if first != second {
        return Err("two runs serialized differently".into());
    }
    Ok(())
}

pub fn sweep_is_order_independent() -> Result<(), String> {
    let parallel = serde_json::to_vec(&sweep(&small_sweep(true)).unwrap()).unwrap();
    let serial = serde_json::to_vec(&sweep(&small_sweep(false)).unwrap()).unwrap();
    if parallel != serial {
        return Err("parallel and serial reports differ".into());
    }
    Ok(())
}
