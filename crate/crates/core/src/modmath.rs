//! Exact integer primitives: p-adic valuations, modular powers, the
//! Carmichael function on moduli of the form `2^i * 5^j`, and CRT
//! recombination of residues modulo `2^n` and `5^n`.
//!
//! Every function here is pure. [`ModulusChain`] values are cached per digit
//! count and handed out behind an [`Arc`], so they can be read from any thread.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent of a prime `p` in the factorization of some positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(pub u32);

impl Valuation {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_prime(p: u64) -> Result<()> {
    let composite = p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d));
    if composite {
        return Err(Error::InvalidPrime(p));
    }
    Ok(())
}

/// Largest `k` with `p^k | m`.
pub fn vp(m: u128, p: u64) -> Result<Valuation> {
    check_prime(p)?;
    if m == 0 {
        return Err(Error::ValuationOfZero);
    }
    let p = p as u128;
    let mut m = m;
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    Ok(Valuation(k))
}

/// [`vp`] for arbitrary-width integers.
pub fn vp_big(m: &BigUint, p: u64) -> Result<Valuation> {
    check_prime(p)?;
    if m.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let p = BigUint::from(p);
    let mut m = m.clone();
    let mut k = 0;
    loop {
        let (quot, rem) = m.div_rem(&p);
        if !rem.is_zero() {
            break;
        }
        m = quot;
        k += 1;
    }
    Ok(Valuation(k))
}

/// `b^e mod m`, with `b^0 = 1 mod m`.
pub fn pow_mod(b: &BigUint, e: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::ZeroModulus);
    }
    Ok(b.modpow(e, m))
}

/// Word-sized `b^e mod m` for `m >= 1`, using 128-bit intermediate products.
pub fn pow_mod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut base = (b % m) as u128;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Splits `m` as `2^i * 5^j`, or returns `None` if another prime divides it.
pub fn two_five_exponents(m: &BigUint) -> Option<(u32, u32)> {
    if m.is_zero() {
        return None;
    }
    let i = m.trailing_zeros().unwrap_or(0) as u32;
    let mut rest = m >> i;
    let five = BigUint::from(5u32);
    let mut j = 0;
    loop {
        let (quot, rem) = rest.div_rem(&five);
        if !rem.is_zero() {
            break;
        }
        rest = quot;
        j += 1;
    }
    rest.is_one().then_some((i, j))
}

fn carmichael_prime_power_two(i: u32) -> BigUint {
    match i {
        0 | 1 => BigUint::one(),
        2 => BigUint::from(2u32),
        _ => BigUint::one() << (i - 2),
    }
}

fn carmichael_prime_power_five(j: u32) -> BigUint {
    if j == 0 {
        BigUint::one()
    } else {
        BigUint::from(4u32) * BigUint::from(5u32).pow(j - 1)
    }
}

/// Carmichael's `λ(m)` for `m = 2^i * 5^j`.
///
/// This covers `2^k`, `5^k`, `10^k` and every modulus reachable from `10^k`
/// by iterating `λ`.
pub fn carmichael(m: &BigUint) -> Result<BigUint> {
    let (i, j) = two_five_exponents(m).ok_or_else(|| Error::UnsupportedModulus(m.clone()))?;
    Ok(carmichael_prime_power_two(i).lcm(&carmichael_prime_power_five(j)))
}

/// `10^n`.
pub fn pow10(n: u32) -> BigUint {
    BigUint::from(10u32).pow(n)
}

/// The unique `r` in `[0, 10^n)` with `r ≡ r2 (mod 2^n)` and `r ≡ r5 (mod 5^n)`.
pub fn crt_combine(r2: &BigUint, r5: &BigUint, n: u32) -> Result<BigUint> {
    let two_part = BigUint::one() << n;
    let five_part = BigUint::from(5u32).pow(n);
    for (residue, modulus) in [(r2, &two_part), (r5, &five_part)] {
        if residue >= modulus {
            return Err(Error::ResidueOutOfRange { residue: residue.clone(), modulus: modulus.clone() });
        }
    }
    // r = r2 + 2^n * t, where t = (r5 - r2) * (2^n)^-1 mod 5^n
    let inv = (&two_part % &five_part).modinv(&five_part).expect("2^n is a unit modulo 5^n");
    let diff = (r5 + &five_part - (r2 % &five_part)) % &five_part;
    let t = diff * inv % &five_part;
    Ok(r2 + two_part * t)
}

/// `10^n` together with its CRT split and the iterated-Carmichael chain
/// `10^n, λ(10^n), λ(λ(10^n)), ..., 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusChain {
    n: u32,
    two_part: BigUint,
    five_part: BigUint,
    chain: Vec<BigUint>,
}

impl ModulusChain {
    pub fn new(n: u32) -> Self {
        let two_part = BigUint::one() << n;
        let five_part = BigUint::from(5u32).pow(n);
        let mut chain = vec![&two_part * &five_part];
        while !chain.last().unwrap().is_one() {
            let next = carmichael(chain.last().unwrap()).expect("chain stays within 2^i * 5^j");
            chain.push(next);
        }
        Self { n, two_part, five_part, chain }
    }

    /// Shared, lazily built chain for `10^n`.
    pub fn shared(n: u32) -> Arc<Self> {
        static CACHE: OnceLock<RwLock<HashMap<u32, Arc<ModulusChain>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(found) = cache.read().unwrap().get(&n) {
            return Arc::clone(found);
        }
        let built = Arc::new(Self::new(n));
        Arc::clone(cache.write().unwrap().entry(n).or_insert(built))
    }

    pub fn digits(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &BigUint {
        &self.chain[0]
    }

    pub fn two_part(&self) -> &BigUint {
        &self.two_part
    }

    pub fn five_part(&self) -> &BigUint {
        &self.five_part
    }

    pub fn moduli(&self) -> &[BigUint] {
        &self.chain
    }

    /// Number of chain entries, counting both `10^n` and the final `1`.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent size above which `b^e mod m_i` depends only on `e mod m_{i+1}`
    /// for every level `i`, whatever `b` is.
    pub fn lift_threshold(&self) -> u64 {
        4 * u64::from(self.n)
    }

    /// Largest prime exponent among the chain moduli; the lift rule is valid
    /// for exponents at least this large.
    pub fn max_prime_exponent(&self) -> u32 {
        self.chain
            .iter()
            .map(|m| {
                let (i, j) = two_five_exponents(m).expect("chain moduli are 2^i * 5^j");
                i.max(j)
            })
            .max()
            .unwrap_or(0)
    }

    /// True when `10^n` fits a machine word with room for 128-bit products.
    pub(crate) fn fits_word(&self) -> bool {
        self.chain[0].to_u64().is_some()
    }
}

/// Integer representation used by the tower evaluator.
///
/// `u64` serves moduli up to `10^19`; `BigUint` covers everything else.
pub(crate) trait Word: Clone + PartialEq + Send + Sync + fmt::Debug + 'static {
    fn from_big(v: &BigUint) -> Self;
    fn to_big(&self) -> BigUint;
    fn small(v: u64) -> Self;
    fn equals_one(&self) -> bool;
    fn pow_mod(&self, e: &Self, m: &Self) -> Self;
    /// Smallest `e >= threshold` with `e ≡ self (mod modulus)`; `self < modulus`.
    fn lift(&self, modulus: &Self, threshold: u64) -> Self;
}

impl Word for u64 {
    fn from_big(v: &BigUint) -> Self {
        v.to_u64().expect("value fits in a machine word")
    }

    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn small(v: u64) -> Self {
        v
    }

    fn equals_one(&self) -> bool {
        *self == 1
    }

    fn pow_mod(&self, e: &Self, m: &Self) -> Self {
        pow_mod_u64(*self, *e, *m)
    }

    fn lift(&self, modulus: &Self, threshold: u64) -> Self {
        if *self >= threshold {
            return *self;
        }
        let steps = (threshold - self).div_ceil(*modulus);
        self + steps * modulus
    }
}

impl Word for BigUint {
    fn from_big(v: &BigUint) -> Self {
        v.clone()
    }

    fn to_big(&self) -> BigUint {
        self.clone()
    }

    fn small(v: u64) -> Self {
        BigUint::from(v)
    }

    fn equals_one(&self) -> bool {
        One::is_one(self)
    }

    fn pow_mod(&self, e: &Self, m: &Self) -> Self {
        self.modpow(e, m)
    }

    fn lift(&self, modulus: &Self, threshold: u64) -> Self {
        let threshold = BigUint::from(threshold);
        if *self >= threshold {
            return self.clone();
        }
        let steps = (&threshold - self).div_ceil(modulus);
        self + steps * modulus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn brute_carmichael(m: u64) -> u64 {
        let units: Vec<u64> = (1..=m).filter(|u| u.gcd(&m) == 1).map(|u| u % m).collect();
        units.iter().map(|&u| (1..).find(|&k| pow_mod_u64(u, k, m) == 1 % m).unwrap()).max().unwrap_or(1)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(4600, 2).unwrap(), Valuation(3));
        assert_eq!(vp(1250, 5).unwrap(), Valuation(4));
        assert_eq!(vp(7, 2).unwrap(), Valuation(0));
        assert_eq!(vp(1, 5).unwrap(), Valuation(0));
        assert_eq!(vp_big(&big(4600), 2).unwrap(), Valuation(3));
    }

    #[test]
    fn valuation_errors() {
        assert_eq!(vp(0, 2), Err(Error::ValuationOfZero));
        assert_eq!(vp_big(&BigUint::zero(), 5), Err(Error::ValuationOfZero));
        assert_eq!(vp(12, 4), Err(Error::InvalidPrime(4)));
        assert_eq!(vp(12, 1), Err(Error::InvalidPrime(1)));
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(&big(3), &big(3), &big(10_000)).unwrap(), big(27));
        // 3^27 = 7625597484987
        assert_eq!(pow_mod(&big(3), &big(27), &big(10_000)).unwrap(), big(4987));
        assert_eq!(pow_mod(&big(7), &big(0), &big(13)).unwrap(), big(1));
        assert_eq!(pow_mod(&big(7), &big(0), &big(1)).unwrap(), big(0));
        assert_eq!(pow_mod(&big(7), &big(2), &BigUint::zero()), Err(Error::ZeroModulus));
        assert_eq!(pow_mod_u64(3, 27, 10_000), 4987);
    }

    #[test]
    fn carmichael_examples() {
        assert_eq!(brute_carmichael(10), 4);
        assert_eq!(brute_carmichael(8), 2);
        assert_eq!(carmichael(&big(10)).unwrap(), big(4));
        assert_eq!(carmichael(&big(8)).unwrap(), big(2));
        assert_eq!(carmichael(&big(1)).unwrap(), big(1));
        assert!(matches!(carmichael(&big(12)), Err(Error::UnsupportedModulus(_))));
        assert!(matches!(carmichael(&BigUint::zero()), Err(Error::UnsupportedModulus(_))));
    }

    #[test]
    fn carmichael_matches_brute_force() {
        for j in 0..=6u32 {
            // 10^5 and 10^6 are out of reach for the order-by-iteration oracle
            let mut moduli = vec![2u64.pow(j), 5u64.pow(j)];
            if j <= 4 {
                moduli.push(10u64.pow(j));
            }
            for m in moduli {
                assert_eq!(carmichael(&big(m)).unwrap(), big(brute_carmichael(m)), "m = {m}");
            }
        }
        for j in 3..=20u32 {
            assert_eq!(carmichael(&big(1 << j)).unwrap(), big(1 << (j - 2)));
        }
        for j in 1..=12u32 {
            assert_eq!(carmichael(&big(5u64.pow(j))).unwrap(), big(4 * 5u64.pow(j - 1)));
        }
        // mixed moduli that appear inside chains
        for m in [20u64, 40, 100, 500, 2500, 12500, 62500] {
            assert_eq!(carmichael(&big(m)).unwrap(), big(brute_carmichael(m)), "m = {m}");
        }
    }

    #[test]
    fn crt_examples() {
        // enumeration of 0..100 / 0..1000
        let r = (0..100u64).find(|r| r % 4 == 1 && r % 25 == 2).unwrap();
        assert_eq!(r, 77);
        assert_eq!(crt_combine(&big(1), &big(2), 2).unwrap(), big(77));
        assert_eq!(crt_combine(&big(0), &big(0), 1).unwrap(), big(0));
        let r = (0..1000u64).find(|r| r % 8 == 3 && r % 125 == 117).unwrap();
        assert_eq!(crt_combine(&big(3), &big(117), 3).unwrap(), big(r));
    }

    #[test]
    fn crt_rejects_out_of_range() {
        assert!(matches!(crt_combine(&big(4), &big(0), 2), Err(Error::ResidueOutOfRange { .. })));
        assert!(matches!(crt_combine(&big(0), &big(25), 2), Err(Error::ResidueOutOfRange { .. })));
    }

    #[test]
    fn crt_exhaustive_small() {
        for n in 1..=3u32 {
            let two = 1u64 << n;
            let five = 5u64.pow(n);
            for r in 0..10u64.pow(n) {
                assert_eq!(crt_combine(&big(r % two), &big(r % five), n).unwrap(), big(r));
            }
        }
    }

    #[test]
    fn chain_shape() {
        let chain = ModulusChain::new(1);
        assert_eq!(chain.moduli(), &[big(10), big(4), big(2), big(1)]);
        assert_eq!(chain.len(), 4);
        let chain = ModulusChain::new(3);
        assert_eq!(chain.moduli(), &[big(1000), big(100), big(20), big(4), big(2), big(1)]);
        for n in 1..=60 {
            let chain = ModulusChain::new(n);
            assert_eq!(chain.modulus(), &pow10(n));
            assert_eq!(&(chain.two_part() * chain.five_part()), chain.modulus());
            assert!(chain.two_part().gcd(chain.five_part()).is_one());
            assert!(chain.moduli().last().unwrap().is_one());
            assert!(chain.moduli().windows(2).all(|w| w[1] < w[0]));
            for w in chain.moduli().windows(2) {
                assert_eq!(carmichael(&w[0]).unwrap(), w[1]);
            }
            assert!(u64::from(chain.max_prime_exponent()) <= chain.lift_threshold());
        }
    }

    #[test]
    fn shared_chain_is_cached() {
        let a = ModulusChain::shared(7);
        let b = ModulusChain::shared(7);
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn word_lift() {
        assert_eq!(3u64.lift(&4, 12), 15);
        assert_eq!(0u64.lift(&1, 4), 4);
        assert_eq!(13u64.lift(&20, 12), 13);
        assert_eq!(big(3).lift(&big(4), 12), big(15));
        assert_eq!(big(0).lift(&big(2), 5), big(6));
    }
}
