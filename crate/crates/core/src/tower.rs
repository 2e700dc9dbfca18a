//! Exact evaluation of power towers `^h(b) mod 10^n` over a base `b = q^E`
//! with `E = 2^x * 5^y * a`.
//!
//! Exponents are reduced down the iterated-Carmichael chain of the modulus.
//! Each level carries a [`CappedExponent`]: the exact exponent while it is
//! below the lift threshold, and its residue otherwise. Above the threshold
//! the exponent `e` is replaced by the least `e' >= threshold` congruent to
//! `e` modulo the next chain entry, which is valid even when `gcd(b, 10) > 1`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::config::max_digits;
use crate::error::{Error, Result};
use crate::modmath::{carmichael, pow10, pow_mod, two_five_exponents, ModulusChain, Word};

/// The tower base `q^(2^x * 5^y * a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TowerBase {
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub a: u64,
}

impl TowerBase {
    pub fn new(q: u64, x: u32, y: u32, a: u64) -> Result<Self> {
        let base = Self { q, x, y, a };
        base.validate()?;
        Ok(base)
    }

    /// Factors the 2-adic and 5-adic parts out of `exponent`.
    pub fn from_exponent(q: u64, exponent: &BigUint) -> Result<Self> {
        if exponent.is_zero() {
            return Err(Error::ZeroExponent);
        }
        let x = exponent.trailing_zeros().unwrap_or(0) as u32;
        let mut rest = exponent >> x;
        let five = BigUint::from(5u32);
        let mut y = 0;
        loop {
            let (quot, rem) = rest.div_rem(&five);
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            y += 1;
        }
        let a = rest.to_u64().ok_or(Error::CofactorTooLarge(rest))?;
        Self::new(q, x, y, a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::BaseTooSmall(self.q));
        }
        if self.q.is_multiple_of(10) {
            return Err(Error::ExcludedBase(self.q));
        }
        if self.a.gcd(&10) != 1 {
            return Err(Error::CofactorNotCoprime(self.a));
        }
        Ok(())
    }

    /// `E = 2^x * 5^y * a`.
    pub fn exponent(&self) -> BigUint {
        (BigUint::from(self.a) << self.x) * BigUint::from(5u32).pow(self.y)
    }

    /// `min(q^E, cap)`.
    fn capped_value(&self, cap: u64) -> u64 {
        let exponent = self.exponent();
        match exponent.to_u64() {
            Some(e) => saturating_pow(self.q, e, cap),
            None => cap,
        }
    }
}

/// A tower of a given height over a [`TowerBase`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerSpec {
    pub base: TowerBase,
    pub height: u64,
}

impl TowerSpec {
    pub fn new(q: u64, x: u32, y: u32, a: u64, height: u64) -> Result<Self> {
        Ok(Self { base: TowerBase::new(q, x, y, a)?, height })
    }
}

/// Exponent as seen by one chain level.
///
/// When `at_least_threshold` is false, `reduced` is the exact exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CappedExponent<W = BigUint> {
    pub reduced: W,
    pub at_least_threshold: bool,
}

/// Outcome of the minimum-stable-height search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationRecord {
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub a: u64,
    pub n: u32,
    pub u_min: u64,
    #[serde(with = "biguint_decimal")]
    pub stable_digits: BigUint,
    /// Height at which the stable residue was read off.
    pub stable_height: u64,
}

impl StabilizationRecord {
    pub fn stable_digits_padded(&self) -> String {
        format_residue(&self.stable_digits, self.n)
    }
}

/// Renders `r` as exactly `n` decimal digits, zero-padded on the left.
pub fn format_residue(r: &BigUint, n: u32) -> String {
    format!("{:0>width$}", r.to_str_radix(10), width = n as usize)
}

fn saturating_pow(base: u64, exp: u64, cap: u64) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc >= cap {
            return cap;
        }
    }
    acc.min(cap)
}

pub(crate) fn check_digits(n: u32) -> Result<()> {
    let cap = max_digits();
    if n == 0 || n > cap {
        return Err(Error::DigitsOutOfRange { n, cap });
    }
    Ok(())
}

struct Level<W> {
    modulus: W,
    base_residue: W,
}

/// Tower evaluator bound to one base and one modulus chain.
struct Evaluator<W> {
    levels: Vec<Level<W>>,
    threshold: u64,
    /// Exact tower values `min(^h(b), threshold)` for `h = 0, 1, ...` up to
    /// and including the first one that reaches the threshold.
    caps: Vec<u64>,
}

impl<W: Word> Evaluator<W> {
    fn new(base: &TowerBase, chain: &[BigUint], threshold: u64) -> Self {
        let exponent = base.exponent();
        let q = BigUint::from(base.q);
        let levels = chain
            .iter()
            .map(|m| Level {
                modulus: W::from_big(m),
                base_residue: W::from_big(&pow_mod(&q, &exponent, m).expect("chain moduli are positive")),
            })
            .collect();
        let b = base.capped_value(threshold);
        let mut caps = vec![1u64.min(threshold)];
        while *caps.last().unwrap() < threshold {
            let next = saturating_pow(b, *caps.last().unwrap(), threshold);
            caps.push(next);
        }
        Self { levels, threshold, caps }
    }

    fn capped(&self, height: u64) -> u64 {
        usize::try_from(height).ok().and_then(|h| self.caps.get(h).copied()).unwrap_or(self.threshold)
    }

    /// First height whose exact value reaches the lift threshold.
    fn saturation_height(&self) -> u64 {
        (self.caps.len() - 1) as u64
    }

    fn exponent_at(&self, level: usize, height: u64) -> CappedExponent<W> {
        let exact = self.capped(height);
        if exact < self.threshold {
            CappedExponent { reduced: W::small(exact), at_least_threshold: false }
        } else {
            CappedExponent { reduced: self.eval(level, height), at_least_threshold: true }
        }
    }

    fn effective(&self, level: usize, exp: CappedExponent<W>) -> W {
        if exp.at_least_threshold {
            exp.reduced.lift(&self.levels[level].modulus, self.threshold)
        } else {
            exp.reduced
        }
    }

    /// `^height(b) mod m_level`. Recursion depth is at most `min(height, chain length)`.
    fn eval(&self, level: usize, height: u64) -> W {
        let Level { modulus, base_residue } = &self.levels[level];
        if modulus.equals_one() {
            return W::small(0);
        }
        if height == 0 {
            return W::small(1);
        }
        let below = self.exponent_at(level + 1, height - 1);
        let e = self.effective(level + 1, below);
        base_residue.pow_mod(&e, modulus)
    }

    /// Residues at level 0 for every height in `0..=max_height`, built bottom-up
    /// one height at a time.
    fn profile(&self, max_height: u64) -> Vec<W> {
        let mut current: Vec<W> =
            self.levels.iter().map(|l| if l.modulus.equals_one() { W::small(0) } else { W::small(1) }).collect();
        let mut out = Vec::with_capacity(max_height as usize + 1);
        out.push(current[0].clone());
        for h in 1..=max_height {
            let below = self.capped(h - 1);
            let saturated = below >= self.threshold;
            let next: Vec<W> = self
                .levels
                .iter()
                .enumerate()
                .map(|(i, level)| {
                    if level.modulus.equals_one() {
                        return W::small(0);
                    }
                    let e = if saturated {
                        current[i + 1].lift(&self.levels[i + 1].modulus, self.threshold)
                    } else {
                        W::small(below)
                    };
                    level.base_residue.pow_mod(&e, &level.modulus)
                })
                .collect();
            current = next;
            out.push(current[0].clone());
        }
        out
    }
}

enum AnyEvaluator {
    Word(Evaluator<u64>),
    Big(Evaluator<BigUint>),
}

impl AnyEvaluator {
    fn new(base: &TowerBase, chain: &[BigUint], threshold: u64) -> Self {
        if chain[0].to_u64().is_some() {
            Self::Word(Evaluator::new(base, chain, threshold))
        } else {
            Self::Big(Evaluator::new(base, chain, threshold))
        }
    }

    fn for_digits(base: &TowerBase, chain: &ModulusChain) -> Self {
        if chain.fits_word() {
            Self::Word(Evaluator::new(base, chain.moduli(), chain.lift_threshold()))
        } else {
            Self::Big(Evaluator::new(base, chain.moduli(), chain.lift_threshold()))
        }
    }

    fn eval(&self, height: u64) -> BigUint {
        match self {
            Self::Word(e) => e.eval(0, height).to_big(),
            Self::Big(e) => e.eval(0, height),
        }
    }

    fn profile(&self, max_height: u64) -> Vec<BigUint> {
        match self {
            Self::Word(e) => e.profile(max_height).iter().map(Word::to_big).collect(),
            Self::Big(e) => e.profile(max_height),
        }
    }

    fn stable_height(&self) -> u64 {
        let (len, sat) = match self {
            Self::Word(e) => (e.levels.len() as u64, e.saturation_height()),
            Self::Big(e) => (e.levels.len() as u64, e.saturation_height()),
        };
        // Level i is constant from height (len - 1 - i) + sat on.
        (len + 1).max(len - 1 + sat)
    }
}

/// `^h(q^E) mod 10^n`, with `^0 = 1`.
pub fn tet_mod(spec: &TowerSpec, n: u32) -> Result<BigUint> {
    spec.base.validate()?;
    check_digits(n)?;
    let chain = ModulusChain::shared(n);
    Ok(AnyEvaluator::for_digits(&spec.base, &chain).eval(spec.height))
}

/// `^h(q^E) mod m` for any modulus `m = 2^i * 5^j`, using that modulus's own
/// Carmichael chain.
pub fn tet_mod_general(spec: &TowerSpec, modulus: &BigUint) -> Result<BigUint> {
    spec.base.validate()?;
    let (i, j) = two_five_exponents(modulus).ok_or_else(|| Error::UnsupportedModulus(modulus.clone()))?;
    let mut chain = vec![modulus.clone()];
    while !chain.last().unwrap().is_one() {
        let next = carmichael(chain.last().unwrap())?;
        chain.push(next);
    }
    let threshold = 4 * u64::from(i.max(j).max(1));
    Ok(AnyEvaluator::new(&spec.base, &chain, threshold).eval(spec.height))
}

/// Height used as `∞`: every taller tower has the same residue mod `10^n`.
///
/// This is `chain_length + 1`, extended by the few extra levels a very small
/// base needs before its exact tower value clears the lift threshold.
pub fn stable_height(base: &TowerBase, n: u32) -> Result<u64> {
    base.validate()?;
    check_digits(n)?;
    let chain = ModulusChain::shared(n);
    Ok(AnyEvaluator::for_digits(base, &chain).stable_height())
}

/// Residue of the infinitely tall tower, `^∞(q^E) mod 10^n`.
pub fn stable_residue(base: &TowerBase, n: u32) -> Result<BigUint> {
    base.validate()?;
    check_digits(n)?;
    let chain = ModulusChain::shared(n);
    let evaluator = AnyEvaluator::for_digits(base, &chain);
    Ok(evaluator.eval(evaluator.stable_height()))
}

/// Residues of every tower height from 0 up to the stable height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightProfile {
    base: TowerBase,
    n: u32,
    residues: Vec<BigUint>,
}

impl HeightProfile {
    pub fn new(base: &TowerBase, n: u32) -> Result<Self> {
        base.validate()?;
        check_digits(n)?;
        let chain = ModulusChain::shared(n);
        let evaluator = AnyEvaluator::for_digits(base, &chain);
        let residues = evaluator.profile(evaluator.stable_height());
        Ok(Self { base: *base, n, residues })
    }

    pub fn base(&self) -> &TowerBase {
        &self.base
    }

    pub fn digits(&self) -> u32 {
        self.n
    }

    /// Residue at height `h` for `h` in `0..=stable_height`.
    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn stable_height(&self) -> u64 {
        (self.residues.len() - 1) as u64
    }

    pub fn stable(&self) -> &BigUint {
        self.residues.last().unwrap()
    }

    /// Minimum stable height for this profile's digit count.
    pub fn record(&self) -> StabilizationRecord {
        self.scan(self.n, self.residues.iter().cloned())
    }

    /// Minimum stable height for the last `n` digits, `n <= self.digits()`.
    ///
    /// Reducing mod `10^n` commutes with the tower, and the profile already
    /// reaches past the stable height of every shorter modulus.
    pub fn project(&self, n: u32) -> Result<StabilizationRecord> {
        if n == 0 || n > self.n {
            return Err(Error::DigitsOutOfRange { n, cap: self.n });
        }
        let m = pow10(n);
        Ok(self.scan(n, self.residues.iter().map(|r| r % &m)))
    }

    fn scan(&self, n: u32, residues: impl DoubleEndedIterator<Item = BigUint>) -> StabilizationRecord {
        let mut rev = residues.rev();
        let stable = rev.next().expect("profile is never empty");
        let top = self.stable_height();
        let unchanged = rev.take_while(|r| *r == stable).count() as u64;
        StabilizationRecord {
            q: self.base.q,
            x: self.base.x,
            y: self.base.y,
            a: self.base.a,
            n,
            u_min: top - unchanged,
            stable_digits: stable,
            stable_height: top,
        }
    }
}

/// Smallest `u >= 0` such that every height from `u` up to the stable height
/// gives the stable residue mod `10^n`.
pub fn min_stable_height(base: &TowerBase, n: u32) -> Result<StabilizationRecord> {
    Ok(HeightProfile::new(base, n)?.record())
}

pub(crate) mod biguint_decimal {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("invalid decimal integer"))
    }
}
