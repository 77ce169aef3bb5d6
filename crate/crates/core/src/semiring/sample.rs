//! Random values for law checking and randomized tests.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::Rng;

use super::{Kind, Semiring, Value};

fn small_rat<R: Rng + ?Sized>(rng: &mut R, max_num: i64) -> BigRational {
    let d = rng.gen_range(1..=4i64);
    BigRational::new(BigInt::from(rng.gen_range(0..=max_num)), BigInt::from(d))
}

fn word<R: Rng + ?Sized>(rng: &mut R, letters: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
}

fn letters(alphabet: &Option<BTreeSet<char>>) -> Vec<char> {
    match alphabet {
        Some(a) => a.iter().copied().take(3).collect(),
        None => vec!['a', 'b'],
    }
}

impl Semiring {
    /// Draw a random element, biased towards small values and the units.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        if rng.gen_bool(0.1) {
            return self.zero();
        }
        if rng.gen_bool(0.1) {
            return self.one();
        }
        let infinite = rng.gen_bool(0.15);
        match &self.kind {
            Kind::Bool => Value::Bool(rng.gen()),
            Kind::Nat => Value::Nat(if rng.gen_bool(0.1) {
                BigUint::from(rng.gen::<u64>()) * BigUint::from(rng.gen::<u64>())
            } else {
                BigUint::from(rng.gen_range(0..8u32))
            }),
            Kind::NatInf => {
                Value::ExtNat((!infinite).then(|| BigUint::from(rng.gen_range(0..8u32))))
            }
            Kind::Int => Value::Int(BigInt::from(rng.gen_range(-8..8i64))),
            Kind::IntMod(q) => Value::Residue(rng.gen_range(0..*q)),
            Kind::Rat => {
                let r = small_rat(rng, 8);
                Value::Rat(if rng.gen() { -r } else { r })
            }
            Kind::TnormProduct => {
                let d = rng.gen_range(1..=6i64);
                Value::Rat(BigRational::new(BigInt::from(rng.gen_range(0..=d)), BigInt::from(d)))
            }
            Kind::Arctic => Value::MaxPlus((!infinite).then(|| small_rat(rng, 8))),
            Kind::Trop => Value::MinPlus((!infinite).then(|| small_rat(rng, 8))),
            Kind::NatMax => Value::MaxPlus(
                (!infinite).then(|| BigRational::from_integer(BigInt::from(rng.gen_range(0..8)))),
            ),
            Kind::NatMin => Value::MinPlus(
                (!infinite).then(|| BigRational::from_integer(BigInt::from(rng.gen_range(0..8)))),
            ),
            Kind::Langs(a) => {
                let ls = letters(a);
                let k = rng.gen_range(0..=3);
                Value::Lang((0..k).map(|_| word(rng, &ls, 2)).collect())
            }
            Kind::Multiset(a) => {
                let ls = letters(a);
                let k = rng.gen_range(0..=3);
                let mut m: BTreeMap<String, BigUint> = BTreeMap::new();
                for _ in 0..k {
                    *m.entry(word(rng, &ls, 2)).or_default() += BigUint::from(rng.gen_range(1..4u32));
                }
                Value::Multiset(m)
            }
            Kind::RadixMax => Value::RadixMax((!infinite).then(|| word(rng, &['0', '1'], 3))),
            Kind::RadixMin => Value::RadixMin((!infinite).then(|| word(rng, &['0', '1'], 3))),
        }
    }
}
