//! Finite ordered structures, their bitstring encoding, and the tuple and
//! subset enumeration orders.

use std::fmt;

use fixedbitset::FixedBitSet;
use indexmap::IndexMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on `n^l` for enumerating all subsets of `{0..n-1}^l`.
pub const DEFAULT_SUBSET_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe must be non-empty")]
    EmptyUniverse,
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("relation symbol `{0}` must have arity >= 1")]
    ZeroArity(String),
    #[error("invalid relation symbol `{0}`")]
    BadSymbol(String),
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("tuple {tuple:?} does not fit arity {arity} over universe size {n}")]
    BadTuple { tuple: Vec<usize>, arity: usize, n: usize },
    #[error("bitstring has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bitstring contains `{0}`")]
    BadBit(char),
    #[error("enumerating subsets of a {base}-element base exceeds the cap of {cap}")]
    EnumerationCap { base: usize, cap: usize },
    #[error("malformed structure file: {0}")]
    Json(String),
}

/// Ordered list of relation symbols with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    rels: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(rels: impl IntoIterator<Item = (S, usize)>) -> Result<Self, StructureError> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for (name, arity) in rels {
            let name = name.into();
            if !is_relation_name(&name) {
                return Err(StructureError::BadSymbol(name));
            }
            if arity == 0 {
                return Err(StructureError::ZeroArity(name));
            }
            if out.iter().any(|(n, _)| *n == name) {
                return Err(StructureError::DuplicateSymbol(name));
            }
            out.push((name, arity));
        }
        Ok(Signature { rels: out })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.rels.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn len(&self) -> usize {
        self.rels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rels.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.rels.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.rels[i].1)
    }

    pub fn max_arity(&self) -> usize {
        self.rels.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }

    /// Length of `enc` for a structure of size `n` (the empty signature
    /// contributes `0^n`).
    pub fn encoding_len(&self, n: usize) -> usize {
        if self.rels.is_empty() {
            n
        } else {
            self.rels.iter().map(|(_, a)| n.pow(*a as u32)).sum()
        }
    }

    /// Parse `edge:2,p:1`.
    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut rels = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, arity) = part
                .split_once(':')
                .ok_or_else(|| StructureError::BadSymbol(part.to_string()))?;
            let arity = arity
                .trim()
                .parse()
                .map_err(|_| StructureError::BadSymbol(part.to_string()))?;
            rels.push((name.trim().to_string(), arity));
        }
        Signature::new(rels)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rels.iter().map(|(n, a)| format!("{n}:{a}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Relation symbols are lowercase identifiers; uppercase names are reserved
/// for second-order variables.
pub fn is_relation_name(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Position of `t` in the lexicographic order on `{0..n-1}^l`.
pub fn rank(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`rank`].
pub fn unrank(n: usize, l: usize, mut m: usize) -> Vec<usize> {
    let mut t = vec![0; l];
    for slot in t.iter_mut().rev() {
        *slot = m % n;
        m /= n;
    }
    t
}

/// All `l`-tuples over `{0..n-1}` in lexicographic order.
pub fn tuples_lex(n: usize, l: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = n.pow(l as u32);
    (0..count).map(move |m| unrank(n, l, m))
}

/// A set of `arity`-tuples over `{0..n-1}`, stored as a bitset indexed by [`rank`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    arity: usize,
    bits: FixedBitSet,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.tuples()).finish()
    }
}

impl Relation {
    pub fn empty(n: usize, arity: usize) -> Self {
        Relation { n, arity, bits: FixedBitSet::with_capacity(n.pow(arity as u32)) }
    }

    pub fn full(n: usize, arity: usize) -> Self {
        let mut r = Relation::empty(n, arity);
        r.bits.insert_range(..);
        r
    }

    pub fn from_tuples<T: AsRef<[usize]>>(
        n: usize,
        arity: usize,
        tuples: impl IntoIterator<Item = T>,
    ) -> Result<Self, StructureError> {
        let mut r = Relation::empty(n, arity);
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity || t.iter().any(|&a| a >= n) {
                return Err(StructureError::BadTuple { tuple: t.to_vec(), arity, n });
            }
            r.bits.insert(rank(n, t));
        }
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of tuples in `{0..n-1}^arity`.
    pub fn base_size(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.bits.contains(rank(self.n, t))
    }

    pub fn contains_rank(&self, m: usize) -> bool {
        self.bits.contains(m)
    }

    pub fn insert(&mut self, t: &[usize]) {
        self.bits.insert(rank(self.n, t));
    }

    pub fn set_rank(&mut self, m: usize, on: bool) {
        self.bits.set(m, on);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union_with(&mut self, other: &Relation) {
        self.bits.union_with(&other.bits);
    }

    /// Member tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.bits.ones().map(|m| unrank(self.n, self.arity, m))
    }

    /// `enc(R)`: bit `m` is set iff the `m`-th lexicographic tuple is in `R`.
    pub fn encode(&self) -> String {
        (0..self.bits.len()).map(|m| if self.bits.contains(m) { '1' } else { '0' }).collect()
    }

    /// `π(R)`: the position of `R` in the `<*` order.
    ///
    /// `<*` compares two sets at the largest tuple on which they differ, so
    /// `π(R) = Σ_{u∈R} 2^{rank(u)}`.
    pub fn star_index(&self) -> BigUint {
        self.bits.ones().fold(BigUint::zero(), |acc, m| acc | (BigUint::one() << m))
    }

    /// Inverse of [`Relation::star_index`]; `None` if the index is out of range.
    pub fn from_star_index(n: usize, arity: usize, idx: &BigUint) -> Option<Relation> {
        let mut r = Relation::empty(n, arity);
        if idx.bits() > r.bits.len() as u64 {
            return None;
        }
        for m in 0..r.bits.len() {
            r.bits.set(m, idx.bit(m as u64));
        }
        Some(r)
    }

    /// Strict `<*` comparison.
    pub fn star_less(&self, other: &Relation) -> bool {
        let mut diff = self.bits.clone();
        diff.symmetric_difference_with(&other.bits);
        match diff.maximum() {
            Some(top) => other.bits.contains(top),
            None => false,
        }
    }

    /// Step to the `<*`-successor in place. Returns false, leaving the empty
    /// relation, when `self` was the full relation.
    pub fn next_star(&mut self) -> bool {
        for m in 0..self.bits.len() {
            if self.bits.contains(m) {
                self.bits.set(m, false);
            } else {
                self.bits.insert(m);
                return true;
            }
        }
        false
    }

    /// Bitset view, indexed by tuple rank.
    pub fn bitset(&self) -> &FixedBitSet {
        &self.bits
    }
}

/// All subsets of `{0..n-1}^l` in increasing `<*` order.
pub fn subsets_star(n: usize, l: usize, cap: usize) -> Result<impl Iterator<Item = Relation>, StructureError> {
    let base = n.checked_pow(l as u32).unwrap_or(usize::MAX);
    if base > cap || base >= 63 {
        return Err(StructureError::EnumerationCap { base, cap: cap.min(62) });
    }
    Ok((0u64..(1u64 << base)).map(move |idx| {
        let mut r = Relation::empty(n, l);
        for m in 0..base {
            if idx >> m & 1 == 1 {
                r.bits.insert(m);
            }
        }
        r
    }))
}

/// A finite structure over `{0..n-1}` with the natural order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    n: usize,
    sig: Signature,
    rels: Vec<Relation>,
}

/// Value of a free variable, appended to `enc(𝔄)` by [`encode`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeValue {
    Elem(usize),
    Rel(Relation),
}

impl Structure {
    /// A structure with every relation empty.
    pub fn new(n: usize, sig: Signature) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let rels = sig.iter().map(|(_, a)| Relation::empty(n, a)).collect();
        Ok(Structure { n, sig, rels })
    }

    pub fn with_relation<T: AsRef<[usize]>>(
        mut self,
        name: &str,
        tuples: impl IntoIterator<Item = T>,
    ) -> Result<Self, StructureError> {
        let i = self
            .sig
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        self.rels[i] = Relation::from_tuples(self.n, self.sig.rels[i].1, tuples)?;
        Ok(self)
    }

    pub fn set_relation(&mut self, name: &str, rel: Relation) -> Result<(), StructureError> {
        let i = self
            .sig
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        if rel.n != self.n || rel.arity != self.sig.rels[i].1 {
            return Err(StructureError::BadTuple { tuple: vec![], arity: rel.arity, n: rel.n });
        }
        self.rels[i] = rel;
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.sig.index_of(name).map(|i| &self.rels[i])
    }

    pub fn relation_at(&self, i: usize) -> &Relation {
        &self.rels[i]
    }

    /// The successor of `a` in the natural order.
    pub fn succ(&self, a: usize) -> Option<usize> {
        (a + 1 < self.n).then_some(a + 1)
    }

    /// Least element `⊥`.
    pub fn bottom(&self) -> usize {
        0
    }

    /// Greatest element `⊤`.
    pub fn top(&self) -> usize {
        self.n - 1
    }

    /// Every structure over `sig` with universe size `n`.
    pub fn enumerate(sig: &Signature, n: usize) -> Result<Vec<Structure>, StructureError> {
        let total: usize = sig.iter().map(|(_, a)| n.pow(a as u32)).sum();
        if total >= 24 {
            return Err(StructureError::EnumerationCap { base: total, cap: 23 });
        }
        let mut out = Vec::with_capacity(1 << total);
        for code in 0u64..(1u64 << total) {
            let bits: String = (0..total).map(|i| if code >> i & 1 == 1 { '1' } else { '0' }).collect();
            let bits = if sig.is_empty() { "0".repeat(n) } else { bits };
            out.push(decode(&bits, sig, n)?);
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let raw: RawStructure = serde_json::from_str(text).map_err(|e| StructureError::Json(e.to_string()))?;
        let sig = Signature::new(raw.signature.iter().map(|(n, a)| (n.clone(), *a)))?;
        let mut s = Structure::new(raw.universe, sig)?;
        for (name, tuples) in &raw.relations {
            s = s.with_relation(name, tuples)?;
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let raw = RawStructure {
            universe: self.n,
            signature: self.sig.iter().map(|(n, a)| (n.to_string(), a)).collect(),
            relations: self
                .sig
                .iter()
                .zip(&self.rels)
                .map(|((n, _), r)| (n.to_string(), r.tuples().collect()))
                .collect(),
        };
        serde_json::to_string(&raw).expect("structure serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct RawStructure {
    universe: usize,
    #[serde(default)]
    signature: IndexMap<String, usize>,
    #[serde(default)]
    relations: IndexMap<String, Vec<Vec<usize>>>,
}

/// `enc(𝔄)` followed by the encodings of the free values.
///
/// A first-order value `a` is encoded as the unary relation `{a}`.
pub fn encode(a: &Structure, free: &[FreeValue]) -> Result<String, StructureError> {
    let mut out = if a.sig.is_empty() {
        "0".repeat(a.n)
    } else {
        a.rels.iter().map(Relation::encode).collect()
    };
    for v in free {
        match v {
            FreeValue::Elem(e) => {
                out.push_str(&Relation::from_tuples(a.n, 1, [[*e]])?.encode());
            }
            FreeValue::Rel(r) => {
                if r.n != a.n {
                    return Err(StructureError::BadTuple { tuple: vec![], arity: r.arity, n: r.n });
                }
                out.push_str(&r.encode());
            }
        }
    }
    Ok(out)
}

/// Inverse of [`encode`] without free values.
pub fn decode(bits: &str, sig: &Signature, n: usize) -> Result<Structure, StructureError> {
    let mut s = Structure::new(n, sig.clone())?;
    let expected = sig.encoding_len(n);
    let got = bits.chars().count();
    if got != expected {
        return Err(StructureError::LengthMismatch { expected, got });
    }
    if let Some(c) = bits.chars().find(|c| *c != '0' && *c != '1') {
        return Err(StructureError::BadBit(c));
    }
    if sig.is_empty() {
        if bits.contains('1') {
            return Err(StructureError::BadBit('1'));
        }
        return Ok(s);
    }
    let bytes = bits.as_bytes();
    let mut off = 0;
    for (i, (_, arity)) in sig.iter().enumerate() {
        let len = n.pow(arity as u32);
        let mut r = Relation::empty(n, arity);
        for m in 0..len {
            if bytes[off + m] == b'1' {
                r.bits.insert(m);
            }
        }
        s.rels[i] = r;
        off += len;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph_sig() -> Signature {
        Signature::new([("edge", 2)]).unwrap()
    }

    #[test]
    fn encode_examples() {
        let s = Structure::new(2, graph_sig()).unwrap().with_relation("edge", [[0, 1]]).unwrap();
        assert_eq!(encode(&s, &[]).unwrap(), "0100");
        let e = Structure::new(3, Signature::empty()).unwrap();
        assert_eq!(encode(&e, &[]).unwrap(), "000");
        let p = Structure::new(2, Signature::new([("p", 1)]).unwrap())
            .unwrap()
            .with_relation("p", [[0], [1]])
            .unwrap();
        assert_eq!(encode(&p, &[]).unwrap(), "11");
    }

    #[test]
    fn decode_examples() {
        let s = decode("0100", &graph_sig(), 2).unwrap();
        assert!(s.relation("edge").unwrap().contains(&[0, 1]));
        assert_eq!(s.relation("edge").unwrap().len(), 1);
        assert_eq!(encode(&decode("000", &Signature::empty(), 3).unwrap(), &[]).unwrap(), "000");
        assert_eq!(
            decode("010", &graph_sig(), 2),
            Err(StructureError::LengthMismatch { expected: 4, got: 3 })
        );
    }

    #[test]
    fn free_values_append_blocks() {
        let s = Structure::new(3, Signature::empty()).unwrap();
        let x = Relation::from_tuples(3, 2, [[2, 2]]).unwrap();
        let bits = encode(&s, &[FreeValue::Elem(1), FreeValue::Rel(x)]).unwrap();
        assert_eq!(bits, "000010000000001");
    }

    #[test]
    fn tuples_lex_examples() {
        let t: Vec<_> = tuples_lex(2, 2).collect();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples_lex(1, 3).count(), 1);
        assert_eq!(tuples_lex(3, 2).position(|t| t == [1, 2]), Some(5));
    }

    #[test]
    fn star_order_endpoints_and_successors() {
        let all: Vec<Relation> = subsets_star(2, 2, DEFAULT_SUBSET_CAP).unwrap().collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].star_index(), BigUint::zero());
        assert!(all[0].is_empty());
        assert_eq!(all[15], Relation::full(2, 2));
        assert_eq!(all[15].star_index(), BigUint::from(15u32));
        for (i, w) in all.windows(2).enumerate() {
            assert!(w[0].star_less(&w[1]));
            assert!(!w[1].star_less(&w[0]));
            assert_eq!(w[1].star_index(), BigUint::from(i as u32 + 1));
        }
    }

    #[test]
    fn star_order_definition() {
        // X <* Y iff some u in Y \ X has X and Y agreeing above u.
        let all: Vec<Relation> = subsets_star(3, 1, DEFAULT_SUBSET_CAP).unwrap().collect();
        for x in &all {
            for y in &all {
                let by_def = y.tuples().any(|u| {
                    !x.contains(&u) && (u[0] + 1..3).all(|v| x.contains(&[v]) == y.contains(&[v]))
                });
                assert_eq!(x.star_less(y), by_def);
            }
        }
    }

    #[test]
    fn subset_cap() {
        assert!(matches!(
            subsets_star(5, 2, DEFAULT_SUBSET_CAP),
            Err(StructureError::EnumerationCap { base: 25, .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"universe": 3, "signature": {"edge": 2, "p": 1}, "relations": {"edge": [[0,1],[1,0]]}}"#;
        let s = Structure::from_json(text).unwrap();
        assert_eq!(s.signature().to_string(), "edge:2,p:1");
        assert_eq!(Structure::from_json(&s.to_json()).unwrap(), s);
        assert!(Structure::from_json(r#"{"universe": 0}"#).is_err());
        assert!(Structure::from_json(r#"{"universe": 2, "signature": {"e": 1}, "relations": {"e": [[2]]}}"#)
            .is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Structure::enumerate(&graph_sig(), 2).unwrap().len(), 16);
        for n in 1..=3 {
            assert_eq!(Structure::enumerate(&Signature::empty(), n).unwrap().len(), 1);
        }
    }

    fn arb_structure() -> impl Strategy<Value = Structure> {
        (1usize..=4, prop::collection::vec(1usize..=3, 0..3)).prop_flat_map(|(n, arities)| {
            let sig = Signature::new(arities.iter().enumerate().map(|(i, a)| (format!("r{i}"), *a))).unwrap();
            let len = sig.encoding_len(n);
            prop::collection::vec(any::<bool>(), len).prop_map(move |bits| {
                let bits: String = bits.iter().map(|b| if *b && !sig.is_empty() { '1' } else { '0' }).collect();
                decode(&bits, &sig, n).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(s in arb_structure()) {
            let bits = encode(&s, &[]).unwrap();
            prop_assert_eq!(bits.len(), s.signature().encoding_len(s.size()));
            prop_assert_eq!(decode(&bits, s.signature(), s.size()).unwrap(), s);
        }

        #[test]
        fn star_index_inverts(n in 1usize..=3, l in 1usize..=2, seed in any::<u64>()) {
            let base = n.pow(l as u32);
            let idx = BigUint::from(seed % (1u64 << base));
            let r = Relation::from_star_index(n, l, &idx).unwrap();
            prop_assert_eq!(r.star_index(), idx);
        }
    }
}
