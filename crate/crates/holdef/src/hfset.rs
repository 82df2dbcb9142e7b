//! Hereditarily finite sets with a canonical encoding.
//!
//! A set is a sorted, duplicate-free vector of its elements, so structural
//! equality is extensional equality and every set has exactly one
//! representation. The order is total: smaller cardinality first, then
//! lexicographic on the (already sorted) elements. Functions are Kuratowski
//! pair graphs; `funspace`, `abstract_graph` and `apply` give enough of a
//! set-theoretic universe to interpret ground higher-order terms.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("applied a set with no pair for the argument {arg}")]
    OutsideDomain { arg: String },
    #[error("applied a set that is not a function graph")]
    NotAFunction,
    #[error("carrier of size {size} exceeds the cap of {cap}")]
    CarrierTooBig { size: u128, cap: usize },
}

/// A hereditarily finite set in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HFSet {
    elems: Vec<HFSet>,
}

impl PartialOrd for HFSet {
    fn partial_cmp(&self, other: &HFSet) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HFSet {
    fn cmp(&self, other: &HFSet) -> Ordering {
        // Cardinality first, then lexicographic on sorted elements.
        self.elems
            .len()
            .cmp(&other.elems.len())
            .then_with(|| self.elems.cmp(&other.elems))
    }
}

impl HFSet {
    pub fn empty() -> HFSet {
        HFSet { elems: vec![] }
    }

    pub fn from_elems(mut elems: Vec<HFSet>) -> HFSet {
        elems.sort();
        elems.dedup();
        HFSet { elems }
    }

    pub fn singleton(x: HFSet) -> HFSet {
        HFSet { elems: vec![x] }
    }

    /// Unordered pair.
    pub fn upair(a: HFSet, b: HFSet) -> HFSet {
        HFSet::from_elems(vec![a, b])
    }

    /// Kuratowski ordered pair {{a}, {a, b}}.
    pub fn kpair(a: HFSet, b: HFSet) -> HFSet {
        HFSet::from_elems(vec![
            HFSet::singleton(a.clone()),
            HFSet::upair(a, b),
        ])
    }

    /// Inverse of `kpair`, when the set has that shape.
    pub fn dest_kpair(&self) -> Option<(HFSet, HFSet)> {
        match self.elems.len() {
            1 => {
                // {{a}} encodes (a, a).
                let inner = &self.elems[0];
                if inner.elems.len() == 1 {
                    let a = inner.elems[0].clone();
                    Some((a.clone(), a))
                } else {
                    None
                }
            }
            2 => {
                let (s, d) = (&self.elems[0], &self.elems[1]);
                // Canonical order puts the singleton {a} before {a, b}.
                if s.elems.len() != 1 || d.elems.len() != 2 {
                    return None;
                }
                let a = s.elems[0].clone();
                if !d.mem(&a) {
                    return None;
                }
                let b = d.elems.iter().find(|x| **x != a)?.clone();
                Some((a, b))
            }
            _ => None,
        }
    }

    pub fn mem(&self, x: &HFSet) -> bool {
        self.elems.binary_search(x).is_ok()
    }

    pub fn card(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[HFSet] {
        &self.elems
    }

    /// The least element in the canonical order, for inhabited sets.
    pub fn least(&self) -> Option<&HFSet> {
        self.elems.first()
    }

    pub fn fls() -> HFSet {
        HFSet::empty()
    }

    pub fn tru() -> HFSet {
        HFSet::singleton(HFSet::empty())
    }

    pub fn boolean(b: bool) -> HFSet {
        if b {
            HFSet::tru()
        } else {
            HFSet::fls()
        }
    }

    /// {false, true}; false is its least element.
    pub fn boolset() -> HFSet {
        HFSet::from_elems(vec![HFSet::fls(), HFSet::tru()])
    }

    /// A fixed singleton, used as the default denotation of declared types.
    pub fn one() -> HFSet {
        HFSet::singleton(HFSet::empty())
    }

    /// All total function graphs from `dom` to `rng`. The result has
    /// |rng|^|dom| elements, checked against `cap` before construction.
    pub fn funspace(dom: &HFSet, rng: &HFSet, cap: usize) -> Result<HFSet, SetError> {
        let size = (rng.card() as u128)
            .checked_pow(dom.card() as u32)
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(SetError::CarrierTooBig { size, cap });
        }
        if dom.is_empty() {
            return Ok(HFSet::singleton(HFSet::empty()));
        }
        if rng.is_empty() {
            return Ok(HFSet::empty());
        }
        let mut graphs = Vec::with_capacity(size as usize);
        let mut picks = vec![0usize; dom.card()];
        loop {
            let graph = HFSet::from_elems(
                dom.elems
                    .iter()
                    .zip(&picks)
                    .map(|(x, &i)| HFSet::kpair(x.clone(), rng.elems[i].clone()))
                    .collect(),
            );
            graphs.push(graph);
            let mut pos = 0;
            loop {
                if pos == picks.len() {
                    return Ok(HFSet::from_elems(graphs));
                }
                picks[pos] += 1;
                if picks[pos] < rng.card() {
                    break;
                }
                picks[pos] = 0;
                pos += 1;
            }
        }
    }

    /// The graph of `f` over all of `dom`, for callers whose images are
    /// in range by construction. Unlike `abstract_graph` no range set is
    /// materialized, so the ambient function space may exceed any cap.
    pub fn graph<E>(
        dom: &HFSet,
        mut f: impl FnMut(&HFSet) -> Result<HFSet, E>,
    ) -> Result<HFSet, E> {
        let mut pairs = Vec::with_capacity(dom.card());
        for x in &dom.elems {
            pairs.push(HFSet::kpair(x.clone(), f(x)?));
        }
        Ok(HFSet::from_elems(pairs))
    }

    /// The graph of `f` restricted to `dom` x `rng`: pairs whose image
    /// falls outside `rng` are dropped.
    pub fn abstract_graph<E>(
        dom: &HFSet,
        rng: &HFSet,
        mut f: impl FnMut(&HFSet) -> Result<HFSet, E>,
    ) -> Result<HFSet, E> {
        let mut pairs = Vec::with_capacity(dom.card());
        for x in &dom.elems {
            let y = f(x)?;
            if rng.mem(&y) {
                pairs.push(HFSet::kpair(x.clone(), y));
            }
        }
        Ok(HFSet::from_elems(pairs))
    }

    /// Function application on pair graphs.
    pub fn apply(&self, x: &HFSet) -> Result<HFSet, SetError> {
        let mut hit: Option<HFSet> = None;
        for e in &self.elems {
            let (a, b) = e.dest_kpair().ok_or(SetError::NotAFunction)?;
            if &a == x {
                match &hit {
                    Some(prev) if *prev != b => return Err(SetError::NotAFunction),
                    _ => hit = Some(b),
                }
            }
        }
        hit.ok_or_else(|| SetError::OutsideDomain { arg: x.to_string() })
    }
}

impl fmt::Display for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn canonical_form_collapses_duplicates() {
        let a = HFSet::empty();
        let s = HFSet::from_elems(vec![a.clone(), a.clone(), a.clone()]);
        assert_eq!(s, HFSet::singleton(HFSet::empty()));
        assert_eq!(s.card(), 1);
        assert!(s.mem(&a));
    }

    #[test]
    fn truth_values_are_distinct_and_ordered() {
        assert_ne!(HFSet::tru(), HFSet::fls());
        assert!(HFSet::fls() < HFSet::tru());
        let bools = HFSet::boolset();
        assert_eq!(bools.card(), 2);
        assert_eq!(bools.least(), Some(&HFSet::fls()));
        assert_eq!(HFSet::boolean(true), HFSet::tru());
        assert_eq!(HFSet::boolean(false), HFSet::fls());
    }

    #[test]
    fn display_uses_nested_braces() {
        assert_eq!(HFSet::empty().to_string(), "{}");
        assert_eq!(HFSet::tru().to_string(), "{{}}");
        assert_eq!(HFSet::boolset().to_string(), "{{},{{}}}");
    }

    #[test]
    fn kpair_roundtrip() {
        let a = HFSet::fls();
        let b = HFSet::tru();
        let p = HFSet::kpair(a.clone(), b.clone());
        assert_eq!(p.dest_kpair(), Some((a.clone(), b.clone())));
        // The degenerate (x, x) pair collapses to {{x}} and still decodes.
        let q = HFSet::kpair(b.clone(), b.clone());
        assert_eq!(q.card(), 1);
        assert_eq!(q.dest_kpair(), Some((b.clone(), b)));
        // Pairs with swapped components differ.
        let r = HFSet::kpair(HFSet::tru(), HFSet::fls());
        assert_ne!(p, r);
    }

    #[test]
    fn boolean_function_space_has_four_elements() {
        let bools = HFSet::boolset();
        let fs = HFSet::funspace(&bools, &bools, 64).unwrap();
        assert_eq!(fs.card(), 4);
        // Each graph is total on the domain and applies cleanly.
        for g in fs.elems() {
            for x in bools.elems() {
                let y = g.apply(x).unwrap();
                assert!(bools.mem(&y));
            }
        }
        // Identity and negation are both present.
        let id = HFSet::abstract_graph::<SetError>(&bools, &bools, |x| Ok(x.clone())).unwrap();
        let neg = HFSet::abstract_graph::<SetError>(&bools, &bools, |x| {
            Ok(HFSet::boolean(*x == HFSet::fls()))
        })
        .unwrap();
        assert!(fs.mem(&id));
        assert!(fs.mem(&neg));
        assert_ne!(id, neg);
    }

    #[test]
    fn funspace_respects_the_cap() {
        let bools = HFSet::boolset();
        let fs = HFSet::funspace(&bools, &bools, 64).unwrap();
        let err = HFSet::funspace(&fs, &fs, 64).unwrap_err();
        match err {
            SetError::CarrierTooBig { size, cap } => {
                assert_eq!(size, 256);
                assert_eq!(cap, 64);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // Degenerate domains still work.
        let from_empty = HFSet::funspace(&HFSet::empty(), &bools, 64).unwrap();
        assert_eq!(from_empty.card(), 1);
        let to_empty = HFSet::funspace(&bools, &HFSet::empty(), 64).unwrap();
        assert!(to_empty.is_empty());
    }

    #[test]
    fn apply_reports_missing_and_malformed() {
        let bools = HFSet::boolset();
        let id = HFSet::abstract_graph::<SetError>(&bools, &bools, |x| Ok(x.clone())).unwrap();
        assert!(matches!(
            id.apply(&HFSet::boolset()),
            Err(SetError::OutsideDomain { .. })
        ));
        assert!(matches!(
            HFSet::tru().apply(&HFSet::empty()),
            Err(SetError::NotAFunction)
        ));
    }

    #[test]
    fn abstract_graph_drops_out_of_range_images() {
        let bools = HFSet::boolset();
        let partial = HFSet::abstract_graph::<SetError>(&bools, &bools, |x| {
            if *x == HFSet::fls() {
                Ok(HFSet::boolset()) // outside the range
            } else {
                Ok(HFSet::tru())
            }
        })
        .unwrap();
        assert_eq!(partial.card(), 1);
        assert!(partial.apply(&HFSet::fls()).is_err());
        assert_eq!(partial.apply(&HFSet::tru()).unwrap(), HFSet::tru());
    }

    fn random_set(rng: &mut StdRng, depth: usize) -> HFSet {
        if depth == 0 {
            return HFSet::empty();
        }
        let n = rng.gen_range(0..4);
        HFSet::from_elems((0..n).map(|_| random_set(rng, depth - 1)).collect())
    }

    #[test]
    fn order_is_total_and_transitive() {
        let mut rng = StdRng::seed_from_u64(6);
        let sets: Vec<HFSet> = (0..40).map(|_| random_set(&mut rng, 3)).collect();
        for x in &sets {
            for y in &sets {
                match x.cmp(y) {
                    Ordering::Equal => assert_eq!(x, y),
                    Ordering::Less => assert_eq!(y.cmp(x), Ordering::Greater),
                    Ordering::Greater => assert_eq!(y.cmp(x), Ordering::Less),
                }
                for z in &sets {
                    if x <= y && y <= z {
                        assert!(x <= z);
                    }
                }
            }
        }
    }

    #[test]
    fn from_elems_is_idempotent_on_shuffled_input() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_set(&mut rng, 3);
            let mut shuffled = s.elems().to_vec();
            shuffled.reverse();
            assert_eq!(HFSet::from_elems(shuffled), s);
        }
    }
}
