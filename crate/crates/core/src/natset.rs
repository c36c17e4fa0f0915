//! Subsets of ℕ = {1, 2, 3, …} given by a membership predicate, a sorted
//! enumerator and, where known, closed-form counting and indexing.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

type Member = Arc<dyn Fn(u64) -> bool + Send + Sync>;
type Enumerate = Arc<dyn Fn() -> Box<dyn Iterator<Item = u64> + Send> + Send + Sync>;
type CountFn = Arc<dyn Fn(&BigUint) -> BigUint + Send + Sync>;
type NthFn = Arc<dyn Fn(&BigUint) -> Option<BigUint> + Send + Sync>;

/// Closed-form indexing refuses to build integers wider than this.
pub const MAX_ELEMENT_BITS: u64 = 1 << 24;

#[derive(Clone)]
pub struct NatSet {
    name: String,
    member: Member,
    enumerate: Enumerate,
    count: Option<CountFn>,
    nth: Option<NthFn>,
}

impl fmt::Debug for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NatSet")
            .field("name", &self.name)
            .field("closed_count", &self.count.is_some())
            .finish()
    }
}

impl NatSet {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, k: u64) -> bool {
        k >= 1 && (self.member)(k)
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + Send> {
        (self.enumerate)()
    }

    pub fn has_closed_count(&self) -> bool {
        self.count.is_some()
    }

    /// `|{k <= n : k ∈ K}|`, exact.
    pub fn count_upto(&self, n: u64) -> u64 {
        match &self.count {
            Some(c) => c(&BigUint::from(n))
                .to_u64()
                .expect("count never exceeds n"),
            None => (1..=n).filter(|&k| (self.member)(k)).count() as u64,
        }
    }

    /// Count at an arbitrary-precision horizon. Without a closed form this
    /// enumerates, so only horizons that fit in `u64` are answered.
    pub fn count_upto_big(&self, n: &BigUint) -> Option<BigUint> {
        match &self.count {
            Some(c) => Some(c(n)),
            None => n.to_u64().map(|n| BigUint::from(self.count_upto(n))),
        }
    }

    /// The `j`-th smallest element (`j >= 1`). Falls back to a search on the
    /// closed count, then to enumeration of elements up to `scan_limit`.
    pub fn nth(&self, j: &BigUint, scan_limit: u64) -> Option<BigUint> {
        if j.is_zero() {
            return None;
        }
        if let Some(nth) = &self.nth {
            return nth(j);
        }
        if let Some(count) = &self.count {
            return nth_by_count(count.as_ref(), j);
        }
        let j = j.to_u64()?;
        (1..=scan_limit)
            .filter(|&k| (self.member)(k))
            .nth((j - 1) as usize)
            .map(BigUint::from)
    }

    /// `{1, 4, 9, …}`
    pub fn squares() -> Self {
        NatSet {
            name: "squares".into(),
            member: Arc::new(|k| {
                let r = k.sqrt();
                r * r == k
            }),
            enumerate: Arc::new(|| {
                Box::new((1u64..).map_while(|i| i.checked_mul(i)))
            }),
            count: Some(Arc::new(|n| n.sqrt())),
            nth: Some(Arc::new(|j| {
                (j.bits() * 2 <= MAX_ELEMENT_BITS).then(|| j * j)
            })),
        }
    }

    /// `{2, 4, 6, …}`
    pub fn evens() -> Self {
        NatSet {
            name: "evens".into(),
            member: Arc::new(|k| k % 2 == 0),
            enumerate: Arc::new(|| Box::new((1u64..).map_while(|i| i.checked_mul(2)))),
            count: Some(Arc::new(|n| n / 2u32)),
            nth: Some(Arc::new(|j| Some(j * 2u32))),
        }
    }

    /// `{1, 3, 5, …}`
    pub fn odds() -> Self {
        NatSet {
            name: "odds".into(),
            member: Arc::new(|k| k % 2 == 1),
            enumerate: Arc::new(|| Box::new((0u64..).map_while(|i| i.checked_mul(2)).map(|k| k + 1))),
            count: Some(Arc::new(|n| (n + 1u32) / 2u32)),
            nth: Some(Arc::new(|j| Some(j * 2u32 - 1u32))),
        }
    }

    /// `{2^r : r >= 1} = {2, 4, 8, …}`
    pub fn powers_of_two() -> Self {
        NatSet {
            name: "pow2".into(),
            member: Arc::new(|k| k >= 2 && k.is_power_of_two()),
            enumerate: Arc::new(|| Box::new((1u32..64).map(|r| 1u64 << r))),
            count: Some(Arc::new(|n| {
                if n.is_zero() {
                    BigUint::zero()
                } else {
                    BigUint::from(n.bits() - 1)
                }
            })),
            nth: Some(Arc::new(|j| {
                let r = j.to_u64().filter(|&r| r < MAX_ELEMENT_BITS)?;
                Some(BigUint::one() << r)
            })),
        }
    }

    /// A finite set; `0` is not a natural number here and is rejected.
    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = elements.into_iter().collect();
        if v.contains(&0) {
            return Err(Error::Parameter("natural numbers start at 1; 0 is not allowed".into()));
        }
        v.sort_unstable();
        v.dedup();
        let name = format!(
            "finite[{}]",
            v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        );
        let v = Arc::new(v);
        let (m, e, c, n) = (v.clone(), v.clone(), v.clone(), v);
        Ok(NatSet {
            name,
            member: Arc::new(move |k| m.binary_search(&k).is_ok()),
            enumerate: Arc::new(move || {
                let e = e.clone();
                Box::new((0..e.len()).map(move |i| e[i]))
            }),
            count: Some(Arc::new(move |n| {
                let cut = c.partition_point(|&k| BigUint::from(k) <= *n);
                BigUint::from(cut)
            })),
            nth: Some(Arc::new(move |j| {
                let j = j.to_usize()?;
                n.get(j - 1).map(|&k| BigUint::from(k))
            })),
        })
    }

    /// `ℕ - K`
    pub fn complement(k: &NatSet) -> Self {
        let inner = k.clone();
        let m = inner.member.clone();
        let e = inner.member.clone();
        NatSet {
            name: format!("compl({})", inner.name),
            member: Arc::new(move |x| !m(x)),
            enumerate: Arc::new(move || {
                let e = e.clone();
                Box::new((1u64..).filter(move |&x| !e(x)))
            }),
            count: inner
                .count
                .clone()
                .map(|c| Arc::new(move |n: &BigUint| n - c(n)) as CountFn),
            nth: None,
        }
    }

    /// `K1 ∪ K2`
    pub fn union(a: &NatSet, b: &NatSet) -> Self {
        let (ma, mb) = (a.member.clone(), b.member.clone());
        let (ea, eb) = (a.enumerate.clone(), b.enumerate.clone());
        NatSet {
            name: format!("union({},{})", a.name, b.name),
            member: Arc::new(move |x| ma(x) || mb(x)),
            enumerate: Arc::new(move || Box::new(MergeUnion::new(ea(), eb()))),
            count: None,
            nth: None,
        }
    }

    /// Any predicate on ℕ; enumeration scans `1, 2, 3, …`.
    pub fn from_predicate<F>(name: impl Into<String>, pred: F) -> Self
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        let pred: Member = Arc::new(pred);
        let e = pred.clone();
        NatSet {
            name: name.into(),
            member: pred,
            enumerate: Arc::new(move || {
                let e = e.clone();
                Box::new((1u64..).filter(move |&x| e(x)))
            }),
            count: None,
            nth: None,
        }
    }
}

// Smallest m with count(m) >= j, by doubling then bisection.
fn nth_by_count(count: &(dyn Fn(&BigUint) -> BigUint + Send + Sync), j: &BigUint) -> Option<BigUint> {
    let mut hi = j.clone().max(BigUint::one());
    while count(&hi) < *j {
        hi <<= 1;
        if hi.bits() > MAX_ELEMENT_BITS {
            return None;
        }
    }
    let mut lo = BigUint::zero();
    while &lo + 1u32 < hi {
        let mid = (&lo + &hi) >> 1;
        if count(&mid) >= *j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

struct MergeUnion<A: Iterator<Item = u64>, B: Iterator<Item = u64>> {
    a: std::iter::Peekable<A>,
    b: std::iter::Peekable<B>,
}

impl<A: Iterator<Item = u64>, B: Iterator<Item = u64>> MergeUnion<A, B> {
    fn new(a: A, b: B) -> Self {
        MergeUnion {
            a: a.peekable(),
            b: b.peekable(),
        }
    }
}

impl<A: Iterator<Item = u64>, B: Iterator<Item = u64>> Iterator for MergeUnion<A, B> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match (self.a.peek().copied(), self.b.peek().copied()) {
            (Some(x), Some(y)) if x == y => {
                self.a.next();
                self.b.next()
            }
            (Some(x), Some(y)) if x < y => self.a.next(),
            (Some(_), Some(_)) => self.b.next(),
            (Some(_), None) => self.a.next(),
            (None, Some(_)) => self.b.next(),
            (None, None) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(k: &NatSet, n: u64) -> u64 {
        (1..=n).filter(|&x| k.contains(x)).count() as u64
    }

    fn builtins() -> Vec<NatSet> {
        let sq = NatSet::squares();
        vec![
            sq.clone(),
            NatSet::evens(),
            NatSet::odds(),
            NatSet::powers_of_two(),
            NatSet::finite([1, 2, 3, 50]).unwrap(),
            NatSet::finite([]).unwrap(),
            NatSet::complement(&sq),
            NatSet::union(&sq, &NatSet::evens()),
        ]
    }

    #[test]
    fn closed_counts_match_brute_force() {
        for set in builtins() {
            let mut running = 0;
            for n in 0..=10_000u64 {
                if set.contains(n) {
                    running += 1;
                }
                assert_eq!(set.count_upto(n), running, "{} at n = {n}", set.name());
            }
            assert_eq!(brute(&set, 777), set.count_upto(777));
        }
    }

    #[test]
    fn spot_counts() {
        assert_eq!(NatSet::squares().count_upto(10_000), 100);
        assert_eq!(NatSet::evens().count_upto(7), 3);
        assert_eq!(NatSet::finite([]).unwrap().count_upto(1_000_000), 0);
        assert_eq!(NatSet::powers_of_two().count_upto(1), 0);
        assert_eq!(NatSet::powers_of_two().count_upto(1024), 10);
    }

    #[test]
    fn enumerators_agree_with_membership() {
        for set in builtins() {
            let listed: Vec<u64> = set.iter().take_while(|&k| k <= 2000).collect();
            let filtered: Vec<u64> = (1..=2000).filter(|&k| set.contains(k)).collect();
            assert_eq!(listed, filtered, "{}", set.name());
        }
    }

    #[test]
    fn nth_via_every_route() {
        let j = BigUint::from(10u32);
        assert_eq!(NatSet::squares().nth(&j, 0), Some(BigUint::from(100u32)));
        assert_eq!(NatSet::odds().nth(&j, 0), Some(BigUint::from(19u32)));
        assert_eq!(NatSet::powers_of_two().nth(&j, 0), Some(BigUint::from(1024u32)));
        // 10th non-square: 2,3,5,6,7,8,10,11,12,13
        let c = NatSet::complement(&NatSet::squares());
        assert_eq!(c.nth(&j, 0), Some(BigUint::from(13u32)));
        let p = NatSet::from_predicate("mult3", |k| k % 3 == 0);
        assert_eq!(p.nth(&j, 1_000), Some(BigUint::from(30u32)));
        assert_eq!(p.nth(&j, 20), None);
        assert_eq!(NatSet::finite([4, 5]).unwrap().nth(&j, 100), None);
    }

    #[test]
    fn zero_rejected_in_finite_sets() {
        assert!(NatSet::finite([0, 1]).is_err());
    }

    #[test]
    fn big_counts() {
        let n = BigUint::from(10u32).pow(40);
        assert_eq!(
            NatSet::squares().count_upto_big(&n),
            Some(BigUint::from(10u32).pow(20))
        );
        assert_eq!(NatSet::powers_of_two().count_upto_big(&(BigUint::one() << 100)), Some(BigUint::from(100u32)));
    }
}
