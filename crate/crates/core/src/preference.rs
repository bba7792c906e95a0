//! Preferences of both sides of the market.
//!
//! Workers rank firms; a firm missing from the list is ranked below
//! unemployment. Firms either rank individual workers (responsive, with a
//! quota) or rank subsets explicitly. Subsets of a responsive firm are
//! compared by the responsive completion: equal-size sets lexicographically
//! on their sorted rank vectors, a larger acceptable set above a smaller one
//! whose members it dominates pairwise, and anything else is left
//! incomparable.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, FirmId, WorkerId, WorkerSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkerPreference {
    ranking: Vec<FirmId>,
}

impl WorkerPreference {
    /// `ranking` lists acceptable firms, most preferred first.
    pub fn new(ranking: Vec<FirmId>) -> Result<Self, Error> {
        for (i, f) in ranking.iter().enumerate() {
            if ranking[..i].contains(f) {
                // worker id is attached by the market
                return Err(Error::DuplicateFirm { worker: WorkerId(u32::MAX), firm: *f });
            }
        }
        Ok(WorkerPreference { ranking })
    }

    pub fn ranking(&self) -> &[FirmId] {
        &self.ranking
    }

    pub fn rank(&self, firm: FirmId) -> Option<usize> {
        self.ranking.iter().position(|f| *f == firm)
    }

    pub fn is_acceptable(&self, firm: FirmId) -> bool {
        self.ranking.contains(&firm)
    }

    // Smaller is better. Unacceptable firms sit below unemployment, ordered by id.
    fn key(&self, partner: Option<FirmId>) -> (u8, u32) {
        match partner {
            None => (1, 0),
            Some(f) => match self.rank(f) {
                Some(r) => (0, r as u32),
                None => (2, f.0),
            },
        }
    }

    /// `Greater` when `a` is strictly preferred to `b`.
    pub fn compare(&self, a: Option<FirmId>, b: Option<FirmId>) -> Ordering {
        self.key(b).cmp(&self.key(a))
    }

    pub fn prefers(&self, a: Option<FirmId>, b: Option<FirmId>) -> bool {
        self.compare(a, b) == Ordering::Greater
    }

    pub fn better(&self, a: Option<FirmId>, b: Option<FirmId>) -> Option<FirmId> {
        if self.prefers(b, a) {
            b
        } else {
            a
        }
    }

    pub fn worse(&self, a: Option<FirmId>, b: Option<FirmId>) -> Option<FirmId> {
        if self.prefers(b, a) {
            a
        } else {
            b
        }
    }

    pub(crate) fn with_ranking(ranking: Vec<FirmId>) -> Self {
        WorkerPreference { ranking }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FirmPreferenceBody {
    /// Acceptable workers, most preferred first.
    Responsive(Vec<WorkerId>),
    /// Subsets, most preferred first. Subsets larger than the quota may be
    /// omitted; omitted subsets rank below the empty set.
    ExplicitSubsets(Vec<WorkerSet>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirmPreference {
    quota: u32,
    body: FirmPreferenceBody,
}

impl FirmPreference {
    pub fn responsive(quota: u32, ranking: Vec<WorkerId>) -> Result<Self, Error> {
        Self::new(quota, FirmPreferenceBody::Responsive(ranking))
    }

    pub fn explicit(quota: u32, order: Vec<WorkerSet>) -> Result<Self, Error> {
        Self::new(quota, FirmPreferenceBody::ExplicitSubsets(order))
    }

    /// Structural checks only. Ids are checked against a market by
    /// [`Market::new`](crate::Market::new), and substitutability and
    /// q-separability by the validators.
    pub fn new(quota: u32, body: FirmPreferenceBody) -> Result<Self, Error> {
        let anon = FirmId(u32::MAX);
        if quota == 0 {
            return Err(Error::ZeroQuota(anon));
        }
        match &body {
            FirmPreferenceBody::Responsive(ranking) => {
                for (i, w) in ranking.iter().enumerate() {
                    if ranking[..i].contains(w) {
                        return Err(Error::DuplicateWorker { firm: anon, worker: *w });
                    }
                }
            }
            FirmPreferenceBody::ExplicitSubsets(order) => {
                let mut sorted: Vec<&WorkerSet> = order.iter().collect();
                sorted.sort();
                if sorted.windows(2).any(|p| p[0] == p[1]) {
                    return Err(Error::DuplicateSubset { firm: anon });
                }
                if !order.iter().any(|s| s.is_empty()) {
                    return Err(Error::MissingEmptySet(anon));
                }
            }
        }
        Ok(FirmPreference { quota, body })
    }

    pub fn quota(&self) -> u32 {
        self.quota
    }

    pub fn body(&self) -> &FirmPreferenceBody {
        &self.body
    }

    pub fn is_responsive(&self) -> bool {
        matches!(self.body, FirmPreferenceBody::Responsive(_))
    }

    fn quota_usize(&self) -> usize {
        self.quota as usize
    }

    /// The most preferred subset of `available` with at most `quota` members.
    pub fn choice(&self, available: &WorkerSet) -> WorkerSet {
        match &self.body {
            FirmPreferenceBody::Responsive(ranking) => {
                ranking.iter().filter(|w| available.contains(w)).take(self.quota_usize()).copied().collect()
            }
            FirmPreferenceBody::ExplicitSubsets(order) => order
                .iter()
                .find(|s| s.len() <= self.quota_usize() && s.is_subset(available))
                .cloned()
                .unwrap_or_default(),
        }
    }

    /// Whether `{worker}` is preferred to hiring nobody.
    pub fn accepts(&self, worker: WorkerId) -> bool {
        match &self.body {
            FirmPreferenceBody::Responsive(ranking) => ranking.contains(&worker),
            FirmPreferenceBody::ExplicitSubsets(_) => {
                let single: WorkerSet = core::iter::once(worker).collect();
                self.prefers_to_empty(&single)
            }
        }
    }

    /// Whether `set` is strictly preferred to the empty set.
    pub fn prefers_to_empty(&self, set: &WorkerSet) -> bool {
        match &self.body {
            FirmPreferenceBody::Responsive(ranking) => {
                !set.is_empty() && set.len() <= self.quota_usize() && set.iter().all(|w| ranking.contains(w))
            }
            FirmPreferenceBody::ExplicitSubsets(order) => {
                match (position(order, set), position(order, &WorkerSet::new())) {
                    (Some(p), Some(empty)) => p < empty,
                    _ => false,
                }
            }
        }
    }

    /// `Greater` when `a` is strictly preferred to `b`.
    pub fn compare_sets(&self, a: &WorkerSet, b: &WorkerSet) -> Result<Ordering, Error> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        let incomparable = Err(Error::Incomparable { firm: FirmId(u32::MAX) });
        match &self.body {
            FirmPreferenceBody::Responsive(ranking) => {
                let ka = rank_keys(ranking, a);
                let kb = rank_keys(ranking, b);
                if ka.len() == kb.len() {
                    return Ok(kb.cmp(&ka));
                }
                let (big, small, big_is_a) = if ka.len() > kb.len() { (&ka, &kb, true) } else { (&kb, &ka, false) };
                let big_set = if big_is_a { a } else { b };
                let dominates = big.iter().zip(small.iter()).all(|(x, y)| x <= y);
                if dominates && self.prefers_to_empty(big_set) {
                    Ok(if big_is_a { Ordering::Greater } else { Ordering::Less })
                } else {
                    incomparable
                }
            }
            FirmPreferenceBody::ExplicitSubsets(order) => {
                let empty = position(order, &WorkerSet::new()).unwrap_or(order.len());
                match (position(order, a), position(order, b)) {
                    (Some(pa), Some(pb)) => Ok(pb.cmp(&pa)),
                    (Some(pa), None) if pa <= empty => Ok(Ordering::Greater),
                    (None, Some(pb)) if pb <= empty => Ok(Ordering::Less),
                    _ => incomparable,
                }
            }
        }
    }

    /// The same preference over the subsets of `keep` only.
    pub fn restrict_to(&self, keep: &WorkerSet) -> FirmPreference {
        let body = match &self.body {
            FirmPreferenceBody::Responsive(ranking) => {
                FirmPreferenceBody::Responsive(ranking.iter().filter(|w| keep.contains(w)).copied().collect())
            }
            FirmPreferenceBody::ExplicitSubsets(order) => {
                FirmPreferenceBody::ExplicitSubsets(order.iter().filter(|s| s.is_subset(keep)).cloned().collect())
            }
        };
        FirmPreference { quota: self.quota, body }
    }

    /// Every worker id the preference mentions.
    pub fn mentioned_workers(&self) -> WorkerSet {
        match &self.body {
            FirmPreferenceBody::Responsive(ranking) => ranking.iter().copied().collect(),
            FirmPreferenceBody::ExplicitSubsets(order) => order.iter().flatten().copied().collect(),
        }
    }
}

fn position(order: &[WorkerSet], set: &WorkerSet) -> Option<usize> {
    order.iter().position(|s| s == set)
}

// Sorted ascending; unacceptable workers come after every acceptable one.
fn rank_keys(ranking: &[WorkerId], set: &WorkerSet) -> Vec<u64> {
    let mut keys: Vec<u64> = set
        .iter()
        .map(|w| match ranking.iter().position(|x| x == w) {
            Some(r) => r as u64,
            None => ranking.len() as u64 + 1 + w.0 as u64,
        })
        .collect();
    keys.sort_unstable();
    keys
}
