//! Worker-side lattice operators and the partial orders over matchings.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::stability::is_stable;
use crate::{Error, FirmId, Market, Matching};

/// Each worker keeps the better of their two partners.
///
/// Defined for arbitrary matchings; the result is stable only for the input
/// classes covered by the lattice theorems.
pub fn join_workers(mu1: &Matching, mu2: &Matching, market: &Market) -> Matching {
    pointwise(mu1, mu2, market, |p, a, b| p.better(a, b))
}

/// Each worker gets the worse of their two partners.
pub fn meet_workers(mu1: &Matching, mu2: &Matching, market: &Market) -> Matching {
    pointwise(mu1, mu2, market, |p, a, b| p.worse(a, b))
}

fn pointwise<F>(mu1: &Matching, mu2: &Matching, market: &Market, pick: F) -> Matching
where
    F: Fn(&crate::WorkerPreference, Option<FirmId>, Option<FirmId>) -> Option<FirmId>,
{
    Matching::from_assignment(
        market.workers().iter().map(|(w, p)| (*w, pick(p, mu1.partner(*w), mu2.partner(*w)))).collect(),
    )
}

/// `μ1 ⪰_W μ2`: every worker of `market` weakly prefers `μ1`.
///
/// Only `market`'s workers are compared, so the matchings may come from
/// markets with more workers.
pub fn dominates_workers(mu1: &Matching, mu2: &Matching, market: &Market) -> bool {
    market.workers().iter().all(|(w, p)| p.compare(mu1.partner(*w), mu2.partner(*w)) != Ordering::Less)
}

/// `μ1 ⪰_F μ2` under each firm's subset comparison. Fails when some firm
/// cannot compare its two assignments.
pub fn dominates_firms(mu1: &Matching, mu2: &Matching, market: &Market) -> Result<bool, Error> {
    for f in market.firm_ids() {
        if market.compare_sets(f, &mu1.firm_set(f), &mu2.firm_set(f))? == Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Blair's order restricted to `firms`: `Ch(μ1(f) ∪ μ2(f)) = μ1(f)` under
/// `prefs`. Firms unknown to `prefs` fail the comparison.
pub fn blair_dominates<I>(mu1: &Matching, mu2: &Matching, firms: I, prefs: &Market) -> bool
where
    I: IntoIterator<Item = FirmId>,
{
    firms.into_iter().all(|f| blair_holds(mu1, mu2, f, prefs))
}

pub(crate) fn blair_holds(mu1: &Matching, mu2: &Matching, firm: FirmId, prefs: &Market) -> bool {
    let Ok(pref) = prefs.firm(firm) else {
        return false;
    };
    let mine = mu1.firm_set(firm);
    let mut union = mine.clone();
    union.extend(mu2.firm_set(firm));
    pref.choice(&union) == mine
}

/// A set of stable matchings of one market, deduplicated and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSet {
    matchings: Vec<Matching>,
}

impl StableSet {
    /// Checks every member for stability.
    pub fn new(market: &Market, matchings: Vec<Matching>) -> Result<Self, Error> {
        for mu in &matchings {
            mu.check_valid(market)?;
            if !is_stable(mu, market) {
                return Err(Error::NotStable);
            }
        }
        Ok(Self::from_verified(matchings))
    }

    pub(crate) fn from_verified(mut matchings: Vec<Matching>) -> Self {
        matchings.sort();
        matchings.dedup();
        StableSet { matchings }
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn contains(&self, mu: &Matching) -> bool {
        self.matchings.binary_search(mu).is_ok()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Matching> {
        self.matchings.iter()
    }

    /// `S_W(μ′)`: members every worker weakly prefers to `mu_prime`.
    pub fn upper_set(&self, mu_prime: &Matching, market: &Market) -> StableSet {
        StableSet {
            matchings: self.matchings.iter().filter(|mu| dominates_workers(mu, mu_prime, market)).cloned().collect(),
        }
    }

    /// Meet of all members; `None` for an empty set.
    pub fn meet_all(&self, market: &Market) -> Option<Matching> {
        let mut it = self.matchings.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, mu| meet_workers(&acc, mu, market)))
    }

    pub fn join_all(&self, market: &Market) -> Option<Matching> {
        let mut it = self.matchings.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, mu| join_workers(&acc, mu, market)))
    }

    /// The member that ⪰_W-dominates every other member, if one exists.
    pub fn worker_best(&self, market: &Market) -> Option<&Matching> {
        self.matchings.iter().find(|a| self.matchings.iter().all(|b| dominates_workers(a, b, market)))
    }

    /// The member that every other member ⪰_W-dominates, if one exists.
    pub fn worker_worst(&self, market: &Market) -> Option<&Matching> {
        self.matchings.iter().find(|a| self.matchings.iter().all(|b| dominates_workers(b, a, market)))
    }

    /// The member that ⪰_F-dominates every other member, if one exists.
    pub fn firm_best(&self, market: &Market) -> Option<&Matching> {
        self.matchings.iter().find(|a| self.matchings.iter().all(|b| dominates_firms(a, b, market).unwrap_or(false)))
    }

    pub fn firm_worst(&self, market: &Market) -> Option<&Matching> {
        self.matchings.iter().find(|a| self.matchings.iter().all(|b| dominates_firms(b, a, market).unwrap_or(false)))
    }
}

impl<'a> IntoIterator for &'a StableSet {
    type Item = &'a Matching;
    type IntoIter = core::slice::Iter<'a, Matching>;

    fn into_iter(self) -> Self::IntoIter {
        self.matchings.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{responsive_market, WorkerId};
    use alloc::vec;

    // Classic 2x2 marriage market with opposed preferences:
    // firms f0: w0 > w1, f1: w1 > w0; workers w0: f1 > f0, w1: f0 > f1.
    fn crossed() -> Market {
        responsive_market(&[(1, &[0, 1]), (1, &[1, 0])], &[&[1, 0], &[0, 1]]).unwrap()
    }

    fn pairs(m: &Market, p: &[(u32, u32)]) -> Matching {
        Matching::from_pairs(m, p.iter().map(|(w, f)| (WorkerId(*w), FirmId(*f))))
    }

    #[test]
    fn join_and_meet_pick_extremes() {
        let m = crossed();
        let firm_opt = pairs(&m, &[(0, 0), (1, 1)]);
        let worker_opt = pairs(&m, &[(0, 1), (1, 0)]);
        assert_eq!(join_workers(&firm_opt, &worker_opt, &m), worker_opt);
        assert_eq!(meet_workers(&firm_opt, &worker_opt, &m), firm_opt);
        assert_eq!(join_workers(&firm_opt, &firm_opt, &m), firm_opt);
        assert_eq!(meet_workers(&worker_opt, &worker_opt, &m), worker_opt);
        let empty = Matching::empty(&m);
        assert_eq!(join_workers(&worker_opt, &empty, &m), worker_opt);
        assert_eq!(meet_workers(&worker_opt, &empty, &m), empty);
    }

    #[test]
    fn orders() {
        let m = crossed();
        let firm_opt = pairs(&m, &[(0, 0), (1, 1)]);
        let worker_opt = pairs(&m, &[(0, 1), (1, 0)]);
        assert!(dominates_workers(&worker_opt, &firm_opt, &m));
        assert!(!dominates_workers(&firm_opt, &worker_opt, &m));
        assert!(dominates_workers(&firm_opt, &firm_opt, &m));
        assert!(dominates_firms(&firm_opt, &worker_opt, &m).unwrap());
        assert!(!dominates_firms(&worker_opt, &firm_opt, &m).unwrap());
        assert!(dominates_firms(&worker_opt, &worker_opt, &m).unwrap());
        assert!(blair_dominates(&firm_opt, &worker_opt, m.firm_ids(), &m));
        assert!(!blair_dominates(&worker_opt, &firm_opt, m.firm_ids(), &m));
        assert!(blair_dominates(&worker_opt, &worker_opt, m.firm_ids(), &m));
        // a firm holding nobody under μ2 is always fine
        assert!(blair_dominates(&worker_opt, &Matching::empty(&m), m.firm_ids(), &m));
    }

    #[test]
    fn incomparable_matchings() {
        // Two firms, two workers, each worker split between firms differently:
        // worker preferences cross so neither matching dominates.
        let m = crossed();
        let a = pairs(&m, &[(0, 0)]);
        let b = pairs(&m, &[(1, 0)]);
        assert!(!dominates_workers(&a, &b, &m));
        assert!(!dominates_workers(&b, &a, &m));
    }

    #[test]
    fn stable_set_extremes() {
        let m = crossed();
        let firm_opt = pairs(&m, &[(0, 0), (1, 1)]);
        let worker_opt = pairs(&m, &[(0, 1), (1, 0)]);
        let set = StableSet::new(&m, vec![worker_opt.clone(), firm_opt.clone(), firm_opt.clone()]).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.worker_best(&m), Some(&worker_opt));
        assert_eq!(set.worker_worst(&m), Some(&firm_opt));
        assert_eq!(set.firm_best(&m), Some(&firm_opt));
        assert_eq!(set.firm_worst(&m), Some(&worker_opt));
        assert_eq!(set.upper_set(&worker_opt, &m).matchings(), core::slice::from_ref(&worker_opt));
        assert_eq!(set.upper_set(&Matching::empty(&m), &m), set);
        assert_eq!(set.meet_all(&m), Some(firm_opt));
        assert_eq!(set.join_all(&m), Some(worker_opt));
        assert_eq!(StableSet::new(&m, vec![Matching::empty(&m)]), Err(Error::NotStable));
    }
}
