use alloc::collections::BTreeMap;

use crate::{Error, FirmId, Market, WorkerId, WorkerSet};

/// A matching, stored as each worker's partner.
///
/// The firm side is always derived from the worker side, so the two views
/// cannot disagree. Ordering is lexicographic over workers in id order with
/// unmatched before any firm.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    assignment: BTreeMap<WorkerId, Option<FirmId>>,
}

impl Matching {
    /// Every worker of `market` unmatched.
    pub fn empty(market: &Market) -> Self {
        Matching { assignment: market.worker_ids().map(|w| (w, None)).collect() }
    }

    pub fn from_assignment(assignment: BTreeMap<WorkerId, Option<FirmId>>) -> Self {
        Matching { assignment }
    }

    /// `pairs` assigned, every other worker of `market` unmatched.
    pub fn from_pairs<I: IntoIterator<Item = (WorkerId, FirmId)>>(market: &Market, pairs: I) -> Self {
        let mut m = Matching::empty(market);
        for (w, f) in pairs {
            m.assign(w, Some(f));
        }
        m
    }

    pub fn assignment(&self) -> &BTreeMap<WorkerId, Option<FirmId>> {
        &self.assignment
    }

    /// The worker's firm; `None` when unmatched or not covered by this matching.
    pub fn partner(&self, worker: WorkerId) -> Option<FirmId> {
        self.assignment.get(&worker).copied().flatten()
    }

    pub fn assign(&mut self, worker: WorkerId, firm: Option<FirmId>) {
        self.assignment.insert(worker, firm);
    }

    pub fn workers(&self) -> impl Iterator<Item = WorkerId> + '_ {
        self.assignment.keys().copied()
    }

    /// `μ(f)`.
    pub fn firm_set(&self, firm: FirmId) -> WorkerSet {
        self.assignment.iter().filter(|(_, f)| **f == Some(firm)).map(|(w, _)| *w).collect()
    }

    /// `μ(f)` for every firm that holds at least one worker.
    pub fn firm_view(&self) -> BTreeMap<FirmId, WorkerSet> {
        let mut view: BTreeMap<FirmId, WorkerSet> = BTreeMap::new();
        for (w, f) in &self.assignment {
            if let Some(f) = f {
                view.entry(*f).or_default().insert(*w);
            }
        }
        view
    }

    pub fn matched_count(&self) -> usize {
        self.assignment.values().filter(|f| f.is_some()).count()
    }

    /// Covers exactly the market's workers and names only its firms.
    pub fn check_valid(&self, market: &Market) -> Result<(), Error> {
        if self.assignment.len() != market.workers().len()
            || !self.assignment.keys().all(|w| market.workers().contains_key(w))
        {
            return Err(Error::InvalidMatching);
        }
        for f in self.assignment.values().flatten() {
            market.firm(*f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{responsive_market, workers};

    #[test]
    fn firm_view_is_derived() {
        let m = responsive_market(&[(2, &[0, 1]), (1, &[2])], &[&[0], &[0], &[1]]).unwrap();
        let mu = Matching::from_pairs(&m, [(WorkerId(0), FirmId(0)), (WorkerId(2), FirmId(0))]);
        assert_eq!(mu.firm_set(FirmId(0)), workers([0, 2]));
        assert_eq!(mu.firm_set(FirmId(1)), WorkerSet::new());
        assert_eq!(mu.partner(WorkerId(1)), None);
        assert_eq!(mu.firm_view().len(), 1);
        assert_eq!(mu.matched_count(), 2);
        assert!(mu.check_valid(&m).is_ok());
    }

    #[test]
    fn validity() {
        let m = responsive_market(&[(1, &[0])], &[&[0], &[0]]).unwrap();
        let mut mu = Matching::empty(&m);
        mu.assign(WorkerId(5), None);
        assert_eq!(mu.check_valid(&m), Err(Error::InvalidMatching));
        let mu = Matching::from_pairs(&m, [(WorkerId(0), FirmId(3))]);
        assert_eq!(mu.check_valid(&m), Err(Error::UnknownFirm(FirmId(3))));
    }
}
