use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, FirmId, FirmPreference, FirmPreferenceBody, WorkerId, WorkerPreference, WorkerSet};

/// A many-to-one market: firms with quotas and subset preferences, workers
/// with rankings over firms.
///
/// Ids need not be dense; markets derived by retiring workers keep the
/// surviving ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    firms: BTreeMap<FirmId, FirmPreference>,
    workers: BTreeMap<WorkerId, WorkerPreference>,
}

impl Market {
    pub fn new(
        firms: BTreeMap<FirmId, FirmPreference>,
        workers: BTreeMap<WorkerId, WorkerPreference>,
    ) -> Result<Self, Error> {
        if firms.is_empty() {
            return Err(Error::NoFirms);
        }
        if workers.is_empty() {
            return Err(Error::NoWorkers);
        }
        for pref in workers.values() {
            if let Some(f) = pref.ranking().iter().find(|f| !firms.contains_key(f)) {
                return Err(Error::UnknownFirm(*f));
            }
        }
        let n = workers.len();
        for (f, pref) in &firms {
            if let Some(w) = pref.mentioned_workers().into_iter().find(|w| !workers.contains_key(w)) {
                return Err(Error::UnknownWorker(w));
            }
            if let FirmPreferenceBody::ExplicitSubsets(order) = pref.body() {
                let q = pref.quota() as usize;
                let expected = (0..=q.min(n)).fold(0usize, |acc, k| acc.saturating_add(binomial(n, k)));
                let found = order.iter().filter(|s| s.len() <= q).count();
                if found != expected {
                    return Err(Error::IncompleteSubsetOrder { firm: *f, expected, found });
                }
            }
        }
        Ok(Market { firms, workers })
    }

    /// Builds a market from `(id, preference)` pairs, attaching ids to
    /// construction errors.
    pub fn from_parts<F, W>(firms: F, workers: W) -> Result<Self, Error>
    where
        F: IntoIterator<Item = (FirmId, Result<FirmPreference, Error>)>,
        W: IntoIterator<Item = (WorkerId, Result<WorkerPreference, Error>)>,
    {
        let mut fs = BTreeMap::new();
        for (id, p) in firms {
            if fs.insert(id, p.map_err(|e| e.for_firm(id))?).is_some() {
                return Err(Error::DuplicateFirmId(id));
            }
        }
        let mut ws = BTreeMap::new();
        for (id, p) in workers {
            if ws.insert(id, p.map_err(|e| e.for_worker(id))?).is_some() {
                return Err(Error::DuplicateWorkerId(id));
            }
        }
        Market::new(fs, ws)
    }

    pub fn firms(&self) -> &BTreeMap<FirmId, FirmPreference> {
        &self.firms
    }

    pub fn workers(&self) -> &BTreeMap<WorkerId, WorkerPreference> {
        &self.workers
    }

    pub fn firm_ids(&self) -> impl Iterator<Item = FirmId> + '_ {
        self.firms.keys().copied()
    }

    pub fn worker_ids(&self) -> impl Iterator<Item = WorkerId> + '_ {
        self.workers.keys().copied()
    }

    pub fn worker_set(&self) -> WorkerSet {
        self.workers.keys().copied().collect()
    }

    pub fn firm(&self, id: FirmId) -> Result<&FirmPreference, Error> {
        self.firms.get(&id).ok_or(Error::UnknownFirm(id))
    }

    pub fn worker(&self, id: WorkerId) -> Result<&WorkerPreference, Error> {
        self.workers.get(&id).ok_or(Error::UnknownWorker(id))
    }

    fn check_workers(&self, set: &WorkerSet) -> Result<(), Error> {
        match set.iter().find(|w| !self.workers.contains_key(w)) {
            Some(w) => Err(Error::UnknownWorker(*w)),
            None => Ok(()),
        }
    }

    /// `Ch(S, P(f))`.
    pub fn choice(&self, firm: FirmId, set: &WorkerSet) -> Result<WorkerSet, Error> {
        let pref = self.firm(firm)?;
        self.check_workers(set)?;
        Ok(pref.choice(set))
    }

    /// Whether `(set, firm)` is an acceptable coalition: the firm prefers
    /// `set` to nobody and every member finds the firm acceptable.
    pub fn is_acceptable_coalition(&self, set: &WorkerSet, firm: FirmId) -> Result<bool, Error> {
        let pref = self.firm(firm)?;
        self.check_workers(set)?;
        Ok(pref.prefers_to_empty(set) && set.iter().all(|w| self.workers[w].is_acceptable(firm)))
    }

    pub fn compare_sets(&self, firm: FirmId, a: &WorkerSet, b: &WorkerSet) -> Result<Ordering, Error> {
        self.firm(firm)?.compare_sets(a, b).map_err(|e| e.for_firm(firm))
    }

    /// Whether `firm` and `worker` each find the other individually acceptable.
    pub fn mutually_acceptable(&self, firm: FirmId, worker: WorkerId) -> bool {
        match (self.firms.get(&firm), self.workers.get(&worker)) {
            (Some(fp), Some(wp)) => fp.accepts(worker) && wp.is_acceptable(firm),
            _ => false,
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Convenience constructor used by tests and examples: responsive firms
/// given as `(quota, ranking)` and workers as rankings, ids dense from 0.
pub fn responsive_market(firms: &[(u32, &[u32])], workers: &[&[u32]]) -> Result<Market, Error> {
    Market::from_parts(
        firms.iter().enumerate().map(|(i, (q, r))| {
            (FirmId(i as u32), FirmPreference::responsive(*q, r.iter().map(|w| WorkerId(*w)).collect()))
        }),
        workers.iter().enumerate().map(|(i, r)| {
            (WorkerId(i as u32), WorkerPreference::new(r.iter().map(|f| FirmId(*f)).collect::<Vec<_>>()))
        }),
    )
}
