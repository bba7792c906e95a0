//! Generalized deferred acceptance with choice functions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::{FirmId, Market, Matching, WorkerId, WorkerSet};

/// Firm-proposing deferred acceptance.
///
/// Each round every firm offers to its choice among the workers that have
/// not rejected it yet; each worker keeps the best offer (or none) and
/// rejects the rest. Stops at the first round without rejections. For
/// substitutable preferences this is the firm-optimal stable matching.
pub fn da_firm_proposing(market: &Market) -> Matching {
    let everyone = market.worker_set();
    let mut rejected: BTreeMap<FirmId, WorkerSet> = BTreeMap::new();
    loop {
        let mut offers: BTreeMap<WorkerId, Vec<FirmId>> = BTreeMap::new();
        for (f, pref) in market.firms() {
            let open: WorkerSet = match rejected.get(f) {
                Some(r) => everyone.difference(r).copied().collect(),
                None => everyone.clone(),
            };
            for w in pref.choice(&open) {
                offers.entry(w).or_default().push(*f);
            }
        }
        let mut result = Matching::empty(market);
        let mut any_rejection = false;
        for (w, firms) in offers {
            let pref = &market.workers()[&w];
            let kept = firms.iter().fold(None, |best, f| pref.better(best, Some(*f)));
            for f in firms.iter().filter(|f| Some(**f) != kept) {
                rejected.entry(*f).or_default().insert(w);
                any_rejection = true;
            }
            result.assign(w, kept);
        }
        if !any_rejection {
            return result;
        }
    }
}

/// Worker-proposing deferred acceptance; the lowest-id free worker proposes
/// first.
pub fn da_worker_proposing(market: &Market) -> Matching {
    let order: Vec<WorkerId> = market.worker_ids().collect();
    da_worker_proposing_in_order(market, &order)
}

/// Worker-proposing deferred acceptance where, at every step, the free
/// worker appearing earliest in `priority` makes the next proposal. Workers
/// missing from `priority` propose after all listed ones, by id.
///
/// The firm tentatively holds `Ch(held ∪ {proposer})`; everyone else it held
/// is released and proposes further down their list.
pub fn da_worker_proposing_in_order(market: &Market, priority: &[WorkerId]) -> Matching {
    let rank = |w: WorkerId| priority.iter().position(|x| *x == w).unwrap_or(priority.len() + w.0 as usize);
    let mut next: BTreeMap<WorkerId, usize> = BTreeMap::new();
    let mut held: BTreeMap<FirmId, WorkerSet> = BTreeMap::new();
    let mut free: BTreeSet<(usize, WorkerId)> = market.worker_ids().map(|w| (rank(w), w)).collect();
    while let Some((_, w)) = free.pop_first() {
        let list = market.workers()[&w].ranking();
        let cursor = next.entry(w).or_insert(0);
        let Some(&f) = list.get(*cursor) else {
            continue;
        };
        *cursor += 1;
        let holding = held.entry(f).or_default();
        let mut pool = holding.clone();
        pool.insert(w);
        let kept = market.firms()[&f].choice(&pool);
        for out in pool.difference(&kept) {
            free.insert((rank(*out), *out));
        }
        *holding = kept;
    }
    let mut result = Matching::empty(market);
    for (f, ws) in held {
        for w in ws {
            result.assign(w, Some(f));
        }
    }
    result
}
