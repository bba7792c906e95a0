//! Individual rationality, blocking pairs, stability and firm
//! quasi-stability.
//!
//! All predicates assume the matching is valid for the market
//! (see [`Matching::check_valid`]).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::ids::subsets_of;
use crate::{Error, FirmId, Market, Matching, WorkerId, WorkerSet};

/// Largest envy set the exhaustive firm quasi-stability check will expand.
pub const DEFAULT_FQS_CAP: usize = 12;

/// No worker prefers unemployment to their firm and every firm would keep
/// its whole workforce.
pub fn is_individually_rational(mu: &Matching, market: &Market) -> bool {
    let workers_ok = market.workers().iter().all(|(w, p)| !p.prefers(None, mu.partner(*w)));
    workers_ok
        && market.firms().iter().all(|(f, p)| {
            let held = mu.firm_set(*f);
            p.choice(&held) == held
        })
}

/// All `(w, f)` with `w ∉ μ(f)`, `w ∈ Ch(μ(f) ∪ {w})` and `f P(w) μ(w)`.
pub fn blocking_pairs(mu: &Matching, market: &Market) -> BTreeSet<(WorkerId, FirmId)> {
    let mut out = BTreeSet::new();
    for (f, pref) in market.firms() {
        let held = mu.firm_set(*f);
        for w in envy_set(*f, mu, market) {
            let mut pool = held.clone();
            pool.insert(w);
            if pref.choice(&pool).contains(&w) {
                out.insert((w, *f));
            }
        }
    }
    out
}

pub fn is_stable(mu: &Matching, market: &Market) -> bool {
    is_individually_rational(mu, market) && blocking_pairs(mu, market).is_empty()
}

/// `W_{f,μ}`: workers who strictly prefer `firm` to their current partner.
pub fn envy_set(firm: FirmId, mu: &Matching, market: &Market) -> WorkerSet {
    market.workers().iter().filter(|(w, p)| p.prefers(Some(firm), mu.partner(**w))).map(|(w, _)| *w).collect()
}

/// How to range over the envious coalitions `S ⊆ W_{f,μ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FqsMode {
    /// The whole envy set for responsive firms, every subset for explicit ones.
    Auto,
    /// Only `S = W_{f,μ}`. Equivalent to the full definition for
    /// substitutable preferences: a worker kept from the largest pool is kept
    /// from every smaller one. Singletons alone are not enough.
    WholeEnvySet,
    /// Every nonempty subset of the envy set.
    Exhaustive,
}

/// Firm quasi-stability: individually rational, and no firm facing any
/// group of envious workers would fire someone it holds.
pub fn is_firm_quasi_stable(mu: &Matching, market: &Market) -> Result<bool, Error> {
    is_firm_quasi_stable_with(mu, market, FqsMode::Auto, DEFAULT_FQS_CAP)
}

pub fn is_firm_quasi_stable_with(mu: &Matching, market: &Market, mode: FqsMode, cap: usize) -> Result<bool, Error> {
    if !is_individually_rational(mu, market) {
        return Ok(false);
    }
    Ok(fqs_violation(mu, market, mode, cap)?.is_none())
}

/// The first firm and envious coalition that would make the firm fire
/// someone, if any. Individual rationality is not checked here.
pub fn fqs_violation(
    mu: &Matching,
    market: &Market,
    mode: FqsMode,
    cap: usize,
) -> Result<Option<(FirmId, WorkerSet)>, Error> {
    for (f, pref) in market.firms() {
        let held = mu.firm_set(*f);
        let envy: Vec<WorkerId> = envy_set(*f, mu, market).into_iter().collect();
        let keeps_all = |s: &WorkerSet| {
            let mut pool = held.clone();
            pool.extend(s.iter().copied());
            held.is_subset(&pref.choice(&pool))
        };
        let exhaustive = match mode {
            FqsMode::Auto => !pref.is_responsive(),
            FqsMode::WholeEnvySet => false,
            FqsMode::Exhaustive => true,
        };
        if exhaustive {
            if envy.len() > cap {
                return Err(Error::SizeGuard { what: "firm quasi-stability", size: envy.len(), cap });
            }
            if let Some(s) = subsets_of(&envy).skip(1).find(|s| !keeps_all(s)) {
                return Ok(Some((*f, s)));
            }
        } else {
            let whole: WorkerSet = envy.iter().copied().collect();
            if !whole.is_empty() && !keeps_all(&whole) {
                return Ok(Some((*f, whole)));
            }
        }
    }
    Ok(None)
}
