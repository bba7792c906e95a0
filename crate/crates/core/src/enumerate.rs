//! Exhaustive oracles over all matchings of small markets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::stability::{is_firm_quasi_stable_with, is_individually_rational, is_stable, FqsMode, DEFAULT_FQS_CAP};
use crate::{Error, FirmId, Market, Matching, StableSet, WorkerId};

/// Caps for the brute-force enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumLimits {
    pub max_workers: usize,
    pub max_firms: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_workers: 7, max_firms: 5 }
    }
}

impl EnumLimits {
    pub fn check(&self, market: &Market) -> Result<(), Error> {
        let (w, f) = (market.workers().len(), market.firms().len());
        if w > self.max_workers {
            return Err(Error::SizeGuard { what: "matching enumeration (workers)", size: w, cap: self.max_workers });
        }
        if f > self.max_firms {
            return Err(Error::SizeGuard { what: "matching enumeration (firms)", size: f, cap: self.max_firms });
        }
        Ok(())
    }
}

/// Every individually rational matching, sorted.
///
/// Candidates give each worker either no firm or a mutually acceptable one
/// with room left under its quota; anything else is blocked by an individual
/// agent under q-separable preferences. Each candidate is then checked with
/// [`is_individually_rational`].
pub fn enumerate_individually_rational(market: &Market, limits: EnumLimits) -> Result<Vec<Matching>, Error> {
    limits.check(market)?;
    let workers: Vec<WorkerId> = market.worker_ids().collect();
    let options: Vec<Vec<Option<FirmId>>> = workers
        .iter()
        .map(|w| {
            core::iter::once(None)
                .chain(market.workers()[w].ranking().iter().filter(|f| market.firms()[f].accepts(*w)).map(|f| Some(*f)))
                .collect()
        })
        .collect();
    let quota: BTreeMap<FirmId, usize> = market.firms().iter().map(|(f, p)| (*f, p.quota() as usize)).collect();
    let mut load: BTreeMap<FirmId, usize> = BTreeMap::new();
    let mut current: Vec<Option<FirmId>> = Vec::with_capacity(workers.len());
    let mut out = Vec::new();
    descend(&workers, &options, &quota, &mut load, &mut current, market, &mut out);
    out.sort();
    Ok(out)
}

fn descend(
    workers: &[WorkerId],
    options: &[Vec<Option<FirmId>>],
    quota: &BTreeMap<FirmId, usize>,
    load: &mut BTreeMap<FirmId, usize>,
    current: &mut Vec<Option<FirmId>>,
    market: &Market,
    out: &mut Vec<Matching>,
) {
    let depth = current.len();
    if depth == workers.len() {
        let mu = Matching::from_assignment(workers.iter().copied().zip(current.iter().copied()).collect());
        if is_individually_rational(&mu, market) {
            out.push(mu);
        }
        return;
    }
    for choice in &options[depth] {
        if let Some(f) = choice {
            let n = load.entry(*f).or_insert(0);
            if *n >= quota[f] {
                continue;
            }
            *n += 1;
        }
        current.push(*choice);
        descend(workers, options, quota, load, current, market, out);
        current.pop();
        if let Some(f) = choice {
            *load.get_mut(f).expect("counted above") -= 1;
        }
    }
}

/// All stable matchings.
pub fn enumerate_stable(market: &Market, limits: EnumLimits) -> Result<StableSet, Error> {
    let all = enumerate_individually_rational(market, limits)?;
    Ok(StableSet::from_verified(all.into_iter().filter(|mu| is_stable(mu, market)).collect()))
}

/// All firm quasi-stable matchings, sorted.
pub fn enumerate_fqs(market: &Market, limits: EnumLimits) -> Result<Vec<Matching>, Error> {
    let all = enumerate_individually_rational(market, limits)?;
    let mut out = Vec::new();
    for mu in all {
        if is_firm_quasi_stable_with(&mu, market, FqsMode::Auto, DEFAULT_FQS_CAP)? {
            out.push(mu);
        }
    }
    Ok(out)
}

/// Partners `w` has in at least one stable matching (`None` = unmatched).
pub fn achievable_firms(
    worker: WorkerId,
    market: &Market,
    limits: EnumLimits,
) -> Result<BTreeSet<Option<FirmId>>, Error> {
    market.worker(worker)?;
    Ok(achievable_in(&enumerate_stable(market, limits)?, worker))
}

/// Same as [`achievable_firms`] over an already enumerated stable set.
pub fn achievable_in(stable: &StableSet, worker: WorkerId) -> BTreeSet<Option<FirmId>> {
    stable.iter().map(|mu| mu.partner(worker)).collect()
}
