//! Brute-force checks of substitutability and q-separability.
//!
//! These enumerate every subset of the market's workers and are meant for
//! small instances, so they refuse to run above a configurable worker count.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ids::subsets_of;
use crate::{Error, FirmPreference, FirmPreferenceBody, Market, WorkerId, WorkerSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidatorCaps {
    pub substitutable: usize,
    pub q_separable: usize,
}

impl Default for ValidatorCaps {
    fn default() -> Self {
        ValidatorCaps { substitutable: 12, q_separable: 10 }
    }
}

fn guard(what: &'static str, size: usize, cap: usize) -> Result<(), Error> {
    if size > cap {
        Err(Error::SizeGuard { what, size, cap })
    } else {
        Ok(())
    }
}

pub fn validate_substitutable(pref: &FirmPreference, market: &Market) -> Result<bool, Error> {
    validate_substitutable_with(pref, market, ValidatorCaps::default().substitutable)
}

/// Responsive preferences are substitutable by construction; explicit ones
/// go through [`check_substitutable_exhaustive`].
pub fn validate_substitutable_with(pref: &FirmPreference, market: &Market, cap: usize) -> Result<bool, Error> {
    if pref.is_responsive() {
        return Ok(true);
    }
    check_substitutable_exhaustive(pref, market, cap)
}

/// For all `S` and `w ≠ w̄` in `S`: `w ∈ Ch(S)` implies `w ∈ Ch(S ∖ {w̄})`.
pub fn check_substitutable_exhaustive(pref: &FirmPreference, market: &Market, cap: usize) -> Result<bool, Error> {
    let all: Vec<WorkerId> = market.worker_ids().collect();
    guard("substitutability", all.len(), cap)?;
    for set in subsets_of(&all) {
        let chosen = pref.choice(&set);
        for dropped in &set {
            let mut smaller = set.clone();
            smaller.remove(dropped);
            let rechosen = pref.choice(&smaller);
            if chosen.iter().any(|w| w != dropped && !rechosen.contains(w)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn validate_q_separable(pref: &FirmPreference, market: &Market) -> Result<bool, Error> {
    validate_q_separable_with(pref, market, ValidatorCaps::default().q_separable)
}

/// (a) for `|S| < q` and `w ∉ S`: `S ∪ {w} P S` iff `w P ∅`;
/// (b) every set larger than the quota ranks below `∅`.
pub fn validate_q_separable_with(pref: &FirmPreference, market: &Market, cap: usize) -> Result<bool, Error> {
    let order = match pref.body() {
        FirmPreferenceBody::Responsive(_) => return Ok(true),
        FirmPreferenceBody::ExplicitSubsets(order) => order,
    };
    let all: Vec<WorkerId> = market.worker_ids().collect();
    guard("q-separability", all.len(), cap)?;
    let q = pref.quota() as usize;
    let pos: BTreeMap<&WorkerSet, usize> = order.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let empty = WorkerSet::new();
    let Some(&empty_pos) = pos.get(&empty) else {
        return Ok(false);
    };
    if order.iter().enumerate().any(|(i, s)| s.len() > q && i < empty_pos) {
        return Ok(false);
    }
    let good = |w: WorkerId| {
        let single: WorkerSet = core::iter::once(w).collect();
        pos.get(&single).is_some_and(|p| *p < empty_pos)
    };
    for set in subsets_of(&all).filter(|s| s.len() < q) {
        let Some(&base) = pos.get(&set) else {
            return Ok(false);
        };
        for w in all.iter().filter(|w| !set.contains(w)) {
            let mut bigger = set.clone();
            bigger.insert(*w);
            let improves = match pos.get(&bigger) {
                Some(p) => *p < base,
                None => false,
            };
            if improves != good(*w) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Both validators for every firm of the market.
pub fn validate_market(market: &Market, caps: ValidatorCaps) -> Result<bool, Error> {
    for pref in market.firms().values() {
        if !validate_substitutable_with(pref, market, caps.substitutable)?
            || !validate_q_separable_with(pref, market, caps.q_separable)?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{responsive_market, workers, FirmId, WorkerPreference};
    use alloc::vec;

    fn explicit_market(quota: u32, order: Vec<WorkerSet>, n: u32) -> Market {
        Market::from_parts(
            [(FirmId(0), FirmPreference::explicit(quota, order))],
            (0..n).map(|i| (WorkerId(i), WorkerPreference::new(vec![FirmId(0)]))),
        )
        .unwrap()
    }

    #[test]
    fn responsive_passes_both() {
        let m = responsive_market(&[(2, &[2, 0, 1])], &[&[0], &[0], &[0]]).unwrap();
        let p = &m.firms()[&FirmId(0)];
        assert!(validate_substitutable(p, &m).unwrap());
        assert!(validate_q_separable(p, &m).unwrap());
        // and the exhaustive route agrees
        assert!(check_substitutable_exhaustive(p, &m, 12).unwrap());
    }

    #[test]
    fn complements_are_not_substitutable() {
        // {w1,w2} > ∅ > {w1} > {w2}
        let order = vec![workers([1, 2]), workers([]), workers([1]), workers([2])];
        let m = Market::from_parts(
            [(FirmId(0), FirmPreference::explicit(2, order))],
            [1, 2].map(|i| (WorkerId(i), WorkerPreference::new(vec![FirmId(0)]))),
        )
        .unwrap();
        let p = &m.firms()[&FirmId(0)];
        assert!(!validate_substitutable(p, &m).unwrap());
    }

    #[test]
    fn explicit_copy_of_responsive_passes() {
        // responsive w0 > w1 > w2, q = 2, spelled out by lexicographic rank vectors
        let order = vec![
            workers([0, 1]),
            workers([0, 2]),
            workers([0]),
            workers([1, 2]),
            workers([1]),
            workers([2]),
            workers([]),
        ];
        let m = explicit_market(2, order, 3);
        let p = &m.firms()[&FirmId(0)];
        assert!(validate_substitutable(p, &m).unwrap());
        assert!(validate_q_separable(p, &m).unwrap());
    }

    #[test]
    fn oversized_set_above_empty_breaks_separability() {
        let order = vec![workers([0, 1]), workers([0]), workers([1]), workers([])];
        let m = explicit_market(1, order, 2);
        let p = &m.firms()[&FirmId(0)];
        assert!(!validate_q_separable(p, &m).unwrap());
    }

    #[test]
    fn adding_a_good_worker_must_help() {
        // q = 2, w0 and w1 are good, but {w0,w1} ranks below {w0}.
        let order = vec![
            workers([0]),
            workers([0, 1]),
            workers([1]),
            workers([]),
            workers([0, 2]),
            workers([1, 2]),
            workers([2]),
        ];
        let m = explicit_market(2, order, 3);
        let p = &m.firms()[&FirmId(0)];
        assert!(!validate_q_separable(p, &m).unwrap());
    }

    #[test]
    fn guards_trip() {
        let order = vec![workers([]), workers([0]), workers([1]), workers([2])];
        let m = explicit_market(1, order, 3);
        let p = &m.firms()[&FirmId(0)];
        assert!(matches!(validate_substitutable_with(p, &m, 2), Err(Error::SizeGuard { .. })));
        assert!(matches!(validate_q_separable_with(p, &m, 2), Err(Error::SizeGuard { .. })));
    }
}
