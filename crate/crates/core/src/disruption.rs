//! Worker retirement and firm entry, and what restabilization does to the
//! agents that were already in the market.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::ids::subsets_of;
use crate::lattice::{blair_holds, dominates_workers};
use crate::stability::{is_firm_quasi_stable, is_stable};
use crate::{
    da_firm_proposing, da_worker_proposing, enumerate_stable, run_set_offering, EnumLimits, Error, FirmId,
    FirmPreference, Market, Matching, SoTrace, WorkerId, WorkerPreference, WorkerSet,
};

/// Largest common worker set the consistency check will expand.
pub const DEFAULT_CONSISTENCY_CAP: usize = 8;

/// Whether the two markets agree on everything their common agents can
/// express: acceptable coalitions, firms' rankings of subsets of common
/// workers, and workers' rankings of common firms.
pub fn is_consistent(old: &Market, new: &Market) -> Result<bool, Error> {
    is_consistent_with(old, new, DEFAULT_CONSISTENCY_CAP)
}

pub fn is_consistent_with(old: &Market, new: &Market, cap: usize) -> Result<bool, Error> {
    let firms: BTreeSet<FirmId> = old.firm_ids().filter(|f| new.firms().contains_key(f)).collect();
    let common: Vec<WorkerId> = old.worker_ids().filter(|w| new.workers().contains_key(w)).collect();

    for w in &common {
        let restrict = |p: &WorkerPreference| -> Vec<FirmId> {
            p.ranking().iter().filter(|f| firms.contains(f)).copied().collect()
        };
        if restrict(&old.workers()[w]) != restrict(&new.workers()[w]) {
            return Ok(false);
        }
    }

    if firms.is_empty() {
        return Ok(true);
    }
    if common.len() > cap {
        return Err(Error::SizeGuard { what: "consistency", size: common.len(), cap });
    }
    let sets: Vec<WorkerSet> = subsets_of(&common).collect();
    for f in &firms {
        for s in &sets {
            if old.is_acceptable_coalition(s, *f)? != new.is_acceptable_coalition(s, *f)? {
                return Ok(false);
            }
        }
        let (po, pn) = (&old.firms()[f], &new.firms()[f]);
        for a in &sets {
            for b in &sets {
                if po.compare_sets(a, b) != pn.compare_sets(a, b) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Consistent, no worker joined and no firm left.
pub fn leads_to(old: &Market, new: &Market) -> Result<bool, Error> {
    Ok(leads_to_reason(old, new)?.is_none())
}

fn leads_to_reason(old: &Market, new: &Market) -> Result<Option<&'static str>, Error> {
    if !new.worker_ids().all(|w| old.workers().contains_key(&w)) {
        return Ok(Some("a worker entered"));
    }
    if !old.firm_ids().all(|f| new.firms().contains_key(&f)) {
        return Ok(Some("a firm left"));
    }
    if !is_consistent(old, new)? {
        return Ok(Some("preferences over common agents differ"));
    }
    Ok(None)
}

/// A firm entering the market. Surviving workers listed in `worker_ranks`
/// insert the firm into their ranking at the given index (clamped to the
/// end); everyone else finds it unacceptable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewFirm {
    pub id: FirmId,
    pub preference: FirmPreference,
    pub worker_ranks: BTreeMap<WorkerId, usize>,
}

/// An old market and the market it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarketTransition {
    old: Market,
    new: Market,
}

impl MarketTransition {
    /// Validates the leads-to relation, including the exhaustive consistency
    /// check.
    pub fn new(old: Market, new: Market) -> Result<Self, Error> {
        match leads_to_reason(&old, &new)? {
            Some(why) => Err(Error::NotLeadsTo(why)),
            None => Ok(MarketTransition { old, new }),
        }
    }

    /// Retire `retired`, then open `entrants`. Consistent by construction.
    pub fn disrupt(old: &Market, retired: &WorkerSet, entrants: Vec<NewFirm>) -> Result<Self, Error> {
        for w in retired {
            old.worker(*w)?;
        }
        let survivors: WorkerSet = old.worker_ids().filter(|w| !retired.contains(w)).collect();
        if survivors.is_empty() {
            return Err(Error::NoWorkers);
        }
        let mut firms: BTreeMap<FirmId, FirmPreference> =
            old.firms().iter().map(|(f, p)| (*f, p.restrict_to(&survivors))).collect();
        let mut workers: BTreeMap<WorkerId, WorkerPreference> =
            old.workers().iter().filter(|(w, _)| survivors.contains(w)).map(|(w, p)| (*w, p.clone())).collect();
        for entrant in entrants {
            if firms.contains_key(&entrant.id) {
                return Err(Error::DuplicateFirmId(entrant.id));
            }
            for (w, at) in &entrant.worker_ranks {
                let pref = workers.get_mut(w).ok_or(Error::UnknownWorker(*w))?;
                let mut ranking = pref.ranking().to_vec();
                ranking.insert((*at).min(ranking.len()), entrant.id);
                *pref = WorkerPreference::with_ranking(ranking);
            }
            firms.insert(entrant.id, entrant.preference);
        }
        let new = Market::new(firms, workers)?;
        Ok(MarketTransition { old: old.clone(), new })
    }

    pub fn retire_workers(old: &Market, retired: &WorkerSet) -> Result<Self, Error> {
        Self::disrupt(old, retired, Vec::new())
    }

    pub fn add_firms(old: &Market, entrants: Vec<NewFirm>) -> Result<Self, Error> {
        Self::disrupt(old, &WorkerSet::new(), entrants)
    }

    pub fn old(&self) -> &Market {
        &self.old
    }

    pub fn new_market(&self) -> &Market {
        &self.new
    }

    pub fn retired(&self) -> WorkerSet {
        self.old.worker_ids().filter(|w| !self.new.workers().contains_key(w)).collect()
    }

    pub fn entrants(&self) -> BTreeSet<FirmId> {
        self.new.firm_ids().filter(|f| !self.old.firms().contains_key(f)).collect()
    }
}

/// The new-market matching that keeps every surviving worker's partner.
pub fn induce(mu_old: &Matching, t: &MarketTransition) -> Result<Matching, Error> {
    mu_old.check_valid(&t.old)?;
    Ok(Matching::from_assignment(t.new.worker_ids().map(|w| (w, mu_old.partner(w))).collect()))
}

/// Induce, then run Set Offering in the new market.
pub fn restabilize(mu_old: &Matching, t: &MarketTransition) -> Result<SoTrace, Error> {
    mu_old.check_valid(&t.old)?;
    if !is_stable(mu_old, &t.old) {
        return Err(Error::NotStable);
    }
    crate::set_offering(&t.new, &induce(mu_old, t)?)
}

/// A counterexample attached to a failed assertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Worker { worker: WorkerId, observed: Option<FirmId>, compared: Option<FirmId> },
    Firm { firm: FirmId, observed: WorkerSet, compared: WorkerSet },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertionOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

impl AssertionOutcome {
    fn from_witnesses(name: &'static str, witnesses: Vec<Witness>) -> Self {
        AssertionOutcome { name, passed: witnesses.is_empty(), witnesses }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionReport {
    pub assertions: Vec<AssertionOutcome>,
    pub trace: SoTrace,
    pub induced: Matching,
}

impl TransitionReport {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AssertionOutcome> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

pub const INDUCED_FQS: &str = "induced_fqs";
pub const OUTPUT_STABLE: &str = "output_stable";
pub const WORKERS_GAIN: &str = "workers_weakly_gain";
pub const INCUMBENTS_LOSE: &str = "incumbents_blair_lose";
pub const ENTRANTS_FIRM_OPTIMAL: &str = "entrants_get_firm_optimal";
pub const WORKER_CLOSED_FORM: &str = "worker_closed_form";
pub const MONOTONE: &str = "monotone_in_old_matching";
pub const WORKER_OPTIMAL_SHIFT: &str = "worker_optimal_shift";

/// Checks every restabilization property on one instance. Violations are
/// reported, not returned as errors; errors are reserved for precondition
/// failures and size guards.
///
/// Cross-market comparisons range over surviving workers under the new
/// preferences and over incumbent firms under the old ones.
pub fn verify_transition_theorems(
    mu_old: &Matching,
    t: &MarketTransition,
    limits: EnumLimits,
) -> Result<TransitionReport, Error> {
    verify_with_oracles(mu_old, t, limits, da_firm_proposing(&t.new))
}

/// As [`verify_transition_theorems`], with the new market's firm-optimal
/// matching supplied by the caller.
pub fn verify_with_oracles(
    mu_old: &Matching,
    t: &MarketTransition,
    limits: EnumLimits,
    new_firm_optimal: Matching,
) -> Result<TransitionReport, Error> {
    let (old, new) = (&t.old, &t.new);
    mu_old.check_valid(old)?;
    if !is_stable(mu_old, old) {
        return Err(Error::NotStable);
    }
    let induced = induce(mu_old, t)?;
    let mut assertions = Vec::new();

    let induced_ok = is_firm_quasi_stable(&induced, new)?;
    assertions.push(AssertionOutcome { name: INDUCED_FQS, passed: induced_ok, witnesses: Vec::new() });

    let trace = run_set_offering(new, &induced);
    let out = &trace.output;
    assertions.push(AssertionOutcome { name: OUTPUT_STABLE, passed: is_stable(out, new), witnesses: Vec::new() });

    // (a) survivors weakly gain relative to the old matching
    assertions.push(AssertionOutcome::from_witnesses(WORKERS_GAIN, worker_losses(out, mu_old, new)));

    // (b) the old matching Blair-dominates the outcome for incumbents
    assertions.push(AssertionOutcome::from_witnesses(INCUMBENTS_LOSE, blair_failures(mu_old, out, old)));

    // (c) entrants get exactly their firm-optimal assignment
    let mu_f = new_firm_optimal;
    let entrant_misses = t
        .entrants()
        .into_iter()
        .filter_map(|f| {
            let (got, want) = (out.firm_set(f), mu_f.firm_set(f));
            (got != want).then_some(Witness::Firm { firm: f, observed: got, compared: want })
        })
        .collect();
    assertions.push(AssertionOutcome::from_witnesses(ENTRANTS_FIRM_OPTIMAL, entrant_misses));

    // (d) each survivor gets the better of their induced and firm-optimal partners
    let formula_misses = new
        .workers()
        .iter()
        .filter_map(|(w, p)| {
            let want = p.better(induced.partner(*w), mu_f.partner(*w));
            let got = out.partner(*w);
            (got != want).then_some(Witness::Worker { worker: *w, observed: got, compared: want })
        })
        .collect();
    assertions.push(AssertionOutcome::from_witnesses(WORKER_CLOSED_FORM, formula_misses));

    // (e) worker-ordered old stable matchings give worker-ordered outcomes
    let old_stable = enumerate_stable(old, limits)?;
    let outcomes: Vec<Matching> =
        old_stable.iter().map(|mu| Ok(run_set_offering(new, &induce(mu, t)?).output)).collect::<Result<_, Error>>()?;
    let mut order_misses = Vec::new();
    for (i, a) in old_stable.iter().enumerate() {
        for (j, b) in old_stable.iter().enumerate() {
            if i != j && dominates_workers(a, b, old) {
                order_misses.extend(worker_losses(&outcomes[i], &outcomes[j], new));
            }
        }
    }
    order_misses.dedup();
    assertions.push(AssertionOutcome::from_witnesses(MONOTONE, order_misses));

    // (f) worker-optimal matchings: survivors gain, incumbents Blair-lose
    let new_w = da_worker_proposing(new);
    let old_w = da_worker_proposing(old);
    let mut shift = worker_losses(&new_w, &old_w, new);
    shift.extend(blair_failures(&old_w, &new_w, old));
    assertions.push(AssertionOutcome::from_witnesses(WORKER_OPTIMAL_SHIFT, shift));

    Ok(TransitionReport { assertions, trace, induced })
}

// Workers of `market` who strictly prefer `worse_expected` to `better_expected`.
fn worker_losses(better_expected: &Matching, worse_expected: &Matching, market: &Market) -> Vec<Witness> {
    market
        .workers()
        .iter()
        .filter(|(w, p)| p.prefers(worse_expected.partner(**w), better_expected.partner(**w)))
        .map(|(w, _)| Witness::Worker {
            worker: *w,
            observed: better_expected.partner(*w),
            compared: worse_expected.partner(*w),
        })
        .collect()
}

// Firms of `prefs` for which `dominant` fails to Blair-dominate `other`.
fn blair_failures(dominant: &Matching, other: &Matching, prefs: &Market) -> Vec<Witness> {
    prefs
        .firm_ids()
        .filter(|f| !blair_holds(dominant, other, *f, prefs))
        .map(|f| Witness::Firm { firm: f, observed: dominant.firm_set(f), compared: other.firm_set(f) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{join_workers, responsive_market, workers};
    use alloc::vec;

    fn base() -> Market {
        responsive_market(&[(1, &[0, 1, 2]), (2, &[1, 2, 0]), (1, &[2, 0])], &[&[0, 1], &[1, 0, 2], &[2, 0, 1]])
            .unwrap()
    }

    #[test]
    fn identity_is_consistent_and_leads_to_itself() {
        let m = base();
        assert!(is_consistent(&m, &m).unwrap());
        assert!(leads_to(&m, &m).unwrap());
        let t = MarketTransition::new(m.clone(), m.clone()).unwrap();
        let mu = da_firm_proposing(&m);
        assert_eq!(induce(&mu, &t).unwrap(), mu);
        assert_eq!(restabilize(&mu, &t).unwrap().output, mu);
        let report = verify_transition_theorems(&mu, &t, EnumLimits::default()).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn retirement_is_consistent() {
        let m = base();
        let t = MarketTransition::retire_workers(&m, &workers([1])).unwrap();
        assert!(is_consistent(t.old(), t.new_market()).unwrap());
        assert!(leads_to(t.old(), t.new_market()).unwrap());
        assert_eq!(t.retired(), workers([1]));
        // the reverse direction adds a worker
        assert!(!leads_to(t.new_market(), t.old()).unwrap());
        assert!(matches!(MarketTransition::new(t.new_market().clone(), m), Err(Error::NotLeadsTo("a worker entered"))));
    }

    #[test]
    fn adding_a_firm_leads_to() {
        let m = base();
        let entrant = NewFirm {
            id: FirmId(3),
            preference: FirmPreference::responsive(1, vec![WorkerId(0)]).unwrap(),
            worker_ranks: [(WorkerId(0), 0)].into(),
        };
        let t = MarketTransition::add_firms(&m, vec![entrant]).unwrap();
        assert!(leads_to(t.old(), t.new_market()).unwrap());
        assert_eq!(t.entrants(), [FirmId(3)].into());
        assert_eq!(t.new_market().workers()[&WorkerId(0)].ranking()[0], FirmId(3));
    }

    #[test]
    fn swapped_ranking_is_inconsistent() {
        let m = base();
        let swapped =
            responsive_market(&[(1, &[1, 0, 2]), (2, &[1, 2, 0]), (1, &[2, 0])], &[&[0, 1], &[1, 0, 2], &[2, 0, 1]])
                .unwrap();
        assert!(!is_consistent(&m, &swapped).unwrap());
        assert!(!leads_to(&m, &swapped).unwrap());
    }

    #[test]
    fn worker_reordering_is_inconsistent() {
        let m = base();
        let other =
            responsive_market(&[(1, &[0, 1, 2]), (2, &[1, 2, 0]), (1, &[2, 0])], &[&[1, 0], &[1, 0, 2], &[2, 0, 1]])
                .unwrap();
        assert!(!is_consistent(&m, &other).unwrap());
    }

    #[test]
    fn retiring_a_firms_workers_empties_it() {
        let m = base();
        let mu = da_firm_proposing(&m);
        let gone = mu.firm_set(FirmId(0));
        let t = MarketTransition::retire_workers(&m, &gone).unwrap();
        let induced = induce(&mu, &t).unwrap();
        assert!(induced.firm_set(FirmId(0)).is_empty());
        assert!(is_firm_quasi_stable(&induced, t.new_market()).unwrap());
    }

    #[test]
    fn unwanted_entrant_changes_nothing() {
        let m = base();
        let mu = da_worker_proposing(&m);
        let entrant = NewFirm {
            id: FirmId(9),
            preference: FirmPreference::responsive(2, vec![WorkerId(0), WorkerId(1)]).unwrap(),
            worker_ranks: BTreeMap::new(),
        };
        let t = MarketTransition::add_firms(&m, vec![entrant]).unwrap();
        let trace = restabilize(&mu, &t).unwrap();
        assert_eq!(trace.output, induce(&mu, &t).unwrap());
    }

    #[test]
    fn retirement_closed_form() {
        let m = base();
        let mu = da_worker_proposing(&m);
        let t = MarketTransition::retire_workers(&m, &workers([0])).unwrap();
        let induced = induce(&mu, &t).unwrap();
        let trace = restabilize(&mu, &t).unwrap();
        assert_eq!(trace.output, join_workers(&induced, &da_firm_proposing(t.new_market()), t.new_market()));
        let report = verify_transition_theorems(&mu, &t, EnumLimits::default()).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn wrong_firm_optimum_is_reported() {
        let m = base();
        let mu = da_firm_proposing(&m);
        let entrant = NewFirm {
            id: FirmId(3),
            preference: FirmPreference::responsive(1, vec![WorkerId(0)]).unwrap(),
            worker_ranks: [(WorkerId(0), 0)].into(),
        };
        let t = MarketTransition::add_firms(&m, vec![entrant]).unwrap();
        let honest = verify_transition_theorems(&mu, &t, EnumLimits::default()).unwrap();
        assert!(honest.all_passed(), "{honest:?}");
        let bogus = Matching::empty(t.new_market());
        let report = verify_with_oracles(&mu, &t, EnumLimits::default(), bogus).unwrap();
        assert!(!report.get(WORKER_CLOSED_FORM).unwrap().passed);
        assert!(!report.get(ENTRANTS_FIRM_OPTIMAL).unwrap().passed);
        assert!(report.get(MONOTONE).unwrap().passed);
    }

    #[test]
    fn unstable_old_matching_is_rejected() {
        let m = base();
        let t = MarketTransition::new(m.clone(), m.clone()).unwrap();
        assert_eq!(restabilize(&Matching::empty(&m), &t), Err(Error::NotStable));
    }
}
