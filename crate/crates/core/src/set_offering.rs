//! The Set Offering restabilization algorithm.
//!
//! Starting from a firm quasi-stable matching, every firm repeatedly offers
//! positions to the workers it would add from its still-available pool;
//! offered workers keep the best of their current job and the offers; a
//! firm never re-approaches a worker it has already offered to. The loop
//! stops once no firm wants to make an offer.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ids::subsets_of;
use crate::stability::{fqs_violation, is_individually_rational, FqsMode, DEFAULT_FQS_CAP};
use crate::{Error, FirmId, Market, Matching, WorkerId, WorkerSet};

/// One pass of the main loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoIteration {
    /// `S_f`: workers each firm offers to, for every firm.
    pub offers: BTreeMap<FirmId, WorkerSet>,
    /// `A_f`: the availability pools the offers were drawn from.
    pub available: BTreeMap<FirmId, WorkerSet>,
    /// The matching after workers answered. Equal to the previous matching
    /// on the final, offer-free pass.
    pub matching: Matching,
}

impl SoIteration {
    pub fn has_offers(&self) -> bool {
        self.offers.values().any(|s| !s.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoTrace {
    pub input: Matching,
    pub iterations: Vec<SoIteration>,
    pub output: Matching,
}

impl SoTrace {
    /// Number of passes in which some firm made an offer.
    pub fn offer_rounds(&self) -> usize {
        self.iterations.iter().filter(|it| it.has_offers()).count()
    }

    /// Number of passes in which at least one worker changed jobs.
    pub fn vacancy_chain_length(&self) -> usize {
        self.matchings().zip(self.matchings().skip(1)).filter(|(a, b)| a != b).count()
    }

    /// `μ^0, μ^1, …, μ^k`, without the repeated final matching.
    pub fn matchings(&self) -> impl Iterator<Item = &Matching> {
        let n = self.iterations.len().saturating_sub(1);
        core::iter::once(&self.input).chain(self.iterations[..n].iter().map(|it| &it.matching))
    }
}

/// Runs Set Offering from `mu0`, which must be firm quasi-stable.
pub fn set_offering(market: &Market, mu0: &Matching) -> Result<SoTrace, Error> {
    mu0.check_valid(market)?;
    if !is_individually_rational(mu0, market) {
        let firm = first_irrational_firm(mu0, market);
        return Err(Error::NotFirmQuasiStable {
            firm,
            held: mu0.firm_set(firm).into_iter().collect(),
            envious: Vec::new(),
        });
    }
    if let Some((firm, envious)) = fqs_violation(mu0, market, FqsMode::Auto, DEFAULT_FQS_CAP)? {
        return Err(Error::NotFirmQuasiStable {
            firm,
            held: mu0.firm_set(firm).into_iter().collect(),
            envious: envious.into_iter().collect(),
        });
    }
    Ok(run_set_offering(market, mu0))
}

fn first_irrational_firm(mu: &Matching, market: &Market) -> FirmId {
    market
        .firms()
        .iter()
        .find(|(f, p)| {
            let held = mu.firm_set(**f);
            p.choice(&held) != held
        })
        .map(|(f, _)| *f)
        .or_else(|| {
            // a worker holds an unacceptable firm
            market.workers().iter().find(|(w, p)| p.prefers(None, mu.partner(**w))).and_then(|(w, _)| mu.partner(*w))
        })
        .unwrap_or(FirmId(u32::MAX))
}

/// Set Offering without the firm quasi-stability precondition check.
///
/// Always terminates: every pass with offers strictly shrinks some pool.
pub fn run_set_offering(market: &Market, mu0: &Matching) -> SoTrace {
    let mut current = mu0.clone();
    let mut available = initial_available(market, mu0);
    let mut iterations = Vec::new();
    loop {
        let offers: BTreeMap<FirmId, WorkerSet> = market
            .firms()
            .iter()
            .map(|(f, pref)| {
                let held = current.firm_set(*f);
                let mut pool = available[f].clone();
                pool.extend(held.iter().copied());
                let wanted: WorkerSet = pref.choice(&pool).difference(&held).copied().collect();
                (*f, wanted)
            })
            .collect();
        if offers.values().all(|s| s.is_empty()) {
            iterations.push(SoIteration { offers, available, matching: current.clone() });
            break;
        }
        let mut received: BTreeMap<WorkerId, Vec<FirmId>> = BTreeMap::new();
        for (f, ws) in &offers {
            for w in ws {
                received.entry(*w).or_default().push(*f);
            }
        }
        let mut next = current.clone();
        for (w, firms) in received {
            let pref = &market.workers()[&w];
            let best = firms.iter().fold(current.partner(w), |best, f| pref.better(best, Some(*f)));
            next.assign(w, best);
        }
        let shrunk: BTreeMap<FirmId, WorkerSet> =
            available.iter().map(|(f, pool)| (*f, pool.difference(&offers[f]).copied().collect())).collect();
        iterations.push(SoIteration { offers, available, matching: next.clone() });
        available = shrunk;
        current = next;
    }
    SoTrace { input: mu0.clone(), iterations, output: current }
}

/// `A_f^0`: workers not at `f` that the firm finds individually acceptable.
///
/// Under q-separability with `q_f ≥ 1` this coincides with the existential
/// definition in [`initial_available_literal`].
pub fn initial_available(market: &Market, mu0: &Matching) -> BTreeMap<FirmId, WorkerSet> {
    market
        .firms()
        .iter()
        .map(|(f, pref)| {
            let pool = market.worker_ids().filter(|w| mu0.partner(*w) != Some(*f) && pref.accepts(*w)).collect();
            (*f, pool)
        })
        .collect()
}

/// `A_f^0` straight from its definition: `w ∉ μ0(f)` and some `S` with
/// `|S| < q_f` has `S ∪ {w} P(f) S`. Exponential in the number of workers.
pub fn initial_available_literal(
    market: &Market,
    mu0: &Matching,
    cap: usize,
) -> Result<BTreeMap<FirmId, WorkerSet>, Error> {
    let all: Vec<WorkerId> = market.worker_ids().collect();
    if all.len() > cap {
        return Err(Error::SizeGuard { what: "availability sets", size: all.len(), cap });
    }
    let mut out = BTreeMap::new();
    for (f, pref) in market.firms() {
        let q = pref.quota() as usize;
        let small: Vec<WorkerSet> = subsets_of(&all).filter(|s| s.len() < q).collect();
        let pool = all
            .iter()
            .copied()
            .filter(|w| mu0.partner(*w) != Some(*f))
            .filter(|w| {
                small.iter().any(|s| {
                    let mut bigger = s.clone();
                    bigger.insert(*w);
                    pref.compare_sets(&bigger, s) == Ok(core::cmp::Ordering::Greater)
                })
            })
            .collect();
        out.insert(*f, pool);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{da_firm_proposing, is_stable, join_workers, responsive_market, workers};

    #[test]
    fn stable_input_is_a_fixed_point() {
        let m = responsive_market(&[(1, &[0, 1]), (1, &[1, 0])], &[&[1, 0], &[0, 1]]).unwrap();
        let mu = Matching::from_pairs(&m, [(WorkerId(0), FirmId(1)), (WorkerId(1), FirmId(0))]);
        let trace = set_offering(&m, &mu).unwrap();
        assert_eq!(trace.output, mu);
        assert_eq!(trace.vacancy_chain_length(), 0);
        assert!(trace.matchings().all(|x| *x == mu));
        // f0 still courts w0, who declines
        assert_eq!(trace.offer_rounds(), 1);
        assert_eq!(trace.iterations.len(), 2);
        assert!(!trace.iterations.last().unwrap().has_offers());
    }

    #[test]
    fn stable_input_without_courting_has_a_single_pass() {
        let m = responsive_market(&[(1, &[0, 1]), (1, &[1, 0])], &[&[1, 0], &[0, 1]]).unwrap();
        let mu = Matching::from_pairs(&m, [(WorkerId(0), FirmId(0)), (WorkerId(1), FirmId(1))]);
        let trace = set_offering(&m, &mu).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(trace.offer_rounds(), 0);
        assert_eq!(trace.output, mu);
    }

    #[test]
    fn empty_input_reaches_firm_optimum() {
        let m = responsive_market(
            &[(2, &[0, 1, 2, 3]), (1, &[3, 2, 1, 0]), (1, &[1, 3, 0])],
            &[&[1, 0, 2], &[0, 2], &[1, 0], &[2, 0, 1]],
        )
        .unwrap();
        let trace = set_offering(&m, &Matching::empty(&m)).unwrap();
        assert_eq!(trace.output, da_firm_proposing(&m));
        assert!(is_stable(&trace.output, &m));
        assert_eq!(trace.matchings().next(), Some(&trace.input));
    }

    #[test]
    fn vacancy_chain_after_a_retirement() {
        // f0 wants only w0; f1 ranks w0 > w1; f2 wants only w1.
        // f0 opens up: w0 moves there, f1 then hires w1 away from f2.
        let m = responsive_market(&[(1, &[0]), (1, &[0, 1]), (1, &[1])], &[&[0, 1], &[1, 2]]).unwrap();
        let mu = Matching::from_pairs(&m, [(WorkerId(0), FirmId(1)), (WorkerId(1), FirmId(2))]);
        let trace = set_offering(&m, &mu).unwrap();
        assert_eq!(trace.output.partner(WorkerId(0)), Some(FirmId(0)));
        assert_eq!(trace.output.partner(WorkerId(1)), Some(FirmId(1)));
        assert_eq!(trace.vacancy_chain_length(), 2);
        assert_eq!(trace.output, join_workers(&mu, &da_firm_proposing(&m), &m));
        assert_eq!(trace.iterations[0].offers[&FirmId(0)], workers([0]));
    }

    #[test]
    fn rejects_non_quasi_stable_input() {
        let m = responsive_market(&[(1, &[0, 1])], &[&[0], &[0]]).unwrap();
        let mu = Matching::from_pairs(&m, [(WorkerId(1), FirmId(0))]);
        match set_offering(&m, &mu) {
            Err(Error::NotFirmQuasiStable { firm, held, envious }) => {
                assert_eq!(firm, FirmId(0));
                assert_eq!(held, [WorkerId(1)]);
                assert_eq!(envious, [WorkerId(0)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let over = Matching::from_pairs(&m, [(WorkerId(0), FirmId(0)), (WorkerId(1), FirmId(0))]);
        assert!(matches!(set_offering(&m, &over), Err(Error::NotFirmQuasiStable { .. })));
    }

    #[test]
    fn availability_shortcut_matches_definition() {
        let m = responsive_market(&[(2, &[0, 2]), (1, &[1])], &[&[0], &[1, 0], &[]]).unwrap();
        let mu = Matching::from_pairs(&m, [(WorkerId(0), FirmId(0))]);
        assert_eq!(initial_available(&m, &mu), initial_available_literal(&m, &mu, 10).unwrap());
        assert_eq!(initial_available(&m, &mu)[&FirmId(0)], workers([2]));
    }
}
