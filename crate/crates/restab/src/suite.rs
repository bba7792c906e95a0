//! Runs every lattice, Set Offering and transition property over a batch
//! of generated trials and tallies the results per theorem.

use std::collections::BTreeMap;

use rayon::prelude::*;
use restab_core::disruption::verify_with_oracles;
use restab_core::{
    da_firm_proposing, da_worker_proposing, dominates_workers, enumerate_fqs, enumerate_stable, is_firm_quasi_stable,
    is_stable, join_workers, meet_workers, run_set_offering, EnumLimits, Error, Market, Matching,
};
use serde::{Deserialize, Serialize};

use crate::error::{RestabError, Result};
use crate::generate::{generate_trial, GeneratedTransition, ScenarioConfig, Skip};
use crate::json::{MarketDto, MatchingDto, TransitionDto};

pub const DA_EXTREMES: &str = "da_matches_lattice_extremes";
pub const POLARIZATION: &str = "polarization";
pub const RURAL_HOSPITALS: &str = "rural_hospitals";
pub const LATTICE_CLOSURE: &str = "lattice_closure";
pub const STABLE_IS_FQS: &str = "stable_is_fqs";
pub const MIXED_JOIN: &str = "mixed_join_stable";
pub const SO_OUTPUT_STABLE: &str = "so_output_stable";
pub const CLOSED_FORM: &str = "so_closed_form";
pub const WORST_POINT: &str = "so_worst_point";
pub const TRACE_FQS: &str = "trace_intermediates_fqs";
pub const TRACE_MONOTONE: &str = "trace_worker_monotone";
/// A generated transition could not be verified at all.
pub const TRANSITION_SETUP: &str = "transition_setup";

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub limits: EnumLimits,
    /// Harness self-test: hand the checks the worker-optimal matching where
    /// they expect the firm-optimal one, which must produce failures.
    pub corrupt_oracle: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremCounts {
    /// Trials in which every instance of the theorem held.
    pub trials_passed: u32,
    pub trials_failed: u32,
    /// Individual checks made (matchings, pairs or assertions).
    pub instances: u64,
    pub instance_failures: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedTrial {
    pub trial: u32,
    pub reason: String,
}

/// The first violation of a theorem in a trial, with everything needed to
/// replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: u32,
    pub theorem: String,
    pub detail: String,
    pub market: MarketDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matching: Option<MatchingDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<TransitionDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: ScenarioConfig,
    pub trials_run: u32,
    pub skipped: Vec<SkippedTrial>,
    pub theorems: BTreeMap<String, TheoremCounts>,
    pub failures: Vec<FailureRecord>,
    pub all_passed: bool,
}

impl SuiteReport {
    pub fn counts(&self, theorem: &str) -> TheoremCounts {
        self.theorems.get(theorem).cloned().unwrap_or_default()
    }
}

/// Runs all checks over `cfg.n_trials` trials. Trials run in parallel and
/// are reported in trial order. Theorem violations are data; errors are
/// reserved for bad configurations and size guards.
pub fn run_theorem_suite(cfg: &ScenarioConfig, opts: SuiteOptions) -> Result<SuiteReport> {
    cfg.validate()?;
    let entrants = cfg.transition_spec.map_or(0, |s| s.add_firm_count);
    if cfg.n_workers as usize > opts.limits.max_workers || (cfg.n_firms + entrants) as usize > opts.limits.max_firms {
        let (size, cap) = if cfg.n_workers as usize > opts.limits.max_workers {
            (cfg.n_workers as usize, opts.limits.max_workers)
        } else {
            ((cfg.n_firms + entrants) as usize, opts.limits.max_firms)
        };
        return Err(RestabError::Precondition(Error::SizeGuard { what: "market", size, cap }));
    }

    let outcomes: Vec<Result<TrialLog, (u32, Skip)>> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| generate_trial(cfg, t, opts.limits).map(|trial| check_trial(&trial, opts)).map_err(|s| (t, s)))
        .collect();

    let mut report = SuiteReport {
        config: cfg.clone(),
        trials_run: 0,
        skipped: Vec::new(),
        theorems: BTreeMap::new(),
        failures: Vec::new(),
        all_passed: true,
    };
    for outcome in outcomes {
        match outcome {
            Err((trial, Skip(reason))) => report.skipped.push(SkippedTrial { trial, reason }),
            Ok(log) => {
                report.trials_run += 1;
                for (name, (instances, failed)) in log.tallies {
                    let c = report.theorems.entry(name.to_string()).or_default();
                    c.instances += instances;
                    c.instance_failures += failed;
                    if failed == 0 {
                        c.trials_passed += 1;
                    } else {
                        c.trials_failed += 1;
                    }
                }
                report.failures.extend(log.failures);
            }
        }
    }
    report.all_passed = report.failures.is_empty();
    Ok(report)
}

struct TrialLog {
    trial: u32,
    market: MarketDto,
    transition: Option<TransitionDto>,
    tallies: BTreeMap<String, (u64, u64)>,
    failures: Vec<FailureRecord>,
}

impl TrialLog {
    fn check(&mut self, name: &str, ok: bool, matching: Option<&Matching>, detail: impl FnOnce() -> String) {
        let tally = self.tallies.entry(name.to_string()).or_default();
        tally.0 += 1;
        if ok {
            return;
        }
        tally.1 += 1;
        if tally.1 == 1 {
            self.failures.push(FailureRecord {
                trial: self.trial,
                theorem: name.to_string(),
                detail: detail(),
                market: self.market.clone(),
                matching: matching.map(Into::into),
                transition: self.transition.clone(),
            });
        }
    }
}

fn check_trial(trial: &crate::generate::Trial, opts: SuiteOptions) -> TrialLog {
    let mut log = TrialLog {
        trial: trial.index,
        market: MarketDto::from(&trial.market),
        transition: trial.transition.as_ref().map(|g| g.spec.clone()),
        tallies: BTreeMap::new(),
        failures: Vec::new(),
    };
    if let Err(e) = check_market(&mut log, &trial.market, opts) {
        log.check(TRANSITION_SETUP, false, None, || format!("enumeration failed: {e}"));
    }
    if let Some(gen) = &trial.transition {
        check_transition(&mut log, gen, opts);
    }
    log
}

fn check_market(log: &mut TrialLog, m: &Market, opts: SuiteOptions) -> Result<(), Error> {
    let stable = enumerate_stable(m, opts.limits)?;
    let fqs = enumerate_fqs(m, opts.limits)?;
    let mu_f = da_firm_proposing(m);
    let mu_w = da_worker_proposing(m);
    let reference = if opts.corrupt_oracle { &mu_w } else { &mu_f };

    log.check(DA_EXTREMES, stable.firm_best(m) == Some(&mu_f), Some(&mu_f), || {
        "firm-proposing deferred acceptance is not the firm-best stable matching".into()
    });
    log.check(DA_EXTREMES, stable.worker_best(m) == Some(&mu_w), Some(&mu_w), || {
        "worker-proposing deferred acceptance is not the worker-best stable matching".into()
    });
    log.check(POLARIZATION, stable.worker_worst(m) == Some(&mu_f), Some(&mu_f), || {
        "firm-optimal matching is not the worker-worst stable matching".into()
    });
    log.check(POLARIZATION, stable.firm_worst(m) == Some(&mu_w), Some(&mu_w), || {
        "worker-optimal matching is not the firm-worst stable matching".into()
    });

    for a in &stable {
        log.check(STABLE_IS_FQS, fqs.contains(a), Some(a), || "stable matching missing from the FQS set".into());
        for b in &stable {
            let rural = m.firm_ids().all(|f| {
                let (sa, sb) = (a.firm_set(f), b.firm_set(f));
                sa.len() == sb.len() && (sa.len() >= m.firms()[&f].quota() as usize || sa == sb)
            });
            log.check(RURAL_HOSPITALS, rural, Some(a), || "stable matchings fill firms differently".into());
            let closed = stable.contains(&join_workers(a, b, m)) && stable.contains(&meet_workers(a, b, m));
            log.check(LATTICE_CLOSURE, closed, Some(a), || "join or meet of stable matchings left the set".into());
        }
    }

    for mu in &fqs {
        for s in &stable {
            let joined = join_workers(s, mu, m);
            log.check(MIXED_JOIN, is_stable(&joined, m), Some(mu), || {
                "worker join of a stable and a quasi-stable matching is unstable".into()
            });
        }
        let trace = run_set_offering(m, mu);
        let out = &trace.output;
        log.check(SO_OUTPUT_STABLE, is_stable(out, m), Some(mu), || "Set Offering output is unstable".into());
        log.check(CLOSED_FORM, *out == join_workers(mu, reference, m), Some(mu), || {
            "Set Offering output differs from the join with the firm-optimal matching".into()
        });
        let worst = stable.upper_set(mu, m).meet_all(m);
        log.check(WORST_POINT, worst.as_ref() == Some(out), Some(mu), || {
            "Set Offering output is not the worker-worst stable matching above the input".into()
        });
        let steps: Vec<&Matching> = trace.matchings().collect();
        let all_fqs = steps.iter().all(|s| is_firm_quasi_stable(s, m).unwrap_or(false));
        log.check(TRACE_FQS, all_fqs, Some(mu), || "an intermediate matching is not firm quasi-stable".into());
        let monotone = steps.windows(2).all(|w| dominates_workers(w[1], w[0], m));
        log.check(TRACE_MONOTONE, monotone, Some(mu), || "a worker got worse during Set Offering".into());
    }
    Ok(())
}

fn check_transition(log: &mut TrialLog, gen: &GeneratedTransition, opts: SuiteOptions) {
    let new = gen.transition.new_market();
    let reference = if opts.corrupt_oracle { da_worker_proposing(new) } else { da_firm_proposing(new) };
    match verify_with_oracles(&gen.mu_old, &gen.transition, opts.limits, reference) {
        Ok(report) => {
            for a in &report.assertions {
                let detail = || format!("{} witness(es): {:?}", a.witnesses.len(), a.witnesses);
                log.check(a.name, a.passed, Some(&gen.mu_old), detail);
            }
        }
        Err(e) => log.check(TRANSITION_SETUP, false, Some(&gen.mu_old), || e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::TransitionSpec;

    #[test]
    fn zero_trials_is_an_empty_passing_report() {
        let report = run_theorem_suite(&ScenarioConfig::responsive(1, 3, 5, 2, 0), SuiteOptions::default()).unwrap();
        assert_eq!(report.trials_run, 0);
        assert!(report.theorems.is_empty());
        assert!(report.all_passed);
    }

    #[test]
    fn small_batch_passes_every_theorem() {
        let cfg = ScenarioConfig {
            transition_spec: Some(TransitionSpec { retire_count: 1, add_firm_count: 1 }),
            ..ScenarioConfig::responsive(3, 3, 4, 2, 20)
        };
        let report = run_theorem_suite(&cfg, SuiteOptions::default()).unwrap();
        assert!(report.all_passed, "{:?}", report.failures);
        assert_eq!(report.trials_run, 20);
        assert_eq!(report.counts(CLOSED_FORM).trials_passed, 20);
        assert_eq!(report.counts(restab_core::disruption::WORKER_CLOSED_FORM).trials_passed, 20);
    }

    #[test]
    fn corrupted_oracle_is_caught_with_a_witness() {
        let cfg = ScenarioConfig::responsive(3, 3, 5, 2, 40);
        let opts = SuiteOptions { corrupt_oracle: true, ..SuiteOptions::default() };
        let report = run_theorem_suite(&cfg, opts).unwrap();
        assert!(!report.all_passed);
        assert!(report.counts(CLOSED_FORM).trials_failed > 0);
        let witness = report.failures.iter().find(|f| f.theorem == CLOSED_FORM).unwrap();
        assert!(witness.matching.is_some());
        assert!(witness.market.to_market().is_ok());
    }

    #[test]
    fn oversized_configs_hit_the_guard() {
        let cfg = ScenarioConfig::responsive(0, 3, 9, 2, 1);
        let err = run_theorem_suite(&cfg, SuiteOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
