//! Seeded random markets and transitions.
//!
//! Every trial draws from its own ChaCha8 stream: the generator is seeded
//! with `ChaCha8Rng::seed_from_u64(rng_seed)` and the stream is set to the
//! trial index. Within a trial, draws happen in this order:
//!
//! 1. firms by ascending id: quota uniform in `1..=quota_max`, then the
//!    preference body (below);
//! 2. workers by ascending id: one Bernoulli(density) draw per firm, then a
//!    shuffle of the accepted firms;
//! 3. for transitions: a shuffle of the worker ids (the first
//!    `retire_count` retire), each entrant's quota and body over the
//!    survivors, one Bernoulli(density) draw per survivor followed by an
//!    insertion index when accepted, and finally the index of the old
//!    stable matching in the sorted stable set.
//!
//! A responsive body is one Bernoulli(density) draw per worker followed
//! by a shuffle of the accepted workers. An explicit body scores every
//! subset within quota: each worker is acceptable with probability
//! `density` and gets a base value in `20..80` (acceptable) or `-100..-50`
//! (not), each acceptable pair gets an interaction in `-2..=8` that is
//! subtracted from any set containing both, and subsets are ranked by
//! score, ties broken by a random 64-bit key. The empty set scores 0.
//! Explicit markets are redrawn until both validators accept every firm.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restab_core::validate::{validate_market, ValidatorCaps};
use restab_core::{
    enumerate_stable, EnumLimits, FirmId, FirmPreference, Market, MarketTransition, Matching, WorkerId,
    WorkerPreference, WorkerSet,
};
use serde::{Deserialize, Serialize};

use crate::error::{RestabError, Result};
use crate::json::{EntrantDto, TransitionDto};

/// Full redraws allowed before an explicit trial is skipped.
pub const EXPLICIT_ATTEMPTS: u32 = 200;

/// Explicit orders rank every subset, so they are limited to small pools.
pub const EXPLICIT_MAX_WORKERS: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreferenceFamily {
    Responsive,
    ExplicitValidated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSpec {
    pub retire_count: u32,
    pub add_firm_count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub rng_seed: u64,
    pub n_firms: u32,
    pub n_workers: u32,
    pub quota_max: u32,
    pub acceptability_density: f64,
    pub preference_family: PreferenceFamily,
    pub n_trials: u32,
    pub transition_spec: Option<TransitionSpec>,
}

impl ScenarioConfig {
    pub fn responsive(rng_seed: u64, n_firms: u32, n_workers: u32, quota_max: u32, n_trials: u32) -> Self {
        ScenarioConfig {
            rng_seed,
            n_firms,
            n_workers,
            quota_max,
            acceptability_density: 0.8,
            preference_family: PreferenceFamily::Responsive,
            n_trials,
            transition_spec: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(RestabError::Config(msg));
        if self.n_firms == 0 || self.n_workers == 0 {
            return fail("markets need at least one firm and one worker".into());
        }
        if self.quota_max == 0 {
            return fail("quota_max must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.acceptability_density) {
            return fail(format!("density {} is not a probability", self.acceptability_density));
        }
        if self.preference_family == PreferenceFamily::ExplicitValidated && self.n_workers > EXPLICIT_MAX_WORKERS {
            return fail(format!("explicit preferences support at most {EXPLICIT_MAX_WORKERS} workers"));
        }
        if let Some(spec) = self.transition_spec {
            if spec.retire_count >= self.n_workers {
                return fail(format!("cannot retire {} of {} workers", spec.retire_count, self.n_workers));
            }
        }
        Ok(())
    }

    fn rng(&self, trial: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(u64::from(trial));
        rng
    }
}

/// A generated transition with the old stable matching it starts from.
#[derive(Clone, Debug)]
pub struct GeneratedTransition {
    pub spec: TransitionDto,
    pub transition: MarketTransition,
    pub mu_old: Matching,
}

#[derive(Clone, Debug)]
pub struct Trial {
    pub index: u32,
    pub market: Market,
    pub transition: Option<GeneratedTransition>,
}

/// Why a trial produced no instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skip(pub String);

/// The market of `trial`; a deterministic function of the seed and trial.
pub fn generate_market(cfg: &ScenarioConfig, trial: u32) -> Result<Market, Skip> {
    market_from(cfg, &mut cfg.rng(trial))
}

/// The market of `trial` and, when the config asks for one, a transition
/// from it together with a stable matching of the old market.
pub fn generate_trial(cfg: &ScenarioConfig, trial: u32, limits: EnumLimits) -> Result<Trial, Skip> {
    let mut rng = cfg.rng(trial);
    let market = market_from(cfg, &mut rng)?;
    let transition = match cfg.transition_spec {
        Some(spec) => Some(transition_from(cfg, spec, &market, &mut rng, limits)?),
        None => None,
    };
    Ok(Trial { index: trial, market, transition })
}

fn market_from(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Market, Skip> {
    let workers: Vec<WorkerId> = (0..cfg.n_workers).map(WorkerId).collect();
    let attempts = match cfg.preference_family {
        PreferenceFamily::Responsive => 1,
        PreferenceFamily::ExplicitValidated => EXPLICIT_ATTEMPTS,
    };
    for _ in 0..attempts {
        let firms: Vec<(FirmId, FirmPreference)> =
            (0..cfg.n_firms).map(|f| (FirmId(f), firm_preference(cfg, &workers, rng))).collect();
        let worker_prefs: Vec<(WorkerId, WorkerPreference)> = workers
            .iter()
            .map(|w| {
                let ranking = sample_ranking((0..cfg.n_firms).map(FirmId), cfg.acceptability_density, rng);
                (*w, WorkerPreference::new(ranking).expect("sampled rankings have no duplicates"))
            })
            .collect();
        let market = Market::new(firms.into_iter().collect(), worker_prefs.into_iter().collect())
            .expect("generated markets are well formed");
        if accepted(cfg, &market) {
            return Ok(market);
        }
    }
    Err(Skip(format!("no valid explicit market within {attempts} draws")))
}

fn accepted(cfg: &ScenarioConfig, market: &Market) -> bool {
    cfg.preference_family == PreferenceFamily::Responsive
        || validate_market(market, ValidatorCaps::default()).unwrap_or(false)
}

fn sample_ranking<T: Copy>(pool: impl Iterator<Item = T>, density: f64, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut kept: Vec<T> = pool.filter(|_| rng.gen_bool(density)).collect();
    kept.shuffle(rng);
    kept
}

fn firm_preference(cfg: &ScenarioConfig, workers: &[WorkerId], rng: &mut ChaCha8Rng) -> FirmPreference {
    let quota = rng.gen_range(1..=cfg.quota_max);
    match cfg.preference_family {
        PreferenceFamily::Responsive => {
            FirmPreference::responsive(quota, sample_ranking(workers.iter().copied(), cfg.acceptability_density, rng))
        }
        PreferenceFamily::ExplicitValidated => {
            FirmPreference::explicit(quota, score_order(workers, quota, cfg.acceptability_density, rng))
        }
    }
    .expect("sampled preferences are well formed")
}

fn score_order(workers: &[WorkerId], quota: u32, density: f64, rng: &mut ChaCha8Rng) -> Vec<WorkerSet> {
    let n = workers.len();
    let acceptable: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
    let base: Vec<i64> =
        acceptable.iter().map(|ok| if *ok { rng.gen_range(20..80) } else { -rng.gen_range(50..100) }).collect();
    let mut interaction = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if acceptable[i] && acceptable[j] {
                interaction[i][j] = rng.gen_range(-2..=8);
            }
        }
    }
    let mut scored: Vec<(i64, u64, WorkerSet)> = (0u32..1 << n)
        .filter(|mask| mask.count_ones() <= quota)
        .map(|mask| {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let mut score: i64 = members.iter().map(|i| base[*i]).sum();
            for (k, i) in members.iter().enumerate() {
                for j in &members[k + 1..] {
                    score -= interaction[*i][*j];
                }
            }
            (score, rng.gen::<u64>(), members.into_iter().map(|i| workers[i]).collect())
        })
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().map(|(_, _, set)| set).collect()
}

fn transition_from(
    cfg: &ScenarioConfig,
    spec: TransitionSpec,
    market: &Market,
    rng: &mut ChaCha8Rng,
    limits: EnumLimits,
) -> Result<GeneratedTransition, Skip> {
    let mut ids: Vec<WorkerId> = market.worker_ids().collect();
    ids.shuffle(rng);
    let mut retire: Vec<u32> = ids[..spec.retire_count as usize].iter().map(|w| w.0).collect();
    retire.sort_unstable();
    let survivors: Vec<WorkerId> = market.worker_ids().filter(|w| !retire.contains(&w.0)).collect();

    let attempts = match cfg.preference_family {
        PreferenceFamily::Responsive => 1,
        PreferenceFamily::ExplicitValidated => EXPLICIT_ATTEMPTS,
    };
    for _ in 0..attempts {
        let add_firms = (0..spec.add_firm_count)
            .map(|j| {
                let pref = firm_preference(cfg, &survivors, rng);
                let mut worker_ranks = BTreeMap::new();
                for w in &survivors {
                    if rng.gen_bool(cfg.acceptability_density) {
                        worker_ranks.insert(w.0, rng.gen_range(0..=cfg.n_firms + j) as usize);
                    }
                }
                let (ranking, subset_order) = match pref.body() {
                    restab_core::FirmPreferenceBody::Responsive(r) => (Some(r.iter().map(|w| w.0).collect()), None),
                    restab_core::FirmPreferenceBody::ExplicitSubsets(order) => {
                        (None, Some(order.iter().map(|s| s.iter().map(|w| w.0).collect()).collect()))
                    }
                };
                EntrantDto { id: cfg.n_firms + j, quota: pref.quota(), ranking, subset_order, worker_ranks }
            })
            .collect();
        let dto = TransitionDto { retire: retire.clone(), add_firms };
        let transition = dto.apply(market).expect("generated transitions are well formed");
        if !accepted(cfg, transition.new_market()) {
            continue;
        }
        let stable = enumerate_stable(market, limits).map_err(|e| Skip(e.to_string()))?;
        let pick = rng.gen_range(0..stable.len() as u32) as usize;
        let mu_old = stable.matchings()[pick].clone();
        return Ok(GeneratedTransition { spec: dto, transition, mu_old });
    }
    Err(Skip(format!("no valid explicit entrant within {attempts} draws")))
}
