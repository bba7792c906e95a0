#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use restab_core::{FirmId, FirmPreference, Market, WorkerId, WorkerPreference, WorkerSet};

/// Random responsive market: every pair is mutually acceptable with some
/// probability, rankings are random.
pub fn arb_responsive_market(max_firms: usize, max_workers: usize, max_quota: u32) -> impl Strategy<Value = Market> {
    (1..=max_firms, 1..=max_workers).prop_flat_map(move |(nf, nw)| {
        let firms = prop::collection::vec(
            (1..=max_quota, prop::collection::vec((any::<bool>(), any::<bool>(), any::<u16>()), nw)),
            nf,
        );
        let workers =
            prop::collection::vec(prop::collection::vec((any::<bool>(), any::<bool>(), any::<u16>()), nf), nw);
        (firms, workers).prop_map(move |(firms, workers)| {
            let firm_prefs = firms.into_iter().enumerate().map(|(f, (q, cells))| {
                let mut ranked: Vec<(u16, WorkerId)> = cells
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, b, _))| *a || *b)
                    .map(|(w, (_, _, key))| (*key, WorkerId(w as u32)))
                    .collect();
                ranked.sort();
                (FirmId(f as u32), FirmPreference::responsive(q, ranked.into_iter().map(|(_, w)| w).collect()))
            });
            let worker_prefs = workers.into_iter().enumerate().map(|(w, cells)| {
                let mut ranked: Vec<(u16, FirmId)> = cells
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, b, _))| *a || *b)
                    .map(|(f, (_, _, key))| (*key, FirmId(f as u32)))
                    .collect();
                ranked.sort();
                (WorkerId(w as u32), WorkerPreference::new(ranked.into_iter().map(|(_, f)| f).collect()))
            });
            Market::from_parts(firm_prefs, worker_prefs).expect("generated market is well formed")
        })
    })
}

/// Small deterministic PRNG for the seeded corpora below.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Subset order from a random quadratic score: good workers add value,
/// bad ones subtract, and good pairs interact negatively. Not guaranteed
/// substitutable; callers validate.
pub fn quadratic_order(rng: &mut SplitMix, n: u32, quota: u32) -> Vec<WorkerSet> {
    let good: Vec<bool> = (0..n).map(|_| rng.chance(3, 4)).collect();
    let base: Vec<i64> =
        good.iter().map(|g| if *g { 20 + rng.below(60) as i64 } else { -(50 + rng.below(50) as i64) }).collect();
    let mut inter = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if good[i as usize] && good[j as usize] {
                inter.insert((i, j), rng.below(9) as i64);
            }
        }
    }
    let ids: Vec<u32> = (0..n).collect();
    let mut scored: Vec<(i64, u64, WorkerSet)> = (0u32..(1 << n))
        .filter(|mask| mask.count_ones() <= quota)
        .map(|mask| {
            let members: Vec<u32> = ids.iter().copied().filter(|i| mask & (1 << i) != 0).collect();
            let mut v: i64 = members.iter().map(|i| base[*i as usize]).sum();
            for (a, x) in members.iter().enumerate() {
                for y in &members[a + 1..] {
                    v -= inter.get(&(*x, *y)).copied().unwrap_or(0);
                }
            }
            (v, rng.next(), members.into_iter().map(WorkerId).collect())
        })
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().map(|(_, _, s)| s).collect()
}

/// A market whose firms use validated explicit subset orders, or `None`
/// when the random orders fail validation.
pub fn explicit_market(seed: u64, nf: u32, nw: u32) -> Option<Market> {
    let mut rng = SplitMix(seed);
    let firms: Vec<(FirmId, _)> = (0..nf)
        .map(|f| {
            let q = 1 + rng.below(3.min(nw as u64)) as u32;
            (FirmId(f), FirmPreference::explicit(q, quadratic_order(&mut rng, nw, q)))
        })
        .collect();
    let workers: Vec<(WorkerId, _)> = (0..nw)
        .map(|w| {
            let mut ranked: Vec<(u64, FirmId)> = Vec::new();
            for f in 0..nf {
                if rng.chance(4, 5) {
                    ranked.push((rng.next(), FirmId(f)));
                }
            }
            ranked.sort();
            (WorkerId(w), WorkerPreference::new(ranked.into_iter().map(|(_, f)| f).collect()))
        })
        .collect();
    let market = Market::from_parts(firms, workers).ok()?;
    restab_core::validate::validate_market(&market, Default::default()).ok().filter(|ok| *ok).map(|_| market)
}

/// First `count` validated explicit markets found scanning seeds upwards.
pub fn explicit_corpus(count: usize, nf: u32, nw: u32) -> Vec<Market> {
    (0u64..).filter_map(|seed| explicit_market(seed, nf, nw)).take(count).collect()
}
