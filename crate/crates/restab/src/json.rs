//! JSON file formats. Every reader rejects unknown keys; every writer
//! emits pretty-printed JSON with keys in a fixed order, so identical
//! values always serialize to identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use restab_core::disruption::{AssertionOutcome, TransitionReport, Witness};
use restab_core::{
    FirmId, FirmPreference, Market, MarketTransition, Matching, NewFirm, SoTrace, WorkerId, WorkerPreference, WorkerSet,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{RestabError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDto {
    pub firms: Vec<FirmDto>,
    pub workers: Vec<WorkerDto>,
}

/// A firm carries exactly one of `ranking` (responsive) or
/// `subset_order` (explicit, most preferred first, `[]` is the empty set).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmDto {
    pub id: u32,
    pub quota: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_order: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkerDto {
    pub id: u32,
    pub ranking: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingDto {
    pub assignment: BTreeMap<u32, Option<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDto {
    pub input: MatchingDto,
    pub iterations: Vec<IterationDto>,
    pub output: MatchingDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationDto {
    pub offers: BTreeMap<u32, Vec<u32>>,
    pub available: BTreeMap<u32, Vec<u32>>,
    pub matching: MatchingDto,
}

/// Workers to retire and firms to add. An entrant's `worker_ranks` maps a
/// surviving worker to the position at which the entrant is inserted into
/// that worker's ranking; workers not listed find the entrant unacceptable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDto {
    #[serde(default)]
    pub retire: Vec<u32>,
    #[serde(default)]
    pub add_firms: Vec<EntrantDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrantDto {
    pub id: u32,
    pub quota: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_order: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub worker_ranks: BTreeMap<u32, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessDto {
    Worker { worker: u32, observed: Option<u32>, compared: Option<u32> },
    Firm { firm: u32, observed: Vec<u32>, compared: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionDto {
    pub name: String,
    pub passed: bool,
    pub witnesses: Vec<WitnessDto>,
}

/// Outcome of restabilizing one transition.
///
/// `vacancy_chain_length` counts Set Offering passes in which some worker
/// changed jobs; `offer_rounds` counts passes in which some firm made an
/// offer (accepted or not).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionReportDto {
    pub all_passed: bool,
    pub vacancy_chain_length: usize,
    pub offer_rounds: usize,
    pub induced: MatchingDto,
    pub output: MatchingDto,
    pub assertions: Vec<AssertionDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDto {
    pub firm_optimal: MatchingDto,
    pub worker_optimal: MatchingDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingListDto {
    pub count: usize,
    pub matchings: Vec<MatchingDto>,
}

fn ids<T: Copy, I: IntoIterator<Item = T>>(it: I, raw: impl Fn(T) -> u32) -> Vec<u32> {
    it.into_iter().map(raw).collect()
}

fn worker_set(raw: &[u32]) -> WorkerSet {
    raw.iter().copied().map(WorkerId).collect()
}

fn firm_preference(
    what: &'static str,
    id: u32,
    quota: u32,
    ranking: &Option<Vec<u32>>,
    subset_order: &Option<Vec<Vec<u32>>>,
) -> Result<Result<FirmPreference, restab_core::Error>> {
    match (ranking, subset_order) {
        (Some(r), None) => Ok(FirmPreference::responsive(quota, r.iter().copied().map(WorkerId).collect())),
        (None, Some(order)) => Ok(FirmPreference::explicit(quota, order.iter().map(|s| worker_set(s)).collect())),
        _ => Err(RestabError::Format {
            what,
            message: format!("firm {id} needs exactly one of \"ranking\" or \"subset_order\""),
        }),
    }
}

impl From<&Market> for MarketDto {
    fn from(market: &Market) -> Self {
        let firms = market
            .firms()
            .iter()
            .map(|(f, pref)| {
                let (ranking, subset_order) = match pref.body() {
                    restab_core::FirmPreferenceBody::Responsive(r) => (Some(ids(r.iter().copied(), |w| w.0)), None),
                    restab_core::FirmPreferenceBody::ExplicitSubsets(order) => {
                        (None, Some(order.iter().map(|s| ids(s.iter().copied(), |w| w.0)).collect()))
                    }
                };
                FirmDto { id: f.0, quota: pref.quota(), ranking, subset_order }
            })
            .collect();
        let workers = market
            .workers()
            .iter()
            .map(|(w, pref)| WorkerDto { id: w.0, ranking: ids(pref.ranking().iter().copied(), |f| f.0) })
            .collect();
        MarketDto { firms, workers }
    }
}

impl MarketDto {
    pub fn to_market(&self) -> Result<Market> {
        let firms = self
            .firms
            .iter()
            .map(|f| Ok((FirmId(f.id), firm_preference("market", f.id, f.quota, &f.ranking, &f.subset_order)?)))
            .collect::<Result<Vec<_>>>()?;
        let workers = self
            .workers
            .iter()
            .map(|w| (WorkerId(w.id), WorkerPreference::new(w.ranking.iter().copied().map(FirmId).collect())));
        Market::from_parts(firms, workers).map_err(|source| RestabError::Invalid { what: "market", source })
    }
}

impl From<&Matching> for MatchingDto {
    fn from(mu: &Matching) -> Self {
        MatchingDto { assignment: mu.assignment().iter().map(|(w, f)| (w.0, f.map(|f| f.0))).collect() }
    }
}

impl MatchingDto {
    pub fn to_matching(&self) -> Matching {
        Matching::from_assignment(self.assignment.iter().map(|(w, f)| (WorkerId(*w), f.map(FirmId))).collect())
    }
}

fn set_map(map: &BTreeMap<FirmId, WorkerSet>) -> BTreeMap<u32, Vec<u32>> {
    map.iter().map(|(f, s)| (f.0, ids(s.iter().copied(), |w| w.0))).collect()
}

impl From<&SoTrace> for TraceDto {
    fn from(trace: &SoTrace) -> Self {
        TraceDto {
            input: (&trace.input).into(),
            iterations: trace
                .iterations
                .iter()
                .map(|it| IterationDto {
                    offers: set_map(&it.offers),
                    available: set_map(&it.available),
                    matching: (&it.matching).into(),
                })
                .collect(),
            output: (&trace.output).into(),
        }
    }
}

impl TransitionDto {
    /// Builds the transition from `old`. Retired workers are removed from
    /// every firm's preferences; entrants are inserted into worker rankings.
    pub fn apply(&self, old: &Market) -> Result<MarketTransition> {
        let retired = worker_set(&self.retire);
        let entrants = self
            .add_firms
            .iter()
            .map(|e| {
                let preference =
                    firm_preference("transition", e.id, e.quota, &e.ranking, &e.subset_order)?.map_err(|source| {
                        RestabError::Invalid { what: "transition", source: source.for_firm(FirmId(e.id)) }
                    })?;
                Ok(NewFirm {
                    id: FirmId(e.id),
                    preference,
                    worker_ranks: e.worker_ranks.iter().map(|(w, r)| (WorkerId(*w), *r)).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MarketTransition::disrupt(old, &retired, entrants)
            .map_err(|source| RestabError::Invalid { what: "transition", source })
    }
}

impl From<&Witness> for WitnessDto {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Worker { worker, observed, compared } => WitnessDto::Worker {
                worker: worker.0,
                observed: observed.map(|f| f.0),
                compared: compared.map(|f| f.0),
            },
            Witness::Firm { firm, observed, compared } => WitnessDto::Firm {
                firm: firm.0,
                observed: ids(observed.iter().copied(), |w| w.0),
                compared: ids(compared.iter().copied(), |w| w.0),
            },
        }
    }
}

impl From<&AssertionOutcome> for AssertionDto {
    fn from(a: &AssertionOutcome) -> Self {
        AssertionDto {
            name: a.name.to_string(),
            passed: a.passed,
            witnesses: a.witnesses.iter().map(Into::into).collect(),
        }
    }
}

impl From<&TransitionReport> for TransitionReportDto {
    fn from(r: &TransitionReport) -> Self {
        TransitionReportDto {
            all_passed: r.all_passed(),
            vacancy_chain_length: r.trace.vacancy_chain_length(),
            offer_rounds: r.trace.offer_rounds(),
            induced: (&r.induced).into(),
            output: (&r.trace.output).into(),
            assertions: r.assertions.iter().map(Into::into).collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|source| RestabError::Json { path: path.to_path_buf(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| RestabError::Read { path: path.to_path_buf(), source })?;
    parse_json(&text, path)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| RestabError::Write { path: path.to_path_buf(), source })
}

pub fn read_market(path: &Path) -> Result<Market> {
    read_json::<MarketDto>(path)?.to_market()
}

pub fn read_matching(path: &Path) -> Result<Matching> {
    Ok(read_json::<MatchingDto>(path)?.to_matching())
}

#[cfg(test)]
mod tests {
    use super::*;
    use restab_core::responsive_market;

    #[test]
    fn market_round_trips() {
        let m = responsive_market(&[(2, &[0, 1, 2]), (1, &[2, 0])], &[&[1, 0], &[0], &[0, 1]]).unwrap();
        let dto = MarketDto::from(&m);
        let text = to_json(&dto);
        let back: MarketDto = parse_json(&text, Path::new("mem")).unwrap();
        assert_eq!(back.to_market().unwrap(), m);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text =
            r#"{"firms": [{"id": 0, "quota": 1, "ranking": [0], "extra": 1}], "workers": [{"id": 0, "ranking": [0]}]}"#;
        assert!(matches!(parse_json::<MarketDto>(text, Path::new("mem")), Err(RestabError::Json { .. })));
    }

    #[test]
    fn firm_needs_exactly_one_body() {
        let both = r#"{"firms": [{"id": 0, "quota": 1, "ranking": [0], "subset_order": [[0], []]}], "workers": [{"id": 0, "ranking": [0]}]}"#;
        let dto: MarketDto = parse_json(both, Path::new("mem")).unwrap();
        assert!(matches!(dto.to_market(), Err(RestabError::Format { .. })));
    }

    #[test]
    fn matching_keys_are_worker_ids() {
        let dto: MatchingDto = parse_json(r#"{"assignment": {"0": 1, "2": null}}"#, Path::new("mem")).unwrap();
        let mu = dto.to_matching();
        assert_eq!(mu.partner(WorkerId(0)), Some(FirmId(1)));
        assert_eq!(mu.partner(WorkerId(2)), None);
        assert_eq!(
            to_json(&MatchingDto::from(&mu)),
            "{\n  \"assignment\": {\n    \"0\": 1,\n    \"2\": null\n  }\n}\n"
        );
    }

    #[test]
    fn witnesses_are_tagged() {
        let w = WitnessDto::from(&Witness::Worker { worker: WorkerId(1), observed: None, compared: Some(FirmId(0)) });
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"kind":"worker","worker":1,"observed":null,"compared":0}"#);
    }
}
