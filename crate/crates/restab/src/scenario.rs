//! Restabilizes one market after one transition and writes the trace, the
//! theorem report and per-agent CSV tables.
//!
//! `workers.csv` has columns `trial,worker_id,old_partner,new_partner,improved`
//! with one row per surviving worker; an empty partner means unmatched and
//! `improved` compares the partners under the new preferences.
//! `firms.csv` has columns `trial,firm_id,old_set,new_set,changed` with one
//! row per firm of the new market; sets are space-separated worker ids and
//! entrants start from the empty set.

use std::fs;
use std::path::{Path, PathBuf};

use restab_core::{is_stable, verify_transition_theorems, EnumLimits, Error, Market, Matching};

use crate::error::{RestabError, Result};
use crate::json::{
    read_json, read_market, read_matching, to_json, write_file, TraceDto, TransitionDto, TransitionReportDto,
};

pub const TRACE_FILE: &str = "trace.json";
pub const REPORT_FILE: &str = "report.json";
pub const WORKERS_FILE: &str = "workers.csv";
pub const FIRMS_FILE: &str = "firms.csv";

/// Everything a scenario writes, as file contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioOutputs {
    pub trace: TraceDto,
    pub report: TransitionReportDto,
    pub workers_csv: String,
    pub firms_csv: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioOutcome {
    pub all_passed: bool,
    pub vacancy_chain_length: usize,
    pub offer_rounds: usize,
    pub files: Vec<PathBuf>,
}

/// Computes the outputs of one scenario. `mu_old` must be stable in
/// `market`; the transition must reference existing agents.
pub fn scenario_outputs(
    market: &Market,
    mu_old: &Matching,
    transition: &TransitionDto,
    trial: u32,
    limits: EnumLimits,
) -> Result<ScenarioOutputs> {
    mu_old.check_valid(market).map_err(RestabError::Precondition)?;
    if !is_stable(mu_old, market) {
        return Err(RestabError::Precondition(Error::NotStable));
    }
    let t = transition.apply(market)?;
    let report = verify_transition_theorems(mu_old, &t, limits).map_err(RestabError::Precondition)?;
    let new = t.new_market();
    let out = &report.trace.output;

    let mut workers = csv::Writer::from_writer(Vec::new());
    workers.write_record(["trial", "worker_id", "old_partner", "new_partner", "improved"])?;
    for (w, pref) in new.workers() {
        let (before, after) = (mu_old.partner(*w), out.partner(*w));
        workers.write_record([
            trial.to_string(),
            w.0.to_string(),
            partner(before),
            partner(after),
            pref.prefers(after, before).to_string(),
        ])?;
    }

    let mut firms = csv::Writer::from_writer(Vec::new());
    firms.write_record(["trial", "firm_id", "old_set", "new_set", "changed"])?;
    for f in new.firm_ids() {
        let (before, after) = (mu_old.firm_set(f), out.firm_set(f));
        firms.write_record([
            trial.to_string(),
            f.0.to_string(),
            join(&before),
            join(&after),
            (before != after).to_string(),
        ])?;
    }

    Ok(ScenarioOutputs {
        trace: (&report.trace).into(),
        report: (&report).into(),
        workers_csv: finish(workers)?,
        firms_csv: finish(firms)?,
    })
}

fn partner(f: Option<restab_core::FirmId>) -> String {
    f.map(|f| f.0.to_string()).unwrap_or_default()
}

fn join(set: &restab_core::WorkerSet) -> String {
    set.iter().map(|w| w.0.to_string()).collect::<Vec<_>>().join(" ")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| RestabError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv fields are ASCII"))
}

/// Reads the three input files, writes `trace.json`, `report.json`,
/// `workers.csv` and `firms.csv` into `out_dir`, and summarizes the run.
pub fn run_scenario(
    market_file: &Path,
    matching_file: &Path,
    transition_file: &Path,
    out_dir: &Path,
    limits: EnumLimits,
) -> Result<ScenarioOutcome> {
    let market = read_market(market_file)?;
    let mu_old = read_matching(matching_file)?;
    let transition: TransitionDto = read_json(transition_file)?;
    let outputs = scenario_outputs(&market, &mu_old, &transition, 0, limits)?;

    fs::create_dir_all(out_dir).map_err(|source| RestabError::Write { path: out_dir.to_path_buf(), source })?;
    let files = [
        (TRACE_FILE, to_json(&outputs.trace)),
        (REPORT_FILE, to_json(&outputs.report)),
        (WORKERS_FILE, outputs.workers_csv.clone()),
        (FIRMS_FILE, outputs.firms_csv.clone()),
    ];
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = out_dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(ScenarioOutcome {
        all_passed: outputs.report.all_passed,
        vacancy_chain_length: outputs.report.vacancy_chain_length,
        offer_rounds: outputs.report.offer_rounds,
        files: written,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use restab_core::{da_firm_proposing, responsive_market};

    #[test]
    fn identity_transition_has_no_vacancy_chain() {
        let m = responsive_market(&[(1, &[0, 1]), (1, &[1, 0])], &[&[0, 1], &[1, 0]]).unwrap();
        let mu = da_firm_proposing(&m);
        let out = scenario_outputs(&m, &mu, &TransitionDto::default(), 0, EnumLimits::default()).unwrap();
        assert!(out.report.all_passed);
        assert_eq!(out.report.vacancy_chain_length, 0);
        assert_eq!(out.workers_csv, "trial,worker_id,old_partner,new_partner,improved\n0,0,0,0,false\n0,1,1,1,false\n");
    }

    #[test]
    fn unstable_input_is_a_precondition_failure() {
        let m = responsive_market(&[(1, &[0, 1]), (1, &[1, 0])], &[&[0, 1], &[1, 0]]).unwrap();
        let err = scenario_outputs(&m, &Matching::empty(&m), &TransitionDto::default(), 0, EnumLimits::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
