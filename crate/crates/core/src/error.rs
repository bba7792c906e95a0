use alloc::vec::Vec;
use core::fmt;

use crate::{FirmId, WorkerId};

/// Everything that can go wrong while building or analysing a market.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    UnknownFirm(FirmId),
    UnknownWorker(WorkerId),
    DuplicateFirm {
        worker: WorkerId,
        firm: FirmId,
    },
    DuplicateWorker {
        firm: FirmId,
        worker: WorkerId,
    },
    DuplicateSubset {
        firm: FirmId,
    },
    ZeroQuota(FirmId),
    /// An explicit subset order does not list every subset of size at most the quota.
    IncompleteSubsetOrder {
        firm: FirmId,
        expected: usize,
        found: usize,
    },
    /// The explicit subset order lacks the empty set.
    MissingEmptySet(FirmId),
    DuplicateFirmId(FirmId),
    DuplicateWorkerId(WorkerId),
    NoFirms,
    NoWorkers,
    /// The matching does not cover exactly the market's workers, or names an unknown firm.
    InvalidMatching,
    /// A brute-force routine refused to run on an instance above its cap.
    SizeGuard {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    /// Two subsets whose relative rank the preference does not pin down.
    Incomparable {
        firm: FirmId,
    },
    /// Set Offering input violates firm quasi-stability at this firm.
    NotFirmQuasiStable {
        firm: FirmId,
        held: Vec<WorkerId>,
        envious: Vec<WorkerId>,
    },
    NotStable,
    NotLeadsTo(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownFirm(id) => write!(f, "unknown firm {id}"),
            Error::UnknownWorker(id) => write!(f, "unknown worker {id}"),
            Error::DuplicateFirm { worker, firm } => {
                write!(f, "worker {worker} ranks firm {firm} more than once")
            }
            Error::DuplicateWorker { firm, worker } => {
                write!(f, "firm {firm} ranks worker {worker} more than once")
            }
            Error::DuplicateSubset { firm } => {
                write!(f, "firm {firm} lists the same subset more than once")
            }
            Error::ZeroQuota(id) => write!(f, "firm {id} has quota 0"),
            Error::IncompleteSubsetOrder { firm, expected, found } => {
                write!(f, "firm {firm}: subset order must list all {expected} subsets within quota, found {found}")
            }
            Error::MissingEmptySet(id) => write!(f, "firm {id}: subset order lacks the empty set"),
            Error::DuplicateFirmId(id) => write!(f, "firm {id} defined twice"),
            Error::DuplicateWorkerId(id) => write!(f, "worker {id} defined twice"),
            Error::NoFirms => f.write_str("market has no firms"),
            Error::NoWorkers => f.write_str("market has no workers"),
            Error::InvalidMatching => f.write_str("matching does not fit the market"),
            Error::SizeGuard { what, size, cap } => {
                write!(f, "{what}: instance size {size} exceeds brute-force cap {cap}")
            }
            Error::Incomparable { firm } => {
                write!(f, "firm {firm}: subsets are not comparable under its preference")
            }
            Error::NotFirmQuasiStable { firm, held, envious } => write!(
                f,
                "matching is not firm quasi-stable: firm {firm} holding {held:?} would fire someone for {envious:?}"
            ),
            Error::NotStable => f.write_str("matching is not stable"),
            Error::NotLeadsTo(why) => write!(f, "markets are not related by leads-to: {why}"),
        }
    }
}

impl Error {
    /// Attaches a firm id to an error raised by a preference constructor,
    /// which does not know which firm it is building for.
    pub fn for_firm(self, id: FirmId) -> Self {
        match self {
            Error::DuplicateWorker { worker, .. } => Error::DuplicateWorker { firm: id, worker },
            Error::DuplicateSubset { .. } => Error::DuplicateSubset { firm: id },
            Error::ZeroQuota(_) => Error::ZeroQuota(id),
            Error::MissingEmptySet(_) => Error::MissingEmptySet(id),
            Error::Incomparable { .. } => Error::Incomparable { firm: id },
            other => other,
        }
    }

    pub(crate) fn for_worker(self, id: WorkerId) -> Self {
        match self {
            Error::DuplicateFirm { firm, .. } => Error::DuplicateFirm { worker: id, firm },
            other => other,
        }
    }
}

impl core::error::Error for Error {}
