use alloc::collections::BTreeSet;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorkerId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FirmId(pub u32);

/// A set of workers; iteration is in id order.
pub type WorkerSet = BTreeSet<WorkerId>;

impl fmt::Display for WorkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

impl fmt::Display for FirmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// Builds a [`WorkerSet`] from raw ids.
pub fn workers<I: IntoIterator<Item = u32>>(ids: I) -> WorkerSet {
    ids.into_iter().map(WorkerId).collect()
}

/// Iterates over every subset of `items`, smallest bitmask first.
///
/// Callers are responsible for keeping `items` small; a size guard should
/// run before this.
pub(crate) fn subsets_of<T: Copy + Ord>(items: &[T]) -> impl Iterator<Item = BTreeSet<T>> + '_ {
    assert!(items.len() < 64, "subset enumeration over {} items", items.len());
    (0u64..(1u64 << items.len()))
        .map(move |mask| items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| *x).collect())
}
