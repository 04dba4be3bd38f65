//! Partition search: the exact branch-and-bound solver and the greedy
//! heuristic solver share the MGTA state, forced merges and traces.

pub mod bb;
pub mod heuristic;
mod trace;

pub use bb::{bound, psbb_solve, PruneGraphs, SearchConfig, Traversal};
pub use heuristic::{
    common_glues, next_pair, psh_parallel, psh_run, CandidateSet, HeuristicConfig, ParallelTrace,
};
pub use trace::{SearchTrace, TraceRecord, TraceSink};

use crate::atam::TileSystem;
use crate::mgta::{ClassId, MgtaState};
use crate::pattern::{Colour, Pattern};

/// Colour of a class; classes never mix colours during the search.
#[inline]
pub(crate) fn class_colour(pattern: &Pattern, class: ClassId) -> Colour {
    pattern.colour_at(class as usize)
}

/// Tile system realising a constructible state.
pub(crate) fn solution(state: &MgtaState, pattern: &Pattern) -> TileSystem {
    TileSystem::from_mgta(state, pattern).expect("an MGTA is glue-consistent")
}
