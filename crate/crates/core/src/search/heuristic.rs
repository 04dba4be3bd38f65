//! Greedy partition search without pruning.
//!
//! At each constructible node the next pair to merge maximises, in order,
//! the number of common glues, the size of the larger class and the size of
//! the smaller class; remaining ties are broken uniformly at random. Every
//! child subtree is explored before the next pair is tried. Several seeded
//! runs can be combined, keeping the best solution at every step count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::trace::{best_at, SearchTrace, TraceRecord, TraceSink};
use super::{class_colour, solution};
use crate::error::PartitionError;
use crate::mgta::{ClassId, Direction, GlueTuple, MgtaState};
use crate::pattern::{Colour, Pattern};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub workers: usize,
    /// Master seed; worker `i` draws from stream `i` of this seed.
    pub seed: u64,
    /// Merge steps allowed per worker.
    pub step_budget: u64,
    /// Wall-clock limit per worker. Runs cut by time are not reproducible.
    pub time_budget: Option<Duration>,
    pub report_every: u64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            seed: 0,
            step_budget: 100_000,
            time_budget: None,
            report_every: 0,
        }
    }
}

/// Random stream of one worker.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Number of directions on which the tiles of `p` and `q` agree.
pub fn common_glues(state: &MgtaState, p: ClassId, q: ClassId) -> Result<usize, PartitionError> {
    state.common_glues(p, q)
}

/// Same-colour class pairs of one node that have not been tried yet.
///
/// The set itself is implicit: it is every same-colour pair of the state
/// except the recorded tried pairs. Scores are recomputed from the state on
/// each query, so they always reflect the current glues.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    tried: Vec<(ClassId, ClassId)>,
}

/// Pair ranking key: common glues, larger size, smaller size.
type Score = (usize, u32, u32);

/// Classes that agree on the glues selected by a direction mask.
struct Group {
    /// `(size, class)` sorted by size descending, then id.
    members: Vec<(u32, ClassId)>,
    /// Tried pairs with both classes in the group.
    tried: Vec<(ClassId, ClassId)>,
}

impl Group {
    /// Members of exactly one size, ascending ids.
    fn of_size(&self, size: u32) -> &[(u32, ClassId)] {
        let lo = self.members.partition_point(|m| m.0 > size);
        let hi = self.members.partition_point(|m| m.0 >= size);
        &self.members[lo..hi]
    }

    fn sizes(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.members.iter().map(|m| m.0).collect();
        s.dedup();
        s
    }

    fn pair_count(&self, big: u32, small: u32) -> usize {
        let a = self.of_size(big).len();
        if big == small {
            a * a.saturating_sub(1) / 2
        } else {
            a * self.of_size(small).len()
        }
    }

    /// Rank of a pair among the pairs of sizes `(big, small)`, if both are
    /// members.
    fn rank(&self, big: u32, small: u32, p: ClassId, q: ClassId) -> Option<usize> {
        let pos = |slice: &[(u32, ClassId)], c: ClassId| {
            slice.binary_search_by_key(&c, |m| m.1).ok()
        };
        let a = self.of_size(big);
        if big == small {
            let (i, j) = (pos(a, p)?, pos(a, q)?);
            let (i, j) = (i.min(j), i.max(j));
            // pairs (i', j') with i' < i come first
            Some(i * a.len() - i * (i + 1) / 2 + (j - i - 1))
        } else {
            let b = self.of_size(small);
            let (i, j) = match (pos(a, p), pos(b, q)) {
                (Some(i), Some(j)) => (i, j),
                _ => (pos(a, q)?, pos(b, p)?),
            };
            Some(i * b.len() + j)
        }
    }

    fn unrank(&self, big: u32, small: u32, mut r: usize) -> (ClassId, ClassId) {
        let a = self.of_size(big);
        if big == small {
            let n = a.len();
            for i in 0..n {
                let row = n - i - 1;
                if r < row {
                    return (a[i].1, a[i + 1 + r].1);
                }
                r -= row;
            }
            unreachable!("rank out of range");
        }
        let b = self.of_size(small);
        (a[r / b.len()].1, b[r % b.len()].1)
    }
}

struct ClassInfo {
    colour: Colour,
    glues: GlueTuple,
    size: u32,
    class: ClassId,
}

/// Untried pairs of one group carrying the best size key.
struct Choice {
    group: usize,
    big: u32,
    small: u32,
    tried_ranks: Vec<usize>,
    untried: usize,
}

fn direction_masks(level: usize) -> impl Iterator<Item = u8> {
    (0u8..16).filter(move |m| m.count_ones() as usize == level)
}

impl CandidateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tried(&self) -> &[(ClassId, ClassId)] {
        &self.tried
    }

    pub fn mark_tried(&mut self, p: ClassId, q: ClassId) {
        self.tried.push((p.min(q), p.max(q)));
    }

    fn is_tried(&self, p: ClassId, q: ClassId) -> bool {
        self.tried.contains(&(p.min(q), p.max(q)))
    }

    /// Colour, tile and size of every class, in class order.
    fn class_infos(state: &MgtaState, pattern: &Pattern) -> Vec<ClassInfo> {
        state
            .classes()
            .iter()
            .map(|&c| ClassInfo {
                colour: class_colour(pattern, c),
                glues: state.tile(c),
                size: state.class_size(c) as u32,
                class: c,
            })
            .collect()
    }

    /// Same-colour groups of classes agreeing on the directions in `mask`.
    fn groups(&self, infos: &[ClassInfo], cells: usize, mask: u8) -> Vec<Group> {
        let mut keyed: Vec<(u16, [u32; 4], u32, ClassId)> = infos
            .iter()
            .map(|info| {
                let mut glues = [u32::MAX; 4];
                for d in Direction::ALL {
                    if mask & (1 << d as u8) != 0 {
                        glues[d as usize] = info.glues[d as usize];
                    }
                }
                (info.colour, glues, u32::MAX - info.size, info.class)
            })
            .collect();
        keyed.sort_unstable();
        let mut groups: Vec<Group> = keyed
            .chunk_by(|a, b| (a.0, a.1) == (b.0, b.1))
            .filter(|run| run.len() >= 2)
            .map(|run| Group {
                members: run.iter().map(|k| (u32::MAX - k.2, k.3)).collect(),
                tried: Vec::new(),
            })
            .collect();
        if !self.tried.is_empty() {
            let mut group_of = vec![usize::MAX; cells];
            for (i, g) in groups.iter().enumerate() {
                for m in &g.members {
                    group_of[m.1 as usize] = i;
                }
            }
            for &(p, q) in &self.tried {
                let g = group_of[p as usize];
                if g != usize::MAX && g == group_of[q as usize] {
                    groups[g].tried.push((p, q));
                }
            }
        }
        groups
    }

    /// Best untried size key of a group and the tried ranks under it.
    fn group_best(state: &MgtaState, group: &Group) -> Option<(u32, u32, Vec<usize>, usize)> {
        let mut tried: Vec<((u32, u32), usize)> = group
            .tried
            .iter()
            .filter_map(|&(p, q)| {
                let (sp, sq) = (state.class_size(p) as u32, state.class_size(q) as u32);
                let (big, small) = (sp.max(sq), sp.min(sq));
                Some(((big, small), group.rank(big, small, p, q)?))
            })
            .collect();
        tried.sort_unstable();
        tried.dedup();
        let sizes = group.sizes();
        for (i, &big) in sizes.iter().enumerate() {
            for &small in &sizes[i..] {
                let total = group.pair_count(big, small);
                if total == 0 {
                    continue;
                }
                let lo = tried.partition_point(|t| t.0 < (big, small));
                let hi = tried.partition_point(|t| t.0 <= (big, small));
                if hi - lo < total {
                    let ranks = tried[lo..hi].iter().map(|t| t.1).collect();
                    return Some((big, small, ranks, total));
                }
            }
        }
        None
    }

    /// The highest common-glue level holding an untried pair, with its
    /// groups and the best-scoring untried choices.
    ///
    /// A pair with exactly `g` common glues lies in exactly one group of
    /// level `g`. Pairs with more common glues also appear there, but they
    /// have all been tried once the higher levels are exhausted.
    fn best_level(&self, state: &MgtaState, pattern: &Pattern) -> Option<(usize, Vec<Group>, Vec<Choice>)> {
        let infos = Self::class_infos(state, pattern);
        for level in (0..=4).rev() {
            let groups: Vec<Group> = direction_masks(level)
                .flat_map(|mask| self.groups(&infos, pattern.len(), mask))
                .collect();
            let mut best: Option<(u32, u32)> = None;
            let mut choices = Vec::new();
            for (gi, group) in groups.iter().enumerate() {
                let Some((big, small, tried_ranks, total)) = Self::group_best(state, group) else {
                    continue;
                };
                let key = (big, small);
                if best.is_some_and(|b| b > key) {
                    continue;
                }
                if best.is_some_and(|b| b < key) {
                    choices.clear();
                }
                best = Some(key);
                choices.push(Choice {
                    group: gi,
                    big,
                    small,
                    untried: total - tried_ranks.len(),
                    tried_ranks,
                });
            }
            if !choices.is_empty() {
                return Some((level, groups, choices));
            }
        }
        None
    }

    /// Every untried pair with the best score, as `(min, max)` sorted.
    pub fn survivors(&self, state: &MgtaState, pattern: &Pattern) -> Vec<(ClassId, ClassId)> {
        let Some((_, groups, choices)) = self.best_level(state, pattern) else {
            return Vec::new();
        };
        let mut out: Vec<(ClassId, ClassId)> = choices
            .iter()
            .flat_map(|ch| {
                let g = &groups[ch.group];
                (0..g.pair_count(ch.big, ch.small)).map(move |r| g.unrank(ch.big, ch.small, r))
            })
            .map(|(p, q)| (p.min(q), p.max(q)))
            .filter(|&(p, q)| !self.is_tried(p, q))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Score of a pair.
    pub fn score(state: &MgtaState, p: ClassId, q: ClassId) -> Score {
        let (sp, sq) = (state.class_size(p) as u32, state.class_size(q) as u32);
        (state.common_glues_unchecked(p, q), sp.max(sq), sp.min(sq))
    }
}

/// Picks the next pair to try and removes it from the candidates; `None`
/// once every same-colour pair has been tried.
pub fn next_pair<R: Rng>(
    state: &MgtaState,
    pattern: &Pattern,
    candidates: &mut CandidateSet,
    rng: &mut R,
) -> Option<(ClassId, ClassId)> {
    let (_, groups, choices) = candidates.best_level(state, pattern)?;
    let total: usize = choices.iter().map(|c| c.untried).sum();
    let mut r = if total == 1 { 0 } else { rng.gen_range(0..total) };
    let choice = choices
        .iter()
        .find(|c| {
            if r < c.untried {
                true
            } else {
                r -= c.untried;
                false
            }
        })
        .expect("index within total");
    // skip over tried ranks to reach the r-th untried pair
    for &t in &choice.tried_ranks {
        if t <= r {
            r += 1;
        }
    }
    let (p, q) = groups[choice.group].unrank(choice.big, choice.small, r);
    let pair = (p.min(q), p.max(q));
    candidates.mark_tried(pair.0, pair.1);
    Some(pair)
}

struct Frame {
    state: MgtaState,
    candidates: CandidateSet,
}

/// One seeded run: depth-first with full backtracking, stopped by the step
/// or time budget, by exhausting the tree, or by reaching `k` tiles.
pub fn psh_run(pattern: &Pattern, config: &HeuristicConfig, worker: usize) -> SearchTrace {
    run_worker(pattern, config, worker, None)
}

fn run_worker(
    pattern: &Pattern,
    config: &HeuristicConfig,
    worker: usize,
    shared_best: Option<&AtomicUsize>,
) -> SearchTrace {
    let mut rng = worker_rng(config.seed, worker);
    let start = Instant::now();
    let root = MgtaState::initial(pattern.width(), pattern.height());
    let lower = pattern.colour_count();
    let mut sink = TraceSink::new(root.class_count(), config.report_every);
    let mut best = root.clone();
    let mut steps = 0u64;
    let mut stack = vec![Frame {
        state: root,
        candidates: CandidateSet::new(),
    }];
    let mut exhausted = true;
    while let Some(top) = stack.last_mut() {
        if best.class_count() == lower {
            break;
        }
        if steps >= config.step_budget || config.time_budget.is_some_and(|t| start.elapsed() >= t) {
            exhausted = false;
            break;
        }
        let Some((p, q)) = next_pair(&top.state, pattern, &mut top.candidates, &mut rng) else {
            stack.pop();
            continue;
        };
        let mut child = top.state.clone();
        child.merge(p, q);
        steps += 1;
        let mut live = true;
        while let Some((a, b)) = child.blocked_pair() {
            if class_colour(pattern, a) != class_colour(pattern, b) {
                live = false;
                break;
            }
            child.merge(a, b);
            steps += 1;
        }
        sink.tick(steps);
        if !live {
            continue;
        }
        if child.class_count() < best.class_count() {
            sink.improve(steps, child.class_count());
            best = child.clone();
            if let Some(shared) = shared_best {
                let prev = shared.fetch_min(best.class_count(), Ordering::Relaxed);
                if best.class_count() < prev {
                    log::debug!("worker {worker}: {} tiles at step {steps}", best.class_count());
                }
            }
        }
        stack.push(Frame {
            state: child,
            candidates: CandidateSet::new(),
        });
    }
    let best_size = best.class_count();
    SearchTrace {
        records: sink.finish(steps),
        best: solution(&best, pattern),
        best_size,
        steps,
        optimal: exhausted || best_size == lower,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelTrace {
    /// Pointwise minimum of the worker traces; its `best` is the smallest
    /// solution, lowest worker index first.
    pub merged: SearchTrace,
    pub workers: Vec<SearchTrace>,
}

/// Independent seeded runs on the rayon pool.
pub fn psh_parallel(pattern: &Pattern, config: &HeuristicConfig) -> ParallelTrace {
    assert!(config.workers >= 1, "at least one worker");
    let shared = AtomicUsize::new(pattern.len());
    let workers: Vec<SearchTrace> = (0..config.workers)
        .into_par_iter()
        .map(|i| run_worker(pattern, config, i, Some(&shared)))
        .collect();
    ParallelTrace {
        merged: merge_traces(&workers),
        workers,
    }
}

/// Best size across workers at every step count where some worker records.
pub fn merge_traces(workers: &[SearchTrace]) -> SearchTrace {
    let winner = workers
        .iter()
        .min_by_key(|t| t.best_size)
        .expect("at least one trace");
    let mut points: Vec<u64> = workers
        .iter()
        .flat_map(|t| t.records.iter().map(|r| r.steps))
        .collect();
    points.sort_unstable();
    points.dedup();
    let last = points.last().copied().unwrap_or(0);
    let mut records: Vec<TraceRecord> = Vec::new();
    for s in points {
        let (best_size, elapsed_ms) = workers
            .iter()
            .filter_map(|t| {
                let idx = t.records.partition_point(|r| r.steps <= s).checked_sub(1)?;
                let r = t.records[idx];
                Some((r.best_size, r.elapsed_ms))
            })
            .min_by_key(|&(b, _)| b)
            .expect("every trace starts at step 0");
        debug_assert_eq!(
            Some(best_size),
            workers.iter().filter_map(|t| best_at(&t.records, s)).min()
        );
        if records.last().is_none_or(|r| r.best_size != best_size) || s == last {
            records.push(TraceRecord {
                steps: s,
                best_size,
                elapsed_ms,
            });
        }
    }
    SearchTrace {
        records,
        best: winner.best.clone(),
        best_size: winner.best_size,
        steps: workers.iter().map(|t| t.steps).max().unwrap_or(0),
        optimal: workers.iter().any(|t| t.optimal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atam::verify_solution;
    use crate::partition::Partition;
    use crate::pattern::{binary_counter, sierpinski};
    use rand::seq::SliceRandom;

    /// Direct three-pass filter over all untried same-colour pairs.
    fn naive_survivors(
        state: &MgtaState,
        pattern: &Pattern,
        tried: &[(ClassId, ClassId)],
    ) -> Vec<(ClassId, ClassId)> {
        let cls = state.classes();
        let mut pairs: Vec<(ClassId, ClassId)> = Vec::new();
        for (i, &p) in cls.iter().enumerate() {
            for &q in &cls[i + 1..] {
                if class_colour(pattern, p) == class_colour(pattern, q) && !tried.contains(&(p, q)) {
                    pairs.push((p, q));
                }
            }
        }
        let tile = |c: ClassId| state.tile(c);
        let g = |&(p, q): &(ClassId, ClassId)| {
            let (a, b) = (tile(p), tile(q));
            (0..4).filter(|&d| a[d] == b[d]).count()
        };
        let size = |c: ClassId| state.class_size(c);
        let max_g = pairs.iter().map(g).max();
        pairs.retain(|pq| Some(g(pq)) == max_g);
        let big = |&(p, q): &(ClassId, ClassId)| size(p).max(size(q));
        let max_big = pairs.iter().map(big).max();
        pairs.retain(|pq| Some(big(pq)) == max_big);
        let small = |&(p, q): &(ClassId, ClassId)| size(p).min(size(q));
        let max_small = pairs.iter().map(small).max();
        pairs.retain(|pq| Some(small(pq)) == max_small);
        pairs
    }

    fn random_state(rng: &mut ChaCha8Rng, pattern: &Pattern, merges: usize) -> MgtaState {
        let mut s = MgtaState::initial(pattern.width(), pattern.height());
        for _ in 0..merges {
            let cls = s.classes().to_vec();
            let p = *cls.choose(rng).unwrap();
            let same: Vec<ClassId> = cls
                .iter()
                .copied()
                .filter(|&q| q != p && class_colour(pattern, q) == class_colour(pattern, p))
                .collect();
            if let Some(&q) = same.choose(rng) {
                s.merge(p, q);
            }
        }
        s
    }

    #[test]
    fn common_glues_of_a_class_with_itself_is_four() {
        let s = MgtaState::initial(3, 3);
        assert_eq!(common_glues(&s, 4, 4), Ok(4));
        assert_eq!(common_glues(&s, 4, 0), Ok(0));
        assert!(common_glues(&s, 4, 9).is_err());
    }

    #[test]
    fn single_candidate_is_returned() {
        let p = Pattern::parse("2 1 2\n0 1\n").unwrap();
        let s = MgtaState::initial(2, 1);
        let mut h = CandidateSet::new();
        let mut rng = worker_rng(0, 0);
        assert_eq!(next_pair(&s, &p, &mut h, &mut rng), None);
        let p = Pattern::parse("3 1 2\n0 1 0\n").unwrap();
        let s = MgtaState::initial(3, 1);
        assert_eq!(next_pair(&s, &p, &mut h, &mut rng), Some((0, 2)));
        assert_eq!(next_pair(&s, &p, &mut h, &mut rng), None);
    }

    #[test]
    fn highest_common_glue_count_wins() {
        // merging cells 0 and 2 of a 3x3 grid unifies the south glues of 3 and 5
        let p = Pattern::parse("3 3 1\n0 0 0\n0 0 0\n0 0 0\n").unwrap();
        let mut s = MgtaState::initial(3, 3);
        s.merge(0, 2);
        let h = CandidateSet::new();
        let surv = h.survivors(&s, &p);
        assert!(surv.iter().all(|&(a, b)| CandidateSet::score(&s, a, b).0 >= 1));
        assert_eq!(surv, naive_survivors(&s, &p, &[]));
    }

    #[test]
    fn survivors_match_naive_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let (w, h) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let k = rng.gen_range(1..4);
            let cells: Vec<u16> = (0..w * h).map(|_| rng.gen_range(0..k)).collect();
            let pattern = Pattern::from_fn(w, h, |x, y| cells[(y - 1) * w + (x - 1)]);
            let merges = rng.gen_range(0..w * h);
            let state = random_state(&mut rng, &pattern, merges);
            let mut cands = CandidateSet::new();
            for _ in 0..rng.gen_range(0..6) {
                let expected = naive_survivors(&state, &pattern, cands.tried());
                assert_eq!(cands.survivors(&state, &pattern), expected);
                match next_pair(&state, &pattern, &mut cands, &mut rng) {
                    Some(pair) => assert!(expected.contains(&pair)),
                    None => {
                        assert!(expected.is_empty());
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn tie_break_is_uniform() {
        // one colour, initial state: all pairs tie on every filter
        let p = Pattern::parse("3 1 1\n0 0 0\n").unwrap();
        let s = MgtaState::initial(3, 1);
        let mut rng = worker_rng(1, 0);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..3000 {
            let mut h = CandidateSet::new();
            *counts.entry(next_pair(&s, &p, &mut h, &mut rng).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 3);
        assert!(counts.values().all(|&c| (850..1150).contains(&c)), "{counts:?}");
    }

    #[test]
    fn rank_and_unrank_agree() {
        let g = Group {
            members: vec![(3, 1), (3, 4), (3, 9), (2, 0), (1, 2), (1, 5)],
            tried: Vec::new(),
        };
        for (big, small) in [(3, 3), (3, 2), (3, 1), (2, 1), (1, 1)] {
            for r in 0..g.pair_count(big, small) {
                let (p, q) = g.unrank(big, small, r);
                assert_eq!(g.rank(big, small, p, q), Some(r));
                assert_eq!(g.rank(big, small, q, p), Some(r));
            }
        }
    }

    #[test]
    fn single_cell_needs_no_merge() {
        let p = Pattern::parse("1 1 1\n0\n").unwrap();
        let t = psh_run(&p, &HeuristicConfig::default(), 0);
        assert_eq!(t.best_size, 1);
        assert!(t.steps <= 1);
        assert!(t.optimal);
    }

    #[test]
    fn small_instances_verify() {
        for p in [sierpinski(8, 8), binary_counter(6, 8)] {
            let t = psh_run(&p, &HeuristicConfig::default(), 0);
            assert!(verify_solution(&t.best, &p).is_ok());
            assert!(t.records.windows(2).all(|w| w[0].best_size >= w[1].best_size));
            let part = crate::atam::assemble(&t.best, p.width(), p.height())
                .unwrap()
                .partition()
                .unwrap();
            assert_eq!(part.size(), t.best_size);
            assert!(crate::partition::colour_partition(&p).refines(&part).unwrap());
            let _: Partition = part;
        }
    }

    #[test]
    fn one_worker_equals_single_run() {
        let p = sierpinski(8, 8);
        let cfg = HeuristicConfig {
            step_budget: 500,
            ..HeuristicConfig::default()
        };
        let par = psh_parallel(&p, &cfg);
        let single = psh_run(&p, &cfg, 0);
        let strip = |t: &SearchTrace| {
            t.records
                .iter()
                .map(|r| (r.steps, r.best_size))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&par.workers[0]), strip(&single));
        assert_eq!(par.merged.best, single.best);
    }

    #[test]
    fn merged_trace_is_pointwise_minimum() {
        let p = binary_counter(6, 6);
        let cfg = HeuristicConfig {
            workers: 4,
            seed: 3,
            step_budget: 300,
            ..HeuristicConfig::default()
        };
        let par = psh_parallel(&p, &cfg);
        let points: Vec<u64> = par
            .workers
            .iter()
            .flat_map(|t| t.records.iter().map(|r| r.steps))
            .collect();
        for s in points {
            let expected = par.workers.iter().filter_map(|t| t.best_at(s)).min();
            assert_eq!(par.merged.best_at(s), expected);
        }
        assert_eq!(
            par.merged.best_size,
            par.workers.iter().map(|t| t.best_size).min().unwrap()
        );
    }

    #[test]
    fn adding_workers_never_hurts() {
        let p = binary_counter(5, 6);
        let run = |workers| {
            psh_parallel(
                &p,
                &HeuristicConfig {
                    workers,
                    seed: 11,
                    step_budget: 200,
                    ..HeuristicConfig::default()
                },
            )
            .merged
            .best_size
        };
        let sizes: Vec<usize> = (1..=4).map(run).collect();
        assert!(sizes.windows(2).all(|w| w[0] >= w[1]), "{sizes:?}");
    }
}
