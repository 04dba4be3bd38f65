//! Exact partition search by branch and bound.
//!
//! The tree starts at the all-singletons partition. A constructible node
//! branches on same-colour class pairs; a blocked node has the single child
//! obtained by merging its witness pair. Each node carries one restriction
//! graph per colour whose edges are pairs that must stay apart in the
//! subtree. Siblings are generated so that every graph is a clique plus
//! isolated vertices, which keeps its chromatic number trivial and gives the
//! lower bound used for pruning.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trace::{SearchTrace, TraceSink};
use super::{class_colour, solution};
use crate::mgta::{ClassId, MgtaState};
use crate::pattern::Pattern;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Traversal {
    #[default]
    DepthFirst,
    /// Open nodes ordered by bound, deeper nodes first among equal bounds.
    BestFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of class merges.
    pub step_budget: u64,
    pub rng_seed: u64,
    pub traversal: Traversal,
    /// Steps between periodic trace records; 0 records improvements only.
    pub report_every: u64,
    pub time_budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            step_budget: u64::MAX,
            rng_seed: 0,
            traversal: Traversal::DepthFirst,
            report_every: 0,
            time_budget: None,
        }
    }
}

/// Restriction graph of one colour: a clique plus isolated vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct ColourGraph {
    clique: Vec<ClassId>,
    isolated: Vec<ClassId>,
}

impl ColourGraph {
    fn chromatic_number(&self) -> usize {
        if self.clique.is_empty() {
            usize::from(!self.isolated.is_empty())
        } else {
            self.clique.len()
        }
    }
}

fn insert_sorted(v: &mut Vec<ClassId>, x: ClassId) {
    let pos = v.binary_search(&x).unwrap_err();
    v.insert(pos, x);
}

fn remove_sorted(v: &mut Vec<ClassId>, x: ClassId) -> bool {
    match v.binary_search(&x) {
        Ok(pos) => {
            v.remove(pos);
            true
        }
        Err(_) => false,
    }
}

/// Per-colour restriction graphs over the current classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneGraphs {
    graphs: Vec<ColourGraph>,
}

impl PruneGraphs {
    /// Edgeless graphs: every class is an isolated vertex of its colour.
    pub fn new(state: &MgtaState, pattern: &Pattern) -> Self {
        let mut graphs = vec![ColourGraph::default(); pattern.colour_count()];
        for &c in state.classes() {
            graphs[class_colour(pattern, c) as usize].isolated.push(c);
        }
        Self { graphs }
    }

    /// Builds graphs from explicit cliques; the remaining classes are isolated.
    pub fn with_cliques(state: &MgtaState, pattern: &Pattern, cliques: &[Vec<ClassId>]) -> Self {
        let mut g = Self::new(state, pattern);
        for (colour, clique) in cliques.iter().enumerate() {
            for &c in clique {
                assert!(remove_sorted(&mut g.graphs[colour].isolated, c));
                insert_sorted(&mut g.graphs[colour].clique, c);
            }
        }
        g
    }

    pub fn bound(&self) -> usize {
        self.graphs.iter().map(ColourGraph::chromatic_number).sum()
    }

    pub fn clique(&self, colour: usize) -> &[ClassId] {
        &self.graphs[colour].clique
    }

    pub fn isolated(&self, colour: usize) -> &[ClassId] {
        &self.graphs[colour].isolated
    }

    pub fn has_edge(&self, colour: usize, p: ClassId, q: ClassId) -> bool {
        let k = &self.graphs[colour].clique;
        p != q && k.binary_search(&p).is_ok() && k.binary_search(&q).is_ok()
    }

    /// Contracts `p` and `q` into the vertex `min(p, q)`. Returns `false`
    /// and leaves the graphs untouched if they are adjacent.
    pub fn merge(&mut self, colour: usize, p: ClassId, q: ClassId) -> bool {
        if self.has_edge(colour, p, q) {
            return false;
        }
        let g = &mut self.graphs[colour];
        let keep = p.min(q);
        let in_clique = remove_sorted(&mut g.clique, p) | remove_sorted(&mut g.clique, q);
        remove_sorted(&mut g.isolated, p);
        remove_sorted(&mut g.isolated, q);
        if in_clique {
            insert_sorted(&mut g.clique, keep);
        } else {
            insert_sorted(&mut g.isolated, keep);
        }
        true
    }
}

/// Lower bound on the size of any constructible partition in the subtree.
pub fn bound(graphs: &PruneGraphs) -> usize {
    graphs.bound()
}

/// Sibling generator of one constructible node.
///
/// An isolated vertex `v` of the colour with most isolated vertices is
/// paired with every clique member in turn; each emitted pair becomes an
/// edge for later siblings, so once `v` has been tried against the whole
/// clique it joins it.
struct Children {
    graphs: PruneGraphs,
    cursor: Option<Cursor>,
}

struct Cursor {
    colour: usize,
    vertex: ClassId,
    snapshot: Vec<ClassId>,
    next: usize,
}

impl Children {
    fn new(graphs: PruneGraphs) -> Self {
        Self {
            graphs,
            cursor: None,
        }
    }

    fn next<R: Rng>(&mut self, rng: &mut R) -> Option<(ClassId, ClassId, PruneGraphs)> {
        loop {
            let Some(cur) = &mut self.cursor else {
                let most = self.graphs.graphs.iter().map(|g| g.isolated.len()).max()?;
                if most == 0 {
                    return None;
                }
                let tied: Vec<usize> = (0..self.graphs.graphs.len())
                    .filter(|&c| self.graphs.graphs[c].isolated.len() == most)
                    .collect();
                let colour = if tied.len() == 1 {
                    tied[0]
                } else {
                    tied[rng.gen_range(0..tied.len())]
                };
                let g = &mut self.graphs.graphs[colour];
                let vertex = g.isolated.remove(0);
                if g.clique.is_empty() {
                    g.clique.push(vertex);
                    continue;
                }
                self.cursor = Some(Cursor {
                    colour,
                    vertex,
                    snapshot: g.clique.clone(),
                    next: 0,
                });
                continue;
            };
            if cur.next == cur.snapshot.len() {
                insert_sorted(&mut self.graphs.graphs[cur.colour].clique, cur.vertex);
                self.cursor = None;
                continue;
            }
            let u = cur.snapshot[cur.next];
            cur.next += 1;
            let mut child = self.graphs.clone();
            let mut clique = cur.snapshot.clone();
            remove_sorted(&mut clique, u);
            insert_sorted(&mut clique, u.min(cur.vertex));
            child.graphs[cur.colour].clique = clique;
            return Some((cur.vertex, u, child));
        }
    }
}

/// Applies forced merges until the state is constructible. Returns `false`
/// on a dead end: a witness pair of different colours or joined by an edge.
fn settle(
    state: &mut MgtaState,
    graphs: &mut PruneGraphs,
    pattern: &Pattern,
    steps: &mut u64,
) -> bool {
    while let Some((p, q)) = state.blocked_pair() {
        let colour = class_colour(pattern, p);
        if colour != class_colour(pattern, q) || !graphs.merge(colour as usize, p, q) {
            return false;
        }
        state.merge(p, q);
        *steps += 1;
    }
    true
}

/// A constructible node reached by the search, for observers.
pub struct Visit<'a> {
    pub state: &'a MgtaState,
    pub graphs: &'a PruneGraphs,
    pub depth: usize,
}

/// Solves to optimality within the budget.
pub fn psbb_solve(pattern: &Pattern, config: &SearchConfig) -> SearchTrace {
    psbb_solve_with(pattern, config, |_| {})
}

/// As [`psbb_solve`], calling `observe` on every constructible node, in
/// visiting order.
pub fn psbb_solve_with(
    pattern: &Pattern,
    config: &SearchConfig,
    mut observe: impl FnMut(&Visit<'_>),
) -> SearchTrace {
    let root = MgtaState::initial(pattern.width(), pattern.height());
    let graphs = PruneGraphs::new(&root, pattern);
    let mut search = Search {
        pattern,
        config,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        start: Instant::now(),
        steps: 0,
        sink: TraceSink::new(root.class_count(), config.report_every),
        best: root.clone(),
        lower: pattern.colour_count(),
    };
    observe(&Visit {
        state: &root,
        graphs: &graphs,
        depth: 0,
    });
    let exhausted = match config.traversal {
        Traversal::DepthFirst => search.depth_first(root, graphs, &mut observe),
        Traversal::BestFirst => search.best_first(root, graphs, &mut observe),
    };
    let best_size = search.best.class_count();
    let best = solution(&search.best, pattern);
    SearchTrace {
        records: search.sink.finish(search.steps),
        best,
        best_size,
        steps: search.steps,
        optimal: exhausted || best_size == search.lower,
    }
}

struct Search<'a> {
    pattern: &'a Pattern,
    config: &'a SearchConfig,
    rng: ChaCha8Rng,
    start: Instant,
    steps: u64,
    sink: TraceSink,
    best: MgtaState,
    lower: usize,
}

struct Frame {
    state: MgtaState,
    children: Children,
    depth: usize,
}

impl Search<'_> {
    fn out_of_budget(&self) -> bool {
        self.steps >= self.config.step_budget
            || self
                .config
                .time_budget
                .is_some_and(|t| self.start.elapsed() >= t)
    }

    fn best_size(&self) -> usize {
        self.best.class_count()
    }

    /// Materialises the child for pair `(v, u)`; `None` on a dead end.
    fn child(
        &mut self,
        parent: &MgtaState,
        v: ClassId,
        u: ClassId,
        mut graphs: PruneGraphs,
    ) -> Option<(MgtaState, PruneGraphs)> {
        let mut state = parent.clone();
        state.merge(v, u);
        self.steps += 1;
        let live = settle(&mut state, &mut graphs, self.pattern, &mut self.steps);
        self.sink.tick(self.steps);
        if !live {
            return None;
        }
        if state.class_count() < self.best_size() {
            self.sink.improve(self.steps, state.class_count());
            self.best = state.clone();
        }
        Some((state, graphs))
    }

    /// Returns `true` if the tree was exhausted.
    fn depth_first(
        &mut self,
        root: MgtaState,
        graphs: PruneGraphs,
        observe: &mut impl FnMut(&Visit<'_>),
    ) -> bool {
        let mut stack = vec![Frame {
            state: root,
            children: Children::new(graphs),
            depth: 0,
        }];
        while let Some(top) = stack.last_mut() {
            if self.best_size() == self.lower {
                return true;
            }
            if self.out_of_budget() {
                return false;
            }
            let Some((v, u, graphs)) = top.children.next(&mut self.rng) else {
                stack.pop();
                continue;
            };
            // later siblings only have larger cliques, so their bounds are no smaller
            if graphs.bound() >= self.best_size() {
                stack.pop();
                continue;
            }
            let depth = top.depth + 1;
            if let Some((state, graphs)) = self.child(&top.state, v, u, graphs) {
                observe(&Visit {
                    state: &state,
                    graphs: &graphs,
                    depth,
                });
                stack.push(Frame {
                    state,
                    children: Children::new(graphs),
                    depth,
                });
            }
        }
        true
    }

    fn best_first(
        &mut self,
        root: MgtaState,
        graphs: PruneGraphs,
        observe: &mut impl FnMut(&Visit<'_>),
    ) -> bool {
        struct Open {
            key: (usize, Reverse<usize>, u64),
            state: MgtaState,
            graphs: PruneGraphs,
        }
        impl PartialEq for Open {
            fn eq(&self, other: &Self) -> bool {
                self.key == other.key
            }
        }
        impl Eq for Open {}
        impl PartialOrd for Open {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Open {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.key.cmp(&other.key)
            }
        }

        let mut seq = 0u64;
        let mut open = BinaryHeap::new();
        open.push(Reverse(Open {
            key: (graphs.bound(), Reverse(0), seq),
            state: root,
            graphs,
        }));
        while let Some(Reverse(node)) = open.pop() {
            let (b, Reverse(depth), _) = node.key;
            if b >= self.best_size() {
                return true;
            }
            let mut children = Children::new(node.graphs);
            while let Some((v, u, graphs)) = children.next(&mut self.rng) {
                if self.out_of_budget() {
                    return false;
                }
                let cb = graphs.bound();
                if cb >= self.best_size() {
                    break;
                }
                if let Some((state, graphs)) = self.child(&node.state, v, u, graphs) {
                    observe(&Visit {
                        state: &state,
                        graphs: &graphs,
                        depth: depth + 1,
                    });
                    seq += 1;
                    open.push(Reverse(Open {
                        key: (cb, Reverse(depth + 1), seq),
                        state,
                        graphs,
                    }));
                }
            }
        }
        true
    }
}
