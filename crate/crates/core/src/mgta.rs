//! Most general tile assignments (MGTAs) and the constructibility test.
//!
//! Every cell owns four edge slots, one per direction. Glue types are the
//! classes of a disjoint-set forest over those slots: adjacent cells have
//! their touching slots unified, and cells of one partition class have all
//! same-direction slots unified. The resulting slot partition is the finest
//! one compatible with both requirements, which is exactly the most general
//! assignment. Merging two partition classes only adds four unions, so the
//! assignment is maintained incrementally while a search coarsens the
//! partition.
//!
//! A class is named by its smallest row-major cell index ([`ClassId`]); the
//! id survives merges with any class of larger id.

use crate::dsu::DisjointSet;
use crate::error::PartitionError;
use crate::partition::Partition;

/// Smallest row-major cell index of a class.
pub type ClassId = u32;

/// A tile as its four glues in `N, E, S, W` order.
pub type GlueTuple = [u32; 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }
}

/// Result of the constructibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constructibility {
    /// The MGTA is injective and deterministic; carries the canonical tile
    /// of each class, classes in ascending id order.
    Constructible(Vec<GlueTuple>),
    /// Two distinct classes share their south and west glues.
    Blocked(ClassId, ClassId),
}

/// MGTA with glue ids renumbered by first appearance over classes in
/// ascending id order and directions `N, E, S, W`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalAssignment {
    pub class_of: Vec<u32>,
    pub classes: Vec<ClassId>,
    pub tiles: Vec<GlueTuple>,
    pub glue_count: usize,
}

#[derive(Clone, Debug)]
pub struct MgtaState {
    width: usize,
    height: usize,
    class_of: Vec<ClassId>,
    class_size: Vec<u32>,
    classes: Vec<ClassId>,
    glues: DisjointSet,
}

#[inline]
fn slot(cell: u32, dir: Direction) -> u32 {
    cell * 4 + dir as u32
}

impl MgtaState {
    fn unify_adjacent(glues: &mut DisjointSet, width: usize, height: usize) {
        for y in 0..height {
            for x in 0..width {
                let cell = (y * width + x) as u32;
                if y + 1 < height {
                    glues.union(
                        slot(cell, Direction::North),
                        slot(cell + width as u32, Direction::South),
                    );
                }
                if x + 1 < width {
                    glues.union(slot(cell, Direction::East), slot(cell + 1, Direction::West));
                }
            }
        }
    }

    /// MGTA of the all-singletons partition.
    pub fn initial(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "grid dimensions must be positive");
        let cells = width * height;
        let mut glues = DisjointSet::new(4 * cells);
        Self::unify_adjacent(&mut glues, width, height);
        Self {
            width,
            height,
            class_of: (0..cells as u32).collect(),
            class_size: vec![1; cells],
            classes: (0..cells as u32).collect(),
            glues,
        }
    }

    /// Builds the MGTA of `partition` from scratch: start from an injective
    /// labelling of class-direction pairs, then merge the glues on both sides
    /// of every internal adjacency.
    pub fn build(partition: &Partition) -> Self {
        let (width, height) = (partition.width(), partition.height());
        let cells = width * height;
        let mut glues = DisjointSet::new(4 * cells);
        let mut class_of = vec![0; cells];
        let mut class_size = vec![0; cells];
        let mut classes = Vec::with_capacity(partition.size());
        for members in partition.classes() {
            let id = members[0];
            classes.push(id);
            class_size[id as usize] = members.len() as u32;
            for &cell in members {
                class_of[cell as usize] = id;
                for dir in Direction::ALL {
                    glues.union(slot(id, dir), slot(cell, dir));
                }
            }
        }
        Self::unify_adjacent(&mut glues, width, height);
        Self {
            width,
            height,
            class_of,
            class_size,
            classes,
            glues,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Live class ids, ascending.
    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn contains(&self, class: ClassId) -> bool {
        self.classes.binary_search(&class).is_ok()
    }

    pub fn class_of(&self, cell: usize) -> ClassId {
        self.class_of[cell]
    }

    pub fn class_size(&self, class: ClassId) -> usize {
        self.class_size[class as usize] as usize
    }

    /// Current glue representative on one side of a class.
    #[inline]
    pub fn glue(&self, class: ClassId, dir: Direction) -> u32 {
        self.glues.find(slot(class, dir))
    }

    pub fn tile(&self, class: ClassId) -> GlueTuple {
        Direction::ALL.map(|d| self.glue(class, d))
    }

    /// Combines classes `a` and `b` in place and returns the merged id.
    ///
    /// Panics if either id is not a live class or they coincide.
    pub fn merge(&mut self, a: ClassId, b: ClassId) -> ClassId {
        assert_ne!(a, b, "cannot merge a class with itself");
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        let pos = self
            .classes
            .binary_search(&gone)
            .expect("merged class must be live");
        debug_assert!(self.contains(keep));
        self.classes.remove(pos);
        for c in self.class_of.iter_mut() {
            if *c == gone {
                *c = keep;
            }
        }
        self.class_size[keep as usize] += self.class_size[gone as usize];
        for dir in Direction::ALL {
            self.glues.union(slot(keep, dir), slot(gone, dir));
        }
        keep
    }

    /// The MGTA of the partition with `a` and `b` combined; `self` is left
    /// untouched.
    pub fn merge_tiles(&self, a: ClassId, b: ClassId) -> Result<Self, PartitionError> {
        for c in [a, b] {
            if !self.contains(c) {
                return Err(PartitionError::UnknownClass(c as usize));
            }
        }
        if a == b {
            return Err(PartitionError::SameClass(a as usize));
        }
        let mut next = self.clone();
        next.merge(a, b);
        Ok(next)
    }

    /// Number of directions on which the tiles of `a` and `b` agree.
    pub fn common_glues(&self, a: ClassId, b: ClassId) -> Result<usize, PartitionError> {
        for c in [a, b] {
            if !self.contains(c) {
                return Err(PartitionError::UnknownClass(c as usize));
            }
        }
        Ok(self.common_glues_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn common_glues_unchecked(&self, a: ClassId, b: ClassId) -> usize {
        Direction::ALL
            .iter()
            .filter(|&&d| self.glue(a, d) == self.glue(b, d))
            .count()
    }

    fn canonical_ids(&self) -> (Vec<u32>, usize) {
        let mut ids = vec![u32::MAX; self.glues.len()];
        let mut next = 0u32;
        for &class in &self.classes {
            for dir in Direction::ALL {
                let root = self.glue(class, dir) as usize;
                if ids[root] == u32::MAX {
                    ids[root] = next;
                    next += 1;
                }
            }
        }
        (ids, next as usize)
    }

    /// Two distinct classes with equal south and west glues, if any.
    ///
    /// When several pairs collide, returns the one with the smallest
    /// canonical `(S, W)` glue pair, then the smallest class ids, so that
    /// searches branch reproducibly.
    pub fn blocked_pair(&self) -> Option<(ClassId, ClassId)> {
        let mut keys: Vec<(u32, u32, ClassId)> = self
            .classes
            .iter()
            .map(|&c| (self.glue(c, Direction::South), self.glue(c, Direction::West), c))
            .collect();
        keys.sort_unstable();
        if !keys.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return None;
        }
        let (ids, _) = self.canonical_ids();
        for k in keys.iter_mut() {
            *k = (ids[k.0 as usize], ids[k.1 as usize], k.2);
        }
        keys.sort_unstable();
        keys.windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
            .map(|w| (w[0].2, w[1].2))
    }

    /// Constructibility: the MGTA is injective and its tile set deterministic.
    /// Non-injectivity implies a shared `(S, W)` pair, so one check covers
    /// both conditions.
    pub fn check_constructible(&self) -> Constructibility {
        match self.blocked_pair() {
            Some((a, b)) => Constructibility::Blocked(a, b),
            None => Constructibility::Constructible(self.canonical_glues().tiles),
        }
    }

    pub fn is_constructible(&self) -> bool {
        self.blocked_pair().is_none()
    }

    pub fn canonical_glues(&self) -> CanonicalAssignment {
        let (ids, glue_count) = self.canonical_ids();
        let tiles = self
            .classes
            .iter()
            .map(|&c| Direction::ALL.map(|d| ids[self.glue(c, d) as usize]))
            .collect();
        let dense = self.dense_class_index();
        CanonicalAssignment {
            class_of: self.class_of.iter().map(|&c| dense[c as usize]).collect(),
            classes: self.classes.clone(),
            tiles,
            glue_count,
        }
    }

    fn dense_class_index(&self) -> Vec<u32> {
        let mut dense = vec![u32::MAX; self.class_of.len()];
        for (i, &c) in self.classes.iter().enumerate() {
            dense[c as usize] = i as u32;
        }
        dense
    }

    /// The underlying partition in canonical form.
    pub fn partition(&self) -> Partition {
        Partition::from_labels(self.width, self.height, &self.class_of)
    }

    /// Canonical tile of every cell, row-major.
    pub fn cell_tiles(&self) -> Vec<GlueTuple> {
        let canon = self.canonical_glues();
        canon
            .class_of
            .iter()
            .map(|&i| canon.tiles[i as usize])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::colour_partition;
    use crate::pattern::{sierpinski, Pattern};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The smallest two-colour pattern whose colour partition collapses to
    /// two identical tiles.
    pub(crate) fn collapsing_pattern() -> Pattern {
        Pattern::parse("2 3 2\n1 0\n0 1\n0 0\n").unwrap()
    }

    #[test]
    fn single_cell_has_four_distinct_glues() {
        let s = MgtaState::initial(1, 1);
        let canon = s.canonical_glues();
        assert_eq!(canon.tiles, vec![[0, 1, 2, 3]]);
        assert_eq!(canon.glue_count, 4);
    }

    #[test]
    fn initial_partition_is_injective_and_constructible() {
        let s = MgtaState::initial(4, 3);
        let tiles: std::collections::HashSet<_> = s.classes().iter().map(|&c| s.tile(c)).collect();
        assert_eq!(tiles.len(), 12);
        assert!(matches!(s.check_constructible(), Constructibility::Constructible(t) if t.len() == 12));
        // glues are shared exactly across adjacencies: 4·12 slots, 3·3 + 4·2 internal edges
        assert_eq!(s.canonical_glues().glue_count, 48 - 17);
    }

    #[test]
    fn collapsing_partition_yields_identical_tiles() {
        let p = collapsing_pattern();
        let s = MgtaState::build(&colour_partition(&p));
        let [a, b] = [s.classes()[0], s.classes()[1]];
        assert_eq!(s.tile(a), s.tile(b));
        assert_eq!(s.common_glues(a, b), Ok(4));
        assert_eq!(s.check_constructible(), Constructibility::Blocked(a, b));
    }

    #[test]
    fn monochrome_single_class_is_constructible() {
        let p = Pattern::parse("3 2 1\n0 0 0\n0 0 0\n").unwrap();
        let s = MgtaState::build(&colour_partition(&p));
        match s.check_constructible() {
            Constructibility::Constructible(tiles) => assert_eq!(tiles.len(), 1),
            other => panic!("expected constructible, got {other:?}"),
        }
    }

    #[test]
    fn merging_identical_tiles_only_changes_class_count() {
        let p = collapsing_pattern();
        let s = MgtaState::build(&colour_partition(&p));
        let [a, b] = [s.classes()[0], s.classes()[1]];
        let before = s.canonical_glues();
        let merged = s.merge_tiles(a, b).unwrap();
        let after = merged.canonical_glues();
        assert_eq!(after.classes.len(), before.classes.len() - 1);
        assert_eq!(after.glue_count, before.glue_count);
        assert_eq!(after.tiles[0], before.tiles[0]);
        assert!(merged.is_constructible());
    }

    #[test]
    fn merge_tiles_rejects_bad_classes() {
        let s = MgtaState::initial(2, 1);
        assert_eq!(s.merge_tiles(0, 0).unwrap_err(), PartitionError::SameClass(0));
        let merged = s.merge_tiles(0, 1).unwrap();
        assert_eq!(merged.merge_tiles(0, 1).unwrap_err(), PartitionError::UnknownClass(1));
        // the parent is untouched
        assert_eq!(s.class_count(), 2);
    }

    #[test]
    fn common_glues_basics() {
        let s = MgtaState::initial(3, 3);
        assert_eq!(s.common_glues(4, 4), Ok(4));
        assert_eq!(s.common_glues(0, 8), Ok(0));
        assert_eq!(s.common_glues(0, 9), Err(PartitionError::UnknownClass(9)));
        let mut s = s;
        s.merge(0, 2);
        // north neighbours of 0 and 2 (cells 3 and 5) now share their south glue
        let expect = Direction::ALL
            .iter()
            .filter(|&&d| s.canonical_glues().tiles[s.classes().binary_search(&3).unwrap()][d as usize]
                == s.canonical_glues().tiles[s.classes().binary_search(&5).unwrap()][d as usize])
            .count();
        assert_eq!(s.common_glues(3, 5), Ok(expect));
        assert_eq!(expect, 1);
    }

    fn random_partition(rng: &mut ChaCha8Rng, w: usize, h: usize, classes: u8) -> Partition {
        let labels: Vec<u8> = (0..w * h).map(|_| rng.gen_range(0..classes)).collect();
        Partition::from_labels(w, h, &labels)
    }

    /// Merges cells pairwise in random order until `target` is reached.
    fn random_merge_path(rng: &mut ChaCha8Rng, target: &Partition) -> Vec<MgtaState> {
        let mut s = MgtaState::initial(target.width(), target.height());
        let mut path = vec![s.clone()];
        let mut pairs: Vec<(u32, u32)> = target
            .classes()
            .flat_map(|m| m.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>())
            .collect();
        pairs.shuffle(rng);
        for (a, b) in pairs {
            let (ca, cb) = (s.class_of(a as usize), s.class_of(b as usize));
            if ca != cb {
                s.merge(ca, cb);
                path.push(s.clone());
            }
        }
        path
    }

    #[test]
    fn incremental_matches_from_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (w, h) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let labels = rng.gen_range(1..6);
            let target = random_partition(&mut rng, w, h, labels);
            for state in random_merge_path(&mut rng, &target) {
                let rebuilt = MgtaState::build(&state.partition());
                assert_eq!(state.canonical_glues(), rebuilt.canonical_glues());
                assert_eq!(state.is_constructible(), rebuilt.is_constructible());
            }
        }
    }

    #[test]
    fn canonical_form_is_independent_of_merge_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (w, h) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let target = random_partition(&mut rng, w, h, 3);
            let a = random_merge_path(&mut rng, &target).pop().unwrap();
            let b = random_merge_path(&mut rng, &target).pop().unwrap();
            assert_eq!(a.partition(), target);
            assert_eq!(a.canonical_glues(), b.canonical_glues());
        }
    }

    #[test]
    fn build_of_initial_equals_initial() {
        let s = MgtaState::build(&Partition::initial(3, 4));
        assert_eq!(s.canonical_glues(), MgtaState::initial(3, 4).canonical_glues());
    }

    #[test]
    fn sierpinski_colour_partition_is_blocked() {
        let p = sierpinski(6, 6);
        let s = MgtaState::build(&colour_partition(&p));
        assert!(matches!(s.check_constructible(), Constructibility::Blocked(_, _)));
    }

    /// Every assignment satisfying A1 arises by coarsening the MGTA's glue
    /// classes; any such coarsening must keep the MGTA's equalities.
    #[test]
    fn most_general_subsumes_coarsenings() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let (w, h) = (rng.gen_range(1..5), rng.gen_range(1..5));
            let part = random_partition(&mut rng, w, h, 3);
            let f = MgtaState::build(&part).canonical_glues();
            let g_map: Vec<u32> = (0..f.glue_count).map(|_| rng.gen_range(0..3)).collect();
            let g: Vec<GlueTuple> = f.tiles.iter().map(|t| t.map(|x| g_map[x as usize])).collect();
            // g satisfies A1 on every adjacency
            for y in 0..h {
                for x in 0..w {
                    let c = y * w + x;
                    let t = g[f.class_of[c] as usize];
                    if x + 1 < w {
                        assert_eq!(t[1], g[f.class_of[c + 1] as usize][3]);
                    }
                    if y + 1 < h {
                        assert_eq!(t[0], g[f.class_of[c + w] as usize][2]);
                    }
                }
            }
            for (p1, t1) in f.tiles.iter().enumerate() {
                for (p2, t2) in f.tiles.iter().enumerate() {
                    for d1 in 0..4 {
                        for d2 in 0..4 {
                            if t1[d1] == t2[d2] {
                                assert_eq!(g[p1][d1], g[p2][d2]);
                            }
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn injective_iff_tile_count_equals_class_count(w in 1usize..5, h in 1usize..5, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let part = random_partition(&mut rng, w, h, 4);
            let s = MgtaState::build(&part);
            let tiles: std::collections::HashSet<_> = s.classes().iter().map(|&c| s.tile(c)).collect();
            let injective = tiles.len() == s.class_count();
            if s.is_constructible() {
                prop_assert!(injective);
            }
            if !injective {
                prop_assert!(!s.is_constructible());
            }
        }
    }
}
