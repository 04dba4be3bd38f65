//! Partitions of the grid `[1, m] x [1, n]`, kept in canonical form.
//!
//! Class ids are dense and ordered by the row-major index of each class's
//! smallest cell, so two partitions are equal iff their `class_of` vectors
//! are equal.

use std::ops::Deref;

use crate::error::PartitionError;
use crate::pattern::Pattern;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    width: usize,
    height: usize,
    class_of: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl Partition {
    /// The all-singletons partition.
    pub fn initial(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "grid dimensions must be positive");
        let cells = width * height;
        Self {
            width,
            height,
            class_of: (0..cells as u32).collect(),
            members: (0..cells as u32).map(|c| vec![c]).collect(),
        }
    }

    /// Builds the partition whose classes are the level sets of `labels`
    /// (one arbitrary label per row-major cell).
    pub fn from_labels<L: Eq + std::hash::Hash + Copy>(
        width: usize,
        height: usize,
        labels: &[L],
    ) -> Self {
        assert_eq!(labels.len(), width * height, "one label per cell");
        let mut ids = std::collections::HashMap::new();
        let mut class_of = Vec::with_capacity(labels.len());
        let mut members: Vec<Vec<u32>> = Vec::new();
        for (cell, label) in labels.iter().enumerate() {
            let next = ids.len() as u32;
            let id = *ids.entry(*label).or_insert(next);
            if id as usize == members.len() {
                members.push(Vec::new());
            }
            members[id as usize].push(cell as u32);
            class_of.push(id);
        }
        Self {
            width,
            height,
            class_of,
            members,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of classes.
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Class id of a row-major cell index.
    pub fn class_of(&self, cell: usize) -> usize {
        self.class_of[cell] as usize
    }

    pub fn class_labels(&self) -> &[u32] {
        &self.class_of
    }

    /// Cells of a class, ascending.
    pub fn members(&self, class: usize) -> &[u32] {
        &self.members[class]
    }

    pub fn classes(&self) -> impl Iterator<Item = &[u32]> {
        self.members.iter().map(Vec::as_slice)
    }

    /// `self ⊑ finer`: every class of `finer` lies inside a class of `self`.
    pub fn refines(&self, finer: &Partition) -> Result<bool, PartitionError> {
        if self.width != finer.width || self.height != finer.height {
            return Err(PartitionError::GridMismatch);
        }
        Ok(finer.members.iter().all(|class| {
            let owner = self.class_of[class[0] as usize];
            class.iter().all(|&c| self.class_of[c as usize] == owner)
        }))
    }

    /// The partition with classes `a` and `b` combined.
    pub fn merge_classes(&self, a: usize, b: usize) -> Result<Partition, PartitionError> {
        let n = self.size();
        if a >= n {
            return Err(PartitionError::UnknownClass(a));
        }
        if b >= n {
            return Err(PartitionError::UnknownClass(b));
        }
        if a == b {
            return Err(PartitionError::SameClass(a));
        }
        let labels: Vec<u32> = self
            .class_of
            .iter()
            .map(|&c| if c as usize == b { a as u32 } else { c })
            .collect();
        Ok(Partition::from_labels(self.width, self.height, &labels))
    }
}

/// The partition induced by a pattern's colouring: one class per colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColourPartition(Partition);

impl ColourPartition {
    pub fn new(pattern: &Pattern) -> Self {
        ColourPartition(Partition::from_labels(
            pattern.width(),
            pattern.height(),
            pattern.cells(),
        ))
    }

    pub fn into_inner(self) -> Partition {
        self.0
    }
}

impl Deref for ColourPartition {
    type Target = Partition;

    fn deref(&self) -> &Partition {
        &self.0
    }
}

pub fn colour_partition(pattern: &Pattern) -> ColourPartition {
    ColourPartition::new(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{sierpinski, Pattern};
    use proptest::prelude::*;

    fn checkerboard() -> Pattern {
        Pattern::parse("2 2 2\n0 1\n1 0\n").unwrap()
    }

    #[test]
    fn initial_sizes() {
        assert_eq!(Partition::initial(1, 1).size(), 1);
        assert_eq!(Partition::initial(3, 2).size(), 6);
        assert_eq!(Partition::initial(6, 6).size(), 36);
    }

    #[test]
    fn colour_partition_classes() {
        let one = Pattern::parse("1 1 1\n0\n").unwrap();
        assert_eq!(colour_partition(&one).size(), 1);
        let cp = colour_partition(&checkerboard());
        assert_eq!(cp.size(), 2);
        assert!(cp.classes().all(|c| c.len() == 2));
    }

    #[test]
    fn refinement_basics() {
        let cp = colour_partition(&sierpinski(5, 4));
        let init = Partition::initial(5, 4);
        assert!(cp.refines(&cp).unwrap());
        assert!(cp.refines(&init).unwrap());
        assert!(!init.refines(&cp).unwrap());
        assert_eq!(
            cp.refines(&Partition::initial(4, 5)),
            Err(PartitionError::GridMismatch)
        );
    }

    #[test]
    fn merge_two_singletons() {
        let p = Partition::initial(2, 1).merge_classes(0, 1).unwrap();
        assert_eq!(p.size(), 1);
        assert_eq!(p.members(0), &[0, 1]);
    }

    #[test]
    fn merge_errors() {
        let p = Partition::initial(2, 2);
        assert_eq!(p.merge_classes(0, 4), Err(PartitionError::UnknownClass(4)));
        assert_eq!(p.merge_classes(1, 1), Err(PartitionError::SameClass(1)));
    }

    #[test]
    fn canonical_ids_follow_smallest_cell() {
        let p = Partition::from_labels(3, 1, &['z', 'a', 'z']);
        assert_eq!(p.class_labels(), &[0, 1, 0]);
    }

    fn random_labels() -> impl Strategy<Value = (usize, usize, Vec<u8>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(w, h)| {
            (Just(w), Just(h), proptest::collection::vec(0u8..4, w * h))
        })
    }

    proptest! {
        #[test]
        fn merge_shrinks_and_coarsens((w, h, labels) in random_labels(), a in 0usize..16, b in 0usize..16) {
            let p = Partition::from_labels(w, h, &labels);
            let (a, b) = (a % p.size(), b % p.size());
            prop_assume!(a != b);
            let q = p.merge_classes(a, b).unwrap();
            prop_assert_eq!(q.size(), p.size() - 1);
            prop_assert!(q.refines(&p).unwrap());
            prop_assert!(q.size() <= p.size());
        }

        #[test]
        fn refinement_is_a_partial_order(
            (w, h, l1) in random_labels(),
            l2 in proptest::collection::vec(0u8..3, 16),
            l3 in proptest::collection::vec(0u8..2, 16),
        ) {
            // build a chain p3 ⊑ p2 ⊑ p1 by coarsening labels
            let cells = w * h;
            let p1 = Partition::from_labels(w, h, &l1);
            let lab2: Vec<u8> = (0..cells).map(|c| l2[p1.class_of(c) % 16]).collect();
            let p2 = Partition::from_labels(w, h, &lab2);
            let lab3: Vec<u8> = (0..cells).map(|c| l3[p2.class_of(c) % 16]).collect();
            let p3 = Partition::from_labels(w, h, &lab3);
            prop_assert!(p2.refines(&p1).unwrap());
            prop_assert!(p3.refines(&p2).unwrap());
            prop_assert!(p3.refines(&p1).unwrap());
            prop_assert!(p1.refines(&p1).unwrap());
            if p1.refines(&p2).unwrap() && p2.refines(&p1).unwrap() {
                prop_assert_eq!(&p1, &p2);
            }
            prop_assert!(p2.size() <= p1.size());
        }

        #[test]
        fn iterated_merges_reach_any_partition((w, h, labels) in random_labels()) {
            let target = Partition::from_labels(w, h, &labels);
            let mut p = Partition::initial(w, h);
            while p.size() > target.size() {
                // merge the first pair of classes that the target keeps together
                let (a, b) = (0..p.size())
                    .flat_map(|a| (a + 1..p.size()).map(move |b| (a, b)))
                    .find(|&(a, b)| {
                        target.class_of(p.members(a)[0] as usize)
                            == target.class_of(p.members(b)[0] as usize)
                    })
                    .unwrap();
                p = p.merge_classes(a, b).unwrap();
            }
            prop_assert_eq!(p, target);
        }
    }
}
