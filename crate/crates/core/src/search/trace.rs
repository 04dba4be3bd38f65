use std::fmt::Write as _;
use std::time::Instant;

use crate::atam::TileSystem;

/// One anytime record: best solution size after a number of merge steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub steps: u64,
    pub best_size: usize,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTrace {
    /// Records in step order; `best_size` is non-increasing.
    pub records: Vec<TraceRecord>,
    pub best: TileSystem,
    pub best_size: usize,
    /// Merge steps performed.
    pub steps: u64,
    /// The search space was exhausted, or a solution met the colour-count
    /// lower bound, so `best_size` is the minimum.
    pub optimal: bool,
}

impl SearchTrace {
    /// CSV with header `steps,best_size,elapsed_ms`. With `timing` off the
    /// elapsed column is written as 0, which makes the output reproducible.
    pub fn to_csv(&self, timing: bool) -> String {
        records_to_csv(&self.records, timing)
    }

    /// Best size after `steps` merge steps, if any record precedes it.
    pub fn best_at(&self, steps: u64) -> Option<usize> {
        best_at(&self.records, steps)
    }
}

pub(crate) fn best_at(records: &[TraceRecord], steps: u64) -> Option<usize> {
    let idx = records.partition_point(|r| r.steps <= steps);
    idx.checked_sub(1).map(|i| records[i].best_size)
}

pub(crate) fn records_to_csv(records: &[TraceRecord], timing: bool) -> String {
    let mut out = String::from("steps,best_size,elapsed_ms\n");
    for r in records {
        let ms = if timing { r.elapsed_ms } else { 0 };
        writeln!(out, "{},{},{}", r.steps, r.best_size, ms).unwrap();
    }
    out
}

/// Append-only collector of anytime records.
#[derive(Debug)]
pub struct TraceSink {
    start: Instant,
    report_every: u64,
    next_report: u64,
    records: Vec<TraceRecord>,
    best_size: usize,
}

impl TraceSink {
    pub fn new(initial_best: usize, report_every: u64) -> Self {
        let mut sink = Self {
            start: Instant::now(),
            report_every,
            next_report: report_every,
            records: Vec::new(),
            best_size: initial_best,
        };
        sink.push(0);
        sink
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    pub fn best_size(&self) -> usize {
        self.best_size
    }

    fn push(&mut self, steps: u64) {
        let rec = TraceRecord {
            steps,
            best_size: self.best_size,
            elapsed_ms: self.elapsed_ms(),
        };
        match self.records.last_mut() {
            Some(last) if last.steps == steps => *last = rec,
            _ => self.records.push(rec),
        }
    }

    /// Records a solution if it beats the current best; returns whether it did.
    pub fn improve(&mut self, steps: u64, size: usize) -> bool {
        if size >= self.best_size {
            return false;
        }
        self.best_size = size;
        self.push(steps);
        true
    }

    /// Emits periodic records once `steps` passes the next reporting point.
    pub fn tick(&mut self, steps: u64) {
        if self.report_every > 0 && steps >= self.next_report {
            self.push(steps);
            self.next_report = (steps / self.report_every + 1) * self.report_every;
        }
    }

    pub fn finish(mut self, steps: u64) -> Vec<TraceRecord> {
        self.push(steps);
        self.records
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sink_records_improvements_and_ticks() {
        let mut sink = TraceSink::new(10, 5);
        assert!(sink.improve(2, 8));
        assert!(!sink.improve(3, 8));
        sink.tick(4);
        sink.tick(6);
        sink.tick(7);
        assert!(sink.improve(11, 3));
        let recs = sink.finish(11);
        let pairs: Vec<_> = recs.iter().map(|r| (r.steps, r.best_size)).collect();
        assert_eq!(pairs, vec![(0, 10), (2, 8), (6, 8), (11, 3)]);
        assert_eq!(best_at(&recs, 1), Some(10));
        assert_eq!(best_at(&recs, 10), Some(8));
        assert_eq!(best_at(&recs, 100), Some(3));
    }

    #[test]
    fn csv_without_timing_zeroes_elapsed() {
        let recs = vec![TraceRecord {
            steps: 4,
            best_size: 2,
            elapsed_ms: 17,
        }];
        assert_eq!(records_to_csv(&recs, false), "steps,best_size,elapsed_ms\n4,2,0\n");
        assert_eq!(records_to_csv(&recs, true), "steps,best_size,elapsed_ms\n4,2,17\n");
    }
}
