#![allow(dead_code)]

use pats_core::mgta::MgtaState;
use pats_core::partition::Partition;
use pats_core::pattern::{Colour, Pattern};

/// All set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, max: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max + 1 {
            prefix.push(label);
            rec(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut prefix = vec![0];
    rec(&mut prefix, 0, n, &mut out);
    out
}

/// Every partition of the grid whose classes are colour-homogeneous.
pub fn refining_partitions(pattern: &Pattern) -> Vec<Partition> {
    let k = pattern.colour_count();
    let cells_of: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            (0..pattern.len())
                .filter(|&i| pattern.colour_at(i) as usize == c)
                .collect()
        })
        .collect();
    let per_colour: Vec<Vec<Vec<u32>>> = cells_of.iter().map(|c| set_partitions(c.len())).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    loop {
        let mut labels = vec![(0usize, 0u32); pattern.len()];
        for c in 0..k {
            for (pos, &cell) in cells_of[c].iter().enumerate() {
                labels[cell] = (c, per_colour[c][choice[c]][pos]);
            }
        }
        out.push(Partition::from_labels(pattern.width(), pattern.height(), &labels));
        let mut c = 0;
        loop {
            if c == k {
                return out;
            }
            choice[c] += 1;
            if choice[c] < per_colour[c].len() {
                break;
            }
            choice[c] = 0;
            c += 1;
        }
    }
}

/// Smallest constructible partition refining the colour partition.
pub fn oracle_minimum(pattern: &Pattern) -> usize {
    refining_partitions(pattern)
        .iter()
        .filter(|p| MgtaState::build(p).is_constructible())
        .map(Partition::size)
        .min()
        .expect("the initial partition is constructible")
}

/// Every colouring of a `w x h` grid that uses all `k` colours.
pub fn all_patterns(w: usize, h: usize, k: usize) -> Vec<Pattern> {
    let n = w * h;
    let total = k.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let cells: Vec<Colour> = (0..n)
                .map(|_| {
                    let c = (code % k) as Colour;
                    code /= k;
                    c
                })
                .collect();
            Pattern::new(w, h, k, cells).ok()
        })
        .collect()
}

/// Frozen-correct outflow of the six-state site chain (E, C, A, I, FC, FI)
/// with unit inflow into E, solved as a dense linear system.
pub fn flow_oracle(m1: u32, m2: u32, model: &pats_core::ktam::KineticModel) -> f64 {
    use nalgebra::{Matrix6, Vector6};
    let (m1, m2) = (m1 as f64, m2 as f64);
    let [r0, r1, r2, ..] = model.r_rb;
    let (rf, rs) = (model.r_f, model.r_star);
    let tiles = 1.0 + m1 + m2;
    #[rustfmt::skip]
    let a = Matrix6::new(
        -tiles * rf, r2,        r1,        r0,        0.0,  0.0,
        rf,          -r2 - rs,  0.0,       0.0,       0.0,  0.0,
        m1 * rf,     0.0,       -r1 - rs,  0.0,       0.0,  0.0,
        m2 * rf,     0.0,       0.0,       -r0 - rs,  0.0,  0.0,
        0.0,         rs,        0.0,       0.0,       -1.0, 0.0,
        0.0,         0.0,       rs,        rs,        0.0,  -1.0,
    );
    let b = Vector6::new(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let p = a.lu().solve(&b).expect("flow system is nonsingular");
    p[4] / (p[4] + p[5])
}
