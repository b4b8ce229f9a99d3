//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use hcontent::num::{qi, Q};
use hcontent::space::{Cell, VoxelSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum of `Σ (side·δ/2)^m` over covers of `cells` by aligned cubes, by exhaustive
/// search over member masks. Only for sets of at most 63 cells.
pub fn brute_content(cells: &[Cell], delta: f64, m: f64) -> f64 {
    assert!(!cells.is_empty() && cells.len() < 64);
    let n = cells[0].len();
    let lo: Vec<i64> = (0..n).map(|i| cells.iter().map(|c| c[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..n).map(|i| cells.iter().map(|c| c[i]).max().unwrap()).collect();
    let ext = (0..n).map(|i| hi[i] - lo[i] + 1).max().unwrap();

    // Cheapest cube per member mask.
    let mut best: HashMap<u64, i64> = HashMap::new();
    for side in 1..=ext {
        let mut corners = vec![vec![]];
        for i in 0..n {
            corners = corners
                .into_iter()
                .flat_map(|c: Vec<i64>| {
                    (lo[i] - side + 1..=hi[i]).map(move |a| {
                        let mut d = c.clone();
                        d.push(a);
                        d
                    })
                })
                .collect();
        }
        for corner in corners {
            let mut mask = 0u64;
            for (k, c) in cells.iter().enumerate() {
                if c.iter().zip(&corner).all(|(&x, &a)| x >= a && x < a + side) {
                    mask |= 1 << k;
                }
            }
            if mask != 0 {
                best.entry(mask).or_insert(side);
            }
        }
    }
    let mut cubes: Vec<(u64, f64)> = best
        .into_iter()
        .map(|(mask, side)| (mask, (side as f64 * delta / 2.0).powf(m)))
        .collect();
    cubes.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    // Drop cubes whose mask sits inside a mask that is no more expensive.
    let kept: Vec<(u64, f64)> = cubes
        .iter()
        .filter(|&&(a, ca)| {
            !cubes
                .iter()
                .any(|&(b, cb)| b != a && a & b == a && cb <= ca)
        })
        .cloned()
        .collect();
    let full = if cells.len() == 63 { u64::MAX >> 1 } else { (1u64 << cells.len()) - 1 };
    let mut memo = HashMap::new();
    solve(0, full, &kept, &mut memo)
}

fn solve(covered: u64, full: u64, cubes: &[(u64, f64)], memo: &mut HashMap<u64, f64>) -> f64 {
    if covered == full {
        return 0.0;
    }
    if let Some(&v) = memo.get(&covered) {
        return v;
    }
    let first = (!covered & full).trailing_zeros();
    let mut best = f64::INFINITY;
    for &(mask, cost) in cubes {
        if mask >> first & 1 == 1 {
            let v = cost + solve(covered | mask, full, cubes, memo);
            if v < best {
                best = v;
            }
        }
    }
    memo.insert(covered, best);
    best
}

/// Cells within Chebyshev index distance `k` of some cell of `s`.
pub fn brute_neighborhood(s: &VoxelSpace, k: i64) -> BTreeSet<Cell> {
    let (lo, hi) = s.bbox().unwrap();
    let n = s.n();
    let mut all = vec![vec![]];
    for i in 0..n {
        all = all
            .into_iter()
            .flat_map(|c: Vec<i64>| {
                (lo[i] - k..=hi[i] + k).map(move |a| {
                    let mut d = c.clone();
                    d.push(a);
                    d
                })
            })
            .collect();
    }
    all.into_iter()
        .filter(|c| {
            s.cells()
                .iter()
                .any(|d| c.iter().zip(d).all(|(a, b)| (a - b).abs() <= k))
        })
        .collect()
}

/// Random set of `count` distinct cells inside a box with the given sides.
pub fn random_cells(rng: &mut ChaCha8Rng, sides: &[i64], count: usize) -> Vec<Cell> {
    let total: i64 = sides.iter().product();
    let count = count.min(total as usize).max(1);
    let mut set = BTreeSet::new();
    while set.len() < count {
        set.insert(sides.iter().map(|&s| rng.gen_range(0..s)).collect::<Cell>());
    }
    set.into_iter().collect()
}

pub fn random_voxel(rng: &mut ChaCha8Rng, sides: &[i64], count: usize, delta: Q) -> VoxelSpace {
    VoxelSpace::new(sides.len(), delta, random_cells(rng, sides, count)).unwrap()
}

pub fn unit_delta() -> Q {
    qi(1)
}
