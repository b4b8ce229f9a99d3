//! Level-set slicing of a covered voxel set by a Lipschitz function.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, qi, Exponent, Q, Val};
use crate::space::{linf, Ball, Cell, VoxelSpace};

/// The slicing function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SliceFn {
    /// ℓ∞ distance to a point.
    DistToPoint {
        #[serde(with = "num::qvec")]
        point: Vec<Q>,
    },
    /// ℓ∞ distance to the union of some closed cells.
    DistToSet { cells: Vec<Cell> },
    /// One value per cell, with a declared Lipschitz constant (checked on cell centres).
    Values {
        values: Vec<(Cell, String)>,
        #[serde(with = "num::qser")]
        lip: Q,
    },
}

impl SliceFn {
    pub fn lip(&self) -> Q {
        match self {
            SliceFn::Values { lip, .. } => lip.clone(),
            _ => qi(1),
        }
    }
}

/// Box-to-box ℓ∞ distance, zero when they meet.
fn box_gap(alo: &[Q], ahi: &[Q], blo: &[Q], bhi: &[Q]) -> Q {
    let mut best = Q::zero();
    for i in 0..alo.len() {
        let g = num::q_max(&(&blo[i] - &ahi[i]), &(&alo[i] - &bhi[i]));
        if g > best {
            best = g;
        }
    }
    best
}

/// Range of `f` over one closed cell, as an enclosing interval.
pub fn cell_interval(f: &SliceFn, s: &VoxelSpace, c: &[i64], table: &BTreeMap<Cell, Q>) -> Result<(Q, Q)> {
    let lo = s.cell_lo(c);
    let hi = s.cell_hi(c);
    match f {
        SliceFn::DistToPoint { point } => {
            if point.len() != s.n() {
                return Err(Error::input("slice point has the wrong dimension"));
            }
            let a = box_gap(&lo, &hi, point, point);
            let b = (0..s.n())
                .map(|i| num::q_max(&(&point[i] - &lo[i]).abs(), &(&hi[i] - &point[i]).abs()))
                .max()
                .unwrap_or_else(Q::zero);
            Ok((a, b))
        }
        SliceFn::DistToSet { cells } => {
            if cells.is_empty() {
                return Err(Error::input("distance to an empty set"));
            }
            let ctr = s.cell_center(c);
            let mut a: Option<Q> = None;
            let mut fc: Option<Q> = None;
            for y in cells {
                if y.len() != s.n() {
                    return Err(Error::input("slice set cell has the wrong dimension"));
                }
                let (ylo, yhi) = (s.cell_lo(y), s.cell_hi(y));
                let g = box_gap(&lo, &hi, &ylo, &yhi);
                let d = box_gap(&ctr, &ctr, &ylo, &yhi);
                if a.as_ref().is_none_or(|x| g < *x) {
                    a = Some(g);
                }
                if fc.as_ref().is_none_or(|x| d < *x) {
                    fc = Some(d);
                }
            }
            let half = s.delta() / qi(2);
            Ok((a.unwrap(), fc.unwrap() + half))
        }
        SliceFn::Values { .. } => table
            .get(c)
            .map(|v| (v.clone(), v.clone()))
            .ok_or_else(|| Error::input(format!("function undefined on cell {c:?}"))),
    }
}

fn value_table(f: &SliceFn, s: &VoxelSpace) -> Result<BTreeMap<Cell, Q>> {
    let SliceFn::Values { values, lip } = f else {
        return Ok(BTreeMap::new());
    };
    if lip.is_negative() {
        return Err(Error::input("negative Lipschitz constant"));
    }
    let mut t = BTreeMap::new();
    for (c, v) in values {
        let q = num::parse_q(v).map_err(|e| Error::input(e.to_string()))?;
        t.insert(c.clone(), q);
    }
    let entries: Vec<(&Cell, &Q)> = t.iter().collect();
    let tau = num::q_from_f64(num::tau());
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let d = linf(&s.cell_center(entries[i].0), &s.cell_center(entries[j].0));
            let diff = (entries[i].1 - entries[j].1).abs();
            if diff > lip * &d + &tau {
                return Err(Error::input(format!(
                    "declared Lipschitz constant violated between {:?} and {:?}",
                    entries[i].0, entries[j].0
                )));
            }
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallInterval {
    pub ball: Ball,
    /// `None` when the ball covers no cell of the target.
    pub range: Option<(String, String)>,
    #[serde(skip)]
    pub lo: Q,
    #[serde(skip)]
    pub hi: Q,
    #[serde(skip)]
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceProfile {
    pub f: SliceFn,
    #[serde(with = "num::qser")]
    pub lip: Q,
    pub balls: Vec<BallInterval>,
    #[serde(with = "num::qser")]
    pub r1: Q,
    #[serde(with = "num::qser")]
    pub r2: Q,
    /// Per-cell intervals of the target, used for level sets.
    #[serde(skip)]
    pub cells: Vec<(Cell, Q, Q)>,
    #[serde(skip)]
    pub n: usize,
    #[serde(skip)]
    pub delta: Q,
}

/// Per-ball min/max of `f` over the target cells each ball covers.
pub fn slice_profile(u: &VoxelSpace, f: &SliceFn, cover: &[Ball], range: Option<(Q, Q)>) -> Result<SliceProfile> {
    if u.is_empty() {
        return Err(Error::input("empty slicing target"));
    }
    let table = value_table(f, u)?;
    let mut cells = Vec::with_capacity(u.len());
    for c in u.cells() {
        let (a, b) = cell_interval(f, u, c, &table)?;
        cells.push((c.clone(), a, b));
    }
    let mut covered = vec![false; cells.len()];
    let mut balls = Vec::with_capacity(cover.len());
    for b in cover {
        if b.center.len() != u.n() {
            return Err(Error::input("cover ball has the wrong dimension"));
        }
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for (k, (c, a, bb)) in cells.iter().enumerate() {
            if b.contains_cell(u, c) {
                covered[k] = true;
                if lo.as_ref().is_none_or(|x| a < x) {
                    lo = Some(a.clone());
                }
                if hi.as_ref().is_none_or(|x| bb > x) {
                    hi = Some(bb.clone());
                }
            }
        }
        let empty = lo.is_none();
        let (lo, hi) = (lo.unwrap_or_else(Q::zero), hi.unwrap_or_else(Q::zero));
        balls.push(BallInterval {
            ball: b.clone(),
            range: (!empty).then(|| (num::q_str(&lo), num::q_str(&hi))),
            lo,
            hi,
            empty,
        });
    }
    if let Some(k) = covered.iter().position(|x| !x) {
        return Err(Error::input(format!("cover misses cell {:?}", cells[k].0)));
    }
    let (r1, r2) = match range {
        Some(r) => r,
        None => {
            let lo = cells.iter().map(|c| c.1.clone()).min().unwrap();
            let hi = cells.iter().map(|c| c.2.clone()).max().unwrap();
            (lo, hi)
        }
    };
    Ok(SliceProfile {
        f: f.clone(),
        lip: f.lip(),
        balls,
        r1,
        r2,
        cells,
        n: u.n(),
        delta: u.delta().clone(),
    })
}

fn weight(r: &Q, m: &Exponent) -> Val {
    Val::Exact(r.clone()).pow_q(&(m.q() - qi(1)))
}

impl SliceProfile {
    /// Per-ball spread check `b_i − a_i ≤ 2·Lip·r_i`.
    pub fn spread_ok(&self) -> bool {
        self.balls
            .iter()
            .filter(|b| !b.empty)
            .all(|b| &b.hi - &b.lo <= qi(2) * &self.lip * &b.ball.radius)
    }

    /// `2·Lip·Σ r_iᵐ` over the cover.
    pub fn bound(&self, m: &Exponent) -> Val {
        let cost = crate::content::cost_of(&self.balls.iter().map(|b| b.ball.clone()).collect::<Vec<_>>(), m);
        cost.mul_q(&(qi(2) * &self.lip))
    }

    /// Slice cost at level `x`: weights of the balls whose interval contains `x`.
    pub fn step_at(&self, x: &Q, m: &Exponent) -> Val {
        Val::sum(
            self.balls
                .iter()
                .filter(|b| !b.empty && b.lo <= *x && *x <= b.hi)
                .map(|b| weight(&b.ball.radius, m))
                .collect::<Vec<_>>()
                .iter(),
        )
    }

    /// Level set: target cells whose interval contains `x`.
    pub fn level_set(&self, x: &Q) -> VoxelSpace {
        let cells = self
            .cells
            .iter()
            .filter(|(_, a, b)| a <= x && x <= b)
            .map(|(c, _, _)| c.clone());
        VoxelSpace::new(self.n, self.delta.clone(), cells).expect("profile cells are valid")
    }
}

/// `Σ r_i^{m−1}·|[a_i, b_i] ∩ [R₁, R₂]|`, exact when `m` is an integer.
pub fn coarea_integral(p: &SliceProfile, m: &Exponent) -> Val {
    Val::sum(
        p.balls
            .iter()
            .filter(|b| !b.empty)
            .map(|b| {
                let lo = num::q_max(&b.lo, &p.r1);
                let hi = num::q_min(&b.hi, &p.r2);
                let len = if hi > lo { hi - lo } else { Q::zero() };
                weight(&b.ball.radius, m).mul_q(&len)
            })
            .collect::<Vec<_>>()
            .iter(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceChoice {
    #[serde(with = "num::qser")]
    pub r: Q,
    pub slice_cost: Val,
    pub integral: Val,
    /// `2·Lip/(R₂−R₁)·Σ r_iᵐ`.
    pub bound: Val,
    pub mean_ok: bool,
    pub bound_ok: bool,
}

/// Breakpoint minimiser of the slice step function over `[R₁, R₂]`; ties go to the smallest `R`.
pub fn best_slice(p: &SliceProfile, m: &Exponent) -> Result<SliceChoice> {
    if p.r2 <= p.r1 {
        return Err(Error::input("degenerate slicing range"));
    }
    let mut pts: Vec<Q> = vec![p.r1.clone(), p.r2.clone()];
    for b in p.balls.iter().filter(|b| !b.empty) {
        for x in [&b.lo, &b.hi] {
            if *x >= p.r1 && *x <= p.r2 {
                pts.push(x.clone());
            }
        }
    }
    pts.sort();
    pts.dedup();
    let mut cands = pts.clone();
    for w in pts.windows(2) {
        cands.push((&w[0] + &w[1]) / qi(2));
    }
    cands.sort();
    let mut best: Option<(Q, Val)> = None;
    for x in cands {
        let v = p.step_at(&x, m);
        if best.as_ref().is_none_or(|(_, bv)| v.lt(bv) && !v.eq_tol(bv)) {
            best = Some((x, v));
        }
    }
    let (r, slice_cost) = best.expect("range has candidates");
    let width = &p.r2 - &p.r1;
    let integral = coarea_integral(p, m);
    let bound = p.bound(m).div(&Val::Exact(width.clone()));
    let mean = integral.div(&Val::Exact(width));
    Ok(SliceChoice {
        mean_ok: slice_cost.le(&mean),
        bound_ok: slice_cost.le(&bound),
        r,
        slice_cost,
        integral,
        bound,
    })
}
