//! m-dimensional Hausdorff content of voxel sets and nets under a ball family.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, pow_cost, q_f64, qi, Exponent, Q, Val};
use crate::setcover::{self, Instance};
use crate::space::{linf, Ball, Cell, GridBall, NetSpace, VoxelSpace};

/// A point with exact coordinates, serialised as a list of `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QPoint(#[serde(with = "num::qvec")] pub Vec<Q>);

/// Admissible covering balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BallFamily {
    AllGrid,
    CentersIn {
        points: Vec<QPoint>,
    },
    Fixed {
        balls: Vec<Ball>,
    },
    RadiusCapped {
        #[serde(with = "num::qser")]
        r_max: Q,
    },
    Intersection {
        parts: Vec<BallFamily>,
    },
}

impl BallFamily {
    pub fn fixed(balls: Vec<Ball>) -> Self {
        BallFamily::Fixed { balls }
    }

    pub fn centers_in(points: Vec<Vec<Q>>) -> Self {
        BallFamily::CentersIn {
            points: points.into_iter().map(QPoint).collect(),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            BallFamily::AllGrid => "all-grid".into(),
            BallFamily::CentersIn { .. } => "centers-in".into(),
            BallFamily::Fixed { .. } => "fixed".into(),
            BallFamily::RadiusCapped { .. } => "radius-capped".into(),
            BallFamily::Intersection { parts } => {
                let t: Vec<String> = parts.iter().map(|p| p.tag()).collect();
                t.join("&")
            }
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            BallFamily::AllGrid => Ok(()),
            BallFamily::CentersIn { points } => {
                if points.is_empty() {
                    return Err(Error::input("CentersIn with an empty point set"));
                }
                if points.iter().any(|p| p.0.len() != n) {
                    return Err(Error::input("CentersIn point has the wrong dimension"));
                }
                Ok(())
            }
            BallFamily::Fixed { balls } => {
                if balls
                    .iter()
                    .any(|b| b.center.len() != n || b.radius.is_negative())
                {
                    return Err(Error::input("malformed ball in fixed family"));
                }
                Ok(())
            }
            BallFamily::RadiusCapped { r_max } => {
                if r_max.is_negative() {
                    return Err(Error::input("negative radius cap"));
                }
                Ok(())
            }
            BallFamily::Intersection { parts } => {
                if parts.is_empty() {
                    return Err(Error::input("empty family intersection"));
                }
                parts.iter().try_for_each(|p| p.validate(n))
            }
        }
    }

    fn parts(&self) -> Vec<&BallFamily> {
        match self {
            BallFamily::Intersection { parts } => parts.iter().flat_map(|p| p.parts()).collect(),
            other => vec![other],
        }
    }

    /// Membership of a single ball in the family.
    pub fn admits(&self, b: &Ball, delta: &Q) -> bool {
        self.parts().into_iter().all(|p| match p {
            BallFamily::AllGrid => is_grid_ball(b, delta),
            BallFamily::CentersIn { points } => points.iter().any(|w| w.0 == b.center),
            BallFamily::Fixed { balls } => balls.contains(b),
            BallFamily::RadiusCapped { r_max } => b.radius <= *r_max,
            BallFamily::Intersection { .. } => unreachable!(),
        })
    }
}

/// Grid-aligned cube of at least one cell.
pub fn is_grid_ball(b: &Ball, delta: &Q) -> bool {
    let k = &b.radius * qi(2) / delta;
    if !k.is_integer() || k < qi(1) {
        return false;
    }
    b.center
        .iter()
        .all(|c| ((c - &b.radius) / delta).is_integer())
}

pub fn grid_ball_of(b: &Ball, delta: &Q) -> Option<GridBall> {
    if !is_grid_ball(b, delta) {
        return None;
    }
    let side = (&b.radius * qi(2) / delta).to_integer().to_u64()?;
    let corner = b
        .center
        .iter()
        .map(|c| ((c - &b.radius) / delta).to_integer().to_i64())
        .collect::<Option<Vec<i64>>>()?;
    Some(GridBall::new(corner, side))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Search,
    Dual,
    Volume,
    Projection,
    NetDeflation,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerCertificate {
    pub kind: BoundKind,
    pub dual_sum: Val,
    pub volume: Val,
    pub projection: Val,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentResult {
    pub m: Exponent,
    pub family: String,
    pub value_lower: Val,
    pub value_upper: Val,
    pub optimal: bool,
    pub witness: Vec<Ball>,
    pub certificate: LowerCertificate,
    pub nodes: u64,
    pub candidates: usize,
    /// `full` when every admissible ball was a candidate, `tiling` for the large-instance pool.
    pub pool: String,
}

impl ContentResult {
    /// Content of the empty set.
    pub fn empty(m: &Exponent, family: &BallFamily) -> Self {
        ContentResult {
            m: m.clone(),
            family: family.tag(),
            value_lower: Val::zero(),
            value_upper: Val::zero(),
            optimal: true,
            witness: vec![],
            certificate: LowerCertificate {
                kind: BoundKind::Search,
                dual_sum: Val::zero(),
                volume: Val::zero(),
                projection: Val::zero(),
            },
            nodes: 0,
            candidates: 0,
            pool: "full".into(),
        }
    }

    /// Value used when a single number is needed: exact optimum or upper bound.
    pub fn value(&self) -> &Val {
        &self.value_upper
    }
}

/// Candidate balls with their member cells (indices into the target's cell list).
struct Pool {
    balls: Vec<Ball>,
    members: Vec<Vec<usize>>,
    full: bool,
}

const FULL_POOL_LIMIT: usize = 200_000;
const FULL_POOL_WORDS: usize = 20_000_000;
const DOMINANCE_LIMIT: usize = 6_000;

struct Indexer<'a> {
    cells: Vec<&'a Cell>,
    dense: Option<(Cell, Vec<i64>, Vec<i32>)>,
    map: HashMap<&'a Cell, usize>,
}

impl<'a> Indexer<'a> {
    fn new(s: &'a VoxelSpace) -> Self {
        let cells: Vec<&Cell> = s.cells().iter().collect();
        let map: HashMap<&Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let dense = s.bbox().and_then(|(lo, hi)| {
            let dims: Vec<i64> = lo.iter().zip(&hi).map(|(a, b)| b - a + 1).collect();
            let vol = dims.iter().try_fold(1i64, |acc, d| acc.checked_mul(*d))?;
            if vol > 20_000_000 {
                return None;
            }
            let mut grid = vec![-1i32; vol as usize];
            for (i, c) in cells.iter().enumerate() {
                grid[flat(c, &lo, &dims)] = i as i32;
            }
            Some((lo, dims, grid))
        });
        Indexer { cells, dense, map }
    }

    /// Member indices of a grid cube.
    fn members(&self, g: &GridBall) -> Vec<usize> {
        let n = g.corner.len();
        let side = g.side as i64;
        if let Some((lo, dims, grid)) = &self.dense {
            let mut from = vec![0i64; n];
            let mut to = vec![0i64; n];
            for i in 0..n {
                from[i] = g.corner[i].max(lo[i]);
                to[i] = (g.corner[i] + side - 1).min(lo[i] + dims[i] - 1);
                if from[i] > to[i] {
                    return vec![];
                }
            }
            let mut out = Vec::new();
            let mut cur = from.clone();
            loop {
                let v = grid[flat(&cur, lo, dims)];
                if v >= 0 {
                    out.push(v as usize);
                }
                let mut i = n;
                loop {
                    if i == 0 {
                        out.sort_unstable();
                        return out;
                    }
                    i -= 1;
                    if cur[i] < to[i] {
                        cur[i] += 1;
                        break;
                    }
                    cur[i] = from[i];
                }
            }
        }
        let vol = (g.side as f64).powi(n as i32);
        if vol <= self.cells.len() as f64 {
            let mut out: Vec<usize> = cube_cells(&g.corner, side)
                .into_iter()
                .filter_map(|c| self.map.get(&c).copied())
                .collect();
            out.sort_unstable();
            out
        } else {
            (0..self.cells.len())
                .filter(|&i| g.contains_cell(self.cells[i]))
                .collect()
        }
    }
}

fn flat(c: &[i64], lo: &[i64], dims: &[i64]) -> usize {
    let mut idx = 0i64;
    for i in 0..c.len() {
        idx = idx * dims[i] + (c[i] - lo[i]);
    }
    idx as usize
}

fn cube_cells(corner: &[i64], side: i64) -> Vec<Cell> {
    let mut out = vec![Vec::new()];
    for &a in corner {
        let mut next = Vec::new();
        for c in &out {
            for i in 0..side {
                let mut d = c.clone();
                d.push(a + i);
                next.push(d);
            }
        }
        out = next;
    }
    out
}

fn axis_coords(s: &VoxelSpace) -> Vec<Vec<i64>> {
    (0..s.n())
        .map(|i| {
            let mut v: Vec<i64> = s.cells().iter().map(|c| c[i]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}

/// Sides for which some axis is tight, capped at the target's largest extent.
fn tight_sides(coords: &[Vec<i64>], max_side: i64) -> Vec<i64> {
    let mut sides: Vec<i64> = Vec::new();
    for cs in coords {
        if cs.len() <= 2_000 {
            for (a, &s) in cs.iter().enumerate() {
                for &t in &cs[a..] {
                    let k = t - s + 1;
                    if k <= max_side {
                        sides.push(k);
                    }
                }
            }
        } else {
            sides.extend(1..=max_side.min(cs[cs.len() - 1] - cs[0] + 1));
        }
    }
    sides.sort_unstable();
    sides.dedup();
    sides
}

fn grid_pool(s: &VoxelSpace, max_side: i64, filter: &dyn Fn(&Ball) -> bool) -> Pool {
    let coords = axis_coords(s);
    let sides = tight_sides(&coords, max_side);
    let per_side: f64 = coords.iter().map(|c| c.len() as f64).product();
    let est = per_side * sides.len() as f64;
    let words = s.len().div_ceil(64).max(1);
    let idx = Indexer::new(s);
    if est <= FULL_POOL_LIMIT as f64 && est * words as f64 <= FULL_POOL_WORDS as f64 {
        let mut balls = Vec::new();
        let mut members = Vec::new();
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for &k in &sides {
            let mut corner: Vec<usize> = vec![0; s.n()];
            loop {
                let c: Cell = (0..s.n()).map(|i| coords[i][corner[i]]).collect();
                let g = GridBall::new(c, k as u64);
                let b = g.to_ball(s.delta());
                if filter(&b) {
                    let mem = idx.members(&g);
                    if !mem.is_empty() && !seen.contains_key(&mem) {
                        seen.insert(mem.clone(), balls.len());
                        balls.push(b);
                        members.push(mem);
                    }
                }
                let mut i = s.n();
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    if corner[i] + 1 < coords[i].len() {
                        corner[i] += 1;
                        done = false;
                        break;
                    }
                    corner[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
        // Corners above were lower-face anchored; sides ascend, so duplicates keep the smaller cube.
        return Pool {
            balls,
            members,
            full: true,
        };
    }
    tiling_pool(s, max_side, filter, &idx)
}

/// Aligned tilings at power-of-two sides, two offsets each.
fn tiling_pool(s: &VoxelSpace, max_side: i64, filter: &dyn Fn(&Ball) -> bool, idx: &Indexer) -> Pool {
    let mut ks: Vec<i64> = std::iter::successors(Some(1i64), |k| Some(k * 2))
        .take_while(|&k| k <= max_side)
        .collect();
    ks.push(max_side.max(1));
    ks.sort_unstable();
    ks.dedup();
    let mut balls = Vec::new();
    let mut members = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for &k in &ks {
        for off in [0, k / 2] {
            let mut tiles: Vec<Cell> = s
                .cells()
                .iter()
                .map(|c| c.iter().map(|&x| (x - off).div_euclid(k) * k + off).collect())
                .collect();
            tiles.sort();
            tiles.dedup();
            for t in tiles {
                let g = GridBall::new(t, k as u64);
                let b = g.to_ball(s.delta());
                if !filter(&b) {
                    continue;
                }
                let mem = idx.members(&g);
                if !mem.is_empty() && !seen.contains_key(&mem) {
                    seen.insert(mem.clone(), balls.len());
                    balls.push(b);
                    members.push(mem);
                }
            }
        }
    }
    Pool {
        balls,
        members,
        full: false,
    }
}

/// Smallest radius about `w` that contains the closed cell box.
fn containing_radius(s: &VoxelSpace, w: &[Q], c: &[i64]) -> Q {
    let lo = s.cell_lo(c);
    let hi = s.cell_hi(c);
    (0..s.n())
        .map(|i| num::q_max(&(&w[i] - &lo[i]).abs(), &(&hi[i] - &w[i]).abs()))
        .max()
        .unwrap_or_else(Q::zero)
}

fn centered_pool(s: &VoxelSpace, centers: &[QPoint], filter: &dyn Fn(&Ball) -> bool) -> Pool {
    let cells: Vec<&Cell> = s.cells().iter().collect();
    let mut balls = Vec::new();
    let mut members = Vec::new();
    for w in centers {
        let mut radii: Vec<(Q, usize)> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (containing_radius(s, &w.0, c), i))
            .collect();
        radii.sort();
        let mut mem = Vec::new();
        let mut k = 0;
        while k < radii.len() {
            let r = radii[k].0.clone();
            while k < radii.len() && radii[k].0 == r {
                mem.push(radii[k].1);
                k += 1;
            }
            let b = Ball::new(w.0.clone(), r);
            if filter(&b) {
                let mut m = mem.clone();
                m.sort_unstable();
                balls.push(b);
                members.push(m);
            }
        }
    }
    Pool {
        balls,
        members,
        full: true,
    }
}

fn fixed_pool(s: &VoxelSpace, list: &[Ball], filter: &dyn Fn(&Ball) -> bool) -> Pool {
    let cells: Vec<&Cell> = s.cells().iter().collect();
    let mut balls = Vec::new();
    let mut members = Vec::new();
    for b in list {
        if !filter(b) {
            continue;
        }
        let mem: Vec<usize> = (0..cells.len())
            .filter(|&i| b.contains_cell(s, cells[i]))
            .collect();
        if !mem.is_empty() {
            balls.push(b.clone());
            members.push(mem);
        }
    }
    Pool {
        balls,
        members,
        full: true,
    }
}

fn build_pool(s: &VoxelSpace, fam: &BallFamily) -> Pool {
    let parts = fam.parts();
    let delta = s.delta().clone();
    let filter = |b: &Ball| fam.admits(b, &delta);
    if let Some(BallFamily::Fixed { balls }) = parts.iter().find(|p| matches!(p, BallFamily::Fixed { .. })) {
        return fixed_pool(s, balls, &filter);
    }
    if let Some(BallFamily::CentersIn { points }) =
        parts.iter().find(|p| matches!(p, BallFamily::CentersIn { .. }))
    {
        return centered_pool(s, points, &filter);
    }
    let mut max_side = s.max_extent();
    for p in &parts {
        if let BallFamily::RadiusCapped { r_max } = p {
            let k = (r_max * qi(2) / s.delta()).floor().to_integer().to_i64().unwrap_or(i64::MAX);
            max_side = max_side.min(k);
        }
    }
    grid_pool(s, max_side.max(0), &filter)
}

/// Cost unit `δ/2`: a grid cube of side k has radius k units.
fn unit(s: &VoxelSpace) -> Q {
    s.delta() / qi(2)
}

fn weights(pool: &Pool, s: &VoxelSpace, m: &Exponent) -> (Vec<f64>, bool) {
    let u = unit(s);
    let mut integral = m.as_int().is_some();
    let w = pool
        .balls
        .iter()
        .map(|b| {
            let k = &b.radius / &u;
            if !k.is_integer() {
                integral = false;
            }
            q_f64(&k).powf(m.f64())
        })
        .collect::<Vec<f64>>();
    if w.iter().any(|x| *x > 9.0e15) {
        integral = false;
    }
    (w, integral)
}

/// `V^{m/n} / 2^m` with `V = |cells|·δⁿ`; zero when `m > n` (no volume argument).
pub fn volume_lower_bound(s: &VoxelSpace, m: &Exponent) -> Val {
    let n = qi(s.n() as i64);
    if m.q() > &n {
        return Val::zero();
    }
    let v = qi(s.len() as i64) * num::q_pow(s.delta(), s.n() as u32);
    let p = m.q() / n;
    Val::Exact(v)
        .pow_q(&p)
        .div(&Val::Exact(qi(2)).pow(m))
}

/// Best projection bound `N_j^{m/(n-1)} (δ/2)^m` over coordinate hyperplanes, for `m ≤ n-1`.
pub fn projection_lower_bound(s: &VoxelSpace, m: &Exponent) -> Val {
    let n = s.n();
    if n < 2 || m.q() > &qi(n as i64 - 1) || s.is_empty() {
        return Val::zero();
    }
    let best = projection_counts(s).into_iter().max().unwrap_or(0);
    let p = m.q() / qi(n as i64 - 1);
    Val::Exact(qi(best as i64))
        .pow_q(&p)
        .mul(&pow_cost(&unit(s), m))
}

/// `N_j`: number of distinct cells after dropping coordinate `j`.
pub fn projection_counts(s: &VoxelSpace) -> Vec<usize> {
    (0..s.n())
        .map(|j| {
            let mut p: Vec<Cell> = s
                .cells()
                .iter()
                .map(|c| {
                    let mut d = c.clone();
                    d.remove(j);
                    d
                })
                .collect();
            p.sort();
            p.dedup();
            p.len()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Greedy,
}

/// Content of a voxel set under a family.
pub fn voxel_content(
    s: &VoxelSpace,
    m: &Exponent,
    fam: &BallFamily,
    mode: Mode,
    budget: u64,
) -> Result<ContentResult> {
    fam.validate(s.n())?;
    if s.is_empty() {
        return Ok(ContentResult::empty(m, fam));
    }
    let pool = build_pool(s, fam);
    let (w, integral) = weights(&pool, s, m);
    let mut inst = Instance {
        n_elems: s.len(),
        sets: pool.members.clone(),
        weights: w,
        integral,
    };
    if !inst.coverable() {
        return Err(Error::Uncoverable(format!(
            "family {} cannot cover the target",
            fam.tag()
        )));
    }
    let mut keep: Vec<usize> = (0..inst.sets.len()).collect();
    if pool.full && inst.sets.len() <= DOMINANCE_LIMIT {
        keep = setcover::undominated(&inst, usize::MAX);
        inst = Instance {
            n_elems: inst.n_elems,
            sets: keep.iter().map(|&k| inst.sets[k].clone()).collect(),
            weights: keep.iter().map(|&k| inst.weights[k]).collect(),
            integral: inst.integral,
        };
    }
    let n = s.n() as f64;
    let mf = m.f64();
    let vol_ok = mf <= n + 1e-12;
    let extra = move |k: usize| if vol_ok { (k as f64).powf(mf / n) } else { 0.0 };
    let um = pow_cost(&unit(s), m);
    let vol = volume_lower_bound(s, m);
    let proj = projection_lower_bound(s, m);
    let proj_units = proj.f64() / um.f64();

    let (chosen, lower_units, optimal, nodes, dual) = match mode {
        Mode::Exact if pool.full => {
            let o = setcover::solve(&inst, budget, &extra, proj_units)
                .ok_or_else(|| Error::Uncoverable(fam.tag()))?;
            (o.chosen, o.lower, o.optimal, o.nodes, o.root_dual)
        }
        _ => {
            let ch = lazy_greedy(&inst).ok_or_else(|| Error::Uncoverable(fam.tag()))?;
            // prices over a partial pool can undercut nothing outside it, so they bound nothing
            let dual = if pool.full { dual_prices(&inst) } else { 0.0 };
            (ch, dual, false, 0, dual)
        }
    };
    let mut witness: Vec<Ball> = chosen.iter().map(|&i| pool.balls[keep[i]].clone()).collect();
    witness.sort();
    let upper = Val::sum(witness.iter().map(|b| pow_cost(&b.radius, m)).collect::<Vec<_>>().iter());
    let dual_val = Val::Approx(dual * um.f64());
    let (lower, kind) = if optimal {
        (upper.clone(), BoundKind::Search)
    } else {
        let mut best = (Val::Approx(lower_units * um.f64()), BoundKind::Dual);
        for (v, k) in [(vol.clone(), BoundKind::Volume), (proj.clone(), BoundKind::Projection)] {
            if best.0.lt(&v) {
                best = (v, k);
            }
        }
        (best.0.min(&upper), best.1)
    };
    let optimal = optimal || lower.eq_tol(&upper) && lower.is_exact() && upper.is_exact() && lower == upper;
    Ok(ContentResult {
        m: m.clone(),
        family: fam.tag(),
        value_lower: if optimal { upper.clone() } else { lower },
        value_upper: upper,
        optimal,
        witness,
        certificate: LowerCertificate {
            kind: if optimal { BoundKind::Search } else { kind },
            dual_sum: dual_val,
            volume: vol,
            projection: proj,
        },
        nodes,
        candidates: inst.sets.len(),
        pool: if pool.full { "full".into() } else { "tiling".into() },
    })
}

/// Dual-feasible prices at the root (each element pays its cheapest per-element rate).
fn dual_prices(inst: &Instance) -> f64 {
    let mut y = vec![f64::INFINITY; inst.n_elems];
    for (s, w) in inst.sets.iter().zip(&inst.weights) {
        let r = w / s.len() as f64;
        for &e in s {
            if r < y[e] {
                y[e] = r;
            }
        }
    }
    y.into_iter().sum()
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then(o.1.cmp(&self.1))
    }
}

/// Best-ratio greedy with lazy re-evaluation (ratios only grow as elements get covered).
pub fn lazy_greedy(inst: &Instance) -> Option<Vec<usize>> {
    if !inst.coverable() {
        return None;
    }
    let mut covered = vec![false; inst.n_elems];
    let mut left = inst.n_elems;
    let mut heap: BinaryHeap<HeapItem> = inst
        .sets
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| HeapItem(inst.weights[i] / s.len() as f64, i))
        .collect();
    let mut chosen = Vec::new();
    while left > 0 {
        let HeapItem(r, i) = heap.pop()?;
        let fresh = inst.sets[i].iter().filter(|&&e| !covered[e]).count();
        if fresh == 0 {
            continue;
        }
        let nr = inst.weights[i] / fresh as f64;
        if nr > r + 1e-15 {
            heap.push(HeapItem(nr, i));
            continue;
        }
        for &e in &inst.sets[i] {
            if !covered[e] {
                covered[e] = true;
                left -= 1;
            }
        }
        chosen.push(i);
    }
    setcover::prune_redundant(inst, &mut chosen);
    Some(chosen)
}

/// Exact optimum (bracket if the node budget runs out).
pub fn exact_content(s: &VoxelSpace, m: &Exponent, fam: &BallFamily, budget: u64) -> Result<ContentResult> {
    voxel_content(s, m, fam, Mode::Exact, budget)
}

/// Greedy upper bound; never flagged optimal.
pub fn greedy_content(s: &VoxelSpace, m: &Exponent, fam: &BallFamily) -> Result<ContentResult> {
    let mut r = voxel_content(s, m, fam, Mode::Greedy, 0)?;
    r.optimal = false;
    Ok(r)
}

/// Content with respect to a fixed finite covering (the "tilde" content).
pub fn tilde_content(s: &VoxelSpace, m: &Exponent, q_balls: &[Ball], budget: u64) -> Result<ContentResult> {
    exact_content(s, m, &BallFamily::fixed(q_balls.to_vec()), budget)
}

/// Net content: always a bracket. Upper from net-centred balls with radii from the
/// distance set, lower from the same cover with radii deflated by `ε_net`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetContent {
    pub m: Exponent,
    pub value_lower: f64,
    pub value_upper: f64,
    pub optimal_over_candidates: bool,
    pub witness: Vec<(usize, f64)>,
}

pub fn net_content(net: &NetSpace, subset: &[usize], m: &Exponent, budget: u64) -> Result<NetContent> {
    if subset.is_empty() {
        return Ok(NetContent {
            m: m.clone(),
            value_lower: 0.0,
            value_upper: 0.0,
            optimal_over_candidates: true,
            witness: vec![],
        });
    }
    let mut balls: Vec<(usize, f64)> = Vec::new();
    let mut sets = Vec::new();
    for &c in subset {
        let mut ds: Vec<f64> = subset.iter().map(|&j| net.distance(c, j)).collect::<Result<_>>()?;
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ds.dedup_by(|a, b| (*a - *b).abs() <= num::tau());
        for r in ds {
            let mem: Vec<usize> = subset
                .iter()
                .enumerate()
                .filter(|(_, &j)| net.distance(c, j).map(|d| num::le_tol(d, r)).unwrap_or(false))
                .map(|(k, _)| k)
                .collect();
            balls.push((c, r));
            sets.push(mem);
        }
    }
    let mf = m.f64();
    let inst = Instance {
        n_elems: subset.len(),
        weights: balls.iter().map(|(_, r)| r.powf(mf)).collect(),
        sets,
        integral: false,
    };
    let keep = setcover::undominated(&inst, 4_000_000);
    let sub = Instance {
        n_elems: inst.n_elems,
        sets: keep.iter().map(|&k| inst.sets[k].clone()).collect(),
        weights: keep.iter().map(|&k| inst.weights[k]).collect(),
        integral: false,
    };
    let o = setcover::solve(&sub, budget, &|_| 0.0, 0.0)
        .ok_or_else(|| Error::Uncoverable("net".into()))?;
    let witness: Vec<(usize, f64)> = o.chosen.iter().map(|&i| balls[keep[i]]).collect();
    let eps = net.eps_net();
    let lower = if o.optimal {
        witness.iter().map(|(_, r)| (r - eps).max(0.0).powf(mf)).sum()
    } else {
        0.0
    };
    Ok(NetContent {
        m: m.clone(),
        value_lower: lower,
        value_upper: o.upper,
        optimal_over_candidates: o.optimal,
        witness,
    })
}

/// Per-center content of `B(center, R) ∩ s`, plus the worst ratio `HC/Rᵐ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallScan {
    pub radius: Val,
    pub entries: Vec<(QPoint, ContentResult)>,
    pub max_ratio: Val,
}

pub fn content_ball_scan(s: &VoxelSpace, m: &Exponent, r: &Q, budget: u64) -> Result<BallScan> {
    if !r.is_positive() {
        return Err(Error::input("scan radius must be positive"));
    }
    let mut cache: HashMap<Vec<Cell>, ContentResult> = HashMap::new();
    let mut entries = Vec::new();
    let mut max_ratio = Val::zero();
    let rm = pow_cost(r, m);
    for c in s.cells() {
        let center = s.cell_center(c);
        let ball = Ball::new(center.clone(), r.clone());
        let sub = crate::space::ball_members(&ball, s);
        let key: Vec<Cell> = sub.cells().iter().cloned().collect();
        let res = match cache.get(&key) {
            Some(v) => v.clone(),
            None => {
                let v = exact_content(&sub, m, &BallFamily::AllGrid, budget)?;
                cache.insert(key, v.clone());
                v
            }
        };
        let ratio = res.value_upper.div(&rm);
        if max_ratio.lt(&ratio) {
            max_ratio = ratio;
        }
        entries.push((QPoint(center), res));
    }
    Ok(BallScan {
        radius: Val::Exact(r.clone()),
        entries,
        max_ratio,
    })
}

/// Merges overlapping balls until pairwise disjoint, never raising `Σ r^e` for `e ≤ 1`.
///
/// Two balls meeting at distance `d ≤ r_k + r_l` become one ball of radius `r_k + r_l`
/// centred on the segment `[p_k, p_l]` at distance `min(r_l, d)` from `p_k`.
pub fn merge_to_disjoint(balls: &[Ball], e: &Exponent) -> Result<Vec<Ball>> {
    if e.q() > &qi(1) {
        return Err(Error::input(format!(
            "merge needs exponent at most 1, got {e}"
        )));
    }
    let mut cur: Vec<Ball> = balls.to_vec();
    loop {
        let mut pair = None;
        'outer: for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                if cur[i].intersects(&cur[j]) {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = pair else { return Ok(cur) };
        let (a, b) = (&cur[i], &cur[j]);
        let d = linf(&a.center, &b.center);
        let center = if d.is_zero() {
            a.center.clone()
        } else {
            let t = num::q_min(&b.radius, &d) / &d;
            a.center
                .iter()
                .zip(&b.center)
                .map(|(x, y)| x + (y - x) * &t)
                .collect()
        };
        let merged = Ball::new(center, &a.radius + &b.radius);
        cur.remove(j);
        cur.remove(i);
        cur.insert(i, merged);
    }
}

pub fn cost_of(balls: &[Ball], m: &Exponent) -> Val {
    Val::sum(balls.iter().map(|b| pow_cost(&b.radius, m)).collect::<Vec<_>>().iter())
}

/// Witness check: every cell inside some ball and the recomputed cost equals the upper value.
pub fn verify_witness(s: &VoxelSpace, r: &ContentResult) -> bool {
    s.cells()
        .iter()
        .all(|c| r.witness.iter().any(|b| b.contains_cell(s, c)))
        && cost_of(&r.witness, &r.m) == r.value_upper
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;

    const B: u64 = 1_000_000;

    fn m(k: u32) -> Exponent {
        Exponent::int(k)
    }

    #[test]
    fn unit_square_contents() {
        let s = VoxelSpace::unit_cube(2, 8);
        let r1 = exact_content(&s, &m(1), &BallFamily::AllGrid, B).unwrap();
        assert!(r1.optimal);
        assert_eq!(r1.value_upper, Val::Exact(q(1, 2)));
        let r2 = exact_content(&s, &m(2), &BallFamily::AllGrid, B).unwrap();
        assert_eq!(r2.value_upper, Val::Exact(q(1, 4)));
        assert!(verify_witness(&s, &r2));
    }

    #[test]
    fn single_cell_content() {
        let s = VoxelSpace::new(2, q(1, 8), vec![vec![3, 4]]).unwrap();
        for k in 1..4 {
            let r = exact_content(&s, &m(k), &BallFamily::AllGrid, B).unwrap();
            assert_eq!(r.value_upper, Val::Exact(num::q_pow(&q(1, 16), k)));
            let g = greedy_content(&s, &m(k), &BallFamily::AllGrid).unwrap();
            assert_eq!(g.value_upper, r.value_upper);
        }
    }

    #[test]
    fn volume_bound_examples() {
        assert_eq!(volume_lower_bound(&VoxelSpace::unit_cube(2, 8), &m(2)), Val::Exact(q(1, 4)));
        assert_eq!(volume_lower_bound(&VoxelSpace::unit_cube(3, 4), &m(1)), Val::Exact(q(1, 2)));
        let half = VoxelSpace::full_box(q(1, 8), &[8, 4]);
        let v = volume_lower_bound(&half, &m(1));
        assert!((v.f64() - 0.5f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_family_missing_a_cell_is_uncoverable() {
        let s = VoxelSpace::full_box(qi(1), &[2, 1]);
        let only = GridBall::new(vec![0, 0], 1).to_ball(s.delta());
        let err = exact_content(&s, &m(1), &BallFamily::fixed(vec![only]), B).unwrap_err();
        assert!(matches!(err, Error::Uncoverable(_)));
    }

    #[test]
    fn empty_centers_rejected() {
        let s = VoxelSpace::full_box(qi(1), &[2, 1]);
        assert!(exact_content(&s, &m(1), &BallFamily::centers_in(vec![]), B).is_err());
    }

    #[test]
    fn merge_examples() {
        let e = m(1);
        let a = Ball::new(vec![qi(0)], qi(1));
        let b = Ball::new(vec![qi(1)], qi(1));
        let out = merge_to_disjoint(&[a.clone(), b.clone()], &e).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].radius, qi(2));
        assert!(out[0].contains_point(&[qi(-1)]) && out[0].contains_point(&[qi(2)]));
        let far = Ball::new(vec![qi(10)], qi(1));
        assert_eq!(merge_to_disjoint(&[a.clone(), far.clone()], &e).unwrap().len(), 2);
        assert!(merge_to_disjoint(&[a, far], &m(2)).is_err());
    }

    #[test]
    fn radius_cap_forces_small_balls() {
        let s = VoxelSpace::unit_cube(2, 4);
        let fam = BallFamily::RadiusCapped { r_max: q(1, 4) };
        let r = exact_content(&s, &m(1), &fam, B).unwrap();
        assert!(r.witness.iter().all(|b| b.radius <= q(1, 4)));
        assert_eq!(r.value_upper, Val::Exact(qi(1)));
    }

    #[test]
    fn centers_in_uses_given_centers() {
        let s = VoxelSpace::unit_cube(2, 4);
        let fam = BallFamily::centers_in(vec![vec![q(1, 2), q(1, 2)]]);
        let r = exact_content(&s, &m(1), &fam, B).unwrap();
        assert_eq!(r.value_upper, Val::Exact(q(1, 2)));
        assert_eq!(r.witness[0].center, vec![q(1, 2), q(1, 2)]);
    }
}
