//! Urysohn-width upper bounds from nerves of ball coverings.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::content::{exact_content, greedy_content, content_ball_scan, BallFamily};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::num::{self, q_f64, qi, Exponent, Q};
use crate::space::{Ball, Cell, VoxelSpace};

/// How a ball meets the space. `ClosedCells` treats the space as the union of closed cell boxes
/// (sound for the continuum body); `CellCenters` treats each cell as one point owned by the balls containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NerveMode {
    #[default]
    ClosedCells,
    CellCenters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerveComplex {
    pub mode: NerveMode,
    pub vertices: usize,
    /// Maximal simplices, sorted.
    pub simplices: Vec<Vec<usize>>,
    pub dimension: i64,
    pub multiplicity: usize,
    /// Max over maximal simplices of the ℓ∞ diameter of the union of their balls' traces.
    #[serde(with = "num::qser")]
    pub fiber: Q,
}

type BoxQ = (Vec<Q>, Vec<Q>);
type Bx<T> = (Vec<T>, Vec<T>);

fn meet<T: Ord + Clone>(a: &Bx<T>, b: &Bx<T>) -> Option<Bx<T>> {
    let lo: Vec<T> = a.0.iter().zip(&b.0).map(|(x, y)| x.max(y).clone()).collect();
    let hi: Vec<T> = a.1.iter().zip(&b.1).map(|(x, y)| x.min(y).clone()).collect();
    lo.iter().zip(&hi).all(|(l, h)| l <= h).then_some((lo, hi))
}

fn hull<T: Ord + Clone>(a: &Bx<T>, b: &Bx<T>) -> Bx<T> {
    (
        a.0.iter().zip(&b.0).map(|(x, y)| x.min(y).clone()).collect(),
        a.1.iter().zip(&b.1).map(|(x, y)| x.max(y).clone()).collect(),
    )
}

fn contains_box<T: Ord>(outer: &Bx<T>, inner: &Bx<T>) -> bool {
    outer.0.iter().zip(&inner.0).all(|(a, b)| a <= b) && inner.1.iter().zip(&outer.1).all(|(b, a)| b <= a)
}

fn cell_box(s: &VoxelSpace, c: &[i64]) -> BoxQ {
    (s.cell_lo(c), s.cell_hi(c))
}

/// Box coordinates of the space and the cover, either exact rationals or integers on a common lattice.
trait Coords {
    type T: Ord + Clone;
    fn cell(&self, c: &[i64]) -> Bx<Self::T>;
    fn side(&self, b: &Bx<Self::T>) -> Q;
}

struct Rational<'a>(&'a VoxelSpace);

impl Coords for Rational<'_> {
    type T = Q;
    fn cell(&self, c: &[i64]) -> BoxQ {
        cell_box(self.0, c)
    }
    fn side(&self, b: &BoxQ) -> Q {
        b.0.iter().zip(&b.1).map(|(l, h)| h - l).max().unwrap_or_else(|| qi(0))
    }
}

/// Coordinates in units of `δ/scale`.
struct Lattice {
    unit: Q,
    scale: i64,
}

impl Coords for Lattice {
    type T = i64;
    fn cell(&self, c: &[i64]) -> Bx<i64> {
        (c.iter().map(|x| x * self.scale).collect(), c.iter().map(|x| (x + 1) * self.scale).collect())
    }
    fn side(&self, b: &Bx<i64>) -> Q {
        let k = b.0.iter().zip(&b.1).map(|(l, h)| h - l).max().unwrap_or(0);
        qi(k) * &self.unit
    }
}

const LATTICE_LIMIT: i64 = 1 << 40;

/// Common lattice for all ball boxes, if one exists with small integers.
fn lattice_boxes(cover: &[Ball], s: &VoxelSpace) -> Option<(Lattice, Vec<Bx<i64>>)> {
    use num_integer::Integer;
    let rel: Vec<(Vec<Q>, Vec<Q>)> = cover
        .iter()
        .map(|b| {
            let f = |v: Vec<Q>| v.into_iter().map(|x| x / s.delta()).collect::<Vec<Q>>();
            (f(b.lo()), f(b.hi()))
        })
        .collect();
    let mut scale = BigInt::from(1);
    for (lo, hi) in &rel {
        for x in lo.iter().chain(hi) {
            scale = scale.lcm(x.denom());
            if scale > BigInt::from(1 << 20) {
                return None;
            }
        }
    }
    let scale_i = scale.to_i64()?;
    let conv = |x: &Q| -> Option<i64> {
        let v = (x * Q::from_integer(scale.clone())).to_integer().to_i64()?;
        (v.abs() < LATTICE_LIMIT).then_some(v)
    };
    let boxes = rel
        .iter()
        .map(|(lo, hi)| Some((lo.iter().map(conv).collect::<Option<Vec<_>>>()?, hi.iter().map(conv).collect::<Option<Vec<_>>>()?)))
        .collect::<Option<Vec<_>>>()?;
    let (clo, chi) = s.bbox()?;
    if clo.iter().chain(&chi).any(|&c| (c.abs() + 1).checked_mul(scale_i).is_none_or(|v| v >= LATTICE_LIMIT)) {
        return None;
    }
    Some((Lattice { unit: s.delta() / qi(scale_i), scale: scale_i }, boxes))
}

type Incidence<T> = Vec<(Cell, Vec<(usize, Bx<T>)>)>;

/// Per cell: the balls touching it and their clipped boxes.
fn incidence<C: Coords>(co: &C, boxes: &[Bx<C::T>], cover: &[Ball], s: &VoxelSpace, mode: NerveMode) -> Incidence<C::T> {
    let fl: Vec<(Vec<f64>, Vec<f64>)> = cover
        .iter()
        .map(|b| (b.lo().iter().map(q_f64).collect(), b.hi().iter().map(q_f64).collect()))
        .collect();
    let d = q_f64(s.delta());
    let slack = 1e-9 * (1.0 + d);
    s.cells()
        .iter()
        .map(|c| {
            let cb = co.cell(c);
            let hits = (0..cover.len())
                .filter(|&i| {
                    c.iter().enumerate().all(|(k, &x)| {
                        fl[i].0[k] <= (x + 1) as f64 * d + slack && x as f64 * d <= fl[i].1[k] + slack
                    })
                })
                .filter_map(|i| match mode {
                    NerveMode::ClosedCells => meet(&boxes[i], &cb).map(|k| (i, k)),
                    NerveMode::CellCenters => contains_box(&boxes[i], &cb).then(|| (i, cb.clone())),
                })
                .collect();
            (c.clone(), hits)
        })
        .collect()
}

fn bron_kerbosch(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
    let cands: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let (mut p, mut x) = (p, x);
    for v in cands {
        r.push(v);
        let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

fn maximal(sets: BTreeSet<Vec<usize>>) -> Vec<Vec<usize>> {
    let all: Vec<Vec<usize>> = sets.into_iter().collect();
    all.iter()
        .filter(|a| {
            !all.iter().any(|b| b.len() > a.len() && a.iter().all(|x| b.binary_search(x).is_ok()))
        })
        .cloned()
        .collect()
}

/// Trace of each ball on the space: bounding box of its clipped cell boxes.
fn traces<T: Ord + Clone>(inc: &Incidence<T>, k: usize) -> Vec<Option<Bx<T>>> {
    let mut t: Vec<Option<Bx<T>>> = vec![None; k];
    for (_, hits) in inc {
        for (i, b) in hits {
            t[*i] = Some(match &t[*i] {
                None => b.clone(),
                Some(a) => hull(a, b),
            });
        }
    }
    t
}

fn fiber_of<C: Coords>(co: &C, simplices: &[Vec<usize>], tr: &[Option<Bx<C::T>>]) -> Q {
    simplices
        .iter()
        .filter_map(|sx| {
            sx.iter()
                .filter_map(|&i| tr[i].clone())
                .reduce(|a, b| hull(&a, &b))
                .map(|b| co.side(&b))
        })
        .max()
        .unwrap_or_else(|| qi(0))
}

fn check_covers(cover: &[Ball], s: &VoxelSpace) -> Result<()> {
    match s.cells().iter().find(|c| !cover.iter().any(|b| b.contains_cell(s, c))) {
        Some(c) => Err(Error::input(format!("cover misses cell {c:?}"))),
        None => Ok(()),
    }
}

fn nerve_in<C: Coords>(co: &C, boxes: &[Bx<C::T>], cover: &[Ball], s: &VoxelSpace, mode: NerveMode) -> Result<NerveComplex> {
    let inc = incidence(co, boxes, cover, s, mode);
    for (c, hits) in &inc {
        let cb = co.cell(c);
        if !hits.iter().any(|(i, _)| contains_box(&boxes[*i], &cb)) {
            return Err(Error::input(format!("cover misses cell {c:?}")));
        }
    }
    let mut sets = BTreeSet::new();
    for (_, hits) in &inc {
        match mode {
            NerveMode::CellCenters => {
                sets.insert(hits.iter().map(|h| h.0).collect::<Vec<_>>());
            }
            NerveMode::ClosedCells => {
                // boxes have Helly number 2: cliques of the meeting graph are simplices
                let k = hits.len();
                let adj: Vec<Vec<bool>> = (0..k)
                    .map(|a| (0..k).map(|b| a != b && meet(&hits[a].1, &hits[b].1).is_some()).collect())
                    .collect();
                let mut out = Vec::new();
                bron_kerbosch(&adj, &mut vec![], (0..k).collect(), vec![], &mut out);
                for cl in out {
                    let mut v: Vec<usize> = cl.iter().map(|&a| hits[a].0).collect();
                    v.sort_unstable();
                    sets.insert(v);
                }
            }
        }
    }
    let simplices = maximal(sets);
    let multiplicity = simplices.iter().map(|s| s.len()).max().unwrap_or(0);
    let tr = traces(&inc, cover.len());
    Ok(NerveComplex {
        mode,
        vertices: cover.len(),
        fiber: fiber_of(co, &simplices, &tr),
        dimension: multiplicity as i64 - 1,
        multiplicity,
        simplices,
    })
}

/// Nerve of a covering restricted to the space.
pub fn nerve(cover: &[Ball], s: &VoxelSpace, mode: NerveMode) -> Result<NerveComplex> {
    match lattice_boxes(cover, s) {
        Some((lat, boxes)) => nerve_in(&lat, &boxes, cover, s, mode),
        None => {
            let boxes: Vec<BoxQ> = cover.iter().map(|b| (b.lo(), b.hi())).collect();
            nerve_in(&Rational(s), &boxes, cover, s, mode)
        }
    }
}

/// Independent recount: depth of the deepest point, by coordinate compression of box endpoints.
pub fn recheck_multiplicity(cover: &[Ball], s: &VoxelSpace, mode: NerveMode) -> usize {
    let mut best = 0;
    for c in s.cells() {
        let cb = cell_box(s, c);
        let boxes: Vec<BoxQ> = match mode {
            NerveMode::CellCenters => {
                best = best.max(cover.iter().filter(|b| b.contains_cell(s, c)).count());
                continue;
            }
            NerveMode::ClosedCells => cover.iter().filter_map(|b| meet(&(b.lo(), b.hi()), &cb)).collect(),
        };
        if boxes.is_empty() {
            continue;
        }
        let n = s.n();
        let axes: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let v: BTreeSet<Q> = boxes.iter().map(|b| b.0[i].clone()).collect();
                v.into_iter().collect()
            })
            .collect();
        let mut idx = vec![0usize; n];
        loop {
            let pt: Vec<&Q> = (0..n).map(|i| &axes[i][idx[i]]).collect();
            let depth = boxes
                .iter()
                .filter(|b| (0..n).all(|i| &b.0[i] <= pt[i] && pt[i] <= &b.1[i]))
                .count();
            best = best.max(depth);
            let mut i = 0;
            while i < n {
                idx[i] += 1;
                if idx[i] < axes[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthResult {
    /// Width index `m − 1`.
    pub index: u32,
    pub mode: NerveMode,
    #[serde(with = "num::qser")]
    pub bound: Q,
    pub cover: Vec<Ball>,
    pub nerve: NerveComplex,
    /// Which search produced the cover.
    pub source: String,
    pub evaluated: u64,
    /// No cover beyond the single enclosing ball met the multiplicity limit.
    pub trivial: bool,
    #[serde(with = "num::qser")]
    pub diameter: Q,
    pub hc: (f64, f64),
    /// `bound / HC^{1/m}` with the lower content (larger ratio) and the upper one.
    pub c_measured: (f64, f64),
}

/// Cube covering a box, same centre.
fn cube_over(lo: &[Q], hi: &[Q]) -> Ball {
    let center: Vec<Q> = lo.iter().zip(hi).map(|(a, b)| (a + b) / qi(2)).collect();
    let r = lo.iter().zip(hi).map(|(a, b)| b - a).max().unwrap() / qi(2);
    Ball::new(center, r)
}

fn enclosing(s: &VoxelSpace, cells: &[&Cell]) -> Ball {
    let n = s.n();
    let mut lo = s.cell_lo(cells[0]);
    let mut hi = s.cell_hi(cells[0]);
    for c in cells {
        for i in 0..n {
            lo[i] = num::q_min(&lo[i], &(qi(c[i]) * s.delta()));
            hi[i] = num::q_max(&hi[i], &(qi(c[i] + 1) * s.delta()));
        }
    }
    cube_over(&lo, &hi)
}

/// Block tiling with side `k` cells and offset `o`.
fn tiling(s: &VoxelSpace, k: i64, o: i64) -> Vec<Ball> {
    let mut blocks: BTreeSet<Cell> = BTreeSet::new();
    for c in s.cells() {
        blocks.insert(c.iter().map(|&x| (x + o).div_euclid(k)).collect());
    }
    blocks
        .into_iter()
        .map(|b| {
            let lo: Vec<Q> = b.iter().map(|&x| qi(x * k - o) * s.delta()).collect();
            let hi: Vec<Q> = b.iter().map(|&x| qi(x * k - o + k) * s.delta()).collect();
            cube_over(&lo, &hi)
        })
        .collect()
}

/// Slabs across `axis` with cut positions `cuts` (cell coordinates, increasing).
fn slabs(s: &VoxelSpace, axis: usize, cuts: &[i64]) -> Vec<Ball> {
    let mut groups: Vec<Vec<&Cell>> = vec![Vec::new(); cuts.len() + 1];
    for c in s.cells() {
        let g = cuts.partition_point(|&x| x <= c[axis]);
        groups[g].push(c);
    }
    groups.into_iter().filter(|g| !g.is_empty()).map(|g| enclosing(s, &g)).collect()
}

/// Cuts so that every slab is at least as thick as its cross-section.
fn adaptive_cuts(s: &VoxelSpace, axis: usize, scale: i64) -> Vec<i64> {
    let (lo, hi) = s.bbox().unwrap();
    let mut cuts = Vec::new();
    let mut start = lo[axis];
    let mut x = lo[axis];
    let mut cross_lo = vec![i64::MAX; s.n()];
    let mut cross_hi = vec![i64::MIN; s.n()];
    let by_layer = |x: i64| s.cells().iter().filter(move |c| c[axis] == x);
    while x <= hi[axis] {
        for c in by_layer(x) {
            for i in 0..s.n() {
                cross_lo[i] = cross_lo[i].min(c[i]);
                cross_hi[i] = cross_hi[i].max(c[i]);
            }
        }
        let ext = (0..s.n())
            .filter(|&i| i != axis && cross_hi[i] >= cross_lo[i])
            .map(|i| cross_hi[i] - cross_lo[i] + 1)
            .max()
            .unwrap_or(1);
        if x - start + 1 >= ext.max(scale) && x < hi[axis] {
            cuts.push(x + 1);
            start = x + 1;
            cross_lo = vec![i64::MAX; s.n()];
            cross_hi = vec![i64::MIN; s.n()];
        }
        x += 1;
    }
    cuts
}

struct Search<'a> {
    s: &'a VoxelSpace,
    mode: NerveMode,
    limit: usize,
    budget: u64,
    evaluated: u64,
    best: Option<(Q, Vec<Ball>, NerveComplex, String)>,
}

impl Search<'_> {
    fn offer(&mut self, cover: Vec<Ball>, source: &str) -> Option<Q> {
        if self.evaluated >= self.budget {
            return None;
        }
        self.evaluated += 1;
        let nv = nerve(&cover, self.s, self.mode).ok()?;
        if nv.multiplicity > self.limit {
            return None;
        }
        let f = nv.fiber.clone();
        if self.best.as_ref().is_none_or(|b| f < b.0) {
            self.best = Some((f.clone(), cover, nv, source.into()));
        }
        Some(f)
    }
}

/// Upper bound on `UW_{m−1}` from the best covering found whose nerve has dimension ≤ m − 1.
pub fn width_bound(s: &VoxelSpace, m: u32, budget: u64, mode: NerveMode, seed: u64) -> Result<WidthResult> {
    if m < 1 {
        return Err(Error::input("width index needs m ≥ 1"));
    }
    if s.is_empty() {
        return Err(Error::input("width of an empty set"));
    }
    let all: Vec<&Cell> = s.cells().iter().collect();
    let mut search = Search { s, mode, limit: m as usize, budget: budget.max(1), evaluated: 0, best: None };
    search.offer(vec![enclosing(s, &all)], "single-ball");
    let trivial_bound = search.best.as_ref().map(|b| b.0.clone());

    let me = Exponent::int(m);
    if let Ok(g) = greedy_content(s, &me, &BallFamily::AllGrid) {
        search.offer(g.witness, "content-witness");
    }
    let ext = s.max_extent();
    let mut k = 1;
    while k < ext {
        for o in [0, k / 2] {
            search.offer(tiling(s, k, o), &format!("tiling-{k}-{o}"));
        }
        k *= 2;
    }
    let mut base_cuts: Vec<(usize, Vec<i64>)> = Vec::new();
    for axis in 0..s.n() {
        for scale in [1, 2, 4, 8] {
            let cuts = adaptive_cuts(s, axis, scale);
            search.offer(slabs(s, axis, &cuts), &format!("slabs-{axis}-{scale}"));
            base_cuts.push((axis, cuts));
        }
    }
    // annealing over cut positions of the best slab partition
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = base_cuts
        .iter()
        .filter_map(|(a, c)| {
            let nv = nerve(&slabs(s, *a, c), s, mode).ok()?;
            (nv.multiplicity <= m as usize).then(|| (nv.fiber, *a, c.clone()))
        })
        .min_by(|x, y| x.0.cmp(&y.0));
    if let Some((f0, axis, mut cuts)) = start {
        let mut cur = q_f64(&f0);
        let mut temp = cur * 0.1 + 1e-9;
        // revisited cut vectors count against the budget but are not re-evaluated
        let mut seen: HashMap<Vec<i64>, Option<Q>> = HashMap::new();
        while search.evaluated < search.budget && !cuts.is_empty() {
            let mut next = cuts.clone();
            let i = rng.gen_range(0..next.len());
            match rng.gen_range(0..3) {
                0 => next[i] -= 1,
                1 => next[i] += 1,
                _ => {
                    if next.len() > 1 {
                        next.remove(i);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            let f = match seen.get(&next) {
                Some(f) => {
                    search.evaluated += 1;
                    f.clone()
                }
                None => {
                    let f = search.offer(slabs(s, axis, &next), "annealed-slabs");
                    seen.insert(next.clone(), f.clone());
                    f
                }
            };
            let Some(f) = f else {
                temp *= 0.995;
                continue;
            };
            let f = q_f64(&f);
            if f <= cur || rng.gen::<f64>() < ((cur - f) / temp).exp() {
                cuts = next;
                cur = f;
            }
            temp *= 0.995;
        }
    }
    let (bound, cover, nv, source) = search.best.expect("single ball always qualifies");
    let hc = match exact_content(s, &me, &BallFamily::AllGrid, 200_000) {
        Ok(r) => (r.value_lower.f64(), r.value_upper.f64()),
        Err(_) => (0.0, 0.0),
    };
    let bf = q_f64(&bound);
    let c = |h: f64| if h > 0.0 { bf / h.powf(1.0 / m as f64) } else { f64::INFINITY };
    Ok(WidthResult {
        index: m - 1,
        mode,
        trivial: trivial_bound.is_some_and(|t| t == bound) && source == "single-ball",
        bound,
        cover,
        nerve: nv,
        source,
        evaluated: search.evaluated,
        diameter: s.diameter(),
        c_measured: (c(hc.0), c(hc.1)),
        hc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthRecheck {
    pub covers: bool,
    pub multiplicity: usize,
    pub dimension_ok: bool,
    pub fiber_ok: bool,
}

impl WidthRecheck {
    pub fn all_hold(&self) -> bool {
        self.covers && self.dimension_ok && self.fiber_ok
    }
}

/// Re-derives the nerve dimension and the fiber bound of a width certificate.
pub fn verify_width(s: &VoxelSpace, w: &WidthResult) -> WidthRecheck {
    let covers = check_covers(&w.cover, s).is_ok();
    let mult = recheck_multiplicity(&w.cover, s, w.mode);
    let fresh = nerve(&w.cover, s, w.mode).ok();
    WidthRecheck {
        covers,
        multiplicity: mult,
        dimension_ok: mult == w.nerve.multiplicity && mult <= w.index as usize + 1,
        fiber_ok: fresh.is_some_and(|f| f.fiber == w.bound && w.nerve.fiber == w.bound),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalWidth {
    #[serde(with = "num::qser")]
    pub r: Q,
    /// `max HC_m(ball ∩ s) / Rᵐ` over grid-centred balls of radius `R`.
    pub max_ratio: f64,
    pub width: WidthResult,
    /// Width bound over `R`.
    pub width_over_r: f64,
    pub verdict: String,
}

pub fn local_width_check(s: &VoxelSpace, m: u32, r: &Q, budget: u64, mode: NerveMode, seed: u64) -> Result<LocalWidth> {
    if *r <= qi(0) {
        return Err(Error::input("radius must be positive"));
    }
    let scan = content_ball_scan(s, &Exponent::int(m), r, budget)?;
    let width = width_bound(s, m, budget, mode, seed)?;
    let max_ratio = scan.max_ratio.f64();
    let wr = q_f64(&width.bound) / q_f64(r);
    Ok(LocalWidth {
        r: r.clone(),
        verdict: format!(
            "balls of radius {} carry at most {:.4}·R^{m} of content; width bound is {:.4}·R",
            num::q_str(r),
            max_ratio,
            wr
        ),
        max_ratio,
        width_over_r: wr,
        width,
    })
}

/// Thin long body with square bulbs: `length × thickness` cells plus `bulbs` blocks of `bulb × bulb` on top.
pub fn fig1_body(delta: Q, length: i64, thickness: i64, bulbs: i64, bulb: i64) -> VoxelSpace {
    let mut cells: Vec<Cell> = Vec::new();
    for x in 0..length {
        for y in 0..thickness {
            cells.push(vec![x, y]);
        }
    }
    let gap = length / (bulbs + 1);
    for k in 1..=bulbs {
        let x0 = k * gap - bulb / 2;
        for x in x0..x0 + bulb {
            for y in thickness..thickness + bulb {
                cells.push(vec![x, y]);
            }
        }
    }
    VoxelSpace::new(2, delta, cells).expect("two-dimensional cells")
}
