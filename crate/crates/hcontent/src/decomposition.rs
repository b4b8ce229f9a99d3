//! Disjoint-ball decomposition of a voxel set with respect to a fixed near-optimal covering.
//!
//! Radii here are floats: the threshold constant `A(m)` is irrational for every `m` of interest.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::coarea::{best_slice, slice_profile, SliceFn};
use crate::content::{exact_content, BallFamily};
use crate::error::{Error, Result};
use crate::num::{self, q_f64, tau, Exponent, Q};
use crate::setcover::{self, Instance};
use crate::space::{linf, Ball, Cell, VoxelSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub m: f64,
    pub i1: f64,
    pub a: f64,
    pub i2: f64,
    pub decay: f64,
}

impl Constants {
    /// `I₁ = (100m)ᵐ`, `A = [100m·4^{1/(m−1)}·I₁]^{(m−1)/m}`, `I₂ = 10m·12ᵐ·A`, `decay = 1 − 1/(2·12ᵐ)`.
    pub fn paper(m: f64) -> Result<Self> {
        if m <= 1.0 {
            return Err(Error::input(format!("decomposition needs m > 1, got {m}")));
        }
        let i1 = (100.0 * m).powf(m);
        let a = (100.0 * m * 4f64.powf(1.0 / (m - 1.0)) * i1).powf((m - 1.0) / m);
        Ok(Self::with_a(m, a, i1))
    }

    /// Same formulas but with a caller-chosen threshold constant.
    pub fn with_a(m: f64, a: f64, i1: f64) -> Self {
        Constants {
            m,
            i1,
            a,
            i2: 10.0 * m * 12f64.powf(m) * a,
            decay: 1.0 - 1.0 / (2.0 * 12f64.powf(m)),
        }
    }

    /// `ε_k = ε / (3m·10ᵐ·A·2ᵏ)`.
    pub fn eps_k(&self, eps: f64, k: u32) -> f64 {
        eps / (3.0 * self.m * 10f64.powf(self.m) * self.a * 2f64.powi(k as i32))
    }
}

/// A voxel set together with finitely many exact points (zero content, but they move).
#[derive(Debug, Clone, PartialEq)]
pub struct YSet {
    pub cells: VoxelSpace,
    pub points: Vec<Vec<Q>>,
}

impl YSet {
    pub fn from_cells(cells: VoxelSpace) -> Self {
        YSet { cells, points: vec![] }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.points.is_empty()
    }
}

/// Content relative to a fixed list of balls, memoised by subset.
pub struct Tilde {
    pub y: VoxelSpace,
    pub q: Vec<Ball>,
    cells: Vec<Cell>,
    index: HashMap<Cell, usize>,
    members: Vec<Vec<usize>>,
    budget: u64,
    memo: RefCell<HashMap<(Vec<usize>, u64), TildeValue>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TildeValue {
    pub value: f64,
    pub chosen: Vec<usize>,
    pub optimal: bool,
}

impl Tilde {
    pub fn new(y: &VoxelSpace, q: Vec<Ball>, budget: u64) -> Result<Self> {
        let cells: Vec<Cell> = y.cells().iter().cloned().collect();
        let index: HashMap<Cell, usize> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let members: Vec<Vec<usize>> = q
            .iter()
            .map(|b| (0..cells.len()).filter(|&i| b.contains_cell(y, &cells[i])).collect())
            .collect();
        let mut hit = vec![false; cells.len()];
        for m in &members {
            for &i in m {
                hit[i] = true;
            }
        }
        if let Some(i) = hit.iter().position(|h| !h) {
            return Err(Error::Uncoverable(format!("fixed covering misses cell {:?}", cells[i])));
        }
        Ok(Tilde {
            y: y.clone(),
            q,
            cells,
            index,
            members,
            budget,
            memo: RefCell::new(HashMap::new()),
        })
    }

    pub fn indices(&self, s: &VoxelSpace) -> Vec<usize> {
        let mut v: Vec<usize> = s.cells().iter().filter_map(|c| self.index.get(c).copied()).collect();
        v.sort_unstable();
        v
    }

    pub fn subset(&self, idx: &[usize]) -> VoxelSpace {
        self.y.with_cells(idx.iter().map(|&i| self.cells[i].clone()))
    }

    pub fn ball_indices(&self, center: &[Q], r: f64) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| num::le_tol(q_f64(&linf(center, &self.y.cell_center(&self.cells[i]))), r))
            .collect()
    }

    /// Optimal sub-cover of the given cells using only the fixed balls, cost `Σ r̃^e`.
    pub fn content(&self, idx: &[usize], e: f64) -> TildeValue {
        if idx.is_empty() {
            return TildeValue { value: 0.0, chosen: vec![], optimal: true };
        }
        let key = (idx.to_vec(), e.to_bits());
        if let Some(v) = self.memo.borrow().get(&key) {
            return v.clone();
        }
        let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut sets = Vec::new();
        let mut which = Vec::new();
        for (b, mem) in self.members.iter().enumerate() {
            let s: Vec<usize> = mem.iter().filter_map(|i| pos.get(i).copied()).collect();
            if !s.is_empty() {
                sets.push(s);
                which.push(b);
            }
        }
        let inst = Instance {
            n_elems: idx.len(),
            weights: which.iter().map(|&b| q_f64(&self.q[b].radius).powf(e)).collect(),
            sets,
            integral: false,
        };
        let out = setcover::solve(&inst, self.budget, &|_| 0.0, 0.0).expect("fixed covering covers every subset");
        let mut chosen: Vec<usize> = out.chosen.iter().map(|&k| which[k]).collect();
        chosen.sort_unstable();
        let v = TildeValue {
            value: chosen.iter().map(|&b| q_f64(&self.q[b].radius).powf(e)).sum(),
            chosen,
            optimal: out.optimal,
        };
        self.memo.borrow_mut().insert(key, v.clone());
        v
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.cells.len()).collect()
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }
}

/// Fixed covering for the decomposition: an optimal grid cover with redundant balls removed.
pub fn build_q(y: &VoxelSpace, m: &Exponent, budget: u64) -> Result<(Vec<Ball>, bool)> {
    let res = exact_content(y, m, &BallFamily::AllGrid, budget)?;
    let mut q = res.witness.clone();
    q.sort_by(|a, b| b.radius.cmp(&a.radius).then_with(|| a.cmp(b)));
    let cells: Vec<&Cell> = y.cells().iter().collect();
    let mut k = 0;
    while k < q.len() {
        let own: Vec<usize> = (0..cells.len()).filter(|&i| q[k].contains_cell(y, cells[i])).collect();
        let redundant = own
            .iter()
            .all(|&i| q.iter().enumerate().any(|(j, b)| j != k && b.contains_cell(y, cells[i])));
        if redundant {
            q.remove(k);
        } else {
            k += 1;
        }
    }
    Ok((q, res.optimal))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Segment starts at this distance (cells at distance ≤ it are inside).
    #[serde(with = "num::qser")]
    pub from: Q,
    pub cells: usize,
    pub tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    #[serde(with = "num::qvec")]
    pub p: Vec<Q>,
    pub m: f64,
    pub segments: Vec<Segment>,
}

impl DensityProfile {
    /// `λ_p(r) = H̃C(B(p,r) ∩ Y′)/rᵐ`.
    pub fn lambda(&self, r: f64) -> f64 {
        let seg = self.segments.iter().rev().find(|s| q_f64(&s.from) <= r + tau());
        match seg {
            Some(s) => s.tilde / r.powf(self.m),
            None => 0.0,
        }
    }
}

fn distance_groups(t: &Tilde, p: &[Q]) -> Vec<(Q, Vec<usize>)> {
    let mut by: Vec<(Q, usize)> = t
        .all()
        .into_iter()
        .map(|i| (linf(p, &t.y.cell_center(t.cell(i))), i))
        .collect();
    by.sort();
    let mut out: Vec<(Q, Vec<usize>)> = Vec::new();
    let mut acc = Vec::new();
    let mut k = 0;
    while k < by.len() {
        let d = by[k].0.clone();
        while k < by.len() && by[k].0 == d {
            acc.push(by[k].1);
            k += 1;
        }
        let mut s = acc.clone();
        s.sort_unstable();
        out.push((d, s));
    }
    out
}

/// Full piecewise profile: one segment per distinct cell-centre distance from `p`.
pub fn density_profile(p: &[Q], t: &Tilde, m: f64) -> DensityProfile {
    let segments = distance_groups(t, p)
        .into_iter()
        .map(|(d, s)| Segment {
            from: d,
            cells: s.len(),
            tilde: t.content(&s, m).value,
        })
        .collect();
    DensityProfile { p: p.to_vec(), m, segments }
}

/// `r(p) = sup{r : λ_p(r) ≥ A⁻ᵐ}`, scanning segments from the outside in.
pub fn critical_radius(p: &[Q], t: &Tilde, m: f64, a: f64) -> Result<f64> {
    let groups = distance_groups(t, p);
    for k in (0..groups.len()).rev() {
        let h = t.content(&groups[k].1, m).value;
        let reach = a * h.powf(1.0 / m);
        let d = q_f64(&groups[k].0);
        if reach >= d && reach > 0.0 {
            let cap = groups.get(k + 1).map(|g| q_f64(&g.0)).unwrap_or(f64::INFINITY);
            return Ok(reach.min(cap));
        }
    }
    Err(Error::input("density never reaches the threshold at this point"))
}

/// Critical radius read off a precomputed profile (same rule as [`critical_radius`]).
pub fn critical_radius_of(dp: &DensityProfile, a: f64) -> Result<f64> {
    for k in (0..dp.segments.len()).rev() {
        let s = &dp.segments[k];
        let reach = a * s.tilde.powf(1.0 / dp.m);
        let d = q_f64(&s.from);
        if reach >= d && reach > 0.0 {
            let cap = dp.segments.get(k + 1).map(|g| q_f64(&g.from)).unwrap_or(f64::INFINITY);
            return Ok(reach.min(cap));
        }
    }
    Err(Error::input("density never reaches the threshold at this point"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusChoice {
    pub r_bar: f64,
    /// Cells straddling the sphere of radius `r̄`.
    pub slice: Vec<Cell>,
    /// Majorant from the slicing step function.
    pub slice_cost: f64,
    /// `H̃C_{m−1}` of the slice, exact over the fixed covering.
    pub slice_tilde: f64,
    /// `2m²/((m+1)r)·H̃C_m(annulus region)`.
    pub bound: f64,
    pub holds: bool,
}

/// Picks `r̄ ∈ [(1+1/m)r, (1+1/m)²r]` by slicing the distance to `p` over the annulus.
pub fn annulus_radius(p: &[Q], r: f64, t: &Tilde, m: &Exponent) -> Result<AnnulusChoice> {
    let mf = m.f64();
    if r <= 0.0 {
        return Err(Error::input("annulus needs a positive radius"));
    }
    let lo = (1.0 + 1.0 / mf) * r;
    let hi = (1.0 + 1.0 / mf).powi(2) * r;
    let (qlo, qhi) = (num::q_from_f64(lo), num::q_from_f64(hi));
    let f = SliceFn::DistToPoint { point: p.to_vec() };
    let half = t.y.delta() / num::qi(2);
    // cells whose distance range meets the closed annulus
    let region: Vec<usize> = t
        .all()
        .into_iter()
        .filter(|&i| {
            let d = linf(p, &t.y.cell_center(t.cell(i)));
            &d + &half >= qlo && &d - &half <= qhi
        })
        .collect();
    if region.is_empty() {
        return Ok(AnnulusChoice {
            r_bar: lo,
            slice: vec![],
            slice_cost: 0.0,
            slice_tilde: 0.0,
            bound: 0.0,
            holds: true,
        });
    }
    let opt = t.content(&region, mf);
    let cover: Vec<Ball> = opt.chosen.iter().map(|&b| t.q[b].clone()).collect();
    let sub = t.subset(&region);
    let prof = slice_profile(&sub, &f, &cover, Some((qlo, qhi)))?;
    let choice = best_slice(&prof, m)?;
    let lvl = prof.level_set(&choice.r);
    let slice_idx = t.indices(&lvl);
    let slice_tilde = t.content(&slice_idx, mf - 1.0).value;
    let bound = 2.0 * mf * mf / ((mf + 1.0) * r) * opt.value;
    Ok(AnnulusChoice {
        r_bar: q_f64(&choice.r),
        slice: lvl.cells().iter().cloned().collect(),
        slice_cost: choice.slice_cost.f64(),
        slice_tilde,
        holds: num::le_tol(slice_tilde, bound) && num::le_tol(choice.slice_cost.f64(), bound),
        bound,
    })
}

/// Balls as (centre, radius) with float radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FBall {
    #[serde(with = "num::qvec")]
    pub center: Vec<Q>,
    pub r: f64,
}

impl FBall {
    pub fn meets(&self, o: &FBall) -> bool {
        q_f64(&linf(&self.center, &o.center)) <= self.r + o.r + tau()
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        num::le_tol(q_f64(&linf(&self.center, x)), self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitaliResult {
    pub selected: Vec<usize>,
    pub disjoint: bool,
    pub tripled_cover: bool,
}

/// Greedy by decreasing radius (ties by centre), discarding anything that meets a chosen ball.
pub fn vitali_select(cands: &[FBall], points: &[Vec<Q>]) -> Result<VitaliResult> {
    if !points.iter().all(|x| cands.iter().any(|b| b.holds(x))) {
        return Err(Error::input("Vitali candidates do not cover the set"));
    }
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&i, &j| {
        cands[j]
            .r
            .partial_cmp(&cands[i].r)
            .unwrap()
            .then_with(|| cands[i].center.cmp(&cands[j].center))
    });
    let mut selected: Vec<usize> = Vec::new();
    for i in order {
        if selected.iter().all(|&s| !cands[s].meets(&cands[i])) {
            selected.push(i);
        }
    }
    let disjoint = (0..selected.len())
        .all(|a| (a + 1..selected.len()).all(|b| !cands[selected[a]].meets(&cands[selected[b]])));
    let tripled_cover = points.iter().all(|x| {
        selected.iter().any(|&s| {
            FBall { center: cands[s].center.clone(), r: 3.0 * cands[s].r }.holds(x)
        })
    });
    Ok(VitaliResult { selected, disjoint, tripled_cover })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Inequality { name: name.into(), lhs, rhs, holds: num::le_tol(lhs, rhs) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompBall {
    #[serde(with = "num::qvec")]
    pub center: Vec<Q>,
    pub r_p: f64,
    pub r_bar: f64,
    pub theta: f64,
    /// `η_j(1) = H̃C(B(p_j, r(p_j)) ∩ Y′)`.
    pub eta1: f64,
    pub annulus: AnnulusChoice,
    /// Fixed-cover content of `B_j ∩ Y′`.
    pub inner_tilde: f64,
    pub inner_cover: Vec<Ball>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub m: f64,
    pub constants: Constants,
    pub eps: f64,
    pub q: Vec<Ball>,
    pub q_optimal: bool,
    /// `H̃C(Y′)`, used as the reference content on the right-hand sides.
    pub hc: f64,
    pub balls: Vec<DecompBall>,
    pub alpha: f64,
    pub inequalities: Vec<Inequality>,
    pub disjoint: bool,
    pub tripled_cover: bool,
    pub alpha_in_range: bool,
    /// `Σ η_j(1) ≤ H̃C(Y′)`.
    pub additivity: bool,
    pub coarea_ok: bool,
    /// Cells of `Y′` outside every `B_j`.
    pub outside: Vec<Cell>,
}

impl Decomposition {
    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
            && self.disjoint
            && self.tripled_cover
            && self.alpha_in_range
            && self.additivity
            && self.coarea_ok
    }

    pub fn fballs(&self) -> Vec<FBall> {
        self.balls.iter().map(|b| FBall { center: b.center.clone(), r: b.r_bar }).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    /// Defaults to `eps_rel·H̃C(Y′)`.
    pub eps: Option<f64>,
    pub eps_rel: f64,
    pub budget: u64,
    pub constants: Option<Constants>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { eps: None, eps_rel: 1e-3, budget: 1_000_000, constants: None }
    }
}

fn five(m: f64, k: &Constants, alpha: f64, hc: f64, eps: f64, lhs: [f64; 5]) -> Vec<Inequality> {
    let a = k.a;
    let four = 4f64.powf(1.0 / (m - 1.0));
    vec![
        Inequality::new("max-radius", lhs[0], (1.0 + 1.0 / m).powi(2) * a * hc.powf(1.0 / m) + eps),
        Inequality::new("outside-content", lhs[1], (1.0 - alpha.powf(m)) * hc + eps),
        Inequality::new(
            "weighted-boundary",
            lhs[2],
            200.0 * four * m * alpha.powf(m + 1.0) / a.powf(1.0 / (m - 1.0)) * hc.powf((m + 1.0) / m) + eps,
        ),
        Inequality::new(
            "boundary",
            lhs[3],
            50.0 * m * four * alpha.powf(m) / a.powf(m / (m - 1.0)) * hc + eps,
        ),
        Inequality::new("weighted-inner", lhs[4], 20.0 * alpha.powf(m + 1.0) * a * hc.powf((m + 1.0) / m) + eps),
    ]
}

/// Builds the decomposition and its report without failing on violated inequalities.
pub fn decompose_report(y: &VoxelSpace, m: &Exponent, opts: &DecomposeOptions) -> Result<Decomposition> {
    let mf = m.f64();
    if mf <= 1.0 {
        return Err(Error::input("decomposition needs m > 1"));
    }
    if y.is_empty() {
        return Err(Error::input("decomposition of an empty set"));
    }
    let k = match &opts.constants {
        Some(c) => c.clone(),
        None => Constants::paper(mf)?,
    };
    let (q, q_optimal) = build_q(y, m, opts.budget)?;
    let t = Tilde::new(y, q.clone(), opts.budget)?;
    let all = t.all();
    let hc = t.content(&all, mf).value;
    let eps = opts.eps.unwrap_or(opts.eps_rel * hc);

    let mut cands = Vec::new();
    let mut info = Vec::new();
    for b in &q {
        let rp = critical_radius(&b.center, &t, mf, k.a)?;
        let ann = annulus_radius(&b.center, rp, &t, m)?;
        cands.push(FBall { center: b.center.clone(), r: ann.r_bar });
        info.push((rp, ann));
    }
    let centers: Vec<Vec<Q>> = all.iter().map(|&i| y.cell_center(t.cell(i))).collect();
    let vit = vitali_select(&cands, &centers)?;

    let mut balls = Vec::new();
    let mut inside = vec![false; all.len()];
    for &s in &vit.selected {
        let (rp, ann) = info[s].clone();
        let c = cands[s].center.clone();
        let eta1 = t.content(&t.ball_indices(&c, rp), mf).value;
        let inner = t.ball_indices(&c, ann.r_bar);
        for &i in &inner {
            inside[i] = true;
        }
        let iv = t.content(&inner, mf);
        balls.push(DecompBall {
            theta: ann.r_bar / rp,
            center: c,
            r_p: rp,
            r_bar: ann.r_bar,
            eta1,
            inner_tilde: iv.value,
            inner_cover: iv.chosen.iter().map(|&b| q[b].clone()).collect(),
            annulus: ann,
        });
    }
    let outside_idx: Vec<usize> = all.iter().copied().filter(|&i| !inside[i]).collect();
    let eta_sum: f64 = balls.iter().map(|b| b.eta1).sum();
    let alpha = if hc > 0.0 { (eta_sum / hc).powf(1.0 / mf) } else { 1.0 };
    let lhs = lhs_values(&balls, t.content(&outside_idx, mf).value, &t, mf);
    let inequalities = five(mf, &k, alpha, hc, eps, lhs);
    Ok(Decomposition {
        m: mf,
        constants: k,
        eps,
        hc,
        alpha,
        alpha_in_range: alpha > 1.0 / 12.0 && alpha <= 1.0 + tau(),
        additivity: num::le_tol(eta_sum, hc),
        coarea_ok: balls.iter().all(|b| b.annulus.holds),
        disjoint: vit.disjoint,
        tripled_cover: vit.tripled_cover,
        outside: outside_idx.iter().map(|&i| t.cell(i).clone()).collect(),
        q,
        q_optimal,
        balls,
        inequalities,
    })
}

fn lhs_values(balls: &[DecompBall], outside: f64, t: &Tilde, m: f64) -> [f64; 5] {
    let bnd: Vec<f64> = balls
        .iter()
        .map(|b| {
            let idx = t.indices(&t.y.with_cells(b.annulus.slice.iter().cloned()));
            t.content(&idx, m - 1.0).value.powf(m / (m - 1.0))
        })
        .collect();
    [
        balls.iter().map(|b| b.r_bar).fold(0.0, f64::max),
        outside,
        balls.iter().zip(&bnd).map(|(b, x)| b.r_bar * x).sum(),
        bnd.iter().sum(),
        balls.iter().map(|b| b.r_bar * b.inner_tilde).sum(),
    ]
}

/// Decomposition that fails with the full report if any check is violated.
pub fn decompose(y: &VoxelSpace, m: &Exponent, opts: &DecomposeOptions) -> Result<Decomposition> {
    let d = decompose_report(y, m, opts)?;
    let recheck = check_decomposition(y, &d, opts.budget)?;
    if !d.all_hold() || !recheck.all_hold() {
        let bad: Vec<String> = d
            .inequalities
            .iter()
            .chain(&recheck.inequalities)
            .filter(|i| !i.holds)
            .map(|i| i.name.clone())
            .collect();
        return Err(Error::DecompositionViolation {
            summary: format!("failed checks: {bad:?}"),
            report: Box::new(serde_json::to_value(&d).unwrap_or_default()),
        });
    }
    Ok(d)
}

/// Independent re-check from raw data: memberships, fixed-cover contents (fresh solver state),
/// disjointness, the tripled cover, the α range and the five inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recheck {
    pub inequalities: Vec<Inequality>,
    pub alpha: f64,
    pub disjoint: bool,
    pub tripled_cover: bool,
    pub alpha_in_range: bool,
    pub q_covers: bool,
    pub q_irredundant: bool,
}

impl Recheck {
    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
            && self.disjoint
            && self.tripled_cover
            && self.alpha_in_range
            && self.q_covers
            && self.q_irredundant
    }
}

fn brute_tilde(y: &VoxelSpace, cells: &BTreeSet<Cell>, q: &[Ball], e: f64, budget: u64) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    let list: Vec<&Cell> = cells.iter().collect();
    let mut sets = Vec::new();
    let mut w = Vec::new();
    for b in q {
        let s: Vec<usize> = (0..list.len()).filter(|&i| b.contains_cell(y, list[i])).collect();
        if !s.is_empty() {
            sets.push(s);
            w.push(q_f64(&b.radius).powf(e));
        }
    }
    let inst = Instance { n_elems: list.len(), sets, weights: w, integral: false };
    if inst.sets.len() <= 20 {
        if let Some((v, _)) = setcover::brute_force(&inst) {
            return v;
        }
    }
    setcover::solve(&inst, budget, &|_| 0.0, 0.0).map(|o| o.upper).unwrap_or(f64::INFINITY)
}

pub fn check_decomposition(y: &VoxelSpace, d: &Decomposition, budget: u64) -> Result<Recheck> {
    let m = d.m;
    let in_ball = |c: &Cell, center: &[Q], r: f64| num::le_tol(q_f64(&linf(center, &y.cell_center(c))), r);
    let q_covers = y.cells().iter().all(|c| d.q.iter().any(|b| b.contains_cell(y, c)));
    let q_irredundant = (0..d.q.len()).all(|k| {
        y.cells().iter().any(|c| {
            d.q[k].contains_cell(y, c) && !d.q.iter().enumerate().any(|(j, b)| j != k && b.contains_cell(y, c))
        })
    });
    let hc = brute_tilde(y, y.cells(), &d.q, m, budget);
    let fb = d.fballs();
    let disjoint = (0..fb.len()).all(|a| (a + 1..fb.len()).all(|b| !fb[a].meets(&fb[b])));
    let tripled_cover = y
        .cells()
        .iter()
        .all(|c| d.balls.iter().any(|b| in_ball(c, &b.center, 3.0 * b.r_bar)));
    let mut eta_sum = 0.0;
    let mut lhs = [0.0f64; 5];
    let mut covered = BTreeSet::new();
    for b in &d.balls {
        let inner: BTreeSet<Cell> = y.cells().iter().filter(|c| in_ball(c, &b.center, b.r_p)).cloned().collect();
        eta_sum += brute_tilde(y, &inner, &d.q, m, budget);
        let big: BTreeSet<Cell> = y.cells().iter().filter(|c| in_ball(c, &b.center, b.r_bar)).cloned().collect();
        let slice: BTreeSet<Cell> = b.annulus.slice.iter().cloned().collect();
        let bnd = brute_tilde(y, &slice, &d.q, m - 1.0, budget).powf(m / (m - 1.0));
        let inner_t = brute_tilde(y, &big, &d.q, m, budget);
        lhs[0] = lhs[0].max(b.r_bar);
        lhs[2] += b.r_bar * bnd;
        lhs[3] += bnd;
        lhs[4] += b.r_bar * inner_t;
        covered.extend(big);
    }
    let outside: BTreeSet<Cell> = y.cells().difference(&covered).cloned().collect();
    lhs[1] = brute_tilde(y, &outside, &d.q, m, budget);
    let alpha = if hc > 0.0 { (eta_sum / hc).powf(1.0 / m) } else { 1.0 };
    Ok(Recheck {
        inequalities: five(m, &d.constants, alpha, hc, d.eps, lhs),
        alpha,
        disjoint,
        tripled_cover,
        alpha_in_range: alpha > 1.0 / 12.0 && alpha <= 1.0 + tau(),
        q_covers,
        q_irredundant,
    })
}
