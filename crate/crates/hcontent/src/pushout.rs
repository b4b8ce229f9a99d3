//! Radial pushout of point sets onto lower skeleta of a cubical grid.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{cone_covering, ConeVariant};
use crate::error::{Error, Result};
use crate::num::{self, q_f64, qi, Exponent, Q};
use crate::space::{linf, min_enclosing_ball_linf, Ball};

/// Thresholds for the pushout; defaults are `c₀(k) = 4^{−k}`, `c₂(n) = 4n`, ceiling `10·2ᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushoutConstants {
    pub c0_base: f64,
    pub c2_per_dim: f64,
    pub ceiling_base: f64,
    pub candidates: usize,
}

impl Default for PushoutConstants {
    fn default() -> Self {
        PushoutConstants { c0_base: 4.0, c2_per_dim: 4.0, ceiling_base: 2.0, candidates: 64 }
    }
}

impl PushoutConstants {
    pub fn c0(&self, k: usize) -> f64 {
        self.c0_base.powi(-(k as i32))
    }
    pub fn c2(&self, n: usize) -> f64 {
        self.c2_per_dim * n as f64
    }
    pub fn ceiling(&self, k: usize) -> f64 {
        10.0 * self.ceiling_base.powi(k as i32)
    }
}

/// A point with a nominal radius (cells carry half their side, bare points carry zero).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WPoint {
    #[serde(with = "num::qvec")]
    pub x: Vec<Q>,
    #[serde(with = "num::qser")]
    pub rho: Q,
}

/// A face of the grid `Q(R)`: free axes range over `[a_i R, (a_i+1) R]`, fixed axes sit at `a_i R`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Face {
    pub base: Vec<i64>,
    pub free: Vec<bool>,
}

impl Face {
    pub fn dim(&self) -> usize {
        self.free.iter().filter(|f| **f).count()
    }

    pub fn lo(&self, r: &Q) -> Vec<Q> {
        self.base.iter().map(|&a| qi(a) * r).collect()
    }

    pub fn hi(&self, r: &Q) -> Vec<Q> {
        self.base
            .iter()
            .zip(&self.free)
            .map(|(&a, &f)| qi(if f { a + 1 } else { a }) * r)
            .collect()
    }

    pub fn center(&self, r: &Q) -> Vec<Q> {
        self.lo(r).iter().zip(self.hi(r)).map(|(a, b)| (a + b) / qi(2)).collect()
    }

    pub fn contains(&self, x: &[Q], r: &Q) -> bool {
        let (lo, hi) = (self.lo(r), self.hi(r));
        x.iter().zip(lo.iter().zip(&hi)).all(|(v, (a, b))| v >= a && v <= b)
    }

    pub fn interior(&self, x: &[Q], r: &Q) -> bool {
        let (lo, hi) = (self.lo(r), self.hi(r));
        (0..x.len()).all(|i| if self.free[i] { x[i] > lo[i] && x[i] < hi[i] } else { x[i] == lo[i] })
    }
}

/// The unique face containing `x` in its relative interior.
pub fn carrier(x: &[Q], r: &Q) -> Face {
    let mut base = Vec::with_capacity(x.len());
    let mut free = Vec::with_capacity(x.len());
    for v in x {
        let t = v / r;
        base.push(t.floor().to_integer().to_i64().unwrap_or(0));
        free.push(!t.is_integer());
    }
    Face { base, free }
}

/// Boundary point on the ray from interior `p` through `x`.
pub fn radial_project(face: &Face, r: &Q, p: &[Q], x: &[Q]) -> Result<Vec<Q>> {
    if !face.interior(p, r) {
        return Err(Error::input("projection centre must be interior to the face"));
    }
    if !face.contains(x, r) {
        return Err(Error::input("point is not in the face"));
    }
    if x == p {
        return Err(Error::input("projection undefined at its centre"));
    }
    let (lo, hi) = (face.lo(r), face.hi(r));
    let mut t: Option<Q> = None;
    for i in 0..x.len() {
        if !face.free[i] {
            continue;
        }
        let v = &x[i] - &p[i];
        if v.is_zero() {
            continue;
        }
        let bound = if v.is_positive() { &hi[i] } else { &lo[i] };
        let ti = (bound - &p[i]) / v;
        if t.as_ref().is_none_or(|s| ti < *s) {
            t = Some(ti);
        }
    }
    let t = t.expect("x differs from p along a free axis");
    Ok(p.iter().zip(x).map(|(a, b)| a + (b - a) * &t).collect())
}

fn radical_inverse_q(mut k: u64, base: u64) -> Q {
    let mut out = Q::zero();
    let mut denom = Q::from_integer(base.into());
    while k > 0 {
        out += Q::from_integer((k % base).into()) / &denom;
        k /= base;
        denom *= Q::from_integer(base.into());
    }
    out
}

/// Face centre followed by exact Halton points in the face interior.
pub fn candidate_points(face: &Face, r: &Q, count: usize) -> Vec<Vec<Q>> {
    let lo = face.lo(r);
    let mut out = vec![face.center(r)];
    for k in 1..=count as u64 {
        let mut axis = 0;
        let p: Vec<Q> = (0..lo.len())
            .map(|i| {
                if face.free[i] {
                    let h = radical_inverse_q(k, crate::cone::PRIMES[axis % crate::cone::PRIMES.len()]);
                    axis += 1;
                    &lo[i] + r * h
                } else {
                    lo[i].clone()
                }
            })
            .collect();
        if face.interior(&p, r) {
            out.push(p);
        }
    }
    out
}

/// Greedy `HC_e` estimate: enclosing balls of nearest-neighbour groups, inflated by nominal radii.
/// Zero-radius points are free. The search runs in `f64`; the chosen balls are then rebuilt exactly
/// and any point they miss gets a ball of its own, so the returned list always covers.
pub fn greedy_estimate(pts: &[WPoint], e: f64) -> (f64, Vec<Ball>) {
    let live: Vec<&WPoint> = pts.iter().filter(|p| p.rho.is_positive()).collect();
    if live.is_empty() {
        return (0.0, vec![]);
    }
    let xs: Vec<Vec<f64>> = live.iter().map(|p| p.x.iter().map(q_f64).collect()).collect();
    let rs: Vec<f64> = live.iter().map(|p| q_f64(&p.rho)).collect();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    // (group, radius, members)
    let mut cands: Vec<(Vec<usize>, f64, Vec<usize>)> = Vec::new();
    for i in 0..live.len() {
        let mut order: Vec<usize> = (0..live.len()).collect();
        let d: Vec<f64> = xs.iter().map(|x| dist(&xs[i], x)).collect();
        // `i` leads its own groups even when other points coincide with it
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then((a != i).cmp(&(b != i))).then(a.cmp(&b)));
        let mut lo = xs[i].clone();
        let mut hi = xs[i].clone();
        let mut rho: f64 = 0.0;
        for k in 1..=order.len().min(16) {
            let g = order[k - 1];
            for (a, &x) in xs[g].iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
            rho = rho.max(rs[g]);
            let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
            let radius = lo.iter().zip(&hi).map(|(a, b)| (b - a) / 2.0).fold(0.0, f64::max) + rho;
            let mem: Vec<usize> =
                (0..live.len()).filter(|&j| num::le_tol(dist(&center, &xs[j]) + rs[j], radius)).collect();
            cands.push((order[..k].to_vec(), radius, mem));
        }
    }
    let mut covered = vec![false; live.len()];
    let mut left = live.len();
    let mut chosen = Vec::new();
    let mut total = 0.0;
    while left > 0 {
        let mut best: Option<(f64, usize)> = None;
        for (k, (_, r, mem)) in cands.iter().enumerate() {
            let fresh = mem.iter().filter(|&&j| !covered[j]).count();
            if fresh == 0 {
                continue;
            }
            let ratio = r.powf(e) / fresh as f64;
            if best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, k));
            }
        }
        let (_, k) = best.expect("each point has its own candidate");
        for &j in &cands[k].2 {
            if !covered[j] {
                covered[j] = true;
                left -= 1;
            }
        }
        total += cands[k].1.powf(e);
        chosen.push(k);
    }
    let mut balls: Vec<Ball> = chosen
        .iter()
        .map(|&k| {
            let group = &cands[k].0;
            let b = min_enclosing_ball_linf(&group.iter().map(|&g| live[g].x.clone()).collect::<Vec<_>>())
                .expect("non-empty group");
            let rho = group.iter().map(|&g| live[g].rho.clone()).max().unwrap();
            Ball::new(b.center, b.radius + rho)
        })
        .collect();
    for (j, p) in live.iter().enumerate() {
        if !balls.iter().any(|b| linf(&b.center, &p.x) + &p.rho <= b.radius) {
            balls.push(Ball::new(p.x.clone(), p.rho.clone()));
            total += rs[j].powf(e);
        }
    }
    (total, balls)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointChoice {
    #[serde(with = "num::qvec")]
    pub p: Vec<Q>,
    pub before: f64,
    pub after: f64,
    /// `after / before`, or 1 when nothing carries content.
    pub ratio: f64,
    pub ceiling: f64,
    pub candidates_tried: usize,
}

fn project_all(face: &Face, r: &Q, p: &[Q], v: &[WPoint]) -> Result<Vec<(WPoint, Q)>> {
    v.iter()
        .map(|w| {
            let y = radial_project(face, r, p, &w.x)?;
            let stretch = if w.x == y {
                qi(1)
            } else {
                num::q_max(&(linf(p, &y) / linf(p, &w.x)), &qi(1))
            };
            Ok((WPoint { x: y, rho: &w.rho * &stretch }, stretch))
        })
        .collect()
}

/// Chooses the pushout centre for one face, minimising the greedy estimate of the projected set.
pub fn average_point(face: &Face, r: &Q, v: &[WPoint], m: &Exponent, k: &PushoutConstants) -> Result<PointChoice> {
    let e = m.f64() - 1.0;
    let (before, _) = greedy_estimate(v, e);
    let limit = k.c0(face.dim()) * q_f64(r).powf(e);
    if !num::le_tol(before, limit) {
        return Err(Error::PushoutPrecondition(format!(
            "face {:?}: estimate {before} exceeds c0·R^(m-1) = {limit}",
            face.base
        )));
    }
    let mut best: Option<(f64, Vec<Q>)> = None;
    let mut tried = 0;
    for c in candidate_points(face, r, k.candidates) {
        if v.iter().any(|w| w.x == c) {
            continue;
        }
        tried += 1;
        let (after, _) = greedy_estimate(&project_all(face, r, &c, v)?.into_iter().map(|x| x.0).collect::<Vec<_>>(), e);
        if best.as_ref().is_none_or(|(b, _)| after < *b) {
            best = Some((after, c));
        }
    }
    let (after, p) = best.ok_or_else(|| Error::input("every candidate centre lies in the set"))?;
    Ok(PointChoice {
        p,
        before,
        after,
        ratio: if before > 0.0 { after / before } else { 1.0 },
        ceiling: k.ceiling(face.dim()),
        candidates_tried: tried,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceStep {
    pub face: Face,
    pub points: usize,
    pub choice: PointChoice,
    pub trace_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub k: usize,
    pub faces: Vec<FaceStep>,
    pub moved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationTrace {
    pub n: usize,
    pub m: Exponent,
    #[serde(with = "num::qser")]
    pub grid_r: Q,
    pub target_dim: i64,
    pub input_estimate: f64,
    pub levels: Vec<LevelTrace>,
    pub final_points: Vec<WPoint>,
    pub displacement: Vec<f64>,
    pub max_displacement: f64,
    /// (a) points already on a lower face never move at that level.
    pub boundary_fixed: bool,
    /// every move stays inside the point's carrier face.
    pub within_faces: bool,
    /// (b) final points lie in the target skeleton.
    pub skeleton_ok: bool,
    /// (c) displacement ≤ const(n)·R.
    pub displacement_bound: f64,
    pub displacement_ok: bool,
    /// (d) trace estimate ≤ const(n)·R·(estimate + δ).
    pub trace_content: f64,
    pub trace_bound: f64,
    pub trace_ok: bool,
    pub measured_trace_const: f64,
}

impl DeformationTrace {
    pub fn all_hold(&self) -> bool {
        self.boundary_fixed && self.within_faces && self.skeleton_ok && self.displacement_ok && self.trace_ok
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.levels.iter().flat_map(|l| l.faces.iter().map(|f| f.choice.ratio)).collect()
    }
}

/// `R = c₂(n)·hc^{1/(m−1)} + δ`.
pub fn grid_r_for_content(hc: f64, m: &Exponent, n: usize, delta: &Q, k: &PushoutConstants) -> Q {
    let e = m.f64() - 1.0;
    let base = if hc > 0.0 { k.c2(n) * hc.powf(1.0 / e) } else { 0.0 };
    num::q_from_f64(base) + delta
}

/// Pushes every point down to the `(⌈m⌉−2)`-skeleton of `Q(R)`, face by face.
pub fn skeleton_descend(v: &[WPoint], n: usize, r: &Q, m: &Exponent, delta: &Q, k: &PushoutConstants) -> Result<DeformationTrace> {
    if m.q() <= &qi(1) {
        return Err(Error::input("pushout needs m > 1"));
    }
    if !r.is_positive() {
        return Err(Error::input("grid size must be positive"));
    }
    if v.iter().any(|w| w.x.len() != n) {
        return Err(Error::input("point of the wrong dimension"));
    }
    let target = m.ceil() - 2;
    let e = m.f64() - 1.0;
    let (input_estimate, _) = greedy_estimate(v, e);
    let mut cur: Vec<WPoint> = v.to_vec();
    let mut disp = vec![0.0f64; v.len()];
    let mut levels = Vec::new();
    let mut boundary_fixed = true;
    let mut within_faces = true;
    let mut trace = 0.0;
    let mut level = n as i64;
    while level > target {
        let kd = level as usize;
        let mut groups: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
        for (i, w) in cur.iter().enumerate() {
            let f = carrier(&w.x, r);
            if f.dim() == kd {
                groups.entry(f).or_default().push(i);
            }
        }
        let mut faces = Vec::new();
        let mut moved = 0;
        let before = cur.clone();
        for (face, idx) in groups {
            let pts: Vec<WPoint> = idx.iter().map(|&i| cur[i].clone()).collect();
            let choice = average_point(&face, r, &pts, m, k)?;
            let proj = project_all(&face, r, &choice.p, &pts)?;
            let (_, cover) = greedy_estimate(&pts, e);
            let trace_cost = face_trace(&cover, &choice.p, m)?;
            trace += trace_cost;
            for (&i, (w, _)) in idx.iter().zip(proj) {
                within_faces &= face.contains(&w.x, r);
                disp[i] += q_f64(&linf(&cur[i].x, &w.x));
                cur[i] = w;
                moved += 1;
            }
            faces.push(FaceStep { face, points: idx.len(), choice, trace_cost });
        }
        for (i, w) in before.iter().enumerate() {
            if carrier(&w.x, r).dim() < kd && cur[i] != *w {
                boundary_fixed = false;
            }
        }
        levels.push(LevelTrace { k: kd, faces, moved });
        level -= 1;
    }
    let skeleton_ok = cur.iter().all(|w| carrier(&w.x, r).dim() as i64 <= target.max(0));
    let rf = q_f64(r);
    let const_n = k.ceiling(n);
    let max_displacement = disp.iter().cloned().fold(0.0, f64::max);
    let delta_f = q_f64(delta);
    let trace_bound = const_n * rf * (input_estimate + delta_f);
    Ok(DeformationTrace {
        n,
        m: m.clone(),
        grid_r: r.clone(),
        target_dim: target,
        input_estimate,
        levels,
        final_points: cur,
        displacement: disp,
        max_displacement,
        boundary_fixed,
        within_faces,
        skeleton_ok,
        displacement_bound: const_n * rf,
        displacement_ok: num::le_tol(max_displacement, const_n * rf),
        trace_content: trace,
        trace_bound,
        trace_ok: num::le_tol(trace, trace_bound),
        measured_trace_const: if rf * (input_estimate + delta_f) > 0.0 { trace / (rf * (input_estimate + delta_f)) } else { 0.0 },
    })
}

/// Content of the sweep from a face's points to its boundary, via the cone over their cover.
fn face_trace(cover: &[Ball], apex: &[Q], m: &Exponent) -> Result<f64> {
    let live: Vec<Ball> = cover.iter().filter(|b| b.radius.is_positive()).cloned().collect();
    if live.is_empty() {
        return Ok(0.0);
    }
    let reach = live
        .iter()
        .map(|b| linf(&b.center, apex) + &b.radius)
        .max()
        .unwrap();
    Ok(cone_covering(&live, apex, &reach, m, ConeVariant::Improved)?.cost.f64())
}

/// Smallest `R = 2ʲ·R₀` (j ≥ 0) for which every face precondition holds.
pub fn descend_admissible(v: &[WPoint], n: usize, m: &Exponent, delta: &Q, k: &PushoutConstants) -> Result<(DeformationTrace, u32)> {
    let (hc, _) = greedy_estimate(v, m.f64() - 1.0);
    let mut r = grid_r_for_content(hc, m, n, delta, k);
    for j in 0..64 {
        match skeleton_descend(v, n, &r, m, delta, k) {
            Ok(t) => return Ok((t, j)),
            Err(Error::PushoutPrecondition(_)) => r *= qi(2),
            Err(e) => return Err(e),
        }
    }
    Err(Error::PushoutPrecondition("no admissible grid size found".into()))
}
