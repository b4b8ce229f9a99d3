//! Content-reduction steps, their iteration, and the end-to-end filling certificate.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::cone::{cone_covering, ConeVariant};
use crate::content::{exact_content, merge_to_disjoint, BallFamily, QPoint};
use crate::decomposition::{decompose, Constants, DecomposeOptions, Decomposition, Tilde, YSet};
use crate::error::{Error, Result};
use crate::num::{self, q_f64, qi, Exponent, Q};
use crate::pushout::{descend_admissible, DeformationTrace, PushoutConstants, WPoint};
use crate::space::{linf, Ball, Cell, VoxelSpace};

/// An element of a [`YSet`]: a cell or an exact point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Elem {
    Cell(Cell),
    Point(QPoint),
}

impl Elem {
    pub fn position(&self, s: &VoxelSpace) -> Vec<Q> {
        match self {
            Elem::Cell(c) => s.cell_center(c),
            Elem::Point(p) => p.0.clone(),
        }
    }
}

pub fn elements(y: &YSet) -> Vec<Elem> {
    let mut out: Vec<Elem> = y.cells.cells().iter().cloned().map(Elem::Cell).collect();
    out.extend(y.points.iter().cloned().map(|p| Elem::Point(QPoint(p))));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YSnapshot {
    pub cells: Vec<Cell>,
    pub points: Vec<QPoint>,
}

impl From<&YSet> for YSnapshot {
    fn from(y: &YSet) -> Self {
        YSnapshot {
            cells: y.cells.cells().iter().cloned().collect(),
            points: y.points.iter().cloned().map(QPoint).collect(),
        }
    }
}

/// Filling of one boundary slice, one dimension down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceFilling {
    pub cells: usize,
    /// Fixed-cover `H̃C_{m−1}` of the slice.
    pub content: f64,
    /// `merge` when `m − 1 ≤ 1` (disjoint balls), `cone` otherwise.
    pub method: String,
    pub cover: Vec<Ball>,
    /// `HC_m` majorant of the filling's image.
    pub image_cost: f64,
    /// `I₁(m)·content^{m/(m−1)}`.
    pub bound: f64,
    pub holds: bool,
}

fn fill_slice(slice: &[Ball], apex: &[Q], m: &Exponent, i1: f64) -> Result<SliceFilling> {
    let mf = m.f64();
    let e = m.minus_one().ok_or_else(|| Error::input("slice filling needs m > 1"))?;
    let content: f64 = slice.iter().map(|b| q_f64(&b.radius).powf(mf - 1.0)).sum();
    let bound = i1 * content.powf(mf / (mf - 1.0));
    if slice.is_empty() {
        return Ok(SliceFilling {
            cells: 0,
            content: 0.0,
            method: "empty".into(),
            cover: vec![],
            image_cost: 0.0,
            bound: 0.0,
            holds: true,
        });
    }
    let (method, cover, image_cost) = if e.q() <= &qi(1) {
        let merged = merge_to_disjoint(slice, &e)?;
        let cost = merged.iter().map(|b| q_f64(&b.radius).powf(mf)).sum();
        ("merge", merged, cost)
    } else {
        let reach = slice.iter().map(|b| linf(&b.center, apex) + &b.radius).max().unwrap();
        let c = cone_covering(slice, apex, &reach, m, ConeVariant::Improved)?;
        ("cone", slice.to_vec(), c.cost.f64())
    };
    Ok(SliceFilling {
        cells: 0,
        content,
        method: method.into(),
        cover,
        image_cost,
        bound,
        holds: num::le_tol(image_cost, bound),
    })
}

/// Cone over `Z_j` for one removed ball, with exponent `m + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeStep {
    #[serde(with = "num::qvec")]
    pub apex: Vec<Q>,
    pub big_r: f64,
    /// `Σ r^m` of the cover of `Z_j`.
    pub z_cost: f64,
    pub cost: f64,
    /// `e·m·R_j·z_cost`.
    pub bound: f64,
    pub holds: bool,
    pub balls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallStep {
    #[serde(with = "num::qvec")]
    pub center: Vec<Q>,
    pub r_bar: f64,
    pub inner_cells: usize,
    pub kept_slice_cells: usize,
    pub slice: SliceFilling,
    pub cone: ConeStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub m: f64,
    pub eps: f64,
    pub trivial: bool,
    pub alpha: f64,
    pub balls: Vec<BallStep>,
    /// `[lower, upper]` of `HC_m(Y)`.
    pub content_in: (f64, f64),
    pub content_out: (f64, f64),
    pub decay: f64,
    /// `content_out ≤ decay·content_in + ε`.
    pub decay_ok: bool,
    pub max_displacement: f64,
    /// `3A·HC_m(Y)^{1/m} + ε`.
    pub displacement_bound: f64,
    pub displacement_ok: bool,
    pub slices_ok: bool,
    pub cones_ok: bool,
    pub cone_cost: f64,
    pub max_r_bar: f64,
}

impl StepReport {
    pub fn all_hold(&self) -> bool {
        self.decay_ok && self.displacement_ok && self.slices_ok && self.cones_ok
    }
}

#[derive(Debug, Clone)]
pub struct Step {
    pub y_tilde: YSet,
    pub theta: BTreeMap<Elem, Elem>,
    pub report: StepReport,
    pub decomposition: Option<Decomposition>,
}

fn content_bracket(s: &VoxelSpace, m: &Exponent, budget: u64) -> Result<(f64, f64)> {
    if s.is_empty() {
        return Ok((0.0, 0.0));
    }
    let r = exact_content(s, m, &BallFamily::AllGrid, budget)?;
    Ok((r.value_lower.f64(), r.value_upper.f64()))
}

fn dedup_points(pts: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let set: BTreeSet<Vec<Q>> = pts.into_iter().collect();
    set.into_iter().collect()
}

/// One improvement: decompose, keep the outside and the boundary slices, send ball interiors to centres.
pub fn improvement_step(y: &YSet, m: &Exponent, opts: &DecomposeOptions) -> Result<Step> {
    let mf = m.f64();
    if mf <= 1.0 {
        return Err(Error::input("improvement needs m > 1"));
    }
    let k = match &opts.constants {
        Some(c) => c.clone(),
        None => Constants::paper(mf)?,
    };
    let content_in = content_bracket(&y.cells, m, opts.budget)?;
    if y.cells.is_empty() {
        let theta = elements(y).into_iter().map(|e| (e.clone(), e)).collect();
        let report = StepReport {
            m: mf,
            eps: opts.eps.unwrap_or(0.0),
            trivial: true,
            alpha: 1.0,
            balls: vec![],
            content_in,
            content_out: content_in,
            decay: k.decay,
            decay_ok: true,
            max_displacement: 0.0,
            displacement_bound: opts.eps.unwrap_or(0.0),
            displacement_ok: true,
            slices_ok: true,
            cones_ok: true,
            cone_cost: 0.0,
            max_r_bar: 0.0,
        };
        return Ok(Step { y_tilde: y.clone(), theta, report, decomposition: None });
    }
    let d = decompose(&y.cells, m, &DecomposeOptions { constants: Some(k.clone()), ..opts.clone() })?;
    let t = Tilde::new(&y.cells, d.q.clone(), opts.budget)?;
    let s = &y.cells;
    let fb = d.fballs();
    let outside: BTreeSet<Cell> = d.outside.iter().cloned().collect();

    let mut theta = BTreeMap::new();
    let mut kept: BTreeSet<Cell> = outside.clone();
    let mut points = Vec::new();
    let mut balls = Vec::new();
    let mut max_disp = 0.0f64;
    for (b, ball) in d.balls.iter().zip(&fb) {
        let slice: BTreeSet<Cell> = b.annulus.slice.iter().cloned().collect();
        let inner: Vec<Cell> = s
            .cells()
            .iter()
            .filter(|c| !outside.contains(*c) && ball.holds(&s.cell_center(c)))
            .cloned()
            .collect();
        let p = Elem::Point(QPoint(b.center.clone()));
        let mut kept_slice = 0;
        for c in &inner {
            if slice.contains(c) {
                kept.insert(c.clone());
                theta.insert(Elem::Cell(c.clone()), Elem::Cell(c.clone()));
                kept_slice += 1;
            } else {
                max_disp = max_disp.max(q_f64(&linf(&s.cell_center(c), &b.center)));
                theta.insert(Elem::Cell(c.clone()), p.clone());
            }
        }
        points.push(b.center.clone());

        let slice_idx = t.indices(&s.with_cells(slice.iter().cloned()));
        let slice_cover: Vec<Ball> = t.content(&slice_idx, mf - 1.0).chosen.iter().map(|&i| d.q[i].clone()).collect();
        let mut filling = fill_slice(&slice_cover, &b.center, m, k.i1)?;
        filling.cells = slice.len();

        let mut z: Vec<Ball> = b.inner_cover.clone();
        z.extend(filling.cover.iter().cloned());
        z.sort();
        z.dedup();
        let reach = z
            .iter()
            .map(|x| linf(&x.center, &b.center) + &x.radius)
            .max()
            .unwrap_or_else(|| Q::from_integer(0.into()));
        let big_r = num::q_max(&reach, &num::q_from_f64(b.r_bar));
        let z_cost: f64 = z.iter().map(|x| q_f64(&x.radius).powf(mf)).sum();
        let cone = if z.is_empty() {
            ConeStep { apex: b.center.clone(), big_r: q_f64(&big_r), z_cost, cost: 0.0, bound: 0.0, holds: true, balls: 0 }
        } else {
            let c = cone_covering(&z, &b.center, &big_r, &m.plus_one(), ConeVariant::Improved)?;
            let bound = E * mf * q_f64(&big_r) * z_cost;
            let cost = c.cost.f64();
            ConeStep {
                apex: b.center.clone(),
                big_r: q_f64(&big_r),
                z_cost,
                cost,
                bound,
                holds: num::le_tol(cost, bound),
                balls: c.output.len(),
            }
        };
        balls.push(BallStep {
            center: b.center.clone(),
            r_bar: b.r_bar,
            inner_cells: inner.len(),
            kept_slice_cells: kept_slice,
            slice: filling,
            cone,
        });
    }
    for c in &outside {
        theta.insert(Elem::Cell(c.clone()), Elem::Cell(c.clone()));
    }
    for x in &y.points {
        let e = Elem::Point(QPoint(x.clone()));
        match fb.iter().find(|b| b.holds(x)) {
            Some(b) => {
                max_disp = max_disp.max(q_f64(&linf(x, &b.center)));
                theta.insert(e, Elem::Point(QPoint(b.center.clone())));
            }
            None => {
                points.push(x.clone());
                theta.insert(e.clone(), e);
            }
        }
    }
    let y_tilde = YSet { cells: s.with_cells(kept), points: dedup_points(points) };
    let content_out = content_bracket(&y_tilde.cells, m, opts.budget)?;
    let hc_ref = content_in.1;
    let displacement_bound = 3.0 * k.a * hc_ref.powf(1.0 / mf) + d.eps;
    let report = StepReport {
        m: mf,
        eps: d.eps,
        trivial: false,
        alpha: d.alpha,
        decay: k.decay,
        decay_ok: num::le_tol(content_out.1, k.decay * content_in.0 + d.eps),
        max_displacement: max_disp,
        displacement_ok: num::le_tol(max_disp, displacement_bound),
        displacement_bound,
        slices_ok: balls.iter().all(|b| b.slice.holds),
        cones_ok: balls.iter().all(|b| b.cone.holds),
        cone_cost: balls.iter().map(|b| b.cone.cost).sum(),
        max_r_bar: balls.iter().map(|b| b.r_bar).fold(0.0, f64::max),
        content_in,
        content_out,
        balls,
    };
    if !report.all_hold() {
        return Err(Error::Verification {
            summary: "improvement step bounds violated".into(),
            report: Box::new(serde_json::to_value(&report).unwrap_or_default()),
        });
    }
    Ok(Step { y_tilde, theta, report, decomposition: Some(d) })
}

#[derive(Debug, Clone)]
pub struct SequenceOptions {
    /// Defaults to `eps_rel·HC_m(Y)`.
    pub eps: Option<f64>,
    /// Defaults to `eps0_rel·HC_m(Y)`.
    pub eps0: Option<f64>,
    pub eps_rel: f64,
    pub eps0_rel: f64,
    pub max_steps: usize,
    pub budget: u64,
    pub constants: Option<Constants>,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions { eps: None, eps0: None, eps_rel: 1e-3, eps0_rel: 1e-4, max_steps: 50, budget: 1_000_000, constants: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub k: usize,
    /// Upper end of `HC_m(Y_k)` before the step.
    pub content: f64,
    /// Largest cumulative distance `|y − Θ_k(y)|` after the step.
    pub displacement: f64,
    pub ratio: f64,
    pub eps_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub m: f64,
    pub constants: Constants,
    pub eps: f64,
    pub eps0: f64,
    pub initial: (f64, f64),
    pub rows: Vec<StepRow>,
    pub steps: Vec<StepReport>,
    pub final_content: (f64, f64),
    pub final_set: YSnapshot,
    /// `content_{k+1} ≤ decay·content_k + ε_k` for every step.
    pub decay_ok: bool,
    /// `content_k ≤ decay^{k−1}·HC(Y) + ε`.
    pub geometric_ok: bool,
    pub max_displacement: f64,
    /// `10m·12ᵐ·A·HC^{1/m} + ε`, the form used for verification.
    pub displacement_bound: f64,
    /// `I₂·HC + ε`, the alternative reading, reported only.
    pub displacement_bound_linear: f64,
    pub displacement_ok: bool,
    pub stopped_by_threshold: bool,
}

impl SequenceReport {
    pub fn all_hold(&self) -> bool {
        self.decay_ok && self.geometric_ok && self.displacement_ok && self.steps.iter().all(|s| s.all_hold())
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("k,content,displacement\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.k, r.content, r.displacement));
        }
        out
    }
}

pub struct Sequence {
    pub report: SequenceReport,
    pub final_set: YSet,
    /// Current image of every original element.
    pub track: BTreeMap<Elem, Elem>,
}

pub fn improvement_sequence(y: &VoxelSpace, m: &Exponent, opts: &SequenceOptions) -> Result<Sequence> {
    let mf = m.f64();
    let k = match &opts.constants {
        Some(c) => c.clone(),
        None => Constants::paper(mf)?,
    };
    if y.is_empty() {
        return Err(Error::input("improvement of an empty set"));
    }
    let initial = content_bracket(y, m, opts.budget)?;
    let hc = initial.1;
    let eps = opts.eps.unwrap_or(opts.eps_rel * hc);
    let eps0 = opts.eps0.unwrap_or(opts.eps0_rel * hc);
    let mut cur = YSet::from_cells(y.clone());
    let mut track: BTreeMap<Elem, Elem> = elements(&cur).into_iter().map(|e| (e.clone(), e)).collect();
    let origin: BTreeMap<Elem, Vec<Q>> = track.keys().map(|e| (e.clone(), e.position(y))).collect();
    let mut rows = Vec::new();
    let mut steps = Vec::new();
    let mut content = initial;
    let mut decay_ok = true;
    let mut geometric_ok = true;
    let mut stopped = false;
    for step in 1..=opts.max_steps {
        if cur.cells.is_empty() || content.1 < eps0 {
            stopped = true;
            break;
        }
        let eps_k = k.eps_k(eps, step as u32);
        let s = improvement_step(
            &cur,
            m,
            &DecomposeOptions { eps: Some(eps_k), eps_rel: opts.eps_rel, budget: opts.budget, constants: Some(k.clone()) },
        )?;
        for img in track.values_mut() {
            *img = s.theta.get(img).cloned().ok_or_else(|| Error::input("element map is not total"))?;
        }
        let disp = track
            .iter()
            .map(|(e, img)| q_f64(&linf(&origin[e], &img.position(y))))
            .fold(0.0, f64::max);
        let next = s.report.content_out;
        decay_ok &= num::le_tol(next.1, k.decay * content.0 + eps_k);
        geometric_ok &= num::le_tol(next.1, k.decay.powi(step as i32) * initial.0 + eps);
        rows.push(StepRow {
            k: step,
            content: content.1,
            displacement: disp,
            ratio: if content.1 > 0.0 { next.1 / content.1 } else { 0.0 },
            eps_k,
        });
        steps.push(s.report);
        cur = s.y_tilde;
        content = next;
    }
    if !stopped && (cur.cells.is_empty() || content.1 < eps0) {
        stopped = true;
    }
    let max_displacement = rows.last().map(|r| r.displacement).unwrap_or(0.0);
    let displacement_bound = 10.0 * mf * 12f64.powf(mf) * k.a * hc.powf(1.0 / mf) + eps;
    let report = SequenceReport {
        m: mf,
        eps,
        eps0,
        initial,
        rows,
        steps,
        final_content: content,
        final_set: YSnapshot::from(&cur),
        decay_ok,
        geometric_ok,
        max_displacement,
        displacement_ok: num::le_tol(max_displacement, displacement_bound),
        displacement_bound,
        displacement_bound_linear: k.i2 * hc + eps,
        stopped_by_threshold: stopped,
        constants: k,
    };
    Ok(Sequence { report, final_set: cur, track })
}

#[derive(Debug, Clone)]
pub struct FillOptions {
    pub sequence: SequenceOptions,
    pub pushout: PushoutConstants,
}

impl Default for FillOptions {
    fn default() -> Self {
        FillOptions { sequence: SequenceOptions::default(), pushout: PushoutConstants::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillingCertificate {
    pub schema: String,
    pub m: f64,
    pub n: usize,
    #[serde(with = "num::qser")]
    pub delta: Q,
    pub hc: (f64, f64),
    pub sequence: SequenceReport,
    /// Cone cost per step (sum over that step's balls).
    pub step_costs: Vec<f64>,
    /// Largest removed-ball radius per step.
    pub step_radii: Vec<f64>,
    pub pushout: DeformationTrace,
    pub pushout_doublings: u32,
    /// `Σ step_costs + pushout trace`.
    pub total_cost: f64,
    /// `Σ step_radii + pushout displacement`.
    pub filling_radius: f64,
    pub i1_next: f64,
    pub cost_bound: f64,
    pub cost_ok: bool,
    pub radius_bound: f64,
    pub radius_ok: bool,
    /// `total_cost / HC^{(m+1)/m}`.
    pub measured_cost_ratio: f64,
    /// `filling_radius / HC^{1/m}`.
    pub measured_radius_ratio: f64,
}

impl FillingCertificate {
    pub fn all_hold(&self) -> bool {
        self.cost_ok && self.radius_ok && self.sequence.all_hold() && self.pushout.all_hold()
    }

    pub fn sums_match(&self) -> bool {
        let s: f64 = self.step_costs.iter().sum::<f64>() + self.pushout.trace_content;
        let r: f64 = self.step_radii.iter().sum::<f64>() + self.pushout.max_displacement;
        s == self.total_cost && r == self.filling_radius
    }
}

/// Runs the improvement sequence, then pushes the residual onto a grid skeleton.
pub fn fill(y: &VoxelSpace, m: &Exponent, opts: &FillOptions) -> Result<FillingCertificate> {
    let seq = improvement_sequence(y, m, &opts.sequence)?;
    let rep = seq.report;
    let mf = m.f64();
    let half = y.delta() / qi(2);
    let mut v: Vec<WPoint> = seq
        .final_set
        .cells
        .cells()
        .iter()
        .map(|c| WPoint { x: y.cell_center(c), rho: half.clone() })
        .collect();
    v.extend(seq.final_set.points.iter().map(|p| WPoint { x: p.clone(), rho: Q::from_integer(0.into()) }));
    let (trace, doublings) = descend_admissible(&v, y.n(), &m.plus_one(), y.delta(), &opts.pushout)?;
    let step_costs: Vec<f64> = rep.steps.iter().map(|s| s.cone_cost).collect();
    let step_radii: Vec<f64> = rep.steps.iter().map(|s| s.max_r_bar).collect();
    let total_cost = step_costs.iter().sum::<f64>() + trace.trace_content;
    let filling_radius = step_radii.iter().sum::<f64>() + trace.max_displacement;
    let hc = rep.initial.1;
    let i1_next = (100.0 * (mf + 1.0)).powf(mf + 1.0);
    let cost_bound = i1_next * hc.powf((mf + 1.0) / mf) + rep.eps;
    let radius_bound = rep.constants.i2 * hc.powf(1.0 / mf) + q_f64(y.delta());
    let cert = FillingCertificate {
        schema: "hcontent/1".into(),
        m: mf,
        n: y.n(),
        delta: y.delta().clone(),
        hc: rep.initial,
        step_costs,
        step_radii,
        pushout_doublings: doublings,
        total_cost,
        filling_radius,
        i1_next,
        cost_ok: num::le_tol(total_cost, cost_bound),
        cost_bound,
        radius_ok: num::le_tol(filling_radius, radius_bound),
        radius_bound,
        measured_cost_ratio: if hc > 0.0 { total_cost / hc.powf((mf + 1.0) / mf) } else { 0.0 },
        measured_radius_ratio: if hc > 0.0 { filling_radius / hc.powf(1.0 / mf) } else { 0.0 },
        pushout: trace,
        sequence: rep,
    };
    if !cert.all_hold() {
        return Err(Error::Verification {
            summary: "filling certificate bounds violated".into(),
            report: Box::new(serde_json::to_value(&cert).unwrap_or_default()),
        });
    }
    Ok(cert)
}
