//! Coverings of cones over covered sets, and the discrete coning map.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, q_f64, qi, Exponent, Q, Val};
use crate::space::{linf, Ball, Cell, VoxelSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeVariant {
    /// Equal radii `(1+1/m)r` along each segment.
    Standard,
    /// Radii shrinking towards the apex.
    Improved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeBall {
    pub ball: Ball,
    pub input: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCertificate {
    #[serde(with = "num::qvec")]
    pub apex: Vec<Q>,
    #[serde(with = "num::qser")]
    pub big_r: Q,
    pub m: Exponent,
    pub variant: ConeVariant,
    pub input: Vec<Ball>,
    /// `Σ r_i^{m−1}` of the input.
    pub input_cost: Val,
    pub output: Vec<ConeBall>,
    pub cost: Val,
    pub bound: Val,
    pub within_bound: bool,
    /// `⌈mR/r_i⌉` respected for every input ball.
    pub counts_ok: bool,
}

impl ConeCertificate {
    pub fn balls(&self) -> Vec<Ball> {
        self.output.iter().map(|b| b.ball.clone()).collect()
    }
}

/// `m(1+1/m)ᵐ` for the standard variant, `2(1+1/m)ᵐ` for the improved one.
pub fn cone_factor(m: &Exponent, variant: ConeVariant) -> Val {
    let base = Val::Exact(qi(1) + qi(1) / m.q()).pow(m);
    match variant {
        ConeVariant::Standard => base.mul_q(m.q()),
        ConeVariant::Improved => base.mul_q(&qi(2)),
    }
}

/// Steps of length `r/m` from `q` towards `p`; returns (unit direction, step positions).
fn segment_steps(q: &[Q], p: &[Q], r: &Q, m: &Q) -> (Vec<Q>, Q, Vec<Q>) {
    let d = linf(q, p);
    if d.is_zero() {
        return (vec![Q::zero(); q.len()], d, vec![Q::zero()]);
    }
    let u: Vec<Q> = q.iter().zip(p).map(|(a, b)| (b - a) / &d).collect();
    let h = r / m;
    let count = num::q_ceil_i64(&(&d / &h)).max(1);
    let steps = (0..count).map(|j| &h * qi(j)).collect();
    (u, d, steps)
}

/// Radius that covers the cone over `B(q, r)` near step `j`, for points assigned to the nearest step.
fn shrunk_radius(steps: &[Q], j: usize, d: &Q, r: &Q) -> Q {
    if d.is_zero() {
        return r.clone();
    }
    let half = if steps.len() > 1 { (&steps[1] - &steps[0]) / qi(2) } else { d.clone() };
    let sj = &steps[j];
    let lo = if j == 0 { Q::zero() } else { sj - &half };
    let hi = if j + 1 == steps.len() { d.clone() } else { sj + &half };
    let at = |s: &Q| r * (qi(1) - s / d) + (s - sj).abs();
    num::q_max(&at(&lo), &at(&hi))
}

/// Covers `Cone_p(∪ B(q_i, r_i))` by balls centred on the segments `[q_i, p]`.
pub fn cone_covering(input: &[Ball], p: &[Q], big_r: &Q, m: &Exponent, variant: ConeVariant) -> Result<ConeCertificate> {
    if m.q() < &qi(1) {
        return Err(Error::input("cone dimension must be at least 1"));
    }
    let grow = qi(1) + qi(1) / m.q();
    let mut output = Vec::new();
    let mut counts_ok = true;
    for (i, b) in input.iter().enumerate() {
        if b.center.len() != p.len() {
            return Err(Error::input("cone input ball has the wrong dimension"));
        }
        if !b.radius.is_positive() {
            return Err(Error::input(format!("cone input ball {i} has zero radius")));
        }
        if linf(&b.center, p) + &b.radius > *big_r {
            return Err(Error::input(format!("cone input ball {i} is not inside B(p, R)")));
        }
        let (u, d, steps) = segment_steps(&b.center, p, &b.radius, m.q());
        let cap = num::q_ceil_i64(&(m.q() * big_r / &b.radius));
        counts_ok &= steps.len() as i64 <= cap;
        for (j, s) in steps.iter().enumerate() {
            let center: Vec<Q> = b.center.iter().zip(&u).map(|(c, e)| c + e * s).collect();
            let radius = match variant {
                ConeVariant::Standard => &grow * &b.radius,
                ConeVariant::Improved => num::q_min(&shrunk_radius(&steps, j, &d, &b.radius), &(&grow * &b.radius)),
            };
            output.push(ConeBall {
                ball: Ball::new(center, radius),
                input: i,
                step: j,
            });
        }
    }
    let m1 = m.q() - qi(1);
    let input_cost = Val::sum(
        input
            .iter()
            .map(|b| Val::Exact(b.radius.clone()).pow_q(&m1))
            .collect::<Vec<_>>()
            .iter(),
    );
    let cost = crate::content::cost_of(&output.iter().map(|b| b.ball.clone()).collect::<Vec<_>>(), m);
    let bound = cone_factor(m, variant).mul_q(big_r).mul(&input_cost);
    Ok(ConeCertificate {
        apex: p.to_vec(),
        big_r: big_r.clone(),
        m: m.clone(),
        variant,
        within_bound: cost.le(&bound),
        input: input.to_vec(),
        input_cost,
        output,
        cost,
        bound,
        counts_ok,
    })
}

/// Van der Corput radical inverse.
pub fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

pub const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub misses: usize,
    pub first_miss: Option<Vec<f64>>,
}

fn inside(b: &[(Vec<f64>, f64)], z: &[f64]) -> bool {
    b.iter().any(|(c, r)| {
        let d = c.iter().zip(z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        num::le_tol(d, *r)
    })
}

/// Samples points `t·x + (1−t)·p` with `x` in an input ball and checks they lie in an output ball.
pub fn cone_coverage_check(cert: &ConeCertificate, samples: usize) -> CoverageReport {
    let n = cert.apex.len();
    let p: Vec<f64> = cert.apex.iter().map(q_f64).collect();
    let per_input: Vec<Vec<(Vec<f64>, f64)>> = (0..cert.input.len())
        .map(|i| {
            cert.output
                .iter()
                .filter(|b| b.input == i)
                .map(|b| (b.ball.center.iter().map(q_f64).collect(), q_f64(&b.ball.radius)))
                .collect()
        })
        .collect();
    let all: Vec<(Vec<f64>, f64)> = per_input.iter().flatten().cloned().collect();
    let mut misses = 0;
    let mut first_miss = None;
    if cert.input.is_empty() {
        return CoverageReport { samples: 0, misses, first_miss };
    }
    for k in 0..samples {
        let i = k % cert.input.len();
        let b = &cert.input[i];
        let q: Vec<f64> = b.center.iter().map(q_f64).collect();
        let r = q_f64(&b.radius);
        let idx = (k / cert.input.len()) as u64;
        let (x, t): (Vec<f64>, f64) = match idx {
            0 => (q.clone(), 1.0),
            1 => (q.clone(), 0.0),
            _ => (
                (0..n)
                    .map(|a| q[a] + r * (2.0 * radical_inverse(idx, PRIMES[(a + 1) % PRIMES.len()]) - 1.0))
                    .collect(),
                radical_inverse(idx, 2),
            ),
        };
        let z: Vec<f64> = (0..n).map(|a| t * x[a] + (1.0 - t) * p[a]).collect();
        if !inside(&per_input[i], &z) && !inside(&all, &z) {
            misses += 1;
            first_miss.get_or_insert(z);
        }
    }
    CoverageReport { samples, misses, first_miss }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeImage {
    /// Exact image point of each cell centre, in cell order.
    pub points: Vec<(Cell, Vec<String>)>,
    pub cells: Vec<Cell>,
    #[serde(skip)]
    pub exact: Vec<Vec<Q>>,
}

/// All cells whose closed box contains `x`.
pub fn closed_hull(x: &[Q], delta: &Q) -> Vec<Cell> {
    let mut out: Vec<Cell> = vec![vec![]];
    for xi in x {
        let t = xi / delta;
        let f = t.floor().to_integer();
        let f = num_traits::ToPrimitive::to_i64(&f).unwrap_or(0);
        let choices: Vec<i64> = if t.is_integer() { vec![f - 1, f] } else { vec![f] };
        out = out
            .into_iter()
            .flat_map(|c| {
                choices.iter().map(move |&v| {
                    let mut d = c.clone();
                    d.push(v);
                    d
                })
            })
            .collect();
    }
    out
}

/// Image of the cell centres under `x ↦ φ(dist(x,Y))·x + (1−φ)·p`, `φ(t) = max(0, 1 − t/r)`.
pub fn cone_map_image(s: &VoxelSpace, y: &VoxelSpace, p: &[Q], r: &Q) -> Result<(ConeImage, VoxelSpace)> {
    if !r.is_positive() {
        return Err(Error::input("coning radius must be positive"));
    }
    if p.len() != s.n() || y.n() != s.n() {
        return Err(Error::input("dimension mismatch in cone map"));
    }
    let ycent: Vec<Vec<Q>> = y.cells().iter().map(|c| y.cell_center(c)).collect();
    let mut points = Vec::new();
    let mut exact = Vec::new();
    let mut cells = std::collections::BTreeSet::new();
    for c in s.cells() {
        let x = s.cell_center(c);
        let d = ycent.iter().map(|w| linf(&x, w)).min();
        let phi = match d {
            Some(d) if d < *r => qi(1) - d / r,
            _ => Q::zero(),
        };
        let z: Vec<Q> = x
            .iter()
            .zip(p)
            .map(|(a, b)| &phi * a + (qi(1) - &phi) * b)
            .collect();
        cells.extend(closed_hull(&z, s.delta()));
        points.push((c.clone(), z.iter().map(num::q_str).collect()));
        exact.push(z);
    }
    let img = VoxelSpace::new(s.n(), s.delta().clone(), cells.iter().cloned())?;
    Ok((
        ConeImage {
            points,
            cells: cells.into_iter().collect(),
            exact,
        },
        img,
    ))
}

/// True when every point lies in some ball, exactly.
pub fn points_covered(points: &[Vec<Q>], balls: &[Ball]) -> bool {
    points.iter().all(|z| balls.iter().any(|b| b.contains_point(z)))
}
