//! Finite models of metric spaces, balls and elementary ℓ∞ geometry.
//!
//! A voxel cell `c ∈ ℤⁿ` is the closed box `[c·δ, (c+1)·δ]`. Grid balls are
//! axis cubes of `side` cells with integer corners, so their radius is
//! `side·δ/2` and their center sits on the half-integer lattice.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, q, qi, tau, Q};

pub type Cell = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelSpace {
    n: usize,
    delta: Q,
    cells: BTreeSet<Cell>,
}

impl VoxelSpace {
    pub fn new(n: usize, delta: Q, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        if !delta.is_positive() {
            return Err(Error::input("delta must be positive"));
        }
        let cells: BTreeSet<Cell> = cells.into_iter().collect();
        if let Some(c) = cells.iter().find(|c| c.len() != n) {
            return Err(Error::input(format!(
                "cell {c:?} has dimension {} but n = {n}",
                c.len()
            )));
        }
        Ok(VoxelSpace { n, delta, cells })
    }

    /// Full box `[0, sides[0]) × … ` of cells.
    pub fn full_box(delta: Q, sides: &[i64]) -> Self {
        let mut cells = vec![Vec::new()];
        for &s in sides {
            let mut next = Vec::with_capacity(cells.len() * s as usize);
            for c in &cells {
                for i in 0..s {
                    let mut d = c.clone();
                    d.push(i);
                    next.push(d);
                }
            }
            cells = next;
        }
        VoxelSpace::new(sides.len(), delta, cells).expect("well-formed box")
    }

    /// Unit cube `[0,1]ⁿ` at resolution `1/k`.
    pub fn unit_cube(n: usize, k: i64) -> Self {
        Self::full_box(q(1, k), &vec![k; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> &Q {
        &self.delta
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &[i64]) -> bool {
        self.cells.contains(c)
    }

    /// Same ambient model, different cell set.
    pub fn with_cells(&self, cells: impl IntoIterator<Item = Cell>) -> VoxelSpace {
        VoxelSpace {
            n: self.n,
            delta: self.delta.clone(),
            cells: cells.into_iter().collect(),
        }
    }

    pub fn union(&self, o: &VoxelSpace) -> VoxelSpace {
        self.with_cells(self.cells.union(&o.cells).cloned())
    }

    pub fn difference(&self, o: &VoxelSpace) -> VoxelSpace {
        self.with_cells(self.cells.difference(&o.cells).cloned())
    }

    pub fn is_subset(&self, o: &VoxelSpace) -> bool {
        self.cells.is_subset(&o.cells)
    }

    pub fn translate(&self, by: &[i64]) -> VoxelSpace {
        self.with_cells(
            self.cells
                .iter()
                .map(|c| c.iter().zip(by).map(|(a, b)| a + b).collect()),
        )
    }

    /// Scales the set by an integer factor at fixed δ (each cell becomes a λⁿ block).
    pub fn scale(&self, lambda: i64) -> VoxelSpace {
        assert!(lambda >= 1);
        let block = VoxelSpace::full_box(self.delta.clone(), &vec![lambda; self.n]);
        let mut out = BTreeSet::new();
        for c in &self.cells {
            for b in block.cells() {
                out.insert(c.iter().zip(b).map(|(x, y)| x * lambda + y).collect());
            }
        }
        self.with_cells(out)
    }

    /// Inclusive bounding box of the cell indices.
    pub fn bbox(&self) -> Option<(Cell, Cell)> {
        let first = self.cells.iter().next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for c in &self.cells {
            for i in 0..self.n {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        Some((lo, hi))
    }

    /// Largest bounding-box side, in cells.
    pub fn max_extent(&self) -> i64 {
        self.bbox()
            .map(|(lo, hi)| (0..self.n).map(|i| hi[i] - lo[i] + 1).max().unwrap_or(0))
            .unwrap_or(0)
    }

    /// ℓ∞ diameter of the union of the closed cells.
    pub fn diameter(&self) -> Q {
        qi(self.max_extent()) * &self.delta
    }

    pub fn cell_center(&self, c: &[i64]) -> Vec<Q> {
        c.iter()
            .map(|&x| (qi(x) + q(1, 2)) * &self.delta)
            .collect()
    }

    pub fn cell_lo(&self, c: &[i64]) -> Vec<Q> {
        c.iter().map(|&x| qi(x) * &self.delta).collect()
    }

    pub fn cell_hi(&self, c: &[i64]) -> Vec<Q> {
        c.iter().map(|&x| qi(x + 1) * &self.delta).collect()
    }

    /// Cells with an unoccupied face neighbour.
    pub fn boundary_cells(&self) -> VoxelSpace {
        let mut out = Vec::new();
        for c in &self.cells {
            let mut inner = true;
            'axes: for i in 0..self.n {
                for s in [-1, 1] {
                    let mut d = c.clone();
                    d[i] += s;
                    if !self.cells.contains(&d) {
                        inner = false;
                        break 'axes;
                    }
                }
            }
            if !inner {
                out.push(c.clone());
            }
        }
        self.with_cells(out)
    }

    /// Connected components under face adjacency, in lexicographic order.
    pub fn components(&self) -> Vec<VoxelSpace> {
        let mut seen: BTreeSet<Cell> = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.cells {
            if seen.contains(c) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![c.clone()];
            seen.insert(c.clone());
            while let Some(x) = stack.pop() {
                for i in 0..self.n {
                    for s in [-1, 1] {
                        let mut y = x.clone();
                        y[i] += s;
                        if self.cells.contains(&y) && seen.insert(y.clone()) {
                            stack.push(y);
                        }
                    }
                }
                comp.push(x);
            }
            out.push(self.with_cells(comp));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Linf,
    L2,
    L1,
    Matrix,
}

pub fn metric_distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    let it = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    match metric {
        Metric::Linf => it.fold(0.0, f64::max),
        Metric::L1 => it.sum(),
        Metric::L2 | Metric::Matrix => it.map(|d| d * d).sum::<f64>().sqrt(),
    }
}

/// A finite ε-net with an explicit metric.
#[derive(Debug, Clone, PartialEq)]
pub struct NetSpace {
    points: Vec<Vec<f64>>,
    metric: Metric,
    matrix: Option<Vec<Vec<f64>>>,
    eps_net: f64,
}

impl NetSpace {
    pub fn from_points(points: Vec<Vec<f64>>, metric: Metric, eps_net: f64) -> Result<Self> {
        if metric == Metric::Matrix {
            return Err(Error::input("matrix metric needs an explicit matrix"));
        }
        if eps_net < 0.0 || !eps_net.is_finite() {
            return Err(Error::input("eps_net must be a finite non-negative number"));
        }
        if let Some(p) = points.first() {
            if points.iter().any(|q| q.len() != p.len()) {
                return Err(Error::input("points have mixed dimensions"));
            }
        }
        Ok(NetSpace {
            points,
            metric,
            matrix: None,
            eps_net,
        })
    }

    /// Validates symmetry, zero diagonal and the triangle inequality.
    pub fn from_matrix(matrix: Vec<Vec<f64>>, eps_net: f64) -> Result<Self> {
        validate_matrix(&matrix)?;
        if eps_net < 0.0 || !eps_net.is_finite() {
            return Err(Error::input("eps_net must be a finite non-negative number"));
        }
        let n = matrix.len();
        Ok(NetSpace {
            points: (0..n).map(|i| vec![i as f64]).collect(),
            metric: Metric::Matrix,
            matrix: Some(matrix),
            eps_net,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn eps_net(&self) -> f64 {
        self.eps_net
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn matrix(&self) -> Option<&Vec<Vec<f64>>> {
        self.matrix.as_ref()
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.len() || j >= self.len() {
            return Err(Error::input(format!("unknown point id {}", i.max(j))));
        }
        Ok(match &self.matrix {
            Some(m) => m[i][j],
            None => metric_distance(self.metric, &self.points[i], &self.points[j]),
        })
    }

    /// Ids within distance `r` of `center` (closed ball, tolerance τ).
    pub fn ball_members(&self, center: usize, r: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            if self.distance(center, j)? <= r + tau() * r.abs().max(1.0) {
                out.push(j);
            }
        }
        Ok(out)
    }
}

pub fn validate_matrix(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::input("distance matrix is not square"));
    }
    for i in 0..n {
        if m[i][i].abs() > tau() {
            return Err(Error::input(format!("non-zero diagonal at {i}")));
        }
        for j in 0..n {
            if !m[i][j].is_finite() || m[i][j] < 0.0 {
                return Err(Error::input(format!("invalid entry at ({i},{j})")));
            }
            if (m[i][j] - m[j][i]).abs() > tau() * m[i][j].abs().max(1.0) {
                return Err(Error::input(format!("asymmetric entry at ({i},{j})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if m[i][k] > m[i][j] + m[j][k] + tau() * m[i][k].max(1.0) {
                    return Err(Error::input(format!(
                        "triangle inequality fails for ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Voxel(VoxelSpace),
    Net(NetSpace),
}

/// A point in either model.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Exact(Vec<Q>),
    Id(usize),
    Coords(Vec<f64>),
}

impl Space {
    pub fn distance(&self, p: &Point, q: &Point) -> Result<num::Val> {
        match (self, p, q) {
            (Space::Voxel(v), Point::Exact(a), Point::Exact(b)) => {
                if a.len() != v.n() || b.len() != v.n() {
                    return Err(Error::input("dimension mismatch"));
                }
                Ok(num::Val::Exact(linf(a, b)))
            }
            (Space::Net(s), Point::Id(i), Point::Id(j)) => Ok(num::Val::Approx(s.distance(*i, *j)?)),
            (Space::Net(s), Point::Coords(a), Point::Coords(b)) => {
                if a.len() != b.len() {
                    return Err(Error::input("dimension mismatch"));
                }
                if s.metric() == Metric::Matrix {
                    return Err(Error::input("matrix metric takes point ids"));
                }
                Ok(num::Val::Approx(metric_distance(s.metric(), a, b)))
            }
            _ => Err(Error::input("point kind does not match the space model")),
        }
    }
}

pub fn linf(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Q::zero)
}

/// A closed ℓ∞ ball with exact center and radius.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ball {
    #[serde(with = "num::qvec")]
    pub center: Vec<Q>,
    #[serde(with = "num::qser")]
    pub radius: Q,
}

impl Ball {
    pub fn new(center: Vec<Q>, radius: Q) -> Self {
        Ball { center, radius }
    }

    pub fn contains_point(&self, x: &[Q]) -> bool {
        linf(&self.center, x) <= self.radius
    }

    /// The closed box of cell `c` lies inside the ball.
    pub fn contains_cell(&self, s: &VoxelSpace, c: &[i64]) -> bool {
        let d = s.delta();
        let half = d / qi(2);
        c.iter().zip(&self.center).all(|(&ci, x)| {
            let mid = (qi(ci) * d) + &half;
            (mid - x).abs() + &half <= self.radius
        })
    }

    pub fn intersects(&self, o: &Ball) -> bool {
        linf(&self.center, &o.center) <= &self.radius + &o.radius
    }

    /// Lower and upper corners.
    pub fn lo(&self) -> Vec<Q> {
        self.center.iter().map(|c| c - &self.radius).collect()
    }

    pub fn hi(&self) -> Vec<Q> {
        self.center.iter().map(|c| c + &self.radius).collect()
    }
}

/// Grid-aligned cube: cells `corner .. corner + side` in every axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridBall {
    pub corner: Cell,
    pub side: u64,
}

impl GridBall {
    pub fn new(corner: Cell, side: u64) -> Self {
        assert!(side >= 1, "grid balls have side at least one cell");
        GridBall { corner, side }
    }

    pub fn radius(&self, delta: &Q) -> Q {
        qi(self.side as i64) * delta / qi(2)
    }

    pub fn center(&self, delta: &Q) -> Vec<Q> {
        let h = q(self.side as i64, 2);
        self.corner
            .iter()
            .map(|&a| (qi(a) + &h) * delta)
            .collect()
    }

    pub fn to_ball(&self, delta: &Q) -> Ball {
        Ball::new(self.center(delta), self.radius(delta))
    }

    pub fn contains_cell(&self, c: &[i64]) -> bool {
        let s = self.side as i64;
        c.iter()
            .zip(&self.corner)
            .all(|(&x, &a)| x >= a && x < a + s)
    }

    pub fn upper(&self) -> Cell {
        self.corner.iter().map(|a| a + self.side as i64 - 1).collect()
    }

    /// Occupied cells of `s` inside the cube.
    pub fn members(&self, s: &VoxelSpace) -> Vec<Cell> {
        let vol = (self.side as f64).powi(s.n() as i32);
        if vol <= s.len() as f64 {
            let mut out = Vec::new();
            let block = VoxelSpace::full_box(s.delta().clone(), &vec![self.side as i64; s.n()]);
            for b in block.cells() {
                let c: Cell = b.iter().zip(&self.corner).map(|(x, a)| x + a).collect();
                if s.contains(&c) {
                    out.push(c);
                }
            }
            out.sort();
            out
        } else {
            s.cells()
                .iter()
                .filter(|c| self.contains_cell(c))
                .cloned()
                .collect()
        }
    }
}

/// Chebyshev ball: center is the bounding-box midpoint, radius half the largest side.
pub fn min_enclosing_ball_linf(points: &[Vec<Q>]) -> Result<Ball> {
    let first = points
        .first()
        .ok_or_else(|| Error::input("min_enclosing_ball of an empty set"))?;
    let n = first.len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::input("dimension mismatch"));
    }
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in points {
        for i in 0..n {
            if p[i] < lo[i] {
                lo[i] = p[i].clone();
            }
            if p[i] > hi[i] {
                hi[i] = p[i].clone();
            }
        }
    }
    let center: Vec<Q> = (0..n).map(|i| (&lo[i] + &hi[i]) / qi(2)).collect();
    let radius = (0..n)
        .map(|i| (&hi[i] - &lo[i]) / qi(2))
        .max()
        .unwrap_or_else(Q::zero);
    Ok(Ball::new(center, radius))
}

/// Cells whose center lies in the closed ball.
pub fn ball_members(b: &Ball, s: &VoxelSpace) -> VoxelSpace {
    s.with_cells(
        s.cells()
            .iter()
            .filter(|c| b.contains_point(&s.cell_center(c)))
            .cloned(),
    )
}

/// Cells within ℓ∞ distance ρ of an occupied cell, with ρ rounded up to whole cells.
pub fn neighborhood(s: &Space, rho: &Q) -> Result<Space> {
    let v = match s {
        Space::Voxel(v) => v,
        Space::Net(_) => return Err(Error::input("neighborhoods exist only in the voxel model")),
    };
    Ok(Space::Voxel(voxel_neighborhood(v, rho)?))
}

pub fn voxel_neighborhood(v: &VoxelSpace, rho: &Q) -> Result<VoxelSpace> {
    if rho.is_negative() {
        return Err(Error::input("neighborhood radius must be non-negative"));
    }
    let k = num::q_ceil_i64(&(rho / v.delta()));
    if k == 0 {
        return Ok(v.clone());
    }
    let block = VoxelSpace::full_box(v.delta().clone(), &vec![2 * k + 1; v.n()]);
    let mut out = BTreeSet::new();
    for c in v.cells() {
        for b in block.cells() {
            out.insert(c.iter().zip(b).map(|(x, y)| x + y - k).collect::<Cell>());
        }
    }
    Ok(v.with_cells(out))
}
