use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::content::{exact_content, BallFamily, ContentResult};
use crate::error::{Error, Result};
use crate::num::{self, qi, Exponent, Val, Q};
use crate::space::{Cell, VoxelSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub name: String,
    pub lhs: Val,
    pub rhs: Val,
    pub holds: bool,
}

impl Link {
    fn new(name: &str, lhs: Val, rhs: Val) -> Link {
        let holds = lhs.le(&rhs);
        Link { name: name.into(), lhs, rhs, holds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LwReport {
    pub n: usize,
    pub cells: usize,
    pub boundary_cells: usize,
    /// Cell counts of the boundary's coordinate projections.
    pub projections: Vec<usize>,
    /// Cells in the intersection of the projection cylinders.
    pub cylinder: usize,
    pub inside_cylinder: bool,
    pub lw_lhs: String,
    pub lw_rhs: String,
    pub lw_holds: bool,
    pub lw_strict: bool,
    #[serde(with = "num::qser")]
    pub r: Q,
    pub content: ContentResult,
    pub boundary_content: ContentResult,
    pub chain: Vec<Link>,
    /// `HC_n(Ω) ≤ HC_{n−1}(∂Ω)^{n/(n−1)}`, checked with the sound ends of both brackets.
    pub isoperimetric: Link,
}

fn drop_axis(c: &[i64], j: usize) -> Cell {
    let mut d = c.to_vec();
    d.remove(j);
    d
}

pub fn loomis_whitney_check(omega: &VoxelSpace, budget: u64) -> Result<LwReport> {
    if omega.is_empty() {
        return Err(Error::input("empty set"));
    }
    let n = omega.n();
    if n < 2 {
        return Err(Error::input("the check needs n ≥ 2"));
    }
    let bd = omega.boundary_cells();
    let shadows: Vec<BTreeSet<Cell>> = (0..n)
        .map(|j| bd.cells().iter().map(|c| drop_axis(c, j)).collect())
        .collect();
    let (lo, hi) = bd.bbox().expect("non-empty");
    let mut cylinder = BTreeSet::new();
    for u in &shadows[0] {
        for x0 in lo[0]..=hi[0] {
            let mut c = vec![x0];
            c.extend_from_slice(u);
            if (1..n).all(|j| shadows[j].contains(&drop_axis(&c, j))) {
                cylinder.insert(c);
            }
        }
    }
    let inside = omega.cells().is_subset(&cylinder);
    let big_n = BigUint::from(cylinder.len());
    let lhs = num_traits::pow(big_n, n - 1);
    let rhs = shadows.iter().fold(BigUint::from(1u32), |a, s| a * BigUint::from(s.len()));
    let r = omega.delta() / qi(2);

    let mn = Exponent::int(n as u32);
    let mb = Exponent::int(n as u32 - 1);
    let content = exact_content(omega, &mn, &BallFamily::AllGrid, budget)?;
    let boundary_content = exact_content(&bd, &mb, &BallFamily::AllGrid, budget)?;
    let rn = Val::Exact(num::q_pow(&r, n as u32));
    let prod: Q = shadows.iter().fold(qi(1), |a, s| a * qi(s.len() as i64));
    let cyl_cost = Val::Exact(qi(cylinder.len() as i64)).mul(&rn);
    let shadow_cost = Val::Exact(prod).pow_ratio(1, n as u32 - 1).mul(&rn);
    let power = qi(n as i64) / qi(n as i64 - 1);
    let iso_rhs = boundary_content.value_lower.pow_q(&power);
    let mut chain = vec![
        Link::new("content ≤ cylinder cells·rⁿ", content.value_upper.clone(), cyl_cost.clone()),
        Link::new("cylinder ≤ projection product", cyl_cost, shadow_cost.clone()),
        Link::new("projection product ≤ boundary content power", shadow_cost, iso_rhs.clone()),
    ];
    for (j, s) in shadows.iter().enumerate() {
        chain.push(Link::new(
            &format!("projection {j} ≤ boundary content"),
            Val::Exact(qi(s.len() as i64) * num::q_pow(&r, n as u32 - 1)),
            boundary_content.value_lower.clone(),
        ));
    }
    let isoperimetric = Link::new("isoperimetric", content.value_upper.clone(), iso_rhs);
    Ok(LwReport {
        n,
        cells: omega.len(),
        boundary_cells: bd.len(),
        projections: shadows.iter().map(|s| s.len()).collect(),
        cylinder: cylinder.len(),
        inside_cylinder: inside,
        lw_lhs: lhs.to_string(),
        lw_rhs: rhs.to_string(),
        lw_holds: lhs <= rhs,
        lw_strict: lhs < rhs,
        r,
        content,
        boundary_content,
        chain,
        isoperimetric,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeReport {
    pub n: usize,
    #[serde(with = "num::qser")]
    pub side: Q,
    pub cells_per_side: i64,
    pub content: ContentResult,
    pub shell_content: ContentResult,
    /// `(side/2)ⁿ`.
    pub expected: Val,
    pub content_exact: bool,
    pub shell_at_least_face: bool,
    /// `HC_{n−1}(∂)^{n/(n−1)}` bracket contains `HC_n`.
    pub equality: bool,
}

/// Cube of the given side at `k` cells per side: content vs. boundary shell.
pub fn cube_equality_check(n: usize, side: &Q, k: i64, budget: u64) -> Result<CubeReport> {
    if n < 2 || k < 1 {
        return Err(Error::input("need n ≥ 2 and k ≥ 1"));
    }
    let cube = VoxelSpace::full_box(side / qi(k), &vec![k; n]);
    let shell = cube.boundary_cells();
    let content = exact_content(&cube, &Exponent::int(n as u32), &BallFamily::AllGrid, budget)?;
    let shell_content = exact_content(&shell, &Exponent::int(n as u32 - 1), &BallFamily::AllGrid, budget)?;
    let half = side / qi(2);
    let expected = Val::Exact(num::q_pow(&half, n as u32));
    let face = Val::Exact(num::q_pow(&half, n as u32 - 1));
    let power = qi(n as i64) / qi(n as i64 - 1);
    let lo = shell_content.value_lower.pow_q(&power);
    let hi = shell_content.value_upper.pow_q(&power);
    let content_exact = content.value_lower.eq_tol(&expected) && content.value_upper.eq_tol(&expected);
    Ok(CubeReport {
        n,
        side: side.clone(),
        cells_per_side: k,
        shell_at_least_face: face.le(&shell_content.value_upper) && face.le(&shell_content.value_lower),
        equality: lo.le(&expected) && expected.le(&hi),
        content_exact,
        expected,
        content,
        shell_content,
    })
}
