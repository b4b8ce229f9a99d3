//! JSON file formats for spaces, point sets and ball lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, parse_q, Q};
use crate::pushout::WPoint;
use crate::space::{Ball, Cell, Metric, NetSpace, Space, VoxelSpace};

pub const SCHEMA: &str = "hcontent/1";

/// Half-open block of cells `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Block {
    fn cells(&self) -> Result<Vec<Cell>> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::input("block corners differ in dimension"));
        }
        let mut out = vec![Vec::new()];
        for (&a, &b) in self.lo.iter().zip(&self.hi) {
            if b - a > 1 << 16 {
                return Err(Error::input("block too large"));
            }
            out = out
                .into_iter()
                .flat_map(|c| {
                    (a..b).map(move |x| {
                        let mut d = c.clone();
                        d.push(x);
                        d
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceFile {
    Voxel {
        #[serde(default)]
        schema: Option<String>,
        n: usize,
        delta: String,
        #[serde(default)]
        cells: Vec<Cell>,
        #[serde(default)]
        blocks: Vec<Block>,
        #[serde(default)]
        minus: Vec<Block>,
    },
    Net {
        #[serde(default)]
        schema: Option<String>,
        metric: Metric,
        #[serde(default)]
        eps_net: f64,
        #[serde(default)]
        points: Vec<Vec<f64>>,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
    },
}

fn check_schema(s: &Option<String>) -> Result<()> {
    match s {
        Some(v) if v != SCHEMA => Err(Error::input(format!("unsupported schema {v}"))),
        _ => Ok(()),
    }
}

impl SpaceFile {
    pub fn into_space(self) -> Result<Space> {
        match self {
            SpaceFile::Voxel { schema, n, delta, cells, blocks, minus } => {
                check_schema(&schema)?;
                let delta = parse_q(&delta).map_err(|e| Error::input(format!("delta: {e}")))?;
                let mut all: std::collections::BTreeSet<Cell> = cells.into_iter().collect();
                for b in &blocks {
                    all.extend(b.cells()?);
                }
                for b in &minus {
                    for c in b.cells()? {
                        all.remove(&c);
                    }
                }
                Ok(Space::Voxel(VoxelSpace::new(n, delta, all)?))
            }
            SpaceFile::Net { schema, metric, eps_net, points, matrix } => {
                check_schema(&schema)?;
                Ok(Space::Net(match matrix {
                    Some(m) => NetSpace::from_matrix(m, eps_net)?,
                    None => NetSpace::from_points(points, metric, eps_net)?,
                }))
            }
        }
    }

    pub fn from_voxel(v: &VoxelSpace) -> SpaceFile {
        SpaceFile::Voxel {
            schema: Some(SCHEMA.into()),
            n: v.n(),
            delta: num::q_str(v.delta()),
            cells: v.cells().iter().cloned().collect(),
            blocks: vec![],
            minus: vec![],
        }
    }
}

/// Accepts `"variant"` as a synonym of the `"kind"` tag.
pub fn parse_space(text: &str) -> Result<Space> {
    let bad = |e: serde_json::Error| Error::input(format!("space file: {e}"));
    let mut v: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
    if let Some(obj) = v.as_object_mut() {
        if !obj.contains_key("kind") {
            if let Some(t) = obj.remove("variant") {
                obj.insert("kind".into(), t);
            }
        }
    }
    let f: SpaceFile = serde_json::from_value(v).map_err(bad)?;
    f.into_space()
}

pub fn parse_voxel(text: &str) -> Result<VoxelSpace> {
    match parse_space(text)? {
        Space::Voxel(v) => Ok(v),
        Space::Net(_) => Err(Error::input("expected a voxel space")),
    }
}

pub fn voxel_json(v: &VoxelSpace) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_voxel(v)).expect("serialisable")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub n: usize,
    pub points: Vec<WPoint>,
}

pub fn parse_points(text: &str) -> Result<PointsFile> {
    let f: PointsFile = serde_json::from_str(text).map_err(|e| Error::input(format!("points file: {e}")))?;
    check_schema(&f.schema)?;
    if f.points.iter().any(|p| p.x.len() != f.n) {
        return Err(Error::input("point of the wrong dimension"));
    }
    if f.points.iter().any(|p| p.rho < Q::from_integer(0.into())) {
        return Err(Error::input("negative nominal radius"));
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallsFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub balls: Vec<Ball>,
}

pub fn parse_balls(text: &str) -> Result<Vec<Ball>> {
    let f: BallsFile = serde_json::from_str(text).map_err(|e| Error::input(format!("balls file: {e}")))?;
    check_schema(&f.schema)?;
    Ok(f.balls)
}
