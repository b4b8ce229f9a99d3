use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hcontent::content::{exact_content, greedy_content, verify_witness, volume_lower_bound, BallFamily};
use hcontent::decomposition::{check_decomposition, decompose_report, DecomposeOptions};
use hcontent::io::parse_voxel;
use hcontent::lw::loomis_whitney_check;
use hcontent::num::{qi, Exponent};
use hcontent::pushout::{descend_admissible, WPoint};
use hcontent::space::VoxelSpace;
use hcontent::width::{verify_width, width_bound, NerveMode};
use hcontent::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{read, Outcome};
use crate::config::RunConfig;
use crate::Suite;

/// Cell counts above which the slower checks are skipped.
const EXACT_CELLS: usize = 256;
const DECOMPOSE_CELLS: usize = 5000;
const PUSHOUT_CELLS: usize = 400;

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    /// `None` when skipped.
    pass: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize)]
struct Row {
    fixture: String,
    n: usize,
    cells: usize,
    checks: Vec<Check>,
    alpha: Option<f64>,
    c_measured: Vec<f64>,
    pushout_ratios: Vec<f64>,
    error: Option<String>,
}

impl Row {
    fn check(&mut self, name: &str, pass: bool) {
        self.checks.push(Check { name: name.into(), pass: Some(pass) });
    }

    fn skip(&mut self, name: &str) {
        self.checks.push(Check { name: name.into(), pass: None });
    }

    fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass != Some(false))
    }
}

/// Sorted `*.json` files of `dir`, each parsed; the first unreadable one aborts with its name.
fn load(dir: &Path) -> Result<Vec<(String, VoxelSpace)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::input(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let v = parse_voxel(&read(&p)?).map_err(|e| Error::input(format!("fixture {}: {e}", p.display())))?;
            Ok((name, v))
        })
        .collect()
}

fn invariants(row: &mut Row, s: &VoxelSpace, cfg: &RunConfig) -> Result<()> {
    let n = s.n() as u32;
    for k in (n.saturating_sub(1).max(1))..=n {
        let m = Exponent::int(k);
        let r = if s.len() <= EXACT_CELLS {
            exact_content(s, &m, &BallFamily::AllGrid, cfg.budget)?
        } else {
            greedy_content(s, &m, &BallFamily::AllGrid)?
        };
        row.check(&format!("witness m={k}"), verify_witness(s, &r));
        row.check(&format!("bracket m={k}"), r.value_lower.le(&r.value_upper));
        row.check(&format!("volume m={k}"), volume_lower_bound(s, &m).le(&r.value_upper));
    }
    if n >= 2 {
        let lw = loomis_whitney_check(s, cfg.budget)?;
        row.check("loomis-whitney", lw.lw_holds && lw.inside_cylinder);
        row.check("isoperimetric", lw.isoperimetric.holds && lw.chain.iter().all(|l| l.holds));
    }
    Ok(())
}

fn width(row: &mut Row, s: &VoxelSpace, cfg: &RunConfig) -> Result<()> {
    for m in [1u32, 2] {
        let w = width_bound(s, m, cfg.width_budget, NerveMode::ClosedCells, cfg.seed)?;
        let rc = verify_width(s, &w);
        row.check(&format!("width m={m}"), rc.all_hold() && w.bound <= w.diameter);
        row.c_measured.push(w.c_measured.0);
    }
    Ok(())
}

fn decompose(row: &mut Row, s: &VoxelSpace, cfg: &RunConfig) -> Result<()> {
    if s.len() > DECOMPOSE_CELLS {
        row.skip("decomposition");
        return Ok(());
    }
    let opts = DecomposeOptions { eps_rel: cfg.schedule.eps_rel, budget: cfg.budget, ..Default::default() };
    let d = decompose_report(s, &Exponent::int(2), &opts)?;
    let rc = check_decomposition(s, &d, cfg.budget)?;
    row.check("decomposition", d.all_hold() && rc.all_hold());
    row.alpha = Some(d.alpha);
    Ok(())
}

fn pushout(row: &mut Row, s: &VoxelSpace, cfg: &RunConfig) -> Result<()> {
    if s.len() > PUSHOUT_CELLS {
        row.skip("pushout");
        return Ok(());
    }
    let rho = s.delta() / qi(2);
    let pts: Vec<WPoint> = s.cells().iter().map(|c| WPoint { x: s.cell_center(c), rho: rho.clone() }).collect();
    let (t, _) = descend_admissible(&pts, s.n(), &Exponent::int(2), s.delta(), &cfg.pushout.constants())?;
    row.check("pushout", t.all_hold());
    row.pushout_ratios = t.ratios();
    Ok(())
}

fn run_one(name: &str, s: &VoxelSpace, suite: Suite, cfg: &RunConfig) -> Row {
    let mut row = Row { fixture: name.into(), n: s.n(), cells: s.len(), ..Default::default() };
    let all = suite == Suite::All;
    let steps: [(Suite, fn(&mut Row, &VoxelSpace, &RunConfig) -> Result<()>); 4] = [
        (Suite::Invariants, invariants),
        (Suite::Width, width),
        (Suite::Decompose, decompose),
        (Suite::Pushout, pushout),
    ];
    for (which, f) in steps {
        if all || suite == which {
            if let Err(e) = f(&mut row, s, cfg) {
                row.error = Some(e.to_string());
                break;
            }
        }
    }
    row
}

fn stats(xs: &[f64]) -> Value {
    if xs.is_empty() {
        return Value::Null;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    json!({"count": v.len(), "min": v[0], "median": v[v.len() / 2], "mean": mean, "max": v[v.len() - 1]})
}

fn table(rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.fixture.len()).max().unwrap_or(7).max(7);
    let mut out = format!("{:<width$}  {:>6}  {:>4}  {:>4}  {:>4}  verdict\n", "fixture", "cells", "pass", "fail", "skip");
    for r in rows {
        let count = |want: Option<bool>| r.checks.iter().filter(|c| c.pass == want).count();
        let verdict = match (&r.error, r.pass()) {
            (Some(e), _) => format!("ERROR {e}"),
            (None, true) => "PASS".into(),
            (None, false) => {
                let bad: Vec<&str> = r.checks.iter().filter(|c| c.pass == Some(false)).map(|c| c.name.as_str()).collect();
                format!("FAIL {}", bad.join(", "))
            }
        };
        out.push_str(&format!(
            "{:<width$}  {:>6}  {:>4}  {:>4}  {:>4}  {verdict}\n",
            r.fixture,
            r.cells,
            count(Some(true)),
            count(Some(false)),
            count(None)
        ));
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    out.push_str(&format!("{} fixtures, {} passed, {failed} failed\n", rows.len(), rows.len() - failed));
    out
}

/// Runs the suite on every fixture in parallel; rows keep filename order.
pub fn run(dir: &Path, suite: Suite, cfg: &RunConfig) -> Result<Outcome> {
    let fixtures = load(dir)?;
    let slots: Vec<Mutex<Option<Row>>> = fixtures.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(fixtures.len()).max(1);
    std::thread::scope(|sc| {
        for _ in 0..workers {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((name, s)) = fixtures.get(i) else { break };
                *slots[i].lock().unwrap() = Some(run_one(name, s, suite, cfg));
            });
        }
    });
    let rows: Vec<Row> = slots.into_iter().map(|m| m.into_inner().unwrap().expect("every slot filled")).collect();
    let alphas: Vec<f64> = rows.iter().filter_map(|r| r.alpha).collect();
    let ratios: Vec<f64> = rows.iter().flat_map(|r| r.pushout_ratios.iter().copied()).collect();
    let cs: Vec<f64> = rows.iter().flat_map(|r| r.c_measured.iter().copied()).collect();
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass()).map(|r| r.fixture.clone()).collect();
    let result = json!({
        "suite": format!("{suite:?}").to_lowercase(),
        "fixtures": rows.len(),
        "rows": rows,
        "alpha": stats(&alphas),
        "pushout_ratio": stats(&ratios),
        "c_measured": stats(&cs),
    });
    let text = table(&rows);
    let mut o = Outcome::failed(failed, result);
    o.ok = o.failed.is_empty();
    o.table = Some(text);
    Ok(o)
}
