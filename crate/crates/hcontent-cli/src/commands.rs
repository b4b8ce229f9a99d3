use std::path::Path;

use hcontent::coarea::{best_slice, coarea_integral, slice_profile, SliceFn};
use hcontent::cone::{cone_coverage_check, cone_covering, ConeVariant};
use hcontent::content::{exact_content, greedy_content, net_content, verify_witness, volume_lower_bound, BallFamily};
use hcontent::decomposition::{check_decomposition, decompose_report, Constants, DecomposeOptions};
use hcontent::improve::{fill, FillOptions, SequenceOptions};
use hcontent::io::{parse_balls, parse_points, parse_space};
use hcontent::lw::{cube_equality_check, loomis_whitney_check};
use hcontent::num::{parse_q, qi, Exponent, Q};
use hcontent::pushout::{descend_admissible, skeleton_descend, DeformationTrace};
use hcontent::space::{Ball, Space, VoxelSpace};
use hcontent::width::{local_width_check, verify_width, width_bound, NerveMode};
use hcontent::{Error, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{Command, FamilyArg, ModeArg, VariantArg};

/// What a subcommand produced: the report body, failed checks and optional plot/table text.
pub struct Outcome {
    pub ok: bool,
    pub failed: Vec<String>,
    pub result: Value,
    pub plot: Option<String>,
    pub table: Option<String>,
}

impl Outcome {
    pub fn new(checks: &[(&str, bool)], result: Value) -> Self {
        let failed: Vec<String> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.to_string()).collect();
        Outcome { ok: failed.is_empty(), failed, result, plot: None, table: None }
    }

    pub fn failed(failed: Vec<String>, result: Value) -> Self {
        Outcome { ok: false, failed, result, plot: None, table: None }
    }

    fn with_plot(mut self, csv: String) -> Self {
        self.plot = Some(csv);
        self
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<Space> {
    parse_space(&read(path)?).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn load_voxel(path: &Path) -> Result<VoxelSpace> {
    match load_space(path)? {
        Space::Voxel(v) => Ok(v),
        Space::Net(_) => Err(Error::input(format!("{}: expected a voxel space", path.display()))),
    }
}

fn load_balls(path: &Path) -> Result<Vec<Ball>> {
    parse_balls(&read(path)?).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn exponent(s: &str) -> Result<Exponent> {
    Exponent::parse(s).map_err(|e| Error::input(format!("--m: {e}")))
}

fn rational(flag: &str, s: &str) -> Result<Q> {
    parse_q(s.trim()).map_err(|e| Error::input(format!("{flag}: {e}")))
}

pub fn point(flag: &str, s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|x| rational(flag, x)).collect()
}

fn int_cell(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| Error::input(format!("--f: cell `{s}`: {e}"))))
        .collect()
}

pub fn slice_fn(s: &str) -> Result<SliceFn> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| Error::input("--f: expected kind:value"))?;
    match kind {
        "dist" => Ok(SliceFn::DistToPoint { point: point("--f", rest)? }),
        "set" => Ok(SliceFn::DistToSet { cells: rest.split(';').map(int_cell).collect::<Result<_>>()? }),
        "file" => serde_json::from_str(&read(Path::new(rest))?).map_err(|e| Error::input(format!("{rest}: {e}"))),
        _ => Err(Error::input(format!("--f: unknown kind `{kind}`"))),
    }
}

fn range(s: &str) -> Result<(Q, Q)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::input("--range: expected lo:hi"))?;
    Ok((rational("--range", a)?, rational("--range", b)?))
}

fn nerve_mode(m: ModeArg) -> NerveMode {
    match m {
        ModeArg::ClosedCells => NerveMode::ClosedCells,
        ModeArg::CellCenters => NerveMode::CellCenters,
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialises")
}

fn paper_constants(m: &Exponent, a: Option<f64>) -> Result<Option<Constants>> {
    match a {
        None => Ok(None),
        Some(a) if a > 0.0 => Ok(Some(Constants::with_a(m.f64(), a, Constants::paper(m.f64())?.i1))),
        Some(a) => Err(Error::input(format!("--a must be positive, got {a}"))),
    }
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    let budget = |b: &Option<u64>| b.unwrap_or(cfg.budget);
    match cmd {
        Command::Content { space, m, family, balls, exact, budget: b } => {
            content(load_space(space)?, &exponent(m)?, *family, balls.as_deref(), *exact, budget(b))
        }
        Command::Coarea { space, f, cover, m, range: r } => {
            let u = load_voxel(space)?;
            let m = exponent(m)?;
            let cover = match cover {
                Some(p) => load_balls(p)?,
                None => greedy_content(&u, &m, &BallFamily::AllGrid)?.witness,
            };
            let r = r.as_deref().map(range).transpose()?;
            coarea(&u, &slice_fn(f)?, &cover, &m, r)
        }
        Command::Cone { cover, apex, big_r, m, variant, samples } => {
            let input = load_balls(cover)?;
            let p = point("--apex", apex)?;
            let big_r = rational("--R", big_r)?;
            let variant = match variant {
                VariantArg::Standard => ConeVariant::Standard,
                VariantArg::Improved => ConeVariant::Improved,
            };
            let cert = cone_covering(&input, &p, &big_r, &exponent(m)?, variant)?;
            let cov = cone_coverage_check(&cert, samples.unwrap_or(cfg.samples));
            let mut csv = String::from("input,step,radius\n");
            for b in &cert.output {
                csv.push_str(&format!("{},{},{}\n", b.input, b.step, hcontent::num::q_str(&b.ball.radius)));
            }
            let checks = [("cost-bound", cert.within_bound), ("segment-counts", cert.counts_ok), ("coverage", cov.misses == 0)];
            Ok(Outcome::new(&checks, json!({"certificate": cert, "coverage": cov})).with_plot(csv))
        }
        Command::Decompose { space, m, eps, a, budget: b } => {
            let y = load_voxel(space)?;
            let m = exponent(m)?;
            let opts = DecomposeOptions {
                eps: *eps,
                eps_rel: cfg.schedule.eps_rel,
                budget: budget(b),
                constants: paper_constants(&m, *a)?,
            };
            let d = decompose_report(&y, &m, &opts)?;
            let rc = check_decomposition(&y, &d, opts.budget)?;
            let mut checks: Vec<(&str, bool)> = d.inequalities.iter().map(|i| (i.name.as_str(), i.holds)).collect();
            checks.extend(rc.inequalities.iter().map(|i| (i.name.as_str(), i.holds)));
            checks.extend([
                ("disjoint", d.disjoint),
                ("tripled-cover", d.tripled_cover),
                ("alpha-range", d.alpha_in_range),
                ("additivity", d.additivity),
                ("coarea", d.coarea_ok),
                ("recheck", rc.all_hold()),
            ]);
            let mut csv = String::from("j,r_p,r_bar,theta,eta1\n");
            for (j, b) in d.balls.iter().enumerate() {
                csv.push_str(&format!("{j},{},{},{},{}\n", b.r_p, b.r_bar, b.theta, b.eta1));
            }
            Ok(Outcome::new(&checks, json!({"decomposition": d, "recheck": rc})).with_plot(csv))
        }
        Command::Fill { space, m, a, max_steps, budget: b } => {
            let y = load_voxel(space)?;
            let m = exponent(m)?;
            let opts = FillOptions {
                sequence: SequenceOptions {
                    eps: None,
                    eps0: None,
                    eps_rel: cfg.schedule.eps_rel,
                    eps0_rel: cfg.schedule.eps0_rel,
                    max_steps: max_steps.unwrap_or(cfg.schedule.max_steps),
                    budget: budget(b),
                    constants: paper_constants(&m, *a)?,
                },
                pushout: cfg.pushout.constants(),
            };
            let cert = fill(&y, &m, &opts)?;
            let checks = [
                ("cost-bound", cert.cost_ok),
                ("radius-bound", cert.radius_ok),
                ("sequence", cert.sequence.all_hold()),
                ("pushout", cert.pushout.all_hold()),
                ("totals", cert.sums_match()),
            ];
            let csv = cert.sequence.csv();
            Ok(Outcome::new(&checks, to_json(&cert)).with_plot(csv))
        }
        Command::Pushout { points, grid_r, m, n, delta } => {
            let pf = parse_points(&read(points)?).map_err(|e| Error::input(format!("{}: {e}", points.display())))?;
            let n = n.unwrap_or(pf.n);
            if n != pf.n {
                return Err(Error::input(format!("--n {n} but the points live in dimension {}", pf.n)));
            }
            let m = exponent(m)?;
            let delta = match delta {
                Some(d) => rational("--delta", d)?,
                None => {
                    let top = pf.points.iter().map(|p| p.rho.clone()).max().unwrap_or_else(|| qi(0));
                    if top > qi(0) {
                        top * qi(2)
                    } else {
                        qi(1)
                    }
                }
            };
            if delta <= qi(0) {
                return Err(Error::input("--delta must be positive"));
            }
            let k = cfg.pushout.constants();
            let (trace, doublings) = match grid_r {
                Some(r) => (skeleton_descend(&pf.points, n, &rational("--grid-R", r)?, &m, &delta, &k)?, 0),
                None => descend_admissible(&pf.points, n, &m, &delta, &k)?,
            };
            Ok(pushout_outcome(trace, doublings))
        }
        Command::LwCheck { space, budget: b } => {
            let r = loomis_whitney_check(&load_voxel(space)?, budget(b))?;
            let mut checks = vec![
                ("loomis-whitney", r.lw_holds),
                ("inside-cylinder", r.inside_cylinder),
                ("isoperimetric", r.isoperimetric.holds),
            ];
            checks.extend(r.chain.iter().map(|l| (l.name.as_str(), l.holds)));
            Ok(Outcome::new(&checks, to_json(&r)))
        }
        Command::CubeEq { n, side, k, budget: b } => {
            let r = cube_equality_check(*n, &rational("--side", side)?, *k, budget(b))?;
            let checks = [
                ("content-exact", r.content_exact),
                ("shell-at-least-face", r.shell_at_least_face),
                ("equality", r.equality),
            ];
            Ok(Outcome::new(&checks, to_json(&r)))
        }
        Command::Width { space, m, budget: b, mode } => {
            let s = load_voxel(space)?;
            let w = width_bound(&s, *m, b.unwrap_or(cfg.width_budget), nerve_mode(*mode), cfg.seed)?;
            let rc = verify_width(&s, &w);
            let checks = [
                ("covers", rc.covers),
                ("nerve-dimension", rc.dimension_ok),
                ("fiber", rc.fiber_ok),
                ("below-diameter", w.bound <= w.diameter),
            ];
            Ok(Outcome::new(&checks, json!({"width": w, "recheck": rc})))
        }
        Command::LocalWidth { space, m, r, budget: b, mode } => {
            let s = load_voxel(space)?;
            let r = rational("--R", r)?;
            let lw = local_width_check(&s, *m, &r, b.unwrap_or(cfg.width_budget), nerve_mode(*mode), cfg.seed)?;
            let rc = verify_width(&s, &lw.width);
            let checks = [("covers", rc.covers), ("nerve-dimension", rc.dimension_ok), ("fiber", rc.fiber_ok)];
            Ok(Outcome::new(&checks, json!({"local": lw, "recheck": rc})))
        }
        Command::Corpus { dir, suite } => crate::corpus::run(dir, *suite, cfg),
    }
}

fn content(space: Space, m: &Exponent, family: FamilyArg, balls: Option<&Path>, exact: bool, budget: u64) -> Result<Outcome> {
    let s = match space {
        Space::Voxel(v) => v,
        Space::Net(net) => {
            if family != FamilyArg::AllGrid {
                return Err(Error::input("nets only support the default family"));
            }
            let all: Vec<usize> = (0..net.len()).collect();
            let r = net_content(&net, &all, m, budget)?;
            let ok = r.value_lower <= r.value_upper;
            return Ok(Outcome::new(&[("bracket", ok)], to_json(&r)));
        }
    };
    let fam = match (family, balls) {
        (FamilyArg::AllGrid, None) => BallFamily::AllGrid,
        (FamilyArg::Centers, None) => BallFamily::centers_in(s.cells().iter().map(|c| s.cell_center(c)).collect()),
        (FamilyArg::Fixed, Some(p)) => BallFamily::fixed(load_balls(p)?),
        (FamilyArg::Fixed, None) => return Err(Error::input("--family fixed needs --balls")),
        (_, Some(_)) => return Err(Error::input("--balls only applies to --family fixed")),
    };
    let r = if exact { exact_content(&s, m, &fam, budget)? } else { greedy_content(&s, m, &fam)? };
    let vol = volume_lower_bound(&s, m);
    let checks = [
        ("witness-covers", verify_witness(&s, &r)),
        ("bracket", r.value_lower.le(&r.value_upper)),
        ("volume-bound", vol.le(&r.value_upper)),
    ];
    Ok(Outcome::new(&checks, json!({"content": r, "volume_bound": vol})))
}

fn coarea(u: &VoxelSpace, f: &SliceFn, cover: &[Ball], m: &Exponent, r: Option<(Q, Q)>) -> Result<Outcome> {
    let p = slice_profile(u, f, cover, r)?;
    let integral = coarea_integral(&p, m);
    let bound = p.bound(m);
    let choice = if p.r2 > p.r1 { Some(best_slice(&p, m)?) } else { None };
    let mut levels: Vec<Q> = vec![p.r1.clone(), p.r2.clone()];
    for b in p.balls.iter().filter(|b| !b.empty) {
        levels.extend([b.lo.clone(), b.hi.clone()]);
    }
    levels.retain(|x| *x >= p.r1 && *x <= p.r2);
    levels.sort();
    levels.dedup();
    let mut csv = String::from("level,slice_cost\n");
    for x in &levels {
        csv.push_str(&format!("{},{}\n", hcontent::num::q_str(x), p.step_at(x, m).f64()));
    }
    let checks = [
        ("spread", p.spread_ok()),
        ("integral-bound", integral.le(&bound)),
        ("slice-mean", choice.as_ref().is_none_or(|c| c.mean_ok)),
        ("slice-bound", choice.as_ref().is_none_or(|c| c.bound_ok)),
    ];
    let result = json!({"profile": p, "integral": integral, "bound": bound, "best": choice});
    Ok(Outcome::new(&checks, result).with_plot(csv))
}

pub fn pushout_outcome(trace: DeformationTrace, doublings: u32) -> Outcome {
    let checks = [
        ("boundary-fixed", trace.boundary_fixed),
        ("within-faces", trace.within_faces),
        ("skeleton", trace.skeleton_ok),
        ("displacement", trace.displacement_ok),
        ("trace", trace.trace_ok),
    ];
    let mut csv = String::from("level,face,points,ratio,trace_cost\n");
    for l in &trace.levels {
        for (i, f) in l.faces.iter().enumerate() {
            csv.push_str(&format!("{},{i},{},{},{}\n", l.k, f.points, f.choice.ratio, f.trace_cost));
        }
    }
    Outcome::new(&checks, json!({"trace": trace, "doublings": doublings})).with_plot(csv)
}
