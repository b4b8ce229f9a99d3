mod common;

use std::collections::BTreeSet;

use hcontent::coarea::{best_slice, coarea_integral, slice_profile, SliceFn};
use hcontent::cone::{cone_coverage_check, cone_covering, ConeVariant};
use hcontent::content::{cost_of, exact_content, greedy_content, merge_to_disjoint, BallFamily};
use hcontent::lw::loomis_whitney_check;
use hcontent::num::{q, q_pow, qi, Exponent, Val, Q};
use hcontent::pushout::{carrier, radial_project, skeleton_descend, Face, PushoutConstants, WPoint};
use hcontent::space::{linf, validate_matrix, voxel_neighborhood, Ball, Cell, Metric, NetSpace, VoxelSpace};
use hcontent::width::{nerve, recheck_multiplicity, width_bound, NerveMode};
use proptest::prelude::*;

const BUDGET: u64 = 1_000_000;

fn cells2(side: i64, max: usize) -> impl Strategy<Value = Vec<Cell>> {
    prop::collection::btree_set((0..side, 0..side), 1..=max)
        .prop_map(|s| s.into_iter().map(|(a, b)| vec![a, b]).collect())
}

fn cells3(side: i64, max: usize) -> impl Strategy<Value = Vec<Cell>> {
    prop::collection::btree_set((0..side, 0..side, 0..side), 1..=max)
        .prop_map(|s| s.into_iter().map(|(a, b, c)| vec![a, b, c]).collect())
}

fn small_set() -> impl Strategy<Value = VoxelSpace> {
    prop_oneof![
        cells2(5, 8).prop_map(|c| VoxelSpace::new(2, q(1, 4), c).unwrap()),
        cells3(3, 6).prop_map(|c| VoxelSpace::new(3, q(1, 2), c).unwrap()),
    ]
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop::sample::select(vec!["1", "3/2", "2"]).prop_map(|s| Exponent::parse(s).unwrap())
}

fn hc(s: &VoxelSpace, m: &Exponent) -> Val {
    let r = exact_content(s, m, &BallFamily::AllGrid, BUDGET).unwrap();
    assert!(r.optimal, "small instance left a bracket");
    r.value_upper
}

fn level(v: &Val, w: &Val) -> bool {
    v.le(w)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn subadditive(a in cells2(5, 7), b in cells2(5, 7), m in exponent()) {
        let d = q(1, 4);
        let sa = VoxelSpace::new(2, d.clone(), a).unwrap();
        let sb = VoxelSpace::new(2, d, b).unwrap();
        let u = sa.union(&sb);
        prop_assert!(level(&hc(&u, &m), &hc(&sa, &m).add(&hc(&sb, &m))));
    }

    #[test]
    fn monotone(a in cells2(5, 7), b in cells2(5, 5), m in exponent()) {
        let d = q(1, 4);
        let sa = VoxelSpace::new(2, d.clone(), a).unwrap();
        let u = sa.union(&VoxelSpace::new(2, d, b).unwrap());
        prop_assert!(level(&hc(&sa, &m), &hc(&u, &m)));
    }

    #[test]
    fn rescaling(s in small_set(), lambda in 2i64..=3, k in 1u32..=2) {
        let m = Exponent::int(k);
        let base = hc(&s, &m);
        let factor = Val::Exact(q_pow(&qi(lambda), k));
        // coarser grid: the same cells at λδ form λ·s with the family rescaled alongside
        let stretched = VoxelSpace::new(s.n(), s.delta() * qi(lambda), s.cells().iter().cloned()).unwrap();
        prop_assert_eq!(hc(&stretched, &m), base.mul(&factor));
        // cell replication keeps δ, so the family only grows
        if s.len() <= 4 {
            let rep = exact_content(&s.scale(lambda), &m, &BallFamily::AllGrid, BUDGET).unwrap();
            prop_assert!(rep.value_lower.le(&base.mul(&factor)));
        }
    }

    #[test]
    fn radius_and_diameter_bounds(s in small_set(), m in exponent()) {
        let diam = s.diameter();
        let rad = &diam / qi(2);
        let v = hc(&s, &m);
        let rm = Val::Exact(rad).pow(&m);
        let dm = Val::Exact(diam).pow(&m);
        prop_assert!(v.le(&rm) && rm.le(&dm));
    }

    #[test]
    fn dimension_comparison(s in small_set()) {
        let pairs = [("1", "2"), ("1", "3/2"), ("3/2", "2")];
        for (k, m) in pairs {
            let (k, m) = (Exponent::parse(k).unwrap(), Exponent::parse(m).unwrap());
            let lhs = hc(&s, &k).f64().powf(1.0 / k.f64());
            let rhs = hc(&s, &m).f64().powf(1.0 / m.f64());
            prop_assert!(rhs <= lhs * (1.0 + 1e-9), "k={k} m={m}: {lhs} < {rhs}");
        }
    }

    #[test]
    fn restricted_families_cost_more(s in small_set(), m in exponent()) {
        let base = hc(&s, &m);
        let centers = BallFamily::centers_in(s.cells().iter().map(|c| s.cell_center(c)).collect());
        let w = exact_content(&s, &m, &centers, BUDGET).unwrap();
        prop_assert!(base.le(&w.value_lower));
        let mut fixed = greedy_content(&s, &m, &BallFamily::AllGrid).unwrap().witness;
        fixed.extend(s.cells().iter().map(|c| Ball::new(s.cell_center(c), s.delta() / qi(2))));
        let t = exact_content(&s, &m, &BallFamily::fixed(fixed), BUDGET).unwrap();
        prop_assert!(base.le(&t.value_lower));
    }

    #[test]
    fn neighborhoods_compose(cells in cells2(4, 5), a in 0i64..3, b in 0i64..3) {
        let d = q(1, 3);
        let s = VoxelSpace::new(2, d.clone(), cells).unwrap();
        let once = voxel_neighborhood(&s, &(qi(a + b) * &d)).unwrap();
        let twice = voxel_neighborhood(&voxel_neighborhood(&s, &(qi(a) * &d)).unwrap(), &(qi(b) * &d)).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn distance_matrices_validate(pts in prop::collection::vec((0i32..20, 0i32..20), 3..7)) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|(a, b)| vec![a as f64, b as f64]).collect();
        let net = NetSpace::from_points(pts.clone(), Metric::L2, 0.0).unwrap();
        let k = pts.len();
        let mut m: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| net.distance(i, j).unwrap()).collect()).collect();
        prop_assert!(validate_matrix(&m).is_ok());
        let detour = m[0][1] + m[1][2];
        m[0][2] = detour + 1.0;
        m[2][0] = detour + 1.0;
        prop_assert!(validate_matrix(&m).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn coarea_inequalities(cells in cells2(6, 14), px in 0i64..13, py in 0i64..13, use_set in any::<bool>()) {
        let d = q(1, 2);
        let u = VoxelSpace::new(2, d.clone(), cells.clone()).unwrap();
        let m = Exponent::int(2);
        let cover = greedy_content(&u, &m, &BallFamily::AllGrid).unwrap().witness;
        let f = if use_set {
            SliceFn::DistToSet { cells: vec![cells[0].clone()] }
        } else {
            SliceFn::DistToPoint { point: vec![q(px, 4), q(py, 4)] }
        };
        let p = slice_profile(&u, &f, &cover, None).unwrap();
        prop_assert!(p.spread_ok());
        let integral = coarea_integral(&p, &m);
        prop_assert!(integral.le(&p.bound(&m)));
        if p.r2 > p.r1 {
            let c = best_slice(&p, &m).unwrap();
            prop_assert!(c.mean_ok && c.bound_ok);
            let lvl = p.level_set(&c.r);
            if !lvl.is_empty() {
                let true_content = exact_content(&lvl, &Exponent::int(1), &BallFamily::AllGrid, BUDGET).unwrap();
                prop_assert!(true_content.value_lower.le(&c.slice_cost));
            }
        }
    }

    #[test]
    fn cone_bound_and_coverage(cells in cells2(6, 10), px in 0i64..25, py in 0i64..25, m in exponent(), improved in any::<bool>()) {
        let d = q(1, 4);
        let s = VoxelSpace::new(2, d.clone(), cells).unwrap();
        let input = greedy_content(&s, &Exponent::int(1), &BallFamily::AllGrid).unwrap().witness;
        let p = vec![q(px, 16), q(py, 16)];
        let big_r = input
            .iter()
            .map(|b| linf(&b.center, &p) + &b.radius)
            .max()
            .unwrap();
        let variant = if improved { ConeVariant::Improved } else { ConeVariant::Standard };
        let cert = cone_covering(&input, &p, &big_r, &m, variant).unwrap();
        prop_assert!(cert.within_bound && cert.counts_ok);
        let cov = cone_coverage_check(&cert, 400);
        prop_assert_eq!(cov.misses, 0);
    }

    #[test]
    fn merge_is_disjoint_cheaper_and_containing(
        raw in prop::collection::vec((0i64..16, 0i64..16, 1i64..4), 1..7),
        half in any::<bool>(),
    ) {
        let e = if half { Exponent::parse("1/2").unwrap() } else { Exponent::int(1) };
        let balls: Vec<Ball> = raw.iter().map(|&(x, y, r)| Ball::new(vec![qi(x), qi(y)], q(r, 2))).collect();
        let out = merge_to_disjoint(&balls, &e).unwrap();
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                prop_assert!(!out[i].intersects(&out[j]));
            }
        }
        prop_assert!(cost_of(&out, &e).le(&cost_of(&balls, &e)));
        for b in &balls {
            let inside = out.iter().any(|o| {
                o.lo().iter().zip(b.lo()).all(|(a, x)| a <= &x) && b.hi().iter().zip(o.hi()).all(|(x, a)| x <= &a)
            });
            prop_assert!(inside);
        }
    }

    #[test]
    fn radial_projection_lands_on_boundary(
        base in prop::collection::vec(-2i64..3, 2..4),
        seed in prop::collection::vec((1i64..16, 1i64..16), 4),
    ) {
        let n = base.len();
        let face = Face { base: base.clone(), free: vec![true; n] };
        let r = qi(2);
        let p: Vec<Q> = (0..n).map(|i| (qi(base[i]) + q(seed[i].0, 16)) * &r).collect();
        let x: Vec<Q> = (0..n).map(|i| (qi(base[i]) + q(seed[i].1, 16)) * &r).collect();
        if p == x {
            return Ok(());
        }
        let y = radial_project(&face, &r, &p, &x).unwrap();
        prop_assert!(face.contains(&y, &r) && !face.interior(&y, &r));
        prop_assert_eq!(radial_project(&face, &r, &p, &y).unwrap(), y.clone());
        prop_assert!(carrier(&y, &r).dim() < n);
    }

    #[test]
    fn grid_vertices_stay_put(vs in prop::collection::btree_set((-3i64..4, -3i64..4), 1..6)) {
        let r = qi(1);
        let pts: Vec<WPoint> = vs.iter().map(|&(a, b)| WPoint { x: vec![qi(a), qi(b)], rho: qi(0) }).collect();
        let t = skeleton_descend(&pts, 2, &r, &Exponent::int(2), &q(1, 4), &PushoutConstants::default()).unwrap();
        prop_assert_eq!(t.max_displacement, 0.0);
        prop_assert!(t.all_hold());
        let before: BTreeSet<Vec<Q>> = pts.iter().map(|p| p.x.clone()).collect();
        let after: BTreeSet<Vec<Q>> = t.final_points.iter().map(|p| p.x.clone()).collect();
        prop_assert_eq!(before, after);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn loomis_whitney_never_fails(s in prop_oneof![
        cells2(6, 12).prop_map(|c| VoxelSpace::new(2, qi(1), c).unwrap()),
        cells3(3, 9).prop_map(|c| VoxelSpace::new(3, qi(1), c).unwrap()),
    ]) {
        let r = loomis_whitney_check(&s, BUDGET).unwrap();
        prop_assert!(r.lw_holds && r.inside_cylinder);
        prop_assert!(r.isoperimetric.holds);
    }

    #[test]
    fn nerve_depth_matches_recount(cells in cells2(7, 16), centers in any::<bool>()) {
        let s = VoxelSpace::new(2, qi(1), cells).unwrap();
        let mode = if centers { NerveMode::CellCenters } else { NerveMode::ClosedCells };
        let cover = greedy_content(&s, &Exponent::int(1), &BallFamily::AllGrid).unwrap().witness;
        let nv = nerve(&cover, &s, mode).unwrap();
        prop_assert_eq!(nv.multiplicity, recheck_multiplicity(&cover, &s, mode));
        prop_assert_eq!(nv.dimension, nv.multiplicity as i64 - 1);
    }

    #[test]
    fn width_is_deterministic(cells in cells2(8, 20), seed in 0u64..4) {
        let s = VoxelSpace::new(2, qi(1), cells).unwrap();
        let a = width_bound(&s, 1, 200, NerveMode::ClosedCells, seed).unwrap();
        let b = width_bound(&s, 1, 200, NerveMode::ClosedCells, seed).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert!(a.bound <= a.diameter);
    }
}
