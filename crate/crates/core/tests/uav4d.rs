use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use amra_core::grid2d::CostMap;
use amra_core::search::{validate_path, PlanStatus};
use amra_core::uav4d::dubins::{dubins_length, DubinsWord};
use amra_core::uav4d::heuristics::{euclidean, BackwardDijkstra};
use amra_core::uav4d::{PrimitiveError, PrimitiveSet, Resolution, Uav4D, UavHeuristic, UavState, CELL_M};
use amra_core::{Domain, PlannerConfig, ProblemInstance};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

type Pose = (f64, f64, f64);

#[derive(Clone, Copy, PartialEq)]
enum Seg {
    L,
    R,
    S,
}

fn word_segments(w: DubinsWord) -> [Seg; 3] {
    use Seg::*;
    match w {
        DubinsWord::Lsl => [L, S, L],
        DubinsWord::Rsr => [R, S, R],
        DubinsWord::Lsr => [L, S, R],
        DubinsWord::Rsl => [R, S, L],
        DubinsWord::Rlr => [R, L, R],
        DubinsWord::Lrl => [L, R, L],
    }
}

/// Moves along one segment; `p` is an angle for arcs, a length for `S`.
fn step(q: Pose, seg: Seg, p: f64, rho: f64) -> Pose {
    let (x, y, th) = q;
    match seg {
        Seg::L => (x + rho * ((th + p).sin() - th.sin()), y - rho * ((th + p).cos() - th.cos()), th + p),
        Seg::R => (x + rho * (th.sin() - (th - p).sin()), y + rho * ((th - p).cos() - th.cos()), th - p),
        Seg::S => (x + p * th.cos(), y + p * th.sin(), th),
    }
}

/// Endpoint and third-segment angle for free parameters `(p1, p2)`; the last
/// arc is whatever closes the heading.
fn fly(segs: [Seg; 3], from: Pose, to: Pose, p1: f64, p2: f64, rho: f64) -> (Pose, f64) {
    let q = step(step(from, segs[0], p1, rho), segs[1], p2, rho);
    let c = match segs[2] {
        Seg::L => (to.2 - q.2).rem_euclid(TAU),
        _ => (q.2 - to.2).rem_euclid(TAU),
    };
    (step(q, segs[2], c, rho), c)
}

/// Numeric oracle: Newton on the endpoint residual from a grid of seeds, per
/// word, keeping the shortest converged path.
fn dubins_oracle(from: Pose, to: Pose, rho: f64) -> f64 {
    let mut best = f64::INFINITY;
    let d = (to.0 - from.0).hypot(to.1 - from.1);
    for w in DubinsWord::ALL {
        let segs = word_segments(w);
        let resid = |a: f64, b: f64| {
            let (q, _) = fly(segs, from, to, a, b, rho);
            (q.0 - to.0, q.1 - to.1)
        };
        let second_seeds: Vec<f64> = if segs[1] == Seg::S {
            (0..12).map(|k| k as f64 * (d + 4.0 * rho) / 11.0).collect()
        } else {
            (0..12).map(|k| k as f64 * TAU / 12.0).collect()
        };
        for i in 0..24 {
            for &b0 in &second_seeds {
                let (mut a, mut b) = (i as f64 * TAU / 24.0, b0);
                for _ in 0..60 {
                    let (r0, r1) = resid(a, b);
                    if r0.hypot(r1) < 1e-12 {
                        break;
                    }
                    let h = 1e-7;
                    let (ja0, ja1) = resid(a + h, b);
                    let (jb0, jb1) = resid(a, b + h);
                    let (j00, j10, j01, j11) = ((ja0 - r0) / h, (ja1 - r1) / h, (jb0 - r0) / h, (jb1 - r1) / h);
                    let det = j00 * j11 - j01 * j10;
                    if det.abs() < 1e-14 {
                        break;
                    }
                    a -= (j11 * r0 - j01 * r1) / det;
                    b -= (-j10 * r0 + j00 * r1) / det;
                    a = a.rem_euclid(TAU);
                    b = if segs[1] == Seg::S { b.max(0.0) } else { b.rem_euclid(TAU) };
                }
                let (r0, r1) = resid(a, b);
                if r0.hypot(r1) > 1e-8 {
                    continue;
                }
                let (_, c) = fly(segs, from, to, a, b, rho);
                let len = if segs[1] == Seg::S { rho * (a + c) + b } else { rho * (a + b + c) };
                best = best.min(len);
            }
        }
    }
    best
}

fn random_pose(rng: &mut impl Rng, span: f64) -> Pose {
    (rng.gen_range(-span..span), rng.gen_range(-span..span), rng.gen_range(0.0..TAU))
}

#[test]
fn dubins_matches_numeric_oracle() {
    let from = (0.0, 0.0, 0.0);
    let to = (10.0, 0.0, FRAC_PI_2);
    let (got, want) = (dubins_length(from, to, 2.0), dubins_oracle(from, to, 2.0));
    assert!((got - want).abs() <= 1e-6 * want, "perpendicular case: {got} vs {want}");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let rho = rng.gen_range(0.5..10.0);
        let (a, b) = (random_pose(&mut rng, 30.0), random_pose(&mut rng, 30.0));
        let (got, want) = (dubins_length(a, b, rho), dubins_oracle(a, b, rho));
        assert!((got - want).abs() <= 1e-6 * want.max(1.0), "{a:?} -> {b:?} rho {rho}: {got} vs {want}");
    }
}

#[test]
fn dubins_never_undercuts_the_straight_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let rho = rng.gen_range(0.5..20.0);
        let (a, b) = (random_pose(&mut rng, 100.0), random_pose(&mut rng, 100.0));
        let d = (b.0 - a.0).hypot(b.1 - a.1);
        assert!(dubins_length(a, b, rho) >= d * (1.0 - 1e-12));
    }
}

#[test]
fn aligned_dubins_is_the_separation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let (x, y, th) = random_pose(&mut rng, 50.0);
        let d = rng.gen_range(0.1..200.0);
        let l = dubins_length((x, y, th), (x + d * th.cos(), y + d * th.sin(), th), rng.gen_range(0.5..20.0));
        assert!((l - d).abs() <= 1e-9 * d, "{l} vs {d}");
    }
}

fn random_obstacles(rng: &mut impl Rng, w: u32, h: u32, p: f64) -> CostMap {
    let cells: Vec<Option<u32>> = (0..w * h).map(|_| if rng.gen_bool(p) { None } else { Some(1) }).collect();
    CostMap::from_costs(w, h, cells)
}

#[test]
fn backward_dijkstra_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..10 {
        let map = random_obstacles(&mut rng, 40, 40, 0.25);
        let free: Vec<_> = map.free_cells().collect();
        let goal = *free.choose(&mut rng).unwrap();
        let t = BackwardDijkstra::build(&map, goal);
        assert_eq!(t.distance(goal.0 as i64, goal.1 as i64), 0.0);
        for &(x, y) in &free {
            let (x, y) = (x as i64, y as i64);
            for (dx, dy) in amra_core::grid2d::DIRECTIONS {
                if !map.is_free(x + dx, y + dy) {
                    continue;
                }
                let (a, b) = (t.distance(x, y), t.distance(x + dx, y + dy));
                assert_eq!(a.is_finite(), b.is_finite(), "trial {trial}");
                if a.is_finite() {
                    let edge = if dx != 0 && dy != 0 { SQRT_2 * CELL_M } else { CELL_M };
                    assert!((a - b).abs() <= edge + 1e-9, "trial {trial}: ({x},{y}) {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn backward_dijkstra_sees_around_a_u_wall() {
    let mut map = CostMap::open(40, 40);
    for y in 10..=30 {
        map.set(20, y, None);
    }
    for x in 10..=20 {
        map.set(x, 10, None);
        map.set(x, 30, None);
    }
    let goal = UavState::new(15, 20, 0, 0);
    let t = BackwardDijkstra::build(&map, (15, 20));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let s = UavState::new(rng.gen_range(21..27), rng.gen_range(14..27), 0, 0);
        let h = t.heuristic(&s);
        assert!(h.is_finite());
        assert!(h > euclidean(&s, &goal), "{s}: {h}");
    }
    let blocked_goal = BackwardDijkstra::build(&map, (20, 20));
    assert!(blocked_goal.distance(0, 0).is_infinite());
}

#[test]
fn successors_are_translation_invariant() {
    let d = Uav4D::new(CostMap::open(90, 90), PrimitiveSet::shipped(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let s =
            UavState::new(30 + 3 * rng.gen_range(0..4), 30 + 3 * rng.gen_range(0..4), rng.gen_range(0..12), rng.gen_range(0..3));
        let (tx, ty) = (3 * rng.gen_range(-3..4), 3 * rng.gen_range(-3..4));
        let moved = UavState::new(s.x + tx, s.y + ty, s.theta, s.v);
        for r in d.resolutions_of(&s).iter() {
            a.clear();
            b.clear();
            d.successors(&s, r, &mut a);
            d.successors(&moved, r, &mut b);
            assert_eq!(a.len(), b.len());
            for (p, q) in a.iter().zip(&b) {
                assert_eq!(UavState::new(p.state.x + tx, p.state.y + ty, p.state.theta, p.state.v), q.state);
                assert_eq!((p.cost, p.action), (q.cost, q.action));
            }
        }
    }
}

#[test]
fn shipped_primitives_are_closed_and_round_trip() {
    let set = PrimitiveSet::shipped();
    set.check_closure().unwrap();
    let text = set.to_text();
    assert_eq!(PrimitiveSet::parse(&text).unwrap().to_text(), text);
}

#[test]
fn straight_cruise_covers_one_cell_per_second() {
    let set = PrimitiveSet::shipped();
    let p = set.group(Resolution::High, 0, 1).iter().map(|&id| set.get(id)).find(|p| p.end_v == 1 && p.end_theta == 0).unwrap();
    assert_eq!((p.dx, p.dy), (1, 0));
    assert!((p.duration - 1.0).abs() < 1e-9);
}

#[test]
fn misaligned_low_resolution_offset_is_rejected() {
    let text = include_str!("../data/uav_primitives.txt");
    let header = "prim res=9 sθ=0 sv=0 dx=3 dy=0";
    assert!(text.contains(header));
    let broken = text.replacen(header, "prim res=9 sθ=0 sv=0 dx=4 dy=0", 1);
    match PrimitiveSet::parse(&broken) {
        Err(PrimitiveError::Invalid { msg, .. }) => assert!(msg.contains("not a multiple"), "{msg}"),
        other => panic!("expected an alignment error, got {other:?}"),
    }
    let bad_dur = text.replacen("dur=1.000000", "dur=0.000000", 1);
    assert!(matches!(PrimitiveSet::parse(&bad_dur), Err(PrimitiveError::Invalid { .. })));
}

#[test]
fn wall_ahead_of_fast_state_leaves_nothing() {
    let mut map = CostMap::open(30, 30);
    for y in 0..30 {
        map.set(16, y, None);
    }
    let d = Uav4D::new(map, PrimitiveSet::shipped(), 0.0);
    let s = UavState::new(15, 15, 0, 2);
    for r in d.resolutions_of(&s).iter() {
        let mut out = Vec::new();
        d.successors(&s, r, &mut out);
        assert!(out.is_empty(), "resolution {r}: {out:?}");
    }
}

#[test]
fn hovering_state_uses_only_the_standstill_group() {
    let d = Uav4D::new(CostMap::open(40, 40), PrimitiveSet::shipped(), 0.0);
    let s = UavState::new(18, 18, 4, 0);
    let mut out = Vec::new();
    d.anchor_successors(&s, &mut out);
    assert!(!out.is_empty());
    for y in &out {
        assert_eq!(d.primitives().get(y.action).start_v, 0);
        assert_eq!(d.primitives().get(y.action).start_theta, 4);
    }
    assert!(out.iter().any(|y| (y.state.x, y.state.y) == (18, 18) && y.state.theta != 4));
}

#[test]
fn euclidean_anchor_is_admissible_against_optimal_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let prims = std::sync::Arc::new(PrimitiveSet::shipped());
    let mut solved = 0;
    let mut attempts = 0;
    while solved < 50 {
        attempts += 1;
        assert!(attempts < 200, "too few solvable instances");
        let d = Uav4D::new(random_obstacles(&mut rng, 64, 64, 0.08), prims.clone(), 0.0);
        let free = d.coarse_free_states(0, 0);
        let pair: Vec<_> = free.choose_multiple(&mut rng, 2).copied().collect();
        let pick = |s: UavState, rng: &mut ChaCha8Rng| {
            let near = UavState::new(s.x % 30 + 15, s.y % 30 + 15, rng.gen_range(0..12), 0);
            if d.is_valid(&near) && d.resolutions_of(&near).contains(2) {
                near
            } else {
                s
            }
        };
        let start = pick(pair[0], &mut rng);
        let goal = pick(pair[1], &mut rng);
        if start == goal {
            continue;
        }
        let problem = ProblemInstance::new(&d, start, [goal]);
        let h = d.heuristics(goal, &[UavHeuristic::Euclidean], 8.0);
        let cfg = PlannerConfig { expansion_budget: Some(400_000), ..PlannerConfig::default().with_weights(1.0, 1.0) };
        let out = amra_core::plan(&problem, &h, cfg, |_| {}).unwrap();
        if out.status != PlanStatus::Finished {
            continue;
        }
        let best = out.best.unwrap();
        assert_eq!(validate_path(&problem, &best), Ok(best.cost));
        for wp in &best.path {
            let to_go = best.cost - wp.g;
            assert!(euclidean(&wp.state, &goal) <= to_go + 1e-9, "{} > {}", euclidean(&wp.state, &goal), to_go);
        }
        solved += 1;
    }
}

#[test]
fn dubins_identical_and_reverse() {
    assert_eq!(dubins_length((1.0, 1.0, 0.3), (1.0, 1.0, 0.3), 3.0), 0.0);
    assert!(dubins_length((0.0, 0.0, 0.0), (0.0, 0.0, PI), 1.0) >= PI);
}
