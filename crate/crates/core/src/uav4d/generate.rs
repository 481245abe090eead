//! Offline primitive generation.
//!
//! Each primitive is a cubic Hermite curve joining the start pose to a lattice
//! endpoint with the target heading, flown with a constant-acceleration speed
//! profile between the start and end speeds. A candidate is feasible when the
//! longitudinal acceleration stays within [`A_LON_MAX`] and `v² κ` within
//! [`A_LAT_MAX`] along the whole curve. Among feasible endpoints the shortest
//! (in lattice steps) whose chord points closest to the mean heading wins.
//!
//! Headings 0, 1 and 2 are generated and rotated by multiples of 90 degrees.
//! A `(turn, end speed)` combination is kept only if it is feasible from all
//! three base headings, which makes every heading offer the same choices.

use super::primitives::{wrap_angle, MotionPrimitive, Pose, PrimitiveError, PrimitiveSet};
use super::{heading_angle, Resolution, CELL_M, NUM_HEADINGS, SPEEDS};

pub const A_LON_MAX: f64 = 4.0;
pub const A_LAT_MAX: f64 = 8.0;
/// Duration of a 30-degree turn on the spot.
pub const TURN_IN_PLACE_S: f64 = 1.0;
/// Largest allowed angle between the chord and the mean of the end headings.
const CHORD_TOL: f64 = 10.0 * std::f64::consts::PI / 180.0;
/// Largest gap between consecutive swept poses, metres.
const POSE_GAP_M: f64 = 1.0;
const SAMPLES: usize = 400;

fn max_steps(res: Resolution) -> i32 {
    match res {
        Resolution::High => 8,
        Resolution::Low => 4,
    }
}

struct Curve {
    p1: (f64, f64),
    t0: (f64, f64),
    t1: (f64, f64),
    k: f64,
}

impl Curve {
    fn new(end: (f64, f64), th0: f64, th1: f64) -> Self {
        let k = end.0.hypot(end.1);
        Curve { p1: end, t0: (th0.cos(), th0.sin()), t1: (th1.cos(), th1.sin()), k }
    }

    fn point(&self, u: f64) -> (f64, f64) {
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        let f = |p1: f64, t0: f64, t1: f64| h10 * self.k * t0 + h01 * p1 + h11 * self.k * t1;
        (f(self.p1.0, self.t0.0, self.t1.0), f(self.p1.1, self.t0.1, self.t1.1))
    }

    fn d1(&self, u: f64) -> (f64, f64) {
        let a = 3.0 * u * u - 4.0 * u + 1.0;
        let b = -6.0 * u * u + 6.0 * u;
        let c = 3.0 * u * u - 2.0 * u;
        let f = |p1: f64, t0: f64, t1: f64| a * self.k * t0 + b * p1 + c * self.k * t1;
        (f(self.p1.0, self.t0.0, self.t1.0), f(self.p1.1, self.t0.1, self.t1.1))
    }

    fn d2(&self, u: f64) -> (f64, f64) {
        let a = 6.0 * u - 4.0;
        let b = -12.0 * u + 6.0;
        let c = 6.0 * u - 2.0;
        let f = |p1: f64, t0: f64, t1: f64| a * self.k * t0 + b * p1 + c * self.k * t1;
        (f(self.p1.0, self.t0.0, self.t1.0), f(self.p1.1, self.t0.1, self.t1.1))
    }

    fn curvature(&self, u: f64) -> f64 {
        let (x1, y1) = self.d1(u);
        let (x2, y2) = self.d2(u);
        (x1 * y2 - y1 * x2) / x1.hypot(y1).powi(3)
    }
}

/// A feasible candidate: arc-length table plus timing.
struct Flight {
    curve: Curve,
    /// cumulative arc length at `u = i / SAMPLES`
    arc: Vec<f64>,
    vs: f64,
    accel: f64,
    duration: f64,
}

impl Flight {
    fn plan(curve: Curve, vs: f64, ve: f64) -> Option<Flight> {
        let mut arc = Vec::with_capacity(SAMPLES + 1);
        arc.push(0.0);
        let mut prev = curve.point(0.0);
        for i in 1..=SAMPLES {
            let u = i as f64 / SAMPLES as f64;
            if curve.d1(u).0.hypot(curve.d1(u).1) < 1e-9 {
                return None;
            }
            let p = curve.point(u);
            arc.push(arc[i - 1] + (p.0 - prev.0).hypot(p.1 - prev.1));
            prev = p;
        }
        let len = arc[SAMPLES];
        let accel = (ve * ve - vs * vs) / (2.0 * len);
        if accel.abs() > A_LON_MAX + 1e-12 {
            return None;
        }
        for (i, &s) in arc.iter().enumerate() {
            let v2 = (vs * vs + 2.0 * accel * s).max(0.0);
            if v2 * curve.curvature(i as f64 / SAMPLES as f64).abs() > A_LAT_MAX {
                return None;
            }
        }
        let duration = 2.0 * len / (vs + ve);
        Some(Flight { curve, arc, vs, accel, duration })
    }

    /// Curve parameter at arc length `s` (linear in the table).
    fn param_at(&self, s: f64) -> f64 {
        let i = self.arc.partition_point(|&a| a < s).clamp(1, SAMPLES);
        let (a0, a1) = (self.arc[i - 1], self.arc[i]);
        let frac = if a1 > a0 { ((s - a0) / (a1 - a0)).clamp(0.0, 1.0) } else { 0.0 };
        (i as f64 - 1.0 + frac) / SAMPLES as f64
    }

    fn poses(&self, vmax: f64) -> Vec<Pose> {
        let gaps = ((vmax * self.duration / POSE_GAP_M).ceil() as usize).max(1);
        let len = *self.arc.last().unwrap();
        (0..=gaps)
            .map(|i| {
                let t = self.duration * i as f64 / gaps as f64;
                let s = if i == gaps { len } else { (self.vs * t + 0.5 * self.accel * t * t).clamp(0.0, len) };
                let u = if i == gaps { 1.0 } else { self.param_at(s) };
                let (x, y) = self.curve.point(u);
                let (dx, dy) = self.curve.d1(u);
                Pose { x, y, theta: wrap_angle(dy.atan2(dx)) }
            })
            .collect()
    }
}

fn in_place_turn(res: Resolution, theta: u8, turn: i32) -> MotionPrimitive {
    let end_theta = (theta as i32 + turn).rem_euclid(NUM_HEADINGS as i32) as u8;
    MotionPrimitive {
        res,
        start_theta: theta,
        start_v: 0,
        dx: 0,
        dy: 0,
        end_theta,
        end_v: 0,
        duration: TURN_IN_PLACE_S,
        poses: vec![
            Pose { x: 0.0, y: 0.0, theta: heading_angle(theta) },
            Pose { x: 0.0, y: 0.0, theta: heading_angle(end_theta) },
        ],
    }
}

/// Best endpoint for one `(res, heading, sv, ev, turn)` combination.
fn best_primitive(res: Resolution, theta: u8, sv: u8, ev: u8, turn: i32) -> Option<MotionPrimitive> {
    let end_theta = (theta as i32 + turn).rem_euclid(NUM_HEADINGS as i32) as u8;
    let (th0, th1) = (heading_angle(theta), heading_angle(theta) + turn as f64 * heading_angle(1));
    let mean = 0.5 * (th0 + th1);
    let step = res.step();
    for n in 1..=max_steps(res) {
        let r = n * step;
        let mut candidates = Vec::new();
        for dx in -r..=r {
            for dy in -r..=r {
                if dx.abs().max(dy.abs()) != r || dx % step != 0 || dy % step != 0 {
                    continue;
                }
                let dev = (dy as f64).atan2(dx as f64) - mean;
                let dev = dev.sin().atan2(dev.cos()).abs();
                if dev <= CHORD_TOL {
                    candidates.push((dev, dx, dy));
                }
            }
        }
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (_, dx, dy) in candidates {
            let end = (dx as f64 * CELL_M, dy as f64 * CELL_M);
            let (vs, ve) = (SPEEDS[sv as usize], SPEEDS[ev as usize]);
            if let Some(f) = Flight::plan(Curve::new(end, th0, th1), vs, ve) {
                return Some(MotionPrimitive {
                    res,
                    start_theta: theta,
                    start_v: sv,
                    dx,
                    dy,
                    end_theta,
                    end_v: ev,
                    duration: f.duration,
                    poses: f.poses(vs.max(ve)),
                });
            }
        }
    }
    None
}

/// Builds the full primitive table. Deterministic.
pub fn generate_primitives() -> Result<PrimitiveSet, PrimitiveError> {
    let mut base: Vec<MotionPrimitive> = Vec::new();
    for res in Resolution::ALL {
        for sv in 0..SPEEDS.len() as u8 {
            if sv == 0 && res == Resolution::High {
                for theta in 0..3 {
                    base.push(in_place_turn(res, theta, -1));
                    base.push(in_place_turn(res, theta, 1));
                }
            }
            for ev in sv.saturating_sub(1)..=(sv + 1).min(SPEEDS.len() as u8 - 1) {
                if sv == 0 && ev == 0 {
                    continue;
                }
                for turn in [-1, 0, 1] {
                    let found: Vec<_> = (0..3).filter_map(|theta| best_primitive(res, theta, sv, ev, turn)).collect();
                    if found.len() == 3 {
                        base.extend(found);
                    }
                }
            }
        }
    }
    let mut all = Vec::with_capacity(base.len() * 4);
    for p in &base {
        let mut r = p.clone();
        for _ in 0..4 {
            all.push(r.clone());
            r = r.rotated_quarter();
        }
    }
    all.sort_by_key(|p| (p.res, p.start_theta, p.start_v, p.end_v, p.turn(), p.dx, p.dy));
    PrimitiveSet::new(all)
}

/// Text of the committed primitive file.
pub fn generate_primitive_file() -> Result<String, PrimitiveError> {
    Ok(generate_primitives()?.to_text())
}
