use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{heading_angle, Resolution, CELL_M, NUM_HEADINGS, NUM_SPEEDS};

/// A swept pose in metres / radians, relative to the primitive's start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotionPrimitive {
    pub res: Resolution,
    pub start_theta: u8,
    pub start_v: u8,
    /// Lattice offset in fine (3 m) units.
    pub dx: i32,
    pub dy: i32,
    pub end_theta: u8,
    pub end_v: u8,
    /// Seconds; also the edge cost.
    pub duration: f64,
    /// Sampled at uniform time steps from start to end.
    pub poses: Vec<Pose>,
}

impl MotionPrimitive {
    /// Heading change in steps, in `0..12`.
    pub fn turn(&self) -> u8 {
        ((self.end_theta as i32 - self.start_theta as i32).rem_euclid(NUM_HEADINGS as i32)) as u8
    }

    /// The same motion rotated by 90 degrees (three heading steps).
    pub fn rotated_quarter(&self) -> MotionPrimitive {
        let q = (NUM_HEADINGS / 4) as u8;
        MotionPrimitive {
            start_theta: (self.start_theta + q) % NUM_HEADINGS as u8,
            end_theta: (self.end_theta + q) % NUM_HEADINGS as u8,
            dx: -self.dy,
            dy: self.dx,
            poses: self
                .poses
                .iter()
                .map(|p| Pose { x: -p.y, y: p.x, theta: wrap_angle(p.theta + std::f64::consts::FRAC_PI_2) })
                .collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let t = a.rem_euclid(std::f64::consts::TAU);
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PrimitiveError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("primitive {index}: {msg}")]
    Invalid { index: usize, msg: String },
    #[error("no primitive applies to resolution {res:?}, heading {theta}, speed {v}")]
    EmptyGroup { res: Resolution, theta: u8, v: u8 },
    #[error("set is not closed under heading symmetry: {0}")]
    NotClosed(String),
}

/// Position tolerance (metres) for endpoint and closure checks.
const POS_TOL: f64 = 1e-4;
const ANGLE_TOL: f64 = 1e-4;

/// Validated table of motion primitives, grouped by `(res, θ, v)`.
#[derive(Clone, Debug)]
pub struct PrimitiveSet {
    prims: Vec<MotionPrimitive>,
    groups: Vec<Vec<u32>>,
}

fn group_index(res: Resolution, theta: u8, v: u8) -> usize {
    (res.index() - 1) * NUM_HEADINGS * NUM_SPEEDS + theta as usize * NUM_SPEEDS + v as usize
}

impl PrimitiveSet {
    /// Validates every primitive, requires a non-empty group for every
    /// `(res, θ, v)` and checks heading-symmetry closure.
    pub fn new(prims: Vec<MotionPrimitive>) -> Result<Self, PrimitiveError> {
        for (index, p) in prims.iter().enumerate() {
            validate(p).map_err(|msg| PrimitiveError::Invalid { index, msg })?;
        }
        let mut groups = vec![Vec::new(); 2 * NUM_HEADINGS * NUM_SPEEDS];
        for (i, p) in prims.iter().enumerate() {
            groups[group_index(p.res, p.start_theta, p.start_v)].push(i as u32);
        }
        for res in Resolution::ALL {
            for theta in 0..NUM_HEADINGS as u8 {
                for v in 0..NUM_SPEEDS as u8 {
                    if groups[group_index(res, theta, v)].is_empty() {
                        return Err(PrimitiveError::EmptyGroup { res, theta, v });
                    }
                }
            }
        }
        let set = PrimitiveSet { prims, groups };
        set.check_closure()?;
        Ok(set)
    }

    /// The committed primitive table.
    pub fn shipped() -> Self {
        Self::parse(include_str!("../../data/uav_primitives.txt")).expect("shipped primitive file is valid")
    }

    pub fn len(&self) -> usize {
        self.prims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prims.is_empty()
    }

    pub fn get(&self, id: u32) -> &MotionPrimitive {
        &self.prims[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MotionPrimitive> {
        self.prims.iter()
    }

    /// Ids of the primitives applicable at `(res, θ, v)`.
    pub fn group(&self, res: Resolution, theta: u8, v: u8) -> &[u32] {
        &self.groups[group_index(res, theta, v)]
    }

    /// Exact 30-degree rotation is impossible on a square lattice, so closure
    /// means: every primitive rotated by 90 degrees is in the set, and for
    /// each `(res, v)` all twelve headings offer the same multiset of
    /// `(turn, end speed)` pairs.
    pub fn check_closure(&self) -> Result<(), PrimitiveError> {
        for p in &self.prims {
            let r = p.rotated_quarter();
            let found = self.group(r.res, r.start_theta, r.start_v).iter().any(|&id| {
                let q = self.get(id);
                q.dx == r.dx
                    && q.dy == r.dy
                    && q.end_theta == r.end_theta
                    && q.end_v == r.end_v
                    && (q.duration - r.duration).abs() <= 1e-6
            });
            if !found {
                return Err(PrimitiveError::NotClosed(format!(
                    "{:?} heading {} speed {} to ({}, {}) has no quarter-turn image",
                    p.res, p.start_theta, p.start_v, p.dx, p.dy
                )));
            }
        }
        for res in Resolution::ALL {
            for v in 0..NUM_SPEEDS as u8 {
                let signature = |theta: u8| {
                    let mut s: Vec<(u8, u8)> =
                        self.group(res, theta, v).iter().map(|&id| (self.get(id).turn(), self.get(id).end_v)).collect();
                    s.sort_unstable();
                    s
                };
                let base = signature(0);
                for theta in 1..NUM_HEADINGS as u8 {
                    if signature(theta) != base {
                        return Err(PrimitiveError::NotClosed(format!(
                            "{res:?} speed {v}: heading {theta} offers different (turn, end speed) pairs than heading 0"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses the text form written by [`PrimitiveSet::to_text`].
    pub fn parse(text: &str) -> Result<Self, PrimitiveError> {
        let mut prims = Vec::new();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        while let Some((line, l)) = lines.next() {
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let syntax = |msg: String| PrimitiveError::Syntax { line, msg };
            let mut words = l.split_whitespace();
            if words.next() != Some("prim") {
                return Err(syntax(format!("expected `prim ...`, got {l:?}")));
            }
            let mut fields = BTreeMap::new();
            for w in words {
                let (k, v) = w.split_once('=').ok_or_else(|| syntax(format!("expected key=value, got {w:?}")))?;
                if fields.insert(k, v).is_some() {
                    return Err(syntax(format!("duplicate field {k:?}")));
                }
            }
            let field = |k: &str| fields.get(k).copied().ok_or_else(|| syntax(format!("missing field {k:?}")));
            fn num<T: std::str::FromStr>(k: &str, v: &str, line: usize) -> Result<T, PrimitiveError> {
                v.parse().map_err(|_| PrimitiveError::Syntax { line, msg: format!("bad value {v:?} for {k:?}") })
            }
            let res = match field("res")? {
                "3" => Resolution::High,
                "9" => Resolution::Low,
                other => return Err(syntax(format!("res must be 3 or 9, got {other:?}"))),
            };
            let nposes: usize = num("nposes", field("nposes")?, line)?;
            if fields.len() != 9 {
                return Err(syntax(format!("expected 9 fields, got {}", fields.len())));
            }
            let mut poses = Vec::with_capacity(nposes);
            for _ in 0..nposes {
                let (pl, pose) = lines.next().ok_or_else(|| syntax(format!("expected {nposes} pose lines")))?;
                let vals: Vec<f64> = pose.split_whitespace().map(|t| num("pose", t, pl)).collect::<Result<_, _>>()?;
                if vals.len() != 3 {
                    return Err(PrimitiveError::Syntax { line: pl, msg: format!("pose needs `x y θ`, got {pose:?}") });
                }
                poses.push(Pose { x: vals[0], y: vals[1], theta: vals[2] });
            }
            prims.push(MotionPrimitive {
                res,
                start_theta: num("sθ", field("sθ")?, line)?,
                start_v: num("sv", field("sv")?, line)?,
                dx: num("dx", field("dx")?, line)?,
                dy: num("dy", field("dy")?, line)?,
                end_theta: num("eθ", field("eθ")?, line)?,
                end_v: num("ev", field("ev")?, line)?,
                duration: num("dur", field("dur")?, line)?,
                poses,
            });
        }
        Self::new(prims)
    }

    pub fn to_text(&self) -> String {
        write_primitives(&self.prims)
    }
}

pub(crate) fn write_primitives(prims: &[MotionPrimitive]) -> String {
    let mut out = String::from("# x y θ per pose: metres and radians relative to the start; uniform time steps\n");
    for p in prims {
        writeln!(
            out,
            "prim res={} sθ={} sv={} dx={} dy={} eθ={} ev={} dur={:.6} nposes={}",
            p.res.metres(),
            p.start_theta,
            p.start_v,
            p.dx,
            p.dy,
            p.end_theta,
            p.end_v,
            p.duration,
            p.poses.len()
        )
        .unwrap();
        for q in &p.poses {
            writeln!(out, "{:.6} {:.6} {:.6}", clean(q.x), clean(q.y), clean(q.theta)).unwrap();
        }
    }
    out
}

/// Avoids `-0.000000` in the text form.
fn clean(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

/// Structural checks on one primitive.
pub fn validate(p: &MotionPrimitive) -> Result<(), String> {
    if p.start_theta as usize >= NUM_HEADINGS || p.end_theta as usize >= NUM_HEADINGS {
        return Err("heading index out of range".into());
    }
    if p.start_v as usize >= NUM_SPEEDS || p.end_v as usize >= NUM_SPEEDS {
        return Err("speed index out of range".into());
    }
    if !(p.duration > 0.0 && p.duration.is_finite()) {
        return Err(format!("duration {} is not positive", p.duration));
    }
    let step = p.res.step();
    if p.dx % step != 0 || p.dy % step != 0 {
        return Err(format!("offset ({}, {}) is not a multiple of {step} lattice units", p.dx, p.dy));
    }
    if p.poses.len() < 2 {
        return Err("needs at least two poses".into());
    }
    let first = p.poses[0];
    if first.x.abs() > POS_TOL || first.y.abs() > POS_TOL || angle_diff(first.theta, heading_angle(p.start_theta)) > ANGLE_TOL {
        return Err("first pose is not the origin at the start heading".into());
    }
    let last = *p.poses.last().unwrap();
    let (ex, ey) = (p.dx as f64 * CELL_M, p.dy as f64 * CELL_M);
    if (last.x - ex).abs() > POS_TOL
        || (last.y - ey).abs() > POS_TOL
        || angle_diff(last.theta, heading_angle(p.end_theta)) > ANGLE_TOL
    {
        return Err("last pose does not match the offset and end heading".into());
    }
    // poses carry implicit uniform timestamps; time running backwards would
    // show up as motion against the heading
    for (i, w) in p.poses.windows(2).enumerate() {
        let along = (w[1].x - w[0].x) * w[0].theta.cos() + (w[1].y - w[0].y) * w[0].theta.sin();
        if along < -POS_TOL {
            return Err(format!("pose {} moves backwards", i + 1));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight() -> MotionPrimitive {
        MotionPrimitive {
            res: Resolution::High,
            start_theta: 0,
            start_v: 1,
            dx: 1,
            dy: 0,
            end_theta: 0,
            end_v: 1,
            duration: 1.0,
            poses: vec![
                Pose { x: 0.0, y: 0.0, theta: 0.0 },
                Pose { x: 1.5, y: 0.0, theta: 0.0 },
                Pose { x: 3.0, y: 0.0, theta: 0.0 },
            ],
        }
    }

    #[test]
    fn validation_rules() {
        assert_eq!(validate(&straight()), Ok(()));
        let low = MotionPrimitive { res: Resolution::Low, ..straight() };
        assert!(validate(&low).unwrap_err().contains("multiple of 3"));
        let zero = MotionPrimitive { duration: 0.0, ..straight() };
        assert!(validate(&zero).is_err());
        let mut back = straight();
        back.poses.swap(1, 2);
        back.poses[2] = Pose { x: 3.0, y: 0.0, theta: 0.0 };
        back.poses[1] = Pose { x: 4.0, y: 0.0, theta: 0.0 };
        assert!(validate(&back).unwrap_err().contains("backwards"));
        let mut off = straight();
        off.poses[2].y = 0.5;
        assert!(validate(&off).is_err());
    }

    #[test]
    fn quarter_rotation() {
        let r = straight().rotated_quarter();
        assert_eq!((r.dx, r.dy, r.start_theta, r.end_theta), (0, 1, 3, 3));
        assert_eq!(validate(&r), Ok(()));
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let e = PrimitiveSet::parse("# c\nprim res=3 sθ=0\n").unwrap_err();
        assert!(matches!(e, PrimitiveError::Syntax { line: 2, .. }), "{e:?}");
        let e = PrimitiveSet::parse("prim res=5 sθ=0 sv=0 dx=0 dy=0 eθ=0 ev=0 dur=1 nposes=0\n").unwrap_err();
        assert!(matches!(e, PrimitiveError::Syntax { line: 1, .. }));
        let e = PrimitiveSet::parse("prim res=3 sθ=0 sv=1 dx=1 dy=0 eθ=0 ev=1 dur=1 nposes=2\n0 0 0\n").unwrap_err();
        assert!(matches!(e, PrimitiveError::Syntax { .. }));
        let e = PrimitiveSet::parse("prim res=3 sθ=0 sv=1 dx=1 dy=0 eθ=0 ev=1 dur=1 nposes=2\n0 0 0\n3 0 0\n").unwrap_err();
        assert!(matches!(e, PrimitiveError::EmptyGroup { .. }));
    }
}
