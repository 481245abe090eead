//! Shortest Dubins path length over the six words LSL, RSR, LSR, RSL, RLR and
//! LRL, in the normalised form where the turning radius is 1.

use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DubinsWord {
    Lsl,
    Rsr,
    Lsr,
    Rsl,
    Rlr,
    Lrl,
}

impl DubinsWord {
    pub const ALL: [DubinsWord; 6] =
        [DubinsWord::Lsl, DubinsWord::Rsr, DubinsWord::Lsr, DubinsWord::Rsl, DubinsWord::Rlr, DubinsWord::Lrl];
}

fn modulo(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

/// Normalised segment lengths `(t, p, q)` of `word`, or `None` if the word
/// cannot join the poses. `d` is the separation divided by the radius and
/// `alpha`, `beta` the headings relative to the line joining the poses.
fn segments(word: DubinsWord, alpha: f64, beta: f64, d: f64) -> Option<(f64, f64, f64)> {
    let (sa, sb, ca, cb) = (alpha.sin(), beta.sin(), alpha.cos(), beta.cos());
    let cab = (alpha - beta).cos();
    match word {
        DubinsWord::Lsl => {
            let p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb);
            if p2 < 0.0 {
                return None;
            }
            let tmp = (cb - ca).atan2(d + sa - sb);
            Some((modulo(tmp - alpha), p2.sqrt(), modulo(beta - tmp)))
        }
        DubinsWord::Rsr => {
            let p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa);
            if p2 < 0.0 {
                return None;
            }
            let tmp = (ca - cb).atan2(d - sa + sb);
            Some((modulo(alpha - tmp), p2.sqrt(), modulo(tmp - beta)))
        }
        DubinsWord::Lsr => {
            let p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb);
            if p2 < 0.0 {
                return None;
            }
            let p = p2.sqrt();
            let tmp = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
            Some((modulo(tmp - alpha), p, modulo(tmp - modulo(beta))))
        }
        DubinsWord::Rsl => {
            let p2 = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb);
            if p2 < 0.0 {
                return None;
            }
            let p = p2.sqrt();
            let tmp = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
            Some((modulo(alpha - tmp), p, modulo(beta - tmp)))
        }
        DubinsWord::Rlr => {
            let c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0;
            if c.abs() > 1.0 {
                return None;
            }
            let p = modulo(TAU - c.acos());
            let t = modulo(alpha - (ca - cb).atan2(d - sa + sb) + p / 2.0);
            Some((t, p, modulo(alpha - beta - t + p)))
        }
        DubinsWord::Lrl => {
            let c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0;
            if c.abs() > 1.0 {
                return None;
            }
            let p = modulo(TAU - c.acos());
            let t = modulo(-alpha - (ca - cb).atan2(d + sa - sb) + p / 2.0);
            Some((t, p, modulo(modulo(beta) - alpha - t + p)))
        }
    }
}

/// Length in metres of `word` joining `(x, y, θ)` poses with turning radius
/// `rho`, or `None` if the word does not apply.
pub fn word_length(word: DubinsWord, from: (f64, f64, f64), to: (f64, f64, f64), rho: f64) -> Option<f64> {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let d = dx.hypot(dy) / rho;
    let phi = if d > 0.0 { dy.atan2(dx) } else { 0.0 };
    let alpha = modulo(from.2 - phi);
    let beta = modulo(to.2 - phi);
    segments(word, alpha, beta, d).map(|(t, p, q)| (t + p + q) * rho)
}

/// Shortest Dubins path length in metres.
pub fn dubins_length(from: (f64, f64, f64), to: (f64, f64, f64), rho: f64) -> f64 {
    assert!(rho > 0.0, "turning radius must be positive");
    let same_pose = from.0 == to.0 && from.1 == to.1 && modulo(from.2 - to.2).min(TAU - modulo(from.2 - to.2)) < 1e-12;
    if same_pose {
        return 0.0;
    }
    DubinsWord::ALL.iter().filter_map(|&w| word_length(w, from, to, rho)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn straight_line() {
        let l = dubins_length((0.0, 0.0, 0.0), (25.0, 0.0, 0.0), 8.0);
        assert!((l - 25.0).abs() <= 1e-9 * 25.0, "{l}");
        let l = dubins_length((1.0, 2.0, PI / 3.0), (1.0 + 10.0 * 0.5, 2.0 + 10.0 * (PI / 3.0).sin(), PI / 3.0), 2.0);
        assert!((l - 10.0).abs() <= 1e-9 * 10.0, "{l}");
    }

    #[test]
    fn identical_poses() {
        assert_eq!(dubins_length((3.0, 4.0, 1.0), (3.0, 4.0, 1.0), 8.0), 0.0);
    }

    #[test]
    fn full_circle_to_turn_around() {
        // same point, opposite heading: the optimum is a half circle plus a
        // bit, never shorter than pi * rho
        let l = dubins_length((0.0, 0.0, 0.0), (0.0, 0.0, PI), 1.0);
        assert!(l >= PI - 1e-9);
    }
}
