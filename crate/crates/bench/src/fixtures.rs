//! Seeded map generators: the 50×50 non-uniform cost fixture, the narrow
//! passage and cul-de-sac scenarios, random maps and walled-off goals.

use amra_core::grid2d::{CostMap, GridState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURE_61_SEED: u64 = 61;
pub const FIXTURE_61_SIZE: u32 = 50;
pub const FIXTURE_61_FACTORS: [u32; 3] = [1, 3, 9];
pub const FIXTURE_61_COSTS: (u32, u32) = (10, 260);
/// Inside the cul-de-sac.
pub const FIXTURE_61_START: GridState = GridState::new(27, 27);
/// Behind the closed end of the cul-de-sac.
pub const FIXTURE_61_GOAL: GridState = GridState::new(45, 27);

/// Smooth noise in `[0, 1]`: random values on a lattice with spacing
/// `cell`, blended with a smoothstep. Two octaves.
pub fn value_noise(w: u32, h: u32, cell: u32, rng: &mut impl Rng) -> Vec<f64> {
    let mut field = vec![0.0; (w * h) as usize];
    let mut amplitude = 1.0;
    let mut total = 0.0;
    for octave in 0..2 {
        let spacing = (cell >> octave).max(1) as f64;
        let gw = (w as f64 / spacing).ceil() as usize + 2;
        let gh = (h as f64 / spacing).ceil() as usize + 2;
        let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.gen::<f64>()).collect();
        for y in 0..h {
            for x in 0..w {
                let (fx, fy) = (x as f64 / spacing, y as f64 / spacing);
                let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
                let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
                let (tx, ty) = (smooth(fx - ix as f64), smooth(fy - iy as f64));
                let at = |i: usize, j: usize| lattice[j * gw + i];
                let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
                let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
                field[(y * w + x) as usize] += amplitude * (top * (1.0 - ty) + bottom * ty);
            }
        }
        total += amplitude;
        amplitude *= 0.5;
    }
    let (lo, hi) = field.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { total };
    field.iter().map(|v| (v - lo) / span).collect()
}

/// Noise quantised to integer costs in `[lo, hi]`.
pub fn noise_cost_map(w: u32, h: u32, lo: u32, hi: u32, seed: u64) -> CostMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = value_noise(w, h, 8, &mut rng);
    let cells: Vec<Option<u32>> = field.iter().map(|v| Some(lo + (v * (hi - lo) as f64).round() as u32)).collect();
    CostMap::from_costs(w, h, cells)
}

/// The 50×50 illustrative map: value-noise costs in `[10, 260]` and a
/// cul-de-sac opening towards the left around [`FIXTURE_61_START`].
pub fn fixture_61(seed: u64) -> CostMap {
    let (lo, hi) = FIXTURE_61_COSTS;
    let mut map = noise_cost_map(FIXTURE_61_SIZE, FIXTURE_61_SIZE, lo, hi, seed);
    for y in 14..=40 {
        map.set(38, y, None);
    }
    for x in 20..=38 {
        map.set(x, 14, None);
        map.set(x, 40, None);
    }
    map
}

/// The committed text form of [`fixture_61`].
pub fn fixture_61_text(seed: u64) -> String {
    fixture_61(seed).to_cost_text()
}

pub const NARROW_FACTORS: [u32; 3] = [1, 7, 21];
pub const NARROW_START: GridState = GridState::new(0, 21);
pub const NARROW_GOAL: GridState = GridState::new(63, 42);
/// The single opening in the dividing wall.
pub const NARROW_GAP: GridState = GridState::new(31, 40);

/// 64×64 map split by a wall at `x = 31` whose only opening is one cell at
/// [`NARROW_GAP`], a row on neither the 7- nor the 21-cell lattice.
pub fn narrow_passage() -> CostMap {
    let mut map = CostMap::open(64, 64);
    for y in 0..64 {
        if y != NARROW_GAP.y {
            map.set(NARROW_GAP.x, y, None);
        }
    }
    map
}

pub const CUL_DE_SAC_SIZE: u32 = 256;
pub const CUL_DE_SAC_FACTORS: [u32; 3] = [1, 7, 21];

/// 256×256 open map with a large U-shaped wall whose mouth faces the start
/// region on the left.
pub fn cul_de_sac() -> CostMap {
    let mut map = CostMap::open(CUL_DE_SAC_SIZE, CUL_DE_SAC_SIZE);
    for y in 40..=215 {
        map.set(150, y, None);
    }
    for x in 70..=150 {
        map.set(x, 40, None);
        map.set(x, 215, None);
    }
    map
}

/// Start left of the mouth, goal behind the closed end, both on the
/// 21-cell lattice.
pub fn cul_de_sac_trial(seed: u64) -> (GridState, GridState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = GridState::new(21 * rng.gen_range(0..=3), 21 * rng.gen_range(4..=8));
    let goal = GridState::new(21 * rng.gen_range(10..=12), 21 * rng.gen_range(3..=9));
    (start, goal)
}

/// Obstacles with probability `p_obstacle`, other cells uniform in
/// `costs`.
pub fn random_grid(rng: &mut impl Rng, w: u32, h: u32, p_obstacle: f64, costs: (u32, u32)) -> CostMap {
    let cells: Vec<Option<u32>> =
        (0..w * h).map(|_| if rng.gen_bool(p_obstacle) { None } else { Some(rng.gen_range(costs.0..=costs.1)) }).collect();
    CostMap::from_costs(w, h, cells)
}

/// Blocks the eight neighbours of `goal`, cutting it off at every
/// resolution and connectivity.
pub fn wall_in(map: &mut CostMap, goal: GridState) {
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            if dx != 0 || dy != 0 {
                let (x, y) = (goal.x as i64 + dx, goal.y as i64 + dy);
                if map.in_bounds(x, y) {
                    map.set(x as u32, y as u32, None);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_deterministic_and_in_range() {
        let a = fixture_61(FIXTURE_61_SEED);
        assert_eq!(a, fixture_61(FIXTURE_61_SEED));
        assert_ne!(a, fixture_61(FIXTURE_61_SEED + 1));
        let costs: Vec<u32> = a.free_cells().map(|(x, y)| a.cost(x as i64, y as i64).unwrap()).collect();
        assert_eq!(*costs.iter().min().unwrap(), 10);
        assert_eq!(*costs.iter().max().unwrap(), 260);
        assert!(a.is_free(27, 27) && a.is_free(45, 27));
    }

    #[test]
    fn committed_fixture_matches_generator() {
        assert_eq!(include_str!("../data/fixture_61.map"), fixture_61_text(FIXTURE_61_SEED));
    }

    #[test]
    fn narrow_wall_has_one_gap() {
        let m = narrow_passage();
        let open: Vec<u32> = (0..64).filter(|&y| m.is_free(31, y as i64)).collect();
        assert_eq!(open, vec![40]);
    }

    #[test]
    fn walled_goal_neighbours_are_blocked() {
        let mut m = CostMap::open(5, 5);
        wall_in(&mut m, GridState::new(0, 0));
        assert!(m.is_free(0, 0) && !m.is_free(1, 1) && !m.is_free(0, 1) && m.is_free(2, 2));
    }
}
