//! Start/goal sampling on the coarsest lattice.

use std::collections::HashSet;
use std::hash::Hash;

use amra_core::grid2d::{Grid2D, GridState};
use amra_core::uav4d::{Uav4D, UavState, NUM_HEADINGS};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("need at least two free coarse states, found {0}")]
    TooFewStates(usize),
    #[error("asked for {wanted} distinct pairs but only {available} exist")]
    TooFewPairs { wanted: usize, available: usize },
}

/// `n` distinct ordered pairs `(start, goal)` with `start != goal`, drawn
/// uniformly without replacement. Deterministic in `seed`.
pub fn sample_pairs<S: Copy + Eq + Hash>(candidates: &[S], n: usize, seed: u64) -> Result<Vec<(S, S)>, SampleError> {
    let k = candidates.len();
    if k < 2 {
        return Err(SampleError::TooFewStates(k));
    }
    let available = k.saturating_mul(k - 1);
    if n > available {
        return Err(SampleError::TooFewPairs { wanted: n, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if available <= 4 * n.max(1) {
        let mut all: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        all.shuffle(&mut rng);
        return Ok(all[..n].iter().map(|&(i, j)| (candidates[i], candidates[j])).collect());
    }
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let i = rng.gen_range(0..k);
        let j = rng.gen_range(0..k);
        if i != j && seen.insert((i, j)) {
            out.push((candidates[i], candidates[j]));
        }
    }
    Ok(out)
}

/// Grid problems sampled from the free states of the coarsest lattice.
pub fn sample_problems(grid: &Grid2D, n: usize, seed: u64) -> Result<Vec<(GridState, GridState)>, SampleError> {
    sample_pairs(&grid.coarse_free_states(), n, seed)
}

/// UAV problems: positions on the 9 m lattice, random headings, both at
/// rest.
pub fn sample_uav_problems(uav: &Uav4D, n: usize, seed: u64) -> Result<Vec<(UavState, UavState)>, SampleError> {
    let cells = uav.coarse_free_states(0, 0);
    let pairs = sample_pairs(&cells, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(pairs
        .into_iter()
        .map(|(a, b)| {
            let ta = rng.gen_range(0..NUM_HEADINGS as u8);
            let tb = rng.gen_range(0..NUM_HEADINGS as u8);
            (UavState { theta: ta, ..a }, UavState { theta: tb, ..b })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use amra_core::grid2d::Connectivity;
    use amra_core::Domain;

    #[test]
    fn two_states_give_that_pair() {
        let pairs = sample_pairs(&[1, 2], 1, 9).unwrap();
        assert!(pairs == vec![(1, 2)] || pairs == vec![(2, 1)]);
        assert_eq!(sample_pairs(&[1], 1, 9), Err(SampleError::TooFewStates(1)));
        assert_eq!(sample_pairs(&[1, 2], 3, 9), Err(SampleError::TooFewPairs { wanted: 3, available: 2 }));
    }

    #[test]
    fn same_seed_same_list() {
        let c: Vec<u32> = (0..50).collect();
        assert_eq!(sample_pairs(&c, 20, 4).unwrap(), sample_pairs(&c, 20, 4).unwrap());
        assert_ne!(sample_pairs(&c, 20, 4).unwrap(), sample_pairs(&c, 20, 5).unwrap());
    }

    #[test]
    fn hundred_pairs_on_a_coarse_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let map = crate::fixtures::random_grid(&mut rng, 64, 64, 0.2, (1, 1));
        let grid = Grid2D::new(map, Connectivity::Eight, &[1, 8]).unwrap();
        let pairs = sample_problems(&grid, 100, 3).unwrap();
        assert_eq!(pairs.len(), 100);
        let distinct: HashSet<_> = pairs.iter().collect();
        assert_eq!(distinct.len(), 100);
        for (s, g) in pairs {
            assert_ne!(s, g);
            for x in [s, g] {
                assert!(x.x % 8 == 0 && x.y % 8 == 0 && grid.is_valid(&x));
            }
        }
    }
}
