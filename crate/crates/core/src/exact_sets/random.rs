use rand::Rng;

use super::{rat, IntervalSet};

/// Shape of randomly drawn sets: each is a union of up to `max_pieces`
/// intervals with endpoints on the grid `k / grid`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSetShape {
    pub grid: u32,
    pub max_pieces: u32,
}

impl Default for RandomSetShape {
    fn default() -> Self {
        RandomSetShape {
            grid: 64,
            max_pieces: 4,
        }
    }
}

/// One random set. May be empty.
pub fn random_set<R: Rng + ?Sized>(rng: &mut R, shape: RandomSetShape) -> IntervalSet {
    let grid = i64::from(shape.grid.max(1));
    let pieces = rng.gen_range(0..=shape.max_pieces);
    IntervalSet::canonicalize((0..pieces).map(|_| {
        let lo = rng.gen_range(0..grid);
        let hi = rng.gen_range(lo + 1..=grid);
        (rat(lo, grid), rat(hi, grid))
    }))
    .expect("grid endpoints lie in [0,1] with lo < hi")
}

pub fn random_sets<R: Rng + ?Sized>(rng: &mut R, n: usize, shape: RandomSetShape) -> Vec<IntervalSet> {
    (0..n).map(|_| random_set(rng, shape)).collect()
}
