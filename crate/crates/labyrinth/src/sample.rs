//! Seeded, reproducible sampling of matrices, surjections, and mazes.
//!
//! All randomized checks in the crate and the command-line tool draw from
//! this sampler, so a report is a pure function of its configuration. The
//! generator is ChaCha8 ("chacha8-v1" in report headers): stable across
//! platforms and releases.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::ExactMatrix;
use crate::maze::{Maze, MazeSum, Passage};
use crate::ring::RingSpec;
use crate::sets::IndexSet;

/// Name and version of the pseudo-random generator, for report headers.
pub const RNG_ALGORITHM: &str = "chacha8-v1";

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn residue(&mut self, ring: RingSpec) -> u64 {
        self.rng.gen_range(0..ring.modulus())
    }

    pub fn nonzero_residue(&mut self, ring: RingSpec) -> u64 {
        self.rng.gen_range(1..ring.modulus())
    }

    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn matrix(&mut self, ring: RingSpec, rows: usize, cols: usize) -> ExactMatrix {
        let entries = (0..rows * cols).map(|_| self.residue(ring) as i64).collect();
        ExactMatrix::new(ring, rows, cols, entries).expect("shape is consistent")
    }

    /// A uniformly random surjection `[from] -> [onto]` by positions.
    pub fn surjection(&mut self, from: usize, onto: usize) -> Vec<usize> {
        assert!(from >= onto && onto >= 1);
        let mut image: Vec<usize> = (0..from).map(|_| self.rng.gen_range(0..onto)).collect();
        // Repair coverage: walk the targets and claim a slot for each missing
        // one, choosing among slots whose value is duplicated.
        loop {
            let mut count = vec![0usize; onto];
            for &v in &image {
                count[v] += 1;
            }
            let Some(missing) = count.iter().position(|&c| c == 0) else {
                return image;
            };
            let candidates: Vec<usize> =
                (0..from).filter(|&i| count[image[i]] > 1).collect();
            let pick = candidates[self.rng.gen_range(0..candidates.len())];
            image[pick] = missing;
        }
    }

    /// A random maze `Z -> X` with numeric endpoint sets, labels nonzero, and
    /// a middle set just large enough to cover both sides (plus an occasional
    /// extra passage).
    pub fn maze(&mut self, ring: RingSpec, max_set: usize) -> Maze {
        let nx = self.size(1, max_set);
        let nz = self.size(1, max_set);
        self.maze_between(ring, &IndexSet::numeric(nx), &IndexSet::numeric(nz))
    }

    pub fn maze_between(&mut self, ring: RingSpec, target: &IndexSet, source: &IndexSet) -> Maze {
        let base = target.len().max(source.len()).max(1);
        let extra = usize::from(self.rng.gen_ratio(1, 4));
        let middle = base + extra;
        let f = self.surjection(middle, target.len().max(1));
        let g = self.surjection(middle, source.len().max(1));
        let passages: Vec<Passage> = (0..middle)
            .map(|y| Passage { to: f[y], from: g[y], label: self.nonzero_residue(ring) })
            .collect();
        Maze::normalized(ring, target.clone(), source.clone(), passages)
            .expect("sampled passages cover both endpoint sets")
    }

    /// A composable pair `(p, q)` with `p: Z -> X` and `q: V -> Z`.
    pub fn composable_pair(&mut self, ring: RingSpec, max_set: usize) -> (MazeSum, MazeSum) {
        let nx = self.size(1, max_set);
        let nz = self.size(1, max_set);
        let nv = self.size(1, max_set);
        let p = self.maze_between(ring, &IndexSet::numeric(nx), &IndexSet::numeric(nz));
        let q = self.maze_between(ring, &IndexSet::numeric(nz), &IndexSet::numeric(nv));
        (MazeSum::from_maze(p), MazeSum::from_maze(q))
    }

    pub fn composable_triple(
        &mut self,
        ring: RingSpec,
        max_set: usize,
    ) -> (MazeSum, MazeSum, MazeSum) {
        let nx = self.size(1, max_set);
        let nz = self.size(1, max_set);
        let nv = self.size(1, max_set);
        let nw = self.size(1, max_set);
        let p = self.maze_between(ring, &IndexSet::numeric(nx), &IndexSet::numeric(nz));
        let q = self.maze_between(ring, &IndexSet::numeric(nz), &IndexSet::numeric(nv));
        let r = self.maze_between(ring, &IndexSet::numeric(nv), &IndexSet::numeric(nw));
        (MazeSum::from_maze(p), MazeSum::from_maze(q), MazeSum::from_maze(r))
    }
}
