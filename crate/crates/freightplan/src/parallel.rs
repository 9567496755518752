//! Knapsack jobs on a rayon pool.

use freightplan_core::heuristic::{KnapsackExecutor, KnapsackJob};
use freightplan_core::knapsack::{knapsack, KnapsackResult};
use rayon::prelude::*;

/// Solves the jobs of one sweep step in parallel. Results keep job order, so
/// plans are identical to the sequential executor.
pub struct Rayon {
    pool: rayon::ThreadPool,
}

impl Rayon {
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(Rayon { pool: rayon::ThreadPoolBuilder::new().num_threads(threads).build()? })
    }
}

impl KnapsackExecutor for Rayon {
    fn solve_all(&self, jobs: &[KnapsackJob]) -> Vec<KnapsackResult> {
        self.pool.install(|| jobs.par_iter().map(|j| knapsack(&j.items, j.capacity_kg)).collect())
    }
}
