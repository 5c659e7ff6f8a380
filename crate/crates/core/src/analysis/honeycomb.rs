use super::cheeger::cheeger_hexagon;
use crate::energy::PartitionState;
use crate::error::{invalid, Result};
use crate::grid::make_grid;
use crate::optimizer::{optimize, OptimizerConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneycombRow {
    pub k: usize,
    /// Lowest final energy over the seeds.
    pub best_energy: f64,
    pub best_seed: u64,
    /// `|D|^(1/2) best_energy / k^(3/2)`.
    pub scaled: f64,
    /// `scaled / (β h(H))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneycombTable {
    pub beta: f64,
    pub side: f64,
    pub h: f64,
    /// `β h(H)`, `H` the unit-area regular hexagon.
    pub target: f64,
    pub rows: Vec<HoneycombRow>,
}

/// A single optimizer run of the experiment.
#[derive(Debug, Clone)]
pub struct HoneycombRun {
    pub k: usize,
    pub seed: u64,
    pub energy: f64,
    pub sweeps: usize,
    pub state: PartitionState,
}

/// Optimal-partition energies of a square for several `k`, best over the
/// seeds, scaled to compare with the hexagonal limit. Runs are independent
/// and merged in `(k, seed)` order.
pub fn honeycomb_scaling(
    beta: f64,
    side: f64,
    k_values: &[usize],
    h: f64,
    seeds: &[u64],
) -> Result<(HoneycombTable, Vec<HoneycombRun>)> {
    if k_values.is_empty() || k_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("k_values", "must be nonempty and strictly increasing"));
    }
    if seeds.len() < 2 {
        return Err(invalid("seeds", "at least two seeds are required"));
    }
    let grid = make_grid(&[side, side], h)?;
    let jobs: Vec<(usize, u64)> = k_values
        .iter()
        .flat_map(|&k| seeds.iter().map(move |&s| (k, s)))
        .collect();
    let runs: Vec<HoneycombRun> = jobs
        .par_iter()
        .map(|&(k, seed)| {
            let mut config = OptimizerConfig::new(grid, k);
            config.beta = beta;
            config.seed = seed;
            let (state, trace) = optimize(&config)?;
            Ok(HoneycombRun {
                k,
                seed,
                energy: *trace.energies().last().expect("trace is never empty"),
                sweeps: trace.rows.len() - 1,
                state,
            })
        })
        .collect::<Result<_>>()?;

    let target = beta * cheeger_hexagon();
    let area = grid.box_volume();
    let rows = k_values
        .iter()
        .map(|&k| {
            let best = runs
                .iter()
                .filter(|r| r.k == k)
                .min_by(|a, b| a.energy.total_cmp(&b.energy))
                .expect("every k has runs");
            let scaled = area.sqrt() * best.energy / (k as f64).powf(1.5);
            HoneycombRow {
                k,
                best_energy: best.energy,
                best_seed: best.seed,
                scaled,
                ratio: scaled / target,
            }
        })
        .collect();
    Ok((
        HoneycombTable {
            beta,
            side,
            h,
            target,
            rows,
        },
        runs,
    ))
}
