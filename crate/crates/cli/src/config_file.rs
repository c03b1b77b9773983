//! `key=value` config files mapped onto [`SolverConfig`]. Unspecified keys
//! keep their defaults for the problem's dimension and scenario.

use anyhow::{bail, Context, Result};
use gsdo::knn::GcParams;
use gsdo::SolverConfig;

/// Apply `key=value` lines to `config`. Blank lines and `#` comments are
/// ignored.
pub fn apply(config: &mut SolverConfig<f64>, text: &str) -> Result<()> {
    let mut levels = (config.gc.c1, config.gc.c2, config.gc.c3, config.gc.c4);
    let mut k_neighbors = config.gc.k_neighbors;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got `{line}`", lineno + 1);
        };
        let key = key.trim();
        let value = value.trim();
        let ctx = || format!("line {}: bad value for `{key}`", lineno + 1);
        match key {
            "t_max" | "budget" => config.t_max = value.parse().with_context(ctx)?,
            "t_lh" => config.t_lh = value.parse().with_context(ctx)?,
            "c1" => levels.0 = value.parse().with_context(ctx)?,
            "c2" => levels.1 = value.parse().with_context(ctx)?,
            "c3" => levels.2 = value.parse().with_context(ctx)?,
            "c4" => levels.3 = value.parse().with_context(ctx)?,
            "k_neighbors" => k_neighbors = value.parse().with_context(ctx)?,
            "delta_r" => config.delta_r = value.parse().with_context(ctx)?,
            "delta_d" => config.delta_d = value.parse().with_context(ctx)?,
            "eta_max" => config.eta_max = value.parse().with_context(ctx)?,
            "stage2_max_iters" => config.stage2_max_iters = value.parse().with_context(ctx)?,
            "k_global" => config.k_global = value.parse().with_context(ctx)?,
            "c_g" => config.c_g = value.parse().with_context(ctx)?,
            "delta_min" => config.delta_min = value.parse().with_context(ctx)?,
            "de_population" => config.de.population = Some(value.parse().with_context(ctx)?),
            "de_weight" => config.de.weight = value.parse().with_context(ctx)?,
            "de_crossover" => config.de.crossover = value.parse().with_context(ctx)?,
            "de_budget_per_dim" => config.de.budget_per_dim = value.parse().with_context(ctx)?,
            "de_n_starts_cap" => config.de.n_starts_cap = value.parse().with_context(ctx)?,
            "seed" => config.seed = value.parse().with_context(ctx)?,
            _ => bail!("line {}: unknown config key `{key}`", lineno + 1),
        }
    }
    config.gc = GcParams::new(levels.0, levels.1, levels.2, levels.3, k_neighbors)
        .map_err(|e| anyhow::anyhow!("classifier levels: {e}"))?;
    Ok(())
}
