//! Plain-text dump of a trained learner's Novelty Map and subpopulations.

use crate::learner::Learner;

/// Renders the learner state: a summary line, then per cell its map weight
/// array followed by every individual as group, index, fitness, and genes.
/// Floats use the default shortest round-trip formatting, so the dump is
/// lossless.
pub fn render_snapshot(learner: &Learner) -> String {
    let params = learner.params();
    let mut out = format!(
        "snapshot cells={} best={} novel={} trials={} evolutions={} map_updates={}\n",
        params.map_size,
        params.n_best,
        params.n_novel,
        learner.trial_counter(),
        learner.evolution_count(),
        learner.map_update_count(),
    );
    for (index, cell) in learner.cells().iter().enumerate() {
        out.push_str(&format!("cell {index}\n"));
        match learner.map().cells().get(index) {
            Some(weights) => {
                out.push_str("map");
                for w in weights {
                    out.push_str(&format!(" {w}"));
                }
                out.push('\n');
            }
            None => out.push_str("map unset\n"),
        }
        for (group, individuals) in [("best", &cell.best), ("novel", &cell.novel)] {
            for (slot, individual) in individuals.iter().enumerate() {
                out.push_str(&format!("{group} {slot} fitness {} genes", individual.fitness));
                for gene in &individual.chromosome {
                    out.push_str(&format!(" {gene}"));
                }
                out.push('\n');
            }
        }
    }
    out
}
