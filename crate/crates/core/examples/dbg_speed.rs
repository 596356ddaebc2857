// debug binary
use bdris_core::bdris_opt::*;
use bdris_core::channel::{build_channels, Scenario};
use std::time::Instant;

fn main() {
    for (n, m) in [(2usize, 16usize), (4, 16)] {
        let sc = Scenario { n_t: n, n_r: n, m, ..Scenario::default() };
        let cs = build_channels(&sc, 0).unwrap();
        let noise = cs.scenario.noise_mw();
        let p = cs.scenario.tx_power_mw;
        let t0 = Instant::now();
        let (_, _, tr) = maximize_capacity(&cs, noise, p, InitStrategy::BestOf, &OptimizerConfig::default()).unwrap();
        let steps: usize = tr.mm_rounds.iter().flat_map(|mm| mm.inner.iter()).map(|t| t.step_sizes.len()).sum();
        let rounds: usize = tr.mm_rounds.iter().map(|mm| mm.capacity_nats.len() - 1).sum();
        println!(
            "{n}x{n} m={m}: {:.1} ms, outer {}, mm_rounds {rounds}, steps {steps}, C {:.4} -> {:.4} nats, wall cov {:.0} ms theta {:.0} ms",
            t0.elapsed().as_secs_f64() * 1e3,
            tr.outer_iterations(),
            tr.outer_capacity_nats.first().unwrap(),
            tr.outer_capacity_nats.last().unwrap(),
            tr.wall_ms_covariance, tr.wall_ms_scattering,
        );
    }
}
