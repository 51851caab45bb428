//! Derives the generational-distance threshold used by the convergence
//! acceptance check: ZDT1, 1000 individuals on 10 islands, 10 iterations of
//! 10 generations, seeds 1001..=1010. Prints mean, sample deviation and
//! mean + 3 sigma.
//!
//!     cargo run --release -p offspring --example calibrate_convergence

use offspring::distribution::local::SyncExecutor;
use offspring::distribution::Executor;
use offspring::emo_strategy::{island_task_handler, EmoStrategy, IslandModelConfig};
use offspring::engine::EngineParams;
use offspring::problems::{generational_distance, Problem, ProblemKind};
use offspring::strategy::Controller;

fn main() -> offspring::Result<()> {
    let reference = Problem::new(ProblemKind::Zdt1).true_front_sample(10_000);
    let mut gds = Vec::new();
    for seed in 1001..=1010u64 {
        let cfg = IslandModelConfig {
            problem: ProblemKind::Zdt1,
            total_individuals: 1000,
            island_count: 10,
            iterations: 10,
            engine: EngineParams { generations: 10, ..EngineParams::default() },
            master_seed: seed,
            migration_count: 2,
            global_capacity: Some(1000),
            ..IslandModelConfig::default()
        };
        let mut strategy = EmoStrategy::new(cfg)?;
        let mut exec = SyncExecutor::new(island_task_handler());
        exec.start()?;
        Controller::default().run(&mut strategy, &mut exec).map_err(|a| a.cause)?;
        let gd = generational_distance(&strategy.global_front().objectives(), &reference)?;
        println!("seed {seed}: gd {gd:.6}");
        gds.push(gd);
    }
    let n = gds.len() as f64;
    let mean = gds.iter().sum::<f64>() / n;
    let sd = (gds.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    println!("mean {mean:.6} sd {sd:.6} threshold {:.6}", mean + 3.0 * sd);
    Ok(())
}
