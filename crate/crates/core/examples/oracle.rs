//! Closed loop with the analytic kinematic model in place of the network.
//!
//! `cargo run --release --example oracle -- [preset] [seed]`

use mppi_guidance::harness::{simulate, EngagementConfig};
use mppi_guidance::mppi::{mppi_step, GuidanceController, KinematicModel};

fn main() -> mppi_guidance::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map_or("case1", String::as_str);
    let cfg = if name.ends_with(".toml") {
        EngagementConfig::load(std::path::Path::new(name))?
    } else {
        EngagementConfig::preset(name)?
    };
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let ctrl = cfg.controller_config();
    let model = KinematicModel::new(ctrl.dt);
    let mut state = GuidanceController::new(ctrl)?.state;
    let report = simulate(&cfg, seed, |obs, s| {
        let (cmd, d) = mppi_step(&model, obs, &mut state, &ctrl, s)?;
        Ok((cmd, Some(d)))
    })?;
    match report.hit() {
        Some(h) => println!(
            "miss {:.4e} m  θ_LT {:.4}  φ_LT {:.4}  t {:.3} s",
            h.miss_distance, h.terminal_los.elevation, h.terminal_los.azimuth, h.time
        ),
        None => println!("{:?}", report.outcome),
    }
    for s in report.series.iter().step_by(100) {
        println!(
            "t {:5.2} R {:7.1} q ({:7.4},{:7.4}) qd ({:8.5},{:8.5}) u ({:7.1},{:7.1}) V {:5.1} {:?}",
            s.time,
            s.range,
            s.los.elevation,
            s.los.azimuth,
            s.los_rate.elevation,
            s.los_rate.azimuth,
            s.command.ay,
            s.command.az,
            s.interceptor_speed,
            s.diagnostics.map(|d| (d.lambda, d.effective_sample_size))
        );
    }
    Ok(())
}
