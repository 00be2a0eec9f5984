//! Monte-Carlo validation of the detection criterion: false-positive
//! rate under background only, and the power curve toward saturation.
//!
//! ```bash
//! cargo run --example detection_statistics
//! ```

use haloscan::montecarlo::{power_curve, simulate_campaign, CampaignSim};

fn main() -> haloscan::Result<()> {
    // Background-only campaigns in the Gaussian regime: the criterion
    // should fire about 5% of the time.
    let null = CampaignSim {
        n_shot: 100_000,
        p_signal: 0.0,
        p_background: 1e-3,
        trials: 100_000,
        master_seed: 42,
    };
    let fp = simulate_campaign(&null)?;
    println!(
        "false-positive rate over {} campaigns: {:.4} (CI95 [{:.4}, {:.4}])",
        fp.trials, fp.empirical_rate, fp.ci95_lo, fp.ci95_hi
    );

    // The quoted operating point: 1e4 shots, P = 1e-4, thermal background
    // 1.4e-9. The expected signal count is 1, so a single campaign only
    // detects with probability 1 - 1/e despite S/sqrt(B) ~ 270.
    let operating = CampaignSim {
        n_shot: 10_000,
        p_signal: 1e-4,
        p_background: 1.4e-9,
        trials: 50_000,
        master_seed: 42,
    };
    let rate = simulate_campaign(&operating)?;
    println!(
        "\noperating-point detection rate: {:.4} (1 - 1/e = {:.4})",
        rate.empirical_rate,
        1.0 - (-1.0f64).exp()
    );

    println!("\npower curve (1e4 shots, negligible background):");
    println!("{:>12} {:>10} {:>22}", "p_signal", "rate", "CI95");
    let base = CampaignSim {
        n_shot: 10_000,
        p_signal: 0.0,
        p_background: 1e-9,
        trials: 20_000,
        master_seed: 42,
    };
    let grid = [0.0, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3];
    for point in power_curve(&base, &grid)? {
        println!(
            "{:>12.0e} {:>10.4} {:>12.4} {:>9.4}",
            point.p_signal, point.detection_rate, point.ci95_lo, point.ci95_hi
        );
    }
    Ok(())
}
