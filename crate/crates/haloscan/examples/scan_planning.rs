//! Campaign planning: how long a full scan of each band takes, and the
//! confidence arithmetic at the per-point operating conditions.
//!
//! ```bash
//! cargo run --example scan_planning
//! ```

use haloscan::scan::{confidence, plan_scan, ScanPlan};

fn main() -> haloscan::Result<()> {
    let cm = ScanPlan {
        f_lo: 4.5e9,
        f_hi: 6.5e9,
        bandwidth: ScanPlan::bandwidth_from_q(5.5e9, 1e6)?, // 5.5 kHz
        dwell: 10.0,
        n_shot: 10_000,
        tau: 1e-4,
    };
    let summary = plan_scan(&cm)?;
    println!(
        "centimeter campaign: {} points x {} s = {:.2} days ({:.2}-{:.2} ueV)",
        summary.points, cm.dwell, summary.total_days, summary.mass_lo_uev, summary.mass_hi_uev
    );

    let mm = ScanPlan {
        f_lo: 120e9,
        f_hi: 200e9,
        bandwidth: 1.6e6,
        dwell: 100.0,
        n_shot: 10_000,
        tau: 1e-5,
    };
    let summary = plan_scan(&mm)?;
    println!(
        "millimeter campaign: {} points x {} s = {:.2} days ({:.2}-{:.2} ueV)",
        summary.points, mm.dwell, summary.total_days, summary.mass_lo_uev, summary.mass_hi_uev
    );
    let alt = plan_scan(&ScanPlan { dwell: 10.0, ..mm })?;
    println!("  (at a 10 s dwell the same band would take {:.2} days)", alt.total_days);

    // Per-point statistics at the centimeter operating conditions.
    println!("\nper-point confidence for 1e4 shots against a 1.4e-9 background:");
    println!("{:>12} {:>12} {:>10} {:>8}", "P_obs", "S/sqrt(B)", "level", "95%?");
    for p_obs in [1e-6, 1e-5, 1e-4] {
        let c = confidence(10_000, p_obs, 1.4e-9)?;
        println!(
            "{:>12.0e} {:>12.3e} {:>10.6} {:>8}",
            p_obs,
            c.significance,
            c.level,
            if c.passes_95 { "yes" } else { "no" }
        );
    }
    Ok(())
}
