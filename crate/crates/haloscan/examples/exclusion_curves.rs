//! Mixing-strength exclusion curves across both bands, with the
//! square-root-of-N enhancement between ensemble sizes.
//!
//! ```bash
//! cargo run --example exclusion_curves
//! ```

use haloscan::detector::{DetectorMode, DetectorSpec};
use haloscan::scan::{exclusion_curve, ExclusionSettings};
use haloscan::units::ELECTRON_MASS;
use std::f64::consts::PI;

fn main() -> haloscan::Result<()> {
    let detector = |mode, n| DetectorSpec {
        mode,
        bias_field: 3000.0,
        electrode_depth: 0.5e-6,
        atom_mass: ELECTRON_MASS,
        ensemble_size: n,
        temperature: 0.01,
        coherence_time: 1e-4,
    };
    let settings = |f_lo, f_hi, tau| ExclusionSettings {
        f_lo,
        f_hi,
        points: 5,
        p_target: 1e-4,
        tau,
        band_half_width: 2.0 * PI * 1e3,
        rho_dm_gev_cm3: 0.45,
        cos_theta: 1.0,
    };

    println!("centimeter band (P = 1e-4, tau = 1e-4 s):");
    println!("{:>12} {:>10} {:>12} {:>12} {:>12}", "mass (ueV)", "f (GHz)", "N=1e6", "N=1e7", "N=1e8");
    let cm = settings(4.5e9, 6.5e9, 1e-4);
    let curves: Vec<_> = [1_000_000u64, 10_000_000, 100_000_000]
        .iter()
        .map(|&n| exclusion_curve(&detector(DetectorMode::Lateral, n), &cm).unwrap())
        .collect();
    for ((small, medium), large) in curves[0].iter().zip(&curves[1]).zip(&curves[2]) {
        println!(
            "{:>12.3} {:>10.2} {:>12.3e} {:>12.3e} {:>12.3e}",
            small.mass_uev, small.frequency_ghz, small.chi, medium.chi, large.chi
        );
    }

    println!("\nmillimeter band (P = 1e-4, tau = 1e-5 s, N = 1e8):");
    println!("{:>12} {:>10} {:>12} {:>16}", "mass (ueV)", "f (GHz)", "chi", "log10 P_therm");
    let mm = settings(120e9, 200e9, 1e-5);
    for point in exclusion_curve(&detector(DetectorMode::Vertical, 100_000_000), &mm)? {
        println!(
            "{:>12.2} {:>10.1} {:>12.3e} {:>16.1}",
            point.mass_uev, point.frequency_ghz, point.chi, point.log10_p_therm
        );
    }
    Ok(())
}
