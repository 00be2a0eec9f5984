//! The blackbody background across both detection bands: Planck
//! occupancies, the fluctuating thermal field, and the band-limited
//! excitation probability in log10.
//!
//! ```bash
//! cargo run --example thermal_background
//! ```

use haloscan::detector::{DetectorMode, DetectorSpec};
use haloscan::thermal::{
    log10_thermal_probability, planck_occupancy, thermal_field_rms, thermal_spectrum_table,
    ThermalBand,
};
use haloscan::units::ELECTRON_MASS;
use std::f64::consts::PI;

fn main() -> haloscan::Result<()> {
    let temperature = 0.01;
    println!("thermal environment at {} mK:", temperature * 1e3);
    println!(
        "  occupancy at 5 GHz: {:.3e}, at 120 GHz: {:.3e}",
        planck_occupancy(2.0 * PI * 5e9, temperature)?,
        planck_occupancy(2.0 * PI * 120e9, temperature)?
    );
    println!("  rms fluctuation field: {:.3e} V/m", thermal_field_rms(temperature)?);

    let detector = |mode, tau: f64| DetectorSpec {
        mode,
        bias_field: 3000.0,
        electrode_depth: 0.5e-6,
        atom_mass: ELECTRON_MASS,
        ensemble_size: 100_000_000,
        temperature,
        coherence_time: tau,
    };

    let half_width = 2.0 * PI * 1e3; // 1 kHz broadening

    let cm = detector(DetectorMode::Lateral, 1e-4);
    let band = ThermalBand { center: 2.0 * PI * 5e9, half_width, temperature };
    println!(
        "\ncentimeter band, N = 1e8, tau = 1e-4 s at 5 GHz: log10 P = {:.3}",
        log10_thermal_probability(&cm, &band, 1e-4)?
    );

    println!("\ncentimeter spectrum (4.5-6.5 GHz):");
    println!("{:>10} {:>14}", "f (GHz)", "log10 P");
    for point in thermal_spectrum_table(&cm, 4.5e9, 6.5e9, 9, half_width, 1e-4)? {
        println!("{:>10.2} {:>14.3}", point.frequency_ghz, point.log10_p_therm);
    }

    let mm = detector(DetectorMode::Vertical, 1e-5);
    println!("\nmillimeter spectrum (120-200 GHz), far below any linear float:");
    println!("{:>10} {:>14}", "f (GHz)", "log10 P");
    for point in thermal_spectrum_table(&mm, 120e9, 200e9, 9, half_width, 1e-5)? {
        println!("{:>10.1} {:>14.1}", point.frequency_ghz, point.log10_p_therm);
    }
    Ok(())
}
