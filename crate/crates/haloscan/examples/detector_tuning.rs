//! Field-tunable transition frequencies of the electron-on-helium
//! detector: the lateral mode across the centimeter band and the
//! vertical mode across the millimeter band.
//!
//! ```bash
//! cargo run --example detector_tuning
//! ```

use haloscan::detector::{
    dipole_length, lateral_field_for_frequency, lateral_mode_frequency, tuning_table,
    vertical_field_for_frequency, vertical_zero_field_splitting, DetectorMode,
};
use haloscan::units::ELECTRON_MASS;
use std::f64::consts::PI;

fn main() -> haloscan::Result<()> {
    let depth = 0.5e-6;

    // The quoted operating point: 30 V/cm at 0.5 um depth.
    let omega = lateral_mode_frequency(3000.0, depth, ELECTRON_MASS)?;
    println!(
        "lateral mode at 30 V/cm, 0.5 um depth: {:.4} GHz (dipole length {:.3e} m)",
        omega / (2.0 * PI * 1e9),
        dipole_length(omega, ELECTRON_MASS)?
    );

    println!("\nlateral tuning curve (4.5-6.5 GHz):");
    println!("{:>14} {:>12}", "E (V/cm)", "f (GHz)");
    let lo = lateral_field_for_frequency(2.0 * PI * 4.5e9, depth, ELECTRON_MASS)?;
    let hi = lateral_field_for_frequency(2.0 * PI * 6.5e9, depth, ELECTRON_MASS)?;
    for point in tuning_table(DetectorMode::Lateral, lo, hi, 9, depth, ELECTRON_MASS)? {
        println!("{:>14.2} {:>12.4}", point.bias_field_v_per_m / 100.0, point.frequency_ghz);
    }

    println!(
        "\nvertical mode zero-field splitting: {:.2} GHz",
        vertical_zero_field_splitting() / (2.0 * PI * 1e9)
    );
    println!("\nvertical tuning curve (120-280 GHz):");
    println!("{:>14} {:>12}", "E (V/cm)", "f (GHz)");
    let lo = vertical_field_for_frequency(2.0 * PI * 120e9)?;
    let hi = vertical_field_for_frequency(2.0 * PI * 280e9)?;
    for point in tuning_table(DetectorMode::Vertical, lo, hi, 9, depth, ELECTRON_MASS)? {
        println!("{:>14.2} {:>12.2}", point.bias_field_v_per_m / 100.0, point.frequency_ghz);
    }
    Ok(())
}
