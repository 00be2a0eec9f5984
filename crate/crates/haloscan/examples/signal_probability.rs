//! The kinetic-mixing signal chain: effective field amplitude, coherence
//! times, and the excitation probability of the ensemble, including the
//! detuning (sinc) envelope.
//!
//! ```bash
//! cargo run --example signal_probability
//! ```

use haloscan::detector::{lateral_field_for_frequency, DetectorMode, DetectorSpec};
use haloscan::signal::{
    dark_coherence_time, effective_field_amplitude, ensemble_probability, DarkPhotonHypothesis,
};
use haloscan::units::{frequency_to_mass_ev, mass_ev_to_angular_frequency, ELECTRON_MASS};
use std::f64::consts::PI;

fn main() -> haloscan::Result<()> {
    let mass_ev = frequency_to_mass_ev(5e9)?;
    let hyp = DarkPhotonHypothesis {
        mass_ev,
        mixing: 1e-13,
        rho_dm_gev_cm3: 0.45,
        cos_theta: 1.0,
        v_dm: 1e-3,
    };
    println!("candidate mass {:.3} ueV (5 GHz)", mass_ev * 1e6);
    println!(
        "effective field at chi = 1: {:.4e} V/m; at chi = 1e-13: {:.4e} V/m",
        effective_field_amplitude(&DarkPhotonHypothesis { mixing: 1.0, ..hyp })?,
        effective_field_amplitude(&hyp)?
    );
    println!("field coherence time: {:.3e} s", dark_coherence_time(&hyp)?);

    // Tune the detector onto the candidate and drive for tau.
    let omega = mass_ev_to_angular_frequency(mass_ev)?;
    let det = DetectorSpec {
        mode: DetectorMode::Lateral,
        bias_field: lateral_field_for_frequency(omega, 0.5e-6, ELECTRON_MASS)?,
        electrode_depth: 0.5e-6,
        atom_mass: ELECTRON_MASS,
        ensemble_size: 100_000_000,
        temperature: 0.01,
        coherence_time: 1e-4,
    };
    let tau = 1e-4;
    let result = ensemble_probability(&det, &hyp, tau)?;
    println!(
        "\non resonance, N = 1e8, tau = {tau:.0e} s: P = {:.4e} (within coherence: {})",
        result.probability, !result.exceeds_coherence
    );
    let (ground, excited) = result.state_amplitudes();
    println!("state amplitudes: sqrt(1-P) = {ground:.6}, sqrt(P) = {excited:.3e}");

    println!("\ndetuning envelope (P relative to resonance):");
    println!("{:>16} {:>14}", "offset (kHz)", "P/P_res");
    let p_res = result.probability;
    for offset_khz in [0.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let omega_m = omega + 2.0 * PI * offset_khz * 1e3;
        let detuned = DarkPhotonHypothesis {
            mass_ev: omega_m * haloscan::units::HBAR / haloscan::units::ELEMENTARY_CHARGE,
            ..hyp
        };
        let p = ensemble_probability(&det, &detuned, tau)?.probability;
        println!("{:>16.1} {:>14.4e}", offset_khz, p / p_res);
    }
    Ok(())
}
