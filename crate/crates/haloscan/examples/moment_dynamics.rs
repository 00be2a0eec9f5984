//! Time-domain route to the readout spectrum: integrate the cavity
//! moment equations from the vacuum and watch the photon number relax to
//! the closed-form steady state.
//!
//! ```bash
//! cargo run --example moment_dynamics
//! ```

use haloscan::numerics::ode::StepControl;
use haloscan::readout::{
    integrate_moments, steady_state_photon_number, CavityParams, Interpretation, MomentOptions,
    ReadoutState,
};

fn main() -> haloscan::Result<()> {
    let cav = CavityParams {
        omega0: 1.0,
        coupling: 0.01,
        dissipation: 1e-4,
        drive_amplitude: 5e-5,
        drive_frequency: 1.0,
        temperature: 0.0,
        dispersive_min_ratio: 10.0,
    };
    let omega_eg = 1.5;
    let n_atoms = 1000;
    let state = ReadoutState { probability: 0.1, interpretation: Interpretation::Mixture };

    // Drive at the main dispersive peak.
    let derived = cav.dispersive(omega_eg, n_atoms, cav.omega0)?;
    let cav = CavityParams {
        drive_frequency: cav.omega0 - derived.collective_shift - derived.shift,
        ..cav
    };

    let closed = steady_state_photon_number(&cav, omega_eg, &state, n_atoms)?;
    println!("closed-form steady state: <a+a> = {closed:.6e}");

    let kappa = cav.kappa();
    let options = MomentOptions {
        t_end: 30.0 / kappa,
        samples: 12,
        control: StepControl::default(),
        initial_photon_number: 0.0,
    };
    let trajectory = integrate_moments(&cav, omega_eg, &state, n_atoms, &options)?;

    println!("\nrelaxation from the vacuum (time in units of 1/kappa):");
    println!("{:>10} {:>14} {:>12}", "t*kappa", "<a+a>", "rel gap");
    for sample in &trajectory.samples {
        println!(
            "{:>10.1} {:>14.6e} {:>12.3e}",
            sample.time * kappa,
            sample.photon_number,
            (sample.photon_number - closed).abs() / closed
        );
    }
    let final_gap = (trajectory.final_photon_number() - closed).abs() / closed;
    println!("\nfinal relative gap to the closed form: {final_gap:.3e}");
    Ok(())
}
