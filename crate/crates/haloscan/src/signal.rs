//! Kinetic-mixing signal model: the effective electric field seen by the
//! detector, the induced transition probability of a single atom and of the
//! N-atom ensemble, and the coherence-time limits on the drive duration.

use crate::detector::{dipole_length, DetectorSpec};
use crate::error::{Error, Result};
use crate::units::{
    density_to_si, mass_ev_to_angular_frequency, ELEMENTARY_CHARGE, HBAR, VACUUM_PERMITTIVITY,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A candidate dark photon: mass, mixing strength, and halo parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkPhotonHypothesis {
    /// Mass expressed in eV.
    pub mass_ev: f64,
    /// Dimensionless kinetic-mixing strength χ.
    pub mixing: f64,
    /// Local dark-matter energy density (GeV/cm³).
    pub rho_dm_gev_cm3: f64,
    /// Cosine of the angle between the field polarization and the dipole.
    pub cos_theta: f64,
    /// Dark-matter virial speed as a fraction of c.
    pub v_dm: f64,
}

impl DarkPhotonHypothesis {
    pub fn validate(&self) -> Result<()> {
        if self.mass_ev <= 0.0 || !self.mass_ev.is_finite() {
            return Err(Error::domain(format!("mass must be positive, got {} eV", self.mass_ev)));
        }
        if self.mixing < 0.0 {
            return Err(Error::domain("mixing strength must be non-negative"));
        }
        if self.rho_dm_gev_cm3 < 0.0 {
            return Err(Error::domain("dark-matter density must be non-negative"));
        }
        if self.cos_theta.abs() > 1.0 {
            return Err(Error::domain(format!("|cos Θ| must be ≤ 1, got {}", self.cos_theta)));
        }
        if self.v_dm <= 0.0 || self.v_dm >= 1.0 {
            return Err(Error::domain(format!("v_DM must lie in (0, 1), got {}", self.v_dm)));
        }
        Ok(())
    }

    /// Mass expressed as the field's angular oscillation frequency (rad/s).
    pub fn angular_frequency(&self) -> Result<f64> {
        mass_ev_to_angular_frequency(self.mass_ev)
    }
}

/// Outcome of an ensemble excitation-probability evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcitationResult {
    /// Excitation probability, clipped to [0, 1].
    pub probability: f64,
    /// True when the detuning lies in the central sinc lobe, |Δ|τ/2 < π.
    pub on_resonance: bool,
    /// Drive duration actually used (s).
    pub tau_used: f64,
    /// Dark-photon field coherence time (s).
    pub tau_dark_photon: f64,
    /// True when `tau_used` exceeds min(τ_DP, τ_q); the first-order formula
    /// is then optimistic and the caller should treat the value as a bound.
    pub exceeds_coherence: bool,
    /// True when the perturbative value exceeded 1 and was clipped.
    pub clipped: bool,
}

impl ExcitationResult {
    /// Amplitudes (√(1−P), √P) of the ground/one-excitation superposition.
    pub fn state_amplitudes(&self) -> (f64, f64) {
        ((1.0 - self.probability).sqrt(), self.probability.sqrt())
    }
}

/// Effective mixed-field amplitude χ·√(2ρ/ε₀) in V/m.
pub fn effective_field_amplitude(hyp: &DarkPhotonHypothesis) -> Result<f64> {
    hyp.validate()?;
    let rho_si = density_to_si(hyp.rho_dm_gev_cm3)?;
    Ok(hyp.mixing * (2.0 * rho_si / VACUUM_PERMITTIVITY).sqrt())
}

/// Coherence time of the dark-photon field, τ_DP = 2π/(ω_M v²).
pub fn dark_coherence_time(hyp: &DarkPhotonHypothesis) -> Result<f64> {
    hyp.validate()?;
    Ok(2.0 * PI / (hyp.angular_frequency()? * hyp.v_dm * hyp.v_dm))
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// First-order transition probability of a single atom driven for `tau`:
/// |e d̃ χ √(2ρ/ε₀) cosΘ / 2ħ|² · sinc²((ω_eg − ω_M)τ/2) · τ².
pub fn single_atom_probability(
    det: &DetectorSpec,
    hyp: &DarkPhotonHypothesis,
    tau: f64,
) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::domain(format!("drive duration must be positive, got {tau}")));
    }
    det.validate()?;
    let omega_eg = det.transition_frequency()?.omega_eg;
    let d_eg = dipole_length(omega_eg, det.atom_mass)?;
    let field = effective_field_amplitude(hyp)?;
    let rabi_half = ELEMENTARY_CHARGE * d_eg * field * hyp.cos_theta / (2.0 * HBAR);
    let detuning = omega_eg - hyp.angular_frequency()?;
    let envelope = sinc(detuning * tau / 2.0);
    Ok(rabi_half * rabi_half * envelope * envelope * tau * tau)
}

/// Ensemble transition probability: N times the single-atom value, with
/// coherence bookkeeping and clipping of the perturbative result.
pub fn ensemble_probability(
    det: &DetectorSpec,
    hyp: &DarkPhotonHypothesis,
    tau: f64,
) -> Result<ExcitationResult> {
    let single = single_atom_probability(det, hyp, tau)?;
    let raw = det.ensemble_size as f64 * single;
    let tau_dp = dark_coherence_time(hyp)?;
    let omega_eg = det.transition_frequency()?.omega_eg;
    let detuning = omega_eg - hyp.angular_frequency()?;
    let clipped = raw > 1.0;
    Ok(ExcitationResult {
        probability: raw.min(1.0),
        on_resonance: (detuning * tau / 2.0).abs() < PI,
        tau_used: tau,
        tau_dark_photon: tau_dp,
        exceeds_coherence: tau > tau_dp.min(det.coherence_time),
        clipped,
    })
}
