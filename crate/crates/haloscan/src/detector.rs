//! The electron-on-helium artificial atom: tunable transition frequencies
//! of the lateral (centimeter-band) and vertical (millimeter-band)
//! vibrational modes, the effective dipole length, and ensemble parameters.
//!
//! Neither tuning curve has a published closed form, so both are explicit
//! models anchored to the quoted operating points:
//!
//! * lateral mode: harmonic restoring force from the biased electrode at
//!   depth `l`, ω = √(eE/(ml)). Reproduces the 5.143 GHz anchor at
//!   30 V/cm, 0.5 µm to about 0.5%.
//! * vertical mode: hydrogen-like surface-state spectrum E_n = −R_He/n²
//!   from the helium image potential, plus a first-order Stark shift
//!   e·E·(⟨z⟩₂ − ⟨z⟩₁). Only the achievable range, monotonicity, and
//!   continuity are contractual; the curve shape is a model choice.

use crate::error::{Error, Result};
use crate::units::{
    ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, PLANCK, VACUUM_PERMITTIVITY,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Dielectric constant of liquid helium-4 at low temperature.
pub const HELIUM_DIELECTRIC: f64 = 1.0572;

/// Image-charge coupling Λ = (ε−1)/(4(ε+1)).
pub fn image_coupling() -> f64 {
    (HELIUM_DIELECTRIC - 1.0) / (4.0 * (HELIUM_DIELECTRIC + 1.0))
}

/// Rydberg energy in J computed from the frozen constants.
fn rydberg_energy() -> f64 {
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
    ELECTRON_MASS * e2 * e2
        / (8.0 * VACUUM_PERMITTIVITY * VACUUM_PERMITTIVITY * PLANCK * PLANCK)
}

/// Bohr radius in m computed from the frozen constants.
fn bohr_radius() -> f64 {
    4.0 * PI * VACUUM_PERMITTIVITY * HBAR * HBAR
        / (ELECTRON_MASS * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE)
}

/// Which vibrational mode of the trapped electron serves as the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorMode {
    /// In-plane (y) vibration against the biasing electrode; centimeter band.
    Lateral,
    /// Out-of-plane (z) vibration in the image potential; millimeter band.
    Vertical,
}

/// Frequency band the mode is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Centimeter,
    Millimeter,
}

impl Band {
    /// Validated tunable range in ordinary frequency (Hz).
    pub fn frequency_range(self) -> (f64, f64) {
        match self {
            Band::Centimeter => (4.5e9, 6.5e9),
            Band::Millimeter => (120e9, 280e9),
        }
    }

    pub fn contains(self, frequency_hz: f64) -> bool {
        let (lo, hi) = self.frequency_range();
        (lo..=hi).contains(&frequency_hz)
    }
}

impl DetectorMode {
    pub fn band(self) -> Band {
        match self {
            DetectorMode::Lateral => Band::Centimeter,
            DetectorMode::Vertical => Band::Millimeter,
        }
    }
}

/// A transition frequency together with its band tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequency {
    pub omega_eg: f64,
    pub band: Band,
}

impl ModeFrequency {
    /// True when the frequency sits inside the band's validated range.
    pub fn in_validated_range(&self) -> bool {
        self.band.contains(self.omega_eg / (2.0 * PI))
    }
}

/// One tunable electron mode plus the ensemble parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub mode: DetectorMode,
    /// Biasing electric field (V/m).
    pub bias_field: f64,
    /// Electrode depth below the helium surface (m); lateral mode only.
    pub electrode_depth: f64,
    /// Mass of the artificial atom (kg).
    pub atom_mass: f64,
    /// Number of atoms in the ensemble.
    pub ensemble_size: u64,
    /// Operating temperature (K).
    pub temperature: f64,
    /// Ensemble coherence time τ_q (s).
    pub coherence_time: f64,
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bias_field < 0.0 || !self.bias_field.is_finite() {
            return Err(Error::domain(format!(
                "bias field must be non-negative, got {}",
                self.bias_field
            )));
        }
        if self.mode == DetectorMode::Lateral && self.electrode_depth <= 0.0 {
            return Err(Error::domain(format!(
                "electrode depth must be positive, got {}",
                self.electrode_depth
            )));
        }
        if self.atom_mass <= 0.0 {
            return Err(Error::domain("atom mass must be positive"));
        }
        if self.ensemble_size < 1 {
            return Err(Error::domain("ensemble size must be at least 1"));
        }
        if self.temperature <= 0.0 {
            return Err(Error::domain(format!(
                "temperature must be positive, got {} K",
                self.temperature
            )));
        }
        if self.coherence_time <= 0.0 {
            return Err(Error::domain("coherence time must be positive"));
        }
        Ok(())
    }

    /// Transition frequency of the configured mode at the configured bias.
    pub fn transition_frequency(&self) -> Result<ModeFrequency> {
        self.validate()?;
        let omega_eg = match self.mode {
            DetectorMode::Lateral => {
                lateral_mode_frequency(self.bias_field, self.electrode_depth, self.atom_mass)?
            }
            DetectorMode::Vertical => vertical_mode_frequency(self.bias_field)?,
        };
        Ok(ModeFrequency {
            omega_eg,
            band: self.mode.band(),
        })
    }

    /// Effective dipole length at the configured operating point.
    pub fn dipole_length(&self) -> Result<f64> {
        dipole_length(self.transition_frequency()?.omega_eg, self.atom_mass)
    }
}

/// Lateral-mode eigenfrequency ω = √(eE/(ml)) (rad/s).
pub fn lateral_mode_frequency(bias_field: f64, electrode_depth: f64, atom_mass: f64) -> Result<f64> {
    if bias_field <= 0.0 || !bias_field.is_finite() {
        return Err(Error::domain(format!(
            "lateral mode requires a positive bias field, got {bias_field}"
        )));
    }
    if electrode_depth <= 0.0 {
        return Err(Error::domain(format!(
            "electrode depth must be positive, got {electrode_depth}"
        )));
    }
    if atom_mass <= 0.0 {
        return Err(Error::domain("atom mass must be positive"));
    }
    Ok((ELEMENTARY_CHARGE * bias_field / (atom_mass * electrode_depth)).sqrt())
}

/// Bias field that puts the lateral mode at `omega_eg`.
pub fn lateral_field_for_frequency(omega_eg: f64, electrode_depth: f64, atom_mass: f64) -> Result<f64> {
    if omega_eg <= 0.0 || electrode_depth <= 0.0 || atom_mass <= 0.0 {
        return Err(Error::domain("all arguments must be positive"));
    }
    Ok(omega_eg * omega_eg * atom_mass * electrode_depth / ELEMENTARY_CHARGE)
}

/// Zero-field 1→2 splitting of the vertical surface states (rad/s).
pub fn vertical_zero_field_splitting() -> f64 {
    let lambda = image_coupling();
    0.75 * lambda * lambda * rydberg_energy() / HBAR
}

/// Stark dipole ⟨z⟩₂ − ⟨z⟩₁ = 4.5 a_He of the vertical states (m).
pub fn vertical_stark_length() -> f64 {
    4.5 * bohr_radius() / image_coupling()
}

/// Vertical-mode eigenfrequency: zero-field splitting plus the linear
/// Stark shift e·E·Δz/ħ (rad/s). Strictly increasing in E.
pub fn vertical_mode_frequency(bias_field: f64) -> Result<f64> {
    if bias_field < 0.0 || !bias_field.is_finite() {
        return Err(Error::domain(format!(
            "vertical mode requires a non-negative bias field, got {bias_field}"
        )));
    }
    Ok(vertical_zero_field_splitting()
        + ELEMENTARY_CHARGE * bias_field * vertical_stark_length() / HBAR)
}

/// Bias field that puts the vertical mode at `omega_eg`.
pub fn vertical_field_for_frequency(omega_eg: f64) -> Result<f64> {
    let omega0 = vertical_zero_field_splitting();
    if omega_eg < omega0 {
        return Err(Error::domain(format!(
            "vertical mode cannot reach below the zero-field splitting ({:.4} GHz)",
            omega0 / (2.0 * PI * 1e9)
        )));
    }
    Ok((omega_eg - omega0) * HBAR / (ELEMENTARY_CHARGE * vertical_stark_length()))
}

/// Harmonic-oscillator dipole length d̃ = √(ħ/(2 m ω)) (m).
pub fn dipole_length(omega_eg: f64, atom_mass: f64) -> Result<f64> {
    if omega_eg <= 0.0 {
        return Err(Error::domain(format!(
            "transition frequency must be positive, got {omega_eg}"
        )));
    }
    if atom_mass <= 0.0 {
        return Err(Error::domain("atom mass must be positive"));
    }
    Ok((HBAR / (2.0 * atom_mass * omega_eg)).sqrt())
}

/// One row of a tuning-curve table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TuningPoint {
    pub bias_field_v_per_m: f64,
    pub frequency_ghz: f64,
}

/// Tabulate the mode's tuning curve over `[field_lo, field_hi]`.
pub fn tuning_table(
    mode: DetectorMode,
    field_lo: f64,
    field_hi: f64,
    points: usize,
    electrode_depth: f64,
    atom_mass: f64,
) -> Result<Vec<TuningPoint>> {
    if points < 2 || field_hi <= field_lo {
        return Err(Error::domain("tuning table needs at least 2 points and a positive field span"));
    }
    (0..points)
        .map(|i| {
            let e = field_lo + (field_hi - field_lo) * i as f64 / (points - 1) as f64;
            let omega = match mode {
                DetectorMode::Lateral => lateral_mode_frequency(e, electrode_depth, atom_mass)?,
                DetectorMode::Vertical => vertical_mode_frequency(e)?,
            };
            Ok(TuningPoint {
                bias_field_v_per_m: e,
                frequency_ghz: omega / (2.0 * PI * 1e9),
            })
        })
        .collect()
}
