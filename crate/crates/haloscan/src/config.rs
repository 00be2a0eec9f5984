//! Run configuration: a single TOML file per batch artifact.
//!
//! Unknown keys are always rejected so typos cannot silently fall back to
//! defaults. Physical invariants are re-checked when the domain objects
//! are constructed, so a config that parses can still fail validation.

use crate::detector::{DetectorMode, DetectorSpec};
use crate::error::{Error, Result};
use crate::readout::{CavityParams, Interpretation};
use crate::scan::ScanPlan;
use crate::units::ELECTRON_MASS;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Which subcommand this config drives; consulted by `run-all`.
    pub command: Option<String>,
    pub detector: Option<DetectorSection>,
    pub cavity: Option<CavitySection>,
    pub spectrum: Option<SpectrumSection>,
    pub hypothesis: Option<HypothesisSection>,
    pub scan: Option<ScanSection>,
    pub montecarlo: Option<MonteCarloSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub mode: DetectorMode,
    /// Biasing field (V/m).
    pub bias_field: f64,
    /// Electrode depth (m); required by the lateral mode.
    pub electrode_depth: Option<f64>,
    /// Atom mass (kg); defaults to the electron mass.
    pub atom_mass: Option<f64>,
    pub ensemble_size: u64,
    /// Temperature (K).
    pub temperature: f64,
    /// Ensemble coherence time τ_q (s).
    pub coherence_time: f64,
}

impl DetectorSection {
    pub fn to_spec(&self) -> Result<DetectorSpec> {
        let spec = DetectorSpec {
            mode: self.mode,
            bias_field: self.bias_field,
            electrode_depth: self.electrode_depth.unwrap_or(0.5e-6),
            atom_mass: self.atom_mass.unwrap_or(ELECTRON_MASS),
            ensemble_size: self.ensemble_size,
            temperature: self.temperature,
            coherence_time: self.coherence_time,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    /// Cavity frequency ω₀ (rad/s; normalized units are fine).
    pub frequency: f64,
    /// Coupling g (rad/s).
    pub coupling: f64,
    /// Dissipation γ (rad/s); exactly one of this and `quality_factor`.
    pub dissipation: Option<f64>,
    /// Alternative to `dissipation`: γ = ω₀/Q.
    pub quality_factor: Option<f64>,
    /// Drive amplitude ε_d (rad/s equivalent).
    pub drive_amplitude: f64,
    /// Cavity temperature (K); 0 disables the thermal floor.
    pub temperature: Option<f64>,
    /// Dispersive validity threshold |Δ| ≥ ratio·g (default 10).
    pub dispersive_min_ratio: Option<f64>,
}

impl CavitySection {
    pub fn to_params(&self) -> Result<CavityParams> {
        let dissipation = match (self.dissipation, self.quality_factor) {
            (Some(d), None) => d,
            (None, Some(q)) => {
                if q <= 0.0 {
                    return Err(Error::config("cavity quality_factor must be positive"));
                }
                self.frequency / q
            }
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "specify exactly one of cavity.dissipation and cavity.quality_factor",
                ))
            }
            (None, None) => {
                return Err(Error::config(
                    "one of cavity.dissipation or cavity.quality_factor is required",
                ))
            }
        };
        let params = CavityParams {
            omega0: self.frequency,
            coupling: self.coupling,
            dissipation,
            drive_amplitude: self.drive_amplitude,
            drive_frequency: self.frequency,
            temperature: self.temperature.unwrap_or(0.0),
            dispersive_min_ratio: self.dispersive_min_ratio.unwrap_or(10.0),
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    /// Atomic transition frequency ω_eg, same units as cavity.frequency.
    pub atom_frequency: f64,
    /// Ensemble size seen by the readout.
    pub ensemble_size: u64,
    /// One-excitation probability to encode in the spectrum.
    pub probability: f64,
    pub interpretation: Interpretation,
    pub grid_points: usize,
    /// Half-span of the drive grid in units of the dispersive pull Γ.
    pub grid_span: f64,
    /// Keep the additive thermal floor n̄ (the proportional figure form
    /// drops it).
    pub include_thermal_floor: Option<bool>,
    /// Subgrid size for the moment-equation self-check.
    pub ode_check_points: Option<usize>,
    /// Relative tolerance of the self-check (default 1e-4).
    pub ode_check_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisSection {
    /// Dark-matter density (GeV/cm³).
    pub rho_dm: f64,
    /// cos²Θ policy for campaign curves (default 1/3).
    pub cos_theta_sq: Option<f64>,
    /// Virial speed fraction (default 1e-3).
    pub v_dm: Option<f64>,
}

impl HypothesisSection {
    pub fn cos_theta(&self) -> Result<f64> {
        let sq = self.cos_theta_sq.unwrap_or(1.0 / 3.0);
        if !(0.0..=1.0).contains(&sq) || sq == 0.0 {
            return Err(Error::config(format!(
                "hypothesis.cos_theta_sq must lie in (0, 1], got {sq}"
            )));
        }
        Ok(sq.sqrt())
    }

    pub fn v_dm(&self) -> f64 {
        self.v_dm.unwrap_or(1e-3)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Band edges (Hz).
    pub f_lo: f64,
    pub f_hi: f64,
    /// Per-point bandwidth (Hz); exactly one of this and `quality_factor`.
    pub bandwidth: Option<f64>,
    /// Alternative: b = f_center/Q at the band center.
    pub quality_factor: Option<f64>,
    /// Dwell time per point (s).
    pub dwell: f64,
    pub n_shot: u64,
    /// Drive duration per shot (s).
    pub tau: f64,
    /// Thermal broadening δω/2π (Hz, ordinary frequency; default 1 kHz).
    pub band_half_width: Option<f64>,
    /// Mass-grid resolution for tables and curves (default 41).
    pub curve_points: Option<usize>,
    /// Probability targets for exclusion families.
    pub p_targets: Option<Vec<f64>>,
    /// Ensemble sizes for exclusion families (default: detector's N).
    pub ensemble_sizes: Option<Vec<u64>>,
    /// Also emit the plan at `alt_dwell` with a reconstruction note.
    pub emit_dwell_discrepancy: Option<bool>,
    pub alt_dwell: Option<f64>,
}

impl ScanSection {
    pub fn bandwidth(&self) -> Result<f64> {
        match (self.bandwidth, self.quality_factor) {
            (Some(b), None) => Ok(b),
            (None, Some(q)) => ScanPlan::bandwidth_from_q(0.5 * (self.f_lo + self.f_hi), q),
            (Some(_), Some(_)) => Err(Error::config(
                "specify exactly one of scan.bandwidth and scan.quality_factor",
            )),
            (None, None) => Err(Error::config(
                "one of scan.bandwidth or scan.quality_factor is required",
            )),
        }
    }

    /// δω in rad/s.
    pub fn band_half_width_rad(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.band_half_width.unwrap_or(1e3)
    }

    pub fn to_plan(&self) -> Result<ScanPlan> {
        let plan = ScanPlan {
            f_lo: self.f_lo,
            f_hi: self.f_hi,
            bandwidth: self.bandwidth()?,
            dwell: self.dwell,
            n_shot: self.n_shot,
            tau: self.tau,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub trials: u64,
    pub n_shot: u64,
    pub p_signal: f64,
    pub p_background: f64,
    pub seed: Option<u64>,
    /// Signal grid for the power curve (sorted ascending).
    pub p_signal_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<String>,
    /// Subset of {"csv", "json"}; default both.
    pub formats: Option<Vec<String>>,
    pub emit_plots: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    fn missing(section: &str) -> Error {
        Error::config(format!("config is missing the required [{section}] section"))
    }

    pub fn require_detector(&self) -> Result<&DetectorSection> {
        self.detector.as_ref().ok_or_else(|| Self::missing("detector"))
    }

    pub fn require_cavity(&self) -> Result<&CavitySection> {
        self.cavity.as_ref().ok_or_else(|| Self::missing("cavity"))
    }

    pub fn require_spectrum(&self) -> Result<&SpectrumSection> {
        self.spectrum.as_ref().ok_or_else(|| Self::missing("spectrum"))
    }

    pub fn require_hypothesis(&self) -> Result<&HypothesisSection> {
        self.hypothesis.as_ref().ok_or_else(|| Self::missing("hypothesis"))
    }

    pub fn require_scan(&self) -> Result<&ScanSection> {
        self.scan.as_ref().ok_or_else(|| Self::missing("scan"))
    }

    pub fn require_montecarlo(&self) -> Result<&MonteCarloSection> {
        self.montecarlo.as_ref().ok_or_else(|| Self::missing("montecarlo"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
            [detector]
            mode = "lateral"
            bias_field = 3000.0
            ensemble_size = 1000
            temperature = 0.01
            coherence_time = 1e-4
            typo_key = 1
        "#;
        let err = RunConfig::parse(text).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("typo_key"));
    }

    #[test]
    fn minimal_detector_section_builds() {
        let text = r#"
            [detector]
            mode = "lateral"
            bias_field = 3000.0
            electrode_depth = 5.0e-7
            ensemble_size = 100000000
            temperature = 0.01
            coherence_time = 1e-4
        "#;
        let cfg = RunConfig::parse(text).unwrap();
        let spec = cfg.require_detector().unwrap().to_spec().unwrap();
        assert_eq!(spec.atom_mass, ELECTRON_MASS);
    }

    #[test]
    fn cavity_gamma_and_q_are_exclusive() {
        let text = r#"
            [cavity]
            frequency = 1.0
            coupling = 0.01
            dissipation = 1e-4
            quality_factor = 1e6
            drive_amplitude = 1e-5
        "#;
        let cfg = RunConfig::parse(text).unwrap();
        assert!(cfg.require_cavity().unwrap().to_params().is_err());
    }

    #[test]
    fn physical_invariants_checked_at_boundary() {
        let text = r#"
            [detector]
            mode = "lateral"
            bias_field = 3000.0
            ensemble_size = 1000
            temperature = 0.0
            coherence_time = 1e-4
        "#;
        let cfg = RunConfig::parse(text).unwrap();
        assert!(cfg.require_detector().unwrap().to_spec().is_err());
    }
}
