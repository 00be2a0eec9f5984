//! Physical constants and unit conversions.
//!
//! Everything downstream computes in SI; electronvolts and GeV/cm³ exist
//! only at the I/O boundary. Constants are 2018 CODATA values so golden
//! numbers in tests stay bit-stable.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Planck constant (J s), exact by SI definition.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant (J s). Derived from `PLANCK` so that
/// h = 2π·ħ holds to machine precision.
pub const HBAR: f64 = PLANCK / (2.0 * PI);

/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Electron mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant (J/K), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// The CODATA constants bundled as a value, for callers that want to
/// thread them explicitly instead of using the module constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub h: f64,
    pub elementary_charge: f64,
    pub electron_mass: f64,
    pub speed_of_light: f64,
    pub boltzmann: f64,
    pub vacuum_permittivity: f64,
}

impl PhysicalConstants {
    pub const fn codata2018() -> Self {
        PhysicalConstants {
            hbar: HBAR,
            h: PLANCK,
            elementary_charge: ELEMENTARY_CHARGE,
            electron_mass: ELECTRON_MASS,
            speed_of_light: SPEED_OF_LIGHT,
            boltzmann: BOLTZMANN,
            vacuum_permittivity: VACUUM_PERMITTIVITY,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Unit tags understood by [`Quantity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    /// Ordinary frequency, Hz.
    FrequencyHz,
    /// Angular frequency, rad/s.
    AngularFrequency,
    /// Energy, eV.
    EnergyEv,
    /// Energy, J.
    EnergyJ,
    /// Mass, kg.
    MassKg,
    /// Temperature, K.
    TemperatureK,
    /// Electric field, V/m.
    FieldVPerM,
    /// Energy density, J/m³.
    DensityJPerM3,
    /// Energy density, GeV/cm³.
    DensityGevPerCm3,
    /// Time, s.
    TimeS,
    /// Length, m.
    LengthM,
}

/// Dimension classes within which conversions are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Photon-equivalence class: E = hf = ħω = Mc².
    Spectral,
    Temperature,
    Field,
    Density,
    Time,
    Length,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        match self {
            Unit::FrequencyHz
            | Unit::AngularFrequency
            | Unit::EnergyEv
            | Unit::EnergyJ
            | Unit::MassKg => Dimension::Spectral,
            Unit::TemperatureK => Dimension::Temperature,
            Unit::FieldVPerM => Dimension::Field,
            Unit::DensityJPerM3 | Unit::DensityGevPerCm3 => Dimension::Density,
            Unit::TimeS => Dimension::Time,
            Unit::LengthM => Dimension::Length,
        }
    }

    /// Multiplicative factor taking one unit of `self` to the class base
    /// (J for the spectral class, J/m³ for densities, SI base otherwise).
    fn to_base(self) -> f64 {
        match self {
            Unit::FrequencyHz => PLANCK,
            Unit::AngularFrequency => HBAR,
            Unit::EnergyEv => ELEMENTARY_CHARGE,
            Unit::EnergyJ => 1.0,
            Unit::MassKg => SPEED_OF_LIGHT * SPEED_OF_LIGHT,
            Unit::TemperatureK => 1.0,
            Unit::FieldVPerM => 1.0,
            Unit::DensityJPerM3 => 1.0,
            Unit::DensityGevPerCm3 => GEV_PER_CM3_IN_SI,
            Unit::TimeS => 1.0,
            Unit::LengthM => 1.0,
        }
    }
}

/// 1 GeV/cm³ expressed in J/m³.
pub const GEV_PER_CM3_IN_SI: f64 = 1e9 * ELEMENTARY_CHARGE / 1e-6;

/// A scalar tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Quantity { value, unit }
    }

    /// Convert to another unit of the same dimension class.
    pub fn convert_to(self, target: Unit) -> Result<Quantity> {
        if self.unit.dimension() != target.dimension() {
            return Err(Error::domain(format!(
                "cannot convert {:?} to {:?}: incompatible dimensions",
                self.unit, target
            )));
        }
        Ok(Quantity {
            value: self.value * self.unit.to_base() / target.to_base(),
            unit: target,
        })
    }
}

/// Photon mass equivalent of an ordinary frequency: h·f expressed in eV.
pub fn frequency_to_mass_ev(frequency_hz: f64) -> Result<f64> {
    if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
        return Err(Error::domain(format!(
            "frequency must be positive and finite, got {frequency_hz}"
        )));
    }
    Ok(PLANCK * frequency_hz / ELEMENTARY_CHARGE)
}

/// Inverse of [`frequency_to_mass_ev`].
pub fn mass_ev_to_frequency(mass_ev: f64) -> Result<f64> {
    if !mass_ev.is_finite() || mass_ev <= 0.0 {
        return Err(Error::domain(format!(
            "mass must be positive and finite, got {mass_ev} eV"
        )));
    }
    Ok(mass_ev * ELEMENTARY_CHARGE / PLANCK)
}

/// Mass in eV expressed as an angular frequency Mc²/ħ (with c=1 for the
/// wave picture this is the field's oscillation frequency in rad/s).
pub fn mass_ev_to_angular_frequency(mass_ev: f64) -> Result<f64> {
    Ok(2.0 * PI * mass_ev_to_frequency(mass_ev)?)
}

/// Dark-matter energy density from GeV/cm³ to J/m³.
pub fn density_to_si(rho_gev_per_cm3: f64) -> Result<f64> {
    if !rho_gev_per_cm3.is_finite() || rho_gev_per_cm3 < 0.0 {
        return Err(Error::domain(format!(
            "density must be non-negative, got {rho_gev_per_cm3} GeV/cm³"
        )));
    }
    Ok(rho_gev_per_cm3 * GEV_PER_CM3_IN_SI)
}
