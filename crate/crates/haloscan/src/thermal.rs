//! Blackbody background: Planck occupancy, the band-limited thermal
//! excitation probability of the ensemble, and the fluctuating thermal
//! field. Probabilities are carried in log10 throughout; the
//! millimeter-band values underflow any linear double-precision
//! intermediate (the band sits hundreds of decades below 1).

use crate::detector::DetectorSpec;
use crate::error::{Error, Result};
use crate::numerics::quad;
use crate::units::{BOLTZMANN, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use serde::Serialize;
use std::f64::consts::{LN_10, PI};

/// A narrow detection band centered on the detector transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBand {
    /// Band center ω_eg (rad/s).
    pub center: f64,
    /// Half-width δω (rad/s); the band is [ω_eg − δω, ω_eg + δω].
    pub half_width: f64,
    /// Temperature (K).
    pub temperature: f64,
}

impl ThermalBand {
    pub fn validate(&self) -> Result<()> {
        if self.center <= 0.0 {
            return Err(Error::domain("band center must be positive"));
        }
        if self.half_width <= 0.0 || self.half_width >= self.center {
            return Err(Error::domain(format!(
                "band half-width must satisfy 0 < δω < ω_eg, got δω={} at ω_eg={}",
                self.half_width, self.center
            )));
        }
        if self.temperature <= 0.0 {
            return Err(Error::domain("band temperature must be positive"));
        }
        Ok(())
    }
}

/// Planck occupancy n̄ = 1/(e^{ħω/k_BT} − 1). Accepts T = 0 as the
/// continuous limit n̄ = 0.
pub fn planck_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::domain(format!("frequency must be positive, got {omega}")));
    }
    if temperature < 0.0 {
        return Err(Error::domain("temperature must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    if x > 40.0 {
        // 1/(eˣ−1) = e⁻ˣ to machine precision here; exp keeps the
        // subnormal range that expm1 would overflow away.
        Ok((-x).exp())
    } else {
        Ok(1.0 / x.exp_m1())
    }
}

/// ln n̄: stays finite long after the linear occupancy underflows.
pub fn ln_planck_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::domain(format!("frequency must be positive, got {omega}")));
    }
    if temperature < 0.0 {
        return Err(Error::domain("temperature must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    if x > 40.0 {
        Ok(-x - (-(-x).exp()).ln_1p())
    } else {
        Ok(-(x.exp_m1().ln()))
    }
}

/// Prefactor N e² d̃² τ² / (2 ε₀ π² c³ ħ) of the band-limited excitation
/// probability, with the dipole evaluated at the band center.
fn excitation_prefactor(n_atoms: f64, atom_mass: f64, omega_eg: f64, tau: f64) -> f64 {
    let d_sq = HBAR / (2.0 * atom_mass * omega_eg);
    n_atoms * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * d_sq * tau * tau
        / (2.0 * VACUUM_PERMITTIVITY * PI * PI * SPEED_OF_LIGHT.powi(3) * HBAR)
}

/// Band-limited thermal excitation probability, returned as log10 P.
///
/// The Planck integral ∫ ω³ n̄(ω) dω over the band is evaluated with the
/// exponential at the lower band edge factored out and the frequency
/// rescaled to thermal e-folds, u = (ω − ω_lo)·ħ/k_BT. The reduced
/// integrand is then ≤ ω³ everywhere and decays as e^{−u}, so the
/// quadrature converges no matter how deep in the Wien tail (or how
/// close to T = 0) the band sits. Beyond 200 e-folds the in-band tail
/// contributes below any representable relative weight and is dropped.
pub fn log10_thermal_probability(det: &DetectorSpec, band: &ThermalBand, tau: f64) -> Result<f64> {
    det.validate()?;
    band.validate()?;
    if tau <= 0.0 {
        return Err(Error::domain("drive duration must be positive"));
    }

    let kt_over_hbar = BOLTZMANN * band.temperature / HBAR;
    let omega_lo = band.center - band.half_width;
    let x_lo = omega_lo / kt_over_hbar;
    let u_span = (2.0 * band.half_width / kt_over_hbar).min(200.0);
    let reduced = quad::integrate(
        |u| {
            let x = x_lo + u;
            let tail = if x > 40.0 {
                1.0 - (-x).exp()
            } else {
                x.exp_m1() * (-x).exp()
            };
            let omega = omega_lo + u * kt_over_hbar;
            omega.powi(3) * (-u).exp() / tail
        },
        0.0,
        u_span,
        1e-9,
        0.0,
        "thermal band integral",
    )?;

    let prefactor =
        excitation_prefactor(det.ensemble_size as f64, det.atom_mass, band.center, tau);
    Ok((prefactor.ln() + (kt_over_hbar * reduced.value).ln() - x_lo) / LN_10)
}

/// Same probability on the linear path; underflows to 0 where the band
/// sits too deep in the Wien tail. Used to cross-check the log path.
pub fn thermal_probability_linear(det: &DetectorSpec, band: &ThermalBand, tau: f64) -> Result<f64> {
    det.validate()?;
    band.validate()?;
    if tau <= 0.0 {
        return Err(Error::domain("drive duration must be positive"));
    }
    let kt_over_hbar = BOLTZMANN * band.temperature / HBAR;
    let integral = quad::integrate(
        |omega| {
            let x = omega / kt_over_hbar;
            if x > 700.0 {
                0.0
            } else {
                omega.powi(3) / x.exp_m1()
            }
        },
        band.center - band.half_width,
        band.center + band.half_width,
        1e-9,
        0.0,
        "thermal band integral (linear)",
    )?;
    let prefactor =
        excitation_prefactor(det.ensemble_size as f64, det.atom_mass, band.center, tau);
    Ok(prefactor * integral.value)
}

/// Narrowband closed form log10(prefactor · 2δω · ω³ · n̄(ω)); must agree
/// with the quadrature to 0.1% whenever δω/ω < 1e−5.
pub fn log10_thermal_probability_narrowband(
    det: &DetectorSpec,
    band: &ThermalBand,
    tau: f64,
) -> Result<f64> {
    det.validate()?;
    band.validate()?;
    if tau <= 0.0 {
        return Err(Error::domain("drive duration must be positive"));
    }
    let prefactor =
        excitation_prefactor(det.ensemble_size as f64, det.atom_mass, band.center, tau);
    let ln_nbar = ln_planck_occupancy(band.center, band.temperature)?;
    Ok((prefactor.ln() + (2.0 * band.half_width * band.center.powi(3)).ln() + ln_nbar) / LN_10)
}

/// RMS of the fluctuating blackbody field over all frequencies,
/// √((2/ε₀) ∫₀^∞ (ħω³/π²c³) n̄ dω) in V/m. Scales as T².
pub fn thermal_field_rms(temperature: f64) -> Result<f64> {
    if temperature < 0.0 {
        return Err(Error::domain("temperature must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    // Substitution x = ħω/k_BT: ∫ω³n̄ dω = (k_BT/ħ)⁴ ∫x³/(eˣ−1)dx.
    let dimensionless = quad::integrate(
        |x| if x == 0.0 { 0.0 } else { x.powi(3) / x.exp_m1() },
        0.0,
        120.0,
        1e-12,
        0.0,
        "Planck moment",
    )?;
    let kt_over_hbar = BOLTZMANN * temperature / HBAR;
    let energy_density = HBAR / (PI * PI * SPEED_OF_LIGHT.powi(3))
        * kt_over_hbar.powi(4)
        * dimensionless.value;
    Ok((2.0 * energy_density / VACUUM_PERMITTIVITY).sqrt())
}

/// One row of a thermal-spectrum table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThermalPoint {
    pub frequency_ghz: f64,
    pub log10_p_therm: f64,
}

/// Tabulate log10 P_therm across `[f_lo, f_hi]` (Hz) with the detector
/// retuned onto each grid point.
pub fn thermal_spectrum_table(
    det: &DetectorSpec,
    f_lo: f64,
    f_hi: f64,
    points: usize,
    half_width: f64,
    tau: f64,
) -> Result<Vec<ThermalPoint>> {
    if points < 2 || f_hi <= f_lo || f_lo <= 0.0 {
        return Err(Error::domain("thermal table needs at least 2 points and 0 < f_lo < f_hi"));
    }
    (0..points)
        .map(|i| {
            let f = f_lo + (f_hi - f_lo) * i as f64 / (points - 1) as f64;
            let band = ThermalBand {
                center: 2.0 * PI * f,
                half_width,
                temperature: det.temperature,
            };
            Ok(ThermalPoint {
                frequency_ghz: f / 1e9,
                log10_p_therm: log10_thermal_probability(det, &band, tau)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DetectorMode;
    use crate::units::ELECTRON_MASS;
    use approx::assert_relative_eq;

    fn detector(n: u64, temperature: f64, coherence: f64) -> DetectorSpec {
        DetectorSpec {
            mode: DetectorMode::Lateral,
            bias_field: 3000.0,
            electrode_depth: 0.5e-6,
            atom_mass: ELECTRON_MASS,
            ensemble_size: n,
            temperature,
            coherence_time: coherence,
        }
    }

    #[test]
    fn occupancy_analytic_point() {
        // ħω = k_BT gives n̄ = 1/(e−1).
        let t = 1.0;
        let omega = BOLTZMANN * t / HBAR;
        assert_relative_eq!(
            planck_occupancy(omega, t).unwrap(),
            1.0 / (std::f64::consts::E - 1.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn occupancy_cm_band_reference() {
        // 2π·5 GHz at 10 mK: x ≈ 24.0, n̄ ≈ 3.8e-11.
        let n = planck_occupancy(2.0 * PI * 5e9, 0.01).unwrap();
        assert_relative_eq!(n, 3.8e-11, max_relative = 0.01);
    }

    #[test]
    fn occupancy_vanishes_monotonically_with_t() {
        let omega = 2.0 * PI * 5e9;
        let mut last = f64::INFINITY;
        for t in [1.0, 0.5, 0.1, 0.05, 0.02, 0.01, 0.005] {
            let n = planck_occupancy(omega, t).unwrap();
            assert!(n < last);
            last = n;
        }
        assert_eq!(planck_occupancy(omega, 0.0).unwrap(), 0.0);
        assert_eq!(ln_planck_occupancy(omega, 0.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_occupancy_consistent_with_linear() {
        for (omega, t) in [(2.0 * PI * 5e9, 0.01), (2.0 * PI * 1e9, 0.3), (1e9, 4.2)] {
            let lin = planck_occupancy(omega, t).unwrap();
            let ln = ln_planck_occupancy(omega, t).unwrap();
            assert_relative_eq!(ln.exp(), lin, max_relative = 1e-12);
        }
    }

    #[test]
    fn centimeter_point_matches_independent_narrowband_oracle() {
        // N=1e8, ω=2π·5 GHz, δω=2π·1 kHz, T=10 mK, τ=1e-4 s.
        let det = detector(100_000_000, 0.01, 1e-4);
        let band = ThermalBand {
            center: 2.0 * PI * 5e9,
            half_width: 2.0 * PI * 1e3,
            temperature: 0.01,
        };
        let log_p = log10_thermal_probability(&det, &band, 1e-4).unwrap();

        // Oracle: independent arithmetic, prefactor · 2δω·ω³·n̄.
        let d_sq = 1.054571817e-34 / (2.0 * 9.1093837015e-31 * band.center);
        let pref = 1e8 * (1.602176634e-19f64).powi(2) * d_sq * 1e-8
            / (2.0 * 8.8541878128e-12 * PI * PI * (2.99792458e8f64).powi(3) * 1.054571817e-34);
        let x = 1.054571817e-34 * band.center / (1.380649e-23 * 0.01);
        let oracle = pref * 2.0 * band.half_width * band.center.powi(3) * (-x).exp();
        assert_relative_eq!(10f64.powf(log_p), oracle, max_relative = 1e-3);
        // Order 1e-9.
        assert!(log_p > -9.0 && log_p < -8.5, "log10 P = {log_p}");
    }

    #[test]
    fn narrowband_closed_form_agrees_with_quadrature() {
        let det = detector(100_000_000, 0.01, 1e-4);
        for f in [4.5e9, 5.0e9, 6.5e9, 120e9, 200e9] {
            let band = ThermalBand {
                center: 2.0 * PI * f,
                half_width: 2.0 * PI * 1e3,
                temperature: 0.01,
            };
            let quadrature = log10_thermal_probability(&det, &band, 1e-5).unwrap();
            let closed = log10_thermal_probability_narrowband(&det, &band, 1e-5).unwrap();
            // 0.1% in linear P is ~4.3e-4 in log10.
            assert!(
                (quadrature - closed).abs() < 4.3e-4,
                "f={f}: {quadrature} vs {closed}"
            );
        }
    }

    #[test]
    fn log_and_linear_paths_agree_where_linear_survives() {
        let det = detector(100_000_000, 0.01, 1e-4);
        let band = ThermalBand {
            center: 2.0 * PI * 5e9,
            half_width: 2.0 * PI * 1e3,
            temperature: 0.01,
        };
        let linear = thermal_probability_linear(&det, &band, 1e-4).unwrap();
        let log_p = log10_thermal_probability(&det, &band, 1e-4).unwrap();
        assert_relative_eq!(10f64.powf(log_p), linear, max_relative = 1e-10);
    }

    #[test]
    fn millimeter_band_sits_far_below_any_linear_float() {
        let det = detector(100_000_000, 0.01, 1e-5);
        let table = thermal_spectrum_table(&det, 120e9, 200e9, 17, 2.0 * PI * 1e3, 1e-5).unwrap();
        for point in &table {
            assert!(
                point.log10_p_therm < -125.0,
                "{} GHz: log10 P = {}",
                point.frequency_ghz,
                point.log10_p_therm
            );
        }
        // The linear path underflows to exactly zero out here.
        let band = ThermalBand {
            center: 2.0 * PI * 160e9,
            half_width: 2.0 * PI * 1e3,
            temperature: 0.01,
        };
        assert_eq!(thermal_probability_linear(&det, &band, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn probability_is_monotonic_in_each_parameter() {
        let band = |t| ThermalBand {
            center: 2.0 * PI * 5e9,
            half_width: 2.0 * PI * 1e3,
            temperature: t,
        };
        // Temperature ladder.
        let det = detector(1_000_000, 0.01, 1e-4);
        let mut last = f64::NEG_INFINITY;
        for t in [0.005, 0.01, 0.02, 0.05, 0.1] {
            let p = log10_thermal_probability(&det, &band(t), 1e-4).unwrap();
            assert!(p > last);
            last = p;
        }
        // Ensemble size, duration, width ladders.
        let p_ref = log10_thermal_probability(&det, &band(0.01), 1e-4).unwrap();
        let det_big = detector(10_000_000, 0.01, 1e-4);
        assert!(log10_thermal_probability(&det_big, &band(0.01), 1e-4).unwrap() > p_ref);
        assert!(log10_thermal_probability(&det, &band(0.01), 2e-4).unwrap() > p_ref);
        let wide = ThermalBand { half_width: 2.0 * PI * 2e3, ..band(0.01) };
        assert!(log10_thermal_probability(&det, &wide, 1e-4).unwrap() > p_ref);
    }

    #[test]
    fn log_path_stays_finite_toward_absolute_zero() {
        // The probability falls monotonically toward the log → −∞
        // sentinel; even where the in-band Planck variation dwarfs the
        // float range the log path must stay finite, not NaN.
        let det = detector(100_000_000, 0.01, 1e-4);
        let band = |t| ThermalBand {
            center: 2.0 * PI * 5e9,
            half_width: 2.0 * PI * 1e3,
            temperature: t,
        };
        let mut last = 0.0;
        for t in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
            let log_p = log10_thermal_probability(&det, &band(t), 1e-4).unwrap();
            assert!(log_p.is_finite(), "T = {t}: log10 P = {log_p}");
            assert!(log_p < last, "T = {t}: {log_p} !< {last}");
            last = log_p;
        }
        assert!(last < -1e10);
    }

    #[test]
    fn field_rms_scales_as_t_squared() {
        let rms1 = thermal_field_rms(0.5).unwrap();
        let rms2 = thermal_field_rms(1.0).unwrap();
        assert_relative_eq!(rms2, 4.0 * rms1, max_relative = 1e-9);
        assert_eq!(thermal_field_rms(0.0).unwrap(), 0.0);
    }

    #[test]
    fn planck_moment_recovers_stefan_boltzmann_constant() {
        // ∫₀^∞ x³/(eˣ−1)dx = π⁴/15 through the quadrature contract.
        let r = quad::integrate(
            |x| if x == 0.0 { 0.0 } else { x.powi(3) / x.exp_m1() },
            0.0,
            120.0,
            1e-12,
            0.0,
            "oracle",
        )
        .unwrap();
        assert_relative_eq!(r.value, PI.powi(4) / 15.0, max_relative = 1e-10);
    }

    #[test]
    fn invalid_bands_rejected() {
        let det = detector(1, 0.01, 1e-4);
        let bad = ThermalBand { center: 1e9, half_width: 2e9, temperature: 0.01 };
        assert!(log10_thermal_probability(&det, &bad, 1e-4).is_err());
        let bad_t = ThermalBand { center: 1e9, half_width: 1e3, temperature: 0.0 };
        assert!(log10_thermal_probability(&det, &bad_t, 1e-4).is_err());
    }
}
