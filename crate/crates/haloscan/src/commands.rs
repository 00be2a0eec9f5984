//! Batch commands behind the `haloscan` binary. Each command consumes a
//! [`RunConfig`](crate::config::RunConfig), writes CSV/JSON artifacts into
//! the output directory, and reports warnings for the caller to surface.

use crate::config::RunConfig;
use crate::detector::{
    lateral_field_for_frequency, tuning_table, vertical_field_for_frequency, DetectorMode,
};
use crate::emit::{write_csv, write_json, write_plot_script};
use crate::error::{Error, Result};
use crate::montecarlo::{power_curve, simulate_campaign, CampaignSim};
use crate::readout::{
    estimate_probability_from_spectrum, integrate_moments, peak_spanning_grid,
    steady_state_photon_number, steady_state_spectrum, CavityParams, MomentOptions, ReadoutState,
};
use crate::scan::{exclusion_curve, plan_scan, ExclusionSettings, ScanPlan};
use crate::signal::{dark_coherence_time, DarkPhotonHypothesis};
use crate::thermal::thermal_spectrum_table;
use crate::units::frequency_to_mass_ev;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Invocation-level settings resolved from CLI flags, environment, and
/// the config's [output] section.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    /// Output file prefix, normally the config file stem.
    pub stem: String,
    pub seed_override: Option<u64>,
    /// Escalate model warnings to errors.
    pub strict: bool,
    pub emit_plots: bool,
    pub write_csv: bool,
    pub write_json: bool,
}

impl RunContext {
    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        self.out_dir.join(format!("{}_{suffix}.{ext}", self.stem))
    }
}

/// Files written and warnings raised by one command.
#[derive(Debug, Default)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl CommandOutcome {
    fn finish(self, strict: bool) -> Result<CommandOutcome> {
        if strict && !self.warnings.is_empty() {
            return Err(Error::config(format!(
                "strict mode: {}",
                self.warnings.join("; ")
            )));
        }
        Ok(self)
    }
}

/// Resolve the output directory: CLI flag > [output] section > the
/// HALOSCAN_OUT environment variable > ./out.
pub fn resolve_out_dir(cli: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    if let Some(dir) = cli {
        return dir.to_path_buf();
    }
    if let Some(dir) = cfg.output.as_ref().and_then(|o| o.directory.as_deref()) {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = std::env::var("HALOSCAN_OUT") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("out")
}

/// Apply the config's [output] section to the context defaults.
pub fn apply_output_section(ctx: &mut RunContext, cfg: &RunConfig) -> Result<()> {
    if let Some(output) = &cfg.output {
        if let Some(formats) = &output.formats {
            ctx.write_csv = false;
            ctx.write_json = false;
            for f in formats {
                match f.as_str() {
                    "csv" => ctx.write_csv = true,
                    "json" => ctx.write_json = true,
                    other => {
                        return Err(Error::config(format!(
                            "unknown output format {other:?}; expected \"csv\" or \"json\""
                        )))
                    }
                }
            }
        }
        ctx.emit_plots |= output.emit_plots.unwrap_or(false);
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumRow {
    omega_d_over_omega0: f64,
    photon_number: f64,
    normalized: f64,
    ground_normalized: f64,
    excited_normalized: f64,
    interpretation: &'static str,
}

#[derive(Serialize)]
struct OdeCheckRow {
    omega_d_over_omega0: f64,
    ode_photon_number: f64,
    closed_form: f64,
    rel_deviation: f64,
}

/// Steady-state spectrum, moment-equation cross-check, and the
/// peak-height probability round trip.
pub fn run_spectrum(cfg: &RunConfig, ctx: &RunContext) -> Result<CommandOutcome> {
    let cav = cfg.require_cavity()?.to_params()?;
    let section = cfg.require_spectrum()?;
    if section.grid_points < 2 {
        return Err(Error::config("spectrum.grid_points must be at least 2"));
    }
    let state = ReadoutState {
        probability: section.probability,
        interpretation: section.interpretation,
    };
    state.validate().map_err(|e| Error::config(e.to_string()))?;
    let omega_eg = section.atom_frequency;
    let n_atoms = section.ensemble_size;
    let include_floor = section.include_thermal_floor.unwrap_or(false);

    let grid = peak_spanning_grid(&cav, omega_eg, n_atoms, section.grid_span, section.grid_points)?;
    let spectrum = steady_state_spectrum(&cav, omega_eg, &state, n_atoms, &grid, include_floor)?;

    let mut outcome = CommandOutcome::default();
    if !spectrum.dispersive_valid {
        outcome.warnings.push(format!(
            "dispersive validity violated: |Δ| < {}·g",
            cav.dispersive_min_ratio
        ));
    }

    let tag = match section.interpretation {
        crate::readout::Interpretation::Mixture => "mixture",
        crate::readout::Interpretation::Expectation => "expectation",
    };
    let norm = spectrum.normalization;
    let rows: Vec<SpectrumRow> = spectrum
        .points
        .iter()
        .map(|p| SpectrumRow {
            omega_d_over_omega0: p.omega_d / cav.omega0,
            photon_number: p.total,
            normalized: (p.total - spectrum.thermal_floor) / norm,
            ground_normalized: p.ground_component / norm,
            excited_normalized: p.excited_component / norm,
            interpretation: tag,
        })
        .collect();
    if ctx.write_csv {
        let path = ctx.path("spectrum", "csv");
        write_csv(&path, &rows)?;
        if ctx.emit_plots {
            outcome.files.push(write_plot_script(
                &path,
                "omega_d_over_omega0",
                &["normalized", "ground_normalized", "excited_normalized"],
                false,
            )?);
        }
        outcome.files.push(path);
    }

    // Moment-equation oracle on a subgrid.
    let check_points = section.ode_check_points.unwrap_or(9).max(2);
    let tolerance = section.ode_check_tolerance.unwrap_or(1e-4);
    let sub_grid: Vec<f64> = (0..check_points)
        .map(|i| {
            let frac = i as f64 / (check_points - 1) as f64;
            grid[0] + (grid[grid.len() - 1] - grid[0]) * frac
        })
        .collect();
    let mut ode_rows = Vec::with_capacity(check_points);
    let mut worst: f64 = 0.0;
    for &omega_d in &sub_grid {
        let cav_at = CavityParams { drive_frequency: omega_d, ..cav };
        let options = MomentOptions::to_steady_state(&cav_at);
        let traj = integrate_moments(&cav_at, omega_eg, &state, n_atoms, &options)?;
        // Both routes carry the physical thermal floor; compare as-is.
        let closed = steady_state_photon_number(&cav_at, omega_eg, &state, n_atoms)?;
        let ode_value = traj.final_photon_number();
        let rel = (ode_value - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        ode_rows.push(OdeCheckRow {
            omega_d_over_omega0: omega_d / cav.omega0,
            ode_photon_number: ode_value,
            closed_form: closed,
            rel_deviation: rel,
        });
    }
    if ctx.write_csv {
        let path = ctx.path("spectrum_ode", "csv");
        write_csv(&path, &ode_rows)?;
        outcome.files.push(path);
    }
    if worst > tolerance {
        return Err(Error::SelfCheck(format!(
            "moment-equation steady state deviates from the closed form by {worst:.3e} (tolerance {tolerance:.1e})"
        )));
    }

    // Probability round trip from the emitted spectrum.
    let p_hat = estimate_probability_from_spectrum(
        &spectrum.table(),
        &cav,
        omega_eg,
        n_atoms,
        spectrum.thermal_floor,
    )?;
    if (p_hat - section.probability).abs() > 0.01 {
        outcome.warnings.push(format!(
            "probability round trip drifted: P = {}, P̂ = {p_hat:.6}",
            section.probability
        ));
    }
    if ctx.write_json {
        let path = ctx.path("spectrum_summary", "json");
        write_json(
            &path,
            &json!({
                "interpretation": tag,
                "probability_true": section.probability,
                "probability_estimated": p_hat,
                "abs_error": (p_hat - section.probability).abs(),
                "ode_check": {
                    "points": check_points,
                    "worst_rel_deviation": worst,
                    "tolerance": tolerance,
                },
                "dispersive_valid": spectrum.dispersive_valid,
                "thermal_floor": spectrum.thermal_floor,
            }),
        )?;
        outcome.files.push(path);
    }

    outcome.finish(ctx.strict)
}

/// Detector tuning table plus the band-limited thermal excitation
/// spectrum.
pub fn run_thermal(cfg: &RunConfig, ctx: &RunContext) -> Result<CommandOutcome> {
    let det = cfg.require_detector()?.to_spec()?;
    let scan = cfg.require_scan()?;
    let points = scan.curve_points.unwrap_or(41);
    if points < 2 {
        return Err(Error::config("scan.curve_points must be at least 2"));
    }

    let mut outcome = CommandOutcome::default();

    // Tuning curve over the mode's full validated range.
    let (band_lo, band_hi) = det.mode.band().frequency_range();
    let (field_lo, field_hi) = match det.mode {
        DetectorMode::Lateral => (
            lateral_field_for_frequency(2.0 * PI * band_lo, det.electrode_depth, det.atom_mass)?,
            lateral_field_for_frequency(2.0 * PI * band_hi, det.electrode_depth, det.atom_mass)?,
        ),
        DetectorMode::Vertical => (
            vertical_field_for_frequency(2.0 * PI * band_lo)?,
            vertical_field_for_frequency(2.0 * PI * band_hi)?,
        ),
    };
    let tuning = tuning_table(
        det.mode,
        field_lo,
        field_hi,
        points,
        det.electrode_depth,
        det.atom_mass,
    )?;
    if ctx.write_csv {
        let path = ctx.path("tuning", "csv");
        write_csv(&path, &tuning)?;
        if ctx.emit_plots {
            outcome.files.push(write_plot_script(
                &path,
                "bias_field_v_per_m",
                &["frequency_ghz"],
                false,
            )?);
        }
        outcome.files.push(path);
    }

    let table = thermal_spectrum_table(
        &det,
        scan.f_lo,
        scan.f_hi,
        points,
        scan.band_half_width_rad(),
        scan.tau,
    )?;
    if ctx.write_csv {
        let path = ctx.path("thermal", "csv");
        write_csv(&path, &table)?;
        if ctx.emit_plots {
            outcome.files.push(write_plot_script(
                &path,
                "frequency_ghz",
                &["log10_p_therm"],
                false,
            )?);
        }
        outcome.files.push(path);
    }

    if scan.tau > det.coherence_time {
        outcome.warnings.push(format!(
            "drive duration τ = {} s exceeds the ensemble coherence time τ_q = {} s",
            scan.tau, det.coherence_time
        ));
    }
    if let Some(hyp) = &cfg.hypothesis {
        let tau_dp = dark_coherence_time(&DarkPhotonHypothesis {
            mass_ev: frequency_to_mass_ev(0.5 * (scan.f_lo + scan.f_hi))?,
            mixing: 0.0,
            rho_dm_gev_cm3: hyp.rho_dm,
            cos_theta: 1.0,
            v_dm: hyp.v_dm(),
        })?;
        if scan.tau > tau_dp {
            outcome.warnings.push(format!(
                "drive duration τ = {} s exceeds the field coherence time τ_DP = {tau_dp:.3e} s at band center",
                scan.tau
            ));
        }
    }

    if ctx.write_json {
        let worst = table.iter().map(|p| p.log10_p_therm).fold(f64::NEG_INFINITY, f64::max);
        let path = ctx.path("thermal_summary", "json");
        write_json(
            &path,
            &json!({
                "band_hz": [scan.f_lo, scan.f_hi],
                "temperature_k": det.temperature,
                "ensemble_size": det.ensemble_size,
                "tau_s": scan.tau,
                "band_half_width_hz": scan.band_half_width_rad() / (2.0 * PI),
                "max_log10_p_therm": worst,
                "warnings": outcome.warnings,
            }),
        )?;
        outcome.files.push(path);
    }

    outcome.finish(ctx.strict)
}

#[derive(Serialize)]
struct ExclusionRow {
    mass_uev: f64,
    frequency_ghz: f64,
    chi: f64,
    log10_p_therm: f64,
    n_atoms: u64,
    p_target: f64,
    tau_s: f64,
    dwell_s: f64,
}

/// Families of χ(mass) exclusion curves across the configured band.
pub fn run_exclusion(cfg: &RunConfig, ctx: &RunContext) -> Result<CommandOutcome> {
    let det = cfg.require_detector()?.to_spec()?;
    let scan = cfg.require_scan()?;
    let hyp = cfg.require_hypothesis()?;
    let cos_theta = hyp.cos_theta().map_err(|e| Error::config(e.to_string()))?;
    let points = scan.curve_points.unwrap_or(41);
    let p_targets = scan.p_targets.clone().unwrap_or_else(|| vec![1e-4]);
    let ensemble_sizes = scan
        .ensemble_sizes
        .clone()
        .unwrap_or_else(|| vec![det.ensemble_size]);

    let mut rows = Vec::new();
    let mut envelope = Vec::new();
    for &n in &ensemble_sizes {
        for &p_target in &p_targets {
            let det_n = crate::detector::DetectorSpec { ensemble_size: n, ..det };
            let curve = exclusion_curve(
                &det_n,
                &ExclusionSettings {
                    f_lo: scan.f_lo,
                    f_hi: scan.f_hi,
                    points,
                    p_target,
                    tau: scan.tau,
                    band_half_width: scan.band_half_width_rad(),
                    rho_dm_gev_cm3: hyp.rho_dm,
                    cos_theta,
                },
            )?;
            let chi_min = curve.iter().map(|p| p.chi).fold(f64::INFINITY, f64::min);
            let chi_max = curve.iter().map(|p| p.chi).fold(0.0, f64::max);
            envelope.push(json!({
                "n_atoms": n,
                "p_target": p_target,
                "chi_min": chi_min,
                "chi_max": chi_max,
            }));
            rows.extend(curve.into_iter().map(|p| ExclusionRow {
                mass_uev: p.mass_uev,
                frequency_ghz: p.frequency_ghz,
                chi: p.chi,
                log10_p_therm: p.log10_p_therm,
                n_atoms: n,
                p_target,
                tau_s: scan.tau,
                dwell_s: scan.dwell,
            }));
        }
    }

    let mut outcome = CommandOutcome::default();
    if ctx.write_csv {
        let path = ctx.path("exclusion", "csv");
        write_csv(&path, &rows)?;
        if ctx.emit_plots {
            outcome.files.push(write_plot_script(&path, "mass_uev", &["chi"], true)?);
        }
        outcome.files.push(path);
    }
    if ctx.write_json {
        let path = ctx.path("exclusion_summary", "json");
        write_json(
            &path,
            &json!({
                "band_hz": [scan.f_lo, scan.f_hi],
                "mass_range_uev": [
                    frequency_to_mass_ev(scan.f_lo)? * 1e6,
                    frequency_to_mass_ev(scan.f_hi)? * 1e6,
                ],
                "cos_theta_sq": cos_theta * cos_theta,
                "rho_dm_gev_cm3": hyp.rho_dm,
                "tau_s": scan.tau,
                "curves": envelope,
            }),
        )?;
        outcome.files.push(path);
    }
    outcome.finish(ctx.strict)
}

/// Scan-campaign arithmetic: point count and total duration.
pub fn run_plan(cfg: &RunConfig, ctx: &RunContext) -> Result<CommandOutcome> {
    let scan = cfg.require_scan()?;
    let plan = scan.to_plan()?;
    let summary = plan_scan(&plan)?;

    let mut outcome = CommandOutcome::default();
    if !summary.shots_fit_dwell {
        outcome.warnings.push(format!(
            "dwell {} s is shorter than N_shot·τ = {} s",
            plan.dwell,
            plan.n_shot as f64 * plan.tau
        ));
    }

    let mut doc = json!({
        "band_hz": [plan.f_lo, plan.f_hi],
        "mass_range_uev": [summary.mass_lo_uev, summary.mass_hi_uev],
        "bandwidth_hz": plan.bandwidth,
        "dwell_s": plan.dwell,
        "n_shot": plan.n_shot,
        "tau_s": plan.tau,
        "points": summary.points,
        "total_seconds": summary.total_seconds,
        "total_days": summary.total_days,
        "shots_fit_dwell": summary.shots_fit_dwell,
    });
    if scan.emit_dwell_discrepancy.unwrap_or(false) {
        let alt_dwell = scan.alt_dwell.unwrap_or(10.0);
        let alt = plan_scan(&ScanPlan { dwell: alt_dwell, ..plan })?;
        doc["dwell_reconstruction"] = json!({
            "note": format!(
                "the quoted campaign duration requires a per-point dwell of {} s; at the \
                 alternative dwell of {alt_dwell} s the same band takes {:.2} days",
                plan.dwell, alt.total_days
            ),
            "alt_dwell_s": alt_dwell,
            "alt_total_days": alt.total_days,
        });
    }
    if ctx.write_json {
        let path = ctx.path("plan", "json");
        write_json(&path, &doc)?;
        outcome.files.push(path);
    }
    outcome.finish(ctx.strict)
}

/// Seeded Monte-Carlo campaign summary and the optional power curve.
pub fn run_montecarlo(cfg: &RunConfig, ctx: &RunContext) -> Result<CommandOutcome> {
    let section = cfg.require_montecarlo()?;
    let seed = ctx.seed_override.or(section.seed).unwrap_or(1);
    let sim = CampaignSim {
        n_shot: section.n_shot,
        p_signal: section.p_signal,
        p_background: section.p_background,
        trials: section.trials,
        master_seed: seed,
    };
    let result = simulate_campaign(&sim)?;

    let mut outcome = CommandOutcome::default();
    if ctx.write_json {
        let path = ctx.path("montecarlo", "json");
        write_json(
            &path,
            &json!({
                "simulation": sim,
                "detections": result.detections,
                "empirical_rate": result.empirical_rate,
                "ci95": [result.ci95_lo, result.ci95_hi],
                "master_seed": result.master_seed,
            }),
        )?;
        outcome.files.push(path);
    }
    if let Some(grid) = &section.p_signal_grid {
        let curve = power_curve(&sim, grid)?;
        if ctx.write_csv {
            let path = ctx.path("power", "csv");
            write_csv(&path, &curve)?;
            if ctx.emit_plots {
                outcome.files.push(write_plot_script(
                    &path,
                    "p_signal",
                    &["detection_rate"],
                    false,
                )?);
            }
            outcome.files.push(path);
        }
    }
    outcome.finish(ctx.strict)
}

/// Dispatch on the config's `command` field.
pub fn run_by_name(name: &str, cfg: &RunConfig, ctx: &RunContext) -> Result<CommandOutcome> {
    match name {
        "spectrum" => run_spectrum(cfg, ctx),
        "thermal" => run_thermal(cfg, ctx),
        "exclusion" => run_exclusion(cfg, ctx),
        "plan" => run_plan(cfg, ctx),
        "montecarlo" => run_montecarlo(cfg, ctx),
        other => Err(Error::config(format!(
            "unknown command {other:?}; expected spectrum, thermal, exclusion, plan, or montecarlo"
        ))),
    }
}

/// Run every config in a directory (sorted by file name); each file must
/// carry a `command` key.
pub fn run_all(figures_dir: &Path, base_ctx: &RunContext) -> Result<Vec<(String, CommandOutcome)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(figures_dir)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", figures_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::config(format!(
            "no .toml configs found in {}",
            figures_dir.display()
        )));
    }

    let mut results = Vec::new();
    for path in paths {
        let cfg = RunConfig::load(&path)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("run")
            .to_string();
        let command = cfg.command.clone().ok_or_else(|| {
            Error::config(format!(
                "{} has no top-level `command` key; run-all needs one",
                path.display()
            ))
        })?;
        let mut ctx = base_ctx.clone();
        ctx.stem = stem.clone();
        apply_output_section(&mut ctx, &cfg)?;
        let outcome = run_by_name(&command, &cfg, &ctx)?;
        results.push((stem, outcome));
    }
    Ok(results)
}
