//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4) with FSAL).

use crate::error::{Error, Result};

/// Step-size and tolerance control for [`integrate_sampled`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `t0`, recording the state at each of
/// the (strictly increasing) `sample_times`. The first sample may equal `t0`.
pub fn integrate_sampled<F>(
    rhs: F,
    t0: f64,
    y0: &[f64],
    sample_times: &[f64],
    control: StepControl,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut t = t0;
    let mut y = y0.to_vec();

    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    let t_end = *sample_times.last().ok_or_else(|| Error::domain("empty sample grid"))?;
    let span = t_end - t0;
    if span <= 0.0 {
        return Err(Error::domain(format!(
            "integration span must be positive, got t0={t0}, t_end={t_end}"
        )));
    }

    let mut first_stage = vec![0.0; dim];
    rhs(t, &y, &mut first_stage);
    k[0].copy_from_slice(&first_stage);

    let mut h = (span / 100.0).min(span);
    let h_min = span * 1e-14;
    let mut steps = 0usize;
    let mut next_sample = 0usize;

    while next_sample < sample_times.len() && sample_times[next_sample] <= t {
        samples.push(y.clone());
        next_sample += 1;
    }

    while next_sample < sample_times.len() {
        if steps >= control.max_steps {
            return Err(Error::Numerics {
                context: "ode",
                message: format!("exceeded {} steps at t={t:.6e}", control.max_steps),
                best: t,
                error_estimate: h,
                evaluations: steps,
            });
        }
        steps += 1;

        let target = sample_times[next_sample];
        let mut h_step = h.min(t_end - t);
        let mut clipped = false;
        if t + h_step >= target {
            h_step = target - t;
            clipped = true;
        }
        if h_step < h_min {
            if clipped {
                // Sample landed within round-off of the current time.
                samples.push(y.clone());
                next_sample += 1;
                continue;
            }
            return Err(Error::Numerics {
                context: "ode",
                message: format!("step size collapsed to {h_step:.3e} at t={t:.6e}"),
                best: t,
                error_estimate: h_step,
                evaluations: steps,
            });
        }

        for stage in 0..6 {
            for (i, ys) in y_stage.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[i];
                }
                *ys = y[i] + h_step * acc;
            }
            let t_stage = t + C[stage] * h_step;
            let (head, tail) = k.split_at_mut(stage + 1);
            let _ = head;
            rhs(t_stage, &y_stage, &mut tail[0]);
        }
        // Stage 7 state is the 5th-order solution itself (FSAL).
        y_new.copy_from_slice(&y_stage);

        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h_step;
            let scale = control.abs_tol + control.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            t += h_step;
            y.copy_from_slice(&y_new);
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            if clipped && (t - target).abs() <= f64::EPSILON * target.abs().max(1.0) {
                samples.push(y.clone());
                next_sample += 1;
            }
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h_step * factor).max(h_min);
    }

    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let samples = integrate_sampled(
            |_t, y, dy| dy[0] = -2.0 * y[0],
            0.0,
            &[1.0],
            &[1.0, 3.0],
            StepControl::default(),
        )
        .unwrap();
        assert_relative_eq!(samples[0][0], (-2.0f64).exp(), max_relative = 1e-8);
        assert_relative_eq!(samples[1][0], (-6.0f64).exp(), max_relative = 1e-7);
    }

    #[test]
    fn damped_oscillator_matches_closed_form() {
        // y'' + 2ζω y' + ω² y = 0 with ω=3, ζ=0.1.
        let omega = 3.0;
        let zeta = 0.1;
        let samples = integrate_sampled(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -2.0 * zeta * omega * y[1] - omega * omega * y[0];
            },
            0.0,
            &[1.0, 0.0],
            &[5.0],
            StepControl::default(),
        )
        .unwrap();
        let wd = omega * (1.0 - zeta * zeta).sqrt();
        let t = 5.0f64;
        let expected = (-zeta * omega * t).exp()
            * ((wd * t).cos() + zeta * omega / wd * (wd * t).sin());
        assert_relative_eq!(samples[0][0], expected, epsilon = 1e-7);
    }

    #[test]
    fn sample_at_t0_included() {
        let samples = integrate_sampled(
            |_t, _y, dy| dy[0] = 1.0,
            0.0,
            &[0.5],
            &[0.0, 1.0],
            StepControl::default(),
        )
        .unwrap();
        assert_eq!(samples.len(), 2);
        assert_relative_eq!(samples[0][0], 0.5);
        assert_relative_eq!(samples[1][0], 1.5, max_relative = 1e-10);
    }
}
