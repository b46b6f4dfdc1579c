use crate::error::{invalid, Result};

/// Simulation time grid `0 = t₀ < t₁ < … < t_n = T` with `t_k = kδ` and a
/// shortened final interval when `T/δ` is not an integer.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    step: f64,
}

pub fn make_time_grid(horizon: f64, step: f64) -> Result<TimeGrid> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    if step > horizon {
        return Err(invalid(format!("step {step} exceeds horizon {horizon}")));
    }
    let full = (horizon / step).floor() as usize;
    let mut times = Vec::with_capacity(full + 2);
    for k in 0..=full {
        let t = k as f64 * step;
        if t < horizon {
            times.push(t);
        }
    }
    times.push(horizon);
    Ok(TimeGrid { times, step })
}

impl TimeGrid {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("grid is never empty")
    }

    pub fn n_intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn interval(&self, k: usize) -> f64 {
        self.times[k + 1] - self.times[k]
    }

    /// `t_δ = [t/δ]δ`
    pub fn floor(&self, t: f64) -> f64 {
        (t / self.step).floor() * self.step
    }

    /// Grid index of `[t/δ]`.
    pub fn floor_index(&self, t: f64) -> usize {
        ((t / self.step).floor() as usize).min(self.n_intervals())
    }
}
