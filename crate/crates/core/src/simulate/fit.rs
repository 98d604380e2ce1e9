use serde::{Deserialize, Serialize};

use super::{EnergyTrace, SimError};

/// Fraction of the trace, counted from its end, used by [`fit_decay`].
pub const DEFAULT_WINDOW: f64 = 0.6;

/// `E(t) ~ amplitude * exp(-xi t)` on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub t0: f64,
    pub t1: f64,
    pub xi: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(t, ln E)` over the last `window` fraction of the trace.
pub fn fit_decay(trace: &EnergyTrace, window: f64) -> Result<DecayFit, SimError> {
    if trace.len() < 2 {
        return Err(SimError::TooFewSamples(trace.len()));
    }
    let t_first = trace.times[0];
    let t_last = trace.times[trace.len() - 1];
    let start = t_last - window.clamp(0.0, 1.0) * (t_last - t_first);
    let energy = trace.energy();
    let (times, values): (Vec<f64>, Vec<f64>) = trace
        .times
        .iter()
        .zip(&energy)
        .filter(|(t, _)| **t >= start)
        .map(|(t, e)| (*t, *e))
        .unzip();
    fit_exponential(&times, &values)
}

/// Fits `values ~ amplitude * exp(-xi t)`.
pub fn fit_exponential(times: &[f64], values: &[f64]) -> Result<DecayFit, SimError> {
    if times.len() < 2 || times.len() != values.len() {
        return Err(SimError::TooFewSamples(times.len().min(values.len())));
    }
    if let Some((t, _)) = times.iter().zip(values).find(|(_, v)| !(**v > 0.0)) {
        return Err(SimError::NonPositiveEnergy { t: *t });
    }
    let m = times.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mt = times.iter().sum::<f64>() / m;
    let my = logs.iter().sum::<f64>() / m;
    let stt: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let sty: f64 = times.iter().zip(&logs).map(|(t, y)| (t - mt) * (y - my)).sum();
    let syy: f64 = logs.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let rss: f64 = times.iter().zip(&logs).map(|(t, y)| (y - intercept - slope * t).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    Ok(DecayFit {
        t0: times[0],
        t1: times[times.len() - 1],
        xi: -slope,
        amplitude: intercept.exp(),
        r_squared,
        points: times.len(),
    })
}
