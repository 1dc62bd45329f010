//! Monte Carlo ground truth: end-to-end trial simulation and empirical
//! ROC/rate estimation.
//!
//! A trial draws each sensor's local statistic, quantizes it when the
//! rule calls for that, and fuses. Two samplers are available:
//!
//! * [`Sampler::Measurement`] draws the `N` raw measurements and forms
//!   the energy statistic — the physical pipeline. Its fused statistic
//!   is chi-square flavored, so for small `N` it deliberately exposes
//!   how optimistic the Gaussian closed forms are.
//! * [`Sampler::StatisticModel`] draws the local statistic directly from
//!   its Gaussian model, which is what the closed-form moment chain
//!   assumes; it serves as the calibration oracle for that chain.
//!
//! Trials are embarrassingly parallel. Every draw comes from a substream
//! keyed by `(seed, kind, trial, site)`, so results are bit-identical
//! regardless of worker count or execution order.

use rayon::prelude::*;

use rand_distr::{Distribution, Normal};

use crate::analytics::{validate_grid, DetectionCurve, Provenance, RocPoint};
use crate::error::{Error, Result};
use crate::fusion::{fuse, FusionRule};
use crate::model::{Hypothesis, Scenario};
use crate::rng::{derive_seed, substream, StreamKind};

/// How a trial produces each sensor's local statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Sample `N` measurements and take their energy.
    Measurement,
    /// Draw the statistic from its Gaussian mean/variance model.
    StatisticModel,
}

/// A reproducible batch of fusion trials.
#[derive(Debug, Clone)]
pub struct TrialBatch<'a> {
    pub scenario: &'a Scenario,
    pub rule: &'a FusionRule,
    pub n_trials: usize,
    pub hypothesis: Hypothesis,
    pub seed: u64,
    pub sampler: Sampler,
}

/// Exceedance rates over a threshold with 95% Wilson intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalRates {
    pub p_fa: f64,
    pub p_fa_ci: (f64, f64),
    pub p_d: f64,
    pub p_d_ci: (f64, f64),
}

/// Run every trial in a batch and return the fused statistics, ordered by
/// trial index.
pub fn run_trials(batch: &TrialBatch) -> Result<Vec<f64>> {
    if batch.n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be >= 1".into()));
    }
    let scenario = batch.scenario;
    let rule = batch.rule;
    if rule.num_sensors() != scenario.num_sites() {
        return Err(Error::LengthMismatch {
            expected: scenario.num_sites(),
            got: rule.num_sensors(),
        });
    }

    let m = scenario.num_sites();
    // Per-site sampling setup, hoisted out of the trial loop.
    let normals: Vec<Normal<f64>> = (0..m)
        .map(|i| {
            let site = &scenario.sites[i];
            match batch.sampler {
                Sampler::Measurement => Normal::new(0.0, site.noise_var.sqrt()),
                Sampler::StatisticModel => {
                    let t = crate::analytics::ti_moments(site, scenario.n_samples);
                    Normal::new(t.mean(batch.hypothesis), t.var(batch.hypothesis).sqrt())
                }
            }
            .map_err(|e| Error::InvalidParameter(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let quantizers: Vec<Option<crate::quant::QuantizerSpec>> = (0..m)
        .map(|i| {
            if rule.quantized && !rule.censored[i] {
                scenario.quantizer_for_site(i)
            } else {
                None
            }
        })
        .collect();
    let offset = match batch.hypothesis {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => scenario.amplitude,
    };

    let values = (0..batch.n_trials)
        .into_par_iter()
        .map(|t| {
            let mut stats = vec![0.0f64; m];
            for i in 0..m {
                if rule.quantized && rule.censored[i] {
                    stats[i] = f64::NAN;
                    continue;
                }
                let mut rng = substream(batch.seed, StreamKind::Measurement, t as u64, i as u64);
                let mut value = match batch.sampler {
                    Sampler::Measurement => {
                        let normal = &normals[i];
                        (0..scenario.n_samples)
                            .map(|_| {
                                let x = offset + normal.sample(&mut rng);
                                x * x
                            })
                            .sum::<f64>()
                    }
                    Sampler::StatisticModel => normals[i].sample(&mut rng),
                };
                if let Some(spec) = &quantizers[i] {
                    let mut qrng =
                        substream(batch.seed, StreamKind::QuantNoise, t as u64, i as u64);
                    value = spec
                        .quantize(value, &mut qrng)
                        .expect("quantizer exists only for non-censored sites");
                }
                stats[i] = value;
            }
            fuse(rule, &stats).expect("length checked above").value
        })
        .collect();
    Ok(values)
}

/// Fractions of each sample set at or above the threshold (the decision
/// rule is `declare H1 iff statistic >= threshold`), with 95% Wilson
/// confidence intervals.
pub fn empirical_rates(h0_values: &[f64], h1_values: &[f64], threshold: f64) -> EmpiricalRates {
    let count = |vals: &[f64]| vals.iter().filter(|&&v| v >= threshold).count();
    let k0 = count(h0_values);
    let k1 = count(h1_values);
    let p_fa = k0 as f64 / h0_values.len() as f64;
    let p_d = k1 as f64 / h1_values.len() as f64;
    EmpiricalRates {
        p_fa,
        p_fa_ci: wilson_interval(k0, h0_values.len()),
        p_d,
        p_d_ci: wilson_interval(k1, h1_values.len()),
    }
}

/// 95% Wilson score interval for `k` successes in `n` draws.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Empirical ROC: thresholds are H0 sample quantiles at each grid point
/// (so the curve measures the rule, not the Gaussian approximation), and
/// `P_d` is the H1 exceedance fraction. H0 and H1 batches use independent
/// derived seeds.
pub fn empirical_roc(
    scenario: &Scenario,
    rule: &FusionRule,
    n_trials: usize,
    p_fa_grid: &[f64],
    seed: u64,
    sampler: Sampler,
) -> Result<DetectionCurve> {
    validate_grid(p_fa_grid)?;
    let h0 = run_trials(&TrialBatch {
        scenario,
        rule,
        n_trials,
        hypothesis: Hypothesis::H0,
        seed: derive_seed(seed, 0),
        sampler,
    })?;
    let h1 = run_trials(&TrialBatch {
        scenario,
        rule,
        n_trials,
        hypothesis: Hypothesis::H1,
        seed: derive_seed(seed, 1),
        sampler,
    })?;

    let mut sorted = h0;
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let points = p_fa_grid
        .iter()
        .map(|&p_fa| {
            let threshold = if p_fa >= 1.0 {
                f64::NEG_INFINITY
            } else {
                let k = (n as f64 * (1.0 - p_fa)).ceil() as usize;
                sorted[k.clamp(1, n) - 1]
            };
            let p_d = h1.iter().filter(|&&v| v >= threshold).count() as f64 / h1.len() as f64;
            RocPoint { p_fa, p_d }
        })
        .collect();
    Ok(DetectionCurve {
        rule: rule.name(),
        provenance: match sampler {
            Sampler::Measurement => Provenance::Empirical,
            Sampler::StatisticModel => Provenance::EmpiricalModel,
        },
        points,
    })
}
