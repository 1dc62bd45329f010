//! Fusion rules: per-sensor weights/offsets and the fused statistic.
//!
//! Quadratic rules score `sum_i a_i (T_i - b_i)^2`, the weighted distance
//! of the reported statistics from half their null-hypothesis means;
//! linear rules score `sum_i alpha_i T_i`. Four weightings are provided
//! (the likelihood-derived optimum, its high-SNR simplification, equal
//! weights, and the deflection-optimal linear combiner), each in an
//! unquantized and a quantized form. The quantized weights fold in each
//! sensor's quantization-noise variance and reduce exactly to the
//! unquantized ones as that variance vanishes; quantized weights are
//! normalized so this limit is an identity (a uniform positive rescale of
//! all weights, which leaves any false-alarm-calibrated decision and the
//! whole ROC unchanged).
//!
//! Censored sensors (zero bits) carry zero weight and are skipped by
//! [`fuse`]. All rules are immutable and evaluation is pure.

use crate::error::{Error, Result};
use crate::model::Scenario;

/// Rule family. `EqualLinear` is the all-ones linear combiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Optimal,
    Weighted,
    Equal,
    Linear,
    EqualLinear,
}

impl RuleFamily {
    pub fn is_quadratic(self) -> bool {
        matches!(self, RuleFamily::Optimal | RuleFamily::Weighted | RuleFamily::Equal)
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleFamily::Optimal => "optimal",
            RuleFamily::Weighted => "weighted",
            RuleFamily::Equal => "equal",
            RuleFamily::Linear => "linear",
            RuleFamily::EqualLinear => "equal-linear",
        }
    }
}

/// A fusion rule: family tag, per-sensor weights, offsets (quadratic
/// families only), and the censoring mask.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionRule {
    pub family: RuleFamily,
    pub quantized: bool,
    pub weights: Vec<f64>,
    /// Empty for the linear families.
    pub offsets: Vec<f64>,
    pub censored: Vec<bool>,
}

impl FusionRule {
    pub fn num_sensors(&self) -> usize {
        self.weights.len()
    }

    /// Rule identifier used in CSV output and configs, e.g.
    /// `optimal-quantized`.
    pub fn name(&self) -> String {
        if self.quantized {
            format!("{}-quantized", self.family.name())
        } else {
            self.family.name().to_string()
        }
    }

    fn evaluate(&self, statistics: &[f64]) -> f64 {
        debug_assert_eq!(statistics.len(), self.weights.len());
        let mut acc = 0.0;
        if self.family.is_quadratic() {
            for (((&w, &b), &censored), &t) in self
                .weights
                .iter()
                .zip(&self.offsets)
                .zip(&self.censored)
                .zip(statistics)
            {
                if !censored {
                    let d = t - b;
                    acc += w * d * d;
                }
            }
        } else {
            for ((&w, &censored), &t) in
                self.weights.iter().zip(&self.censored).zip(statistics)
            {
                if !censored {
                    acc += w * t;
                }
            }
        }
        acc
    }
}

/// A fused global statistic together with the rule that produced it.
#[derive(Debug, Clone, Copy)]
pub struct FusedStatistic<'a> {
    pub value: f64,
    pub rule: &'a FusionRule,
}

/// Combine per-sensor statistics under a rule. Censored entries are
/// ignored (their statistic slots may hold anything, including NaN).
pub fn fuse<'a>(rule: &'a FusionRule, statistics: &[f64]) -> Result<FusedStatistic<'a>> {
    if statistics.len() != rule.num_sensors() {
        return Err(Error::LengthMismatch {
            expected: rule.num_sensors(),
            got: statistics.len(),
        });
    }
    Ok(FusedStatistic {
        value: rule.evaluate(statistics),
        rule,
    })
}

// ---------------------------------------------------------------------------
// Per-sensor weight formulas
// ---------------------------------------------------------------------------

/// Likelihood-derived quadratic weight and offset with quantization-noise
/// variance `quant_var` (pass 0 for the unquantized rule):
/// `a = xi / (N sigma^4 (1 + 2 xi + x)(1 + x))` with
/// `x = quant_var / (2 N sigma^4)`, and offset
/// `b = N sigma^2 / 2 - quant_var / (4 sigma^2)`.
pub fn optimal_weight(snr: f64, noise_var: f64, n_samples: usize, quant_var: f64) -> (f64, f64) {
    let n = n_samples as f64;
    let s4 = noise_var * noise_var;
    let x = quant_var / (2.0 * n * s4);
    let a = snr / (n * s4 * (1.0 + 2.0 * snr + x) * (1.0 + x));
    let b = n * noise_var / 2.0 - quant_var / (4.0 * noise_var);
    (a, b)
}

/// High-SNR quadratic weight `1 / (2 N sigma^4)`, attenuated by
/// `(1 + x)^-2` under quantization; same offset as [`optimal_weight`].
pub fn weighted_weight(noise_var: f64, n_samples: usize, quant_var: f64) -> (f64, f64) {
    let n = n_samples as f64;
    let s4 = noise_var * noise_var;
    let x = quant_var / (2.0 * n * s4);
    let a = 1.0 / (2.0 * n * s4 * (1.0 + x) * (1.0 + x));
    let b = n * noise_var / 2.0 - quant_var / (4.0 * noise_var);
    (a, b)
}

/// Deflection-optimal linear weight
/// `alpha = xi / (N sigma^2 (1 + 2 xi + quant_var / (N sigma^2)))`.
pub fn linear_weight(snr: f64, noise_var: f64, n_samples: usize, quant_var: f64) -> f64 {
    let n = n_samples as f64;
    let y = quant_var / (n * noise_var);
    snr / (n * noise_var * (1.0 + 2.0 * snr + y))
}

// ---------------------------------------------------------------------------
// Rule constructors
// ---------------------------------------------------------------------------

fn quant_vars(scenario: &Scenario, quantized: bool) -> (Vec<f64>, Vec<bool>) {
    let m = scenario.num_sites();
    if !quantized {
        return (vec![0.0; m], vec![false; m]);
    }
    let mut vars = vec![0.0; m];
    let mut censored = vec![false; m];
    for i in 0..m {
        match scenario.site_quant_variance(i) {
            Some(v) => vars[i] = v,
            None => censored[i] = true,
        }
    }
    (vars, censored)
}

fn build_rule(family: RuleFamily, quantized: bool, scenario: &Scenario) -> FusionRule {
    let m = scenario.num_sites();
    let n = scenario.n_samples;
    let (qv, censored) = quant_vars(scenario, quantized);
    let mut weights = vec![0.0; m];
    let mut offsets = if family.is_quadratic() {
        vec![0.0; m]
    } else {
        Vec::new()
    };
    for i in 0..m {
        if censored[i] {
            continue;
        }
        let site = &scenario.sites[i];
        let xi = site.snr(n);
        match family {
            RuleFamily::Optimal => {
                let (a, b) = optimal_weight(xi, site.noise_var, n, qv[i]);
                weights[i] = a;
                offsets[i] = b;
            }
            RuleFamily::Weighted => {
                let (a, b) = weighted_weight(site.noise_var, n, qv[i]);
                weights[i] = a;
                offsets[i] = b;
            }
            RuleFamily::Equal => {
                let (_, b) = optimal_weight(xi, site.noise_var, n, qv[i]);
                weights[i] = 1.0;
                offsets[i] = b;
            }
            RuleFamily::Linear => {
                weights[i] = linear_weight(xi, site.noise_var, n, qv[i]);
            }
            RuleFamily::EqualLinear => {
                weights[i] = 1.0;
            }
        }
    }
    FusionRule {
        family,
        quantized,
        weights,
        offsets,
        censored,
    }
}

/// Likelihood-derived quadratic rule (unquantized).
pub fn optimal_weights(scenario: &Scenario) -> FusionRule {
    build_rule(RuleFamily::Optimal, false, scenario)
}

/// High-SNR quadratic rule (unquantized).
pub fn weighted_weights(scenario: &Scenario) -> FusionRule {
    build_rule(RuleFamily::Weighted, false, scenario)
}

/// Unit-weight quadratic rule (unquantized).
pub fn equal_weights(scenario: &Scenario) -> FusionRule {
    build_rule(RuleFamily::Equal, false, scenario)
}

/// Deflection-optimal linear rule (unquantized).
pub fn linear_weights(scenario: &Scenario) -> FusionRule {
    build_rule(RuleFamily::Linear, false, scenario)
}

/// All-ones linear rule (unquantized).
pub fn equal_linear_weights(scenario: &Scenario) -> FusionRule {
    build_rule(RuleFamily::EqualLinear, false, scenario)
}

/// Quantized counterpart of any family; per-sensor quantization-noise
/// variances come from the scenario's quantizer and censored sensors get
/// zero weight.
pub fn quantized_weights(family: RuleFamily, scenario: &Scenario) -> FusionRule {
    build_rule(family, true, scenario)
}
