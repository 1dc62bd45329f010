//! Closed-form detection analysis under the Gaussian statistic model.
//!
//! The local energy statistic is treated as Gaussian with mean `N sigma^2`
//! (times `1 + xi` under H1) and variance `2 N sigma^4` (times `1 + 2 xi`
//! under H1); quantization adds its noise variance to both. From there the
//! moments of the per-sensor quadratic score `U = (T_hat - b)^2`, the
//! fused statistic's moments, Neyman-Pearson thresholds, and the detection
//! probability
//!
//! ```text
//! P_d = Q( (Q^{-1}(P_fa) sqrt(Var0) - Psi) / sqrt(Var1) ),   Psi = E1 - E0
//! ```
//!
//! all follow in closed form. The threshold convention everywhere is
//! "declare H1 iff the fused statistic >= threshold", with the threshold
//! calibrated to a target false-alarm probability (the prior-weighted
//! likelihood thresholds the rules descend from are never materialized).
//!
//! Everything here is pure and safe to evaluate in parallel over grids.

use crate::error::{Error, Result};
use crate::fusion::FusionRule;
use crate::model::{Hypothesis, Scenario, SensorSite};
use crate::special::{q, q_inv};

/// Mean/variance pairs for a statistic under both hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mean_h0: f64,
    pub var_h0: f64,
    pub mean_h1: f64,
    pub var_h1: f64,
}

impl MomentSet {
    pub fn mean(&self, hyp: Hypothesis) -> f64 {
        match hyp {
            Hypothesis::H0 => self.mean_h0,
            Hypothesis::H1 => self.mean_h1,
        }
    }

    pub fn var(&self, hyp: Hypothesis) -> f64 {
        match hyp {
            Hypothesis::H0 => self.var_h0,
            Hypothesis::H1 => self.var_h1,
        }
    }
}

/// Where a detection curve's numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form Gaussian analysis.
    Analytic,
    /// Monte Carlo over the physical measurement pipeline.
    Empirical,
    /// Monte Carlo drawing the local statistic from its Gaussian model.
    EmpiricalModel,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Empirical => "empirical",
            Provenance::EmpiricalModel => "empirical-model",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub p_fa: f64,
    pub p_d: f64,
}

/// An ROC: `(P_fa, P_d)` points (strictly increasing in `P_fa`) plus rule
/// identity and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCurve {
    pub rule: String,
    pub provenance: Provenance,
    pub points: Vec<RocPoint>,
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// Energy-statistic moments: `(N sigma^2, 2 N sigma^4)` under H0 and
/// `(N sigma^2 (1 + xi), 2 N sigma^4 (1 + 2 xi))` under H1.
pub fn ti_moments(site: &SensorSite, n_samples: usize) -> MomentSet {
    let n = n_samples as f64;
    let s2 = site.noise_var;
    let xi = site.snr(n_samples);
    MomentSet {
        mean_h0: n * s2,
        var_h0: 2.0 * n * s2 * s2,
        mean_h1: n * s2 * (1.0 + xi),
        var_h1: 2.0 * n * s2 * s2 * (1.0 + 2.0 * xi),
    }
}

/// Quantized-statistic moments: means unchanged, both variances grow by
/// the quantization-noise variance.
pub fn that_moments(site: &SensorSite, n_samples: usize, quant_var: f64) -> MomentSet {
    let t = ti_moments(site, n_samples);
    MomentSet {
        var_h0: t.var_h0 + quant_var,
        var_h1: t.var_h1 + quant_var,
        ..t
    }
}

/// Moments of the per-sensor quadratic score `U = (T_hat - b)^2` under
/// the Gaussian model of `T_hat`:
/// `E{U} = (E{T_hat} - b)^2 + Var{T_hat}` and
/// `Var{U} = 4 (E{T_hat} - b)^2 Var{T_hat} + 2 Var{T_hat}^2`,
/// expanded per hypothesis.
pub fn ui_moments(site: &SensorSite, n_samples: usize, quant_var: f64, offset: f64) -> MomentSet {
    let n = n_samples as f64;
    let s2 = site.noise_var;
    let xi = site.snr(n_samples);
    let b = offset;
    let t = that_moments(site, n_samples, quant_var);

    // H0, in expanded form (identical to (m-b)^2 + v).
    let mean_h0 =
        2.0 * n * s2 * s2 + n * n * s2 * s2 + quant_var - 2.0 * b * n * s2 + b * b;
    let var_h0 = t.var_h0
        * (4.0 * n * n * s2 * s2 + 2.0 * t.var_h0 + 4.0 * b * b - 8.0 * n * b * s2);

    // H1.
    let m1 = t.mean_h1;
    let v1 = t.var_h1;
    let mean_h1 = m1 * m1 + v1 - 2.0 * b * (n * s2 + n * s2 * xi) + b * b;
    let var_h1 = 4.0 * m1 * m1 * v1 + 2.0 * v1 * v1 + 4.0 * b * b * v1 - 8.0 * b * m1 * v1;

    MomentSet {
        mean_h0,
        var_h0,
        mean_h1,
        var_h1,
    }
}

/// Fused-statistic moments for a rule: weighted sums of the per-sensor
/// score moments (squared weights for the variances). Quadratic families
/// sum `U` moments, linear families sum `T_hat` moments. Censored sensors
/// contribute nothing. Unquantized rules are the `quant_var = 0` case.
pub fn fusion_moments(rule: &FusionRule, scenario: &Scenario) -> Result<MomentSet> {
    if rule.num_sensors() != scenario.num_sites() {
        return Err(Error::LengthMismatch {
            expected: scenario.num_sites(),
            got: rule.num_sensors(),
        });
    }
    let mut acc = MomentSet {
        mean_h0: 0.0,
        var_h0: 0.0,
        mean_h1: 0.0,
        var_h1: 0.0,
    };
    for i in 0..rule.num_sensors() {
        if rule.censored[i] {
            continue;
        }
        let quant_var = if rule.quantized {
            scenario
                .site_quant_variance(i)
                .expect("non-censored site has a quantizer")
        } else {
            0.0
        };
        let w = rule.weights[i];
        let site = &scenario.sites[i];
        let m = if rule.family.is_quadratic() {
            ui_moments(site, scenario.n_samples, quant_var, rule.offsets[i])
        } else {
            that_moments(site, scenario.n_samples, quant_var)
        };
        acc.mean_h0 += w * m.mean_h0;
        acc.mean_h1 += w * m.mean_h1;
        acc.var_h0 += w * w * m.var_h0;
        acc.var_h1 += w * w * m.var_h1;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Thresholds and detection probability
// ---------------------------------------------------------------------------

/// Neyman-Pearson threshold: `mean_h0 + Q^{-1}(p_fa) sqrt(var_h0)`.
/// Decision rule: declare H1 iff the fused statistic >= threshold.
pub fn threshold_for_pfa(moments: &MomentSet, p_fa: f64) -> Result<f64> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_fa must lie in (0, 1), got {p_fa}"
        )));
    }
    if !(moments.var_h0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "var_h0 must be positive to calibrate a threshold, got {}",
            moments.var_h0
        )));
    }
    Ok(moments.mean_h0 + q_inv(p_fa) * moments.var_h0.sqrt())
}

/// Closed-form detection probability at false-alarm probability `p_fa`.
///
/// Degenerate variances fall back to the point-mass reading: a zero-
/// information statistic (equal moments) sits on the diagonal `P_d = p_fa`.
pub fn pd_closed_form(moments: &MomentSet, p_fa: f64) -> Result<f64> {
    if !(p_fa > 0.0 && p_fa <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_fa must lie in (0, 1], got {p_fa}"
        )));
    }
    if p_fa == 1.0 {
        return Ok(1.0);
    }
    let psi = moments.mean_h1 - moments.mean_h0;
    if moments.var_h1 <= 0.0 {
        // H1 mass concentrated at mean_h1; threshold at mean_h0 + z*sqrt(v0).
        let tau = moments.mean_h0 + q_inv(p_fa) * moments.var_h0.max(0.0).sqrt();
        return Ok(if moments.mean_h1 > tau {
            1.0
        } else if moments.mean_h1 < tau {
            0.0
        } else {
            p_fa
        });
    }
    let v0 = moments.var_h0.max(0.0);
    Ok(q((q_inv(p_fa) * v0.sqrt() - psi) / moments.var_h1.sqrt()))
}

/// Analytic ROC for a rule over a strictly increasing `p_fa` grid in
/// `(0, 1]`.
pub fn roc_curve(rule: &FusionRule, scenario: &Scenario, p_fa_grid: &[f64]) -> Result<DetectionCurve> {
    validate_grid(p_fa_grid)?;
    let moments = fusion_moments(rule, scenario)?;
    let points = p_fa_grid
        .iter()
        .map(|&p_fa| {
            Ok(RocPoint {
                p_fa,
                p_d: pd_closed_form(&moments, p_fa)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DetectionCurve {
        rule: rule.name(),
        provenance: Provenance::Analytic,
        points,
    })
}

pub(crate) fn validate_grid(p_fa_grid: &[f64]) -> Result<()> {
    if p_fa_grid.is_empty() {
        return Err(Error::InvalidParameter("empty p_fa grid".into()));
    }
    for pair in p_fa_grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidParameter(
                "p_fa grid must be strictly increasing".into(),
            ));
        }
    }
    if !(p_fa_grid[0] > 0.0 && *p_fa_grid.last().unwrap() <= 1.0) {
        return Err(Error::InvalidParameter(
            "p_fa grid must lie in (0, 1]".into(),
        ));
    }
    Ok(())
}
