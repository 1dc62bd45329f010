//! Network scenario, measurement generation, and the local energy statistic.
//!
//! A scenario is `M` sensors observing `N` samples each. Under the null
//! hypothesis a sensor sees pure Gaussian noise of variance `sigma_i^2`;
//! under the alternative a constant signature level `A` is added to every
//! sample. Each sensor reports the energy `T_i = sum |x_i(n)|^2` of its
//! window; its SNR is `xi_i = signal_energy / (N sigma_i^2)`, which for
//! the constant signature reduces to `A^2 / sigma_i^2`.
//!
//! Scenarios are immutable after construction and safe to share across
//! threads; all sampling takes an explicit RNG stream so callers own
//! parallelism.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::quant::{bits_for_power, quant_noise_variance, QuantizerMode, QuantizerSpec};
use crate::rng::{substream, StreamKind};

/// The binary hypothesis under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Noise only.
    H0,
    /// Signature plus noise.
    H1,
}

/// One sensor's local parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSite {
    /// Measurement noise variance `sigma_i^2`.
    pub noise_var: f64,
    /// Signature energy over the window, `sum_n s_i(n)^2`.
    pub signal_energy: f64,
    /// Flat-fading reporting-channel gain `h_i`.
    pub channel_gain: f64,
    /// Reporting-channel noise variance `zeta_i`.
    pub comm_noise_var: f64,
    /// Allocated transmit power `p_i`.
    pub tx_power: f64,
    /// Quantization bit budget `L_i`; zero means censored.
    pub bits: u32,
}

impl SensorSite {
    /// Per-sensor SNR `xi_i = signal_energy / (N sigma_i^2)`.
    pub fn snr(&self, n_samples: usize) -> f64 {
        self.signal_energy / (n_samples as f64 * self.noise_var)
    }

    /// A sensor whose channel supports zero bits contributes nothing to
    /// quantized fusion.
    pub fn is_censored(&self) -> bool {
        self.bits == 0
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.noise_var > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "site {index}: noise_var must be positive, got {}",
                self.noise_var
            )));
        }
        if !(self.comm_noise_var > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "site {index}: comm_noise_var must be positive, got {}",
                self.comm_noise_var
            )));
        }
        if self.signal_energy < 0.0 || self.channel_gain < 0.0 || self.tx_power < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "site {index}: signal_energy, channel_gain and tx_power must be nonnegative"
            )));
        }
        Ok(())
    }
}

/// Channel-gain distribution used by the scenario generator.
#[derive(Debug, Clone, PartialEq)]
pub enum GainModel {
    /// Rayleigh fading scaled to the given mean-square gain `E[h^2]`.
    Rayleigh { mean_square: f64 },
    /// Every sensor gets the same gain.
    Constant(f64),
    /// Explicit per-site gains (length must equal the sensor count).
    Explicit(Vec<f64>),
}

impl Default for GainModel {
    fn default() -> Self {
        GainModel::Rayleigh { mean_square: 1.0 }
    }
}

/// Per-sensor transmit power assignment for generated scenarios.
#[derive(Debug, Clone, PartialEq)]
pub enum TxPower {
    Uniform(f64),
    PerSite(Vec<f64>),
}

impl Default for TxPower {
    fn default() -> Self {
        TxPower::Uniform(20.0)
    }
}

/// Everything [`generate_scenario`] needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    /// Number of sensors `M`.
    pub num_sensors: usize,
    /// Samples per sensor `N`.
    pub n_samples: usize,
    /// Constant signature level `A` (`s_i(n) = A`).
    pub amplitude: f64,
    /// Network-average SNR target `xi_a` in dB; noise variances are
    /// rescaled by one global factor to hit it exactly. `None` keeps the
    /// raw draws.
    pub target_avg_snr_db: Option<f64>,
    /// Uniform draw range for the measurement noise variances.
    pub noise_var_range: (f64, f64),
    /// Explicit noise variances; overrides the range draw (still rescaled
    /// when a target SNR is given).
    pub noise_vars: Option<Vec<f64>>,
    pub gain_model: GainModel,
    /// Reporting-channel noise variance, shared by all sensors.
    pub comm_noise_var: f64,
    pub tx_power: TxPower,
    /// Quantizer half-range `B`.
    pub quant_half_range: f64,
    pub quant_mode: QuantizerMode,
    /// Codebook-center override; default is each sensor's statistic mean
    /// under the null, `N sigma_i^2`.
    pub quant_center: Option<f64>,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            num_sensors: 10,
            n_samples: 10,
            amplitude: 0.1,
            target_avg_snr_db: Some(-8.5),
            noise_var_range: (0.5, 1.5),
            noise_vars: None,
            gain_model: GainModel::default(),
            comm_noise_var: 0.1,
            tx_power: TxPower::default(),
            quant_half_range: 0.5,
            quant_mode: QuantizerMode::AdditiveNoise,
            quant_center: None,
            seed: 0,
        }
    }
}

/// An immutable network description: sites plus the shared sampling and
/// quantization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sites: Vec<SensorSite>,
    pub n_samples: usize,
    pub amplitude: f64,
    pub quant_half_range: f64,
    pub quant_mode: QuantizerMode,
    pub quant_center: Option<f64>,
    pub rng_seed: u64,
}

impl Scenario {
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    /// Per-sensor SNR `xi_i`.
    pub fn site_snr(&self, index: usize) -> f64 {
        self.sites[index].snr(self.n_samples)
    }

    /// Network-average SNR `xi_a = 10 log10(mean_i xi_i)` in dB.
    pub fn avg_snr_db(&self) -> f64 {
        let mean = self
            .sites
            .iter()
            .map(|s| s.snr(self.n_samples))
            .sum::<f64>()
            / self.sites.len() as f64;
        10.0 * mean.log10()
    }

    /// Quantizer for one site, or `None` if the site is censored. The
    /// codebook center defaults to the site's null-hypothesis statistic
    /// mean `N sigma_i^2`.
    pub fn quantizer_for_site(&self, index: usize) -> Option<QuantizerSpec> {
        let site = &self.sites[index];
        if site.bits == 0 {
            return None;
        }
        let center = self
            .quant_center
            .unwrap_or(self.n_samples as f64 * site.noise_var);
        Some(QuantizerSpec {
            half_range: self.quant_half_range,
            bits: site.bits,
            center,
            mode: self.quant_mode,
        })
    }

    /// Quantization-noise variance for one site under the additive model,
    /// or `None` if censored.
    pub fn site_quant_variance(&self, index: usize) -> Option<f64> {
        let site = &self.sites[index];
        if site.bits == 0 {
            None
        } else {
            Some(quant_noise_variance(self.quant_half_range, site.bits))
        }
    }

    /// Copy of the scenario with new transmit powers; bit budgets are
    /// recomputed from the channel capacity.
    pub fn with_tx_powers(&self, powers: &[f64]) -> Result<Scenario> {
        if powers.len() != self.sites.len() {
            return Err(Error::LengthMismatch {
                expected: self.sites.len(),
                got: powers.len(),
            });
        }
        let mut out = self.clone();
        for (site, &p) in out.sites.iter_mut().zip(powers) {
            if p < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "tx power must be nonnegative, got {p}"
                )));
            }
            site.tx_power = p;
            site.bits = bits_for_power(p, site.channel_gain, site.comm_noise_var);
        }
        Ok(out)
    }

    /// Copy of the scenario with every sensor forced to `bits` bits; the
    /// transmit powers are set to the minimum that supports them.
    pub fn with_uniform_bits(&self, bits: u32) -> Scenario {
        let mut out = self.clone();
        for site in &mut out.sites {
            site.bits = bits;
            site.tx_power =
                crate::quant::min_power_for_bits(bits, site.channel_gain, site.comm_noise_var);
        }
        out
    }
}

/// Generate a scenario: noise variances drawn uniformly (then rescaled by
/// a single global factor so the average SNR hits the target exactly),
/// channel gains from the gain model, bit budgets from the channel
/// capacity. Pure function of its parameters, including the seed.
pub fn generate_scenario(params: &ScenarioParams) -> Result<Scenario> {
    let m = params.num_sensors;
    if m == 0 {
        return Err(Error::InvalidParameter("num_sensors must be >= 1".into()));
    }
    if params.n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let (lo, hi) = params.noise_var_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidParameter(format!(
            "noise_var_range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
        )));
    }
    if !(params.comm_noise_var > 0.0) {
        return Err(Error::InvalidParameter(
            "comm_noise_var must be positive".into(),
        ));
    }
    if !(params.quant_half_range > 0.0) {
        return Err(Error::InvalidParameter(
            "quant_half_range must be positive".into(),
        ));
    }

    // Noise variances.
    let mut noise_vars: Vec<f64> = match &params.noise_vars {
        Some(list) => {
            if list.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: list.len(),
                });
            }
            if list.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::InvalidParameter(
                    "explicit noise_var entries must be positive".into(),
                ));
            }
            list.clone()
        }
        None => {
            let mut rng = substream(params.seed, StreamKind::NoiseVar, 0, 0);
            (0..m).map(|_| rng.random_range(lo..=hi)).collect()
        }
    };

    // One global rescale so the recomputed average SNR equals the target.
    let n = params.n_samples as f64;
    let signal_energy = n * params.amplitude * params.amplitude;
    if let Some(target_db) = params.target_avg_snr_db {
        if signal_energy == 0.0 {
            return Err(Error::InvalidParameter(
                "target_avg_snr_db is unachievable with zero amplitude".into(),
            ));
        }
        let mean_snr = noise_vars
            .iter()
            .map(|&v| signal_energy / (n * v))
            .sum::<f64>()
            / m as f64;
        let target = 10f64.powf(target_db / 10.0);
        let scale = mean_snr / target;
        for v in &mut noise_vars {
            *v *= scale;
        }
    }

    // Channel gains.
    let gains: Vec<f64> = match &params.gain_model {
        GainModel::Rayleigh { mean_square } => {
            if !(*mean_square > 0.0) {
                return Err(Error::InvalidParameter(
                    "rayleigh mean_square must be positive".into(),
                ));
            }
            // E[h^2] = 2 s^2 for Rayleigh scale s; inverse-CDF draw.
            let scale = (mean_square / 2.0).sqrt();
            let mut rng = substream(params.seed, StreamKind::ChannelGain, 0, 0);
            (0..m)
                .map(|_| {
                    let u: f64 = rng.random();
                    scale * (-2.0 * (1.0 - u).ln()).sqrt()
                })
                .collect()
        }
        GainModel::Constant(g) => {
            if *g < 0.0 {
                return Err(Error::InvalidParameter(
                    "constant gain must be nonnegative".into(),
                ));
            }
            vec![*g; m]
        }
        GainModel::Explicit(list) => {
            if list.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: list.len(),
                });
            }
            if list.iter().any(|&g| g < 0.0) {
                return Err(Error::InvalidParameter(
                    "explicit channel gains must be nonnegative".into(),
                ));
            }
            list.clone()
        }
    };

    // Transmit powers and the resulting bit budgets.
    let powers: Vec<f64> = match &params.tx_power {
        TxPower::Uniform(p) => {
            if *p < 0.0 {
                return Err(Error::InvalidParameter(
                    "tx_power must be nonnegative".into(),
                ));
            }
            vec![*p; m]
        }
        TxPower::PerSite(list) => {
            if list.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: list.len(),
                });
            }
            if list.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidParameter(
                    "tx_power entries must be nonnegative".into(),
                ));
            }
            list.clone()
        }
    };

    let sites: Vec<SensorSite> = (0..m)
        .map(|i| SensorSite {
            noise_var: noise_vars[i],
            signal_energy,
            channel_gain: gains[i],
            comm_noise_var: params.comm_noise_var,
            tx_power: powers[i],
            bits: bits_for_power(powers[i], gains[i], params.comm_noise_var),
        })
        .collect();
    for (i, site) in sites.iter().enumerate() {
        site.validate(i)?;
    }

    Ok(Scenario {
        sites,
        n_samples: params.n_samples,
        amplitude: params.amplitude,
        quant_half_range: params.quant_half_range,
        quant_mode: params.quant_mode,
        quant_center: params.quant_center,
        rng_seed: params.seed,
    })
}

/// Draw one window of `N` measurements for a site: zero-mean Gaussian
/// noise of variance `sigma_i^2`, plus the signature level under H1.
pub fn sample_measurements<R: Rng + ?Sized>(
    scenario: &Scenario,
    site_index: usize,
    hypothesis: Hypothesis,
    rng: &mut R,
) -> Vec<f64> {
    let site = &scenario.sites[site_index];
    let normal = Normal::new(0.0, site.noise_var.sqrt()).expect("positive noise variance");
    let offset = match hypothesis {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => scenario.amplitude,
    };
    (0..scenario.n_samples)
        .map(|_| offset + normal.sample(rng))
        .collect()
}

/// Energy statistic `T = sum |x(n)|^2`.
pub fn energy_statistic(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "energy statistic of an empty window".into(),
        ));
    }
    Ok(samples.iter().map(|x| x * x).sum())
}
