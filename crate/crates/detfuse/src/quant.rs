//! Reporting-channel bit budgets and local-statistic quantization.
//!
//! A sensor transmitting with power `p` over a flat-fading channel with
//! gain `h` and noise variance `zeta` can reliably deliver at most
//! `floor(log2(1 + p h^2 / zeta) / 2)` bits per statistic; we assume the
//! full capacity is used. An `L`-bit uniform quantizer of half-range `B`
//! has step `delta = 2B / 2^L` and error variance `B^2 / (3 * 4^L)`.
//!
//! Two quantizer models are provided: the additive-noise abstraction
//! (error drawn uniformly on `[-delta/2, delta/2]`, matching the variance
//! formula exactly) used by all closed-form analysis, and an explicit
//! mid-rise codebook for checking how faithful that abstraction is.

use rand::Rng;

use crate::error::{Error, Result};

/// Quantizer behaviour: the analytical additive-noise model vs an actual
/// codebook lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerMode {
    /// `T_hat = T + v`, `v ~ U[-delta/2, delta/2]`.
    AdditiveNoise,
    /// Nearest codeword of a 2^L-level mid-rise codebook on
    /// `[center - B, center + B]`; out-of-range inputs clip to the
    /// extreme codewords.
    Explicit,
}

/// One sensor's quantizer: half-range `B`, bit budget `L`, codebook
/// center, and operating mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    pub half_range: f64,
    pub bits: u32,
    pub center: f64,
    pub mode: QuantizerMode,
}

impl QuantizerSpec {
    pub fn new(half_range: f64, bits: u32, center: f64, mode: QuantizerMode) -> Result<Self> {
        if !(half_range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quantizer half_range must be positive, got {half_range}"
            )));
        }
        Ok(Self {
            half_range,
            bits,
            center,
            mode,
        })
    }

    /// Step size `delta = 2B / 2^L`.
    pub fn step(&self) -> f64 {
        2.0 * self.half_range / 2f64.powi(self.bits as i32)
    }

    /// Quantization-noise variance `B^2 / (3 * 4^L)` (equivalently
    /// `delta^2 / 12`). A censored sensor (`bits == 0`) has no output and
    /// therefore no noise variance.
    pub fn noise_variance(&self) -> Result<f64> {
        if self.bits == 0 {
            return Err(Error::CensoredSensor { index: 0 });
        }
        Ok(quant_noise_variance(self.half_range, self.bits))
    }

    /// Quantize one statistic. Additive mode draws the error from `rng`;
    /// explicit mode is deterministic and ignores it.
    pub fn quantize<R: Rng + ?Sized>(&self, statistic: f64, rng: &mut R) -> Result<f64> {
        if self.bits == 0 {
            return Err(Error::CensoredSensor { index: 0 });
        }
        match self.mode {
            QuantizerMode::AdditiveNoise => {
                let half_step = 0.5 * self.step();
                Ok(statistic + rng.random_range(-half_step..half_step))
            }
            QuantizerMode::Explicit => {
                let delta = self.step();
                let lo = self.center - self.half_range;
                let levels = 2u64.pow(self.bits.min(52)) as f64;
                let idx = ((statistic - lo) / delta).floor().clamp(0.0, levels - 1.0);
                Ok(lo + (idx + 0.5) * delta)
            }
        }
    }
}

/// Largest integer bit budget the channel capacity admits:
/// `floor(log2(1 + p h^2 / zeta) / 2)`. Zero power (or a dead channel)
/// gives zero bits, i.e. a censored sensor.
pub fn bits_for_power(tx_power: f64, channel_gain: f64, comm_noise_var: f64) -> u32 {
    debug_assert!(tx_power >= 0.0 && channel_gain >= 0.0 && comm_noise_var > 0.0);
    let snr = tx_power * channel_gain * channel_gain / comm_noise_var;
    let capacity = 0.5 * (1.0 + snr).log2();
    if capacity <= 0.0 {
        0
    } else {
        capacity.floor().min(u32::MAX as f64) as u32
    }
}

/// `B^2 / (3 * 4^L)` for `L >= 1`.
pub fn quant_noise_variance(half_range: f64, bits: u32) -> f64 {
    debug_assert!(bits >= 1);
    half_range * half_range / (3.0 * 4f64.powi(bits as i32))
}

/// Minimum transmit power that supports `bits` over the given channel:
/// the inverse of [`bits_for_power`], `zeta (4^L - 1) / h^2`.
///
/// The returned value is nudged up by one part in 1e12 so that feeding it
/// back through `bits_for_power` is not lost to rounding at the boundary.
pub fn min_power_for_bits(bits: u32, channel_gain: f64, comm_noise_var: f64) -> f64 {
    if bits == 0 {
        return 0.0;
    }
    let h2 = channel_gain * channel_gain;
    if h2 <= 0.0 {
        return f64::INFINITY;
    }
    let exact = comm_noise_var * (4f64.powi(bits as i32) - 1.0) / h2;
    exact * (1.0 + 1e-12)
}
