//! Fiber quantum channel: dispersion and attenuation parameters, photon
//! survival, group delay, and stochastic arrival-time sampling.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::wavepacket::{self, PulseParams};
use crate::Result;

/// Propagation medium for one link.
///
/// `beta_re` is the quadratic dispersion coefficient (broadens pulses),
/// `beta_im >= 0` models frequency-dependent absorption (renormalizes the
/// broadening), and `loss_db_per_km` is the frequency-flat power loss that
/// only reduces click rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberChannel {
    /// Link length, m.
    pub length: f64,
    /// Group slowness, s/m.
    pub alpha: f64,
    /// Quadratic dispersion, s^2/m.
    pub beta_re: f64,
    /// Absorption-dispersion, s^2/m, >= 0.
    pub beta_im: f64,
    /// Flat power loss, dB/km, >= 0.
    pub loss_db_per_km: f64,
}

impl FiberChannel {
    /// Validates the channel invariants.
    pub fn new(
        length: f64,
        alpha: f64,
        beta_re: f64,
        beta_im: f64,
        loss_db_per_km: f64,
    ) -> Result<Self> {
        let ch = Self {
            length,
            alpha,
            beta_re,
            beta_im,
            loss_db_per_km,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Checks all field invariants, for channels built literally.
    pub fn validate(&self) -> Result<()> {
        if !(self.length >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "length",
                value: self.length,
                requirement: "must be >= 0",
            });
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                requirement: "must be > 0 (forward propagation)",
            });
        }
        if !(self.beta_im >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta_im",
                value: self.beta_im,
                requirement: "must be >= 0",
            });
        }
        if !(self.loss_db_per_km >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "loss_db_per_km",
                value: self.loss_db_per_km,
                requirement: "must be >= 0",
            });
        }
        Ok(())
    }

    /// Complex quadratic dispersion coefficient `beta_re + i beta_im`.
    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.beta_re, self.beta_im)
    }

    /// Photon survival probability over distance `x`:
    /// `10^(-loss_db_per_km * x_km / 10)`.
    pub fn survival_probability(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0 && x <= self.length + 1e-9);
        10f64.powf(-self.loss_db_per_km * (x / 1e3) / 10.0)
    }

    /// Envelope arrival delay `alpha * x`.
    pub fn group_delay(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0 && x <= self.length + 1e-9);
        self.alpha * x
    }

    /// Temporal RMS broadening ratio at distance `x` for a pulse of
    /// spectral parameter `sigma`, including the attenuation
    /// renormalization from `beta_im`. Reduces to the lossless factor
    /// `sqrt(1 + 4 beta_re^2 x^2 sigma^4)` when `beta_im = 0`.
    pub fn effective_broadening(&self, sigma: f64, x: f64) -> Result<f64> {
        wavepacket::broadening_factor(sigma, self.beta(), x)
    }

    /// Draws one photon detection time at distance `x` for a pulse emitted
    /// at `t_emit`: a normal sample with mean `t_emit + alpha x` and the
    /// propagated RMS width as standard deviation.
    pub fn sample_arrival_time<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        p: &PulseParams,
        x: f64,
        t_emit: f64,
    ) -> Result<f64> {
        let std = wavepacket::temporal_width(p, self.beta(), x)?;
        let normal = Normal::new(t_emit + self.alpha * x, std).map_err(|_| {
            Error::InvalidParameter {
                name: "arrival_std",
                value: std,
                requirement: "must be finite and > 0",
            }
        })?;
        Ok(normal.sample(rng))
    }
}
