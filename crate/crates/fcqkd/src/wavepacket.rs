//! Gaussian single-photon wavepackets under quadratic dispersion.
//!
//! Fields are complex envelopes relative to the carrier: the spectral
//! variable is the offset `nu = omega - omega0`, so the carrier phase
//! (irrelevant to intensities and moments) is never sampled. All closed
//! forms here are cross-checked against [`numeric_propagate`], a direct
//! Fourier-synthesis quadrature that serves as the ground-truth oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::Error;
use crate::Result;

/// Gaussian wavepacket: carrier angular frequency and the spectral width
/// parameter `sigma` of the amplitude `exp(-(omega-omega0)^2 / 2 sigma^2)`.
///
/// `sigma` is the Gaussian parameter, not the RMS width; the RMS spectral
/// width of the intensity spectrum is `sigma / sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    /// Carrier angular frequency, rad/s.
    pub omega0: f64,
    /// Spectral width parameter, rad/s.
    pub sigma: f64,
}

impl PulseParams {
    /// Validates `sigma > 0`, `omega0 > 0` and the narrowband condition
    /// `sigma < omega0` that justifies the quadratic dispersion expansion.
    pub fn new(omega0: f64, sigma: f64) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega0",
                value: omega0,
                requirement: "must be > 0",
            });
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                requirement: "must be > 0",
            });
        }
        if !(sigma < omega0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                requirement: "must be < omega0 (narrowband)",
            });
        }
        Ok(Self { omega0, sigma })
    }

    /// RMS spectral width `sigma / sqrt(2)`, invariant under lossless
    /// propagation.
    pub fn spectral_width(&self) -> f64 {
        self.sigma / std::f64::consts::SQRT_2
    }

    /// RMS duration at the channel input, `1 / (sqrt(2) sigma)`.
    pub fn initial_duration(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.sigma)
    }
}

/// Normalized spectral intensity density at angular frequency `omega`:
/// a Gaussian of mean `omega0` and variance `sigma^2 / 2`, unit integral.
pub fn spectral_density(p: &PulseParams, omega: f64) -> f64 {
    let d = omega - p.omega0;
    (-d * d / (p.sigma * p.sigma)).exp() / (PI * p.sigma * p.sigma).sqrt()
}

/// Spectral amplitude at baseband offset `nu = omega - omega0`, normalized
/// so the intensity spectrum has unit integral.
pub fn spectral_amplitude(p: &PulseParams, nu: f64) -> f64 {
    (-nu * nu / (2.0 * p.sigma * p.sigma)).exp() / (PI * p.sigma * p.sigma).powf(0.25)
}

/// RMS spectral width `sigma / sqrt(2)`.
pub fn spectral_width(p: &PulseParams) -> f64 {
    p.spectral_width()
}

/// Effective complex width parameter after distance `x`:
/// `w = 1/(2 sigma^2) + beta_im x - i beta_re x`.
///
/// Errors with [`Error::GainRegime`] when `Re(w) <= 0`, i.e. negative
/// `beta_im` strong enough to act as gain.
fn width_parameter(sigma: f64, beta: Complex64, x: f64) -> Result<Complex64> {
    let w = Complex64::new(1.0 / (2.0 * sigma * sigma) + beta.im * x, -beta.re * x);
    if w.re <= 0.0 {
        return Err(Error::GainRegime { re: w.re });
    }
    Ok(w)
}

/// Temporal RMS broadening ratio of the intensity envelope after distance
/// `x`, relative to the input duration.
///
/// With `u = 1 + 2 sigma^2 beta_im x` the squared ratio is
/// `(u^2 + 4 beta_re^2 x^2 sigma^4) / u`; the lossless case reduces to
/// `sqrt(1 + 4 beta_re^2 x^2 sigma^4)`. The factor 4 follows from
/// `|exp(-tau^2/4w)|^2` with `w = 1/(2 sigma^2) - i beta_re x` and is
/// pinned by the [`numeric_propagate`] oracle.
pub fn broadening_factor(sigma: f64, beta: Complex64, x: f64) -> Result<f64> {
    let u = 1.0 + 2.0 * sigma * sigma * beta.im * x;
    if u <= 0.0 {
        return Err(Error::GainRegime {
            re: u / (2.0 * sigma * sigma),
        });
    }
    let s2 = sigma * sigma;
    let b = beta.re * x * s2;
    Ok(((u * u + 4.0 * b * b) / u).sqrt())
}

/// RMS duration of the intensity envelope at distance `x`.
pub fn temporal_width(p: &PulseParams, beta: Complex64, x: f64) -> Result<f64> {
    Ok(p.initial_duration() * broadening_factor(p.sigma, beta, x)?)
}

/// Closed-form complex envelope at distance `x` and time `t`.
///
/// `E(x,t) = (pi sigma^2)^{-1/4} sqrt(pi/w) exp(-(t - alpha x)^2 / 4w) / sqrt(2 pi)`
/// with `w` from [`width_parameter`]. At `x = 0` this is the Fourier
/// transform of the input spectrum; the time integral of `|E|^2` is 1 for
/// `beta_im = 0`.
pub fn analytic_field(
    p: &PulseParams,
    beta: Complex64,
    alpha: f64,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    let w = width_parameter(p.sigma, beta, x)?;
    let tau = t - alpha * x;
    let pref = (PI / w).sqrt() / ((2.0 * PI).sqrt() * (PI * p.sigma * p.sigma).powf(0.25));
    Ok(pref * (-(tau * tau) / (4.0 * w)).exp())
}

/// Intensity `|E(x,t)|^2` of the closed-form envelope.
pub fn intensity(p: &PulseParams, beta: Complex64, alpha: f64, x: f64, t: f64) -> Result<f64> {
    Ok(analytic_field(p, beta, alpha, x, t)?.norm_sqr())
}

/// A complex field sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    /// Time of the first sample, s.
    pub t_start: f64,
    /// Grid step, s.
    pub dt: f64,
    /// Complex amplitudes.
    pub samples: Vec<Complex64>,
}

impl SampledField {
    /// Sample time of index `j`.
    pub fn time(&self, j: usize) -> f64 {
        self.t_start + j as f64 * self.dt
    }

    /// L2 norm `sqrt(integral |E|^2 dt)` by trapezoidal quadrature.
    pub fn l2_norm(&self) -> f64 {
        trapezoid(self.dt, self.samples.iter().map(|c| c.norm_sqr())).sqrt()
    }
}

/// A complex spectrum sampled on a uniform baseband grid `nu = omega - omega0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    /// Baseband offset of the first sample, rad/s.
    pub nu_start: f64,
    /// Grid step, rad/s.
    pub d_nu: f64,
    /// Time origin the spectral phases are referenced to, s. A field
    /// centered at `t_ref` has slowly varying phases on this grid.
    pub t_ref: f64,
    /// Complex spectral amplitudes.
    pub samples: Vec<Complex64>,
}

impl SampledSpectrum {
    /// Baseband offset of index `k`.
    pub fn nu(&self, k: usize) -> f64 {
        self.nu_start + k as f64 * self.d_nu
    }
}

/// Uniform time grid specification for [`numeric_propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    /// Time of the first sample, s.
    pub t_start: f64,
    /// Grid step, s.
    pub dt: f64,
    /// Number of samples.
    pub n: usize,
}

impl TimeGrid {
    /// Grid centered on the arrival time `alpha x`, spanning
    /// `span_widths` output RMS widths on each side with
    /// `pts_per_width` samples per width.
    pub fn auto(
        p: &PulseParams,
        beta: Complex64,
        alpha: f64,
        x: f64,
        span_widths: f64,
        pts_per_width: f64,
    ) -> Result<TimeGrid> {
        let w_out = temporal_width(p, beta, x)?;
        let dt = w_out / pts_per_width;
        let half = span_widths * w_out;
        // One sample of padding keeps the span checks off the exact
        // rounding boundary.
        let n = (2.0 * half / dt).ceil() as usize + 2;
        Ok(TimeGrid {
            t_start: alpha * x - half,
            dt,
            n,
        })
    }

    /// Default oracle grid: +/- 8 widths, 32 points per width.
    pub fn default_for(p: &PulseParams, beta: Complex64, alpha: f64, x: f64) -> Result<TimeGrid> {
        Self::auto(p, beta, alpha, x, 8.0, 32.0)
    }

    fn t_end(&self) -> f64 {
        self.t_start + (self.n - 1) as f64 * self.dt
    }
}

/// Input to [`numeric_propagate`]: the field at the channel entrance,
/// given as the ideal pulse, a time-domain sampling, or a spectrum.
#[derive(Debug, Clone, Copy)]
pub enum FieldInput<'a> {
    /// Ideal Gaussian spectrum of the pulse parameters; sampled internally.
    Pulse,
    /// Time-domain samples at `x = 0`.
    Time(&'a SampledField),
    /// Baseband spectrum samples at `x = 0`.
    Spectrum(&'a SampledSpectrum),
}

/// Propagates the input field to distance `x` by applying the quadratic
/// phase/attenuation factor mode-by-mode over a sampled spectrum and
/// synthesizing the time-domain field by discrete Fourier summation.
///
/// This routine is the ground-truth oracle for [`analytic_field`] and
/// [`temporal_width`]: it never uses the Gaussian closed forms. Grid
/// preconditions (span at least +/- 8 output widths around `alpha x`,
/// spectral sampling of at least 32 points per RMS width, and an aliasing
/// window wide enough for the requested grid) are checked and reported
/// as [`Error::GridUnderresolved`].
pub fn numeric_propagate(
    input: FieldInput<'_>,
    p: &PulseParams,
    beta: Complex64,
    alpha: f64,
    x: f64,
    grid: &TimeGrid,
) -> Result<SampledField> {
    if grid.n < 2 || !(grid.dt > 0.0) {
        return Err(Error::GridUnderresolved(format!(
            "time grid needs n >= 2 and dt > 0 (n = {}, dt = {:.3e})",
            grid.n, grid.dt
        )));
    }
    let w_out = temporal_width(p, beta, x)?;
    let center = alpha * x;
    // Absolute slack for rounding of `center +/- span` at large delays.
    let need = 8.0 * w_out;
    let slack = 4.0 * f64::EPSILON * (center.abs() + need) + 1e-9 * w_out;
    if center - grid.t_start < need - slack || grid.t_end() - center < need - slack {
        return Err(Error::GridUnderresolved(format!(
            "time grid must span at least +/- 8 output RMS widths ({:.3e} s) around alpha*x",
            w_out
        )));
    }

    // Aliasing window: the synthesis sum periodizes the true field with
    // period 2 pi / d_nu, which must clear the evaluation window plus the
    // field's own tails.
    let half_extent = (center - grid.t_start).max(grid.t_end() - center);
    let max_d_nu_alias = 2.0 * PI / (half_extent + 12.0 * w_out);
    let max_d_nu_resolve = p.spectral_width() / 32.0;

    let spectrum_owned;
    let spectrum: &SampledSpectrum = match input {
        FieldInput::Spectrum(s) => {
            if s.samples.len() < 2 || !(s.d_nu > 0.0) {
                return Err(Error::GridUnderresolved(
                    "spectrum grid needs >= 2 samples and d_nu > 0".into(),
                ));
            }
            if s.d_nu > max_d_nu_resolve {
                return Err(Error::GridUnderresolved(format!(
                    "spectral step {:.3e} exceeds the 32-points-per-RMS-width limit {:.3e}",
                    s.d_nu, max_d_nu_resolve
                )));
            }
            if s.d_nu > max_d_nu_alias {
                return Err(Error::GridUnderresolved(format!(
                    "spectral step {:.3e} aliases the requested time window (limit {:.3e})",
                    s.d_nu, max_d_nu_alias
                )));
            }
            s
        }
        FieldInput::Pulse => {
            spectrum_owned = ideal_spectrum(p, max_d_nu_resolve.min(max_d_nu_alias));
            &spectrum_owned
        }
        FieldInput::Time(f) => {
            if f.samples.len() < 2 || !(f.dt > 0.0) {
                return Err(Error::GridUnderresolved(
                    "time input needs >= 2 samples and dt > 0".into(),
                ));
            }
            // Forward-transform aliasing: period 2 pi / dt in nu must clear
            // the sampled band plus spectral tails.
            let max_dt = 2.0 * PI / (8.0 * p.sigma + 12.0 * p.spectral_width());
            if f.dt > max_dt {
                return Err(Error::GridUnderresolved(format!(
                    "input time step {:.3e} aliases the spectral band (limit {:.3e})",
                    f.dt, max_dt
                )));
            }
            let d_nu = max_d_nu_resolve.min(max_d_nu_alias);
            let n_nu = (16.0 * p.sigma / d_nu).ceil() as usize + 1;
            spectrum_owned = spectrum_of(f, -8.0 * p.sigma, d_nu, n_nu);
            &spectrum_owned
        }
    };

    // Apply exp(i k2(nu) x) per mode: i (beta_re + i beta_im) nu^2 x.
    let propagated: Vec<Complex64> = spectrum
        .samples
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let nu = spectrum.nu(k);
            a * (Complex64::i() * beta * nu * nu * x).exp()
        })
        .collect();

    Ok(synthesize(
        spectrum.nu_start,
        spectrum.d_nu,
        &propagated,
        center + spectrum.t_ref,
        grid,
    ))
}

/// Propagates the ideal pulse spectrum; shorthand for
/// `numeric_propagate(FieldInput::Pulse, ...)`.
pub fn propagate_pulse(
    p: &PulseParams,
    beta: Complex64,
    alpha: f64,
    x: f64,
    grid: &TimeGrid,
) -> Result<SampledField> {
    numeric_propagate(FieldInput::Pulse, p, beta, alpha, x, grid)
}

fn ideal_spectrum(p: &PulseParams, d_nu: f64) -> SampledSpectrum {
    let nu_start = -8.0 * p.sigma;
    let n = (16.0 * p.sigma / d_nu).ceil() as usize + 1;
    let samples = (0..n)
        .map(|k| Complex64::new(spectral_amplitude(p, nu_start + k as f64 * d_nu), 0.0))
        .collect();
    SampledSpectrum {
        nu_start,
        d_nu,
        t_ref: 0.0,
        samples,
    }
}

/// Time-domain synthesis
/// `E(t) = (2 pi)^{-1/2} sum_k A_k exp(-i nu_k (t - t_center)) d_nu`
/// with trapezoid end weights. Parallel over output samples when the
/// `parallel` feature is on.
fn synthesize(
    nu_start: f64,
    d_nu: f64,
    amps: &[Complex64],
    t_center: f64,
    grid: &TimeGrid,
) -> SampledField {
    let norm = d_nu / (2.0 * PI).sqrt();
    let last = amps.len() - 1;
    // One rounded subtraction up front; per-sample offsets stay small so
    // fast phases keep full precision at large group delays.
    let tau0 = grid.t_start - t_center;
    let samples = crate::map_indexed(grid.n, |j| {
        let tau = tau0 + j as f64 * grid.dt;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in amps.iter().enumerate() {
            let weight = if k == 0 || k == last { 0.5 } else { 1.0 };
            let nu = nu_start + k as f64 * d_nu;
            acc += weight * a * Complex64::from_polar(1.0, -nu * tau);
        }
        acc * norm
    });
    SampledField {
        t_start: grid.t_start,
        dt: grid.dt,
        samples,
    }
}

/// Forward transform of a sampled field onto a uniform baseband grid:
/// `a(nu) = (2 pi)^{-1/2} integral E(t) exp(i nu (t - t_ref)) dt` by
/// trapezoid, with `t_ref` at the center of the field's grid so the
/// phases stay slowly varying.
pub fn spectrum_of(f: &SampledField, nu_start: f64, d_nu: f64, n: usize) -> SampledSpectrum {
    let norm = f.dt / (2.0 * PI).sqrt();
    let last = f.samples.len() - 1;
    let t_ref = f.t_start + 0.5 * last as f64 * f.dt;
    let tau0 = f.t_start - t_ref;
    let samples = crate::map_indexed(n, |k| {
        let nu = nu_start + k as f64 * d_nu;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, e) in f.samples.iter().enumerate() {
            let weight = if j == 0 || j == last { 0.5 } else { 1.0 };
            let tau = tau0 + j as f64 * f.dt;
            acc += weight * e * Complex64::from_polar(1.0, nu * tau);
        }
        acc * norm
    });
    SampledSpectrum {
        nu_start,
        d_nu,
        t_ref,
        samples,
    }
}

/// Mean, RMS width and norm of a sampled density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// First moment of the normalized density (s, or rad/s for spectra).
    pub mean: f64,
    /// RMS width of the normalized density.
    pub rms_width: f64,
    /// Unnormalized integral of the density.
    pub norm: f64,
}

fn density_moments(start: f64, step: f64, density: &[f64]) -> Result<Moments> {
    let last = density.len().saturating_sub(1);
    let weighted = |f: &dyn Fn(f64) -> f64| -> f64 {
        density
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                let w = if j == 0 || j == last { 0.5 } else { 1.0 };
                w * d * f(start + j as f64 * step)
            })
            .sum::<f64>()
            * step
    };
    let norm = weighted(&|_| 1.0);
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mean = weighted(&|t| t) / norm;
    let var = weighted(&|t| (t - mean) * (t - mean)) / norm;
    Ok(Moments {
        mean,
        rms_width: var.max(0.0).sqrt(),
        norm,
    })
}

/// Temporal moments of `|f|^2` by trapezoidal quadrature.
pub fn moments(f: &SampledField) -> Result<Moments> {
    if f.samples.len() < 2 || !(f.dt > 0.0) {
        return Err(Error::GridUnderresolved(
            "moments need >= 2 samples and dt > 0".into(),
        ));
    }
    let density: Vec<f64> = f.samples.iter().map(|c| c.norm_sqr()).collect();
    density_moments(f.t_start, f.dt, &density)
}

/// Spectral moments of `|a|^2`; the mean is a baseband offset from the
/// carrier.
pub fn spectral_moments(s: &SampledSpectrum) -> Result<Moments> {
    if s.samples.len() < 2 || !(s.d_nu > 0.0) {
        return Err(Error::GridUnderresolved(
            "moments need >= 2 samples and d_nu > 0".into(),
        ));
    }
    let density: Vec<f64> = s.samples.iter().map(|c| c.norm_sqr()).collect();
    density_moments(s.nu_start, s.d_nu, &density)
}

fn trapezoid(step: f64, values: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = values.collect();
    let last = vals.len().saturating_sub(1);
    vals.iter()
        .enumerate()
        .map(|(j, v)| if j == 0 || j == last { 0.5 * v } else { *v })
        .sum::<f64>()
        * step
}

/// Relative L2 distance between two fields on the same grid.
pub fn relative_l2_error(a: &SampledField, b: &SampledField) -> f64 {
    assert_eq!(a.samples.len(), b.samples.len(), "grids must match");
    let num: f64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let den: f64 = b.samples.iter().map(|c| c.norm_sqr()).sum();
    (num / den).sqrt()
}
