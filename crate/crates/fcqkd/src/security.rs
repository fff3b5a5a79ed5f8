//! Closed-form secrecy bounds: parameter validation, the eavesdropper's
//! measurement-time floor, the secrecy margin, and maximum secure channel
//! lengths with and without attenuation.

use serde::{Deserialize, Serialize};

use crate::channel::FiberChannel;
use crate::error::Error;
use crate::wavepacket;
use crate::Result;

/// Emission and detection parameters of the cryptosystem: the two narrow
/// signal states, the broadband reference state, the three detector
/// responses, and the secrecy margin requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// First narrow carrier, rad/s.
    pub omega1: f64,
    /// Second narrow carrier, rad/s.
    pub omega2: f64,
    /// Broadband carrier, rad/s.
    pub omega0: f64,
    /// First narrow spectral width, rad/s.
    pub sigma1: f64,
    /// Second narrow spectral width, rad/s.
    pub sigma2: f64,
    /// Broadband spectral width, rad/s.
    pub sigma_inf: f64,
    /// First narrow detector bandwidth, rad/s.
    pub gamma1: f64,
    /// Second narrow detector bandwidth, rad/s.
    pub gamma2: f64,
    /// Wideband detector bandwidth, rad/s.
    pub gamma_inf: f64,
    /// Secrecy requires `eve_time >= margin_kappa * bob_width`; >= 1.
    pub margin_kappa: f64,
}

impl Default for SystemParams {
    /// The numerical-estimate parameter set: carriers near 1e15 rad/s,
    /// 1 GHz narrow separation, 0.1 GHz narrow widths, 1 ps reference
    /// pulse, detector bandwidths matched to the signal widths.
    fn default() -> Self {
        Self {
            omega1: 1e15 - 5e8,
            omega2: 1e15 + 5e8,
            omega0: 1e15,
            sigma1: 1e8,
            sigma2: 1e8,
            sigma_inf: 1e12,
            gamma1: 1e8,
            gamma2: 1e8,
            gamma_inf: 1e12,
            margin_kappa: 1.0,
        }
    }
}

impl SystemParams {
    /// Narrow frequency separation `|omega1 - omega2|`.
    pub fn delta_omega12(&self) -> f64 {
        (self.omega1 - self.omega2).abs()
    }

    /// Minimum time to distinguish or prepare the two narrow states,
    /// `1 / delta_omega12`.
    pub fn dt12(&self) -> f64 {
        1.0 / self.delta_omega12()
    }
}

/// One validated condition with its computed ratio.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub ratio: f64,
    pub passed: bool,
    pub note: String,
}

/// Outcome of [`validate_parameters`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    pub passed: bool,
}

/// Checks the distinguishability condition
/// `delta_omega12 > 3 (sigma1 + sigma2)` and the timescale condition
/// `sigma_inf / delta_omega12 > 1` (flagged when the ratio is below 10).
///
/// Errors on non-positive parameters or `margin_kappa < 1`.
pub fn validate_parameters(sys: &SystemParams) -> Result<ValidationReport> {
    let positives = [
        ("omega1", sys.omega1),
        ("omega2", sys.omega2),
        ("omega0", sys.omega0),
        ("sigma1", sys.sigma1),
        ("sigma2", sys.sigma2),
        ("sigma_inf", sys.sigma_inf),
        ("gamma1", sys.gamma1),
        ("gamma2", sys.gamma2),
        ("gamma_inf", sys.gamma_inf),
    ];
    for (name, value) in positives {
        if !(value > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value,
                requirement: "must be > 0",
            });
        }
    }
    if !(sys.margin_kappa >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "margin_kappa",
            value: sys.margin_kappa,
            requirement: "must be >= 1",
        });
    }
    let delta = sys.delta_omega12();
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta_omega12",
            value: delta,
            requirement: "omega1 and omega2 must differ",
        });
    }

    let disting = delta / (3.0 * (sys.sigma1 + sys.sigma2));
    let timescale = sys.sigma_inf / delta;
    let checks = vec![
        ValidationCheck {
            name: "distinguishability",
            ratio: disting,
            passed: disting > 1.0,
            note: "delta_omega12 / (3 (sigma1 + sigma2)) must exceed 1".into(),
        },
        ValidationCheck {
            name: "timescale",
            ratio: timescale,
            passed: timescale > 1.0,
            note: if timescale < 10.0 {
                "sigma_inf / delta_omega12 below 10: reference pulses barely faster than narrow measurements".into()
            } else {
                "sigma_inf / delta_omega12 must exceed 1".into()
            },
        },
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { checks, passed })
}

/// Which narrow state the eavesdropper's time floor refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NarrowState {
    One,
    Two,
}

/// Minimum time for an eavesdropper at `x_e` to measure (or prepare) one
/// of the narrow states: the broadening factor of that state's pulse over
/// `x_e`, divided by `delta_omega12`. Exactly `1 / delta_omega12` at
/// `x_e = 0`, monotone non-decreasing in `x_e`.
pub fn eve_min_time(
    sys: &SystemParams,
    ch: &FiberChannel,
    x_e: f64,
    which: NarrowState,
) -> Result<f64> {
    let sigma = match which {
        NarrowState::One => sys.sigma1,
        NarrowState::Two => sys.sigma2,
    };
    Ok(wavepacket::broadening_factor(sigma, ch.beta(), x_e)? / sys.delta_omega12())
}

/// Defender-conservative eavesdropper floor: the smaller of the two
/// per-state times (the faster the eavesdropper could be, the harder the
/// detection).
pub fn eve_min_time_worst(sys: &SystemParams, ch: &FiberChannel, x_e: f64) -> Result<f64> {
    let t1 = eve_min_time(sys, ch, x_e, NarrowState::One)?;
    let t2 = eve_min_time(sys, ch, x_e, NarrowState::Two)?;
    Ok(t1.min(t2))
}

/// RMS arrival-time scatter of the broadband reference pulse at distance
/// `x`, including the attenuation renormalization.
pub fn broadband_width(sys: &SystemParams, ch: &FiberChannel, x: f64) -> Result<f64> {
    let base = 1.0 / (std::f64::consts::SQRT_2 * sys.sigma_inf);
    Ok(base * ch.effective_broadening(sys.sigma_inf, x)?)
}

/// Secrecy margin `eve_time(x_e) / bob_width(x)`. Secrecy holds when the
/// margin is at least `margin_kappa`.
pub fn secrecy_margin(sys: &SystemParams, ch: &FiberChannel, x: f64, x_e: f64) -> Result<f64> {
    Ok(eve_min_time_worst(sys, ch, x_e)? / broadband_width(sys, ch, x)?)
}

/// A channel-length bound that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthBound {
    /// Bound in meters.
    Finite(f64),
    /// No finite length violates the condition.
    Unbounded,
}

impl LengthBound {
    /// The bound in meters, when finite.
    pub fn finite(&self) -> Option<f64> {
        match self {
            LengthBound::Finite(x) => Some(*x),
            LengthBound::Unbounded => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, LengthBound::Unbounded)
    }
}

impl std::fmt::Display for LengthBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LengthBound::Finite(x) => write!(f, "{:.6} km", x / 1e3),
            LengthBound::Unbounded => write!(f, "unbounded"),
        }
    }
}

impl Serialize for LengthBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LengthBound::Finite(x) => s.serialize_f64(*x),
            LengthBound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Maximum secure length for a lossless channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecureLength {
    /// The published closed form `1 / (delta_omega12 sigma_inf beta_re)`.
    pub paper_form: LengthBound,
    /// Root of `secrecy_margin(x, x_e = 0) = margin_kappa`, consistent
    /// with this crate's RMS width conventions.
    pub consistent_form: LengthBound,
}

/// Maximum secure length for an attenuating channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossySecureLength {
    /// Weak-attenuation closed form
    /// `1 / (sqrt(beta_im^2 + beta_re^2) delta_omega12 sigma_inf)`.
    pub weak_form: LengthBound,
    /// Root of the broadening-ratio condition
    /// `(1 + sigma_inf^2 beta_im x)^2 + beta_re^2 x^2 sigma_inf^4
    ///  <= (sigma_inf^2 / delta_omega12^2) (1 + sigma_inf^2 beta_im x)^2`
    /// solved by bisection to 1e-6 relative.
    pub exact_form: LengthBound,
}

/// Shared arithmetic for the published bound so lossless and lossy forms
/// agree bitwise when `beta_im = 0`.
fn published_bound(delta_omega12: f64, sigma_inf: f64, beta_mag: f64) -> f64 {
    1.0 / (delta_omega12 * sigma_inf * beta_mag)
}

/// Maximum secure channel length without attenuation. The paper form is
/// unbounded for `beta_re <= 0`; the consistent form reports 0 when even
/// `x = 0` fails the margin requirement.
pub fn max_secure_length(sys: &SystemParams, ch: &FiberChannel) -> Result<SecureLength> {
    let delta = sys.delta_omega12();
    if !(delta > 0.0) || !(sys.sigma_inf > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta_omega12/sigma_inf",
            value: delta,
            requirement: "must be > 0",
        });
    }
    let paper_form = if ch.beta_re > 0.0 {
        LengthBound::Finite(published_bound(delta, sys.sigma_inf, ch.beta_re))
    } else {
        LengthBound::Unbounded
    };

    // margin(x) = kappa  <=>  broadening(sigma_inf, x) = g.
    let g = std::f64::consts::SQRT_2 * sys.sigma_inf / (sys.margin_kappa * delta);
    let consistent_form = if g < 1.0 {
        LengthBound::Finite(0.0)
    } else if ch.beta_re == 0.0 && ch.beta_im == 0.0 {
        LengthBound::Unbounded
    } else if ch.beta_im == 0.0 {
        let s2 = sys.sigma_inf * sys.sigma_inf;
        LengthBound::Finite((g * g - 1.0).sqrt() / (2.0 * ch.beta_re.abs() * s2))
    } else {
        let bf = |x: f64| wavepacket::broadening_factor(sys.sigma_inf, ch.beta(), x).unwrap();
        LengthBound::Finite(bisect_increasing(&bf, g, 1e-12))
    };

    Ok(SecureLength {
        paper_form,
        consistent_form,
    })
}

/// Maximum secure channel length with attenuation. Delegates to
/// [`max_secure_length`]'s arithmetic for `beta_im = 0` so the two agree
/// bitwise there.
pub fn max_secure_length_lossy(sys: &SystemParams, ch: &FiberChannel) -> Result<LossySecureLength> {
    let delta = sys.delta_omega12();
    let mag = f64::hypot(ch.beta_im, ch.beta_re);
    let weak_form = if mag > 0.0 {
        LengthBound::Finite(published_bound(delta, sys.sigma_inf, mag))
    } else {
        LengthBound::Unbounded
    };

    let s2 = sys.sigma_inf * sys.sigma_inf;
    let ratio = s2 / (delta * delta);
    let exact_form = if ratio <= 1.0 {
        LengthBound::Finite(0.0)
    } else if ch.beta_re == 0.0 {
        // Spectral narrowing alone never violates the squared-ratio
        // condition: the left side stays at 1.
        LengthBound::Unbounded
    } else if ch.beta_im > 0.0 {
        let saturation = 1.0 + (ch.beta_re / ch.beta_im) * (ch.beta_re / ch.beta_im);
        if ratio >= saturation {
            LengthBound::Unbounded
        } else {
            LengthBound::Finite(bisect_increasing(
                &|x| lossy_condition_lhs(sys.sigma_inf, ch, x),
                ratio,
                1e-6,
            ))
        }
    } else {
        LengthBound::Finite(bisect_increasing(
            &|x| lossy_condition_lhs(sys.sigma_inf, ch, x),
            ratio,
            1e-6,
        ))
    };

    Ok(LossySecureLength {
        weak_form,
        exact_form,
    })
}

fn lossy_condition_lhs(sigma_inf: f64, ch: &FiberChannel, x: f64) -> f64 {
    let s2 = sigma_inf * sigma_inf;
    let u = 1.0 + s2 * ch.beta_im * x;
    let b = ch.beta_re * x * s2;
    (u * u + b * b) / (u * u)
}

/// Bisects a strictly increasing `f` for `f(x) = target` on `x >= 0`,
/// bracketing by doubling. `rel_tol` bounds the final interval width
/// relative to the root.
fn bisect_increasing(f: &dyn Fn(f64) -> f64, target: f64, rel_tol: f64) -> f64 {
    if f(0.0) >= target {
        return 0.0;
    }
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) < target {
        hi *= 2.0;
        guard += 1;
        if guard > 4000 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    if f(lo) >= target {
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_channel() -> FiberChannel {
        FiberChannel::new(1e6, 5e-9, 1e-27, 0.0, 0.35).unwrap()
    }

    #[test]
    fn validation_ratios() {
        let sys = SystemParams::default();
        let report = validate_parameters(&sys).unwrap();
        assert!(report.passed);
        let d = &report.checks[0];
        assert_relative_eq!(d.ratio, 1e9 / 6e8, max_relative = 1e-12);
        assert!(d.passed);
        let t = &report.checks[1];
        assert_relative_eq!(t.ratio, 1000.0, max_relative = 1e-12);
        assert!(t.passed);
    }

    #[test]
    fn validation_fails_on_wide_narrow_states() {
        let sys = SystemParams {
            sigma1: 2e8,
            sigma2: 2e8,
            gamma1: 2e8,
            gamma2: 2e8,
            ..SystemParams::default()
        };
        let report = validate_parameters(&sys).unwrap();
        assert!(!report.passed);
        assert_relative_eq!(report.checks[0].ratio, 1e9 / 1.2e9, max_relative = 1e-12);
        assert!(!report.checks[0].passed);
    }

    #[test]
    fn validation_rejects_nonpositive() {
        let sys = SystemParams {
            sigma1: 0.0,
            ..SystemParams::default()
        };
        assert!(validate_parameters(&sys).is_err());
        let sys = SystemParams {
            margin_kappa: 0.5,
            ..SystemParams::default()
        };
        assert!(validate_parameters(&sys).is_err());
    }

    #[test]
    fn eve_floor_at_sender_is_exact() {
        let sys = SystemParams::default();
        let ch = paper_channel();
        let t = eve_min_time(&sys, &ch, 0.0, NarrowState::One).unwrap();
        assert_eq!(t, 1e-9);
        assert_eq!(t * sys.delta_omega12(), 1.0);
        assert_eq!(eve_min_time_worst(&sys, &ch, 0.0).unwrap(), 1e-9);
    }

    #[test]
    fn eve_floor_barely_grows_for_narrow_pulses() {
        let sys = SystemParams {
            sigma1: 1e9,
            gamma1: 1e9,
            ..SystemParams::default()
        };
        let ch = paper_channel();
        let t = eve_min_time(&sys, &ch, 1e6, NarrowState::One).unwrap();
        assert_relative_eq!(t, 1e-9 * (1.0 + 2e-6), max_relative = 1e-9);
    }

    #[test]
    fn eve_floor_is_monotone_in_position() {
        let sys = SystemParams::default();
        let ch = paper_channel();
        let mut last = 0.0;
        for &x_e in &[0.0, 1e4, 1e5, 5e5, 1e6] {
            let t = eve_min_time_worst(&sys, &ch, x_e).unwrap();
            assert!(t >= last);
            last = t;
        }
    }

    #[test]
    fn margin_frozen_value_at_origin() {
        let sys = SystemParams::default();
        let ch = paper_channel();
        let m = secrecy_margin(&sys, &ch, 0.0, 0.0).unwrap();
        assert_relative_eq!(m, 1.4142135623730951e3, max_relative = 1e-12);
    }

    #[test]
    fn margin_decreases_with_length() {
        let sys = SystemParams::default();
        let ch = paper_channel();
        let mut last = f64::INFINITY;
        for &x in &[0.0, 1e4, 1e5, 5e5, 1e6] {
            let m = secrecy_margin(&sys, &ch, x, 0.0).unwrap();
            assert!(m < last);
            last = m;
        }
    }

    #[test]
    fn paper_bound_is_one_thousand_km() {
        let sys = SystemParams::default();
        let bounds = max_secure_length(&sys, &paper_channel()).unwrap();
        assert_eq!(bounds.paper_form.finite().unwrap(), 1e6);
    }

    #[test]
    fn paper_bound_scales_inversely() {
        let sys = SystemParams::default();
        let base = max_secure_length(&sys, &paper_channel())
            .unwrap()
            .paper_form
            .finite()
            .unwrap();
        let doubled_beta = FiberChannel::new(1e6, 5e-9, 2e-27, 0.0, 0.35).unwrap();
        let halved = max_secure_length(&sys, &doubled_beta)
            .unwrap()
            .paper_form
            .finite()
            .unwrap();
        assert_eq!(halved, base / 2.0);

        let wide_sep = SystemParams {
            omega1: 1e15 - 1e9,
            omega2: 1e15 + 1e9,
            ..SystemParams::default()
        };
        let half_sep = max_secure_length(&wide_sep, &paper_channel())
            .unwrap()
            .paper_form
            .finite()
            .unwrap();
        assert_relative_eq!(half_sep, base / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_dispersion_is_unbounded() {
        let sys = SystemParams::default();
        let flat = FiberChannel::new(1e6, 5e-9, 0.0, 0.0, 0.35).unwrap();
        let bounds = max_secure_length(&sys, &flat).unwrap();
        assert!(bounds.paper_form.is_unbounded());
        assert!(bounds.consistent_form.is_unbounded());
    }

    #[test]
    fn consistent_bound_hits_the_margin() {
        let ch = paper_channel();
        for kappa in [1.0, 2.0, 10.0] {
            let sys = SystemParams {
                margin_kappa: kappa,
                ..SystemParams::default()
            };
            let x = max_secure_length(&sys, &ch)
                .unwrap()
                .consistent_form
                .finite()
                .unwrap();
            let m = secrecy_margin(&sys, &ch, x, 0.0).unwrap();
            assert_relative_eq!(m, kappa, max_relative = 1e-9);
        }
    }

    #[test]
    fn consistent_bound_hits_the_margin_with_absorption() {
        let sys = SystemParams::default();
        let ch = FiberChannel::new(1e7, 5e-9, 1e-27, 1e-31, 0.35).unwrap();
        let x = max_secure_length(&sys, &ch)
            .unwrap()
            .consistent_form
            .finite()
            .unwrap();
        let m = secrecy_margin(&sys, &ch, x, 0.0).unwrap();
        assert_relative_eq!(m, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn lossy_bound_degenerates_bitwise() {
        let sys = SystemParams::default();
        let ch = paper_channel();
        let lossless = max_secure_length(&sys, &ch).unwrap();
        let lossy = max_secure_length_lossy(&sys, &ch).unwrap();
        assert_eq!(
            lossy.weak_form.finite().unwrap().to_bits(),
            lossless.paper_form.finite().unwrap().to_bits()
        );
    }

    #[test]
    fn weak_form_with_split_dispersion() {
        let sys = SystemParams::default();
        let b = 1e-27 / std::f64::consts::SQRT_2;
        let ch = FiberChannel::new(1e7, 5e-9, b, b, 0.35).unwrap();
        let lossy = max_secure_length_lossy(&sys, &ch).unwrap();
        assert_relative_eq!(lossy.weak_form.finite().unwrap(), 1e6, max_relative = 1e-12);
        // Absorption this strong saturates the broadening ratio below the
        // squared timescale ratio, so the exact condition never binds.
        assert!(lossy.exact_form.is_unbounded());
    }

    #[test]
    fn exact_bound_near_weak_form_for_weak_attenuation() {
        let sys = SystemParams::default();
        let ch = FiberChannel::new(1e7, 5e-9, 1e-27, 1e-31, 0.35).unwrap();
        let lossy = max_secure_length_lossy(&sys, &ch).unwrap();
        let weak = lossy.weak_form.finite().unwrap();
        let exact = lossy.exact_form.finite().unwrap();
        // sigma_inf^2 beta_im x_B = 0.1 regime: agreement within 20 %.
        assert!(sys.sigma_inf * sys.sigma_inf * ch.beta_im * weak <= 0.1 + 1e-9);
        assert!(
            (exact - weak).abs() / weak < 0.2,
            "exact {exact:.4e} vs weak {weak:.4e}"
        );
    }

    #[test]
    fn exact_bound_matches_closed_form_when_lossless() {
        let sys = SystemParams::default();
        let ch = paper_channel();
        let exact = max_secure_length_lossy(&sys, &ch)
            .unwrap()
            .exact_form
            .finite()
            .unwrap();
        // 1 + beta^2 x^2 sigma^4 = sigma^2/delta^2 has the closed root
        // sqrt(R - 1) / (beta sigma^2).
        let r = (sys.sigma_inf / sys.delta_omega12()).powi(2);
        let closed = (r - 1.0).sqrt() / (ch.beta_re * sys.sigma_inf * sys.sigma_inf);
        assert_relative_eq!(exact, closed, max_relative = 1e-6);
    }

    #[test]
    fn pure_absorption_never_binds_exact_form() {
        let sys = SystemParams::default();
        let ch = FiberChannel::new(1e7, 5e-9, 0.0, 1e-28, 0.35).unwrap();
        let lossy = max_secure_length_lossy(&sys, &ch).unwrap();
        assert!(lossy.exact_form.is_unbounded());
        assert!(lossy.weak_form.finite().is_some());
    }

    #[test]
    fn degenerate_timescale_gives_zero_length() {
        let sys = SystemParams {
            sigma_inf: 5e8,
            gamma_inf: 5e8,
            ..SystemParams::default()
        };
        let lossy = max_secure_length_lossy(&sys, &paper_channel()).unwrap();
        assert_eq!(lossy.exact_form.finite(), Some(0.0));
    }
}
