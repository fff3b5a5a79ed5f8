//! TOML configuration with lab units at the boundary and SI inside.
//!
//! Every physical quantity accepts exactly one of two keys: a lab-unit
//! key (GHz, THz, km, ps^2/km, ns/km) or an SI key (`*_rad_per_s`,
//! `*_m`, `*_s2_per_m`, `*_s_per_m`). Frequencies are interpreted as
//! angular (rad/s) by default; setting `system.ordinary_frequencies =
//! true` multiplies the GHz/THz keys by 2 pi. SI keys are always
//! angular. All conversions happen once, at parse time; reports echo
//! the resolved SI values.

use std::f64::consts::PI;

use fcqkd::channel::FiberChannel;
use fcqkd::protocol::{EveConfig, ProtocolConfig};
use fcqkd::security::SystemParams;
use serde::{Deserialize, Serialize};

/// A fully resolved session configuration, SI units throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionConfig {
    pub protocol: ProtocolConfig,
    pub n_rounds: u64,
    pub master_seed: u64,
}

/// Configuration failures.
#[derive(Debug)]
pub enum ConfigError {
    /// TOML syntax or type error, with location.
    Parse(String),
    /// Every violated constraint, each naming the offending key.
    Invalid(Vec<String>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid(errors) => {
                writeln!(f, "invalid configuration:")?;
                for e in errors {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    system: RawSystem,
    channel: RawChannel,
    eve: RawEve,
    run: RawRun,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSystem {
    ordinary_frequencies: bool,
    omega0_thz: Option<f64>,
    omega0_rad_per_s: Option<f64>,
    omega1_thz: Option<f64>,
    omega1_rad_per_s: Option<f64>,
    omega2_thz: Option<f64>,
    omega2_rad_per_s: Option<f64>,
    delta_omega12_ghz: Option<f64>,
    delta_omega12_rad_per_s: Option<f64>,
    sigma1_ghz: Option<f64>,
    sigma1_rad_per_s: Option<f64>,
    sigma2_ghz: Option<f64>,
    sigma2_rad_per_s: Option<f64>,
    sigma_inf_ghz: Option<f64>,
    sigma_inf_rad_per_s: Option<f64>,
    gamma1_ghz: Option<f64>,
    gamma1_rad_per_s: Option<f64>,
    gamma2_ghz: Option<f64>,
    gamma2_rad_per_s: Option<f64>,
    gamma_inf_ghz: Option<f64>,
    gamma_inf_rad_per_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawChannel {
    length_km: Option<f64>,
    length_m: Option<f64>,
    group_delay_ns_per_km: Option<f64>,
    alpha_s_per_m: Option<f64>,
    beta_re_ps2_per_km: Option<f64>,
    beta_re_s2_per_m: Option<f64>,
    beta_im_ps2_per_km: Option<f64>,
    beta_im_s2_per_m: Option<f64>,
    loss_db_per_km: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawEve {
    enabled: Option<bool>,
    x_e_km: Option<f64>,
    x_e_m: Option<f64>,
    intercept_probability: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawRun {
    n_rounds: Option<u64>,
    master_seed: Option<u64>,
    min_check_rounds: Option<u64>,
    threshold_k: Option<f64>,
    threshold_f: Option<f64>,
    margin_kappa: Option<f64>,
    efficiency: Option<f64>,
    alice_priors: Option<[f64; 3]>,
    bob_priors: Option<[f64; 3]>,
    emission_period_s: Option<f64>,
}

struct Resolver {
    errors: Vec<String>,
}

impl Resolver {
    /// Picks one of two mutually exclusive keys, applying the given unit
    /// scales, or the SI default.
    fn pick(
        &mut self,
        key_a: &str,
        val_a: Option<f64>,
        scale_a: f64,
        key_b: &str,
        val_b: Option<f64>,
        scale_b: f64,
        default_si: f64,
    ) -> (f64, String) {
        match (val_a, val_b) {
            (Some(_), Some(_)) => {
                self.errors
                    .push(format!("{key_a} and {key_b} are mutually exclusive"));
                (default_si, key_a.to_string())
            }
            (Some(v), None) => (v * scale_a, key_a.to_string()),
            (None, Some(v)) => (v * scale_b, key_b.to_string()),
            (None, None) => (default_si, key_b.to_string()),
        }
    }

    fn require(&mut self, ok: bool, key: &str, msg: &str) {
        if !ok {
            self.errors.push(format!("{key}: {msg}"));
        }
    }
}

const GHZ: f64 = 1e9;
const THZ: f64 = 1e12;
const KM: f64 = 1e3;
const PS2_PER_KM: f64 = 1e-27;
const NS_PER_KM: f64 = 1e-12;

impl SessionConfig {
    /// Parses and validates a TOML document. Validation reports every
    /// violated constraint, naming the offending key.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut r = Resolver { errors: Vec::new() };

        // Frequencies: the ordinary flag applies to lab-unit keys only.
        let fconv = if raw.system.ordinary_frequencies {
            2.0 * PI
        } else {
            1.0
        };
        let sys = &raw.system;
        let (omega0, k_omega0) = r.pick(
            "system.omega0_thz",
            sys.omega0_thz,
            THZ * fconv,
            "system.omega0_rad_per_s",
            sys.omega0_rad_per_s,
            1.0,
            1e15,
        );

        let omega12_given = sys.omega1_thz.is_some()
            || sys.omega1_rad_per_s.is_some()
            || sys.omega2_thz.is_some()
            || sys.omega2_rad_per_s.is_some();
        let delta_given =
            sys.delta_omega12_ghz.is_some() || sys.delta_omega12_rad_per_s.is_some();
        if omega12_given && delta_given {
            r.errors.push(
                "system.delta_omega12_*: give either the carrier pair omega1/omega2 \
                 or the separation delta_omega12, not both"
                    .into(),
            );
        }
        let (omega1, omega2, k_omega1, k_omega2) = if omega12_given {
            let both = sys.omega1_thz.is_some() as u8
                + sys.omega1_rad_per_s.is_some() as u8
                + sys.omega2_thz.is_some() as u8
                + sys.omega2_rad_per_s.is_some() as u8;
            if both < 2 {
                r.errors
                    .push("system.omega1/omega2: both carriers must be given together".into());
            }
            let (o1, k1) = r.pick(
                "system.omega1_thz",
                sys.omega1_thz,
                THZ * fconv,
                "system.omega1_rad_per_s",
                sys.omega1_rad_per_s,
                1.0,
                omega0 - 5e8,
            );
            let (o2, k2) = r.pick(
                "system.omega2_thz",
                sys.omega2_thz,
                THZ * fconv,
                "system.omega2_rad_per_s",
                sys.omega2_rad_per_s,
                1.0,
                omega0 + 5e8,
            );
            (o1, o2, k1, k2)
        } else {
            let (delta, k_delta) = r.pick(
                "system.delta_omega12_ghz",
                sys.delta_omega12_ghz,
                GHZ * fconv,
                "system.delta_omega12_rad_per_s",
                sys.delta_omega12_rad_per_s,
                1.0,
                1e9,
            );
            r.require(delta > 0.0, &k_delta, "must be > 0");
            (
                omega0 - delta / 2.0,
                omega0 + delta / 2.0,
                k_delta.clone(),
                k_delta,
            )
        };

        let (sigma1, k_sigma1) = r.pick(
            "system.sigma1_ghz",
            sys.sigma1_ghz,
            GHZ * fconv,
            "system.sigma1_rad_per_s",
            sys.sigma1_rad_per_s,
            1.0,
            1e8,
        );
        let (sigma2, k_sigma2) = r.pick(
            "system.sigma2_ghz",
            sys.sigma2_ghz,
            GHZ * fconv,
            "system.sigma2_rad_per_s",
            sys.sigma2_rad_per_s,
            1.0,
            1e8,
        );
        let (sigma_inf, k_sigma_inf) = r.pick(
            "system.sigma_inf_ghz",
            sys.sigma_inf_ghz,
            GHZ * fconv,
            "system.sigma_inf_rad_per_s",
            sys.sigma_inf_rad_per_s,
            1.0,
            1e12,
        );
        let (gamma1, k_gamma1) = r.pick(
            "system.gamma1_ghz",
            sys.gamma1_ghz,
            GHZ * fconv,
            "system.gamma1_rad_per_s",
            sys.gamma1_rad_per_s,
            1.0,
            sigma1,
        );
        let (gamma2, k_gamma2) = r.pick(
            "system.gamma2_ghz",
            sys.gamma2_ghz,
            GHZ * fconv,
            "system.gamma2_rad_per_s",
            sys.gamma2_rad_per_s,
            1.0,
            sigma2,
        );
        let (gamma_inf, k_gamma_inf) = r.pick(
            "system.gamma_inf_ghz",
            sys.gamma_inf_ghz,
            GHZ * fconv,
            "system.gamma_inf_rad_per_s",
            sys.gamma_inf_rad_per_s,
            1.0,
            sigma_inf,
        );

        for (key, value) in [
            (&k_omega0, omega0),
            (&k_omega1, omega1),
            (&k_omega2, omega2),
            (&k_sigma1, sigma1),
            (&k_sigma2, sigma2),
            (&k_sigma_inf, sigma_inf),
            (&k_gamma1, gamma1),
            (&k_gamma2, gamma2),
            (&k_gamma_inf, gamma_inf),
        ] {
            r.require(value > 0.0 && value.is_finite(), key, "must be > 0");
        }

        let ch = &raw.channel;
        let (length, k_length) = r.pick(
            "channel.length_km",
            ch.length_km,
            KM,
            "channel.length_m",
            ch.length_m,
            1.0,
            1e5,
        );
        let (alpha, k_alpha) = r.pick(
            "channel.group_delay_ns_per_km",
            ch.group_delay_ns_per_km,
            NS_PER_KM,
            "channel.alpha_s_per_m",
            ch.alpha_s_per_m,
            1.0,
            5e-9,
        );
        let (beta_re, _) = r.pick(
            "channel.beta_re_ps2_per_km",
            ch.beta_re_ps2_per_km,
            PS2_PER_KM,
            "channel.beta_re_s2_per_m",
            ch.beta_re_s2_per_m,
            1.0,
            1e-27,
        );
        let (beta_im, k_beta_im) = r.pick(
            "channel.beta_im_ps2_per_km",
            ch.beta_im_ps2_per_km,
            PS2_PER_KM,
            "channel.beta_im_s2_per_m",
            ch.beta_im_s2_per_m,
            1.0,
            0.0,
        );
        let loss_db_per_km = ch.loss_db_per_km.unwrap_or(0.35);
        r.require(length >= 0.0, &k_length, "must be >= 0");
        r.require(alpha > 0.0, &k_alpha, "must be > 0");
        r.require(beta_im >= 0.0, &k_beta_im, "must be >= 0");
        r.require(
            loss_db_per_km >= 0.0,
            "channel.loss_db_per_km",
            "must be >= 0",
        );

        let (x_e, k_x_e) = r.pick(
            "eve.x_e_km",
            raw.eve.x_e_km,
            KM,
            "eve.x_e_m",
            raw.eve.x_e_m,
            1.0,
            0.0,
        );
        let eve_enabled = raw.eve.enabled.unwrap_or(false);
        let intercept_probability = raw.eve.intercept_probability.unwrap_or(1.0);
        r.require(
            (0.0..=1.0).contains(&intercept_probability),
            "eve.intercept_probability",
            "must be in [0, 1]",
        );
        if eve_enabled {
            r.require(
                x_e >= 0.0 && x_e <= length,
                &k_x_e,
                "must lie within the channel",
            );
        }

        let run = &raw.run;
        let efficiency = run.efficiency.unwrap_or(1.0);
        r.require(
            (0.0..=1.0).contains(&efficiency),
            "run.efficiency",
            "must be in [0, 1]",
        );
        let margin_kappa = run.margin_kappa.unwrap_or(1.0);
        r.require(margin_kappa >= 1.0, "run.margin_kappa", "must be >= 1");
        let threshold_k = run.threshold_k.unwrap_or(5.0);
        let threshold_f = run.threshold_f.unwrap_or(0.25);
        r.require(threshold_k >= 0.0, "run.threshold_k", "must be >= 0");
        r.require(threshold_f >= 0.0, "run.threshold_f", "must be >= 0");
        let min_check_rounds = run.min_check_rounds.unwrap_or(30);
        r.require(
            min_check_rounds >= 1,
            "run.min_check_rounds",
            "must be >= 1",
        );
        let alice_priors = run.alice_priors.unwrap_or([1.0 / 3.0; 3]);
        let bob_priors = run.bob_priors.unwrap_or([1.0 / 3.0; 3]);
        for (key, priors) in [
            ("run.alice_priors", &alice_priors),
            ("run.bob_priors", &bob_priors),
        ] {
            let sum: f64 = priors.iter().sum();
            r.require(
                priors.iter().all(|p| *p >= 0.0) && (sum - 1.0).abs() <= 1e-9,
                key,
                "entries must be >= 0 and sum to 1",
            );
        }
        if let Some(period) = run.emission_period_s {
            r.require(period > 0.0, "run.emission_period_s", "must be > 0");
        }

        if !r.errors.is_empty() {
            return Err(ConfigError::Invalid(r.errors));
        }

        Ok(SessionConfig {
            protocol: ProtocolConfig {
                system: SystemParams {
                    omega1,
                    omega2,
                    omega0,
                    sigma1,
                    sigma2,
                    sigma_inf,
                    gamma1,
                    gamma2,
                    gamma_inf,
                    margin_kappa,
                },
                channel: FiberChannel {
                    length,
                    alpha,
                    beta_re,
                    beta_im,
                    loss_db_per_km,
                },
                eve: EveConfig {
                    enabled: eve_enabled,
                    position: x_e,
                    intercept_probability,
                },
                alice_priors,
                bob_priors,
                efficiency,
                emission_period: run.emission_period_s,
                min_check_rounds: min_check_rounds as usize,
                threshold_k,
                threshold_f,
            },
            n_rounds: run.n_rounds.unwrap_or(10_000),
            master_seed: run.master_seed.unwrap_or(1),
        })
    }

    /// Canonical SI form of the resolved configuration; reparsing it
    /// reproduces `self` exactly (no unit arithmetic on this path).
    pub fn to_si_toml(&self) -> String {
        toml::to_string_pretty(&self.si_doc()).expect("config serializes")
    }

    /// The SI echo embedded in every report.
    pub fn si_doc(&self) -> SiConfigDoc {
        let p = &self.protocol;
        SiConfigDoc {
            system: SiSystem {
                omega0_rad_per_s: p.system.omega0,
                omega1_rad_per_s: p.system.omega1,
                omega2_rad_per_s: p.system.omega2,
                sigma1_rad_per_s: p.system.sigma1,
                sigma2_rad_per_s: p.system.sigma2,
                sigma_inf_rad_per_s: p.system.sigma_inf,
                gamma1_rad_per_s: p.system.gamma1,
                gamma2_rad_per_s: p.system.gamma2,
                gamma_inf_rad_per_s: p.system.gamma_inf,
            },
            channel: SiChannel {
                length_m: p.channel.length,
                alpha_s_per_m: p.channel.alpha,
                beta_re_s2_per_m: p.channel.beta_re,
                beta_im_s2_per_m: p.channel.beta_im,
                loss_db_per_km: p.channel.loss_db_per_km,
            },
            eve: SiEve {
                enabled: p.eve.enabled,
                x_e_m: p.eve.position,
                intercept_probability: p.eve.intercept_probability,
            },
            run: SiRun {
                n_rounds: self.n_rounds,
                master_seed: self.master_seed,
                min_check_rounds: p.min_check_rounds as u64,
                threshold_k: p.threshold_k,
                threshold_f: p.threshold_f,
                margin_kappa: p.system.margin_kappa,
                efficiency: p.efficiency,
                alice_priors: p.alice_priors,
                bob_priors: p.bob_priors,
                emission_period_s: p.emission_period,
            },
        }
    }
}

/// SI-resolved configuration document, serializable to TOML (canonical
/// emit) and JSON (report echo).
#[derive(Debug, Clone, Serialize)]
pub struct SiConfigDoc {
    pub system: SiSystem,
    pub channel: SiChannel,
    pub eve: SiEve,
    pub run: SiRun,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiSystem {
    pub omega0_rad_per_s: f64,
    pub omega1_rad_per_s: f64,
    pub omega2_rad_per_s: f64,
    pub sigma1_rad_per_s: f64,
    pub sigma2_rad_per_s: f64,
    pub sigma_inf_rad_per_s: f64,
    pub gamma1_rad_per_s: f64,
    pub gamma2_rad_per_s: f64,
    pub gamma_inf_rad_per_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiChannel {
    pub length_m: f64,
    pub alpha_s_per_m: f64,
    pub beta_re_s2_per_m: f64,
    pub beta_im_s2_per_m: f64,
    pub loss_db_per_km: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiEve {
    pub enabled: bool,
    pub x_e_m: f64,
    pub intercept_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiRun {
    pub n_rounds: u64,
    pub master_seed: u64,
    pub min_check_rounds: u64,
    pub threshold_k: f64,
    pub threshold_f: f64,
    pub margin_kappa: f64,
    pub efficiency: f64,
    pub alice_priors: [f64; 3],
    pub bob_priors: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emission_period_s: Option<f64>,
}
