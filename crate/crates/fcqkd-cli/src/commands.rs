//! Subcommand implementations, returning rendered output plus an exit
//! code so the binary stays a thin wrapper.

use anyhow::{Context, Result};

use fcqkd::protocol::{self, EveConfig, ProtocolConfig, Verdict};
use fcqkd::security;

use crate::config::SessionConfig;
use crate::exit_codes;
use crate::report::{
    self, render_bound_text, render_simulate_text, render_validate_text, BoundDoc, SimulateDoc,
    ValidateDoc,
};

/// Output format of `validate`, `bound` and `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

/// Sweep axes. Values are interpreted in angular lab units: km, GHz
/// (1e9 rad/s), or ps^2/km.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Length,
    DeltaOmega,
    SigmaInf,
    Beta,
}

pub struct CommandOutput {
    pub text: String,
    pub exit_code: u8,
}

pub fn cmd_validate(cfg: &SessionConfig, format: Format) -> Result<CommandOutput> {
    let checks = security::validate_parameters(&cfg.protocol.system)?;
    let passed = checks.passed;
    let doc = ValidateDoc {
        command: "validate",
        config_si: cfg.si_doc(),
        passed,
        checks,
    };
    let text = match format {
        Format::Text => render_validate_text(&doc),
        Format::Structured => to_json(&doc)?,
    };
    Ok(CommandOutput {
        text,
        exit_code: if passed {
            exit_codes::OK
        } else {
            exit_codes::VALIDATION
        },
    })
}

pub fn cmd_bound(cfg: &SessionConfig, format: Format) -> Result<CommandOutput> {
    let sys = &cfg.protocol.system;
    let ch = &cfg.protocol.channel;
    let lossless = security::max_secure_length(sys, ch)?;
    let lossy = security::max_secure_length_lossy(sys, ch)?;
    let doc = BoundDoc {
        command: "bound",
        config_si: cfg.si_doc(),
        x_b_paper_m: lossless.paper_form,
        x_b_consistent_m: lossless.consistent_form,
        x_b_weak_lossy_m: lossy.weak_form,
        x_b_exact_lossy_m: lossy.exact_form,
        margin_at_length: security::secrecy_margin(sys, ch, ch.length, 0.0)?,
        eve_min_time_s: security::eve_min_time_worst(sys, ch, 0.0)?,
        bob_width_s: security::broadband_width(sys, ch, ch.length)?,
        dt12_s: sys.dt12(),
    };
    let text = match format {
        Format::Text => render_bound_text(&doc),
        Format::Structured => to_json(&doc)?,
    };
    Ok(CommandOutput {
        text,
        exit_code: exit_codes::OK,
    })
}

/// Per-invocation overrides for `simulate`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SimulateOverrides {
    pub seed: Option<u64>,
    pub rounds: Option<u64>,
    /// `Some(true)` forces the eavesdropper on, `Some(false)` off.
    pub eve: Option<bool>,
}

pub struct SimulateOutput {
    pub text: String,
    pub round_log: Option<String>,
    pub exit_code: u8,
}

pub fn cmd_simulate(
    cfg: &SessionConfig,
    overrides: SimulateOverrides,
    format: Format,
    want_round_log: bool,
) -> Result<SimulateOutput> {
    let mut resolved = cfg.clone();
    if let Some(seed) = overrides.seed {
        resolved.master_seed = seed;
    }
    if let Some(rounds) = overrides.rounds {
        resolved.n_rounds = rounds;
    }
    if let Some(eve) = overrides.eve {
        resolved.protocol.eve = EveConfig {
            enabled: eve,
            ..resolved.protocol.eve
        };
    }

    let report =
        protocol::run_session(&resolved.protocol, resolved.n_rounds, resolved.master_seed)
            .context("simulation failed")?;
    let doc = SimulateDoc::new(&resolved, resolved.master_seed, resolved.n_rounds, &report);
    let text = match format {
        Format::Text => render_simulate_text(&doc),
        Format::Structured => to_json(&doc)?,
    };
    let round_log = if want_round_log {
        let rounds = protocol::run_rounds(
            &resolved.protocol,
            resolved.n_rounds,
            resolved.master_seed,
        )?;
        let expected_delay = resolved.protocol.channel.group_delay(resolved.protocol.channel.length);
        Some(report::render_round_log(&rounds, expected_delay))
    } else {
        None
    };
    let exit_code = match report.verdict {
        Verdict::Clean => exit_codes::OK,
        Verdict::Inconclusive => exit_codes::INCONCLUSIVE,
        Verdict::EavesdropperDetected => exit_codes::EAVESDROPPER,
    };
    Ok(SimulateOutput {
        text,
        round_log,
        exit_code,
    })
}

pub struct SweepOptions {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Measure Monte Carlo detection power per point.
    pub mc: bool,
    pub mc_sessions: u64,
    pub seed: Option<u64>,
    pub rounds: Option<u64>,
}

/// One row per sweep point: the reference-pulse arrival scatter, the
/// eavesdropper floor, the secrecy margin, and all four length bounds,
/// optionally with measured detection power.
pub fn cmd_sweep(cfg: &SessionConfig, opts: &SweepOptions) -> Result<CommandOutput> {
    anyhow::ensure!(opts.steps >= 1, "steps must be >= 1");
    anyhow::ensure!(
        opts.from.is_finite() && opts.to.is_finite() && opts.from >= 0.0,
        "sweep range must be finite and non-negative"
    );
    let axis_name = match opts.axis {
        Axis::Length => "length_km",
        Axis::DeltaOmega => "delta_omega12_ghz",
        Axis::SigmaInf => "sigma_inf_ghz",
        Axis::Beta => "beta_re_ps2_per_km",
    };
    let mut out = String::new();
    out.push_str("axis,value,dt_b_s,dt_e_s,margin,x_b_paper_km,x_b_consistent_km,x_b_weak_km,x_b_exact_km");
    if opts.mc {
        out.push_str(",detection_power");
    }
    out.push('\n');

    for i in 0..opts.steps {
        let value = if opts.steps == 1 {
            opts.from
        } else {
            opts.from + (opts.to - opts.from) * i as f64 / (opts.steps - 1) as f64
        };
        let protocol = apply_axis(&cfg.protocol, opts.axis, value)?;
        let sys = &protocol.system;
        let ch = &protocol.channel;
        let dt_b = security::broadband_width(sys, ch, ch.length)?;
        let dt_e = security::eve_min_time_worst(sys, ch, 0.0)?;
        let margin = security::secrecy_margin(sys, ch, ch.length, 0.0)?;
        let lossless = security::max_secure_length(sys, ch)?;
        let lossy = security::max_secure_length_lossy(sys, ch)?;
        let cells = report::secure_length_cells(&lossless, &lossy);
        out.push_str(&format!(
            "{axis_name},{value:.6},{dt_b:.9e},{dt_e:.9e},{margin:.9e},{},{},{},{}",
            cells[0], cells[1], cells[2], cells[3]
        ));
        if opts.mc {
            let mc_cfg = ProtocolConfig {
                eve: EveConfig {
                    enabled: true,
                    position: 0.0,
                    intercept_probability: 1.0,
                },
                ..protocol.clone()
            };
            let power = protocol::detection_power(
                &mc_cfg,
                opts.rounds.unwrap_or(cfg.n_rounds),
                opts.mc_sessions,
                opts.seed.unwrap_or(cfg.master_seed),
            )?;
            out.push_str(&format!(",{power:.4}"));
        }
        out.push('\n');
    }
    Ok(CommandOutput {
        text: out,
        exit_code: exit_codes::OK,
    })
}

fn apply_axis(base: &ProtocolConfig, axis: Axis, value: f64) -> Result<ProtocolConfig> {
    let mut cfg = base.clone();
    match axis {
        Axis::Length => {
            cfg.channel.length = value * 1e3;
        }
        Axis::DeltaOmega => {
            let delta = value * 1e9;
            anyhow::ensure!(delta > 0.0, "delta_omega12 must be > 0");
            cfg.system.omega1 = cfg.system.omega0 - delta / 2.0;
            cfg.system.omega2 = cfg.system.omega0 + delta / 2.0;
        }
        Axis::SigmaInf => {
            let sigma = value * 1e9;
            anyhow::ensure!(sigma > 0.0, "sigma_inf must be > 0");
            cfg.system.sigma_inf = sigma;
            cfg.system.gamma_inf = sigma;
        }
        Axis::Beta => {
            cfg.channel.beta_re = value * 1e-27;
        }
    }
    Ok(cfg)
}

fn to_json<T: serde::Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}
