//! Report documents: a JSON structure per subcommand, each embedding the
//! resolved SI configuration and the master seed, plus plain-text
//! renderings and the per-round CSV log.

use fcqkd::protocol::{
    DiscardBreakdown, EveAction, Round, SessionReport, TimingStats, Verdict,
};
use fcqkd::security::{LengthBound, LossySecureLength, SecureLength, ValidationReport};
use serde::Serialize;

use crate::config::{SessionConfig, SiConfigDoc};

/// `validate` output.
#[derive(Serialize)]
pub struct ValidateDoc {
    pub command: &'static str,
    pub config_si: SiConfigDoc,
    pub passed: bool,
    pub checks: ValidationReport,
}

/// `bound` output.
#[derive(Serialize)]
pub struct BoundDoc {
    pub command: &'static str,
    pub config_si: SiConfigDoc,
    /// Published closed form, m.
    pub x_b_paper_m: LengthBound,
    /// Margin-consistent bound, m.
    pub x_b_consistent_m: LengthBound,
    /// Weak-attenuation closed form, m.
    pub x_b_weak_lossy_m: LengthBound,
    /// Bisected attenuation-renormalized bound, m.
    pub x_b_exact_lossy_m: LengthBound,
    /// Secrecy margin at the configured length, eavesdropper at the sender.
    pub margin_at_length: f64,
    pub eve_min_time_s: f64,
    pub bob_width_s: f64,
    pub dt12_s: f64,
}

/// `simulate` output.
#[derive(Serialize)]
pub struct SimulateDoc {
    pub command: &'static str,
    pub config_si: SiConfigDoc,
    pub master_seed: u64,
    pub n_rounds: u64,
    pub qber: f64,
    pub verdict: String,
    pub security_margin: f64,
    pub sifted_key_length: usize,
    pub sifted_key_a: String,
    pub sifted_key_b: String,
    pub discards: DiscardBreakdown,
    pub timing: TimingStats,
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Clean => "Clean",
        Verdict::EavesdropperDetected => "EavesdropperDetected",
        Verdict::Inconclusive => "Inconclusive",
    }
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

impl SimulateDoc {
    pub fn new(cfg: &SessionConfig, seed: u64, n_rounds: u64, report: &SessionReport) -> Self {
        Self {
            command: "simulate",
            config_si: cfg.si_doc(),
            master_seed: seed,
            n_rounds,
            qber: report.qber,
            verdict: verdict_name(report.verdict).to_string(),
            security_margin: report.security_margin,
            sifted_key_length: report.sifted_key_a.len(),
            sifted_key_a: bits_to_string(&report.sifted_key_a),
            sifted_key_b: bits_to_string(&report.sifted_key_b),
            discards: report.discards,
            timing: report.timing,
        }
    }
}

/// Kilometer rendering that drops the fraction when it is numerically
/// irrelevant, so round numbers print round.
pub fn format_km(bound: &LengthBound) -> String {
    match bound {
        LengthBound::Unbounded => "unbounded".to_string(),
        LengthBound::Finite(m) => {
            let km = m / 1e3;
            if km == km.round() && km.abs() < 1e12 {
                format!("{km:.0} km")
            } else {
                format!("{km:.6} km")
            }
        }
    }
}

pub fn render_validate_text(doc: &ValidateDoc) -> String {
    let mut out = String::new();
    out.push_str("parameter validation\n");
    out.push_str("check                 ratio         status\n");
    for c in &doc.checks.checks {
        out.push_str(&format!(
            "{:<21} {:<13.6} {}\n",
            c.name,
            c.ratio,
            if c.passed { "pass" } else { "FAIL" }
        ));
        if !c.passed || c.ratio < 10.0 {
            out.push_str(&format!("  note: {}\n", c.note));
        }
    }
    out.push_str(&format!(
        "overall: {}\n",
        if doc.passed { "pass" } else { "FAIL" }
    ));
    out
}

pub fn render_bound_text(doc: &BoundDoc) -> String {
    format!(
        "secure channel length bounds\n\
         x_B (paper form): {}\n\
         x_B (consistent form): {}\n\
         x_B (lossy, weak attenuation): {}\n\
         x_B (lossy, exact condition): {}\n\
         dt12: {:.6e} s\n\
         eve minimum time (at sender): {:.6e} s\n\
         arrival scatter at configured length: {:.6e} s\n\
         secrecy margin at configured length: {:.6}\n",
        format_km(&doc.x_b_paper_m),
        format_km(&doc.x_b_consistent_m),
        format_km(&doc.x_b_weak_lossy_m),
        format_km(&doc.x_b_exact_lossy_m),
        doc.dt12_s,
        doc.eve_min_time_s,
        doc.bob_width_s,
        doc.margin_at_length,
    )
}

pub fn render_simulate_text(doc: &SimulateDoc) -> String {
    format!(
        "session summary\n\
         rounds: {}\n\
         sifted key length: {}\n\
         qber: {:.6e}\n\
         discards: {} no-click, {} type-mismatch\n\
         timing pool: {} rounds\n\
         mean residual: {:.6e} s (threshold {:.6e} s, z = {:.3})\n\
         security margin: {:.6}\n\
         verdict: {}\n",
        doc.n_rounds,
        doc.sifted_key_length,
        doc.qber,
        doc.discards.no_click,
        doc.discards.type_mismatch,
        doc.timing.n_check,
        doc.timing.mean_residual,
        doc.timing.threshold,
        doc.timing.z_score,
        doc.security_margin,
        doc.verdict,
    )
}

/// Per-round CSV log. Header and column order are part of the interface.
pub fn render_round_log(rounds: &[Round], expected_delay: f64) -> String {
    let mut out = String::with_capacity(rounds.len() * 96 + 96);
    out.push_str("index,alice_kind,bob_kind,clicked,t_A_s,t_B_s,residual_s,kept,bit_A,bit_B,eve_intercepted\n");
    for r in rounds {
        let t_b = r
            .t_detect
            .map(|t| format!("{t:.9e}"))
            .unwrap_or_default();
        let residual = r
            .t_detect
            .map(|t| format!("{:.9e}", t - r.t_emit - expected_delay))
            .unwrap_or_default();
        let bit = |b: Option<u8>| b.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{:.9e},{},{},{},{},{},{}\n",
            r.index,
            signal_name(r.alice),
            detector_name(r.bob),
            r.clicked,
            r.t_emit,
            t_b,
            residual,
            r.kept,
            bit(r.bit_a),
            bit(r.bit_b),
            matches!(r.eve, EveAction::Intercepted { .. }),
        ));
    }
    out
}

fn signal_name(kind: fcqkd::protocol::SignalKind) -> &'static str {
    match kind {
        fcqkd::protocol::SignalKind::Narrow1 => "narrow1",
        fcqkd::protocol::SignalKind::Narrow2 => "narrow2",
        fcqkd::protocol::SignalKind::Broadband => "broadband",
    }
}

fn detector_name(kind: fcqkd::protocol::DetectorKind) -> &'static str {
    match kind {
        fcqkd::protocol::DetectorKind::Narrow1 => "narrow1",
        fcqkd::protocol::DetectorKind::Narrow2 => "narrow2",
        fcqkd::protocol::DetectorKind::Wideband => "wideband",
    }
}

/// Helpers shared by the sweep table.
pub fn km_cell(bound: &LengthBound) -> String {
    match bound {
        LengthBound::Unbounded => "unbounded".to_string(),
        LengthBound::Finite(m) => format!("{:.6}", m / 1e3),
    }
}

pub fn secure_length_cells(lossless: &SecureLength, lossy: &LossySecureLength) -> [String; 4] {
    [
        km_cell(&lossless.paper_form),
        km_cell(&lossless.consistent_form),
        km_cell(&lossy.weak_form),
        km_cell(&lossy.exact_form),
    ]
}
