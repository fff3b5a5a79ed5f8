//! The key-distribution state machine: random emission, optional
//! intercept-resend eavesdropping, random detection, public sifting, and
//! the timing-based eavesdropper test.
//!
//! Rounds are independent given per-round random streams derived from the
//! master seed, so the session runner may execute them in parallel and
//! still produce bit-identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::FiberChannel;
use crate::error::Error;
use crate::security::{self, NarrowState, SystemParams};
use crate::wavepacket::PulseParams;
use crate::Result;

/// The three single-photon states the sender emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalKind {
    /// Narrow spectrum at the first carrier.
    Narrow1,
    /// Narrow spectrum at the second carrier.
    Narrow2,
    /// Short reference pulse with a wide spectrum.
    Broadband,
}

/// The three detector responses the receiver chooses among.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorKind {
    Narrow1,
    Narrow2,
    Wideband,
}

/// Publicly announced class of a signal or detector. Sifting decisions
/// consume only this class, never the particular narrow frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalClass {
    Narrow,
    Broadband,
}

impl SignalKind {
    pub fn class(&self) -> SignalClass {
        match self {
            SignalKind::Narrow1 | SignalKind::Narrow2 => SignalClass::Narrow,
            SignalKind::Broadband => SignalClass::Broadband,
        }
    }
}

impl DetectorKind {
    pub fn class(&self) -> SignalClass {
        match self {
            DetectorKind::Narrow1 | DetectorKind::Narrow2 => SignalClass::Narrow,
            DetectorKind::Wideband => SignalClass::Broadband,
        }
    }
}

/// What the eavesdropper did in one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EveAction {
    /// Round left untouched.
    None,
    /// Measured with a narrow discriminator and re-sent a narrow photon.
    Intercepted {
        /// The narrow state she identified (or guessed, for broadband
        /// input).
        measured: SignalKind,
        /// Mandatory processing time before the resend, s.
        resend_delay: f64,
    },
}

impl EveAction {
    pub fn intercepted(&self) -> bool {
        matches!(self, EveAction::Intercepted { .. })
    }
}

/// Full record of one protocol trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Round {
    pub index: u64,
    pub alice: SignalKind,
    /// Emission time, s.
    pub t_emit: f64,
    pub eve: EveAction,
    pub bob: DetectorKind,
    pub clicked: bool,
    /// Detection time, s; present iff clicked.
    pub t_detect: Option<f64>,
    /// Round survives sifting (key material or timing check).
    pub kept: bool,
    /// Sender's key bit, for kept narrow rounds.
    pub bit_a: Option<u8>,
    /// Receiver's key bit, for kept narrow rounds.
    pub bit_b: Option<u8>,
}

/// Sifting outcome of one round, decided from announced classes and the
/// click flag alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundClass {
    /// Narrow signal on a narrow detector: key material.
    KeyKept,
    /// Broadband signal on the wideband detector: timing check.
    TimingKept,
    /// Detector did not fire.
    NoClick,
    /// Announced classes differ.
    TypeMismatch,
}

/// The public sifting rule. Cross-frequency narrow rounds are kept (and
/// become key errors) because only the detector class is announced.
pub fn classify(clicked: bool, signal: SignalClass, detector: SignalClass) -> RoundClass {
    if !clicked {
        return RoundClass::NoClick;
    }
    match (signal, detector) {
        (SignalClass::Narrow, SignalClass::Narrow) => RoundClass::KeyKept,
        (SignalClass::Broadband, SignalClass::Broadband) => RoundClass::TimingKept,
        _ => RoundClass::TypeMismatch,
    }
}

/// Discarded-round counts by cause.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DiscardBreakdown {
    pub no_click: u64,
    pub type_mismatch: u64,
}

/// Result of sifting a sequence of rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftOutcome {
    pub key_a: Vec<u8>,
    pub key_b: Vec<u8>,
    pub discards: DiscardBreakdown,
    /// Indices of broadband rounds kept for the timing check.
    pub timing_rounds: Vec<usize>,
}

/// Statistics of the timing residuals `t_detect - t_emit - alpha x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingStats {
    pub n_check: u64,
    pub mean_residual: f64,
    pub std_residual: f64,
    /// Detection threshold on the mean residual,
    /// `max(k std_model / sqrt(n), f dt12)`.
    pub threshold: f64,
    pub z_score: f64,
}

/// Session verdict from the timing check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Clean,
    EavesdropperDetected,
    /// Too few broadband check rounds for a decision.
    Inconclusive,
}

/// Eavesdropper configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveConfig {
    pub enabled: bool,
    /// Intercept position, m from the sender.
    pub position: f64,
    /// Probability of intercepting any given round.
    pub intercept_probability: f64,
}

impl Default for EveConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            position: 0.0,
            intercept_probability: 1.0,
        }
    }
}

/// Full configuration of a protocol session, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub system: SystemParams,
    pub channel: FiberChannel,
    pub eve: EveConfig,
    /// Emission probabilities for Narrow1 / Narrow2 / Broadband.
    pub alice_priors: [f64; 3],
    /// Detector choice probabilities for Narrow1 / Narrow2 / Wideband.
    pub bob_priors: [f64; 3],
    /// Detector quantum efficiency, on top of spectral overlap and loss.
    pub efficiency: f64,
    /// Emission clock period, s; `None` derives 100x the widest
    /// broadened pulse so rounds never overlap.
    pub emission_period: Option<f64>,
    /// Minimum broadband pool for a timing verdict.
    pub min_check_rounds: usize,
    /// Statistical threshold multiplier `k`.
    pub threshold_k: f64,
    /// Physical-scale threshold fraction `f` of `dt12`.
    pub threshold_f: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            system: SystemParams::default(),
            channel: FiberChannel {
                length: 1e5,
                alpha: 5e-9,
                beta_re: 1e-27,
                beta_im: 0.0,
                loss_db_per_km: 0.35,
            },
            eve: EveConfig::default(),
            alice_priors: [1.0 / 3.0; 3],
            bob_priors: [1.0 / 3.0; 3],
            efficiency: 1.0,
            emission_period: None,
            min_check_rounds: 30,
            threshold_k: 5.0,
            threshold_f: 0.25,
        }
    }
}

fn validate_priors(name: &'static str, priors: &[f64; 3]) -> Result<()> {
    for p in priors {
        if !(*p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidPriors(format!(
                "{name} entries must be finite and >= 0, got {priors:?}"
            )));
        }
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPriors(format!(
            "{name} must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

impl ProtocolConfig {
    /// Validates every sub-structure and cross-field constraint.
    pub fn validate(&self) -> Result<()> {
        let report = security::validate_parameters(&self.system)?;
        if !report.passed {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            return Err(Error::InvalidPriors(format!(
                "system parameters fail validation: {}",
                failed.join(", ")
            )));
        }
        self.channel.validate()?;
        validate_priors("alice_priors", &self.alice_priors)?;
        validate_priors("bob_priors", &self.bob_priors)?;
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidParameter {
                name: "efficiency",
                value: self.efficiency,
                requirement: "must be in [0, 1]",
            });
        }
        if self.eve.enabled {
            if !(0.0..=1.0).contains(&self.eve.intercept_probability) {
                return Err(Error::InvalidParameter {
                    name: "eve.intercept_probability",
                    value: self.eve.intercept_probability,
                    requirement: "must be in [0, 1]",
                });
            }
            if !(self.eve.position >= 0.0 && self.eve.position <= self.channel.length) {
                return Err(Error::InvalidParameter {
                    name: "eve.position",
                    value: self.eve.position,
                    requirement: "must lie within the channel",
                });
            }
        }
        if let Some(period) = self.emission_period {
            if !(period > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "emission_period",
                    value: period,
                    requirement: "must be > 0",
                });
            }
        }
        if self.min_check_rounds == 0 {
            return Err(Error::InvalidParameter {
                name: "min_check_rounds",
                value: 0.0,
                requirement: "must be >= 1",
            });
        }
        if !(self.threshold_k >= 0.0) || !(self.threshold_f >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "threshold_k/threshold_f",
                value: self.threshold_k.min(self.threshold_f),
                requirement: "must be >= 0",
            });
        }
        Ok(())
    }

    /// Pulse parameters of one signal kind.
    pub fn pulse(&self, kind: SignalKind) -> Result<PulseParams> {
        let (omega, sigma) = match kind {
            SignalKind::Narrow1 => (self.system.omega1, self.system.sigma1),
            SignalKind::Narrow2 => (self.system.omega2, self.system.sigma2),
            SignalKind::Broadband => (self.system.omega0, self.system.sigma_inf),
        };
        PulseParams::new(omega, sigma)
    }

    fn detector(&self, kind: DetectorKind) -> (f64, f64) {
        match kind {
            DetectorKind::Narrow1 => (self.system.omega1, self.system.gamma1),
            DetectorKind::Narrow2 => (self.system.omega2, self.system.gamma2),
            DetectorKind::Wideband => (self.system.omega0, self.system.gamma_inf),
        }
    }
}

/// Spectral-overlap click probability: the photon's normalized Gaussian
/// spectrum integrated against a peak-1 Gaussian detector response, times
/// survival and detector efficiency.
pub fn detector_click_probability(
    signal_omega: f64,
    signal_sigma: f64,
    det_omega: f64,
    det_gamma: f64,
    survival: f64,
    efficiency: f64,
) -> f64 {
    let v = signal_sigma * signal_sigma + det_gamma * det_gamma;
    let d = signal_omega - det_omega;
    survival * efficiency * (det_gamma / v.sqrt()) * (-d * d / (2.0 * v)).exp()
}

const SIGNAL_KINDS: [SignalKind; 3] = [
    SignalKind::Narrow1,
    SignalKind::Narrow2,
    SignalKind::Broadband,
];
const DETECTOR_KINDS: [DetectorKind; 3] = [
    DetectorKind::Narrow1,
    DetectorKind::Narrow2,
    DetectorKind::Wideband,
];

fn draw_index<R: Rng + ?Sized>(rng: &mut R, cdf: &[f64; 3]) -> usize {
    let u: f64 = rng.random();
    if u < cdf[0] {
        0
    } else if u < cdf[1] {
        1
    } else {
        2
    }
}

/// Draws the sender's state for round `index` on the emission clock.
pub fn alice_choose<R: Rng + ?Sized>(
    rng: &mut R,
    priors: &[f64; 3],
    index: u64,
    period: f64,
) -> Result<(SignalKind, f64)> {
    validate_priors("priors", priors)?;
    let cdf = [priors[0], priors[0] + priors[1], 1.0];
    let kind = SIGNAL_KINDS[draw_index(rng, &cdf)];
    Ok((kind, index as f64 * period))
}

/// The eavesdropper's intercept of one signal: ideal narrow
/// discrimination (a uniform guess on broadband input), then a mandatory
/// processing delay before the resend.
pub fn eve_intercept<R: Rng + ?Sized>(
    rng: &mut R,
    signal: SignalKind,
    sys: &SystemParams,
    ch: &FiberChannel,
    x_e: f64,
) -> Result<EveAction> {
    let measured = match signal {
        SignalKind::Narrow1 => SignalKind::Narrow1,
        SignalKind::Narrow2 => SignalKind::Narrow2,
        SignalKind::Broadband => {
            if rng.random_bool(0.5) {
                SignalKind::Narrow1
            } else {
                SignalKind::Narrow2
            }
        }
    };
    let which = if measured == SignalKind::Narrow1 {
        NarrowState::One
    } else {
        NarrowState::Two
    };
    let resend_delay = security::eve_min_time(sys, ch, x_e, which)?;
    Ok(EveAction::Intercepted {
        measured,
        resend_delay,
    })
}

/// Precomputed per-session tables so the round loop is pure RNG work.
#[derive(Debug, Clone)]
pub struct RoundContext {
    cfg: ProtocolConfig,
    period: f64,
    expected_delay: f64,
    alice_cdf: [f64; 3],
    bob_cdf: [f64; 3],
    /// Click probability by travelling signal kind and detector.
    click: [[f64; 3]; 3],
    /// Arrival-time std over the full channel, by signal kind.
    width_total: [f64; 3],
    /// Arrival-time std from the sender to the eavesdropper.
    width_to_eve: [f64; 3],
    /// Arrival-time std from the eavesdropper to the receiver (narrow
    /// kinds only; broadband entry unused).
    width_from_eve: [f64; 3],
    /// Mandatory processing delay by measured narrow kind.
    eve_delay: [f64; 2],
}

impl RoundContext {
    pub fn new(cfg: ProtocolConfig) -> Result<Self> {
        cfg.validate()?;
        let ch = &cfg.channel;
        let x = ch.length;
        let x_e = cfg.eve.position;
        let beta = ch.beta();

        let mut click = [[0.0; 3]; 3];
        let mut width_total = [0.0; 3];
        let mut width_to_eve = [0.0; 3];
        let mut width_from_eve = [0.0; 3];
        let survival = ch.survival_probability(x);
        for (si, &s) in SIGNAL_KINDS.iter().enumerate() {
            let pulse = cfg.pulse(s)?;
            width_total[si] = crate::wavepacket::temporal_width(&pulse, beta, x)?;
            width_to_eve[si] = crate::wavepacket::temporal_width(&pulse, beta, x_e)?;
            width_from_eve[si] = crate::wavepacket::temporal_width(&pulse, beta, x - x_e)?;
            for (di, &d) in DETECTOR_KINDS.iter().enumerate() {
                let (d_omega, d_gamma) = cfg.detector(d);
                click[si][di] = detector_click_probability(
                    pulse.omega0,
                    pulse.sigma,
                    d_omega,
                    d_gamma,
                    survival,
                    cfg.efficiency,
                );
            }
        }
        let eve_delay = [
            security::eve_min_time(&cfg.system, ch, x_e, NarrowState::One)?,
            security::eve_min_time(&cfg.system, ch, x_e, NarrowState::Two)?,
        ];

        let widest = width_total.iter().cloned().fold(0.0, f64::max);
        let period = cfg.emission_period.unwrap_or(100.0 * widest);
        let alice_cdf = [
            cfg.alice_priors[0],
            cfg.alice_priors[0] + cfg.alice_priors[1],
            1.0,
        ];
        let bob_cdf = [cfg.bob_priors[0], cfg.bob_priors[0] + cfg.bob_priors[1], 1.0];
        let expected_delay = ch.group_delay(x);

        Ok(Self {
            cfg,
            period,
            expected_delay,
            alice_cdf,
            bob_cdf,
            click,
            width_total,
            width_to_eve,
            width_from_eve,
            eve_delay,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.cfg
    }

    /// Emission clock period, s.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Expected propagation delay `alpha * length`, s.
    pub fn expected_delay(&self) -> f64 {
        self.expected_delay
    }

    /// Runs one protocol trial. Per-round draw order: sender state, eve
    /// intercept decision (plus her arrival sample and broadband guess),
    /// receiver detector, click, arrival time.
    pub fn run_round<R: Rng + ?Sized>(&self, rng: &mut R, index: u64) -> Round {
        let cfg = &self.cfg;
        let ch = &cfg.channel;
        let alice = SIGNAL_KINDS[draw_index(rng, &self.alice_cdf)];
        let t_emit = index as f64 * self.period;

        // The photon that actually covers the last leg to the receiver:
        // its kind, emission time and starting position.
        let mut eve = EveAction::None;
        let (trav_kind, trav_emit, trav_from) = if cfg.eve.enabled
            && rng.random_bool(cfg.eve.intercept_probability)
        {
            let x_e = cfg.eve.position;
            let arrive_eve = gaussian(
                rng,
                t_emit + ch.alpha * x_e,
                self.width_to_eve[alice as usize],
            );
            let measured = match alice {
                SignalKind::Narrow1 => SignalKind::Narrow1,
                SignalKind::Narrow2 => SignalKind::Narrow2,
                SignalKind::Broadband => {
                    if rng.random_bool(0.5) {
                        SignalKind::Narrow1
                    } else {
                        SignalKind::Narrow2
                    }
                }
            };
            let delay = self.eve_delay[measured as usize];
            eve = EveAction::Intercepted {
                measured,
                resend_delay: delay,
            };
            (measured, arrive_eve + delay, x_e)
        } else {
            (alice, t_emit, 0.0)
        };

        let bob = DETECTOR_KINDS[draw_index(rng, &self.bob_cdf)];
        let clicked = rng.random_bool(self.click[trav_kind as usize][bob as usize]);
        let t_detect = clicked.then(|| {
            let leg = ch.length - trav_from;
            let width = if trav_from > 0.0 {
                self.width_from_eve[trav_kind as usize]
            } else {
                self.width_total[trav_kind as usize]
            };
            gaussian(rng, trav_emit + ch.alpha * leg, width)
        });

        let class = classify(clicked, alice.class(), bob.class());
        let kept = matches!(class, RoundClass::KeyKept | RoundClass::TimingKept);
        let (bit_a, bit_b) = if class == RoundClass::KeyKept {
            (
                Some(if alice == SignalKind::Narrow1 { 0 } else { 1 }),
                Some(if bob == DetectorKind::Narrow1 { 0 } else { 1 }),
            )
        } else {
            (None, None)
        };

        Round {
            index,
            alice,
            t_emit,
            eve,
            bob,
            clicked,
            t_detect,
            kept,
            bit_a,
            bit_b,
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, mean: f64, std: f64) -> f64 {
    Normal::new(mean, std).expect("positive std").sample(rng)
}

/// One protocol trial without a prebuilt context; prefer
/// [`RoundContext::run_round`] inside loops.
pub fn run_round<R: Rng + ?Sized>(rng: &mut R, cfg: &ProtocolConfig, index: u64) -> Result<Round> {
    Ok(RoundContext::new(cfg.clone())?.run_round(rng, index))
}

/// Public sifting: narrow/narrow clicked rounds become key bits
/// (first carrier = 0, second = 1), broadband/wideband clicked rounds go
/// to the timing pool, everything else is discarded by cause.
pub fn sift(rounds: &[Round]) -> SiftOutcome {
    let mut out = SiftOutcome {
        key_a: Vec::new(),
        key_b: Vec::new(),
        discards: DiscardBreakdown::default(),
        timing_rounds: Vec::new(),
    };
    for (i, r) in rounds.iter().enumerate() {
        match classify(r.clicked, r.alice.class(), r.bob.class()) {
            RoundClass::KeyKept => {
                out.key_a.push(r.bit_a.expect("key round has sender bit"));
                out.key_b.push(r.bit_b.expect("key round has receiver bit"));
            }
            RoundClass::TimingKept => out.timing_rounds.push(i),
            RoundClass::NoClick => out.discards.no_click += 1,
            RoundClass::TypeMismatch => out.discards.type_mismatch += 1,
        }
    }
    out
}

/// One-sided mean test on precomputed residuals. `std_model` is the
/// expected no-eavesdropper arrival scatter, `dt12` the narrow
/// distinguishability time.
pub fn analyze_residuals(
    residuals: &[f64],
    std_model: f64,
    dt12: f64,
    k: f64,
    f: f64,
    min_check: usize,
) -> (TimingStats, Verdict) {
    let n = residuals.len();
    let mean = if n > 0 {
        residuals.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let std = if n > 1 {
        (residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let threshold = f64::max(k * std_model / (n.max(1) as f64).sqrt(), f * dt12);
    let z_score = if std > 0.0 {
        mean / (std / (n as f64).sqrt())
    } else {
        0.0
    };
    let stats = TimingStats {
        n_check: n as u64,
        mean_residual: mean,
        std_residual: std,
        threshold,
        z_score,
    };
    let verdict = if n < min_check {
        Verdict::Inconclusive
    } else if mean > threshold {
        Verdict::EavesdropperDetected
    } else {
        Verdict::Clean
    };
    (stats, verdict)
}

/// Timing check over the broadband pool of a finished session.
pub fn timing_analysis(rounds: &[Round], cfg: &ProtocolConfig) -> Result<(TimingStats, Verdict)> {
    let expected_delay = cfg.channel.group_delay(cfg.channel.length);
    let residuals: Vec<f64> = rounds
        .iter()
        .filter(|r| {
            classify(r.clicked, r.alice.class(), r.bob.class()) == RoundClass::TimingKept
        })
        .map(|r| r.t_detect.expect("timing round clicked") - r.t_emit - expected_delay)
        .collect();
    let std_model = security::broadband_width(&cfg.system, &cfg.channel, cfg.channel.length)?;
    Ok(analyze_residuals(
        &residuals,
        std_model,
        cfg.system.dt12(),
        cfg.threshold_k,
        cfg.threshold_f,
        cfg.min_check_rounds,
    ))
}

/// Everything the two users learn from one session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionReport {
    pub rounds: u64,
    pub sifted_key_a: Vec<u8>,
    pub sifted_key_b: Vec<u8>,
    /// Disagreement fraction between the sifted keys.
    pub qber: f64,
    pub discards: DiscardBreakdown,
    pub timing: TimingStats,
    pub verdict: Verdict,
    /// `eve_time(x_e = 0) / bob_width(length)`.
    pub security_margin: f64,
}

/// Independent per-round random stream: one ChaCha instance per round,
/// seeded by the master seed with the round index as the stream id.
pub fn round_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index + 1);
    rng
}

fn assemble_report(cfg: &ProtocolConfig, rounds: &[Round]) -> Result<SessionReport> {
    let sifted = sift(rounds);
    let disagreements = sifted
        .key_a
        .iter()
        .zip(&sifted.key_b)
        .filter(|(a, b)| a != b)
        .count();
    let qber = if sifted.key_a.is_empty() {
        0.0
    } else {
        disagreements as f64 / sifted.key_a.len() as f64
    };
    let (timing, verdict) = timing_analysis(rounds, cfg)?;
    let security_margin = security::secrecy_margin(&cfg.system, &cfg.channel, cfg.channel.length, 0.0)?;
    Ok(SessionReport {
        rounds: rounds.len() as u64,
        sifted_key_a: sifted.key_a,
        sifted_key_b: sifted.key_b,
        qber,
        discards: sifted.discards,
        timing,
        verdict,
        security_margin,
    })
}

/// Runs a full session: `n_rounds` trials, sifting, timing analysis.
/// Bit-identical for identical `(cfg, master_seed)` regardless of the
/// `parallel` feature or thread count.
pub fn run_session(cfg: &ProtocolConfig, n_rounds: u64, master_seed: u64) -> Result<SessionReport> {
    let ctx = RoundContext::new(cfg.clone())?;
    let rounds = crate::map_indexed(n_rounds as usize, |i| {
        let mut rng = round_rng(master_seed, i as u64);
        ctx.run_round(&mut rng, i as u64)
    });
    assemble_report(cfg, &rounds)
}

/// Sequential fallback of [`run_session`], kept callable for comparison
/// and benchmarking.
pub fn run_session_sequential(
    cfg: &ProtocolConfig,
    n_rounds: u64,
    master_seed: u64,
) -> Result<SessionReport> {
    let ctx = RoundContext::new(cfg.clone())?;
    let rounds = crate::map_indexed_seq(n_rounds as usize, |i| {
        let mut rng = round_rng(master_seed, i as u64);
        ctx.run_round(&mut rng, i as u64)
    });
    assemble_report(cfg, &rounds)
}

/// Runs all rounds of a session and returns them; used by the per-round
/// log export.
pub fn run_rounds(cfg: &ProtocolConfig, n_rounds: u64, master_seed: u64) -> Result<Vec<Round>> {
    let ctx = RoundContext::new(cfg.clone())?;
    Ok(crate::map_indexed(n_rounds as usize, |i| {
        let mut rng = round_rng(master_seed, i as u64);
        ctx.run_round(&mut rng, i as u64)
    }))
}

/// Fraction of sessions whose verdict is `EavesdropperDetected`, over
/// `n_sessions` sessions with master seeds `seed0, seed0 + 1, ...`.
pub fn detection_power(
    cfg: &ProtocolConfig,
    n_rounds: u64,
    n_sessions: u64,
    seed0: u64,
) -> Result<f64> {
    let verdicts: Vec<Result<bool>> = crate::map_indexed(n_sessions as usize, |s| {
        let report = run_session_sequential(cfg, n_rounds, seed0 + s as u64)?;
        Ok(report.verdict == Verdict::EavesdropperDetected)
    });
    let mut hits = 0u64;
    for v in verdicts {
        if v? {
            hits += 1;
        }
    }
    Ok(hits as f64 / n_sessions as f64)
}
