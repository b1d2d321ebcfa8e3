use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid constellation order {order} for {kind}: {reason}")]
    InvalidOrder {
        kind: &'static str,
        order: usize,
        reason: &'static str,
    },
    #[error("unknown constellation token `{0}` (expected bpsk, qpsk, psk<k>, qam16, qam64, qam256 or qam1024)")]
    UnknownConstellation(String),
    #[error("invalid system parameter: {0}")]
    InvalidParams(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("delay {tau_s:e} s outside the unambiguous window [0, {limit_s:e}) s")]
    DelayOutOfWindow { tau_s: f64, limit_s: f64 },
    #[error("Doppler {doppler_hz} Hz outside the unambiguous window [0, {limit_hz}) Hz")]
    DopplerOutOfWindow { doppler_hz: f64, limit_hz: f64 },
    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("signal covers samples [{start}, {end}) but demodulation needs [{need_start}, {need_end})")]
    SignalTooShort {
        start: i64,
        end: i64,
        need_start: i64,
        need_end: i64,
    },
    #[error("harmonic number needs k >= 1")]
    HarmonicOrder,
    #[error("{targets} mainlobe bins leave no sidelobe region in a {bins}-bin map")]
    NoSidelobes { targets: usize, bins: usize },
    #[error("cannot pick {count} peaks from a map of {bins} bins")]
    PeakCount { count: usize, bins: usize },
    #[error("RMSE needs at least one trial")]
    EmptyTrials,
    #[error("RMSE needs matched trial counts, got {truth} truths and {estimates} estimates")]
    TrialCountMismatch { truth: usize, estimates: usize },
}
