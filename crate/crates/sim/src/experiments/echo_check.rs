//! Time-domain versus frequency-domain echo synthesis over a matrix of
//! prefix regimes, Doppler settings and alphabets, noise off.

use anyhow::Result;
use isac_core::channel::{echo_frequency_domain, received_grid, EchoModel};
use isac_core::constellation::Constellation;
use isac_core::rng::trial_rng;
use isac_core::scenario::{GridTarget, Scenario};
use isac_core::waveform::Frame;
use isac_core::Complex64;
use serde::Serialize;
use serde_json::json;

use super::{engine_for, metadata, Outcome};
use crate::config::Campaign;
use crate::export::Table;
use crate::montecarlo::Runner;
use crate::report::{Check, Report};

/// Largest accepted max-abs difference relative to the RMS echo level.
pub const TOLERANCE: f64 = 1e-9;

pub const CONSTELLATIONS: [&str; 3] = ["qpsk", "qam16", "qam1024"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Delay inside the prefix.
    Within,
    /// Delay exactly equal to the prefix.
    Boundary,
    /// A third of the way past the prefix.
    Beyond,
    /// The largest delay bin.
    Far,
    /// One target inside and one beyond the prefix.
    Mixed,
}

impl Regime {
    pub const ALL: [Regime; 5] = [Regime::Within, Regime::Boundary, Regime::Beyond, Regime::Far, Regime::Mixed];

    fn delays(self, n: usize, n_cp: usize) -> Vec<usize> {
        let beyond = (n_cp + (n - n_cp) / 3).min(n - 1);
        match self {
            Regime::Within => vec![n_cp / 2],
            Regime::Boundary => vec![n_cp],
            Regime::Beyond => vec![beyond],
            Regime::Far => vec![n - 1],
            Regime::Mixed => vec![n_cp / 2, beyond],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub regime: Regime,
    pub doppler: bool,
    pub constellation: String,
    pub delays: Vec<usize>,
    pub dopplers: Vec<usize>,
    pub relative_error: f64,
    /// Both interference components exactly zero.
    pub interference_free: bool,
}

pub fn run(campaign: &Campaign, _runner: &Runner) -> Result<(Outcome, Vec<Case>)> {
    let params = &campaign.params;
    let engine = engine_for(params);
    let (n, m, n_cp) = (params.n_subcarriers, params.n_symbols, params.n_cp);
    let mut cases = Vec::new();
    let mut index = 0u64;
    for regime in Regime::ALL {
        for doppler in [false, true] {
            for token in CONSTELLATIONS {
                let c = Constellation::from_token(token)?;
                let mut rng = trial_rng(campaign.seed, index);
                index += 1;
                let delays = regime.delays(n, n_cp);
                let dopplers: Vec<usize> = (0..delays.len())
                    .map(|i| if doppler { (m / 3 + 2 * i + 1) % m } else { 0 })
                    .collect();
                let targets = delays
                    .iter()
                    .zip(&dopplers)
                    .enumerate()
                    .map(|(i, (&l, &nu))| {
                        GridTarget::from_bins(params, l, nu, Complex64::from_polar(1.0 / (i + 1) as f64, 0.7 * i as f64))
                    })
                    .collect::<isac_core::Result<Vec<_>>>()?;
                let sc = Scenario::from_grid_targets(params.clone(), targets, 0.0)?;
                let frame = Frame::draw(&c, params, campaign.predecessor, &mut rng);
                let td = received_grid(&frame, &sc, EchoModel::TimeDomain, false, &mut rng, &engine)?.y;
                let fd = echo_frequency_domain(&frame, &sc, false, &mut rng)?;
                let rms = (fd.y.energy() / fd.y.len() as f64).sqrt();
                let parts = fd.components.as_ref().expect("frequency-domain echo carries components");
                let zero = |g: &isac_core::grid::Grid| g.as_slice().iter().all(|z| z.re == 0.0 && z.im == 0.0);
                cases.push(Case {
                    regime,
                    doppler,
                    constellation: token.into(),
                    delays,
                    dopplers,
                    relative_error: td.max_abs_diff(&fd.y) / rms,
                    interference_free: zero(&parts.isi) && zero(&parts.ici),
                });
            }
        }
    }

    let mut report = Report::new("echo_check", metadata(campaign));
    let mut table = Table::new(&["regime", "doppler", "constellation", "delays", "relative_error", "interference_free"]);
    for case in &cases {
        let regime = serde_json::to_value(case.regime)?.as_str().unwrap_or_default().to_string();
        let delays: Vec<String> = case.delays.iter().map(|l| l.to_string()).collect();
        table.push(vec![
            regime.clone().into(),
            case.doppler.into(),
            case.constellation.clone().into(),
            delays.join(" ").into(),
            case.relative_error.into(),
            case.interference_free.into(),
        ]);
        let name = format!("{regime}/doppler_{}/{}", case.doppler, case.constellation);
        report.push(Check::absolute(format!("agreement/{name}"), case.relative_error, 0.0, TOLERANCE));
        let within = matches!(case.regime, Regime::Within | Regime::Boundary);
        if within {
            report.push(Check::condition(format!("interference_free/{name}"), case.interference_free));
        }
    }
    let max = cases.iter().map(|c| c.relative_error).fold(0.0, f64::max);
    report.summary = json!({ "cases": cases.len(), "max_relative_error": max });
    Ok((
        Outcome {
            name: "echo_check",
            table,
            report,
        },
        cases,
    ))
}
