//! Monte Carlo campaigns and the closed-form predictions they are checked
//! against.

pub mod dump;
pub mod echo_check;
pub mod moments;
pub mod predict;
pub mod range_profile;
pub mod rmse;
pub mod sidelobes;

use anyhow::Result;
use isac_core::channel::received_grid;
use isac_core::grid::Grid;
use isac_core::rng::TrialRng;
use isac_core::scenario::{Scenario, SystemParams, Target};
use isac_core::waveform::Frame;
use serde_json::{json, Value};

use crate::config::{Campaign, CpMode};
use crate::engine::FftEngine;
use crate::export::Table;
use crate::report::Report;

/// What a campaign produces: one table and a pass/fail report.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// File stem for `table`.
    pub name: &'static str,
    pub table: Table,
    pub report: Report,
}

/// Engine with plans for the campaign's two transform lengths.
pub fn engine_for(params: &SystemParams) -> FftEngine {
    FftEngine::with_lengths(&[params.n_subcarriers, params.n_symbols])
}

/// The campaign's system with `cp` applied, plus its label.
pub fn cp_params(campaign: &Campaign, cp: &CpMode) -> Result<(SystemParams, String)> {
    Ok((cp.apply(&campaign.params)?, cp.label()))
}

pub fn scenario(params: &SystemParams, targets: &[Target]) -> Result<Scenario> {
    Ok(Scenario::new(params.clone(), targets)?)
}

/// One noisy realization: a fresh frame and its demodulated echo.
pub fn realize(campaign: &Campaign, scenario: &Scenario, engine: &FftEngine, rng: &mut TrialRng) -> Result<(Frame, Grid)> {
    let frame = Frame::draw(&campaign.constellation, &scenario.params, campaign.predecessor, rng);
    let y = received_grid(&frame, scenario, campaign.echo_model, true, rng, engine)?.y;
    Ok((frame, y))
}

/// Campaign description shared by every report.
pub fn metadata(campaign: &Campaign) -> Value {
    let p = &campaign.params;
    let cp: Vec<Value> = campaign
        .cp_modes
        .iter()
        .map(|m| json!({ "label": m.label(), "samples": m.samples(p).unwrap_or(0) }))
        .collect();
    json!({
        "profile": campaign.profile.to_string(),
        "seed": campaign.seed,
        "trials": campaign.trials,
        "constellation": campaign.constellation.token(),
        "xi_s": campaign.constellation.xi_s(),
        "mu4": campaign.constellation.mu4(),
        "n_subcarriers": p.n_subcarriers,
        "n_symbols": p.n_symbols,
        "subcarrier_spacing_hz": p.subcarrier_spacing_hz,
        "carrier_hz": p.carrier_hz,
        "cp_modes": cp,
        "predecessor": format!("{:?}", campaign.predecessor),
        "echo_model": format!("{:?}", campaign.echo_model),
        "noise_power_w": p.noise_power(),
        "range_resolution_m": p.range_resolution(),
        "max_isi_free_range_m": p.max_isi_free_range(),
    })
}

/// Sum of two equally shaped slices, in place.
pub(crate) fn add_into(total: &mut [f64], part: &[f64]) {
    for (t, p) in total.iter_mut().zip(part) {
        *t += p;
    }
}

impl Outcome {
    /// Writes the table and `report.json` into `dir`, creating it.
    pub fn save(&self, dir: &std::path::Path, format: crate::export::Format) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        Ok(vec![
            self.table.save(dir, self.name, format)?,
            crate::export::save_report(dir, &self.report)?,
        ])
    }
}
