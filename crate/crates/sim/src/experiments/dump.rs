//! Every intermediate of one trial written to disk: the received time
//! signal, the echo decomposition and both maps.

use std::path::{Path, PathBuf};

use anyhow::Result;
use isac_core::channel::{echo_frequency_domain, echo_time_domain};
use isac_core::rdm::{range_doppler_map, Filter};
use isac_core::rng::trial_rng;
use isac_core::waveform::Frame;

use super::{cp_params, engine_for, scenario};
use crate::config::{Campaign, CpMode};
use crate::export::{components_table, rdm_table, save_matrix, time_signal_table, Format};

/// Writes trial `trial` of the first CP mode (or `cp`) into `dir`.
pub fn run(campaign: &Campaign, cp: Option<CpMode>, trial: u64, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let cp = cp.unwrap_or(campaign.cp_modes[0]);
    let (params, _) = cp_params(campaign, &cp)?;
    let sc = scenario(&params, &campaign.targets)?;
    let engine = engine_for(&params);
    let mut rng = trial_rng(campaign.seed, trial);
    let frame = Frame::draw(&campaign.constellation, &params, campaign.predecessor, &mut rng);

    // The decomposition draws its own noise, so its `noise` component is a
    // separate realization from the one in the time signal.
    let mut fd_rng = rng.clone();
    let signal = echo_time_domain(&frame, &sc, true, &mut rng, &engine)?;
    let echo = echo_frequency_domain(&frame, &sc, true, &mut fd_rng)?;

    let mut written = vec![
        time_signal_table(&signal).save(dir, "echo_time", format)?,
        components_table(echo.components.as_ref().expect("components present")).save(dir, "echo_components", format)?,
    ];
    let y = isac_core::waveform::demodulate(&signal, &params, &engine)?;
    for filter in Filter::BOTH {
        let rdm = range_doppler_map(&y, &frame.symbols, filter, &engine)?;
        let stem = format!("rdm_{}", filter.label().to_lowercase());
        written.push(rdm_table(&rdm.values).save(dir, &stem, format)?);
        let bin = dir.join(format!("{stem}.bin"));
        save_matrix(&bin, &rdm.values)?;
        written.push(bin);
    }
    Ok(written)
}
