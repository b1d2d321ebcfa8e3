//! Trial-averaged range profiles under both filters and every prefix mode,
//! against the closed-form floor plus Dirichlet mainlobes.

use anyhow::{ensure, Result};
use isac_core::analytics::{expected_power, predict_moment};
use isac_core::rdm::{range_doppler_map, Filter};
use isac_core::rng::trial_rng;
use isac_core::scenario::{grid_targets, Scenario};
use isac_core::to_db;
use serde::Serialize;
use serde_json::json;

use super::{add_into, cp_params, engine_for, metadata, realize, scenario, Outcome};
use crate::config::Campaign;
use crate::export::Table;
use crate::montecarlo::Runner;
use crate::report::{Check, Report};

/// Floor and mainlobe tolerance in dB at the reference trial count.
pub const TOLERANCE_DB: f64 = 0.2;

#[derive(Debug, Clone, Serialize)]
pub struct TargetLevels {
    pub l: usize,
    pub nu: usize,
    pub range_m: f64,
    pub rho: f64,
    pub mainlobe_db_empirical: f64,
    pub mainlobe_db_analytic: f64,
    /// (mainlobe − floor) / (MN·|α|²) in dB; ideally 20·log10(1 − ρ).
    pub attenuation_db_empirical: f64,
    pub attenuation_db_analytic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Levels {
    pub cp_mode: String,
    pub n_cp: usize,
    pub filter: &'static str,
    pub floor_db_empirical: f64,
    pub floor_db_analytic: f64,
    pub targets: Vec<TargetLevels>,
}

/// Mean |χ|² over all trials, one map per filter.
pub fn mean_power_maps(campaign: &Campaign, scenario: &Scenario, runner: &Runner) -> Result<[Vec<f64>; 2]> {
    let p = &scenario.params;
    let bins = p.grid_bins();
    let engine = engine_for(p);
    let sums = runner.run(
        campaign.trials,
        || [vec![0.0; bins], vec![0.0; bins]],
        |acc, t| {
            let mut rng = trial_rng(campaign.seed, t);
            let (frame, y) = realize(campaign, scenario, &engine, &mut rng)?;
            for (filter, sum) in Filter::BOTH.into_iter().zip(acc.iter_mut()) {
                let rdm = range_doppler_map(&y, &frame.symbols, filter, &engine)?;
                for (s, v) in sum.iter_mut().zip(rdm.values.as_slice()) {
                    *s += v.norm_sqr();
                }
            }
            Ok(())
        },
        |total, part| {
            for (t, p) in total.iter_mut().zip(&part) {
                add_into(t, p);
            }
        },
    )?;
    let scale = 1.0 / campaign.trials as f64;
    Ok(sums.map(|s| s.into_iter().map(|v| v * scale).collect()))
}

pub fn run(campaign: &Campaign, runner: &Runner) -> Result<(Outcome, Vec<Levels>)> {
    ensure!(!campaign.targets.is_empty(), "range profile needs at least one target");
    let tol = campaign.tolerance(TOLERANCE_DB);
    let mut table = Table::new(&[
        "cp_mode",
        "filter",
        "l",
        "range_m",
        "power_db_empirical",
        "power_db_analytic",
    ]);
    let mut report = Report::new("range_profile", metadata(campaign));
    let mut levels = Vec::new();

    for cp in &campaign.cp_modes {
        let (params, label) = cp_params(campaign, cp)?;
        let sc = scenario(&params, &campaign.targets)?;
        let maps = mean_power_maps(campaign, &sc, runner)?;
        let n = params.n_subcarriers;
        let mn = params.grid_bins() as f64;
        let mainlobe = sc.mainlobe_bins();
        // Profiles are cut along the first configured target's Doppler bin.
        let nu_cut = grid_targets(&params, &campaign.targets[..1])?[0].nu;
        let mut floors = [0.0; 2];

        for ((filter, map), floor_slot) in Filter::BOTH.into_iter().zip(&maps).zip(floors.iter_mut()) {
            let pred = predict_moment(&sc, &campaign.constellation, filter);
            for l in 0..n {
                let ana = expected_power(&pred, &sc, l as f64, nu_cut as f64);
                table.push(vec![
                    label.clone().into(),
                    filter.label().into(),
                    l.into(),
                    (l as f64 * params.range_resolution()).into(),
                    to_db(map[nu_cut * n + l]).into(),
                    to_db(ana).into(),
                ]);
            }

            let (mut sum, mut count) = (0.0, 0usize);
            for (i, v) in map.iter().enumerate() {
                if !mainlobe.contains(&(i % n, i / n)) {
                    sum += v;
                    count += 1;
                }
            }
            let floor = sum / count as f64;
            *floor_slot = floor;
            let tag = format!("{label}/{}", filter.label());
            report.push(Check::db(
                format!("floor/{tag}"),
                to_db(floor),
                to_db(pred.sidelobe_floor),
                tol,
            ));

            let mut targets = Vec::new();
            for (t, ana_main) in sc.targets.iter().zip(&pred.mainlobe) {
                let emp = map[t.nu * n + t.l];
                // Coincident targets add coherently; only lone bins are checked.
                let shared = sc.targets.iter().filter(|u| (u.l, u.nu) == (t.l, t.nu)).count() > 1;
                let att_emp = to_db((emp - floor) / (mn * t.alpha.norm_sqr()));
                let att_ana = 20.0 * (1.0 - t.rho).log10();
                let bin = format!("{tag}/l{}_nu{}", t.l, t.nu);
                if !shared {
                    report.push(Check::db(format!("mainlobe/{bin}"), to_db(emp), to_db(*ana_main), tol));
                    report.push(Check::db(format!("attenuation/{bin}"), att_emp, att_ana, tol));
                }
                targets.push(TargetLevels {
                    l: t.l,
                    nu: t.nu,
                    range_m: t.range_m(&params),
                    rho: t.rho,
                    mainlobe_db_empirical: to_db(emp),
                    mainlobe_db_analytic: to_db(*ana_main),
                    attenuation_db_empirical: att_emp,
                    attenuation_db_analytic: att_ana,
                });
            }
            levels.push(Levels {
                cp_mode: label.clone(),
                n_cp: params.n_cp,
                filter: filter.label(),
                floor_db_empirical: to_db(floor),
                floor_db_analytic: to_db(pred.sidelobe_floor),
                targets,
            });
        }

        let rf = predict_moment(&sc, &campaign.constellation, Filter::Reciprocal).sidelobe_floor;
        let mf = predict_moment(&sc, &campaign.constellation, Filter::Matched).sidelobe_floor;
        if rf != mf {
            let predicted_rf_higher = rf > mf;
            report.push(
                Check::condition(format!("floor_ordering/{label}"), (floors[0] > floors[1]) == predicted_rf_higher)
                    .with_note(if predicted_rf_higher {
                        "RF floor above MF floor"
                    } else {
                        "RF floor below MF floor"
                    }),
            );
        }
    }
    report.summary = json!({ "levels": levels });
    Ok((
        Outcome {
            name: "range_profile",
            table,
            report,
        },
        levels,
    ))
}
