//! PSLR and ISLR of a single target swept over range.
//!
//! Empirical ratios are ratios of trial means: mean peak (or integrated)
//! sidelobe power over mean mainlobe power.

use anyhow::Result;
use isac_core::analytics::predict_sidelobe_metrics;
use isac_core::from_db;
use isac_core::rdm::{range_doppler_map, sidelobe_stats, Filter};
use isac_core::rng::trial_rng;
use isac_core::scenario::Target;
use isac_core::to_db;
use serde::Serialize;
use serde_json::json;

use super::{cp_params, engine_for, metadata, realize, scenario, Outcome};
use crate::config::{Campaign, CpMode};
use crate::export::Table;
use crate::montecarlo::Runner;
use crate::report::{Check, Report};

/// PSLR/ISLR tolerance in dB at the reference trial count.
pub const TOLERANCE_DB: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub range_m: f64,
    pub cp_mode: String,
    pub filter: &'static str,
    pub l: usize,
    pub rho: f64,
    pub pslr_db_emp: f64,
    pub pslr_db_ana: f64,
    pub islr_db_emp: f64,
    pub islr_db_ana: f64,
}

/// Mean (peak sidelobe, integrated sidelobe, mainlobe) per filter.
fn sidelobe_means(campaign: &Campaign, sc: &isac_core::scenario::Scenario, runner: &Runner) -> Result<[[f64; 3]; 2]> {
    let engine = engine_for(&sc.params);
    let bins = sc.mainlobe_bins();
    let sums = runner.run(
        campaign.trials,
        || [[0.0; 3]; 2],
        |acc, t| {
            let mut rng = trial_rng(campaign.seed, t);
            let (frame, y) = realize(campaign, sc, &engine, &mut rng)?;
            for (filter, a) in Filter::BOTH.into_iter().zip(acc.iter_mut()) {
                let rdm = range_doppler_map(&y, &frame.symbols, filter, &engine)?.with_mainlobe(&bins);
                let s = sidelobe_stats(&rdm)?;
                a[0] += s.peak_sidelobe;
                a[1] += s.integrated_sidelobe;
                a[2] += s.mainlobe[0].1;
            }
            Ok(())
        },
        |total, part| {
            for (t, p) in total.iter_mut().zip(part) {
                for (x, y) in t.iter_mut().zip(p) {
                    *x += y;
                }
            }
        },
    )?;
    let k = 1.0 / campaign.trials as f64;
    Ok(sums.map(|a| a.map(|v| v * k)))
}

pub fn run(campaign: &Campaign, runner: &Runner) -> Result<(Outcome, Vec<SweepPoint>)> {
    let sweep = &campaign.sweep;
    let tol = campaign.tolerance(TOLERANCE_DB);
    let mut table = Table::new(&[
        "range_m",
        "filter",
        "cp_mode",
        "pslr_db_emp",
        "pslr_db_ana",
        "islr_db_emp",
        "islr_db_ana",
    ]);
    let mut report = Report::new("pslr_islr_sweep", metadata(campaign));
    let mut points = Vec::new();

    for &range_m in &sweep.ranges_m {
        for cp in &campaign.cp_modes {
            let (params, label) = cp_params(campaign, cp)?;
            let target = Target {
                range_m,
                velocity_mps: sweep.velocity_mps,
                rcs_m2: from_db(sweep.rcs_dbsm),
                phase_rad: 0.0,
            };
            let sc = scenario(&params, &[target])?;
            let means = sidelobe_means(campaign, &sc, runner)?;
            for (filter, [peak, integrated, main]) in Filter::BOTH.into_iter().zip(means) {
                let ana = predict_sidelobe_metrics(&sc, &campaign.constellation, filter)?;
                let point = SweepPoint {
                    range_m,
                    cp_mode: label.clone(),
                    filter: filter.label(),
                    l: sc.targets[0].l,
                    rho: sc.targets[0].rho,
                    pslr_db_emp: to_db(peak / main),
                    pslr_db_ana: to_db(ana.pslr[0]),
                    islr_db_emp: to_db(integrated / main),
                    islr_db_ana: to_db(ana.islr[0]),
                };
                let tag = format!("{label}/{}/{range_m:.1}m", filter.label());
                report.push(Check::db(format!("pslr/{tag}"), point.pslr_db_emp, point.pslr_db_ana, tol));
                report.push(Check::db(format!("islr/{tag}"), point.islr_db_emp, point.islr_db_ana, tol));
                table.push(vec![
                    range_m.into(),
                    filter.label().into(),
                    label.clone().into(),
                    point.pslr_db_emp.into(),
                    point.pslr_db_ana.into(),
                    point.islr_db_emp.into(),
                    point.islr_db_ana.into(),
                ]);
                points.push(point);
            }
        }
    }

    let crossovers = crossovers(campaign, &points);
    if !campaign.constellation.is_constant_modulus() {
        let modes: Vec<&str> = crossovers.iter().map(|(m, _)| m.as_str()).collect();
        report.push(
            Check::condition("crossover", !crossovers.is_empty())
                .with_note(format!("RF/MF PSLR ordering flips under: {modes:?}")),
        );
    }
    push_prefix_ordering(campaign, &points, &mut report);
    report.summary = json!({
        "crossovers": crossovers
            .iter()
            .map(|(m, r)| json!({ "cp_mode": m, "between_m": r }))
            .collect::<Vec<_>>(),
    });
    Ok((
        Outcome {
            name: "pslr_islr",
            table,
            report,
        },
        points,
    ))
}

fn find<'a>(points: &'a [SweepPoint], range_m: f64, cp: &str, filter: &str) -> Option<&'a SweepPoint> {
    points
        .iter()
        .find(|p| p.range_m == range_m && p.cp_mode == cp && p.filter == filter)
}

/// Per prefix mode, the consecutive ranges between which the empirical
/// RF-minus-MF PSLR changes sign.
pub fn crossovers(campaign: &Campaign, points: &[SweepPoint]) -> Vec<(String, [f64; 2])> {
    let mut out = Vec::new();
    for cp in &campaign.cp_modes {
        let label = cp.label();
        let diffs: Vec<(f64, f64)> = campaign
            .sweep
            .ranges_m
            .iter()
            .filter_map(|&r| {
                let rf = find(points, r, &label, Filter::Reciprocal.label())?;
                let mf = find(points, r, &label, Filter::Matched.label())?;
                Some((r, rf.pslr_db_emp - mf.pslr_db_emp))
            })
            .collect();
        if let Some(w) = diffs.windows(2).find(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0)) {
            out.push((label, [w[0].0, w[1].0]));
        }
    }
    out
}

/// Normal-prefix metrics must exceed long-prefix metrics at every swept
/// range beyond the normal prefix's interference-free reach.
fn push_prefix_ordering(campaign: &Campaign, points: &[SweepPoint], report: &mut Report) {
    let has = |m: CpMode| campaign.cp_modes.contains(&m);
    if !(has(CpMode::NORMAL) && has(CpMode::LONG)) {
        return;
    }
    let Ok(normal) = CpMode::NORMAL.apply(&campaign.params) else {
        return;
    };
    let reach = normal.max_isi_free_range();
    for &r in campaign.sweep.ranges_m.iter().filter(|&&r| r > reach) {
        for filter in Filter::BOTH {
            let f = filter.label();
            if let (Some(n), Some(l)) = (find(points, r, "normal", f), find(points, r, "long", f)) {
                report.push(Check::condition(
                    format!("normal_above_long/{f}/{r:.1}m"),
                    n.pslr_db_emp > l.pslr_db_emp && n.islr_db_emp > l.islr_db_emp,
                ));
            }
        }
    }
}
