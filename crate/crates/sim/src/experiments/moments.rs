//! Empirical interference powers, floors and mainlobes against their
//! closed forms. Uses the frequency-domain echo model so the ISI and ICI
//! components can be measured separately.

use anyhow::Result;
use isac_core::analytics::predict_moment;
use isac_core::channel::{echo_frequency_domain, interference_powers};
use isac_core::rdm::{range_doppler_map, Filter};
use isac_core::rng::trial_rng;
use isac_core::to_db;
use isac_core::waveform::Frame;
use serde_json::json;

use super::{add_into, cp_params, engine_for, metadata, scenario, Outcome};
use crate::config::Campaign;
use crate::export::Table;
use crate::montecarlo::Runner;
use crate::report::{Check, Report};

/// Relative tolerance on powers, floors and mainlobes at the reference
/// trial count.
pub const POWER_TOLERANCE: f64 = 0.03;
/// Relative tolerance on the RF/MF floor ratio.
pub const RATIO_TOLERANCE: f64 = 0.05;
/// Largest per-bin RF/MF difference, relative to the map peak, treated as
/// identical for constant-modulus alphabets.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

struct Sums {
    isi: f64,
    ici: f64,
    maps: [Vec<f64>; 2],
    /// max over trials of max|χ_RF − χ_MF| / max|χ_MF|.
    rf_mf_gap: f64,
}

pub fn run(campaign: &Campaign, runner: &Runner) -> Result<Outcome> {
    let c = &campaign.constellation;
    let mut report = Report::new("moment_validation", metadata(campaign));
    let mut table = Table::new(&["cp_mode", "quantity", "empirical", "analytic", "relative_error"]);
    let power_tol = campaign.tolerance(POWER_TOLERANCE);
    let ratio_tol = campaign.tolerance(RATIO_TOLERANCE);

    for cp in &campaign.cp_modes {
        let (params, label) = cp_params(campaign, cp)?;
        let sc = scenario(&params, &campaign.targets)?;
        let engine = engine_for(&params);
        let (n, bins) = (params.n_subcarriers, params.grid_bins());
        let sums = runner.run(
            campaign.trials,
            || Sums {
                isi: 0.0,
                ici: 0.0,
                maps: [vec![0.0; bins], vec![0.0; bins]],
                rf_mf_gap: 0.0,
            },
            |acc, t| {
                let mut rng = trial_rng(campaign.seed, t);
                let frame = Frame::draw(c, &params, campaign.predecessor, &mut rng);
                let echo = echo_frequency_domain(&frame, &sc, true, &mut rng)?;
                let parts = echo.components.as_ref().expect("frequency-domain echo carries components");
                acc.isi += parts.isi.energy();
                acc.ici += parts.ici.energy();
                let rf = range_doppler_map(&echo.y, &frame.symbols, Filter::Reciprocal, &engine)?;
                let mf = range_doppler_map(&echo.y, &frame.symbols, Filter::Matched, &engine)?;
                for (sum, rdm) in acc.maps.iter_mut().zip([&rf, &mf]) {
                    for (s, v) in sum.iter_mut().zip(rdm.values.as_slice()) {
                        *s += v.norm_sqr();
                    }
                }
                let peak = mf.values.as_slice().iter().map(|v| v.norm()).fold(0.0, f64::max);
                if peak > 0.0 {
                    acc.rf_mf_gap = acc.rf_mf_gap.max(rf.values.max_abs_diff(&mf.values) / peak);
                }
                Ok(())
            },
            |total, part| {
                total.isi += part.isi;
                total.ici += part.ici;
                for (t, p) in total.maps.iter_mut().zip(&part.maps) {
                    add_into(t, p);
                }
                total.rf_mf_gap = total.rf_mf_gap.max(part.rf_mf_gap);
            },
        )?;

        let k = 1.0 / campaign.trials as f64;
        let per_bin = k / bins as f64;
        let mut record = |report: &mut Report, quantity: String, emp: f64, ana: f64, tol: f64| {
            let check = Check::relative(format!("{quantity}/{label}"), emp, ana, tol);
            table.push(vec![
                label.clone().into(),
                quantity.into(),
                emp.into(),
                ana.into(),
                check.error.unwrap_or(f64::NAN).into(),
            ]);
            report.push(check);
        };

        let expect = interference_powers(&sc.targets);
        record(&mut report, "p_isi".into(), sums.isi * per_bin, expect.isi, power_tol);
        record(&mut report, "p_ici".into(), sums.ici * per_bin, expect.ici, power_tol);

        let mainlobe = sc.mainlobe_bins();
        let mut floors = [0.0; 2];
        let mut predicted = [0.0; 2];
        for (i, filter) in Filter::BOTH.into_iter().enumerate() {
            let pred = predict_moment(&sc, c, filter);
            let map = &sums.maps[i];
            let (mut sum, mut count) = (0.0, 0usize);
            for (j, v) in map.iter().enumerate() {
                if !mainlobe.contains(&(j % n, j / n)) {
                    sum += v;
                    count += 1;
                }
            }
            floors[i] = sum * k / count as f64;
            predicted[i] = pred.sidelobe_floor;
            let f = filter.label();
            record(&mut report, format!("floor/{f}"), floors[i], pred.sidelobe_floor, power_tol);
            for (t, ana) in sc.targets.iter().zip(&pred.mainlobe) {
                if sc.targets.iter().filter(|u| (u.l, u.nu) == (t.l, t.nu)).count() == 1 {
                    let emp = map[t.nu * n + t.l] * k;
                    record(&mut report, format!("mainlobe/{f}/l{}_nu{}", t.l, t.nu), emp, *ana, power_tol);
                }
            }
        }
        record(
            &mut report,
            "floor_ratio_rf_over_mf".into(),
            floors[0] / floors[1],
            predicted[0] / predicted[1],
            ratio_tol,
        );
        if c.is_constant_modulus() {
            report.push(
                Check::absolute(format!("rf_equals_mf/{label}"), sums.rf_mf_gap, 0.0, IDENTITY_TOLERANCE)
                    .with_note("max per-bin |RF − MF| over the map peak"),
            );
        }
        report.summary[label.as_str()] = json!({
            "floor_db": { "rf": to_db(floors[0]), "mf": to_db(floors[1]) },
            "floor_db_predicted": { "rf": to_db(predicted[0]), "mf": to_db(predicted[1]) },
            "rf_mf_gap": sums.rf_mf_gap,
        });
    }
    Ok(Outcome {
        name: "moments",
        table,
        report,
    })
}
