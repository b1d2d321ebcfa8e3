//! Closed-form levels for the configured scene; no simulation.

use anyhow::Result;
use isac_core::analytics::predict_sidelobe_metrics;
use isac_core::rdm::Filter;
use isac_core::to_db;

use super::{cp_params, scenario};
use crate::config::Campaign;
use crate::export::{Cell, Table};

pub fn run(campaign: &Campaign) -> Result<Table> {
    let mut table = Table::new(&[
        "cp_mode",
        "filter",
        "range_m",
        "l",
        "nu",
        "rho",
        "beyond_cp",
        "alpha_sq_db",
        "mainlobe_db",
        "floor_db",
        "pslr_db",
        "islr_db",
    ]);
    for cp in &campaign.cp_modes {
        let (params, label) = cp_params(campaign, cp)?;
        let sc = scenario(&params, &campaign.targets)?;
        for filter in Filter::BOTH {
            let m = predict_sidelobe_metrics(&sc, &campaign.constellation, filter)?;
            for (i, t) in sc.targets.iter().enumerate() {
                table.push(vec![
                    label.clone().into(),
                    filter.label().into(),
                    t.range_m(&params).into(),
                    t.l.into(),
                    t.nu.into(),
                    t.rho.into(),
                    t.beyond_cp.into(),
                    to_db(t.alpha.norm_sqr()).into(),
                    to_db(m.moments.mainlobe[i]).into(),
                    to_db(m.moments.sidelobe_floor).into(),
                    to_db(m.pslr[i]).into(),
                    to_db(m.islr[i]).into(),
                ]);
            }
        }
    }
    Ok(table)
}

/// Fixed-width text rendering for the terminal.
pub fn render(table: &Table) -> String {
    let cells: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Cell::Text(s) => s.clone(),
                    Cell::Int(v) => v.to_string(),
                    Cell::Num(v) => format!("{v:.2}"),
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, h)| cells.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, items: Vec<&str>| {
        let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut out, table.columns.clone());
    for row in &cells {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}
