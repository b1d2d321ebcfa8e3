//! Bin-level target estimation and RMSE scoring.

use alloc::vec::Vec;


use crate::rdm::Rdm;
use crate::scenario::SystemParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub l_hat: usize,
    pub nu_hat: usize,
    pub range_m: f64,
    pub velocity_mps: f64,
}

impl Estimate {
    pub fn from_bins(params: &SystemParams, l_hat: usize, nu_hat: usize) -> Self {
        Self {
            l_hat,
            nu_hat,
            range_m: l_hat as f64 * params.range_resolution(),
            velocity_mps: nu_hat as f64 * params.velocity_resolution(),
        }
    }
}

/// The `count` strongest bins, strongest first. Ties go to the lower delay
/// bin, then the lower Doppler bin.
pub fn detect_peaks(rdm: &Rdm, count: usize, params: &SystemParams) -> Result<Vec<Estimate>> {
    let bins = rdm.values.len();
    if count == 0 || count > bins {
        return Err(Error::PeakCount { count, bins });
    }
    let n = rdm.n_delay();
    let powers: Vec<f64> = rdm.values.as_slice().iter().map(|z| z.norm_sqr()).collect();
    // storage is ν-major, so order candidates by (l, ν) explicitly
    let key = |i: usize| (i % n, i / n);
    let better = |a: usize, b: usize| powers[a] > powers[b] || (powers[a] == powers[b] && key(a) < key(b));

    let picked: Vec<usize> = if count == 1 {
        let mut best = 0;
        for i in 1..bins {
            if better(i, best) {
                best = i;
            }
        }
        alloc::vec![best]
    } else {
        let mut idx: Vec<usize> = (0..bins).collect();
        idx.sort_by(|&a, &b| {
            powers[b]
                .partial_cmp(&powers[a])
                .unwrap_or(core::cmp::Ordering::Equal)
                .then_with(|| key(a).cmp(&key(b)))
        });
        idx.truncate(count);
        idx
    };
    Ok(picked
        .into_iter()
        .map(|i| {
            let (l, nu) = key(i);
            Estimate::from_bins(params, l, nu)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rmse {
    pub range_m: f64,
    pub velocity_mps: f64,
}

/// Root mean squared range and velocity error over trials; every trial
/// counts, including gross mis-detections.
pub fn rmse(truth: &[Estimate], estimates: &[Estimate]) -> Result<Rmse> {
    if truth.len() != estimates.len() {
        return Err(Error::TrialCountMismatch {
            truth: truth.len(),
            estimates: estimates.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyTrials);
    }
    let n = truth.len() as f64;
    let (sr, sv) = truth.iter().zip(estimates).fold((0.0, 0.0), |(sr, sv), (t, e)| {
        (
            sr + (e.range_m - t.range_m).powi(2),
            sv + (e.velocity_mps - t.velocity_mps).powi(2),
        )
    });
    Ok(Rmse {
        range_m: (sr / n).sqrt(),
        velocity_mps: (sv / n).sqrt(),
    })
}
