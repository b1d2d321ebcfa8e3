//! Closed-form second moments and sidelobe ratios of range-Doppler maps.
//!
//! Sidelobe bins are modelled as i.i.d. exponentials with a common mean (the
//! floor). Under reciprocal filtering the floor is ξ_s·σ²_IN; under matched
//! filtering it is (μ₄ − 1)·Σ|α̃|² + σ²_IN, the first term being leakage of
//! every target through the random symbol moduli. Here σ²_IN = P_ISI + P_ICI
//! + σ² and α̃ is the prefix-attenuated amplitude.
//!
//! The floors assume E{s²} = 0, which holds for every alphabet except BPSK.

use alloc::vec::Vec;

use crate::constellation::Constellation;
use crate::rdm::{dirichlet, Filter};
use crate::scenario::Scenario;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentPrediction {
    pub filter: Filter,
    /// E{|χ(l_q, ν_q)|²} per target, in scenario order.
    pub mainlobe: Vec<f64>,
    /// E{|χ(l, ν)|²} at every bin away from the targets.
    pub sidelobe_floor: f64,
    pub xi_s: f64,
    pub mu4: f64,
    pub sigma_in: f64,
}

pub fn predict_moment(scenario: &Scenario, constellation: &Constellation, filter: Filter) -> MomentPrediction {
    let mn = scenario.params.grid_bins() as f64;
    let xi_s = constellation.xi_s();
    let mu4 = constellation.mu4();
    let sigma_in = scenario.sigma_in();
    let floor = match filter {
        Filter::Reciprocal => xi_s * sigma_in,
        Filter::Matched => {
            let iti: f64 = scenario.targets.iter().map(|t| t.alpha_tilde.norm_sqr()).sum();
            (mu4 - 1.0) * iti + sigma_in
        }
    };
    MomentPrediction {
        filter,
        mainlobe: scenario
            .targets
            .iter()
            .map(|t| mn * t.alpha_tilde.norm_sqr() + floor)
            .collect(),
        sidelobe_floor: floor,
        xi_s,
        mu4,
        sigma_in,
    }
}

pub fn predict_moment_rf(scenario: &Scenario, constellation: &Constellation) -> MomentPrediction {
    predict_moment(scenario, constellation, Filter::Reciprocal)
}

pub fn predict_moment_mf(scenario: &Scenario, constellation: &Constellation) -> MomentPrediction {
    predict_moment(scenario, constellation, Filter::Matched)
}

/// Expected |χ(l, ν)|² at an arbitrary bin: the Dirichlet-shaped target
/// responses plus the floor. On the grid this reduces to `mainlobe` at the
/// target bins and `sidelobe_floor` elsewhere.
pub fn expected_power(prediction: &MomentPrediction, scenario: &Scenario, l: f64, nu: f64) -> f64 {
    let p = &scenario.params;
    let mn = p.grid_bins() as f64;
    let targets: f64 = scenario
        .targets
        .iter()
        .map(|t| {
            t.alpha_tilde.norm_sqr() / mn
                * dirichlet(p.n_subcarriers, l - t.l as f64).norm_sqr()
                * dirichlet(p.n_symbols, nu - t.nu as f64).norm_sqr()
        })
        .sum();
    targets + prediction.sidelobe_floor
}

/// H_k = Σ_{q=1}^{k} 1/q, summed smallest term first.
pub fn harmonic_number(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::HarmonicOrder);
    }
    Ok((1..=k).rev().map(|q| 1.0 / q as f64).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidelobeMetrics {
    pub filter: Filter,
    /// Peak sidelobe level ratio per target.
    pub pslr: Vec<f64>,
    /// Integrated sidelobe level ratio per target.
    pub islr: Vec<f64>,
    pub expected_peak_sl: f64,
    pub expected_int_sl: f64,
    /// H_{MN−Q}.
    pub harmonic: f64,
    pub sidelobe_bins: usize,
    pub moments: MomentPrediction,
}

/// PSLR = H_{MN−Q}·floor / mainlobe and ISLR = (MN − Q)·floor / mainlobe,
/// with Q the number of distinct target bins.
pub fn predict_sidelobe_metrics(
    scenario: &Scenario,
    constellation: &Constellation,
    filter: Filter,
) -> Result<SidelobeMetrics> {
    let bins = scenario.params.grid_bins();
    let q = scenario.mainlobe_bins().len();
    if q >= bins {
        return Err(Error::NoSidelobes { targets: q, bins });
    }
    let sidelobe_bins = bins - q;
    let harmonic = harmonic_number(sidelobe_bins)?;
    let moments = predict_moment(scenario, constellation, filter);
    let peak = harmonic * moments.sidelobe_floor;
    let integrated = sidelobe_bins as f64 * moments.sidelobe_floor;
    Ok(SidelobeMetrics {
        filter,
        pslr: moments.mainlobe.iter().map(|m| peak / m).collect(),
        islr: moments.mainlobe.iter().map(|m| integrated / m).collect(),
        expected_peak_sl: peak,
        expected_int_sl: integrated,
        harmonic,
        sidelobe_bins,
        moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{GridTarget, SystemParams, Target};
    use crate::Complex64;
    use alloc::vec;

    fn params() -> SystemParams {
        SystemParams::default()
    }

    fn scenario(targets: Vec<GridTarget>, noise: f64) -> Scenario {
        Scenario::from_grid_targets(params(), targets, noise).unwrap()
    }

    fn unit(l: usize, nu: usize, amp: f64) -> GridTarget {
        GridTarget::from_bins(&params(), l, nu, Complex64::new(amp, 0.0)).unwrap()
    }

    #[test]
    fn reciprocal_moments() {
        let qpsk = Constellation::psk(4).unwrap();
        let sc = scenario(vec![unit(10, 3, 1.0)], 1.0);
        let p = predict_moment_rf(&sc, &qpsk);
        assert_eq!(p.mainlobe, vec![32769.0]);
        assert_eq!(p.sidelobe_floor, 1.0);

        let q1024 = Constellation::qam(1024).unwrap();
        let p = predict_moment_rf(&sc, &q1024);
        assert!((p.sidelobe_floor - 4.171_559_700_7).abs() < 1e-9);

        let sc = scenario(vec![unit(50, 0, 1.0)], 0.0);
        let p = predict_moment_rf(&sc, &qpsk);
        assert!((p.mainlobe[0] - (32768.0 * 0.875f64.powi(2) + 0.234375)).abs() < 1e-9);
    }

    #[test]
    fn matched_moments() {
        let qpsk = Constellation::psk(4).unwrap();
        let sc = scenario(vec![unit(60, 3, 1.0), unit(5, 1, 2.0)], 0.7);
        assert_eq!(predict_moment_mf(&sc, &qpsk).sidelobe_floor, sc.sigma_in());

        let q16 = Constellation::qam(16).unwrap();
        let sc = scenario(vec![unit(4, 0, 1.0)], 0.0);
        let p = predict_moment_mf(&sc, &q16);
        assert!((p.sidelobe_floor - 0.32).abs() < 1e-12);
        assert!((p.mainlobe[0] - (32768.0 + 0.32)).abs() < 1e-9);

        let q1024 = Constellation::qam(1024).unwrap();
        let sc = scenario(vec![unit(4, 0, 1.0), unit(9, 2, 2.0)], 0.5);
        let p = predict_moment_mf(&sc, &q1024);
        assert!((p.sidelobe_floor - (0.3989 * 5.0 + 0.5)).abs() < 5e-3);
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic_number(1).unwrap(), 1.0);
        assert!((harmonic_number(4).unwrap() - 25.0 / 12.0).abs() < 1e-15);
        let h = harmonic_number(32766).unwrap();
        assert!((h - 10.9744).abs() < 1e-3);
        assert!((h - ((32766f64).ln() + 0.577_215_664_9)).abs() < 1e-4);
        assert_eq!(harmonic_number(0), Err(Error::HarmonicOrder));
    }

    #[test]
    fn psk_filters_are_equivalent() {
        let qpsk = Constellation::psk(4).unwrap();
        let targets = grid(&[(500.0, 10.0, 1.0), (100.0, 0.0, 10.0), (60.0, 30.0, 0.1)]);
        let sc = Scenario::new(params(), &targets).unwrap();
        let rf = predict_sidelobe_metrics(&sc, &qpsk, Filter::Reciprocal).unwrap();
        let mf = predict_sidelobe_metrics(&sc, &qpsk, Filter::Matched).unwrap();
        assert_eq!(rf.pslr, mf.pslr);
        assert_eq!(rf.islr, mf.islr);
    }

    fn grid(spec: &[(f64, f64, f64)]) -> Vec<Target> {
        spec.iter().map(|&(r, v, rcs)| Target::new(r, v, rcs)).collect()
    }

    #[test]
    fn single_target_pslr() {
        let qpsk = Constellation::psk(4).unwrap();
        let sc = scenario(vec![unit(3, 0, 1.0)], 1.0);
        let m = predict_sidelobe_metrics(&sc, &qpsk, Filter::Reciprocal).unwrap();
        let h = harmonic_number(32767).unwrap();
        assert!((m.pslr[0] - h / 32769.0).abs() < 1e-15);
        assert_eq!(m.sidelobe_bins, 32767);
        assert!((m.islr[0] / m.pslr[0] - 32767.0 / h).abs() < 1e-9);
    }

    #[test]
    fn reciprocal_wins_near_and_loses_far() {
        let q1024 = Constellation::qam(1024).unwrap();
        let p = params().with_cp(256);
        let ratio = |range: f64| {
            let sc = Scenario::new(p.clone(), &[Target::new(range, 0.0, crate::from_db(5.0))]).unwrap();
            let rf = predict_sidelobe_metrics(&sc, &q1024, Filter::Reciprocal).unwrap();
            let mf = predict_sidelobe_metrics(&sc, &q1024, Filter::Matched).unwrap();
            rf.pslr[0] / mf.pslr[0]
        };
        assert!(ratio(100.0) < 1.0);
        assert!(ratio(1200.0) > 1.0);
    }

    #[test]
    fn expected_power_matches_moments_on_grid() {
        let q = Constellation::qam(256).unwrap();
        let sc = scenario(vec![unit(40, 3, 1.0), unit(7, 100, 0.5)], 0.2);
        for filter in Filter::BOTH {
            let m = predict_moment(&sc, &q, filter);
            assert!((expected_power(&m, &sc, 40.0, 3.0) / m.mainlobe[0] - 1.0).abs() < 1e-12);
            assert!((expected_power(&m, &sc, 7.0, 100.0) / m.mainlobe[1] - 1.0).abs() < 1e-12);
            assert!((expected_power(&m, &sc, 41.0, 3.0) / m.sidelobe_floor - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn no_room_for_sidelobes() {
        let tiny = SystemParams {
            n_subcarriers: 1,
            n_symbols: 1,
            n_cp: 0,
            ..params()
        };
        let t = GridTarget::from_bins(&tiny, 0, 0, Complex64::new(1.0, 0.0)).unwrap();
        let sc = Scenario::from_grid_targets(tiny, vec![t], 1.0).unwrap();
        assert!(predict_sidelobe_metrics(&sc, &Constellation::psk(4).unwrap(), Filter::Matched).is_err());
    }
}
