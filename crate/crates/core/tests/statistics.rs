//! Monte Carlo checks of the interference and sidelobe models.

use isac_core::analytics::{harmonic_number, predict_moment};
use isac_core::channel::{echo_frequency_domain, interference_powers, received_grid, EchoModel};
use isac_core::constellation::Constellation;
use isac_core::dft::DirectDft;
use isac_core::rdm::{range_doppler_map, sidelobe_stats, Filter};
use isac_core::rng::trial_rng;
use isac_core::scenario::{GridTarget, Scenario, SystemParams};
use isac_core::waveform::{Frame, Predecessor};
use isac_core::Complex64;

fn params(n: usize, m: usize, n_cp: usize) -> SystemParams {
    SystemParams {
        n_subcarriers: n,
        n_symbols: m,
        n_cp,
        ..SystemParams::default()
    }
}

#[test]
fn isi_and_ici_variances_follow_overrun() {
    let p = params(256, 128, 18);
    let c = Constellation::qam(1024).unwrap();
    let t = GridTarget::from_bins(&p, 120, 9, Complex64::new(0.6, 0.8)).unwrap();
    let sc = Scenario::from_grid_targets(p.clone(), vec![t], 0.0).unwrap();
    let mut rng = trial_rng(21, 0);
    let frame = Frame::draw(&c, &p, Predecessor::WarmUp, &mut rng);
    let e = echo_frequency_domain(&frame, &sc, false, &mut rng).unwrap();
    let comp = e.components.unwrap();
    let bins = comp.isi.len() as f64;
    let expect = interference_powers(&sc.targets);
    let isi = comp.isi.energy() / bins;
    let ici = comp.ici.energy() / bins;
    assert!((isi / expect.isi - 1.0).abs() < 0.03, "ISI {isi} vs {}", expect.isi);
    assert!((ici / expect.ici - 1.0).abs() < 0.03, "ICI {ici} vs {}", expect.ici);
}

#[test]
fn interference_plus_noise_looks_circular_gaussian() {
    let p = params(128, 64, 9);
    let c = Constellation::qam(256).unwrap();
    let targets = vec![
        GridTarget::from_bins(&p, 70, 3, Complex64::new(1.0, 0.0)).unwrap(),
        GridTarget::from_bins(&p, 100, 40, Complex64::new(0.0, 0.7)).unwrap(),
    ];
    let sc = Scenario::from_grid_targets(p.clone(), targets, 0.05).unwrap();
    let (mut rr, mut ii, mut ri, mut count) = (0.0, 0.0, 0.0, 0.0);
    for trial in 0..2 {
        let mut rng = trial_rng(22, trial);
        let frame = Frame::draw(&c, &p, Predecessor::WarmUp, &mut rng);
        let e = echo_frequency_domain(&frame, &sc, true, &mut rng).unwrap();
        let comp = e.components.unwrap();
        for i in 0..e.y.len() {
            let z = comp.isi.as_slice()[i] - comp.ici.as_slice()[i] + comp.noise.as_slice()[i];
            rr += z.re * z.re;
            ii += z.im * z.im;
            ri += z.re * z.im;
            count += 1.0;
        }
    }
    assert!((rr / ii - 1.0).abs() < 0.03, "re/im variance ratio {}", rr / ii);
    let corr = ri / (rr * ii).sqrt();
    assert!(corr.abs() < 0.02, "correlation {corr}");
    let expect = sc.sigma_in();
    assert!(((rr + ii) / count / expect - 1.0).abs() < 0.03);
}

#[test]
fn matched_peak_includes_fourth_moment_leakage() {
    let p = params(32, 16, 32);
    let c = Constellation::qam(1024).unwrap();
    let t = GridTarget::from_bins(&p, 7, 5, Complex64::new(1.0, 0.0)).unwrap();
    let sc = Scenario::from_grid_targets(p.clone(), vec![t], 0.0).unwrap();
    let trials = 400;
    let mut peak = 0.0;
    for trial in 0..trials {
        let mut rng = trial_rng(23, trial);
        let frame = Frame::draw(&c, &p, Predecessor::WarmUp, &mut rng);
        let y = received_grid(&frame, &sc, EchoModel::TimeDomain, false, &mut rng, &DirectDft).unwrap().y;
        peak += range_doppler_map(&y, &frame.symbols, Filter::Matched, &DirectDft).unwrap().power(7, 5);
    }
    let mean = peak / trials as f64;
    let expect = predict_moment(&sc, &c, Filter::Matched).mainlobe[0];
    assert!((expect - (512.0 + c.mu4() - 1.0)).abs() < 1e-12);
    assert!((mean / expect - 1.0).abs() < 0.02, "{mean} vs {expect}");
}

#[test]
fn noise_only_peak_follows_harmonic_number() {
    let p = params(16, 8, 4);
    let c = Constellation::psk(4).unwrap();
    let sigma2 = 2.0;
    let sc = Scenario::from_grid_targets(p.clone(), vec![], sigma2).unwrap();
    let trials = 5000;
    let mut peak = 0.0;
    for trial in 0..trials {
        let mut rng = trial_rng(24, trial);
        let frame = Frame::draw(&c, &p, Predecessor::WarmUp, &mut rng);
        let y = received_grid(&frame, &sc, EchoModel::FrequencyDomain, true, &mut rng, &DirectDft).unwrap().y;
        let rdm = range_doppler_map(&y, &frame.symbols, Filter::Reciprocal, &DirectDft).unwrap();
        peak += sidelobe_stats(&rdm).unwrap().peak_sidelobe;
    }
    let mean = peak / trials as f64;
    let expect = harmonic_number(128).unwrap() * sigma2;
    assert!((mean / expect - 1.0).abs() < 0.02, "{mean} vs {expect}");
}
