//! System parameters, the radar equation and on-grid targets.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;


use crate::{Complex64, Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// OFDM frame and radio front-end parameters. Gains and noise figure are
/// linear here; decibel inputs are converted at the configuration layer.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub carrier_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    /// Cyclic prefix length in samples.
    pub n_cp: usize,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub noise_figure: f64,
    pub temperature_k: f64,
    pub speed_of_light: f64,
}

impl Default for SystemParams {
    /// 28 GHz, 120 kHz spacing, 256 × 128 grid, 18-sample prefix, 25.8 dBi
    /// antennas, 3 dB noise figure at 290 K.
    fn default() -> Self {
        Self {
            carrier_hz: 28e9,
            subcarrier_spacing_hz: 120e3,
            n_subcarriers: 256,
            n_symbols: 128,
            n_cp: 18,
            tx_gain: crate::from_db(25.8),
            rx_gain: crate::from_db(25.8),
            noise_figure: crate::from_db(3.0),
            temperature_k: 290.0,
            speed_of_light: SPEED_OF_LIGHT,
        }
    }
}

impl SystemParams {
    /// The 5G NR normal prefix ratio (144/2048) applied to `n_subcarriers`.
    pub fn normal_cp_samples(n_subcarriers: usize) -> usize {
        (n_subcarriers as f64 * 9.0 / 128.0).round() as usize
    }

    pub fn with_cp(mut self, n_cp: usize) -> Self {
        self.n_cp = n_cp;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidParams(msg));
        if self.n_subcarriers == 0 || self.n_symbols == 0 {
            return bad(format!(
                "grid must be non-empty, got {}x{}",
                self.n_subcarriers, self.n_symbols
            ));
        }
        if self.n_cp > self.n_subcarriers {
            return bad(format!(
                "cyclic prefix of {} samples exceeds the {}-sample symbol",
                self.n_cp, self.n_subcarriers
            ));
        }
        for (name, v) in [
            ("carrier frequency", self.carrier_hz),
            ("subcarrier spacing", self.subcarrier_spacing_hz),
            ("tx gain", self.tx_gain),
            ("rx gain", self.rx_gain),
            ("noise figure", self.noise_figure),
            ("temperature", self.temperature_k),
            ("speed of light", self.speed_of_light),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }

    /// T = 1/Δf.
    pub fn symbol_duration(&self) -> f64 {
        1.0 / self.subcarrier_spacing_hz
    }

    /// T_sam = T/N.
    pub fn sample_interval(&self) -> f64 {
        self.symbol_duration() / self.n_subcarriers as f64
    }

    /// B = N·Δf.
    pub fn bandwidth(&self) -> f64 {
        self.n_subcarriers as f64 * self.subcarrier_spacing_hz
    }

    /// N_s = N + N_cp.
    pub fn samples_per_symbol(&self) -> usize {
        self.n_subcarriers + self.n_cp
    }

    /// T_s = N_s·T_sam.
    pub fn block_duration(&self) -> f64 {
        self.samples_per_symbol() as f64 * self.sample_interval()
    }

    pub fn cp_duration(&self) -> f64 {
        self.n_cp as f64 * self.sample_interval()
    }

    /// T_obs = M·T_s.
    pub fn observation_time(&self) -> f64 {
        self.n_symbols as f64 * self.block_duration()
    }

    /// MN.
    pub fn grid_bins(&self) -> usize {
        self.n_subcarriers * self.n_symbols
    }

    pub fn wavelength(&self) -> f64 {
        self.speed_of_light / self.carrier_hz
    }

    /// Range spanned by one delay bin, c0/(2B).
    pub fn range_resolution(&self) -> f64 {
        self.speed_of_light / (2.0 * self.bandwidth())
    }

    /// Velocity spanned by one Doppler bin, c0/(2 f_c T_obs).
    pub fn velocity_resolution(&self) -> f64 {
        self.speed_of_light / (2.0 * self.carrier_hz * self.observation_time())
    }

    pub fn unambiguous_range(&self) -> f64 {
        self.n_subcarriers as f64 * self.range_resolution()
    }

    pub fn unambiguous_velocity(&self) -> f64 {
        self.n_symbols as f64 * self.velocity_resolution()
    }

    /// Largest range whose echo still fits inside the prefix, c0·N_cp·T_sam/2.
    pub fn max_isi_free_range(&self) -> f64 {
        self.speed_of_light * self.n_cp as f64 * self.sample_interval() / 2.0
    }

    /// Receiver noise power F·k·B·T_temp in watts.
    pub fn noise_power(&self) -> f64 {
        self.noise_figure * BOLTZMANN * self.bandwidth() * self.temperature_k
    }
}

/// A point target in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub range_m: f64,
    pub velocity_mps: f64,
    /// Radar cross section in m².
    pub rcs_m2: f64,
    /// Reflection phase in radians; zero unless configured.
    pub phase_rad: f64,
}

impl Target {
    pub fn new(range_m: f64, velocity_mps: f64, rcs_m2: f64) -> Self {
        Self {
            range_m,
            velocity_mps,
            rcs_m2,
            phase_rad: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range_m.is_finite() && self.range_m > 0.0) {
            return Err(Error::InvalidTarget(format!(
                "range must be positive, got {} m",
                self.range_m
            )));
        }
        if !(self.rcs_m2.is_finite() && self.rcs_m2 > 0.0) {
            return Err(Error::InvalidTarget(format!(
                "RCS must be positive, got {} m^2",
                self.rcs_m2
            )));
        }
        if !self.velocity_mps.is_finite() || !self.phase_rad.is_finite() {
            return Err(Error::InvalidTarget("velocity and phase must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Echo amplitude α (√W).
    pub alpha: f64,
    /// Round-trip delay in seconds.
    pub tau_s: f64,
    pub doppler_hz: f64,
}

/// Free-space monostatic radar equation.
pub fn link_budget(params: &SystemParams, target: &Target) -> LinkBudget {
    let c0 = params.speed_of_light;
    let r = target.range_m;
    let alpha = (target.rcs_m2 * c0 * c0 * params.tx_gain * params.rx_gain
        / ((4.0 * PI).powi(3) * r.powi(4) * params.carrier_hz.powi(2)))
    .sqrt();
    LinkBudget {
        alpha,
        tau_s: 2.0 * r / c0,
        doppler_hz: 2.0 * target.velocity_mps * params.carrier_hz / c0,
    }
}

pub fn noise_power(params: &SystemParams) -> f64 {
    params.noise_power()
}

pub fn max_isi_free_range(params: &SystemParams) -> f64 {
    params.max_isi_free_range()
}

/// Rounds a delay and Doppler shift to the (l, ν) bin grid.
///
/// The window is `0 ≤ τ < N·T_sam` and `0 ≤ f_d < M/T_obs`; bins that
/// round up to `N` or `M` wrap to zero.
pub fn snap_to_grid(params: &SystemParams, tau_s: f64, doppler_hz: f64) -> Result<(usize, usize)> {
    let n = params.n_subcarriers;
    let m = params.n_symbols;
    let tau_limit = n as f64 * params.sample_interval();
    if !(tau_s >= 0.0 && tau_s < tau_limit) {
        return Err(Error::DelayOutOfWindow {
            tau_s,
            limit_s: tau_limit,
        });
    }
    let t_obs = params.observation_time();
    let doppler_limit = m as f64 / t_obs;
    if !(doppler_hz >= 0.0 && doppler_hz < doppler_limit) {
        return Err(Error::DopplerOutOfWindow {
            doppler_hz,
            limit_hz: doppler_limit,
        });
    }
    let l = (tau_s * params.bandwidth()).round() as usize % n;
    let nu = (doppler_hz * t_obs).round() as usize % m;
    Ok((l, nu))
}

/// A target placed on the delay/Doppler grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTarget {
    /// Delay bin l.
    pub l: usize,
    /// Doppler bin ν.
    pub nu: usize,
    pub alpha: Complex64,
    /// Amplitude after the loss of the echo tail that misses the FFT window.
    pub alpha_tilde: Complex64,
    /// Fraction (l − N_cp)/N of the symbol that falls outside the window.
    pub rho: f64,
    pub beyond_cp: bool,
}

impl GridTarget {
    /// Builds a target directly from bins and a complex amplitude.
    pub fn from_bins(params: &SystemParams, l: usize, nu: usize, alpha: Complex64) -> Result<Self> {
        if l >= params.n_subcarriers || nu >= params.n_symbols {
            return Err(Error::InvalidTarget(format!(
                "bin ({l}, {nu}) outside the {}x{} grid",
                params.n_subcarriers, params.n_symbols
            )));
        }
        let beyond_cp = l > params.n_cp;
        let rho = if beyond_cp {
            (l - params.n_cp) as f64 / params.n_subcarriers as f64
        } else {
            0.0
        };
        Ok(Self {
            l,
            nu,
            alpha,
            alpha_tilde: alpha * (1.0 - rho),
            rho,
            beyond_cp,
        })
    }

    /// Overrun beyond the prefix in samples, l − N_cp (zero inside the prefix).
    pub fn overrun(&self, params: &SystemParams) -> usize {
        self.l.saturating_sub(params.n_cp)
    }

    pub fn delay_s(&self, params: &SystemParams) -> f64 {
        self.l as f64 / params.bandwidth()
    }

    pub fn doppler_hz(&self, params: &SystemParams) -> f64 {
        self.nu as f64 / params.observation_time()
    }

    pub fn range_m(&self, params: &SystemParams) -> f64 {
        self.l as f64 * params.range_resolution()
    }

    pub fn velocity_mps(&self, params: &SystemParams) -> f64 {
        self.nu as f64 * params.velocity_resolution()
    }
}

/// Snaps physical targets onto the grid, listing those inside the prefix
/// first and those beyond it second, each in input order.
pub fn grid_targets(params: &SystemParams, targets: &[Target]) -> Result<Vec<GridTarget>> {
    params.validate()?;
    let mut inside = Vec::new();
    let mut beyond = Vec::new();
    for t in targets {
        t.validate()?;
        let lb = link_budget(params, t);
        let (l, nu) = snap_to_grid(params, lb.tau_s, lb.doppler_hz)?;
        let g = GridTarget::from_bins(params, l, nu, Complex64::from_polar(lb.alpha, t.phase_rad))?;
        if g.beyond_cp {
            beyond.push(g);
        } else {
            inside.push(g);
        }
    }
    inside.extend(beyond);
    Ok(inside)
}

/// A complete sensing scenario: parameters, on-grid targets and the noise
/// power injected per sample (equivalently per frequency bin).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub targets: Vec<GridTarget>,
    pub noise_power: f64,
}

impl Scenario {
    /// Snaps `targets` and takes the thermal noise power from `params`.
    pub fn new(params: SystemParams, targets: &[Target]) -> Result<Self> {
        let grid = grid_targets(&params, targets)?;
        let noise_power = params.noise_power();
        Ok(Self {
            params,
            targets: grid,
            noise_power,
        })
    }

    pub fn from_grid_targets(params: SystemParams, targets: Vec<GridTarget>, noise_power: f64) -> Result<Self> {
        params.validate()?;
        for t in &targets {
            if t.l >= params.n_subcarriers || t.nu >= params.n_symbols {
                return Err(Error::InvalidTarget(format!("bin ({}, {}) outside grid", t.l, t.nu)));
            }
        }
        Ok(Self {
            params,
            targets,
            noise_power,
        })
    }

    /// Distinct (l, ν) bins occupied by targets, in target order.
    pub fn mainlobe_bins(&self) -> Vec<(usize, usize)> {
        let mut bins: Vec<(usize, usize)> = Vec::with_capacity(self.targets.len());
        for t in &self.targets {
            if !bins.contains(&(t.l, t.nu)) {
                bins.push((t.l, t.nu));
            }
        }
        bins
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn derived_timing() {
        let p = table();
        assert_relative_eq!(p.bandwidth(), 30.72e6, max_relative = 1e-12);
        assert_eq!(p.samples_per_symbol(), 274);
        assert_relative_eq!(p.symbol_duration(), 8.3333e-6, max_relative = 1e-4);
        assert_relative_eq!(p.cp_duration(), 0.586e-6, max_relative = 1e-3);
        assert_relative_eq!(p.observation_time(), 128.0 * 274.0 / 30.72e6, max_relative = 1e-12);
        assert_eq!(SystemParams::normal_cp_samples(256), 18);
        assert!(p.validate().is_ok());
        assert!(p.clone().with_cp(257).validate().is_err());
    }

    #[test]
    fn radar_equation() {
        let p = table();
        let still = link_budget(&p, &Target::new(100.0, 0.0, 1.0));
        assert_eq!(still.doppler_hz, 0.0);

        // hand evaluation with c0 = 2.998e8, 5 dBsm, 25.8 dBi, 28 GHz
        let t = Target::new(732.4, 0.0, crate::from_db(5.0));
        let lb = link_budget(&p, &t);
        assert_relative_eq!(lb.alpha, 3.0e-7, max_relative = 0.02);

        let far = link_budget(&p, &Target::new(2.0 * 732.4, 0.0, crate::from_db(5.0)));
        assert_relative_eq!(lb.alpha / far.alpha, 4.0, max_relative = 1e-12);
        assert_relative_eq!(lb.tau_s, 2.0 * 732.4 / SPEED_OF_LIGHT, max_relative = 1e-15);
    }

    #[test]
    fn thermal_noise() {
        let p = table();
        assert_relative_eq!(noise_power(&p), 2.46e-13, max_relative = 0.01);
        let mut wide = p.clone();
        wide.subcarrier_spacing_hz *= 2.0;
        assert_relative_eq!(noise_power(&wide), 2.0 * noise_power(&p), max_relative = 1e-12);

        // kT at 290 K over 1 Hz
        let unit = SystemParams {
            n_subcarriers: 1,
            subcarrier_spacing_hz: 1.0,
            noise_figure: 1.0,
            n_cp: 0,
            ..table()
        };
        assert_relative_eq!(noise_power(&unit), 4.004e-21, max_relative = 1e-3);
    }

    #[test]
    fn snapping() {
        let p = table();
        assert_eq!(snap_to_grid(&p, 0.0, 0.0).unwrap(), (0, 0));
        let lb = link_budget(&p, &Target::new(732.4, 0.0, 1.0));
        assert_eq!(snap_to_grid(&p, lb.tau_s, 0.0).unwrap().0, 150);
        let too_far = 1.1 * 256.0 * p.sample_interval();
        assert!(matches!(
            snap_to_grid(&p, too_far, 0.0),
            Err(Error::DelayOutOfWindow { .. })
        ));
        assert!(matches!(
            snap_to_grid(&p, 0.0, -1.0),
            Err(Error::DopplerOutOfWindow { .. })
        ));
    }

    #[test]
    fn isi_free_range() {
        let p = table();
        assert!((p.max_isi_free_range() - 87.9).abs() < 0.5);
        let long = p.clone().with_cp(256);
        assert!((long.max_isi_free_range() - 1249.1).abs() < 0.1);
        assert_eq!(p.with_cp(0).max_isi_free_range(), 0.0);
    }

    #[test]
    fn prefix_boundary_and_attenuation() {
        let p = table();
        let at_cp = GridTarget::from_bins(&p, 18, 0, Complex64::new(2.0, 0.0)).unwrap();
        assert!(!at_cp.beyond_cp);
        assert_eq!(at_cp.rho, 0.0);
        assert_eq!(at_cp.alpha_tilde, at_cp.alpha);

        let beyond = GridTarget::from_bins(&p, 50, 3, Complex64::new(2.0, 0.0)).unwrap();
        assert!(beyond.beyond_cp);
        assert_eq!(beyond.rho, 0.125);
        assert_relative_eq!(beyond.alpha_tilde.norm(), 0.875 * 2.0, max_relative = 1e-15);
    }

    #[test]
    fn default_pair_overruns_normal_prefix() {
        let p = table();
        let targets = [Target::new(732.4, 15.0, 100.0), Target::new(976.5, 15.0, 100.0)];
        let g = grid_targets(&p, &targets).unwrap();
        assert!(g.iter().all(|t| t.beyond_cp));
        assert_eq!(g[0].l, 150);
        assert_eq!(g[1].l, 200);
        let long = grid_targets(&p.with_cp(256), &targets).unwrap();
        assert!(long.iter().all(|t| !t.beyond_cp));
    }

    #[test]
    fn partition_puts_prefix_targets_first() {
        let p = table();
        let targets = [
            Target::new(500.0, 0.0, 1.0),
            Target::new(50.0, 0.0, 1.0),
            Target::new(300.0, 0.0, 1.0),
            Target::new(20.0, 0.0, 1.0),
        ];
        let g = grid_targets(&p, &targets).unwrap();
        let ranges: Vec<usize> = g.iter().map(|t| t.l).collect();
        let expect: Vec<usize> = [50.0, 20.0, 500.0, 300.0]
            .iter()
            .map(|r| (2.0 * r / SPEED_OF_LIGHT * p.bandwidth()).round() as usize)
            .collect();
        assert_eq!(ranges, expect);
        assert!(!g[0].beyond_cp && !g[1].beyond_cp && g[2].beyond_cp && g[3].beyond_cp);
    }

    #[test]
    fn invalid_targets_rejected() {
        let p = table();
        assert!(grid_targets(&p, &[Target::new(-1.0, 0.0, 1.0)]).is_err());
        assert!(grid_targets(&p, &[Target::new(10.0, 0.0, 0.0)]).is_err());
        assert!(grid_targets(&p, &[Target::new(5000.0, 0.0, 1.0)]).is_err());
    }
}
