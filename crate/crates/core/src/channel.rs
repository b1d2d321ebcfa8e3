//! Multi-target echo synthesis.
//!
//! Two independent routes produce the received frequency-domain grid:
//!
//! - [`echo_time_domain`] delays the transmitted sample stream by each
//!   target's bin delay, applies a per-symbol Doppler phase, adds noise, and
//!   is then demodulated like a real receiver;
//! - [`echo_frequency_domain`] evaluates the closed-form decomposition of
//!   each subcarrier into a useful term, inter-symbol interference (ISI) from
//!   symbol m − 1 and inter-carrier interference (ICI) from the truncated
//!   window, without ever forming time samples.
//!
//! With noise off the two agree to rounding, which is what validates the
//! decomposition.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dft::{unit_phase, Dft};
use crate::grid::Grid;
use crate::rng::cscg;
use crate::scenario::{GridTarget, Scenario, SystemParams};
use crate::waveform::{demodulate, modulate_frame, Frame, TimeSignal};
use crate::{Complex64, Result};

/// The four additive parts of the received grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoComponents {
    pub free: Grid,
    pub isi: Grid,
    pub ici: Grid,
    pub noise: Grid,
}

/// Received symbols y_{n,m}, optionally with their decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoGrid {
    pub y: Grid,
    /// Present only for the frequency-domain model, where y = free + isi − ici + noise.
    pub components: Option<EchoComponents>,
}

/// Which synthesis route a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EchoModel {
    #[default]
    TimeDomain,
    FrequencyDomain,
}

/// Sample-level echo over global indices [0, M·N_s).
///
/// Each target contributes α·x[i − l]·e^{j2π m′ν/M}, where m′ is the
/// transmit symbol (−1 for the predecessor) that sample i − l belongs to.
/// Noise, when on, is CSCG with the scenario's power per sample.
pub fn echo_time_domain<R, D>(
    frame: &Frame,
    scenario: &Scenario,
    noise_on: bool,
    rng: &mut R,
    dft: &D,
) -> Result<TimeSignal>
where
    R: Rng + ?Sized,
    D: Dft + ?Sized,
{
    let p = &scenario.params;
    let tx = modulate_frame(frame, p, dft)?;
    let ns = p.samples_per_symbol() as i64;
    let m_total = p.n_symbols as i64;
    let len = (m_total * ns) as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); len];

    for t in &scenario.targets {
        let l = t.l as i64;
        for sym in -1..m_total {
            let gain = t.alpha * unit_phase(sym * t.nu as i64, p.n_symbols);
            let src_start = sym * ns;
            let dst_start = (src_start + l).max(0);
            let dst_end = (src_start + ns + l).min(len as i64);
            for dst in dst_start..dst_end {
                out[dst as usize] += gain * tx.at(dst - l);
            }
        }
    }

    if noise_on && scenario.noise_power > 0.0 {
        for z in out.iter_mut() {
            *z += cscg(rng, scenario.noise_power);
        }
    }
    Ok(TimeSignal {
        samples: out,
        start_index: 0,
    })
}

/// Closed-form free/ISI/ICI decomposition per subcarrier and symbol.
///
/// For a target with overrun d = l − N_cp > 0 the window sees the last d
/// samples of symbol m − 1 and the first N − d samples of symbol m. The
/// leakage between subcarriers n′ ≠ n follows the geometric ratio
/// (1 − e^{j2π(n′−n)d/N}) / (1 − e^{j2π(n′−n)/N}), evaluated by direct
/// summation (O(N²) per symbol and target).
pub fn echo_frequency_domain<R: Rng + ?Sized>(
    frame: &Frame,
    scenario: &Scenario,
    noise_on: bool,
    rng: &mut R,
) -> Result<EchoGrid> {
    let p = &scenario.params;
    let (n, m_total) = (p.n_subcarriers, p.n_symbols);
    frame.symbols.check_shape(n, m_total)?;
    let mut free = Grid::zeros(n, m_total);
    let mut isi = Grid::zeros(n, m_total);
    let mut ici = Grid::zeros(n, m_total);

    let mut cur = vec![Complex64::new(0.0, 0.0); n];
    let mut prev = vec![Complex64::new(0.0, 0.0); n];
    for t in &scenario.targets {
        let delay_ramp: Vec<Complex64> = (0..n).map(|k| unit_phase(-((k * t.l) as i64), n)).collect();
        let doppler = |sym: i64| unit_phase(sym * t.nu as i64, m_total);

        for m in 0..m_total {
            let phi = doppler(m as i64);
            let gain = t.alpha_tilde * phi;
            for (k, z) in free.column_mut(m).iter_mut().enumerate() {
                *z += gain * frame.symbols.get(k, m) * delay_ramp[k];
            }
        }
        if !t.beyond_cp {
            continue;
        }

        let d = t.overrun(p);
        let kernel = leakage_kernel(n, d);
        let isi_ramp: Vec<Complex64> = (0..n)
            .map(|k| unit_phase(k as i64 * (p.n_cp as i64 - t.l as i64), n))
            .collect();
        let scale = t.alpha / n as f64;
        for m in 0..m_total {
            for k in 0..n {
                cur[k] = frame.symbols.get(k, m) * delay_ramp[k];
                prev[k] = frame.symbol(k, m as i64 - 1) * isi_ramp[k];
            }
            let ici_gain = scale * doppler(m as i64);
            let isi_gain = scale * doppler(m as i64 - 1);
            let ici_col = ici.column_mut(m);
            for (k, z) in ici_col.iter_mut().enumerate() {
                *z += ici_gain * circular_leak(&cur, &kernel, k);
            }
            let isi_col = isi.column_mut(m);
            for (k, z) in isi_col.iter_mut().enumerate() {
                *z += isi_gain * (prev[k] * d as f64 + circular_leak(&prev, &kernel, k));
            }
        }
    }

    let mut noise = Grid::zeros(n, m_total);
    if noise_on && scenario.noise_power > 0.0 {
        for z in noise.as_mut_slice() {
            *z = cscg(rng, scenario.noise_power);
        }
    }

    let mut y = free.clone();
    for (i, z) in y.as_mut_slice().iter_mut().enumerate() {
        *z += isi.as_slice()[i] - ici.as_slice()[i] + noise.as_slice()[i];
    }
    Ok(EchoGrid {
        y,
        components: Some(EchoComponents { free, isi, ici, noise }),
    })
}

/// K[u] = (1 − e^{j2πud/N}) / (1 − e^{j2πu/N}) for u ≠ 0, K[0] = 0.
fn leakage_kernel(n: usize, d: usize) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    (0..n)
        .map(|u| {
            if u == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                (one - unit_phase((u * d) as i64, n)) / (one - unit_phase(u as i64, n))
            }
        })
        .collect()
}

/// Σ_{n′≠k} a[n′]·K[(n′ − k) mod N].
#[inline]
fn circular_leak(a: &[Complex64], kernel: &[Complex64], k: usize) -> Complex64 {
    let n = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (u, kv) in kernel.iter().enumerate().skip(1) {
        let idx = if k + u >= n { k + u - n } else { k + u };
        acc += a[idx] * kv;
    }
    acc
}

/// Demodulated received grid through the chosen synthesis route.
pub fn received_grid<R, D>(
    frame: &Frame,
    scenario: &Scenario,
    model: EchoModel,
    noise_on: bool,
    rng: &mut R,
    dft: &D,
) -> Result<EchoGrid>
where
    R: Rng + ?Sized,
    D: Dft + ?Sized,
{
    match model {
        EchoModel::TimeDomain => {
            let signal = echo_time_domain(frame, scenario, noise_on, rng, dft)?;
            Ok(EchoGrid {
                y: demodulate(&signal, &scenario.params, dft)?,
                components: None,
            })
        }
        EchoModel::FrequencyDomain => echo_frequency_domain(frame, scenario, noise_on, rng),
    }
}

/// Closed-form ISI and ICI powers per frequency bin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InterferencePowers {
    pub isi: f64,
    pub ici: f64,
}

/// P_ISI = Σ ρ|α|² and P_ICI = Σ ρ(1 − ρ)|α|² over targets beyond the prefix.
pub fn interference_powers(targets: &[GridTarget]) -> InterferencePowers {
    targets
        .iter()
        .filter(|t| t.beyond_cp)
        .fold(InterferencePowers::default(), |acc, t| {
            let a2 = t.alpha.norm_sqr();
            InterferencePowers {
                isi: acc.isi + t.rho * a2,
                ici: acc.ici + t.rho * (1.0 - t.rho) * a2,
            }
        })
}

/// σ²_IN = P_ISI + P_ICI + σ².
pub fn sigma_in(targets: &[GridTarget], noise_power: f64) -> f64 {
    let p = interference_powers(targets);
    p.isi + p.ici + noise_power
}

impl Scenario {
    pub fn sigma_in(&self) -> f64 {
        sigma_in(&self.targets, self.noise_power)
    }
}

/// Interference-free reference y = α·s·e^{−j2πnl/N}·e^{j2πmν/M} for a
/// single target, useful as an oracle for targets inside the prefix.
pub fn ideal_echo(frame: &Frame, params: &SystemParams, target: &GridTarget) -> Grid {
    let (n, m) = (params.n_subcarriers, params.n_symbols);
    Grid::from_fn(n, m, |k, sym| {
        target.alpha
            * frame.symbols.get(k, sym)
            * unit_phase(-((k * target.l) as i64), n)
            * unit_phase((sym * target.nu) as i64, m)
    })
}
