//! Range-Doppler maps under reciprocal and matched filtering.
//!
//! Received symbols are first divided by (reciprocal) or multiplied by the
//! conjugate of (matched) the transmitted symbols, then transformed with an
//! inverse DFT over subcarriers (delay axis l) and a forward DFT over
//! symbols (Doppler axis ν), scaled by 1/√(MN) so the map is unitary.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


use crate::dft::Dft;
use crate::grid::Grid;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Filter {
    /// Divide by the transmitted symbol.
    Reciprocal,
    /// Multiply by the conjugate transmitted symbol.
    Matched,
}

impl Filter {
    pub const BOTH: [Filter; 2] = [Filter::Reciprocal, Filter::Matched];

    pub fn label(self) -> &'static str {
        match self {
            Filter::Reciprocal => "RF",
            Filter::Matched => "MF",
        }
    }
}

/// A complex N × M map indexed by (l, ν).
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm {
    pub values: Grid,
    pub filter: Filter,
    /// Bins excluded from the sidelobe region.
    pub mainlobe_bins: Vec<(usize, usize)>,
}

impl Rdm {
    pub fn with_mainlobe(mut self, bins: &[(usize, usize)]) -> Self {
        self.mainlobe_bins.clear();
        for &b in bins {
            if !self.mainlobe_bins.contains(&b) {
                self.mainlobe_bins.push(b);
            }
        }
        self
    }

    pub fn n_delay(&self) -> usize {
        self.values.rows()
    }

    pub fn n_doppler(&self) -> usize {
        self.values.cols()
    }

    #[inline]
    pub fn power(&self, l: usize, nu: usize) -> f64 {
        self.values.get(l, nu).norm_sqr()
    }

    /// |χ(l, ν)|² for every l at fixed ν.
    pub fn range_profile(&self, nu: usize) -> Vec<f64> {
        self.values.column(nu).iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.values.energy()
    }
}

/// Applies the filter front end to the received grid.
pub fn filtered_grid(y: &Grid, symbols: &Grid, filter: Filter) -> Result<Grid> {
    y.check_shape(symbols.rows(), symbols.cols())?;
    let mut out = y.clone();
    for (z, s) in out.as_mut_slice().iter_mut().zip(symbols.as_slice()) {
        *z = match filter {
            Filter::Reciprocal => *z / s,
            Filter::Matched => *z * s.conj(),
        };
    }
    Ok(out)
}

/// χ(l, ν) = (1/√(MN)) Σ_m Σ_n F_{n,m} e^{j2πnl/N} e^{−j2πmν/M}.
pub fn range_doppler_map<D: Dft + ?Sized>(y: &Grid, symbols: &Grid, filter: Filter, dft: &D) -> Result<Rdm> {
    let mut g = filtered_grid(y, symbols, filter)?;
    let (n, m) = (g.rows(), g.cols());
    for col in 0..m {
        dft.inverse(g.column_mut(col));
    }
    let scale = 1.0 / ((n * m) as f64).sqrt();
    let mut row = vec![Complex64::new(0.0, 0.0); m];
    for l in 0..n {
        for (nu, z) in row.iter_mut().enumerate() {
            *z = g.get(l, nu);
        }
        dft.forward(&mut row);
        for (nu, z) in row.iter().enumerate() {
            g.set(l, nu, z * scale);
        }
    }
    Ok(Rdm {
        values: g,
        filter,
        mainlobe_bins: Vec::new(),
    })
}

pub fn rdm_rf<D: Dft + ?Sized>(y: &Grid, symbols: &Grid, dft: &D) -> Result<Rdm> {
    range_doppler_map(y, symbols, Filter::Reciprocal, dft)
}

pub fn rdm_mf<D: Dft + ?Sized>(y: &Grid, symbols: &Grid, dft: &D) -> Result<Rdm> {
    range_doppler_map(y, symbols, Filter::Matched, dft)
}

/// D_N(x) = sin(πx)/sin(πx/N)·e^{jπ(N−1)x/N}, i.e. Σ_{n<N} e^{j2πnx/N}.
///
/// At x ≡ 0 (mod N) the removable singularity takes its limit, N.
pub fn dirichlet(n: usize, x: f64) -> Complex64 {
    let nf = n as f64;
    let den = (PI * x / nf).sin();
    if den.abs() < 1e-12 {
        return Complex64::new(nf, 0.0);
    }
    let mag = (PI * x).sin() / den;
    Complex64::from_polar(mag, PI * (nf - 1.0) * x / nf)
}

/// Peak and integrated power over the sidelobe region, plus per-bin
/// mainlobe power.
#[derive(Debug, Clone, PartialEq)]
pub struct SidelobeStats {
    pub peak_sidelobe: f64,
    pub integrated_sidelobe: f64,
    pub sidelobe_bins: usize,
    pub mainlobe: Vec<((usize, usize), f64)>,
}

impl SidelobeStats {
    /// Mean sidelobe power per bin.
    pub fn floor(&self) -> f64 {
        self.integrated_sidelobe / self.sidelobe_bins as f64
    }

    pub fn mainlobe_power(&self, bin: (usize, usize)) -> Option<f64> {
        self.mainlobe.iter().find(|(b, _)| *b == bin).map(|(_, p)| *p)
    }
}

/// Sidelobe region = every bin not listed in `rdm.mainlobe_bins`. An empty
/// mainlobe list makes the whole map sidelobe (noise-only scenarios).
pub fn sidelobe_stats(rdm: &Rdm) -> Result<SidelobeStats> {
    let bins = rdm.values.len();
    let (n, _) = (rdm.n_delay(), rdm.n_doppler());
    let mut is_main = vec![false; bins];
    for &(l, nu) in &rdm.mainlobe_bins {
        is_main[nu * n + l] = true;
    }
    let q = rdm.mainlobe_bins.len();
    if q >= bins {
        return Err(Error::NoSidelobes { targets: q, bins });
    }
    let mut peak = 0.0f64;
    let mut total = 0.0;
    for (i, z) in rdm.values.as_slice().iter().enumerate() {
        if is_main[i] {
            continue;
        }
        let p = z.norm_sqr();
        total += p;
        peak = peak.max(p);
    }
    Ok(SidelobeStats {
        peak_sidelobe: peak,
        integrated_sidelobe: total,
        sidelobe_bins: bins - q,
        mainlobe: rdm
            .mainlobe_bins
            .iter()
            .map(|&(l, nu)| ((l, nu), rdm.power(l, nu)))
            .collect(),
    })
}
