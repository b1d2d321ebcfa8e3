//! CP-OFDM modulation and demodulation with unitary 1/√N scaling.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::constellation::Constellation;
use crate::dft::Dft;
use crate::grid::Grid;
use crate::scenario::SystemParams;
use crate::{Complex64, Error, Result};

/// Baseband samples at T_sam spacing. `start_index` is the global sample
/// index of `samples[0]`; index 0 is the first sample of data symbol 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<Complex64>,
    pub start_index: i64,
}

impl TimeSignal {
    pub fn end_index(&self) -> i64 {
        self.start_index + self.samples.len() as i64
    }

    /// Sample at global index `i`, zero outside the stored span.
    #[inline]
    pub fn at(&self, i: i64) -> Complex64 {
        let k = i - self.start_index;
        if k < 0 || k as usize >= self.samples.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.samples[k as usize]
        }
    }
}

/// What the transmitter sent just before data symbol 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Predecessor {
    /// One extra random symbol, transmitted but never processed, so symbol 0
    /// sees the same inter-symbol interference as every other symbol.
    #[default]
    WarmUp,
    /// Silence before the frame.
    Zero,
}

/// The processed N × M data grid plus the symbol transmitted before it.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub symbols: Grid,
    /// Column of N symbols sent in slot m = −1 (all zero for [`Predecessor::Zero`]).
    pub predecessor: Vec<Complex64>,
}

impl Frame {
    pub fn new(symbols: Grid, predecessor: Vec<Complex64>) -> Result<Self> {
        if predecessor.len() != symbols.rows() {
            return Err(Error::DimensionMismatch {
                expected_rows: symbols.rows(),
                expected_cols: 1,
                rows: predecessor.len(),
                cols: 1,
            });
        }
        Ok(Self { symbols, predecessor })
    }

    /// A frame without a transmitted predecessor.
    pub fn silent_start(symbols: Grid) -> Self {
        let n = symbols.rows();
        Self {
            symbols,
            predecessor: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Draws the data grid first and the warm-up column second.
    pub fn draw<R: Rng + ?Sized>(
        constellation: &Constellation,
        params: &SystemParams,
        predecessor: Predecessor,
        rng: &mut R,
    ) -> Self {
        let n = params.n_subcarriers;
        let symbols = constellation.draw_grid(n, params.n_symbols, rng);
        let predecessor = match predecessor {
            Predecessor::WarmUp => (0..n).map(|_| constellation.draw(rng)).collect(),
            Predecessor::Zero => vec![Complex64::new(0.0, 0.0); n],
        };
        Self { symbols, predecessor }
    }

    /// s_{n,m} for m ≥ −1, with m = −1 the predecessor.
    #[inline]
    pub fn symbol(&self, n: usize, m: i64) -> Complex64 {
        if m < 0 {
            self.predecessor[n]
        } else {
            self.symbols.get(n, m as usize)
        }
    }
}

fn push_symbol<D: Dft + ?Sized>(out: &mut Vec<Complex64>, column: &[Complex64], n_cp: usize, dft: &D) {
    let n = column.len();
    let mut body = column.to_vec();
    dft.inverse(&mut body);
    let scale = 1.0 / (n as f64).sqrt();
    body.iter_mut().for_each(|z| *z *= scale);
    out.extend_from_slice(&body[n - n_cp..]);
    out.extend_from_slice(&body);
}

/// Modulates an N × M grid into M CP-prefixed symbols starting at index 0.
pub fn modulate<D: Dft + ?Sized>(grid: &Grid, params: &SystemParams, dft: &D) -> Result<TimeSignal> {
    grid.check_shape(params.n_subcarriers, params.n_symbols)?;
    let mut samples = Vec::with_capacity(params.n_symbols * params.samples_per_symbol());
    for m in 0..grid.cols() {
        push_symbol(&mut samples, grid.column(m), params.n_cp, dft);
    }
    Ok(TimeSignal {
        samples,
        start_index: 0,
    })
}

/// Modulates the predecessor and the data grid; the predecessor occupies
/// global indices [−N_s, 0).
pub fn modulate_frame<D: Dft + ?Sized>(frame: &Frame, params: &SystemParams, dft: &D) -> Result<TimeSignal> {
    frame
        .symbols
        .check_shape(params.n_subcarriers, params.n_symbols)?;
    let ns = params.samples_per_symbol();
    let mut samples = Vec::with_capacity((params.n_symbols + 1) * ns);
    push_symbol(&mut samples, &frame.predecessor, params.n_cp, dft);
    for m in 0..frame.symbols.cols() {
        push_symbol(&mut samples, frame.symbols.column(m), params.n_cp, dft);
    }
    Ok(TimeSignal {
        samples,
        start_index: -(ns as i64),
    })
}

/// Strips each prefix and applies the unitary N-point DFT to samples
/// [mN_s + N_cp, (m+1)N_s) for every symbol m.
pub fn demodulate<D: Dft + ?Sized>(signal: &TimeSignal, params: &SystemParams, dft: &D) -> Result<Grid> {
    let n = params.n_subcarriers;
    let ns = params.samples_per_symbol() as i64;
    let need_start = params.n_cp as i64;
    let need_end = params.n_symbols as i64 * ns;
    if signal.start_index > need_start || signal.end_index() < need_end {
        return Err(Error::SignalTooShort {
            start: signal.start_index,
            end: signal.end_index(),
            need_start,
            need_end,
        });
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = Grid::zeros(n, params.n_symbols);
    for m in 0..params.n_symbols {
        let offset = (m as i64 * ns + need_start - signal.start_index) as usize;
        let col = out.column_mut(m);
        col.copy_from_slice(&signal.samples[offset..offset + n]);
        dft.forward(col);
        col.iter_mut().for_each(|z| *z *= scale);
    }
    Ok(out)
}
