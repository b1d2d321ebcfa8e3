//! rustfft-backed transforms for the core model.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use isac_core::dft::Dft;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

/// Plans are built once per length and shared across threads.
pub struct FftEngine {
    plans: RwLock<HashMap<usize, (Plan, Plan)>>,
    planner: Mutex<FftPlanner<f64>>,
}

impl FftEngine {
    pub fn new() -> Self {
        Self {
            plans: RwLock::new(HashMap::new()),
            planner: Mutex::new(FftPlanner::new()),
        }
    }

    /// Engine with plans prepared for the given lengths.
    pub fn with_lengths(lengths: &[usize]) -> Self {
        let engine = Self::new();
        for &len in lengths {
            engine.plan(len);
        }
        engine
    }

    fn plan(&self, len: usize) -> (Plan, Plan) {
        if let Some(p) = self.plans.read().unwrap_or_else(PoisonError::into_inner).get(&len) {
            return p.clone();
        }
        let mut plans = self.plans.write().unwrap_or_else(PoisonError::into_inner);
        plans
            .entry(len)
            .or_insert_with(|| {
                let mut planner = self.planner.lock().unwrap_or_else(PoisonError::into_inner);
                (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
            })
            .clone()
    }
}

impl Default for FftEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for FftEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let plans = self.plans.read().unwrap_or_else(PoisonError::into_inner);
        let mut lengths: Vec<usize> = plans.keys().copied().collect();
        lengths.sort_unstable();
        f.debug_struct("FftEngine").field("lengths", &lengths).finish()
    }
}

impl Dft for FftEngine {
    fn forward(&self, buf: &mut [Complex64]) {
        if buf.len() > 1 {
            self.plan(buf.len()).0.process(buf);
        }
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        if buf.len() > 1 {
            self.plan(buf.len()).1.process(buf);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use isac_core::dft::DirectDft;

    #[test]
    fn matches_direct_transform() {
        let engine = FftEngine::new();
        for len in [1usize, 2, 5, 16, 64, 100] {
            let x: Vec<Complex64> = (0..len)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let (mut a, mut b) = (x.clone(), x.clone());
            engine.forward(&mut a);
            DirectDft.forward(&mut b);
            let err = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "len {len}: {err}");
            engine.inverse(&mut a);
            DirectDft.inverse(&mut b);
            let err = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "len {len}: {err}");
        }
    }
}
