//! Unit-average-power symbol alphabets.
//!
//! Reciprocal filtering scales interference by E{1/|s|²} and matched
//! filtering leaks target energy in proportion to E{|s|⁴} − 1, so both
//! moments are computed exactly over the alphabet here.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;

use crate::grid::Grid;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Psk,
    Qam,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Psk => "PSK",
            Kind::Qam => "QAM",
        }
    }
}

/// A finite alphabet with E{|s|²} = 1 over equiprobable points.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: Kind,
    order: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    /// PSK of order 2^k (k ≥ 1) or square QAM of order 4^k (k ≥ 1).
    ///
    /// PSK points sit on the unit circle, rotated by π/order for orders ≥ 4
    /// (so QPSK is (±1 ± j)/√2) and unrotated for BPSK. QAM points are the
    /// odd-integer grid scaled by the exact alphabet-average power.
    pub fn new(kind: Kind, order: usize) -> Result<Self> {
        let points = match kind {
            Kind::Psk => {
                if order < 2 || !order.is_power_of_two() {
                    return Err(Error::InvalidOrder {
                        kind: kind.name(),
                        order,
                        reason: "PSK order must be a power of two >= 2",
                    });
                }
                let offset = if order == 2 { 0.0 } else { PI / order as f64 };
                (0..order)
                    .map(|k| Complex64::cis(offset + 2.0 * PI * k as f64 / order as f64))
                    .collect()
            }
            Kind::Qam => {
                let side = integer_sqrt(order);
                if order < 4 || side * side != order || !side.is_multiple_of(2) || !order.is_power_of_two() {
                    return Err(Error::InvalidOrder {
                        kind: kind.name(),
                        order,
                        reason: "square QAM order must be an even power of two (4, 16, 64, ...)",
                    });
                }
                let level = |i: usize| (2 * i) as f64 - (side - 1) as f64;
                let raw: Vec<Complex64> = (0..side)
                    .flat_map(|i| (0..side).map(move |q| Complex64::new(level(i), level(q))))
                    .collect();
                let mean_power = raw.iter().map(|z| z.norm_sqr()).sum::<f64>() / order as f64;
                let scale = mean_power.sqrt();
                raw.into_iter().map(|z| z / scale).collect()
            }
        };
        Ok(Self { kind, order, points })
    }

    pub fn psk(order: usize) -> Result<Self> {
        Self::new(Kind::Psk, order)
    }

    pub fn qam(order: usize) -> Result<Self> {
        Self::new(Kind::Qam, order)
    }

    /// Parses `bpsk`, `qpsk`, `psk<k>` and `qam<k>` tokens.
    pub fn from_token(token: &str) -> Result<Self> {
        let t = token.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownConstellation(token.to_string());
        match t.as_str() {
            "bpsk" => Self::psk(2),
            "qpsk" => Self::psk(4),
            _ => {
                if let Some(rest) = t.strip_prefix("qam") {
                    Self::qam(rest.parse().map_err(|_| unknown())?)
                } else if let Some(rest) = t.strip_prefix("psk") {
                    Self::psk(rest.parse().map_err(|_| unknown())?)
                } else {
                    Err(unknown())
                }
            }
        }
    }

    /// The token accepted by [`Constellation::from_token`].
    pub fn token(&self) -> String {
        match (self.kind, self.order) {
            (Kind::Psk, 2) => "bpsk".into(),
            (Kind::Psk, 4) => "qpsk".into(),
            (Kind::Psk, k) => format!("psk{k}"),
            (Kind::Qam, k) => format!("qam{k}"),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn is_constant_modulus(&self) -> bool {
        self.kind == Kind::Psk
    }

    /// ξ_s = E{1/|s|²}. Exactly 1 for PSK.
    pub fn xi_s(&self) -> f64 {
        if self.is_constant_modulus() {
            return 1.0;
        }
        self.points.iter().map(|s| 1.0 / s.norm_sqr()).sum::<f64>() / self.order as f64
    }

    /// μ₄ = E{|s|⁴}. Exactly 1 for PSK.
    pub fn mu4(&self) -> f64 {
        if self.is_constant_modulus() {
            return 1.0;
        }
        self.points.iter().map(|s| s.norm_sqr().powi(2)).sum::<f64>() / self.order as f64
    }

    /// One equiprobable draw from the alphabet.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        self.points[rng.random_range(0..self.order)]
    }

    /// An `n_subcarriers × n_symbols` grid of i.i.d. uniform draws.
    pub fn draw_grid<R: Rng + ?Sized>(&self, n_subcarriers: usize, n_symbols: usize, rng: &mut R) -> Grid {
        Grid::from_fn(n_subcarriers, n_symbols, |_, _| self.draw(rng))
    }

    /// Whether `z` is (to rounding) one of the alphabet points.
    pub fn contains(&self, z: Complex64) -> bool {
        self.points.iter().any(|p| (p - z).norm() < 1e-12)
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// Sample means of 1/|s|² and |s|⁴ over a grid.
pub fn empirical_moments(grid: &Grid) -> (f64, f64) {
    let n = grid.len() as f64;
    let (xi, mu4) = grid.as_slice().iter().fold((0.0, 0.0), |(xi, mu4), s| {
        let p = s.norm_sqr();
        (xi + 1.0 / p, mu4 + p * p)
    });
    (xi / n, mu4 / n)
}

fn integer_sqrt(v: usize) -> usize {
    let mut r = (v as f64).sqrt() as usize;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn all() -> Vec<Constellation> {
        ["bpsk", "qpsk", "psk8", "qam16", "qam64", "qam256", "qam1024"]
            .iter()
            .map(|t| Constellation::from_token(t).unwrap())
            .collect()
    }

    #[test]
    fn every_alphabet_has_unit_power_and_distinct_points() {
        for c in all() {
            let p = c.points().iter().map(|s| s.norm_sqr()).sum::<f64>() / c.order() as f64;
            assert!((p - 1.0).abs() < 1e-12, "{c}: {p}");
            for (i, a) in c.points().iter().enumerate() {
                for b in &c.points()[i + 1..] {
                    assert!((a - b).norm() > 1e-6, "{c} has duplicate points");
                }
            }
        }
    }

    #[test]
    fn qpsk_is_constant_modulus() {
        let c = Constellation::psk(4).unwrap();
        assert_eq!(c.points().len(), 4);
        for s in c.points() {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qam16_has_three_power_rings() {
        // odd-integer grid (±1, ±3)² has mean power 10
        let c = Constellation::qam(16).unwrap();
        let mut rings = [0usize; 3];
        for s in c.points() {
            let p = s.norm_sqr();
            let idx = [0.2, 1.0, 1.8]
                .iter()
                .position(|r| (p - r).abs() < 1e-12)
                .unwrap_or_else(|| panic!("unexpected power {p}"));
            rings[idx] += 1;
        }
        assert_eq!(rings, [4, 8, 4]);
    }

    #[test]
    fn rejects_non_square_qam_and_odd_psk() {
        assert!(matches!(Constellation::qam(8), Err(Error::InvalidOrder { .. })));
        assert!(Constellation::qam(32).is_err());
        assert!(Constellation::qam(2).is_err());
        assert!(Constellation::psk(3).is_err());
        assert!(Constellation::psk(1).is_err());
        assert!(Constellation::from_token("qam12").is_err());
        assert!(matches!(
            Constellation::from_token("ofdm"),
            Err(Error::UnknownConstellation(_))
        ));
    }

    #[test]
    fn tokens_round_trip() {
        for c in all() {
            assert_eq!(Constellation::from_token(&c.token()).unwrap(), c);
        }
    }

    #[test]
    fn table_moments() {
        let q16 = Constellation::qam(16).unwrap();
        assert!((q16.xi_s() - 1.8889).abs() < 1e-4);
        let mu4_enumerated = (4.0 * 0.2f64.powi(2) + 8.0 * 1.0 + 4.0 * 1.8f64.powi(2)) / 16.0;
        assert!((q16.mu4() - mu4_enumerated).abs() < 1e-12);
        assert!((q16.mu4() - 1.32).abs() < 1e-3);

        let q256 = Constellation::qam(256).unwrap();
        assert!((q256.xi_s() - 3.4374).abs() < 1e-3);
        assert!((q256.mu4() - 1.3953).abs() < 1e-3);

        // exact alphabet mean; the commonly tabulated 4.1673 is 0.2 standard
        // errors of a 10⁶-draw estimate away from it
        let q1024 = Constellation::qam(1024).unwrap();
        assert!((q1024.xi_s() - 4.171_559_700_7).abs() < 1e-9);
        assert!((q1024.xi_s() - 4.1673).abs() < 5e-3);
        assert!((q1024.mu4() - 1.3989).abs() < 1e-3);

        for order in [2, 4, 8, 16, 64] {
            let c = Constellation::psk(order).unwrap();
            assert_eq!(c.xi_s(), 1.0);
            assert_eq!(c.mu4(), 1.0);
        }
    }

    #[test]
    fn jensen_lower_bounds() {
        for c in all() {
            assert!(c.xi_s() >= 1.0 - 1e-12, "{c}");
            assert!(c.mu4() >= 1.0 - 1e-12, "{c}");
        }
    }

    #[test]
    fn draws_are_deterministic_and_in_alphabet() {
        let c = Constellation::psk(4).unwrap();
        let a = c.draw_grid(2, 2, &mut trial_rng(7, 0));
        let b = c.draw_grid(2, 2, &mut trial_rng(7, 0));
        assert_eq!(a, b);

        let bpsk = Constellation::psk(2).unwrap();
        let g = bpsk.draw_grid(1, 1, &mut trial_rng(3, 0));
        let s = g.get(0, 0);
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-15 || (s + Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let q = Constellation::qam(64).unwrap();
        let g = q.draw_grid(16, 8, &mut trial_rng(9, 1));
        assert!(g.as_slice().iter().all(|&s| q.contains(s)));
    }

    #[test]
    fn qam16_draws_have_unit_mean_power() {
        let c = Constellation::qam(16).unwrap();
        let g = c.draw_grid(256, 128, &mut trial_rng(11, 0));
        let p = g.energy() / g.len() as f64;
        assert!((p - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn identical_qpsk_grid_moments_are_one() {
        let s = Constellation::psk(4).unwrap().points()[1];
        let g = Grid::from_fn(4, 4, |_, _| s);
        let (xi, mu4) = empirical_moments(&g);
        assert!((xi - 1.0).abs() < 1e-12);
        assert!((mu4 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_moments_converge_to_alphabet_values() {
        for c in all() {
            let g = c.draw_grid(1000, 1000, &mut trial_rng(5, c.order() as u64));
            let (xi, mu4) = empirical_moments(&g);
            assert!((xi / c.xi_s() - 1.0).abs() < 0.01, "{c}: xi {xi}");
            assert!((mu4 / c.mu4() - 1.0).abs() < 0.01, "{c}: mu4 {mu4}");
        }
    }
}
