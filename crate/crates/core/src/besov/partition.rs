use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Smooth step: `1` for `t <= 0`, `0` for `t >= 1`, `C^inf` in between.
pub fn smooth_step(t: f64) -> f64 {
    fn h(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = h(1.0 - t);
    a / (h(t) + a)
}

/// The concrete Littlewood-Paley pair `(chi, phi)`.
///
/// `chi = 1` on `|xi| <= 1` and vanishes for `|xi| >= 4/3`;
/// `phi(xi) = chi(xi/2) - chi(xi)` is supported in `1 <= |xi| <= 8/3`.
/// Partial sums telescope: `chi + sum_{j<=J} phi(2^-j .) = chi(2^-(J+1) .)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition;

impl DyadicPartition {
    pub const CHI_PLATEAU: f64 = 1.0;
    pub const CHI_SUPPORT: f64 = 4.0 / 3.0;
    pub const PHI_SUPPORT: (f64, f64) = (1.0, 8.0 / 3.0);

    pub fn new() -> Self {
        Self
    }

    pub fn chi(&self, xi: f64) -> f64 {
        smooth_step(3.0 * xi.abs() - 3.0)
    }

    pub fn phi(&self, xi: f64) -> f64 {
        self.chi(0.5 * xi) - self.chi(xi)
    }

    /// Symbol of `Delta_j`: `chi` for `j = -1`, `phi(2^-j .)` for `j >= 0`,
    /// zero below `-1`.
    pub fn block_symbol(&self, j: i32, xi: f64) -> f64 {
        match j {
            j if j < -1 => 0.0,
            -1 => self.chi(xi),
            j => self.phi(xi * (-j as f64).exp2()),
        }
    }

    /// Symbol of `S_j = sum_{j' <= j-1} Delta_j'`, i.e. `chi(2^-j .)`.
    pub fn low_pass_symbol(&self, j: i32, xi: f64) -> f64 {
        if j < 0 {
            0.0
        } else {
            self.chi(xi * (-j as f64).exp2())
        }
    }

    /// Largest block whose support `|xi| <= (8/3) 2^j` stays strictly below
    /// the grid's Nyquist wavenumber. On `[0, 2 pi)` this is `log2(n/2) - 2`.
    pub fn j_max(&self, grid: &Grid) -> i32 {
        let kn = grid.nyquist_wavenumber();
        let mut j = -1;
        while Self::PHI_SUPPORT.1 * ((j + 1) as f64).exp2() < kn {
            j += 1;
        }
        j
    }
}

/// Index triple `(s, p, r)` of `B^s_{p,r}`; `f64::INFINITY` stands for `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::NonFinite("Besov regularity"));
        }
        for e in [p, r] {
            if e.is_nan() || e < 1.0 {
                return Err(Error::InvalidExponent(e));
            }
        }
        Ok(Self { s, p, r })
    }

    pub fn label(&self) -> String {
        fn fmt(v: f64) -> String {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                format!("{v}")
            }
        }
        format!("besov_s{}_p{}_r{}", fmt(self.s), fmt(self.p), fmt(self.r))
    }
}
