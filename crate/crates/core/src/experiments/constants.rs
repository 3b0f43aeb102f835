use serde::{Deserialize, Serialize};

use crate::besov::{besov_norm, commutator_sum, weighted_sup_norm, BesovIndex};
use crate::corpus::BandLimited;
use crate::error::{Error, Result};
use crate::model::{f_norm_ratio, FochParams};
use crate::spectral::{derivative, multiply_dealiased, Grid};

/// Largest ratio over a corpus for each inequality whose constant is left
/// unspecified:
///
/// * `|F(u)|_{B^3_{2,2}} / |u|^2` at `b = 2` and `|F(u)|_{B^2_{2,2}} / |u|^2`
///   at `b = 5/3` (`alpha = beta = 1`);
/// * `|f^2|_{B^0_{inf,1}} / (|f|_{B^0_{inf,1}} weighted_sup(f))`;
/// * `sum_j 2^j |R_j|_inf / (|f_x|_{B^0_{inf,1}} |g|_{B^1_{inf,1}})` over
///   consecutive corpus pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredConstants {
    pub f_ratio_b2_s3: f64,
    pub f_ratio_critical_s2: f64,
    pub product: f64,
    pub commutator: f64,
}

impl MeasuredConstants {
    pub fn as_array(&self) -> [(&'static str, f64); 4] {
        [
            ("f_ratio_b2_s3", self.f_ratio_b2_s3),
            ("f_ratio_critical_s2", self.f_ratio_critical_s2),
            ("product", self.product),
            ("commutator", self.commutator),
        ]
    }

    /// Largest relative change between two measurements.
    pub fn max_relative_change(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|((_, a), (_, b))| (a - b).abs() / a.abs().max(b.abs()))
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.as_array().iter().all(|(_, v)| v.is_finite())
    }
}

pub fn measure_constants(corpus: &[BandLimited], grid: Grid) -> Result<MeasuredConstants> {
    if corpus.len() < 2 {
        return Err(Error::Precondition(
            "need at least two corpus entries".into(),
        ));
    }
    let fields = corpus
        .iter()
        .map(|c| c.sample(grid))
        .collect::<Result<Vec<_>>>()?;
    let s3 = BesovIndex::new(3.0, 2.0, 2.0)?;
    let s2 = BesovIndex::new(2.0, 2.0, 2.0)?;
    let b0 = BesovIndex::new(0.0, f64::INFINITY, 1.0)?;
    let b1 = BesovIndex::new(1.0, f64::INFINITY, 1.0)?;
    let p2 = FochParams::unit(2.0);
    let pc = FochParams::unit(5.0 / 3.0);
    let mut out = MeasuredConstants {
        f_ratio_b2_s3: 0.0,
        f_ratio_critical_s2: 0.0,
        product: 0.0,
        commutator: 0.0,
    };
    for (i, f) in fields.iter().enumerate() {
        out.f_ratio_b2_s3 = out.f_ratio_b2_s3.max(f_norm_ratio(f, &p2, s3)?);
        out.f_ratio_critical_s2 = out.f_ratio_critical_s2.max(f_norm_ratio(f, &pc, s2)?);
        let sq = multiply_dealiased(f, f)?;
        let denom = besov_norm(f, b0)? * weighted_sup_norm(f);
        out.product = out.product.max(besov_norm(&sq, b0)? / denom);
        let g = &fields[(i + 1) % fields.len()];
        let fx = derivative(f, 1)?;
        let denom = besov_norm(&fx, b0)? * besov_norm(g, b1)?;
        out.commutator = out.commutator.max(commutator_sum(f, g)? / denom);
    }
    Ok(out)
}
