use crate::error::{Error, Result};
use crate::spectral::{self, derivative, RealField};

/// A field known at increasing times, read in between by linear
/// interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesField {
    times: Vec<f64>,
    fields: Vec<RealField>,
}

impl TimeSeriesField {
    pub fn new(times: Vec<f64>, fields: Vec<RealField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::Precondition(
                "time series needs one field per time and at least one entry".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("times must be strictly increasing".into()));
        }
        if fields.iter().any(|f| f.grid() != fields[0].grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, fields })
    }

    /// The same field at every time in `times`.
    pub fn steady(field: RealField, times: Vec<f64>) -> Result<Self> {
        let fields = vec![field; times.len()];
        Self::new(times, fields)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[RealField] {
        &self.fields
    }

    pub fn last(&self) -> &RealField {
        self.fields.last().expect("non-empty")
    }

    pub fn at(&self, t: f64) -> Result<RealField> {
        let (start, end) = (self.times[0], *self.times.last().expect("non-empty"));
        let slack = 1e-12 * (1.0 + end.abs());
        if !(t >= start - slack && t <= end + slack) {
            return Err(Error::StageLookup { t, start, end });
        }
        if self.times.len() == 1 {
            return Ok(self.fields[0].clone());
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        if w == 0.0 {
            return Ok(self.fields[k - 1].clone());
        }
        if w == 1.0 {
            return Ok(self.fields[k].clone());
        }
        self.fields[k - 1].lin_comb(1.0 - w, &self.fields[k], w)
    }
}

/// `f_t + v f_x = g` from `f(t0) = f0`, returned at the final time.
pub fn transport_solve(
    v: &TimeSeriesField,
    g: &TimeSeriesField,
    f0: &RealField,
    t_end: f64,
) -> Result<RealField> {
    let t0 = v.times()[0];
    Ok(transport_history(v, g, f0, &[t0, t_end])?.last().clone())
}

/// Same as [`transport_solve`] but keeps the solution at every entry of
/// `nodes` (the first node is the initial time). Each node interval is
/// split into equal RK4 substeps no longer than `0.3 dx / max(1, |v|)`.
pub fn transport_history(
    v: &TimeSeriesField,
    g: &TimeSeriesField,
    f0: &RealField,
    nodes: &[f64],
) -> Result<TimeSeriesField> {
    let grid = *f0.grid();
    if v.fields()[0].grid() != &grid || g.fields()[0].grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let vmax = v
        .fields()
        .iter()
        .map(RealField::grid_max_abs)
        .fold(1.0, f64::max);
    let h_max = 0.3 * grid.dx() / vmax;
    let rhs = |t: f64, f: &RealField| -> Result<RealField> {
        let vt = v.at(t)?;
        let gt = g.at(t)?;
        let fx = derivative(f, 1)?;
        let adv = spectral::multiply_dealiased(&vt, &fx)?;
        gt.lin_comb(1.0, &adv, -1.0)
    };
    let mut f = f0.clone();
    let mut out = vec![f.clone()];
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let substeps = ((b - a) / h_max).ceil().max(1.0) as usize;
        let h = (b - a) / substeps as f64;
        for s in 0..substeps {
            let t = a + s as f64 * h;
            let k1 = rhs(t, &f)?;
            let k2 = rhs(t + 0.5 * h, &f.lin_comb(1.0, &k1, 0.5 * h)?)?;
            let k3 = rhs(t + 0.5 * h, &f.lin_comb(1.0, &k2, 0.5 * h)?)?;
            let k4 = rhs(t + h, &f.lin_comb(1.0, &k3, h)?)?;
            let incr = k1
                .lin_comb(1.0, &k2, 2.0)?
                .lin_comb(1.0, &k3, 2.0)?
                .lin_comb(1.0, &k4, 1.0)?;
            f = f.lin_comb(1.0, &incr, h / 6.0)?;
        }
        out.push(f.clone());
    }
    TimeSeriesField::new(nodes.to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn g() -> Grid {
        Grid::periodic_2pi(64).unwrap()
    }

    #[test]
    fn interpolation_is_linear() {
        let a = RealField::constant(g(), 1.0);
        let b = RealField::constant(g(), 3.0);
        let s = TimeSeriesField::new(vec![0.0, 1.0], vec![a, b]).unwrap();
        assert!((s.at(0.25).unwrap().samples()[0] - 1.5).abs() < 1e-15);
        assert!(matches!(s.at(1.5), Err(Error::StageLookup { .. })));
    }

    #[test]
    fn zero_velocity_zero_source_keeps_data() {
        let f0 = RealField::from_fn(g(), |x| x.sin() + 0.2 * (3.0 * x).cos());
        let z = TimeSeriesField::steady(RealField::zeros(g()), vec![0.0, 1.0]).unwrap();
        let f = transport_solve(&z, &z, &f0, 1.0).unwrap();
        assert!(f.max_abs_diff(&f0).unwrap() < 1e-15);
    }

    #[test]
    fn unit_velocity_translates() {
        let f0 = RealField::from_fn(g(), f64::sin);
        let one = TimeSeriesField::steady(RealField::constant(g(), 1.0), vec![0.0, 0.7]).unwrap();
        let z = TimeSeriesField::steady(RealField::zeros(g()), vec![0.0, 0.7]).unwrap();
        let f = transport_solve(&one, &z, &f0, 0.7).unwrap();
        let exact = RealField::from_fn(g(), |x| (x - 0.7).sin());
        assert!(f.max_abs_diff(&exact).unwrap() < 1e-8);
    }

    #[test]
    fn balanced_source_keeps_constant() {
        let f0 = RealField::constant(g(), 2.0);
        let v = TimeSeriesField::steady(RealField::from_fn(g(), f64::cos), vec![0.0, 0.5]).unwrap();
        // g = v f0_x = 0 for constant f0
        let z = TimeSeriesField::steady(RealField::zeros(g()), vec![0.0, 0.5]).unwrap();
        let f = transport_solve(&v, &z, &f0, 0.5).unwrap();
        assert!(f.max_abs_diff(&f0).unwrap() < 1e-13);
    }
}
