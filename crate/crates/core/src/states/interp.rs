//! Natural cubic spline on a uniform grid.

pub(crate) struct NaturalSpline<'a> {
    x0: f64,
    h: f64,
    y: &'a [f64],
    m: Vec<f64>,
}

impl<'a> NaturalSpline<'a> {
    pub(crate) fn new(x0: f64, h: f64, y: &'a [f64]) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for M_{i-1} + 4M_i + M_{i+1} = 6Δ²y_i/h², M_0 = M_{n-1} = 0.
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
                let denom = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - d[i - 1]) / denom };
            }
            m[k] = d[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d[i] - c[i] * m[i + 2];
            }
        }
        Self { x0, h, y, m }
    }

    /// Spline value at `u`; zero outside the sampled interval.
    pub(crate) fn eval(&self, u: f64) -> f64 {
        let n = self.y.len();
        let s = (u - self.x0) / self.h;
        let last = (n - 1) as f64;
        if !(s >= -1e-12 && s <= last + 1e-12) {
            return 0.0;
        }
        let i = (s.floor().max(0.0) as usize).min(n - 2);
        let t = s - i as f64;
        let a = 1.0 - t;
        a * self.y[i]
            + t * self.y[i + 1]
            + self.h * self.h / 6.0 * ((a * a * a - a) * self.m[i] + (t * t * t - t) * self.m[i + 1])
    }
}
