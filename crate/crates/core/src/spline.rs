//! Natural cubic spline through strictly increasing abscissae, with
//! closed-form location of its interior local maxima.

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    // Per interval: y + b t + c t² + d t³ with t = x - x_i.
    coeffs: Vec<[f64; 4]>,
}

impl CubicSpline {
    /// Natural boundary conditions (zero curvature at both ends). Returns
    /// `None` for fewer than two points or non-increasing `x`.
    pub fn natural(x: &[f64], y: &[f64]) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();

        // Second derivatives M via the Thomas algorithm; M[0] = M[n-1] = 0.
        let mut m = vec![0.0; n];
        if n > 2 {
            let inner = n - 2;
            let mut diag = vec![0.0; inner];
            let mut rhs = vec![0.0; inner];
            for i in 0..inner {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..inner {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[inner] = rhs[inner - 1] / diag[inner - 1];
            for i in (0..inner - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }

        let coeffs = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                let b = (y[i + 1] - y[i]) / hi - hi * (2.0 * m[i] + m[i + 1]) / 6.0;
                [y[i], b, m[i] / 2.0, (m[i + 1] - m[i]) / (6.0 * hi)]
            })
            .collect();
        Some(Self { x: x.to_vec(), coeffs })
    }

    pub fn eval(&self, at: f64) -> f64 {
        let i = self
            .x
            .partition_point(|&v| v <= at)
            .saturating_sub(1)
            .min(self.coeffs.len() - 1);
        let t = at - self.x[i];
        let [a, b, c, d] = self.coeffs[i];
        a + t * (b + t * (c + t * d))
    }

    /// Points strictly inside an interval where the spline has a local
    /// maximum (first derivative zero, second derivative negative), each
    /// with its interpolated value. Ordered by position.
    pub fn interior_maxima(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (i, &[_, b, c, d]) in self.coeffs.iter().enumerate() {
            let h = self.x[i + 1] - self.x[i];
            for t in quadratic_roots(3.0 * d, 2.0 * c, b) {
                if t > 0.0 && t < h && 2.0 * c + 6.0 * d * t < 0.0 {
                    let at = self.x[i] + t;
                    out.push((at, self.eval(at)));
                }
            }
        }
        out
    }
}

/// Real roots of `a t² + b t + c`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}
