use super::wrap;

/// Periodic spline of order `m` (degree `m - 1`) on the uniform knots
/// `y_k = (k + shift) / n`, stored in the cardinal B-spline basis
/// `S(x) = sum_k a_k B_m(n x - k - shift)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineFn {
    order: usize,
    shift: f64,
    coeffs: Vec<f64>,
}

impl SplineFn {
    /// `shift` is measured in units of the knot spacing `1/n` and must lie in `[0, 1)`.
    pub fn new(order: usize, shift: f64, coeffs: Vec<f64>) -> Self {
        assert!(order >= 1, "spline order must be at least 1");
        assert!(!coeffs.is_empty(), "spline needs at least one coefficient");
        assert!((0.0..1.0).contains(&shift));
        SplineFn {
            order,
            shift,
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.order - 1
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn knots(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.n()).map(|k| (k as f64 + self.shift) / n).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n();
        let mut t = (wrap(x) * n as f64 - self.shift).rem_euclid(n as f64);
        // x = k/n should land on knot k, not just below it
        let near = t.round();
        if (t - near).abs() <= 8.0 * f64::EPSILON * (1.0 + near) {
            t = near % n as f64;
        }
        let mut j = t.floor() as usize;
        let mut frac = t - j as f64;
        if j >= n {
            j = 0;
            frac = 0.0;
        }
        let values = bspline_values(self.order, frac);
        values
            .iter()
            .enumerate()
            .map(|(i, v)| self.coeffs[(j + n - i % n) % n] * v)
            .sum()
    }

    /// `s`-th derivative as a spline of order `m - s`, or `None` when `s >= m`
    /// (the derivative is no longer a function).
    pub fn derivative(&self, s: usize) -> Option<SplineFn> {
        if s >= self.order {
            return None;
        }
        let n = self.n();
        let mut coeffs = self.coeffs.clone();
        for _ in 0..s {
            let prev = coeffs.clone();
            for k in 0..n {
                coeffs[k] = n as f64 * (prev[k] - prev[(k + n - 1) % n]);
            }
        }
        Some(SplineFn {
            order: self.order - s,
            shift: self.shift,
            coeffs,
        })
    }
}

/// Values `B_m(t + i)` for `i = 0..m` of the cardinal B-spline of order `m`
/// supported on `[0, m)`, at a fractional offset `t` in `[0, 1)`.
pub fn bspline_values(order: usize, t: f64) -> Vec<f64> {
    let mut v = vec![1.0];
    for k in 1..order {
        let mut next = vec![0.0; k + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            let u = t + i as f64;
            let cur = if i < k { v[i] } else { 0.0 };
            let prev = if i >= 1 { v[i - 1] } else { 0.0 };
            *slot = (u * cur + (k as f64 + 1.0 - u) * prev) / k as f64;
        }
        v = next;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cardinal_direct(m: usize, u: f64) -> f64 {
        // truncated-power form: (1/(m-1)!) sum (-1)^i C(m,i) (u-i)_+^{m-1}
        let mut fact = 1.0;
        for i in 1..m {
            fact *= i as f64;
        }
        let mut binom = 1.0;
        let mut acc = 0.0;
        for i in 0..=m {
            let d = u - i as f64;
            if d > 0.0 {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * d.powi(m as i32 - 1);
            }
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        acc / fact
    }

    #[test]
    fn recursion_matches_truncated_powers() {
        for m in 2..=6 {
            for &t in &[0.0, 0.25, 0.5, 0.9] {
                let v = bspline_values(m, t);
                for (i, vi) in v.iter().enumerate() {
                    let direct = cardinal_direct(m, t + i as f64);
                    assert!((vi - direct).abs() < 1e-13, "m={m} t={t} i={i}");
                }
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_coefficients_give_constant() {
        for m in 1..=5 {
            let s = SplineFn::new(m, 0.5 * ((m + 1) % 2) as f64, vec![2.5; 9]);
            for &x in &[0.0, 0.1, 0.55, 0.999] {
                assert!((s.eval(x) - 2.5).abs() < 1e-13);
            }
            if m > 1 {
                let d = s.derivative(1).unwrap();
                assert!(d.eval(0.3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let coeffs: Vec<f64> = (0..12).map(|k| ((k * 7) % 5) as f64 - 2.0).collect();
        let s = SplineFn::new(4, 0.0, coeffs);
        let d = s.derivative(1).unwrap();
        let h = 1e-6;
        for &x in &[0.13, 0.47, 0.81] {
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - d.eval(x)).abs() < 1e-5 * (1.0 + fd.abs()));
        }
        assert!(s.derivative(4).is_none());
    }
}
