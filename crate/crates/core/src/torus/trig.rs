use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::wrap;

/// Trigonometric polynomial `sum_{l=lo}^{lo+len-1} c_l e^{2 pi i l x}`.
///
/// The frequency window may be asymmetric, which is how the dyadic
/// interpolants with range `[-2^{j-1}, 2^{j-1} - 1]` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        TrigPoly { lo, coeffs }
    }

    /// Coefficients for `l = -n..=n`; `coeffs.len()` must be odd.
    pub fn symmetric(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "symmetric coefficient vector must have odd length");
        let n = (coeffs.len() / 2) as i64;
        TrigPoly { lo: -n, coeffs }
    }

    pub fn zero() -> Self {
        TrigPoly::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            lo: 0,
            coeffs: vec![Complex64::new(c, 0.0)],
        }
    }

    /// Random real polynomial of the given degree; coefficient `l` has
    /// standard deviation roughly `(1 + |l|)^{-decay}`.
    pub fn random_real<R: Rng + ?Sized>(degree: usize, decay: f64, rng: &mut R) -> Self {
        let n = degree as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        let mut gauss = || {
            // Box-Muller
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let v: f64 = rng.gen();
            (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
        };
        coeffs[degree] = Complex64::new(gauss(), 0.0);
        for l in 1..=n {
            let s = (1.0 + l as f64).powf(-decay);
            let c = Complex64::new(gauss() * s, gauss() * s) * 0.5;
            coeffs[(n + l) as usize] = c;
            coeffs[(n - l) as usize] = c.conj();
        }
        TrigPoly { lo: -n, coeffs }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Largest `|l|` in the frequency window.
    pub fn degree(&self) -> usize {
        self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as usize
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, l: i64) -> Complex64 {
        let idx = l - self.lo;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let x = wrap(x);
        let step = Complex64::from_polar(1.0, 2.0 * PI * x);
        let mut z = Complex64::from_polar(1.0, 2.0 * PI * x * self.lo as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * z;
            // re-anchor periodically to keep the rotation from drifting
            if i % 64 == 63 {
                z = Complex64::from_polar(1.0, 2.0 * PI * x * (self.lo + i as i64 + 1) as f64);
            } else {
                z *= step;
            }
        }
        acc
    }

    /// Exact `s`-th derivative: coefficients multiplied by `(2 pi i l)^s`.
    pub fn derivative(&self, s: u32) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = (self.lo + i as i64) as f64;
                c * Complex64::new(0.0, 2.0 * PI * l).powu(s)
            })
            .collect();
        TrigPoly { lo: self.lo, coeffs }
    }

    pub fn scale(&self, c: f64) -> TrigPoly {
        TrigPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &TrigPoly, sign: f64) -> TrigPoly {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi)
            .map(|l| self.coeff(l) + other.coeff(l) * sign)
            .collect();
        TrigPoly { lo, coeffs }
    }

    /// `(sum |c_l|^2)^{1/2}`, which equals the `L_2` norm.
    pub fn parseval_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Whether `c_{-l} = conj(c_l)` within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        (self.lo..=self.hi()).all(|l| (self.coeff(l) - self.coeff(-l).conj()).norm() <= tol)
    }
}

/// Dirichlet kernel `sum_{|l|<=n} e^{2 pi i l x}`.
///
/// Uses `sin((2n+1) pi x) / sin(pi x)` except where `|sin(pi x)| < 1e-8`,
/// where the cosine sum is evaluated directly.
pub fn dirichlet_kernel(n: usize, x: f64) -> f64 {
    let x = wrap(x);
    let s = (PI * x).sin();
    if s.abs() < 1e-8 {
        1.0 + 2.0 * (1..=n).map(|l| (2.0 * PI * l as f64 * x).cos()).sum::<f64>()
    } else {
        ((2 * n + 1) as f64 * PI * x).sin() / s
    }
}
