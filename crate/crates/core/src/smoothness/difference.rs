use crate::torus::{rational_to_f64, Breakpoint, PeriodicFunction, Rational};

/// Which view of a function a pointwise evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    /// Exact pointwise values at rational points.
    Exact,
    /// The almost-everywhere representative.
    Ae,
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// `Delta_h^r f(x) = sum_nu C(r, nu) (-1)^nu f(x + (r - nu) h)`.
pub fn finite_difference(f: &PeriodicFunction, x: &Rational, h: &Rational, r: usize, view: View) -> f64 {
    (0..=r)
        .map(|nu| {
            let arg = *x + *h * Rational::from_integer((r - nu) as i64);
            let v = match view {
                View::Exact => f.eval_exact(&arg),
                View::Ae => f.eval_ae(rational_to_f64(&arg)),
            };
            sign(nu) * binomial(r, nu) * v
        })
        .sum()
}

/// `Delta_h^r f(x)` on the a.e. view at real arguments.
pub fn finite_difference_ae(f: &PeriodicFunction, x: f64, h: f64, r: usize) -> f64 {
    (0..=r)
        .map(|nu| sign(nu) * binomial(r, nu) * f.eval_ae(x + (r - nu) as f64 * h))
        .sum()
}

pub(crate) fn sign(nu: usize) -> f64 {
    if nu % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Points of `[0, 1]` where `x -> Delta_h^r f(x)` may fail to be smooth:
/// the breakpoints of `f` shifted by `-k h`, `k = 0..=r`.
pub fn difference_breakpoints(f: &PeriodicFunction, h: f64, r: usize) -> Vec<Breakpoint> {
    let mut out = Vec::new();
    for k in 0..=r {
        let shift = k as f64 * h;
        for bp in f.breakpoints_in(shift, 1.0 + shift) {
            out.push(Breakpoint {
                x: (bp.x - shift).clamp(0.0, 1.0),
                ..bp
            });
        }
    }
    out
}
