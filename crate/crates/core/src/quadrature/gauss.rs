use std::sync::OnceLock;

/// Gauss-Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Rule of the given order, nodes from Newton's method on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussRule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Approximates `int_a^b g`.
    #[inline]
    pub fn integrate<G: Fn(f64) -> f64 + ?Sized>(&self, g: &G, a: f64, b: f64) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(a + len * x);
        }
        acc * len
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The order-16 rule used on every panel.
pub fn gl16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(16))
}

/// Lower-order companion rule for cheap error estimates.
pub fn gl8() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_nodes_sorted() {
        for order in [1, 2, 5, 8, 16] {
            let r = GaussRule::new(order);
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_31() {
        let r = gl16();
        for k in 0..32 {
            let got = r.integrate(&|x: f64| x.powi(k), 0.0, 1.0);
            assert!((got - 1.0 / (k + 1) as f64).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn two_point_rule_matches_closed_form() {
        let r = GaussRule::new(2);
        let s = 0.5 / 3f64.sqrt();
        assert!((r.nodes[0] - (0.5 - s)).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }
}
