use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

/// Maps any rational to its representative in `[0, 1)`.
pub fn reduce_mod_one(q: &Rational) -> Rational {
    let num = q.numer().mod_floor(q.denom());
    Rational::new(num, *q.denom())
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `k / 2^j`.
pub fn dyadic(k: i64, j: u32) -> Rational {
    Rational::new(k, 1i64 << j)
}
