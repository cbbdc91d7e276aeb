//! Gamma, log-gamma and Beta functions (Lanczos approximation, g = 7, n = 9).

use crate::scalar::{lit, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(z: T) -> T {
    let mut acc = lit::<T>(LANCZOS[0]);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + lit::<T>(c) / (z + T::from_usize(k).unwrap() - T::one());
    }
    acc
}

/// Gamma function. Poles at non-positive integers return NaN.
pub fn gamma<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x <= T::zero() && x == x.floor() {
        return T::nan();
    }
    if x < half {
        // reflection
        return T::PI() / ((T::PI() * x).sin() * gamma(T::one() - x));
    }
    let t = x + lit::<T>(LANCZOS_G) - half;
    let two_pi_sqrt = (lit::<T>(2.0) * T::PI()).sqrt();
    // split the power to delay overflow
    let p = t.powf((x - half) * half);
    two_pi_sqrt * p * (p * (-t).exp()) * lanczos_sum(x)
}

/// Natural logarithm of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x <= T::zero() && x == x.floor() {
        return T::infinity();
    }
    if x < half {
        let s = (T::PI() * x).sin().abs();
        return T::PI().ln() - s.ln() - ln_gamma(T::one() - x);
    }
    let t = x + lit::<T>(LANCZOS_G) - half;
    half * (lit::<T>(2.0) * T::PI()).ln() + (x - half) * t.ln() - t + lanczos_sum(x).ln()
}

/// Beta function B(a, b) for a, b > 0.
pub fn beta<T: Real>(a: T, b: T) -> T {
    let s = a + b;
    if s < lit(150.0) && a < lit(150.0) && b < lit(150.0) {
        gamma(a) * gamma(b) / gamma(s)
    } else {
        (ln_gamma(a) + ln_gamma(b) - ln_gamma(s)).exp()
    }
}

/// Falling factorial x (x − 1) ⋯ (x − k + 1).
pub fn falling<T: Real>(x: T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, j| acc * (x - T::from_usize(j).unwrap()))
}

/// Generalized binomial coefficient C(x, k) for real x.
pub fn binom<T: Real>(x: T, k: usize) -> T {
    let mut acc = T::one();
    for j in 0..k {
        let jj = T::from_usize(j).unwrap();
        acc = acc * (x - jj) / (jj + T::one());
    }
    acc
}
