//! Special functions used by the tail and exponent computations.
//!
//! Zeta values come from Euler–Maclaurin summation (valid on the whole
//! real line except the pole at 1) with the functional equation taking over
//! for negative arguments. The power–cosine sums
//! `S(s, θ) = Σ_{n≥1} n^{-s} (1 − cos nθ)` are evaluated through the
//! convergent polylogarithm expansion around θ = 0, which is what makes the
//! characteristic exponent of a heavy-tailed lattice law computable at
//! ξ ≈ 1e−6 without summing billions of terms.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

/// Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{j≥0} (j + a)^{-s}` for `a > 0`, `s ≠ 1`.
///
/// For `s > 1` this is a convergent tail sum; for other `s` it is the
/// analytic continuation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0);
    if s == 1.0 {
        return f64::INFINITY;
    }
    // Shift so the Euler–Maclaurin remainder is negligible.
    let shift = 16usize.max((s.abs() as usize) + 8);
    let mut head = 0.0;
    for j in 0..shift {
        head += (j as f64 + a).powf(-s);
    }
    let x = shift as f64 + a;
    let mut sum = head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Σ B_2k / (2k)! · s (s+1) ... (s+2k−2) · x^{-s-2k+1}
    let mut rising = s; // s (s+1) ... (s+2k-2)
    let mut fact = 2.0; // (2k)!
    let mut xpow = x.powf(-s - 1.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * xpow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + k2 - 1.0) * (s + k2);
        fact *= (k2 + 1.0) * (k2 + 2.0);
        xpow /= x * x;
    }
    sum
}

/// Riemann zeta on the real line.
pub fn zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s == 0.0 {
        return -0.5;
    }
    if s < 0.0 {
        // Trivial zeros.
        if s == s.floor() && (s as i64) % 2 == 0 {
            return 0.0;
        }
        let t = 1.0 - s;
        return 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(t) * zeta(t);
    }
    hurwitz_zeta(s, 1.0)
}

/// `1 − cos x` without cancellation for small `x`.
pub fn one_minus_cos(x: f64) -> f64 {
    let h = (0.5 * x).sin();
    2.0 * h * h
}

/// `C(s) = ∫_0^∞ (1 − cos t) t^{-s} dt` for `1 < s < 3`.
pub fn one_minus_cos_mellin(s: f64) -> f64 {
    debug_assert!(s > 1.0 && s < 3.0);
    if (s - 2.0).abs() < 1e-12 {
        return PI / 2.0;
    }
    -PI / (2.0 * gamma(s) * (PI * s / 2.0).cos())
}

/// Distance below which `s` is treated as sitting on an odd-integer pole of
/// the polylogarithm expansion.
const POLE_GUARD: f64 = 1e-6;
const POLE_STEP: f64 = 1e-4;

/// `S(s, θ) = Σ_{n≥1} n^{-s} (1 − cos nθ)` for `s > 1`.
///
/// θ is reduced to `[0, π]` first (the sum is even and 2π-periodic).
pub fn power_cosine_sum(s: f64, theta: f64) -> f64 {
    debug_assert!(s > 1.0);
    let t = reduce_angle(theta);
    if t == 0.0 {
        return 0.0;
    }
    let nearest_odd = 2.0 * ((s - 1.0) / 2.0).round() + 1.0;
    if nearest_odd >= 3.0 && (s - nearest_odd).abs() < POLE_GUARD {
        // Both the Γ term and one ζ term blow up at odd integers; the sum is
        // analytic in s, so a symmetric average recovers it to O(h²).
        return 0.5
            * (power_cosine_sum_regular(nearest_odd - POLE_STEP, t)
                + power_cosine_sum_regular(nearest_odd + POLE_STEP, t));
    }
    power_cosine_sum_regular(s, t)
}

fn power_cosine_sum_regular(s: f64, t: f64) -> f64 {
    // ζ(s) − Re Li_s(e^{iθ}) with
    // Li_s(e^{iθ}) = Γ(1−s)(−iθ)^{s−1} + Σ_k ζ(s−k)(iθ)^k / k!.
    let singular = -PI / (2.0 * gamma(s) * (PI * s / 2.0).cos()) * t.powf(s - 1.0);
    let mut series = 0.0;
    let mut power = 1.0; // θ^{2j} / (2j)!
    for j in 1..80 {
        let jj = 2.0 * j as f64;
        power *= t * t / ((jj - 1.0) * jj);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = zeta(s - jj) * sign * power;
        series += term;
        if term.abs() < 1e-17 * (series.abs() + singular.abs()) && j > 3 {
            break;
        }
    }
    let value = singular - series;
    value.max(0.0)
}

/// Reduce an angle to `[0, π]` using evenness and 2π-periodicity.
pub fn reduce_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta.abs() % two_pi;
    if t > PI {
        t = two_pi - t;
    }
    t
}

/// Smallest integer not less than `num / den` for positive `den`.
pub fn ceil_div(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    if num.rem_euclid(den) == 0 {
        q
    } else {
        q + 1
    }
}
