//! The dyadic unit flow from 0 to infinity and its exact verification.

use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};

/// Exact dyadic rational `num / 2^exp`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.reduce();
        d
    }

    /// `2^(−exp)`.
    pub fn pow2_inv(exp: u32) -> Self {
        Dyadic { num: 1, exp }
    }

    fn reduce(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 * 2f64.powi(-(self.exp as i32))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = self.num << (exp - self.exp);
        let b = rhs.num << (exp - rhs.exp);
        Dyadic::new(a + b, exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Index of the dyadic block containing `u`: `B_0 = {0}`,
/// `B_i = {2^(i−1), …, 2^i − 1}` and `B_{−i} = −B_i`.
pub fn block_index(u: i64) -> i32 {
    match u.signum() {
        0 => 0,
        1 => (64 - u.leading_zeros()) as i32,
        _ => -((64 - u.unsigned_abs().leading_zeros()) as i32),
    }
}

/// The flow `θ(u, v)`: ½ from 0 to ±1, `2^(−2|i|)` from each vertex of
/// `B_i` to each vertex of the next block outward, antisymmetric, zero
/// otherwise.
pub fn dyadic_flow(u: i64, v: i64) -> Dyadic {
    let (i, j) = (block_index(u), block_index(v));
    if i == 0 && j.abs() == 1 {
        return Dyadic::pow2_inv(1);
    }
    if j == 0 && i.abs() == 1 {
        return -Dyadic::pow2_inv(1);
    }
    if i != 0 && i.signum() == j.signum() {
        if j.abs() == i.abs() + 1 {
            return Dyadic::pow2_inv(2 * i.unsigned_abs());
        }
        if i.abs() == j.abs() + 1 {
            return -Dyadic::pow2_inv(2 * j.unsigned_abs());
        }
    }
    Dyadic::ZERO
}

const MAX_LISTED: usize = 16;

/// Outcome of checking the flow axioms on a finite window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowReport {
    pub i_max: u32,
    /// Pairs `(u, v)` with `|u|, |v| < 2^i_max` checked for antisymmetry.
    pub antisymmetry_pairs: u64,
    pub antisymmetry_violations: Vec<(i64, i64)>,
    /// Vertices `0 < |u| < 2^(i_max − 1)` whose net out-flow was summed.
    pub kirchhoff_vertices: u64,
    pub kirchhoff_violations: Vec<(i64, Dyadic)>,
    pub source_divergence: Dyadic,
    /// Pairs `u ≥ 0, w ≥ 1` with `u + w ≥ 4u`, other than `(0, 1)`.
    pub vanishing_pairs: u64,
    pub vanishing_violations: Vec<(i64, i64)>,
}

impl FlowReport {
    pub fn ok(&self) -> bool {
        self.antisymmetry_violations.is_empty()
            && self.kirchhoff_violations.is_empty()
            && self.source_divergence == Dyadic::ONE
            && self.vanishing_violations.is_empty()
    }
}

fn push_limited<T>(v: &mut Vec<T>, item: T) {
    if v.len() < MAX_LISTED {
        v.push(item);
    }
}

/// Checks antisymmetry, conservation, the unit source and the vanishing of
/// long forward edges, all in exact arithmetic, on vertices `|u| < 2^i_max`.
pub fn verify_flow(i_max: u32) -> FlowReport {
    assert!((2..=30).contains(&i_max), "i_max must lie in 2..=30");
    let r = (1i64 << i_max) - 1;
    let mut report = FlowReport {
        i_max,
        antisymmetry_pairs: 0,
        antisymmetry_violations: Vec::new(),
        kirchhoff_vertices: 0,
        kirchhoff_violations: Vec::new(),
        source_divergence: Dyadic::ZERO,
        vanishing_pairs: 0,
        vanishing_violations: Vec::new(),
    };

    for u in -r..=r {
        for v in -r..=r {
            if (dyadic_flow(u, v) + dyadic_flow(v, u)) != Dyadic::ZERO {
                push_limited(&mut report.antisymmetry_violations, (u, v));
            }
        }
    }
    report.antisymmetry_pairs = ((2 * r + 1) * (2 * r + 1)) as u64;

    // Every neighbour of a vertex with |u| < 2^(i_max − 1) lies in the window.
    let inner = (1i64 << (i_max - 1)) - 1;
    for u in (-inner..=inner).filter(|u| *u != 0) {
        let mut net = Dyadic::ZERO;
        for v in -r..=r {
            net = net + dyadic_flow(u, v);
        }
        if !net.is_zero() {
            push_limited(&mut report.kirchhoff_violations, (u, net));
        }
        report.kirchhoff_vertices += 1;
    }

    let mut source = Dyadic::ZERO;
    for v in -r..=r {
        source = source + dyadic_flow(0, v);
    }
    report.source_divergence = source;

    for u in 0..=r {
        for w in 1..=(r - u) {
            if u + w >= 4 * u && !(u == 0 && w == 1) {
                report.vanishing_pairs += 1;
                if !dyadic_flow(u, u + w).is_zero() {
                    push_limited(&mut report.vanishing_violations, (u, w));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks() {
        assert_eq!(block_index(0), 0);
        assert_eq!(block_index(1), 1);
        assert_eq!(block_index(3), 2);
        assert_eq!(block_index(4), 3);
        assert_eq!(block_index(-4), -3);
        assert_eq!(block_index(-7), -3);
        assert_eq!(block_index(i64::MAX), 63);
    }

    #[test]
    fn flow_values() {
        let half = Dyadic::new(1, 1);
        assert_eq!(dyadic_flow(0, 1), half);
        assert_eq!(dyadic_flow(0, -1), half);
        assert_eq!(dyadic_flow(1, 0), -half);
        assert_eq!(dyadic_flow(1, 2), Dyadic::new(1, 2));
        assert_eq!(dyadic_flow(1, 3), Dyadic::new(1, 2));
        assert_eq!(dyadic_flow(2, 5), Dyadic::new(1, 4));
        assert_eq!(dyadic_flow(5, 2), -Dyadic::new(1, 4));
        assert_eq!(dyadic_flow(-2, -5), Dyadic::new(1, 4));
        assert_eq!(dyadic_flow(2, 8), Dyadic::ZERO);
        assert_eq!(dyadic_flow(1, -2), Dyadic::ZERO);
        assert_eq!(dyadic_flow(0, 2), Dyadic::ZERO);
    }

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let q = Dyadic::new(1, 2);
        assert_eq!(q + q, Dyadic::new(1, 1));
        assert_eq!(q + q + q + q, Dyadic::ONE);
        assert_eq!(Dyadic::new(6, 3), Dyadic::new(3, 2));
        assert_eq!((q + -q), Dyadic::ZERO);
        assert_eq!(Dyadic::new(3, 2).to_string(), "3/2^2");
    }

    #[test]
    fn small_window_passes() {
        let r = verify_flow(6);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.source_divergence, Dyadic::ONE);
        assert!(r.vanishing_pairs > 0);
    }
}
