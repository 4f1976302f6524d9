//! Globally adaptive Gauss–Kronrod quadrature on finite intervals.
//!
//! Every interval is integrated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss rule gives the error estimate. The subinterval with the
//! largest estimated error is bisected until the summed estimate meets
//! `max(abs, rel · |I|)`.
//!
//! Integrands with kinks (for example `(·)₊^p` at the zero of its base) should
//! be split there with [`integrate_with_breaks`]; the rule then only sees
//! smooth pieces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        abs: 1e-12,
        rel: 1e-10,
    };
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

const MAX_SEGMENTS: usize = 20_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` (either orientation).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` from `points[0]` to `points[last]`, treating every interior
/// point as a forced subdivision. Points must be monotone (either direction).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    if points.len() < 2 {
        return Ok(0.0);
    }
    let (first, last) = (points[0], points[points.len() - 1]);
    if !first.is_finite() || !last.is_finite() {
        return Err(Error::Parameter(format!(
            "quadrature needs finite limits, got [{first}, {last}]"
        )));
    }
    let sign = if last < first { -1.0 } else { 1.0 };
    let mut sorted: Vec<f64> = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in sorted.windows(2) {
        let seg = kronrod15(&f, w[0], w[1]);
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }

    // Segments too narrow to split further are retired with their error.
    let mut retired_error = 0.0;
    while error > tol.abs.max(tol.rel * value.abs()) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(1.0)
        {
            retired_error += worst.error;
            if retired_error > tol.abs.max(tol.rel * value.abs()) {
                return Err(Error::Quadrature {
                    a: first,
                    b: last,
                    error,
                });
            }
            continue;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() > MAX_SEGMENTS {
            return Err(Error::Quadrature {
                a: first,
                b: last,
                error,
            });
        }
    }
    // Re-sum to shed the drift of the running updates.
    let total: f64 = heap.iter().map(|s| s.value).sum();
    Ok(sign * total)
}
