//! Truncated sums over the integer lattice with controlled tails.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::Decay;
use crate::error::{Error, Result};
use crate::quadrature::gl12;

/// Values that can be accumulated in lattice sums.
pub trait Accum:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> f64;
}

impl Accum for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accum for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Truncation of a sum over `|k|_inf <= K` and the estimated remainder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSumParams {
    pub truncation: usize,
    pub tail_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// Terms beyond the cube are below the tolerance.
    Negligible,
    /// One-dimensional power tail summed by Euler–Maclaurin.
    EulerMaclaurin,
    /// Power tail in several dimensions extrapolated from the outer shells.
    Shells,
}

/// Default relative tolerance for lattice sums.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Sums of the form `sum_{k != 0} f(center + step k)`.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub n: usize,
    pub params: LatticeSumParams,
    pub tail: TailModel,
    /// Nonzero lattice points of the cube, grouped by shell `|k|_inf`.
    points: Vec<i32>,
    shell_starts: Vec<usize>,
}

fn surface(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(nf / 2.0) / statrs::function::gamma::gamma(nf / 2.0)
}

impl Lattice {
    /// Plans the truncation for summands bounded by `|x|^growth` times the
    /// decay envelope.
    pub fn for_decay(n: usize, decay: Decay, growth: f64, tol: f64) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::Unsupported(format!("lattice sums in dimension {n}")));
        }
        let target = (1.0 / tol.max(1e-300)).ln();
        let nf = n as f64;
        let width = |k: usize| (2 * k + 1) as f64;
        let (k, bound, tail) = match decay {
            Decay::Gaussian { c } => {
                // First omitted shell sits at distance >= 2 pi (K+1) - pi from
                // any point of the cell.
                let mut k = 2;
                loop {
                    let d = PI * (width(k) + 1.0) - PI;
                    let log_term = -(c * d).powi(2)
                        + growth.max(0.0) * d.ln()
                        + (nf - 1.0) * width(k + 1).ln()
                        + (2.0 * nf).ln();
                    if -log_term >= target + 2.0 || k >= 400 {
                        break (k, log_term.exp(), TailModel::Negligible);
                    }
                    k += 1;
                }
            }
            Decay::Exponential { c } => {
                let mut k = 2;
                loop {
                    let d = PI * (width(k) + 1.0) - PI;
                    let log_term = -c * d
                        + growth.max(0.0) * d.ln()
                        + (nf - 1.0) * width(k + 1).ln()
                        + (2.0 * nf).ln()
                        + (1.0 / (1.0 - (-2.0 * PI * c).exp())).ln();
                    if -log_term >= target + 2.0 || k >= 4000 {
                        break (k, log_term.exp(), TailModel::Negligible);
                    }
                    k += 1;
                }
            }
            Decay::Power { exponent } => {
                let effective = exponent - growth;
                if effective <= nf {
                    return Err(Error::TailNotSummable { decay: exponent, needed: nf + growth });
                }
                if n == 1 {
                    let k = 32usize;
                    let x = (k + 1) as f64;
                    let rising: f64 = (0..5).map(|i| effective + i as f64).product();
                    let bound = 2.0 * rising / 30240.0 * (2.0 * PI * x).powf(-effective) / x.powi(5);
                    (k, bound, TailModel::EulerMaclaurin)
                } else {
                    let k = match n {
                        2 => 24,
                        3 => 12,
                        _ => 6,
                    };
                    let kf = k as f64;
                    let raw = surface(n) * (2.0 * PI).powf(-effective) * kf.powf(nf - effective)
                        / (effective - nf);
                    (k, 0.01 * raw, TailModel::Shells)
                }
            }
        };
        Ok(Self::with_truncation(n, k, bound, tail))
    }

    pub fn with_truncation(n: usize, k: usize, tail_bound: f64, tail: TailModel) -> Self {
        let kk = k as i32;
        let mut by_shell: Vec<Vec<i32>> = vec![Vec::new(); k + 1];
        let side = 2 * k + 1;
        let total = side.pow(n as u32);
        let mut idx = vec![-kk; n];
        for _ in 0..total {
            let shell = idx.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as usize;
            if shell > 0 {
                by_shell[shell].extend_from_slice(&idx);
            }
            for d in 0..n {
                idx[d] += 1;
                if idx[d] <= kk {
                    break;
                }
                idx[d] = -kk;
            }
        }
        let mut points = Vec::with_capacity((total - 1) * n);
        let mut shell_starts = vec![0usize];
        for shell in by_shell.into_iter().skip(1) {
            points.extend(shell);
            shell_starts.push(points.len() / n);
        }
        Lattice {
            n,
            params: LatticeSumParams { truncation: k, tail_bound },
            tail,
            points,
            shell_starts,
        }
    }

    pub fn truncation(&self) -> usize {
        self.params.truncation
    }

    /// `sum_{k != 0} f(center + step k)` including the tail correction.
    pub fn sum_nonzero<T: Accum>(&self, center: &[f64], step: f64, f: impl Fn(&[f64]) -> T) -> T {
        let n = self.n;
        if n == 1 {
            return self.sum_line(center[0], step, |x| f(&[x]));
        }
        let mut buf = [0.0f64; 8];
        let mut shells = Vec::with_capacity(self.shell_starts.len());
        let mut total = T::default();
        for w in self.shell_starts.windows(2) {
            let mut s = T::default();
            for p in w[0]..w[1] {
                let k = &self.points[p * n..(p + 1) * n];
                for d in 0..n {
                    buf[d] = center[d] + step * k[d] as f64;
                }
                s = s + f(&buf[..n]);
            }
            total = total + s;
            shells.push(s);
        }
        if self.tail == TailModel::Shells {
            total = total + shell_tail(&shells);
        }
        total
    }

    /// `sum_{k != 0} f(x0 + step k)` on the line.
    pub fn sum_line<T: Accum>(&self, x0: f64, step: f64, f: impl Fn(f64) -> T) -> T {
        let k = self.params.truncation;
        let mut total = T::default();
        for j in 1..=k {
            let s = step * j as f64;
            total = total + f(x0 + s) + f(x0 - s);
        }
        if self.tail == TailModel::EulerMaclaurin {
            let a = (k + 1) as f64;
            total = total
                + em_tail(&|x: f64| f(x0 + step * x), a, total.magnitude())
                + em_tail(&|x: f64| f(x0 - step * x), a, total.magnitude());
        }
        total
    }
}

/// Tail of a shell sequence `S_m ~ C m^beta`, estimated from the last two
/// shells.
fn shell_tail<T: Accum>(shells: &[T]) -> T {
    let m = shells.len();
    if m < 3 {
        return T::default();
    }
    let last = shells[m - 1];
    let prev = shells[m - 2];
    let (a, b) = (last.magnitude(), prev.magnitude());
    if a == 0.0 || b == 0.0 {
        return T::default();
    }
    let km = m as f64;
    let beta = (a / b).ln() / (km / (km - 1.0)).ln();
    if beta >= -1.0 {
        return T::default();
    }
    // sum_{j > K} (j/K)^beta ~ int_{K+1/2}^inf (x/K)^beta dx
    let factor = km * ((km + 0.5) / km).powf(beta + 1.0) / (-beta - 1.0);
    last * factor
}

/// `sum_{j >= 0} F(a + j)` for a smooth, eventually monotone `F`, by
/// Euler–Maclaurin with the integral on geometric panels. `scale` sets the
/// level at which further panels are negligible.
pub fn em_tail<T: Accum>(f: &impl Fn(f64) -> T, a: f64, scale: f64) -> T {
    let e = 0.25;
    let v: Vec<T> = (-3..=3).map(|i| f(a + e * i as f64)).collect();
    let (m3, m2, m1, f0, p1, p2, p3) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
    let d1 = (p3 - p2 * 9.0 + p1 * 45.0 - m1 * 45.0 + m2 * 9.0 - m3) * (1.0 / (60.0 * e));
    let d3 = (p2 * 8.0 - p3 - p1 * 13.0 + m1 * 13.0 - m2 * 8.0 + m3) * (1.0 / (8.0 * e.powi(3)));
    let d5 = (p3 - p2 * 4.0 + p1 * 5.0 - m1 * 5.0 + m2 * 4.0 - m3) * (1.0 / (2.0 * e.powi(5)));
    tail_integral(f, a, scale) + f0 * 0.5 - d1 * (1.0 / 12.0) + d3 * (1.0 / 720.0)
        - d5 * (1.0 / 30240.0)
}

/// `int_a^inf F` on panels `[x, 2x]` with a geometric remainder.
pub fn tail_integral<T: Accum>(f: &impl Fn(f64) -> T, a: f64, scale: f64) -> T {
    let rule = gl12();
    let panel = |lo: f64, hi: f64| -> T {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut s = T::default();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s = s + f(c + h * x) * (w * h);
        }
        s
    };
    let mut total = T::default();
    let mut x = a;
    let mut prev: Option<T> = None;
    let mut prev_ratio = f64::NAN;
    for _ in 0..400 {
        let p = panel(x, 2.0 * x);
        total = total + p;
        x *= 2.0;
        let mag = p.magnitude();
        let reference = scale.max(total.magnitude());
        if mag <= 1e-18 * reference {
            return total;
        }
        if let Some(q) = prev {
            let ratio = mag / q.magnitude();
            if ratio < 0.9 && (ratio - prev_ratio).abs() <= 1e-6 * ratio {
                return total + p * (ratio / (1.0 - ratio));
            }
            prev_ratio = ratio;
        }
        prev = Some(p);
    }
    total
}
