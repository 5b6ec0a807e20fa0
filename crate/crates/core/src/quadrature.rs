//! Adaptive Gauss–Kronrod quadrature on graded meshes and tensor rules for
//! the plane.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Settings shared by the one- and two-dimensional integrators.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureGrid {
    /// Number of geometric refinement levels (ratio 1/2) towards the origin.
    pub levels: u32,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Radius of the initial far-field mesh; grown by doubling until the
    /// outer panels are negligible.
    pub far_radius: f64,
    /// Gauss–Legendre order per panel for tensor rules in the plane.
    pub tensor_order: usize,
    /// Refinement levels per axis for tensor rules.
    pub tensor_levels: u32,
    /// Trapezoid points on the circle for polar rules.
    pub angular: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            levels: 40,
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_intervals: 40_000,
            far_radius: 64.0,
            tensor_order: 10,
            tensor_levels: 14,
            angular: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;
    fn add(self, o: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + o.value,
            error: self.error + o.error,
            evaluations: self.evaluations + o.evaluations,
            converged: self.converged && o.converged,
        }
    }
}

pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre rule on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[n - 1 - i] = weights[i];
    }
    GaussLegendre { nodes, weights }
}

pub(crate) fn gl12() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(12))
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let v1 = f(center - dx);
        let v2 = f(center + dx);
        f1[j] = v1;
        f2[j] = v2;
        resk += WGK[j] * (v1 + v2);
        resabs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (v1 + v2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = resk * half;
    let resasc = resasc * half.abs();
    let resabs = resabs * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive GK15 over the partition given by `breakpoints`.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        evaluations += 15;
        value += v;
        error += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut converged = true;
    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= max_intervals {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            converged = false;
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evaluations += 30;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        // Re-sum occasionally to keep the running totals honest.
        if heap.len() % 512 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    value = heap.iter().map(|p| p.value).sum();
    error = heap.iter().map(|p| p.error).sum();
    QuadResult { value, error, evaluations, converged: converged && error.is_finite() }
}

/// Breakpoints `0, r 2^{-levels}, ..., r/2, r` (and their mirror images).
pub fn graded_breakpoints(radius: f64, levels: u32, symmetric: bool) -> Vec<f64> {
    let mut pos: Vec<f64> = (0..=levels).rev().map(|i| radius * 0.5f64.powi(i as i32)).collect();
    pos.insert(0, 0.0);
    if !symmetric {
        return pos;
    }
    let mut all: Vec<f64> = pos.iter().skip(1).rev().map(|x| -x).collect();
    all.extend(pos);
    all
}

/// Integral over `[-radius, radius]` graded towards the origin.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: &F, radius: f64, grid: &QuadratureGrid) -> QuadResult {
    let bp = graded_breakpoints(radius, grid.levels, true);
    adaptive(f, &bp, grid.rel_tol, grid.abs_tol, grid.max_intervals)
}

/// Integral over `[0, inf)` for integrands decaying at infinity; `scale`
/// fixes the mesh unit.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: &F, scale: f64, grid: &QuadratureGrid) -> QuadResult {
    let far = grid.far_radius * scale;
    let bp = graded_breakpoints(far, grid.levels, false);
    let mut result = adaptive(f, &bp, grid.rel_tol, grid.abs_tol, grid.max_intervals);
    let mut x = far;
    let mut previous = f64::NAN;
    for _ in 0..200 {
        let panel = adaptive(f, &[x, 2.0 * x], grid.rel_tol, grid.abs_tol, grid.max_intervals);
        result = result + panel;
        x *= 2.0;
        let small = panel.value.abs() <= 0.01 * grid.rel_tol * result.value.abs()
            || panel.value == 0.0;
        if small {
            let ratio = panel.value.abs() / previous.abs();
            if ratio.is_finite() && ratio < 1.0 && ratio > 0.0 {
                let rest = panel.value * ratio / (1.0 - ratio);
                result.value += rest;
                result.error += rest.abs();
            }
            return result;
        }
        previous = panel.value;
    }
    result.converged = false;
    result
}

/// Integral over the real line.
pub fn integrate_line<F: Fn(f64) -> f64>(f: &F, scale: f64, grid: &QuadratureGrid) -> QuadResult {
    let right = integrate_half_line(f, scale, grid);
    let left = integrate_half_line(&|x| f(-x), scale, grid);
    left + right
}

fn axis_nodes(radius: f64, levels: u32, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let bp = graded_breakpoints(radius, levels, true);
    let mut out = Vec::with_capacity(bp.len() * order);
    for w in bp.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            out.push((c + h * x, h * wt));
        }
    }
    out
}

fn tensor_sum<F: Fn(f64, f64) -> f64 + Sync>(f: &F, axis: &[(f64, f64)]) -> f64 {
    axis.par_iter()
        .map(|&(x, wx)| axis.iter().map(|&(y, wy)| wy * f(x, y)).sum::<f64>() * wx)
        .sum()
}

/// Tensor Gauss–Legendre rule over the square `[-radius, radius]^2`, graded
/// towards the axes through the origin. The error is the difference to a
/// lower-order rule on the same panels.
pub fn integrate_square<F: Fn(f64, f64) -> f64 + Sync>(
    f: &F,
    radius: f64,
    grid: &QuadratureGrid,
) -> QuadResult {
    let fine = axis_nodes(radius, grid.tensor_levels, grid.tensor_order);
    let coarse = axis_nodes(radius, grid.tensor_levels, grid.tensor_order.saturating_sub(4).max(2));
    let value = tensor_sum(f, &fine);
    let check = tensor_sum(f, &coarse);
    let error = (value - check).abs();
    QuadResult {
        value,
        error,
        evaluations: fine.len().pow(2) + coarse.len().pow(2),
        converged: error <= grid.rel_tol.max(1e-8) * value.abs() * 1e3 || error == 0.0,
    }
}

/// Integral over the plane in polar coordinates; the angular rule is the
/// trapezoid rule, which is spectrally accurate for smooth periodic data.
pub fn integrate_plane<F: Fn(f64, f64) -> f64 + Sync>(
    f: &F,
    scale: f64,
    grid: &QuadratureGrid,
) -> QuadResult {
    let ring = |r: f64, m: usize| -> f64 {
        let dt = 2.0 * PI / m as f64;
        (0..m)
            .map(|i| {
                let t = (i as f64 + 0.5) * dt;
                f(r * t.cos(), r * t.sin())
            })
            .sum::<f64>()
            * dt
            * r
    };
    let m = grid.angular;
    let fine = integrate_half_line(&|r| ring(r, m), scale, grid);
    let coarse = integrate_half_line(&|r| ring(r, m / 2), scale, grid);
    QuadResult {
        value: fine.value,
        error: fine.error + (fine.value - coarse.value).abs(),
        evaluations: fine.evaluations * m + coarse.evaluations * m / 2,
        converged: fine.converged,
    }
}
