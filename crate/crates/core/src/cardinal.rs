//! The lattice Lagrange function: its symbol on the torus, Fourier
//! coefficients of the inverse periodisation, and spatial samples.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisFunction;
use crate::error::{Error, Result};
use crate::fft;
use crate::fit::{loglog, LineFit};
use crate::lattice::{Lattice, LatticeSumParams, DEFAULT_TOL};

/// Reduces each coordinate into `[-pi, pi]`; returns whether any coordinate
/// moved.
pub fn reduce_to_cell(eta: &[f64], out: &mut [f64]) -> bool {
    let mut moved = false;
    for (o, &e) in out.iter_mut().zip(eta) {
        let shift = (e / (2.0 * PI)).round();
        if shift != 0.0 {
            moved = true;
        }
        *o = e - 2.0 * PI * shift;
    }
    moved
}

/// Evaluator for `L_1 hat = phi_hat / periodisation`.
#[derive(Clone, Debug)]
pub struct CardinalSymbol {
    basis: BasisFunction,
    lattice: Lattice,
}

impl CardinalSymbol {
    pub fn new(basis: &BasisFunction, tol: f64) -> Result<Self> {
        let lattice = Lattice::for_decay(basis.n, basis.decay, 0.0, tol)?;
        Ok(Self { basis: basis.clone(), lattice })
    }

    pub fn basis(&self) -> &BasisFunction {
        &self.basis
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn params(&self) -> LatticeSumParams {
        self.lattice.params
    }

    /// `(phi_hat(eta0), sum_{k != 0} phi_hat(eta0 + 2 pi k))` for a point of
    /// the cell.
    pub fn cell(&self, eta0: &[f64]) -> (f64, f64) {
        let phi = &self.basis;
        let centre = phi.fourier(eta0);
        let rest = self.lattice.sum_nonzero(eta0, 2.0 * PI, |x| phi.fourier(x));
        (centre, rest)
    }

    pub fn periodization(&self, eta: &[f64]) -> f64 {
        let mut e0 = [0.0; 8];
        let n = eta.len();
        reduce_to_cell(eta, &mut e0[..n]);
        let (a, b) = self.cell(&e0[..n]);
        a + b
    }

    /// `L_1 hat(eta)`, with the limit value at lattice points.
    pub fn value(&self, eta: &[f64]) -> f64 {
        let n = eta.len();
        let mut e0 = [0.0; 8];
        let moved = reduce_to_cell(eta, &mut e0[..n]);
        let (centre, rest) = self.cell(&e0[..n]);
        if !moved {
            if centre.is_infinite() {
                1.0
            } else {
                1.0 / (1.0 + rest / centre)
            }
        } else if centre.is_infinite() {
            0.0
        } else {
            self.basis.fourier(eta) / (centre + rest)
        }
    }

    /// `1 - L_1 hat(eta)` without cancellation near the origin.
    pub fn complement(&self, eta: &[f64]) -> f64 {
        let n = eta.len();
        let mut e0 = [0.0; 8];
        let moved = reduce_to_cell(eta, &mut e0[..n]);
        let (centre, rest) = self.cell(&e0[..n]);
        if !moved {
            if centre.is_infinite() {
                0.0
            } else {
                rest / (centre + rest)
            }
        } else if centre.is_infinite() {
            1.0
        } else {
            1.0 - self.basis.fourier(eta) / (centre + rest)
        }
    }

    /// `1 / periodisation`, zero at lattice points when the transform is
    /// singular there.
    pub fn reciprocal(&self, eta: &[f64]) -> f64 {
        let p = self.periodization(eta);
        if p.is_infinite() {
            0.0
        } else {
            1.0 / p
        }
    }
}

pub fn periodized_transform(phi: &BasisFunction, eta: &[f64], tol: f64) -> Result<f64> {
    Ok(CardinalSymbol::new(phi, tol)?.periodization(eta))
}

pub fn lagrange_symbol(phi: &BasisFunction, eta: &[f64], tol: f64) -> Result<f64> {
    Ok(CardinalSymbol::new(phi, tol)?.value(eta))
}

pub fn lagrange_complement(phi: &BasisFunction, eta: &[f64], tol: f64) -> Result<f64> {
    Ok(CardinalSymbol::new(phi, tol)?.complement(eta))
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > 3 {
        return Err(Error::Unsupported(format!("grid computations in dimension {n}")));
    }
    Ok(())
}

/// Multi-index iteration over `[lo, hi]^n`, first axis fastest.
pub(crate) fn for_each_index(n: usize, lo: i64, hi: i64, mut f: impl FnMut(&[i64])) {
    let mut idx = vec![lo; n];
    let side = (hi - lo + 1) as usize;
    for _ in 0..side.pow(n as u32) {
        f(&idx);
        for d in 0..n {
            idx[d] += 1;
            if idx[d] <= hi {
                break;
            }
            idx[d] = lo;
        }
    }
}

/// Fourier coefficients `c_k` with `1/periodisation(eta) = sum c_k e^{-i k eta}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Coefficients {
    pub n: usize,
    pub radius: usize,
    /// Values on `|k|_inf <= radius`, first axis fastest.
    pub values: Vec<f64>,
    /// FFT length per axis used to compute them.
    pub transform_points: usize,
}

impl Coefficients {
    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn get(&self, k: &[i64]) -> f64 {
        let m = self.radius as i64;
        if k.iter().any(|v| v.abs() > m) {
            return 0.0;
        }
        let mut idx = 0usize;
        let mut stride = 1usize;
        for &v in k {
            idx += (v + m) as usize * stride;
            stride *= self.side();
        }
        self.values[idx]
    }

    /// `sum_k c_k e^{-i k eta}`.
    pub fn reconstruct(&self, eta: &[f64]) -> f64 {
        let m = self.radius as i64;
        let mut s = 0.0;
        let mut i = 0;
        for_each_index(self.n, -m, m, |k| {
            let phase: f64 = k.iter().zip(eta).map(|(a, b)| *a as f64 * b).sum();
            s += self.values[i] * phase.cos();
            i += 1;
        });
        s
    }

    /// `sum_k c_k phi(x - k)` through the spatial basis function.
    pub fn cardinal_by_translates(&self, phi: &BasisFunction, x: &[f64]) -> Option<f64> {
        let m = self.radius as i64;
        let mut s = 0.0;
        let mut i = 0;
        let mut ok = true;
        let mut y = vec![0.0; self.n];
        for_each_index(self.n, -m, m, |k| {
            for d in 0..k.len() {
                y[d] = x[d] - k[d] as f64;
            }
            match phi.spatial(&y) {
                Some(v) => s += self.values[i] * v,
                None => ok = false,
            }
            i += 1;
        });
        ok.then_some(s)
    }

    /// Log–log fit of `max |c_k|` over shells `from..=radius`.
    pub fn decay_fit(&self, from: usize) -> Option<LineFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (from..=self.radius)
            .map(|r| {
                let mut k = vec![0i64; self.n];
                k[0] = r as i64;
                (r as f64, self.get(&k).abs())
            })
            .unzip();
        loglog(&xs, &ys)
    }
}

/// Coefficients on `|k|_inf <= m`. Fails with a resolution error when the
/// outermost coefficients exceed `tol` relative to the largest one.
pub fn lagrange_coefficients(phi: &BasisFunction, m: usize, tol: f64) -> Result<Coefficients> {
    let n = phi.n;
    check_dimension(n)?;
    if m == 0 {
        return Err(Error::InvalidParameter("coefficient radius must be at least 1".into()));
    }
    let symbol = CardinalSymbol::new(phi, DEFAULT_TOL)?;
    let q = if n == 1 {
        1024usize.max((16 * (2 * m + 1)).next_power_of_two())
    } else {
        64usize.max((8 * (2 * m + 1)).next_power_of_two())
    };
    let dims = vec![q; n];
    let total = q.pow(n as u32);
    let mut data: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut eta = [0.0; 8];
            let mut rem = flat;
            for e in eta.iter_mut().take(n) {
                *e = 2.0 * PI * fft::signed(rem % q, q) as f64 / q as f64;
                rem /= q;
            }
            Complex64::new(symbol.reciprocal(&eta[..n]), 0.0)
        })
        .collect();
    fft::inverse(&mut data, &dims);
    let scale = 1.0 / total as f64;
    let mi = m as i64;
    let mut values = Vec::with_capacity((2 * m + 1).pow(n as u32));
    for_each_index(n, -mi, mi, |k| {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for &v in k {
            flat += v.rem_euclid(q as i64) as usize * stride;
            stride *= q;
        }
        values.push(data[flat].re * scale);
    });
    let out = Coefficients { n, radius: m, values, transform_points: q };
    let largest = out.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut outer = 0.0f64;
    let mut i = 0;
    for_each_index(n, -mi, mi, |k| {
        if k.iter().any(|v| v.abs() == mi) {
            outer = outer.max(out.values[i].abs());
        }
        i += 1;
    });
    if outer > tol * largest {
        return Err(Error::Resolution(format!(
            "coefficients at radius {m} are {:.3e} of the largest; increase the radius",
            outer / largest
        )));
    }
    Ok(out)
}

/// Samples of `L_1` on the box `[-radius, radius]^n` with spacing
/// `1/resolution`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CardinalSamples {
    pub n: usize,
    pub radius: usize,
    pub resolution: usize,
    /// Period of the underlying periodic reconstruction.
    pub period: usize,
    pub values: Vec<f64>,
    /// Largest imaginary part seen before discarding it.
    pub max_imaginary: f64,
    /// Largest change of the node values when the frequency extent is
    /// doubled.
    pub alias_change: f64,
}

struct Spectrum {
    per_axis: usize,
    values: Vec<Complex64>,
}

fn sampled_spectrum(symbol: &CardinalSymbol, period: usize, resolution: usize) -> Spectrum {
    let phi = symbol.basis();
    let n = phi.n;
    let per_axis = period * resolution;
    let total = per_axis.pow(n as u32);
    let step = 2.0 * PI * resolution as f64;
    let alias = symbol.lattice().clone();
    let values = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut eta = [0.0; 8];
            let mut rem = flat;
            let mut at_origin = true;
            for e in eta.iter_mut().take(n) {
                let m = fft::signed(rem % per_axis, per_axis);
                at_origin &= m == 0;
                *e = 2.0 * PI * m as f64 / period as f64;
                rem /= per_axis;
            }
            let eta = &eta[..n];
            let mut e0 = [0.0; 8];
            reduce_to_cell(eta, &mut e0[..n]);
            let (centre, rest) = symbol.cell(&e0[..n]);
            let v = if centre.is_infinite() {
                if at_origin {
                    1.0
                } else {
                    0.0
                }
            } else {
                let own = phi.fourier(eta) + alias.sum_nonzero(eta, step, |x| phi.fourier(x));
                own / (centre + rest)
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    Spectrum { per_axis, values }
}

pub fn cardinal_samples(phi: &BasisFunction, radius: usize, resolution: usize) -> Result<CardinalSamples> {
    let n = phi.n;
    check_dimension(n)?;
    if radius < 4 {
        return Err(Error::InvalidParameter("box radius must be at least 4".into()));
    }
    if !resolution.is_power_of_two() {
        return Err(Error::InvalidParameter("resolution must be a power of two".into()));
    }
    let symbol = CardinalSymbol::new(phi, DEFAULT_TOL)?;
    let period = if n == 1 { (8 * radius).next_power_of_two() } else { (4 * radius).next_power_of_two() };
    let Spectrum { per_axis, mut values, .. } = sampled_spectrum(&symbol, period, resolution);
    let dims = vec![per_axis; n];
    fft::inverse(&mut values, &dims);
    let scale = 1.0 / (period as f64).powi(n as i32);
    let side = 2 * radius * resolution + 1;
    let half = (radius * resolution) as i64;
    let mut out = Vec::with_capacity(side.pow(n as u32));
    let mut max_imaginary = 0.0f64;
    for_each_index(n, -half, half, |j| {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for &v in j {
            flat += v.rem_euclid(per_axis as i64) as usize * stride;
            stride *= per_axis;
        }
        let v = values[flat] * scale;
        max_imaginary = max_imaginary.max(v.im.abs());
        out.push(v.re);
    });
    let samples = CardinalSamples {
        n,
        radius,
        resolution,
        period,
        values: out,
        max_imaginary,
        alias_change: 0.0,
    };
    let alias_change = node_alias_change(&symbol, &samples);
    Ok(CardinalSamples { alias_change, ..samples })
}

/// Node values from a spectrum with twice the frequency extent, folded onto
/// the integer lattice, compared with the stored samples.
fn node_alias_change(symbol: &CardinalSymbol, samples: &CardinalSamples) -> f64 {
    let n = samples.n;
    let period = samples.period;
    let doubled = sampled_spectrum(symbol, period, 2 * samples.resolution);
    let mut folded = vec![Complex64::default(); period.pow(n as u32)];
    for (flat, v) in doubled.values.iter().enumerate() {
        let mut rem = flat;
        let mut target = 0usize;
        let mut stride = 1usize;
        for _ in 0..n {
            target += (rem % doubled.per_axis % period) * stride;
            rem /= doubled.per_axis;
            stride *= period;
        }
        folded[target] += v;
    }
    fft::inverse(&mut folded, &vec![period; n]);
    let scale = 1.0 / (period as f64).powi(n as i32);
    let r = samples.radius as i64;
    let mut change = 0.0f64;
    for_each_index(n, -r, r, |j| {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for &v in j {
            flat += v.rem_euclid(period as i64) as usize * stride;
            stride *= period;
        }
        let fine = folded[flat].re * scale;
        change = change.max((fine - samples.node(j)).abs());
    });
    change
}

/// Four-point Lagrange weights at fractional offset `t` in `[0, 1)` for the
/// nodes `-1, 0, 1, 2`.
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

impl CardinalSamples {
    fn side(&self) -> usize {
        2 * self.radius * self.resolution + 1
    }

    fn at_grid(&self, idx: &[i64]) -> f64 {
        let side = self.side() as i64;
        let mut flat = 0usize;
        let mut stride = 1usize;
        for &v in idx {
            if v < 0 || v >= side {
                return 0.0;
            }
            flat += v as usize * stride;
            stride *= side as usize;
        }
        self.values[flat]
    }

    /// Value at an integer point of the box.
    pub fn node(&self, j: &[i64]) -> f64 {
        let offset = (self.radius * self.resolution) as i64;
        let s = self.resolution as i64;
        let idx: Vec<i64> = j.iter().map(|v| v * s + offset).collect();
        self.at_grid(&idx)
    }

    /// Sample point coordinates along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let half = (self.radius * self.resolution) as i64;
        (-half..=half).map(|i| i as f64 / self.resolution as f64).collect()
    }

    /// `L_1(x)` by local cubic interpolation; zero outside the box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let r = self.radius as f64;
        if x.iter().any(|v| v.abs() > r) {
            return 0.0;
        }
        let s = self.resolution as f64;
        let mut base = [0i64; 8];
        let mut weights = [[0.0; 4]; 8];
        for d in 0..n {
            let u = (x[d] + r) * s;
            let b = u.floor();
            base[d] = b as i64;
            weights[d] = cubic_weights(u - b);
        }
        let mut total = 0.0;
        let mut idx = [0i64; 8];
        for corner in 0..4usize.pow(n as u32) {
            let mut c = corner;
            let mut w = 1.0;
            for d in 0..n {
                let o = c % 4;
                c /= 4;
                idx[d] = base[d] + o as i64 - 1;
                w *= weights[d][o];
            }
            total += w * self.at_grid(&idx[..n]);
        }
        total
    }

    /// Log–log fit of `|L_1|` at half-integer points on the first axis with
    /// `from <= |x| <= radius`.
    pub fn decay_fit(&self, from: f64) -> Option<LineFit> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut x = from.floor() + 0.5;
        while x <= self.radius as f64 {
            let mut p = vec![0.0; self.n];
            p[0] = x;
            xs.push(x);
            ys.push(self.eval(&p).abs());
            x += 1.0;
        }
        loglog(&xs, &ys)
    }
}

/// Result of fitting `1 - L_1 hat(eta) ~ C |eta|^kappa` near the origin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixStrangFit {
    /// Fitted order, absent when no positive power law fits.
    pub order: Option<f64>,
    pub slope: f64,
    pub residual: f64,
    /// `2 sup_{0 < |eta| <= pi} (1 - L_1 hat) / |eta|^kappa`.
    pub sup_constant: f64,
    /// `(1 - L_1 hat(eta)) / |eta|^kappa` at the smallest ladder point.
    pub limit_ratio: f64,
    /// `1 - L_1 hat` at the smallest ladder point.
    pub smallest_value: f64,
}

pub fn fix_strang_fit(phi: &BasisFunction) -> Result<FixStrangFit> {
    let symbol = CardinalSymbol::new(phi, DEFAULT_TOL)?;
    let n = phi.n;
    let kappa = phi.kappa;
    let along = |r: f64| {
        let mut e = vec![0.0; n];
        e[0] = r;
        symbol.complement(&e)
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = (5..=12)
        .map(|m| {
            let r = 2f64.powi(-m);
            (r, along(r))
        })
        .unzip();
    let line = loglog(&xs, &ys);
    let (slope, residual) = line.map(|l| (l.slope, l.residual)).unwrap_or((f64::NAN, f64::INFINITY));
    let order = (slope > 0.1 && residual < 0.05).then_some(slope);
    let mut sup = 0.0f64;
    for i in 1..=4096 {
        let r = PI * i as f64 / 4096.0;
        sup = sup.max(along(r) / r.powf(kappa));
    }
    for m in 0..40 {
        let r = PI * 2f64.powi(-m) / 4096.0;
        sup = sup.max(along(r) / r.powf(kappa));
    }
    let smallest = 2f64.powi(-12);
    let smallest_value = along(smallest);
    Ok(FixStrangFit {
        order,
        slope,
        residual,
        sup_constant: 2.0 * sup,
        limit_ratio: smallest_value / smallest.powf(kappa),
        smallest_value,
    })
}

/// Options for [`CardinalFunction::build`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CardinalOptions {
    pub cell_points: usize,
    pub coefficient_radius: usize,
    pub box_radius: usize,
    pub resolution: usize,
    pub coefficient_tol: f64,
}

impl CardinalOptions {
    pub fn for_dimension(n: usize) -> Self {
        if n == 1 {
            Self { cell_points: 257, coefficient_radius: 64, box_radius: 64, resolution: 64, coefficient_tol: 1e-2 }
        } else {
            Self { cell_points: 65, coefficient_radius: 16, box_radius: 8, resolution: 16, coefficient_tol: 1e-1 }
        }
    }
}

/// Symbol, coefficients and spatial samples of the Lagrange function.
#[derive(Clone, Debug)]
pub struct CardinalFunction {
    pub symbol: CardinalSymbol,
    pub kappa: f64,
    /// `L_1 hat` on a uniform grid of `[-pi, pi]^n`, first axis fastest.
    pub cell_samples: Vec<f64>,
    pub cell_points: usize,
    pub coefficients: Coefficients,
    pub samples: CardinalSamples,
}

impl CardinalFunction {
    pub fn build(phi: &BasisFunction, opts: &CardinalOptions) -> Result<Self> {
        let n = phi.n;
        check_dimension(n)?;
        let symbol = CardinalSymbol::new(phi, DEFAULT_TOL)?;
        let p = opts.cell_points.max(2);
        let cell_samples = (0..p.pow(n as u32))
            .into_par_iter()
            .map(|flat| {
                let mut eta = [0.0; 8];
                let mut rem = flat;
                for e in eta.iter_mut().take(n) {
                    *e = -PI + 2.0 * PI * (rem % p) as f64 / (p - 1) as f64;
                    rem /= p;
                }
                symbol.value(&eta[..n])
            })
            .collect();
        let coefficients = lagrange_coefficients(phi, opts.coefficient_radius, opts.coefficient_tol)?;
        let samples = cardinal_samples(phi, opts.box_radius, opts.resolution)?;
        Ok(Self { symbol, kappa: phi.kappa, cell_samples, cell_points: p, coefficients, samples })
    }

    /// CSV rows `eta,value` for the first axis of the cell grid.
    pub fn cell_csv(&self) -> String {
        let p = self.cell_points;
        let mut s = String::from("eta,value\n");
        for i in 0..p {
            let eta = -PI + 2.0 * PI * i as f64 / (p - 1) as f64;
            s.push_str(&format!("{eta},{}\n", self.cell_samples[i]));
        }
        s
    }

    /// CSV rows `x,value` along the first axis of the spatial grid.
    pub fn spatial_csv(&self) -> String {
        let mut s = String::from("x,value\n");
        for x in self.samples.axis() {
            let mut p = vec![0.0; self.samples.n];
            p[0] = x;
            s.push_str(&format!("{x},{}\n", self.samples.eval(&p)));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalogue() -> Vec<BasisFunction> {
        vec![
            BasisFunction::gaussian(1, 1.0).unwrap(),
            BasisFunction::multiquadric(1, 1.0).unwrap(),
            BasisFunction::polyharmonic(1, 3.0).unwrap(),
            BasisFunction::multiquadric(2, 1.0).unwrap(),
        ]
    }

    #[test]
    fn gaussian_periodisation_at_origin() {
        let g = BasisFunction::gaussian(1, 1.0).unwrap();
        let v = periodized_transform(&g, &[0.0], 1e-15).unwrap();
        let expected = 1.0 + 2.0 * (-4.0 * PI * PI).exp() + 2.0 * (-16.0 * PI * PI).exp();
        assert!((v - expected).abs() < 1e-16);
        let s = CardinalSymbol::new(&g, 1e-15).unwrap();
        let (centre, rest) = s.cell(&[0.0]);
        assert_eq!(centre, 1.0);
        let aliases = 2.0 * (-4.0 * PI * PI).exp() + 2.0 * (-16.0 * PI * PI).exp();
        assert!((rest - aliases).abs() < 1e-13 * aliases);
        assert!(rest > 1.4e-17 && rest < 1.5e-17);
    }

    #[test]
    fn periodicity() {
        for phi in catalogue() {
            let s = CardinalSymbol::new(&phi, 1e-14).unwrap();
            let n = phi.n;
            let mut e = vec![0.7; n];
            let a = s.periodization(&e);
            e[0] += 2.0 * PI;
            let b = s.periodization(&e);
            assert!((a - b).abs() <= 1e-12 * a, "{phi:?}");
        }
    }

    #[test]
    fn polyharmonic_origin_behaviour() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let s = CardinalSymbol::new(&phi, 1e-14).unwrap();
        let eta: f64 = 1e-4;
        assert!((s.periodization(&[eta]) * eta.powi(4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_points_and_scaling() {
        for phi in catalogue().into_iter().skip(1) {
            let s = CardinalSymbol::new(&phi, 1e-14).unwrap();
            let n = phi.n;
            assert_eq!(s.value(&vec![0.0; n]), 1.0);
            let mut e = vec![0.0; n];
            e[0] = 2.0 * PI;
            assert_eq!(s.value(&e), 0.0);
            let scaled = CardinalSymbol::new(&phi.with_amplitude(17.0), 1e-14).unwrap();
            let p = vec![0.9; n];
            assert!((s.value(&p) - scaled.value(&p)).abs() < 1e-14);
        }
        let g = BasisFunction::gaussian(1, 1.0).unwrap();
        let v = lagrange_symbol(&g, &[PI], 1e-15).unwrap();
        let expected = 1.0 / (2.0 + 2.0 * (-8.0 * PI * PI).exp());
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn complement_is_consistent() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let s = CardinalSymbol::new(&phi, 1e-14).unwrap();
        for &e in &[0.3, 1.0, 2.5, -3.0, 7.0] {
            assert!((s.value(&[e]) + s.complement(&[e]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficients_reproduce_reciprocal() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let c = lagrange_coefficients(&phi, 64, 1e-3).unwrap();
        let s = CardinalSymbol::new(&phi, 1e-14).unwrap();
        for &e in &[0.123, 1.1, 2.9] {
            assert!((c.reconstruct(&[e]) - s.reciprocal(&[e])).abs() < 1e-7);
        }
        assert!(lagrange_coefficients(&phi, 2, 1e-6).is_err());
    }

    #[test]
    fn coefficient_zero_by_quadrature() {
        // c_0 = (2 pi)^{-1} int_{-pi}^{pi} dEta / periodisation
        let phi = BasisFunction::gaussian(1, 2.0).unwrap();
        let c = lagrange_coefficients(&phi, 32, f64::INFINITY).unwrap();
        let s = CardinalSymbol::new(&phi, 1e-15).unwrap();
        let grid = crate::quadrature::QuadratureGrid { rel_tol: 1e-13, ..Default::default() };
        let q = crate::quadrature::integrate_interval(&|e: f64| s.reciprocal(&[e]), PI, &grid);
        let c0 = q.value / (2.0 * PI);
        assert!((c.get(&[0]) - c0).abs() < 1e-9 * c0.abs(), "{} {}", c.get(&[0]), c0);
    }

    #[test]
    fn cardinal_nodes_and_symmetry() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let l = cardinal_samples(&phi, 16, 16).unwrap();
        for j in -10i64..=10 {
            let expect = if j == 0 { 1.0 } else { 0.0 };
            assert!((l.node(&[j]) - expect).abs() < 1e-10);
        }
        for &x in &[0.3, 1.7, 5.25] {
            assert!((l.eval(&[x]) - l.eval(&[-x])).abs() < 1e-12);
        }
        assert!(l.max_imaginary < 1e-10);
        assert!(l.alias_change < 1e-10);
    }
}
