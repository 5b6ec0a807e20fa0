//! Method of lines on a truncated lattice: the generator stencil, time
//! integration of the coefficient system, and the spectral reference path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::BasisFunction;
use crate::cardinal::for_each_index;
use crate::error::{Error, Result};
use crate::fft;
use crate::fit::{loglog, LineFit};
use crate::multiplier::{clamped_exp, SchemeMultiplier};
use crate::spectral::{AliasContext, SpectralDensity};
use crate::symbols::Symbol;

/// Coefficients `c_j(t; h)` on `|j|_inf <= J` with periodic wrap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeState {
    pub n: usize,
    pub h: f64,
    pub truncation: usize,
    pub t: f64,
    /// Row-major over `[-J, J]^n`, first axis fastest.
    pub coefficients: Vec<Complex64>,
}

impl LatticeState {
    /// `c_j(0) = f(h j)`.
    pub fn from_nodal(n: usize, h: f64, truncation: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if n == 0 || n > 2 {
            return Err(Error::Unsupported(format!("lattice states in dimension {n}")));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
        }
        let j = truncation as i64;
        let mut coefficients = Vec::with_capacity((2 * truncation + 1).pow(n as u32));
        let mut x = vec![0.0; n];
        for_each_index(n, -j, j, |idx| {
            for (xv, &k) in x.iter_mut().zip(idx) {
                *xv = h * k as f64;
            }
            coefficients.push(Complex64::new(f(&x), 0.0));
        });
        Ok(Self { n, h, truncation, t: 0.0, coefficients })
    }

    pub fn side(&self) -> usize {
        2 * self.truncation + 1
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.side(); self.n]
    }

    pub fn get(&self, j: &[i64]) -> Complex64 {
        let side = self.side() as i64;
        let mut pos = 0i64;
        let mut stride = 1i64;
        for &k in j {
            pos += (k + self.truncation as i64) * stride;
            stride *= side;
        }
        self.coefficients[pos as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Rows `j..., re, im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            out.push_str(&format!("j{i},"));
        }
        out.push_str("re,im\n");
        let j = self.truncation as i64;
        let mut pos = 0;
        for_each_index(self.n, -j, j, |idx| {
            for k in idx {
                out.push_str(&format!("{k},"));
            }
            let c = self.coefficients[pos];
            out.push_str(&format!("{:e},{:e}\n", c.re, c.im));
            pos += 1;
        });
        out
    }
}

/// Values `a(h^{-1} D) L_1 (j)` on `|j|_inf <= J_s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorStencil {
    pub n: usize,
    pub h: f64,
    pub half_width: usize,
    /// Frequency samples per axis used for the final values.
    pub frequency_points: usize,
    /// Largest entry change under the last doubling of `frequency_points`.
    pub resolution_change: f64,
    pub values: Vec<Complex64>,
}

impl GeneratorStencil {
    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn get(&self, j: &[i64]) -> Complex64 {
        let side = self.side() as i64;
        let mut pos = 0i64;
        let mut stride = 1i64;
        for &k in j {
            if k.unsigned_abs() as usize > self.half_width {
                return Complex64::new(0.0, 0.0);
            }
            pos += (k + self.half_width as i64) * stride;
            stride *= side;
        }
        self.values[pos as usize]
    }

    pub fn row_sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// Log-log fit of `|stencil(j e_1)|` for `from <= j <= J_s`.
    pub fn decay_fit(&self, from: usize) -> Option<LineFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (from.max(1)..=self.half_width)
            .map(|r| {
                let mut j = vec![0i64; self.n];
                j[0] = r as i64;
                (r as f64, self.get(&j).norm())
            })
            .unzip();
        loglog(&xs, &ys)
    }

    /// Eigenvalues of the circulant generator on `(2J + 1)^n` points: the
    /// stencil wrapped onto the torus and transformed.
    pub fn wrapped_diagonal(&self, truncation: usize) -> Vec<Complex64> {
        let side = 2 * truncation + 1;
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); side.pow(n as u32)];
        let hw = self.half_width as i64;
        let mut pos = 0;
        for_each_index(n, -hw, hw, |idx| {
            let mut target = 0usize;
            let mut stride = 1usize;
            for &k in idx {
                target += k.rem_euclid(side as i64) as usize * stride;
                stride *= side;
            }
            data[target] += self.values[pos];
            pos += 1;
        });
        fft::forward(&mut data, &vec![side; n]);
        data
    }
}

/// `stencil(j) = (2 pi)^{-n} int a(eta / h) L_1 hat(eta) e^{i j eta} d eta`,
/// computed from `G_a^*(eta / h; h)` by the trapezoid rule on the cell with
/// the sample count doubled until the entries settle to `tol` relative to
/// the largest.
pub fn generator_stencil(
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    half_width: usize,
    tol: f64,
) -> Result<GeneratorStencil> {
    let n = phi.n;
    if n == 0 || n > 2 {
        return Err(Error::Unsupported(format!("stencils in dimension {n}")));
    }
    let mult = SchemeMultiplier::new(phi, a, h)?;
    let side = 2 * half_width + 1;
    let cap = if n == 1 { 1 << 18 } else { 1 << 10 };
    let mut m = (8 * side).next_power_of_two().max(64);
    let mut previous = stencil_at(&mult, n, h, half_width, m);
    loop {
        let next_m = 2 * m;
        if next_m > cap {
            return Err(Error::Resolution(format!(
                "stencil entries still change beyond {tol:e} at {m} frequency samples"
            )));
        }
        let next = stencil_at(&mult, n, h, half_width, next_m);
        let scale = next.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        let change = next.iter().zip(&previous).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        m = next_m;
        previous = next;
        if change <= tol {
            return Ok(GeneratorStencil {
                n,
                h,
                half_width,
                frequency_points: m,
                resolution_change: change,
                values: previous,
            });
        }
    }
}

fn stencil_at(mult: &SchemeMultiplier, n: usize, h: f64, half_width: usize, m: usize) -> Vec<Complex64> {
    use rayon::prelude::*;
    let total = m.pow(n as u32);
    let mut data: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|pos| {
            let mut xi = [0.0; 2];
            let mut rest = pos;
            for x in xi.iter_mut().take(n) {
                let i = rest % m;
                rest /= m;
                *x = 2.0 * PI * fft::signed(i, m) as f64 / m as f64 / h;
            }
            mult.value(&xi[..n])
        })
        .collect();
    fft::inverse(&mut data, &vec![m; n]);
    let norm = 1.0 / total as f64;
    let hw = half_width as i64;
    let mut out = Vec::with_capacity((2 * half_width + 1).pow(n as u32));
    for_each_index(n, -hw, hw, |idx| {
        let mut pos = 0usize;
        let mut stride = 1usize;
        for &k in idx {
            pos += k.rem_euclid(m as i64) as usize * stride;
            stride *= m;
        }
        out.push(data[pos] * norm);
    });
    out
}

/// Time integrator for the coefficient system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeIntegrator {
    /// Exact in time through the circulant diagonalisation.
    Exponential,
    Rk4 { steps: usize },
}

/// Advance `dc/dt = -stencil * c` by `duration`.
pub fn integrate_mol(
    state: &LatticeState,
    stencil: &GeneratorStencil,
    duration: f64,
    method: TimeIntegrator,
) -> Result<LatticeState> {
    if stencil.n != state.n {
        return Err(Error::InvalidParameter("stencil and state dimensions differ".into()));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration must be nonnegative, got {duration}")));
    }
    let mut out = state.clone();
    if duration == 0.0 {
        return Ok(out);
    }
    let dims = state.dims();
    let diag = stencil.wrapped_diagonal(state.truncation);
    let total = state.coefficients.len() as f64;
    let bound = 1e6 * state.max_abs().max(1e-300);
    match method {
        TimeIntegrator::Exponential => {
            let mut c = state.coefficients.clone();
            fft::forward(&mut c, &dims);
            for (v, l) in c.iter_mut().zip(&diag) {
                *v *= clamped_exp(-duration * l) / total;
            }
            fft::inverse(&mut c, &dims);
            out.coefficients = c;
            out.t = state.t + duration;
            check_finite(&out, bound)?;
        }
        TimeIntegrator::Rk4 { steps } => {
            if steps == 0 {
                return Err(Error::InvalidParameter("rk4 needs at least one step".into()));
            }
            let dt = duration / steps as f64;
            let apply = |c: &[Complex64]| -> Vec<Complex64> {
                let mut w = c.to_vec();
                fft::forward(&mut w, &dims);
                for (v, l) in w.iter_mut().zip(&diag) {
                    *v *= -l / total;
                }
                fft::inverse(&mut w, &dims);
                w
            };
            let axpy = |c: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
                c.iter().zip(k).map(|(a, b)| a + b * s).collect()
            };
            let mut c = state.coefficients.clone();
            for step in 0..steps {
                let k1 = apply(&c);
                let k2 = apply(&axpy(&c, &k1, 0.5 * dt));
                let k3 = apply(&axpy(&c, &k2, 0.5 * dt));
                let k4 = apply(&axpy(&c, &k3, dt));
                for i in 0..c.len() {
                    c[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
                }
                out.coefficients.clone_from(&c);
                out.t = state.t + (step + 1) as f64 * dt;
                check_finite(&out, bound)?;
            }
        }
    }
    Ok(out)
}

fn check_finite(state: &LatticeState, bound: f64) -> Result<()> {
    let bad = state.coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite() || c.norm() > bound);
    if bad {
        return Err(Error::Unstable { t: state.t });
    }
    Ok(())
}

/// `u_h hat(xi, t) = exp(-t G_a^*(xi; h)) Sigma_h(f_hat)(xi)` at the given
/// frequencies.
pub fn solve_spectral(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    t: f64,
    points: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    let alias = AliasContext::new(phi, f, h)?;
    let mult = SchemeMultiplier::new(phi, a, h)?;
    Ok(points.iter().map(|xi| clamped_exp(-t * mult.value(xi)) * alias.alias_apply(xi)).collect())
}

/// `u_h(h j, t)` for `|j|_inf <= J` from the spectral side: the cell
/// integral of `exp(-t G_a^*) sum_m f_hat(zeta + 2 pi m / h)` against
/// `e^{i h j zeta}`, by the trapezoid rule on `points` samples per axis.
pub fn spectral_nodal_values(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    t: f64,
    truncation: usize,
    points: usize,
) -> Result<Vec<Complex64>> {
    use rayon::prelude::*;
    let n = f.n;
    if n == 0 || n > 2 {
        return Err(Error::Unsupported(format!("nodal values in dimension {n}")));
    }
    let m = points.max(2 * (2 * truncation + 1));
    let alias = AliasContext::new(phi, f, h)?;
    let mult = SchemeMultiplier::new(phi, a, h)?;
    let total = m.pow(n as u32);
    let mut data: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|pos| {
            let mut xi = [0.0; 2];
            let mut rest = pos;
            for x in xi.iter_mut().take(n) {
                let i = rest % m;
                rest /= m;
                *x = 2.0 * PI * fft::signed(i, m) as f64 / (h * m as f64);
            }
            clamped_exp(-t * mult.value(&xi[..n])) * alias.alias_bracket(&xi[..n])
        })
        .collect();
    fft::inverse(&mut data, &vec![m; n]);
    let scale = 1.0 / (h * m as f64).powi(n as i32);
    let j = truncation as i64;
    let mut out = Vec::with_capacity((2 * truncation + 1).pow(n as u32));
    for_each_index(n, -j, j, |idx| {
        let mut pos = 0usize;
        let mut stride = 1usize;
        for &k in idx {
            pos += k.rem_euclid(m as i64) as usize * stride;
            stride *= m;
        }
        out.push(data[pos] * scale);
    });
    Ok(out)
}

/// Options for [`cross_validate`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CrossOptions {
    /// Stencil half width as a multiple of the lattice truncation.
    pub stencil_factor: usize,
    pub stencil_tol: f64,
    /// Frequency samples per axis on the spectral path.
    pub spectral_points: usize,
    pub budget: f64,
}

impl Default for CrossOptions {
    fn default() -> Self {
        Self { stencil_factor: 4, stencil_tol: 1e-10, spectral_points: 4096, budget: 1e-4 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossValidation {
    pub h: f64,
    pub truncation: usize,
    pub t: f64,
    /// `max_j |c_j(T) - u_h(h j, T)|`.
    pub discrepancy: f64,
    pub budget: f64,
    pub passes: bool,
    /// Discrepancy with the truncation doubled.
    pub doubled_discrepancy: f64,
    /// Doubling the truncation at least halves the discrepancy.
    pub truncation_dominated: bool,
}

fn path_discrepancy(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    truncation: usize,
    t: f64,
    opts: &CrossOptions,
) -> Result<f64> {
    let n = f.n;
    let state = LatticeState::from_nodal(n, h, truncation, |x| {
        f.spatial(x).map_or(f64::NAN, |v| v.re)
    })?;
    if state.coefficients.iter().any(|c| !c.re.is_finite()) {
        return Err(Error::Unsupported("initial datum has no closed spatial form".into()));
    }
    let stencil = generator_stencil(phi, a, h, opts.stencil_factor * truncation, opts.stencil_tol)?;
    let advanced = integrate_mol(&state, &stencil, t, TimeIntegrator::Exponential)?;
    let reference = spectral_nodal_values(f, phi, a, h, t, truncation, opts.spectral_points)?;
    Ok(advanced
        .coefficients
        .iter()
        .zip(&reference)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Compare the exponential-integrator coefficients with the spectral nodal
/// values.
pub fn cross_validate(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    truncation: usize,
    t: f64,
    opts: &CrossOptions,
) -> Result<CrossValidation> {
    let discrepancy = path_discrepancy(f, phi, a, h, truncation, t, opts)?;
    let doubled_discrepancy = path_discrepancy(f, phi, a, h, 2 * truncation, t, opts)?;
    Ok(CrossValidation {
        h,
        truncation,
        t,
        discrepancy,
        budget: opts.budget,
        passes: discrepancy < opts.budget,
        doubled_discrepancy,
        truncation_dominated: doubled_discrepancy <= 0.5 * discrepancy,
    })
}

/// Step-halving study of the rk4 path against the exponential one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rk4Study {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
    pub fitted_order: f64,
}

pub fn rk4_study(
    state: &LatticeState,
    stencil: &GeneratorStencil,
    duration: f64,
    steps: &[usize],
) -> Result<Rk4Study> {
    let exact = integrate_mol(state, stencil, duration, TimeIntegrator::Exponential)?;
    let mut errors = Vec::with_capacity(steps.len());
    for &s in steps {
        let approx = integrate_mol(state, stencil, duration, TimeIntegrator::Rk4 { steps: s })?;
        let e = approx
            .coefficients
            .iter()
            .zip(&exact.coefficients)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        errors.push(e);
    }
    let orders = errors.windows(2).zip(steps.windows(2)).map(|(e, s)| {
        (e[0] / e[1]).ln() / (s[1] as f64 / s[0] as f64).ln()
    }).collect();
    let dts: Vec<f64> = steps.iter().map(|&s| duration / s as f64).collect();
    let fitted_order = loglog(&dts, &errors).map_or(f64::NAN, |f| f.slope);
    Ok(Rk4Study { steps: steps.to_vec(), errors, orders, fitted_order })
}
