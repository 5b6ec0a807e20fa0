//! Fourier-side data, weighted norms and the interpolation error measured in
//! the Wiener norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{norm, BasisFunction, Decay};
use crate::cardinal::{reduce_to_cell, CardinalSamples, CardinalSymbol};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, TailModel, DEFAULT_TOL};
use crate::quadrature::{
    adaptive, graded_breakpoints, integrate_line, integrate_plane, integrate_square, QuadResult,
    QuadratureGrid,
};

/// Closed-form transforms of initial data; JSON form `{kind, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DensitySpec {
    /// `exp(-sigma^2 |xi|^2)`.
    Gaussian { sigma: f64 },
    /// `(1 + |xi|^2)^{-m}`.
    Algebraic { m: f64 },
    /// `|xi|^{-sigma} exp(-|xi|^2)`.
    SingularGaussian { sigma: f64 },
    /// `exp(1 - 1/(1 - |xi/radius|^2))` inside the ball, zero outside.
    Bump { radius: f64 },
    /// Gaussian translated in space by `offset`.
    ShiftedGaussian { sigma: f64, offset: Vec<f64> },
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub n: usize,
    #[serde(flatten)]
    pub spec: DensitySpec,
}

/// Decay of a density at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityDecay {
    Gaussian { sigma: f64 },
    Power { rate: f64 },
    Compact { radius: f64 },
    Zero,
}

impl SpectralDensity {
    pub fn new(n: usize, spec: DensitySpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
            }
        };
        match &spec {
            DensitySpec::Gaussian { sigma } => positive(*sigma, "sigma")?,
            DensitySpec::Algebraic { m } => positive(*m, "m")?,
            DensitySpec::SingularGaussian { sigma } => {
                if !(*sigma >= 0.0) || *sigma >= n as f64 {
                    return Err(Error::InvalidParameter(format!(
                        "singularity order {sigma} must lie in [0, {n})"
                    )));
                }
            }
            DensitySpec::Bump { radius } => positive(*radius, "radius")?,
            DensitySpec::ShiftedGaussian { sigma, offset } => {
                positive(*sigma, "sigma")?;
                if offset.len() != n {
                    return Err(Error::InvalidParameter("offset length must equal n".into()));
                }
            }
            DensitySpec::Zero => {}
        }
        Ok(Self { n, spec })
    }

    pub fn gaussian(n: usize, sigma: f64) -> Result<Self> {
        Self::new(n, DensitySpec::Gaussian { sigma })
    }

    pub fn algebraic(n: usize, m: f64) -> Result<Self> {
        Self::new(n, DensitySpec::Algebraic { m })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, spec: DensitySpec::Zero }
    }

    /// Radial profile `|f_hat|` as a function of `|xi|`.
    pub fn radial(&self, r: f64) -> f64 {
        match &self.spec {
            DensitySpec::Gaussian { sigma } | DensitySpec::ShiftedGaussian { sigma, .. } => {
                (-(sigma * r).powi(2)).exp()
            }
            DensitySpec::Algebraic { m } => (1.0 + r * r).powf(-m),
            DensitySpec::SingularGaussian { sigma } => r.powf(-sigma) * (-r * r).exp(),
            DensitySpec::Bump { radius } => {
                let s = r / radius;
                if s >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            DensitySpec::Zero => 0.0,
        }
    }

    pub fn value(&self, xi: &[f64]) -> Complex64 {
        let m = self.radial(norm(xi));
        match &self.spec {
            DensitySpec::ShiftedGaussian { offset, .. } => {
                let phase: f64 = xi.iter().zip(offset).map(|(a, b)| a * b).sum();
                Complex64::from_polar(m, -phase)
            }
            _ => Complex64::new(m, 0.0),
        }
    }

    pub fn magnitude(&self, xi: &[f64]) -> f64 {
        self.radial(norm(xi))
    }

    /// Order of the singularity at the origin.
    pub fn singularity_order(&self) -> f64 {
        match &self.spec {
            DensitySpec::SingularGaussian { sigma } => *sigma,
            _ => 0.0,
        }
    }

    pub fn decay(&self) -> DensityDecay {
        match &self.spec {
            DensitySpec::Gaussian { sigma } | DensitySpec::ShiftedGaussian { sigma, .. } => {
                DensityDecay::Gaussian { sigma: *sigma }
            }
            DensitySpec::SingularGaussian { .. } => DensityDecay::Gaussian { sigma: 1.0 },
            DensitySpec::Algebraic { m } => DensityDecay::Power { rate: 2.0 * m },
            DensitySpec::Bump { radius } => DensityDecay::Compact { radius: *radius },
            DensitySpec::Zero => DensityDecay::Zero,
        }
    }

    /// Decay exponent at infinity, infinite for faster than polynomial.
    pub fn decay_rate(&self) -> f64 {
        match self.decay() {
            DensityDecay::Power { rate } => rate,
            _ => f64::INFINITY,
        }
    }

    /// The datum in space, when known in closed form.
    pub fn spatial(&self, x: &[f64]) -> Option<Complex64> {
        let n = self.n as f64;
        let gauss = |sigma: f64, y: &[f64]| {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            (4.0 * PI * sigma * sigma).powf(-n / 2.0) * (-r2 / (4.0 * sigma * sigma)).exp()
        };
        match &self.spec {
            DensitySpec::Gaussian { sigma } => Some(Complex64::new(gauss(*sigma, x), 0.0)),
            DensitySpec::ShiftedGaussian { sigma, offset } => {
                let y: Vec<f64> = x.iter().zip(offset).map(|(a, b)| a - b).collect();
                Some(Complex64::new(gauss(*sigma, &y), 0.0))
            }
            DensitySpec::Algebraic { m } if self.n == 1 && (*m - 1.0).abs() < 1e-15 => {
                Some(Complex64::new(0.5 * (-x[0].abs()).exp(), 0.0))
            }
            DensitySpec::Zero => Some(Complex64::default()),
            _ => None,
        }
    }

    /// Natural length scale on the frequency side.
    pub fn scale(&self) -> f64 {
        match &self.spec {
            DensitySpec::Gaussian { sigma } | DensitySpec::ShiftedGaussian { sigma, .. } => 1.0 / sigma,
            DensitySpec::Bump { radius } => *radius,
            _ => 1.0,
        }
    }

    /// Lattice for `sum_{k != 0} f_hat((p + 2 pi k) / h)` with `p` in the cell.
    pub(crate) fn alias_lattice(&self, h: f64, tol: f64) -> Result<Lattice> {
        let n = self.n;
        match self.decay() {
            DensityDecay::Gaussian { sigma } => Lattice::for_decay(n, Decay::Gaussian { c: sigma / h }, 0.0, tol),
            DensityDecay::Power { rate } => Lattice::for_decay(n, Decay::Power { exponent: rate }, 0.0, tol),
            DensityDecay::Compact { radius } => {
                let k = ((h * radius + PI) / (2.0 * PI)).ceil() as usize + 1;
                Ok(Lattice::with_truncation(n, k, 0.0, TailModel::Negligible))
            }
            DensityDecay::Zero => Ok(Lattice::with_truncation(n, 1, 0.0, TailModel::Negligible)),
        }
    }
}

/// Weights in the norms `int |g| w(|xi|) d xi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Wiener,
    Hom { s: f64 },
    /// `min(|xi|^r, |xi|^s)`.
    Mixed { r: f64, s: f64 },
}

impl Weight {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Weight::Wiener => 1.0,
            Weight::Hom { s } => r.powf(s),
            Weight::Mixed { r: a, s: b } => r.powf(a).min(r.powf(b)),
        }
    }

    /// Exponents of the weight at the origin and at infinity.
    pub fn exponents(&self) -> (f64, f64) {
        match *self {
            Weight::Wiener => (0.0, 0.0),
            Weight::Hom { s } => (s, s),
            Weight::Mixed { r, s } => (r.max(s), r.min(s)),
        }
    }
}

/// `int |g(xi)| w(|xi|) d xi` over `R^n` for `n <= 2`.
pub fn weighted_l1_integral(
    n: usize,
    g: impl Fn(&[f64]) -> f64 + Sync,
    weight: Weight,
    grid: &QuadratureGrid,
    scale: f64,
) -> Result<QuadResult> {
    match n {
        1 => Ok(integrate_line(&|x: f64| g(&[x]).abs() * weight.eval(x.abs()), scale, grid)),
        2 => Ok(integrate_plane(
            &|x: f64, y: f64| g(&[x, y]).abs() * weight.eval((x * x + y * y).sqrt()),
            scale,
            grid,
        )),
        _ => Err(Error::Unsupported(format!("norms in dimension {n}"))),
    }
}

pub fn weighted_l1_norm(f: &SpectralDensity, weight: Weight, grid: &QuadratureGrid) -> Result<QuadResult> {
    let (at_zero, at_inf) = weight.exponents();
    let nf = f.n as f64;
    if f.singularity_order() - at_zero >= nf {
        return Err(Error::Domain(format!(
            "weighted norm diverges at the origin: singularity {} against weight exponent {at_zero}",
            f.singularity_order()
        )));
    }
    if f.decay_rate() - at_inf <= nf {
        return Err(Error::Domain(format!(
            "weighted norm diverges at infinity: decay {} against weight exponent {at_inf}",
            f.decay_rate()
        )));
    }
    weighted_l1_integral(f.n, |x| f.magnitude(x), weight, grid, f.scale())
}

/// `max (1 + |x|)^s |g(x)|` over the samples.
pub fn weighted_sup_norm(points: &[Vec<f64>], values: &[f64], s: f64) -> f64 {
    points
        .iter()
        .zip(values)
        .map(|(x, v)| (1.0 + norm(x)).powf(s) * v.abs())
        .fold(0.0, f64::max)
}

/// Evaluation context shared by the alias operator and the folded error
/// integrals at a fixed `h`.
pub struct AliasContext {
    pub h: f64,
    pub symbol: CardinalSymbol,
    pub density: SpectralDensity,
    pub(crate) data: Lattice,
    pub(crate) tail: Lattice,
}

/// Split of the cardinal symbol at a point `p = h zeta` of the cell.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CellWeights {
    /// `L_1 hat(p)`.
    pub w0: f64,
    /// `1 - L_1 hat(p)`.
    pub comp0: f64,
    /// `1 / periodisation(p)`; zero at the origin when the transform is
    /// singular.
    pub inv: f64,
}

impl AliasContext {
    pub fn new(phi: &BasisFunction, density: &SpectralDensity, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
        }
        if phi.n != density.n {
            return Err(Error::InvalidParameter("basis and density dimensions differ".into()));
        }
        let nf = phi.n as f64;
        if density.decay_rate() <= nf {
            return Err(Error::TailNotSummable { decay: density.decay_rate(), needed: nf });
        }
        let symbol = CardinalSymbol::new(phi, DEFAULT_TOL)?;
        let data = density.alias_lattice(h, DEFAULT_TOL)?;
        let tail = combined_lattice(phi, &data, density, 0.0)?;
        Ok(Self { h, symbol, density: density.clone(), data, tail })
    }

    pub(crate) fn weights(&self, p: &[f64]) -> CellWeights {
        let (centre, rest) = self.symbol.cell(p);
        if centre.is_infinite() {
            CellWeights { w0: 1.0, comp0: 0.0, inv: 0.0 }
        } else {
            let total = centre + rest;
            CellWeights { w0: centre / total, comp0: rest / total, inv: 1.0 / total }
        }
    }

    /// `f_hat(p / h)`.
    pub(crate) fn data_at(&self, p: &[f64]) -> Complex64 {
        let mut xi = [0.0; 8];
        for (x, v) in xi.iter_mut().zip(p) {
            *x = v / self.h;
        }
        self.density.value(&xi[..p.len()])
    }

    /// `sum_{k != 0} f_hat(zeta + 2 pi k / h)` with `p = h zeta`.
    pub(crate) fn data_aliases(&self, p: &[f64]) -> Complex64 {
        self.data.sum_nonzero(p, 2.0 * PI, |q| self.data_at(q))
    }

    /// `Sigma_h(f_hat)(xi)`.
    pub fn alias_apply(&self, xi: &[f64]) -> Complex64 {
        let n = xi.len();
        let mut p = [0.0; 8];
        for (q, v) in p.iter_mut().zip(xi) {
            *q = v * self.h;
        }
        let mut p0 = [0.0; 8];
        reduce_to_cell(&p[..n], &mut p0[..n]);
        let bracket = self.data_at(&p0[..n]) + self.data_aliases(&p0[..n]);
        bracket * self.symbol.value(&p[..n])
    }

    /// `sum_k f_hat(xi + 2 pi k / h)`.
    pub fn alias_bracket(&self, xi: &[f64]) -> Complex64 {
        let n = xi.len();
        let mut p = [0.0; 8];
        for (q, v) in p.iter_mut().zip(xi) {
            *q = v * self.h;
        }
        let mut p0 = [0.0; 8];
        reduce_to_cell(&p[..n], &mut p0[..n]);
        self.data_at(&p0[..n]) + self.data_aliases(&p0[..n])
    }

    /// `s_h[f]^(xi) - f_hat(xi)`, evaluated without cancellation.
    pub fn error_density(&self, xi: &[f64]) -> Complex64 {
        let n = xi.len();
        let mut p = [0.0; 8];
        for (q, v) in p.iter_mut().zip(xi) {
            *q = v * self.h;
        }
        let mut p0 = [0.0; 8];
        let moved = reduce_to_cell(&p[..n], &mut p0[..n]);
        let cw = self.weights(&p0[..n]);
        let a0 = self.data_at(&p0[..n]);
        let rest = self.data_aliases(&p0[..n]);
        if !moved {
            rest * cw.w0 - a0 * cw.comp0
        } else {
            let w = self.symbol.basis().fourier(&p[..n]) * cw.inv;
            (a0 + rest) * w - self.data_at(&p[..n])
        }
    }

    /// `sum_l |e(zeta + 2 pi l / h)|` for `p = h zeta` in the cell.
    pub(crate) fn folded_error(&self, p: &[f64]) -> f64 {
        let cw = self.weights(p);
        let a0 = self.data_at(p);
        let rest = self.data_aliases(p);
        let total = a0 + rest;
        let e0 = (rest * cw.w0 - a0 * cw.comp0).norm();
        let phi = self.symbol.basis();
        let inv = cw.inv;
        let others = self.tail.sum_nonzero(p, 2.0 * PI, |q| (total * (phi.fourier(q) * inv) - self.data_at(q)).norm());
        e0 + others
    }

    /// `sum_l (1 - L_1 hat) |f_hat|` over the translates of `zeta`.
    pub(crate) fn folded_bound(&self, p: &[f64]) -> f64 {
        let cw = self.weights(p);
        let phi = self.symbol.basis();
        let inv = cw.inv;
        let own = cw.comp0 * self.data_at(p).norm();
        own + self.tail.sum_nonzero(p, 2.0 * PI, |q| (1.0 - phi.fourier(q) * inv) * self.data_at(q).norm())
    }

    /// `|sum_k f_hat(zeta + 2 pi k / h)|`, the folded integrand of
    /// `||Sigma_h f_hat||_1`.
    pub(crate) fn folded_alias(&self, p: &[f64]) -> f64 {
        (self.data_at(p) + self.data_aliases(p)).norm()
    }
}

/// Lattice for sums mixing basis and data aliases: power tails when either
/// decays algebraically, otherwise the larger of the two truncations.
pub(crate) fn combined_lattice(
    phi: &BasisFunction,
    data: &Lattice,
    density: &SpectralDensity,
    growth: f64,
) -> Result<Lattice> {
    let n = phi.n;
    let basis_lat = Lattice::for_decay(n, phi.decay, growth, DEFAULT_TOL)?;
    let basis_rate = phi.decay.exponent();
    let data_rate = density.decay_rate();
    let slow = basis_rate.min(data_rate + growth);
    if slow.is_finite() {
        let lat = Lattice::for_decay(n, Decay::Power { exponent: slow }, growth.min(0.0), DEFAULT_TOL)?;
        let k = lat.truncation().max(basis_lat.truncation()).max(data.truncation());
        return Ok(Lattice::with_truncation(n, k, lat.params.tail_bound, lat.tail));
    }
    let k = basis_lat.truncation().max(data.truncation());
    Ok(Lattice::with_truncation(n, k, basis_lat.params.tail_bound, TailModel::Negligible))
}

/// `int_{Q_h} F(h zeta) d zeta` over the cell `[-pi/h, pi/h]^n`.
pub(crate) fn integrate_cell(
    n: usize,
    h: f64,
    grid: &QuadratureGrid,
    f: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<QuadResult> {
    let half = PI / h;
    match n {
        1 => {
            let bp = graded_breakpoints(half, grid.levels, true);
            Ok(adaptive(&|z: f64| f(&[h * z]), &bp, grid.rel_tol, grid.abs_tol, grid.max_intervals))
        }
        2 => Ok(integrate_square(&|x: f64, y: f64| f(&[h * x, h * y]), half, grid)),
        _ => Err(Error::Unsupported(format!("cell integrals in dimension {n}"))),
    }
}

pub fn alias_apply(f: &SpectralDensity, phi: &BasisFunction, h: f64, xi: &[f64]) -> Result<Complex64> {
    Ok(AliasContext::new(phi, f, h)?.alias_apply(xi))
}

pub fn interp_error_density(f: &SpectralDensity, phi: &BasisFunction, h: f64, xi: &[f64]) -> Result<Complex64> {
    Ok(AliasContext::new(phi, f, h)?.error_density(xi))
}

/// `|| s_h[f]^ - f_hat ||_1`.
pub fn interp_error_norm(
    f: &SpectralDensity,
    phi: &BasisFunction,
    h: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let ctx = AliasContext::new(phi, f, h)?;
    integrate_cell(f.n, h, grid, |p| ctx.folded_error(p))
}

/// `2 int (1 - L_1 hat(h xi)) |f_hat(xi)| d xi`.
pub fn interp_error_bound(
    f: &SpectralDensity,
    phi: &BasisFunction,
    h: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let ctx = AliasContext::new(phi, f, h)?;
    let r = integrate_cell(f.n, h, grid, |p| ctx.folded_bound(p))?;
    Ok(QuadResult { value: 2.0 * r.value, error: 2.0 * r.error, ..r })
}

/// `|| Sigma_h f_hat ||_1`.
pub fn alias_l1_norm(
    f: &SpectralDensity,
    phi: &BasisFunction,
    h: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let ctx = AliasContext::new(phi, f, h)?;
    integrate_cell(f.n, h, grid, |p| ctx.folded_alias(p))
}

/// The interpolant `s_h[f](x)` from the spectral side: trapezoid rule in
/// `zeta` over the cell (the folded integrand is periodic) with `points`
/// nodes per axis. One dimension only.
pub fn interpolant_from_spectrum(
    f: &SpectralDensity,
    phi: &BasisFunction,
    h: f64,
    xs: &[f64],
    points: usize,
) -> Result<Vec<f64>> {
    if f.n != 1 {
        return Err(Error::Unsupported("spectral interpolant evaluation in dimension > 1".into()));
    }
    let ctx = AliasContext::new(phi, f, h)?;
    let lat = ctx.tail.clone();
    let dz = 2.0 * PI / h / points as f64;
    let mut out = vec![0.0; xs.len()];
    for m in 0..points {
        let zeta = -PI / h + (m as f64 + 0.5) * dz;
        let p = h * zeta;
        let cw = ctx.weights(&[p]);
        let bracket = ctx.data_at(&[p]) + ctx.data_aliases(&[p]);
        for (o, &x) in out.iter_mut().zip(xs) {
            let phase = Complex64::from_polar(1.0, x * zeta);
            let shift = lat.sum_line(p, 2.0 * PI, |q| {
                Complex64::from_polar(phi.radial(q.abs()) * cw.inv, x * (q - p) / h)
            });
            let v = bracket * phase * (shift + cw.w0);
            *o += v.re * dz / (2.0 * PI);
        }
    }
    Ok(out)
}

/// Summation taper `exp(-|epsilon h j|^2)` for `kappa = 0`, with epsilon
/// halved until the value changes by less than `tol`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Taper {
    pub epsilon: f64,
    pub tol: f64,
}

impl Default for Taper {
    fn default() -> Self {
        Self { epsilon: 1.0, tol: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpatialInterpolation {
    pub value: f64,
    /// Bound on the omitted terms from the decay of the Lagrange function.
    pub truncation_estimate: f64,
    pub epsilon: Option<f64>,
}

/// `sum_{|j|_inf <= J} f(hj) L_1(x/h - j)` with the Lagrange function taken
/// from `samples`.
pub fn interpolate_spatial(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    samples: &CardinalSamples,
    kappa: f64,
    h: f64,
    x: &[f64],
    truncation: usize,
    taper: Option<Taper>,
) -> Result<SpatialInterpolation> {
    let n = samples.n;
    if x.len() != n {
        return Err(Error::InvalidParameter("point dimension mismatch".into()));
    }
    if kappa == 0.0 && taper.is_none() {
        return Err(Error::Refused(
            "the interpolation series need not converge absolutely without a summation taper".into(),
        ));
    }
    let j = truncation as i64;
    let mut y = vec![0.0; n];
    let mut node = vec![0.0; n];
    let mut sup_f = 0.0f64;
    let mut sum_with = |eps: Option<f64>| -> f64 {
        let mut total = 0.0;
        crate::cardinal::for_each_index(n, -j, j, |k| {
            let mut r2 = 0.0;
            for d in 0..n {
                node[d] = h * k[d] as f64;
                y[d] = x[d] / h - k[d] as f64;
                r2 += node[d] * node[d];
            }
            let l = samples.eval(&y);
            if l == 0.0 {
                return;
            }
            let fv = f(&node);
            sup_f = sup_f.max(fv.abs());
            let t = eps.map(|e| (-(e * e) * r2).exp()).unwrap_or(1.0);
            total += t * fv * l;
        });
        total
    };
    let (value, epsilon) = match taper {
        None => (sum_with(None), None),
        Some(tp) => {
            let mut eps = tp.epsilon;
            let mut prev = sum_with(Some(eps));
            let mut out = (prev, Some(eps));
            for _ in 0..60 {
                eps *= 0.5;
                let v = sum_with(Some(eps));
                out = (v, Some(eps));
                if (v - prev).abs() < tp.tol {
                    break;
                }
                prev = v;
            }
            out
        }
    };
    let decay = n as f64 + kappa.max(1.0);
    let gap = (truncation as f64 - norm(x) / h).max(1.0);
    let truncation_estimate = 2.0 * n as f64 * sup_f * gap.powf(1.0 - decay) / (decay - 1.0);
    Ok(SpatialInterpolation { value, truncation_estimate, epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> QuadratureGrid {
        QuadratureGrid::default()
    }

    #[test]
    fn gaussian_norms() {
        let f = SpectralDensity::gaussian(1, 1.0).unwrap();
        let w = weighted_l1_norm(&f, Weight::Wiener, &grid()).unwrap();
        assert!((w.value - PI.sqrt()).abs() < 1e-8);
        let h2 = weighted_l1_norm(&f, Weight::Hom { s: 2.0 }, &grid()).unwrap();
        assert!((h2.value - PI.sqrt() / 2.0).abs() < 1e-8);
        let m12 = weighted_l1_norm(&f, Weight::Mixed { r: 1.0, s: 2.0 }, &grid()).unwrap();
        let m22 = weighted_l1_norm(&f, Weight::Mixed { r: 2.0, s: 2.0 }, &grid()).unwrap();
        assert!(m12.value <= m22.value);
    }

    #[test]
    fn planar_gaussian_norm() {
        let f = SpectralDensity::gaussian(2, 1.0).unwrap();
        let w = weighted_l1_norm(&f, Weight::Wiener, &grid()).unwrap();
        assert!((w.value - PI).abs() < 1e-8);
    }

    #[test]
    fn divergent_norms_are_flagged() {
        let f = SpectralDensity::new(1, DensitySpec::SingularGaussian { sigma: 0.5 }).unwrap();
        assert!(weighted_l1_norm(&f, Weight::Hom { s: -0.6 }, &grid()).is_err());
        let a = SpectralDensity::algebraic(1, 1.0).unwrap();
        assert!(weighted_l1_norm(&a, Weight::Hom { s: 1.0 }, &grid()).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.7]).collect();
        let ones = vec![1.0; 50];
        assert_eq!(weighted_sup_norm(&pts, &ones, 0.0), 1.0);
        let g: Vec<f64> = pts.iter().map(|x| (1.0 + x[0]).powi(-2)).collect();
        assert!((weighted_sup_norm(&pts, &g, 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_density_has_zero_error() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let z = SpectralDensity::zero(1);
        assert_eq!(interp_error_density(&z, &phi, 0.1, &[0.3]).unwrap(), Complex64::default());
        assert_eq!(interp_error_norm(&z, &phi, 0.1, &grid()).unwrap().value, 0.0);
    }

    #[test]
    fn bracket_is_periodic() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let f = SpectralDensity::algebraic(1, 1.5).unwrap();
        let h = 0.3;
        let ctx = AliasContext::new(&phi, &f, h).unwrap();
        let a = ctx.alias_bracket(&[0.4]);
        let b = ctx.alias_bracket(&[0.4 + 2.0 * PI / h]);
        assert!((a - b).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn compact_support_keeps_the_band() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let f = SpectralDensity::new(1, DensitySpec::Bump { radius: 1.0 }).unwrap();
        let h = 0.1;
        let ctx = AliasContext::new(&phi, &f, h).unwrap();
        for &x in &[0.0, 0.3, -0.8, 0.99] {
            let direct = f.value(&[x]) * ctx.symbol.value(&[h * x]);
            assert!((ctx.alias_apply(&[x]) - direct).norm() < 1e-15);
        }
    }

    #[test]
    fn error_density_matches_definition() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let f = SpectralDensity::gaussian(1, 1.0).unwrap();
        let h = 0.5;
        let ctx = AliasContext::new(&phi, &f, h).unwrap();
        for &x in &[0.2, 1.3, 5.0, 9.1, -14.0] {
            let direct = ctx.alias_apply(&[x]) - f.value(&[x]);
            assert!((ctx.error_density(&[x]) - direct).norm() < 1e-13, "{x}");
        }
    }

    #[test]
    fn folded_norm_matches_line_quadrature() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let f = SpectralDensity::gaussian(1, 1.0).unwrap();
        let h = 0.5;
        let ctx = AliasContext::new(&phi, &f, h).unwrap();
        let folded = interp_error_norm(&f, &phi, h, &grid()).unwrap();
        // Direct integral over the line, split at the cell edges.
        let mut bp = vec![0.0];
        for k in 0..40 {
            bp.push((2 * k + 1) as f64 * PI / h);
        }
        let mut all: Vec<f64> = bp.iter().skip(1).rev().map(|x| -x).collect();
        all.extend(bp);
        let direct = adaptive(&|x: f64| ctx.error_density(&[x]).norm(), &all, 1e-11, 1e-300, 100_000);
        assert!((folded.value - direct.value).abs() < 1e-6 * folded.value, "{folded:?} {direct:?}");
    }

    #[test]
    fn contraction() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        for (m, h) in [(1.0, 0.7), (1.5, 0.2), (3.0, 1.3)] {
            let f = SpectralDensity::algebraic(1, m).unwrap();
            let lhs = alias_l1_norm(&f, &phi, h, &grid()).unwrap().value;
            let rhs = weighted_l1_norm(&f, Weight::Wiener, &grid()).unwrap().value;
            assert!(lhs <= rhs * (1.0 + 1e-9));
        }
    }

    #[test]
    fn band_limited_error_equals_bound() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let f = SpectralDensity::new(1, DensitySpec::Bump { radius: 1.0 }).unwrap();
        let h = 0.1;
        let e = interp_error_norm(&f, &phi, h, &grid()).unwrap().value;
        let b = interp_error_bound(&f, &phi, h, &grid()).unwrap().value;
        assert!((e - b).abs() < 1e-8 * b, "{e} {b}");
    }

    #[test]
    fn spatial_and_spectral_paths_agree() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let f = SpectralDensity::gaussian(1, 1.0).unwrap();
        let h = 0.5;
        let samples = crate::cardinal::cardinal_samples(&phi, 64, 64).unwrap();
        let data = |x: &[f64]| f.spatial(x).unwrap().re;
        let xs = [0.0, 0.37, -1.21, 2.6];
        let spectral = interpolant_from_spectrum(&f, &phi, h, &xs, 4096).unwrap();
        for (x, s) in xs.iter().zip(&spectral) {
            let v = interpolate_spatial(&data, &samples, phi.kappa, h, &[*x], 120, None).unwrap();
            assert!((v.value - s).abs() < 1e-5, "{x}: {} vs {s}", v.value);
        }
    }

    #[test]
    fn constant_data_is_reproduced() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let samples = crate::cardinal::cardinal_samples(&phi, 64, 64).unwrap();
        let one = |_: &[f64]| 1.0;
        for i in 0..10 {
            let x = -3.0 + 0.61 * i as f64;
            let v = interpolate_spatial(&one, &samples, phi.kappa, 1.0, &[x], 60, None).unwrap();
            assert!((v.value - 1.0).abs() < 1e-5, "{x} {}", v.value);
        }
    }

    #[test]
    fn gaussian_basis_needs_a_taper() {
        let phi = BasisFunction::gaussian(1, 1.0).unwrap();
        let samples = crate::cardinal::cardinal_samples(&phi, 64, 16).unwrap();
        let one = |_: &[f64]| 1.0;
        assert!(interpolate_spatial(&one, &samples, 0.0, 1.0, &[0.2], 10, None).is_err());
        let v = interpolate_spatial(&one, &samples, 0.0, 1.0, &[0.2], 63, Some(Taper::default())).unwrap();
        assert!((v.value - 1.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn density_json() {
        let f = SpectralDensity::gaussian(1, 2.0).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"n":1,"kind":"gaussian","params":{"sigma":2.0}}"#);
        let back: SpectralDensity = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
