//! Scheme multipliers `G` and `G_a^*`, their defect against the symbol, and
//! the Fourier-side error of the semi-discrete evolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{norm, BasisFunction};
use crate::cardinal::{reduce_to_cell, CardinalSymbol};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, DEFAULT_TOL};
use crate::quadrature::{QuadResult, QuadratureGrid};
use crate::spectral::{integrate_cell, weighted_l1_integral, AliasContext, SpectralDensity, Weight};
use crate::symbols::{make_symbol, Symbol, SymbolSpec};

/// `exp(z)` with the real part clamped to `[-700, 700]`; the phase is kept.
pub fn clamped_exp(z: Complex64) -> Complex64 {
    if z.re < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(z.re.clamp(-700.0, 700.0).exp(), z.im)
}

/// `exp(z) - 1` accurate for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    if z.norm() > 0.5 {
        return clamped_exp(z) - 1.0;
    }
    let half = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half * half;
    Complex64::new(re, z.re.exp() * z.im.sin())
}

/// `G_a^*(xi; h) = sum_k a(xi + 2 pi k / h) L_1 hat(h xi + 2 pi k)`.
#[derive(Clone, Debug)]
pub struct SchemeMultiplier {
    pub h: f64,
    pub symbol: Symbol,
    cardinal: CardinalSymbol,
    lattice: Lattice,
}

impl SchemeMultiplier {
    pub fn new(phi: &BasisFunction, a: &Symbol, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
        }
        if phi.n != a.n {
            return Err(Error::InvalidParameter("basis and symbol dimensions differ".into()));
        }
        let growth = a.order.max(0.0);
        let cardinal = CardinalSymbol::new(phi, DEFAULT_TOL)?;
        let lattice = Lattice::for_decay(phi.n, phi.decay, growth, DEFAULT_TOL)?;
        Ok(Self { h, symbol: a.clone(), cardinal, lattice })
    }

    pub fn basis(&self) -> &BasisFunction {
        self.cardinal.basis()
    }

    /// `(G_a^*(zeta), G_a^*(zeta) - a(zeta))` for `p = h zeta` in the cell.
    pub fn at_cell(&self, p: &[f64]) -> (Complex64, Complex64) {
        let n = p.len();
        let h = self.h;
        let mut xi0 = [0.0; 8];
        for (x, v) in xi0.iter_mut().zip(p) {
            *x = v / h;
        }
        let a0 = self.symbol.value(&xi0[..n]);
        let (centre, rest) = self.cardinal.cell(p);
        if centre.is_infinite() {
            return (a0, Complex64::new(0.0, 0.0));
        }
        let inv = 1.0 / (centre + rest);
        let comp0 = rest * inv;
        let phi = self.cardinal.basis();
        let aliases = self.lattice.sum_nonzero(p, 2.0 * PI, |q| {
            let mut xi = [0.0; 8];
            for (x, v) in xi.iter_mut().zip(q) {
                *x = v / h;
            }
            self.symbol.value(&xi[..n]) * (phi.fourier(q) * inv)
        });
        let defect = aliases - a0 * comp0;
        (a0 + defect, defect)
    }

    fn reduced(&self, xi: &[f64]) -> ([f64; 8], bool) {
        let n = xi.len();
        let mut p = [0.0; 8];
        for (q, v) in p.iter_mut().zip(xi) {
            *q = v * self.h;
        }
        let mut p0 = [0.0; 8];
        let moved = reduce_to_cell(&p[..n], &mut p0[..n]);
        (p0, moved)
    }

    /// `G_a^*(xi; h)`.
    pub fn value(&self, xi: &[f64]) -> Complex64 {
        let (p0, _) = self.reduced(xi);
        self.at_cell(&p0[..xi.len()]).0
    }

    /// `G_a^*(xi; h) - a(xi)`, without cancellation when `h xi` lies in the
    /// cell.
    pub fn defect(&self, xi: &[f64]) -> Complex64 {
        let (p0, moved) = self.reduced(xi);
        let (g, d) = self.at_cell(&p0[..xi.len()]);
        if moved {
            g - self.symbol.value(xi)
        } else {
            d
        }
    }
}

fn heat_symbol(n: usize) -> Symbol {
    make_symbol(&SymbolSpec::Heat, n).expect("heat symbol")
}

fn check_heat_decay(phi: &BasisFunction) -> Result<()> {
    let needed = phi.n as f64 + 2.0;
    if phi.decay.exponent() <= needed {
        return Err(Error::TailNotSummable { decay: phi.decay.exponent(), needed });
    }
    Ok(())
}

/// `G(eta) = sum_k |eta + 2 pi k|^2 L_1 hat(eta + 2 pi k)`.
pub fn heat_multiplier(phi: &BasisFunction, eta: &[f64]) -> Result<f64> {
    check_heat_decay(phi)?;
    Ok(SchemeMultiplier::new(phi, &heat_symbol(phi.n), 1.0)?.value(eta).re)
}

/// `G(eta) - |eta|^2`.
pub fn heat_defect(phi: &BasisFunction, eta: &[f64]) -> Result<f64> {
    check_heat_decay(phi)?;
    Ok(SchemeMultiplier::new(phi, &heat_symbol(phi.n), 1.0)?.defect(eta).re)
}

pub fn scheme_multiplier(phi: &BasisFunction, a: &Symbol, xi: &[f64], h: f64) -> Result<Complex64> {
    Ok(SchemeMultiplier::new(phi, a, h)?.value(xi))
}

/// Multiplier values and defects on a set of frequencies.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplierField {
    pub h: f64,
    pub basis: crate::basis::BasisSpec,
    pub symbol: SymbolSpec,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    pub defects: Vec<Complex64>,
}

impl MultiplierField {
    pub fn build(phi: &BasisFunction, a: &Symbol, h: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        let m = SchemeMultiplier::new(phi, a, h)?;
        let values = points.iter().map(|x| m.value(x)).collect();
        let defects = points.iter().map(|x| m.defect(x)).collect();
        Ok(Self { h, basis: phi.spec(), symbol: a.spec.clone(), points, values, defects })
    }

    /// Evenly spaced points on `[-radius, radius]` (one dimension).
    pub fn line(phi: &BasisFunction, a: &Symbol, h: f64, radius: f64, count: usize) -> Result<Self> {
        let count = count.max(2);
        let points = (0..count)
            .map(|i| vec![-radius + 2.0 * radius * i as f64 / (count - 1) as f64])
            .collect();
        Self::build(phi, a, h, points)
    }

    pub fn min_real_part(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    /// Rows `xi..., re G, im G, re defect, im defect`.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(1, |p| p.len());
        let mut out = String::new();
        for i in 0..n {
            out.push_str(&format!("xi{i},"));
        }
        out.push_str("re_g,im_g,re_defect,im_defect\n");
        for ((x, g), d) in self.points.iter().zip(&self.values).zip(&self.defects) {
            for v in x {
                out.push_str(&format!("{v:e},"));
            }
            out.push_str(&format!("{:e},{:e},{:e},{:e}\n", g.re, g.im, d.re, d.im));
        }
        out
    }
}

/// `sup |G_a^* - a| / (h^{kappa - max(q, 0)} |xi|^kappa)` over `|xi| <= pi/h`
/// for one `h`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectSample {
    pub h: f64,
    pub sup_ratio: f64,
    pub at: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectReport {
    pub kappa: f64,
    pub order: f64,
    pub samples: Vec<DefectSample>,
    /// Largest over smallest sup ratio across the ladder.
    pub spread: f64,
    /// Largest sup ratio; the fitted constant.
    pub constant: f64,
}

/// Points in the ball `|xi| <= radius` along the axes and the diagonal, with
/// radii both log- and linearly spaced.
fn ball_samples(n: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    let mut radii: Vec<f64> = (0..count).map(|i| radius * 1e-4f64.powf(1.0 - i as f64 / (count - 1) as f64)).collect();
    radii.extend((1..=count).map(|i| radius * i as f64 / count as f64));
    let mut out = Vec::new();
    for d in crate::symbols::sample_directions(n) {
        for &r in &radii {
            out.push(d.iter().map(|v| v * r).collect());
        }
    }
    out
}

pub fn defect_check(phi: &BasisFunction, a: &Symbol, hs: &[f64], count: usize) -> Result<DefectReport> {
    let kappa = phi.kappa;
    let q = a.order.max(0.0);
    let mut samples = Vec::with_capacity(hs.len());
    for &h in hs {
        let m = SchemeMultiplier::new(phi, a, h)?;
        let scale = h.powf(kappa - q);
        let mut best = DefectSample { h, sup_ratio: 0.0, at: vec![0.0; phi.n] };
        for xi in ball_samples(phi.n, PI / h, count.max(8)) {
            let r = norm(&xi);
            if r == 0.0 {
                continue;
            }
            let ratio = m.defect(&xi).norm() / (scale * r.powf(kappa));
            if ratio > best.sup_ratio {
                best = DefectSample { h, sup_ratio: ratio, at: xi };
            }
        }
        samples.push(best);
    }
    let hi = samples.iter().map(|s| s.sup_ratio).fold(0.0, f64::max);
    let lo = samples.iter().map(|s| s.sup_ratio).fold(f64::INFINITY, f64::min);
    Ok(DefectReport { kappa, order: a.order, samples, spread: hi / lo, constant: hi })
}

/// Error of the semi-discrete evolution at one `(h, t)` on the Fourier side.
pub struct EvolutionContext {
    pub alias: AliasContext,
    pub multiplier: SchemeMultiplier,
    pub t: f64,
}

impl EvolutionContext {
    pub fn new(f: &SpectralDensity, phi: &BasisFunction, a: &Symbol, h: f64, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t must be nonnegative, got {t}")));
        }
        if !a.re_nonneg {
            return Err(Error::InvalidParameter("symbol must have nonnegative real part".into()));
        }
        let alias = AliasContext::new(phi, f, h)?;
        let multiplier = SchemeMultiplier::new(phi, a, h)?;
        Ok(Self { alias, multiplier, t })
    }

    fn symbol_at(&self, q: &[f64]) -> Complex64 {
        let n = q.len();
        let mut xi = [0.0; 8];
        for (x, v) in xi.iter_mut().zip(q) {
            *x = v / self.alias.h;
        }
        self.multiplier.symbol.value(&xi[..n])
    }

    /// `u_h hat(xi, t) - u hat(xi, t)`.
    pub fn error_density(&self, xi: &[f64]) -> Complex64 {
        let n = xi.len();
        let h = self.alias.h;
        let mut p = [0.0; 8];
        for (q, v) in p.iter_mut().zip(xi) {
            *q = v * h;
        }
        let mut p0 = [0.0; 8];
        let moved = reduce_to_cell(&p[..n], &mut p0[..n]);
        if !moved {
            return self.centre_error(&p0[..n]);
        }
        let (g, _) = self.multiplier.at_cell(&p0[..n]);
        let decay = clamped_exp(-self.t * g);
        let exact = clamped_exp(-self.t * self.multiplier.symbol.value(xi)) * self.alias.density.value(xi);
        decay * self.alias.alias_apply(xi) - exact
    }

    fn centre_error(&self, p: &[f64]) -> Complex64 {
        let cw = self.alias.weights(p);
        let a0 = self.alias.data_at(p);
        let rest = self.alias.data_aliases(p);
        let interp = rest * cw.w0 - a0 * cw.comp0;
        let (g, d) = self.multiplier.at_cell(p);
        let t = self.t;
        let decay = clamped_exp(-t * g);
        let z = -t * d;
        let gap = if z.norm() <= 0.5 {
            clamped_exp(-t * (g - d)) * expm1(z)
        } else {
            decay - clamped_exp(-t * (g - d))
        };
        decay * interp + gap * a0
    }

    /// `sum_l |e(zeta + 2 pi l / h)|` for `p = h zeta` in the cell.
    pub(crate) fn folded_error(&self, p: &[f64]) -> f64 {
        let e0 = self.centre_error(p).norm();
        let cw = self.alias.weights(p);
        let total = self.alias.data_at(p) + self.alias.data_aliases(p);
        let (g, _) = self.multiplier.at_cell(p);
        let decay = clamped_exp(-self.t * g);
        let phi = self.multiplier.basis();
        let others = self.alias.tail.sum_nonzero(p, 2.0 * PI, |q| {
            let approx = decay * total * (phi.fourier(q) * cw.inv);
            let exact = clamped_exp(-self.t * self.symbol_at(q)) * self.alias.data_at(q);
            (approx - exact).norm()
        });
        e0 + others
    }

    /// `sum_l |exp(-t G_a^*) - exp(-t a)| |f_hat|` over the translates.
    pub(crate) fn folded_gap(&self, p: &[f64]) -> f64 {
        let (g, d) = self.multiplier.at_cell(p);
        let t = self.t;
        let decay = clamped_exp(-t * g);
        let own = (clamped_exp(-t * (g - d)) * expm1(-t * d)).norm() * self.alias.data_at(p).norm();
        own + self.alias.tail.sum_nonzero(p, 2.0 * PI, |q| {
            (decay - clamped_exp(-t * self.symbol_at(q))).norm() * self.alias.data_at(q).norm()
        })
    }
}

pub fn evolution_error_density(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    t: f64,
    xi: &[f64],
) -> Result<Complex64> {
    Ok(EvolutionContext::new(f, phi, a, h, t)?.error_density(xi))
}

/// `|| u_h(., t) - u(., t) ||_A`.
pub fn evolution_error_norm(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    t: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let ctx = EvolutionContext::new(f, phi, a, h, t)?;
    integrate_cell(f.n, h, grid, |p| ctx.folded_error(p))
}

/// `int |exp(-t G_a^*) - exp(-t a)| |f_hat|`.
pub fn multiplier_gap_norm(
    f: &SpectralDensity,
    phi: &BasisFunction,
    a: &Symbol,
    h: f64,
    t: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let ctx = EvolutionContext::new(f, phi, a, h, t)?;
    integrate_cell(f.n, h, grid, |p| ctx.folded_gap(p))
}

/// `t int |xi|^kappa exp(-t Re a(xi)) |f_hat(xi)| d xi`.
pub fn symbol_envelope(
    f: &SpectralDensity,
    a: &Symbol,
    t: f64,
    kappa: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let r = weighted_l1_integral(
        f.n,
        |x| f.magnitude(x) * (-t * a.value(x).re).max(-745.0).exp(),
        Weight::Hom { s: kappa },
        grid,
        f.scale(),
    )?;
    Ok(QuadResult { value: t * r.value, error: t * r.error, ..r })
}

/// `int |1 - exp(-t g |xi|^kappa)| exp(-t Re a(xi)) |f_hat(xi)| d xi`, the
/// limit when the order of the symbol equals `kappa`.
pub fn critical_envelope(
    f: &SpectralDensity,
    a: &Symbol,
    g: Complex64,
    t: f64,
    kappa: f64,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    weighted_l1_integral(
        f.n,
        |x| {
            let r = norm(x);
            let gap = expm1(-t * g * r.powf(kappa)).norm();
            gap * (-t * a.value(x).re).max(-745.0).exp() * f.magnitude(x)
        },
        Weight::Wiener,
        grid,
        f.scale(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::CutoffSpec;
    use crate::spectral::interp_error_density;

    fn ph13() -> BasisFunction {
        BasisFunction::polyharmonic(1, 3.0).unwrap()
    }

    #[test]
    fn heat_multiplier_properties() {
        let phi = ph13();
        for k in [-2.0, 0.0, 1.0, 3.0] {
            assert_eq!(heat_multiplier(&phi, &[2.0 * PI * k]).unwrap(), 0.0);
        }
        for i in 1..=50 {
            let eta = -PI + 2.0 * PI * i as f64 / 51.0;
            let d = heat_defect(&phi, &[eta]).unwrap();
            assert!(d >= 0.0);
            let g = heat_multiplier(&phi, &[eta]).unwrap();
            assert!((g - eta * eta - d).abs() < 1e-12 * g.max(1.0));
        }
    }

    #[test]
    fn heat_defect_limit_is_one_twelfth() {
        // (G - |eta|^2) / |eta|^4 -> sum (2 pi k)^{-2} = 1/12 for phi_hat = |eta|^{-4}.
        let phi = ph13();
        let eta: f64 = 1e-3;
        let r = heat_defect(&phi, &[eta]).unwrap() / eta.powi(4);
        assert!((r - 1.0 / 12.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn heat_defect_slope() {
        let phi = ph13();
        let xs: Vec<f64> = (4..10).map(|m| 2f64.powi(-m)).collect();
        let ys: Vec<f64> = xs.iter().map(|&e| heat_defect(&phi, &[e]).unwrap()).collect();
        let fit = crate::fit::loglog(&xs, &ys).unwrap();
        assert!((fit.slope - 4.0).abs() < 0.01);
    }

    #[test]
    fn general_multiplier_matches_heat() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
        for h in [0.5, 0.1, 0.03] {
            let m = SchemeMultiplier::new(&phi, &heat, h).unwrap();
            for xi in [0.3, 2.0, 17.0, -40.0] {
                let g = m.value(&[xi]);
                let expected = heat_multiplier(&phi, &[h * xi]).unwrap() / (h * h);
                assert!((g.re - expected).abs() <= 1e-9 * expected.max(1.0), "h={h} xi={xi}");
                assert_eq!(g.im, 0.0);
            }
        }
    }

    #[test]
    fn fix_strang_at_origin() {
        let phi = ph13();
        let levy = crate::symbols::levy_symbol(&crate::symbols::LevySpec {
            n: 1,
            drift: vec![0.3],
            diffusion: vec![],
            jumps: Some(crate::symbols::JumpMeasure {
                intensity: 2.0,
                density: crate::symbols::JumpDensity::Laplace { mean: 0.1, scale: 0.4 },
            }),
            cutoff: CutoffSpec::default(),
        })
        .unwrap();
        let m = SchemeMultiplier::new(&phi, &levy, 0.2).unwrap();
        assert_eq!(m.value(&[0.0]), levy.value(&[0.0]));
    }

    #[test]
    fn periodic_in_xi() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let a = make_symbol(&SymbolSpec::FractionalReg { s: 0.75, cutoff: CutoffSpec::default() }, 1).unwrap();
        let h = 0.25;
        let m = SchemeMultiplier::new(&phi, &a, h).unwrap();
        for xi in [0.1, 3.0, 9.0] {
            let shifted = m.value(&[xi + 2.0 * PI / h]);
            assert!((shifted - m.value(&[xi])).norm() < 1e-10 * m.value(&[xi]).norm().max(1.0));
        }
    }

    #[test]
    fn defect_vanishes_as_h_shrinks() {
        let phi = ph13();
        let a = make_symbol(&SymbolSpec::FractionalReg { s: 0.75, cutoff: CutoffSpec::default() }, 1).unwrap();
        let mut prev = f64::INFINITY;
        for m in 2..8 {
            let h = 2f64.powi(-m);
            let d = SchemeMultiplier::new(&phi, &a, h).unwrap().defect(&[1.5]).norm();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn defect_ratio_uniform_for_heat() {
        let phi = ph13();
        let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
        let hs: Vec<f64> = (3..=8).map(|m| 2f64.powi(-m)).collect();
        let report = defect_check(&phi, &heat, &hs, 64).unwrap();
        assert!(report.spread < 1.05, "{report:?}");
    }

    #[test]
    fn zero_time_is_interpolation() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let f = SpectralDensity::gaussian(1, 1.0).unwrap();
        let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
        for xi in [0.0, 0.7, 3.0, 11.0] {
            let e = evolution_error_density(&f, &phi, &heat, 0.5, 0.0, &[xi]).unwrap();
            let i = interp_error_density(&f, &phi, 0.5, &[xi]).unwrap();
            assert!((e - i).norm() <= 1e-15 * i.norm().max(1e-300), "xi={xi}: {e} {i}");
        }
        let zero = SpectralDensity::zero(1);
        assert_eq!(evolution_error_density(&zero, &phi, &heat, 0.5, 1.0, &[0.3]).unwrap().norm(), 0.0);
    }

    #[test]
    fn error_density_definition() {
        // Direct difference of the two solutions where there is no cancellation.
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let f = SpectralDensity::gaussian(1, 0.5).unwrap();
        let a = make_symbol(&SymbolSpec::Transport { velocity: vec![1.0] }, 1).unwrap();
        let (h, t) = (0.5, 0.7);
        let ctx = EvolutionContext::new(&f, &phi, &a, h, t).unwrap();
        for xi in [0.4, 2.0, 5.0] {
            let m = ctx.multiplier.value(&[xi]);
            let direct = (-t * m).exp() * ctx.alias.alias_apply(&[xi]) - (-t * a.value(&[xi])).exp() * f.value(&[xi]);
            let e = ctx.error_density(&[xi]);
            assert!((e - direct).norm() < 1e-12 * direct.norm().max(1e-3), "xi={xi}");
        }
    }

    #[test]
    fn expm1_small_arguments() {
        let z = Complex64::new(1e-12, -2e-12);
        let v = expm1(z);
        assert!((v - z).norm() < 1e-23);
        let z = Complex64::new(-0.3, 0.2);
        assert!((expm1(z) - (z.exp() - 1.0)).norm() < 1e-15);
        assert_eq!(clamped_exp(Complex64::new(-800.0, 1.0)), Complex64::new(0.0, 0.0));
        assert!(clamped_exp(Complex64::new(800.0, 0.0)).re.is_finite());
    }

    #[test]
    fn rejects_slow_decay() {
        let phi = BasisFunction::polyharmonic(1, 1.5).unwrap();
        assert!(heat_multiplier(&phi, &[0.3]).is_err());
    }
}
