//! Closed-form error constants, saturation thresholds and their dependence
//! on the shape parameter.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisFunction, BasisSpec, Family};
use crate::cardinal::CardinalSymbol;
use crate::error::{Error, Result};
use crate::fit::loglog;
use crate::lattice::{Lattice, LatticeSumParams, DEFAULT_TOL};
use crate::multiplier::heat_defect;
use crate::symbols::{asymptotic_limit, sample_directions, Symbol, SymbolSpec};

fn directions(phi: &BasisFunction) -> Vec<Vec<f64>> {
    if phi.is_radial() {
        let mut e = vec![0.0; phi.n];
        e[0] = 1.0;
        vec![e]
    } else {
        sample_directions(phi.n)
    }
}

fn unit(d: &[f64]) -> Vec<f64> {
    let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    d.iter().map(|v| v / r).collect()
}

/// Limit of `values` (a sequence approaching its limit geometrically or
/// faster), by a Cauchy check and one Richardson step.
fn settle(values: &[f64], tol: f64) -> Option<f64> {
    if values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let k = values.len();
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    if (values[k - 1] - values[k - 2]).abs() <= tol * scale {
        return Some(values[k - 1]);
    }
    let rich: Vec<f64> = values.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r = rich.len();
    ((rich[r - 1] - rich[r - 2]).abs() <= tol * scale).then(|| rich[r - 1])
}

/// `liminf` and `limsup` of `|eta|^kappa phi_hat(eta)` at the origin.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Amplitudes {
    pub lower: f64,
    pub upper: f64,
}

/// Radial limits along `eta = 2^{-m} d`, `m = 6..16`, taken over a sample of
/// directions.
pub fn limit_amplitudes(phi: &BasisFunction) -> Result<Amplitudes> {
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for d in directions(phi) {
        let d = unit(&d);
        let values: Vec<f64> = (6..=16)
            .map(|m| {
                let r = 2f64.powi(-m);
                let eta: Vec<f64> = d.iter().map(|v| v * r).collect();
                r.powf(phi.kappa) * phi.fourier(&eta)
            })
            .collect();
        let limit = settle(&values, 1e-6)
            .ok_or_else(|| Error::Domain(format!("|eta|^kappa phi_hat(eta) does not settle along {d:?}")))?;
        lower = lower.min(limit);
        upper = upper.max(limit);
    }
    if !(lower > 0.0) {
        return Err(Error::Domain(format!("limit amplitude {lower} is not positive")));
    }
    Ok(Amplitudes { lower, upper })
}

/// `sum_{k != 0} w(2 pi k) phi_hat(2 pi k)` for weights growing like
/// `|x|^growth`.
fn weighted_sum(phi: &BasisFunction, growth: f64, w: impl Fn(&[f64]) -> f64) -> Result<(f64, LatticeSumParams)> {
    let lattice = Lattice::for_decay(phi.n, phi.decay, growth, DEFAULT_TOL)?;
    let origin = vec![0.0; phi.n];
    let s = lattice.sum_nonzero(&origin, 2.0 * PI, |q| w(q) * phi.fourier(q));
    Ok((s, lattice.params))
}

fn weighted_sum_complex(
    phi: &BasisFunction,
    growth: f64,
    w: impl Fn(&[f64]) -> Complex64,
) -> Result<Complex64> {
    let lattice = Lattice::for_decay(phi.n, phi.decay, growth, DEFAULT_TOL)?;
    let origin = vec![0.0; phi.n];
    Ok(lattice.sum_nonzero(&origin, 2.0 * PI, |q| w(q) * phi.fourier(q)))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QConstant {
    pub q: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpConstants {
    /// `R(0) = sum_{k != 0} phi_hat(2 pi k)`.
    pub alias_sum: f64,
    pub l_upper: f64,
    pub l_lower: f64,
    /// `A_lower^{-1} sum_{k != 0} (1 + |k|^q) phi_hat(2 pi k)`.
    pub l_q: Vec<QConstant>,
    pub lattice: LatticeSumParams,
}

pub fn interp_constants(phi: &BasisFunction, qs: &[f64]) -> Result<InterpConstants> {
    let amp = limit_amplitudes(phi)?;
    let (r0, lattice) = weighted_sum(phi, 0.0, |_| 1.0)?;
    let (l_upper, l_lower) = if phi.kappa > 0.0 {
        (2.0 * r0 / amp.lower, 2.0 * r0 / amp.upper)
    } else {
        (2.0 * r0 / (amp.lower + r0), 2.0 * r0 / (amp.upper + r0))
    };
    let mut l_q = Vec::with_capacity(qs.len());
    for &q in qs {
        let (s, _) = weighted_sum(phi, q, |x| 1.0 + (norm(x) / (2.0 * PI)).powf(q))?;
        l_q.push(QConstant { q, value: s / amp.lower });
    }
    Ok(InterpConstants { alias_sum: r0, l_upper, l_lower, l_q, lattice })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HeatConstants {
    pub g_upper: f64,
    pub g_lower: f64,
}

/// `g = A^{-1} sum_{k != 0} |2 pi k|^2 phi_hat(2 pi k)` with `A` the lower
/// (upper) amplitude for the upper (lower) constant.
pub fn heat_constants(phi: &BasisFunction) -> Result<HeatConstants> {
    let amp = limit_amplitudes(phi)?;
    let (s, _) = weighted_sum(phi, 2.0, |x| x.iter().map(|v| v * v).sum())?;
    Ok(HeatConstants { g_upper: s / amp.lower, g_lower: s / amp.upper })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolConstant {
    pub symbol: String,
    /// Order `q` of the symbol.
    pub order: f64,
    /// `A^{-1} sum_{k != 0} a_inf(2 pi k) phi_hat(2 pi k)`.
    pub value: Complex64,
    /// Per homogeneous degree for polynomial symbols, highest first.
    pub per_degree: Vec<(u32, Complex64)>,
}

pub fn symbol_constant(a: &Symbol, phi: &BasisFunction) -> Result<SymbolConstant> {
    if a.n != phi.n {
        return Err(Error::InvalidParameter("symbol and basis dimensions differ".into()));
    }
    let amp = limit_amplitudes(phi)?;
    let q = a.order;
    let probe = {
        let mut e = vec![0.0; a.n];
        e[0] = 1.0;
        e
    };
    if a.a_inf(&probe).is_none() && asymptotic_limit(a, &probe, q, 1e-8).is_none() {
        return Err(Error::Refused(format!("{} has no limit a(lambda xi) / lambda^q", a.spec.kind())));
    }
    let a_inf = |x: &[f64]| -> Complex64 {
        a.a_inf(x)
            .or_else(|| asymptotic_limit(a, x, q, 1e-8))
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let value = weighted_sum_complex(phi, q, a_inf)? / amp.lower;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Refused(format!("{} has no limit at some lattice direction", a.spec.kind())));
    }
    let mut per_degree = Vec::new();
    if let SymbolSpec::Polynomial { .. } = a.spec {
        let top = a.order as u32;
        for d in (0..=top).rev() {
            let part = |x: &[f64]| -> Complex64 {
                a.homogeneous_parts(x)
                    .and_then(|p| p.into_iter().find(|(deg, _)| *deg == d).map(|(_, v)| v))
                    .unwrap_or_default()
            };
            per_degree.push((d, weighted_sum_complex(phi, d as f64, part)? / amp.lower));
        }
    }
    Ok(SymbolConstant { symbol: a.spec.kind().to_string(), order: q, value, per_degree })
}

/// Thresholds below which the constants control the error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Thresholds {
    pub epsilon: f64,
    /// Radius of the ball in `p_r`.
    pub r: f64,
    /// `p_r(|grad phi_hat|)`, a lower bound for the sup-sum from a sample.
    pub p_r: f64,
    pub rho1: f64,
    /// Absent when `|eta|^kappa phi_hat` never drops below the level.
    pub rho2: Option<f64>,
    pub rho: f64,
}

/// The radius used in the shape-parameter laws: `c^{-2}` for Gaussians,
/// `c^{-1}` for multiquadrics, `pi` otherwise.
pub fn natural_radius(phi: &BasisFunction) -> f64 {
    match phi.family {
        Family::Gaussian => phi.c.powi(-2).min(PI),
        Family::Multiquadric => phi.c.recip().min(PI),
        _ => PI,
    }
}

fn ball_sample(n: usize, r: f64) -> Vec<Vec<f64>> {
    let m = 33usize;
    let mut out = Vec::new();
    let total = m.pow(n as u32);
    for pos in 0..total {
        let mut rest = pos;
        let mut p = vec![0.0; n];
        for v in p.iter_mut() {
            let i = rest % m;
            rest /= m;
            *v = -r + 2.0 * r * i as f64 / (m - 1) as f64;
        }
        if norm(&p) <= r * (1.0 + 1e-12) {
            out.push(p);
        }
    }
    out
}

/// `rho = min(rho_1, rho_2)` with `rho_1 = min(r, eps R(0) / p_r(|grad
/// phi_hat|))` and `rho_2` the first radius where `|eta|^kappa phi_hat(eta)
/// >= (1 - eps) A_lower` fails.
pub fn threshold_rho(phi: &BasisFunction, epsilon: f64, r: f64) -> Result<Thresholds> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(r > 0.0 && r <= PI) {
        return Err(Error::InvalidParameter(format!("r must lie in (0, pi], got {r}")));
    }
    let n = phi.n;
    let amp = limit_amplitudes(phi)?;
    let (r0, _) = weighted_sum(phi, 0.0, |_| 1.0)?;
    let sample = ball_sample(n, r);
    let lattice = Lattice::for_decay(n, phi.decay, 0.0, DEFAULT_TOL)?;
    let origin = vec![0.0; n];
    let bad = std::cell::Cell::new(false);
    let p_r = lattice.sum_nonzero(&origin, 2.0 * PI, |q| {
        let mut best = 0.0f64;
        let mut x = vec![0.0; n];
        for s in &sample {
            for i in 0..n {
                x[i] = q[i] + s[i];
            }
            let g = phi.radial_derivative(norm(&x)).abs();
            if !g.is_finite() {
                bad.set(true);
            }
            best = best.max(g);
        }
        best
    });
    if bad.get() || !p_r.is_finite() {
        return Err(Error::Domain("gradient of phi_hat is not finite near a lattice point".into()));
    }
    let rho1 = if p_r > 0.0 { r.min(epsilon * r0 / p_r) } else { r };
    let level = (1.0 - epsilon) * amp.lower;
    let mut rho2: Option<f64> = None;
    for d in directions(phi) {
        let d = unit(&d);
        let holds = |t: f64| {
            let eta: Vec<f64> = d.iter().map(|v| v * t).collect();
            t.powf(phi.kappa) * phi.fourier(&eta) >= level
        };
        let radii: Vec<f64> = (0..=2200).map(|i| 1e-8 * 10f64.powf(i as f64 / 200.0)).collect();
        if let Some(i) = radii.iter().position(|&t| !holds(t)) {
            let (mut lo, mut hi) = (if i == 0 { 0.0 } else { radii[i - 1] }, radii[i]);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if holds(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            rho2 = Some(rho2.map_or(lo, |v: f64| v.min(lo)));
        }
    }
    let rho = rho2.map_or(rho1, |v| v.min(rho1));
    Ok(Thresholds { epsilon, r, p_r, rho1, rho2, rho })
}

/// Everything the error analysis needs about one basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub basis: BasisSpec,
    pub kappa: f64,
    pub a_lower: f64,
    pub a_upper: f64,
    pub l_upper: f64,
    pub l_lower: f64,
    pub l_q: Vec<QConstant>,
    /// Absent when the transform decays too slowly for the heat sums.
    pub g_upper: Option<f64>,
    pub g_lower: Option<f64>,
    pub symbol: Option<SymbolConstant>,
    pub thresholds: Thresholds,
    pub lattice: LatticeSumParams,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportOptions {
    pub qs: Vec<f64>,
    pub epsilon: f64,
    /// Radius for `p_r`; the shape-law radius when absent.
    pub r: Option<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { qs: vec![0.0, 1.0, 2.0], epsilon: 0.5, r: Some(PI) }
    }
}

impl ConstantsReport {
    pub fn build(phi: &BasisFunction, symbol: Option<&Symbol>, opts: &ReportOptions) -> Result<Self> {
        let amp = limit_amplitudes(phi)?;
        let qs: Vec<f64> = opts.qs.iter().copied().filter(|&q| phi.decay.exponent() > phi.n as f64 + q).collect();
        let interp = interp_constants(phi, &qs)?;
        let heat = match heat_constants(phi) {
            Ok(h) => Some(h),
            Err(Error::TailNotSummable { .. }) => None,
            Err(e) => return Err(e),
        };
        let symbol = symbol.map(|a| symbol_constant(a, phi)).transpose()?;
        let r = opts.r.unwrap_or_else(|| natural_radius(phi));
        let thresholds = threshold_rho(phi, opts.epsilon, r)?;
        Ok(Self {
            basis: phi.spec(),
            kappa: phi.kappa,
            a_lower: amp.lower,
            a_upper: amp.upper,
            l_upper: interp.l_upper,
            l_lower: interp.l_lower,
            l_q: interp.l_q,
            g_upper: heat.map(|h| h.g_upper),
            g_lower: heat.map(|h| h.g_lower),
            symbol,
            thresholds,
            lattice: interp.lattice,
            tolerance: DEFAULT_TOL,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rows `name,value`.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("kappa".into(), self.kappa.to_string()),
            ("a_lower".into(), self.a_lower.to_string()),
            ("a_upper".into(), self.a_upper.to_string()),
            ("l_upper".into(), self.l_upper.to_string()),
            ("l_lower".into(), self.l_lower.to_string()),
        ];
        for q in &self.l_q {
            rows.push((format!("l_q[{}]", q.q), q.value.to_string()));
        }
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        rows.push(("g_upper".into(), opt(self.g_upper)));
        rows.push(("g_lower".into(), opt(self.g_lower)));
        if let Some(s) = &self.symbol {
            rows.push((format!("g_symbol_re[{}]", s.symbol), s.value.re.to_string()));
            rows.push((format!("g_symbol_im[{}]", s.symbol), s.value.im.to_string()));
            for (d, v) in &s.per_degree {
                rows.push((format!("g_degree_re[{d}]"), v.re.to_string()));
                rows.push((format!("g_degree_im[{d}]"), v.im.to_string()));
            }
        }
        let t = &self.thresholds;
        rows.push(("epsilon".into(), t.epsilon.to_string()));
        rows.push(("r".into(), t.r.to_string()));
        rows.push(("p_r".into(), t.p_r.to_string()));
        rows.push(("rho1".into(), t.rho1.to_string()));
        rows.push(("rho2".into(), opt(t.rho2)));
        rows.push(("rho".into(), t.rho.to_string()));
        rows.push(("truncation".into(), self.lattice.truncation.to_string()));
        rows.push(("tail_bound".into(), self.lattice.tail_bound.to_string()));
        rows.push(("tolerance".into(), self.tolerance.to_string()));
        let mut out = String::from("name,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

/// Reports for the family of `phi` over shape parameters `cs`.
pub fn shape_sweep(
    phi: &BasisFunction,
    cs: &[f64],
    symbol: Option<&Symbol>,
    opts: &ReportOptions,
) -> Result<Vec<ConstantsReport>> {
    use rayon::prelude::*;
    cs.par_iter()
        .map(|&c| ConstantsReport::build(&phi.with_shape(c)?, symbol, opts))
        .collect()
}

/// Exponent of a power law `value ~ C c^slope` fitted over a sweep.
pub fn shape_law(cs: &[f64], values: &[f64]) -> Option<f64> {
    loglog(cs, values).map(|f| f.slope)
}

/// `2 max (1 - L_1 hat(eta)) / |eta|^kappa` over `eta = 2^{-m} d`,
/// `m = 8..14`: the upper constant read off the cardinal symbol.
pub fn empirical_interp_limit(phi: &BasisFunction) -> Result<f64> {
    let symbol = CardinalSymbol::new(phi, DEFAULT_TOL)?;
    let mut best = 0.0f64;
    for d in directions(phi) {
        let d = unit(&d);
        for m in 8..=14 {
            let r = 2f64.powi(-m);
            let eta: Vec<f64> = d.iter().map(|v| v * r).collect();
            best = best.max(symbol.complement(&eta) / r.powf(phi.kappa));
        }
    }
    Ok(2.0 * best)
}

/// Max of `(G(eta) - |eta|^2) / |eta|^kappa` over the same ladder.
pub fn empirical_heat_limit(phi: &BasisFunction) -> Result<f64> {
    let mut best = 0.0f64;
    for d in directions(phi) {
        let d = unit(&d);
        for m in 8..=14 {
            let r = 2f64.powi(-m);
            let eta: Vec<f64> = d.iter().map(|v| v * r).collect();
            best = best.max(heat_defect(phi, &eta)? / r.powf(phi.kappa));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::make_symbol;

    fn zeta(s: f64) -> f64 {
        (1..200_000).map(|k| (k as f64).powf(-s)).sum::<f64>() + 200_000f64.powf(1.0 - s) / (s - 1.0)
    }

    #[test]
    fn amplitudes_of_catalogue() {
        let ph = limit_amplitudes(&BasisFunction::polyharmonic(1, 3.0).unwrap()).unwrap();
        assert!((ph.lower - 1.0).abs() < 1e-12 && (ph.upper - 1.0).abs() < 1e-12);
        for c in [0.5, 1.0, 2.0] {
            let g = limit_amplitudes(&BasisFunction::gaussian(1, c).unwrap()).unwrap();
            assert!((g.lower - c).abs() < 1e-6 * c);
        }
        for n in [1usize, 2, 3] {
            let phi = BasisFunction::multiquadric(n, 1.0).unwrap();
            let a = limit_amplitudes(&phi).unwrap();
            let nf = n as f64;
            let an = 2f64.powi(n as i32) * PI.powf((nf - 1.0) / 2.0) * statrs::function::gamma::gamma((nf + 1.0) / 2.0);
            assert!((a.lower / an - 1.0).abs() < 1e-5, "n={n}: {} {an}", a.lower);
            assert!((a.lower / phi.a_lower - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn gaussian_interp_constant() {
        let phi = BasisFunction::gaussian(1, 1.0).unwrap();
        let ic = interp_constants(&phi, &[]).unwrap();
        let r0: f64 = 2.0 * (1..20).map(|k| (-4.0 * PI * PI * (k * k) as f64).exp()).sum::<f64>();
        let expect = 2.0 * r0 / (1.0 + r0);
        assert!((ic.l_upper / expect - 1.0).abs() < 1e-8);
        assert!((ic.l_upper / (4.0 * (-4.0 * PI * PI).exp()) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_q_constant_matches() {
        for phi in [BasisFunction::polyharmonic(1, 3.0).unwrap(), BasisFunction::multiquadric(1, 1.0).unwrap()] {
            let ic = interp_constants(&phi, &[0.0]).unwrap();
            assert!((ic.l_q[0].value / ic.l_upper - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_spline_heat_constant() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let hc = heat_constants(&phi).unwrap();
        assert!((hc.g_upper - 1.0 / 12.0).abs() < 1e-10, "{}", hc.g_upper);
        assert_eq!(hc.g_upper, hc.g_lower);
        let ic = interp_constants(&phi, &[]).unwrap();
        let expect = 4.0 * zeta(4.0) / (2.0 * PI).powi(4);
        assert!((ic.l_upper / expect - 1.0).abs() < 1e-9);
        assert!(hc.g_upper >= 2.0 * PI * PI * ic.l_upper);
    }

    #[test]
    fn heat_symbol_constant_is_heat_constant() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
        let sc = symbol_constant(&heat, &phi).unwrap();
        let hc = heat_constants(&phi).unwrap();
        assert!((sc.value.re - hc.g_upper).abs() < 1e-14 * hc.g_upper);
        let tr = make_symbol(&SymbolSpec::Transport { velocity: vec![1.0] }, 1).unwrap();
        assert!(symbol_constant(&tr, &phi).unwrap().value.norm() < 1e-15);
    }

    #[test]
    fn fractional_symbol_constant() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let fr = make_symbol(&SymbolSpec::FractionalReg { s: 0.75, cutoff: Default::default() }, 1).unwrap();
        let sc = symbol_constant(&fr, &phi).unwrap();
        let expect = 2.0 * (2.0 * PI).powf(-2.5) * zeta(2.5);
        assert!((sc.value.re / expect - 1.0).abs() < 1e-8, "{} {expect}", sc.value.re);
    }

    #[test]
    fn formulas_match_limits() {
        for phi in [
            BasisFunction::polyharmonic(1, 3.0).unwrap(),
            BasisFunction::multiquadric(1, 1.0).unwrap(),
            BasisFunction::multiquadric(2, 1.0).unwrap(),
            BasisFunction::gaussian(1, 1.0).unwrap(),
        ] {
            let ic = interp_constants(&phi, &[]).unwrap();
            let emp = empirical_interp_limit(&phi).unwrap();
            assert!((emp / ic.l_upper - 1.0).abs() < 0.05, "{phi:?}: {emp} {}", ic.l_upper);
        }
        for phi in [BasisFunction::polyharmonic(1, 3.0).unwrap(), BasisFunction::multiquadric(1, 1.0).unwrap()] {
            let hc = heat_constants(&phi).unwrap();
            let emp = empirical_heat_limit(&phi).unwrap();
            assert!((emp / hc.g_upper - 1.0).abs() < 0.05, "{phi:?}: {emp} {}", hc.g_upper);
        }
    }

    #[test]
    fn thresholds_are_positive() {
        for phi in [
            BasisFunction::polyharmonic(1, 3.0).unwrap(),
            BasisFunction::multiquadric(1, 1.0).unwrap(),
            BasisFunction::multiquadric(2, 1.0).unwrap(),
            BasisFunction::gaussian(1, 1.0).unwrap(),
            BasisFunction::gaussian(2, 1.0).unwrap(),
        ] {
            let t = threshold_rho(&phi, 0.5, PI).unwrap();
            assert!(t.rho > 0.0 && t.rho1 > 0.0, "{phi:?}: {t:?}");
        }
        let t = threshold_rho(&BasisFunction::polyharmonic(1, 3.0).unwrap(), 0.5, PI).unwrap();
        assert!(t.rho2.is_none());
    }

    #[test]
    fn shape_laws() {
        let opts = ReportOptions { qs: vec![], epsilon: 0.5, r: None };
        let cs = [3.0, 3.25, 3.5, 3.75, 4.0];
        let ga = shape_sweep(&BasisFunction::gaussian(1, 1.0).unwrap(), &cs, None, &opts).unwrap();
        let rho: Vec<f64> = ga.iter().map(|r| r.thresholds.rho).collect();
        let slope = shape_law(&cs, &rho).unwrap();
        assert!((slope + 2.0).abs() < 0.3, "gaussian {slope} {rho:?}");
        let cs = [1.0, 2.0, 4.0, 8.0];
        let mq = shape_sweep(&BasisFunction::multiquadric(1, 1.0).unwrap(), &cs, None, &opts).unwrap();
        let rho: Vec<f64> = mq.iter().map(|r| r.thresholds.rho).collect();
        let slope = shape_law(&cs, &rho).unwrap();
        assert!((slope + 1.0).abs() < 0.3, "multiquadric {slope} {rho:?}");
        for w in mq.windows(2) {
            assert!(w[1].l_upper < w[0].l_upper);
        }
    }

    #[test]
    fn polyharmonic_constants_ignore_shape() {
        let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
        let a = interp_constants(&phi.with_shape(1.0).unwrap(), &[]).unwrap().l_upper;
        let b = interp_constants(&phi.with_shape(3.0).unwrap(), &[]).unwrap().l_upper;
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn report_round_trips() {
        let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
        let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
        let r = ConstantsReport::build(&phi, Some(&heat), &ReportOptions::default()).unwrap();
        assert!(r.l_lower <= r.l_upper && r.g_lower.unwrap() <= r.g_upper.unwrap());
        assert!(r.g_upper.unwrap() >= r.l_upper);
        let back: ConstantsReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back.l_upper, r.l_upper);
        assert!(r.to_csv().starts_with("name,value\n"));
    }
}
