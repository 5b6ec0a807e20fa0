//! Evolution symbols `a(xi)` with order metadata, Lévy–Khintchine symbols and
//! asymptotic homogeneity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::norm;
use crate::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::fit::loglog;
use crate::quadrature::{adaptive, integrate_line, QuadratureGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One term `coefficient * xi^powers` of a polynomial symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    /// `[re, im]`.
    pub coefficient: [f64; 2],
    pub powers: Vec<u32>,
}

impl Monomial {
    fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    fn eval(&self, xi: &[f64]) -> Complex64 {
        let mut v = Complex64::new(self.coefficient[0], self.coefficient[1]);
        for (x, &p) in xi.iter().zip(&self.powers) {
            v *= x.powi(p as i32);
        }
        v
    }
}

/// Law of the jumps of a compound Poisson process (one dimension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpDensity {
    Gaussian { mean: f64, sd: f64 },
    /// Density `exp(-|x - mean| / scale) / (2 scale)`.
    Laplace { mean: f64, scale: f64 },
    Uniform { low: f64, high: f64 },
}

impl JumpDensity {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpDensity::Gaussian { mean, sd } => sd > 0.0 && mean.is_finite() && sd.is_finite(),
            JumpDensity::Laplace { mean, scale } => scale > 0.0 && mean.is_finite() && scale.is_finite(),
            JumpDensity::Uniform { low, high } => high > low && low.is_finite() && high.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid jump density {self:?}")))
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            JumpDensity::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            JumpDensity::Laplace { mean, scale } => (-(x - mean).abs() / scale).exp() / (2.0 * scale),
            JumpDensity::Uniform { low, high } => {
                if (low..=high).contains(&x) {
                    1.0 / (high - low)
                } else {
                    0.0
                }
            }
        }
    }

    /// `E exp(i xi X)`.
    pub fn characteristic(&self, xi: f64) -> Complex64 {
        match *self {
            JumpDensity::Gaussian { mean, sd } => {
                (I * mean * xi).exp() * (-0.5 * sd * sd * xi * xi).exp()
            }
            JumpDensity::Laplace { mean, scale } => {
                (I * mean * xi).exp() / (1.0 + scale * scale * xi * xi)
            }
            JumpDensity::Uniform { low, high } => {
                let w = high - low;
                if (xi * w).abs() < 1e-6 {
                    let mid = 0.5 * (low + high);
                    (I * mid * xi).exp() * (1.0 - (xi * w).powi(2) / 24.0)
                } else {
                    ((I * high * xi).exp() - (I * low * xi).exp()) / (I * xi * w)
                }
            }
        }
    }

    /// Integral of `g` against the density.
    fn integrate(&self, g: &dyn Fn(f64) -> f64, grid: &QuadratureGrid) -> Result<f64> {
        let r = match *self {
            JumpDensity::Gaussian { mean, sd } => {
                integrate_line(&|u: f64| g(mean + u) * self.pdf(mean + u), sd, grid)
            }
            JumpDensity::Laplace { mean, scale } => {
                integrate_line(&|u: f64| g(mean + u) * self.pdf(mean + u), scale, grid)
            }
            JumpDensity::Uniform { low, high } => {
                let n = 64;
                let bp: Vec<f64> = (0..=n).map(|i| low + (high - low) * i as f64 / n as f64).collect();
                adaptive(&|x: f64| g(x) * self.pdf(x), &bp, grid.rel_tol, grid.abs_tol, grid.max_intervals)
            }
        };
        if !r.converged && r.error > 1e-8 * r.value.abs().max(1e-12) {
            return Err(Error::Domain(format!(
                "jump integral did not converge (value {}, error {})",
                r.value, r.error
            )));
        }
        Ok(r.value)
    }
}

/// Finite (compound Poisson) jump measure `intensity * density`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpMeasure {
    pub intensity: f64,
    pub density: JumpDensity,
}

/// Lévy triplet with a smooth compensator cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevySpec {
    pub n: usize,
    #[serde(default)]
    pub drift: Vec<f64>,
    /// Row-major `n x n`; empty means zero.
    #[serde(default)]
    pub diffusion: Vec<Vec<f64>>,
    #[serde(default)]
    pub jumps: Option<JumpMeasure>,
    #[serde(default)]
    pub cutoff: CutoffSpec,
}

/// Quantities of a Lévy spec fixed at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyData {
    /// `int x chi(x) dnu(x)`.
    pub compensator: f64,
    /// `int (|x|^2 ^ 1) dnu(x)`.
    pub measure_moment: f64,
}

/// Symbol specification; JSON form `{kind, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SymbolSpec {
    /// `|xi|^2`.
    Heat,
    /// `i (v, xi)`.
    Transport { velocity: Vec<f64> },
    /// `i |xi|^2`.
    Schrodinger,
    /// `i (1 - chi(xi)) |xi|`.
    HalfwaveReg {
        #[serde(default)]
        cutoff: CutoffSpec,
    },
    /// `(1 - chi(xi)) |xi|^{2s}`.
    FractionalReg {
        s: f64,
        #[serde(default)]
        cutoff: CutoffSpec,
    },
    Levy(LevySpec),
    Polynomial { terms: Vec<Monomial> },
}

/// A multiplier `a(xi)` of order `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub n: usize,
    pub spec: SymbolSpec,
    pub order: f64,
    pub re_nonneg: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levy: Option<LevyData>,
}

impl SymbolSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SymbolSpec::Heat => "heat",
            SymbolSpec::Transport { .. } => "transport",
            SymbolSpec::Schrodinger => "schrodinger",
            SymbolSpec::HalfwaveReg { .. } => "halfwave_reg",
            SymbolSpec::FractionalReg { .. } => "fractional_reg",
            SymbolSpec::Levy(_) => "levy",
            SymbolSpec::Polynomial { .. } => "polynomial",
        }
    }
}

/// Catalogue constructor; dispatches Lévy specs to [`levy_symbol`].
pub fn make_symbol(spec: &SymbolSpec, n: usize) -> Result<Symbol> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let plain = |order: f64| Symbol { n, spec: spec.clone(), order, re_nonneg: true, levy: None };
    match spec {
        SymbolSpec::Heat | SymbolSpec::Schrodinger => Ok(plain(2.0)),
        SymbolSpec::Transport { velocity } => {
            if velocity.len() != n || velocity.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "velocity must have {n} finite components"
                )));
            }
            Ok(plain(1.0))
        }
        SymbolSpec::HalfwaveReg { cutoff } => {
            cutoff.validate()?;
            Ok(plain(1.0))
        }
        SymbolSpec::FractionalReg { s, cutoff } => {
            if !(*s > 0.0 && *s < 1.0) {
                return Err(Error::InvalidParameter(format!("fractional order must lie in (0, 1), got {s}")));
            }
            cutoff.validate()?;
            Ok(plain(2.0 * s))
        }
        SymbolSpec::Levy(levy) => {
            if levy.n != n {
                return Err(Error::InvalidParameter("Lévy spec dimension differs".into()));
            }
            levy_symbol(levy)
        }
        SymbolSpec::Polynomial { terms } => polynomial_symbol(spec, terms, n),
    }
}

fn polynomial_symbol(spec: &SymbolSpec, terms: &[Monomial], n: usize) -> Result<Symbol> {
    if terms.is_empty() || terms.iter().any(|t| t.powers.len() != n) {
        return Err(Error::InvalidParameter(format!(
            "polynomial terms must be non-empty with {n} exponents each"
        )));
    }
    let order = terms.iter().map(|t| t.degree()).max().unwrap_or(0) as f64;
    let mut sym = Symbol { n, spec: spec.clone(), order, re_nonneg: true, levy: None };
    sym.re_nonneg = sym.min_real_part(&sample_points(n, 1e-3, 1e4)) >= -1e-12;
    Ok(sym)
}

/// Lévy–Khintchine symbol `a = -psi`.
pub fn levy_symbol(spec: &LevySpec) -> Result<Symbol> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !spec.drift.is_empty() && spec.drift.len() != n {
        return Err(Error::InvalidParameter(format!("drift must have {n} components")));
    }
    if !spec.diffusion.is_empty() {
        check_psd(&spec.diffusion, n)?;
    }
    spec.cutoff.validate()?;
    let grid = QuadratureGrid::default();
    let levy = match &spec.jumps {
        None => LevyData { compensator: 0.0, measure_moment: 0.0 },
        Some(j) => {
            if n != 1 {
                return Err(Error::Unsupported("jump measures are implemented in one dimension".into()));
            }
            if !(j.intensity >= 0.0 && j.intensity.is_finite()) {
                return Err(Error::InvalidParameter(format!("intensity must be nonnegative, got {}", j.intensity)));
            }
            j.density.validate()?;
            let chi = spec.cutoff;
            let compensator = j.intensity * j.density.integrate(&|x| x * chi.eval(x), &grid)?;
            let measure_moment = j.intensity * j.density.integrate(&|x| (x * x).min(1.0), &grid)?;
            if !measure_moment.is_finite() {
                return Err(Error::Domain("jump measure is not a Lévy measure".into()));
            }
            LevyData { compensator, measure_moment }
        }
    };
    let has_diffusion = spec.diffusion.iter().flatten().any(|v| *v != 0.0);
    let mut sym = Symbol {
        n,
        spec: SymbolSpec::Levy(spec.clone()),
        order: 2.0,
        re_nonneg: true,
        levy: Some(levy),
    };
    if !has_diffusion {
        let declared = if sym.effective_drift().iter().any(|v| v.abs() > 1e-14) { 1.0 } else { 0.0 };
        sym.order = match verify_symbol_order(&sym, &default_radii()) {
            Ok(fit) if (fit.order - declared).abs() <= 0.1 => declared,
            Ok(fit) => fit.order,
            Err(_) => declared,
        };
    }
    Ok(sym)
}

fn check_psd(m: &[Vec<f64>], n: usize) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter(format!("diffusion must be {n} x {n}")));
    }
    for i in 0..n {
        for j in 0..n {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * (1.0 + m[i][j].abs()) {
                return Err(Error::InvalidParameter("diffusion must be symmetric".into()));
            }
        }
    }
    // Cholesky with a small pivot allowance for semidefinite input.
    let mut l = vec![vec![0.0; n]; n];
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    for j in 0..n {
        let d = m[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if d < -1e-12 * scale {
            return Err(Error::InvalidParameter("diffusion must be positive semidefinite".into()));
        }
        let d = d.max(0.0).sqrt();
        l[j][j] = d;
        for i in j + 1..n {
            let s = m[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = if d > 1e-14 * scale.sqrt() {
                s / d
            } else if s.abs() > 1e-10 * scale {
                return Err(Error::InvalidParameter("diffusion must be positive semidefinite".into()));
            } else {
                0.0
            };
        }
    }
    Ok(())
}

impl Symbol {
    /// `a(xi)`.
    pub fn value(&self, xi: &[f64]) -> Complex64 {
        match &self.spec {
            SymbolSpec::Heat => Complex64::new(dot(xi, xi), 0.0),
            SymbolSpec::Transport { velocity } => I * dot(velocity, xi),
            SymbolSpec::Schrodinger => I * dot(xi, xi),
            SymbolSpec::HalfwaveReg { cutoff } => {
                let r = norm(xi);
                I * ((1.0 - cutoff.eval(r)) * r)
            }
            SymbolSpec::FractionalReg { s, cutoff } => {
                let r = norm(xi);
                let outer = 1.0 - cutoff.eval(r);
                if outer == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(outer * r.powf(2.0 * s), 0.0)
                }
            }
            SymbolSpec::Levy(spec) => {
                let mut v = Complex64::new(0.0, 0.0);
                if !spec.diffusion.is_empty() {
                    v += 0.5 * quadratic(&spec.diffusion, xi);
                }
                let drift = self.effective_drift();
                v -= I * dot(&drift, xi);
                if let Some(j) = &spec.jumps {
                    v += j.intensity * (1.0 - j.density.characteristic(xi[0]));
                }
                v
            }
            SymbolSpec::Polynomial { terms } => terms.iter().map(|t| t.eval(xi)).sum(),
        }
    }

    /// Drift after absorbing the compensator: `mu - int x chi dnu`.
    pub fn effective_drift(&self) -> Vec<f64> {
        match &self.spec {
            SymbolSpec::Levy(spec) => {
                let mut d = if spec.drift.is_empty() { vec![0.0; self.n] } else { spec.drift.clone() };
                if let Some(l) = &self.levy {
                    d[0] -= l.compensator;
                }
                d
            }
            _ => vec![0.0; self.n],
        }
    }

    /// Closed-form `lim a(lambda xi) / lambda^q` where known.
    pub fn a_inf(&self, xi: &[f64]) -> Option<Complex64> {
        match &self.spec {
            SymbolSpec::Heat | SymbolSpec::Transport { .. } | SymbolSpec::Schrodinger => Some(self.value(xi)),
            SymbolSpec::HalfwaveReg { .. } => Some(I * norm(xi)),
            SymbolSpec::FractionalReg { s, .. } => Some(Complex64::new(norm(xi).powf(2.0 * s), 0.0)),
            SymbolSpec::Levy(spec) => {
                if self.order == 2.0 {
                    Some(Complex64::new(0.5 * quadratic(&spec.diffusion, xi), 0.0))
                } else if self.order == 1.0 {
                    Some(-I * dot(&self.effective_drift(), xi))
                } else if self.order == 0.0 {
                    Some(Complex64::new(spec.jumps.as_ref().map_or(0.0, |j| j.intensity), 0.0))
                } else {
                    None
                }
            }
            SymbolSpec::Polynomial { terms } => {
                let top = self.order as u32;
                Some(terms.iter().filter(|t| t.degree() == top).map(|t| t.eval(xi)).sum())
            }
        }
    }

    /// Homogeneous parts `(degree, p_degree(xi))` of a polynomial symbol,
    /// highest degree first.
    pub fn homogeneous_parts(&self, xi: &[f64]) -> Option<Vec<(u32, Complex64)>> {
        let SymbolSpec::Polynomial { terms } = &self.spec else { return None };
        let top = self.order as u32;
        Some(
            (0..=top)
                .rev()
                .map(|d| (d, terms.iter().filter(|t| t.degree() == d).map(|t| t.eval(xi)).sum()))
                .collect(),
        )
    }

    /// Exactly homogeneous of degree `order`.
    pub fn is_homogeneous(&self) -> bool {
        match &self.spec {
            SymbolSpec::Heat | SymbolSpec::Transport { .. } | SymbolSpec::Schrodinger => true,
            SymbolSpec::Polynomial { terms } => {
                let top = self.order as u32;
                terms.iter().all(|t| t.degree() == top)
            }
            _ => false,
        }
    }

    pub fn min_real_part(&self, samples: &[Vec<f64>]) -> f64 {
        samples.iter().map(|x| self.value(x).re).fold(f64::INFINITY, f64::min)
    }
}

/// `psi(xi)` with the jump integral by adaptive quadrature; an oracle for the
/// closed forms used by [`Symbol::value`].
pub fn levy_exponent_by_quadrature(spec: &LevySpec, xi: &[f64], grid: &QuadratureGrid) -> Result<Complex64> {
    let drift = if spec.drift.is_empty() { vec![0.0; spec.n] } else { spec.drift.clone() };
    let mut psi = I * dot(&drift, xi);
    if !spec.diffusion.is_empty() {
        psi -= 0.5 * quadratic(&spec.diffusion, xi);
    }
    if let Some(j) = &spec.jumps {
        let x0 = xi[0];
        let chi = spec.cutoff;
        let re = j.density.integrate(&|x| (x * x0).cos() - 1.0, grid)?;
        let im = j.density.integrate(&|x| (x * x0).sin() - x * x0 * chi.eval(x), grid)?;
        psi += j.intensity * Complex64::new(re, im);
    }
    Ok(psi)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quadratic(m: &[Vec<f64>], xi: &[f64]) -> f64 {
    m.iter().zip(xi).map(|(row, x)| x * dot(row, xi)).sum()
}

/// Log-spaced radii `10^2 .. 10^6`.
pub fn default_radii() -> Vec<f64> {
    (0..=40).map(|i| 10f64.powf(2.0 + i as f64 / 10.0)).collect()
}

/// Directions used for radial sampling: the axes and the main diagonal.
pub fn sample_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    if n > 1 {
        dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    }
    dirs
}

/// Points on rays through the origin with radii log-spaced in `[lo, hi]`,
/// both signs.
pub fn sample_points(n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let m = 97;
    let mut out = Vec::new();
    for d in sample_directions(n) {
        for i in 0..m {
            let r = lo * (hi / lo).powf(i as f64 / (m - 1) as f64);
            for sign in [1.0, -1.0] {
                out.push(d.iter().map(|v| sign * r * v).collect());
            }
        }
    }
    out
}

/// Fitted growth of a symbol at large `|xi|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    /// Fitted exponent `q hat`.
    pub order: f64,
    /// `sup |a| / (1 + |xi|)^{q hat}` over the samples.
    pub constant: f64,
    pub residual: f64,
    /// `sup |grad a| / (1 + |xi|)^{q hat}` by central differences.
    pub derivative_constant: f64,
    /// Whether the derivative ratio stays bounded over the sample range.
    pub derivative_bounded: bool,
}

/// Fit `log |a|` against `log(1 + |xi|)` using the largest modulus over
/// [`sample_directions`] at each radius.
pub fn verify_symbol_order(a: &Symbol, radii: &[f64]) -> Result<OrderFit> {
    if radii.len() < 3 {
        return Err(Error::InvalidParameter("at least three radii are needed".into()));
    }
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 1e4 {
        return Err(Error::InvalidParameter("sample radii must span at least four decades".into()));
    }
    let dirs = sample_directions(a.n);
    let mut xs = Vec::new();
    let mut mags = Vec::new();
    let mut grads = Vec::new();
    for &r in radii {
        let mut m: f64 = 0.0;
        let mut g: f64 = 0.0;
        for d in &dirs {
            let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
            m = m.max(a.value(&xi).norm());
            g = g.max(gradient_norm(a, &xi));
        }
        xs.push(1.0 + r);
        mags.push(m);
        grads.push(g);
    }
    let fit = loglog(&xs, &mags)
        .filter(|f| f.slope.is_finite() && f.residual < 0.1)
        .ok_or_else(|| Error::Domain("unbounded order: no power law fits the symbol samples".into()))?;
    let q = fit.slope;
    let ratio = |v: &[f64]| -> Vec<f64> { v.iter().zip(&xs).map(|(m, x)| m / x.powf(q)).collect() };
    let mag_ratio = ratio(&mags);
    let grad_ratio = ratio(&grads);
    let constant = mag_ratio.iter().cloned().fold(0.0, f64::max);
    let derivative_constant = grad_ratio.iter().cloned().fold(0.0, f64::max);
    let half = grad_ratio.len() / 2;
    let early = grad_ratio[..half].iter().cloned().fold(0.0, f64::max);
    let late = grad_ratio[half..].iter().cloned().fold(0.0, f64::max);
    Ok(OrderFit {
        order: q,
        constant,
        residual: fit.residual,
        derivative_constant,
        derivative_bounded: derivative_constant.is_finite() && late <= 2.0 * early.max(1e-300) + 1e-12,
    })
}

fn gradient_norm(a: &Symbol, xi: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut p = xi.to_vec();
    for i in 0..xi.len() {
        let step = 1e-5 * (1.0 + xi[i].abs());
        p[i] = xi[i] + step;
        let up = a.value(&p);
        p[i] = xi[i] - step;
        let down = a.value(&p);
        p[i] = xi[i];
        total += ((up - down) / (2.0 * step)).norm_sqr();
    }
    total.sqrt()
}

/// `lim a(lambda xi) / lambda^q` along `lambda = 2^m`, `m = 6..16`, with one
/// Richardson step when the plain sequence has not settled.
pub fn asymptotic_limit(a: &Symbol, xi: &[f64], q: f64, tol: f64) -> Option<Complex64> {
    if norm(xi) == 0.0 {
        return None;
    }
    let values: Vec<Complex64> = (6..=16)
        .map(|m| {
            let lam = 2f64.powi(m);
            let p: Vec<f64> = xi.iter().map(|v| v * lam).collect();
            a.value(&p) / lam.powf(q)
        })
        .collect();
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let k = values.len();
    if (values[k - 1] - values[k - 2]).norm() <= tol * scale {
        return Some(values[k - 1]);
    }
    let rich: Vec<Complex64> = values.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r = rich.len();
    if (rich[r - 1] - rich[r - 2]).norm() <= tol * scale {
        return Some(rich[r - 1]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat() -> Symbol {
        make_symbol(&SymbolSpec::Heat, 1).unwrap()
    }

    fn poisson(sd: f64, intensity: f64) -> LevySpec {
        LevySpec {
            n: 1,
            drift: vec![],
            diffusion: vec![],
            jumps: Some(JumpMeasure { intensity, density: JumpDensity::Gaussian { mean: 0.0, sd } }),
            cutoff: CutoffSpec::default(),
        }
    }

    #[test]
    fn catalogue_values() {
        assert_eq!(heat().value(&[2.0]), Complex64::new(4.0, 0.0));
        let tr = make_symbol(&SymbolSpec::Transport { velocity: vec![1.0] }, 1).unwrap();
        for x in sample_points(1, 1e-3, 1e3) {
            assert_eq!(tr.value(&x).re, 0.0);
        }
        let fr = make_symbol(&SymbolSpec::FractionalReg { s: 0.5, cutoff: CutoffSpec::default() }, 1).unwrap();
        assert_eq!(fr.order, 1.0);
        for x in [2.0, 3.5, -7.0, 100.0] {
            assert!((fr.value(&[x]).re - f64::abs(x)).abs() < 1e-14);
        }
        assert_eq!(fr.value(&[0.5]).re, 0.0);
        let sch = make_symbol(&SymbolSpec::Schrodinger, 2).unwrap();
        assert_eq!(sch.value(&[1.0, 2.0]), Complex64::new(0.0, 5.0));
    }

    #[test]
    fn rejects_bad_fraction() {
        for s in [0.0, 1.0, -0.2, 1.5] {
            assert!(make_symbol(&SymbolSpec::FractionalReg { s, cutoff: CutoffSpec::default() }, 1).is_err());
        }
    }

    #[test]
    fn pure_diffusion() {
        let spec = LevySpec { n: 1, drift: vec![0.0], diffusion: vec![vec![2.0]], jumps: None, cutoff: CutoffSpec::default() };
        let a = levy_symbol(&spec).unwrap();
        assert_eq!(a.order, 2.0);
        for x in [-3.0, 0.5, 10.0] {
            assert!((a.value(&[x]) - Complex64::new(x * x, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn compound_poisson_against_quadrature() {
        let spec = poisson(0.7, 2.5);
        let a = levy_symbol(&spec).unwrap();
        assert_eq!(a.order, 0.0);
        assert!(a.levy.as_ref().unwrap().compensator.abs() < 1e-14);
        let grid = QuadratureGrid::default();
        for x in [0.1f64, 0.9, 2.0, 5.0, -3.3] {
            let closed = 2.5 * (1.0 - (-0.5 * 0.49 * x * x).exp());
            assert!((a.value(&[x]).re - closed).abs() < 1e-14);
            let quad = -levy_exponent_by_quadrature(&spec, &[x], &grid).unwrap();
            assert!((quad - a.value(&[x])).norm() < 1e-9, "x={x}: {quad} vs {}", a.value(&[x]));
        }
    }

    #[test]
    fn skewed_jumps_against_quadrature() {
        let grid = QuadratureGrid::default();
        for density in [
            JumpDensity::Laplace { mean: 0.3, scale: 0.5 },
            JumpDensity::Uniform { low: -0.5, high: 1.5 },
            JumpDensity::Gaussian { mean: -0.4, sd: 0.3 },
        ] {
            let spec = LevySpec {
                n: 1,
                drift: vec![0.2],
                diffusion: vec![],
                jumps: Some(JumpMeasure { intensity: 1.3, density }),
                cutoff: CutoffSpec::default(),
            };
            let a = levy_symbol(&spec).unwrap();
            for x in [0.2, 1.0, 3.0, -2.0] {
                let quad = -levy_exponent_by_quadrature(&spec, &[x], &grid).unwrap();
                assert!((quad - a.value(&[x])).norm() < 1e-9, "{spec:?} x={x}");
                let neg = a.value(&[-x]);
                assert!((neg - a.value(&[x]).conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn measure_moment() {
        let a = levy_symbol(&poisson(0.5, 2.0)).unwrap();
        // E min(X^2, 1) for X ~ N(0, 1/4) is close to 1/4.
        let m = a.levy.unwrap().measure_moment;
        assert!(m > 0.45 && m < 0.5);
    }

    #[test]
    fn fitted_orders() {
        let fit = verify_symbol_order(&heat(), &default_radii()).unwrap();
        assert!((fit.order - 2.0).abs() < 0.01);
        let cp = levy_symbol(&poisson(1.0, 3.0)).unwrap();
        let fit = verify_symbol_order(&cp, &default_radii()).unwrap();
        assert!(fit.order.abs() < 0.01);
        assert!(fit.constant <= 2.0 * 3.0);
        let fr = make_symbol(&SymbolSpec::FractionalReg { s: 0.7, cutoff: CutoffSpec::default() }, 1).unwrap();
        let fit = verify_symbol_order(&fr, &default_radii()).unwrap();
        assert!((fit.order - 1.4).abs() < 0.01);
        assert!(fit.derivative_bounded);
    }

    #[test]
    fn short_radius_span_rejected() {
        assert!(verify_symbol_order(&heat(), &[1.0, 10.0, 100.0]).is_err());
    }

    #[test]
    fn limits() {
        let l = asymptotic_limit(&heat(), &[1.5], 2.0, 1e-10).unwrap();
        assert!((l.re - 2.25).abs() < 1e-12);
        let fr = make_symbol(&SymbolSpec::FractionalReg { s: 0.3, cutoff: CutoffSpec::default() }, 1).unwrap();
        let l = asymptotic_limit(&fr, &[0.1], 0.6, 1e-10).unwrap();
        assert!((l.re - 0.1f64.powf(0.6)).abs() < 1e-12);
        let cp = levy_symbol(&poisson(0.3, 1.7)).unwrap();
        let l = asymptotic_limit(&cp, &[0.05], 0.0, 1e-10).unwrap();
        assert!((l.re - 1.7).abs() < 1e-12);
        assert!((cp.a_inf(&[0.05]).unwrap() - l).norm() < 1e-12);
    }

    #[test]
    fn json_forms() {
        let s: SymbolSpec = serde_json::from_str(r#"{"kind":"heat"}"#).unwrap();
        assert_eq!(s, SymbolSpec::Heat);
        let s: SymbolSpec =
            serde_json::from_str(r#"{"kind":"fractional_reg","params":{"s":0.75}}"#).unwrap();
        assert_eq!(s, SymbolSpec::FractionalReg { s: 0.75, cutoff: CutoffSpec::default() });
        let levy = SymbolSpec::Levy(poisson(0.5, 1.0));
        let text = serde_json::to_string(&levy).unwrap();
        assert_eq!(serde_json::from_str::<SymbolSpec>(&text).unwrap(), levy);
    }

    #[test]
    fn polynomial_parts() {
        let spec = SymbolSpec::Polynomial {
            terms: vec![
                Monomial { coefficient: [1.0, 0.0], powers: vec![2] },
                Monomial { coefficient: [0.0, 3.0], powers: vec![1] },
            ],
        };
        let p = make_symbol(&spec, 1).unwrap();
        assert_eq!(p.order, 2.0);
        assert!(p.re_nonneg);
        assert!(!p.is_homogeneous());
        let parts = p.homogeneous_parts(&[2.0]).unwrap();
        assert_eq!(parts[0], (2, Complex64::new(4.0, 0.0)));
        assert_eq!(parts[1], (1, Complex64::new(0.0, 6.0)));
        let bad = SymbolSpec::Polynomial { terms: vec![Monomial { coefficient: [-1.0, 0.0], powers: vec![2] }] };
        assert!(!make_symbol(&bad, 1).unwrap().re_nonneg);
    }

    #[test]
    fn rejects_indefinite_diffusion() {
        let spec = LevySpec {
            n: 2,
            drift: vec![],
            diffusion: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            jumps: None,
            cutoff: CutoffSpec::default(),
        };
        assert!(levy_symbol(&spec).is_err());
    }
}
