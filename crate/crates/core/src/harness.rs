//! Convergence and saturation studies: configuration, rate estimation,
//! predictions from the constants, and result files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::{make_basis, BasisFunction, BasisSpec};
use crate::constants::{heat_constants, interp_constants, symbol_constant, ConstantsReport, ReportOptions};
use crate::error::{Error, Result};
use crate::evolve::{cross_validate, CrossOptions};
use crate::fit::loglog;
use crate::multiplier::{critical_envelope, evolution_error_norm, symbol_envelope};
use crate::quadrature::QuadratureGrid;
use crate::spectral::{interp_error_norm, weighted_l1_norm, SpectralDensity, Weight};
use crate::symbols::{make_symbol, Symbol, SymbolSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    InterpConvergence,
    InterpSaturation,
    SchemeConvergence,
    SchemeSaturation,
    ConstantsTable,
    CrossValidation,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::InterpConvergence => "interp_convergence",
            StudyKind::InterpSaturation => "interp_saturation",
            StudyKind::SchemeConvergence => "scheme_convergence",
            StudyKind::SchemeSaturation => "scheme_saturation",
            StudyKind::ConstantsTable => "constants_table",
            StudyKind::CrossValidation => "cross_validation",
        }
    }

    fn needs_symbol(&self) -> bool {
        matches!(self, StudyKind::SchemeConvergence | StudyKind::SchemeSaturation | StudyKind::CrossValidation)
    }
}

/// `h = 2^{-start}, 2^{-start-1}, ...`, `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub start: i32,
    pub count: usize,
}

impl Ladder {
    pub fn for_dimension(n: usize) -> Self {
        if n == 1 {
            Ladder { start: 2, count: 8 }
        } else {
            Ladder { start: 1, count: 6 }
        }
    }

    pub fn steps(&self) -> Vec<f64> {
        (0..self.count).map(|i| 2f64.powi(-(self.start + i as i32))).collect()
    }
}

/// One study; JSON form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: StudyKind,
    pub basis: BasisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    pub datum: SpectralDensity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Ladder>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub quadrature: QuadratureGrid,
    /// Allowed gap between fitted and predicted rates.
    #[serde(default = "default_rate_tolerance")]
    pub rate_tolerance: f64,
    /// Shape parameters swept by a constants table.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shapes: Vec<f64>,
    /// Lattice truncation for cross validation.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_times() -> Vec<f64> {
    vec![1.0]
}

fn default_rate_tolerance() -> f64 {
    0.25
}

fn default_truncation() -> usize {
    64
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn ladder(&self) -> Ladder {
        self.ladder.unwrap_or_else(|| Ladder::for_dimension(self.basis.n))
    }

    /// Canonical JSON used for the content hash.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Resolves the specs and checks the invariants.
    pub fn validate(&self) -> Result<Resolved> {
        let ladder = self.ladder();
        if self.kind != StudyKind::ConstantsTable && ladder.count < 4 {
            return Err(Error::InvalidParameter(format!("ladder needs at least 4 points, got {}", ladder.count)));
        }
        if !(self.rate_tolerance > 0.0) {
            return Err(Error::InvalidParameter("rate tolerance must be positive".into()));
        }
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter("times must be nonnegative and nonempty".into()));
        }
        if self.shapes.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::InvalidParameter("shape parameters must be positive".into()));
        }
        let phi = make_basis(&self.basis)?;
        let datum = SpectralDensity::new(self.datum.n, self.datum.spec.clone())?;
        if datum.n != phi.n {
            return Err(Error::InvalidParameter(format!(
                "datum dimension {} differs from basis dimension {}",
                datum.n, phi.n
            )));
        }
        let symbol = match (&self.symbol, self.kind.needs_symbol()) {
            (Some(s), _) => Some(make_symbol(s, phi.n)?),
            (None, true) => {
                return Err(Error::InvalidParameter(format!("{} needs a symbol", self.kind.name())));
            }
            (None, false) => None,
        };
        Ok(Resolved { phi, datum, symbol })
    }
}

pub struct Resolved {
    pub phi: BasisFunction,
    pub datum: SpectralDensity,
    pub symbol: Option<Symbol>,
}

/// Least-squares fit of `log e` against `log h`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub slope_stderr: f64,
    /// `log2(e(h) / e(h / 2))` for consecutive ladder points.
    pub orders: Vec<f64>,
    /// Residual above 0.1: the data are not a single power law.
    pub high_residual: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RateOutcome {
    /// Some error vanished; no rate to fit.
    Exact,
    Fit(RateEstimate),
}

impl RateOutcome {
    pub fn slope(&self) -> Option<f64> {
        match self {
            RateOutcome::Fit(f) => Some(f.slope),
            RateOutcome::Exact => None,
        }
    }
}

pub fn pairwise_orders(hs: &[f64], errors: &[f64]) -> Vec<f64> {
    hs.windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

pub fn estimate_rate(hs: &[f64], errors: &[f64]) -> Result<RateOutcome> {
    if hs.len() != errors.len() || hs.len() < 3 {
        return Err(Error::InvalidParameter("rate fits need at least 3 pairs".into()));
    }
    if hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("h must be strictly decreasing".into()));
    }
    if errors.iter().any(|e| *e < 0.0 || !e.is_finite()) {
        return Err(Error::InvalidParameter("errors must be finite and nonnegative".into()));
    }
    if errors.iter().any(|e| *e == 0.0) {
        return Ok(RateOutcome::Exact);
    }
    let fit = loglog(hs, errors).ok_or_else(|| Error::Domain("degenerate rate fit".into()))?;
    Ok(RateOutcome::Fit(RateEstimate {
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        slope_stderr: fit.slope_stderr,
        orders: pairwise_orders(hs, errors),
        high_residual: fit.residual > 0.1,
    }))
}

/// Mean of the last three errors once the last two pairwise orders are
/// below 0.2 in size.
pub fn plateau(hs: &[f64], errors: &[f64]) -> Option<f64> {
    let k = errors.len();
    if k < 3 {
        return None;
    }
    let orders = pairwise_orders(&hs[k - 3..], &errors[k - 3..]);
    orders
        .iter()
        .all(|o| o.abs() < 0.2)
        .then(|| errors[k - 3..].iter().sum::<f64>() / 3.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyPoint {
    pub h: f64,
    pub error: f64,
    pub quadrature_error: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Errors along the ladder at one time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Series {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub points: Vec<StudyPoint>,
    pub rate: Option<RateOutcome>,
    pub predicted_rate: Option<f64>,
    /// The prediction only bounds the rate from below.
    pub predicted_is_lower_bound: bool,
    /// `h^{-rate} error` in the limit.
    pub predicted_constant: Option<f64>,
    pub plateau: Option<f64>,
    /// Predicted plateau range for saturation studies.
    pub plateau_bracket: Option<(f64, f64)>,
    pub rate_pass: Option<bool>,
    pub plateau_pass: Option<bool>,
}

impl Series {
    pub fn steps(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.h).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }

    pub fn orders(&self) -> Vec<f64> {
        pairwise_orders(&self.steps(), &self.errors())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub series: Vec<Series>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<ConstantsReport>,
}

/// Wall-clock data, kept out of the result document so reruns are
/// byte-identical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunInfo {
    pub seconds: f64,
    pub threads: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Worker threads; 0 uses the default pool.
    pub jobs: usize,
    /// Overrides the configured rate tolerance.
    pub tolerance: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { jobs: 0, tolerance: None }
    }
}

pub fn run_study(config: &ExperimentConfig, opts: &RunOptions) -> Result<(StudyResult, RunInfo)> {
    let start = Instant::now();
    let mut config = config.clone();
    if let Some(t) = opts.tolerance {
        config.rate_tolerance = t;
    }
    let resolved = config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    let result = pool.install(|| execute(&config, &resolved))?;
    Ok((result, RunInfo { seconds: start.elapsed().as_secs_f64(), threads }))
}

fn execute(config: &ExperimentConfig, r: &Resolved) -> Result<StudyResult> {
    use rayon::prelude::*;
    let hs = config.ladder().steps();
    let grid = &config.quadrature;
    let mut series = Vec::new();
    let mut constants = Vec::new();
    let point = |h: f64, out: Result<crate::quadrature::QuadResult>| match out {
        Ok(q) => StudyPoint { h, error: q.value, quadrature_error: q.error, converged: q.converged, failure: None },
        Err(e) => StudyPoint { h, error: f64::NAN, quadrature_error: f64::NAN, converged: false, failure: Some(e.to_string()) },
    };
    match config.kind {
        StudyKind::InterpConvergence | StudyKind::InterpSaturation => {
            let points: Vec<StudyPoint> =
                hs.par_iter().map(|&h| point(h, interp_error_norm(&r.datum, &r.phi, h, grid))).collect();
            let mut s = blank_series(None, points);
            predict_interp(&mut s, config, r)?;
            judge(&mut s, config);
            series.push(s);
        }
        StudyKind::SchemeConvergence | StudyKind::SchemeSaturation => {
            let a = r.symbol.as_ref().expect("validated");
            for &t in &config.times {
                let points: Vec<StudyPoint> = hs
                    .par_iter()
                    .map(|&h| point(h, evolution_error_norm(&r.datum, &r.phi, a, h, t, grid)))
                    .collect();
                let mut s = blank_series(Some(t), points);
                predict_scheme(&mut s, config, r, a, t)?;
                judge(&mut s, config);
                series.push(s);
            }
        }
        StudyKind::CrossValidation => {
            let a = r.symbol.as_ref().expect("validated");
            let opts = CrossOptions::default();
            for &t in &config.times {
                let points: Vec<StudyPoint> = hs
                    .iter()
                    .map(|&h| match cross_validate(&r.datum, &r.phi, a, h, config.truncation, t, &opts) {
                        Ok(cv) => StudyPoint {
                            h,
                            error: cv.discrepancy,
                            quadrature_error: cv.doubled_discrepancy,
                            converged: cv.passes,
                            failure: None,
                        },
                        Err(e) => point(h, Err(e)),
                    })
                    .collect();
                series.push(blank_series(Some(t), points));
            }
        }
        StudyKind::ConstantsTable => {
            let shapes = if config.shapes.is_empty() { vec![r.phi.c] } else { config.shapes.clone() };
            let opts = ReportOptions::default();
            constants = shapes
                .par_iter()
                .map(|&c| ConstantsReport::build(&r.phi.with_shape(c)?, r.symbol.as_ref(), &opts))
                .collect::<Result<Vec<_>>>()?;
        }
    }
    Ok(StudyResult { kind: config.kind, config_hash: config.hash(), config: config.clone(), series, constants })
}

fn blank_series(t: Option<f64>, points: Vec<StudyPoint>) -> Series {
    Series {
        t,
        points,
        rate: None,
        predicted_rate: None,
        predicted_is_lower_bound: false,
        predicted_constant: None,
        plateau: None,
        plateau_bracket: None,
        rate_pass: None,
        plateau_pass: None,
    }
}

/// Largest `s` with `int |xi|^s |f_hat| < inf`, capped at `cap`.
fn datum_smoothness(f: &SpectralDensity, cap: f64) -> f64 {
    (f.decay_rate() - f.n as f64).min(cap)
}

fn predict_interp(s: &mut Series, config: &ExperimentConfig, r: &Resolved) -> Result<()> {
    let kappa = r.phi.kappa;
    let grid = &config.quadrature;
    let ic = interp_constants(&r.phi, &[])?;
    let smooth = datum_smoothness(&r.datum, kappa);
    if config.kind == StudyKind::InterpSaturation && kappa == 0.0 {
        let norm = weighted_l1_norm(&r.datum, Weight::Wiener, grid)?.value;
        s.predicted_rate = Some(0.0);
        s.plateau_bracket = Some((ic.l_lower * norm, ic.l_upper * norm));
        return Ok(());
    }
    s.predicted_rate = Some(smooth);
    if smooth >= kappa {
        let norm = weighted_l1_norm(&r.datum, Weight::Hom { s: kappa }, grid)?.value;
        s.predicted_constant = Some(ic.l_upper * norm);
        if config.kind == StudyKind::InterpSaturation {
            s.plateau_bracket = Some((ic.l_lower * norm, ic.l_upper * norm));
        }
    }
    Ok(())
}

fn predict_scheme(s: &mut Series, config: &ExperimentConfig, r: &Resolved, a: &Symbol, t: f64) -> Result<()> {
    let kappa = r.phi.kappa;
    let q = a.order;
    let grid = &config.quadrature;
    let (g_lower, g_upper): (Complex64, Complex64) = match a.spec {
        SymbolSpec::Heat => {
            let hc = heat_constants(&r.phi)?;
            (hc.g_lower.into(), hc.g_upper.into())
        }
        _ => match symbol_constant(a, &r.phi) {
            Ok(sc) => (sc.value, sc.value),
            Err(Error::Refused(_)) => return Ok(()),
            Err(e) => return Err(e),
        },
    };
    let smooth = datum_smoothness(&r.datum, kappa);
    if (kappa - q).abs() < 1e-12 {
        let lo = critical_envelope(&r.datum, a, g_lower, t, kappa, grid)?.value;
        let hi = critical_envelope(&r.datum, a, g_upper, t, kappa, grid)?.value;
        s.predicted_rate = Some(0.0);
        s.plateau_bracket = Some((lo.min(hi), lo.max(hi)));
        return Ok(());
    }
    let rate = (smooth - q).max(0.0);
    s.predicted_rate = Some(rate);
    if g_upper.norm() < 1e-14 {
        s.predicted_is_lower_bound = true;
    } else if smooth >= kappa {
        let env = symbol_envelope(&r.datum, a, t, kappa, grid)?.value;
        s.predicted_constant = Some(g_upper.norm() * env);
    }
    Ok(())
}

fn judge(s: &mut Series, config: &ExperimentConfig) {
    let ok: Vec<&StudyPoint> = s.points.iter().filter(|p| p.failure.is_none() && p.error.is_finite()).collect();
    let hs: Vec<f64> = ok.iter().map(|p| p.h).collect();
    let es: Vec<f64> = ok.iter().map(|p| p.error).collect();
    s.rate = estimate_rate(&hs, &es).ok();
    s.plateau = plateau(&hs, &es);
    let saturation = matches!(config.kind, StudyKind::InterpSaturation | StudyKind::SchemeSaturation);
    if let (Some(pred), Some(RateOutcome::Fit(fit))) = (s.predicted_rate, &s.rate) {
        if !saturation {
            let tol = config.rate_tolerance;
            s.rate_pass = Some(if s.predicted_is_lower_bound {
                fit.slope >= pred - tol
            } else {
                (fit.slope - pred).abs() <= tol
            });
        }
    }
    if let (Some(p), Some((lo, hi))) = (s.plateau, s.plateau_bracket) {
        let tol = 0.1;
        s.plateau_pass = Some(p >= lo * (1.0 - tol) && p <= hi * (1.0 + tol));
    }
}

/// Output formats for [`emit_outputs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

pub const ALL_FORMATS: [Format; 3] = [Format::Csv, Format::Json, Format::Svg];

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|source| Error::Io { path: tmp.clone(), source })?;
    std::fs::rename(&tmp, path).map_err(|source| Error::Io { path: path.into(), source })
}

/// The result directory `root/<kind>-<hash>`.
pub fn result_dir(root: &Path, result: &StudyResult) -> PathBuf {
    root.join(format!("{}-{}", result.kind.name(), result.config_hash))
}

pub fn series_csv(s: &Series) -> String {
    let mut out = String::from("h,error,order\n");
    let orders = s.orders();
    for (i, p) in s.points.iter().enumerate() {
        let order = if i == 0 { String::new() } else { format!("{}", orders[i - 1]) };
        let _ = writeln!(out, "{},{:e},{}", p.h, p.error, order);
    }
    out
}

fn series_stem(result: &StudyResult, i: usize) -> String {
    if result.series.len() == 1 {
        "errors".into()
    } else {
        match result.series[i].t {
            Some(t) => format!("errors_t{t}"),
            None => format!("errors_{i}"),
        }
    }
}

/// Writes the result under its content-hashed directory and returns the
/// files written.
pub fn emit_outputs(result: &StudyResult, root: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    let dir = result_dir(root, result);
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            Format::Json => {
                let path = dir.join("result.json");
                write_atomic(&path, &serde_json::to_string_pretty(result)?)?;
                written.push(path);
            }
            Format::Csv => {
                for (i, s) in result.series.iter().enumerate() {
                    let path = dir.join(format!("{}.csv", series_stem(result, i)));
                    write_atomic(&path, &series_csv(s))?;
                    written.push(path);
                }
                for (i, c) in result.constants.iter().enumerate() {
                    let path = dir.join(format!("constants_{i}.csv"));
                    write_atomic(&path, &c.to_csv())?;
                    written.push(path);
                }
            }
            Format::Svg => {
                for (i, s) in result.series.iter().enumerate() {
                    let path = dir.join(format!("{}.svg", series_stem(result, i)));
                    write_atomic(&path, &plot_svg(s, result.kind.name()))?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

/// Log-log plot of a series with the predicted slope through the last
/// point and the plateau guide when there is one.
pub fn plot_svg(s: &Series, title: &str) -> String {
    let (w, hgt, pad) = (640.0, 480.0, 60.0);
    let pts: Vec<(f64, f64)> = s
        .points
        .iter()
        .filter(|p| p.error > 0.0 && p.error.is_finite())
        .map(|p| (p.h.log10(), p.error.log10()))
        .collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if let Some((lo, hi)) = s.plateau_bracket {
        ys.extend([lo, hi].iter().filter(|v| **v > 0.0).map(|v| v.log10()));
    }
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let (x0, x1) = if x0.is_finite() && x1 > x0 { (x0, x1) } else { (-1.0, 0.0) };
    let (y0, y1) = if y0.is_finite() && y1 > y0 { (y0 - 0.5, y1 + 0.5) } else { (-1.0, 1.0) };
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| hgt - pad - (y - y0) / (y1 - y0) * (hgt - 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        out,
        r#"<polyline class="axes" fill="none" stroke="black" points="{pad},{pad} {pad},{} {},{}"/>"#,
        hgt - pad,
        w - pad,
        hgt - pad
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">log10 h</text>"#, w / 2.0, hgt - 15.0);
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" transform="rotate(-90 18 {})" text-anchor="middle">log10 error</text>"#,
        hgt / 2.0,
        hgt / 2.0
    );
    let line: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
    let _ = writeln!(out, r#"<polyline class="data" fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, line.join(" "));
    for p in &pts {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(p.0), sy(p.1));
    }
    if let (Some(rate), Some(last)) = (s.predicted_rate, pts.last()) {
        if rate > 0.0 {
            let y_at = |x: f64| last.1 + rate * (x - last.0);
            let _ = writeln!(
                out,
                r#"<line class="slope-guide" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
                sx(x0),
                sy(y_at(x0)),
                sx(x1),
                sy(y_at(x1))
            );
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" fill="gray">slope {rate}</text>"#, sx(x1) - 80.0, sy(y_at(x1)) - 8.0);
        }
    }
    if let Some((lo, hi)) = s.plateau_bracket {
        let level = if lo > 0.0 && hi > 0.0 { (0.5 * (lo.log10() + hi.log10())).max(y0) } else { y0 };
        let _ = writeln!(
            out,
            r#"<line class="plateau-guide" x1="{pad}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="firebrick" stroke-dasharray="4 4"/>"#,
            sy(level),
            w - pad,
            sy(level)
        );
    }
    out.push_str("</svg>\n");
    out
}
