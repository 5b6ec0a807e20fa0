//! Catalogue of basis functions described through their Fourier transforms.

mod bessel;
mod membership;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub use bessel::modified_bessel_k;
pub use membership::{verify_membership, MembershipCheck, MembershipReport, MembershipTolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Multiquadric,
    Polyharmonic,
    #[serde(skip)]
    Custom,
}

/// JSON form `{family, n, c, p}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

/// Behaviour of the transform at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decay {
    /// `exp(-c^2 r^2)` envelope.
    Gaussian { c: f64 },
    /// `exp(-c r)` envelope times a power.
    Exponential { c: f64 },
    /// `r^{-N}`.
    Power { exponent: f64 },
}

impl Decay {
    /// The decay exponent `N`, infinite for super-polynomial decay.
    pub fn exponent(&self) -> f64 {
        match *self {
            Decay::Power { exponent } => exponent,
            _ => f64::INFINITY,
        }
    }

    pub fn is_power(&self) -> bool {
        matches!(self, Decay::Power { .. })
    }
}

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Profile {
    Catalogue,
    Custom(RadialFn),
}

/// A radial basis function given by its (positive) Fourier transform.
#[derive(Clone)]
pub struct BasisFunction {
    pub n: usize,
    pub family: Family,
    pub c: f64,
    pub p: f64,
    pub kappa: f64,
    pub decay: Decay,
    pub a_lower: f64,
    pub a_upper: f64,
    amplitude: f64,
    profile: Profile,
}

impl fmt::Debug for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisFunction")
            .field("n", &self.n)
            .field("family", &self.family)
            .field("c", &self.c)
            .field("p", &self.p)
            .field("kappa", &self.kappa)
            .field("decay", &self.decay)
            .finish()
    }
}

pub fn make_basis(spec: &BasisSpec) -> Result<BasisFunction> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let c = spec.c.unwrap_or(1.0);
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("shape c must be positive, got {c}")));
    }
    let nf = n as f64;
    match spec.family {
        Family::Gaussian => Ok(BasisFunction {
            n,
            family: Family::Gaussian,
            c,
            p: 0.0,
            kappa: 0.0,
            decay: Decay::Gaussian { c },
            a_lower: c.powi(n as i32),
            a_upper: c.powi(n as i32),
            amplitude: 1.0,
            profile: Profile::Catalogue,
        }),
        Family::Multiquadric => {
            if n > 4 {
                return Err(Error::Unsupported(format!(
                    "multiquadric in dimension {n} needs K of order {}",
                    (nf + 1.0) / 2.0
                )));
            }
            let a = 2f64.powi(n as i32) * PI.powf((nf - 1.0) / 2.0) * gamma((nf + 1.0) / 2.0);
            Ok(BasisFunction {
                n,
                family: Family::Multiquadric,
                c,
                p: 1.0,
                kappa: nf + 1.0,
                decay: Decay::Exponential { c },
                a_lower: a,
                a_upper: a,
                amplitude: 1.0,
                profile: Profile::Catalogue,
            })
        }
        Family::Polyharmonic => {
            let p = spec.p.unwrap_or(0.0);
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "polyharmonic power must be positive, got {p}"
                )));
            }
            let a = c.powf(-p);
            Ok(BasisFunction {
                n,
                family: Family::Polyharmonic,
                c,
                p,
                kappa: nf + p,
                decay: Decay::Power { exponent: nf + p },
                a_lower: a,
                a_upper: a,
                amplitude: 1.0,
                profile: Profile::Catalogue,
            })
        }
        Family::Custom => Err(Error::InvalidParameter(
            "custom bases are built with BasisFunction::custom".into(),
        )),
    }
}

impl BasisFunction {
    pub fn gaussian(n: usize, c: f64) -> Result<Self> {
        make_basis(&BasisSpec { family: Family::Gaussian, n, c: Some(c), p: None })
    }

    pub fn multiquadric(n: usize, c: f64) -> Result<Self> {
        make_basis(&BasisSpec { family: Family::Multiquadric, n, c: Some(c), p: None })
    }

    pub fn polyharmonic(n: usize, p: f64) -> Result<Self> {
        make_basis(&BasisSpec { family: Family::Polyharmonic, n, c: None, p: Some(p) })
    }

    /// A radial transform supplied by the caller; used for diagnostics.
    pub fn custom(
        n: usize,
        kappa: f64,
        decay: Decay,
        amplitude_bounds: (f64, f64),
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BasisFunction {
            n,
            family: Family::Custom,
            c: 1.0,
            p: 0.0,
            kappa,
            decay,
            a_lower: amplitude_bounds.0,
            a_upper: amplitude_bounds.1,
            amplitude: 1.0,
            profile: Profile::Custom(Arc::new(profile)),
        }
    }

    /// Same basis with the transform multiplied by `factor`.
    pub fn with_amplitude(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.amplitude *= factor;
        out.a_lower *= factor;
        out.a_upper *= factor;
        out
    }

    pub fn spec(&self) -> BasisSpec {
        BasisSpec {
            family: self.family,
            n: self.n,
            c: Some(self.c),
            p: (self.family == Family::Polyharmonic).then_some(self.p),
        }
    }

    /// Same family and dimension with a different shape parameter.
    pub fn with_shape(&self, c: f64) -> Result<Self> {
        let mut spec = self.spec();
        spec.c = Some(c);
        make_basis(&spec)
    }

    pub fn is_radial(&self) -> bool {
        true
    }

    /// The transform as a function of `|eta|`.
    pub fn radial(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let v = match (&self.profile, self.family) {
            (Profile::Custom(f), _) => f(r),
            (_, Family::Gaussian) => self.c.powi(self.n as i32) * (-(self.c * r).powi(2)).exp(),
            (_, Family::Polyharmonic) => {
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    self.c.powf(-self.p) * r.powf(-(n + self.p))
                }
            }
            (_, Family::Multiquadric) => {
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    let nu = (n + 1.0) / 2.0;
                    let x = self.c * r;
                    if x > 740.0 {
                        0.0
                    } else {
                        let k = modified_bessel_k(nu, x).unwrap_or(0.0);
                        (2.0 * PI * self.c).powf(nu) / PI * r.powf(-nu) * k
                    }
                }
            }
            (_, Family::Custom) => f64::NAN,
        };
        self.amplitude * v
    }

    /// `phi_hat(eta)`.
    pub fn fourier(&self, eta: &[f64]) -> f64 {
        self.radial(norm(eta))
    }

    /// Radial derivative of the transform by central differences.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        let d = 1e-5 * r.max(1e-300);
        (self.radial(r + d) - self.radial(r - d)) / (2.0 * d)
    }

    /// Second radial derivative by central differences.
    pub fn radial_second_derivative(&self, r: f64) -> f64 {
        let d = 1e-3 * r.max(1e-300);
        (self.radial(r + d) - 2.0 * self.radial(r) + self.radial(r - d)) / (d * d)
    }

    /// The basis function in space, when a closed form is known.
    pub fn spatial(&self, x: &[f64]) -> Option<f64> {
        let r = norm(x);
        let n = self.n as f64;
        let v = match (&self.profile, self.family) {
            (Profile::Custom(_), _) | (_, Family::Custom) => return None,
            (_, Family::Gaussian) => {
                (4.0 * PI).powf(-n / 2.0) * (-(r / self.c).powi(2) / 4.0).exp()
            }
            (_, Family::Multiquadric) => -(r * r + self.c * self.c).sqrt(),
            (_, Family::Polyharmonic) => {
                let half = self.p / 2.0;
                if (half - half.round()).abs() < 1e-12 {
                    return None;
                }
                let constant = 2f64.powf(self.p + n) * PI.powf(n / 2.0) * gamma((n + self.p) / 2.0)
                    / gamma(-half);
                self.c.powf(-self.p) * r.powf(self.p) / constant
            }
        };
        Some(self.amplitude * v)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    match v.len() {
        1 => v[0].abs(),
        _ => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}
