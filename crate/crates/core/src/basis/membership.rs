use serde::Serialize;

use super::{BasisFunction, Decay};

#[derive(Clone, Debug)]
pub struct MembershipTolerances {
    pub samples_per_decade: usize,
    pub smallest_radius: f64,
    /// Allowed growth of a scaled quantity towards the singular end before
    /// it counts as unbounded.
    pub growth: f64,
}

impl Default for MembershipTolerances {
    fn default() -> Self {
        Self { samples_per_decade: 24, smallest_radius: 1e-5, growth: 1.5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCheck {
    pub name: String,
    pub passed: bool,
    pub constant: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub kappa: f64,
    pub decay_exponent: f64,
    pub fitted_lower: f64,
    pub fitted_upper: f64,
    pub checks: Vec<MembershipCheck>,
    pub passed: bool,
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(2);
    (0..=count)
        .map(|i| lo * (hi / lo).powf(i as f64 / count as f64))
        .collect()
}

/// Bounded if the tail end does not exceed `growth` times the bulk maximum.
fn bounded(values: &[f64], tail: usize, growth: f64) -> (bool, f64) {
    if values.iter().any(|v| !v.is_finite()) {
        return (false, f64::INFINITY);
    }
    let split = values.len().saturating_sub(tail);
    let bulk = values[..split].iter().cloned().fold(0.0, f64::max);
    let end = values[split..].iter().cloned().fold(0.0, f64::max);
    (end <= growth * bulk.max(1e-300) || end == 0.0, bulk.max(end))
}

pub fn verify_membership(phi: &BasisFunction, tol: &MembershipTolerances) -> MembershipReport {
    let kappa = phi.kappa;
    let big = match phi.decay {
        Decay::Gaussian { c } => 24.0 / c,
        Decay::Exponential { c } => 600.0 / c,
        Decay::Power { .. } => 1e3,
    };
    let mut checks = Vec::new();

    let outward = log_grid(tol.smallest_radius, big, tol.samples_per_decade);
    let positive = outward.iter().all(|&r| phi.radial(r) > 0.0);
    checks.push(MembershipCheck { name: "positivity".into(), passed: positive, constant: 0.0 });

    let inner = log_grid(tol.smallest_radius, 1.0, tol.samples_per_decade);
    let scaled: Vec<f64> = inner.iter().map(|&r| r.powf(kappa) * phi.radial(r)).collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let at_zero = scaled[0];
    let sandwich = lo > 0.0
        && hi.is_finite()
        && at_zero >= phi.a_lower * (1.0 - 1e-3)
        && at_zero <= phi.a_upper * (1.0 + 1e-3);
    checks.push(MembershipCheck { name: "ellipticity".into(), passed: sandwich, constant: hi });

    // Derivative bounds near the origin, sampled from the singular end outward.
    let dyadic: Vec<f64> = (0..=20).map(|m| 2f64.powi(-m)).collect();
    let first: Vec<f64> = dyadic
        .iter()
        .map(|&r| r.powf(kappa + 1.0) * phi.radial_derivative(r).abs())
        .collect();
    let second: Vec<f64> = dyadic
        .iter()
        .map(|&r| {
            r.powf(kappa + 2.0)
                * (phi.radial_second_derivative(r).abs() + phi.radial_derivative(r).abs() / r)
        })
        .collect();
    let (ok1, c1) = bounded(&first, 6, tol.growth);
    let (ok2, c2) = bounded(&second, 6, tol.growth);
    checks.push(MembershipCheck { name: "derivative order 1".into(), passed: ok1, constant: c1 });
    checks.push(MembershipCheck { name: "derivative order 2".into(), passed: ok2, constant: c2 });

    // Decay at infinity for the transform and its gradient.
    let exponent = match phi.decay {
        Decay::Power { exponent } => exponent,
        _ => phi.n as f64 + kappa + 4.0,
    };
    let far = log_grid(1.0, big, tol.samples_per_decade);
    let zeroth: Vec<f64> = far.iter().map(|&r| r.powf(exponent) * phi.radial(r)).collect();
    let grad: Vec<f64> =
        far.iter().map(|&r| r.powf(exponent) * phi.radial_derivative(r).abs()).collect();
    let (ok3, c3) = bounded(&zeroth, tol.samples_per_decade, tol.growth);
    let (ok4, c4) = bounded(&grad, tol.samples_per_decade, tol.growth);
    checks.push(MembershipCheck { name: "decay order 0".into(), passed: ok3, constant: c3 });
    checks.push(MembershipCheck { name: "decay order 1".into(), passed: ok4, constant: c4 });

    let passed = checks.iter().all(|c| c.passed);
    MembershipReport {
        kappa,
        decay_exponent: phi.decay.exponent(),
        fitted_lower: lo,
        fitted_upper: hi,
        checks,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_passes() {
        let tol = MembershipTolerances::default();
        for b in [
            BasisFunction::gaussian(1, 1.0).unwrap(),
            BasisFunction::gaussian(2, 2.0).unwrap(),
            BasisFunction::multiquadric(1, 1.0).unwrap(),
            BasisFunction::multiquadric(2, 1.0).unwrap(),
            BasisFunction::multiquadric(3, 0.5).unwrap(),
            BasisFunction::multiquadric(4, 1.0).unwrap(),
            BasisFunction::polyharmonic(1, 3.0).unwrap(),
            BasisFunction::polyharmonic(2, 1.5).unwrap(),
        ] {
            let report = verify_membership(&b, &tol);
            assert!(report.passed, "{b:?}: {:?}", report.checks);
        }
    }

    #[test]
    fn polyharmonic_constants_are_one() {
        let r = verify_membership(
            &BasisFunction::polyharmonic(1, 3.0).unwrap(),
            &MembershipTolerances::default(),
        );
        assert!((r.fitted_lower - 1.0).abs() < 1e-12 && (r.fitted_upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_change_fails() {
        let bad = BasisFunction::custom(1, 2.0, Decay::Power { exponent: 2.0 }, (1.0, 1.0), |r| {
            r.cos() / (r * r)
        });
        let report = verify_membership(&bad, &MembershipTolerances::default());
        assert!(!report.passed);
        assert!(!report.checks[0].passed);
    }
}
