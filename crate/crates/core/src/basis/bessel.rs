//! Modified Bessel functions of the second kind for the orders used by the
//! multiquadric transforms in dimensions one to four.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `K_nu(x)` for `nu` in {1/2, 1, 3/2, 2, 5/2} and `x > 0`.
pub fn modified_bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_nu needs x > 0, got {x}")));
    }
    let twice = 2.0 * nu;
    if (twice - twice.round()).abs() > 1e-12 || !(0.0..=5.0).contains(&twice) {
        return Err(Error::Domain(format!("unsupported order {nu}")));
    }
    let twice = twice.round() as i32;
    if twice == 0 {
        return Ok(k0_k1(x).0);
    }
    if twice % 2 == 1 {
        return Ok(half_integer(twice, x));
    }
    let (k0, k1) = k0_k1(x);
    match twice {
        2 => Ok(k1),
        4 => Ok(k0 + 2.0 / x * k1),
        _ => Err(Error::Domain(format!("unsupported order {nu}"))),
    }
}

fn half_integer(twice: i32, x: f64) -> f64 {
    let base = (PI / (2.0 * x)).sqrt() * (-x).exp();
    let u = 1.0 / x;
    match twice {
        1 => base,
        3 => base * (1.0 + u),
        _ => base * (1.0 + 3.0 * u + 3.0 * u * u),
    }
}

/// `(K_0(x), K_1(x))`.
pub(crate) fn k0_k1(x: f64) -> (f64, f64) {
    if x < 2.0 {
        series(x)
    } else {
        continued_fraction(x)
    }
}

fn series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    let mut t0 = 1.0; // y^k / (k!)^2
    let mut t1 = 1.0; // y^k / (k! (k+1)!)
    let mut psi = -EULER_GAMMA; // psi(k+1)
    let (mut i0, mut i1, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..60 {
        let kf = k as f64 + 1.0;
        let psi_next = psi + 1.0 / kf;
        i0 += t0;
        i1 += t1;
        s0 += psi * t0;
        s1 += (psi + psi_next) * t1;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        psi = psi_next;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -log_half * i0 + s0;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

// Steed's continued fraction for K_0 and K_1 (Temme normalisation).
fn continued_fraction(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid in t.
    fn oracle(nu: f64, x: f64) -> f64 {
        let step = 1.0 / 512.0;
        let mut sum = 0.5 * (-x).exp();
        let mut t: f64 = step;
        loop {
            let term = (-x * t.cosh()).exp() * (nu * t).cosh();
            sum += term;
            if term < 1e-300 || t > 60.0 {
                break;
            }
            t += step;
        }
        sum * step
    }

    #[test]
    fn half_order_closed_form() {
        let v = modified_bessel_k(0.5, 1.0).unwrap();
        assert!((v - 0.461_068_504_447_894_4).abs() < 1e-15);
    }

    #[test]
    fn matches_integral_representation() {
        for &nu in &[0.5, 1.0, 1.5, 2.0, 2.5] {
            for &x in &[0.01, 0.3, 1.0, 1.9999, 2.0, 3.7, 10.0, 40.0] {
                let v = modified_bessel_k(nu, x).unwrap();
                let o = oracle(nu, x);
                assert!(((v - o) / o).abs() < 1e-10, "nu={nu} x={x}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn k1_at_one() {
        let o = oracle(1.0, 1.0);
        let v = modified_bessel_k(1.0, 1.0).unwrap();
        assert!(((v - o) / o).abs() < 1e-12);
        assert!((v - 0.601_907_230_197_234_6).abs() < 1e-13);
    }

    #[test]
    fn leading_asymptotics_at_fifty() {
        let lead = (PI / 100.0).sqrt() * (-50.0f64).exp();
        for &nu in &[0.5, 1.0] {
            let r = modified_bessel_k(nu, 50.0).unwrap() / lead;
            assert!((r - 1.0).abs() < 0.02, "nu={nu}: {r}");
        }
        for &nu in &[1.5f64, 2.0, 2.5] {
            let two_term = 1.0 + (4.0 * nu * nu - 1.0) / 400.0;
            let r = modified_bessel_k(nu, 50.0).unwrap() / lead;
            assert!((r / two_term - 1.0).abs() < 2e-3, "nu={nu}: {r}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(modified_bessel_k(1.0, 0.0).is_err());
        assert!(modified_bessel_k(0.7, 1.0).is_err());
        assert!(modified_bessel_k(3.5, 1.0).is_err());
    }
}
