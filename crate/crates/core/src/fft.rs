//! Multidimensional complex FFTs, axis by axis.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place transform of a row-major array whose first axis varies fastest.
pub(crate) fn transform(data: &mut [Complex64], dims: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let total: usize = dims.iter().product();
    assert_eq!(total, data.len());
    let mut stride = 1;
    for &len in dims {
        let fft = planner.plan_fft(len, direction);
        if stride == 1 {
            fft.process(data);
        } else {
            let block = stride * len;
            let mut line = vec![Complex64::default(); len];
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
        stride *= len;
    }
}

/// `sum_m x_m exp(+2 pi i m j / N)` without normalisation.
pub(crate) fn inverse(data: &mut [Complex64], dims: &[usize]) {
    transform(data, dims, FftDirection::Inverse);
}

/// `sum_j x_j exp(-2 pi i m j / N)` without normalisation.
pub(crate) fn forward(data: &mut [Complex64], dims: &[usize]) {
    transform(data, dims, FftDirection::Forward);
}

/// Signed frequency index for position `i` of an FFT of length `len`.
pub(crate) fn signed(i: usize, len: usize) -> i64 {
    if i < len / 2 {
        i as i64
    } else {
        i as i64 - len as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_round_trip() {
        let dims = [8, 4];
        let orig: Vec<Complex64> =
            (0..32).map(|i| Complex64::new(i as f64, (i * i % 7) as f64)).collect();
        let mut data = orig.clone();
        forward(&mut data, &dims);
        // single mode check: entry (1, 2)
        let mut direct = Complex64::default();
        for j1 in 0..4 {
            for j0 in 0..8 {
                let ang = -2.0 * std::f64::consts::PI * (j0 as f64 / 8.0 + 2.0 * j1 as f64 / 4.0);
                direct += orig[j0 + 8 * j1] * Complex64::from_polar(1.0, ang);
            }
        }
        assert!((data[1 + 8 * 2] - direct).norm() < 1e-10);
        inverse(&mut data, &dims);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / 32.0 - b).norm() < 1e-12);
        }
    }
}
