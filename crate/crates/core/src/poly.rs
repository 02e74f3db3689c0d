//! Real polynomials with coefficients in ascending order: `c[0] + c[1] x + …`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative at `z`.
fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * z + c, dp * z + p))
}

/// `n` Chebyshev nodes of the first kind on `[-half_span, half_span]`.
pub fn chebyshev_nodes(n: usize, half_span: f64) -> Vec<f64> {
    (0..n)
        .map(|k| half_span * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect()
}

/// Interpolating polynomial through `(nodes[i], values[i])`.
///
/// The Vandermonde system is solved in the scaled variable `x / scale` and
/// mapped back, which keeps it well conditioned for wide node spans.
pub fn interpolate(nodes: &[f64], values: &[f64], scale: f64) -> Option<Vec<f64>> {
    let n = nodes.len();
    let v = DMatrix::from_fn(n, n, |i, j| (nodes[i] / scale).powi(j as i32));
    let y = DVector::from_column_slice(values);
    let t = v.lu().solve(&y)?;
    Some(t.iter().enumerate().map(|(k, c)| c / scale.powi(k as i32)).collect())
}

/// Divide through by the leading coefficient.
pub fn monic(coeffs: &[f64]) -> Vec<f64> {
    let lead = *coeffs.last().expect("empty polynomial");
    coeffs.iter().map(|c| c / lead).collect()
}

const SCHUR_MAX_ITER: usize = 1000;

fn eigenvalues(m: DMatrix<f64>) -> Option<Vec<Complex64>> {
    Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER).map(|s| s.complex_eigenvalues().iter().copied().collect())
}

/// `H M H` for a fixed Householder reflector `H`: same spectrum, different
/// Hessenberg form. The plain companion matrix of an even polynomial can
/// trap the shifted QR iteration in a cycle.
fn reflected(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let v = DVector::from_fn(n, |i, _| 1.0 / (i + 1) as f64);
    let h = DMatrix::identity(n, n) - &v * v.transpose() * (2.0 / v.norm_squared());
    &h * m * &h
}

/// Zeros of a monic polynomial from the eigenvalues of its companion matrix,
/// each refined by a few Newton steps.
pub fn roots(monic_coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let n = monic_coeffs.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -monic_coeffs[i];
    }
    let z = eigenvalues(companion.clone()).or_else(|| eigenvalues(reflected(&companion)))?;
    Some(z.into_iter().map(|z| polish(monic_coeffs, z)).collect())
}

/// Newton refinement that only accepts steps reducing `|p(z)|`.
pub fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let (mut value, _) = eval_with_derivative(coeffs, z);
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let (next, _) = eval_with_derivative(coeffs, candidate);
        if next.norm() < value.norm() {
            z = candidate;
            value = next;
        } else {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner() {
        let c = [1.0, -3.0, 0.0, 2.0];
        assert_eq!(eval(&c, 2.0), 1.0 - 6.0 + 16.0);
        let z = eval_complex(&c, Complex64::new(0.0, 1.0));
        assert_eq!(z, Complex64::new(1.0, -3.0 - 2.0));
    }

    #[test]
    fn interpolation_recovers_quartic() {
        let truth = [3.0, -1.0, 0.5, 2.0, -0.25];
        let nodes = chebyshev_nodes(5, 40.0);
        let values: Vec<f64> = nodes.iter().map(|&x| eval(&truth, x)).collect();
        let fit = interpolate(&nodes, &values, 40.0).unwrap();
        for (a, b) in fit.iter().zip(truth.iter()) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn roots_of_product() {
        // (x² + 1)(x − 2)(x + 3)
        let c = [-6.0, 1.0, -5.0, 1.0, 1.0];
        let mut r = roots(&c).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let expected = [
            Complex64::new(-3.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, 0.0),
        ];
        for (a, b) in r.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn even_quartic_terminates() {
        // exact zeros in the odd slots used to stall the unreflected QR sweep
        let c = [193.80112945814415, -0.0, 10.785066929457946, 0.0, 1.0];
        for z in roots(&c).unwrap() {
            assert!(eval_complex(&c, z).norm() < 1e-9 * 193.8);
        }
    }

    proptest::proptest! {
        #[test]
        fn roots_reproduce_monic_quartic(
            re in proptest::array::uniform2(-20.0f64..20.0),
            im in proptest::array::uniform2(0.01f64..20.0),
        ) {
            // two conjugate pairs
            let zs = [
                Complex64::new(re[0], im[0]), Complex64::new(re[0], -im[0]),
                Complex64::new(re[1], im[1]), Complex64::new(re[1], -im[1]),
            ];
            let mut c = vec![Complex64::new(1.0, 0.0)];
            for z in zs {
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (k, ck) in c.iter().enumerate() {
                    next[k + 1] += ck;
                    next[k] -= ck * z;
                }
                c = next;
            }
            let coeffs: Vec<f64> = c.iter().map(|z| z.re).collect();
            let scale = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for r in roots(&coeffs).unwrap() {
                proptest::prop_assert!(eval_complex(&coeffs, r).norm() < 1e-9 * scale);
            }
        }
    }
}
