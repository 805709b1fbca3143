//! Eigenvalues of Hermitian matrices.
//!
//! Complex Householder reduction to Hermitian tridiagonal form, followed by
//! the implicit-shift QL iteration on the real tridiagonal matrix obtained
//! by a diagonal phase similarity (which leaves eigenvalues untouched).
//! Values only; the transformation layers never need eigenvectors.

use super::{re, ComplexMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Sorted (ascending) eigenvalues of the Hermitian part `(M + M*)/2`.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.require_square("hermitian_eigenvalues")?;
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Work on the Hermitian part so tiny asymmetries cannot derail QL.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * re(0.5));
    householder_tridiagonalize(&mut a);

    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    // A diagonal phase similarity turns the complex subdiagonal into its
    // modulus without changing the spectrum.
    let mut e: Vec<f64> = (0..n)
        .map(|i| if i + 1 < n { a[(i + 1, i)].norm() } else { 0.0 })
        .collect();
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(d)
}

fn householder_tridiagonalize(a: &mut ComplexMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let below: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if below == 0.0 {
            continue;
        }
        let nx = (a[(k + 1, k)].norm_sqr() + below).sqrt();
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / re(x0.norm()) } else { re(1.0) };
        let alpha = -phase * nx;

        // Reflector direction u (unit length, supported on k+1..n).
        let mut u = vec![Complex64::default(); n];
        u[k + 1] = x0 - alpha;
        for (i, ui) in u.iter_mut().enumerate().take(n).skip(k + 2) {
            *ui = a[(i, k)];
        }
        let un: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if un == 0.0 {
            continue;
        }
        for ui in &mut u {
            *ui /= un;
        }

        // p = A u and kappa = u* A u; apply A <- (I - 2uu*) A (I - 2uu*).
        let mut p = vec![Complex64::default(); n];
        for i in 0..n {
            let mut acc = Complex64::default();
            for (j, &uj) in u.iter().enumerate() {
                acc += a[(i, j)] * uj;
            }
            p[i] = acc;
        }
        let kappa: Complex64 = u.iter().zip(&p).map(|(ui, pi)| ui.conj() * pi).sum();
        for i in 0..n {
            for j in 0..n {
                let update = -2.0 * (u[i] * p[j].conj() + p[i] * u[j].conj())
                    + 4.0 * kappa * u[i] * u[j].conj();
                a[(i, j)] += update;
            }
        }
    }
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix
/// (diagonal `d`, subdiagonal `e` with `e[i]` coupling `d[i]` and `d[i+1]`).
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iterations = 0;
        loop {
            // Smallest index whose off-diagonal element is negligible.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 50 {
                return Err(Error::NoConvergence("Hermitian QL iteration"));
            }

            // Wilkinson-style shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));

            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c, expm};

    #[test]
    fn two_by_two_closed_form() {
        // Hermitian [[a, z], [conj z, b]]: eigenvalues from trace/determinant.
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.5, 0.0), c(0.3, -0.7)],
            vec![c(0.3, 0.7), c(-2.0, 0.0)],
        ]);
        let eigs = hermitian_eigenvalues(&m).unwrap();
        let t = 1.5 + (-2.0);
        let det = 1.5 * (-2.0) - (0.3f64.powi(2) + 0.7f64.powi(2));
        let disc = (t * t - 4.0 * det).sqrt();
        let lo = (t - disc) / 2.0;
        let hi = (t + disc) / 2.0;
        assert!((eigs[0] - lo).abs() < 1e-13);
        assert!((eigs[1] - hi).abs() < 1e-13);
    }

    #[test]
    fn unitary_conjugation_preserves_spectrum() {
        // U = exp(K) with skew-Hermitian K is unitary; U D U* must have the
        // eigenvalues on D.
        let k = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.4), c(0.3, 0.2), c(-0.1, 0.5)],
            vec![c(-0.3, 0.2), c(0.0, -0.8), c(0.2, -0.6)],
            vec![c(0.1, 0.5), c(-0.2, -0.6), c(0.0, 0.1)],
        ]);
        // Enforce K* = -K exactly.
        let skew = ComplexMatrix::from_fn(3, 3, |i, j| (k[(i, j)] - k[(j, i)].conj()) * c(0.5, 0.0));
        let u = expm(&skew).unwrap();
        let d = ComplexMatrix::diag(&[c(-3.0, 0.0), c(0.25, 0.0), c(7.0, 0.0)]);
        let m = &(&u * &d) * &u.adjoint();
        let eigs = hermitian_eigenvalues(&m).unwrap();
        assert!((eigs[0] + 3.0).abs() < 1e-12);
        assert!((eigs[1] - 0.25).abs() < 1e-12);
        assert!((eigs[2] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn trace_and_frobenius_identities() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -2.0), c(0.5, 0.1)],
            vec![c(1.0, -1.0), c(-1.0, 0.0), c(0.7, 0.0), c(0.0, 0.3)],
            vec![c(0.0, 2.0), c(0.7, 0.0), c(4.0, 0.0), c(-0.2, 0.9)],
            vec![c(0.5, -0.1), c(0.0, -0.3), c(-0.2, -0.9), c(0.0, 0.0)],
        ]);
        let eigs = hermitian_eigenvalues(&m).unwrap();
        let trace: f64 = eigs.iter().sum();
        assert!((trace - 5.0).abs() < 1e-11);
        let sum_sq: f64 = eigs.iter().map(|x| x * x).sum();
        assert!((sum_sq - m.norm_fro().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn degenerate_and_diagonal_cases() {
        let eigs = hermitian_eigenvalues(&ComplexMatrix::identity(5)).unwrap();
        assert!(eigs.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        let d = ComplexMatrix::diag(&[c(3.0, 0.0), c(-1.0, 0.0), c(3.0, 0.0)]);
        let eigs = hermitian_eigenvalues(&d).unwrap();
        assert!((eigs[0] + 1.0).abs() < 1e-14);
        assert!((eigs[1] - 3.0).abs() < 1e-14);
        assert!((eigs[2] - 3.0).abs() < 1e-14);
        assert!(hermitian_eigenvalues(&ComplexMatrix::zeros(0, 0)).unwrap().is_empty());
    }
}
