//! Weyl disks and the Darboux-induced Möbius transformation of
//! Weyl-Titchmarsh functions.
//!
//! For a Hamiltonian system with the block carrier
//! `J = [[0, I_r], [-I_r, 0]]` and the fundamental solution `Y(x, lambda)`
//! normalised by `Y(0) = E` (`EJ = JE`, `E*E = I`), an r x r matrix `M`
//! belongs to the Weyl disk at the endpoint `l'` when the Hermitian form
//!
//! ```text
//! i [I_r, M*] Y(l')* J Y(l') [I_r; M]
//! ```
//!
//! is nonpositive. The Darboux matrix at x = 0 induces the block matrix
//! `U = E* w_A(0, lambda) E` whose fractional-linear action maps the disk
//! of the initial system into the disk of the transformed one.

use crate::error::{Error, Result};
use crate::gbdt::{self, DarbouxPath, PathMode};
use crate::matcore::{self, re, ComplexMatrix};
use crate::systems::SystemCoefficients;
use num_complex::Complex64;

/// Tolerance used by the normalisation checks on `E`.
const E_TOL: f64 = 1e-12;
/// Default membership tolerance for the disk form (relative to its norm).
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A candidate Weyl-disk point: the spectral parameter (upper half-plane),
/// the r x r matrix and the interval endpoint.
#[derive(Debug, Clone)]
pub struct WeylPoint {
    pub lambda: Complex64,
    pub m: ComplexMatrix,
    pub ell_prime: f64,
}

impl WeylPoint {
    pub fn new(lambda: Complex64, m: ComplexMatrix, ell_prime: f64) -> Result<Self> {
        if lambda.im <= 0.0 {
            return Err(Error::Usage(format!(
                "Weyl-disk lambda must lie in the upper half-plane, got {lambda}"
            )));
        }
        m.require_square("WeylPoint::new")?;
        Ok(Self {
            lambda,
            m,
            ell_prime,
        })
    }
}

/// The block matrix of the induced fractional-linear transformation,
/// `U = E* w_A(0, lambda) E` split into r x r blocks.
#[derive(Debug, Clone)]
pub struct MoebiusBlocks {
    u: ComplexMatrix,
    r: usize,
}

impl MoebiusBlocks {
    /// Wraps an even-dimensional matrix as a block quadruple.
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        u.require_square("MoebiusBlocks::new")?;
        if u.rows() % 2 != 0 {
            return Err(Error::Dimension {
                op: "MoebiusBlocks::new",
                expected: "even-dimensional matrix".into(),
                got: format!("{}x{}", u.rows(), u.cols()),
            });
        }
        let r = u.rows() / 2;
        Ok(Self { u, r })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn u11(&self) -> ComplexMatrix {
        self.u.block(0, 0, self.r, self.r)
    }

    pub fn u12(&self) -> ComplexMatrix {
        self.u.block(0, self.r, self.r, self.r)
    }

    pub fn u21(&self) -> ComplexMatrix {
        self.u.block(self.r, 0, self.r, self.r)
    }

    pub fn u22(&self) -> ComplexMatrix {
        self.u.block(self.r, self.r, self.r, self.r)
    }
}

/// The block carrier `J = [[0, I_r], [-I_r, 0]]`.
pub fn block_j(r: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        j[(i, r + i)] = re(1.0);
        j[(r + i, i)] = re(-1.0);
    }
    j
}

/// Checks that `j` has the exact block form above, returning `r`.
pub fn require_block_j(j: &ComplexMatrix) -> Result<usize> {
    if j.is_square() && j.rows() % 2 == 0 {
        let r = j.rows() / 2;
        if (j - &block_j(r)).max_abs() == 0.0 {
            return Ok(r);
        }
    }
    Err(Error::Usage(
        "Weyl-disk operations need J = [[0, I_r], [-I_r, 0]]".into(),
    ))
}

/// Validates the normalisation matrix `E` against `J`: `EJ = JE` and
/// `E*E = I`.
pub fn validate_normalization(e: &ComplexMatrix, j: &ComplexMatrix) -> Result<()> {
    e.require_square("validate_normalization")?;
    if e.shape() != j.shape() {
        return Err(Error::Dimension {
            op: "validate_normalization",
            expected: format!("{}x{}", j.rows(), j.cols()),
            got: format!("{}x{}", e.rows(), e.cols()),
        });
    }
    let comm = (&(e * j) - &(j * e)).norm_fro();
    if comm > E_TOL * (1.0 + e.norm_fro() * j.norm_fro()) {
        return Err(Error::Normalization(format!(
            "E does not commute with J (deviation {comm:e})"
        )));
    }
    let unit = (&(&e.adjoint() * e) - &ComplexMatrix::identity(e.rows())).norm_fro();
    if unit > E_TOL * (1.0 + e.norm_fro()) {
        return Err(Error::Normalization(format!(
            "E is not unitary (deviation {unit:e})"
        )));
    }
    Ok(())
}

/// Fundamental solution `Y(x, lambda)` with `Y(xs[0]) = E`, integrated by
/// RK4 along the given nodes. The system must carry a skew-adjoint `J`
/// and `E` must satisfy the normalisation conditions.
pub fn fundamental_solution(
    sys: &SystemCoefficients,
    lambda: Complex64,
    e: &ComplexMatrix,
    xs: &[f64],
) -> Result<Vec<ComplexMatrix>> {
    let j = sys.symmetric_j().ok_or_else(|| {
        Error::Dialect("fundamental solutions need a Hamiltonian-form system".into())
    })?;
    validate_normalization(e, &j)?;
    gbdt::integrate_solution(sys, lambda, e, xs)
}

/// The Hermitian disk form `i [I_r, M*] Y* J Y [I_r; M]`.
///
/// Membership of `M` in the Weyl disk means the largest eigenvalue of this
/// matrix is nonpositive (up to tolerance); see [`disk_membership`].
pub fn weyl_disk_form(
    y_at_ell: &ComplexMatrix,
    j: &ComplexMatrix,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let r = m.rows();
    m.require_square("weyl_disk_form")?;
    if y_at_ell.rows() != 2 * r || y_at_ell.cols() != 2 * r || j.rows() != 2 * r {
        return Err(Error::Dimension {
            op: "weyl_disk_form",
            expected: format!("{0}x{0} Y and J for r = {1}", 2 * r, r),
            got: format!("{}x{}", y_at_ell.rows(), y_at_ell.cols()),
        });
    }
    let mut column = ComplexMatrix::zeros(2 * r, r);
    column.set_block(0, 0, &ComplexMatrix::identity(r));
    column.set_block(r, 0, m);
    let inner = &(&y_at_ell.adjoint() * j) * y_at_ell;
    Ok((&(&column.adjoint() * &inner) * &column).scale(Complex64::new(0.0, 1.0)))
}

/// Largest eigenvalue of the (Hermitian) disk form and the membership
/// verdict at the relative tolerance `tol`.
pub fn disk_membership(form: &ComplexMatrix, tol: f64) -> Result<(f64, bool)> {
    let max_eig = matcore::max_eigenvalue(form)?;
    Ok((max_eig, max_eig <= tol * (1.0 + form.norm_fro())))
}

/// `U = E* w_A(0, lambda) E` split into blocks. Requires `S(0) > 0`.
pub fn moebius_blocks(
    path: &DarbouxPath,
    lambda: Complex64,
    e: &ComplexMatrix,
) -> Result<MoebiusBlocks> {
    let zero = path.node(path.zero_index())?;
    if !zero.s_invertible {
        return Err(Error::SingularNode {
            x: 0.0,
            cond: zero.s_cond,
        });
    }
    if matcore::min_eigenvalue(&zero.s)? <= 0.0 {
        return Err(Error::Usage(
            "Moebius blocks need S(0) > 0 (positive definite)".into(),
        ));
    }
    let w0 = gbdt::darboux_matrix(path, path.zero_index(), lambda)?;
    MoebiusBlocks::new(&(&e.adjoint() * &w0) * e)
}

/// The fractional-linear action
/// `M~ = (U21 + U22 M)(U11 + U12 M)^{-1}`.
pub fn moebius_map(u: &MoebiusBlocks, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let r = u.r();
    m.require_shape(r, r, "moebius_map")?;
    let den = &u.u11() + &(&u.u12() * m);
    let num = &u.u21() + &(&u.u22() * m);
    let det = matcore::determinant(&den)?;
    let threshold = 1e-12 * (1.0 + den.norm_one()).powi(r as i32);
    if det.norm() < threshold {
        return Err(Error::DenominatorSingular {
            det_abs: det.norm(),
            threshold,
        });
    }
    // M~ = num * den^{-1} via the adjoint system den* X = num*.
    let x = matcore::solve(&den.adjoint(), &num.adjoint())?;
    Ok(x.adjoint())
}

/// Residual of the algebraic identity
/// `i w_A* J w_A = i J + i (lambda - conj lambda) Pi* (A* - conj(lambda) I)^{-1} S^{-1} (A - lambda I)^{-1} Pi`
/// at a node of invertibility of a symmetric-mode path. This holds exactly
/// in exact arithmetic, so the returned relative residual is at roundoff
/// plus identity-drift level.
pub fn j_form_identity_residual(
    path: &DarbouxPath,
    idx: usize,
    lambda: Complex64,
) -> Result<f64> {
    let PathMode::Symmetric { a, j } = path.mode() else {
        return Err(Error::Usage(
            "the J-form identity needs a symmetric-mode path".into(),
        ));
    };
    let node = path.node(idx)?;
    if !node.s_invertible {
        return Err(Error::SingularNode {
            x: node.x,
            cond: node.s_cond,
        });
    }
    let w = gbdt::darboux_matrix(path, idx, lambda)?;
    let lhs = (&(&w.adjoint() * j) * &w).scale(Complex64::new(0.0, 1.0));

    let n = a.rows();
    let shifted = a - &ComplexMatrix::identity(n).scale(lambda);
    let b = matcore::solve(&shifted, &node.pi1)?;
    let c = matcore::solve(&node.s, &b)?;
    let correction = (&b.adjoint() * &c).scale(Complex64::new(0.0, 1.0) * (lambda - lambda.conj()));
    let rhs = &j.scale(Complex64::new(0.0, 1.0)) + &correction;

    let defect = (&lhs - &rhs).norm_fro();
    Ok(defect / (1.0 + lhs.norm_fro().max(rhs.norm_fro())))
}

/// Fundamental solution of the transformed system, normalised back to `E`:
/// `Y~(x) = w_A(x, lambda) Y(x, lambda) E* w_A(0, lambda)^{-1} E` on the
/// path nodes from 0 to `ell_prime`.
pub fn transformed_fundamental(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    lambda: Complex64,
    e: &ComplexMatrix,
    ell_prime: f64,
) -> Result<Vec<(f64, ComplexMatrix)>> {
    let last = path.index_at(ell_prime)?;
    let zero = path.zero_index();
    if last < zero {
        return Err(Error::Usage(
            "transformed fundamental solutions run over [0, ell'] with ell' >= 0".into(),
        ));
    }
    let xs: Vec<f64> = (zero..=last)
        .map(|i| path.node(i).map(|n| n.x))
        .collect::<Result<_>>()?;
    let ys = fundamental_solution(sys, lambda, e, &xs)?;
    let w0 = gbdt::darboux_matrix(path, zero, lambda)?;
    let w0_inv_e = matcore::solve(&w0, e)?;
    let corrector = &e.adjoint() * &w0_inv_e;
    let mut out = Vec::with_capacity(xs.len());
    for (offset, (&x, y)) in xs.iter().zip(&ys).enumerate() {
        let w = gbdt::darboux_matrix(path, zero + offset, lambda)?;
        out.push((x, &(&w * y) * &corrector));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::{propagate, GbdtTriple, GridSpec};
    use crate::matcore::c;
    use crate::systems::{pauli_j, Interval, MatrixField, Side};

    fn unit_interval() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    /// Canonical system: J = [[0,1],[-1,0]], H1 = I2, H0 = 0.
    fn canonical_system() -> SystemCoefficients {
        SystemCoefficients::hamiltonian(
            pauli_j(),
            MatrixField::from_matrix(&ComplexMatrix::identity(2)),
            MatrixField::zeros(2, 2),
            unit_interval(),
        )
        .unwrap()
    }

    fn unit_s_triple() -> GbdtTriple {
        GbdtTriple::Symmetric {
            a: ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)]]),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, -1.0)]]),
            j: pauli_j(),
        }
    }

    /// Triple with S0 = I built from A = r + Pi0 J Pi0* / 2.
    fn positive_triple() -> GbdtTriple {
        GbdtTriple::Symmetric {
            a: ComplexMatrix::from_rows(&[vec![c(0.5, -1.0)]]),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, 1.0)]]),
            j: pauli_j(),
        }
    }

    fn grid_xs(n: usize) -> Vec<f64> {
        (0..=n).map(|k| k as f64 / n as f64).collect()
    }

    #[test]
    fn free_system_keeps_the_normalisation() {
        let sys = SystemCoefficients::hamiltonian(
            pauli_j(),
            MatrixField::zeros(2, 2),
            MatrixField::zeros(2, 2),
            unit_interval(),
        )
        .unwrap();
        let e = ComplexMatrix::identity(2);
        let ys = fundamental_solution(&sys, c(0.3, 0.9), &e, &grid_xs(50)).unwrap();
        for y in ys {
            assert!((&y - &e).norm_fro() < 1e-13);
        }
    }

    #[test]
    fn canonical_solution_matches_matrix_exponential() {
        // Constant F = i J: Y(1) = exp(i J) up to RK4 error well below 1e-8.
        let sys = canonical_system();
        let e = ComplexMatrix::identity(2);
        let ys = fundamental_solution(&sys, c(0.0, 1.0), &e, &grid_xs(1000)).unwrap();
        let f = pauli_j().scale(c(0.0, 1.0));
        let oracle = matcore::expm(&f).unwrap();
        assert!((&ys[1000] - &oracle).norm_fro() < 1e-8);
    }

    #[test]
    fn determinant_is_constant_for_traceless_coefficients() {
        let sys = canonical_system();
        let e = ComplexMatrix::identity(2);
        let ys = fundamental_solution(&sys, c(0.0, 1.0), &e, &grid_xs(500)).unwrap();
        for y in ys.iter().step_by(100) {
            let det = matcore::determinant(y).unwrap();
            assert!((det - re(1.0)).norm() < 1e-8, "det drifted to {det}");
        }
    }

    #[test]
    fn normalisation_checks_reject_bad_e() {
        let sys = canonical_system();
        // Not unitary.
        let e = ComplexMatrix::diag(&[re(2.0), re(1.0)]);
        assert!(matches!(
            fundamental_solution(&sys, c(0.0, 1.0), &e, &grid_xs(10)),
            Err(Error::Normalization(_))
        ));
        // Unitary but not commuting with J.
        let e = ComplexMatrix::diag(&[re(1.0), re(-1.0)]);
        assert!(matches!(
            fundamental_solution(&sys, c(0.0, 1.0), &e, &grid_xs(10)),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn disk_form_at_the_left_endpoint() {
        // Y = E = I, M = i: the form is i (M - M*) = -2 < 0 (member).
        let j = block_j(1);
        let y = ComplexMatrix::identity(2);
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)]]);
        let form = weyl_disk_form(&y, &j, &m).unwrap();
        assert!((form[(0, 0)] - re(-2.0)).norm() < 1e-14);
        let (max_eig, member) = disk_membership(&form, MEMBERSHIP_TOL).unwrap();
        assert!(member && (max_eig + 2.0).abs() < 1e-14);
        // M = 0 sits exactly on the boundary.
        let m = ComplexMatrix::zeros(1, 1);
        let form = weyl_disk_form(&y, &j, &m).unwrap();
        let (max_eig, member) = disk_membership(&form, MEMBERSHIP_TOL).unwrap();
        assert!(member && max_eig.abs() < 1e-14);
    }

    #[test]
    fn classical_weyl_point_of_the_canonical_system() {
        // M = i is the half-line Weyl function value of the canonical
        // system; at l' = 1, lambda = i the form equals -2 e^{-2}.
        let sys = canonical_system();
        let e = ComplexMatrix::identity(2);
        let ys = fundamental_solution(&sys, c(0.0, 1.0), &e, &grid_xs(1000)).unwrap();
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)]]);
        let form = weyl_disk_form(&ys[1000], &pauli_j(), &m).unwrap();
        let expected = -2.0 * (-2.0f64).exp();
        assert!(
            (form[(0, 0)].re - expected).abs() < 1e-6,
            "form {} vs {expected}",
            form[(0, 0)]
        );
        let (max_eig, member) = disk_membership(&form, MEMBERSHIP_TOL).unwrap();
        assert!(member && max_eig <= 1e-9);
    }

    #[test]
    fn moebius_blocks_of_the_unit_triple() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 100).unwrap();
        let path = propagate(&unit_s_triple(), &sys, &grid).unwrap();
        let e = ComplexMatrix::identity(2);
        let u = moebius_blocks(&path, c(0.0, 2.0), &e).unwrap();
        // U = w_A(0, 2i) = [[2, -i], [i, 2]]; det = 3.
        let det = matcore::determinant(u.matrix()).unwrap();
        assert!((det - re(3.0)).norm() < 1e-12);
        assert!((u.u11()[(0, 0)] - re(2.0)).norm() < 1e-13);
        assert!((u.u12()[(0, 0)] - c(0.0, -1.0)).norm() < 1e-13);
        assert!((u.u21()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-13);
        assert!((u.u22()[(0, 0)] - re(2.0)).norm() < 1e-13);
    }

    #[test]
    fn moebius_map_basics() {
        // U = I fixes every M.
        let id = MoebiusBlocks::new(ComplexMatrix::identity(2)).unwrap();
        let m = ComplexMatrix::from_rows(&[vec![c(0.7, 0.4)]]);
        let mapped = moebius_map(&id, &m).unwrap();
        assert!((mapped[(0, 0)] - m[(0, 0)]).norm() < 1e-15);
        // U = [[0,1],[-1,0]] sends m to -1/m.
        let inv = MoebiusBlocks::new(block_j(1)).unwrap();
        let mapped = moebius_map(&inv, &m).unwrap();
        let expected = -re(1.0) / m[(0, 0)];
        assert!((mapped[(0, 0)] - expected).norm() < 1e-15);
        // m = 0 makes that denominator exactly singular.
        assert!(matches!(
            moebius_map(&inv, &ComplexMatrix::zeros(1, 1)),
            Err(Error::DenominatorSingular { .. })
        ));
    }

    #[test]
    fn moebius_map_round_trip_and_composition() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 100).unwrap();
        let lambda = c(0.3, 1.2);
        let e = ComplexMatrix::identity(2);
        let path_a = propagate(&unit_s_triple(), &sys, &grid).unwrap();
        let path_b = propagate(&positive_triple(), &sys, &grid).unwrap();
        let u = moebius_blocks(&path_a, lambda, &e).unwrap();
        let v = moebius_blocks(&path_b, lambda, &e).unwrap();
        let m = ComplexMatrix::from_rows(&[vec![c(0.2, 0.9)]]);

        // Round trip through U^{-1}.
        let u_inv = MoebiusBlocks::new(
            matcore::solve(u.matrix(), &ComplexMatrix::identity(2)).unwrap(),
        )
        .unwrap();
        let there = moebius_map(&u, &m).unwrap();
        let back = moebius_map(&u_inv, &there).unwrap();
        assert!((&back - &m).norm_fro() < 1e-10);

        // Composition: map(U V, M) = map(U, map(V, M)).
        let uv = MoebiusBlocks::new(u.matrix() * v.matrix()).unwrap();
        let lhs = moebius_map(&uv, &m).unwrap();
        let rhs = moebius_map(&u, &moebius_map(&v, &m).unwrap()).unwrap();
        assert!((&lhs - &rhs).norm_fro() < 1e-9);
    }

    #[test]
    fn j_form_identity_holds_to_roundoff() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 100).unwrap();
        let path = propagate(&unit_s_triple(), &sys, &grid).unwrap();
        let residual = j_form_identity_residual(&path, path.zero_index(), c(1.0, 1.0)).unwrap();
        assert!(residual <= 1e-10, "residual {residual}");
        // Zero generator: both sides reduce to iJ.
        let zero_triple = GbdtTriple::Symmetric {
            a: ComplexMatrix::identity(1),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::zeros(1, 2),
            j: pauli_j(),
        };
        let path = propagate(&zero_triple, &sys, &grid).unwrap();
        let residual = j_form_identity_residual(&path, 50, c(0.4, 0.8)).unwrap();
        assert!(residual <= 1e-14);
    }

    #[test]
    fn j_form_monotonicity_in_the_upper_half_plane() {
        // For S > 0 and lambda in C+, i(J - w* J w) is nonnegative.
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 200).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let j = pauli_j();
        for &lambda in &[c(0.0, 1.0), c(1.0, 0.5), c(-0.7, 2.0)] {
            for idx in [0, 50, 100, 200] {
                let w = gbdt::darboux_matrix(&path, idx, lambda).unwrap();
                let gap = (&j - &(&(&w.adjoint() * &j) * &w)).scale(c(0.0, 1.0));
                let min = matcore::min_eigenvalue(&gap).unwrap();
                assert!(min >= -1e-9, "min {min} at idx {idx}, lambda {lambda}");
            }
        }
    }

    #[test]
    fn transformed_fundamental_is_normalised_and_solves_the_new_system() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 1000).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let e = ComplexMatrix::identity(2);
        let lambda = c(0.0, 1.0);
        let yt = transformed_fundamental(&path, &sys, lambda, &e, 1.0).unwrap();
        assert!((&yt[0].1 - &e).norm_fro() <= 1e-12, "Y~(0) != E");
        // Central-difference residual against the transformed system.
        let idx = 500;
        let (x_prev, y_prev) = &yt[idx - 1];
        let (x_next, y_next) = &yt[idx + 1];
        let (_, y_here) = &yt[idx];
        let dy = (y_next - y_prev).scale(re(1.0 / (x_next - x_prev)));
        let node_idx = path.index_at(yt[idx].0).unwrap();
        let f_t = gbdt::transformed_f(&path, &sys, node_idx, lambda, Side::Plus).unwrap();
        let rhs = &f_t * y_here;
        let residual = (&dy - &rhs).norm_fro() / (1.0 + dy.norm_fro().max(rhs.norm_fro()));
        assert!(residual <= 1e-4, "residual {residual}");
    }

    #[test]
    fn zero_generator_transform_is_identity() {
        let sys = canonical_system();
        let zero_triple = GbdtTriple::Symmetric {
            a: ComplexMatrix::identity(1),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::zeros(1, 2),
            j: pauli_j(),
        };
        let grid = GridSpec::new(0.0, 1.0, 200).unwrap();
        let path = propagate(&zero_triple, &sys, &grid).unwrap();
        let e = ComplexMatrix::identity(2);
        let lambda = c(0.2, 0.7);
        let u = moebius_blocks(&path, lambda, &e).unwrap();
        assert!((u.matrix() - &ComplexMatrix::identity(2)).norm_fro() < 1e-13);
        let yt = transformed_fundamental(&path, &sys, lambda, &e, 1.0).unwrap();
        let xs: Vec<f64> = yt.iter().map(|(x, _)| *x).collect();
        let ys = fundamental_solution(&sys, lambda, &e, &xs).unwrap();
        for ((_, a), b) in yt.iter().zip(&ys) {
            assert!((a - b).norm_fro() < 1e-12);
        }
    }

    #[test]
    fn mapped_disk_points_stay_in_the_transformed_disk() {
        // Theorem-level check on the canonical system at lambda = i,
        // l' = 1, with a few in-disk candidates around the Weyl point i.
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 1000).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let e = ComplexMatrix::identity(2);
        let lambda = c(0.0, 1.0);
        let j = pauli_j();
        let ys = fundamental_solution(&sys, lambda, &e, &grid_xs(1000)).unwrap();
        let y_end = &ys[1000];
        let u = moebius_blocks(&path, lambda, &e).unwrap();
        let yt = transformed_fundamental(&path, &sys, lambda, &e, 1.0).unwrap();
        let yt_end = &yt.last().unwrap().1;

        for &m_val in &[c(0.0, 1.0), c(0.05, 1.1), c(-0.08, 0.9)] {
            let m = ComplexMatrix::from_rows(&[vec![m_val]]);
            let form = weyl_disk_form(y_end, &j, &m).unwrap();
            let (_, member) = disk_membership(&form, MEMBERSHIP_TOL).unwrap();
            assert!(member, "candidate {m_val} expected inside the initial disk");

            let mapped = moebius_map(&u, &m).unwrap();
            let form_t = weyl_disk_form(yt_end, &j, &mapped).unwrap();
            let (max_eig, _) = disk_membership(&form_t, MEMBERSHIP_TOL).unwrap();
            let scale = 1.0 + form_t.norm_fro();
            assert!(
                max_eig <= 1e-7 * scale,
                "mapped candidate escaped: max eig {max_eig}"
            );
        }
    }

    #[test]
    fn lower_half_plane_mirrors_by_conjugation() {
        // For real-coefficient systems Y(x, conj lambda) = conj Y(x, lambda),
        // so the disk form at (conj lambda, conj M) is the negative of the
        // form at (lambda, M); members map to members of the C- disk.
        let sys = canonical_system();
        let e = ComplexMatrix::identity(2);
        let lambda = c(0.3, 0.8);
        let ys = fundamental_solution(&sys, lambda, &e, &grid_xs(400)).unwrap();
        let ys_conj = fundamental_solution(&sys, lambda.conj(), &e, &grid_xs(400)).unwrap();
        let m = ComplexMatrix::from_rows(&[vec![c(0.1, 1.0)]]);
        let form_up = weyl_disk_form(&ys[400], &pauli_j(), &m).unwrap();
        let form_down = weyl_disk_form(&ys_conj[400], &pauli_j(), &m.conj()).unwrap();
        assert!((form_up[(0, 0)] + form_down[(0, 0)]).norm() < 1e-10);
    }

    #[test]
    fn weyl_point_requires_upper_half_plane() {
        let m = ComplexMatrix::zeros(1, 1);
        assert!(WeylPoint::new(c(1.0, -0.2), m.clone(), 1.0).is_err());
        assert!(WeylPoint::new(c(1.0, 0.2), m, 1.0).is_ok());
    }

    #[test]
    fn block_j_shape_checks() {
        assert_eq!(require_block_j(&block_j(2)).unwrap(), 2);
        assert!(require_block_j(&ComplexMatrix::identity(2)).is_err());
        assert_eq!(require_block_j(&pauli_j()).unwrap(), 1);
    }
}
