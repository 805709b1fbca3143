//! Explicit solutions of dynamical symplectic systems, their energies, and
//! two-way diffusion solutions.
//!
//! A symmetric-mode path `(A, Pi(x), S(x))` yields the explicit family
//!
//! ```text
//! z(x, t) = J Pi(x)* S(x)^{-1} exp(-t A) h,     h in C^n,
//! ```
//!
//! which solves the transformed dynamical system
//! `dz/dx = J(-H1 dz/dt + H0~ z)` at the points of invertibility of `S`.
//! On the `[0, a]` segment with `H1 >= 0` and `S(0) > 0` the energy of the
//! solution has the closed form
//!
//! ```text
//! E(t) = sqrt( h* exp(-t A*) (S(0)^{-1} - S(a)^{-1}) exp(-t A) h ).
//! ```
//!
//! Finite-difference residual checks use central second-order stencils in
//! both x and t; residuals are relative, normalised by
//! `1 + max(term norms)`.

use crate::error::{Error, Result};
use crate::gbdt::{self, DarbouxPath, PathMode};
use crate::matcore::{self, re, ComplexMatrix};
use crate::systems::{Side, SystemCoefficients};

/// Explicit solution samples on the tensor grid `xs x ts`.
#[derive(Debug, Clone)]
pub struct DynamicalSolution {
    /// Path node indices the x-samples refer to.
    pub node_indices: Vec<usize>,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// `samples[k][i]` is the m-vector `z(xs[i], ts[k])`.
    pub samples: Vec<Vec<ComplexMatrix>>,
}

impl DynamicalSolution {
    pub fn sample(&self, i: usize, k: usize) -> &ComplexMatrix {
        &self.samples[k][i]
    }
}

fn symmetric_data(path: &DarbouxPath) -> Result<(&ComplexMatrix, &ComplexMatrix)> {
    match path.mode() {
        PathMode::Symmetric { a, j } => Ok((a, j)),
        PathMode::General { .. } => Err(Error::Usage(
            "dynamical solutions need a symmetric-mode path".into(),
        )),
    }
}

/// `K(x) = J Pi(x)* S(x)^{-1}` at a node of invertibility.
fn solution_kernel(path: &DarbouxPath, j: &ComplexMatrix, idx: usize) -> Result<ComplexMatrix> {
    let node = path.node(idx)?;
    if !node.s_invertible {
        return Err(Error::SingularNode {
            x: node.x,
            cond: node.s_cond,
        });
    }
    // J Pi* S^{-1} = (S^{-1} Pi J*)* because S is Hermitian.
    let rhs = &node.pi1 * &j.adjoint();
    let sol = matcore::solve(&node.s, &rhs)?;
    Ok(sol.adjoint())
}

/// Samples `z(x, t) = J Pi* S^{-1} exp(-tA) h` at the requested path nodes
/// and times.
pub fn dynamical_solution(
    path: &DarbouxPath,
    h: &ComplexMatrix,
    ts: &[f64],
    node_indices: &[usize],
) -> Result<DynamicalSolution> {
    let (a, j) = symmetric_data(path)?;
    h.require_shape(path.n(), 1, "dynamical_solution h")?;
    let kernels: Vec<ComplexMatrix> = node_indices
        .iter()
        .map(|&idx| solution_kernel(path, j, idx))
        .collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(ts.len());
    for &t in ts {
        let propagator = matcore::expm(&a.scale(re(-t)))?;
        let vec_t = &propagator * h;
        samples.push(kernels.iter().map(|k| k * &vec_t).collect());
    }
    let xs = node_indices
        .iter()
        .map(|&idx| path.node(idx).map(|n| n.x))
        .collect::<Result<_>>()?;
    Ok(DynamicalSolution {
        node_indices: node_indices.to_vec(),
        xs,
        ts: ts.to_vec(),
        samples,
    })
}

/// `H0~(x) = H0 + P J H1 + H1 J* P` with `P = Pi* S^{-1} Pi` at a node.
fn transformed_h0(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    idx: usize,
    side: Side,
) -> Result<ComplexMatrix> {
    let (_, j) = symmetric_data(path)?;
    let node = path.node(idx)?;
    let h1 = sys.eval_h1(node.x, side)?;
    let h0 = sys.eval_h0(node.x, side)?;
    let s_inv_pi = matcore::solve(&node.s, &node.pi1)?;
    let p = &node.pi1.adjoint() * &s_inv_pi;
    Ok(&h0 + &(&(&(&p * j) * &h1) + &(&(&h1 * &j.adjoint()) * &p)))
}

/// Relative central-difference residual of the dynamical system
/// `dz/dx = J(-H1 dz/dt + H0~ z)` at interior sample `(i, k)`.
///
/// The x-stencil must not straddle the origin of a sign-indefinite weight;
/// pick index windows on one side of 0.
pub fn dynamical_residual(
    sol: &DynamicalSolution,
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    i: usize,
    k: usize,
) -> Result<f64> {
    let (_, j) = symmetric_data(path)?;
    if i == 0 || i + 1 >= sol.xs.len() || k == 0 || k + 1 >= sol.ts.len() {
        return Err(Error::Index(
            "dynamical residual needs interior sample indices".into(),
        ));
    }
    let dx = sol.xs[i + 1] - sol.xs[i - 1];
    let dt = sol.ts[k + 1] - sol.ts[k - 1];
    let dz_dx = (&sol.samples[k][i + 1] - &sol.samples[k][i - 1]).scale(re(1.0 / dx));
    let dz_dt = (&sol.samples[k + 1][i] - &sol.samples[k - 1][i]).scale(re(1.0 / dt));

    let x = sol.xs[i];
    let side = if x < 0.0 { Side::Minus } else { Side::Plus };
    let idx = sol.node_indices[i];
    let h1 = sys.eval_h1(x, side)?;
    let h0_t = transformed_h0(path, sys, idx, side)?;
    let rhs = j * &(&(&h0_t * &sol.samples[k][i]) - &(&h1 * &dz_dt));
    let defect = (&dz_dx - &rhs).norm_fro();
    Ok(defect / (1.0 + dz_dx.norm_fro().max(rhs.norm_fro())))
}

/// Closed-form energy of the explicit solution on `[0, a]`:
/// `sqrt(h* exp(-tA*) (S(0)^{-1} - S(a)^{-1}) exp(-tA) h)`.
///
/// `a` must be a positive grid node; `S(0)` and `S(a)` must be invertible.
/// A radicand below -1e-9 signals a violated monotonicity invariant; tiny
/// negatives from roundoff are clamped to zero.
pub fn energy_formula(path: &DarbouxPath, h: &ComplexMatrix, t: f64, a: f64) -> Result<f64> {
    let (a_mat, _) = symmetric_data(path)?;
    h.require_shape(path.n(), 1, "energy_formula h")?;
    if a <= 0.0 {
        return Err(Error::Usage("energy endpoint a must be positive".into()));
    }
    let zero = path.node(path.zero_index())?;
    let end = path.node(path.index_at(a)?)?;
    for node in [zero, end] {
        if !node.s_invertible {
            return Err(Error::SingularNode {
                x: node.x,
                cond: node.s_cond,
            });
        }
    }
    let id = ComplexMatrix::identity(path.n());
    let s0_inv = matcore::solve(&zero.s, &id)?;
    let sa_inv = matcore::solve(&end.s, &id)?;
    let gap = &s0_inv - &sa_inv;
    let vec_t = &matcore::expm(&a_mat.scale(re(-t)))? * h;
    let radicand = (&(&vec_t.adjoint() * &gap) * &vec_t)[(0, 0)];
    if radicand.re < -1e-9 {
        return Err(Error::InvariantViolation(format!(
            "energy radicand {} signals loss of S-monotonicity",
            radicand.re
        )));
    }
    Ok(radicand.re.max(0.0).sqrt())
}

/// Trapezoid quadrature of the energy integral `int_0^a z* H1 z dx` over
/// the invertible path nodes in `[0, a]`; used as the independent oracle
/// for [`energy_formula`].
pub fn energy_quadrature(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    h: &ComplexMatrix,
    t: f64,
    a: f64,
) -> Result<f64> {
    let (a_mat, j) = symmetric_data(path)?;
    let zero = path.zero_index();
    let end = path.index_at(a)?;
    if end <= zero {
        return Err(Error::Usage("energy endpoint a must be positive".into()));
    }
    let vec_t = &matcore::expm(&a_mat.scale(re(-t)))? * h;
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for idx in zero..=end {
        let node = path.node(idx)?;
        let kernel = solution_kernel(path, j, idx)?;
        let z = &kernel * &vec_t;
        let h1 = sys.eval_h1(node.x, Side::Plus)?;
        let density = (&(&z.adjoint() * &h1) * &z)[(0, 0)].re;
        if let Some((x_prev, d_prev)) = prev {
            integral += 0.5 * (node.x - x_prev) * (d_prev + density);
        }
        prev = Some((node.x, density));
    }
    Ok(integral.max(0.0).sqrt())
}

/// First component of the explicit solution together with the transformed
/// potential, for Lagrange-symmetric systems with vanishing shear. The
/// pair solves the two-way diffusion equation
/// `w dz1/dt = (p z1')' - q_breve z1` off the origin.
#[derive(Debug, Clone)]
pub struct TwoWaySolution {
    pub solution: DynamicalSolution,
    /// Transformed potential at the sampled nodes.
    pub q_breve: Vec<f64>,
}

/// Builds the two-way diffusion family at the requested nodes.
pub fn two_way_solution(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    h: &ComplexMatrix,
    ts: &[f64],
    node_indices: &[usize],
) -> Result<TwoWaySolution> {
    if !sys.lagrange_symmetric() {
        return Err(Error::Dialect(
            "two-way diffusion needs real (Lagrange-symmetric) coefficients".into(),
        ));
    }
    let solution = dynamical_solution(path, h, ts, node_indices)?;
    let q_breve = node_indices
        .iter()
        .map(|&idx| gbdt::transformed_sl_potential_at(path, sys, idx))
        .collect::<Result<_>>()?;
    Ok(TwoWaySolution { solution, q_breve })
}

/// Relative central-difference residual of
/// `w dz1/dt = (p z1')' - q_breve z1` at interior sample `(i, k)`.
/// `(p z1')'` expands to `p z1'' + p' z1'` with the analytic `p'`.
pub fn two_way_residual(
    two_way: &TwoWaySolution,
    sys: &SystemCoefficients,
    i: usize,
    k: usize,
) -> Result<f64> {
    let sol = &two_way.solution;
    if i == 0 || i + 1 >= sol.xs.len() || k == 0 || k + 1 >= sol.ts.len() {
        return Err(Error::Index(
            "two-way residual needs interior sample indices".into(),
        ));
    }
    let x = sol.xs[i];
    // The second-difference stencil must stay on one side of the origin.
    if sol.xs[i - 1].signum() != sol.xs[i + 1].signum() {
        return Err(Error::Usage(
            "two-way residual stencil must not straddle x = 0".into(),
        ));
    }
    let hx = sol.xs[i + 1] - sol.xs[i];
    let hx_lo = sol.xs[i] - sol.xs[i - 1];
    if (hx - hx_lo).abs() > 1e-12 * hx.abs() {
        return Err(Error::Usage(
            "two-way residual needs a uniform x-stencil".into(),
        ));
    }
    let dt = sol.ts[k + 1] - sol.ts[k - 1];

    let z = |kk: usize, ii: usize| sol.samples[kk][ii][(0, 0)];
    let z1 = z(k, i);
    let dz_dt = (z(k + 1, i) - z(k - 1, i)) / dt;
    let dz_dx = (z(k, i + 1) - z(k, i - 1)) / (2.0 * hx);
    let d2z_dx2 = (z(k, i + 1) - 2.0 * z1 + z(k, i - 1)) / (hx * hx);

    let side = if x < 0.0 { Side::Minus } else { Side::Plus };
    let (p, p_deriv, w) = match sys.dialect() {
        crate::systems::Dialect::SturmLiouville { p, omega, .. } => (
            p.eval_side(x, side)?,
            p.eval_deriv(x, side)?,
            omega.eval_side(x, side)?,
        ),
        crate::systems::Dialect::ShinZettl { p_inv, omega, .. } => {
            let pv = p_inv.eval_side(x, side)?;
            let dpv = p_inv.eval_deriv(x, side)?;
            // p = 1 / p_inv, p' = -p_inv' / p_inv^2.
            (re(1.0) / pv, -dpv / (pv * pv), omega.eval_side(x, side)?)
        }
        _ => {
            return Err(Error::Dialect(
                "two-way diffusion needs a Sturm-Liouville-type system".into(),
            ))
        }
    };
    let lhs = w * dz_dt;
    let rhs = p * d2z_dx2 + p_deriv * dz_dx - two_way.q_breve[i] * z1;
    let defect = (lhs - rhs).norm();
    Ok(defect / (1.0 + lhs.norm().max(rhs.norm())))
}

/// Relative residual of the kernel derivative law
/// `(J Pi* S^{-1})' = J (H1 J Pi* S^{-1} A + H0~ J Pi* S^{-1})` by central
/// finite differences at an interior node of invertibility.
pub fn kernel_derivative_residual(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    idx: usize,
) -> Result<f64> {
    let (a, j) = symmetric_data(path)?;
    if idx == 0 || idx + 1 >= path.len() {
        return Err(Error::Index(
            "kernel derivative residual needs an interior node".into(),
        ));
    }
    let k_prev = solution_kernel(path, j, idx - 1)?;
    let k_here = solution_kernel(path, j, idx)?;
    let k_next = solution_kernel(path, j, idx + 1)?;
    let dx = path.node(idx + 1)?.x - path.node(idx - 1)?.x;
    let dk = (&k_next - &k_prev).scale(re(1.0 / dx));

    let x = path.node(idx)?.x;
    let side = if x < 0.0 { Side::Minus } else { Side::Plus };
    let h1 = sys.eval_h1(x, side)?;
    let h0_t = transformed_h0(path, sys, idx, side)?;
    let rhs = j * &(&(&(&h1 * &k_here) * a) + &(&h0_t * &k_here));
    let defect = (&dk - &rhs).norm_fro();
    Ok(defect / (1.0 + dk.norm_fro().max(rhs.norm_fro())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::{propagate, GbdtTriple, GridSpec};
    use crate::matcore::c;
    use crate::systems::{pauli_j, CoefficientField, Interval, MatrixField};

    fn unit_interval() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn canonical_system() -> SystemCoefficients {
        SystemCoefficients::hamiltonian(
            pauli_j(),
            MatrixField::from_matrix(&ComplexMatrix::identity(2)),
            MatrixField::zeros(2, 2),
            unit_interval(),
        )
        .unwrap()
    }

    fn positive_triple() -> GbdtTriple {
        GbdtTriple::Symmetric {
            a: ComplexMatrix::from_rows(&[vec![c(0.5, -1.0)]]),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, 1.0)]]),
            j: pauli_j(),
        }
    }

    fn sign_weight_system() -> SystemCoefficients {
        SystemCoefficients::shin_zettl(
            CoefficientField::zero(),
            CoefficientField::zero(),
            CoefficientField::constant(1.0),
            CoefficientField::zero(),
            CoefficientField::sign(),
            unit_interval(),
        )
        .unwrap()
    }

    fn model_triple() -> GbdtTriple {
        GbdtTriple::Symmetric {
            a: ComplexMatrix::from_rows(&[vec![re(1.0)]]),
            s0: ComplexMatrix::zeros(1, 1),
            pi0: ComplexMatrix::from_rows(&[vec![c(0.0, -2.0), c(0.0, 1.0)]]),
            j: pauli_j(),
        }
    }

    #[test]
    fn zero_vector_gives_zero_solution() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 100).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let h = ComplexMatrix::zeros(1, 1);
        let indices: Vec<usize> = (0..path.len()).collect();
        let sol = dynamical_solution(&path, &h, &[0.0, 0.5, 1.0], &indices).unwrap();
        for row in &sol.samples {
            for z in row {
                assert_eq!(z.max_abs(), 0.0);
            }
        }
        assert_eq!(energy_formula(&path, &h, 0.3, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_generator_matrix_freezes_time() {
        // A = 0 with Pi0 J Pi0* = 0: exp(-tA) = I, so z is t-independent.
        let triple = GbdtTriple::Symmetric {
            a: ComplexMatrix::zeros(1, 1),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::from_rows(&[vec![c(0.0, -2.0), c(0.0, 1.0)]]),
            j: pauli_j(),
        };
        triple.validated().unwrap();
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 100).unwrap();
        let path = propagate(&triple, &sys, &grid).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![c(0.4, -0.2)]]);
        let indices: Vec<usize> = (0..path.len()).collect();
        let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
        let sol = dynamical_solution(&path, &h, &ts, &indices).unwrap();
        for i in (0..indices.len()).step_by(25) {
            for k in 1..ts.len() {
                let dt = (&sol.samples[k][i] - &sol.samples[0][i]).max_abs();
                assert!(dt <= 1e-10, "time drift {dt}");
            }
        }
    }

    #[test]
    fn dynamical_system_residual_is_small() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 1000).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![re(1.0)]]);
        let indices: Vec<usize> = (0..path.len()).collect();
        let ts: Vec<f64> = (0..21).map(|k| k as f64 * 1e-3).collect();
        let sol = dynamical_solution(&path, &h, &ts, &indices).unwrap();
        let residual = dynamical_residual(&sol, &path, &sys, 500, 10).unwrap();
        assert!(residual <= 1e-4, "residual {residual}");
    }

    #[test]
    fn kernel_derivative_law_holds_to_second_order() {
        let sys = canonical_system();
        let mut residuals = Vec::new();
        for steps in [250usize, 500] {
            let grid = GridSpec::new(0.0, 1.0, steps).unwrap();
            let path = propagate(&positive_triple(), &sys, &grid).unwrap();
            let idx = path.index_at(0.5).unwrap();
            residuals.push(kernel_derivative_residual(&path, &sys, idx).unwrap());
        }
        assert!(residuals[1] <= 1e-5);
        let order = (residuals[0] / residuals[1]).log2();
        assert!((1.8..=2.2).contains(&order), "order {order}");
    }

    #[test]
    fn energy_formula_matches_quadrature() {
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 2000).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![c(0.8, 0.3)]]);
        for &t in &[0.0, 0.5, 1.0] {
            let closed = energy_formula(&path, &h, t, 1.0).unwrap();
            let quad = energy_quadrature(&path, &sys, &h, t, 1.0).unwrap();
            let rel = (closed - quad).abs() / closed.max(1e-30);
            assert!(rel <= 1e-5, "t = {t}: closed {closed}, quad {quad}");
        }
    }

    #[test]
    fn energy_radicand_stays_nonnegative() {
        // H1 >= 0 and S0 = I force S(0)^{-1} - S(a)^{-1} >= 0 at all a.
        let sys = canonical_system();
        let grid = GridSpec::new(0.0, 1.0, 400).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        for idx in (1..=400).step_by(57) {
            let zero = path.node(path.zero_index()).unwrap();
            let end = path.node(idx).unwrap();
            let id = ComplexMatrix::identity(1);
            let gap = &matcore::solve(&zero.s, &id).unwrap() - &matcore::solve(&end.s, &id).unwrap();
            assert!(matcore::is_nonneg_definite(&gap, 1e-10));
        }
        // And the energy at a non-node endpoint errors out.
        let h = ComplexMatrix::identity(1);
        assert!(matches!(
            energy_formula(&path, &h, 0.0, 0.123456),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn energy_is_zero_without_kinetic_weight() {
        // H1 = 0 on the whole interval keeps S frozen, so the energy gap
        // vanishes for every t.
        let sys = SystemCoefficients::hamiltonian(
            pauli_j(),
            MatrixField::zeros(2, 2),
            MatrixField::from_matrix(&ComplexMatrix::diag(&[re(0.5), re(0.5)])),
            unit_interval(),
        )
        .unwrap();
        let grid = GridSpec::new(0.0, 1.0, 100).unwrap();
        let path = propagate(&positive_triple(), &sys, &grid).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![c(0.3, 0.1)]]);
        let energy = energy_formula(&path, &h, 0.7, 1.0).unwrap();
        assert!(energy <= 1e-12, "energy {energy}");
    }

    #[test]
    fn two_way_family_solves_the_diffusion_equation() {
        // Sign-weight model coefficients on [0.1, 1].
        let sys = sign_weight_system();
        let grid = GridSpec::new(-1.0, 1.0, 2000).unwrap();
        let path = propagate(&model_triple(), &sys, &grid).unwrap();
        let start = path.index_at(0.1).unwrap();
        let end = path.index_at(1.0).unwrap();
        let indices: Vec<usize> = (start..=end).collect();
        let h = ComplexMatrix::from_rows(&[vec![re(1.0)]]);
        let ts: Vec<f64> = (0..11).map(|k| k as f64 * 1e-3).collect();
        let two_way = two_way_solution(&path, &sys, &h, &ts, &indices).unwrap();
        let mid = indices.len() / 2;
        let residual = two_way_residual(&two_way, &sys, mid, 5).unwrap();
        assert!(residual <= 1e-3, "residual {residual}");
        // h = 0 keeps everything identically zero.
        let zero_h = ComplexMatrix::zeros(1, 1);
        let trivial = two_way_solution(&path, &sys, &zero_h, &ts, &indices).unwrap();
        let residual = two_way_residual(&trivial, &sys, mid, 5).unwrap();
        assert!(residual == 0.0);
    }

    #[test]
    fn zero_generator_reduces_to_plain_diffusion_potential() {
        // Zero generator: X = 0, so q_breve = q.
        let sys = sign_weight_system();
        let triple = GbdtTriple::Symmetric {
            a: ComplexMatrix::identity(1),
            s0: ComplexMatrix::identity(1),
            pi0: ComplexMatrix::zeros(1, 2),
            j: pauli_j(),
        };
        let grid = GridSpec::new(-1.0, 1.0, 200).unwrap();
        let path = propagate(&triple, &sys, &grid).unwrap();
        let indices: Vec<usize> = (path.index_at(0.25).unwrap()..path.len()).collect();
        let h = ComplexMatrix::from_rows(&[vec![re(1.0)]]);
        let two_way = two_way_solution(&path, &sys, &h, &[0.0, 0.1], &indices).unwrap();
        for q in &two_way.q_breve {
            assert!(q.abs() < 1e-12);
        }
    }

    #[test]
    fn general_mode_paths_are_rejected() {
        let sys = canonical_system();
        let triple = GbdtTriple::General {
            a1: ComplexMatrix::identity(1),
            a2: ComplexMatrix::identity(1),
            s0: ComplexMatrix::identity(1),
            pi1_0: ComplexMatrix::zeros(1, 2),
            pi2_0: ComplexMatrix::zeros(1, 2),
        };
        let grid = GridSpec::new(0.0, 1.0, 50).unwrap();
        let path = propagate(&triple, &sys, &grid).unwrap();
        let h = ComplexMatrix::identity(1);
        assert!(matches!(
            dynamical_solution(&path, &h, &[0.0], &[0]),
            Err(Error::Usage(_))
        ));
    }
}
