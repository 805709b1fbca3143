//! The GBDT engine: parameter triples, propagation of the generator data
//! along x, Darboux matrices and transformed coefficients.
//!
//! A transformation is determined by parameter matrices satisfying a
//! Sylvester-type identity. In the general mode these are
//! `A1, A2, S(0), Pi1(0), Pi2(0)` with
//!
//! ```text
//! A1 S(0) - S(0) A2 = Pi1(0) Pi2(0)*
//! ```
//!
//! and the generator data evolves by
//!
//! ```text
//! Pi1' = A1 Pi1 Q1 + Pi1 Q0,   (Pi2*)' = -Q1 Pi2* A2 - Q0 Pi2*,
//! S'   = Pi1 Q1 Pi2*.
//! ```
//!
//! The symmetric mode takes `A, S(0) = S(0)*, Pi(0)` with the skew-adjoint
//! `J` of the system, sets `A1 = A`, `A2 = A*`, `Pi2 = -Pi J`, and evolves
//!
//! ```text
//! Pi' = -A Pi J H1 - Pi J H0,   S' = Pi J H1 J* Pi*.
//! ```
//!
//! Propagation is classical fixed-step RK4 on a grid that always contains 0
//! and sweeps outward in both directions. The identity residual is monitored
//! at every node and never re-projected; drift beyond tolerance is an error
//! asking for a finer grid.

use crate::error::{Error, Result};
use crate::matcore::{self, re, ComplexMatrix};
use crate::systems::{Dialect, Side, SystemCoefficients};
use num_complex::Complex64;

/// Default bound on the relative identity residual along the path.
pub const IDENTITY_TOL: f64 = 1e-7;
/// Nodes with a larger 1-norm condition estimate of `S(x)` are treated as
/// points of non-invertibility.
pub const COND_LIMIT: f64 = 1e12;
/// Hermiticity drift bound for `S(x)` in symmetric mode.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Condition bound past which a resolvent `(A - lambda I)^{-1}` is treated
/// as singular (lambda numerically in the spectrum).
const RESOLVENT_COND_LIMIT: f64 = 1e14;

/// Parameter matrices of a GBDT transformation.
#[derive(Debug, Clone)]
pub enum GbdtTriple {
    /// Five-matrix data for a general first-order system.
    General {
        a1: ComplexMatrix,
        a2: ComplexMatrix,
        s0: ComplexMatrix,
        pi1_0: ComplexMatrix,
        pi2_0: ComplexMatrix,
    },
    /// Reduced data for systems with a skew-adjoint carrier `J`.
    Symmetric {
        a: ComplexMatrix,
        s0: ComplexMatrix,
        pi0: ComplexMatrix,
        j: ComplexMatrix,
    },
}

/// Outcome of validating a triple: the absolute and relative residuals of
/// the defining identity.
#[derive(Debug, Clone, Copy)]
pub struct TripleValidation {
    pub residual: f64,
    pub relative: f64,
    pub tol: f64,
    pub valid: bool,
}

impl GbdtTriple {
    /// Generator dimension n.
    pub fn n(&self) -> usize {
        match self {
            GbdtTriple::General { a1, .. } => a1.rows(),
            GbdtTriple::Symmetric { a, .. } => a.rows(),
        }
    }

    /// System dimension m.
    pub fn m(&self) -> usize {
        match self {
            GbdtTriple::General { pi1_0, .. } => pi1_0.cols(),
            GbdtTriple::Symmetric { pi0, .. } => pi0.cols(),
        }
    }

    fn check_dimensions(&self) -> Result<()> {
        let n = self.n();
        let m = self.m();
        match self {
            GbdtTriple::General {
                a1,
                a2,
                s0,
                pi1_0,
                pi2_0,
            } => {
                a1.require_shape(n, n, "GbdtTriple A1")?;
                a2.require_shape(n, n, "GbdtTriple A2")?;
                s0.require_shape(n, n, "GbdtTriple S0")?;
                pi1_0.require_shape(n, m, "GbdtTriple Pi1(0)")?;
                pi2_0.require_shape(n, m, "GbdtTriple Pi2(0)")?;
            }
            GbdtTriple::Symmetric { a, s0, pi0, j } => {
                a.require_shape(n, n, "GbdtTriple A")?;
                s0.require_shape(n, n, "GbdtTriple S0")?;
                pi0.require_shape(n, m, "GbdtTriple Pi(0)")?;
                j.require_shape(m, m, "GbdtTriple J")?;
            }
        }
        Ok(())
    }

    /// Left-hand-side minus right-hand-side of the defining identity at a
    /// given `(S, Pi1, Pi2)` snapshot.
    fn identity_defect(&self, s: &ComplexMatrix, pi1: &ComplexMatrix, pi2: &ComplexMatrix) -> ComplexMatrix {
        let (a1, a2) = self.generator_pair();
        &(&(&a1 * s) - &(s * &a2)) - &(pi1 * &pi2.adjoint())
    }

    /// `(A1, A2)` in both modes (`A2 = A*` in the symmetric one).
    pub fn generator_pair(&self) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            GbdtTriple::General { a1, a2, .. } => (a1.clone(), a2.clone()),
            GbdtTriple::Symmetric { a, .. } => (a.clone(), a.adjoint()),
        }
    }

    /// Initial `(S, Pi1, Pi2)` data.
    pub fn initial_state(&self) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        match self {
            GbdtTriple::General {
                s0, pi1_0, pi2_0, ..
            } => (s0.clone(), pi1_0.clone(), pi2_0.clone()),
            GbdtTriple::Symmetric { s0, pi0, j, .. } => {
                (s0.clone(), pi0.clone(), (&-&(pi0 * j)).clone())
            }
        }
    }

    /// Checks the defining matrix identity with the relative tolerance
    /// 1e-10, plus Hermiticity of `S(0)` in symmetric mode.
    pub fn validate(&self) -> Result<TripleValidation> {
        self.check_dimensions()?;
        if let GbdtTriple::Symmetric { s0, j, .. } = self {
            if (s0 - &s0.adjoint()).norm_fro() > 1e-12 * (1.0 + s0.norm_fro()) {
                return Err(Error::InvariantViolation(
                    "symmetric-mode S(0) must be Hermitian".into(),
                ));
            }
            if (j + &j.adjoint()).max_abs() != 0.0 {
                return Err(Error::InvariantViolation(
                    "symmetric-mode J must satisfy J* = -J exactly".into(),
                ));
            }
        }
        let (s0, pi1, pi2) = self.initial_state();
        let defect = self.identity_defect(&s0, &pi1, &pi2);
        let (a1, a2) = self.generator_pair();
        let scale = 1.0
            + (&a1 * &s0)
                .norm_fro()
                .max((&s0 * &a2).norm_fro())
                .max((&pi1 * &pi2.adjoint()).norm_fro());
        let residual = defect.norm_fro();
        let relative = residual / scale;
        let tol = 1e-10;
        Ok(TripleValidation {
            residual,
            relative,
            tol,
            valid: relative <= tol,
        })
    }

    /// Like [`validate`](Self::validate) but turns an identity violation
    /// into an error.
    pub fn validated(&self) -> Result<TripleValidation> {
        let report = self.validate()?;
        if !report.valid {
            return Err(Error::TripleIdentity {
                residual: report.residual,
                relative: report.relative,
            });
        }
        Ok(report)
    }
}

/// Uniform-per-side grid specification on `[x_min, x_max]` with 0 as a node.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, steps: usize) -> Result<Self> {
        if !(x_min <= 0.0 && 0.0 <= x_max && x_min < x_max) || steps == 0 {
            return Err(Error::Usage(format!(
                "grid [{x_min}, {x_max}] with {steps} steps must contain 0 and have steps >= 1"
            )));
        }
        Ok(Self { x_min, x_max, steps })
    }

    /// Ascending node list; 0 is always a node, steps are split between the
    /// two sides proportionally to their lengths.
    pub fn nodes(&self) -> Vec<f64> {
        let span = self.x_max - self.x_min;
        let mut steps_pos = if self.x_max > 0.0 {
            ((self.steps as f64) * self.x_max / span).round() as usize
        } else {
            0
        };
        if self.x_max > 0.0 {
            steps_pos = steps_pos.clamp(1, self.steps);
        }
        let mut steps_neg = self.steps - steps_pos;
        if self.x_min < 0.0 && steps_neg == 0 {
            steps_neg = 1;
            steps_pos = self.steps - 1;
        }
        let mut nodes = Vec::with_capacity(steps_neg + steps_pos + 1);
        for k in (1..=steps_neg).rev() {
            nodes.push(self.x_min * k as f64 / steps_neg as f64);
        }
        nodes.push(0.0);
        for k in 1..=steps_pos {
            nodes.push(self.x_max * k as f64 / steps_pos as f64);
        }
        nodes
    }
}

/// Tolerances governing propagation.
#[derive(Debug, Clone, Copy)]
pub struct PropagationOptions {
    pub identity_tol: f64,
    pub cond_limit: f64,
    pub hermiticity_tol: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            identity_tol: IDENTITY_TOL,
            cond_limit: COND_LIMIT,
            hermiticity_tol: HERMITICITY_TOL,
        }
    }
}

/// Per-node record of the propagated generator data.
#[derive(Debug, Clone)]
pub struct PathNode {
    pub x: f64,
    pub pi1: ComplexMatrix,
    pub pi2: ComplexMatrix,
    pub s: ComplexMatrix,
    /// Relative residual of the matrix identity at this node.
    pub identity_residual: f64,
    /// 1-norm condition estimate of `S(x)` (infinite when exactly singular).
    pub s_cond: f64,
    pub s_invertible: bool,
    /// `X(x) = Pi2* S^{-1} Pi1`, present at points of invertibility only.
    pub x_matrix: Option<ComplexMatrix>,
}

/// Mode-level data a path carries along.
#[derive(Debug, Clone)]
pub enum PathMode {
    General { a1: ComplexMatrix, a2: ComplexMatrix },
    Symmetric { a: ComplexMatrix, j: ComplexMatrix },
}

/// The propagated generator data on a grid.
#[derive(Debug, Clone)]
pub struct DarbouxPath {
    mode: PathMode,
    nodes: Vec<PathNode>,
    zero_index: usize,
    m: usize,
}

impl DarbouxPath {
    pub fn mode(&self) -> &PathMode {
        &self.mode
    }

    pub fn nodes(&self) -> &[PathNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> Result<&PathNode> {
        self.nodes
            .get(idx)
            .ok_or_else(|| Error::Index(format!("node {idx} out of 0..{}", self.nodes.len())))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node at x = 0.
    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        match &self.mode {
            PathMode::General { a1, .. } => a1.rows(),
            PathMode::Symmetric { a, .. } => a.rows(),
        }
    }

    /// `(A1, A2)` of the owning triple.
    pub fn generator_pair(&self) -> (ComplexMatrix, ComplexMatrix) {
        match &self.mode {
            PathMode::General { a1, a2 } => (a1.clone(), a2.clone()),
            PathMode::Symmetric { a, .. } => (a.clone(), a.adjoint()),
        }
    }

    /// Node index whose x-coordinate matches `x` up to 1e-12.
    pub fn index_at(&self, x: f64) -> Result<usize> {
        self.nodes
            .iter()
            .position(|node| (node.x - x).abs() <= 1e-12)
            .ok_or_else(|| Error::Index(format!("x = {x} is not a grid node")))
    }

    /// Largest relative identity residual over the whole path.
    pub fn max_identity_residual(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.identity_residual)
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// RK4 machinery
// ---------------------------------------------------------------------------

/// State that can be linearly combined for Runge-Kutta stages.
trait Rk4State: Clone {
    /// `self + sum_i c_i k_i`.
    fn combine(&self, terms: &[(f64, &Self)]) -> Self;
}

impl Rk4State for ComplexMatrix {
    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = self.clone();
        for &(coef, k) in terms {
            out = &out + &k.scale(re(coef));
        }
        out
    }
}

impl<A: Rk4State, B: Rk4State> Rk4State for (A, B) {
    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let first: Vec<(f64, &A)> = terms.iter().map(|&(c, k)| (c, &k.0)).collect();
        let second: Vec<(f64, &B)> = terms.iter().map(|&(c, k)| (c, &k.1)).collect();
        (self.0.combine(&first), self.1.combine(&second))
    }
}

impl<A: Rk4State, B: Rk4State, C: Rk4State> Rk4State for (A, B, C) {
    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let first: Vec<(f64, &A)> = terms.iter().map(|&(c, k)| (c, &k.0)).collect();
        let second: Vec<(f64, &B)> = terms.iter().map(|&(c, k)| (c, &k.1)).collect();
        let third: Vec<(f64, &C)> = terms.iter().map(|&(c, k)| (c, &k.2)).collect();
        (
            self.0.combine(&first),
            self.1.combine(&second),
            self.2.combine(&third),
        )
    }
}

/// One classical RK4 step from `x0` to `x1`.
///
/// Endpoint stages are evaluated with one-sided limits pointing into the
/// cell, so that step coefficients on a cell bounded by exceptional points
/// stay consistent with the cell interior.
fn rk4_step<St: Rk4State>(
    deriv: &mut impl FnMut(f64, &St, Side) -> Result<St>,
    x0: f64,
    x1: f64,
    state: &St,
) -> Result<St> {
    let h = x1 - x0;
    let (side_start, side_end) = if h >= 0.0 {
        (Side::Plus, Side::Minus)
    } else {
        (Side::Minus, Side::Plus)
    };
    let mid = 0.5 * (x0 + x1);
    let k1 = deriv(x0, state, side_start)?;
    let s2 = state.combine(&[(h / 2.0, &k1)]);
    let k2 = deriv(mid, &s2, side_start)?;
    let s3 = state.combine(&[(h / 2.0, &k2)]);
    let k3 = deriv(mid, &s3, side_start)?;
    let s4 = state.combine(&[(h, &k3)]);
    let k4 = deriv(x1, &s4, side_end)?;
    Ok(state.combine(&[
        (h / 6.0, &k1),
        (h / 3.0, &k2),
        (h / 3.0, &k3),
        (h / 6.0, &k4),
    ]))
}

/// Integrates `y' = F(x, lambda) y` node-to-node along `xs` (ascending or
/// descending), returning the solution at every node. `y0` applies at
/// `xs[0]` and may have any number of columns.
pub fn integrate_solution(
    sys: &SystemCoefficients,
    lambda: Complex64,
    y0: &ComplexMatrix,
    xs: &[f64],
) -> Result<Vec<ComplexMatrix>> {
    if y0.rows() != sys.m() {
        return Err(Error::Dimension {
            op: "integrate_solution",
            expected: format!("{} rows", sys.m()),
            got: format!("{}", y0.rows()),
        });
    }
    let mut deriv = |x: f64, y: &ComplexMatrix, side: Side| -> Result<ComplexMatrix> {
        Ok(&sys.eval_f_side(x, lambda, side)? * y)
    };
    let mut out = Vec::with_capacity(xs.len());
    out.push(y0.clone());
    for k in 1..xs.len() {
        let next = rk4_step(&mut deriv, xs[k - 1], xs[k], &out[k - 1])?;
        out.push(next);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

/// Propagates a validated triple along the grid with default tolerances.
pub fn propagate(
    triple: &GbdtTriple,
    sys: &SystemCoefficients,
    grid: &GridSpec,
) -> Result<DarbouxPath> {
    propagate_with(triple, sys, grid, &PropagationOptions::default())
}

/// Propagates a validated triple along the grid.
pub fn propagate_with(
    triple: &GbdtTriple,
    sys: &SystemCoefficients,
    grid: &GridSpec,
    opts: &PropagationOptions,
) -> Result<DarbouxPath> {
    triple.validated()?;
    if triple.m() != sys.m() {
        return Err(Error::Usage(format!(
            "triple has m = {}, system has m = {}",
            triple.m(),
            sys.m()
        )));
    }
    let interval = sys.interval();
    if grid.x_min < interval.x_min || grid.x_max > interval.x_max {
        return Err(Error::Usage(
            "grid extends beyond the system interval".into(),
        ));
    }

    let mode = match triple {
        GbdtTriple::General { a1, a2, .. } => PathMode::General {
            a1: a1.clone(),
            a2: a2.clone(),
        },
        GbdtTriple::Symmetric { a, j, .. } => {
            // The carrier of the system must match the triple's J.
            let sys_j = sys.symmetric_j().ok_or_else(|| {
                Error::Usage(
                    "symmetric-mode propagation needs a Hamiltonian or Lagrange-symmetric system"
                        .into(),
                )
            })?;
            if (&sys_j - j).max_abs() != 0.0 {
                return Err(Error::Usage(
                    "triple J differs from the system carrier J".into(),
                ));
            }
            PathMode::Symmetric {
                a: a.clone(),
                j: j.clone(),
            }
        }
    };

    let xs = grid.nodes();
    let zero_index = xs
        .iter()
        .position(|&x| x == 0.0)
        .expect("grid always contains 0");

    // States indexed like xs; filled by the two outward sweeps.
    let mut states: Vec<Option<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>> =
        vec![None; xs.len()];
    let (s0, pi1_0, pi2_0) = triple.initial_state();
    states[zero_index] = Some((pi1_0, pi2_0.adjoint(), s0));

    match &mode {
        PathMode::General { a1, a2 } => {
            let mut deriv = |x: f64,
                             st: &(ComplexMatrix, ComplexMatrix, ComplexMatrix),
                             side: Side|
             -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
                let q1 = sys.eval_q1(x, side)?;
                let q0 = sys.eval_q0(x, side)?;
                let (pi1, pi2s, _) = st;
                let d_pi1 = &(&(a1 * pi1) * &q1) + &(pi1 * &q0);
                let d_pi2s = &-&(&(&q1 * pi2s) * a2) - &(&q0 * pi2s);
                let d_s = &(pi1 * &q1) * pi2s;
                Ok((d_pi1, d_pi2s, d_s))
            };
            sweep(&mut states, &xs, zero_index, &mut deriv)?;
        }
        PathMode::Symmetric { a, j } => {
            let mut deriv = |x: f64,
                             st: &(ComplexMatrix, ComplexMatrix, ComplexMatrix),
                             side: Side|
             -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
                let h1 = sys.eval_h1(x, side)?;
                let h0 = sys.eval_h0(x, side)?;
                let (pi, _, _) = st;
                let pi_j = pi * j;
                let d_pi = &-&(&(a * &pi_j) * &h1) - &(&pi_j * &h0);
                let d_s = &(&pi_j * &h1) * &pi_j.adjoint();
                // The Pi2* component tracks J Pi* exactly.
                let d_pi2s = (&-&(&d_pi * j)).adjoint();
                Ok((d_pi, d_pi2s, d_s))
            };
            sweep(&mut states, &xs, zero_index, &mut deriv)?;
        }
    }

    // Per-node diagnostics.
    let symmetric = matches!(mode, PathMode::Symmetric { .. });
    let mut nodes = Vec::with_capacity(xs.len());
    for (idx, &x) in xs.iter().enumerate() {
        let (pi1, pi2s, s) = states[idx].take().expect("both sweeps cover every node");
        let pi2 = pi2s.adjoint();
        let defect = triple.identity_defect(&s, &pi1, &pi2);
        let identity_residual = defect.norm_fro() / (1.0 + s.norm_fro());
        if identity_residual > opts.identity_tol {
            return Err(Error::PropagationDrift {
                x,
                residual: identity_residual,
                tol: opts.identity_tol,
            });
        }
        if symmetric {
            let herm = (&s - &s.adjoint()).norm_fro();
            if herm > opts.hermiticity_tol * (1.0 + s.norm_fro()) {
                return Err(Error::InvariantViolation(format!(
                    "S({x}) lost Hermiticity: deviation {herm:e}"
                )));
            }
        }
        let (s_cond, x_matrix) = match matcore::solve_with_cond(&s, &pi1) {
            Ok((s_inv_pi1, cond)) => {
                if cond <= opts.cond_limit {
                    let x_mat = &pi2s * &s_inv_pi1;
                    if x_mat.is_finite() {
                        (cond, Some(x_mat))
                    } else {
                        (f64::INFINITY, None)
                    }
                } else {
                    (cond, None)
                }
            }
            Err(_) => (f64::INFINITY, None),
        };
        let s_invertible = x_matrix.is_some();
        nodes.push(PathNode {
            x,
            pi1,
            pi2,
            s,
            identity_residual,
            s_cond,
            s_invertible,
            x_matrix,
        });
    }

    Ok(DarbouxPath {
        mode,
        nodes,
        zero_index,
        m: triple.m(),
    })
}

/// Runs the outward RK4 sweeps from the zero node.
fn sweep(
    states: &mut [Option<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>],
    xs: &[f64],
    zero_index: usize,
    deriv: &mut impl FnMut(
        f64,
        &(ComplexMatrix, ComplexMatrix, ComplexMatrix),
        Side,
    ) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>,
) -> Result<()> {
    for idx in zero_index + 1..xs.len() {
        let prev = states[idx - 1].clone().expect("previous node filled");
        states[idx] = Some(rk4_step(deriv, xs[idx - 1], xs[idx], &prev)?);
    }
    for idx in (0..zero_index).rev() {
        let prev = states[idx + 1].clone().expect("previous node filled");
        states[idx] = Some(rk4_step(deriv, xs[idx + 1], xs[idx], &prev)?);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Darboux matrix and derived quantities
// ---------------------------------------------------------------------------

/// `X(x) = Pi2(x)* S(x)^{-1} Pi1(x)` at a node of invertibility.
pub fn x_matrix(path: &DarbouxPath, idx: usize) -> Result<ComplexMatrix> {
    let node = path.node(idx)?;
    node.x_matrix.clone().ok_or(Error::SingularNode {
        x: node.x,
        cond: node.s_cond,
    })
}

/// The Darboux matrix `w_A(x, lambda) = I - Pi2* S^{-1} (A1 - lambda I)^{-1} Pi1`.
pub fn darboux_matrix(path: &DarbouxPath, idx: usize, lambda: Complex64) -> Result<ComplexMatrix> {
    let node = path.node(idx)?;
    if !node.s_invertible {
        return Err(Error::SingularNode {
            x: node.x,
            cond: node.s_cond,
        });
    }
    let (a1, _) = path.generator_pair();
    let n = a1.rows();
    let shifted = &a1 - &ComplexMatrix::identity(n).scale(lambda);
    let resolvent_pi1 = match matcore::solve_with_cond(&shifted, &node.pi1) {
        Ok((r, cond)) if cond <= RESOLVENT_COND_LIMIT => r,
        Ok((_, cond)) => return Err(Error::ResolventSingular { lambda, cond }),
        Err(Error::Singular { .. }) => {
            return Err(Error::ResolventSingular {
                lambda,
                cond: f64::INFINITY,
            })
        }
        Err(e) => return Err(e),
    };
    let s_inv_part = matcore::solve(&node.s, &resolvent_pi1)?;
    Ok(&ComplexMatrix::identity(path.m()) - &(&node.pi2.adjoint() * &s_inv_part))
}

/// Residual of the intertwining equation
/// `d/dx w_A = F~ w_A - w_A F` at an interior node, with the x-derivative
/// taken by central finite differences on the grid. The value is relative,
/// normalised by `1 + max(norms of the three terms)`; second-order accurate
/// in the grid spacing.
pub fn intertwining_residual(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    lambda: Complex64,
    idx: usize,
) -> Result<f64> {
    if idx == 0 || idx + 1 >= path.len() {
        return Err(Error::Index(format!(
            "intertwining residual needs an interior node, got {idx} of {}",
            path.len()
        )));
    }
    let node = path.node(idx)?;
    let w_prev = darboux_matrix(path, idx - 1, lambda)?;
    let w_here = darboux_matrix(path, idx, lambda)?;
    let w_next = darboux_matrix(path, idx + 1, lambda)?;
    let dx = path.node(idx + 1)?.x - path.node(idx - 1)?.x;
    let dw = (&w_next - &w_prev).scale(re(1.0 / dx));

    let side = if node.x < 0.0 { Side::Minus } else { Side::Plus };
    let f = sys.eval_f_side(node.x, lambda, side)?;
    let f_t = transformed_f(path, sys, idx, lambda, side)?;
    let lhs_terms = &f_t * &w_here;
    let rhs_terms = &w_here * &f;
    let defect = (&dw - &(&lhs_terms - &rhs_terms)).norm_fro();
    let scale = 1.0
        + dw.norm_fro()
            .max(lhs_terms.norm_fro())
            .max(rhs_terms.norm_fro());
    Ok(defect / scale)
}

/// Transformed system matrix `F~(x, lambda) = -(lambda Q1 + Q0~)` with
/// `Q0~ = Q0 - (Q1 X - X Q1)` evaluated at a node of invertibility.
pub fn transformed_f(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    idx: usize,
    lambda: Complex64,
    side: Side,
) -> Result<ComplexMatrix> {
    let node = path.node(idx)?;
    let x_mat = x_matrix(path, idx)?;
    let q1 = sys.eval_q1(node.x, side)?;
    let q0 = sys.eval_q0(node.x, side)?;
    let q0_t = &q0 - &(&(&q1 * &x_mat) - &(&x_mat * &q1));
    Ok(&q1.scale(-lambda) - &q0_t)
}

/// Transformed coefficients at one node, in the dialect of the input
/// system. A Sturm-Liouville input transforms in its first-order
/// (Shin-Zettl) carrier, where the shear terms become nonzero; the
/// second-order potential is the business of
/// [`transformed_sl_potential`].
#[derive(Debug, Clone)]
pub enum TransformedSample {
    General {
        q0: ComplexMatrix,
    },
    Hamiltonian {
        h0: ComplexMatrix,
    },
    ShinZettl {
        r1: Complex64,
        r2: Complex64,
        q: Complex64,
    },
}

/// Transformed coefficients at node `idx`.
pub fn transform_coefficients_at(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    idx: usize,
) -> Result<TransformedSample> {
    if path.m() != sys.m() {
        return Err(Error::Usage(format!(
            "path carries m = {}, system has m = {}",
            path.m(),
            sys.m()
        )));
    }
    let node = path.node(idx)?;
    let side = if node.x < 0.0 { Side::Minus } else { Side::Plus };
    match sys.dialect() {
        Dialect::General { .. } => {
            let x_mat = x_matrix(path, idx)?;
            let q1 = sys.eval_q1(node.x, side)?;
            let q0 = sys.eval_q0(node.x, side)?;
            Ok(TransformedSample::General {
                q0: &q0 - &(&(&q1 * &x_mat) - &(&x_mat * &q1)),
            })
        }
        Dialect::Hamiltonian { .. } => {
            let PathMode::Symmetric { j, .. } = path.mode() else {
                return Err(Error::Usage(
                    "Hamiltonian coefficient transform needs a symmetric-mode path".into(),
                ));
            };
            if !node.s_invertible {
                return Err(Error::SingularNode {
                    x: node.x,
                    cond: node.s_cond,
                });
            }
            let h1 = sys.eval_h1(node.x, side)?;
            let h0 = sys.eval_h0(node.x, side)?;
            // P = Pi* S^{-1} Pi is Hermitian; H0~ = H0 + P J H1 + H1 J* P.
            let s_inv_pi = matcore::solve(&node.s, &node.pi1)?;
            let p = &node.pi1.adjoint() * &s_inv_pi;
            let z = &(&(&p * j) * &h1) + &(&(&h1 * &j.adjoint()) * &p);
            let h0_t = &h0 + &z;
            if !matcore::is_hermitian(&h0_t, 1e-9) {
                return Err(Error::InvariantViolation(format!(
                    "transformed H0 at x = {} is not Hermitian",
                    node.x
                )));
            }
            Ok(TransformedSample::Hamiltonian { h0: h0_t })
        }
        Dialect::ShinZettl {
            r1, r2, q, omega, ..
        } => {
            let x_mat = x_matrix(path, idx)?;
            let w = omega.eval_side(node.x, side)?;
            Ok(TransformedSample::ShinZettl {
                r1: r1.eval_side(node.x, side)? - w * x_mat[(0, 1)],
                r2: r2.eval_side(node.x, side)? + w * x_mat[(0, 1)],
                q: q.eval_side(node.x, side)? + w * (x_mat[(0, 0)] - x_mat[(1, 1)]),
            })
        }
        Dialect::SturmLiouville { q, omega, .. } => {
            let x_mat = x_matrix(path, idx)?;
            let w = omega.eval_side(node.x, side)?;
            Ok(TransformedSample::ShinZettl {
                r1: -w * x_mat[(0, 1)],
                r2: w * x_mat[(0, 1)],
                q: q.eval_side(node.x, side)? + w * (x_mat[(0, 0)] - x_mat[(1, 1)]),
            })
        }
    }
}

/// Transformed coefficients at every node of invertibility.
pub fn transform_coefficients(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
) -> Result<Vec<(f64, TransformedSample)>> {
    let mut out = Vec::new();
    for idx in 0..path.len() {
        if !path.node(idx)?.s_invertible {
            continue;
        }
        out.push((path.node(idx)?.x, transform_coefficients_at(path, sys, idx)?));
    }
    Ok(out)
}

/// One sample of the transformed Sturm-Liouville potential.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSample {
    pub x: f64,
    pub q_breve: f64,
}

fn sl_fields(sys: &SystemCoefficients) -> Result<SlFieldView<'_>> {
    match sys.dialect() {
        Dialect::SturmLiouville { p, q, omega } => Ok(SlFieldView {
            p: p.clone(),
            q,
            omega,
        }),
        Dialect::ShinZettl {
            r1,
            r2,
            p_inv,
            q,
            omega,
        } => {
            // Accept the first-order carrier when the shears vanish
            // structurally.
            let zero = |f: &crate::systems::CoefficientField| {
                matches!(f, crate::systems::CoefficientField::Constant(v) if v.norm() == 0.0)
            };
            if !(zero(r1) && zero(r2)) {
                return Err(Error::Dialect(
                    "transformed potential needs r = 0 (Sturm-Liouville form)".into(),
                ));
            }
            Ok(SlFieldView {
                p: match p_inv {
                    crate::systems::CoefficientField::Constant(v) => {
                        crate::systems::CoefficientField::Constant(re(1.0) / v)
                    }
                    crate::systems::CoefficientField::Reciprocal(inner) => (**inner).clone(),
                    other => crate::systems::CoefficientField::Reciprocal(Box::new(other.clone())),
                },
                q,
                omega,
            })
        }
        _ => Err(Error::Dialect(
            "transformed potential needs a Sturm-Liouville-type system".into(),
        )),
    }
}

struct SlFieldView<'a> {
    p: crate::systems::CoefficientField,
    q: &'a crate::systems::CoefficientField,
    omega: &'a crate::systems::CoefficientField,
}

/// The transformed Sturm-Liouville potential
/// `q_breve = q + 2 w (X11 - X22) + 2 p (w X12)^2 - (p w)' X12`
/// sampled at the nodes of invertibility. The coefficients must be real
/// (Lagrange-symmetric data) and the imaginary part of the result is
/// checked against 1e-9 before being dropped.
pub fn transformed_sl_potential(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
) -> Result<Vec<PotentialSample>> {
    if !sys.lagrange_symmetric() {
        return Err(Error::Dialect(
            "transformed potential needs real (Lagrange-symmetric) coefficients".into(),
        ));
    }
    let fields = sl_fields(sys)?;
    let mut out = Vec::new();
    for idx in 0..path.len() {
        let node = path.node(idx)?;
        if !node.s_invertible {
            continue;
        }
        let q_breve = sl_potential_at(path, &fields, idx)?;
        let scale = 1.0 + q_breve.norm();
        if q_breve.im.abs() > 1e-9 * scale {
            return Err(Error::InvariantViolation(format!(
                "Im(q_breve) = {:e} at x = {}",
                q_breve.im, node.x
            )));
        }
        out.push(PotentialSample {
            x: node.x,
            q_breve: q_breve.re,
        });
    }
    Ok(out)
}

/// The transformed potential at a single node of invertibility, with the
/// same realness guard as [`transformed_sl_potential`].
pub fn transformed_sl_potential_at(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    idx: usize,
) -> Result<f64> {
    if !sys.lagrange_symmetric() {
        return Err(Error::Dialect(
            "transformed potential needs real (Lagrange-symmetric) coefficients".into(),
        ));
    }
    let fields = sl_fields(sys)?;
    let q_breve = sl_potential_at(path, &fields, idx)?;
    if q_breve.im.abs() > 1e-9 * (1.0 + q_breve.norm()) {
        return Err(Error::InvariantViolation(format!(
            "Im(q_breve) = {:e} at node {idx}",
            q_breve.im
        )));
    }
    Ok(q_breve.re)
}

fn sl_potential_at(path: &DarbouxPath, fields: &SlFieldView, idx: usize) -> Result<Complex64> {
    let node = path.node(idx)?;
    let side = if node.x < 0.0 { Side::Minus } else { Side::Plus };
    let x_mat = x_matrix(path, idx)?;
    let x = node.x;
    let p = fields.p.eval_side(x, side)?;
    let q = fields.q.eval_side(x, side)?;
    let w = fields.omega.eval_side(x, side)?;
    // (p w)' = p' w + p w' from the analytic catalog derivatives.
    let pw_deriv = fields.p.eval_deriv(x, side)? * w + p * fields.omega.eval_deriv(x, side)?;
    let x11 = x_mat[(0, 0)];
    let x12 = x_mat[(0, 1)];
    let x22 = x_mat[(1, 1)];
    Ok(q + 2.0 * w * (x11 - x22) + 2.0 * p * (w * x12) * (w * x12) - pw_deriv * x12)
}

/// Chain-form evaluation of the transformed potential which replaces the
/// algebraic derivative identity for `X12'` by a central finite difference
/// on the grid. Used as an independent cross-check of
/// [`transformed_sl_potential`]; the two agree up to the O(h^2) error of
/// the difference quotient.
pub fn sl_potential_chain_form(
    path: &DarbouxPath,
    sys: &SystemCoefficients,
    idx: usize,
) -> Result<f64> {
    if idx == 0 || idx + 1 >= path.len() {
        return Err(Error::Index(
            "chain-form potential needs an interior node".into(),
        ));
    }
    let fields = sl_fields(sys)?;
    let node = path.node(idx)?;
    let side = if node.x < 0.0 { Side::Minus } else { Side::Plus };
    let x_mat = x_matrix(path, idx)?;
    let x12_prev = x_matrix(path, idx - 1)?[(0, 1)];
    let x12_next = x_matrix(path, idx + 1)?[(0, 1)];
    let dx = path.node(idx + 1)?.x - path.node(idx - 1)?.x;
    let x12_deriv = (x12_next - x12_prev) / dx;

    let x = node.x;
    let p = fields.p.eval_side(x, side)?;
    let q = fields.q.eval_side(x, side)?;
    let w = fields.omega.eval_side(x, side)?;
    let pw_deriv = fields.p.eval_deriv(x, side)? * w + p * fields.omega.eval_deriv(x, side)?;
    let x11 = x_mat[(0, 0)];
    let x12 = x_mat[(0, 1)];
    let x22 = x_mat[(1, 1)];
    let q_breve =
        q + w * (x11 - x22) + p * (w * x12) * (w * x12) - pw_deriv * x12 - p * w * x12_deriv;
    Ok(q_breve.re)
}

// ---------------------------------------------------------------------------
// Gauge normalisation
// ---------------------------------------------------------------------------

/// One node of the gauge-normalised transformation.
#[derive(Debug, Clone)]
pub struct GaugeSample {
    pub x: f64,
    pub w_hat: ComplexMatrix,
    pub h1_hat: ComplexMatrix,
    pub h0_hat: ComplexMatrix,
    /// Relative deviation of `w_hat J w_hat*` from `J`.
    pub symplectic_residual: f64,
}

/// Gauge normalisation for systems with invertible `J`: integrates
/// `w_hat' = -w_hat J Z`, `w_hat(0) = I` jointly with the generator data
/// and returns `w_hat` together with the conjugated coefficients
/// `H1^ = J^{-1} w_hat J H1 J* w_hat* (J*)^{-1}` (same for `H0^`), which
/// stay Hermitian. The symplectic property `w_hat J w_hat* = J` is checked
/// at every node against 1e-8.
pub fn gauge_normalize(path: &DarbouxPath, sys: &SystemCoefficients) -> Result<Vec<GaugeSample>> {
    let PathMode::Symmetric { a, j } = path.mode() else {
        return Err(Error::Usage(
            "gauge normalisation needs a symmetric-mode path".into(),
        ));
    };
    let m = path.m();
    let (j_inv, j_cond) = matcore::solve_with_cond(j, &ComplexMatrix::identity(m))?;
    if j_cond > COND_LIMIT {
        return Err(Error::Usage("gauge normalisation needs invertible J".into()));
    }
    let j_star_inv = j_inv.adjoint();

    let zero_node = path.node(path.zero_index())?;
    let init = (
        zero_node.pi1.clone(),
        zero_node.s.clone(),
        ComplexMatrix::identity(m),
    );

    let mut deriv = |x: f64,
                     st: &(ComplexMatrix, ComplexMatrix, ComplexMatrix),
                     side: Side|
     -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        let h1 = sys.eval_h1(x, side)?;
        let h0 = sys.eval_h0(x, side)?;
        let (pi, s, w_hat) = st;
        let pi_j = pi * j;
        let d_pi = &-&(&(a * &pi_j) * &h1) - &(&pi_j * &h0);
        let d_s = &(&pi_j * &h1) * &pi_j.adjoint();
        let s_inv_pi = matcore::solve(s, pi).map_err(|_| Error::SingularNode {
            x,
            cond: f64::INFINITY,
        })?;
        let p = &pi.adjoint() * &s_inv_pi;
        let z = &(&(&p * j) * &h1) + &(&(&h1 * &j.adjoint()) * &p);
        let d_w = &-&(w_hat * j) * &z;
        Ok((d_pi, d_s, d_w))
    };

    // Joint outward sweeps mirroring the path grid.
    let mut w_hats: Vec<Option<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>> =
        vec![None; path.len()];
    w_hats[path.zero_index()] = Some(init);
    for idx in path.zero_index() + 1..path.len() {
        let prev = w_hats[idx - 1].clone().expect("filled");
        w_hats[idx] = Some(rk4_step(
            &mut deriv,
            path.node(idx - 1)?.x,
            path.node(idx)?.x,
            &prev,
        )?);
    }
    for idx in (0..path.zero_index()).rev() {
        let prev = w_hats[idx + 1].clone().expect("filled");
        w_hats[idx] = Some(rk4_step(
            &mut deriv,
            path.node(idx + 1)?.x,
            path.node(idx)?.x,
            &prev,
        )?);
    }

    let j_scale = 1.0 + j.norm_fro();
    let mut out = Vec::with_capacity(path.len());
    for idx in 0..path.len() {
        let node = path.node(idx)?;
        let side = if node.x < 0.0 { Side::Minus } else { Side::Plus };
        let (_, _, w_hat) = w_hats[idx].take().expect("filled");
        let sympl = (&(&(&w_hat * j) * &w_hat.adjoint()) - j).norm_fro() / j_scale;
        if sympl > 1e-8 {
            return Err(Error::InvariantViolation(format!(
                "gauge factor lost the symplectic property at x = {}: residual {sympl:e}",
                node.x
            )));
        }
        let conjugate = |hm: &ComplexMatrix| -> ComplexMatrix {
            &(&(&(&(&j_inv * &w_hat) * j) * hm) * &(&j.adjoint() * &w_hat.adjoint())) * &j_star_inv
        };
        let h1_hat = conjugate(&sys.eval_h1(node.x, side)?);
        let h0_hat = conjugate(&sys.eval_h0(node.x, side)?);
        for (name, h) in [("H1^", &h1_hat), ("H0^", &h0_hat)] {
            if !matcore::is_hermitian(h, 1e-9) {
                return Err(Error::InvariantViolation(format!(
                    "{name} at x = {} is not Hermitian",
                    node.x
                )));
            }
        }
        out.push(GaugeSample {
            x: node.x,
            w_hat,
            h1_hat,
            h0_hat,
            symplectic_residual: sympl,
        });
    }
    Ok(out)
}
