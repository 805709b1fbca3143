//! Coefficient fields and the four system dialects.
//!
//! A first-order system `y' = F(x, lambda) y` is described by one of four
//! coefficient dialects:
//!
//! * `General` — `F = -(lambda Q1(x) + Q0(x))` with arbitrary matrix fields;
//! * `Hamiltonian` — `F = J (lambda H1(x) + H0(x))`, `J* = -J`, `H1`, `H0`
//!   Hermitian;
//! * `ShinZettl` — the 2x2 quasi-differential form
//!   `F = [[r1, 1/p], [q - lambda w, r2]]`;
//! * `SturmLiouville` — `-(p u')' + q u = lambda w u` in first-order form.
//!
//! Scalar coefficients come from a closed expression catalog so that every
//! scenario is exactly serialisable and every run reproducible.

use crate::error::{Error, Result};
use crate::matcore::{self, re, ComplexMatrix};
use num_complex::Complex64;

/// Number of probe points used for computed symmetry flags and for
/// Hermiticity validation of matrix fields.
const PROBE_POINTS: usize = 32;
/// Tolerance for probe-based structural checks.
const PROBE_TOL: f64 = 1e-12;

/// One-sided evaluation direction, used at points of the exceptional set
/// (e.g. `sign(x)` at `x = 0`) where only a one-sided limit exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Right-hand limit (used when sweeping towards larger x).
    Plus,
    /// Left-hand limit (used when sweeping towards smaller x).
    Minus,
}

/// Scalar coefficient from the closed expression catalog.
///
/// The catalog is closed under complex scaling, conjugation and
/// differentiation (the derivative of a piecewise-constant or sign field is
/// zero away from its exceptional set). `Reciprocal` only arises internally
/// when a Sturm-Liouville `p` is inverted; scenario files never contain it.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientField {
    Constant(Complex64),
    /// `values[k]` on `(breaks[k-1], breaks[k])`; breakpoints are exceptional.
    PiecewiseConstant {
        breaks: Vec<f64>,
        values: Vec<Complex64>,
    },
    /// `scale * sign(x)`; exceptional at `x = 0`.
    Sign { scale: Complex64 },
    /// `coeffs[0] + coeffs[1] x + coeffs[2] x^2 + coeffs[3] x^3`.
    Polynomial { coeffs: Vec<Complex64> },
    /// `amp * exp(rate * x)`.
    Exp { amp: Complex64, rate: Complex64 },
    /// `cos_amp * cos(freq x) + sin_amp * sin(freq x)`.
    Trig {
        cos_amp: Complex64,
        freq: Complex64,
        sin_amp: Complex64,
    },
    /// `1 / inner(x)`; exceptional where `inner` vanishes.
    Reciprocal(Box<CoefficientField>),
}

impl CoefficientField {
    pub fn constant(value: f64) -> Self {
        CoefficientField::Constant(re(value))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn sign() -> Self {
        CoefficientField::Sign { scale: re(1.0) }
    }

    /// True when `x` belongs to the declared exceptional set.
    pub fn is_exceptional(&self, x: f64) -> bool {
        match self {
            CoefficientField::Constant(_)
            | CoefficientField::Polynomial { .. }
            | CoefficientField::Exp { .. }
            | CoefficientField::Trig { .. } => false,
            CoefficientField::PiecewiseConstant { breaks, .. } => breaks.contains(&x),
            CoefficientField::Sign { .. } => x == 0.0,
            CoefficientField::Reciprocal(inner) => {
                inner.is_exceptional(x)
                    || inner.eval_side(x, Side::Plus).map_or(true, |v| v.norm() == 0.0)
            }
        }
    }

    /// Evaluates at `x`, failing on the exceptional set.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if self.is_exceptional(x) {
            return Err(Error::Evaluation { x });
        }
        self.eval_side(x, Side::Plus)
    }

    /// Evaluates at `x` using the one-sided limit from `side` at
    /// exceptional points; identical to [`eval`](Self::eval) elsewhere.
    pub fn eval_side(&self, x: f64, side: Side) -> Result<Complex64> {
        match self {
            CoefficientField::Constant(v) => Ok(*v),
            CoefficientField::PiecewiseConstant { breaks, values } => {
                // Index of the piece containing x; at a breakpoint the side
                // picks the adjoining piece.
                let mut idx = breaks.iter().filter(|&&b| b < x).count();
                if breaks.contains(&x) && side == Side::Plus {
                    idx += 1;
                }
                values.get(idx).copied().ok_or(Error::Evaluation { x })
            }
            CoefficientField::Sign { scale } => {
                let s = if x > 0.0 || (x == 0.0 && side == Side::Plus) {
                    1.0
                } else {
                    -1.0
                };
                Ok(*scale * s)
            }
            CoefficientField::Polynomial { coeffs } => {
                let mut acc = Complex64::default();
                for &coef in coeffs.iter().rev() {
                    acc = acc * x + coef;
                }
                Ok(acc)
            }
            CoefficientField::Exp { amp, rate } => Ok(*amp * (*rate * x).exp()),
            CoefficientField::Trig {
                cos_amp,
                freq,
                sin_amp,
            } => {
                let arg = *freq * x;
                Ok(*cos_amp * arg.cos() + *sin_amp * arg.sin())
            }
            CoefficientField::Reciprocal(inner) => {
                let v = inner.eval_side(x, side)?;
                if v.norm() == 0.0 {
                    return Err(Error::Evaluation { x });
                }
                Ok(re(1.0) / v)
            }
        }
    }

    /// Analytic derivative at `x` (one-sided at exceptional points, where
    /// the step forms differentiate to zero).
    pub fn eval_deriv(&self, x: f64, side: Side) -> Result<Complex64> {
        match self {
            CoefficientField::Constant(_)
            | CoefficientField::PiecewiseConstant { .. }
            | CoefficientField::Sign { .. } => Ok(Complex64::default()),
            CoefficientField::Polynomial { coeffs } => {
                let mut acc = Complex64::default();
                for (k, &coef) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * x + coef * k as f64;
                }
                Ok(acc)
            }
            CoefficientField::Exp { amp, rate } => Ok(*amp * *rate * (*rate * x).exp()),
            CoefficientField::Trig {
                cos_amp,
                freq,
                sin_amp,
            } => {
                let arg = *freq * x;
                Ok((*sin_amp * arg.cos() - *cos_amp * arg.sin()) * *freq)
            }
            CoefficientField::Reciprocal(inner) => {
                let v = inner.eval_side(x, side)?;
                if v.norm() == 0.0 {
                    return Err(Error::Evaluation { x });
                }
                let dv = inner.eval_deriv(x, side)?;
                Ok(-dv / (v * v))
            }
        }
    }

    /// Multiplies the field by a complex scalar (the catalog is closed
    /// under scaling).
    pub fn scaled(&self, z: Complex64) -> Self {
        match self {
            CoefficientField::Constant(v) => CoefficientField::Constant(*v * z),
            CoefficientField::PiecewiseConstant { breaks, values } => {
                CoefficientField::PiecewiseConstant {
                    breaks: breaks.clone(),
                    values: values.iter().map(|&v| v * z).collect(),
                }
            }
            CoefficientField::Sign { scale } => CoefficientField::Sign { scale: *scale * z },
            CoefficientField::Polynomial { coeffs } => CoefficientField::Polynomial {
                coeffs: coeffs.iter().map(|&v| v * z).collect(),
            },
            CoefficientField::Exp { amp, rate } => CoefficientField::Exp {
                amp: *amp * z,
                rate: *rate,
            },
            CoefficientField::Trig {
                cos_amp,
                freq,
                sin_amp,
            } => CoefficientField::Trig {
                cos_amp: *cos_amp * z,
                freq: *freq,
                sin_amp: *sin_amp * z,
            },
            CoefficientField::Reciprocal(inner) => {
                // z / f = 1 / (f / z); keep the wrapper on the inner field.
                CoefficientField::Reciprocal(Box::new(inner.scaled(re(1.0) / z)))
            }
        }
    }

    /// Pointwise complex conjugate as a function of real `x`.
    pub fn conjugated(&self) -> Self {
        match self {
            CoefficientField::Constant(v) => CoefficientField::Constant(v.conj()),
            CoefficientField::PiecewiseConstant { breaks, values } => {
                CoefficientField::PiecewiseConstant {
                    breaks: breaks.clone(),
                    values: values.iter().map(|v| v.conj()).collect(),
                }
            }
            CoefficientField::Sign { scale } => CoefficientField::Sign {
                scale: scale.conj(),
            },
            CoefficientField::Polynomial { coeffs } => CoefficientField::Polynomial {
                coeffs: coeffs.iter().map(|v| v.conj()).collect(),
            },
            CoefficientField::Exp { amp, rate } => CoefficientField::Exp {
                amp: amp.conj(),
                rate: rate.conj(),
            },
            CoefficientField::Trig {
                cos_amp,
                freq,
                sin_amp,
            } => CoefficientField::Trig {
                cos_amp: cos_amp.conj(),
                freq: freq.conj(),
                sin_amp: sin_amp.conj(),
            },
            CoefficientField::Reciprocal(inner) => {
                CoefficientField::Reciprocal(Box::new(inner.conjugated()))
            }
        }
    }
}

/// Rectangular array of scalar coefficient fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    rows: usize,
    cols: usize,
    fields: Vec<CoefficientField>,
}

impl MatrixField {
    pub fn new(rows: usize, cols: usize, fields: Vec<CoefficientField>) -> Result<Self> {
        if fields.len() != rows * cols {
            return Err(Error::Dimension {
                op: "MatrixField::new",
                expected: format!("{} fields", rows * cols),
                got: format!("{}", fields.len()),
            });
        }
        Ok(Self { rows, cols, fields })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            fields: vec![CoefficientField::zero(); rows * cols],
        }
    }

    /// A constant matrix field.
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            fields: m
                .entries()
                .iter()
                .map(|&z| CoefficientField::Constant(z))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self, i: usize, j: usize) -> &CoefficientField {
        &self.fields[i * self.cols + j]
    }

    pub fn set_field(&mut self, i: usize, j: usize, f: CoefficientField) {
        self.fields[i * self.cols + j] = f;
    }

    pub fn eval(&self, x: f64, side: Side) -> Result<ComplexMatrix> {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.field(i, j).eval_side(x, side)?;
            }
        }
        Ok(m)
    }

    pub fn is_exceptional(&self, x: f64) -> bool {
        self.fields.iter().any(|f| f.is_exceptional(x))
    }
}

/// Closed interval `[x_min, x_max]` containing 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub x_min: f64,
    pub x_max: f64,
}

impl Interval {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min <= 0.0 && 0.0 <= x_max && x_min < x_max) {
            return Err(Error::Usage(format!(
                "interval [{x_min}, {x_max}] must contain 0 and be nondegenerate"
            )));
        }
        Ok(Self { x_min, x_max })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.x_min <= x && x <= self.x_max
    }

    /// Deterministic probe nodes used for structural checks; midpoint
    /// placement keeps 0 (and interval endpoints) out of the probe set.
    fn probes(&self) -> Vec<f64> {
        let h = (self.x_max - self.x_min) / PROBE_POINTS as f64;
        (0..PROBE_POINTS)
            .map(|k| self.x_min + (k as f64 + 0.5) * h)
            .collect()
    }
}

/// Per-dialect coefficient data.
#[derive(Debug, Clone)]
pub enum Dialect {
    General {
        q1: MatrixField,
        q0: MatrixField,
    },
    Hamiltonian {
        j: ComplexMatrix,
        h1: MatrixField,
        h0: MatrixField,
    },
    ShinZettl {
        r1: CoefficientField,
        r2: CoefficientField,
        p_inv: CoefficientField,
        q: CoefficientField,
        omega: CoefficientField,
    },
    SturmLiouville {
        p: CoefficientField,
        q: CoefficientField,
        omega: CoefficientField,
    },
}

/// Coefficients of an initial system on an interval, with computed
/// Lagrange-symmetry flags.
#[derive(Debug, Clone)]
pub struct SystemCoefficients {
    dialect: Dialect,
    interval: Interval,
    m: usize,
    lagrange_symmetric: bool,
    lagrange_j_symmetric: bool,
}

impl SystemCoefficients {
    pub fn general(q1: MatrixField, q0: MatrixField, interval: Interval) -> Result<Self> {
        let m = q1.rows();
        if q1.cols() != m || q0.rows() != m || q0.cols() != m {
            return Err(Error::Dimension {
                op: "SystemCoefficients::general",
                expected: format!("{m}x{m} Q1 and Q0"),
                got: format!("{}x{} / {}x{}", q1.rows(), q1.cols(), q0.rows(), q0.cols()),
            });
        }
        Ok(Self {
            dialect: Dialect::General { q1, q0 },
            interval,
            m,
            lagrange_symmetric: false,
            lagrange_j_symmetric: false,
        })
    }

    /// Hamiltonian dialect. `J` must be exactly skew-adjoint and `H1`, `H0`
    /// must evaluate Hermitian on the probe grid.
    pub fn hamiltonian(
        j: ComplexMatrix,
        h1: MatrixField,
        h0: MatrixField,
        interval: Interval,
    ) -> Result<Self> {
        let m = j.rows();
        j.require_square("SystemCoefficients::hamiltonian")?;
        if h1.rows() != m || h1.cols() != m || h0.rows() != m || h0.cols() != m {
            return Err(Error::Dimension {
                op: "SystemCoefficients::hamiltonian",
                expected: format!("{m}x{m} H1 and H0"),
                got: format!("{}x{} / {}x{}", h1.rows(), h1.cols(), h0.rows(), h0.cols()),
            });
        }
        if (&j + &j.adjoint()).max_abs() != 0.0 {
            return Err(Error::InvariantViolation(
                "J must satisfy J* = -J exactly".into(),
            ));
        }
        for &x in &interval.probes() {
            if h1.is_exceptional(x) || h0.is_exceptional(x) {
                continue;
            }
            for (name, field) in [("H1", &h1), ("H0", &h0)] {
                let v = field.eval(x, Side::Plus)?;
                if !matcore::is_hermitian(&v, PROBE_TOL) {
                    return Err(Error::InvariantViolation(format!(
                        "{name}({x}) is not Hermitian"
                    )));
                }
            }
        }
        Ok(Self {
            dialect: Dialect::Hamiltonian { j, h1, h0 },
            interval,
            m,
            lagrange_symmetric: false,
            lagrange_j_symmetric: false,
        })
    }

    pub fn shin_zettl(
        r1: CoefficientField,
        r2: CoefficientField,
        p_inv: CoefficientField,
        q: CoefficientField,
        omega: CoefficientField,
        interval: Interval,
    ) -> Result<Self> {
        let mut sys = Self {
            dialect: Dialect::ShinZettl {
                r1,
                r2,
                p_inv,
                q,
                omega,
            },
            interval,
            m: 2,
            lagrange_symmetric: false,
            lagrange_j_symmetric: false,
        };
        sys.compute_flags()?;
        Ok(sys)
    }

    pub fn sturm_liouville(
        p: CoefficientField,
        q: CoefficientField,
        omega: CoefficientField,
        interval: Interval,
    ) -> Result<Self> {
        let mut sys = Self {
            dialect: Dialect::SturmLiouville { p, q, omega },
            interval,
            m: 2,
            lagrange_symmetric: false,
            lagrange_j_symmetric: false,
        };
        sys.compute_flags()?;
        Ok(sys)
    }

    /// Size of the system (`F` is `m x m`).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn dialect(&self) -> &Dialect {
        &self.dialect
    }

    /// Computed flag: the coefficients are Lagrange-symmetric
    /// (real `w`, `p`, `q` and `r1 = -conj(r2)` on the probe grid).
    pub fn lagrange_symmetric(&self) -> bool {
        self.lagrange_symmetric
    }

    /// Computed flag: `r1 + r2 = 0` on the probe grid.
    pub fn lagrange_j_symmetric(&self) -> bool {
        self.lagrange_j_symmetric
    }

    fn compute_flags(&mut self) -> Result<()> {
        let probes = self.interval.probes();
        match &self.dialect {
            Dialect::ShinZettl {
                r1,
                r2,
                p_inv,
                q,
                omega,
            } => {
                let mut sym = true;
                let mut j_sym = true;
                for &x in &probes {
                    let fields = [r1, r2, p_inv, q, omega];
                    if fields.iter().any(|f| f.is_exceptional(x)) {
                        continue;
                    }
                    let v1 = r1.eval(x)?;
                    let v2 = r2.eval(x)?;
                    sym &= (v1 + v2.conj()).norm() <= PROBE_TOL;
                    j_sym &= (v1 + v2).norm() <= PROBE_TOL;
                    for f in [p_inv, q, omega] {
                        sym &= f.eval(x)?.im.abs() <= PROBE_TOL;
                    }
                }
                self.lagrange_symmetric = sym;
                self.lagrange_j_symmetric = j_sym;
            }
            Dialect::SturmLiouville { p, q, omega } => {
                let mut real = true;
                for &x in &probes {
                    let fields = [p, q, omega];
                    if fields.iter().any(|f| f.is_exceptional(x)) {
                        continue;
                    }
                    for f in fields {
                        real &= f.eval(x)?.im.abs() <= PROBE_TOL;
                    }
                }
                // r1 = r2 = 0, so r1 = -conj(r2) and r1 = -r2 hold trivially.
                self.lagrange_symmetric = real;
                self.lagrange_j_symmetric = true;
            }
            _ => {}
        }
        Ok(())
    }

    /// True when `x` lies in the exceptional set of any coefficient.
    pub fn is_exceptional(&self, x: f64) -> bool {
        match &self.dialect {
            Dialect::General { q1, q0 } => q1.is_exceptional(x) || q0.is_exceptional(x),
            Dialect::Hamiltonian { h1, h0, .. } => h1.is_exceptional(x) || h0.is_exceptional(x),
            Dialect::ShinZettl {
                r1,
                r2,
                p_inv,
                q,
                omega,
            } => [r1, r2, p_inv, q, omega].iter().any(|f| f.is_exceptional(x)),
            Dialect::SturmLiouville { p, q, omega } => {
                [p, q, omega].iter().any(|f| f.is_exceptional(x))
                    || p.eval_side(x, Side::Plus).map_or(true, |v| v.norm() == 0.0)
            }
        }
    }

    /// `Q1(x)` of the general form `F = -(lambda Q1 + Q0)`.
    pub fn eval_q1(&self, x: f64, side: Side) -> Result<ComplexMatrix> {
        match &self.dialect {
            Dialect::General { q1, .. } => q1.eval(x, side),
            Dialect::Hamiltonian { j, h1, .. } => Ok(&(-j) * &h1.eval(x, side)?),
            Dialect::ShinZettl { omega, .. } | Dialect::SturmLiouville { omega, .. } => {
                let w = omega.eval_side(x, side)?;
                let mut q1 = ComplexMatrix::zeros(2, 2);
                q1[(1, 0)] = w;
                Ok(q1)
            }
        }
    }

    /// `Q0(x)` of the general form `F = -(lambda Q1 + Q0)`.
    pub fn eval_q0(&self, x: f64, side: Side) -> Result<ComplexMatrix> {
        match &self.dialect {
            Dialect::General { q0, .. } => q0.eval(x, side),
            Dialect::Hamiltonian { j, h0, .. } => Ok(&(-j) * &h0.eval(x, side)?),
            Dialect::ShinZettl {
                r1, r2, p_inv, q, ..
            } => {
                let mut q0 = ComplexMatrix::zeros(2, 2);
                q0[(0, 0)] = -r1.eval_side(x, side)?;
                q0[(0, 1)] = -p_inv.eval_side(x, side)?;
                q0[(1, 0)] = -q.eval_side(x, side)?;
                q0[(1, 1)] = -r2.eval_side(x, side)?;
                Ok(q0)
            }
            Dialect::SturmLiouville { p, q, .. } => {
                let pv = p.eval_side(x, side)?;
                if pv.norm() == 0.0 {
                    return Err(Error::Evaluation { x });
                }
                let mut q0 = ComplexMatrix::zeros(2, 2);
                q0[(0, 1)] = -re(1.0) / pv;
                q0[(1, 0)] = -q.eval_side(x, side)?;
                Ok(q0)
            }
        }
    }

    /// System matrix `F(x, lambda)`, failing on the exceptional set.
    pub fn eval_f(&self, x: f64, lambda: Complex64) -> Result<ComplexMatrix> {
        if !self.interval.contains(x) {
            return Err(Error::Usage(format!(
                "x = {x} outside the scenario interval"
            )));
        }
        if self.is_exceptional(x) {
            return Err(Error::Evaluation { x });
        }
        self.eval_f_side(x, lambda, Side::Plus)
    }

    /// `F(x, lambda)` with one-sided limits at exceptional points.
    pub fn eval_f_side(&self, x: f64, lambda: Complex64, side: Side) -> Result<ComplexMatrix> {
        let q1 = self.eval_q1(x, side)?;
        let q0 = self.eval_q0(x, side)?;
        Ok(&q1.scale(-lambda) - &q0)
    }

    /// The symmetric carrier `J` when the dialect admits one: Hamiltonian
    /// directly, Shin-Zettl / Sturm-Liouville through the Pauli-matrix
    /// representation when Lagrange-symmetric.
    pub fn symmetric_j(&self) -> Option<ComplexMatrix> {
        match &self.dialect {
            Dialect::Hamiltonian { j, .. } => Some(j.clone()),
            Dialect::ShinZettl { .. } | Dialect::SturmLiouville { .. }
                if self.lagrange_symmetric =>
            {
                Some(pauli_j())
            }
            _ => None,
        }
    }

    /// `H1(x)` of the symmetric carrier (see [`symmetric_j`](Self::symmetric_j)).
    pub fn eval_h1(&self, x: f64, side: Side) -> Result<ComplexMatrix> {
        match &self.dialect {
            Dialect::Hamiltonian { h1, .. } => h1.eval(x, side),
            Dialect::ShinZettl { omega, .. } | Dialect::SturmLiouville { omega, .. } => {
                let w = omega.eval_side(x, side)?;
                let mut h1 = ComplexMatrix::zeros(2, 2);
                h1[(0, 0)] = w;
                Ok(h1)
            }
            Dialect::General { .. } => Err(Error::Dialect(
                "general dialect has no symmetric carrier".into(),
            )),
        }
    }

    /// `H0(x)` of the symmetric carrier.
    pub fn eval_h0(&self, x: f64, side: Side) -> Result<ComplexMatrix> {
        match &self.dialect {
            Dialect::Hamiltonian { h0, .. } => h0.eval(x, side),
            Dialect::ShinZettl { r1, p_inv, q, .. } => {
                let rv = r1.eval_side(x, side)?;
                let mut h0 = ComplexMatrix::zeros(2, 2);
                h0[(0, 0)] = -q.eval_side(x, side)?;
                h0[(0, 1)] = rv.conj();
                h0[(1, 0)] = rv;
                h0[(1, 1)] = p_inv.eval_side(x, side)?;
                Ok(h0)
            }
            Dialect::SturmLiouville { p, q, .. } => {
                let pv = p.eval_side(x, side)?;
                if pv.norm() == 0.0 {
                    return Err(Error::Evaluation { x });
                }
                let mut h0 = ComplexMatrix::zeros(2, 2);
                h0[(0, 0)] = -q.eval_side(x, side)?;
                h0[(1, 1)] = re(1.0) / pv;
                Ok(h0)
            }
            Dialect::General { .. } => Err(Error::Dialect(
                "general dialect has no symmetric carrier".into(),
            )),
        }
    }
}

/// `J = i sigma_2 = [[0, 1], [-1, 0]]`, the symmetric carrier of
/// Lagrange-symmetric 2x2 systems.
pub fn pauli_j() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]])
}

/// Rewrites a Lagrange-symmetric Shin-Zettl system in Hamiltonian form:
/// `J = i sigma_2`, `H1 = diag(w, 0)`, `H0 = [[-q, conj r], [r, 1/p]]`.
pub fn shin_zettl_to_hamiltonian(sys: &SystemCoefficients) -> Result<SystemCoefficients> {
    let Dialect::ShinZettl {
        r1,
        r2: _,
        p_inv,
        q,
        omega,
    } = &sys.dialect
    else {
        return Err(Error::Dialect("expected a Shin-Zettl system".into()));
    };
    if !sys.lagrange_symmetric {
        return Err(Error::Dialect(
            "Hamiltonian rewrite requires a Lagrange-symmetric system".into(),
        ));
    }
    let mut h1 = MatrixField::zeros(2, 2);
    h1.set_field(0, 0, omega.clone());
    let mut h0 = MatrixField::zeros(2, 2);
    h0.set_field(0, 0, q.scaled(re(-1.0)));
    h0.set_field(0, 1, r1.conjugated());
    h0.set_field(1, 0, r1.clone());
    h0.set_field(1, 1, p_inv.clone());
    SystemCoefficients::hamiltonian(pauli_j(), h1, h0, sys.interval)
}

/// First-order (Shin-Zettl) form of a Sturm-Liouville system with
/// `y1 = u`, `y2 = p u'` and `r1 = r2 = 0`.
pub fn sturm_liouville_to_first_order(sys: &SystemCoefficients) -> Result<SystemCoefficients> {
    let Dialect::SturmLiouville { p, q, omega } = &sys.dialect else {
        return Err(Error::Dialect("expected a Sturm-Liouville system".into()));
    };
    // p must be bounded away from zero at the probe nodes.
    for &x in &sys.interval.probes() {
        if p.is_exceptional(x) {
            continue;
        }
        if p.eval(x)?.norm() < PROBE_TOL {
            return Err(Error::Dialect(format!(
                "p vanishes near x = {x}; the first-order form needs 1/p"
            )));
        }
    }
    let p_inv = match p {
        CoefficientField::Constant(v) => CoefficientField::Constant(re(1.0) / v),
        CoefficientField::Reciprocal(inner) => (**inner).clone(),
        other => CoefficientField::Reciprocal(Box::new(other.clone())),
    };
    SystemCoefficients::shin_zettl(
        CoefficientField::zero(),
        CoefficientField::zero(),
        p_inv,
        q.clone(),
        omega.clone(),
        sys.interval,
    )
}
