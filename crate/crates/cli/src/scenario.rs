//! The scenario JSON schema and its conversion into core types.
//!
//! Complex scalars are `{"re": .., "im": ..}` objects (imaginary part
//! optional), complex matrices parallel `re`/`im` nested arrays. Scalar
//! coefficients use the closed expression catalog tagged by `kind`.

use gbdt_core::gbdt::{GbdtTriple, GridSpec};
use gbdt_core::matcore::ComplexMatrix;
use gbdt_core::model_indef::IndefModelParams;
use gbdt_core::systems::{
    CoefficientField, Interval, MatrixField, SystemCoefficients,
};
use num_complex::Complex64;
use serde::Deserialize;

/// Schema-level failure: malformed JSON or shape-inconsistent data.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "scenario schema error: {}", self.0)
    }
}

impl std::error::Error for SchemaError {}

type SchemaResult<T> = Result<T, SchemaError>;

fn bad<T>(msg: impl Into<String>) -> SchemaResult<T> {
    Err(SchemaError(msg.into()))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDto {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl ComplexDto {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDto {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixDto {
    pub fn matrix(&self) -> SchemaResult<ComplexMatrix> {
        let rows = self.re.len();
        if rows == 0 {
            return bad("matrix must have at least one row");
        }
        let cols = self.re[0].len();
        if self.re.iter().any(|r| r.len() != cols) {
            return bad("matrix re rows are ragged");
        }
        let im = match &self.im {
            Some(im) => {
                if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                    return bad("matrix im shape differs from re");
                }
                im.clone()
            }
            None => vec![vec![0.0; cols]; rows],
        };
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
            Complex64::new(self.re[i][j], im[i][j])
        }))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldDto {
    Constant {
        value: ComplexDto,
    },
    Sign {
        #[serde(default)]
        scale: Option<ComplexDto>,
    },
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<ComplexDto>,
    },
    Polynomial {
        coeffs: Vec<ComplexDto>,
    },
    Exp {
        amp: ComplexDto,
        rate: ComplexDto,
    },
    Trig {
        cos_amp: ComplexDto,
        freq: ComplexDto,
        sin_amp: ComplexDto,
    },
}

impl FieldDto {
    pub fn field(&self) -> SchemaResult<CoefficientField> {
        Ok(match self {
            FieldDto::Constant { value } => CoefficientField::Constant(value.value()),
            FieldDto::Sign { scale } => CoefficientField::Sign {
                scale: scale.map_or(Complex64::new(1.0, 0.0), |s| s.value()),
            },
            FieldDto::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                if values.len() != breakpoints.len() + 1 {
                    return bad("piecewise_constant needs breakpoints.len() + 1 values");
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("piecewise_constant breakpoints must be strictly increasing");
                }
                CoefficientField::PiecewiseConstant {
                    breaks: breakpoints.clone(),
                    values: values.iter().map(ComplexDto::value).collect(),
                }
            }
            FieldDto::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.len() > 4 {
                    return bad("polynomial supports degrees 0..=3");
                }
                CoefficientField::Polynomial {
                    coeffs: coeffs.iter().map(ComplexDto::value).collect(),
                }
            }
            FieldDto::Exp { amp, rate } => CoefficientField::Exp {
                amp: amp.value(),
                rate: rate.value(),
            },
            FieldDto::Trig {
                cos_amp,
                freq,
                sin_amp,
            } => CoefficientField::Trig {
                cos_amp: cos_amp.value(),
                freq: freq.value(),
                sin_amp: sin_amp.value(),
            },
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFieldDto {
    pub fields: Vec<Vec<FieldDto>>,
}

impl MatrixFieldDto {
    pub fn matrix_field(&self) -> SchemaResult<MatrixField> {
        let rows = self.fields.len();
        if rows == 0 {
            return bad("matrix field must have at least one row");
        }
        let cols = self.fields[0].len();
        if self.fields.iter().any(|r| r.len() != cols) {
            return bad("matrix field rows are ragged");
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for row in &self.fields {
            for f in row {
                flat.push(f.field()?);
            }
        }
        MatrixField::new(rows, cols, flat).map_err(|e| SchemaError(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDto {
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "dialect", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemDto {
    General {
        interval: IntervalDto,
        q1: MatrixFieldDto,
        q0: MatrixFieldDto,
    },
    Hamiltonian {
        interval: IntervalDto,
        j: MatrixDto,
        h1: MatrixFieldDto,
        h0: MatrixFieldDto,
    },
    ShinZettl {
        interval: IntervalDto,
        r1: FieldDto,
        r2: FieldDto,
        p_inv: FieldDto,
        q: FieldDto,
        omega: FieldDto,
    },
    SturmLiouville {
        interval: IntervalDto,
        p: FieldDto,
        q: FieldDto,
        omega: FieldDto,
    },
}

impl SystemDto {
    pub fn system(&self) -> SchemaResult<SystemCoefficients> {
        let to_schema = |e: gbdt_core::Error| SchemaError(e.to_string());
        match self {
            SystemDto::General { interval, q1, q0 } => {
                let interval = Interval::new(interval.x_min, interval.x_max).map_err(to_schema)?;
                SystemCoefficients::general(q1.matrix_field()?, q0.matrix_field()?, interval)
                    .map_err(to_schema)
            }
            SystemDto::Hamiltonian {
                interval,
                j,
                h1,
                h0,
            } => {
                let interval = Interval::new(interval.x_min, interval.x_max).map_err(to_schema)?;
                SystemCoefficients::hamiltonian(
                    j.matrix()?,
                    h1.matrix_field()?,
                    h0.matrix_field()?,
                    interval,
                )
                .map_err(to_schema)
            }
            SystemDto::ShinZettl {
                interval,
                r1,
                r2,
                p_inv,
                q,
                omega,
            } => {
                let interval = Interval::new(interval.x_min, interval.x_max).map_err(to_schema)?;
                SystemCoefficients::shin_zettl(
                    r1.field()?,
                    r2.field()?,
                    p_inv.field()?,
                    q.field()?,
                    omega.field()?,
                    interval,
                )
                .map_err(to_schema)
            }
            SystemDto::SturmLiouville {
                interval,
                p,
                q,
                omega,
            } => {
                let interval = Interval::new(interval.x_min, interval.x_max).map_err(to_schema)?;
                SystemCoefficients::sturm_liouville(
                    p.field()?,
                    q.field()?,
                    omega.field()?,
                    interval,
                )
                .map_err(to_schema)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TripleDto {
    General {
        a1: MatrixDto,
        a2: MatrixDto,
        s0: MatrixDto,
        pi1_0: MatrixDto,
        pi2_0: MatrixDto,
    },
    Symmetric {
        a: MatrixDto,
        s0: MatrixDto,
        pi0: MatrixDto,
        /// Defaults to the system carrier when omitted.
        #[serde(default)]
        j: Option<MatrixDto>,
    },
}

impl TripleDto {
    pub fn triple(&self, sys: &SystemCoefficients) -> SchemaResult<GbdtTriple> {
        Ok(match self {
            TripleDto::General {
                a1,
                a2,
                s0,
                pi1_0,
                pi2_0,
            } => GbdtTriple::General {
                a1: a1.matrix()?,
                a2: a2.matrix()?,
                s0: s0.matrix()?,
                pi1_0: pi1_0.matrix()?,
                pi2_0: pi2_0.matrix()?,
            },
            TripleDto::Symmetric { a, s0, pi0, j } => {
                let j = match j {
                    Some(j) => j.matrix()?,
                    None => sys.symmetric_j().ok_or_else(|| {
                        SchemaError(
                            "symmetric triple without explicit J needs a Hamiltonian or \
                             Lagrange-symmetric system"
                                .into(),
                        )
                    })?,
                };
                GbdtTriple::Symmetric {
                    a: a.matrix()?,
                    s0: s0.matrix()?,
                    pi0: pi0.matrix()?,
                    j,
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDto {
    pub x_min: f64,
    pub x_max: f64,
    pub steps: usize,
}

impl GridDto {
    pub fn grid(&self, steps_override: Option<usize>) -> SchemaResult<GridSpec> {
        GridSpec::new(self.x_min, self.x_max, steps_override.unwrap_or(self.steps))
            .map_err(|e| SchemaError(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylDto {
    #[serde(default)]
    pub e: Option<MatrixDto>,
    pub ell_prime: f64,
    pub m_candidates: Vec<MatrixDto>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsDto {
    pub h: MatrixDto,
    pub a: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDto {
    pub alpha: MatrixDto,
    pub mu: ComplexDto,
    pub g: MatrixDto,
    /// Initial-solution data for the transformed-solution checks.
    #[serde(default)]
    pub h: Option<MatrixDto>,
}

impl ModelDto {
    pub fn params(&self) -> SchemaResult<IndefModelParams> {
        IndefModelParams::new(self.alpha.matrix()?, self.mu.value(), self.g.matrix()?)
            .map_err(|e| SchemaError(e.to_string()))
    }
}

/// A fully parsed scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub system: Option<SystemDto>,
    #[serde(default)]
    pub triple: Option<TripleDto>,
    #[serde(default)]
    pub grid: Option<GridDto>,
    #[serde(default)]
    pub lambdas: Vec<ComplexDto>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub weyl: Option<WeylDto>,
    #[serde(default)]
    pub dynamics: Option<DynamicsDto>,
    #[serde(default)]
    pub model: Option<ModelDto>,
}

impl Scenario {
    pub fn from_path(path: &std::path::Path) -> SchemaResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SchemaError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| SchemaError(format!("invalid JSON: {e}")))
    }

    pub fn require_system(&self) -> SchemaResult<SystemCoefficients> {
        self.system
            .as_ref()
            .ok_or_else(|| SchemaError("scenario needs a `system` block".into()))?
            .system()
    }

    pub fn require_triple(&self, sys: &SystemCoefficients) -> SchemaResult<GbdtTriple> {
        self.triple
            .as_ref()
            .ok_or_else(|| SchemaError("scenario needs a `triple` block".into()))?
            .triple(sys)
    }

    pub fn require_grid(&self, steps_override: Option<usize>) -> SchemaResult<GridSpec> {
        self.grid
            .as_ref()
            .ok_or_else(|| SchemaError("scenario needs a `grid` block".into()))?
            .grid(steps_override)
    }
}
