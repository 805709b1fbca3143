//! `validate`: check the parameter triple against its matrix identity.

use super::{CliError, RunContext};
use crate::output::{json_number, Check, Report};

pub fn run(ctx: &RunContext) -> Result<i32, CliError> {
    let sys = ctx.scenario.require_system()?;
    let triple = ctx.scenario.require_triple(&sys)?;
    let validation = triple.validate()?;

    let tol = ctx.tol_or(validation.tol);
    let pass = validation.relative <= tol;
    let mut report = Report::new(&ctx.scenario.name, "validate", ctx.tol);
    report.push(Check {
        name: "triple_identity".to_string(),
        description: "Sylvester identity of the parameter triple: \
                      A1 S(0) - S(0) A2 = Pi1(0) Pi2(0)* (relative residual)"
            .to_string(),
        residual: Some(validation.relative),
        tolerance: Some(tol),
        pass,
    });
    report.extra(
        "identity_residual_absolute",
        json_number(validation.residual),
    );
    report.extra(
        "triple_dimensions",
        serde_json::json!({"n": triple.n(), "m": triple.m()}),
    );
    report.write(ctx.out_dir)?;

    if pass {
        Ok(0)
    } else {
        Err(CliError::TripleIdentity(format!(
            "triple identity violated: absolute residual {:e}, relative {:e}",
            validation.residual, validation.relative
        )))
    }
}
