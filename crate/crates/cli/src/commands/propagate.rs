//! `propagate`: integrate the generator data and dump the path.

use super::{CliError, RunContext};
use crate::output::{
    fmt_number, json_number, matrix_cells, matrix_headers, Check, CsvWriter, Report,
};
use gbdt_core::gbdt::{self, DarbouxPath, PathMode};

pub fn run(ctx: &RunContext) -> Result<i32, CliError> {
    let sys = ctx.scenario.require_system()?;
    let triple = ctx.scenario.require_triple(&sys)?;
    let grid = ctx.scenario.require_grid(ctx.grid_steps)?;
    let opts = ctx.propagation_options();
    let path = gbdt::propagate_with(&triple, &sys, &grid, &opts)?;

    write_path_csv(ctx, &path)?;

    let mut report = Report::new(&ctx.scenario.name, "propagate", ctx.tol);
    report.push(Check::residual(
        "identity_preservation",
        "max relative residual of the Sylvester identity along the path",
        path.max_identity_residual(),
        opts.identity_tol,
    ));
    if matches!(path.mode(), PathMode::Symmetric { .. }) {
        let hermiticity = path
            .nodes()
            .iter()
            .map(|n| (&n.s - &n.s.adjoint()).norm_fro() / (1.0 + n.s.norm_fro()))
            .fold(0.0, f64::max);
        report.push(Check::residual(
            "s_hermiticity",
            "max relative deviation of S(x) from Hermitian symmetry",
            hermiticity,
            opts.hermiticity_tol,
        ));
    }
    let gaps: Vec<serde_json::Value> = path
        .nodes()
        .iter()
        .filter(|n| !n.s_invertible)
        .map(|n| json_number(n.x))
        .collect();
    report.extra("singular_nodes", serde_json::Value::Array(gaps));
    report.extra(
        "grid",
        serde_json::json!({"x_min": grid.x_min, "x_max": grid.x_max, "steps": grid.steps}),
    );
    report.write(ctx.out_dir)?;
    Ok(if report.all_pass() { 0 } else { 4 })
}

fn write_path_csv(ctx: &RunContext, path: &DarbouxPath) -> Result<(), CliError> {
    let n = path.n();
    let m = path.m();
    let mut header: Vec<String> = vec![
        "x".into(),
        "identity_residual".into(),
        "s_cond".into(),
        "s_invertible".into(),
    ];
    header.extend(matrix_headers("pi1", n, m));
    header.extend(matrix_headers("pi2", n, m));
    header.extend(matrix_headers("s", n, n));
    header.extend(matrix_headers("x", m, m));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = CsvWriter::new(ctx.out_dir.join("path.csv"), &header_refs);

    for node in path.nodes() {
        let mut row = vec![
            fmt_number(node.x),
            fmt_number(node.identity_residual),
            fmt_number(node.s_cond),
            if node.s_invertible { "true" } else { "false" }.to_string(),
        ];
        row.extend(matrix_cells(Some(&node.pi1), n, m));
        row.extend(matrix_cells(Some(&node.pi2), n, m));
        row.extend(matrix_cells(Some(&node.s), n, n));
        row.extend(matrix_cells(node.x_matrix.as_ref(), m, m));
        csv.row(row);
    }
    csv.finish()?;
    Ok(())
}
