//! `indef-model`: the closed-form pipeline of the sign-weight model case.

use super::{CliError, RunContext};
use crate::output::{fmt_number, json_number, Check, CsvWriter, Report};
use gbdt_core::matcore::{c, ComplexMatrix};
use gbdt_core::model_indef::{
    controllability_check, transformed_indefinite, transformed_solution,
};
use num_complex::Complex64;

pub fn run(ctx: &RunContext) -> Result<i32, CliError> {
    let model = ctx
        .scenario
        .model
        .as_ref()
        .ok_or_else(|| CliError::Schema("the indef-model command needs a `model` block".into()))?;
    let params = model.params()?;
    let grid = ctx.scenario.require_grid(ctx.grid_steps)?;

    // Punctured per-side grid {+-k h}; the origin is never an evaluation
    // node because S(0) = 0 by construction.
    let n_half = (grid.steps / 2).max(1);
    let mut xs: Vec<f64> = Vec::new();
    if grid.x_min < 0.0 {
        xs.extend((1..=n_half).rev().map(|k| grid.x_min * k as f64 / n_half as f64));
    }
    if grid.x_max > 0.0 {
        xs.extend((1..=n_half).map(|k| grid.x_max * k as f64 / n_half as f64));
    }
    if xs.is_empty() {
        return Err(CliError::Schema("model grid is empty".into()));
    }

    let controllable = controllability_check(&params)?;
    let transform = transformed_indefinite(&params, &xs)?;
    if transform.samples.is_empty() {
        return Err(CliError::SingularGap(
            "S(x) was singular at every requested node".into(),
        ));
    }

    // Merge samples and gaps into one x-ordered table.
    enum Row<'a> {
        Sample(&'a gbdt_core::model_indef::IndefSample),
        Gap(&'a gbdt_core::model_indef::IndefGap),
    }
    let mut rows: Vec<(f64, Row)> = transform
        .samples
        .iter()
        .map(|s| (s.x, Row::Sample(s)))
        .chain(transform.gaps.iter().map(|g| (g.x, Row::Gap(g))))
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite grid"));

    let mut csv = CsvWriter::new(
        ctx.out_dir.join("model.csv"),
        &[
            "x",
            "r_tilde_re",
            "r_tilde_im",
            "q_tilde_re",
            "q_tilde_im",
            "q_breve_re",
            "q_breve_im",
            "det_s",
            "min_eig_s",
        ],
    );
    let mut q_breve_im_worst: f64 = 0.0;
    let mut min_eig_worst = f64::INFINITY;
    for (_, row) in &rows {
        match row {
            Row::Sample(s) => {
                q_breve_im_worst = q_breve_im_worst.max(s.q_breve.im.abs());
                min_eig_worst = min_eig_worst.min(s.min_eig_s);
                csv.row(vec![
                    fmt_number(s.x),
                    fmt_number(s.r_tilde.re),
                    fmt_number(s.r_tilde.im),
                    fmt_number(s.q_tilde.re),
                    fmt_number(s.q_tilde.im),
                    fmt_number(s.q_breve.re),
                    fmt_number(s.q_breve.im),
                    fmt_number(s.det_s),
                    fmt_number(s.min_eig_s),
                ]);
            }
            Row::Gap(g) => {
                min_eig_worst = min_eig_worst.min(g.min_eig_s);
                csv.row(vec![
                    fmt_number(g.x),
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                    fmt_number(g.det_s),
                    fmt_number(g.min_eig_s),
                ]);
            }
        }
    }
    csv.finish()?;

    let mut report = Report::new(&ctx.scenario.name, "indef-model", ctx.tol);

    // The derived triple satisfies its identity exactly (rhs is zero).
    let validation = params.derived_triple().validate()?;
    report.push(Check::residual(
        "derived_triple_identity",
        "relative residual of the Sylvester identity of the derived triple",
        validation.relative,
        ctx.tol_or(1e-12),
    ));
    report.push(Check::residual(
        "potential_realness",
        "max |Im q_breve| over the sampled nodes",
        q_breve_im_worst,
        ctx.tol_or(1e-9),
    ));
    report.push(Check::residual(
        "s_nonnegativity",
        "negative part of the smallest eigenvalue of S(x) over the grid",
        (-min_eig_worst).max(0.0),
        ctx.tol_or(1e-10),
    ));
    report.push(Check::boolean(
        "invertibility_off_origin",
        "a controllable pair must produce no singular nodes away from 0",
        !controllable || transform.gaps.is_empty(),
    ));

    // Transformed solutions solve the indefinite equation: the
    // central-difference residual at two stencil widths must decay at
    // second order (observed order in [1.5, 2.5]).
    let h = match &model.h {
        Some(dto) => dto.matrix()?,
        None => ComplexMatrix::col_vector(&[c(1.0, 0.0), c(0.0, 0.0)]),
    };
    let lambdas: Vec<Complex64> = if ctx.scenario.lambdas.is_empty() {
        vec![c(1.0, 1.0)]
    } else {
        ctx.scenario.lambdas.iter().map(|l| l.value()).collect()
    };
    let mut order_worst_gap: f64 = 0.0;
    let mut order_values = Vec::new();
    if grid.x_max > 0.0 && n_half >= 8 {
        let step = grid.x_max / n_half as f64;
        let center = (n_half / 2).max(2);
        let x_center = grid.x_max * center as f64 / n_half as f64;
        for &lambda in &lambdas {
            let mut residuals = Vec::new();
            for &width in &[2.0 * step, step] {
                let y_m = transformed_solution(&params, x_center - width, lambda, &h)?[(0, 0)];
                let y_0 = transformed_solution(&params, x_center, lambda, &h)?[(0, 0)];
                let y_p = transformed_solution(&params, x_center + width, lambda, &h)?[(0, 0)];
                let second = (y_p - 2.0 * y_0 + y_m) / (width * width);
                let q_breve = transformed_indefinite(&params, &[x_center])?.samples[0].q_breve;
                let lhs = -second + q_breve * y_0;
                let rhs = lambda * y_0; // sign(x_center) = 1
                residuals.push((lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm())));
            }
            let order = (residuals[0] / residuals[1]).log2();
            order_values.push(json_number(order));
            order_worst_gap = order_worst_gap.max((order - 2.0).abs());
        }
        report.push(Check::residual(
            "indefinite_equation_order",
            "deviation from second-order decay of the indefinite-equation residual",
            order_worst_gap,
            0.5,
        ));
    }

    // Near-origin growth of the potential: reported, never asserted.
    let near_origin: Vec<serde_json::Value> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .filter_map(|&x| {
            transformed_indefinite(&params, &[x])
                .ok()
                .and_then(|t| t.samples.first().map(|s| (x, s.q_breve.norm())))
        })
        .map(|(x, q)| {
            serde_json::json!({"x": json_number(x), "x2_abs_q_breve": json_number(x * x * q)})
        })
        .collect();

    report.extra("controllable", serde_json::Value::Bool(controllable));
    report.extra(
        "singular_gaps",
        serde_json::Value::Array(
            transform
                .gaps
                .iter()
                .map(|g| json_number(g.x))
                .collect(),
        ),
    );
    report.extra("near_origin", serde_json::Value::Array(near_origin));
    report.extra(
        "residual_orders",
        serde_json::Value::Array(order_values),
    );
    report.write(ctx.out_dir)?;
    Ok(if report.all_pass() { 0 } else { 4 })
}
