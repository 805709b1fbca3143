//! `transform`: transformed coefficients per node, plus the gauge-normalised
//! form when available.

use super::{CliError, RunContext};
use crate::output::{
    fmt_cell, fmt_number, matrix_cells, matrix_headers, Check, CsvWriter, Report,
};
use gbdt_core::gbdt::{self, PathMode, TransformedSample};
use gbdt_core::matcore;
use gbdt_core::systems::Dialect;

pub fn run(ctx: &RunContext) -> Result<i32, CliError> {
    let sys = ctx.scenario.require_system()?;
    let triple = ctx.scenario.require_triple(&sys)?;
    let grid = ctx.scenario.require_grid(ctx.grid_steps)?;
    let opts = ctx.propagation_options();
    let path = gbdt::propagate_with(&triple, &sys, &grid, &opts)?;

    if path.nodes().iter().all(|n| !n.s_invertible) {
        return Err(CliError::SingularGap(
            "S(x) is singular at every grid node; no coefficients to transform".into(),
        ));
    }

    let m = path.m();
    let is_sl = matches!(sys.dialect(), Dialect::SturmLiouville { .. });
    let mut header: Vec<String> = vec!["x".into(), "s_invertible".into()];
    match sys.dialect() {
        Dialect::General { .. } => header.extend(matrix_headers("q0t", m, m)),
        Dialect::Hamiltonian { .. } => header.extend(matrix_headers("h0t", m, m)),
        Dialect::ShinZettl { .. } | Dialect::SturmLiouville { .. } => {
            header.extend(
                ["r1t_re", "r1t_im", "r2t_re", "r2t_im", "qt_re", "qt_im"]
                    .map(String::from),
            );
            if is_sl {
                header.push("q_breve".into());
            }
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = CsvWriter::new(ctx.out_dir.join("transform.csv"), &header_refs);

    let mut hermiticity_dev: f64 = 0.0;
    let mut shear_closure_dev: f64 = 0.0;
    for idx in 0..path.len() {
        let node = path.node(idx).map_err(CliError::from)?;
        let mut row = vec![
            fmt_number(node.x),
            if node.s_invertible { "true" } else { "false" }.to_string(),
        ];
        if !node.s_invertible {
            let na_cells = header.len() - 2;
            row.extend(std::iter::repeat("NA".to_string()).take(na_cells));
            csv.row(row);
            continue;
        }
        let sample = gbdt::transform_coefficients_at(&path, &sys, idx)?;
        match &sample {
            TransformedSample::General { q0 } => {
                row.extend(matrix_cells(Some(q0), m, m));
            }
            TransformedSample::Hamiltonian { h0 } => {
                hermiticity_dev = hermiticity_dev
                    .max((h0 - &h0.adjoint()).norm_fro() / (1.0 + h0.norm_fro()));
                row.extend(matrix_cells(Some(h0), m, m));
            }
            TransformedSample::ShinZettl { r1, r2, q } => {
                if sys.lagrange_symmetric() {
                    shear_closure_dev = shear_closure_dev.max((*r1 + r2.conj()).norm());
                }
                row.extend([
                    fmt_number(r1.re),
                    fmt_number(r1.im),
                    fmt_number(r2.re),
                    fmt_number(r2.im),
                    fmt_number(q.re),
                    fmt_number(q.im),
                ]);
                if is_sl {
                    let q_breve = gbdt::transformed_sl_potential_at(&path, &sys, idx)?;
                    row.push(fmt_cell(Some(q_breve)));
                }
            }
        }
        csv.row(row);
    }
    csv.finish()?;

    let mut report = Report::new(&ctx.scenario.name, "transform", ctx.tol);
    report.push(Check::residual(
        "identity_preservation",
        "max relative residual of the Sylvester identity along the path",
        path.max_identity_residual(),
        opts.identity_tol,
    ));
    if matches!(sys.dialect(), Dialect::Hamiltonian { .. }) {
        report.push(Check::residual(
            "transformed_h0_hermiticity",
            "max relative deviation of the transformed H0 from Hermitian symmetry",
            hermiticity_dev,
            ctx.tol_or(1e-9),
        ));
    }
    if sys.lagrange_symmetric()
        && matches!(
            sys.dialect(),
            Dialect::ShinZettl { .. } | Dialect::SturmLiouville { .. }
        )
    {
        report.push(Check::residual(
            "lagrange_symmetry_closure",
            "max |r1~ + conj(r2~)| over the transformed shear coefficients",
            shear_closure_dev,
            ctx.tol_or(1e-9),
        ));
    }

    // Gauge-normalised form: Hamiltonian dialect, symmetric path,
    // invertible J, and no singular gap along the grid.
    let gauge_applicable = matches!(sys.dialect(), Dialect::Hamiltonian { .. })
        && matches!(path.mode(), PathMode::Symmetric { .. })
        && path.nodes().iter().all(|n| n.s_invertible);
    if gauge_applicable {
        match gbdt::gauge_normalize(&path, &sys) {
            Ok(samples) => {
                let mut header: Vec<String> = vec!["x".into(), "symplectic_residual".into()];
                header.extend(matrix_headers("w_hat", m, m));
                header.extend(matrix_headers("h1_hat", m, m));
                header.extend(matrix_headers("h0_hat", m, m));
                let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
                let mut gauge_csv = CsvWriter::new(ctx.out_dir.join("gauge.csv"), &header_refs);
                let mut worst = 0.0f64;
                let mut herm = 0.0f64;
                for s in &samples {
                    worst = worst.max(s.symplectic_residual);
                    herm = herm
                        .max((&s.h1_hat - &s.h1_hat.adjoint()).norm_fro())
                        .max((&s.h0_hat - &s.h0_hat.adjoint()).norm_fro());
                    let mut row = vec![fmt_number(s.x), fmt_number(s.symplectic_residual)];
                    row.extend(matrix_cells(Some(&s.w_hat), m, m));
                    row.extend(matrix_cells(Some(&s.h1_hat), m, m));
                    row.extend(matrix_cells(Some(&s.h0_hat), m, m));
                    gauge_csv.row(row);
                }
                gauge_csv.finish()?;
                report.push(Check::residual(
                    "gauge_symplectic_property",
                    "max relative deviation of w^ J w^* from J",
                    worst,
                    ctx.tol_or(1e-8),
                ));
                report.push(Check::residual(
                    "gauge_hermiticity",
                    "max deviation of the gauge-conjugated H1^, H0^ from Hermitian symmetry",
                    herm,
                    ctx.tol_or(1e-9),
                ));
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let reason = if !matches!(sys.dialect(), Dialect::Hamiltonian { .. }) {
            "system is not in Hamiltonian dialect"
        } else if !matches!(path.mode(), PathMode::Symmetric { .. }) {
            "triple is not in symmetric mode"
        } else {
            "S(x) has singular nodes"
        };
        report.extra(
            "gauge_normalization",
            serde_json::json!({"skipped": reason}),
        );
    }

    // Consistency with matcore Hermiticity testing at a mid-grid sample.
    if let Dialect::Hamiltonian { .. } = sys.dialect() {
        if let Some(idx) = (0..path.len()).find(|&i| path.node(i).unwrap().s_invertible) {
            if let TransformedSample::Hamiltonian { h0 } =
                gbdt::transform_coefficients_at(&path, &sys, idx)?
            {
                report.push(Check::boolean(
                    "transformed_h0_is_hermitian_matrix",
                    "matcore Hermiticity test on a sample transformed H0",
                    matcore::is_hermitian(&h0, ctx.tol_or(1e-9)),
                ));
            }
        }
    }

    report.write(ctx.out_dir)?;
    Ok(if report.all_pass() { 0 } else { 4 })
}
