//! `weyl`: disk forms, Möbius blocks and mapped candidates per lambda.

use super::{CliError, RunContext};
use crate::output::{
    fmt_number, json_number, matrix_cells, matrix_headers, matrix_json, Check, CsvWriter, Report,
};
use gbdt_core::gbdt::{self, GbdtTriple};
use gbdt_core::matcore::{self, c, ComplexMatrix};
use gbdt_core::weyl::{
    disk_membership, fundamental_solution, j_form_identity_residual, moebius_blocks, moebius_map,
    require_block_j, transformed_fundamental, validate_normalization, MEMBERSHIP_TOL,
};

pub fn run(ctx: &RunContext) -> Result<i32, CliError> {
    let sys = ctx.scenario.require_system()?;
    let weyl_block = ctx
        .scenario
        .weyl
        .as_ref()
        .ok_or_else(|| CliError::Schema("the weyl command needs a `weyl` block".into()))?;
    let triple = ctx.scenario.require_triple(&sys)?;
    if !matches!(triple, GbdtTriple::Symmetric { .. }) {
        return Err(CliError::Schema(
            "the weyl command needs a symmetric-mode triple".into(),
        ));
    }
    let j = sys
        .symmetric_j()
        .ok_or_else(|| CliError::Schema("the weyl command needs a Hamiltonian carrier".into()))?;
    let r = require_block_j(&j).map_err(|e| CliError::Schema(e.to_string()))?;
    let e_matrix = match &weyl_block.e {
        Some(dto) => dto.matrix()?,
        None => ComplexMatrix::identity(2 * r),
    };
    validate_normalization(&e_matrix, &j).map_err(|e| CliError::Schema(e.to_string()))?;
    if ctx.scenario.lambdas.is_empty() {
        return Err(CliError::Schema(
            "the weyl command needs at least one lambda".into(),
        ));
    }
    let lambdas: Vec<_> = ctx.scenario.lambdas.iter().map(|l| l.value()).collect();
    if let Some(bad) = lambdas.iter().find(|l| l.im <= 0.0) {
        return Err(CliError::Schema(format!(
            "Weyl lambdas must lie in the upper half-plane, got {bad}"
        )));
    }
    let candidates: Vec<ComplexMatrix> = weyl_block
        .m_candidates
        .iter()
        .map(|dto| dto.matrix())
        .collect::<Result<_, _>>()?;
    for m in &candidates {
        if m.rows() != r || m.cols() != r {
            return Err(CliError::Schema(format!(
                "Weyl candidates must be {r}x{r}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }

    let grid = ctx.scenario.require_grid(ctx.grid_steps)?;
    let opts = ctx.propagation_options();
    let path = gbdt::propagate_with(&triple, &sys, &grid, &opts)?;
    let ell = weyl_block.ell_prime;
    let end_idx = path
        .index_at(ell)
        .map_err(|_| CliError::Schema(format!("ell_prime = {ell} is not a grid node")))?;
    if end_idx < path.zero_index() {
        return Err(CliError::Schema("ell_prime must be nonnegative".into()));
    }
    let xs: Vec<f64> = (path.zero_index()..=end_idx)
        .map(|i| path.node(i).map(|n| n.x))
        .collect::<Result<_, _>>()
        .map_err(CliError::from)?;

    let mut header: Vec<String> = vec![
        "lambda_re".into(),
        "lambda_im".into(),
        "candidate".into(),
    ];
    header.extend(matrix_headers("m", r, r));
    header.push("form_initial_max_eig".into());
    header.push("member_initial".into());
    header.extend(matrix_headers("mtilde", r, r));
    header.push("form_transformed_max_eig".into());
    header.push("member_transformed".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = CsvWriter::new(ctx.out_dir.join("weyl.csv"), &header_refs);

    let membership_tol = ctx.tol_or(MEMBERSHIP_TOL);
    let mut report = Report::new(&ctx.scenario.name, "weyl", ctx.tol);
    let mut j_form_worst: f64 = 0.0;
    let mut monotonicity_worst: f64 = 0.0;
    let mut mapped_worst: f64 = 0.0;
    let mut u_blocks = Vec::new();

    for &lambda in &lambdas {
        let ys = fundamental_solution(&sys, lambda, &e_matrix, &xs)?;
        let y_end = ys.last().expect("nonempty grid");
        let u = moebius_blocks(&path, lambda, &e_matrix)?;
        let yt = transformed_fundamental(&path, &sys, lambda, &e_matrix, ell)?;
        let yt_end = &yt.last().expect("nonempty grid").1;

        let mut entry = serde_json::Map::new();
        entry.insert("lambda_re".into(), json_number(lambda.re));
        entry.insert("lambda_im".into(), json_number(lambda.im));
        entry.insert("u".into(), matrix_json(u.matrix()));
        u_blocks.push(serde_json::Value::Object(entry));

        // Algebraic identity and monotonicity samples at 0, mid, ell'.
        for idx in [path.zero_index(), (path.zero_index() + end_idx) / 2, end_idx] {
            let residual = j_form_identity_residual(&path, idx, lambda)?;
            j_form_worst = j_form_worst.max(residual);
            let w = gbdt::darboux_matrix(&path, idx, lambda)?;
            let gap = (&j - &(&(&w.adjoint() * &j) * &w)).scale(c(0.0, 1.0));
            let min_eig = matcore::min_eigenvalue(&gap)?;
            monotonicity_worst = monotonicity_worst.max((-min_eig).max(0.0));
        }

        for (candidate_idx, m) in candidates.iter().enumerate() {
            let form = gbdt_core::weyl::weyl_disk_form(y_end, &j, m)?;
            let (max_eig, member) = disk_membership(&form, membership_tol)?;
            let mapped = moebius_map(&u, m)?;
            let form_t = gbdt_core::weyl::weyl_disk_form(yt_end, &j, &mapped)?;
            let (max_eig_t, member_t) = disk_membership(&form_t, membership_tol)?;
            if member {
                let scale = 1.0 + form_t.norm_fro();
                mapped_worst = mapped_worst.max(max_eig_t / scale);
            }
            let mut row = vec![
                fmt_number(lambda.re),
                fmt_number(lambda.im),
                candidate_idx.to_string(),
            ];
            row.extend(matrix_cells(Some(m), r, r));
            row.push(fmt_number(max_eig));
            row.push(member.to_string());
            row.extend(matrix_cells(Some(&mapped), r, r));
            row.push(fmt_number(max_eig_t));
            row.push(member_t.to_string());
            csv.row(row);
        }
    }
    csv.finish()?;

    report.push(Check::residual(
        "j_form_identity",
        "max relative residual of i w* J w = iJ + rank-correction over sampled nodes",
        j_form_worst,
        ctx.tol_or(1e-9),
    ));
    report.push(Check::residual(
        "disk_monotonicity",
        "max negative part of min-eig i(J - w* J w) for upper half-plane lambdas",
        monotonicity_worst,
        ctx.tol_or(1e-9),
    ));
    report.push(Check::residual(
        "mapped_candidates_inside",
        "max relative disk-form eigenvalue of mapped in-disk candidates",
        mapped_worst,
        ctx.tol_or(1e-7),
    ));
    report.extra("u_blocks", serde_json::Value::Array(u_blocks));
    report.extra("r", serde_json::json!(r));
    report.write(ctx.out_dir)?;
    Ok(if report.all_pass() { 0 } else { 4 })
}
